//! Rational polyhedral fans stored by their maximal cones.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::polyhedral::feasible_nonneg;
use crate::rational::{rat, Rational};
use crate::ratmat::{smith_normal_form, IntMatrix, RatMatrix};

/// A fan in `Z^dim`: primitive ray generators plus maximal cones as sorted ray-index sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

/// A cone of a fan, named by its (sorted) ray indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConeRef(pub Vec<usize>);

impl ConeRef {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        ConeRef(rays)
    }

    pub fn zero() -> Self {
        ConeRef(Vec::new())
    }
}

const BUNDLED: &[(&str, &str)] = &[
    ("p2.fan.json", include_str!("../fixtures/p2.fan.json")),
    ("p1xp1.fan.json", include_str!("../fixtures/p1xp1.fan.json")),
    ("hirzebruch2.fan.json", include_str!("../fixtures/hirzebruch2.fan.json")),
    ("p2xp1.fan.json", include_str!("../fixtures/p2xp1.fan.json")),
];

impl Fan {
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Self {
        let max_cones = max_cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        Fan { dim, rays, max_cones }
    }

    /// Looks up a bundled fixture by file name (`p2.fan.json`) or stem (`p2`).
    pub fn bundled(name: &str) -> Option<Fan> {
        let base = name.rsplit('/').next().unwrap_or(name);
        BUNDLED
            .iter()
            .find(|(file, _)| *file == base || file.strip_suffix(".fan.json") == Some(base))
            .map(|(_, src)| Fan::from_json(src).expect("bundled fixture parses"))
    }

    pub fn bundled_names() -> Vec<&'static str> {
        BUNDLED.iter().map(|(f, _)| *f).collect()
    }

    pub fn from_json(src: &str) -> Result<Fan> {
        let f: Fan = serde_json::from_str(src).map_err(|e| Error::Invalid(format!("fan JSON: {e}")))?;
        Ok(Fan::new(f.dim, f.rays, f.max_cones))
    }

    /// The zero-dimensional fan: no rays, one (empty) cone.
    pub fn point() -> Fan {
        Fan { dim: 0, rays: Vec::new(), max_cones: vec![Vec::new()] }
    }

    /// Fan of `P^k`: rays `e_1..e_k, -(e_1+..+e_k)`, every k-subset a maximal cone.
    pub fn projective_space(k: usize) -> Fan {
        let mut rays: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
        rays.push(vec![-1; k]);
        let max_cones = (0..=k).rev().map(|skip| (0..=k).filter(|&i| i != skip).collect()).collect();
        Fan::new(k, rays, max_cones)
    }

    /// Hirzebruch surface `F_r`: rays (1,0), (0,1), (-1,r), (0,-1).
    pub fn hirzebruch(r: i64) -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, r], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn ray_rat(&self, i: usize) -> Vec<Rational> {
        self.rays[i].iter().map(|&x| rat(x)).collect()
    }

    /// Rays as the rows of an integer matrix (`rays x dim`).
    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rays.len(), self.dim, |i, j| self.rays[i][j].into())
    }

    /// Generators of a cone as the columns of a `dim x k` matrix.
    pub fn cone_matrix(&self, cone: &[usize]) -> RatMatrix {
        RatMatrix::from_fn(self.dim, cone.len(), |i, j| rat(self.rays[cone[j]][i]))
    }

    pub fn is_cone_simplicial(&self, cone: &[usize]) -> bool {
        self.cone_matrix(cone).rank() == cone.len()
    }

    pub fn is_simplicial(&self) -> bool {
        self.max_cones.iter().all(|c| self.is_cone_simplicial(c))
    }

    pub fn is_pure(&self) -> bool {
        self.max_cones.iter().all(|c| c.len() == self.dim)
    }

    /// Rank `rays - dim`, the Picard number for complete simplicial fans.
    pub fn picard_rank(&self) -> i64 {
        self.rays.len() as i64 - self.dim as i64
    }

    /// Is `cone` a face of some maximal cone? Every subset of a simplicial cone is a face.
    pub fn contains_cone(&self, cone: &ConeRef) -> bool {
        self.max_cones.iter().any(|m| cone.0.iter().all(|r| m.contains(r)))
    }

    /// All cones (faces of maximal cones), ordered by dimension then lexicographically.
    /// Only meaningful for simplicial fans.
    pub fn all_cones(&self) -> Vec<ConeRef> {
        let mut set = BTreeSet::new();
        for m in &self.max_cones {
            let k = m.len();
            for mask in 0u64..(1u64 << k) {
                let sub: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| m[i]).collect();
                set.insert((sub.len(), sub));
            }
        }
        set.into_iter().map(|(_, c)| ConeRef(c)).collect()
    }

    /// Maximal cones containing the given ray index set.
    pub fn max_cones_containing<'a>(&'a self, tau: &'a [usize]) -> impl Iterator<Item = (usize, &'a Vec<usize>)> + 'a {
        self.max_cones.iter().enumerate().filter(move |(_, c)| tau.iter().all(|r| c.contains(r)))
    }

    /// Coordinates of `v` in the generators of a simplicial cone, or `None`
    /// if `v` lies outside the cone (or outside its span).
    pub fn cone_coordinates(&self, cone: &[usize], v: &[Rational]) -> Option<Vec<Rational>> {
        let m = self.cone_matrix(cone);
        let aug = {
            let mut cols: Vec<Vec<Rational>> = (0..cone.len()).map(|j| m.column(j)).collect();
            cols.push(v.to_vec());
            RatMatrix::from_columns(&cols, self.dim).ok()?
        };
        let (r, piv) = aug.rref();
        if piv.contains(&cone.len()) {
            return None;
        }
        let mut coords = vec![Rational::zero(); cone.len()];
        for (row, &p) in piv.iter().enumerate() {
            coords[p] = r[(row, cone.len())].clone();
        }
        if coords.iter().any(|c| c < &Rational::zero()) {
            return None;
        }
        Some(coords)
    }

    /// Index of a maximal cone containing `v`, if any (first in storage order).
    pub fn locate(&self, v: &[Rational]) -> Option<usize> {
        self.max_cones.iter().position(|c| self.cone_coordinates(c, v).is_some())
    }

    pub fn to_json(&self) -> Value {
        json!({ "dim": self.dim, "rays": self.rays, "max_cones": self.max_cones })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub kind: &'static str,
    pub cones: Vec<usize>,
    pub rays: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub simplicial: bool,
    pub simplicial_cones: Vec<bool>,
    pub issues: Vec<Issue>,
    pub notes: Vec<String>,
}

/// Checks ray primitivity, duplicates, index ranges, simpliciality and the
/// face-intersection property (via exact feasibility on cone generators).
pub fn validate(fan: &Fan) -> ValidationReport {
    let mut issues = Vec::new();
    let mut notes = Vec::new();
    fn push(issues: &mut Vec<Issue>, kind: &'static str, cones: Vec<usize>, rays: Vec<usize>, message: String) {
        issues.push(Issue { kind, cones, rays, message });
    }
    for (i, r) in fan.rays.iter().enumerate() {
        if r.len() != fan.dim {
            push(
                &mut issues,
                "dimension",
                vec![],
                vec![i],
                format!("ray {i} has length {} in dimension {}", r.len(), fan.dim),
            );
            continue;
        }
        let g = r.iter().fold(0i64, |g, &x| g.gcd(&x));
        if g == 0 {
            push(&mut issues, "zero_ray", vec![], vec![i], format!("ray {i} is zero"));
        } else if g != 1 {
            push(&mut issues, "primitivity", vec![], vec![i], format!("ray {i} = {r:?} is not primitive (gcd {g})"));
        }
    }
    for i in 0..fan.rays.len() {
        for j in i + 1..fan.rays.len() {
            if fan.rays[i] == fan.rays[j] {
                push(&mut issues, "duplicate_ray", vec![], vec![i, j], format!("rays {i} and {j} coincide"));
            }
        }
    }
    let mut structural_ok = issues.is_empty();
    for (c, cone) in fan.max_cones.iter().enumerate() {
        if let Some(&bad) = cone.iter().find(|&&r| r >= fan.rays.len()) {
            push(&mut issues, "index", vec![c], vec![bad], format!("cone {c} references missing ray {bad}"));
            structural_ok = false;
        }
        if cone.windows(2).any(|w| w[0] == w[1]) {
            push(&mut issues, "index", vec![c], cone.clone(), format!("cone {c} repeats a ray"));
            structural_ok = false;
        }
    }
    if !structural_ok {
        return ValidationReport { valid: false, simplicial: false, simplicial_cones: Vec::new(), issues, notes };
    }
    let simplicial_cones: Vec<bool> = fan.max_cones.iter().map(|c| fan.is_cone_simplicial(c)).collect();
    for (a, ca) in fan.max_cones.iter().enumerate() {
        for (b, cb) in fan.max_cones.iter().enumerate() {
            if a != b && ca.iter().all(|r| cb.contains(r)) && (ca.len() < cb.len() || a > b) {
                push(
                    &mut issues,
                    "redundant_cone",
                    vec![a, b],
                    ca.clone(),
                    format!("cone {a} is contained in cone {b}"),
                );
            }
        }
    }
    for a in 0..fan.max_cones.len() {
        for b in a + 1..fan.max_cones.len() {
            if !(simplicial_cones[a] && simplicial_cones[b]) {
                notes.push(format!("face check skipped for non-simplicial pair ({a}, {b})"));
                continue;
            }
            match overlap_witness(fan, &fan.max_cones[a], &fan.max_cones[b]) {
                Ok(Some(point)) => push(
                    &mut issues,
                    "face_property",
                    vec![a, b],
                    vec![],
                    format!(
                        "cones {a} and {b} meet outside their common face, e.g. at {}",
                        point.iter().map(crate::rational::display).collect::<Vec<_>>().join(",")
                    ),
                ),
                Ok(None) => {}
                Err(e) => push(&mut issues, "face_property", vec![a, b], vec![], format!("feasibility failed: {e}")),
            }
        }
    }
    let simplicial = simplicial_cones.iter().all(|&s| s);
    ValidationReport { valid: issues.is_empty(), simplicial, simplicial_cones, issues, notes }
}

/// For two simplicial cones, a point of their intersection that is not in the cone
/// on their shared rays. `None` means the intersection is exactly the common face.
fn overlap_witness(fan: &Fan, a: &[usize], b: &[usize]) -> Result<Option<Vec<Rational>>> {
    let n = fan.dim;
    let vars = a.len() + b.len();
    let mut m = RatMatrix::zeros(n + 1, vars);
    for (j, &r) in a.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = rat(fan.rays[r][i]);
        }
        if !b.contains(&r) {
            m[(n, j)] = Rational::one();
        }
    }
    for (j, &r) in b.iter().enumerate() {
        for i in 0..n {
            m[(i, a.len() + j)] = rat(-fan.rays[r][i]);
        }
        if !a.contains(&r) {
            m[(n, a.len() + j)] = Rational::one();
        }
    }
    let mut rhs = vec![Rational::zero(); n + 1];
    rhs[n] = Rational::one();
    Ok(feasible_nonneg(&m, &rhs)?
        .map(|x| (0..n).map(|i| a.iter().enumerate().map(|(j, &r)| &x[j] * rat(fan.rays[r][i])).sum()).collect()))
}

/// Completeness of a pure simplicial fan: every facet of every maximal cone is
/// shared by exactly two maximal cones, and the maximal cones are connected
/// through facets.
pub fn is_complete(fan: &Fan) -> Result<bool> {
    if !fan.is_pure() {
        return Err(Error::Invalid("non-pure fan: completeness needs all maximal cones of full dimension".into()));
    }
    if !fan.is_simplicial() {
        return Err(Error::Unsupported("completeness test needs a simplicial fan".into()));
    }
    if fan.max_cones.is_empty() {
        return Ok(false);
    }
    if fan.dim == 0 {
        return Ok(true);
    }
    let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (c, cone) in fan.max_cones.iter().enumerate() {
        for skip in 0..cone.len() {
            let f: Vec<usize> = cone.iter().copied().enumerate().filter(|&(i, _)| i != skip).map(|(_, r)| r).collect();
            facets.entry(f).or_default().push(c);
        }
    }
    if facets.values().any(|owners| owners.len() != 2) {
        return Ok(false);
    }
    let mut adj = vec![Vec::new(); fan.max_cones.len()];
    for owners in facets.values() {
        adj[owners[0]].push(owners[1]);
        adj[owners[1]].push(owners[0]);
    }
    let mut seen = vec![false; fan.max_cones.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(c) = queue.pop_front() {
        for &d in &adj[c] {
            if !seen[d] {
                seen[d] = true;
                queue.push_back(d);
            }
        }
    }
    Ok(seen.into_iter().all(|s| s))
}

/// Product fan in `Z^(n1+n2)`: rays of `f1` then rays of `f2`, cones `s1 ∪ s2`.
pub fn product(f1: &Fan, f2: &Fan) -> Fan {
    let dim = f1.dim + f2.dim;
    let mut rays: Vec<Vec<i64>> =
        f1.rays.iter().map(|r| r.iter().copied().chain(std::iter::repeat_n(0, f2.dim)).collect()).collect();
    rays.extend(f2.rays.iter().map(|r| std::iter::repeat_n(0, f1.dim).chain(r.iter().copied()).collect()));
    let off = f1.rays.len();
    let mut max_cones = Vec::new();
    for c1 in &f1.max_cones {
        for c2 in &f2.max_cones {
            max_cones.push(c1.iter().copied().chain(c2.iter().map(|&r| r + off)).collect());
        }
    }
    Fan::new(dim, rays, max_cones)
}

#[derive(Clone, Debug)]
pub struct StarFan {
    pub fan: Fan,
    /// Rows of the quotient map `N -> N / (span(tau) ∩ N)`.
    pub projection: IntMatrix,
    /// For each star ray, the source rays that map onto it.
    pub ray_sources: Vec<Vec<usize>>,
    pub source_picard_rank: i64,
    pub star_picard_rank: i64,
}

impl StarFan {
    pub fn to_json(&self) -> Value {
        json!({
            "fan": self.fan.to_json(),
            "projection": self.projection.display_rows(),
            "ray_sources": self.ray_sources,
            "source_picard_rank": self.source_picard_rank,
            "star_picard_rank": self.star_picard_rank,
            "picard_rank_preserved": self.source_picard_rank == self.star_picard_rank,
        })
    }
}

/// The fan of the orbit closure `V(tau)`: images of the cones containing `tau`
/// in the quotient lattice, computed with a Smith normal form.
pub fn star_fan(fan: &Fan, tau: &ConeRef) -> Result<StarFan> {
    if tau.0.iter().any(|&r| r >= fan.rays.len()) || !fan.contains_cone(tau) {
        return Err(Error::Invalid(format!("cone {:?} is not a cone of the fan", tau.0)));
    }
    let n = fan.dim;
    let gens = IntMatrix::from_fn(n, tau.0.len(), |i, j| fan.rays[tau.0[j]][i].into());
    let snf = smith_normal_form(&gens);
    let r = snf.rank();
    let projection = IntMatrix::from_fn(n - r, n, |i, j| snf.u[(r + i, j)].clone());

    let mut star_rays: Vec<Vec<i64>> = Vec::new();
    let mut ray_sources: Vec<Vec<usize>> = Vec::new();
    let mut index_of: BTreeMap<usize, Option<usize>> = BTreeMap::new();
    for (_, cone) in fan.max_cones_containing(&tau.0) {
        for &ray in cone {
            if tau.0.contains(&ray) || index_of.contains_key(&ray) {
                continue;
            }
            let v: Vec<num_bigint::BigInt> = fan.rays[ray].iter().map(|&x| x.into()).collect();
            let img = projection.mul_vec(&v)?;
            let g = img.iter().fold(num_bigint::BigInt::zero(), |g, x| g.gcd(x));
            if g.is_zero() {
                index_of.insert(ray, None);
                continue;
            }
            let prim: Vec<i64> = img
                .iter()
                .map(|x| (x / &g).to_i64().ok_or_else(|| Error::Capacity("star ray exceeds i64".into())))
                .collect::<Result<_>>()?;
            let idx = match star_rays.iter().position(|s| *s == prim) {
                Some(i) => i,
                None => {
                    star_rays.push(prim);
                    ray_sources.push(Vec::new());
                    star_rays.len() - 1
                }
            };
            ray_sources[idx].push(ray);
            index_of.insert(ray, Some(idx));
        }
    }
    let mut cones: Vec<Vec<usize>> = fan
        .max_cones_containing(&tau.0)
        .map(|(_, cone)| {
            let mut c: Vec<usize> = cone.iter().filter(|r| !tau.0.contains(r)).filter_map(|r| index_of[r]).collect();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    cones.dedup();
    let star = Fan::new(n - r, star_rays, cones);
    Ok(StarFan {
        source_picard_rank: fan.picard_rank(),
        star_picard_rank: star.picard_rank(),
        fan: star,
        projection,
        ray_sources,
    })
}
