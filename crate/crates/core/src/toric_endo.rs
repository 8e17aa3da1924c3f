//! Equivariant endomorphisms of toric varieties, seen as lattice maps that
//! respect a fan.
//!
//! A surjective equivariant endomorphism sends every ray to a positive
//! multiple of a ray, so it permutes the rays. Some iterate fixes them all;
//! that iterate is diagonalizable with positive integer eigenvalues, and its
//! eigenspaces cut the fan into a product of smaller complete fans. The same
//! splitting test, run over all ray bipartitions, decides whether a fan is a
//! nontrivial product at all.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fan::{is_complete, validate, Fan};
use crate::polyhedral::in_cone;
use crate::rational::{rat, Rational};
use crate::ratmat::{smith_normal_form, to_rat_vec, IntMatrix, RatMatrix};

pub const MAX_SIMPLICITY_RAYS: usize = 16;

/// A lattice endomorphism `N -> N` together with the fan it acts on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeEndo {
    pub matrix: IntMatrix,
    pub fan: Fan,
}

impl LatticeEndo {
    /// Checks shape, injectivity and fan compatibility.
    pub fn new(matrix: IntMatrix, fan: Fan) -> Result<Self> {
        let c = check_compatible(&matrix, &fan)?;
        if let Some(bad) = c.failing_cone {
            return Err(Error::Hypothesis(format!(
                "lattice map does not send maximal cone {bad} {:?} into a cone of the fan",
                fan.max_cones[bad]
            )));
        }
        Ok(LatticeEndo { matrix, fan })
    }

    pub fn scalar(fan: &Fan, n: i64) -> Result<Self> {
        Self::new(IntMatrix::scalar(fan.dim, n), fan.clone())
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &LatticeEndo) -> Result<Self> {
        if self.fan != other.fan {
            return Err(Error::Invalid("composing endomorphisms of different fans".into()));
        }
        Ok(LatticeEndo { matrix: self.matrix.mul(&other.matrix)?, fan: self.fan.clone() })
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        Ok(LatticeEndo { matrix: self.matrix.pow(k)?, fan: self.fan.clone() })
    }

    pub fn image(&self, v: &[i64]) -> Vec<BigInt> {
        let v: Vec<BigInt> = v.iter().map(|&x| x.into()).collect();
        self.matrix.mul_vec(&v).expect("dimension checked at construction")
    }

    pub fn image_rat(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix.to_rat().mul_vec(v).expect("dimension checked at construction")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compatibility {
    pub compatible: bool,
    /// First maximal cone whose image lies in no cone of the fan.
    pub failing_cone: Option<usize>,
    /// For each maximal cone, a maximal cone containing its image.
    pub targets: Vec<Option<usize>>,
}

impl Compatibility {
    pub fn to_json(&self) -> Value {
        json!({
            "compatible": self.compatible,
            "failing_cone": self.failing_cone,
            "targets": self.targets,
        })
    }
}

/// Tests whether `phi` maps every maximal cone into some maximal cone.
pub fn check_compatible(phi: &IntMatrix, fan: &Fan) -> Result<Compatibility> {
    if phi.rows() != fan.dim || phi.cols() != fan.dim {
        return Err(Error::Shape(format!("{}x{} matrix acting on a rank-{} lattice", phi.rows(), phi.cols(), fan.dim)));
    }
    if fan.dim > 0 && phi.det()?.is_zero() {
        return Err(Error::Singular("lattice map is not injective".into()));
    }
    let q = phi.to_rat();
    let mut targets = Vec::with_capacity(fan.max_cones.len());
    for cone in &fan.max_cones {
        let images: Vec<Vec<Rational>> = cone.iter().map(|&r| q.mul_vec(&fan.ray_rat(r)).unwrap()).collect();
        let mut found = None;
        for (t, target) in fan.max_cones.iter().enumerate() {
            let inside = if fan.is_cone_simplicial(target) {
                images.iter().all(|w| fan.cone_coordinates(target, w).is_some())
            } else {
                let gens: Vec<Vec<Rational>> = target.iter().map(|&r| fan.ray_rat(r)).collect();
                images.iter().map(|w| in_cone(&gens, w)).collect::<Result<Vec<_>>>()?.into_iter().all(|b| b)
            };
            if inside {
                found = Some(t);
                break;
            }
        }
        targets.push(found);
    }
    let failing_cone = targets.iter().position(Option::is_none);
    Ok(Compatibility { compatible: failing_cone.is_none(), failing_cone, targets })
}

/// `phi(v_i) = scales[i] * v_{perm[i]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayPermutation {
    pub perm: Vec<usize>,
    pub scales: Vec<BigInt>,
}

impl RayPermutation {
    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Disjoint cycles, each starting from its smallest element, in order of that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.perm.len()];
        let mut out = Vec::new();
        for s in 0..self.perm.len() {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut i = self.perm[s];
            while i != s {
                seen[i] = true;
                c.push(i);
                i = self.perm[i];
            }
            out.push(c);
        }
        out
    }

    pub fn order(&self) -> u32 {
        self.cycles().iter().fold(1u32, |acc, c| acc.lcm(&(c.len() as u32)))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "perm": self.perm,
            "scales": self.scales.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "cycles": self.cycles(),
            "order": self.order(),
        })
    }
}

pub fn ray_permutation(endo: &LatticeEndo) -> Result<RayPermutation> {
    let fan = &endo.fan;
    let mut perm = Vec::with_capacity(fan.ray_count());
    let mut scales = Vec::with_capacity(fan.ray_count());
    for (i, r) in fan.rays.iter().enumerate() {
        let w = endo.image(r);
        let g = w.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let target =
            fan.rays.iter().position(|v| !g.is_zero() && v.iter().zip(&w).all(|(&a, b)| BigInt::from(a) * &g == *b));
        let Some(j) = target else {
            return Err(Error::Hypothesis(format!(
                "not ray-to-ray: ray {i} {:?} maps to ({}), which is not a positive multiple of a ray",
                r,
                w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            )));
        };
        perm.push(j);
        scales.push(g);
    }
    let distinct: BTreeSet<usize> = perm.iter().copied().collect();
    if distinct.len() != perm.len() {
        return Err(Error::Hypothesis("rays are not permuted: two rays share an image".into()));
    }
    Ok(RayPermutation { perm, scales })
}

/// Least `m >= 1` such that `phi^m` fixes every ray.
pub fn stabilizing_power(endo: &LatticeEndo) -> Result<u32> {
    let m = ray_permutation(endo)?.order();
    debug_assert!(ray_permutation(&endo.pow(m)?)?.is_identity());
    Ok(m)
}

/// One factor of a product splitting `N = ⊕ N_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorFan {
    /// Source rays lying in this factor, ascending.
    pub ray_indices: Vec<usize>,
    /// Basis of the saturated sublattice `span(rays) ∩ N`, as vectors in `N`.
    pub basis: Vec<Vec<BigInt>>,
    /// The factor fan in the coordinates of `basis`.
    pub fan: Fan,
}

impl FactorFan {
    pub fn to_json(&self) -> Value {
        json!({
            "ray_indices": self.ray_indices,
            "basis": self.basis.iter().map(|b| b.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "fan": self.fan.to_json(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenFactor {
    pub eigenvalue: BigInt,
    pub factor: FactorFan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub stabilizing_power: u32,
    /// Ascending by eigenvalue.
    pub factors: Vec<EigenFactor>,
    /// `[N : ⊕ (E_i ∩ N)]`.
    pub lattice_index: BigInt,
    pub warnings: Vec<String>,
}

impl Decomposition {
    pub fn factor_fans(&self) -> Vec<FactorFan> {
        self.factors.iter().map(|f| f.factor.clone()).collect()
    }

    pub fn eigenvalues(&self) -> Vec<BigInt> {
        self.factors.iter().map(|f| f.eigenvalue.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "stabilizing_power": self.stabilizing_power,
            "factors": self.factors.iter().map(|f| {
                let mut v = f.factor.to_json();
                v["eigenvalue"] = json!(f.eigenvalue.to_string());
                v
            }).collect::<Vec<_>>(),
            "lattice_index": self.lattice_index.to_string(),
            "warnings": self.warnings,
        })
    }
}

/// Splits a fan along a partition of its rays, or explains why it does not split.
///
/// Checks that the spans of the parts are complementary and that every
/// maximal cone is a union of one maximal cone from each induced subfan (and
/// conversely). Returns the factors together with the lattice index.
fn split_along(fan: &Fan, parts: &[Vec<usize>]) -> std::result::Result<(Vec<FactorFan>, BigInt), String> {
    let n = fan.dim;
    let mut factors = Vec::with_capacity(parts.len());
    let mut all_basis: Vec<Vec<BigInt>> = Vec::new();
    for part in parts {
        let gens = IntMatrix::from_fn(n, part.len(), |i, j| fan.rays[part[j]][i].into());
        let snf = smith_normal_form(&gens);
        let r = snf.rank();
        let u_inv = snf.u.to_rat().inverse().map_err(|e| e.to_string())?;
        let basis: Vec<Vec<BigInt>> =
            (0..r).map(|j| u_inv.column(j).iter().map(|q| q.to_integer()).collect()).collect();
        // Coordinates of a vector in span(part): first r entries of U v.
        let coords = |v: &[i64]| -> Vec<i64> {
            let v: Vec<BigInt> = v.iter().map(|&x| x.into()).collect();
            snf.u.mul_vec(&v).unwrap()[..r].iter().map(|x| x.to_i64().expect("small coordinates")).collect()
        };
        let rays: Vec<Vec<i64>> = part.iter().map(|&i| coords(&fan.rays[i])).collect();
        let mut cones: Vec<Vec<usize>> = Vec::new();
        for cone in &fan.max_cones {
            let local: Vec<usize> = cone.iter().filter_map(|r| part.iter().position(|p| p == r)).collect();
            if !cones.contains(&local) {
                cones.push(local);
            }
        }
        let maximal: Vec<Vec<usize>> = cones
            .iter()
            .filter(|c| !cones.iter().any(|d| d.len() > c.len() && c.iter().all(|x| d.contains(x))))
            .cloned()
            .collect();
        all_basis.extend(basis.iter().cloned());
        factors.push(FactorFan { ray_indices: part.clone(), basis, fan: Fan::new(r, rays, maximal) });
    }
    if all_basis.len() != n {
        return Err(format!("eigenspaces do not span: dimensions sum to {} in rank {n}", all_basis.len()));
    }
    let b = IntMatrix::from_fn(n, n, |i, j| all_basis[j][i].clone());
    let index = b.det().map_err(|e| e.to_string())?.abs();
    if index.is_zero() {
        return Err("eigenspaces do not span: sum is not direct".into());
    }
    // Product property, compared as sets of global ray-index sets.
    let source: BTreeSet<Vec<usize>> = fan.max_cones.iter().cloned().collect();
    let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
    for f in &factors {
        let mut next = Vec::new();
        for partial in &combos {
            for c in &f.fan.max_cones {
                let mut u = partial.clone();
                u.extend(c.iter().map(|&l| f.ray_indices[l]));
                u.sort_unstable();
                next.push(u);
            }
        }
        combos = next;
    }
    let product: BTreeSet<Vec<usize>> = combos.into_iter().collect();
    if source != product {
        return Err("product property fails: maximal cones are not joins of factor cones".into());
    }
    Ok((factors, index))
}

/// Replaces `phi` by its ray-fixing iterate and splits the fan into eigen-factors.
pub fn eigen_fan_decomposition(endo: &LatticeEndo) -> Result<Decomposition> {
    let fan = &endo.fan;
    if !fan.is_simplicial() || !is_complete(fan)? {
        return Err(Error::Invalid("eigen decomposition needs a complete simplicial fan".into()));
    }
    let m = stabilizing_power(endo)?;
    let fixed = ray_permutation(&endo.pow(m)?)?;
    if !fixed.is_identity() {
        return Err(Error::Consistency("stabilizing power does not fix the rays".into()));
    }
    if let Some(bad) = fixed.scales.iter().position(|s| !s.is_positive()) {
        return Err(Error::Hypothesis(format!("ray {bad} has non-positive scale factor")));
    }
    let mut groups: BTreeMap<BigInt, Vec<usize>> = BTreeMap::new();
    for (i, s) in fixed.scales.iter().enumerate() {
        groups.entry(s.clone()).or_default().push(i);
    }
    let parts: Vec<Vec<usize>> = groups.values().cloned().collect();
    let (factors, lattice_index) = split_along(fan, &parts).map_err(Error::Hypothesis)?;
    for f in &factors {
        if !f.fan.is_simplicial() || !is_complete(&f.fan)? {
            return Err(Error::Hypothesis("factor fan is not complete and simplicial".into()));
        }
    }
    let mut warnings = Vec::new();
    if !lattice_index.is_one() {
        warnings.push(format!(
            "eigen-sublattices have index {lattice_index} in N: the splitting holds over Q but the variety is a finite quotient of the product"
        ));
    }
    Ok(Decomposition {
        stabilizing_power: m,
        factors: groups
            .into_keys()
            .zip(factors)
            .map(|(eigenvalue, factor)| EigenFactor { eigenvalue, factor })
            .collect(),
        lattice_index,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Simplicity {
    Simple,
    /// Two factors of a lattice-saturated product splitting.
    Decomposable(Vec<FactorFan>),
}

impl Simplicity {
    pub fn is_simple(&self) -> bool {
        matches!(self, Simplicity::Simple)
    }

    pub fn to_json(&self) -> Value {
        match self {
            Simplicity::Simple => json!({ "simple": true, "witness": null }),
            Simplicity::Decomposable(f) => json!({
                "simple": false,
                "witness": f.iter().map(FactorFan::to_json).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Exhaustive search over ray bipartitions `R1 ⊔ R2` (with ray 0 in `R1`),
/// in increasing bitmask order of `R1`. The first partition that splits the
/// fan as a product over a saturated direct sum of lattices is the witness.
pub fn is_simple(fan: &Fan) -> Result<Simplicity> {
    let d = fan.ray_count();
    if d > MAX_SIMPLICITY_RAYS {
        return Err(Error::Capacity(format!("{d} rays exceeds the simplicity search cap of {MAX_SIMPLICITY_RAYS}")));
    }
    let report = validate(fan);
    if !report.valid || !report.simplicial || !is_complete(fan)? {
        return Err(Error::Invalid("simplicity test needs a valid complete simplicial fan".into()));
    }
    if d == 0 {
        return Ok(Simplicity::Simple);
    }
    let cone_masks: Vec<u32> = fan.max_cones.iter().map(|c| c.iter().fold(0u32, |m, &r| m | 1 << r)).collect();
    let full: u32 = if d == 32 { u32::MAX } else { (1u32 << d) - 1 };
    for rest in 0u32..(1u32 << (d - 1)) {
        let r1 = 1 | rest << 1;
        let r2 = full & !r1;
        if r2 == 0 {
            continue;
        }
        // Each maximal cone of a product meets R1 in the same number of rays.
        let k = (cone_masks[0] & r1).count_ones();
        if cone_masks.iter().any(|m| (m & r1).count_ones() != k) || k == 0 || k as usize == fan.dim {
            continue;
        }
        let part = |mask: u32| (0..d).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>();
        if let Ok((factors, index)) = split_along(fan, &[part(r1), part(r2)]) {
            if index.is_one() {
                return Ok(Simplicity::Decomposable(factors));
            }
        }
    }
    Ok(Simplicity::Simple)
}

/// The endomorphism acting as `n1` on the first factor's sublattice and as
/// `n2` on the others, written in the source lattice basis.
pub fn nonpolarized_witness(fan: &Fan, factors: &[FactorFan], n1: i64, n2: i64) -> Result<LatticeEndo> {
    if factors.len() < 2 {
        return Err(Error::Invalid("a witness needs at least two factors".into()));
    }
    if n1 == n2 || n1 < 1 || n2 < 1 {
        return Err(Error::Invalid(format!("need distinct positive scalars, got {n1} and {n2}")));
    }
    let n = fan.dim;
    let cols: Vec<Vec<Rational>> = factors.iter().flat_map(|f| f.basis.iter().map(|b| to_rat_vec(b))).collect();
    if cols.len() != n {
        return Err(Error::Invalid("factor bases do not span the lattice".into()));
    }
    let b = RatMatrix::from_columns(&cols, n)?;
    let first = factors[0].basis.len();
    let d = RatMatrix::diagonal(&(0..n).map(|i| rat(if i < first { n1 } else { n2 })).collect::<Vec<_>>());
    let phi = b.mul(&d)?.mul(&b.inverse()?)?;
    let phi = phi
        .to_int()
        .map_err(|_| Error::Hypothesis("witness is not integral: factor sublattices do not split N".into()))?;
    let endo = LatticeEndo::new(phi, fan.clone())?;
    let rp = ray_permutation(&endo)?;
    let distinct: BTreeSet<&BigInt> = rp.scales.iter().collect();
    if distinct.len() < 2 {
        return Err(Error::Consistency("witness acts by a single scalar".into()));
    }
    Ok(endo)
}

/// Ray-fixing endomorphisms obtained by assigning each ray of one full-dimensional
/// cone a scale from `scales` and keeping the integral, fan-compatible results.
/// Returned with their per-ray scale factors, in enumeration order.
pub fn enumerate_ray_fixing(fan: &Fan, scales: &[i64]) -> Result<Vec<(LatticeEndo, Vec<BigInt>)>> {
    let n = fan.dim;
    let Some(base) = fan.max_cones.iter().find(|c| c.len() == n && fan.is_cone_simplicial(c)) else {
        return Ok(Vec::new());
    };
    let v = fan.cone_matrix(base);
    let v_inv = v.inverse()?;
    let mut out = Vec::new();
    let total = scales.len().pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let diag: Vec<Rational> = (0..n)
            .map(|_| {
                let s = scales[c % scales.len()];
                c /= scales.len();
                rat(s)
            })
            .collect();
        let phi = v.mul(&RatMatrix::diagonal(&diag))?.mul(&v_inv)?;
        let Ok(phi) = phi.to_int() else { continue };
        let Ok(endo) = LatticeEndo::new(phi, fan.clone()) else { continue };
        let Ok(rp) = ray_permutation(&endo) else { continue };
        if rp.is_identity() {
            out.push((endo, rp.scales));
        }
    }
    Ok(out)
}

/// Lattice automorphisms permuting the rays and preserving the fan.
/// Found by sending one full-dimensional cone onto every ordered choice of rays.
pub fn fan_automorphisms(fan: &Fan) -> Result<Vec<IntMatrix>> {
    let n = fan.dim;
    let Some(base) = fan.max_cones.iter().find(|c| c.len() == n && fan.is_cone_simplicial(c)) else {
        return Ok(vec![IntMatrix::identity(n)]);
    };
    let v_inv = fan.cone_matrix(base).inverse()?;
    let mut out = Vec::new();
    let mut choice = Vec::with_capacity(n);
    fn rec(fan: &Fan, v_inv: &RatMatrix, choice: &mut Vec<usize>, out: &mut Vec<IntMatrix>) -> Result<()> {
        let n = fan.dim;
        if choice.len() == n {
            let t = fan.cone_matrix(choice);
            let Ok(phi) = t.mul(v_inv)?.to_int() else { return Ok(()) };
            if !phi.is_unimodular() {
                return Ok(());
            }
            if let Ok(endo) = LatticeEndo::new(phi.clone(), fan.clone()) {
                if ray_permutation(&endo).is_ok() && !out.contains(&phi) {
                    out.push(phi);
                }
            }
            return Ok(());
        }
        for r in 0..fan.ray_count() {
            if !choice.contains(&r) {
                choice.push(r);
                rec(fan, v_inv, choice, out)?;
                choice.pop();
            }
        }
        Ok(())
    }
    rec(fan, &v_inv, &mut choice, &mut out)?;
    Ok(out)
}
