//! Torus-invariant divisors on simplicial toric varieties.
//!
//! A divisor `D = Σ a_ρ D_ρ` has Cartier data `m_σ` with `<m_σ, v_ρ> = -a_ρ`
//! for the rays of each maximal cone, and support function
//! `ψ_D(v) = <m_σ, v>` for `v ∈ σ`. Pullback under a compatible lattice map
//! `φ` is `a'_ρ = -ψ_D(φ(v_ρ))`. Classes are written in a section basis:
//! the rays left over after choosing a greedy rational basis of `N` among
//! the rays, so every class has a unique representative supported there.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fan::{is_complete, Fan};
use crate::heights::{alpha_estimate, AlphaConfig, AlphaEstimate, DynSystem, ProjPoint};
use crate::polyhedral::{extreme_rays, nonzero_point};
use crate::rational::{display, rat, to_f64, wire_vec, Rational};
use crate::ratmat::{dot, rational_eigen, smith_normal_form, EigenReport, NumericConfig, RatMatrix};
use crate::toric_endo::{eigen_fan_decomposition, is_simple, Decomposition, FactorFan, LatticeEndo, Simplicity};

pub const MAX_NEF_CONE_RANK: usize = 6;
pub const DEFAULT_REALIZABILITY_ITERATIONS: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TDivisor {
    pub coeffs: Vec<Rational>,
}

impl TDivisor {
    pub fn new(fan: &Fan, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != fan.ray_count() {
            return Err(Error::Shape(format!("{} coefficients for {} rays", coeffs.len(), fan.ray_count())));
        }
        Ok(TDivisor { coeffs })
    }

    pub fn from_i64(fan: &Fan, coeffs: &[i64]) -> Result<Self> {
        Self::new(fan, coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero(fan: &Fan) -> Self {
        TDivisor { coeffs: vec![Rational::zero(); fan.ray_count()] }
    }

    /// The prime divisor `D_i`.
    pub fn ray(fan: &Fan, i: usize) -> Self {
        let mut d = Self::zero(fan);
        d.coeffs[i] = Rational::one();
        d
    }

    /// `div(χ^m) = Σ <m, v_ρ> D_ρ`.
    pub fn principal(fan: &Fan, m: &[Rational]) -> Self {
        TDivisor { coeffs: (0..fan.ray_count()).map(|r| dot(m, &fan.ray_rat(r))).collect() }
    }

    pub fn to_json(&self) -> Value {
        json!(wire_vec(&self.coeffs))
    }
}

fn require_full_cones(fan: &Fan) -> Result<()> {
    for (i, c) in fan.max_cones.iter().enumerate() {
        if c.len() != fan.dim {
            return Err(Error::Invalid(format!("maximal cone {i} is not full-dimensional")));
        }
        if !fan.is_cone_simplicial(c) {
            return Err(Error::Singular(format!("maximal cone {i} {c:?} is not simplicial")));
        }
    }
    Ok(())
}

/// Per maximal cone, the inverse transpose of its generator matrix.
/// `m_σ = -(V_σ^T)^{-1} a_σ`.
struct CartierSolver {
    inv_t: Vec<RatMatrix>,
}

impl CartierSolver {
    fn new(fan: &Fan) -> Result<Self> {
        require_full_cones(fan)?;
        let inv_t =
            fan.max_cones.iter().map(|c| fan.cone_matrix(c).transpose().inverse()).collect::<Result<Vec<_>>>()?;
        Ok(CartierSolver { inv_t })
    }

    fn solve(&self, fan: &Fan, d: &TDivisor) -> Vec<Vec<Rational>> {
        fan.max_cones
            .iter()
            .zip(&self.inv_t)
            .map(|(c, inv)| {
                let a: Vec<Rational> = c.iter().map(|&r| -&d.coeffs[r]).collect();
                inv.mul_vec(&a).expect("square cone matrix")
            })
            .collect()
    }
}

/// `m_σ` for every maximal cone, in storage order.
pub fn cartier_data(fan: &Fan, d: &TDivisor) -> Result<Vec<Vec<Rational>>> {
    check_len(fan, d)?;
    Ok(CartierSolver::new(fan)?.solve(fan, d))
}

fn check_len(fan: &Fan, d: &TDivisor) -> Result<()> {
    if d.coeffs.len() != fan.ray_count() {
        return Err(Error::Shape(format!(
            "divisor has {} coefficients, fan has {} rays",
            d.coeffs.len(),
            fan.ray_count()
        )));
    }
    Ok(())
}

fn support_value_with(fan: &Fan, data: &[Vec<Rational>], v: &[Rational]) -> Result<Rational> {
    let mut value: Option<Rational> = None;
    for (c, m) in fan.max_cones.iter().zip(data) {
        if fan.cone_coordinates(c, v).is_some() {
            let here = dot(m, v);
            match &value {
                None => value = Some(here),
                Some(prev) if *prev != here => {
                    return Err(Error::Consistency(format!(
                        "support function disagrees on overlapping cones at {:?}",
                        v.iter().map(display).collect::<Vec<_>>()
                    )))
                }
                _ => {}
            }
        }
    }
    value.ok_or_else(|| Error::Invalid("vector lies outside the support of the fan".into()))
}

/// `ψ_D(v)`, checked for agreement across every maximal cone containing `v`.
pub fn support_value(fan: &Fan, d: &TDivisor, v: &[Rational]) -> Result<Rational> {
    if v.len() != fan.dim {
        return Err(Error::Shape(format!("vector of length {} in a rank-{} lattice", v.len(), fan.dim)));
    }
    let data = cartier_data(fan, d)?;
    support_value_with(fan, &data, v)
}

/// `φ^* D` with coefficients `-ψ_D(φ(v_ρ))`.
pub fn pullback_divisor(endo: &LatticeEndo, d: &TDivisor) -> Result<TDivisor> {
    let fan = &endo.fan;
    let data = cartier_data(fan, d)?;
    let coeffs = (0..fan.ray_count())
        .map(|r| Ok(-support_value_with(fan, &data, &endo.image_rat(&fan.ray_rat(r)))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(TDivisor { coeffs })
}

/// `Cl(X) = Z^rays / M` with a rational section basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassGroup {
    pub rank: usize,
    /// Invariant factors greater than 1 of the presentation.
    pub torsion: Vec<BigInt>,
    /// Rays forming a rational basis of `N`; classes are reduced to vanish on them.
    pub basis_rays: Vec<usize>,
    /// Rays whose prime divisors give the class coordinates.
    pub section: Vec<usize>,
    basis_inv_t: RatMatrix,
    rays: Vec<Vec<Rational>>,
}

impl ClassGroup {
    /// Coordinates of the class of `d` in the section basis.
    pub fn reduce(&self, d: &TDivisor) -> Result<Vec<Rational>> {
        if d.coeffs.len() != self.rays.len() {
            return Err(Error::Shape("divisor length does not match the fan".into()));
        }
        let a: Vec<Rational> = self.basis_rays.iter().map(|&r| -&d.coeffs[r]).collect();
        let m = self.basis_inv_t.mul_vec(&a)?;
        Ok(self.section.iter().map(|&r| &d.coeffs[r] + dot(&m, &self.rays[r])).collect())
    }

    /// The representative supported on the section rays.
    pub fn lift(&self, coords: &[Rational]) -> Result<TDivisor> {
        if coords.len() != self.rank {
            return Err(Error::Shape(format!("{} class coordinates for rank {}", coords.len(), self.rank)));
        }
        let mut c = vec![Rational::zero(); self.rays.len()];
        for (&r, x) in self.section.iter().zip(coords) {
            c[r] = x.clone();
        }
        Ok(TDivisor { coeffs: c })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank,
            "torsion": self.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "basis_rays": self.basis_rays,
            "section": self.section,
            "section_labels": self.section.iter().map(|r| format!("D{r}")).collect::<Vec<_>>(),
        })
    }
}

pub fn class_group(fan: &Fan) -> Result<ClassGroup> {
    let n = fan.dim;
    let p = fan.ray_matrix();
    let snf = smith_normal_form(&p);
    let factors = snf.invariant_factors();
    if factors.len() != n {
        return Err(Error::Invalid(format!("rays span a rank-{} sublattice of a rank-{n} lattice", factors.len())));
    }
    let mut basis_rays: Vec<usize> = Vec::new();
    for r in 0..fan.ray_count() {
        let mut rows: Vec<Vec<Rational>> = basis_rays.iter().map(|&b| fan.ray_rat(b)).collect();
        rows.push(fan.ray_rat(r));
        if RatMatrix::from_rows(rows)?.rank() == basis_rays.len() + 1 {
            basis_rays.push(r);
            if basis_rays.len() == n {
                break;
            }
        }
    }
    let section: Vec<usize> = (0..fan.ray_count()).filter(|r| !basis_rays.contains(r)).collect();
    let basis_inv_t = fan.cone_matrix(&basis_rays).transpose().inverse()?;
    Ok(ClassGroup {
        rank: fan.ray_count() - n,
        torsion: factors.into_iter().filter(|f| !f.is_one()).collect(),
        basis_rays,
        section,
        basis_inv_t,
        rays: (0..fan.ray_count()).map(|r| fan.ray_rat(r)).collect(),
    })
}

/// `(σ, ρ)` with `<m_σ, v_ρ> < -a_ρ`, the first violated convexity inequality.
pub fn nef_violation(fan: &Fan, d: &TDivisor) -> Result<Option<(usize, usize)>> {
    let data = cartier_data(fan, d)?;
    for (s, (c, m)) in fan.max_cones.iter().zip(&data).enumerate() {
        for r in 0..fan.ray_count() {
            if !c.contains(&r) && dot(m, &fan.ray_rat(r)) < -&d.coeffs[r] {
                return Ok(Some((s, r)));
            }
        }
    }
    Ok(None)
}

pub fn is_nef(fan: &Fan, d: &TDivisor) -> Result<bool> {
    Ok(nef_violation(fan, d)?.is_none())
}

/// The nef inequalities as rows acting on section coordinates.
pub fn nef_inequalities(fan: &Fan, cg: &ClassGroup) -> Result<Vec<Vec<Rational>>> {
    let solver = CartierSolver::new(fan)?;
    // Column k: the values <m_σ, v_ρ> + a_ρ for the k-th unit class.
    let columns: Vec<Vec<Rational>> = (0..cg.rank)
        .map(|k| {
            let mut e = vec![Rational::zero(); cg.rank];
            e[k] = Rational::one();
            let d = cg.lift(&e)?;
            let data = solver.solve(fan, &d);
            let mut vals = Vec::new();
            for (c, m) in fan.max_cones.iter().zip(&data) {
                for r in 0..fan.ray_count() {
                    if !c.contains(&r) {
                        vals.push(dot(m, &fan.ray_rat(r)) + &d.coeffs[r]);
                    }
                }
            }
            Ok(vals)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = columns.first().map_or(0, Vec::len);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for i in 0..rows {
        let row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
        if row.iter().any(|x| !x.is_zero()) && seen.insert(row.clone()) {
            out.push(row);
        }
    }
    Ok(out)
}

/// Extreme rays of the nef cone in section coordinates, primitive and sorted.
pub fn nef_cone_rays(fan: &Fan) -> Result<Vec<Vec<Rational>>> {
    let cg = class_group(fan)?;
    if cg.rank > MAX_NEF_CONE_RANK {
        return Err(Error::Capacity(format!(
            "Picard rank {} exceeds the nef-cone cap of {MAX_NEF_CONE_RANK}",
            cg.rank
        )));
    }
    extreme_rays(&nef_inequalities(fan, &cg)?, cg.rank)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NefStatus {
    /// A nonzero nef class in the eigenspace, in section coordinates.
    Feasible(Vec<Rational>),
    Infeasible,
    /// Irrational eigenvalue: the eigenspace is not defined over the rationals.
    Unsupported,
}

impl NefStatus {
    pub fn is_feasible(&self) -> bool {
        matches!(self, NefStatus::Feasible(_))
    }

    pub fn to_json(&self) -> Value {
        match self {
            NefStatus::Feasible(w) => json!({ "status": "yes", "witness": wire_vec(w) }),
            NefStatus::Infeasible => json!({ "status": "no" }),
            NefStatus::Unsupported => json!({ "status": "unsupported" }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PullbackAction {
    pub class_group: ClassGroup,
    /// Matrix of `D -> φ^* D` on section coordinates (columns are images).
    pub matrix: RatMatrix,
    pub eigen: EigenReport,
    /// One entry per rational eigenvalue with `|λ| > 1`, in eigen-report order.
    pub nef_flags: Vec<(Rational, NefStatus)>,
    pub warnings: Vec<String>,
}

impl PullbackAction {
    pub fn to_json(&self) -> Value {
        json!({
            "class_group": self.class_group.to_json(),
            "matrix": self.matrix.display_rows(),
            "eigen": self.eigen.to_json(),
            "nef_eigendivisors": self.nef_flags.iter().map(|(l, s)| {
                let mut v = s.to_json();
                v["eigenvalue"] = json!(display(l));
                v
            }).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }
}

fn nef_status(rows: &[Vec<Rational>], eigenspace: &[Vec<Rational>]) -> Result<NefStatus> {
    let k = eigenspace.len();
    let restricted: Vec<Vec<Rational>> = rows.iter().map(|l| eigenspace.iter().map(|e| dot(l, e)).collect()).collect();
    Ok(match nonzero_point(&restricted, k)? {
        Some(t) => {
            let dim = eigenspace[0].len();
            let class: Vec<Rational> =
                (0..dim).map(|i| eigenspace.iter().zip(&t).map(|(e, c)| &e[i] * c).sum()).collect();
            let scaled = crate::rational::primitive_direction(&class);
            NefStatus::Feasible(scaled.into_iter().map(Rational::from_integer).collect())
        }
        None => NefStatus::Infeasible,
    })
}

fn analyze(fan: &Fan, cg: ClassGroup, matrix: RatMatrix, warnings: Vec<String>) -> Result<PullbackAction> {
    let eigen = rational_eigen(&matrix, NumericConfig::default())?;
    let rows = nef_inequalities(fan, &cg)?;
    let mut nef_flags = Vec::new();
    for e in &eigen.rational_eigenvalues {
        if e.value.abs() > Rational::one() {
            nef_flags.push((e.value.clone(), nef_status(&rows, &e.eigenspace)?));
        }
    }
    Ok(PullbackAction { class_group: cg, matrix, eigen, nef_flags, warnings })
}

/// `φ^*` on the class group, checked to kill principal divisors.
pub fn pullback_matrix(endo: &LatticeEndo) -> Result<PullbackAction> {
    let fan = &endo.fan;
    let cg = class_group(fan)?;
    for i in 0..fan.dim {
        let mut m = vec![Rational::zero(); fan.dim];
        m[i] = Rational::one();
        let pulled = pullback_divisor(endo, &TDivisor::principal(fan, &m))?;
        if cg.reduce(&pulled)?.iter().any(|x| !x.is_zero()) {
            return Err(Error::Consistency("pullback does not preserve principal divisors".into()));
        }
    }
    let columns = cg
        .section
        .iter()
        .map(|&s| cg.reduce(&pullback_divisor(endo, &TDivisor::ray(fan, s))?))
        .collect::<Result<Vec<_>>>()?;
    let matrix = RatMatrix::from_columns(&columns, cg.rank)?;
    let mut warnings = Vec::new();
    if !matrix.is_integral() {
        warnings.push("pullback matrix has non-integral entries in the section basis".to_string());
    }
    analyze(fan, cg, matrix, warnings)
}

/// Analyses a user-supplied linear action on the class group of `fan`.
pub fn pullback_action_from_matrix(fan: &Fan, matrix: RatMatrix) -> Result<PullbackAction> {
    let cg = class_group(fan)?;
    if matrix.rows() != cg.rank || matrix.cols() != cg.rank {
        return Err(Error::Shape(format!(
            "{}x{} action on a class group of rank {}",
            matrix.rows(),
            matrix.cols(),
            cg.rank
        )));
    }
    if cg.rank > 0 && matrix.det()?.is_zero() {
        return Err(Error::Singular("class-group action of a surjective morphism is invertible".into()));
    }
    let mut warnings = vec!["action supplied as a matrix; not derived from a lattice map".to_string()];
    if !matrix.is_integral() {
        warnings.push("action has non-integral entries in the section basis".to_string());
    }
    analyze(fan, cg, matrix, warnings)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialDegree {
    pub modulus: f64,
    /// The exact eigenvalue when rational.
    pub value: Option<Rational>,
    pub multiplicity: usize,
    pub nef: NefStatus,
}

impl PotentialDegree {
    pub fn to_json(&self) -> Value {
        json!({
            "modulus": self.modulus,
            "value": self.value.as_ref().map(display),
            "rational": self.value.is_some(),
            "multiplicity": self.multiplicity,
            "nef_eigendivisor": self.nef.to_json(),
        })
    }
}

/// Eigenvalue moduli greater than 1, descending; irrational moduli are
/// grouped within the numeric tolerance.
pub fn potential_arithmetic_degrees(action: &PullbackAction) -> Vec<PotentialDegree> {
    let eigen = &action.eigen;
    let mut out: Vec<PotentialDegree> = eigen
        .rational_eigenvalues
        .iter()
        .filter(|e| e.value.abs() > Rational::one())
        .map(|e| PotentialDegree {
            modulus: to_f64(&e.value.abs()),
            value: Some(e.value.clone()),
            multiplicity: e.multiplicity,
            nef: action
                .nef_flags
                .iter()
                .find(|(l, _)| *l == e.value)
                .map(|(_, s)| s.clone())
                .unwrap_or(NefStatus::Infeasible),
        })
        .collect();
    let tol = eigen.numeric_tolerance.sqrt();
    for &m in &eigen.irrational_moduli {
        if m <= 1.0 + tol {
            continue;
        }
        match out.iter_mut().find(|p| p.value.is_none() && (p.modulus - m).abs() <= tol * m.max(1.0)) {
            Some(p) => p.multiplicity += 1,
            None => out.push(PotentialDegree { modulus: m, value: None, multiplicity: 1, nef: NefStatus::Unsupported }),
        }
    }
    out.sort_by(|a, b| b.modulus.total_cmp(&a.modulus).then_with(|| b.value.cmp(&a.value)));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizabilityWitness {
    pub eigenvalue: BigInt,
    /// `2` on the torus coordinates of this factor, `1` elsewhere, in the factor bases.
    pub torus_point: Vec<i64>,
    /// Homogeneous coordinates on the product of projective spaces, when the fan is one.
    pub projective_point: Option<ProjPoint>,
    pub estimate: Option<AlphaEstimate>,
    pub verified: Option<bool>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizabilityReport {
    pub decomposition: Decomposition,
    pub witnesses: Vec<RealizabilityWitness>,
    /// `(dim, degree)` per projective factor, when the fan is a product of projective-space fans.
    pub projective_factors: Option<Vec<(usize, u64)>>,
    pub iterations: usize,
    pub tolerance: f64,
}

impl RealizabilityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "decomposition": self.decomposition.to_json(),
            "projective_factors": self.projective_factors,
            "iterations": self.iterations,
            "tolerance": self.tolerance,
            "witnesses": self.witnesses.iter().map(|w| json!({
                "eigenvalue": w.eigenvalue.to_string(),
                "torus_point": w.torus_point,
                "projective_point": w.projective_point.as_ref().map(|p| p.to_string()),
                "alpha_estimate": w.estimate.as_ref().map(|e| e.estimate),
                "estimate": w.estimate.as_ref().map(AlphaEstimate::to_json),
                "verified": w.verified,
                "note": w.note,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Is this (sub)fan the standard fan of `P^k` up to lattice isomorphism?
fn is_projective_space(f: &Fan) -> bool {
    let k = f.dim;
    if k == 0 || f.ray_count() != k + 1 || f.max_cones.len() != k + 1 {
        return false;
    }
    let sums_to_zero = (0..k).all(|i| f.rays.iter().map(|r| r[i]).sum::<i64>() == 0);
    let cones: BTreeSet<Vec<usize>> = f
        .max_cones
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        })
        .collect();
    let all_facets = cones.len() == k + 1 && cones.iter().all(|c| c.len() == k);
    let first: Vec<usize> = (0..k).collect();
    let unimodular = f.cone_matrix(&first).det().is_ok_and(|d| d.abs().is_one());
    sums_to_zero && all_facets && unimodular
}

/// Splits a factor fan into simple pieces.
fn simple_pieces(f: &FactorFan) -> Result<Vec<Fan>> {
    let mut stack = vec![f.fan.clone()];
    let mut out = Vec::new();
    while let Some(g) = stack.pop() {
        match is_simple(&g)? {
            Simplicity::Simple => out.push(g),
            Simplicity::Decomposable(parts) => {
                for p in parts.into_iter().rev() {
                    stack.push(p.fan);
                }
            }
        }
    }
    Ok(out)
}

/// Witness points for each eigenvalue of the ray-fixing iterate.
///
/// On a product of projective-space fans the witnesses are checked by
/// iterating the corresponding coordinatewise power map.
pub fn realizability_report_equivariant(
    endo: &LatticeEndo,
    iterations: usize,
    cfg: AlphaConfig,
) -> Result<RealizabilityReport> {
    if !endo.fan.is_simplicial() || !is_complete(&endo.fan)? {
        return Err(Error::Invalid("realizability needs a complete simplicial fan".into()));
    }
    let decomposition = eigen_fan_decomposition(endo)?;
    let mut pieces: Vec<(usize, usize, u64)> = Vec::new(); // (factor, dim, degree)
    let mut projective = decomposition.lattice_index.is_one();
    for (i, f) in decomposition.factors.iter().enumerate() {
        let deg = u64::try_from(&f.eigenvalue).map_err(|_| Error::Capacity("eigenvalue too large".into()))?;
        for piece in simple_pieces(&f.factor)? {
            projective &= is_projective_space(&piece);
            pieces.push((i, piece.dim, deg));
        }
    }
    let projective_factors: Option<Vec<(usize, u64)>> =
        projective.then(|| pieces.iter().map(|&(_, d, g)| (d, g)).collect());
    let system = match &projective_factors {
        Some(spec) => Some(DynSystem::powers(spec)?),
        None => None,
    };
    let tolerance = 1e-3;
    let mut witnesses = Vec::new();
    for (i, f) in decomposition.factors.iter().enumerate() {
        if f.eigenvalue <= BigInt::one() {
            continue;
        }
        let torus_point: Vec<i64> = decomposition
            .factors
            .iter()
            .enumerate()
            .flat_map(|(j, g)| std::iter::repeat_n(if i == j { 2 } else { 1 }, g.factor.basis.len()))
            .collect();
        let (projective_point, estimate, verified, note) = match &system {
            Some(sys) => {
                let coords: Vec<Vec<BigInt>> = pieces
                    .iter()
                    .map(|&(owner, dim, _)| {
                        let t = if owner == i { 2 } else { 1 };
                        let mut v = vec![BigInt::from(t); dim];
                        v.push(BigInt::one());
                        v
                    })
                    .collect();
                let p = ProjPoint::new(coords)?;
                let est = alpha_estimate(sys, &p, iterations, cfg)?;
                let target = to_f64(&Rational::from_integer(f.eigenvalue.clone()));
                let ok = (est.estimate - target).abs() <= tolerance;
                (Some(p), Some(est), Some(ok), "verified by iterating the product of power maps".to_string())
            }
            None => (None, None, None, "symbolic: torus point with coordinate 2 on this eigen-factor".to_string()),
        };
        witnesses.push(RealizabilityWitness {
            eigenvalue: f.eigenvalue.clone(),
            torus_point,
            projective_point,
            estimate,
            verified,
            note,
        });
    }
    Ok(RealizabilityReport { decomposition, witnesses, projective_factors, iterations, tolerance })
}
