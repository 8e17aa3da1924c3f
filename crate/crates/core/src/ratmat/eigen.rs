use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::{RatMatrix, RatPoly};
use crate::error::Result;
use crate::rational::{display, to_f64, wire_vec, Rational};

/// Settings for the floating-point root moduli.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { tolerance: 1e-9, max_iterations: 200 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalEigenvalue {
    pub value: Rational,
    pub multiplicity: usize,
    pub eigenspace: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenReport {
    pub char_poly: RatPoly,
    /// Sorted by decreasing value.
    pub rational_eigenvalues: Vec<RationalEigenvalue>,
    pub has_irrational_part: bool,
    pub irrational_degree: usize,
    /// Moduli of the roots without a rational value, with multiplicity, descending.
    pub irrational_moduli: Vec<f64>,
    /// All complex eigenvalue moduli with multiplicity, descending.
    pub numeric_moduli: Vec<f64>,
    pub numeric_tolerance: f64,
    /// False when the companion-matrix iteration needed more than the configured cap.
    pub numeric_converged: bool,
}

impl EigenReport {
    pub fn dimension(&self) -> usize {
        self.char_poly.degree()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.numeric_moduli.first().copied().unwrap_or(0.0)
    }

    pub fn find(&self, value: &Rational) -> Option<&RationalEigenvalue> {
        self.rational_eigenvalues.iter().find(|e| &e.value == value)
    }

    pub fn values(&self) -> Vec<Rational> {
        self.rational_eigenvalues.iter().map(|e| e.value.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "char_poly": self.char_poly.pretty(),
            "rational_eigenvalues": self.rational_eigenvalues.iter().map(|e| json!({
                "value": display(&e.value),
                "multiplicity": e.multiplicity,
                "eigenspace": e.eigenspace.iter().map(|v| wire_vec(v)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "has_irrational_part": self.has_irrational_part,
            "irrational_degree": self.irrational_degree,
            "irrational_moduli": self.irrational_moduli,
            "numeric_moduli": self.numeric_moduli,
            "numeric_tolerance": self.numeric_tolerance,
            "numeric_converged": self.numeric_converged,
        })
    }
}

/// `det(xI - m)`, via reduction to Hessenberg form over the rationals.
pub fn char_poly(m: &RatMatrix) -> Result<RatPoly> {
    let n = m.require_square("characteristic polynomial")?;
    let mut h = m.clone();
    // Similarity reduction to upper Hessenberg form.
    for col in 0..n.saturating_sub(2) {
        let piv_row = col + 1;
        let Some(i) = (piv_row..n).find(|&i| !h[(i, col)].is_zero()) else {
            continue;
        };
        if i != piv_row {
            for j in 0..n {
                let (a, b) = (h[(i, j)].clone(), h[(piv_row, j)].clone());
                h[(i, j)] = b;
                h[(piv_row, j)] = a;
            }
            for r in 0..n {
                let (a, b) = (h[(r, i)].clone(), h[(r, piv_row)].clone());
                h[(r, i)] = b;
                h[(r, piv_row)] = a;
            }
        }
        let t = h[(piv_row, col)].clone();
        for i in piv_row + 1..n {
            if h[(i, col)].is_zero() {
                continue;
            }
            let u = &h[(i, col)] / &t;
            for j in 0..n {
                let v = &u * &h[(piv_row, j)];
                h[(i, j)] -= v;
            }
            for r in 0..n {
                let v = &u * &h[(r, i)];
                h[(r, piv_row)] += v;
            }
        }
    }
    // Recurrence on leading principal submatrices of the Hessenberg matrix.
    let mut p: Vec<RatPoly> = vec![RatPoly::one()];
    for k in 0..n {
        let mut pk = RatPoly::linear(&h[(k, k)]).mul(&p[k]);
        let mut t = Rational::from_integer(1.into());
        for i in 1..=k {
            t *= &h[(k - i + 1, k - i)];
            let c = &t * &h[(k - i, k)];
            if !c.is_zero() {
                pk = pk.sub(&p[k - i].scale(&c));
            }
        }
        p.push(pk);
    }
    Ok(p.pop().unwrap())
}

/// Complex roots of a polynomial as `(re, im)` pairs, from the eigenvalues of its
/// companion matrix. The flag is false if the iteration cap was hit.
pub(crate) fn numeric_roots(p: &RatPoly, cfg: NumericConfig) -> (Vec<(f64, f64)>, bool) {
    let d = p.degree();
    if d == 0 || p.is_zero() {
        return (Vec::new(), true);
    }
    let monic = p.monic();
    let c: Vec<f64> = monic.coeffs().iter().map(to_f64).collect();
    if d == 1 {
        return (vec![(-c[0], 0.0)], true);
    }
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        comp[(i, d - 1)] = -c[i];
    }
    let (schur, converged) =
        match nalgebra::linalg::Schur::try_new(comp.clone(), cfg.tolerance * 1e-3, cfg.max_iterations) {
            Some(s) => (s, true),
            None => (nalgebra::linalg::Schur::new(comp), false),
        };
    let roots = schur.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    (roots, converged)
}

pub fn rational_eigen(m: &RatMatrix, cfg: NumericConfig) -> Result<EigenReport> {
    let n = m.require_square("eigen decomposition")?;
    let cp = char_poly(m)?;
    let mut rational: Vec<RationalEigenvalue> = Vec::new();
    let mut moduli: Vec<f64> = Vec::new();
    let mut irrational_moduli: Vec<f64> = Vec::new();
    let mut irrational_degree = 0;
    let mut converged = true;
    for (factor, mult) in cp.squarefree_decomposition() {
        let roots = factor.rational_roots_squarefree(|q| numeric_roots(q, cfg).0);
        let mut residual = factor.clone();
        for r in &roots {
            residual = residual.div_rem(&RatPoly::linear(r)).0;
            moduli.extend(std::iter::repeat_n(to_f64(&r.abs()), mult));
            let eigenspace = m.shift(r)?.kernel();
            rational.push(RationalEigenvalue { value: r.clone(), multiplicity: mult, eigenspace });
        }
        if residual.degree() > 0 {
            irrational_degree += residual.degree() * mult;
            let (zs, ok) = numeric_roots(&residual, cfg);
            converged &= ok;
            for (re, im) in zs {
                irrational_moduli.extend(std::iter::repeat_n(re.hypot(im), mult));
            }
        }
    }
    rational.sort_by(|a, b| b.value.cmp(&a.value));
    irrational_moduli.sort_by(|a, b| b.total_cmp(a));
    moduli.extend_from_slice(&irrational_moduli);
    moduli.sort_by(|a, b| b.total_cmp(a));
    debug_assert_eq!(moduli.len(), n);
    Ok(EigenReport {
        char_poly: cp,
        rational_eigenvalues: rational,
        has_irrational_part: irrational_degree > 0,
        irrational_degree,
        irrational_moduli,
        numeric_moduli: moduli,
        numeric_tolerance: cfg.tolerance,
        numeric_converged: converged,
    })
}

pub fn spectral_radius(m: &RatMatrix, cfg: NumericConfig) -> Result<f64> {
    let n = m.require_square("spectral radius")?;
    if n == 0 {
        return Ok(0.0);
    }
    Ok(rational_eigen(m, cfg)?.spectral_radius())
}

/// True iff the rational eigenspaces span the whole space.
pub fn is_diagonalizable_rational(m: &RatMatrix) -> Result<bool> {
    let n = m.require_square("diagonalizability")?;
    let rep = rational_eigen(m, NumericConfig::default())?;
    if rep.has_irrational_part {
        return Ok(false);
    }
    Ok(rep.rational_eigenvalues.iter().map(|e| e.eigenspace.len()).sum::<usize>() == n)
}
