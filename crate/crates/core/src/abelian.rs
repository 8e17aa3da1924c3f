//! Abelian surfaces with `End(A) ⊗ Q = M_2(Q)` and Rosati involution the transpose.
//!
//! Néron–Severi classes are the symmetric matrices, written in the basis
//! `(E11, E22, E12 + E21)`. An isogeny `f` acts by `θ_f(α) = fᵀ α f`. A class is
//! nef iff it is positive semidefinite and ample iff positive definite.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{display, rat, to_f64, wire_vec, Rational};
use crate::ratmat::{rational_eigen, EigenReport, NumericConfig, RatMatrix};

pub const SUPPORTED_ALGEBRA: &str = "m2q";

/// Rejects endomorphism algebras other than `M_2(Q)`.
pub fn require_supported_algebra(name: &str) -> Result<()> {
    if name.eq_ignore_ascii_case(SUPPORTED_ALGEBRA) || name.eq_ignore_ascii_case("M2(Q)") {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "endomorphism algebra {name:?}: only M2(Q) with transpose as Rosati involution is modelled \
             (the other types of the classification of endomorphism algebras are out of scope)"
        )))
    }
}

/// A symmetric 2x2 class `[[p, r], [r, q]]`, stored as `(p, q, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymClass {
    pub p: Rational,
    pub q: Rational,
    pub r: Rational,
}

impl SymClass {
    pub fn new(p: Rational, q: Rational, r: Rational) -> Self {
        SymClass { p, q, r }
    }

    pub fn from_i64(p: i64, q: i64, r: i64) -> Self {
        SymClass::new(rat(p), rat(q), rat(r))
    }

    pub fn from_matrix(m: &RatMatrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::Shape("symmetric class must be 2x2".into()));
        }
        if m[(0, 1)] != m[(1, 0)] {
            return Err(Error::Invalid("class is not symmetric".into()));
        }
        Ok(SymClass::new(m[(0, 0)].clone(), m[(1, 1)].clone(), m[(0, 1)].clone()))
    }

    pub fn from_coords(c: &[Rational]) -> Result<Self> {
        match c {
            [p, q, r] => Ok(SymClass::new(p.clone(), q.clone(), r.clone())),
            _ => Err(Error::Shape("symmetric class needs 3 coordinates".into())),
        }
    }

    pub fn coords(&self) -> Vec<Rational> {
        vec![self.p.clone(), self.q.clone(), self.r.clone()]
    }

    pub fn matrix(&self) -> RatMatrix {
        RatMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => self.p.clone(),
            (1, 1) => self.q.clone(),
            _ => self.r.clone(),
        })
    }

    pub fn det(&self) -> Rational {
        &self.p * &self.q - &self.r * &self.r
    }

    pub fn trace(&self) -> Rational {
        &self.p + &self.q
    }

    pub fn neg(&self) -> Self {
        SymClass::new(-&self.p, -&self.q, -&self.r)
    }

    pub fn add(&self, o: &SymClass) -> Self {
        SymClass::new(&self.p + &o.p, &self.q + &o.q, &self.r + &o.r)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SymClass::new(&self.p * c, &self.q * c, &self.r * c)
    }

    /// A readable name in the basis `E11, E22, E12+E21` when the class is a basis vector.
    pub fn label(&self) -> String {
        let names = ["E11", "E22", "E12+E21"];
        let terms: Vec<String> = self
            .coords()
            .iter()
            .zip(names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, n)| if c.is_one() { n.to_string() } else { format!("{}*({n})", display(c)) })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "coords": wire_vec(&self.coords()), "label": self.label() })
    }
}

/// Positive semidefinite: `det >= 0` and `tr >= 0`.
pub fn is_nef_class(a: &SymClass) -> bool {
    !a.det().is_negative() && !a.trace().is_negative()
}

/// Positive definite: `det > 0` and `tr > 0`.
pub fn is_ample_class(a: &SymClass) -> bool {
    a.det().is_positive() && a.trace().is_positive()
}

fn require_isogeny(f: &RatMatrix) -> Result<()> {
    if f.rows() != 2 || f.cols() != 2 {
        return Err(Error::Shape(format!("endomorphism must be 2x2, got {}x{}", f.rows(), f.cols())));
    }
    if f.det()?.is_zero() {
        return Err(Error::Singular("endomorphism is not an isogeny (det = 0)".into()));
    }
    Ok(())
}

/// `fᵀ α f`.
pub fn theta_apply(f: &RatMatrix, a: &SymClass) -> Result<SymClass> {
    SymClass::from_matrix(&f.transpose().mul(&a.matrix())?.mul(f)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenClassFlags {
    pub value: Rational,
    pub eigenvectors: Vec<SymClass>,
    /// Some nonzero class in the eigenspace is nef.
    pub nef_eigendivisor: bool,
    /// Some class in the eigenspace is ample.
    pub ample_eigendivisor: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaAction {
    pub f: RatMatrix,
    /// Columns are `θ_f(E11), θ_f(E22), θ_f(E12 + E21)`.
    pub matrix: RatMatrix,
    pub eigen: EigenReport,
    pub flags: Vec<EigenClassFlags>,
}

impl ThetaAction {
    pub fn to_json(&self) -> Value {
        json!({
            "f": self.f.display_rows(),
            "basis": ["E11", "E22", "E12+E21"],
            "matrix": self.matrix.display_rows(),
            "eigen": self.eigen.to_json(),
            "eigenclasses": self.flags.iter().map(|e| json!({
                "eigenvalue": display(&e.value),
                "eigenvectors": e.eigenvectors.iter().map(SymClass::to_json).collect::<Vec<_>>(),
                "nef": e.nef_eigendivisor,
                "ample": e.ample_eigendivisor,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Bilinear form of `det` on `(p, q, r)` coordinates: `(x_p y_q + x_q y_p) / 2 - x_r y_r`.
fn det_form(x: &SymClass, y: &SymClass) -> Rational {
    (&x.p * &y.q + &x.q * &y.p) / rat(2) - &x.r * &y.r
}

/// Does the span of `basis` contain a nonzero nef class, and an ample one?
fn eigenspace_flags(basis: &[SymClass]) -> (bool, bool) {
    match basis {
        [] => (false, false),
        [v] => (is_nef_class(v) || is_nef_class(&v.neg()), is_ample_class(v) || is_ample_class(&v.neg())),
        [u, w] => {
            // det restricted to the plane; nef classes exist unless it is negative definite,
            // ample ones iff it takes a positive value.
            let (a, b, c) = (det_form(u, u), det_form(u, w), det_form(w, w));
            let disc = &a * &c - &b * &b;
            let neg_def = a.is_negative() && disc.is_positive();
            let pos_somewhere = a.is_positive() || c.is_positive() || disc.is_negative();
            (!neg_def, pos_somewhere)
        }
        _ => (true, true),
    }
}

pub fn theta_matrix(f: &RatMatrix) -> Result<ThetaAction> {
    require_isogeny(f)?;
    let basis = [SymClass::from_i64(1, 0, 0), SymClass::from_i64(0, 1, 0), SymClass::from_i64(0, 0, 1)];
    let cols = basis.iter().map(|e| Ok(theta_apply(f, e)?.coords())).collect::<Result<Vec<_>>>()?;
    let matrix = RatMatrix::from_columns(&cols, 3)?;
    let eigen = rational_eigen(&matrix, NumericConfig::default())?;
    let flags = eigen
        .rational_eigenvalues
        .iter()
        .map(|e| {
            let eigenvectors = e.eigenspace.iter().map(|v| SymClass::from_coords(v)).collect::<Result<Vec<_>>>()?;
            let (nef, ample) = eigenspace_flags(&eigenvectors);
            Ok(EigenClassFlags {
                value: e.value.clone(),
                eigenvectors,
                nef_eigendivisor: nef,
                ample_eigendivisor: ample,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThetaAction { f: f.clone(), matrix, eigen, flags })
}

pub const CITE_SIMPLE_DICHOTOMY: &str = "simple-abelian-dichotomy";
pub const CITE_NEF_PSD: &str = "abelian-nef-is-psd";
pub const CITE_PULLBACK_FORMULA: &str = "rosati-pullback-formula";
pub const CITE_COUNTEREXAMPLE: &str = "diagonal-isogeny-counterexample";

#[derive(Clone, Debug, PartialEq)]
pub struct RealizabilityLabel {
    pub value: String,
    pub status: &'static str,
    pub justification: String,
    pub citations: Vec<&'static str>,
}

impl RealizabilityLabel {
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value,
            "status": self.status,
            "justification": self.justification,
            "citations": self.citations,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleReport {
    pub a: i64,
    pub b: i64,
    pub theta: ThetaAction,
    /// `a^2, ab, b^2` with their eigendivisors.
    pub eigenvalues: Vec<(BigInt, SymClass, bool)>,
    pub realizable: Vec<BigInt>,
    pub non_realizable: Vec<BigInt>,
    pub labels: Vec<RealizabilityLabel>,
    pub notes: Vec<String>,
}

impl CounterexampleReport {
    pub fn to_json(&self) -> Value {
        json!({
            "a": self.a,
            "b": self.b,
            "theta": self.theta.to_json(),
            "eigenvalues": self.eigenvalues.iter().map(|(l, c, nef)| json!({
                "value": l.to_string(),
                "eigendivisor": c.to_json(),
                "nef": nef,
            })).collect::<Vec<_>>(),
            "realizable": self.realizable.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "non_realizable": self.non_realizable.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "labels": self.labels.iter().map(RealizabilityLabel::to_json).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

/// The isogeny `diag(a, b)` on a simple abelian surface with `End ⊗ Q = M_2(Q)`.
///
/// `θ` has eigenvalues `a^2 > ab > b^2` with eigendivisors `E11`, `E12+E21`,
/// `E22`; only `a^2` (and 1, for torsion points) occurs as an arithmetic degree.
pub fn counterexample_report(a: i64, b: i64) -> Result<CounterexampleReport> {
    if !(a > b && b >= 1) {
        return Err(Error::Invalid(format!("need a > b >= 1, got a = {a}, b = {b}")));
    }
    let f = RatMatrix::diagonal(&[rat(a), rat(b)]);
    let theta = theta_matrix(&f)?;
    let classes = [
        (BigInt::from(a * a), SymClass::from_i64(1, 0, 0)),
        (BigInt::from(a * b), SymClass::from_i64(0, 0, 1)),
        (BigInt::from(b * b), SymClass::from_i64(0, 1, 0)),
    ];
    for (l, c) in &classes {
        if theta_apply(&f, c)? != c.scale(&Rational::from_integer(l.clone())) {
            return Err(Error::Consistency(format!("{} is not an eigenclass for {l}", c.label())));
        }
    }
    let eigenvalues: Vec<(BigInt, SymClass, bool)> =
        classes.iter().map(|(l, c)| (l.clone(), c.clone(), is_nef_class(c))).collect();
    let one = BigInt::one();
    let realizable = vec![BigInt::from(a * a), one.clone()];
    let mut non_realizable = vec![BigInt::from(a * b)];
    if b > 1 {
        non_realizable.push(BigInt::from(b * b));
    }
    let hyp = "A simple abelian surface with End(A) ⊗ Q = M2(Q)";
    let mut labels = vec![
        RealizabilityLabel {
            value: (a * a).to_string(),
            status: "realizable",
            justification: format!("{hyp}: every non-torsion point has arithmetic degree a^2 = {}", a * a),
            citations: vec![CITE_COUNTEREXAMPLE, CITE_SIMPLE_DICHOTOMY],
        },
        RealizabilityLabel {
            value: "1".into(),
            status: "realizable",
            justification: "torsion points are pre-periodic and have arithmetic degree 1".into(),
            citations: vec![CITE_COUNTEREXAMPLE],
        },
        RealizabilityLabel {
            value: (a * b).to_string(),
            status: "non-realizable",
            justification: format!(
                "{hyp}: eigenvalue ab = {} has no nef eigendivisor (E12+E21 has det -1) and A has no proper abelian subvariety to carry it",
                a * b
            ),
            citations: vec![CITE_COUNTEREXAMPLE, CITE_SIMPLE_DICHOTOMY, CITE_NEF_PSD],
        },
    ];
    if b > 1 {
        labels.push(RealizabilityLabel {
            value: (b * b).to_string(),
            status: "non-realizable",
            justification: format!(
                "{hyp}: b^2 = {} has a nef eigendivisor E22, but orbits are either pre-periodic or dense, so no point realizes it",
                b * b
            ),
            citations: vec![CITE_COUNTEREXAMPLE, CITE_SIMPLE_DICHOTOMY],
        });
    }
    Ok(CounterexampleReport {
        a,
        b,
        theta,
        eigenvalues,
        realizable,
        non_realizable,
        labels,
        notes: vec![
            "the construction is stated with integer parameters; only a and b enter the isogeny".into(),
            "labels assume A is simple; without that hypothesis the eigenvalues are potential arithmetic degrees only"
                .into(),
        ],
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsogenyReport {
    pub theta: ThetaAction,
    pub dynamical_degree: f64,
    /// Exact value of the dynamical degree when it is a rational eigenvalue.
    pub dynamical_degree_exact: Option<Rational>,
    pub simple_hypothesis: bool,
    pub labels: Vec<RealizabilityLabel>,
}

impl IsogenyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "theta": self.theta.to_json(),
            "dynamical_degree": self.dynamical_degree,
            "dynamical_degree_exact": self.dynamical_degree_exact.as_ref().map(display),
            "simple_hypothesis": self.simple_hypothesis,
            "labels": self.labels.iter().map(RealizabilityLabel::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Eigen-structure of `θ_f` for an integral isogeny, with realizability labels
/// that are definite only under the simplicity hypothesis.
pub fn general_isogeny_report(f: &RatMatrix, simple_hypothesis: bool) -> Result<IsogenyReport> {
    require_isogeny(f)?;
    if !f.is_integral() {
        return Err(Error::Invalid("an endomorphism of A has integer entries in this model".into()));
    }
    let theta = theta_matrix(f)?;
    let lambda1 = theta.eigen.spectral_radius();
    let tol = 1e-9 * lambda1.max(1.0);
    let exact = theta
        .eigen
        .rational_eigenvalues
        .iter()
        .map(|e| e.value.abs())
        .max()
        .filter(|m| (to_f64(m) - lambda1).abs() <= tol);
    let mut moduli: Vec<(String, f64)> = Vec::new();
    for e in &theta.eigen.rational_eigenvalues {
        let m = e.value.abs();
        let s = display(&m);
        if !moduli.iter().any(|(t, _)| *t == s) {
            moduli.push((s, to_f64(&m)));
        }
    }
    for &m in &theta.eigen.irrational_moduli {
        if !moduli.iter().any(|(_, x)| (x - m).abs() <= 1e-6 * m.max(1.0)) {
            moduli.push((format!("{m:.12}"), m));
        }
    }
    moduli.sort_by(|a, b| b.1.total_cmp(&a.1));
    let labels = moduli
        .into_iter()
        .filter(|(_, m)| *m > 1.0 + 1e-9)
        .map(|(s, m)| {
            let top = (m - lambda1).abs() <= tol;
            match (simple_hypothesis, top) {
                (true, true) => RealizabilityLabel {
                    value: s,
                    status: "realizable",
                    justification: "A simple: non-torsion points have dense orbits and arithmetic degree equal to the dynamical degree".into(),
                    citations: vec![CITE_SIMPLE_DICHOTOMY],
                },
                (true, false) => RealizabilityLabel {
                    value: s,
                    status: "non-realizable",
                    justification: "A simple: only the dynamical degree and 1 occur as arithmetic degrees".into(),
                    citations: vec![CITE_SIMPLE_DICHOTOMY],
                },
                (false, _) => RealizabilityLabel {
                    value: s,
                    status: "potential",
                    justification: "no simplicity hypothesis: eigenvalue modulus above 1 is a potential arithmetic degree only".into(),
                    citations: vec![CITE_PULLBACK_FORMULA],
                },
            }
        })
        .chain(simple_hypothesis.then(|| RealizabilityLabel {
            value: "1".into(),
            status: "realizable",
            justification: "torsion points are pre-periodic".into(),
            citations: vec![CITE_SIMPLE_DICHOTOMY],
        }))
        .collect();
    Ok(IsogenyReport { theta, dynamical_degree: lambda1, dynamical_degree_exact: exact, simple_hypothesis, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    #[test]
    fn theta_examples() {
        let t = theta_matrix(&m(&[&[3, 0], &[0, 2]])).unwrap();
        assert_eq!(t.matrix, RatMatrix::diagonal(&[rat(9), rat(4), rat(6)]));
        assert_eq!(theta_matrix(&RatMatrix::identity(2)).unwrap().matrix, RatMatrix::identity(3));
        let u = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(theta_apply(&u, &SymClass::from_i64(1, 0, 0)).unwrap(), SymClass::from_i64(1, 1, 1));
        assert!(matches!(theta_matrix(&m(&[&[1, 2], &[2, 4]])), Err(Error::Singular(_))));
    }

    #[test]
    fn nef_and_ample() {
        let e11 = SymClass::from_i64(1, 0, 0);
        assert!(is_nef_class(&e11) && !is_ample_class(&e11));
        assert!(!is_nef_class(&SymClass::from_i64(0, 0, 1)));
        assert!(is_ample_class(&SymClass::from_i64(1, 1, 0)));
    }

    #[test]
    fn counterexample() {
        let r = counterexample_report(3, 2).unwrap();
        let vals: Vec<BigInt> = r.eigenvalues.iter().map(|e| e.0.clone()).collect();
        assert_eq!(vals, [9, 6, 4].map(BigInt::from).to_vec());
        assert_eq!(r.eigenvalues.iter().map(|e| e.2).collect::<Vec<_>>(), vec![true, false, true]);
        assert_eq!(r.realizable, [9, 1].map(BigInt::from).to_vec());
        assert_eq!(r.non_realizable, [6, 4].map(BigInt::from).to_vec());
        let r = counterexample_report(2, 1).unwrap();
        assert_eq!(r.non_realizable, vec![BigInt::from(2)]);
        assert!(counterexample_report(2, 2).is_err());
    }

    #[test]
    fn isogeny_reports() {
        let r = general_isogeny_report(&m(&[&[3, 0], &[0, 2]]), true).unwrap();
        let real: Vec<&str> = r.labels.iter().filter(|l| l.status == "realizable").map(|l| l.value.as_str()).collect();
        assert_eq!(real, vec!["9", "1"]);
        let r = general_isogeny_report(&m(&[&[2, 0], &[0, 2]]), false).unwrap();
        assert_eq!(r.theta.matrix, RatMatrix::identity(3).scale(&rat(4)));
        assert_eq!(r.labels.len(), 1);
        assert!(r.theta.flags[0].nef_eigendivisor && r.theta.flags[0].ample_eigendivisor);
        let r = general_isogeny_report(&m(&[&[0, 1], &[2, 0]]), true).unwrap();
        assert!(r.dynamical_degree > 1.0);
    }

    #[test]
    fn unsupported_algebras() {
        assert!(require_supported_algebra("m2q").is_ok());
        assert!(matches!(require_supported_algebra("quaternion"), Err(Error::Unsupported(_))));
    }
}
