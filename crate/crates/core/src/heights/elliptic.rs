//! Elliptic curves `y^2 = x^3 + a x + b` over the rationals: the group law,
//! canonical heights by the doubling limit, torsion detection, and the
//! arithmetic degree of `(P, Q) -> (aP, bQ)` on `E x E`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{display, ln_abs, parse_rational, to_wire, Rational};

pub const MAX_DEPTH: u32 = 10;
/// Largest order of a rational torsion point (Mazur).
pub const MAX_TORSION_ORDER: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub a: BigInt,
    pub b: BigInt,
}

impl Curve {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        let disc: BigInt = BigInt::from(4) * a.pow(3) + BigInt::from(27) * b.pow(2);
        if disc.is_zero() {
            return Err(Error::Invalid("singular curve: 4a^3 + 27b^2 = 0".into()));
        }
        Ok(Curve { a, b })
    }

    /// Parses `"a,b"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b] = parts[..] else {
            return Err(Error::Invalid(format!("curve must be \"a,b\", got {s:?}")));
        };
        let p = |x: &str| x.parse::<BigInt>().map_err(|_| Error::Invalid(format!("bad curve coefficient {x:?}")));
        Curve::new(p(a)?, p(b)?)
    }

    pub fn contains(&self, p: &EPoint) -> bool {
        match p {
            EPoint::Infinity => true,
            EPoint::Affine { x, y } => {
                y * y == x * x * x + Rational::from_integer(self.a.clone()) * x + Rational::from_integer(self.b.clone())
            }
        }
    }

    pub fn check(&self, p: &EPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OffCurve(format!("{p} is not on y^2 = x^3 + {}x + {}", self.a, self.b)))
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "a": self.a.to_string(), "b": self.b.to_string() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EPoint {
    Infinity,
    Affine { x: Rational, y: Rational },
}

impl EPoint {
    pub fn affine(x: Rational, y: Rational) -> Self {
        EPoint::Affine { x, y }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        EPoint::Affine { x: Rational::from_integer(x.into()), y: Rational::from_integer(y.into()) }
    }

    /// Parses `"x,y"` with rational entries, or `"inf"`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "o") {
            return Ok(EPoint::Infinity);
        }
        let parts: Vec<&str> = t.trim_start_matches('(').trim_end_matches(')').split(',').collect();
        let [x, y] = parts[..] else {
            return Err(Error::Invalid(format!("point must be \"x,y\" or \"inf\", got {s:?}")));
        };
        Ok(EPoint::Affine { x: parse_rational(x.trim())?, y: parse_rational(y.trim())? })
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, EPoint::Infinity)
    }

    pub fn neg(&self) -> Self {
        match self {
            EPoint::Infinity => EPoint::Infinity,
            EPoint::Affine { x, y } => EPoint::Affine { x: x.clone(), y: -y },
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            EPoint::Infinity => json!("inf"),
            EPoint::Affine { x, y } => json!({ "x": to_wire(x), "y": to_wire(y) }),
        }
    }
}

impl fmt::Display for EPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EPoint::Infinity => write!(f, "inf"),
            EPoint::Affine { x, y } => write!(f, "({}, {})", display(x), display(y)),
        }
    }
}

fn add_unchecked(c: &Curve, p: &EPoint, q: &EPoint) -> EPoint {
    let (EPoint::Affine { x: x1, y: y1 }, EPoint::Affine { x: x2, y: y2 }) = (p, q) else {
        return if p.is_infinity() { q.clone() } else { p.clone() };
    };
    let lambda = if x1 == x2 {
        if y1 != y2 || y1.is_zero() {
            return EPoint::Infinity;
        }
        let three = Rational::from_integer(3.into());
        (three * x1 * x1 + Rational::from_integer(c.a.clone())) / (y1 * Rational::from_integer(2.into()))
    } else {
        (y2 - y1) / (x2 - x1)
    };
    let x3 = &lambda * &lambda - x1 - x2;
    let y3 = lambda * (x1 - &x3) - y1;
    EPoint::Affine { x: x3, y: y3 }
}

pub fn ec_add(c: &Curve, p: &EPoint, q: &EPoint) -> Result<EPoint> {
    c.check(p)?;
    c.check(q)?;
    Ok(add_unchecked(c, p, q))
}

pub fn ec_double(c: &Curve, p: &EPoint) -> Result<EPoint> {
    c.check(p)?;
    Ok(add_unchecked(c, p, p))
}

/// `k P` by double-and-add; negative `k` multiplies `-P`.
pub fn ec_multiply(c: &Curve, p: &EPoint, k: &BigInt) -> Result<EPoint> {
    c.check(p)?;
    let (base, k) = if k.is_negative() { (p.neg(), -k) } else { (p.clone(), k.clone()) };
    let mut acc = EPoint::Infinity;
    for i in (0..k.bits()).rev() {
        acc = add_unchecked(c, &acc, &acc);
        if k.bit(i) {
            acc = add_unchecked(c, &acc, &base);
        }
    }
    Ok(acc)
}

/// `kP = O` for some `1 <= k <= 12`. Exact over the rationals.
pub fn torsion_order(c: &Curve, p: &EPoint) -> Result<Option<u32>> {
    c.check(p)?;
    let mut q = p.clone();
    for k in 1..=MAX_TORSION_ORDER {
        if q.is_infinity() {
            return Ok(Some(k));
        }
        q = add_unchecked(c, &q, p);
    }
    Ok(None)
}

pub fn is_torsion(c: &Curve, p: &EPoint) -> Result<bool> {
    Ok(torsion_order(c, p)?.is_some())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalHeight {
    pub value: f64,
    pub error_bound: f64,
    /// `4^{-k} h(x(2^k P))` for `k = 0..=depth`.
    pub terms: Vec<f64>,
    pub torsion: bool,
    pub depth: u32,
}

impl CanonicalHeight {
    pub fn to_json(&self) -> Value {
        json!({
            "value": self.value,
            "error_bound": self.error_bound,
            "terms": self.terms,
            "torsion": self.torsion,
            "depth": self.depth,
        })
    }
}

fn naive_x_height(num: &BigInt, den: &BigInt) -> f64 {
    ln_abs(num).max(ln_abs(den)).max(0.0)
}

/// `lim 4^{-n} h(x(2^n P))` with `h(n/d) = ln max(|n|, |d|)`.
///
/// Torsion points get exactly 0. Otherwise the last term is returned with the
/// bound `C / (3 * 4^depth)`, where `C = max_k |h(x(2Q_k)) - 4 h(x(Q_k))|`
/// over the computed orbit.
pub fn canonical_height(c: &Curve, p: &EPoint, depth: u32) -> Result<CanonicalHeight> {
    if depth > MAX_DEPTH {
        return Err(Error::Capacity(format!("depth {depth} exceeds the cap of {MAX_DEPTH}")));
    }
    if is_torsion(c, p)? {
        return Ok(CanonicalHeight { value: 0.0, error_bound: 0.0, terms: vec![0.0], torsion: true, depth });
    }
    let EPoint::Affine { x, .. } = p else { unreachable!("infinity is torsion") };
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    let mut raw = vec![naive_x_height(&n, &d)];
    let (a, b) = (&c.a, &c.b);
    // Any common factor of the doubling forms at coprime (n, d) divides their resultant.
    let four = BigInt::from(4);
    let res = super::resultant(
        &[BigInt::one(), BigInt::zero(), BigInt::from(-2) * a, BigInt::from(-8) * b, a * a],
        &[BigInt::zero(), four.clone(), BigInt::zero(), &four * a, &four * b],
    )?
    .abs();
    for _ in 0..depth {
        // x(2Q) = (x^4 - 2a x^2 - 8b x + a^2) / (4 (x^3 + a x + b)), homogenized in n/d.
        let n2 = &n * &n;
        let d2 = &d * &d;
        let num = &n2 * &n2 - BigInt::from(2) * a * &n2 * &d2 - BigInt::from(8) * b * &n * &d2 * &d + a * a * &d2 * &d2;
        let den = BigInt::from(4) * &d * (&n2 * &n + a * &n * &d2 + b * &d2 * &d);
        if den.is_zero() {
            return Err(Error::Consistency("non-torsion point reached a 2-torsion point".into()));
        }
        let g = if res.is_zero() { num.gcd(&den) } else { (&num % &res).gcd(&res).gcd(&(&den % &res)) };
        n = num / &g;
        d = den / &g;
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        raw.push(naive_x_height(&n, &d));
    }
    let terms: Vec<f64> = raw.iter().enumerate().map(|(k, h)| h / 4f64.powi(k as i32)).collect();
    let c_est = raw.windows(2).map(|w| (w[1] - 4.0 * w[0]).abs()).fold(0.0, f64::max);
    Ok(CanonicalHeight {
        value: *terms.last().expect("depth + 1 terms"),
        error_bound: c_est / (3.0 * 4f64.powi(depth as i32)),
        terms,
        torsion: false,
        depth,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExeClassification {
    /// Exact arithmetic degree.
    pub alpha: BigInt,
    /// Which of `a^2`, `b^2`, `1` it is.
    pub label: &'static str,
    pub p_torsion: bool,
    pub q_torsion: bool,
    pub height_p: CanonicalHeight,
    pub height_q: CanonicalHeight,
    /// `a^{2k} h(P) + b^{2k} h(Q)` for `k = 0..=iterations`.
    pub orbit_heights: Vec<f64>,
    pub numeric_estimate: f64,
    pub numeric_agrees: bool,
    pub non_cm_asserted: bool,
}

impl ExeClassification {
    pub fn to_json(&self) -> Value {
        json!({
            "alpha": self.alpha.to_string(),
            "label": self.label,
            "p_torsion": self.p_torsion,
            "q_torsion": self.q_torsion,
            "height_p": self.height_p.to_json(),
            "height_q": self.height_q.to_json(),
            "orbit_heights": self.orbit_heights,
            "numeric_estimate": self.numeric_estimate,
            "numeric_agrees": self.numeric_agrees,
            "non_cm_asserted": self.non_cm_asserted,
        })
    }
}

pub const EXE_ITERATIONS: usize = 10;
pub const EXE_TOLERANCE: f64 = 1e-2;

/// Arithmetic degree of `(P, Q) -> (aP, bQ)` on `E x E`.
///
/// The exact value is the largest of `a^2` (if `P` has infinite order),
/// `b^2` (if `Q` has infinite order) and 1. The numeric cross-check grows the
/// canonical height `a^{2k} h(P) + b^{2k} h(Q)` and compares its last ratio.
pub fn exe_classify(
    c: &Curve,
    a: i64,
    b: i64,
    p: &EPoint,
    q: &EPoint,
    depth: u32,
    non_cm: bool,
) -> Result<ExeClassification> {
    if a < 1 || b < 1 {
        return Err(Error::Invalid(format!("multipliers must be positive, got a = {a}, b = {b}")));
    }
    c.check(p)?;
    c.check(q)?;
    let hp = canonical_height(c, p, depth)?;
    let hq = canonical_height(c, q, depth)?;
    let (a2, b2) = (BigInt::from(a * a), BigInt::from(b * b));
    let mut candidates = vec![(BigInt::one(), "1")];
    if !hp.torsion {
        candidates.push((a2.clone(), "a^2"));
    }
    if !hq.torsion {
        candidates.push((b2.clone(), "b^2"));
    }
    // Ties (a = b) keep the first label found, so order matters: 1, a^2, b^2.
    let (alpha, label) =
        candidates.into_iter().fold((BigInt::zero(), "1"), |best, c| if c.0 > best.0 { c } else { best });
    let (fa, fb) = ((a * a) as f64, (b * b) as f64);
    let orbit_heights: Vec<f64> =
        (0..=EXE_ITERATIONS as i32).map(|k| fa.powi(k) * hp.value + fb.powi(k) * hq.value).collect();
    let last = orbit_heights[EXE_ITERATIONS];
    let prev = orbit_heights[EXE_ITERATIONS - 1];
    let numeric_estimate = if prev > 0.0 { last / prev } else { 1.0 };
    let exact = alpha.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    Ok(ExeClassification {
        numeric_agrees: (numeric_estimate - exact).abs() <= EXE_TOLERANCE,
        alpha,
        label,
        p_torsion: hp.torsion,
        q_torsion: hq.torsion,
        height_p: hp,
        height_q: hq,
        orbit_heights,
        numeric_estimate,
        non_cm_asserted: non_cm,
    })
}

/// Rational torsion points with their exact orders, plus the point at infinity.
pub fn torsion_fixtures() -> Vec<(Curve, EPoint, u32)> {
    let c = |a: i64, b: i64| Curve::new(a, b).expect("nonsingular fixture curve");
    vec![
        (c(-1, 0), EPoint::from_i64(0, 0), 2),
        (c(-1, 0), EPoint::from_i64(1, 0), 2),
        (c(0, 1), EPoint::from_i64(-1, 0), 2),
        (c(0, 1), EPoint::from_i64(0, 1), 3),
        (c(0, 1), EPoint::from_i64(2, 3), 6),
        (c(0, 1), EPoint::from_i64(2, -3), 6),
        (c(4, 0), EPoint::from_i64(2, 4), 4),
        (c(-43, 166), EPoint::from_i64(3, 8), 7),
        (c(0, -2), EPoint::Infinity, 1),
    ]
}

/// The first `count` integral points `(x, y)` of infinite order found by
/// scanning small `a`, `x`, `y` and solving for `b`.
pub fn nontorsion_fixtures(count: usize) -> Vec<(Curve, EPoint)> {
    let mut out = vec![(Curve::new(0, -2).expect("nonsingular"), EPoint::from_i64(3, 5))];
    'scan: for a in -3i64..=3 {
        for x in -2i64..=4 {
            for y in 1i64..=6 {
                if out.len() >= count {
                    break 'scan;
                }
                let b = y * y - x * x * x - a * x;
                let Ok(c) = Curve::new(a, b) else { continue };
                let p = EPoint::from_i64(x, y);
                if out.iter().any(|(d, q)| *d == c && *q == p) {
                    continue;
                }
                if !is_torsion(&c, &p).expect("point is on its curve by construction") {
                    out.push((c, p));
                }
            }
        }
    }
    out.truncate(count);
    out
}
