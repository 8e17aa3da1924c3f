//! Weil heights on products of projective spaces and arithmetic-degree
//! estimation by exact iteration.
//!
//! Points and maps are integral and every image is gcd-normalized, so the
//! logarithmic height `ln max |x_i|` of each factor is computed from exact
//! integers. The estimates are floats derived from those exact values.

pub mod elliptic;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{decimal_digits, ln_abs};
use crate::ratmat::IntMatrix;

pub const DEFAULT_DIGIT_BUDGET: u64 = 1_000_000;
pub const DIGIT_BUDGET_ENV: &str = "ARITHDYN_DIGIT_BUDGET";

const BUNDLED_SYSTEMS: &[(&str, &str)] = &[
    ("square.system.json", include_str!("../../fixtures/square.system.json")),
    ("sum_squares_over_product.system.json", include_str!("../../fixtures/sum_squares_over_product.system.json")),
];

/// A point of `P^{k_1} x ... x P^{k_r}` with primitive, sign-normalized integer coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    factors: Vec<Vec<BigInt>>,
}

fn normalize(mut v: Vec<BigInt>) -> Result<Vec<BigInt>> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Err(Error::Invalid("projective coordinates are all zero".into()));
    }
    let flip = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    for x in v.iter_mut() {
        *x = &*x / &g;
        if flip {
            *x = -&*x;
        }
    }
    Ok(v)
}

impl ProjPoint {
    pub fn new(factors: Vec<Vec<BigInt>>) -> Result<Self> {
        if factors.iter().any(|f| f.len() < 2) {
            return Err(Error::Invalid("each factor needs at least two coordinates".into()));
        }
        Ok(ProjPoint { factors: factors.into_iter().map(normalize).collect::<Result<_>>()? })
    }

    pub fn from_i64(factors: &[&[i64]]) -> Result<Self> {
        Self::new(factors.iter().map(|f| f.iter().map(|&x| x.into()).collect()).collect())
    }

    /// Parses `"2,1"` or `"2,1;1,1"` (factors separated by `;`), optionally in parentheses.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let factors = s
            .split(';')
            .map(|f| {
                f.trim()
                    .trim_start_matches('(')
                    .trim_end_matches(')')
                    .split([',', ':'])
                    .map(|x| x.trim().parse::<BigInt>().map_err(|_| Error::Invalid(format!("bad coordinate {x:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    pub fn factors(&self) -> &[Vec<BigInt>] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.len() - 1).collect()
    }

    pub fn max_digits(&self) -> u64 {
        self.factors.iter().flatten().map(decimal_digits).max().unwrap_or(1)
    }

    pub fn to_json(&self) -> Value {
        json!(self.factors.iter().map(|f| f.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":")))
            .collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(","))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeilHeight {
    pub value: f64,
    /// `max |x_i|` for each factor.
    pub max_abs: Vec<BigInt>,
}

/// Sum over factors of `ln max |x_i|`.
pub fn weil_height(p: &ProjPoint) -> WeilHeight {
    let max_abs: Vec<BigInt> =
        p.factors.iter().map(|f| f.iter().map(|x| x.abs()).max().expect("nonempty factor")).collect();
    WeilHeight { value: max_abs.iter().map(ln_abs).sum(), max_abs }
}

/// One factor of a product map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `(x:y) -> (F(x,y) : G(x,y))`, coefficients of `x^d, x^{d-1}y, ..., y^d`.
    P1Map { f: Vec<BigInt>, g: Vec<BigInt> },
    /// `x_i -> x_i^d` on `P^dim`.
    Power { dim: usize, d: u64 },
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::P1Map { .. } => 1,
            Factor::Power { dim, .. } => *dim,
        }
    }

    pub fn degree(&self) -> u64 {
        match self {
            Factor::P1Map { f, .. } => f.len() as u64 - 1,
            Factor::Power { d, .. } => *d,
        }
    }
}

/// Evaluates a binary form with descending-`x` coefficients.
fn eval_form(c: &[BigInt], x: &BigInt, y: &BigInt) -> BigInt {
    // Horner in x/y, homogenized.
    let mut acc = BigInt::zero();
    let mut ypow = BigInt::one();
    let d = c.len() - 1;
    let mut ys = Vec::with_capacity(d + 1);
    for _ in 0..=d {
        ys.push(ypow.clone());
        ypow *= y;
    }
    for (i, ci) in c.iter().enumerate() {
        acc = acc * x + ci * &ys[i];
    }
    acc
}

fn form_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `c(A, B)` for forms `A`, `B` of equal degree.
fn form_compose(c: &[BigInt], a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let d = c.len() - 1;
    let e = a.len() - 1;
    let mut out = vec![BigInt::zero(); d * e + 1];
    let mut apow = vec![vec![BigInt::one()]];
    let mut bpow = vec![vec![BigInt::one()]];
    for k in 1..=d {
        apow.push(form_mul(&apow[k - 1], a));
        bpow.push(form_mul(&bpow[k - 1], b));
    }
    for (i, ci) in c.iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        let term = form_mul(&apow[d - i], &bpow[i]);
        for (o, t) in out.iter_mut().zip(term) {
            *o += ci * t;
        }
    }
    out
}

/// Resultant of two binary forms of degree `d`, as the Sylvester determinant.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> Result<BigInt> {
    let d = f.len() - 1;
    if g.len() != f.len() {
        return Err(Error::Invalid("binary forms of different degree".into()));
    }
    if d == 0 {
        return Ok(BigInt::one());
    }
    let n = 2 * d;
    let s = IntMatrix::from_fn(n, n, |i, j| {
        let (c, shift) = if i < d { (f, i) } else { (g, i - d) };
        if j >= shift && j - shift <= d {
            c[j - shift].clone()
        } else {
            BigInt::zero()
        }
    });
    s.det()
}

/// A product of self-maps of projective spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynSystem {
    factors: Vec<Factor>,
}

#[derive(Deserialize, Serialize)]
#[serde(untagged)]
enum IntLike {
    Int(i64),
    Text(String),
}

impl IntLike {
    fn to_big(&self) -> Result<BigInt> {
        match self {
            IntLike::Int(i) => Ok((*i).into()),
            IntLike::Text(t) => t.trim().parse().map_err(|_| Error::Invalid(format!("bad integer {t:?}"))),
        }
    }
}

#[derive(Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FactorWire {
    P1map { f: Vec<IntLike>, g: Vec<IntLike> },
    Power { dim: usize, d: u64 },
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct SystemWire {
    factors: Vec<FactorWire>,
}

impl DynSystem {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("a system needs at least one factor".into()));
        }
        for (i, fac) in factors.iter().enumerate() {
            match fac {
                Factor::P1Map { f, g } => {
                    if f.len() < 2 || f.len() != g.len() {
                        return Err(Error::Invalid(format!("factor {i}: forms must have equal degree >= 1")));
                    }
                    if resultant(f, g)?.is_zero() {
                        return Err(Error::Invalid(format!("factor {i}: forms have a common zero (resultant 0)")));
                    }
                }
                Factor::Power { dim, d } => {
                    if *dim < 1 || *d < 1 {
                        return Err(Error::Invalid(format!("factor {i}: power map needs dim >= 1 and d >= 1")));
                    }
                }
            }
        }
        Ok(DynSystem { factors })
    }

    pub fn p1_map(f: &[i64], g: &[i64]) -> Result<Self> {
        Self::new(vec![Factor::P1Map {
            f: f.iter().map(|&x| x.into()).collect(),
            g: g.iter().map(|&x| x.into()).collect(),
        }])
    }

    /// Coordinatewise power maps, one `(dim, degree)` pair per factor.
    pub fn powers(spec: &[(usize, u64)]) -> Result<Self> {
        Self::new(spec.iter().map(|&(dim, d)| Factor::Power { dim, d }).collect())
    }

    pub fn product(&self, other: &DynSystem) -> DynSystem {
        DynSystem { factors: self.factors.iter().chain(&other.factors).cloned().collect() }
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let w: SystemWire = serde_json::from_str(src).map_err(|e| Error::Invalid(format!("system JSON: {e}")))?;
        let factors = w
            .factors
            .into_iter()
            .map(|f| match f {
                FactorWire::P1map { f, g } => Ok(Factor::P1Map {
                    f: f.iter().map(IntLike::to_big).collect::<Result<_>>()?,
                    g: g.iter().map(IntLike::to_big).collect::<Result<_>>()?,
                }),
                FactorWire::Power { dim, d } => Ok(Factor::Power { dim, d }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    /// A bundled fixture, by file name or stem (`"square"`).
    pub fn bundled(name: &str) -> Option<DynSystem> {
        let stem = name.trim_end_matches(".json").trim_end_matches(".system");
        BUNDLED_SYSTEMS
            .iter()
            .find(|(f, _)| f.trim_end_matches(".system.json") == stem)
            .and_then(|(_, src)| DynSystem::from_json(src).ok())
    }

    pub fn bundled_names() -> Vec<&'static str> {
        BUNDLED_SYSTEMS.iter().map(|(f, _)| *f).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "factors": self.factors.iter().map(|f| match f {
                Factor::P1Map { f, g } => json!({
                    "kind": "p1map",
                    "f": f.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "g": g.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                }),
                Factor::Power { dim, d } => json!({ "kind": "power", "dim": dim, "d": d }),
            }).collect::<Vec<_>>()
        })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.factors.iter().map(Factor::degree).collect()
    }

    fn check_arity(&self, p: &ProjPoint) -> Result<()> {
        let dims: Vec<usize> = self.factors.iter().map(Factor::dim).collect();
        if dims != p.dims() {
            return Err(Error::Shape(format!("point has factor dimensions {:?}, system expects {dims:?}", p.dims())));
        }
        Ok(())
    }

    pub fn apply(&self, p: &ProjPoint) -> Result<ProjPoint> {
        self.check_arity(p)?;
        let mut out = Vec::with_capacity(self.factors.len());
        for (fac, x) in self.factors.iter().zip(&p.factors) {
            let img = match fac {
                Factor::P1Map { f, g } => vec![eval_form(f, &x[0], &x[1]), eval_form(g, &x[0], &x[1])],
                Factor::Power { d, .. } => {
                    let e = u32::try_from(*d).map_err(|_| Error::Capacity("power map degree too large".into()))?;
                    let img: Vec<BigInt> = x.iter().map(|c| c.pow(e)).collect();
                    // Powers of coprime integers are coprime; checked rather than trusted.
                    if !img.iter().fold(BigInt::zero(), |g, c| g.gcd(c)).is_one() {
                        return Err(Error::Consistency("power map image is not primitive".into()));
                    }
                    img
                }
            };
            if img.iter().all(Zero::is_zero) {
                return Err(Error::Invalid("map sends the point to the zero vector".into()));
            }
            out.push(img);
        }
        ProjPoint::new(out)
    }

    /// The `m`-th iterate as a system of the same shape.
    pub fn iterate(&self, m: u32) -> Result<DynSystem> {
        if m == 0 {
            return Err(Error::Invalid("iterate count must be at least 1".into()));
        }
        let factors = self
            .factors
            .iter()
            .map(|fac| match fac {
                Factor::P1Map { f, g } => {
                    let (mut a, mut b) = (f.clone(), g.clone());
                    for _ in 1..m {
                        let na = form_compose(f, &a, &b);
                        let nb = form_compose(g, &a, &b);
                        a = na;
                        b = nb;
                    }
                    Ok(Factor::P1Map { f: a, g: b })
                }
                Factor::Power { dim, d } => d
                    .checked_pow(m)
                    .map(|d| Factor::Power { dim: *dim, d })
                    .ok_or_else(|| Error::Capacity("iterated degree overflows".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        DynSystem::new(factors)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlphaConfig {
    /// Cap on decimal digits of any coordinate along the orbit.
    pub digit_budget: u64,
}

impl Default for AlphaConfig {
    fn default() -> Self {
        AlphaConfig { digit_budget: DEFAULT_DIGIT_BUDGET }
    }
}

impl AlphaConfig {
    /// Default configuration with the digit budget overridden by the environment, if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(DIGIT_BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map(|digit_budget| AlphaConfig { digit_budget })
                .map_err(|_| Error::Invalid(format!("{DIGIT_BUDGET_ENV}={v:?} is not a digit count"))),
            Err(_) => Ok(Self::default()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaEstimate {
    pub iterations: usize,
    /// `h(f^k P)` for `k = 0..=n`.
    pub heights: Vec<f64>,
    /// `h_{k+1} / h_k`, `None` where `h_k = 0`.
    pub ratios: Vec<Option<f64>>,
    /// `max(1, h_k)^{1/k}` for `k = 1..=n`.
    pub roots: Vec<f64>,
    /// The last ratio, or 1 when the orbit height has collapsed to 0.
    pub estimate: f64,
    pub root_estimate: f64,
    /// Some `h_k` is zero.
    pub collapsed: bool,
    /// `|r_n - r_{n-1}|`, the change in the last two ratios.
    pub last_change: Option<f64>,
    pub final_point: ProjPoint,
}

impl AlphaEstimate {
    pub fn to_json(&self) -> Value {
        json!({
            "iterations": self.iterations,
            "heights": self.heights,
            "ratios": self.ratios,
            "roots": self.roots,
            "estimate": self.estimate,
            "root_estimate": self.root_estimate,
            "collapsed": self.collapsed,
            "last_change": self.last_change,
            "final_point_digits": self.final_point.max_digits(),
        })
    }
}

/// Iterates `sys` from `p` exactly `n` times and estimates the arithmetic degree.
pub fn alpha_estimate(sys: &DynSystem, p: &ProjPoint, n: usize, cfg: AlphaConfig) -> Result<AlphaEstimate> {
    if n < 3 {
        return Err(Error::Invalid(format!("need at least 3 iterations, got {n}")));
    }
    sys.check_arity(p)?;
    let mut heights = vec![weil_height(p).value];
    let mut q = p.clone();
    for k in 0..n {
        q = sys.apply(&q)?;
        if q.max_digits() > cfg.digit_budget {
            return Err(Error::DigitBudget { budget: cfg.digit_budget, completed: k, partial_heights: heights });
        }
        heights.push(weil_height(&q).value);
    }
    let ratios: Vec<Option<f64>> = heights.windows(2).map(|w| (w[0] > 0.0).then(|| w[1] / w[0])).collect();
    let roots: Vec<f64> = (1..=n).map(|k| heights[k].max(1.0).powf(1.0 / k as f64)).collect();
    let collapsed = heights.contains(&0.0);
    let estimate = match ratios[n - 1] {
        Some(r) if heights[n] > 0.0 => r,
        _ => 1.0,
    };
    let last_change = match (ratios[n - 1], ratios[n - 2]) {
        (Some(a), Some(b)) => Some((a - b).abs()),
        _ => None,
    };
    Ok(AlphaEstimate {
        iterations: n,
        heights,
        ratios,
        roots: roots.clone(),
        estimate,
        root_estimate: *roots.last().expect("n >= 3"),
        collapsed,
        last_change,
        final_point: q,
    })
}
