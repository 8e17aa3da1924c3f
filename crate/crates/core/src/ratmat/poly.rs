use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{gcd_of, lcm_of_denominators, rat, Rational};

/// Univariate polynomial with rational coefficients, ascending degree.
/// The coefficient vector never carries trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly { coeffs: vec![Rational::one()] }
    }

    /// `x - r`
    pub fn linear(r: &Rational) -> Self {
        RatPoly { coeffs: vec![-r.clone(), Rational::one()] }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + crate::rational::to_f64(c))
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = Rational::zero();
        Self::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn scale(&self, c: &Rational) -> RatPoly {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dl = d.leading();
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let c = &rem[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        rem.truncate(dd);
        (Self::new(q), Self::new(rem))
    }

    pub fn derivative(&self) -> RatPoly {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * rat(i as i64)).collect())
    }

    pub fn monic(&self) -> RatPoly {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.leading().recip())
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition of a monic polynomial:
    /// returns `(s_k, k)` with `self = prod s_k^k`, each `s_k` square-free, monic and non-constant.
    pub fn squarefree_decomposition(&self) -> Vec<(RatPoly, usize)> {
        let f = self.monic();
        let mut out = Vec::new();
        if f.degree() == 0 {
            return out;
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_rem(&a0).0;
        let mut c = fp.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut k = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), k));
            }
            b = b.div_rem(&a).0;
            if b.degree() == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            k += 1;
        }
        out
    }

    /// Integer coefficients of the primitive polynomial proportional to `self`,
    /// with a positive leading coefficient.
    pub fn primitive_integer_coeffs(&self) -> Vec<BigInt> {
        let l = lcm_of_denominators(&self.coeffs);
        let ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
        let mut g = gcd_of(&ints);
        if g.is_zero() {
            return ints;
        }
        if ints.last().is_some_and(|x| x.is_negative()) {
            g = -g;
        }
        ints.into_iter().map(|x| x / &g).collect()
    }

    /// Exact rational roots of a square-free polynomial.
    ///
    /// Small constant and leading coefficients go through the full rational
    /// root test (every `p/q` with `p | c0`, `q | cn`). Large ones fall back to
    /// candidates read off the numeric roots, each confirmed exactly.
    pub fn rational_roots_squarefree(&self, numeric_roots: impl FnOnce(&RatPoly) -> Vec<(f64, f64)>) -> Vec<Rational> {
        let mut roots = Vec::new();
        if self.degree() == 0 {
            return roots;
        }
        let mut p = self.clone();
        if p.coeffs[0].is_zero() {
            roots.push(Rational::zero());
            p = p.div_rem(&RatPoly::linear(&Rational::zero())).0;
        }
        if p.degree() == 0 {
            return roots;
        }
        let ints = p.primitive_integer_coeffs();
        let c0 = ints[0].abs();
        let cn = ints.last().unwrap().abs();
        let small = BigInt::from(1_000_000_000_000u64);
        let mut candidates: Vec<Rational> = Vec::new();
        if c0 <= small && cn <= small {
            let (c0, cn) = (c0.to_u64().unwrap(), cn.to_u64().unwrap());
            for num in divisors(c0) {
                for den in divisors(cn) {
                    let q = Rational::new(BigInt::from(num), BigInt::from(den));
                    candidates.push(q.clone());
                    candidates.push(-q);
                }
            }
        } else {
            let dens = if cn <= small { divisors(cn.to_u64().unwrap()) } else { vec![1] };
            let numeric = numeric_roots(&p);
            for &(re, im) in &numeric {
                if im.abs() > 1e-6 * (1.0 + re.abs()) || !re.is_finite() {
                    continue;
                }
                for &den in &dens {
                    let num = (re * den as f64).round();
                    if let Some(n) = num_bigint_from_f64(num) {
                        candidates.push(Rational::new(n, BigInt::from(den)));
                    }
                }
            }
            if cn > small {
                // Leading coefficient too large to enumerate; also try the exact
                // continued-fraction convergents of each real numeric root.
                for &(re, im) in &numeric {
                    if im.abs() <= 1e-6 * (1.0 + re.abs()) && re.is_finite() {
                        candidates.extend(convergents(re, 12));
                    }
                }
            }
        }
        candidates.sort();
        candidates.dedup();
        for c in candidates {
            if !c.is_zero() && p.eval(&c).is_zero() {
                roots.push(c);
            }
        }
        roots.sort();
        roots
    }

    /// Human-readable form in descending powers, e.g. `x^2 - 5x + 6`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let coef = crate::rational::display(&a);
            match (i, a.is_one()) {
                (0, _) => s.push_str(&coef),
                (_, true) => {}
                (_, false) => s.push_str(&coef),
            }
            match i {
                0 => {}
                1 => s.push('x'),
                _ => s.push_str(&format!("x^{i}")),
            }
        }
        s
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

fn num_bigint_from_f64(x: f64) -> Option<BigInt> {
    use num_traits::FromPrimitive;
    BigInt::from_f64(x)
}

fn convergents(x: f64, depth: usize) -> Vec<Rational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut r = x;
    for _ in 0..depth {
        let a = r.floor();
        let Some(ai) = num_bigint_from_f64(a) else { break };
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if !k2.is_zero() {
            out.push(Rational::new(h2.clone(), k2.clone()));
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// Positive divisors by trial division. `n = 0` yields `[1]`.
fn divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return vec![1];
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn division_recovers_factors() {
        let a = RatPoly::from_i64(&[-3, 1]);
        let b = RatPoly::from_i64(&[-2, 1]);
        let p = a.mul(&b);
        assert_eq!(p, RatPoly::from_i64(&[6, -5, 1]));
        let (q, r) = p.div_rem(&a);
        assert_eq!(q, b);
        assert!(r.is_zero());
    }

    #[test]
    fn yun_decomposition() {
        // (x-1)^3 (x+2) (x^2-2)^2
        let l1 = RatPoly::from_i64(&[-1, 1]);
        let l2 = RatPoly::from_i64(&[2, 1]);
        let q = RatPoly::from_i64(&[-2, 0, 1]);
        let p = l1.mul(&l1).mul(&l1).mul(&l2).mul(&q).mul(&q);
        let dec = p.squarefree_decomposition();
        assert_eq!(dec, vec![(l2, 1), (q, 2), (l1, 3)]);
    }

    #[test]
    fn rational_roots_with_fractions() {
        // (2x - 3)(x + 5)(x^2 + 1)
        let p = RatPoly::from_i64(&[-3, 2]).mul(&RatPoly::from_i64(&[5, 1])).mul(&RatPoly::from_i64(&[1, 0, 1]));
        let roots = p.rational_roots_squarefree(|_| Vec::new());
        assert_eq!(roots, vec![rat(-5), ratio(3, 2)]);
    }

    #[test]
    fn pretty_print() {
        assert_eq!(RatPoly::from_i64(&[6, -5, 1]).pretty(), "x^2 - 5x + 6");
        assert_eq!(RatPoly::from_i64(&[0, 0, 1]).pretty(), "x^2");
        assert_eq!(RatPoly::from_i64(&[-1, 0, 1]).pretty(), "x^2 - 1");
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
    }
}
