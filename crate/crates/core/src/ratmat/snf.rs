use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;
use crate::error::{Error, Result};

/// `u * m * v == d` with `u`, `v` unimodular and `d` diagonal, `d_1 | d_2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).take_while(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }

    /// Re-multiplies and checks shape, divisibility and unimodularity.
    pub fn verify(&self, m: &IntMatrix) -> Result<()> {
        if self.u.mul(m)?.mul(&self.v)? != self.d {
            return Err(Error::Consistency("U*M*V != D".into()));
        }
        if !self.d.is_diagonal() || !self.u.is_unimodular() || !self.v.is_unimodular() {
            return Err(Error::Consistency("Smith form is not diagonal/unimodular".into()));
        }
        let f = self.invariant_factors();
        if f.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) || f.iter().any(|x| x.is_negative()) {
            return Err(Error::Consistency("invariant factors do not form a divisibility chain".into()));
        }
        Ok(())
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    for t in 0..r.min(c) {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if !a[(i, j)].is_zero() && best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Smith { u, d: a, v };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -a[(i, t)].div_floor(&a[(t, t)]);
                a.add_row(i, t, &q);
                u.add_row(i, t, &q);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..c {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -a[(t, j)].div_floor(&a[(t, t)]);
                a.add_col(j, t, &q);
                v.add_col(j, t, &q);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let p = a[(t, t)].clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !(&a[(i, j)] % &p).is_zero()));
            if let Some(i) = bad {
                let one = BigInt::from(1);
                a.add_row(t, i, &one);
                u.add_row(t, i, &one);
                continue;
            }
            break;
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { u, d: a, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_two_three() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&m);
        s.verify(&m).unwrap();
        assert_eq!(s.d, IntMatrix::diagonal(&[1, 6]));
    }

    #[test]
    fn identity_is_fixed() {
        let m = IntMatrix::identity(3);
        let s = smith_normal_form(&m);
        assert_eq!(s.d, m);
        assert_eq!(s.u, m);
        assert_eq!(s.v, m);
    }

    #[test]
    fn projective_plane_rays() {
        let m = IntMatrix::from_i64(&[&[1, 0], &[0, 1], &[-1, -1]]);
        let s = smith_normal_form(&m);
        s.verify(&m).unwrap();
        assert_eq!(s.d, IntMatrix::from_i64(&[&[1, 0], &[0, 1], &[0, 0]]));
        // cokernel Z^3 / image has free rank 3 - 2 = 1 and no torsion
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn torsion_shows_up() {
        let m = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&m);
        s.verify(&m).unwrap();
        assert_eq!(s.invariant_factors(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }
}
