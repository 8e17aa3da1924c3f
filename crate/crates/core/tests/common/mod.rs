//! Independent oracles shared by the integration tests. They use only
//! hand-written arithmetic on `BigRational`/`BigInt`, never the library's solvers.
#![allow(dead_code, clippy::needless_range_loop)]

use arithdyn::fan::Fan;
use arithdyn::heights::elliptic::{Curve, EPoint};
use arithdyn::rational::rat;
use arithdyn::ratmat::RatMatrix;
use arithdyn::toric_endo::{enumerate_ray_fixing, fan_automorphisms, LatticeEndo};
use arithdyn::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub fn ray_vec(fan: &Fan, r: usize) -> Vec<Rational> {
    fan.rays[r].iter().map(|&x| rat(x)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the square system `a x = b` by Gauss-Jordan elimination; `None` if singular.
pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for j in 0..n {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    Some(b)
}

/// `m_σ` with `<m_σ, v_ρ> = -a_ρ` for the rays of a full simplicial cone.
pub fn oracle_cartier(fan: &Fan, cone: &[usize], coeffs: &[Rational]) -> Vec<Rational> {
    let rows: Vec<Vec<Rational>> = cone.iter().map(|&r| ray_vec(fan, r)).collect();
    let rhs: Vec<Rational> = cone.iter().map(|&r| -&coeffs[r]).collect();
    solve(rows, rhs).expect("full simplicial cone")
}

/// The support function `ψ_D(v) = <m_σ, v>` for a cone `σ` containing `v`.
pub fn oracle_support(fan: &Fan, coeffs: &[Rational], v: &[Rational]) -> Rational {
    for cone in &fan.max_cones {
        let cols: Vec<Vec<Rational>> = cone.iter().map(|&r| ray_vec(fan, r)).collect();
        let rows: Vec<Vec<Rational>> = (0..fan.dim).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
        if let Some(coords) = solve(rows, v.to_vec()) {
            if coords.iter().all(|c| !c.is_negative()) {
                return dot(&oracle_cartier(fan, cone, coeffs), v);
            }
        }
    }
    panic!("point {v:?} not covered by the fan");
}

/// Convexity of the support function, checked cone by cone.
pub fn oracle_is_nef(fan: &Fan, coeffs: &[Rational]) -> bool {
    fan.max_cones.iter().all(|cone| {
        let m = oracle_cartier(fan, cone, coeffs);
        (0..fan.ray_count()).all(|r| dot(&m, &ray_vec(fan, r)) >= -&coeffs[r])
    })
}

pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                for j in 0..cols {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Every ray subset `R1` (containing ray 0) for which the fan is the product of
/// the fans on `R1` and its complement: complementary spans and maximal cones
/// exactly the unions of one maximal piece from each side. Lattice index is not
/// checked; the bundled fixtures are unimodular.
pub fn oracle_product_splits(fan: &Fan) -> Vec<Vec<usize>> {
    let n = fan.ray_count();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        if mask & 1 == 0 {
            continue;
        }
        let r1: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let r2: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let span = |rs: &[usize]| rank(rs.iter().map(|&r| ray_vec(fan, r)).collect());
        let (k1, k2) = (span(&r1), span(&r2));
        if k1 == 0 || k2 == 0 || k1 + k2 != fan.dim || span(&(0..n).collect::<Vec<_>>()) != fan.dim {
            continue;
        }
        let mut p1: Vec<Vec<usize>> = Vec::new();
        let mut p2: Vec<Vec<usize>> = Vec::new();
        for c in &fan.max_cones {
            let a: Vec<usize> = c.iter().copied().filter(|r| r1.contains(r)).collect();
            let b: Vec<usize> = c.iter().copied().filter(|r| r2.contains(r)).collect();
            if !p1.contains(&a) {
                p1.push(a);
            }
            if !p2.contains(&b) {
                p2.push(b);
            }
        }
        let mut want: Vec<Vec<usize>> = Vec::new();
        for a in &p1 {
            for b in &p2 {
                let mut c: Vec<usize> = a.iter().chain(b).copied().collect();
                c.sort_unstable();
                want.push(c);
            }
        }
        want.sort();
        let mut have: Vec<Vec<usize>> = fan
            .max_cones
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        have.sort();
        have.dedup();
        if want == have {
            out.push(r1);
        }
    }
    out
}

/// Automorphisms, ray-fixing maps with scales in {1, 2, 3}, and `3 I`.
pub fn sample_endos(fan: &Fan) -> Vec<LatticeEndo> {
    let mut out: Vec<LatticeEndo> =
        fan_automorphisms(fan).unwrap().into_iter().map(|m| LatticeEndo::new(m, fan.clone()).unwrap()).collect();
    out.extend(enumerate_ray_fixing(fan, &[1, 2, 3]).unwrap().into_iter().map(|(e, _)| e));
    out.push(LatticeEndo::scalar(fan, 3).unwrap());
    out
}

/// Unique solution of an `m x k` system of full column rank, if consistent.
pub fn solve_full_column_rank(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let (m, k) = (a.len(), a.first().map_or(0, Vec::len));
    let mut t: Vec<Vec<Rational>> =
        a.iter().zip(b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
    let mut row = 0;
    for col in 0..k {
        let p = (row..m).find(|&i| !t[i][col].is_zero())?;
        t.swap(row, p);
        let inv = Rational::one() / &t[row][col];
        for x in t[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m {
            if i != row && !t[i][col].is_zero() {
                let f = t[i][col].clone();
                for j in 0..=k {
                    let v = &f * &t[row][j];
                    t[i][j] -= v;
                }
            }
        }
        row += 1;
    }
    if t[row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| t[i][k].clone()).collect())
}

/// Determinant by cofactor expansion.
pub fn det_cofactor(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<Rational>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let term = &m[0][j] * det_cofactor(&minor);
            if j % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

// ---- abelian surfaces: θ(α) = fᵀ α f on 2x2 matrices ----

pub type M2 = [[i64; 2]; 2];

pub fn oracle_theta(f: &M2, a: &[[Rational; 2]; 2]) -> [[Rational; 2]; 2] {
    let fr = |i: usize, j: usize| rat(f[i][j]);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut s = Rational::zero();
            for k in 0..2 {
                for l in 0..2 {
                    s += fr(k, i) * &a[k][l] * fr(l, j);
                }
            }
            s
        })
    })
}

pub fn oracle_psd(a: &[[Rational; 2]; 2]) -> bool {
    !a[0][0].is_negative() && !a[1][1].is_negative() && &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0] >= Rational::zero()
}

/// Matrix of θ in the basis `E11, E22, E12+E21`, columns are images.
pub fn oracle_theta_matrix(f: &M2) -> [[Rational; 3]; 3] {
    let basis = [(1, 0, 0), (0, 1, 0), (0, 0, 1)].map(|(p, q, r)| [[rat(p), rat(r)], [rat(r), rat(q)]]);
    let imgs = basis.map(|b| {
        let t = oracle_theta(f, &b);
        [t[0][0].clone(), t[1][1].clone(), t[0][1].clone()]
    });
    std::array::from_fn(|i| std::array::from_fn(|j| imgs[j][i].clone()))
}

pub fn mat_mul_2x2(a: &M2, b: &M2) -> M2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

pub fn mat_mul_3x3(a: &[[Rational; 3]; 3], b: &[[Rational; 3]; 3]) -> [[Rational; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| &a[i][k] * &b[k][j]).sum()))
}

pub fn random_nonsingular_2x2(rng: &mut impl Rng) -> M2 {
    loop {
        let m: M2 = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-4..=4)));
        if m[0][0] * m[1][1] != m[0][1] * m[1][0] {
            return m;
        }
    }
}

pub fn to_ratmat(m: &M2) -> RatMatrix {
    RatMatrix::from_i64(&[&m[0], &m[1]])
}

pub fn to_ratmat3(m: &[[Rational; 3]; 3]) -> RatMatrix {
    RatMatrix::from_rows(m.iter().map(|r| r.to_vec()).collect()).unwrap()
}

// ---- elliptic curves: affine chord-tangent law ----

type Pt = Option<(Rational, Rational)>;

fn to_pt(p: &EPoint) -> Pt {
    match p {
        EPoint::Infinity => None,
        EPoint::Affine { x, y } => Some((x.clone(), y.clone())),
    }
}

pub fn oracle_on_curve(a: i64, b: i64, p: &EPoint) -> bool {
    match to_pt(p) {
        None => true,
        Some((x, y)) => &y * &y == &x * &x * &x + rat(a) * &x + rat(b),
    }
}

pub fn oracle_add(a: &Rational, p: &Pt, q: &Pt) -> Pt {
    let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
        return p.clone().or_else(|| q.clone());
    };
    let lambda = if x1 != x2 {
        (y2 - y1) / (x2 - x1)
    } else if y1 == y2 && !y1.is_zero() {
        (rat(3) * x1 * x1 + a) / (rat(2) * y1)
    } else {
        return None;
    };
    let x3 = &lambda * &lambda - x1 - x2;
    let y3 = &lambda * (x1 - &x3) - y1;
    Some((x3, y3))
}

/// Order of `p` if it is at most `max`.
pub fn oracle_torsion_order(c: &Curve, p: &EPoint, max: u32) -> Option<u32> {
    let a = Rational::from_integer(c.a.clone());
    let p = to_pt(p);
    let mut q = p.clone();
    for k in 1..=max {
        if q.is_none() {
            return Some(k);
        }
        q = oracle_add(&a, &q, &p);
    }
    None
}

/// `ln max(|num|, |den|)` of the x-coordinate of `2^k p`, by repeated doubling.
pub fn oracle_naive_heights(c: &Curve, p: &EPoint, depth: u32) -> Vec<f64> {
    let a = Rational::from_integer(c.a.clone());
    let mut q = to_pt(p);
    let mut out = Vec::new();
    for _ in 0..=depth {
        let (x, _) = q.clone().expect("non-torsion orbit");
        out.push(ln_big(x.numer()).max(ln_big(x.denom())));
        q = oracle_add(&a, &q, &q);
    }
    out
}

pub fn ln_big(n: &BigInt) -> f64 {
    let s = n.abs().to_string();
    if s == "0" {
        return 0.0;
    }
    let head: f64 = s[..s.len().min(17)].parse().unwrap();
    head.ln() + (s.len().saturating_sub(17)) as f64 * std::f64::consts::LN_10
}

// ---- heights under coordinatewise power maps ----

/// Ratio estimator `h_n / h_{n-1}` for `(x:y) -> (x^d : y^d)` on a product of two P^1.
pub fn oracle_power_alpha(start: [(i64, i64); 2], degs: [u32; 2], n: usize) -> f64 {
    let mut pts: Vec<(BigInt, BigInt)> = start.iter().map(|&(x, y)| (BigInt::from(x), BigInt::from(y))).collect();
    let h = |pts: &[(BigInt, BigInt)]| pts.iter().map(|(x, y)| ln_big(x).max(ln_big(y))).sum::<f64>();
    let mut hs = vec![h(&pts)];
    for _ in 0..n {
        for (p, &d) in pts.iter_mut().zip(&degs) {
            *p = (num_traits::pow(p.0.clone(), d as usize), num_traits::pow(p.1.clone(), d as usize));
        }
        hs.push(h(&pts));
    }
    hs[n] / hs[n - 1]
}
