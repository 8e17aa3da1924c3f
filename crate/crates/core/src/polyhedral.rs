//! Exact polyhedral primitives over the rationals.
//!
//! [`feasible_nonneg`] decides `{x >= 0 : A x = b}` with a phase-one simplex
//! using Bland's rule (no cycling, no floating point). [`extreme_rays`] runs
//! the double description method on a pointed cone `{x : L x >= 0}`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{primitive_direction, Rational};
use crate::ratmat::{dot, RatMatrix};

/// Returns a nonnegative solution of `a x = b`, or `None` if there is none.
pub fn feasible_nonneg(a: &RatMatrix, b: &[Rational]) -> Result<Option<Vec<Rational>>> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::Shape(format!("right-hand side of length {} for {m} rows", b.len())));
    }
    // Tableau rows: [A | I | b] with rows negated so b >= 0; columns n..n+m are artificials.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let neg = b[i].is_negative();
            let mut row = Vec::with_capacity(width);
            for j in 0..n {
                row.push(if neg { -a[(i, j)].clone() } else { a[(i, j)].clone() });
            }
            for k in 0..m {
                row.push(if k == i { Rational::one() } else { Rational::zero() });
            }
            row.push(b[i].abs());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Phase-one objective: minimise the sum of artificials. Reduced costs row.
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width - 1] -= &row[width - 1];
    }
    // Bland: lowest-index column with negative reduced cost.
    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let r = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => r < *lr || (r == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, r));
                }
            }
        }
        let Some((p, _)) = leave else {
            // Phase one is bounded below by zero, so this cannot happen.
            return Err(Error::Consistency("unbounded phase-one simplex".into()));
        };
        pivot(&mut t, &mut cost, p, enter);
        basis[p] = enter;
    }
    if !cost[width - 1].is_zero() {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    Ok(Some(x))
}

fn pivot(t: &mut [Vec<Rational>], cost: &mut [Rational], p: usize, col: usize) {
    let inv = t[p][col].recip();
    for v in t[p].iter_mut() {
        *v *= &inv;
    }
    let prow = t[p].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != p && !row[col].is_zero() {
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= &f * pv;
            }
        }
    }
    if !cost[col].is_zero() {
        let f = cost[col].clone();
        for (v, pv) in cost.iter_mut().zip(&prow) {
            *v -= &f * pv;
        }
    }
}

/// Is `v` a nonnegative combination of `gens`?
pub fn in_cone(gens: &[Vec<Rational>], v: &[Rational]) -> Result<bool> {
    if gens.is_empty() {
        return Ok(v.iter().all(Zero::is_zero));
    }
    let a = RatMatrix::from_columns(gens, v.len())?;
    Ok(feasible_nonneg(&a, v)?.is_some())
}

/// Extreme rays of the pointed cone `{x in Q^dim : row . x >= 0 for every row}`,
/// each scaled to a primitive integer vector, sorted lexicographically.
///
/// Errors with [`Error::Unsupported`] if the rows do not have full rank
/// (the cone then contains a line).
pub fn extreme_rays(rows: &[Vec<Rational>], dim: usize) -> Result<Vec<Vec<Rational>>> {
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Shape("constraint of wrong length".into()));
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    // Greedy choice of dim independent constraints for the initial simplicial cone.
    let mut chosen: Vec<usize> = Vec::new();
    for (i, _) in rows.iter().enumerate() {
        let mut trial: Vec<Vec<Rational>> = chosen.iter().map(|&k| rows[k].clone()).collect();
        trial.push(rows[i].clone());
        if RatMatrix::from_rows(trial)?.rank() == chosen.len() + 1 {
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    if chosen.len() < dim {
        return Err(Error::Unsupported("cone is not pointed (constraints have deficient rank)".into()));
    }
    let b = RatMatrix::from_rows(chosen.iter().map(|&k| rows[k].clone()).collect())?;
    let binv = b.inverse()?;
    let mut rays: Vec<Vec<Rational>> = (0..dim).map(|j| normalize(&binv.column(j))).collect();
    let mut processed: Vec<usize> = chosen.clone();

    for (h, row) in rows.iter().enumerate() {
        if chosen.contains(&h) {
            continue;
        }
        let vals: Vec<Rational> = rays.iter().map(|r| dot(row, r)).collect();
        let zero_sets: Vec<Vec<usize>> =
            rays.iter().map(|r| processed.iter().copied().filter(|&k| dot(&rows[k], r).is_zero()).collect()).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut next: Vec<Vec<Rational>> =
            (0..rays.len()).filter(|&i| !vals[i].is_negative()).map(|i| rays[i].clone()).collect();
        for &p in &pos {
            for &q in &neg {
                let common: Vec<usize> = zero_sets[p].iter().copied().filter(|k| zero_sets[q].contains(k)).collect();
                if common.len() + 2 < dim {
                    continue;
                }
                // Combinatorial adjacency: no third ray is tight on all of `common`.
                let adjacent = (0..rays.len())
                    .filter(|&r| r != p && r != q)
                    .all(|r| !common.iter().all(|k| zero_sets[r].contains(k)));
                if adjacent {
                    let new: Vec<Rational> =
                        rays[q].iter().zip(&rays[p]).map(|(xq, xp)| &vals[p] * xq - &vals[q] * xp).collect();
                    next.push(normalize(&new));
                }
            }
        }
        rays = next;
        processed.push(h);
    }
    rays.sort();
    rays.dedup();
    Ok(rays)
}

fn normalize(v: &[Rational]) -> Vec<Rational> {
    primitive_direction(v).into_iter().map(Rational::from_integer).collect()
}

/// A nonzero point of `{t : row . t >= 0}` if one exists, else `None`.
/// Handles non-pointed cones (any kernel vector of the constraint matrix qualifies).
pub fn nonzero_point(rows: &[Vec<Rational>], dim: usize) -> Result<Option<Vec<Rational>>> {
    if dim == 0 {
        return Ok(None);
    }
    if rows.is_empty() {
        let mut e = vec![Rational::zero(); dim];
        e[0] = Rational::one();
        return Ok(Some(e));
    }
    let m = RatMatrix::from_rows(rows.to_vec())?;
    if let Some(k) = m.kernel().into_iter().next() {
        return Ok(Some(normalize(&k)));
    }
    Ok(extreme_rays(rows, dim)?.into_iter().next())
}
