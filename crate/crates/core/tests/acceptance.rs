//! Acceptance suite: one PASS/FAIL line per criterion, then a single assertion.
//! Run with `cargo test -p arithdyn-core --test acceptance -- --nocapture`.

mod common;

use std::time::{Duration, Instant};

use arithdyn::abelian::counterexample_report;
use arithdyn::fan::Fan;
use arithdyn::heights::elliptic::{
    canonical_height, ec_double, exe_classify, nontorsion_fixtures, torsion_fixtures, Curve, EPoint,
};
use arithdyn::heights::{alpha_estimate, AlphaConfig, DynSystem, ProjPoint};
use arithdyn::rational::rat;
use arithdyn::ratmat::{IntMatrix, RatMatrix};
use arithdyn::toric_divisors::{
    class_group, is_nef, potential_arithmetic_degrees, pullback_divisor, pullback_matrix,
    realizability_report_equivariant, support_value, TDivisor,
};
use arithdyn::toric_endo::{eigen_fan_decomposition, is_simple, LatticeEndo, Simplicity};
use arithdyn::Rational;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome, u64);

fn check(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fixtures() -> Vec<(&'static str, Fan)> {
    ["p2", "p1xp1", "hirzebruch2", "p2xp1"].into_iter().map(|n| (n, Fan::bundled(n).unwrap())).collect()
}

fn counterexample(a: i64, b: i64, want: [i64; 3], nef: [bool; 3], realizable: &[i64], non: &[i64]) -> Outcome {
    let r = counterexample_report(a, b).map_err(|e| e.to_string())?;
    let vals: Vec<String> = r.eigenvalues.iter().map(|(l, _, _)| l.to_string()).collect();
    check(vals == want.map(|x| x.to_string()), format!("eigenvalues {vals:?}"))?;
    let flags: Vec<bool> = r.eigenvalues.iter().map(|(_, _, n)| *n).collect();
    check(flags == nef, format!("nef flags {flags:?}"))?;
    // Oracle: θ(α) = fᵀ α f computed on 2x2 matrices, eigen-relation and PSD test by hand.
    let f = [[a, 0], [0, b]];
    for ((l, class, _), expect_nef) in r.eigenvalues.iter().zip(nef) {
        let m = class.matrix();
        let alpha = [[m[(0, 0)].clone(), m[(0, 1)].clone()], [m[(1, 0)].clone(), m[(1, 1)].clone()]];
        let img = oracle_theta(&f, &alpha);
        let lam = Rational::from_integer(l.clone());
        for i in 0..2 {
            for j in 0..2 {
                check(img[i][j] == &alpha[i][j] * &lam, format!("class {} is not a {l}-eigenclass", class.label()))?;
            }
        }
        check(oracle_psd(&alpha) == expect_nef, format!("PSD oracle disagrees on {}", class.label()))?;
    }
    let rz: Vec<String> = r.realizable.iter().map(ToString::to_string).collect();
    let nr: Vec<String> = r.non_realizable.iter().map(ToString::to_string).collect();
    check(rz == realizable.iter().map(ToString::to_string).collect::<Vec<_>>(), format!("realizable {rz:?}"))?;
    check(nr == non.iter().map(ToString::to_string).collect::<Vec<_>>(), format!("non-realizable {nr:?}"))?;
    check(r.labels.iter().all(|l| !l.citations.is_empty()), "label without citation")?;
    Ok(format!("eigenvalues {vals:?}, realizable {rz:?}, non-realizable {nr:?}"))
}

fn criterion_1() -> Outcome {
    counterexample(3, 2, [9, 6, 4], [true, false, true], &[9, 1], &[6, 4])
}

fn criterion_2() -> Outcome {
    let r = counterexample_report(2, 1).map_err(|e| e.to_string())?;
    let vals: Vec<String> = r.eigenvalues.iter().map(|(l, _, _)| l.to_string()).collect();
    check(vals == ["4", "2", "1"], format!("eigenvalues {vals:?}"))?;
    let nr: Vec<String> = r.non_realizable.iter().map(ToString::to_string).collect();
    let rz: Vec<String> = r.realizable.iter().map(ToString::to_string).collect();
    check(
        nr.contains(&"2".to_string()) && !rz.contains(&"2".to_string()),
        format!("2 not marked non-realizable: {nr:?}"),
    )?;
    check(rz.contains(&"4".to_string()) && rz.contains(&"1".to_string()), format!("realizable {rz:?}"))?;
    Ok(format!("eigenvalues {vals:?}, non-realizable {nr:?}"))
}

fn criterion_3() -> Outcome {
    let c = Curve::new(0, -2).map_err(|e| e.to_string())?;
    let p = EPoint::from_i64(3, 5);
    let o = EPoint::Infinity;
    check(oracle_on_curve(0, -2, &p), "(3,5) is not on y^2 = x^3 - 2")?;
    check(oracle_torsion_order(&c, &p, 12).is_none(), "(3,5) has small order")?;
    let mut got = Vec::new();
    for (x, y, want, label) in [(&p, &o, 4, "a^2"), (&o, &p, 9, "b^2"), (&o, &o, 1, "1")] {
        let r = exe_classify(&c, 2, 3, x, y, 8, true).map_err(|e| e.to_string())?;
        check(r.alpha.to_string() == want.to_string() && r.label == label, format!("got {} ({})", r.alpha, r.label))?;
        check((r.numeric_estimate - want as f64).abs() <= 1e-2, format!("numeric {} vs {want}", r.numeric_estimate))?;
        got.push(format!("{label}={want} (numeric {:.5})", r.numeric_estimate));
    }
    Ok(got.join(", "))
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for (name, fan) in fixtures() {
        let endo = LatticeEndo::scalar(&fan, 2).map_err(|e| e.to_string())?;
        let act = pullback_matrix(&endo).map_err(|e| e.to_string())?;
        let rank = act.class_group.rank;
        check(
            act.matrix == RatMatrix::identity(rank).scale(&rat(2)),
            format!("{name}: {:?}", act.matrix.display_rows()),
        )?;
        // Oracle: each prime divisor pulls back to twice itself, via the hand-rolled support function.
        for r in 0..fan.ray_count() {
            let d = TDivisor::ray(&fan, r);
            let pd = pullback_divisor(&endo, &d).map_err(|e| e.to_string())?;
            let expect: Vec<Rational> = (0..fan.ray_count())
                .map(|s| {
                    -oracle_support(&fan, &d.coeffs, &ray_vec(&fan, s).iter().map(|x| x * rat(2)).collect::<Vec<_>>())
                })
                .collect();
            check(pd.coeffs == expect, format!("{name}: pullback of D{r}"))?;
        }
        notes.push(format!("{name}:2I_{rank}"));
    }
    Ok(notes.join(", "))
}

fn criterion_5() -> Outcome {
    let fan = Fan::bundled("p1xp1").unwrap();
    let endo = LatticeEndo::new(IntMatrix::diagonal(&[2, 3]), fan).map_err(|e| e.to_string())?;
    let d = eigen_fan_decomposition(&endo).map_err(|e| e.to_string())?;
    let eig: Vec<String> = d.eigenvalues().iter().map(ToString::to_string).collect();
    check(eig == ["2", "3"], format!("factor eigenvalues {eig:?}"))?;
    for f in &d.factors {
        let g = &f.factor.fan;
        check(g.dim == 1 && g.ray_count() == 2 && g.rays.iter().map(|r| r[0]).sum::<i64>() == 0, "factor is not P1")?;
    }
    let act = pullback_matrix(&endo).map_err(|e| e.to_string())?;
    let m = &act.matrix;
    let z = rat(0);
    check(m.rows() == 2 && m[(0, 1)] == z && m[(1, 0)] == z, format!("not diagonal: {:?}", m.display_rows()))?;
    let mut dv = vec![m[(0, 0)].clone(), m[(1, 1)].clone()];
    dv.sort();
    check(dv == [rat(2), rat(3)], format!("diagonal {:?}", m.display_rows()))?;
    let pd = potential_arithmetic_degrees(&act);
    let vals: Vec<Option<Rational>> = pd.iter().map(|p| p.value.clone()).collect();
    check(vals == [Some(rat(3)), Some(rat(2))], format!("potential degrees {vals:?}"))?;
    check(pd.iter().all(|p| p.nef.is_feasible()), "eigendivisor not nef")?;
    let rep = realizability_report_equivariant(&endo, 10, AlphaConfig::default()).map_err(|e| e.to_string())?;
    let mut got = Vec::new();
    for (w, (point, target)) in rep.witnesses.iter().zip([("((2:1),(1:1))", 2.0), ("((1:1),(2:1))", 3.0)]) {
        let shown = w.projective_point.as_ref().map(ToString::to_string).unwrap_or_default();
        check(shown == point, format!("witness {shown} instead of {point}"))?;
        let est = w.estimate.as_ref().ok_or("no estimate")?.estimate;
        check((est - target).abs() <= 1e-3, format!("alpha {est} at {point}"))?;
        // Oracle: the same orbit under the coordinatewise power map by hand.
        let oracle = oracle_power_alpha(if target == 2.0 { [(2, 1), (1, 1)] } else { [(1, 1), (2, 1)] }, [2, 3], 10);
        check((oracle - est).abs() <= 1e-9, format!("oracle alpha {oracle} vs {est}"))?;
        got.push(format!("{point} -> {est:.6}"));
    }
    check(rep.witnesses.len() == 2, format!("{} witnesses", rep.witnesses.len()))?;
    Ok(format!("factors {eig:?}, potential degrees [3, 2], witnesses {}", got.join(", ")))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    for (name, fan) in fixtures() {
        let oracle = oracle_product_splits(&fan);
        let got = is_simple(&fan).map_err(|e| e.to_string())?;
        match &got {
            Simplicity::Simple => check(oracle.is_empty(), format!("{name}: oracle finds {oracle:?}"))?,
            Simplicity::Decomposable(parts) => {
                let r1 = parts[0].ray_indices.clone();
                check(oracle.contains(&r1), format!("{name}: witness {r1:?} not among {oracle:?}"))?;
            }
        }
        let want_simple = matches!(name, "p2" | "hirzebruch2");
        check(got.is_simple() == want_simple, format!("{name}: simple = {}", got.is_simple()))?;
        notes.push(format!("{name}:{}", if want_simple { "simple" } else { "decomposable" }));
    }
    Ok(notes.join(", "))
}

fn criterion_7() -> Outcome {
    let fan = Fan::bundled("hirzebruch2").unwrap();
    let mut failing = Vec::new();
    for r in 0..fan.ray_count() {
        let d = TDivisor::ray(&fan, r);
        let lib = is_nef(&fan, &d).map_err(|e| e.to_string())?;
        check(lib == oracle_is_nef(&fan, &d.coeffs), format!("oracle disagrees on D{r}"))?;
        if !lib {
            failing.push(r);
        }
    }
    check(failing.len() == 1, format!("non-nef prime divisors {failing:?}"))?;
    // The failing divisor is the negative section: its ray is the sum of its neighbours over 2.
    let r = failing[0];
    let v = &fan.rays[r];
    let (prev, next) = (&fan.rays[(r + 3) % 4], &fan.rays[(r + 1) % 4]);
    check(prev[0] + next[0] == 2 * v[0] && prev[1] + next[1] == 2 * v[1], "non-nef ray is not the (-2)-curve")?;
    Ok(format!("non-nef prime divisors {failing:?}"))
}

fn criterion_8() -> Outcome {
    let tors = torsion_fixtures();
    for (c, p, order) in &tors {
        check(oracle_torsion_order(c, p, 12) == Some(*order), format!("fixture {p} has wrong order"))?;
        let h = canonical_height(c, p, 8).map_err(|e| e.to_string())?;
        check(h.torsion && h.value == 0.0, format!("h({p}) = {}", h.value))?;
    }
    let nt = nontorsion_fixtures(20);
    check(nt.len() == 20, "fewer than 20 nontorsion fixtures")?;
    let mut worst: f64 = 0.0;
    for (c, p) in &nt {
        check(oracle_torsion_order(c, p, 12).is_none(), format!("{p} is torsion"))?;
        let h1 = canonical_height(c, p, 8).map_err(|e| e.to_string())?;
        let h2 = canonical_height(c, &ec_double(c, p).map_err(|e| e.to_string())?, 8).map_err(|e| e.to_string())?;
        let gap = (h2.value - 4.0 * h1.value).abs();
        let bound = h2.error_bound + 4.0 * h1.error_bound;
        check(gap <= bound, format!("{p}: |h(2P) - 4h(P)| = {gap:.3e} > {bound:.3e}"))?;
        worst = worst.max(gap / bound.max(f64::MIN_POSITIVE));
    }
    Ok(format!("{} torsion fixtures at 0, 20 nontorsion within bounds (worst gap/bound {worst:.3})", tors.len()))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut counts = [0usize; 5];
    for (name, fan) in fixtures() {
        let endos = sample_endos(&fan);
        let cg = class_group(&fan).map_err(|e| e.to_string())?;
        for k in 0..100 {
            let e = &endos[k % endos.len()];
            let d: Vec<i64> = (0..fan.ray_count()).map(|_| rng.gen_range(-5..=5)).collect();
            let d = TDivisor::from_i64(&fan, &d).unwrap();
            let v: Vec<Rational> = (0..fan.dim).map(|_| rat(rng.gen_range(-30..=30))).collect();
            let pd = pullback_divisor(e, &d).map_err(|e| e.to_string())?;
            let lhs = oracle_support(&fan, &pd.coeffs, &v);
            let rhs = oracle_support(&fan, &d.coeffs, &e.image_rat(&v));
            check(lhs == rhs, format!("{name}: support composition at {v:?}"))?;
            check(support_value(&fan, &pd, &v).unwrap() == lhs, format!("{name}: library support value"))?;
            counts[0] += 1;
        }
        for _ in 0..25 {
            let f = &endos[rng.gen_range(0..endos.len())];
            let g = &endos[rng.gen_range(0..endos.len())];
            let fg = pullback_matrix(&f.compose(g).unwrap()).unwrap().matrix;
            let gf = pullback_matrix(g).unwrap().matrix.mul(&pullback_matrix(f).unwrap().matrix).unwrap();
            check(fg == gf, format!("{name}: (fg)* != g* f*"))?;
            let d = TDivisor::from_i64(&fan, &(0..fan.ray_count()).map(|_| rng.gen_range(-4..=4)).collect::<Vec<_>>())
                .unwrap();
            let a = cg.reduce(&pullback_divisor(&f.compose(g).unwrap(), &d).unwrap()).unwrap();
            let b = cg.reduce(&pullback_divisor(g, &pullback_divisor(f, &d).unwrap()).unwrap()).unwrap();
            check(a == b, format!("{name}: divisor-level contravariance"))?;
            counts[1] += 1;
        }
        for e in &endos {
            for m in 2..=3u32 {
                let base = potential_arithmetic_degrees(&pullback_matrix(e).unwrap());
                let iter = potential_arithmetic_degrees(&pullback_matrix(&e.pow(m).unwrap()).unwrap());
                let mut expect: Vec<Rational> =
                    base.iter().filter_map(|p| p.value.as_ref()).map(|v| num_traits::Pow::pow(v, m)).collect();
                expect.sort_by(|a, b| b.cmp(a));
                expect.dedup();
                let got: Vec<Rational> = iter.iter().filter_map(|p| p.value.clone()).collect();
                check(got == expect, format!("{name}: iteration law m = {m}: {got:?} vs {expect:?}"))?;
                counts[2] += 1;
            }
        }
    }
    for _ in 0..50 {
        let f = random_nonsingular_2x2(&mut rng);
        let g = random_nonsingular_2x2(&mut rng);
        let fg = mat_mul_2x2(&f, &g);
        let lhs = oracle_theta_matrix(&fg);
        let rhs = mat_mul_3x3(&oracle_theta_matrix(&g), &oracle_theta_matrix(&f));
        check(lhs == rhs, "oracle theta contravariance")?;
        let lib = arithdyn::abelian::theta_matrix(&to_ratmat(&fg)).unwrap().matrix;
        check(lib == to_ratmat3(&lhs), format!("library theta differs on {fg:?}"))?;
        counts[3] += 1;
    }
    let s1 = DynSystem::bundled("sum_squares_over_product").unwrap();
    let s2 = DynSystem::powers(&[(1, 3)]).unwrap();
    let cfg = AlphaConfig::default();
    for (q1, q2) in [([2, 1], [1000, 1]), ([1, 3], [50, 7])] {
        let a1 = alpha_estimate(&s1, &ProjPoint::from_i64(&[&q1]).unwrap(), 10, cfg).unwrap().estimate;
        let a2 = alpha_estimate(&s2, &ProjPoint::from_i64(&[&q2]).unwrap(), 10, cfg).unwrap().estimate;
        let prod =
            alpha_estimate(&s1.product(&s2), &ProjPoint::from_i64(&[&q1, &q2]).unwrap(), 10, cfg).unwrap().estimate;
        check((prod - a1.max(a2)).abs() <= 1e-2, format!("product rule: {prod} vs max({a1}, {a2})"))?;
        counts[4] += 1;
    }
    Ok(format!(
        "{} support checks, {} composition pairs, {} iteration checks, {} theta pairs, {} product-rule cases",
        counts[0], counts[1], counts[2], counts[3], counts[4]
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        (1, "counterexample eigenstructure", criterion_1, 1),
        (2, "degenerate case (2,1)", criterion_2, 1),
        (3, "E x E classifier", criterion_3, 10),
        (4, "scalar pullback law", criterion_4, 1),
        (5, "decomposition round-trip", criterion_5, 5),
        (6, "simplicity oracle", criterion_6, 5),
        (7, "Hirzebruch non-nef witness", criterion_7, 1),
        (8, "canonical-height properties", criterion_8, 30),
        (9, "property suites", criterion_9, 60),
    ];
    let mut failed = Vec::new();
    for (id, name, f, limit) in criteria {
        let t = Instant::now();
        let out = f();
        let elapsed = t.elapsed();
        let out = match out {
            Ok(d) if elapsed > Duration::from_secs(limit) => Err(format!("{d}; took {elapsed:.2?}, limit {limit}s")),
            o => o,
        };
        match &out {
            Ok(d) => println!("PASS criterion {id} ({name}): {d} [{elapsed:.2?}]"),
            Err(e) => {
                println!("FAIL criterion {id} ({name}): {e} [{elapsed:.2?}]");
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
