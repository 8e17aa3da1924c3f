mod common;

use arithdyn::abelian::{
    counterexample_report, general_isogeny_report, is_ample_class, is_nef_class, require_supported_algebra,
    theta_apply, theta_matrix, SymClass,
};
use arithdyn::rational::rat;
use arithdyn::{ErrorKind, Rational};
use common::*;
use proptest::prelude::*;

fn m2() -> impl Strategy<Value = M2> {
    proptest::array::uniform2(proptest::array::uniform2(-5i64..=5))
        .prop_filter("isogeny", |m| m[0][0] * m[1][1] != m[0][1] * m[1][0])
}

fn class() -> impl Strategy<Value = SymClass> {
    (-6i64..=6, -6i64..=6, -6i64..=6).prop_map(|(p, q, r)| SymClass::from_i64(p, q, r))
}

fn as_array(c: &SymClass) -> [[Rational; 2]; 2] {
    let m = c.matrix();
    [[m[(0, 0)].clone(), m[(0, 1)].clone()], [m[(1, 0)].clone(), m[(1, 1)].clone()]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn theta_matches_oracle(f in m2(), c in class()) {
        let got = theta_apply(&to_ratmat(&f), &c).unwrap();
        let want = oracle_theta(&f, &as_array(&c));
        prop_assert_eq!(as_array(&got), want);
        prop_assert_eq!(theta_matrix(&to_ratmat(&f)).unwrap().matrix, to_ratmat3(&oracle_theta_matrix(&f)));
    }

    #[test]
    fn theta_is_contravariant(f in m2(), g in m2()) {
        let fg = mat_mul_2x2(&f, &g);
        let lhs = theta_matrix(&to_ratmat(&fg)).unwrap().matrix;
        let rhs = theta_matrix(&to_ratmat(&g)).unwrap().matrix.mul(&theta_matrix(&to_ratmat(&f)).unwrap().matrix).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn theta_determinant_is_cube(f in m2()) {
        let d = rat(f[0][0] * f[1][1] - f[0][1] * f[1][0]);
        let t = oracle_theta_matrix(&f);
        let rows: Vec<Vec<Rational>> = t.iter().map(|r| r.to_vec()).collect();
        prop_assert_eq!(det_cofactor(&rows), &d * &d * &d);
        prop_assert_eq!(theta_matrix(&to_ratmat(&f)).unwrap().matrix.det().unwrap(), &d * &d * &d);
    }

    #[test]
    fn nef_is_psd(c in class()) {
        prop_assert_eq!(is_nef_class(&c), oracle_psd(&as_array(&c)));
        if is_ample_class(&c) {
            prop_assert!(is_nef_class(&c));
        }
    }

    #[test]
    fn nef_cone_axioms(a in class(), b in class(), s in 1i64..=5, f in m2()) {
        if is_nef_class(&a) && is_nef_class(&b) {
            prop_assert!(is_nef_class(&a.add(&b)));
            prop_assert!(is_nef_class(&a.scale(&rat(s))));
            prop_assert!(is_nef_class(&theta_apply(&to_ratmat(&f), &a).unwrap()));
            if a.coords().iter().any(|x| *x != rat(0)) {
                prop_assert!(!is_nef_class(&a.neg()));
            }
        }
    }

    #[test]
    fn diagonal_eigenvalues(a in 2i64..=9, b in 1i64..=8) {
        prop_assume!(a > b);
        let r = counterexample_report(a, b).unwrap();
        let vals: Vec<String> = r.eigenvalues.iter().map(|(l, _, _)| l.to_string()).collect();
        prop_assert_eq!(vals, vec![(a * a).to_string(), (a * b).to_string(), (b * b).to_string()]);
        let nef: Vec<bool> = r.eigenvalues.iter().map(|(_, _, n)| *n).collect();
        prop_assert_eq!(nef, vec![true, false, true]);
        prop_assert!(r.non_realizable.iter().any(|x| x.to_string() == (a * b).to_string()));
        prop_assert!(r.realizable.iter().any(|x| x.to_string() == (a * a).to_string()));
    }
}

#[test]
fn only_matrix_algebra_is_supported() {
    assert!(require_supported_algebra("m2q").is_ok());
    assert_eq!(require_supported_algebra("quaternion").unwrap_err().kind(), ErrorKind::Unsupported);
}

#[test]
fn singular_maps_are_rejected() {
    assert!(theta_matrix(&to_ratmat(&[[1, 2], [2, 4]])).is_err());
    assert!(counterexample_report(2, 2).is_err());
}

#[test]
fn general_report_labels_cite() {
    let r = general_isogeny_report(&to_ratmat(&[[2, 1], [0, 3]]), true).unwrap();
    assert!(r.labels.iter().all(|l| !l.citations.is_empty()));
}
