use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;

fn flag_norm(b: f64) -> Norm {
    Norm::max_of(vec![
        Norm::ellipsoidal(2, vec![1.0, b, b, 1.0]).unwrap(),
        Norm::ellipsoidal(2, vec![1.0, -b, -b, 1.0]).unwrap(),
    ])
    .unwrap()
}

fn central_diff(n: &Norm, v: &[f64], h: f64) -> Vec<f64> {
    (0..v.len())
        .map(|i| {
            let mut a = v.to_vec();
            let mut b = v.to_vec();
            a[i] += h;
            b[i] -= h;
            (n.value(&a) - n.value(&b)) / (2.0 * h)
        })
        .collect()
}

#[test]
fn eval_examples() {
    assert_eq!(Norm::lp(2, 2.0).unwrap().eval(&[3.0, 4.0]).unwrap(), 5.0);
    let e = Norm::ellipsoidal(2, vec![1.0, 0.0, 0.0, 4.0]).unwrap();
    assert_eq!(e.eval(&[0.0, 1.0]).unwrap(), 2.0);
    let l3 = Norm::lp(2, 3.0).unwrap();
    // direct formula (|1|^3 + |1|^3)^(1/3)
    assert_relative_eq!(l3.eval(&[1.0, 1.0]).unwrap(), 2f64.powf(1.0 / 3.0), max_relative = 1e-15);
}

#[test]
fn eval_rejects_dimension_mismatch() {
    let n = Norm::euclidean(2);
    assert!(matches!(n.eval(&[1.0, 2.0, 3.0]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn grad_examples() {
    assert_eq!(Norm::euclidean(2).grad(&[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    let e = Norm::ellipsoidal(2, vec![1.0, 0.0, 0.0, 4.0]).unwrap();
    assert_eq!(e.grad(&[0.0, 1.0]).unwrap(), vec![0.0, 2.0]);
    let l3 = Norm::lp(2, 3.0).unwrap();
    let g = l3.grad(&[1.0, 1.0]).unwrap();
    let expected = 2f64.powf(1.0 / 3.0) / 2.0;
    let fd = central_diff(&l3, &[1.0, 1.0], 1e-6);
    for i in 0..2 {
        assert_relative_eq!(g[i], expected, max_relative = 1e-14);
        assert_relative_eq!(fd[i], expected, max_relative = 1e-8);
    }
}

#[test]
fn grad_errors() {
    assert_eq!(Norm::euclidean(2).grad(&[0.0, 0.0]), Err(Error::ZeroVector));
    let f = flag_norm(0.3);
    assert!(matches!(f.grad(&[0.0, 1.0]), Err(Error::NonSmoothPoint { .. })));
    assert!(f.grad(&[0.3, 1.0]).is_ok());
}

#[test]
fn dir_deriv_examples() {
    let e = Norm::euclidean(2);
    for side in [Side::Plus, Side::Minus] {
        assert_eq!(e.dir_deriv(&[1.0, 0.0], &[0.0, 1.0], side).unwrap(), 0.0);
    }
    // Corner of a max of two ellipses crossing at the vertical direction:
    // each side comes from the ellipse active on that side.
    let b = 0.3;
    let f = flag_norm(b);
    let plus = f.dir_deriv(&[0.0, 1.0], &[1.0, 0.0], Side::Plus).unwrap();
    let minus = f.dir_deriv(&[0.0, 1.0], &[1.0, 0.0], Side::Minus).unwrap();
    assert_relative_eq!(plus, b, max_relative = 1e-14);
    assert_relative_eq!(minus, -b, max_relative = 1e-14);
    let h = 1e-7;
    let fd_plus = (f.value(&[h, 1.0]) - f.value(&[0.0, 1.0])) / h;
    let fd_minus = (f.value(&[0.0, 1.0]) - f.value(&[-h, 1.0])) / h;
    assert_relative_eq!(plus, fd_plus, max_relative = 1e-5);
    assert_relative_eq!(minus, fd_minus, max_relative = 1e-5);
    assert_eq!(f.dir_deriv(&[0.0, 0.0], &[1.0, 0.0], Side::Plus), Err(Error::ZeroVector));
}

#[test]
fn dir_deriv_along_v_is_the_value() {
    let n = Norm::lp(2, 3.0).unwrap();
    let v = [0.3, -0.8];
    for side in [Side::Plus, Side::Minus] {
        assert_relative_eq!(n.dir_deriv(&v, &v, side).unwrap(), n.value(&v), max_relative = 1e-12);
    }
}

#[test]
fn orth_complement_examples() {
    let e = Norm::euclidean(2);
    let b = e.orth_complement_basis(&[1.0, 0.0]).unwrap();
    assert_eq!(b.len(), 1);
    assert!(b[0][0].abs() < 1e-15 && (b[0][1].abs() - 1.0).abs() < 1e-15);

    let q = Norm::ellipsoidal(2, vec![1.0, 0.0, 0.0, 4.0]).unwrap();
    let b = q.orth_complement_basis(&[1.0, 0.0]).unwrap();
    assert!(b[0][0].abs() < 1e-15);

    let l3 = Norm::lp(2, 3.0).unwrap();
    let c = 2f64.powf(-1.0 / 3.0);
    let v = [c, c];
    let w = &l3.orth_complement_basis(&v).unwrap()[0];
    let g = l3.grad(&v).unwrap();
    assert!((g[0] * w[0] + g[1] * w[1]).abs() < 1e-9);
    assert_relative_eq!(w[0], -w[1], max_relative = 1e-12);

    let f = flag_norm(0.3);
    assert!(matches!(
        f.orth_complement_basis(&[0.0, 1.0]),
        Err(Error::NonSmoothPoint { .. })
    ));
}

#[test]
fn orth_complement_is_not_symmetric() {
    let n = Norm::lp(2, 3.0).unwrap();
    let v = [1.0 / n.value(&[1.0, 0.5]), 0.5 / n.value(&[1.0, 0.5])];
    let w = n.orth_direction_2d(v).unwrap();
    let wu: Vec<f64> = w.iter().map(|x| x / n.value(&w)).collect();
    let back = n.grad(&wu).unwrap();
    assert!((back[0] * v[0] + back[1] * v[1]).abs() > 1e-3);
}

#[test]
fn verify_norm_examples() {
    let r = verify_norm(&Norm::euclidean(2), 400, 1e-12);
    assert!(r.strictly_convex && r.smooth, "{r:?}");

    let r = verify_norm(&flag_norm(0.3), 400, 1e-12);
    assert!(r.strictly_convex, "{r:?}");
    assert!(!r.smooth, "{r:?}");
    let at = r.corner_witness.unwrap();
    // corners sit on the coordinate axes
    assert!(at[0].abs() < 1e-6 || at[1].abs() < 1e-6, "{at:?}");

    struct L1;
    impl Gauge for L1 {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, v: &[f64]) -> f64 {
            v[0].abs() + v[1].abs()
        }
    }
    let r = verify_norm(&L1, 400, 1e-12);
    assert!(!r.strictly_convex);
    assert!(r.segment_witness.is_some());
}

#[test]
fn verify_norm_catches_concave_dent() {
    // A deep narrow dent breaks convexity.
    let n = Norm::cone_patched(Norm::euclidean(2), &[1.0, 1.0], 0.1, 0.6).unwrap();
    let r = verify_norm(&n, 2000, 1e-12);
    assert!(!r.convex, "{r:?}");
    // A shallow wide one does not.
    let n = Norm::cone_patched(Norm::euclidean(2), &[1.0, 1.0], 0.5, 0.99).unwrap();
    let r = verify_norm(&n, 2000, 1e-12);
    assert!(r.strictly_convex && r.smooth, "{r:?}");
}

#[test]
fn verify_norm_is_deterministic() {
    let n = Norm::lp(3, 2.5).unwrap();
    assert_eq!(verify_norm_seeded(&n, 300, 1e-12, 9), verify_norm_seeded(&n, 300, 1e-12, 9));
}

#[test]
fn cone_patch_hits_target_and_leaves_outside_alone() {
    let base = Norm::ellipsoidal(2, vec![1.0201, 0.0, 0.0, 1.0]).unwrap();
    let n = Norm::cone_patched(base.clone(), &[1.0, 1.0], 0.3, 1.0).unwrap();
    let u = [std::f64::consts::FRAC_1_SQRT_2; 2];
    assert_relative_eq!(n.value(&u), 1.0, max_relative = 1e-15);
    assert_relative_eq!(n.value(&[-u[0], -u[1]]), 1.0, max_relative = 1e-15);
    for v in [[0.0, 1.0], [1.0, 0.0], [1.0, -1.0], [0.2, 1.0]] {
        assert_eq!(n.value(&v), base.value(&v));
    }
    let g = n.grad(&[1.0, 0.9]).unwrap();
    let fd = central_diff(&n, &[1.0, 0.9], 1e-7);
    assert_relative_eq!(g[0], fd[0], max_relative = 1e-6);
    assert_relative_eq!(g[1], fd[1], max_relative = 1e-6);
}

#[test]
fn pullback_matches_ambient() {
    let amb = Norm::lp(3, 3.0).unwrap();
    let a = vec![1.0, 0.0, 0.0, 1.0, 0.5, -0.5];
    let n = Norm::pullback(amb.clone(), 2, a).unwrap();
    assert_relative_eq!(n.value(&[1.0, 2.0]), amb.value(&[1.0, 2.0, -0.5]), max_relative = 1e-15);
    assert!(Norm::pullback(amb, 2, vec![1.0, 2.0, 2.0, 4.0, 0.0, 0.0]).is_err());
}

#[test]
fn constructor_errors() {
    assert!(Norm::lp(2, 1.0).is_err());
    assert!(Norm::ellipsoidal(2, vec![1.0, 2.0, 2.0, 1.0]).is_err());
    assert!(Norm::euclidean_scaled(2, 0.0).is_err());
    assert!(Norm::max_of(vec![Norm::euclidean(2)]).is_err());
}

#[test]
fn json_roundtrip() {
    let n = Norm::cone_patched(
        Norm::pullback(flag_norm(0.2), 2, vec![1.0, 0.0, 0.3, 1.0]).unwrap(),
        &[0.0, 1.0],
        0.2,
        1.1,
    )
    .unwrap();
    let s = serde_json::to_string(&n).unwrap();
    let back: Norm = serde_json::from_str(&s).unwrap();
    assert_eq!(back, n);
    let lp: Norm = serde_json::from_str(r#"{"type":"lp","dim":2,"p":3}"#).unwrap();
    assert_eq!(lp, Norm::lp(2, 3.0).unwrap());
    let bad = serde_json::from_str::<Norm>(r#"{"type":"lp","dim":2,"p":0.5}"#);
    assert!(bad.is_err());
}

fn any_norm() -> impl Strategy<Value = Norm> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|s| Norm::euclidean_scaled(2, s).unwrap()),
        (1.2f64..6.0).prop_map(|p| Norm::lp(2, p).unwrap()),
        (0.3f64..3.0, -0.9f64..0.9, 0.3f64..3.0).prop_map(|(a, r, c)| {
            let b = r * (a * c).sqrt();
            Norm::ellipsoidal(2, vec![a, b, b, c]).unwrap()
        }),
        (0.05f64..0.9).prop_map(flag_norm),
        (0.3f64..0.5, 0.995f64..1.005).prop_map(|(t, k)| {
            let base = Norm::lp(2, 3.0).unwrap();
            let d = [1.0, 0.4];
            let target = k * base.value(&d) / (1.16f64).sqrt();
            Norm::cone_patched(base, &d, t, target).unwrap()
        }),
    ]
}

fn vec2() -> impl Strategy<Value = [f64; 2]> {
    [-10.0f64..10.0, -10.0f64..10.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn homogeneity(n in any_norm(), v in vec2()) {
        let base = n.value(&v);
        for t in [0.5, 2.0, 10.0] {
            let tv = [t * v[0], t * v[1]];
            prop_assert!((n.value(&tv) - t * base).abs() <= 1e-12 * (t * base).max(1e-300));
        }
        prop_assert_eq!(n.value(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn triangle_inequality(n in any_norm(), a in vec2(), b in vec2()) {
        let s = [a[0] + b[0], a[1] + b[1]];
        prop_assert!(n.value(&s) <= n.value(&a) + n.value(&b) + 1e-12 * (n.value(&a) + n.value(&b)));
    }

    #[test]
    fn euler_relation(n in any_norm(), v in vec2()) {
        prop_assume!(v[0].abs() + v[1].abs() > 1e-3);
        let mut g = [0.0; 2];
        n.subgradient_into(&v, &mut g);
        prop_assert!((g[0] * v[0] + g[1] * v[1] - n.value(&v)).abs() <= 1e-9 * n.value(&v));
    }

    #[test]
    fn one_sided_order(n in any_norm(), v in vec2(), w in vec2()) {
        prop_assume!(v[0].abs() + v[1].abs() > 1e-3);
        let p = n.dir_deriv(&v, &w, Side::Plus).unwrap();
        let m = n.dir_deriv(&v, &w, Side::Minus).unwrap();
        prop_assert!(p >= m - 1e-12 * (1.0 + p.abs()));
        if n.is_smooth() {
            prop_assert!((p - m).abs() <= 1e-9 * (1.0 + p.abs()));
        }
    }

    #[test]
    fn max_is_pointwise_max(b in 0.05f64..0.9, v in vec2()) {
        let f = flag_norm(b);
        if let Norm::MaxOfEllipsoidal { parts, .. } = &f {
            let m = parts.iter().map(|p| p.value(&v)).fold(0.0, f64::max);
            prop_assert_eq!(f.value(&v), m);
        }
    }

    #[test]
    fn patch_is_exact_outside_cone(t in 0.05f64..0.6, k in 0.9f64..1.1, ang in 0.0f64..std::f64::consts::TAU) {
        let base = Norm::lp(2, 2.5).unwrap();
        let dir = [1.0, 2.0];
        let n = Norm::cone_patched(base.clone(), &dir, t, k).unwrap();
        let v = [ang.cos(), ang.sin()];
        let c = (v[0] * dir[0] + v[1] * dir[1]).abs() / 5f64.sqrt();
        prop_assume!(c.min(1.0).acos() > t + 1e-12);
        prop_assert_eq!(n.value(&v), base.value(&v));
    }
}
