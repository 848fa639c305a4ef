use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::complex::Point;
use crate::config::SearchConfig;
use crate::error::Error;
use crate::norms::Side;
use crate::oracle::{uniqueness_scan, Region};
use crate::paths::local_distance;

#[test]
fn equal_half_planes_are_one_normed_plane() {
    let inst = build_glued_half_planes(0.3, 0.3).unwrap();
    let n = Norm::ellipsoidal(2, vec![1.0, 0.3, 0.3, 1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = SearchConfig::default();
    let at = |x: [f64; 2]| Point::new(if x[1] >= 0.0 { 0 } else { 1 }, x);
    for _ in 0..30 {
        let a = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let b = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let (d, _) = local_distance(&inst.complex, &at(a), &at(b), &cfg).unwrap();
        assert_relative_eq!(d, n.value(&[b[0] - a[0], b[1] - a[1]]), epsilon = 1e-9);
    }
}

#[test]
fn half_planes_have_different_tangents() {
    let inst = build_glued_half_planes(0.5, -0.5).unwrap();
    assert!(inst.warnings.is_empty());
    let up = inst.complex.face(0).norm.dir_deriv(&[1.0, 0.0], &[0.0, 1.0], Side::Plus).unwrap();
    let down = inst.complex.face(1).norm.dir_deriv(&[1.0, 0.0], &[0.0, 1.0], Side::Plus).unwrap();
    assert_relative_eq!(up, 0.5, epsilon = 1e-9);
    assert_relative_eq!(down, -0.5, epsilon = 1e-9);
    assert!(matches!(build_glued_half_planes(1.0, 0.0), Err(Error::Input(_))));
    let ill = build_glued_half_planes(0.999, -0.999).unwrap();
    assert_eq!(ill.warnings.iter().filter(|w| w.contains("ill-conditioned")).count(), 2);
}

#[test]
fn convexity_fails_only_for_different_norms() {
    let probe = ConvexityProbe { triangles: 40, ..ConvexityProbe::default() };
    let bad = measure_convexity_failure(&build_glued_half_planes(0.5, -0.5).unwrap(), &probe).unwrap();
    assert!(!bad.convexity_violations.is_empty());
    assert!(bad.worst_convexity_margin > 1e-6);
    // First variation: the kink at the origin has slopes -0.5 on both sides for x > 0.
    let w = bad.convexity_violations.iter().find(|w| w.foot == 1.0 && w.step == 0.02).unwrap();
    assert_relative_eq!(w.margin, 0.5 * 0.02, epsilon = 2e-4);
    let good = measure_convexity_failure(&build_glued_half_planes(0.5, 0.5).unwrap(), &probe).unwrap();
    assert!(good.convexity_violations.is_empty());
    assert!(good.busemann_violations.is_empty());
}

#[test]
fn one_sided_probe_sees_no_failure() {
    let probe = ConvexityProbe {
        centers: vec![0.5, -0.5],
        steps: vec![0.05, 0.2],
        triangles: 0,
        ..ConvexityProbe::default()
    };
    let r = measure_convexity_failure(&build_glued_half_planes(0.5, -0.5).unwrap(), &probe).unwrap();
    assert!(r.convexity_violations.is_empty());
}

#[test]
fn belt_builds_and_rejects_bad_patches() {
    let inst = build_belt(1.01, 0.3).unwrap();
    let w = inst.periodic.as_ref().unwrap().window(4).unwrap();
    assert!(w.validate().valid);
    assert_relative_eq!(inst.complex.face(1).norm.value(&[1.0, 1.0]), 2f64.sqrt(), epsilon = 1e-12);
    assert!(matches!(build_belt(1.01, 1.2), Err(Error::Input(_))));
    assert!(matches!(build_belt(0.9, 0.3), Err(Error::Input(_))));
    assert!(matches!(build_belt(2.0, 0.05), Err(Error::Construction(_))));
}

#[test]
fn flat_belt_keeps_vertical_lines() {
    let r = measure_asymptotics(&build_belt(1.0, 0.3).unwrap(), &[0.05, 0.0], 4, 13).unwrap();
    for t in &r.tracks {
        assert!(t.geodesic);
        for d in &t.deviations {
            assert!((d - t.offset.abs()).abs() < 1e-9, "{:?}", t.deviations);
        }
        assert_relative_eq!(t.ratio, 1.0, epsilon = 1e-9);
    }
}

#[test]
fn stretched_belt_contracts() {
    let r = measure_asymptotics(&build_belt(1.01, 0.3).unwrap(), &[0.05, 0.0], 4, 13).unwrap();
    let t = &r.tracks[0];
    assert!(t.geodesic && t.non_increasing && t.bounded, "{t:?}");
    assert!(t.ratio < 1.0 - 1e-4, "{t:?}");
    assert!(r.tracks[1].deviations.iter().all(|&d| d < 1e-9));
}

#[test]
fn long_window_shows_the_stable_rate() {
    let r = measure_asymptotics(&build_belt(1.01, 0.3).unwrap(), &[0.05], 10, 400).unwrap();
    let t = &r.tracks[0];
    assert!(t.non_increasing && t.geodesic, "{t:?}");
    assert!((t.ratio - 1.0 / 1.01).abs() < 2e-3, "{}", t.ratio);
}

#[test]
fn double_belt_validates() {
    let inst = build_double_belt(1.01, 0.3, 3, 1.0).unwrap();
    assert_eq!(inst.complex.faces().len(), 13);
}

#[test]
fn flag_fan() {
    let inst = build_russian_flag(0.3, 1.0).unwrap();
    assert!(!inst.complex.is_smooth());
    assert_relative_eq!(inst.complex.face(1).norm.value(&[1.0, 0.0]), 1.0, epsilon = 1e-15);
    let r = geodesic_fan(&inst, [0.0, 1.5], [0.0, -1.5], 11).unwrap();
    assert_relative_eq!(r.half_width, 0.3 / (1.0f64 - 0.09).sqrt(), epsilon = 1e-9);
    assert_eq!(r.members.len(), 11);
    assert!(r.all_geodesic && r.monotone && r.outside_fails, "{r:?}");
    assert!(r.spread > 1e-4);
    assert!(matches!(geodesic_fan(&inst, [0.0, 1.5], [0.1, -1.5], 11), Err(Error::Input(_))));
}

#[test]
fn gentle_corner_gives_narrow_fan() {
    let wide = geodesic_fan(&build_russian_flag(0.3, 1.0).unwrap(), [0.0, 1.5], [0.0, -1.5], 5).unwrap();
    let narrow = geodesic_fan(&build_russian_flag(0.01, 1.0).unwrap(), [0.0, 1.5], [0.0, -1.5], 5).unwrap();
    assert!(narrow.half_width < 0.05 * wide.half_width);
    assert!(matches!(build_russian_flag(0.0, 1.0), Err(Error::Input(_))));
}

#[test]
fn flag_scan_finds_ambiguity() {
    let inst = build_russian_flag(0.3, 1.0).unwrap();
    let region = Region::new([-0.5, -1.0, 0.5, 1.0]);
    let r = uniqueness_scan(&inst.complex, &region, 3.0, 12, 5, &SearchConfig::default()).unwrap();
    assert!(r.ambiguous > 0, "{r:?}");
}
