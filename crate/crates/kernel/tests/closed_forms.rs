use std::f64::consts::PI;

use proptest::prelude::*;
use udw_kernel::*;

fn pair(kind: ShapeKind, x: f64, t: f64, li: f64, lj: f64) -> (DetectorSpec, DetectorSpec) {
    let sh = SmearingShape::new(kind, 1.0).unwrap();
    (
        DetectorSpec::new("i", [0.0; 3], 0.0, li, 1.0, sh).unwrap(),
        DetectorSpec::new("j", [x, 0.0, 0.0], t, lj, 1.0, sh).unwrap(),
    )
}

// Reference values from the position-space brute-force path (numeric convolution, shell average,
// paired principal value), independent of the closed forms.
const FROZEN: &[(ShapeKind, f64, f64, f64, f64)] = &[
    (ShapeKind::HardSphere, 0.5, 0.5, 1.865_178_879_040, 1.973_969_766_272),
    (ShapeKind::HardSphere, 1.0, 0.5, 1.447_340_368_913, 1.060_421_258_369),
    (ShapeKind::HardSphere, 1.0, 1.0, 0.457_102_905_213_6, 1.503_976_964_779),
    (ShapeKind::HardSphere, 0.0, 1.2, -0.838_686_741_563_5, 1.876_963_252_044),
    (ShapeKind::HardSphere, 3.0, 2.0, 0.364_943_782_881_2, 0.172_330_693_880_9),
    (ShapeKind::HardSphere, 4.0, 5.0, -0.210_873_034_836_0, 0.129_248_020_410_7),
    (ShapeKind::Gaussian, 0.5, 0.5, 0.677_302_474_878_5, 0.312_822_932_566_7),
    (ShapeKind::Gaussian, 1.0, 0.5, 0.608_667_778_168_8, 0.261_368_047_879_8),
    (ShapeKind::Gaussian, 1.0, 1.0, 0.429_325_331_050_1, 0.446_976_733_675_1),
    (ShapeKind::Gaussian, 0.0, 1.2, 0.343_317_084_514_9, 0.591_997_993_485_8),
    (ShapeKind::Gaussian, 3.0, 2.0, 0.172_215_431_707_7, 0.183_110_092_564_2),
    (ShapeKind::Gaussian, 4.0, 5.0, -0.061_905_424_193_96, 0.137_673_828_442_0),
];

#[test]
fn closed_forms_match_frozen_brute_force_values() {
    for &(kind, x, t, z, xi) in FROZEN {
        let (a, b) = pair(kind, x, t, 1.0, 1.0);
        let zc = zeta_overlap(&a, &b).unwrap();
        let xc = xi_overlap(&a, &b).unwrap();
        assert!((zc - z).abs() < 1e-9 * z.abs().max(0.1), "{kind:?} ({x},{t}) zeta {zc} vs {z}");
        assert!((xc - xi).abs() < 1e-9 * xi.abs().max(0.1), "{kind:?} ({x},{t}) xi {xc} vs {xi}");
    }
}

#[test]
fn self_overlaps() {
    let (a, _) = pair(ShapeKind::HardSphere, 0.0, 0.0, 1.0, 1.0);
    assert!((zeta_overlap(&a, &a).unwrap() - 9.0 / (2.0 * PI).sqrt()).abs() < 1e-12);
    let (g, _) = pair(ShapeKind::Gaussian, 0.0, 0.0, 1.0, 1.0);
    assert!((zeta_overlap(&g, &g).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-10);
}

#[test]
fn gaussian_xi_at_unit_separation() {
    let (a, b) = pair(ShapeKind::Gaussian, 1.0, 1.0, 1.0, 1.0);
    assert!((xi_overlap(&a, &b).unwrap() - (1.0 - (-1f64).exp()) / 2f64.sqrt()).abs() < 1e-15);
    assert!((xi_overlap(&a, &b).unwrap() - 0.446_977).abs() < 1e-6);
}

#[test]
fn hard_sphere_xi_on_the_null_line() {
    // The value at |X| = T = 0.57673σ, where ξ peaks along |X| = T.
    let (a, b) = pair(ShapeKind::HardSphere, 0.57673, 0.57673, 1.0, 1.0);
    assert!((xi_overlap(&a, &b).unwrap() - 2.002_089_5).abs() < 1e-6);
}

#[test]
fn hard_sphere_xi_spacelike_is_zero() {
    let (a, b) = pair(ShapeKind::HardSphere, 5.0, 1.0, 1.0, 1.0);
    assert_eq!(xi_overlap(&a, &b).unwrap(), 0.0);
}

#[test]
fn gaussian_xi_limit_on_axis() {
    for t in [0.3, 1.0, 2.5] {
        let expect = t * (-t * t / 4.0f64).exp() / 2f64.sqrt();
        for x in [0.0, 1e-8, 1e-6] {
            let g = xi_geometric(ShapeKind::Gaussian, x, t);
            assert!((g - expect).abs() < 1e-12 * expect + 1e-13, "{x} {t}");
        }
    }
}

#[test]
fn scale_with_sigma() {
    // Doubling σ and every length leaves geometric factors unchanged and scales ζ, ξ by 1/σ².
    let s1 = SmearingShape::hard_sphere(1.0).unwrap();
    let s2 = SmearingShape::hard_sphere(2.0).unwrap();
    let a1 = DetectorSpec::new("a", [0.0; 3], 0.0, 1.0, 1.0, s1).unwrap();
    let b1 = DetectorSpec::new("b", [0.7, 0.0, 0.0], 0.9, 1.0, 1.0, s1).unwrap();
    let a2 = DetectorSpec::new("a", [0.0; 3], 0.0, 1.0, 1.0, s2).unwrap();
    let b2 = DetectorSpec::new("b", [1.4, 0.0, 0.0], 1.8, 1.0, 1.0, s2).unwrap();
    assert!((4.0 * xi_overlap(&a2, &b2).unwrap() - xi_overlap(&a1, &b1).unwrap()).abs() < 1e-14);
    assert!((4.0 * zeta_overlap(&a2, &b2).unwrap() - zeta_overlap(&a1, &b1).unwrap()).abs() < 1e-10);
}

#[test]
fn overlap_set_tables() {
    let sh = SmearingShape::gaussian(1.0).unwrap();
    let ds = vec![
        DetectorSpec::new("a", [0.0; 3], 0.0, 1.0, 1.0, sh).unwrap(),
        DetectorSpec::new("b", [1.0, 0.0, 0.0], 1.0, 0.5, 1.0, sh).unwrap(),
        DetectorSpec::new("c", [0.0, 2.0, 0.0], 0.5, 2.0, 1.0, sh).unwrap(),
    ];
    let set = OverlapSet::compute(&ds, &QuadConfig::default()).unwrap();
    for p in ["a", "b", "c"] {
        for q in ["a", "b", "c"] {
            assert_eq!(set.zeta(p, q).unwrap(), set.zeta(q, p).unwrap());
            assert_eq!(set.xi(p, q).unwrap(), -set.xi(q, p).unwrap());
            let bound = set.zeta_self(p).unwrap().max(set.zeta_self(q).unwrap());
            assert!(set.zeta(p, q).unwrap().abs() <= bound && set.xi(p, q).unwrap().abs() <= bound);
        }
        assert!(set.zeta_self(p).unwrap() >= 0.0);
    }
    assert!(matches!(set.zeta("a", "zz"), Err(KernelError::UnknownLabel(_))));
    let dup = vec![ds[0].clone(), ds[0].clone()];
    assert!(matches!(OverlapSet::compute(&dup, &QuadConfig::default()), Err(KernelError::DuplicateLabel(_))));
}

fn kinds() -> impl Strategy<Value = ShapeKind> {
    prop_oneof![Just(ShapeKind::HardSphere), Just(ShapeKind::Gaussian)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn swapping_detectors_is_exact(kind in kinds(), x in 0.0..5.0f64, y in -2.0..2.0f64, t in -5.0..5.0f64,
                                   li in 0.1..3.0f64, lj in 0.1..3.0f64) {
        let sh = SmearingShape::new(kind, 1.0).unwrap();
        let a = DetectorSpec::new("a", [0.3, -0.2, 0.1], 0.7, li, 1.0, sh).unwrap();
        let b = DetectorSpec::new("b", [0.3 + x, -0.2 + y, 0.4], 0.7 + t, lj, 1.0, sh).unwrap();
        prop_assert_eq!(xi_overlap(&a, &b).unwrap() + xi_overlap(&b, &a).unwrap(), 0.0);
        prop_assert_eq!(zeta_overlap(&a, &b).unwrap() - zeta_overlap(&b, &a).unwrap(), 0.0);
    }

    #[test]
    fn hard_sphere_support(x in 0.0..8.0f64, t in -8.0..8.0f64) {
        prop_assume!((x - t.abs()).abs() >= 2.0);
        prop_assert_eq!(xi_geometric(ShapeKind::HardSphere, x, t), 0.0);
    }

    #[test]
    fn hard_sphere_seam_continuity(x in 0.01..1.99f64, sgn in prop_oneof![Just(1.0f64), Just(-1.0f64)]) {
        // (|X| + |T|)/2σ = 1 ± 1e-8
        let t_in = 2.0 * (1.0 - 1e-8) - x;
        let t_out = 2.0 * (1.0 + 1e-8) - x;
        let a = xi_geometric(ShapeKind::HardSphere, x, sgn * t_in);
        let b = xi_geometric(ShapeKind::HardSphere, x, sgn * t_out);
        prop_assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn bilinear_in_couplings(kind in kinds(), x in 0.0..4.0f64, t in -4.0..4.0f64, li in 0.1..3.0f64,
                             lj in 0.1..3.0f64, k in -3i32..4) {
        let f = 2f64.powi(k);
        let (a, b) = pair(kind, x, t, li, lj);
        let (a2, b2) = pair(kind, x, t, li * f, lj);
        prop_assert_eq!(xi_overlap(&a2, &b2).unwrap(), f * xi_overlap(&a, &b).unwrap());
        prop_assert_eq!(zeta_overlap(&a2, &b2).unwrap(), f * zeta_overlap(&a, &b).unwrap());
        let (a3, b3) = pair(kind, x, t, li * 1.7, lj * 0.3);
        let r = xi_overlap(&a3, &b3).unwrap() - 0.51 * xi_overlap(&a, &b).unwrap();
        prop_assert!(r.abs() <= 1e-14 * (1.0 + xi_overlap(&a, &b).unwrap().abs()));
    }

    #[test]
    fn zeta_is_even_in_time(kind in kinds(), x in 0.0..4.0f64, t in 0.0..4.0f64) {
        let cfg = QuadConfig::default();
        let a = zeta_geometric(kind, x, t, &cfg).unwrap();
        let b = zeta_geometric(kind, x, -t, &cfg).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn cauchy_schwarz(kind in kinds(), x in 0.0..6.0f64, t in -6.0..6.0f64) {
        let cfg = QuadConfig::default();
        let z0 = zeta_geometric(kind, 0.0, 0.0, &cfg).unwrap();
        prop_assert!(zeta_geometric(kind, x, t, &cfg).unwrap().abs() <= z0);
        prop_assert!(xi_geometric(kind, x, t).abs() <= z0);
    }
}
