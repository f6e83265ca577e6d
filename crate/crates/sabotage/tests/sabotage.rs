use std::collections::BTreeMap;
use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udw_kernel::{xi_overlap, DetectorSpec, SmearingShape};
use udw_measures::correlation_report;
use udw_sabotage::*;
use udw_state::{pair_params, pair_state_closed, build_full_state, reduce_to_pair, Participant, Role, Scenario, C64};

fn hs() -> SmearingShape {
    SmearingShape::hard_sphere(1.0).unwrap()
}

fn gauss() -> SmearingShape {
    SmearingShape::gaussian(1.0).unwrap()
}

#[test]
fn gaussian_maximum_location_and_value() {
    let m = max_xi(&gauss(), 1.0, 1.0).unwrap();
    assert!(m.converged);
    let expected = (-0.5f64).exp();
    assert!((m.xi - expected).abs() < 1e-6 * expected);
    assert!(m.x.abs() < 1e-6 && (m.t - 2f64.sqrt()).abs() < 1e-6, "{m:?}");
}

#[test]
fn hard_sphere_global_maximum_is_on_the_axis() {
    let m = max_xi(&hs(), 1.0, 1.0).unwrap();
    assert!(m.converged);
    assert!(m.x < 1e-6, "{m:?}");
    assert!((m.t - (3f64.sqrt() - 1.0)).abs() < 1e-6, "{m:?}");
    assert!((m.xi - 2.617_493_0).abs() < 1e-6, "{m:?}");
}

#[test]
fn hard_sphere_null_line_maximum() {
    let m = max_xi_on_null_line(&hs(), 1.0, 1.0).unwrap();
    assert!((m.x - 0.57673).abs() < 1e-3 && m.x == m.t);
    assert!((m.xi - 2.002_089_5).abs() < 1e-6, "{m:?}");
}

#[test]
fn maximum_scales_bilinearly_with_couplings() {
    for shape in [hs(), gauss()] {
        let one = max_xi(&shape, 1.0, 1.0).unwrap();
        let scaled = max_xi(&shape, 2.5, 0.75).unwrap();
        assert!((scaled.xi - 1.875 * one.xi).abs() < 1e-14 * scaled.xi);
        assert_eq!((scaled.x, scaled.t), (one.x, one.t));
    }
    let wide = max_xi(&SmearingShape::gaussian(2.0).unwrap(), 1.0, 1.0).unwrap();
    assert!((wide.t - 2.0 * 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn gaussian_threshold_value() {
    let th = threshold_coupling(&gauss(), 1.0).unwrap();
    let expected = PI * E.sqrt() / 2.0;
    assert!((th - expected).abs() < 1e-9 * expected, "{th}");
}

#[test]
fn hard_sphere_threshold_uses_global_maximum() {
    let th = threshold_coupling(&hs(), 1.0).unwrap();
    assert!((th - FRAC_PI_2 / 2.617_493_0).abs() < 1e-6, "{th}");
    assert!(th < FRAC_PI_4);
}

#[test]
fn threshold_times_bob_coupling_is_constant() {
    for shape in [hs(), gauss()] {
        let base = threshold_coupling(&shape, 1.0).unwrap();
        for lb in [0.3, 1.7, 12.0] {
            assert!((threshold_coupling(&shape, lb).unwrap() * lb - base).abs() < 1e-14 * base);
        }
    }
}

#[test]
fn threshold_coupling_reaches_right_angle_at_optimum() {
    for shape in [hs(), gauss()] {
        for lb in [0.5, 1.0, 3.0] {
            let th = threshold_coupling(&shape, lb).unwrap();
            let m = max_xi(&shape, th, lb).unwrap();
            assert!((m.xi - FRAC_PI_2).abs() < 1e-9);
        }
    }
}

#[test]
fn bad_couplings_are_rejected() {
    assert!(max_xi(&hs(), 0.0, 1.0).is_err());
    assert!(threshold_coupling(&hs(), -1.0).is_err());
}

#[test]
fn locus_is_empty_below_threshold() {
    for shape in [hs(), gauss()] {
        let th = threshold_coupling(&shape, 1.0).unwrap();
        let below = sabotage_locus(&shape, th * (1.0 - 1e-6), 1.0, &LocusGrid::default(), FRAC_PI_2).unwrap();
        assert!(below.is_empty());
        let above = sabotage_locus(&shape, th * (1.0 + 1e-6), 1.0, &LocusGrid::default(), FRAC_PI_2).unwrap();
        assert!(!above.is_empty());
        assert!(above.residuals.iter().all(|&r| r < 1e-9));
    }
}

#[test]
fn hard_sphere_locus_for_equal_couplings_of_two() {
    let locus = default_locus(&hs(), 2.0, 2.0).unwrap();
    assert!(locus.points.len() > 100);
    for (&(x, t), &r) in locus.points.iter().zip(&locus.residuals) {
        assert!(r < 1e-9);
        assert!(t > 0.0);
        assert!((x - t).abs() < 2.0);
    }
}

#[test]
fn higher_odd_multiples_are_reachable() {
    let locus = sabotage_locus(&hs(), 4.0, 2.0, &LocusGrid { nx: 64, nt: 64, extent_sigmas: 4.0 }, 3.0 * FRAC_PI_2).unwrap();
    assert!(!locus.is_empty());
    assert!(locus.residuals.iter().all(|&r| r < 1e-9));
}

#[test]
fn locus_rejects_degenerate_grid() {
    assert!(sabotage_locus(&hs(), 2.0, 2.0, &LocusGrid { nx: 1, nt: 10, extent_sigmas: 4.0 }, FRAC_PI_2).is_err());
}

#[test]
fn swarm_attenuation_examples() {
    assert_eq!(swarm_attenuation(&[]), 1.0);
    assert!(swarm_attenuation(&[FRAC_PI_2]).abs() < 1e-16);
    for n in 1..8 {
        let v = swarm_attenuation(&vec![FRAC_PI_4; n]);
        assert!((v - 2f64.powf(-(n as f64) / 2.0)).abs() < 1e-15);
    }
}

fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn bob(shape: SmearingShape) -> DetectorSpec {
    DetectorSpec::new("bob", [0.0; 3], 10.0, 2.0, 1.0, shape).unwrap()
}

fn interloper_at(locus_point: (f64, f64), dir: [f64; 3], shape: SmearingShape) -> DetectorSpec {
    let (x, t) = locus_point;
    DetectorSpec::new("eve", [x * dir[0], x * dir[1], x * dir[2]], 10.0 - t, 2.0, 1.0, shape).unwrap()
}

fn random_alice(rng: &mut ChaCha8Rng, shape: SmearingShape) -> DetectorSpec {
    let d = unit_vector(rng);
    let r = rng.random_range(0.0..8.0);
    DetectorSpec::new(
        "alice",
        [r * d[0], r * d[1], r * d[2]],
        rng.random_range(0.0..5.5),
        rng.random_range(0.2..3.0),
        rng.random_range(0.1..3.0),
        shape,
    )
    .unwrap()
}

fn scenario(alice: DetectorSpec, bob: DetectorSpec, interlopers: Vec<DetectorSpec>) -> Scenario {
    let mut ps = vec![Participant { detector: alice, role: Role::Alice }, Participant { detector: bob, role: Role::Bob }];
    ps.extend(interlopers.into_iter().map(|d| Participant { detector: d, role: Role::Interloper }));
    Scenario::new(ps, BTreeMap::new()).unwrap()
}

#[test]
fn sabotage_holds_for_any_alice() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let shape = hs();
    let locus = default_locus(&shape, 2.0, 2.0).unwrap();
    for _ in 0..10 {
        let alice = random_alice(&mut rng, shape);
        for _ in 0..5 {
            let p = locus.points[rng.random_range(0..locus.points.len())];
            let eve = interloper_at(p, unit_vector(&mut rng), shape);
            let check = verify_sabotage(&scenario(alice.clone(), bob(shape), vec![eve]), &Default::default()).unwrap();
            assert!(check.warnings.is_empty());
            for v in [check.mi, check.c, check.discord, check.max_correlator] {
                assert!(v.abs() < 1e-10, "{check:?}");
            }
            assert!(check.bob_mixedness < 1e-12, "{check:?}");
        }
    }
}

#[test]
fn far_spacelike_interloper_changes_nothing() {
    let shape = hs();
    let alice = DetectorSpec::new("alice", [4.0, 0.0, 0.0], 5.0, 1.0, 1.0, shape).unwrap();
    let b = DetectorSpec::new("bob", [0.0; 3], 10.0, 1.0, 1.0, shape).unwrap();
    let far = DetectorSpec::new("eve", [40.0, 0.0, 0.0], 8.0, 2.0, 1.0, shape).unwrap();
    let with = verify_sabotage(&scenario(alice.clone(), b.clone(), vec![far]), &Default::default()).unwrap();
    let sc = scenario(alice, b, vec![]);
    let sel = pair_params(&sc, &sc.overlaps(&Default::default()).unwrap()).unwrap();
    let base = correlation_report(&sel.params, 1.0, 1.0).unwrap();
    assert!(base.mutual_information > 0.0);
    assert!((with.mi - base.mutual_information).abs() < 1e-12);
    assert!((with.c - base.c_function).abs() < 1e-12);
    assert!((with.discord - base.discord).abs() < 1e-12);
}

#[test]
fn verify_needs_an_interloper() {
    let shape = hs();
    let sc = scenario(DetectorSpec::new("alice", [4.0, 0.0, 0.0], 5.0, 1.0, 1.0, shape).unwrap(), bob(shape), vec![]);
    assert!(matches!(verify_sabotage(&sc, &Default::default()), Err(SabotageError::NoInterloper)));
}

#[test]
fn extra_detectors_do_not_undo_sabotage() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let shape = hs();
    let locus = default_locus(&shape, 2.0, 2.0).unwrap();
    for trial in 0..5 {
        let alice = random_alice(&mut rng, shape);
        let p = locus.points[rng.random_range(0..locus.points.len())];
        let mut dets = vec![alice.clone(), bob(shape), interloper_at(p, unit_vector(&mut rng), shape)];
        for k in 0..3 {
            let d = unit_vector(&mut rng);
            let r = rng.random_range(0.0..6.0);
            dets.push(
                DetectorSpec::new(
                    format!("extra{k}"),
                    [r * d[0], r * d[1], r * d[2]],
                    rng.random_range(-2.0..12.0),
                    rng.random_range(0.2..2.5),
                    1.0,
                    shape,
                )
                .unwrap(),
            );
        }
        let ov = udw_kernel::OverlapSet::compute(&dets, &Default::default()).unwrap();
        let phases = BTreeMap::new();
        let closed = pair_state_closed(&dets, &phases, &ov, "alice", "bob").unwrap();
        let full = build_full_state(&dets, &phases, &ov).unwrap();
        let traced = reduce_to_pair(&full, "alice", "bob").unwrap();
        let rho_a = udw_state::partial_state(&closed, &["alice"]).unwrap();
        let ra = Matrix2::from_iterator(rho_a.iter().copied());
        let product = ra.kronecker(&(Matrix2::<C64>::identity() * C64::new(0.5, 0.0)));
        let dist = |m: &nalgebra::Matrix4<C64>| (m - product).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        assert!(dist(closed.matrix()) < 1e-12, "trial {trial}");
        assert!(dist(traced.matrix()) < 1e-12, "trial {trial}");
    }
    let _ = DMatrix::<C64>::zeros(1, 1);
}

#[test]
fn locus_annotation_relative_to_alice() {
    let locus = default_locus(&hs(), 2.0, 2.0).unwrap();
    // Alice far away in space and long before: never in contact, always earlier.
    let far = annotate_locus(&locus, &hs(), 100.0, 5.0);
    assert!(far.iter().all(|a| a.after_alice && a.contact == AliceContact::Never));
    // Alice at Bob's position 2σ earlier: some placements are after, some before her.
    let near = annotate_locus(&locus, &hs(), 0.0, 2.0);
    assert!(near.iter().any(|a| a.after_alice) && near.iter().any(|a| !a.after_alice));
    assert!(near.iter().all(|a| a.contact != AliceContact::Sometimes));
    let mid = annotate_locus(&locus, &hs(), 3.0, 5.0);
    assert!(mid.iter().any(|a| a.contact == AliceContact::Sometimes));
}

#[test]
fn locus_points_reproduce_sabotage_angle_through_kernel() {
    let shape = gauss();
    let locus = default_locus(&shape, 3.0, 3.0).unwrap();
    assert!(!locus.is_empty());
    for &(x, t) in locus.points.iter().step_by(37) {
        let b = DetectorSpec::new("b", [0.0; 3], 0.0, 3.0, 1.0, shape).unwrap();
        let i = DetectorSpec::new("i", [x, 0.0, 0.0], -t, 3.0, 1.0, shape).unwrap();
        assert!((xi_overlap(&i, &b).unwrap() - FRAC_PI_2).abs() < 1e-9);
    }
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

    #[test]
    fn swarm_attenuation_is_a_bounded_product(xs in proptest::collection::vec(-4.0f64..4.0, 0..6)) {
        let v = swarm_attenuation(&xs);
        let direct: f64 = xs.iter().map(|x| x.cos()).product();
        proptest::prop_assert!((v - direct).abs() < 1e-15);
        proptest::prop_assert!(v.abs() <= 1.0);
    }

    #[test]
    fn sabotage_survives_any_alice_placement(
        seed in 0u64..1_000_000,
        pick in 0usize..10_000,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = gauss();
        let th = threshold_coupling(&shape, 2.0).unwrap();
        let locus = sabotage_locus(&shape, th.max(2.0), 2.0, &LocusGrid { nx: 48, nt: 48, extent_sigmas: 4.0 }, FRAC_PI_2).unwrap();
        let p = locus.points[pick % locus.points.len()];
        let eve = DetectorSpec::new("eve", [p.0, 0.0, 0.0], 10.0 - p.1, th.max(2.0), 1.0, shape).unwrap();
        let check = verify_sabotage(&scenario(random_alice(&mut rng, shape), bob(shape), vec![eve]), &Default::default()).unwrap();
        proptest::prop_assert!(check.mi.abs() < 1e-10 && check.c.abs() < 1e-10 && check.discord.abs() < 1e-10);
        proptest::prop_assert!(check.max_correlator.abs() < 1e-10);
    }
}
