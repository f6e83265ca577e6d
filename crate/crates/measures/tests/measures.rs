use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udw_kernel::{DetectorSpec, OverlapSet, SmearingShape};
use udw_measures::*;
use udw_state::{build_pair_state, partial_state, pauli, to_energy_basis, PairParams, C64};

/// Random physically realisable parameters (the pair state must be positive).
fn random_params(rng: &mut ChaCha8Rng, vacuum: bool) -> PairParams {
    loop {
        let zeta = rng.random_range(0.05..4.0);
        let n_int = rng.random_range(0..3);
        let mut p = PairParams::identical(zeta, rng.random_range(-0.5..0.5) * zeta, rng.random_range(-PI..PI))
            .with_interlopers((0..n_int).map(|_| rng.random_range(-PI..PI)).collect());
        if !vacuum {
            p = p.with_phases(rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        }
        if build_pair_state(&p).is_ok() {
            return p;
        }
    }
}

fn local_ops() -> Vec<nalgebra::Matrix2<C64>> {
    (1..=3).map(pauli).collect()
}

#[test]
fn pauli_elements_match_direct_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for draw in 0..100 {
        let p = random_params(&mut rng, draw % 2 == 0);
        let s = build_pair_state(&p).unwrap();
        let t = pauli_table(&p).unwrap();
        let ops = local_ops();
        for m in 0..3 {
            for n in 0..3 {
                let d = direct_correlator(&s, &ops[m], &ops[n]);
                assert!((t[m][n] - d).abs() < 1e-12, "draw {draw} ({m},{n}): {} vs {d}", t[m][n]);
            }
        }
        assert_eq!(t[2][2], 0.0);
    }
}

#[test]
fn fixed_point_pauli_table() {
    let p = PairParams::identical(1.0, 0.3, 0.2);
    let s = build_pair_state(&p).unwrap();
    let ops = local_ops();
    for m in 1..=3 {
        for n in 1..=3 {
            let v = pauli_correlator(&p, m, n).unwrap();
            assert!((v - direct_correlator(&s, &ops[m - 1], &ops[n - 1])).abs() < 1e-12);
        }
    }
}

#[test]
fn product_and_sabotaged_pairs_have_no_correlators() {
    for p in [
        PairParams::identical(0.0, 0.0, 0.0),
        PairParams::identical(1.2, 0.4, 0.9).with_phases(0.5, 1.0).with_interlopers(vec![0.3, FRAC_PI_2]),
    ] {
        let t = pauli_table(&p).unwrap();
        assert!(t.iter().flatten().all(|v| v.abs() < 1e-15), "{t:?}");
        let a = ObservableCoeffs::new(0.3, 1.0, -2.0, 0.5);
        assert!(observable_correlator(&p, &a, &a).unwrap().abs() < 1e-15);
        assert!(energy_correlator(&p, 1.0, 1.0).unwrap().abs() < 1e-15);
    }
}

#[test]
fn sabotaged_pairs_have_no_information_measures() {
    let p = PairParams::identical(1.2, 0.4, 0.9).with_interlopers(vec![FRAC_PI_2]);
    assert!(mutual_information(&p).unwrap().abs() < 1e-12);
    assert!(henderson_vedral_c(&p).unwrap().c.abs() < 1e-12);
    assert!(quantum_discord(&p).unwrap().abs() < 1e-12);
    let r = correlation_report(&p, 1.0, 1.0).unwrap();
    assert!(r.mutual_information.abs() < 1e-12 && r.discord.abs() < 1e-12 && r.max_pauli() < 1e-15);
}

#[test]
fn identity_part_does_not_correlate() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = random_params(&mut rng, false);
    let id = ObservableCoeffs::new(5.0, 0.0, 0.0, 0.0);
    let b = ObservableCoeffs::new(0.1, 0.7, -0.2, 1.3);
    assert_eq!(observable_correlator(&p, &id, &b).unwrap(), 0.0);
}

#[test]
fn closed_correlator_is_pauli_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let p = random_params(&mut rng, false);
        let mut c = || ObservableCoeffs::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let (a, b) = (c(), c());
        let t = pauli_table(&p).unwrap();
        let ac = [a.c1, a.c2, a.c3];
        let bc = [b.c1, b.c2, b.c3];
        let contraction: f64 = (0..3).flat_map(|m| (0..3).map(move |n| (m, n))).map(|(m, n)| ac[m] * bc[n] * t[m][n]).sum();
        assert!((observable_correlator(&p, &a, &b).unwrap() - contraction).abs() < 1e-12);
        let s = build_pair_state(&p).unwrap();
        assert!((direct_correlator(&s, &a.operator(), &b.operator()) - contraction).abs() < 1e-12);
    }
}

#[test]
fn distinct_self_overlaps_use_contraction() {
    let mut p = PairParams::identical(1.0, 0.2, 0.4).with_phases(0.3, 0.2);
    p.zeta_b = 1.6;
    let s = build_pair_state(&p).unwrap();
    let (a, b) = (ObservableCoeffs::hamiltonian(1.0), ObservableCoeffs::new(0.0, 0.3, 1.0, 0.2));
    assert!((observable_correlator(&p, &a, &b).unwrap() - direct_correlator(&s, &a.operator(), &b.operator())).abs() < 1e-12);
    assert!(mutual_information_closed(&p).is_err());
    assert!(henderson_vedral_c_closed(&p).is_err());
    let r = correlation_report(&p, 1.0, 1.0).unwrap();
    assert_eq!(r.c_method, CMethod::Oracle);
    assert!((r.mutual_information - mutual_information_of(&s).unwrap()).abs() < 1e-14);
}

#[test]
fn energy_correlator_matches_hamiltonian_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let p = random_params(&mut rng, false);
        let (wa, wb) = (rng.random_range(0.1..3.0), rng.random_range(0.1..3.0));
        let general = observable_correlator(&p, &ObservableCoeffs::hamiltonian(wa), &ObservableCoeffs::hamiltonian(wb)).unwrap();
        assert!((energy_correlator(&p, wa, wb).unwrap() - general).abs() < 1e-12);
    }
    assert_eq!(energy_correlator(&PairParams::identical(0.7, 0.0, 0.0), 1.0, 1.0).unwrap(), 0.0);
}

#[test]
fn coherent_phases_stay_within_envelope() {
    let base = PairParams::identical(0.9, 0.35, 1.1).with_interlopers(vec![0.4]);
    let mut max: f64 = 0.0;
    for i in 0..64 {
        for j in 0..64 {
            let p = base.clone().with_phases(2.0 * PI * i as f64 / 64.0, 2.0 * PI * j as f64 / 64.0);
            max = max.max(energy_correlator(&p, 1.0, 1.0).unwrap().abs());
        }
    }
    let envelope = 0.25 * base.attenuation().abs() * (-base.zeta).exp()
        * (base.zeta_ab.cosh() - base.xi_ab.cos()).abs().max(base.zeta_ab.sinh().abs());
    assert!((max - envelope).abs() < 1e-10, "{max} vs {envelope}");
}

#[test]
fn entropy_reference_values() {
    let mut pure = DMatrix::<C64>::zeros(4, 4);
    pure[(0, 0)] = C64::new(1.0, 0.0);
    assert_eq!(entropy(&pure).unwrap(), 0.0);
    let mixed = DMatrix::<C64>::identity(4, 4) * C64::new(0.25, 0.0);
    assert!((entropy(&mixed).unwrap() - 2.0).abs() < 1e-14);
    let s = build_pair_state(&PairParams::identical(1.0, 0.3, 0.2)).unwrap();
    let a = partial_state(&s, &["A"]).unwrap();
    assert!((entropy(&a).unwrap() - binary_entropy((-0.5f64).exp())).abs() < 1e-13);
    let mut bad = DMatrix::<C64>::zeros(2, 2);
    bad[(0, 0)] = C64::new(1.1, 0.0);
    bad[(1, 1)] = C64::new(-0.1, 0.0);
    assert!(matches!(entropy(&bad), Err(MeasureError::NegativeEigenvalue { .. })));
    assert_eq!(binary_entropy(1.0 + 1e-13), 0.0);
    assert_eq!(binary_entropy(0.0), 1.0);
}

#[test]
fn mutual_information_closed_form_matches_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for draw in 0..100 {
        let p = random_params(&mut rng, draw % 3 != 0);
        let closed = mutual_information_closed(&p).unwrap();
        let eig = mutual_information_of(&build_pair_state(&p).unwrap()).unwrap();
        assert!((closed - eig).abs() < 1e-10, "draw {draw}: {closed} vs {eig}");
    }
    assert!(mutual_information(&PairParams::identical(0.0, 0.0, 0.0)).unwrap().abs() < 1e-15);
}

#[test]
fn marginal_entropies_follow_actual_partial_traces() {
    let p = PairParams::identical(0.8, 0.2, 0.6).with_interlopers(vec![0.5]);
    let s = build_pair_state(&p).unwrap();
    let e = (-0.4f64).exp();
    let sa = entropy(&partial_state(&s, &["A"]).unwrap()).unwrap();
    let sb = entropy(&partial_state(&s, &["B"]).unwrap()).unwrap();
    assert!((sa - binary_entropy(e)).abs() < 1e-13);
    assert!((sb - binary_entropy(e * 0.6f64.cos() * 0.5f64.cos())).abs() < 1e-13);
}

#[test]
fn closed_c_matches_measurement_oracle_on_alice() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for _ in 0..30 {
        let p = random_params(&mut rng, true);
        let s = build_pair_state(&p).unwrap();
        let validity = discord_validity(&to_energy_basis(&s, 0.0, 0.0).unwrap()).unwrap();
        let closed = henderson_vedral_c_closed(&p).unwrap();
        let oracle = discord_oracle(&s, 16, MeasuredSide::First).unwrap();
        assert!(oracle.converged);
        assert!(oracle.c <= oracle.mutual_information + 1e-9);
        if validity.cond2 {
            assert!((closed - oracle.c).abs() < 1e-4, "{closed} vs {}", oracle.c);
            checked += 1;
        }
    }
    assert!(checked >= 20, "only {checked} draws satisfied condition 2");
}

#[test]
fn condition_one_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let p = random_params(&mut rng, true);
        let v = discord_validity(&to_energy_basis(&build_pair_state(&p).unwrap(), 0.0, 0.0).unwrap()).unwrap();
        let expected = (-2.0 * p.zeta).exp() / 4.0 * (p.zeta.exp() - 1.0) * p.attenuation().powi(2);
        assert!((v.cond1_gap - expected).abs() < 1e-12);
        assert!(!v.cond1 || p.attenuation() == 0.0);
    }
    let v = discord_validity(&to_energy_basis(&build_pair_state(&PairParams::identical(0.0, 0.0, 0.0)).unwrap(), 0.0, 0.0).unwrap()).unwrap();
    assert_eq!(v.cond1_gap, 0.0);
}

#[test]
fn validity_rejects_non_x_states() {
    let s = build_pair_state(&PairParams::identical(0.5, 0.1, 0.4).with_phases(0.8, 0.0)).unwrap();
    assert!(matches!(discord_validity(&to_energy_basis(&s, 0.0, 0.0).unwrap()), Err(MeasureError::NotXState { .. })));
    assert!(discord_validity(&s).is_err());
    assert!(henderson_vedral_c_closed(&PairParams::identical(0.5, 0.1, 0.4).with_phases(0.8, 0.0)).is_err());
}

#[test]
fn oracle_needs_resolution() {
    let s = build_pair_state(&PairParams::identical(0.5, 0.1, 0.4)).unwrap();
    assert!(matches!(discord_oracle(&s, 8, MeasuredSide::First), Err(MeasureError::Resolution(8))));
}

#[test]
fn oracle_on_product_state_is_zero() {
    let s = build_pair_state(&PairParams::identical(0.0, 0.0, 0.0)).unwrap();
    let o = discord_oracle(&s, 16, MeasuredSide::Second).unwrap();
    assert!(o.c.abs() < 1e-12 && o.discord.abs() < 1e-12);
}

fn hard_sphere_params(lambda: f64, x: f64, t: f64) -> PairParams {
    let hs = SmearingShape::hard_sphere(1.0).unwrap();
    let a = DetectorSpec::new("alice", [0.0; 3], 0.0, lambda, 1.0, hs).unwrap();
    let b = DetectorSpec::new("bob", [x, 0.0, 0.0], t, lambda, 1.0, hs).unwrap();
    let ov = OverlapSet::compute(&[a, b], &Default::default()).unwrap();
    PairParams::identical(ov.zeta("alice", "alice").unwrap(), ov.zeta("alice", "bob").unwrap(), ov.xi("alice", "bob").unwrap())
}

#[test]
fn null_contact_discord_is_positive_and_matches_oracle() {
    let p = hard_sphere_params(1.0, 4.0, 5.0);
    let d = quantum_discord(&p).unwrap();
    assert!(d > 0.0);
    let o = discord_oracle(&build_pair_state(&p).unwrap(), 32, MeasuredSide::First).unwrap();
    assert!((d - o.discord).abs() < 1e-4, "{d} vs {}", o.discord);
    let r = correlation_report(&p, 1.0, 1.0).unwrap();
    assert_eq!(r.c_method, CMethod::ClosedForm);
    assert!(r.validity.as_ref().unwrap().f_value < 0.0);
    assert!((r.discord - (r.mutual_information - r.c_function)).abs() < 1e-12);
}

#[test]
fn strong_coupling_measures_decay() {
    let p = hard_sphere_params(10.0, 5.0, 5.0);
    let r = correlation_report(&p, 1.0, 1.0).unwrap();
    for v in [r.mutual_information, r.c_function, r.discord, r.energy.abs(), r.max_pauli()] {
        assert!(v < 1e-3, "{r:?}");
    }
}

#[test]
fn field_phases_do_not_change_information_measures() {
    let p = PairParams::identical(0.9, 0.2, 0.7).with_interlopers(vec![0.3]);
    let q = p.clone().with_phases(1.1, -0.6);
    let (rp, rq) = (correlation_report(&p, 1.0, 1.0).unwrap(), correlation_report(&q, 1.0, 1.0).unwrap());
    assert!((rp.mutual_information - rq.mutual_information).abs() < 1e-12);
    assert!((rp.c_function - rq.c_function).abs() < 1e-6);
    assert_eq!(rq.c_method, CMethod::Oracle);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn correlator_is_bilinear(
        seed in 0u64..1000,
        a in prop::array::uniform4(-3.0f64..3.0),
        b in prop::array::uniform4(-3.0f64..3.0),
        c in prop::array::uniform4(-3.0f64..3.0),
        k in -2.0f64..2.0,
    ) {
        let p = random_params(&mut ChaCha8Rng::seed_from_u64(seed), false);
        let oc = |v: [f64; 4]| ObservableCoeffs::new(v[0], v[1], v[2], v[3]);
        let sum: [f64; 4] = std::array::from_fn(|i| a[i] + k * c[i]);
        let lhs = observable_correlator(&p, &oc(sum), &oc(b)).unwrap();
        let rhs = observable_correlator(&p, &oc(a), &oc(b)).unwrap() + k * observable_correlator(&p, &oc(c), &oc(b)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn measures_are_ordered(seed in 0u64..10_000) {
        let p = random_params(&mut ChaCha8Rng::seed_from_u64(seed), true);
        let mi = mutual_information(&p).unwrap();
        let hv = henderson_vedral_c(&p).unwrap();
        let d = quantum_discord(&p).unwrap();
        prop_assert!(mi >= -1e-12);
        prop_assert!(hv.c >= -1e-9 && hv.c <= mi + 1e-9);
        prop_assert!((-1e-9..=mi + 1e-9).contains(&d));
    }
}
