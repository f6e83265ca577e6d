use std::collections::BTreeMap;

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udw_kernel::{DetectorSpec, OverlapSet, SmearingShape};
use udw_state::*;

fn max_diff4(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn random_scenario(rng: &mut ChaCha8Rng, n: usize, hard_sphere: bool) -> Scenario {
    let shape = if hard_sphere { SmearingShape::hard_sphere(1.0) } else { SmearingShape::gaussian(1.0) }.unwrap();
    let t_b = rng.random_range(1.0..4.0);
    let mut ps = Vec::new();
    let mut phases = BTreeMap::new();
    for k in 0..n {
        let (label, role, t) = match k {
            0 => ("alice".to_string(), Role::Alice, 0.0),
            1 => ("bob".to_string(), Role::Bob, t_b),
            _ => (format!("i{k}"), Role::Interloper, rng.random_range(0.0..t_b)),
        };
        let pos = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let d = DetectorSpec::new(label.clone(), pos, t, rng.random_range(0.2..1.2), 1.0, shape).unwrap();
        phases.insert(label, rng.random_range(-3.0..3.0));
        ps.push(Participant { detector: d, role });
    }
    Scenario::new(ps, phases).unwrap()
}

#[test]
fn full_state_reduces_to_pair_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [3, 4] {
        for draw in 0..20 {
            let sc = random_scenario(&mut rng, n, draw % 4 == 0);
            let ov = sc.overlaps(&Default::default()).unwrap();
            let sel = pair_params(&sc, &ov).unwrap();
            assert_eq!(sel.params.xi_jb.len(), n - 2);
            let full = build_full_state(&sc.detectors(), sc.field_phases(), &ov).unwrap();
            let reduced = reduce_to_pair(&full, "alice", "bob").unwrap();
            let direct = build_pair_state(&sel.params).unwrap();
            let d = max_diff4(reduced.matrix(), direct.matrix());
            assert!(d < 1e-12, "n = {n}, draw {draw}: {d:e}");
        }
    }
}

#[test]
fn any_pair_closed_form_matches_partial_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [3, 4] {
        for _ in 0..10 {
            let mut sc = random_scenario(&mut rng, n, false);
            // Put one interloper before Alice so that the earlier-detector factors are exercised.
            let mut ps = sc.participants().to_vec();
            ps[2].detector.time = -1.5;
            sc = Scenario::new(ps, sc.field_phases().clone()).unwrap();
            let dets = sc.detectors();
            let ov = sc.overlaps(&Default::default()).unwrap();
            let full = build_full_state(&dets, sc.field_phases(), &ov).unwrap();
            for a in &dets {
                for b in &dets {
                    if a.label == b.label {
                        continue;
                    }
                    let closed = pair_state_closed(&dets, sc.field_phases(), &ov, &a.label, &b.label).unwrap();
                    let traced = reduce_to_pair(&full, &a.label, &b.label).unwrap();
                    let d = max_diff4(closed.matrix(), traced.matrix());
                    assert!(d < 1e-12, "{} {}: {d:e}", a.label, b.label);
                    assert_eq!(closed.labels(), &[a.label.clone(), b.label.clone()]);
                }
            }
        }
    }
}

#[test]
fn full_state_orders_by_coupling_time() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sc = random_scenario(&mut rng, 3, false);
    let mut dets = sc.detectors();
    dets.reverse();
    let ov = OverlapSet::compute(&dets, &Default::default()).unwrap();
    let full = build_full_state(&dets, sc.field_phases(), &ov).unwrap();
    assert_eq!(full.labels()[0], "alice");
    assert_eq!(full.labels()[2], "bob");
}

#[test]
fn full_states_are_valid_density_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sc = random_scenario(&mut rng, 6, false);
    let ov = sc.overlaps(&Default::default()).unwrap();
    let full = build_full_state(&sc.detectors(), sc.field_phases(), &ov).unwrap();
    let ev = hermitian_eigenvalues(full.matrix());
    assert!(ev[0] > -1e-10);
    assert!((full.matrix().trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
}
