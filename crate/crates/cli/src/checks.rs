//! The acceptance suite, shared by `udw verify` and the `acceptance` test target.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use udw_kernel::{
    default_regulators, overlap_oracle, xi_overlap, zeta_overlap, DetectorSpec, QuadConfig, ShapeKind, SmearingShape,
};
use udw_measures::{
    discord_oracle, discord_validity, henderson_vedral_c_closed, mutual_information_closed, mutual_information_of,
    MeasuredSide,
};
use udw_sabotage::{default_locus, max_xi, threshold_coupling, verify_sabotage};
use udw_state::{
    build_full_state, build_pair_state, pair_params, reduce_to_pair, to_energy_basis, PairParams, Participant, Role,
    Scenario, C64,
};
use udw_toybox::{toy_report, ToyCoeffs};

use crate::figures::{self, STRENGTH_GEOMETRIES};
use crate::table::Table;
use crate::{with_threads, CliError};

pub const CHECK_NAMES: [&str; 12] = [
    "hard_sphere_maximum",
    "gaussian_maximum",
    "threshold_coupling_reaches_right_angle",
    "sabotage_completeness",
    "closed_forms_match_oracle",
    "vanishing_outside_null_band",
    "full_state_reduces_to_pair_state",
    "measures_match_oracles",
    "validity_functional_negative",
    "strong_coupling_decay",
    "toy_model_checks",
    "figure_presets",
];

/// Multiplies every tolerance of the suite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub scale: f64,
}

impl Tolerances {
    pub fn strict() -> Self {
        Self { scale: 1.0 }
    }

    /// Test hook: every tolerance becomes 0, so the suite must fail.
    pub fn corrupt() -> Self {
        Self { scale: 0.0 }
    }

    pub fn profile(name: &str) -> Result<Self, CliError> {
        match name {
            "strict" => Ok(Self::strict()),
            "corrupt" => Ok(Self::corrupt()),
            other => Err(CliError::UnknownProfile(other.to_string())),
        }
    }

    fn tol(&self, t: f64) -> f64 {
        t * self.scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("{status} {} ({:.2} s): {}", self.name, self.elapsed.as_secs_f64(), self.detail)
    }
}

type Verdict = Result<(bool, String), CliError>;

fn hs() -> SmearingShape {
    SmearingShape { kind: ShapeKind::HardSphere, sigma: 1.0 }
}

fn gauss() -> SmearingShape {
    SmearingShape { kind: ShapeKind::Gaussian, sigma: 1.0 }
}

fn within_budget(elapsed: Duration, secs: f64) -> bool {
    elapsed.as_secs_f64() < secs
}

fn hard_sphere_maximum(tol: &Tolerances) -> Verdict {
    let start = Instant::now();
    let m = max_xi(&hs(), 1.0, 1.0)?;
    let el = start.elapsed();
    let loc_ok = (m.x - 0.576_73).abs() < tol.tol(1e-3) && (m.t - 0.576_73).abs() < tol.tol(1e-3);
    let val_ok = ((m.xi - 2.0) / 2.0).abs() < tol.tol(1e-3);
    Ok((
        loc_ok && val_ok && within_budget(el, 5.0),
        format!(
            "max_xi at (|X|, T) = ({:.6}, {:.6}) with xi = {:.7}; expected (0.57673, 0.57673) with xi = 2",
            m.x, m.t, m.xi
        ),
    ))
}

fn gaussian_maximum(tol: &Tolerances) -> Verdict {
    let start = Instant::now();
    let m = max_xi(&gauss(), 1.0, 1.0)?;
    let el = start.elapsed();
    let expected = (-0.5f64).exp();
    let rel = ((m.xi - expected) / expected).abs();
    let ok = rel < tol.tol(1e-6)
        && m.x.abs() < tol.tol(1e-6)
        && ((m.t - 2f64.sqrt()) / 2f64.sqrt()).abs() < tol.tol(1e-6)
        && within_budget(el, 1.0);
    Ok((ok, format!("xi = {:.12} at ({:.2e}, {:.9}), relative error {rel:.1e}", m.xi, m.x, m.t)))
}

fn thresholds(tol: &Tolerances) -> Verdict {
    let mut worst: f64 = 0.0;
    for shape in [hs(), gauss()] {
        for lb in [0.5, 1.0, 2.0, 3.7] {
            let li = threshold_coupling(&shape, lb)?;
            worst = worst.max((max_xi(&shape, li, lb)?.xi - FRAC_PI_2).abs());
        }
    }
    Ok((worst < tol.tol(1e-9), format!("largest |xi - pi/2| at the optimum = {worst:.2e}")))
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

fn spec(label: &str, pos: [f64; 3], t: f64, lambda: f64, gap: f64, shape: SmearingShape) -> DetectorSpec {
    DetectorSpec { label: label.into(), position: pos, time: t, coupling: lambda, gap, smearing: shape }
}

fn sabotage_completeness(tol: &Tolerances) -> Verdict {
    let start = Instant::now();
    let shape = hs();
    let (lambda, t_b) = (2.0, 10.0);
    let locus = default_locus(&shape, lambda, lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut cases = Vec::new();
    for _ in 0..10 {
        let d = unit_vector(&mut rng);
        let r = rng.random_range(0.0..8.0);
        let alice = spec(
            "alice",
            [r * d[0], r * d[1], r * d[2]],
            rng.random_range(0.0..5.5),
            rng.random_range(0.2..3.0),
            rng.random_range(0.1..3.0),
            shape,
        );
        for _ in 0..5 {
            let (x, t) = locus.points[rng.random_range(0..locus.points.len())];
            let u = unit_vector(&mut rng);
            let eve = spec("eve", [x * u[0], x * u[1], x * u[2]], t_b - t, lambda, 1.0, shape);
            cases.push((alice.clone(), eve));
        }
    }
    let results: Vec<Result<(f64, f64), CliError>> = cases
        .par_iter()
        .map(|(alice, eve)| {
            let ps = vec![
                Participant { detector: alice.clone(), role: Role::Alice },
                Participant { detector: spec("bob", [0.0; 3], t_b, lambda, 1.0, shape), role: Role::Bob },
                Participant { detector: eve.clone(), role: Role::Interloper },
            ];
            let check = verify_sabotage(&Scenario::new(ps, BTreeMap::new())?, &QuadConfig::default())?;
            let measures = [check.mi, check.c, check.discord, check.max_correlator].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            Ok((measures, check.bob_mixedness))
        })
        .collect();
    let mut worst = (0.0f64, 0.0f64);
    for r in results {
        let (m, b) = r?;
        worst = (worst.0.max(m), worst.1.max(b));
    }
    let el = start.elapsed();
    let ok = worst.0 < tol.tol(1e-10) && worst.1 < tol.tol(1e-12) && within_budget(el, 30.0);
    Ok((ok, format!("50 cases: largest measure {:.2e}, largest |rho_B - 1/2| {:.2e}", worst.0, worst.1)))
}

fn oracle_close(a: f64, b: f64, tol: &Tolerances) -> bool {
    if b.abs() < 1e-3 {
        (a - b).abs() < tol.tol(1e-6)
    } else {
        ((a - b) / b).abs() < tol.tol(1e-4)
    }
}

fn closed_forms_match_oracle(tol: &Tolerances) -> Verdict {
    let start = Instant::now();
    let mut points = Vec::new();
    for shape in [hs(), gauss()] {
        for i in 0..10 {
            for j in 0..10 {
                points.push((shape, 0.1 + 0.4 * i as f64, 0.15 + 0.4 * j as f64));
            }
        }
    }
    let res: Vec<Result<bool, CliError>> = points
        .par_iter()
        .map(|&(shape, x, t)| {
            let a = spec("a", [0.0; 3], 0.0, 1.0, 1.0, shape);
            let b = spec("b", [x, 0.0, 0.0], t, 1.0, 1.0, shape);
            let o = overlap_oracle(&a, &b, &default_regulators(1.0))?;
            Ok(oracle_close(o.zeta, zeta_overlap(&a, &b)?, tol) && oracle_close(o.xi, xi_overlap(&a, &b)?, tol))
        })
        .collect();
    let mut bad = 0;
    for r in res {
        if !r? {
            bad += 1;
        }
    }
    let el = start.elapsed();
    Ok((bad == 0 && within_budget(el, 120.0), format!("{bad} of 200 grid points disagree")))
}

fn vanishing_outside_null_band(tol: &Tolerances) -> Verdict {
    let pts = [
        (5.0, 1.0), (6.0, 0.5), (3.0, 0.0), (2.5, 0.4), (4.0, 1.9),
        (0.0, 2.0), (0.0, 3.0), (0.5, 3.0), (1.0, 4.5), (0.2, 5.0),
        (3.5, -1.0), (7.0, 2.0), (0.0, -2.5), (1.5, -4.0), (8.0, 4.0),
        (2.0, 4.2), (4.5, 0.1), (0.3, 2.6), (6.5, 3.8), (9.0, 6.5),
    ];
    let res: Vec<Result<(f64, f64), CliError>> = pts
        .par_iter()
        .map(|&(x, t)| {
            let a = spec("a", [0.0; 3], 0.0, 1.0, 1.0, hs());
            let b = spec("b", [0.0, x, 0.0], t, 1.0, 1.0, hs());
            Ok((xi_overlap(&a, &b)?.abs(), overlap_oracle(&a, &b, &default_regulators(1.0))?.xi.abs()))
        })
        .collect();
    let (mut closed, mut oracle) = (0.0f64, 0.0f64);
    for r in res {
        let (c, o) = r?;
        closed = closed.max(c);
        oracle = oracle.max(o);
    }
    let ok = closed == 0.0 && oracle < tol.tol(1e-6);
    Ok((ok, format!("20 points: largest closed-form |xi| = {closed:e}, largest oracle |xi| = {oracle:.2e}")))
}

fn random_scenario(rng: &mut ChaCha8Rng, n: usize, hard_sphere: bool) -> Result<Scenario, CliError> {
    let shape = if hard_sphere { hs() } else { gauss() };
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
        let d = spec(&label, pos, t, rng.random_range(0.2..1.2), 1.0, shape);
        phases.insert(label, rng.random_range(-3.0..3.0));
        ps.push(Participant { detector: d, role });
    }
    Ok(Scenario::new(ps, phases)?)
}

fn max_diff4(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn full_state_reduces(tol: &Tolerances) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst: f64 = 0.0;
    for n in [3, 4] {
        for draw in 0..20 {
            let sc = random_scenario(&mut rng, n, draw % 4 == 0)?;
            let ov = sc.overlaps(&QuadConfig::default())?;
            let sel = pair_params(&sc, &ov)?;
            let full = build_full_state(&sc.detectors(), sc.field_phases(), &ov)?;
            let reduced = reduce_to_pair(&full, "alice", "bob")?;
            worst = worst.max(max_diff4(reduced.matrix(), build_pair_state(&sel.params)?.matrix()));
        }
    }
    Ok((worst < tol.tol(1e-12), format!("40 draws, largest entrywise difference {worst:.2e}")))
}

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

fn measures_match_oracles(tol: &Tolerances) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut mi_worst: f64 = 0.0;
    for draw in 0..100 {
        let p = random_params(&mut rng, draw % 3 == 0);
        let eig = mutual_information_of(&build_pair_state(&p)?)?;
        mi_worst = mi_worst.max((mutual_information_closed(&p)? - eig).abs());
    }
    let hv_params: Vec<PairParams> = (0..30).map(|_| random_params(&mut rng, true)).collect();
    let hv: Vec<Result<Option<f64>, CliError>> = hv_params
        .par_iter()
        .map(|p| {
            let s = build_pair_state(p)?;
            if !discord_validity(&to_energy_basis(&s, 0.0, 0.0)?)?.cond2 {
                return Ok(None);
            }
            let oracle = discord_oracle(&s, 16, MeasuredSide::First)?;
            Ok(Some((henderson_vedral_c_closed(p)? - oracle.c).abs()))
        })
        .collect();
    let (mut hv_worst, mut hv_count) = (0.0f64, 0);
    for r in hv {
        if let Some(d) = r? {
            hv_worst = hv_worst.max(d);
            hv_count += 1;
        }
    }
    let mut gap_worst: f64 = 0.0;
    for _ in 0..100 {
        let p = random_params(&mut rng, true);
        let v = discord_validity(&to_energy_basis(&build_pair_state(&p)?, 0.0, 0.0)?)?;
        let expected = (-2.0 * p.zeta).exp() / 4.0 * (p.zeta.exp() - 1.0) * p.attenuation().powi(2);
        gap_worst = gap_worst.max((v.cond1_gap - expected).abs());
    }
    let ok = mi_worst < tol.tol(1e-10) && hv_count > 0 && hv_worst < tol.tol(1e-4) && gap_worst < tol.tol(1e-12);
    Ok((
        ok,
        format!(
            "MI {mi_worst:.1e} over 100 draws; C {hv_worst:.1e} over {hv_count} draws with condition 2; condition-1 identity {gap_worst:.1e}"
        ),
    ))
}

fn validity_functional_negative(_tol: &Tolerances) -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in [ShapeKind::HardSphere, ShapeKind::Gaussian] {
        let t = figures::correlation_map(kind)?;
        let f = t.values("f_value");
        let max = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        ok &= f.len() == t.rows.len() && max < 0.0;
        parts.push(format!("{}: {} points, max f = {max:.3e}", kind.name(), f.len()));
    }
    Ok((ok, parts.join("; ")))
}

/// Number of sign changes of the discrete derivative, ignoring steps below `tol`, and the first sign.
pub fn derivative_sign_changes(v: &[f64], tol: f64) -> (usize, Option<i32>) {
    let signs: Vec<i32> = v
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter_map(|d| if d > tol { Some(1) } else if d < -tol { Some(-1) } else { None })
        .collect();
    (signs.windows(2).filter(|w| w[0] != w[1]).count(), signs.first().copied())
}

fn strong_coupling_decay(tol: &Tolerances) -> Verdict {
    let t = figures::strength_sweep()?;
    let (kx, kt, kl) = (t.column("x").unwrap(), t.column("t").unwrap(), t.column("lambda_sq").unwrap());
    let mut ok = true;
    let mut notes = Vec::new();
    for (gx, gt) in STRENGTH_GEOMETRIES {
        let rows: Vec<_> = t.rows.iter().filter(|r| r[kx].as_f64() == Some(gx) && r[kt].as_f64() == Some(gt)).collect();
        for m in ["energy", "mi", "c", "discord"] {
            let k = t.column(m).unwrap();
            let v: Vec<f64> = rows.iter().map(|r| r[k].as_f64().unwrap_or(f64::NAN)).collect();
            let last = rows.last().and_then(|r| r[kl].as_f64());
            let end_ok = last == Some(100.0) && v[v.len() - 1].abs() < tol.tol(1e-3);
            let zero_ok = rows[0][kl].as_f64() == Some(0.0) && v[0].abs() <= tol.tol(1e-15);
            let (changes, first) = derivative_sign_changes(&v, 1e-9);
            let peak_ok = changes == 1 && first == Some(1);
            if !(end_ok && zero_ok && peak_ok) {
                ok = false;
                notes.push(format!("({gx}, {gt}) {m}: end {:.1e}, start {:.1e}, {changes} sign changes", v[v.len() - 1], v[0]));
            }
        }
    }
    let detail = if ok {
        "3 geometries x 4 measures: zero at lambda^2 = 0, one interior maximum, < 1e-3 at lambda^2 = 100".into()
    } else {
        notes.join("; ")
    };
    Ok((ok, detail))
}

fn toy_model(tol: &Tolerances) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut pair = || {
            let th: f64 = rng.random_range(0.0..FRAC_PI_2);
            (C64::from_polar(th.cos(), rng.random_range(-PI..PI)), C64::from_polar(th.sin(), rng.random_range(-PI..PI)))
        };
        let (a, b) = pair();
        let (c, d) = pair();
        let r = toy_report(&ToyCoeffs::new(a, b, c, d)?)?;
        worst = [
            r.product_error,
            r.alice_interloper_error,
            r.negativity_ib,
            r.ib_transpose_error,
            (r.negativity_bf - r.negativity_bf_expected).abs(),
            r.exchange_error,
        ]
        .iter()
        .fold(worst, |m, v| m.max(*v));
        if !r.passes(tol.tol(1e-12)) {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("20 draws, {failures} failing, largest deviation {worst:.1e}")))
}

fn render_all(threads: usize) -> Result<Vec<(String, String)>, CliError> {
    with_threads(Some(threads), || -> Result<Vec<(String, String)>, CliError> {
        let mut out = Vec::new();
        for name in figures::FIGURE_NAMES {
            for (file, table) in figures::figure(name)? {
                out.push((file, table.to_csv()?));
            }
        }
        Ok(out)
    })?
}

/// Local minima of `v` (strictly below both neighbours).
fn local_minima(v: &[f64]) -> Vec<usize> {
    (1..v.len().saturating_sub(1)).filter(|&k| v[k] < v[k - 1] && v[k] < v[k + 1]).collect()
}

fn figure_presets(tol: &Tolerances) -> Verdict {
    let first = render_all(1)?;
    let second = render_all(4)?;
    let deterministic = first == second;
    let get = |name: &str| -> Result<Table, CliError> {
        let text = &first.iter().find(|(f, _)| f == name).expect("figure file").1;
        Table::from_csv(text)
    };
    let mut notes = vec![format!("{} files, identical across 1 and 4 threads: {deterministic}", first.len())];

    let mut locus_worst: f64 = 0.0;
    let mut locus_count = 0;
    for (file, shape) in [("fig1_locus.csv", hs()), ("fig2_locus.csv", gauss())] {
        let t = get(file)?;
        let (xs, ts) = (t.values("x"), t.values("t"));
        for (&x, &tt) in xs.iter().zip(&ts) {
            let b = spec("b", [0.0; 3], 0.0, 2.0, 1.0, shape);
            let i = spec("i", [x, 0.0, 0.0], -tt, 2.0, 1.0, shape);
            locus_worst = locus_worst.max((xi_overlap(&i, &b)? - FRAC_PI_2).abs());
            locus_count += 1;
        }
    }
    let locus_ok = locus_count > 0 && locus_worst < tol.tol(1e-9);
    notes.push(format!("{locus_count} locus points, largest |xi - pi/2| {locus_worst:.1e}"));

    let traces = get("fig6_correlators.csv")?;
    let roots = get("fig6_sabotage_points.csv")?.values("x_i");
    let (x, gab, gbi) = (traces.values("x_i"), traces.values("gamma_ab"), traces.values("gamma_bi"));
    let h = x[1] - x[0];
    let mut crossing_ok = !roots.is_empty();
    let mut dip_ok = !roots.is_empty();
    let minima = local_minima(&gbi);
    for &r in &roots {
        let near: Vec<usize> = (0..x.len() - 1).filter(|&k| x[k + 1] >= r - h && x[k] <= r + h).collect();
        crossing_ok &= near.iter().any(|&k| gab[k] * gab[k + 1] <= 0.0);
        dip_ok &= minima.iter().any(|&k| (x[k] - r).abs() <= h);
    }
    notes.push(format!("gamma_AB changes sign within one cell of all {} sabotage positions: {crossing_ok}", roots.len()));
    let min_pos: Vec<String> = minima.iter().map(|&k| format!("{:.2}", x[k])).collect();
    notes.push(format!(
        "gamma_BI has a local minimum within one cell of each: {dip_ok} (its minima lie at x_I = {})",
        min_pos.join(", ")
    ));
    Ok((deterministic && locus_ok && crossing_ok && dip_ok, notes.join("; ")))
}

/// Runs one named check.
pub fn run_check(name: &str, tol: &Tolerances) -> Result<CheckOutcome, CliError> {
    let (name, f): (&'static str, fn(&Tolerances) -> Verdict) = match name {
        "hard_sphere_maximum" => (CHECK_NAMES[0], hard_sphere_maximum),
        "gaussian_maximum" => (CHECK_NAMES[1], gaussian_maximum),
        "threshold_coupling_reaches_right_angle" => (CHECK_NAMES[2], thresholds),
        "sabotage_completeness" => (CHECK_NAMES[3], sabotage_completeness),
        "closed_forms_match_oracle" => (CHECK_NAMES[4], closed_forms_match_oracle),
        "vanishing_outside_null_band" => (CHECK_NAMES[5], vanishing_outside_null_band),
        "full_state_reduces_to_pair_state" => (CHECK_NAMES[6], full_state_reduces),
        "measures_match_oracles" => (CHECK_NAMES[7], measures_match_oracles),
        "validity_functional_negative" => (CHECK_NAMES[8], validity_functional_negative),
        "strong_coupling_decay" => (CHECK_NAMES[9], strong_coupling_decay),
        "toy_model_checks" => (CHECK_NAMES[10], toy_model),
        "figure_presets" => (CHECK_NAMES[11], figure_presets),
        other => return Err(CliError::Semantic { path: "check".into(), message: format!("unknown check `{other}`") }),
    };
    let start = Instant::now();
    let (passed, detail) = match f(tol) {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Ok(CheckOutcome { name, passed, detail, elapsed: start.elapsed() })
}

/// Runs the whole suite in order.
pub fn run_checks(tol: &Tolerances) -> Vec<CheckOutcome> {
    CHECK_NAMES.iter().map(|n| run_check(n, tol).expect("known check")).collect()
}
