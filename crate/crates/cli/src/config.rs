//! Scenario configuration files (TOML).

use std::collections::BTreeMap;

use serde::Deserialize;
use udw_kernel::{DetectorSpec, ShapeKind, SmearingShape};
use udw_state::Role;

use crate::CliError;

/// Largest sweep grid accepted.
pub const MAX_GRID_POINTS: usize = 10_000_000;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    unit_sigma: Option<f64>,
    detectors: Vec<RawDetector>,
    #[serde(default)]
    field_phases: BTreeMap<String, f64>,
    sweep: Option<RawSweep>,
    outputs: Option<Vec<String>>,
}

#[derive(Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum RawRole {
    Alice,
    Bob,
    Interloper,
}

#[derive(Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum RawKind {
    HardSphere,
    Gaussian,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSmearing {
    kind: RawKind,
    sigma: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    label: String,
    role: RawRole,
    #[serde(default)]
    position: [f64; 3],
    #[serde(default)]
    time: f64,
    coupling: f64,
    gap: Option<f64>,
    smearing: Option<RawSmearing>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    parameter: OneOrMany,
    start: f64,
    stop: f64,
    steps: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axes: Vec<RawAxis>,
}

/// A per-detector quantity that a sweep may set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Coordinate(usize),
    Time,
    Coupling,
    /// Sets the coupling to √v.
    CouplingSquared,
    Gap,
    Sigma,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParameterPath {
    Detector { index: usize, field: Field },
    FieldPhase(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    /// Column name in the CSV output.
    pub name: String,
    /// All paths are set to the same value.
    pub targets: Vec<ParameterPath>,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn value(&self, k: usize) -> f64 {
        if k + 1 == self.steps {
            self.stop
        } else {
            self.start + (self.stop - self.start) * k as f64 / (self.steps - 1) as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Output {
    Overlaps,
    Energy,
    Pauli,
    Mi,
    C,
    Discord,
    Validity,
}

impl Output {
    pub const ALL: [Output; 7] =
        [Output::Overlaps, Output::Energy, Output::Pauli, Output::Mi, Output::C, Output::Discord, Output::Validity];

    pub fn name(self) -> &'static str {
        match self {
            Output::Overlaps => "overlaps",
            Output::Energy => "energy",
            Output::Pauli => "pauli",
            Output::Mi => "mi",
            Output::C => "c",
            Output::Discord => "discord",
            Output::Validity => "validity",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == s)
    }

    pub fn is_measure(self) -> bool {
        self != Output::Overlaps
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfiguredDetector {
    pub spec: DetectorSpec,
    pub role: Role,
}

/// A validated scenario with defaults applied.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub unit_sigma: f64,
    pub detectors: Vec<ConfiguredDetector>,
    pub field_phases: BTreeMap<String, f64>,
    pub sweep: Option<Vec<SweepAxis>>,
    /// Sorted, without duplicates.
    pub outputs: Vec<Output>,
}

impl ScenarioConfig {
    pub fn wants_measures(&self) -> bool {
        self.outputs.iter().any(|o| o.is_measure())
    }

    pub fn grid_len(&self) -> usize {
        self.sweep.as_ref().map_or(1, |axes| axes.iter().map(|a| a.steps).product())
    }

    /// Applies `value` to every target of `axis`.
    pub fn set(&mut self, axis: &SweepAxis, value: f64) {
        for target in &axis.targets {
            match target {
                ParameterPath::FieldPhase(label) => {
                    self.field_phases.insert(label.clone(), value);
                }
                ParameterPath::Detector { index, field } => {
                    let d = &mut self.detectors[*index].spec;
                    match field {
                        Field::Coordinate(k) => d.position[*k] = value,
                        Field::Time => d.time = value,
                        Field::Coupling => d.coupling = value,
                        Field::CouplingSquared => d.coupling = value.sqrt(),
                        Field::Gap => d.gap = value,
                        Field::Sigma => d.smearing.sigma = value,
                    }
                }
            }
        }
    }

    /// Checks that hold for every evaluated point, with config field paths in the messages.
    pub fn check_point(&self) -> Result<(), CliError> {
        for (k, d) in self.detectors.iter().enumerate() {
            let s = &d.spec;
            if !s.position.iter().all(|v| v.is_finite()) {
                return Err(semantic(format!("detectors[{k}].position"), "must be finite"));
            }
            if !s.time.is_finite() {
                return Err(semantic(format!("detectors[{k}].time"), "must be finite"));
            }
            if !(s.coupling >= 0.0 && s.coupling.is_finite()) {
                return Err(semantic(format!("detectors[{k}].coupling"), "must be finite and non-negative"));
            }
            if !(s.gap >= 0.0 && s.gap.is_finite()) {
                return Err(semantic(format!("detectors[{k}].gap"), "must be finite and non-negative"));
            }
            if !(s.smearing.sigma > 0.0 && s.smearing.sigma.is_finite()) {
                return Err(semantic(format!("detectors[{k}].smearing.sigma"), "must be positive and finite"));
            }
            if k > 0 && s.smearing != self.detectors[0].spec.smearing {
                return Err(semantic(
                    format!("detectors[{k}].smearing"),
                    "all detectors must share one smearing shape and width",
                ));
            }
        }
        if self.wants_measures() {
            let a = self.index_of(Role::Alice).expect("validated");
            let b = self.index_of(Role::Bob).expect("validated");
            let (ta, tb) = (self.detectors[a].spec.time, self.detectors[b].spec.time);
            if !(ta < tb) {
                return Err(semantic(
                    format!("detectors[{b}].time"),
                    &format!("bob must couple after alice (t_A = {ta}, t_B = {tb})"),
                ));
            }
        }
        for (label, v) in &self.field_phases {
            if !v.is_finite() {
                return Err(semantic(format!("field_phases.{label}"), "must be finite"));
            }
        }
        Ok(())
    }

    pub fn index_of(&self, role: Role) -> Option<usize> {
        self.detectors.iter().position(|d| d.role == role)
    }

    pub fn specs(&self) -> Vec<DetectorSpec> {
        self.detectors.iter().map(|d| d.spec.clone()).collect()
    }
}

fn semantic(path: String, msg: &str) -> CliError {
    CliError::Semantic { path, message: msg.to_string() }
}

fn parse_path(text: &str, labels: &[String], axis: usize) -> Result<ParameterPath, CliError> {
    let where_ = format!("sweep.axes[{axis}].parameter");
    let parts: Vec<&str> = text.split('.').collect();
    match parts.as_slice() {
        ["field_phases", label] => {
            if labels.iter().any(|l| l == label) {
                Ok(ParameterPath::FieldPhase(label.to_string()))
            } else {
                Err(semantic(where_, &format!("unknown detector `{label}` in `{text}`")))
            }
        }
        ["detectors", label, field] => {
            let index = labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| semantic(where_.clone(), &format!("unknown detector `{label}` in `{text}`")))?;
            let field = match *field {
                "x" => Field::Coordinate(0),
                "y" => Field::Coordinate(1),
                "z" => Field::Coordinate(2),
                "time" => Field::Time,
                "coupling" => Field::Coupling,
                "coupling_squared" => Field::CouplingSquared,
                "gap" => Field::Gap,
                "sigma" => Field::Sigma,
                other => return Err(semantic(where_, &format!("unknown detector field `{other}`"))),
            };
            Ok(ParameterPath::Detector { index, field })
        }
        _ => Err(semantic(where_, &format!("cannot parse parameter path `{text}`"))),
    }
}

/// Parses and validates a configuration. Syntax errors carry line and column.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let unit_sigma = raw.unit_sigma.unwrap_or(1.0);
    if !(unit_sigma > 0.0 && unit_sigma.is_finite()) {
        return Err(semantic("unit_sigma".into(), "must be positive and finite"));
    }
    if raw.detectors.is_empty() {
        return Err(semantic("detectors".into(), "at least one detector is required"));
    }

    let mut outputs = Vec::new();
    match &raw.outputs {
        None => outputs.extend(Output::ALL),
        Some(names) => {
            for (k, n) in names.iter().enumerate() {
                let o = Output::parse(n).ok_or_else(|| {
                    let known: Vec<&str> = Output::ALL.iter().map(|o| o.name()).collect();
                    semantic(format!("outputs[{k}]"), &format!("unknown output `{n}` (known: {})", known.join(", ")))
                })?;
                outputs.push(o);
            }
            if outputs.is_empty() {
                return Err(semantic("outputs".into(), "list is empty"));
            }
        }
    }
    outputs.sort();
    outputs.dedup();

    let mut detectors = Vec::new();
    let mut first_of: BTreeMap<&str, usize> = BTreeMap::new();
    for (k, d) in raw.detectors.iter().enumerate() {
        if d.label.is_empty() || !d.label.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
            return Err(semantic(format!("detectors[{k}].label"), "labels must be non-empty and use [A-Za-z0-9_-]"));
        }
        if let Some(j) = raw.detectors[..k].iter().position(|e| e.label == d.label) {
            return Err(semantic(format!("detectors[{k}].label"), &format!("duplicate of detectors[{j}].label `{}`", d.label)));
        }
        let role = match d.role {
            RawRole::Alice => Role::Alice,
            RawRole::Bob => Role::Bob,
            RawRole::Interloper => Role::Interloper,
        };
        if role != Role::Interloper {
            let name = if role == Role::Alice { "alice" } else { "bob" };
            if let Some(j) = first_of.insert(name, k) {
                return Err(semantic(format!("detectors[{k}].role"), &format!("second {name} (first is detectors[{j}])")));
            }
        }
        let (kind, sigma) = match &d.smearing {
            None => (ShapeKind::HardSphere, unit_sigma),
            Some(s) => (
                match s.kind {
                    RawKind::HardSphere => ShapeKind::HardSphere,
                    RawKind::Gaussian => ShapeKind::Gaussian,
                },
                s.sigma.unwrap_or(unit_sigma),
            ),
        };
        let spec = DetectorSpec {
            label: d.label.clone(),
            position: d.position,
            time: d.time,
            coupling: d.coupling,
            gap: d.gap.unwrap_or(1.0 / unit_sigma),
            smearing: SmearingShape { kind, sigma },
        };
        detectors.push(ConfiguredDetector { spec, role });
    }
    let labels: Vec<String> = detectors.iter().map(|d| d.spec.label.clone()).collect();
    if outputs.iter().any(|o| o.is_measure()) {
        for name in ["alice", "bob"] {
            if !first_of.contains_key(name) {
                return Err(semantic("detectors".into(), &format!("measures were requested but no detector has role {name}")));
            }
        }
    }
    for label in raw.field_phases.keys() {
        if !labels.contains(label) {
            return Err(semantic(format!("field_phases.{label}"), "no detector has this label"));
        }
    }

    let sweep = match raw.sweep {
        None => None,
        Some(s) => {
            if s.axes.is_empty() || s.axes.len() > 2 {
                return Err(semantic("sweep.axes".into(), "a sweep has one or two axes"));
            }
            let mut axes = Vec::new();
            for (k, a) in s.axes.iter().enumerate() {
                let paths = match &a.parameter {
                    OneOrMany::One(p) => vec![p.clone()],
                    OneOrMany::Many(ps) => ps.clone(),
                };
                if paths.is_empty() {
                    return Err(semantic(format!("sweep.axes[{k}].parameter"), "no parameter given"));
                }
                let targets =
                    paths.iter().map(|p| parse_path(p, &labels, k)).collect::<Result<Vec<_>, _>>()?;
                if a.steps < 2 {
                    return Err(semantic(format!("sweep.axes[{k}].steps"), &format!("needs at least 2 steps, got {}", a.steps)));
                }
                if !(a.start.is_finite() && a.stop.is_finite()) {
                    return Err(semantic(format!("sweep.axes[{k}]"), "start and stop must be finite"));
                }
                if a.start == a.stop {
                    return Err(semantic(format!("sweep.axes[{k}]"), "start and stop coincide (degenerate range)"));
                }
                axes.push(SweepAxis { name: paths.join("+"), targets, start: a.start, stop: a.stop, steps: a.steps });
            }
            let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.steps));
            match total {
                Some(n) if n <= MAX_GRID_POINTS => {}
                _ => return Err(CliError::Capacity { limit: MAX_GRID_POINTS }),
            }
            Some(axes)
        }
    };

    let cfg = ScenarioConfig { unit_sigma, detectors, field_phases: raw.field_phases, sweep, outputs };
    cfg.check_point()?;
    Ok(cfg)
}
