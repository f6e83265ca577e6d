use std::collections::BTreeMap;

use udw_kernel::{DetectorSpec, OverlapSet, QuadConfig};

use crate::pair::PairParams;
use crate::StateError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Alice,
    Bob,
    Interloper,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Participant {
    pub detector: DetectorSpec,
    pub role: Role,
}

/// Detectors with roles and the field's coherent-state phases ξ₀ν (absent labels mean vacuum).
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    participants: Vec<Participant>,
    field_phases: BTreeMap<String, f64>,
}

impl Scenario {
    pub fn new(participants: Vec<Participant>, field_phases: BTreeMap<String, f64>) -> Result<Self, StateError> {
        for (k, p) in participants.iter().enumerate() {
            p.detector.validate()?;
            if participants[..k].iter().any(|q| q.detector.label == p.detector.label) {
                return Err(StateError::Scenario(format!("duplicate label `{}`", p.detector.label)));
            }
        }
        for role in [Role::Alice, Role::Bob] {
            let n = participants.iter().filter(|p| p.role == role).count();
            if n != 1 {
                return Err(StateError::Scenario(format!("expected exactly one {role:?}, found {n}")));
            }
        }
        for (label, v) in &field_phases {
            if !participants.iter().any(|p| &p.detector.label == label) {
                return Err(StateError::UnknownLabel(label.clone()));
            }
            if !v.is_finite() {
                return Err(StateError::Scenario(format!("non-finite field phase for `{label}`")));
            }
        }
        Ok(Self { participants, field_phases })
    }

    pub fn participants(&self) -> &[Participant] {
        &self.participants
    }

    pub fn detectors(&self) -> Vec<DetectorSpec> {
        self.participants.iter().map(|p| p.detector.clone()).collect()
    }

    pub fn field_phases(&self) -> &BTreeMap<String, f64> {
        &self.field_phases
    }

    pub fn field_phase(&self, label: &str) -> f64 {
        self.field_phases.get(label).copied().unwrap_or(0.0)
    }

    fn with_role(&self, role: Role) -> &DetectorSpec {
        // Exactly one of each target role is guaranteed by the constructor.
        &self.participants.iter().find(|p| p.role == role).expect("role checked at construction").detector
    }

    pub fn alice(&self) -> &DetectorSpec {
        self.with_role(Role::Alice)
    }

    pub fn bob(&self) -> &DetectorSpec {
        self.with_role(Role::Bob)
    }

    pub fn interlopers(&self) -> impl Iterator<Item = &DetectorSpec> {
        self.participants.iter().filter(|p| p.role == Role::Interloper).map(|p| &p.detector)
    }

    pub fn overlaps(&self, cfg: &QuadConfig) -> Result<OverlapSet, StateError> {
        Ok(OverlapSet::compute(&self.detectors(), cfg)?)
    }
}

/// Pair parameters together with the interlopers that entered them.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectedPair {
    pub params: PairParams,
    pub included: Vec<String>,
    pub warnings: Vec<String>,
}

/// Collects the Alice–Bob parameters. Interlopers outside [t_A, t_B] are dropped with a warning.
pub fn pair_params(scenario: &Scenario, overlaps: &OverlapSet) -> Result<SelectedPair, StateError> {
    let (a, b) = (scenario.alice(), scenario.bob());
    if !(a.time < b.time) {
        return Err(StateError::Scenario(format!("need t_A < t_B, got t_A = {}, t_B = {}", a.time, b.time)));
    }
    let mut params = PairParams {
        zeta: overlaps.zeta_self(&a.label)?,
        zeta_b: overlaps.zeta_self(&b.label)?,
        zeta_ab: overlaps.zeta(&a.label, &b.label)?,
        xi_ab: overlaps.xi(&a.label, &b.label)?,
        xi_0a: scenario.field_phase(&a.label),
        xi_0b: scenario.field_phase(&b.label),
        xi_jb: Vec::new(),
    };
    let mut included = Vec::new();
    let mut warnings = Vec::new();
    for j in scenario.interlopers() {
        if j.time < a.time {
            warnings.push(format!("interloper `{}` couples before Alice (t = {}) and is excluded", j.label, j.time));
        } else if j.time > b.time {
            warnings.push(format!("interloper `{}` couples after Bob (t = {}) and is excluded", j.label, j.time));
        } else {
            params.xi_jb.push(overlaps.xi(&j.label, &b.label)?);
            included.push(j.label.clone());
        }
    }
    Ok(SelectedPair { params, included, warnings })
}
