use nalgebra::DMatrix;
use udw_kernel::QuadConfig;
use udw_measures::correlation_report;
use udw_state::{build_pair_state, pair_params, partial_state, PairParams, Scenario, C64};

use crate::SabotageError;

/// End-to-end measures for a scenario with interlopers.
#[derive(Clone, Debug, PartialEq)]
pub struct SabotageCheck {
    pub mi: f64,
    pub discord: f64,
    pub c: f64,
    /// Largest |Γ| over the nine Pauli correlators and the energy correlator.
    pub max_correlator: f64,
    /// max |ρ_B − 𝟙/2| entrywise.
    pub bob_mixedness: f64,
    pub params: PairParams,
    pub warnings: Vec<String>,
}

pub fn verify_sabotage(scenario: &Scenario, cfg: &QuadConfig) -> Result<SabotageCheck, SabotageError> {
    if scenario.interlopers().next().is_none() {
        return Err(SabotageError::NoInterloper);
    }
    let overlaps = scenario.overlaps(cfg)?;
    let sel = pair_params(scenario, &overlaps)?;
    let report = correlation_report(&sel.params, scenario.alice().gap, scenario.bob().gap)?;
    let state = build_pair_state(&sel.params)?;
    let rho_b = partial_state(&state, &["B"])?;
    let half = DMatrix::<C64>::identity(2, 2) * C64::new(0.5, 0.0);
    let bob_mixedness = (rho_b - half).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    Ok(SabotageCheck {
        mi: report.mutual_information,
        discord: report.discord,
        c: report.c_function,
        max_correlator: report.max_pauli().max(report.energy.abs()),
        bob_mixedness,
        params: sel.params,
        warnings: sel.warnings,
    })
}
