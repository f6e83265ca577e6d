use udw_state::{build_pair_state, to_energy_basis, PairParams};

use crate::correlators::{energy_correlator, pauli_table_of};
use crate::discord::{discord_oracle, discord_validity, henderson_vedral_c, DiscordValidity, MeasuredSide};
use crate::entropy::mutual_information;
use crate::MeasureError;

/// How C was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CMethod {
    ClosedForm,
    /// The closed form was not applicable or not justified; the measurement oracle was used.
    Oracle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    /// Γ(S_m^A, S_n^B), row m, column n.
    pub pauli_table: [[f64; 3]; 3],
    pub energy: f64,
    pub mutual_information: f64,
    pub c_function: f64,
    pub discord: f64,
    pub c_method: CMethod,
    /// Present when the energy-basis state is an X-state (vacuum field).
    pub validity: Option<DiscordValidity>,
}

impl CorrelationReport {
    /// Largest |Γ(S_m^A, S_n^B)|.
    pub fn max_pauli(&self) -> f64 {
        self.pauli_table.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Every measure for one pair, routing to numerical paths where closed forms do not apply.
pub fn correlation_report(p: &PairParams, omega_a: f64, omega_b: f64) -> Result<CorrelationReport, MeasureError> {
    let s = build_pair_state(p)?;
    let pauli_table = pauli_table_of(&s)?;
    let energy = energy_correlator(p, omega_a, omega_b)?;
    let mutual_information = mutual_information(p)?;
    let (c_function, c_method, validity) = if p.is_identical() && p.is_vacuum() {
        let hv = henderson_vedral_c(p)?;
        let method = if hv.fallback_used { CMethod::Oracle } else { CMethod::ClosedForm };
        (hv.c, method, Some(hv.validity))
    } else {
        let validity = discord_validity(&to_energy_basis(&s, 0.0, 0.0)?).ok();
        (discord_oracle(&s, 24, MeasuredSide::First)?.c, CMethod::Oracle, validity)
    };
    let discord = (mutual_information - c_function).max(-1e-9);
    Ok(CorrelationReport { pauli_table, energy, mutual_information, c_function, discord, c_method, validity })
}
