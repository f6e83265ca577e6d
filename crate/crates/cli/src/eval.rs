//! Single evaluations and parameter sweeps.

use rayon::prelude::*;
use udw_kernel::{OverlapSet, QuadConfig};
use udw_measures::{correlation_report, CMethod};
use udw_state::{pair_params, Participant, Scenario};

use crate::config::{Output, ScenarioConfig};
use crate::table::{Cell, Table};
use crate::CliError;

/// One evaluated point: named cells and any pair-selection warnings.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalOutput {
    pub header: Vec<String>,
    pub cells: Vec<Cell>,
    pub warnings: Vec<String>,
}

impl EvalOutput {
    pub fn get(&self, name: &str) -> Option<&Cell> {
        self.header.iter().position(|h| h == name).map(|k| &self.cells[k])
    }

    pub fn number(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(Cell::as_f64)
    }

    /// Aligned `name  value` lines.
    pub fn to_text(&self) -> String {
        let w = self.header.iter().map(|h| h.len()).max().unwrap_or(0);
        let mut s = String::new();
        for (h, c) in self.header.iter().zip(&self.cells) {
            s.push_str(&format!("{h:<w$}  {}\n", c.render()));
        }
        for warn in &self.warnings {
            s.push_str(&format!("warning: {warn}\n"));
        }
        s
    }
}

pub fn evaluate_point(cfg: &ScenarioConfig) -> Result<EvalOutput, CliError> {
    cfg.check_point()?;
    let specs = cfg.specs();
    let quad = QuadConfig::default();
    let overlaps = OverlapSet::compute(&specs, &quad)?;
    let mut header = Vec::new();
    let mut cells = Vec::new();
    let mut warnings = Vec::new();
    let mut push = |h: String, c: Cell| {
        header.push(h);
        cells.push(c);
    };
    let wants = |o: Output| cfg.outputs.contains(&o);

    if wants(Output::Overlaps) {
        let n = specs.len();
        for i in 0..n {
            for j in i..n {
                let (a, b) = (&specs[i].label, &specs[j].label);
                push(format!("zeta_{a}_{b}"), Cell::Num(overlaps.zeta_at(i, j)));
                if i != j {
                    push(format!("xi_{a}_{b}"), Cell::Num(overlaps.xi_at(i, j)));
                }
            }
        }
    }
    if cfg.wants_measures() {
        let participants = cfg.detectors.iter().map(|d| Participant { detector: d.spec.clone(), role: d.role }).collect();
        let scenario = Scenario::new(participants, cfg.field_phases.clone())?;
        let sel = pair_params(&scenario, &overlaps)?;
        warnings = sel.warnings.clone();
        let report = correlation_report(&sel.params, scenario.alice().gap, scenario.bob().gap)?;
        if wants(Output::Energy) {
            push("energy".into(), Cell::Num(report.energy));
        }
        if wants(Output::Pauli) {
            for m in 0..3 {
                for n in 0..3 {
                    push(format!("pauli_{}{}", m + 1, n + 1), Cell::Num(report.pauli_table[m][n]));
                }
            }
        }
        if wants(Output::Mi) {
            push("mi".into(), Cell::Num(report.mutual_information));
        }
        if wants(Output::C) {
            push("c".into(), Cell::Num(report.c_function));
            let method = match report.c_method {
                CMethod::ClosedForm => "closed_form",
                CMethod::Oracle => "oracle",
            };
            push("c_method".into(), Cell::Text(method.into()));
        }
        if wants(Output::Discord) {
            push("discord".into(), Cell::Num(report.discord));
        }
        if wants(Output::Validity) {
            match &report.validity {
                Some(v) => {
                    push("cond1".into(), Cell::Flag(v.cond1));
                    push("cond2".into(), Cell::Flag(v.cond2));
                    push("cond1_gap".into(), Cell::Num(v.cond1_gap));
                    push("f_value".into(), Cell::Num(v.f_value));
                }
                None => {
                    for h in ["cond1", "cond2", "cond1_gap", "f_value"] {
                        push(h.into(), Cell::Text(String::new()));
                    }
                }
            }
        }
    }
    Ok(EvalOutput { header, cells, warnings })
}

/// Evaluates the configuration once; the table has a single row.
pub fn run_eval(cfg: &ScenarioConfig) -> Result<(EvalOutput, Table), CliError> {
    let out = evaluate_point(cfg)?;
    let mut table = Table::new(out.header.clone());
    table.rows.push(out.cells.clone());
    Ok((out, table))
}

/// Evaluates every grid point (row-major, first axis slowest) in parallel and emits rows in grid order.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<(Table, Vec<String>), CliError> {
    let axes = cfg.sweep.clone().ok_or_else(|| CliError::Semantic {
        path: "sweep".into(),
        message: "the sweep command needs a [sweep] block".into(),
    })?;
    let total = cfg.grid_len();
    let results: Vec<Result<(Vec<f64>, EvalOutput), CliError>> = (0..total)
        .into_par_iter()
        .map(|index| {
            let mut point = cfg.clone();
            let mut rem = index;
            let mut values = vec![0.0; axes.len()];
            for (k, axis) in axes.iter().enumerate().rev() {
                values[k] = axis.value(rem % axis.steps);
                rem /= axis.steps;
            }
            for (axis, &v) in axes.iter().zip(&values) {
                point.set(axis, v);
            }
            evaluate_point(&point)
                .map(|o| (values, o))
                .map_err(|e| CliError::AtPoint { index, source: Box::new(e) })
        })
        .collect();

    let mut table = Table::new(Vec::new());
    for a in &axes {
        table.comments.push(format!("axis {}: {} to {} in {} steps", a.name, a.start, a.stop, a.steps));
    }
    let mut warnings: Vec<String> = Vec::new();
    for r in results {
        let (values, out) = r?;
        if table.header.is_empty() {
            table.header = axes.iter().map(|a| a.name.clone()).chain(out.header.iter().cloned()).collect();
        }
        for w in out.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        table.rows.push(values.into_iter().map(Cell::Num).chain(out.cells).collect());
    }
    Ok((table, warnings))
}
