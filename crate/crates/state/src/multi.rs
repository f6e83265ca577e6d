use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix4};
use rayon::prelude::*;
use udw_kernel::{DetectorSpec, OverlapSet};

use crate::basis::TwoQubitState;
use crate::linalg::{check_density, partial_trace, C64};
use crate::{StateError, MAX_QUBITS};

/// Dense joint state of N detectors in the S basis, qubits in coupling order.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiQubitState {
    matrix: DMatrix<C64>,
    labels: Vec<String>,
}

// Positivity is checked by full diagonalisation only up to this size; beyond it the state is
// positive by construction and the check would dominate the cost.
const PSD_CHECK_MAX: usize = 8;

impl MultiQubitState {
    pub fn new(matrix: DMatrix<C64>, labels: Vec<String>) -> Result<Self, StateError> {
        let n = labels.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(StateError::Capacity { n });
        }
        if matrix.nrows() != 1 << n || matrix.ncols() != 1 << n {
            return Err(StateError::InvalidState(format!("matrix does not match {n} labels")));
        }
        check_density(&matrix, (n <= PSD_CHECK_MAX).then_some(1e-10))?;
        Ok(Self { matrix, labels })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn position(&self, label: &str) -> Result<usize, StateError> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| StateError::UnknownLabel(label.to_string()))
    }

    /// Reduced matrix on `keep`, in the order given.
    pub fn partial(&self, keep: &[&str]) -> Result<DMatrix<C64>, StateError> {
        let idx = keep.iter().map(|l| self.position(l)).collect::<Result<Vec<_>, _>>()?;
        partial_trace(&self.matrix, self.len(), &idx)
    }
}

/// Reduced density matrix on a label subset of either state type.
pub fn partial_state<S: Labelled>(s: &S, keep: &[&str]) -> Result<DMatrix<C64>, StateError> {
    let labels = s.qubit_labels();
    let idx = keep
        .iter()
        .map(|k| labels.iter().position(|l| l == k).ok_or_else(|| StateError::UnknownLabel(k.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    partial_trace(&s.dense(), labels.len(), &idx)
}

/// States whose qubits carry labels.
pub trait Labelled {
    fn qubit_labels(&self) -> Vec<String>;
    fn dense(&self) -> DMatrix<C64>;
}

impl Labelled for MultiQubitState {
    fn qubit_labels(&self) -> Vec<String> {
        self.labels.clone()
    }
    fn dense(&self) -> DMatrix<C64> {
        self.matrix.clone()
    }
}

impl Labelled for TwoQubitState {
    fn qubit_labels(&self) -> Vec<String> {
        self.labels().to_vec()
    }
    fn dense(&self) -> DMatrix<C64> {
        self.to_dmatrix()
    }
}

/// Coupling order by (time, label), with warnings for equal-time detectors whose supports overlap.
pub fn coupling_order(detectors: &[DetectorSpec]) -> (Vec<usize>, Vec<String>) {
    let mut order: Vec<usize> = (0..detectors.len()).collect();
    order.sort_by(|&i, &j| {
        detectors[i].time.total_cmp(&detectors[j].time).then_with(|| detectors[i].label.cmp(&detectors[j].label))
    });
    let mut warnings = Vec::new();
    for w in order.windows(2) {
        let (a, b) = (&detectors[w[0]], &detectors[w[1]]);
        if a.time == b.time {
            let reach = a.smearing.support_radius() + b.smearing.support_radius();
            if a.distance_to(b) < reach {
                warnings.push(format!(
                    "`{}` and `{}` couple at the same time with overlapping supports; ordered by label",
                    a.label, b.label
                ));
            }
        }
    }
    (order, warnings)
}

/// Field-augmented T table: index 0 is the field, 1..=N the detectors in the given order.
fn t_table(
    labels: &[&str],
    field_phases: &BTreeMap<String, f64>,
    overlaps: &OverlapSet,
) -> Result<Vec<Vec<C64>>, StateError> {
    let n = labels.len();
    let idx = labels.iter().map(|l| overlaps.index(l)).collect::<Result<Vec<_>, _>>()?;
    let mut t = vec![vec![C64::new(0.0, 0.0); n + 1]; n + 1];
    for (a, &ia) in idx.iter().enumerate() {
        let x0 = field_phases.get(labels[a]).copied().unwrap_or(0.0);
        t[0][a + 1] = C64::new(0.0, -x0 / 4.0);
        t[a + 1][0] = C64::new(0.0, x0 / 4.0);
        for (b, &ib) in idx.iter().enumerate() {
            t[a + 1][b + 1] = C64::new(overlaps.zeta_at(ia, ib), overlaps.xi_at(ia, ib)) / 4.0;
        }
    }
    Ok(t)
}

#[inline]
fn spin(index: usize, q: usize, n: usize) -> f64 {
    if index >> (n - 1 - q) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Exact joint state of all detectors. The input is reordered by coupling time.
pub fn build_full_state(
    detectors: &[DetectorSpec],
    field_phases: &BTreeMap<String, f64>,
    overlaps: &OverlapSet,
) -> Result<MultiQubitState, StateError> {
    let n = detectors.len();
    if n == 0 || n > MAX_QUBITS {
        return Err(StateError::Capacity { n });
    }
    let (order, _) = coupling_order(detectors);
    let labels: Vec<&str> = order.iter().map(|&k| detectors[k].label.as_str()).collect();
    let t = t_table(&labels, field_phases, overlaps)?;
    let dim = 1usize << n;
    let norm = 1.0 / dim as f64;
    // Column-major fill: column s′, row s.
    let data: Vec<C64> = (0..dim)
        .into_par_iter()
        .flat_map_iter(|c| {
            let t = &t;
            (0..dim).map(move |r| {
                let s = |q: usize| if q == 0 { 1.0 } else { spin(r, q - 1, n) };
                let sp = |q: usize| if q == 0 { 1.0 } else { spin(c, q - 1, n) };
                let mut e = C64::new(0.0, 0.0);
                for i in 1..=n {
                    let d = sp(i) - s(i);
                    if d == 0.0 {
                        continue;
                    }
                    e += t[i][i] * (s(i) * sp(i) - 1.0);
                    for j in 0..i {
                        e += (t[i][j] * s(j) - t[j][i] * sp(j)) * d;
                    }
                }
                e.exp() * norm
            })
        })
        .collect();
    let matrix = DMatrix::from_vec(dim, dim, data);
    MultiQubitState::new(matrix, labels.iter().map(|l| l.to_string()).collect())
}

/// Partial trace of the full state onto (a, b), in that order.
pub fn reduce_to_pair(full: &MultiQubitState, a: &str, b: &str) -> Result<TwoQubitState, StateError> {
    if a == b {
        return Err(StateError::InvalidState(format!("pair labels must differ, got `{a}` twice")));
    }
    let m = full.partial(&[a, b])?;
    let m4 = Matrix4::from_iterator(m.iter().copied());
    Ok(TwoQubitState::from_s_basis(m4)?.with_labels(a, b))
}

/// Closed-form reduced state of any two detectors of a scenario, ordered (a, b).
///
/// Detectors coupling between or before the pair enter through cos factors of their ξ with the
/// pair members that couple after them; later detectors drop out.
pub fn pair_state_closed(
    detectors: &[DetectorSpec],
    field_phases: &BTreeMap<String, f64>,
    overlaps: &OverlapSet,
    a: &str,
    b: &str,
) -> Result<TwoQubitState, StateError> {
    if a == b {
        return Err(StateError::InvalidState(format!("pair labels must differ, got `{a}` twice")));
    }
    let (order, _) = coupling_order(detectors);
    let labels: Vec<&str> = order.iter().map(|&k| detectors[k].label.as_str()).collect();
    let find = |l: &str| labels.iter().position(|x| *x == l).ok_or_else(|| StateError::UnknownLabel(l.to_string()));
    let (pa, pb) = (find(a)?, find(b)?);
    let (p, q) = if pa < pb { (pa, pb) } else { (pb, pa) };
    let t = t_table(&labels, field_phases, overlaps)?;
    let (ip, iq) = (p + 1, q + 1);
    let sgn = |bit: usize| if bit == 0 { 1.0 } else { -1.0 };

    let mut m = Matrix4::<C64>::zeros();
    for r in 0..4 {
        for c in 0..4 {
            let (sp_, sq) = (sgn(r >> 1), sgn(r & 1));
            let (tp, tq) = (sgn(c >> 1), sgn(c & 1));
            let mut e = t[ip][ip] * (sp_ * tp - 1.0) + t[iq][iq] * (sq * tq - 1.0);
            e += (t[iq][ip] * sp_ - t[ip][iq] * tp) * (tq - sq);
            e += (t[ip][0] - t[0][ip]) * (tp - sp_) + (t[iq][0] - t[0][iq]) * (tq - sq);
            let mut v = e.exp() / 4.0;
            for k in 0..labels.len() {
                if k == p || k == q {
                    continue;
                }
                let j = k + 1;
                let mut arg = C64::new(0.0, 0.0);
                if p > k {
                    arg += (t[ip][j] - t[j][ip]) * (tp - sp_);
                }
                if q > k {
                    arg += (t[iq][j] - t[j][iq]) * (tq - sq);
                }
                v *= arg.cosh();
            }
            m[(r, c)] = v;
        }
    }
    let ordered = if pa < pb {
        m
    } else {
        // Swap the qubit order: |xy⟩ → |yx⟩.
        let perm = [0, 2, 1, 3];
        Matrix4::from_fn(|r, c| m[(perm[r], perm[c])])
    };
    Ok(TwoQubitState::from_s_basis(ordered)?.with_labels(a, b))
}
