//! Residual checks of trajectories and of exact derivative identities.

use std::fmt;

use serde::Serialize;

use super::{kdv_rhs, toda_rhs, Trajectory};
use crate::banded::{Banded, BandedHessenberg, Scalar, ONE, ZERO};
use crate::darboux::GammaTable;
use crate::error::{Error, Result};
use crate::lu::{char_poly, ShiftedProblem};

/// The quantity a residual was measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum EntryId {
    /// Matrix entry `a[row][col]`.
    Band { row: usize, col: usize },
    /// `gamma_n`.
    Gamma(i64),
    /// `P_n`.
    Poly(usize),
    /// `delta_k^(i)`.
    Delta { i: usize, k: isize },
}

impl fmt::Display for EntryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryId::Band { row, col } => write!(f, "a[{row}][{col}]"),
            EntryId::Gamma(n) => write!(f, "gamma[{n}]"),
            EntryId::Poly(n) => write!(f, "P[{n}]"),
            EntryId::Delta { i, k } => write!(f, "delta[{i}][{k}]"),
        }
    }
}

impl From<EntryId> for String {
    fn from(e: EntryId) -> Self {
        e.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub check: String,
    pub max_residual: f64,
    /// Worst entry and the sample index it occurred at.
    pub argmax: Option<(EntryId, usize)>,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub(crate) fn new(check: impl Into<String>, tolerance: f64) -> Self {
        ResidualReport {
            check: check.into(),
            max_residual: 0.0,
            argmax: None,
            tolerance,
            pass: true,
        }
    }

    pub(crate) fn record(&mut self, r: f64, id: EntryId, sample: usize) {
        // A NaN residual counts as the worst possible one.
        let r = if r.is_nan() { f64::INFINITY } else { r };
        if self.argmax.is_none() || r > self.max_residual {
            self.max_residual = r;
            self.argmax = Some((id, sample));
        }
    }

    pub(crate) fn finish(mut self) -> Self {
        self.pass = self.max_residual <= self.tolerance;
        self
    }
}

fn central_difference<'a>(states: &'a [Vec<Scalar>], m: usize, dt: f64) -> impl Iterator<Item = Scalar> + 'a {
    states[m + 1]
        .iter()
        .zip(&states[m - 1])
        .map(move |(a, b)| (a - b) / (2.0 * dt))
}

/// Compares centred differences of sampled matrices with the Toda right-hand
/// side, on entries of the leading `window` block whose stencil stays inside it.
pub fn verify_toda(traj: &Trajectory<BandedHessenberg>, window: usize, tol: f64) -> Result<ResidualReport> {
    if traj.len() < 3 {
        return Err(Error::InsufficientSamples { found: traj.len() });
    }
    let ids: Vec<(usize, usize)> = traj.states[0].entries().map(|(ij, _)| ij).collect();
    let flat: Vec<Vec<Scalar>> = traj
        .states
        .iter()
        .map(|s| s.entries().map(|(_, v)| v).collect())
        .collect();
    let limit = window.min(traj.states[0].n());
    let mut report = ResidualReport::new("toda", tol);
    for m in 1..traj.len() - 1 {
        let rhs = toda_rhs(&traj.states[m]);
        for (idx, d) in central_difference(&flat, m, traj.dt).enumerate() {
            let (row, col) = ids[idx];
            if row + 1 >= limit {
                continue;
            }
            report.record((d - rhs[idx]).norm(), EntryId::Band { row, col }, m);
        }
    }
    Ok(report.finish())
}

/// Compares centred differences of sampled gamma tables with the KdV
/// right-hand side, on every `gamma_n` whose stencil lies in the table.
pub fn verify_kdv(traj: &Trajectory<GammaTable>, tol: f64) -> Result<ResidualReport> {
    if traj.len() < 3 {
        return Err(Error::InsufficientSamples { found: traj.len() });
    }
    let p = traj.states[0].p();
    let flat: Vec<Vec<Scalar>> = traj.states.iter().map(|s| s.values().to_vec()).collect();
    let len = flat[0].len();
    let mut report = ResidualReport::new("kdv", tol);
    for m in 1..traj.len() - 1 {
        let rhs = kdv_rhs(&flat[m], p);
        for (idx, d) in central_difference(&flat, m, traj.dt).enumerate() {
            if idx + 1 + p > len {
                break;
            }
            report.record((d - rhs[idx]).norm(), EntryId::Gamma(idx as i64 + 1), m);
        }
    }
    Ok(report.finish())
}

/// Checks `dP_n/dt = -sum_{i=n-p}^{n-1} a[n][i] P_i(z)` for `n = 1..=m`, where
/// the left side is obtained by differentiating the polynomial recurrence with
/// the supplied derivative `j_dot` (only its band entries are read).
///
/// Residuals are scaled by `max(1, |dP_n/dt|)`.
pub fn check_poly_derivative(
    j: &BandedHessenberg,
    j_dot: &BandedHessenberg,
    z: Scalar,
    m: usize,
    tol: f64,
) -> Result<ResidualReport> {
    let (n, p) = (j.n(), j.p());
    if j_dot.n() != n || j_dot.p() != p {
        return Err(Error::Size("derivative must have the shape of the matrix".into()));
    }
    if m + 1 > n {
        return Err(Error::Size(format!(
            "checking P_1..P_{m} reads row {m} of a {n}x{n} matrix"
        )));
    }
    let polys = char_poly(&ShiftedProblem::new(j.clone(), z), m)?;
    let pv = polys.values();
    let dot = |i: usize, k: usize| if k <= i && i - k <= p { j_dot.get(i, k) } else { ZERO };

    // Differentiated recurrence.
    let mut pdot = vec![ZERO; m + 1];
    for k in 0..m {
        let mut next = -dot(k, k) * pv[k] - (j.get(k, k) - z) * pdot[k];
        for i in k.saturating_sub(p)..k {
            next -= dot(k, i) * pv[i] + j.get(k, i) * pdot[i];
        }
        pdot[k + 1] = next;
    }

    let mut report = ResidualReport::new("poly_derivative", tol);
    for k in 1..=m {
        let mut closed = ZERO;
        for i in k.saturating_sub(p)..k {
            closed -= j.get(k, i) * pv[i];
        }
        let r = (pdot[k] - closed).norm() / closed.norm().max(1.0);
        report.record(r, EntryId::Poly(k), 0);
    }
    Ok(report.finish())
}

/// Checks `d delta_k^(i)/dt = delta_k^(i) (sum_{j=0}^p gamma_{(k+i)p+i+j} - sum_{j=0}^p gamma_{(i-2)p+i+j})`
/// against the product rule applied with the supplied `gamma_dot`, for
/// `k = -1..=p-2` and every `i` whose stencil lies in the table.
///
/// Residuals are scaled by `max(1, |d delta/dt|)`.
pub fn check_delta_derivative(table: &GammaTable, gamma_dot: &[Scalar], tol: f64) -> Result<ResidualReport> {
    let len = table.len();
    if gamma_dot.len() != len {
        return Err(Error::Size(format!(
            "expected {len} derivatives, got {}",
            gamma_dot.len()
        )));
    }
    let p = table.p() as i64;
    let g = |n: i64| table.get(n);
    let gd = |n: i64| if n <= 0 { ZERO } else { gamma_dot[n as usize - 1] };
    let mut report = ResidualReport::new("delta_derivative", tol);
    for i in 1i64.. {
        if (i - 1) * p + i + p > len as i64 {
            break;
        }
        for k in -1..=(p - 2) {
            let top = (k + i) * p + i;
            if top + p > len as i64 {
                break;
            }
            let idx: Vec<i64> = (-1..=k).map(|r| (r + i) * p + i).collect();
            let vals = idx.iter().map(|&n| g(n)).collect::<Result<Vec<_>>>()?;
            let delta = vals.iter().fold(ONE, |a, v| a * v);
            let mut product_rule = ZERO;
            for (r, &n) in idx.iter().enumerate() {
                let others = vals
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| s != r)
                    .fold(ONE, |a, (_, v)| a * v);
                product_rule += gd(n) * others;
            }
            let mut s = ZERO;
            for jj in 0..=p {
                s += g(top + jj)? - g((i - 2) * p + i + jj)?;
            }
            let closed = delta * s;
            let r = (product_rule - closed).norm() / closed.norm().max(1.0);
            report.record(r, EntryId::Delta { i: i as usize, k: k as isize }, 0);
        }
    }
    Ok(report.finish())
}
