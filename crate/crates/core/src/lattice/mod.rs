//! The full Kostant Toda lattice on banded Hessenberg matrices and the
//! discrete KdV lattice on gamma sequences.
//!
//! Toda: `d a[i][j] / dt = (a[i][i] - a[j][j]) a[i][j] + a[i+1][j] - a[i][j-1]`.
//!
//! KdV: `d gamma_n / dt = gamma_n (sum_{i=1}^p gamma_{n+i} - sum_{i=1}^p gamma_{n-i})`.
//!
//! On finite truncations every entry outside the stored range reads as zero.

mod diagram;
mod export;
mod verify;

pub use diagram::{theorem1_diagram, DiagramConfig, DiagramReport, ParamChoice};
pub use export::{write_gamma_csv, write_toda_csv, TrajectoryManifest};
pub use verify::{
    check_delta_derivative, check_poly_derivative, verify_kdv, verify_toda, EntryId, ResidualReport,
};

use crate::banded::{Banded, BandedHessenberg, Scalar, ZERO};
use crate::darboux::GammaTable;
use crate::error::{Error, Result};

/// States sampled at `t_m = t_0 + m dt` by classical fourth-order Runge-Kutta.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }
}

/// Offsets of each band inside the flat `entries` layout of a Hessenberg matrix.
fn band_offsets(p: usize, n: usize) -> Vec<usize> {
    let mut off = Vec::with_capacity(p + 2);
    let mut acc = 0;
    for d in 0..=p {
        off.push(acc);
        acc += n.saturating_sub(d);
    }
    off.push(acc);
    off
}

fn toda_rhs_flat(p: usize, n: usize, off: &[usize], a: &[Scalar]) -> Vec<Scalar> {
    let at = |i: usize, j: usize| -> Scalar {
        if i >= n || j > i || i - j > p {
            ZERO
        } else {
            a[off[i - j] + j]
        }
    };
    let mut out = Vec::with_capacity(a.len());
    for d in 0..=p {
        for j in 0..n.saturating_sub(d) {
            let i = j + d;
            let mut v = (at(i, i) - at(j, j)) * at(i, j) + at(i + 1, j);
            if j > 0 {
                v -= at(i, j - 1);
            }
            out.push(v);
        }
    }
    out
}

/// Right-hand side of the truncated Toda flow, listed in
/// [`BandedHessenberg::entries`] order.
pub fn toda_rhs(j: &BandedHessenberg) -> Vec<Scalar> {
    let (p, n) = (j.p(), j.n());
    let flat: Vec<Scalar> = j.entries().map(|(_, v)| v).collect();
    toda_rhs_flat(p, n, &band_offsets(p, n), &flat)
}

/// Right-hand side of the truncated KdV flow; `gamma[k]` holds `gamma_{k+1}`.
pub fn kdv_rhs(gamma: &[Scalar], p: usize) -> Vec<Scalar> {
    let len = gamma.len();
    let at = |n: isize| -> Scalar {
        if n < 1 || n as usize > len {
            ZERO
        } else {
            gamma[n as usize - 1]
        }
    };
    (1..=len as isize)
        .map(|n| {
            let mut s = ZERO;
            for i in 1..=p as isize {
                s += at(n + i) - at(n - i);
            }
            at(n) * s
        })
        .collect()
}

/// One classical Runge-Kutta step.
pub fn rk4_step(x: &[Scalar], dt: f64, f: impl Fn(&[Scalar]) -> Vec<Scalar>) -> Vec<Scalar> {
    let axpy = |y: &[Scalar], h: f64, k: &[Scalar]| -> Vec<Scalar> {
        y.iter().zip(k).map(|(a, b)| a + b * h).collect()
    };
    let k1 = f(x);
    let k2 = f(&axpy(x, dt / 2.0, &k1));
    let k3 = f(&axpy(x, dt / 2.0, &k2));
    let k4 = f(&axpy(x, dt, &k3));
    x.iter()
        .enumerate()
        .map(|(i, v)| v + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0))
        .collect()
}

fn check_step(dt: f64) -> Result<()> {
    if dt == 0.0 || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("time step must be finite and nonzero, got {dt}")));
    }
    Ok(())
}

fn integrate(
    x0: Vec<Scalar>,
    dt: f64,
    steps: usize,
    f: impl Fn(&[Scalar]) -> Vec<Scalar>,
) -> Result<(Vec<f64>, Vec<Vec<Scalar>>)> {
    check_step(dt)?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x0);
    for m in 1..=steps {
        let next = rk4_step(&states[m - 1], dt, &f);
        if next.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::BlowUp { t: times[m - 1] });
        }
        times.push(m as f64 * dt);
        states.push(next);
    }
    Ok((times, states))
}

/// Integrates the truncated Toda flow from `j0`.
pub fn evolve_toda(j0: &BandedHessenberg, dt: f64, steps: usize) -> Result<Trajectory<BandedHessenberg>> {
    let (p, n) = (j0.p(), j0.n());
    let off = band_offsets(p, n);
    let x0 = j0.entries().map(|(_, v)| v).collect();
    let (times, flat) = integrate(x0, dt, steps, |x| toda_rhs_flat(p, n, &off, x))?;
    let states = flat
        .iter()
        .map(|x| j0.with_entries(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { dt, times, states })
}

/// Integrates the truncated KdV flow from `table`.
pub fn evolve_kdv(table: &GammaTable, dt: f64, steps: usize) -> Result<Trajectory<GammaTable>> {
    let p = table.p();
    let (times, flat) = integrate(table.values().to_vec(), dt, steps, |x| kdv_rhs(x, p))?;
    let states = flat
        .into_iter()
        .map(|x| table.with_values(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { dt, times, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banded::{random_hessenberg, SampleMode};
    use num_complex::Complex64;

    #[test]
    fn toda_rhs_two_by_two() {
        // p = 1, n = 2: a00' = a10, a11' = -a10, a10' = (a11 - a00) a10.
        let j = BandedHessenberg::from_fn(1, 2, |i, k| Complex64::new((1 + 2 * i + k) as f64, 0.0)).unwrap();
        let (a00, a11, a10) = (1.0, 4.0, 3.0);
        let d = toda_rhs(&j);
        assert_eq!(d, vec![a10, -a10, (a11 - a00) * a10].into_iter().map(|v| Complex64::new(v, 0.0)).collect::<Vec<_>>());
    }

    #[test]
    fn kdv_rhs_small() {
        let g: Vec<Scalar> = [1.0, 2.0, 3.0].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        // p = 1: g1 (g2 - 0), g2 (g3 - g1), g3 (0 - g2).
        let d = kdv_rhs(&g, 1);
        assert_eq!(d, vec![2.0, 4.0, -6.0].into_iter().map(|v| Complex64::new(v, 0.0)).collect::<Vec<_>>());
    }

    #[test]
    fn rk4_integrates_exponential() {
        let x0 = vec![Complex64::new(1.0, 0.0)];
        let mut x = x0;
        for _ in 0..10 {
            x = rk4_step(&x, 0.1, |y| y.to_vec());
        }
        assert!((x[0].re - 1f64.exp()).abs() < 1e-5);
    }

    #[test]
    fn evolve_rejects_zero_step_and_reports_blow_up() {
        let j = random_hessenberg(1, 4, 3, SampleMode::Real).unwrap();
        assert!(matches!(evolve_toda(&j, 0.0, 3), Err(Error::InvalidArgument(_))));
        let huge = BandedHessenberg::from_fn(1, 3, |i, k| Complex64::new(if i == k { 1e200 * (i as f64 + 1.0) } else { 1e200 }, 0.0)).unwrap();
        assert!(matches!(evolve_toda(&huge, 1.0, 5), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn evolution_is_reversible() {
        let j = random_hessenberg(2, 6, 11, SampleMode::Complex).unwrap();
        let fwd = evolve_toda(&j, 1e-3, 50).unwrap();
        let back = evolve_toda(fwd.last().unwrap(), -1e-3, 50).unwrap();
        let err = crate::banded::residual(back.last().unwrap(), &j, crate::banded::ValidWindow(6));
        assert!(err < 1e-10, "{err}");
    }
}
