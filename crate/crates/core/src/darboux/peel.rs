//! Peeling lower bidiagonal factors off a unit lower banded matrix.
//!
//! A unit lower `T` with `q` subdiagonals is written as `T = D A`, `D` lower
//! bidiagonal and `A` unit lower with `q - 1` subdiagonals. The first `q - 1`
//! subdiagonal entries of `D` are free; the rest follow from
//! `alpha_i = T[i][i-q] / A[i-1][i-q]`.

use rand::Rng;

use super::ParameterSet;
use crate::banded::{draw_scalar, Banded, Bidiagonal, SampleMode, Scalar, UnitLowerBanded, ONE, ZERO};
use crate::dense::determinant;
use crate::error::{Error, Result};

pub const DEFAULT_MARGIN: f64 = 1e-9;
pub const DEFAULT_MAX_RETRIES: usize = 64;
/// Breakdown threshold of a peel, relative to `max(1, max |T|)`.
pub const DEFAULT_PEEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    /// Relative distance every hyperplane value must keep from zero.
    pub margin: f64,
    pub max_retries: usize,
    pub mode: SampleMode,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            margin: DEFAULT_MARGIN,
            max_retries: DEFAULT_MAX_RETRIES,
            mode: SampleMode::Real,
        }
    }
}

/// Determinant `R_k^(r)` of the `k x k` matrix whose first row is
/// `T[q-r-1][0..k]` and whose row `m >= 1` is `T[q+m-1][0..k]`.
pub fn hyperplane_determinant(t: &UnitLowerBanded, r: usize, k: usize) -> Result<Scalar> {
    let (n, q) = (t.n(), t.bandwidth());
    if r >= q.max(1) || k == 0 || q + k > n + 1 {
        return Err(Error::InvalidArgument(format!(
            "R_{k}^({r}) is undefined for n = {n}, q = {q}"
        )));
    }
    let mut rows = Vec::with_capacity(k);
    rows.push((0..k).map(|c| t.get(q - r - 1, c)).collect());
    for m in 1..k {
        rows.push((0..k).map(|c| t.get(q + m - 1, c)).collect());
    }
    Ok(determinant(rows))
}

/// Values `S_k = R_k^(0) - sum_j x_j R_k^(j)` for `k = 1..=depth`, each with
/// its scale `|R_k^(0)| + sum_j |x_j| |R_k^(j)|`.
pub fn hyperplane_values(t: &UnitLowerBanded, xs: &[Scalar], depth: usize) -> Result<Vec<(Scalar, f64)>> {
    let q = t.bandwidth();
    if xs.len() + 1 != q {
        return Err(Error::InvalidArgument(format!(
            "q = {q} needs {} coordinates, got {}",
            q.saturating_sub(1),
            xs.len()
        )));
    }
    (1..=depth)
        .map(|k| {
            let r0 = hyperplane_determinant(t, 0, k)?;
            let (mut s, mut scale) = (r0, r0.norm());
            for (j, x) in xs.iter().enumerate() {
                let rj = hyperplane_determinant(t, j + 1, k)?;
                s -= x * rj;
                scale += x.norm() * rj.norm();
            }
            Ok((s, scale))
        })
        .collect()
}

/// Free entries `alpha_1, ..., alpha_{q-1}` from the coordinates `x`:
/// `alpha_{q-1} = x_1`, `alpha_{q-j} = (-1)^(j+1) x_j / (alpha_{q-j+1} ... alpha_{q-1})`.
fn alphas_from_coordinates(xs: &[Scalar]) -> Vec<Scalar> {
    let q = xs.len() + 1;
    let mut alphas = vec![ZERO; q - 1];
    let mut tail = ONE;
    for (idx, x) in xs.iter().enumerate() {
        let j = idx + 1;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let a = x * sign / tail;
        alphas[q - j - 1] = a;
        tail *= a;
    }
    alphas
}

/// Draws the `q - 1` free entries of the next peel so that the first
/// `depth` hyperplane values clear the relative margin.
pub fn sample_parameters<R: Rng + ?Sized>(
    t: &UnitLowerBanded,
    depth: usize,
    rng: &mut R,
    opts: &SamplingOptions,
) -> Result<Vec<Scalar>> {
    let q = t.bandwidth();
    if q < 2 {
        return Ok(Vec::new());
    }
    let depth = depth.min(t.n() + 1 - q);
    let mut tightest = 0.0f64;
    for _ in 0..opts.max_retries.max(1) {
        let xs: Vec<Scalar> = (1..q).map(|_| draw_scalar(rng, 1.0, 2.0, opts.mode)).collect();
        let worst = hyperplane_values(t, &xs, depth)?
            .into_iter()
            .map(|(s, scale)| if scale > 0.0 { s.norm() / scale } else { 0.0 })
            .fold(f64::INFINITY, f64::min);
        if worst > opts.margin {
            return Ok(alphas_from_coordinates(&xs));
        }
        tightest = tightest.max(worst);
    }
    Err(Error::SamplingFailed {
        stage: 0,
        attempts: opts.max_retries.max(1),
        tightest_margin: tightest,
    })
}

/// Splits `T = D A` with the given free entries of `D`.
pub fn peel(t: &UnitLowerBanded, alphas: &[Scalar], rel_tol: f64) -> Result<(Bidiagonal, UnitLowerBanded)> {
    let (n, q) = (t.n(), t.bandwidth());
    if q == 0 {
        return Err(Error::InvalidArgument("nothing to peel from the identity".into()));
    }
    if alphas.len() != q - 1 {
        return Err(Error::Size(format!(
            "a peel of bandwidth {q} takes {} free entries, got {}",
            q - 1,
            alphas.len()
        )));
    }
    let threshold = rel_tol * t.max_modulus();
    // a[i][d - 1] = A[i][i - d]
    let mut a: Vec<Vec<Scalar>> = vec![vec![ZERO; q - 1]; n];
    let a_at = |a: &Vec<Vec<Scalar>>, i: usize, j: usize| -> Scalar {
        if i == j {
            ONE
        } else if i - j < q {
            a[i][i - j - 1]
        } else {
            ZERO
        }
    };
    let mut sub = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let alpha = if i < q {
            alphas[i - 1]
        } else {
            let deep = a_at(&a, i - 1, i - q);
            if deep.norm() <= threshold || !deep.norm().is_finite() {
                return Err(Error::PeelBreakdown {
                    stage: 0,
                    row: i - 1,
                    modulus: deep.norm(),
                });
            }
            t.get(i, i - q) / deep
        };
        sub.push(alpha);
        for j in (i + 1).saturating_sub(q)..i {
            let v = t.get(i, j) - alpha * a_at(&a, i - 1, j);
            a[i][i - j - 1] = v;
        }
    }
    // The last deep entries feed the next peel.
    if q >= 2 {
        for i in (q - 1)..n {
            let deep = a[i][q - 2];
            if deep.norm() <= threshold || !deep.norm().is_finite() {
                return Err(Error::PeelBreakdown {
                    stage: 0,
                    row: i,
                    modulus: deep.norm(),
                });
            }
        }
    }
    let d = Bidiagonal::lower(n, sub)?;
    let rest = UnitLowerBanded::from_fn(q - 1, n, |i, j| a[i][i - j - 1])?;
    Ok((d, rest))
}

fn tag_stage(e: Error, stage: usize) -> Error {
    match e {
        Error::PeelBreakdown { row, modulus, .. } => Error::PeelBreakdown { stage, row, modulus },
        Error::SamplingFailed {
            attempts,
            tightest_margin,
            ..
        } => Error::SamplingFailed {
            stage,
            attempts,
            tightest_margin,
        },
        other => other,
    }
}

fn last_factor(t: &UnitLowerBanded) -> Result<Bidiagonal> {
    Bidiagonal::lower(t.n(), t.band(1).to_vec())
}

/// `L = L^(1) ... L^(p)` for the unit lower factor of an LU split.
pub fn darboux_factorize(l: &UnitLowerBanded, params: &ParameterSet, rel_tol: f64) -> Result<Vec<Bidiagonal>> {
    let p = l.bandwidth();
    if params.p() != p {
        return Err(Error::InvalidArgument(format!(
            "parameters are for p = {} but the factor has p = {p}",
            params.p()
        )));
    }
    if l.n() < p + 1 {
        return Err(Error::Size(format!("need n > p (n = {}, p = {p})", l.n())));
    }
    let mut t = l.clone();
    let mut out = Vec::with_capacity(p);
    for s in 0..p.saturating_sub(1) {
        let (d, rest) = peel(&t, params.stage(s), rel_tol).map_err(|e| tag_stage(e, s))?;
        out.push(d);
        t = rest;
    }
    out.push(last_factor(&t)?);
    Ok(out)
}

/// As [`darboux_factorize`], drawing the free entries stage by stage.
pub fn darboux_factorize_sampled<R: Rng + ?Sized>(
    l: &UnitLowerBanded,
    rng: &mut R,
    opts: &SamplingOptions,
    rel_tol: f64,
) -> Result<(Vec<Bidiagonal>, ParameterSet)> {
    let p = l.bandwidth();
    if p == 0 || l.n() < p + 1 {
        return Err(Error::Size(format!("need n > p >= 1 (n = {}, p = {p})", l.n())));
    }
    let mut t = l.clone();
    let mut out = Vec::with_capacity(p);
    let mut alphas = Vec::with_capacity(p - 1);
    for s in 0..p - 1 {
        let a = sample_parameters(&t, usize::MAX, rng, opts).map_err(|e| tag_stage(e, s))?;
        let (d, rest) = peel(&t, &a, rel_tol).map_err(|e| tag_stage(e, s))?;
        alphas.push(a);
        out.push(d);
        t = rest;
    }
    out.push(last_factor(&t)?);
    Ok((out, ParameterSet::new(p, alphas)?))
}
