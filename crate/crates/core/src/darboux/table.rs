//! Direct construction of the gamma table from the entries of `J`.

use super::{enumerate_indices_tilde, GammaTable, ParameterSet};
use crate::banded::{Banded, BandedHessenberg, Scalar, ONE, ZERO};
use crate::error::{Error, Result};

/// Fills the table diagonal by diagonal from `J`, the pivots `u` of
/// `J - C I` and the free parameters, without forming any factor.
///
/// For `i = 1, 2, ...` and `k = -1, ..., p - 2`:
///
/// `delta_k^(i) gamma_{(k+i+1)p+i} = a[k+i+1][i-1] - sum_tilde prod_{s=0}^{k+2} gamma_{(i-2+s)p+i+i_{s+1}-1}`
///
/// with `delta_k^(i) = prod_{r=-1}^{k} gamma_{(r+i)p+i}`.
pub fn table_fill(
    j: &BandedHessenberg,
    u: &[Scalar],
    params: &ParameterSet,
    rel_tol: f64,
) -> Result<GammaTable> {
    let (n, p) = (j.n(), j.p());
    if params.p() != p {
        return Err(Error::InvalidArgument(format!(
            "parameters are for p = {} but the matrix has p = {p}",
            params.p()
        )));
    }
    if n < 2 || u.len() < n - 1 {
        return Err(Error::Size(format!(
            "need n >= 2 and at least n - 1 pivots (n = {n}, got {})",
            u.len()
        )));
    }
    let columns = n - 1;
    let len = columns * (p + 1);
    let mut g = vec![ZERO; len];
    let pi = p as i64;
    let at = |g: &[Scalar], idx: i64| -> Scalar {
        if idx <= 0 {
            ZERO
        } else {
            g.get(idx as usize - 1).copied().unwrap_or(ZERO)
        }
    };
    let put = |g: &mut Vec<Scalar>, idx: i64, v: Scalar| {
        if idx >= 1 && (idx as usize) <= len {
            g[idx as usize - 1] = v;
        }
    };

    for (m, &v) in u.iter().take(columns).enumerate() {
        put(&mut g, (m * (p + 1) + 1) as i64, v);
    }
    for (s, row) in params.stages().iter().enumerate() {
        for (idx, &a) in row.iter().enumerate() {
            let i = idx as i64 + 1;
            put(&mut g, (i - 1) * pi + i + s as i64 + 1, a);
        }
    }

    let threshold = rel_tol * j.max_modulus();
    let tilde: Vec<Vec<Vec<usize>>> = (-1..=(p as isize - 2)).map(|k| enumerate_indices_tilde(k, p)).collect();
    for i in 1..n {
        let ii = i as i64;
        let mut delta = ONE;
        for k in -1..=(p as isize - 2) {
            let row = k + i as isize + 1;
            if row > n as isize - 1 {
                break;
            }
            let factor = at(&g, (k as i64 + ii) * pi + ii);
            if factor.norm() <= threshold || !factor.norm().is_finite() {
                return Err(Error::TableBreakdown {
                    i,
                    k,
                    modulus: factor.norm(),
                });
            }
            delta *= factor;
            let mut rhs = j.get(row as usize, i - 1);
            for t in &tilde[(k + 1) as usize] {
                let mut term = ONE;
                for (s, &is) in t.iter().enumerate() {
                    term *= at(&g, (ii - 2 + s as i64) * pi + ii + is as i64 - 1);
                }
                rhs -= term;
            }
            put(&mut g, (row as i64) * pi + ii, rhs / delta);
        }
    }
    GammaTable::new(p, g)
}
