//! Darboux factorization `J - C I = L^(1) ... L^(p) U` and the transforms
//! `J^(i) = C I + L^(i+1) ... L^(p) U L^(1) ... L^(i)`.
//!
//! All factor entries form one sequence `gamma_1, gamma_2, ...` laid out as a
//! table with `p + 1` rows: row 0 is the diagonal of `U`, row `i` is the
//! subdiagonal of `L^(i)`, and `gamma_n` sits in row `(n - 1) mod (p + 1)`,
//! column `(n - 1) div (p + 1)`.

mod indices;
mod instance;
mod peel;
mod table;

pub use indices::{enumerate_indices, enumerate_indices_tilde};
pub use instance::{moderate_magnitude, random_darboux_instance, DarbouxInstance};
pub use peel::{
    darboux_factorize, darboux_factorize_sampled, hyperplane_determinant, hyperplane_values, peel,
    sample_parameters, SamplingOptions, DEFAULT_MARGIN, DEFAULT_MAX_RETRIES, DEFAULT_PEEL_TOL,
};
pub use table::table_fill;

use serde::{Deserialize, Serialize};

use crate::banded::{
    multiply_chain, Banded, BandedHessenberg, Bidiagonal, BidiagonalKind, Scalar, ValidWindow, ZERO,
};
use crate::error::{Error, Result};

/// The sequence `gamma_n`, `n >= 1`, stored column by column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GammaTableJson", into = "GammaTableJson")]
pub struct GammaTable {
    p: usize,
    columns: usize,
    gamma: Vec<Scalar>,
}

#[derive(Serialize, Deserialize)]
struct GammaTableJson {
    p: usize,
    columns: usize,
    #[serde(with = "crate::json::scalars")]
    gamma: Vec<Scalar>,
}

impl From<GammaTable> for GammaTableJson {
    fn from(t: GammaTable) -> Self {
        GammaTableJson {
            p: t.p,
            columns: t.columns,
            gamma: t.gamma,
        }
    }
}

impl TryFrom<GammaTableJson> for GammaTable {
    type Error = Error;
    fn try_from(j: GammaTableJson) -> Result<Self> {
        let t = GammaTable::new(j.p, j.gamma)?;
        if t.columns != j.columns {
            return Err(Error::Parse(format!(
                "columns = {} but {} gammas were given",
                j.columns,
                t.gamma.len()
            )));
        }
        Ok(t)
    }
}

impl GammaTable {
    /// `gamma[n - 1]` holds `gamma_n`; the length must be a multiple of `p + 1`.
    pub fn new(p: usize, gamma: Vec<Scalar>) -> Result<Self> {
        if p == 0 || gamma.is_empty() || !gamma.len().is_multiple_of(p + 1) {
            return Err(Error::Size(format!(
                "a table with p = {p} needs a positive multiple of {} entries, got {}",
                p + 1,
                gamma.len()
            )));
        }
        if let Some(n) = gamma.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite {
                row: n % (p + 1),
                col: n / (p + 1),
            });
        }
        Ok(GammaTable {
            p,
            columns: gamma.len() / (p + 1),
            gamma,
        })
    }

    /// Table read off a factorization: the diagonal of `U` and the
    /// subdiagonals of the `p` lower factors, truncated to complete columns.
    pub fn from_factors(u: &Bidiagonal, lowers: &[Bidiagonal]) -> Result<Self> {
        let p = lowers.len();
        if p == 0 || u.kind() != BidiagonalKind::Upper {
            return Err(Error::InvalidArgument(
                "need an upper factor and at least one lower factor".into(),
            ));
        }
        let n = u.n();
        if n < 2 || lowers.iter().any(|l| l.n() != n || l.kind() != BidiagonalKind::Lower) {
            return Err(Error::Size("factors must be lower bidiagonal of a common size >= 2".into()));
        }
        let columns = n - 1;
        let mut gamma = Vec::with_capacity(columns * (p + 1));
        for m in 0..columns {
            gamma.push(u.free()[m]);
            gamma.extend(lowers.iter().map(|l| l.free()[m]));
        }
        Self::new(p, gamma)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    /// Number of stored gammas.
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn values(&self) -> &[Scalar] {
        &self.gamma
    }

    /// `gamma_n`, reading zero for `n <= 0`.
    pub fn get(&self, n: i64) -> Result<Scalar> {
        if n <= 0 {
            return Ok(ZERO);
        }
        self.gamma
            .get(n as usize - 1)
            .copied()
            .ok_or(Error::Index {
                n,
                len: self.gamma.len(),
            })
    }

    /// Index `n` of the entry in `row` and `column`.
    pub fn index_of(&self, row: usize, column: usize) -> i64 {
        (column * (self.p + 1) + row + 1) as i64
    }

    /// Row 0 is `U`, row `i >= 1` is `L^(i)`.
    pub fn row(&self, row: usize) -> Vec<Scalar> {
        self.gamma
            .iter()
            .skip(row)
            .step_by(self.p + 1)
            .copied()
            .collect()
    }

    /// Same layout with new values.
    pub fn with_values(&self, gamma: Vec<Scalar>) -> Result<Self> {
        if gamma.len() != self.gamma.len() {
            return Err(Error::Size(format!(
                "expected {} gammas, got {}",
                self.gamma.len(),
                gamma.len()
            )));
        }
        Self::new(self.p, gamma)
    }

    /// The free parameters stored in the table.
    pub fn parameters(&self) -> Result<ParameterSet> {
        let p = self.p as i64;
        let alphas = (0..self.p.saturating_sub(1))
            .map(|s| {
                (1..(self.p - s) as i64)
                    .map(|i| self.get((i - 1) * p + i + s as i64 + 1))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ParameterSet::new(self.p, alphas)
    }

    /// Factors of size `columns`: `U` uses row 0, `L^(i)` the first
    /// `columns - 1` entries of row `i`.
    pub fn factors(&self, shift: Scalar) -> Result<DarbouxFactors> {
        let n = self.columns;
        let u = Bidiagonal::upper(self.row(0))?;
        let lowers = (1..=self.p)
            .map(|r| {
                let mut sub = self.row(r);
                sub.truncate(n - 1);
                Bidiagonal::lower(n, sub)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DarbouxFactors { u, lowers, shift })
    }
}

/// The `p (p - 1) / 2` free values fixing a Darboux factorization:
/// `alphas[s]` holds the first `p - s - 1` subdiagonal entries of `L^(s+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<[f64; 2]>>", into = "Vec<Vec<[f64; 2]>>")]
pub struct ParameterSet {
    p: usize,
    alphas: Vec<Vec<Scalar>>,
}

impl ParameterSet {
    pub fn new(p: usize, alphas: Vec<Vec<Scalar>>) -> Result<Self> {
        if p == 0 || alphas.len() != p - 1 {
            return Err(Error::Size(format!(
                "p = {p} needs {} parameter rows, got {}",
                p.saturating_sub(1),
                alphas.len()
            )));
        }
        for (s, row) in alphas.iter().enumerate() {
            if row.len() != p - s - 1 {
                return Err(Error::Size(format!(
                    "parameter row {s} needs {} values, got {}",
                    p - s - 1,
                    row.len()
                )));
            }
            if let Some(i) = row.iter().position(|a| a.norm() == 0.0 || !a.norm().is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "parameter alpha_{}^({s}) must be finite and nonzero",
                    i + 1
                )));
            }
        }
        Ok(ParameterSet { p, alphas })
    }

    /// The empty set used when `p = 1`.
    pub fn empty() -> Self {
        ParameterSet {
            p: 1,
            alphas: Vec::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn stage(&self, s: usize) -> &[Scalar] {
        &self.alphas[s]
    }

    pub fn stages(&self) -> &[Vec<Scalar>] {
        &self.alphas
    }
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for ParameterSet {
    type Error = Error;
    fn try_from(v: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let p = v.len() + 1;
        let alphas = v
            .into_iter()
            .map(|row| row.into_iter().map(crate::banded::pair_to_scalar).collect())
            .collect();
        ParameterSet::new(p, alphas)
    }
}

impl From<ParameterSet> for Vec<Vec<[f64; 2]>> {
    fn from(s: ParameterSet) -> Self {
        s.alphas
            .into_iter()
            .map(|row| row.into_iter().map(crate::banded::scalar_to_pair).collect())
            .collect()
    }
}

/// `J - C I = L^(1) ... L^(p) U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarbouxFactors {
    #[serde(rename = "U")]
    pub u: Bidiagonal,
    #[serde(rename = "L")]
    pub lowers: Vec<Bidiagonal>,
    #[serde(rename = "C", with = "crate::json::scalar")]
    pub shift: Scalar,
}

impl DarbouxFactors {
    pub fn p(&self) -> usize {
        self.lowers.len()
    }

    pub fn n(&self) -> usize {
        self.u.n()
    }

    pub fn table(&self) -> Result<GammaTable> {
        GammaTable::from_factors(&self.u, &self.lowers)
    }
}

/// `J^(i) = C I + L^(i+1) ... L^(p) U L^(1) ... L^(i)` on the truncation,
/// with the leading block where it equals the infinite product.
pub fn assemble_transform(factors: &DarbouxFactors, i: usize) -> Result<(BandedHessenberg, ValidWindow)> {
    let p = factors.p();
    if i > p {
        return Err(Error::InvalidArgument(format!(
            "transform index {i} is outside 0..={p}"
        )));
    }
    let mut chain: Vec<&dyn Banded> = Vec::with_capacity(p + 1);
    chain.extend(factors.lowers[i..].iter().map(|l| l as &dyn Banded));
    chain.push(&factors.u);
    chain.extend(factors.lowers[..i].iter().map(|l| l as &dyn Banded));
    let (prod, window) = multiply_chain(&chain)?;
    let m = BandedHessenberg::from_band(&prod.shift_diagonal(factors.shift), p)?;
    Ok((m, window))
}

/// Closed-form entry `a^(j)[i + k][i]` of the transform `J^(j)`:
///
/// * `k = 0`: `C + sum_{s=j+1}^{j+p+1} gamma_{(i-1)p+i+s}`
/// * `k >= 1`: sum over `E_k^(j)` of `gamma_{(i-1)p+i_1+i} gamma_{ip+i_2+i} ... gamma_{(k+i-1)p+i_{k+1}+i}`
pub fn backlund_entry(table: &GammaTable, j: usize, i: usize, k: usize, shift: Scalar) -> Result<Scalar> {
    let p = table.p();
    if j > p || k > p {
        return Err(Error::InvalidArgument(format!(
            "need j, k <= p = {p} (got j = {j}, k = {k})"
        )));
    }
    backlund_entry_with(table, &enumerate_indices(j, k.max(1), p), j, i, k, shift)
}

fn backlund_entry_with(
    table: &GammaTable,
    index_set: &[Vec<usize>],
    j: usize,
    i: usize,
    k: usize,
    shift: Scalar,
) -> Result<Scalar> {
    let (p, i) = (table.p() as i64, i as i64);
    if k == 0 {
        let mut acc = shift;
        for s in (j as i64 + 1)..=(j as i64 + p + 1) {
            acc += table.get((i - 1) * p + i + s)?;
        }
        return Ok(acc);
    }
    let mut acc = ZERO;
    for tuple in index_set {
        let mut term = Scalar::new(1.0, 0.0);
        for (r, &ir) in tuple.iter().enumerate() {
            term *= table.get((i - 1 + r as i64) * p + ir as i64 + i)?;
        }
        acc += term;
    }
    Ok(acc)
}

/// Leading `size x size` block of `J^(j)` assembled entry by entry from the
/// closed forms.
pub fn backlund_matrix(table: &GammaTable, j: usize, shift: Scalar, size: usize) -> Result<BandedHessenberg> {
    let p = table.p();
    if j > p {
        return Err(Error::InvalidArgument(format!(
            "transform index {j} is outside 0..={p}"
        )));
    }
    let sets: Vec<Vec<Vec<usize>>> = (0..=p).map(|k| enumerate_indices(j, k.max(1), p)).collect();
    let mut err = None;
    let m = BandedHessenberg::from_fn(p, size, |row, col| {
        let k = row - col;
        backlund_entry_with(table, &sets[k], j, col, k, shift).unwrap_or_else(|e| {
            err.get_or_insert(e);
            ZERO
        })
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

/// Largest size for which [`backlund_matrix`] finds every gamma it needs.
pub fn backlund_capacity(table: &GammaTable) -> usize {
    // Row r of J^(p) reaches gamma_{(r+1)(p+1)}.
    table.columns()
}
