//! Band storage for the three matrix shapes used by the factorization:
//! lower Hessenberg matrices with a unit superdiagonal, unit lower banded
//! matrices, and bidiagonal factors.
//!
//! Every matrix here is the leading `n x n` block of an infinite matrix.
//! Products of truncations only agree with the truncation of the infinite
//! product on a leading block, which is tracked with [`ValidWindow`].

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scalar = Complex64;

pub(crate) const ZERO: Scalar = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Scalar = Complex64::new(1.0, 0.0);

/// Read access shared by all band matrix shapes.
pub trait Banded {
    fn n(&self) -> usize;
    /// Number of nonzero bands strictly below the diagonal.
    fn lower_bandwidth(&self) -> usize;
    /// Number of nonzero bands strictly above the diagonal.
    fn upper_bandwidth(&self) -> usize;
    /// Entry `(i, j)`; reads outside the stored band return zero.
    fn get(&self, i: usize, j: usize) -> Scalar;

    fn to_band(&self) -> BandMatrix {
        let n = self.n();
        let (lo, up) = (
            self.lower_bandwidth().min(n.saturating_sub(1)),
            self.upper_bandwidth().min(n.saturating_sub(1)),
        );
        let mut out = BandMatrix::zeros(n, lo, up);
        for i in 0..n {
            for j in i.saturating_sub(lo)..(i + up + 1).min(n) {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// Leading block of a matrix, keeping its shape.
pub trait Truncate: Sized {
    fn truncate(&self, m: usize) -> Result<Self>;
}

fn check_truncation(m: usize, n: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::Size(format!(
            "cannot truncate a {n}x{n} matrix to {m}x{m}"
        )));
    }
    Ok(())
}

fn check_finite(v: Scalar, row: usize, col: usize) -> Result<Scalar> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { row, col })
    }
}

/// Number of leading rows (and columns) of a truncated computation that
/// coincide with the infinite-matrix computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ValidWindow(pub usize);

impl ValidWindow {
    pub fn full(n: usize) -> Self {
        ValidWindow(n)
    }

    pub fn rows(self) -> usize {
        self.0
    }
}

/// General square band matrix, stored one vector per diagonal.
///
/// The band at offset `o = j - i` holds `n - |o|` entries indexed by
/// `min(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    bands: Vec<Vec<Scalar>>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let bands = (0..=lower + upper)
            .map(|d| {
                let off = d as isize - lower as isize;
                vec![ZERO; n.saturating_sub(off.unsigned_abs())]
            })
            .collect();
        BandMatrix {
            n,
            lower,
            upper,
            bands,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BandMatrix::zeros(n, 0, 0);
        m.bands[0].fill(ONE);
        m
    }

    fn slot(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        if i >= self.n || j >= self.n {
            return None;
        }
        let off = j as isize - i as isize;
        if off < -(self.lower as isize) || off > self.upper as isize {
            return None;
        }
        Some(((off + self.lower as isize) as usize, i.min(j)))
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        let (d, k) = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside the stored band"));
        self.bands[d][k] = v;
    }

    /// Entries of the diagonal at offset `j - i`.
    pub fn band(&self, offset: isize) -> &[Scalar] {
        let d = offset + self.lower as isize;
        if d < 0 || d as usize >= self.bands.len() {
            return &[];
        }
        &self.bands[d as usize]
    }

    /// Adds `c` to every diagonal entry.
    pub fn shift_diagonal(mut self, c: Scalar) -> Self {
        let d = self.lower;
        self.bands[d].iter_mut().for_each(|x| *x += c);
        self
    }
}

impl Banded for BandMatrix {
    fn n(&self) -> usize {
        self.n
    }
    fn lower_bandwidth(&self) -> usize {
        self.lower
    }
    fn upper_bandwidth(&self) -> usize {
        self.upper
    }
    fn get(&self, i: usize, j: usize) -> Scalar {
        self.slot(i, j).map_or(ZERO, |(d, k)| self.bands[d][k])
    }
    fn to_band(&self) -> BandMatrix {
        self.clone()
    }
}

impl Truncate for BandMatrix {
    fn truncate(&self, m: usize) -> Result<Self> {
        check_truncation(m, self.n)?;
        let mut out = BandMatrix::zeros(m, self.lower, self.upper);
        for (dst, src) in out.bands.iter_mut().zip(&self.bands) {
            let len = dst.len();
            dst.copy_from_slice(&src[..len]);
        }
        Ok(out)
    }
}

/// Product of two truncated band matrices.
///
/// Entry `(i, j)` of the truncated product misses the terms `a[i][k] b[k][j]`
/// with `k >= n`, which can only be nonzero when `i + upper(a) >= n`. The
/// returned window is therefore `min(wa, wb) - upper_bandwidth(a)`.
pub fn multiply<A, B>(
    a: &A,
    b: &B,
    wa: ValidWindow,
    wb: ValidWindow,
) -> Result<(BandMatrix, ValidWindow)>
where
    A: Banded + ?Sized,
    B: Banded + ?Sized,
{
    let n = a.n();
    if b.n() != n {
        return Err(Error::Size(format!(
            "cannot multiply {n}x{n} by {m}x{m}",
            m = b.n()
        )));
    }
    let cap = n.saturating_sub(1);
    let (la, ua) = (a.lower_bandwidth(), a.upper_bandwidth());
    let (lb, ub) = (b.lower_bandwidth(), b.upper_bandwidth());
    let lo = (la + lb).min(cap);
    let up = (ua + ub).min(cap);
    let mut out = BandMatrix::zeros(n, lo, up);
    for i in 0..n {
        for j in i.saturating_sub(lo)..(i + up + 1).min(n) {
            let k0 = i.saturating_sub(la).max(j.saturating_sub(ub));
            let k1 = (i + ua).min(j + lb).min(n - 1);
            let mut acc = ZERO;
            for k in k0..=k1 {
                acc += a.get(i, k) * b.get(k, j);
            }
            out.set(i, j, acc);
        }
    }
    let window = ValidWindow(wa.0.min(wb.0).min(n).saturating_sub(ua));
    Ok((out, window))
}

/// Left-to-right product of a chain of factors, all with full windows.
pub fn multiply_chain(factors: &[&dyn Banded]) -> Result<(BandMatrix, ValidWindow)> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
    let mut acc = first.to_band();
    let mut window = ValidWindow::full(acc.n());
    for f in &factors[1..] {
        let (next, w) = multiply(&acc, *f, window, ValidWindow::full(f.n()))?;
        acc = next;
        window = w;
    }
    Ok((acc, window))
}

/// Maximum entry-wise modulus of `a - b` over the leading `window` block.
pub fn residual<A, B>(a: &A, b: &B, window: ValidWindow) -> f64
where
    A: Banded + ?Sized,
    B: Banded + ?Sized,
{
    let w = window.0.min(a.n()).min(b.n());
    let reach_lo = a.lower_bandwidth().max(b.lower_bandwidth());
    let reach_up = a.upper_bandwidth().max(b.upper_bandwidth());
    let mut worst = 0.0f64;
    for i in 0..w {
        for j in i.saturating_sub(reach_lo)..(i + reach_up + 1).min(w) {
            worst = worst.max((a.get(i, j) - b.get(i, j)).norm());
        }
    }
    worst
}

/// Lower Hessenberg matrix with `p + 1` lower bands (diagonal included) and
/// an implicit unit superdiagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct BandedHessenberg {
    p: usize,
    n: usize,
    /// `bands[d][j] = a[j + d][j]`.
    bands: Vec<Vec<Scalar>>,
    regular: bool,
}

impl BandedHessenberg {
    /// Builds the matrix from entry values `a(i, j)` for `i - p <= j <= i`.
    pub fn from_fn(p: usize, n: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::Size(format!(
                "band parameter and size must be positive (p = {p}, n = {n})"
            )));
        }
        let mut bands = Vec::with_capacity(p + 1);
        for d in 0..=p {
            let len = n.saturating_sub(d);
            let mut band = Vec::with_capacity(len);
            for j in 0..len {
                band.push(check_finite(f(j + d, j), j + d, j)?);
            }
            bands.push(band);
        }
        Ok(Self::assemble(p, n, bands))
    }

    /// `bands[d]` is the diagonal `d` steps below the main one.
    pub fn from_bands(p: usize, bands: Vec<Vec<Scalar>>) -> Result<Self> {
        if p == 0 || bands.len() != p + 1 {
            return Err(Error::Size(format!(
                "expected {} bands for p = {p}, got {}",
                p + 1,
                bands.len()
            )));
        }
        let n = bands[0].len();
        if n == 0 {
            return Err(Error::Size("empty matrix".into()));
        }
        for (d, band) in bands.iter().enumerate() {
            if band.len() != n.saturating_sub(d) {
                return Err(Error::Size(format!(
                    "band -{d} has {} entries, expected {}",
                    band.len(),
                    n.saturating_sub(d)
                )));
            }
            for (j, &v) in band.iter().enumerate() {
                check_finite(v, j + d, j)?;
            }
        }
        Ok(Self::assemble(p, n, bands))
    }

    fn assemble(p: usize, n: usize, bands: Vec<Vec<Scalar>>) -> Self {
        let regular = bands[p].iter().all(|v| v.norm() > 0.0);
        BandedHessenberg {
            p,
            n,
            bands,
            regular,
        }
    }

    /// Reads the lower part of a band matrix as a Hessenberg matrix. The
    /// superdiagonal must be identically one and nothing may sit above it or
    /// below band `p`.
    pub fn from_band(m: &BandMatrix, p: usize) -> Result<Self> {
        let n = m.n();
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                let in_band = j <= i && i - j <= p;
                if j == i + 1 {
                    if (v - ONE).norm() > 1e-12 {
                        return Err(Error::InvalidArgument(format!(
                            "superdiagonal entry ({i}, {j}) is {v}, expected 1"
                        )));
                    }
                } else if !in_band && v.norm() != 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) lies outside the Hessenberg band"
                    )));
                }
            }
        }
        Self::from_fn(p, n, |i, j| m.get(i, j))
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Whether every deepest-band entry `a[p + i][i]` is nonzero.
    pub fn is_regular(&self) -> bool {
        self.regular
    }

    /// The diagonal `d` steps below the main one.
    pub fn band(&self, d: usize) -> &[Scalar] {
        self.bands.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn max_modulus(&self) -> f64 {
        self.bands
            .iter()
            .flatten()
            .fold(1.0f64, |m, v| m.max(v.norm()))
    }

    /// Number of stored band entries.
    pub fn stored_len(&self) -> usize {
        self.bands.iter().map(Vec::len).sum()
    }

    /// Stored entries in band order, each with its `(row, col)`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), Scalar)> + '_ {
        self.bands
            .iter()
            .enumerate()
            .flat_map(|(d, band)| band.iter().enumerate().map(move |(j, &v)| ((j + d, j), v)))
    }

    /// Rebuilds the matrix from values listed in [`entries`](Self::entries) order.
    pub fn with_entries(&self, values: &[Scalar]) -> Result<Self> {
        if values.len() != self.stored_len() {
            return Err(Error::Size(format!(
                "expected {} entries, got {}",
                self.stored_len(),
                values.len()
            )));
        }
        let mut it = values.iter().copied();
        let bands = self
            .bands
            .iter()
            .map(|b| it.by_ref().take(b.len()).collect())
            .collect();
        Self::from_bands(self.p, bands)
    }

    /// Copy with one stored entry replaced.
    pub fn with_entry(&self, i: usize, j: usize, v: Scalar) -> Result<Self> {
        if j > i || i - j > self.p || i >= self.n {
            return Err(Error::InvalidArgument(format!(
                "({i}, {j}) is not a stored band entry"
            )));
        }
        let mut bands = self.bands.clone();
        bands[i - j][j] = v;
        Self::from_bands(self.p, bands)
    }

    /// `J - c I` as a general band matrix.
    pub fn shifted(&self, c: Scalar) -> BandMatrix {
        self.to_band().shift_diagonal(-c)
    }
}

impl Banded for BandedHessenberg {
    fn n(&self) -> usize {
        self.n
    }
    fn lower_bandwidth(&self) -> usize {
        self.p
    }
    fn upper_bandwidth(&self) -> usize {
        1
    }
    fn get(&self, i: usize, j: usize) -> Scalar {
        if i >= self.n || j >= self.n {
            return ZERO;
        }
        if j == i + 1 {
            return ONE;
        }
        if j > i || i - j > self.p {
            return ZERO;
        }
        self.bands[i - j][j]
    }
}

impl Truncate for BandedHessenberg {
    fn truncate(&self, m: usize) -> Result<Self> {
        check_truncation(m, self.n)?;
        let bands = self
            .bands
            .iter()
            .enumerate()
            .map(|(d, b)| b[..m.saturating_sub(d)].to_vec())
            .collect();
        Ok(Self::assemble(self.p, m, bands))
    }
}

/// Unit lower triangular matrix with `p` bands below the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct UnitLowerBanded {
    p: usize,
    n: usize,
    /// `bands[d - 1][j] = l[j + d][j]` for `d = 1..=p`.
    bands: Vec<Vec<Scalar>>,
}

impl UnitLowerBanded {
    /// Entry values `l(i, j)` for `i - p <= j < i`.
    pub fn from_fn(p: usize, n: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Result<Self> {
        if n == 0 {
            return Err(Error::Size("empty matrix".into()));
        }
        let mut bands = Vec::with_capacity(p);
        for d in 1..=p {
            let len = n.saturating_sub(d);
            let mut band = Vec::with_capacity(len);
            for j in 0..len {
                band.push(check_finite(f(j + d, j), j + d, j)?);
            }
            bands.push(band);
        }
        Ok(UnitLowerBanded { p, n, bands })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(0, n, |_, _| ZERO)
    }

    /// Number of stored subdiagonals.
    pub fn bandwidth(&self) -> usize {
        self.p
    }

    /// The subdiagonal `d >= 1` steps below the main one.
    pub fn band(&self, d: usize) -> &[Scalar] {
        if d == 0 {
            return &[];
        }
        self.bands.get(d - 1).map_or(&[], Vec::as_slice)
    }

    pub fn max_modulus(&self) -> f64 {
        self.bands
            .iter()
            .flatten()
            .fold(1.0f64, |m, v| m.max(v.norm()))
    }

    /// Reads a unit lower band matrix of bandwidth at most `p`.
    pub fn from_band(m: &BandMatrix, p: usize) -> Result<Self> {
        let n = m.n();
        for i in 0..n {
            if (m.get(i, i) - ONE).norm() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "diagonal entry ({i}, {i}) is not 1"
                )));
            }
            for j in 0..n {
                if (j > i || i - j > p) && j != i && m.get(i, j).norm() != 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) lies outside a unit lower band of width {p}"
                    )));
                }
            }
        }
        Self::from_fn(p, n, |i, j| m.get(i, j))
    }
}

impl Banded for UnitLowerBanded {
    fn n(&self) -> usize {
        self.n
    }
    fn lower_bandwidth(&self) -> usize {
        self.p
    }
    fn upper_bandwidth(&self) -> usize {
        0
    }
    fn get(&self, i: usize, j: usize) -> Scalar {
        if i >= self.n || j >= self.n || j > i {
            return ZERO;
        }
        if i == j {
            return ONE;
        }
        if i - j > self.p {
            return ZERO;
        }
        self.bands[i - j - 1][j]
    }
}

impl Truncate for UnitLowerBanded {
    fn truncate(&self, m: usize) -> Result<Self> {
        check_truncation(m, self.n)?;
        let bands = self
            .bands
            .iter()
            .enumerate()
            .map(|(d, b)| b[..m.saturating_sub(d + 1)].to_vec())
            .collect();
        Ok(UnitLowerBanded {
            p: self.p,
            n: m,
            bands,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BidiagonalKind {
    /// Free diagonal, unit superdiagonal.
    Upper,
    /// Unit diagonal, free subdiagonal.
    Lower,
}

/// Bidiagonal factor with exactly one free band; the other is identically 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct Bidiagonal {
    kind: BidiagonalKind,
    n: usize,
    free: Vec<Scalar>,
}

impl Bidiagonal {
    /// Upper bidiagonal with the given diagonal.
    pub fn upper(main: Vec<Scalar>) -> Result<Self> {
        if main.is_empty() {
            return Err(Error::Size("empty matrix".into()));
        }
        for (i, &v) in main.iter().enumerate() {
            check_finite(v, i, i)?;
        }
        Ok(Bidiagonal {
            kind: BidiagonalKind::Upper,
            n: main.len(),
            free: main,
        })
    }

    /// Lower bidiagonal of size `n` with the given subdiagonal (`n - 1` entries).
    pub fn lower(n: usize, off: Vec<Scalar>) -> Result<Self> {
        if n == 0 || off.len() != n - 1 {
            return Err(Error::Size(format!(
                "a lower bidiagonal of size {n} needs {} subdiagonal entries, got {}",
                n.saturating_sub(1),
                off.len()
            )));
        }
        for (i, &v) in off.iter().enumerate() {
            check_finite(v, i + 1, i)?;
        }
        Ok(Bidiagonal {
            kind: BidiagonalKind::Lower,
            n,
            free: off,
        })
    }

    pub fn kind(&self) -> BidiagonalKind {
        self.kind
    }

    /// The free band: the diagonal for upper factors, the subdiagonal for lower ones.
    pub fn free(&self) -> &[Scalar] {
        &self.free
    }
}

impl Banded for Bidiagonal {
    fn n(&self) -> usize {
        self.n
    }
    fn lower_bandwidth(&self) -> usize {
        match self.kind {
            BidiagonalKind::Upper => 0,
            BidiagonalKind::Lower => 1,
        }
    }
    fn upper_bandwidth(&self) -> usize {
        match self.kind {
            BidiagonalKind::Upper => 1,
            BidiagonalKind::Lower => 0,
        }
    }
    fn get(&self, i: usize, j: usize) -> Scalar {
        if i >= self.n || j >= self.n {
            return ZERO;
        }
        match self.kind {
            BidiagonalKind::Upper if i == j => self.free[i],
            BidiagonalKind::Upper if j == i + 1 => ONE,
            BidiagonalKind::Lower if i == j => ONE,
            BidiagonalKind::Lower if i == j + 1 => self.free[j],
            _ => ZERO,
        }
    }
}

impl Truncate for Bidiagonal {
    fn truncate(&self, m: usize) -> Result<Self> {
        check_truncation(m, self.n)?;
        let keep = match self.kind {
            BidiagonalKind::Upper => m,
            BidiagonalKind::Lower => m - 1,
        };
        Ok(Bidiagonal {
            kind: self.kind,
            n: m,
            free: self.free[..keep].to_vec(),
        })
    }
}

/// Real entries or complex entries with uniformly random phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    #[default]
    Real,
    Complex,
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleMode::Real => f.write_str("real"),
            SampleMode::Complex => f.write_str("complex"),
        }
    }
}

impl std::str::FromStr for SampleMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(SampleMode::Real),
            "complex" => Ok(SampleMode::Complex),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{s}`"))),
        }
    }
}

/// Draws a scalar with modulus uniform in `[lo, hi]` and random sign or phase.
pub(crate) fn draw_scalar<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, mode: SampleMode) -> Scalar {
    let modulus = rng.random_range(lo..=hi);
    match mode {
        SampleMode::Real => {
            if rng.random::<bool>() {
                Complex64::new(modulus, 0.0)
            } else {
                Complex64::new(-modulus, 0.0)
            }
        }
        SampleMode::Complex => {
            Complex64::from_polar(modulus, rng.random_range(0.0..std::f64::consts::TAU))
        }
    }
}

/// Random regular Hessenberg test matrix: every band entry has modulus
/// uniform in `[1, 2]`.
pub fn random_hessenberg(p: usize, n: usize, seed: u64, mode: SampleMode) -> Result<BandedHessenberg> {
    if p == 0 || n <= p {
        return Err(Error::InvalidArgument(format!(
            "need n > p >= 1 (p = {p}, n = {n})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BandedHessenberg::from_fn(p, n, |_, _| draw_scalar(&mut rng, 1.0, 2.0, mode))
}

// JSON encoding: {"p": .., "n": .., "bands": {"0": [[re, im], ..], "-1": ..}}

pub(crate) fn scalar_to_pair(v: Scalar) -> [f64; 2] {
    [v.re, v.im]
}

pub(crate) fn pair_to_scalar(v: [f64; 2]) -> Scalar {
    Complex64::new(v[0], v[1])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub p: usize,
    pub n: usize,
    pub bands: BTreeMap<String, Vec<[f64; 2]>>,
}

impl MatrixJson {
    fn take(&mut self, offset: isize) -> Result<Vec<Scalar>> {
        let key = offset.to_string();
        let band = self
            .bands
            .remove(&key)
            .ok_or_else(|| Error::Parse(format!("missing band \"{key}\"")))?;
        Ok(band.into_iter().map(pair_to_scalar).collect())
    }

    fn reject_leftovers(&self) -> Result<()> {
        match self.bands.keys().next() {
            Some(k) => Err(Error::Parse(format!("unexpected band \"{k}\""))),
            None => Ok(()),
        }
    }
}

fn encode_band(v: &[Scalar]) -> Vec<[f64; 2]> {
    v.iter().copied().map(scalar_to_pair).collect()
}

impl From<BandedHessenberg> for MatrixJson {
    fn from(m: BandedHessenberg) -> Self {
        let bands = m
            .bands
            .iter()
            .enumerate()
            .map(|(d, b)| ((-(d as isize)).to_string(), encode_band(b)))
            .collect();
        MatrixJson {
            p: m.p,
            n: m.n,
            bands,
        }
    }
}

impl TryFrom<MatrixJson> for BandedHessenberg {
    type Error = Error;
    fn try_from(mut j: MatrixJson) -> Result<Self> {
        let bands = (0..=j.p)
            .map(|d| j.take(-(d as isize)))
            .collect::<Result<Vec<_>>>()?;
        // An explicit superdiagonal is accepted when it is all ones.
        if let Ok(sup) = j.take(1) {
            if sup.iter().any(|v| *v != ONE) {
                return Err(Error::Parse("superdiagonal must be identically 1".into()));
            }
        }
        j.reject_leftovers()?;
        let m = BandedHessenberg::from_bands(j.p, bands)?;
        if m.n != j.n {
            return Err(Error::Parse(format!("n = {} but bands describe {}", j.n, m.n)));
        }
        Ok(m)
    }
}

impl From<UnitLowerBanded> for MatrixJson {
    fn from(m: UnitLowerBanded) -> Self {
        let bands = m
            .bands
            .iter()
            .enumerate()
            .map(|(d, b)| ((-(d as isize) - 1).to_string(), encode_band(b)))
            .collect();
        MatrixJson {
            p: m.p,
            n: m.n,
            bands,
        }
    }
}

impl TryFrom<MatrixJson> for UnitLowerBanded {
    type Error = Error;
    fn try_from(mut j: MatrixJson) -> Result<Self> {
        let mut bands = Vec::with_capacity(j.p);
        for d in 1..=j.p {
            let b = j.take(-(d as isize))?;
            if b.len() != j.n.saturating_sub(d) {
                return Err(Error::Parse(format!("band -{d} has the wrong length")));
            }
            bands.push(b);
        }
        j.reject_leftovers()?;
        UnitLowerBanded::from_fn(j.p, j.n, |i, c| bands[i - c - 1][c])
    }
}

impl From<Bidiagonal> for MatrixJson {
    fn from(m: Bidiagonal) -> Self {
        let key = match m.kind {
            BidiagonalKind::Upper => "0",
            BidiagonalKind::Lower => "-1",
        };
        MatrixJson {
            p: 1,
            n: m.n,
            bands: BTreeMap::from([(key.to_string(), encode_band(&m.free))]),
        }
    }
}

impl TryFrom<MatrixJson> for Bidiagonal {
    type Error = Error;
    fn try_from(mut j: MatrixJson) -> Result<Self> {
        let m = if j.bands.contains_key("0") {
            Bidiagonal::upper(j.take(0)?)?
        } else {
            Bidiagonal::lower(j.n, j.take(-1)?)?
        };
        j.reject_leftovers()?;
        if m.n != j.n {
            return Err(Error::Parse(format!("n = {} but band describes {}", j.n, m.n)));
        }
        Ok(m)
    }
}
