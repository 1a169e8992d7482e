//! Random instances built from their factors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DarbouxFactors, GammaTable, ParameterSet};
use crate::banded::{draw_scalar, multiply_chain, Banded, BandedHessenberg, Bidiagonal, SampleMode, Scalar};
use crate::error::{Error, Result};

/// A matrix with a known Darboux factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxInstance {
    pub j: BandedHessenberg,
    pub factors: DarbouxFactors,
    pub params: ParameterSet,
    pub table: GammaTable,
}

/// Gamma magnitude used for time-dependent fixtures: entries of `J` then
/// stay of order one, which keeps the lattice flows smooth over unit times.
pub fn moderate_magnitude(p: usize) -> f64 {
    1.0 / (2.0 * (p as f64 + 1.0))
}

/// `J = C I + L^(1) ... L^(p) U` with every gamma of modulus uniform in
/// `magnitude.0 ..= magnitude.1`.
pub fn random_darboux_instance(
    p: usize,
    n: usize,
    shift: Scalar,
    magnitude: (f64, f64),
    seed: u64,
    mode: SampleMode,
) -> Result<DarbouxInstance> {
    let (lo, hi) = magnitude;
    if p == 0 || n <= p {
        return Err(Error::InvalidArgument(format!("need n > p >= 1 (p = {p}, n = {n})")));
    }
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad magnitude range [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |len: usize| (0..len).map(|_| draw_scalar(&mut rng, lo, hi, mode)).collect::<Vec<_>>();
    let u = Bidiagonal::upper(draw(n))?;
    let lowers = (0..p)
        .map(|_| Bidiagonal::lower(n, draw(n - 1)))
        .collect::<Result<Vec<_>>>()?;
    let mut chain: Vec<&dyn Banded> = lowers.iter().map(|l| l as &dyn Banded).collect();
    chain.push(&u);
    let (prod, _) = multiply_chain(&chain)?;
    let j = BandedHessenberg::from_band(&prod.shift_diagonal(shift), p)?;
    let table = GammaTable::from_factors(&u, &lowers)?;
    let params = table.parameters()?;
    Ok(DarbouxInstance {
        j,
        factors: DarbouxFactors { u, lowers, shift },
        params,
        table,
    })
}
