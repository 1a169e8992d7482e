//! The two routes from `J(0)` to `J(t)`: Toda directly, or gammas evolved by
//! KdV and mapped back through the transforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::verify::{EntryId, ResidualReport};
use super::{evolve_kdv, evolve_toda, verify_kdv, verify_toda, Trajectory};
use crate::banded::{Banded, BandedHessenberg, Scalar};
use crate::darboux::{backlund_matrix, darboux_factorize_sampled, table_fill, GammaTable, ParameterSet, SamplingOptions};
use crate::error::{Error, Result};
use crate::lu::{lu_factorize, ShiftedProblem};

#[derive(Debug, Clone, PartialEq)]
pub enum ParamChoice {
    Given(ParameterSet),
    /// Drawn stage by stage from a seeded generator.
    Sampled { seed: u64, options: SamplingOptions },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramConfig {
    pub dt: f64,
    pub steps: usize,
    /// Size of the leading block on which both routes are compared.
    pub window: usize,
    pub tol_path: f64,
    pub tol_verify: f64,
    pub pivot_tol: f64,
    pub peel_tol: f64,
}

#[derive(Debug, Clone)]
pub struct DiagramReport {
    /// Max-entry gap between the two routes for `J^(0)`.
    pub path: ResidualReport,
    /// Toda residual of each `J^(j)(t)`, `j = 0..=p`.
    pub toda: Vec<ResidualReport>,
    pub kdv: ResidualReport,
    pub params: ParameterSet,
    pub direct: Trajectory<BandedHessenberg>,
    pub gamma: Trajectory<GammaTable>,
    /// `J^(j)(t)` on the window, read off the evolved gammas.
    pub transforms: Vec<Trajectory<BandedHessenberg>>,
}

impl DiagramReport {
    pub fn pass(&self) -> bool {
        self.path.pass && self.kdv.pass && self.toda.iter().all(|r| r.pass)
    }

    pub fn reports(&self) -> Vec<&ResidualReport> {
        let mut out = vec![&self.path];
        out.extend(&self.toda);
        out.push(&self.kdv);
        out
    }
}

/// Runs both routes from `j0` and checks that they agree on the window and
/// that every computed trajectory solves its lattice.
///
/// `j0` is the working truncation; it must exceed the window by a margin so
/// that boundary effects of the truncated flows stay outside the window.
pub fn theorem1_diagram(
    j0: &BandedHessenberg,
    shift: Scalar,
    choice: &ParamChoice,
    cfg: &DiagramConfig,
) -> Result<DiagramReport> {
    let p = j0.p();
    let n = j0.n();
    if cfg.window < 3 || cfg.window + 1 > n {
        return Err(Error::Size(format!(
            "window {} must be at least 3 and below the working size {n}",
            cfg.window
        )));
    }
    let prob = ShiftedProblem::new(j0.clone(), shift);
    let lu = lu_factorize(&prob, cfg.pivot_tol).map_err(|e| e.at_stage("lu"))?;
    let params = match choice {
        ParamChoice::Given(ps) => ps.clone(),
        ParamChoice::Sampled { seed, options } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            darboux_factorize_sampled(&lu.l, &mut rng, options, cfg.peel_tol)
                .map_err(|e| e.at_stage("darboux"))?
                .1
        }
    };
    let table = table_fill(j0, lu.u.free(), &params, cfg.peel_tol).map_err(|e| e.at_stage("table"))?;

    let gamma = evolve_kdv(&table, cfg.dt, cfg.steps).map_err(|e| e.at_stage("kdv"))?;
    let direct = evolve_toda(j0, cfg.dt, cfg.steps).map_err(|e| e.at_stage("toda"))?;

    let transforms = (0..=p)
        .map(|j| {
            let states = gamma
                .states
                .iter()
                .map(|g| backlund_matrix(g, j, shift, cfg.window))
                .collect::<Result<Vec<_>>>()?;
            Ok(Trajectory {
                dt: gamma.dt,
                times: gamma.times.clone(),
                states,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage("backlund"))?;

    let mut path = ResidualReport::new("path", cfg.tol_path);
    for (m, (a, b)) in transforms[0].states.iter().zip(&direct.states).enumerate() {
        for ((row, col), v) in a.entries() {
            path.record((v - b.get(row, col)).norm(), EntryId::Band { row, col }, m);
        }
    }
    let path = path.finish();

    let toda = transforms
        .iter()
        .enumerate()
        .map(|(j, t)| {
            verify_toda(t, cfg.window, cfg.tol_verify).map(|mut r| {
                r.check = format!("toda[{j}]");
                r
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let kdv = verify_kdv(&gamma, cfg.tol_verify)?;

    Ok(DiagramReport {
        path,
        toda,
        kdv,
        params,
        direct,
        gamma,
        transforms,
    })
}
