//! Long-format CSV export of trajectories.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::verify::EntryId;
use super::Trajectory;
use crate::banded::{BandedHessenberg, Scalar};
use crate::darboux::GammaTable;

/// Metadata written next to a trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub dt: f64,
    pub steps: usize,
    pub p: usize,
    pub n: usize,
    #[serde(rename = "C", with = "crate::json::scalar")]
    pub shift: Scalar,
    pub seed: Option<u64>,
}

fn write_rows<W: Write>(w: &mut W, t: f64, rows: impl Iterator<Item = (EntryId, Scalar)>) -> io::Result<()> {
    for (id, v) in rows {
        writeln!(w, "{t},{id},{},{}", v.re, v.im)?;
    }
    Ok(())
}

/// Writes `t,entry_id,re,im` rows, one per stored band entry per sample.
pub fn write_toda_csv<W: Write>(w: &mut W, traj: &Trajectory<BandedHessenberg>) -> io::Result<()> {
    writeln!(w, "t,entry_id,re,im")?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        write_rows(w, *t, s.entries().map(|((row, col), v)| (EntryId::Band { row, col }, v)))?;
    }
    Ok(())
}

/// Writes `t,entry_id,re,im` rows, one per gamma per sample.
pub fn write_gamma_csv<W: Write>(w: &mut W, traj: &Trajectory<GammaTable>) -> io::Result<()> {
    writeln!(w, "t,entry_id,re,im")?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        write_rows(
            w,
            *t,
            s.values()
                .iter()
                .enumerate()
                .map(|(k, &v)| (EntryId::Gamma(k as i64 + 1), v)),
        )?;
    }
    Ok(())
}
