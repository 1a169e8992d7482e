//! Darboux factorizations of banded Hessenberg matrices, their Bäcklund
//! transforms, and the full Kostant Toda and discrete KdV lattices that
//! connect them.
//!
//! A lower Hessenberg matrix `J` with `p + 1` lower bands and unit
//! superdiagonal factors, for a shift `C`, as
//! `J - C I = L^(1) ... L^(p) U` with lower bidiagonal `L^(i)` and upper
//! bidiagonal `U`. Cyclically moving factors gives the transforms `J^(i)`.
//! The Toda flow on `J` lifts to the KdV flow on the factor entries.

#![allow(clippy::needless_range_loop)]

pub mod banded;
pub mod darboux;
mod dense;
pub mod error;
pub mod json;
pub mod lattice;
pub mod lu;

pub use banded::{
    multiply, multiply_chain, random_hessenberg, residual, BandMatrix, Banded, BandedHessenberg, Bidiagonal,
    BidiagonalKind, MatrixJson, SampleMode, Scalar, Truncate, UnitLowerBanded, ValidWindow,
};
pub use darboux::{
    assemble_transform, backlund_entry, backlund_matrix, darboux_factorize, darboux_factorize_sampled,
    enumerate_indices, enumerate_indices_tilde, peel, random_darboux_instance, sample_parameters, table_fill,
    DarbouxFactors, DarbouxInstance, GammaTable, ParameterSet, SamplingOptions,
};
pub use error::{Error, Result};
pub use lattice::{
    check_delta_derivative, check_poly_derivative, evolve_kdv, evolve_toda, kdv_rhs, theorem1_diagram, toda_rhs,
    verify_kdv, verify_toda, DiagramConfig, DiagramReport, EntryId, ParamChoice, ResidualReport, Trajectory,
};
pub use lu::{char_poly, lu_factorize, pivot_gammas, LuFactors, PolySequence, ShiftedProblem};
