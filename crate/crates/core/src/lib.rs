//! Padé approximants from truncated power series.
//!
//! Four constructions are provided:
//!
//! * the direct method ([`baseline::dm_denominator`]), which fixes `b_0 = 1`
//!   and solves the Toeplitz system for the remaining denominator terms;
//! * the SVD null-vector method ([`baseline::svd_denominator`]);
//! * the matrix-pencil method ([`pencil::pm1`]), which reads the poles off the
//!   eigenvalues of a Hankel pencil and the weights off a Vandermonde system;
//! * the filtered pencil method ([`pm2::pm2`]), which shrinks the pole count
//!   until every singular value of the Hankel matrix clears the accuracy
//!   threshold, drops poles at the development point, and then solves the
//!   full overdetermined weight system so that the discarded coefficients
//!   still inform the result.
//!
//! Supporting modules cover series generators, dense complex kernels, root
//! classification, evaluation and error sweeps, and the experiment runners
//! behind the `pade` binary.

pub mod approximant;
pub mod baseline;
pub mod classify;
pub mod error;
pub mod experiments;
pub mod numerics;
pub mod pencil;
pub mod pm2;
pub mod series;

pub use approximant::{
    error_sweep, eval_pole_residue, eval_rational, poles_and_zeros, unit_disk_mesh, Evaluate,
    ErrorSweep,
};
pub use baseline::{
    dm_denominator, numerator_from_denominator, svd_denominator, Conformation,
    RationalApproximant,
};
pub use classify::{classify_roots, ClassifyThresholds, RootTaxonomy};
pub use error::{PadeError, Result};
pub use num_complex::Complex64;
pub use pencil::{build_blocks, pm1, pm1_poles, pm1_residues, to_rational, HankelBlocks, PoleResidueForm};
pub use pm2::{count_filtered, pm2, reduced_poles, FilterParams, Pm2Output, SpuriousPoleReport};
pub use series::PowerSeries;
