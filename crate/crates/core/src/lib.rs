//! Spectral solver for a point scatterer on a unit-area Dirichlet rectangle
//! (the Šeba billiard), with localization measures and parameter sweeps.
//!
//! The scatterer operator is the self-adjoint extension of the Laplacian with
//! coupling `alpha in (-inf, +inf]` at an interior point `x0`. Its spectrum
//! consists of the roots of `F(z) = alpha`, which interlace the Dirichlet
//! eigenvalues, together with the Dirichlet eigenvalues whose eigenspaces
//! contain a function vanishing at `x0`.

pub mod basis;
pub mod config;
pub mod error;
pub mod field;
pub mod localization;
pub mod output;
pub mod secular;
pub mod spectral;
pub mod spectrum;
pub mod sweep;

pub use basis::{build_basis, eigenfunction_value, mode_count_bound, weyl_count_estimate, BasisMode, RectGeometry, SpectralBasis};
pub use error::{Result, SebaError};
pub use field::{mode_field, Field2};
pub use localization::{
    amplitude_at_scatterer, l2_ratio, localization_table, localized_count, overlap_integral,
    spectrum_records, LocalizationRecord, SubdomainMass, Thresholds,
};
pub use spectral::{Classification, Cluster, SpectralFunction};
pub use spectrum::{compute_spectrum, Coupling, ModeKind, PerturbedMode, ScattererSpectrum};
pub use sweep::{
    amplitude_curve, auto_cutoff, scan_alpha, solve, sweep_eccentricity, table, tan_spaced_grid,
    uniform_grid, AmplitudeSample, CutoffPolicy, ExperimentParams, SweepKind, SweepResult,
};
