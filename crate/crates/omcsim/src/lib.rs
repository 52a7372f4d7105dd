//! Simulation library for a two-way optical waveguide side-coupled to a
//! periodic array of driven optomechanical elements.
//!
//! The crate covers the full analysis chain for such an array:
//!
//! * [`params`] — physical parameters, named presets, validation, derived rates
//! * [`scattering`] — single-element reflection/transmission and 2x2 transfer
//!   matrices
//! * [`bands`] — infinite-array Bloch dispersion, band edges and fractional
//!   occupations
//! * [`cascade`] — finite-N spectra, wavevector series, bandwidth/delay limits
//! * [`dynamics`] — time-domain pulse capture/hold/release with a time-varying
//!   drive
//! * [`noise`] — thermal/Stokes noise budget, steady-state mechanical energy,
//!   pump power and attenuation
//! * [`design`] — constrained maximization of the bandwidth-delay product
//!
//! All frequencies and rates are stored as angular quantities (rad/s). Grid
//! sweeps are data-parallel by default (rayon); build with
//! `--no-default-features` for a sequential build.

use thiserror::Error;

pub mod bands;
pub mod cascade;
pub mod design;
pub mod dynamics;
pub mod noise;
pub mod params;
pub mod scattering;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const KB: f64 = 1.380_649e-23;

/// Numerical tolerances used by internal identity checks and guards.
pub mod tol {
    /// Transfer-matrix determinant identity (|det - 1|).
    pub const DET_UNITY: f64 = 1e-12;
    /// Entrywise agreement of redundant construction routes.
    pub const CROSS_CHECK: f64 = 1e-10;
    /// Smallest |t| for which an element matrix is considered regular.
    pub const SINGULAR_T: f64 = 1e-300;
    /// Smallest |M(2,2)| for which spectrum coefficients are extracted.
    pub const SPECTRUM_GUARD: f64 = 1e-300;
    /// Relative eigenvalue separation below which a block matrix is treated
    /// as non-diagonalizable. Sized so that a detuning sitting on a band
    /// edge to machine precision (eigenvalue splitting ~√ε) still triggers
    /// the degenerate path.
    pub const DEGENERATE_EIG: f64 = 1e-7;
}

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter set rejected by validation.
    #[error("parameter validation failed: {0}")]
    Validation(String),
    /// A quantity is undefined for the supplied inputs (division by zero
    /// corner, drive switched off, ...).
    #[error("undefined for these inputs: {0}")]
    Undefined(String),
    /// Element transfer matrix could not be formed (t = 0).
    #[error("singular transfer matrix: {0}")]
    SingularMatrix(String),
    /// Eigendecomposition is degenerate (band edge or nπ phasing).
    #[error("degenerate eigenvalues (band edge): {0}")]
    DegenerateEigenvalues(String),
    /// Pump detuning falls inside the bare-cavity band gap.
    #[error("pump detuning {detuning:.6e} rad/s lies inside the band gap ({gap_lo:.6e}, {gap_hi:.6e}) rad/s")]
    PumpInBandGap {
        detuning: f64,
        gap_lo: f64,
        gap_hi: f64,
    },
    /// Rate equation has no stable steady state.
    #[error("unstable rate equation: {0}")]
    Unstable(String),
    /// Generic numerical failure (overflow, non-finite intermediate).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// No feasible candidate in a constrained search.
    #[error("no feasible design candidate: most binding constraint is {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Format a float with 17 significant digits so that CSV output round-trips
/// bit-exactly.
pub(crate) fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Map a slice through `f`, in parallel when the `parallel` feature is
/// enabled. Output order always follows input order.
pub(crate) fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
