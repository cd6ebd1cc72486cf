//! Steady-state quantum correlations of two optomechanical cavities driven by
//! two-mode squeezed light.
//!
//! The crate builds the standard-form covariance matrices of the
//! mechanical-mechanical and optical-optical bipartitions of a pair of
//! identical, red-sideband-driven Fabry-Perot cavities, and quantifies the
//! Gaussian Rényi-2 entanglement and Rényi-2 discord they carry. Every closed
//! form is backed by independent oracles:
//!
//! * [`dynamics`] rebuilds the steady state from the linearised
//!   rotating-wave Langevin equations two ways - a Lyapunov solve and direct
//!   spectral integration of the frequency-domain solution;
//! * [`correlations::discord_oracle`] re-derives the discord by numerically
//!   optimising over Gaussian measurements.
//!
//! [`sweep`] and [`plot`] drive parameter sweeps, CSV output and SVG line
//! plots from the command line (see the `optocorr` binary).
//!
//! Quadratures are normalised so the vacuum variance is 1/2 (`hbar = 1`);
//! entropies are in nats.

pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod plot;
pub mod quad;
pub mod sweep;

pub use correlations::{
    analyze, classical_correlations, discord_oracle, gr2_discord, gr2_entanglement,
    CorrelationReport, GaussianMeasurement, Measured,
};
pub use dynamics::{
    build_dynamics, extract_bipartition, lyapunov_cm, spectral_cm, Bipartition, LinearDynamics,
    TransferSolution,
};
pub use error::{Error, Result};
pub use gaussian::{
    det_offdiag, is_physical, mutual_information_r2, renyi2_entropy, renyi2_single_mode,
    symplectic_eigenvalues, FullCM, SymplecticSpectrum, TwoModeCM, PHYSICALITY_TOL,
};
pub use model::{
    cooperativity, mechanical_cm, optical_cm, reduce, steady_state, thermal_occupation,
    PhysicalParams, ReducedParams, SteadyState,
};
pub use plot::{emit_plot, PanelSpec};
pub use sweep::{
    critical_temperature, run_sweep, verify, Axis, Measure, SweepConfig, SweepRow,
    VerificationReport,
};
