//! Detection of regular vs. chaotic dynamics in a damped, pulse-driven
//! Kerr-nonlinear cavity using attractor reconstruction and persistent
//! homology.
//!
//! The crate is organized as a pipeline:
//!
//! * [`classical`] — mean-field equation of motion under a rectangular pulse
//!   train, fixed-step RK4 integration, stroboscopic bifurcation scans.
//! * [`quantum`] — Monte Carlo wavefunction (quantum-jump) trajectories in a
//!   truncated Fock space, plus a small-dimension Lindblad master-equation
//!   oracle and photon-count binning.
//! * [`embedding`] — Takens time-delay embedding of scalar series with
//!   mutual-information and false-nearest-neighbor hyperparameter heuristics.
//! * [`homology`] — Vietoris-Rips persistent homology (H0/H1) over Z/2 with
//!   greedy maxmin landmark subsampling and the average-lifetime summary.
//! * [`pipeline`] — composition of the above into reproducible single-cell
//!   runs, (A, T) phase-diagram sweeps, and hyperparameter robustness
//!   studies, with CSV/SVG artifact export.

pub mod classical;
pub mod embedding;
pub mod export;
pub mod homology;
pub mod pipeline;
pub mod quantum;
pub mod series;
pub mod stats;

pub use num_complex::Complex64;
