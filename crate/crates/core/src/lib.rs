//! Monte Carlo simulation of a charge qubit weakly and continuously probed by a
//! quantum point contact (QPC).
//!
//! A run draws a discretized detector record step by step, evolves the qubit
//! under precession plus Kraus back-action, and accumulates the total
//! propagator. The propagator is split into a rotation and a positive
//! measurement matrix whose eigenbasis is the (stochastic) measurement basis.
//! Ensembles of such runs feed a Bloch-ball state reconstruction.
//!
//! All math is generic over the scalar type through [`Real`]; the aliases at
//! the crate root fix it to `f64`, which is what the experiments use.

// NaN-rejecting `!(x > 0)` checks and index loops over small fixed matrices are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod detector;
pub mod error;
pub mod qmat;
pub mod scalar;
pub mod tomography;
pub mod trajectory;

pub use error::{Error, Result};
pub use scalar::Real;

pub use analysis::{analyze, analyze_matrix, canonical_axis, result_direction};
pub use detector::{build_bins, calibrate, outcome_distribution, sample_bin};
pub use qmat::{angle_between, bloch_from_state, charge_states, polar_decompose};
pub use tomography::{collect_directions, cost, density_from_bloch, reconstruct};
pub use trajectory::{hamiltonian_step, replay, run_trajectory, step, TrajectorySeed};

pub type Ket = qmat::Ket<f64>;
pub type Mat2 = qmat::Mat2<f64>;
pub type QubitParams = qmat::QubitParams<f64>;
pub type DensityMatrix = qmat::DensityMatrix<f64>;
pub type BlochVector = qmat::BlochVector<f64>;
pub type PolarFactors = qmat::PolarFactors<f64>;
pub type DetectorParams = detector::DetectorParams<f64>;
pub type CouplingSpec = detector::CouplingSpec<f64>;
pub type BinSet = detector::BinSet<f64>;
pub type ScaledPropagator = trajectory::ScaledPropagator<f64>;
pub type TrajectoryResult = trajectory::TrajectoryResult<f64>;
pub type MeasurementOutcome = analysis::MeasurementOutcome<f64>;
pub type TomographyEstimate = tomography::TomographyEstimate<f64>;
pub type DirectionSample = tomography::DirectionSample<f64>;

pub type DensityMatrixF32 = qmat::DensityMatrix<f32>;
pub type BinSetF32 = detector::BinSet<f32>;
pub type MeasurementOutcomeF32 = analysis::MeasurementOutcome<f32>;
