//! Stochastic time stepping: Hamiltonian precession followed by measurement
//! back-action, with the total propagator accumulated alongside the state.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::detector::{BinSet, DetectorParams};
use crate::error::{Error, Result};
use crate::qmat::{DensityMatrix, Mat2, QubitParams};
use crate::scalar::Real;

/// Largest `E·δt` accepted by [`hamiltonian_step`].
pub const MAX_PHASE_PER_STEP: f64 = 0.1;

/// Exact single-step propagator `exp(-i H δt)` for `H = -E σz / 2`, i.e.
/// `diag(e^{iEδt/2}, e^{-iEδt/2})`.
pub fn hamiltonian_step<T: Real>(qp: &QubitParams<T>, delta_t: T) -> Result<Mat2<T>> {
    let phase = qp.energy_splitting * delta_t;
    if !(phase >= T::zero()) || phase > T::lit(MAX_PHASE_PER_STEP) {
        return Err(Error::Config(format!(
            "E*delta_t = {phase} must lie in [0, {MAX_PHASE_PER_STEP}]"
        )));
    }
    let half = phase / T::lit(2.0);
    Ok(Mat2::diag(Complex::from_polar(T::one(), half), Complex::from_polar(T::one(), -half)))
}

/// Product of step operators kept as `matrix · exp(log_scale)` with the
/// Frobenius norm of `matrix` held in `[0.5, 2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledPropagator<T> {
    pub matrix: Mat2<T>,
    pub log_scale: T,
}

impl<T: Real> ScaledPropagator<T> {
    pub fn identity() -> Self {
        Self {
            matrix: Mat2::identity(),
            log_scale: T::zero(),
        }
    }

    /// Left-multiplies by `op` and rescales back into the norm window. The
    /// rescale factor is a power of two, so it introduces no rounding.
    pub fn push(&mut self, op: &Mat2<T>) {
        self.matrix = *op * self.matrix;
        let norm = self.matrix.frobenius_norm();
        if (norm < T::lit(0.5) || norm > T::lit(2.0)) && norm > T::zero() && norm.is_finite() {
            let exponent = norm.log2().round();
            let two = T::lit(2.0);
            self.matrix = self.matrix.scale(two.powf(-exponent));
            self.log_scale += exponent * T::LN_2();
        }
    }

    /// `matrix · exp(log_scale)`; may under- or overflow for long chains.
    pub fn unscaled(&self) -> Mat2<T> {
        self.matrix.scale(self.log_scale.exp())
    }
}

/// Per-trajectory random stream: ChaCha8 keyed by `master`, stream `stream`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrajectorySeed {
    pub master: u64,
    pub stream: u64,
}

impl TrajectorySeed {
    pub fn new(master: u64, stream: u64) -> Self {
        Self { master, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

/// Number of whole steps closest to `duration`; at least one.
pub fn steps_for_duration<T: Real>(duration: T, delta_t: T) -> Result<usize> {
    let n = (duration / delta_t).round();
    match n.to_usize() {
        Some(n) if n >= 1 && duration.is_finite() => Ok(n),
        _ => Err(Error::Config(format!(
            "duration {duration} does not cover a single step of {delta_t}"
        ))),
    }
}

/// Applies one measurement step at a time for a fixed bin set.
#[derive(Clone, Debug)]
pub struct Stepper<'a, T> {
    bins: &'a BinSet<T>,
    hamiltonian: Mat2<T>,
}

impl<'a, T: Real> Stepper<'a, T> {
    pub fn new(bins: &'a BinSet<T>) -> Result<Self> {
        let hamiltonian = hamiltonian_step(bins.qubit(), bins.params().delta_t)?;
        Ok(Self { bins, hamiltonian })
    }

    pub fn bins(&self) -> &BinSet<T> {
        self.bins
    }

    pub fn hamiltonian(&self) -> &Mat2<T> {
        &self.hamiltonian
    }

    /// `U_k = K_k · U_H`: precession first, then the back-action of bin `k`.
    pub fn step_operator(&self, k: usize) -> Mat2<T> {
        self.bins.kraus()[k] * self.hamiltonian
    }

    /// Draws the outcome for the next step. The probabilities are
    /// `Tr{U_k ρ U_k†}`, i.e. the detector sees the state after this step's precession.
    pub fn sample<R: Rng + ?Sized>(&self, state: &DensityMatrix<T>, rng: &mut R) -> usize {
        let precessed = self.hamiltonian.conjugate(state.matrix());
        let (l, r) = self.bins.charge_states();
        let pop_l = precessed.sandwich(&l, &l).re.max(T::zero());
        let pop_r = precessed.sandwich(&r, &r).re.max(T::zero());
        self.bins
            .sample_with_populations(pop_l, pop_r, T::lit(rng.random::<f64>()))
    }

    /// Deterministic part of a step once the outcome `k` is known.
    pub fn apply(
        &self,
        state: &DensityMatrix<T>,
        acc: &mut ScaledPropagator<T>,
        k: usize,
        step_index: usize,
    ) -> Result<DensityMatrix<T>> {
        let op = self.step_operator(k);
        let evolved = op.conjugate(state.matrix());
        let next = DensityMatrix::from_unnormalized(&evolved).ok_or(Error::DeadBranch {
            step: step_index,
            probability: evolved.trace().re.as_f64(),
        })?;
        acc.push(&op);
        Ok(next)
    }

    pub fn step<R: Rng + ?Sized>(
        &self,
        state: &DensityMatrix<T>,
        acc: &mut ScaledPropagator<T>,
        rng: &mut R,
        step_index: usize,
    ) -> Result<(DensityMatrix<T>, usize)> {
        let k = self.sample(state, rng);
        let next = self.apply(state, acc, k, step_index)?;
        Ok((next, k))
    }
}

/// One stochastic step: samples `k`, returns the conditioned state, the updated
/// accumulator and `k`.
pub fn step<T: Real, R: Rng + ?Sized>(
    state: &DensityMatrix<T>,
    acc: &ScaledPropagator<T>,
    bins: &BinSet<T>,
    rng: &mut R,
) -> Result<(DensityMatrix<T>, ScaledPropagator<T>, usize)> {
    let stepper = Stepper::new(bins)?;
    let mut acc = *acc;
    let (next, k) = stepper.step(state, &mut acc, rng, 0)?;
    Ok((next, acc, k))
}

#[derive(Clone, Debug)]
pub struct TrajectoryResult<T> {
    /// Bin index observed at each step.
    pub record: Vec<u32>,
    pub propagator: ScaledPropagator<T>,
    pub final_rho: DensityMatrix<T>,
    pub seed: TrajectorySeed,
    pub qubit: QubitParams<T>,
    pub detector: DetectorParams<T>,
}

/// Runs `steps` steps from `initial`, calling `observe(step_index, k, state, acc)`
/// after each one.
pub fn run_steps_observed<T, F>(
    initial: &DensityMatrix<T>,
    steps: usize,
    stepper: &Stepper<'_, T>,
    seed: TrajectorySeed,
    mut observe: F,
) -> Result<TrajectoryResult<T>>
where
    T: Real,
    F: FnMut(usize, usize, &DensityMatrix<T>, &ScaledPropagator<T>),
{
    let mut rng = seed.rng();
    let mut state = *initial;
    let mut acc = ScaledPropagator::identity();
    let mut record = Vec::with_capacity(steps);
    for i in 0..steps {
        let (next, k) = stepper.step(&state, &mut acc, &mut rng, i)?;
        state = next;
        record.push(k as u32);
        observe(i, k, &state, &acc);
    }
    Ok(TrajectoryResult {
        record,
        propagator: acc,
        final_rho: state,
        seed,
        qubit: *stepper.bins().qubit(),
        detector: *stepper.bins().params(),
    })
}

/// Runs one trajectory of the given duration (rounded to whole steps of `δt`).
pub fn run_trajectory<T: Real>(
    initial: &DensityMatrix<T>,
    duration: T,
    bins: &BinSet<T>,
    seed: TrajectorySeed,
) -> Result<TrajectoryResult<T>> {
    let steps = steps_for_duration(duration, bins.params().delta_t)?;
    let stepper = Stepper::new(bins)?;
    run_steps_observed(initial, steps, &stepper, seed, |_, _, _, _| {})
}

/// Re-applies a recorded outcome sequence; reproduces the propagator and final
/// state of the run that produced it.
pub fn replay<T: Real>(
    initial: &DensityMatrix<T>,
    record: &[u32],
    bins: &BinSet<T>,
) -> Result<(ScaledPropagator<T>, DensityMatrix<T>)> {
    let stepper = Stepper::new(bins)?;
    let mut acc = ScaledPropagator::identity();
    let mut state = *initial;
    for (i, &k) in record.iter().enumerate() {
        if k as usize >= bins.len() {
            return Err(Error::Config(format!("record refers to bin {k} of {}", bins.len())));
        }
        state = stepper.apply(&state, &mut acc, k as usize, i)?;
    }
    Ok((acc, state))
}

/// Evaluates `job(index)` for `0..count` on the current rayon pool and returns the
/// results in index order. Jobs must derive their randomness from the index.
pub fn run_ensemble<R, F>(count: usize, job: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    (0..count as u64).into_par_iter().map(job).collect()
}
