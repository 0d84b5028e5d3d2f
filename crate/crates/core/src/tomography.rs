//! State tomography from runs measured in stochastically determined bases.
//!
//! Each run contributes the Bloch direction `n_j` of its inferred
//! pre-measurement state. The estimate minimizes
//!
//! ```text
//! T(r, θ, φ) = Σ_j [1 - r cos Ω(θ, φ, θ_j, φ_j)]²
//! ```
//!
//! over the Bloch ball. With `v = r·n` this is `Σ_j (1 - v·n_j)²`, a quadratic
//! in `v` whose unconstrained minimizer solves `A v = b` with `A = Σ n_j n_jᵀ`
//! and `b = Σ n_j`. When that point lies outside the ball, the constrained
//! minimizer is on the sphere and is found from the secular equation in the
//! eigenbasis of `A`.

use crate::analysis::{analyze, result_direction};
use crate::detector::BinSet;
use crate::error::{Error, Result};
use crate::qmat::{angle_between, BlochVector, DensityMatrix};
use crate::scalar::Real;
use crate::trajectory::{run_ensemble, run_steps_observed, steps_for_duration, Stepper, TrajectorySeed};

/// `moment_condition` below this means the bases cluster too tightly for a
/// reliable reconstruction.
pub const MOMENT_WARNING_THRESHOLD: f64 = 0.02;

/// Inferred result directions of an ensemble, with the number of runs dropped
/// for carrying no information.
#[derive(Clone, Debug)]
pub struct DirectionSample<T> {
    pub directions: Vec<BlochVector<T>>,
    pub excluded: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct TomographyEstimate<T> {
    pub bloch: BlochVector<T>,
    /// Cost function value at the estimate.
    pub residual: T,
    pub n_runs: usize,
    /// `λ_min(A) / n_runs`; 1/3 for isotropic bases, 0 when all bases coincide.
    pub moment_condition: T,
}

impl<T: Real> TomographyEstimate<T> {
    pub fn bases_clustered(&self) -> bool {
        self.moment_condition < T::lit(MOMENT_WARNING_THRESHOLD)
    }
}

/// Runs `n_runs` trajectories from `initial` (stream `j` of `master_seed` for run
/// `j`), analyzes each and keeps the result direction of every informative run.
pub fn collect_directions<T: Real>(
    initial: &DensityMatrix<T>,
    n_runs: usize,
    duration: T,
    bins: &BinSet<T>,
    master_seed: u64,
) -> Result<DirectionSample<T>> {
    if n_runs == 0 {
        return Err(Error::Config("tomography needs at least one run".into()));
    }
    let steps = steps_for_duration(duration, bins.params().delta_t)?;
    let stepper = Stepper::new(bins)?;
    let per_run = run_ensemble(n_runs, |j| -> Result<Option<BlochVector<T>>> {
        let seed = TrajectorySeed::new(master_seed, j);
        let run = run_steps_observed(initial, steps, &stepper, seed, |_, _, _, _| {})?;
        let outcome = analyze(&run.propagator)?;
        match result_direction(&outcome) {
            Ok(d) => Ok(Some(d)),
            Err(Error::NoInformation) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let mut directions = Vec::with_capacity(n_runs);
    let mut excluded = 0;
    for run in per_run {
        match run? {
            Some(d) => directions.push(d),
            None => excluded += 1,
        }
    }
    if directions.is_empty() {
        return Err(Error::ReconstructionImpossible(format!(
            "all {n_runs} runs had zero fidelity"
        )));
    }
    Ok(DirectionSample { directions, excluded })
}

/// `Σ_j [1 - r cos Ω_j]²`
pub fn cost<T: Real>(r: T, theta: T, phi: T, directions: &[BlochVector<T>]) -> T {
    let query = BlochVector::unit(theta, phi);
    directions.iter().fold(T::zero(), |acc, d| {
        let term = T::one() - r * angle_between(&query, d).cos();
        acc + term * term
    })
}

type Sym3<T> = [[T; 3]; 3];

/// Jacobi eigen-decomposition of a symmetric 3×3 matrix. Returns eigenvalues in
/// ascending order and the matching eigenvectors as columns.
fn symmetric_eigen3<T: Real>(mut a: Sym3<T>) -> ([T; 3], Sym3<T>) {
    let mut v = [[T::zero(); 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    let scale = a.iter().flatten().fold(T::zero(), |m, x| m.max(x.abs()));
    for _ in 0..64 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off <= T::epsilon() * scale * T::lit(1e-3) || off == T::zero() {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == T::zero() {
                continue;
            }
            let two = T::lit(2.0);
            let theta = (a[q][q] - a[p][p]) / (two * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let values = order.map(|i| a[i][i]);
    let mut vectors = [[T::zero(); 3]; 3];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..3 {
            vectors[row][col] = v[row][src];
        }
    }
    (values, vectors)
}

/// Closed-form minimizer of the tomography cost over the Bloch ball.
pub fn reconstruct<T: Real>(directions: &[BlochVector<T>]) -> Result<TomographyEstimate<T>> {
    if directions.is_empty() {
        return Err(Error::ReconstructionImpossible("no directions".into()));
    }
    let n = directions.len();
    let mut moments = [[T::zero(); 3]; 3];
    let mut sum = [T::zero(); 3];
    for d in directions {
        let u = d.unit_vector();
        for i in 0..3 {
            sum[i] += u[i];
            for j in 0..3 {
                moments[i][j] += u[i] * u[j];
            }
        }
    }
    let (values, vectors) = symmetric_eigen3(moments);
    let largest = values[2];
    let singular_floor = largest * T::tol(1e-12);
    let b_norm = sum.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();

    // b in the eigenbasis of A
    let coeff: [T; 3] = std::array::from_fn(|i| (0..3).fold(T::zero(), |a, r| a + vectors[r][i] * sum[r]));
    let mut active = [true; 3];
    for i in 0..3 {
        if values[i] <= singular_floor {
            if coeff[i].abs() > T::tol(1e-8) * (b_norm + T::one()) {
                return Err(Error::ReconstructionImpossible(
                    "direction sum lies outside the span of the directions".into(),
                ));
            }
            active[i] = false;
        }
    }
    let solve = |shift: T| -> [T; 3] {
        std::array::from_fn(|i| if active[i] { coeff[i] / (values[i] + shift) } else { T::zero() })
    };
    let norm_of = |y: &[T; 3]| y.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();

    let mut y = solve(T::zero());
    if norm_of(&y) > T::one() {
        // ‖y(μ)‖ decreases in μ and ‖y(‖b‖)‖ ≤ 1.
        let (mut lo, mut hi) = (T::zero(), b_norm);
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if norm_of(&solve(mid)) > T::one() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        y = solve(hi);
    }
    let v: [T; 3] = std::array::from_fn(|r| (0..3).fold(T::zero(), |a, i| a + vectors[r][i] * y[i]));
    let mut bloch = BlochVector::from_cartesian(v);
    bloch.r = bloch.r.min(T::one());
    let residual = cost(bloch.r, bloch.theta, bloch.phi, directions);
    Ok(TomographyEstimate {
        bloch,
        residual,
        n_runs: n,
        moment_condition: values[0].max(T::zero()) / T::from_usize(n).unwrap(),
    })
}

/// `ρ = (1 + ⟨σx⟩σx + ⟨σy⟩σy + ⟨σz⟩σz) / 2` for the given Bloch vector.
pub fn density_from_bloch<T: Real>(bloch: &BlochVector<T>) -> Result<DensityMatrix<T>> {
    if bloch.r > T::one() + T::tol(1e-12) || bloch.r < T::zero() {
        return Err(Error::InvalidState(format!("Bloch length {} outside [0, 1]", bloch.r)));
    }
    let mut unit = *bloch;
    unit.r = bloch.r.min(T::one());
    DensityMatrix::from_bloch_components(unit.cartesian())
}
