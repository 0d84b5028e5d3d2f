//! Discretized QPC detector: Gaussian current histograms for the two charge
//! states, one Kraus matrix per current bin, and outcome sampling.

use rand::Rng;
use libm::erfc;

use crate::error::{Error, Result};
use crate::qmat::{charge_states, DensityMatrix, Ket, Mat2, QubitParams};
use crate::scalar::Real;

/// Fewest bins accepted by [`build_bins`].
pub const MIN_BINS: usize = 8;

/// Default half-width of the histogram support, in units of `σ`.
pub const DEFAULT_RANGE_SIGMAS: f64 = 6.0;

/// Default bin width as a fraction of `σ`.
pub const DEFAULT_BIN_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorParams<T> {
    /// Mean per-step current for `|L⟩`.
    pub mean_l: T,
    /// Mean per-step current for `|R⟩`.
    pub mean_r: T,
    /// Per-step current standard deviation.
    pub sigma: T,
    pub bin_width: T,
    pub delta_t: T,
    pub bin_range_sigmas: T,
}

impl<T: Real> DetectorParams<T> {
    pub fn new(mean_l: T, mean_r: T, sigma: T, bin_width: T, delta_t: T) -> Result<Self> {
        Self {
            mean_l,
            mean_r,
            sigma,
            bin_width,
            delta_t,
            bin_range_sigmas: T::lit(DEFAULT_RANGE_SIGMAS),
        }
        .validated()
    }

    pub fn with_bin_width(self, bin_width: T) -> Result<Self> {
        Self { bin_width, ..self }.validated()
    }

    pub fn with_range_sigmas(self, bin_range_sigmas: T) -> Result<Self> {
        Self { bin_range_sigmas, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        let positive = |name: &str, x: T| {
            if x > T::zero() && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {x}")))
            }
        };
        positive("sigma", self.sigma)?;
        positive("bin width", self.bin_width)?;
        positive("delta_t", self.delta_t)?;
        positive("bin range", self.bin_range_sigmas)?;
        if !self.mean_l.is_finite() || !self.mean_r.is_finite() {
            return Err(Error::Config("detector means must be finite".into()));
        }
        Ok(self)
    }

    pub fn separation(&self) -> T {
        (self.mean_r - self.mean_l).abs()
    }

    /// Measurement time `τ_m = 4σ²δt / (Ī_R - Ī_L)²`; infinite for equal means.
    pub fn tau_m(&self) -> T {
        let sep = self.separation();
        T::lit(4.0) * self.sigma * self.sigma * self.delta_t / (sep * sep)
    }

    pub fn coupling(&self, energy_splitting: T) -> CouplingSpec<T> {
        let tau_m = self.tau_m();
        CouplingSpec {
            g: energy_splitting * tau_m / T::TAU(),
            tau_m,
        }
    }
}

/// Dimensionless coupling `g = E τ_m / 2π` with its measurement time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingSpec<T> {
    pub g: T,
    pub tau_m: T,
}

/// Detector parameters realizing coupling `g` for level splitting `energy_splitting`:
/// `τ_m = 2πg/E` and `|Ī_R - Ī_L| = 2σ √(δt/τ_m)`, means symmetric about zero.
/// The bin width defaults to `σ/10`.
pub fn calibrate<T: Real>(g: T, energy_splitting: T, delta_t: T, sigma: T) -> Result<DetectorParams<T>> {
    for (name, x) in [("g", g), ("E", energy_splitting), ("delta_t", delta_t), ("sigma", sigma)] {
        if !(x > T::zero()) || !x.is_finite() {
            return Err(Error::Config(format!("{name} must be positive, got {x}")));
        }
    }
    let two = T::lit(2.0);
    let tau_m = T::TAU() * g / energy_splitting;
    let sep = two * sigma * (delta_t / tau_m).sqrt();
    let range = T::lit(DEFAULT_RANGE_SIGMAS);
    if sep > two * range * sigma {
        return Err(Error::Config(format!(
            "current separation {sep} exceeds the histogram support (coupling too strong for delta_t)"
        )));
    }
    DetectorParams::new(
        -sep / two,
        sep / two,
        sigma,
        sigma * T::lit(DEFAULT_BIN_FRACTION),
        delta_t,
    )
}

fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Probability mass of `N(mean, sigma²)` in each interval `[edges[k], edges[k+1])`,
/// without renormalization. Tails are evaluated through `erfc` to keep relative accuracy.
pub fn gaussian_bin_masses<T: Real>(mean: T, sigma: T, edges: &[T]) -> Vec<T> {
    let (mean, sigma) = (mean.as_f64(), sigma.as_f64());
    edges
        .windows(2)
        .map(|w| {
            let lo = (w[0].as_f64() - mean) / sigma;
            let hi = (w[1].as_f64() - mean) / sigma;
            let mass = if lo >= 0.0 {
                upper_tail(lo) - upper_tail(hi)
            } else if hi <= 0.0 {
                upper_tail(-hi) - upper_tail(-lo)
            } else {
                1.0 - upper_tail(-lo) - upper_tail(hi)
            };
            T::lit(mass.max(0.0))
        })
        .collect()
}

/// Outcome bins with per-charge-state masses and Kraus matrices.
#[derive(Clone, Debug)]
pub struct BinSet<T> {
    params: DetectorParams<T>,
    qubit: QubitParams<T>,
    state_l: Ket<T>,
    state_r: Ket<T>,
    edges: Vec<T>,
    centers: Vec<T>,
    mass_l: Vec<T>,
    mass_r: Vec<T>,
    cdf_l: Vec<T>,
    cdf_r: Vec<T>,
    kraus: Vec<Mat2<T>>,
}

fn renormalize<T: Real>(mass: &mut [T]) {
    let total = mass.iter().fold(T::zero(), |a, &m| a + m);
    mass.iter_mut().for_each(|m| *m /= total);
}

fn cumulative<T: Real>(mass: &[T]) -> Vec<T> {
    let mut acc = T::zero();
    let mut cdf: Vec<T> = mass
        .iter()
        .map(|&m| {
            acc += m;
            acc
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = T::one();
    }
    cdf
}

/// Builds the histogram over `[min(Ī) - Rσ, max(Ī) + Rσ]`, with the bin grid
/// centred on that interval. Each state's masses are renormalized to sum to one
/// so that `Σ K†K = 1` holds exactly up to rounding.
pub fn build_bins<T: Real>(dp: &DetectorParams<T>, qp: &QubitParams<T>) -> Result<BinSet<T>> {
    let reach = dp.bin_range_sigmas * dp.sigma;
    let lo = dp.mean_l.min(dp.mean_r) - reach;
    let hi = dp.mean_l.max(dp.mean_r) + reach;
    let span = hi - lo;
    let count = (span / dp.bin_width - T::lit(1e-9)).ceil();
    let count = count.to_usize().unwrap_or(0);
    if count < MIN_BINS {
        return Err(Error::Config(format!(
            "only {count} bins; at least {MIN_BINS} are required"
        )));
    }
    let two = T::lit(2.0);
    let start = (lo + hi) / two - T::from_usize(count).unwrap() * dp.bin_width / two;
    let edges: Vec<T> = (0..=count)
        .map(|k| start + T::from_usize(k).unwrap() * dp.bin_width)
        .collect();
    let centers = edges.windows(2).map(|w| (w[0] + w[1]) / two).collect();

    let mut mass_l = gaussian_bin_masses(dp.mean_l, dp.sigma, &edges);
    let mut mass_r = gaussian_bin_masses(dp.mean_r, dp.sigma, &edges);
    renormalize(&mut mass_l);
    renormalize(&mut mass_r);

    let (state_l, state_r) = charge_states(qp);
    let proj_l = state_l.projector();
    let proj_r = state_r.projector();
    let kraus = mass_l
        .iter()
        .zip(&mass_r)
        .map(|(&ml, &mr)| proj_l.scale(ml.sqrt()) + proj_r.scale(mr.sqrt()))
        .collect();

    Ok(BinSet {
        params: *dp,
        qubit: *qp,
        state_l,
        state_r,
        edges,
        centers,
        cdf_l: cumulative(&mass_l),
        cdf_r: cumulative(&mass_r),
        mass_l,
        mass_r,
        kraus,
    })
}

impl<T: Real> BinSet<T> {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn params(&self) -> &DetectorParams<T> {
        &self.params
    }

    pub fn qubit(&self) -> &QubitParams<T> {
        &self.qubit
    }

    /// `(|L⟩, |R⟩)` used to build the Kraus matrices.
    pub fn charge_states(&self) -> (Ket<T>, Ket<T>) {
        (self.state_l, self.state_r)
    }

    pub fn edges(&self) -> &[T] {
        &self.edges
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn mass_l(&self) -> &[T] {
        &self.mass_l
    }

    pub fn mass_r(&self) -> &[T] {
        &self.mass_r
    }

    pub fn kraus(&self) -> &[Mat2<T>] {
        &self.kraus
    }

    /// `Σ_k K_k† K_k`, which should equal the identity.
    pub fn povm_sum(&self) -> Mat2<T> {
        self.kraus
            .iter()
            .fold(Mat2::zero(), |acc, k| acc + k.adjoint() * *k)
    }

    /// `(⟨L|ρ|L⟩, ⟨R|ρ|R⟩)`
    pub fn charge_populations(&self, rho: &DensityMatrix<T>) -> (T, T) {
        (rho.population(&self.state_l), rho.population(&self.state_r))
    }

    /// Inverse-CDF lookup of the bin for a uniform variate `u ∈ [0, 1)` given the
    /// charge-state populations. The mixture CDF is monotone, so this is a
    /// binary search.
    pub fn sample_with_populations(&self, pop_l: T, pop_r: T, u: T) -> usize {
        let total = pop_l + pop_r;
        let (wl, wr) = (pop_l / total, pop_r / total);
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if wl * self.cdf_l[mid] + wr * self.cdf_r[mid] <= u {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo.min(self.len() - 1)
    }
}

/// `p[k] = Tr{K_k† K_k ρ} = mass_L[k]⟨L|ρ|L⟩ + mass_R[k]⟨R|ρ|R⟩`.
pub fn outcome_distribution<T: Real>(bins: &BinSet<T>, rho: &DensityMatrix<T>) -> Vec<T> {
    let (pl, pr) = bins.charge_populations(rho);
    bins.mass_l
        .iter()
        .zip(&bins.mass_r)
        .map(|(&ml, &mr)| ml * pl + mr * pr)
        .collect()
}

/// Draws a bin from [`outcome_distribution`] by inverse CDF on one uniform variate.
pub fn sample_bin<T: Real, R: Rng + ?Sized>(bins: &BinSet<T>, rho: &DensityMatrix<T>, rng: &mut R) -> usize {
    let (pl, pr) = bins.charge_populations(rho);
    let u = T::lit(rng.random::<f64>());
    bins.sample_with_populations(pl, pr, u)
}
