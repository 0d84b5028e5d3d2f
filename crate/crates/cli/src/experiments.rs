//! The four experiments, returning in-memory results.

use weakprobe_core::trajectory::{run_ensemble, run_steps_observed, steps_for_duration, Stepper};
use weakprobe_core::{
    analyze, build_bins, calibrate, collect_directions, reconstruct, result_direction, BinSet,
    BlochVector, DensityMatrix, DirectionSample, QubitParams, TomographyEstimate, TrajectorySeed,
};

use crate::config::{ExperimentConfig, StateSpec};
use crate::CliError;

/// One `(g, β, initial state)` combination of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Group {
    pub g: f64,
    pub beta: f64,
    pub init: StateSpec,
    /// Position of the group in the sweep; selects its block of RNG streams.
    pub index: usize,
}

/// Streams for group `i` start at `i << 32`, so groups never share draws.
fn stream(group: &Group, run: u64) -> u64 {
    ((group.index as u64) << 32) | run
}

pub fn groups(cfg: &ExperimentConfig) -> Vec<Group> {
    let mut out = Vec::new();
    for &g in &cfg.g {
        for &beta in &cfg.beta {
            for &init in &cfg.init {
                out.push(Group { g, beta, init, index: out.len() });
            }
        }
    }
    out
}

/// Everything fixed by a group: qubit, detector bins, initial state and `τ_m`.
pub struct Setup {
    pub qubit: QubitParams,
    pub bins: BinSet,
    pub initial: DensityMatrix,
    pub tau_m: f64,
}

pub fn setup(cfg: &ExperimentConfig, group: &Group) -> Result<Setup, CliError> {
    let qubit = QubitParams::new(cfg.energy, group.beta)?;
    let detector = calibrate(group.g, cfg.energy, cfg.dt, cfg.sigma)?
        .with_bin_width(cfg.bin_width())?
        .with_range_sigmas(cfg.bin_range)?;
    let bins = build_bins(&detector, &qubit)?;
    let initial = group.init.density(&qubit)?;
    Ok(Setup { tau_m: detector.tau_m(), qubit, bins, initial })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BasisRow {
    pub run_index: usize,
    /// Canonical basis axis.
    pub axis: BlochVector,
    pub fidelity: f64,
    /// Inferred result direction; `None` when the run carries no information.
    pub result: Option<BlochVector>,
    pub w1: f64,
    pub degenerate: bool,
}

#[derive(Clone, Debug)]
pub struct BasisScatter {
    pub group: Group,
    pub steps: usize,
    pub rows: Vec<BasisRow>,
}

pub fn run_fig2(cfg: &ExperimentConfig) -> Result<Vec<BasisScatter>, CliError> {
    groups(cfg).into_iter().map(|g| basis_scatter(cfg, &g)).collect()
}

pub fn basis_scatter(cfg: &ExperimentConfig, group: &Group) -> Result<BasisScatter, CliError> {
    let s = setup(cfg, group)?;
    let steps = steps_for_duration(cfg.duration * s.tau_m, cfg.dt)?;
    let stepper = Stepper::new(&s.bins)?;
    let rows = run_ensemble(cfg.n_runs, |j| -> Result<BasisRow, CliError> {
        let seed = TrajectorySeed::new(cfg.seed, stream(group, j));
        let run = run_steps_observed(&s.initial, steps, &stepper, seed, |_, _, _, _| {})?;
        let o = analyze(&run.propagator)?;
        Ok(BasisRow {
            run_index: j as usize,
            axis: o.basis_angles,
            fidelity: o.fidelity,
            result: result_direction(&o).ok(),
            w1: o.w1,
            degenerate: o.degenerate,
        })
    });
    Ok(BasisScatter { group: *group, steps, rows: rows.into_iter().collect::<Result<_, _>>()? })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityPoint {
    pub duration_tau_m: f64,
    pub steps: usize,
    pub n_runs: usize,
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug)]
pub struct FidelityCurve {
    pub group: Group,
    pub points: Vec<FidelityPoint>,
}

pub fn run_fig3(cfg: &ExperimentConfig) -> Result<Vec<FidelityCurve>, CliError> {
    groups(cfg).into_iter().map(|g| fidelity_curve(cfg, &g)).collect()
}

/// Every run is carried to the longest duration; shorter durations read the
/// fidelity of the propagator prefix at their step count.
pub fn fidelity_curve(cfg: &ExperimentConfig, group: &Group) -> Result<FidelityCurve, CliError> {
    let s = setup(cfg, group)?;
    let checkpoints = cfg
        .durations
        .iter()
        .map(|&d| steps_for_duration(d * s.tau_m, cfg.dt))
        .collect::<Result<Vec<_>, _>>()?;
    let total = checkpoints.iter().copied().max().unwrap_or(1);
    let stepper = Stepper::new(&s.bins)?;
    let per_run = run_ensemble(cfg.n_runs, |j| -> Result<Vec<f64>, CliError> {
        let seed = TrajectorySeed::new(cfg.seed, stream(group, j));
        let mut fid = vec![f64::NAN; checkpoints.len()];
        let mut failure = None;
        run_steps_observed(&s.initial, total, &stepper, seed, |i, _, _, acc| {
            for (slot, &c) in checkpoints.iter().enumerate() {
                if c == i + 1 {
                    match analyze(acc) {
                        Ok(o) => fid[slot] = o.fidelity,
                        Err(e) => failure = failure.take().or(Some(e)),
                    }
                }
            }
        })?;
        match failure {
            Some(e) => Err(e.into()),
            None => Ok(fid),
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let n = cfg.n_runs as f64;
    let points = checkpoints
        .iter()
        .enumerate()
        .map(|(slot, &steps)| {
            let mean = per_run.iter().map(|f| f[slot]).sum::<f64>() / n;
            let var = if cfg.n_runs > 1 {
                per_run.iter().map(|f| (f[slot] - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            FidelityPoint {
                duration_tau_m: cfg.durations[slot],
                steps,
                n_runs: cfg.n_runs,
                mean,
                std_error: (var / n).sqrt(),
            }
        })
        .collect();
    Ok(FidelityCurve { group: *group, points })
}

#[derive(Clone, Debug)]
pub struct TomographyRun {
    pub group: Group,
    pub truth: BlochVector,
    pub sample: DirectionSample,
    pub estimate: TomographyEstimate,
    /// Euclidean distance between estimated and true Bloch vectors.
    pub error: f64,
}

pub fn run_tomo(cfg: &ExperimentConfig) -> Result<Vec<TomographyRun>, CliError> {
    groups(cfg).into_iter().map(|g| tomography(cfg, &g)).collect()
}

pub fn tomography(cfg: &ExperimentConfig, group: &Group) -> Result<TomographyRun, CliError> {
    let s = setup(cfg, group)?;
    // Each group reseeds its own master so groups stay independent.
    let master = cfg.seed ^ ((group.index as u64) << 48);
    let sample = collect_directions(&s.initial, cfg.n_runs, cfg.duration * s.tau_m, &s.bins, master)?;
    let estimate = reconstruct(&sample.directions)?;
    let truth = s.initial.bloch();
    let (a, b) = (estimate.bloch.cartesian(), truth.cartesian());
    let error = (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt();
    Ok(TomographyRun { group: *group, truth, sample, estimate, error })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajRow {
    pub step_index: usize,
    pub bin_index: usize,
    pub bin_center: f64,
    pub state: BlochVector,
    pub running_fidelity: f64,
}

#[derive(Clone, Debug)]
pub struct TrajectoryDump {
    pub group: Group,
    pub rows: Vec<TrajRow>,
}

/// A single trajectory of the first `(g, β, init)` combination, stream 0.
pub fn run_traj(cfg: &ExperimentConfig) -> Result<TrajectoryDump, CliError> {
    let group = groups(cfg)[0];
    trajectory_dump(cfg, &group, 0)
}

pub fn trajectory_dump(cfg: &ExperimentConfig, group: &Group, run: u64) -> Result<TrajectoryDump, CliError> {
    let s = setup(cfg, group)?;
    let steps = steps_for_duration(cfg.duration * s.tau_m, cfg.dt)?;
    let stepper = Stepper::new(&s.bins)?;
    let centers = s.bins.centers();
    let mut rows = Vec::with_capacity(steps);
    let mut failure = None;
    run_steps_observed(
        &s.initial,
        steps,
        &stepper,
        TrajectorySeed::new(cfg.seed, stream(group, run)),
        |i, k, rho, acc| match analyze(acc) {
            Ok(o) => rows.push(TrajRow {
                step_index: i,
                bin_index: k,
                bin_center: centers[k],
                state: rho.bloch(),
                running_fidelity: o.fidelity,
            }),
            Err(e) => failure = failure.take().or(Some(e)),
        },
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(TrajectoryDump { group: *group, rows })
}
