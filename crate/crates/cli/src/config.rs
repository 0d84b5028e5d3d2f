//! Experiment configuration: built-in defaults, then a flat `key = value`
//! file, then command-line overrides of the same keys.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use weakprobe_core::qmat::charge_states;
use weakprobe_core::{BlochVector, DensityMatrix, Ket, QubitParams};

use crate::CliError;

/// Environment variable read for the default worker count.
pub const WORKERS_ENV: &str = "WEAKPROBE_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Fig2,
    Fig3,
    Tomo,
    Traj,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Tomo => "tomo",
            Experiment::Traj => "traj",
        }
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "fig2" => Ok(Experiment::Fig2),
            "fig3" => Ok(Experiment::Fig3),
            "tomo" => Ok(Experiment::Tomo),
            "traj" => Ok(Experiment::Traj),
            other => Err(CliError::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

/// Named or explicit initial state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateSpec {
    L,
    R,
    Ground,
    Excited,
    PlusX,
    MinusX,
    PlusY,
    MinusY,
    Bloch { r: f64, theta: f64, phi: f64 },
}

impl StateSpec {
    pub fn bloch(&self, qp: &QubitParams) -> BlochVector {
        match *self {
            StateSpec::L => DensityMatrix::pure(&charge_states(qp).0).bloch(),
            StateSpec::R => DensityMatrix::pure(&charge_states(qp).1).bloch(),
            StateSpec::Ground => BlochVector::unit(0.0, 0.0),
            StateSpec::Excited => BlochVector::unit(PI, 0.0),
            StateSpec::PlusX => BlochVector::unit(FRAC_PI_2, 0.0),
            StateSpec::MinusX => BlochVector::unit(FRAC_PI_2, -PI),
            StateSpec::PlusY => BlochVector::unit(FRAC_PI_2, FRAC_PI_2),
            StateSpec::MinusY => BlochVector::unit(FRAC_PI_2, -FRAC_PI_2),
            StateSpec::Bloch { r, theta, phi } => BlochVector::new(r, theta, phi),
        }
    }

    pub fn density(&self, qp: &QubitParams) -> Result<DensityMatrix, CliError> {
        match self {
            StateSpec::L => Ok(DensityMatrix::pure(&charge_states(qp).0)),
            StateSpec::R => Ok(DensityMatrix::pure(&charge_states(qp).1)),
            StateSpec::Ground => Ok(DensityMatrix::pure(&Ket::ground())),
            StateSpec::Excited => Ok(DensityMatrix::pure(&Ket::excited())),
            other => weakprobe_core::density_from_bloch(&other.bloch(qp))
                .map_err(|e| CliError::Config(format!("initial state {other}: {e}"))),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::L => write!(f, "L"),
            StateSpec::R => write!(f, "R"),
            StateSpec::Ground => write!(f, "ground"),
            StateSpec::Excited => write!(f, "excited"),
            StateSpec::PlusX => write!(f, "+x"),
            StateSpec::MinusX => write!(f, "-x"),
            StateSpec::PlusY => write!(f, "+y"),
            StateSpec::MinusY => write!(f, "-y"),
            StateSpec::Bloch { r, theta, phi } => write!(f, "({r},{theta},{phi})"),
        }
    }
}

impl FromStr for StateSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        Ok(match s {
            "L" => StateSpec::L,
            "R" => StateSpec::R,
            "ground" | "0" => StateSpec::Ground,
            "excited" | "1" => StateSpec::Excited,
            "+x" => StateSpec::PlusX,
            "-x" => StateSpec::MinusX,
            "+y" => StateSpec::PlusY,
            "-y" => StateSpec::MinusY,
            _ => {
                let inner = s
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| CliError::Config(format!("unknown initial state '{s}'")))?;
                let parts = inner
                    .split(',')
                    .map(parse_number)
                    .collect::<Result<Vec<_>, _>>()?;
                let [r, theta, phi] = parts[..] else {
                    return Err(CliError::Config(format!("state '{s}' needs (r,theta,phi)")));
                };
                if !(0.0..=1.0).contains(&r) {
                    return Err(CliError::Config(format!("state '{s}': r must be in [0, 1]")));
                }
                StateSpec::Bloch { r, theta, phi }
            }
        })
    }
}

/// Parses a float, also accepting multiples of pi such as `pi/4` or `3*pi/8`.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Config(format!("cannot parse number '{s}'"));
    if let Some(pos) = s.find("pi") {
        let (head, tail) = (&s[..pos], &s[pos + 2..]);
        let factor = match head.trim_end_matches('*').trim() {
            "" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| bad())?,
        };
        let divisor = match tail.trim() {
            "" => 1.0,
            t => t
                .strip_prefix('/')
                .ok_or_else(bad)?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        Ok(factor * PI / divisor)
    } else {
        s.parse::<f64>().map_err(|_| bad())
    }
}

fn parse_list<T>(s: &str, sep: char, item: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    let items = s
        .split(sep)
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(item)
        .collect::<Result<Vec<_>, _>>()?;
    if items.is_empty() {
        return Err(CliError::Config(format!("empty list '{s}'")));
    }
    Ok(items)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub g: Vec<f64>,
    pub beta: Vec<f64>,
    pub init: Vec<StateSpec>,
    pub n_runs: usize,
    /// Run length in units of `τ_m` (fig2, tomo, traj).
    pub duration: f64,
    /// Duration grid in units of `τ_m` (fig3).
    pub durations: Vec<f64>,
    pub energy: f64,
    pub dt: f64,
    pub sigma: f64,
    /// Bin width; `None` means `σ/10`.
    pub bin_width: Option<f64>,
    pub bin_range: f64,
    pub seed: u64,
    pub output: PathBuf,
    /// 0 selects the rayon default.
    pub workers: usize,
}

/// `count` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let workers = std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0);
        let base = ExperimentConfig {
            experiment,
            g: vec![5.0],
            beta: vec![FRAC_PI_4],
            init: vec![StateSpec::L],
            n_runs: 200,
            duration: 10.0,
            durations: linspace(0.5, 20.0, 20),
            energy: 1.0,
            dt: 0.01,
            sigma: 1.0,
            bin_width: None,
            bin_range: weakprobe_core::detector::DEFAULT_RANGE_SIGMAS,
            seed: 1,
            output: PathBuf::from("out"),
            workers,
        };
        match experiment {
            Experiment::Fig2 => ExperimentConfig {
                g: vec![0.01, 0.2, 5.0],
                init: vec![StateSpec::L, StateSpec::Ground],
                ..base
            },
            Experiment::Fig3 => ExperimentConfig {
                beta: vec![0.0, FRAC_PI_4, FRAC_PI_2],
                n_runs: 500,
                ..base
            },
            Experiment::Tomo => ExperimentConfig {
                init: vec![StateSpec::Ground, StateSpec::L, StateSpec::PlusX],
                n_runs: 1000,
                ..base
            },
            Experiment::Traj => ExperimentConfig { n_runs: 1, ..base },
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(x)
            } else {
                Err(CliError::Config(format!("{name} must be positive, got {x}")))
            }
        };
        let int = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| CliError::Config(format!("{key}: expected an integer, got '{v}'")))
        };
        match key {
            "g" => self.g = parse_list(value, ',', |t| positive("g", parse_number(t)?))?,
            "beta" => self.beta = parse_list(value, ',', parse_number)?,
            "init" => self.init = parse_list(value, ';', str::parse)?,
            "n_runs" => {
                self.n_runs = int(value)? as usize;
                if self.n_runs == 0 {
                    return Err(CliError::Config("n_runs must be at least 1".into()));
                }
            }
            "duration" => self.duration = positive("duration", parse_number(value)?)?,
            "durations" => {
                self.durations = parse_list(value, ',', |t| positive("durations", parse_number(t)?))?
            }
            "E" => self.energy = positive("E", parse_number(value)?)?,
            "dt" => self.dt = positive("dt", parse_number(value)?)?,
            "sigma" => self.sigma = positive("sigma", parse_number(value)?)?,
            "dI" => self.bin_width = Some(positive("dI", parse_number(value)?)?),
            "bin_range" => self.bin_range = positive("bin_range", parse_number(value)?)?,
            "seed" => self.seed = int(value)?,
            "output" => self.output = PathBuf::from(value),
            "workers" => self.workers = int(value)? as usize,
            other => return Err(CliError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a config file body: one `key = value` per line, `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            self.set(key.trim(), value)
                .map_err(|e| CliError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
            .unwrap_or(self.sigma * weakprobe_core::detector::DEFAULT_BIN_FRACTION)
    }

    /// Every setting that affects the data, in a stable order. Worker count and
    /// output path are left out on purpose: they never change results.
    pub fn snapshot(&self) -> BTreeMap<&'static str, String> {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut m = BTreeMap::new();
        m.insert("experiment", self.experiment.name().to_string());
        m.insert("g", join(&self.g));
        m.insert("beta", join(&self.beta));
        m.insert(
            "init",
            self.init.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";"),
        );
        m.insert("n_runs", self.n_runs.to_string());
        match self.experiment {
            Experiment::Fig3 => m.insert("durations", join(&self.durations)),
            _ => m.insert("duration", self.duration.to_string()),
        };
        m.insert("E", self.energy.to_string());
        m.insert("dt", self.dt.to_string());
        m.insert("sigma", self.sigma.to_string());
        m.insert("dI", self.bin_width().to_string());
        m.insert("bin_range", self.bin_range.to_string());
        m.insert("seed", self.seed.to_string());
        m
    }
}
