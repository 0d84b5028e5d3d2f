//! CSV and JSON rendering. Every file opens with the version, the parameter
//! snapshot and the seed; worker count never appears, so payloads are
//! byte-identical across pool sizes.

use serde_json::{json, Value};

use weakprobe_core::BlochVector;

use crate::config::{ExperimentConfig, StateSpec};
use crate::experiments::{BasisScatter, FidelityCurve, Group, TomographyRun, TrajectoryDump};
use crate::VERSION;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

fn csv_header(cfg: &ExperimentConfig, group: Option<&Group>) -> String {
    let mut out = format!("# weakprobe {VERSION}\n");
    for (k, v) in cfg.snapshot() {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    if let Some(g) = group {
        out.push_str(&format!("# group g = {}, beta = {}, init = {}\n", g.g, g.beta, g.init));
    }
    out
}

fn state_tag(s: &StateSpec, index: usize) -> String {
    match s {
        StateSpec::PlusX => "px".into(),
        StateSpec::MinusX => "mx".into(),
        StateSpec::PlusY => "py".into(),
        StateSpec::MinusY => "my".into(),
        StateSpec::Bloch { .. } => format!("state{index}"),
        named => named.to_string(),
    }
}

pub fn fig2_file_name(group: &Group, cfg: &ExperimentConfig) -> String {
    let init_index = cfg.init.iter().position(|s| *s == group.init).unwrap_or(0);
    format!(
        "fig2_g{}_beta{:.4}_{}.csv",
        group.g,
        group.beta,
        state_tag(&group.init, init_index)
    )
}

pub fn fig2_files(cfg: &ExperimentConfig, scatters: &[BasisScatter]) -> Vec<OutputFile> {
    scatters
        .iter()
        .map(|s| {
            let mut out = csv_header(cfg, Some(&s.group));
            out.push_str(&format!("# steps = {}\n", s.steps));
            out.push_str("run_index,theta,phi,fidelity,result_theta,result_phi,w1,degenerate_flag\n");
            for r in &s.rows {
                let (rt, rp) = match r.result {
                    Some(d) => (d.theta.to_string(), d.phi.to_string()),
                    None => (String::new(), String::new()),
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    r.run_index,
                    r.axis.theta,
                    r.axis.phi,
                    r.fidelity,
                    rt,
                    rp,
                    r.w1,
                    u8::from(r.degenerate)
                ));
            }
            OutputFile { name: fig2_file_name(&s.group, cfg), contents: out }
        })
        .collect()
}

pub fn fig3_file(cfg: &ExperimentConfig, curves: &[FidelityCurve]) -> OutputFile {
    let mut out = csv_header(cfg, None);
    out.push_str("g,beta,init,duration_tau_m,steps,n_runs,mean_fidelity,std_error\n");
    for c in curves {
        for p in &c.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.group.g, c.group.beta, c.group.init, p.duration_tau_m, p.steps, p.n_runs, p.mean, p.std_error
            ));
        }
    }
    OutputFile { name: "fig3.csv".into(), contents: out }
}

fn bloch_json(b: &BlochVector) -> Value {
    json!({ "r": b.r, "theta": b.theta, "phi": b.phi })
}

pub fn tomo_report(cfg: &ExperimentConfig, runs: &[TomographyRun]) -> Value {
    let results: Vec<Value> = runs
        .iter()
        .map(|t| {
            json!({
                "g": t.group.g,
                "beta": t.group.beta,
                "input_state": t.group.init.to_string(),
                "true_bloch": bloch_json(&t.truth),
                "n_runs": cfg.n_runs,
                "used_runs": t.estimate.n_runs,
                "excluded": t.sample.excluded,
                "estimate": bloch_json(&t.estimate.bloch),
                "residual": t.estimate.residual,
                "moment_condition": t.estimate.moment_condition,
                "clustered_bases_warning": t.estimate.bases_clustered(),
                "bloch_error": t.error,
            })
        })
        .collect();
    json!({
        "version": VERSION,
        "params": cfg.snapshot(),
        "results": results,
    })
}

pub fn tomo_file(cfg: &ExperimentConfig, runs: &[TomographyRun]) -> OutputFile {
    let mut contents = serde_json::to_string_pretty(&tomo_report(cfg, runs)).expect("finite report");
    contents.push('\n');
    OutputFile { name: "tomo.json".into(), contents }
}

pub fn traj_file(cfg: &ExperimentConfig, dump: &TrajectoryDump) -> OutputFile {
    let mut out = csv_header(cfg, Some(&dump.group));
    out.push_str("step_index,bin_index,bin_center_current,r,theta,phi,running_fidelity\n");
    for r in &dump.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.step_index, r.bin_index, r.bin_center, r.state.r, r.state.theta, r.state.phi, r.running_fidelity
        ));
    }
    OutputFile { name: "traj.csv".into(), contents: out }
}
