//! Config-driven commands: `zoo`, `estimate`, `verify-vp`, `properties`.
//!
//! Every command returns its artifacts in memory and writes them in a
//! fixed order, so identical configs give identical bytes.

pub mod config;
pub mod properties;

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

pub use config::{build_potential, RunConfig};
pub use properties::{run_properties, PropertyTable, Status};

use crate::error::Result;
use crate::measure_pressure::FiniteMeasure;
use crate::misiurewicz::{lower_bound_pipeline, PipelineReport};
use crate::systems::{Potential, PotentialCore, SystemKind};
use crate::topo_pressure::{topological_pressure, TopologicalPressure};
use crate::zoo::{self, gibbs_markov_measure, markov_entropy};

/// Floats in CSV cells: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Named output files with their contents.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    fn push(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }

    fn push_json(&mut self, name: &str, v: &impl Serialize) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.push(name, s);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, body) in &self.files {
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

pub fn zoo_list() -> String {
    let mut out = String::new();
    for e in zoo::registry() {
        let oracle = e.oracle.map_or("none".to_string(), |o| serde_json::to_value(o).map(|v| v.to_string()).unwrap_or_default());
        let _ = writeln!(out, "{:<24} compact={:<5} oracle={}", e.name, e.system.is_compact(), oracle.trim_matches('"'));
    }
    out
}

pub fn zoo_describe(name: &str) -> Result<String> {
    Ok(serde_json::to_string_pretty(&zoo::lookup(name)?.describe())? + "\n")
}

/// Rows `kind, epsilon, n, raw_value, log_over_n, bound_direction`.
pub fn pressure_csv(tp: &TopologicalPressure) -> String {
    let mut out = String::from("kind,epsilon,n,raw_value,log_over_n,bound_direction\n");
    for e in tp.estimates() {
        let eps = e.epsilon.map(fmt_f64).unwrap_or_default();
        for i in 0..e.n_values.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                e.kind.as_str(),
                eps,
                e.n_values[i],
                fmt_f64(e.raw_values[i]),
                fmt_f64(e.values[i]),
                e.bound_directions[i].as_str()
            );
        }
    }
    out
}

/// Number of levels per bound direction, over every estimate.
fn solver_flags(tp: &TopologicalPressure) -> Value {
    let (mut exact, mut upper, mut lower) = (0, 0, 0);
    for e in tp.estimates() {
        for b in &e.bound_directions {
            match b.as_str() {
                "exact" => exact += 1,
                "upper" => upper += 1,
                _ => lower += 1,
            }
        }
    }
    json!({"exact_levels": exact, "upper_levels": upper, "lower_levels": lower, "all_exact": upper + lower == 0})
}

pub struct Estimate {
    pub pressure: TopologicalPressure,
    pub oracle: Option<f64>,
    pub summary: Value,
    pub artifacts: Artifacts,
}

pub fn cmd_estimate(cfg: &RunConfig) -> Result<Estimate> {
    let sys = cfg.resolve_system()?;
    let f = build_potential(&cfg.potential, &sys.descriptor)?;
    let grid = cfg.epsilon_grid_for(&sys.descriptor)?;
    let tp = topological_pressure(&sys.descriptor, &f, &grid, &cfg.pressure_options())?;
    let oracle = sys.entry().oracle_pressure(&f).ok();
    let rows: Vec<Value> = tp
        .rows
        .iter()
        .map(|r| {
            json!({
                "epsilon": r.epsilon,
                "scaffold_points": r.scaffold_points,
                "separated": r.separated.extrapolated,
                "generating": r.generating.extrapolated,
                "q_minus": r.ball_cover.as_ref().map(|c| c.q_minus.extrapolated),
                "q_plus": r.ball_cover.as_ref().map(|c| c.q_plus.extrapolated),
                "p_cover": r.ball_cover.as_ref().map(|c| c.p_cover.extrapolated),
            })
        })
        .collect();
    let summary = json!({
        "system": sys.name,
        "potential": cfg.potential,
        "mode": cfg.mode,
        "seed": cfg.seed,
        "n_max": cfg.n_max,
        "epsilon_grid": grid,
        "consolidated": tp.value(),
        "selected_epsilon": tp.selected_epsilon,
        "convergence": tp.convergence,
        "tolerance": tp.tolerance,
        "projection_error": tp.projection_error,
        "value_at_infinity": tp.value_at_infinity,
        "oracle": oracle,
        "solver_flags": solver_flags(&tp),
        "rows": rows,
    });
    let mut artifacts = Artifacts::default();
    artifacts.push("estimate.csv", pressure_csv(&tp));
    artifacts.push_json("estimate.json", &summary)?;
    Ok(Estimate { pressure: tp, oracle, summary, artifacts })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub name: String,
    pub entropy: f64,
    pub integral: f64,
    pub measure_pressure: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VpReport {
    pub system: String,
    pub topological_pressure: f64,
    pub best_measure_pressure: f64,
    pub best_witness: String,
    pub gap: f64,
    /// `f = c + f0`; the construction runs on `f0` and `c` is added back.
    pub constant: f64,
    pub oracle: Option<f64>,
    pub witnesses: Vec<Witness>,
    pub pipeline: PipelineReport,
}

pub struct VerifyVp {
    pub report: VpReport,
    pub measure: FiniteMeasure,
    pub artifacts: Artifacts,
}

/// The potential as `c + f0`, `f0` vanishing at infinity when declared.
fn split_constant(f: &Potential) -> (f64, Potential) {
    match f.at_infinity {
        Some(c) => (c, f.with_infinity(0.0)),
        None => (0.0, f.clone()),
    }
}

pub fn cmd_verify_vp(cfg: &RunConfig) -> Result<VerifyVp> {
    let est = cmd_estimate(cfg)?;
    let sys = cfg.resolve_system()?;
    let f = build_potential(&cfg.potential, &sys.descriptor)?;
    let (c, f0) = split_constant(&f);
    let eps = cfg.pipeline_epsilon.unwrap_or(est.pressure.selected_epsilon);
    let (measure, pipeline) = lower_bound_pipeline(&sys.descriptor, &f0, eps, &cfg.n_grid, &cfg.q_grid, cfg.solver_mode())?;
    let mut witnesses = vec![Witness {
        name: "empirical-limit".into(),
        entropy: pipeline.entropy,
        integral: pipeline.integral + c,
        measure_pressure: pipeline.measure_pressure + c,
        note: format!("largest-n empirical measure at epsilon {eps}, n = {}", pipeline.selected_n),
    }];
    if let SystemKind::Symbolic(shift) = &sys.descriptor.kind {
        if let Ok(mu) = gibbs_markov_measure(shift, &f) {
            let entropy = markov_entropy(&mu);
            let integral = mu.integral(&f)?;
            // A constant potential has the measure of maximal entropy as equilibrium.
            let name = if matches!(f.core, PotentialCore::Zero) { "parry" } else { "gibbs" };
            witnesses.push(Witness {
                name: name.into(),
                entropy,
                integral,
                measure_pressure: entropy + integral,
                note: "Markov equilibrium state from the transfer matrix".into(),
            });
        }
    }
    if !sys.descriptor.is_compact() {
        witnesses.push(Witness {
            name: "value-at-infinity".into(),
            entropy: 0.0,
            integral: c,
            measure_pressure: c,
            note: "no invariant probability on X: the supremum is taken to be f(infinity)".into(),
        });
    }
    let best = witnesses
        .iter()
        .max_by(|a, b| a.measure_pressure.total_cmp(&b.measure_pressure))
        .expect("at least one witness");
    let report = VpReport {
        system: sys.name.clone(),
        topological_pressure: est.pressure.value(),
        best_measure_pressure: best.measure_pressure,
        best_witness: best.name.clone(),
        gap: est.pressure.value() - best.measure_pressure,
        constant: c,
        oracle: est.oracle,
        witnesses: witnesses.clone(),
        pipeline,
    };
    let mut artifacts = est.artifacts;
    artifacts.push_json("verify_vp.json", &report)?;
    let mut buf = Vec::new();
    measure.write_csv(&mut buf)?;
    artifacts.push("limit_measure.csv", String::from_utf8(buf).expect("csv is utf-8"));
    Ok(VerifyVp { report, measure, artifacts })
}

pub fn properties_csv(table: &PropertyTable) -> String {
    let mut out = String::from("property,system,status,instances,detail\n");
    for r in &table.results {
        let detail = r.detail.to_string().replace('"', "\"\"");
        let _ = writeln!(out, "{},{},{},{},\"{}\"", r.property, r.system, r.status.as_str(), r.instances, detail);
    }
    out
}

/// Human-readable table keyed by property name.
pub fn properties_table(table: &PropertyTable) -> String {
    let mut out = String::new();
    for (name, status) in table.by_property() {
        let _ = writeln!(out, "{:<30} {}", name, status.as_str().to_uppercase());
    }
    out
}

pub fn cmd_properties(cfg: &RunConfig) -> Result<(PropertyTable, Artifacts)> {
    let table = run_properties(cfg)?;
    let mut artifacts = Artifacts::default();
    artifacts.push("properties.csv", properties_csv(&table));
    let summary = json!({
        "all_pass": table.all_pass(),
        "properties": table.by_property(),
        "failures": table.failures(),
    });
    artifacts.push_json("properties.json", &summary)?;
    Ok((table, artifacts))
}
