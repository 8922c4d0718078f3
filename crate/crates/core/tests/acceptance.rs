//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal; exits 1 on any FAIL.
//!
//! Reference values are closed forms computed here, independent of the
//! transfer-matrix code in the library.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use pressure_core::cli::config::{PotentialSpec, SystemSpec};
use pressure_core::cli::{cmd_estimate, cmd_verify_vp, run_properties, PropertyTable, RunConfig, Status};
use pressure_core::zoo;

const CRIT1_TOL: f64 = 1e-6;
const CRIT1_BUDGET: Duration = Duration::from_secs(5);
const CRIT2_TOL: f64 = 0.02;
const CRIT2_GAP: f64 = 0.05;
const CRIT2_BUDGET: Duration = Duration::from_secs(30);
const CRIT3_TOL: f64 = 0.02;
const CRIT3_GAP: f64 = 0.05;
const CRIT4_TOL: f64 = 0.05;
const CRIT4_CONSTANT: f64 = 0.7;
const CRIT4_N_MAX: usize = 60;
const IDENTITY_TOL: f64 = 1e-9;

struct Line {
    id: u8,
    name: &'static str,
    ok: bool,
    observed: String,
}

fn zoo_config(system: &str, potential: PotentialSpec) -> RunConfig {
    RunConfig { system: SystemSpec::Zoo(system.into()), potential, ..RunConfig::default() }
}

fn indicator_zero() -> PotentialSpec {
    PotentialSpec::Indicator { word: vec![0], weight: 1.0, alphabet: None, constant: 0.0, at_infinity: None }
}

fn crit1() -> Line {
    let mut cfg = zoo_config("full-2-shift", PotentialSpec::default());
    cfg.epsilon_grid = vec![0.3];
    cfg.n_max = 10;
    let t = Instant::now();
    let est = cmd_estimate(&cfg);
    let elapsed = t.elapsed();
    let name = "full 2-shift, f = 0: pressure = log 2";
    match est {
        Ok(est) => {
            let p = est.pressure.value();
            let exact = est.summary["solver_flags"]["all_exact"] == true;
            let err = (p - 2f64.ln()).abs();
            Line {
                id: 1,
                name,
                ok: err <= CRIT1_TOL && exact && elapsed < CRIT1_BUDGET,
                observed: format!("P = {p:.12}, |P - log 2| = {err:.2e}, all_exact = {exact}, {elapsed:.2?}"),
            }
        }
        Err(e) => Line { id: 1, name, ok: false, observed: format!("error: {e}") },
    }
}

fn crit2() -> Line {
    let cfg = zoo_config("full-2-shift", indicator_zero());
    let oracle = (1.0 + 1f64.exp()).ln();
    let t = Instant::now();
    let vp = cmd_verify_vp(&cfg);
    let elapsed = t.elapsed();
    let name = "full 2-shift, f = 1_[0]: pressure and variational gap";
    match vp {
        Ok(vp) => {
            let r = &vp.report;
            let err = (r.topological_pressure - oracle).abs();
            let gibbs = r.witnesses.iter().find(|w| w.name == "gibbs");
            let gap = gibbs.map_or(f64::INFINITY, |w| (r.topological_pressure - w.measure_pressure).abs());
            Line {
                id: 2,
                name,
                ok: err <= CRIT2_TOL && gap <= CRIT2_GAP && elapsed < CRIT2_BUDGET,
                observed: format!(
                    "P = {:.6}, log(1+e) = {oracle:.6}, err = {err:.2e}, Gibbs gap = {gap:.2e}, empirical-limit gap = {:.2e}, {elapsed:.2?}",
                    r.topological_pressure,
                    r.pipeline.gap
                ),
            }
        }
        Err(e) => Line { id: 2, name, ok: false, observed: format!("error: {e}") },
    }
}

fn crit3() -> Line {
    let cfg = zoo_config("golden-mean", PotentialSpec::default());
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let name = "golden mean, f = 0: pressure = log phi, Parry gap";
    match cmd_verify_vp(&cfg) {
        Ok(vp) => {
            let r = &vp.report;
            let err = (r.topological_pressure - phi.ln()).abs();
            let parry = r.witnesses.iter().find(|w| w.name == "parry");
            let gap = parry.map_or(f64::INFINITY, |w| (r.topological_pressure - w.measure_pressure).abs());
            Line {
                id: 3,
                name,
                ok: err <= CRIT3_TOL && gap <= CRIT3_GAP,
                observed: format!("P = {:.6}, log phi = {:.6}, err = {err:.2e}, Parry gap = {gap:.2e}", r.topological_pressure, phi.ln()),
            }
        }
        Err(e) => Line { id: 3, name, ok: false, observed: format!("error: {e}") },
    }
}

fn crit4() -> Line {
    let bump = |constant| PotentialSpec::Bump { center: 0, height: 1.0, half_width: 4.0, constant };
    let name = "translation on Z (M = 64): pressure = f(infinity)";
    // Separated counts grow linearly here, so (1/n) log decays like log n / n.
    let run = |c: f64| {
        let cfg = RunConfig { n_max: CRIT4_N_MAX, ..zoo_config("translation-Z", bump(c)) };
        cmd_estimate(&cfg).map(|e| e.pressure.value())
    };
    match (run(0.0), run(CRIT4_CONSTANT)) {
        (Ok(p0), Ok(pc)) => {
            let (e0, ec) = (p0.abs(), (pc - CRIT4_CONSTANT).abs());
            Line {
                id: 4,
                name,
                ok: e0 <= CRIT4_TOL && ec <= CRIT4_TOL,
                observed: format!("n_max = {CRIT4_N_MAX}; f in C0: P = {p0:.6}; f(inf) = {CRIT4_CONSTANT}: P = {pc:.6}, err = {ec:.2e}"),
            }
        }
        (a, b) => Line { id: 4, name, ok: false, observed: format!("error: {:?} / {:?}", a.err(), b.err()) },
    }
}

/// Systems where `property` failed, and those where it was skipped.
fn outcome(table: &PropertyTable, property: &str) -> (Vec<String>, Vec<String>) {
    let rows = table.results.iter().filter(|r| r.property == property);
    let fail = rows.clone().filter(|r| r.status == Status::Fail).map(|r| r.system.clone()).collect();
    let skip = rows.filter(|r| r.status == Status::Skipped).map(|r| r.system.clone()).collect();
    (fail, skip)
}

fn crit5(table: &PropertyTable, systems: usize) -> Line {
    let rows: Vec<_> = table.results.iter().filter(|r| r.property == "entropy-identity").collect();
    let worst = rows.iter().filter_map(|r| r.detail["max_residual"].as_f64()).fold(0.0, f64::max);
    let instances: usize = rows.iter().map(|r| r.instances).sum();
    let ok = rows.len() == systems
        && rows.iter().all(|r| r.status == Status::Pass && r.instances > 0)
        && worst <= IDENTITY_TOL;
    Line {
        id: 5,
        name: "entropy identity H + n int g = log A_n, n <= 10",
        ok,
        observed: format!("{} systems, {instances} exact bundles, max residual {worst:.2e}", rows.len()),
    }
}

const SUITE: [&str; 11] = [
    "refinement-monotonicity",
    "cover-counting",
    "two-power-counting",
    "separated-below-half-cover",
    "maximal-separated-generates",
    "conditional-entropy-bound",
    "measure-pressure-upper-bound",
    "chunked-entropy-bound",
    "invariance-defect",
    "entropy-scaling",
    "iterated-measure-pressure",
];

fn crit6(table: &PropertyTable) -> Line {
    let mut failures = Vec::new();
    let mut never_ran = Vec::new();
    let mut checked = 0;
    for p in SUITE {
        let (fail, _) = outcome(table, p);
        failures.extend(fail.into_iter().map(|s| format!("{p}@{s}")));
        if table.status(p) != Some(Status::Pass) {
            never_ran.push(p);
        }
        checked += table.results.iter().filter(|r| r.property == p && r.status == Status::Pass).count();
    }
    Line {
        id: 6,
        name: "proof-level inequality suite, n <= 6",
        ok: failures.is_empty() && never_ran.is_empty(),
        observed: format!("{checked} (property, system) pairs pass; failures {failures:?}; never exercised {never_ran:?}"),
    }
}

fn crit7(table: &PropertyTable, systems: usize) -> Line {
    let rows: Vec<_> = table.results.iter().filter(|r| r.property == "constant-shift").collect();
    let instances: usize = rows.iter().map(|r| r.instances).sum();
    let ok = rows.len() == systems && rows.iter().all(|r| r.status == Status::Pass);
    let (fail, skip) = outcome(table, "constant-shift");
    Line {
        id: 7,
        name: "constant shift value(f + c) = value(f) + c, 1e-9",
        ok,
        observed: format!("{instances} instances over {} systems; failed {fail:?}; skipped {skip:?}", rows.len()),
    }
}

fn crit8(table: &PropertyTable, systems: usize) -> Line {
    let (sub_fail, sub_skip) = outcome(table, "submultiplicativity");
    let (fek_fail, fek_skip) = outcome(table, "fekete-upper-bound");
    let sub_pass = table.results.iter().filter(|r| r.property == "submultiplicativity" && r.status == Status::Pass).count();
    let fek_pass = table.results.iter().filter(|r| r.property == "fekete-upper-bound" && r.status == Status::Pass).count();
    Line {
        id: 8,
        name: "submultiplicativity and Fekete bounds, m + n <= 10",
        ok: sub_fail.is_empty() && fek_fail.is_empty() && sub_pass == systems && fek_pass > 0,
        observed: format!(
            "submultiplicativity {sub_pass}/{systems} pass; Fekete {fek_pass} pass, skipped (no generating cover with oracle) {fek_skip:?}; failed {:?}",
            [sub_fail, fek_fail, sub_skip].concat()
        ),
    }
}

/// Runs the binary on the same config into two directories.
fn run_twice(verb: &str, config: &str, root: &Path) -> Result<(Vec<(String, Vec<u8>)>, Vec<(String, Vec<u8>)>), String> {
    let cfg_path = root.join(format!("{verb}.toml"));
    std::fs::write(&cfg_path, config).map_err(|e| e.to_string())?;
    let mut outs = Vec::new();
    for k in 0..2 {
        let dir = root.join(format!("{verb}-{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_pressure"))
            .arg(verb)
            .arg("--config")
            .arg(&cfg_path)
            .arg("--out")
            .arg(&dir)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("{verb} exited with {}: {}", status.status, String::from_utf8_lossy(&status.stderr)));
        }
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
            .map_err(|e| e.to_string())?
            .map(|e| {
                let e = e.map_err(|e| e.to_string())?;
                let body = std::fs::read(e.path()).map_err(|e| e.to_string())?;
                Ok((e.file_name().to_string_lossy().into_owned(), body))
            })
            .collect::<Result<_, String>>()?;
        files.sort();
        outs.push(files);
    }
    let b = outs.pop().expect("two runs");
    let a = outs.pop().expect("two runs");
    Ok((a, b))
}

fn crit9() -> Line {
    let name = "determinism: identical config and seed give identical bytes";
    let tmp = match tempfile::tempdir() {
        Ok(t) => t,
        Err(e) => return Line { id: 9, name, ok: false, observed: format!("error: {e}") },
    };
    let runs = [
        ("estimate", "system = \"golden-mean\"\nseed = 11\n[potential]\nkind = \"indicator\"\nword = [0]\n"),
        ("verify-vp", "system = \"full-2-shift\"\nseed = 11\n[potential]\nkind = \"indicator\"\nword = [0]\n"),
        ("verify-vp", "system = \"translation-Z\"\nseed = 11\n[potential]\nkind = \"bump\"\nconstant = 0.25\n"),
        ("properties", "seed = 11\n[properties]\nsystems = [\"full-2-shift\", \"translation-Z-fibered\"]\nn_max = 4\n"),
    ];
    let mut compared = 0;
    let mut differing = Vec::new();
    for (i, (verb, cfg)) in runs.iter().enumerate() {
        let root = tmp.path().join(i.to_string());
        if let Err(e) = std::fs::create_dir_all(&root) {
            return Line { id: 9, name, ok: false, observed: format!("error: {e}") };
        }
        match run_twice(verb, cfg, &root) {
            Ok((a, b)) => {
                if a.len() != b.len() || a.is_empty() {
                    differing.push(format!("{verb}: file sets differ"));
                }
                for ((na, ba), (nb, bb)) in a.iter().zip(&b) {
                    compared += 1;
                    if na != nb || ba != bb {
                        differing.push(format!("{verb}/{na}"));
                    }
                }
            }
            Err(e) => return Line { id: 9, name, ok: false, observed: format!("error: {e}") },
        }
    }
    Line { id: 9, name, ok: differing.is_empty(), observed: format!("{compared} CSV/JSON files compared; differing {differing:?}") }
}

fn main() -> ExitCode {
    // Under `cargo test -- --list` or a name filter the harness expects no run.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut lines = vec![crit1(), crit2(), crit3(), crit4()];
    let systems = zoo::registry().len();
    let t = Instant::now();
    match run_properties(&RunConfig::default()) {
        Ok(table) => {
            println!("property suite over {systems} zoo systems: {:.1?}", t.elapsed());
            lines.extend([crit5(&table, systems), crit6(&table), crit7(&table, systems), crit8(&table, systems)]);
        }
        Err(e) => {
            for (id, name) in [(5, "entropy identity"), (6, "inequality suite"), (7, "constant shift"), (8, "submultiplicativity")] {
                lines.push(Line { id, name, ok: false, observed: format!("suite error: {e}") });
            }
        }
    }
    lines.push(crit9());
    for l in &lines {
        println!("criterion {} {}: {} [{}]", l.id, if l.ok { "PASS" } else { "FAIL" }, l.name, l.observed);
    }
    let failed = lines.iter().filter(|l| !l.ok).count();
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
