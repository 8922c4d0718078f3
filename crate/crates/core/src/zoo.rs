//! Registered systems and the analytic oracles they are judged against.
//!
//! For a potential depending on at most two coordinates of a subshift the
//! pressure is `log ρ(L)` with `L_ab = A_ab e^{f(ab)}`, and the equilibrium
//! state is the Markov chain `P_ab = L_ab r_b / (λ r_a)`, `r` the right
//! Perron vector.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::measure_pressure::MarkovMeasure;
use crate::systems::symbolic::word_code;
use crate::systems::{ExtensionRecipe, Potential, PotentialCore, Subshift, SystemDescriptor, SystemKind};

/// Default truncation of the integers.
pub const DEFAULT_HALF_WIDTH: usize = 64;

/// Required width of the certified eigenvalue bracket, relative.
pub const ORACLE_BRACKET: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    /// Transfer matrix of a subshift, locally constant potentials.
    TransferMatrix,
    /// Same as the full 2-shift through the binary coding.
    BinaryCoding,
    /// Pressure of `f` equals `f(∞)`.
    ValueAtInfinity,
}

#[derive(Clone, Debug)]
pub struct ZooEntry {
    pub name: &'static str,
    pub system: SystemDescriptor,
    pub oracle: Option<OracleKind>,
    pub notes: &'static str,
}

impl ZooEntry {
    /// Exact pressure of `f` when an oracle applies.
    pub fn oracle_pressure(&self, f: &Potential) -> Result<f64> {
        match (self.oracle, &self.system.kind) {
            (Some(OracleKind::TransferMatrix), SystemKind::Symbolic(s)) => transfer_matrix_pressure(s, f),
            (Some(OracleKind::BinaryCoding), _) => transfer_matrix_pressure(&Subshift::full(2), f),
            (Some(OracleKind::ValueAtInfinity), _) => f.require_decomposition(),
            _ => Err(Error::Oracle(format!("{}: no pressure oracle", self.name))),
        }
    }

    /// Equilibrium Markov measure when the system is a subshift.
    pub fn equilibrium(&self, f: &Potential) -> Result<MarkovMeasure> {
        match &self.system.kind {
            SystemKind::Symbolic(s) => gibbs_markov_measure(s, f),
            _ => Err(Error::Oracle(format!("{}: no Markov equilibrium oracle", self.name))),
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "compact": self.system.is_compact(),
            "alphabet": self.system.alphabet(),
            "extension": self.system.extension,
            "oracle": self.oracle,
            "notes": self.notes,
        })
    }
}

/// Integers `-M..=M` under `m ↦ m + 1`, compactified by one point.
pub fn register_translation_on_z(half_width: usize) -> ZooEntry {
    ZooEntry {
        name: "translation-Z",
        system: SystemDescriptor::translation(half_width, ExtensionRecipe::Point),
        oracle: Some(OracleKind::ValueAtInfinity),
        notes: "no invariant probability on X; the right end absorbs with a logged projection error",
    }
}

/// All registered systems, in listing order.
pub fn registry() -> Vec<ZooEntry> {
    let fibered = ZooEntry {
        name: "translation-Z-fibered",
        system: SystemDescriptor::translation(DEFAULT_HALF_WIDTH, ExtensionRecipe::TwoPointFiber),
        oracle: Some(OracleKind::ValueAtInfinity),
        notes: "as translation-Z, compactified by a two-point fiber swapped by S",
    };
    vec![
        ZooEntry {
            name: "full-2-shift",
            system: SystemDescriptor::symbolic("full-2-shift", Subshift::full(2)),
            oracle: Some(OracleKind::TransferMatrix),
            notes: "all binary sequences",
        },
        ZooEntry {
            name: "full-3-shift",
            system: SystemDescriptor::symbolic("full-3-shift", Subshift::full(3)),
            oracle: Some(OracleKind::TransferMatrix),
            notes: "all ternary sequences",
        },
        ZooEntry {
            name: "golden-mean",
            system: SystemDescriptor::symbolic("golden-mean", Subshift::golden_mean()),
            oracle: Some(OracleKind::TransferMatrix),
            notes: "binary sequences without two consecutive 1s",
        },
        ZooEntry {
            name: "doubling-map",
            system: SystemDescriptor::doubling(),
            oracle: Some(OracleKind::BinaryCoding),
            notes: "x -> 2x mod 1 on periodic binary points",
        },
        register_translation_on_z(DEFAULT_HALF_WIDTH),
        fibered,
    ]
}

pub fn lookup(name: &str) -> Result<ZooEntry> {
    registry()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Config(format!("unknown zoo system `{name}`")))
}

/// `L_ab = A_ab e^{f(ab)}` for potentials of locality at most two.
pub fn weighted_transition_matrix(shift: &Subshift, f: &Potential) -> Result<Vec<Vec<f64>>> {
    let k = shift.alphabet();
    let c = f.constant_part();
    let core = |a: u8, b: u8| -> Result<f64> {
        Ok(match &f.core {
            PotentialCore::Zero => 0.0,
            PotentialCore::Cylinder { depth, alphabet, values } => {
                if *alphabet != k {
                    return domain("potential alphabet differs from the subshift's");
                }
                match depth {
                    1 => values[a as usize],
                    2 => values[word_code(&[a, b], 2, k)],
                    _ => return domain("transfer-matrix oracle supports locality at most 2"),
                }
            }
            _ => return domain("transfer-matrix oracle needs a locally constant potential"),
        })
    };
    let mut l = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in 0..k {
            if shift.allowed(a as u8, b as u8) {
                l[a][b] = (c + core(a as u8, b as u8)?).exp();
            }
        }
    }
    Ok(l)
}

/// Perron root and vector of a nonnegative irreducible matrix.
///
/// Power iteration on `M + I`, which is primitive; the Collatz-Wielandt
/// quotients `min_i (Mx)_i / x_i <= ρ <= max_i (Mx)_i / x_i` certify the
/// result once their gap falls below [`ORACLE_BRACKET`].
pub fn perron(m: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let k = m.len();
    if k == 0 || m.iter().any(|r| r.len() != k || r.iter().any(|&v| !(v >= 0.0) || !v.is_finite())) {
        return Err(Error::Oracle("matrix must be square, finite and nonnegative".into()));
    }
    if !irreducible(m) {
        return Err(Error::Oracle("matrix is reducible".into()));
    }
    let mut x = vec![1.0; k];
    for _ in 0..1_000_000 {
        let y: Vec<f64> = (0..k).map(|i| x[i] + (0..k).map(|j| m[i][j] * x[j]).sum::<f64>()).collect();
        let (lo, hi) = (0..k).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
            let q = y[i] / x[i];
            (lo.min(q), hi.max(q))
        });
        let norm = y.iter().cloned().fold(0.0, f64::max);
        x = y.iter().map(|v| v / norm).collect();
        if hi - lo <= ORACLE_BRACKET * hi {
            return Ok(((lo + hi) / 2.0 - 1.0, x));
        }
    }
    Err(Error::Oracle("power iteration did not certify".into()))
}

fn irreducible(m: &[Vec<f64>]) -> bool {
    let k = m.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..k {
                let edge = if forward { m[i][j] } else { m[j][i] };
                if edge > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// `log ρ(L)`.
pub fn transfer_matrix_pressure(shift: &Subshift, f: &Potential) -> Result<f64> {
    Ok(perron(&weighted_transition_matrix(shift, f)?)?.0.ln())
}

/// `-Σ π_i P_ij log P_ij`.
pub fn markov_entropy(m: &MarkovMeasure) -> f64 {
    m.entropy_rate()
}

/// Equilibrium state of `f`: `P_ab = L_ab r_b / (λ r_a)`.
pub fn gibbs_markov_measure(shift: &Subshift, f: &Potential) -> Result<MarkovMeasure> {
    let l = weighted_transition_matrix(shift, f)?;
    let (lambda, r) = perron(&l)?;
    let k = l.len();
    let p: Vec<Vec<f64>> = (0..k)
        .map(|a| {
            let row: Vec<f64> = (0..k).map(|b| l[a][b] * r[b] / (lambda * r[a])).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|v| v / s).collect()
        })
        .collect();
    MarkovMeasure::new(shift.clone(), p)
}

/// Measure of maximal entropy.
pub fn parry_measure(shift: &Subshift) -> Result<MarkovMeasure> {
    gibbs_markov_measure(shift, &Potential::zero())
}
