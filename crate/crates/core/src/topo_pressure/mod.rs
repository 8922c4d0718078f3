//! Cover pressures, separated and generating pressures, and the
//! consolidated topological pressure.
//!
//! ```text
//! Q_n(f, A) = min_{A' ⊆ A^n subcover} Σ_{a ∈ A'} inf_a e^{f_n}
//! P_n(f, A) = min_{A' ⊆ A^n subcover} Σ_{a ∈ A'} sup_a e^{f_n}
//! g_n(f, ε) = min_{E (n,ε)-generating} Σ_{x ∈ E} e^{f_n(x)}
//! s_n(f, ε) = max_{E (n,ε)-separated} Σ_{x ∈ E} e^{f_n(x)}
//! ```
//!
//! `P_n` is submultiplicative, so `(1/n) log P_n` converges to its infimum.

pub mod arcs;
pub mod banded;
pub mod separated;

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

pub use separated::{independent_set_upper_bound, max_weight_independent_set, IndependentSet};

use crate::cover_algebra::{
    iterates, min_weight_set_cover, refines, BoundDirection, Cover, SolverMode, DEFAULT_BUDGET,
};
use crate::error::{contract, domain, Result};
use crate::systems::{ball_cover, Metric, Potential, Scaffold, SystemDescriptor};
use arcs::{arc_dominating_set, arc_independent_set, Arcs};
use banded::{banded_dominating_set, banded_independent_set, Band};

/// Largest non-symbolic scaffold on which the cover by all balls is iterated.
pub const MAX_BALL_COVER_POINTS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PressureKind {
    Qminus,
    Qplus,
    Pcover,
    Generating,
    Separated,
    Consolidated,
}

impl PressureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Qminus => "Qminus",
            Self::Qplus => "Qplus",
            Self::Pcover => "Pcover",
            Self::Generating => "Generating",
            Self::Separated => "Separated",
            Self::Consolidated => "Consolidated",
        }
    }
}

/// How a finite sequence is turned into a limit estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extrapolation {
    /// Minimum of `(1/n) log v_n` over the last third.
    MinTail,
    /// Maximum of `(1/n) log v_n` over the last third.
    MaxTail,
    /// Minimum of `(1/n) log v_n` over all `n`.
    RunningMin,
    /// Maximum of the increments `log v_n - log v_{n-1}` over the last third.
    MaxTailIncrement,
}

/// A level-`n` quantity with its bound direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Level {
    pub n: usize,
    pub raw: f64,
    pub bound: BoundDirection,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub kind: PressureKind,
    pub epsilon: Option<f64>,
    pub n_values: Vec<usize>,
    pub raw_values: Vec<f64>,
    /// `(1/n) log raw_n`.
    pub values: Vec<f64>,
    /// `log raw_n - log raw_{n-1}`, with `raw_0 = 1`.
    pub increments: Vec<f64>,
    pub bound_directions: Vec<BoundDirection>,
    pub rule: Extrapolation,
    pub extrapolated: f64,
}

fn tail(len: usize) -> usize {
    len.div_ceil(3).max(1)
}

impl PressureEstimate {
    /// Levels must be consecutive from `n = 1`.
    pub fn from_levels(kind: PressureKind, epsilon: Option<f64>, levels: &[Level], rule: Extrapolation) -> Self {
        let n_values: Vec<usize> = levels.iter().map(|l| l.n).collect();
        let raw_values: Vec<f64> = levels.iter().map(|l| l.raw).collect();
        let logs: Vec<f64> = raw_values.iter().map(|v| v.ln()).collect();
        let values: Vec<f64> = logs.iter().zip(&n_values).map(|(l, &n)| l / n as f64).collect();
        let increments: Vec<f64> = logs
            .iter()
            .enumerate()
            .map(|(i, l)| if i == 0 { l / n_values[0] as f64 } else { l - logs[i - 1] })
            .collect();
        let len = values.len();
        let t = tail(len);
        let extrapolated = match rule {
            Extrapolation::MinTail => values[len - t..].iter().cloned().fold(f64::INFINITY, f64::min),
            Extrapolation::MaxTail => values[len - t..].iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            Extrapolation::RunningMin => values.iter().cloned().fold(f64::INFINITY, f64::min),
            Extrapolation::MaxTailIncrement => {
                increments[len - t..].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            }
        };
        Self {
            kind,
            epsilon,
            n_values,
            raw_values,
            values,
            increments,
            bound_directions: levels.iter().map(|l| l.bound).collect(),
            rule,
            extrapolated,
        }
    }

    /// Running minimum of `(1/n) log raw_n`.
    pub fn running_min(&self) -> Vec<f64> {
        let mut m = f64::INFINITY;
        self.values.iter().map(|&v| {
            m = m.min(v);
            m
        }).collect()
    }

    pub fn all_exact(&self) -> bool {
        self.bound_directions.iter().all(|&b| b == BoundDirection::Exact)
    }
}

/// `f_1, …, f_{n_max}` on every scaffold point.
pub fn birkhoff_tables(scaffold: &Scaffold, values: &[f64], n_max: usize) -> Vec<Vec<f64>> {
    let orbits = scaffold.orbits(n_max);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n_max);
    for (j, row) in orbits.iter().enumerate() {
        let step: Vec<f64> = row.iter().map(|&y| values[y]).collect();
        let sum = match out.last() {
            Some(prev) => prev.iter().zip(&step).map(|(a, b)| a + b).collect(),
            None => step,
        };
        debug_assert_eq!(j + 1, out.len() + 1);
        out.push(sum);
    }
    out
}

fn member_weight(member: &FixedBitSet, fn_values: &[f64], sup: bool) -> f64 {
    let pick = member.ones().map(|x| fn_values[x]);
    let v = if sup { pick.fold(f64::NEG_INFINITY, f64::max) } else { pick.fold(f64::INFINITY, f64::min) };
    v.exp()
}

fn cover_level(an: &Cover, fn_values: &[f64], sup: bool, n: usize, mode: SolverMode, budget: u64) -> Level {
    let weights: Vec<f64> = an.members().iter().map(|m| member_weight(m, fn_values, sup)).collect();
    let sol = min_weight_set_cover(an.universe(), an.members(), &weights, mode, budget);
    Level { n, raw: sol.weight, bound: sol.bound }
}

fn check_sizes(scaffold: &Scaffold, values: &[f64]) -> Result<()> {
    if values.len() != scaffold.len() {
        return domain("potential values do not match the scaffold");
    }
    Ok(())
}

/// Levels of a cover whose members are disjoint. Every iterate is then a
/// partition, the only subcover is the whole family, and the cells are
/// tracked by label instead of by member sets.
fn partition_levels(scaffold: &Scaffold, sums: &[Vec<f64>], a: &Cover) -> Option<(Vec<Level>, Vec<Level>)> {
    if a.members().iter().map(|m| m.count_ones(..)).sum::<usize>() != a.universe() {
        return None;
    }
    let mut base = vec![0usize; a.universe()];
    for (i, m) in a.members().iter().enumerate() {
        m.ones().for_each(|x| base[x] = i);
    }
    let orbits = scaffold.orbits(sums.len());
    let mut cells = base.clone();
    let (mut q, mut p) = (Vec::new(), Vec::new());
    for (i, fnv) in sums.iter().enumerate() {
        if i > 0 {
            let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
            for x in 0..cells.len() {
                let key = (cells[x], base[orbits[i][x]]);
                let next = ids.len();
                cells[x] = *ids.entry(key).or_insert(next);
            }
        }
        let count = cells.iter().max().map_or(0, |&c| c + 1);
        let mut lo = vec![f64::INFINITY; count];
        let mut hi = vec![f64::NEG_INFINITY; count];
        for (x, &c) in cells.iter().enumerate() {
            lo[c] = lo[c].min(fnv[x]);
            hi[c] = hi[c].max(fnv[x]);
        }
        q.push(Level { n: i + 1, raw: lo.iter().map(|v| v.exp()).sum(), bound: BoundDirection::Exact });
        p.push(Level { n: i + 1, raw: hi.iter().map(|v| v.exp()).sum(), bound: BoundDirection::Exact });
    }
    Some((q, p))
}

/// `Q_n` and `P_n` for `n = 1..=n_max`.
pub fn cover_levels(
    scaffold: &Scaffold,
    values: &[f64],
    a: &Cover,
    n_max: usize,
    mode: SolverMode,
    budget: u64,
) -> Result<(Vec<Level>, Vec<Level>)> {
    check_sizes(scaffold, values)?;
    if n_max == 0 {
        return domain("need n_max >= 1");
    }
    let sums = birkhoff_tables(scaffold, values, n_max);
    if let Some(levels) = partition_levels(scaffold, &sums, a) {
        return Ok(levels);
    }
    let covers = iterates(scaffold, a, n_max)?;
    let pairs: Vec<(Level, Level)> = covers
        .par_iter()
        .zip(sums.par_iter())
        .enumerate()
        .map(|(i, (an, fnv))| {
            (cover_level(an, fnv, false, i + 1, mode, budget), cover_level(an, fnv, true, i + 1, mode, budget))
        })
        .collect();
    Ok(pairs.into_iter().unzip())
}

pub fn q_value(scaffold: &Scaffold, f: &Potential, a: &Cover, n: usize, mode: SolverMode) -> Result<Level> {
    if n == 0 {
        return domain("q_value needs n >= 1");
    }
    let v = f.values_on(scaffold)?;
    Ok(cover_levels(scaffold, &v, a, n, mode, DEFAULT_BUDGET)?.0.pop().expect("n >= 1"))
}

pub fn p_value(scaffold: &Scaffold, f: &Potential, a: &Cover, n: usize, mode: SolverMode) -> Result<Level> {
    if n == 0 {
        return domain("p_value needs n >= 1");
    }
    let v = f.values_on(scaffold)?;
    Ok(cover_levels(scaffold, &v, a, n, mode, DEFAULT_BUDGET)?.1.pop().expect("n >= 1"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverPressures {
    pub q_minus: PressureEstimate,
    pub q_plus: PressureEstimate,
    pub p_cover: PressureEstimate,
}

pub fn cover_pressure(
    scaffold: &Scaffold,
    values: &[f64],
    a: &Cover,
    epsilon: Option<f64>,
    n_max: usize,
    mode: SolverMode,
) -> Result<CoverPressures> {
    if n_max < 2 {
        return domain("cover pressure needs n_max >= 2");
    }
    let (q, p) = cover_levels(scaffold, values, a, n_max, mode, DEFAULT_BUDGET)?;
    Ok(CoverPressures {
        q_minus: PressureEstimate::from_levels(PressureKind::Qminus, epsilon, &q, Extrapolation::MinTail),
        q_plus: PressureEstimate::from_levels(PressureKind::Qplus, epsilon, &q, Extrapolation::MaxTail),
        p_cover: PressureEstimate::from_levels(PressureKind::Pcover, epsilon, &p, Extrapolation::RunningMin),
    })
}

/// Bowen conflict graphs for `n = 1..=n_max`, each obtained from the
/// previous one by keeping the pairs still within `eps` at time `n - 1`.
pub fn bowen_graphs(scaffold: &Scaffold, eps: f64, n_max: usize) -> Vec<Vec<Vec<usize>>> {
    let mut graphs = Vec::with_capacity(n_max);
    if n_max == 0 {
        return graphs;
    }
    graphs.push(scaffold.bowen_neighbors(eps, 1));
    let mut pos: Vec<usize> = (0..scaffold.len()).collect();
    for _ in 1..n_max {
        pos.iter_mut().for_each(|p| *p = scaffold.apply(*p));
        let prev: &Vec<Vec<usize>> = graphs.last().expect("nonempty");
        let next = prev
            .iter()
            .enumerate()
            .map(|(x, nb)| nb.iter().copied().filter(|&y| scaffold.distance(pos[x], pos[y]) < eps).collect())
            .collect();
        graphs.push(next);
    }
    graphs
}

/// The level-`n` Bowen graph alone. Prefix scaffolds group by the depth
/// `n-1+r` key directly, skipping the dense shallow levels.
pub fn bowen_graph(scaffold: &Scaffold, eps: f64, n: usize) -> Vec<Vec<usize>> {
    match scaffold.metric_kind() {
        Metric::Prefix => scaffold.bowen_neighbors(eps, n.max(1)),
        _ => bowen_graphs(scaffold, eps, n.max(1)).pop().expect("n >= 1"),
    }
}

/// A separated or generating set with its weight.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedSet {
    pub n: usize,
    pub points: Vec<usize>,
    pub value: f64,
    pub bound: BoundDirection,
    pub exhausted: bool,
}

impl WeightedSet {
    pub fn level(&self) -> Level {
        Level { n: self.n, raw: self.value, bound: self.bound }
    }
}

fn separated_from_graph(
    adj: &[Vec<usize>],
    fn_values: &[f64],
    n: usize,
    mode: SolverMode,
    budget: u64,
    order: Option<&[usize]>,
) -> WeightedSet {
    let w: Vec<f64> = fn_values.iter().map(|v| v.exp()).collect();
    if mode == SolverMode::Exact {
        if let Some(arcs) = order.and_then(|o| Arcs::new(adj, o)) {
            let (points, value) = arc_independent_set(&w, &arcs);
            return WeightedSet { n, points, value, bound: BoundDirection::Exact, exhausted: false };
        }
        let banded = order.and_then(|o| Band::new(adj, o)).and_then(|b| banded_independent_set(adj, &w, &b));
        if let Some((points, value)) = banded {
            return WeightedSet { n, points, value, bound: BoundDirection::Exact, exhausted: false };
        }
    }
    let r = max_weight_independent_set(adj, &w, mode, budget);
    WeightedSet { n, points: r.vertices, value: r.weight, bound: r.bound, exhausted: r.exhausted }
}

fn generating_from_graph(
    adj: &[Vec<usize>],
    fn_values: &[f64],
    n: usize,
    mode: SolverMode,
    budget: u64,
    order: Option<&[usize]>,
) -> WeightedSet {
    let len = adj.len();
    let w: Vec<f64> = fn_values.iter().map(|v| v.exp()).collect();
    if mode == SolverMode::Exact {
        if let Some(arcs) = order.and_then(|o| Arcs::new(adj, o)) {
            let (points, value) = arc_dominating_set(&w, &arcs);
            return WeightedSet { n, points, value, bound: BoundDirection::Exact, exhausted: false };
        }
        let banded = order.and_then(|o| Band::new(adj, o)).and_then(|b| banded_dominating_set(adj, &w, &b));
        if let Some((points, value)) = banded {
            return WeightedSet { n, points, value, bound: BoundDirection::Exact, exhausted: false };
        }
    }
    let sets: Vec<FixedBitSet> = adj
        .iter()
        .enumerate()
        .map(|(x, nb)| {
            let mut s = FixedBitSet::with_capacity(len);
            s.insert(x);
            nb.iter().for_each(|&y| s.insert(y));
            s
        })
        .collect();
    let sol = min_weight_set_cover(len, &sets, &w, mode, budget);
    WeightedSet { n, points: sol.chosen, value: sol.weight, bound: sol.bound, exhausted: sol.exhausted }
}

/// Points of a circle scaffold by increasing coordinate; the cyclic order
/// under which Bowen graphs of circle maps have small bandwidth.
fn circle_order(scaffold: &Scaffold) -> Option<Vec<usize>> {
    match scaffold.metric_kind() {
        Metric::Circle { .. } => {
            let mut order: Vec<usize> = (0..scaffold.len()).collect();
            order.sort_by(|&a, &b| scaffold.point(a).coord[0].total_cmp(&scaffold.point(b).coord[0]).then(a.cmp(&b)));
            Some(order)
        }
        _ => None,
    }
}

/// Maximum-weight independent set of one Bowen graph of `scaffold`, with
/// the same solver chain as [`separated_sets`].
pub fn separated_from_bowen_graph(
    scaffold: &Scaffold,
    adj: &[Vec<usize>],
    fn_values: &[f64],
    n: usize,
    mode: SolverMode,
    budget: u64,
) -> WeightedSet {
    separated_from_graph(adj, fn_values, n, mode, budget, circle_order(scaffold).as_deref())
}

/// Maximum-weight `(n, ε)`-separated set for `n = 1..=n_max`.
pub fn separated_sets(
    scaffold: &Scaffold,
    values: &[f64],
    eps: f64,
    n_max: usize,
    mode: SolverMode,
    budget: u64,
) -> Result<Vec<WeightedSet>> {
    check_sizes(scaffold, values)?;
    if !(eps > 0.0) || n_max == 0 {
        return domain("need eps > 0 and n_max >= 1");
    }
    let graphs = bowen_graphs(scaffold, eps, n_max);
    let sums = birkhoff_tables(scaffold, values, n_max);
    let order = circle_order(scaffold);
    Ok(graphs
        .par_iter()
        .zip(sums.par_iter())
        .enumerate()
        .map(|(i, (g, s))| separated_from_graph(g, s, i + 1, mode, budget, order.as_deref()))
        .collect())
}

/// Minimum-weight `(n, ε)`-generating set for `n = 1..=n_max`.
pub fn generating_sets(
    scaffold: &Scaffold,
    values: &[f64],
    eps: f64,
    n_max: usize,
    mode: SolverMode,
    budget: u64,
) -> Result<Vec<WeightedSet>> {
    check_sizes(scaffold, values)?;
    if !(eps > 0.0) || n_max == 0 {
        return domain("need eps > 0 and n_max >= 1");
    }
    let graphs = bowen_graphs(scaffold, eps, n_max);
    let sums = birkhoff_tables(scaffold, values, n_max);
    let order = circle_order(scaffold);
    Ok(graphs
        .par_iter()
        .zip(sums.par_iter())
        .enumerate()
        .map(|(i, (g, s))| generating_from_graph(g, s, i + 1, mode, budget, order.as_deref()))
        .collect())
}

pub fn s_value(scaffold: &Scaffold, f: &Potential, eps: f64, n: usize, mode: SolverMode) -> Result<WeightedSet> {
    let v = f.values_on(scaffold)?;
    Ok(separated_sets(scaffold, &v, eps, n, mode, DEFAULT_BUDGET)?.pop().expect("n >= 1"))
}

pub fn g_value(scaffold: &Scaffold, f: &Potential, eps: f64, n: usize, mode: SolverMode) -> Result<WeightedSet> {
    let v = f.values_on(scaffold)?;
    Ok(generating_sets(scaffold, &v, eps, n, mode, DEFAULT_BUDGET)?.pop().expect("n >= 1"))
}

pub fn separated_pressure(
    scaffold: &Scaffold,
    values: &[f64],
    eps: f64,
    n_max: usize,
    mode: SolverMode,
) -> Result<PressureEstimate> {
    let levels: Vec<Level> =
        separated_sets(scaffold, values, eps, n_max, mode, DEFAULT_BUDGET)?.iter().map(|s| s.level()).collect();
    Ok(PressureEstimate::from_levels(PressureKind::Separated, Some(eps), &levels, Extrapolation::MaxTailIncrement))
}

pub fn generating_pressure(
    scaffold: &Scaffold,
    values: &[f64],
    eps: f64,
    n_max: usize,
    mode: SolverMode,
) -> Result<PressureEstimate> {
    let levels: Vec<Level> =
        generating_sets(scaffold, values, eps, n_max, mode, DEFAULT_BUDGET)?.iter().map(|s| s.level()).collect();
    Ok(PressureEstimate::from_levels(PressureKind::Generating, Some(eps), &levels, Extrapolation::MaxTailIncrement))
}

/// Whether every scaffold point is within Bowen distance `< eps` of `set`.
pub fn is_generating(scaffold: &Scaffold, set: &[usize], eps: f64, n: usize) -> bool {
    let orbits = scaffold.orbits(n);
    (0..scaffold.len()).all(|x| {
        set.iter().any(|&y| orbits.iter().all(|row| scaffold.distance(row[x], row[y]) < eps))
    })
}

/// Whether the points of `set` are pairwise at Bowen distance `>= eps`.
pub fn is_separated(scaffold: &Scaffold, set: &[usize], eps: f64, n: usize) -> bool {
    let orbits = scaffold.orbits(n);
    set.iter().enumerate().all(|(i, &x)| {
        set[i + 1..].iter().all(|&y| orbits.iter().any(|row| scaffold.distance(row[x], row[y]) >= eps))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PressureOptions {
    pub n_max: usize,
    /// Largest `n` for the ball-cover pressures.
    pub cover_n_max: usize,
    pub mode: SolverMode,
    /// Successive-ε tolerance for the consolidated value.
    pub tolerance: f64,
}

impl Default for PressureOptions {
    fn default() -> Self {
        Self { n_max: 10, cover_n_max: 6, mode: SolverMode::Exact, tolerance: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    pub scaffold_points: usize,
    pub separated: PressureEstimate,
    pub generating: PressureEstimate,
    pub ball_cover: Option<CoverPressures>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convergence {
    /// A single ε was requested.
    Single,
    /// The selected ε differs from its predecessor by less than the tolerance.
    Converged,
    /// No successive difference fell below the tolerance; the smallest ε is used.
    NotConverged,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopologicalPressure {
    pub rows: Vec<EpsilonRow>,
    pub consolidated: PressureEstimate,
    pub selected_epsilon: f64,
    pub convergence: Convergence,
    pub tolerance: f64,
    pub projection_error: f64,
    pub value_at_infinity: Option<f64>,
}

impl TopologicalPressure {
    pub fn value(&self) -> f64 {
        self.consolidated.extrapolated
    }

    /// Every estimate in the report, in output order.
    pub fn estimates(&self) -> Vec<&PressureEstimate> {
        let mut out = Vec::new();
        for r in &self.rows {
            out.push(&r.separated);
            out.push(&r.generating);
            if let Some(c) = &r.ball_cover {
                out.extend([&c.q_minus, &c.q_plus, &c.p_cover]);
            }
        }
        out.push(&self.consolidated);
        out
    }
}

/// Separated, generating and ball-cover pressures over an ε grid.
///
/// The consolidated value is the separated-pressure extrapolation at the
/// smallest ε whose difference from the previous grid value is below the
/// tolerance. On a non-compact space the metric must come with distances
/// to infinity and the potential with a value at infinity.
pub fn topological_pressure(
    sys: &SystemDescriptor,
    f: &Potential,
    eps_grid: &[f64],
    opts: &PressureOptions,
) -> Result<TopologicalPressure> {
    if eps_grid.is_empty() || eps_grid.iter().any(|&e| !(e > 0.0)) {
        return domain("epsilon grid must be nonempty and positive");
    }
    if opts.n_max == 0 {
        return domain("n_max must be positive");
    }
    let value_at_infinity = if sys.is_compact() {
        f.at_infinity
    } else {
        let probe = sys.base_scaffold()?;
        if probe.infinity_distances().is_none() {
            return contract("non-compact system without a one-point metric");
        }
        Some(f.require_decomposition().map_err(|_| {
            crate::Error::Contract("potential must be one-point uniformly continuous: declare its value at infinity".into())
        })?)
    };
    let mut rows = Vec::with_capacity(eps_grid.len());
    let mut projection_error = 0.0f64;
    for &eps in eps_grid {
        let scaffold = sys.scaffold_for(opts.n_max, eps, Some(f))?;
        projection_error = projection_error.max(scaffold.projection_error());
        let values = f.values_on(&scaffold)?;
        let separated = separated_pressure(&scaffold, &values, eps, opts.n_max, opts.mode)?;
        let generating = generating_pressure(&scaffold, &values, eps, opts.n_max, opts.mode)?;
        let coverable = matches!(scaffold.metric_kind(), Metric::Prefix) || scaffold.len() <= MAX_BALL_COVER_POINTS;
        let ball_cover = if opts.cover_n_max >= 2 && coverable {
            let cover = ball_cover(&scaffold, eps)?;
            Some(cover_pressure(&scaffold, &values, &cover, Some(eps), opts.cover_n_max.min(opts.n_max), opts.mode)?)
        } else {
            None
        };
        rows.push(EpsilonRow { epsilon: eps, scaffold_points: scaffold.len(), separated, generating, ball_cover });
    }
    let (selected, convergence) = if rows.len() == 1 {
        (0, Convergence::Single)
    } else {
        let qualifying = (1..rows.len()).rev().find(|&k| {
            (rows[k].separated.extrapolated - rows[k - 1].separated.extrapolated).abs() < opts.tolerance
        });
        match qualifying {
            Some(k) => (k, Convergence::Converged),
            None => (rows.len() - 1, Convergence::NotConverged),
        }
    };
    let mut consolidated = rows[selected].separated.clone();
    consolidated.kind = PressureKind::Consolidated;
    Ok(TopologicalPressure {
        selected_epsilon: rows[selected].epsilon,
        rows,
        consolidated,
        convergence,
        tolerance: opts.tolerance,
        projection_error,
        value_at_infinity,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IteratedLevel {
    pub n: usize,
    /// `Q_n(T^k, f_k, A^k)`.
    pub q_iterated: f64,
    /// `Q_{kn}(T, f, A)`.
    pub q_direct: f64,
    pub p_iterated: f64,
    pub p_direct: f64,
    /// `(A^k)^n` under `T^k` equals `A^{kn}` under `T` as member sets.
    pub covers_equal: bool,
    /// `(1/n) log Q_n(T^k, f_k, A) <= k (1/(kn)) log Q_{kn}(T, f, A)`.
    pub q_inequality: bool,
    pub p_inequality: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IteratedReport {
    pub k: usize,
    pub levels: Vec<IteratedLevel>,
    pub holds: bool,
}

/// Compares `(T^k, f_k, A^k)` over `n` steps with `(T, f, A)` over `kn`.
pub fn iterated_system_inequality_check(
    scaffold: &Scaffold,
    f: &Potential,
    a: &Cover,
    k: usize,
    n_max: usize,
    mode: SolverMode,
) -> Result<IteratedReport> {
    if k == 0 || n_max == 0 {
        return domain("need k >= 1 and n_max >= 1");
    }
    let values = f.values_on(scaffold)?;
    let power = scaffold.power(k);
    let fk = scaffold.birkhoff_table(&values, k);
    let ak = iterates(scaffold, a, k)?.pop().expect("k >= 1");
    let (q_it, p_it) = cover_levels(&power, &fk, &ak, n_max, mode, DEFAULT_BUDGET)?;
    let (q_plain, p_plain) = cover_levels(&power, &fk, a, n_max, mode, DEFAULT_BUDGET)?;
    let (q_dir, p_dir) = cover_levels(scaffold, &values, a, k * n_max, mode, DEFAULT_BUDGET)?;
    let iter_covers = iterates(&power, &ak, n_max)?;
    let direct_covers = iterates(scaffold, a, k * n_max)?;
    let tol = 1e-12;
    let mut levels = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (qi, qd) = (q_it[n - 1].raw, q_dir[k * n - 1].raw);
        let (pi, pd) = (p_it[n - 1].raw, p_dir[k * n - 1].raw);
        let q_lhs = q_plain[n - 1].raw.ln() / n as f64;
        let p_lhs = p_plain[n - 1].raw.ln() / n as f64;
        levels.push(IteratedLevel {
            n,
            q_iterated: qi,
            q_direct: qd,
            p_iterated: pi,
            p_direct: pd,
            covers_equal: iter_covers[n - 1].same_members(&direct_covers[k * n - 1]),
            q_inequality: q_lhs <= qd.ln() / n as f64 + tol,
            p_inequality: p_lhs <= pd.ln() / n as f64 + tol,
        });
    }
    let holds = levels.iter().all(|l| {
        l.covers_equal
            && ((l.q_iterated - l.q_direct).abs() <= tol * l.q_direct)
            && ((l.p_iterated - l.p_direct).abs() <= tol * l.p_direct)
            && l.q_inequality
            && l.p_inequality
    });
    Ok(IteratedReport { k, levels, holds })
}

/// Checks `A ≺ B ⟹ Q_n(A) <= Q_n(B)` for `n <= n_max`.
pub fn refinement_monotone(
    scaffold: &Scaffold,
    values: &[f64],
    a: &Cover,
    b: &Cover,
    n_max: usize,
    mode: SolverMode,
) -> Result<bool> {
    if !refines(b, a) {
        return domain("second cover does not refine the first");
    }
    let (qa, _) = cover_levels(scaffold, values, a, n_max, mode, DEFAULT_BUDGET)?;
    let (qb, _) = cover_levels(scaffold, values, b, n_max, mode, DEFAULT_BUDGET)?;
    Ok(qa.iter().zip(&qb).all(|(x, y)| x.raw <= y.raw * (1.0 + 1e-12)))
}
