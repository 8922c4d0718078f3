//! The empirical-measure construction behind the lower half of the
//! variational principle, with its identities as executable checks.
//!
//! ```text
//! σ_n = Σ_{x ∈ E_n} e^{g_n(x)} δ_x / A_n,   A_n = Σ_{x ∈ E_n} e^{g_n(x)}
//! μ_n = (1/n) Σ_{j<n} σ_n ∘ S^{-j}
//! ```
//!
//! `E_n` is a maximum-weight `(n, ε)`-separated set. A partition of `Z`
//! into pieces of diameter `< ε` puts at most one point of `E_n` in each
//! cell of `Z^n`, which gives `H_{σ_n}(Z^n) + ∫ g_n dσ_n = log A_n`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::compactification::{extend_system, lift_potential, restrict_measure, ExtendedSystem};
use crate::cover_algebra::{BoundDirection, Partition, SolverMode, DEFAULT_BUDGET};
use crate::error::{domain, Error, Result};
use crate::measure_pressure::{entropy_of_masses, partition_entropy_sequence, DynamicalMeasure, FiniteMeasure, OnScaffold};
use crate::systems::{prefix_agreement, sup_norm, Metric, Potential, Scaffold, SystemDescriptor};
use crate::topo_pressure::{
    birkhoff_tables, bowen_graph, independent_set_upper_bound, separated_from_bowen_graph, separated_pressure,
};

/// Tolerance of the entropy identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalBundle {
    pub n: usize,
    pub epsilon: f64,
    /// `E_n`, ids in `X`.
    pub points: Vec<usize>,
    pub a_n: f64,
    #[serde(skip)]
    pub sigma: FiniteMeasure,
    #[serde(skip)]
    pub mu: FiniteMeasure,
    pub bound: BoundDirection,
    pub exhausted: bool,
    /// Upper bound for the separated-set weight: `a_n` itself when exact,
    /// a clique-cover bound otherwise.
    pub upper: f64,
    /// `A_n` is at least half the maximum separated weight.
    pub certified_half: bool,
    /// `g = f ∘ π` on `Z`.
    #[serde(skip)]
    pub g: Vec<f64>,
}

/// `E_n`, `A_n`, `σ_n` and `μ_n` on the extension. On a non-compact base
/// the potential must vanish at infinity.
pub fn empirical_construction(
    ext: &ExtendedSystem,
    f: &Potential,
    eps: f64,
    n: usize,
    mode: SolverMode,
) -> Result<EmpiricalBundle> {
    if !(eps > 0.0) || n == 0 {
        return domain("need eps > 0 and n >= 1");
    }
    if !ext.base().is_compact_space() && f.require_decomposition()? != 0.0 {
        return domain("potential must vanish at infinity; shift it by its value there");
    }
    let base = ext.base();
    let values = f.values_on(base)?;
    let adj = bowen_graph(base, eps, n);
    let fn_values = birkhoff_tables(base, &values, n).pop().expect("n >= 1");
    let weights: Vec<f64> = fn_values.iter().map(|v| v.exp()).collect();
    let set = separated_from_bowen_graph(base, &adj, &fn_values, n, mode, DEFAULT_BUDGET);
    let a_n = set.value;
    let upper = if set.bound == BoundDirection::Exact { a_n } else { independent_set_upper_bound(&adj, &weights) };
    let sigma = FiniteMeasure::new(set.points.iter().map(|&x| (x, weights[x] / a_n)))?;
    let total = ext.total();
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for (x, w) in sigma.iter() {
        let mut z = x;
        for _ in 0..n {
            *acc.entry(z).or_insert(0.0) += w;
            z = total.apply(z);
        }
    }
    let mu = FiniteMeasure::new(acc.into_iter().map(|(z, w)| (z, w / n as f64)))?;
    Ok(EmpiricalBundle {
        n,
        epsilon: eps,
        certified_half: set.bound == BoundDirection::Exact || a_n >= upper / 2.0,
        points: set.points,
        a_n,
        sigma,
        mu,
        bound: set.bound,
        exhausted: set.exhausted,
        upper,
        g: lift_potential(ext, f)?,
    })
}

fn member_diameter(scaffold: &Scaffold, member: &[usize]) -> f64 {
    let mut d = 0.0f64;
    for (i, &x) in member.iter().enumerate() {
        for &y in &member[i + 1..] {
            d = d.max(scaffold.distance(x, y));
        }
    }
    d
}

/// Largest `d̃`-diameter over the members of a partition of `Z`.
pub fn max_member_diameter(ext: &ExtendedSystem, c: &Partition) -> f64 {
    let total = ext.total();
    if matches!(total.metric_kind(), Metric::Prefix) {
        // Prefix diameters follow from the longest common prefix.
        return c
            .member_lists()
            .iter()
            .filter(|ids| ids.len() > 1)
            .map(|ids| {
                let first = &total.point(ids[0]).word;
                let common = ids[1..]
                    .iter()
                    .map(|&y| first.iter().zip(&total.point(y).word).take_while(|(a, b)| a == b).count())
                    .min()
                    .unwrap_or(first.len());
                0.5f64.powi(common as i32)
            })
            .fold(0.0, f64::max);
    }
    c.member_lists().iter().map(|ids| member_diameter(total, ids)).fold(0.0, f64::max)
}

fn cell_entropy(scaffold: &Scaffold, mu: &FiniteMeasure, c: &Partition, n: usize) -> Result<f64> {
    let on = OnScaffold::new(scaffold, mu)?;
    Ok(entropy_of_masses(on.refined_cells(c, n, None)?.iter().map(|c| c.mass)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    /// `H_{σ_n}(Z^n)`.
    pub entropy: f64,
    /// `n ∫ g dμ_n`.
    pub n_integral: f64,
    pub log_a_n: f64,
    /// `H + n ∫ g dμ_n - log A_n`.
    pub residual: f64,
    /// `∫ g_n dσ_n - n ∫ g dμ_n`.
    pub birkhoff_residual: f64,
    pub max_points_per_cell: usize,
    pub holds: bool,
}

/// `H_{σ_n}(Z^n) + n ∫ g dμ_n = log A_n` for a partition of `Z` whose
/// members have diameter `< ε`.
pub fn entropy_identity_check(bundle: &EmpiricalBundle, ext: &ExtendedSystem, c: &Partition) -> Result<IdentityReport> {
    let total = ext.total();
    if c.universe() != total.len() {
        return domain("partition does not live on Z");
    }
    let diam = max_member_diameter(ext, c);
    if diam >= bundle.epsilon {
        return domain(format!("partition member of diameter {diam} >= eps = {}", bundle.epsilon));
    }
    let n = bundle.n;
    let cn = c.iterate(total, n)?;
    let mut per_cell = vec![0usize; cn.len()];
    bundle.points.iter().for_each(|&x| per_cell[cn.label(x)] += 1);
    let entropy = cell_entropy(total, &bundle.sigma, c, n)?;
    let n_integral = n as f64 * bundle.mu.integrate(&bundle.g);
    let g_n = total.birkhoff_table(&bundle.g, n);
    let birkhoff = bundle.sigma.integrate(&g_n);
    let log_a_n = bundle.a_n.ln();
    let residual = entropy + n_integral - log_a_n;
    let birkhoff_residual = birkhoff - n_integral;
    let max_points_per_cell = per_cell.into_iter().max().unwrap_or(0);
    let scale = log_a_n.abs().max(1.0);
    Ok(IdentityReport {
        entropy,
        n_integral,
        log_a_n,
        residual,
        birkhoff_residual,
        max_points_per_cell,
        holds: residual.abs() <= IDENTITY_TOLERANCE * scale
            && birkhoff_residual.abs() <= IDENTITY_TOLERANCE * scale
            && max_points_per_cell <= 1,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChunkReport {
    pub q: usize,
    /// `q H_{σ_n}(Z^n)`.
    pub lhs: f64,
    /// `2q log |Z^q| + n H_{μ_n}(Z^q)`, `|Z^q| = |Z|^q`.
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// `q H_{σ_n}(Z^n) <= 2q log |Z^q| + n H_{μ_n}(Z^q)` for `1 < q < n`.
pub fn chunked_entropy_bound(bundle: &EmpiricalBundle, ext: &ExtendedSystem, c: &Partition, q: usize) -> Result<ChunkReport> {
    let n = bundle.n;
    if q <= 1 || q >= n {
        return domain(format!("chunk length q = {q} must satisfy 1 < q < n = {n}"));
    }
    let total = ext.total();
    let log_card = (c.nonempty_count() as f64).ln();
    let lhs = q as f64 * cell_entropy(total, &bundle.sigma, c, n)?;
    let rhs = 2.0 * (q * q) as f64 * log_card + n as f64 * cell_entropy(total, &bundle.mu, c, q)?;
    Ok(ChunkReport { q, lhs, rhs, slack: rhs - lhs, holds: lhs <= rhs + 1e-12 * rhs.abs().max(1.0) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectReport {
    /// Largest `|∫ φ d(μ_n - μ_n ∘ S^{-1})|` over the normalised test functions.
    pub defect: f64,
    /// `2 / n`.
    pub bound: f64,
    pub holds: bool,
}

/// Defect of `μ_n` against indicators of partition members and `g / ‖g‖`.
pub fn invariance_defect(bundle: &EmpiricalBundle, ext: &ExtendedSystem, c: &Partition) -> Result<DefectReport> {
    let total = ext.total();
    if c.universe() != total.len() {
        return domain("partition does not live on Z");
    }
    let pushed = bundle.mu.pushforward(total, 1)?;
    let diff = |phi: &dyn Fn(usize) -> f64| -> f64 {
        bundle.mu.iter().map(|(z, w)| w * phi(z)).sum::<f64>() - pushed.iter().map(|(z, w)| w * phi(z)).sum::<f64>()
    };
    let mut defect = 0.0f64;
    for l in 0..c.len() {
        defect = defect.max(diff(&|z| if c.label(z) == l { 1.0 } else { 0.0 }).abs());
    }
    let norm = sup_norm(&bundle.g);
    if norm > 0.0 {
        defect = defect.max(diff(&|z| bundle.g[z] / norm).abs());
    }
    let bound = 2.0 / bundle.n as f64;
    Ok(DefectReport { defect, bound, holds: defect <= bound + 1e-12 })
}

/// Partition of `Z` by the recipe `Z_j = B_j ∖ (B_1 ∪ … ∪ B_{j-1})` with
/// balls of one radius `ρ < ε/2` lying strictly between realised
/// distances, so no point sits on a ball boundary. The ball around
/// infinity comes first; balls adding nothing are dropped.
pub fn boundary_safe_partition(ext: &ExtendedSystem, mu: &FiniteMeasure, eps: f64) -> Result<Partition> {
    if !(eps > 0.0) {
        return domain("eps must be positive");
    }
    let total = ext.total();
    mu.check_on(total)?;
    let half = eps / 2.0;
    if matches!(total.metric_kind(), Metric::Prefix) {
        // Realised distances are powers of two; balls are cylinders.
        let k = prefix_agreement(half);
        let below = 0.5f64.powi(k as i32);
        let rho = (below + half) / 2.0;
        let depth = prefix_agreement(rho);
        let groups = total.prefix_groups(depth);
        let mut labels = vec![0usize; total.len()];
        for (i, g) in groups.values().enumerate() {
            g.iter().for_each(|&x| labels[x] = i);
        }
        return Ok(Partition::from_labels(labels));
    }
    let len = total.len();
    let mut below = 0.0f64;
    for x in 0..len {
        for y in x + 1..len {
            let d = total.distance(x, y);
            if d < half && d > below {
                below = d;
            }
        }
    }
    let rho = (below + half) / 2.0;
    let mut centers: Vec<usize> = ext.fiber().take(1).collect();
    centers.extend(0..ext.base_len());
    let mut labels = vec![usize::MAX; len];
    let mut next = 0usize;
    for c in centers {
        let mut used = false;
        for z in 0..len {
            if labels[z] == usize::MAX && total.distance(c, z) < rho {
                labels[z] = next;
                used = true;
            }
        }
        if used {
            next += 1;
        }
    }
    if labels.iter().any(|&l| l == usize::MAX) {
        return Err(Error::ScaffoldTooCoarse("balls do not cover the scaffold".into()));
    }
    let mut p = Partition::from_labels(labels);
    if p.len() == 1 {
        p = p.with_count(2);
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineRow {
    pub epsilon: f64,
    pub n: usize,
    #[serde(rename = "A_n")]
    pub a_n: f64,
    pub bound_direction: BoundDirection,
    pub certified_half: bool,
    pub entropy_identity_residual: f64,
    pub points_per_cell: usize,
    pub defect: f64,
    pub defect_bound: f64,
    /// `(2q/n) log |Z^q|` at the largest chunk length.
    pub chunk_slack: f64,
    pub chunk_holds: bool,
    /// Entropy estimate of `μ_n` plus `∫ g dμ_n`.
    pub measure_pressure: f64,
    /// `(1/n) log A_n`.
    pub separated_pressure: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    /// `2 ‖g‖ / n`.
    pub defect: f64,
    /// `(2q/n) log |Z^q|`.
    pub chunk: f64,
    /// `(1/q) H_{μ*}(Z^q)` minus the increment estimate.
    pub truncation: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub epsilon: f64,
    pub selected_n: usize,
    pub q: usize,
    pub entropy: f64,
    pub integral: f64,
    pub measure_pressure: f64,
    /// Separated-pressure estimate on the selected scaffold.
    pub separated_pressure: f64,
    pub gap: f64,
    pub tolerance: Tolerance,
    /// `separated <= measure + tolerance`.
    pub holds: bool,
    /// Mass of `μ*` on `X`.
    pub restricted_mass: f64,
    /// Mass of `μ*` in the resolved neighbourhood of infinity (tail included).
    pub mass_near_infinity: f64,
    pub all_identities_hold: bool,
    pub rows: Vec<PipelineRow>,
}

fn entropy_estimate(total: &Scaffold, mu: &FiniteMeasure, c: &Partition, q: usize) -> Result<(f64, f64)> {
    let on = OnScaffold::new(total, mu)?;
    let seq = partition_entropy_sequence(&on, c, q)?;
    Ok((seq.extrapolated, seq.averages[q - 1]))
}

/// Runs the construction over `n_grid` and compares the largest-`n`
/// empirical measure with the separated pressure at scale `ε`.
pub fn lower_bound_pipeline(
    sys: &SystemDescriptor,
    f: &Potential,
    eps: f64,
    n_grid: &[usize],
    q_grid: &[usize],
    mode: SolverMode,
) -> Result<(FiniteMeasure, PipelineReport)> {
    let n_top = match n_grid.iter().max() {
        Some(&n) if n >= 3 => n,
        _ => return domain("n grid needs a value >= 3"),
    };
    if q_grid.is_empty() || q_grid.iter().any(|&q| q <= 1 || q >= n_top) {
        return domain(format!("chunk lengths must satisfy 1 < q < {n_top}"));
    }
    let q_top = *q_grid.iter().max().expect("nonempty");
    let mut rows = Vec::with_capacity(n_grid.len());
    let mut all_identities_hold = true;
    let mut selected = None;
    let mut sorted = n_grid.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &n in &sorted {
        let ext = extend_system(sys, sys.scaffold_for(n, eps, Some(f))?)?;
        let bundle = empirical_construction(&ext, f, eps, n, mode)?;
        let c = boundary_safe_partition(&ext, &bundle.mu, eps)?;
        let id = entropy_identity_check(&bundle, &ext, &c)?;
        all_identities_hold &= id.holds || bundle.bound != BoundDirection::Exact;
        let defect = invariance_defect(&bundle, &ext, &c)?;
        let chunks: Vec<ChunkReport> =
            q_grid.iter().filter(|&&q| q < n).map(|&q| chunked_entropy_bound(&bundle, &ext, &c, q)).collect::<Result<_>>()?;
        let q_row = q_top.min(n - 1).max(1);
        let (h, _) = entropy_estimate(ext.total(), &bundle.mu, &c, q_row)?;
        let integral = bundle.mu.integrate(&bundle.g);
        let log_card = (c.nonempty_count() as f64).ln();
        let row = PipelineRow {
            epsilon: eps,
            n,
            a_n: bundle.a_n,
            bound_direction: bundle.bound,
            certified_half: bundle.certified_half,
            entropy_identity_residual: id.residual,
            points_per_cell: id.max_points_per_cell,
            defect: defect.defect,
            defect_bound: defect.bound,
            chunk_slack: 2.0 * (q_row * q_row) as f64 * log_card / n as f64,
            chunk_holds: chunks.iter().all(|r| r.holds),
            measure_pressure: h + integral,
            separated_pressure: bundle.a_n.ln() / n as f64,
            gap: bundle.a_n.ln() / n as f64 - (h + integral),
        };
        rows.push(row);
        if n == n_top {
            selected = Some((ext, bundle, c));
        }
    }
    let (ext, bundle, c) = selected.expect("largest n is in the grid");
    let (entropy, average) = entropy_estimate(ext.total(), &bundle.mu, &c, q_top)?;
    let integral = bundle.mu.integrate(&bundle.g);
    let measure = entropy + integral;
    let values = f.values_on(ext.base())?;
    let separated = separated_pressure(ext.base(), &values, eps, n_top, mode)?.extrapolated;
    let tolerance = {
        let defect = 2.0 * sup_norm(&bundle.g) / n_top as f64;
        let chunk = 2.0 * (q_top * q_top) as f64 * (c.nonempty_count() as f64).ln() / n_top as f64;
        let truncation = (average - entropy).max(0.0);
        Tolerance { defect, chunk, truncation, total: defect + chunk + truncation }
    };
    let restricted = restrict_measure(&ext, &bundle.mu)?;
    let near = ext.base().near_infinity();
    let mass_near_infinity = (bundle.mu.total_mass() - restricted.total_mass())
        + near.map_or(0.0, |s| s.ones().map(|x| restricted.weight(x)).sum());
    let report = PipelineReport {
        epsilon: eps,
        selected_n: n_top,
        q: q_top,
        entropy,
        integral,
        measure_pressure: measure,
        separated_pressure: separated,
        gap: separated - measure,
        holds: separated <= measure + tolerance.total + 1e-12,
        tolerance,
        restricted_mass: restricted.total_mass(),
        mass_near_infinity,
        all_identities_hold,
        rows,
    };
    Ok((restricted, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compactification::extend_scaffold;
    use crate::systems::{symbolic_scaffold, translation_scaffold, ExtensionRecipe, PointData, Subshift};

    fn shift_ext(depth: usize) -> ExtendedSystem {
        extend_scaffold(symbolic_scaffold(&Subshift::full(2), depth).unwrap(), ExtensionRecipe::Identity).unwrap()
    }

    #[test]
    fn single_point_bundle() {
        let s = Scaffold::new("pt", vec![PointData::coord(vec![0.0])], vec![0], Metric::Euclidean, None, 0.0).unwrap();
        let ext = extend_scaffold(s, ExtensionRecipe::Identity).unwrap();
        let f = Potential::table(vec![0.7]);
        let b = empirical_construction(&ext, &f, 0.5, 1, SolverMode::Exact).unwrap();
        assert_eq!(b.points, vec![0]);
        assert!((b.a_n - 0.7f64.exp()).abs() < 1e-15);
        assert_eq!(b.sigma, FiniteMeasure::dirac(0));
        let c = boundary_safe_partition(&ext, &b.mu, 0.5).unwrap();
        let id = entropy_identity_check(&b, &ext, &c).unwrap();
        assert_eq!(id.entropy, 0.0);
        assert!(id.holds);
    }

    #[test]
    fn full_shift_uniform_bundle() {
        // Depth n - 1 + r = 3 at eps = 0.3, n = 2: eight separated points.
        let ext = shift_ext(3);
        let b = empirical_construction(&ext, &Potential::zero(), 0.3, 2, SolverMode::Exact).unwrap();
        assert_eq!(b.points.len(), 8);
        assert!((b.a_n - 8.0).abs() < 1e-12);
        assert!(b.sigma.iter().all(|(_, w)| (w - 0.125).abs() < 1e-15));
        let c = boundary_safe_partition(&ext, &b.mu, 0.3).unwrap();
        let id = entropy_identity_check(&b, &ext, &c).unwrap();
        assert!((id.entropy - 8f64.ln()).abs() < 1e-12 && id.holds);
    }

    #[test]
    fn weighted_identity_by_direct_sum() {
        let ext = shift_ext(2);
        let f = Potential::indicator(&[0], 2, 1.0).unwrap();
        let b = empirical_construction(&ext, &f, 0.3, 1, SolverMode::Exact).unwrap();
        // Four depth-2 words, weight e for the two starting with 0.
        let e = 1f64.exp();
        assert!((b.a_n - (2.0 * e + 2.0)).abs() < 1e-12);
        let c = boundary_safe_partition(&ext, &b.mu, 0.3).unwrap();
        let id = entropy_identity_check(&b, &ext, &c).unwrap();
        let p = e / (2.0 * e + 2.0);
        let q = 1.0 / (2.0 * e + 2.0);
        let h = -2.0 * p * p.ln() - 2.0 * q * q.ln();
        assert!((id.entropy - h).abs() < 1e-12);
        assert!(id.residual.abs() < 1e-12);
    }

    #[test]
    fn coarse_partition_is_rejected() {
        let ext = shift_ext(3);
        let b = empirical_construction(&ext, &Potential::zero(), 0.3, 2, SolverMode::Exact).unwrap();
        let coarse = Partition::from_labels((0..ext.total().len()).map(|x| ext.total().point(x).word[0] as usize).collect());
        assert!(entropy_identity_check(&b, &ext, &coarse).is_err());
    }

    #[test]
    fn boundary_safe_partition_examples() {
        // Radius between 1/8 and 0.15: depth-3 cylinders.
        let ext = shift_ext(5);
        let c = boundary_safe_partition(&ext, &FiniteMeasure::dirac(0), 0.3).unwrap();
        assert_eq!(c.nonempty_count(), 8);
        assert!(max_member_diameter(&ext, &c) < 0.3);

        let ext = extend_scaffold(translation_scaffold(64).unwrap(), ExtensionRecipe::Point).unwrap();
        let c = boundary_safe_partition(&ext, &FiniteMeasure::dirac(0), 0.4).unwrap();
        let inf = ext.fiber().start;
        assert_eq!(c.label(inf), 0);
        // The tail beyond |m| = 4 joins infinity.
        let zero = ext.base_len() / 2;
        assert_eq!(c.label(zero + 10), 0);
        assert_eq!(c.label(zero - 10), 0);
        assert_ne!(c.label(zero), 0);
        assert!(max_member_diameter(&ext, &c) < 0.4);
    }

    #[test]
    fn chunked_and_defect_examples() {
        let ext = shift_ext(6);
        let b = empirical_construction(&ext, &Potential::zero(), 0.3, 5, SolverMode::Exact).unwrap();
        let c = boundary_safe_partition(&ext, &b.mu, 0.3).unwrap();
        assert!(chunked_entropy_bound(&b, &ext, &c, 2).unwrap().holds);
        assert!(chunked_entropy_bound(&b, &ext, &c, 1).is_err());
        let d = invariance_defect(&b, &ext, &c).unwrap();
        assert!(d.holds && d.defect < 1e-12);

        // A fixed point: sigma is already invariant.
        let s = Scaffold::new("pt", vec![PointData::coord(vec![0.0])], vec![0], Metric::Euclidean, None, 0.0).unwrap();
        let ext = extend_scaffold(s, ExtensionRecipe::Identity).unwrap();
        let b = empirical_construction(&ext, &Potential::zero(), 0.5, 4, SolverMode::Exact).unwrap();
        let c = boundary_safe_partition(&ext, &b.mu, 0.5).unwrap();
        assert_eq!(invariance_defect(&b, &ext, &c).unwrap().defect, 0.0);
    }

    #[test]
    fn translation_defect_and_escape() {
        let sys = SystemDescriptor::translation(64, ExtensionRecipe::Point);
        let ext = extend_system(&sys, sys.base_scaffold().unwrap()).unwrap();
        let f = Potential::bump(0, 1.0, 4.0).unwrap();
        let b = empirical_construction(&ext, &f, 0.4, 32, SolverMode::Exact).unwrap();
        let c = boundary_safe_partition(&ext, &b.mu, 0.4).unwrap();
        assert!(invariance_defect(&b, &ext, &c).unwrap().defect <= 1.0 / 16.0);
        assert!(entropy_identity_check(&b, &ext, &c).unwrap().holds);
        assert!(matches!(
            empirical_construction(&ext, &f.plus_constant(1.0), 0.4, 4, SolverMode::Exact),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn pipeline_full_shift() {
        let sys = SystemDescriptor::symbolic("full-2-shift", Subshift::full(2));
        let (mu, r) = lower_bound_pipeline(&sys, &Potential::zero(), 0.3, &[6, 9, 12], &[3], SolverMode::Exact).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert!(r.all_identities_hold && r.holds);
        assert!(r.gap.abs() <= 0.05, "gap {}", r.gap);
        assert!(lower_bound_pipeline(&sys, &Potential::zero(), 0.3, &[6], &[1], SolverMode::Exact).is_err());
    }
}
