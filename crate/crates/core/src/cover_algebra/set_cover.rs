//! Minimum-weight set cover by branch and bound.
//!
//! Branching is on the uncovered element with the fewest usable sets; a set
//! rejected in one branch is banned in its later siblings. The lower bound
//! is a dual-feasible solution of the covering LP: each uncovered element
//! starts at its cheapest per-element price `w(S) / |S ∩ U|` and is then
//! raised until one of its sets is tight. Before searching, elements
//! whose family contains another element's are dropped, alternating with
//! set dominance until nothing changes. Families of cyclic runs go to the
//! exact arc solver.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::arc_cover::{circular_arc_cover, cyclic_run};

/// Whether a reported value is the defined quantity or a one-sided bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundDirection {
    Exact,
    Upper,
    Lower,
}

impl BoundDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Upper => "upper",
            Self::Lower => "lower",
        }
    }

    /// Direction of a product or sum of values with these directions.
    pub fn combine(self, other: Self) -> Self {
        match (self, other) {
            (Self::Exact, d) | (d, Self::Exact) => d,
            (a, b) if a == b => a,
            _ => Self::Upper,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    Exact,
    Greedy,
}

/// Subgradient steps at the root and at every other search node.
const ROOT_LAGRANGE_STEPS: usize = 2000;
const LAGRANGE_STEPS: usize = 30;

/// Node budget for exact searches.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct CoverSolution {
    /// Indices into the caller's set list, ascending.
    pub chosen: Vec<usize>,
    pub weight: f64,
    pub bound: BoundDirection,
    /// True when an exact search was requested but ran out of budget.
    pub exhausted: bool,
}

/// Lagrangian multipliers by element, with the bound they give and the
/// reduced cost of every usable set there.
struct Multipliers {
    lb: f64,
    u: Vec<f64>,
    reduced: Vec<(usize, f64)>,
}

struct Search<'a> {
    sets: &'a [FixedBitSet],
    weights: &'a [f64],
    by_element: Vec<Vec<usize>>,
    best: f64,
    best_choice: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// A feasible solution of the covering LP dual: start from the price
    /// bound, then raise each element's dual until one of its sets is tight.
    fn lower_bound(&self, uncovered: &FixedBitSet, banned: &FixedBitSet) -> Option<(f64, Vec<(usize, f64)>)> {
        let sizes: Vec<usize> = self
            .sets
            .iter()
            .enumerate()
            .map(|(i, s)| if banned.contains(i) { 0 } else { s.intersection_count(uncovered) })
            .collect();
        let mut residual: Vec<f64> = self.weights.to_vec();
        let mut duals = Vec::new();
        for e in uncovered.ones() {
            let mut price = f64::INFINITY;
            for &s in &self.by_element[e] {
                if sizes[s] > 0 {
                    price = price.min(self.weights[s] / sizes[s] as f64);
                }
            }
            if !price.is_finite() {
                return None;
            }
            for &s in &self.by_element[e] {
                if sizes[s] > 0 {
                    residual[s] -= price;
                }
            }
            let family = self.by_element[e].iter().filter(|&&s| sizes[s] > 0).count();
            duals.push((family, e, price));
        }
        duals.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut lb = 0.0;
        let mut raised = Vec::with_capacity(duals.len());
        for (_, e, price) in duals {
            let family = self.by_element[e].iter().filter(|&&s| sizes[s] > 0);
            let slack = family.clone().map(|&s| residual[s]).fold(f64::INFINITY, f64::min).max(0.0);
            family.for_each(|&s| residual[s] -= slack);
            lb += price + slack;
            raised.push((e, price + slack));
        }
        Some((lb, raised))
    }

    /// Subgradient ascent on the Lagrangian dual from the given multipliers,
    /// stopping once the node is pruned. Every few steps the sets of
    /// negative reduced cost are completed greedily into a cover, which may
    /// improve the incumbent.
    fn lagrangian(
        &mut self,
        uncovered: &FixedBitSet,
        banned: &FixedBitSet,
        start: &[f64],
        floor: f64,
        steps: usize,
        cost: f64,
        chosen: &[usize],
    ) -> Multipliers {
        let elems: Vec<usize> = uncovered.ones().collect();
        let mut local = vec![usize::MAX; uncovered.len()];
        elems.iter().enumerate().for_each(|(i, &e)| local[e] = i);
        let mut u: Vec<f64> = elems.iter().map(|&e| start[e]).collect();
        let cols: Vec<usize> = (0..self.sets.len())
            .filter(|&s| !banned.contains(s) && !self.sets[s].is_disjoint(uncovered))
            .collect();
        let inter: Vec<Vec<usize>> =
            cols.iter().map(|&s| self.sets[s].intersection(uncovered).map(|e| local[e]).collect()).collect();
        let mut best = Multipliers { lb: f64::NEG_INFINITY, u: vec![0.0; uncovered.len()], reduced: Vec::new() };
        let mut lambda = 2.0;
        let mut stale = 0;
        let mut rc = vec![0.0; cols.len()];
        for iter in 0..steps.max(1) {
            for (j, members) in inter.iter().enumerate() {
                rc[j] = self.weights[cols[j]] - members.iter().map(|&i| u[i]).sum::<f64>();
            }
            let lb = u.iter().sum::<f64>() + rc.iter().map(|&r| r.min(0.0)).sum::<f64>();
            if lb > best.lb {
                best.lb = lb;
                best.u.iter_mut().for_each(|v| *v = 0.0);
                elems.iter().zip(&u).for_each(|(&e, &v)| best.u[e] = v);
                best.reduced = cols.iter().copied().zip(rc.iter().copied()).collect();
                stale = 0;
            } else {
                stale += 1;
                if stale >= 5 {
                    lambda /= 2.0;
                    stale = 0;
                }
            }
            if iter % 8 == 0 {
                self.round(uncovered, &cols, &rc, cost, chosen);
            }
            let gap = self.best - cost - lb;
            if cost + best.lb.max(floor) >= self.best * (1.0 - 1e-13) || gap <= 0.0 || lambda < 1e-4 {
                break;
            }
            let mut g = vec![1.0; u.len()];
            for (j, members) in inter.iter().enumerate() {
                if rc[j] < 0.0 {
                    members.iter().for_each(|&i| g[i] -= 1.0);
                }
            }
            let norm: f64 = g.iter().map(|x| x * x).sum();
            if norm == 0.0 {
                break;
            }
            let step = lambda * gap / norm;
            u.iter_mut().zip(&g).for_each(|(ui, gi)| *ui = (*ui + step * gi).max(0.0));
        }
        best
    }

    /// Sets of negative reduced cost, then cheapest reduced price per new
    /// element until covered.
    fn round(&mut self, uncovered: &FixedBitSet, cols: &[usize], rc: &[f64], cost: f64, chosen: &[usize]) {
        let mut left = uncovered.clone();
        let mut pick = chosen.to_vec();
        for (j, &s) in cols.iter().enumerate() {
            if rc[j] < 0.0 {
                left.difference_with(&self.sets[s]);
                pick.push(s);
            }
        }
        while !left.is_clear() {
            let next = cols
                .iter()
                .enumerate()
                .filter_map(|(j, &s)| {
                    let gain = self.sets[s].intersection_count(&left);
                    (gain > 0).then(|| (rc[j].max(0.0) / gain as f64, self.weights[s] / gain as f64, j))
                })
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
            let Some((_, _, j)) = next else { return };
            left.difference_with(&self.sets[cols[j]]);
            pick.push(cols[j]);
        }
        // Drop redundant new sets, most expensive first.
        let mut extra: Vec<usize> = pick.split_off(chosen.len());
        extra.sort_by(|&a, &b| self.weights[b].total_cmp(&self.weights[a]).then(a.cmp(&b)));
        let mut i = 0;
        while i < extra.len() {
            let mut rest = FixedBitSet::with_capacity(uncovered.len());
            extra.iter().enumerate().filter(|&(k, _)| k != i).for_each(|(_, &s)| rest.union_with(&self.sets[s]));
            if uncovered.is_subset(&rest) {
                extra.remove(i);
            } else {
                i += 1;
            }
        }
        let total = cost + extra.iter().map(|&s| self.weights[s]).sum::<f64>();
        pick.extend(extra);
        if total < self.best {
            self.best = total;
            self.best_choice = pick;
        }
    }

    fn run(
        &mut self,
        uncovered: &FixedBitSet,
        banned: &mut FixedBitSet,
        cost: f64,
        chosen: &mut Vec<usize>,
        parent: Option<&[f64]>,
    ) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        if uncovered.is_clear() {
            if cost < self.best {
                self.best = cost;
                self.best_choice = chosen.clone();
            }
            return true;
        }
        let (floor, duals) = match self.lower_bound(uncovered, banned) {
            Some(found) => found,
            None => return true,
        };
        if cost + floor >= self.best * (1.0 - 1e-13) {
            return true;
        }
        let start = match parent {
            Some(u) => u.to_vec(),
            None => {
                let mut u = vec![0.0; uncovered.len()];
                duals.iter().for_each(|&(e, v)| u[e] = v);
                u
            }
        };
        let steps = if chosen.is_empty() { ROOT_LAGRANGE_STEPS } else { LAGRANGE_STEPS };
        let m = self.lagrangian(uncovered, banned, &start, floor, steps, cost, chosen);
        if cost + m.lb.max(floor) >= self.best * (1.0 - 1e-13) {
            return true;
        }
        // Any cover using s costs at least lb + rc(s) at these multipliers.
        let mut fixed = Vec::new();
        for &(s, r) in &m.reduced {
            if r > 0.0 && cost + m.lb + r >= self.best * (1.0 - 1e-13) && !banned.contains(s) {
                banned.insert(s);
                fixed.push(s);
            }
        }
        let reduced: HashMap<usize, f64> = m.reduced.iter().copied().collect();
        let pivot = uncovered
            .ones()
            .min_by_key(|&e| (self.by_element[e].iter().filter(|&&s| !banned.contains(s)).count(), e));
        let mut complete = true;
        if let Some(pivot) = pivot {
            let mut options: Vec<(f64, usize)> = self.by_element[pivot]
                .iter()
                .filter(|&&s| !banned.contains(s))
                .map(|&s| (reduced.get(&s).copied().unwrap_or(f64::INFINITY), s))
                .collect();
            options.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut newly_banned = Vec::new();
            for (_, s) in options {
                let mut rest = uncovered.clone();
                rest.difference_with(&self.sets[s]);
                chosen.push(s);
                complete &= self.run(&rest, banned, cost + self.weights[s], chosen, Some(&m.u));
                chosen.pop();
                if !complete {
                    break;
                }
                banned.insert(s);
                newly_banned.push(s);
            }
            for s in newly_banned {
                banned.set(s, false);
            }
        }
        for s in fixed {
            banned.set(s, false);
        }
        complete
    }
}

fn greedy(universe: usize, sets: &[FixedBitSet], weights: &[f64], usable: &[usize]) -> (Vec<usize>, f64) {
    let mut uncovered = FixedBitSet::with_capacity(universe);
    uncovered.insert_range(..);
    let mut chosen = Vec::new();
    let mut total = 0.0;
    while !uncovered.is_clear() {
        let mut best: Option<(f64, usize)> = None;
        for &s in usable {
            let gain = sets[s].intersection_count(&uncovered);
            if gain == 0 {
                continue;
            }
            let price = weights[s] / gain as f64;
            if best.is_none_or(|(p, _)| price < p) {
                best = Some((price, s));
            }
        }
        let (_, s) = best.expect("sets cover the universe");
        uncovered.difference_with(&sets[s]);
        total += weights[s];
        chosen.push(s);
    }
    chosen.sort_unstable();
    (chosen, total)
}

/// Drops duplicates and sets dominated by a superset of no larger weight.
fn reduce(sets: &[FixedBitSet], weights: &[f64]) -> Vec<usize> {
    let mut first: HashMap<&FixedBitSet, usize> = HashMap::new();
    for (i, s) in sets.iter().enumerate() {
        if s.is_clear() {
            continue;
        }
        first
            .entry(s)
            .and_modify(|j| {
                if weights[i] < weights[*j] {
                    *j = i;
                }
            })
            .or_insert(i);
    }
    let mut keep: Vec<usize> = first.into_values().collect();
    keep.sort_unstable();
    let dominated = |i: usize| {
        keep.iter().any(|&j| {
            j != i
                && weights[j] <= weights[i]
                && sets[i].is_subset(&sets[j])
                && (sets[i] != sets[j])
        })
    };
    keep.iter().copied().filter(|&i| !dominated(i)).collect()
}

/// The instance restricted to the usable sets and to elements whose family
/// is minimal under inclusion; covering those covers everything.
/// Returns the projected sets with their original indices.
fn shrink(universe: usize, sets: &[FixedBitSet], weights: &[f64], usable: Vec<usize>) -> (Vec<FixedBitSet>, Vec<usize>) {
    let mut cols = usable;
    let mut elements: Vec<usize> = (0..universe).collect();
    loop {
        let sigs: Vec<FixedBitSet> = elements
            .iter()
            .map(|&e| {
                let mut sig = FixedBitSet::with_capacity(cols.len());
                cols.iter().enumerate().filter(|(_, &s)| sets[s].contains(e)).for_each(|(j, _)| sig.insert(j));
                sig
            })
            .collect();
        let mut keep = Vec::new();
        for (i, sig) in sigs.iter().enumerate() {
            let redundant = sigs.iter().enumerate().any(|(j, other)| {
                j != i && other.is_subset(sig) && (other != sig || j < i)
            });
            if !redundant {
                keep.push(elements[i]);
            }
        }
        let projected: Vec<FixedBitSet> = cols
            .iter()
            .map(|&s| {
                let mut p = FixedBitSet::with_capacity(keep.len());
                keep.iter().enumerate().filter(|(_, &e)| sets[s].contains(e)).for_each(|(k, _)| p.insert(k));
                p
            })
            .collect();
        let col_weights: Vec<f64> = cols.iter().map(|&s| weights[s]).collect();
        let survivors = reduce(&projected, &col_weights);
        if survivors.len() == cols.len() && keep.len() == elements.len() {
            return (survivors.into_iter().map(|j| projected[j].clone()).collect(), cols);
        }
        cols = survivors.into_iter().map(|j| cols[j]).collect();
        elements = keep;
    }
}

/// Minimum total weight of a subfamily covering `0..universe`.
///
/// Panics if the sets do not cover the universe or a weight is not positive.
pub fn min_weight_set_cover(
    universe: usize,
    sets: &[FixedBitSet],
    weights: &[f64],
    mode: SolverMode,
    budget: u64,
) -> CoverSolution {
    assert_eq!(sets.len(), weights.len());
    assert!(weights.iter().all(|&w| w > 0.0 && w.is_finite()), "weights must be positive");
    if mode == SolverMode::Exact && universe > 0 {
        let runs: Option<Vec<(usize, usize)>> = sets.iter().map(|s| cyclic_run(s, universe)).collect();
        if let Some((chosen, weight)) = runs.and_then(|r| circular_arc_cover(universe, &r, weights)) {
            return CoverSolution { chosen, weight, bound: BoundDirection::Exact, exhausted: false };
        }
    }
    let usable = reduce(sets, weights);
    let (g_choice, g_weight) = greedy(universe, sets, weights, &usable);
    if mode == SolverMode::Greedy {
        return CoverSolution { chosen: g_choice, weight: g_weight, bound: BoundDirection::Upper, exhausted: false };
    }
    let (projected, cols) = shrink(universe, sets, weights, usable);
    let col_weights: Vec<f64> = cols.iter().map(|&s| weights[s]).collect();
    let elements = projected.first().map_or(0, |p| p.len());
    let mut by_element = vec![Vec::new(); elements];
    for (j, p) in projected.iter().enumerate() {
        for e in p.ones() {
            by_element[e].push(j);
        }
    }
    let mut search = Search {
        sets: &projected,
        weights: &col_weights,
        by_element,
        best: g_weight,
        best_choice: Vec::new(),
        nodes: 0,
        budget,
    };
    let mut uncovered = FixedBitSet::with_capacity(elements);
    uncovered.insert_range(..);
    let mut banned = FixedBitSet::with_capacity(projected.len());
    let complete = search.run(&uncovered, &mut banned, 0.0, &mut Vec::new(), None);
    // An empty choice means greedy was never beaten.
    let mut chosen = if search.best < g_weight {
        search.best_choice.iter().map(|&j| cols[j]).collect()
    } else {
        g_choice
    };
    chosen.sort_unstable();
    CoverSolution {
        chosen,
        weight: search.best,
        bound: if complete { BoundDirection::Exact } else { BoundDirection::Upper },
        exhausted: !complete,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(universe: usize, items: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(universe);
        items.iter().for_each(|&i| s.insert(i));
        s
    }

    fn brute(universe: usize, sets: &[FixedBitSet], weights: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << sets.len()) {
            let mut u = FixedBitSet::with_capacity(universe);
            let mut w = 0.0;
            for (i, s) in sets.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    u.union_with(s);
                    w += weights[i];
                }
            }
            if u.count_ones(..) == universe {
                best = best.min(w);
            }
        }
        best
    }

    #[test]
    fn greedy_is_beaten_by_exact() {
        // Classic instance where greedy picks the big set first.
        let sets = vec![set(6, &[0, 1, 2, 3]), set(6, &[0, 1, 4]), set(6, &[2, 3, 5])];
        let w = vec![1.0, 1.0, 1.0];
        let g = min_weight_set_cover(6, &sets, &w, SolverMode::Greedy, DEFAULT_BUDGET);
        let e = min_weight_set_cover(6, &sets, &w, SolverMode::Exact, DEFAULT_BUDGET);
        assert_eq!(g.weight, 3.0);
        assert_eq!(g.bound, BoundDirection::Upper);
        assert_eq!(e.weight, 2.0);
        assert_eq!(e.chosen, vec![1, 2]);
        assert_eq!(e.bound, BoundDirection::Exact);
    }

    #[test]
    fn exhausted_budget_falls_back_to_upper_bound() {
        let sets = vec![set(6, &[0, 1, 2, 3]), set(6, &[0, 1, 4]), set(6, &[2, 3, 5])];
        let w = vec![1.0, 1.0, 1.0];
        let r = min_weight_set_cover(6, &sets, &w, SolverMode::Exact, 0);
        assert!(r.exhausted);
        assert_eq!(r.bound, BoundDirection::Upper);
        assert_eq!(r.weight, 3.0);
    }

    #[test]
    fn matches_brute_force_on_small_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let universe = rng.gen_range(1..9);
            let m = rng.gen_range(1..10);
            let mut sets: Vec<FixedBitSet> = (0..m)
                .map(|_| {
                    let items: Vec<usize> = (0..universe).filter(|_| rng.gen_bool(0.4)).collect();
                    set(universe, &items)
                })
                .collect();
            for e in 0..universe {
                let k = rng.gen_range(0..m);
                sets[k].insert(e);
            }
            let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..3.0)).collect();
            let r = min_weight_set_cover(universe, &sets, &w, SolverMode::Exact, DEFAULT_BUDGET);
            assert!((r.weight - brute(universe, &sets, &w)).abs() < 1e-12);
            let mut u = FixedBitSet::with_capacity(universe);
            r.chosen.iter().for_each(|&i| u.union_with(&sets[i]));
            assert_eq!(u.count_ones(..), universe);
        }
    }
}
