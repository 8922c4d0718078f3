//! Maximum-weight independent sets on Bowen conflict graphs.
//!
//! Components are solved separately. Cliques take their heaviest vertex.
//! Other components run branch and bound over vertices in descending
//! weight order, bounded by a greedy clique cover of the candidates.

use fixedbitset::FixedBitSet;

use crate::cover_algebra::{BoundDirection, SolverMode};

#[derive(Clone, Debug, PartialEq)]
pub struct IndependentSet {
    /// Vertex ids, ascending.
    pub vertices: Vec<usize>,
    pub weight: f64,
    pub bound: BoundDirection,
    /// True when an exact search was requested but ran out of budget.
    pub exhausted: bool,
}

fn components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for start in 0..adj.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut i = 0;
        while i < comp.len() {
            for &y in &adj[comp[i]] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Heaviest first, ties by id.
fn weight_order(vertices: &[usize], weights: &[f64]) -> Vec<usize> {
    let mut order = vertices.to_vec();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    order
}

fn greedy(order: &[usize], adj: &[Vec<usize>], taken: &mut [bool]) -> Vec<usize> {
    let mut out = Vec::new();
    for &v in order {
        if adj[v].iter().all(|&u| !taken[u]) {
            taken[v] = true;
            out.push(v);
        }
    }
    out
}

struct Search {
    adj: Vec<FixedBitSet>,
    w: Vec<f64>,
    best: f64,
    best_set: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search {
    fn clique_cover_bound(&self, cand: &FixedBitSet) -> f64 {
        // Each clique keeps the common neighbourhood of its members.
        let mut cliques: Vec<(f64, FixedBitSet)> = Vec::new();
        for v in cand.ones() {
            match cliques.iter_mut().find(|(_, common)| common.contains(v)) {
                Some((_, common)) => common.intersect_with(&self.adj[v]),
                None => cliques.push((self.w[v], self.adj[v].clone())),
            }
        }
        cliques.iter().map(|(w, _)| w).sum()
    }

    fn expand(&mut self, cand: &FixedBitSet, cur_w: f64, cur: &mut Vec<usize>) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        let v = match cand.ones().next() {
            Some(v) => v,
            None => {
                if cur_w > self.best {
                    self.best = cur_w;
                    self.best_set = cur.clone();
                }
                return true;
            }
        };
        if cur_w + self.clique_cover_bound(cand) <= self.best {
            return true;
        }
        let mut with_v = cand.clone();
        with_v.difference_with(&self.adj[v]);
        with_v.set(v, false);
        cur.push(v);
        let ok = self.expand(&with_v, cur_w + self.w[v], cur);
        cur.pop();
        if !ok {
            return false;
        }
        let mut without_v = cand.clone();
        without_v.set(v, false);
        self.expand(&without_v, cur_w, cur)
    }
}

/// Upper bound for the maximum independent-set weight: a greedy clique
/// cover in descending weight order, each clique charged its heaviest
/// vertex.
pub fn independent_set_upper_bound(adj: &[Vec<usize>], weights: &[f64]) -> f64 {
    let mut local = vec![0usize; adj.len()];
    let mut total = 0.0;
    for comp in components(adj) {
        comp.iter().enumerate().for_each(|(i, &v)| local[v] = i);
        let mut cliques: Vec<(f64, FixedBitSet)> = Vec::new();
        for v in weight_order(&comp, weights) {
            let mut nb = FixedBitSet::with_capacity(comp.len());
            adj[v].iter().for_each(|&u| nb.insert(local[u]));
            match cliques.iter_mut().find(|(_, common)| common.contains(local[v])) {
                Some((_, common)) => common.intersect_with(&nb),
                None => cliques.push((weights[v], nb)),
            }
        }
        total += cliques.iter().map(|(w, _)| w).sum::<f64>();
    }
    total
}

/// Maximum total weight of a set of pairwise non-adjacent vertices.
///
/// `adj` must be symmetric and loop-free; weights must be positive.
pub fn max_weight_independent_set(adj: &[Vec<usize>], weights: &[f64], mode: SolverMode, budget: u64) -> IndependentSet {
    assert_eq!(adj.len(), weights.len());
    let mut chosen = Vec::new();
    let mut all_exact = true;
    let mut exhausted = false;
    let mut nodes = 0u64;
    let mut taken = vec![false; adj.len()];
    for comp in components(adj) {
        let order = weight_order(&comp, weights);
        if comp.len() == 1 || comp.iter().all(|&v| adj[v].len() == comp.len() - 1) {
            chosen.push(order[0]);
            continue;
        }
        let g = greedy(&order, adj, &mut taken);
        if mode == SolverMode::Greedy || exhausted {
            all_exact = false;
            chosen.extend(g);
            continue;
        }
        // Local ids follow the weight order.
        let mut local = vec![usize::MAX; adj.len()];
        for (i, &v) in order.iter().enumerate() {
            local[v] = i;
        }
        let adj_local: Vec<FixedBitSet> = order
            .iter()
            .map(|&v| {
                let mut s = FixedBitSet::with_capacity(order.len());
                adj[v].iter().for_each(|&u| s.insert(local[u]));
                s
            })
            .collect();
        let g_weight: f64 = g.iter().map(|&v| weights[v]).sum();
        let mut search = Search {
            adj: adj_local,
            w: order.iter().map(|&v| weights[v]).collect(),
            best: g_weight,
            best_set: g.iter().map(|&v| local[v]).collect(),
            nodes: 0,
            budget: budget.saturating_sub(nodes),
        };
        let mut cand = FixedBitSet::with_capacity(order.len());
        cand.insert_range(..);
        let ok = search.expand(&cand, 0.0, &mut Vec::new());
        nodes += search.nodes;
        if !ok {
            exhausted = true;
            all_exact = false;
        }
        chosen.extend(search.best_set.iter().map(|&i| order[i]));
    }
    chosen.sort_unstable();
    let weight = chosen.iter().map(|&v| weights[v]).sum();
    IndependentSet {
        vertices: chosen,
        weight,
        bound: if all_exact { BoundDirection::Exact } else { BoundDirection::Lower },
        exhausted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute(adj: &[Vec<usize>], w: &[f64]) -> f64 {
        let n = adj.len();
        (0u32..1 << n)
            .filter(|mask| (0..n).all(|v| mask >> v & 1 == 0 || adj[v].iter().all(|&u| mask >> u & 1 == 0)))
            .map(|mask| (0..n).filter(|v| mask >> v & 1 == 1).map(|v| w[v]).sum::<f64>())
            .fold(0.0, f64::max)
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rng.gen_range(1..12);
            let mut adj = vec![Vec::new(); n];
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(0.35) {
                        adj[a].push(b);
                        adj[b].push(a);
                    }
                }
            }
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..4.0)).collect();
            let r = max_weight_independent_set(&adj, &w, SolverMode::Exact, 1 << 24);
            assert_eq!(r.bound, BoundDirection::Exact);
            assert!((r.weight - brute(&adj, &w)).abs() < 1e-12);
            let g = max_weight_independent_set(&adj, &w, SolverMode::Greedy, 1 << 24);
            assert!(g.weight <= r.weight + 1e-12);
            for &v in &r.vertices {
                assert!(adj[v].iter().all(|u| !r.vertices.contains(u)));
            }
        }
    }

    #[test]
    fn path_beats_greedy() {
        // Greedy takes the heavy middle vertex; the two ends are better.
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let w = vec![2.0, 3.0, 2.0];
        let e = max_weight_independent_set(&adj, &w, SolverMode::Exact, 1 << 24);
        assert_eq!(e.vertices, vec![0, 2]);
        let g = max_weight_independent_set(&adj, &w, SolverMode::Greedy, 1 << 24);
        assert_eq!(g.weight, 3.0);
        assert_eq!(g.bound, BoundDirection::Lower);
    }
}
