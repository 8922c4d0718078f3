//! Exact solvers for graphs whose closed neighbourhoods are runs of
//! consecutive vertices in a cyclic order. Bowen graphs of expanding circle
//! maps are of this kind at every `n`.
//!
//! With contiguous neighbourhoods a cyclically ordered vertex set is
//! independent iff cyclically consecutive members are non-adjacent, and a
//! vertex set dominates iff its neighbourhood arcs cover the circle. Both
//! problems are cut open at a vertex of a smallest neighbourhood: every
//! maximal independent set meets it, and every cover contains an arc
//! through it.

use crate::cover_algebra::arc_cover::circular_arc_cover;

/// Neighbourhood arcs: `N[v] = [r - back, r + fwd]` around the rank `r` of `v`.
#[derive(Clone, Debug)]
pub struct Arcs {
    order: Vec<usize>,
    back: Vec<usize>,
    fwd: Vec<usize>,
}

impl Arcs {
    /// `None` unless every closed neighbourhood is a contiguous run around
    /// its vertex in `order`.
    pub fn new(adj: &[Vec<usize>], order: &[usize]) -> Option<Arcs> {
        let n = adj.len();
        if order.len() != n || n == 0 {
            return None;
        }
        let mut rank = vec![usize::MAX; n];
        for (r, &v) in order.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return None;
            }
            rank[v] = r;
        }
        let mut back = vec![0; n];
        let mut fwd = vec![0; n];
        let mut mark = vec![usize::MAX; n];
        for (r, &v) in order.iter().enumerate() {
            let d = adj[v].len();
            for &u in &adj[v] {
                mark[rank[u]] = r;
            }
            if d >= n - 1 {
                fwd[r] = n - 1;
                continue;
            }
            let mut b = 0;
            while b < d && mark[(r + n - 1 - b) % n] == r {
                b += 1;
            }
            let mut f = 0;
            while f < d && mark[(r + 1 + f) % n] == r {
                f += 1;
            }
            if b + f < d {
                return None;
            }
            // Overlapping runs only happen when the neighbourhood is everything.
            back[r] = b.min(d);
            fwd[r] = d - back[r];
        }
        Some(Arcs { order: order.to_vec(), back, fwd })
    }

    fn len(&self) -> usize {
        self.order.len()
    }

    /// Whether ranks `a` and `b` are equal or adjacent.
    fn touches(&self, a: usize, b: usize) -> bool {
        let n = self.len();
        let ahead = (b + n - a) % n;
        ahead == 0 || ahead <= self.fwd[a] || n - ahead <= self.back[a]
    }

    fn pivot(&self) -> usize {
        (0..self.len()).min_by_key(|&r| (self.back[r] + self.fwd[r], r)).expect("nonempty")
    }

    /// Ranks of the closed neighbourhood of rank `r`, starting at its back end.
    fn closed(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        let n = self.len();
        let start = (r + n - self.back[r]) % n;
        (0..(self.back[r] + self.fwd[r] + 1).min(n)).map(move |i| (start + i) % n)
    }
}

/// Max-segment tree over `(value, index)`, ties to the smaller index.
struct MaxTree {
    size: usize,
    data: Vec<(f64, usize)>,
}

impl MaxTree {
    fn new(n: usize) -> Self {
        let size = n.next_power_of_two();
        Self { size, data: vec![(f64::NEG_INFINITY, usize::MAX); 2 * size] }
    }

    fn better(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    }

    fn set(&mut self, i: usize, v: f64) {
        let mut p = i + self.size;
        self.data[p] = (v, i);
        while p > 1 {
            p /= 2;
            self.data[p] = Self::better(self.data[2 * p], self.data[2 * p + 1]);
        }
    }

    /// Best over `lo..hi`.
    fn query(&self, lo: usize, hi: usize) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        let (mut l, mut r) = (lo + self.size, hi + self.size);
        while l < r {
            if l & 1 == 1 {
                best = Self::better(best, self.data[l]);
                l += 1;
            }
            if r & 1 == 1 {
                r -= 1;
                best = Self::better(best, self.data[r]);
            }
            l /= 2;
            r /= 2;
        }
        best
    }
}

/// Maximum-weight independent set; weights must be positive.
pub fn arc_independent_set(weights: &[f64], arcs: &Arcs) -> (Vec<usize>, f64) {
    let n = arcs.len();
    let w: Vec<f64> = arcs.order.iter().map(|&v| weights[v]).collect();
    let mut best: (f64, Vec<usize>) = (f64::NEG_INFINITY, Vec::new());
    for t in arcs.closed(arcs.pivot()) {
        // Linear index i stands for rank (t + i) mod n; t is chosen first.
        let rank = |i: usize| (t + i) % n;
        let mut tree = MaxTree::new(n);
        let mut value = vec![f64::NEG_INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        value[0] = w[t];
        tree.set(0, w[t]);
        for i in 1..n {
            let r = rank(i);
            // Predecessors j < i not adjacent to i: i - j > back, n - (i - j) > fwd.
            let hi = i.saturating_sub(arcs.back[r]);
            let lo = (i + arcs.fwd[r] + 1).saturating_sub(n);
            if lo >= hi {
                continue;
            }
            let (v, j) = tree.query(lo, hi);
            if v > f64::NEG_INFINITY {
                value[i] = v + w[r];
                pred[i] = j;
                tree.set(i, value[i]);
            }
        }
        let mut end = (value[0], 0);
        for i in 1..n {
            if value[i] > end.0 && !arcs.touches(rank(i), t) {
                end = (value[i], i);
            }
        }
        if end.0 > best.0 {
            let mut ranks = Vec::new();
            let mut i = end.1;
            loop {
                ranks.push(rank(i));
                if i == 0 {
                    break;
                }
                i = pred[i];
            }
            best = (end.0, ranks);
        }
    }
    let mut vertices: Vec<usize> = best.1.into_iter().map(|r| arcs.order[r]).collect();
    vertices.sort_unstable();
    (vertices, best.0)
}

/// Minimum-weight dominating set; weights must be positive.
pub fn arc_dominating_set(weights: &[f64], arcs: &Arcs) -> (Vec<usize>, f64) {
    let n = arcs.len();
    let w: Vec<f64> = arcs.order.iter().map(|&v| weights[v]).collect();
    let runs: Vec<(usize, usize)> =
        (0..n).map(|r| ((r + n - arcs.back[r]) % n, (arcs.back[r] + arcs.fwd[r] + 1).min(n))).collect();
    let (ranks, value) = circular_arc_cover(n, &runs, &w).expect("closed neighbourhoods cover every vertex");
    let mut vertices: Vec<usize> = ranks.into_iter().map(|r| arcs.order[r]).collect();
    vertices.sort_unstable();
    (vertices, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover_algebra::{min_weight_set_cover, SolverMode, DEFAULT_BUDGET};
    use crate::topo_pressure::max_weight_independent_set;
    use fixedbitset::FixedBitSet;
    use rand::{Rng, SeedableRng};

    /// Points on a circle, adjacent when closer than `delta`.
    fn window_graph(rng: &mut impl Rng, n: usize) -> (Vec<Vec<usize>>, Vec<usize>, Vec<f64>) {
        let coords: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let delta = rng.gen_range(0.02..0.6);
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| {
                        let g = (coords[x] - coords[y]).abs();
                        y != x && g.min(1.0 - g) < delta
                    })
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| coords[a].total_cmp(&coords[b]));
        let w = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
        (adj, order, w)
    }

    #[test]
    fn independent_set_matches_branch_and_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let n = rng.gen_range(1..22);
            let (adj, order, w) = window_graph(&mut rng, n);
            let arcs = Arcs::new(&adj, &order).expect("window graphs have contiguous neighbourhoods");
            let (set, value) = arc_independent_set(&w, &arcs);
            let exact = max_weight_independent_set(&adj, &w, SolverMode::Exact, DEFAULT_BUDGET);
            assert!((value - exact.weight).abs() < 1e-9, "{value} vs {}", exact.weight);
            assert!((set.iter().map(|&v| w[v]).sum::<f64>() - value).abs() < 1e-9);
            assert!(set.iter().all(|&u| set.iter().all(|&v| !adj[u].contains(&v))));
        }
    }

    #[test]
    fn dominating_set_matches_branch_and_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        for _ in 0..300 {
            let n = rng.gen_range(1..20);
            let (adj, order, w) = window_graph(&mut rng, n);
            let arcs = Arcs::new(&adj, &order).unwrap();
            let (set, value) = arc_dominating_set(&w, &arcs);
            let sets: Vec<FixedBitSet> = (0..n)
                .map(|x| {
                    let mut s = FixedBitSet::with_capacity(n);
                    s.insert(x);
                    adj[x].iter().for_each(|&y| s.insert(y));
                    s
                })
                .collect();
            let exact = min_weight_set_cover(n, &sets, &w, SolverMode::Exact, DEFAULT_BUDGET);
            assert!((value - exact.weight).abs() < 1e-9, "{value} vs {}", exact.weight);
            assert!((set.iter().map(|&v| w[v]).sum::<f64>() - value).abs() < 1e-9);
            assert!((0..n).all(|v| set.contains(&v) || adj[v].iter().any(|u| set.contains(u))));
        }
    }

    #[test]
    fn non_contiguous_neighbourhoods_are_rejected() {
        // A 5-cycle listed as 0, 2, 4, 1, 3 splits every neighbourhood.
        let adj: Vec<Vec<usize>> = (0..5).map(|v| vec![(v + 1) % 5, (v + 4) % 5]).collect();
        assert!(Arcs::new(&adj, &[0, 2, 4, 1, 3]).is_none());
        assert!(Arcs::new(&adj, &[0, 1, 2, 3, 4]).is_some());
    }
}
