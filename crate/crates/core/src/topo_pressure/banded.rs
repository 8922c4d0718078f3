//! Exact solvers for conflict graphs of small circular bandwidth: every
//! edge joins vertices at most `w` apart in a given cyclic order. Bowen
//! graphs of expanding circle maps have this shape.
//!
//! Both solvers fix the choices on an initial block of ranks, then sweep the
//! remaining ranks with the choices on the last `w` (independent sets) or
//! `2w` (dominating sets) ranks as state; the wrap-around is checked
//! against the fixed block.

/// Largest bandwidth handled by [`banded_independent_set`].
pub const MAX_INDEPENDENT_BAND: usize = 6;
/// Largest bandwidth handled by [`banded_dominating_set`].
pub const MAX_DOMINATING_BAND: usize = 3;

/// A cyclic vertex order and the bandwidth of a graph under it.
#[derive(Clone, Debug)]
pub struct Band {
    order: Vec<usize>,
    /// Closed neighbourhoods as sorted ranks.
    closed: Vec<Vec<usize>>,
    w: usize,
}

impl Band {
    /// `None` if `order` is not a permutation of the vertices.
    pub fn new(adj: &[Vec<usize>], order: &[usize]) -> Option<Band> {
        let n = adj.len();
        if order.len() != n {
            return None;
        }
        let mut rank = vec![usize::MAX; n];
        for (r, &v) in order.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return None;
            }
            rank[v] = r;
        }
        let mut w = 0;
        let closed = order
            .iter()
            .enumerate()
            .map(|(r, &v)| {
                let mut ranks: Vec<usize> = adj[v].iter().map(|&u| rank[u]).collect();
                for &s in &ranks {
                    let d = r.abs_diff(s);
                    w = w.max(d.min(n - d));
                }
                ranks.push(r);
                ranks.sort_unstable();
                ranks
            })
            .collect();
        Some(Band { order: order.to_vec(), closed, w })
    }

    pub fn width(&self) -> usize {
        self.w
    }

    fn len(&self) -> usize {
        self.order.len()
    }

    /// Whether ranks `a` and `b` are equal or adjacent.
    fn touches(&self, a: usize, b: usize) -> bool {
        self.closed[a].binary_search(&b).is_ok()
    }
}

fn rank_weights(band: &Band, weights: &[f64]) -> Vec<f64> {
    band.order.iter().map(|&v| weights[v]).collect()
}

struct IndependentSweep<'a> {
    band: &'a Band,
    w: Vec<f64>,
    /// Bit `k`: adjacency with rank `r - 1 - k`.
    back: Vec<u32>,
    /// Bit `j`: adjacency with rank `j` of the initial block.
    front: Vec<u32>,
}

impl IndependentSweep<'_> {
    fn run(&self, first: u32, trace: bool) -> (f64, Vec<usize>) {
        let b = self.band.w;
        let n = self.band.len();
        let mask = (1u32 << b) - 1;
        let states = 1usize << b;
        let mut best = vec![f64::NEG_INFINITY; states];
        let init = (0..b).filter(|&j| first >> j & 1 == 1).fold(0u32, |s, j| s | 1 << (b - 1 - j));
        best[init as usize] = (0..b).filter(|&j| first >> j & 1 == 1).map(|j| self.w[j]).sum();
        let mut parents: Vec<Vec<(u32, bool)>> = Vec::new();
        for r in b..n {
            let mut next = vec![f64::NEG_INFINITY; states];
            let mut par = vec![(0u32, false); if trace { states } else { 0 }];
            let wraps = r + b >= n;
            for s in 0..states {
                let v = best[s];
                if v == f64::NEG_INFINITY {
                    continue;
                }
                let skip = ((s as u32) << 1) & mask;
                if v > next[skip as usize] {
                    next[skip as usize] = v;
                    if trace {
                        par[skip as usize] = (s as u32, false);
                    }
                }
                let free = self.back[r] & s as u32 == 0 && (!wraps || self.front[r] & first == 0);
                if free {
                    let take = (((s as u32) << 1) | 1) & mask;
                    let tv = v + self.w[r];
                    if tv > next[take as usize] {
                        next[take as usize] = tv;
                        if trace {
                            par[take as usize] = (s as u32, true);
                        }
                    }
                }
            }
            best = next;
            if trace {
                parents.push(par);
            }
        }
        let (mut s, value) = best
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |acc, (s, &v)| if v > acc.1 { (s, v) } else { acc });
        let mut ranks = Vec::new();
        if trace {
            for (i, par) in parents.iter().enumerate().rev() {
                let (prev, took) = par[s];
                if took {
                    ranks.push(b + i);
                }
                s = prev as usize;
            }
            ranks.extend((0..b).filter(|&j| first >> j & 1 == 1));
        }
        (value, ranks)
    }
}

/// Maximum-weight independent set, or `None` when the band is too wide or
/// the cycle too short for the sweep.
pub fn banded_independent_set(adj: &[Vec<usize>], weights: &[f64], band: &Band) -> Option<(Vec<usize>, f64)> {
    let (n, b) = (band.len(), band.w);
    if b > MAX_INDEPENDENT_BAND || n <= 3 * b + 1 || weights.len() != adj.len() {
        return None;
    }
    if b == 0 {
        let all: Vec<usize> = (0..n).collect();
        return Some((all, weights.iter().sum()));
    }
    let back = (0..n)
        .map(|r| (0..b).filter(|&k| r > k && band.touches(r, r - 1 - k)).fold(0u32, |m, k| m | 1 << k))
        .collect();
    let front = (0..n).map(|r| (0..b).filter(|&j| band.touches(r, j)).fold(0u32, |m, j| m | 1 << j)).collect();
    let sweep = IndependentSweep { band, w: rank_weights(band, weights), back, front };
    let independent = |first: u32| {
        (0..b).all(|i| first >> i & 1 == 0 || (i + 1..b).all(|j| first >> j & 1 == 0 || !band.touches(i, j)))
    };
    let mut best: Option<(u32, f64)> = None;
    for first in (0..1u32 << b).filter(|&f| independent(f)) {
        let (v, _) = sweep.run(first, false);
        if best.map_or(true, |(_, bv)| v > bv) {
            best = Some((first, v));
        }
    }
    let (first, _) = best?;
    let (value, ranks) = sweep.run(first, true);
    let mut vertices: Vec<usize> = ranks.into_iter().map(|r| band.order[r]).collect();
    vertices.sort_unstable();
    Some((vertices, value))
}

/// Minimum-weight set whose closed neighbourhoods cover every vertex, or
/// `None` when the band is too wide or the cycle too short.
pub fn banded_dominating_set(adj: &[Vec<usize>], weights: &[f64], band: &Band) -> Option<(Vec<usize>, f64)> {
    let (n, b) = (band.len(), band.w);
    if b > MAX_DOMINATING_BAND || n <= 4 * b + 1 || weights.len() != adj.len() {
        return None;
    }
    if b == 0 {
        let all: Vec<usize> = (0..n).collect();
        return Some((all, weights.iter().sum()));
    }
    let w = rank_weights(band, weights);
    let wb = 2 * b;
    let mask = (1u32 << wb) - 1;
    let states = 1usize << wb;
    // Bit k of `dom[v]`: rank v + b - k touches v.
    let dom: Vec<u32> = (0..n)
        .map(|v| (0..=wb).filter(|&k| v + b >= k && v + b - k < n && band.touches(v, v + b - k)).fold(0u32, |m, k| m | 1 << k))
        .collect();
    let edge: Vec<usize> = (n - b..n).chain(0..b).collect();
    let run = |first: u32, trace: bool| -> (f64, Vec<usize>) {
        let mut best = vec![f64::INFINITY; states];
        let init = (0..wb).filter(|&j| first >> j & 1 == 1).fold(0u32, |s, j| s | 1 << (wb - 1 - j));
        best[init as usize] = (0..wb).filter(|&j| first >> j & 1 == 1).map(|j| w[j]).sum();
        let mut parents: Vec<Vec<(u32, bool)>> = Vec::new();
        for r in wb..n {
            let mut next = vec![f64::INFINITY; states];
            let mut par = vec![(0u32, false); if trace { states } else { 0 }];
            let v = r - b;
            for s in 0..states {
                let cur = best[s];
                if cur == f64::INFINITY {
                    continue;
                }
                for c in [false, true] {
                    let window = ((s as u32) << 1) | c as u32;
                    if window & dom[v] == 0 {
                        continue;
                    }
                    let ns = (window & mask) as usize;
                    let val = cur + if c { w[r] } else { 0.0 };
                    if val < next[ns] {
                        next[ns] = val;
                        if trace {
                            par[ns] = (s as u32, c);
                        }
                    }
                }
            }
            best = next;
            if trace {
                parents.push(par);
            }
        }
        // Remaining vertices near the seam see the last 2b ranks and the block.
        let chosen = |s: usize, r: usize| -> bool {
            if r < wb {
                first >> r & 1 == 1
            } else {
                (s >> (n - 1 - r)) & 1 == 1
            }
        };
        let mut end = (usize::MAX, f64::INFINITY);
        for (s, &cur) in best.iter().enumerate() {
            if cur < end.1
                && edge.iter().all(|&v| (0..=wb).any(|d| chosen(s, (v + n + d - b) % n) && band.touches(v, (v + n + d - b) % n)))
            {
                end = (s, cur);
            }
        }
        let mut ranks = Vec::new();
        if trace && end.0 != usize::MAX {
            let mut s = end.0;
            for (i, par) in parents.iter().enumerate().rev() {
                let (prev, took) = par[s];
                if took {
                    ranks.push(wb + i);
                }
                s = prev as usize;
            }
            ranks.extend((0..wb).filter(|&j| first >> j & 1 == 1));
        }
        (end.1, ranks)
    };
    let mut best: Option<(u32, f64)> = None;
    for first in 0..1u32 << wb {
        let (v, _) = run(first, false);
        if v < f64::INFINITY && best.map_or(true, |(_, bv)| v < bv) {
            best = Some((first, v));
        }
    }
    let (first, _) = best?;
    let (value, ranks) = run(first, true);
    let mut vertices: Vec<usize> = ranks.into_iter().map(|r| band.order[r]).collect();
    vertices.sort_unstable();
    Some((vertices, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover_algebra::{min_weight_set_cover, SolverMode, DEFAULT_BUDGET};
    use crate::topo_pressure::max_weight_independent_set;
    use fixedbitset::FixedBitSet;
    use rand::{Rng, SeedableRng};

    /// Random graph of circular bandwidth at most `b` on a shuffled order.
    fn random_band(rng: &mut impl Rng, n: usize, b: usize) -> (Vec<Vec<usize>>, Vec<usize>, Vec<f64>) {
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut adj = vec![Vec::new(); n];
        for r in 0..n {
            for d in 1..=b {
                if rng.gen_bool(0.6) {
                    let (u, v) = (order[r], order[(r + d) % n]);
                    if u != v && !adj[u].contains(&v) {
                        adj[u].push(v);
                        adj[v].push(u);
                    }
                }
            }
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        let w = (0..n).map(|_| rng.gen_range(0.5..3.0)).collect();
        (adj, order, w)
    }

    #[test]
    fn independent_set_matches_branch_and_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let b = rng.gen_range(1..=3);
            let n = rng.gen_range(3 * b + 2..28);
            let (adj, order, w) = random_band(&mut rng, n, b);
            let band = Band::new(&adj, &order).unwrap();
            let Some((set, value)) = banded_independent_set(&adj, &w, &band) else { continue };
            let exact = max_weight_independent_set(&adj, &w, SolverMode::Exact, DEFAULT_BUDGET);
            assert!((value - exact.weight).abs() < 1e-9, "{value} vs {}", exact.weight);
            assert!((set.iter().map(|&v| w[v]).sum::<f64>() - value).abs() < 1e-9);
            assert!(set.iter().all(|&u| set.iter().all(|&v| !adj[u].contains(&v))));
        }
    }

    #[test]
    fn dominating_set_matches_branch_and_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let b = rng.gen_range(1..=2);
            let n = rng.gen_range(4 * b + 2..24);
            let (adj, order, w) = random_band(&mut rng, n, b);
            let band = Band::new(&adj, &order).unwrap();
            let Some((set, value)) = banded_dominating_set(&adj, &w, &band) else { continue };
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
            assert!((0..n).all(|v| set.contains(&v) || adj[v].iter().any(|u| set.contains(u))));
        }
    }
}
