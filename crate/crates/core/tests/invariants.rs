//! Randomised invariants. Solvers are judged against exhaustive search on
//! instances small enough to enumerate.

use fixedbitset::FixedBitSet;
use proptest::prelude::*;

use pressure_core::cover_algebra::arc_cover::circular_arc_cover;
use pressure_core::cover_algebra::{iterate_cover, join, min_weight_set_cover, refines, Cover, SolverMode, DEFAULT_BUDGET};
use pressure_core::systems::{doubling_scaffold, symbolic_scaffold, Scaffold, Subshift};
use pressure_core::topo_pressure::{cover_levels, max_weight_independent_set, separated_sets};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn bitset(n: usize, mask: u32) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    (0..n).filter(|i| mask >> i & 1 == 1).for_each(|i| b.insert(i));
    b
}

fn brute_cover(n: usize, sets: &[FixedBitSet], weights: &[f64]) -> Option<f64> {
    let full = (1u32 << n) - 1;
    let masks: Vec<u32> = sets.iter().map(|s| s.ones().fold(0, |m, i| m | 1 << i)).collect();
    (0u32..1 << sets.len())
        .filter(|pick| (0..sets.len()).filter(|j| pick >> j & 1 == 1).fold(0, |m, j| m | masks[j]) == full)
        .map(|pick| (0..sets.len()).filter(|j| pick >> j & 1 == 1).map(|j| weights[j]).sum::<f64>())
        .min_by(f64::total_cmp)
}

fn covers(n: usize, sets: &[FixedBitSet], chosen: &[usize]) -> bool {
    let mut u = FixedBitSet::with_capacity(n);
    chosen.iter().for_each(|&j| u.union_with(&sets[j]));
    u.count_ones(..) == n
}

/// Random family on `0..n` patched so that it covers.
fn family(max_n: usize, max_sets: usize) -> impl Strategy<Value = (usize, Vec<FixedBitSet>, Vec<f64>)> {
    (1usize..=max_n).prop_flat_map(move |n| {
        let sets = prop::collection::vec(1u32..(1 << n), 1..max_sets);
        let weights = prop::collection::vec(0.1f64..5.0, max_sets);
        (Just(n), sets, weights).prop_map(|(n, masks, w)| {
            let mut sets: Vec<FixedBitSet> = masks.iter().map(|&m| bitset(n, m)).collect();
            let mut seen = FixedBitSet::with_capacity(n);
            sets.iter().for_each(|s| seen.union_with(s));
            if seen.count_ones(..) < n {
                seen.toggle_range(..);
                sets.push(seen);
            }
            let w = w[..sets.len()].to_vec();
            (n, sets, w)
        })
    })
}

fn arcs() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<f64>)> {
    (1usize..=12).prop_flat_map(|n| {
        let arc = (0..n, 1..=n);
        (Just(n), prop::collection::vec(arc, 1..=10), prop::collection::vec(0.1f64..5.0, 10))
            .prop_map(|(n, a, w)| {
                let k = a.len();
                (n, a, w[..k].to_vec())
            })
    })
}

fn arc_set(n: usize, (start, len): (usize, usize)) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    (0..len).for_each(|i| b.insert((start + i) % n));
    b
}

fn graph() -> impl Strategy<Value = (Vec<Vec<usize>>, Vec<f64>)> {
    (1usize..=12).prop_flat_map(|n| {
        (prop::collection::vec(any::<bool>(), n * n), prop::collection::vec(0.1f64..5.0, n)).prop_map(move |(e, w)| {
            let mut adj = vec![Vec::new(); n];
            for i in 0..n {
                for j in i + 1..n {
                    if e[i * n + j] {
                        adj[i].push(j);
                        adj[j].push(i);
                    }
                }
            }
            (adj, w)
        })
    })
}

fn shift_scaffold() -> Scaffold {
    symbolic_scaffold(&Subshift::full(2), 5).unwrap()
}

/// A labelling into `k` cells plus a few extra overlapping members.
fn random_cover(s: &Scaffold, labels: &[usize], extra: &[u64]) -> Cover {
    let k = labels.iter().max().map_or(1, |m| m + 1);
    let mut lists = vec![Vec::new(); k];
    (0..s.len()).for_each(|x| lists[labels[x % labels.len()]].push(x));
    lists.retain(|l| !l.is_empty());
    for &m in extra {
        let l: Vec<usize> = (0..s.len()).filter(|&x| m >> (x % 64) & 1 == 1).collect();
        if !l.is_empty() {
            lists.push(l);
        }
    }
    Cover::from_id_lists(s, &lists).unwrap()
}

fn cover_args() -> impl Strategy<Value = (Vec<usize>, Vec<u64>)> {
    (prop::collection::vec(0usize..4, 1..=12), prop::collection::vec(any::<u64>(), 0..3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn set_cover_matches_exhaustive_search((n, sets, w) in family(14, 16)) {
        let sol = min_weight_set_cover(n, &sets, &w, SolverMode::Exact, DEFAULT_BUDGET);
        let best = brute_cover(n, &sets, &w).unwrap();
        prop_assert!(covers(n, &sets, &sol.chosen));
        prop_assert!(close(sol.weight, best, 1e-9), "solver {} vs exhaustive {}", sol.weight, best);
        let picked: f64 = sol.chosen.iter().map(|&j| w[j]).sum();
        prop_assert!(close(picked, sol.weight, 1e-9));
    }

    #[test]
    fn greedy_cover_is_an_upper_bound((n, sets, w) in family(9, 12)) {
        let sol = min_weight_set_cover(n, &sets, &w, SolverMode::Greedy, DEFAULT_BUDGET);
        prop_assert!(covers(n, &sets, &sol.chosen));
        prop_assert!(sol.weight + 1e-9 >= brute_cover(n, &sets, &w).unwrap());
    }

    #[test]
    fn arc_cover_matches_exhaustive_search((n, a, w) in arcs()) {
        let sets: Vec<FixedBitSet> = a.iter().map(|&r| arc_set(n, r)).collect();
        let best = brute_cover(n, &sets, &w);
        match (circular_arc_cover(n, &a, &w), best) {
            (Some((chosen, weight)), Some(b)) => {
                prop_assert!(covers(n, &sets, &chosen));
                prop_assert!(close(weight, b, 1e-9), "arc sweep {} vs exhaustive {}", weight, b);
            }
            (None, None) => {}
            (got, want) => prop_assert!(false, "arc sweep {:?} vs exhaustive {:?}", got, want),
        }
    }

    #[test]
    fn independent_set_matches_exhaustive_search((adj, w) in graph()) {
        let n = adj.len();
        let best = (0u32..1 << n)
            .filter(|m| (0..n).all(|i| m >> i & 1 == 0 || adj[i].iter().all(|&j| m >> j & 1 == 0)))
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| w[i]).sum::<f64>())
            .fold(0.0, f64::max);
        let sol = max_weight_independent_set(&adj, &w, SolverMode::Exact, DEFAULT_BUDGET);
        prop_assert!(close(sol.weight, best, 1e-9));
        for &v in &sol.vertices {
            prop_assert!(adj[v].iter().all(|u| !sol.vertices.contains(u)));
        }
    }

    #[test]
    fn join_is_associative_and_refines(a in cover_args(), b in cover_args(), c in cover_args()) {
        let s = shift_scaffold();
        let (a, b, c) = (random_cover(&s, &a.0, &a.1), random_cover(&s, &b.0, &b.1), random_cover(&s, &c.0, &c.1));
        let left = join(&join(&a, &b).unwrap(), &c).unwrap();
        let right = join(&a, &join(&b, &c).unwrap()).unwrap();
        prop_assert!(left.same_members(&right));
        let ab = join(&a, &b).unwrap();
        prop_assert!(refines(&ab, &a) && refines(&ab, &b));
    }

    #[test]
    fn iterated_covers_refine_their_predecessors(a in cover_args(), n in 1usize..5) {
        let s = shift_scaffold();
        let a = random_cover(&s, &a.0, &a.1);
        let next = iterate_cover(&s, &a, n + 1).unwrap();
        prop_assert!(refines(&next, &iterate_cover(&s, &a, n).unwrap()));
    }

    #[test]
    fn birkhoff_sums_are_additive(vals in prop::collection::vec(-3.0f64..3.0, 64), x in 0usize..64, m in 1usize..8, n in 1usize..8) {
        let s = doubling_scaffold(6).unwrap();
        let v = &vals[..s.len()];
        let x = x % s.len();
        let whole = s.birkhoff_sum(v, x, m + n).unwrap();
        let split = s.birkhoff_sum(v, x, m).unwrap() + s.birkhoff_sum(v, s.iterate(x, m), n).unwrap();
        prop_assert!(close(whole, split, 1e-12));
    }

    #[test]
    fn cover_pressures_shift_by_the_constant(vals in prop::collection::vec(-2.0f64..2.0, 32), c in -3.0f64..3.0, a in cover_args()) {
        let s = shift_scaffold();
        let v = &vals[..s.len()];
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        let a = random_cover(&s, &a.0, &a.1);
        let (q0, p0) = cover_levels(&s, v, &a, 4, SolverMode::Exact, DEFAULT_BUDGET).unwrap();
        let (qc, pc) = cover_levels(&s, &shifted, &a, 4, SolverMode::Exact, DEFAULT_BUDGET).unwrap();
        for n in 0..4 {
            let k = (n + 1) as f64;
            prop_assert!(close(qc[n].raw.ln() / k, q0[n].raw.ln() / k + c, 1e-9));
            prop_assert!(close(pc[n].raw.ln() / k, p0[n].raw.ln() / k + c, 1e-9));
        }
    }

    #[test]
    fn separated_sums_shift_by_the_constant(vals in prop::collection::vec(-2.0f64..2.0, 32), c in -3.0f64..3.0) {
        let s = shift_scaffold();
        let v = &vals[..s.len()];
        let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
        let base = separated_sets(&s, v, 0.3, 3, SolverMode::Exact, DEFAULT_BUDGET).unwrap();
        let moved = separated_sets(&s, &shifted, 0.3, 3, SolverMode::Exact, DEFAULT_BUDGET).unwrap();
        for (b, m) in base.iter().zip(&moved) {
            let k = b.n as f64;
            prop_assert!(close(m.value.ln() / k, b.value.ln() / k + c, 1e-9));
        }
    }
}
