//! Exact minimum-weight cover of a cycle `0..n` by arcs.
//!
//! The cycle is cut at a point lying in the fewest arcs. For each arc `d`
//! through that point the complement of `d` is covered by a sweep over
//! the arcs meeting it in one piece; an arc meeting it in two pieces
//! contains `d`, so `d` would be redundant in any cover using both.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use fixedbitset::FixedBitSet;

/// `(start, len)` when the set is a nonempty run of consecutive indices mod `n`.
pub fn cyclic_run(set: &FixedBitSet, n: usize) -> Option<(usize, usize)> {
    let len = set.count_ones(..);
    if len == 0 {
        return None;
    }
    if len == n {
        return Some((0, n));
    }
    // The run starts at a member whose predecessor is absent; there is exactly one.
    let mut starts = set.ones().filter(|&x| !set.contains((x + n - 1) % n));
    let start = starts.next()?;
    if starts.next().is_some() {
        return None;
    }
    Some((start, len))
}

/// Total order on finite costs for the heap.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Cheapest cover of positions `0..len` by intervals `(l, r, id)`, sorted by `l`.
fn interval_cover(len: usize, pieces: &[(usize, usize, usize)], weights: &[f64]) -> Option<(f64, Vec<usize>)> {
    let mut cost = vec![f64::INFINITY; len + 1];
    let mut via = vec![(usize::MAX, 0usize); len + 1];
    cost[0] = 0.0;
    let mut heap: BinaryHeap<Reverse<(Key, usize, usize, usize)>> = BinaryHeap::new();
    let mut next = 0;
    for x in 1..=len {
        // Active: l < x <= r + 1, keyed by the cost of reaching l first.
        while next < pieces.len() && pieces[next].0 < x {
            let (l, r, e) = pieces[next];
            if cost[l].is_finite() {
                heap.push(Reverse((Key(cost[l] + weights[e]), r, e, l)));
            }
            next += 1;
        }
        while let Some(Reverse((_, r, _, _))) = heap.peek() {
            if r + 1 < x {
                heap.pop();
            } else {
                break;
            }
        }
        match heap.peek() {
            Some(Reverse((Key(c), _, e, l))) => {
                cost[x] = *c;
                via[x] = (*e, *l);
            }
            None => return None,
        }
    }
    let mut chosen = Vec::new();
    let mut x = len;
    while x > 0 {
        let (e, l) = via[x];
        chosen.push(e);
        x = l;
    }
    Some((cost[len], chosen))
}

/// Minimum-weight subfamily of arcs `(start, len)` covering `0..n`, as
/// ascending arc indices; `None` if the arcs do not cover the cycle.
pub fn circular_arc_cover(n: usize, arcs: &[(usize, usize)], weights: &[f64]) -> Option<(Vec<usize>, f64)> {
    if n == 0 {
        return Some((Vec::new(), 0.0));
    }
    let mut signed = vec![0isize; n + 1];
    for &(s, l) in arcs {
        let l = l.min(n);
        signed[s] += 1;
        if s + l <= n {
            signed[s + l] -= 1;
        } else {
            signed[n] -= 1;
            signed[0] += 1;
            signed[s + l - n] -= 1;
        }
    }
    let mut acc = 0isize;
    let mut pivot = (usize::MAX, 0usize);
    for (p, d) in signed[..n].iter().enumerate() {
        acc += d;
        if (acc as usize) < pivot.0 {
            pivot = (acc as usize, p);
        }
    }
    if pivot.0 == 0 {
        return None;
    }
    let p = pivot.1;
    let covers = |&(s, l): &(usize, usize)| (p + n - s) % n < l.min(n);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for (d, arc) in arcs.iter().enumerate() {
        if !covers(arc) {
            continue;
        }
        let dlen = arc.1.min(n);
        let len = n - dlen;
        let start = (arc.0 + dlen) % n;
        let mut pieces: Vec<(usize, usize, usize)> = Vec::new();
        if len > 0 {
            for (e, &(s, l)) in arcs.iter().enumerate() {
                let l = l.min(n);
                if e == d || l == 0 {
                    continue;
                }
                let ps = (s + n - start) % n;
                let last = ps + l - 1;
                if ps < len {
                    if last >= n {
                        continue;
                    }
                    pieces.push((ps, last.min(len - 1), e));
                } else if last >= n {
                    pieces.push((0, (last - n).min(len - 1), e));
                }
            }
            pieces.sort_unstable();
        }
        if let Some((c, mut chosen)) = interval_cover(len, &pieces, weights) {
            let total = c + weights[d];
            if best.as_ref().map_or(true, |b| total < b.0) {
                chosen.push(d);
                best = Some((total, chosen));
            }
        }
    }
    best.map(|(w, mut chosen)| {
        chosen.sort_unstable();
        chosen.dedup();
        (chosen, w)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute(n: usize, arcs: &[(usize, usize)], w: &[f64]) -> Option<f64> {
        let mut best: Option<f64> = None;
        for mask in 1u32..(1 << arcs.len()) {
            let mut hit = vec![false; n];
            let mut total = 0.0;
            for (i, &(s, l)) in arcs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    total += w[i];
                    (0..l.min(n)).for_each(|k| hit[(s + k) % n] = true);
                }
            }
            if hit.iter().all(|&h| h) && best.map_or(true, |b| total < b) {
                best = Some(total);
            }
        }
        best
    }

    #[test]
    fn matches_exhaustive_search() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..400 {
            let n = rng.gen_range(1..14);
            let m = rng.gen_range(1..11);
            let arcs: Vec<(usize, usize)> = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(1..=n))).collect();
            let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.2..2.0)).collect();
            let got = circular_arc_cover(n, &arcs, &w);
            match brute(n, &arcs, &w) {
                None => assert!(got.is_none()),
                Some(b) => {
                    let (chosen, value) = got.expect("cover exists");
                    assert!((value - b).abs() < 1e-12, "{value} vs {b}");
                    assert!((chosen.iter().map(|&i| w[i]).sum::<f64>() - value).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cyclic_runs() {
        let mut s = FixedBitSet::with_capacity(6);
        s.insert(5);
        s.insert(0);
        assert_eq!(cyclic_run(&s, 6), Some((5, 2)));
        s.insert(2);
        assert_eq!(cyclic_run(&s, 6), None);
        assert_eq!(cyclic_run(&FixedBitSet::with_capacity(6), 6), None);
    }
}
