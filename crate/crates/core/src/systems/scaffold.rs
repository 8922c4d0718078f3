//! Finite scaffolds: the point sets every computation runs on.
//!
//! A scaffold is closed under its map. The metric is evaluated on stored
//! point data, so two indices with equal data are indistinguishable.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{domain, Result};

/// Data attached to a scaffold point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointData {
    /// Period word for symbolic points, binary digits for the doubling map.
    pub word: Vec<u8>,
    /// Integer label for lattice systems.
    pub integer: Option<i64>,
    /// Coordinates for geometric metrics.
    pub coord: Vec<f64>,
    /// Marks fiber points of a compactification.
    pub at_infinity: bool,
}

impl PointData {
    pub fn word(word: Vec<u8>) -> Self {
        Self { word, integer: None, coord: Vec::new(), at_infinity: false }
    }

    pub fn coord(coord: Vec<f64>) -> Self {
        Self { word: Vec::new(), integer: None, coord, at_infinity: false }
    }

    pub fn infinity() -> Self {
        Self { word: Vec::new(), integer: None, coord: Vec::new(), at_infinity: true }
    }
}

/// Metric on a scaffold.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    /// `2^-k`, `k` the first index where the period words disagree.
    Prefix,
    /// Arc length on a circle, first coordinate.
    Circle { circumference: f64 },
    Euclidean,
    /// Pseudometric on an extension `Z`: the first `base_len` points carry
    /// the base metric, every later point sits at infinity.
    Compactified { base: Box<Metric>, base_len: usize, to_infinity: Vec<f64> },
}

/// Smallest `k >= 0` with `2^-k < eps`: the number of leading symbols two
/// points must share to be closer than `eps` in the prefix metric.
pub fn prefix_agreement(eps: f64) -> usize {
    let mut k = 0usize;
    while 0.5f64.powi(k as i32) >= eps {
        k += 1;
    }
    k
}

fn base_distance(metric: &Metric, a: &PointData, b: &PointData) -> f64 {
    match metric {
        Metric::Prefix => {
            let len = a.word.len().max(b.word.len());
            for i in 0..len {
                if a.word[i % a.word.len()] != b.word[i % b.word.len()] {
                    return 0.5f64.powi(i as i32);
                }
            }
            0.0
        }
        Metric::Circle { circumference } => {
            let d = (a.coord[0] - b.coord[0]).abs() % circumference;
            d.min(circumference - d)
        }
        Metric::Euclidean => a
            .coord
            .iter()
            .zip(&b.coord)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        Metric::Compactified { .. } => unreachable!("nested compactification"),
    }
}

/// A finite, map-closed sample of a dynamical system.
#[derive(Clone, Debug)]
pub struct Scaffold {
    label: String,
    points: Vec<PointData>,
    next: Vec<usize>,
    metric: Metric,
    infinity: Option<Vec<f64>>,
    near_infinity: Option<FixedBitSet>,
    projection_error: f64,
}

impl Scaffold {
    pub fn new(
        label: impl Into<String>,
        points: Vec<PointData>,
        next: Vec<usize>,
        metric: Metric,
        infinity: Option<Vec<f64>>,
        projection_error: f64,
    ) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return domain("empty scaffold");
        }
        if next.len() != n || next.iter().any(|&y| y >= n) {
            return domain("map table is not closed on the scaffold");
        }
        if let Some(inf) = &infinity {
            if inf.len() != n || inf.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
                return domain("infinity distances must be positive and one per point");
            }
        }
        if let Metric::Compactified { base_len, to_infinity, .. } = &metric {
            if *base_len > n || to_infinity.len() != *base_len {
                return domain("compactified metric does not match the point table");
            }
        }
        let near_infinity = infinity.as_ref().map(|inf| {
            let min = inf.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut delta = 1.0f64;
            while delta / 2.0 >= 2.0 * min {
                delta /= 2.0;
            }
            let mut set = FixedBitSet::with_capacity(n);
            for (i, &d) in inf.iter().enumerate() {
                if d < delta {
                    set.insert(i);
                }
            }
            set
        });
        Ok(Self {
            label: label.into(),
            points,
            next,
            metric,
            infinity,
            near_infinity,
            projection_error,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, x: usize) -> &PointData {
        &self.points[x]
    }

    pub fn points(&self) -> &[PointData] {
        &self.points
    }

    pub fn metric_kind(&self) -> &Metric {
        &self.metric
    }

    pub fn next_table(&self) -> &[usize] {
        &self.next
    }

    /// Largest distance by which the stored map deviates from the true map.
    pub fn projection_error(&self) -> f64 {
        self.projection_error
    }

    pub fn check_point(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            domain(format!("point id {x} outside scaffold of {} points", self.len()))
        }
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    /// Metric without bounds checks; panics on invalid ids.
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        if x == y {
            return 0.0;
        }
        match &self.metric {
            Metric::Compactified { base, base_len, to_infinity } => {
                match (x < *base_len, y < *base_len) {
                    (true, true) => base_distance(base, &self.points[x], &self.points[y]),
                    (true, false) => to_infinity[x],
                    (false, true) => to_infinity[y],
                    (false, false) => 0.0,
                }
            }
            m => base_distance(m, &self.points[x], &self.points[y]),
        }
    }

    pub fn metric(&self, x: usize, y: usize) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.distance(x, y))
    }

    pub fn apply(&self, x: usize) -> usize {
        self.next[x]
    }

    pub fn iterate(&self, mut x: usize, j: usize) -> usize {
        for _ in 0..j {
            x = self.next[x];
        }
        x
    }

    /// `orbits[j][x] = T^j x` for `j < n`.
    pub fn orbits(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::with_capacity(n);
        if n == 0 {
            return out;
        }
        out.push((0..self.len()).collect());
        for j in 1..n {
            let row = out[j - 1].iter().map(|&x| self.next[x]).collect();
            out.push(row);
        }
        out
    }

    pub fn bowen_distance(&self, x: usize, y: usize, n: usize) -> Result<f64> {
        if n == 0 {
            return domain("bowen distance needs n >= 1");
        }
        self.check_point(x)?;
        self.check_point(y)?;
        let (mut a, mut b) = (x, y);
        let mut best = 0.0f64;
        for _ in 0..n {
            best = best.max(self.distance(a, b));
            a = self.next[a];
            b = self.next[b];
        }
        Ok(best)
    }

    pub fn birkhoff_sum(&self, values: &[f64], x: usize, n: usize) -> Result<f64> {
        if n == 0 {
            return domain("birkhoff sum needs n >= 1");
        }
        self.check_point(x)?;
        if values.len() != self.len() {
            return domain("potential table does not match scaffold");
        }
        let mut y = x;
        let mut s = 0.0;
        for _ in 0..n {
            s += values[y];
            y = self.next[y];
        }
        Ok(s)
    }

    /// `f_n(x)` for every scaffold point.
    pub fn birkhoff_table(&self, values: &[f64], n: usize) -> Vec<f64> {
        let mut sums = vec![0.0; self.len()];
        let mut pos: Vec<usize> = (0..self.len()).collect();
        for _ in 0..n {
            for (s, p) in sums.iter_mut().zip(pos.iter_mut()) {
                *s += values[*p];
                *p = self.next[*p];
            }
        }
        sums
    }

    /// `T^{-j}(set)`.
    pub fn preimage(&self, set: &FixedBitSet, j: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len());
        for x in 0..self.len() {
            if set.contains(self.iterate(x, j)) {
                out.insert(x);
            }
        }
        out
    }

    /// The same points under `T^k`.
    pub fn power(&self, k: usize) -> Scaffold {
        let next = (0..self.len()).map(|x| self.iterate(x, k)).collect();
        Scaffold {
            label: format!("{}^{k}", self.label),
            next,
            ..self.clone()
        }
    }

    pub fn infinity_distance(&self, x: usize) -> Option<f64> {
        self.infinity.as_ref().map(|v| v[x])
    }

    pub fn infinity_distances(&self) -> Option<&[f64]> {
        self.infinity.as_deref()
    }

    pub fn is_compact_space(&self) -> bool {
        self.infinity.is_none()
    }

    /// Points inside the smallest resolvable neighbourhood of infinity.
    pub fn near_infinity(&self) -> Option<&FixedBitSet> {
        self.near_infinity.as_ref()
    }

    /// A subset is compact iff it misses a neighbourhood of infinity.
    pub fn is_compact_set(&self, set: &FixedBitSet) -> bool {
        match &self.near_infinity {
            None => true,
            Some(near) => set.is_disjoint(near),
        }
    }

    pub fn has_compact_complement(&self, set: &FixedBitSet) -> bool {
        match &self.near_infinity {
            None => true,
            Some(near) => near.is_subset(set),
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.metric {
            Metric::Prefix => {
                if self.distinct_first_symbols() > 1 {
                    1.0
                } else {
                    self.brute_diameter()
                }
            }
            _ => self.brute_diameter(),
        }
    }

    fn distinct_first_symbols(&self) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        for p in &self.points {
            seen.insert(p.word[0]);
        }
        seen.len()
    }

    fn brute_diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for x in 0..self.len() {
            for y in x + 1..self.len() {
                d = d.max(self.distance(x, y));
            }
        }
        d
    }

    /// Smallest distance between two points with distinct data; balls of
    /// smaller radius are singletons.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for x in 0..self.len() {
            for y in x + 1..self.len() {
                let d = self.distance(x, y);
                if d > 0.0 {
                    best = best.min(d);
                }
            }
        }
        best
    }

    /// For each point, the other points at Bowen distance `< eps` over `n`
    /// steps, in increasing id order.
    pub fn bowen_neighbors(&self, eps: f64, n: usize) -> Vec<Vec<usize>> {
        let orbits = self.orbits(n.max(1));
        match &self.metric {
            Metric::Prefix => {
                let r = prefix_agreement(eps);
                let key_len = if r == 0 { 0 } else { n.max(1) - 1 + r };
                let groups = self.prefix_groups(key_len);
                let mut out = vec![Vec::new(); self.len()];
                for g in groups.values() {
                    for &x in g {
                        out[x] = g.iter().copied().filter(|&y| y != x).collect();
                    }
                }
                out
            }
            Metric::Circle { circumference } => {
                let c = *circumference;
                let mut order: Vec<usize> = (0..self.len()).collect();
                order.sort_by(|&a, &b| {
                    self.points[a].coord[0]
                        .total_cmp(&self.points[b].coord[0])
                        .then(a.cmp(&b))
                });
                let mut rank = vec![0; self.len()];
                for (i, &x) in order.iter().enumerate() {
                    rank[x] = i;
                }
                let len = self.len();
                (0..len)
                    .map(|x| {
                        let cx = self.points[x].coord[0];
                        let mut cand = Vec::new();
                        for dir in [1usize, len - 1] {
                            let mut i = rank[x];
                            for _ in 1..len {
                                i = (i + dir) % len;
                                let y = order[i];
                                let gap = (self.points[y].coord[0] - cx).rem_euclid(c);
                                let gap = if dir == 1 { gap } else { (c - gap) % c };
                                if gap >= eps {
                                    break;
                                }
                                cand.push(y);
                            }
                        }
                        cand.sort_unstable();
                        cand.dedup();
                        cand.retain(|&y| {
                            y != x && orbits.iter().all(|row| self.distance(row[x], row[y]) < eps)
                        });
                        cand
                    })
                    .collect()
            }
            _ => (0..self.len())
                .map(|x| {
                    (0..self.len())
                        .filter(|&y| {
                            y != x && orbits.iter().all(|row| self.distance(row[x], row[y]) < eps)
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Points grouped by their first `len` symbols (cyclically extended).
    pub fn prefix_groups(&self, len: usize) -> BTreeMap<Vec<u8>, Vec<usize>> {
        let mut groups: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
        for (x, p) in self.points.iter().enumerate() {
            let key: Vec<u8> = (0..len).map(|i| p.word[i % p.word.len()]).collect();
            groups.entry(key).or_default().push(x);
        }
        groups
    }

    /// Open ball `{y : d(x, y) < eps}`.
    pub fn ball(&self, x: usize, eps: f64) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.len());
        set.insert(x);
        for y in &self.bowen_neighbors_single(x, eps) {
            set.insert(*y);
        }
        set
    }

    fn bowen_neighbors_single(&self, x: usize, eps: f64) -> Vec<usize> {
        (0..self.len()).filter(|&y| y != x && self.distance(x, y) < eps).collect()
    }

    /// Checks symmetry, the zero diagonal and the triangle inequality of the
    /// Bowen metric over `n` steps.
    pub fn check_metric_axioms(&self, n: usize) -> Result<()> {
        let len = self.len();
        let mut d = vec![0.0; len * len];
        for x in 0..len {
            for y in 0..len {
                d[x * len + y] = self.bowen_distance(x, y, n)?;
            }
        }
        for x in 0..len {
            if d[x * len + x] != 0.0 {
                return domain(format!("nonzero self distance at {x}"));
            }
            for y in 0..len {
                if d[x * len + y] != d[y * len + x] || d[x * len + y] < 0.0 {
                    return domain(format!("asymmetric distance at ({x}, {y})"));
                }
                for z in 0..len {
                    if d[x * len + z] > d[x * len + y] + d[y * len + z] + 1e-12 {
                        return domain(format!("triangle inequality fails at ({x}, {y}, {z})"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_agreement_thresholds() {
        assert_eq!(prefix_agreement(2.0), 0);
        assert_eq!(prefix_agreement(1.0), 1);
        assert_eq!(prefix_agreement(0.5), 2);
        assert_eq!(prefix_agreement(0.3), 2);
        assert_eq!(prefix_agreement(0.25), 3);
    }
}
