//! Dynamical systems, their scaffolds, Bowen distances, Birkhoff sums and
//! ball covers.
//!
//! ```text
//! d_n(x, y) = max_{0 <= j < n} d(T^j x, T^j y)
//! f_n(x)    = sum_{0 <= j < n} f(T^j x)
//! ```

pub mod potential;
pub mod scaffold;
pub mod symbolic;

use std::collections::BTreeMap;
use std::path::Path;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

pub use potential::{sup_norm, Potential, PotentialCore};
pub use scaffold::{prefix_agreement, Metric, PointData, Scaffold};
pub use symbolic::Subshift;

use crate::cover_algebra::Cover;
use crate::error::{domain, Error, Result};

/// Largest binary resolution used for doubling-map scaffolds.
pub const MAX_DOUBLING_BITS: usize = 16;

/// How a non-compact system sits inside a compact extension `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionRecipe {
    /// `Z = X`.
    Identity,
    /// `Z = X ∪ {∞}` with `S(∞) = ∞`.
    Point,
    /// `Z = X ∪ {a, b}` with `π(a) = π(b) = ∞` and `S` swapping `a`, `b`.
    TwoPointFiber,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SystemKind {
    Symbolic(Subshift),
    /// `x ↦ 2x mod 1` on the circle of length 1.
    Doubling,
    /// `m ↦ m + 1` on `-M..=M`, the right end absorbing.
    Translation { half_width: usize },
    /// A fixed point table with a map column.
    Sampled {
        coords: Vec<Vec<f64>>,
        next: Vec<usize>,
        metric: Metric,
        infinity: Option<Vec<f64>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemDescriptor {
    pub name: String,
    pub kind: SystemKind,
    pub extension: Option<ExtensionRecipe>,
}

impl SystemDescriptor {
    pub fn symbolic(name: impl Into<String>, shift: Subshift) -> Self {
        Self { name: name.into(), kind: SystemKind::Symbolic(shift), extension: Some(ExtensionRecipe::Identity) }
    }

    pub fn doubling() -> Self {
        Self { name: "doubling-map".into(), kind: SystemKind::Doubling, extension: Some(ExtensionRecipe::Identity) }
    }

    pub fn translation(half_width: usize, extension: ExtensionRecipe) -> Self {
        let name = match extension {
            ExtensionRecipe::TwoPointFiber => "translation-Z-fibered",
            _ => "translation-Z",
        };
        Self { name: name.into(), kind: SystemKind::Translation { half_width }, extension: Some(extension) }
    }

    /// Loads a sampled system from CSV with columns `next`, optional `inf`,
    /// and coordinate columns `x0, x1, ...`.
    pub fn from_csv(
        name: impl Into<String>,
        path: &Path,
        metric: Metric,
        extension: Option<ExtensionRecipe>,
    ) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let next_col = headers
            .iter()
            .position(|h| h == "next")
            .ok_or_else(|| Error::Config(format!("{}: missing `next` column", path.display())))?;
        let inf_col = headers.iter().position(|h| h == "inf");
        let coord_cols: Vec<usize> =
            headers.iter().enumerate().filter(|(_, h)| h.starts_with('x')).map(|(i, _)| i).collect();
        let (mut coords, mut next, mut inf) = (Vec::new(), Vec::new(), Vec::new());
        for (row, rec) in reader.records().enumerate() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec[i].trim().parse::<f64>().map_err(|e| {
                    Error::Config(format!("{} row {}: column {}: {e}", path.display(), row + 2, &headers[i]))
                })
            };
            coords.push(coord_cols.iter().map(|&i| parse(i)).collect::<Result<Vec<_>>>()?);
            next.push(parse(next_col)? as usize);
            if let Some(i) = inf_col {
                inf.push(parse(i)?);
            }
        }
        let infinity = inf_col.map(|_| inf);
        let sys = Self { name: name.into(), kind: SystemKind::Sampled { coords, next, metric, infinity }, extension };
        sys.base_scaffold()?;
        Ok(sys)
    }

    pub fn is_compact(&self) -> bool {
        match &self.kind {
            SystemKind::Symbolic(_) | SystemKind::Doubling => true,
            SystemKind::Translation { .. } => false,
            SystemKind::Sampled { infinity, .. } => infinity.is_none(),
        }
    }

    pub fn alphabet(&self) -> Option<usize> {
        match &self.kind {
            SystemKind::Symbolic(s) => Some(s.alphabet()),
            SystemKind::Doubling => Some(2),
            _ => None,
        }
    }

    pub fn diameter(&self) -> Result<f64> {
        Ok(match &self.kind {
            SystemKind::Symbolic(s) if s.alphabet() > 1 => 1.0,
            SystemKind::Doubling => 0.5,
            SystemKind::Translation { .. } => 1.0,
            _ => self.base_scaffold()?.diameter(),
        })
    }

    /// Geometric grid `diam/4 · 2^-k`, `k < levels`.
    pub fn default_epsilon_grid(&self, levels: usize) -> Result<Vec<f64>> {
        let e0 = self.diameter()? / 4.0;
        Ok((0..levels).map(|k| e0 * 0.5f64.powi(k as i32)).collect())
    }

    /// Scaffold used by systems whose sample does not depend on the scale.
    pub fn base_scaffold(&self) -> Result<Scaffold> {
        match &self.kind {
            SystemKind::Translation { half_width } => translation_scaffold(*half_width),
            SystemKind::Sampled { coords, next, metric, infinity } => Scaffold::new(
                self.name.clone(),
                coords.iter().map(|c| PointData::coord(c.clone())).collect(),
                next.clone(),
                metric.clone(),
                infinity.clone(),
                0.0,
            ),
            SystemKind::Symbolic(s) => symbolic_scaffold(s, 1),
            SystemKind::Doubling => doubling_scaffold(4),
        }
    }

    /// A scaffold on which `(n, eps)` Bowen balls and `f_n` are resolved.
    ///
    /// Symbolic scaffolds realise every admissible word of length
    /// `n - 1 + max(r, locality)`, `r` the prefix agreement of `eps`.
    pub fn scaffold_for(&self, n: usize, eps: f64, f: Option<&Potential>) -> Result<Scaffold> {
        if n == 0 || !(eps > 0.0) {
            return domain("scaffold needs n >= 1 and eps > 0");
        }
        let locality = f.map_or(Some(1), |p| p.locality());
        match &self.kind {
            SystemKind::Symbolic(s) => {
                let loc = locality.ok_or_else(|| {
                    Error::Domain("symbolic scaffolds need a locally constant potential".into())
                })?;
                let depth = n - 1 + prefix_agreement(eps).max(loc);
                symbolic_scaffold(s, depth)
            }
            SystemKind::Doubling => {
                let loc = locality.unwrap_or(1);
                let scale = (1.0 / eps).log2().ceil().max(0.0) as usize;
                // Bowen balls are arcs of radius eps 2^{1-n}, at least two
                // grid spacings at this resolution.
                let bits = (n + scale).max(n - 1 + loc).min(MAX_DOUBLING_BITS);
                doubling_scaffold(bits)
            }
            _ => self.base_scaffold(),
        }
    }
}

/// Periodic points realising every admissible word of length `depth`.
pub fn symbolic_scaffold(shift: &Subshift, depth: usize) -> Result<Scaffold> {
    let period = shift.period_for_depth(depth)?;
    let words = shift.periodic_words(period);
    let index: BTreeMap<&[u8], usize> = words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let next = words
        .iter()
        .map(|w| {
            let mut r = w[1..].to_vec();
            r.push(w[0]);
            index[r.as_slice()]
        })
        .collect();
    Scaffold::new(
        format!("shift(k={}, period={period})", shift.alphabet()),
        words.iter().map(|w| PointData::word(w.clone())).collect(),
        next,
        Metric::Prefix,
        None,
        0.0,
    )
}

/// Points `k / (2^bits - 1)`: binary expansions with period `bits`, on
/// which doubling is an exact digit rotation.
pub fn doubling_scaffold(bits: usize) -> Result<Scaffold> {
    if bits == 0 || bits > 24 {
        return domain("doubling scaffold needs 1..=24 bits");
    }
    let modulus = (1usize << bits) - 1;
    let count = modulus.max(1);
    let points = (0..count)
        .map(|k| {
            let word = (0..bits).map(|i| ((k >> (bits - 1 - i)) & 1) as u8).collect();
            PointData { word, integer: None, coord: vec![k as f64 / modulus.max(1) as f64], at_infinity: false }
        })
        .collect();
    let next = (0..count).map(|k| if modulus == 1 { 0 } else { (2 * k) % modulus }).collect();
    Scaffold::new(format!("doubling(bits={bits})"), points, next, Metric::Circle { circumference: 1.0 }, None, 0.0)
}

/// `g(m) = sign(m) (1 - 1/(1+|m|))`, placed on a circle of length 2 so
/// both tails meet at the point at infinity.
pub fn translation_embedding(m: i64) -> f64 {
    m.signum() as f64 * (1.0 - 1.0 / (1.0 + m.unsigned_abs() as f64))
}

/// Integers `-M..=M` under `m ↦ m + 1`; `M` is absorbing.
pub fn translation_scaffold(half_width: usize) -> Result<Scaffold> {
    if half_width == 0 {
        return domain("translation truncation must be positive");
    }
    let m = half_width as i64;
    let points = (-m..=m)
        .map(|k| PointData {
            word: Vec::new(),
            integer: Some(k),
            coord: vec![translation_embedding(k) + 1.0],
            at_infinity: false,
        })
        .collect();
    let len = 2 * half_width + 1;
    let next = (0..len).map(|i| (i + 1).min(len - 1)).collect();
    let infinity = (-m..=m).map(|k| 1.0 / (1.0 + k.unsigned_abs() as f64)).collect();
    let err = 1.0 / (1.0 + m as f64) - 1.0 / (2.0 + m as f64);
    Scaffold::new(
        format!("translation(M={half_width})"),
        points,
        next,
        Metric::Circle { circumference: 2.0 },
        Some(infinity),
        err,
    )
}

/// Cover by open `eps`-balls around every scaffold point; coincident balls
/// are merged.
pub fn ball_cover(scaffold: &Scaffold, eps: f64) -> Result<Cover> {
    if !(eps > 0.0) {
        return domain("ball radius must be positive");
    }
    let members: Vec<FixedBitSet> = match scaffold.metric_kind() {
        Metric::Prefix => {
            let groups = scaffold.prefix_groups(prefix_agreement(eps));
            groups
                .values()
                .map(|g| {
                    let mut s = FixedBitSet::with_capacity(scaffold.len());
                    g.iter().for_each(|&x| s.insert(x));
                    s
                })
                .collect()
        }
        _ => scaffold
            .bowen_neighbors(eps, 1)
            .into_iter()
            .enumerate()
            .map(|(x, nb)| {
                let mut s = FixedBitSet::with_capacity(scaffold.len());
                s.insert(x);
                nb.into_iter().for_each(|y| s.insert(y));
                s
            })
            .collect(),
    };
    Cover::new(scaffold, members)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_with_prefix(s: &Scaffold, prefix: &[u8]) -> usize {
        (0..s.len()).find(|&x| s.point(x).word.starts_with(prefix)).unwrap()
    }

    #[test]
    fn bowen_distance_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 6).unwrap();
        let x = point_with_prefix(&s, &[0, 0, 0, 0, 0, 0]);
        assert_eq!(s.bowen_distance(x, x, 5).unwrap(), 0.0);
        let a = point_with_prefix(&s, &[0, 1, 1, 1, 1, 1]);
        let b = point_with_prefix(&s, &[1, 0, 0, 0, 0, 0]);
        assert_eq!(s.bowen_distance(a, b, 1).unwrap(), 1.0);
        let c = point_with_prefix(&s, &[0, 0, 1, 0, 0, 0]);
        assert_eq!(s.bowen_distance(c, x, 3).unwrap(), 1.0);
        assert_eq!(s.bowen_distance(c, x, 2).unwrap(), 0.5);
        assert!(s.bowen_distance(x, 10_000, 1).is_err());
    }

    #[test]
    fn birkhoff_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 4).unwrap();
        let f = Potential::indicator(&[0], 2, 1.0).unwrap();
        let v = f.values_on(&s).unwrap();
        let x = point_with_prefix(&s, &[0, 1, 0, 1]);
        assert_eq!(s.birkhoff_sum(&v, x, 4).unwrap(), 2.0);
        let one = Potential::constant(1.0).values_on(&s).unwrap();
        assert_eq!(s.birkhoff_sum(&one, x, 9).unwrap(), 9.0);
        assert_eq!(s.birkhoff_sum(&vec![0.0; s.len()], x, 7).unwrap(), 0.0);
    }

    #[test]
    fn ball_cover_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 4).unwrap();
        let whole = ball_cover(&s, 2.0).unwrap();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole.members()[0].count_ones(..), 16);
        let c = ball_cover(&s, 0.3).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.members().iter().all(|m| m.count_ones(..) == 4));

        let t = translation_scaffold(64).unwrap();
        let b = ball_cover(&t, 0.4).unwrap();
        assert!(b.is_admissible());
    }

    #[test]
    fn translation_metric_is_one_point() {
        let t = translation_scaffold(8).unwrap();
        for x in 0..t.len() {
            let m = t.point(x).integer.unwrap();
            // Distance between the two ends goes through infinity.
            let far = t.distance(0, t.len() - 1);
            assert!((far - 2.0 / 9.0).abs() < 1e-15);
            assert!(t.infinity_distance(x).unwrap() > 0.0);
            assert_eq!(t.infinity_distance(x).unwrap(), 1.0 / (1.0 + m.abs() as f64));
        }
        t.check_metric_axioms(3).unwrap();
    }

    #[test]
    fn doubling_scaffold_rotates_digits() {
        let s = doubling_scaffold(5).unwrap();
        assert_eq!(s.len(), 31);
        for x in 0..s.len() {
            let y = s.apply(x);
            let expect = (2.0 * s.point(x).coord[0]) % 1.0;
            assert!((s.point(y).coord[0] - expect).abs() < 1e-12);
            assert_eq!(s.point(y).word[..4], s.point(x).word[1..]);
        }
        s.check_metric_axioms(2).unwrap();
    }
}
