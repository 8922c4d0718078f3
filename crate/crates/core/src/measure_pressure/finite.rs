use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{domain, Result};
use crate::systems::{Potential, Scaffold};

/// Mass tolerance above one.
pub const MASS_SLACK: f64 = 1e-12;

/// A finitely supported measure of total mass at most one.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FiniteMeasure {
    weights: BTreeMap<usize, f64>,
    total: f64,
}

impl FiniteMeasure {
    /// Zero weights are dropped.
    pub fn new(weights: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, w) in weights {
            if !(w >= 0.0) || !w.is_finite() {
                return domain(format!("weight {w} at point {x} is not a finite nonnegative number"));
            }
            if w > 0.0 {
                *map.entry(x).or_insert(0.0) += w;
            }
        }
        let total: f64 = map.values().sum();
        if total > 1.0 + MASS_SLACK {
            return domain(format!("total mass {total} exceeds one"));
        }
        Ok(Self { weights: map, total })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac(x: usize) -> Self {
        Self::new([(x, 1.0)]).expect("unit mass")
    }

    pub fn uniform(points: &[usize]) -> Result<Self> {
        if points.is_empty() {
            return Ok(Self::zero());
        }
        let w = 1.0 / points.len() as f64;
        Self::new(points.iter().map(|&x| (x, w)))
    }

    /// Weights given densely, one per scaffold point.
    pub fn from_dense(weights: &[f64]) -> Result<Self> {
        Self::new(weights.iter().copied().enumerate())
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights.get(&x).copied().unwrap_or(0.0)
    }

    /// `(point, weight)` in increasing point order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights.iter().map(|(&x, &w)| (x, w))
    }

    pub fn support(&self) -> Vec<usize> {
        self.weights.keys().copied().collect()
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return domain("scale factor must be nonnegative");
        }
        Self::new(self.iter().map(|(x, w)| (x, alpha * w)))
    }

    pub fn check_on(&self, scaffold: &Scaffold) -> Result<()> {
        match self.weights.keys().next_back() {
            Some(&x) if x >= scaffold.len() => domain(format!("measure charges point {x} outside the scaffold")),
            _ => Ok(()),
        }
    }

    /// `μ ∘ T^{-j}`.
    pub fn pushforward(&self, scaffold: &Scaffold, j: usize) -> Result<Self> {
        self.check_on(scaffold)?;
        Self::new(self.iter().map(|(x, w)| (scaffold.iterate(x, j), w)))
    }

    /// `Σ_x μ(x) v(x)` for a table of values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.iter().map(|(x, w)| w * values[x]).sum()
    }

    pub fn integral(&self, f: &Potential, scaffold: &Scaffold) -> Result<f64> {
        self.check_on(scaffold)?;
        Ok(self.integrate(&f.values_on(scaffold)?))
    }

    /// `Σ_x |μ(x) - μ(T^{-1} x)|`.
    pub fn invariance_defect(&self, scaffold: &Scaffold) -> Result<f64> {
        let pushed = self.pushforward(scaffold, 1)?;
        let mut points: Vec<usize> = self.support();
        points.extend(pushed.support());
        points.sort_unstable();
        points.dedup();
        Ok(points.iter().map(|&x| (self.weight(x) - pushed.weight(x)).abs()).sum())
    }

    /// CSV with columns `point_id, weight`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["point_id", "weight"])?;
        for (x, m) in self.iter() {
            w.write_record([x.to_string(), format!("{m:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}
