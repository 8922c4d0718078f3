//! Extensions of a system to a compact space `Z ⊃ X`, the projection
//! `π: Z → X ∪ {∞}` and the pseudometric `d̃(z, w) = d(π z, π w)`.
//!
//! The points of `X` come first in the extended scaffold, so restricting a
//! measure or partition to `X` keeps ids unchanged. The fiber `Z ∖ X` is
//! mapped into itself, has `d̃`-diameter zero, and sits at distance
//! `d(x, ∞)` from every `x ∈ X`.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::cover_algebra::Partition;
use crate::error::{contract, domain, Error, Result};
use crate::measure_pressure::{entropy_of_masses, FiniteMeasure, OnScaffold, DynamicalMeasure, INVARIANCE_TOLERANCE};
use crate::systems::{ExtensionRecipe, Metric, PointData, Potential, Scaffold, SystemDescriptor};

/// Image of a `Z` point under `π`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Projected {
    Point(usize),
    Infinity,
}

#[derive(Clone, Debug)]
pub struct ExtendedSystem {
    base: Scaffold,
    total: Scaffold,
    recipe: ExtensionRecipe,
}

/// Extends a scaffold of `sys` by the system's registered recipe.
pub fn extend_system(sys: &SystemDescriptor, base: Scaffold) -> Result<ExtendedSystem> {
    let recipe = match sys.extension {
        Some(r) => r,
        None if sys.is_compact() => ExtensionRecipe::Identity,
        None => return Err(Error::Unsupported(format!("{}: no registered compact extension", sys.name))),
    };
    extend_scaffold(base, recipe)
}

/// Builds `Z` from a scaffold of `X` and a recipe.
pub fn extend_scaffold(base: Scaffold, recipe: ExtensionRecipe) -> Result<ExtendedSystem> {
    let fiber_len = match recipe {
        ExtensionRecipe::Identity => {
            if !base.is_compact_space() {
                return Err(Error::Unsupported("identity extension of a non-compact space".into()));
            }
            return Ok(ExtendedSystem { total: base.clone(), base, recipe });
        }
        ExtensionRecipe::Point => 1,
        ExtensionRecipe::TwoPointFiber => 2,
    };
    let to_infinity = match base.infinity_distances() {
        Some(d) => d.to_vec(),
        None => return contract("extension by infinity needs a one-point metric"),
    };
    if matches!(base.metric_kind(), Metric::Compactified { .. }) {
        return domain("scaffold is already compactified");
    }
    let n = base.len();
    let mut points = base.points().to_vec();
    points.extend((0..fiber_len).map(|_| PointData::infinity()));
    let mut next = base.next_table().to_vec();
    match recipe {
        ExtensionRecipe::Point => next.push(n),
        _ => next.extend([n + 1, n]),
    }
    let metric = Metric::Compactified { base: Box::new(base.metric_kind().clone()), base_len: n, to_infinity };
    let total = Scaffold::new(format!("{}+", base.label()), points, next, metric, None, base.projection_error())?;
    Ok(ExtendedSystem { base, total, recipe })
}

impl ExtendedSystem {
    pub fn base(&self) -> &Scaffold {
        &self.base
    }

    pub fn total(&self) -> &Scaffold {
        &self.total
    }

    pub fn recipe(&self) -> ExtensionRecipe {
        self.recipe
    }

    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    /// Ids of `Z ∖ X`.
    pub fn fiber(&self) -> std::ops::Range<usize> {
        self.base.len()..self.total.len()
    }

    pub fn fiber_set(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.total.len());
        s.insert_range(self.fiber());
        s
    }

    pub fn project(&self, z: usize) -> Result<Projected> {
        self.total.check_point(z)?;
        Ok(if z < self.base.len() { Projected::Point(z) } else { Projected::Infinity })
    }

    /// `d̃(z, w)`.
    pub fn pseudometric(&self, z: usize, w: usize) -> Result<f64> {
        self.total.metric(z, w)
    }

    /// `S|_X = T`, `S(Z ∖ X) ⊂ Z ∖ X`, `d̃ = d` on `X × X`, the fiber has
    /// diameter zero and every ball around a point of `Z` contains the
    /// whole fiber or misses it.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.base.len();
        for x in 0..n {
            if self.total.apply(x) != self.base.apply(x) {
                return domain(format!("S differs from T at {x}"));
            }
            for y in 0..n {
                if self.total.distance(x, y) != self.base.distance(x, y) {
                    return domain(format!("pseudometric differs from the metric at ({x}, {y})"));
                }
            }
        }
        let fiber: Vec<usize> = self.fiber().collect();
        for &a in &fiber {
            if self.total.apply(a) < n {
                return domain("fiber is not mapped into itself");
            }
            for &b in &fiber {
                if self.total.distance(a, b) != 0.0 {
                    return domain("fiber has positive diameter");
                }
            }
        }
        if let Some(&a) = fiber.first() {
            for z in 0..self.total.len() {
                let d = self.total.distance(z, a);
                if fiber.iter().any(|&b| self.total.distance(z, b) != d) {
                    return domain(format!("balls around {z} split the fiber"));
                }
            }
        }
        Ok(())
    }
}

/// `g = f ∘ π` on `Z`; the fiber takes the value at infinity.
pub fn lift_potential(ext: &ExtendedSystem, f: &Potential) -> Result<Vec<f64>> {
    let c = if ext.fiber().is_empty() { f.constant_part() } else { f.require_decomposition()? };
    let mut values = f.values_on(&ext.base)?;
    values.extend(ext.fiber().map(|_| c));
    Ok(values)
}

/// Drops the mass on `Z ∖ X`.
pub fn restrict_measure(ext: &ExtendedSystem, mu: &FiniteMeasure) -> Result<FiniteMeasure> {
    mu.check_on(&ext.total)?;
    FiniteMeasure::new(mu.iter().filter(|&(z, _)| z < ext.base_len()))
}

/// The same weights on `Z`, with `μ(Z ∖ X) = 0`.
pub fn extend_measure(ext: &ExtendedSystem, mu: &FiniteMeasure) -> Result<FiniteMeasure> {
    mu.check_on(&ext.base)?;
    Ok(mu.clone())
}

/// Whether the classes of two labellings coincide.
fn same_classes(a: &[usize], b: &[usize]) -> bool {
    use std::collections::BTreeMap;
    if a.len() != b.len() {
        return false;
    }
    let mut ab: BTreeMap<usize, usize> = BTreeMap::new();
    let mut ba: BTreeMap<usize, usize> = BTreeMap::new();
    a.iter().zip(b).all(|(&x, &y)| *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x)
}

/// `(X ∩ C)^n` under `T` equals `X ∩ C^n` under `S` for `n = 1..=n_max`.
pub fn restriction_commutes(ext: &ExtendedSystem, c: &Partition, n_max: usize) -> Result<bool> {
    if c.universe() != ext.total.len() {
        return domain("partition does not live on Z");
    }
    let on_x = c.restrict(ext.base_len());
    for n in 1..=n_max {
        let via_z = c.iterate(&ext.total, n)?.restrict(ext.base_len());
        let via_x = on_x.iterate(&ext.base, n)?;
        if !same_classes(via_z.labels(), via_x.labels()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactifiedLevel {
    pub n: usize,
    /// `H_μ(C^n)` under `S`.
    pub entropy_z: f64,
    /// `H_{μ|X}((X ∩ C)^n)` under `T`.
    pub entropy_x: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactifiedReport {
    /// Defect of `μ|X` under `T`.
    pub restricted_defect: f64,
    pub restricted_invariant: bool,
    /// `μ(Z ∖ X)`.
    pub fiber_mass: f64,
    pub levels: Vec<CompactifiedLevel>,
    pub integral_z: f64,
    pub integral_x: f64,
    /// `∫ g dμ = ∫ f dμ|X + μ(Z ∖ X) f(∞)`.
    pub integrals_agree: bool,
    pub holds: bool,
}

/// Compares entropy and pressure on `Z` with those of `μ|X` on `X`.
///
/// The fiber lies in member 0 and stays there, so it only enlarges the
/// all-zero cell of `C^n`: `H_μ(C^n) <= H_{μ|X}((X ∩ C)^n) + η(μ(Z ∖ X))`,
/// `η(t) = -t log t`.
pub fn compactified_bound_check(
    ext: &ExtendedSystem,
    mu: &FiniteMeasure,
    c: &Partition,
    f: &Potential,
    n_max: usize,
) -> Result<CompactifiedReport> {
    if c.universe() != ext.total.len() {
        return domain("partition does not live on Z");
    }
    if ext.fiber().any(|z| c.label(z) != 0) {
        return domain("member 0 must contain Z ∖ X");
    }
    let on_z = OnScaffold::new(&ext.total, mu)?;
    let defect_z = on_z.invariance_defect()?;
    if defect_z > INVARIANCE_TOLERANCE {
        return contract(format!("measure is not S-invariant (defect {defect_z:.3e})"));
    }
    let restricted = restrict_measure(ext, mu)?;
    let on_x = OnScaffold::new(&ext.base, &restricted)?;
    let restricted_defect = on_x.invariance_defect()?;
    let fiber_mass = mu.total_mass() - restricted.total_mass();
    let eta = entropy_of_masses([fiber_mass]);
    let cx = c.restrict(ext.base_len());
    let mut levels = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let hz = entropy_of_masses(on_z.refined_cells(c, n, None)?.iter().map(|c| c.mass));
        let hx = entropy_of_masses(on_x.refined_cells(&cx, n, None)?.iter().map(|c| c.mass));
        levels.push(CompactifiedLevel { n, entropy_z: hz, entropy_x: hx, holds: hz <= hx + eta + 1e-12 });
    }
    let g = lift_potential(ext, f)?;
    let integral_z = mu.integrate(&g);
    let integral_x = restricted.integral(f, &ext.base)? + fiber_mass * f.constant_part();
    let integrals_agree = (integral_z - integral_x).abs() <= 1e-12;
    let restricted_invariant = restricted_defect <= INVARIANCE_TOLERANCE;
    let holds = restricted_invariant && integrals_agree && levels.iter().all(|l| l.holds);
    Ok(CompactifiedReport {
        restricted_defect,
        restricted_invariant,
        fiber_mass,
        levels,
        integral_z,
        integral_x,
        integrals_agree,
        holds,
    })
}
