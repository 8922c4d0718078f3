//! Partition entropy, conditional entropy, entropy along partition
//! refinements, and pressure with respect to a measure.
//!
//! ```text
//! H_μ(C)     = Σ_{c ∈ C} μ(c) log(1/μ(c)),   0 log(1/0) = 0
//! H_μ(C | D) = Σ_{c, d} μ(c ∩ d) log(μ(d) / μ(c ∩ d))
//! h_μ(T, C)  = lim (1/n) H_μ(C^n)
//! P_μ(T, f)  = h_μ(T) + ∫ f dμ
//! ```
//!
//! For an invariant measure the increments `H_μ(C^n) - H_μ(C^{n-1})` are
//! nonincreasing and converge to `h_μ(T, C)`; their minimum is the
//! reported limit estimate. It is exact for Markov measures once `n`
//! exceeds the cylinder depth, and scales exactly under `μ ↦ αμ`.

mod finite;
mod markov;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

pub use finite::{FiniteMeasure, MASS_SLACK};
pub use markov::MarkovMeasure;

use crate::cover_algebra::Partition;
use crate::error::{contract, domain, Result};
use crate::systems::symbolic::word_code;
use crate::systems::{Potential, Scaffold};

/// Defect tolerance for calling a measure invariant.
pub const INVARIANCE_TOLERANCE: f64 = 1e-9;

/// A cell of a refined partition: its mass and `sup f_n` over it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub mass: f64,
    pub sup_birkhoff: f64,
}

/// A measure together with the partitions it can refine dynamically.
pub trait DynamicalMeasure {
    type Partition;

    fn total_mass(&self) -> f64;

    /// `Σ_x |μ(x) - μ(T^{-1}x)|`, or zero for measures invariant by
    /// construction.
    fn invariance_defect(&self) -> Result<f64>;

    /// Nonempty cells of `C^n` in a deterministic order. `sup_birkhoff` is
    /// `sup f_n` over the cell when `f` is given, else zero.
    fn refined_cells(&self, partition: &Self::Partition, n: usize, f: Option<&Potential>) -> Result<Vec<Cell>>;

    fn integral(&self, f: &Potential) -> Result<f64>;

    /// Whether `partition` can be used on a non-compact space.
    fn is_admissible(&self, _partition: &Self::Partition) -> bool {
        true
    }
}

/// A finite measure read on a scaffold.
#[derive(Clone, Copy, Debug)]
pub struct OnScaffold<'a> {
    pub scaffold: &'a Scaffold,
    pub measure: &'a FiniteMeasure,
}

impl<'a> OnScaffold<'a> {
    pub fn new(scaffold: &'a Scaffold, measure: &'a FiniteMeasure) -> Result<Self> {
        measure.check_on(scaffold)?;
        Ok(Self { scaffold, measure })
    }
}

impl DynamicalMeasure for OnScaffold<'_> {
    type Partition = Partition;

    fn total_mass(&self) -> f64 {
        self.measure.total_mass()
    }

    fn invariance_defect(&self) -> Result<f64> {
        self.measure.invariance_defect(self.scaffold)
    }

    fn refined_cells(&self, partition: &Partition, n: usize, f: Option<&Potential>) -> Result<Vec<Cell>> {
        let cn = partition.iterate(self.scaffold, n)?;
        let sups = match f {
            Some(f) => {
                let v = f.values_on(self.scaffold)?;
                let fnv = self.scaffold.birkhoff_table(&v, n);
                let mut sup = vec![f64::NEG_INFINITY; cn.len()];
                for (x, &l) in cn.labels().iter().enumerate() {
                    sup[l] = sup[l].max(fnv[x]);
                }
                sup
            }
            None => vec![0.0; cn.len()],
        };
        let mut mass = vec![0.0; cn.len()];
        for (x, w) in self.measure.iter() {
            mass[cn.label(x)] += w;
        }
        let mut present = vec![false; cn.len()];
        (0..self.scaffold.len()).for_each(|x| present[cn.label(x)] = true);
        Ok((0..cn.len()).filter(|&l| present[l]).map(|l| Cell { mass: mass[l], sup_birkhoff: sups[l] }).collect())
    }

    fn integral(&self, f: &Potential) -> Result<f64> {
        self.measure.integral(f, self.scaffold)
    }

    fn is_admissible(&self, partition: &Partition) -> bool {
        partition.is_admissible(self.scaffold)
    }
}

/// Partition of a subshift by the labels of depth-`depth` cylinders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderPartition {
    pub depth: usize,
    /// Label of each cylinder, indexed by its base-`k` word code.
    pub labels: Vec<usize>,
}

impl CylinderPartition {
    /// One member per depth-`depth` cylinder.
    pub fn cylinders(depth: usize, alphabet: usize) -> Self {
        Self { depth, labels: (0..alphabet.pow(depth as u32)).collect() }
    }

    pub fn label_of(&self, word: &[u8], alphabet: usize) -> usize {
        self.labels[word_code(word, self.depth, alphabet)]
    }
}

fn birkhoff_on_word(f: &Potential, word: &[u8], n: usize) -> Result<f64> {
    let c = f.constant_part();
    Ok(match &f.core {
        crate::systems::PotentialCore::Zero => c * n as f64,
        crate::systems::PotentialCore::Cylinder { depth, alphabet, values } => {
            (0..n).map(|j| c + values[word_code(&word[j..], *depth, *alphabet)]).sum()
        }
        _ => return domain("Markov measures need a locally constant potential"),
    })
}

impl DynamicalMeasure for MarkovMeasure {
    type Partition = CylinderPartition;

    fn total_mass(&self) -> f64 {
        1.0
    }

    fn invariance_defect(&self) -> Result<f64> {
        Ok(0.0)
    }

    fn refined_cells(&self, partition: &CylinderPartition, n: usize, f: Option<&Potential>) -> Result<Vec<Cell>> {
        if n == 0 || partition.depth == 0 {
            return domain("need n >= 1 and a positive cylinder depth");
        }
        let k = self.alphabet();
        if partition.labels.len() != k.pow(partition.depth as u32) {
            return domain("cylinder partition does not match the alphabet");
        }
        let loc = match f {
            Some(f) => f.locality().ok_or_else(|| crate::Error::Domain("potential is not locally constant".into()))?,
            None => 1,
        };
        let len = n - 1 + partition.depth.max(loc);
        let mut cells: BTreeMap<Vec<usize>, Cell> = BTreeMap::new();
        for (w, m) in self.words(len) {
            let key: Vec<usize> = (0..n).map(|j| partition.label_of(&w[j..], k)).collect();
            let s = match f {
                Some(f) => birkhoff_on_word(f, &w, n)?,
                None => 0.0,
            };
            let cell = cells.entry(key).or_insert(Cell { mass: 0.0, sup_birkhoff: f64::NEG_INFINITY });
            cell.mass += m;
            cell.sup_birkhoff = cell.sup_birkhoff.max(s);
        }
        Ok(cells.into_values().collect())
    }

    fn integral(&self, f: &Potential) -> Result<f64> {
        MarkovMeasure::integral(self, f)
    }
}

/// `Σ m log(1/m)` over positive masses.
pub fn entropy_of_masses(masses: impl IntoIterator<Item = f64>) -> f64 {
    masses.into_iter().filter(|&m| m > 0.0).map(|m| -m * m.ln()).sum()
}

pub fn partition_entropy<M: DynamicalMeasure>(mu: &M, c: &M::Partition) -> Result<f64> {
    Ok(entropy_of_masses(mu.refined_cells(c, 1, None)?.iter().map(|c| c.mass)))
}

/// `H_μ(C | D) = H_μ(C ∨ D) - H_μ(D)`; cells with `μ(D) = 0` contribute 0.
pub fn conditional_entropy(mu: &OnScaffold<'_>, c: &Partition, d: &Partition) -> Result<f64> {
    let joint = c.join(d)?;
    Ok((partition_entropy(mu, &joint)? - partition_entropy(mu, d)?).max(0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropySequence {
    pub n_values: Vec<usize>,
    /// `H_μ(C^n)`.
    pub entropies: Vec<f64>,
    /// `(1/n) H_μ(C^n)`.
    pub averages: Vec<f64>,
    /// `H_μ(C^n) - H_μ(C^{n-1})`, `H_μ(C^0) = 0`.
    pub increments: Vec<f64>,
    pub running_min: Vec<f64>,
    /// Minimum increment.
    pub extrapolated: f64,
}

fn entropy_sequence<M: DynamicalMeasure>(mu: &M, c: &M::Partition, n_max: usize) -> Result<EntropySequence> {
    if n_max == 0 {
        return domain("need n_max >= 1");
    }
    let entropies: Vec<f64> = (1..=n_max)
        .map(|n| Ok(entropy_of_masses(mu.refined_cells(c, n, None)?.iter().map(|c| c.mass))))
        .collect::<Result<_>>()?;
    let averages: Vec<f64> = entropies.iter().enumerate().map(|(i, h)| h / (i + 1) as f64).collect();
    let increments: Vec<f64> =
        entropies.iter().enumerate().map(|(i, h)| if i == 0 { *h } else { h - entropies[i - 1] }).collect();
    let mut m = f64::INFINITY;
    let running_min = averages.iter().map(|&a| {
        m = m.min(a);
        m
    }).collect();
    let extrapolated = increments.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    Ok(EntropySequence { n_values: (1..=n_max).collect(), entropies, averages, increments, running_min, extrapolated })
}

/// `H_μ(C^n)` for `n = 1..=n_max` and its limit estimate. The measure must
/// be invariant within [`INVARIANCE_TOLERANCE`].
pub fn dynamic_partition_entropy<M: DynamicalMeasure>(mu: &M, c: &M::Partition, n_max: usize) -> Result<EntropySequence> {
    let defect = mu.invariance_defect()?;
    if defect > INVARIANCE_TOLERANCE {
        return contract(format!("measure is not invariant (defect {defect:.3e})"));
    }
    entropy_sequence(mu, c, n_max)
}

/// The same sequence without the invariance gate, for near-invariant
/// measures whose defect is accounted for elsewhere.
pub fn partition_entropy_sequence<M: DynamicalMeasure>(mu: &M, c: &M::Partition, n_max: usize) -> Result<EntropySequence> {
    entropy_sequence(mu, c, n_max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsEntropy {
    /// Largest limit estimate over the family; a lower bound for `h_μ(T)`.
    pub value: f64,
    pub per_partition: Vec<EntropySequence>,
}

/// Largest entropy estimate over a declared family of partitions.
pub fn ks_entropy<M: DynamicalMeasure>(mu: &M, family: &[M::Partition], n_max: usize) -> Result<KsEntropy> {
    if family.is_empty() {
        return domain("partition family is empty");
    }
    if let Some(i) = family.iter().position(|c| !mu.is_admissible(c)) {
        return domain(format!("family member {i} is not admissible"));
    }
    let per_partition: Vec<EntropySequence> =
        family.iter().map(|c| dynamic_partition_entropy(mu, c, n_max)).collect::<Result<_>>()?;
    let value = per_partition.iter().map(|s| s.extrapolated).fold(0.0, f64::max);
    Ok(KsEntropy { value, per_partition })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurePressure {
    pub entropy: f64,
    pub integral: f64,
    pub value: f64,
    pub total_mass: f64,
}

/// `h_μ + ∫ f dμ` over a partition family.
pub fn measure_pressure<M: DynamicalMeasure>(mu: &M, f: &Potential, family: &[M::Partition], n_max: usize) -> Result<MeasurePressure> {
    let entropy = ks_entropy(mu, family, n_max)?.value;
    let integral = mu.integral(f)?;
    Ok(MeasurePressure { entropy, integral, value: entropy + integral, total_mass: mu.total_mass() })
}

/// Admissible inner approximation of a partition on a non-compact scaffold.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleRefinement {
    /// `K_0` is the neighbourhood of infinity; `K_{j+1} = C_j ∖ K_0`.
    pub partition: Partition,
    /// `μ(K_0) log |C|`, an upper bound for `H_μ(C | K)`.
    pub conditional_bound: f64,
    /// Every `μ(C_j ∖ K_{j+1})` is at most `δ / (n log n)`, `n = |C|`.
    pub within_budget: bool,
}

/// Compact inner approximations `K_j ⊂ C_j` obtained by removing the
/// neighbourhood of infinity, which becomes `K_0`.
pub fn admissible_refinement(scaffold: &Scaffold, mu: &FiniteMeasure, c: &Partition, delta: f64) -> Result<AdmissibleRefinement> {
    if c.universe() != scaffold.len() {
        return domain("partition does not match the scaffold");
    }
    mu.check_on(scaffold)?;
    let near = scaffold.near_infinity().cloned().unwrap_or_else(|| FixedBitSet::with_capacity(scaffold.len()));
    let labels: Vec<usize> =
        (0..scaffold.len()).map(|x| if near.contains(x) { 0 } else { c.label(x) + 1 }).collect();
    let mut partition = Partition::from_labels(labels);
    if partition.len() < 2 {
        partition = partition.with_count(2);
    }
    let n = c.nonempty_count();
    let log_n = (n as f64).ln();
    let k0_mass: f64 = near.ones().map(|x| mu.weight(x)).sum();
    let budget = if n > 1 { delta / (n as f64 * log_n) } else { f64::INFINITY };
    let within_budget = c.members().iter().all(|m| {
        let lost: f64 = m.intersection(&near).map(|x| mu.weight(x)).sum();
        lost <= budget
    });
    Ok(AdmissibleRefinement { partition, conditional_bound: k0_mass * log_n, within_budget })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperBoundLevel {
    pub n: usize,
    /// `∫ f dμ + (1/n) H_μ(C^n)`.
    pub lhs: f64,
    /// `(1/n) log Σ_{c ∈ C^n} sup_c e^{f_n}`.
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperBoundReport {
    pub levels: Vec<UpperBoundLevel>,
    pub holds: bool,
}

/// `∫ f dμ + (1/n) H_μ(C^n) <= (1/n) log Σ_{c ∈ C^n} sup_c e^{f_n}`.
pub fn upper_bound_inequality_check<M: DynamicalMeasure>(mu: &M, f: &Potential, c: &M::Partition, n_max: usize) -> Result<UpperBoundReport> {
    if (mu.total_mass() - 1.0).abs() > 1e-9 {
        return domain("upper bound check needs a probability measure");
    }
    let integral = mu.integral(f)?;
    let mut levels = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let cells = mu.refined_cells(c, n, Some(f))?;
        let h = entropy_of_masses(cells.iter().map(|c| c.mass));
        let top = cells.iter().map(|c| c.sup_birkhoff).fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = cells.iter().map(|c| (c.sup_birkhoff - top).exp()).sum();
        let rhs = (top + sum.ln()) / n as f64;
        let lhs = integral + h / n as f64;
        levels.push(UpperBoundLevel { n, lhs, rhs, holds: lhs <= rhs + 1e-12 * rhs.abs().max(1.0) });
    }
    let holds = levels.iter().all(|l| l.holds);
    Ok(UpperBoundReport { levels, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IteratedMeasureReport {
    pub k: usize,
    /// `P_μ(T^k, f_k)` from `k`-block cylinders under `T^k`.
    pub iterated: f64,
    /// `k P_μ(T, f)` from cylinders under `T`.
    pub scaled: f64,
    /// `k (h_rate + ∫ f dμ)` from the closed-form entropy rate.
    pub exact: f64,
    pub holds: bool,
}

/// `P_μ(T^k, f_k) = k P_μ(T, f)` for a Markov measure, tolerance `1e-6`.
///
/// Cells of `(C^k)^n` under `T^k` are the cells of `C^{kn}` under `T`, and
/// `∫ f_k dμ = k ∫ f dμ` by invariance.
pub fn iterated_measure_pressure_check(mu: &MarkovMeasure, f: &Potential, k: usize, n_max: usize) -> Result<IteratedMeasureReport> {
    if k == 0 || n_max < 2 {
        return domain("need k >= 1 and n_max >= 2");
    }
    let depth = f.locality().unwrap_or(1).max(1);
    let c = CylinderPartition::cylinders(depth, mu.alphabet());
    let per_step = entropy_sequence(mu, &c, k * n_max)?;
    let block_increments: Vec<f64> = (1..=n_max)
        .map(|n| per_step.entropies[k * n - 1] - if n == 1 { 0.0 } else { per_step.entropies[k * (n - 1) - 1] })
        .collect();
    let h_iterated = block_increments.iter().cloned().fold(f64::INFINITY, f64::min);
    let integral = mu.integral(f)?;
    let iterated = h_iterated + k as f64 * integral;
    let single = measure_pressure(mu, f, &[c], n_max)?;
    let scaled = k as f64 * single.value;
    let exact = k as f64 * (mu.entropy_rate() + integral);
    let holds = (iterated - scaled).abs() <= 1e-6 && (iterated - exact).abs() <= 1e-6;
    Ok(IteratedMeasureReport { k, iterated, scaled, exact, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{symbolic_scaffold, Subshift};

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn integral_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 1).unwrap();
        let f = Potential::indicator(&[0], 2, 1.0).unwrap();
        assert_eq!(FiniteMeasure::zero().integral(&f, &s).unwrap(), 0.0);
        let u = FiniteMeasure::uniform(&[0, 1]).unwrap();
        assert_eq!(u.integral(&f, &s).unwrap(), 0.5);
        assert!((u.integral(&Potential::constant(3.5), &s).unwrap() - 3.5).abs() < 1e-15);
    }

    #[test]
    fn partition_entropy_examples() {
        assert_eq!(entropy_of_masses([1.0, 0.0]), 0.0);
        assert!((entropy_of_masses([0.5, 0.5]) - LN2).abs() < 1e-15);
        // Hand value: (1/4) log 4 + (3/4) log(4/3).
        assert!((entropy_of_masses([0.25, 0.75]) - 0.562_335_144_618_4).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_examples() {
        // Ten points: C splits 0..5 / 5..10; K_0 = {4, 5}, K_1 = 0..4, K_2 = 6..10.
        let pts: Vec<usize> = (0..10).collect();
        let s = Scaffold::new(
            "line",
            pts.iter().map(|&i| crate::systems::PointData::coord(vec![i as f64])).collect(),
            pts.clone(),
            crate::systems::Metric::Euclidean,
            None,
            0.0,
        )
        .unwrap();
        let mu = FiniteMeasure::uniform(&pts).unwrap();
        let on = OnScaffold::new(&s, &mu).unwrap();
        let c = Partition::from_labels((0..10).map(|x| usize::from(x >= 5)).collect());
        let k = Partition::from_labels(
            (0..10).map(|x| if x == 4 || x == 5 { 0 } else if x < 4 { 1 } else { 2 }).collect(),
        );
        assert!(conditional_entropy(&on, &c, &c).unwrap().abs() < 1e-15);
        let h = partition_entropy(&on, &c).unwrap();
        assert!((conditional_entropy(&on, &c, &Partition::trivial(10)).unwrap() - h).abs() < 1e-15);
        let v = conditional_entropy(&on, &c, &k).unwrap();
        assert!((v - 0.2 * LN2).abs() < 1e-15);
    }

    #[test]
    fn dynamic_entropy_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 4).unwrap();
        let fixed = (0..s.len()).find(|&x| s.point(x).word.iter().all(|&a| a == 0)).unwrap();
        let dirac = FiniteMeasure::dirac(fixed);
        let c1 = Partition::from_labels((0..s.len()).map(|x| s.point(x).word[0] as usize).collect());
        let seq = dynamic_partition_entropy(&OnScaffold::new(&s, &dirac).unwrap(), &c1, 4).unwrap();
        assert!(seq.entropies.iter().all(|&h| h == 0.0));

        let b = MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap();
        let seq = dynamic_partition_entropy(&b, &CylinderPartition::cylinders(1, 2), 6).unwrap();
        assert!(seq.averages.iter().all(|&a| (a - LN2).abs() < 1e-12));

        // A non-invariant measure is rejected.
        let x = (0..s.len()).find(|&x| s.apply(x) != x).unwrap();
        let bad = FiniteMeasure::dirac(x);
        assert!(dynamic_partition_entropy(&OnScaffold::new(&s, &bad).unwrap(), &c1, 3).is_err());
    }

    #[test]
    fn ks_and_pressure_examples() {
        let b = MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap();
        let fam = [CylinderPartition::cylinders(1, 2), CylinderPartition::cylinders(2, 2)];
        assert!((ks_entropy(&b, &fam, 5).unwrap().value - LN2).abs() < 1e-12);
        let mp = measure_pressure(&b, &Potential::zero(), &fam, 5).unwrap();
        assert!((mp.value - LN2).abs() < 1e-12);
        let f = Potential::indicator(&[0], 2, 1.0).unwrap();
        let mp = measure_pressure(&b, &f, &fam, 5).unwrap();
        assert!((mp.value - (LN2 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_examples() {
        let b = MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap();
        let f = Potential::indicator(&[0], 2, 1.0).unwrap();
        let r = upper_bound_inequality_check(&b, &f, &CylinderPartition::cylinders(1, 2), 3).unwrap();
        assert!(r.holds);
        // RHS at n = 3 is log(1 + e).
        assert!((r.levels[2].rhs - (1.0 + 1f64.exp()).ln()).abs() < 1e-12);
        assert!((r.levels[2].lhs - (LN2 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn iterated_examples() {
        let b = MarkovMeasure::bernoulli(&[0.5, 0.5]).unwrap();
        for k in 1..=3 {
            let r = iterated_measure_pressure_check(&b, &Potential::zero(), k, 4).unwrap();
            assert!(r.holds);
            assert!((r.iterated - k as f64 * LN2).abs() < 1e-12);
        }
        let f = Potential::indicator(&[0], 2, 1.0).unwrap();
        let r = iterated_measure_pressure_check(&b, &f, 2, 4).unwrap();
        assert!((r.iterated - 2.0 * (LN2 + 0.5)).abs() < 1e-12);
    }
}
