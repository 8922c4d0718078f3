//! Covers, partitions, joins, refinement, dynamical iteration and the
//! combinatorial lemmas about admissible partitions.
//!
//! ```text
//! A ∨ B = { a ∩ b ≠ ∅ }
//! A^n   = A ∨ T^{-1} A ∨ … ∨ T^{-(n-1)} A
//! A ≺ B ⟺ every b ∈ B lies in some a ∈ A
//! ```

pub mod arc_cover;
mod cover;
mod partition;
pub mod set_cover;

pub use cover::{iterate_cover, iterates, join, preimage_cover, refines, Cover};
pub use partition::Partition;
pub use set_cover::{min_weight_set_cover, BoundDirection, CoverSolution, SolverMode, DEFAULT_BUDGET};

use fixedbitset::FixedBitSet;

use crate::error::{domain, Error, Result};
use crate::systems::{ball_cover, Scaffold};

/// `{K_0 ∪ K_1, …, K_0 ∪ K_n}` for an admissible partition with `n >= 1`
/// compact members. Every subset of a scaffold is open, so openness of the
/// unions holds trivially.
pub fn cover_from_admissible_partition(scaffold: &Scaffold, k: &Partition) -> Result<Cover> {
    if k.len() < 2 {
        return domain("admissible partition needs at least one compact member besides K_0");
    }
    if !k.is_admissible(scaffold) {
        return domain("partition is not admissible: a member other than K_0 is not compact");
    }
    let all = k.members();
    let k0 = &all[0];
    let members: Vec<FixedBitSet> = all[1..]
        .iter()
        .map(|kj| {
            let mut m = k0.clone();
            m.union_with(kj);
            m
        })
        .filter(|m| !m.is_clear())
        .collect();
    Cover::new(scaffold, members)
}

/// Largest `ε = (diam/2)·2^-k` with `A ≺ B_ε`. Radii below the smallest
/// point separation give singleton balls and are not tried.
pub fn lebesgue_number(scaffold: &Scaffold, a: &Cover) -> Result<f64> {
    if a.universe() != scaffold.len() {
        return domain("cover does not match the scaffold");
    }
    if !a.is_admissible() {
        return domain("lebesgue number needs an admissible cover");
    }
    let floor = scaffold.min_separation();
    let mut eps = scaffold.diameter() / 2.0;
    if eps == 0.0 {
        return Ok(1.0);
    }
    while eps > floor {
        if refines(&ball_cover(scaffold, eps)?, a) {
            return Ok(eps);
        }
        eps /= 2.0;
    }
    Err(Error::ScaffoldTooCoarse(format!(
        "no ball radius above the point separation {floor:.3e} refines the cover"
    )))
}

/// Largest number of members of `K^k` met by a single member of `B^k`.
pub fn intersection_count(scaffold: &Scaffold, k_part: &Partition, b: &Cover, k: usize) -> Result<usize> {
    if k == 0 {
        return domain("intersection count needs k >= 1");
    }
    let from_k = cover_from_admissible_partition(scaffold, k_part)?;
    if !refines(b, &from_k) {
        return domain("cover does not refine the cover built from the partition");
    }
    let bk = iterate_cover(scaffold, b, k)?;
    let kk = k_part.iterate(scaffold, k)?;
    Ok(bk
        .members()
        .iter()
        .map(|m| m.ones().map(|x| kk.label(x)).collect::<std::collections::BTreeSet<_>>().len())
        .max()
        .unwrap_or(0))
}

/// Cardinality of a minimum subcover, with its bound direction.
pub fn min_subcover_cardinality(a: &Cover, mode: SolverMode) -> Result<(usize, BoundDirection)> {
    let w = vec![1.0; a.len()];
    let sol = min_weight_set_cover(a.universe(), a.members(), &w, mode, DEFAULT_BUDGET);
    if sol.exhausted {
        return Err(Error::BudgetExceeded { budget: DEFAULT_BUDGET });
    }
    Ok((sol.chosen.len(), sol.bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{symbolic_scaffold, translation_scaffold, Subshift};

    fn cylinders(s: &Scaffold, depth: usize) -> Cover {
        let groups = s.prefix_groups(depth);
        let lists: Vec<Vec<usize>> = groups.into_values().collect();
        Cover::from_id_lists(s, &lists).unwrap()
    }

    fn second_coordinate(s: &Scaffold) -> Cover {
        let lists: Vec<Vec<usize>> = (0..2u8)
            .map(|a| (0..s.len()).filter(|&x| s.point(x).word[1] == a).collect())
            .collect();
        Cover::from_id_lists(s, &lists).unwrap()
    }

    #[test]
    fn join_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 4).unwrap();
        let a = cylinders(&s, 1);
        assert!(join(&a, &a).unwrap().same_members(&a));
        assert!(join(&a, &Cover::whole(&s)).unwrap().same_members(&a));
        let j = join(&a, &second_coordinate(&s)).unwrap();
        assert!(j.same_members(&cylinders(&s, 2)));
        assert!(refines(&j, &a));
    }

    #[test]
    fn iterate_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 4).unwrap();
        let a = cylinders(&s, 1);
        assert!(iterate_cover(&s, &a, 1).unwrap().same_members(&a));
        assert_eq!(iterate_cover(&s, &a, 3).unwrap().len(), 8);
        assert!(iterate_cover(&s, &a, 0).is_err());
        let g = symbolic_scaffold(&Subshift::golden_mean(), 4).unwrap();
        assert_eq!(iterate_cover(&g, &cylinders(&g, 1), 3).unwrap().len(), 5);
    }

    #[test]
    fn refines_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 3).unwrap();
        let (c1, c2) = (cylinders(&s, 1), cylinders(&s, 2));
        assert!(refines(&c1, &c1));
        assert!(refines(&c2, &c1));
        assert!(!refines(&c1, &c2));
    }

    #[test]
    fn cover_from_partition_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 3).unwrap();
        let trivial = Partition::trivial(s.len());
        assert!(cover_from_admissible_partition(&s, &trivial).is_err());
        let mut lists = vec![Vec::new()];
        lists.extend(s.prefix_groups(1).into_values());
        let k = Partition::from_id_lists(s.len(), &lists).unwrap();
        let c = cover_from_admissible_partition(&s, &k).unwrap();
        assert!(c.same_members(&cylinders(&s, 1)));
        assert!(c.is_strongly_admissible());

        let t = translation_scaffold(16).unwrap();
        let labels = (0..t.len())
            .map(|x| match t.point(x).integer.unwrap() {
                m if m.abs() > 3 => 0,
                m if m <= 0 => 1,
                _ => 2,
            })
            .collect();
        let k = Partition::from_labels(labels);
        assert!(k.is_admissible(&t));
        let c = cover_from_admissible_partition(&t, &k).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.is_strongly_admissible());
        let eps = lebesgue_number(&t, &c).unwrap();
        assert!(eps > 0.0);
        assert!(refines(&ball_cover(&t, eps).unwrap(), &c));

        // A member reaching infinity other than K_0 breaks admissibility.
        let bad = Partition::from_labels(
            (0..t.len()).map(|x| usize::from(t.point(x).integer.unwrap() > 0)).collect(),
        );
        assert!(cover_from_admissible_partition(&t, &bad).is_err());
    }

    #[test]
    fn lebesgue_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 5).unwrap();
        assert_eq!(lebesgue_number(&s, &cylinders(&s, 1)).unwrap(), 0.5);
        assert_eq!(lebesgue_number(&s, &Cover::whole(&s)).unwrap(), 0.5);
    }

    #[test]
    fn intersection_count_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 4).unwrap();
        let mut lists = vec![Vec::new()];
        lists.extend(s.prefix_groups(1).into_values());
        let k = Partition::from_id_lists(s.len(), &lists).unwrap();
        let b = cover_from_admissible_partition(&s, &k).unwrap();
        assert_eq!(intersection_count(&s, &k, &b, 1).unwrap(), 1);
        assert_eq!(intersection_count(&s, &k, &cylinders(&s, 2), 2).unwrap(), 1);
        assert!(intersection_count(&s, &k, &Cover::whole(&s), 1).is_err());
    }

    #[test]
    fn min_subcover_examples() {
        let s = symbolic_scaffold(&Subshift::full(2), 4).unwrap();
        assert_eq!(min_subcover_cardinality(&Cover::whole(&s), SolverMode::Exact).unwrap().0, 1);
        assert_eq!(min_subcover_cardinality(&cylinders(&s, 3), SolverMode::Exact).unwrap().0, 8);
        let mut m = cylinders(&s, 1).members().to_vec();
        m.insert(0, s.full_set());
        let redundant = Cover::new(&s, m).unwrap();
        assert_eq!(min_subcover_cardinality(&redundant, SolverMode::Exact).unwrap(), (1, BoundDirection::Exact));
    }
}
