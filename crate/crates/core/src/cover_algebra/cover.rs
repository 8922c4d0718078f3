use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use serde_json::json;

use crate::error::{domain, Result};
use crate::systems::Scaffold;

/// A finite cover of a scaffold by distinct nonempty subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct Cover {
    members: Vec<FixedBitSet>,
    universe: usize,
    near_infinity: Option<FixedBitSet>,
    admissible: bool,
    strongly_admissible: bool,
}

fn flags(members: &[FixedBitSet], near: Option<&FixedBitSet>) -> (bool, bool) {
    match near {
        None => (true, true),
        Some(near) => {
            let ok: Vec<bool> = members.iter().map(|m| near.is_subset(m)).collect();
            (ok.iter().any(|&b| b), ok.iter().all(|&b| b))
        }
    }
}

impl Cover {
    /// Builds a cover, merging repeated members and keeping first-seen order.
    pub fn new(scaffold: &Scaffold, members: Vec<FixedBitSet>) -> Result<Self> {
        Self::with_context(scaffold.len(), scaffold.near_infinity().cloned(), members)
    }

    fn with_context(universe: usize, near_infinity: Option<FixedBitSet>, members: Vec<FixedBitSet>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut union = FixedBitSet::with_capacity(universe);
        let mut kept = Vec::with_capacity(members.len());
        for m in members {
            if m.len() != universe {
                return domain("cover member built over a different scaffold");
            }
            if m.is_clear() {
                return domain("cover members must be nonempty");
            }
            union.union_with(&m);
            if seen.insert(m.clone()) {
                kept.push(m);
            }
        }
        if union.count_ones(..) != universe {
            return domain("family does not cover the scaffold");
        }
        let (admissible, strongly_admissible) = flags(&kept, near_infinity.as_ref());
        Ok(Self { members: kept, universe, near_infinity, admissible, strongly_admissible })
    }

    /// The single-member cover `{X}`.
    pub fn whole(scaffold: &Scaffold) -> Self {
        Self::new(scaffold, vec![scaffold.full_set()]).expect("whole space covers")
    }

    pub fn from_id_lists(scaffold: &Scaffold, lists: &[Vec<usize>]) -> Result<Self> {
        let mut members = Vec::with_capacity(lists.len());
        for l in lists {
            let mut s = FixedBitSet::with_capacity(scaffold.len());
            for &x in l {
                scaffold.check_point(x)?;
                s.insert(x);
            }
            members.push(s);
        }
        Self::new(scaffold, members)
    }

    pub fn members(&self) -> &[FixedBitSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Some member contains a neighbourhood of infinity.
    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    /// Every member contains a neighbourhood of infinity.
    pub fn is_strongly_admissible(&self) -> bool {
        self.strongly_admissible
    }

    pub(crate) fn same_space(&self, other: &Cover) -> Result<()> {
        if self.universe != other.universe || self.near_infinity != other.near_infinity {
            return domain("covers live on different scaffolds");
        }
        Ok(())
    }

    /// Member-set equality, ignoring order.
    pub fn same_members(&self, other: &Cover) -> bool {
        let a: HashSet<&FixedBitSet> = self.members.iter().collect();
        let b: HashSet<&FixedBitSet> = other.members.iter().collect();
        a == b
    }

    pub(crate) fn rebuild(&self, members: Vec<FixedBitSet>) -> Result<Cover> {
        Self::with_context(self.universe, self.near_infinity.clone(), members)
    }

    /// `{members: [[ids…]…], distinguished: 0}`.
    pub fn to_json(&self) -> serde_json::Value {
        let members: Vec<Vec<usize>> = self.members.iter().map(|m| m.ones().collect()).collect();
        json!({ "members": members, "distinguished": 0 })
    }
}

/// All nonempty pairwise intersections, first occurrence kept.
pub fn join(a: &Cover, b: &Cover) -> Result<Cover> {
    a.same_space(b)?;
    let mut seen = HashSet::new();
    let mut members = Vec::new();
    for x in a.members() {
        for y in b.members() {
            let mut m = x.clone();
            m.intersect_with(y);
            if !m.is_clear() && !seen.contains(&m) {
                seen.insert(m.clone());
                members.push(m);
            }
        }
    }
    a.rebuild(members)
}

/// `T^{-j}` applied to every member (empty preimages dropped).
pub fn preimage_cover(scaffold: &Scaffold, a: &Cover, j: usize) -> Result<Cover> {
    check_universe(scaffold, a)?;
    let members = a
        .members()
        .iter()
        .map(|m| scaffold.preimage(m, j))
        .filter(|m| !m.is_clear())
        .collect();
    a.rebuild(members)
}

fn check_universe(scaffold: &Scaffold, a: &Cover) -> Result<()> {
    if a.universe() != scaffold.len() {
        return domain("cover does not match the scaffold");
    }
    Ok(())
}

/// `A^1, …, A^{n_max}` with `A^n = A^{n-1} ∨ T^{-(n-1)} A`.
pub fn iterates(scaffold: &Scaffold, a: &Cover, n_max: usize) -> Result<Vec<Cover>> {
    check_universe(scaffold, a)?;
    let orbits = scaffold.orbits(n_max);
    let mut out: Vec<Cover> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n == 1 {
            out.push(a.clone());
            continue;
        }
        let row = &orbits[n - 1];
        let pulled: Vec<FixedBitSet> = a
            .members()
            .iter()
            .map(|m| {
                let mut s = FixedBitSet::with_capacity(scaffold.len());
                for (x, &y) in row.iter().enumerate() {
                    if m.contains(y) {
                        s.insert(x);
                    }
                }
                s
            })
            .filter(|s| !s.is_clear())
            .collect();
        let prev = out.last().expect("n >= 2");
        out.push(join(prev, &a.rebuild(pulled)?)?);
    }
    Ok(out)
}

/// `A ∨ T^{-1} A ∨ … ∨ T^{-(n-1)} A`.
pub fn iterate_cover(scaffold: &Scaffold, a: &Cover, n: usize) -> Result<Cover> {
    if n == 0 {
        return domain("iterate_cover needs n >= 1");
    }
    Ok(iterates(scaffold, a, n)?.pop().expect("n >= 1"))
}

/// `A ≺ B`: every member of `b` lies inside some member of `a`.
pub fn refines(b: &Cover, a: &Cover) -> bool {
    b.universe() == a.universe()
        && b.members().iter().all(|m| a.members().iter().any(|big| m.is_subset(big)))
}
