//! Potentials `f = c + f0`, with `c` the value at infinity and `f0`
//! vanishing at infinity.

use serde::{Deserialize, Serialize};

use super::scaffold::Scaffold;
use super::symbolic::word_code;
use crate::error::{contract, domain, Result};

/// The part of a potential that vanishes at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PotentialCore {
    Zero,
    /// Locally constant: `values[code of the first depth symbols]`.
    Cylinder { depth: usize, alphabet: usize, values: Vec<f64> },
    /// Tent of the given height supported on `|m - center| < half_width`.
    Bump { center: i64, height: f64, half_width: f64 },
    /// One value per scaffold point.
    Table(Vec<f64>),
}

/// A continuous potential in decomposed form.
///
/// `at_infinity` is `None` when no decomposition is declared; such a
/// potential evaluates as `f0` and is rejected wherever the value at
/// infinity matters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub at_infinity: Option<f64>,
    pub core: PotentialCore,
}

impl Potential {
    pub fn zero() -> Self {
        Self { at_infinity: Some(0.0), core: PotentialCore::Zero }
    }

    pub fn constant(c: f64) -> Self {
        Self { at_infinity: Some(c), core: PotentialCore::Zero }
    }

    /// Indicator of the cylinder `[word]` scaled by `weight`.
    pub fn indicator(word: &[u8], alphabet: usize, weight: f64) -> Result<Self> {
        if word.is_empty() || word.iter().any(|&a| a as usize >= alphabet) {
            return domain("indicator word must be nonempty and over the alphabet");
        }
        let depth = word.len();
        let mut values = vec![0.0; alphabet.pow(depth as u32)];
        values[word_code(word, depth, alphabet)] = weight;
        Ok(Self { at_infinity: None, core: PotentialCore::Cylinder { depth, alphabet, values } })
    }

    pub fn cylinder(depth: usize, alphabet: usize, values: Vec<f64>) -> Result<Self> {
        if depth == 0 || values.len() != alphabet.pow(depth as u32) {
            return domain("cylinder potential needs alphabet^depth values");
        }
        Ok(Self { at_infinity: None, core: PotentialCore::Cylinder { depth, alphabet, values } })
    }

    pub fn bump(center: i64, height: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return domain("bump half width must be positive");
        }
        Ok(Self { at_infinity: Some(0.0), core: PotentialCore::Bump { center, height, half_width } })
    }

    pub fn table(values: Vec<f64>) -> Self {
        Self { at_infinity: None, core: PotentialCore::Table(values) }
    }

    /// `f + c`; a missing value at infinity stays missing.
    pub fn plus_constant(&self, c: f64) -> Self {
        match self.at_infinity {
            Some(a) => Self { at_infinity: Some(a + c), core: self.core.clone() },
            None => {
                let core = match &self.core {
                    PotentialCore::Zero => PotentialCore::Zero,
                    PotentialCore::Cylinder { depth, alphabet, values } => PotentialCore::Cylinder {
                        depth: *depth,
                        alphabet: *alphabet,
                        values: values.iter().map(|v| v + c).collect(),
                    },
                    PotentialCore::Table(v) => PotentialCore::Table(v.iter().map(|x| x + c).collect()),
                    PotentialCore::Bump { .. } => {
                        return Self { at_infinity: Some(c), core: self.core.clone() }
                    }
                };
                Self { at_infinity: None, core }
            }
        }
    }

    pub fn with_infinity(&self, c: f64) -> Self {
        Self { at_infinity: Some(c), core: self.core.clone() }
    }

    /// The constant part used by evaluation (`0` if undeclared).
    pub fn constant_part(&self) -> f64 {
        self.at_infinity.unwrap_or(0.0)
    }

    /// The value at infinity, required on non-compact spaces.
    pub fn require_decomposition(&self) -> Result<f64> {
        match self.at_infinity {
            Some(c) => Ok(c),
            None => contract("potential has no declared value at infinity"),
        }
    }

    /// Number of leading symbols the potential depends on, if locally constant.
    pub fn locality(&self) -> Option<usize> {
        match &self.core {
            PotentialCore::Zero => Some(1),
            PotentialCore::Cylinder { depth, .. } => Some(*depth),
            _ => None,
        }
    }

    pub fn core_at(&self, scaffold: &Scaffold, x: usize) -> Result<f64> {
        let p = scaffold.point(x);
        if p.at_infinity {
            return Ok(0.0);
        }
        Ok(match &self.core {
            PotentialCore::Zero => 0.0,
            PotentialCore::Cylinder { depth, alphabet, values } => {
                if p.word.is_empty() {
                    return domain("cylinder potential needs symbolic points");
                }
                if p.word.iter().any(|&a| a as usize >= *alphabet) {
                    return domain("point word outside the potential's alphabet");
                }
                values[word_code(&p.word, *depth, *alphabet)]
            }
            PotentialCore::Bump { center, height, half_width } => {
                let m = match p.integer {
                    Some(m) => m,
                    None => return domain("bump potential needs integer points"),
                };
                height * (1.0 - ((m - center).abs() as f64) / half_width).max(0.0)
            }
            PotentialCore::Table(v) => {
                if v.len() != scaffold.len() {
                    return domain("potential table length differs from scaffold size");
                }
                v[x]
            }
        })
    }

    /// `f(x)` for every scaffold point.
    pub fn values_on(&self, scaffold: &Scaffold) -> Result<Vec<f64>> {
        let c = self.constant_part();
        (0..scaffold.len()).map(|x| Ok(c + self.core_at(scaffold, x)?)).collect()
    }

    /// Largest `|f0|` on points within `delta` of infinity, per grid value
    /// `2^-k`; empty on compact scaffolds.
    pub fn decay_profile(&self, scaffold: &Scaffold) -> Result<Vec<(f64, f64)>> {
        let inf = match scaffold.infinity_distances() {
            Some(v) => v,
            None => return Ok(Vec::new()),
        };
        let min = inf.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut out = Vec::new();
        let mut delta = 1.0;
        while delta > min {
            let mut sup = 0.0f64;
            for (x, &d) in inf.iter().enumerate() {
                if d < delta {
                    sup = sup.max(self.core_at(scaffold, x)?.abs());
                }
            }
            out.push((delta, sup));
            delta /= 2.0;
        }
        Ok(out)
    }
}

pub fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}
