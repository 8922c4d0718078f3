use serde_json::json;

use crate::error::{domain, Result};
use crate::systems::{Potential, PotentialCore, Subshift};

/// Stationary Markov measure on a subshift of finite type.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovMeasure {
    shift: Subshift,
    p: Vec<Vec<f64>>,
    pi: Vec<f64>,
}

/// Solves `π (P - I) = 0`, `Σ π = 1` by Gaussian elimination with partial
/// pivoting.
fn stationary(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = p.len();
    // Rows of the transposed system; the last equation is replaced by Σ π = 1.
    let mut a: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            let mut row: Vec<f64> = (0..k).map(|j| p[j][i] - if i == j { 1.0 } else { 0.0 }).collect();
            row.push(0.0);
            row
        })
        .collect();
    a[k - 1] = vec![1.0; k + 1];
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty");
        if a[piv][col].abs() < 1e-14 {
            return domain("stationary distribution is not unique");
        }
        a.swap(col, piv);
        for r in 0..k {
            if r != col {
                let factor = a[r][col] / a[col][col];
                for c in col..=k {
                    a[r][c] -= factor * a[col][c];
                }
            }
        }
    }
    Ok((0..k).map(|i| (a[i][k] / a[i][i]).max(0.0)).collect())
}

impl MarkovMeasure {
    pub fn new(shift: Subshift, p: Vec<Vec<f64>>) -> Result<Self> {
        Self::validate(&shift, &p)?;
        let pi = stationary(&p)?;
        Self::with_stationary(shift, p, pi)
    }

    pub fn with_stationary(shift: Subshift, p: Vec<Vec<f64>>, pi: Vec<f64>) -> Result<Self> {
        Self::validate(&shift, &p)?;
        let k = shift.alphabet();
        if pi.len() != k || pi.iter().any(|&v| !(v >= 0.0)) || (pi.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return domain("stationary vector must be a probability vector over the alphabet");
        }
        for j in 0..k {
            let v: f64 = (0..k).map(|i| pi[i] * p[i][j]).sum();
            if (v - pi[j]).abs() > 1e-12 {
                return domain(format!("πP differs from π at {j} by {:.3e}", (v - pi[j]).abs()));
            }
        }
        Ok(Self { shift, p, pi })
    }

    fn validate(shift: &Subshift, p: &[Vec<f64>]) -> Result<()> {
        let k = shift.alphabet();
        if p.len() != k || p.iter().any(|r| r.len() != k) {
            return domain("transition matrix size differs from the alphabet");
        }
        for (i, row) in p.iter().enumerate() {
            if row.iter().any(|&v| !(v >= 0.0)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return domain(format!("row {i} is not a probability vector"));
            }
            for (j, &v) in row.iter().enumerate() {
                if v > 0.0 && !shift.allowed(i as u8, j as u8) {
                    return domain(format!("transition {i}->{j} is forbidden by the subshift"));
                }
            }
        }
        Ok(())
    }

    /// Product measure with marginal `probs` on the full shift.
    pub fn bernoulli(probs: &[f64]) -> Result<Self> {
        let k = probs.len();
        if k == 0 {
            return domain("empty probability vector");
        }
        Self::with_stationary(Subshift::full(k), vec![probs.to_vec(); k], probs.to_vec())
    }

    pub fn shift(&self) -> &Subshift {
        &self.shift
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    pub fn alphabet(&self) -> usize {
        self.pi.len()
    }

    pub fn cylinder_probability(&self, word: &[u8]) -> f64 {
        match word.first() {
            None => 1.0,
            Some(&a) => word.windows(2).fold(self.pi[a as usize], |m, w| m * self.p[w[0] as usize][w[1] as usize]),
        }
    }

    /// Admissible words of length `len` with positive or zero probability.
    pub fn words(&self, len: usize) -> Vec<(Vec<u8>, f64)> {
        self.shift
            .admissible_words(len)
            .into_iter()
            .map(|w| {
                let m = self.cylinder_probability(&w);
                (w, m)
            })
            .collect()
    }

    /// `-Σ π_i P_ij log P_ij`.
    pub fn entropy_rate(&self) -> f64 {
        let mut h = 0.0;
        for (i, row) in self.p.iter().enumerate() {
            for &v in row {
                if v > 0.0 {
                    h -= self.pi[i] * v * v.ln();
                }
            }
        }
        h
    }

    /// `∫ f dμ` for a locally constant potential.
    pub fn integral(&self, f: &Potential) -> Result<f64> {
        let c = f.constant_part();
        Ok(c + match &f.core {
            PotentialCore::Zero => 0.0,
            PotentialCore::Cylinder { depth, alphabet, values } => {
                if *alphabet != self.alphabet() {
                    return domain("potential alphabet differs from the measure's");
                }
                self.words(*depth)
                    .iter()
                    .map(|(w, m)| m * values[crate::systems::symbolic::word_code(w, *depth, *alphabet)])
                    .sum()
            }
            _ => return domain("Markov integrals need a locally constant potential"),
        })
    }

    /// `{P: rows, pi: vector}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({ "P": self.p, "pi": self.pi })
    }
}
