//! Subshifts of finite type over a finite alphabet.
//!
//! Points of the full sequence space are coded by words; the scaffold for a
//! given depth consists of the periodic points whose period word is
//! cyclically admissible, so the shift acts on the scaffold as an exact
//! rotation of words.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// One-sided subshift of finite type given by a 0/1 transition matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subshift {
    transitions: Vec<Vec<bool>>,
}

impl Subshift {
    /// Validates that the matrix is square, nonempty and essential (every
    /// symbol has a successor and a predecessor).
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return domain("empty transition matrix");
        }
        if rows.iter().any(|r| r.len() != k) {
            return domain("transition matrix must be square");
        }
        if rows.iter().flatten().any(|&v| v > 1) {
            return domain("transition matrix entries must be 0 or 1");
        }
        let transitions: Vec<Vec<bool>> =
            rows.iter().map(|r| r.iter().map(|&v| v == 1).collect()).collect();
        for a in 0..k {
            if !transitions[a].iter().any(|&b| b) {
                return domain(format!("symbol {a} has no successor"));
            }
            if !(0..k).any(|b| transitions[b][a]) {
                return domain(format!("symbol {a} has no predecessor"));
            }
        }
        Ok(Self { transitions })
    }

    pub fn full(k: usize) -> Self {
        Self { transitions: vec![vec![true; k]; k] }
    }

    /// Binary shift forbidding the word `11`.
    pub fn golden_mean() -> Self {
        Self { transitions: vec![vec![true, true], vec![true, false]] }
    }

    pub fn alphabet(&self) -> usize {
        self.transitions.len()
    }

    pub fn allowed(&self, a: u8, b: u8) -> bool {
        self.transitions[a as usize][b as usize]
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.transitions
            .iter()
            .map(|r| r.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    pub fn is_admissible(&self, word: &[u8]) -> bool {
        word.iter().all(|&a| (a as usize) < self.alphabet())
            && word.windows(2).all(|w| self.allowed(w[0], w[1]))
    }

    /// Admissible words of length `len` in lexicographic order.
    pub fn admissible_words(&self, len: usize) -> Vec<Vec<u8>> {
        let k = self.alphabet() as u8;
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(words.len() * k as usize);
            for w in &words {
                for a in 0..k {
                    if w.last().is_none_or(|&l| self.allowed(l, a)) {
                        let mut v = w.clone();
                        v.push(a);
                        next.push(v);
                    }
                }
            }
            words = next;
        }
        words
    }

    /// Words of length `len` whose periodic continuation is admissible.
    pub fn periodic_words(&self, len: usize) -> Vec<Vec<u8>> {
        self.admissible_words(len)
            .into_iter()
            .filter(|w| self.allowed(w[len - 1], w[0]))
            .collect()
    }

    /// Smallest `p` with every entry of `M^p` positive.
    pub fn primitivity_exponent(&self) -> Result<usize> {
        let k = self.alphabet();
        // Wielandt bound.
        let limit = (k - 1) * (k - 1) + 1;
        let mut reach = self.transitions.clone();
        for p in 1..=limit.max(1) {
            if reach.iter().flatten().all(|&b| b) {
                return Ok(p);
            }
            let mut next = vec![vec![false; k]; k];
            for (i, row) in reach.iter().enumerate() {
                for (j, &r) in row.iter().enumerate() {
                    if r {
                        for (l, &t) in self.transitions[j].iter().enumerate() {
                            if t {
                                next[i][l] = true;
                            }
                        }
                    }
                }
            }
            reach = next;
        }
        Err(Error::Unsupported("transition matrix is not primitive".into()))
    }

    pub fn is_irreducible(&self) -> bool {
        let k = self.alphabet();
        (0..k).all(|start| {
            let mut seen = vec![false; k];
            let mut stack = vec![start];
            while let Some(a) = stack.pop() {
                for b in 0..k {
                    if self.transitions[a][b] && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            seen.iter().all(|&s| s)
        })
    }

    /// Period length whose periodic words realise every admissible word of
    /// length `depth` as a prefix.
    pub fn period_for_depth(&self, depth: usize) -> Result<usize> {
        Ok(depth.max(1) + self.primitivity_exponent()? - 1)
    }
}

/// Base-`k` code of the first `depth` symbols of the periodic word `w`.
pub fn word_code(w: &[u8], depth: usize, k: usize) -> usize {
    (0..depth).fold(0, |acc, i| acc * k + w[i % w.len()] as usize)
}
