use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// Strict mode rejects meanders with negative Morse indices; formal mode
/// lets the recursions run anyway, which is only meaningful as input to
/// suspension arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Formal,
}

/// The Morse indices `i_1, ..., i_N` along the meander.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorseVector {
    values: Vec<i64>,
}

impl MorseVector {
    /// `i_j` for 1-based `j`.
    pub fn get(&self, j: usize) -> i64 {
        self.values[j - 1]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// True iff some index is negative, i.e. the meander is not Morse.
    pub fn is_formal(&self) -> bool {
        self.values.iter().any(|&i| i < 0)
    }

    pub fn min(&self) -> i64 {
        *self.values.iter().min().unwrap()
    }

    pub fn max(&self) -> i64 {
        *self.values.iter().max().unwrap()
    }
}

/// Morse indices by the left-boundary recursion: `i_1 = 0` and
/// `i_{j+1} = i_j + (-1)^{j+1} sign(inv(j+1) - inv(j))`.
///
/// `i_N = 0` follows automatically for dissipative input; this is asserted,
/// never assumed.
pub fn morse_indices(sigma: &Permutation) -> Result<MorseVector> {
    if !sigma.is_dissipative() {
        return Err(Error::NotDissipative);
    }
    let n = sigma.n();
    let inv = sigma.inverse();
    let mut values = Vec::with_capacity(n);
    values.push(0i64);
    for j in 1..n {
        let step = sign(inv.apply(j + 1) as i64 - inv.apply(j) as i64);
        let turn = if j % 2 == 1 { step } else { -step };
        values.push(values[j - 1] + turn);
    }
    assert_eq!(values[n - 1], 0, "i_N must close at 0 for dissipative input");
    // j and i_j always have opposite parity.
    debug_assert!(values
        .iter()
        .enumerate()
        .all(|(idx, &i)| (idx as i64 + 1 + i) % 2 == 1));
    Ok(MorseVector { values })
}

/// True iff the recursion yields nonnegative indices everywhere.
pub fn is_morse(sigma: &Permutation) -> Result<bool> {
    Ok(!morse_indices(sigma)?.is_formal())
}

fn sign(x: i64) -> i64 {
    assert_ne!(x, 0, "sign(0) cannot occur: preimages are distinct");
    if x > 0 {
        1
    } else {
        -1
    }
}

/// The table of zero numbers `z_jk = z(h0(j) - h0(k))`, with Morse indices
/// on the diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZeroMatrix {
    n: usize,
    /// Row-major, 1-based semantics via `get`.
    z: Vec<i64>,
}

impl ZeroMatrix {
    /// `z_jk` for 1-based `j, k`.
    pub fn get(&self, j: usize, k: usize) -> i64 {
        self.z[(j - 1) * self.n + (k - 1)]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn set(&mut self, j: usize, k: usize, v: i64) {
        self.z[(j - 1) * self.n + (k - 1)] = v;
    }

    /// Off-diagonal symmetry; the recursion fills columns independently, so
    /// this is a consistency statement rather than a construction artifact.
    pub fn is_symmetric(&self) -> bool {
        for j in 1..=self.n {
            for k in 1..j {
                if self.get(j, k) != self.get(k, j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Fills the zero-number table by the four-clause recursion: diagonal
/// `z_kk = i_k`; boundary row `z_1k = 0`; base `z_{k+1,k} = min(i_k, i_{k+1})`;
/// and the signed half-step otherwise. The half-step bracket is a difference
/// of two signs and therefore even; this is asserted rather than assumed.
pub fn zero_numbers(sigma: &Permutation, mode: Mode) -> Result<ZeroMatrix> {
    let iv = morse_indices(sigma)?;
    if mode == Mode::Strict {
        if let Some(pos) = iv.values().iter().position(|&i| i < 0) {
            return Err(Error::NotMorse {
                position: pos + 1,
                value: iv.get(pos + 1),
            });
        }
    }
    let n = sigma.n();
    let inv = sigma.inverse();
    let mut zm = ZeroMatrix {
        n,
        z: vec![0; n * n],
    };
    for k in 1..=n {
        // Column k from the bottom row upward; the diagonal and the cell
        // right above it restart the recursion.
        if k != 1 {
            zm.set(1, k, 0);
        } else {
            zm.set(1, 1, iv.get(1));
        }
        for j in 1..n {
            let value = if j + 1 == k {
                iv.get(k)
            } else if j == k {
                iv.get(k).min(iv.get(k + 1))
            } else {
                let bracket = sign(inv.apply(j + 1) as i64 - inv.apply(k) as i64)
                    - sign(inv.apply(j) as i64 - inv.apply(k) as i64);
                assert!(bracket % 2 == 0);
                let step = if j % 2 == 1 { bracket / 2 } else { -bracket / 2 };
                zm.get(j, k) + step
            };
            zm.set(j + 1, k, value);
        }
        if k != n {
            assert_eq!(zm.get(n, k), 0, "z_Nk must close at 0");
        }
    }
    debug_assert!(zm.is_symmetric());
    Ok(zm)
}

/// Morse counts `mu_i = #{j : i_j = i}`, optionally pointed by the formal
/// count `mu_{-1} = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorsePolynomial {
    counts: BTreeMap<i64, usize>,
}

impl MorsePolynomial {
    pub fn from_counts(counts: BTreeMap<i64, usize>) -> MorsePolynomial {
        let mut counts = counts;
        counts.retain(|_, c| *c > 0);
        MorsePolynomial { counts }
    }

    pub fn mu(&self, i: i64) -> usize {
        self.counts.get(&i).copied().unwrap_or(0)
    }

    /// Top Morse level with a nonzero count.
    pub fn degree(&self) -> i64 {
        *self.counts.keys().max().expect("nonempty counts")
    }

    pub fn min_level(&self) -> i64 {
        *self.counts.keys().min().expect("nonempty counts")
    }

    pub fn counts(&self) -> &BTreeMap<i64, usize> {
        &self.counts
    }

    /// Total number of counted vertices.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Counts as a dense vector from `min_level` upward.
    pub fn dense(&self) -> Vec<usize> {
        (self.min_level()..=self.degree()).map(|i| self.mu(i)).collect()
    }

    /// Symmetry `mu_i = mu_{d-1-i}` for `-1 <= i <= d`, the necessary
    /// condition for a time-reversible pointed graph.
    pub fn is_palindromic_pointed(&self) -> bool {
        let d = self.degree();
        (-1..=d).all(|i| self.mu(i) == self.mu(d - 1 - i))
    }
}

/// Tallies the Morse indices of a Morse meander. With `pointed`, the
/// distinguished vertex is counted at level -1.
pub fn morse_polynomial(sigma: &Permutation, pointed: bool) -> Result<MorsePolynomial> {
    morse_polynomial_with_mode(sigma, pointed, Mode::Strict)
}

pub fn morse_polynomial_with_mode(
    sigma: &Permutation,
    pointed: bool,
    mode: Mode,
) -> Result<MorsePolynomial> {
    let iv = morse_indices(sigma)?;
    if mode == Mode::Strict {
        if let Some(pos) = iv.values().iter().position(|&i| i < 0) {
            return Err(Error::NotMorse {
                position: pos + 1,
                value: iv.get(pos + 1),
            });
        }
    }
    let mut counts = BTreeMap::new();
    for &i in iv.values() {
        *counts.entry(i).or_insert(0) += 1;
    }
    if pointed {
        *counts.entry(-1).or_insert(0) += 1;
    }
    Ok(MorsePolynomial::from_counts(counts))
}
