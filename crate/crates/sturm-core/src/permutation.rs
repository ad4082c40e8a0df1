use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{1, ..., N}` with `N` odd, written in one-line notation.
///
/// This is the universal representation of a meander: the permutation sends
/// the position of a vertex along the horizontal axis to its position along
/// the meander curve. Equilibria are identified with meander positions, so
/// the axis position of vertex `v` is `sigma_inv(v)`.
///
/// All public indices and images are 1-based.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its 1-based image list, rejecting
    /// non-bijections and even lengths.
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if n % 2 == 0 {
            return Err(Error::EvenLength(n));
        }
        let mut seen = vec![false; n + 1];
        for &v in &image {
            if v == 0 || v > n || seen[v] {
                return Err(Error::NotBijective(n));
            }
            seen[v] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Permutation::new((1..=n).collect())
    }

    /// Number of vertices `N`.
    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// `sigma(j)` for 1-based `j`.
    pub fn apply(&self, j: usize) -> usize {
        self.image[j - 1]
    }

    /// The image as a 1-based slice (`slice[j-1] = sigma(j)`).
    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// The inverse permutation. This realizes the spatial reversal of the
    /// meander (the trivial equivalence that swaps the two boundary orders).
    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (j, &v) in self.image.iter().enumerate() {
            inv[v - 1] = j + 1;
        }
        Permutation { image: inv }
    }

    /// Conjugation by the position flip `j -> N+1-j`, i.e. the 180-degree
    /// rotation of the meander: `sigma^kappa(j) = N+1 - sigma(N+1-j)`.
    pub fn kappa(&self) -> Permutation {
        let n = self.n();
        let image = (1..=n).map(|j| n + 1 - self.apply(n + 1 - j)).collect();
        Permutation { image }
    }

    /// `sigma(1) == 1 && sigma(N) == N`: the meander enters upward at the
    /// first vertex and exits from below at the last.
    pub fn is_dissipative(&self) -> bool {
        self.apply(1) == 1 && self.apply(self.n()) == self.n()
    }

    /// The suspension `sigma~` in `S_{N+2}`: two overarching arcs are added,
    /// fixing 1 and N+2 and sending `j+1 -> N+2 - sigma(j)`.
    pub fn suspend(&self) -> Result<Permutation> {
        if !self.is_dissipative() {
            return Err(Error::NotDissipative);
        }
        let n = self.n();
        let mut image = Vec::with_capacity(n + 2);
        image.push(1);
        for j in 1..=n {
            image.push(n + 2 - self.apply(j));
        }
        image.push(n + 2);
        Ok(Permutation { image })
    }

    /// Iterated suspension.
    pub fn suspend_times(&self, times: usize) -> Result<Permutation> {
        let mut sigma = self.clone();
        for _ in 0..times {
            sigma = sigma.suspend()?;
        }
        Ok(sigma)
    }

    /// One-line text form, e.g. `1,8,5,4,9,10,3,6,7,2,11`.
    pub fn to_text(&self) -> String {
        self.image
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({})", self.to_text())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let image = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if image.is_empty() {
            return Err(Error::Parse(s.to_string()));
        }
        Permutation::new(image)
    }
}

#[derive(Serialize, Deserialize)]
struct PermutationJson {
    n: usize,
    sigma: Vec<usize>,
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PermutationJson {
            n: self.n(),
            sigma: self.image.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PermutationJson::deserialize(deserializer)?;
        if raw.sigma.len() != raw.n {
            return Err(serde::de::Error::custom(format!(
                "declared n={} but sigma has {} entries",
                raw.n,
                raw.sigma.len()
            )));
        }
        Permutation::new(raw.sigma).map_err(serde::de::Error::custom)
    }
}
