use std::sync::OnceLock;

use serde::Serialize;

use crate::error::Result;
use crate::invariants;
use crate::permutation::Permutation;

/// Which side of the horizontal axis an arc lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

/// A half-circle arc of the meander, stored by its two axis positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Arc {
    pub side: Side,
    /// Smaller axis endpoint.
    pub a: usize,
    /// Larger axis endpoint.
    pub b: usize,
}

impl Arc {
    pub fn new(side: Side, x: usize, y: usize) -> Arc {
        debug_assert_ne!(x, y);
        Arc {
            side,
            a: x.min(y),
            b: x.max(y),
        }
    }

    /// Two same-side arcs cross iff their endpoints interleave.
    pub fn crosses(&self, other: &Arc) -> bool {
        if self.side != other.side {
            return false;
        }
        let (a, b, c, d) = (self.a, self.b, other.a, other.b);
        (a < c && c < b && b < d) || (c < a && a < d && d < b)
    }
}

/// A meander: a permutation together with the upper and lower arc sets it
/// induces, plus lazily computed validation flags.
///
/// Values are immutable after construction; the memoized flags use
/// compute-once cells and are safe to share across threads.
#[derive(Debug, Clone)]
pub struct Meander {
    sigma: Permutation,
    upper: Vec<Arc>,
    lower: Vec<Arc>,
    dissipative: OnceLock<bool>,
    jordan: OnceLock<bool>,
    morse: OnceLock<bool>,
}

impl Meander {
    /// Derives the arc configuration of `sigma`: the meander path joins
    /// meander positions (2t-1, 2t) above the axis and (2t, 2t+1) below,
    /// which on the axis appear at the preimages under `sigma`.
    pub fn from_sigma(sigma: Permutation) -> Meander {
        let n = sigma.n();
        let inv = sigma.inverse();
        let mut upper = Vec::with_capacity((n - 1) / 2);
        let mut lower = Vec::with_capacity((n - 1) / 2);
        for t in 1..=(n - 1) / 2 {
            upper.push(Arc::new(Side::Upper, inv.apply(2 * t - 1), inv.apply(2 * t)));
            lower.push(Arc::new(Side::Lower, inv.apply(2 * t), inv.apply(2 * t + 1)));
        }
        upper.sort();
        lower.sort();
        Meander {
            sigma,
            upper,
            lower,
            dissipative: OnceLock::new(),
            jordan: OnceLock::new(),
            morse: OnceLock::new(),
        }
    }

    /// Rebuilds a meander from explicit arcs by walking the curve from axis
    /// position 1 and recovering the permutation. Fails if the arcs do not
    /// form a single path visiting every vertex and ending at axis position N.
    pub(crate) fn from_arcs(n: usize, upper: &[(usize, usize)], lower: &[(usize, usize)]) -> Result<Meander> {
        let sigma = walk_arcs(n, upper, lower)?;
        Ok(Meander::from_sigma(sigma))
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn n(&self) -> usize {
        self.sigma.n()
    }

    pub fn upper_arcs(&self) -> &[Arc] {
        &self.upper
    }

    pub fn lower_arcs(&self) -> &[Arc] {
        &self.lower
    }

    /// `sigma(1)=1` and `sigma(N)=N`.
    pub fn is_dissipative(&self) -> bool {
        *self
            .dissipative
            .get_or_init(|| self.sigma.is_dissipative())
    }

    /// No two same-side arcs cross. Pairwise comparison is quadratic in the
    /// number of arcs, which stays tiny at the sizes this crate targets.
    pub fn is_jordan(&self) -> bool {
        *self.jordan.get_or_init(|| {
            for arcs in [&self.upper, &self.lower] {
                for (i, x) in arcs.iter().enumerate() {
                    for y in &arcs[i + 1..] {
                        if x.crosses(y) {
                            return false;
                        }
                    }
                }
            }
            true
        })
    }

    /// All Morse indices of the recursion are nonnegative. False for
    /// non-dissipative input, where the recursion has no meaning.
    pub fn is_morse(&self) -> bool {
        *self.morse.get_or_init(|| {
            invariants::morse_indices(&self.sigma)
                .map(|iv| !iv.is_formal())
                .unwrap_or(false)
        })
    }

    /// Dissipative Morse meander that is Jordan: a Sturm meander.
    pub fn is_sturm(&self) -> bool {
        self.is_dissipative() && self.is_jordan() && self.is_morse()
    }

    /// Number of positions `j` with `|sigma(j+1) - sigma(j)| = 1`; each nose
    /// is the innermost arc of a nest.
    pub fn nose_count(&self) -> usize {
        let n = self.n();
        (1..n)
            .filter(|&j| {
                let a = self.sigma.apply(j);
                let b = self.sigma.apply(j + 1);
                a.abs_diff(b) == 1
            })
            .count()
    }
}

/// Walks a single alternating path through the given arcs, starting upward
/// from axis position 1, and returns the permutation sending axis positions
/// to meander positions.
fn walk_arcs(n: usize, upper: &[(usize, usize)], lower: &[(usize, usize)]) -> Result<Permutation> {
    use crate::error::Error;

    let mut upper_partner = vec![0usize; n + 1];
    let mut lower_partner = vec![0usize; n + 1];
    for (side_arcs, partner) in [(upper, &mut upper_partner), (lower, &mut lower_partner)] {
        for &(x, y) in side_arcs {
            if x == y || x == 0 || y == 0 || x > n || y > n || partner[x] != 0 || partner[y] != 0 {
                return Err(Error::WalkFailed {
                    step: 0,
                    reason: format!("malformed arc ({x},{y})"),
                });
            }
            partner[x] = y;
            partner[y] = x;
        }
    }

    let mut meander_pos_of_axis = vec![0usize; n + 1];
    let mut pos = 1usize;
    for m in 1..=n {
        if meander_pos_of_axis[pos] != 0 {
            return Err(Error::WalkFailed {
                step: m,
                reason: format!("curve closed prematurely at axis position {pos}"),
            });
        }
        meander_pos_of_axis[pos] = m;
        if m < n {
            let partner = if m % 2 == 1 {
                upper_partner[pos]
            } else {
                lower_partner[pos]
            };
            if partner == 0 {
                return Err(Error::WalkFailed {
                    step: m,
                    reason: format!("no arc to continue from axis position {pos}"),
                });
            }
            pos = partner;
        }
    }
    if pos != n {
        return Err(Error::WalkFailed {
            step: n,
            reason: format!("walk terminated at axis position {pos}, expected {n}"),
        });
    }
    Permutation::new(meander_pos_of_axis[1..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meander(text: &str) -> Meander {
        Meander::from_sigma(text.parse().unwrap())
    }

    #[test]
    fn identity_arcs() {
        let m = meander("1,2,3");
        assert_eq!(m.upper_arcs(), &[Arc::new(Side::Upper, 1, 2)]);
        assert_eq!(m.lower_arcs(), &[Arc::new(Side::Lower, 2, 3)]);
    }

    #[test]
    fn nested_arcs() {
        let m = meander("1,4,3,2,5");
        assert_eq!(
            m.upper_arcs(),
            &[Arc::new(Side::Upper, 1, 4), Arc::new(Side::Upper, 2, 3)]
        );
        assert_eq!(
            m.lower_arcs(),
            &[Arc::new(Side::Lower, 2, 5), Arc::new(Side::Lower, 3, 4)]
        );
        assert!(m.is_jordan());
    }

    #[test]
    fn arc_counts_match_vertex_count() {
        let m = meander("1,8,5,4,9,10,3,6,7,2,11");
        assert_eq!(m.upper_arcs().len(), 5);
        assert_eq!(m.lower_arcs().len(), 5);
        assert!(m.is_dissipative());
        assert!(m.is_jordan());
    }

    #[test]
    fn dissipative_check() {
        assert!(meander("1,2,3").is_dissipative());
        assert!(!meander("2,1,3").is_dissipative());
    }

    #[test]
    fn crossing_configuration_is_not_jordan() {
        let a = Arc::new(Side::Upper, 1, 3);
        let b = Arc::new(Side::Upper, 2, 4);
        assert!(a.crosses(&b));
        assert!(b.crosses(&a));
        let c = Arc::new(Side::Lower, 1, 3);
        assert!(!a.crosses(&c));
        // (1,3,2,4,5) derives the interleaving upper arcs {1,3} and {2,4}.
        let m = meander("1,3,2,4,5");
        assert!(m.is_dissipative());
        assert!(!m.is_jordan());
    }

    #[test]
    fn nose_counts() {
        assert_eq!(meander("1,4,3,2,5").nose_count(), 2);
        assert_eq!(meander("1,8,5,4,9,10,3,6,7,2,11").nose_count(), 3);
        assert_eq!(meander("1,2,3").nose_count(), 2);
    }

    #[test]
    fn walk_recovers_permutation() {
        // The 3-nose meander with p=3, q=2 written as explicit arcs.
        let upper = [(1, 6), (2, 5), (3, 4), (7, 10), (8, 9)];
        let lower = [(2, 11), (3, 10), (4, 9), (5, 8), (6, 7)];
        let m = Meander::from_arcs(11, &upper, &lower).unwrap();
        assert_eq!(m.sigma().to_text(), "1,10,5,6,9,2,3,8,7,4,11");
    }

    #[test]
    fn walk_detects_premature_closure() {
        // Upper {1,2} followed by lower {1,2} closes a loop after two steps.
        let upper = [(1, 2), (3, 4)];
        let lower = [(1, 2), (4, 5)];
        assert!(Meander::from_arcs(5, &upper, &lower).is_err());
    }

    /// Geometric crossing oracle: two same-side half-circles drawn on integer
    /// endpoints intersect transversally iff the full circles meet at a point
    /// strictly off the axis. With doubled coordinates (A = a+b, R = b-a),
    /// this is the integer predicate (D^2 + R1^2 - R2^2)^2 < 4 D^2 R1^2 with
    /// D = A2 - A1.
    fn circles_cross(x: &Arc, y: &Arc) -> bool {
        if x.side != y.side {
            return false;
        }
        let (a1, r1) = ((x.a + x.b) as i64, (x.b - x.a) as i64);
        let (a2, r2) = ((y.a + y.b) as i64, (y.b - y.a) as i64);
        let d = a2 - a1;
        if d == 0 {
            return false;
        }
        let lhs = d * d + r1 * r1 - r2 * r2;
        lhs * lhs < 4 * d * d * r1 * r1
    }

    fn permutations_fixing_ends(n: usize) -> Vec<Permutation> {
        fn heap(values: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
            if k <= 1 {
                out.push(values.clone());
                return;
            }
            for i in 0..k {
                heap(values, k - 1, out);
                if k % 2 == 0 {
                    values.swap(i, k - 1);
                } else {
                    values.swap(0, k - 1);
                }
            }
        }
        let mut middle: Vec<usize> = (2..n).collect();
        let mut all = Vec::new();
        let k = middle.len();
        heap(&mut middle, k, &mut all);
        all.into_iter()
            .map(|mid| {
                let mut image = vec![1];
                image.extend(mid);
                image.push(n);
                Permutation::new(image).unwrap()
            })
            .collect()
    }

    #[test]
    fn jordan_agrees_with_geometric_oracle_exhaustively() {
        for n in [3usize, 5, 7, 9] {
            for sigma in permutations_fixing_ends(n) {
                let m = Meander::from_sigma(sigma);
                let mut geometric = true;
                'outer: for arcs in [m.upper_arcs(), m.lower_arcs()] {
                    for (i, x) in arcs.iter().enumerate() {
                        for y in &arcs[i + 1..] {
                            if circles_cross(x, y) {
                                geometric = false;
                                break 'outer;
                            }
                        }
                    }
                }
                assert_eq!(
                    m.is_jordan(),
                    geometric,
                    "disagreement at sigma = {}",
                    m.sigma()
                );
            }
        }
    }
}
