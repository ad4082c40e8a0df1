use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::connections::{ConnectionGraph, Reversor, VertexId, STAR};
use crate::error::{Error, Result};
use crate::invariants::MorsePolynomial;
use crate::meander::Meander;
use crate::permutation::Permutation;

/// Validated nest sizes of a primitive 3-nose meander: `p` upper-left arcs,
/// `q` upper-right arcs, and `r` present exactly when `p = r(q+1)`, the
/// Morse case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThreeNoseShape {
    pub p: usize,
    pub q: usize,
    pub r: Option<usize>,
}

impl ThreeNoseShape {
    pub fn new(p: usize, q: usize) -> Result<ThreeNoseShape> {
        if p < 2 {
            return Err(Error::NestTooSmall(p));
        }
        let g = gcd(p - 1, q + 1);
        if g != 1 {
            return Err(Error::NotCoprime { p, q, gcd: g });
        }
        let r = if p % (q + 1) == 0 { Some(p / (q + 1)) } else { None };
        Ok(ThreeNoseShape { p, q, r })
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Vertex names of the 3-nose family: tag `A` or `B`, an optional
/// superscript (absent for plain Chafee-Infante labels), and a subscript.
/// The distinguished vertex is `A^0_0` by convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EquilibriumLabel {
    pub tag: Tag,
    pub sup: Option<usize>,
    pub sub: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Tag {
    A,
    B,
}

impl EquilibriumLabel {
    pub fn new(tag: Tag, sup: usize, sub: usize) -> EquilibriumLabel {
        EquilibriumLabel {
            tag,
            sup: Some(sup),
            sub,
        }
    }

    pub fn plain(tag: Tag, sub: usize) -> EquilibriumLabel {
        EquilibriumLabel {
            tag,
            sup: None,
            sub,
        }
    }

    pub fn star() -> EquilibriumLabel {
        EquilibriumLabel::new(Tag::A, 0, 0)
    }

    /// Formal Morse level `j+k-1` for tag A, `j+k` for tag B.
    pub fn formal_level(&self) -> i64 {
        let j = self.sup.unwrap_or(0) as i64;
        let k = self.sub as i64;
        match self.tag {
            Tag::A => j + k - 1,
            Tag::B => j + k,
        }
    }
}

impl fmt::Display for EquilibriumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.tag {
            Tag::A => "A",
            Tag::B => "B",
        };
        match self.sup {
            Some(j) => write!(f, "{tag}^{j}_{}", self.sub),
            None => write!(f, "{tag}_{}", self.sub),
        }
    }
}

/// The dual vertex labelings of the Morse 3-nose meander with nest data
/// `(r, q)`: every label carries both a meander position (0 for the
/// distinguished vertex, prepended to the meander path) and an axis
/// position (N+1 for the distinguished vertex, appended to the axis path).
///
/// The two labelings are computed by independent formulas, one indexed
/// along the axis with parity cases on the superscript, one along the
/// meander with parity cases on the subscript; their consistency through
/// the closed-form permutation is asserted at construction.
pub struct LabelMap {
    r: usize,
    q: usize,
    n: usize,
    by_meander: Vec<EquilibriumLabel>,
    by_axis: Vec<EquilibriumLabel>,
    meander_pos: HashMap<EquilibriumLabel, usize>,
}

impl LabelMap {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Label at meander position `0..=N`; position 0 is the distinguished
    /// vertex.
    pub fn label_at_meander(&self, pos: usize) -> EquilibriumLabel {
        self.by_meander[pos]
    }

    /// Label at axis position `1..=N+1`; position N+1 is the distinguished
    /// vertex.
    pub fn label_at_axis(&self, pos: usize) -> EquilibriumLabel {
        self.by_axis[pos - 1]
    }

    /// Meander position of a label (0 for the distinguished vertex).
    pub fn meander_pos(&self, label: &EquilibriumLabel) -> Option<usize> {
        self.meander_pos.get(label).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = &EquilibriumLabel> {
        self.by_meander.iter()
    }
}

/// Both vertex labelings of the `(r, q)` family, per the dual closed-form
/// position formulas.
pub fn equilibrium_labels(r: usize, q: usize) -> LabelMap {
    assert!(r >= 1 && q >= 1);
    let n = 2 * (r + 1) * (q + 1) - 1;
    let mut by_meander: Vec<Option<EquilibriumLabel>> = vec![None; n + 1];
    let mut by_axis: Vec<Option<EquilibriumLabel>> = vec![None; n + 1];

    for j in 0..=r {
        for k in 0..=q {
            for tag in [Tag::A, Tag::B] {
                let label = EquilibriumLabel::new(tag, j, k);
                // Axis position, with parity cases on the superscript.
                let axis = if j % 2 == 1 {
                    match tag {
                        Tag::A => (q + 1) * (j - 1) + k + 1,
                        Tag::B => (q + 1) * j + (q - k) + 1,
                    }
                } else {
                    match tag {
                        Tag::A => (q + 1) * (2 * r + 1 - j) + (q - k) + 1,
                        Tag::B => (q + 1) * (2 * r - j) + k + 1,
                    }
                };
                // Meander position, with parity cases on the subscript.
                let meander = if k % 2 == 1 {
                    match tag {
                        Tag::A => (r + 1) * (2 * q + 1 - k) + (2 * r + 1 - j),
                        Tag::B => (r + 1) * (2 * q + 1 - k) + j,
                    }
                } else {
                    match tag {
                        Tag::A => (r + 1) * k + j,
                        Tag::B => (r + 1) * (k + 1) + (r - j),
                    }
                };
                assert!(by_axis[axis - 1].is_none(), "axis position {axis} reused");
                assert!(
                    by_meander[meander].is_none(),
                    "meander position {meander} reused"
                );
                by_axis[axis - 1] = Some(label);
                by_meander[meander] = Some(label);
            }
        }
    }

    let by_meander: Vec<EquilibriumLabel> = by_meander.into_iter().map(Option::unwrap).collect();
    let by_axis: Vec<EquilibriumLabel> = by_axis.into_iter().map(Option::unwrap).collect();

    // Consistency of the two labelings through the meander permutation:
    // the label at axis position a names the vertex at meander position
    // sigma(a). An inconsistency here is an implementation bug.
    let sigma = three_nose_permutation(r, q);
    for a in 1..=n {
        assert_eq!(
            by_axis[a - 1],
            by_meander[sigma.apply(a)],
            "label consistency failed at axis position {a}"
        );
    }
    assert_eq!(by_axis[n], EquilibriumLabel::star());
    assert_eq!(by_meander[0], EquilibriumLabel::star());

    let meander_pos = by_meander
        .iter()
        .enumerate()
        .map(|(pos, &label)| (label, pos))
        .collect();

    LabelMap {
        r,
        q,
        n,
        by_meander,
        by_axis,
        meander_pos,
    }
}

/// The label sequence along the horizontal axis, generated from the
/// parity-pattern description: ascending odd-superscript blocks, then
/// descending even ones, each block running the subscript up through tag A
/// (odd superscript) or B (even superscript) and back down through the
/// other tag. The distinguished vertex closes the sequence.
pub fn axis_label_sequence(r: usize, q: usize) -> Vec<EquilibriumLabel> {
    let mut blocks: Vec<usize> = (1..=r).filter(|j| j % 2 == 1).collect();
    let mut evens: Vec<usize> = (0..=r).filter(|j| j % 2 == 0).collect();
    evens.reverse();
    blocks.extend(evens);
    let mut out = Vec::new();
    for j in blocks {
        let (first, second) = if j % 2 == 1 {
            (Tag::A, Tag::B)
        } else {
            (Tag::B, Tag::A)
        };
        for k in 0..=q {
            out.push(EquilibriumLabel::new(first, j, k));
        }
        for k in (0..=q).rev() {
            out.push(EquilibriumLabel::new(second, j, k));
        }
    }
    // The final label of the final block is A^0_0, the distinguished vertex.
    out
}

/// The label sequence along the meander path: ascending even-subscript
/// blocks, then descending odd ones. The distinguished vertex opens the
/// sequence.
pub fn meander_label_sequence(r: usize, q: usize) -> Vec<EquilibriumLabel> {
    let mut blocks: Vec<usize> = (0..=q).filter(|k| k % 2 == 0).collect();
    let mut odds: Vec<usize> = (1..=q).filter(|k| k % 2 == 1).collect();
    odds.reverse();
    blocks.extend(odds);
    let mut out = Vec::new();
    for k in blocks {
        let (first, second) = if k % 2 == 0 {
            (Tag::A, Tag::B)
        } else {
            (Tag::B, Tag::A)
        };
        for j in 0..=r {
            out.push(EquilibriumLabel::new(first, j, k));
        }
        for j in (0..=r).rev() {
            out.push(EquilibriumLabel::new(second, j, k));
        }
    }
    out
}

/// The closed-form permutation of the Morse 3-nose meander with an upper
/// `r(q+1)`-nest and an upper `q`-nest, on `N = 2(r+1)(q+1)-1` vertices.
/// Odd arguments are parity preserving; even arguments are reflected.
pub fn three_nose_permutation(r: usize, q: usize) -> Permutation {
    assert!(r >= 1 && q >= 1);
    let n = 2 * (r + 1) * (q + 1) - 1;
    let mut image = vec![0usize; n];
    for j in 0..=r {
        for k in 0..=q {
            let odd_arg = 2 * ((q + 1) * j + k) + 1;
            image[odd_arg - 1] = 2 * (j + (r + 1) * k) + 1;
            if j != 0 || k != 0 {
                let even_arg = 2 * ((q + 1) * (r - j) + (q - k) + 1);
                image[even_arg - 1] = 2 * (j + (r + 1) * k);
            }
        }
    }
    Permutation::new(image).expect("closed form defines a bijection")
}

/// Geometric ground-truth construction of the primitive 3-nose meander:
/// an upper p-nest on axis positions 1..2p, an upper q-nest on
/// 2p+1..2p+2q, and a lower rainbow of p+q nested arcs. The permutation is
/// recovered by walking the unique curve from axis position 1; a premature
/// closure of the walk reports the violated coprimality precondition.
pub fn build_three_nose_meander(p: usize, q: usize) -> Result<Meander> {
    ThreeNoseShape::new(p, q)?;
    let n = 2 * (p + q) + 1;
    let mut upper = Vec::with_capacity(p + q);
    for t in 1..=p {
        upper.push((t, 2 * p + 1 - t));
    }
    for t in 1..=q {
        upper.push((2 * p + t, 2 * p + 2 * q + 1 - t));
    }
    let lower: Vec<(usize, usize)> = (1..=p + q).map(|t| (t + 1, n + 1 - t)).collect();
    Meander::from_arcs(n, &upper, &lower)
}

/// The 2-nose Chafee-Infante permutation on `N = 2d+1` vertices:
/// `sigma(j) = j` for odd `j` and `N+1-j` for even `j`.
pub fn chafee_infante_permutation(d: usize) -> Permutation {
    assert!(d >= 1);
    let n = 2 * d + 1;
    let image = (1..=n).map(|j| if j % 2 == 1 { j } else { n + 1 - j }).collect();
    Permutation::new(image).expect("Chafee-Infante form is a bijection")
}

fn ci_label(tag: Tag, sub: usize) -> String {
    EquilibriumLabel::plain(tag, sub).to_string()
}

/// The Chafee-Infante stack of height `d+1`: vertices `A_0..A_d` and
/// `B_0..B_d` with `A_{j+1}, B_j` wired to `A_j, B_{j-1}`. Vertex ids are
/// the meander positions of the Chafee-Infante meander; `A_0` is the
/// distinguished vertex of the pointed version and is dropped otherwise.
pub fn chafee_infante_stack(d: usize, pointed: bool) -> ConnectionGraph {
    assert!(d >= 1);
    let sigma = chafee_infante_permutation(d);
    let n = sigma.n();
    // Axis order is A_1..A_d then B_d..B_0; ids are meander positions.
    let id_a = |j: usize| -> VertexId {
        if j == 0 {
            STAR
        } else {
            sigma.apply(j)
        }
    };
    let id_b = |k: usize| -> VertexId { sigma.apply(n - k) };

    let mut g = ConnectionGraph::new(pointed);
    for j in 1..=d {
        g.add_vertex(id_a(j), j as i64 - 1);
        g.set_label(id_a(j), ci_label(Tag::A, j));
    }
    for k in 0..=d {
        g.add_vertex(id_b(k), k as i64);
        g.set_label(id_b(k), ci_label(Tag::B, k));
    }
    if pointed {
        g.add_vertex(STAR, -1);
        g.set_label(STAR, ci_label(Tag::A, 0));
    }
    for j in 1..=d {
        if j >= 2 || pointed {
            g.add_edge(id_a(j), id_a(j - 1));
        }
        g.add_edge(id_b(j), id_b(j - 1));
        g.add_edge(id_b(j), id_a(j));
        if j < d {
            g.add_edge(id_a(j + 1), id_b(j - 1));
        }
    }
    if pointed {
        g.add_edge(id_b(0), STAR);
    }
    g
}

/// Morse counts of the `(r, q)` family predicted by the stack description:
/// `3+2i` up to the smaller subscript, a plateau between the subscripts,
/// and a symmetric descent to a single top vertex.
pub fn predicted_morse_counts(r: usize, q: usize) -> MorsePolynomial {
    let (lo, hi) = (r.min(q) as i64, r.max(q) as i64);
    let d = r as i64 + q as i64;
    let mut counts = BTreeMap::new();
    for i in 0..=d {
        let mu = if i < lo {
            3 + 2 * i
        } else if i < hi {
            2 + 2 * lo
        } else {
            2 * d + 1 - 2 * i
        };
        counts.insert(i, mu as usize);
    }
    MorsePolynomial::from_counts(counts)
}

/// The predicted pointed connection graph of the `(r, q)` family: the union
/// of `r+1` vertical Chafee-Infante stacks (fixed superscript, height q+1)
/// and `q+1` slanted stacks (fixed subscript, height r+1) on the same
/// `2(r+1)(q+1)` labeled vertices, with duplicate edges merged. Vertex ids
/// are meander positions, so the graph is directly comparable with the
/// blocking-derived connection graph of the closed-form permutation.
pub fn chafee_infante_lattice(r: usize, q: usize) -> Result<ConnectionGraph> {
    if r * q <= 1 {
        return Err(Error::TrivialLattice { r, q });
    }
    let labels = equilibrium_labels(r, q);
    let id = |tag: Tag, j: usize, k: usize| -> VertexId {
        labels
            .meander_pos(&EquilibriumLabel::new(tag, j, k))
            .expect("label in range")
    };

    let mut g = ConnectionGraph::new(true);
    for j in 0..=r {
        for k in 0..=q {
            for tag in [Tag::A, Tag::B] {
                let label = EquilibriumLabel::new(tag, j, k);
                let v = id(tag, j, k);
                g.add_vertex(v, label.formal_level());
                g.set_label(v, label.to_string());
            }
        }
    }

    // Vertical stacks: lift L_k -> L^j_k of the pointed height-(q+1) stack.
    for j in 0..=r {
        for k in 1..=q {
            g.add_edge(id(Tag::A, j, k), id(Tag::A, j, k - 1));
            g.add_edge(id(Tag::B, j, k), id(Tag::B, j, k - 1));
            if k < q {
                g.add_edge(id(Tag::A, j, k + 1), id(Tag::B, j, k - 1));
            }
        }
        for k in 0..=q {
            g.add_edge(id(Tag::B, j, k), id(Tag::A, j, k));
        }
    }
    // Slanted stacks: lift L_j -> L^j_k of the pointed height-(r+1) stack.
    for k in 0..=q {
        for j in 1..=r {
            g.add_edge(id(Tag::A, j, k), id(Tag::A, j - 1, k));
            g.add_edge(id(Tag::B, j, k), id(Tag::B, j - 1, k));
            if j < r {
                g.add_edge(id(Tag::A, j + 1, k), id(Tag::B, j - 1, k));
            }
        }
        for j in 0..=r {
            g.add_edge(id(Tag::B, j, k), id(Tag::A, j, k));
        }
    }
    Ok(g)
}

/// The blocking-derived pointed or unpointed connection graph of the
/// closed-form `(r, q)` permutation, annotated with equilibrium labels.
pub fn labeled_connection_graph(r: usize, q: usize, pointed: bool) -> Result<ConnectionGraph> {
    let sigma = three_nose_permutation(r, q);
    let labels = equilibrium_labels(r, q);
    let mut g = crate::connections::connection_graph(&sigma, pointed)?;
    for v in 1..=sigma.n() {
        g.set_label(v, labels.label_at_meander(v).to_string());
    }
    if pointed {
        g.set_label(STAR, EquilibriumLabel::star().to_string());
    }
    Ok(g)
}

/// The explicit reversor `A^j_k <-> B^{r-j}_{q-k}` on the lattice vertex
/// ids.
pub fn lattice_reversor(r: usize, q: usize) -> Reversor {
    let labels = equilibrium_labels(r, q);
    let mut map = BTreeMap::new();
    for j in 0..=r {
        for k in 0..=q {
            let a = labels
                .meander_pos(&EquilibriumLabel::new(Tag::A, j, k))
                .unwrap();
            let b = labels
                .meander_pos(&EquilibriumLabel::new(Tag::B, r - j, q - k))
                .unwrap();
            map.insert(a, b);
            map.insert(b, a);
        }
    }
    Reversor::from_map(map)
}

/// The label map swapping super- and subscripts, as a vertex bijection from
/// the `(q, r)` graph onto the `(r, q)` graph. It preserves formal Morse
/// levels and realizes the trivial equivalence of the two connection
/// graphs; for `r = q` it is an involution.
pub fn label_swap(r: usize, q: usize) -> BTreeMap<VertexId, VertexId> {
    let from = equilibrium_labels(q, r);
    let to = equilibrium_labels(r, q);
    let mut map = BTreeMap::new();
    for label in from.labels() {
        let swapped = EquilibriumLabel::new(label.tag, label.sub, label.sup.unwrap());
        map.insert(
            from.meander_pos(label).unwrap(),
            to.meander_pos(&swapped).unwrap(),
        );
    }
    map
}

/// Replaces each lower-left shortcut arc of a suspended, rotated 3-nose
/// meander by a detour through two new vertices, growing the upper-right
/// q-nest. The input must be the suspension of a 180-degree rotated
/// 3-nose meander; the output is the next meander of the nest-size
/// recursion, with `p' + q + 1` upper-left arcs.
pub fn insert_nest(suspended: &Meander, q: usize) -> Result<Meander> {
    let m = suspended.n();
    if q < 1 || m < 2 * q + 5 {
        return Err(Error::UnexpectedShape(format!(
            "axis size {m} cannot host a {q}-nest insertion"
        )));
    }
    let has_lower = |a: usize, b: usize| {
        suspended
            .lower_arcs()
            .iter()
            .any(|arc| arc.a == a.min(b) && arc.b == a.max(b))
    };
    let has_upper = |a: usize, b: usize| {
        suspended
            .upper_arcs()
            .iter()
            .any(|arc| arc.a == a.min(b) && arc.b == a.max(b))
    };
    if !has_upper(1, m - 1) || !has_lower(2, m) {
        return Err(Error::UnexpectedShape(
            "missing suspension arcs {1, N-1} above and {2, N} below".into(),
        ));
    }
    for t in 1..=q {
        if !has_lower(t + 2, 2 * q + 3 - t) {
            return Err(Error::UnexpectedShape(format!(
                "missing lower shortcut arc {{{}, {}}}",
                t + 2,
                2 * q + 3 - t
            )));
        }
    }
    if suspended
        .upper_arcs()
        .iter()
        .any(|arc| arc.b == m)
    {
        return Err(Error::UnexpectedShape(
            "last axis position must not carry an upper arc".into(),
        ));
    }

    let n = m + 2 * q;
    let mut upper: Vec<(usize, usize)> = suspended
        .upper_arcs()
        .iter()
        .map(|arc| (arc.a, arc.b))
        .collect();
    for t in 1..=q {
        upper.push((m - 1 + t, n - t));
    }
    let mut lower: Vec<(usize, usize)> = Vec::new();
    for arc in suspended.lower_arcs() {
        if arc.a == 2 && arc.b == m {
            lower.push((2, n));
        } else if arc.a >= 3 && arc.a + arc.b == 2 * q + 5 && arc.b <= 2 * q + 2 {
            // Shortcut {t+2, 2q+3-t} becomes the detour through the new
            // vertices N-t and M-1+t.
            let t = arc.a - 2;
            lower.push((arc.a, n - t));
            lower.push((arc.b, m - 1 + t));
        } else {
            lower.push((arc.a, arc.b));
        }
    }
    Meander::from_arcs(n, &upper, &lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::{connection_graph, find_reversor, graded_isomorphic};
    use crate::invariants::{morse_indices, zero_numbers, Mode};

    #[test]
    fn shape_validation() {
        assert!(ThreeNoseShape::new(3, 2).is_ok());
        assert_eq!(ThreeNoseShape::new(3, 2).unwrap().r, Some(1));
        assert_eq!(ThreeNoseShape::new(8, 4).unwrap().r, None);
        assert!(matches!(
            ThreeNoseShape::new(4, 2).unwrap_err(),
            Error::NotCoprime { .. }
        ));
        assert_eq!(ThreeNoseShape::new(1, 1).unwrap_err(), Error::NestTooSmall(1));
    }

    #[test]
    fn closed_form_at_1_2() {
        assert_eq!(
            three_nose_permutation(1, 2).to_text(),
            "1,10,5,6,9,2,3,8,7,4,11"
        );
        assert_eq!(
            three_nose_permutation(1, 2).kappa().to_text(),
            "1,8,5,4,9,10,3,6,7,2,11"
        );
    }

    #[test]
    fn closed_form_size_at_5_4() {
        assert_eq!(three_nose_permutation(5, 4).n(), 59);
    }

    #[test]
    fn builder_equals_closed_form() {
        for r in 1..=6 {
            for q in 1..=6 {
                let built = build_three_nose_meander(r * (q + 1), q).unwrap();
                assert_eq!(
                    built.sigma(),
                    &three_nose_permutation(r, q),
                    "mismatch at r={r}, q={q}"
                );
            }
        }
    }

    #[test]
    fn builder_rejects_non_coprime() {
        assert!(matches!(
            build_three_nose_meander(5, 3).unwrap_err(),
            Error::NotCoprime { .. }
        ));
    }

    #[test]
    fn non_morse_shape_builds_but_fails_morse() {
        let m = build_three_nose_meander(8, 4).unwrap();
        assert!(m.is_dissipative());
        assert!(m.is_jordan());
        assert!(!m.is_morse());
        let iv = morse_indices(m.sigma()).unwrap();
        assert_eq!(iv.min(), -1);
    }

    #[test]
    fn chafee_infante_values() {
        assert_eq!(chafee_infante_permutation(1).to_text(), "1,2,3");
        assert_eq!(chafee_infante_permutation(3).to_text(), "1,6,3,4,5,2,7");
        for d in 1..=10 {
            let s = chafee_infante_permutation(d);
            assert_eq!(s.kappa(), s, "kappa invariance at d={d}");
            assert_eq!(s.inverse(), s, "rho invariance at d={d}");
        }
    }

    #[test]
    fn suspension_steps_chafee_infante() {
        for d in 1..=10 {
            assert_eq!(
                chafee_infante_permutation(d).suspend().unwrap(),
                chafee_infante_permutation(d + 1)
            );
        }
    }

    #[test]
    fn stack_matches_blocking_graph() {
        for d in 1..=10 {
            let sigma = chafee_infante_permutation(d);
            for pointed in [false, true] {
                let wolfrum = {
                    let mut g = connection_graph(&sigma, pointed).unwrap();
                    let n = sigma.n();
                    for j in 1..=d {
                        g.set_label(sigma.apply(j), ci_label(Tag::A, j));
                    }
                    for k in 0..=d {
                        g.set_label(sigma.apply(n - k), ci_label(Tag::B, k));
                    }
                    if pointed {
                        g.set_label(STAR, ci_label(Tag::A, 0));
                    }
                    g
                };
                let stack = chafee_infante_stack(d, pointed);
                assert_eq!(stack, wolfrum, "stack mismatch at d={d}, pointed={pointed}");
            }
        }
    }

    #[test]
    fn stack_reversor() {
        for d in 1..=6 {
            let stack = chafee_infante_stack(d, true);
            let found = find_reversor(&stack).expect("stacks are reversible");
            assert!(found.is_valid_for(&stack));
            // The explicit reversor A_j <-> B_{d-j}.
            let mut map = BTreeMap::new();
            for j in 0..=d {
                let a = stack.vertex_by_label(&ci_label(Tag::A, j)).unwrap();
                let b = stack.vertex_by_label(&ci_label(Tag::B, d - j)).unwrap();
                map.insert(a, b);
                map.insert(b, a);
            }
            assert!(Reversor::from_map(map).is_valid_for(&stack));
        }
    }

    #[test]
    fn label_positions_at_1_2() {
        let labels = equilibrium_labels(1, 2);
        let axis: Vec<String> = (1..=11).map(|a| labels.label_at_axis(a).to_string()).collect();
        assert_eq!(
            axis,
            [
                "A^1_0", "A^1_1", "A^1_2", "B^1_2", "B^1_1", "B^1_0", "B^0_0", "B^0_1",
                "B^0_2", "A^0_2", "A^0_1"
            ]
        );
        assert_eq!(labels.label_at_axis(12), EquilibriumLabel::star());
        assert_eq!(labels.label_at_meander(0), EquilibriumLabel::star());
    }

    #[test]
    fn label_sequences_match_dual_formulas() {
        for (r, q) in [(1, 2), (2, 2), (3, 4), (5, 4), (4, 5), (2, 6)] {
            let labels = equilibrium_labels(r, q);
            let n = labels.n();
            let axis_seq = axis_label_sequence(r, q);
            assert_eq!(axis_seq.len(), n + 1);
            for (idx, label) in axis_seq.iter().enumerate() {
                assert_eq!(labels.label_at_axis(idx + 1), *label, "axis idx {idx}");
            }
            let meander_seq = meander_label_sequence(r, q);
            assert_eq!(meander_seq.len(), n + 1);
            for (idx, label) in meander_seq.iter().enumerate() {
                assert_eq!(labels.label_at_meander(idx), *label, "meander idx {idx}");
            }
        }
    }

    #[test]
    fn meander_path_endpoints() {
        // Both paths emerge from sink A^1_0 and terminate at sink A^0_1.
        for (r, q) in [(1, 2), (5, 4), (3, 3)] {
            let labels = equilibrium_labels(r, q);
            assert_eq!(
                labels.label_at_meander(1),
                EquilibriumLabel::new(Tag::A, 1, 0)
            );
            assert_eq!(
                labels.label_at_meander(labels.n()),
                EquilibriumLabel::new(Tag::A, 0, 1)
            );
            assert_eq!(
                labels.label_at_axis(1),
                EquilibriumLabel::new(Tag::A, 1, 0)
            );
            assert_eq!(
                labels.label_at_axis(labels.n()),
                EquilibriumLabel::new(Tag::A, 0, 1)
            );
        }
    }

    #[test]
    fn lattice_equals_blocking_graph_at_1_2() {
        let lattice = chafee_infante_lattice(1, 2).unwrap();
        let wolfrum = labeled_connection_graph(1, 2, true).unwrap();
        assert_eq!(lattice, wolfrum);
    }

    #[test]
    fn lattice_vertex_count() {
        for (r, q) in [(1, 2), (2, 3), (5, 4)] {
            let lattice = chafee_infante_lattice(r, q).unwrap();
            assert_eq!(lattice.vertex_count(), 2 * (r + 1) * (q + 1));
        }
        assert!(chafee_infante_lattice(1, 1).is_err());
    }

    #[test]
    fn lattice_reversor_is_valid() {
        for (r, q) in [(1, 2), (2, 2), (3, 4)] {
            let lattice = chafee_infante_lattice(r, q).unwrap();
            let rev = lattice_reversor(r, q);
            assert!(rev.is_valid_for(&lattice));
            // The distinguished vertex maps to the top vertex B^r_q.
            let labels = equilibrium_labels(r, q);
            let top = labels
                .meander_pos(&EquilibriumLabel::new(Tag::B, r, q))
                .unwrap();
            assert_eq!(rev.apply(STAR), top);
        }
    }

    #[test]
    fn label_swap_is_graded_isomorphism() {
        for (r, q) in [(1, 2), (2, 3), (3, 2)] {
            let swap = label_swap(r, q);
            let from = labeled_connection_graph(q, r, true).unwrap();
            let to = labeled_connection_graph(r, q, true).unwrap();
            // Levels preserved and edges carried over exactly.
            for (&v, &w) in &swap {
                assert_eq!(from.level(v), to.level(w));
            }
            let mapped: std::collections::BTreeSet<(usize, usize)> = from
                .all_edges()
                .map(|(u, v)| (swap[&u], swap[&v]))
                .collect();
            let target: std::collections::BTreeSet<(usize, usize)> = to.all_edges().collect();
            assert_eq!(mapped, target);
            assert!(graded_isomorphic(&from, &to).is_some());
        }
        // For r = q the swap is an involution.
        let swap = label_swap(3, 3);
        for (&v, &w) in &swap {
            assert_eq!(swap[&w], v);
        }
    }

    #[test]
    fn trivial_equivalence_of_transposed_family() {
        for r in 1..=10 {
            for q in 1..=10 {
                let lhs = three_nose_permutation(q, r);
                let rhs = three_nose_permutation(r, q).inverse().kappa();
                assert_eq!(lhs, rhs, "equivalence failed at r={r}, q={q}");
            }
        }
    }

    #[test]
    fn nest_sum_invariants() {
        // Lower rainbow: preimage sums N+2 at even arguments. Upper nests:
        // 2p+1 on the left nest and 4p+2q+1 on the right nest, with p and q
        // arcs respectively.
        for r in 1..=6 {
            for q in 1..=6 {
                let p = r * (q + 1);
                let sigma = three_nose_permutation(r, q);
                let n = sigma.n();
                let inv = sigma.inverse();
                let left = 2 * p + 1;
                let right = 4 * p + 2 * q + 1;
                let mut left_count = 0;
                let mut right_count = 0;
                for m in 1..n {
                    let sum = inv.apply(m) + inv.apply(m + 1);
                    if m % 2 == 0 {
                        assert_eq!(sum, n + 2, "rainbow sum at even {m}, r={r}, q={q}");
                    } else if sum == left {
                        left_count += 1;
                    } else if sum == right {
                        right_count += 1;
                    } else {
                        panic!("unexpected upper arc sum {sum} at odd {m}, r={r}, q={q}");
                    }
                }
                assert_eq!(left_count, p);
                assert_eq!(right_count, q);
            }
        }
    }

    #[test]
    fn insertion_reproduces_builder() {
        for r in 2..=5 {
            for q in 1..=5 {
                let p_prev = (r - 1) * (q + 1);
                let prev = build_three_nose_meander(p_prev, q).unwrap();
                let rotated = Meander::from_sigma(prev.sigma().kappa());
                let suspended = Meander::from_sigma(rotated.sigma().suspend().unwrap());
                let inserted = insert_nest(&suspended, q).unwrap();
                let target = build_three_nose_meander(p_prev + q + 1, q).unwrap();
                assert_eq!(
                    inserted.sigma(),
                    target.sigma(),
                    "insertion mismatch at r={r}, q={q}"
                );
            }
        }
    }

    #[test]
    fn insertion_preserves_old_morse_indices() {
        for (r, q) in [(2, 2), (3, 2), (2, 3), (4, 4)] {
            let p_prev = (r - 1) * (q + 1);
            let prev = build_three_nose_meander(p_prev, q).unwrap();
            let suspended =
                Meander::from_sigma(prev.sigma().kappa().suspend().unwrap());
            let inserted = insert_nest(&suspended, q).unwrap();
            let iv_in = morse_indices(suspended.sigma()).unwrap();
            let iv_out = morse_indices(inserted.sigma()).unwrap();
            let m = suspended.n();
            let n = inserted.n();
            for x in 1..=m {
                let y = if x == m { n } else { x };
                assert_eq!(
                    iv_in.get(suspended.sigma().apply(x)),
                    iv_out.get(inserted.sigma().apply(y)),
                    "index changed at old axis position {x} (r={r}, q={q})"
                );
            }
            // Inserted vertices carry the levels of the lifted stack: B^0_k
            // at level k, A^0_k at level k-1.
            for k in 0..=q {
                let axis = m + k;
                assert_eq!(iv_out.get(inserted.sigma().apply(axis)), k as i64);
            }
            for k in 2..=q {
                let axis = n + 1 - k;
                assert_eq!(iv_out.get(inserted.sigma().apply(axis)), k as i64 - 1);
            }
        }
    }

    #[test]
    fn insertion_rejects_wrong_shape() {
        let m = build_three_nose_meander(6, 2).unwrap();
        assert!(insert_nest(&m, 2).is_err());
    }

    #[test]
    fn predicted_counts_at_5_4() {
        let mp = predicted_morse_counts(5, 4);
        assert_eq!(mp.dense(), vec![3, 5, 7, 9, 10, 9, 7, 5, 3, 1]);
        assert_eq!(mp.total(), 59);
        // Symmetry mu(i) = mu(r+q-1-i) below the top level.
        for (r, q) in [(5, 4), (2, 6), (3, 3)] {
            let mp = predicted_morse_counts(r, q);
            let d = (r + q) as i64;
            for i in 0..d {
                assert_eq!(mp.mu(i), mp.mu(d - 1 - i), "asymmetry at i={i}");
            }
        }
    }

    #[test]
    fn blocking_of_ci0_by_its_first_vertex() {
        // Every pair (v, e) with v in the first vertical stack (non-sink)
        // and e outside it is blocked by B^0_0.
        let (r, q) = (2, 2);
        let sigma = three_nose_permutation(r, q);
        let labels = equilibrium_labels(r, q);
        let z = zero_numbers(&sigma, Mode::Strict).unwrap();
        let in_ci0 = |v: usize| labels.label_at_meander(v).sup == Some(0);
        let b00 = labels
            .meander_pos(&EquilibriumLabel::new(Tag::B, 0, 0))
            .unwrap();
        let rel = crate::connections::full_relation(&sigma).unwrap();
        for v in 1..=sigma.n() {
            if !in_ci0(v) || v == b00 {
                continue;
            }
            let lbl = labels.label_at_meander(v);
            if lbl == EquilibriumLabel::new(Tag::A, 0, 1) {
                continue; // sink
            }
            for e in 1..=sigma.n() {
                if in_ci0(e) || e == v {
                    continue;
                }
                assert!(
                    !rel.contains(&(v, e)),
                    "unexpected connection {} -> {}",
                    lbl,
                    labels.label_at_meander(e)
                );
            }
        }
        // And z(v - B^0_0) = 0 for all v in the first stack.
        for v in 1..=sigma.n() {
            if in_ci0(v) && v != b00 {
                assert_eq!(z.get(v, b00), 0);
            }
        }
    }

    #[test]
    fn absent_sink_edges() {
        // The five explicitly fenced-off edges between level 1 and the
        // sinks never appear.
        for (r, q) in [(2, 2), (2, 3), (3, 2)] {
            let g = labeled_connection_graph(r, q, false).unwrap();
            let by_label = |s: String| g.vertex_by_label(&s).unwrap();
            let absent = [
                (EquilibriumLabel::new(Tag::A, 1, 1), EquilibriumLabel::new(Tag::B, 0, 0)),
                (EquilibriumLabel::new(Tag::A, 2, 0), EquilibriumLabel::new(Tag::A, 0, 1)),
                (EquilibriumLabel::new(Tag::B, 1, 0), EquilibriumLabel::new(Tag::A, 0, 1)),
                (EquilibriumLabel::new(Tag::B, 0, 1), EquilibriumLabel::new(Tag::A, 1, 0)),
                (EquilibriumLabel::new(Tag::A, 0, 2), EquilibriumLabel::new(Tag::A, 1, 0)),
            ];
            for (from, to) in absent {
                assert!(
                    !g.has_edge(by_label(from.to_string()), by_label(to.to_string())),
                    "edge {from} -> {to} should be absent at r={r}, q={q}"
                );
            }
        }
    }

    #[test]
    fn only_three_sinks() {
        for (r, q) in [(1, 2), (2, 2), (3, 4)] {
            let labels = equilibrium_labels(r, q);
            let sigma = three_nose_permutation(r, q);
            let iv = morse_indices(&sigma).unwrap();
            let sinks: Vec<String> = (1..=sigma.n())
                .filter(|&v| iv.get(v) == 0)
                .map(|v| labels.label_at_meander(v).to_string())
                .collect();
            let mut sorted = sinks.clone();
            sorted.sort();
            assert_eq!(sorted, ["A^0_1", "A^1_0", "B^0_0"]);
        }
    }
}
