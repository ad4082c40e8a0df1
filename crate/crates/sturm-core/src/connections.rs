use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::{self, Mode, ZeroMatrix};
use crate::permutation::Permutation;

/// Vertex identity is the meander position; the distinguished vertex of a
/// pointed graph gets the reserved id 0 at level -1.
pub type VertexId = usize;

pub const STAR: VertexId = 0;

/// Which boundary order the blocking scan walks: the meander path or the
/// horizontal axis. Both give the same adjacency verdict; the agreement is
/// part of the test suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scan {
    Meander,
    Axis,
}

/// A graded directed acyclic graph of equilibria ranked by Morse index.
///
/// Heteroclinic edges drop the Morse level by exactly one. Edges into the
/// distinguished vertex are bookkeeping rather than heteroclinic orbits and
/// are kept in a separate set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectionGraph {
    levels: BTreeMap<VertexId, i64>,
    labels: BTreeMap<VertexId, String>,
    edges: BTreeSet<(VertexId, VertexId)>,
    star_edges: BTreeSet<(VertexId, VertexId)>,
    pointed: bool,
}

impl ConnectionGraph {
    pub fn new(pointed: bool) -> ConnectionGraph {
        ConnectionGraph {
            levels: BTreeMap::new(),
            labels: BTreeMap::new(),
            edges: BTreeSet::new(),
            star_edges: BTreeSet::new(),
            pointed,
        }
    }

    pub fn add_vertex(&mut self, id: VertexId, level: i64) {
        debug_assert!(!self.levels.contains_key(&id));
        self.levels.insert(id, level);
    }

    pub fn set_label(&mut self, id: VertexId, label: String) {
        debug_assert!(self.levels.contains_key(&id));
        self.labels.insert(id, label);
    }

    pub fn add_edge(&mut self, from: VertexId, to: VertexId) {
        debug_assert_eq!(self.level(from) - 1, self.level(to));
        if to == STAR && self.pointed {
            self.star_edges.insert((from, to));
        } else {
            self.edges.insert((from, to));
        }
    }

    pub fn is_pointed(&self) -> bool {
        self.pointed
    }

    pub fn level(&self, id: VertexId) -> i64 {
        self.levels[&id]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.levels.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.levels.len()
    }

    pub fn label(&self, id: VertexId) -> Option<&str> {
        self.labels.get(&id).map(|s| s.as_str())
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels
            .iter()
            .find(|(_, l)| l.as_str() == label)
            .map(|(id, _)| *id)
    }

    /// Heteroclinic edges only.
    pub fn edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.edges
    }

    /// Bookkeeping edges into the distinguished vertex.
    pub fn star_edges(&self) -> &BTreeSet<(VertexId, VertexId)> {
        &self.star_edges
    }

    /// Heteroclinic and bookkeeping edges together, as used by automorphism
    /// and isomorphism searches.
    pub fn all_edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges
            .iter()
            .copied()
            .chain(self.star_edges.iter().copied())
    }

    pub fn has_edge(&self, from: VertexId, to: VertexId) -> bool {
        self.edges.contains(&(from, to)) || self.star_edges.contains(&(from, to))
    }

    pub fn max_level(&self) -> i64 {
        self.levels.values().copied().max().unwrap_or(0)
    }

    /// Vertices grouped by level, ascending.
    pub fn by_level(&self) -> BTreeMap<i64, Vec<VertexId>> {
        let mut map: BTreeMap<i64, Vec<VertexId>> = BTreeMap::new();
        for (&id, &lvl) in &self.levels {
            map.entry(lvl).or_default().push(id);
        }
        map
    }

    /// Level counts as a pointed Morse polynomial.
    pub fn level_counts(&self) -> invariants::MorsePolynomial {
        let mut counts = BTreeMap::new();
        for &lvl in self.levels.values() {
            *counts.entry(lvl).or_insert(0usize) += 1;
        }
        invariants::MorsePolynomial::from_counts(counts)
    }

    /// True iff there is exactly one vertex at the top level and every
    /// non-distinguished vertex is reachable from it along heteroclinic
    /// edges: the graph criterion for a Sturm ball.
    pub fn is_sturm_ball(&self) -> bool {
        let top_level = self
            .levels
            .iter()
            .filter(|(&id, _)| id != STAR)
            .map(|(_, &l)| l)
            .max();
        let Some(top_level) = top_level else {
            return false;
        };
        let tops: Vec<VertexId> = self
            .levels
            .iter()
            .filter(|(&id, &l)| id != STAR && l == top_level)
            .map(|(&id, _)| id)
            .collect();
        if tops.len() != 1 {
            return false;
        }
        let mut succ: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        for &(u, v) in &self.edges {
            succ.entry(u).or_default().push(v);
        }
        let mut reached = BTreeSet::new();
        let mut stack = vec![tops[0]];
        while let Some(v) = stack.pop() {
            if reached.insert(v) {
                if let Some(next) = succ.get(&v) {
                    stack.extend(next.iter().copied());
                }
            }
        }
        self.levels.keys().all(|&id| id == STAR || reached.contains(&id))
    }

    /// DOT rendering: one rank per Morse level (top level first), solid
    /// edges for heteroclinics, dashed edges into the distinguished vertex.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph connection_graph {\n");
        out.push_str("  rankdir=TB;\n  node [shape=plaintext];\n");
        let by_level = self.by_level();
        for (_, ids) in by_level.iter().rev() {
            out.push_str("  { rank=same;");
            for id in ids {
                out.push_str(&format!(" \"{}\";", self.node_name(*id)));
            }
            out.push_str(" }\n");
        }
        for &(u, v) in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                self.node_name(u),
                self.node_name(v)
            ));
        }
        for &(u, v) in &self.star_edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [style=dashed];\n",
                self.node_name(u),
                self.node_name(v)
            ));
        }
        out.push_str("}\n");
        out
    }

    fn node_name(&self, id: VertexId) -> String {
        if let Some(label) = self.labels.get(&id) {
            label.clone()
        } else if id == STAR {
            "star".to_string()
        } else {
            format!("v{id}")
        }
    }

    /// JSON rendering with explicit vertex levels and the two edge kinds.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct VertexJson<'a> {
            id: VertexId,
            level: i64,
            #[serde(skip_serializing_if = "Option::is_none")]
            label: Option<&'a str>,
        }
        #[derive(Serialize)]
        struct GraphJson<'a> {
            pointed: bool,
            vertices: Vec<VertexJson<'a>>,
            edges: Vec<(VertexId, VertexId)>,
            star_edges: Vec<(VertexId, VertexId)>,
        }
        let g = GraphJson {
            pointed: self.pointed,
            vertices: self
                .levels
                .iter()
                .map(|(&id, &level)| VertexJson {
                    id,
                    level,
                    label: self.label(id),
                })
                .collect(),
            edges: self.edges.iter().copied().collect(),
            star_edges: self.star_edges.iter().copied().collect(),
        };
        serde_json::to_string(&g).expect("graph serialization cannot fail")
    }
}

/// True iff some equilibrium `w` strictly between `v1` and `v2` (in the
/// chosen boundary order) satisfies `z(v1-w) = z(w-v2) = z(v1-v2)`.
pub fn is_blocked(
    sigma: &Permutation,
    z: &ZeroMatrix,
    v1: VertexId,
    v2: VertexId,
    scan: Scan,
) -> bool {
    debug_assert_ne!(v1, v2);
    let zv = z.get(v1, v2);
    let blocks = |w: VertexId| z.get(v1, w) == zv && z.get(w, v2) == zv;
    match scan {
        Scan::Meander => {
            let (lo, hi) = (v1.min(v2), v1.max(v2));
            (lo + 1..hi).any(blocks)
        }
        Scan::Axis => {
            let inv = sigma.inverse();
            let (a, b) = (inv.apply(v1), inv.apply(v2));
            let (lo, hi) = (a.min(b), a.max(b));
            // w runs over axis positions strictly between; sigma maps the
            // position back to the vertex.
            (lo + 1..hi).any(|pos| blocks(sigma.apply(pos)))
        }
    }
}

/// All heteroclinically connected ordered pairs, by the adjacency
/// characterization: `i(v1) > i(v2)` and no blocking equilibrium between.
pub fn full_relation(sigma: &Permutation) -> Result<BTreeSet<(VertexId, VertexId)>> {
    let z = invariants::zero_numbers(sigma, Mode::Strict)?;
    let iv = invariants::morse_indices(sigma)?;
    let n = sigma.n();
    let mut relation = BTreeSet::new();
    for v1 in 1..=n {
        for v2 in 1..=n {
            if v1 != v2
                && iv.get(v1) > iv.get(v2)
                && !is_blocked(sigma, &z, v1, v2, Scan::Meander)
            {
                relation.insert((v1, v2));
            }
        }
    }
    Ok(relation)
}

/// The graded connection graph: the full relation restricted to adjacent
/// Morse levels. With `pointed`, a distinguished vertex is adjoined at
/// level -1 with a bookkeeping edge from every sink.
pub fn connection_graph(sigma: &Permutation, pointed: bool) -> Result<ConnectionGraph> {
    let iv = invariants::morse_indices(sigma)?;
    if let Some(pos) = iv.values().iter().position(|&i| i < 0) {
        return Err(Error::NotMorse {
            position: pos + 1,
            value: iv.get(pos + 1),
        });
    }
    let relation = full_relation(sigma)?;
    let mut g = ConnectionGraph::new(pointed);
    for v in 1..=sigma.n() {
        g.add_vertex(v, iv.get(v));
    }
    if pointed {
        g.add_vertex(STAR, -1);
    }
    for &(v1, v2) in &relation {
        if iv.get(v1) == iv.get(v2) + 1 {
            g.add_edge(v1, v2);
        }
    }
    if pointed {
        for v in 1..=sigma.n() {
            if iv.get(v) == 0 {
                g.add_edge(v, STAR);
            }
        }
    }
    Ok(g)
}

/// Checks the cascading principle: the transitive closure of the graded
/// edges regenerates the full relation.
#[allow(clippy::needless_range_loop)]
pub fn verify_cascading(sigma: &Permutation) -> Result<bool> {
    let relation = full_relation(sigma)?;
    let graph = connection_graph(sigma, false)?;
    let n = sigma.n();
    // Dense boolean closure over vertex ids 1..=n.
    let mut reach = vec![vec![false; n + 1]; n + 1];
    for &(u, v) in graph.edges() {
        reach[u][v] = true;
    }
    // Process vertices in decreasing Morse level so each successor list is
    // complete before it is consumed.
    let mut order: Vec<VertexId> = (1..=n).collect();
    order.sort_by_key(|&v| graph.level(v));
    for &v in &order {
        for u in 1..=n {
            if reach[u][v] {
                for w in 1..=n {
                    if reach[v][w] {
                        reach[u][w] = true;
                    }
                }
            }
        }
    }
    let mut closure = BTreeSet::new();
    for u in 1..=n {
        for v in 1..=n {
            if reach[u][v] {
                closure.insert((u, v));
            }
        }
    }
    Ok(closure == relation)
}

/// An involutive, level-swapping, edge-reversing automorphism of a pointed
/// connection graph: combinatorial time reversibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reversor {
    map: BTreeMap<VertexId, VertexId>,
}

impl Reversor {
    pub fn from_map(map: BTreeMap<VertexId, VertexId>) -> Reversor {
        Reversor { map }
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.map[&v]
    }

    pub fn map(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.map
    }

    /// Checks all three reversor requirements against `g`: involution,
    /// level swap `i <-> d-1-i`, and edge reversal (an `u -> v` edge exists
    /// iff `R(v) -> R(u)` does).
    pub fn is_valid_for(&self, g: &ConnectionGraph) -> bool {
        let d = g.max_level();
        if self.map.len() != g.vertex_count() {
            return false;
        }
        for (&v, &w) in &self.map {
            if !self.map.contains_key(&w) || self.map[&w] != v {
                return false;
            }
            if g.level(w) != d - 1 - g.level(v) {
                return false;
            }
        }
        let mapped: BTreeSet<(VertexId, VertexId)> = g
            .all_edges()
            .map(|(u, v)| (self.apply(v), self.apply(u)))
            .collect();
        let original: BTreeSet<(VertexId, VertexId)> = g.all_edges().collect();
        mapped == original
    }
}

/// Exhaustive search for a reversor of the pointed graph `g`.
///
/// The search pairs Morse level `i` with level `d-1-i` and backtracks over
/// level bijections, pruning by degree profiles; absence is therefore
/// conclusive. Rejection is immediate when the level counts are not
/// palindromic.
pub fn find_reversor(g: &ConnectionGraph) -> Option<Reversor> {
    assert!(g.is_pointed(), "reversor search expects a pointed graph");
    let d = g.max_level();
    let by_level = g.by_level();
    // Fast rejection: mu_i must equal mu_{d-1-i}.
    for (&lvl, ids) in &by_level {
        let mirror = d - 1 - lvl;
        if by_level.get(&mirror).map(|v| v.len()).unwrap_or(0) != ids.len() {
            return None;
        }
    }

    let (indeg, outdeg) = degree_maps(g);

    // Strip sizes must be mirror symmetric as well.
    let mut strip_sizes: BTreeMap<i64, usize> = BTreeMap::new();
    for (u, _) in g.all_edges() {
        *strip_sizes.entry(g.level(u)).or_insert(0) += 1;
    }
    for (&lvl, &count) in &strip_sizes {
        // Edges out of level `lvl` map onto edges out of level `d-lvl`.
        if strip_sizes.get(&(d - lvl)).copied().unwrap_or(0) != count {
            return None;
        }
    }

    // Level pairs from the outside in: (d, -1), (d-1, 0), ...
    let mut pairs = Vec::new();
    let mut hi = d;
    loop {
        let lo = d - 1 - hi;
        if hi < lo {
            break;
        }
        pairs.push((hi, lo));
        hi -= 1;
    }

    let mut map: HashMap<VertexId, VertexId> = HashMap::new();
    if assign_pairs(g, &by_level, &indeg, &outdeg, &pairs, 0, &mut map) {
        let reversor = Reversor::from_map(map.into_iter().collect());
        debug_assert!(reversor.is_valid_for(g));
        Some(reversor)
    } else {
        None
    }
}

fn degree_maps(g: &ConnectionGraph) -> (HashMap<VertexId, usize>, HashMap<VertexId, usize>) {
    let mut indeg: HashMap<VertexId, usize> = HashMap::new();
    let mut outdeg: HashMap<VertexId, usize> = HashMap::new();
    for id in g.vertex_ids() {
        indeg.insert(id, 0);
        outdeg.insert(id, 0);
    }
    for (u, v) in g.all_edges() {
        *outdeg.get_mut(&u).unwrap() += 1;
        *indeg.get_mut(&v).unwrap() += 1;
    }
    (indeg, outdeg)
}

fn assign_pairs(
    g: &ConnectionGraph,
    by_level: &BTreeMap<i64, Vec<VertexId>>,
    indeg: &HashMap<VertexId, usize>,
    outdeg: &HashMap<VertexId, usize>,
    pairs: &[(i64, i64)],
    idx: usize,
    map: &mut HashMap<VertexId, VertexId>,
) -> bool {
    if idx == pairs.len() {
        return true;
    }
    let (hi, _lo) = pairs[idx];
    let hi_ids = by_level.get(&hi).cloned().unwrap_or_default();
    assign_vertex(g, by_level, indeg, outdeg, pairs, idx, &hi_ids, 0, map)
}

/// Assigns images for the `pos`-th vertex of the current level pair, then
/// recurses into the next pair. For the self-paired middle level the map is
/// an involution on the level, possibly with fixed points.
#[allow(clippy::too_many_arguments)]
fn assign_vertex(
    g: &ConnectionGraph,
    by_level: &BTreeMap<i64, Vec<VertexId>>,
    indeg: &HashMap<VertexId, usize>,
    outdeg: &HashMap<VertexId, usize>,
    pairs: &[(i64, i64)],
    idx: usize,
    hi_ids: &[VertexId],
    pos: usize,
    map: &mut HashMap<VertexId, VertexId>,
) -> bool {
    if pos == hi_ids.len() {
        return assign_pairs(g, by_level, indeg, outdeg, pairs, idx + 1, map);
    }
    let v = hi_ids[pos];
    if map.contains_key(&v) {
        // Already fixed as the partner of an earlier middle-level vertex.
        return assign_vertex(g, by_level, indeg, outdeg, pairs, idx, hi_ids, pos + 1, map);
    }
    let (hi, lo) = pairs[idx];
    let self_paired = hi == lo;
    let candidates = by_level.get(&lo).cloned().unwrap_or_default();
    for w in candidates {
        if map.values().any(|&x| x == w) {
            continue;
        }
        if self_paired && w != v && map.contains_key(&w) {
            continue;
        }
        if indeg[&w] != outdeg[&v] || outdeg[&w] != indeg[&v] {
            continue;
        }
        map.insert(v, w);
        let mut also_inserted = false;
        if w != v {
            map.insert(w, v);
            also_inserted = true;
        }
        if consistent(g, map, v, w)
            && (w == v || consistent(g, map, w, v))
            && assign_vertex(g, by_level, indeg, outdeg, pairs, idx, hi_ids, pos + 1, map)
        {
            return true;
        }
        map.remove(&v);
        if also_inserted {
            map.remove(&w);
        }
    }
    false
}

/// Local edge-reversal consistency for a freshly assigned `v -> w`: every
/// edge between `v` and an already-mapped neighbor must have its reversed
/// image present, and conversely every edge between `w` and an
/// already-mapped neighbor must be the image of an edge at `v`.
fn consistent(g: &ConnectionGraph, map: &HashMap<VertexId, VertexId>, v: VertexId, w: VertexId) -> bool {
    for (a, b) in g.all_edges() {
        if a == v {
            if let Some(&rb) = map.get(&b) {
                if !g.has_edge(rb, w) {
                    return false;
                }
            }
        } else if b == v {
            if let Some(&ra) = map.get(&a) {
                if !g.has_edge(w, ra) {
                    return false;
                }
            }
        }
        if a == w {
            if let Some(&rb) = map.get(&b) {
                if !g.has_edge(rb, v) {
                    return false;
                }
            }
        } else if b == w {
            if let Some(&ra) = map.get(&a) {
                if !g.has_edge(v, ra) {
                    return false;
                }
            }
        }
    }
    true
}

/// Searches for a level-preserving, edge-preserving bijection between two
/// graded graphs. Labels are ignored; both edge kinds participate.
/// Backtracking is exhaustive, so `None` is conclusive. Candidates are
/// tried in ascending id order, so a graph compared against itself yields
/// the identity.
pub fn graded_isomorphic(
    g1: &ConnectionGraph,
    g2: &ConnectionGraph,
) -> Option<BTreeMap<VertexId, VertexId>> {
    let lv1 = g1.by_level();
    let lv2 = g2.by_level();
    if lv1.len() != lv2.len() {
        return None;
    }
    for ((l1, ids1), (l2, ids2)) in lv1.iter().zip(lv2.iter()) {
        if l1 != l2 || ids1.len() != ids2.len() {
            return None;
        }
    }
    let e1 = g1.all_edges().count();
    let e2 = g2.all_edges().count();
    if e1 != e2 {
        return None;
    }
    let (in1, out1) = degree_maps(g1);
    let (in2, out2) = degree_maps(g2);
    for (lvl, ids1) in &lv1 {
        let mut d1: Vec<(usize, usize)> = ids1.iter().map(|v| (in1[v], out1[v])).collect();
        let mut d2: Vec<(usize, usize)> = lv2[lvl].iter().map(|v| (in2[v], out2[v])).collect();
        d1.sort();
        d2.sort();
        if d1 != d2 {
            return None;
        }
    }

    // Process levels from the top down; edges always join adjacent levels,
    // so matching against the previously assigned level checks everything.
    let search = IsoSearch {
        g1,
        g2,
        lv1: &lv1,
        lv2: &lv2,
        in1: &in1,
        out1: &out1,
        in2: &in2,
        out2: &out2,
        levels: lv1.keys().rev().copied().collect(),
    };
    let mut map: HashMap<VertexId, VertexId> = HashMap::new();
    let mut used: BTreeSet<VertexId> = BTreeSet::new();
    if search.go(0, 0, &mut map, &mut used) {
        Some(map.into_iter().collect())
    } else {
        None
    }
}

struct IsoSearch<'a> {
    g1: &'a ConnectionGraph,
    g2: &'a ConnectionGraph,
    lv1: &'a BTreeMap<i64, Vec<VertexId>>,
    lv2: &'a BTreeMap<i64, Vec<VertexId>>,
    in1: &'a HashMap<VertexId, usize>,
    out1: &'a HashMap<VertexId, usize>,
    in2: &'a HashMap<VertexId, usize>,
    out2: &'a HashMap<VertexId, usize>,
    levels: Vec<i64>,
}

impl IsoSearch<'_> {
    fn go(
        &self,
        li: usize,
        pos: usize,
        map: &mut HashMap<VertexId, VertexId>,
        used: &mut BTreeSet<VertexId>,
    ) -> bool {
        if li == self.levels.len() {
            return true;
        }
        let lvl = self.levels[li];
        let ids1 = &self.lv1[&lvl];
        if pos == ids1.len() {
            return self.go(li + 1, 0, map, used);
        }
        let v = ids1[pos];
        for &w in &self.lv2[&lvl] {
            if used.contains(&w) || self.in1[&v] != self.in2[&w] || self.out1[&v] != self.out2[&w]
            {
                continue;
            }
            // Every edge from the level above into v must be mirrored by an
            // edge into w, and vice versa.
            let ok = self.lv1.get(&(lvl + 1)).is_none_or(|ups| {
                ups.iter()
                    .all(|&u| self.g1.has_edge(u, v) == self.g2.has_edge(map[&u], w))
            });
            if !ok {
                continue;
            }
            map.insert(v, w);
            used.insert(w);
            if self.go(li, pos + 1, map, used) {
                return true;
            }
            map.remove(&v);
            used.remove(&w);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::zero_numbers;

    fn sigma(text: &str) -> Permutation {
        text.parse().unwrap()
    }

    #[test]
    fn blocking_examples() {
        let s = sigma("1,4,3,2,5");
        let z = zero_numbers(&s, Mode::Strict).unwrap();
        assert!(!is_blocked(&s, &z, 2, 5, Scan::Meander));
        assert!(!is_blocked(&s, &z, 2, 1, Scan::Meander)); // adjacent: empty range
        assert!(!is_blocked(&s, &z, 2, 5, Scan::Axis));
    }

    #[test]
    fn full_relation_example() {
        let rel = full_relation(&sigma("1,4,3,2,5")).unwrap();
        let expected: BTreeSet<(usize, usize)> =
            [(3, 1), (3, 2), (3, 4), (3, 5), (2, 1), (2, 5), (4, 1), (4, 5)]
                .into_iter()
                .collect();
        assert_eq!(rel, expected);
        let rel3 = full_relation(&sigma("1,2,3")).unwrap();
        let expected3: BTreeSet<(usize, usize)> = [(2, 1), (2, 3)].into_iter().collect();
        assert_eq!(rel3, expected3);
    }

    #[test]
    fn connection_graph_example() {
        let g = connection_graph(&sigma("1,4,3,2,5"), false).unwrap();
        let expected: BTreeSet<(usize, usize)> =
            [(3, 2), (3, 4), (2, 1), (2, 5), (4, 1), (4, 5)].into_iter().collect();
        assert_eq!(g.edges(), &expected);
        assert!(g.star_edges().is_empty());

        let gp = connection_graph(&sigma("1,4,3,2,5"), true).unwrap();
        let star: BTreeSet<(usize, usize)> = [(1, STAR), (5, STAR)].into_iter().collect();
        assert_eq!(gp.star_edges(), &star);
        assert_eq!(gp.level(STAR), -1);
    }

    #[test]
    fn neighbors_on_boundary_orders_are_related() {
        // Neighbors along either boundary order with Morse difference one
        // are always connected.
        let s = sigma("1,8,5,4,9,10,3,6,7,2,11");
        let iv = crate::invariants::morse_indices(&s).unwrap();
        let rel = full_relation(&s).unwrap();
        for j in 1..s.n() {
            for (a, b) in [(j, j + 1), (s.apply(j), s.apply(j + 1))] {
                let (hi, lo) = if iv.get(a) > iv.get(b) { (a, b) } else { (b, a) };
                if iv.get(hi) == iv.get(lo) + 1 {
                    assert!(rel.contains(&(hi, lo)), "neighbors {hi}->{lo} missing");
                }
            }
        }
    }

    #[test]
    fn cascading_small_cases() {
        assert!(verify_cascading(&sigma("1,4,3,2,5")).unwrap());
        assert!(verify_cascading(&sigma("1,2,3")).unwrap());
        assert!(verify_cascading(&sigma("1,8,5,4,9,10,3,6,7,2,11")).unwrap());
    }

    #[test]
    fn sturm_ball_needs_unique_top() {
        let g = connection_graph(&sigma("1,4,3,2,5"), false).unwrap();
        assert!(g.is_sturm_ball());
        // Two disjoint stacks: synthetic graph with two top vertices.
        let mut h = ConnectionGraph::new(false);
        h.add_vertex(1, 0);
        h.add_vertex(2, 1);
        h.add_vertex(3, 0);
        h.add_vertex(4, 1);
        h.add_edge(2, 1);
        h.add_edge(4, 3);
        assert!(!h.is_sturm_ball());
    }

    #[test]
    fn reversor_on_smallest_stack() {
        let g = connection_graph(&sigma("1,4,3,2,5"), true).unwrap();
        let r = find_reversor(&g).expect("the Chafee-Infante stack is reversible");
        assert!(r.is_valid_for(&g));
        // Involution including the distinguished vertex.
        for (&v, &w) in r.map() {
            assert_eq!(r.apply(w), v);
        }
    }

    #[test]
    fn isomorphism_of_graph_with_itself_is_identity() {
        let g = connection_graph(&sigma("1,8,5,4,9,10,3,6,7,2,11"), true).unwrap();
        let iso = graded_isomorphic(&g, &g).expect("self isomorphism");
        for (v, w) in iso {
            assert_eq!(v, w);
        }
    }

    /// From-scratch recomputation of the heteroclinic relation straight
    /// from the definition, over the reversed boundary order and a freshly
    /// coded zero-number recursion. Everything is independent of the
    /// library path except the shared definition.
    fn naive_relation(sigma: &Permutation) -> BTreeSet<(usize, usize)> {
        let n = sigma.n();
        let inv = sigma.inverse();
        let pos = |v: usize| inv.apply(v); // axis position of vertex v
        let sgn = |x: i64| if x > 0 { 1i64 } else { -1 };
        // Morse indices, written against axis positions this time.
        let mut morse = vec![0i64; n + 1];
        for j in 1..n {
            let step = sgn(pos(j + 1) as i64 - pos(j) as i64);
            morse[j + 1] = morse[j] + if j % 2 == 1 { step } else { -step };
        }
        // Zero numbers by a direct double loop per pair, walking column k
        // independently for each requested pair.
        let z = |a: usize, b: usize| -> i64 {
            let (j0, k) = (a, b);
            let mut row = vec![0i64; n + 1];
            row[1] = if k == 1 { morse[1] } else { 0 };
            for j in 1..n {
                row[j + 1] = if j + 1 == k {
                    morse[k]
                } else if j == k {
                    morse[k].min(morse[k + 1])
                } else {
                    let bracket = sgn(pos(j + 1) as i64 - pos(k) as i64)
                        - sgn(pos(j) as i64 - pos(k) as i64);
                    row[j] + if j % 2 == 1 { bracket / 2 } else { -bracket / 2 }
                };
            }
            row[j0]
        };
        let mut rel = BTreeSet::new();
        for v1 in 1..=n {
            for v2 in 1..=n {
                if v1 == v2 || morse[v1] <= morse[v2] {
                    continue;
                }
                let (lo, hi) = (pos(v1).min(pos(v2)), pos(v1).max(pos(v2)));
                let blocked = (1..=n).any(|w| {
                    pos(w) > lo
                        && pos(w) < hi
                        && z(v1, w) == z(v1, v2)
                        && z(w, v2) == z(v1, v2)
                });
                if !blocked {
                    rel.insert((v1, v2));
                }
            }
        }
        rel
    }

    #[test]
    fn full_relation_matches_definition_oracle() {
        let mut cases: Vec<Permutation> = vec![
            sigma("1,4,3,2,5"),
            sigma("1,8,5,4,9,10,3,6,7,2,11"),
            sigma("1,10,5,6,9,2,3,8,7,4,11"),
        ];
        for d in 1..=6 {
            cases.push(crate::three_nose::chafee_infante_permutation(d));
        }
        for s in cases {
            if s.n() > 13 {
                continue;
            }
            let oracle = naive_relation(&s);
            assert_eq!(full_relation(&s).unwrap(), oracle, "oracle mismatch for {s}");
        }
    }

    #[test]
    fn figure_graph_is_the_lattice_up_to_relabeling() {
        // The 11-vertex 3-ball example is the rotation of the (1,2) family
        // member; its pointed graph is isomorphic to the lattice.
        let g = connection_graph(&sigma("1,8,5,4,9,10,3,6,7,2,11"), true).unwrap();
        let lattice = crate::three_nose::chafee_infante_lattice(1, 2).unwrap();
        assert!(graded_isomorphic(&g, &lattice).is_some());
    }

    #[test]
    fn sturm_ball_for_stacks() {
        for d in 1..=8 {
            let s = crate::three_nose::chafee_infante_permutation(d);
            assert!(connection_graph(&s, false).unwrap().is_sturm_ball());
        }
    }

    #[test]
    fn dot_output_mentions_ranks_and_dashed_star_edges() {
        let g = connection_graph(&sigma("1,2,3"), true).unwrap();
        let dot = g.to_dot();
        assert!(dot.contains("rank=same"));
        assert!(dot.contains("[style=dashed]"));
    }

    #[test]
    fn json_round_trip_shape() {
        let g = connection_graph(&sigma("1,2,3"), true).unwrap();
        let json = g.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["vertices"].as_array().unwrap().len(), 4);
        assert_eq!(value["star_edges"].as_array().unwrap().len(), 2);
    }
}
