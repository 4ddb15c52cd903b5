//! Well-foundedness analysis of the relation `a ≺_d b  :<=>  b ≤ E d ∧ E a`.
//!
//! Standardness of an algebra says exactly that, for every `d`, the
//! elements admitting an infinite `≺_d`-descending chain are those below
//! `C d`. On the accessible (chain-free) part every element gets an
//! ordinal height `ht_d`, heights stratify the carrier into ideals
//! `M_d(γ) = {a | γ ≤ ht_d(a)}`, and each ultrafilter `u` gets the rank
//! `rk_d(u) = min {γ | u ∩ M_d(γ) = ∅}` (infinite when `C d ∈ u`). Ranks
//! drive the hierarchy `J^γ_d = {u | γ ≤ rk_d(u)}` that the Stone-type
//! representation climbs; see [`crate::stone::verify_representation`].

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::stone::{is_ultrafilter, Ultrafilter};

/// An ordinal height, finite or beyond every finite stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    Fin(u32),
    Inf,
}

impl Height {
    /// Successor; the infinite stage absorbs it.
    pub fn succ(self) -> Height {
        match self {
            Height::Fin(k) => Height::Fin(k + 1),
            Height::Inf => Height::Inf,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Height::Fin(_))
    }
}

impl std::fmt::Display for Height {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Height::Fin(k) => write!(f, "{k}"),
            Height::Inf => write!(f, "inf"),
        }
    }
}

/// A finite directed graph stored as predecessor rows: `preds[x]` holds
/// the sources of the edges into `x`. For the `≺_d` graph an edge `(a, b)`
/// means `a ≺_d b`, so the predecessors of `b` are the elements strictly
/// involved in descending past `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    preds: Vec<FixedBitSet>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph {
            n,
            preds: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        self.preds[to].insert(from);
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.preds[to].contains(from)
    }

    pub fn preds_of(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.preds[x].ones()
    }

    pub fn edge_count(&self) -> usize {
        self.preds.iter().map(|p| p.count_ones(..)).sum()
    }
}

/// The graph of `≺_d` over the whole carrier: edge `(a, b)` iff
/// `b ≤ E d ∧ E a`.
pub fn prec_graph(alg: &FiniteAlgebra, d: Elem) -> Digraph {
    let n = alg.size();
    let ed = alg.e_op(d);
    let mut g = Digraph::new(n);
    for a in alg.elements() {
        let cap = ed & alg.e_op(a);
        // Enumerate exactly the submasks of cap, largest first.
        let mut b = cap;
        loop {
            g.add_edge(a as usize, b as usize);
            if b == 0 {
                break;
            }
            b = (b - 1) & cap;
        }
    }
    g
}

/// The accessible part: the least fixpoint of `X -> {x | preds(x) ⊆ X}`,
/// i.e. the nodes from which every descending walk terminates.
pub fn accessible_part(g: &Digraph) -> FixedBitSet {
    let mut acc = FixedBitSet::with_capacity(g.n);
    loop {
        let mut grew = false;
        for x in 0..g.n {
            if !acc.contains(x) && g.preds[x].is_subset(&acc) {
                acc.insert(x);
                grew = true;
            }
        }
        if !grew {
            return acc;
        }
    }
}

/// Heights: `ht(x) = sup {ht(y) + 1 | y a predecessor of x}` on the
/// accessible part, infinite elsewhere.
pub fn heights(g: &Digraph) -> Vec<Height> {
    let mut ht: Vec<Option<u32>> = vec![None; g.n];
    loop {
        let mut grew = false;
        'nodes: for x in 0..g.n {
            if ht[x].is_some() {
                continue;
            }
            let mut h = 0;
            for y in g.preds[x].ones() {
                match ht[y] {
                    Some(hy) => h = h.max(hy + 1),
                    None => continue 'nodes,
                }
            }
            ht[x] = Some(h);
            grew = true;
        }
        if !grew {
            return ht
                .into_iter()
                .map(|o| o.map_or(Height::Inf, Height::Fin))
                .collect();
        }
    }
}

/// Product graph on pairs `(x, y) -> x * h.n + y`, with an edge exactly
/// when both components have one. For `≺` graphs this is the graph of the
/// product algebra, and heights in it are the minimum of the component
/// heights.
pub fn product(g: &Digraph, h: &Digraph) -> Digraph {
    let mut p = Digraph::new(g.n * h.n);
    for bx in 0..g.n {
        for ax in g.preds[bx].ones() {
            for by in 0..h.n {
                for ay in h.preds[by].ones() {
                    p.add_edge(ax * h.n + ay, bx * h.n + by);
                }
            }
        }
    }
    p
}

/// Image graph under a node map: node `x` goes to `map[x]` in a graph on
/// `m` nodes, every edge goes along. Any edge-preserving map can only
/// increase heights, which is how surjective homomorphisms behave on `≺`.
pub fn map_image(g: &Digraph, map: &[usize], m: usize) -> Digraph {
    let mut im = Digraph::new(m);
    for b in 0..g.n {
        for a in g.preds[b].ones() {
            im.add_edge(map[a], map[b]);
        }
    }
    im
}

/// Height of the whole algebra at `d`: `sup {ht_d(b) + 1 | b not below C d}`.
/// Zero when everything is below `C d`.
pub fn ht_algebra(alg: &FiniteAlgebra, d: Elem) -> Height {
    let ht = heights(&prec_graph(alg, d));
    let cd = alg.c_op(d);
    let mut out = Height::Fin(0);
    for b in alg.elements() {
        if !alg.leq(b, cd) {
            out = out.max(ht[b as usize].succ());
        }
    }
    out
}

/// `M_d(γ) = {a | γ ≤ ht_d(a)}`, as a bitset over element indices.
pub fn m_ideal(alg: &FiniteAlgebra, d: Elem, gamma: Height) -> FixedBitSet {
    let ht = heights(&prec_graph(alg, d));
    let mut set = FixedBitSet::with_capacity(alg.size());
    for a in alg.elements() {
        if ht[a as usize] >= gamma {
            set.insert(a as usize);
        }
    }
    set
}

/// Why a set fails to be an ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdealViolation {
    MissingZero,
    NotJoinClosed { x: Elem, y: Elem },
    NotDownClosed { inside: Elem, below: Elem },
}

/// Check the ideal laws: contains 0, closed under joins, downward closed.
pub fn is_ideal(alg: &FiniteAlgebra, set: &FixedBitSet) -> Option<IdealViolation> {
    if !set.contains(0) {
        return Some(IdealViolation::MissingZero);
    }
    for x in set.ones() {
        for y in set.ones() {
            let j = x | y;
            if !set.contains(j) {
                return Some(IdealViolation::NotJoinClosed {
                    x: x as Elem,
                    y: y as Elem,
                });
            }
        }
        for b in alg.elements() {
            if alg.leq(b, x as Elem) && !set.contains(b as usize) {
                return Some(IdealViolation::NotDownClosed {
                    inside: x as Elem,
                    below: b,
                });
            }
        }
    }
    None
}

/// One way the accessible part disagrees with `{a | a not below C d}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StandardnessBreak {
    /// `head` is not below `C d` yet starts an infinite descending chain:
    /// the chain walks `prefix` then repeats `cycle` forever.
    DescendingLasso {
        d: Elem,
        head: Elem,
        prefix: Vec<Elem>,
        cycle: Vec<Elem>,
    },
    /// `elem` is below `C d` yet every descending chain from it dies out.
    AccessibleBelowC { d: Elem, elem: Elem },
}

/// Outcome of the graph-theoretic standardness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardnessOutcome {
    pub standard: bool,
    /// First disagreement found for each offending `d`.
    pub breaks: Vec<StandardnessBreak>,
}

/// Check `Acc(≺_d) = {a | a not below C d}` for every `d`. Valid algebras
/// always pass (they are even σ-complete, being finite); the witnesses
/// matter for corrupted input, where a lasso makes the failure tangible.
pub fn check_standard(alg: &FiniteAlgebra) -> StandardnessOutcome {
    let mut breaks = Vec::new();
    for d in alg.elements() {
        let g = prec_graph(alg, d);
        let acc = accessible_part(&g);
        let cd = alg.c_op(d);
        let mut found: Option<StandardnessBreak> = None;
        for a in alg.elements() {
            let accessible = acc.contains(a as usize);
            let above_c = !alg.leq(a, cd);
            if accessible == above_c {
                continue;
            }
            found = Some(if accessible {
                StandardnessBreak::AccessibleBelowC { d, elem: a }
            } else {
                let (prefix, cycle) = extract_lasso(&g, &acc, a as usize);
                StandardnessBreak::DescendingLasso {
                    d,
                    head: a,
                    prefix,
                    cycle,
                }
            });
            break;
        }
        if let Some(b) = found {
            breaks.push(b);
        }
    }
    StandardnessOutcome {
        standard: breaks.is_empty(),
        breaks,
    }
}

/// Shortest eventually-periodic descending walk from an inaccessible head:
/// breadth-first distances from the head, then the shortest cycle through
/// each reachable node, minimising walk length (prefix plus cycle). Steps
/// go from a node to one of its inaccessible predecessors, which is a
/// descent in `≺`.
fn extract_lasso(g: &Digraph, acc: &FixedBitSet, head: usize) -> (Vec<Elem>, Vec<Elem>) {
    let step = |x: usize| g.preds[x].ones().filter(|&y| !acc.contains(y));
    let bfs = |start: usize| -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let mut dist = vec![None; g.n];
        let mut parent = vec![None; g.n];
        let mut queue = std::collections::VecDeque::new();
        dist[start] = Some(0);
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            for y in step(x) {
                if dist[y].is_none() {
                    dist[y] = Some(dist[x].unwrap() + 1);
                    parent[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        (dist, parent)
    };
    let path_from = |parent: &[Option<usize>], start: usize, end: usize| -> Vec<usize> {
        let mut path = vec![end];
        let mut at = end;
        while at != start {
            at = parent[at].unwrap();
            path.push(at);
        }
        path.reverse();
        path
    };

    let (dist_h, parent_h) = bfs(head);
    let mut best: Option<(usize, usize, Vec<usize>)> = None; // (total, entry, cycle path)
    for y in 0..g.n {
        let Some(dy) = dist_h[y] else { continue };
        // Shortest cycle through y: BFS from y, then one closing step.
        let (dist_y, parent_y) = bfs(y);
        let mut cyc: Option<Vec<usize>> = None;
        for x in 0..g.n {
            if dist_y[x].is_some() && g.preds[x].contains(y) && !acc.contains(y) {
                // x -> y closes a cycle of length dist_y[x] + 1.
                let candidate = path_from(&parent_y, y, x);
                if cyc.as_ref().is_none_or(|c| candidate.len() < c.len()) {
                    cyc = Some(candidate);
                }
            }
        }
        if let Some(c) = cyc {
            let total = dy + c.len();
            if best.as_ref().is_none_or(|(t, _, _)| total < *t) {
                best = Some((total, y, c));
            }
        }
    }
    let (_, entry, cycle) = best.expect("inaccessible node reaches a cycle");
    let mut prefix = path_from(&parent_h, head, entry);
    prefix.pop(); // entry starts the cycle
    (
        prefix.into_iter().map(|x| x as Elem).collect(),
        cycle.into_iter().map(|x| x as Elem).collect(),
    )
}

/// Rank failure.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RankError {
    #[error("the given set is not an ultrafilter of this algebra")]
    NotUltrafilter,
}

/// `rk_d(u)`: infinite when `C d ∈ u`, else the least `γ` with
/// `u ∩ M_d(γ) = ∅`. On valid algebras the least such `γ` exists and is
/// at most the algebra height plus one.
pub fn rank_ultrafilter(
    alg: &FiniteAlgebra,
    d: Elem,
    u: &Ultrafilter,
) -> Result<Height, RankError> {
    if !is_ultrafilter(alg, u) {
        return Err(RankError::NotUltrafilter);
    }
    if u.contains(alg.c_op(d)) {
        return Ok(Height::Inf);
    }
    let ht = heights(&prec_graph(alg, d));
    let max_fin = ht
        .iter()
        .filter_map(|h| match h {
            Height::Fin(k) => Some(*k),
            Height::Inf => None,
        })
        .max()
        .unwrap_or(0);
    for gamma in 0..=max_fin + 1 {
        let empty = u
            .member_elems()
            .all(|e| ht[e as usize] < Height::Fin(gamma));
        if empty {
            return Ok(Height::Fin(gamma));
        }
    }
    // Only reachable on algebras violating the laws: some member of u has
    // infinite height even though C d is outside u.
    Ok(Height::Inf)
}

/// `J^γ_d`: the ultrafilters of rank at least `γ`, as a bitset over the
/// positions in `ufs`.
pub fn j_set(
    alg: &FiniteAlgebra,
    d: Elem,
    gamma: Height,
    ufs: &[Ultrafilter],
) -> Result<FixedBitSet, RankError> {
    let mut set = FixedBitSet::with_capacity(ufs.len());
    for (i, u) in ufs.iter().enumerate() {
        if rank_ultrafilter(alg, d, u)? >= gamma {
            set.insert(i);
        }
    }
    Ok(set)
}
