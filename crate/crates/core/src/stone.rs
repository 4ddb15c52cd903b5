//! Finite multi-topological spaces and the duality with algebras.
//!
//! A space carries one topology per agent over a common finite point set.
//! Its powerset is an algebra: each box is the interior in that agent's
//! topology and the common-knowledge operator is the interior in the
//! intersection topology. In the other direction every valid finite
//! algebra is recovered from its canonical space, whose points are the
//! ultrafilters (principal, one per atom) and whose opens are generated
//! by the images of the box operators. [`verify_representation`] checks
//! that this recovery is exact and that the rank hierarchy from
//! [`crate::wellfound`] climbs to the common-knowledge operator;
//! [`completion_embed`] checks that the induced embedding into the
//! powerset of the canonical space is an isomorphism.

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::algebra::{Elem, FiniteAlgebra, OpName, MAX_ATOMS};
use crate::kripke::KripkeModel;
use crate::syntax::AgentId;
use crate::wellfound::{ht_algebra, j_set, m_ideal, rank_ultrafilter, Height};

/// Most points a space may have; interiors and powerset tables are
/// materialised over all `2^points` subsets.
pub const MAX_POINTS: usize = MAX_ATOMS;

/// Ways a space can fail to be well-formed.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("space needs at least one point")]
    NoPoints,
    #[error("spaces support at most {MAX_POINTS} points")]
    TooManyPoints,
    #[error("space needs at least one agent")]
    NoAgents,
    #[error("point name '{0}' is not alphanumeric")]
    BadPointName(String),
    #[error("duplicate point name '{0}'")]
    DuplicatePoint(String),
    #[error("expected one open family per agent ({agents}), got {got}")]
    FamilyCount { agents: AgentId, got: usize },
    #[error("open {open:#b} of agent {agent} has bits outside the point set")]
    OpenOutOfRange { agent: AgentId, open: u64 },
}

/// A finite point set with one topology per agent. Subsets are bitmasks
/// over point indices; each topology is stored extensionally as a sorted
/// list of opens, always containing the empty set and the full set and
/// closed under union and intersection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTopSpace {
    point_names: Vec<String>,
    agents: AgentId,
    topologies: Vec<Vec<u64>>,
}

/// The topology generated by a family: close under binary unions and
/// intersections, always including the empty and the full set.
pub fn close_family(basis: &[u64], full: u64) -> Vec<u64> {
    let mut seen = vec![false; (full + 1) as usize];
    seen[0] = true;
    seen[full as usize] = true;
    let mut work: Vec<u64> = vec![0, full];
    for &b in basis {
        if !seen[b as usize] {
            seen[b as usize] = true;
            work.push(b);
        }
    }
    let mut i = 0;
    while i < work.len() {
        let x = work[i];
        for j in 0..i {
            let y = work[j];
            for z in [x | y, x & y] {
                if !seen[z as usize] {
                    seen[z as usize] = true;
                    work.push(z);
                }
            }
        }
        i += 1;
    }
    work.sort_unstable();
    work
}

/// Interior of `y` in the given family of opens: the union of the opens
/// below `y`. For a topology this is the largest open inside `y`.
pub fn interior_of(opens: &[u64], y: u64) -> u64 {
    opens
        .iter()
        .filter(|&&o| o & !y == 0)
        .fold(0, |acc, &o| acc | o)
}

impl FiniteTopSpace {
    /// Build a space from one generating family per agent; each family is
    /// closed into a topology.
    pub fn new(
        point_names: Vec<String>,
        agents: AgentId,
        bases: Vec<Vec<u64>>,
    ) -> Result<Self, SpaceError> {
        let full = Self::check_shape(&point_names, agents, &bases)?;
        let topologies = bases.iter().map(|b| close_family(b, full)).collect();
        Ok(FiniteTopSpace {
            point_names,
            agents,
            topologies,
        })
    }

    /// Build a space from raw open families without closing them, so that
    /// [`FiniteTopSpace::validate`] has something to catch. Families are
    /// sorted and deduplicated but otherwise taken as given.
    pub fn from_raw_topologies(
        point_names: Vec<String>,
        agents: AgentId,
        topologies: Vec<Vec<u64>>,
    ) -> Result<Self, SpaceError> {
        Self::check_shape(&point_names, agents, &topologies)?;
        let topologies = topologies
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t.dedup();
                t
            })
            .collect();
        Ok(FiniteTopSpace {
            point_names,
            agents,
            topologies,
        })
    }

    fn check_shape(
        point_names: &[String],
        agents: AgentId,
        families: &[Vec<u64>],
    ) -> Result<u64, SpaceError> {
        if point_names.is_empty() {
            return Err(SpaceError::NoPoints);
        }
        if point_names.len() > MAX_POINTS {
            return Err(SpaceError::TooManyPoints);
        }
        if agents == 0 {
            return Err(SpaceError::NoAgents);
        }
        for (i, name) in point_names.iter().enumerate() {
            if name.is_empty() || !name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
                return Err(SpaceError::BadPointName(name.clone()));
            }
            if point_names[..i].contains(name) {
                return Err(SpaceError::DuplicatePoint(name.clone()));
            }
        }
        if families.len() != agents as usize {
            return Err(SpaceError::FamilyCount {
                agents,
                got: families.len(),
            });
        }
        let full = (1u64 << point_names.len()) - 1;
        for (i, fam) in families.iter().enumerate() {
            for &o in fam {
                if o & !full != 0 {
                    return Err(SpaceError::OpenOutOfRange {
                        agent: i as AgentId,
                        open: o,
                    });
                }
            }
        }
        Ok(full)
    }

    pub fn point_count(&self) -> usize {
        self.point_names.len()
    }

    pub fn point_names(&self) -> &[String] {
        &self.point_names
    }

    pub fn agent_count(&self) -> AgentId {
        self.agents
    }

    /// The full point set as a mask.
    pub fn full(&self) -> u64 {
        (1u64 << self.point_names.len()) - 1
    }

    pub fn topology(&self, agent: AgentId) -> &[u64] {
        &self.topologies[agent as usize]
    }

    /// Interior of `y` in agent `i`'s topology.
    pub fn interior(&self, agent: AgentId, y: u64) -> u64 {
        interior_of(&self.topologies[agent as usize], y)
    }

    /// The intersection of all agents' topologies, sorted.
    pub fn common_topology(&self) -> Vec<u64> {
        let mut common: Vec<u64> = self.topologies[0].clone();
        for t in &self.topologies[1..] {
            common.retain(|o| t.binary_search(o).is_ok());
        }
        common
    }

    /// Interior of `y` in the intersection topology.
    pub fn common_interior(&self, y: u64) -> u64 {
        interior_of(&self.common_topology(), y)
    }

    /// Render a point mask as a comma-joined name list, `-` when empty.
    pub fn format_points(&self, mask: u64) -> String {
        let names: Vec<&str> = (0..self.point_count())
            .filter(|&j| mask & (1 << j) != 0)
            .map(|j| self.point_names[j].as_str())
            .collect();
        if names.is_empty() {
            "-".to_owned()
        } else {
            names.join(",")
        }
    }

    /// Check the topology axioms on every agent's family.
    pub fn validate(&self) -> SpaceReport {
        let mut violations = Vec::new();
        let full = self.full();
        for (i, t) in self.topologies.iter().enumerate() {
            let agent = i as AgentId;
            if t.binary_search(&0).is_err() {
                violations.push(TopologyViolation::MissingEmpty { agent });
            }
            if t.binary_search(&full).is_err() {
                violations.push(TopologyViolation::MissingFull { agent });
            }
            'pairs: for (xi, &x) in t.iter().enumerate() {
                for &y in &t[xi + 1..] {
                    if t.binary_search(&(x | y)).is_err() {
                        violations.push(TopologyViolation::UnionEscapes { agent, x, y });
                        break 'pairs;
                    }
                    if t.binary_search(&(x & y)).is_err() {
                        violations.push(TopologyViolation::IntersectionEscapes { agent, x, y });
                        break 'pairs;
                    }
                }
            }
        }
        SpaceReport { violations }
    }
}

/// One broken topology axiom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyViolation {
    MissingEmpty { agent: AgentId },
    MissingFull { agent: AgentId },
    UnionEscapes { agent: AgentId, x: u64, y: u64 },
    IntersectionEscapes { agent: AgentId, x: u64, y: u64 },
}

impl TopologyViolation {
    pub fn describe(&self, space: &FiniteTopSpace) -> String {
        match *self {
            TopologyViolation::MissingEmpty { agent } => {
                format!("agent {agent}: empty set is not open")
            }
            TopologyViolation::MissingFull { agent } => {
                format!("agent {agent}: full set is not open")
            }
            TopologyViolation::UnionEscapes { agent, x, y } => format!(
                "agent {agent}: union of opens {} and {} is not open",
                space.format_points(x),
                space.format_points(y)
            ),
            TopologyViolation::IntersectionEscapes { agent, x, y } => format!(
                "agent {agent}: intersection of opens {} and {} is not open",
                space.format_points(x),
                space.format_points(y)
            ),
        }
    }
}

/// Outcome of checking the topology axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceReport {
    pub violations: Vec<TopologyViolation>,
}

impl SpaceReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// One broken interior-operator law, found while recovering a topology
/// from an operator table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum KuratowskiViolation {
    #[error("operator is not deflationary at {x:#b}")]
    NotDeflationary { x: u64 },
    #[error("operator is not idempotent at {x:#b}")]
    NotIdempotent { x: u64 },
    #[error("operator does not preserve the intersection of {x:#b} and {y:#b}")]
    MeetNotPreserved { x: u64, y: u64 },
    #[error("operator does not fix the full set")]
    FullNotFixed,
    #[error("operator table must have 2^points entries")]
    WrongTableLength,
}

/// Recover the topology of an interior operator given as a table over all
/// subsets of a `points`-element set: check the four interior laws, then
/// return the fixpoints. The operator is the interior of its fixpoints
/// exactly when the laws hold, so this inverts [`interior_of`].
pub fn kuratowski_roundtrip(
    points: usize,
    table: &[u64],
) -> Result<Vec<u64>, KuratowskiViolation> {
    let size = 1usize << points;
    if table.len() != size {
        return Err(KuratowskiViolation::WrongTableLength);
    }
    let full = (size - 1) as u64;
    for x in 0..size as u64 {
        if table[x as usize] & !x != 0 {
            return Err(KuratowskiViolation::NotDeflationary { x });
        }
    }
    for x in 0..size as u64 {
        let tx = table[x as usize];
        if table[tx as usize] != tx {
            return Err(KuratowskiViolation::NotIdempotent { x });
        }
    }
    for x in 0..size as u64 {
        for y in 0..size as u64 {
            if table[(x & y) as usize] != table[x as usize] & table[y as usize] {
                return Err(KuratowskiViolation::MeetNotPreserved { x, y });
            }
        }
    }
    if table[full as usize] != full {
        return Err(KuratowskiViolation::FullNotFixed);
    }
    let opens: Vec<u64> = (0..size as u64).filter(|&x| table[x as usize] == x).collect();
    debug_assert!((0..size as u64).all(|y| interior_of(&opens, y) == table[y as usize]));
    Ok(opens)
}

/// The powerset algebra of a space: atoms are the points, each box is the
/// corresponding interior, and the common-knowledge operator is the
/// interior in the intersection topology. Always satisfies the algebra
/// laws.
pub fn powerset_algebra(space: &FiniteTopSpace) -> FiniteAlgebra {
    let size = 1u64 << space.point_count();
    let box_ops: Vec<Vec<Elem>> = (0..space.agent_count())
        .map(|i| (0..size).map(|y| space.interior(i, y)).collect())
        .collect();
    let common = space.common_topology();
    let c_op: Vec<Elem> = (0..size).map(|y| interior_of(&common, y)).collect();
    FiniteAlgebra::new(
        space.point_names().to_vec(),
        space.agent_count(),
        box_ops,
        c_op,
    )
    .expect("space points are valid atoms")
}

/// Why an algebra's operators cannot be read back as topologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToTopologyError {
    MissingEmpty { op: OpName },
    MissingFull { op: OpName },
    UnionEscapes { op: OpName, x: Elem, y: Elem },
    IntersectionEscapes { op: OpName, x: Elem, y: Elem },
    /// The operator differs from the interior of its own fixpoints.
    NotInteriorOperator { op: OpName, elem: Elem },
    /// The fixpoints of the common-knowledge operator differ from the
    /// intersection of the agents' fixpoint topologies.
    CommonFixpointsDiffer { elem: Elem },
}

impl std::fmt::Display for ToTopologyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            ToTopologyError::MissingEmpty { op } => {
                write!(f, "fixpoints of {op} do not include 0")
            }
            ToTopologyError::MissingFull { op } => {
                write!(f, "fixpoints of {op} do not include the top element")
            }
            ToTopologyError::UnionEscapes { op, x, y } => {
                write!(f, "fixpoints of {op} are not closed under the join of {x} and {y}")
            }
            ToTopologyError::IntersectionEscapes { op, x, y } => {
                write!(f, "fixpoints of {op} are not closed under the meet of {x} and {y}")
            }
            ToTopologyError::NotInteriorOperator { op, elem } => {
                write!(f, "{op} differs from the interior of its fixpoints at {elem}")
            }
            ToTopologyError::CommonFixpointsDiffer { elem } => write!(
                f,
                "fixpoints of C and the intersection of the box fixpoint topologies differ at {elem}"
            ),
        }
    }
}

impl std::error::Error for ToTopologyError {}

fn op_fixpoints(alg: &FiniteAlgebra, op: OpName) -> Vec<Elem> {
    let apply = |x: Elem| match op {
        OpName::Box(i) => alg.box_op(i, x),
        OpName::C => alg.c_op(x),
    };
    alg.elements().filter(|&x| apply(x) == x).collect()
}

fn check_op_topology(alg: &FiniteAlgebra, op: OpName) -> Result<Vec<Elem>, ToTopologyError> {
    let apply = |x: Elem| match op {
        OpName::Box(i) => alg.box_op(i, x),
        OpName::C => alg.c_op(x),
    };
    let fix = op_fixpoints(alg, op);
    if fix.binary_search(&0).is_err() {
        return Err(ToTopologyError::MissingEmpty { op });
    }
    if fix.binary_search(&alg.top()).is_err() {
        return Err(ToTopologyError::MissingFull { op });
    }
    for (xi, &x) in fix.iter().enumerate() {
        for &y in &fix[xi + 1..] {
            if fix.binary_search(&(x | y)).is_err() {
                return Err(ToTopologyError::UnionEscapes { op, x, y });
            }
            if fix.binary_search(&(x & y)).is_err() {
                return Err(ToTopologyError::IntersectionEscapes { op, x, y });
            }
        }
    }
    for y in alg.elements() {
        if interior_of(&fix, y) != apply(y) {
            return Err(ToTopologyError::NotInteriorOperator { op, elem: y });
        }
    }
    Ok(fix)
}

/// Recover the per-agent topologies of an algebra over its own carrier:
/// each box's fixpoints must form a topology with the box as its interior,
/// and the fixpoints of the common-knowledge operator must be exactly the
/// intersection of the agents' topologies. Valid algebras always pass.
pub fn algebra_to_topologies(alg: &FiniteAlgebra) -> Result<Vec<Vec<Elem>>, ToTopologyError> {
    let mut tops = Vec::new();
    for i in 0..alg.agent_count() {
        tops.push(check_op_topology(alg, OpName::Box(i))?);
    }
    let c_fix = check_op_topology(alg, OpName::C)?;
    let mut common = tops[0].clone();
    for t in &tops[1..] {
        common.retain(|o| t.binary_search(o).is_ok());
    }
    if common != c_fix {
        let elem = common
            .iter()
            .chain(c_fix.iter())
            .copied()
            .find(|e| common.binary_search(e).is_ok() != c_fix.binary_search(e).is_ok())
            .unwrap();
        return Err(ToTopologyError::CommonFixpointsDiffer { elem });
    }
    Ok(tops)
}

/// An ultrafilter of a finite algebra. These are exactly the principal
/// filters at atoms, so each carries the atom it is generated by; sets
/// built by hand for testing carry none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ultrafilter {
    atom: Option<usize>,
    members: FixedBitSet,
}

impl Ultrafilter {
    /// Wrap an explicit member set (element indices) without any checks.
    pub fn from_raw_members(size: usize, elems: &[Elem]) -> Ultrafilter {
        let mut members = FixedBitSet::with_capacity(size);
        for &e in elems {
            members.insert(e as usize);
        }
        Ultrafilter {
            atom: None,
            members,
        }
    }

    /// The atom generating this ultrafilter, when it was derived.
    pub fn principal_atom(&self) -> Option<usize> {
        self.atom
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.members.contains(e as usize)
    }

    pub fn member_elems(&self) -> impl Iterator<Item = Elem> + '_ {
        self.members.ones().map(|i| i as Elem)
    }

    pub fn member_count(&self) -> usize {
        self.members.count_ones(..)
    }
}

/// All ultrafilters, in atom order: the j-th contains exactly the elements
/// with atom j below them.
pub fn ultrafilters(alg: &FiniteAlgebra) -> Vec<Ultrafilter> {
    (0..alg.atom_count())
        .map(|j| {
            let mut members = FixedBitSet::with_capacity(alg.size());
            for e in alg.elements() {
                if e & (1 << j) != 0 {
                    members.insert(e as usize);
                }
            }
            Ultrafilter {
                atom: Some(j),
                members,
            }
        })
        .collect()
}

/// Check the ultrafilter axioms in full: proper (has top, misses 0),
/// closed under meets, upward closed, and total (contains exactly one of
/// each complementary pair).
pub fn is_ultrafilter(alg: &FiniteAlgebra, u: &Ultrafilter) -> bool {
    if u.members.len() != alg.size() {
        return false;
    }
    if !u.contains(alg.top()) || u.contains(0) {
        return false;
    }
    for x in u.member_elems() {
        for y in u.member_elems() {
            if !u.contains(alg.meet(x, y)) {
                return false;
            }
        }
        for y in alg.elements() {
            if alg.leq(x, y) && !u.contains(y) {
                return false;
            }
        }
    }
    alg.elements().all(|e| u.contains(e) != u.contains(alg.compl(e)))
}

/// The Stone map: the set of ultrafilters containing `e`, as a point mask
/// of the canonical space. With principal ultrafilters in atom order this
/// is the identity on masks, but it is computed from membership.
pub fn hat(alg: &FiniteAlgebra, e: Elem) -> u64 {
    let mut mask = 0u64;
    for j in 0..alg.atom_count() {
        if e & (1 << j) != 0 {
            mask |= 1 << j;
        }
    }
    mask
}

/// The canonical space of an algebra: points are the ultrafilters, and
/// agent `i`'s topology is generated by the images under [`hat`] of the
/// box operator. The generating family is already closed under
/// intersections because boxes preserve meets; closing adds the unions.
pub fn topo_canonical(alg: &FiniteAlgebra) -> FiniteTopSpace {
    let names = alg
        .atom_names()
        .iter()
        .map(|a| format!("u_{a}"))
        .collect();
    let bases: Vec<Vec<u64>> = (0..alg.agent_count())
        .map(|i| alg.elements().map(|b| hat(alg, alg.box_op(i, b))).collect())
        .collect();
    FiniteTopSpace::new(names, alg.agent_count(), bases)
        .expect("atom names make valid point names")
}

/// One failure of the canonical representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReprViolation {
    /// `hat(box_i a)` is not the interior of `hat(a)` in topology `i`.
    BoxMismatch { agent: AgentId, elem: Elem },
    /// `hat(C a)` is not the interior of `hat(a)` in the intersection
    /// topology.
    CommonMismatch { elem: Elem },
    /// The hierarchy step at `d`, stage `gamma` fails: the everyone-interior
    /// of `hat(d)` intersected with the everyone-interior of the stage does
    /// not land in the next stage.
    HierarchyStep { d: Elem, gamma: u32 },
    /// The stages do not stabilise to `hat(C d)`.
    CommonNotLimit { d: Elem },
    /// Rank and the height ideals disagree: `gamma < rk_d(u)` must hold
    /// exactly when `u` meets `M_d(gamma)`.
    RankEquivalence { d: Elem, point: usize, gamma: u32 },
}

impl ReprViolation {
    pub fn describe(&self, alg: &FiniteAlgebra) -> String {
        match *self {
            ReprViolation::BoxMismatch { agent, elem } => format!(
                "box{agent} at {} is not the canonical interior",
                alg.format_elem(elem)
            ),
            ReprViolation::CommonMismatch { elem } => format!(
                "C at {} is not the canonical intersection interior",
                alg.format_elem(elem)
            ),
            ReprViolation::HierarchyStep { d, gamma } => format!(
                "hierarchy step at d={}, stage {gamma} is not monotone into the next stage",
                alg.format_elem(d)
            ),
            ReprViolation::CommonNotLimit { d } => format!(
                "stages at d={} do not stabilise to the image of C",
                alg.format_elem(d)
            ),
            ReprViolation::RankEquivalence { d, point, gamma } => format!(
                "rank of ultrafilter {point} at d={}, stage {gamma} disagrees with the height ideal",
                alg.format_elem(d)
            ),
        }
    }
}

/// Outcome of [`verify_representation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReprReport {
    pub violations: Vec<ReprViolation>,
    /// How many (d, stage) hierarchy steps were exercised.
    pub levels_checked: u32,
}

impl ReprReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verify the canonical representation of an algebra on its canonical
/// space: boxes and the common-knowledge operator are the topological
/// interiors, ranks match the height ideals, and the stage hierarchy
/// `J^0 ⊇ J^1 ⊇ …` both respects the induction step and stabilises to the
/// image of `C`. Valid algebras pass every check.
pub fn verify_representation(alg: &FiniteAlgebra) -> ReprReport {
    let space = topo_canonical(alg);
    let mut violations = Vec::new();
    let mut levels_checked = 0;

    for a in alg.elements() {
        for i in 0..alg.agent_count() {
            if space.interior(i, hat(alg, a)) != hat(alg, alg.box_op(i, a)) {
                violations.push(ReprViolation::BoxMismatch { agent: i, elem: a });
            }
        }
        if space.common_interior(hat(alg, a)) != hat(alg, alg.c_op(a)) {
            violations.push(ReprViolation::CommonMismatch { elem: a });
        }
    }

    let ufs = ultrafilters(alg);
    let uf_mask = |set: &FixedBitSet| -> u64 {
        set.ones().fold(0u64, |acc, i| acc | (1 << i))
    };
    let e_interior = |y: u64| -> u64 {
        (0..alg.agent_count()).fold(space.full(), |acc, i| acc & space.interior(i, y))
    };
    for d in alg.elements() {
        let cap = match ht_algebra(alg, d) {
            Height::Fin(k) => k + 1,
            // Only on invalid input; exercise the stages up to the carrier
            // size, which bounds every finite rank.
            Height::Inf => alg.size() as u32 + 1,
        };
        let stage = |gamma: Height| -> u64 {
            uf_mask(&j_set(alg, d, gamma, &ufs).expect("derived ultrafilters are valid"))
        };
        let target = hat(alg, alg.c_op(d));
        for gamma in 0..cap {
            let lhs = e_interior(hat(alg, d)) & e_interior(stage(Height::Fin(gamma)));
            if lhs & !stage(Height::Fin(gamma + 1)) != 0 {
                violations.push(ReprViolation::HierarchyStep { d, gamma });
            }
            levels_checked += 1;
        }
        if stage(Height::Fin(cap)) != target || stage(Height::Inf) != target {
            violations.push(ReprViolation::CommonNotLimit { d });
        }
        for (p, u) in ufs.iter().enumerate() {
            let rk = rank_ultrafilter(alg, d, u).expect("derived ultrafilters are valid");
            for gamma in 0..=cap {
                let m = m_ideal(alg, d, Height::Fin(gamma));
                let meets = u.member_elems().any(|e| m.contains(e as usize));
                if (Height::Fin(gamma) < rk) != meets {
                    violations.push(ReprViolation::RankEquivalence { d, point: p, gamma });
                }
            }
        }
    }

    ReprReport {
        violations,
        levels_checked,
    }
}

/// One failure of the canonical embedding to be an isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompletionViolation {
    NotInjective { x: Elem, y: Elem },
    NotSurjective { target: u64 },
    BottomNotPreserved,
    TopNotPreserved,
    MeetNotPreserved { x: Elem, y: Elem },
    ComplementNotPreserved { x: Elem },
    BoxNotPreserved { agent: AgentId, x: Elem },
    CommonNotPreserved { x: Elem },
}

/// Outcome of [`completion_embed`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionReport {
    pub violations: Vec<CompletionViolation>,
}

impl CompletionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check that [`hat`] embeds the algebra into the powerset algebra of its
/// canonical space and is onto: a finite algebra is its own completion.
/// Joins and implications follow from meets and complements, so only the
/// latter are checked.
pub fn completion_embed(alg: &FiniteAlgebra) -> CompletionReport {
    let b = powerset_algebra(&topo_canonical(alg));
    let h = |x: Elem| hat(alg, x);
    let mut violations = Vec::new();
    for x in alg.elements() {
        for y in alg.elements() {
            if x < y && h(x) == h(y) {
                violations.push(CompletionViolation::NotInjective { x, y });
            }
            if h(alg.meet(x, y)) != b.meet(h(x), h(y)) {
                violations.push(CompletionViolation::MeetNotPreserved { x, y });
            }
        }
        if h(alg.compl(x)) != b.compl(h(x)) {
            violations.push(CompletionViolation::ComplementNotPreserved { x });
        }
        for i in 0..alg.agent_count() {
            if h(alg.box_op(i, x)) != b.box_op(i, h(x)) {
                violations.push(CompletionViolation::BoxNotPreserved { agent: i, x });
            }
        }
        if h(alg.c_op(x)) != b.c_op(h(x)) {
            violations.push(CompletionViolation::CommonNotPreserved { x });
        }
    }
    if h(0) != 0 {
        violations.push(CompletionViolation::BottomNotPreserved);
    }
    if h(alg.top()) != b.top() {
        violations.push(CompletionViolation::TopNotPreserved);
    }
    let mut hit = vec![false; b.size()];
    for x in alg.elements() {
        hit[h(x) as usize] = true;
    }
    for (t, &was_hit) in hit.iter().enumerate() {
        if !was_hit {
            violations.push(CompletionViolation::NotSurjective { target: t as u64 });
        }
    }
    CompletionReport { violations }
}

/// The Alexandrov space of a model: points are the worlds and agent `i`'s
/// opens are the sets closed under `R_i`-successors. On reflexive and
/// transitive models the interior is exactly the box semantics.
pub fn alexandrov_space(m: &KripkeModel) -> Result<FiniteTopSpace, SpaceError> {
    let n = m.world_count();
    if n > MAX_POINTS {
        return Err(SpaceError::TooManyPoints);
    }
    let names = (0..n).map(|w| m.world_name(w).to_owned()).collect();
    let size = 1u64 << n;
    let mut topologies = Vec::new();
    for i in 0..m.agent_count() {
        let succ: Vec<u64> = m.relation(i)
            .iter()
            .map(|row| row.ones().fold(0u64, |acc, w| acc | (1 << w)))
            .collect();
        let opens: Vec<u64> = (0..size)
            .filter(|&u| (0..n).all(|w| u & (1 << w) == 0 || succ[w] & !u == 0))
            .collect();
        topologies.push(opens);
    }
    FiniteTopSpace::from_raw_topologies(names, m.agent_count(), topologies)
}

/// A malformed space file.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct SpaceFileError {
    pub line: usize,
    pub msg: String,
}

fn file_err(line: usize, msg: impl Into<String>) -> SpaceFileError {
    SpaceFileError {
        line,
        msg: msg.into(),
    }
}

/// Parse the textual space format:
///
/// ```text
/// agents 2
/// points a b
/// open 0: a
/// open 1: b
/// ```
///
/// `agents` comes first, then `points`, then any number of `open` lines,
/// each listing one generating open of one agent's topology; the
/// topologies are the generated ones. `#` starts a comment.
pub fn parse_space(text: &str) -> Result<FiniteTopSpace, SpaceFileError> {
    let mut agents: Option<AgentId> = None;
    let mut points: Option<Vec<String>> = None;
    let mut bases: Vec<Vec<u64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap();
        match head {
            "agents" => {
                if agents.is_some() {
                    return Err(file_err(line_no, "duplicate 'agents' line"));
                }
                if points.is_some() {
                    return Err(file_err(line_no, "'agents' must come before 'points'"));
                }
                let rest: Vec<&str> = parts.collect();
                if rest.len() != 1 {
                    return Err(file_err(line_no, "expected 'agents <count>'"));
                }
                let n: AgentId = rest[0]
                    .parse()
                    .map_err(|_| file_err(line_no, format!("bad agent count '{}'", rest[0])))?;
                if n == 0 {
                    return Err(file_err(line_no, "need at least one agent"));
                }
                agents = Some(n);
            }
            "points" => {
                let Some(n) = agents else {
                    return Err(file_err(line_no, "need 'agents' before 'points'"));
                };
                if points.is_some() {
                    return Err(file_err(line_no, "duplicate 'points' line"));
                }
                let names: Vec<String> = parts.map(str::to_owned).collect();
                // Surface name problems on this line by test-building the
                // space; the final build can then only fail here too.
                FiniteTopSpace::new(names.clone(), n, vec![Vec::new(); n as usize])
                    .map_err(|e| file_err(line_no, e.to_string()))?;
                bases = vec![Vec::new(); n as usize];
                points = Some(names);
            }
            "open" => {
                let (Some(n), Some(names)) = (agents, &points) else {
                    return Err(file_err(line_no, "need 'agents' and 'points' before 'open'"));
                };
                let rest = line["open".len()..].trim();
                let Some((agent_part, list_part)) = rest.split_once(':') else {
                    return Err(file_err(line_no, "expected 'open <agent>: <points>'"));
                };
                let agent: AgentId = agent_part
                    .trim()
                    .parse()
                    .map_err(|_| file_err(line_no, format!("bad agent '{}'", agent_part.trim())))?;
                if agent >= n {
                    return Err(file_err(
                        line_no,
                        format!("agent {agent} out of range (agents {n})"),
                    ));
                }
                let mut mask = 0u64;
                let mut any = false;
                for name in list_part.split_whitespace() {
                    let j = names
                        .iter()
                        .position(|p| p == name)
                        .ok_or_else(|| file_err(line_no, format!("unknown point '{name}'")))?;
                    mask |= 1 << j;
                    any = true;
                }
                if !any {
                    return Err(file_err(
                        line_no,
                        "empty open is implicit; list at least one point",
                    ));
                }
                bases[agent as usize].push(mask);
            }
            other => {
                return Err(file_err(line_no, format!("unknown directive '{other}'")));
            }
        }
    }
    let agents = agents.ok_or_else(|| file_err(0, "missing 'agents' line"))?;
    let points = points.ok_or_else(|| file_err(0, "missing 'points' line"))?;
    FiniteTopSpace::new(points, agents, bases).map_err(|e| file_err(0, e.to_string()))
}

/// Render a space in the format of [`parse_space`]: one `open` line per
/// nontrivial open (the empty and full sets are implicit and regenerate on
/// parsing).
pub fn write_space(space: &FiniteTopSpace) -> String {
    let mut out = String::new();
    out.push_str(&format!("agents {}\n", space.agent_count()));
    out.push_str(&format!("points {}\n", space.point_names().join(" ")));
    let full = space.full();
    for i in 0..space.agent_count() {
        for &o in space.topology(i) {
            if o == 0 || o == full {
                continue;
            }
            let names: Vec<&str> = (0..space.point_count())
                .filter(|&j| o & (1 << j) != 0)
                .map(|j| space.point_names()[j].as_str())
                .collect();
            out.push_str(&format!("open {i}: {}\n", names.join(" ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax;
    use crate::testutil::{random_space, random_valid_model};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeSet;

    #[test]
    fn closure_and_interior_frozen_examples() {
        let s2 = fixtures::space_s2();
        assert_eq!(s2.topology(0), &[0b00, 0b01, 0b11]);
        assert_eq!(s2.topology(1), &[0b00, 0b10, 0b11]);
        assert_eq!(s2.interior(0, 0b10), 0);
        assert_eq!(s2.interior(0, 0b11), 0b11);
        assert_eq!(s2.interior(1, 0b10), 0b10);
        assert_eq!(s2.common_topology(), vec![0b00, 0b11]);
        assert_eq!(s2.common_interior(0b01), 0);
        assert_eq!(s2.format_points(0b01), "a");
        assert_eq!(s2.format_points(0), "-");

        let s1 = fixtures::space_s1();
        assert_eq!(s1.topology(0), &[0, 1]);
        assert_eq!(s1.full(), 1);

        // Closing {ab, bc} on three points adds the intersection {b} and
        // the union {abc} alongside the empty set.
        let closed = close_family(&[0b011, 0b110], 0b111);
        assert_eq!(closed, vec![0b000, 0b010, 0b011, 0b110, 0b111]);
    }

    #[test]
    fn topology_counts_match_known_values() {
        // The number of labeled topologies on 2, 3 and 4 points is 4, 29
        // and 355; enumerate every generated family over proper nonempty
        // subsets and count the distinct closures.
        for (n, expected) in [(2usize, 4usize), (3, 29), (4, 355)] {
            let full = (1u64 << n) - 1;
            let proper: Vec<u64> = (1..full).collect();
            let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
            for choice in 0u64..(1 << proper.len()) {
                let basis: Vec<u64> = proper
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| choice & (1 << k) != 0)
                    .map(|(_, &m)| m)
                    .collect();
                seen.insert(close_family(&basis, full));
            }
            assert_eq!(seen.len(), expected, "topologies on {n} points");
        }
    }

    #[test]
    fn kuratowski_roundtrip_recovers_every_small_topology() {
        let n = 3;
        let full = (1u64 << n) - 1;
        let proper: Vec<u64> = (1..full).collect();
        let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
        for choice in 0u64..(1 << proper.len()) {
            let basis: Vec<u64> = proper
                .iter()
                .enumerate()
                .filter(|(k, _)| choice & (1 << k) != 0)
                .map(|(_, &m)| m)
                .collect();
            seen.insert(close_family(&basis, full));
        }
        for topology in seen {
            let table: Vec<u64> = (0..=full).map(|y| interior_of(&topology, y)).collect();
            assert_eq!(kuratowski_roundtrip(n, &table), Ok(topology));
        }
    }

    #[test]
    fn kuratowski_roundtrip_rejects_broken_laws() {
        assert_eq!(
            kuratowski_roundtrip(1, &[1, 1]),
            Err(KuratowskiViolation::NotDeflationary { x: 0 })
        );
        assert_eq!(
            kuratowski_roundtrip(2, &[0, 0, 0, 2]),
            Err(KuratowskiViolation::NotIdempotent { x: 3 })
        );
        // Fixpoints {0, 011, 101, 111} are not meet-closed, and the union
        // of members inside a set is not an interior: it breaks at
        // 011 ∩ 101.
        let f = [0b000u64, 0b011, 0b101, 0b111];
        let table: Vec<u64> = (0..8u64)
            .map(|y| f.iter().filter(|&&o| o & !y == 0).fold(0, |a, &o| a | o))
            .collect();
        assert_eq!(
            kuratowski_roundtrip(3, &table),
            Err(KuratowskiViolation::MeetNotPreserved { x: 0b011, y: 0b101 })
        );
        assert_eq!(
            kuratowski_roundtrip(2, &[0, 0, 0, 0]),
            Err(KuratowskiViolation::FullNotFixed)
        );
        assert_eq!(
            kuratowski_roundtrip(2, &[0, 1]),
            Err(KuratowskiViolation::WrongTableLength)
        );
    }

    #[test]
    fn raw_topologies_are_validated_not_repaired() {
        let names = |n: usize| (0..n).map(|i| format!("p{i}")).collect::<Vec<_>>();
        let s = FiniteTopSpace::from_raw_topologies(names(2), 1, vec![vec![0, 1]]).unwrap();
        assert_eq!(
            s.validate().violations,
            vec![TopologyViolation::MissingFull { agent: 0 }]
        );
        let s = FiniteTopSpace::from_raw_topologies(names(2), 1, vec![vec![1, 3]]).unwrap();
        assert_eq!(
            s.validate().violations,
            vec![TopologyViolation::MissingEmpty { agent: 0 }]
        );
        let s =
            FiniteTopSpace::from_raw_topologies(names(3), 1, vec![vec![0, 1, 2, 7]]).unwrap();
        assert_eq!(
            s.validate().violations,
            vec![TopologyViolation::UnionEscapes { agent: 0, x: 1, y: 2 }]
        );
        let s =
            FiniteTopSpace::from_raw_topologies(names(3), 1, vec![vec![0, 3, 5, 7]]).unwrap();
        assert_eq!(
            s.validate().violations,
            vec![TopologyViolation::IntersectionEscapes { agent: 0, x: 3, y: 5 }]
        );
        // Spaces built through closure always validate.
        let mut rng = StdRng::seed_from_u64(73);
        for _ in 0..100 {
            let agents = rng.gen_range(1..=3);
            let space = random_space(&mut rng, 4, agents);
            assert!(space.validate().is_valid());
        }
    }

    #[test]
    fn shape_errors_are_reported() {
        assert_eq!(
            FiniteTopSpace::new(vec![], 1, vec![vec![]]),
            Err(SpaceError::NoPoints)
        );
        let many = (0..13).map(|i| format!("p{i}")).collect();
        assert_eq!(
            FiniteTopSpace::new(many, 1, vec![vec![]]),
            Err(SpaceError::TooManyPoints)
        );
        assert_eq!(
            FiniteTopSpace::new(vec!["a".into()], 0, vec![]),
            Err(SpaceError::NoAgents)
        );
        assert_eq!(
            FiniteTopSpace::new(vec!["a b".into()], 1, vec![vec![]]),
            Err(SpaceError::BadPointName("a b".into()))
        );
        assert_eq!(
            FiniteTopSpace::new(vec!["a".into(), "a".into()], 1, vec![vec![]]),
            Err(SpaceError::DuplicatePoint("a".into()))
        );
        assert_eq!(
            FiniteTopSpace::new(vec!["a".into()], 2, vec![vec![]]),
            Err(SpaceError::FamilyCount { agents: 2, got: 1 })
        );
        assert_eq!(
            FiniteTopSpace::new(vec!["a".into()], 1, vec![vec![2]]),
            Err(SpaceError::OpenOutOfRange { agent: 0, open: 2 })
        );
    }

    #[test]
    fn powerset_algebras_of_fixture_spaces_are_the_fixture_algebras() {
        // S1's point is named differently from A1's atom, so compare the
        // operator tables; S2 and A2 agree on the nose.
        let p1 = powerset_algebra(&fixtures::space_s1());
        let a1 = fixtures::algebra_a1();
        assert_eq!(p1.atom_count(), a1.atom_count());
        assert_eq!(p1.agent_count(), a1.agent_count());
        for x in a1.elements() {
            assert_eq!(p1.c_op(x), a1.c_op(x));
            for i in 0..a1.agent_count() {
                assert_eq!(p1.box_op(i, x), a1.box_op(i, x));
            }
        }
        assert_eq!(powerset_algebra(&fixtures::space_s2()), fixtures::algebra_a2());
    }

    #[test]
    fn powerset_algebras_always_satisfy_the_laws() {
        let mut rng = StdRng::seed_from_u64(79);
        for _ in 0..150 {
            let agents = rng.gen_range(1..=3);
            let space = random_space(&mut rng, 4, agents);
            let alg = powerset_algebra(&space);
            let report = alg.validate();
            assert!(report.is_valid(), "{:?}", report.violations);
        }
    }

    #[test]
    fn topologies_roundtrip_through_the_powerset_algebra() {
        let mut rng = StdRng::seed_from_u64(83);
        for _ in 0..100 {
            let agents = rng.gen_range(1..=3);
            let space = random_space(&mut rng, 4, agents);
            let alg = powerset_algebra(&space);
            let tops = algebra_to_topologies(&alg).unwrap();
            for i in 0..agents {
                assert_eq!(tops[i as usize], space.topology(i));
            }
        }
    }

    #[test]
    fn topology_recovery_rejects_broken_operators() {
        // Fixpoints of box0 omit the top element.
        let alg = FiniteAlgebra::new(
            vec!["a".into(), "b".into()],
            1,
            vec![vec![0, 1, 2, 0]],
            vec![0, 0, 0, 0],
        )
        .unwrap();
        assert_eq!(
            algebra_to_topologies(&alg),
            Err(ToTopologyError::MissingFull { op: OpName::Box(0) })
        );
        // Fixpoints {0, a, b, top} of three atoms miss the union of a and b.
        let mut t: Vec<Elem> = vec![0; 8];
        for x in [0, 1, 2, 7] {
            t[x as usize] = x;
        }
        let alg = FiniteAlgebra::new(
            vec!["a".into(), "b".into(), "c".into()],
            1,
            vec![t],
            vec![0, 0, 0, 0, 0, 0, 0, 7],
        )
        .unwrap();
        assert_eq!(
            algebra_to_topologies(&alg),
            Err(ToTopologyError::UnionEscapes {
                op: OpName::Box(0),
                x: 1,
                y: 2
            })
        );
        // Box fixpoints {0, 1, 3} form a topology but the table is not its
        // interior at 2.
        let alg = FiniteAlgebra::new(
            vec!["a".into(), "b".into()],
            1,
            vec![vec![0, 1, 1, 3]],
            vec![0, 0, 0, 3],
        )
        .unwrap();
        assert_eq!(
            algebra_to_topologies(&alg),
            Err(ToTopologyError::NotInteriorOperator {
                op: OpName::Box(0),
                elem: 2
            })
        );
        // C misses the top element.
        let alg = FiniteAlgebra::new(
            vec!["a".into()],
            1,
            vec![vec![0, 1]],
            vec![0, 0],
        )
        .unwrap();
        assert_eq!(
            algebra_to_topologies(&alg),
            Err(ToTopologyError::MissingFull { op: OpName::C })
        );
        // Boxes are identities but C fixes only {0, top} of A2's carrier:
        // mismatch against the intersection — here C's own interior law
        // breaks first at 1, so craft the opposite: C the identity while
        // boxes fix less.
        let a2 = fixtures::algebra_a2();
        let alg = FiniteAlgebra::new(
            a2.atom_names().to_vec(),
            2,
            vec![
                (0..4).map(|x| a2.box_op(0, x)).collect(),
                (0..4).map(|x| a2.box_op(1, x)).collect(),
            ],
            vec![0, 1, 2, 3],
        )
        .unwrap();
        assert_eq!(
            algebra_to_topologies(&alg),
            Err(ToTopologyError::CommonFixpointsDiffer { elem: 1 })
        );
    }

    #[test]
    fn ultrafilters_are_principal_at_atoms() {
        let a2 = fixtures::algebra_a2();
        let ufs = ultrafilters(&a2);
        assert_eq!(ufs.len(), 2);
        assert_eq!(ufs[0].principal_atom(), Some(0));
        assert_eq!(ufs[0].member_elems().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(ufs[1].member_elems().collect::<Vec<_>>(), vec![2, 3]);
        for u in &ufs {
            assert!(is_ultrafilter(&a2, u));
        }
        assert_eq!(hat(&a2, 0b01), 0b01);
        assert_eq!(hat(&a2, 0b11), 0b11);
    }

    #[test]
    fn ultrafilter_axioms_reject_other_sets() {
        let a2 = fixtures::algebra_a2();
        // Misses the top element.
        assert!(!is_ultrafilter(&a2, &Ultrafilter::from_raw_members(4, &[1])));
        // Contains 0.
        assert!(!is_ultrafilter(&a2, &Ultrafilter::from_raw_members(4, &[0, 1, 3])));
        // Contains both 1 and its complement 2.
        assert!(!is_ultrafilter(&a2, &Ultrafilter::from_raw_members(4, &[1, 2, 3])));
        // Not total: misses both 1 and 2.
        assert!(!is_ultrafilter(&a2, &Ultrafilter::from_raw_members(4, &[3])));
        // Wrong carrier size.
        assert!(!is_ultrafilter(&a2, &Ultrafilter::from_raw_members(2, &[1])));
    }

    #[test]
    fn canonical_space_of_a2_mirrors_s2() {
        let a2 = fixtures::algebra_a2();
        let can = topo_canonical(&a2);
        assert_eq!(can.point_names(), &["u_a".to_owned(), "u_b".to_owned()]);
        let s2 = fixtures::space_s2();
        for i in 0..2 {
            assert_eq!(can.topology(i), s2.topology(i));
        }
        // And the recovered topologies agree with the canonical ones.
        let tops = algebra_to_topologies(&a2).unwrap();
        assert_eq!(tops[0], can.topology(0));
    }

    #[test]
    fn representation_holds_on_fixtures_and_random_algebras() {
        for alg in [fixtures::algebra_a1(), fixtures::algebra_a2()] {
            let report = verify_representation(&alg);
            assert!(report.is_valid(), "{:?}", report.violations);
            assert!(report.levels_checked > 0);
        }
        let mut rng = StdRng::seed_from_u64(89);
        for _ in 0..60 {
            let agents = rng.gen_range(1..=3);
            let space = random_space(&mut rng, 3, agents);
            let alg = powerset_algebra(&space);
            let report = verify_representation(&alg);
            assert!(report.is_valid(), "{:?}", report.violations);
        }
    }

    #[test]
    fn representation_flags_corrupted_algebras() {
        // Identity boxes with C constantly 0: the canonical interiors are
        // discrete, so C disagrees with the intersection interior.
        let alg = FiniteAlgebra::new(
            vec!["a".into()],
            2,
            vec![vec![0, 1], vec![0, 1]],
            vec![0, 0],
        )
        .unwrap();
        let report = verify_representation(&alg);
        assert!(!report.is_valid());
        assert!(report
            .violations
            .contains(&ReprViolation::CommonMismatch { elem: 1 }));
    }

    #[test]
    fn completion_is_an_isomorphism_for_valid_algebras() {
        for alg in [fixtures::algebra_a1(), fixtures::algebra_a2()] {
            let report = completion_embed(&alg);
            assert!(report.is_valid(), "{:?}", report.violations);
        }
        let mut rng = StdRng::seed_from_u64(97);
        for _ in 0..60 {
            let agents = rng.gen_range(1..=3);
            let space = random_space(&mut rng, 4, agents);
            let report = completion_embed(&powerset_algebra(&space));
            assert!(report.is_valid(), "{:?}", report.violations);
        }
        // A corrupted C is not preserved by the embedding.
        let alg = FiniteAlgebra::new(
            vec!["a".into()],
            2,
            vec![vec![0, 1], vec![0, 1]],
            vec![0, 0],
        )
        .unwrap();
        let report = completion_embed(&alg);
        assert!(report
            .violations
            .contains(&CompletionViolation::CommonNotPreserved { x: 1 }));
    }

    #[test]
    fn alexandrov_space_of_m1_is_frozen() {
        let m1 = fixtures::model_m1();
        let space = alexandrov_space(&m1).unwrap();
        assert_eq!(space.point_names(), &["w0".to_owned(), "w1".to_owned()]);
        // Agent 0 sees w1 from w0, so {w0} is not up-closed.
        assert_eq!(space.topology(0), &[0b00, 0b10, 0b11]);
        // Agent 1 is blind: the discrete topology.
        assert_eq!(space.topology(1), &[0b00, 0b01, 0b10, 0b11]);
        assert!(space.validate().is_valid());
    }

    #[test]
    fn alexandrov_interiors_agree_with_model_evaluation() {
        let mut rng = StdRng::seed_from_u64(101);
        for _ in 0..120 {
            let agents = rng.gen_range(1..=3);
            let worlds = rng.gen_range(1..=5);
            let m = random_valid_model(&mut rng, worlds, agents, 2);
            let space = alexandrov_space(&m).unwrap();
            assert!(space.validate().is_valid());
            let alg = powerset_algebra(&space);
            assert!(alg.validate().is_valid());
            let assignment: std::collections::BTreeMap<u32, Elem> = m
                .valuation()
                .iter()
                .map(|(&v, set)| (v, set.ones().fold(0u64, |acc, w| acc | (1 << w))))
                .collect();
            for _ in 0..20 {
                let f = crate::testutil::random_formula(&mut rng, 3, 2, agents);
                let model_mask = m
                    .eval(&f)
                    .unwrap()
                    .ones()
                    .fold(0u64, |acc, w| acc | (1 << w));
                let alg_val = alg.evaluate(&assignment, &f).unwrap();
                assert_eq!(model_mask, alg_val, "formula {f}");
            }
        }
    }

    #[test]
    fn alexandrov_space_caps_world_count() {
        let names: Vec<String> = (0..13).map(|i| format!("w{i}")).collect();
        let edges: Vec<Vec<(usize, usize)>> = vec![(0..13).map(|w| (w, w)).collect()];
        let m = KripkeModel::new(names, 1, edges, vec![]).unwrap();
        assert_eq!(alexandrov_space(&m), Err(SpaceError::TooManyPoints));
    }

    #[test]
    fn space_files_roundtrip() {
        for text in [fixtures::S1_SPACE, fixtures::S2_SPACE] {
            let space = parse_space(text).unwrap();
            assert_eq!(write_space(&space), text);
            assert_eq!(parse_space(&write_space(&space)).unwrap(), space);
        }
        let mut rng = StdRng::seed_from_u64(103);
        for _ in 0..100 {
            let agents = rng.gen_range(1..=3);
            let space = random_space(&mut rng, 4, agents);
            assert_eq!(parse_space(&write_space(&space)).unwrap(), space);
        }
        // Comments and blank lines are ignored.
        let space = parse_space("# two points\nagents 1\n\npoints a b # names\nopen 0: b\n");
        assert_eq!(space.unwrap().topology(0), &[0b00, 0b10, 0b11]);
    }

    #[test]
    fn space_file_errors_carry_line_numbers() {
        let cases: &[(&str, usize, &str)] = &[
            ("points a\n", 1, "need 'agents' before 'points'"),
            ("agents 2\nagents 2\n", 2, "duplicate 'agents' line"),
            ("agents 0\n", 1, "need at least one agent"),
            ("agents x\n", 1, "bad agent count 'x'"),
            ("agents 2\nopen 0: a\n", 2, "need 'agents' and 'points' before 'open'"),
            ("agents 2\npoints a\npoints b\n", 3, "duplicate 'points' line"),
            ("agents 2\npoints a a\n", 2, "duplicate point name 'a'"),
            ("agents 2\npoints a-b\n", 2, "point name 'a-b' is not alphanumeric"),
            ("agents 2\npoints a\nopen 2: a\n", 3, "agent 2 out of range (agents 2)"),
            ("agents 2\npoints a\nopen 0 a\n", 3, "expected 'open <agent>: <points>'"),
            ("agents 2\npoints a\nopen 0: z\n", 3, "unknown point 'z'"),
            (
                "agents 2\npoints a\nopen 0:\n",
                3,
                "empty open is implicit; list at least one point",
            ),
            ("agents 2\npoints a\nwibble\n", 3, "unknown directive 'wibble'"),
            ("agents 2\n", 0, "missing 'points' line"),
            ("points a\nagents 2\n", 1, "need 'agents' before 'points'"),
            ("", 0, "missing 'agents' line"),
        ];
        for (text, line, msg) in cases {
            let err = parse_space(text).unwrap_err();
            assert_eq!(err.line, *line, "for {text:?}: {err}");
            assert_eq!(err.msg, *msg, "for {text:?}");
        }
        // Too many points is reported on the points line.
        let names = (0..13).map(|i| format!("p{i}")).collect::<Vec<_>>().join(" ");
        let err = parse_space(&format!("agents 1\npoints {names}\n")).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn everyone_interior_matches_e_operator() {
        // Sanity tie between syntax-level E and the meet of interiors.
        let s2 = fixtures::space_s2();
        let alg = powerset_algebra(&s2);
        let f = syntax::everyone(2, syntax::var(0));
        for y in 0..4u64 {
            let assignment = std::collections::BTreeMap::from([(0u32, y)]);
            assert_eq!(
                alg.evaluate(&assignment, &f).unwrap(),
                alg.e_op(y),
                "at {y}"
            );
        }
    }
}
