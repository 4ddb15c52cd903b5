//! Algebraic semantics: finite Boolean algebras with one interior operator
//! per agent and one for common knowledge.
//!
//! Carriers are powersets of a small atom set, so an element is a machine
//! word whose bits pick atoms. Operators are total tables over the carrier.
//! The required laws are, for each interior operator `f`:
//!
//! ```text
//! f 1 = 1      f (x ∧ y) = f x ∧ f y      f (f x) = f x      f x ≤ x
//! ```
//!
//! plus the two mixed laws connecting `C` and `E` (the meet of the agent
//! operators): `C a ≤ E a ∧ E (C a)` and `E a ∧ C (a -> E a) ≤ C a`.
//! [`FiniteAlgebra::gfp_ce`] recomputes common knowledge as the greatest
//! fixpoint of `z -> E a ∧ E z`; on any algebra satisfying the laws it must
//! coincide with the `C` table, which makes it a useful cross-check.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::syntax::{AgentId, Formula};

/// An element: a bitmask over atoms.
pub type Elem = u64;

/// Carriers are kept small enough that operator tables (one entry per
/// element) stay desk-sized; 12 atoms is a 4096-element carrier.
pub const MAX_ATOMS: usize = 12;

/// Structural problems with algebra data. Law violations are reported by
/// [`FiniteAlgebra::validate`] with witnesses instead.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("algebra needs at least one atom")]
    NoAtoms,
    #[error("more than {MAX_ATOMS} atoms (operator tables would not fit)")]
    TooManyAtoms,
    #[error("algebra needs at least one agent")]
    NoAgents,
    #[error("atom name '{0}' is not alphanumeric")]
    BadAtomName(String),
    #[error("duplicate atom name '{0}'")]
    DuplicateAtom(String),
    #[error("expected one table per agent ({agents}), got {got}")]
    TableCount { agents: AgentId, got: usize },
    #[error("operator table has {got} entries, carrier has {size}")]
    TableSize { got: usize, size: usize },
    #[error("table entry {0:#b} is outside the carrier")]
    BadElement(Elem),
}

/// A finite algebra over the powerset of its atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    atoms: Vec<String>,
    agents: AgentId,
    box_ops: Vec<Vec<Elem>>,
    c_op: Vec<Elem>,
}

impl FiniteAlgebra {
    /// Build an algebra from operator tables indexed by element. Only the
    /// shapes are checked here; [`validate`](Self::validate) checks the laws.
    pub fn new(
        atoms: Vec<String>,
        agents: AgentId,
        box_ops: Vec<Vec<Elem>>,
        c_op: Vec<Elem>,
    ) -> Result<Self, AlgebraError> {
        if atoms.is_empty() {
            return Err(AlgebraError::NoAtoms);
        }
        if atoms.len() > MAX_ATOMS {
            return Err(AlgebraError::TooManyAtoms);
        }
        for (i, name) in atoms.iter().enumerate() {
            if name.is_empty() || !name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
                return Err(AlgebraError::BadAtomName(name.clone()));
            }
            if atoms[..i].contains(name) {
                return Err(AlgebraError::DuplicateAtom(name.clone()));
            }
        }
        if agents == 0 {
            return Err(AlgebraError::NoAgents);
        }
        if box_ops.len() != agents as usize {
            return Err(AlgebraError::TableCount {
                agents,
                got: box_ops.len(),
            });
        }
        let size = 1usize << atoms.len();
        let top = (size - 1) as Elem;
        for table in box_ops.iter().chain(std::iter::once(&c_op)) {
            if table.len() != size {
                return Err(AlgebraError::TableSize {
                    got: table.len(),
                    size,
                });
            }
            if let Some(&e) = table.iter().find(|&&e| e > top) {
                return Err(AlgebraError::BadElement(e));
            }
        }
        Ok(FiniteAlgebra {
            atoms,
            agents,
            box_ops,
            c_op,
        })
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atoms
    }

    pub fn agent_count(&self) -> AgentId {
        self.agents
    }

    /// Number of elements in the carrier.
    pub fn size(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn top(&self) -> Elem {
        (self.size() - 1) as Elem
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.size() as Elem
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        a & !b == 0
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        a & b
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        a | b
    }

    pub fn compl(&self, a: Elem) -> Elem {
        !a & self.top()
    }

    /// Boolean implication `a -> b`.
    pub fn imp_elem(&self, a: Elem, b: Elem) -> Elem {
        self.compl(a) | b
    }

    pub fn box_op(&self, agent: AgentId, a: Elem) -> Elem {
        self.box_ops[agent as usize][a as usize]
    }

    pub fn c_op(&self, a: Elem) -> Elem {
        self.c_op[a as usize]
    }

    /// `E a`: the meet of `box_i a` over all agents.
    pub fn e_op(&self, a: Elem) -> Elem {
        let mut r = self.top();
        for i in 0..self.agents {
            r &= self.box_op(i, a);
        }
        r
    }

    /// Check all the laws and report every violation with a witness.
    pub fn validate(&self) -> AlgebraReport {
        let mut violations = Vec::new();
        let ops: Vec<(OpName, &Vec<Elem>)> = (0..self.agents)
            .map(|i| (OpName::Box(i), &self.box_ops[i as usize]))
            .chain(std::iter::once((OpName::C, &self.c_op)))
            .collect();
        for (name, table) in &ops {
            let t = |x: Elem| table[x as usize];
            if t(self.top()) != self.top() {
                violations.push(AlgebraViolation::OpTop { op: *name });
            }
            for x in self.elements() {
                if t(t(x)) != t(x) {
                    violations.push(AlgebraViolation::OpIdem { op: *name, x });
                }
                if !self.leq(t(x), x) {
                    violations.push(AlgebraViolation::OpDeflate { op: *name, x });
                }
                for y in self.elements() {
                    if y > x {
                        break;
                    }
                    if t(x & y) != t(x) & t(y) {
                        violations.push(AlgebraViolation::OpMeet { op: *name, x, y });
                    }
                }
            }
        }
        for a in self.elements() {
            let ca = self.c_op(a);
            if !self.leq(ca, self.e_op(a) & self.e_op(ca)) {
                violations.push(AlgebraViolation::CUnfold { a });
            }
            let ind = self.e_op(a) & self.c_op(self.imp_elem(a, self.e_op(a)));
            if !self.leq(ind, ca) {
                violations.push(AlgebraViolation::CInduct { a });
            }
        }
        AlgebraReport { violations }
    }

    /// Common knowledge recomputed as the greatest fixpoint of
    /// `z -> E a ∧ E z`, starting from 1 and descending.
    pub fn gfp_ce(&self, a: Elem) -> Elem {
        let ea = self.e_op(a);
        let mut z = self.top();
        for _ in 0..=self.size() {
            let next = ea & self.e_op(z);
            if next == z {
                return z;
            }
            z = next;
        }
        unreachable!("descending iteration exceeded carrier height");
    }

    /// Value of a formula under an assignment of elements to variables.
    pub fn evaluate(
        &self,
        assignment: &BTreeMap<u32, Elem>,
        f: &Formula,
    ) -> Result<Elem, EvalError> {
        match f {
            Formula::Var(v) => {
                let e = *assignment
                    .get(v)
                    .ok_or(EvalError::UnassignedVar(*v))?;
                if e > self.top() {
                    return Err(EvalError::BadElement(e));
                }
                Ok(e)
            }
            Formula::Bot => Ok(0),
            Formula::Imp(a, b) => {
                let a = self.evaluate(assignment, a)?;
                let b = self.evaluate(assignment, b)?;
                Ok(self.imp_elem(a, b))
            }
            Formula::Box(i, a) => {
                if *i >= self.agents {
                    return Err(EvalError::AgentOutOfRange {
                        agent: *i,
                        agents: self.agents,
                    });
                }
                let a = self.evaluate(assignment, a)?;
                Ok(self.box_op(*i, a))
            }
            Formula::C(a) => {
                let a = self.evaluate(assignment, a)?;
                Ok(self.c_op(a))
            }
        }
    }

    /// The filter generated by a finite set of elements: everything above
    /// their meet.
    pub fn filter_generated(&self, generators: &[Elem]) -> Result<Filter, EvalError> {
        let mut min = self.top();
        for &g in generators {
            if g > self.top() {
                return Err(EvalError::BadElement(g));
            }
            min &= g;
        }
        let mut members = FixedBitSet::with_capacity(self.size());
        for e in self.elements() {
            if self.leq(min, e) {
                members.insert(e as usize);
            }
        }
        Ok(Filter {
            generators: generators.to_vec(),
            min,
            members,
        })
    }

    /// Pretty-print an element as its atom list, `-` for 0.
    pub fn format_elem(&self, e: Elem) -> String {
        if e == 0 {
            return "-".to_string();
        }
        let mut parts = Vec::new();
        for (i, name) in self.atoms.iter().enumerate() {
            if e & (1 << i) != 0 {
                parts.push(name.as_str());
            }
        }
        parts.join(",")
    }

    /// Parse an element written as a comma-joined atom list, `-` for 0.
    pub fn parse_elem(&self, s: &str) -> Result<Elem, String> {
        if s == "-" {
            return Ok(0);
        }
        let mut e = 0;
        for part in s.split(',') {
            let i = self
                .atoms
                .iter()
                .position(|a| a == part)
                .ok_or_else(|| format!("unknown atom '{part}'"))?;
            if e & (1 << i) != 0 {
                return Err(format!("atom '{part}' repeated"));
            }
            e |= 1 << i;
        }
        Ok(e)
    }
}

/// Which operator a violation is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpName {
    Box(AgentId),
    C,
}

impl std::fmt::Display for OpName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OpName::Box(i) => write!(f, "box{i}"),
            OpName::C => write!(f, "C"),
        }
    }
}

/// One law violation, with witness elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraViolation {
    /// `op 1 != 1`.
    OpTop { op: OpName },
    /// `op (x ∧ y) != op x ∧ op y`.
    OpMeet { op: OpName, x: Elem, y: Elem },
    /// `op (op x) != op x`.
    OpIdem { op: OpName, x: Elem },
    /// `op x` not below `x`.
    OpDeflate { op: OpName, x: Elem },
    /// `C a` not below `E a ∧ E (C a)`.
    CUnfold { a: Elem },
    /// `E a ∧ C (a -> E a)` not below `C a`.
    CInduct { a: Elem },
}

impl AlgebraViolation {
    pub fn describe(&self, alg: &FiniteAlgebra) -> String {
        let p = |e: Elem| alg.format_elem(e);
        match self {
            AlgebraViolation::OpTop { op } => format!("{op} does not fix the top element"),
            AlgebraViolation::OpMeet { op, x, y } => {
                format!("{op} does not distribute over the meet of {} and {}", p(*x), p(*y))
            }
            AlgebraViolation::OpIdem { op, x } => {
                format!("{op} is not idempotent at {}", p(*x))
            }
            AlgebraViolation::OpDeflate { op, x } => {
                format!("{op} does not deflate at {}", p(*x))
            }
            AlgebraViolation::CUnfold { a } => {
                format!("C {} is not below E {} ∧ E C {}", p(*a), p(*a), p(*a))
            }
            AlgebraViolation::CInduct { a } => {
                format!("E {} ∧ C ({} -> E {}) is not below C {}", p(*a), p(*a), p(*a), p(*a))
            }
        }
    }
}

/// Everything [`FiniteAlgebra::validate`] found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraReport {
    pub violations: Vec<AlgebraViolation>,
}

impl AlgebraReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluation failure.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("variable p{0} has no assigned value")]
    UnassignedVar(u32),
    #[error("formula mentions agent {agent} but the algebra has {agents} agents")]
    AgentOutOfRange { agent: AgentId, agents: AgentId },
    #[error("element {0:#b} is outside the carrier")]
    BadElement(Elem),
}

/// A filter given by generators; on a finite algebra it is principal, with
/// `min` the meet of the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    pub generators: Vec<Elem>,
    pub min: Elem,
    members: FixedBitSet,
}

impl Filter {
    pub fn contains(&self, e: Elem) -> bool {
        self.members.contains(e as usize)
    }

    pub fn members(&self) -> impl Iterator<Item = Elem> + '_ {
        self.members.ones().map(|i| i as Elem)
    }

    /// A filter is proper when it excludes 0.
    pub fn is_proper(&self) -> bool {
        !self.contains(0)
    }
}

/// Why one (algebra, assignment) pair is a counterexample to a consequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsequenceFailure {
    /// Value of the conclusion.
    pub value: Elem,
    /// Meet of the values of the local premises.
    pub filter_min: Elem,
}

/// Outcome of checking one consequence instance on one algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsequenceOutcome {
    pub holds: bool,
    pub failure: Option<ConsequenceFailure>,
}

/// Check `sigma; gamma |= f` on a single algebra and assignment: if every
/// formula of `sigma` takes value 1, the value of `f` must lie in the
/// filter generated by the values of `gamma`. If some `sigma` value is not
/// 1 the instance holds vacuously.
pub fn algebraic_consequence(
    alg: &FiniteAlgebra,
    assignment: &BTreeMap<u32, Elem>,
    sigma: &[Formula],
    gamma: &[Formula],
    f: &Formula,
) -> Result<ConsequenceOutcome, EvalError> {
    for s in sigma {
        if alg.evaluate(assignment, s)? != alg.top() {
            return Ok(ConsequenceOutcome {
                holds: true,
                failure: None,
            });
        }
    }
    let mut gamma_vals = Vec::with_capacity(gamma.len());
    for g in gamma {
        gamma_vals.push(alg.evaluate(assignment, g)?);
    }
    let filter = alg.filter_generated(&gamma_vals)?;
    let value = alg.evaluate(assignment, f)?;
    if filter.contains(value) {
        Ok(ConsequenceOutcome {
            holds: true,
            failure: None,
        })
    } else {
        Ok(ConsequenceOutcome {
            holds: false,
            failure: Some(ConsequenceFailure {
                value,
                filter_min: filter.min,
            }),
        })
    }
}

/// Outcome of the order-theoretic standardness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardSigmaOutcome {
    pub standard: bool,
    /// `(d, b)` with `b ≤ E d ∧ E b` but `b` not below `C d`.
    pub witness: Option<(Elem, Elem)>,
}

/// Standardness via self-sustaining elements: on a finite algebra the
/// descending-chain condition reduces to "every `b` with `b ≤ E d ∧ E b`
/// lies below `C d`" (join the members of any offending chain and it
/// becomes such a `b`; conversely such a `b` heads the constant chain
/// `b, b, ...`). Independent from the graph-theoretic route, which makes
/// the two mutually checking.
pub fn check_standard_sigma(alg: &FiniteAlgebra) -> StandardSigmaOutcome {
    for d in alg.elements() {
        let ed = alg.e_op(d);
        let cd = alg.c_op(d);
        for b in alg.elements() {
            if alg.leq(b, ed & alg.e_op(b)) && !alg.leq(b, cd) {
                return StandardSigmaOutcome {
                    standard: false,
                    witness: Some((d, b)),
                };
            }
        }
    }
    StandardSigmaOutcome {
        standard: true,
        witness: None,
    }
}

// ---------------------------------------------------------------------------
// Algebra files
// ---------------------------------------------------------------------------

/// Failure while reading an algebra file; `line` is 1-based.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct AlgebraFileError {
    pub line: usize,
    pub msg: String,
}

fn file_err(line: usize, msg: impl Into<String>) -> AlgebraFileError {
    AlgebraFileError {
        line,
        msg: msg.into(),
    }
}

/// Parse the line-based algebra format:
///
/// ```text
/// agents 2
/// atoms a b
/// box0 opens: - a a,b
/// box1 table: - -> -; a -> -; b -> b; a,b -> a,b
/// C opens: - a,b
/// ```
///
/// Elements are comma-joined atom lists, `-` for 0. A `table` line must
/// mention every element exactly once. An `opens` line lists the intended
/// open elements and expands to the operator `x -> join of opens below x`;
/// both forms go through the same law validation afterwards, so an `opens`
/// family that is not closed under meets shows up there.
pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra, AlgebraFileError> {
    let mut agents: Option<AgentId> = None;
    let mut atoms: Option<Vec<String>> = None;
    let mut box_ops: Vec<Option<Vec<Elem>>> = Vec::new();
    let mut c_op: Option<Vec<Elem>> = None;

    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("agents ") {
            if agents.is_some() {
                return Err(file_err(ln, "duplicate 'agents' line"));
            }
            let n: u32 = rest
                .trim()
                .parse()
                .map_err(|_| file_err(ln, "bad agent count"))?;
            if n == 0 || n > u8::MAX as u32 {
                return Err(file_err(ln, "agent count out of range"));
            }
            agents = Some(n as AgentId);
            box_ops = vec![None; n as usize];
        } else if let Some(rest) = line.strip_prefix("atoms ") {
            if agents.is_none() {
                return Err(file_err(ln, "'atoms' before 'agents'"));
            }
            if atoms.is_some() {
                return Err(file_err(ln, "duplicate 'atoms' line"));
            }
            let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if names.is_empty() {
                return Err(file_err(ln, "no atoms listed"));
            }
            if names.len() > MAX_ATOMS {
                return Err(file_err(ln, format!("more than {MAX_ATOMS} atoms")));
            }
            atoms = Some(names);
        } else {
            let atoms = atoms
                .as_ref()
                .ok_or_else(|| file_err(ln, "operator line before 'atoms'"))?;
            let agents = agents.unwrap();
            // Temporary atom-only algebra for element parsing.
            let scratch = element_reader(atoms);
            let (head, body) = line
                .split_once(':')
                .ok_or_else(|| file_err(ln, "expected 'op table:' or 'op opens:'"))?;
            let head = head.trim();
            let (op, kind) = head
                .rsplit_once(' ')
                .ok_or_else(|| file_err(ln, format!("bad operator line '{head}'")))?;
            let table = match kind {
                "table" => parse_table(&scratch, body, ln)?,
                "opens" => parse_opens(&scratch, body, ln)?,
                other => return Err(file_err(ln, format!("unknown form '{other}'"))),
            };
            if op == "C" {
                if c_op.is_some() {
                    return Err(file_err(ln, "duplicate 'C' line"));
                }
                c_op = Some(table);
            } else if let Some(digits) = op.strip_prefix("box") {
                let i: u32 = digits
                    .parse()
                    .map_err(|_| file_err(ln, format!("bad operator '{op}'")))?;
                if i >= agents as u32 {
                    return Err(file_err(ln, format!("agent {i} out of range")));
                }
                let slot = &mut box_ops[i as usize];
                if slot.is_some() {
                    return Err(file_err(ln, format!("duplicate 'box{i}' line")));
                }
                *slot = Some(table);
            } else {
                return Err(file_err(ln, format!("unknown operator '{op}'")));
            }
        }
    }

    let agents = agents.ok_or_else(|| file_err(0, "missing 'agents' line"))?;
    let atoms = atoms.ok_or_else(|| file_err(0, "missing 'atoms' line"))?;
    let mut tables = Vec::with_capacity(agents as usize);
    for (i, t) in box_ops.into_iter().enumerate() {
        tables.push(t.ok_or_else(|| file_err(0, format!("missing 'box{i}' line")))?);
    }
    let c_op = c_op.ok_or_else(|| file_err(0, "missing 'C' line"))?;
    FiniteAlgebra::new(atoms, agents, tables, c_op).map_err(|e| file_err(0, e.to_string()))
}

/// Minimal atom-list reader used while the real algebra is still being
/// assembled.
struct ElementReader {
    atoms: Vec<String>,
}

fn element_reader(atoms: &[String]) -> ElementReader {
    ElementReader {
        atoms: atoms.to_vec(),
    }
}

impl ElementReader {
    fn size(&self) -> usize {
        1 << self.atoms.len()
    }

    fn parse(&self, s: &str) -> Result<Elem, String> {
        if s == "-" {
            return Ok(0);
        }
        let mut e = 0;
        for part in s.split(',') {
            let i = self
                .atoms
                .iter()
                .position(|a| a == part)
                .ok_or_else(|| format!("unknown atom '{part}'"))?;
            if e & (1 << i) != 0 {
                return Err(format!("atom '{part}' repeated"));
            }
            e |= 1 << i;
        }
        Ok(e)
    }
}

fn parse_table(rd: &ElementReader, body: &str, ln: usize) -> Result<Vec<Elem>, AlgebraFileError> {
    let mut table: Vec<Option<Elem>> = vec![None; rd.size()];
    for entry in body.split(';') {
        let entry = entry.trim();
        if entry.is_empty() {
            continue;
        }
        let (from, to) = entry
            .split_once("->")
            .ok_or_else(|| file_err(ln, format!("bad table entry '{entry}'")))?;
        let from = rd
            .parse(from.trim())
            .map_err(|m| file_err(ln, m))?;
        let to = rd.parse(to.trim()).map_err(|m| file_err(ln, m))?;
        let slot = &mut table[from as usize];
        if slot.is_some() {
            return Err(file_err(ln, format!("element mapped twice in '{entry}'")));
        }
        *slot = Some(to);
    }
    table
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or_else(|| file_err(ln, format!("element {i:#b} not mapped"))))
        .collect()
}

fn parse_opens(rd: &ElementReader, body: &str, ln: usize) -> Result<Vec<Elem>, AlgebraFileError> {
    let mut opens = Vec::new();
    for tok in body.split_whitespace() {
        opens.push(rd.parse(tok).map_err(|m| file_err(ln, m))?);
    }
    let mut table = Vec::with_capacity(rd.size());
    for x in 0..rd.size() as Elem {
        let mut v = 0;
        for &o in &opens {
            if o & !x == 0 {
                v |= o;
            }
        }
        table.push(v);
    }
    Ok(table)
}

/// Print an algebra in `opens` form: each operator is written as its list
/// of fixed elements, ascending. For algebras that satisfy the laws this
/// reproduces the operator exactly.
pub fn write_algebra(alg: &FiniteAlgebra) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "agents {}", alg.agent_count()).unwrap();
    writeln!(out, "atoms {}", alg.atom_names().join(" ")).unwrap();
    let mut dump = |name: String, table: &dyn Fn(Elem) -> Elem| {
        write!(out, "{name} opens:").unwrap();
        for e in alg.elements() {
            if table(e) == e {
                write!(out, " {}", alg.format_elem(e)).unwrap();
            }
        }
        out.push('\n');
    };
    for i in 0..alg.agent_count() {
        dump(format!("box{i}"), &|e| alg.box_op(i, e));
    }
    dump("C".to_string(), &|e| alg.c_op(e));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syntax::{and, common, everyone, imp, knows, parse, var};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn a1() -> FiniteAlgebra {
        fixtures::algebra_a1()
    }

    fn a2() -> FiniteAlgebra {
        fixtures::algebra_a2()
    }

    #[test]
    fn fixture_algebras_are_valid() {
        assert!(a1().validate().is_valid());
        assert!(a2().validate().is_valid());
    }

    #[test]
    fn a2_operator_tables() {
        let alg = a2();
        let (o, a, b, ab) = (0, 1, 2, 3);
        assert_eq!((0..4).map(|x| alg.box_op(0, x)).collect::<Vec<_>>(), vec![o, a, o, ab]);
        assert_eq!((0..4).map(|x| alg.box_op(1, x)).collect::<Vec<_>>(), vec![o, o, b, ab]);
        assert_eq!((0..4).map(|x| alg.c_op(x)).collect::<Vec<_>>(), vec![o, o, o, ab]);
        assert_eq!((0..4).map(|x| alg.e_op(x)).collect::<Vec<_>>(), vec![o, o, o, ab]);
    }

    #[test]
    fn validation_catches_broken_laws() {
        // Corrupt A2's C table so C does not fix the top element.
        let alg = a2();
        let mut c = (0..4).map(|x| alg.c_op(x)).collect::<Vec<_>>();
        c[3] = 1;
        let bad = FiniteAlgebra::new(
            alg.atom_names().to_vec(),
            2,
            vec![
                (0..4).map(|x| alg.box_op(0, x)).collect(),
                (0..4).map(|x| alg.box_op(1, x)).collect(),
            ],
            c,
        )
        .unwrap();
        let report = bad.validate();
        assert!(!report.is_valid());
        assert!(report.violations.contains(&AlgebraViolation::OpTop { op: OpName::C }));

        // An operator that inflates: box0 0 = a.
        let mut b0: Vec<Elem> = (0..4).map(|x| alg.box_op(0, x)).collect();
        b0[0] = 1;
        let bad = FiniteAlgebra::new(
            alg.atom_names().to_vec(),
            2,
            vec![b0, (0..4).map(|x| alg.box_op(1, x)).collect()],
            (0..4).map(|x| alg.c_op(x)).collect(),
        )
        .unwrap();
        assert!(bad
            .validate()
            .violations
            .iter()
            .any(|v| matches!(v, AlgebraViolation::OpDeflate { op: OpName::Box(0), x: 0 })));

        // C := identity on A2 breaks the unfolding law (C a should sit
        // below E a, but a is not open for both agents).
        let bad = FiniteAlgebra::new(
            alg.atom_names().to_vec(),
            2,
            vec![
                (0..4).map(|x| alg.box_op(0, x)).collect(),
                (0..4).map(|x| alg.box_op(1, x)).collect(),
            ],
            (0..4).collect(),
        )
        .unwrap();
        let report = bad.validate();
        assert!(report.violations.contains(&AlgebraViolation::CUnfold { a: 1 }));
    }

    #[test]
    fn validation_catches_broken_induction() {
        // One agent, two atoms, box0 = identity, C = interior of
        // {0, a, ab}. E a = a and C (a -> E a) = C 1 = 1, so the induction
        // law demands a <= C a = a... take instead C with opens {0, ab}:
        // E a ∧ C(a -> E a) = a ∧ C(1) = a, but C a = 0.
        let table_id: Vec<Elem> = (0..4).collect();
        let c: Vec<Elem> = vec![0, 0, 0, 3];
        let alg = FiniteAlgebra::new(
            vec!["a".into(), "b".into()],
            1,
            vec![table_id],
            c,
        )
        .unwrap();
        let report = alg.validate();
        assert!(report.violations.contains(&AlgebraViolation::CInduct { a: 1 }));
    }

    #[test]
    fn gfp_matches_c_on_fixtures() {
        for alg in [a1(), a2()] {
            for a in alg.elements() {
                assert_eq!(alg.gfp_ce(a), alg.c_op(a), "at {}", alg.format_elem(a));
            }
        }
    }

    /// Close a family of subsets under union and intersection, with 0 and
    /// top added: the smallest topology containing the family. Test-local
    /// oracle used to manufacture valid algebras independently of the
    /// space-to-algebra pipeline.
    fn close_topology(basis: &[Elem], top: Elem) -> Vec<Elem> {
        let mut opens: Vec<Elem> = vec![0, top];
        for &b in basis {
            if !opens.contains(&b) {
                opens.push(b);
            }
        }
        loop {
            let mut grew = false;
            let snapshot = opens.clone();
            for &x in &snapshot {
                for &y in &snapshot {
                    for z in [x | y, x & y] {
                        if !opens.contains(&z) {
                            opens.push(z);
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                opens.sort_unstable();
                return opens;
            }
        }
    }

    fn interior_table(opens: &[Elem], size: usize) -> Vec<Elem> {
        (0..size as Elem)
            .map(|x| opens.iter().filter(|&&o| o & !x == 0).fold(0, |acc, &o| acc | o))
            .collect()
    }

    fn random_valid_algebra(rng: &mut StdRng, max_atoms: usize, agents: AgentId) -> FiniteAlgebra {
        let atoms = rng.gen_range(1..=max_atoms);
        let size = 1usize << atoms;
        let top = (size - 1) as Elem;
        let names = (0..atoms).map(|i| format!("x{i}")).collect();
        let mut box_ops = Vec::new();
        let mut all_opens: Vec<Vec<Elem>> = Vec::new();
        for _ in 0..agents {
            let basis: Vec<Elem> = (0..rng.gen_range(0..=3))
                .map(|_| rng.gen_range(0..size as Elem))
                .collect();
            let opens = close_topology(&basis, top);
            box_ops.push(interior_table(&opens, size));
            all_opens.push(opens);
        }
        // C is the interior for the intersection of the agent topologies.
        let mut common_opens: Vec<Elem> = all_opens[0].clone();
        for opens in &all_opens[1..] {
            common_opens.retain(|e| opens.contains(e));
        }
        let c_op = interior_table(&common_opens, size);
        FiniteAlgebra::new(names, agents, box_ops, c_op).unwrap()
    }

    #[test]
    fn random_valid_algebras_pass_validation_and_gfp() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..200 {
            let agents = rng.gen_range(1..=3);
            let alg = random_valid_algebra(&mut rng, 4, agents);
            let report = alg.validate();
            assert!(
                report.is_valid(),
                "random algebra invalid: {:?}",
                report.violations
            );
            for a in alg.elements() {
                assert_eq!(alg.gfp_ce(a), alg.c_op(a));
            }
            let sigma = check_standard_sigma(&alg);
            assert!(sigma.standard, "witness {:?}", sigma.witness);
        }
    }

    #[test]
    fn evaluate_on_a2() {
        let alg = a2();
        let assignment: BTreeMap<u32, Elem> = [(0u32, 1u64)].into_iter().collect();
        // E p0 ∧ C (p0 -> E p0) -> C p0 evaluates to 1 at v(p0) = a.
        let f = imp(
            and(
                everyone(2, var(0)),
                common(imp(var(0), everyone(2, var(0)))),
            ),
            common(var(0)),
        );
        assert_eq!(alg.evaluate(&assignment, &f), Ok(3));
        assert_eq!(alg.evaluate(&assignment, &everyone(2, var(0))), Ok(0));
        assert_eq!(alg.evaluate(&assignment, &common(var(0))), Ok(0));
        assert_eq!(alg.evaluate(&assignment, &knows(0, var(0))), Ok(1));
        assert_eq!(
            alg.evaluate(&assignment, &var(1)),
            Err(EvalError::UnassignedVar(1))
        );
        assert_eq!(
            alg.evaluate(&assignment, &knows(2, var(0))),
            Err(EvalError::AgentOutOfRange { agent: 2, agents: 2 })
        );
    }

    #[test]
    fn filters_are_principal_upsets() {
        let alg = a2();
        let f = alg.filter_generated(&[1]).unwrap();
        assert_eq!(f.min, 1);
        assert_eq!(f.members().collect::<Vec<_>>(), vec![1, 3]);
        assert!(f.is_proper());
        let f = alg.filter_generated(&[]).unwrap();
        assert_eq!(f.min, 3);
        assert_eq!(f.members().collect::<Vec<_>>(), vec![3]);
        let f = alg.filter_generated(&[1, 2]).unwrap();
        assert_eq!(f.min, 0);
        assert!(!f.is_proper());
        assert_eq!(f.members().count(), 4);
    }

    #[test]
    fn consequence_check_reports_witnesses() {
        let alg = a2();
        let assignment: BTreeMap<u32, Elem> = [(0u32, 1u64)].into_iter().collect();
        // p0 |- box0 p0 holds at this assignment: box0 a = a >= a.
        let out = algebraic_consequence(&alg, &assignment, &[], &[var(0)], &knows(0, var(0)))
            .unwrap();
        assert!(out.holds);
        // p0 |- C p0 fails: C a = 0 is not above a.
        let out = algebraic_consequence(&alg, &assignment, &[], &[var(0)], &common(var(0)))
            .unwrap();
        assert!(!out.holds);
        assert_eq!(
            out.failure,
            Some(ConsequenceFailure {
                value: 0,
                filter_min: 1
            })
        );
        // Global premise not at 1 makes the instance vacuous.
        let out = algebraic_consequence(
            &alg,
            &assignment,
            &[var(0)],
            &[],
            &common(var(0)),
        )
        .unwrap();
        assert!(out.holds);
    }

    #[test]
    fn sigma_standardness_witnesses_on_corrupted_algebra() {
        // box ops identity on one atom, C send everything to 0 (including
        // top, so the algebra is invalid; the checker still pinpoints the
        // self-sustaining element).
        let alg = FiniteAlgebra::new(
            vec!["a".into()],
            2,
            vec![vec![0, 1], vec![0, 1]],
            vec![0, 0],
        )
        .unwrap();
        let out = check_standard_sigma(&alg);
        assert!(!out.standard);
        // d scans 0 first; b = 1 satisfies 1 <= E 0... no: E 0 = 0. The
        // first witness is d = 0, b = 0? 0 <= anything and 0 <= C 0 = 0
        // holds, so not a witness. First hit: d = 0, b = 1 fails
        // 1 <= E 0 ∧ E 1 = 0 ∧ 1; not a witness either. d = 1, b = 1:
        // 1 <= E 1 ∧ E 1 = 1 and 1 <= C 1 = 0 fails, so witness (1, 1).
        assert_eq!(out.witness, Some((1, 1)));
    }

    #[test]
    fn algebra_file_round_trip() {
        for alg in [a1(), a2()] {
            let text = write_algebra(&alg);
            assert_eq!(parse_algebra(&text).unwrap(), alg);
        }
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..100 {
            let agents = rng.gen_range(1..=3);
            let alg = random_valid_algebra(&mut rng, 4, agents);
            assert_eq!(parse_algebra(&write_algebra(&alg)).unwrap(), alg);
        }
    }

    #[test]
    fn algebra_file_table_and_opens_agree() {
        let by_opens = "agents 2\natoms a b\nbox0 opens: - a a,b\nbox1 opens: - b a,b\nC opens: - a,b\n";
        let by_table = "agents 2\natoms a b\n\
                        box0 table: - -> -; a -> a; b -> -; a,b -> a,b\n\
                        box1 table: - -> -; a -> -; b -> b; a,b -> a,b\n\
                        C table: - -> -; a -> -; b -> -; a,b -> a,b\n";
        let x = parse_algebra(by_opens).unwrap();
        let y = parse_algebra(by_table).unwrap();
        assert_eq!(x, y);
        assert_eq!(x, a2());
    }

    #[test]
    fn algebra_file_errors_carry_line_numbers() {
        let cases = [
            ("agents 2\natoms a\nbox0 opens: - a\nbox0 opens: -\nC opens: - a\n", 4),
            ("agents 1\natoms a\nbox0 table: - -> -\nC opens: - a\n", 3),
            ("agents 1\natoms a\nbox0 table: - -> -; a -> a; a -> -\nC opens: - a\n", 3),
            ("agents 1\natoms a\nbox0 opens: - q\nC opens: - a\n", 3),
            ("agents 1\natoms a\nbox2 opens: - a\n", 3),
            ("atoms a\nagents 1\n", 1),
        ];
        for (text, line) in cases {
            match parse_algebra(text) {
                Err(e) => assert_eq!(e.line, line, "input {text:?}: {e}"),
                Ok(_) => panic!("expected failure for {text:?}"),
            }
        }
        assert!(parse_algebra("agents 1\natoms a\nbox0 opens: - a\n").is_err());
    }

    #[test]
    fn opens_form_that_is_not_meet_closed_fails_validation() {
        // {0, a, b, top} on three atoms is not meet-closed as written
        // here: a,b and b,c meet at b which is missing.
        let text = "agents 1\natoms a b c\nbox0 opens: - a,b b,c a,b,c\nC opens: - a,b,c\n";
        let alg = parse_algebra(text).unwrap();
        let report = alg.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, AlgebraViolation::OpMeet { op: OpName::Box(0), .. })));
    }

    #[test]
    fn grammar_formulas_evaluate_against_fixture() {
        let alg = a2();
        let f = parse("C p0 -> box1 p0", 2).unwrap();
        let assignment: BTreeMap<u32, Elem> = [(0u32, 2u64)].into_iter().collect();
        // C b = 0, so the implication is 1.
        assert_eq!(alg.evaluate(&assignment, &f), Ok(3));
    }
}
