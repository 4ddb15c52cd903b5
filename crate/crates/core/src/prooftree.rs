//! Checkable certificates for the Hilbert calculus with the infinitary
//! common-knowledge rule.
//!
//! A certificate is a tree: axiom instances at the leaves (tautologies
//! plus the six modal schemas), global assumptions, modus ponens,
//! necessitation `φ / C φ`, and the ω-rule. The ω-rule's infinitely many
//! premises `φ_j → E ψ ∧ E φ_{j+1}` are certified by a finite list that
//! is eventually periodic: after the last premise the family loops back
//! to `loop_index`, so [`unfold_depth`] maps every depth `j` onto a
//! listed premise. The checker verifies each listed premise against the
//! family it induces, which covers all depths.
//!
//! Certificates serialise as s-expressions; formulas appear as plain
//! formula syntax in the trailing positions of each node.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::algebra::{self, Elem, FiniteAlgebra};
use crate::syntax::{self, AgentId, Formula, ParseError};

/// The axiom schemas, named by what they govern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// Propositional tautologies (checked by truth table over the maximal
    /// non-propositional subformulas).
    Taut,
    /// `box_i (φ → ψ) → (box_i φ → box_i ψ)`.
    KBox,
    /// `box_i φ → box_i box_i φ`.
    Four,
    /// `box_i φ → φ`.
    TBox,
    /// `C (φ → ψ) → (C φ → C ψ)`.
    KC,
    /// `C φ → E φ ∧ E C φ`.
    FixC,
    /// `E φ ∧ C (φ → E φ) → C φ`.
    IndC,
}

impl Schema {
    pub const ALL: [Schema; 7] = [
        Schema::Taut,
        Schema::KBox,
        Schema::Four,
        Schema::TBox,
        Schema::KC,
        Schema::FixC,
        Schema::IndC,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Schema::Taut => "taut",
            Schema::KBox => "k-box",
            Schema::Four => "4-box",
            Schema::TBox => "t-box",
            Schema::KC => "k-c",
            Schema::FixC => "fix-c",
            Schema::IndC => "ind-c",
        }
    }

    pub fn from_label(s: &str) -> Option<Schema> {
        Schema::ALL.into_iter().find(|k| k.label() == s)
    }
}

impl std::fmt::Display for Schema {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One node of a certificate tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofNode {
    Axiom {
        schema: Schema,
        formula: Formula,
    },
    Assumption {
        formula: Formula,
    },
    Mp {
        major: Box<ProofNode>,
        minor: Box<ProofNode>,
        formula: Formula,
    },
    Nec {
        child: Box<ProofNode>,
        formula: Formula,
    },
    OmegaLoop {
        psi: Formula,
        premises: Vec<ProofNode>,
        loop_index: usize,
        conclusion: Formula,
    },
}

impl ProofNode {
    /// The formula this node claims to prove.
    pub fn formula(&self) -> &Formula {
        match self {
            ProofNode::Axiom { formula, .. }
            | ProofNode::Assumption { formula }
            | ProofNode::Mp { formula, .. }
            | ProofNode::Nec { formula, .. } => formula,
            ProofNode::OmegaLoop { conclusion, .. } => conclusion,
        }
    }

    /// Number of nodes in the tree.
    pub fn node_count(&self) -> usize {
        match self {
            ProofNode::Axiom { .. } | ProofNode::Assumption { .. } => 1,
            ProofNode::Mp { major, minor, .. } => 1 + major.node_count() + minor.node_count(),
            ProofNode::Nec { child, .. } => 1 + child.node_count(),
            ProofNode::OmegaLoop { premises, .. } => {
                1 + premises.iter().map(ProofNode::node_count).sum::<usize>()
            }
        }
    }
}

/// Why a certificate does not check.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ProofError {
    #[error("formula uses agent {agent} but only agents below {agents} exist")]
    AgentOutOfRange { agent: AgentId, agents: AgentId },
    #[error("'{formula}' is not an instance of schema {schema}")]
    SchemaMismatch { schema: Schema, formula: Formula },
    #[error("'{formula}' is not a propositional tautology")]
    NotTautology { formula: Formula },
    #[error("tautology check needs {count} abstracted atoms, over the cap of 16")]
    TooManyAtoms { count: usize },
    #[error("'{formula}' is not among the assumptions")]
    NotAssumed { formula: Formula },
    #[error("major premise '{major}' does not prove '{minor}' implies '{conclusion}'")]
    MpMismatch {
        major: Formula,
        minor: Formula,
        conclusion: Formula,
    },
    #[error("necessitation child proves '{child}', which does not make '{conclusion}'")]
    NecMismatch { child: Formula, conclusion: Formula },
    #[error("the loop rule needs at least one premise")]
    OmegaEmpty,
    #[error("loop index {index} out of range for {len} premises")]
    OmegaLoopIndex { index: usize, len: usize },
    #[error("premise {index} proves '{found}', not an implication")]
    OmegaPremiseShape { index: usize, found: Formula },
    #[error("premise {index} proves '{found}' but the family requires '{expected}'")]
    OmegaPremiseMismatch {
        index: usize,
        found: Formula,
        expected: Formula,
    },
    #[error("loop conclusion is '{found}' but the family gives '{expected}'")]
    OmegaConclusionMismatch { found: Formula, expected: Formula },
}

/// Which listed premise certifies depth `j` of an eventually-periodic
/// family with `len` listed members looping back to `loop_index`.
pub fn unfold_depth(j: usize, len: usize, loop_index: usize) -> usize {
    if j < len {
        j
    } else {
        loop_index + (j - loop_index) % (len - loop_index)
    }
}

/// Check a propositional tautology by truth table, abstracting each
/// variable and each maximal boxed or common-knowledge subformula to an
/// atom. At most 16 atoms are supported.
fn check_taut(f: &Formula) -> Result<(), ProofError> {
    let mut atoms: HashMap<&Formula, usize> = HashMap::new();
    fn collect<'f>(f: &'f Formula, atoms: &mut HashMap<&'f Formula, usize>) {
        match f {
            Formula::Bot => {}
            Formula::Imp(a, b) => {
                collect(a, atoms);
                collect(b, atoms);
            }
            Formula::Var(_) | Formula::Box(..) | Formula::C(_) => {
                let next = atoms.len();
                atoms.entry(f).or_insert(next);
            }
        }
    }
    collect(f, &mut atoms);
    if atoms.len() > 16 {
        return Err(ProofError::TooManyAtoms { count: atoms.len() });
    }
    fn eval(f: &Formula, atoms: &HashMap<&Formula, usize>, mask: u32) -> bool {
        match f {
            Formula::Bot => false,
            Formula::Imp(a, b) => !eval(a, atoms, mask) || eval(b, atoms, mask),
            _ => mask & (1 << atoms[f]) != 0,
        }
    }
    for mask in 0..(1u32 << atoms.len()) {
        if !eval(f, &atoms, mask) {
            return Err(ProofError::NotTautology { formula: f.clone() });
        }
    }
    Ok(())
}

/// Check that `f` instantiates `schema` (with `agents` fixing the shape
/// of `E`).
pub fn match_axiom(schema: Schema, f: &Formula, agents: AgentId) -> Result<(), ProofError> {
    use Formula::{Box as B, Imp, C};
    let mismatch = || ProofError::SchemaMismatch {
        schema,
        formula: f.clone(),
    };
    let e = |g: &Formula| syntax::everyone(agents, g.clone());
    let ok = match schema {
        Schema::Taut => return check_taut(f),
        Schema::KBox => match f {
            Imp(l, r) => match (&**l, &**r) {
                (B(i, lb), Imp(r1, r2)) => match (&**lb, &**r1, &**r2) {
                    (Imp(a, b), B(i1, a1), B(i2, b1)) => {
                        i == i1 && i == i2 && a == a1 && b == b1
                    }
                    _ => false,
                },
                _ => false,
            },
            _ => false,
        },
        Schema::Four => match f {
            Imp(l, r) => match (&**l, &**r) {
                (B(i, a), B(i1, inner)) => match &**inner {
                    B(i2, a1) => i == i1 && i == i2 && a == a1,
                    _ => false,
                },
                _ => false,
            },
            _ => false,
        },
        Schema::TBox => match f {
            Imp(l, r) => match &**l {
                B(_, a) => **a == **r,
                _ => false,
            },
            _ => false,
        },
        Schema::KC => match f {
            Imp(l, r) => match (&**l, &**r) {
                (C(lb), Imp(r1, r2)) => match (&**lb, &**r1, &**r2) {
                    (Imp(a, b), C(a1), C(b1)) => a == a1 && b == b1,
                    _ => false,
                },
                _ => false,
            },
            _ => false,
        },
        Schema::FixC => match f {
            Imp(l, r) => match &**l {
                C(a) => **r == syntax::and(e(a), e(&Formula::C(a.clone()))),
                _ => false,
            },
            _ => false,
        },
        Schema::IndC => match f {
            Imp(l, r) => match &**r {
                C(a) => {
                    **l == syntax::and(e(a), syntax::common(syntax::imp((**a).clone(), e(a))))
                }
                _ => false,
            },
            _ => false,
        },
    };
    if ok {
        Ok(())
    } else {
        Err(mismatch())
    }
}

/// Check a certificate against global assumptions `sigma`. On success the
/// root proves its stated formula in the calculus extended by `sigma` as
/// premises available under every rule.
pub fn check(node: &ProofNode, sigma: &[Formula], agents: AgentId) -> Result<(), ProofError> {
    assert!(agents > 0, "check() needs at least one agent");
    if let Some(a) = node.formula().max_agent() {
        if a >= agents {
            return Err(ProofError::AgentOutOfRange { agent: a, agents });
        }
    }
    match node {
        ProofNode::Axiom { schema, formula } => match_axiom(*schema, formula, agents),
        ProofNode::Assumption { formula } => {
            if sigma.contains(formula) {
                Ok(())
            } else {
                Err(ProofError::NotAssumed {
                    formula: formula.clone(),
                })
            }
        }
        ProofNode::Mp {
            major,
            minor,
            formula,
        } => {
            check(major, sigma, agents)?;
            check(minor, sigma, agents)?;
            let expected = syntax::imp(minor.formula().clone(), formula.clone());
            if *major.formula() == expected {
                Ok(())
            } else {
                Err(ProofError::MpMismatch {
                    major: major.formula().clone(),
                    minor: minor.formula().clone(),
                    conclusion: formula.clone(),
                })
            }
        }
        ProofNode::Nec { child, formula } => {
            check(child, sigma, agents)?;
            if *formula == syntax::common(child.formula().clone()) {
                Ok(())
            } else {
                Err(ProofError::NecMismatch {
                    child: child.formula().clone(),
                    conclusion: formula.clone(),
                })
            }
        }
        ProofNode::OmegaLoop {
            psi,
            premises,
            loop_index,
            conclusion,
        } => {
            let len = premises.len();
            if len == 0 {
                return Err(ProofError::OmegaEmpty);
            }
            if *loop_index >= len {
                return Err(ProofError::OmegaLoopIndex {
                    index: *loop_index,
                    len,
                });
            }
            let mut family = Vec::with_capacity(len);
            for (j, p) in premises.iter().enumerate() {
                check(p, sigma, agents)?;
                match p.formula() {
                    Formula::Imp(phi, _) => family.push((**phi).clone()),
                    other => {
                        return Err(ProofError::OmegaPremiseShape {
                            index: j,
                            found: other.clone(),
                        })
                    }
                }
            }
            let e = |g: &Formula| syntax::everyone(agents, g.clone());
            for (j, p) in premises.iter().enumerate() {
                let next = &family[unfold_depth(j + 1, len, *loop_index)];
                let expected = syntax::imp(
                    family[j].clone(),
                    syntax::and(e(psi), e(next)),
                );
                if *p.formula() != expected {
                    return Err(ProofError::OmegaPremiseMismatch {
                        index: j,
                        found: p.formula().clone(),
                        expected,
                    });
                }
            }
            let expected = syntax::imp(family[0].clone(), syntax::common(psi.clone()));
            if *conclusion == expected {
                Ok(())
            } else {
                Err(ProofError::OmegaConclusionMismatch {
                    found: conclusion.clone(),
                    expected,
                })
            }
        }
    }
}

/// All single-node corruptions of a certificate: each node's stated
/// formula replaced by its negation and by `⊥`. A sound checker must
/// reject every one of them when the original checks.
pub fn mutants(node: &ProofNode) -> Vec<ProofNode> {
    fn replace_at(node: &ProofNode, target: usize, counter: &mut usize, with: &Formula) -> ProofNode {
        let here = *counter;
        *counter += 1;
        let swap = |f: &Formula| {
            if here == target {
                with.clone()
            } else {
                f.clone()
            }
        };
        match node {
            ProofNode::Axiom { schema, formula } => ProofNode::Axiom {
                schema: *schema,
                formula: swap(formula),
            },
            ProofNode::Assumption { formula } => ProofNode::Assumption {
                formula: swap(formula),
            },
            ProofNode::Mp {
                major,
                minor,
                formula,
            } => ProofNode::Mp {
                major: Box::new(replace_at(major, target, counter, with)),
                minor: Box::new(replace_at(minor, target, counter, with)),
                formula: swap(formula),
            },
            ProofNode::Nec { child, formula } => ProofNode::Nec {
                child: Box::new(replace_at(child, target, counter, with)),
                formula: swap(formula),
            },
            ProofNode::OmegaLoop {
                psi,
                premises,
                loop_index,
                conclusion,
            } => ProofNode::OmegaLoop {
                psi: psi.clone(),
                premises: premises
                    .iter()
                    .map(|p| replace_at(p, target, counter, with))
                    .collect(),
                loop_index: *loop_index,
                conclusion: swap(conclusion),
            },
        }
    }
    let total = node.node_count();
    let mut out = Vec::with_capacity(total * 2);
    for target in 0..total {
        for with in [
            syntax::not(node_formula_at(node, target).clone()),
            syntax::bot(),
        ] {
            let mut counter = 0;
            out.push(replace_at(node, target, &mut counter, &with));
        }
    }
    out
}

fn node_formula_at(node: &ProofNode, target: usize) -> &Formula {
    fn walk<'n>(node: &'n ProofNode, target: usize, counter: &mut usize) -> Option<&'n Formula> {
        let here = *counter;
        *counter += 1;
        if here == target {
            return Some(node.formula());
        }
        match node {
            ProofNode::Axiom { .. } | ProofNode::Assumption { .. } => None,
            ProofNode::Mp { major, minor, .. } => {
                walk(major, target, counter).or_else(|| walk(minor, target, counter))
            }
            ProofNode::Nec { child, .. } => walk(child, target, counter),
            ProofNode::OmegaLoop { premises, .. } => {
                premises.iter().find_map(|p| walk(p, target, counter))
            }
        }
    }
    let mut counter = 0;
    walk(node, target, &mut counter).expect("target below node count")
}

/// One algebra-and-assignment on which an accepted certificate's
/// conclusion failed to take the top value while all assumptions did —
/// which would mean the checker itself is broken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepViolation {
    /// Index into the supplied algebra sequence.
    pub algebra: usize,
    pub assignment: BTreeMap<u32, Elem>,
    /// Value the conclusion took instead of 1.
    pub value: Elem,
}

/// Outcome of [`soundness_sweep`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub algebras_checked: usize,
    pub assignments_checked: usize,
    pub violations: Vec<SweepViolation>,
}

impl SweepReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Cross-check an accepted certificate against algebraic semantics: on
/// every supplied algebra whose agent count matches, and every assignment
/// of elements to the variables of `sigma` and the conclusion under which
/// all of `sigma` takes value 1, the conclusion must take value 1 too.
/// Algebras with a different agent count are skipped (the certificate's
/// `E`-expansions are tied to the agent count). The certificate is checked
/// first; the sweep runs only on accepted certificates.
pub fn soundness_sweep(
    cert: &ProofNode,
    sigma: &[Formula],
    agents: AgentId,
    algebras: &[FiniteAlgebra],
) -> Result<SweepReport, ProofError> {
    check(cert, sigma, agents)?;
    Ok(sweep_conclusion(cert.formula(), sigma, agents, algebras))
}

/// The sweep proper, on a conclusion taken at face value. Split out so the
/// violation reporting can be exercised on conclusions the checker would
/// never accept.
fn sweep_conclusion(
    conclusion: &Formula,
    sigma: &[Formula],
    agents: AgentId,
    algebras: &[FiniteAlgebra],
) -> SweepReport {
    let mut vars: Vec<u32> = conclusion.vars();
    for s in sigma {
        vars.extend(s.vars());
    }
    vars.sort_unstable();
    vars.dedup();
    let mut report = SweepReport {
        algebras_checked: 0,
        assignments_checked: 0,
        violations: Vec::new(),
    };
    for (ai, alg) in algebras.iter().enumerate() {
        if alg.agent_count() != agents {
            continue;
        }
        report.algebras_checked += 1;
        let size = alg.size();
        let mut counters = vec![0usize; vars.len()];
        loop {
            let assignment: BTreeMap<u32, Elem> = vars
                .iter()
                .zip(&counters)
                .map(|(&v, &c)| (v, c as Elem))
                .collect();
            report.assignments_checked += 1;
            let outcome = algebra::algebraic_consequence(alg, &assignment, sigma, &[], conclusion)
                .expect("sweep formulas evaluate on agent-matched algebras");
            if !outcome.holds {
                report.violations.push(SweepViolation {
                    algebra: ai,
                    assignment,
                    value: outcome.failure.expect("failed outcomes carry values").value,
                });
            }
            // Advance the mixed-radix counter over assignments.
            let mut k = 0;
            while k < counters.len() {
                counters[k] += 1;
                if counters[k] < size {
                    break;
                }
                counters[k] = 0;
                k += 1;
            }
            if k == counters.len() {
                break;
            }
        }
    }
    report
}

/// A malformed certificate file.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("offset {pos}: {msg}")]
pub struct CertError {
    pub pos: usize,
    pub msg: String,
}

fn cert_err(pos: usize, msg: impl Into<String>) -> CertError {
    CertError {
        pos,
        msg: msg.into(),
    }
}

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    fn reserialize(&self) -> String {
        match self {
            Sexp::Atom(s, _) => s.clone(),
            Sexp::List(items, _) => {
                let inner: Vec<String> = items.iter().map(Sexp::reserialize).collect();
                format!("({})", inner.join(" "))
            }
        }
    }
}

fn tokenize(text: &str) -> Vec<(usize, String)> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' || c == ')' {
            tokens.push((i, c.to_string()));
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() {
                let d = bytes[i] as char;
                if d.is_whitespace() || d == '(' || d == ')' {
                    break;
                }
                i += 1;
            }
            tokens.push((start, text[start..i].to_owned()));
        }
    }
    tokens
}

fn parse_sexp(tokens: &[(usize, String)], at: &mut usize) -> Result<Sexp, CertError> {
    let Some((pos, tok)) = tokens.get(*at) else {
        return Err(cert_err(usize::MAX, "unexpected end of input"));
    };
    *at += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*at) {
                    Some((_, t)) if t == ")" => {
                        *at += 1;
                        return Ok(Sexp::List(items, *pos));
                    }
                    Some(_) => items.push(parse_sexp(tokens, at)?),
                    None => return Err(cert_err(*pos, "unclosed '('")),
                }
            }
        }
        ")" => Err(cert_err(*pos, "unexpected ')'")),
        _ => Ok(Sexp::Atom(tok.clone(), *pos)),
    }
}

fn formula_from_items(items: &[Sexp], pos: usize, agents: AgentId) -> Result<Formula, CertError> {
    if items.is_empty() {
        return Err(cert_err(pos, "missing formula"));
    }
    let text: Vec<String> = items.iter().map(Sexp::reserialize).collect();
    let text = text.join(" ");
    syntax::parse(&text, agents)
        .map_err(|e: ParseError| cert_err(items[0].pos(), format!("bad formula '{text}': {e}")))
}

fn node_from_sexp(s: &Sexp, agents: AgentId) -> Result<ProofNode, CertError> {
    let Sexp::List(items, pos) = s else {
        return Err(cert_err(s.pos(), "expected a parenthesised node"));
    };
    let Some(Sexp::Atom(head, head_pos)) = items.first() else {
        return Err(cert_err(*pos, "node must start with a rule name"));
    };
    match head.as_str() {
        "ax" => {
            let Some(Sexp::Atom(label, label_pos)) = items.get(1) else {
                return Err(cert_err(*head_pos, "expected 'ax <schema> <formula>'"));
            };
            let schema = Schema::from_label(label)
                .ok_or_else(|| cert_err(*label_pos, format!("unknown schema '{label}'")))?;
            let formula = formula_from_items(&items[2..], *pos, agents)?;
            Ok(ProofNode::Axiom { schema, formula })
        }
        "asm" => {
            let formula = formula_from_items(&items[1..], *pos, agents)?;
            Ok(ProofNode::Assumption { formula })
        }
        "mp" => {
            if items.len() < 4 {
                return Err(cert_err(*pos, "expected '(mp <major> <minor> <formula>)'"));
            }
            let major = node_from_sexp(&items[1], agents)?;
            let minor = node_from_sexp(&items[2], agents)?;
            let formula = formula_from_items(&items[3..], *pos, agents)?;
            Ok(ProofNode::Mp {
                major: Box::new(major),
                minor: Box::new(minor),
                formula,
            })
        }
        "nec" => {
            if items.len() < 3 {
                return Err(cert_err(*pos, "expected '(nec <child> <formula>)'"));
            }
            let child = node_from_sexp(&items[1], agents)?;
            let formula = formula_from_items(&items[2..], *pos, agents)?;
            Ok(ProofNode::Nec {
                child: Box::new(child),
                formula,
            })
        }
        "omega" => {
            if items.len() < 5 {
                return Err(cert_err(
                    *pos,
                    "expected '(omega <psi> (<premises>) <loop-index> <formula>)'",
                ));
            }
            let psi = formula_from_items(&items[1..2], *pos, agents)?;
            let Sexp::List(premise_items, _) = &items[2] else {
                return Err(cert_err(items[2].pos(), "premises must be a list"));
            };
            let premises = premise_items
                .iter()
                .map(|p| node_from_sexp(p, agents))
                .collect::<Result<Vec<_>, _>>()?;
            let Sexp::Atom(idx, idx_pos) = &items[3] else {
                return Err(cert_err(items[3].pos(), "expected a loop index"));
            };
            let loop_index: usize = idx
                .parse()
                .map_err(|_| cert_err(*idx_pos, format!("bad loop index '{idx}'")))?;
            let conclusion = formula_from_items(&items[4..], *pos, agents)?;
            Ok(ProofNode::OmegaLoop {
                psi,
                premises,
                loop_index,
                conclusion,
            })
        }
        other => Err(cert_err(*head_pos, format!("unknown rule '{other}'"))),
    }
}

/// Parse a certificate. `agents` fixes how `E` abbreviations in formulas
/// expand and bounds the box indices.
pub fn parse_cert(text: &str, agents: AgentId) -> Result<ProofNode, CertError> {
    let tokens = tokenize(text);
    let mut at = 0;
    let sexp = parse_sexp(&tokens, &mut at)?;
    if at != tokens.len() {
        return Err(cert_err(tokens[at].0, "trailing input after certificate"));
    }
    node_from_sexp(&sexp, agents)
}

/// Render a certificate in the format [`parse_cert`] reads, with formulas
/// in primitive syntax.
pub fn write_cert(node: &ProofNode) -> String {
    match node {
        ProofNode::Axiom { schema, formula } => {
            format!("(ax {} {})", schema.label(), syntax::render_exact(formula))
        }
        ProofNode::Assumption { formula } => {
            format!("(asm {})", syntax::render_exact(formula))
        }
        ProofNode::Mp {
            major,
            minor,
            formula,
        } => format!(
            "(mp {} {} {})",
            write_cert(major),
            write_cert(minor),
            syntax::render_exact(formula)
        ),
        ProofNode::Nec { child, formula } => {
            format!("(nec {} {})", write_cert(child), syntax::render_exact(formula))
        }
        ProofNode::OmegaLoop {
            psi,
            premises,
            loop_index,
            conclusion,
        } => {
            let ps: Vec<String> = premises.iter().map(write_cert).collect();
            format!(
                "(omega ({}) ({}) {} {})",
                syntax::render_exact(psi),
                ps.join(" "),
                loop_index,
                syntax::render_exact(conclusion)
            )
        }
    }
}
