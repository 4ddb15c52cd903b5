//! Validity decision by closure-set elimination, with verified
//! countermodels.
//!
//! To decide a formula the procedure enumerates every coherent truth
//! assignment over the formula's closure (assignments are `u64` masks, so
//! the closure is capped at 64 formulas), then repeatedly eliminates
//! assignments whose diamond witnesses or common-knowledge escapes cannot
//! be realised among the survivors. The surviving assignments form a
//! reflexive-transitive model in which every closure formula means its
//! own mask, so the input is valid exactly when no survivor makes it
//! false. Any refutation is extracted as a concrete model, shrunk
//! greedily, and re-checked against the Kripke semantics before it is
//! returned.
//!
//! Coherence of an assignment means: `⊥` is false, implications take
//! their classical value, a true `box_i φ` forces `φ`, and a true `C φ`
//! forces `φ`, every `box_i φ`, and every `box_i C φ` — the unfolding
//! direction of common knowledge. The elimination handles the other
//! direction: a false `box_i φ` demands an `i`-successor falsifying `φ`,
//! and a false `C φ` demands a finite chain of successor steps reaching a
//! set falsifying `φ`. Successor structure is subset inclusion of the
//! positively boxed formulas per agent, which is a preorder by
//! construction.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::kripke::KripkeModel;
use crate::syntax::{self, AgentId, Formula};

/// Hard ceiling on closure size: assignments are single machine words.
pub const HARD_CLOSURE_LIMIT: usize = 64;

/// Resource knobs for the decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideConfig {
    /// Number of agents; every `box` index must stay below it.
    pub agents: AgentId,
    /// Refuse formulas whose closure exceeds this (clamped to
    /// [`HARD_CLOSURE_LIMIT`]).
    pub max_closure: usize,
    /// Refuse searches storing more than this many candidate sets; the
    /// number of explored branch states is budgeted at 64 times this.
    pub max_sets: usize,
}

impl DecideConfig {
    pub fn new(agents: AgentId) -> Self {
        DecideConfig {
            agents,
            max_closure: 24,
            max_sets: 1 << 16,
        }
    }
}

/// Refusals and input mismatches; these are resource or usage errors, not
/// verdicts.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecideError {
    #[error("formula uses agent {agent} but only agents below {agents} exist")]
    AgentOutOfRange { agent: AgentId, agents: AgentId },
    #[error("closure has {size} formulas, over the cap of {max}")]
    ClosureTooLarge { size: usize, max: usize },
    #[error("search exceeded the budget of {max} candidate sets")]
    TooManySets { max: usize },
}

/// A model refuting the formula at a named world; always validated and
/// re-evaluated before being handed out.
#[derive(Debug, Clone, PartialEq)]
pub struct Countermodel {
    pub model: KripkeModel,
    pub world: usize,
}

/// Outcome of a decision.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Valid,
    Invalid(Countermodel),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

#[derive(Debug, Clone)]
enum NodeKind {
    Var,
    Bot,
    Imp(usize, usize),
    Box(usize),
    /// body index, then per agent the indices of `box_i body` and
    /// `box_i C body`.
    C(usize, Vec<(usize, usize)>),
}

struct Tableau {
    n: usize,
    agents: AgentId,
    kinds: Vec<NodeKind>,
    /// Assignment order: ascending formula size, so implication values
    /// are forced and box/common constraints mostly point forward.
    order: Vec<usize>,
    /// Per agent, the mask of closure indices that are `box_i _`.
    box_bits: Vec<u64>,
    /// (index of `box_i body`, agent, index of body).
    box_nodes: Vec<(usize, AgentId, usize)>,
    /// (index of `C body`, index of body).
    c_nodes: Vec<(usize, usize)>,
    var_nodes: Vec<(u32, usize)>,
    all_box_bits: u64,
    /// Closure index of the formula being decided.
    top: usize,
}

impl Tableau {
    fn build(f: &Formula, agents: AgentId, max_closure: usize) -> Result<Tableau, DecideError> {
        if let Some(a) = f.max_agent() {
            if a >= agents {
                return Err(DecideError::AgentOutOfRange { agent: a, agents });
            }
        }
        let closure = syntax::closure(f, agents);
        let cap = max_closure.min(HARD_CLOSURE_LIMIT);
        if closure.len() > cap {
            return Err(DecideError::ClosureTooLarge {
                size: closure.len(),
                max: cap,
            });
        }
        let n = closure.len();
        let mut kinds = Vec::with_capacity(n);
        let mut box_bits = vec![0u64; agents as usize];
        let mut box_nodes = Vec::new();
        let mut var_nodes = Vec::new();
        for i in 0..n {
            let kind = match closure.get(i) {
                Formula::Var(v) => {
                    var_nodes.push((*v, i));
                    NodeKind::Var
                }
                Formula::Bot => NodeKind::Bot,
                Formula::Imp(a, b) => NodeKind::Imp(
                    closure.index_of(a).expect("closure is subformula-closed"),
                    closure.index_of(b).expect("closure is subformula-closed"),
                ),
                Formula::Box(ag, a) => {
                    let body = closure.index_of(a).expect("closure is subformula-closed");
                    box_bits[*ag as usize] |= 1 << i;
                    box_nodes.push((i, *ag, body));
                    NodeKind::Box(body)
                }
                Formula::C(a) => {
                    let body = closure.index_of(a).expect("closure is subformula-closed");
                    let unfold = (0..agents)
                        .map(|ag| {
                            let ba = closure
                                .index_of(&syntax::knows(ag, (**a).clone()))
                                .expect("closure unfolds C through boxes");
                            let bc = closure
                                .index_of(&syntax::knows(ag, Formula::C(a.clone())))
                                .expect("closure unfolds C through boxes");
                            (ba, bc)
                        })
                        .collect();
                    NodeKind::C(body, unfold)
                }
            };
            kinds.push(kind);
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (closure.get(i).size(), i));
        let all_box_bits = box_bits.iter().fold(0, |acc, b| acc | b);
        let c_nodes = kinds
            .iter()
            .enumerate()
            .filter_map(|(i, k)| match k {
                NodeKind::C(body, _) => Some((i, *body)),
                _ => None,
            })
            .collect();
        let top = closure.index_of(f).expect("formula is in its own closure");
        Ok(Tableau {
            n,
            agents,
            kinds,
            order,
            box_bits,
            box_nodes,
            c_nodes,
            var_nodes,
            all_box_bits,
            top,
        })
    }

    /// Enumerate every coherent assignment, in a fixed order.
    fn coherent_sets(&self, max_sets: usize) -> Result<Vec<u64>, DecideError> {
        let mut sets = Vec::new();
        let mut budget = max_sets.saturating_mul(HARD_CLOSURE_LIMIT);
        self.assign(0, 0, 0, 0, max_sets, &mut budget, &mut sets)?;
        Ok(sets)
    }

    #[allow(clippy::too_many_arguments)]
    fn assign(
        &self,
        depth: usize,
        pos: u64,
        assigned: u64,
        forced_true: u64,
        max_sets: usize,
        budget: &mut usize,
        sets: &mut Vec<u64>,
    ) -> Result<(), DecideError> {
        if *budget == 0 {
            return Err(DecideError::TooManySets { max: max_sets });
        }
        *budget -= 1;
        if depth == self.n {
            if sets.len() == max_sets {
                return Err(DecideError::TooManySets { max: max_sets });
            }
            sets.push(pos);
            return Ok(());
        }
        let i = self.order[depth];
        let bit = 1u64 << i;
        let must_be_true = forced_true & bit != 0;
        // A candidate value is viable if it respects forcing and the
        // downward coherence into already-assigned formulas; trying false
        // first keeps the refuting sets early in the enumeration.
        for value in [false, true] {
            if !value && must_be_true {
                continue;
            }
            let mut new_forced = forced_true;
            if value {
                match &self.kinds[i] {
                    NodeKind::Var => {}
                    NodeKind::Bot => continue,
                    NodeKind::Imp(a, b) => {
                        // Children are smaller, hence assigned.
                        if pos & (1 << a) != 0 && pos & (1 << b) == 0 {
                            continue;
                        }
                    }
                    NodeKind::Box(body) => {
                        if pos & (1 << body) == 0 {
                            continue;
                        }
                    }
                    NodeKind::C(body, unfold) => {
                        if pos & (1 << body) == 0 {
                            continue;
                        }
                        let mut viable = true;
                        for &(ba, bc) in unfold {
                            for t in [ba, bc] {
                                let tb = 1u64 << t;
                                if assigned & tb != 0 && pos & tb == 0 {
                                    viable = false;
                                }
                                new_forced |= tb;
                            }
                        }
                        if !viable {
                            continue;
                        }
                    }
                }
            } else {
                if let NodeKind::Imp(a, b) = &self.kinds[i] {
                    // False implication needs a true antecedent and a
                    // false consequent.
                    if pos & (1 << a) == 0 || pos & (1 << b) != 0 {
                        continue;
                    }
                }
            }
            let new_pos = if value { pos | bit } else { pos };
            self.assign(
                depth + 1,
                new_pos,
                assigned | bit,
                if value { new_forced } else { forced_true },
                max_sets,
                budget,
                sets,
            )?;
        }
        Ok(())
    }

    fn profile(&self, pos: u64) -> u64 {
        pos & self.all_box_bits
    }

    fn step_exists(&self, p: u64, q: u64) -> bool {
        (0..self.agents as usize).any(|i| p & self.box_bits[i] & !q == 0)
    }

    /// Remove sets whose obligations cannot be met among the rest; runs to
    /// a fixpoint and preserves order.
    fn eliminate(&self, sets: &mut Vec<u64>) {
        loop {
            // Group survivors by their boxed profile.
            let mut groups: BTreeMap<u64, u64> = BTreeMap::new(); // profile -> union of ~pos
            for &pos in sets.iter() {
                *groups.entry(self.profile(pos)).or_insert(0) |= !pos;
            }
            let profiles: Vec<u64> = groups.keys().copied().collect();
            // For each profile and agent, what can be false at some
            // successor: union over profiles whose agent-part includes
            // ours.
            let mut succ_false: Vec<Vec<u64>> =
                vec![vec![0; profiles.len()]; self.agents as usize];
            for (pi, &p) in profiles.iter().enumerate() {
                for (&q, &neg) in &groups {
                    for i in 0..self.agents as usize {
                        if p & self.box_bits[i] & !q == 0 {
                            succ_false[i][pi] |= neg;
                        }
                    }
                }
            }
            let profile_index: BTreeMap<u64, usize> =
                profiles.iter().enumerate().map(|(k, &p)| (p, k)).collect();
            // Common-knowledge escapes: per C node, the profiles from which
            // a body-falsifying set is reachable.
            let mut escape: Vec<Vec<bool>> = Vec::with_capacity(self.c_nodes.len());
            for &(_, body) in &self.c_nodes {
                let mut good: Vec<bool> = profiles
                    .iter()
                    .map(|p| groups[p] & (1 << body) != 0)
                    .collect();
                loop {
                    let mut grew = false;
                    for (pi, &p) in profiles.iter().enumerate() {
                        if good[pi] {
                            continue;
                        }
                        let reaches = profiles
                            .iter()
                            .enumerate()
                            .any(|(qi, &q)| good[qi] && self.step_exists(p, q));
                        if reaches {
                            good[pi] = true;
                            grew = true;
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                escape.push(good);
            }
            let before = sets.len();
            sets.retain(|&pos| {
                let pi = profile_index[&self.profile(pos)];
                for &(bx, ag, body) in &self.box_nodes {
                    if pos & (1 << bx) == 0 && succ_false[ag as usize][pi] & (1 << body) == 0 {
                        return false;
                    }
                }
                for (ci, &(c, _)) in self.c_nodes.iter().enumerate() {
                    if pos & (1 << c) == 0 && !escape[ci][pi] {
                        return false;
                    }
                }
                true
            });
            if sets.len() == before {
                return;
            }
        }
    }

    /// Worlds reachable from the head by any-agent steps, in order.
    fn reachable(&self, sets: &[u64], head: u64) -> Vec<u64> {
        let mut keep: Vec<bool> = sets.iter().map(|&p| p == head).collect();
        loop {
            let mut grew = false;
            for (i, &p) in sets.iter().enumerate() {
                if !keep[i] {
                    continue;
                }
                for (j, &q) in sets.iter().enumerate() {
                    if !keep[j] && self.step_exists(self.profile(p), self.profile(q)) {
                        keep[j] = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        sets.iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(&p, _)| p)
            .collect()
    }

    /// Build the refuting model around the head set, shrink it, and
    /// re-check it against the Kripke semantics.
    fn extract(&self, survivors: &[u64], head: u64, f: &Formula) -> Countermodel {
        let mut worlds = self.reachable(survivors, head);
        if worlds.len() <= 256 {
            // Greedily drop worlds while the head still survives
            // re-elimination.
            let mut w = worlds.len();
            while w > 0 {
                w -= 1;
                if worlds[w] == head {
                    continue;
                }
                let mut candidate: Vec<u64> =
                    worlds.iter().enumerate().filter(|&(k, _)| k != w).map(|(_, &p)| p).collect();
                self.eliminate(&mut candidate);
                if candidate.contains(&head) {
                    worlds = candidate;
                    w = w.min(worlds.len());
                }
            }
            worlds = self.reachable(&worlds, head);
        }
        let names = (0..worlds.len()).map(|k| format!("w{k}")).collect();
        let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.agents as usize];
        for (x, &p) in worlds.iter().enumerate() {
            for (y, &q) in worlds.iter().enumerate() {
                for i in 0..self.agents as usize {
                    if p & self.box_bits[i] & !q == 0 {
                        edges[i].push((x, y));
                    }
                }
            }
        }
        let valuation = self
            .var_nodes
            .iter()
            .map(|&(v, idx)| {
                let holds = worlds
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p & (1 << idx) != 0)
                    .map(|(k, _)| k)
                    .collect();
                (v, holds)
            })
            .collect();
        let model = KripkeModel::new(names, self.agents, edges, valuation)
            .expect("extracted countermodel is well-formed");
        let world = worlds.iter().position(|&p| p == head).unwrap();
        assert!(
            model.validate().is_valid(),
            "extracted countermodel must be reflexive-transitive"
        );
        assert!(
            !model.satisfies(world, f).expect("formula evaluates in countermodel"),
            "extracted countermodel must refute the formula"
        );
        Countermodel { model, world }
    }
}

/// Decide validity over all reflexive-transitive models with the
/// configured agents. Invalid formulas come with a verified countermodel.
pub fn decide_valid(f: &Formula, config: &DecideConfig) -> Result<Verdict, DecideError> {
    let tableau = Tableau::build(f, config.agents, config.max_closure)?;
    let mut sets = tableau.coherent_sets(config.max_sets)?;
    tableau.eliminate(&mut sets);
    match sets.iter().find(|&&pos| pos & (1 << tableau.top) == 0) {
        Some(&head) => Ok(Verdict::Invalid(tableau.extract(&sets, head, f))),
        None => Ok(Verdict::Valid),
    }
}

/// Local consequence: does `f` follow from the premises holding at the
/// evaluation world? Decided as the validity of `premises → f`.
pub fn derives_l(
    gamma: &[Formula],
    f: &Formula,
    config: &DecideConfig,
) -> Result<Verdict, DecideError> {
    if gamma.is_empty() {
        return decide_valid(f, config);
    }
    decide_valid(&syntax::imp(syntax::big_and(gamma), f.clone()), config)
}

/// Global consequence: does `f` hold wherever the premises hold at every
/// world? Decided as the validity of `C(premises) → f`, which is
/// equivalent over reflexive-transitive models by the generated-submodel
/// argument.
pub fn derives_g(
    sigma: &[Formula],
    f: &Formula,
    config: &DecideConfig,
) -> Result<Verdict, DecideError> {
    if sigma.is_empty() {
        return decide_valid(f, config);
    }
    decide_valid(
        &syntax::imp(syntax::common(syntax::big_and(sigma)), f.clone()),
        config,
    )
}

/// Mixed consequence: global premises `sigma`, local premises `gamma`.
pub fn derives_mixed(
    sigma: &[Formula],
    gamma: &[Formula],
    f: &Formula,
    config: &DecideConfig,
) -> Result<Verdict, DecideError> {
    if sigma.is_empty() {
        return derives_l(gamma, f, config);
    }
    if gamma.is_empty() {
        return derives_g(sigma, f, config);
    }
    let local = syntax::imp(syntax::big_and(gamma), f.clone());
    decide_valid(
        &syntax::imp(syntax::common(syntax::big_and(sigma)), local),
        config,
    )
}
