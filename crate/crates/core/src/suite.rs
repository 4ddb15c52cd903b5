//! The cross-validation battery behind `s4c suite`: nine numbered
//! checks that play the pipelines against each other on seeded corpora.
//! Each check reports a pass/fail verdict with supporting counts; all
//! randomness flows from one printed seed, so a failing run can be
//! replayed exactly.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, Elem, FiniteAlgebra};
use crate::decide::{self, DecideConfig, Verdict};
use crate::fixtures;
use crate::kripke::KripkeModel;
use crate::prooftree;
use crate::stone::{self, FiniteTopSpace};
use crate::syntax::{self, AgentId, Formula};
use crate::wellfound::{self, Height};

// ---------------------------------------------------------------------------
// Seeded generators
// ---------------------------------------------------------------------------

/// A random multitopological space: 1..=`max_points` points, each agent's
/// topology generated by up to three random basis sets.
pub fn random_space<R: Rng>(rng: &mut R, max_points: usize, agents: AgentId) -> FiniteTopSpace {
    let n = rng.gen_range(1..=max_points);
    let names = (0..n).map(|i| format!("p{i}")).collect();
    let full = (1u64 << n) - 1;
    let bases = (0..agents)
        .map(|_| {
            let k = rng.gen_range(0..=3);
            (0..k).map(|_| rng.gen_range(0..=full)).collect()
        })
        .collect();
    FiniteTopSpace::new(names, agents, bases).expect("generated space is well-formed")
}

/// A random algebra that is valid by construction: the powerset algebra of
/// a random space.
pub fn random_valid_algebra<R: Rng>(
    rng: &mut R,
    max_points: usize,
    agents: AgentId,
) -> FiniteAlgebra {
    stone::powerset_algebra(&random_space(rng, max_points, agents))
}

/// A random model whose relations are reflexive-transitive by
/// construction, with a density-0.3 random edge set per agent.
pub fn random_valid_model<R: Rng>(
    rng: &mut R,
    worlds: usize,
    agents: AgentId,
    vars: u32,
) -> KripkeModel {
    let names = (0..worlds).map(|w| format!("w{w}")).collect();
    let mut edges = Vec::new();
    for _ in 0..agents {
        let mut rel = vec![fixedbitset::FixedBitSet::with_capacity(worlds); worlds];
        for (w, row) in rel.iter_mut().enumerate() {
            row.insert(w);
            for v in 0..worlds {
                if rng.gen_bool(0.3) {
                    row.insert(v);
                }
            }
        }
        let closed = crate::kripke::transitive_closure(&rel);
        edges.push(
            closed
                .iter()
                .enumerate()
                .flat_map(|(w, row)| row.ones().map(move |v| (w, v)))
                .collect(),
        );
    }
    let valuation = (0..vars)
        .map(|v| {
            let set = (0..worlds).filter(|_| rng.gen_bool(0.5)).collect();
            (v, set)
        })
        .collect();
    KripkeModel::new(names, agents, edges, valuation).expect("generated model is well-formed")
}

/// A random formula of the given maximum depth over `vars` variables.
pub fn random_formula<R: Rng>(rng: &mut R, depth: u32, vars: u32, agents: AgentId) -> Formula {
    if depth == 0 {
        return match rng.gen_range(0..6) {
            0 => syntax::bot(),
            _ => syntax::var(rng.gen_range(0..vars)),
        };
    }
    match rng.gen_range(0..10) {
        0 => syntax::bot(),
        1 | 2 => syntax::var(rng.gen_range(0..vars)),
        3..=5 => syntax::imp(
            random_formula(rng, depth - 1, vars, agents),
            random_formula(rng, depth - 1, vars, agents),
        ),
        6 | 7 => syntax::knows(
            rng.gen_range(0..agents),
            random_formula(rng, depth - 1, vars, agents),
        ),
        _ => syntax::common(random_formula(rng, depth - 1, vars, agents)),
    }
}

// ---------------------------------------------------------------------------
// Corpora
// ---------------------------------------------------------------------------

/// The shared space corpus: the two built-in spaces plus 200 random ones
/// with at most 4 points and 1–3 agents.
pub fn corpus_spaces(seed: u64) -> Vec<FiniteTopSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![fixtures::space_s1(), fixtures::space_s2()];
    for _ in 0..200 {
        let agents = rng.gen_range(1..=3);
        out.push(random_space(&mut rng, 4, agents));
    }
    out
}

/// The shared algebra corpus: the two built-in algebras plus the powerset
/// algebras of [`corpus_spaces`]. Everything has at most 16 elements.
pub fn corpus_algebras(seed: u64) -> Vec<FiniteAlgebra> {
    let mut out = vec![fixtures::algebra_a1(), fixtures::algebra_a2()];
    for space in corpus_spaces(seed).iter().skip(2) {
        out.push(stone::powerset_algebra(space));
    }
    out
}

// ---------------------------------------------------------------------------
// Criterion plumbing
// ---------------------------------------------------------------------------

/// Result of one numbered suite check.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    /// 1-based index, stable across releases.
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Counts on success, the first failure on failure.
    pub detail: String,
    pub millis: u128,
}

pub const CRITERIA: [&str; 9] = [
    "fixed-point agreement",
    "powerset round-trip",
    "standardness account",
    "height laws",
    "representation laws",
    "decision on schemas",
    "certificate soundness",
    "pipeline agreement",
    "certificate mutation kill",
];

/// Run one check (1-based index) with the given seed.
pub fn run_criterion(index: usize, seed: u64) -> CriterionOutcome {
    let start = Instant::now();
    let (passed, detail) = match index {
        1 => fixed_point_agreement(seed),
        2 => powerset_roundtrip(seed),
        3 => standardness_account(seed),
        4 => height_laws(seed),
        5 => representation_laws(seed),
        6 => decision_on_schemas(seed),
        7 => certificate_soundness(seed),
        8 => pipeline_agreement(seed),
        9 => certificate_mutation_kill(seed),
        _ => (false, format!("no criterion {index}; valid range is 1..=9")),
    };
    CriterionOutcome {
        index,
        name: CRITERIA.get(index.wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

/// Run all nine checks.
pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    (1..=CRITERIA.len()).map(|i| run_criterion(i, seed)).collect()
}

// ---------------------------------------------------------------------------
// 1: greatest-fixed-point evaluation agrees with the C operator
// ---------------------------------------------------------------------------

fn fixed_point_agreement(seed: u64) -> (bool, String) {
    let algebras = corpus_algebras(seed);
    let mut elems = 0usize;
    for (ai, alg) in algebras.iter().enumerate() {
        for a in alg.elements() {
            elems += 1;
            let gfp = alg.gfp_ce(a);
            let c = alg.c_op(a);
            if gfp != c {
                return (
                    false,
                    format!(
                        "algebra {ai}: gfp({}) = {} but C gives {}",
                        alg.format_elem(a),
                        alg.format_elem(gfp),
                        alg.format_elem(c)
                    ),
                );
            }
        }
    }
    (
        true,
        format!("{} elements across {} algebras", elems, algebras.len()),
    )
}

// ---------------------------------------------------------------------------
// 2: powerset algebras validate; algebra -> topologies -> algebra is identity
// ---------------------------------------------------------------------------

fn powerset_roundtrip(seed: u64) -> (bool, String) {
    let spaces = corpus_spaces(seed);
    for (si, space) in spaces.iter().enumerate() {
        let alg = stone::powerset_algebra(space);
        let report = alg.validate();
        if !report.is_valid() {
            return (
                false,
                format!("space {si}: powerset algebra breaks laws: {report:?}"),
            );
        }
        let tops = match stone::algebra_to_topologies(&alg) {
            Ok(t) => t,
            Err(e) => return (false, format!("space {si}: recovery failed: {e:?}")),
        };
        let rebuilt = FiniteTopSpace::from_raw_topologies(
            alg.atom_names().to_vec(),
            alg.agent_count(),
            tops,
        )
        .expect("recovered topologies form a space");
        let alg2 = stone::powerset_algebra(&rebuilt);
        if alg2 != alg {
            return (false, format!("space {si}: round-trip changed the algebra"));
        }
    }
    (true, format!("{} spaces round-tripped", spaces.len()))
}

// ---------------------------------------------------------------------------
// 3: standardness holds and the accessible part is exactly {a | a not<= C d}
// ---------------------------------------------------------------------------

fn standardness_account(seed: u64) -> (bool, String) {
    let algebras = corpus_algebras(seed);
    let mut graphs = 0usize;
    for (ai, alg) in algebras.iter().enumerate() {
        let outcome = wellfound::check_standard(alg);
        if !outcome.standard {
            return (
                false,
                format!("algebra {ai}: standardness breaks: {:?}", outcome.breaks),
            );
        }
        let sigma = algebra::check_standard_sigma(alg);
        if !sigma.standard {
            return (
                false,
                format!(
                    "algebra {ai}: order-theoretic standardness disagrees: {:?}",
                    sigma.witness
                ),
            );
        }
        for d in alg.elements() {
            graphs += 1;
            let acc = wellfound::accessible_part(&wellfound::prec_graph(alg, d));
            let cd = alg.c_op(d);
            for a in alg.elements() {
                let expected = !alg.leq(a, cd);
                if acc.contains(a as usize) != expected {
                    return (
                        false,
                        format!(
                            "algebra {ai}, d={}: accessible part wrong at {}",
                            alg.format_elem(d),
                            alg.format_elem(a)
                        ),
                    );
                }
            }
        }
    }
    (
        true,
        format!("{} precedence graphs across {} algebras", graphs, algebras.len()),
    )
}

// ---------------------------------------------------------------------------
// 4: height laws and ideal structure, exhaustive per algebra
// ---------------------------------------------------------------------------

fn height_laws(seed: u64) -> (bool, String) {
    let algebras = corpus_algebras(seed);
    let mut checks = 0usize;
    for (ai, alg) in algebras.iter().enumerate() {
        for d in alg.elements() {
            let ht = wellfound::heights(&wellfound::prec_graph(alg, d));
            let ed = alg.e_op(d);
            for c in alg.elements() {
                // One e-step above c sits strictly higher.
                let climb = alg.meet(ed, alg.e_op(c));
                if ht[c as usize].succ() > ht[climb as usize] {
                    return (
                        false,
                        format!(
                            "algebra {ai}, d={}: ht({})+1 > ht(Ed & E{})",
                            alg.format_elem(d),
                            alg.format_elem(c),
                            alg.format_elem(c)
                        ),
                    );
                }
                for e in alg.elements() {
                    checks += 1;
                    let join = alg.join(c, e);
                    if ht[join as usize] != ht[c as usize].min(ht[e as usize]) {
                        return (
                            false,
                            format!(
                                "algebra {ai}, d={}: ht({} | {}) is not the minimum",
                                alg.format_elem(d),
                                alg.format_elem(c),
                                alg.format_elem(e)
                            ),
                        );
                    }
                }
            }
            // Every stage set is an ideal, through the top stage and beyond.
            let mut gammas: Vec<Height> =
                (0..=alg.size() as u32 + 1).map(Height::Fin).collect();
            gammas.push(Height::Inf);
            for gamma in gammas {
                let m = wellfound::m_ideal(alg, d, gamma);
                if let Some(v) = wellfound::is_ideal(alg, &m) {
                    return (
                        false,
                        format!(
                            "algebra {ai}, d={}: stage {gamma} is not an ideal: {v:?}",
                            alg.format_elem(d)
                        ),
                    );
                }
            }
        }
    }
    (
        true,
        format!("{} join/climb checks across {} algebras", checks, algebras.len()),
    )
}

// ---------------------------------------------------------------------------
// 5: representation over ultrafilters reproduces every operator and stage
// ---------------------------------------------------------------------------

fn representation_laws(seed: u64) -> (bool, String) {
    let algebras = corpus_algebras(seed);
    let mut levels = 0usize;
    for (ai, alg) in algebras.iter().enumerate() {
        let report = stone::verify_representation(alg);
        levels += report.levels_checked as usize;
        if let Some(v) = report.violations.first() {
            return (false, format!("algebra {ai}: {}", v.describe(alg)));
        }
        let completion = stone::completion_embed(alg);
        if !completion.is_valid() {
            return (
                false,
                format!("algebra {ai}: completion not an isomorphism: {completion:?}"),
            );
        }
    }
    (
        true,
        format!(
            "{} hierarchy levels across {} algebras, completions isomorphic",
            levels,
            algebras.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 6: the decision procedure accepts every axiom schema and refutes
//    the classic non-theorems with verified countermodels
// ---------------------------------------------------------------------------

/// Instantiate each axiom schema with the given formulas and agent.
fn schema_instances(phi: &Formula, psi: &Formula, i: AgentId, agents: AgentId) -> Vec<Formula> {
    use syntax::{and, common, everyone, imp, knows};
    let p = || phi.clone();
    let q = || psi.clone();
    vec![
        // A tautology shape over both formulas.
        imp(p(), imp(q(), p())),
        imp(knows(i, imp(p(), q())), imp(knows(i, p()), knows(i, q()))),
        imp(knows(i, p()), knows(i, knows(i, p()))),
        imp(knows(i, p()), p()),
        imp(common(imp(p(), q())), imp(common(p()), common(q()))),
        imp(
            common(p()),
            and(everyone(agents, p()), everyone(agents, common(p()))),
        ),
        imp(
            and(
                everyone(agents, p()),
                common(imp(p(), everyone(agents, p()))),
            ),
            common(p()),
        ),
    ]
}

fn decision_on_schemas(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6001);
    let mut config = DecideConfig::new(2);
    config.max_closure = 64;
    config.max_sets = 1 << 20;
    let mut instances = 0usize;
    for round in 0..500 {
        let dp = rng.gen_range(0..=3);
        let dq = rng.gen_range(0..=3);
        let phi = random_formula(&mut rng, dp, 2, 2);
        let psi = random_formula(&mut rng, dq, 2, 2);
        let agent = rng.gen_range(0..2);
        for (k, inst) in schema_instances(&phi, &psi, agent, 2).into_iter().enumerate() {
            instances += 1;
            match decide::decide_valid(&inst, &config) {
                Ok(Verdict::Valid) => {}
                Ok(Verdict::Invalid(_)) => {
                    return (
                        false,
                        format!(
                            "round {round}: schema {k} instance judged invalid: {}",
                            syntax::render(&inst, 2)
                        ),
                    );
                }
                Err(e) => {
                    return (
                        false,
                        format!("round {round}: schema {k} instance hit a cap: {e}"),
                    );
                }
            }
        }
    }
    for text in ["C p0 -> p0", "C p0 -> C C p0"] {
        let f = syntax::parse(text, 2).expect("fixed formula parses");
        match decide::decide_valid(&f, &config) {
            Ok(Verdict::Valid) => {}
            other => return (false, format!("'{text}' should be valid, got {other:?}")),
        }
    }
    for text in ["p0 -> C p0", "E p0 -> C p0", "box0 p0 -> box1 p0"] {
        let f = syntax::parse(text, 2).expect("fixed formula parses");
        match decide::decide_valid(&f, &config) {
            Ok(Verdict::Invalid(cm)) => {
                if !cm.model.validate().is_valid() {
                    return (false, format!("countermodel for '{text}' breaks frame laws"));
                }
                match cm.model.satisfies(cm.world, &f) {
                    Ok(false) => {}
                    other => {
                        return (
                            false,
                            format!("countermodel for '{text}' does not refute it: {other:?}"),
                        )
                    }
                }
            }
            other => return (false, format!("'{text}' should be refuted, got {other:?}")),
        }
    }
    (true, format!("{instances} schema instances valid, 2 theorems, 3 refutations verified"))
}

// ---------------------------------------------------------------------------
// 7: accepted certificates never lose algebraic truth
// ---------------------------------------------------------------------------

fn certificate_soundness(seed: u64) -> (bool, String) {
    let algebras: Vec<FiniteAlgebra> = corpus_algebras(seed)
        .into_iter()
        .filter(|a| a.agent_count() == 2)
        .collect();
    let mut swept = 0usize;
    for golden in fixtures::golden_certs() {
        let node = match prooftree::parse_cert(golden.cert, 2) {
            Ok(n) => n,
            Err(e) => return (false, format!("{}: unreadable: {e}", golden.name)),
        };
        let sigma: Vec<Formula> = golden
            .sigma
            .iter()
            .map(|s| syntax::parse(s, 2).expect("stored assumptions parse"))
            .collect();
        match prooftree::soundness_sweep(&node, &sigma, 2, &algebras) {
            Ok(report) => {
                swept += report.assignments_checked;
                if let Some(v) = report.violations.first() {
                    return (
                        false,
                        format!(
                            "{}: conclusion drops below 1 on algebra {} at {:?}",
                            golden.name, v.algebra, v.assignment
                        ),
                    );
                }
            }
            Err(e) => return (false, format!("{}: rejected: {e}", golden.name)),
        }
    }
    (
        true,
        format!(
            "{} assignments swept over {} two-agent algebras x {} certificates",
            swept,
            algebras.len(),
            fixtures::golden_certs().len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 8: the three pipelines agree on a corpus of consequence problems
// ---------------------------------------------------------------------------

/// All reflexive-transitive relations on `n` points, as successor-row
/// bitmasks.
pub fn preorders(n: usize) -> Vec<[u8; 4]> {
    assert!((1..=4).contains(&n));
    let off_diag: Vec<(usize, usize)> = (0..n)
        .flat_map(|w| (0..n).filter(move |&v| v != w).map(move |v| (w, v)))
        .collect();
    let mut out = Vec::new();
    for bits in 0u32..(1 << off_diag.len()) {
        let mut rows = [0u8; 4];
        for (w, row) in rows.iter_mut().enumerate().take(n) {
            *row = 1 << w;
        }
        for (k, &(w, v)) in off_diag.iter().enumerate() {
            if bits & (1 << k) != 0 {
                rows[w] |= 1 << v;
            }
        }
        let transitive = (0..n).all(|w| {
            let mut reach = rows[w];
            for v in 0..n {
                if rows[w] & (1 << v) != 0 {
                    reach |= rows[v];
                }
            }
            reach == rows[w]
        });
        if transitive {
            out.push(rows);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn go(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            go(k + 1, items, out);
            items.swap(k, i);
        }
    }
    go(0, &mut items, &mut out);
    out
}

fn relabel(rows: &[u8; 4], n: usize, p: &[usize]) -> [u8; 4] {
    let mut out = [0u8; 4];
    for w in 0..n {
        let mut m = 0u8;
        for v in 0..n {
            if rows[w] & (1 << v) != 0 {
                m |= 1 << p[v];
            }
        }
        out[p[w]] = m;
    }
    out
}

/// Is this relation pair the lexicographically least member of its orbit
/// under simultaneous relabelling? Truth of any formula anywhere is
/// invariant under relabelling both relations together, so one member per
/// orbit suffices for exhaustive refutation search.
fn canonical_pair(r0: &[u8; 4], r1: &[u8; 4], n: usize, perms: &[Vec<usize>]) -> bool {
    for p in perms {
        let a = relabel(r0, n, p);
        let b = relabel(r1, n, p);
        if (a, b) < (*r0, *r1) {
            return false;
        }
    }
    true
}

/// Truth-set tables for one two-agent frame: `boxtab[i][m]` is the set of
/// worlds whose agent-`i` successors all lie in `m`, and `ctab[m]` the set
/// whose all-agent reachability cones lie in `m`.
struct FrameTables {
    n: usize,
    boxtab: [Vec<u16>; 2],
    ctab: Vec<u16>,
}

fn frame_tables(r0: &[u8; 4], r1: &[u8; 4], n: usize) -> FrameTables {
    let masks = 1usize << n;
    // Reachability under the union, closed transitively; rows are
    // reflexive so the cone includes the world itself.
    let mut s = [0u8; 4];
    for w in 0..n {
        s[w] = r0[w] | r1[w];
    }
    loop {
        let mut changed = false;
        for w in 0..n {
            let mut next = s[w];
            for v in 0..n {
                if s[w] & (1 << v) != 0 {
                    next |= s[v];
                }
            }
            if next != s[w] {
                s[w] = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let table = |rows: &[u8; 4]| -> Vec<u16> {
        (0..masks)
            .map(|m| {
                let mut set = 0u16;
                for w in 0..n {
                    if rows[w] as usize & !m == 0 {
                        set |= 1 << w;
                    }
                }
                set
            })
            .collect()
    };
    FrameTables {
        n,
        boxtab: [table(r0), table(r1)],
        ctab: table(&s),
    }
}

/// A consequence problem drawn for the agreement corpus.
struct TripleCase {
    sigma: Vec<Formula>,
    gamma: Vec<Formula>,
    f: Formula,
    sigma_idx: Vec<usize>,
    gamma_idx: Vec<usize>,
    f_idx: usize,
}

/// Flattened formula DAG over the union of all subformulas, children
/// resolved to indices; nodes are ordered so children precede parents.
enum DagOp {
    Var(u32),
    Bot,
    Imp(usize, usize),
    Box(AgentId, usize),
    C(usize),
}

fn build_dag(all: &[Formula]) -> (Vec<Formula>, Vec<DagOp>) {
    let mut set: std::collections::BTreeSet<Formula> = std::collections::BTreeSet::new();
    for f in all {
        set.extend(syntax::subformulas(f));
    }
    let mut nodes: Vec<Formula> = set.into_iter().collect();
    nodes.sort_by_key(|f| f.size());
    let index: std::collections::HashMap<&Formula, usize> =
        nodes.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let ops = nodes
        .iter()
        .map(|f| match f {
            Formula::Var(v) => DagOp::Var(*v),
            Formula::Bot => DagOp::Bot,
            Formula::Imp(a, b) => DagOp::Imp(index[&**a], index[&**b]),
            Formula::Box(i, a) => DagOp::Box(*i, index[&**a]),
            Formula::C(a) => DagOp::C(index[&**a]),
        })
        .collect();
    (nodes, ops)
}

fn eval_dag(ops: &[DagOp], ft: &FrameTables, v0: u16, v1: u16, out: &mut Vec<u16>) {
    let full = (1u16 << ft.n) - 1;
    out.clear();
    for op in ops {
        let val = match op {
            DagOp::Var(0) => v0,
            DagOp::Var(_) => v1,
            DagOp::Bot => 0,
            DagOp::Imp(a, b) => (!out[*a] | out[*b]) & full,
            DagOp::Box(i, a) => ft.boxtab[*i as usize][out[*a] as usize],
            DagOp::C(a) => ft.ctab[out[*a] as usize],
        };
        out.push(val);
    }
}

/// Union of the closures of every formula in the triple.
fn triple_closure_size(sigma: &[Formula], gamma: &[Formula], f: &Formula) -> usize {
    let mut set: std::collections::BTreeSet<Formula> = std::collections::BTreeSet::new();
    for g in sigma.iter().chain(gamma.iter()).chain(std::iter::once(f)) {
        set.extend(syntax::closure(g, 2).iter().cloned());
    }
    set.len()
}

fn gen_triples<R: Rng>(rng: &mut R, count: usize) -> Vec<TripleCase> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let ns = rng.gen_range(0..=2);
        let ng = rng.gen_range(0..=2);
        let draw = |rng: &mut R| {
            let depth = rng.gen_range(0..=2);
            random_formula(rng, depth, 2, 2)
        };
        let sigma: Vec<Formula> = (0..ns).map(|_| draw(rng)).collect();
        let gamma: Vec<Formula> = (0..ng).map(|_| draw(rng)).collect();
        let f = draw(rng);
        if triple_closure_size(&sigma, &gamma, &f) > 8 {
            continue;
        }
        out.push(TripleCase {
            sigma,
            gamma,
            f,
            sigma_idx: Vec::new(),
            gamma_idx: Vec::new(),
            f_idx: 0,
        });
    }
    out
}

fn pipeline_agreement(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x8001);
    let mut triples = gen_triples(&mut rng, 100);
    let config = DecideConfig::new(2);

    // Pipeline one: the decision procedure.
    let mut verdicts = Vec::with_capacity(triples.len());
    for (ti, t) in triples.iter().enumerate() {
        match decide::derives_mixed(&t.sigma, &t.gamma, &t.f, &config) {
            Ok(v) => verdicts.push(v),
            Err(e) => return (false, format!("triple {ti}: decision hit a cap: {e}")),
        }
    }

    // Pipeline two: exhaustive refutation search over small frames. One
    // representative per relabelling orbit is enough, and each verdict
    // `Invalid` must be backed by its extracted countermodel anyway.
    let all: Vec<Formula> = triples
        .iter()
        .flat_map(|t| {
            t.sigma
                .iter()
                .chain(t.gamma.iter())
                .chain(std::iter::once(&t.f))
                .cloned()
        })
        .collect();
    let (nodes, ops) = build_dag(&all);
    let lookup: std::collections::HashMap<&Formula, usize> =
        nodes.iter().enumerate().map(|(i, f)| (f, i)).collect();
    for t in triples.iter_mut() {
        t.sigma_idx = t.sigma.iter().map(|g| lookup[g]).collect();
        t.gamma_idx = t.gamma.iter().map(|g| lookup[g]).collect();
        t.f_idx = lookup[&t.f];
    }
    let expected_counts = [1usize, 4, 29, 355];
    let mut refuted = vec![false; triples.len()];
    let mut frames = 0usize;
    let mut vals = Vec::with_capacity(ops.len());
    for n in 1..=4usize {
        let pre = preorders(n);
        if pre.len() != expected_counts[n - 1] {
            return (
                false,
                format!(
                    "preorder count on {n} points is {}, expected {}",
                    pre.len(),
                    expected_counts[n - 1]
                ),
            );
        }
        let perms = permutations(n);
        let full = (1u16 << n) - 1;
        for r0 in &pre {
            for r1 in &pre {
                if !canonical_pair(r0, r1, n, &perms) {
                    continue;
                }
                frames += 1;
                let ft = frame_tables(r0, r1, n);
                for v0 in 0..=full {
                    for v1 in 0..=full {
                        eval_dag(&ops, &ft, v0, v1, &mut vals);
                        for (ti, t) in triples.iter().enumerate() {
                            if refuted[ti] {
                                continue;
                            }
                            if t.sigma_idx.iter().any(|&i| vals[i] != full) {
                                continue;
                            }
                            let mut worlds = full;
                            for &gi in &t.gamma_idx {
                                worlds &= vals[gi];
                            }
                            if worlds & !vals[t.f_idx] != 0 {
                                refuted[ti] = true;
                            }
                        }
                    }
                }
            }
        }
    }

    // Pipeline three: algebraic consequence on the two-agent corpus.
    let algebras: Vec<FiniteAlgebra> = corpus_algebras(seed)
        .into_iter()
        .filter(|a| a.agent_count() == 2)
        .collect();

    let mut valid_count = 0usize;
    for (ti, t) in triples.iter().enumerate() {
        let mut vars: Vec<u32> = Vec::new();
        for g in t.sigma.iter().chain(t.gamma.iter()).chain(std::iter::once(&t.f)) {
            vars.extend(g.vars());
        }
        vars.sort_unstable();
        vars.dedup();
        match &verdicts[ti] {
            Verdict::Valid => {
                valid_count += 1;
                if refuted[ti] {
                    return (
                        false,
                        format!(
                            "triple {ti} judged valid but a frame of at most 4 worlds refutes it"
                        ),
                    );
                }
                for (ai, alg) in algebras.iter().enumerate() {
                    if let Some(assignment) =
                        algebraic_counterexample(alg, &vars, &t.sigma, &t.gamma, &t.f)
                    {
                        return (
                            false,
                            format!(
                                "triple {ti} judged valid but algebra {ai} refutes it at {assignment:?}"
                            ),
                        );
                    }
                }
            }
            Verdict::Invalid(cm) => {
                if !cm.model.validate().is_valid() {
                    return (false, format!("triple {ti}: countermodel breaks frame laws"));
                }
                for s in &t.sigma {
                    if !cm.model.globally_true(s).expect("countermodel evaluates") {
                        return (
                            false,
                            format!("triple {ti}: countermodel loses a global premise"),
                        );
                    }
                }
                for g in &t.gamma {
                    if !cm
                        .model
                        .satisfies(cm.world, g)
                        .expect("countermodel evaluates")
                    {
                        return (
                            false,
                            format!("triple {ti}: countermodel loses a local premise"),
                        );
                    }
                }
                if cm.model.satisfies(cm.world, &t.f).expect("countermodel evaluates") {
                    return (
                        false,
                        format!("triple {ti}: countermodel satisfies the conclusion"),
                    );
                }
                // The countermodel transposes to an algebraic counterexample.
                let space = match stone::alexandrov_space(&cm.model) {
                    Ok(s) => s,
                    Err(e) => {
                        return (
                            false,
                            format!("triple {ti}: countermodel with {} worlds does not fit a space: {e}", cm.model.world_count()),
                        )
                    }
                };
                let alg = stone::powerset_algebra(&space);
                let assignment: BTreeMap<u32, Elem> = vars
                    .iter()
                    .map(|&v| {
                        let mask = cm
                            .model
                            .valuation()
                            .get(&v)
                            .map(|set| set.ones().fold(0u64, |acc, w| acc | (1 << w)))
                            .unwrap_or(0);
                        (v, mask)
                    })
                    .collect();
                let outcome =
                    algebra::algebraic_consequence(&alg, &assignment, &t.sigma, &t.gamma, &t.f)
                        .expect("powerset transposition evaluates");
                if outcome.holds {
                    return (
                        false,
                        format!("triple {ti}: powerset transposition fails to refute"),
                    );
                }
            }
        }
    }
    (
        true,
        format!(
            "{} triples ({} valid), {} frame orbits, {} two-agent algebras, zero discrepancies",
            triples.len(),
            valid_count,
            frames,
            algebras.len()
        ),
    )
}

/// Search one algebra exhaustively for an assignment where all of `sigma`
/// is 1 yet the conclusion leaves the filter of `gamma`.
fn algebraic_counterexample(
    alg: &FiniteAlgebra,
    vars: &[u32],
    sigma: &[Formula],
    gamma: &[Formula],
    f: &Formula,
) -> Option<BTreeMap<u32, Elem>> {
    let size = alg.size();
    let mut counters = vec![0usize; vars.len()];
    loop {
        let assignment: BTreeMap<u32, Elem> = vars
            .iter()
            .zip(&counters)
            .map(|(&v, &c)| (v, c as Elem))
            .collect();
        let outcome = algebra::algebraic_consequence(alg, &assignment, sigma, gamma, f)
            .expect("corpus formulas evaluate on two-agent algebras");
        if !outcome.holds {
            return Some(assignment);
        }
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
            return None;
        }
    }
}

// ---------------------------------------------------------------------------
// 9: assumption-free certificates decide valid; single-node mutants die
// ---------------------------------------------------------------------------

fn certificate_mutation_kill(_seed: u64) -> (bool, String) {
    let mut config = DecideConfig::new(2);
    config.max_closure = 64;
    config.max_sets = 1 << 20;
    let mut mutants_total = 0usize;
    let mut decided = 0usize;
    for golden in fixtures::golden_certs() {
        let node = match prooftree::parse_cert(golden.cert, 2) {
            Ok(n) => n,
            Err(e) => return (false, format!("{}: unreadable: {e}", golden.name)),
        };
        let sigma: Vec<Formula> = golden
            .sigma
            .iter()
            .map(|s| syntax::parse(s, 2).expect("stored assumptions parse"))
            .collect();
        if let Err(e) = prooftree::check(&node, &sigma, 2) {
            return (false, format!("{}: rejected: {e}", golden.name));
        }
        if sigma.is_empty() {
            decided += 1;
            let conclusion = syntax::parse(golden.conclusion, 2).expect("stored conclusion parses");
            match decide::decide_valid(&conclusion, &config) {
                Ok(Verdict::Valid) => {}
                other => {
                    return (
                        false,
                        format!("{}: conclusion not decided valid: {other:?}", golden.name),
                    )
                }
            }
        }
        for (k, m) in prooftree::mutants(&node).into_iter().enumerate() {
            mutants_total += 1;
            if prooftree::check(&m, &sigma, 2).is_ok() {
                return (
                    false,
                    format!("{}: mutant {k} still checks", golden.name),
                );
            }
        }
    }
    (
        true,
        format!(
            "{} mutants all rejected, {} assumption-free conclusions decided valid",
            mutants_total, decided
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preorder_counts_match_known_values() {
        assert_eq!(preorders(1).len(), 1);
        assert_eq!(preorders(2).len(), 4);
        assert_eq!(preorders(3).len(), 29);
        assert_eq!(preorders(4).len(), 355);
    }

    #[test]
    fn relabelling_preserves_preorderhood_and_orbits_have_one_canonical() {
        let pre = preorders(3);
        let perms = permutations(3);
        for rows in &pre {
            for p in &perms {
                let r = relabel(rows, 3, p);
                assert!(pre.contains(&r), "relabelling left the preorder family");
            }
        }
        // Count canonical pairs by brute force and by orbit counting.
        let mut canonical = 0usize;
        for r0 in &pre {
            for r1 in &pre {
                if canonical_pair(r0, r1, 3, &perms) {
                    canonical += 1;
                }
            }
        }
        let mut orbits = std::collections::BTreeSet::new();
        for r0 in &pre {
            for r1 in &pre {
                let key = perms
                    .iter()
                    .map(|p| (relabel(r0, 3, p), relabel(r1, 3, p)))
                    .min()
                    .unwrap();
                orbits.insert(key);
            }
        }
        assert_eq!(canonical, orbits.len());
    }

    #[test]
    fn frame_tables_agree_with_model_evaluation() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let pre = preorders(3);
        for _ in 0..25 {
            let r0 = pre[rng.gen_range(0..pre.len())];
            let r1 = pre[rng.gen_range(0..pre.len())];
            let ft = frame_tables(&r0, &r1, 3);
            // Mirror the frame as a model with a random valuation.
            let v0: u16 = rng.gen_range(0..8);
            let v1: u16 = rng.gen_range(0..8);
            let rel = |rows: &[u8; 4]| {
                (0..3)
                    .flat_map(|w| {
                        (0..3)
                            .filter(move |&v| rows[w] & (1 << v) != 0)
                            .map(move |v| (w, v))
                    })
                    .collect::<Vec<_>>()
            };
            let pick = |mask: u16| (0..3).filter(|w| mask & (1 << w) != 0).collect::<Vec<_>>();
            let m = KripkeModel::new(
                (0..3).map(|w| format!("w{w}")).collect(),
                2,
                vec![rel(&r0), rel(&r1)],
                vec![(0, pick(v0)), (1, pick(v1))],
            )
            .unwrap();
            let f = random_formula(&mut rng, 3, 2, 2);
            let (nodes, ops) = build_dag(std::slice::from_ref(&f));
            let mut vals = Vec::new();
            eval_dag(&ops, &ft, v0, v1, &mut vals);
            let idx = nodes.iter().position(|g| *g == f).unwrap();
            let expect = m.eval(&f).unwrap();
            let expect_mask = expect.ones().fold(0u16, |acc, w| acc | (1 << w));
            assert_eq!(vals[idx], expect_mask, "formula {}", syntax::render(&f, 2));
        }
    }

    #[test]
    fn generated_triples_fit_the_closure_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let triples = gen_triples(&mut rng, 40);
        assert_eq!(triples.len(), 40);
        for t in &triples {
            assert!(triple_closure_size(&t.sigma, &t.gamma, &t.f) <= 8);
        }
        // The filter keeps a usable mix of shapes.
        assert!(triples.iter().any(|t| !t.sigma.is_empty()));
        assert!(triples.iter().any(|t| !t.gamma.is_empty()));
    }

    #[test]
    fn fast_criteria_pass_end_to_end() {
        for index in [1, 9] {
            let outcome = run_criterion(index, 7);
            assert!(outcome.passed, "criterion {index}: {}", outcome.detail);
        }
    }

    #[test]
    fn unknown_criterion_reports_range() {
        let outcome = run_criterion(12, 0);
        assert!(!outcome.passed);
        assert!(outcome.detail.contains("1..=9"));
    }
}
