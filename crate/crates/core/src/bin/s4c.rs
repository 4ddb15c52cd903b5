//! Command-line workbench: parse formulas, validate and query models,
//! algebras and spaces, decide validity and consequence, check proof
//! certificates, and run the cross-validation suite.
//!
//! Exit codes: 0 success / valid; 1 semantic negative (invalid, refuted,
//! rejected) with a verifiable artifact written; 2 resource cap hit;
//! 3 input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use s4c::algebra::{self, FiniteAlgebra};
use s4c::decide::{self, DecideConfig, DecideError, Verdict};
use s4c::fixtures;
use s4c::kripke::{self, KripkeModel};
use s4c::prooftree;
use s4c::stone::{self, FiniteTopSpace};
use s4c::suite;
use s4c::syntax::{self, Formula};
use s4c::wellfound;

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "s4c", version, about = "Workbench for multi-agent S4 with common knowledge")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Number of agents formulas may mention.
    #[arg(long, global = true, default_value_t = 2)]
    agents: u8,
    /// Seed for randomized suites; printed with the results.
    #[arg(long, global = true, default_value_t = 0x5EED_2026)]
    seed: u64,
    /// Largest closure the decision procedure accepts.
    #[arg(long, global = true, default_value_t = 24)]
    cap_closure: usize,
    /// Largest candidate-set count the decision procedure stores.
    #[arg(long, global = true, default_value_t = 1 << 16)]
    cap_sets: usize,
    /// Output style: prose, or one `key=value ...` record per line.
    #[arg(long, global = true, value_parser = ["text", "records"], default_value = "text")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print it in primitive and sugared form.
    Parse {
        /// Formula text, e.g. "C p0 -> box1 p0".
        formula: String,
    },
    /// Model-file operations.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Algebra-file operations.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Space-file operations.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Decide validity; on refutation, emit a countermodel.
    Decide {
        formula: String,
        /// Write the countermodel to this file instead of stdout.
        #[arg(long)]
        countermodel: Option<PathBuf>,
    },
    /// Decide whether global and local premises force a conclusion.
    Consequence {
        formula: String,
        /// Globally-true premise; repeatable.
        #[arg(long = "sigma")]
        sigma: Vec<String>,
        /// Locally-true premise; repeatable.
        #[arg(long = "gamma")]
        gamma: Vec<String>,
        /// Write the countermodel to this file instead of stdout.
        #[arg(long)]
        countermodel: Option<PathBuf>,
    },
    /// Proof-certificate operations.
    #[command(subcommand)]
    Proof(ProofCmd),
    /// Run the numbered cross-validation checks.
    Suite {
        /// Run a single check (1-9) instead of all nine.
        #[arg(long)]
        criterion: Option<usize>,
    },
    /// Print a built-in structure, byte-identical across runs.
    Fixture {
        /// One of: a1, a2, m1, s1, s2, taut, nec-asm, omega-top,
        /// omega-two, ind-mixed. Omit with --list to enumerate.
        name: Option<String>,
        #[arg(long)]
        list: bool,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Check the frame laws: reflexivity, transitivity, reachability.
    Validate { file: PathBuf },
    /// Evaluate a formula; succeeds when it holds at every world.
    Check { file: PathBuf, formula: String },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Check the interior-operator laws on all three operators.
    Validate { file: PathBuf },
    /// Compare the stored C against its greatest-fixed-point definition.
    Gfp { file: PathBuf },
    /// Print per-target height tables and the algebra height.
    Heights { file: PathBuf },
    /// Check standardness, by graph search and order-theoretically.
    Standard { file: PathBuf },
    /// Verify the canonical representation over ultrafilters.
    Represent { file: PathBuf },
    /// Check that the canonical embedding is an isomorphism.
    Complete { file: PathBuf },
}

#[derive(Subcommand)]
enum SpaceCmd {
    /// Build the powerset algebra of a space.
    ToAlgebra {
        file: PathBuf,
        /// Write the algebra to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ProofCmd {
    /// Check a certificate; print the conclusion it establishes.
    Check {
        file: PathBuf,
        /// Assumption the certificate may use; repeatable.
        #[arg(long = "sigma")]
        sigma: Vec<String>,
    },
}

/// One output record: a named kind plus `field=value` pairs. Text mode
/// prints the prose line; records mode prints the fields.
struct Record {
    kind: &'static str,
    fields: Vec<(&'static str, String)>,
    prose: String,
}

impl Record {
    fn new(kind: &'static str, prose: impl Into<String>) -> Self {
        Record {
            kind,
            fields: Vec::new(),
            prose: prose.into(),
        }
    }

    fn field(mut self, name: &'static str, value: impl ToString) -> Self {
        self.fields.push((name, value.to_string()));
        self
    }
}

struct Output {
    records: bool,
}

/// Write to stdout; when the downstream reader has closed the pipe, die
/// the way a signal would instead of panicking.
fn print_raw(text: &str) {
    use std::io::Write;
    if std::io::stdout().write_all(text.as_bytes()).is_err() {
        std::process::exit(141);
    }
}

impl Output {
    fn emit(&self, r: Record) {
        if self.records {
            let mut line = format!("kind={}", r.kind);
            for (name, value) in &r.fields {
                let quoted = if value.contains([' ', '"']) || value.is_empty() {
                    format!("{value:?}")
                } else {
                    value.clone()
                };
                let _ = write!(line, " {name}={quoted}");
            }
            line.push('\n');
            print_raw(&line);
        } else {
            print_raw(&r.prose);
            print_raw("\n");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output {
        records: cli.global.format == "records",
    };
    match run(&cli.global, cli.command, &out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            out.emit(
                Record::new("error", format!("error: {}", e.message))
                    .field("message", &e.message),
            );
            ExitCode::from(e.code)
        }
    }
}

/// Failure that aborts the subcommand, with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
}

fn parse_formula(text: &str, agents: u8) -> Result<Formula, Failure> {
    syntax::parse(text, agents).map_err(|e| input_error(format!("bad formula '{text}': {e}")))
}

fn load_model(path: &Path) -> Result<KripkeModel, Failure> {
    kripke::parse_model(&read_file(path)?)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Result<FiniteAlgebra, Failure> {
    algebra::parse_algebra(&read_file(path)?)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<FiniteTopSpace, Failure> {
    stone::parse_space(&read_file(path)?)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn decide_failure(e: DecideError) -> Failure {
    let code = match e {
        DecideError::AgentOutOfRange { .. } => EXIT_INPUT,
        DecideError::ClosureTooLarge { .. } | DecideError::TooManySets { .. } => EXIT_RESOURCE,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn run(global: &Global, command: Command, out: &Output) -> Result<u8, Failure> {
    if global.agents == 0 {
        return Err(input_error("--agents must be at least 1"));
    }
    let agents = global.agents;
    let mut config = DecideConfig::new(agents);
    config.max_closure = global.cap_closure;
    config.max_sets = global.cap_sets;

    match command {
        Command::Parse { formula } => {
            let f = parse_formula(&formula, agents)?;
            out.emit(
                Record::new(
                    "formula",
                    format!(
                        "parsed: {}\nprimitive: {}",
                        syntax::render(&f, agents),
                        syntax::render_exact(&f)
                    ),
                )
                .field("sugared", syntax::render(&f, agents))
                .field("primitive", syntax::render_exact(&f))
                .field("size", f.size())
                .field("closure", syntax::closure(&f, agents).len()),
            );
            Ok(EXIT_OK)
        }

        Command::Model(cmd) => run_model(cmd, out),
        Command::Algebra(cmd) => run_algebra(cmd, out),
        Command::Space(cmd) => run_space(cmd, out),

        Command::Decide {
            formula,
            countermodel,
        } => {
            let f = parse_formula(&formula, agents)?;
            let verdict = decide::decide_valid(&f, &config).map_err(decide_failure)?;
            finish_verdict(verdict, &f, countermodel.as_deref(), out)
        }

        Command::Consequence {
            formula,
            sigma,
            gamma,
            countermodel,
        } => {
            let f = parse_formula(&formula, agents)?;
            let sigma = parse_all(&sigma, agents)?;
            let gamma = parse_all(&gamma, agents)?;
            let verdict =
                decide::derives_mixed(&sigma, &gamma, &f, &config).map_err(decide_failure)?;
            match &verdict {
                Verdict::Invalid(cm) => {
                    // The countermodel must hold the premises where promised.
                    for s in &sigma {
                        let ok = cm.model.globally_true(s).map_err(|e| input_error(e.to_string()))?;
                        if !ok {
                            return Err(Failure {
                                code: EXIT_INPUT,
                                message: "internal: countermodel loses a global premise".into(),
                            });
                        }
                    }
                    for g in &gamma {
                        let ok = cm
                            .model
                            .satisfies(cm.world, g)
                            .map_err(|e| input_error(e.to_string()))?;
                        if !ok {
                            return Err(Failure {
                                code: EXIT_INPUT,
                                message: "internal: countermodel loses a local premise".into(),
                            });
                        }
                    }
                }
                Verdict::Valid => {}
            }
            finish_verdict(verdict, &f, countermodel.as_deref(), out)
        }

        Command::Proof(ProofCmd::Check { file, sigma }) => {
            let text = read_file(&file)?;
            let sigma = parse_all(&sigma, agents)?;
            let node = prooftree::parse_cert(&text, agents)
                .map_err(|e| input_error(format!("{}: {e}", file.display())))?;
            match prooftree::check(&node, &sigma, agents) {
                Ok(()) => {
                    out.emit(
                        Record::new(
                            "proof",
                            format!(
                                "accepted: proves {}",
                                syntax::render(node.formula(), agents)
                            ),
                        )
                        .field("accepted", true)
                        .field("conclusion", syntax::render(node.formula(), agents))
                        .field("nodes", node.node_count()),
                    );
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    out.emit(
                        Record::new("proof", format!("rejected: {e}"))
                            .field("accepted", false)
                            .field("reason", e.to_string()),
                    );
                    Ok(EXIT_NEGATIVE)
                }
            }
        }

        Command::Suite { criterion } => {
            let outcomes = match criterion {
                Some(i) => {
                    if !(1..=suite::CRITERIA.len()).contains(&i) {
                        return Err(input_error(format!(
                            "no criterion {i}; valid range is 1..={}",
                            suite::CRITERIA.len()
                        )));
                    }
                    vec![suite::run_criterion(i, global.seed)]
                }
                None => suite::run_all(global.seed),
            };
            out.emit(
                Record::new("suite", format!("seed {}", global.seed)).field("seed", global.seed),
            );
            let mut all = true;
            for o in &outcomes {
                all &= o.passed;
                out.emit(
                    Record::new(
                        "criterion",
                        format!(
                            "[{}] criterion {} ({}) in {} ms: {}",
                            if o.passed { "pass" } else { "FAIL" },
                            o.index,
                            o.name,
                            o.millis,
                            o.detail
                        ),
                    )
                    // No timing field: records are byte-stable per seed.
                    .field("index", o.index)
                    .field("name", o.name)
                    .field("passed", o.passed)
                    .field("detail", &o.detail),
                );
            }
            Ok(if all { EXIT_OK } else { EXIT_NEGATIVE })
        }

        Command::Fixture { name, list, out: out_path } => {
            let table: &[(&str, &str)] = &[
                ("a1", fixtures::A1_ALG),
                ("a2", fixtures::A2_ALG),
                ("m1", fixtures::M1_MODEL),
                ("s1", fixtures::S1_SPACE),
                ("s2", fixtures::S2_SPACE),
                ("taut", fixtures::CERT_TAUT),
                ("nec-asm", fixtures::CERT_NEC_ASM),
                ("omega-top", fixtures::CERT_OMEGA_TOP),
                ("omega-two", fixtures::CERT_OMEGA_TWO),
                ("ind-mixed", fixtures::CERT_IND_MIXED),
            ];
            if list {
                for (n, _) in table {
                    out.emit(Record::new("fixture", *n).field("name", n));
                }
                return Ok(EXIT_OK);
            }
            let name = name.ok_or_else(|| input_error("give a fixture name or --list"))?;
            let text = table
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, t)| *t)
                .ok_or_else(|| input_error(format!("unknown fixture '{name}'")))?;
            match out_path {
                Some(p) => write_file(&p, text)?,
                None => print_raw(text),
            }
            Ok(EXIT_OK)
        }
    }
}

fn parse_all(texts: &[String], agents: u8) -> Result<Vec<Formula>, Failure> {
    texts.iter().map(|t| parse_formula(t, agents)).collect()
}

/// Report a verdict; on refutation, write the countermodel artifact.
fn finish_verdict(
    verdict: Verdict,
    f: &Formula,
    countermodel: Option<&Path>,
    out: &Output,
) -> Result<u8, Failure> {
    match verdict {
        Verdict::Valid => {
            out.emit(
                Record::new("verdict", "valid")
                    .field("verdict", "valid")
                    .field("formula", syntax::render_exact(f)),
            );
            Ok(EXIT_OK)
        }
        Verdict::Invalid(cm) => {
            let world = cm.model.world_name(cm.world).to_owned();
            let text = kripke::write_model(&cm.model);
            match countermodel {
                Some(path) => {
                    write_file(path, &text)?;
                    out.emit(
                        Record::new(
                            "verdict",
                            format!(
                                "invalid: countermodel with {} worlds written to {}, refuted at {world}",
                                cm.model.world_count(),
                                path.display()
                            ),
                        )
                        .field("verdict", "invalid")
                        .field("formula", syntax::render_exact(f))
                        .field("world", &world)
                        .field("countermodel", path.display()),
                    );
                }
                None => {
                    out.emit(
                        Record::new("verdict", format!("invalid: refuted at {world}"))
                            .field("verdict", "invalid")
                            .field("formula", syntax::render_exact(f))
                            .field("world", &world),
                    );
                    print_raw(&text);
                }
            }
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn run_model(cmd: ModelCmd, out: &Output) -> Result<u8, Failure> {
    match cmd {
        ModelCmd::Validate { file } => {
            let m = load_model(&file)?;
            let report = m.validate();
            if report.is_valid() {
                out.emit(
                    Record::new(
                        "model",
                        format!(
                            "valid: {} worlds, {} agents",
                            m.world_count(),
                            m.agent_count()
                        ),
                    )
                    .field("valid", true)
                    .field("worlds", m.world_count())
                    .field("agents", m.agent_count()),
                );
                Ok(EXIT_OK)
            } else {
                for v in &report.violations {
                    out.emit(
                        Record::new("violation", format!("violation: {}", v.describe(&m)))
                            .field("describe", v.describe(&m)),
                    );
                }
                Ok(EXIT_NEGATIVE)
            }
        }
        ModelCmd::Check { file, formula } => {
            let m = load_model(&file)?;
            // The file states its own agent count; the formula must fit it.
            let f = parse_formula(&formula, m.agent_count())?;
            let set = m.eval(&f).map_err(|e| input_error(e.to_string()))?;
            let holding: Vec<&str> = set.ones().map(|w| m.world_name(w)).collect();
            let all = holding.len() == m.world_count();
            let first_failing = (0..m.world_count())
                .find(|&w| !set.contains(w))
                .map(|w| m.world_name(w).to_owned());
            let mut rec = Record::new(
                "check",
                if all {
                    format!("holds at every world: {}", holding.join(" "))
                } else {
                    format!(
                        "fails at {}: holds only at [{}]",
                        first_failing.clone().unwrap_or_default(),
                        holding.join(" ")
                    )
                },
            )
            .field("global", all)
            .field("holds_at", holding.join(","));
            if let Some(w) = &first_failing {
                rec = rec.field("fails_at", w);
            }
            out.emit(rec);
            Ok(if all { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

fn run_algebra(cmd: AlgebraCmd, out: &Output) -> Result<u8, Failure> {
    match cmd {
        AlgebraCmd::Validate { file } => {
            let alg = load_algebra(&file)?;
            let report = alg.validate();
            if report.is_valid() {
                out.emit(
                    Record::new(
                        "algebra",
                        format!("valid: {} elements, {} agents", alg.size(), alg.agent_count()),
                    )
                    .field("valid", true)
                    .field("elements", alg.size())
                    .field("agents", alg.agent_count()),
                );
                Ok(EXIT_OK)
            } else {
                for v in &report.violations {
                    out.emit(
                        Record::new("violation", format!("violation: {}", v.describe(&alg)))
                            .field("describe", v.describe(&alg)),
                    );
                }
                Ok(EXIT_NEGATIVE)
            }
        }
        AlgebraCmd::Gfp { file } => {
            let alg = load_algebra(&file)?;
            let mut disagreements = 0usize;
            for a in alg.elements() {
                let gfp = alg.gfp_ce(a);
                let c = alg.c_op(a);
                out.emit(
                    Record::new(
                        "gfp",
                        format!(
                            "C {} = {} (fixed point {})",
                            alg.format_elem(a),
                            alg.format_elem(c),
                            alg.format_elem(gfp),
                        ),
                    )
                    .field("elem", alg.format_elem(a))
                    .field("c", alg.format_elem(c))
                    .field("gfp", alg.format_elem(gfp))
                    .field("agree", gfp == c),
                );
                if gfp != c {
                    disagreements += 1;
                }
            }
            Ok(if disagreements == 0 { EXIT_OK } else { EXIT_NEGATIVE })
        }
        AlgebraCmd::Heights { file } => {
            let alg = load_algebra(&file)?;
            for d in alg.elements() {
                let ht = wellfound::heights(&wellfound::prec_graph(&alg, d));
                let table: Vec<String> = alg
                    .elements()
                    .map(|a| format!("{}:{}", alg.format_elem(a), ht[a as usize]))
                    .collect();
                out.emit(
                    Record::new(
                        "heights",
                        format!(
                            "d = {}: algebra height {}, element heights {}",
                            alg.format_elem(d),
                            wellfound::ht_algebra(&alg, d),
                            table.join(" ")
                        ),
                    )
                    .field("d", alg.format_elem(d))
                    .field("algebra_height", wellfound::ht_algebra(&alg, d))
                    .field("elems", table.join(",")),
                );
            }
            Ok(EXIT_OK)
        }
        AlgebraCmd::Standard { file } => {
            let alg = load_algebra(&file)?;
            let graph = wellfound::check_standard(&alg);
            let order = algebra::check_standard_sigma(&alg);
            let standard = graph.standard && order.standard;
            let mut rec = Record::new(
                "standard",
                format!("standard={standard} (graph {}, order {})", graph.standard, order.standard),
            )
            .field("standard", standard)
            .field("graph", graph.standard)
            .field("order", order.standard);
            if let Some((d, b)) = order.witness {
                rec = rec
                    .field("witness_d", alg.format_elem(d))
                    .field("witness_b", alg.format_elem(b));
            }
            out.emit(rec);
            for b in &graph.breaks {
                out.emit(Record::new("break", format!("break: {b:?}")).field("debug", format!("{b:?}")));
            }
            Ok(if standard { EXIT_OK } else { EXIT_NEGATIVE })
        }
        AlgebraCmd::Represent { file } => {
            let alg = load_algebra(&file)?;
            let report = stone::verify_representation(&alg);
            if report.is_valid() {
                out.emit(
                    Record::new(
                        "representation",
                        format!("faithful: {} hierarchy levels checked", report.levels_checked),
                    )
                    .field("faithful", true)
                    .field("levels", report.levels_checked),
                );
                Ok(EXIT_OK)
            } else {
                for v in &report.violations {
                    out.emit(
                        Record::new("violation", format!("violation: {}", v.describe(&alg)))
                            .field("describe", v.describe(&alg)),
                    );
                }
                Ok(EXIT_NEGATIVE)
            }
        }
        AlgebraCmd::Complete { file } => {
            let alg = load_algebra(&file)?;
            let report = stone::completion_embed(&alg);
            if report.is_valid() {
                out.emit(
                    Record::new("completion", "isomorphism: the algebra is its own completion")
                        .field("isomorphism", true),
                );
                Ok(EXIT_OK)
            } else {
                for v in &report.violations {
                    out.emit(Record::new("violation", format!("violation: {v:?}")).field("debug", format!("{v:?}")));
                }
                Ok(EXIT_NEGATIVE)
            }
        }
    }
}

fn run_space(cmd: SpaceCmd, out: &Output) -> Result<u8, Failure> {
    match cmd {
        SpaceCmd::ToAlgebra { file, out: out_path } => {
            let space = load_space(&file)?;
            let alg = stone::powerset_algebra(&space);
            let text = algebra::write_algebra(&alg);
            out.emit(
                Record::new(
                    "algebra",
                    format!(
                        "powerset algebra: {} elements over {} points",
                        alg.size(),
                        space.point_names().len()
                    ),
                )
                .field("elements", alg.size())
                .field("points", space.point_names().len()),
            );
            match out_path {
                Some(p) => write_file(&p, &text)?,
                None => print_raw(&text),
            }
            Ok(EXIT_OK)
        }
    }
}
