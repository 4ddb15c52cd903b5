//! Formulas, the ASCII grammar, and the Fischer–Ladner-style closure.
//!
//! The primitive connectives are exactly `bot`, `->`, `boxN` and `C`;
//! everything else (`~`, `top`, `&`, `|`, `<->`, `E`) is parsed and printed
//! as sugar over fixed definitions:
//!
//! ```text
//! ~a      := a -> bot
//! top     := ~bot
//! a & b   := ~(a -> ~b)
//! a | b   := ~a -> b
//! a <-> b := (a -> b) & (b -> a)
//! E a     := box0 a & box1 a & ... & box(N-1) a
//! ```
//!
//! `E` therefore depends on the agent count, which is why parsing and
//! sugared printing take one. Agents are numbered from zero.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Agents are small indices `0..agents`.
pub type AgentId = u8;

/// A formula over the primitive connectives. Derived connectives are
/// represented by their definitions, so structural equality is equality
/// up to abbreviation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// Propositional variable `pN`.
    Var(u32),
    /// Falsum.
    Bot,
    /// Material implication, the only primitive binary connective.
    Imp(Box<Formula>, Box<Formula>),
    /// `boxN a`: agent N knows `a`.
    Box(AgentId, Box<Formula>),
    /// `C a`: `a` is common knowledge.
    C(Box<Formula>),
}

/// `pN`.
pub fn var(n: u32) -> Formula {
    Formula::Var(n)
}

/// `bot`.
pub fn bot() -> Formula {
    Formula::Bot
}

/// `a -> b`.
pub fn imp(a: Formula, b: Formula) -> Formula {
    Formula::Imp(Box::new(a), Box::new(b))
}

/// `boxI a`.
pub fn knows(i: AgentId, a: Formula) -> Formula {
    Formula::Box(i, Box::new(a))
}

/// `C a`.
pub fn common(a: Formula) -> Formula {
    Formula::C(Box::new(a))
}

/// `~a`, i.e. `a -> bot`.
pub fn not(a: Formula) -> Formula {
    imp(a, bot())
}

/// `top`, i.e. `~bot`.
pub fn top() -> Formula {
    not(bot())
}

/// `a & b`, i.e. `~(a -> ~b)`.
pub fn and(a: Formula, b: Formula) -> Formula {
    not(imp(a, not(b)))
}

/// `a | b`, i.e. `~a -> b`.
pub fn or(a: Formula, b: Formula) -> Formula {
    imp(not(a), b)
}

/// `a <-> b`, i.e. `(a -> b) & (b -> a)`.
pub fn iff(a: Formula, b: Formula) -> Formula {
    and(imp(a.clone(), b.clone()), imp(b, a))
}

/// `E a` for the given agent count: the conjunction of `boxI a` over all
/// agents, chained to the right in ascending agent order. With one agent
/// this is just `box0 a`.
pub fn everyone(agents: AgentId, a: Formula) -> Formula {
    assert!(agents > 0, "everyone() needs at least one agent");
    let mut f = knows(agents - 1, a.clone());
    for i in (0..agents - 1).rev() {
        f = and(knows(i, a.clone()), f);
    }
    f
}

/// Conjunction of a finite set of formulas in the canonical order: sorted by
/// exact rendering, duplicates dropped, chained to the right. The empty
/// conjunction is `top`.
pub fn big_and(items: &[Formula]) -> Formula {
    let mut sorted: Vec<&Formula> = items.iter().collect();
    sorted.sort_by_key(|a| render_exact(a));
    sorted.dedup();
    match sorted.split_last() {
        None => top(),
        Some((last, init)) => {
            let mut f = (*last).clone();
            for g in init.iter().rev() {
                f = and((*g).clone(), f);
            }
            f
        }
    }
}

impl Formula {
    /// Number of nodes in the syntax tree (primitive connectives).
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Bot => 1,
            Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Box(_, a) | Formula::C(a) => 1 + a.size(),
        }
    }

    /// Variables occurring in the formula, ascending and deduplicated.
    pub fn vars(&self) -> Vec<u32> {
        fn walk(f: &Formula, out: &mut Vec<u32>) {
            match f {
                Formula::Var(n) => out.push(*n),
                Formula::Bot => {}
                Formula::Imp(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Box(_, a) | Formula::C(a) => walk(a, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Largest agent index mentioned by any `box`, if there is one.
    pub fn max_agent(&self) -> Option<AgentId> {
        match self {
            Formula::Var(_) | Formula::Bot => None,
            Formula::Imp(a, b) => a.max_agent().max(b.max_agent()),
            Formula::Box(i, a) => Some((*i).max(a.max_agent().unwrap_or(0))),
            Formula::C(a) => a.max_agent(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_exact(self))
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parse failure, with the byte offset where it happened.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("byte {pos}: agent {agent} out of range (agent count is {agents})")]
    AgentOutOfRange { pos: usize, agent: u32, agents: AgentId },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Arrow,
    IffSym,
    Amp,
    Pipe,
    Tilde,
    BotKw,
    TopKw,
    CKw,
    EKw,
    Var(u32),
    BoxAgent(u32),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            b'&' => {
                toks.push((i, Tok::Amp));
                i += 1;
            }
            b'|' => {
                toks.push((i, Tok::Pipe));
                i += 1;
            }
            b'~' => {
                toks.push((i, Tok::Tilde));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::Arrow));
                    i += 2;
                } else {
                    return Err(ParseError::Syntax {
                        pos: i,
                        msg: "expected '->'".into(),
                    });
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((i, Tok::IffSym));
                    i += 3;
                } else {
                    return Err(ParseError::Syntax {
                        pos: i,
                        msg: "expected '<->'".into(),
                    });
                }
            }
            _ if b.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "bot" => Tok::BotKw,
                    "top" => Tok::TopKw,
                    "C" => Tok::CKw,
                    "E" => Tok::EKw,
                    _ => {
                        if let Some(digits) = word.strip_prefix('p') {
                            Tok::Var(parse_index(digits, start, "variable")?)
                        } else if let Some(digits) = word.strip_prefix("box") {
                            Tok::BoxAgent(parse_index(digits, start, "agent")?)
                        } else {
                            return Err(ParseError::Syntax {
                                pos: start,
                                msg: format!("unknown token '{word}'"),
                            });
                        }
                    }
                };
                toks.push((start, tok));
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos: i,
                    msg: format!("unexpected character '{}'", text[i..].chars().next().unwrap()),
                });
            }
        }
    }
    Ok(toks)
}

fn parse_index(digits: &str, pos: usize, what: &str) -> Result<u32, ParseError> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::Syntax {
            pos,
            msg: format!("malformed {what} index"),
        });
    }
    digits.parse().map_err(|_| ParseError::Syntax {
        pos,
        msg: format!("{what} index out of range"),
    })
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    at: usize,
    end: usize,
    agents: AgentId,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        self.at += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    // <-> binds loosest and associates to the right.
    fn iff_level(&mut self) -> Result<Formula, ParseError> {
        let l = self.imp_level()?;
        if self.peek() == Some(&Tok::IffSym) {
            self.bump();
            let r = self.iff_level()?;
            Ok(iff(l, r))
        } else {
            Ok(l)
        }
    }

    fn imp_level(&mut self) -> Result<Formula, ParseError> {
        let l = self.or_level()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let r = self.imp_level()?;
            Ok(imp(l, r))
        } else {
            Ok(l)
        }
    }

    fn or_level(&mut self) -> Result<Formula, ParseError> {
        let l = self.and_level()?;
        if self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let r = self.or_level()?;
            Ok(or(l, r))
        } else {
            Ok(l)
        }
    }

    fn and_level(&mut self) -> Result<Formula, ParseError> {
        let l = self.unary_level()?;
        if self.peek() == Some(&Tok::Amp) {
            self.bump();
            let r = self.and_level()?;
            Ok(and(l, r))
        } else {
            Ok(l)
        }
    }

    fn unary_level(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(not(self.unary_level()?))
            }
            Some(Tok::CKw) => {
                self.bump();
                Ok(common(self.unary_level()?))
            }
            Some(Tok::EKw) => {
                self.bump();
                Ok(everyone(self.agents, self.unary_level()?))
            }
            Some(Tok::BoxAgent(_)) => {
                let pos = self.pos();
                let Tok::BoxAgent(n) = self.bump() else {
                    unreachable!()
                };
                if n >= self.agents as u32 {
                    return Err(ParseError::AgentOutOfRange {
                        pos,
                        agent: n,
                        agents: self.agents,
                    });
                }
                Ok(knows(n as AgentId, self.unary_level()?))
            }
            _ => self.atom_level(),
        }
    }

    fn atom_level(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::BotKw) => {
                self.bump();
                Ok(bot())
            }
            Some(Tok::TopKw) => {
                self.bump();
                Ok(top())
            }
            Some(Tok::Var(_)) => {
                let Tok::Var(n) = self.bump() else {
                    unreachable!()
                };
                Ok(var(n))
            }
            Some(Tok::LParen) => {
                self.bump();
                let f = self.iff_level()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(f)
                } else {
                    Err(self.err("expected ')'"))
                }
            }
            Some(_) => Err(self.err("expected a formula")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parse a formula from the ASCII grammar. `agents` bounds the `boxN`
/// indices and fixes the expansion of `E`; it must be at least 1.
pub fn parse(text: &str, agents: AgentId) -> Result<Formula, ParseError> {
    assert!(agents > 0, "parse() needs at least one agent");
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        at: 0,
        end: text.len(),
        agents,
    };
    let f = p.iff_level()?;
    if p.at != toks.len() {
        return Err(p.err("trailing input after formula"));
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

// Precedence levels used by the printers. Binary connectives associate to
// the right, so the left operand is printed one level up.
const PREC_IFF: u8 = 0;
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

/// Print using only the primitive connectives. Output reparses to the same
/// tree and is the string used for the canonical formula ordering.
pub fn render_exact(f: &Formula) -> String {
    let mut out = String::new();
    exact_go(f, 0, &mut out);
    out
}

fn exact_go(f: &Formula, min_prec: u8, out: &mut String) {
    match f {
        Formula::Var(n) => {
            out.push('p');
            out.push_str(&n.to_string());
        }
        Formula::Bot => out.push_str("bot"),
        Formula::Imp(a, b) => {
            let paren = PREC_IMP < min_prec;
            if paren {
                out.push('(');
            }
            exact_go(a, PREC_IMP + 1, out);
            out.push_str(" -> ");
            exact_go(b, PREC_IMP, out);
            if paren {
                out.push(')');
            }
        }
        Formula::Box(i, a) => {
            out.push_str("box");
            out.push_str(&i.to_string());
            out.push(' ');
            exact_go(a, PREC_UNARY, out);
        }
        Formula::C(a) => {
            out.push_str("C ");
            exact_go(a, PREC_UNARY, out);
        }
    }
}

/// Recognised sugar at one node, in the order the printer prefers it.
enum Sugar<'a> {
    Top,
    Everyone(&'a Formula),
    Iff(&'a Formula, &'a Formula),
    And(&'a Formula, &'a Formula),
    Not(&'a Formula),
    Or(&'a Formula, &'a Formula),
}

fn match_not(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Imp(a, b) if **b == Formula::Bot => Some(a),
        _ => None,
    }
}

fn match_and(f: &Formula) -> Option<(&Formula, &Formula)> {
    // ~(a -> ~b)
    let inner = match_not(f)?;
    match inner {
        Formula::Imp(a, rhs) => match_not(rhs).map(|b| (&**a, b)),
        _ => None,
    }
}

fn match_iff(f: &Formula) -> Option<(&Formula, &Formula)> {
    let (x, y) = match_and(f)?;
    match (x, y) {
        (Formula::Imp(a, b), Formula::Imp(b2, a2)) if a == a2 && b == b2 => Some((a, b)),
        _ => None,
    }
}

fn match_everyone(f: &Formula, agents: AgentId) -> Option<&Formula> {
    // box0 a & (box1 a & (... & box(N-1) a)); only sugared when N >= 2,
    // since with one agent the expansion is a bare box0.
    if agents < 2 {
        return None;
    }
    let mut rest = f;
    let mut body: Option<&Formula> = None;
    for i in 0..agents {
        let head = if i + 1 == agents {
            rest
        } else {
            let (h, t) = match_and(rest)?;
            rest = t;
            h
        };
        match head {
            Formula::Box(j, a) if *j == i => match body {
                None => body = Some(a),
                Some(b) if b == &**a => {}
                _ => return None,
            },
            _ => return None,
        }
    }
    body
}

fn match_sugar<'a>(f: &'a Formula, agents: AgentId) -> Option<Sugar<'a>> {
    if *f == top() {
        return Some(Sugar::Top);
    }
    if let Some(a) = match_everyone(f, agents) {
        return Some(Sugar::Everyone(a));
    }
    if let Some((a, b)) = match_iff(f) {
        return Some(Sugar::Iff(a, b));
    }
    if let Some((a, b)) = match_and(f) {
        return Some(Sugar::And(a, b));
    }
    if let Some(a) = match_not(f) {
        return Some(Sugar::Not(a));
    }
    if let Formula::Imp(l, b) = f {
        if let Some(a) = match_not(l) {
            return Some(Sugar::Or(a, b));
        }
    }
    None
}

/// Connective spellings, so the sugared printer can emit ASCII or a purely
/// cosmetic Unicode form (the parser only reads ASCII).
struct Style {
    arrow: &'static str,
    iff: &'static str,
    amp: &'static str,
    pipe: &'static str,
    tilde: &'static str,
    bot: &'static str,
    top: &'static str,
    box_kw: &'static str,
}

const ASCII: Style = Style {
    arrow: " -> ",
    iff: " <-> ",
    amp: " & ",
    pipe: " | ",
    tilde: "~",
    bot: "bot",
    top: "top",
    box_kw: "box",
};

const UNICODE: Style = Style {
    arrow: " \u{2192} ",
    iff: " \u{2194} ",
    amp: " \u{2227} ",
    pipe: " \u{2228} ",
    tilde: "\u{00ac}",
    bot: "\u{22a5}",
    top: "\u{22a4}",
    box_kw: "\u{25a1}",
};

/// Print with sugar folded back in. Output reparses to the same tree under
/// the same agent count.
pub fn render(f: &Formula, agents: AgentId) -> String {
    let mut out = String::new();
    sugar_go(f, agents, 0, &ASCII, &mut out);
    out
}

/// Like [`render`] but with Unicode connectives; display only.
pub fn render_pretty(f: &Formula, agents: AgentId) -> String {
    let mut out = String::new();
    sugar_go(f, agents, 0, &UNICODE, &mut out);
    out
}

fn sugar_go(f: &Formula, agents: AgentId, min_prec: u8, st: &Style, out: &mut String) {
    let binary = |prec: u8, a: &Formula, sep: &str, b: &Formula, out: &mut String| {
        let paren = prec < min_prec;
        if paren {
            out.push('(');
        }
        sugar_go(a, agents, prec + 1, st, out);
        out.push_str(sep);
        sugar_go(b, agents, prec, st, out);
        if paren {
            out.push(')');
        }
    };
    match match_sugar(f, agents) {
        Some(Sugar::Top) => out.push_str(st.top),
        Some(Sugar::Everyone(a)) => {
            out.push_str("E ");
            sugar_go(a, agents, PREC_UNARY, st, out);
        }
        Some(Sugar::Iff(a, b)) => binary(PREC_IFF, a, st.iff, b, out),
        Some(Sugar::And(a, b)) => binary(PREC_AND, a, st.amp, b, out),
        Some(Sugar::Not(a)) => {
            out.push_str(st.tilde);
            sugar_go(a, agents, PREC_UNARY, st, out);
        }
        Some(Sugar::Or(a, b)) => binary(PREC_OR, a, st.pipe, b, out),
        None => match f {
            Formula::Var(n) => {
                out.push('p');
                out.push_str(&n.to_string());
            }
            Formula::Bot => out.push_str(st.bot),
            Formula::Imp(a, b) => binary(PREC_IMP, a, st.arrow, b, out),
            Formula::Box(i, a) => {
                out.push_str(st.box_kw);
                out.push_str(&i.to_string());
                out.push(' ');
                sugar_go(a, agents, PREC_UNARY, st, out);
            }
            Formula::C(a) => {
                out.push_str("C ");
                sugar_go(a, agents, PREC_UNARY, st, out);
            }
        },
    }
}

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

/// The subformulas of a formula, deduplicated, in first-visit (preorder)
/// order. A formula is its own subformula.
pub fn subformulas(f: &Formula) -> Vec<Formula> {
    fn walk(f: &Formula, seen: &mut Vec<Formula>) {
        if seen.contains(f) {
            return;
        }
        seen.push(f.clone());
        match f {
            Formula::Var(_) | Formula::Bot => {}
            Formula::Imp(a, b) => {
                walk(a, seen);
                walk(b, seen);
            }
            Formula::Box(_, a) | Formula::C(a) => walk(a, seen),
        }
    }
    let mut seen = Vec::new();
    walk(f, &mut seen);
    seen
}

/// A finite, deduplicated set of formulas closed under subformulas and
/// under unfolding of common knowledge: `C a` brings in `boxI a` and
/// `boxI (C a)` for every agent. Order is the deterministic insertion
/// order of the breadth-first construction.
pub struct ClosureSet {
    formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
    pub agents: AgentId,
}

impl ClosureSet {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.index.contains_key(f)
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn get(&self, i: usize) -> &Formula {
        &self.formulas[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.formulas.iter()
    }
}

/// Closure of a single formula. The result size is bounded by
/// `(1 + 2 * agents) * #subformulas`.
pub fn closure(f: &Formula, agents: AgentId) -> ClosureSet {
    assert!(agents > 0, "closure() needs at least one agent");
    let mut set = ClosureSet {
        formulas: Vec::new(),
        index: HashMap::new(),
        agents,
    };
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(f.clone());
    while let Some(g) = queue.pop_front() {
        if set.index.contains_key(&g) {
            continue;
        }
        set.index.insert(g.clone(), set.formulas.len());
        match &g {
            Formula::Var(_) | Formula::Bot => {}
            Formula::Imp(a, b) => {
                queue.push_back((**a).clone());
                queue.push_back((**b).clone());
            }
            Formula::Box(_, a) => queue.push_back((**a).clone()),
            Formula::C(a) => {
                queue.push_back((**a).clone());
                for i in 0..agents {
                    queue.push_back(knows(i, (**a).clone()));
                    queue.push_back(knows(i, g.clone()));
                }
            }
        }
        set.formulas.push(g);
    }
    debug_assert!(set.len() <= (1 + 2 * agents as usize) * subformulas(f).len());
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use proptest::strategy::ValueTree;

    #[test]
    fn parses_primitives_and_box_scope() {
        let f = parse("box0 (p0 -> C p1)", 2).unwrap();
        assert_eq!(f, knows(0, imp(var(0), common(var(1)))));
        // Without parens the box grabs only the atom.
        let g = parse("box0 p0 -> C p1", 2).unwrap();
        assert_eq!(g, imp(knows(0, var(0)), common(var(1))));
    }

    #[test]
    fn desugars_match_definitions() {
        assert_eq!(parse("~p0", 2).unwrap(), imp(var(0), bot()));
        assert_eq!(parse("top", 2).unwrap(), imp(bot(), bot()));
        assert_eq!(
            parse("p0 & p1", 2).unwrap(),
            imp(imp(var(0), imp(var(1), bot())), bot())
        );
        assert_eq!(parse("p0 | p1", 2).unwrap(), imp(imp(var(0), bot()), var(1)));
        assert_eq!(
            parse("E p0", 2).unwrap(),
            and(knows(0, var(0)), knows(1, var(0)))
        );
        assert_eq!(parse("E p0", 3).unwrap(), everyone(3, var(0)));
        assert_eq!(parse("E p0", 1).unwrap(), knows(0, var(0)));
    }

    #[test]
    fn precedence_and_associativity() {
        // & over |, | over ->, -> over <->; all right-associative.
        assert_eq!(
            parse("p0 & p1 | p2", 2).unwrap(),
            or(and(var(0), var(1)), var(2))
        );
        assert_eq!(
            parse("p0 | p1 -> p2", 2).unwrap(),
            imp(or(var(0), var(1)), var(2))
        );
        assert_eq!(
            parse("p0 -> p1 -> p2", 2).unwrap(),
            imp(var(0), imp(var(1), var(2)))
        );
        assert_eq!(
            parse("p0 <-> p1 <-> p2", 2).unwrap(),
            iff(var(0), iff(var(1), var(2)))
        );
        assert_eq!(parse("~box0 p0", 2).unwrap(), not(knows(0, var(0))));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse("p0 ->", 2) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse("box2 p0", 2) {
            Err(ParseError::AgentOutOfRange { pos, agent, agents }) => {
                assert_eq!((pos, agent, agents), (0, 2, 2));
            }
            other => panic!("expected agent error, got {other:?}"),
        }
        assert!(parse("q0", 2).is_err());
        assert!(parse("p0 p1", 2).is_err());
        assert!(parse("(p0", 2).is_err());
        assert!(parse("p0 <- p1", 2).is_err());
        assert!(parse("", 2).is_err());
    }

    #[test]
    fn rendering_round_trips_fixed_examples() {
        let cases = [
            "p0",
            "bot",
            "top",
            "~p0",
            "~~p0",
            "p0 & p1 | p2",
            "(p0 | p1) & p2",
            "p0 -> p1 -> p2",
            "(p0 -> p1) -> p2",
            "p0 <-> box0 p1",
            "E (p0 -> p1)",
            "C (E p0 & box1 ~p1)",
            "box0 (p0 -> p1) -> box0 p0 -> box0 p1",
        ];
        for s in cases {
            let f = parse(s, 2).unwrap();
            assert_eq!(render(&f, 2), s, "sugared print of {s}");
            assert_eq!(parse(&render_exact(&f), 2).unwrap(), f);
        }
    }

    #[test]
    fn exact_rendering_avoids_sugar() {
        let f = parse("E p0", 2).unwrap();
        assert_eq!(render_exact(&f), "(box0 p0 -> box1 p0 -> bot) -> bot");
        assert_eq!(render(&f, 2), "E p0");
        // Under a different agent count the same tree is not an E.
        assert_eq!(render(&f, 3), "box0 p0 & box1 p0");
    }

    #[test]
    fn pretty_rendering_uses_unicode() {
        let f = parse("C p0 -> ~p1 & top", 2).unwrap();
        assert_eq!(render_pretty(&f, 2), "C p0 \u{2192} \u{00ac}p1 \u{2227} \u{22a4}");
    }

    #[test]
    fn big_and_sorts_and_dedups() {
        assert_eq!(big_and(&[]), top());
        assert_eq!(big_and(&[var(3)]), var(3));
        assert_eq!(big_and(&[var(1), var(0), var(1)]), and(var(0), var(1)));
    }

    #[test]
    fn big_and_orders_by_exact_rendering() {
        // "box0 p0" < "box1 p0" < "p0" in byte order.
        let items = [var(0), knows(1, var(0)), knows(0, var(0))];
        assert_eq!(
            big_and(&items),
            and(knows(0, var(0)), and(knows(1, var(0)), var(0)))
        );
    }

    #[test]
    fn closure_of_common_knowledge_single_agent() {
        let f = common(var(0));
        let clo = closure(&f, 1);
        let expect = [
            common(var(0)),
            var(0),
            knows(0, var(0)),
            knows(0, common(var(0))),
        ];
        assert_eq!(clo.len(), 4);
        for g in &expect {
            assert!(clo.contains(g), "missing {g}");
        }
    }

    #[test]
    fn closure_of_mixed_modality_implication_two_agents() {
        let f = parse("box0 p0 -> C p1", 2).unwrap();
        let clo = closure(&f, 2);
        let expect = [
            f.clone(),
            knows(0, var(0)),
            var(0),
            common(var(1)),
            var(1),
            knows(0, var(1)),
            knows(1, var(1)),
            knows(0, common(var(1))),
            knows(1, common(var(1))),
        ];
        assert_eq!(clo.len(), 9);
        for g in &expect {
            assert!(clo.contains(g), "missing {g}");
        }
    }

    #[test]
    fn closure_indices_are_deterministic() {
        let f = parse("C p0 & C p1", 2).unwrap();
        let a = closure(&f, 2);
        let b = closure(&f, 2);
        assert_eq!(a.len(), b.len());
        for (i, g) in a.iter().enumerate() {
            assert_eq!(b.index_of(g), Some(i));
        }
        assert_eq!(a.index_of(a.get(3)), Some(3));
    }

    fn formula_strategy(agents: AgentId) -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            (0u32..4).prop_map(var),
            Just(bot()),
            Just(top()),
        ];
        leaf.prop_recursive(6, 64, 3, move |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| imp(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| iff(a, b)),
                inner.clone().prop_map(not),
                (0..agents, inner.clone()).prop_map(|(i, a)| knows(i, a)),
                inner.clone().prop_map(common),
                inner.prop_map(move |a| everyone(agents, a)),
            ]
        })
    }

    #[test]
    fn print_parse_round_trip() {
        for agents in 1u8..=3 {
            let strat = formula_strategy(agents);
            let mut runner = proptest::test_runner::TestRunner::deterministic();
            for _ in 0..400 {
                let f = strat.new_tree(&mut runner).unwrap().current();
                let sugar = render(&f, agents);
                assert_eq!(parse(&sugar, agents).unwrap(), f, "sugar: {sugar}");
                let exact = render_exact(&f);
                assert_eq!(parse(&exact, agents).unwrap(), f, "exact: {exact}");
            }
        }
    }

    #[test]
    fn closure_is_closed_and_bounded() {
        for agents in 1u8..=3 {
            let strat = formula_strategy(agents);
            let mut runner = proptest::test_runner::TestRunner::deterministic();
            for _ in 0..60 {
                let f = strat.new_tree(&mut runner).unwrap().current();
                let clo = closure(&f, agents);
                let bound = (1 + 2 * agents as usize) * subformulas(&f).len();
                assert!(clo.len() <= bound, "{} > {}", clo.len(), bound);
                // Closed under closure of every member.
                for g in clo.iter() {
                    for h in closure(g, agents).iter() {
                        assert!(
                            clo.contains(h),
                            "{} missing {}",
                            render_exact(g),
                            render_exact(h)
                        );
                    }
                }
            }
        }
    }
}
