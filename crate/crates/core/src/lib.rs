//! Workbench for the epistemic logic of finitely many S4 agents with common
//! knowledge.
//!
//! The crate covers the pipeline end to end: formula syntax and parsing
//! ([`syntax`]), Kripke semantics ([`kripke`]), the equivalent algebraic
//! semantics ([`algebra`]), the well-foundedness analysis that characterises
//! standard algebras ([`wellfound`]), the finite Stone-type representation
//! tying the two semantics together ([`stone`]), a decision procedure with
//! countermodel extraction ([`decide`]), and checkable certificates for the
//! infinitary proof calculus ([`prooftree`]).
//!
//! The `s4c` binary exposes all of it on the command line; [`suite`] bundles
//! the cross-validation battery the binary runs under `s4c suite`.

// Index loops here usually combine the counter with shifts or parallel
// tables; iterator rewrites obscure that.
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod decide;
pub mod fixtures;
pub mod kripke;
pub mod prooftree;
pub mod stone;
pub mod suite;
pub mod syntax;
#[cfg(test)]
mod testutil;
pub mod wellfound;
