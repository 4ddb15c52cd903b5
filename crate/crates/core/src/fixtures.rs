//! Built-in reference objects used by documentation, tests and the
//! acceptance suite, in the same textual formats the CLI reads. The copies
//! under `fixtures/` in the repository are generated from these constants
//! (`s4c fixture --all`), and a test keeps them in sync.

use crate::algebra::FiniteAlgebra;
use crate::kripke::KripkeModel;
use crate::stone::FiniteTopSpace;

/// One-atom algebra where every operator is the identity: the two-element
/// algebra with both agents fully informed.
pub const A1_ALG: &str = "\
agents 2
atoms a
box0 opens: - a
box1 opens: - a
C opens: - a
";

/// Two-atom algebra where agent 0 can see `a` and agent 1 can see `b`;
/// common knowledge collapses to {0, 1}.
pub const A2_ALG: &str = "\
agents 2
atoms a b
box0 opens: - a a,b
box1 opens: - b a,b
C opens: - a,b
";

/// Two worlds; agent 0 considers w1 possible from w0, agent 1 is blind;
/// p0 holds only at w0.
pub const M1_MODEL: &str = "\
agents 2
worlds w0 w1
rel 0: (w0,w0) (w0,w1) (w1,w1)
rel 1: (w0,w0) (w1,w1)
val p0: w0
";

/// One point, two agents, indiscrete: its powerset algebra is A1.
pub const S1_SPACE: &str = "\
agents 2
points x
";

/// Two points; agent 0's topology is generated by {a}, agent 1's by {b}:
/// its powerset algebra is A2.
pub const S2_SPACE: &str = "\
agents 2
points a b
open 0: a
open 1: b
";

pub fn algebra_a1() -> FiniteAlgebra {
    crate::algebra::parse_algebra(A1_ALG).expect("A1 fixture parses")
}

pub fn algebra_a2() -> FiniteAlgebra {
    crate::algebra::parse_algebra(A2_ALG).expect("A2 fixture parses")
}

pub fn model_m1() -> KripkeModel {
    crate::kripke::parse_model(M1_MODEL).expect("M1 fixture parses")
}

pub fn space_s1() -> FiniteTopSpace {
    crate::stone::parse_space(S1_SPACE).expect("S1 fixture parses")
}

pub fn space_s2() -> FiniteTopSpace {
    crate::stone::parse_space(S2_SPACE).expect("S2 fixture parses")
}

/// A propositional tautology as a one-node certificate.
pub const CERT_TAUT: &str = include_str!("../../../fixtures/certs/taut.cert");

/// Necessitation applied to an assumption: from `p0` derive `C p0`.
pub const CERT_NEC_ASM: &str = include_str!("../../../fixtures/certs/nec_asm.cert");

/// The loop rule with a single self-looping premise, deriving
/// `top -> C top` from the fixpoint axiom at `top`.
pub const CERT_OMEGA_TOP: &str = include_str!("../../../fixtures/certs/omega_top.cert");

/// The loop rule with a genuine prefix: two premises, the second of which
/// the family repeats forever.
pub const CERT_OMEGA_TWO: &str = include_str!("../../../fixtures/certs/omega_two.cert");

/// A derivation of `p0 -> C p0` from the assumptions `p0 -> box0 p0` and
/// `p0 -> box1 p0`, combining necessitation with the induction axiom.
pub const CERT_IND_MIXED: &str = include_str!("../../../fixtures/certs/ind_mixed.cert");

/// A stored certificate with the assumptions it depends on and the
/// formula it proves. All built-in certificates use two agents.
#[derive(Debug, Clone, Copy)]
pub struct GoldenCert {
    pub name: &'static str,
    /// Path of the copy under `fixtures/`.
    pub file: &'static str,
    pub cert: &'static str,
    pub sigma: &'static [&'static str],
    pub conclusion: &'static str,
}

/// The built-in certificates.
pub fn golden_certs() -> Vec<GoldenCert> {
    vec![
        GoldenCert {
            name: "taut",
            file: "certs/taut.cert",
            cert: CERT_TAUT,
            sigma: &[],
            conclusion: "p0 -> p0",
        },
        GoldenCert {
            name: "nec-asm",
            file: "certs/nec_asm.cert",
            cert: CERT_NEC_ASM,
            sigma: &["p0"],
            conclusion: "C p0",
        },
        GoldenCert {
            name: "omega-top",
            file: "certs/omega_top.cert",
            cert: CERT_OMEGA_TOP,
            sigma: &[],
            conclusion: "top -> C top",
        },
        GoldenCert {
            name: "omega-two",
            file: "certs/omega_two.cert",
            cert: CERT_OMEGA_TWO,
            sigma: &[],
            conclusion: "C p0 & C p0 -> C p0",
        },
        GoldenCert {
            name: "ind-mixed",
            file: "certs/ind_mixed.cert",
            cert: CERT_IND_MIXED,
            sigma: &["p0 -> box0 p0", "p0 -> box1 p0"],
            conclusion: "p0 -> C p0",
        },
    ]
}

/// All fixtures by name, with the file extension their format implies.
pub fn all() -> Vec<(&'static str, &'static str)> {
    let mut out = vec![
        ("a1.alg", A1_ALG),
        ("a2.alg", A2_ALG),
        ("m1.model", M1_MODEL),
        ("s1.space", S1_SPACE),
        ("s2.space", S2_SPACE),
    ];
    for g in golden_certs() {
        out.push((g.file, g.cert));
    }
    out
}

/// Look up a fixture's text by file name.
pub fn by_name(name: &str) -> Option<&'static str> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, t)| t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse_and_validate() {
        assert!(algebra_a1().validate().is_valid());
        assert!(algebra_a2().validate().is_valid());
        assert!(model_m1().validate().is_valid());
    }

    #[test]
    fn a1_is_the_identity_algebra() {
        let alg = algebra_a1();
        assert_eq!(alg.size(), 2);
        for e in alg.elements() {
            assert_eq!(alg.box_op(0, e), e);
            assert_eq!(alg.box_op(1, e), e);
            assert_eq!(alg.c_op(e), e);
        }
    }

    #[test]
    fn repository_fixture_files_match_constants() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../fixtures");
        for (name, text) in all() {
            let path = dir.join(name);
            let on_disk = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
            assert_eq!(on_disk, text, "fixture file {name} is out of date");
        }
    }
}
