//! Unit-test alias for the seeded generators that live in [`crate::suite`].

#[allow(unused_imports)]
pub(crate) use crate::suite::{random_formula, random_space, random_valid_algebra, random_valid_model};
