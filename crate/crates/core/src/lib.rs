//! Tate-Shafarevich groups of multinorm-one tori attached to products of
//! cyclic p-power extensions.
//!
//! Fields are encoded through the Galois correspondence inside a finite
//! abelian p-group `A`; places through their decomposition subgroups. Two
//! independent computations are provided: a brute-force evaluation of the
//! combinatorial groups `G` and `G_ω` ([`oracle`]), and the closed-form
//! structure theorem ([`structure`]).

pub mod arith;
pub mod catalog;
pub mod error;
pub mod field;
pub mod group;
pub mod kummer;
mod lattice;
pub mod local;
pub mod oracle;
pub mod report;
pub mod residue;
pub mod selftest;
pub mod structure;

pub use error::{Error, Result};
pub use field::{validate_and_normalize, FieldConfig, NormalizedConfig};
pub use group::{Character, Element, PGroup, Subgroup};
