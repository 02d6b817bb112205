//! Exhaustive verification of finite social choice rules.
//!
//! The crate models strict preferences over a handful of alternatives, the
//! classic axioms on social choice rules (unanimity, tops-onlyness,
//! efficiency, strategy-proofness, dictatorship), the split of every profile
//! into *manipulable* or *dictatorial* for a tops-only rule, and the two
//! counting orders built on that split. The [`constructions`] module
//! enumerates whole rule spaces and machine-checks the results that tie these
//! notions together, up to the Gibbard–Satterthwaite theorem at small
//! `(n, m)`.

pub mod classification;
pub mod cli;
pub mod constructions;
pub mod domain;
pub mod error;
pub mod limits;
pub mod report;
pub mod rules;

pub use domain::{
    enumerate_preferences, enumerate_profiles, Alternative, Dims, Preference, PreferenceDomain,
    Profile, ProfileSpace, TopsProfile,
};
pub use error::{Error, Result};
pub use limits::Limits;
pub use rules::{parse_rule, Repr, Rule};
