//! Preferences over tied winner sets under uniform random tie-breaking.
//!
//! Four characterizations of when one winner set beats another are provided
//! and cross-checked: stochastic dominance of the induced uniform lotteries,
//! dominance under every consistent utility, match-dominance, and
//! derivability from set-extension axioms (Kelly, Gärdenfors,
//! responsiveness, monotone duplication) closed under transitivity. The
//! [`plurality`] module applies them to better replies in Plurality games.

pub mod axioms;
pub mod battery;
pub mod dominance;
pub mod error;
pub mod plurality;
pub mod preferences;

pub use error::{Error, Result};
