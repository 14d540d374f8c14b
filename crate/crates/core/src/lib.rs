//! Sub-linear expectations generated by finite families of distributions.
//!
//! The upper expectation of a test function is the largest of its member
//! expectations, the lower one the smallest, and capacities of events are
//! handled the same way. On top of that the crate offers
//!
//! * support functions and mean sets of vector models ([`geometry`]),
//! * paths sampled under adversarial member-selection strategies
//!   ([`sampler`]),
//! * exact upper and lower capacities of path events by dynamic programming
//!   over a lattice ([`dp`]),
//! * maximal inequalities and series criteria checked against exact values
//!   ([`inequality`]),
//! * law-of-large-numbers experiments ([`experiments`]) and a randomized
//!   axiom check ([`axioms`]),
//! * JSON run configs and a runner that writes CSV/JSON results
//!   ([`config`], [`runner`]).
//!
//! ```
//! use subexp::distribution::{AmbiguitySet, Event};
//! use subexp::expectation::{event_upper_capacity, upper_expectation, TestFunction};
//!
//! let coins = AmbiguitySet::coin_pair();
//! assert_eq!(upper_expectation(&coins, &TestFunction::coordinate(0)).unwrap(), 0.5);
//! assert_eq!(event_upper_capacity(&coins, &Event::at_least(0, 1.0)).unwrap(), 0.75);
//! ```

pub mod axioms;
pub mod config;
pub mod distribution;
pub mod dp;
pub mod error;
pub mod expectation;
pub mod experiments;
pub mod geometry;
pub mod inequality;
mod quadrature;
pub mod rng;
pub mod runner;
pub mod sampler;
