//! Exact solvers for Weighted Phylogenetic Diversity with Dependencies on
//! food webs.
//!
//! The main entry point is [`dp::solve_dp`], a dynamic program over a tree
//! extension of the food web whose cost is exponential only in the largest
//! ancestor set of the extension. [`brute`] holds exhaustive oracles and
//! [`reduction`] builds hard instances from Capacitated Dominating Set.

pub mod brute;
pub mod dp;
pub mod extension;
pub mod foodweb;
pub mod io;
pub mod random;
pub mod rational;
pub mod reduction;
pub mod solution;
pub mod species_set;

pub use foodweb::{diversity, gamma_sum, is_viable, FoodWeb, PddInstance, SpeciesId};
pub use rational::Rational;
pub use solution::{Score, SolveResult, SolveStats};
pub use species_set::SpeciesSet;
