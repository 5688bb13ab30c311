//! Robust exact algorithms for perturbation-stable instances.
//!
//! Every solver here either returns a provably optimal solution or reports that
//! the input is not stable. Certificates come from exact rational LP relaxations;
//! brute-force oracles in [`stability_oracle`] give ground truth on small inputs.

pub mod clustering;
pub mod cli;
pub mod independent_set;
pub mod lp;
pub mod model;
pub mod multiway_cut;
pub mod node_multiway_cut;
pub mod rational;
pub mod stability_oracle;
pub mod tsp;

pub use model::{Instance, Sense, Solution, Verdict};
pub use rational::{q, ExtRational, Rational};
