//! Feature selection as bi-objective search: evolve bit masks that trade
//! a neural proxy for predictive loss against the number of selected
//! features, keep the non-dominated archive, and pick a deployment point
//! by downstream classifier accuracy.
//!
//! The pieces compose bottom-up:
//!
//! * [`core`] defines bit-mask chromosomes, objective vectors, and Pareto
//!   dominance.
//! * [`ranking`] sorts a population into non-dominated fronts and assigns
//!   crowding distances.
//! * [`hypervolume`] measures front quality against a reference point.
//! * [`dataset`] loads CSV data, splits it, and standardizes features.
//! * [`synthetic`] generates datasets with known structure for tests and
//!   examples.
//! * [`neurocost`] trains a small network per mask and turns validation
//!   error into the first objective.
//! * [`classify`] trains the downstream linear classifier used to judge
//!   archive members.
//! * [`engine`] runs the multi-objective search and the knee selection.
//! * [`baselines`] runs the single-objective weighted-sum competitor.
//! * [`config`], [`report`], and [`cli`] wire everything into the binary.

pub mod baselines;
pub mod classify;
pub mod cli;
pub mod config;
pub mod core;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod hypervolume;
pub mod neurocost;
pub mod ranking;
pub mod report;
pub mod synthetic;

pub use crate::core::{dominates, BitChromosome, CrowdingDistance, Individual, ObjectiveVector};
pub use crate::error::{Error, Result};
