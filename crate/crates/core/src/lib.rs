pub mod autodiff;
pub mod cli;
pub mod datasets;
pub mod digraph;
pub mod error;
pub mod eval;
pub mod featurize;
pub mod heuristics;
pub mod model;
pub mod rng;
pub mod sampling;
pub mod setops;
pub mod verify;
