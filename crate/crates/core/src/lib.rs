pub mod dsl;
pub mod evolution;
pub mod operators;
pub mod pareto;
pub mod problem;
pub mod runner;
pub mod similarity;
