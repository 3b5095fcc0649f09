//! Monte Carlo calibration under N(0, 1) and least-squares model fitting.

pub mod engine;
pub mod fit;
pub mod moments;
pub mod rng;
pub mod tables;

pub use engine::{
    simulate, simulate_bias, simulate_many, simulate_moments, simulate_variance, SimulationConfig,
    SimulationResult, Workers,
};
pub use fit::{fit_hayes, fit_williams, FitInput};
pub use moments::Moments;
pub use rng::Substream;
pub use tables::{regenerate_table, RegeneratedTable, TableId};
