//! Spatial search by continuous-time quantum walk.
//!
//! The walk runs under `H = −γA − |w⟩⟨w|`. The analysis side needs only the
//! levels of `A` and their weights on `|w⟩`; the dynamics side works from a
//! dense eigensystem of `H` or from the secular roots.

mod checks;
mod dynamics;
mod levels;
mod report;
mod secular;

pub use checks::{check_zero_overlap, ZeroOverlapCheck, FORWARD_RESIDUAL, ZERO_OVERLAP};
pub use dynamics::{
    dense_overlaps, evolve, evolve_model, maximize_probability, state_at, uniform_grid, EvolutionTrace, ProbabilityMax,
    SearchSetup, SpectralAmplitudes, PMAX_RTOL, PMAX_SAMPLES,
};
pub use levels::{projector_weights, LevelWeights};
pub use report::{
    epsilon, gamma_opt, lambda_pm_exact, report, s_sums, AssumptionFlag, SearchReport, LEAKAGE_THRESHOLD,
};
pub use secular::{SecularEquation, ZERO_WEIGHT};
