//! Shared inputs for the criterion benchmarks.

use chaincoord::{benchmark_problems, ModelParams, SolverSettings};

/// The five benchmark problems, labelled for benchmark ids.
pub fn labelled_problems() -> Vec<(String, ModelParams)> {
    benchmark_problems()
        .into_iter()
        .enumerate()
        .map(|(i, p)| (format!("problem{}", i + 1), p))
        .collect()
}

/// Default settings with a lighter simulation grid so oracle benches stay short.
pub fn bench_settings(sim_steps: usize) -> SolverSettings {
    SolverSettings {
        sim_steps_per_cycle: sim_steps,
        ..SolverSettings::default()
    }
}
