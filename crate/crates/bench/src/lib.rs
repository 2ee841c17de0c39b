//! Benchmark-only crate; see `benches/pipeline.rs`.
//!
//! Shared setup helpers for the benchmarks live here so the bench target
//! stays declarative.

use blowup_core::ode::{integrate, StopRule, Trajectory};
use blowup_core::problems::{get_problem, ProblemId};
use blowup_core::transform::{
    differential_transform_1, nonlocal_transform_1, GChoice, TransformedSystem,
};

pub fn example2_system() -> TransformedSystem {
    let p = get_problem(ProblemId::Ex2Form, 1.0).unwrap();
    nonlocal_transform_1(p.problem(), GChoice::FOverY).unwrap()
}

pub fn example1_differential_system() -> TransformedSystem {
    let p = get_problem(ProblemId::Ex1, 1.0).unwrap();
    differential_transform_1(p.problem()).unwrap()
}

/// A long algebraically-converging trajectory for estimator benchmarks.
pub fn algebraic_trajectory(steps: usize) -> Trajectory {
    let sys = example1_differential_system();
    let stop = StopRule::default()
        .with_max_steps(steps)
        .with_derivative_decay(0.0);
    integrate(sys.system(), 0.2, &stop).unwrap()
}
