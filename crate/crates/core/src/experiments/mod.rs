//! Experiment harnesses reproducing the quantitative content at desk scale:
//! the sharpness counterexample family and its Sobolev scaling, the maximal
//! boundedness ratio above the threshold, the uniform oscillatory kernel
//! bound, the weighted Fourier-norm (Pitt) check, and small-time convergence.
//!
//! Every harness is deterministic: fixed summation orders, no randomness,
//! reports reproduce bit-for-bit for a fixed configuration (runtime metadata
//! aside).

mod bump;
mod counterexample;
mod report;
mod runs;

pub use bump::BumpFunction;
pub use counterexample::{build_counterexample, CounterexampleSpec};
pub use report::{fit_loglog, median, ExperimentReport};
pub use runs::{
    convergence_run, maximal_ratio_run, oscillatory_bound_check, oscillatory_kernel_integral,
    pitt_check, sharpness_run, ConvergenceConfig, MaximalRatioConfig, OscillatoryConfig,
    PittConfig, SharpnessConfig,
};
