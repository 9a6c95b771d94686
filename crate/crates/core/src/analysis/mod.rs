//! Wasserstein estimators, theorem constants and bounds, Monte Carlo lemma
//! verifiers and rate fitting.

mod constants;
mod density;
mod fit;
mod lemmas;
mod stats;
mod wasserstein;

pub use constants::{compute_constants, Theorem1Bound, TheoremConstants};
pub use density::{
    build_target_density_1d, gaussian_density, TargetDensity1D, DENSITY_GRID_CELLS,
    QUANTILE_TABLE_SIZE, TAIL_FRACTION,
};
pub use fit::{fit_exponential_decay, fit_power_law, ExponentialFit, PowerLawFit};
pub use lemmas::{
    lemma1_check, lemma2_check, lemma3_check, supermartingale_check, VerifierReport, TOLERANCE_SE,
};
pub use stats::{batch_means_stderr, mean, mean_estimate, sample_variance, MeanEstimate};
pub use wasserstein::{
    bootstrap_1d, bootstrap_stderr_1d, BootstrapW1, wasserstein1_1d, wasserstein1_exact, wasserstein1_sliced,
    wasserstein1_vs_density, wasserstein1_vs_gaussian, WassersteinEstimate, WassersteinMethod,
    EXACT_MATCHING_MAX,
};
