//! Potential families `{Φ_i}` (through their gradients), built-in examples
//! and numerical checks of the regularity assumptions.

mod builtins;
mod checks;
mod family;

pub use builtins::{
    appendix_c_derivative, appendix_c_family, appendix_c_lipschitz, quadratic, trig,
    QUADRATIC_DEFAULT_R,
};
pub use checks::{
    check_assumption1, check_assumption1_in, check_assumption2, check_assumption2_in,
    check_dissipativeness, AssumptionId, AssumptionReport, SampleBox, EPS_CHECK,
};
pub use family::{GradFn, PotentialFamily};
