//! Sample paths of the switched diffusion, the Langevin diffusion, the ULA
//! and SGLD chains, and couplings between them.

mod coupling;
mod distance;
mod grid;
mod index;
mod simulate;
mod trajectory;

pub use coupling::{
    reflect_increment, simulate_reflection_coupling, simulate_reflection_coupling_with,
    simulate_synchronous_pair, simulate_synchronous_pair_with, DEFAULT_EPS_MEET,
};
pub use distance::{adaptive_simpson, distance_function_f, DistanceFunction, F_REL_TOL};
pub use index::{sample_index_path, sample_index_path_from, IndexProcess, IndexProcessPath};
pub use simulate::{
    sgld_chain, sgld_chain_with, simulate_langevin, simulate_langevin_with, simulate_sgldiff,
    simulate_sgldiff_with, ula_chain, ula_chain_with, ChainHooks, ChainRecord, SimOptions,
    DEFAULT_DT,
};
pub use trajectory::{fmt_real, CoupledTrajectory, Record, Trajectory};
