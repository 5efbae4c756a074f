//! Lyapunov exponents, decay of correlations, entropy of separated sets and
//! parameter sweeps of the Jacobian integral.

mod entropy;
mod lyapunov;
mod mixing;
mod sweep;

pub use entropy::{
    default_epsilons, entropy_estimate, write_entropy_csv, EntropyEstimate, EpsilonRow,
};
pub use lyapunov::{
    log_jacobian_integral, lyapunov, write_lyapunov_csv, LyapSpectrum, MAX_DISCARDED,
};
pub use mixing::mixing_decay;
pub use sweep::{
    disc_grid, lyapunov_sweep, ParamSlot, SubMeanCheck, SweepConfig, SweepRow, SweepTable,
    SweepTemplate,
};
