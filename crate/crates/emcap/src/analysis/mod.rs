//! Analyses built on the per-mode quantities: spatial degrees of freedom,
//! near-field backscatter bookkeeping and Q-constrained gain optimization.

mod backscatter;
mod dof;
mod gain;

pub use backscatter::{backscatter_limit, backscatter_powers, evanescent_constants, BackscatterResult, LimitTrace};
pub use dof::{dof_count, lossless_dof_bound, DofQuery};
pub use gain::{
    argmax_n, beam_pattern, beamwidth, beamwidth_on, signed_grid, boresight_amplitudes, far_field_modes, optimize_gain,
    optimize_with_modes, sweep_gain, BeamPattern, Excitation, GainOptResult, ModeFarField,
};
