//! Real interpolation of weighted `L^p` couples: K- and E-functionals, the `Phi` functional,
//! Lorentz and Beurling norms, selectors and their derivations.

mod couple;
mod derivation;
mod frontier;
mod functionals;
mod grid;
mod rearrangement;

pub use couple::{intersection_norm, sum_norm, CoupleKind, CoupleSpec, Decomposition};
pub use derivation::{lifted_matrix_derivation, omega_real, DerivationPath};
pub use functionals::{
    e_functional, functional_sweep, functional_value, k_functional, k_functional_certified,
    selector, sweep_table, KValue, RealMethod, SweepRow, CERTIFICATE_TOLERANCE,
};
pub use grid::{phi_norm, real_interp_norm, LogGrid};
pub use rearrangement::{beurling_norm_approx, l_space_norm, lorentz_norm, NormBounds};
