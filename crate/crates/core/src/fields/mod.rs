//! Grid discretization: vector and matrix fields, weighted norms, dyadic cubes,
//! Muckenhoupt characteristics, BMO, weight generators and file IO.

mod cubes;
mod domain;
mod field;
mod generators;
mod io;
mod weights;

pub use cubes::{ap_characteristic, bmo_norm, Cube, DyadicCubeFamily};
pub use domain::{GridDomain, MAX_POINTS, MIN_POINTS};
pub use field::{lp_of_pointwise, ScalarField, VectorField};
pub use generators::{
    gen_commuting_pair, gen_rotating_weight, ScalarProfile, SpectralProfile, PROFILE_MAX,
    PROFILE_MIN,
};
pub use io::{from_mwf_str, read_mwf, to_mwf_string, write_mwf, MWF_VERSION};
pub use weights::{
    multiplier_norm, weighted_norm, Convention, GeneralWeightField, MatrixField, MatrixWeightField,
    MAX_WEIGHT_EIGENVALUE, MIN_WEIGHT_EIGENVALUE,
};
