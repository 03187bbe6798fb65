//! Model singular integral operators, commutators and weighted operator norms.

mod handle;
mod norm;
mod strip;
mod transforms;

pub use handle::{
    c_n_operator, c_n_sequence, iterated_commutator, matrix_multiplication_operator, DerivationMap,
    OperatorHandle, OperatorRegistry, LINEARITY_TOLERANCE,
};
pub use norm::{
    operator_norm_weighted, operator_norm_weighted_with, Certificate, NormEstimate, NormMethod,
    NormOptions,
};
pub use strip::{
    cauchy_derivatives, charact_derivatives, charact_strip_function, CAUCHY_NODES, CAUCHY_RADIUS,
};
pub use transforms::{
    frequency, haar_forward, haar_inverse, hilbert_operator, hilbert_transform,
    martingale_operator, martingale_transform, multiplier_operator, MartingaleSigns,
    MultiplierSymbol,
};
