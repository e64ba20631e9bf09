//! Level-one modular forms: exact q-expansions, bases, decompositions into
//! Eisenstein products, and certified evaluation.

mod basis;
mod eval;
mod linalg;
mod qseries;

pub use basis::{
    cusp_products, delta_e4sq_basis, miller_basis, miller_basis_forms, triangular_coordinates,
    FormBasis, ProductForm,
};
pub use eval::{
    choose_truncation, eval_delta, eval_eisenstein, eval_product, power_tail_bound, qseries_eval,
    qseries_partial_sum,
    GrowthBound,
};
pub(crate) use eval::imag_lower;
pub use linalg::{
    decompose_delta_power, default_decomposition_order, product_candidates, solve_in_span,
    ProductDecomposition, ProductTerm,
};
pub use qseries::{delta_q, dims, divisor_sums, eisenstein_q, QSeries};
