//! The representation `sym^d`: polynomials of degree at most `d`, the slash
//! action of SL_2(Z), the self-duality pairing, and the lowest-component
//! projection of vector-valued expansions.

mod group;
mod poly;
mod vv;

pub use group::{word_decompose, word_product, Generator, GroupElement};
pub use poly::{pairing_weights, PolyD, Scalar};
pub use vv::{pi_low, VVQSeries};
