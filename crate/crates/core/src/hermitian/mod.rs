//! Jordan decomposition over `O_k` and the invariants read off it.

mod jordan;
mod profile;
mod scaled;

pub use jordan::{jordan_decompose, JordanDecomposition};
pub use profile::{geometric_invariants, reduce_to_binary, GeometricInvariants, JordanProfile};
pub use scaled::{scaled_fundamental, EmptyReason, ScaledCycleDatum, ScaledHerm};

/// `reduce_to_binary` on a matrix rather than a profile.
pub fn reduce_matrix_to_binary(t: &crate::padic::HermMatrix) -> crate::Result<(u32, u32)> {
    reduce_to_binary(&jordan_decompose(t)?.profile)
}
