//! Exact local computations for special cycles on the unitary Rapoport–Zink
//! space over an unramified quadratic extension of `Q_p`.
//!
//! The crate is organised bottom-up:
//!
//! - [`padic`]: arithmetic in `O_k`, `O_D`, rational polynomials;
//! - [`hermitian`]: Jordan decomposition and the invariants read off it;
//! - [`strata`]: the finite module `D(L)` and its vertex-lattice poset;
//! - [`densities`]: brute-force and closed-form representation densities;
//! - [`lifting`]: quasi-canonical lifting multiplicities;
//! - [`display_sim`]: the equal-characteristic display recursion.

pub mod densities;
pub mod display_sim;
pub mod error;
pub mod hermitian;
pub mod lifting;
pub mod padic;
pub mod strata;

pub use error::{Error, Result};
