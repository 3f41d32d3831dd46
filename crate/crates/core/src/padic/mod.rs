//! Exact arithmetic in `O_k = Z_{p²}`, the quaternion order `O_D`, matrices
//! over them, and exact rational polynomials and truncated series.

mod context;
mod matrix;
mod ok;
mod poly;
mod quat;
mod series;

pub use context::{is_nonresidue, least_nonresidue, PrimeContext};
pub use matrix::{determinant, HermJson, HermMatrix, OkMatrix};
pub use ok::{norm_preimage, OkElement, OkJson, Valuation};
pub use poly::{rat, rat_int, rat_p_pow, rat_p_valuation, RationalPoly};
pub use quat::QuatElement;
pub use series::{TruncatedSeries, TruncatedSeriesMatrix};
