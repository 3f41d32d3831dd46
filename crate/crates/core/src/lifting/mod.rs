//! Quasi-canonical lifting arithmetic: ramification indices, coset
//! valuations, lifting bounds and the resulting intersection numbers.

mod bounds;
mod intersection;

pub use bounds::{
    coset_valuation_exact, coset_valuation_l, lifting_bound_n0s, lifting_bound_nrs, onestep_sides,
    ramification_index, QuatValuationDatum,
};
pub use intersection::{
    gl2_correction_sums, length_formula, main_identity, mu_matrix_entries, mu_matrix_l,
    special_fiber_sums, stratum_intersection, stratum_pair_intersection, total_degree,
    IntersectionLedger, LevelParity, MainIdentityRow, MuMatrix, StratumTerm,
};
