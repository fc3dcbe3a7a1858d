//! Exhaustive search for optimal relay symbol mappings and user bit mappings.

pub mod bitmap;
pub mod classes;
pub mod optimize;
pub mod sweep;

/// Relative tolerance under which two objectives count as equal.
pub const TIE_RTOL: f64 = 1e-12;

pub use bitmap::{b_to_matrix, compute_b, distinct_bit_mappings, BitMapping};
pub use classes::{
    canonical, enumerate_symbol_classes, orbit, order_reversal, sign_reversal, singleton_classes, EquivalenceClass,
};
pub use optimize::{
    optimize_ber, optimize_ser, rate_scale, Candidate, Criterion, ErrorProfile, SearchResult, SearchSpace,
};
pub use sweep::{find_crossover, reference_candidates, snr_grid, sweep, CandidateValue, NamedCandidate, SweepPoint};
