//! Constructive procedures: certified rational gaps for the loaded string
//! and the continued-fraction shift sequence.

mod density;
mod shift;

pub use density::{
    construct_rational_gap, GapBranch, GapVerification, RationalGapCertificate, SquareHit,
};
pub use shift::{
    cf_shift_identity, cf_shift_sequence, loaded_gap_search, LoadedGapSearch, NU_DEPTH,
    NU_SAFETY_FACTOR, SINE_TOLERANCE,
};
