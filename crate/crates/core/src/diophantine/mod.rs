//! Exact reals, continued fractions and nearest-integer-distance scans.

mod cf;
mod enclosure;
mod exact;
mod scan;
mod syntax;

pub use cf::{
    cf_expand, convergents, partial_quotient_sup, ContinuedFraction, Convergent, QuotientSup,
    Termination,
};
pub use enclosure::Enclosure;
pub use exact::{ExactReal, QuadSurd, DEFAULT_BITS};
pub use scan::{
    badly_approx_floor, dirichlet_witnesses, floor_profile, linear_form_floor,
    nearest_int_distance, nu_liminf_estimate, theoretical_floor_from_k, DistanceSample,
    FloorScan, LinearFormScan, NuEstimate,
};
pub(crate) use scan::{box_scan, scan_with_multiplier};
