//! Weak-limit candidates `T^{n(k)} → Σ c_p T^p` checked against exact
//! intersection measures.

mod polynomial;
mod sequence;
mod verify;

pub use polynomial::OperatorPolynomial;
pub use sequence::{CandidateSequence, SequenceTerm};
pub use verify::{
    eq4_coefficients, eq4_polynomial, predict, scan_window, sigma_preimage, verify_eq4, verify_limit,
    DeadZoneSampling, Eq4Report, Eq4Row, LimitReport, LimitRow, ScanRow, WindowScan, Zone,
    DEFAULT_DEAD_ZONE_SAMPLES,
};
