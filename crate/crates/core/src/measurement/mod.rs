//! Minimum-error discrimination over positive score operators, with
//! primal/dual certificates, and the guessing-probability and min-entropy
//! quantities built on it.

mod barrier;
mod discrimination;
mod entropy;
mod povm;

pub use discrimination::{
    binary_optimal, optimal_discrimination, CertificateSummary, DiscriminationInstance, SolverCertificate,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use entropy::{guessing_probability, guessing_probability_with, hmin_cq, hmin_general, HminBracket, HminSummary};
pub use povm::{CqState, Povm};
