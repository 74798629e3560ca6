//! Desk-scale instances of the two applications: the 1CC-based commitment
//! and BCJL.

mod bcjl;
mod encoding;
mod onecc;
mod smallsup;
mod tails;

pub use bcjl::{
    bb84_bit_guessing, bb84_ket, bcjl_commit, bcjl_delta_reveal, bcjl_equivalence_mc, bcjl_hiding_exact,
    bcjl_na_binding, bcjl_reveal, bcjl_verifier, verifier_overlap_bound, verifier_overlaps, BcjlInstance, BcjlNaReport,
    BcjlRun, EquivalenceStats, HidingReport, HidingVariant, ThetaSet, MAX_HIDING_QUBITS, MAX_NA_QUBITS,
    MAX_QUANTUM_HIDING_QUBITS, MAX_VERIFIER_QUBITS,
};
pub use encoding::{
    b92_encode, b92_guessing, bb84_encode, bb84_overlap, theta_guessing_analysis, ThetaGuessing, MAX_ENCODED_QUBITS,
};
pub use onecc::{
    extractor, onecc_commit, onecc_reveal, simulate_commit_1cc, Deviation, OneCcParams, OneCcRun, OneCcView,
    SamplingStats, ScriptedAdversary, MAX_SAMPLING_QUBITS,
};
pub use smallsup::{
    extraction_check, lemma3_bound_check, sample_smallsup_state, ExtractionReport, Lemma3Report, SmallSupState,
    MAX_SIDE_DIM, MAX_SMALLSUP_QUBITS,
};
pub use tails::{binomial_upper_tail, hoeffding_two_sided};
