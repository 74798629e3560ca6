//! Binary linear codes, syndromes, Hamming balls and Gilbert–Varshamov
//! sampling.

mod ball;
mod bits;
mod code;
mod gv;

pub use ball::{binary_entropy, binomial, HammingBall};
pub use bits::{Bits, MAX_BITS};
pub use code::{CodeFile, LinearCode, MAX_CODE_LEN};
pub use gv::{gilbert_varshamov_sample, GvReport};
