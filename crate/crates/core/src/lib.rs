//! Kneading theory for expansive Lorenz maps: admissibility of kneading
//! invariants, renormalization and prime factorization, the parameters
//! `(β, α)` of linear mod one models, and the complete invariant sequence.

pub mod classify;
pub mod cli;
pub mod error;
pub mod kneading;
pub mod param;
pub mod renorm;
pub mod seqcore;

pub use error::{Error, Result};
pub use kneading::{validate, Admissibility, KneadingInvariant, LmoParams, Verdict};
pub use renorm::{factorize, star_product, Factorization, RenormStep, StepKind};
pub use seqcore::{EpSeq, Rational, Word};
