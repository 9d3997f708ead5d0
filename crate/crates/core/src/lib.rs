//! Construction, analysis, and exhaustive verification of integer sets whose
//! sumset `A + A` contains no squarefree integer.
//!
//! The crate is organised around the objects such sets live on:
//!
//! - [`sieve`] — bit-packed squarefree indicator tables;
//! - [`sets`] — dense integer sets with sumset, iterated-sumset, and
//!   subset-sum kernels;
//! - [`residues`] — the mod-36 class machinery (the class set Q, local
//!   density profiles, the structural classifier);
//! - [`analytic`] — truncated Euler products with tail bounds and the ledger
//!   of derived constants;
//! - [`construct`] — the two explicit avoiding constructions;
//! - [`verify`] — exhaustive finite checks producing structured reports;
//! - [`search`] — exact and heuristic search for dense periodic
//!   certificates.

pub mod analytic;
pub mod construct;
pub mod error;
pub mod report;
pub mod residues;
pub mod search;
pub mod sets;
pub mod sieve;
pub mod verify;

pub use error::{Error, Result};
pub use report::{Claim, ClaimStatus, VerificationReport};
pub use sets::IntegerSet;
pub use sieve::SquarefreeTable;
