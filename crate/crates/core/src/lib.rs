//! Zero-discrepancy toroidal matrices.
//!
//! An `m x n` board holds `0..m*n` once each; it has zero discrepancy for
//! `k x l` regions when every wrap-around `k x l` window has the same sum.
//! This crate decides when such boards exist ([`feasibility`]), builds them
//! ([`builder`]), checks the rule by exhaustive search ([`oracle`]), finds
//! low-discrepancy boards where none exist ([`annealer`]) and uses boards as
//! ordered-dither threshold arrays ([`halftone`]).
//!
//! The crate is `no_std` and needs only `alloc`. File formats and the
//! command-line front end live in the `zerodisc` crate.

#![no_std]

extern crate alloc;

pub mod annealer;
pub mod builder;
pub mod feasibility;
pub mod grid;
pub mod halftone;
pub mod oracle;
mod search;

pub use feasibility::{decide, Reason, Verdict};
pub use grid::{Board, Dims, DiscrepancyReport, GridError, RegionSumTable};
