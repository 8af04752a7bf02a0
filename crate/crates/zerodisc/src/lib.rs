//! File formats, parallel drivers and the command-line interface built on
//! [`zerodisc_core`].

pub mod cli;
pub mod matrix;
pub mod netpbm;
pub mod parallel;

pub use matrix::{read_matrix, write_matrix, MatrixError};
pub use netpbm::{read_pbm, read_pgm, write_pbm, write_pgm, PbmMode, PnmError};
pub use parallel::{anneal_parallel, ordered_map};
