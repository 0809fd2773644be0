//! Optimal-access cooperative MSR codes for two simultaneous node failures.

pub mod blocks;
pub mod cli;
pub mod cluster;
pub mod error;
pub mod gf;
pub mod msrcode;
pub mod pairmap;
pub mod repair;
pub mod rindex;
pub mod selftest;
pub mod shard;
pub mod sparse;

pub use error::{Error, Result};
pub use gf::{DenseMatrix, Fe, Field};
pub use msrcode::{CodeParams, Codeword};
pub use pairmap::{PairClass, PairMap};
pub use rindex::IndexSpace;
