//! Exact characteristic-p commutative algebra over prime fields.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the script
//! language and the command line live in the `frobperf` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod components;
pub mod corering;
pub mod error;
pub mod fpalg;
pub mod groebner;
pub mod groupoid;
pub mod perfection;
pub mod subalg;

pub use error::{Budget, Error, Result};
