//! Dipole-dipole interactions between atoms in neighbouring optical lattice
//! wells, and the conditional Raman gate they enable.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod atomics;
pub mod constants;
pub mod dipole_kernel;
pub mod ensemble;
mod error;
pub mod format;
pub mod gate;
pub mod kvfile;
pub mod lattice;
pub mod overlap;

pub use error::{Error, Result};
