//! Frames generated by iterated operators.
//!
//! The crate builds systems `∪_s {A_s^j f_s : 0 ≤ j ≤ L_s}`, decides whether they
//! are frames, tight frames or (strictly) scalable frames, produces weight
//! certificates or Farkas witnesses, computes canonical duals that keep the
//! iterative structure, and reconstructs signals from dynamical samples.
//!
//! Everything here is `no_std` + `alloc`. File formats and the command line
//! live in the companion `dynframe` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod constructions;
pub mod dynamics;
mod error;
pub mod frames;
pub mod numkernel;
pub mod scalability;

pub use error::{Error, Result};
pub use numkernel::{FieldTag, MatrixValue, Scalar, Tolerance, VectorValue};
