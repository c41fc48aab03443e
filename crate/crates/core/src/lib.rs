//! Joint carrier-phase and polarization tracking for coherent optical
//! receivers.
//!
//! The crate is `no_std` (with `alloc`) by default; enable the `std` feature
//! to route elementary functions through the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algebra;
pub mod baselines;
pub mod channel;
pub mod constellation;
pub mod error;
pub mod rng;
pub mod scalar;
pub mod tracker;

pub use error::Error;
