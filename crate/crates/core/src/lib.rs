//! Emission-aware ride assignment toolkit.
//!
//! The crate models a ride-hailing fleet in which every vehicle carries a
//! per-kilometre CO2-equivalent emission rate, and provides:
//!
//! * geodesic and road-distance estimation ([`geo`]),
//! * vehicle emission profiles and classification ([`fleet`]),
//! * trip datasets, synthetic generation and EV conversion ([`dataset`]),
//! * per-trip route alternatives with controlled trade-offs ([`routing`]),
//! * online threshold-based and offline search-based assignment ([`assign`]),
//! * a deterministic event-driven dispatch simulator ([`sim`]),
//! * aggregate emission, waiting-time and equity metrics ([`metrics`]).
//!
//! Everything here is pure computation over in-memory data; file formats and
//! the command-line front end live in the companion `greenride-cli` crate.
//! The crate is `no_std`-compatible (with `alloc`) when built with
//! `--no-default-features --features libm`.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("greenride-core needs either the `std` or the `libm` feature for float math");

pub mod assign;
pub mod dataset;
mod error;
pub mod fleet;
pub mod geo;
mod math;
pub mod metrics;
pub mod routing;
pub mod sim;

pub use error::{Error, Result};
