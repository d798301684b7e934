//! Robustness of complex networks under node-removal attacks.
//!
//! The crate covers the whole pipeline: synthetic network generation
//! ([`netgen`]), attack simulation of connectivity and controllability
//! curves ([`attack`]), receptive-field graph encoding ([`lfr`]), a small
//! CPU convolutional network engine that regresses robustness curves
//! ([`nn`]), classical spectral robustness measures ([`spectral`]) and the
//! experiment harness that ties them together ([`harness`]).

pub mod attack;
pub mod error;
pub mod graph;
pub mod harness;
pub mod lfr;
pub mod netgen;
pub mod nn;
pub mod rng;
pub mod spectral;
pub mod text;

pub use crate::error::{Error, Result};
pub use crate::graph::{Graph, NodeMask};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/attacks.md")]
    mod attacks {}
    #[doc = include_str!("../../../book/src/receptive-fields.md")]
    mod receptive_fields {}
    #[doc = include_str!("../../../book/src/networks.md")]
    mod networks {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
