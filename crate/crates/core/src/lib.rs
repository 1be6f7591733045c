//! Design automation for conformal multilayer band-pass frequency-selective surfaces.
//!
//! The crate covers the cascaded-sheet circuit model ([`circuit`]), the mapping from
//! circuit values to cell geometry ([`element`]), Goldberg tessellation of the layer
//! spheres ([`goldberg`]), conformal artwork generation and export ([`artwork`]),
//! the raised-cosine feed ([`feed`]), Gaussian far-field weighting and time gating of
//! measured data ([`postproc`]), a ray-based transmission estimator for the dome
//! ([`estimator`]) and the batch command line ([`cli`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artwork;
pub mod circuit;
pub mod cli;
pub mod element;
pub mod error;
pub mod estimator;
pub mod feed;
pub mod geom;
pub mod goldberg;
pub mod postproc;

pub use error::{Error, Result};
