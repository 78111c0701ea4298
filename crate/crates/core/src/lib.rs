//! Constructive synthesis of feed-forward networks with ReLU and square
//! activations that represent localized Taylor approximants exactly.
//!
//! The pieces, bottom-up:
//!
//! - [`index`]: multi-indices, grid indices, monomials.
//! - [`netgraph`]: the computation-graph IR, evaluation, parameter counts
//!   and JSON I/O.
//! - [`partition`]: the trapezoid partition of unity and its ReLU form.
//! - [`gadgets`]: exact multiplication through squares and tournament
//!   products.
//! - [`synthesis`]: Sobolev, analytic and coordinate-subspace pipelines.
//! - [`oracle`], [`sampling`], [`fdcheck`], [`rates`]: target functions and
//!   the measurement harness.

pub mod error;
pub mod fdcheck;
pub mod gadgets;
pub mod index;
pub mod netgraph;
pub mod oracle;
pub mod partition;
pub mod rates;
pub mod sampling;
pub mod selftest;
pub mod synthesis;

pub use error::{Error, Result};
pub use index::{GridIndex, MultiIndex, SafetyCap};
pub use netgraph::{Activation, ComplexityReport, NetGraph};
pub use oracle::{FunctionOracle, SharedOracle};
pub use synthesis::{Regime, Synthesis, SynthesisOptions, SynthesisReport};
