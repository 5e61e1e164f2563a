//! Rank-1 lattice rules and lattice-trained neural networks.
//!
//! The crate bundles three layers of machinery:
//!
//! - **Lattice quadrature**: rank-1 lattice point sets, random shifting,
//!   worst-case-error criteria for weighted Sobolev/Korobov spaces, and
//!   component-by-component (CBC) construction of generating vectors
//!   ([`lattice`], [`cbc`], [`weights`]).
//! - **Tiny MLPs**: non-periodic and periodic fully-connected networks with
//!   smooth activations, analytic backprop, full-batch Adam, the tailored
//!   first-layer regularizer, and regularity audits of trained parameters
//!   ([`network`], [`training`]).
//! - **Baselines and harness**: truncated trigonometric series and kernel
//!   interpolation on lattice points (both FFT-backed), plus an experiment
//!   driver that measures training error, estimated generalization error,
//!   and their gap across a grid of lattice sizes ([`baselines`],
//!   [`harness`]).
//!
//! Everything is deterministic given a 64-bit seed; see [`rng`].

pub mod baselines;
pub mod cbc;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod matrix;
pub mod network;
pub mod rng;
pub mod training;
pub mod weights;

pub use error::{Error, Result};
pub use lattice::{GeneratingVector, PointSet, Shift};
pub use weights::{DecaySequence, RatePlan, WeightScheme};
