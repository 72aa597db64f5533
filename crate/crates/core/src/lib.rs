//! Exact binomial and Poisson probabilities, total-variation and Kolmogorov
//! distances between them, optimal Poisson rates for Bernoulli laws, explicit
//! approximation bounds, numerical certification of stochastic monotonicity
//! along Poisson-approximating binomial sequences, and conservative binomial
//! tests with Poisson-tail levels.
//!
//! `no_std` with `alloc`; elementary functions come from `libm`.

#![no_std]
// `!(x > 0.0)` style tests are used on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
pub mod config;
pub mod dist;
pub mod distances;
pub mod error;
pub mod exact;
pub mod lambda_opt;
pub mod monotonicity;
pub mod special;

pub use dist::{BinomialParams, FinitePmf, PoissonParams};
pub use distances::{kolmogorov_binom_poisson, tv_binom_poisson, DistanceReport};
pub use error::{Error, Result};
