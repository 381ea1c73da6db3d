//! Digraph Laplacian analysis with built-in cross-verification.
//!
//! The library computes, by independent routes, the objects that govern
//! consensus on a weighted digraph:
//!
//! - the Laplacian `L = D - A` and its spectrum ([`digraph`], [`spectral`]);
//! - strong/weak components, sink components, and the in-forest dimension
//!   `d`, structurally ([`components`]) and by exhaustive enumeration of
//!   spanning converging forests ([`forests`]);
//! - the projector onto the null space of `L`: the normalized matrix of
//!   maximal in-forests, the resolvent limit `(I + tau L)^{-1}`, and the
//!   long-run limit of the Perron matrix `P = I - eps L` ([`dynamics`]);
//! - continuous and discrete consensus trajectories and their limits.
//!
//! Everything is checked against everything: `rank(L) = n - d`, the three
//! projector routes agree, trajectories converge to the projected initial
//! state. The [`report`] module bundles these cross-checks, and the
//! `lapforest` binary exposes them as `analyze`, `simulate`, and `fuzz`
//! subcommands.

pub mod cli;
pub mod components;
pub mod digraph;
pub mod dynamics;
pub mod forests;
pub mod random;
pub mod report;
pub mod spectral;

pub use digraph::{laplacian, Arc, Digraph, LaplacianMatrix};
