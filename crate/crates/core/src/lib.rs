//! Structure, Laplacian kernels and asymptotics of weighted directed graphs.
//!
//! The pipeline is: parse a [`Digraph`], decompose it into reaches
//! ([`structure`]), build the random-walk Laplacian ([`graph::build_matrix`]),
//! compute bases of its left and right kernels ([`kernels`]), and read off
//! consensus and diffusion limits ([`dynamics`]), influence and pagerank
//! ([`ranking`]). All of it runs either in exact rational arithmetic or in
//! `f64`, selected by the [`Scalar`] type parameter.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod embedding;
pub mod error;
pub mod example;
pub mod graph;
pub mod kernels;
pub mod matrix;
pub mod ranking;
pub mod scalar;
pub mod structure;

pub use error::{Error, Result};
pub use graph::{build_matrix, parse_graph, DanglingPolicy, Digraph, GraphFormat, MatrixForm, MatrixKind};
pub use kernels::{KernelBases, Tolerances};
pub use matrix::{Lu, Matrix};
pub use scalar::{Mode, Rational, Scalar};
pub use structure::{reach_decomposition, Reach, ReachDecomposition};
