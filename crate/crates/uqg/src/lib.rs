//! Exact symbolic computation for two-parameter quantized enveloping
//! algebras with sign interpolation, their Verma-module Hermitian forms,
//! central characters, quantum homogeneous spaces, and the classical
//! contraction Lie algebras they degenerate to.
//!
//! All arithmetic is exact: scalars live in the field of Laurent fractions
//! over the rationals in a formal root `v` of `q` (`q = v^D` for a
//! per-session denominator `D`), and order decisions (positivity, signature)
//! are made only after evaluation at an explicit rational point.

pub mod scalars;
pub mod linalg;
pub mod root_data;
pub mod qea;
pub mod cogroupoid;
pub mod verma;
pub mod harish_chandra;
pub mod quantum_space;
pub mod contraction;
pub mod cli;
