//! Sparse-recovery simulation with analog proximal operators.
//!
//! This crate implements the iterative shrinkage-thresholding algorithm
//! (ISTA) for underdetermined linear measurements, with a pluggable proximal
//! stage: either an ideal operator (soft-thresholding for ℓ1, or the
//! minimax-concave-penalty prox) or the transfer function of a resistor +
//! anti-parallel-diode network that approximates those operators in analog
//! hardware. Circuit noise (shot, thermal, amplifier) can be injected at the
//! points where a physical implementation would add it, and a Monte-Carlo
//! harness averages MSE-vs-iteration curves over randomized problem
//! ensembles.
//!
//! Module map:
//! - [`lambert`] — principal-branch Lambert W evaluator, including a
//!   log-domain form that never materializes the overflowing exponential
//!   inside the diode transfer function.
//! - [`proxops`] — ideal soft-thresholding and MCP proximal operators plus a
//!   brute-force argmin oracle for tests.
//! - [`diode`] — the diode V-I model, the closed-form circuit transfer
//!   `v_out(i_in)`, and the two resistor calibrations.
//! - [`noise`] — shot/thermal/amplifier variance formulas and Gaussian
//!   samplers.
//! - [`solver`] — the ISTA iteration with pluggable prox stage and noise
//!   injection.
//! - [`harness`] — problem-ensemble generation, Monte-Carlo trial runner,
//!   and CSV emission.
//! - [`seeds`] — deterministic derivation of per-trial and per-stage RNG
//!   stream seeds.
//! - [`cli`] — command-line entry point.

pub mod cli;
pub mod diode;
pub mod error;
pub mod harness;
pub mod lambert;
pub mod noise;
pub mod proxops;
pub mod seeds;
pub mod solver;

pub use error::{Error, Result};
