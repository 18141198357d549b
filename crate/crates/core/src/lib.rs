//! Discrete quantum oscillators built from classical orthogonal polynomials
//! on uniform and q-lattices.
//!
//! - [`families`]: Hahn, Meixner, Kravchuk and Charlier data, weights and norms.
//! - [`gridops`]: grid functions and shift operators.
//! - [`factorize`]: the Hamiltonian `h1`, oscillator functions and ladder factorizations.
//! - [`algebra`]: Sp(2,R), so(3) and oscillator algebras for `sigma'' = 0`.
//! - [`qext`]: the Al-Salam & Carlitz I example on the q-lattice.
//! - [`suite`] and [`report`]: the verification checks and their output.
//! - [`cli`]: the command-line front end.

pub mod algebra;
pub mod cli;
mod extended;
pub mod factorize;
pub mod families;
pub mod gridops;
pub mod hypergeometric;
pub mod qext;
pub mod report;
pub mod suite;
