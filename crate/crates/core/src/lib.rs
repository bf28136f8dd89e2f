//! Trace-based interpolation of hypersurface germs in an affine toric chart.
//!
//! A family of germs `V_1, …, V_N` is cut by a moving family of curves
//! `C_a = {a_k0 = P_k(a'_k, x)}`. Summing (trace) or multiplying (norm) the
//! values of a polynomial over the intersection points gives functions of the
//! curve parameters whose shape decides whether the germs lie on a single
//! algebraic hypersurface, recovers its equation, and checks its class
//! against mixed volumes of Newton polytopes.

pub mod algebra;
pub mod cli;
pub mod curves;
pub mod polytope;
pub mod problem;
pub mod reconstruct;
pub mod residues;
pub mod traces;

pub use num_complex::Complex64 as C64;
