//! Lie symmetry analysis of the time-fractional K(m,n) equation
//! `D^a_t u + zeta (u^m)_x + g(t) (u^n)_xxx = 0`.
//!
//! [`expr`] is a small exact computer-algebra core, [`pde`] models the
//! equation family, [`symmetry`] computes prolongations and classifies
//! point symmetries, [`reduction`] builds similarity reductions, and
//! [`numerics`] provides the floating-point oracle used to check all of it.

pub mod expr;
pub mod numerics;
pub mod parallel;
pub mod pde;
pub mod symmetry;
pub mod catalog;
pub mod reduction;
