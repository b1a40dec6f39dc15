//! Chern–Simons invariants (mod Z) of flat connections valued in the universal
//! cover of U(2,1), with applications to Seifert fibered homology spheres.
//!
//! The crate is organised bottom-up:
//!
//! - [`ug21`]: numeric model of U(2,1) and its universal cover `G`.
//! - [`normal_forms`]: boundary normal forms of flat connections on a torus.
//! - [`cs_variation`]: variation of the Chern–Simons invariant along paths of
//!   normal forms, with a quadrature oracle, and the gauge-shift formula.
//! - [`seifert`]: exact closed formula and cut-and-paste pipeline for Seifert
//!   fibered homology spheres.
//! - [`repfinder`]: numerical reconstruction of representations from
//!   conjugacy-class data.
//!
//! Exact values are carried as [`Rational`]s and reduced with [`ModZ`].

pub mod cs_variation;
pub mod error;
pub mod normal_forms;
pub mod rational;
pub mod repfinder;
pub mod seifert;
pub mod ug21;

pub use error::{Error, Result};
pub use rational::{ModZ, Rational};
pub use ug21::{GElement, IsometryType, LieAlgebraElement, Tolerances, U21Matrix};
