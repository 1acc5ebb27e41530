//! Computational function theory on the unit disc.
//!
//! The crate provides, layer by layer:
//!
//! * [`hyperbolic`] — the pseudohyperbolic bracket, the hyperbolic
//!   metric, paths, geodesics, automorphisms, and lattices;
//! * [`blaschke`] — finite Blaschke products and scaled test functions,
//!   hyperbolic derivatives, and outer functions from boundary modulus
//!   data;
//! * [`quotients`] — triangles of hyperbolic difference quotients built
//!   from data or from functions, with compatibility-constant sweeps;
//! * [`solver`] — solvability verdicts for finite interpolation problems
//!   (triangle criteria cross-checked against the Pick matrix) and the
//!   Schur recursion producing explicit interpolants;
//! * [`geometry`] — separation constants, greedy separated partitions,
//!   Carleson-square layer counts and density fitting, and grid-based
//!   density radii for node sequences;
//! * [`sampling`] — hyperbolic Lipschitz capacity, pairwise sampling
//!   ratios, and sampling-constant estimates over test-function families;
//! * [`assembly`] — interpolant assembly from a base solution, Blaschke
//!   factor, and outer factor, together with the audits and the stress
//!   generator for clustered nodes.

// Validation guards are written `!(x > 0.0)` so NaN parameters fail closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod blaschke;
pub mod error;
pub mod geometry;
pub mod hyperbolic;
pub mod quotients;
pub mod sampling;
pub mod selfmap;
pub mod ser;
pub mod solver;

pub use error::{Error, Result};
pub use hyperbolic::DiscPoint;
pub use selfmap::SelfMap;
