//! Exact-arithmetic engines for restricted general linear and Pexider
//! functional equations.
//!
//! Everything runs on arbitrary-precision rationals; verdicts are decided,
//! not approximated. The crate splits into:
//!
//! - [`domains`]: open intervals, boxes, and finitely generated cones, with
//!   the invariance decision `∑ αᵢK ⊆ K` and the symmetric-subdomain
//!   construction;
//! - [`equation`]: coefficient specs, affine candidates, the solution-family
//!   characterization, and exact seeded verification;
//! - [`extension`]: the local-solve / stitch machine that recovers a global
//!   affine solution from sampled patch data, plus the reduction of the
//!   general linear equation to a Pexider system;
//! - [`groups`]: exhaustive Pexider solving and homomorphism enumeration
//!   over finite abelian groups;
//! - [`rational`], [`sampling`], [`simplex`]: the exact substrate.

pub mod domains;
pub mod equation;
pub mod extension;
pub mod groups;
pub mod rational;
pub mod sampling;
pub mod simplex;

pub use domains::{check_invariance, find_symmetric_subdomain, weighted_image, Domain};
pub use equation::{characterize, verify_affine_solution, AffineMap, EquationSpec};
pub use extension::{extend_general_linear, local_solve, stitch, verify_pexider};
pub use groups::{check_weighted_pexider, enumerate_homomorphisms, solve_pexider_unrestricted};
pub use rational::{QMatrix, QVector, Rational};
