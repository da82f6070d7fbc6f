//! Band structure of a one-dimensional lattice of Pöschl-Teller wells.
//!
//! The lattice potential is built from the reflectionless well
//! `V(x) = -(α²/2) l(l+1) sech²(αx)` (units ħ = m = 1) repeated with
//! period `2a`. Cell solutions at arbitrary energy are produced in closed
//! form by a ladder of first-order intertwining operators, the Bloch
//! condition over one period reduces to the Hill discriminant
//! `D(E) = tr M(E) / 2`, and bands are the energy intervals with `|D| ≤ 1`.
//!
//! Modules:
//! - [`model`] — physical parameters and the (periodized) potential
//! - [`susy`] — factorization machinery: superpotential, partner wells,
//!   hierarchy, bound spectrum, raising operator
//! - [`cell`] — closed-form solution bases of the single-cell problem
//! - [`dispersion`] — monodromy matrix, discriminant, and the literal
//!   transcendental band functions for cross-checking
//! - [`bands`] — discriminant scans, band-edge root finding, assembly
//! - [`oracle`] — independent numerical verification (Numerov/RK4
//!   integration, shooting); shares no solution formulas with [`cell`]

pub mod bands;
pub mod cell;
pub mod dispersion;
pub mod model;
pub mod oracle;
pub mod susy;

mod poly;

pub use model::ModelParams;
