//! Entropy, cross-entropy, Kullback-Leibler and general f-divergences between
//! densities of location-scale families.
//!
//! A location-scale density is a standard density `p` moved by an element
//! `(l, s)` of the location-scale group: `p_{l,s}(x) = p((x - l) / s) / s`.
//! Every f-divergence between two such densities can be rewritten as a
//! divergence between a *standard* density and a single transformed density,
//! which is what [`divergence::fdiv`] does before falling back to quadrature.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`group`] | the group `R x R++`, composition, inverse, action on the line |
//! | [`densities`] | standard density catalog and the location-scale wrapper |
//! | [`quadrature`] | adaptive Gauss-Kronrod integration, infinite ranges, divergence probing |
//! | [`divergence`] | generators, reductions, closed forms, symmetry defects |
//! | [`projection`] | f-divergence minimization onto a location-scale family |
//! | [`check`] | seeded randomized verification batteries |
//! | [`cli`] | the `lsdiv` command-line front end |

pub mod check;
pub mod cli;
pub mod densities;
pub mod divergence;
mod error;
pub mod group;
mod nelder_mead;
pub mod projection;
pub mod quadrature;

pub use densities::{Family, LocationScaleDensity, StandardDensity};
pub use divergence::{DivergenceResult, FDivGenerator, Method};
pub use error::{Error, Result};
pub use group::GroupElement;
pub use projection::ProjectionResult;
pub use quadrature::{IntegralResult, QuadratureConfig};
