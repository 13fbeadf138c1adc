//! Quadratic differentials on the disk, their vertical laminations, moduli
//! of curve families on flat slit domains and Teichmüller rays.
//!
//! Geometry is generic over [`scalar::Coord`] (`f64` or exact rationals) and
//! numerics over [`scalar::Real`] (`f32` or `f64`).

pub mod error;
pub mod flat_geometry;
pub mod scalar;

pub mod comb_counterexample;
pub mod currents;
pub mod modulus;
pub mod qd_analytic;
pub mod quadrature;
pub mod teich_ray;
pub mod trajectories;

pub use error::{Error, Result};
pub use scalar::{Coord, Exact, Real};

/// Slit domain with exact rational coordinates.
pub type ExactDomain = flat_geometry::SlitDomain<Exact>;
/// Slit domain with `f64` coordinates.
pub type Domain64 = flat_geometry::SlitDomain<f64>;
pub type ExactBoundarySet = flat_geometry::BoundarySet<Exact>;
pub type Qd64 = qd_analytic::PolynomialQD<f64>;
pub type Qd32 = qd_analytic::PolynomialQD<f32>;
pub type Box64 = currents::GeodesicBox<f64>;
pub type Lamination64 = currents::SampledLamination<f64>;
