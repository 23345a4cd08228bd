//! Band-limited CR functions on quadratic CR groups: construction,
//! evaluation, norms, inequality checks, sampling and projections.

pub mod convexgeom;
pub mod crgroup;
pub mod normcalc;
pub mod error;
pub mod presets;
pub mod projector;
pub mod sampling;
pub mod spectral;
pub mod vecops;
pub mod verify;

pub use convexgeom::{ConvexBody, HalfSpace};
pub use crgroup::{ComplexPoint, GroupElement, GroupSpec, Pfaffian, DEFAULT_EPS_PD};
pub use error::{Error, Result};
pub use presets::GroupPreset;
pub use spectral::{
    build_quadrature, BandlimitedFunction, DensitySpec, FPoly, Quadrature, SpectralDensity,
};
