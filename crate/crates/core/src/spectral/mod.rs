//! Spectral side: quadrature on `K`, densities, and synthesized functions.

pub mod density;
pub mod function;
pub mod poly;
pub mod quadrature;

pub use density::{DensitySpec, SpectralDensity};
pub use function::{kernel_eval, synthesis_constant, BandlimitedFunction, Route, Term};
pub use poly::{ConjPoly, FPoly};
pub use quadrature::{build_quadrature, gauss_legendre, Quadrature};
