//! Lattices on the group, sampling ratios and the cardinal series.

pub mod bounds;
pub mod lattice;
pub mod wks;

pub use bounds::{ball_offsets, sampling_bounds, SamplingBounds, SUBGRID_TOLERANCE};
pub use lattice::{
    grid_points_e, grid_points_f, jitter, lattice_product, lattice_verify, min_pairwise_distance, Certificates,
    Lattice, Metric, ProductFactors, Window,
};
pub use wks::{sinc, wks_reconstruct, WksReport};
