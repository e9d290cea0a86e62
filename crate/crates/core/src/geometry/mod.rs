//! Planar domains, graded disk triangulations, boundary-straightening
//! charts and the piecewise-linear cutoff.

mod chart;
mod domain;
mod mesh;

pub use chart::{boundary_chart, cutoff_xi, default_chart_radius, StraighteningChart};
pub use domain::{Domain, DomainKind};
pub use mesh::{build_disk_mesh, Mesh};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid mesh resolution: {0}")]
    InvalidResolution(String),
    #[error("point ({0:.6}, {1:.6}) is not on the boundary (distance {2:.3e})")]
    NotOnBoundary(f64, f64, f64),
    #[error("chart radius {0:.6} too large: {1}")]
    ChartRadius(f64, String),
    #[error("point outside chart radius: |z| = {0:.6} > {1:.6}")]
    OutOfChart(f64, f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate triangle {0} (signed area {1:.3e})")]
    DegenerateTriangle(usize, f64),
}
