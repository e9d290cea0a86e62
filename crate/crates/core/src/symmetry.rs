//! Disk symmetry diagnostics: axial symmetry about the diameter through the
//! peak, angular monotonicity away from the axis, and vertical monotonicity
//! in the lower half-disk. Strict pointwise inequalities are tested up to a
//! signed tolerance of order the gradient-recovery error.

use crate::fem::Field;
use crate::ground_state::count_local_maxima;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("field is constant; the symmetry axis is undefined")]
    ConstantField,
    #[error("peak at the origin: the axis O->P is degenerate")]
    DegenerateAxis,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub d: f64,
    /// direction of O → P_d in radians
    pub axis_angle: f64,
    /// sup |u − u∘reflection| / max u after alignment
    pub reflection_residual: f64,
    /// min of x₁∂₂u − x₂∂₁u over {x₁ > margin}
    pub angular_min: f64,
    /// min of ∂₂u over the lower half-disk (minus a band at the antipode)
    pub vertical_min: f64,
    pub maxima_count: usize,
    pub max_grad: f64,
}

/// Rotate nodal data so the peak lies on the positive x₂-axis; values are
/// re-interpolated onto the original mesh.
pub fn align_axis(u: &Field, peak: [f64; 2]) -> Result<(Field, f64), SymmetryError> {
    if u.max() - u.min() <= 1e-6 * u.max().abs().max(1e-300) {
        return Err(SymmetryError::ConstantField);
    }
    let r = peak[0].hypot(peak[1]);
    if r < 1e-12 {
        return Err(SymmetryError::DegenerateAxis);
    }
    let axis_angle = peak[1].atan2(peak[0]);
    let rot = std::f64::consts::FRAC_PI_2 - axis_angle;
    if rot.abs() < 1e-15 {
        return Ok((u.clone(), axis_angle));
    }
    let (c, s) = (rot.cos(), rot.sin());
    let mesh = u.mesh().clone();
    // u_rot(x) = u(R⁻¹ x)
    let values = mesh
        .nodes()
        .iter()
        .map(|&p| {
            let q = [c * p[0] + s * p[1], -s * p[0] + c * p[1]];
            u.eval(q)
        })
        .collect();
    Ok((Field::new(mesh, values).expect("interpolation preserves finiteness"), axis_angle))
}

/// sup over nodes of |u(x₁,x₂) − u(−x₁,x₂)| / max u, reflected values by
/// triangle interpolation.
pub fn reflection_residual(u: &Field) -> f64 {
    let umax = u.max().abs().max(1e-300);
    let mesh = u.mesh();
    let mut worst: f64 = 0.0;
    for (i, &p) in mesh.nodes().iter().enumerate() {
        let mirrored = u.eval([-p[0], p[1]]);
        worst = worst.max((u.values()[i] - mirrored).abs());
    }
    worst / umax
}

/// Area-weighted recovery of nodal gradients from the per-triangle constant
/// P1 gradients.
pub fn recovered_gradients(u: &Field) -> Vec<[f64; 2]> {
    let mesh = u.mesh();
    let vals = u.values();
    let mut grads = vec![[0.0; 2]; mesh.node_count()];
    let mut weights = vec![0.0; mesh.node_count()];
    for tri in mesh.triangles() {
        let [a, b, c] = tri.map(|v| mesh.nodes()[v]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let area = 0.5 * det;
        let g = [
            ((b[1] - c[1]) * vals[tri[0]]
                + (c[1] - a[1]) * vals[tri[1]]
                + (a[1] - b[1]) * vals[tri[2]])
                / det,
            ((c[0] - b[0]) * vals[tri[0]]
                + (a[0] - c[0]) * vals[tri[1]]
                + (b[0] - a[0]) * vals[tri[2]])
                / det,
        ];
        for &v in tri {
            grads[v][0] += area * g[0];
            grads[v][1] += area * g[1];
            weights[v] += area;
        }
    }
    for (g, w) in grads.iter_mut().zip(&weights) {
        g[0] /= w;
        g[1] /= w;
    }
    grads
}

/// Minimum of the angular derivative x₁∂₂u − x₂∂₁u over nodes with
/// x₁ > margin, with its location.
pub fn angular_monotonicity(u: &Field, margin: f64) -> (f64, [f64; 2]) {
    let grads = recovered_gradients(u);
    let mesh = u.mesh();
    let mut min = f64::INFINITY;
    let mut loc = [f64::NAN; 2];
    for (i, &p) in mesh.nodes().iter().enumerate() {
        if p[0] <= margin {
            continue;
        }
        let v = p[0] * grads[i][1] - p[1] * grads[i][0];
        if v < min {
            min = v;
            loc = p;
        }
    }
    (min, loc)
}

/// Minimum of ∂₂u over nodes in the lower half-disk, excluding a band of
/// width `band` around the antipode (0, −R) where the discrete strictness
/// degenerates.
pub fn vertical_monotonicity(u: &Field, band: f64) -> f64 {
    let grads = recovered_gradients(u);
    let mesh = u.mesh();
    let mut min = f64::INFINITY;
    // antipode = lowest mesh node
    let mut antipode = [0.0, f64::INFINITY];
    for &p in mesh.nodes() {
        if p[1] < antipode[1] {
            antipode = p;
        }
    }
    for (i, &p) in mesh.nodes().iter().enumerate() {
        if p[1] >= 0.0 {
            continue;
        }
        if (p[0] - antipode[0]).hypot(p[1] - antipode[1]) < band {
            continue;
        }
        min = min.min(grads[i][1]);
    }
    min
}

/// Full symmetry diagnostic for a solved state; the caller passes the peak.
pub fn symmetry_report(
    u: &Field,
    peak: [f64; 2],
    d: f64,
) -> Result<SymmetryReport, SymmetryError> {
    let (aligned, axis_angle) = align_axis(u, peak)?;
    let h = u.mesh().h_max();
    let grads = recovered_gradients(&aligned);
    let max_grad = grads
        .iter()
        .map(|g| g[0].hypot(g[1]))
        .fold(0.0_f64, f64::max);
    let (angular_min, _) = angular_monotonicity(&aligned, 3.0 * h);
    let vertical_min = vertical_monotonicity(&aligned, 2.0 * h);
    let (maxima_count, _) = count_local_maxima(u, 0.5);
    Ok(SymmetryReport {
        d,
        axis_angle,
        reflection_residual: reflection_residual(&aligned),
        angular_min,
        vertical_min,
        maxima_count,
        max_grad,
    })
}
