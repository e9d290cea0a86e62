//! Piecewise-linear finite elements on a triangulation: mass/stiffness
//! assembly, the energy J_d, the Nehari constraint G_d and the Riesz-lifted
//! gradient, with Neumann conditions arising naturally.
//!
//! Nonlinear terms use lumped-mass (nodal) quadrature so that the discrete
//! energy, constraint and gradient are exactly consistent with each other;
//! the Nehari projection relies on that consistency.

mod sparse;

pub use sparse::CsrMatrix;

use std::sync::Arc;

use crate::geometry::Mesh;
use crate::radial::{Nonlinearity, OVERFLOW_LIMIT};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("degenerate triangle {0} in assembly (area {1:.3e})")]
    DegenerateTriangle(usize, f64),
    #[error("field length {0} does not match mesh node count {1}")]
    LengthMismatch(usize, usize),
    #[error("field contains a non-finite value at node {0}")]
    NonFinite(usize),
    #[error("overflow in e^(v^2): |v| = {0:.3} > {1} at node {2}; iterate has diverged")]
    Overflow(f64, f64, usize),
    #[error("linear solver failed: {0}")]
    Solver(String),
}

/// Nodal coefficient vector for a P1 function on a mesh.
#[derive(Debug, Clone)]
pub struct Field {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Field, FemError> {
        if values.len() != mesh.node_count() {
            return Err(FemError::LengthMismatch(values.len(), mesh.node_count()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FemError::NonFinite(i));
        }
        Ok(Field { mesh, values })
    }

    pub fn constant(mesh: Arc<Mesh>, value: f64) -> Field {
        let n = mesh.node_count();
        Field { mesh, values: vec![value; n] }
    }

    pub fn from_fn(mesh: Arc<Mesh>, f: impl Fn([f64; 2]) -> f64) -> Field {
        let values = mesh.nodes().iter().map(|&p| f(p)).collect();
        Field { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn scale(&self, t: f64) -> Field {
        Field { mesh: self.mesh.clone(), values: self.values.iter().map(|v| t * v).collect() }
    }

    /// Interpolated value at an arbitrary point (clamped to the mesh).
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let (t, bary) = self.mesh.locate_clamped(p);
        let tri = self.mesh.triangles()[t];
        bary[0] * self.values[tri[0]] + bary[1] * self.values[tri[1]] + bary[2] * self.values[tri[2]]
    }

    /// Index of the largest nodal value; ties break to the smallest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }
}

/// Assembled P1 operators. Stiffness and mass share one sparsity pattern.
#[derive(Debug, Clone)]
pub struct AssembledOperators {
    mesh: Arc<Mesh>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    stiff: Vec<f64>,
    mass: Vec<f64>,
    lumped: Vec<f64>,
}

/// Exact element integration of ∫∇φ_i·∇φ_j and ∫φ_iφ_j;
/// lumped_mass_i = Σ_j mass_ij.
pub fn assemble(mesh: &Arc<Mesh>) -> Result<AssembledOperators, FemError> {
    let n = mesh.node_count();
    // shared pattern from node adjacency (plus diagonal), sorted per row
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        let nbrs = mesh.neighbors(i);
        let mut cols: Vec<usize> = Vec::with_capacity(nbrs.len() + 1);
        cols.extend_from_slice(nbrs);
        cols.push(i);
        cols.sort_unstable();
        col_idx.extend_from_slice(&cols);
        row_ptr.push(col_idx.len());
    }
    let nnz = col_idx.len();
    let mut stiff = vec![0.0; nnz];
    let mut mass = vec![0.0; nnz];
    let entry = |row: usize, col: usize| -> usize {
        let lo = row_ptr[row];
        let hi = row_ptr[row + 1];
        lo + col_idx[lo..hi].binary_search(&col).expect("pattern covers all element pairs")
    };

    for (ti, tri) in mesh.triangles().iter().enumerate() {
        let [a, b, c] = tri.map(|v| mesh.nodes()[v]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let area = 0.5 * det;
        if !(area > 1e-14) {
            return Err(FemError::DegenerateTriangle(ti, area));
        }
        // constant gradients of the barycentric basis
        let grads = [
            [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
            [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
            [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
        ];
        for i in 0..3 {
            for j in 0..3 {
                let k = entry(tri[i], tri[j]);
                stiff[k] += area * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                mass[k] += area * if i == j { 1.0 / 6.0 } else { 1.0 / 12.0 };
            }
        }
    }
    let mut lumped = vec![0.0; n];
    for i in 0..n {
        for k in row_ptr[i]..row_ptr[i + 1] {
            lumped[i] += mass[k];
        }
    }
    Ok(AssembledOperators { mesh: mesh.clone(), row_ptr, col_idx, stiff, mass, lumped })
}

impl AssembledOperators {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn lumped_mass(&self) -> &[f64] {
        &self.lumped
    }

    pub fn node_count(&self) -> usize {
        self.lumped.len()
    }

    fn matvec(&self, vals: &[f64], x: &[f64], out: &mut [f64]) {
        for i in 0..self.node_count() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += vals[k] * x[self.col_idx[k]];
            }
            out[i] = acc;
        }
    }

    pub fn stiffness_apply(&self, x: &[f64], out: &mut [f64]) {
        self.matvec(&self.stiff, x, out)
    }

    pub fn mass_apply(&self, x: &[f64], out: &mut [f64]) {
        self.matvec(&self.mass, x, out)
    }

    /// xᵀ K x (Dirichlet energy) — exact for P1 fields.
    pub fn stiffness_energy(&self, x: &[f64]) -> f64 {
        self.quadratic(&self.stiff, x)
    }

    /// xᵀ M x = ∫ u² for the P1 interpolant.
    pub fn mass_energy(&self, x: &[f64]) -> f64 {
        self.quadratic(&self.mass, x)
    }

    fn quadratic(&self, vals: &[f64], x: &[f64]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.node_count() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += vals[k] * x[self.col_idx[k]];
            }
            total += x[i] * acc;
        }
        total
    }

    /// d·K + M as one CSR matrix (shared pattern).
    pub fn system_matrix(&self, d: f64) -> CsrMatrix {
        let vals = self
            .stiff
            .iter()
            .zip(&self.mass)
            .map(|(k, m)| d * k + m)
            .collect();
        CsrMatrix::from_parts(self.row_ptr.clone(), self.col_idx.clone(), vals)
    }

    /// Total mesh area via the partition of unity: 1ᵀ M 1.
    pub fn total_mass(&self) -> f64 {
        self.lumped.iter().sum()
    }
}

fn check_overflow(field: &Field) -> Result<(), FemError> {
    for (i, &v) in field.values().iter().enumerate() {
        if v.abs() > OVERFLOW_LIMIT {
            return Err(FemError::Overflow(v.abs(), OVERFLOW_LIMIT, i));
        }
    }
    Ok(())
}

/// J_d(v) = ½∫(d|∇v|² + v²) − ∫ F(v), with the nonlinear part by
/// lumped-mass quadrature Σ_i lumped_i F(v_i).
pub fn energy(ops: &AssembledOperators, field: &Field, d: f64) -> Result<f64, FemError> {
    check_overflow(field)?;
    let nl = Nonlinearity;
    let v = field.values();
    let quad = 0.5 * (d * ops.stiffness_energy(v) + ops.mass_energy(v));
    let nonlinear: f64 = v
        .iter()
        .zip(&ops.lumped)
        .map(|(&vi, &li)| li * nl.big_f(vi))
        .sum();
    Ok(quad - nonlinear)
}

/// G_d(v) = J_d'(v)v = ∫(d|∇v|² + v²) − ∫ v²(e^{v²} − 1).
pub fn nehari_value(ops: &AssembledOperators, field: &Field, d: f64) -> Result<f64, FemError> {
    check_overflow(field)?;
    let v = field.values();
    let quad = d * ops.stiffness_energy(v) + ops.mass_energy(v);
    let nonlinear: f64 = v
        .iter()
        .zip(&ops.lumped)
        .map(|(&vi, &li)| {
            let v2 = vi * vi;
            li * v2 * (v2.exp() - 1.0)
        })
        .sum();
    Ok(quad - nonlinear)
}

/// Discrete residual r_i = d(Kv)_i + (Mv)_i − lumped_i f(v_i); this is the
/// Euler–Lagrange form of `energy` under the same quadrature.
pub fn residual(ops: &AssembledOperators, field: &Field, d: f64) -> Result<Vec<f64>, FemError> {
    check_overflow(field)?;
    let nl = Nonlinearity;
    let v = field.values();
    let n = v.len();
    let mut kv = vec![0.0; n];
    let mut mv = vec![0.0; n];
    ops.stiffness_apply(v, &mut kv);
    ops.mass_apply(v, &mut mv);
    Ok((0..n)
        .map(|i| d * kv[i] + mv[i] - ops.lumped[i] * nl.f(v[i]))
        .collect())
}

/// Gradient of J_d in the d-weighted H¹ inner product: g solves
/// (d·K + M) g = r. Vanishes exactly at discrete critical points.
pub fn gradient(ops: &AssembledOperators, field: &Field, d: f64) -> Result<Field, FemError> {
    let r = residual(ops, field, d)?;
    let sys = ops.system_matrix(d);
    let g = sys
        .solve_cg_jacobi(&r, 1e-11, 10 * ops.node_count().max(100))
        .map_err(FemError::Solver)?;
    Field::new(ops.mesh.clone(), g)
}

/// ‖gradient‖ in the H¹_d norm: √(gᵀ (dK + M) g) = √(gᵀ r).
pub fn gradient_norm(ops: &AssembledOperators, field: &Field, d: f64) -> Result<f64, FemError> {
    let r = residual(ops, field, d)?;
    let sys = ops.system_matrix(d);
    let g = sys
        .solve_cg_jacobi(&r, 1e-11, 10 * ops.node_count().max(100))
        .map_err(FemError::Solver)?;
    let sq: f64 = g.iter().zip(&r).map(|(a, b)| a * b).sum();
    Ok(sq.max(0.0).sqrt())
}
