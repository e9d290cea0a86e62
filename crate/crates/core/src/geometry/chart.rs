//! Local charts that straighten the boundary near a point P: the boundary
//! becomes the graph {z₂ = 0} and the inner normal the positive z₂-axis.
//!
//! The forward map is Φ₁(z) = z₁ − z₂ φ'(z₁), Φ₂(z) = z₂ + φ(z₁), where φ is
//! the boundary written as a graph over the tangent line at P with
//! φ(0) = φ'(0) = 0. Its Jacobian at the origin is the identity and
//! det DΦ(z) = 1 − φ''(0) z₂ + O(|z|²).

use super::domain::Domain;
use super::GeometryError;

#[derive(Clone)]
enum GraphFn {
    /// Flat boundary, φ ≡ 0. Used as a synthetic null chart.
    Flat,
    /// Circle of radius r: φ(ξ) = r − √(r² − ξ²) in the chart frame,
    /// identical at every boundary point.
    Circle { radius: f64 },
    /// Generic boundary graph, evaluated by solving for the arclength
    /// parameter with a Newton iteration seeded from a dense walk.
    Curve { domain: Domain, s_base: f64 },
}

/// Boundary-straightening chart at a base point P.
#[derive(Clone)]
pub struct StraighteningChart {
    base: [f64; 2],
    /// unit tangent at P (first chart axis)
    tangent: [f64; 2],
    /// unit inner normal at P (second chart axis)
    normal: [f64; 2],
    radius: f64,
    curvature_at_base: f64,
    graph: GraphFn,
}

impl std::fmt::Debug for StraighteningChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StraighteningChart")
            .field("base", &self.base)
            .field("radius", &self.radius)
            .field("phi2_at_0", &self.curvature_at_base)
            .finish()
    }
}

/// Default chart radius: a fifth of the smallest radius of curvature.
pub fn default_chart_radius(domain: &Domain) -> f64 {
    0.2 / domain.max_abs_curvature().max(1e-12)
}

/// Build the chart at a boundary point P (must lie on ∂Ω within 1e-8 of the
/// domain scale). Fails when the boundary is not a graph over the tangent
/// line out to the requested radius.
pub fn boundary_chart(
    domain: &Domain,
    p: [f64; 2],
    chart_radius: f64,
) -> Result<StraighteningChart, GeometryError> {
    if chart_radius <= 0.0 {
        return Err(GeometryError::InvalidParameter(
            "chart radius must be positive".into(),
        ));
    }
    let (s, q) = domain.project(p);
    let dist = (q[0] - p[0]).hypot(q[1] - p[1]);
    let scale = domain.perimeter().max(1.0);
    if dist > 1e-8 * scale {
        return Err(GeometryError::NotOnBoundary(p[0], p[1], dist));
    }
    let tangent = domain.tangent(s);
    let normal = domain.inner_normal(s);
    let graph = match domain.kind() {
        super::DomainKind::UnitDisk => GraphFn::Circle { radius: 1.0 },
        super::DomainKind::GenericCurve => match circle_radius_of(domain) {
            Some(r) => GraphFn::Circle { radius: r },
            None => GraphFn::Curve { domain: domain.clone(), s_base: s },
        },
    };
    let chart = StraighteningChart {
        base: q,
        tangent,
        normal,
        radius: chart_radius,
        curvature_at_base: domain.curvature(s),
        graph,
    };
    chart.check_graph_condition()?;
    Ok(chart)
}

/// Circles are charted in closed form regardless of how the domain was built.
fn circle_radius_of(domain: &Domain) -> Option<f64> {
    let kmax = domain.max_abs_curvature();
    let n = 16;
    for i in 0..n {
        let s = domain.perimeter() * i as f64 / n as f64;
        if (domain.curvature(s) - kmax).abs() > 1e-9 * kmax {
            return None;
        }
    }
    Some(1.0 / kmax)
}

impl StraighteningChart {
    /// Synthetic chart with a flat boundary (φ ≡ 0) based at the origin,
    /// tangent along x₁ and inner normal along x₂.
    pub fn flat(radius: f64) -> Self {
        StraighteningChart {
            base: [0.0, 0.0],
            tangent: [1.0, 0.0],
            normal: [0.0, 1.0],
            radius,
            curvature_at_base: 0.0,
            graph: GraphFn::Flat,
        }
    }

    pub fn base_point(&self) -> [f64; 2] {
        self.base
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// φ''(0); equals the signed boundary curvature at the base point.
    pub fn phi2_at_0(&self) -> f64 {
        self.curvature_at_base
    }

    /// Local graph function φ(ξ) with φ(0) = φ'(0) = 0.
    pub fn phi(&self, xi: f64) -> f64 {
        match &self.graph {
            GraphFn::Flat => 0.0,
            GraphFn::Circle { radius } => {
                let r2 = radius * radius - xi * xi;
                radius - r2.max(0.0).sqrt()
            }
            GraphFn::Curve { .. } => self.solve_graph(xi).1,
        }
    }

    /// φ'(ξ).
    pub fn phi_prime(&self, xi: f64) -> f64 {
        match &self.graph {
            GraphFn::Flat => 0.0,
            GraphFn::Circle { radius } => xi / (radius * radius - xi * xi).max(1e-300).sqrt(),
            GraphFn::Curve { domain, .. } => {
                let (s, _) = self.solve_graph(xi);
                let t = domain.tangent(s);
                let tx = self.tangent[0] * t[0] + self.tangent[1] * t[1];
                let ty = self.normal[0] * t[0] + self.normal[1] * t[1];
                ty / tx
            }
        }
    }

    /// φ''(ξ); central differences for generic curves.
    pub fn phi_second(&self, xi: f64) -> f64 {
        match &self.graph {
            GraphFn::Flat => 0.0,
            GraphFn::Circle { radius } => {
                let r2 = (radius * radius - xi * xi).max(1e-300);
                radius * radius / (r2 * r2.sqrt())
            }
            GraphFn::Curve { .. } => {
                let h = 1e-6 * self.radius;
                (self.phi_prime(xi + h) - self.phi_prime(xi - h)) / (2.0 * h)
            }
        }
    }

    /// Solve for the boundary arclength with first chart coordinate ξ.
    /// Returns (s, φ(ξ)). Only used for generic curves.
    fn solve_graph(&self, xi: f64) -> (f64, f64) {
        let (domain, s_base) = match &self.graph {
            GraphFn::Curve { domain, s_base } => (domain, *s_base),
            _ => unreachable!("solve_graph is only called for generic curves"),
        };
        // ξ(s) = t̂·(x(s) − P) is monotone near s_base while the graph
        // condition holds; Newton with dξ/ds = t̂·x'(s)
        let proj = |s: f64| {
            let q = domain.point(s);
            (
                self.tangent[0] * (q[0] - self.base[0]) + self.tangent[1] * (q[1] - self.base[1]),
                self.normal[0] * (q[0] - self.base[0]) + self.normal[1] * (q[1] - self.base[1]),
            )
        };
        let mut s = s_base + xi; // arclength ≈ ξ to first order
        for _ in 0..50 {
            let (x1, _) = proj(s);
            let t = domain.tangent(s);
            let slope = self.tangent[0] * t[0] + self.tangent[1] * t[1];
            if slope <= 1e-6 {
                break;
            }
            let step = (xi - x1) / slope;
            s += step;
            if step.abs() < 1e-14 * domain.perimeter() {
                break;
            }
        }
        let (x1, x2) = proj(s);
        debug_assert!((x1 - xi).abs() < 1e-9 * self.radius.max(1.0));
        (s, x2)
    }

    /// Verify the boundary is a graph over the tangent line across the chart.
    fn check_graph_condition(&self) -> Result<(), GeometryError> {
        match &self.graph {
            GraphFn::Flat => Ok(()),
            GraphFn::Circle { radius } => {
                if self.radius < radius * 0.999_999 {
                    Ok(())
                } else {
                    Err(GeometryError::ChartRadius(
                        self.radius,
                        format!("circle of radius {radius} is a graph only for |ξ| < {radius}"),
                    ))
                }
            }
            GraphFn::Curve { domain, s_base } => {
                // walk outward in arclength until the chart width is covered;
                // the tangent projection must stay positive
                let steps = 400;
                for dir in [-1.0_f64, 1.0] {
                    let mut covered = 0.0_f64;
                    let mut i = 0;
                    while covered < self.radius {
                        i += 1;
                        if i > 4 * steps {
                            return Err(GeometryError::ChartRadius(
                                self.radius,
                                "boundary arc does not span the chart width".into(),
                            ));
                        }
                        let s = s_base + dir * self.radius * 2.0 * i as f64 / steps as f64;
                        let t = domain.tangent(s);
                        let slope = self.tangent[0] * t[0] + self.tangent[1] * t[1];
                        if slope <= 0.05 {
                            return Err(GeometryError::ChartRadius(
                                self.radius,
                                format!("graph condition fails at arclength offset {:.4}", s - s_base),
                            ));
                        }
                        let q = domain.point(s);
                        covered = (self.tangent[0] * (q[0] - self.base[0])
                            + self.tangent[1] * (q[1] - self.base[1]))
                            .abs();
                    }
                }
                Ok(())
            }
        }
    }

    /// Forward map x = Φ(z) from chart coordinates into the plane.
    pub fn forward(&self, z: [f64; 2]) -> Result<[f64; 2], GeometryError> {
        let r = z[0].hypot(z[1]);
        if r > self.radius * (1.0 + 1e-12) {
            return Err(GeometryError::OutOfChart(r, self.radius));
        }
        Ok(self.forward_unchecked(z))
    }

    pub(crate) fn forward_unchecked(&self, z: [f64; 2]) -> [f64; 2] {
        let phi1 = z[0] - z[1] * self.phi_prime(z[0]);
        let phi2 = z[1] + self.phi(z[0]);
        [
            self.base[0] + phi1 * self.tangent[0] + phi2 * self.normal[0],
            self.base[1] + phi1 * self.tangent[1] + phi2 * self.normal[1],
        ]
    }

    /// Inverse map z = Ψ(x); errors when x lies outside the chart.
    pub fn inverse(&self, x: [f64; 2]) -> Result<[f64; 2], GeometryError> {
        let dx = [x[0] - self.base[0], x[1] - self.base[1]];
        let xi_hat = self.tangent[0] * dx[0] + self.tangent[1] * dx[1];
        let eta_hat = self.normal[0] * dx[0] + self.normal[1] * dx[1];
        // z₁ solves z₁ − (η̂ − φ(z₁)) φ'(z₁) = ξ̂; safeguarded Newton
        let residual = |z1: f64| z1 - (eta_hat - self.phi(z1)) * self.phi_prime(z1) - xi_hat;
        let mut z1 = xi_hat.clamp(-self.radius, self.radius);
        for _ in 0..100 {
            let r = residual(z1);
            let dp = self.phi_prime(z1);
            let dpp = self.phi_second(z1);
            let deriv = 1.0 + dp * dp - (eta_hat - self.phi(z1)) * dpp;
            let step = if deriv.abs() > 1e-12 { r / deriv } else { r };
            z1 -= step;
            if !z1.is_finite() {
                return Err(GeometryError::OutOfChart(f64::INFINITY, self.radius));
            }
            z1 = z1.clamp(-1.5 * self.radius, 1.5 * self.radius);
            if step.abs() < 1e-15 * self.radius.max(1.0) {
                break;
            }
        }
        let z = [z1, eta_hat - self.phi(z1)];
        let r = z[0].hypot(z[1]);
        if r > self.radius * (1.0 + 1e-9) {
            return Err(GeometryError::OutOfChart(r, self.radius));
        }
        if residual(z1).abs() > 1e-8 * self.radius.max(1.0) {
            return Err(GeometryError::OutOfChart(r, self.radius));
        }
        Ok(z)
    }

    /// Jacobian of the forward map by central finite differences with step
    /// 1e-6 × chart radius.
    pub fn jacobian_fd(&self, z: [f64; 2]) -> [[f64; 2]; 2] {
        let h = 1e-6 * self.radius;
        let mut jac = [[0.0; 2]; 2];
        for col in 0..2 {
            let mut zp = z;
            let mut zm = z;
            zp[col] += h;
            zm[col] -= h;
            let fp = self.forward_unchecked(zp);
            let fm = self.forward_unchecked(zm);
            // express in the chart frame so the Jacobian is of (Φ₁, Φ₂)
            for row in 0..2 {
                let axis = if row == 0 { self.tangent } else { self.normal };
                let dp = axis[0] * (fp[0] - fm[0]) + axis[1] * (fp[1] - fm[1]);
                jac[row][col] = dp / (2.0 * h);
            }
        }
        jac
    }

    /// |det DΦ(z) − (1 − φ''(0) z₂)| / |z|², the normalized remainder of the
    /// first-order determinant expansion. Returns 0 at z = 0.
    pub fn jacobian_expansion_residual(&self, z: [f64; 2]) -> f64 {
        let r2 = z[0] * z[0] + z[1] * z[1];
        if r2 == 0.0 {
            return 0.0;
        }
        let j = self.jacobian_fd(z);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        (det - (1.0 - self.curvature_at_base * z[1])).abs() / r2
    }

    /// Analytic Jacobian of the forward map in the chart frame.
    pub(crate) fn jacobian(&self, z: [f64; 2]) -> [[f64; 2]; 2] {
        let dp = self.phi_prime(z[0]);
        let dpp = self.phi_second(z[0]);
        [[1.0 - z[1] * dpp, -dp], [dp, 1.0]]
    }
}

/// Piecewise-linear cutoff: 1 on [0, ρ], linear ramp 2 − t/ρ on (ρ, 2ρ],
/// 0 beyond.
pub fn cutoff_xi(rho: f64, t: f64) -> Result<f64, GeometryError> {
    if rho <= 0.0 || !rho.is_finite() {
        return Err(GeometryError::InvalidParameter(format!(
            "cutoff scale must be positive, got {rho}"
        )));
    }
    let t = t.max(0.0);
    Ok(if t <= rho {
        1.0
    } else if t <= 2.0 * rho {
        2.0 - t / rho
    } else {
        0.0
    })
}
