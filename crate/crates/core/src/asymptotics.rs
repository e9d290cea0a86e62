//! The transplanted test function and the small-d expansion of its ray-max
//! level, plus concentration diagnostics for solved ground states.
//!
//! The test function carries the limit profile w into the domain through a
//! boundary chart: with Ψ the straightening map at P and ρ = k/√d,
//!
//! ```text
//! φ_d(x) = ξ_ρ(|Ψ(x)|/√d) · w(|Ψ(x)|/√d)   on Φ(B⁺_{2k}),  0 elsewhere.
//! ```
//!
//! Its ray maximum expands as M[φ_d]/d = ½I(w) − φ''(0) γ √d + o(√d). Two
//! evaluation routes exist: nodal interpolation on a mesh (used to seed the
//! solver and as a discrete admissible upper bound for m_d), and chart-space
//! tensor quadrature (mesh-free, used for the expansion fits, where mesh
//! error would drown the √d term). The quadrature pulls every integral back
//! to the half-ball: dx = |det DΦ| d dζ and ∇ₓφ_d = DΨᵀ∇w_*/√d.

use std::sync::Arc;

use crate::fem::{self, AssembledOperators, Field};
use crate::geometry::{cutoff_xi, GeometryError, Mesh, StraighteningChart};
use crate::ground_state::{self, SolveError, SolveReport};
use crate::numerics;
use crate::radial::{Nonlinearity, RadialProfile};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Fem(#[from] fem::FemError),
    #[error("mesh too coarse near the chart: max edge {found:.4e} exceeds {required:.4e}")]
    Resolution { found: f64, required: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fit needs at least {0} entries, got {1}")]
    TooFewEntries(usize, usize),
}

/// Ingredients of one transplanted test function.
#[derive(Clone)]
pub struct TestFunctionParams {
    pub chart: StraighteningChart,
    pub profile: Arc<RadialProfile>,
    pub d: f64,
    /// chart half-width; the support Φ(B⁺_{2k}) must sit inside the chart,
    /// so 3k < chart radius is enforced
    pub k: f64,
}

impl TestFunctionParams {
    pub fn new(
        chart: StraighteningChart,
        profile: Arc<RadialProfile>,
        d: f64,
        k: f64,
    ) -> Result<Self, AsymptoticsError> {
        if !(d > 0.0) {
            return Err(AsymptoticsError::InvalidParameter("d must be positive".into()));
        }
        if !(k > 0.0 && 3.0 * k < chart.radius()) {
            return Err(AsymptoticsError::InvalidParameter(format!(
                "k must satisfy 0 < 3k < chart radius ({} vs {})",
                k,
                chart.radius()
            )));
        }
        Ok(TestFunctionParams { chart, profile, d, k })
    }

    /// Default half-width: a third of the chart radius (slightly inside).
    pub fn default_k(chart: &StraighteningChart) -> f64 {
        chart.radius() / 3.0 * 0.999
    }

    /// Pointwise evaluation at a domain point; exact 0 outside Φ(B⁺_{2k}).
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let p = self.chart.base_point();
        let dist = (x[0] - p[0]).hypot(x[1] - p[1]);
        // the forward map moves points by at most a modest factor of |z|
        if dist > 3.0 * self.k {
            return 0.0;
        }
        let z = match self.chart.inverse(x) {
            Ok(z) => z,
            Err(_) => return 0.0,
        };
        let r = z[0].hypot(z[1]);
        if r >= 2.0 * self.k || z[1] < -1e-12 {
            return 0.0;
        }
        let xi = cutoff_xi(self.k, r).expect("k > 0");
        xi * self.profile.eval(r / self.d.sqrt())
    }
}

/// Nodal interpolation of the test function. Requires the mesh to resolve
/// the spike core: max edge within 2√d of the base point at most √d/4.
pub fn build_test_function(
    params: &TestFunctionParams,
    mesh: &Arc<Mesh>,
) -> Result<Field, AsymptoticsError> {
    let required = params.d.sqrt() / 4.0;
    let found = mesh.max_edge_near(params.chart.base_point(), 2.0 * params.d.sqrt());
    if found > required {
        return Err(AsymptoticsError::Resolution { found, required });
    }
    let values = mesh.nodes().iter().map(|&x| params.eval(x)).collect();
    Ok(Field::new(mesh.clone(), values)?)
}

/// Ray maximizer of J_d along t·φ: the Nehari root, cross-checked by
/// golden-section search on the ray energy. Returns (t0, t0_golden).
///
/// A bare golden search stalls on the rounding plateau of the energy
/// (≈ √ε·scale wide around a quadratic maximum), so it stops at 1e-6·t0 and
/// a parabolic vertex through three resolvable points does the last digits.
pub fn ray_maximizer_t0(
    ops: &AssembledOperators,
    phi: &Field,
    d: f64,
) -> Result<(f64, f64), SolveError> {
    let t0 = ground_state::nehari_scale(ops, phi, d)?;
    let energy_at =
        |t: f64| fem::energy(ops, &phi.scale(t), d).unwrap_or(f64::NEG_INFINITY);
    let (t_coarse, _) =
        numerics::golden_section_max(energy_at, 0.25 * t0, 2.0 * t0, 1e-6 * t0);
    let delta = 1e-6 * t0;
    let (fm, f0, fp) = (
        energy_at(t_coarse - delta),
        energy_at(t_coarse),
        energy_at(t_coarse + delta),
    );
    let denom = fm - 2.0 * f0 + fp;
    let t_golden = if denom < 0.0 {
        t_coarse + 0.5 * delta * (fm - fp) / denom
    } else {
        t_coarse
    };
    Ok((t0, t_golden))
}

/// Mesh-free evaluation of the test level by tensor quadrature in chart
/// coordinates. All integrals are over the half-ball of radius 2ρ in the
/// rescaled variable ζ (ρ = k/√d):
///
/// ```text
/// J_d(t φ_d)/d = t²/2 (A + B) − C(t),
/// A = ∫ |DΨᵀ ∇w_*|² |det DΦ| dζ,   B = ∫ w_*² |det DΦ| dζ,
/// C(t) = ∫ F(t w_*) |det DΦ| dζ,
/// ```
/// with the chart factors evaluated at y = √d ζ.
pub struct ChartQuadrature {
    /// gradient part of the quadratic form
    a: f64,
    /// mass part of the quadratic form
    b: f64,
    /// test-function values at quadrature points
    vals: Vec<f64>,
    /// quadrature weight × |det DΦ| per point
    wdet: Vec<f64>,
}

impl ChartQuadrature {
    pub fn new(params: &TestFunctionParams) -> ChartQuadrature {
        let sqrt_d = params.d.sqrt();
        let rho = params.k / sqrt_d;
        let profile = &params.profile;
        let chart = &params.chart;

        // radial panels split at the cutoff kink
        let mut radial: Vec<(f64, f64)> = Vec::new(); // (r, simpson weight * dr/3)
        let mut push_panel = |r_lo: f64, r_hi: f64, target_dr: f64| {
            let mut n = ((r_hi - r_lo) / target_dr).ceil() as usize;
            n = n.max(8);
            if n % 2 == 1 {
                n += 1;
            }
            let dr = (r_hi - r_lo) / n as f64;
            for i in 0..=n {
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                radial.push((r_lo + i as f64 * dr, w * dr / 3.0));
            }
        };
        let dr_target = 0.01_f64.min(rho / 50.0);
        push_panel(0.0, rho, dr_target);
        push_panel(rho, 2.0 * rho, dr_target);

        let n_ang = 96;
        let dphi = std::f64::consts::PI / n_ang as f64;
        let ang: Vec<(f64, f64)> = (0..=n_ang)
            .map(|i| {
                let w = if i == 0 || i == n_ang {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                (i as f64 * dphi, w * dphi / 3.0)
            })
            .collect();

        let nl_k = params.k;
        let mut a = 0.0;
        let mut b = 0.0;
        let mut vals = Vec::with_capacity(radial.len() * ang.len());
        let mut wdet = Vec::with_capacity(radial.len() * ang.len());
        for &(r, wr) in &radial {
            let (w_val, w_slope) = profile.eval_with_slope(r);
            let xi = cutoff_xi(nl_k, r * sqrt_d).expect("k > 0");
            let xi_slope = if r * sqrt_d > nl_k && r * sqrt_d < 2.0 * nl_k {
                -sqrt_d / nl_k
            } else {
                0.0
            };
            let s_val = xi * w_val;
            let s_slope = xi_slope * w_val + xi * w_slope;
            for &(phi_ang, wa) in &ang {
                let (ca, sa) = (phi_ang.cos(), phi_ang.sin());
                let y = [sqrt_d * r * ca, sqrt_d * r * sa];
                let jac = chart.jacobian(y);
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                let weight = wr * wa * r;
                // DΨᵀ q with q = s'(r)(cos, sin); DΨ = DΦ⁻¹
                let dp = jac[1][0]; // φ'(y₁)
                let d11 = jac[0][0]; // 1 − y₂ φ''(y₁)
                let g1 = (ca - dp * sa) / det;
                let g2 = (dp * ca + d11 * sa) / det;
                a += weight * det.abs() * s_slope * s_slope * (g1 * g1 + g2 * g2);
                b += weight * det.abs() * s_val * s_val;
                vals.push(s_val);
                wdet.push(weight * det.abs());
            }
        }
        ChartQuadrature { a, b, vals, wdet }
    }

    pub fn quadratic_form(&self) -> f64 {
        self.a + self.b
    }

    pub fn gradient_part(&self) -> f64 {
        self.a
    }

    /// Ray maximizer t0 of the chart-space level.
    pub fn t0(&self) -> Result<f64, AsymptoticsError> {
        let q = self.a + self.b;
        let mass = |t: f64| -> f64 {
            self.vals
                .iter()
                .zip(&self.wdet)
                .map(|(&v, &w)| {
                    let tv2 = (t * v) * (t * v);
                    w * v * v * (tv2.exp() - 1.0)
                })
                .sum()
        };
        let mass_prime = |t: f64| -> f64 {
            self.vals
                .iter()
                .zip(&self.wdet)
                .map(|(&v, &w)| {
                    let tv2 = (t * v) * (t * v);
                    w * v.powi(4) * tv2.exp() * 2.0 * t
                })
                .sum()
        };
        numerics::decreasing_root(|t| q - mass(t), |t| -mass_prime(t), 1.0, 1e3, 1e-14)
            .map_err(AsymptoticsError::InvalidParameter)
    }

    /// J_d(t φ_d)/d at the given ray parameter.
    pub fn level_over_d(&self, t: f64) -> f64 {
        let nl = Nonlinearity;
        let c: f64 = self
            .vals
            .iter()
            .zip(&self.wdet)
            .map(|(&v, &w)| w * nl.big_f(t * v))
            .sum();
        0.5 * t * t * (self.a + self.b) - c
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionRow {
    pub d: f64,
    /// M[φ_d]/d by chart quadrature
    pub m_test_over_d: f64,
    pub t0: f64,
    /// same construction on the synthetic flat chart (φ ≡ 0)
    pub flat_level_over_d: f64,
    pub flat_t0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport {
    pub rows: Vec<ExpansionRow>,
    pub half_i_w: f64,
    pub gamma: f64,
    pub phi2_at_0: f64,
    /// through-origin √d-slope of (½I(w)·d − M_test)/d; Prop-level value φ''(0)γ
    pub fitted_gamma_coeff: f64,
    /// the same fit on the flat chart; should be statistically zero
    pub flat_fitted_coeff: f64,
    /// through-origin √d-slope of t0 − 1
    pub fitted_beta: f64,
    /// log–log slope of |t0 − 1| against d
    pub t0_loglog_slope: f64,
}

/// Fit the √d coefficient of (½I(w)·d − M_test)/d over a sweep.
pub fn fit_gamma_coeff(ds: &[f64], m_test_over_d: &[f64], half_i_w: f64) -> f64 {
    let sqrt_d: Vec<f64> = ds.iter().map(|d| d.sqrt()).collect();
    let y: Vec<f64> = m_test_over_d.iter().map(|m| half_i_w - m).collect();
    numerics::fit_through_origin(&sqrt_d, &y)
}

pub fn fit_beta(ds: &[f64], t0s: &[f64]) -> f64 {
    let sqrt_d: Vec<f64> = ds.iter().map(|d| d.sqrt()).collect();
    let y: Vec<f64> = t0s.iter().map(|t| t - 1.0).collect();
    numerics::fit_through_origin(&sqrt_d, &y)
}

pub fn fit_t0_loglog_slope(ds: &[f64], t0s: &[f64]) -> f64 {
    let xs: Vec<f64> = ds.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = t0s.iter().map(|t| (t - 1.0).abs().max(1e-300).ln()).collect();
    numerics::linear_fit(&xs, &ys).slope
}

/// Evaluate the test level across a decreasing d-list (chart quadrature on
/// both the supplied chart and the flat null chart) and fit the expansion
/// coefficients.
pub fn expansion_fit(
    d_list: &[f64],
    chart: &StraighteningChart,
    profile: &Arc<RadialProfile>,
    k: f64,
    half_i_w: f64,
    gamma: f64,
) -> Result<ExpansionReport, AsymptoticsError> {
    if d_list.len() < 4 {
        return Err(AsymptoticsError::TooFewEntries(4, d_list.len()));
    }
    for pair in d_list.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(AsymptoticsError::InvalidParameter(
                "d_list must be strictly decreasing".into(),
            ));
        }
    }
    let flat = StraighteningChart::flat(chart.radius());
    let mut rows = Vec::with_capacity(d_list.len());
    for &d in d_list {
        let params = TestFunctionParams::new(chart.clone(), profile.clone(), d, k)?;
        let quad = ChartQuadrature::new(&params);
        let t0 = quad.t0()?;
        let flat_params = TestFunctionParams::new(flat.clone(), profile.clone(), d, k)?;
        let flat_quad = ChartQuadrature::new(&flat_params);
        let flat_t0 = flat_quad.t0()?;
        rows.push(ExpansionRow {
            d,
            m_test_over_d: quad.level_over_d(t0),
            t0,
            flat_level_over_d: flat_quad.level_over_d(flat_t0),
            flat_t0,
        });
    }
    let ds: Vec<f64> = rows.iter().map(|r| r.d).collect();
    let m_over_d: Vec<f64> = rows.iter().map(|r| r.m_test_over_d).collect();
    let flat_over_d: Vec<f64> = rows.iter().map(|r| r.flat_level_over_d).collect();
    let t0s: Vec<f64> = rows.iter().map(|r| r.t0).collect();
    Ok(ExpansionReport {
        half_i_w,
        gamma,
        phi2_at_0: chart.phi2_at_0(),
        fitted_gamma_coeff: fit_gamma_coeff(&ds, &m_over_d, half_i_w),
        flat_fitted_coeff: fit_gamma_coeff(&ds, &flat_over_d, half_i_w),
        fitted_beta: fit_beta(&ds, &t0s),
        t0_loglog_slope: fit_t0_loglog_slope(&ds, &t0s),
        rows,
    })
}

/// Concentration diagnostics for one solved ground state.
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationMetrics {
    /// d(P_d, ∂Ω)/√d
    pub dist_over_sqrt_d: f64,
    /// sup over the rescaled half-ball patch of |u_d(Φ(√d z)) − w(|z|)|
    pub profile_sup_err: f64,
    /// rescaled patch radius actually used (clipped to the chart)
    pub patch_radius: f64,
    /// fitted tail decay slope of log u against δ(x)/√d outside the patch
    pub mu1: f64,
    pub tail_points: usize,
}

pub fn concentration_report(
    report: &SolveReport,
    profile: &RadialProfile,
    chart: &StraighteningChart,
    patch_radius: f64,
) -> Result<ConcentrationMetrics, AsymptoticsError> {
    let d = report.d;
    let sqrt_d = d.sqrt();
    let r_eff = patch_radius.min(0.95 * chart.radius() / sqrt_d);
    // sup of the profile mismatch over a polar sample of the patch
    let mut sup_err: f64 = 0.0;
    let n_r = 60;
    let n_a = 24;
    for ir in 0..=n_r {
        let rz = r_eff * ir as f64 / n_r as f64;
        for ia in 0..=n_a {
            let ang = std::f64::consts::PI * ia as f64 / n_a as f64;
            let z = [rz * ang.cos(), rz * ang.sin()];
            let x = chart.forward([sqrt_d * z[0], sqrt_d * z[1]])?;
            let u_val = report.field.eval(x);
            sup_err = sup_err.max((u_val - profile.eval(rz)).abs());
        }
        if rz == 0.0 {
            continue;
        }
    }
    // tail regression outside the patch: log u against δ/√d with
    // δ = |x − P_d| − R√d
    let mesh = report.field.mesh();
    let peak = [report.peak_x, report.peak_y];
    let umax = report.field.max();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &p) in mesh.nodes().iter().enumerate() {
        let u = report.field.values()[i];
        if u <= 1e-9 * umax {
            continue;
        }
        let delta = ((p[0] - peak[0]).hypot(p[1] - peak[1]) - r_eff * sqrt_d) / sqrt_d;
        if delta >= 1.0 && delta <= 8.0 {
            xs.push(delta);
            ys.push(u.ln());
        }
    }
    let mu1 = if xs.len() >= 10 {
        -numerics::linear_fit(&xs, &ys).slope
    } else {
        f64::NAN
    };
    Ok(ConcentrationMetrics {
        dist_over_sqrt_d: report.dist_to_boundary / sqrt_d,
        profile_sup_err: sup_err,
        patch_radius: r_eff,
        mu1,
        tail_points: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assemble;
    use crate::geometry::{boundary_chart, build_disk_mesh, Domain};
    use crate::radial::shoot_ground_state;

    fn setup() -> (Arc<RadialProfile>, StraighteningChart) {
        let profile = Arc::new(shoot_ground_state(1e-10, 25.0).unwrap());
        let domain = Domain::unit_disk();
        let chart = boundary_chart(&domain, [0.0, 1.0], 0.55).unwrap();
        (profile, chart)
    }

    #[test]
    fn test_function_values_at_base_and_outside() {
        let (profile, chart) = setup();
        let d = 0.05;
        let k = TestFunctionParams::default_k(&chart);
        let params = TestFunctionParams::new(chart, profile.clone(), d, k).unwrap();
        // value at the base point is the profile amplitude
        let v0 = params.eval([0.0, 1.0]);
        assert!((v0 - profile.amplitude).abs() < 1e-12);
        // zero outside the support
        assert_eq!(params.eval([0.0, -1.0]), 0.0);
        assert_eq!(params.eval([1.0, 0.0]), 0.0);
        // vanishes where |Ψ(x)| ≥ 2k: probe on the boundary arc just beyond
        let x = params.chart.forward([2.0 * k * 0.9999, 0.0]).unwrap();
        assert!(params.eval(x) > 0.0 || params.eval(x) == 0.0);
        let s_past = 2.0 * k * 1.05;
        let x_past = params.chart.forward([s_past, 0.0]).unwrap();
        assert_eq!(params.eval(x_past), 0.0);
    }

    #[test]
    fn build_requires_resolution() {
        let (profile, chart) = setup();
        let d = 0.05;
        let k = TestFunctionParams::default_k(&chart);
        let params = TestFunctionParams::new(chart, profile, d, k).unwrap();
        let coarse = Arc::new(build_disk_mesh(1.0, 0.4, None).unwrap());
        assert!(matches!(
            build_test_function(&params, &coarse),
            Err(AsymptoticsError::Resolution { .. })
        ));
        let fine = Arc::new(build_disk_mesh(1.0, 0.15, Some(([0.0, 1.0], 2))).unwrap());
        let f = build_test_function(&params, &fine).unwrap();
        assert!(f.max() > 1.0);
    }

    #[test]
    fn gradient_mass_matches_half_plane_profile_integral() {
        // d ∫|∇φ_d|² = d (∫_{ℝ²₊} w'² + O(√d)): the chart-quadrature A must
        // approach the half-plane Dirichlet integral as d shrinks
        let (profile, chart) = setup();
        let half_dirichlet = {
            let vals: Vec<f64> = (0..profile.r.len())
                .map(|i| profile.dw[i].powi(2) * profile.r[i])
                .collect();
            std::f64::consts::PI
                * crate::numerics::simpson_uniform(&vals, profile.r[1] - profile.r[0])
        };
        let k = TestFunctionParams::default_k(&chart);
        let mut errs = Vec::new();
        for &d in &[0.004, 0.001] {
            let params = TestFunctionParams::new(chart.clone(), profile.clone(), d, k).unwrap();
            let quad = ChartQuadrature::new(&params);
            errs.push((quad.gradient_part() - half_dirichlet).abs());
        }
        assert!(errs[0] < 0.05 * half_dirichlet, "A error {} too large", errs[0]);
        assert!(errs[1] < errs[0], "gradient mass not converging: {errs:?}");
    }

    #[test]
    fn t0_shrinks_toward_one_and_golden_agrees() {
        let (profile, chart) = setup();
        let k = TestFunctionParams::default_k(&chart);
        let mut prev_gap = f64::INFINITY;
        for &d in &[0.1_f64, 0.05, 0.025, 0.0125] {
            let levels = (0.2 / (d.sqrt() / 6.0)).log2().ceil() as u32;
            let mesh =
                Arc::new(build_disk_mesh(1.0, 0.2, Some(([0.0, 1.0], levels))).unwrap());
            let ops = assemble(&mesh).unwrap();
            let params = TestFunctionParams::new(chart.clone(), profile.clone(), d, k).unwrap();
            let phi = build_test_function(&params, &mesh).unwrap();
            let (t0, t_golden) = ray_maximizer_t0(&ops, &phi, d).unwrap();
            assert!(
                (t0 - t_golden).abs() <= 1e-8 * t0.max(1.0),
                "t0 {t0} vs golden {t_golden}"
            );
            let gap = (t0 - 1.0).abs();
            assert!(gap < prev_gap, "|t0 - 1| did not shrink at d = {d}");
            prev_gap = gap;
        }
    }

    #[test]
    fn constant_field_t0_is_nehari_root() {
        let mesh = Arc::new(build_disk_mesh(1.0, 0.25, None).unwrap());
        let ops = assemble(&mesh).unwrap();
        let c = 0.7;
        let f = Field::constant(mesh.clone(), c);
        for &d in &[0.02, 0.4] {
            let (t0, _) = ray_maximizer_t0(&ops, &f, d).unwrap();
            assert!((t0 - (2.0_f64.ln()).sqrt() / c).abs() < 1e-10);
        }
    }

    #[test]
    fn expansion_fit_recovers_curvature_coefficient() {
        let (profile, chart) = setup();
        let k = TestFunctionParams::default_k(&chart);
        let half_iw = 0.5 * crate::radial::energy_i(&profile);
        let gamma = crate::radial::gamma_constant(&profile);
        let d_list = [0.005, 0.0025, 0.00125, 0.000625];
        let report =
            expansion_fit(&d_list, &chart, &profile, k, half_iw, gamma).unwrap();
        // disk: φ''(0) = 1, so the coefficient should approximate γ
        let ratio = report.fitted_gamma_coeff / (chart.phi2_at_0() * gamma);
        assert!(
            (0.5..=2.0).contains(&ratio),
            "fitted γ coefficient ratio {ratio} (coeff {})",
            report.fitted_gamma_coeff
        );
        assert!(report.fitted_gamma_coeff > 0.0);
        // flat chart: statistically indistinguishable from zero
        assert!(
            report.flat_fitted_coeff.abs() <= 0.1 * gamma,
            "flat coefficient {} vs gamma {gamma}",
            report.flat_fitted_coeff
        );
        // t0 expansion slope 0.5 ± 0.15
        assert!(
            (report.t0_loglog_slope - 0.5).abs() <= 0.15,
            "t0 log-log slope {}",
            report.t0_loglog_slope
        );
        // the test level approaches ½I(w) monotonically
        let mut prev = f64::INFINITY;
        for row in &report.rows {
            let gap = (row.m_test_over_d - half_iw).abs();
            assert!(gap < prev, "test level gap not decreasing at d = {}", row.d);
            prev = gap;
        }
    }

    #[test]
    fn expansion_fit_validates_input() {
        let (profile, chart) = setup();
        let k = TestFunctionParams::default_k(&chart);
        assert!(matches!(
            expansion_fit(&[0.1, 0.05, 0.025], &chart, &profile, k, 1.0, 1.0),
            Err(AsymptoticsError::TooFewEntries(4, 3))
        ));
        assert!(expansion_fit(&[0.1, 0.2, 0.05, 0.025], &chart, &profile, k, 1.0, 1.0).is_err());
    }
}
