//! The limit profile w on ℝ²: the positive, radially decreasing solution of
//!
//! ```text
//! -Δw + w = w (e^{w²} - 1),       w'(0) = 0,   w(r) → 0,
//! ```
//!
//! computed by bisection shooting on the amplitude w(0). In radial form the
//! equation reads w'' + w'/r = w (2 - e^{w²}); trajectories either cross
//! zero (amplitude too large) or turn back up (too small), and the ground
//! state sits on the boundary between the two regimes.
//!
//! Raw shooting diverges from the decaying branch once the growing mode
//! amplifies the amplitude error past the local solution size, which at
//! double precision happens near r ≈ 14. The profile therefore switches to
//! the decaying solution of the linearized equation -Δw + w = 0 (a
//! Bessel-K₀ tail, w ≈ c e^{-r}/√r) once w drops below 1e-4, where the
//! linearization error is O(w²) ≈ 1e-8 relative.

use crate::numerics;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RadialError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state overflowed at r = {0:.4} (w = {1:.3e})")]
    Overflow(f64, f64),
    #[error("no shooting bracket found in ({0:.4}, {1:.4})")]
    Bracket(f64, f64),
    #[error("decay fit window invalid: {0}")]
    FitWindow(String),
}

/// The nonlinearity f(w) = w(e^{w²} - 1) and its primitive
/// F(w) = ½(e^{w²} - w² - 1), with F' = f.
#[derive(Debug, Clone, Copy, Default)]
pub struct Nonlinearity;

/// e^{v²} overflows f64 near |v| = 26.6; values this large mean a runaway
/// iterate and must surface as an error, not be clamped.
pub const OVERFLOW_LIMIT: f64 = 26.0;

impl Nonlinearity {
    #[inline]
    pub fn f(self, w: f64) -> f64 {
        w * ((w * w).exp() - 1.0)
    }

    #[inline]
    pub fn big_f(self, w: f64) -> f64 {
        let w2 = w * w;
        0.5 * (w2.exp() - w2 - 1.0)
    }

    /// f'(w) = e^{w²}(1 + 2w²) - 1.
    #[inline]
    pub fn f_prime(self, w: f64) -> f64 {
        let w2 = w * w;
        w2.exp() * (1.0 + 2.0 * w2) - 1.0
    }
}

/// Why an outward integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// w and w' both below 1e-8.
    Decayed,
    /// w reached zero from above.
    CrossedZero,
    /// w' changed sign from negative to positive while w > 0, or w grew
    /// past twice the amplitude.
    TurnedUp,
    ReachedRmax,
}

/// Samples of one radial trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub dw: Vec<f64>,
    pub reason: StopReason,
}

const DECAY_EPS: f64 = 1e-8;

/// Integrate the radial equation outward from the given amplitude on a
/// uniform sample grid with spacing `dr`, adaptive Dormand–Prince steps in
/// between. Stops early on the events described in [`StopReason`].
pub fn integrate_radial(
    amplitude: f64,
    r_max: f64,
    tol: f64,
    dr: f64,
) -> Result<Trajectory, RadialError> {
    if !(amplitude > 0.0) {
        return Err(RadialError::InvalidParameter(format!(
            "amplitude must be positive, got {amplitude}"
        )));
    }
    if !(tol > 1e-14 && tol < 1e-6) {
        return Err(RadialError::InvalidParameter(format!(
            "tolerance must lie in (1e-14, 1e-6), got {tol}"
        )));
    }
    if !(r_max > 0.0 && dr > 0.0) {
        return Err(RadialError::InvalidParameter("r_max and dr must be positive".into()));
    }
    if amplitude > OVERFLOW_LIMIT {
        return Err(RadialError::Overflow(0.0, amplitude));
    }
    // series start: w(r) = a + ¼ a (2 - e^{a²}) r² + O(r⁴) removes the w'/r
    // singularity at the origin; the start radius shrinks with the initial
    // curvature so the quadratic term stays a small correction
    let c = 0.25 * amplitude * (2.0 - (amplitude * amplitude).exp());
    let r0 = 1e-4_f64
        .min(0.5 * dr)
        .min(0.03 * (amplitude / c.abs().max(1e-300)).sqrt());
    let mut r = r0;
    let mut y = [amplitude + c * r0 * r0, 2.0 * c * r0];
    if !y[0].is_finite() || !y[1].is_finite() {
        return Err(RadialError::Overflow(r0, y[0]));
    }

    let n = (r_max / dr).round() as usize;
    let mut rs = Vec::with_capacity(n + 1);
    let mut ws = Vec::with_capacity(n + 1);
    let mut dws = Vec::with_capacity(n + 1);
    rs.push(0.0);
    ws.push(amplitude);
    dws.push(0.0);

    let mut saw_negative_slope = y[1] < 0.0;
    let mut reason = StopReason::ReachedRmax;

    'outer: for i in 1..=n {
        let r_target = i as f64 * dr;
        let mut h = (r_target - r).min(dr);
        while r < r_target - 1e-13 {
            h = h.min(r_target - r);
            let (y_new, err) = dp54_step(r, y, h);
            // non-finite error estimates (overflowing states) must shrink
            // the step, and the accepted-step guard below reports them
            let err = if err.is_finite() { err } else { f64::MAX };
            let scale = tol * (1.0 + y[0].abs() + y[1].abs());
            if err <= scale || h <= 1e-12 {
                r += h;
                y = y_new;
                if !y[0].is_finite() || !y[1].is_finite() || y[0].abs() > OVERFLOW_LIMIT {
                    return Err(RadialError::Overflow(r, y[0]));
                }
                if y[1] < -1e-14 {
                    saw_negative_slope = true;
                }
                // event checks between samples so steep crossings are caught
                if y[0] <= 0.0 {
                    reason = StopReason::CrossedZero;
                    rs.push(r);
                    ws.push(y[0]);
                    dws.push(y[1]);
                    break 'outer;
                }
                if (saw_negative_slope && y[1] > 1e-14) || y[0] > 2.0 * amplitude {
                    reason = StopReason::TurnedUp;
                    rs.push(r);
                    ws.push(y[0]);
                    dws.push(y[1]);
                    break 'outer;
                }
            }
            let grow = 0.9 * (scale / err.max(1e-300)).powf(0.2);
            h *= grow.clamp(0.2, 5.0);
            h = h.min(dr).max(1e-12);
        }
        rs.push(r_target);
        ws.push(y[0]);
        dws.push(y[1]);
        if y[0].abs() < DECAY_EPS && y[1].abs() < DECAY_EPS {
            reason = StopReason::Decayed;
            break;
        }
    }
    Ok(Trajectory { r: rs, w: ws, dw: dws, reason })
}

/// One embedded Dormand–Prince 5(4) step; returns (y_next, error estimate).
fn dp54_step(r: f64, y: [f64; 2], h: f64) -> ([f64; 2], f64) {
    let f = |r: f64, y: [f64; 2]| -> [f64; 2] {
        let w = y[0];
        [y[1], -y[1] / r + w * (2.0 - (w * w).exp())]
    };
    let k1 = f(r, y);
    let add = |y: [f64; 2], coeffs: &[(f64, [f64; 2])]| {
        let mut out = y;
        for (a, k) in coeffs {
            out[0] += h * a * k[0];
            out[1] += h * a * k[1];
        }
        out
    };
    let k2 = f(r + h / 5.0, add(y, &[(1.0 / 5.0, k1)]));
    let k3 = f(r + 3.0 * h / 10.0, add(y, &[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]));
    let k4 = f(
        r + 4.0 * h / 5.0,
        add(y, &[(44.0 / 45.0, k1), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)]),
    );
    let k5 = f(
        r + 8.0 * h / 9.0,
        add(
            y,
            &[
                (19372.0 / 6561.0, k1),
                (-25360.0 / 2187.0, k2),
                (64448.0 / 6561.0, k3),
                (-212.0 / 729.0, k4),
            ],
        ),
    );
    let k6 = f(
        r + h,
        add(
            y,
            &[
                (9017.0 / 3168.0, k1),
                (-355.0 / 33.0, k2),
                (46732.0 / 5247.0, k3),
                (49.0 / 176.0, k4),
                (-5103.0 / 18656.0, k5),
            ],
        ),
    );
    let y5 = add(
        y,
        &[
            (35.0 / 384.0, k1),
            (500.0 / 1113.0, k3),
            (125.0 / 192.0, k4),
            (-2187.0 / 6784.0, k5),
            (11.0 / 84.0, k6),
        ],
    );
    let k7 = f(r + h, y5);
    let y4 = add(
        y,
        &[
            (5179.0 / 57600.0, k1),
            (7571.0 / 16695.0, k3),
            (393.0 / 640.0, k4),
            (-92097.0 / 339200.0, k5),
            (187.0 / 2100.0, k6),
            (1.0 / 40.0, k7),
        ],
    );
    let err = ((y5[0] - y4[0]).abs()).max((y5[1] - y4[1]).abs());
    (y5, err)
}

/// The converged limit profile on a uniform grid.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub dw: Vec<f64>,
    pub amplitude: f64,
    /// fitted exponential decay rate on [10, 15] (or the widest available window)
    pub theta: f64,
    pub r_max: f64,
}

impl RadialProfile {
    pub fn dr(&self) -> f64 {
        self.r[1] - self.r[0]
    }

    /// Cubic Hermite evaluation of w at radius `rq` (0 beyond the grid).
    pub fn eval(&self, rq: f64) -> f64 {
        self.eval_with_slope(rq).0
    }

    pub fn eval_with_slope(&self, rq: f64) -> (f64, f64) {
        if rq <= 0.0 {
            return (self.amplitude, 0.0);
        }
        if rq >= self.r_max {
            return (0.0, 0.0);
        }
        let dr = self.dr();
        let i = ((rq / dr).floor() as usize).min(self.r.len() - 2);
        let t = (rq - self.r[i]) / dr;
        let (w0, w1) = (self.w[i], self.w[i + 1]);
        let (m0, m1) = (self.dw[i] * dr, self.dw[i + 1] * dr);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let w = h00 * w0 + h10 * m0 + h01 * w1 + h11 * m1;
        let dw = ((6.0 * t2 - 6.0 * t) * w0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * w1
            + (3.0 * t2 - 2.0 * t) * m1)
            / dr;
        (w, dw)
    }

    /// Estimated relative contribution of the tail beyond r_max to
    /// ∫ w² r dr, using the fitted c e^{-r}/√r form.
    pub fn tail_mass_fraction(&self) -> f64 {
        let total: f64 = numerics::simpson_uniform(
            &self.w.iter().zip(&self.r).map(|(w, r)| w * w * r).collect::<Vec<_>>(),
            self.dr(),
        );
        // ∫_{rmax}^∞ c² e^{-2r}/r · r dr = c² e^{-2 rmax}/2
        let c = self.w.last().unwrap() * self.r_max.sqrt() * self.r_max.exp();
        let tail = 0.5 * c * c * (-2.0 * self.r_max).exp();
        tail / total.max(1e-300)
    }
}

/// Decaying solution of the 2-D modified Helmholtz equation: the large-r
/// asymptotic series of the Bessel function K₀ (and -K₀' = K₁), accurate to
/// well below 1e-10 for r ≥ 6.
fn k0_asymptotic(r: f64) -> f64 {
    let x = 1.0 / (8.0 * r);
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1u32..=10 {
        let odd = (2 * k - 1) as f64;
        term *= -odd * odd * x / k as f64;
        sum += term;
    }
    (std::f64::consts::PI / (2.0 * r)).sqrt() * (-r).exp() * sum
}

fn k1_asymptotic(r: f64) -> f64 {
    let x = 1.0 / (8.0 * r);
    let mut sum = 1.0;
    let mut term = 1.0;
    let mu = 4.0;
    for k in 1u32..=10 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) * x / k as f64;
        sum += term;
    }
    (std::f64::consts::PI / (2.0 * r)).sqrt() * (-r).exp() * sum
}

/// The graft happens this far down the profile. Any later and the unstable
/// growing mode (amplified integration and amplitude error, ~e^{2r})
/// contaminates the tail coefficient; any earlier and the linearization
/// error O(w²) becomes visible in the moment identities.
const GRAFT_LEVEL: f64 = 1e-3;

/// Shoot for the ground-state amplitude and assemble the profile.
///
/// Bisection runs between a lower amplitude whose trajectory turns back up
/// and an upper one that crosses zero, until the bracket width is below
/// `tol_amplitude`. The profile follows the outward integration down to
/// the graft level and the matched K₀ tail beyond.
pub fn shoot_ground_state(tol_amplitude: f64, r_max: f64) -> Result<RadialProfile, RadialError> {
    shoot_ground_state_with(tol_amplitude, r_max, 1e-12, 0.0025)
}

pub fn shoot_ground_state_with(
    tol_amplitude: f64,
    r_max: f64,
    ode_tol: f64,
    dr: f64,
) -> Result<RadialProfile, RadialError> {
    if r_max < 20.0 {
        return Err(RadialError::InvalidParameter(format!(
            "r_max must be at least 20 for a reliable shooting bracket, got {r_max}"
        )));
    }
    if !(tol_amplitude > 0.0) {
        return Err(RadialError::InvalidParameter("tol_amplitude must be positive".into()));
    }
    let lo_limit = (2.0_f64.ln()).sqrt() + 0.01;
    let hi_limit = 6.0;
    // classification on a coarse grid is cheap; events fire between samples
    let classify = |a: f64| -> Result<StopReason, RadialError> {
        Ok(integrate_radial(a, r_max, ode_tol, 0.05)?.reason)
    };
    let mut lo = lo_limit;
    let mut lo_reason = classify(lo)?;
    let mut bracket = None;
    let scan_steps = 120;
    for i in 1..=scan_steps {
        let a = lo_limit + (hi_limit - lo_limit) * i as f64 / scan_steps as f64;
        let reason = classify(a)?;
        if lo_reason != StopReason::CrossedZero && reason == StopReason::CrossedZero {
            bracket = Some((lo, a));
            break;
        }
        lo = a;
        lo_reason = reason;
    }
    let (mut lo, mut hi) = bracket.ok_or(RadialError::Bracket(lo_limit, hi_limit))?;
    while hi - lo > tol_amplitude {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket at floating-point resolution
        }
        if classify(mid)? == StopReason::CrossedZero {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let amplitude = 0.5 * (lo + hi);

    // profile construction on the fine grid, grafting the K0 tail where the
    // trajectory reaches the graft level
    let traj = integrate_radial(amplitude, r_max, ode_tol, dr)?;
    let n = (r_max / dr).round() as usize;
    let mut w = vec![0.0; n + 1];
    let mut dw = vec![0.0; n + 1];
    let mut r = vec![0.0; n + 1];
    for i in 0..=n {
        r[i] = i as f64 * dr;
    }
    let mut graft_idx = None;
    for i in 0..traj.r.len().min(n + 1) {
        w[i] = traj.w[i];
        dw[i] = traj.dw[i];
        if traj.w[i] < GRAFT_LEVEL && traj.r[i] > 5.0 {
            graft_idx = Some(i);
            break;
        }
    }
    let gi = graft_idx.ok_or_else(|| {
        RadialError::InvalidParameter(format!(
            "trajectory at amplitude {amplitude} never reached the graft level; \
             increase r_max (= {r_max})"
        ))
    })?;
    let c = w[gi] / k0_asymptotic(r[gi]);
    for i in gi..=n {
        w[i] = c * k0_asymptotic(r[i]);
        dw[i] = -c * k1_asymptotic(r[i]);
    }

    let mut profile =
        RadialProfile { r, w, dw, amplitude, theta: 0.0, r_max };
    let window = (10.0_f64.min(0.4 * r_max), 15.0_f64.min(0.6 * r_max));
    profile.theta = decay_rate(&profile, window)?;
    Ok(profile)
}

/// Least-squares slope of -log w(r) against r on the window.
pub fn decay_rate(profile: &RadialProfile, window: (f64, f64)) -> Result<f64, RadialError> {
    let (r_lo, r_hi) = window;
    if r_lo < 5.0 || r_hi > profile.r_max || r_lo >= r_hi {
        return Err(RadialError::FitWindow(format!(
            "window ({r_lo}, {r_hi}) must satisfy 5 ≤ r_lo < r_hi ≤ r_max"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..profile.r.len() {
        let r = profile.r[i];
        if r >= r_lo && r <= r_hi {
            if profile.w[i] <= 0.0 {
                return Err(RadialError::FitWindow(
                    "profile is nonpositive inside the fit window".into(),
                ));
            }
            xs.push(r);
            ys.push(-profile.w[i].ln());
        }
    }
    if xs.len() < 3 {
        return Err(RadialError::FitWindow("window contains fewer than 3 samples".into()));
    }
    Ok(numerics::linear_fit(&xs, &ys).slope)
}

/// Slope of -log(w √r) against r; removes the algebraic prefactor so the fit
/// isolates the pure exponential rate.
pub fn refined_decay_rate(profile: &RadialProfile, window: (f64, f64)) -> Result<f64, RadialError> {
    let (r_lo, r_hi) = window;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..profile.r.len() {
        let r = profile.r[i];
        if r >= r_lo && r <= r_hi && profile.w[i] > 0.0 {
            xs.push(r);
            ys.push(-(profile.w[i] * r.sqrt()).ln());
        }
    }
    if xs.len() < 3 {
        return Err(RadialError::FitWindow("window contains fewer than 3 samples".into()));
    }
    Ok(numerics::linear_fit(&xs, &ys).slope)
}

/// Plane energy I(w) = ½∫_{ℝ²}(|∇w|² + w²) − ∫_{ℝ²} F(w)
///                  = π ∫₀^∞ (w'² + w² − 2F(w)) r dr.
pub fn energy_i(profile: &RadialProfile) -> f64 {
    let nl = Nonlinearity;
    let vals: Vec<f64> = (0..profile.r.len())
        .map(|i| {
            let (w, dw, r) = (profile.w[i], profile.dw[i], profile.r[i]);
            (dw * dw + w * w - 2.0 * nl.big_f(w)) * r
        })
        .collect();
    std::f64::consts::PI * numerics::simpson_uniform(&vals, profile.dr())
}

/// I(w) written through the constraint: ½∫ w²(e^{w²}−1) − ∫ F(w) over ℝ².
pub fn energy_i_nehari_form(profile: &RadialProfile) -> f64 {
    let nl = Nonlinearity;
    let vals: Vec<f64> = (0..profile.r.len())
        .map(|i| {
            let (w, r) = (profile.w[i], profile.r[i]);
            (0.5 * w * w * ((w * w).exp() - 1.0) - nl.big_f(w)) * r
        })
        .collect();
    2.0 * std::f64::consts::PI * numerics::simpson_uniform(&vals, profile.dr())
}

/// Relative defect of ∫(|∇w|² + w²) = ∫ w²(e^{w²} − 1) over ℝ².
pub fn nehari_identity_residual(profile: &RadialProfile) -> f64 {
    let h1: f64 = {
        let vals: Vec<f64> = (0..profile.r.len())
            .map(|i| (profile.dw[i].powi(2) + profile.w[i].powi(2)) * profile.r[i])
            .collect();
        numerics::simpson_uniform(&vals, profile.dr())
    };
    let mass: f64 = {
        let vals: Vec<f64> = (0..profile.r.len())
            .map(|i| {
                let w = profile.w[i];
                w * w * ((w * w).exp() - 1.0) * profile.r[i]
            })
            .collect();
        numerics::simpson_uniform(&vals, profile.dr())
    };
    (h1 - mass).abs() / h1.max(1e-300)
}

/// γ = ⅓ ∫_{ℝ²₊} w'(|z|)² z₂ dz. In polar coordinates over the half-plane
/// the z₂ moment reduces to (∫₀^π sin φ dφ) ∫ w'² r² dr = 2 ∫ w'² r² dr,
/// hence γ = ⅔ ∫₀^∞ w'(r)² r² dr.
pub fn gamma_constant(profile: &RadialProfile) -> f64 {
    let vals: Vec<f64> = (0..profile.r.len())
        .map(|i| profile.dw[i].powi(2) * profile.r[i].powi(2))
        .collect();
    (2.0 / 3.0) * numerics::simpson_uniform(&vals, profile.dr())
}

/// The three half-plane z₂-moment identities, each evaluated by independent
/// tensor-grid polar quadrature (not the 1-D reductions):
///
/// ∫ (∂w/∂z₁)² z₂ = γ,   ∫ (∂w/∂z₂)² z₂ = 2γ,
/// ∫ (½(|∇w|² + w²) − F(w)) z₂ = 2γ.
///
/// Returns |LHS/γ − {1, 2, 2}|; all zeros for the zero profile.
pub fn pohozaev_checks(profile: &RadialProfile) -> [f64; 3] {
    let gamma = gamma_constant(profile);
    if gamma.abs() < 1e-300 {
        return [0.0; 3];
    }
    let nl = Nonlinearity;
    let n_ang = 128;
    let dphi = std::f64::consts::PI / n_ang as f64;
    // angular moments by Simpson: ∫ cos²φ sinφ, ∫ sin³φ, ∫ sinφ
    let mut m_cos2 = vec![0.0; n_ang + 1];
    let mut m_sin2 = vec![0.0; n_ang + 1];
    let mut m_one = vec![0.0; n_ang + 1];
    for (k, ((a, b), c)) in m_cos2
        .iter_mut()
        .zip(m_sin2.iter_mut())
        .zip(m_one.iter_mut())
        .enumerate()
    {
        let phi = k as f64 * dphi;
        *a = phi.cos().powi(2) * phi.sin();
        *b = phi.sin().powi(3);
        *c = phi.sin();
    }
    let w_cos2 = numerics::simpson_uniform(&m_cos2, dphi);
    let w_sin2 = numerics::simpson_uniform(&m_sin2, dphi);
    let w_one = numerics::simpson_uniform(&m_one, dphi);

    // radial factors: ∂w/∂z₁ = w' cosφ, ∂w/∂z₂ = w' sinφ, z₂ = r sinφ,
    // area element r dr dφ
    let dr = profile.dr();
    let rad_grad: Vec<f64> = (0..profile.r.len())
        .map(|i| profile.dw[i].powi(2) * profile.r[i].powi(2))
        .collect();
    let rad_poho: Vec<f64> = (0..profile.r.len())
        .map(|i| {
            let (w, dwv, r) = (profile.w[i], profile.dw[i], profile.r[i]);
            (0.5 * (dwv * dwv + w * w) - nl.big_f(w)) * r * r
        })
        .collect();
    let int_grad = numerics::simpson_uniform(&rad_grad, dr);
    let int_poho = numerics::simpson_uniform(&rad_poho, dr);

    let lhs1 = w_cos2 * int_grad;
    let lhs2 = w_sin2 * int_grad;
    let lhs3 = w_one * int_poho;
    [
        (lhs1 / gamma - 1.0).abs(),
        (lhs2 / gamma - 2.0).abs(),
        (lhs3 / gamma - 2.0).abs(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_ln2() -> f64 {
        (2.0_f64.ln()).sqrt()
    }

    #[test]
    fn nonlinearity_derivative_consistency() {
        let nl = Nonlinearity;
        // F' = f at 100 sample points, relative tolerance 1e-6
        for i in 0..100 {
            let w = -2.0 + 4.0 * i as f64 / 99.0;
            let h = 1e-6;
            let fd = (nl.big_f(w + h) - nl.big_f(w - h)) / (2.0 * h);
            let scale = nl.f(w).abs().max(1e-3);
            assert!((fd - nl.f(w)).abs() <= 1e-6 * scale, "w = {w}");
        }
        assert_eq!(nl.f(0.0), 0.0);
        assert_eq!(nl.big_f(0.0), 0.0);
        // f(w)/w → 0 as w → 0
        let w = 1e-6;
        assert!((nl.f(w) / w).abs() <= 1e-11);
    }

    #[test]
    fn equilibrium_amplitude_stays_constant() {
        let a = sqrt_ln2();
        let t = integrate_radial(a, 25.0, 1e-12, 0.05).unwrap();
        assert_eq!(t.reason, StopReason::ReachedRmax);
        for (&w, &dw) in t.w.iter().zip(&t.dw) {
            assert!((w - a).abs() < 1e-10);
            assert!(dw.abs() < 1e-10);
        }
    }

    #[test]
    fn tiny_amplitude_does_not_decay() {
        let t = integrate_radial(1e-3, 25.0, 1e-12, 0.05).unwrap();
        assert_ne!(t.reason, StopReason::Decayed);
        assert!(t.w.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn large_amplitude_crosses_zero() {
        let t = integrate_radial(5.0, 25.0, 1e-12, 0.05).unwrap();
        assert_eq!(t.reason, StopReason::CrossedZero);
    }

    #[test]
    fn overflow_amplitude_reports_error() {
        assert!(matches!(
            integrate_radial(27.0, 25.0, 1e-12, 0.05),
            Err(RadialError::Overflow(..))
        ));
    }

    #[test]
    fn shooting_profile_props() {
        let p = shoot_ground_state(1e-10, 25.0).unwrap();
        assert!(p.amplitude > 0.8326, "amplitude {}", p.amplitude);
        // regression constant from the shooting + bisection oracle at
        // tol 1e-10 (first computed value, frozen)
        assert!(
            (p.amplitude - 1.773_571_9).abs() < 1e-6,
            "amplitude regression: {}",
            p.amplitude
        );
        // strictly decreasing, positive, decayed
        for i in 1..p.w.len() {
            assert!(p.w[i] > 0.0, "w({}) = {}", p.r[i], p.w[i]);
            assert!(p.w[i] < p.w[i - 1], "not decreasing at r = {}", p.r[i]);
        }
        assert!(p.w.last().unwrap() <= &1e-8);
        assert!(p.tail_mass_fraction() < 1e-8);
    }

    #[test]
    fn rmax_doubling_leaves_amplitude_unchanged() {
        let p25 = shoot_ground_state_with(1e-10, 25.0, 1e-10, 0.01).unwrap();
        let p50 = shoot_ground_state_with(1e-10, 50.0, 1e-10, 0.01).unwrap();
        assert!((p25.amplitude - p50.amplitude).abs() <= 1e-8);
    }

    #[test]
    fn decay_rate_windows() {
        let p = shoot_ground_state(1e-10, 25.0).unwrap();
        let theta = decay_rate(&p, (10.0, 15.0)).unwrap();
        assert!(theta > 0.5 && theta <= 1.2, "theta = {theta}");
        let refined = refined_decay_rate(&p, (10.0, 15.0)).unwrap();
        assert!((refined - 1.0).abs() < 0.05, "refined slope = {refined}");
    }

    #[test]
    fn synthetic_exponential_decay_rate() {
        let dr = 0.01;
        let n = 2000;
        let r: Vec<f64> = (0..=n).map(|i| i as f64 * dr).collect();
        let w: Vec<f64> = r.iter().map(|&r| (-2.0 * r).exp()).collect();
        let dw: Vec<f64> = r.iter().map(|&r| -2.0 * (-2.0 * r).exp()).collect();
        let p = RadialProfile { r, w, dw, amplitude: 1.0, theta: 0.0, r_max: n as f64 * dr };
        let theta = decay_rate(&p, (10.0, 18.0)).unwrap();
        assert!((theta - 2.0).abs() < 1e-6);
    }

    #[test]
    fn fit_window_errors() {
        let p = shoot_ground_state(1e-8, 25.0).unwrap();
        assert!(decay_rate(&p, (1.0, 15.0)).is_err());
        assert!(decay_rate(&p, (10.0, 40.0)).is_err());
    }

    fn zero_profile() -> RadialProfile {
        let n = 100;
        RadialProfile {
            r: (0..=n).map(|i| i as f64 * 0.1).collect(),
            w: vec![0.0; n + 1],
            dw: vec![0.0; n + 1],
            amplitude: 0.0,
            theta: 0.0,
            r_max: 10.0,
        }
    }

    #[test]
    fn zero_profile_conventions() {
        let z = zero_profile();
        assert_eq!(energy_i(&z), 0.0);
        assert_eq!(gamma_constant(&z), 0.0);
        assert_eq!(pohozaev_checks(&z), [0.0; 3]);
    }

    #[test]
    fn energy_positive_and_nehari_consistent() {
        let p = shoot_ground_state(1e-10, 25.0).unwrap();
        let i1 = energy_i(&p);
        let i2 = energy_i_nehari_form(&p);
        assert!(i1 > 0.0);
        assert!((i1 - i2).abs() <= 1e-5 * i1.abs(), "I = {i1} vs Nehari form {i2}");
        // regression constant, frozen from the quadrature oracle
        assert!((i1 - 2.939_573).abs() < 5e-5, "I(w) regression: {i1}");
        assert!((gamma_constant(&p) - 0.439_087_5).abs() < 5e-6);
    }

    #[test]
    fn energy_reproducible_under_grid_refinement() {
        // Richardson-style oracle: halving both the integrator tolerance and
        // the grid changes I(w) and gamma by less than 1e-7 relative
        let p1 = shoot_ground_state_with(1e-11, 25.0, 1e-12, 0.0025).unwrap();
        let p2 = shoot_ground_state_with(1e-11, 25.0, 5e-13, 0.00125).unwrap();
        let (i1, i2) = (energy_i(&p1), energy_i(&p2));
        assert!((i1 - i2).abs() <= 1e-7 * i1.abs().max(1.0), "{i1} vs {i2}");
        let (g1, g2) = (gamma_constant(&p1), gamma_constant(&p2));
        assert!((g1 - g2).abs() <= 1e-7 * g1.abs().max(1.0), "{g1} vs {g2}");
    }

    #[test]
    fn moment_identities_on_ground_profile() {
        let p = shoot_ground_state(1e-10, 25.0).unwrap();
        let res = pohozaev_checks(&p);
        assert!(res[0] <= 1e-4, "first moment residual {}", res[0]);
        assert!(res[1] <= 1e-4, "second moment residual {}", res[1]);
        assert!(res[2] <= 1e-3, "pohozaev residual {}", res[2]);
        assert!(nehari_identity_residual(&p) <= 1e-4);
    }

    #[test]
    fn shooting_bracket_dichotomy() {
        // in the final bracket the lower end never crosses zero and the
        // upper end always does
        let p = shoot_ground_state(1e-10, 25.0).unwrap();
        let eps = 1e-9;
        let lo = integrate_radial(p.amplitude - eps, 25.0, 1e-12, 0.05).unwrap();
        let hi = integrate_radial(p.amplitude + eps, 25.0, 1e-12, 0.05).unwrap();
        assert_ne!(lo.reason, StopReason::CrossedZero);
        assert_eq!(hi.reason, StopReason::CrossedZero);
    }

    #[test]
    fn hermite_eval_matches_grid() {
        let p = shoot_ground_state(1e-10, 25.0).unwrap();
        for &(i, off) in &[(100usize, 0.0), (200, 0.5), (1000, 0.25)] {
            let rq = p.r[i] + off * p.dr();
            let w = p.eval(rq);
            if off == 0.0 {
                assert!((w - p.w[i]).abs() < 1e-14);
            } else {
                assert!(w < p.w[i] && w > p.w[i + 1]);
            }
        }
        assert_eq!(p.eval(30.0), 0.0);
        assert_eq!(p.eval(0.0), p.amplitude);
    }
}
