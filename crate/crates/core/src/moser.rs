//! Sharpness of the exponent 2π for the borderline functional
//! sup ∫ u²(e^{αu²} − 1) over the unit ball of W^{1,2}.
//!
//! The witness is a truncated-logarithm concentrator at a boundary point,
//! evaluated on the exact half-disk model so that its Dirichlet energy is
//! exactly 1: a plateau of height (1/2π)^{1/2}(log 1/ε)^{1/2} on r ≤ δ√ε, a
//! logarithmic ramp (2/(−π log ε))^{1/2} log(δ/r) up to r = δ, zero beyond.
//! The functional stays bounded as ε → 0 for α < 2π and grows like
//! log(1/ε) at α = 2π.

use crate::numerics;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MoserError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("overflow: exponent {0:.2} at plateau value {1:.4}")]
    Overflow(f64, f64),
}

/// One member of the concentrating family on the half-disk model.
#[derive(Debug, Clone, Copy)]
pub struct MoserFunction {
    pub eps: f64,
    pub delta: f64,
}

pub const DEFAULT_DELTA: f64 = 0.5;

impl MoserFunction {
    pub fn new(eps: f64, delta: f64) -> Result<MoserFunction, MoserError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(MoserError::InvalidParameter(format!(
                "eps must lie in (0,1), got {eps}"
            )));
        }
        if !(delta > 0.0) {
            return Err(MoserError::InvalidParameter("delta must be positive".into()));
        }
        Ok(MoserFunction { eps, delta })
    }

    pub fn plateau_value(&self) -> f64 {
        let log = (1.0 / self.eps).ln();
        (log / (2.0 * std::f64::consts::PI)).sqrt()
    }

    /// Radial evaluation at distance r from the concentration point.
    pub fn eval_radial(&self, r: f64) -> f64 {
        let inner = self.delta * self.eps.sqrt();
        if r <= inner {
            self.plateau_value()
        } else if r <= self.delta {
            let coef = (2.0 / (std::f64::consts::PI * (1.0 / self.eps).ln())).sqrt();
            coef * (self.delta / r).ln()
        } else {
            0.0
        }
    }

    /// Evaluation at a point of the half-disk model (x₂ ≥ 0, concentration
    /// point at the origin).
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.eval_radial(x[0].hypot(x[1]))
    }

    /// Dirichlet energy over the half-disk; equals 1 in closed form:
    /// π ∫ (u')² r dr = π · (2/(π log(1/ε))) · log(1/√ε) = 1.
    pub fn dirichlet_energy(&self) -> f64 {
        let coef2 = 2.0 / (std::f64::consts::PI * (1.0 / self.eps).ln());
        std::f64::consts::PI * coef2 * (1.0 / self.eps.sqrt()).ln()
    }

    /// Dirichlet energy by radial quadrature in t = log(δ/r) (oracle for the
    /// closed form).
    pub fn dirichlet_energy_quadrature(&self) -> f64 {
        let coef2 = 2.0 / (std::f64::consts::PI * (1.0 / self.eps).ln());
        // |u'| = coef / r on the ramp; ∫ (u')² r dr = coef² ∫ dr/r = coef² ∫ dt
        let n = 4001;
        let t_hi = (1.0 / self.eps.sqrt()).ln();
        let dt = t_hi / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|_| coef2).collect();
        std::f64::consts::PI * numerics::simpson_uniform(&vals, dt)
    }

    /// ∫ u² over the half-disk: exact plateau piece plus a ramp quadrature
    /// in the logarithmic variable.
    pub fn l2_norm_squared(&self) -> f64 {
        let inner = self.delta * self.eps.sqrt();
        let plateau = self.plateau_value().powi(2) * 0.5 * std::f64::consts::PI * inner * inner;
        let coef2 = 2.0 / (std::f64::consts::PI * (1.0 / self.eps).ln());
        // r = δ e^{-t}: ∫ u² r dr = δ² coef² ∫ t² e^{-2t} dt over [0, log(1/√ε)]
        let n = 4001;
        let t_hi = (1.0 / self.eps.sqrt()).ln();
        let dt = t_hi / (n - 1) as f64;
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                t * t * (-2.0 * t).exp()
            })
            .collect();
        let ramp = std::f64::consts::PI
            * coef2
            * self.delta
            * self.delta
            * numerics::simpson_uniform(&vals, dt);
        plateau + ramp
    }

    /// Squared W^{1,2} norm.
    pub fn h1_norm_squared(&self) -> f64 {
        self.dirichlet_energy() + self.l2_norm_squared()
    }
}

/// ∫ v²(e^{αv²} − 1) over the half-disk model with v = u/‖u‖_{W^{1,2}}.
/// The plateau piece is exact; the ramp is integrated in t = log(δ/r).
pub fn tm_functional(u: &MoserFunction, alpha: f64) -> Result<f64, MoserError> {
    if alpha < 0.0 {
        return Err(MoserError::InvalidParameter("alpha must be nonnegative".into()));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let norm2 = u.h1_norm_squared();
    let v0 = u.plateau_value() / norm2.sqrt();
    let exponent = alpha * v0 * v0;
    if exponent > 700.0 {
        return Err(MoserError::Overflow(exponent, u.plateau_value()));
    }
    let inner = u.delta * u.eps.sqrt();
    let plateau =
        v0 * v0 * (exponent.exp() - 1.0) * 0.5 * std::f64::consts::PI * inner * inner;
    // ramp: v(t) = coef·t/‖u‖ with t = log(δ/r), r dr = δ² e^{-2t} dt
    let coef = (2.0 / (std::f64::consts::PI * (1.0 / u.eps).ln())).sqrt() / norm2.sqrt();
    let n = 8001;
    let t_hi = (1.0 / u.eps.sqrt()).ln();
    let dt = t_hi / (n - 1) as f64;
    let vals: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            let v = coef * t;
            let e = alpha * v * v - 2.0 * t;
            v * v * (e.exp() - (-2.0 * t).exp())
        })
        .collect();
    let ramp =
        std::f64::consts::PI * u.delta * u.delta * numerics::simpson_uniform(&vals, dt);
    Ok(plateau + ramp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthClass {
    Bounded,
    Diverging,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SharpnessRow {
    pub alpha: f64,
    pub values: Vec<f64>,
    pub classification: GrowthClass,
    pub slope_vs_log: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SharpnessTable {
    pub eps_list: Vec<f64>,
    pub rows: Vec<SharpnessRow>,
}

/// Evaluate the functional across (α, ε) and classify each α as bounded
/// (last/first ratio ≤ 2) or diverging (growth at least linear in
/// log(1/ε): positive least-squares slope with R² > 0.9).
pub fn sharpness_sweep(
    alphas: &[f64],
    eps_list: &[f64],
    delta: f64,
) -> Result<SharpnessTable, MoserError> {
    if eps_list.len() < 2 {
        return Err(MoserError::InvalidParameter("need at least two eps values".into()));
    }
    // four decade values, e.g. 1e-2 … 1e-5
    let span = eps_list.iter().cloned().fold(f64::INFINITY, f64::min)
        / eps_list.iter().cloned().fold(0.0_f64, f64::max);
    if span > 1.000001e-3 {
        return Err(MoserError::InvalidParameter(
            "eps list must span at least four decades".into(),
        ));
    }
    let logs: Vec<f64> = eps_list.iter().map(|e| (1.0 / e).ln()).collect();
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let mut values = Vec::with_capacity(eps_list.len());
        for &eps in eps_list {
            let u = MoserFunction::new(eps, delta)?;
            values.push(tm_functional(&u, alpha)?);
        }
        let fit = numerics::linear_fit(&logs, &values);
        let vmax = values.iter().cloned().fold(0.0_f64, f64::max);
        let classification = if vmax <= 1e-12 {
            GrowthClass::Bounded
        } else {
            let first = values.first().copied().unwrap();
            let last = values.last().copied().unwrap();
            if first > 0.0 && last / first <= 2.0 {
                GrowthClass::Bounded
            } else if fit.slope > 0.0 && fit.r_squared > 0.9 {
                GrowthClass::Diverging
            } else {
                GrowthClass::Indeterminate
            }
        };
        rows.push(SharpnessRow {
            alpha,
            values,
            classification,
            slope_vs_log: fit.slope,
            r_squared: fit.r_squared,
        });
    }
    Ok(SharpnessTable { eps_list: eps_list.to_vec(), rows })
}
