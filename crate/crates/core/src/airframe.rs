//! Canard/tail controlled airframe with first-order fin lags.
//!
//! Lift and pitch moment are affine in the state and fin deflections.
//! Positive deflection of either surface produces a nose-up moment.
//! The inner loop trims for the commanded acceleration and adds a
//! proportional correction on the acceleration error.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AirframeError {
    #[error("airframe state became non-finite")]
    NonFinite,
    #[error("invalid airframe parameter: {0}")]
    Invalid(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AirframeState {
    pub alpha: f64,
    pub q: f64,
    pub pitch: f64,
    pub delta_c: f64,
    pub delta_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AirframeParams {
    pub mass: f64,
    pub inertia: f64,
    pub tau_c: f64,
    pub tau_t: f64,
    /// (L_α, L_δc, L_δt), newtons per radian
    pub lift_coeffs: [f64; 3],
    /// (M_α, M_q, M_δc, M_δt)
    pub moment_coeffs: [f64; 4],
    /// Extra deflection per unit acceleration error, rad per m/s².
    pub alloc_gain: f64,
    /// Fraction of the deflection command sent to the canard.
    pub canard_share: f64,
    /// Deflection limit, radians.
    pub deflection_limit: f64,
}

impl Default for AirframeParams {
    fn default() -> Self {
        AirframeParams {
            mass: 150.0,
            inertia: 60.0,
            tau_c: 0.02,
            tau_t: 0.02,
            lift_coeffs: [1.2e5, 1.5e4, -1.0e4],
            moment_coeffs: [-3.0e4, -1.5e3, 2.4e4, 3.0e4],
            alloc_gain: 2e-4,
            canard_share: 0.5,
            deflection_limit: 30f64.to_radians(),
        }
    }
}

impl AirframeParams {
    pub fn validate(&self) -> Result<(), AirframeError> {
        if !(self.mass > 0.0 && self.inertia > 0.0) {
            return Err(AirframeError::Invalid("mass and inertia must be positive"));
        }
        if !(self.tau_c > 0.0 && self.tau_t > 0.0) {
            return Err(AirframeError::Invalid(
                "fin time constants must be positive",
            ));
        }
        if !(0.0..=1.0).contains(&self.canard_share) {
            return Err(AirframeError::Invalid("canard_share must lie in [0, 1]"));
        }
        if !(self.deflection_limit > 0.0) {
            return Err(AirframeError::Invalid("deflection_limit must be positive"));
        }
        let (_, mu) = self.control_derivs();
        if mu == 0.0 {
            return Err(AirframeError::Invalid("fins produce no pitch moment"));
        }
        Ok(())
    }

    fn control_derivs(&self) -> (f64, f64) {
        let s = self.canard_share;
        let [_, lc, lt] = self.lift_coeffs;
        let [_, _, mc, mt] = self.moment_coeffs;
        (s * lc + (1.0 - s) * lt, s * mc + (1.0 - s) * mt)
    }

    pub fn lift(&self, s: &AirframeState) -> f64 {
        let [la, lc, lt] = self.lift_coeffs;
        la * s.alpha + lc * s.delta_c + lt * s.delta_t
    }

    pub fn moment(&self, s: &AirframeState) -> f64 {
        let [ma, mq, mc, mt] = self.moment_coeffs;
        ma * s.alpha + mq * s.q + mc * s.delta_c + mt * s.delta_t
    }

    /// Deflection command that holds a steady turn at `a` (q = a / v, M = 0).
    pub fn trim_deflection(&self, a: f64, v: f64) -> f64 {
        let [la, _, _] = self.lift_coeffs;
        let [ma, mq, _, _] = self.moment_coeffs;
        let (lu, mu) = self.control_derivs();
        let q = a / v;
        // la α + lu u = m a ; ma α + mu u = −mq q
        let det = la * mu - lu * ma;
        (la * (-mq * q) - ma * self.mass * a) / det
    }
}

/// One exact step of ẋ = (setpoint − x)/τ.
pub fn firstorder_lag_step(x: f64, setpoint: f64, tau: f64, dt: f64) -> f64 {
    x + (setpoint - x) * (1.0 - (-dt / tau).exp())
}

/// Advances the airframe one step and returns the realized acceleration.
pub fn airframe_step(
    s: &AirframeState,
    a_cmd: f64,
    p: &AirframeParams,
    v: f64,
    dt: f64,
) -> Result<(AirframeState, f64), AirframeError> {
    let a_now = p.lift(s) / p.mass;
    let u = p.trim_deflection(a_cmd, v) + p.alloc_gain * (a_cmd - a_now);
    let lim = p.deflection_limit;
    let sc = (p.canard_share * u).clamp(-lim, lim);
    let st = ((1.0 - p.canard_share) * u).clamp(-lim, lim);
    let (c0, t0) = (s.delta_c, s.delta_t);
    let fins = |tau: f64| {
        (
            sc + (c0 - sc) * (-tau / p.tau_c).exp(),
            st + (t0 - st) * (-tau / p.tau_t).exp(),
        )
    };
    let deriv = |x: [f64; 3], tau: f64| {
        let (dc, dtl) = fins(tau);
        let st = AirframeState {
            alpha: x[0],
            q: x[1],
            pitch: x[2],
            delta_c: dc,
            delta_t: dtl,
        };
        let a = p.lift(&st) / p.mass;
        [x[1] - a / v, p.moment(&st) / p.inertia, x[1]]
    };
    let x0 = [s.alpha, s.q, s.pitch];
    let add =
        |x: [f64; 3], k: [f64; 3], h: f64| [x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]];
    let k1 = deriv(x0, 0.0);
    let k2 = deriv(add(x0, k1, dt / 2.0), dt / 2.0);
    let k3 = deriv(add(x0, k2, dt / 2.0), dt / 2.0);
    let k4 = deriv(add(x0, k3, dt), dt);
    let mut x = x0;
    for m in 0..3 {
        x[m] += dt / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
    }
    let (dc, dtl) = fins(dt);
    let next = AirframeState {
        alpha: x[0],
        q: x[1],
        pitch: x[2],
        delta_c: dc,
        delta_t: dtl,
    };
    let a_real = p.lift(&next) / p.mass;
    let finite = [
        next.alpha,
        next.q,
        next.pitch,
        next.delta_c,
        next.delta_t,
        a_real,
    ]
    .iter()
    .all(|x| x.is_finite());
    if !finite {
        return Err(AirframeError::NonFinite);
    }
    Ok((next, a_real))
}
