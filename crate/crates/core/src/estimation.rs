//! Time-to-go estimators, consensus bookkeeping and the target maneuver observer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engagement::{InterceptorKinematics, RelativeRates, TargetModel};
use crate::network::Topology;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("interceptor speed {v} m/s must exceed target speed {v_t} m/s")]
    InvalidSpeedOrdering { v: f64, v_t: f64 },
    #[error("navigation gain N = {0} must be at least 3")]
    InvalidGain(f64),
    #[error("observer gains must satisfy G2 > G1 > G0 > 0 and H2 > H1 > H0 > 0")]
    ObserverGainOrdering,
    #[error("observer state became non-finite")]
    NonFinite,
    #[error("LOS rate {0:e} rad/s too small for the deviated-pursuit rate")]
    SingularLosRate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TgoLaw {
    DeviatedPursuit,
    Stationary,
}

/// A time-to-go value tagged with the estimator that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TgoEstimate {
    pub value: f64,
    pub law: TgoLaw,
}

/// Time-to-go under deviated pursuit at a fixed look angle.
pub fn tgo_deviated(
    r: f64,
    delta: f64,
    theta: f64,
    gamma_t: f64,
    v: f64,
    v_t: f64,
) -> Result<f64, EstimationError> {
    if !(v > v_t) {
        return Err(EstimationError::InvalidSpeedOrdering { v, v_t });
    }
    Ok(r / delta.cos() * (v + v_t * (gamma_t - theta + delta).cos()) / (v * v - v_t * v_t))
}

/// Time-to-go against a stationary point under the navigation-gain law.
pub fn tgo_stationary(r: f64, delta: f64, v: f64, n_nav: f64) -> Result<f64, EstimationError> {
    if !(n_nav >= 3.0) {
        return Err(EstimationError::InvalidGain(n_nav));
    }
    Ok(r / v * (1.0 + delta.sin().powi(2) / (4.0 * n_nav - 2.0)))
}

/// Evaluates the estimator selected by `law` for one interceptor.
pub fn tgo_for(
    law: TgoLaw,
    ik: &InterceptorKinematics,
    tgt: &TargetModel,
    n_nav: f64,
) -> Result<TgoEstimate, EstimationError> {
    let value = match law {
        TgoLaw::DeviatedPursuit => {
            tgo_deviated(ik.r, ik.delta(), ik.theta, tgt.gamma_t, ik.v, tgt.v_t)?
        }
        TgoLaw::Stationary => tgo_stationary(ik.r, ik.delta(), ik.v, n_nav)?,
    };
    Ok(TgoEstimate { value, law })
}

/// Interception-time error and neighborhood disagreement for one interceptor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsensusError {
    pub xi: f64,
    pub zeta: f64,
}

/// ζ_i = Σ_{j∈N_i} (t_go_j − t_go_i).
pub fn disagreement(tgos: &[f64], g: &Topology, i: usize) -> f64 {
    g.nbrs(i).iter().map(|&j| tgos[j] - tgos[i]).sum()
}

pub fn consensus_errors(tgos: &[f64], g: &Topology, t: f64, t_f: f64) -> Vec<ConsensusError> {
    (0..tgos.len())
        .map(|i| ConsensusError {
            xi: t + tgos[i] - t_f,
            zeta: disagreement(tgos, g, i),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObserverGains {
    pub g: [f64; 3],
    pub h: [f64; 3],
    /// Bound on |ȧ_T|.
    pub f_bound: f64,
}

impl Default for ObserverGains {
    fn default() -> Self {
        ObserverGains {
            g: [0.01, 0.05, 1.30],
            h: [0.005, 3.25, 3.3],
            f_bound: 0.1,
        }
    }
}

impl ObserverGains {
    pub fn validate(&self) -> Result<(), EstimationError> {
        let [g0, g1, g2] = self.g;
        let [h0, h1, h2] = self.h;
        if g2 > g1 && g1 > g0 && g0 > 0.0 && h2 > h1 && h1 > h0 && h0 > 0.0 && self.f_bound > 0.0 {
            Ok(())
        } else {
            Err(EstimationError::ObserverGainOrdering)
        }
    }
}

/// One sliding differentiator channel.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelState {
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
}

fn spow(x: f64, p: f64) -> f64 {
    x.abs().powf(p).copysign(x)
}

impl ChannelState {
    /// Advances one Euler step. `y` is the measured velocity component and
    /// `known` its model derivative without the target term. Returns the
    /// equivalent injection, which tracks the unknown part of `ẏ`.
    fn step(&mut self, gains: &ObserverGains, y: f64, known: f64, dt: f64) -> f64 {
        let [g0, g1, g2] = gains.g;
        let [h0, h1, h2] = gains.h;
        let f = gains.f_bound;
        let e0 = self.w0 - y;
        let u0 = -g2 * f.cbrt() * spow(e0, 2.0 / 3.0) - h2 * e0 + self.w1;
        let e1 = self.w1 - u0;
        let u1 = -g1 * f.sqrt() * spow(e1, 0.5) - h1 * e1 + self.w2;
        let e2 = self.w2 - u1;
        let w2_dot = -g0 * f * e2.signum() * (e2 != 0.0) as u8 as f64 - h0 * e2;
        self.w0 += dt * (known + u0);
        self.w1 += dt * u1;
        self.w2 += dt * w2_dot;
        u0
    }
}

/// Per-interceptor maneuver observer running on the radial and transverse
/// relative-velocity channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverState {
    pub gains: ObserverGains,
    pub radial: ChannelState,
    pub normal: ChannelState,
    pub a_t_hat: f64,
}

impl ObserverState {
    /// Starts both channels at the measured velocity components.
    pub fn new(gains: ObserverGains, rates: &RelativeRates) -> Result<Self, EstimationError> {
        gains.validate()?;
        Ok(ObserverState {
            gains,
            radial: ChannelState {
                w0: rates.v_r,
                ..Default::default()
            },
            normal: ChannelState {
                w0: rates.v_theta,
                ..Default::default()
            },
            a_t_hat: 0.0,
        })
    }

    /// Internal second-order state projected on the target normal; lags the
    /// equivalent-control estimate by roughly ȧ_T / H1.
    pub fn smoothed_estimate(&self, bearing: f64) -> f64 {
        -self.radial.w1 * bearing.sin() + self.normal.w1 * bearing.cos()
    }
}

/// Advances the observer by `dt` and returns the new state and â_T.
///
/// `bearing` is γ_T − θ.
pub fn observer_step(
    s: &ObserverState,
    rates: &RelativeRates,
    r: f64,
    delta: f64,
    a_cmd: f64,
    bearing: f64,
    dt: f64,
) -> Result<(ObserverState, f64), EstimationError> {
    let mut next = *s;
    let v_r = rates.v_r;
    let v_th = rates.v_theta;
    let known_r = v_th * v_th / r + a_cmd * delta.sin();
    let known_th = -v_r * v_th / r - a_cmd * delta.cos();
    let d_r = next.radial.step(&s.gains, v_r, known_r, dt);
    let d_th = next.normal.step(&s.gains, v_th, known_th, dt);
    let a_hat = -d_r * bearing.sin() + d_th * bearing.cos();
    next.a_t_hat = a_hat;
    let finite = [next.radial, next.normal]
        .iter()
        .all(|c| c.w0.is_finite() && c.w1.is_finite() && c.w2.is_finite());
    if !finite || !a_hat.is_finite() {
        return Err(EstimationError::NonFinite);
    }
    Ok((next, a_hat))
}

/// Analytic ξ̇ for the given lateral accelerations.
pub fn xi_rate_diagnostic(
    ik: &InterceptorKinematics,
    tgt: &TargetModel,
    a: f64,
    a_t: f64,
    law: TgoLaw,
    n_nav: f64,
) -> Result<f64, EstimationError> {
    let delta = ik.delta();
    match law {
        TgoLaw::DeviatedPursuit => {
            let v = ik.v;
            let vt = tgt.v_t;
            if !(v > vt) {
                return Err(EstimationError::InvalidSpeedOrdering { v, v_t: vt });
            }
            let bearing = tgt.gamma_t - ik.theta;
            let theta_dot = (vt * bearing.sin() - v * delta.sin()) / ik.r;
            if theta_dot.abs() < 1e-9 {
                return Err(EstimationError::SingularLosRate(theta_dot));
            }
            let d = v * v - vt * vt;
            let sec2 = 1.0 / delta.cos().powi(2);
            let r = ik.r;
            Ok(r * r * theta_dot * theta_dot * sec2 / d
                - r * r * theta_dot * sec2 / (v * d) * a
                - r * (delta + bearing).sin() / (d * delta.cos()) * a_t)
        }
        TgoLaw::Stationary => {
            let k = 4.0 * n_nav - 2.0;
            let s = delta.sin();
            Ok(1.0 - delta.cos() * (1.0 - s * s / k)
                + ik.r * (2.0 * delta).sin() / (ik.v * ik.v * k) * a)
        }
    }
}
