//! Planar interceptor/target kinematics.
//!
//! Angles are radians throughout. The line of sight points from the
//! interceptor to the target, so the interceptor sits at
//! `target - r (cos θ, sin θ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngagementError {
    #[error("degenerate range r = {0} m")]
    DegenerateRange(f64),
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = (a + PI).rem_euclid(2.0 * PI);
    if w == 0.0 {
        w = 2.0 * PI;
    }
    w - PI
}

/// Look angle δ = γ - θ, wrapped.
pub fn look_angle(gamma: f64, theta: f64) -> f64 {
    wrap_angle(gamma - theta)
}

/// Per-interceptor relative state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterceptorKinematics {
    pub r: f64,
    pub theta: f64,
    pub gamma: f64,
    pub v: f64,
}

impl InterceptorKinematics {
    pub fn delta(&self) -> f64 {
        look_angle(self.gamma, self.theta)
    }

    /// Cartesian position given the target position.
    pub fn position(&self, target_xy: (f64, f64)) -> (f64, f64) {
        (
            target_xy.0 - self.r * self.theta.cos(),
            target_xy.1 - self.r * self.theta.sin(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Stationary,
    ConstantSpeed,
    Maneuvering,
}

/// Lateral acceleration of the target as a function of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AccelProfile {
    Zero,
    Constant {
        value: f64,
    },
    /// `bias + amplitude * sin(omega * t)`
    Sinusoid {
        bias: f64,
        amplitude: f64,
        omega: f64,
    },
}

impl AccelProfile {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            AccelProfile::Zero => 0.0,
            AccelProfile::Constant { value } => value,
            AccelProfile::Sinusoid {
                bias,
                amplitude,
                omega,
            } => bias + amplitude * (omega * t).sin(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            AccelProfile::Zero => true,
            AccelProfile::Constant { value } => value == 0.0,
            AccelProfile::Sinusoid {
                bias, amplitude, ..
            } => bias == 0.0 && amplitude == 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetModel {
    pub kind: TargetKind,
    pub v_t: f64,
    pub gamma_t: f64,
    pub accel: AccelProfile,
    pub x: f64,
    pub y: f64,
}

impl TargetModel {
    pub fn stationary(x: f64, y: f64) -> Self {
        TargetModel {
            kind: TargetKind::Stationary,
            v_t: 0.0,
            gamma_t: 0.0,
            accel: AccelProfile::Zero,
            x,
            y,
        }
    }

    pub fn constant_speed(v_t: f64, gamma_t: f64) -> Self {
        TargetModel {
            kind: TargetKind::ConstantSpeed,
            v_t,
            gamma_t,
            accel: AccelProfile::Zero,
            x: 0.0,
            y: 0.0,
        }
    }

    pub fn maneuvering(v_t: f64, gamma_t: f64, accel: AccelProfile) -> Self {
        TargetModel {
            kind: TargetKind::Maneuvering,
            v_t,
            gamma_t,
            accel,
            x: 0.0,
            y: 0.0,
        }
    }

    pub fn accel_at(&self, t: f64) -> f64 {
        match self.kind {
            TargetKind::Maneuvering => self.accel.at(t),
            _ => 0.0,
        }
    }

    /// Checks the kind/speed/profile consistency rules.
    pub fn is_consistent(&self) -> bool {
        match self.kind {
            TargetKind::Stationary => self.v_t == 0.0 && self.accel.is_zero(),
            TargetKind::ConstantSpeed => self.v_t > 0.0 && self.accel.is_zero(),
            TargetKind::Maneuvering => self.v_t > 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeRates {
    pub r_dot: f64,
    pub theta_dot: f64,
    pub v_r: f64,
    pub v_theta: f64,
}

/// Range rate and LOS rate.
pub fn relative_rates(
    ik: &InterceptorKinematics,
    tgt: &TargetModel,
) -> Result<RelativeRates, EngagementError> {
    if !(ik.r > 0.0) || !ik.r.is_finite() {
        return Err(EngagementError::DegenerateRange(ik.r));
    }
    let delta = ik.delta();
    let bearing = tgt.gamma_t - ik.theta;
    let v_r = tgt.v_t * bearing.cos() - ik.v * delta.cos();
    let v_theta = tgt.v_t * bearing.sin() - ik.v * delta.sin();
    Ok(RelativeRates {
        r_dot: v_r,
        theta_dot: v_theta / ik.r,
        v_r,
        v_theta: ik.r * (v_theta / ik.r),
    })
}

pub fn heading_rate(a: f64, v: f64) -> f64 {
    a / v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn look_angle_examples() {
        assert!((look_angle(0.0, deg(35.0)) - deg(-35.0)).abs() < 1e-12);
        assert_eq!(look_angle(1.234, 1.234), 0.0);
        assert!((look_angle(deg(190.0), deg(200.0)) - deg(-10.0)).abs() < 1e-12);
    }

    #[test]
    fn wrap_maps_pi_to_pi() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(deg(-300.0)) - deg(60.0)).abs() < 1e-12);
    }

    #[test]
    fn pursuit_on_los() {
        let ik = InterceptorKinematics {
            r: 5000.0,
            theta: 0.3,
            gamma: 0.3,
            v: 250.0,
        };
        let rr = relative_rates(&ik, &TargetModel::stationary(0.0, 0.0)).unwrap();
        assert_eq!(rr.r_dot, -250.0);
        assert_eq!(rr.theta_dot, 0.0);
    }

    #[test]
    fn range_rate_oracle() {
        let ik = InterceptorKinematics {
            r: 10_000.0,
            theta: deg(35.0),
            gamma: 0.0,
            v: 400.0,
        };
        let tgt = TargetModel::constant_speed(200.0, deg(120.0));
        let rr = relative_rates(&ik, &tgt).unwrap();
        // 200 cos 85° - 400 cos 35°
        assert!((rr.r_dot - (-310.229669166065)).abs() < 1e-9);
    }

    #[test]
    fn los_rate_oracle() {
        let ik = InterceptorKinematics {
            r: 10_000.0,
            theta: 0.0,
            gamma: deg(45.0),
            v: 200.0,
        };
        let rr = relative_rates(&ik, &TargetModel::stationary(0.0, 0.0)).unwrap();
        assert!((rr.theta_dot + 0.014_142_135_6).abs() < 1e-9);
    }

    #[test]
    fn zero_range_is_rejected() {
        let ik = InterceptorKinematics {
            r: 0.0,
            theta: 0.0,
            gamma: 0.0,
            v: 200.0,
        };
        assert!(relative_rates(&ik, &TargetModel::stationary(0.0, 0.0)).is_err());
    }

    #[test]
    fn heading_rate_examples() {
        assert_eq!(heading_rate(0.0, 400.0), 0.0);
        assert!((heading_rate(196.2, 400.0) - 0.4905).abs() < 1e-12);
        let a_t = AccelProfile::Sinusoid {
            bias: 10.0,
            amplitude: 10.0,
            omega: PI / 10.0,
        };
        assert!((heading_rate(a_t.at(5.0), 200.0) - 0.1).abs() < 1e-12);
    }
}
