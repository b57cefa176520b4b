//! Cooperative guidance commands and gain calculators.
//!
//! Every law is written as a geometric shaping of a scalar consensus input
//! `u`: the shaping is chosen so that the interception-time error of the
//! interceptor evolves as `ξ̇ = u` (exactly when the maneuver estimate is
//! exact). The consensus input pushes each `ξ_i` toward its neighbors.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engagement::{look_angle, InterceptorKinematics, RelativeRates, TargetModel};
use crate::estimation::{tgo_stationary, EstimationError, TgoLaw};
use crate::network::Topology;

/// Largest exponent fed to `exp` inside the exponential consensus function.
pub const EXP_ARG_CAP: f64 = 700.0;
/// Below this |θ̇| only the nominal pursuit term is kept.
pub const THETA_DOT_FLOOR: f64 = 1e-6;
/// Magnitude floor for sin 2δ in the stationary shaping.
pub const SIN2DELTA_FLOOR: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GuidanceError {
    #[error("exponential consensus term overflow: |zeta|^c = {0}")]
    Overflow(f64),
    #[error("gamma function domain error at x = {0}")]
    GammaDomain(f64),
    #[error("constraint k*m_exp < 1 violated (k*m_exp = {0})")]
    KmTooLarge(f64),
    #[error("constraint k*n_exp > 1 violated (k*n_exp = {0})")]
    KnTooSmall(f64),
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    FixedManeuvering,
    FixedConstant,
    FixedStationary,
    SwitchFixedtimeManeuvering,
    SwitchFixedtimeStationary,
    SwitchPredefinedManeuvering,
    SwitchPredefinedConstant,
    SwitchPredefinedStationary,
    PipBaseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shaping {
    DeviatedPursuit,
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsensusKind {
    Exponential,
    Polynomial,
}

impl Law {
    pub const ALL: [Law; 9] = [
        Law::FixedManeuvering,
        Law::FixedConstant,
        Law::FixedStationary,
        Law::SwitchFixedtimeManeuvering,
        Law::SwitchFixedtimeStationary,
        Law::SwitchPredefinedManeuvering,
        Law::SwitchPredefinedConstant,
        Law::SwitchPredefinedStationary,
        Law::PipBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::FixedManeuvering => "fixed_maneuvering",
            Law::FixedConstant => "fixed_constant",
            Law::FixedStationary => "fixed_stationary",
            Law::SwitchFixedtimeManeuvering => "switch_fixedtime_maneuvering",
            Law::SwitchFixedtimeStationary => "switch_fixedtime_stationary",
            Law::SwitchPredefinedManeuvering => "switch_predefined_maneuvering",
            Law::SwitchPredefinedConstant => "switch_predefined_constant",
            Law::SwitchPredefinedStationary => "switch_predefined_stationary",
            Law::PipBaseline => "pip_baseline",
        }
    }

    pub fn parse(s: &str) -> Option<Law> {
        Law::ALL.into_iter().find(|l| l.name() == s)
    }

    pub fn shaping(self) -> Shaping {
        match self {
            Law::FixedStationary
            | Law::SwitchFixedtimeStationary
            | Law::SwitchPredefinedStationary
            | Law::PipBaseline => Shaping::Stationary,
            _ => Shaping::DeviatedPursuit,
        }
    }

    pub fn tgo_law(self) -> TgoLaw {
        match self.shaping() {
            Shaping::Stationary => TgoLaw::Stationary,
            Shaping::DeviatedPursuit => TgoLaw::DeviatedPursuit,
        }
    }

    pub fn consensus(self) -> ConsensusKind {
        match self {
            Law::SwitchPredefinedManeuvering
            | Law::SwitchPredefinedConstant
            | Law::SwitchPredefinedStationary => ConsensusKind::Polynomial,
            _ => ConsensusKind::Exponential,
        }
    }

    /// Laws that compensate an estimated target maneuver.
    pub fn uses_observer(self) -> bool {
        matches!(
            self,
            Law::FixedManeuvering
                | Law::SwitchFixedtimeManeuvering
                | Law::SwitchPredefinedManeuvering
        )
    }

    /// Laws whose gain is tied to a single fixed graph.
    pub fn requires_fixed_graph(self) -> bool {
        matches!(
            self,
            Law::FixedManeuvering | Law::FixedConstant | Law::FixedStationary | Law::PipBaseline
        )
    }

    /// Shaping applied to the predicted interception point instead of the target.
    pub fn is_pip(self) -> bool {
        self == Law::PipBaseline
    }
}

impl std::fmt::Display for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How the stationary switched predefined law embeds its consensus term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryForm {
    /// `ξ̇ = u`, the same structure as the fixed-time stationary law.
    #[default]
    Compact,
    /// Consensus term multiplied by the pursuit prefactor `v³cos²δ/(r²θ̇)`.
    Literal,
}

/// Coefficients of the polynomial consensus function
/// `(M|e|^m + N|e|^n)^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyCoefs {
    pub m_coef: f64,
    pub n_coef: f64,
    pub m_exp: f64,
    pub n_exp: f64,
    pub k_exp: f64,
}

impl PolyCoefs {
    pub fn check(&self) -> Result<(), GuidanceError> {
        if !(self.m_coef > 0.0 && self.n_coef > 0.0) {
            return Err(GuidanceError::Invalid(
                "M_coef and N_coef must be positive".into(),
            ));
        }
        if !(self.m_exp >= 0.0 && self.n_exp > 0.0 && self.k_exp > 0.0) {
            return Err(GuidanceError::Invalid(
                "m_exp must be non-negative, n_exp and k_exp positive".into(),
            ));
        }
        let km = self.k_exp * self.m_exp;
        let kn = self.k_exp * self.n_exp;
        if km >= 1.0 {
            return Err(GuidanceError::KmTooLarge(km));
        }
        if kn <= 1.0 {
            return Err(GuidanceError::KnTooSmall(kn));
        }
        Ok(())
    }

    pub fn eval(&self, e_abs: f64) -> f64 {
        (self.m_coef * e_abs.powf(self.m_exp) + self.n_coef * e_abs.powf(self.n_exp))
            .powf(self.k_exp)
    }
}

pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `sign(x)`, or `x / (|x| + bl)` when a boundary layer is configured.
pub fn soft_sign(x: f64, boundary_layer: Option<f64>) -> f64 {
    match boundary_layer {
        Some(bl) if bl > 0.0 => x / (x.abs() + bl),
        _ => sign(x),
    }
}

/// Ω(|ζ|) = (1/c) exp(|ζ|^c) |ζ|^(2−c).
pub fn omega_exp(zeta_abs: f64, c: f64) -> Result<f64, GuidanceError> {
    let p = zeta_abs.powf(c);
    if p > EXP_ARG_CAP {
        return Err(GuidanceError::Overflow(p));
    }
    Ok(p.exp() * zeta_abs.powf(2.0 - c) / c)
}

/// ζ⁻¹Ω(|ζ|) written as sign(ζ)(1/c)exp(|ζ|^c)|ζ|^(1−c); zero at ζ = 0.
/// The exponent is capped so the value stays finite.
pub fn omega_composite(zeta: f64, c: f64) -> f64 {
    if zeta == 0.0 {
        return 0.0;
    }
    let a = zeta.abs();
    let p = a.powf(c).min(EXP_ARG_CAP);
    sign(zeta) * p.exp() * a.powf(1.0 - c) / c
}

pub fn gamma_fn(x: f64) -> Result<f64, GuidanceError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(GuidanceError::GammaDomain(x));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// Minimum predefined-time gain for settling within `ts` over a family
/// whose worst graph has `min_edges` edges and connectivity `min_lambda2`.
pub fn predefined_gain(
    ts: f64,
    coefs: &PolyCoefs,
    min_edges: usize,
    min_lambda2: f64,
) -> Result<f64, GuidanceError> {
    coefs.check()?;
    if !(ts > 0.0) {
        return Err(GuidanceError::Invalid("T_s must be positive".into()));
    }
    if !(min_lambda2 > 0.0) || min_edges == 0 {
        return Err(GuidanceError::Invalid(
            "graph family must be connected".into(),
        ));
    }
    let PolyCoefs {
        m_coef: big_m,
        n_coef: big_n,
        m_exp: m,
        n_exp: n,
        k_exp: k,
    } = *coefs;
    let a = (1.0 - k * m) / (n - m);
    let b = (k * n - 1.0) / (n - m);
    let num = gamma_fn(a)? * gamma_fn(b)?;
    let den = ts * big_m.powf(k) * gamma_fn(k)? * (n - m);
    Ok(num / den * (big_m / big_n).powf(a) * (min_edges as f64 / min_lambda2))
}

/// Gain that makes the fixed-time bound equal `ts`: n^(2−d) / (λ₂ T_s).
pub fn fixed_gain(n: usize, d: f64, lambda2: f64, ts: f64) -> f64 {
    (n as f64).powf(2.0 - d) / (lambda2 * ts)
}

/// Settling bound 1 / (B λ₂ (1/n)^(2−d)).
pub fn fixedtime_bound(b_min: f64, lambda2: f64, n: usize, d: f64) -> f64 {
    1.0 / (b_min * lambda2 * (1.0 / n as f64).powf(2.0 - d))
}

/// Lower bound on ε: max_i r_i / (v_i² − v_T²) · Ξ_max.
pub fn eps_bound(r_over_dv: f64, xi_max: f64) -> f64 {
    r_over_dv * xi_max
}

/// Lower bound on μ: max_i r_i/(v_i² − v_T²) · Ξ_max / (min P · √λ̲₂).
pub fn mu_bound(r_over_dv: f64, xi_max: f64, p_min: f64, min_lambda2: f64) -> f64 {
    r_over_dv * xi_max / (p_min * min_lambda2.sqrt())
}

pub fn saturate(a: f64, a_max: f64) -> f64 {
    a.clamp(-a_max, a_max)
}

/// Exponential consensus input B ζ⁻¹Ω(|ζ|) + ε sign(ζ).
pub fn consensus_exponential(zeta: f64, b: f64, c: f64, eps: f64, bl: Option<f64>) -> f64 {
    b * omega_composite(zeta, c) + eps * soft_sign(zeta, bl)
}

/// Polynomial consensus input
/// P Σ_j [(M|e|^m + N|e|^n)^k + μ] sign(e), e = t_go_j − t_go_i.
pub fn consensus_polynomial(
    tgos: &[f64],
    g: &Topology,
    i: usize,
    p: f64,
    coefs: &PolyCoefs,
    mu: f64,
    bl: Option<f64>,
) -> f64 {
    let errs = g.nbrs(i).iter().map(|&j| tgos[j] - tgos[i]);
    consensus_polynomial_terms(errs, p, coefs, mu, bl)
}

/// Same as [`consensus_polynomial`] over an explicit list of edge errors.
pub fn consensus_polynomial_terms(
    errs: impl Iterator<Item = f64>,
    p: f64,
    coefs: &PolyCoefs,
    mu: f64,
    bl: Option<f64>,
) -> f64 {
    errs.map(|e| {
        if e == 0.0 {
            0.0
        } else {
            (coefs.eval(e.abs()) + mu) * soft_sign(e, bl)
        }
    })
    .sum::<f64>()
        * p
}

/// Deviated-pursuit shaping: ξ̇ = u when `a_t_hat` equals the true maneuver.
pub fn deviated_pursuit_shaping(
    ik: &InterceptorKinematics,
    rates: &RelativeRates,
    tgt: &TargetModel,
    u: f64,
    a_t_hat: f64,
) -> f64 {
    let v = ik.v;
    let td = rates.theta_dot;
    let nominal = v * td;
    if td.abs() < THETA_DOT_FLOOR {
        return nominal;
    }
    let delta = ik.delta();
    let cd = delta.cos();
    let dv = v * v - tgt.v_t * tgt.v_t;
    nominal
        - v * dv * cd * cd / (ik.r * ik.r * td) * u
        - v * (delta + tgt.gamma_t - ik.theta).sin() * cd / (ik.r * td) * a_t_hat
}

/// Stationary shaping: ξ̇ = u under the stationary time-to-go.
/// |sin 2δ| is floored with its sign kept (zero maps to the positive floor).
pub fn stationary_shaping(r: f64, delta: f64, v: f64, n_nav: f64, u: f64) -> f64 {
    let k = 4.0 * n_nav - 2.0;
    let mut s2 = (2.0 * delta).sin();
    if s2.abs() < SIN2DELTA_FLOOR {
        s2 = if s2 < 0.0 {
            -SIN2DELTA_FLOOR
        } else {
            SIN2DELTA_FLOOR
        };
    }
    let sd = delta.sin();
    v * v * k / (r * s2) * (u - 1.0 + delta.cos() * (1.0 - sd * sd / k))
}

/// Prefactor `v³cos²δ/(r²θ̇)` used by [`StationaryForm::Literal`], with
/// `θ̇ = −v sinδ / r`. Zero when θ̇ vanishes.
pub fn literal_stationary_factor(r: f64, delta: f64, v: f64) -> f64 {
    let td = -v * delta.sin() / r;
    if td.abs() < THETA_DOT_FLOOR {
        return 0.0;
    }
    -v * v * v * delta.cos().powi(2) / (r * r * td)
}

pub fn cmd_fixed_maneuvering(
    ik: &InterceptorKinematics,
    rates: &RelativeRates,
    tgt: &TargetModel,
    zeta: f64,
    a_t_hat: f64,
    b: f64,
    c: f64,
    eps: f64,
) -> f64 {
    let u = consensus_exponential(zeta, b, c, eps, None);
    deviated_pursuit_shaping(ik, rates, tgt, u, a_t_hat)
}

pub fn cmd_fixed_constant(
    ik: &InterceptorKinematics,
    rates: &RelativeRates,
    tgt: &TargetModel,
    zeta: f64,
    b: f64,
    c: f64,
) -> f64 {
    let u = consensus_exponential(zeta, b, c, 0.0, None);
    deviated_pursuit_shaping(ik, rates, tgt, u, 0.0)
}

pub fn cmd_fixed_stationary(
    ik: &InterceptorKinematics,
    zeta: f64,
    b: f64,
    c: f64,
    n_nav: f64,
) -> f64 {
    let u = consensus_exponential(zeta, b, c, 0.0, None);
    stationary_shaping(ik.r, ik.delta(), ik.v, n_nav, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipPoint {
    pub x: f64,
    pub y: f64,
}

/// Target position advanced along its heading by v_T · t_go.
pub fn pip_coords(tgt: &TargetModel, tgo: f64) -> PipPoint {
    PipPoint {
        x: tgt.x + tgt.v_t * tgo * tgt.gamma_t.cos(),
        y: tgt.y + tgt.v_t * tgo * tgt.gamma_t.sin(),
    }
}

/// Geometry of an interceptor relative to its own predicted point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualGeometry {
    pub pip: PipPoint,
    pub r: f64,
    pub theta: f64,
    pub delta: f64,
    pub tgo: f64,
}

/// Solves t_go = t_go_stationary(PIP(t_go)) by fixed-point iteration.
pub fn pip_geometry(
    pos: (f64, f64),
    gamma: f64,
    v: f64,
    tgt: &TargetModel,
    n_nav: f64,
) -> Result<VirtualGeometry, GuidanceError> {
    let dx = tgt.x - pos.0;
    let dy = tgt.y - pos.1;
    let mut tgo = dx.hypot(dy) / v;
    let mut geo = None;
    for _ in 0..200 {
        let pip = pip_coords(tgt, tgo);
        let (ex, ey) = (pip.x - pos.0, pip.y - pos.1);
        let r = ex.hypot(ey);
        let theta = ey.atan2(ex);
        let delta = look_angle(gamma, theta);
        let next = tgo_stationary(r, delta, v, n_nav)?;
        let done = (next - tgo).abs() <= 1e-12 * next.max(1.0);
        tgo = next;
        geo = Some(VirtualGeometry {
            pip,
            r,
            theta,
            delta,
            tgo,
        });
        if done {
            break;
        }
    }
    geo.ok_or_else(|| GuidanceError::Invalid("PIP iteration did not run".into()))
}

/// Range reached on the consensus manifold of the stationary law when the
/// look angle has decayed from `delta0` (at range `r0`) to `delta`.
pub fn range_on_consensus(
    delta: f64,
    delta0: f64,
    r0: f64,
    n_nav: f64,
) -> Result<f64, GuidanceError> {
    if !(n_nav >= 3.0) {
        return Err(EstimationError::InvalidGain(n_nav).into());
    }
    if delta.abs() > delta0.abs() || delta0.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(GuidanceError::Invalid(
            "need |delta| <= |delta0| < pi/2".into(),
        ));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    if delta == delta0 {
        return Ok(r0);
    }
    // d(ln r) = 2x² dx / ((1 − x)(x² + x − K)), x = cos δ
    let k = 4.0 * n_nav - 2.0;
    let root = (1.0 + 4.0 * k).sqrt();
    let p = (-1.0 + root) / 2.0;
    let q = (-1.0 - root) / 2.0;
    let ca = 2.0 / (2.0 - k);
    let cp = 2.0 * p * p / ((p - 1.0) * (p - q));
    let cq = 2.0 * q * q / ((q - 1.0) * (q - p));
    // 1 − cos δ written as 2 sin²(δ/2) to keep precision near δ = 0
    let prim = |d: f64| {
        let x = d.cos();
        let one_minus = 2.0 * (d / 2.0).sin().powi(2);
        ca * one_minus.ln() + cp * (x - p).abs().ln() + cq * (x - q).abs().ln()
    };
    Ok(r0 * (prim(delta0) - prim(delta)).exp())
}
