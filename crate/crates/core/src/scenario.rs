//! Scenario files: parsing, gain derivation and validation.
//!
//! Angles are given in degrees in the file and converted to radians here.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::airframe::AirframeParams;
use crate::engagement::{AccelProfile, InterceptorKinematics, TargetKind, TargetModel};
use crate::estimation::ObserverGains;
use crate::guidance::{
    eps_bound, fixed_gain, fixedtime_bound, mu_bound, predefined_gain, ConsensusKind, Law,
    PolyCoefs, StationaryForm,
};
use crate::network::{Network, SwitchingSchedule, Topology};
use crate::simulator::{GuidanceSettings, Scenario};

pub const G0: f64 = 9.81;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Invalid(String),
    #[error("unknown preset or missing file: {0}")]
    NotFound(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

/// A scalar applied to every interceptor or one value each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerAgent {
    One(f64),
    Each(Vec<f64>),
}

impl PerAgent {
    fn expand(&self, n: usize, what: &str) -> Result<Vec<f64>, ConfigError> {
        match self {
            PerAgent::One(x) => Ok(vec![*x; n]),
            PerAgent::Each(v) if v.len() == n => Ok(v.clone()),
            PerAgent::Each(v) => invalid(format!("{what}: expected {n} values, got {}", v.len())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetFile {
    pub kind: TargetKind,
    #[serde(default)]
    pub v: f64,
    #[serde(default)]
    pub gamma_deg: f64,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default = "zero_profile")]
    pub accel: AccelProfile,
}

fn zero_profile() -> AccelProfile {
    AccelProfile::Zero
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterceptorsFile {
    pub v: PerAgent,
    pub r: PerAgent,
    pub theta_deg: Vec<f64>,
    pub gamma_deg: Vec<f64>,
    #[serde(default)]
    pub n_nav: Option<PerAgent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkFile {
    Fixed {
        edges: Vec<[usize; 2]>,
    },
    Switching {
        graphs: Vec<Vec<[usize; 2]>>,
        min_dwell: f64,
        #[serde(default = "default_mean_extra")]
        mean_extra_dwell: f64,
        /// Explicit (start time, 1-based graph index) pairs; random when absent.
        #[serde(default)]
        signal: Option<Vec<(f64, usize)>>,
    },
}

fn default_mean_extra() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuidanceFile {
    pub law: Law,
    pub ts: f64,
    #[serde(default = "d_c")]
    pub c: f64,
    #[serde(default = "d_d")]
    pub d: f64,
    #[serde(default = "d_nav")]
    pub n_nav: f64,
    #[serde(default = "d_amax")]
    pub a_max_g: f64,
    #[serde(default = "d_ximax")]
    pub xi_max: f64,
    /// Factor applied to the derived lower bounds of ε and μ.
    #[serde(default = "d_margin")]
    pub gain_margin: f64,
    #[serde(default)]
    pub b: Option<PerAgent>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub p: Option<PerAgent>,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default = "d_one")]
    pub m_coef: f64,
    #[serde(default = "d_one")]
    pub n_coef: f64,
    #[serde(default = "d_mexp")]
    pub m_exp: f64,
    #[serde(default = "d_nexp")]
    pub n_exp: f64,
    #[serde(default = "d_kexp")]
    pub k_exp: f64,
    #[serde(default)]
    pub boundary_layer: Option<f64>,
    #[serde(default)]
    pub terminal_tgo: f64,
    #[serde(default)]
    pub stationary_form: StationaryForm,
}

fn d_c() -> f64 {
    0.0125
}
fn d_d() -> f64 {
    4.0
}
fn d_nav() -> f64 {
    3.0
}
fn d_amax() -> f64 {
    20.0
}
fn d_ximax() -> f64 {
    0.5
}
fn d_margin() -> f64 {
    1.05
}
fn d_one() -> f64 {
    1.0
}
fn d_mexp() -> f64 {
    0.1
}
fn d_nexp() -> f64 {
    2.0
}
fn d_kexp() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AirframeFile {
    #[serde(default)]
    pub enabled: bool,
    #[serde(flatten)]
    pub params: AirframeParamsFile,
}

/// Airframe parameters with the deflection limit in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AirframeParamsFile {
    pub mass: f64,
    pub inertia: f64,
    pub tau_c: f64,
    pub tau_t: f64,
    pub lift_coeffs: [f64; 3],
    pub moment_coeffs: [f64; 4],
    pub alloc_gain: f64,
    pub canard_share: f64,
    pub deflection_limit_deg: f64,
}

impl Default for AirframeParamsFile {
    fn default() -> Self {
        let p = AirframeParams::default();
        AirframeParamsFile {
            mass: p.mass,
            inertia: p.inertia,
            tau_c: p.tau_c,
            tau_t: p.tau_t,
            lift_coeffs: p.lift_coeffs,
            moment_coeffs: p.moment_coeffs,
            alloc_gain: p.alloc_gain,
            canard_share: p.canard_share,
            deflection_limit_deg: p.deflection_limit.to_degrees(),
        }
    }
}

impl AirframeParamsFile {
    fn to_params(&self) -> AirframeParams {
        AirframeParams {
            mass: self.mass,
            inertia: self.inertia,
            tau_c: self.tau_c,
            tau_t: self.tau_t,
            lift_coeffs: self.lift_coeffs,
            moment_coeffs: self.moment_coeffs,
            alloc_gain: self.alloc_gain,
            canard_share: self.canard_share,
            deflection_limit: self.deflection_limit_deg.to_radians(),
        }
    }
}

/// On-disk scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default = "d_tmax")]
    pub t_max: f64,
    #[serde(default = "d_one")]
    pub capture_radius: f64,
    #[serde(default = "d_miss")]
    pub miss_window: f64,
    #[serde(default = "d_tol")]
    pub spread_tol: f64,
    #[serde(default = "d_dec")]
    pub decimation: usize,
    #[serde(default)]
    pub seed: u64,
    pub target: TargetFile,
    pub interceptors: InterceptorsFile,
    pub network: NetworkFile,
    pub guidance: GuidanceFile,
    #[serde(default)]
    pub observer: ObserverGains,
    #[serde(default)]
    pub airframe: Option<AirframeFile>,
}

fn d_dt() -> f64 {
    1e-3
}
fn d_tmax() -> f64 {
    100.0
}
fn d_miss() -> f64 {
    20.0
}
fn d_tol() -> f64 {
    0.1
}
fn d_dec() -> usize {
    10
}

/// Derived gains and the bounds they were checked against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainReport {
    pub lambda2: f64,
    pub min_lambda2: f64,
    pub min_edges: usize,
    pub b: Vec<f64>,
    pub fixedtime_bound: Option<f64>,
    pub p: Vec<f64>,
    pub p_min: Option<f64>,
    pub eps: f64,
    pub eps_min: Option<f64>,
    pub mu: f64,
    pub mu_min: Option<f64>,
    pub warnings: Vec<String>,
}

/// Command-line overrides applied before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub law: Option<Law>,
    pub ts: Option<f64>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(dt) = o.dt {
            self.dt = dt;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(l) = o.law {
            self.guidance.law = l;
        }
        if let Some(ts) = o.ts {
            self.guidance.ts = ts;
        }
    }

    /// Validates every field and derives the gains the file leaves out.
    pub fn resolve(&self) -> Result<(Scenario, GainReport), ConfigError> {
        let gf = &self.guidance;
        let n = self.interceptors.theta_deg.len();
        if n < 2 {
            return invalid("need at least two interceptors");
        }
        if self.interceptors.gamma_deg.len() != n {
            return invalid(format!(
                "gamma_deg has {} entries, theta_deg has {n}",
                self.interceptors.gamma_deg.len()
            ));
        }
        let v = self.interceptors.v.expand(n, "interceptors.v")?;
        let r = self.interceptors.r.expand(n, "interceptors.r")?;
        let n_nav = match &self.interceptors.n_nav {
            Some(p) => p.expand(n, "interceptors.n_nav")?,
            None => vec![gf.n_nav; n],
        };
        if let Some(x) = n_nav.iter().find(|&&x| !(x >= 3.0)) {
            return invalid(format!("navigation gain N >= 3 violated (N = {x})"));
        }
        let interceptors: Vec<InterceptorKinematics> = (0..n)
            .map(|i| InterceptorKinematics {
                r: r[i],
                theta: self.interceptors.theta_deg[i].to_radians(),
                gamma: self.interceptors.gamma_deg[i].to_radians(),
                v: v[i],
            })
            .collect();

        let tf = &self.target;
        let target = TargetModel {
            kind: tf.kind,
            v_t: tf.v,
            gamma_t: tf.gamma_deg.to_radians(),
            accel: tf.accel,
            x: tf.x,
            y: tf.y,
        };
        if !target.is_consistent() {
            return invalid(format!(
                "target kind {:?} is inconsistent with speed {} and its acceleration profile",
                tf.kind, tf.v
            ));
        }
        let law = gf.law;
        if law.uses_observer() && target.kind != TargetKind::Maneuvering {
            // harmless: the observer simply estimates zero
        }
        if law.is_pip() && target.kind == TargetKind::Maneuvering {
            return invalid("pip_baseline needs a non-maneuvering target");
        }
        if !(gf.c > 0.0 && gf.c <= 1.0) {
            return invalid(format!("c in (0,1] violated (c = {})", gf.c));
        }
        if !(gf.d >= 1.0) {
            return invalid(format!("d >= 1 violated (d = {})", gf.d));
        }
        if !(gf.ts > 0.0) {
            return invalid(format!("T_s > 0 violated (ts = {})", gf.ts));
        }
        if !(gf.a_max_g > 0.0) {
            return invalid("a_max_g must be positive");
        }
        if !(gf.xi_max >= 0.0) {
            return invalid("xi_max must be non-negative");
        }
        if !(gf.gain_margin >= 1.0) {
            return invalid("gain_margin must be at least 1");
        }
        if !(gf.terminal_tgo >= 0.0) {
            return invalid("terminal_tgo must be non-negative");
        }
        if let Some(bl) = gf.boundary_layer {
            if !(bl > 0.0) {
                return invalid("boundary_layer must be positive when given");
            }
        }
        let poly = PolyCoefs {
            m_coef: gf.m_coef,
            n_coef: gf.n_coef,
            m_exp: gf.m_exp,
            n_exp: gf.n_exp,
            k_exp: gf.k_exp,
        };

        let network = self.build_network(n)?;
        if law.requires_fixed_graph() && matches!(network, Network::Switching(_)) {
            return invalid(format!("law {law} requires a fixed network"));
        }
        let summary = network
            .summary()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let mut warnings = Vec::new();
        // worst-case r/(v² − v_T²) at launch
        let r_over_dv = interceptors
            .iter()
            .map(|k| k.r / (k.v * k.v - target.v_t * target.v_t))
            .fold(0.0, f64::max);

        let mut b = Vec::new();
        let mut ft_bound = None;
        let mut p = Vec::new();
        let mut p_min = None;
        let mut eps = 0.0;
        let mut eps_min = None;
        let mut mu = 0.0;
        let mut mu_min = None;
        match law.consensus() {
            ConsensusKind::Exponential => {
                let l2 = if law.requires_fixed_graph() {
                    summary.lambda2
                } else {
                    summary.min_lambda2_family
                };
                let b_auto = fixed_gain(n, gf.d, l2, gf.ts);
                b = match &gf.b {
                    Some(x) => x.expand(n, "guidance.b")?,
                    None => vec![b_auto; n],
                };
                if let Some(x) = b.iter().find(|&&x| !(x > 0.0)) {
                    return invalid(format!("B_i > 0 violated (B = {x})"));
                }
                let b_min = b.iter().copied().fold(f64::INFINITY, f64::min);
                let bound = fixedtime_bound(b_min, l2, n, gf.d);
                if bound > gf.ts * (1.0 + 1e-9) {
                    warnings.push(format!(
                        "B = {b_min} gives a settling bound of {bound:.4} s above T_s = {}",
                        gf.ts
                    ));
                }
                ft_bound = Some(bound);
                if law.uses_observer() {
                    let lo = eps_bound(r_over_dv, gf.xi_max);
                    eps_min = Some(lo);
                    eps = gf.eps.unwrap_or(gf.gain_margin * lo);
                    if eps <= lo && lo > 0.0 {
                        warnings.push(format!("eps = {eps} does not exceed its bound {lo}"));
                    }
                }
            }
            ConsensusKind::Polynomial => {
                poly.check()
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                let pm = predefined_gain(
                    gf.ts,
                    &poly,
                    summary.min_edges_family,
                    summary.min_lambda2_family,
                )
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                p_min = Some(pm);
                p = match &gf.p {
                    Some(x) => x.expand(n, "guidance.p")?,
                    None => vec![pm; n],
                };
                if let Some(x) = p.iter().find(|&&x| !(x > 0.0)) {
                    return invalid(format!("P_i > 0 violated (P = {x})"));
                }
                let lowest = p.iter().copied().fold(f64::INFINITY, f64::min);
                if lowest < pm * (1.0 - 1e-12) {
                    warnings.push(format!(
                        "P = {lowest} is below the predefined-time bound {pm}"
                    ));
                }
                if law.uses_observer() {
                    let lo = mu_bound(r_over_dv, gf.xi_max, lowest, summary.min_lambda2_family);
                    mu_min = Some(lo);
                    mu = gf.mu.unwrap_or(gf.gain_margin * lo);
                    if mu <= lo && lo > 0.0 {
                        warnings.push(format!("mu = {mu} does not exceed its bound {lo}"));
                    }
                }
            }
        }

        let airframe = match &self.airframe {
            Some(a) if a.enabled => {
                let p = a.params.to_params();
                p.validate()
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                Some(p)
            }
            _ => None,
        };
        self.observer
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let guidance = GuidanceSettings {
            law,
            ts: gf.ts,
            c: gf.c,
            d: gf.d,
            b: b.clone(),
            eps,
            p: p.clone(),
            mu,
            poly,
            a_max: gf.a_max_g * G0,
            boundary_layer: gf.boundary_layer,
            terminal_tgo: gf.terminal_tgo,
            stationary_form: gf.stationary_form,
        };
        let sc = Scenario {
            name: self.name.clone(),
            interceptors,
            n_nav,
            target,
            network,
            guidance,
            observer: self.observer,
            airframe,
            dt: self.dt,
            t_max: self.t_max,
            capture_radius: self.capture_radius,
            miss_window: self.miss_window,
            spread_tol: self.spread_tol,
            decimation: self.decimation,
            seed: self.seed,
        };
        sc.check()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.spread_tol > 0.0) {
            return invalid("spread_tol must be positive");
        }
        if !(self.miss_window >= 0.0) {
            return invalid("miss_window must be non-negative");
        }
        let report = GainReport {
            lambda2: summary.lambda2,
            min_lambda2: summary.min_lambda2_family,
            min_edges: summary.min_edges_family,
            b,
            fixedtime_bound: ft_bound,
            p,
            p_min,
            eps,
            eps_min,
            mu,
            mu_min,
            warnings,
        };
        Ok((sc, report))
    }

    fn build_network(&self, n: usize) -> Result<Network, ConfigError> {
        let err = |e: crate::network::NetworkError| ConfigError::Invalid(e.to_string());
        match &self.network {
            NetworkFile::Fixed { edges } => {
                let g = Topology::from_one_based(n, edges).map_err(err)?;
                g.algebraic_connectivity().map_err(err)?;
                Ok(Network::Fixed(g))
            }
            NetworkFile::Switching {
                graphs,
                min_dwell,
                mean_extra_dwell,
                signal,
            } => {
                let gs = graphs
                    .iter()
                    .map(|e| Topology::from_one_based(n, e))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?;
                let s = match signal {
                    Some(sig) => {
                        let mut zero = Vec::with_capacity(sig.len());
                        for &(t, k) in sig {
                            if k == 0 {
                                return invalid("switching signal graph indices are 1-based");
                            }
                            zero.push((t, k - 1));
                        }
                        SwitchingSchedule::explicit(gs, zero, *min_dwell).map_err(err)?
                    }
                    None => SwitchingSchedule::random(
                        gs,
                        self.seed,
                        *min_dwell,
                        *mean_extra_dwell,
                        self.t_max,
                    )
                    .map_err(err)?,
                };
                Ok(Network::Switching(s))
            }
        }
    }
}

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        /// Bundled scenarios, name and TOML text.
        pub const PRESETS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../presets/", $name, ".toml")))),*
        ];
    };
}

presets!(
    "table1_maneuvering",
    "table1_constant",
    "table1_stationary",
    "table2_maneuvering",
    "table2_constant",
    "table2_stationary",
    "table2_maneuvering_switching",
    "table2_constant_switching",
    "table2_stationary_switching",
    "fixedtime_switching",
    "pip_comparison",
    "airframe_stationary",
);

pub fn preset(name: &str) -> Option<ScenarioFile> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ScenarioFile::parse(text).expect("bundled preset parses"))
}

/// Loads a preset by name, or a TOML file by path.
pub fn load_scenario_file(spec: &str) -> Result<ScenarioFile, ConfigError> {
    if let Some(p) = preset(spec) {
        return Ok(p);
    }
    let path = std::path::Path::new(spec);
    if !path.exists() {
        return Err(ConfigError::NotFound(spec.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: spec.to_string(),
        source,
    })?;
    ScenarioFile::parse(&text)
}

pub fn load_scenario(
    spec: &str,
    o: &Overrides,
) -> Result<(Scenario, GainReport, ScenarioFile), ConfigError> {
    let mut f = load_scenario_file(spec)?;
    f.apply(o);
    let (sc, rep) = f.resolve()?;
    Ok((sc, rep, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves() {
        assert!(PRESETS.len() >= 7);
        for (name, _) in PRESETS {
            let f = preset(name).unwrap();
            assert_eq!(&f.name, name);
            let (_, rep) = f.resolve().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(rep.warnings.is_empty(), "{name}: {:?}", rep.warnings);
        }
    }

    #[test]
    fn table1_maneuvering_matches_table() {
        let (sc, rep) = preset("table1_maneuvering").unwrap().resolve().unwrap();
        assert_eq!(sc.n(), 5);
        assert_eq!(sc.target.v_t, 200.0);
        assert!((sc.target.gamma_t - 120f64.to_radians()).abs() < 1e-15);
        assert!((sc.guidance.a_max - 196.2).abs() < 1e-12);
        assert_eq!(sc.guidance.c, 0.0125);
        assert_eq!(sc.guidance.d, 4.0);
        assert!((rep.lambda2 - 1.3820).abs() < 1e-4);
        let th: Vec<f64> = sc
            .interceptors
            .iter()
            .map(|k| k.theta.to_degrees())
            .collect();
        for (a, b) in th.iter().zip([35.0, 25.0, 20.0, 30.0, 10.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn with(edit: impl FnOnce(&mut ScenarioFile)) -> Result<(Scenario, GainReport), ConfigError> {
        let mut f = preset("table1_maneuvering").unwrap();
        edit(&mut f);
        f.resolve()
    }

    #[test]
    fn c_out_of_range_rejected() {
        let e = with(|f| f.guidance.c = 1.5).unwrap_err();
        assert!(e.to_string().contains("c in (0,1]"), "{e}");
    }

    #[test]
    fn km_constraint_rejected() {
        let mut f = preset("table2_constant").unwrap();
        f.guidance.k_exp = 2.0;
        f.guidance.m_exp = 0.6;
        let e = f.resolve().unwrap_err();
        assert!(e.to_string().contains("k*m_exp < 1"), "{e}");
    }

    #[test]
    fn explicit_low_gain_warns() {
        let (_, rep) = with(|f| f.guidance.eps = Some(1e-6)).unwrap();
        assert_eq!(rep.warnings.len(), 1);
    }

    #[test]
    fn fixed_law_on_switching_network_rejected() {
        let mut f = preset("table2_stationary_switching").unwrap();
        f.guidance.law = Law::FixedStationary;
        assert!(f.resolve().is_err());
    }

    #[test]
    fn disconnected_network_rejected() {
        let e = with(|f| {
            f.network = NetworkFile::Fixed {
                edges: vec![[1, 2], [3, 4], [4, 5]],
            }
        })
        .unwrap_err();
        assert!(e.to_string().contains("disconnected"), "{e}");
    }

    #[test]
    fn mismatched_lists_rejected() {
        assert!(with(|f| f.interceptors.gamma_deg.pop().map(|_| ()).unwrap()).is_err());
        assert!(with(|f| f.interceptors.v = PerAgent::Each(vec![400.0; 3])).is_err());
    }

    #[test]
    fn overrides_apply() {
        let o = Overrides {
            dt: Some(5e-4),
            seed: Some(9),
            law: Some(Law::FixedConstant),
            ts: Some(3.0),
        };
        let mut f = preset("table1_constant").unwrap();
        f.apply(&o);
        let (sc, _) = f.resolve().unwrap();
        assert_eq!(sc.dt, 5e-4);
        assert_eq!(sc.seed, 9);
        assert_eq!(sc.guidance.ts, 3.0);
    }

    #[test]
    fn parse_errors_carry_location() {
        let e = ScenarioFile::parse("name = \"x\"\ndt = = 3\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn toml_round_trip() {
        for (name, _) in PRESETS {
            let f = preset(name).unwrap();
            let again = ScenarioFile::parse(&f.to_toml()).unwrap();
            assert_eq!(f, again);
        }
    }
}
