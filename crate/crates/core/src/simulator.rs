//! Fixed-step closed-loop simulation of the swarm.

use serde::Serialize;
use thiserror::Error;

use crate::airframe::{airframe_step, AirframeParams, AirframeState};
use crate::engagement::{relative_rates, InterceptorKinematics, RelativeRates, TargetModel};
use crate::estimation::{observer_step, tgo_for, ObserverGains, ObserverState};
use crate::guidance::{
    consensus_exponential, consensus_polynomial_terms, deviated_pursuit_shaping,
    literal_stationary_factor, pip_geometry, saturate, stationary_shaping, ConsensusKind, Law,
    PolyCoefs, Shaping, StationaryForm,
};
use crate::network::Network;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("run diverged at t = {t:.6} s: {reason}\nlast good state: {dump}")]
    Divergence {
        t: f64,
        reason: String,
        dump: String,
    },
}

/// Resolved guidance parameters, one gain per interceptor where the law has one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuidanceSettings {
    pub law: Law,
    pub ts: f64,
    pub c: f64,
    pub d: f64,
    pub b: Vec<f64>,
    pub eps: f64,
    pub p: Vec<f64>,
    pub mu: f64,
    pub poly: PolyCoefs,
    pub a_max: f64,
    pub boundary_layer: Option<f64>,
    /// Below this time-to-go the consensus input is latched to zero.
    pub terminal_tgo: f64,
    pub stationary_form: StationaryForm,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub interceptors: Vec<InterceptorKinematics>,
    pub n_nav: Vec<f64>,
    pub target: TargetModel,
    pub network: Network,
    pub guidance: GuidanceSettings,
    pub observer: ObserverGains,
    pub airframe: Option<AirframeParams>,
    pub dt: f64,
    pub t_max: f64,
    pub capture_radius: f64,
    /// A run ends for an interceptor whose range starts growing inside this radius.
    pub miss_window: f64,
    pub spread_tol: f64,
    pub decimation: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn n(&self) -> usize {
        self.interceptors.len()
    }

    pub fn check(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Invalid(m));
        if !(self.dt > 0.0) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_max > 0.0) {
            return bad(format!("t_max = {} must be positive", self.t_max));
        }
        if !(self.capture_radius > 0.0) {
            return bad(format!(
                "capture_radius = {} must be positive",
                self.capture_radius
            ));
        }
        if self.n() < 2 {
            return bad("need at least two interceptors".into());
        }
        if self.network.n() != self.n() {
            return bad(format!(
                "network has {} vertices but there are {} interceptors",
                self.network.n(),
                self.n()
            ));
        }
        if self.decimation == 0 {
            return bad("decimation must be at least 1".into());
        }
        for (i, ik) in self.interceptors.iter().enumerate() {
            if !(ik.v > self.target.v_t) {
                return bad(format!(
                    "interceptor {}: speed {} must exceed target speed {}",
                    i + 1,
                    ik.v,
                    self.target.v_t
                ));
            }
            if !(ik.r > self.capture_radius) {
                return bad(format!(
                    "interceptor {} starts inside the capture radius",
                    i + 1
                ));
            }
            if ik.delta().abs() >= std::f64::consts::FRAC_PI_2 {
                return bad(format!(
                    "interceptor {}: |look angle| {:.2} deg must be below 90 deg",
                    i + 1,
                    ik.delta().abs().to_degrees()
                ));
            }
        }
        Ok(())
    }
}

/// One logged row for one interceptor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentSample {
    pub r: f64,
    pub theta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub tgo: f64,
    pub a_cmd: f64,
    pub a_real: f64,
    pub a_t_hat: f64,
    pub x: f64,
    pub y: f64,
    pub fin_c: f64,
    pub fin_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub topo: usize,
    pub spread: f64,
    pub a_t: f64,
    pub agents: Vec<AgentSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Miss {
    pub agent: usize,
    pub t: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Events {
    pub consensus_time: Option<f64>,
    pub capture_times: Vec<Option<f64>>,
    pub misses: Vec<Miss>,
    pub t_f: Option<f64>,
    pub capture_spread: Option<f64>,
    pub peak_accel: Vec<f64>,
    pub min_range: Vec<f64>,
    pub switch_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimLog {
    pub samples: Vec<Sample>,
    /// Time-to-go spread over live interceptors at every step, (t, spread).
    pub spread_trace: Vec<(f64, f64)>,
    pub events: Events,
}

impl SimLog {
    pub fn first_capture(&self) -> Option<f64> {
        self.events
            .capture_times
            .iter()
            .flatten()
            .copied()
            .reduce(f64::min)
    }

    pub fn consensus_time(&self, tol: f64) -> Option<f64> {
        consensus_time(&self.spread_trace, self.first_capture(), tol)
    }

    pub fn all_captured(&self) -> bool {
        self.events.capture_times.iter().all(Option::is_some)
    }
}

/// First instant after which the spread stays at or below `tol` until
/// `until` (exclusive) or the end of the trace.
pub fn consensus_time(trace: &[(f64, f64)], until: Option<f64>, tol: f64) -> Option<f64> {
    let mut candidate = None;
    for &(t, s) in trace {
        if until.is_some_and(|u| t >= u) {
            break;
        }
        if s > tol || !s.is_finite() {
            candidate = None;
        } else if candidate.is_none() {
            candidate = Some(t);
        }
    }
    candidate
}

/// Integrated state of the whole engagement.
#[derive(Debug, Clone)]
struct World {
    ik: Vec<InterceptorKinematics>,
    target: TargetModel,
    observers: Vec<Option<ObserverState>>,
    airframes: Vec<AirframeState>,
    a_real: Vec<f64>,
    captured: Vec<Option<f64>>,
    done: Vec<bool>,
    terminal: Vec<bool>,
}

/// Per-step guidance output.
struct Guidance {
    tgo: Vec<f64>,
    a_cmd: Vec<f64>,
    spread: f64,
}

fn dump(w: &World, t: f64) -> String {
    let rows: Vec<String> =
        w.ik.iter()
            .enumerate()
            .map(|(i, k)| {
                format!(
                    "I{}: r={:.6} theta={:.6} gamma={:.6} a={:.6}",
                    i + 1,
                    k.r,
                    k.theta,
                    k.gamma,
                    w.a_real[i]
                )
            })
            .collect();
    format!(
        "t={t:.6} target=({:.3}, {:.3}) gamma_T={:.6}; {}",
        w.target.x,
        w.target.y,
        w.target.gamma_t,
        rows.join("; ")
    )
}

fn guidance_step(sc: &Scenario, w: &mut World, t: f64) -> Result<Guidance, String> {
    let n = sc.n();
    let g = &sc.guidance;
    let (graph, _) = sc.network.active(t);
    let mut tgo = vec![0.0; n];
    let mut rates: Vec<Option<RelativeRates>> = vec![None; n];
    let mut virt = vec![None; n];
    for i in 0..n {
        let k = &w.ik[i];
        if w.done[i] {
            continue;
        }
        let rr = relative_rates(k, &w.target).map_err(|e| e.to_string())?;
        rates[i] = Some(rr);
        tgo[i] = if g.law.is_pip() {
            let pos = k.position((w.target.x, w.target.y));
            let geo = pip_geometry(pos, k.gamma, k.v, &w.target, sc.n_nav[i])
                .map_err(|e| e.to_string())?;
            virt[i] = Some(geo);
            geo.tgo
        } else {
            tgo_for(g.law.tgo_law(), k, &w.target, sc.n_nav[i])
                .map_err(|e| e.to_string())?
                .value
        };
    }
    let live: Vec<usize> = (0..n).filter(|&i| !w.done[i]).collect();
    let spread = if live.is_empty() {
        0.0
    } else {
        let hi = live
            .iter()
            .map(|&i| tgo[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let lo = live.iter().map(|&i| tgo[i]).fold(f64::INFINITY, f64::min);
        hi - lo
    };
    let mut a_cmd = vec![0.0; n];
    for &i in &live {
        let k = &w.ik[i];
        if tgo[i] < g.terminal_tgo {
            w.terminal[i] = true;
        }
        // edges to finished interceptors are dropped
        let errs = graph
            .nbrs(i)
            .iter()
            .filter(|&&j| !w.done[j])
            .map(|&j| tgo[j] - tgo[i]);
        let u = if w.terminal[i] {
            0.0
        } else {
            match g.law.consensus() {
                ConsensusKind::Exponential => {
                    let eps = if g.law.uses_observer() { g.eps } else { 0.0 };
                    consensus_exponential(errs.sum(), g.b[i], g.c, eps, g.boundary_layer)
                }
                ConsensusKind::Polynomial => {
                    let mu = if g.law.uses_observer() { g.mu } else { 0.0 };
                    consensus_polynomial_terms(errs, g.p[i], &g.poly, mu, g.boundary_layer)
                }
            }
        };
        let a = match g.law.shaping() {
            Shaping::DeviatedPursuit => {
                let a_hat = w.observers[i].map_or(0.0, |o| o.a_t_hat);
                deviated_pursuit_shaping(k, rates[i].as_ref().unwrap(), &w.target, u, a_hat)
            }
            Shaping::Stationary => {
                let (r, delta) = match virt[i] {
                    Some(geo) => (geo.r, geo.delta),
                    None => (k.r, k.delta()),
                };
                let u = if g.law == Law::SwitchPredefinedStationary
                    && g.stationary_form == StationaryForm::Literal
                {
                    u * literal_stationary_factor(r, delta, k.v)
                } else {
                    u
                };
                stationary_shaping(r, delta, k.v, sc.n_nav[i], u)
            }
        };
        if !a.is_finite() {
            return Err(format!("non-finite command for interceptor {}", i + 1));
        }
        a_cmd[i] = saturate(a, g.a_max);
    }
    Ok(Guidance { tgo, a_cmd, spread })
}

type KinState = (Vec<[f64; 3]>, [f64; 3]);

fn kin_deriv(
    ik: &[InterceptorKinematics],
    x: &KinState,
    tgt: &TargetModel,
    a: &[f64],
    frozen: &[bool],
    t: f64,
) -> KinState {
    let (ag, [gt, _, _]) = x;
    let vt = tgt.v_t;
    let a_t = tgt.accel_at(t);
    let mut d = Vec::with_capacity(ag.len());
    for (i, s) in ag.iter().enumerate() {
        if frozen[i] {
            d.push([0.0; 3]);
            continue;
        }
        let [r, th, ga] = *s;
        let v = ik[i].v;
        let delta = ga - th;
        let r_dot = vt * (gt - th).cos() - v * delta.cos();
        let th_dot = (vt * (gt - th).sin() - v * delta.sin()) / r;
        d.push([r_dot, th_dot, a[i] / v]);
    }
    let gt_dot = if vt > 0.0 { a_t / vt } else { 0.0 };
    (d, [gt_dot, vt * gt.cos(), vt * gt.sin()])
}

fn kin_add(x: &KinState, k: &KinState, h: f64) -> KinState {
    let ag =
        x.0.iter()
            .zip(&k.0)
            .map(|(a, b)| [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]])
            .collect();
    let t = [
        x.1[0] + h * k.1[0],
        x.1[1] + h * k.1[1],
        x.1[2] + h * k.1[2],
    ];
    (ag, t)
}

/// One RK4 step of the kinematics with the accelerations held.
fn rk4_kinematics(w: &mut World, a: &[f64], t: f64, dt: f64) {
    let frozen = &w.done;
    let x0: KinState = (
        w.ik.iter().map(|k| [k.r, k.theta, k.gamma]).collect(),
        [w.target.gamma_t, w.target.x, w.target.y],
    );
    let k1 = kin_deriv(&w.ik, &x0, &w.target, a, frozen, t);
    let k2 = kin_deriv(
        &w.ik,
        &kin_add(&x0, &k1, dt / 2.0),
        &w.target,
        a,
        frozen,
        t + dt / 2.0,
    );
    let k3 = kin_deriv(
        &w.ik,
        &kin_add(&x0, &k2, dt / 2.0),
        &w.target,
        a,
        frozen,
        t + dt / 2.0,
    );
    let k4 = kin_deriv(&w.ik, &kin_add(&x0, &k3, dt), &w.target, a, frozen, t + dt);
    for (i, k) in w.ik.iter_mut().enumerate() {
        if frozen[i] {
            continue;
        }
        let upd = |m: usize| {
            x0.0[i][m] + dt / 6.0 * (k1.0[i][m] + 2.0 * k2.0[i][m] + 2.0 * k3.0[i][m] + k4.0[i][m])
        };
        k.r = upd(0);
        k.theta = upd(1);
        k.gamma = upd(2);
    }
    let upd_t = |m: usize| x0.1[m] + dt / 6.0 * (k1.1[m] + 2.0 * k2.1[m] + 2.0 * k3.1[m] + k4.1[m]);
    w.target.gamma_t = upd_t(0);
    w.target.x = upd_t(1);
    w.target.y = upd_t(2);
}

fn sample(w: &World, t: f64, topo: usize, gd: &Guidance, last: Option<&Sample>) -> Sample {
    let agents = (0..w.ik.len())
        .map(|i| {
            if w.done[i] {
                if let Some(prev) = last {
                    return AgentSample {
                        a_cmd: 0.0,
                        a_real: 0.0,
                        ..prev.agents[i]
                    };
                }
            }
            let k = &w.ik[i];
            let (x, y) = k.position((w.target.x, w.target.y));
            AgentSample {
                r: k.r,
                theta: k.theta,
                gamma: k.gamma,
                delta: k.delta(),
                tgo: gd.tgo[i],
                a_cmd: gd.a_cmd[i],
                a_real: w.a_real[i],
                a_t_hat: w.observers[i].map_or(0.0, |o| o.a_t_hat),
                x,
                y,
                fin_c: w.airframes[i].delta_c,
                fin_t: w.airframes[i].delta_t,
            }
        })
        .collect();
    Sample {
        t,
        topo,
        spread: gd.spread,
        a_t: w.target.accel_at(t),
        agents,
    }
}

/// Runs the scenario until every interceptor has captured or missed, or t_max.
pub fn run(sc: &Scenario) -> Result<SimLog, SimError> {
    sc.check()?;
    let n = sc.n();
    let g = &sc.guidance;
    if g.b.len() != n && g.law.consensus() == ConsensusKind::Exponential {
        return Err(SimError::Invalid(
            "one B gain per interceptor required".into(),
        ));
    }
    if g.p.len() != n && g.law.consensus() == ConsensusKind::Polynomial {
        return Err(SimError::Invalid(
            "one P gain per interceptor required".into(),
        ));
    }
    let mut w = World {
        ik: sc.interceptors.clone(),
        target: sc.target,
        observers: vec![None; n],
        airframes: vec![AirframeState::default(); n],
        a_real: vec![0.0; n],
        captured: vec![None; n],
        done: vec![false; n],
        terminal: vec![false; n],
    };
    if g.law.uses_observer() {
        for i in 0..n {
            let rr = relative_rates(&w.ik[i], &w.target)
                .map_err(|e| SimError::Invalid(e.to_string()))?;
            let obs = ObserverState::new(sc.observer, &rr)
                .map_err(|e| SimError::Invalid(e.to_string()))?;
            w.observers[i] = Some(obs);
        }
    }
    let mut samples: Vec<Sample> = Vec::new();
    let mut trace = Vec::new();
    let mut misses = Vec::new();
    let mut peak = vec![0.0f64; n];
    let mut min_range: Vec<f64> = w.ik.iter().map(|k| k.r).collect();
    let mut switch_times = Vec::new();
    let mut last_topo = sc.network.active(0.0).1;
    let steps = (sc.t_max / sc.dt).ceil() as u64;
    let mut step: u64 = 0;
    loop {
        let t = step as f64 * sc.dt;
        let (_, topo) = sc.network.active(t);
        if topo != last_topo {
            switch_times.push(t);
            last_topo = topo;
        }
        let gd = guidance_step(sc, &mut w, t).map_err(|reason| SimError::Divergence {
            t,
            reason,
            dump: dump(&w, t),
        })?;
        // realized acceleration over this step
        let mut a_apply = vec![0.0; n];
        for i in 0..n {
            if w.done[i] {
                continue;
            }
            a_apply[i] = match &sc.airframe {
                None => gd.a_cmd[i],
                Some(p) => p.lift(&w.airframes[i]) / p.mass,
            };
            w.a_real[i] = a_apply[i];
            peak[i] = peak[i].max(gd.a_cmd[i].abs());
        }
        trace.push((t, gd.spread));
        let finished = w.done.iter().all(|&d| d);
        if step.is_multiple_of(sc.decimation as u64) || finished || step >= steps {
            let s = sample(&w, t, topo, &gd, samples.last());
            samples.push(s);
        }
        if finished || step >= steps {
            break;
        }
        // observers see the state at the start of the step
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            if w.done[i] {
                continue;
            }
            if let Some(obs) = &w.observers[i] {
                let k = &w.ik[i];
                let rr = relative_rates(k, &w.target).map_err(|e| SimError::Divergence {
                    t,
                    reason: e.to_string(),
                    dump: dump(&w, t),
                })?;
                let bearing = w.target.gamma_t - k.theta;
                let (next, _) = observer_step(obs, &rr, k.r, k.delta(), a_apply[i], bearing, sc.dt)
                    .map_err(|e| SimError::Divergence {
                        t,
                        reason: e.to_string(),
                        dump: dump(&w, t),
                    })?;
                w.observers[i] = Some(next);
            }
            if let Some(p) = &sc.airframe {
                let (next, _) = airframe_step(&w.airframes[i], gd.a_cmd[i], p, w.ik[i].v, sc.dt)
                    .map_err(|e| SimError::Divergence {
                        t,
                        reason: e.to_string(),
                        dump: dump(&w, t),
                    })?;
                w.airframes[i] = next;
            }
        }
        let r_old: Vec<f64> = w.ik.iter().map(|k| k.r).collect();
        let backup = w.clone();
        rk4_kinematics(&mut w, &a_apply, t, sc.dt);
        step += 1;
        let t_new = step as f64 * sc.dt;
        for i in 0..n {
            if w.done[i] {
                continue;
            }
            let k = &w.ik[i];
            if !(k.r.is_finite() && k.theta.is_finite() && k.gamma.is_finite()) {
                return Err(SimError::Divergence {
                    t: t_new,
                    reason: format!("non-finite state for interceptor {}", i + 1),
                    dump: dump(&backup, t),
                });
            }
            min_range[i] = min_range[i].min(k.r);
            if k.r <= sc.capture_radius {
                let frac = (r_old[i] - sc.capture_radius) / (r_old[i] - k.r);
                w.captured[i] = Some(t + frac * sc.dt);
                w.done[i] = true;
            } else if k.r > r_old[i] && r_old[i] < sc.miss_window {
                misses.push(Miss {
                    agent: i,
                    t,
                    distance: r_old[i],
                });
                w.done[i] = true;
            }
        }
    }
    let captures = w.captured.clone();
    let got: Vec<f64> = captures.iter().flatten().copied().collect();
    let (t_f, capture_spread) = if got.len() == n {
        let mean = got.iter().sum::<f64>() / n as f64;
        let hi = got.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = got.iter().copied().fold(f64::INFINITY, f64::min);
        (Some(mean), Some(hi - lo))
    } else {
        (None, None)
    };
    let first = got.iter().copied().reduce(f64::min);
    let mut log = SimLog {
        samples,
        spread_trace: trace,
        events: Events {
            consensus_time: None,
            capture_times: captures,
            misses,
            t_f,
            capture_spread,
            peak_accel: peak,
            min_range,
            switch_times,
        },
    };
    log.events.consensus_time = consensus_time(&log.spread_trace, first, sc.spread_tol);
    Ok(log)
}
