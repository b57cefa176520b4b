#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{LazyLock, OnceLock};
use std::time::{Duration, Instant};

use salvo::engagement::{relative_rates, InterceptorKinematics, TargetModel};
use salvo::estimation::{tgo_deviated, tgo_stationary, xi_rate_diagnostic, TgoLaw};
use salvo::guidance::range_on_consensus;
use salvo::scenario::{load_scenario, GainReport, Overrides, PRESETS};
use salvo::simulator::{run, Scenario, SimLog};

pub struct Run {
    pub name: String,
    pub scenario: Scenario,
    pub gains: GainReport,
    pub log: SimLog,
    pub wall: Duration,
}

impl Run {
    pub fn ts(&self) -> f64 {
        self.scenario.guidance.ts
    }

    pub fn consensus(&self) -> Option<f64> {
        self.log.events.consensus_time
    }

    pub fn capture(&self, i: usize) -> Option<f64> {
        self.log.events.capture_times[i]
    }

    /// Steady part of the post-consensus phase: one second after both the
    /// consensus instant and the settling deadline, until half a second
    /// before the first capture.
    pub fn post_window(&self) -> Option<(f64, f64)> {
        let ct = self.consensus()?;
        let first = self.log.first_capture()?;
        let lo = ct.max(self.ts()) + 1.0;
        let hi = first - 0.5;
        (hi > lo).then_some((lo, hi))
    }
}

pub fn run_with(name: &str, o: &Overrides) -> Run {
    let (scenario, gains, _) = load_scenario(name, o).unwrap_or_else(|e| panic!("{name}: {e}"));
    let start = Instant::now();
    let log = run(&scenario).unwrap_or_else(|e| panic!("{name}: {e}"));
    Run {
        name: name.to_string(),
        scenario,
        gains,
        log,
        wall: start.elapsed(),
    }
}

static CACHE: LazyLock<HashMap<&'static str, OnceLock<Run>>> =
    LazyLock::new(|| PRESETS.iter().map(|(n, _)| (*n, OnceLock::new())).collect());

/// Default-settings run of a bundled preset, simulated once per test binary.
pub fn preset_run(name: &str) -> &'static Run {
    CACHE
        .get(name)
        .unwrap_or_else(|| panic!("no preset {name}"))
        .get_or_init(|| run_with(name, &Overrides::default()))
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// Logged samples of agent `i` strictly inside `[lo, hi]` and before its capture.
fn agent_samples(run: &Run, i: usize, lo: f64, hi: f64) -> Vec<(f64, f64, f64, f64)> {
    let end = run.capture(i).unwrap_or(f64::INFINITY);
    run.log
        .samples
        .iter()
        .filter(|s| s.t >= lo && s.t <= hi && s.t < end)
        .map(|s| {
            let a = &s.agents[i];
            (s.t, a.tgo, a.delta, a.r)
        })
        .collect()
}

/// Worst |d(t_go)/dt + 1| over the post-consensus window, all agents.
pub fn tgo_rate_deviation(run: &Run) -> Option<f64> {
    let (lo, hi) = run.post_window()?;
    let mut worst = 0.0f64;
    for i in 0..run.scenario.n() {
        let pts = agent_samples(run, i, lo, hi);
        for w in pts.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            worst = worst.max((slope + 1.0).abs());
        }
    }
    Some(worst)
}

/// Largest look-angle excursion in degrees from half a second after
/// consensus until each agent's capture.
pub fn look_angle_drift_deg(run: &Run) -> Option<f64> {
    let ct = run.consensus()?;
    let mut worst = 0.0f64;
    for i in 0..run.scenario.n() {
        let pts = agent_samples(run, i, ct + 0.5, f64::INFINITY);
        let (lo, hi) = pts
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.2), hi.max(p.2))
            });
        if hi >= lo {
            worst = worst.max((hi - lo).to_degrees());
        }
    }
    Some(worst)
}

pub struct StationaryCheck {
    /// Count of sample pairs where |δ| failed to decrease.
    pub non_decreasing: usize,
    /// Samples before capture where δ was exactly zero.
    pub zero_before_capture: usize,
    /// Worst relative error between logged range and the consensus-manifold range.
    pub range_rel_err: f64,
}

/// Look-angle monotonicity and range-on-manifold agreement over the
/// post-consensus window.
pub fn stationary_check(run: &Run) -> Option<StationaryCheck> {
    let (lo, hi) = run.post_window()?;
    let mut out = StationaryCheck {
        non_decreasing: 0,
        zero_before_capture: 0,
        range_rel_err: 0.0,
    };
    for i in 0..run.scenario.n() {
        let n_nav = run.scenario.n_nav[i];
        let pts = agent_samples(run, i, lo, hi);
        let (_, _, d0, r0) = *pts.first()?;
        for w in pts.windows(2) {
            if w[1].2.abs() >= w[0].2.abs() {
                out.non_decreasing += 1;
            }
        }
        for &(t, _, d, r) in &pts {
            if d == 0.0 && run.capture(i).is_some_and(|c| t < c) {
                out.zero_before_capture += 1;
            }
            let model = range_on_consensus(d, d0, r0, n_nav).ok()?;
            out.range_rel_err = out.range_rel_err.max((model - r).abs() / r);
        }
    }
    Some(out)
}

/// Sum over agents of the commanded-acceleration magnitude integrated on [0, T_s].
pub fn transient_effort(run: &Run) -> f64 {
    let ts = run.ts();
    let s = &run.log.samples;
    s.windows(2)
        .filter(|w| w[0].t < ts)
        .map(|w| {
            let h = w[1].t.min(ts) - w[0].t;
            h * w[0].agents.iter().map(|a| a.a_cmd.abs()).sum::<f64>()
        })
        .sum()
}

pub fn peak_accel(run: &Run) -> f64 {
    run.log
        .events
        .peak_accel
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Directional finite difference of t_go along the state derivative.
fn xi_rate_fd(ik: &InterceptorKinematics, tgt: &TargetModel, a: f64, a_t: f64, law: TgoLaw) -> f64 {
    let rates = relative_rates(ik, tgt).unwrap();
    let g_t_dot = if tgt.v_t > 0.0 { a_t / tgt.v_t } else { 0.0 };
    let at = |h: f64| {
        let k = InterceptorKinematics {
            r: ik.r + h * rates.r_dot,
            theta: ik.theta + h * rates.theta_dot,
            gamma: ik.gamma + h * a / ik.v,
            v: ik.v,
        };
        let gt = tgt.gamma_t + h * g_t_dot;
        match law {
            TgoLaw::DeviatedPursuit => {
                tgo_deviated(k.r, k.delta(), k.theta, gt, k.v, tgt.v_t).unwrap()
            }
            TgoLaw::Stationary => tgo_stationary(k.r, k.delta(), k.v, 3.0).unwrap(),
        }
    };
    let h = 1e-4;
    1.0 + (at(h) - at(-h)) / (2.0 * h)
}

/// Worst relative gap between analytic ξ̇ and its finite difference over
/// `count` random states, alternating the two time-to-go laws.
pub fn xi_rate_worst_rel_error(seed: u64, count: usize) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for k in 0..count {
        let law = if k % 2 == 0 {
            TgoLaw::DeviatedPursuit
        } else {
            TgoLaw::Stationary
        };
        let theta = rng.random_range(-PI..PI);
        let delta = rng.random_range(-1.4..1.4);
        let ik = InterceptorKinematics {
            r: rng.random_range(1e3..2e4),
            theta,
            gamma: theta + delta,
            v: rng.random_range(250.0..500.0),
        };
        let (tgt, a_t) = match law {
            TgoLaw::DeviatedPursuit => (
                TargetModel::constant_speed(
                    rng.random_range(50.0..240.0),
                    rng.random_range(-PI..PI),
                ),
                rng.random_range(-20.0..20.0),
            ),
            TgoLaw::Stationary => (TargetModel::stationary(0.0, 0.0), 0.0),
        };
        let a = rng.random_range(-200.0..200.0);
        let analytic = xi_rate_diagnostic(&ik, &tgt, a, a_t, law, 3.0).unwrap();
        let fd = xi_rate_fd(&ik, &tgt, a, a_t, law);
        worst = worst.max((analytic - fd).abs() / fd.abs().max(1e-2));
    }
    worst
}
