//! Command-line front end for the salvo simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use salvo::guidance::Law;
use salvo::output::{emit, OutputError};
use salvo::scenario::{load_scenario, ConfigError, Overrides, PRESETS};
use salvo::simulator::{run, SimError};

#[derive(Parser)]
#[command(
    name = "salvo",
    version,
    about = "Cooperative salvo guidance simulator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a scenario and write timeseries.csv and events.json.
    Run {
        /// Preset name or path to a TOML file.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_law)]
        law: Option<Law>,
        #[arg(long)]
        ts: Option<f64>,
        /// Overwrite existing output files.
        #[arg(long)]
        force: bool,
    },
    /// Check a scenario and report derived gains.
    Validate {
        #[arg(long)]
        scenario: String,
    },
    /// List the bundled scenarios.
    Presets,
    /// Print graph connectivity and the gains derived from it.
    Spectral {
        #[arg(long)]
        scenario: String,
    },
}

fn parse_law(s: &str) -> Result<Law, String> {
    Law::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Law::ALL.iter().map(|l| l.name()).collect();
        format!("unknown law '{s}', expected one of: {}", names.join(", "))
    })
}

enum Failure {
    Validation(String),
    Divergence(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> (u8, &'static str) {
        match self {
            Failure::Validation(_) => (2, "validation"),
            Failure::Divergence(_) => (3, "divergence"),
            Failure::Io(_) => (4, "io"),
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Divergence(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Invalid(_) => Failure::Validation(e.to_string()),
            SimError::Divergence { .. } => Failure::Divergence(e.to_string()),
        }
    }
}

impl From<OutputError> for Failure {
    fn from(e: OutputError) -> Self {
        Failure::Io(e.to_string())
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("none".into(), |v| format!("{v:.4}"))
}

fn execute(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Run {
            scenario,
            out,
            dt,
            seed,
            law,
            ts,
            force,
        } => {
            let o = Overrides { dt, seed, law, ts };
            let (sc, gains, file) = load_scenario(&scenario, &o)?;
            for w in &gains.warnings {
                eprintln!("warning: {w}");
            }
            let log = run(&sc)?;
            let (csv, json) = emit(&log, &out, &sc.name, &gains, &file, force)?;
            let ev = &log.events;
            println!("scenario       {}", sc.name);
            println!("consensus_time {}", fmt_opt(ev.consensus_time));
            println!("T_f            {}", fmt_opt(ev.t_f));
            println!("capture_spread {}", fmt_opt(ev.capture_spread));
            for (i, c) in ev.capture_times.iter().enumerate() {
                println!("I{}             {}", i + 1, fmt_opt(*c));
            }
            for m in &ev.misses {
                println!(
                    "miss I{} at t = {:.3} s, {:.3} m",
                    m.agent + 1,
                    m.t,
                    m.distance
                );
            }
            println!("wrote {} and {}", csv.display(), json.display());
            Ok(())
        }
        Cmd::Validate { scenario } => {
            let (sc, gains, _) = load_scenario(&scenario, &Overrides::default())?;
            for w in &gains.warnings {
                println!("warning: {w}");
            }
            println!(
                "ok: {} ({} interceptors, law {})",
                sc.name,
                sc.n(),
                sc.guidance.law
            );
            Ok(())
        }
        Cmd::Presets => {
            for (name, text) in PRESETS {
                let desc = salvo::scenario::ScenarioFile::parse(text)
                    .map(|f| f.description)
                    .unwrap_or_default();
                println!("{name:32} {desc}");
            }
            Ok(())
        }
        Cmd::Spectral { scenario } => {
            let (sc, g, _) = load_scenario(&scenario, &Overrides::default())?;
            println!("law            {}", sc.guidance.law);
            println!("lambda2        {:.4}", g.lambda2);
            println!("min_edges      {}", g.min_edges);
            println!("min_lambda2    {:.4}", g.min_lambda2);
            if !g.b.is_empty() {
                println!("B              {:.6}", g.b[0]);
                println!("settling_bound {}", fmt_opt(g.fixedtime_bound));
            }
            if !g.p.is_empty() {
                println!("P              {:.6}", g.p[0]);
                println!("P_min          {}", fmt_opt(g.p_min));
            }
            println!("eps            {:.6}", g.eps);
            println!("mu             {:.6}", g.mu);
            for w in &g.warnings {
                println!("warning: {w}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, cat) = f.code();
            eprintln!("error[{cat}]: {}", f.message());
            ExitCode::from(code)
        }
    }
}
