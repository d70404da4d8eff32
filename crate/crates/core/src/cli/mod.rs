//! Command-line front end: batch runs, sweeps, the leakage table and the
//! decoding-table check.
//!
//! Every flag can also be set through an environment variable named
//! `OSBMDI_<FLAG>`, e.g. `OSBMDI_SESSIONS=1000`. Command-line values win.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 at least one
//! session aborted, 3 the decoding table disagrees with the simulator.

mod report;

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::adversary::{AttackSpec, Strategy};
use crate::analysis::{leakage_table, noise_fidelity, LeakageMode, NoiseSpec, NoiseTarget};
use crate::protocol::reference::{diff_table, simulate_table};
use crate::protocol::{parse_label_set, Mode, SessionConfig};
use crate::quantum::{BellLabel, PauliLabel};

pub use report::{render_run, run_report, RunManifest, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ABORTED: i32 = 2;
pub const EXIT_TABLE_MISMATCH: i32 = 3;

/// Parses a real number with an optional `pi` suffix, e.g. `0.125pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, scale) = match t.strip_suffix("pi") {
        Some("") => return Ok(PI),
        Some(n) => (n.trim().trim_end_matches('*'), PI),
        None => (t, 1.0),
    };
    num.parse::<f64>()
        .map(|x| x * scale)
        .map_err(|_| format!("bad number {s:?}"))
}

/// A comma list of values (each may carry a `pi` suffix) or
/// `lin:START:END:COUNT`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    if let Some(rest) = s.strip_prefix("lin:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(format!("grid {s:?} must be lin:START:END:COUNT"));
        };
        let (a, b) = (parse_angle(a)?, parse_angle(b)?);
        let n: usize = n.parse().map_err(|_| format!("bad count {n:?}"))?;
        return Ok(match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n)
                .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
                .collect(),
        });
    }
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_angle)
        .collect()
}

#[derive(Debug, Parser)]
#[command(
    name = "osbmdi",
    version,
    about = "Simulate MDI secure direct communication and dialogue sessions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a batch of sessions and write a report.
    Run(RunArgs),
    /// Tabulate noise fidelity or detection against a parameter grid.
    Sweep(SweepArgs),
    /// Print the information-leakage table for the configured state sets.
    Leakage(LeakageArgs),
    /// Print the decoding table and diff it against the built-in data.
    Table2,
}

#[derive(Debug, Clone, Args)]
pub struct SessionArgs {
    /// TOML file with a `[session]` table.
    #[arg(long, env = "OSBMDI_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, env = "OSBMDI_SEED")]
    pub seed: Option<u64>,
    /// NAME[:key=value,...], e.g. entangle_measure:beta2=0.25
    #[arg(long, env = "OSBMDI_ATTACK")]
    pub attack: Option<String>,
    /// NAME:PARAM, e.g. dephasing:0.25pi
    #[arg(long, env = "OSBMDI_NOISE")]
    pub noise: Option<String>,
    #[arg(long, env = "OSBMDI_MODE")]
    pub mode: Option<Mode>,
    /// Write here instead of stdout.
    #[arg(long, env = "OSBMDI_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub session: SessionArgs,
    #[arg(long, env = "OSBMDI_SESSIONS", default_value_t = 1)]
    pub sessions: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Noise,
    Attack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Channel {
    Dephasing,
    Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Both,
    Travel,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, env = "OSBMDI_KIND")]
    pub kind: SweepKind,
    /// Comma list (values may end in `pi`) or lin:START:END:COUNT.
    #[arg(long, env = "OSBMDI_GRID")]
    pub grid: String,
    #[command(flatten)]
    pub session: SessionArgs,
    #[arg(long, env = "OSBMDI_SESSIONS", default_value_t = 200)]
    pub sessions: u64,
    /// Noise sweeps: the prepared label.
    #[arg(long, env = "OSBMDI_LABEL", default_value = "phi+")]
    pub label: String,
    #[arg(long, env = "OSBMDI_CHANNEL", value_enum, default_value_t = Channel::Dephasing)]
    pub channel: Channel,
    #[arg(long, env = "OSBMDI_TARGET", value_enum, default_value_t = Target::Both)]
    pub target: Target,
}

#[derive(Debug, Args)]
pub struct LeakageArgs {
    #[arg(long, env = "OSBMDI_CONFIG")]
    pub config: Option<PathBuf>,
    /// Comma list of labels, e.g. psi+
    #[arg(long, env = "OSBMDI_ALICE_STATES")]
    pub alice_states: Option<String>,
    #[arg(long, env = "OSBMDI_BOB_STATES")]
    pub bob_states: Option<String>,
    /// Only Alice encodes (2 bits per pair instead of 4).
    #[arg(long)]
    pub direct: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    session: SessionConfig,
}

/// Parses a config document with an optional `[session]` table. The
/// result is not validated.
pub fn parse_config(text: &str) -> Result<SessionConfig, String> {
    toml::from_str::<ConfigFile>(text)
        .map(|f| f.session)
        .map_err(|e| e.to_string())
}

/// Reads the config file (if any) and applies flag overrides.
pub fn resolve_config(args: &SessionArgs) -> Result<SessionConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => SessionConfig::default(),
    };
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(a) = &args.attack {
        cfg.attack = Some(a.parse().map_err(|e| format!("--attack: {e}"))?);
    }
    if let Some(n) = &args.noise {
        cfg.noise = Some(n.parse().map_err(|e| format!("--noise: {e}"))?);
    }
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn out_name(out: &Option<PathBuf>) -> String {
    out.as_ref()
        .map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

fn cmd_run(args: &RunArgs, stdout: &mut dyn Write) -> Result<i32, String> {
    let cfg = resolve_config(&args.session)?;
    let manifest = RunManifest::new(
        &args.session.config,
        &cfg,
        args.sessions,
        out_name(&args.session.out),
    );
    let report = run_report(manifest, &cfg, args.sessions).map_err(|e| e.to_string())?;
    emit(&args.session.out, &render_run(&report)?, stdout)?;
    Ok(if report.summary.aborted > 0 {
        EXIT_ABORTED
    } else {
        EXIT_OK
    })
}

/// Attack with its strength parameter set to `x`.
fn with_strength(base: &AttackSpec, x: f64) -> Result<AttackSpec, String> {
    let strategy = match &base.strategy {
        Strategy::EntangleMeasure { .. } => {
            if !(0.0..=1.0).contains(&x) {
                return Err(format!("beta2={x} outside [0, 1]"));
            }
            Strategy::EntangleMeasure {
                alpha: num_complex::Complex64::new((1.0 - x).sqrt(), 0.0),
                beta: num_complex::Complex64::new(x.sqrt(), 0.0),
            }
        }
        Strategy::Disturb { mode, .. } => Strategy::Disturb {
            mode: *mode,
            fraction: x,
        },
        Strategy::FakeBmo { stages, .. } => Strategy::FakeBmo {
            stages: stages.clone(),
            fraction: x,
        },
        other => return Err(format!("{} has no strength parameter", other.name())),
    };
    AttackSpec::with_legs(strategy, base.legs.clone()).map_err(|e| e.to_string())
}

fn manifest_comment(m: &RunManifest) -> Result<String, String> {
    let body = toml::to_string(&report::ManifestOnly {
        manifest: m.clone(),
    })
    .map_err(|e| e.to_string())?;
    Ok(body.lines().map(|l| format!("# {l}\n")).collect())
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write) -> Result<i32, String> {
    let grid = parse_grid(&args.grid)?;
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    let mut cfg = resolve_config(&args.session)?;
    let mut text = String::new();
    match args.kind {
        SweepKind::Noise => {
            let label: BellLabel = args.label.parse().map_err(|e| format!("--label: {e}"))?;
            let spec = match args.channel {
                Channel::Dephasing => NoiseSpec::CollectiveDephasing(0.0),
                Channel::Rotation => NoiseSpec::CollectiveRotation(0.0),
            };
            let target = match args.target {
                Target::Both => NoiseTarget::BothQubits,
                Target::Travel => NoiseTarget::TravelHalf,
            };
            let m = RunManifest::new(&args.session.config, &cfg, 0, out_name(&args.session.out));
            text.push_str(&manifest_comment(&m)?);
            text.push_str(&format!(
                "# sweep = noise, label = {label}, channel = {:?}, target = {:?}\n",
                args.channel, args.target
            ));
            text.push_str("param,fidelity\n");
            for (x, f) in noise_fidelity(label, spec, target, &grid).map_err(|e| e.to_string())? {
                text.push_str(&format!("{x:.12},{f:.12}\n"));
            }
        }
        SweepKind::Attack => {
            let base = match &cfg.attack {
                Some(a) => a.clone(),
                None => AttackSpec::entangle_measure(0.5).map_err(|e| e.to_string())?,
            };
            let sel = report::selector_for(&base);
            cfg.attack = Some(base.clone());
            let m = RunManifest::new(
                &args.session.config,
                &cfg,
                args.sessions,
                out_name(&args.session.out),
            );
            text.push_str(&manifest_comment(&m)?);
            text.push_str(&format!(
                "# sweep = attack, strategy = {}, checks = {sel:?}\n",
                base.strategy.name()
            ));
            text.push_str("param,checks,failures,rate,half_width\n");
            for &x in &grid {
                cfg.attack = Some(with_strength(&base, x)?);
                let e =
                    report::detection_over(&cfg, args.sessions, sel).map_err(|e| e.to_string())?;
                text.push_str(&format!(
                    "{x:.12},{},{},{:.12},{:.12}\n",
                    e.checks, e.failures, e.rate, e.half_width
                ));
            }
        }
    }
    emit(&args.session.out, &text, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_leakage(args: &LeakageArgs, stdout: &mut dyn Write) -> Result<i32, String> {
    let base = resolve_config(&SessionArgs {
        config: args.config.clone(),
        seed: None,
        attack: None,
        noise: None,
        mode: None,
        out: None,
    })?;
    let alice = match &args.alice_states {
        Some(s) => parse_label_set(s)?,
        None => base.alice_states.clone(),
    };
    let bob = match &args.bob_states {
        Some(s) => parse_label_set(s)?,
        None => base.bob_states.clone(),
    };
    if alice.is_empty() || bob.is_empty() {
        return Err("state sets must be nonempty".into());
    }
    let mode = if args.direct {
        LeakageMode::Direct
    } else {
        LeakageMode::Dialogue
    };
    let join = |v: &[BellLabel]| {
        v.iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut text = format!(
        "# alice_states = {}\n# bob_states = {}\n# mode = {mode:?}\n",
        join(&alice),
        join(&bob)
    );
    text.push_str("bmo1,bmo2,consistent,h_apriori,h_aposteriori,leaked\n");
    let rows = leakage_table(&alice, &bob, mode).map_err(|e| e.to_string())?;
    for (m1, m2, r) in &rows {
        text.push_str(&format!(
            "{m1},{m2},{},{},{:.6},{:.6}\n",
            r.consistent, r.h_apriori, r.h_aposteriori, r.leaked
        ));
    }
    // every announcement pair is equally likely under uniform inputs
    let mean = rows.iter().map(|(_, _, r)| r.leaked).sum::<f64>() / rows.len() as f64;
    text.push_str(&format!("# mean_leaked = {mean:.6}\n"));
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| e.to_string())?;
    Ok(EXIT_OK)
}

fn cmd_table2(stdout: &mut dyn Write) -> Result<i32, String> {
    let sim = simulate_table();
    let mut text = String::from("row,alice_init,bob_init,bmo1,shared");
    for p in PauliLabel::ALL {
        text.push_str(&format!(",{}", p.short_name()));
    }
    text.push('\n');
    for (i, s) in sim.iter().enumerate() {
        let r = &s.row;
        text.push_str(&format!(
            "{},{},{},{},{}",
            i + 1,
            r.alice_init,
            r.bob_init,
            r.bmo1,
            r.shared
        ));
        for l in r.bmo2 {
            text.push_str(&format!(",{l}"));
        }
        text.push('\n');
    }
    let diff = diff_table(&sim);
    text.push_str(&format!("# mismatches = {}\n", diff.len()));
    for d in &diff {
        text.push_str(&format!(
            "# row {} column {}: expected {} got {}\n",
            d.row + 1,
            d.column,
            d.expected,
            d.got
        ));
    }
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| e.to_string())?;
    Ok(if diff.is_empty() {
        EXIT_OK
    } else {
        EXIT_TABLE_MISMATCH
    })
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Leakage(a) => cmd_leakage(a, stdout),
        Command::Table2 => cmd_table2(stdout),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_CONFIG
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::DisturbMode;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("0.125pi").unwrap(), PI / 8.0);
        assert!(parse_angle("abc").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0,0.5pi").unwrap(), vec![0.0, PI / 2.0]);
        assert_eq!(
            parse_grid("lin:0:1:5").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert!(parse_grid("").unwrap().is_empty());
        assert!(parse_grid("lin:0:1").is_err());
    }

    #[test]
    fn strength_rewrites_parameter() {
        let base: AttackSpec = "disturb:mode=reorder,fraction=0.5".parse().unwrap();
        let a = with_strength(&base, 0.25).unwrap();
        assert_eq!(
            a.strategy,
            Strategy::Disturb {
                mode: DisturbMode::Reorder,
                fraction: 0.25
            }
        );
        assert!(with_strength(&"flip_all".parse().unwrap(), 0.5).is_err());
    }
}
