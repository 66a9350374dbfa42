//! The `starflow` command line: axiom checks, convergence tests, morphism
//! classification and the worked examples. Each run writes deterministic JSON
//! reports, a separate `metadata.json` and CSV trajectory dumps into one
//! output directory.

pub mod examples;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::base::{OpenDomain, Permutation, TimeGroup};
use crate::morphism::{
    assess, finite_aut_morphism, identity, normal_form, riccati_scaling_on, state_scaling, time_reversal, ClassifyOptions,
    Endpoint, EquivalenceLevel, Morphism,
};
use crate::star::{
    check_compactness, check_domain, check_existence, check_uniqueness, AxiomVerdict, CheckOptions, CompactnessOptions,
    SolutionSet, Window,
};
use crate::systems::{load_system, SystemConfig, WindowSpec, INTEGER_RADIUS};
use crate::tolerance::Tolerances;
use crate::topology::{test_convergence_with, ConvergenceOptions, ConvergenceReport};
use crate::trajectory::Trajectory;
use crate::{Error, Result};

pub use examples::{run_examples, ExampleRow, ExamplesReport, ExpectedRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BELOW_LEVEL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "starflow", version, about = "Star-constructions of solution sets: axiom checks and morphism classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Compactness, existence, uniqueness and domain checks for one system.
    Axioms(RunArgs),
    /// Compact-convergence test of a sequence of trajectories, or of the
    /// system's own adversarial sequences.
    Converge(RunArgs),
    /// Classify a morphism between two systems.
    Equiv(RunArgs),
    /// Run the worked examples and compare with the expected verdicts.
    Examples(RunArgs),
}

#[derive(Clone, Debug, Default, Args, Serialize)]
pub struct RunArgs {
    /// System descriptor (JSON); repeat for source and target.
    #[arg(long = "system")]
    pub systems: Vec<PathBuf>,
    /// Window descriptor (JSON).
    #[arg(long)]
    pub window: Option<PathBuf>,
    /// Morphism builder: identity, scale:C, time-reversal, riccati-scaling,
    /// finite-aut:P (e.g. finite-aut:1,2,0) or normal-form.
    #[arg(long)]
    pub builder: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub tol_point: Option<f64>,
    #[arg(long)]
    pub tol_conv: Option<f64>,
    #[arg(long)]
    pub tol_morph: Option<f64>,
    #[arg(long)]
    pub tol_orbit: Option<f64>,
    /// Sample count for the checks.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value = "starflow-out")]
    pub out: PathBuf,
    /// Restrict `examples` to one example (ex1, ex2, ex3, ex4, control).
    #[arg(long)]
    pub only: Option<String>,
    /// Requested level for `equiv`, e.g. conjugate or phase-preserving.
    #[arg(long)]
    pub level: Option<String>,
    /// Trajectory CSV for `converge`; repeat in sequence order.
    #[arg(long = "map")]
    pub maps: Vec<PathBuf>,
    /// Limit trajectory CSV for `converge`.
    #[arg(long)]
    pub limit: Option<PathBuf>,
}

impl RunArgs {
    pub fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            point: self.tol_point.unwrap_or(d.point),
            conv: self.tol_conv.unwrap_or(d.conv),
            morph: self.tol_morph.unwrap_or(d.morph),
            orbit: self.tol_orbit.unwrap_or(d.orbit),
        }
    }

    fn check_options(&self) -> CheckOptions {
        let d = CheckOptions::default();
        CheckOptions {
            n_samples: self.samples.unwrap_or(d.n_samples),
            seed: self.seed,
            tol: self.tolerances(),
            ..d
        }
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    started_unix: u64,
    elapsed_seconds: f64,
    exit_code: i32,
    args: &'a RunArgs,
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

pub fn run(command: &Command) -> Result<i32> {
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let (name, args) = match command {
        Command::Axioms(a) => ("axioms", a),
        Command::Converge(a) => ("converge", a),
        Command::Equiv(a) => ("equiv", a),
        Command::Examples(a) => ("examples", a),
    };
    let code = match command {
        Command::Axioms(a) => cmd_axioms(a)?,
        Command::Converge(a) => cmd_converge(a)?,
        Command::Equiv(a) => cmd_equiv(a)?,
        Command::Examples(a) => cmd_examples(a)?,
    };
    let meta = Metadata {
        command: name,
        version: env!("CARGO_PKG_VERSION"),
        started_unix,
        elapsed_seconds: started.elapsed().as_secs_f64(),
        exit_code: code,
        args,
    };
    write_json(&args.out, "metadata.json", &meta)?;
    Ok(code)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn write_trajectory(dir: &Path, name: &str, t: &Trajectory) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{name}.csv")), &t.csv)?;
    Ok(())
}

fn load_systems(args: &RunArgs, count: usize) -> Result<Vec<SystemConfig>> {
    if args.systems.len() != count {
        return Err(Error::Config(format!("expected {count} --system file(s), got {}", args.systems.len())));
    }
    args.systems.iter().map(|p| load_system(p)).collect()
}

fn window_for(args: &RunArgs, config: &SystemConfig, fallback: Option<Window>) -> Result<Window> {
    match &args.window {
        Some(p) => WindowSpec::load(p)?.to_window(),
        None => config
            .default_window()
            .or(fallback)
            .ok_or_else(|| Error::Config("a --window descriptor is required for this system".into())),
    }
}

/// The domain the domain axiom is checked against: the claimed one, or all
/// of `G`.
fn domain_target(s: &dyn SolutionSet) -> OpenDomain {
    s.claimed_domain().unwrap_or_else(|| match s.group() {
        TimeGroup::Reals => OpenDomain::line(),
        TimeGroup::Integers => OpenDomain::integers(-INTEGER_RADIUS..=INTEGER_RADIUS),
        g => OpenDomain::elements(g.elements().unwrap_or_default()),
    })
}

#[derive(Serialize)]
struct AxiomsReport {
    system: String,
    seed: u64,
    tolerances: Tolerances,
    verdicts: Vec<AxiomVerdict>,
}

pub fn cmd_axioms(args: &RunArgs) -> Result<i32> {
    let config = load_systems(args, 1)?.remove(0);
    let w = window_for(args, &config, None)?;
    let s = config.build()?;
    let opts = args.check_options();
    let copts = CompactnessOptions {
        seed: args.seed,
        tol: opts.tol,
        ..CompactnessOptions::default()
    };
    let verdicts = vec![
        check_compactness(s.as_ref(), &w, &copts)?,
        check_existence(s.as_ref(), &w, &opts),
        check_uniqueness(s.as_ref(), &w, &opts),
        check_domain(s.as_ref(), &domain_target(s.as_ref()), &opts),
    ];
    let witnesses = args.out.join("witnesses");
    for v in &verdicts {
        let axiom = serde_json::to_value(v.axiom)?.as_str().unwrap_or("axiom").to_string();
        println!("{axiom}: {}", v.verdict.label());
        if let Some(wit) = v.verdict.witness() {
            for (i, t) in wit.maps.iter().enumerate() {
                write_trajectory(&witnesses, &format!("{axiom}-map-{i}"), t)?;
            }
            if let Some(t) = &wit.limit {
                write_trajectory(&witnesses, &format!("{axiom}-limit"), t)?;
            }
        }
    }
    let report = AxiomsReport {
        system: s.descriptor(),
        seed: args.seed,
        tolerances: opts.tol,
        verdicts,
    };
    write_json(&args.out, "axioms.json", &report)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SequenceReport {
    name: String,
    length: usize,
    limit_is_member: Option<bool>,
    convergence: ConvergenceReport,
}

#[derive(Serialize)]
struct ConvergeReport {
    source: String,
    seed: u64,
    sequences: Vec<SequenceReport>,
}

fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let csv = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(Trajectory {
        label: path.display().to_string(),
        domain: OpenDomain::line(),
        csv,
    })
}

pub fn cmd_converge(args: &RunArgs) -> Result<i32> {
    let opts = ConvergenceOptions {
        tol: args.tolerances().conv,
        ..ConvergenceOptions::default()
    };
    let report = if !args.maps.is_empty() {
        let limit = args
            .limit
            .as_ref()
            .ok_or_else(|| Error::Config("--map files need a --limit file".into()))?;
        let seq = args
            .maps
            .iter()
            .map(|p| read_trajectory(p)?.to_map())
            .collect::<Result<Vec<_>>>()?;
        let phi = read_trajectory(limit)?.to_map()?;
        let convergence = test_convergence_with(&seq, &phi, &opts);
        ConvergeReport {
            source: "trajectory files".into(),
            seed: args.seed,
            sequences: vec![SequenceReport {
                name: "files".into(),
                length: seq.len(),
                limit_is_member: None,
                convergence,
            }],
        }
    } else {
        let config = load_systems(args, 1)?.remove(0);
        let w = window_for(args, &config, None)?;
        let s = config.build()?;
        let mut sequences = Vec::new();
        for seq in s.adversarial_sequences(&w) {
            let Some(limit) = &seq.limit else { continue };
            sequences.push(SequenceReport {
                name: seq.name.clone(),
                length: seq.maps.len(),
                limit_is_member: Some(s.membership(limit).is_member()),
                convergence: test_convergence_with(&seq.maps, limit, &opts),
            });
        }
        ConvergeReport {
            source: s.descriptor(),
            seed: args.seed,
            sequences,
        }
    };
    for s in &report.sequences {
        println!("{}: {:?}", s.name, s.convergence.verdict);
    }
    write_json(&args.out, "convergence.json", &report)?;
    Ok(EXIT_OK)
}

/// Builds the morphism named by `spec` between the two configured systems.
pub fn build_morphism(spec: &str, source: &SystemConfig, target: &SystemConfig, window: Window, opts: &CheckOptions) -> Result<Morphism> {
    let (name, param) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let src = || -> Result<Endpoint> { Ok(Endpoint::new(source.build()?, window.clone())) };
    match (name, param) {
        ("identity", None) => Ok(identity(source.build()?, window)),
        ("scale", Some(c)) => {
            let c: f64 = c.parse().map_err(|_| Error::Config(format!("bad scale factor in `{spec}`")))?;
            state_scaling(src()?, target.build()?, c)
        }
        ("time-reversal", None) => Ok(time_reversal(src()?, target.build()?)),
        ("riccati-scaling", None) => match (source, target) {
            (SystemConfig::Riccati { a }, SystemConfig::Riccati { a: b }) => riccati_scaling_on(*a, *b, window),
            _ => Err(Error::Config("riccati-scaling needs two riccati systems".into())),
        },
        ("finite-aut", Some(p)) => {
            let SystemConfig::FiniteAut { n } = source else {
                return Err(Error::Config("finite-aut needs a finite-aut source system".into()));
            };
            let images = p
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Config(format!("bad permutation in `{spec}`")))?;
            let h = Permutation::new(images).ok_or_else(|| Error::Config(format!("`{p}` is not a permutation")))?;
            finite_aut_morphism(*n, &h)
        }
        ("normal-form", None) => normal_form(source.build()?, window, opts),
        _ => Err(Error::Config(format!("unknown builder `{spec}`"))),
    }
}

pub fn cmd_equiv(args: &RunArgs) -> Result<i32> {
    let spec = args
        .builder
        .as_deref()
        .ok_or_else(|| Error::Config("equiv needs --builder".into()))?;
    let requested: EquivalenceLevel = args.level.as_deref().unwrap_or("morphism").parse()?;
    let configs = match spec {
        "identity" | "normal-form" => load_systems(args, 1)?,
        _ => load_systems(args, 2)?,
    };
    let (source, target) = (&configs[0], configs.last().unwrap_or(&configs[0]));
    let window = window_for(args, source, Some(Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)])))?;
    let check = args.check_options();
    let m = build_morphism(spec, source, target, window, &check)?;
    let d = ClassifyOptions::default();
    let opts = ClassifyOptions {
        n_samples: args.samples.unwrap_or(d.n_samples),
        seed: args.seed,
        tol: args.tolerances(),
        check: CheckOptions {
            n_samples: d.check.n_samples,
            ..check
        },
        ..d
    };
    let report = assess(&m, &opts);
    println!("{}: {:?}", report.morphism, report.level);
    if let Some(r) = &report.reason {
        println!("  next level denied: {r}");
    }
    if let Some(wit) = &report.witness {
        for (i, t) in wit.maps.iter().enumerate() {
            write_trajectory(&args.out.join("witnesses"), &format!("morphism-map-{i}"), t)?;
        }
    }
    write_json(&args.out, "equivalence.json", &report)?;
    Ok(if report.level >= requested { EXIT_OK } else { EXIT_BELOW_LEVEL })
}

pub fn cmd_examples(args: &RunArgs) -> Result<i32> {
    let report = run_examples(args.seed, args.only.as_deref(), &args.tolerances())?;
    for r in &report.rows {
        let mark = if r.matches { "ok  " } else { "FAIL" };
        println!("{mark} {:<8} {:<30} {:<24} {}", r.example, r.check, r.subject, r.detail);
    }
    write_json(&args.out, "examples.json", &report)?;
    Ok(if report.all_match { EXIT_OK } else { EXIT_BELOW_LEVEL })
}

