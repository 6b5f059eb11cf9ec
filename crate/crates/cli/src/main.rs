use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use geophase::bath::{correlation_ft, hilbert_transform_s};
use geophase::error::ConfigError;
use geophase::experiment::figures::{curves, figure_spec, run_figure};
use geophase::experiment::output::{save_csv, save_svg, write_csv, Curve};
use geophase::experiment::{run_sweep, Execution, ExperimentConfig, SweepResult};
use geophase::phase::PhaseWindow;
use geophase::validation::run_acceptance;
use geophase::Error;

/// Geometric phase of a qubit in an Ohmic bath under Davies dynamics.
#[derive(Parser, Debug)]
#[command(name = "geophase", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print bath rates c(w), Lamb-shift integrals s(w) and the KMS ratio.
    Rates,
    /// Sweep the initial polar angle and write a CSV (stdout without --out).
    Sweep,
    /// Run one of the four preset sweep families into a directory.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
    },
    /// Run the acceptance suite.
    Validate {
        /// Evaluate sweep points on one thread.
        #[arg(long)]
        serial: bool,
    },
}

#[derive(clap::Args, Debug)]
struct Overrides {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Number of free periods to evolve.
    #[arg(long, global = true)]
    periods: Option<f64>,
    /// Phase window: zero2pi or pmpi.
    #[arg(long, global = true)]
    window: Option<PhaseWindow>,
    /// Evaluate c(0) at this effective temperature instead of T.
    #[arg(long = "c0-override", value_name = "T_EFF", global = true)]
    c0_override: Option<f64>,
    /// Drop the Lamb-shift Hamiltonian.
    #[arg(long, global = true)]
    no_lamb_shift: bool,
    /// Also write an SVG plot.
    #[arg(long, global = true)]
    svg: bool,
    /// Output file (sweep) or directory (figure).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn load(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(n) = self.periods {
            cfg.integrator.periods = n;
        }
        if let Some(w) = self.window {
            cfg.sweep.window = w;
        }
        if let Some(t) = self.c0_override {
            cfg.bath.c0_override_temperature = Some(t);
        }
        if self.no_lamb_shift {
            cfg.generator.lamb_shift = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    if let Command::Validate { serial } = cli.command {
        let exec = if serial { Execution::Serial } else { Execution::Parallel };
        let checks = run_acceptance(exec);
        for c in &checks {
            println!("{c}");
        }
        let failed = checks.iter().filter(|c| !c.passed).count();
        println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
        return Ok(if failed == 0 { 0 } else { 3 });
    }
    let cfg = cli.overrides.load()?;
    match cli.command {
        Command::Rates => rates(&cfg)?,
        Command::Sweep => sweep(&cfg, &cli.overrides)?,
        Command::Figure { n } => figure(n, &cfg, &cli.overrides)?,
        Command::Validate { .. } => unreachable!(),
    }
    Ok(0)
}

fn rates(cfg: &ExperimentConfig) -> Result<(), Error> {
    let b = &cfg.bath;
    let q = &cfg.generator.quadrature;
    let eps = cfg.qubit.epsilon;
    let mut out = std::io::stdout().lock();
    for (key, value) in cfg.metadata() {
        writeln!(out, "# {key}={value}")?;
    }
    let c_plus = correlation_ft(b, eps);
    let c_minus = correlation_ft(b, -eps);
    let rows = [
        ("c(+eps)", c_plus),
        ("c(-eps)", c_minus),
        ("c(0)", correlation_ft(b, 0.0)),
        ("s(+eps)", hilbert_transform_s(b, eps, q)?),
        ("s(-eps)", hilbert_transform_s(b, -eps, q)?),
        ("s(0)", hilbert_transform_s(b, 0.0, q)?),
    ];
    for (name, v) in rows {
        writeln!(out, "{name:<18}{v:.12e}")?;
    }
    if c_plus > 0.0 {
        writeln!(out, "{:<18}{:.12e}", "c(-eps)/c(+eps)", c_minus / c_plus)?;
        writeln!(out, "{:<18}{:.12e}", "exp(-eps/T)", (-eps / b.temperature).exp())?;
    } else {
        writeln!(out, "{:<18}undefined (c(+eps) = 0)", "c(-eps)/c(+eps)")?;
    }
    Ok(())
}

fn report_failures(label: &str, r: &SweepResult) {
    let n = r.failures().count();
    if n > 0 {
        eprintln!("warning: {label}{n} of {} points failed; see the error column", r.records.len());
    }
}

fn svg_title(cfg: &ExperimentConfig) -> String {
    format!(
        "mu_x = {}, mu_z = {}, T = {}, periods = {}",
        cfg.qubit.mu_x, cfg.qubit.mu_z, cfg.bath.temperature, cfg.integrator.periods
    )
}

fn sweep(cfg: &ExperimentConfig, o: &Overrides) -> Result<(), Error> {
    let csv_path = o.out.clone().or_else(|| cfg.output.csv_path.clone());
    let svg_path = match (&cfg.output.svg_path, o.svg, &csv_path) {
        (Some(p), _, _) => Some(p.clone()),
        (None, true, Some(csv)) => Some(csv.with_extension("svg")),
        (None, true, None) => {
            return Err(ConfigError::Invalid {
                key: "--svg".into(),
                reason: "needs --out or output.svg_path to place the plot".into(),
            }
            .into())
        }
        (None, false, _) => None,
    };
    let r = run_sweep(cfg, Execution::Parallel)?;
    report_failures("", &r);
    match &csv_path {
        Some(p) => save_csv(&r, p)?,
        None => write_csv(&r, std::io::stdout().lock())?,
    }
    if let Some(p) = svg_path {
        let curve = Curve {
            label: "Phi".into(),
            points: r.curve(),
        };
        save_svg(&svg_title(cfg), &[curve], cfg.sweep.window, &p)?;
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn figure(n: u8, cfg: &ExperimentConfig, o: &Overrides) -> Result<(), Error> {
    let spec = figure_spec(n, cfg)?;
    let dir = o.out.clone().unwrap_or_else(|| PathBuf::from(format!("figure{n}")));
    std::fs::create_dir_all(&dir)?;
    let results = run_figure(&spec, Execution::Parallel)?;
    for (k, (label, r)) in results.iter().enumerate() {
        report_failures(&format!("{label}: "), r);
        let path = dir.join(format!("fig{n}_{k}.csv"));
        save_csv(r, &path)?;
        eprintln!("wrote {} ({label})", path.display());
    }
    let svg = dir.join(format!("fig{n}.svg"));
    save_svg(spec.title, &curves(&results), spec.window, &svg)?;
    eprintln!("wrote {}", svg.display());
    Ok(())
}
