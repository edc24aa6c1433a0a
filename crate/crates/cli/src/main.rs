// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sqjc_core::analytic::{
    critical_coupling, g_from_lambda, jcm_gap, normal_phase_coeffs, rabi_critical_lambda, rabi_gap,
    superradiant_gap_extrapolated, superradiant_gap_jcm, superradiant_gap_rabi, Branch,
};
use sqjc_core::ed::{
    converged_eigen, gap_scan, ground_state, linspace, locate_first_gap_minimum,
    locate_gap_minimum, spectrum_ed, ConvergenceOptions, GapKind, GapMinimum, ModelSpec, ScanPoint,
};
use sqjc_core::fock::{field_op, number, FockSpace};
use sqjc_core::models::auto_cutoff;
use sqjc_core::sweep::{parse_config, run_sweep, write_csv};
use sqjc_core::validate::{run_validation, ValidationHooks, ValidationMode};
use sqjc_core::{ModelParams, RabiParams};

mod output;

use output::{Document, Value};

const AFTER_HELP: &str = "Frequencies default to omega_c = omega_a = 1, so every energy and coupling is in units of omega_c unless set explicitly.\n\nExit codes: 0 success, 1 usage or configuration error, 2 numerical or convergence failure, 3 validation failure.\nSQJC_THREADS caps the number of worker threads.";

#[derive(Parser, Debug)]
#[command(
    name = "sqjc",
    version,
    about = "Squeezed-photon Jaynes-Cummings model: spectra, critical couplings, sweeps and self-checks",
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Low-lying spectrum by exact diagonalization, with the analytic gap.
    Spectrum(SpectrumArgs),
    /// Critical couplings of both branches and the Rabi reference value.
    Critical(CriticalArgs),
    /// Phase-diagram sweep driven by a JSON config; writes CSV.
    Sweep(SweepArgs),
    /// Finite-size gap scan across a coupling grid.
    Gapscan(GapscanArgs),
    /// Run the built-in identity and limit checks.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct Frequencies {
    /// Cavity frequency omega_c.
    #[arg(long, default_value_t = 1.0)]
    omega_c: f64,
    /// Two-level transition frequency omega_a.
    #[arg(long, default_value_t = 1.0)]
    omega_a: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Mjc,
    Jcm,
    Rabi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cutoff {
    Auto,
    Fixed(usize),
}

impl FromStr for Cutoff {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Cutoff::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Cutoff::Fixed(n)),
            _ => Err(format!("expected `auto` or a positive integer, got `{s}`")),
        }
    }
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, value_enum, default_value_t = Model::Mjc)]
    model: Model,
    #[command(flatten)]
    freq: Frequencies,
    /// Coupling Omega (mjc, jcm) or lambda (rabi).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    coupling: f64,
    /// Squeezing parameter r (mjc only).
    #[arg(long)]
    squeeze: Option<f64>,
    /// Number of levels to report.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Photon cutoff: `auto` (converged) or a fixed N.
    #[arg(long, default_value = "auto")]
    cutoff: Cutoff,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct CriticalArgs {
    #[command(flatten)]
    freq: Frequencies,
    /// Squeezing parameter r.
    #[arg(long, default_value_t = 0.0)]
    squeeze: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// JSON sweep configuration.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args, Debug)]
struct GapscanArgs {
    #[command(flatten)]
    freq: Frequencies,
    /// Squeezing parameter r.
    #[arg(long, default_value_t = 0.0)]
    squeeze: f64,
    #[arg(long, default_value_t = 0.0)]
    coupling_min: f64,
    /// Defaults to twice the case-B critical coupling.
    #[arg(long)]
    coupling_max: Option<f64>,
    #[arg(long, visible_alias = "steps", default_value_t = 41)]
    coupling_steps: usize,
    /// Report points whose cutoff loop did not converge instead of failing.
    #[arg(long)]
    allow_unconverged: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
#[group(multiple = false)]
struct ValidateArgs {
    /// Reduced grids (default).
    #[arg(long)]
    quick: bool,
    /// Complete grids plus the ground-constant check.
    #[arg(long)]
    full: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numeric(_) => 2,
            Failure::Validation(_) => 3,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn numeric(e: impl std::fmt::Display) -> Failure {
    Failure::Numeric(e.to_string())
}

fn emit(doc: &Document, format: Format) {
    let text = match format {
        Format::Table => doc.to_table(),
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
    };
    print!("{text}");
}

fn cmd_spectrum(args: &SpectrumArgs) -> CmdResult {
    let Frequencies { omega_c, omega_a } = args.freq;
    if args.squeeze.is_some() && args.model != Model::Mjc {
        return Err(usage("--squeeze is only valid with --model mjc"));
    }
    if args.levels == 0 {
        return Err(usage("--levels must be at least 1"));
    }
    let r = args.squeeze.unwrap_or(0.0);
    let mut doc = Document::default();
    let mut alpha = 0.0;

    let spec = match args.model {
        Model::Mjc | Model::Jcm => {
            let p = ModelParams::new(omega_c, omega_a, args.coupling, r).map_err(usage)?;
            let crit = critical_coupling(Branch::CaseB, omega_c, omega_a, r)
                .map_err(usage)?
                .omega_crit;
            let (phase, gap, note) = if args.coupling < crit {
                let gap = if args.model == Model::Jcm {
                    jcm_gap(&p).map(|g| g.gap)
                } else {
                    normal_phase_coeffs(&p).gap()
                };
                ("normal", gap.ok(), None)
            } else if args.model == Model::Jcm {
                let s = superradiant_gap_jcm(omega_c, omega_a, args.coupling).ok();
                alpha = s.map_or(0.0, |s| s.alpha);
                ("superradiant", s.map(|s| s.gap), None)
            } else {
                let s = superradiant_gap_extrapolated(&p).ok();
                alpha = s.map_or(0.0, |s| s.alpha);
                let note = (r > 0.0).then_some("extrapolated from the r = 0 superradiant form");
                ("superradiant", s.map(|s| s.gap), note)
            };
            doc.field(
                "model",
                Value::text(if args.model == Model::Jcm {
                    "jcm"
                } else {
                    "mjc"
                }),
            );
            doc.field("omega_c", Value::Num(omega_c));
            doc.field("omega_a", Value::Num(omega_a));
            doc.field("coupling", Value::Num(args.coupling));
            if args.model == Model::Mjc {
                doc.field("squeeze", Value::Num(r));
            }
            doc.field("omega_crit_caseB", Value::Num(crit));
            doc.field("phase", Value::text(phase));
            doc.field("gap_analytic", Value::opt(gap));
            if let Some(note) = note {
                doc.field("note", Value::text(note));
            }
            if args.model == Model::Jcm {
                ModelSpec::Jcm(p)
            } else {
                ModelSpec::Mjc(p)
            }
        }
        Model::Rabi => {
            let rp = RabiParams::new(omega_c, omega_a, args.coupling).map_err(usage)?;
            let lc = rabi_critical_lambda(omega_c, omega_a);
            let (phase, gap) = if args.coupling.abs() < lc {
                (
                    "normal",
                    rabi_gap(omega_c, omega_a, args.coupling)
                        .ok()
                        .map(|g| g.gap),
                )
            } else {
                let g = g_from_lambda(omega_c, omega_a, args.coupling);
                let s = superradiant_gap_rabi(omega_c, omega_a, g).ok();
                alpha = s.map_or(0.0, |s| s.alpha);
                ("superradiant", s.map(|s| s.gap))
            };
            doc.field("model", Value::text("rabi"));
            doc.field("omega_c", Value::Num(omega_c));
            doc.field("omega_a", Value::Num(omega_a));
            doc.field("lambda", Value::Num(args.coupling));
            doc.field("lambda_c", Value::Num(lc));
            doc.field("phase", Value::text(phase));
            doc.field("gap_analytic", Value::opt(gap));
            ModelSpec::Rabi(rp)
        }
    };

    let (energies, cutoff_used, converged, gap_ed, photons) = match args.cutoff {
        Cutoff::Fixed(n) => {
            let space = FockSpace::new(n);
            let h = spec.build(space).map_err(usage)?;
            let s = spectrum_ed(&h, args.levels).map_err(usage)?;
            let eig = sqjc_core::fock::herm_eigen(&h).map_err(numeric)?;
            let state = ground_state(&h, &eig, space).map_err(numeric)?;
            let n_op = field_op(&number(space)).map_err(numeric)?;
            (s.energies, n, false, s.gap, n_op.expectation(&state).re)
        }
        Cutoff::Auto => {
            let n_start = auto_cutoff(r, alpha).max(2 * args.levels);
            let opts = ConvergenceOptions {
                n_start,
                n_max: 512.max(2 * n_start),
                ..ConvergenceOptions::default()
            };
            let run = converged_eigen(&spec, args.levels, &opts).map_err(usage)?;
            if !run.spectrum.converged {
                return Err(numeric(format!(
                    "spectrum did not converge to {:e} by cutoff {}",
                    opts.tol, opts.n_max
                )));
            }
            let state = ground_state(&run.hamiltonian, &run.eigen, run.space).map_err(numeric)?;
            let n_op = field_op(&number(run.space)).map_err(numeric)?;
            let photons = n_op.expectation(&state).re;
            let s = run.spectrum;
            (s.energies, s.cutoff_used, s.converged, s.gap, photons)
        }
    };
    doc.field("gap_ed", Value::Num(gap_ed));
    doc.field("mean_photons_ed", Value::Num(photons.max(0.0)));
    doc.field("cutoff_used", Value::Int(cutoff_used as i64));
    doc.field("converged", Value::Bool(converged));
    doc.table(
        "levels",
        &["index", "energy"],
        energies
            .iter()
            .enumerate()
            .map(|(i, &e)| vec![Value::Int(i as i64), Value::Num(e)])
            .collect(),
    );
    emit(&doc, args.format);
    Ok(())
}

fn cmd_critical(args: &CriticalArgs) -> CmdResult {
    let Frequencies { omega_c, omega_a } = args.freq;
    let a = critical_coupling(Branch::CaseA, omega_c, omega_a, args.squeeze).map_err(usage)?;
    let b = critical_coupling(Branch::CaseB, omega_c, omega_a, args.squeeze).map_err(usage)?;
    let mut doc = Document::default();
    doc.field("omega_c", Value::Num(omega_c));
    doc.field("omega_a", Value::Num(omega_a));
    doc.field("squeeze", Value::Num(args.squeeze));
    doc.field("omega_crit_caseA", Value::Num(a.omega_crit));
    doc.field("omega_crit_caseB", Value::Num(b.omega_crit));
    doc.field(
        "lambda_c_rabi",
        Value::Num(rabi_critical_lambda(omega_c, omega_a)),
    );
    emit(&doc, args.format);
    Ok(())
}

fn thread_cap() -> Result<Option<usize>, Failure> {
    match std::env::var("SQJC_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(usage(format!(
                "SQJC_THREADS must be a positive integer, got `{v}`"
            ))),
        },
    }
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let text = fs::read_to_string(&args.config).map_err(|e| {
        usage(format!(
            "cannot read config `{}`: {e}",
            args.config.display()
        ))
    })?;
    let config =
        parse_config(&text).map_err(|e| usage(format!("{}: {e}", args.config.display())))?;
    let rows = run_sweep(&config);
    let file = fs::File::create(&config.output_path)
        .map_err(|e| usage(format!("cannot create `{}`: {e}", config.output_path)))?;
    write_csv(&rows, std::io::BufWriter::new(file))
        .map_err(|e| usage(format!("cannot write `{}`: {e}", config.output_path)))?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    println!("wrote {} rows to {}", rows.len(), config.output_path);
    if failed > 0 {
        println!("{failed} rows recorded evaluation errors");
    }
    Ok(())
}

fn cmd_gapscan(args: &GapscanArgs) -> CmdResult {
    let Frequencies { omega_c, omega_a } = args.freq;
    let template = ModelSpec::Mjc(
        ModelParams::new(omega_c, omega_a, args.coupling_min, args.squeeze).map_err(usage)?,
    );
    let crit = critical_coupling(Branch::CaseB, omega_c, omega_a, args.squeeze)
        .map_err(usage)?
        .omega_crit;
    let max = args.coupling_max.unwrap_or(2.0 * crit);
    if args.coupling_steps == 0 {
        return Err(usage("--coupling-steps must be at least 1"));
    }
    if !(args.coupling_min >= 0.0 && max.is_finite())
        || (args.coupling_steps > 1 && !(max > args.coupling_min))
    {
        return Err(usage(format!(
            "coupling grid needs 0 <= min < max, got [{}, {max}]",
            args.coupling_min
        )));
    }
    let grid = linspace(args.coupling_min, max, args.coupling_steps);
    let n_start = auto_cutoff(args.squeeze, 0.0);
    let opts = ConvergenceOptions {
        n_start,
        n_max: 512.max(2 * n_start),
        ..ConvergenceOptions::default()
    };
    let points = gap_scan(&template, &grid, &opts).map_err(numeric)?;
    let unconverged: Vec<f64> = points
        .iter()
        .filter(|p| !p.converged)
        .map(|p| p.coupling)
        .collect();
    if !unconverged.is_empty() && !args.allow_unconverged {
        return Err(numeric(format!(
            "cutoff loop did not converge at {} point(s), first at coupling {}; rerun with --allow-unconverged to report them",
            unconverged.len(),
            unconverged[0]
        )));
    }

    let mut doc = Document::default();
    doc.field("omega_c", Value::Num(omega_c));
    doc.field("omega_a", Value::Num(omega_a));
    doc.field("squeeze", Value::Num(args.squeeze));
    doc.field("omega_crit_caseB", Value::Num(crit));
    type Locator = fn(&[ScanPoint], GapKind) -> Option<GapMinimum>;
    let locators: [(&str, Locator); 2] = [
        ("first", locate_first_gap_minimum),
        ("global", locate_gap_minimum),
    ];
    for (kind, label) in [(GapKind::Lowest, "gap"), (GapKind::Doublet, "doublet_gap")] {
        for (which, locate) in locators {
            if let Some(m) = locate(&points, kind) {
                let key = format!("{which}_min_{label}");
                doc.field(&format!("{key}_coupling"), Value::Num(m.coupling));
                doc.field(&key, Value::Num(m.gap));
                doc.field(
                    &format!("{key}_offset"),
                    Value::Num(m.coupling / crit - 1.0),
                );
            }
        }
    }
    doc.table(
        "points",
        &[
            "coupling",
            "gap",
            "doublet_gap",
            "mean_photons",
            "cutoff_used",
            "converged",
        ],
        points
            .iter()
            .map(|p| {
                vec![
                    Value::Num(p.coupling),
                    Value::Num(p.gap),
                    Value::Num(p.doublet_gap),
                    Value::Num(p.mean_photons),
                    Value::Int(p.cutoff_used as i64),
                    Value::Bool(p.converged),
                ]
            })
            .collect(),
    );
    emit(&doc, args.format);
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> CmdResult {
    let mode = if args.full {
        ValidationMode::Full
    } else {
        ValidationMode::Quick
    };
    let report = run_validation(mode, &ValidationHooks::default());
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "validation failed: {}",
            report.failed_suites().join(", ")
        )))
    }
}

fn run(cli: &Cli) -> CmdResult {
    if let Some(n) = thread_cap()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(usage)?;
    }
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Critical(a) => cmd_critical(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Gapscan(a) => cmd_gapscan(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Numeric(m) | Failure::Validation(m) => m,
            };
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
