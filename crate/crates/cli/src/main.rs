//! `toricrand`: command-line harness for random toric surfaces.
//!
//! Exit codes: 0 success, 1 validation error, 2 I/O error, 3 internal invariant violation.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toricrand::experiments::{density_table, threshold_table, OutputSpec};
use toricrand::random::sampled_record;
use toricrand::reports::space_table;
use toricrand::table::write_atomic;
use toricrand::{
    blowdown_table, complete_fan, conjecture_report, emit, enumerate_rays, run_density_sweep, run_threshold_sweep,
    sample_fan, sup_norm, Cell, Error, ExperimentSpec, FanRecord, Format, QSchedule, Regime, SampleConfig, Table,
};

#[derive(Parser)]
#[command(name = "toricrand", version, about = "Random toric surfaces: fans, blowdowns and Monte Carlo sweeps")]
struct Cli {
    /// Worker threads for parallel work (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List R_h in canonical angular order (columns x,y,norm).
    Rays {
        #[arg(long)]
        h: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write the complete fan Σ_h as a JSON fan record.
    Complete {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a fan from T(h, p) and write it as a JSON fan record.
    Sample {
        #[arg(long)]
        h: u32,
        /// Inclusion probability of each ray.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        trial: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Singularity spectrum of a fan record (columns k,count).
    Spectrum {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Blowdown index of every ray of Σ_h (columns x,y,norm,k).
    Blowdown {
        #[arg(long)]
        h: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// |S_{>=k}| / N_h for k = 2..=kmax against the conjectured limits 2/T_k.
    Ratios {
        #[arg(long, num_args = 1.., required = true)]
        h: Vec<u32>,
        #[arg(long, default_value_t = 7)]
        kmax: u64,
        /// One line per h with a column per k, closed by the conjectured limits.
        #[arg(long)]
        wide: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Blowdown indices of the closed first quadrant of Σ_h (columns x,y,k).
    Space {
        #[arg(long)]
        h: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Smooth/singular fractions per (h, q).
    Threshold(SweepArgs),
    /// Fraction of trials with δ_k > c per (h, q, k).
    Density(SweepArgs),
}

#[derive(Args)]
struct OutArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    QSmall,
    QLarge,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment spec file (TOML, or JSON with a .json extension). Flags below are ignored when given.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    h: Vec<u32>,
    /// Explicit schedule values, one per --h.
    #[arg(long, num_args = 1.., conflicts_with_all = ["c", "alpha"])]
    q: Vec<f64>,
    /// Power schedule constant: value = min(1, c·h^(-alpha)).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// q-small: the schedule gives q; q-large: it gives 1 - q.
    #[arg(long, value_enum, default_value = "q-small")]
    regime: RegimeArg,
    #[arg(long, default_value_t = 200)]
    trials: u32,
    #[arg(long = "k", num_args = 1..)]
    k_list: Vec<u64>,
    #[arg(long)]
    c_density: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

impl SweepArgs {
    fn to_spec(&self) -> toricrand::Result<ExperimentSpec> {
        if let Some(path) = &self.spec {
            return ExperimentSpec::from_path(path);
        }
        let q_schedule = match (self.q.is_empty(), self.c, self.alpha) {
            (false, _, _) => QSchedule::Explicit(self.q.clone()),
            (true, Some(c), Some(alpha)) => QSchedule::Power { c, alpha },
            _ => return Err(Error::Config("give --spec, explicit --q values, or both --c and --alpha".into())),
        };
        let spec = ExperimentSpec {
            h_values: self.h.clone(),
            q_schedule,
            regime: match self.regime {
                RegimeArg::QSmall => Regime::QSmall,
                RegimeArg::QLarge => Regime::QLarge,
            },
            trials: self.trials,
            k_list: self.k_list.clone(),
            c_density: self.c_density,
            master_seed: self.seed,
            output: None,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn write_output(bytes: &[u8], path: Option<&Path>) -> toricrand::Result<()> {
    match path {
        Some(path) => write_atomic(path, bytes),
        None => std::io::stdout().write_all(bytes).map_err(|e| Error::Io { path: "<stdout>".into(), source: e }),
    }
}

fn write_table(table: &Table, out: &OutArgs, fallback: Option<&OutputSpec>) -> toricrand::Result<()> {
    let path = out.out.as_deref().or(fallback.map(|o| o.path.as_path()));
    let format = out
        .format
        .map(Format::from)
        .or(fallback.and_then(|o| o.format))
        .unwrap_or_else(|| path.map(Format::from_path).unwrap_or_default());
    match path {
        Some(path) => emit(table, format, path),
        None => write_output(table.render(format).as_bytes(), None),
    }
}

fn run(cli: Cli) -> toricrand::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?;
    }
    match cli.command {
        Command::Rays { h, out } => {
            let mut t = Table::new(["x", "y", "norm"]);
            for &v in enumerate_rays(h)?.rays() {
                t.push(vec![Cell::Int(v.x()), Cell::Int(v.y()), Cell::from(sup_norm(v))]);
            }
            write_table(&t, &out, None)
        }
        Command::Complete { h, out } => {
            let fan = complete_fan(enumerate_rays(h)?.into_rays());
            let record = FanRecord { h: Some(h), ..fan.to_record() };
            write_output(record.to_json().as_bytes(), out.as_deref())
        }
        Command::Sample { h, p, seed, trial, out } => {
            let cfg = SampleConfig { h, p, master_seed: seed, trial_index: trial };
            let fan = sample_fan(&cfg)?;
            write_output(sampled_record(&cfg, &fan).to_json().as_bytes(), out.as_deref())
        }
        Command::Spectrum { input, out } => {
            let fan = FanRecord::read(&input)?.to_fan()?;
            let spectrum = fan.spectrum();
            let mut t = Table::new(["k", "count"]);
            for (&k, &n) in &spectrum.counts {
                t.push(vec![Cell::from(k), Cell::from(n)]);
            }
            eprintln!(
                "rays {} cones {} smooth {} max_index {}",
                fan.rays().len(),
                fan.n_fixed_points(),
                fan.is_smooth(),
                fan.max_index()
            );
            write_table(&t, &out, None)
        }
        Command::Blowdown { h, out } => write_table(&blowdown_table(h)?.to_table(), &out, None),
        Command::Ratios { h, kmax, wide, out } => {
            let report = conjecture_report(&h, kmax)?;
            let t = if wide { report.to_wide_table() } else { report.to_table() };
            write_table(&t, &out, None)
        }
        Command::Space { h, out } => write_table(&space_table(&blowdown_table(h)?), &out, None),
        Command::Threshold(args) => {
            let spec = args.to_spec()?;
            let rows = run_threshold_sweep(&spec)?;
            write_table(&threshold_table(&rows), &args.out, spec.output.as_ref())
        }
        Command::Density(args) => {
            let spec = args.to_spec()?;
            let rows = run_density_sweep(&spec)?;
            write_table(&density_table(&rows), &args.out, spec.output.as_ref())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Validation(_) | Error::Parse { .. } => 1,
        Error::Io { .. } => 2,
        Error::Invariant(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
