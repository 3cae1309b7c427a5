use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use steane_sm::certify::{certify, generic_input, standard_suite};
use steane_sm::experiment::report::{write_csv, write_json};
use steane_sm::experiment::{run_experiment_with, run_sweep, ExperimentConfig, Mode, SweepRow, SweepSpec, DEFAULT_TRIALS};
use steane_sm::noise::EnvPreset;
use steane_sm::sm::SmProtocol;

#[derive(Parser)]
#[command(name = "steane-sm", version, about = "Syndrome-measurement strategy simulator for the [[7,1,3]] code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment.
    Run(ExperimentArgs),
    /// Run the cross product of p, q and protocol values.
    Sweep(ExperimentArgs),
    /// Single-fault certification of every gadget.
    Certify(CertifyArgs),
    /// Print the ancilla cost table.
    Resources(ResourcesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Mc,
    Enum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
struct ExperimentArgs {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Protocol name(s): single, single-repeated, shor, steane, steane-repeated.
    #[arg(long, value_delimiter = ',')]
    protocol: Vec<SmProtocol>,
    /// depolarizing, x-dominant, y-dominant or z-dominant.
    #[arg(long)]
    env: Option<EnvPreset>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    q: Vec<u32>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    max_weight: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Composite gate string over {A, B}.
    #[arg(long)]
    sequence: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Verify magic states before each T gate.
    #[arg(long)]
    verify_magic: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Print every uncorrectable fault.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args, Debug)]
struct ResourcesArgs {
    /// Also print totals for this many SM applications.
    #[arg(long)]
    q: Option<u32>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(untagged)]
enum OneOrMany<T> {
    #[default]
    None,
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::None => vec![],
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Flat config file.
#[derive(Deserialize, Debug, Default)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    protocol: OneOrMany<String>,
    env: Option<String>,
    p: OneOrMany<f64>,
    q: OneOrMany<u32>,
    trials: Option<u64>,
    mode: Option<ModeArg>,
    max_weight: Option<usize>,
    seed: Option<u64>,
    sequence: Option<String>,
    alpha: Option<f64>,
    beta: Option<f64>,
    verify_magic: Option<bool>,
    out: Option<PathBuf>,
    format: Option<Format>,
    workers: Option<usize>,
}

struct Resolved {
    base: ExperimentConfig,
    ps: Vec<f64>,
    qs: Vec<u32>,
    protocols: Vec<SmProtocol>,
    workers: usize,
    format: Format,
    out: Option<PathBuf>,
}

fn default_p_grid() -> Vec<f64> {
    (0..13).map(|i| 10f64.powf(-5.0 + 0.25 * i as f64)).collect()
}

fn pick<T>(flag: Vec<T>, file: Vec<T>) -> Vec<T> {
    if flag.is_empty() {
        file
    } else {
        flag
    }
}

fn or_default<T>(v: Vec<T>, default: impl FnOnce() -> Vec<T>) -> Vec<T> {
    if v.is_empty() {
        default()
    } else {
        v
    }
}

fn resolve(args: ExperimentArgs) -> Result<Resolved> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => FileConfig::default(),
    };
    let d = ExperimentConfig::default();
    let file_protocols = file
        .protocol
        .into_vec()
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<SmProtocol>, _>>()?;
    let file_env = file.env.as_deref().map(str::parse::<EnvPreset>).transpose()?;
    let mode = match args.mode.or(file.mode).unwrap_or(ModeArg::Mc) {
        ModeArg::Mc => Mode::MonteCarlo { trials: args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS) },
        ModeArg::Enum => Mode::Enumeration { max_weight: args.max_weight.or(file.max_weight).unwrap_or(2) },
    };
    let base = ExperimentConfig {
        sequence: args.sequence.or(file.sequence).unwrap_or(d.sequence),
        env: args.env.or(file_env).unwrap_or(d.env),
        mode,
        seed: args.seed.or(file.seed).unwrap_or(d.seed),
        alpha: args.alpha.or(file.alpha).unwrap_or(d.alpha),
        beta: args.beta.or(file.beta).unwrap_or(d.beta),
        verify_magic: args.verify_magic || file.verify_magic.unwrap_or(false),
        ..d
    };
    Ok(Resolved {
        ps: pick(args.p, file.p.into_vec()),
        qs: pick(args.q, file.q.into_vec()),
        protocols: pick(args.protocol, file_protocols),
        workers: args.workers.or(file.workers).unwrap_or(1),
        format: args.format.or(file.format).unwrap_or(Format::Csv),
        out: args.out.or(file.out),
        base,
    })
}

fn emit(rows: &[SweepRow], format: Format, out: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match format {
        Format::Csv => write_csv(rows, &mut sink)?,
        Format::Json => write_json(rows, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn single<T: Copy + std::fmt::Debug>(name: &str, v: &[T]) -> Result<T> {
    match v {
        [x] => Ok(*x),
        _ => bail!("`run` takes exactly one --{name} value, got {v:?}"),
    }
}

fn cmd_run(args: ExperimentArgs) -> Result<()> {
    let mut r = resolve(args)?;
    r.base.p = single("p", &or_default(r.ps, || vec![r.base.p]))?;
    r.base.q = single("q", &or_default(r.qs, || vec![r.base.q]))?;
    r.base.protocol = single("protocol", &or_default(r.protocols, || vec![r.base.protocol]))?;
    let result = run_experiment_with(&r.base, r.workers)?;
    eprintln!("{result}");
    let row = SweepRow { config: r.base, result: Ok(result), d_log: None, d_log_psm: None };
    emit(&[row], r.format, r.out.as_deref())
}

fn cmd_sweep(args: ExperimentArgs) -> Result<()> {
    let r = resolve(args)?;
    let spec = SweepSpec {
        base: r.base,
        ps: or_default(r.ps, default_p_grid),
        qs: or_default(r.qs, || vec![50, 20, 10, 4, 2, 1]),
        protocols: or_default(r.protocols, || SmProtocol::ALL.to_vec()),
    };
    let rows = run_sweep(&spec, r.workers)?;
    for row in &rows {
        if let Err(e) = &row.result {
            eprintln!("cell {} q={} p={} failed: {e}", row.config.protocol, row.config.q, row.config.p);
        }
    }
    emit(&rows, r.format, r.out.as_deref())
}

fn cmd_certify(args: CertifyArgs) -> Result<()> {
    let mut out = io::stdout().lock();
    for gadget in standard_suite() {
        let report = certify(gadget, generic_input(), args.seed)?;
        let verdict = if report.fault_tolerant() { "fault-tolerant" } else { "not fault-tolerant" };
        writeln!(out, "{report} => {verdict}")?;
        if args.verbose {
            for f in &report.failures {
                writeln!(out, "    {f:?}")?;
            }
        }
    }
    Ok(())
}

fn cmd_resources(args: ResourcesArgs) -> Result<()> {
    let mut out = io::stdout().lock();
    write!(out, "{:<16} {:>8} {:>9} {:>7}", "protocol", "per_set", "min_sets", "per_sm")?;
    if let Some(q) = args.q {
        write!(out, " {:>9}", format!("total_q{q}"))?;
    }
    writeln!(out)?;
    for p in SmProtocol::ALL {
        let sets = p.nominal_cost() / p.set_cost();
        write!(out, "{:<16} {:>8} {:>9} {:>7}", p.name(), p.set_cost(), sets, p.nominal_cost())?;
        if let Some(q) = args.q {
            write!(out, " {:>9}", steane_sm::experiment::nominal_resource_count(p, q))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Resources(a) => cmd_resources(a),
    }
}
