//! `decmon`: compile properties, run monitors over traces and reproduce the
//! message-efficiency campaign.
//!
//! Exit codes: 0 on success, 2 when a campaign leaves some outcome bucket
//! skipped or short, 1 on errors.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use decmon_core::central::run_centralized;
use decmon_core::experiment::{
    buckets_csv, render_table, replay, run_experiment, runs_csv, summary_csv, ExperimentConfig,
};
use decmon_core::ltl::export::{to_dot, to_json};
use decmon_core::sim::write_jsonl;
use decmon_core::{
    build_monitor, check_monitorable, generate_trace, oracle_evaluate, parse_ltl, run_simulation, split_transitions,
    ApTable, DelayModel, InitialValuation, ProtocolAutomaton, RunResult, Time, Trace,
};

#[derive(Parser)]
#[command(name = "decmon", version, about = "Decentralized runtime verification of LTL properties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the monitor and protocol automaton of a formula
    Compile {
        /// LTL formula, e.g. `!a U (a U (b & c))`
        formula: String,
        /// Proposition owners, e.g. `a:0,b:1,c:2`
        #[arg(long)]
        props: String,
        #[arg(long, value_enum, default_value_t = AutomatonFormat::Text)]
        format: AutomatonFormat,
        /// Write to a file instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Monitor one trace and print the run result as JSON
    Run {
        formula: String,
        /// Trace file; its `prop` lines define the propositions
        #[arg(long)]
        trace: PathBuf,
        /// Delay seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Delays are uniform over [0, delay-max) units
        #[arg(long, default_value = "2", value_parser = parse_time)]
        delay_max: Time,
        /// Run the centralized baseline instead
        #[arg(long)]
        central: bool,
        /// Write the JSON-lines event log here
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Evaluate a trace offline and print the ground truth as JSON
    Oracle {
        formula: String,
        #[arg(long)]
        trace: PathBuf,
    },
    /// Run a campaign described by a config file
    Bench {
        config: PathBuf,
        /// Output directory; overrides the config's `output`
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write event logs for the first N runs of every bucket
        #[arg(long, default_value_t = 0)]
        logs: usize,
    },
    /// Generate a random trace
    TraceGen {
        /// Proposition owners, e.g. `a:0,b:1,c:2`
        #[arg(long)]
        props: String,
        /// Expected number of changes per process over the horizon
        #[arg(long, default_value_t = 10.0)]
        mu: f64,
        #[arg(long, default_value = "100", value_parser = parse_time)]
        horizon: Time,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Initial::False)]
        initial: Initial,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AutomatonFormat {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Initial {
    False,
    Random,
}

fn parse_time(s: &str) -> Result<Time, String> {
    s.parse().map_err(|_| format!("`{s}` is not a time in units (at most 6 decimals)"))
}

fn parse_props(spec: &str) -> Result<ApTable> {
    let mut pairs = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, owner) = item.split_once(':').with_context(|| format!("`{item}` is not `name:owner`"))?;
        let owner: usize = owner.trim().parse().with_context(|| format!("bad owner in `{item}`"))?;
        pairs.push((name.trim().to_string(), owner));
    }
    Ok(ApTable::from_pairs(&pairs)?)
}

fn compile(formula: &str, aps: &ApTable) -> Result<ProtocolAutomaton> {
    let f = parse_ltl(formula, aps)?;
    Ok(split_transitions(&build_monitor(&f, aps)))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_trace(path: &Path) -> Result<Trace> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Trace::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn result_json(r: &RunResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(r)? + "\n")
}

fn describe(pa: &ProtocolAutomaton, formula: &str) -> String {
    let aps = pa.aps();
    let report = check_monitorable(pa.monitor());
    let mut s = String::new();
    let _ = writeln!(s, "formula: {formula}");
    let _ = writeln!(s, "monitorable: {}", report.is_monitorable());
    if !report.dead_locations.is_empty() {
        let _ = writeln!(s, "undecidable from: {:?}", report.dead_locations);
    }
    let _ = writeln!(s, "locations: {} (initial {})", pa.num_locations(), pa.location_name(pa.initial()));
    for q in 0..pa.num_locations() {
        let _ = writeln!(s, "  {} [{}]", pa.location_name(q), pa.label(q));
    }
    let _ = writeln!(s, "transitions: {}", pa.transitions().len());
    for t in pa.transitions() {
        let _ = writeln!(
            s,
            "  Tr{} {} -> {} [{}] processes {:?}",
            t.id,
            pa.location_name(t.source),
            pa.location_name(t.target),
            t.conjunct_display(aps),
            t.associated
        );
    }
    s
}

fn bench(config: &Path, out: Option<PathBuf>, logs: usize) -> Result<bool> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = ExperimentConfig::parse(&text)?;
    let dir = out.or_else(|| cfg.output.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("results"));
    let result = run_experiment(&cfg)?;
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let table = render_table(&result.rows);
    for (name, body) in [
        ("runs.csv", runs_csv(&result.runs)),
        ("buckets.csv", buckets_csv(&result.buckets)),
        ("summary.csv", summary_csv(&result.rows)),
        ("table.txt", table.clone()),
    ] {
        fs::write(dir.join(name), body).with_context(|| format!("writing {name}"))?;
    }
    if logs > 0 {
        let log_dir = dir.join("logs");
        fs::create_dir_all(&log_dir)?;
        let props = cfg.instances()?;
        for r in result.runs.iter().filter(|r| r.index < logs) {
            let (pi, p) = props.iter().enumerate().find(|(_, p)| p.label == r.property).expect("run of a known property");
            let (_, d, c) = replay(&cfg, p, r)?;
            let stem = format!("{pi:02}-{}-{}-{:04}", r.outcome.ascii(), r.mu, r.index);
            write_jsonl(fs::File::create(log_dir.join(format!("{stem}.decentral.jsonl")))?, &d.log)?;
            write_jsonl(fs::File::create(log_dir.join(format!("{stem}.central.jsonl")))?, &c.log)?;
        }
    }
    print!("{table}");
    let mut warned = false;
    for b in &result.buckets {
        if b.infeasible {
            eprintln!("warning: {} has no {} location; bucket skipped", b.property, b.outcome.ascii());
            warned = true;
        } else if b.is_short(cfg.traces_per_mu) {
            eprintln!(
                "warning: {} {} mu={}: {} of {} traces after {} attempts",
                b.property,
                b.outcome.ascii(),
                b.mu,
                b.accepted,
                cfg.traces_per_mu,
                b.attempts
            );
            warned = true;
        }
    }
    eprintln!("{} runs written to {}", result.runs.len(), dir.display());
    Ok(warned)
}

fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Compile { formula, props, format, output } => {
            let pa = compile(&formula, &parse_props(&props)?)?;
            let text = match format {
                AutomatonFormat::Text => describe(&pa, &formula),
                AutomatonFormat::Json => to_json(&pa, &formula) + "\n",
                AutomatonFormat::Dot => to_dot(&pa),
            };
            emit(output.as_deref(), &text)?;
        }
        Command::Run { formula, trace, seed, delay_max, central, log } => {
            let trace = read_trace(&trace)?;
            let pa = compile(&formula, trace.aps())?;
            let delays = DelayModel::Uniform { max: delay_max };
            let keep = log.is_some();
            let out = if central {
                run_centralized(&pa, &trace, &delays, seed, keep)?
            } else {
                run_simulation(&pa, &trace, &delays, seed, keep)?
            };
            if let Some(p) = log {
                write_jsonl(fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?, &out.log)?;
            }
            emit(None, &result_json(&out.result)?)?;
        }
        Command::Oracle { formula, trace } => {
            let trace = read_trace(&trace)?;
            let pa = compile(&formula, trace.aps())?;
            emit(None, &result_json(&oracle_evaluate(&pa, &trace)?)?)?;
        }
        Command::Bench { config, out, logs } => return bench(&config, out, logs),
        Command::TraceGen { props, mu, horizon, seed, initial, output } => {
            if !(mu.is_finite() && mu > 0.0) {
                bail!("mu must be positive");
            }
            if horizon == Time::ZERO {
                bail!("horizon must be positive");
            }
            let initial = match initial {
                Initial::False => InitialValuation::AllFalse,
                Initial::Random => InitialValuation::Random,
            };
            let trace = generate_trace(&parse_props(&props)?, mu, horizon, seed, initial);
            emit(output.as_deref(), &trace.to_text())?;
        }
    }
    Ok(false)
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
    match execute(cli.command) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
