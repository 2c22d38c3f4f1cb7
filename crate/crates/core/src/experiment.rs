//! Message-efficiency campaigns: property families, outcome buckets,
//! paired decentralized/centralized runs and summary tables.
//!
//! Configuration is a key-value text file:
//!
//! ```text
//! # comments start with '#'
//! properties = phi1, phi2, phi3, phi4
//! k = 2..10
//! mu = 10, 100, 1000
//! traces_per_mu = 200
//! outcomes = top, bottom, unknown
//! horizon = 100
//! delay_max = 2
//! seed = 1
//! max_attempts = 4000
//! initial = random
//! truncate_at_verdict = true
//! reject_initial_verdicts = true
//! output = results
//! ```
//!
//! A custom property is `formula = <ltl>` plus `props = a:0, b:1`, and may
//! replace or extend `properties`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::central::run_centralized;
use crate::ltl::{build_monitor, parse_ltl, split_transitions, ApTable, ProcessId, ProtocolAutomaton, Verdict};
use crate::sim::{
    generate_trace, oracle_evaluate, run_simulation, DelayModel, InitialValuation, RunResult, SimOutcome, Trace,
};
use crate::time::Time;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("property `{0}`: {1}")]
    Property(String, String),
    #[error("run failed for {property} (trace seed {seed}): {msg}")]
    Run { property: String, seed: u64, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Phi1,
    Phi2,
    Phi3,
    Phi4,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Phi1, Family::Phi2, Family::Phi3, Family::Phi4];

    pub fn name(self) -> &'static str {
        match self {
            Family::Phi1 => "phi1",
            Family::Phi2 => "phi2",
            Family::Phi3 => "phi3",
            Family::Phi4 => "phi4",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    /// Whether the family is parameterized by the number of followers.
    pub fn has_k(self) -> bool {
        self != Family::Phi4
    }
}

/// A compiled property ready for simulation.
#[derive(Debug, Clone)]
pub struct Property {
    /// The formula in concrete syntax; also the table label.
    pub label: String,
    pub family: String,
    pub k: Option<usize>,
    pub pa: ProtocolAutomaton,
}

impl Property {
    pub fn compile(label: String, family: String, k: Option<usize>, aps: ApTable) -> Result<Property, ExperimentError> {
        let f = parse_ltl(&label, &aps).map_err(|e| ExperimentError::Property(label.clone(), e.to_string()))?;
        let pa = split_transitions(&build_monitor(&f, &aps));
        Ok(Property { label, family, k, pa })
    }

    pub fn aps(&self) -> &ApTable {
        self.pa.aps()
    }

    /// Whether some reachable location carries `v`.
    pub fn can_produce(&self, v: Verdict) -> bool {
        let m = self.pa.monitor();
        m.reachable().iter().enumerate().any(|(q, &r)| r && m.label(q) == v)
    }
}

fn conj(names: &[String]) -> String {
    names.join(" & ")
}

/// Leader `a` on process 0 and follower `bj` on process `j`; the fourth
/// family puts `a`, `b`, `c` on processes 0, 1, 2.
pub fn family_property(family: Family, k: usize) -> Property {
    if family == Family::Phi4 {
        let aps = ApTable::from_pairs(&[("a", 0), ("b", 1), ("c", 2)]).expect("valid table");
        return Property::compile("[](a -> (b U c))".into(), family.name().into(), None, aps)
            .expect("family formula parses");
    }
    assert!(k >= 1, "k must be positive");
    let mut pairs = vec![("a".to_string(), 0)];
    pairs.extend((1..=k).map(|j| (format!("b{j}"), j)));
    let aps = ApTable::from_pairs(&pairs).expect("valid table");
    let bs: Vec<String> = (1..=k).map(|j| format!("b{j}")).collect();
    let label = match family {
        Family::Phi1 => format!("!a U (a U ({}))", conj(&bs)),
        Family::Phi2 => format!("a U ({})", conj(&bs)),
        Family::Phi3 => format!("<>(a & {})", conj(&bs)),
        Family::Phi4 => unreachable!(),
    };
    Property::compile(label, family.name().into(), Some(k), aps).expect("family formula parses")
}

#[derive(Debug, Clone, PartialEq)]
pub enum PropertySpec {
    Family(Family),
    Custom { formula: String, props: Vec<(String, ProcessId)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub properties: Vec<PropertySpec>,
    pub k: Vec<usize>,
    pub mu: Vec<f64>,
    pub traces_per_mu: usize,
    pub outcomes: Vec<Verdict>,
    pub horizon: Time,
    pub delay_max: Time,
    pub seed: u64,
    /// Traces tried per (property, outcome, mu) bucket before giving up.
    pub max_attempts: usize,
    pub initial: InitialValuation,
    /// Both algorithms see only the changes up to the verdict.
    pub truncate_at_verdict: bool,
    /// Rejects traces whose verdict is already fixed by the initial
    /// valuation. The baseline is given the initial valuation for free, so
    /// such runs only measure that asymmetry.
    pub reject_initial_verdicts: bool,
    /// Directory for campaign outputs; the CLI may override it.
    pub output: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            properties: Family::ALL.into_iter().map(PropertySpec::Family).collect(),
            k: (2..=10).collect(),
            mu: vec![10.0, 100.0, 1000.0],
            traces_per_mu: 200,
            outcomes: vec![Verdict::Top, Verdict::Bottom, Verdict::Unknown],
            horizon: Time::from_units(100),
            delay_max: Time::from_units(2),
            seed: 1,
            max_attempts: 4000,
            initial: InitialValuation::Random,
            truncate_at_verdict: true,
            reject_initial_verdicts: true,
            output: None,
        }
    }
}

fn parse_list<T>(v: &str, f: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(f).collect()
}

fn parse_k(v: &str) -> Option<Vec<usize>> {
    if let Some((lo, hi)) = v.split_once("..") {
        let lo: usize = lo.trim().parse().ok()?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().ok()?;
        return (lo <= hi).then(|| (lo..=hi).collect());
    }
    parse_list(v, |s| s.parse().ok())
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

impl ExperimentConfig {
    /// Starts from the defaults and applies every `key = value` line.
    pub fn parse(text: &str) -> Result<ExperimentConfig, ExperimentError> {
        let mut cfg = ExperimentConfig::default();
        let mut families: Option<Vec<PropertySpec>> = None;
        let mut formula: Option<(usize, String)> = None;
        let mut props: Option<Vec<(String, ProcessId)>> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: &str| ExperimentError::Config { line, msg: msg.to_string() };
            let (key, value) = content.split_once('=').ok_or_else(|| err("expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "properties" => {
                    families = Some(
                        parse_list(value, |s| Family::parse(s).map(PropertySpec::Family))
                            .ok_or_else(|| err("unknown property family"))?,
                    );
                }
                "formula" => formula = Some((line, value.to_string())),
                "props" => {
                    props = Some(
                        parse_list(value, |s| {
                            let (name, owner) = s.split_once(':')?;
                            Some((name.trim().to_string(), owner.trim().parse().ok()?))
                        })
                        .ok_or_else(|| err("props must look like `a:0, b:1`"))?,
                    );
                }
                "k" => cfg.k = parse_k(value).ok_or_else(|| err("k must be `lo..hi` or a list"))?,
                "mu" => cfg.mu = parse_list(value, |s| s.parse().ok()).ok_or_else(|| err("bad mu list"))?,
                "traces_per_mu" => cfg.traces_per_mu = value.parse().map_err(|_| err("bad count"))?,
                "outcomes" => {
                    cfg.outcomes = parse_list(value, |s| match s {
                        "top" => Some(Verdict::Top),
                        "bottom" => Some(Verdict::Bottom),
                        "unknown" => Some(Verdict::Unknown),
                        _ => None,
                    })
                    .ok_or_else(|| err("outcomes are top, bottom, unknown"))?;
                }
                "horizon" => cfg.horizon = value.parse().map_err(|_| err("bad time"))?,
                "delay_max" => cfg.delay_max = value.parse().map_err(|_| err("bad time"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| err("bad seed"))?,
                "max_attempts" => cfg.max_attempts = value.parse().map_err(|_| err("bad count"))?,
                "initial" => {
                    cfg.initial = match value {
                        "false" => InitialValuation::AllFalse,
                        "random" => InitialValuation::Random,
                        _ => return Err(err("initial is `false` or `random`")),
                    }
                }
                "truncate_at_verdict" => {
                    cfg.truncate_at_verdict = parse_bool(value).ok_or_else(|| err("expected true or false"))?;
                }
                "reject_initial_verdicts" => {
                    cfg.reject_initial_verdicts = parse_bool(value).ok_or_else(|| err("expected true or false"))?;
                }
                "output" => cfg.output = Some(value.to_string()),
                _ => return Err(err(&format!("unknown key `{key}`"))),
            }
        }
        let mut properties = families.unwrap_or_default();
        match (formula, props) {
            (Some((_, formula)), Some(props)) => properties.push(PropertySpec::Custom { formula, props }),
            (Some((line, _)), None) => {
                return Err(ExperimentError::Config { line, msg: "`formula` needs `props`".into() });
            }
            (None, Some(_)) => return Err(ExperimentError::Invalid("`props` without `formula`".into())),
            (None, None) => {}
        }
        if !properties.is_empty() {
            cfg.properties = properties;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Invalid(m.to_string()));
        if self.properties.is_empty() {
            return bad("no properties");
        }
        if self.traces_per_mu == 0 {
            return bad("traces_per_mu must be positive");
        }
        if self.k.contains(&0) {
            return bad("k must be at least 1");
        }
        if self.horizon == Time::ZERO {
            return bad("horizon must be positive");
        }
        if self.mu.is_empty() || self.mu.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return bad("mu values must be positive");
        }
        if self.outcomes.is_empty() {
            return bad("no outcomes");
        }
        Ok(())
    }

    /// Every property instance in campaign order.
    pub fn instances(&self) -> Result<Vec<Property>, ExperimentError> {
        let mut out = Vec::new();
        for spec in &self.properties {
            match spec {
                PropertySpec::Family(f) if f.has_k() => out.extend(self.k.iter().map(|&k| family_property(*f, k))),
                PropertySpec::Family(f) => out.push(family_property(*f, 0)),
                PropertySpec::Custom { formula, props } => {
                    let aps = ApTable::from_pairs(props)
                        .map_err(|e| ExperimentError::Property(formula.clone(), e.to_string()))?;
                    out.push(Property::compile(formula.clone(), "custom".into(), None, aps)?);
                }
            }
        }
        Ok(out)
    }
}

/// Seed for one trace attempt; distinct inputs give independent streams.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut h = master ^ 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        h = splitmix(h ^ splitmix(p.wrapping_add(0x632b_e59b_d9b4_e019)));
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub property: String,
    pub family: String,
    pub k: Option<usize>,
    pub outcome: Verdict,
    pub mu: f64,
    pub index: usize,
    pub trace_seed: u64,
    pub delay_seed: u64,
    pub events: usize,
    pub verdict_time: Option<Time>,
    pub central: u64,
    pub decentral: u64,
    pub delegate: u64,
    pub aggregate: u64,
    pub step_start: u64,
    pub alpha: f64,
    /// The decentralized run sent no messages; `alpha` uses a denominator of 1.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BucketReport {
    pub property: String,
    pub outcome: Verdict,
    pub mu: f64,
    pub accepted: usize,
    pub attempts: usize,
    /// The property has no location with this verdict.
    pub infeasible: bool,
}

impl BucketReport {
    pub fn is_short(&self, wanted: usize) -> bool {
        !self.infeasible && self.accepted < wanted
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub property: String,
    pub family: String,
    pub k: Option<usize>,
    pub runs: usize,
    pub min: f64,
    pub avg: f64,
    pub max: f64,
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub runs: Vec<RunRecord>,
    pub buckets: Vec<BucketReport>,
    pub rows: Vec<SummaryRow>,
}

impl CampaignResult {
    pub fn row(&self, property: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.property == property)
    }
}

fn outcome_index(v: Verdict) -> u64 {
    match v {
        Verdict::Top => 0,
        Verdict::Bottom => 1,
        Verdict::Unknown => 2,
    }
}

struct Bucket<'p> {
    prop_index: usize,
    property: &'p Property,
    outcome: Verdict,
    mu_index: usize,
    mu: f64,
}

/// One paired run of both algorithms on `trace`.
pub fn paired_run(
    property: &Property,
    trace: &Trace,
    delays: &DelayModel,
    delay_seed: u64,
) -> Result<(RunResult, RunResult), String> {
    let d = run_simulation(&property.pa, trace, delays, delay_seed, false).map_err(|e| e.to_string())?;
    let c = run_centralized(&property.pa, trace, delays, delay_seed, false).map_err(|e| e.to_string())?;
    Ok((d.result, c.result))
}

/// The trace for one attempt, cut at the oracle's verdict when configured,
/// plus the oracle's result on the full trace.
fn prepare_trace(
    cfg: &ExperimentConfig,
    property: &Property,
    mu: f64,
    seed: u64,
) -> Result<(Trace, RunResult), ExperimentError> {
    let trace = generate_trace(property.aps(), mu, cfg.horizon, seed, cfg.initial);
    let oracle = oracle_evaluate(&property.pa, &trace).map_err(|e| ExperimentError::Run {
        property: property.label.clone(),
        seed,
        msg: e.to_string(),
    })?;
    let trace = match (cfg.truncate_at_verdict, oracle.verdict_time) {
        (true, Some(t)) => trace.truncated(t),
        _ => trace,
    };
    Ok((trace, oracle))
}

/// Reruns one campaign run with event logs kept, returning the trace and
/// the decentralized and centralized outcomes.
pub fn replay(
    cfg: &ExperimentConfig,
    property: &Property,
    record: &RunRecord,
) -> Result<(Trace, SimOutcome, SimOutcome), ExperimentError> {
    let (trace, _) = prepare_trace(cfg, property, record.mu, record.trace_seed)?;
    let err = |msg: String| ExperimentError::Run { property: property.label.clone(), seed: record.trace_seed, msg };
    let delays = DelayModel::Uniform { max: cfg.delay_max };
    let d = run_simulation(&property.pa, &trace, &delays, record.delay_seed, true).map_err(|e| err(e.to_string()))?;
    let c = run_centralized(&property.pa, &trace, &delays, record.delay_seed, true).map_err(|e| err(e.to_string()))?;
    Ok((trace, d, c))
}

fn run_bucket(cfg: &ExperimentConfig, b: &Bucket<'_>) -> Result<(BucketReport, Vec<RunRecord>), ExperimentError> {
    let mut report = BucketReport {
        property: b.property.label.clone(),
        outcome: b.outcome,
        mu: b.mu,
        accepted: 0,
        attempts: 0,
        infeasible: !b.property.can_produce(b.outcome),
    };
    if report.infeasible {
        return Ok((report, Vec::new()));
    }
    let mut accepted = Vec::new();
    while accepted.len() < cfg.traces_per_mu && report.attempts < cfg.max_attempts {
        let seed = derive_seed(
            cfg.seed,
            &[b.prop_index as u64, outcome_index(b.outcome), b.mu_index as u64, report.attempts as u64],
        );
        report.attempts += 1;
        let (trace, oracle) = prepare_trace(cfg, b.property, b.mu, seed)?;
        if oracle.verdict != b.outcome || (cfg.reject_initial_verdicts && oracle.verdict_time == Some(Time::ZERO)) {
            continue;
        }
        accepted.push((seed, trace));
    }
    report.accepted = accepted.len();

    let delays = DelayModel::Uniform { max: cfg.delay_max };
    let records = accepted
        .into_par_iter()
        .enumerate()
        .map(|(index, (trace_seed, trace))| {
            let delay_seed = derive_seed(trace_seed, &[1]);
            let (d, c) = paired_run(b.property, &trace, &delays, delay_seed).map_err(|msg| ExperimentError::Run {
                property: b.property.label.clone(),
                seed: trace_seed,
                msg,
            })?;
            let flagged = d.total_messages == 0;
            Ok(RunRecord {
                property: b.property.label.clone(),
                family: b.property.family.clone(),
                k: b.property.k,
                outcome: b.outcome,
                mu: b.mu,
                index,
                trace_seed,
                delay_seed,
                events: trace.events().len(),
                verdict_time: d.verdict_time,
                central: c.total_messages,
                decentral: d.total_messages,
                delegate: d.message_counts.delegate,
                aggregate: d.message_counts.aggregate,
                step_start: d.message_counts.step_start,
                alpha: c.total_messages as f64 / d.total_messages.max(1) as f64,
                flagged,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok((report, records))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<CampaignResult, ExperimentError> {
    cfg.validate()?;
    let props = cfg.instances()?;
    let mut buckets = Vec::new();
    for (prop_index, property) in props.iter().enumerate() {
        for &outcome in &cfg.outcomes {
            for (mu_index, &mu) in cfg.mu.iter().enumerate() {
                buckets.push(Bucket { prop_index, property, outcome, mu_index, mu });
            }
        }
    }
    let done = buckets.par_iter().map(|b| run_bucket(cfg, b)).collect::<Result<Vec<_>, _>>()?;
    let mut runs = Vec::new();
    let mut reports = Vec::new();
    for (report, records) in done {
        reports.push(report);
        runs.extend(records);
    }
    let rows = summarize(&props, &runs);
    Ok(CampaignResult { runs, buckets: reports, rows })
}

/// Min/avg/max α per property, sorted by average ascending.
pub fn summarize(props: &[Property], runs: &[RunRecord]) -> Vec<SummaryRow> {
    let mut by: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in runs {
        by.entry(r.property.as_str()).or_default().push(r.alpha);
    }
    let mut rows: Vec<SummaryRow> = props
        .iter()
        .filter_map(|p| {
            let a = by.get(p.label.as_str())?;
            let sum: f64 = a.iter().sum();
            Some(SummaryRow {
                property: p.label.clone(),
                family: p.family.clone(),
                k: p.k,
                runs: a.len(),
                min: a.iter().copied().fold(f64::INFINITY, f64::min),
                avg: sum / a.len() as f64,
                max: a.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect();
    rows.sort_by(|x, y| x.avg.total_cmp(&y.avg).then_with(|| x.property.cmp(&y.property)));
    rows
}

fn opt_time(t: Option<Time>) -> String {
    t.map_or_else(String::new, |t| t.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn runs_csv(runs: &[RunRecord]) -> String {
    let mut s = String::from(
        "property,family,k,outcome,mu,index,trace_seed,delay_seed,events,verdict_time,central,decentral,delegate,aggregate,step_start,alpha,flagged\n",
    );
    for r in runs {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.6},{}",
            csv_field(&r.property),
            r.family,
            r.k.map_or_else(String::new, |k| k.to_string()),
            r.outcome.ascii(),
            r.mu,
            r.index,
            r.trace_seed,
            r.delay_seed,
            r.events,
            opt_time(r.verdict_time),
            r.central,
            r.decentral,
            r.delegate,
            r.aggregate,
            r.step_start,
            r.alpha,
            r.flagged
        );
    }
    s
}

pub fn buckets_csv(buckets: &[BucketReport]) -> String {
    let mut s = String::from("property,outcome,mu,accepted,attempts,infeasible\n");
    for b in buckets {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            csv_field(&b.property),
            b.outcome.ascii(),
            b.mu,
            b.accepted,
            b.attempts,
            b.infeasible
        );
    }
    s
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("property,runs,min_alpha,avg_alpha,max_alpha\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{:.3},{:.3},{:.3}", csv_field(&r.property), r.runs, r.min, r.avg, r.max);
    }
    s
}

pub fn render_table(rows: &[SummaryRow]) -> String {
    let w = rows.iter().map(|r| r.property.chars().count()).max().unwrap_or(0).max("Property".len());
    let mut s = format!("{:<w$}  {:>8}  {:>8}  {:>8}\n", "Property", "Min α", "Avg α", "Max α");
    for r in rows {
        let pad = w - r.property.chars().count();
        let _ = writeln!(s, "{}{}  {:>8.3}  {:>8.3}  {:>8.3}", r.property, " ".repeat(pad), r.min, r.avg, r.max);
    }
    s
}
