//! Command-line driver.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails (the
//! counterexample is part of the report), 2 for usage, parse, cap and budget
//! errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constructions::{
    census, gs_counterexample_two_alternatives, run_suite, CensusOptions, CensusReport, Filter, FilterSet, LemmaId,
    Mode, RuleCertificate, VerificationReport,
};
use crate::domain::Dims;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::report::{
    io_error, write_census_csv, write_classification_csv, write_lemmas_csv, ClassificationReport, Envelope,
    InspectReport, RunConfig,
};
use crate::rules::{parse_rule, Rule};

const DEFAULT_AGENTS: usize = 2;
const DEFAULT_ALTS: usize = 3;

#[derive(Debug, Parser)]
#[command(name = "scf-verify", version, about = "Exhaustive checks for finite social choice rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split every profile of a rule into manipulable and dictatorial.
    Classify(ClassifyArgs),
    /// Count tops-only rules by axiom and compare the strategy-proof ones with the dictatorships.
    Census(CensusArgs),
    /// Run the per-result checks.
    Lemmas(LemmasArgs),
    /// Print a rule's canonical form and its axioms.
    Inspect(InspectArgs),
    /// Certify majority over two alternatives.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeKind {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Args)]
struct Common {
    /// Number of agents (default 2).
    #[arg(long)]
    agents: Option<usize>,
    /// Number of alternatives (default 3).
    #[arg(long)]
    alts: Option<usize>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print elapsed time to standard error.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct ModeArgs {
    #[arg(long, value_enum, default_value_t = ModeKind::Exhaustive)]
    mode: ModeKind,
    /// Required in sampled mode.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
}

impl ModeArgs {
    fn resolve(&self) -> Result<Mode> {
        match self.mode {
            ModeKind::Exhaustive => Ok(Mode::Exhaustive),
            ModeKind::Sampled => {
                let seed = self
                    .seed
                    .ok_or_else(|| Error::Config("sampled mode needs --seed".into()))?;
                if self.samples == 0 {
                    return Err(Error::Config("--samples must be positive".into()));
                }
                Ok(Mode::Sampled {
                    samples: self.samples,
                    seed,
                })
            }
        }
    }
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: Common,
    /// Rule string, e.g. DICT:0 or TOPS:n=2,m=3:000111222.
    #[arg(long)]
    rule: String,
    /// Include the profile sets as hex bitsets.
    #[arg(long)]
    sets: bool,
}

#[derive(Debug, Args)]
struct CensusArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    mode: ModeArgs,
    /// unanimous, efficient, strategy-proof or dictatorial; repeatable.
    #[arg(long = "filter")]
    filters: Vec<String>,
    /// Keep one row per rule.
    #[arg(long)]
    verbose: bool,
}

#[derive(Debug, Args)]
struct LemmasArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    mode: ModeArgs,
    /// Check ids: L1 L3 L4 L5 C1 C2 R1 R2 THM.
    ids: Vec<String>,
    /// `all` runs every check.
    #[arg(long)]
    suite: Option<String>,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    rule: String,
}

#[derive(Debug, Args)]
struct CounterexampleArgs {
    #[command(flatten)]
    common: Common,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(passed) => {
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// 1 for failed checks, 2 for everything the caller got wrong.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ClassificationConflict { .. } => 1,
        _ => 2,
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Classify(a) => &a.common,
        Command::Census(a) => &a.common,
        Command::Lemmas(a) => &a.common,
        Command::Inspect(a) => &a.common,
        Command::Counterexample(a) => &a.common,
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    // `Limits::current` falls back to defaults on malformed variables.
    let limits = Limits::from_env()?;
    let c = common(&cli.command);
    if c.workers == Some(0) {
        return Err(Error::Config("--workers must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let started = Instant::now();
    let (bytes, passed) = pool.install(|| produce(&cli.command, limits))?;
    if c.timing {
        let _ = writeln!(err, "elapsed: {} ms", started.elapsed().as_millis());
    }
    match &c.out {
        Some(path) => fs::write(path, &bytes).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        None => out.write_all(&bytes).map_err(io_error)?,
    }
    Ok(passed)
}

fn dims_or_default(agents: Option<usize>, alts: Option<usize>) -> Result<Dims> {
    Dims::new(agents.unwrap_or(DEFAULT_AGENTS), alts.unwrap_or(DEFAULT_ALTS))
}

/// Table forms carry their own dimensions, which must agree with any flag
/// given; closed forms take them from the flags.
fn rule_from_args(text: &str, agents: Option<usize>, alts: Option<usize>) -> Result<Rule> {
    if text.starts_with("TOPS:") || text.starts_with("FULL:") {
        let rule = parse_rule(text, None)?;
        let d = rule.dims();
        if agents.is_some_and(|n| n != d.agents) || alts.is_some_and(|m| m != d.alts) {
            return Err(Error::parse(5, format!("rule declares {d}, which disagrees with the flags")));
        }
        Ok(rule)
    } else {
        parse_rule(text, Some(dims_or_default(agents, alts)?))
    }
}

fn config(command: &str, c: &Common, limits: Limits) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        agents: c.agents,
        alts: c.alts,
        rule: None,
        filters: Vec::new(),
        mode: None,
        workers: c.workers,
        limits,
    }
}

fn json<T: Serialize>(cfg: &RunConfig, value: &T) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    Envelope::new(cfg, value).write_json(&mut buf)?;
    Ok(buf)
}

fn produce(cmd: &Command, limits: Limits) -> Result<(Vec<u8>, bool)> {
    match cmd {
        Command::Classify(a) => {
            let rule = rule_from_args(&a.rule, a.common.agents, a.common.alts)?;
            let mut cfg = config("classify", &a.common, limits);
            cfg.agents = Some(rule.dims().agents);
            cfg.alts = Some(rule.dims().alts);
            cfg.rule = Some(rule.to_string());
            let report = ClassificationReport::build(&rule, a.sets || a.common.format == Format::Csv)?;
            let bytes = match a.common.format {
                Format::Json => json(&cfg, &report)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_classification_csv(&report, &mut buf)?;
                    buf
                }
                Format::Text => classification_text(&report),
            };
            Ok((bytes, true))
        }
        Command::Census(a) => {
            let dims = dims_or_default(a.common.agents, a.common.alts)?;
            let mode = a.mode.resolve()?;
            let filters = FilterSet::new(
                a.filters
                    .iter()
                    .map(|f| f.parse::<Filter>())
                    .collect::<Result<Vec<_>>>()?,
            );
            let mut cfg = config("census", &a.common, limits);
            cfg.agents = Some(dims.agents);
            cfg.alts = Some(dims.alts);
            cfg.mode = Some(mode);
            cfg.filters = filters.filters().iter().map(|f| f.to_string()).collect();
            let report = census(dims, mode, &filters, CensusOptions { verbose: a.verbose })?;
            let bytes = match a.common.format {
                Format::Json => json(&cfg, &report)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_census_csv(&report, &mut buf)?;
                    buf
                }
                Format::Text => census_text(&report),
            };
            Ok((bytes, report.theorem_holds))
        }
        Command::Lemmas(a) => {
            let dims = dims_or_default(a.common.agents, a.common.alts)?;
            let mode = a.mode.resolve()?;
            let ids = lemma_ids(&a.ids, a.suite.as_deref())?;
            let mut cfg = config("lemmas", &a.common, limits);
            cfg.agents = Some(dims.agents);
            cfg.alts = Some(dims.alts);
            cfg.mode = Some(mode);
            let reports = run_suite(&ids, dims, mode)?;
            let passed = reports.iter().all(|r| r.passed());
            let bytes = match a.common.format {
                Format::Json => json(&cfg, &reports)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_lemmas_csv(&reports, &mut buf)?;
                    buf
                }
                Format::Text => lemmas_text(&reports)?,
            };
            Ok((bytes, passed))
        }
        Command::Inspect(a) => {
            let rule = rule_from_args(&a.rule, a.common.agents, a.common.alts)?;
            let mut cfg = config("inspect", &a.common, limits);
            cfg.agents = Some(rule.dims().agents);
            cfg.alts = Some(rule.dims().alts);
            cfg.rule = Some(rule.to_string());
            let report = InspectReport::build(&rule)?;
            let bytes = match a.common.format {
                Format::Json => json(&cfg, &report)?,
                Format::Csv => certificate_csv(&report.certificate)?,
                Format::Text => inspect_text(&report),
            };
            Ok((bytes, true))
        }
        Command::Counterexample(a) => {
            if a.common.alts.is_some_and(|m| m != 2) {
                return Err(Error::Config("the counterexample lives at --alts 2".into()));
            }
            let agents = a.common.agents.unwrap_or(3);
            let mut cfg = config("counterexample", &a.common, limits);
            cfg.agents = Some(agents);
            cfg.alts = Some(2);
            let cert = gs_counterexample_two_alternatives(agents)?;
            cfg.rule = Some(cert.rule.to_string());
            let passed = cert.refutes_dictatorship() && cert.validate()?;
            let bytes = match a.common.format {
                Format::Json => json(&cfg, &cert)?,
                Format::Csv => certificate_csv(&cert)?,
                Format::Text => certificate_text(&cert),
            };
            Ok((bytes, passed))
        }
    }
}

fn lemma_ids(ids: &[String], suite: Option<&str>) -> Result<Vec<LemmaId>> {
    match suite {
        Some(s) if s.eq_ignore_ascii_case("all") => {
            if !ids.is_empty() {
                return Err(Error::Config("give either --suite all or check ids, not both".into()));
            }
            Ok(LemmaId::ALL.to_vec())
        }
        Some(s) => Err(Error::Config(format!("unknown suite `{s}` (only `all`)"))),
        None if ids.is_empty() => Err(Error::Config("name the checks to run or pass --suite all".into())),
        None => ids.iter().map(|s| s.parse()).collect(),
    }
}

fn classification_text(r: &ClassificationReport) -> Vec<u8> {
    let mut s = String::new();
    s += &format!("rule: {}\n", r.rule);
    s += &format!("agents: {}  alternatives: {}  profiles: {}\n", r.agents, r.alts, r.total);
    s += &format!("unanimous: {}  tops-only: {}\n", r.unanimous, r.tops_only);
    match r.m_count {
        Some(m) => s += &format!("manipulable: {m}\n"),
        None => s += "manipulable: undefined (not tops-only)\n",
    }
    s += &format!("dictatorial: {}\n", r.d_count);
    if let Some(ex) = &r.first_manipulable {
        let w = &ex.witness;
        s += &format!(
            "first manipulable: {} (agent {} at {} reports {}: {} -> {})\n",
            ex.profile, w.agent, w.profile, w.misreport, w.sincere_outcome, w.improved_outcome
        );
    }
    for n in &r.notes {
        s += &format!("note: {n}\n");
    }
    s.into_bytes()
}

fn census_text(r: &CensusReport) -> Vec<u8> {
    let c = &r.counts;
    let mut s = format!("census n={} m={} {}\n", r.agents, r.alts, r.mode);
    s += &format!("total: {}\nunanimous: {}\ntops-efficient: {}\nstrategy-proof: {}\ndictatorial: {}\n",
        c.total, c.unanimous, c.tops_efficient, c.strategy_proof, c.dictatorial);
    for rule in &r.strategy_proof_rules {
        s += &format!("strategy-proof rule: {rule}\n");
    }
    s += &format!("theorem holds: {}\n", r.theorem_holds);
    if let Some(cert) = &r.first_counterexample {
        s += &format!("counterexample: {}\n", cert.rule);
    }
    s.into_bytes()
}

fn lemmas_text(reports: &[VerificationReport]) -> Result<Vec<u8>> {
    let mut s = String::new();
    for r in reports {
        s += &format!(
            "{} {} n={} m={} {}: {}\n",
            if r.passed() { "PASS" } else { "FAIL" },
            r.lemma,
            r.scope.agents,
            r.scope.alts,
            r.scope.mode,
            r.statement
        );
        if let Some(c) = &r.counterexample {
            let j = serde_json::to_string(c).map_err(|e| Error::Config(e.to_string()))?;
            s += &format!("  counterexample: {j}\n");
        }
    }
    Ok(s.into_bytes())
}

fn certificate_text(c: &RuleCertificate) -> Vec<u8> {
    let mut s = format!("rule: {} (n={}, m={})\n", c.rule, c.agents, c.alts);
    s += &format!(
        "unanimous: {}\nstrategy-proof: {}\ntops-only: {}\nefficient: {}\n",
        c.unanimous, c.strategy_proof, c.tops_only, c.efficient
    );
    match c.dictator {
        Some(i) => s += &format!("dictator: agent {i}\n"),
        None => {
            s += "dictator: none\n";
            for w in &c.non_dictator_witnesses {
                s += &format!("  agent {} loses at {} (outcome {})\n", w.agent, w.profile, w.outcome);
            }
        }
    }
    s.into_bytes()
}

fn inspect_text(r: &InspectReport) -> Vec<u8> {
    let mut s = format!("kind: {}\n", r.kind);
    if let Some(t) = &r.tops_table {
        s += &format!("tops table: {t}\n");
    }
    let mut out = s.into_bytes();
    out.extend(certificate_text(&r.certificate));
    out
}

fn certificate_csv(c: &RuleCertificate) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let e = |e: csv::Error| Error::Config(format!("csv: {e}"));
        w.write_record(["rule", "agents", "alts", "unanimous", "strategy_proof", "tops_only", "efficient", "dictator"])
            .map_err(e)?;
        w.write_record([
            c.rule.to_string(),
            c.agents.to_string(),
            c.alts.to_string(),
            c.unanimous.to_string(),
            c.strategy_proof.to_string(),
            c.tops_only.to_string(),
            c.efficient.to_string(),
            c.dictator.map(|i| i.to_string()).unwrap_or_default(),
        ])
        .map_err(e)?;
        w.flush().map_err(io_error)?;
    }
    Ok(buf)
}
