mod config;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ltlmon::intervention::{GuardSession, Strategy};
use ltlmon::ltl::{progress_simplified, ParseError};
use ltlmon::models::measure_labeler_accuracy;
use ltlmon::monitor::F1Report;
use ltlmon::predictive::PatternRegistry;
use ltlmon::synth::{
    self, BatchSpec, CoinJudge, Family, Judge, ModelJudge, OracleJudge, PatternId, SpecLevel, Suite,
};
use ltlmon::trace::{apply_labeler, load_trace, save_trace};
use ltlmon::{
    audit_log, parse, render, score_f1, simplify, verdict_of, Formula, Mode, Monitor, Predictor,
    Style, Trace, TruthAssignment, VerdictReport,
};
use serde::Serialize;
use serde_json::{json, Value};

use config::Config;

#[derive(Parser)]
#[command(
    name = "ltlmon",
    version,
    about = "Runtime LTL monitoring for black-box sequential systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula and print its simplified canonical form and syntax tree.
    Parse { formula: String },
    /// Progress a formula through a sequence of label sets.
    Progress {
        formula: String,
        /// Comma-separated propositions true at one step; repeat per step.
        #[arg(long = "labels", num_args = 1, allow_hyphen_values = true)]
        labels: Vec<String>,
        /// Trace file whose step labels are used after any --labels.
        #[arg(long)]
        steps: Option<PathBuf>,
    },
    /// Print per-step verdicts and residuals for a trace.
    Monitor(TraceArgs),
    /// Check a finished trace; exit 1 if any constraint is violated.
    Audit {
        #[command(flatten)]
        common: TraceArgs,
        /// Recompute every prefix from scratch and compare.
        #[arg(long)]
        cross_check: bool,
        /// Ground-truth report file to score against.
        #[arg(long)]
        f1_against: Option<PathBuf>,
        /// Where to write the verdict reports (defaults to the config's outputs.report).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the risk of each constraint for the step after a trace.
    Predict {
        #[command(flatten)]
        common: TraceArgs,
        /// Input of the next step.
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the primary model under the monitor with the configured intervention.
    Guard {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Synthetic benchmark generation and judge evaluation.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Labeler accuracy against ground-truth labels in trace files.
    Accuracy {
        #[arg(long)]
        config: PathBuf,
        #[arg(required = true)]
        traces: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's mode.
    #[arg(long)]
    mode: Option<Mode>,
    /// Relabel every step even when the trace carries labels.
    #[arg(long)]
    relabel: bool,
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Generate a benchmark file.
    Gen {
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value = "simple")]
        family: Family,
        /// Gaps for the elasticity suite.
        #[arg(long, value_delimiter = ',')]
        gap: Vec<usize>,
        /// Constraint counts for the constraint suite.
        #[arg(long, value_delimiter = ',')]
        constraints: Vec<usize>,
        /// Entity counts for the proposition suite.
        #[arg(long, value_delimiter = ',')]
        entities: Vec<usize>,
        /// Patterns for the spec suite; all seven when omitted.
        #[arg(long, value_delimiter = ',', value_parser = parse_pattern)]
        pattern: Vec<PatternId>,
        /// Overrides the complex-family gap of the constraint suite.
        #[arg(long)]
        complex_gap: Option<usize>,
        #[arg(long, default_value_t = 40)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ask a judge about every case and report accuracy per knob setting.
    Eval {
        #[arg(long)]
        bench: PathBuf,
        /// `oracle`, `coin`, or a model name from --config.
        #[arg(long, default_value = "oracle")]
        judge: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "precise")]
        level: SpecLevel,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_pattern(s: &str) -> Result<PatternId, String> {
    PatternId::TABLE
        .into_iter()
        .find(|p| p.as_str() == s)
        .ok_or_else(|| {
            let names: Vec<&str> = PatternId::TABLE.iter().map(|p| p.as_str()).collect();
            format!(
                "unknown pattern `{s}` (expected one of {})",
                names.join(", ")
            )
        })
}

/// Exit status of a successful command.
enum Status {
    Ok,
    Violations,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violations) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<Status> {
    match cmd {
        Cmd::Parse { formula } => cmd_parse(&formula),
        Cmd::Progress {
            formula,
            labels,
            steps,
        } => cmd_progress(&formula, &labels, steps.as_deref()),
        Cmd::Monitor(args) => cmd_monitor(&args),
        Cmd::Audit {
            common,
            cross_check,
            f1_against,
            out,
        } => cmd_audit(&common, cross_check, f1_against.as_deref(), out),
        Cmd::Predict {
            common,
            input,
            seed,
        } => cmd_predict(&common, &input, seed),
        Cmd::Guard {
            config,
            max_steps,
            seed,
            strategy,
            log,
            trace_out,
            report,
        } => cmd_guard(
            &config,
            max_steps,
            seed,
            strategy,
            GuardOutputs {
                log,
                trace: trace_out,
                report,
            },
        ),
        Cmd::Bench(b) => cmd_bench(b),
        Cmd::Accuracy { config, traces } => cmd_accuracy(&config, &traces),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

fn formula_or_report(text: &str) -> Result<Formula> {
    parse(text).map_err(|e: ParseError| {
        eprintln!("{}", e.caret(text));
        anyhow!(e)
    })
}

fn ast(f: &Formula) -> Value {
    let node = |op: &str, args: &[&Formula]| json!({ "op": op, "args": args.iter().map(|a| ast(a)).collect::<Vec<_>>() });
    match f {
        Formula::True => json!(true),
        Formula::False => json!(false),
        Formula::Prop(p) => json!({ "prop": p.as_ref() }),
        Formula::Not(a) => node("not", &[a]),
        Formula::Next(a) => node("next", &[a]),
        Formula::Eventually(a) => node("eventually", &[a]),
        Formula::Always(a) => node("always", &[a]),
        Formula::And(a, b) => node("and", &[a, b]),
        Formula::Or(a, b) => node("or", &[a, b]),
        Formula::Implies(a, b) => node("implies", &[a, b]),
        Formula::Until(a, b) => node("until", &[a, b]),
    }
}

fn cmd_parse(text: &str) -> Result<Status> {
    let f = formula_or_report(text)?;
    let canonical = simplify(&f);
    eprintln!("{}", render(&canonical, Style::Ascii));
    print_json(&json!({
        "parsed": render(&f, Style::Ascii),
        "canonical": render(&canonical, Style::Ascii),
        "english": render(&canonical, Style::English),
        "ast": ast(&f),
    }))?;
    Ok(Status::Ok)
}

fn label_set(list: &str) -> TruthAssignment {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn residual_text(f: &Formula) -> &'static str {
    match f {
        Formula::True => "True",
        Formula::False => "False",
        _ => "",
    }
}

fn cmd_progress(text: &str, labels: &[String], steps: Option<&Path>) -> Result<Status> {
    let f = formula_or_report(text)?;
    let mut seq: Vec<TruthAssignment> = labels.iter().map(|l| label_set(l)).collect();
    if let Some(p) = steps {
        let trace = load_trace(p)?;
        for l in trace.labels()? {
            seq.push(l.clone());
        }
    }
    let mut residual = simplify(&f);
    let mut out = io::stdout().lock();
    for (i, sigma) in seq.iter().enumerate() {
        residual = progress_simplified(&residual, sigma);
        let verdict = verdict_of(&residual);
        let shown = render(&residual, Style::Ascii);
        writeln!(
            out,
            "{}",
            json!({ "step": i + 1, "labels": sigma, "residual": shown, "verdict": verdict })
        )?;
        let lit = residual_text(&residual);
        eprintln!(
            "step {}: {} / {}",
            i + 1,
            if lit.is_empty() { &shown } else { lit },
            capitalized(verdict.as_str())
        );
        if verdict.is_terminal() {
            break;
        }
    }
    Ok(Status::Ok)
}

fn capitalized(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

/// Trace with labels on every step: existing labels unless `relabel`.
fn labeled_trace(args: &TraceArgs, cfg: &Config) -> Result<Trace> {
    let trace = load_trace(&args.trace)?;
    if !args.relabel && trace.steps.iter().all(|s| s.labels.is_some()) {
        return Ok(trace);
    }
    let labeler = cfg.labeler()?;
    Ok(apply_labeler(&trace, labeler.as_ref(), args.relabel)?)
}

fn cmd_monitor(args: &TraceArgs) -> Result<Status> {
    let cfg = Config::load(&args.config)?;
    let trace = labeled_trace(args, &cfg)?;
    let mut monitor = Monitor::new(&cfg.constraints, args.mode.unwrap_or(cfg.mode))?;
    let mut out = io::stdout().lock();
    for step in &trace.steps {
        let verdicts = monitor.step(step)?;
        let states = monitor.states();
        let row: serde_json::Map<String, Value> = states
            .iter()
            .zip(&verdicts)
            .map(|(s, v)| {
                (
                    s.id().to_string(),
                    json!({ "verdict": v, "residual": render(s.residual(), Style::Ascii) }),
                )
            })
            .collect();
        writeln!(out, "{}", json!({ "t": step.t, "constraints": row }))?;
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct AuditOutput {
    steps: usize,
    violations: usize,
    reports: Vec<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f1: Option<F1Report>,
}

fn cmd_audit(
    args: &TraceArgs,
    cross_check: bool,
    f1_against: Option<&Path>,
    out: Option<PathBuf>,
) -> Result<Status> {
    let cfg = Config::load(&args.config)?;
    let trace = labeled_trace(args, &cfg)?;
    let reports = audit_log(
        &trace,
        &cfg.constraints,
        args.mode.unwrap_or(cfg.mode),
        cross_check,
    )?;
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let f1 = match f1_against {
        Some(p) => {
            let truth: Vec<VerdictReport> = serde_json::from_reader(BufReader::new(
                File::open(p).with_context(|| format!("opening {}", p.display()))?,
            ))
            .with_context(|| format!("reading ground-truth report {}", p.display()))?;
            let f1 = score_f1(&reports, &truth)?;
            eprintln!(
                "pooled F1 {:.4} (precision {:.4}, recall {:.4})",
                f1.pooled.f1, f1.pooled.precision, f1.pooled.recall
            );
            Some(f1)
        }
        None => None,
    };
    if let Some(path) = out.or(cfg.outputs.report.clone()) {
        write_json(&path, &reports)?;
    }
    for r in &reports {
        eprintln!(
            "{}: {} violation(s), {} satisfaction(s)",
            r.constraint, r.violations, r.satisfactions
        );
    }
    print_json(&AuditOutput {
        steps: trace.len(),
        violations,
        reports,
        f1,
    })?;
    Ok(if violations > 0 {
        Status::Violations
    } else {
        Status::Ok
    })
}

fn cmd_predict(args: &TraceArgs, input: &str, seed: Option<u64>) -> Result<Status> {
    let cfg = Config::load(&args.config)?;
    let trace = labeled_trace(args, &cfg)?;
    let mut monitor = Monitor::new(&cfg.constraints, args.mode.unwrap_or(cfg.mode))?;
    for step in &trace.steps {
        monitor.step(step)?;
    }
    let model = cfg.model(cfg.primary_name()?)?;
    let labeler = cfg.labeler()?;
    let mut predictor =
        Predictor::new(model.as_ref(), labeler.as_ref(), cfg.policy.k, cfg.policy.m);
    predictor.budget = cfg.policy.budget;
    let pattern = PatternRegistry::default().get(&cfg.policy.pattern)?;
    let risks = predictor.estimate(
        monitor.states(),
        &trace.steps,
        input,
        &pattern,
        seed.unwrap_or(cfg.seed),
    )?;
    for r in &risks {
        eprintln!(
            "{}: {:.4} ({} of {})",
            r.constraint, r.probability, r.matches, r.m
        );
    }
    print_json(&risks)?;
    Ok(Status::Ok)
}

struct GuardOutputs {
    log: Option<PathBuf>,
    trace: Option<PathBuf>,
    report: Option<PathBuf>,
}

fn cmd_guard(
    path: &Path,
    max_steps: Option<usize>,
    seed: Option<u64>,
    strategy: Option<Strategy>,
    outs: GuardOutputs,
) -> Result<Status> {
    let mut cfg = Config::load(path)?;
    if let Some(s) = strategy {
        cfg.policy.strategy = s;
        cfg.validate()?;
    }
    let seed = seed.unwrap_or(cfg.seed);
    let max_steps = max_steps.unwrap_or(cfg.max_steps);
    let stop = cfg.stop_token()?;
    let model = cfg.model(cfg.primary_name()?)?;
    let substitute = match &cfg.policy.substitute_model {
        Some(name) => Some(cfg.model(name)?),
        None => None,
    };
    let labeler = cfg.labeler()?;
    let log_path = outs.log.or(cfg.outputs.log.clone());
    let trace_path = outs.trace.or(cfg.outputs.trace.clone());
    let report_path = outs.report.or(cfg.outputs.report.clone());

    let mut session = GuardSession::new(
        model.as_ref(),
        substitute.as_deref(),
        labeler.as_ref(),
        &cfg.constraints,
        cfg.policy.clone(),
        cfg.mode,
        seed,
    )?;
    let mut log = match &log_path {
        Some(p) => Some(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => None,
    };
    let mut outcomes = Vec::new();
    let mut failure = None;
    for _ in 0..max_steps {
        let t = session.history().len() + 1;
        match session.guard_step(cfg.inputs.input_at(t)) {
            Ok(o) => {
                if let Some(w) = log.as_mut() {
                    serde_json::to_writer(&mut *w, &o)?;
                    writeln!(w)?;
                }
                let done = o.final_output == stop;
                outcomes.push(o);
                if done {
                    break;
                }
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    // flush whatever was completed, also on failure
    if let Some(mut w) = log {
        w.flush()?;
    }
    let trace = session.trace();
    let reports = session.reports();
    if let Some(p) = &trace_path {
        save_trace(&trace, p)?;
    }
    if let Some(p) = &report_path {
        write_json(p, &reports)?;
    }
    if let Some(e) = failure {
        bail!(e);
    }
    let steps = outcomes.len();
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let interventions = outcomes.iter().filter(|o| o.intervened).count();
    let rate = if steps == 0 {
        0.0
    } else {
        violations as f64 / steps as f64
    };
    eprintln!("{steps} step(s), {violations} violation(s), violation rate {rate:.4}, {interventions} intervention(s)");
    print_json(&json!({
        "steps": steps,
        "violations": violations,
        "violation_rate": rate,
        "interventions": interventions,
        "reports": reports,
    }))?;
    Ok(Status::Ok)
}

fn cmd_bench(cmd: BenchCmd) -> Result<Status> {
    match cmd {
        BenchCmd::Gen {
            suite,
            family,
            gap,
            constraints,
            entities,
            pattern,
            complex_gap,
            count,
            seed,
            out,
        } => {
            let values = match suite {
                Suite::Elasticity => gap,
                Suite::Constraint => constraints,
                Suite::Proposition => entities,
                Suite::Spec => Vec::new(),
            };
            let spec = BatchSpec {
                suite,
                family: Some(family),
                values,
                patterns: pattern,
                count,
                seed,
                gap: complex_gap,
            };
            let cases = synth::generate_batch(&spec)?;
            match out {
                Some(p) => synth::write_bench(
                    BufWriter::new(
                        File::create(&p).with_context(|| format!("creating {}", p.display()))?,
                    ),
                    &cases,
                )?,
                None => synth::write_bench(io::stdout().lock(), &cases)?,
            }
            let satisfied = cases.iter().flat_map(|c| &c.truth).filter(|t| **t).count();
            let total: usize = cases.iter().map(|c| c.truth.len()).sum();
            eprintln!(
                "{} case(s), {satisfied} of {total} constraint(s) satisfied",
                cases.len()
            );
            Ok(Status::Ok)
        }
        BenchCmd::Eval {
            bench,
            judge,
            config,
            level,
            seed,
            out,
        } => {
            let file =
                File::open(&bench).with_context(|| format!("opening {}", bench.display()))?;
            let cases = synth::read_bench(BufReader::new(file))?;
            let judge: Box<dyn Judge> = match judge.as_str() {
                "oracle" => Box::new(OracleJudge),
                "coin" => Box::new(CoinJudge { seed }),
                name => {
                    let cfg = Config::load(
                        config
                            .as_deref()
                            .ok_or_else(|| anyhow!("judge `{name}` needs --config"))?,
                    )?;
                    Box::new(ModelJudge::new(cfg.model(name)?, seed))
                }
            };
            let report = synth::eval_judge(&cases, judge.as_ref(), level)?;
            eprintln!(
                "{:<40} {:>9} {:>9} {:>7} {:>9}",
                "knobs", "accuracy", "+/-", "n", "unparsed"
            );
            for (k, a) in &report.per_knob {
                eprintln!(
                    "{k:<40} {:>9.4} {:>9.4} {:>7} {:>9}",
                    a.accuracy, a.half_width, a.total, a.parse_failures
                );
            }
            eprintln!(
                "{:<40} {:>9.4} {:>9.4} {:>7} {:>9}",
                "overall",
                report.overall.accuracy,
                report.overall.half_width,
                report.overall.total,
                report.overall.parse_failures
            );
            if let Some(p) = out {
                write_json(&p, &report)?;
            }
            print_json(&report)?;
            Ok(Status::Ok)
        }
    }
}

fn cmd_accuracy(config: &Path, traces: &[PathBuf]) -> Result<Status> {
    let cfg = Config::load(config)?;
    let labeler = cfg.labeler()?;
    let corpus = traces
        .iter()
        .map(load_trace)
        .collect::<Result<Vec<_>, _>>()?;
    let report = measure_labeler_accuracy(labeler.as_ref(), &corpus)?;
    eprintln!(
        "overall accuracy {:.4} +/- {:.4}",
        report.overall.accuracy, report.overall.half_width
    );
    print_json(&report)?;
    Ok(Status::Ok)
}
