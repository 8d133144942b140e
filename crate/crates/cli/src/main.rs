//! `ptakit`: command-line frontend.
//!
//! Exit status: 0 when the question was answered, 2 when the answer is
//! unknown or an exploration was truncated, 1 on usage or model errors.

mod output;
mod valuation;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use ptakit::concrete::{
    build_trace_automaton, model_language_included, trace_automaton_dot, trace_automaton_json,
    trace_sets_equal, BuildOptions, ConcreteError, LanguageSemantics,
};
use ptakit::constraints::{
    disjunctive_json, polyhedron_json, rational_json, render_disjunctive, Rational,
};
use ptakit::gadgets::{
    compile, one_location_transform, validate_encoding, CounterMachine, EncodingKind,
    ValidationOptions,
};
use ptakit::model::{parse, render, PtaModel};
use ptakit::symbolic::{
    explore, one_clock_state_bound, zone_graph_dot, zone_graph_json, ExploreOptions,
};
use ptakit::synthesis::{
    preserve_1c, preserve_general, preserve_lu_1ip, preserve_robust_1c, tps, verdict_json, Answer,
    Question, SOUND_NOT_COMPLETE,
};

use output::Format;
use valuation::parse_valuation;

#[derive(Parser, Debug)]
#[command(name = "ptakit", version, about = "Parametric timed automata toolkit")]
struct Cli {
    /// Output format for reports.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for the sampling oracles.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct Caps {
    /// Exploration depth cap.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    depth: Option<u64>,
    /// State cap.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    states: Option<u64>,
}

impl Caps {
    fn explore(self) -> ExploreOptions {
        let d = ExploreOptions::default();
        ExploreOptions {
            depth: self.depth.map(|x| x as usize).or(d.depth),
            state_cap: self.states.map(|x| x as usize).or(d.state_cap),
        }
    }

    fn build(self) -> BuildOptions {
        let d = BuildOptions::default();
        BuildOptions {
            depth: self.depth.map(|x| x as usize),
            state_cap: self.states.map_or(d.state_cap, |x| x as usize),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum QuestionArg {
    Trace,
    Language,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SemanticsArg {
    Maximal,
    PrefixClosed,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EncodingArg {
    Basic,
    Wrapper,
    Robust,
    Bounded,
    OneLocation,
}

impl EncodingArg {
    fn kind(self) -> EncodingKind {
        match self {
            EncodingArg::Basic => EncodingKind::Basic,
            EncodingArg::Wrapper => EncodingKind::Wrapper,
            EncodingArg::Robust => EncodingKind::Robust,
            EncodingArg::Bounded => EncodingKind::BoundedTime,
            EncodingArg::OneLocation => EncodingKind::OneLocation,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classification report.
    Check { model: PathBuf },
    /// Parametric zone graph.
    Explore {
        model: PathBuf,
        #[command(flatten)]
        caps: Caps,
        /// Write the graph in DOT to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Trace-preservation synthesis around a valuation.
    Tps {
        model: PathBuf,
        #[arg(long = "val", default_value = "")]
        val: String,
        #[command(flatten)]
        caps: Caps,
        /// Compare the result with the trace oracle at this many sampled valuations.
        #[arg(long, default_value_t = 0)]
        oracle: usize,
    },
    /// Is there another valuation with the same traces or language?
    Preserve {
        model: PathBuf,
        #[arg(long = "val", default_value = "")]
        val: String,
        #[arg(long, value_enum, default_value_t = QuestionArg::Trace)]
        question: QuestionArg,
        /// Ask for a witness whose segment to the valuation also preserves.
        #[arg(long)]
        robust: bool,
        #[command(flatten)]
        caps: Caps,
    },
    /// Untimed language inclusion between two valuated models.
    Include {
        a: PathBuf,
        b: PathBuf,
        #[arg(long = "valA", default_value = "")]
        val_a: String,
        #[arg(long = "valB", default_value = "")]
        val_b: String,
        #[arg(long, value_enum, default_value_t = SemanticsArg::Maximal)]
        semantics: SemanticsArg,
        /// Check both directions.
        #[arg(long)]
        both: bool,
        #[command(flatten)]
        caps: Caps,
    },
    /// Trace automaton of a valuated model.
    Traceset {
        model: PathBuf,
        #[arg(long = "val", default_value = "")]
        val: String,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[command(flatten)]
        caps: Caps,
    },
    /// Compile a two-counter machine.
    #[command(name = "gen-2cm")]
    Gen2cm {
        machine: PathBuf,
        #[arg(long, value_enum)]
        encoding: EncodingArg,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Replay the machine for `N C`: configurations and counter bound.
        #[arg(long, num_args = 2, value_names = ["N", "C"])]
        validate: Option<Vec<usize>>,
    },
    /// Collapse a model into one location.
    #[command(name = "one-location")]
    OneLocation {
        model: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
}

/// A report plus whether it is conclusive.
struct Outcome {
    report: Value,
    conclusive: bool,
}

impl Outcome {
    fn done(report: Value) -> Self {
        Outcome {
            report,
            conclusive: true,
        }
    }

    fn maybe(report: Value, conclusive: bool) -> Self {
        Outcome { report, conclusive }
    }
}

fn load(path: &Path) -> Result<PtaModel> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let m = parse(&text).with_context(|| format!("{}", path.display()))?;
    m.validate()
        .with_context(|| format!("{}", path.display()))?;
    Ok(m)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn header(command: &str, report: Value) -> Value {
    let mut out = json!({ "schema": 1, "command": command });
    if let Value::Object(fields) = report {
        out.as_object_mut().expect("object").extend(fields);
    }
    out
}

fn valuation_json(m: &PtaModel, v: &[Rational]) -> Value {
    Value::Object(
        m.params
            .iter()
            .cloned()
            .zip(v.iter().map(rational_json))
            .collect(),
    )
}

fn check(path: &Path) -> Result<Outcome> {
    let m = load(path)?;
    let class = m.classify();
    let mut report = serde_json::to_value(&class)?;
    let extra = json!({
        "model": m.name,
        "clocks": class.clock_count,
        "params": class.parameter_count,
        "locations": m.locations.len(),
        "edges": m.edges.len(),
        "lu_class": class.lu.label(),
        "one_clock_state_bound": class.one_clock().then(|| one_clock_state_bound(&m).to_string()),
    });
    report
        .as_object_mut()
        .expect("object")
        .extend(extra.as_object().expect("object").clone());
    Ok(Outcome::done(report))
}

fn explore_cmd(path: &Path, caps: Caps, dot: Option<&Path>) -> Result<Outcome> {
    let m = load(path)?;
    let g = explore(&m, caps.explore())?;
    if let Some(f) = dot {
        write_file(f, &zone_graph_dot(&g, &m))?;
    }
    let complete = g.complete();
    Ok(Outcome::maybe(zone_graph_json(&g, &m), complete))
}

/// Largest constant in the model, for the oracle's sampling box.
fn max_constant(m: &PtaModel) -> i64 {
    use num_traits::{Signed, ToPrimitive};
    m.atoms()
        .map(|a| a.constant().abs().to_i64().unwrap_or(i64::MAX))
        .max()
        .unwrap_or(0)
}

/// Half-integer valuations in `[0, max + 2]` per parameter.
fn sample(m: &PtaModel, rng: &mut StdRng) -> Vec<Rational> {
    let top = 2 * (max_constant(m).saturating_add(2));
    m.params
        .iter()
        .map(|_| Rational::new(rng.gen_range(0..=top).into(), 2.into()))
        .collect()
}

fn tps_cmd(path: &Path, val: &str, caps: Caps, oracle: usize, seed: u64) -> Result<Outcome> {
    let m = load(path)?;
    let v = parse_valuation(&m, val)?;
    let r = tps(&m, &v, caps.explore())?;
    let pnames = m.param_names();
    let mut report = json!({
        "valuation": valuation_json(&m, &v),
        "k_good": polyhedron_json(&r.k_good, &pnames),
        "k_bad": disjunctive_json(&r.k_bad, &pnames),
        "result": disjunctive_json(&r.result, &pnames),
        "result_text": render_disjunctive(&r.result, &pnames),
        "terminated": r.terminated,
        "states": r.states_explored,
        "complete_for_model": r.complete_for_model,
    });
    if !r.terminated {
        report["caveat"] = json!("exploration truncated; the result is not an answer");
    } else if !r.complete_for_model {
        report["caveat"] = json!(SOUND_NOT_COMPLETE);
    }
    if oracle > 0 && r.terminated {
        let mut rng = StdRng::seed_from_u64(seed);
        let opts = caps.build();
        let reference = build_trace_automaton(&m.valuate(&v)?, opts)?;
        let (mut unsound, mut incomplete, mut skipped) = (Vec::new(), Vec::new(), 0usize);
        for _ in 0..oracle {
            let w = sample(&m, &mut rng);
            let other = build_trace_automaton(&m.valuate(&w)?, opts)?;
            if other.truncated || reference.truncated {
                skipped += 1;
                continue;
            }
            let equal = trace_sets_equal(&reference, &other)?.equal;
            match (r.result.contains_point(&w), equal) {
                (true, false) => unsound.push(valuation_json(&m, &w)),
                (false, true) => incomplete.push(valuation_json(&m, &w)),
                _ => {}
            }
        }
        report["oracle"] = json!({
            "samples": oracle,
            "skipped": skipped,
            "unsound": unsound,
            "missed": incomplete,
        });
    }
    Ok(Outcome::maybe(report, r.terminated))
}

fn preserve_cmd(
    path: &Path,
    val: &str,
    q: QuestionArg,
    robust: bool,
    caps: Caps,
) -> Result<Outcome> {
    let m = load(path)?;
    let v = parse_valuation(&m, val)?;
    let question = match q {
        QuestionArg::Trace => Question::Trace,
        QuestionArg::Language => Question::Language,
    };
    let class = m.classify();
    let lu_1ip = m.params.len() == 1
        && class.deterministic
        && (class.lu.is_l() || class.lu.is_u())
        && v[0].is_integer()
        && !robust;
    let (method, mut verdict) = if class.one_clock() {
        if robust {
            ("robust_1c", preserve_robust_1c(&m, &v)?)
        } else {
            ("1c", preserve_1c(&m, &v, question)?)
        }
    } else if lu_1ip {
        (
            "lu_1ip",
            preserve_lu_1ip(&m, &v[0], question, caps.build())?,
        )
    } else {
        let mut verdict = preserve_general(&m, &v, question, caps.explore(), robust)?;
        verdict.caveat = Some(SOUND_NOT_COMPLETE.into());
        ("tps", verdict)
    };
    verdict.question = question;
    let mut report = verdict_json(&verdict, &m.param_names());
    // timings would make runs differ byte for byte
    if let Some(stats) = report.get_mut("stats").and_then(Value::as_object_mut) {
        stats.remove("time_ms");
    }
    report["method"] = json!(method);
    report["valuation"] = valuation_json(&m, &v);
    Ok(Outcome::maybe(report, verdict.answer != Answer::Unknown))
}

fn include_cmd(
    a: &Path,
    b: &Path,
    val_a: &str,
    val_b: &str,
    sem: SemanticsArg,
    both: bool,
    caps: Caps,
) -> Result<Outcome> {
    let (ma, mb) = (load(a)?, load(b)?);
    let (va, vb) = (parse_valuation(&ma, val_a)?, parse_valuation(&mb, val_b)?);
    let (ca, cb) = (ma.valuate(&va)?, mb.valuate(&vb)?);
    let semantics = match sem {
        SemanticsArg::Maximal => LanguageSemantics::Maximal,
        SemanticsArg::PrefixClosed => LanguageSemantics::PrefixClosed,
    };
    let mut pairs = vec![("a_in_b", &ca, &cb)];
    if both {
        pairs.push(("b_in_a", &cb, &ca));
    }
    let mut report = json!({
        "semantics": match semantics {
            LanguageSemantics::Maximal => "maximal",
            LanguageSemantics::PrefixClosed => "prefix-closed",
        },
    });
    for (key, x, y) in pairs {
        let entry = match model_language_included(x, y, semantics, caps.build()) {
            Ok(inc) => json!({
                "included": inc.included,
                "witness": inc.witness,
            }),
            Err(ConcreteError::Truncated) => {
                report[key] = json!({ "included": null, "truncated": true });
                return Ok(Outcome::maybe(report, false));
            }
            Err(e) => return Err(e.into()),
        };
        report[key] = entry;
    }
    Ok(Outcome::done(report))
}

fn traceset_cmd(path: &Path, val: &str, dot: Option<&Path>, caps: Caps) -> Result<Outcome> {
    let m = load(path)?;
    let v = parse_valuation(&m, val)?;
    let ta = build_trace_automaton(&m.valuate(&v)?, caps.build())?;
    if let Some(f) = dot {
        write_file(f, &trace_automaton_dot(&ta))?;
    }
    Ok(Outcome::maybe(trace_automaton_json(&ta), !ta.truncated))
}

fn gen_2cm(
    machine: &Path,
    enc: EncodingArg,
    out: &Path,
    validate: Option<&[usize]>,
) -> Result<Outcome> {
    let text = fs::read_to_string(machine)
        .with_context(|| format!("cannot read {}", machine.display()))?;
    let cm = CounterMachine::parse(&text).with_context(|| format!("{}", machine.display()))?;
    let kind = enc.kind();
    let m = compile(&cm, kind)?;
    write_file(out, &render(&m))?;
    let mut report = json!({
        "encoding": kind.as_str(),
        "output": out.display().to_string(),
        "locations": m.locations.len(),
        "edges": m.edges.len(),
        "clocks": m.clocks,
        "params": m.params,
    });
    let mut conclusive = true;
    if let Some(&[n, c]) = validate {
        let r = validate_encoding(&cm, kind, n, c, ValidationOptions::default())?;
        conclusive = r.ok();
        report["validation"] = json!({
            "valuation": valuation_json(&m, &r.valuation),
            "machine_length": r.machine_length,
            "concrete_reached": r.concrete_reached,
            "duration": r.duration.as_ref().map(rational_json),
            "correspondence_ok": r.correspondence_ok,
            "symbolic_reached": r.symbolic_reached,
            "projection_contains": r.projection_contains,
            "ok": r.ok(),
        });
    }
    Ok(Outcome::maybe(report, conclusive))
}

fn one_location_cmd(path: &Path, k: u64, out: &Path) -> Result<Outcome> {
    let m = load(path)?;
    let t = one_location_transform(&m, k as usize)?;
    write_file(out, &render(&t))?;
    Ok(Outcome::done(json!({
        "output": out.display().to_string(),
        "k": k,
        "clocks": t.clocks.len(),
        "edges": t.edges.len(),
    })))
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Check { model } => check(model),
        Command::Explore { model, caps, dot } => explore_cmd(model, *caps, dot.as_deref()),
        Command::Tps {
            model,
            val,
            caps,
            oracle,
        } => tps_cmd(model, val, *caps, *oracle, cli.seed),
        Command::Preserve {
            model,
            val,
            question,
            robust,
            caps,
        } => preserve_cmd(model, val, *question, *robust, *caps),
        Command::Include {
            a,
            b,
            val_a,
            val_b,
            semantics,
            both,
            caps,
        } => include_cmd(a, b, val_a, val_b, *semantics, *both, *caps),
        Command::Traceset {
            model,
            val,
            dot,
            caps,
        } => traceset_cmd(model, val, dot.as_deref(), *caps),
        Command::Gen2cm {
            machine,
            encoding,
            output,
            validate,
        } => gen_2cm(machine, *encoding, output, validate.as_deref()),
        Command::OneLocation { model, k, output } => one_location_cmd(model, *k, output),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Explore { .. } => "explore",
        Command::Tps { .. } => "tps",
        Command::Preserve { .. } => "preserve",
        Command::Include { .. } => "include",
        Command::Traceset { .. } => "traceset",
        Command::Gen2cm { .. } => "gen-2cm",
        Command::OneLocation { .. } => "one-location",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", first.trim());
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let report = header(command_name(&cli.command), out.report);
            print!(
                "{}",
                output::render(&report, cli.format, output::color_enabled())
            );
            if out.conclusive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arguments_are_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn zero_caps_are_rejected() {
        let r = Cli::try_parse_from(["ptakit", "explore", "m.pta", "--depth", "0"]);
        assert!(r.is_err());
    }

    #[test]
    fn validate_takes_two_numbers() {
        let cli = Cli::try_parse_from([
            "ptakit",
            "gen-2cm",
            "m.cm",
            "--encoding",
            "basic",
            "-o",
            "x",
            "--validate",
            "3",
            "2",
        ])
        .unwrap();
        match cli.command {
            Command::Gen2cm { validate, .. } => assert_eq!(validate, Some(vec![3, 2])),
            other => panic!("{other:?}"),
        }
    }
}
