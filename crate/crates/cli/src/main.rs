use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tagforge::calculus::weakening_calculus;
use tagforge::codec::{HatTemplate, WordCodec};
use tagforge::engine::{derives_in, ClosureConfig, ClosureLevel, DerivationTrace, TraceJson, Verdict};
use tagforge::lemmas::{
    check_code_inclusion, check_corollary4, check_corollary5, check_corollary6, check_halting_equivalence,
    check_inclusion, check_lemma1, check_lemma3, check_lemma6, check_production, default_hats, LemmaReport,
    LemmaVerdict,
};
use tagforge::reduction::build_reduction;
use tagforge::tag::Alphabet;
use tagforge::{parse_formula, parse_tag_system, Calculus, Error, TagSystem, Word};

const COLLATZ: &str = "d=2\na -> bc\nb -> a\nc -> aaa\n";

/// Tag systems, their encodings as implicational calculi, and checkable derivations.
#[derive(Parser)]
#[command(name = "tagforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the code of a word: all alphabetic formulas for it.
    Encode {
        #[arg(long)]
        word: String,
        #[arg(long, default_value = "x")]
        hat: String,
        /// Alphabet letters in order (default: a..z).
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Run or query a tag system.
    Tag {
        #[command(subcommand)]
        command: TagCommand,
    },
    /// Build the reduction calculus for a tag system, target calculus and input word.
    Reduce {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        input: String,
        /// Target calculus JSON (default: {x -> y -> x}).
        #[arg(long)]
        p0: Option<PathBuf>,
        /// Hat template candidates, tried in order (default: x, x -> x, ...).
        #[arg(long)]
        hat: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a derivation of a formula in a calculus.
    Derive {
        #[arg(long)]
        calculus: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Write the trace file here when a derivation is found.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Validate a trace file against a calculus.
    CheckTrace {
        #[arg(long)]
        calculus: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Formula to check instead of the one recorded in the trace file.
        #[arg(long)]
        claimed: Option<String>,
    },
    /// Run lemma checks and print one JSON report per line.
    Verify {
        lemma: LemmaId,
        #[command(flatten)]
        opts: VerifyOpts,
    },
}

#[derive(Subcommand)]
enum TagCommand {
    /// Run from an input word until it halts or the step budget is spent.
    Run {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
    },
    /// Decide whether one word produces another within a step budget.
    Reach {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LemmaId {
    Lemma1,
    Lemma3,
    Corollary4,
    Lemma5,
    Lemma6,
    Corollary5,
    Corollary6,
    Lemma9,
    Lemma11,
    Lemma12,
    All,
}

#[derive(Args)]
struct VerifyOpts {
    #[arg(long, default_value = "x")]
    hat: String,
    /// Alphabet size for the sweeps.
    #[arg(long, default_value_t = 3)]
    alphabet: usize,
    #[arg(long, default_value_t = 4)]
    max_len: usize,
    /// Tag system file (default: the Collatz-style system a -> bc, b -> a, c -> aaa).
    #[arg(long)]
    system: Option<PathBuf>,
    #[arg(long, default_value = "aaa")]
    input: String,
    /// Target calculus JSON (default: {x -> y -> x}).
    #[arg(long)]
    p0: Option<PathBuf>,
    /// Closure levels explored by the structural check.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Tag steps allowed for runs and reachability.
    #[arg(long, default_value_t = 100)]
    budget: usize,
    /// Write checkable trace files for each report here.
    #[arg(long)]
    witness_dir: Option<PathBuf>,
    /// Include elapsed time in the reports.
    #[arg(long)]
    timings: bool,
}

/// Failure of a command: a domain error, or a check that came out negative.
enum Failure {
    Domain(String),
    Negative(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<tagforge::ParseError> for Failure {
    fn from(e: tagforge::ParseError) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<TagSystem, Failure> {
    Ok(parse_tag_system(&read(path)?)?)
}

fn load_calculus(path: &Path) -> Result<Calculus, Failure> {
    Ok(Calculus::from_json_str(&read(path)?)?)
}

fn load_p0(path: Option<&Path>) -> Result<Calculus, Failure> {
    path.map_or_else(|| Ok(weakening_calculus()), load_calculus)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn encode(word: &str, hat: &str, alphabet: Option<&str>) -> Outcome {
    let hat = HatTemplate::parse(hat)?;
    let alphabet = match alphabet {
        Some(a) => Alphabet::new(a.chars().collect())?,
        None => Alphabet::latin(),
    };
    let codec = WordCodec::new(hat.clone(), alphabet);
    let code = codec.code_word(&Word::from(word))?;
    Ok(serde_json::to_value(code.to_json(&hat)).expect("serializable"))
}

fn tag_run(system: &Path, input: &str, max_steps: usize) -> Outcome {
    let t = load_system(system)?;
    let outcome = t.run(&Word::from(input), max_steps)?;
    let mut v = serde_json::to_value(&outcome).expect("serializable");
    v["input"] = json!(input);
    v["max_steps"] = json!(max_steps);
    Ok(v)
}

fn tag_reach(system: &Path, from: &str, to: &str, max_steps: usize) -> Outcome {
    let t = load_system(system)?;
    let reaches = t.reaches(&Word::from(from), &Word::from(to), max_steps)?;
    Ok(json!({ "from": from, "to": to, "max_steps": max_steps, "reaches": reaches }))
}

fn reduce(system: &Path, input: &str, p0: Option<&Path>, hats: &[String], out: Option<&Path>) -> Outcome {
    let t = load_system(system)?;
    let p0 = load_p0(p0)?;
    let candidates = if hats.is_empty() {
        default_hats()
    } else {
        hats.iter().map(|h| HatTemplate::parse(h)).collect::<Result<Vec<_>, _>>()?
    };
    let bundle = build_reduction(&t, &p0, &Word::from(input), &candidates)?;
    let v = serde_json::to_value(bundle.to_json()).expect("serializable");
    match out {
        Some(path) => {
            write(path, &pretty(&v))?;
            Ok(json!({ "bundle": path.display().to_string(), "axioms": bundle.full.calculus.len(), "hat": bundle.hat.to_string() }))
        }
        None => Ok(v),
    }
}

fn derive(calculus: &Path, goal: &str, depth: usize, trace_out: Option<&Path>) -> Outcome {
    let c = load_calculus(calculus)?;
    let goal_f = parse_formula(goal)?;
    let mut closure = ClosureLevel::new(&c, ClosureConfig::from_env());
    let verdict = derives_in(&mut closure, &goal_f, depth)?;
    let mut v = json!({ "calculus": c.label(), "goal": goal_f.to_string(), "depth": depth });
    match verdict {
        Verdict::Derivable { level, trace } => {
            v["verdict"] = json!("derivable");
            v["level"] = json!(level);
            let tj = serde_json::to_value(trace.to_json(Some(&goal_f))).expect("serializable");
            match trace_out {
                Some(path) => {
                    write(path, &pretty(&tj))?;
                    v["trace_file"] = json!(path.display().to_string());
                }
                None => v["trace"] = tj,
            }
        }
        Verdict::NotFoundWithinBudget { .. } => v["verdict"] = json!("not-found-within-budget"),
    }
    Ok(v)
}

fn check_trace_cmd(calculus: &Path, trace: &Path, claimed: Option<&str>) -> Outcome {
    let c = load_calculus(calculus)?;
    let tj: TraceJson = serde_json::from_str(&read(trace)?).map_err(Error::from)?;
    let (t, recorded) = DerivationTrace::from_json(&tj)?;
    let claimed = match claimed {
        Some(text) => Some(parse_formula(text)?),
        None => recorded,
    };
    let claimed = claimed.ok_or_else(|| Failure::Domain("no claimed formula: pass --claimed or record one in the trace".into()))?;
    let mut v = json!({ "claimed": claimed.to_string(), "steps": t.len() });
    if let Err(fault) = t.verify(&c) {
        v["valid"] = json!(false);
        v["fault"] = json!({ "step": fault.step, "reason": fault.reason });
        return Err(Failure::Negative(v));
    }
    let valid = tagforge::engine::check_trace(&c, &t, &claimed);
    v["valid"] = json!(valid);
    if !valid {
        v["fault"] = json!({ "step": t.len().saturating_sub(1), "reason": "claimed formula is not an instance of the conclusion" });
        return Err(Failure::Negative(v));
    }
    Ok(v)
}

fn run_lemma(id: LemmaId, o: &VerifyOpts, t: &TagSystem, p0: &Calculus, hat: &HatTemplate) -> Result<LemmaReport, Error> {
    let input = Word::from(o.input.as_str());
    match id {
        LemmaId::Lemma1 => Ok(check_lemma1(hat)),
        LemmaId::Lemma3 => check_lemma3(hat, o.alphabet, o.max_len),
        LemmaId::Corollary4 => check_corollary4(hat, o.alphabet, o.max_len),
        LemmaId::Lemma5 => check_code_inclusion(hat, &Alphabet::first_n(o.alphabet), o.max_len),
        LemmaId::Lemma6 => check_lemma6(hat, o.alphabet.min(2), o.max_len.min(5)),
        LemmaId::Corollary5 => check_corollary5(t, hat, &input, o.budget),
        LemmaId::Corollary6 => check_corollary6(t, hat, o.max_len.min(4), 2),
        LemmaId::Lemma9 => check_production(t, p0, hat, &input, o.depth),
        LemmaId::Lemma11 => check_halting_equivalence(t, p0, &input, o.budget),
        LemmaId::Lemma12 => check_inclusion(t, hat),
        LemmaId::All => unreachable!("expanded by the caller"),
    }
}

const ALL_LEMMAS: [LemmaId; 10] = [
    LemmaId::Lemma1,
    LemmaId::Lemma3,
    LemmaId::Corollary4,
    LemmaId::Lemma5,
    LemmaId::Lemma6,
    LemmaId::Corollary5,
    LemmaId::Corollary6,
    LemmaId::Lemma9,
    LemmaId::Lemma11,
    LemmaId::Lemma12,
];

/// Write the calculus and up to this many traces per report.
const WITNESS_FILES: usize = 64;

fn write_witness(dir: &Path, report: &LemmaReport) -> Result<Vec<String>, Failure> {
    let Some(calculus) = report.witness.calculus() else { return Ok(Vec::new()) };
    fs::create_dir_all(dir).map_err(|e| Failure::Domain(format!("{}: {e}", dir.display())))?;
    let calc_path = dir.join(format!("{}.calculus.json", report.id));
    write(&calc_path, &calculus.to_json_string())?;
    let mut files = vec![calc_path.display().to_string()];
    for (k, (claimed, trace)) in report.witness.traces().iter().take(WITNESS_FILES).enumerate() {
        let path = dir.join(format!("{}.trace.{k}.json", report.id));
        write(&path, &pretty(&serde_json::to_value(trace.to_json(Some(claimed))).expect("serializable")))?;
        files.push(path.display().to_string());
    }
    Ok(files)
}

fn verify(id: LemmaId, o: &VerifyOpts) -> Result<(Vec<String>, bool), Failure> {
    let hat = HatTemplate::parse(&o.hat)?;
    let t = match &o.system {
        Some(p) => load_system(p)?,
        None => parse_tag_system(COLLATZ)?,
    };
    let p0 = load_p0(o.p0.as_deref())?;
    let ids: Vec<LemmaId> = if id == LemmaId::All { ALL_LEMMAS.to_vec() } else { vec![id] };
    let mut lines = Vec::new();
    let mut any_fail = false;
    for id in ids {
        let report = run_lemma(id, o, &t, &p0, &hat)?;
        any_fail |= report.verdict == LemmaVerdict::Fail;
        let mut j = report.to_json(o.timings);
        if let Some(dir) = &o.witness_dir {
            j.witness.files = write_witness(dir, &report)?;
        }
        let mut v = serde_json::to_value(&j).expect("serializable");
        v["hat"] = json!(o.hat);
        lines.push(serde_json::to_string(&v).expect("serializable"));
    }
    Ok((lines, any_fail))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Encode { word, hat, alphabet } => encode(word, hat, alphabet.as_deref()),
        Command::Tag { command: TagCommand::Run { system, input, max_steps } } => tag_run(system, input, *max_steps),
        Command::Tag { command: TagCommand::Reach { system, from, to, max_steps } } => {
            tag_reach(system, from, to, *max_steps)
        }
        Command::Reduce { system, input, p0, hat, out } => reduce(system, input, p0.as_deref(), hat, out.as_deref()),
        Command::Derive { calculus, goal, depth, trace_out } => derive(calculus, goal, *depth, trace_out.as_deref()),
        Command::CheckTrace { calculus, trace, claimed } => check_trace_cmd(calculus, trace, claimed.as_deref()),
        Command::Verify { lemma, opts } => match verify(*lemma, opts) {
            Ok((lines, failed)) => {
                for l in lines {
                    println!("{l}");
                }
                return ExitCode::from(u8::from(failed));
            }
            Err(f) => Err(f),
        },
    };
    match outcome {
        Ok(v) => {
            println!("{}", pretty(&v));
            ExitCode::SUCCESS
        }
        Err(Failure::Negative(v)) => {
            println!("{}", pretty(&v));
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
