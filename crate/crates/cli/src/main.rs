use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use remedy_core::ast::{parse, Node};
use remedy_core::constraint::SolverChoice;
use remedy_core::corpus::{entries, run_entry, summarize, DESK_CORPUS};
use remedy_core::examples::{
    sample_examples, similarity, ExampleSet, SampleConfig, SimilarityConfig, DEFAULT_EXAMPLE_COUNT,
    DEFAULT_SAMPLES,
};
use remedy_core::ltp::check_ltp;
use remedy_core::matcher::{CaptureMap, Matcher};
use remedy_core::repair::{localize, repair, RepairConfig, RepairStatus};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_TIMEOUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "remedy", version, about = "Check and repair regular expressions vulnerable to catastrophic backtracking")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repair an expression so it matches in linear time.
    Repair(RepairArgs),
    /// Check the linear-time property; exits 0 iff it holds.
    Check { regex: String },
    /// Match an input and report captures and derivation size.
    Match { regex: String, input: String },
    /// Sample positive and negative examples.
    Gen {
        regex: String,
        #[arg(long, default_value_t = DEFAULT_EXAMPLE_COUNT)]
        count: usize,
    },
    /// Precision, recall and F1 of a candidate against a reference.
    Similarity {
        reference: String,
        candidate: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Use random derivations when enumeration exceeds its budget.
        #[arg(long)]
        guided: bool,
    },
    /// List minimal subexpressions violating the linear-time property.
    Localize { regex: String },
    /// Repair every line of a corpus file (the bundled corpus by default).
    Corpus {
        file: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Args)]
struct RepairArgs {
    regex: String,
    /// Example file; lines are positives until a `#negative` header.
    #[arg(long)]
    pos: Option<PathBuf>,
    /// Example file; lines are negatives until a `#positive` header.
    #[arg(long)]
    neg: Option<PathBuf>,
    /// Sample examples from the expression.
    #[arg(long, conflicts_with_all = ["pos", "neg"])]
    gen: bool,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct SearchArgs {
    /// Search timeout in seconds.
    #[arg(long, default_value_t = 30.0)]
    timeout: f64,
    /// Largest template size explored.
    #[arg(long, default_value_t = 512)]
    max_nodes: usize,
    /// Widen character sets of the result.
    #[arg(long)]
    widen: bool,
    /// Only rewrite the minimal vulnerable subexpressions.
    #[arg(long)]
    localize: bool,
    /// Examples sampled per side.
    #[arg(long, default_value_t = DEFAULT_EXAMPLE_COUNT)]
    samples: usize,
}

impl SearchArgs {
    fn config(&self, seed: u64) -> Result<RepairConfig, String> {
        if !(self.timeout.is_finite() && self.timeout > 0.0) {
            return Err("--timeout must be positive".into());
        }
        Ok(RepairConfig {
            timeout: Duration::from_secs_f64(self.timeout),
            max_template_nodes: self.max_nodes,
            example_count: self.samples,
            widen: self.widen,
            localize: self.localize,
            seed,
            solver: SolverChoice::from_env()?,
            ..Default::default()
        })
    }
}

struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

struct Outcome {
    code: u8,
    input: Value,
    result: Value,
    text: String,
}

fn parse_regex(text: &str) -> Result<Node, Failure> {
    parse(text).map_err(|e| Failure(EXIT_USAGE, format!("parse error at offset {}: {}", e.offset, e.message)))
}

/// Reads an example file. Lines go to the current section, which starts as
/// positive unless `negative_first`; `#positive` and `#negative` switch it.
fn read_examples(path: &Path, negative_first: bool, pos: &mut Vec<String>, neg: &mut Vec<String>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let mut negative = negative_first;
    let body = text.strip_suffix('\n').unwrap_or(&text);
    if body.is_empty() && text.is_empty() {
        return Ok(());
    }
    for line in body.split('\n') {
        let line = line.strip_suffix('\r').unwrap_or(line);
        match line {
            "#positive" => negative = false,
            "#negative" => negative = true,
            _ if negative => neg.push(line.to_string()),
            _ => pos.push(line.to_string()),
        }
    }
    Ok(())
}

fn status_code(s: RepairStatus) -> u8 {
    match s {
        RepairStatus::Repaired | RepairStatus::AlreadyLtp => EXIT_OK,
        RepairStatus::Timeout => EXIT_TIMEOUT,
        RepairStatus::Infeasible => EXIT_INFEASIBLE,
    }
}

fn cmd_repair(args: &RepairArgs, seed: u64) -> Result<Outcome, Failure> {
    let r = parse_regex(&args.regex)?;
    let cfg = args.search.config(seed)?;
    let ex = if args.pos.is_none() && args.neg.is_none() {
        let scfg = SampleConfig {
            count: cfg.example_count,
            seed,
            ..Default::default()
        };
        sample_examples(&r, &scfg)?
    } else {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        if let Some(p) = &args.pos {
            read_examples(p, false, &mut pos, &mut neg)?;
        }
        if let Some(n) = &args.neg {
            read_examples(n, true, &mut pos, &mut neg)?;
        }
        ExampleSet::new(&r, pos, neg)?
    };
    let res = repair(&r, &ex, &cfg)?;
    let output = res.output.as_ref().map(|n| n.to_string());
    let text = match &output {
        Some(o) => format!("{:?}\n{o}\ncost {}", res.status, res.cost.unwrap_or(0)),
        None => format!("{:?}", res.status),
    };
    Ok(Outcome {
        code: status_code(res.status),
        input: json!(args.regex),
        result: json!({
            "status": res.status,
            "output": output,
            "cost": res.cost,
            "template": res.template.as_ref().map(|t| t.to_string()),
            "examples": ex,
            "stats": res.stats,
        }),
        text,
    })
}

fn cmd_check(regex: &str) -> Result<Outcome, Failure> {
    let r = parse_regex(regex)?;
    let v = check_ltp(&r);
    let text = match &v.witness {
        None => "linear-time property holds".to_string(),
        Some(w) => format!(
            "linear-time property violated at bracket {}{}\n{}",
            w.bracket,
            w.symbol.map(|c| format!(" on {c:?}")).unwrap_or_default(),
            serde_json::to_string(&w.evidence)?
        ),
    };
    Ok(Outcome {
        code: if v.satisfies { EXIT_OK } else { EXIT_INFEASIBLE },
        input: json!(regex),
        result: serde_json::to_value(&v)?,
        text,
    })
}

fn captures_json(c: &CaptureMap) -> Value {
    Value::Object(c.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn cmd_match(regex: &str, input: &str) -> Result<Outcome, Failure> {
    let r = parse_regex(regex)?;
    let m = Matcher::new(&r);
    let res = m.step(input, 0, &CaptureMap::new())?;
    let n = input.chars().count();
    let accepting: Vec<&CaptureMap> = res.states.iter().filter(|s| s.pos == n).map(|s| &s.captures).collect();
    let accepted = !accepting.is_empty();
    let states: Vec<Value> = res
        .states
        .iter()
        .map(|s| json!({"pos": s.pos, "captures": captures_json(&s.captures)}))
        .collect();
    let captures = accepting.first().map(|c| captures_json(c));
    let text = format!(
        "accepted {accepted}\ncaptures {}\nderivation size {}",
        captures.clone().unwrap_or(Value::Null),
        res.derivation_size
    );
    Ok(Outcome {
        code: EXIT_OK,
        input: json!({"regex": regex, "string": input}),
        result: json!({
            "accepted": accepted,
            "captures": captures,
            "results": states,
            "derivation_size": res.derivation_size,
        }),
        text,
    })
}

fn cmd_gen(regex: &str, count: usize, seed: u64) -> Result<Outcome, Failure> {
    let r = parse_regex(regex)?;
    let ex = sample_examples(&r, &SampleConfig { count, seed, ..Default::default() })?;
    let mut text = String::from("#positive\n");
    for p in &ex.positives {
        text.push_str(p);
        text.push('\n');
    }
    text.push_str("#negative");
    for n in &ex.negatives {
        text.push('\n');
        text.push_str(n);
    }
    Ok(Outcome {
        code: EXIT_OK,
        input: json!(regex),
        result: serde_json::to_value(&ex)?,
        text,
    })
}

fn cmd_similarity(reference: &str, candidate: &str, samples: usize, guided: bool, seed: u64) -> Result<Outcome, Failure> {
    let a = parse_regex(reference)?;
    let b = parse_regex(candidate)?;
    let cfg = SimilarityConfig { samples, seed, guided, ..Default::default() };
    let rep = similarity(&a, &b, &cfg)?;
    let f = rep.scores.to_f64();
    Ok(Outcome {
        code: EXIT_OK,
        input: json!({"reference": reference, "candidate": candidate}),
        result: serde_json::to_value(&rep)?,
        text: format!("precision {:.4}\nrecall {:.4}\nf1 {:.4}", f.precision, f.recall, f.f1),
    })
}

fn cmd_localize(regex: &str) -> Result<Outcome, Failure> {
    let r = parse_regex(regex)?;
    let found: Vec<Value> = localize(&r)
        .into_iter()
        .map(|(s, n)| json!({"start": s.start, "end": s.end, "subexpression": n.to_string()}))
        .collect();
    let text = found
        .iter()
        .map(|v| format!("{}..{} {}", v["start"], v["end"], v["subexpression"].as_str().unwrap_or("")))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome {
        code: EXIT_OK,
        input: json!(regex),
        result: json!({ "vulnerable": found }),
        text,
    })
}

fn cmd_corpus(file: Option<&Path>, search: &SearchArgs, jobs: usize, seed: u64, as_json: bool) -> Result<u8, Failure> {
    let text = match file {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", p.display())))?,
        None => DESK_CORPUS.to_string(),
    };
    let cfg = search.config(seed)?;
    let lines = entries(&text);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let records: Vec<_> = pool.install(|| {
        lines
            .par_iter()
            .enumerate()
            .map(|(i, l)| run_entry(i, l, &cfg))
            .collect()
    });
    let summary = summarize(&records);
    for r in &records {
        if as_json {
            println!("{}", serde_json::to_string(r)?);
        } else {
            println!(
                "{:>3} {:<12} {:>6}ms {} -> {}",
                r.index,
                format!("{:?}", r.status),
                r.elapsed_ms,
                r.input,
                r.output.as_deref().or(r.error.as_deref()).unwrap_or("-")
            );
        }
    }
    if as_json {
        println!("{}", serde_json::to_string(&json!({ "summary": summary }))?);
    } else {
        println!(
            "entries {} repaired {} already {} timeout {} infeasible {} errors {} unverified {}",
            summary.entries,
            summary.repaired,
            summary.already_ltp,
            summary.timeout,
            summary.infeasible,
            summary.errors,
            summary.unverified
        );
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    input: Value,
    result: Value,
    version: &'a str,
    seed: u64,
    elapsed_ms: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let start = Instant::now();
    let (name, outcome) = match &cli.command {
        Command::Repair(a) => ("repair", cmd_repair(a, cli.seed)),
        Command::Check { regex } => ("check", cmd_check(regex)),
        Command::Match { regex, input } => ("match", cmd_match(regex, input)),
        Command::Gen { regex, count } => ("gen", cmd_gen(regex, *count, cli.seed)),
        Command::Similarity { reference, candidate, samples, guided } => {
            ("similarity", cmd_similarity(reference, candidate, *samples, *guided, cli.seed))
        }
        Command::Localize { regex } => ("localize", cmd_localize(regex)),
        Command::Corpus { file, search, jobs } => {
            return match cmd_corpus(file.as_deref(), search, *jobs, cli.seed, cli.json) {
                Ok(code) => ExitCode::from(code),
                Err(Failure(code, msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(code)
                }
            };
        }
    };
    match outcome {
        Ok(o) => {
            if cli.json {
                let report = Report {
                    command: name,
                    input: o.input,
                    result: o.result,
                    version: env!("CARGO_PKG_VERSION"),
                    seed: cli.seed,
                    elapsed_ms: start.elapsed().as_millis() as u64,
                };
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                println!("{}", o.text);
            }
            ExitCode::from(o.code)
        }
        Err(Failure(code, msg)) => {
            if cli.json {
                let v = json!({"command": name, "error": msg, "version": env!("CARGO_PKG_VERSION")});
                println!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
            }
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
