use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use carpet_core::decider::{check_certificate, decide, Certificate, DecideError, DecideOptions, Verdict};
use carpet_core::grid_geometry::{validate_loop, SpaceFile};
use carpet_core::homotopy_builder::build_cellulation;
use carpet_core::render::{render_cellulation, render_space};
use carpet_core::sample::loop_with_vertices;
use carpet_core::trace_calculus::{
    enumerate_diagrams, first_diagram, move_search_trivial, trace_reduce, TraceLetter, TraceWord, DEFAULT_CAP,
};
use carpet_core::word_encoding::encode_word;
use carpet_core::{DefiningSequence, PolyLoop};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "carpet", version, about = "Decide whether polygonal loops in Sierpinski-like sets are null-homotopic")]
struct Cli {
    /// Seed for randomized harness commands; the decision pipeline is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Space file (JSON), or `full_carpet:N`.
    #[arg(long)]
    space: String,
    /// Loop file (JSON with a `vertices` list of `["p/q", "p/q"]` pairs).
    #[arg(long = "loop")]
    lp: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Corridor word of a loop at one level.
    Encode {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        level: u32,
    },
    /// Verdict for a loop up to a depth.
    Decide {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        depth: Option<u32>,
        /// Cap on cancellation diagrams enumerated per level.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        caps: usize,
        /// Where to write fixtures if the two computations disagree.
        #[arg(long, default_value = "fixtures")]
        fixture_dir: PathBuf,
    },
    /// Full certificate for a loop.
    Certify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        caps: usize,
        #[arg(long, default_value = "fixtures")]
        fixture_dir: PathBuf,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a certificate.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        cert: PathBuf,
    },
    /// SVG drawing of a level space, optionally with a loop or its cellulation.
    Render {
        #[arg(long)]
        space: String,
        #[arg(long = "loop")]
        lp: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        level: Option<u32>,
        /// Draw the band cellulation of the loop's first cancellation diagram.
        #[arg(long)]
        cellulation: bool,
    },
    /// Word-problem oracles.
    Oracle {
        #[command(subcommand)]
        which: Oracle,
    },
    /// Time decisions and certificate checks on random loops.
    Bench {
        #[arg(long, default_value_t = 5)]
        depth: u32,
        #[arg(long, default_value_t = 200)]
        vertices: usize,
        #[arg(long, default_value_t = 10)]
        runs: usize,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// Trace triviality of a word such as `a b a^-1 b^-1`.
    Trace {
        #[arg(long)]
        word: String,
        /// Commuting pair `a:b`; repeatable.
        #[arg(long)]
        commute: Vec<String>,
        /// Also run the exhaustive move search.
        #[arg(long)]
        brute: bool,
        #[arg(long, default_value_t = 1000)]
        max_diagrams: usize,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn input_error(e: anyhow::Error) -> Failure {
    Failure { code: 2, error: e }
}

fn load_space(arg: &str) -> Result<DefiningSequence> {
    if let Some(depth) = arg.strip_prefix("full_carpet:") {
        let depth: u32 = depth.parse().with_context(|| format!("bad depth in `{arg}`"))?;
        return Ok(DefiningSequence::full_carpet(depth)?);
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
    let file: SpaceFile = serde_json::from_str(&text).with_context(|| format!("parsing {arg}"))?;
    Ok(DefiningSequence::from_file(&file)?)
}

fn load_loop(path: &Path) -> Result<PolyLoop> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load(input: &Input) -> Result<(DefiningSequence, PolyLoop)> {
    Ok((load_space(&input.space)?, load_loop(&input.lp)?))
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn run_decide(
    seq: &DefiningSequence,
    lp: &PolyLoop,
    depth: Option<u32>,
    caps: usize,
    fixture_dir: &Path,
) -> Result<Certificate, Failure> {
    let depth = depth.unwrap_or(seq.depth());
    match decide(lp, seq, depth, DecideOptions { cap: caps }) {
        Ok(c) => Ok(c),
        Err(DecideError::InvalidLoop(v)) => Err(input_error(anyhow!("invalid loop: {v}"))),
        Err(e @ DecideError::Disagreement(_)) => {
            let DecideError::Disagreement(fx) = &e else { unreachable!() };
            let dumped = fx.dump(fixture_dir);
            eprintln!("!!! {e}");
            match dumped {
                Ok(path) => eprintln!("!!! fixture written to {}", path.display()),
                Err(io) => eprintln!("!!! could not write fixture: {io}"),
            }
            Err(Failure { code: 1, error: anyhow!(e) })
        }
    }
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Inconclusive { .. } => 3,
        _ => 0,
    }
}

fn trace_text(w: &TraceWord, letters: &[TraceLetter]) -> String {
    letters
        .iter()
        .map(|l| {
            let name = &w.names[l.sym as usize];
            if l.sign > 0 {
                name.clone()
            } else {
                format!("{name}^-1")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Encode { input, level } => {
            let (seq, lp) = load(&input).map_err(input_error)?;
            validate_loop(&lp, &seq, level).map_err(|e| input_error(anyhow!("invalid loop: {e}")))?;
            let word = encode_word(&lp, &seq, level).map_err(|e| input_error(e.into()))?;
            let letters: Vec<Value> = word
                .letters
                .iter()
                .map(|l| {
                    json!({
                        "letter": l.symbol().to_string(),
                        "start": l.source.start.to_string(),
                        "end": l.source.end.to_string(),
                    })
                })
                .collect();
            let commuting: Vec<Value> = word.commutes.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect();
            print(&json!({ "level": level, "word": word.to_text(), "letters": letters, "commuting": commuting }));
            Ok(0)
        }
        Command::Decide { input, depth, caps, fixture_dir } => {
            let (seq, lp) = load(&input).map_err(input_error)?;
            let cert = run_decide(&seq, &lp, depth, caps, &fixture_dir)?;
            eprintln!("{}", cert.verdict);
            print(&json!({
                "depth": cert.depth,
                "verdict": cert.verdict,
                "statement": cert.verdict.to_string(),
            }));
            Ok(verdict_code(&cert.verdict))
        }
        Command::Certify { input, depth, caps, fixture_dir, out } => {
            let (seq, lp) = load(&input).map_err(input_error)?;
            let cert = run_decide(&seq, &lp, depth, caps, &fixture_dir)?;
            let body = serde_json::to_string_pretty(&cert).expect("certificates serialize");
            match out {
                Some(path) => std::fs::write(&path, body + "\n")
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(input_error)?,
                None => println!("{body}"),
            }
            eprintln!("{}", cert.verdict);
            Ok(verdict_code(&cert.verdict))
        }
        Command::Check { input, cert } => {
            let (seq, lp) = load(&input).map_err(input_error)?;
            let text = std::fs::read_to_string(&cert)
                .with_context(|| format!("reading {}", cert.display()))
                .map_err(input_error)?;
            let cert: Certificate = serde_json::from_str(&text).context("parsing certificate").map_err(input_error)?;
            let report = check_certificate(&cert, &seq, &lp);
            print(&json!(report));
            if report.ok {
                Ok(0)
            } else {
                Err(Failure { code: 2, error: anyhow!("certificate rejected") })
            }
        }
        Command::Render { space, lp, out, level, cellulation } => {
            let seq = load_space(&space).map_err(input_error)?;
            let lp = lp.as_deref().map(load_loop).transpose().map_err(input_error)?;
            let level = level.unwrap_or(seq.depth());
            let svg = if cellulation {
                let lp = lp.as_ref().ok_or_else(|| input_error(anyhow!("--cellulation needs --loop")))?;
                let word = encode_word(lp, &seq, level).map_err(|e| input_error(e.into()))?;
                let d = first_diagram(&TraceWord::from_cyclic(&word))
                    .ok_or_else(|| input_error(anyhow!("the level-{level} word has no cancellation diagram")))?;
                let cel = build_cellulation(&word, &d).map_err(|e| input_error(e.into()))?;
                render_cellulation(&cel, Some(&word))
            } else {
                render_space(&seq, lp.as_ref(), level).map_err(|e| input_error(e.into()))?
            };
            std::fs::write(&out, &svg).with_context(|| format!("writing {}", out.display())).map_err(input_error)?;
            print(&json!({ "out": out.display().to_string(), "bytes": svg.len() }));
            Ok(0)
        }
        Command::Oracle { which: Oracle::Trace { word, commute, brute, max_diagrams } } => {
            let pairs: Vec<(&str, &str)> = commute
                .iter()
                .map(|p| p.split_once(':').ok_or_else(|| input_error(anyhow!("commuting pair `{p}` is not `a:b`"))))
                .collect::<Result<_, _>>()?;
            let w = TraceWord::parse(&word, &pairs).map_err(|e| input_error(e.into()))?;
            let reduced = trace_reduce(&w);
            let mut out = json!({
                "word": w.to_string(),
                "trivial": reduced.is_empty(),
                "reduced": trace_text(&w, &reduced),
            });
            if reduced.is_empty() {
                let diagrams = match enumerate_diagrams(&w, max_diagrams) {
                    Ok(ds) => json!({ "count": ds.len(), "diagrams": ds.iter().map(|d| d.to_string()).collect::<Vec<_>>() }),
                    Err(e) => json!({ "error": e.to_string() }),
                };
                out["diagrams"] = diagrams;
            }
            if brute {
                out["move_search"] = json!(move_search_trivial(&w));
            }
            print(&out);
            Ok(0)
        }
        Command::Bench { depth, vertices, runs } => {
            let seq = DefiningSequence::full_carpet(depth).map_err(|e| input_error(e.into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut rows = Vec::new();
            for k in 0..runs {
                let trivial = k % 2 == 0;
                let lp = loop_with_vertices(&seq, depth, rng.gen(), vertices, trivial);
                let t = Instant::now();
                let cert = run_decide(&seq, &lp, None, DEFAULT_CAP, Path::new("fixtures"))?;
                let decide_ms = t.elapsed().as_secs_f64() * 1e3;
                let t = Instant::now();
                let ok = check_certificate(&cert, &seq, &lp).ok;
                let check_ms = t.elapsed().as_secs_f64() * 1e3;
                rows.push(json!({
                    "vertices": lp.len(),
                    "verdict": cert.verdict.class(),
                    "decide_ms": decide_ms,
                    "check_ms": check_ms,
                    "check_ok": ok,
                }));
            }
            print(&json!({ "depth": depth, "seed": cli.seed, "runs": rows }));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
