//! Command-line front end for braid reduction and foliation movies.
//!
//! Braid words are JSON `{"n": strands, "word": [letters]}` with letter `±i`
//! for `σ_i^{±1}`. Movies use the foliation movie JSON of the core crate.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use braidcalc::foliation::{
    be_statistics, classify, export_dot, random_movie, statistics, validate, Classification,
    FoliationMovie,
};
use braidcalc::rewrite::{run_pipeline_with, PipelineOptions};
use braidcalc::{
    iterated_torus_braid, schubert_min_index, search_reduction, search_reduction_parallel,
    verify_certificate, BraidWord, CablingSchedule, Certificate, SearchBudget,
};
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "braidcalc", version, about = "Closed-braid reduction and torus foliation rewriting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the minimal braid of an iterated torus knot.
    Cable {
        /// Cabling schedule, e.g. "2,3;2,13".
        #[arg(long)]
        pairs: String,
    },
    /// Print the Bennequin number of a schedule's minimal braid or of a word.
    Bennequin {
        #[arg(long, conflicts_with = "word", required_unless_present = "word")]
        pairs: Option<String>,
        /// Braid word JSON file.
        #[arg(long)]
        word: Option<PathBuf>,
    },
    /// Search for a reduction of a braid word to a target strand count.
    Reduce {
        /// Braid word JSON file.
        input: PathBuf,
        /// Strand count to reach, or "auto" to use the schedule's minimal index.
        #[arg(long, default_value = "auto")]
        target: String,
        /// Schedule for `--target auto`.
        #[arg(long)]
        pairs: Option<String>,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        max_stabilizations: usize,
        #[arg(long, default_value_t = 512)]
        max_word_length: usize,
        /// Worker threads; 1 runs the sequential search.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Replay a certificate.
    Verify { certificate: PathBuf },
    /// Check a movie's structural invariants.
    MovieValidate { input: PathBuf },
    /// Print Circular, Mixed or Tiled.
    MovieClassify { input: PathBuf },
    /// Vertex statistics of a tiled or mixed movie as JSON.
    MovieStats { input: PathBuf },
    /// Reduce a movie to a circular one.
    MoviePipeline {
        input: PathBuf,
        /// Trace JSON output.
        #[arg(long)]
        trace: PathBuf,
        /// Final movie JSON output.
        #[arg(long)]
        output: PathBuf,
        /// Directory for DOT snapshots, one per step.
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
    /// Graph description of a movie.
    ExportDot {
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print a shipped fixture movie.
    Fixture { name: String },
    /// Print a random tiled movie. The seed defaults to BRAIDCALC_SEED.
    MovieRandom {
        #[arg(long, default_value_t = 6)]
        vertices: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn read_word(path: &Path) -> Result<BraidWord> {
    serde_json::from_str(&read(path)?).with_context(|| format!("{}: invalid braid word", path.display()))
}

fn read_movie(path: &Path) -> Result<FoliationMovie> {
    FoliationMovie::from_json(&read(path)?).with_context(|| format!("{}: invalid movie", path.display()))
}

fn read_valid_movie(path: &Path) -> Result<FoliationMovie> {
    let m = read_movie(path)?;
    let report = validate(&m);
    if !report.is_valid() {
        bail!("{}: invariant violation:\n{report}", path.display());
    }
    Ok(m)
}

fn schedule(pairs: &str) -> Result<CablingSchedule> {
    CablingSchedule::parse(pairs).with_context(|| format!("bad --pairs {pairs:?}"))
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Cable { pairs } => {
            let w = iterated_torus_braid(&schedule(&pairs)?)?;
            println!("{}", serde_json::to_string(&w)?);
            println!("index {} writhe {} bennequin {}", w.strands(), w.writhe(), w.bennequin());
        }
        Command::Bennequin { pairs, word } => {
            let w = match (pairs, word) {
                (Some(p), _) => iterated_torus_braid(&schedule(&p)?)?,
                (None, Some(path)) => read_word(&path)?,
                (None, None) => unreachable!("clap requires one"),
            };
            println!("{}", w.bennequin());
        }
        Command::Reduce { input, target, pairs, budget, max_stabilizations, max_word_length, threads, output } => {
            let w = read_word(&input)?;
            let target = match (target.as_str(), pairs) {
                ("auto", Some(p)) => schubert_min_index(&schedule(&p)?) as usize,
                ("auto", None) => bail!("--target auto needs --pairs"),
                (n, _) => n.parse().with_context(|| format!("bad --target {n:?}"))?,
            };
            let budget = SearchBudget { max_nodes: budget, max_stabilizations, max_word_length };
            let cert = if threads > 1 {
                search_reduction_parallel(&w, target, &budget, threads)?
            } else {
                search_reduction(&w, target, &budget)?
            };
            let text = serde_json::to_string_pretty(&cert)?;
            match output {
                Some(path) => write(&path, &(text + "\n"))?,
                None => println!("{text}"),
            }
            eprintln!("reduced {} strands to {} in {} moves", w.strands(), cert.final_word.strands(), cert.moves.len());
        }
        Command::Verify { certificate } => {
            let cert: Certificate = serde_json::from_str(&read(&certificate)?)
                .with_context(|| format!("{}: invalid certificate", certificate.display()))?;
            verify_certificate(&cert).map_err(|e| {
                let step = e.step(cert.moves.len());
                anyhow::anyhow!("replay failed at step {step}: {e}")
            })?;
            println!("ok: {} -> {}", cert.initial, cert.final_word);
        }
        Command::MovieValidate { input } => {
            read_valid_movie(&input)?;
            println!("valid");
        }
        Command::MovieClassify { input } => {
            println!("{}", classify(&read_valid_movie(&input)?)?);
        }
        Command::MovieStats { input } => {
            let m = read_valid_movie(&input)?;
            let out = match classify(&m)? {
                Classification::Tiled => {
                    let s = statistics(&m)?;
                    json!({
                        "class": "Tiled",
                        "valences": s.valences,
                        "positive_saddles": s.positive_saddles,
                        "negative_saddles": s.negative_saddles,
                        "valence_balance": {"lhs": s.valence_balance.lhs, "rhs": s.valence_balance.rhs, "holds": s.valence_balance.holds()},
                    })
                }
                Classification::Mixed => {
                    let s = be_statistics(&m)?;
                    let hist: serde_json::Map<String, serde_json::Value> =
                        s.histogram.iter().map(|((b, e), n)| (format!("{b},{e}"), json!(n))).collect();
                    json!({
                        "class": "Mixed",
                        "be_histogram": hist,
                        "be_balance": {"lhs": s.be_balance.lhs, "rhs": s.be_balance.rhs, "holds": s.be_balance.holds()},
                        "realizable": s.realizable,
                    })
                }
                Classification::Circular => json!({"class": "Circular", "n1": m.n1, "n3": m.n3}),
            };
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::MoviePipeline { input, trace, output, snapshots } => {
            let m = read_valid_movie(&input)?;
            let run = run_pipeline_with(&m, PipelineOptions { snapshots: snapshots.is_some() })?;
            write(&trace, &(run.trace.to_json() + "\n"))?;
            write(&output, &(run.movie.to_json() + "\n"))?;
            if let Some(dir) = snapshots {
                fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
                for (i, dot) in run.snapshots.iter().enumerate() {
                    write(&dir.join(format!("step{i:03}.dot")), dot)?;
                }
            }
            println!("{} steps, {}", run.trace.steps.len(), classify(&run.movie)?);
        }
        Command::ExportDot { input, output } => {
            let dot = export_dot(&read_valid_movie(&input)?);
            match output {
                Some(path) => write(&path, &dot)?,
                None => print!("{dot}"),
            }
        }
        Command::Fixture { name } => {
            let Some(m) = braidcalc::corpus::fixture(&name) else {
                let names: Vec<_> = braidcalc::corpus::corpus().into_iter().map(|(n, _)| n).collect();
                bail!("no fixture {name:?}; available: {}", names.join(", "));
            };
            println!("{}", m.to_json());
        }
        Command::MovieRandom { vertices, seed } => {
            let seed = seed.unwrap_or_else(|| braidcalc::random::env_seed(0));
            let mut rng = braidcalc::random::rng(seed);
            let m = random_movie(&mut rng, vertices, 200)
                .with_context(|| format!("no random tiling with {vertices} vertices"))?;
            println!("{}", m.to_json());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
