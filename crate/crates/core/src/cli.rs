//! The `ndcut` command line. [`run`] takes the argument vector and two
//! output sinks and returns the exit status: 0 on success, 1 on domain
//! errors (ill-typed input, not a redex, failed check), 2 on usage errors.

use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::formula::Formula;
use crate::generator::{gen_typed, GenConfig};
use crate::head::classify_in;
use crate::marked::certify_app;
use crate::oracle::{explore_in, verify_app, Verdict, DEFAULT_NODE_LIMIT};
use crate::reduction::{choose_redex, normalize_in, reduce_at_in, replay, Strategy};
use crate::syntax::{parse, parse_formula, parse_scenario, parse_term_in, SourceUnit};
use crate::term::{Path, Term};
use crate::typing::{check, TypingContext};

const DEFAULT_MAX_STEPS: usize = 10_000;

#[derive(Parser, Debug)]
#[command(
    name = "ndcut",
    about = "Cut elimination for classical natural deduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the type of the term in FILE.
    Check { file: PathBuf },
    /// Print one reduct.
    Step {
        file: PathBuf,
        /// Fire the redex at this path, e.g. `/0/1`.
        #[arg(long)]
        path: Option<Path>,
        /// head, leftmost or random(SEED); ignored when --path is given.
        #[arg(long, default_value = "leftmost")]
        strategy: Strategy,
    },
    /// Reduce until a normal form or the step limit.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        strategy: Strategy,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Print one `<path> <kind>` line per step before the result.
        #[arg(long)]
        trace: bool,
    },
    /// Build the reduction graph and print its summary line.
    Explore {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        limit: usize,
        /// Write the graph in DOT format to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Print the head-table row of a simple term.
    Classify { file: PathBuf },
    /// Print generated typed terms, separated by lines holding `;`.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        goal: Option<String>,
    },
    /// Run a checker harness.
    Harness {
        #[command(subcommand)]
        which: Harness,
    },
}

#[derive(Subcommand, Debug)]
enum Harness {
    /// Check the pushed-eliminator theorem on a scenario file and print the
    /// certificate.
    App {
        scenario: PathBuf,
        /// One term per line, starting with S1. Defaults to the leftmost
        /// reduction of S1.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        limit: usize,
    },
}

/// A failure to report: the message (one line) and the exit status.
struct Failure(String, i32);

fn domain(msg: impl Into<String>) -> Failure {
    Failure(msg.into(), 1)
}

type Outcome = Result<(), Failure>;

pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            // clap's report spans several lines; keep the part before the usage block
            let text = e.to_string();
            let msg: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            let _ = writeln!(err, "{}", msg.join(" "));
            return 2;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure(msg, code)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Check { file } => cmd_check(&file, out),
        Command::Step {
            file,
            path,
            strategy,
        } => cmd_step(&file, path, strategy, out),
        Command::Normalize {
            file,
            strategy,
            max_steps,
            trace,
        } => cmd_normalize(&file, strategy, max_steps, trace, out),
        Command::Explore { file, limit, dot } => cmd_explore(&file, limit, dot.as_deref(), out),
        Command::Classify { file } => cmd_classify(&file, out),
        Command::Gen {
            seed,
            size,
            count,
            goal,
        } => cmd_gen(seed, size, count, goal.as_deref(), out),
        Command::Harness {
            which:
                Harness::App {
                    scenario,
                    trace,
                    limit,
                },
        } => cmd_app(&scenario, trace.as_deref(), limit, out),
    }
}

fn read(file: &FsPath) -> Result<String, Failure> {
    fs::read_to_string(file).map_err(|e| domain(format!("{}: {e}", file.display())))
}

fn load(file: &FsPath) -> Result<SourceUnit, Failure> {
    let src = read(file)?;
    parse(&src).map_err(|e| domain(format!("{}:{e}", file.display())))
}

fn emit(out: &mut dyn Write, line: impl std::fmt::Display) -> Outcome {
    writeln!(out, "{line}").map_err(|e| domain(format!("write failed: {e}")))
}

fn cmd_check(file: &FsPath, out: &mut dyn Write) -> Outcome {
    let unit = load(file)?;
    let ty =
        check(&unit.ctx, &unit.term).map_err(|e| domain(format!("{}: {e}", file.display())))?;
    if let Some(want) = &unit.expected {
        if *want != ty {
            return Err(domain(format!(
                "{}: term has type {ty}, annotated {want}",
                file.display()
            )));
        }
    }
    emit(out, ty)
}

fn cmd_step(file: &FsPath, path: Option<Path>, strategy: Strategy, out: &mut dyn Write) -> Outcome {
    let unit = load(file)?;
    let path = match path {
        Some(p) => p,
        None => {
            let seed = if let Strategy::Random(n) = strategy {
                n
            } else {
                0
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            choose_redex(&unit.term, strategy, &mut rng)
                .ok_or_else(|| domain("the term is in normal form"))?
                .path
        }
    };
    let reduct = reduce_at_in(&unit.ctx, &unit.term, &path).map_err(|e| domain(e.to_string()))?;
    emit(out, reduct)
}

fn cmd_normalize(
    file: &FsPath,
    strategy: Strategy,
    max_steps: usize,
    trace: bool,
    out: &mut dyn Write,
) -> Outcome {
    let unit = load(file)?;
    let n = normalize_in(&unit.ctx, &unit.term, strategy, max_steps);
    if trace {
        for r in &n.trace {
            emit(out, r)?;
        }
    }
    emit(out, &n.term)?;
    if n.exhausted {
        return Err(domain(format!("no normal form within {max_steps} steps")));
    }
    Ok(())
}

fn cmd_explore(file: &FsPath, limit: usize, dot: Option<&FsPath>, out: &mut dyn Write) -> Outcome {
    let unit = load(file)?;
    let g = explore_in(Some(&unit.ctx), &unit.term, limit);
    emit(out, g.summary())?;
    if let Some(p) = dot {
        fs::write(p, g.to_dot()).map_err(|e| domain(format!("{}: {e}", p.display())))?;
    }
    if g.violation_count() > 0 {
        return Err(domain(format!(
            "{} edges change the type",
            g.violation_count()
        )));
    }
    Ok(())
}

fn cmd_classify(file: &FsPath, out: &mut dyn Write) -> Outcome {
    let unit = load(file)?;
    let row = classify_in(&unit.ctx, &unit.term).map_err(|e| domain(e.to_string()))?;
    emit(out, row)
}

fn cmd_gen(
    seed: u64,
    size: usize,
    count: usize,
    goal: Option<&str>,
    out: &mut dyn Write,
) -> Outcome {
    let goal: Option<Formula> = match goal {
        Some(g) => Some(parse_formula(g).map_err(|e| Failure(format!("--goal: {e}"), 2))?),
        None => None,
    };
    for i in 0..count {
        let cfg = GenConfig {
            goal: goal.clone(),
            ..GenConfig::new(seed.wrapping_add(i as u64), size)
        };
        let (ctx, term) = gen_typed(&cfg).map_err(|e| domain(e.to_string()))?;
        let ty =
            check(&ctx, &term).map_err(|e| domain(format!("generated term is ill-typed: {e}")))?;
        if i > 0 {
            emit(out, ";")?;
        }
        emit(
            out,
            SourceUnit {
                ctx,
                term,
                expected: Some(ty),
            },
        )?;
    }
    Ok(())
}

fn read_trace(ctx: &TypingContext, file: &FsPath) -> Result<Vec<Term>, Failure> {
    let src = read(file)?;
    src.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_term_in(ctx, l)
                .map_err(|e| domain(format!("{}: line {}: {e}", file.display(), i + 1)))
        })
        .collect()
}

fn cmd_app(file: &FsPath, trace: Option<&FsPath>, limit: usize, out: &mut dyn Write) -> Outcome {
    let src = read(file)?;
    let sc = parse_scenario(&src).map_err(|e| domain(format!("{}:{e}", file.display())))?;
    let verdict = verify_app(&sc, limit).map_err(|e| domain(e.to_string()))?;
    let word = match verdict {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Inconclusive => "inconclusive",
    };
    emit(out, format!("verify_app {word}"))?;
    let terms = match trace {
        Some(p) => read_trace(&sc.ctx, p)?,
        None => {
            let n = normalize_in(&sc.ctx, &sc.s1(), Strategy::Leftmost, DEFAULT_MAX_STEPS);
            replay(&sc.ctx, &sc.s1(), &n.trace).map_err(|e| domain(e.to_string()))?
        }
    };
    let cert = certify_app(&sc, &terms).map_err(|e| domain(format!("certificate: {e}")))?;
    for line in cert.lines() {
        emit(out, line)?;
    }
    match verdict {
        Verdict::Holds => Ok(()),
        Verdict::Fails => Err(domain("S2 is strongly normalizing but S1 is not")),
        Verdict::Inconclusive => Err(domain(format!("exploration hit the node limit {limit}"))),
    }
}
