mod io;
mod play;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ctmtl::eval::{eval_at, satisfying_positions};
use ctmtl::formula::{
    alphabet, classify_fragment, depth, desugar, max_constant, modal_depth, normalize_thresholds, Alphabet, Fragment,
};
use ctmtl::game::{
    default_intervals, params_for, separation_fixture, solve_game, verify_game_theorem, Budget, FixtureFamily,
    FixtureParams, GameParams,
};
use ctmtl::gen::{random_formula, random_word, rng, FormulaParams, WordParams};
use ctmtl::transform::{compile_with, CompilationResult, CompileOptions, Construction, TransformError};
use ctmtl::witness::{extend, project, roundtrip_compiled, RoundtripOptions, RoundtripReport};
use ctmtl::{Interval, TimedWord, F};
use serde_json::{json, Value};

use crate::io::{load_trace, write_file, Failure, FormulaArg, Out, Result};

#[derive(Debug, Parser)]
#[command(name = "ctmtlkit", version, about = "Counting metric temporal logic over finite timed words")]
struct Cli {
    /// One JSON record per line instead of human output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a formula and print it back
    Parse {
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Desugar and normalize threshold untils
    Normalize {
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Evaluate a formula on a trace
    Eval {
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long, short = 't', value_name = "PATH")]
        trace: PathBuf,
        /// Position to evaluate at (0-based)
        #[arg(long, default_value_t = 0)]
        at: usize,
        /// Also list every satisfying position
        #[arg(long)]
        positions: bool,
    },
    /// Compile into plain MTL over extended alphabets
    Compile {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        compile: CompileArgs,
    },
    /// Build the witness extension of a trace
    Extend {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        compile: CompileArgs,
        #[arg(long, short = 't', value_name = "PATH")]
        trace: PathBuf,
    },
    /// Project an extended trace back to the base alphabet
    Project {
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        compile: CompileArgs,
        #[arg(long, short = 't', value_name = "PATH")]
        trace: PathBuf,
    },
    /// Check that compilation preserves satisfiability
    Roundtrip(RoundtripArgs),
    /// Counting Ehrenfeucht-Fraisse games
    #[command(subcommand)]
    Game(GameCommand),
    /// Write the separating word families to trace files
    Fixtures {
        /// Family name, or `all`
        #[arg(long, default_value = "all")]
        family: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct CompileArgs {
    /// Emit the uncorrected counter formulas (unsound, for comparison)
    #[arg(long)]
    as_printed: bool,
    /// Extra base symbols, comma separated
    #[arg(long, value_delimiter = ',')]
    alphabet: Vec<String>,
}

impl CompileArgs {
    fn construction(&self) -> Construction {
        if self.as_printed {
            Construction::AsPrinted
        } else {
            Construction::Corrected
        }
    }

    fn options(&self, extra: Option<&Alphabet>) -> CompileOptions {
        let mut sigma: Alphabet = self.alphabet.iter().map(|s| s.as_str().into()).collect();
        if let Some(e) = extra {
            sigma.extend(e.iter().cloned());
        }
        CompileOptions {
            construction: self.construction(),
            alphabet: Some(sigma),
        }
    }
}

#[derive(Debug, Args)]
struct RoundtripArgs {
    /// Formula to check; random formulas when absent
    #[command(flatten)]
    formula: FormulaArg,
    #[command(flatten)]
    compile: CompileArgs,
    /// Check this single trace instead of random ones
    #[arg(long, short = 't', value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Random seed; CTMTLKIT_SEED takes precedence
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    /// Mutations of each extension
    #[arg(long, default_value_t = 64)]
    mutations: usize,
    /// Longest random word
    #[arg(long, default_value_t = 8)]
    max_len: usize,
    /// Deepest random formula
    #[arg(long, default_value_t = 2)]
    depth: usize,
}

#[derive(Debug, Args)]
struct GameArgs {
    #[arg(long, value_name = "PATH")]
    rho1: PathBuf,
    #[arg(long, value_name = "PATH")]
    rho2: PathBuf,
    #[arg(long, short = 'r', default_value_t = 1)]
    rounds: usize,
    #[arg(long, short = 'k', default_value_t = 1)]
    pebbles: usize,
    /// Fragment whose moves are allowed
    #[arg(long, default_value = "CTMTL")]
    fragment: String,
    /// Allowed intervals (repeatable); the default family when absent
    #[arg(long = "interval", value_name = "INTERVAL")]
    intervals: Vec<String>,
    /// Start configuration `i,j`
    #[arg(long, default_value = "0,0")]
    start: String,
    /// Solver node budget
    #[arg(long, default_value_t = Budget::default().nodes)]
    budget: u64,
}

impl GameArgs {
    fn words(&self) -> Result<(TimedWord, TimedWord)> {
        Ok((load_trace(&self.rho1)?, load_trace(&self.rho2)?))
    }

    fn params(&self, w1: &TimedWord, w2: &TimedWord) -> Result<GameParams> {
        let fragment = Fragment::from_name(&self.fragment)
            .ok_or_else(|| Failure::usage("cli.fragment", format!("unknown fragment `{}`", self.fragment)))?;
        let intervals = if self.intervals.is_empty() {
            default_intervals(w1, w2, fragment)
        } else {
            self.intervals
                .iter()
                .map(|s| s.parse::<Interval>().map_err(|e| Failure::usage("formula.interval", e.to_string())))
                .collect::<Result<Vec<_>>>()?
        };
        let start = self
            .start
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| Failure::usage("cli.start", format!("`{}` is not a pair `i,j`", self.start)))?;
        let mut p = GameParams::new(self.rounds, self.pebbles, intervals, fragment);
        p.start = start;
        Ok(p)
    }

    fn budget(&self) -> Budget {
        Budget { nodes: self.budget }
    }
}

#[derive(Debug, Subcommand)]
enum GameCommand {
    /// Solve a game exactly, or check that a distinguishing formula gives Spoiler a win
    Solve {
        #[command(flatten)]
        game: GameArgs,
        /// Read rounds, pebbles, intervals and moves off this formula
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Play Spoiler against the solver on stdin
    Play {
        #[command(flatten)]
        game: GameArgs,
        /// Derive the game from a formula
        #[command(flatten)]
        formula: FormulaArg,
        /// Print a JSON state line after every round
        #[arg(long)]
        dump_state: bool,
    },
}

fn seed(flag: u64) -> Result<u64> {
    match std::env::var("CTMTLKIT_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::usage("cli.seed", format!("CTMTLKIT_SEED=`{s}` is not a natural number"))),
        Err(_) => Ok(flag),
    }
}

fn names(a: &Alphabet) -> Vec<String> {
    a.iter().map(ToString::to_string).collect()
}

fn formula_record(f: &F) -> Value {
    json!({
        "formula": f.to_string(),
        "fragment": classify_fragment(f).name(),
        "depth": depth(f),
        "modal_depth": modal_depth(f),
        "max_constant": max_constant(f).to_string(),
        "alphabet": names(&alphabet(f)),
    })
}

fn compilation_record(r: &CompilationResult) -> Value {
    let defs: Vec<Value> = r
        .definitions
        .iter()
        .map(|d| {
            json!({
                "witness": d.definition.witness.to_string(),
                "body": d.definition.body.to_string(),
                "route": d.route,
                "projection": d.kind(),
                "fresh": d.elimination.fresh.iter().map(ToString::to_string).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "mtl": r.mtl_formula.to_string(),
        "construction": r.construction,
        "projection": r.projection_kind(),
        "base_alphabet": names(&r.base_alphabet),
        "witness_alphabet": names(&r.witness_alphabet),
        "fresh_alphabet": names(&r.fresh_alphabet),
        "definitions": defs,
        "strict_models_only": r.assumes_strict_models,
    })
}

fn compilation_human(r: &CompilationResult) -> String {
    let mut s = format!("{}\n", r.mtl_formula);
    let join = |a: &Alphabet| names(a).join(", ");
    s += &format!("# base alphabet: {}\n", join(&r.base_alphabet));
    s += &format!("# witnesses: {}\n", join(&r.witness_alphabet));
    s += &format!("# fresh symbols: {}\n", join(&r.fresh_alphabet));
    s += &format!("# projection: {}\n", json!(r.projection_kind()).as_str().unwrap_or_default());
    for d in &r.definitions {
        s += &format!(
            "# {} := {} via {}\n",
            d.definition.witness,
            d.definition.body,
            json!(d.route).as_str().unwrap_or_default()
        );
    }
    s
}

fn run(cli: Cli) -> Result<u8> {
    let out = Out { json: cli.json };
    match cli.command {
        Command::Parse { formula } => {
            let f = formula.load()?;
            out.emit(|| f.to_string(), || formula_record(&f));
        }
        Command::Normalize { formula } => {
            let f = formula.load()?;
            let g = normalize_thresholds(&desugar(&f));
            out.emit(|| g.to_string(), || json!({ "input": f.to_string(), "normalized": g.to_string() }));
        }
        Command::Eval {
            formula,
            trace,
            at,
            positions,
        } => {
            let f = formula.load()?;
            let w = load_trace(&trace)?;
            let holds = eval_at(&w, at, &f)?;
            let all: Vec<usize> = if positions {
                satisfying_positions(&w, &f).iter().collect()
            } else {
                Vec::new()
            };
            out.emit(
                || {
                    let mut s = holds.to_string();
                    if positions {
                        s += &format!("\npositions: {}", all.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
                    }
                    s
                },
                || {
                    let mut r = json!({ "formula": f.to_string(), "position": at, "satisfied": holds });
                    if positions {
                        r["positions"] = json!(all);
                    }
                    r
                },
            );
        }
        Command::Compile { formula, compile } => {
            let f = formula.load()?;
            let r = compile_with(&f, &compile.options(None))?;
            out.emit(|| compilation_human(&r), || compilation_record(&r));
        }
        Command::Extend {
            formula,
            compile,
            trace,
        } => {
            let f = formula.load()?;
            let w = load_trace(&trace)?;
            let r = compile_with(&f, &compile.options(Some(&w.alphabet())))?;
            let ext = extend(&r, &w)?;
            out.emit(|| ext.to_trace(), || json!({ "trace": ext.to_trace(), "points": ext.len() }));
        }
        Command::Project {
            formula,
            compile,
            trace,
        } => {
            let f = formula.load()?;
            let w = load_trace(&trace)?;
            let r = compile_with(&f, &compile.options(None))?;
            let stray: BTreeSet<_> = w
                .alphabet()
                .into_iter()
                .filter(|s| !r.base_alphabet.contains(s) && !r.erased_alphabet().contains(s))
                .collect();
            // Symbols unknown to the compilation belong to the base word.
            let r = if stray.is_empty() {
                r
            } else {
                compile_with(&f, &compile.options(Some(&stray)))?
            };
            let back = project(&r, &w)?;
            out.emit(|| back.to_trace(), || json!({ "trace": back.to_trace(), "points": back.len() }));
        }
        Command::Roundtrip(args) => return roundtrip(out, args),
        Command::Game(GameCommand::Solve { game, formula }) => {
            let (w1, w2) = game.words()?;
            if formula.given() {
                let f = formula.load()?;
                let v = verify_game_theorem(&f, &w1, &w2, &game.budget())?;
                out.emit(
                    || {
                        format!(
                            "winner: {:?}\nrounds: {}, pebbles: {}, fragment: {}, intervals: {}\nstates: {}\nconsistent: {}",
                            v.winner,
                            v.rounds,
                            v.pebbles,
                            v.fragment.name(),
                            v.intervals.join(" "),
                            v.states,
                            v.consistent
                        )
                    },
                    || json!(v),
                );
                if !v.consistent {
                    return Err(Failure::violation(format!("{f} distinguishes the words but Duplicator wins")));
                }
            } else {
                let params = game.params(&w1, &w2)?;
                let sol = solve_game(&w1, &w2, &params, &game.budget())?;
                out.emit(
                    || format!("winner: {:?}\nstates: {}", sol.winner, sol.states),
                    || {
                        let mut r = json!(sol);
                        r["params"] = json!(params);
                        r
                    },
                );
            }
        }
        Command::Game(GameCommand::Play {
            game,
            formula,
            dump_state,
        }) => {
            let (w1, w2) = game.words()?;
            let params = if formula.given() {
                params_for(&formula.load()?)
            } else {
                game.params(&w1, &w2)?
            };
            for (p, w) in [(params.start.0, &w1), (params.start.1, &w2)] {
                if p >= w.len() {
                    return Err(ctmtl::game::GameError::OutOfRange { position: p, len: w.len() }.into());
                }
            }
            let mut session = play::Session::new(&w1, &w2, &params, &game.budget(), dump_state);
            let stdin = std::io::stdin();
            let mut stdout = std::io::stdout();
            session.run(stdin.lock(), &mut stdout)?;
        }
        Command::Fixtures { family, n, k, out: dir } => {
            let families: Vec<FixtureFamily> = if family == "all" {
                FixtureFamily::ALL.to_vec()
            } else {
                vec![FixtureFamily::from_name(&family)
                    .ok_or_else(|| Failure::usage("cli.family", format!("unknown fixture family `{family}`")))?]
            };
            std::fs::create_dir_all(&dir)
                .map_err(|e| Failure::usage("io.write", format!("{}: {e}", dir.display())))?;
            for fam in families {
                let fx = separation_fixture(fam, &FixtureParams { n, k })?;
                let stem = dir.join(fam.name());
                let path = |ext: &str| stem.with_extension(ext);
                write_file(&path("ctmtl"), &format!("{}\n", fx.formula))?;
                write_file(&path("rho1.trace"), &fx.rho1.to_trace())?;
                write_file(&path("rho2.trace"), &fx.rho2.to_trace())?;
                out.emit(
                    || {
                        format!(
                            "{}: {} | rho1 {} points ({}) | rho2 {} points ({}) -> {}",
                            fam.name(),
                            fx.formula,
                            fx.rho1.len(),
                            if fx.expected.0 { "sat" } else { "unsat" },
                            fx.rho2.len(),
                            if fx.expected.1 { "sat" } else { "unsat" },
                            stem.display()
                        )
                    },
                    || {
                        json!({
                            "family": fam.name(),
                            "n": n,
                            "k": k,
                            "formula": fx.formula.to_string(),
                            "rho1_points": fx.rho1.len(),
                            "rho2_points": fx.rho2.len(),
                            "expected": [fx.expected.0, fx.expected.1],
                            "files": [path("ctmtl"), path("rho1.trace"), path("rho2.trace")],
                        })
                    },
                );
            }
        }
    }
    Ok(io::OK)
}

fn report_line(report: &RoundtripReport) -> String {
    format!(
        "{} | model {} | forward {} | backward {} | {} mutations, {} mutated models, {} spurious",
        if report.passed() { "pass" } else { "FAIL" },
        report.satisfied,
        report.forward,
        report.backward,
        report.mutations,
        report.mutated_models,
        report.spurious
    )
}

fn roundtrip(out: Out, args: RoundtripArgs) -> Result<u8> {
    let seed = seed(args.seed)?;
    let construction = args.compile.construction();
    let fixed = if args.formula.given() {
        Some(args.formula.load()?)
    } else {
        None
    };
    let mut sigma: Alphabet = args.compile.alphabet.iter().map(|s| s.as_str().into()).collect();
    if let Some(f) = &fixed {
        sigma.extend(alphabet(f));
    }
    if sigma.is_empty() {
        sigma = ["a", "b"].into_iter().map(Into::into).collect();
    }
    let symbols: Vec<&str> = sigma.iter().map(|s| &**s).collect();
    let mut r = rng(seed);
    let fp = FormulaParams::new(&symbols, args.depth);
    let wp = WordParams::new(&symbols, args.max_len.max(1));

    let single = match &args.trace {
        Some(t) => Some(load_trace(t)?),
        None => None,
    };
    let cases = if single.is_some() { 1 } else { args.cases };
    let (mut failures, mut refused, mut done) = (0, 0, 0);
    let mut case = 0u64;
    while done < cases {
        case += 1;
        let f = match &fixed {
            Some(f) => f.clone(),
            None => random_formula(&mut r, &fp),
        };
        let w = match &single {
            Some(w) => w.clone(),
            None => random_word(&mut r, &wp),
        };
        let mut base = sigma.clone();
        base.extend(w.alphabet());
        let copts = CompileOptions {
            construction,
            alphabet: Some(base),
        };
        let compiled = match compile_with(&f, &copts) {
            Ok(c) => c,
            Err(TransformError::PunctualUtGe(_)) if fixed.is_none() => {
                refused += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let opts = RoundtripOptions {
            construction,
            mutations: args.mutations,
            seed: seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(case),
        };
        let report = roundtrip_compiled(&compiled, &w, &opts)?;
        done += 1;
        failures += usize::from(!report.passed());
        out.emit(
            || {
                let mut s = format!("{f} on {w}: {}", report_line(&report));
                if let Some(c) = &report.counterexample {
                    s += &format!("\n  counterexample extension:\n{}", indent(c));
                }
                s
            },
            || json!({ "formula": f.to_string(), "trace": w.to_trace(), "report": report }),
        );
    }
    out.emit(
        || format!("{done} cases, {failures} failures, {refused} punctual #b>=n untils redrawn (seed {seed})"),
        || json!({ "summary": { "cases": done, "failures": failures, "redrawn": refused, "seed": seed } }),
    );
    if failures > 0 {
        return Err(Failure::violation(format!("{failures} of {done} round trips failed")));
    }
    Ok(io::OK)
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => f.report(),
    }
}
