//! `qbets`: command line front end.
//!
//! Every command writes one JSON report to stdout. Exit status is 0 on
//! success, 1 when the verdict is negative (incoherent book, contextual
//! frame, no valid assignment, invalid density operator), and 2 when the
//! input could not be used.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qbets::coherence::{check_coherence, extend_to_measure, settle, CoherenceError};
use qbets::entropy::{min_context_entropy, shannon, von_neumann, Base, Distribution};
use qbets::events::{boolean_combine, BoolOp, SampleSpace};
use qbets::frames::{born_frame, check_noncontextual, cross_context_dutch_book, fit_density};
use qbets::hilbert::{born, commute, refine, spectral_decompose, validate_density, DensityViolation};
use qbets::kochen_specker::{gleason_implies_ks_demo, search_assignment, search_assignment_parallel, verify_assignment};
use qbets::twenty_questions::{adversarial_context_demo, BetStatus, GameState, Proposition};
use qbets::{io, DensityOperator, Rational};

#[derive(Parser)]
#[command(name = "qbets", version, about = "Dutch books, quantum betting contexts and contextuality checks")]
struct Cli {
    /// Output format (JSON is the only one).
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the comparison tolerance where one applies.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sample spaces and events.
    #[command(subcommand)]
    Events(EventsCmd),
    /// Dutch-book coherence of a price book.
    #[command(subcommand)]
    Coherence(CoherenceCmd),
    /// Born probability Tr[Π ρ].
    Born { rho: PathBuf, projector: PathBuf },
    /// Projectors, PVMs and spectral decomposition.
    #[command(subcommand)]
    Hilbert(HilbertCmd),
    /// Probability frames over quantum contexts.
    #[command(subcommand)]
    Frames(FramesCmd),
    /// Noncontextual 0/1 assignments.
    #[command(subcommand)]
    Ks(KsCmd),
    /// Shannon and von Neumann entropies.
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Twenty questions and the context-choosing adversary.
    #[command(subcommand)]
    Game(GameCmd),
}

#[derive(Subcommand)]
enum EventsCmd {
    /// Build a sample space from atom labels.
    Space { labels: Vec<String> },
    /// Combine events with AND, OR or NOT.
    Combine {
        /// Comma-separated atom labels.
        #[arg(long)]
        space: String,
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long, allow_hyphen_values = true)]
        e1: String,
        #[arg(long)]
        e2: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    And,
    Or,
    Not,
}

#[derive(Subcommand)]
enum CoherenceCmd {
    Check { book: PathBuf },
    Extend { book: PathBuf },
    /// Payoff of a portfolio when one atom occurs.
    Settle {
        book: PathBuf,
        portfolio: PathBuf,
        #[arg(long)]
        outcome: String,
    },
}

#[derive(Subcommand)]
enum HilbertCmd {
    Projector { file: PathBuf },
    Commute { p: PathBuf, q: PathBuf },
    Refine { a: PathBuf, b: PathBuf },
    Spectral { matrix: PathBuf },
    Validate { matrix: PathBuf },
}

#[derive(Subcommand)]
enum FramesCmd {
    /// Born frame of ρ over the contexts of a frame file.
    Born { rho: PathBuf, contexts: PathBuf },
    Check { frame: PathBuf },
    Fit { frame: PathBuf },
    /// Two-ticket book against unequal prices for equal projectors.
    Book {
        frame: PathBuf,
        /// `context:atom,atom`
        #[arg(long)]
        event: String,
        #[arg(long)]
        against: String,
    },
}

#[derive(Subcommand)]
enum KsCmd {
    Search {
        file: PathBuf,
        /// Split the first branch across two threads.
        #[arg(long)]
        parallel: bool,
    },
    /// Check an assignment: a JSON file or an inline comma-separated 0/1 list.
    Verify { file: PathBuf, assignment: String },
    /// Find a ray whose Born probability is neither near 0 nor near 1.
    Demo { rho: PathBuf },
}

#[derive(Subcommand)]
enum EntropyCmd {
    Vn { rho: PathBuf },
    /// Probabilities as a JSON file or an inline comma-separated list.
    Shannon { probs: String },
    MinContext {
        rho: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum GameCmd {
    Run {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        script: PathBuf,
    },
    Adversary {
        prices: PathBuf,
        #[arg(long, default_value_t = 10)]
        rounds: usize,
    },
}

/// A report and whether its verdict is negative.
struct Outcome {
    report: Value,
    negative: bool,
}

fn ok(report: Value) -> Result<Outcome> {
    Ok(Outcome {
        report,
        negative: false,
    })
}

fn verdict(report: Value, negative: bool) -> Result<Outcome> {
    Ok(Outcome { report, negative })
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    io::parse_json(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load<T>(path: &Path, parse: impl FnOnce(&Value) -> io::Result<T>) -> Result<T> {
    let v = read_json(path)?;
    parse(&v).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_rho(path: &Path) -> Result<DensityOperator> {
    let m = load(path, io::rho_matrix)?;
    validate_density(m).map_err(|d| anyhow!("{}: not a density operator: {d}", path.display()))
}

fn split_labels(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(str::to_string).collect()
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Events(cmd) => events(cmd),
        Command::Coherence(cmd) => coherence(cmd),
        Command::Born { rho, projector } => {
            let rho = load_rho(rho)?;
            let p = load(projector, io::projector)?;
            ok(json!({"command": "born", "probability": report::real(born(&p, &rho)?)}))
        }
        Command::Hilbert(cmd) => hilbert(cmd),
        Command::Frames(cmd) => frames(cmd, cli.tol),
        Command::Ks(cmd) => ks(cmd, cli.seed),
        Command::Entropy(cmd) => entropy(cmd, cli.seed),
        Command::Game(cmd) => game(cmd, cli.seed),
    }
}

fn events(cmd: &EventsCmd) -> Result<Outcome> {
    match cmd {
        EventsCmd::Space { labels } => {
            let s = SampleSpace::new(labels.clone())?;
            ok(json!({"command": "events space", "space": s.labels(), "size": s.size()}))
        }
        EventsCmd::Combine { space, op, e1, e2 } => {
            let s = SampleSpace::new(split_labels(space))?;
            let a = s.event_from_labels(split_labels(e1))?;
            let b = e2.as_deref().map(|x| s.event_from_labels(split_labels(x))).transpose()?;
            let (op, name) = match op {
                Op::And => (BoolOp::And, "and"),
                Op::Or => (BoolOp::Or, "or"),
                Op::Not => (BoolOp::Not, "not"),
            };
            let e = boolean_combine(op, &a, b.as_ref())?;
            ok(json!({
                "command": "events combine",
                "op": name,
                "event": report::event(&e),
                "is_empty": e.is_empty(),
                "is_full": e.is_full(),
            }))
        }
    }
}

fn coherence(cmd: &CoherenceCmd) -> Result<Outcome> {
    match cmd {
        CoherenceCmd::Check { book } => {
            let book = load(book, io::price_book)?;
            let v = check_coherence(&book)?;
            let labels = book.context.space.labels();
            let extension = v.extension.as_ref().map(|m| {
                json!(labels
                    .iter()
                    .zip(&m.atom_probs)
                    .map(|(l, p)| json!({"atom": l, "prob": report::rational(p)}))
                    .collect::<Vec<_>>())
            });
            let settlement = match &v.witness {
                Some(w) => Some(
                    (0..labels.len())
                        .map(|i| Ok(json!({"outcome": labels[i], "payoff": report::rational(&settle(w, &book, i)?)})))
                        .collect::<Result<Vec<Value>>>()?,
                ),
                None => None,
            };
            verdict(
                json!({
                    "command": "coherence check",
                    "context": book.context.id,
                    "coherent": v.coherent,
                    "guaranteed_loss": v.guaranteed_loss.as_ref().map(report::rational),
                    "witness": v.witness.as_ref().map(report::portfolio),
                    "settlement": settlement,
                    "extension": extension,
                }),
                !v.coherent,
            )
        }
        CoherenceCmd::Extend { book } => {
            let book = load(book, io::price_book)?;
            match extend_to_measure(&book) {
                Ok(m) => ok(json!({
                    "command": "coherence extend",
                    "context": book.context.id,
                    "coherent": true,
                    "measure": book.context.space.labels().iter().zip(&m.atom_probs)
                        .map(|(l, p)| json!({"atom": l, "prob": report::rational(p)}))
                        .collect::<Vec<_>>(),
                })),
                Err(CoherenceError::Incoherent { witness, loss }) => verdict(
                    json!({
                        "command": "coherence extend",
                        "context": book.context.id,
                        "coherent": false,
                        "error": "no probability measure reproduces these prices",
                        "guaranteed_loss": report::rational(&loss),
                        "witness": report::portfolio(&witness),
                    }),
                    true,
                ),
                Err(e) => Err(e.into()),
            }
        }
        CoherenceCmd::Settle {
            book,
            portfolio,
            outcome,
        } => {
            let book = load(book, io::price_book)?;
            let p = load(portfolio, |v| io::portfolio(&book, v))?;
            let i = book
                .context
                .space
                .index_of(outcome)
                .ok_or_else(|| anyhow!("unknown outcome {outcome:?}"))?;
            ok(json!({
                "command": "coherence settle",
                "outcome": outcome,
                "payoff": report::rational(&settle(&p, &book, i)?),
            }))
        }
    }
}

fn hilbert(cmd: &HilbertCmd) -> Result<Outcome> {
    match cmd {
        HilbertCmd::Projector { file } => {
            let p = load(file, io::projector)?;
            ok(json!({"command": "hilbert projector", "rank": p.rank(), "matrix": report::matrix(p.matrix())}))
        }
        HilbertCmd::Commute { p, q } => {
            let p = load(p, io::projector)?;
            let q = load(q, io::projector)?;
            ok(json!({"command": "hilbert commute", "commute": commute(&p, &q)?}))
        }
        HilbertCmd::Refine { a, b } => {
            let a = load(a, io::pvm)?;
            let b = load(b, io::pvm)?;
            let r = refine(&a, &b)?;
            ok(json!({
                "command": "hilbert refine",
                "elements": r.labels().iter().zip(r.elements()).map(|(l, p)| json!({
                    "label": l,
                    "rank": p.rank(),
                    "matrix": report::matrix(p.matrix()),
                })).collect::<Vec<_>>(),
            }))
        }
        HilbertCmd::Spectral { matrix } => {
            let m = load(matrix, io::rho_matrix)?;
            let obs = spectral_decompose(&m)?;
            let err = (&obs.reconstruct() - &m).max_abs();
            ok(json!({
                "command": "hilbert spectral",
                "eigenvalues": report::reals(obs.eigenvalues()),
                "projectors": obs.pvm().elements().iter().map(|p| report::matrix(p.matrix())).collect::<Vec<_>>(),
                "reconstruction_error": report::real(err),
            }))
        }
        HilbertCmd::Validate { matrix } => {
            let m = load(matrix, io::rho_matrix)?;
            match validate_density(m) {
                Ok(_) => ok(json!({"command": "hilbert validate", "valid": true, "violations": []})),
                Err(d) => verdict(
                    json!({
                        "command": "hilbert validate",
                        "valid": false,
                        "violations": d.violations.iter().map(|v| match v {
                            DensityViolation::NotHermitian { deviation } =>
                                json!({"kind": "not_hermitian", "value": report::real(*deviation)}),
                            DensityViolation::Trace { trace } =>
                                json!({"kind": "trace", "value": report::real(*trace)}),
                            DensityViolation::NegativeEigenvalue { min } =>
                                json!({"kind": "negative_eigenvalue", "value": report::real(*min)}),
                        }).collect::<Vec<_>>(),
                    }),
                    true,
                ),
            }
        }
    }
}

fn parse_event_spec(spec: &str) -> Result<(String, Vec<String>)> {
    let (ctx, atoms) = spec
        .rsplit_once(':')
        .ok_or_else(|| anyhow!("expected context:atom,atom, got {spec:?}"))?;
    Ok((ctx.to_string(), split_labels(atoms)))
}

fn frame_json(frame: &qbets::frames::Frame<f64>) -> Value {
    let contexts: Vec<Value> = frame
        .contexts()
        .iter()
        .map(|c| {
            json!({
                "id": c.id(),
                "labels": c.space().labels(),
                "basis": c.basis().iter().map(report::vector).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut assignments = Vec::new();
    for (ci, c) in frame.contexts().iter().enumerate() {
        for (l, &p) in c.space().labels().iter().zip(frame.atom_probs(ci)) {
            assignments.push(json!({"context": c.id(), "atoms": [l], "prob": report::real(p)}));
        }
    }
    json!({"contexts": contexts, "assignments": assignments})
}

fn frames(cmd: &FramesCmd, tol: Option<f64>) -> Result<Outcome> {
    match cmd {
        FramesCmd::Born { rho, contexts } => {
            let rho = load_rho(rho)?;
            let ctxs = load(contexts, io::contexts)?;
            let mut out = frame_json(&born_frame(&rho, ctxs)?);
            out["command"] = json!("frames born");
            ok(out)
        }
        FramesCmd::Check { frame } => {
            let f = load(frame, io::frame)?;
            let tol = tol.unwrap_or(1e-8);
            let r = check_noncontextual(&f, tol);
            verdict(
                json!({
                    "command": "frames check",
                    "tol": report::real(tol),
                    "noncontextual": r.noncontextual,
                    "matched_pairs": r.matched_pairs,
                    "violations": r.violations.iter().map(|v| json!({
                        "context_a": v.context_a,
                        "event_a": v.event_a,
                        "prob_a": report::real(v.prob_a),
                        "context_b": v.context_b,
                        "event_b": v.event_b,
                        "prob_b": report::real(v.prob_b),
                        "delta": report::real(v.delta),
                    })).collect::<Vec<_>>(),
                }),
                !r.noncontextual,
            )
        }
        FramesCmd::Fit { frame } => {
            let f = load(frame, io::frame)?;
            let fit = fit_density(&f)?;
            ok(json!({
                "command": "frames fit",
                "rho_hat": report::matrix(fit.rho_hat.matrix()),
                "residual": report::real(fit.residual),
                "constraint_rank": fit.constraint_rank,
                "degenerate": fit.degenerate,
                "low_dimension": fit.low_dimension,
                "iterations": fit.iterations,
            }))
        }
        FramesCmd::Book { frame, event, against } => {
            let f = load(frame, io::frame)?;
            let (cb, ea) = parse_event_spec(event)?;
            let (cb2, eb) = parse_event_spec(against)?;
            let e = f.context(&cb)?.1.space().event_from_labels(ea)?;
            let g = f.context(&cb2)?.1.space().event_from_labels(eb)?;
            let book = cross_context_dutch_book(&f, &e, &cb, &g, &cb2)?;
            let ticket = |t: &qbets::frames::Ticket<f64>| {
                json!({"context": t.context, "event": t.event, "price": report::real(t.price)})
            };
            ok(json!({
                "command": "frames book",
                "bookie_buys": ticket(&book.bookie_buys),
                "bookie_sells": ticket(&book.bookie_sells),
                "sure_loss_per_unit": report::real(book.sure_loss_per_unit),
                "conditional_on": book.conditional_on,
            }))
        }
    }
}

fn parse_assignment(arg: &str) -> Result<Vec<bool>> {
    let inline: Option<Vec<bool>> = arg
        .split(',')
        .map(|x| match x.trim() {
            "0" => Some(false),
            "1" => Some(true),
            _ => None,
        })
        .collect();
    match inline {
        Some(a) => Ok(a),
        None => load(Path::new(arg), io::assignment),
    }
}

fn ks(cmd: &KsCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        KsCmd::Search { file, parallel } => {
            let inst = load(file, io::ks_instance)?;
            let v = if *parallel {
                search_assignment_parallel(&inst)
            } else {
                search_assignment(&inst)
            };
            verdict(
                json!({
                    "command": "ks search",
                    "rays": inst.rays().len(),
                    "bases": inst.bases().len(),
                    "exact": inst.is_exact(),
                    "satisfiable": v.satisfiable,
                    "assignment": v.assignment.as_ref().map(|a| a.iter().map(|&b| b as u8).collect::<Vec<_>>()),
                    "nodes_explored": v.nodes_explored,
                    "parity_obstruction": v.parity_obstruction.as_ref().map(|p| json!({
                        "multiplicities": p.multiplicities,
                        "basis_count": p.basis_count,
                    })),
                }),
                !v.satisfiable,
            )
        }
        KsCmd::Verify { file, assignment } => {
            let inst = load(file, io::ks_instance)?;
            let a = parse_assignment(assignment)?;
            let r = verify_assignment(&inst, &a);
            verdict(
                json!({
                    "command": "ks verify",
                    "valid": r.is_ok(),
                    "violation": r.as_ref().err().map(|e| e.to_string()),
                }),
                r.is_err(),
            )
        }
        KsCmd::Demo { rho } => {
            let rho = load_rho(rho)?;
            let w = gleason_implies_ks_demo(&rho, seed)?;
            ok(json!({
                "command": "ks demo",
                "ray": report::vector(&w.ray),
                "probability": report::real(w.probability),
                "draws": w.draws,
                "band": [report::real(w.band.0), report::real(w.band.1)],
            }))
        }
    }
}

fn parse_probs(arg: &str) -> Result<Vec<f64>> {
    let inline: Option<Vec<f64>> = arg
        .split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<f64>()
                .ok()
                .or_else(|| qbets::scalar::parse_rational(x).map(|q| qbets::scalar::rational_to_f64(&q)))
        })
        .collect();
    match inline {
        Some(p) => Ok(p),
        None => load(Path::new(arg), io::probabilities),
    }
}

fn entropy_value(command: &str, nats: f64) -> Value {
    json!({"command": command, "nats": report::real(nats), "bits": report::real(nats / std::f64::consts::LN_2)})
}

fn entropy(cmd: &EntropyCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        EntropyCmd::Vn { rho } => ok(entropy_value("entropy vn", von_neumann(&load_rho(rho)?, Base::E))),
        EntropyCmd::Shannon { probs } => {
            let d = Distribution::new(parse_probs(probs)?)?;
            ok(entropy_value("entropy shannon", shannon(&d, Base::E)))
        }
        EntropyCmd::MinContext { rho, samples } => {
            let rho = load_rho(rho)?;
            let r = min_context_entropy(&rho, *samples, seed)?;
            let mut out = entropy_value("entropy min-context", r.value);
            out["von_neumann_nats"] = report::real(von_neumann(&rho, Base::E));
            out["is_eigenbasis"] = json!(r.is_eigenbasis);
            out["samples"] = json!(samples);
            out["min_sampled_nats"] = r.sampled.iter().copied().reduce(f64::min).map_or(Value::Null, report::real);
            out["basis"] = json!(r.basis.iter().map(report::vector).collect::<Vec<_>>());
            ok(out)
        }
    }
}

fn game(cmd: &GameCmd, seed: u64) -> Result<Outcome> {
    match cmd {
        GameCmd::Run { lexicon, script } => {
            let lex = load(lexicon, io::lexicon)?;
            let s = load(script, |v| io::game_script(&lex, v))?;
            let mut g = GameState::with_options(lex, s.respondents, seed, s.mode, s.budget)?;
            for (i, q) in s.questions.iter().enumerate() {
                g.ask_with(q.respondent, q.attribute, q.answer)
                    .with_context(|| format!("question {i}"))?;
            }
            for (i, b) in s.bets.iter().enumerate() {
                g.place_bet(b.respondent, b.proposition.clone(), b.price.clone())
                    .with_context(|| format!("bet {i}"))?;
            }
            let lex = g.lexicon().clone();
            let transcript: Vec<Value> = g
                .transcript()
                .iter()
                .map(|a| {
                    json!({
                        "respondent": a.respondent,
                        "attribute": lex.attributes()[a.attribute],
                        "answer": a.answer,
                        "forced": a.forced,
                    })
                })
                .collect();
            let respondents: Vec<Value> = (0..g.respondents())
                .map(|r| {
                    Ok(json!({
                        "respondent": r,
                        "departed": g.has_departed(r),
                        "compatible_words": g.compatible_words(r)?,
                    }))
                })
                .collect::<Result<_>>()?;
            let consistent = g.consistent_words();
            let bets = g.resolve_bets().to_vec();
            let net = bets.iter().fold(Rational::from_integer(0.into()), |acc, b| acc + b.payoff());
            ok(json!({
                "command": "game run",
                "transcript": transcript,
                "consistent_words": consistent,
                "respondents": respondents,
                "bets": bets.iter().map(|b| json!({
                    "id": b.id,
                    "respondent": b.respondent,
                    "proposition": match b.proposition {
                        Proposition::Word(w) => json!({"word": lex.words()[w]}),
                        Proposition::Attribute(a, v) => json!({"attribute": lex.attributes()[a], "value": v}),
                    },
                    "price": report::rational(&b.price),
                    "status": match b.status {
                        BetStatus::Open => "open",
                        BetStatus::Won => "won",
                        BetStatus::Lost => "lost",
                        BetStatus::Void => "void",
                    },
                    "payoff": report::rational(&b.payoff()),
                })).collect::<Vec<_>>(),
                "net_payoff": report::rational(&net),
            }))
        }
        GameCmd::Adversary { prices, rounds } => {
            let prices = load(prices, io::context_prices)?;
            let r = adversarial_context_demo(&prices, *rounds, seed)?;
            ok(json!({
                "command": "game adversary",
                "n_rounds": rounds,
                "rounds": r.rounds.iter().map(|x| json!({
                    "bought": x.bought,
                    "price": report::rational(&x.price),
                    "chosen": x.chosen,
                })).collect::<Vec<_>>(),
                "total_loss": report::rational(&r.total_loss),
            }))
        }
    }
}

fn emit(v: &Value) {
    use std::io::Write;
    // A closed pipe is not worth a panic.
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(v).expect("reports serialize"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit(&json!({"error": e.kind().to_string(), "detail": e.to_string().trim()}));
            return ExitCode::from(2);
        }
    };
    let Format::Json = cli.format;
    match run(&cli) {
        Ok(out) => {
            emit(&out.report);
            ExitCode::from(out.negative as u8)
        }
        Err(e) => {
            emit(&json!({"error": format!("{e:#}")}));
            ExitCode::from(2)
        }
    }
}
