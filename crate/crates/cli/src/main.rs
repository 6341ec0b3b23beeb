use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tiebreak::axioms::{entails, AxiomSet, UniverseMode};
use tiebreak::battery::{self, BatteryReport};
use tiebreak::dominance::{
    falsifying_utility, match_dominance, match_partition, prefix_probabilities,
    stochastic_dominance, VerdictKind,
};
use tiebreak::plurality::{
    better_replies, run_dynamics, GameState, Outcome, Profile, ProofCache, Scheduler,
};
use tiebreak::preferences::{expected_utility, PreferenceOrder, Roster, WinnerSet};

/// Exit code for malformed input or out-of-bound requests.
const EXIT_INPUT: u8 = 64;

#[derive(Parser)]
#[command(name = "tiebreak", version)]
#[command(about = "Compare tied winner sets under uniform random tie-breaking")]
struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stochastic dominance of X over Y (exit 0 strict, 1 equivalent, 2 incomparable, 3 dominated)
    Sd { pref: String, x: String, y: String },
    /// Match-dominance of X over Y (exit 0 iff X match-dominates Y)
    Match { pref: String, x: String, y: String },
    /// Derive X > Y from set-extension axioms (exit 0 iff entailed)
    Entail {
        pref: String,
        x: String,
        y: String,
        /// Axiom families, e.g. kgr or kmdr
        #[arg(long, default_value = "kgr")]
        axioms: String,
        #[arg(long, value_enum, default_value_t = Mode::Set)]
        mode: Mode,
        /// Multiplicity cap in multiset mode (default: number of candidates)
        #[arg(long)]
        max_mult: Option<u32>,
    },
    /// A consistent utility under which X is no better than Y (exit 0 iff one exists)
    Falsify { pref: String, x: String, y: String },
    /// SD better replies in a Plurality profile file
    Replies {
        profile: PathBuf,
        /// Only this voter (0-based)
        #[arg(long)]
        voter: Option<usize>,
        /// Attach K+G+R derivations
        #[arg(long)]
        proofs: bool,
    },
    /// Better-reply dynamics from a Plurality profile file
    Dynamics {
        profile: PathBuf,
        #[arg(long, value_enum, default_value_t = SchedulerArg::RoundRobin)]
        scheduler: SchedulerArg,
        /// Seed for the random scheduler
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        #[arg(long)]
        proofs: bool,
    },
    /// Run an exhaustive verification battery (exit 0 iff everything agrees)
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Number of candidates
        #[arg(long)]
        m: Option<usize>,
        /// Number of voters (better-reply suite)
        #[arg(long)]
        n: Option<usize>,
        /// Multiplicity cap (multiset-equivalence)
        #[arg(long, default_value_t = 3)]
        max_mult: u32,
        /// Universe mode (soundness)
        #[arg(long, value_enum, default_value_t = Mode::Set)]
        mode: Mode,
        /// Axiom families (soundness)
        #[arg(long, default_value = "kgr")]
        axioms: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Set,
    Multiset,
}

impl From<Mode> for UniverseMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Set => UniverseMode::Set,
            Mode::Multiset => UniverseMode::Multiset,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchedulerArg {
    RoundRobin,
    LowestIndex,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// Better replies: strict SD iff K+G+R entailment
    #[value(name = "lemma1", alias = "replies")]
    Replies,
    /// Strict SD iff K+MD+R entailment over multisets
    #[value(name = "theorem2", alias = "completeness")]
    Completeness,
    /// Every G edge lies in the closure of the duplication instances
    MdEntailsG,
    /// SD, utility dominance and match-dominance agree on set pairs
    Equivalence,
    /// The same three-way agreement on multisets
    MultisetEquivalence,
    /// Falsifying utilities are consistent and do not prefer X
    Falsify,
    /// Reversing the order swaps the roles of X and Y
    Duality,
    /// Every closed edge is SD-sound
    Soundness,
}

type CliResult = Result<u8, String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let json = cli.json;
    match cli.command {
        Command::Sd { pref, x, y } => cmd_sd(&pref, &x, &y, json),
        Command::Match { pref, x, y } => cmd_match(&pref, &x, &y, json),
        Command::Entail {
            pref,
            x,
            y,
            axioms,
            mode,
            max_mult,
        } => cmd_entail(&pref, &x, &y, &axioms, mode, max_mult, json),
        Command::Falsify { pref, x, y } => cmd_falsify(&pref, &x, &y, json),
        Command::Replies {
            profile,
            voter,
            proofs,
        } => cmd_replies(&profile, voter, proofs, json),
        Command::Dynamics {
            profile,
            scheduler,
            seed,
            max_steps,
            proofs,
        } => {
            let scheduler = match scheduler {
                SchedulerArg::RoundRobin => Scheduler::RoundRobin,
                SchedulerArg::LowestIndex => Scheduler::LowestIndexFirst,
                SchedulerArg::Random => Scheduler::Random { seed },
            };
            cmd_dynamics(&profile, scheduler, max_steps, proofs, json)
        }
        Command::Verify {
            suite,
            m,
            n,
            max_mult,
            mode,
            axioms,
        } => cmd_verify(suite, m, n, max_mult, mode, &axioms, json),
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

struct Query {
    roster: Roster,
    order: PreferenceOrder,
    x: WinnerSet,
    y: WinnerSet,
}

fn parse_query(pref: &str, x: &str, y: &str) -> Result<Query, String> {
    let roster = Roster::from_chain(pref).map_err(err)?;
    let order = PreferenceOrder::parse(pref, &roster).map_err(err)?;
    let x = WinnerSet::parse(x, &roster).map_err(err)?;
    let y = WinnerSet::parse(y, &roster).map_err(err)?;
    Ok(Query {
        roster,
        order,
        x,
        y,
    })
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string(v).expect("serializable"));
}

fn fractions(v: &[impl ToString]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn cmd_sd(pref: &str, x: &str, y: &str, json: bool) -> CliResult {
    let q = parse_query(pref, x, y)?;
    let v = stochastic_dominance(&q.order, &q.x, &q.y).map_err(err)?;
    let px = fractions(&prefix_probabilities(&q.order, &q.x).map_err(err)?);
    let py = fractions(&prefix_probabilities(&q.order, &q.y).map_err(err)?);
    let prefix = |j: usize| {
        q.roster.format_set(
            &WinnerSet::from_members(q.order.len(), q.order.ranking()[..j].iter().copied())
                .expect("j >= 1"),
        )
    };
    if json {
        print_json(&json!({
            "verdict": v.kind.tag(),
            "x_ahead": v.x_ahead,
            "y_ahead": v.y_ahead,
            "x_prefix_probabilities": px,
            "y_prefix_probabilities": py,
        }));
    } else {
        println!("{}", v.kind);
        println!("P(X in top-j) = ({})", px.join(", "));
        println!("P(Y in top-j) = ({})", py.join(", "));
        if let Some(j) = v.x_ahead {
            println!("witness: X ahead on top-{j} {}", prefix(j));
        }
        if let Some(j) = v.y_ahead {
            println!("witness: Y ahead on top-{j} {}", prefix(j));
        }
    }
    Ok(match v.kind {
        VerdictKind::StrictlyDominates => 0,
        VerdictKind::Equivalent => 1,
        VerdictKind::Incomparable => 2,
        VerdictKind::Dominated => 3,
    })
}

fn cmd_match(pref: &str, x: &str, y: &str, json: bool) -> CliResult {
    let q = parse_query(pref, x, y)?;
    let holds = match_dominance(&q.order, &q.x, &q.y).map_err(err)?;
    // the partition is always of the larger side into |smaller| blocks
    let (small, large, order) = if q.x.size() <= q.y.size() {
        (&q.x, &q.y, q.order.clone())
    } else {
        (&q.y, &q.x, q.order.reverse())
    };
    let partition = match_partition(&order, large, small.size()).map_err(err)?;
    let pairs: Vec<(String, String)> = small
        .ascending(&order)
        .iter()
        .zip(&partition.blocks)
        .map(|(&xj, block)| {
            let labels: Vec<&str> = block.iter().map(|&c| q.roster.label(c)).collect();
            (
                q.roster.label(xj).to_string(),
                format!("{{{}}}", labels.join(",")),
            )
        })
        .collect();
    if json {
        let blocks: Vec<Value> = pairs
            .iter()
            .map(|(x, b)| json!({"element": x, "block": b}))
            .collect();
        print_json(&json!({
            "match_dominates": holds,
            "reversed": q.x.size() > q.y.size(),
            "cuts": partition.cuts,
            "blocks": blocks,
        }));
    } else {
        println!(
            "{}",
            if holds {
                "MATCH-DOMINATES"
            } else {
                "NOT MATCH-DOMINATED"
            }
        );
        if q.x.size() > q.y.size() {
            println!("(|X| > |Y|: Y against X under the reverse order)");
        }
        for (x, b) in &pairs {
            println!("{x} vs {b}");
        }
    }
    Ok(if holds { 0 } else { 1 })
}

fn cmd_entail(
    pref: &str,
    x: &str,
    y: &str,
    axioms: &str,
    mode: Mode,
    max_mult: Option<u32>,
    json: bool,
) -> CliResult {
    let q = parse_query(pref, x, y)?;
    let axioms: AxiomSet = axioms.parse()?;
    let d = entails(&q.order, &q.x, &q.y, axioms, mode.into(), max_mult).map_err(err)?;
    if json {
        print_json(&json!({
            "entailed": d.is_some(),
            "axioms": axioms.to_string(),
            "derivation": d.as_ref().map(|d| d.to_json(&q.roster)),
        }));
    } else {
        match &d {
            Some(d) => print!("{}", d.to_text(&q.roster)),
            None => println!("NOT ENTAILED"),
        }
    }
    Ok(if d.is_some() { 0 } else { 1 })
}

fn cmd_falsify(pref: &str, x: &str, y: &str, json: bool) -> CliResult {
    let q = parse_query(pref, x, y)?;
    let u = falsifying_utility(&q.order, &q.x, &q.y).map_err(err)?;
    let values = |u: &tiebreak::preferences::UtilityFunction| -> Vec<(String, String)> {
        q.roster
            .candidates()
            .map(|c| (q.roster.label(c).to_string(), u.value(c).to_string()))
            .collect()
    };
    match &u {
        Some(u) => {
            let ux = expected_utility(u, &q.x).map_err(err)?;
            let uy = expected_utility(u, &q.y).map_err(err)?;
            if json {
                let map: serde_json::Map<String, Value> =
                    values(u).into_iter().map(|(k, v)| (k, json!(v))).collect();
                print_json(&json!({"utility": map, "u_x": ux.to_string(), "u_y": uy.to_string()}));
            } else {
                let shown: Vec<String> = values(u)
                    .into_iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                println!("u = ({})", shown.join(", "));
                println!("u(X) = {ux}");
                println!("u(Y) = {uy}");
            }
        }
        None => {
            if json {
                print_json(&json!({"utility": null}));
            } else {
                println!("NONE (X match-dominates Y)");
            }
        }
    }
    Ok(if u.is_some() { 0 } else { 1 })
}

fn load_profile(path: &PathBuf) -> Result<(Roster, Profile), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Profile::parse(&text).map_err(err)
}

fn cmd_replies(path: &PathBuf, voter: Option<usize>, proofs: bool, json: bool) -> CliResult {
    let (roster, profile) = load_profile(path)?;
    let state = GameState::new(profile);
    let voters: Vec<usize> = match voter {
        Some(v) => vec![v],
        None => (0..state.profile().voters()).collect(),
    };
    let mut cache = ProofCache::new();
    if !json {
        println!("winners {}", roster.format_set(state.winners()));
    }
    for v in voters {
        let replies = better_replies(&state, v, proofs.then_some(&mut cache)).map_err(err)?;
        for r in &replies {
            if json {
                print_json(&r.to_json(&roster));
            } else {
                println!(
                    "voter {v}: {} -> {} gives {} over {}",
                    roster.label(r.old_ballot),
                    roster.label(r.new_ballot),
                    roster.format_set(&r.new_winners),
                    roster.format_set(&r.old_winners)
                );
                if let Some(d) = &r.certificate.derivation {
                    for line in d.to_text(&roster).lines() {
                        println!("  {line}");
                    }
                }
            }
        }
        if replies.is_empty() && !json {
            println!("voter {v}: no better reply");
        }
    }
    Ok(0)
}

fn cmd_dynamics(
    path: &PathBuf,
    scheduler: Scheduler,
    max_steps: usize,
    proofs: bool,
    json: bool,
) -> CliResult {
    let (roster, profile) = load_profile(path)?;
    let trace = run_dynamics(profile, scheduler, max_steps, proofs).map_err(err)?;
    let outcome = match trace.outcome {
        Outcome::Equilibrium => "equilibrium",
        Outcome::StepLimit => "step-limit",
    };
    for step in &trace.steps {
        if json {
            print_json(&step.to_json(&roster));
        } else {
            let r = &step.reply;
            println!(
                "step {}: voter {} {} -> {}, winners {} -> {}",
                step.step,
                r.voter,
                roster.label(r.old_ballot),
                roster.label(r.new_ballot),
                roster.format_set(&r.old_winners),
                roster.format_set(&r.new_winners)
            );
        }
    }
    if json {
        print_json(&json!({
            "outcome": outcome,
            "steps": trace.steps.len(),
            "winners": roster.format_set(trace.last.winners()),
        }));
    } else {
        println!(
            "{outcome} after {} steps, winners {}",
            trace.steps.len(),
            roster.format_set(trace.last.winners())
        );
    }
    Ok(0)
}

fn cmd_verify(
    suite: Suite,
    m: Option<usize>,
    n: Option<usize>,
    max_mult: u32,
    mode: Mode,
    axioms: &str,
    json: bool,
) -> CliResult {
    let (report, success): (BatteryReport, &str) = match suite {
        Suite::Replies => (
            battery::reply_characterization(m.unwrap_or(4), n.unwrap_or(3)).map_err(err)?,
            "all deviation pairs agree",
        ),
        Suite::Completeness => (
            battery::completeness(m.unwrap_or(3)).map_err(err)?,
            "all pairs agree",
        ),
        Suite::MdEntailsG => (
            battery::md_entails_g(m.unwrap_or(4)).map_err(err)?,
            "all G edges derivable",
        ),
        Suite::Equivalence => (
            battery::set_equivalence(m.unwrap_or(6)).map_err(err)?,
            "all pairs agree",
        ),
        Suite::MultisetEquivalence => (
            battery::multiset_equivalence(m.unwrap_or(4), max_mult).map_err(err)?,
            "all pairs agree",
        ),
        Suite::Falsify => (
            battery::falsify(m.unwrap_or(5)).map_err(err)?,
            "all falsifiers verified",
        ),
        Suite::Duality => (
            battery::duality(m.unwrap_or(5)).map_err(err)?,
            "all pairs agree",
        ),
        Suite::Soundness => {
            let axioms: AxiomSet = axioms.parse()?;
            (
                battery::soundness(m.unwrap_or(4), mode.into(), axioms).map_err(err)?,
                "all closed edges sound",
            )
        }
    };
    if json {
        let mut v = serde_json::to_value(&report).expect("serializable");
        v["passed"] = json!(report.passed());
        print_json(&v);
    } else {
        println!(
            "{}: checked {}, agreed {}",
            report.suite, report.checked, report.agreed
        );
        for c in &report.counterexamples {
            println!("counterexample: {c}");
        }
        println!(
            "{}",
            if report.passed() {
                success
            } else {
                "DISAGREEMENTS FOUND"
            }
        );
    }
    Ok(if report.passed() { 0 } else { 1 })
}
