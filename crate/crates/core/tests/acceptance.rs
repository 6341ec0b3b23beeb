//! Acceptance gate. Runs as a plain binary (`harness = false`) so that every
//! criterion prints exactly one PASS/FAIL line regardless of capture settings.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tiebreak::axioms::{entails, AxiomSet, ProofSystem, Relation, UniverseMode};
use tiebreak::battery::{self, BatteryReport};
use tiebreak::dominance::{stochastic_dominance, VerdictKind};
use tiebreak::preferences::{
    expected_utility, PreferenceOrder, Roster, UtilityFunction, WinnerSet,
};

/// Wall-clock budgets. Criteria without an explicit budget only need to finish.
const EQUIVALENCE_BUDGET: Duration = Duration::from_secs(5);
const REPLIES_BUDGET: Duration = Duration::from_secs(120);
const COMPLETENESS_BUDGET: Duration = Duration::from_secs(120);

/// Sample size and seed for derivation replay.
const REPLAY_SAMPLES: usize = 1000;
const REPLAY_SEED: u64 = 0x7e1d_b4a5;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_reports(reports: &[BatteryReport], elapsed: Duration, budget: Option<Duration>) -> Outcome {
    let checked: usize = reports.iter().map(|r| r.checked).sum();
    let agreed: usize = reports.iter().map(|r| r.agreed).sum();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let mut detail = format!("{agreed}/{checked} agree in {:.2}s", elapsed.as_secs_f64());
    if let Some(b) = budget {
        detail.push_str(&format!(" (budget {}s)", b.as_secs()));
    }
    for c in reports
        .iter()
        .flat_map(|r| r.counterexamples.iter())
        .take(3)
    {
        detail.push_str(&format!("\n      counterexample: {c}"));
    }
    Outcome {
        passed: checked > 0 && agreed == checked && in_time,
        detail,
    }
}

fn run_batteries(
    budget: Option<Duration>,
    f: impl FnOnce() -> tiebreak::Result<Vec<BatteryReport>>,
) -> Outcome {
    let start = Instant::now();
    match f() {
        Ok(reports) => from_reports(&reports, start.elapsed(), budget),
        Err(e) => Outcome {
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn criterion_equivalence() -> Outcome {
    run_batteries(Some(EQUIVALENCE_BUDGET), || {
        (2..=6).map(battery::set_equivalence).collect()
    })
}

fn criterion_replies() -> Outcome {
    run_batteries(Some(REPLIES_BUDGET), || {
        let mut reports = Vec::new();
        for m in 2..=battery::MAX_PROFILE_CANDIDATES {
            for n in 1..=battery::MAX_PROFILE_VOTERS {
                reports.push(battery::reply_characterization(m, n)?);
            }
        }
        Ok(reports)
    })
}

fn criterion_kgr_gap() -> Outcome {
    let check = || -> tiebreak::Result<(bool, String)> {
        let chain = "x1>y1>y2>x2>y3>y4";
        let roster = Roster::from_chain(chain)?;
        let q = PreferenceOrder::parse(chain, &roster)?;
        let x = WinnerSet::parse("{x1,x2}", &roster)?;
        let y = WinnerSet::parse("{y1,y2,y3,y4}", &roster)?;
        let sd = stochastic_dominance(&q, &x, &y)?.kind;
        let kgr = entails(&q, &x, &y, AxiomSet::KGR, UniverseMode::Set, None)?;
        let kmdr = entails(&q, &x, &y, AxiomSet::KMDR, UniverseMode::Multiset, None)?;
        let kmdr_ok = match &kmdr {
            Some(d) => d.strict && d.source() == &x && d.target() == &y && d.replay(&q).is_ok(),
            None => false,
        };
        let passed = sd == VerdictKind::StrictlyDominates && kgr.is_none() && kmdr_ok;
        let detail = format!(
            "sd={} K+G+R={} K+MD+R multiset={}",
            sd.tag(),
            if kgr.is_some() { "entailed" } else { "none" },
            kmdr.map_or("none".to_string(), |d| format!(
                "{}-step derivation",
                d.len()
            ))
        );
        Ok((passed, detail))
    };
    match check() {
        Ok((passed, detail)) => Outcome { passed, detail },
        Err(e) => Outcome {
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn criterion_completeness() -> Outcome {
    run_batteries(Some(COMPLETENESS_BUDGET), || {
        (2..=4).map(battery::completeness).collect()
    })
}

fn cardinal_run() -> tiebreak::Result<String> {
    let roster = Roster::from_chain("a>b>c")?;
    let x = WinnerSet::parse("{b}", &roster)?;
    let y = WinnerSet::parse("{a,c}", &roster)?;
    let mut out = String::new();
    for values in [[4, 2, 1], [4, 3, 1]] {
        let u = UtilityFunction::from_integers(&values);
        let ux = expected_utility(&u, &x)?;
        let uy = expected_utility(&u, &y)?;
        out.push_str(&format!("u={u} u(X)={ux} u(Y)={uy};"));
    }
    Ok(out)
}

fn criterion_cardinal() -> Outcome {
    let check = || -> tiebreak::Result<(bool, String)> {
        let roster = Roster::from_chain("a>b>c")?;
        let x = WinnerSet::parse("{b}", &roster)?;
        let y = WinnerSet::parse("{a,c}", &roster)?;
        let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
        let low = UtilityFunction::from_integers(&[4, 2, 1]);
        let high = UtilityFunction::from_integers(&[4, 3, 1]);
        let values_ok = expected_utility(&low, &y)? == r(5, 2)
            && expected_utility(&low, &x)? == r(2, 1)
            && expected_utility(&high, &x)? == r(3, 1)
            && expected_utility(&high, &y)? == r(5, 2);
        let first = cardinal_run()?;
        let second = cardinal_run()?;
        let expected = "u=(4,2,1) u(X)=2 u(Y)=5/2;u=(4,3,1) u(X)=3 u(Y)=5/2;";
        let passed = values_ok && first == second && first == expected;
        Ok((passed, first))
    };
    match check() {
        Ok((passed, detail)) => Outcome { passed, detail },
        Err(e) => Outcome {
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn criterion_md_entails_g() -> Outcome {
    run_batteries(None, || (1..=4).map(battery::md_entails_g).collect())
}

fn criterion_falsify() -> Outcome {
    run_batteries(None, || (1..=5).map(battery::falsify).collect())
}

/// Samples strict closure edges from K+G+R set closures (m = 3..5) and
/// K+MD+R multiset closures (m = 3, 4) and replays their derivations.
fn criterion_replay() -> Outcome {
    let check = || -> tiebreak::Result<(usize, usize, Vec<String>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(REPLAY_SEED);
        let mut systems = Vec::new();
        for m in 3..=5 {
            let mut orders = PreferenceOrder::all(m);
            orders.shuffle(&mut rng);
            for q in orders.into_iter().take(2) {
                systems.push(ProofSystem::new(&q, AxiomSet::KGR, UniverseMode::Set, 1)?);
            }
        }
        for m in 3..=4 {
            let mut orders = PreferenceOrder::all(m);
            orders.shuffle(&mut rng);
            for q in orders.into_iter().take(2) {
                systems.push(ProofSystem::new(
                    &q,
                    AxiomSet::KMDR,
                    UniverseMode::Multiset,
                    m as u32,
                )?);
            }
        }
        let mut pool = Vec::new();
        for (s, ps) in systems.iter().enumerate() {
            for (i, j, rel) in ps.graph().pairs() {
                if rel == Relation::Strict {
                    pool.push((s, i, j));
                }
            }
        }
        let sample: Vec<_> = pool
            .choose_multiple(&mut rng, REPLAY_SAMPLES)
            .copied()
            .collect();
        let mut ok = 0;
        let mut failures = Vec::new();
        for &(s, i, j) in &sample {
            let ps = &systems[s];
            let u = ps.graph().universe();
            let (x, y) = (u.get(i), u.get(j));
            let verdict = match ps.entails(x, y)? {
                Some(d) if !d.strict => "derivation is not strict".to_string(),
                Some(d) if d.source() != x || d.target() != y => {
                    "derivation endpoints differ".to_string()
                }
                Some(d) => match d.replay(ps.order()) {
                    Ok(()) if stochastic_dominance(ps.order(), x, y)?.is_strict() => String::new(),
                    Ok(()) => "replayed but not SD-strict".to_string(),
                    Err(e) => e.to_string(),
                },
                None => "no derivation for a closure edge".to_string(),
            };
            if verdict.is_empty() {
                ok += 1;
            } else if failures.len() < 3 {
                failures.push(verdict);
            }
        }
        Ok((sample.len(), ok, failures))
    };
    match check() {
        Ok((n, ok, failures)) => {
            let mut detail = format!("{ok}/{n} replayed (seed {REPLAY_SEED:#x})");
            for f in &failures {
                detail.push_str(&format!("\n      failure: {f}"));
            }
            Outcome {
                passed: n == REPLAY_SAMPLES && ok == n,
                detail,
            }
        }
        Err(e) => Outcome {
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "SD, utility and match-dominance agree on all set pairs, m=2..6",
            criterion_equivalence,
        ),
        (
            "better replies: strict SD iff K+G+R entailment, n<=4, m<=4",
            criterion_replies,
        ),
        (
            "SD-strict pair outside K+G+R, derivable in K+MD+R multiset",
            criterion_kgr_gap,
        ),
        (
            "strict SD iff K+MD+R multiset entailment, m=2..4",
            criterion_completeness,
        ),
        (
            "cardinal example: exact 5/2 vs 2 and 3 vs 5/2, stable output",
            criterion_cardinal,
        ),
        (
            "every G edge lies in the MD closure, m<=4, all orders",
            criterion_md_entails_g,
        ),
        (
            "falsifying utilities are consistent and sound, m<=5",
            criterion_falsify,
        ),
        (
            "1000 seeded derivations replay with premises re-verified",
            criterion_replay,
        ),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name}: {}", i + 1, outcome.detail);
        if !outcome.passed {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
