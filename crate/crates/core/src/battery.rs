//! Exhaustive cross-checks between the characterizations, sized for the desk.
//!
//! Each battery enumerates every case within its bounds and reports how many
//! agreed. Counterexamples are rendered as CLI invocations that reproduce them.

use serde::Serialize;

use crate::axioms::{
    enumerate_universe, md_entails_g_missing, AxiomSet, ProofSystem, Relation, UniverseMode,
};
use crate::dominance::{
    falsifying_utility, match_dominance, stochastic_dominance, utility_dominates_all, VerdictKind,
};
use crate::error::{Error, Result};
use crate::plurality::{deviations, GameState, Profile};
use crate::preferences::{expected_utility, Candidate, PreferenceOrder, Roster, WinnerSet};

pub const MAX_SET_CANDIDATES: usize = 6;
pub const MAX_MULTISET_CANDIDATES: usize = 4;
pub const MAX_PROFILE_CANDIDATES: usize = 4;
pub const MAX_PROFILE_VOTERS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatteryReport {
    pub suite: String,
    pub checked: usize,
    pub agreed: usize,
    pub counterexamples: Vec<String>,
}

impl BatteryReport {
    fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            checked: 0,
            agreed: 0,
            counterexamples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, counterexample: impl FnOnce() -> String) {
        self.checked += 1;
        if ok {
            self.agreed += 1;
        } else if self.counterexamples.len() < 20 {
            self.counterexamples.push(counterexample());
        }
    }

    pub fn passed(&self) -> bool {
        self.checked == self.agreed
    }
}

fn bound(what: &'static str, value: usize, lo: usize, hi: usize) -> Result<()> {
    if value < lo || value > hi {
        return Err(Error::OutOfBounds {
            what,
            value,
            bound: hi,
        });
    }
    Ok(())
}

fn sets(m: usize) -> Vec<WinnerSet> {
    enumerate_universe(m, UniverseMode::Set, 1).expect("small set universe")
}

fn sd_command(r: &Roster, q: &PreferenceOrder, x: &WinnerSet, y: &WinnerSet) -> String {
    format!(
        "sd \"{}\" \"{}\" \"{}\"",
        r.format_order(q),
        r.format_set(x),
        r.format_set(y)
    )
}

fn entail_command(
    r: &Roster,
    q: &PreferenceOrder,
    x: &WinnerSet,
    y: &WinnerSet,
    axioms: &str,
    mode: &str,
) -> String {
    format!(
        "entail \"{}\" \"{}\" \"{}\" --axioms {axioms} --mode {mode}",
        r.format_order(q),
        r.format_set(x),
        r.format_set(y)
    )
}

/// Three-way agreement of SD, universal utility dominance and match-dominance
/// over all ordered pairs of distinct nonempty subsets of `m` candidates.
pub fn set_equivalence(m: usize) -> Result<BatteryReport> {
    bound("m", m, 1, MAX_SET_CANDIDATES)?;
    let r = Roster::alphabetic(m);
    let q = PreferenceOrder::identity(m);
    let all = sets(m);
    let mut report = BatteryReport::new(format!("equivalence m={m}"));
    for x in &all {
        for y in all.iter().filter(|y| *y != x) {
            let sd = stochastic_dominance(&q, x, y)?.is_strict();
            let md = match_dominance(&q, x, y)?;
            let ud = utility_dominates_all(&q, x, y)?;
            report.record(sd == md && md == ud, || {
                format!(
                    "{}  (sd={sd} match={md} utility={ud})",
                    sd_command(&r, &q, x, y)
                )
            });
        }
    }
    Ok(report)
}

/// Same agreement over all multisets with multiplicities up to `max_multiplicity`.
pub fn multiset_equivalence(m: usize, max_multiplicity: u32) -> Result<BatteryReport> {
    bound("m", m, 1, MAX_MULTISET_CANDIDATES)?;
    bound("max multiplicity", max_multiplicity as usize, 1, 4)?;
    let r = Roster::alphabetic(m);
    let q = PreferenceOrder::identity(m);
    let all = enumerate_universe(m, UniverseMode::Multiset, max_multiplicity)?;
    let mut report = BatteryReport::new(format!(
        "multiset-equivalence m={m} max-mult={max_multiplicity}"
    ));
    for x in &all {
        for y in &all {
            let sd = stochastic_dominance(&q, x, y)?.is_strict();
            let md = match_dominance(&q, x, y)?;
            let ud = utility_dominates_all(&q, x, y)?;
            report.record(sd == md && md == ud, || {
                format!(
                    "{}  (sd={sd} match={md} utility={ud})",
                    sd_command(&r, &q, x, y)
                )
            });
        }
    }
    Ok(report)
}

/// Shape of a single-vote change of the winner set.
fn is_single_vote_shape(old: &WinnerSet, new: &WinnerSet) -> bool {
    let (a, b) = (old.size(), new.size());
    if a == 1 || b == 1 {
        return true;
    }
    let diff: u32 = old
        .counts()
        .iter()
        .zip(new.counts())
        .map(|(&x, &y)| x.abs_diff(y))
        .sum();
    match a.abs_diff(b) {
        0 => diff == 0 || diff == 2,
        1 => diff == 1,
        _ => false,
    }
}

/// Better-reply characterization over every profile with exactly `n` voters
/// and `m` candidates, every order for the deviating voter and every
/// deviation: strict SD of new over old iff K+G+R entails it. Shapes outside
/// the single-vote cases count as disagreements.
pub fn reply_characterization(m: usize, n: usize) -> Result<BatteryReport> {
    bound("m", m, 1, MAX_PROFILE_CANDIDATES)?;
    bound("n", n, 1, MAX_PROFILE_VOTERS)?;
    let r = Roster::alphabetic(m);
    let orders = PreferenceOrder::all(m);
    let systems: Vec<ProofSystem> = orders
        .iter()
        .map(|q| ProofSystem::new(q, AxiomSet::KGR, UniverseMode::Set, 1))
        .collect::<Result<_>>()?;
    let mut report = BatteryReport::new(format!("reply-characterization m={m} n={n}"));
    let total = m.pow(n as u32);
    for code in 0..total {
        let mut rest = code;
        let ballots: Vec<Candidate> = (0..n)
            .map(|_| {
                let b = Candidate(rest % m);
                rest /= m;
                b
            })
            .collect();
        let prefs = vec![PreferenceOrder::identity(m); n];
        let state = GameState::new(Profile::new(m, ballots, prefs)?);
        for voter in 0..n {
            for (_, new) in deviations(&state, voter)? {
                let old = state.winners();
                let shape_ok = is_single_vote_shape(old, &new);
                for (q, ps) in orders.iter().zip(&systems) {
                    let sd = stochastic_dominance(q, &new, old)?.is_strict();
                    let ent = ps.is_entailed(&new, old)?;
                    report.record(shape_ok && sd == ent, || {
                        format!(
                            "{}  (sd={sd} entailed={ent} shape_ok={shape_ok})",
                            entail_command(&r, q, &new, old, "kgr", "set")
                        )
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Full characterization over sets: strict SD iff K+MD+R entailment in the
/// multiset universe with multiplicity cap `m`, for every order of `m`
/// candidates.
pub fn completeness(m: usize) -> Result<BatteryReport> {
    bound("m", m, 1, MAX_MULTISET_CANDIDATES)?;
    let r = Roster::alphabetic(m);
    let all = sets(m);
    let mut report = BatteryReport::new(format!("completeness m={m}"));
    for q in PreferenceOrder::all(m) {
        let ps = ProofSystem::new(&q, AxiomSet::KMDR, UniverseMode::Multiset, m as u32)?;
        for x in &all {
            for y in all.iter().filter(|y| *y != x) {
                let sd = stochastic_dominance(&q, x, y)?.is_strict();
                let ent = ps.is_entailed(x, y)?;
                report.record(sd == ent, || {
                    format!(
                        "{}  (sd={sd} entailed={ent})",
                        entail_command(&r, &q, x, y, "kmdr", "multiset")
                    )
                });
            }
        }
    }
    Ok(report)
}

/// Every G1/G2 edge over the set universe lies in the closure of the
/// duplication instances alone, for every order of `m` candidates.
pub fn md_entails_g(m: usize) -> Result<BatteryReport> {
    bound("m", m, 1, MAX_SET_CANDIDATES)?;
    let r = Roster::alphabetic(m);
    let mut report = BatteryReport::new(format!("md-entails-g m={m}"));
    for q in PreferenceOrder::all(m) {
        let missing = md_entails_g_missing(&q)?;
        report.record(missing.is_empty(), || {
            let shown: Vec<String> = missing
                .iter()
                .map(|i| format!("{} {}", r.format_set(&i.source), i.describe(&r)))
                .collect();
            format!("order {}: missing {}", r.format_order(&q), shown.join("; "))
        });
    }
    Ok(report)
}

/// For every ordered pair of sets that fails match-dominance, the falsifying
/// utility is strictly consistent and does not rank X above Y.
pub fn falsify(m: usize) -> Result<BatteryReport> {
    bound("m", m, 1, MAX_SET_CANDIDATES)?;
    let r = Roster::alphabetic(m);
    let q = PreferenceOrder::identity(m);
    let all = sets(m);
    let mut report = BatteryReport::new(format!("falsify m={m}"));
    for x in &all {
        for y in &all {
            if match_dominance(&q, x, y)? {
                continue;
            }
            let ok = match falsifying_utility(&q, x, y)? {
                Some(u) => {
                    u.is_consistent_with(&q) && expected_utility(&u, x)? <= expected_utility(&u, y)?
                }
                None => false,
            };
            report.record(ok, || {
                format!(
                    "falsify \"{}\" \"{}\" \"{}\"",
                    r.format_order(&q),
                    r.format_set(x),
                    r.format_set(y)
                )
            });
        }
    }
    Ok(report)
}

/// Reversal duality: for `|X| > |Y|`, X match-dominates Y under Q iff Y
/// match-dominates X under the reverse of Q; SD satisfies the same duality
/// for every pair.
pub fn duality(m: usize) -> Result<BatteryReport> {
    bound("m", m, 1, MAX_SET_CANDIDATES)?;
    let r = Roster::alphabetic(m);
    let mut report = BatteryReport::new(format!("duality m={m}"));
    let orders = if m <= 4 {
        PreferenceOrder::all(m)
    } else {
        vec![PreferenceOrder::identity(m)]
    };
    let all = sets(m);
    for q in orders {
        let rev = q.reverse();
        for x in &all {
            for y in &all {
                let sd = stochastic_dominance(&q, x, y)?.is_strict()
                    == stochastic_dominance(&rev, y, x)?.is_strict();
                let md = x.size() <= y.size()
                    || match_dominance(&q, x, y)? == match_dominance(&rev, y, x)?;
                report.record(sd && md, || sd_command(&r, &q, x, y));
            }
        }
    }
    Ok(report)
}

/// Every closed strict edge is strict SD and every weak edge is weak SD.
pub fn soundness(m: usize, mode: UniverseMode, axioms: AxiomSet) -> Result<BatteryReport> {
    let (cap, limit) = match mode {
        UniverseMode::Set => (1, MAX_SET_CANDIDATES),
        UniverseMode::Multiset => (m as u32, MAX_MULTISET_CANDIDATES),
    };
    bound("m", m, 1, limit)?;
    let r = Roster::alphabetic(m);
    let q = PreferenceOrder::identity(m);
    let ps = ProofSystem::new(&q, axioms, mode, cap)?;
    let g = ps.graph();
    let mut report = BatteryReport::new(format!("soundness {axioms} {mode} m={m}"));
    for (i, j, rel) in g.pairs() {
        let (x, y) = (g.universe().get(i), g.universe().get(j));
        let kind = stochastic_dominance(&q, x, y)?.kind;
        let ok = match rel {
            Relation::Strict => kind == VerdictKind::StrictlyDominates,
            Relation::Weak => matches!(
                kind,
                VerdictKind::StrictlyDominates | VerdictKind::Equivalent
            ),
        };
        report.record(ok, || {
            format!("{}  (closure={rel:?} sd={kind})", sd_command(&r, &q, x, y))
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let r = Roster::alphabetic(4);
        let w = |s: &str| WinnerSet::parse(s, &r).unwrap();
        assert!(is_single_vote_shape(&w("{a,b}"), &w("{a,c}")));
        assert!(is_single_vote_shape(&w("{a,b}"), &w("{a,b,c}")));
        assert!(is_single_vote_shape(&w("{a}"), &w("{b,c,d}")));
        assert!(!is_single_vote_shape(&w("{a,b}"), &w("{c,d}")));
        assert!(!is_single_vote_shape(&w("{a,b}"), &w("{a,b,c,d}")));
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(matches!(set_equivalence(7), Err(Error::OutOfBounds { .. })));
        assert!(matches!(completeness(5), Err(Error::OutOfBounds { .. })));
        assert!(matches!(
            reply_characterization(4, 5),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(matches!(
            reply_characterization(5, 2),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn small_batteries_pass() {
        for m in 1..=3 {
            assert!(set_equivalence(m).unwrap().passed());
            assert!(completeness(m).unwrap().passed());
            assert!(reply_characterization(m, 2).unwrap().passed());
            assert!(falsify(m).unwrap().passed());
            assert!(duality(m).unwrap().passed());
            assert!(md_entails_g(m).unwrap().passed());
        }
        assert!(multiset_equivalence(2, 3).unwrap().passed());
    }
}
