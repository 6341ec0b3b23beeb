//! Plurality games with uniform random tie-breaking: winner sets, single-voter
//! deviations, stochastic-dominance better replies and better-reply dynamics.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::axioms::{AxiomSet, Derivation, ProofSystem, UniverseMode};
use crate::dominance::{stochastic_dominance, DominanceVerdict};
use crate::error::{Error, Result};
use crate::preferences::{Candidate, PreferenceOrder, Roster, WinnerSet};

/// One ballot (a single candidate) and one strict order per voter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    candidates: usize,
    ballots: Vec<Candidate>,
    preferences: Vec<PreferenceOrder>,
}

impl Profile {
    pub fn new(
        candidates: usize,
        ballots: Vec<Candidate>,
        preferences: Vec<PreferenceOrder>,
    ) -> Result<Self> {
        if ballots.is_empty() {
            return Err(Error::NoBallots);
        }
        if ballots.len() != preferences.len() {
            return Err(Error::RosterMismatch {
                expected: ballots.len(),
                found: preferences.len(),
            });
        }
        if let Some(b) = ballots.iter().find(|b| b.0 >= candidates) {
            return Err(Error::RosterMismatch {
                expected: candidates,
                found: b.0 + 1,
            });
        }
        if let Some(p) = preferences.iter().find(|p| p.len() != candidates) {
            return Err(Error::RosterMismatch {
                expected: candidates,
                found: p.len(),
            });
        }
        Ok(Self {
            candidates,
            ballots,
            preferences,
        })
    }

    /// Parses one voter per line, `ballot | preference-order`, e.g.
    /// `b | a>b>c`. Blank lines and `#` comments are skipped. The roster is the
    /// alphabetically sorted set of labels in the first preference order.
    pub fn parse(text: &str) -> Result<(Roster, Self)> {
        let mut roster: Option<Roster> = None;
        let (mut ballots, mut preferences) = (Vec::new(), Vec::new());
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let malformed = |reason: String| Error::MalformedProfile {
                line: lineno + 1,
                reason,
            };
            let (ballot, order) = line
                .split_once('|')
                .ok_or_else(|| malformed("expected `ballot | preference-order`".into()))?;
            let roster = match &roster {
                Some(r) => r,
                None => {
                    roster.insert(Roster::from_chain(order).map_err(|e| malformed(e.to_string()))?)
                }
            };
            let q = PreferenceOrder::parse(order, roster).map_err(|e| malformed(e.to_string()))?;
            let b = roster
                .lookup(ballot)
                .map_err(|e| malformed(e.to_string()))?;
            ballots.push(b);
            preferences.push(q);
        }
        let roster = roster.ok_or(Error::NoBallots)?;
        let profile = Self::new(roster.len(), ballots, preferences)?;
        Ok((roster, profile))
    }

    pub fn to_text(&self, roster: &Roster) -> String {
        self.ballots
            .iter()
            .zip(&self.preferences)
            .map(|(&b, q)| format!("{} | {}\n", roster.label(b), roster.format_order(q)))
            .collect()
    }

    pub fn voters(&self) -> usize {
        self.ballots.len()
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    pub fn ballots(&self) -> &[Candidate] {
        &self.ballots
    }

    pub fn preferences(&self) -> &[PreferenceOrder] {
        &self.preferences
    }

    pub fn preference(&self, voter: usize) -> &PreferenceOrder {
        &self.preferences[voter]
    }

    pub fn with_ballot(&self, voter: usize, ballot: Candidate) -> Self {
        let mut next = self.clone();
        next.ballots[voter] = ballot;
        next
    }
}

/// Score-maximal candidates of a Plurality election, as a plain set.
pub fn plurality_winners(candidates: usize, ballots: &[Candidate]) -> Result<WinnerSet> {
    if ballots.is_empty() {
        return Err(Error::NoBallots);
    }
    winners_of(&scores(candidates, ballots)?)
}

fn scores(candidates: usize, ballots: &[Candidate]) -> Result<Vec<usize>> {
    let mut s = vec![0usize; candidates];
    for b in ballots {
        *s.get_mut(b.0).ok_or(Error::RosterMismatch {
            expected: candidates,
            found: b.0 + 1,
        })? += 1;
    }
    Ok(s)
}

fn winners_of(scores: &[usize]) -> Result<WinnerSet> {
    let top = scores.iter().copied().max().unwrap_or(0);
    WinnerSet::from_counts(
        scores
            .iter()
            .map(|&s| u32::from(s == top && top > 0))
            .collect(),
    )
}

/// Immutable snapshot of a game: profile, scores and cached winner set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    profile: Profile,
    scores: Vec<usize>,
    winners: WinnerSet,
}

impl GameState {
    pub fn new(profile: Profile) -> Self {
        let scores =
            scores(profile.candidates, &profile.ballots).expect("profile ballots are validated");
        let winners = winners_of(&scores).expect("at least one ballot");
        Self {
            profile,
            scores,
            winners,
        }
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn scores(&self) -> &[usize] {
        &self.scores
    }

    pub fn winners(&self) -> &WinnerSet {
        &self.winners
    }

    fn check_voter(&self, voter: usize) -> Result<()> {
        let n = self.profile.voters();
        if voter >= n {
            return Err(Error::VoterOutOfRange { voter, n });
        }
        Ok(())
    }

    /// State after `voter` switches to `ballot`.
    pub fn after(&self, voter: usize, ballot: Candidate) -> Result<Self> {
        self.check_voter(voter)?;
        if ballot.0 >= self.profile.candidates {
            return Err(Error::RosterMismatch {
                expected: self.profile.candidates,
                found: ballot.0 + 1,
            });
        }
        Ok(Self::new(self.profile.with_ballot(voter, ballot)))
    }
}

/// Every ballot change open to `voter` with the resulting winner set, in
/// candidate-id order. Keeping the current ballot is not a deviation.
pub fn deviations(state: &GameState, voter: usize) -> Result<Vec<(Candidate, WinnerSet)>> {
    state.check_voter(voter)?;
    let current = state.profile.ballots[voter];
    let mut out = Vec::with_capacity(state.profile.candidates.saturating_sub(1));
    let mut s = state.scores.clone();
    s[current.0] -= 1;
    for b in (0..state.profile.candidates).map(Candidate) {
        if b == current {
            continue;
        }
        s[b.0] += 1;
        out.push((b, winners_of(&s)?));
        s[b.0] -= 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub verdict: DominanceVerdict,
    /// K+G+R derivation of `new > old` over the set universe, when requested.
    pub derivation: Option<Derivation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetterReply {
    pub voter: usize,
    pub old_ballot: Candidate,
    pub new_ballot: Candidate,
    pub old_winners: WinnerSet,
    pub new_winners: WinnerSet,
    pub certificate: Certificate,
}

impl BetterReply {
    /// Recomputes the verdict and replays the derivation, if any.
    pub fn replay(&self, q: &PreferenceOrder) -> Result<()> {
        let verdict = stochastic_dominance(q, &self.new_winners, &self.old_winners)?;
        if !verdict.is_strict() || verdict != self.certificate.verdict {
            return Err(Error::ReplayFailed {
                step: 0,
                reason: "verdict does not recompute as strict".into(),
            });
        }
        if let Some(d) = &self.certificate.derivation {
            if d.source() != &self.new_winners || d.target() != &self.old_winners {
                return Err(Error::ReplayFailed {
                    step: 0,
                    reason: "derivation has the wrong endpoints".into(),
                });
            }
            d.replay(q)?;
        }
        Ok(())
    }

    pub fn to_json(&self, roster: &Roster) -> Value {
        json!({
            "voter": self.voter,
            "old_ballot": roster.label(self.old_ballot),
            "new_ballot": roster.label(self.new_ballot),
            "old_winners": roster.format_set(&self.old_winners),
            "new_winners": roster.format_set(&self.new_winners),
            "certificate": certificate_json(&self.certificate, roster),
        })
    }
}

fn certificate_json(c: &Certificate, roster: &Roster) -> Value {
    json!({
        "verdict": c.verdict.kind.tag(),
        "x_ahead": c.verdict.x_ahead,
        "y_ahead": c.verdict.y_ahead,
        "derivation": c.derivation.as_ref().map(|d| d.to_json(roster)),
    })
}

/// Caches one K+G+R closure over the set universe per preference order.
#[derive(Debug, Default)]
pub struct ProofCache {
    systems: HashMap<PreferenceOrder, ProofSystem>,
}

impl ProofCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn system(&mut self, q: &PreferenceOrder) -> Result<&ProofSystem> {
        if !self.systems.contains_key(q) {
            let ps = ProofSystem::new(q, AxiomSet::KGR, UniverseMode::Set, 1)?;
            self.systems.insert(q.clone(), ps);
        }
        Ok(&self.systems[q])
    }
}

/// Deviations of `voter` whose winner set strictly SD-dominates the current
/// one under the voter's order. With a cache, each reply also carries its
/// K+G+R derivation; a missing derivation is an error.
pub fn better_replies(
    state: &GameState,
    voter: usize,
    proofs: Option<&mut ProofCache>,
) -> Result<Vec<BetterReply>> {
    let q = state.profile.preference(voter);
    let old = state.winners();
    let mut replies = Vec::new();
    for (b, new) in deviations(state, voter)? {
        let verdict = stochastic_dominance(q, &new, old)?;
        if verdict.is_strict() {
            replies.push(BetterReply {
                voter,
                old_ballot: state.profile.ballots[voter],
                new_ballot: b,
                old_winners: old.clone(),
                new_winners: new,
                certificate: Certificate {
                    verdict,
                    derivation: None,
                },
            });
        }
    }
    if let Some(cache) = proofs {
        if !replies.is_empty() {
            let ps = cache.system(q)?;
            for r in &mut replies {
                let d = ps
                    .entails(&r.new_winners, &r.old_winners)?
                    .ok_or(Error::MissingDerivation { voter })?;
                r.certificate.derivation = Some(d);
            }
        }
    }
    Ok(replies)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduler {
    /// Scan voters cyclically starting after the last mover.
    RoundRobin,
    /// Always move the lowest-index voter that has a better reply.
    LowestIndexFirst,
    /// Pick uniformly among voters with a better reply, from a seeded stream.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub reply: BetterReply,
    pub scores: Vec<usize>,
}

impl TraceStep {
    /// One JSON object per step, for JSON-lines output.
    pub fn to_json(&self, roster: &Roster) -> Value {
        let mut v = self.reply.to_json(roster);
        v["step"] = json!(self.step);
        v["scores"] = json!(self.scores);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// No voter has a better reply.
    Equilibrium,
    /// Stopped at the step limit with better replies still available.
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: GameState,
    pub steps: Vec<TraceStep>,
    pub outcome: Outcome,
    pub last: GameState,
}

/// Better-reply dynamics: at each step the scheduler picks a voter with a
/// nonempty reply list and that voter plays the first reply in candidate-id
/// order.
pub fn run_dynamics(
    initial: Profile,
    scheduler: Scheduler,
    max_steps: usize,
    with_proofs: bool,
) -> Result<Trace> {
    let n = initial.voters();
    let start = GameState::new(initial);
    let mut state = start.clone();
    let mut cache = with_proofs.then(ProofCache::new);
    let mut rng = match scheduler {
        Scheduler::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut cursor = 0usize;
    let mut steps = Vec::new();
    loop {
        let order: Vec<usize> = match scheduler {
            Scheduler::RoundRobin => (0..n).map(|i| (cursor + i) % n).collect(),
            Scheduler::LowestIndexFirst | Scheduler::Random { .. } => (0..n).collect(),
        };
        let mut movable = Vec::new();
        for v in order {
            let replies = better_replies(&state, v, None)?;
            if !replies.is_empty() {
                movable.push((v, replies));
                if rng.is_none() {
                    break;
                }
            }
        }
        if movable.is_empty() {
            return Ok(Trace {
                initial: start,
                steps,
                outcome: Outcome::Equilibrium,
                last: state,
            });
        }
        if steps.len() >= max_steps {
            return Ok(Trace {
                initial: start,
                steps,
                outcome: Outcome::StepLimit,
                last: state,
            });
        }
        let pick = rng.as_mut().map_or(0, |r| r.gen_range(0..movable.len()));
        let (voter, mut replies) = movable.swap_remove(pick);
        let mut reply = replies.swap_remove(0);
        if let Some(cache) = cache.as_mut() {
            let q = state.profile.preference(voter);
            let d = cache
                .system(q)?
                .entails(&reply.new_winners, &reply.old_winners)?
                .ok_or(Error::MissingDerivation { voter })?;
            reply.certificate.derivation = Some(d);
        }
        state = state.after(voter, reply.new_ballot)?;
        cursor = (voter + 1) % n;
        steps.push(TraceStep {
            step: steps.len() + 1,
            reply,
            scores: state.scores.clone(),
        });
    }
}
