use std::collections::VecDeque;

use serde_json::{json, Value};

use crate::dominance::{stochastic_dominance, VerdictKind};
use crate::error::{Error, Result};
use crate::preferences::{PreferenceOrder, Roster, WinnerSet};

use super::{
    close, enumerate_universe, instantiate_axioms, verify_instance, AxiomInstance, AxiomSet,
    Relation, RelationGraph, Universe, UniverseMode,
};

/// Largest universe [`entails`] will close after restricting it to the
/// candidates for intermediate steps.
pub const CLOSURE_LIMIT: usize = 8192;

/// A chain `X = X_0, X_1, ..., X_t = Y` with the axiom instance behind each link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub mode: UniverseMode,
    pub chain: Vec<WinnerSet>,
    pub steps: Vec<AxiomInstance>,
    pub strict: bool,
}

impl Derivation {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn source(&self) -> &WinnerSet {
        &self.chain[0]
    }

    pub fn target(&self) -> &WinnerSet {
        self.chain.last().expect("chain has at least one set")
    }

    /// Re-verifies every link against `q` and recomputes strictness.
    pub fn replay(&self, q: &PreferenceOrder) -> Result<()> {
        let fail = |step: usize, reason: String| Err(Error::ReplayFailed { step, reason });
        if self.chain.len() != self.steps.len() + 1 {
            return fail(0, "chain and step counts disagree".into());
        }
        let mut strict = false;
        for (i, step) in self.steps.iter().enumerate() {
            if step.source != self.chain[i] || step.target != self.chain[i + 1] {
                return fail(i, "step does not connect consecutive chain elements".into());
            }
            if let Err(reason) = verify_instance(q, step, self.mode) {
                return fail(i, reason);
            }
            strict |= step.strict;
        }
        if strict != self.strict {
            return fail(
                self.steps.len(),
                format!("claimed strict = {} but chain gives {strict}", self.strict),
            );
        }
        Ok(())
    }

    /// One line per step: `X_i REL X_{i+1} [axiom, detail]`.
    pub fn to_text(&self, roster: &Roster) -> String {
        self.steps
            .iter()
            .map(|s| {
                let rel = if s.strict { ">" } else { ">=" };
                format!(
                    "{} {rel} {} {}\n",
                    roster.format_set(&s.source),
                    roster.format_set(&s.target),
                    s.describe(roster)
                )
            })
            .collect()
    }

    pub fn to_json(&self, roster: &Roster) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                json!({
                    "source": roster.format_set(&s.source),
                    "relation": if s.strict { ">" } else { ">=" },
                    "target": roster.format_set(&s.target),
                    "axiom": s.axiom.to_string(),
                    "label": s.describe(roster),
                })
            })
            .collect();
        json!({
            "from": roster.format_set(self.source()),
            "to": roster.format_set(self.target()),
            "strict": self.strict,
            "steps": steps,
        })
    }
}

impl RelationGraph {
    /// Shortest strict derivation from `x` to `y` over the base instance
    /// edges; among shortest chains, the lexicographically smallest sequence
    /// of intermediate sets.
    pub fn derivation(&self, x: &WinnerSet, y: &WinnerSet) -> Option<Derivation> {
        let u = self.universe();
        let (src, dst) = (u.position(x)?, u.position(y)?);
        if self.relation_at(src, dst) != Some(Relation::Strict) {
            return None;
        }
        let n = u.len();
        let state = |node: usize, strict: bool| node * 2 + strict as usize;
        // reverse adjacency for the backward search
        let mut rev: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
        for v in 0..n {
            for &(w, e) in self.out_edges(v) {
                rev[w].push((v, e));
            }
        }
        let mut dist = vec![usize::MAX; 2 * n];
        let mut queue = VecDeque::new();
        dist[state(dst, true)] = 0;
        queue.push_back((dst, true));
        while let Some((w, t)) = queue.pop_front() {
            let d = dist[state(w, t)];
            for &(v, e) in &rev[w] {
                // forward transition (v, s) --e--> (w, s || e)
                let preds: &[bool] = match (t, e) {
                    (true, true) => &[false, true],
                    (true, false) => &[true],
                    (false, false) => &[false],
                    (false, true) => &[],
                };
                for &s in preds {
                    if dist[state(v, s)] == usize::MAX {
                        dist[state(v, s)] = d + 1;
                        queue.push_back((v, s));
                    }
                }
            }
        }
        if dist[state(src, false)] == usize::MAX {
            return None;
        }
        let mut chain = vec![u.get(src).clone()];
        let mut steps = Vec::new();
        let (mut node, mut seen) = (src, false);
        while !(node == dst && seen) {
            let d = dist[state(node, seen)];
            let &(next, e) = self
                .out_edges(node)
                .iter()
                .find(|&&(w, e)| dist[state(w, seen || e)] == d - 1)
                .expect("a shortest-path successor exists");
            steps.push(self.base_instance(node, next).clone());
            chain.push(u.get(next).clone());
            node = next;
            seen |= e;
        }
        Some(Derivation {
            mode: u.mode(),
            chain,
            steps,
            strict: true,
        })
    }
}

/// A closed relation for one order, axiom set and universe, reusable across
/// many entailment queries.
#[derive(Debug, Clone)]
pub struct ProofSystem {
    order: PreferenceOrder,
    axioms: AxiomSet,
    graph: RelationGraph,
}

impl ProofSystem {
    /// Closure over the full universe, weak variants included.
    pub fn new(
        q: &PreferenceOrder,
        axioms: AxiomSet,
        mode: UniverseMode,
        max_multiplicity: u32,
    ) -> Result<Self> {
        let universe = Universe::enumerate(q.len(), mode, max_multiplicity)?;
        let instances = instantiate_axioms(q, &universe, axioms, true);
        let graph = close(instances, universe)?;
        Ok(Self {
            order: q.clone(),
            axioms,
            graph,
        })
    }

    pub fn order(&self) -> &PreferenceOrder {
        &self.order
    }

    pub fn axioms(&self) -> AxiomSet {
        self.axioms
    }

    pub fn graph(&self) -> &RelationGraph {
        &self.graph
    }

    fn locate(&self, w: &WinnerSet) -> Result<()> {
        if self.graph.universe().contains(w) {
            Ok(())
        } else {
            Err(Error::OutsideUniverse(format!("{:?}", w.counts())))
        }
    }

    pub fn is_entailed(&self, x: &WinnerSet, y: &WinnerSet) -> Result<bool> {
        self.locate(x)?;
        self.locate(y)?;
        Ok(self.graph.is_strict(x, y))
    }

    pub fn entails(&self, x: &WinnerSet, y: &WinnerSet) -> Result<Option<Derivation>> {
        self.locate(x)?;
        self.locate(y)?;
        Ok(self.graph.derivation(x, y))
    }
}

fn weakly_sd(q: &PreferenceOrder, x: &WinnerSet, y: &WinnerSet) -> Result<bool> {
    Ok(matches!(
        stochastic_dominance(q, x, y)?.kind,
        VerdictKind::StrictlyDominates | VerdictKind::Equivalent
    ))
}

/// Shortest strict derivation of `X > Y` from the chosen axioms, if any.
///
/// `max_multiplicity` defaults to the roster size in multiset mode. Every
/// axiom instance moves the lottery weakly downwards in the stochastic order,
/// so any chain from X to Y stays between them; the closure is built over
/// that interval of the universe only, which leaves both the answer and the
/// chosen derivation unchanged.
pub fn entails(
    q: &PreferenceOrder,
    x: &WinnerSet,
    y: &WinnerSet,
    axioms: AxiomSet,
    mode: UniverseMode,
    max_multiplicity: Option<u32>,
) -> Result<Option<Derivation>> {
    let m = q.len();
    let cap = match mode {
        UniverseMode::Set => 1,
        UniverseMode::Multiset => max_multiplicity.unwrap_or(m as u32),
    };
    for w in [x, y] {
        if w.roster_size() != m {
            return Err(Error::RosterMismatch {
                expected: m,
                found: w.roster_size(),
            });
        }
        if w.max_multiplicity() > cap {
            return Err(Error::OutsideUniverse(format!("{:?}", w.counts())));
        }
    }
    if !weakly_sd(q, x, y)? {
        return Ok(None);
    }
    let mut interval = Vec::new();
    for z in enumerate_universe(m, mode, cap)? {
        if weakly_sd(q, x, &z)? && weakly_sd(q, &z, y)? {
            interval.push(z);
            if interval.len() > CLOSURE_LIMIT {
                return Err(Error::UniverseOverflow {
                    size: interval.len() as u128,
                    limit: CLOSURE_LIMIT as u128,
                });
            }
        }
    }
    let universe = Universe::from_members(mode, cap, interval);
    let instances = instantiate_axioms(q, &universe, axioms, true);
    let graph = close(instances, universe)?;
    Ok(graph.derivation(x, y))
}

/// G instances over the set universe that are missing from the closure of
/// the duplication instances alone; empty when MD entails G under `q`.
pub fn md_entails_g_missing(q: &PreferenceOrder) -> Result<Vec<AxiomInstance>> {
    let universe = Universe::enumerate(q.len(), UniverseMode::Set, 1)?;
    let g = instantiate_axioms(q, &universe, AxiomSet::G, true);
    let md = instantiate_axioms(q, &universe, AxiomSet::MD, true);
    let graph = close(md, universe)?;
    Ok(g.into_iter()
        .filter(|inst| match graph.relation(&inst.source, &inst.target) {
            Some(Relation::Strict) => false,
            Some(Relation::Weak) => inst.strict,
            None => true,
        })
        .collect())
}

pub fn md_entails_g(q: &PreferenceOrder) -> Result<bool> {
    Ok(md_entails_g_missing(q)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::super::Axiom;
    use super::*;

    fn setup(order: &str) -> (Roster, PreferenceOrder) {
        let roster = Roster::from_chain(order).unwrap();
        let q = PreferenceOrder::parse(order, &roster).unwrap();
        (roster, q)
    }

    fn ws(text: &str, r: &Roster) -> WinnerSet {
        WinnerSet::parse(text, r).unwrap()
    }

    #[test]
    fn singleton_pair_is_one_kelly_step() {
        let (r, q) = setup("a>b");
        let d = entails(
            &q,
            &ws("{a}", &r),
            &ws("{b}", &r),
            AxiomSet::KGR,
            UniverseMode::Set,
            None,
        )
        .unwrap()
        .unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.steps[0].axiom, Axiom::K1);
        assert_eq!(d.to_text(&r), "{a} > {b} [K1]\n");
        d.replay(&q).unwrap();
    }

    #[test]
    fn gap_pair_needs_duplication() {
        let (r, q) = setup("x1>y1>y2>x2>y3>y4");
        let (x, y) = (ws("{x1,x2}", &r), ws("{y1,y2,y3,y4}", &r));
        assert_eq!(
            entails(&q, &x, &y, AxiomSet::KGR, UniverseMode::Set, None).unwrap(),
            None
        );
        let d = entails(&q, &x, &y, AxiomSet::KMDR, UniverseMode::Multiset, Some(2))
            .unwrap()
            .unwrap();
        d.replay(&q).unwrap();
        assert!(d.chain.iter().any(|w| !w.is_set()), "{}", d.to_text(&r));
    }

    #[test]
    fn proof_system_and_interval_search_agree() {
        let (_, q) = setup("c>a>b>d");
        let ps = ProofSystem::new(&q, AxiomSet::KGR, UniverseMode::Set, 1).unwrap();
        let members = ps.graph().universe().members().to_vec();
        for x in &members {
            for y in &members {
                let full = ps.entails(x, y).unwrap();
                let narrow = entails(&q, x, y, AxiomSet::KGR, UniverseMode::Set, None).unwrap();
                assert_eq!(full, narrow);
            }
        }
    }

    #[test]
    fn outside_universe_is_rejected() {
        let (r, q) = setup("a>b");
        let ps = ProofSystem::new(&q, AxiomSet::KGR, UniverseMode::Set, 1).unwrap();
        let err = ps.entails(&ws("{a,a}", &r), &ws("{b}", &r)).unwrap_err();
        assert!(matches!(err, Error::OutsideUniverse(_)));
        let err = entails(
            &q,
            &ws("{a,a,a}", &r),
            &ws("{b}", &r),
            AxiomSet::KMDR,
            UniverseMode::Multiset,
            None,
        );
        assert!(matches!(err, Err(Error::OutsideUniverse(_))));
    }

    #[test]
    fn replay_catches_tampering() {
        let (r, q) = setup("a>b>c");
        let d = entails(
            &q,
            &ws("{a}", &r),
            &ws("{c}", &r),
            AxiomSet::G,
            UniverseMode::Set,
            None,
        )
        .unwrap()
        .unwrap();
        d.replay(&q).unwrap();
        let mut bad = d.clone();
        bad.strict = false;
        assert!(bad.replay(&q).is_err());
        let mut bad = d.clone();
        bad.chain.swap(0, 1);
        assert!(bad.replay(&q).is_err());
        assert!(d.replay(&q.reverse()).is_err());
    }

    #[test]
    fn md_entails_g_small() {
        assert!(md_entails_g(&PreferenceOrder::identity(1)).unwrap());
        for q in PreferenceOrder::all(3) {
            assert!(md_entails_g(&q).unwrap());
        }
    }

    #[test]
    fn derivation_json_shape() {
        let (r, q) = setup("a>b");
        let d = entails(
            &q,
            &ws("{a}", &r),
            &ws("{a,b}", &r),
            AxiomSet::KGR,
            UniverseMode::Set,
            None,
        )
        .unwrap()
        .unwrap();
        let v = d.to_json(&r);
        assert_eq!(v["from"], "{a}");
        assert_eq!(v["to"], "{a,b}");
        assert_eq!(v["steps"][0]["axiom"], "G1");
        assert_eq!(v["steps"][0]["relation"], ">");
    }
}
