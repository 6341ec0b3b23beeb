use proptest::prelude::*;

use tiebreak::axioms::{AxiomSet, ProofSystem, Relation, UniverseMode};
use tiebreak::battery;
use tiebreak::dominance::{
    falsifying_utility, match_dominance, match_partition, stochastic_dominance,
    utility_dominates_all, VerdictKind,
};
use tiebreak::plurality::{better_replies, deviations, GameState, Profile, ProofCache};
use tiebreak::preferences::{expected_utility, Candidate, PreferenceOrder, WinnerSet};

fn order(m: usize) -> impl Strategy<Value = PreferenceOrder> {
    Just((0..m).map(Candidate).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|ranking| PreferenceOrder::new(ranking).unwrap())
}

fn multiset(m: usize, cap: u32) -> impl Strategy<Value = WinnerSet> {
    prop::collection::vec(0..=cap, m)
        .prop_filter("nonempty", |c| c.iter().any(|&v| v > 0))
        .prop_map(|c| WinnerSet::from_counts(c).unwrap())
}

fn order_and_pair(
    max_m: usize,
    cap: u32,
) -> impl Strategy<Value = (PreferenceOrder, WinnerSet, WinnerSet)> {
    (1..=max_m).prop_flat_map(move |m| (order(m), multiset(m, cap), multiset(m, cap)))
}

fn profile() -> impl Strategy<Value = Profile> {
    (2..=4usize, 1..=5usize).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(0..m, n),
            prop::collection::vec(order(m), n),
        )
            .prop_map(move |(ballots, prefs)| {
                Profile::new(m, ballots.into_iter().map(Candidate).collect(), prefs).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn strict_dominance_is_antisymmetric((q, x, y) in order_and_pair(6, 3)) {
        let xy = stochastic_dominance(&q, &x, &y).unwrap();
        let yx = stochastic_dominance(&q, &y, &x).unwrap();
        prop_assert!(!(xy.is_strict() && yx.is_strict()));
        let mirrored = match xy.kind {
            VerdictKind::StrictlyDominates => VerdictKind::Dominated,
            VerdictKind::Dominated => VerdictKind::StrictlyDominates,
            k => k,
        };
        prop_assert_eq!(yx.kind, mirrored);
    }

    #[test]
    fn three_characterizations_agree_on_multisets((q, x, y) in order_and_pair(6, 4)) {
        let sd = stochastic_dominance(&q, &x, &y).unwrap().is_strict();
        prop_assert_eq!(sd, match_dominance(&q, &x, &y).unwrap());
        prop_assert_eq!(sd, utility_dominates_all(&q, &x, &y).unwrap());
    }

    #[test]
    fn falsifier_is_a_witness((q, x, y) in order_and_pair(6, 3)) {
        let u = falsifying_utility(&q, &x, &y).unwrap();
        if match_dominance(&q, &x, &y).unwrap() {
            prop_assert!(u.is_none());
        } else {
            let u = u.expect("falsifier for a non-dominating pair");
            prop_assert!(u.is_consistent_with(&q));
            prop_assert!(expected_utility(&u, &x).unwrap() <= expected_utility(&u, &y).unwrap());
        }
    }

    #[test]
    fn reversal_duality((q, x, y) in order_and_pair(6, 3)) {
        let rev = q.reverse();
        prop_assert_eq!(
            stochastic_dominance(&q, &x, &y).unwrap().is_strict(),
            stochastic_dominance(&rev, &y, &x).unwrap().is_strict()
        );
        if x.size() > y.size() {
            prop_assert_eq!(match_dominance(&q, &x, &y).unwrap(), match_dominance(&rev, &y, &x).unwrap());
        }
    }

    #[test]
    fn blocks_are_regular((q, y) in (1..=6usize).prop_flat_map(|m| (order(m), multiset(m, 4))), k in 1..=24usize) {
        let big_k = y.size();
        prop_assume!(k <= big_k);
        let p = match_partition(&q, &y, k).unwrap();
        prop_assert_eq!(p.blocks.len(), k);
        prop_assert_eq!(p.blocks.iter().map(Vec::len).sum::<usize>(), big_k);
        let (lo, hi) = (big_k / k, big_k.div_ceil(k));
        prop_assert!(p.blocks.iter().all(|b| (lo..=hi).contains(&b.len())));
    }

    #[test]
    fn deviations_conserve_scores(p in profile(), voter in 0..5usize) {
        prop_assume!(voter < p.voters());
        let state = GameState::new(p);
        for b in (0..state.profile().candidates()).map(Candidate) {
            let next = state.after(voter, b).unwrap();
            prop_assert_eq!(next.scores().iter().sum::<usize>(), state.profile().voters());
            let changed: Vec<i64> = state
                .scores()
                .iter()
                .zip(next.scores())
                .map(|(&a, &b)| b as i64 - a as i64)
                .filter(|&d| d != 0)
                .collect();
            if b == state.profile().ballots()[voter] {
                prop_assert!(changed.is_empty());
            } else {
                prop_assert_eq!(changed.len(), 2);
                prop_assert_eq!(changed.iter().sum::<i64>(), 0);
            }
        }
        prop_assert_eq!(deviations(&state, voter).unwrap().len(), state.profile().candidates() - 1);
    }

    #[test]
    fn better_reply_certificates_replay(p in profile()) {
        let state = GameState::new(p);
        let mut cache = ProofCache::new();
        for v in 0..state.profile().voters() {
            for r in better_replies(&state, v, Some(&mut cache)).unwrap() {
                prop_assert!(r.certificate.derivation.is_some());
                prop_assert!(r.replay(state.profile().preference(v)).is_ok());
            }
        }
    }
}

#[test]
fn closures_are_sound() {
    for m in 1..=4 {
        for axioms in [AxiomSet::KGR, AxiomSet::KMDR] {
            let r = battery::soundness(m, UniverseMode::Multiset, axioms).unwrap();
            assert!(r.passed(), "{:?}", r.counterexamples);
        }
    }
    for m in 1..=5 {
        let r = battery::soundness(m, UniverseMode::Set, AxiomSet::KGR).unwrap();
        assert!(r.passed(), "{:?}", r.counterexamples);
    }
}

#[test]
fn multiset_agreement_is_exhaustive() {
    for m in 1..=4 {
        let r = battery::multiset_equivalence(m, 3).unwrap();
        assert!(r.passed(), "{:?}", r.counterexamples);
    }
}

#[test]
fn duality_is_exhaustive() {
    for m in 1..=5 {
        let r = battery::duality(m).unwrap();
        assert!(r.passed(), "{:?}", r.counterexamples);
    }
}

/// Strict responsiveness edges can only come from a strict base preference:
/// whenever `X+a > X+b` holds in the closure with a, b outside X, `a` beats `b`.
#[test]
fn responsiveness_converse_holds_in_closures() {
    for m in 2..=4 {
        for q in PreferenceOrder::all(m) {
            for (axioms, mode, cap) in [
                (AxiomSet::KGR, UniverseMode::Set, 1),
                (AxiomSet::KMDR, UniverseMode::Multiset, 2),
            ] {
                if m == 4 && mode == UniverseMode::Multiset && q != PreferenceOrder::identity(m) {
                    continue;
                }
                let ps = ProofSystem::new(&q, axioms, mode, cap).unwrap();
                let g = ps.graph();
                for (i, j, rel) in g.pairs() {
                    let (x, y) = (g.universe().get(i), g.universe().get(j));
                    if rel != Relation::Strict || x.size() != y.size() {
                        continue;
                    }
                    let diff: Vec<(usize, i64)> = x
                        .counts()
                        .iter()
                        .zip(y.counts())
                        .enumerate()
                        .map(|(c, (&a, &b))| (c, a as i64 - b as i64))
                        .filter(|&(_, d)| d != 0)
                        .collect();
                    if let [(c1, d1), (c2, _)] = diff[..] {
                        let (a, b) = if d1 > 0 { (c1, c2) } else { (c2, c1) };
                        if mode == UniverseMode::Set
                            || (x.count(Candidate(b)) == 0 && y.count(Candidate(a)) == 0)
                        {
                            assert!(
                                q.prefers(Candidate(a), Candidate(b)),
                                "{x:?} > {y:?} under {q:?}"
                            );
                        }
                    }
                }
            }
        }
    }
}

/// Every K+G+R edge between sets is also a K+MD+R edge of at least the same
/// strength once duplicates are available.
#[test]
fn kmdr_closure_contains_kgr_closure() {
    for m in 1..=4 {
        for q in PreferenceOrder::all(m) {
            if m == 4 && q != PreferenceOrder::identity(m) {
                continue;
            }
            let kgr = ProofSystem::new(&q, AxiomSet::KGR, UniverseMode::Set, 1).unwrap();
            let kmdr =
                ProofSystem::new(&q, AxiomSet::KMDR, UniverseMode::Multiset, m as u32).unwrap();
            for (i, j, rel) in kgr.graph().pairs() {
                let (x, y) = (kgr.graph().universe().get(i), kgr.graph().universe().get(j));
                let other = kmdr.graph().relation(x, y);
                let ok = match rel {
                    Relation::Strict => other == Some(Relation::Strict),
                    Relation::Weak => other.is_some(),
                };
                assert!(ok, "{x:?} {rel:?} {y:?} missing from K+MD+R under {q:?}");
            }
        }
    }
}
