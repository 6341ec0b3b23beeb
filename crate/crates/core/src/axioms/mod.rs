//! Set-extension axioms as production rules over a finite universe of winner
//! sets, their transitive closure, and derivation extraction.
//!
//! Every generated [`AxiomInstance`] is an edge `source > target` (strict) or
//! `source >= target` (weak). [`close`] computes the least relation closed
//! under composition, where a chain is strict as soon as one link is.

mod closure;
mod derivation;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::preferences::{Candidate, PreferenceOrder, Roster, WinnerSet};

pub use closure::{close, EdgeLabel, Relation, RelationGraph};
pub use derivation::{entails, md_entails_g, md_entails_g_missing, Derivation, ProofSystem};

/// Largest universe [`enumerate_universe`] will materialize.
pub const ENUMERATION_LIMIT: u128 = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axiom {
    K1,
    K2,
    G1,
    G2,
    R1,
    R2,
    MD1,
    MD2,
    MD3,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Which axiom families feed a closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AxiomSet {
    pub kelly: bool,
    pub gardenfors: bool,
    pub responsiveness: bool,
    pub duplication: bool,
}

impl AxiomSet {
    pub const KGR: Self = Self {
        kelly: true,
        gardenfors: true,
        responsiveness: true,
        duplication: false,
    };
    pub const KMDR: Self = Self {
        kelly: true,
        gardenfors: false,
        responsiveness: true,
        duplication: true,
    };
    pub const MD: Self = Self {
        kelly: false,
        gardenfors: false,
        responsiveness: false,
        duplication: true,
    };
    pub const G: Self = Self {
        kelly: false,
        gardenfors: true,
        responsiveness: false,
        duplication: false,
    };
}

impl FromStr for AxiomSet {
    type Err = String;

    /// Accepts letter strings such as `kgr`, `kmdr`, `k+md+r`, `md`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut set = AxiomSet::default();
        let lower = s.to_ascii_lowercase().replace(['+', ',', ' '], "");
        let mut rest = lower.as_str();
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix("md") {
                set.duplication = true;
                rest = r;
            } else if let Some(r) = rest.strip_prefix('k') {
                set.kelly = true;
                rest = r;
            } else if let Some(r) = rest.strip_prefix('g') {
                set.gardenfors = true;
                rest = r;
            } else if let Some(r) = rest.strip_prefix('r') {
                set.responsiveness = true;
                rest = r;
            } else {
                return Err(format!(
                    "unknown axiom family in `{s}` (use letters k, g, r, md)"
                ));
            }
        }
        if set == AxiomSet::default() {
            return Err("empty axiom set".to_string());
        }
        Ok(set)
    }
}

impl fmt::Display for AxiomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.kelly {
            parts.push("K");
        }
        if self.gardenfors {
            parts.push("G");
        }
        if self.duplication {
            parts.push("MD");
        }
        if self.responsiveness {
            parts.push("R");
        }
        f.write_str(&parts.join("+"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UniverseMode {
    Set,
    Multiset,
}

impl fmt::Display for UniverseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UniverseMode::Set => "set",
            UniverseMode::Multiset => "multiset",
        })
    }
}

impl FromStr for UniverseMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "set" => Ok(UniverseMode::Set),
            "multiset" => Ok(UniverseMode::Multiset),
            other => Err(format!("unknown mode `{other}` (use set or multiset)")),
        }
    }
}

/// A finite carrier for a closure, sorted in [`WinnerSet`] order.
#[derive(Debug, Clone)]
pub struct Universe {
    mode: UniverseMode,
    max_multiplicity: u32,
    members: Vec<WinnerSet>,
    index: HashMap<WinnerSet, usize>,
}

impl Universe {
    /// All nonempty multisets over `m` candidates with multiplicity at most
    /// `max_multiplicity` (forced to 1 in set mode).
    pub fn enumerate(m: usize, mode: UniverseMode, max_multiplicity: u32) -> Result<Self> {
        let members = enumerate_universe(m, mode, max_multiplicity)?;
        let max_multiplicity = if mode == UniverseMode::Set {
            1
        } else {
            max_multiplicity
        };
        Ok(Self::from_sorted(mode, max_multiplicity, members))
    }

    /// Universe over an explicit list of members.
    pub fn from_members(
        mode: UniverseMode,
        max_multiplicity: u32,
        mut members: Vec<WinnerSet>,
    ) -> Self {
        members.sort();
        members.dedup();
        Self::from_sorted(mode, max_multiplicity, members)
    }

    fn from_sorted(mode: UniverseMode, max_multiplicity: u32, members: Vec<WinnerSet>) -> Self {
        let index = members
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Self {
            mode,
            max_multiplicity,
            members,
            index,
        }
    }

    pub fn mode(&self) -> UniverseMode {
        self.mode
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.max_multiplicity
    }

    pub fn members(&self) -> &[WinnerSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, w: &WinnerSet) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn contains(&self, w: &WinnerSet) -> bool {
        self.index.contains_key(w)
    }

    pub fn get(&self, i: usize) -> &WinnerSet {
        &self.members[i]
    }
}

/// Number of nonempty multisets over `m` candidates with multiplicity `<= max`.
pub fn universe_size(m: usize, max_multiplicity: u32) -> u128 {
    let base = max_multiplicity as u128 + 1;
    let mut total: u128 = 1;
    for _ in 0..m {
        total = total.saturating_mul(base);
    }
    total - 1
}

/// All nonempty multisets over `m` candidates, multiplicities bounded by
/// `max_multiplicity` (1 in set mode), in [`WinnerSet`] order.
pub fn enumerate_universe(
    m: usize,
    mode: UniverseMode,
    max_multiplicity: u32,
) -> Result<Vec<WinnerSet>> {
    if max_multiplicity == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    let cap = if mode == UniverseMode::Set {
        1
    } else {
        max_multiplicity
    };
    let size = universe_size(m, cap);
    if size > ENUMERATION_LIMIT {
        return Err(Error::UniverseOverflow {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut counts = vec![0u32; m];
    loop {
        // odometer increment
        let mut i = 0;
        while i < m && counts[i] == cap {
            counts[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
        counts[i] += 1;
        out.push(WinnerSet::from_counts(counts.clone()).expect("nonzero"));
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GardenforsPart {
    /// `{a} > {a} ∪ X`
    SingletonOverJoined,
    /// `{a} ∪ X > X`
    JoinedOverRest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Monotonicity {
    NonDecreasing,
    NonIncreasing,
}

/// The elements that instantiate an axiom's premise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InstanceDetail {
    /// Premise is a statement about source and target alone.
    Kelly,
    Gardenfors {
        top: Candidate,
        rest: WinnerSet,
        joined: WinnerSet,
        part: GardenforsPart,
    },
    /// `{better} + common` against `{worse} + common`; `common` may be empty.
    Responsiveness {
        better: Candidate,
        worse: Candidate,
        common: Option<WinnerSet>,
    },
    /// `duplicated` carries `multiplicities[j]` copies of the `j`-th member of
    /// `base` in ascending preference order.
    Duplication {
        base: WinnerSet,
        multiplicities: Vec<u32>,
        duplicated: WinnerSet,
        direction: Monotonicity,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AxiomInstance {
    pub axiom: Axiom,
    pub source: WinnerSet,
    pub target: WinnerSet,
    pub strict: bool,
    pub detail: InstanceDetail,
}

impl AxiomInstance {
    /// Bracketed label such as `[R1, a=b, b=c, X={a}]`.
    pub fn describe(&self, roster: &Roster) -> String {
        match &self.detail {
            InstanceDetail::Kelly => format!("[{}]", self.axiom),
            InstanceDetail::Gardenfors { top, rest, .. } => {
                format!(
                    "[{}, a={}, X={}]",
                    self.axiom,
                    roster.label(*top),
                    roster.format_set(rest)
                )
            }
            InstanceDetail::Responsiveness {
                better,
                worse,
                common,
            } => format!(
                "[{}, a={}, b={}, X={}]",
                self.axiom,
                roster.label(*better),
                roster.label(*worse),
                common
                    .as_ref()
                    .map_or_else(|| "{}".to_string(), |c| roster.format_set(c))
            ),
            InstanceDetail::Duplication {
                base,
                multiplicities,
                direction,
                ..
            } => {
                let h: Vec<String> = multiplicities.iter().map(ToString::to_string).collect();
                let dir = match direction {
                    Monotonicity::NonDecreasing => "MD1",
                    Monotonicity::NonIncreasing => "MD2",
                };
                let axiom = if self.strict {
                    format!("{dir}+MD3")
                } else {
                    dir.to_string()
                };
                format!(
                    "[{axiom}, base={}, h=({})]",
                    roster.format_set(base),
                    h.join(",")
                )
            }
        }
    }
}

/// Every instance of the selected axioms with source and target in the
/// universe. With `weak`, weak variants are added wherever the strict variant
/// of the same axiom does not already yield the edge.
///
/// R2 adds nothing under a strict base order: `a >= b` with `a != b` is
/// `a > b`, already covered by R1, and `a = b` gives only reflexive pairs.
pub fn instantiate_axioms(
    q: &PreferenceOrder,
    universe: &Universe,
    axioms: AxiomSet,
    weak: bool,
) -> Vec<AxiomInstance> {
    let mut out = Vec::new();
    if axioms.kelly {
        kelly_instances(q, universe, weak, &mut out);
    }
    if axioms.gardenfors {
        gardenfors_instances(q, universe, weak, &mut out);
    }
    if axioms.responsiveness {
        responsiveness_instances(q, universe, &mut out);
    }
    if axioms.duplication {
        duplication_instances(q, universe, weak, &mut out);
    }
    out
}

fn kelly_instances(
    q: &PreferenceOrder,
    universe: &Universe,
    weak: bool,
    out: &mut Vec<AxiomInstance>,
) {
    let best: Vec<usize> = universe
        .members()
        .iter()
        .map(|w| q.position(w.best(q)))
        .collect();
    let worst: Vec<usize> = universe
        .members()
        .iter()
        .map(|w| q.position(w.worst(q)))
        .collect();
    for (i, x) in universe.members().iter().enumerate() {
        for (j, y) in universe.members().iter().enumerate() {
            if i == j {
                continue;
            }
            // positions grow downwards: worst of X above best of Y
            let (axiom, strict) = if worst[i] < best[j] {
                (Axiom::K1, true)
            } else if weak && worst[i] == best[j] {
                (Axiom::K2, false)
            } else {
                continue;
            };
            out.push(AxiomInstance {
                axiom,
                source: x.clone(),
                target: y.clone(),
                strict,
                detail: InstanceDetail::Kelly,
            });
        }
    }
}

/// Instances are enumerated from the joined set `{a} ∪ X`, whose best member
/// is necessarily `a`, so that generation only consults the universe for the
/// two endpoints of each edge.
fn gardenfors_instances(
    q: &PreferenceOrder,
    universe: &Universe,
    weak: bool,
    out: &mut Vec<AxiomInstance>,
) {
    let m = q.len();
    for joined in universe.members() {
        let a = joined.best(q);
        let Some(rest) = joined.without_one(a) else {
            continue;
        };
        if universe.mode() == UniverseMode::Set {
            debug_assert!(!rest.contains(a));
        }
        // In set mode `a` never survives in the rest; a G2 instance with
        // `a` in X there coincides with the G1 edge `({a}, X)`.
        let strict = !rest.contains(a);
        if !strict && !weak {
            continue;
        }
        let axiom = if strict { Axiom::G1 } else { Axiom::G2 };
        let single = WinnerSet::singleton(m, a);
        let detail = |part| InstanceDetail::Gardenfors {
            top: a,
            rest: rest.clone(),
            joined: joined.clone(),
            part,
        };
        if universe.contains(&single) {
            out.push(AxiomInstance {
                axiom,
                source: single,
                target: joined.clone(),
                strict,
                detail: detail(GardenforsPart::SingletonOverJoined),
            });
        }
        if universe.contains(&rest) {
            out.push(AxiomInstance {
                axiom,
                source: joined.clone(),
                target: rest.clone(),
                strict,
                detail: detail(GardenforsPart::JoinedOverRest),
            });
        }
    }
}

/// In set mode the shared part must avoid both swapped candidates; in
/// multiset mode it is any multiset, so a swap may raise the multiplicity of
/// a candidate already present.
fn responsiveness_instances(
    q: &PreferenceOrder,
    universe: &Universe,
    out: &mut Vec<AxiomInstance>,
) {
    let m = q.len();
    for source in universe.members() {
        for a in source.support() {
            let common = source.without_one(a);
            let base = common
                .clone()
                .map_or_else(|| vec![0u32; m], |c| c.counts().to_vec());
            for &b in &q.ranking()[q.position(a) + 1..] {
                if universe.mode() == UniverseMode::Set && base[b.0] > 0 {
                    continue;
                }
                let mut counts = base.clone();
                counts[b.0] += 1;
                let target = WinnerSet::from_counts(counts).expect("nonempty");
                if !universe.contains(&target) {
                    continue;
                }
                out.push(AxiomInstance {
                    axiom: Axiom::R1,
                    source: source.clone(),
                    target,
                    strict: true,
                    detail: InstanceDetail::Responsiveness {
                        better: a,
                        worse: b,
                        common: common.clone(),
                    },
                });
            }
        }
    }
}

/// All monotone vectors of length `k` over `0..=cap`.
fn monotone_vectors(k: usize, cap: u32, direction: Monotonicity) -> Vec<Vec<u32>> {
    fn go(
        k: usize,
        lo: u32,
        hi: u32,
        prefix: &mut Vec<u32>,
        dir: Monotonicity,
        out: &mut Vec<Vec<u32>>,
    ) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for v in lo..=hi {
            prefix.push(v);
            match dir {
                Monotonicity::NonDecreasing => go(k, v, hi, prefix, dir, out),
                Monotonicity::NonIncreasing => go(k, lo, v, prefix, dir, out),
            }
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(k, 0, cap, &mut Vec::with_capacity(k), direction, &mut out);
    out
}

fn duplication_instances(
    q: &PreferenceOrder,
    universe: &Universe,
    weak: bool,
    out: &mut Vec<AxiomInstance>,
) {
    let m = q.len();
    let cap = universe.max_multiplicity();
    for base in universe.members().iter().filter(|w| w.is_set()) {
        let xs = base.ascending(q);
        for direction in [Monotonicity::NonDecreasing, Monotonicity::NonIncreasing] {
            for h in monotone_vectors(xs.len(), cap, direction) {
                if h.iter().all(|&v| v == 0) {
                    continue;
                }
                let constant = h.iter().all(|&v| v == h[0]);
                if constant && !weak {
                    continue;
                }
                let mut counts = vec![0u32; m];
                for (&x, &n) in xs.iter().zip(&h) {
                    counts[x.0] = n;
                }
                let duplicated = WinnerSet::from_counts(counts).expect("nonzero");
                if duplicated == *base || !universe.contains(&duplicated) {
                    continue;
                }
                let (source, target) = match direction {
                    Monotonicity::NonDecreasing => (duplicated.clone(), base.clone()),
                    Monotonicity::NonIncreasing => (base.clone(), duplicated.clone()),
                };
                let axiom = match (constant, direction) {
                    (false, _) => Axiom::MD3,
                    (true, Monotonicity::NonDecreasing) => Axiom::MD1,
                    (true, Monotonicity::NonIncreasing) => Axiom::MD2,
                };
                out.push(AxiomInstance {
                    axiom,
                    source,
                    target,
                    strict: !constant,
                    detail: InstanceDetail::Duplication {
                        base: base.clone(),
                        multiplicities: h,
                        duplicated,
                        direction,
                    },
                });
            }
        }
    }
}

/// Re-checks an instance's premise from scratch under `q`.
pub fn verify_instance(
    q: &PreferenceOrder,
    inst: &AxiomInstance,
    mode: UniverseMode,
) -> std::result::Result<(), String> {
    let fail = |msg: &str| Err(format!("{}: {msg}", inst.axiom));
    match &inst.detail {
        InstanceDetail::Kelly => {
            let pairs = || {
                inst.source
                    .support()
                    .flat_map(|a| inst.target.support().map(move |b| (a, b)))
            };
            match inst.axiom {
                Axiom::K1 if inst.strict => {
                    if !pairs().all(|(a, b)| q.prefers(a, b)) {
                        return fail("some source member is not above every target member");
                    }
                }
                Axiom::K2 if !inst.strict => {
                    if !pairs().all(|(a, b)| q.weakly_prefers(a, b)) {
                        return fail("some source member is below a target member");
                    }
                }
                _ => return fail("Kelly detail with mismatched axiom or strictness"),
            }
        }
        InstanceDetail::Gardenfors {
            top,
            rest,
            joined,
            part,
        } => {
            let strict_premise = rest.support().all(|b| q.prefers(*top, b));
            let weak_premise = rest.support().all(|b| q.weakly_prefers(*top, b));
            match (inst.axiom, inst.strict) {
                (Axiom::G1, true) if strict_premise => {}
                (Axiom::G2, false) if weak_premise => {}
                _ => return fail("top element does not dominate the rest as required"),
            }
            let expected = match mode {
                UniverseMode::Set => rest.union_with(*top),
                UniverseMode::Multiset => rest.with_added(*top),
            };
            if *joined != expected {
                return fail("joined set is not {a} together with X");
            }
            let m = rest.roster_size();
            let (src, tgt) = match part {
                GardenforsPart::SingletonOverJoined => {
                    (WinnerSet::singleton(m, *top), joined.clone())
                }
                GardenforsPart::JoinedOverRest => (joined.clone(), rest.clone()),
            };
            if inst.source != src || inst.target != tgt {
                return fail("source/target do not match the instantiated premise");
            }
        }
        InstanceDetail::Responsiveness {
            better,
            worse,
            common,
        } => {
            if inst.axiom != Axiom::R1 || !inst.strict {
                return fail("responsiveness edges are R1 and strict");
            }
            if !q.prefers(*better, *worse) {
                return fail("a is not preferred to b");
            }
            let m = inst.source.roster_size();
            let base = common
                .as_ref()
                .map_or_else(|| vec![0u32; m], |c| c.counts().to_vec());
            if mode == UniverseMode::Set && (base[better.0] > 0 || base[worse.0] > 0) {
                return fail("shared part contains a or b");
            }
            let with = |c: Candidate| {
                let mut counts = base.clone();
                counts[c.0] += 1;
                WinnerSet::from_counts(counts).expect("nonempty")
            };
            if inst.source != with(*better) || inst.target != with(*worse) {
                return fail("source/target are not {a}+X and {b}+X");
            }
        }
        InstanceDetail::Duplication {
            base,
            multiplicities,
            duplicated,
            direction,
        } => {
            if !base.is_set() {
                return fail("base must be a set");
            }
            let xs = base.ascending(q);
            if xs.len() != multiplicities.len() {
                return fail("multiplicity vector length differs from base size");
            }
            let monotone = multiplicities.windows(2).all(|w| match direction {
                Monotonicity::NonDecreasing => w[0] <= w[1],
                Monotonicity::NonIncreasing => w[0] >= w[1],
            });
            if !monotone {
                return fail("multiplicities are not monotone in the stated direction");
            }
            let constant = multiplicities.windows(2).all(|w| w[0] == w[1]);
            if inst.strict == constant {
                return fail("strictness must hold exactly when multiplicities are not all equal");
            }
            let expected_axiom = match (constant, direction) {
                (false, _) => Axiom::MD3,
                (true, Monotonicity::NonDecreasing) => Axiom::MD1,
                (true, Monotonicity::NonIncreasing) => Axiom::MD2,
            };
            if inst.axiom != expected_axiom {
                return fail("axiom label does not match the multiplicity pattern");
            }
            let mut counts = vec![0u32; base.roster_size()];
            for (&x, &n) in xs.iter().zip(multiplicities) {
                counts[x.0] = n;
            }
            if counts != duplicated.counts() {
                return fail("duplicated multiset does not follow the multiplicities");
            }
            let (src, tgt) = match direction {
                Monotonicity::NonDecreasing => (duplicated, base),
                Monotonicity::NonIncreasing => (base, duplicated),
            };
            if inst.source != *src || inst.target != *tgt {
                return fail("source/target do not match the duplication direction");
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws(text: &str, r: &Roster) -> WinnerSet {
        WinnerSet::parse(text, r).unwrap()
    }

    fn edges(instances: &[AxiomInstance], r: &Roster) -> Vec<String> {
        let mut v: Vec<String> = instances
            .iter()
            .map(|i| {
                let rel = if i.strict { ">" } else { ">=" };
                format!(
                    "{} {rel} {}",
                    r.format_set(&i.source),
                    r.format_set(&i.target)
                )
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn universe_counts() {
        assert_eq!(
            enumerate_universe(2, UniverseMode::Set, 1).unwrap().len(),
            3
        );
        assert_eq!(
            enumerate_universe(2, UniverseMode::Multiset, 2)
                .unwrap()
                .len(),
            8
        );
        assert_eq!(
            enumerate_universe(3, UniverseMode::Set, 1).unwrap().len(),
            7
        );
        // set mode ignores the multiplicity cap
        assert_eq!(
            enumerate_universe(3, UniverseMode::Set, 5).unwrap().len(),
            7
        );
        assert_eq!(
            enumerate_universe(4, UniverseMode::Multiset, 4)
                .unwrap()
                .len(),
            624
        );
        assert_eq!(
            enumerate_universe(2, UniverseMode::Multiset, 0),
            Err(Error::ZeroMultiplicity)
        );
        assert!(matches!(
            enumerate_universe(30, UniverseMode::Multiset, 3),
            Err(Error::UniverseOverflow { .. })
        ));
    }

    #[test]
    fn universe_is_sorted_and_deterministic() {
        let r = Roster::alphabetic(2);
        let u = enumerate_universe(2, UniverseMode::Set, 1).unwrap();
        let shown: Vec<String> = u.iter().map(|w| r.format_set(w)).collect();
        assert_eq!(shown, ["{a}", "{a,b}", "{b}"]);
        assert_eq!(u, enumerate_universe(2, UniverseMode::Set, 1).unwrap());
    }

    #[test]
    fn gardenfors_on_two_candidates() {
        let r = Roster::alphabetic(2);
        let q = PreferenceOrder::identity(2);
        let u = Universe::enumerate(2, UniverseMode::Set, 1).unwrap();
        let inst = instantiate_axioms(&q, &u, AxiomSet::G, false);
        assert_eq!(edges(&inst, &r), ["{a,b} > {b}", "{a} > {a,b}"]);
    }

    #[test]
    fn responsiveness_with_shared_element() {
        let r = Roster::alphabetic(3);
        let q = PreferenceOrder::identity(3);
        let u = Universe::enumerate(3, UniverseMode::Set, 1).unwrap();
        let inst = instantiate_axioms(
            &q,
            &u,
            AxiomSet {
                responsiveness: true,
                ..Default::default()
            },
            true,
        );
        let found = inst.iter().any(|i| {
            i.source == ws("{a,c}", &r)
                && i.target == ws("{b,c}", &r)
                && i.detail
                    == InstanceDetail::Responsiveness {
                        better: Candidate(0),
                        worse: Candidate(1),
                        common: Some(ws("{c}", &r)),
                    }
        });
        assert!(found);
        // never swaps into an element already present in set mode
        assert!(inst.iter().all(|i| i.target.is_set()));
    }

    #[test]
    fn duplication_example() {
        let r = Roster::alphabetic(2);
        let q = PreferenceOrder::identity(2);
        let u = Universe::enumerate(2, UniverseMode::Multiset, 2).unwrap();
        let inst = instantiate_axioms(&q, &u, AxiomSet::MD, true);
        // base {a,b} ascending is (b, a); h = (1, 2) duplicates the top element
        let hit = inst
            .iter()
            .find(|i| {
                matches!(&i.detail, InstanceDetail::Duplication { base, multiplicities, .. }
                if *base == ws("{a,b}", &r) && multiplicities == &vec![1, 2])
            })
            .unwrap();
        assert_eq!(hit.source, ws("{a,a,b}", &r));
        assert_eq!(hit.target, ws("{a,b}", &r));
        assert!(hit.strict);
        assert_eq!(hit.axiom, Axiom::MD3);
        assert_eq!(hit.describe(&r), "[MD1+MD3, base={a,b}, h=(1,2)]");
        for i in &inst {
            verify_instance(&q, i, UniverseMode::Multiset).unwrap();
        }
        // constant vector links the scaled copy in both directions
        let pair = [
            "{a,a,b,b} >= {a,b}".to_string(),
            "{a,b} >= {a,a,b,b}".to_string(),
        ];
        let shown = edges(&inst, &r);
        assert!(pair.iter().all(|p| shown.contains(p)));
    }

    #[test]
    fn set_mode_drops_duplications_outside_the_universe() {
        let q = PreferenceOrder::identity(3);
        let u = Universe::enumerate(3, UniverseMode::Set, 1).unwrap();
        let inst = instantiate_axioms(&q, &u, AxiomSet::MD, true);
        assert!(!inst.is_empty());
        assert!(inst
            .iter()
            .all(|i| i.source.is_set() && i.target.is_set() && i.strict));
    }

    #[test]
    fn verify_rejects_tampered_instances() {
        let r = Roster::alphabetic(3);
        let q = PreferenceOrder::identity(3);
        let u = Universe::enumerate(3, UniverseMode::Set, 1).unwrap();
        let all = instantiate_axioms(&q, &u, AxiomSet::KGR, true);
        for inst in &all {
            verify_instance(&q, inst, UniverseMode::Set).unwrap();
            let mut flipped = inst.clone();
            std::mem::swap(&mut flipped.source, &mut flipped.target);
            assert!(
                verify_instance(&q, &flipped, UniverseMode::Set).is_err(),
                "{}",
                inst.describe(&r)
            );
        }
        // under the reverse order every premise breaks
        let rev = q.reverse();
        assert!(all
            .iter()
            .all(|i| verify_instance(&rev, i, UniverseMode::Set).is_err()));
    }

    #[test]
    fn axiom_set_parsing() {
        assert_eq!("kgr".parse::<AxiomSet>().unwrap(), AxiomSet::KGR);
        assert_eq!("K+MD+R".parse::<AxiomSet>().unwrap(), AxiomSet::KMDR);
        assert_eq!("md".parse::<AxiomSet>().unwrap(), AxiomSet::MD);
        assert!("kx".parse::<AxiomSet>().is_err());
        assert_eq!(AxiomSet::KMDR.to_string(), "K+MD+R");
    }

    #[test]
    fn monotone_vector_counts() {
        // C(cap + k, k)
        assert_eq!(monotone_vectors(2, 2, Monotonicity::NonDecreasing).len(), 6);
        assert_eq!(
            monotone_vectors(4, 4, Monotonicity::NonIncreasing).len(),
            70
        );
    }
}
