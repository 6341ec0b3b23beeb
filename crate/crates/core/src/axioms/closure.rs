use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::preferences::WinnerSet;

use super::{AxiomInstance, Universe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Weak,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeLabel<'a> {
    Axiom(&'a AxiomInstance),
    Transitivity,
}

/// Dense bit rows, one per universe member.
#[derive(Debug, Clone)]
struct BitMatrix {
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            words,
            bits: vec![0; words * n],
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// `row(dst) |= row(src)` for a distinct source row.
    fn or_row_from(&mut self, dst: usize, src: &[u64]) {
        let w = self.words;
        for (d, s) in self.bits[dst * w..(dst + 1) * w].iter_mut().zip(src) {
            *d |= s;
        }
    }

    fn ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
        row.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// Closure of a set of axiom instances under transitivity.
///
/// Composition follows the weak < strict lattice: a chain is strict iff at
/// least one of its links is strict. The strict part is acyclic.
#[derive(Debug, Clone)]
pub struct RelationGraph {
    universe: Universe,
    instances: Vec<AxiomInstance>,
    /// Preferred instance per base pair: the first strict one, else the first.
    base: HashMap<(usize, usize), usize>,
    /// Base out-edges per node, sorted by target index.
    out: Vec<Vec<(usize, bool)>>,
    reach: BitMatrix,
    strict: BitMatrix,
}

/// Least fixed point of the instance edges under composition. Instances that
/// leave the universe are ignored. A strict cycle aborts with
/// [`Error::SoundnessViolation`].
pub fn close(instances: Vec<AxiomInstance>, universe: Universe) -> Result<RelationGraph> {
    let n = universe.len();
    let mut base: HashMap<(usize, usize), usize> = HashMap::new();
    for (k, inst) in instances.iter().enumerate() {
        let (Some(s), Some(t)) = (
            universe.position(&inst.source),
            universe.position(&inst.target),
        ) else {
            continue;
        };
        if s == t {
            if inst.strict {
                return Err(Error::SoundnessViolation(format!(
                    "{:?}",
                    inst.source.counts()
                )));
            }
            continue;
        }
        base.entry((s, t))
            .and_modify(|cur| {
                if inst.strict && !instances[*cur].strict {
                    *cur = k;
                }
            })
            .or_insert(k);
    }

    let mut out: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    let mut reach = BitMatrix::new(n);
    for (&(s, t), &k) in &base {
        out[s].push((t, instances[k].strict));
        reach.set(s, t);
    }
    for edges in &mut out {
        edges.sort_unstable();
    }

    // Warshall over bit rows.
    for k in 0..n {
        let row_k = reach.row(k).to_vec();
        for i in 0..n {
            if i != k && reach.get(i, k) {
                reach.or_row_from(i, &row_k);
            }
        }
    }

    // reflexive-transitive rows
    let mut refl = reach.clone();
    for i in 0..n {
        refl.set(i, i);
    }
    // seed[u] = everything reachable after leaving u along a strict base edge
    let mut seed = BitMatrix::new(n);
    let mut has_seed = vec![false; n];
    for (u, edges) in out.iter().enumerate() {
        for &(v, strict) in edges {
            if strict {
                seed.or_row_from(u, refl.row(v));
                has_seed[u] = true;
            }
        }
    }
    let mut strict = BitMatrix::new(n);
    for i in 0..n {
        let sources: Vec<usize> = BitMatrix::ones(refl.row(i))
            .filter(|&u| u < n && has_seed[u])
            .collect();
        for u in sources {
            strict.or_row_from(i, seed.row(u));
        }
        if strict.get(i, i) {
            return Err(Error::SoundnessViolation(format!(
                "{:?}",
                universe.get(i).counts()
            )));
        }
    }

    Ok(RelationGraph {
        universe,
        instances,
        base,
        out,
        reach,
        strict,
    })
}

impl RelationGraph {
    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn instances(&self) -> &[AxiomInstance] {
        &self.instances
    }

    /// Closed relation between two universe members, if any (irreflexive).
    pub fn relation(&self, x: &WinnerSet, y: &WinnerSet) -> Option<Relation> {
        let (i, j) = (self.universe.position(x)?, self.universe.position(y)?);
        self.relation_at(i, j)
    }

    pub fn relation_at(&self, i: usize, j: usize) -> Option<Relation> {
        if self.strict.get(i, j) {
            Some(Relation::Strict)
        } else if self.reach.get(i, j) {
            Some(Relation::Weak)
        } else {
            None
        }
    }

    pub fn is_strict(&self, x: &WinnerSet, y: &WinnerSet) -> bool {
        self.relation(x, y) == Some(Relation::Strict)
    }

    /// The closed edge with its origin: the generating instance when a base
    /// edge of the same strength exists, otherwise transitivity.
    pub fn edge(&self, x: &WinnerSet, y: &WinnerSet) -> Option<(Relation, EdgeLabel<'_>)> {
        let (i, j) = (self.universe.position(x)?, self.universe.position(y)?);
        let rel = self.relation_at(i, j)?;
        let label = match self.base.get(&(i, j)) {
            Some(&k) if (self.instances[k].strict) == (rel == Relation::Strict) => {
                EdgeLabel::Axiom(&self.instances[k])
            }
            _ => EdgeLabel::Transitivity,
        };
        Some((rel, label))
    }

    /// All closed pairs `(i, j, relation)` by universe index.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, Relation)> + '_ {
        let n = self.universe.len();
        (0..n).flat_map(move |i| {
            BitMatrix::ones(self.reach.row(i))
                .filter(move |&j| j < n)
                .map(move |j| (i, j, self.relation_at(i, j).expect("reachable")))
        })
    }

    pub fn strict_count(&self) -> usize {
        self.pairs().filter(|p| p.2 == Relation::Strict).count()
    }

    pub(super) fn out_edges(&self, i: usize) -> &[(usize, bool)] {
        &self.out[i]
    }

    pub(super) fn base_instance(&self, i: usize, j: usize) -> &AxiomInstance {
        &self.instances[self.base[&(i, j)]]
    }
}
