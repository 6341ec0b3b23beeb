//! Candidates, strict preference orders, winner (multi)sets and exact utilities.
//!
//! Candidates are small integer ids `0..m` with a separate label table
//! ([`Roster`]). A [`WinnerSet`] stores one multiplicity per candidate, so the
//! same type serves plain sets (every count is 0 or 1) and multisets.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Candidate(pub usize);

impl Candidate {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Label table for the candidates `0..m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roster {
    labels: Vec<String>,
    index: HashMap<String, Candidate>,
}

impl Roster {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyRoster);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if !is_valid_label(label) {
                return Err(Error::InvalidLabel(label.clone()));
            }
            if index.insert(label.clone(), Candidate(i)).is_some() {
                return Err(Error::DuplicateCandidate(label.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    /// Roster named `a`, `b`, `c`, ... (then `c26`, `c27`, ... past `z`).
    pub fn alphabetic(m: usize) -> Self {
        let labels = (0..m).map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("c{i}")
            }
        });
        Self::new(labels).expect("generated labels are distinct and valid")
    }

    /// Roster made of the labels named in a chain such as `"c > a > b"`,
    /// sorted alphabetically. Repeated labels collapse to one entry; the
    /// repetition is reported when the chain itself is parsed.
    pub fn from_chain(text: &str) -> Result<Self> {
        let mut labels: Vec<String> = text.split('>').map(|s| s.trim().to_string()).collect();
        labels.sort();
        labels.dedup();
        Self::new(labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, c: Candidate) -> &str {
        &self.labels[c.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn lookup(&self, label: &str) -> Result<Candidate> {
        self.index
            .get(label.trim())
            .copied()
            .ok_or_else(|| Error::UnknownCandidate(label.trim().to_string()))
    }

    pub fn candidates(&self) -> impl Iterator<Item = Candidate> {
        (0..self.labels.len()).map(Candidate)
    }

    pub fn format_set(&self, w: &WinnerSet) -> String {
        let parts: Vec<&str> = w.members().map(|c| self.label(c)).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn format_order(&self, q: &PreferenceOrder) -> String {
        let parts: Vec<&str> = q.ranking().iter().map(|&c| self.label(c)).collect();
        parts.join(">")
    }
}

fn is_valid_label(label: &str) -> bool {
    !label.is_empty()
        && label.trim() == label
        && !label
            .contains(|ch: char| matches!(ch, '>' | ',' | '{' | '}' | '|') || ch.is_whitespace())
}

/// A strict linear order over `0..m`, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceOrder {
    ranking: Vec<Candidate>,
    position: Vec<usize>,
}

impl PreferenceOrder {
    pub fn new(ranking: Vec<Candidate>) -> Result<Self> {
        let m = ranking.len();
        if m == 0 {
            return Err(Error::EmptyRoster);
        }
        let mut position = vec![usize::MAX; m];
        for (pos, c) in ranking.iter().enumerate() {
            if c.0 >= m || position[c.0] != usize::MAX {
                return Err(Error::NotAPermutation(m));
            }
            position[c.0] = pos;
        }
        Ok(Self { ranking, position })
    }

    /// The order `0 > 1 > ... > m-1`.
    pub fn identity(m: usize) -> Self {
        Self::new((0..m).map(Candidate).collect()).expect("identity is a permutation")
    }

    /// Parses a chain like `"a > b > c"`; every roster candidate must appear
    /// exactly once.
    pub fn parse(text: &str, roster: &Roster) -> Result<Self> {
        let mut seen = vec![false; roster.len()];
        let mut ranking = Vec::with_capacity(roster.len());
        for part in text.split('>') {
            let label = part.trim();
            let c = roster.lookup(label)?;
            if seen[c.0] {
                return Err(Error::DuplicateCandidate(label.to_string()));
            }
            seen[c.0] = true;
            ranking.push(c);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::MissingCandidate(
                roster.label(Candidate(missing)).to_string(),
            ));
        }
        Self::new(ranking)
    }

    /// All `m!` orders, in lexicographic order of their rankings.
    pub fn all(m: usize) -> Vec<Self> {
        use itertools::Itertools;
        (0..m)
            .map(Candidate)
            .permutations(m)
            .map(|r| Self::new(r).expect("permutation"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn ranking(&self) -> &[Candidate] {
        &self.ranking
    }

    /// Zero-based rank of `c`; 0 is the most preferred candidate.
    pub fn position(&self, c: Candidate) -> usize {
        self.position[c.0]
    }

    pub fn top(&self) -> Candidate {
        self.ranking[0]
    }

    pub fn prefers(&self, a: Candidate, b: Candidate) -> bool {
        self.position(a) < self.position(b)
    }

    pub fn weakly_prefers(&self, a: Candidate, b: Candidate) -> bool {
        self.position(a) <= self.position(b)
    }

    /// Compares by preference: `Greater` means `a` is preferred to `b`.
    pub fn compare(&self, a: Candidate, b: Candidate) -> Ordering {
        self.position(b).cmp(&self.position(a))
    }

    /// The `j` most preferred candidates, best first.
    pub fn prefix_set(&self, j: usize) -> Result<&[Candidate]> {
        let m = self.len();
        if j == 0 || j > m {
            return Err(Error::PrefixOutOfRange { j, m });
        }
        Ok(&self.ranking[..j])
    }

    pub fn reverse(&self) -> Self {
        let mut ranking = self.ranking.clone();
        ranking.reverse();
        Self::new(ranking).expect("reversal of a permutation")
    }
}

/// A nonempty multiset of candidates, stored as one count per candidate.
///
/// Members iterate in candidate-id order; ordering between winner sets is the
/// lexicographic order of those member sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WinnerSet {
    counts: Vec<u32>,
}

impl WinnerSet {
    pub fn from_counts(counts: Vec<u32>) -> Result<Self> {
        if counts.iter().all(|&c| c == 0) {
            return Err(Error::EmptyWinnerSet);
        }
        Ok(Self { counts })
    }

    pub fn from_members<I: IntoIterator<Item = Candidate>>(m: usize, members: I) -> Result<Self> {
        let mut counts = vec![0u32; m];
        for c in members {
            if c.0 >= m {
                return Err(Error::RosterMismatch {
                    expected: m,
                    found: c.0 + 1,
                });
            }
            counts[c.0] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn singleton(m: usize, c: Candidate) -> Self {
        let mut counts = vec![0u32; m];
        counts[c.0] = 1;
        Self { counts }
    }

    /// Parses `"{a,c}"`; repeated labels (`"{a,a,b}"`) give a multiset.
    pub fn parse(text: &str, roster: &Roster) -> Result<Self> {
        let trimmed = text.trim();
        let inner = trimmed
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::MalformedWinnerSet(text.to_string()))?;
        if inner.trim().is_empty() {
            return Err(Error::EmptyWinnerSet);
        }
        let members = inner
            .split(',')
            .map(|label| roster.lookup(label))
            .collect::<Result<Vec<_>>>()?;
        Self::from_members(roster.len(), members)
    }

    /// Like [`WinnerSet::parse`] but rejects repeated candidates.
    pub fn parse_set(text: &str, roster: &Roster) -> Result<Self> {
        let w = Self::parse(text, roster)?;
        if !w.is_set() {
            return Err(Error::NotASet(text.trim().to_string()));
        }
        Ok(w)
    }

    /// Number of candidates in the ambient roster.
    pub fn roster_size(&self) -> usize {
        self.counts.len()
    }

    /// Total size, counting multiplicity.
    pub fn size(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, c: Candidate) -> u32 {
        self.counts[c.0]
    }

    pub fn contains(&self, c: Candidate) -> bool {
        self.counts[c.0] > 0
    }

    pub fn is_set(&self) -> bool {
        self.counts.iter().all(|&c| c <= 1)
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    /// Distinct members in id order.
    pub fn support(&self) -> impl Iterator<Item = Candidate> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, _)| Candidate(i))
    }

    /// Members with multiplicity, in id order.
    pub fn members(&self) -> impl Iterator<Item = Candidate> + '_ {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| std::iter::repeat_n(Candidate(i), n as usize))
    }

    /// Members with multiplicity, least preferred first.
    pub fn ascending(&self, q: &PreferenceOrder) -> Vec<Candidate> {
        q.ranking()
            .iter()
            .rev()
            .flat_map(|&c| std::iter::repeat_n(c, self.counts[c.0] as usize))
            .collect()
    }

    /// Most preferred member.
    pub fn best(&self, q: &PreferenceOrder) -> Candidate {
        q.ranking()
            .iter()
            .copied()
            .find(|&c| self.contains(c))
            .expect("nonempty")
    }

    /// Least preferred member.
    pub fn worst(&self, q: &PreferenceOrder) -> Candidate {
        q.ranking()
            .iter()
            .rev()
            .copied()
            .find(|&c| self.contains(c))
            .expect("nonempty")
    }

    /// Number of members (with multiplicity) among the top `j` of `q`.
    pub fn count_in_prefix(&self, q: &PreferenceOrder, j: usize) -> usize {
        q.ranking()[..j]
            .iter()
            .map(|&c| self.counts[c.0] as usize)
            .sum()
    }

    /// Adds one copy of `c`.
    pub fn with_added(&self, c: Candidate) -> Self {
        let mut counts = self.counts.clone();
        counts[c.0] += 1;
        Self { counts }
    }

    /// Set union with `{c}`: a no-op when `c` is already a member.
    pub fn union_with(&self, c: Candidate) -> Self {
        let mut counts = self.counts.clone();
        counts[c.0] = counts[c.0].max(1);
        Self { counts }
    }

    /// Removes one copy of `c`; `None` if `c` is absent or it was the only member.
    pub fn without_one(&self, c: Candidate) -> Option<Self> {
        if self.counts[c.0] == 0 {
            return None;
        }
        let mut counts = self.counts.clone();
        counts[c.0] -= 1;
        Self::from_counts(counts).ok()
    }

    /// Divides every multiplicity by their gcd. Scaled copies of a multiset
    /// induce the same uniform lottery and share one reduced form.
    pub fn reduced(&self) -> Self {
        let g = self.counts.iter().fold(0u32, |g, &c| g.gcd(&c));
        if g <= 1 {
            return self.clone();
        }
        Self {
            counts: self.counts.iter().map(|&c| c / g).collect(),
        }
    }
}

impl Ord for WinnerSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members()
            .cmp(other.members())
            .then_with(|| self.counts.len().cmp(&other.counts.len()))
    }
}

impl PartialOrd for WinnerSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact rational utility per candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityFunction {
    values: Vec<BigRational>,
}

impl UtilityFunction {
    pub fn new(values: Vec<BigRational>) -> Self {
        Self { values }
    }

    pub fn from_integers(values: &[i64]) -> Self {
        Self::new(
            values
                .iter()
                .map(|&v| BigRational::from_integer(BigInt::from(v)))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, c: Candidate) -> &BigRational {
        &self.values[c.0]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// `a` preferred to `b` under `q` iff `u(a) > u(b)`, for every pair.
    pub fn is_consistent_with(&self, q: &PreferenceOrder) -> bool {
        self.values.len() == q.len()
            && q.ranking()
                .windows(2)
                .all(|w| self.values[w[0].0] > self.values[w[1].0])
    }
}

impl fmt::Display for UtilityFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Uniform average of `u` over `w`, members counted with multiplicity.
pub fn expected_utility(u: &UtilityFunction, w: &WinnerSet) -> Result<BigRational> {
    if u.len() != w.roster_size() {
        return Err(Error::RosterMismatch {
            expected: w.roster_size(),
            found: u.len(),
        });
    }
    let size = w.size();
    if size == 0 {
        return Err(Error::EmptyWinnerSet);
    }
    let mut total = BigRational::zero();
    for (i, &n) in w.counts().iter().enumerate() {
        if n > 0 {
            total += &u.values[i] * BigRational::from_integer(BigInt::from(n));
        }
    }
    Ok(total / BigRational::from_integer(BigInt::from(size)))
}

/// `p / q` as an exact rational.
pub(crate) fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub(crate) fn one() -> BigRational {
    BigRational::one()
}
