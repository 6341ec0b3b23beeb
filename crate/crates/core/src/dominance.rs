//! Three non-axiomatic ways of comparing uniform lotteries over winner sets:
//! prefix-wise stochastic dominance, dominance under every consistent utility,
//! and the combinatorial match-dominance test.
//!
//! The three are implemented along separate code paths (integer prefix
//! counts, exact expected utilities, sorted block matching) so that they can
//! serve as oracles for one another.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::preferences::{
    expected_utility, one, ratio, Candidate, PreferenceOrder, UtilityFunction, WinnerSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VerdictKind {
    /// X places at least as much mass on every prefix, strictly more on one.
    StrictlyDominates,
    /// Identical lotteries.
    Equivalent,
    /// Each side is strictly ahead on some prefix.
    Incomparable,
    /// Y strictly dominates X.
    Dominated,
}

impl VerdictKind {
    pub fn tag(self) -> &'static str {
        match self {
            VerdictKind::StrictlyDominates => "STRICT",
            VerdictKind::Equivalent => "EQUIVALENT",
            VerdictKind::Incomparable => "INCOMPARABLE",
            VerdictKind::Dominated => "DOMINATED",
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Outcome of comparing X against Y, with separating prefixes as witnesses.
///
/// `x_ahead` is the shortest prefix length `j` on which X puts strictly more
/// mass than Y; `y_ahead` likewise for Y.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominanceVerdict {
    pub kind: VerdictKind,
    pub x_ahead: Option<usize>,
    pub y_ahead: Option<usize>,
}

impl DominanceVerdict {
    pub fn is_strict(&self) -> bool {
        self.kind == VerdictKind::StrictlyDominates
    }
}

fn check_roster(q: &PreferenceOrder, w: &WinnerSet) -> Result<()> {
    if w.roster_size() != q.len() {
        return Err(Error::RosterMismatch {
            expected: q.len(),
            found: w.roster_size(),
        });
    }
    Ok(())
}

/// `Pr(w in top-j)` for `j = 1..=m`, as exact rationals.
pub fn prefix_probabilities(q: &PreferenceOrder, w: &WinnerSet) -> Result<Vec<BigRational>> {
    check_roster(q, w)?;
    let size = w.size() as i64;
    Ok((1..=q.len())
        .map(|j| ratio(w.count_in_prefix(q, j) as i64, size))
        .collect())
}

pub fn stochastic_dominance(
    q: &PreferenceOrder,
    x: &WinnerSet,
    y: &WinnerSet,
) -> Result<DominanceVerdict> {
    check_roster(q, x)?;
    check_roster(q, y)?;
    let (kx, ky) = (x.size() as u64, y.size() as u64);
    let (mut in_x, mut in_y) = (0u64, 0u64);
    let (mut x_ahead, mut y_ahead) = (None, None);
    for (j, &c) in q.ranking().iter().enumerate() {
        in_x += x.count(c) as u64;
        in_y += y.count(c) as u64;
        // in_x / kx versus in_y / ky
        let (lhs, rhs) = (in_x * ky, in_y * kx);
        if lhs > rhs && x_ahead.is_none() {
            x_ahead = Some(j + 1);
        } else if rhs > lhs && y_ahead.is_none() {
            y_ahead = Some(j + 1);
        }
    }
    let kind = match (x_ahead, y_ahead) {
        (None, None) => VerdictKind::Equivalent,
        (Some(_), None) => VerdictKind::StrictlyDominates,
        (None, Some(_)) => VerdictKind::Dominated,
        (Some(_), Some(_)) => VerdictKind::Incomparable,
    };
    Ok(DominanceVerdict {
        kind,
        x_ahead,
        y_ahead,
    })
}

/// Partition of a sorted multiset into `k` contiguous blocks with cut points
/// `r_j = ceil(j * K / k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchPartition {
    /// `r_0 = 0, r_1, ..., r_k = K`.
    pub cuts: Vec<usize>,
    /// Blocks `Y_1..Y_k`, each listed least preferred first.
    pub blocks: Vec<Vec<Candidate>>,
}

pub fn match_partition(q: &PreferenceOrder, y: &WinnerSet, k: usize) -> Result<MatchPartition> {
    check_roster(q, y)?;
    let size = y.size();
    if k == 0 || k > size {
        return Err(Error::BlockCountOutOfRange { k, size });
    }
    let sorted = y.ascending(q);
    let cuts: Vec<usize> = (0..=k).map(|j| (j * size).div_ceil(k)).collect();
    let blocks = cuts
        .windows(2)
        .map(|w| sorted[w[0]..w[1]].to_vec())
        .collect();
    Ok(MatchPartition { cuts, blocks })
}

/// Why X fails to match-dominate Y (in the orientation actually tested).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MatchFailure {
    /// `x_block` is strictly worse than `y`, a member of block `block` (1-based).
    Violation {
        block: usize,
        x_block: Candidate,
        y: Candidate,
    },
    /// Every relation is an equality and all blocks have equal size.
    NoStrictRelation,
}

struct MatchCheck {
    /// The order the test ran under: `q`, or its reverse with the sides swapped.
    order: PreferenceOrder,
    reversed: bool,
    failure: Option<MatchFailure>,
}

fn check_match(q: &PreferenceOrder, x: &WinnerSet, y: &WinnerSet) -> Result<MatchCheck> {
    check_roster(q, x)?;
    check_roster(q, y)?;
    // Scaled copies induce the same lottery; comparing reduced forms keeps the
    // size-divisibility clause meaningful for multisets.
    let (x, y) = (x.reduced(), y.reduced());
    if x.size() > y.size() {
        let rev = q.reverse();
        let failure = small_side_failure(&rev, &y, &x)?;
        return Ok(MatchCheck {
            order: rev,
            reversed: true,
            failure,
        });
    }
    let failure = small_side_failure(q, &x, &y)?;
    Ok(MatchCheck {
        order: q.clone(),
        reversed: false,
        failure,
    })
}

/// The core test for `|small| <= |large|`.
fn small_side_failure(
    q: &PreferenceOrder,
    small: &WinnerSet,
    large: &WinnerSet,
) -> Result<Option<MatchFailure>> {
    let k = small.size();
    let xs = small.ascending(q);
    let partition = match_partition(q, large, k)?;
    let mut any_strict = false;
    for (j, (&xj, block)) in xs.iter().zip(&partition.blocks).enumerate() {
        for &y in block {
            if q.prefers(y, xj) {
                return Ok(Some(MatchFailure::Violation {
                    block: j + 1,
                    x_block: xj,
                    y,
                }));
            }
            any_strict |= q.prefers(xj, y);
        }
    }
    if any_strict || !large.size().is_multiple_of(k) {
        Ok(None)
    } else {
        Ok(Some(MatchFailure::NoStrictRelation))
    }
}

/// Match-dominance of X over Y under `q`. When `|X| > |Y|` this is Y
/// match-dominating X under the reverse of `q`.
pub fn match_dominance(q: &PreferenceOrder, x: &WinnerSet, y: &WinnerSet) -> Result<bool> {
    Ok(check_match(q, x, y)?.failure.is_none())
}

/// Perturbation size for the indicator utilities. Nonzero prefix gaps are
/// multiples of `1/(|X||Y|)` and the perturbation moves a gap by at most
/// `(m-1) * eps`, which this keeps below half the smallest gap.
fn perturbation(m: usize, x: &WinnerSet, y: &WinnerSet) -> BigRational {
    ratio(1, 2 * (m * x.size() * y.size()) as i64)
}

/// Utility `1` on the top `j` candidates, `0` elsewhere, plus `eps` per rank
/// step so that it is strictly consistent with `q`.
pub fn indicator_utility(q: &PreferenceOrder, j: usize, eps: &BigRational) -> UtilityFunction {
    let m = q.len();
    let mut values = vec![BigRational::from_integer(BigInt::from(0)); m];
    for (pos, &c) in q.ranking().iter().enumerate() {
        let base = if pos < j {
            one()
        } else {
            BigRational::from_integer(BigInt::from(0))
        };
        values[c.0] = base + eps * BigRational::from_integer(BigInt::from((m - 1 - pos) as i64));
    }
    UtilityFunction::new(values)
}

/// Whether `u(X) > u(Y)` for every utility consistent with `q`.
///
/// Every consistent utility is a constant plus a positive combination of
/// top-`j` indicators, so it suffices to test the perturbed indicators.
pub fn utility_dominates_all(q: &PreferenceOrder, x: &WinnerSet, y: &WinnerSet) -> Result<bool> {
    check_roster(q, x)?;
    check_roster(q, y)?;
    let eps = perturbation(q.len(), x, y);
    for j in 1..=q.len() {
        let u = indicator_utility(q, j, &eps);
        if expected_utility(&u, x)? <= expected_utility(&u, y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A utility consistent with `q` under which X is no better than Y, or `None`
/// when X match-dominates Y.
pub fn falsifying_utility(
    q: &PreferenceOrder,
    x: &WinnerSet,
    y: &WinnerSet,
) -> Result<Option<UtilityFunction>> {
    let check = check_match(q, x, y)?;
    let m = q.len();
    let Some(failure) = check.failure else {
        return Ok(None);
    };
    let eps = perturbation(m, x, y);
    let u = match failure {
        MatchFailure::Violation { y: y_prime, .. } => {
            // Top set reaching down to the offending element of the larger side.
            let j = check.order.position(y_prime) + 1;
            let u = indicator_utility(&check.order, j, &eps);
            if check.reversed {
                let shift = one() + &eps * BigRational::from_integer(BigInt::from(m as i64));
                UtilityFunction::new(u.values().iter().map(|v| &shift - v).collect())
            } else {
                u
            }
        }
        MatchFailure::NoStrictRelation => {
            let values = (0..m)
                .map(|c| {
                    BigRational::from_integer(BigInt::from(
                        (m - 1 - q.position(Candidate(c))) as i64,
                    ))
                })
                .collect();
            UtilityFunction::new(values)
        }
    };
    Ok(Some(u))
}
