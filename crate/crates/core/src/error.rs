use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("candidate roster is empty")]
    EmptyRoster,
    #[error("candidate label must be non-empty and free of `>`, `,`, `{{`, `}}` and `|`: `{0}`")]
    InvalidLabel(String),
    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),
    #[error("candidate `{0}` appears more than once")]
    DuplicateCandidate(String),
    #[error("candidate `{0}` is missing from the preference order")]
    MissingCandidate(String),
    #[error("ranking is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("prefix length {j} out of range 1..={m}")]
    PrefixOutOfRange { j: usize, m: usize },
    #[error("winner set is empty")]
    EmptyWinnerSet,
    #[error("malformed winner set `{0}`: expected comma-separated labels inside braces")]
    MalformedWinnerSet(String),
    #[error("expected a set but `{0}` repeats a candidate")]
    NotASet(String),
    #[error("size mismatch: expected {expected} candidates, found {found}")]
    RosterMismatch { expected: usize, found: usize },
    #[error("block count {k} out of range 1..={size}")]
    BlockCountOutOfRange { k: usize, size: usize },
    #[error("max multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("{0} is not in the universe")]
    OutsideUniverse(String),
    #[error("universe of {size} winner sets exceeds the limit of {limit}")]
    UniverseOverflow { size: u128, limit: u128 },
    #[error("strict cycle through {0}: an axiom instance is unsound")]
    SoundnessViolation(String),
    #[error("no ballots")]
    NoBallots,
    #[error("voter {voter} out of range (n = {n})")]
    VoterOutOfRange { voter: usize, n: usize },
    #[error("profile line {line}: {reason}")]
    MalformedProfile { line: usize, reason: String },
    #[error("replay failed at step {step}: {reason}")]
    ReplayFailed { step: usize, reason: String },
    #[error("no derivation found for a strictly dominating deviation of voter {voter}")]
    MissingDerivation { voter: usize },
    #[error("{what} = {value} exceeds the supported bound {bound}")]
    OutOfBounds {
        what: &'static str,
        value: usize,
        bound: usize,
    },
}
