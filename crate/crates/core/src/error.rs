use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// Matrix is not square or has fewer than two states.
    Shape(&'static str),
    /// Entry outside `[0, 1]` or not finite.
    InvalidEntry { row: usize, col: usize, value: f64 },
    /// A row does not sum to one.
    NonStochastic { row: usize, sum: f64 },
    /// The support digraph is not strongly connected.
    Reducible,
    BadPiHint(&'static str),
    /// The stationary solve produced a non-positive or inconsistent vector.
    Singular,
    GammaTooSmall(f64),
    GammaNotHeld { state: usize, holding: f64 },
    EmptySet,
    /// Operation needs a set other than the empty set and the full space.
    TrivialSet,
    DimensionMismatch { expected: usize, found: usize },
    StateOutOfRange(usize),
    BudgetExceeded { nodes: usize },
    BadT(f64),
    TooManyStates { n: usize, max: usize },
    KernelVanishes,
    NotLazy { holding: f64 },
    NotConcave,
    ZeroHolding,
    NotReversible,
    WpNotHalf,
    BadAlpha(f64),
    TooLarge(usize),
    NotBalanced { vertex: usize },
    NotConnected,
    BadArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Shape(msg) => write!(f, "bad matrix shape: {msg}"),
            Error::InvalidEntry { row, col, value } => {
                write!(f, "entry ({row}, {col}) = {value} is not a probability")
            }
            Error::NonStochastic { row, sum } => write!(f, "row {row} sums to {sum}, not 1"),
            Error::Reducible => f.write_str("chain is reducible (support is not strongly connected)"),
            Error::BadPiHint(msg) => write!(f, "stationary hint rejected: {msg}"),
            Error::Singular => f.write_str("stationary system is singular"),
            Error::GammaTooSmall(g) => write!(f, "holding probability {g} is below 1/2"),
            Error::GammaNotHeld { state, holding } => {
                write!(f, "state {state} holds with probability {holding}, below the declared minimum")
            }
            Error::EmptySet => f.write_str("set is empty"),
            Error::TrivialSet => f.write_str("set must be a proper nonempty subset"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected length {expected}, found {found}")
            }
            Error::StateOutOfRange(s) => write!(f, "state {s} is out of range"),
            Error::BudgetExceeded { nodes } => {
                write!(f, "tree expansion exceeded the node budget ({nodes} nodes)")
            }
            Error::BadT(t) => write!(f, "t = {t} is outside [0, 1]"),
            Error::TooManyStates { n, max } => {
                write!(f, "{n} states exceeds the enumeration limit of {max}")
            }
            Error::KernelVanishes => f.write_str("kernel vanishes at the set mass"),
            Error::NotLazy { holding } => write!(f, "chain is not lazy (min holding {holding})"),
            Error::NotConcave => f.write_str("kernel is not concave"),
            Error::ZeroHolding => f.write_str("minimum holding probability is zero; bounds are vacuous"),
            Error::NotReversible => f.write_str("chain is not reversible"),
            Error::WpNotHalf => f.write_str("some set has a crossing level interval excluding 1/2"),
            Error::BadAlpha(a) => write!(f, "alpha = {a} is outside [-1/(m-1), 1]"),
            Error::TooLarge(d) => write!(f, "parameter {d} is too large"),
            Error::NotBalanced { vertex } => write!(f, "vertex {vertex} has in-degree != out-degree"),
            Error::NotConnected => f.write_str("graph is not strongly connected"),
            Error::BadArgument(msg) => write!(f, "bad argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
