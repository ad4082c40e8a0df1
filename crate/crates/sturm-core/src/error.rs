use thiserror::Error;

/// Errors surfaced by the meander, invariant, and classification routines.
#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum Error {
    #[error("image is not a bijection of 1..={0}")]
    NotBijective(usize),

    #[error("permutation length {0} is even; meanders have an odd number of vertices")]
    EvenLength(usize),

    #[error("permutation is not dissipative: requires sigma(1)=1 and sigma(N)=N")]
    NotDissipative,

    #[error("meander is not Morse: negative Morse index i_{position} = {value}")]
    NotMorse { position: usize, value: i64 },

    #[error("nest sizes p={p}, q={q} violate the dissipativeness criterion: gcd(p-1, q+1) = {gcd} != 1")]
    NotCoprime { p: usize, q: usize, gcd: usize },

    #[error("nest size p={0} is too small; p >= 2 is required")]
    NestTooSmall(usize),

    #[error("meander walk failed at step {step}: {reason}")]
    WalkFailed { step: usize, reason: String },

    #[error("meander does not have the shape expected for nest insertion: {0}")]
    UnexpectedShape(String),

    #[error("lattice description requires rq > 1, got r={r}, q={q}")]
    TrivialLattice { r: usize, q: usize },

    #[error("{a} and {n} are not coprime")]
    NotCoprimeMod { a: u64, n: u64 },

    #[error("continued fraction {0} is not valid: {1}")]
    BadContinuedFraction(String, String),

    #[error("polynomial division left a nonzero remainder")]
    InexactDivision,

    #[error("cannot parse permutation from {0:?}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
