//! Rooted graph constructions realizing rational Turán exponents, exact
//! rooted-density verification, and clique-complex counting machinery.
//!
//! Everything density- or exponent-valued is an exact rational ([`Q`]);
//! floating point only ever appears in random-graph sampling and in
//! log-space predictions of copy counts.

pub mod complexes;
pub mod constructions;
pub mod counting;
pub mod density;
pub mod experiment;
pub mod graph;
pub mod iso;
pub mod planner;

pub use graph::{Graph, RootedGraph};

/// Exact rational used for all densities and exponents.
pub type Q = num_rational::Rational64;

/// Shorthand for `Q` construction.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(num, den)
}

/// Binomial coefficient `C(n,2)` as i64.
pub fn choose2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// Binomial coefficient `C(n,k)` as u64 (small arguments only).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Precondition of a construction/solver violated (CLI exit 4).
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    /// A size/enumeration cap was exceeded (CLI exit 3).
    #[error("cap exceeded: {what} is {got}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        got: u64,
        cap: u64,
    },
    /// Malformed input data (CLI exit 2).
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
