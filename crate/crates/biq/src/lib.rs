//! Exact-arithmetic calculi for the automorphism group schemes of bielliptic
//! and quasi-bielliptic surfaces.
//!
//! The library computes, over small finite fields and finite test rings with
//! nilpotents, the three invariants attached to a quotient surface
//! `X = (E x C)/G`: the reduced centralizer quotients on the `E` and `C`
//! sides and the etale outer part `M`, and reproduces the classification
//! tables row by row.
//!
//! Modules:
//! - [`field`], [`symring`], [`testring`], [`series`]: exact arithmetic
//!   foundations (finite fields, truncated rewrite rings, test rings,
//!   truncated power series).
//! - [`grouprec`]: recognition of small finite groups from multiplication
//!   tables and structure labels for group schemes.
//! - [`cuspaut`]: the substitution-group calculus on the cuspidal cubic in
//!   characteristics 2 and 3, with centralizer/normalizer solvers.
//! - [`ellipt`]: elliptic curves, torsion, origin-fixing automorphisms,
//!   formal expansions, and the translation-lemma solvers.
//! - [`mgroup`]: the etale quotient `M` by matching conjugation actions.
//! - [`tables`]: the case registry and the table reproduction orchestrator.

pub mod cuspaut;
pub mod ellipt;
pub mod field;
pub mod grouprec;
pub mod mgroup;
pub mod ring;
pub mod series;
pub mod symring;
pub mod tables;
pub mod testring;

use thiserror::Error;

/// Crate-wide error type; variants name the failing precondition with context.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field F_{p}^{k} exceeds the desk-scale bound 2^20")]
    DegreeTooLarge { p: u64, k: usize },
    #[error("the zero polynomial has no well-defined roots")]
    ZeroPolynomial,
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("generator {gen} violates its attribute: {detail}")]
    AttributeViolation { gen: String, detail: String },
    #[error("series are not composable: {0}")]
    NonComposable(String),
    #[error("series is not invertible: {0}")]
    NonInvertible(String),
    #[error("operands live over different rings: {0}")]
    RingMismatch(String),
    #[error("family {0} requires a concrete lambda")]
    LambdaRequired(String),
    #[error("family {0} forbids lambda = 0")]
    LambdaForbidden(String),
    #[error("multiplication table is not closed: {0}")]
    NotClosed(String),
    #[error("multiplication table is not associative: {0}")]
    NotAssociative(String),
    #[error("multiplication table has no identity")]
    NoIdentity,
    #[error("element {0} has no inverse in the table")]
    NoInverse(String),
    #[error("group of order {order} with fingerprint {fingerprint} is not in the catalog")]
    NotInCatalog { order: usize, fingerprint: String },
    #[error("structure assignment disagrees with point counts: {0}")]
    StructureMismatch(String),
    #[error("symbolic verification failed: {0}")]
    SymbolicFailure(String),
    #[error("enumerative verification mismatch: {0}")]
    EnumMismatch(String),
    #[error("element is not in the normalizer: {0}")]
    NotInNormalizer(String),
    #[error("automorphism count mismatch (field too small?): {0}")]
    CountMismatch(String),
    #[error("search bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("centralizer is not a subgroup of the normalizer: {0}")]
    NotSubgroup(String),
    #[error("no matched pair covers a coset the table requires: {0}")]
    LiftingAssumptionViolated(String),
    #[error("registry schema error: {0}")]
    SchemaError(String),
    #[error("registry invariant violated in row {row}: {detail}")]
    InvariantViolation { row: String, detail: String },
    #[error("point-level crosscheck failed: {0}")]
    CrosscheckFailed(String),
    #[error("usage error: {0}")]
    Usage(String),
}
