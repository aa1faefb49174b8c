use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("cost table is empty")]
    Empty,
    #[error("cost table value at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("cost table is not convex at index {index}: marginal {current} < previous marginal {previous}")]
    NotConvex {
        index: usize,
        previous: f64,
        current: f64,
    },
    #[error("cost table has {len} entries but {needed} are required")]
    TooShort { len: usize, needed: usize },
    #[error("invalid cost parameter: {0}")]
    BadParameter(String),
}

/// One problem found while validating an instance.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationIssue {
    #[error("instance has no items")]
    NoItems,
    #[error("edge #{index} ({item}, {platform}) is out of range")]
    EdgeOutOfRange {
        index: usize,
        item: usize,
        platform: usize,
    },
    #[error("edge ({item}, {platform}) is listed more than once")]
    DuplicateEdge { item: usize, platform: usize },
    #[error("edge ({item}, {platform}) has invalid utility {utility}")]
    BadUtility {
        item: usize,
        platform: usize,
        utility: f64,
    },
    #[error("utility floor {0} is negative or not finite")]
    BadFloor(f64),
    #[error("group {group} is empty")]
    EmptyGroup { group: usize },
    #[error("group {group} contains unknown item {item}")]
    GroupItemOutOfRange { group: usize, item: usize },
    #[error("item {item} belongs to no group")]
    UncoveredItem { item: usize },
    #[error("groups declared {declared} but classified {actual}")]
    StructureMismatch { declared: String, actual: String },
    #[error("cost override refers to platform {platform} / group {group:?} which does not exist")]
    UnknownCostTarget {
        platform: usize,
        group: Option<usize>,
    },
    #[error("cost for platform {platform}{}: {source}", group.map(|g| format!(", group {g}")).unwrap_or_default())]
    Cost {
        platform: usize,
        group: Option<usize>,
        source: CostError,
    },
}

/// Every issue found in one validation pass.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationError {
    pub issues: Vec<ValidationIssue>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation issue(s)", self.issues.len())?;
        for issue in &self.issues {
            write!(f, "\n  - {issue}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("network construction requires {expected} groups, found {found}")]
    WrongStructure {
        expected: &'static str,
        found: String,
    },
    #[error("flow vector has {found} entries, network has {expected} arcs")]
    LengthMismatch { expected: usize, found: usize },
    #[error("flow on arc {arc} exceeds its capacity")]
    CapacityViolated { arc: usize },
    #[error("flow conservation violated at node {node}")]
    ConservationViolated { node: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("requested flow value {requested} exceeds the maximum achievable {max_value}")]
    Infeasible { requested: u32, max_value: u32 },
    #[error("forward arcs contain a cycle")]
    NotAcyclic,
    #[error("cost vector has {found} entries, network has {expected} arcs")]
    CostLength { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("solver supports disjoint or laminar groups, found {0}")]
    UnsupportedStructure(String),
    #[error("parametric search did not converge after {iterations} iterations: {diagnostics}")]
    NonConvergence {
        iterations: usize,
        diagnostics: String,
    },
    #[error("all edge utilities must equal q = {q}; edge ({item}, {platform}) has {utility}")]
    NonUniform {
        q: f64,
        item: usize,
        platform: usize,
        utility: f64,
    },
    #[error("q must be positive and finite, got {0}")]
    BadQuantum(f64),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("utility floor {ell} unreachable: stopped at utility {reached}")]
    Infeasible { ell: f64, reached: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("enumeration needs {assignments} assignments, limit is {limit}")]
    TooLarge { assignments: u128, limit: u128 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{context}: line {line}: {message}")]
    Format {
        context: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("{0}")]
    Empty(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchingError {
    #[error("matching covers {found} items, instance has {expected}")]
    WrongSize { expected: usize, found: usize },
    #[error("({item}, {platform}) is not an edge of the instance")]
    NotAnEdge { item: usize, platform: usize },
    #[error("item {item} is matched more than once")]
    Duplicate { item: usize },
}

/// Failed checks from [`crate::solver::verify_solution`].
#[derive(Debug, Clone, PartialEq, Error)]
pub struct VerifyError {
    pub violations: Vec<String>,
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} check(s) failed", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}
