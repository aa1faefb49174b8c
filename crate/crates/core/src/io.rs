//! JSON reading and writing for instances and solutions.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{IoError, MatchingError};
use crate::instance::{validate_instance, Instance, Matching, ValidInstance};
use crate::network::{build, flow_to_matching};
use crate::solver::{Bracket, Diagnostics, Solution, Status};

fn read_text(path: &Path) -> Result<String, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if text.trim().is_empty() {
        return Err(IoError::Empty(format!("{} is empty", path.display())));
    }
    Ok(text)
}

/// Parses instance JSON. `context` names the source in error messages.
pub fn parse_instance(text: &str, context: &str) -> Result<Instance, IoError> {
    serde_json::from_str(text).map_err(|source| IoError::Parse {
        context: context.to_string(),
        source,
    })
}

/// Reads an instance file without validating it.
pub fn read_raw_instance(path: &Path) -> Result<Instance, IoError> {
    parse_instance(&read_text(path)?, &path.display().to_string())
}

pub fn read_instance(path: &Path) -> Result<ValidInstance, IoError> {
    Ok(validate_instance(read_raw_instance(path)?)?)
}

/// Pretty-printed JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| IoError::Parse {
        context: path.display().to_string(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<(), IoError> {
    write_json(path, inst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketRecord {
    pub mu: f64,
    pub lower: Vec<(usize, usize)>,
    pub upper: Vec<(usize, usize)>,
}

/// On-disk form of a [`Solution`]. NaN fields are written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub status: Status,
    pub matching: Vec<(usize, usize)>,
    pub cost: f64,
    pub utility: f64,
    pub lp_lower_bound: Option<f64>,
    #[serde(default)]
    pub gap: Option<f64>,
    pub additive_bound: f64,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub bracket: Option<BracketRecord>,
    #[serde(default)]
    pub iterations: usize,
    #[serde(default)]
    pub cycle_steps: usize,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl SolutionRecord {
    pub fn from_solution(inst: &ValidInstance, sol: &Solution) -> Result<Self, IoError> {
        let bracket = match &sol.bracket {
            Some(b) => {
                let net = build(inst)?;
                Some(BracketRecord {
                    mu: b.mu,
                    lower: flow_to_matching(&net, &b.lower)?.pairs().collect(),
                    upper: flow_to_matching(&net, &b.upper)?.pairs().collect(),
                })
            }
            None => None,
        };
        Ok(Self {
            status: sol.status,
            matching: sol.matching.pairs().collect(),
            cost: sol.cost,
            utility: sol.utility,
            lp_lower_bound: finite(sol.lp_lower_bound),
            gap: finite(sol.gap()),
            additive_bound: sol.additive_bound,
            lambda: finite(sol.lambda),
            bracket,
            iterations: sol.diagnostics.iterations,
            cycle_steps: sol.diagnostics.cycle_steps,
        })
    }

    /// Rebuilds the solution, turning bracket matchings back into flows.
    pub fn into_solution(self, inst: &ValidInstance) -> Result<Solution, IoError> {
        let matching = to_matching(inst, &self.matching)?;
        let bracket = match self.bracket {
            Some(b) => {
                let net = build(inst)?;
                let lower = to_matching(inst, &b.lower)?;
                let upper = to_matching(inst, &b.upper)?;
                Some(Bracket {
                    mu: b.mu,
                    lower: net.canonical_flow(inst, &lower)?,
                    upper: net.canonical_flow(inst, &upper)?,
                })
            }
            None => None,
        };
        Ok(Solution {
            status: self.status,
            matching,
            cost: self.cost,
            utility: self.utility,
            lp_lower_bound: self.lp_lower_bound.unwrap_or(f64::NAN),
            additive_bound: self.additive_bound,
            lambda: self.lambda.unwrap_or(f64::NAN),
            bracket,
            diagnostics: Diagnostics {
                iterations: self.iterations,
                probes: Vec::new(),
                cycle_steps: self.cycle_steps,
            },
        })
    }
}

/// Matching from `(item, platform)` pairs; every pair must be an edge and
/// every item appear at most once.
pub fn to_matching(inst: &ValidInstance, pairs: &[(usize, usize)]) -> Result<Matching, IoError> {
    let mut m = Matching::empty(inst.n());
    for &(item, platform) in pairs {
        if inst.edge_index(item, platform).is_none() {
            return Err(MatchingError::NotAnEdge { item, platform }.into());
        }
        if m.platform_of(item).is_some() {
            return Err(MatchingError::Duplicate { item }.into());
        }
        m.assign(item, platform);
    }
    Ok(m)
}

pub fn read_solution(path: &Path, inst: &ValidInstance) -> Result<Solution, IoError> {
    let text = read_text(path)?;
    let record: SolutionRecord = serde_json::from_str(&text).map_err(|source| IoError::Parse {
        context: path.display().to_string(),
        source,
    })?;
    record.into_solution(inst)
}

pub fn write_solution(path: &Path, inst: &ValidInstance, sol: &Solution) -> Result<(), IoError> {
    write_json(path, &SolutionRecord::from_solution(inst, sol)?)
}
