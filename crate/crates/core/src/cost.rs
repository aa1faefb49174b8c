//! Convex cost functions tabulated over integer counts.

use serde::{Deserialize, Serialize};

use crate::error::CostError;

/// Slack allowed when checking that marginals are nondecreasing.
const CONVEXITY_TOL: f64 = 1e-9;

/// Values `f(0), f(1), ..., f(cap)` of a convex function on the integers.
///
/// The table is the only representation the solvers see: arc weights in the
/// flow network are the marginals `f(k) - f(k-1)`, and matching costs are read
/// straight from `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexCostTable {
    values: Vec<f64>,
}

impl ConvexCostTable {
    /// Wraps a raw table after checking finiteness and convexity.
    pub fn new(values: Vec<f64>) -> Result<Self, CostError> {
        if values.is_empty() {
            return Err(CostError::Empty);
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(CostError::NonFinite { index: k });
        }
        for k in 2..values.len() {
            let prev = values[k - 1] - values[k - 2];
            let cur = values[k] - values[k - 1];
            if cur < prev - CONVEXITY_TOL * (1.0 + prev.abs().max(cur.abs())) {
                return Err(CostError::NotConvex {
                    index: k,
                    previous: prev,
                    current: cur,
                });
            }
        }
        Ok(Self { values })
    }

    /// Largest count the table covers.
    pub fn cap(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `f(k)`.
    ///
    /// # Panics
    /// If `k > cap`.
    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// `f(k) - f(k-1)` for `1 <= k <= cap`.
    pub fn marginal(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        self.values[k] - self.values[k - 1]
    }

    /// All marginals `Δf(1..=cap)`, nondecreasing.
    pub fn marginals(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// Largest marginal, or `None` when `cap == 0`.
    pub fn max_marginal(&self) -> Option<f64> {
        (self.cap() >= 1).then(|| self.marginal(self.cap()))
    }

    /// Smallest marginal, or `None` when `cap == 0`.
    pub fn min_marginal(&self) -> Option<f64> {
        (self.cap() >= 1).then(|| self.marginal(1))
    }
}

/// A named cost function family, instantiated at a given cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", content = "params", rename_all = "snake_case")]
pub enum CostPreset {
    /// `f(k) = k^2`.
    Quadratic,
    /// `f(k) = -ln(k + 1) / scale`.
    NswLog { scale: f64 },
    /// `f(k) = 0` for `k <= threshold`, `slope * k` above it.
    ///
    /// Only convex while `cap <= threshold + 1` (or `slope == 0`); larger caps
    /// are rejected by [`cost_preset`].
    Piecewise { threshold: usize, slope: f64 },
    /// `f(k) = slope * max(0, k - threshold)`, the convex hinge.
    Hinge { threshold: usize, slope: f64 },
    /// `f(k) = slope * k`.
    Linear { slope: f64 },
}

impl CostPreset {
    /// Raw function value at `k`, without any convexity check.
    pub fn evaluate(&self, k: usize) -> f64 {
        let x = k as f64;
        match *self {
            CostPreset::Quadratic => x * x,
            CostPreset::NswLog { scale } => -(x + 1.0).ln() / scale,
            CostPreset::Piecewise { threshold, slope } => {
                if k <= threshold {
                    0.0
                } else {
                    slope * x
                }
            }
            CostPreset::Hinge { threshold, slope } => slope * k.saturating_sub(threshold) as f64,
            CostPreset::Linear { slope } => slope * x,
        }
    }

    fn check_params(&self) -> Result<(), CostError> {
        match *self {
            CostPreset::NswLog { scale } if !(scale > 0.0 && scale.is_finite()) => Err(
                CostError::BadParameter(format!("nsw_log scale must be positive, got {scale}")),
            ),
            CostPreset::Piecewise { slope, .. }
            | CostPreset::Hinge { slope, .. }
            | CostPreset::Linear { slope }
                if !slope.is_finite() =>
            {
                Err(CostError::BadParameter(format!(
                    "slope must be finite, got {slope}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Either a preset or an explicit table; the unit stored in instance files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CostSpec {
    Table { table: Vec<f64> },
    Preset(CostPreset),
}

impl CostSpec {
    pub fn quadratic() -> Self {
        CostSpec::Preset(CostPreset::Quadratic)
    }

    pub fn zero() -> Self {
        CostSpec::Preset(CostPreset::Linear { slope: 0.0 })
    }

    /// Materializes the function at `0..=cap`.
    ///
    /// Explicit tables must cover at least `cap`; longer tables are truncated.
    pub fn tabulate(&self, cap: usize) -> Result<ConvexCostTable, CostError> {
        match self {
            CostSpec::Preset(p) => cost_preset(p, cap),
            CostSpec::Table { table } => {
                if table.len() < cap + 1 {
                    return Err(CostError::TooShort {
                        len: table.len(),
                        needed: cap + 1,
                    });
                }
                ConvexCostTable::new(table[..=cap].to_vec())
            }
        }
    }
}

/// Tabulates `preset` on `0..=cap` and validates convexity.
pub fn cost_preset(preset: &CostPreset, cap: usize) -> Result<ConvexCostTable, CostError> {
    preset.check_params()?;
    ConvexCostTable::new((0..=cap).map(|k| preset.evaluate(k)).collect())
}
