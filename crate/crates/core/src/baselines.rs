//! Greedy comparison heuristics.

use std::cmp::Ordering;

use crate::error::BaselineError;
use crate::instance::{Loads, Matching, ValidInstance};

const TOL: f64 = 1e-9;

/// How attractive an edge is to the ratio greedy. Larger is better.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Score {
    Ratio(f64),
    /// Zero marginal cost with positive utility.
    Free,
    /// Negative marginal cost; carries the cost and utility for ordering.
    Negative {
        cost: f64,
        utility: f64,
    },
}

impl Score {
    fn of(utility: f64, denom: f64) -> Self {
        if denom < -TOL {
            Score::Negative {
                cost: denom,
                utility,
            }
        } else if denom.abs() <= TOL {
            if utility > 0.0 {
                Score::Free
            } else {
                Score::Ratio(0.0)
            }
        } else {
            Score::Ratio(utility / denom)
        }
    }

    fn rank(self) -> u8 {
        match self {
            Score::Ratio(_) => 0,
            Score::Free => 1,
            Score::Negative { .. } => 2,
        }
    }

    /// Strictly better than `other`.
    fn beats(self, other: Score) -> bool {
        match self.rank().cmp(&other.rank()) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match (self, other) {
                (Score::Ratio(a), Score::Ratio(b)) => a > b,
                (Score::Free, Score::Free) => false,
                (
                    Score::Negative {
                        cost: c1,
                        utility: u1,
                    },
                    Score::Negative {
                        cost: c2,
                        utility: u2,
                    },
                ) => c1 < c2 - TOL || ((c1 - c2).abs() <= TOL && u1 > u2),
                _ => unreachable!(),
            },
        }
    }
}

/// Ratio greedy: repeatedly adds the edge of an unmatched item with the best
/// utility per marginal cost, counting every group that contains the item,
/// until utility reaches the floor. Ties go to the lowest item, then the
/// lowest platform.
pub fn greedy(inst: &ValidInstance) -> Result<Matching, BaselineError> {
    let ell = inst.ell();
    let mut matching = Matching::empty(inst.n());
    let mut loads = Loads::new(inst);
    let mut utility = 0.0;
    while utility < ell - TOL {
        let mut best: Option<(Score, usize)> = None;
        for i in 0..inst.n() {
            if matching.platform_of(i).is_some() {
                continue;
            }
            for &e in inst.item_edges(i) {
                let score = Score::of(inst.edge(e).utility, loads.add_cost(e));
                if best.map_or(true, |(b, _)| score.beats(b)) {
                    best = Some((score, e));
                }
            }
        }
        let Some((_, e)) = best else {
            return Err(BaselineError::Infeasible {
                ell,
                reached: utility,
            });
        };
        let edge = *inst.edge(e);
        loads.add(e);
        matching.assign(edge.item, edge.platform);
        utility += edge.utility;
    }
    Ok(matching)
}

/// Adds edges by decreasing utility, skipping matched items, until the floor
/// is met. Ties go to the lowest item, then the lowest platform.
pub fn naive_greedy(inst: &ValidInstance) -> Result<Matching, BaselineError> {
    let ell = inst.ell();
    let mut order: Vec<usize> = (0..inst.edges().len()).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (inst.edge(a), inst.edge(b));
        eb.utility
            .total_cmp(&ea.utility)
            .then(ea.item.cmp(&eb.item))
            .then(ea.platform.cmp(&eb.platform))
    });
    let mut matching = Matching::empty(inst.n());
    let mut utility = 0.0;
    for e in order {
        if utility >= ell - TOL {
            break;
        }
        let edge = inst.edge(e);
        if matching.platform_of(edge.item).is_none() {
            matching.assign(edge.item, edge.platform);
            utility += edge.utility;
        }
    }
    if utility >= ell - TOL {
        Ok(matching)
    } else {
        Err(BaselineError::Infeasible {
            ell,
            reached: utility,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{CostPreset, CostSpec};
    use crate::instance::{
        matching_utility, validate_instance, CostModel, DeclaredStructure, Edge, GroupFamily,
        Instance,
    };

    fn inst(
        edges: &[(usize, usize, f64)],
        n: usize,
        m: usize,
        ell: f64,
        costs: CostModel,
    ) -> ValidInstance {
        validate_instance(Instance {
            n,
            m,
            edges: edges.iter().map(|&e| Edge::from(e)).collect(),
            ell,
            groups: GroupFamily::new(DeclaredStructure::Auto, vec![(0..n).collect()]),
            costs,
        })
        .unwrap()
    }

    fn quad_zero_group() -> CostModel {
        CostModel::with_defaults(CostSpec::quadratic(), CostSpec::zero())
    }

    #[test]
    fn zero_floor_empty() {
        let i = inst(&[(0, 0, 5.0)], 1, 1, 0.0, quad_zero_group());
        assert!(greedy(&i).unwrap().is_empty());
        assert!(naive_greedy(&i).unwrap().is_empty());
    }

    #[test]
    fn greedy_prefers_higher_ratio() {
        let i = inst(&[(0, 0, 3.0), (1, 0, 5.0)], 2, 1, 4.0, quad_zero_group());
        let m = greedy(&i).unwrap();
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn greedy_ties_lowest_item() {
        let i = inst(
            &[(0, 0, 3.0), (1, 0, 3.0), (0, 1, 3.0)],
            2,
            2,
            3.0,
            quad_zero_group(),
        );
        assert_eq!(
            greedy(&i).unwrap().pairs().collect::<Vec<_>>(),
            vec![(0, 0)]
        );
    }

    #[test]
    fn naive_picks_by_utility() {
        let i = inst(
            &[(0, 0, 5.0), (1, 0, 4.0), (2, 0, 3.0)],
            3,
            1,
            7.0,
            quad_zero_group(),
        );
        let m = naive_greedy(&i).unwrap();
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(0, 0), (1, 0)]);
    }

    #[test]
    fn unreachable_floor_fails() {
        let i = inst(&[(0, 0, 1.0), (1, 0, 1.0)], 2, 1, 3.0, quad_zero_group());
        assert_eq!(
            greedy(&i).unwrap_err(),
            BaselineError::Infeasible {
                ell: 3.0,
                reached: 2.0
            }
        );
        assert!(naive_greedy(&i).is_err());
    }

    #[test]
    fn negative_marginals_come_first() {
        // platform 0 pays 1 per item, platform 1 rewards the first item
        let mut costs = CostModel::with_defaults(
            CostSpec::Preset(CostPreset::Linear { slope: 1.0 }),
            CostSpec::zero(),
        );
        costs.per_platform.push(crate::instance::PlatformCost {
            platform: 1,
            cost: CostSpec::Preset(CostPreset::NswLog { scale: 1.0 }),
        });
        let i = inst(&[(0, 0, 9.0), (1, 1, 1.0)], 2, 2, 1.0, costs);
        let m = greedy(&i).unwrap();
        assert_eq!(m.pairs().collect::<Vec<_>>(), vec![(1, 1)]);
        assert!(matching_utility(&i, &m) >= 1.0);
    }
}
