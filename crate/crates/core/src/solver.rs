//! Utility-constrained solver: LP optimum by Lagrangian parametric search over
//! min-cost flows, rounded to the higher-utility bracketing integral flow.

use serde::{Deserialize, Serialize};

use crate::error::{MatchingError, SolveError, VerifyError};
use crate::instance::{matching_cost, matching_utility, GroupStructure, Matching, ValidInstance};
use crate::mcmf::{residual_arcs, residual_potentials, FlowState, Ssp, Tie};
use crate::network::{build, flow_to_matching, FlowNetwork};

/// Iteration cap for the parametric search and the cycle walk.
pub const MAX_ITERATIONS: usize = 200;

const UTIL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    ExactIntegral,
    Rounded,
    Infeasible,
}

/// Adjacent integral optima at the final multiplier. The LP optimum is
/// `mu * lower + (1 - mu) * upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub mu: f64,
    pub lower: FlowState,
    pub upper: FlowState,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Parametric search iterations.
    pub iterations: usize,
    /// `(lambda, utility)` of each probe's max-utility optimum.
    pub probes: Vec<(f64, f64)>,
    /// Cycles pushed while walking from the lower to the upper bracket flow.
    pub cycle_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: Status,
    pub matching: Matching,
    /// Absolute cost, including every `f(0)`.
    pub cost: f64,
    pub utility: f64,
    /// LP optimum; NaN when infeasible.
    pub lp_lower_bound: f64,
    pub additive_bound: f64,
    pub lambda: f64,
    pub bracket: Option<Bracket>,
    pub diagnostics: Diagnostics,
}

impl Solution {
    /// `cost - lp_lower_bound`.
    pub fn gap(&self) -> f64 {
        self.cost - self.lp_lower_bound
    }
}

fn network_for(inst: &ValidInstance) -> Result<FlowNetwork, SolveError> {
    if let GroupStructure::General = inst.structure() {
        return Err(SolveError::UnsupportedStructure("general".into()));
    }
    Ok(build(inst)?)
}

fn free_flow(net: &FlowNetwork, c1: &[f64], c2: &[f64]) -> Result<FlowState, SolveError> {
    let mut ssp = Ssp::new(net, c1, c2)?;
    ssp.run_free(|_| {});
    Ok(ssp.finish())
}

fn matching_of(net: &FlowNetwork, flow: &FlowState) -> Result<Matching, SolveError> {
    Ok(flow_to_matching(net, flow)?)
}

fn cost_of(inst: &ValidInstance, m: &Matching) -> f64 {
    matching_cost(inst, m).expect("matching read off the network uses instance edges")
}

/// Minimum-cost matching with utility at least `ell`, rounded from the LP
/// optimum. Requires disjoint or laminar groups.
pub fn solve(inst: &ValidInstance) -> Result<Solution, SolveError> {
    let net = network_for(inst)?;
    let w = net.weights();
    let u = net.utilities();
    let neg_u: Vec<f64> = u.iter().map(|x| -x).collect();
    let ell = inst.ell();
    let base = inst.base_cost();
    let mut diag = Diagnostics::default();

    let x_max = free_flow(&net, &neg_u, &w)?;
    if x_max.utility() < ell - UTIL_TOL {
        let matching = matching_of(&net, &x_max)?;
        return Ok(Solution {
            status: Status::Infeasible,
            cost: cost_of(inst, &matching),
            utility: x_max.utility(),
            matching,
            lp_lower_bound: f64::NAN,
            additive_bound: 0.0,
            lambda: f64::NAN,
            bracket: None,
            diagnostics: diag,
        });
    }

    let max_tie: Vec<f64> = neg_u.clone();
    let mut lo = free_flow(&net, &w, &max_tie)?;
    diag.probes.push((0.0, lo.utility()));
    if lo.utility() >= ell - UTIL_TOL {
        let matching = matching_of(&net, &lo)?;
        let cost = cost_of(inst, &matching);
        return Ok(Solution {
            status: Status::ExactIntegral,
            utility: matching_utility(inst, &matching),
            matching,
            cost,
            lp_lower_bound: lo.weight() + base,
            additive_bound: 0.0,
            lambda: 0.0,
            bracket: None,
            diagnostics: diag,
        });
    }

    // Newton steps on the lower hull of (utility, weight) over integral flows:
    // each probe either finds a hull vertex below the current chord or proves
    // the chord is a hull edge.
    let mut hi = x_max;
    let lambda = loop {
        if diag.iterations >= MAX_ITERATIONS {
            return Err(SolveError::NonConvergence {
                iterations: diag.iterations,
                diagnostics: format!(
                    "bracket utilities {} .. {} around {ell}",
                    lo.utility(),
                    hi.utility()
                ),
            });
        }
        diag.iterations += 1;
        let lambda = (hi.weight() - lo.weight()) / (hi.utility() - lo.utility());
        let c: Vec<f64> = w.iter().zip(&u).map(|(w, u)| w - lambda * u).collect();
        let x = free_flow(&net, &c, &max_tie)?;
        diag.probes.push((lambda, x.utility()));
        let chord = lo.cost_under(&c);
        let scale = 1.0 + lo.weight().abs() + hi.weight().abs() + (lambda * hi.utility()).abs();
        if x.cost_under(&c) < chord - 1e-9 * scale {
            if x.utility() >= ell - UTIL_TOL {
                hi = x;
            } else {
                lo = x;
            }
        } else {
            break lambda;
        }
    };

    let c: Vec<f64> = w.iter().zip(&u).map(|(w, u)| w - lambda * u).collect();
    let (x0, x1) = cycle_walk(&net, &c, &lo, ell, &mut diag)?;
    let (u0, u1) = (x0.utility(), x1.utility());
    let mu = ((u1 - ell) / (u1 - u0)).clamp(0.0, 1.0);
    let lp = mu * x0.weight() + (1.0 - mu) * x1.weight() + base;
    let matching = matching_of(&net, &x1)?;
    let cost = cost_of(inst, &matching);
    let exact = (u1 - ell).abs() <= UTIL_TOL * (1.0 + ell.abs());
    Ok(Solution {
        status: if exact {
            Status::ExactIntegral
        } else {
            Status::Rounded
        },
        utility: matching_utility(inst, &matching),
        matching,
        cost,
        lp_lower_bound: if exact { cost } else { lp },
        additive_bound: if exact { 0.0 } else { additive_bound(inst) },
        lambda,
        bracket: Some(Bracket {
            mu: if exact { 0.0 } else { mu },
            lower: x0,
            upper: x1,
        }),
        diagnostics: diag,
    })
}

/// From an optimum `start` for costs `c`, pushes one utility-increasing
/// zero-reduced-cost cycle at a time until utility reaches `ell`. Returns the
/// flows before and after the last push.
fn cycle_walk(
    net: &FlowNetwork,
    c: &[f64],
    start: &FlowState,
    ell: f64,
    diag: &mut Diagnostics,
) -> Result<(FlowState, FlowState), SolveError> {
    let scale = 1.0 + c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let zero_tol = 1e-7 * scale;
    let mut current = start.clone();
    loop {
        if diag.cycle_steps >= MAX_ITERATIONS * 10 {
            return Err(SolveError::NonConvergence {
                iterations: diag.cycle_steps,
                diagnostics: format!("cycle walk stalled at utility {}", current.utility()),
            });
        }
        let pot = residual_potentials(net, c, current.arc_flow(), true, 1e-12 * scale).ok_or_else(
            || SolveError::NonConvergence {
                iterations: diag.iterations,
                diagnostics: "bracket flow is not optimal at the final multiplier".into(),
            },
        )?;
        let tight: Vec<_> = residual_arcs(net, c, current.arc_flow(), true)
            .into_iter()
            .filter(|&(from, to, cost, _)| (cost + pot[from] - pot[to]).abs() <= zero_tol)
            .collect();
        let cycle =
            positive_utility_cycle(net, &tight).ok_or_else(|| SolveError::NonConvergence {
                iterations: diag.iterations,
                diagnostics: format!(
                    "no utility-increasing optimal cycle from utility {} toward {ell}",
                    current.utility()
                ),
            })?;
        let mut flow = current.arc_flow().to_vec();
        for (a, fwd) in cycle.into_iter().flatten() {
            if fwd {
                flow[a] += 1;
            } else {
                flow[a] -= 1;
            }
        }
        let next = FlowState::from_arc_flow(net, flow);
        diag.cycle_steps += 1;
        if next.utility() >= ell - UTIL_TOL {
            return Ok((current, next));
        }
        current = next;
    }
}

/// A simple cycle of positive total utility among `arcs`, as its arc list
/// (`None` entries are return arcs).
fn positive_utility_cycle(
    net: &FlowNetwork,
    arcs: &[(usize, usize, f64, Option<(usize, bool)>)],
) -> Option<Vec<Option<(usize, bool)>>> {
    let nv = net.node_count();
    let len = |arc: &Option<(usize, bool)>| match *arc {
        Some((a, true)) => -net.arc(a).utility,
        Some((a, false)) => net.arc(a).utility,
        None => 0.0,
    };
    let mut dist = vec![0.0f64; nv];
    let mut pred: Vec<Option<usize>> = vec![None; nv];
    let mut last = None;
    for _ in 0..nv {
        last = None;
        for (idx, (from, to, _, arc)) in arcs.iter().enumerate() {
            let nd = dist[*from] + len(arc);
            if nd < dist[*to] - UTIL_TOL {
                dist[*to] = nd;
                pred[*to] = Some(idx);
                last = Some(*to);
            }
        }
        if last.is_none() {
            return None;
        }
    }
    let mut v = last?;
    for _ in 0..nv {
        v = arcs[pred[v]?].0;
    }
    let start = v;
    let mut cycle = Vec::new();
    loop {
        let idx = pred[v]?;
        cycle.push(arcs[idx].3);
        v = arcs[idx].0;
        if v == start {
            break;
        }
    }
    cycle.reverse();
    Some(cycle)
}

/// Worst-case cost increase of rounding, from extremal marginals.
///
/// `max_p [maxΔf_p + Σ_levels max_j maxΔf_p^j] - min_p [minΔf_p + min_j minΔf_p^j]`,
/// taken over every marginal index. With a single level this is the disjoint
/// bound. Negative level maxima are not summed (and negative minima are) so
/// the value stays an upper bound when marginals go below zero.
pub fn additive_bound(inst: &ValidInstance) -> f64 {
    let levels = inst.forest().map(|f| f.level.clone());
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for p in 0..inst.m() {
        if inst.platform_degree(p) == 0 {
            continue;
        }
        let table = inst.platform_table(p);
        let (pmax, pmin) = (
            table.max_marginal().unwrap_or(0.0),
            table.min_marginal().unwrap_or(0.0),
        );
        let mut level_max: Vec<Option<f64>> = Vec::new();
        let mut level_min: Vec<Option<f64>> = Vec::new();
        for (j, s) in inst.platform_groups(p) {
            let slot = &inst.slots()[s];
            let r = levels.as_ref().map_or(1, |l| l[j]);
            if level_max.len() < r {
                level_max.resize(r, None);
                level_min.resize(r, None);
            }
            let gmax = slot.table.max_marginal().unwrap_or(0.0);
            let gmin = slot.table.min_marginal().unwrap_or(0.0);
            level_max[r - 1] = Some(level_max[r - 1].map_or(gmax, |x: f64| x.max(gmax)));
            level_min[r - 1] = Some(level_min[r - 1].map_or(gmin, |x: f64| x.min(gmin)));
        }
        let maxes: Vec<f64> = level_max.into_iter().flatten().collect();
        let mins: Vec<f64> = level_min.into_iter().flatten().collect();
        if maxes.is_empty() {
            continue;
        }
        let best_single = maxes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let summed: f64 = maxes.iter().map(|x| x.max(0.0)).sum();
        let up = if best_single >= 0.0 {
            summed
        } else {
            best_single
        };
        let worst_single = mins.iter().copied().fold(f64::INFINITY, f64::min);
        let neg_sum: f64 = mins.iter().map(|x| x.min(0.0)).sum();
        let down = if worst_single <= 0.0 {
            neg_sum
        } else {
            worst_single
        };
        hi = hi.max(pmax + up);
        lo = lo.min(pmin + down);
    }
    if hi.is_finite() && lo.is_finite() {
        (hi - lo).max(0.0)
    } else {
        0.0
    }
}

/// Outcome of a successful [`verify_solution`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub cost: f64,
    pub utility: f64,
    pub lp_lower_bound: f64,
    pub gap: f64,
    pub additive_bound: f64,
    /// Whether a bracket was present and its flows differ on one cycle.
    pub single_cycle: Option<bool>,
}

/// Re-evaluates a solution from scratch and checks its certificates.
pub fn verify_solution(inst: &ValidInstance, sol: &Solution) -> Result<VerifyReport, VerifyError> {
    let mut bad = Vec::new();
    if sol.status == Status::Infeasible {
        return Err(VerifyError {
            violations: vec!["solution is marked infeasible".into()],
        });
    }
    let cost = match matching_cost(inst, &sol.matching) {
        Ok(c) => c,
        Err(e) => {
            return Err(VerifyError {
                violations: vec![format!("matching: {e}")],
            })
        }
    };
    let utility = matching_utility(inst, &sol.matching);
    let ell = inst.ell();
    let tol = |x: f64| 1e-6 * (1.0 + x.abs());
    if (cost - sol.cost).abs() > tol(cost) {
        bad.push(format!(
            "reported cost {} but matching costs {cost}",
            sol.cost
        ));
    }
    if (utility - sol.utility).abs() > tol(utility) {
        bad.push(format!(
            "reported utility {} but matching has {utility}",
            sol.utility
        ));
    }
    if utility < ell - tol(ell) {
        bad.push(format!("utility {utility} below floor {ell}"));
    }
    let lp = sol.lp_lower_bound;
    if !(lp <= cost + tol(cost)) {
        bad.push(format!("lp lower bound {lp} exceeds cost {cost}"));
    }
    if !(cost <= lp + sol.additive_bound + tol(cost)) {
        bad.push(format!(
            "cost {cost} exceeds lp lower bound {lp} + additive bound {}",
            sol.additive_bound
        ));
    }
    let mut single_cycle = None;
    if let Some(br) = &sol.bracket {
        match check_bracket(inst, br, ell, lp) {
            Ok(ok) => {
                if !ok {
                    bad.push("bracket flows do not differ on exactly one cycle".into());
                }
                single_cycle = Some(ok);
            }
            Err(msgs) => bad.extend(msgs),
        }
    }
    if bad.is_empty() {
        Ok(VerifyReport {
            cost,
            utility,
            lp_lower_bound: lp,
            gap: cost - lp,
            additive_bound: sol.additive_bound,
            single_cycle,
        })
    } else {
        Err(VerifyError { violations: bad })
    }
}

fn check_bracket(
    inst: &ValidInstance,
    br: &Bracket,
    ell: f64,
    lp: f64,
) -> Result<bool, Vec<String>> {
    let mut bad = Vec::new();
    let net = match build(inst) {
        Ok(n) => n,
        Err(e) => return Err(vec![format!("network: {e}")]),
    };
    let canon = |f: &FlowState| -> Result<FlowState, String> {
        let m = flow_to_matching(&net, f).map_err(|e| e.to_string())?;
        net.canonical_flow(inst, &m)
            .map_err(|e: MatchingError| e.to_string())
    };
    let (x0, x1) = match (canon(&br.lower), canon(&br.upper)) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            bad.extend(a.err());
            bad.extend(b.err());
            return Err(bad);
        }
    };
    let tol = |x: f64| 1e-6 * (1.0 + x.abs());
    let (u0, u1) = (x0.utility(), x1.utility());
    if !(u0 < ell && ell <= u1 + tol(ell)) {
        bad.push(format!(
            "bracket utilities {u0}, {u1} do not straddle {ell}"
        ));
    }
    if !(0.0..=1.0).contains(&br.mu) {
        bad.push(format!("mixing coefficient {} outside [0, 1]", br.mu));
    }
    let mix_u = br.mu * u0 + (1.0 - br.mu) * u1;
    if br.mu > 0.0 && (mix_u - ell).abs() > tol(ell) {
        bad.push(format!("mixed utility {mix_u} differs from floor {ell}"));
    }
    let mix_w = br.mu * x0.weight() + (1.0 - br.mu) * x1.weight() + inst.base_cost();
    if (mix_w - lp).abs() > tol(lp) {
        bad.push(format!(
            "mixed cost {mix_w} differs from lp lower bound {lp}"
        ));
    }
    if !(x0.weight() <= x1.weight() + tol(x1.weight())) {
        bad.push(format!(
            "lower bracket flow weight {} exceeds upper {}",
            x0.weight(),
            x1.weight()
        ));
    }
    if bad.is_empty() {
        Ok(differs_on_one_cycle(&net, &x0, &x1))
    } else {
        Err(bad)
    }
}

/// Whether the arcs where two flows differ, plus a t-s return link when their
/// values differ, form one cycle consistently oriented by the sign of the change.
pub fn differs_on_one_cycle(net: &FlowNetwork, a: &FlowState, b: &FlowState) -> bool {
    let nv = net.node_count();
    let mut links: Vec<(usize, usize)> = Vec::new();
    for (arc, (&fa, &fb)) in a.arc_flow().iter().zip(b.arc_flow()).enumerate() {
        if fa == fb {
            continue;
        }
        let (t, h) = (net.arc(arc).tail, net.arc(arc).head);
        links.push(if fb > fa { (t, h) } else { (h, t) });
    }
    match b.value().cmp(&a.value()) {
        std::cmp::Ordering::Greater => links.push((net.sink(), net.source())),
        std::cmp::Ordering::Less => links.push((net.source(), net.sink())),
        std::cmp::Ordering::Equal => {}
    }
    if links.is_empty() {
        return false;
    }
    let mut outdeg = vec![0usize; nv];
    let mut indeg = vec![0usize; nv];
    let mut next = vec![usize::MAX; nv];
    for &(t, h) in &links {
        outdeg[t] += 1;
        indeg[h] += 1;
        next[t] = h;
    }
    let touched: Vec<usize> = (0..nv).filter(|&v| outdeg[v] + indeg[v] > 0).collect();
    if touched.iter().any(|&v| outdeg[v] != 1 || indeg[v] != 1) {
        return false;
    }
    // follow successors from one node; a single cycle visits every touched node
    let start = touched[0];
    let mut v = next[start];
    let mut steps = 1;
    while v != start {
        v = next[v];
        steps += 1;
        if steps > touched.len() {
            return false;
        }
    }
    steps == touched.len()
}

/// Max-utility optimum of `w - lambda * u`, used to probe the parametric curve.
pub fn probe(inst: &ValidInstance, lambda: f64, tie: Tie) -> Result<FlowState, SolveError> {
    let net = network_for(inst)?;
    let c: Vec<f64> = net
        .arcs()
        .iter()
        .map(|a| a.weight - lambda * a.utility)
        .collect();
    let secondary = crate::mcmf::tie_costs(&net, tie);
    free_flow(&net, &c, &secondary)
}
