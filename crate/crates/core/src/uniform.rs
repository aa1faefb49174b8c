//! Exact solver for instances where every edge has the same utility `q`.

use crate::error::SolveError;
use crate::instance::{matching_cost, matching_utility, GroupStructure, ValidInstance};
use crate::mcmf::{FlowState, Ssp};
use crate::network::{build, flow_to_matching};
use crate::solver::{additive_bound, Bracket, Diagnostics, Solution, Status};

const TOL: f64 = 1e-9;

/// Min-cost flow of `⌈ℓ/q⌉` units, continued while further paths have
/// negative cost. Exact when `ℓ/q` is an integer.
pub fn solve_uniform(inst: &ValidInstance, q: f64) -> Result<Solution, SolveError> {
    if !(q.is_finite() && q > 0.0) {
        return Err(SolveError::BadQuantum(q));
    }
    if let Some(e) = inst
        .edges()
        .iter()
        .find(|e| (e.utility - q).abs() > TOL * q.max(1.0))
    {
        return Err(SolveError::NonUniform {
            q,
            item: e.item,
            platform: e.platform,
            utility: e.utility,
        });
    }
    if let GroupStructure::General = inst.structure() {
        return Err(SolveError::UnsupportedStructure("general".into()));
    }
    let net = build(inst)?;
    let w = net.weights();
    let zeros = vec![0.0; w.len()];
    let base = inst.base_cost();
    let ratio = inst.ell() / q;
    let target = (ratio - TOL).ceil().max(0.0);

    let mut ssp = Ssp::new(&net, &w, &zeros)?;
    let mut path_costs = Vec::new();
    let mut before_last = None;
    let mut reached = target <= inst.n() as f64;
    if reached && target >= 1.0 {
        let t = target as u32;
        reached = ssp.run_to(t - 1, |c| path_costs.push(c.0)).is_ok();
        if reached {
            before_last = Some(ssp.snapshot());
            reached = ssp.run_to(t, |c| path_costs.push(c.0)).is_ok();
        }
    }
    if !reached {
        ssp.run_max();
        let flow = ssp.finish();
        let matching = flow_to_matching(&net, &flow)?;
        return Ok(Solution {
            status: Status::Infeasible,
            cost: matching_cost(inst, &matching).expect("network edge"),
            utility: matching_utility(inst, &matching),
            matching,
            lp_lower_bound: f64::NAN,
            additive_bound: 0.0,
            lambda: f64::NAN,
            bracket: None,
            diagnostics: Diagnostics::default(),
        });
    }
    ssp.run_free(|c| path_costs.push(c.0));
    let flow = ssp.finish();

    // W(k): weight of the best k-unit flow
    let mut cumulative = vec![0.0];
    for c in &path_costs {
        cumulative.push(cumulative.last().unwrap() + c);
    }
    let t = target as usize;
    let mut lp = cumulative[t..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let fractional = t >= 1 && ratio < t as f64 - TOL;
    let mut mu = 0.0;
    if fractional {
        mu = t as f64 - ratio;
        lp = lp.min(mu * cumulative[t - 1] + (1.0 - mu) * cumulative[t]);
    }
    let matching = flow_to_matching(&net, &flow)?;
    let cost = matching_cost(inst, &matching).expect("network edge");
    let lp = lp + base;
    let exact = cost - lp <= TOL * (1.0 + cost.abs());
    let bracket = match (exact, before_last) {
        (false, Some(x0)) => Some(Bracket {
            mu,
            lower: FlowState::from_arc_flow(&net, x0),
            upper: flow,
        }),
        _ => None,
    };
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
        lambda: f64::NAN,
        bracket,
        diagnostics: Diagnostics::default(),
    })
}
