//! Successive shortest paths with node potentials on the layered network.
//!
//! Path costs are compared lexicographically as `(primary, secondary)` pairs.
//! The secondary component breaks ties between cost-optimal flows, e.g. by
//! utility, without perturbing the primary costs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::FlowError;
use crate::network::FlowNetwork;

/// Absolute tolerance for comparing path costs.
pub const COST_TOL: f64 = 1e-9;

/// Integral flow on a network, with its weight and utility under the
/// network's own arc data.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    arc_flow: Vec<u32>,
    value: u32,
    weight: f64,
    utility: f64,
}

impl FlowState {
    /// Wraps a flow vector, recomputing value, weight and utility.
    pub fn from_arc_flow(net: &FlowNetwork, arc_flow: Vec<u32>) -> Self {
        let value = net
            .out_arcs(net.source())
            .iter()
            .map(|&a| arc_flow[a])
            .sum();
        let mut weight = 0.0;
        let mut utility = 0.0;
        for (a, &f) in arc_flow.iter().enumerate() {
            if f > 0 {
                weight += f as f64 * net.arc(a).weight;
                utility += f as f64 * net.arc(a).utility;
            }
        }
        Self {
            arc_flow,
            value,
            weight,
            utility,
        }
    }

    pub fn zero(net: &FlowNetwork) -> Self {
        Self::from_arc_flow(net, vec![0; net.arc_count()])
    }

    pub fn arc_flow(&self) -> &[u32] {
        &self.arc_flow
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    /// `Σ flow · weight`, without the `f(0)` constants.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn utility(&self) -> f64 {
        self.utility
    }

    /// Flows are stored as integers, so this always holds; kept for callers
    /// that check the integrality property explicitly.
    pub fn is_integral(&self) -> bool {
        true
    }

    /// `Σ flow · costs`.
    pub fn cost_under(&self, costs: &[f64]) -> f64 {
        self.arc_flow
            .iter()
            .zip(costs)
            .filter(|(f, _)| **f > 0)
            .map(|(&f, &c)| f as f64 * c)
            .sum()
    }
}

/// Secondary objective used to choose among cost-optimal flows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tie {
    MinUtility,
    MaxUtility,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Lex(pub f64, pub f64);

impl Lex {
    pub(crate) const ZERO: Lex = Lex(0.0, 0.0);

    fn add(self, o: Lex) -> Lex {
        Lex(self.0 + o.0, self.1 + o.1)
    }

    fn sub(self, o: Lex) -> Lex {
        Lex(self.0 - o.0, self.1 - o.1)
    }

    /// Strictly smaller, beyond tolerance.
    pub(crate) fn lt_tol(self, o: Lex) -> bool {
        if self.0 < o.0 - COST_TOL {
            true
        } else if self.0 > o.0 + COST_TOL {
            false
        } else {
            self.1 < o.1 - COST_TOL
        }
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    key: Lex,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap
        other
            .key
            .0
            .total_cmp(&self.key.0)
            .then(other.key.1.total_cmp(&self.key.1))
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Forward arcs in topological order of their tails, or `NotAcyclic`.
fn topological_order(net: &FlowNetwork) -> Result<Vec<usize>, FlowError> {
    let nv = net.node_count();
    let mut indeg: Vec<usize> = (0..nv).map(|v| net.in_arcs(v).len()).collect();
    let mut order = Vec::with_capacity(nv);
    let mut stack: Vec<usize> = (0..nv).filter(|&v| indeg[v] == 0).collect();
    stack.reverse();
    while let Some(v) = stack.pop() {
        order.push(v);
        for &a in net.out_arcs(v) {
            let h = net.arc(a).head;
            indeg[h] -= 1;
            if indeg[h] == 0 {
                stack.push(h);
            }
        }
    }
    if order.len() == nv {
        Ok(order)
    } else {
        Err(FlowError::NotAcyclic)
    }
}

fn check_len(net: &FlowNetwork, costs: &[f64]) -> Result<(), FlowError> {
    if costs.len() == net.arc_count() {
        Ok(())
    } else {
        Err(FlowError::CostLength {
            expected: net.arc_count(),
            found: costs.len(),
        })
    }
}

/// Shortest-path distances from the source over forward arcs, in topological
/// order. Negative costs are fine; unreachable nodes get `+∞`.
pub fn shortest_path_potentials_init(
    net: &FlowNetwork,
    costs: &[f64],
) -> Result<Vec<f64>, FlowError> {
    check_len(net, costs)?;
    let order = topological_order(net)?;
    let mut dist = vec![f64::INFINITY; net.node_count()];
    dist[net.source()] = 0.0;
    for v in order {
        if dist[v].is_finite() {
            for &a in net.out_arcs(v) {
                let h = net.arc(a).head;
                dist[h] = dist[h].min(dist[v] + costs[a]);
            }
        }
    }
    Ok(dist)
}

/// SSP state over lexicographic arc costs.
pub(crate) struct Ssp<'a> {
    net: &'a FlowNetwork,
    c1: &'a [f64],
    c2: &'a [f64],
    flow: Vec<u32>,
    pot: Vec<Lex>,
    value: u32,
    dist: Vec<Option<Lex>>,
    pred: Vec<Option<(usize, bool)>>,
    scanned: Vec<bool>,
}

impl<'a> Ssp<'a> {
    pub(crate) fn new(
        net: &'a FlowNetwork,
        c1: &'a [f64],
        c2: &'a [f64],
    ) -> Result<Self, FlowError> {
        check_len(net, c1)?;
        check_len(net, c2)?;
        let order = topological_order(net)?;
        // distances from a virtual root joined to every node at cost zero, so
        // every node gets a finite potential
        let mut pot = vec![Lex::ZERO; net.node_count()];
        for v in order {
            for &a in net.out_arcs(v) {
                let h = net.arc(a).head;
                let cand = pot[v].add(Lex(c1[a], c2[a]));
                if cand.0 < pot[h].0 || (cand.0 == pot[h].0 && cand.1 < pot[h].1) {
                    pot[h] = cand;
                }
            }
        }
        let nv = net.node_count();
        Ok(Self {
            net,
            c1,
            c2,
            flow: vec![0; net.arc_count()],
            pot,
            value: 0,
            dist: vec![None; nv],
            pred: vec![None; nv],
            scanned: vec![false; nv],
        })
    }

    fn cost(&self, a: usize) -> Lex {
        Lex(self.c1[a], self.c2[a])
    }

    /// Dijkstra on reduced costs. Returns the actual lexicographic cost of a
    /// shortest residual s-t path, updating potentials; `None` when the sink
    /// is unreachable.
    fn shortest_path(&mut self) -> Option<Lex> {
        let net = self.net;
        let (s, t) = (net.source(), net.sink());
        self.dist.iter_mut().for_each(|d| *d = None);
        self.pred.iter_mut().for_each(|p| *p = None);
        self.scanned.iter_mut().for_each(|x| *x = false);
        let mut heap = BinaryHeap::new();
        self.dist[s] = Some(Lex::ZERO);
        heap.push(HeapEntry {
            key: Lex::ZERO,
            node: s,
        });
        while let Some(HeapEntry { key, node: u }) = heap.pop() {
            if self.dist[u] != Some(key) {
                continue;
            }
            self.scanned[u] = true;
            if u == t {
                break;
            }
            let pu = self.pot[u];
            for &a in net.out_arcs(u) {
                if self.flow[a] < net.arc(a).capacity {
                    let v = net.arc(a).head;
                    let nd = key.add(self.cost(a)).add(pu).sub(self.pot[v]);
                    self.relax(&mut heap, v, nd, (a, true));
                }
            }
            for &a in net.in_arcs(u) {
                if self.flow[a] > 0 {
                    let v = net.arc(a).tail;
                    let nd = key.sub(self.cost(a)).add(pu).sub(self.pot[v]);
                    self.relax(&mut heap, v, nd, (a, false));
                }
            }
        }
        let dt = self.dist[t]?;
        for v in 0..net.node_count() {
            let d = match self.dist[v] {
                Some(d) if self.scanned[v] => d,
                _ => dt,
            };
            self.pot[v] = self.pot[v].add(d);
        }
        // actual cost along the path
        let mut cost = Lex::ZERO;
        let mut v = t;
        while v != s {
            let (a, fwd) = self.pred[v].expect("path");
            if fwd {
                cost = cost.add(self.cost(a));
                v = net.arc(a).tail;
            } else {
                cost = cost.sub(self.cost(a));
                v = net.arc(a).head;
            }
        }
        Some(cost)
    }

    fn relax(&mut self, heap: &mut BinaryHeap<HeapEntry>, v: usize, nd: Lex, via: (usize, bool)) {
        let better = match self.dist[v] {
            None => true,
            Some(old) => nd.lt_tol(old),
        };
        if better {
            self.dist[v] = Some(nd);
            self.pred[v] = Some(via);
            self.scanned[v] = false;
            heap.push(HeapEntry { key: nd, node: v });
        }
    }

    /// Pushes one unit along the path found by the last `shortest_path`.
    fn augment(&mut self) {
        let net = self.net;
        let mut v = net.sink();
        while v != net.source() {
            let (a, fwd) = self.pred[v].expect("path");
            if fwd {
                self.flow[a] += 1;
                v = net.arc(a).tail;
            } else {
                self.flow[a] -= 1;
                v = net.arc(a).head;
            }
        }
        self.value += 1;
    }

    /// Augments `target` units. On failure reports the maximum value reached.
    pub(crate) fn run_to(
        &mut self,
        target: u32,
        mut on_path: impl FnMut(Lex),
    ) -> Result<(), FlowError> {
        while self.value < target {
            match self.shortest_path() {
                Some(c) => {
                    self.augment();
                    on_path(c);
                }
                None => {
                    return Err(FlowError::Infeasible {
                        requested: target,
                        max_value: self.value,
                    })
                }
            }
        }
        Ok(())
    }

    /// Augments while the shortest path has lexicographically negative cost.
    pub(crate) fn run_free(&mut self, mut on_path: impl FnMut(Lex)) {
        while let Some(c) = self.shortest_path() {
            if !c.lt_tol(Lex::ZERO) {
                break;
            }
            self.augment();
            on_path(c);
        }
    }

    /// Current arc flows.
    pub(crate) fn snapshot(&self) -> Vec<u32> {
        self.flow.clone()
    }

    /// Augments until no s-t path remains; returns the maximum flow value.
    pub(crate) fn run_max(&mut self) -> u32 {
        while self.shortest_path().is_some() {
            self.augment();
        }
        self.value
    }

    /// Smallest primary reduced cost over all residual arcs.
    pub(crate) fn min_reduced_cost(&self) -> f64 {
        let mut min = f64::INFINITY;
        for (a, arc) in self.net.arcs().iter().enumerate() {
            let rc = self.c1[a] + self.pot[arc.tail].0 - self.pot[arc.head].0;
            if self.flow[a] < arc.capacity {
                min = min.min(rc);
            }
            if self.flow[a] > 0 {
                min = min.min(-rc);
            }
        }
        min
    }

    pub(crate) fn finish(self) -> FlowState {
        debug_assert!(
            self.min_reduced_cost()
                >= -1e-6 * (1.0 + self.pot.iter().map(|p| p.0.abs()).fold(0.0, f64::max)),
            "negative reduced cost at termination"
        );
        FlowState::from_arc_flow(self.net, self.flow)
    }
}

/// Minimum-cost integral flow of exactly `target_value` units.
pub fn min_cost_flow_fixed(
    net: &FlowNetwork,
    costs: &[f64],
    target_value: u32,
) -> Result<FlowState, FlowError> {
    let zeros = vec![0.0; costs.len()];
    let mut ssp = Ssp::new(net, costs, &zeros)?;
    ssp.run_to(target_value, |_| {})?;
    Ok(ssp.finish())
}

/// Minimum-cost integral flow of any value. Among cost-optimal flows, returns
/// one of least (`MinUtility`) or greatest (`MaxUtility`) utility.
pub fn min_cost_flow_free(
    net: &FlowNetwork,
    costs: &[f64],
    tie: Tie,
) -> Result<FlowState, FlowError> {
    let secondary = tie_costs(net, tie);
    let mut ssp = Ssp::new(net, costs, &secondary)?;
    ssp.run_free(|_| {});
    Ok(ssp.finish())
}

/// Flow of `target` units followed by further augmentation while paths stay
/// negative. Also returns the cost of each augmenting path in order.
pub fn min_cost_flow_profile(
    net: &FlowNetwork,
    costs: &[f64],
    target: u32,
) -> Result<(FlowState, Vec<f64>), FlowError> {
    let zeros = vec![0.0; costs.len()];
    let mut ssp = Ssp::new(net, costs, &zeros)?;
    let mut path_costs = Vec::new();
    ssp.run_to(target, |c| path_costs.push(c.0))?;
    ssp.run_free(|c| path_costs.push(c.0));
    Ok((ssp.finish(), path_costs))
}

/// Secondary arc costs realizing a utility tie-break.
pub(crate) fn tie_costs(net: &FlowNetwork, tie: Tie) -> Vec<f64> {
    net.arcs()
        .iter()
        .map(|a| match tie {
            Tie::MaxUtility => -a.utility,
            Tie::MinUtility => a.utility,
        })
        .collect()
}

/// Bellman-Ford potentials on the residual graph of `flow` under `costs`.
///
/// With `with_return`, a return arc t→s of unbounded capacity and an arc s→t
/// with capacity equal to the flow value are added, both at cost zero, so
/// potentials certify optimality over all flow values. Returns `None` if a
/// negative cycle exists (beyond `tol`).
pub fn residual_potentials(
    net: &FlowNetwork,
    costs: &[f64],
    flow: &[u32],
    with_return: bool,
    tol: f64,
) -> Option<Vec<f64>> {
    let res = residual_arcs(net, costs, flow, with_return);
    let nv = net.node_count();
    let mut pot = vec![0.0; nv];
    for _ in 0..=nv {
        let mut changed = false;
        for &(u, v, c, _) in &res {
            if pot[u] + c < pot[v] - tol {
                pot[v] = pot[u] + c;
                changed = true;
            }
        }
        if !changed {
            return Some(pot);
        }
    }
    None
}

/// Residual arcs as `(from, to, cost, arc)`; `arc` is `None` for return arcs.
/// Backward residual arcs carry the negated cost.
pub(crate) fn residual_arcs(
    net: &FlowNetwork,
    costs: &[f64],
    flow: &[u32],
    with_return: bool,
) -> Vec<(usize, usize, f64, Option<(usize, bool)>)> {
    let mut res = Vec::with_capacity(2 * net.arc_count() + 2);
    for (a, arc) in net.arcs().iter().enumerate() {
        if flow[a] < arc.capacity {
            res.push((arc.tail, arc.head, costs[a], Some((a, true))));
        }
        if flow[a] > 0 {
            res.push((arc.head, arc.tail, -costs[a], Some((a, false))));
        }
    }
    if with_return {
        let value: u32 = net.out_arcs(net.source()).iter().map(|&a| flow[a]).sum();
        res.push((net.sink(), net.source(), 0.0, None));
        if value > 0 {
            res.push((net.source(), net.sink(), 0.0, None));
        }
    }
    res
}
