//! Layered flow networks for disjoint and laminar group families.
//!
//! Layers, in order: source, items, platform copies per group (one level per
//! height in the laminar forest), `p(l1)`, `p(l2)`, sink.

use std::fmt;
use std::io::{self, Write};

use crate::error::NetworkError;
use crate::instance::{GroupStructure, LaminarForest, Matching, ValidInstance};
use crate::mcmf::FlowState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Source,
    Item(usize),
    /// Copy `p^j` of platform `p` for group `j`, placed at `level` of the group layer.
    GroupCopy {
        platform: usize,
        group: usize,
        level: usize,
    },
    PlatformL1(usize),
    PlatformL2(usize),
    Sink,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NodeKind::Source => write!(f, "s"),
            NodeKind::Item(i) => write!(f, "i{i}"),
            NodeKind::GroupCopy {
                platform,
                group,
                level,
            } => write!(f, "p{platform}^g{group}@{level}"),
            NodeKind::PlatformL1(p) => write!(f, "p{p}(l1)"),
            NodeKind::PlatformL2(p) => write!(f, "p{p}(l2)"),
            NodeKind::Sink => write!(f, "t"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcKind {
    SourceEdge,
    ItemEdge,
    SubsetEdge,
    L1,
    L2,
    SinkEdge,
}

impl ArcKind {
    pub fn name(self) -> &'static str {
        match self {
            ArcKind::SourceEdge => "source_edge",
            ArcKind::ItemEdge => "item_edge",
            ArcKind::SubsetEdge => "subset_edge",
            ArcKind::L1 => "L1",
            ArcKind::L2 => "L2",
            ArcKind::SinkEdge => "sink_edge",
        }
    }

    /// Whether arcs of this kind may carry a marginal cost.
    pub fn bears_weight(self) -> bool {
        matches!(self, ArcKind::SubsetEdge | ArcKind::L1 | ArcKind::L2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub capacity: u32,
    pub weight: f64,
    pub utility: f64,
    /// Copy index within a parallel bundle (1-based); 0 for single arcs.
    pub k: usize,
    pub kind: ArcKind,
}

/// Parallel copies sharing tail and head, ordered by `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub tail: usize,
    pub head: usize,
    pub arcs: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    nodes: Vec<NodeKind>,
    arcs: Vec<Arc>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
    source: usize,
    sink: usize,
    item_nodes: Vec<usize>,
    origin: Vec<Option<usize>>,
    edge_arc: Vec<usize>,
    source_arc: Vec<usize>,
    bundles: Vec<Bundle>,
    arc_bundle: Vec<Option<usize>>,
    /// Bundle leaving each group copy or `p(l1)` node.
    out_bundle: Vec<Option<usize>>,
    sink_arc: Vec<usize>,
    depth: usize,
    laminar: bool,
}

struct Builder {
    nodes: Vec<NodeKind>,
    arcs: Vec<Arc>,
    origin: Vec<Option<usize>>,
    bundles: Vec<Bundle>,
    arc_bundle: Vec<Option<usize>>,
}

impl Builder {
    fn node(&mut self, kind: NodeKind) -> usize {
        self.nodes.push(kind);
        self.nodes.len() - 1
    }

    fn arc(&mut self, arc: Arc, origin: Option<usize>) -> usize {
        self.arcs.push(arc);
        self.origin.push(origin);
        self.arc_bundle.push(None);
        self.arcs.len() - 1
    }

    fn bundle(&mut self, tail: usize, head: usize, kind: ArcKind, marginals: &[f64]) -> usize {
        let b = self.bundles.len();
        let mut arcs = Vec::with_capacity(marginals.len());
        for (idx, &w) in marginals.iter().enumerate() {
            let a = self.arc(
                Arc {
                    tail,
                    head,
                    capacity: 1,
                    weight: w,
                    utility: 0.0,
                    k: idx + 1,
                    kind,
                },
                None,
            );
            self.arc_bundle[a] = Some(b);
            arcs.push(a);
        }
        self.bundles.push(Bundle { tail, head, arcs });
        b
    }
}

impl FlowNetwork {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn nodes(&self) -> &[NodeKind] {
        &self.nodes
    }

    pub fn node(&self, v: usize) -> NodeKind {
        self.nodes[v]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: usize) -> &Arc {
        &self.arcs[a]
    }

    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out_arcs[v]
    }

    pub fn in_arcs(&self, v: usize) -> &[usize] {
        &self.in_arcs[v]
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn item_node(&self, item: usize) -> usize {
        self.item_nodes[item]
    }

    /// Instance edge behind an item arc.
    pub fn origin(&self, arc: usize) -> Option<usize> {
        self.origin[arc]
    }

    /// Item arc for an instance edge.
    pub fn edge_arc(&self, edge: usize) -> usize {
        self.edge_arc[edge]
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn arc_bundle(&self, arc: usize) -> Option<usize> {
        self.arc_bundle[arc]
    }

    pub fn sink_arc(&self, platform: usize) -> usize {
        self.sink_arc[platform]
    }

    /// Number of group levels.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_laminar(&self) -> bool {
        self.laminar
    }

    /// Arc weights, in arc order.
    pub fn weights(&self) -> Vec<f64> {
        self.arcs.iter().map(|a| a.weight).collect()
    }

    /// Arc utilities, in arc order.
    pub fn utilities(&self) -> Vec<f64> {
        self.arcs.iter().map(|a| a.utility).collect()
    }

    /// One text line per arc: `tail head capacity weight utility kind k`,
    /// preceded by `# node <id> <label>` lines. Arcs appear in construction order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (v, kind) in self.nodes.iter().enumerate() {
            writeln!(out, "# node {v} {kind}")?;
        }
        for a in &self.arcs {
            writeln!(
                out,
                "{} {} {} {} {} {} {}",
                a.tail,
                a.head,
                a.capacity,
                a.weight,
                a.utility,
                a.kind.name(),
                a.k
            )?;
        }
        Ok(())
    }

    /// Checks capacities and conservation of a flow vector.
    pub fn check_flow(&self, flow: &[u32]) -> Result<(), NetworkError> {
        if flow.len() != self.arcs.len() {
            return Err(NetworkError::LengthMismatch {
                expected: self.arcs.len(),
                found: flow.len(),
            });
        }
        if let Some(arc) = (0..flow.len()).find(|&a| flow[a] > self.arcs[a].capacity) {
            return Err(NetworkError::CapacityViolated { arc });
        }
        for v in 0..self.nodes.len() {
            if v == self.source || v == self.sink {
                continue;
            }
            let inflow: u64 = self.in_arcs[v].iter().map(|&a| u64::from(flow[a])).sum();
            let outflow: u64 = self.out_arcs[v].iter().map(|&a| u64::from(flow[a])).sum();
            if inflow != outflow {
                return Err(NetworkError::ConservationViolated { node: v });
            }
        }
        Ok(())
    }

    /// Moves the flow of each parallel bundle onto copies `1..=k`.
    pub fn normalize_prefix(&self, flow: &mut [u32]) {
        for b in &self.bundles {
            let total: u32 = b.arcs.iter().map(|&a| flow[a]).sum();
            for (idx, &a) in b.arcs.iter().enumerate() {
                flow[a] = u32::from((idx as u32) < total);
            }
        }
    }

    /// The prefix-form flow corresponding to a matching.
    pub fn canonical_flow(
        &self,
        inst: &ValidInstance,
        matching: &Matching,
    ) -> Result<FlowState, crate::error::MatchingError> {
        let mut flow = vec![0u32; self.arcs.len()];
        let mut used = vec![0usize; self.bundles.len()];
        for e in matching.edge_indices(inst)? {
            let item_arc = self.edge_arc[e];
            flow[self.source_arc[inst.edge(e).item]] += 1;
            flow[item_arc] += 1;
            let mut v = self.arcs[item_arc].head;
            while let Some(b) = self.out_bundle[v] {
                let a = self.bundles[b].arcs[used[b]];
                used[b] += 1;
                flow[a] += 1;
                v = self.arcs[a].head;
            }
            if let NodeKind::PlatformL2(p) = self.nodes[v] {
                flow[self.sink_arc[p]] += 1;
            }
        }
        Ok(FlowState::from_arc_flow(self, flow))
    }
}

/// Network for pairwise disjoint groups.
pub fn build_disjoint(inst: &ValidInstance) -> Result<FlowNetwork, NetworkError> {
    match inst.structure() {
        GroupStructure::Disjoint => {
            Ok(build_from_forest(inst, inst.forest().expect("flat"), false))
        }
        other => Err(NetworkError::WrongStructure {
            expected: "disjoint",
            found: other.name().to_string(),
        }),
    }
}

/// Network for a laminar family. A disjoint family yields the same network as
/// [`build_disjoint`].
pub fn build_laminar(inst: &ValidInstance) -> Result<FlowNetwork, NetworkError> {
    match inst.structure() {
        GroupStructure::Disjoint => {
            Ok(build_from_forest(inst, inst.forest().expect("flat"), false))
        }
        GroupStructure::Laminar(f) => Ok(build_from_forest(inst, f, true)),
        GroupStructure::General => Err(NetworkError::WrongStructure {
            expected: "laminar",
            found: "general".to_string(),
        }),
    }
}

/// Picks the construction matching the instance's group structure.
pub fn build(inst: &ValidInstance) -> Result<FlowNetwork, NetworkError> {
    build_laminar(inst)
}

fn build_from_forest(inst: &ValidInstance, forest: &LaminarForest, laminar: bool) -> FlowNetwork {
    let (n, m) = (inst.n(), inst.m());
    let mut b = Builder {
        nodes: Vec::new(),
        arcs: Vec::new(),
        origin: Vec::new(),
        bundles: Vec::new(),
        arc_bundle: Vec::new(),
    };
    let source = b.node(NodeKind::Source);
    let item_nodes: Vec<usize> = (0..n).map(|i| b.node(NodeKind::Item(i))).collect();

    // group copies, level by level so node order is topological
    let depth = forest.level.iter().copied().max().unwrap_or(0);
    let mut copy_node = vec![usize::MAX; inst.slots().len()];
    for level in 1..=depth {
        for (s, slot) in inst.slots().iter().enumerate() {
            if forest.level[slot.group] == level {
                copy_node[s] = b.node(NodeKind::GroupCopy {
                    platform: slot.platform,
                    group: slot.group,
                    level,
                });
            }
        }
    }
    let l1: Vec<usize> = (0..m).map(|p| b.node(NodeKind::PlatformL1(p))).collect();
    let l2: Vec<usize> = (0..m).map(|p| b.node(NodeKind::PlatformL2(p))).collect();
    let sink = b.node(NodeKind::Sink);

    let source_arc: Vec<usize> = (0..n)
        .map(|i| {
            b.arc(
                Arc {
                    tail: source,
                    head: item_nodes[i],
                    capacity: 1,
                    weight: 0.0,
                    utility: 0.0,
                    k: 0,
                    kind: ArcKind::SourceEdge,
                },
                None,
            )
        })
        .collect();

    let mut edge_arc = vec![usize::MAX; inst.edges().len()];
    for i in 0..n {
        let g = inst.smallest_group(i);
        for &e in inst.item_edges(i) {
            let edge = inst.edge(e);
            let s = inst.slot(edge.platform, g).expect("slot of smallest group");
            edge_arc[e] = b.arc(
                Arc {
                    tail: item_nodes[i],
                    head: copy_node[s],
                    capacity: 1,
                    weight: 0.0,
                    utility: edge.utility,
                    k: 0,
                    kind: ArcKind::ItemEdge,
                },
                Some(e),
            );
        }
    }

    let mut out_bundle = vec![None; 0];
    out_bundle.resize(b.nodes.len(), None);
    for (s, slot) in inst.slots().iter().enumerate() {
        let marginals: Vec<f64> = slot.table.marginals().collect();
        let (head, kind) = match forest.parent[slot.group] {
            Some(parent) => {
                let ps = inst.slot(slot.platform, parent).expect("parent slot");
                (copy_node[ps], ArcKind::SubsetEdge)
            }
            None => (l1[slot.platform], ArcKind::L1),
        };
        out_bundle[copy_node[s]] = Some(b.bundle(copy_node[s], head, kind, &marginals));
    }
    for p in 0..m {
        let marginals: Vec<f64> = inst.platform_table(p).marginals().collect();
        out_bundle[l1[p]] = Some(b.bundle(l1[p], l2[p], ArcKind::L2, &marginals));
    }
    let sink_arc: Vec<usize> = (0..m)
        .map(|p| {
            b.arc(
                Arc {
                    tail: l2[p],
                    head: sink,
                    capacity: inst.platform_degree(p) as u32,
                    weight: 0.0,
                    utility: 0.0,
                    k: 0,
                    kind: ArcKind::SinkEdge,
                },
                None,
            )
        })
        .collect();

    let mut out_arcs = vec![Vec::new(); b.nodes.len()];
    let mut in_arcs = vec![Vec::new(); b.nodes.len()];
    for (a, arc) in b.arcs.iter().enumerate() {
        out_arcs[arc.tail].push(a);
        in_arcs[arc.head].push(a);
    }

    let net = FlowNetwork {
        nodes: b.nodes,
        arcs: b.arcs,
        out_arcs,
        in_arcs,
        source,
        sink,
        item_nodes,
        origin: b.origin,
        edge_arc,
        source_arc,
        bundles: b.bundles,
        arc_bundle: b.arc_bundle,
        out_bundle,
        sink_arc,
        depth,
        laminar,
    };
    let size = NetworkSize::of(inst);
    debug_assert!(net.arc_count() <= size.laminar_arc_bound(net.depth.max(1)));
    if !laminar {
        debug_assert_eq!(net.arc_count(), size.disjoint_arc_count());
        debug_assert!(net.node_count() <= size.node_bound());
    }
    net
}

/// Size limits stated for the constructions, from `n`, `m`, `|E|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkSize {
    pub n: usize,
    pub m: usize,
    pub edges: usize,
}

impl NetworkSize {
    pub fn of(inst: &ValidInstance) -> Self {
        Self {
            n: inst.n(),
            m: inst.m(),
            edges: inst.edges().len(),
        }
    }

    /// `n + 2m + |E| + 2`.
    pub fn node_bound(&self) -> usize {
        self.n + 2 * self.m + self.edges + 2
    }

    /// `n + m + 3|E|`.
    pub fn disjoint_arc_count(&self) -> usize {
        self.n + self.m + 3 * self.edges
    }

    /// `n + m + (d+2)|E|`.
    pub fn laminar_arc_bound(&self, d: usize) -> usize {
        self.n + self.m + (d + 2) * self.edges
    }
}

/// Reads the matching off an integral flow.
pub fn flow_to_matching(network: &FlowNetwork, flow: &FlowState) -> Result<Matching, NetworkError> {
    network.check_flow(flow.arc_flow())?;
    let mut matching = Matching::empty(network.item_nodes.len());
    for (a, arc) in network.arcs.iter().enumerate() {
        if arc.kind == ArcKind::ItemEdge && flow.arc_flow()[a] == 1 {
            let NodeKind::Item(i) = network.nodes[arc.tail] else {
                unreachable!("item arc leaves an item node")
            };
            let platform = match network.nodes[arc.head] {
                NodeKind::GroupCopy { platform, .. } => platform,
                _ => unreachable!("item arc enters a group copy"),
            };
            matching.assign(i, platform);
        }
    }
    Ok(matching)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostSpec;
    use crate::instance::{
        matching_cost, matching_utility, validate_instance, CostModel, DeclaredStructure, Edge,
        GroupFamily, Instance,
    };

    fn instance(
        n: usize,
        m: usize,
        edges: &[(usize, usize, f64)],
        groups: Vec<Vec<usize>>,
    ) -> ValidInstance {
        validate_instance(Instance {
            n,
            m,
            edges: edges.iter().map(|&e| Edge::from(e)).collect(),
            ell: 0.0,
            groups: GroupFamily::new(DeclaredStructure::Auto, groups),
            costs: CostModel::uniform(CostSpec::quadratic()),
        })
        .unwrap()
    }

    fn fig2() -> ValidInstance {
        let edges: Vec<_> = (0..6).map(|i| (i, 0, 1.0 + i as f64)).collect();
        instance(
            6,
            1,
            &edges,
            vec![
                vec![0, 1, 2, 3, 4, 5],
                vec![0, 1],
                vec![2, 3, 4, 5],
                vec![4, 5],
            ],
        )
    }

    #[test]
    fn single_path_network() {
        let mut raw = instance(1, 1, &[(0, 0, 2.0)], vec![vec![0]]).into_raw();
        raw.costs = CostModel::with_defaults(
            CostSpec::Table {
                table: vec![0.0, 7.0],
            },
            CostSpec::Table {
                table: vec![0.0, 3.0],
            },
        );
        let inst = validate_instance(raw).unwrap();
        let net = build_disjoint(&inst).unwrap();
        assert_eq!(net.node_count(), 6);
        // s->i, p->t, i->p^1, L1, L2
        assert_eq!(net.arc_count(), 5);
        let kinds: Vec<_> = net.arcs().iter().map(|a| (a.kind, a.weight)).collect();
        assert!(kinds.contains(&(ArcKind::L1, 3.0)));
        assert!(kinds.contains(&(ArcKind::L2, 7.0)));
    }

    #[test]
    fn disjoint_size_formula() {
        let edges = [
            (0, 0, 1.0),
            (0, 1, 2.0),
            (1, 1, 1.0),
            (2, 2, 1.0),
            (3, 0, 3.0),
            (3, 2, 1.0),
            (4, 1, 1.0),
            (5, 0, 1.0),
            (5, 1, 1.0),
            (5, 2, 2.0),
        ];
        let inst = instance(6, 3, &edges, vec![vec![0, 1, 2], vec![3, 4], vec![5]]);
        let net = build_disjoint(&inst).unwrap();
        assert!(net.node_count() <= 24);
        assert_eq!(net.arc_count(), 39);
    }

    #[test]
    fn build_disjoint_rejects_laminar() {
        assert!(matches!(
            build_disjoint(&fig2()),
            Err(NetworkError::WrongStructure { .. })
        ));
    }

    #[test]
    fn fig2_wiring() {
        let inst = fig2();
        let net = build_laminar(&inst).unwrap();
        assert_eq!(net.depth(), 3);
        // item arcs go to the innermost group
        let target_group = |i: usize| match net.node(net.arc(net.edge_arc(i)).head) {
            NodeKind::GroupCopy { group, .. } => group,
            _ => panic!(),
        };
        assert_eq!(
            (0..6).map(target_group).collect::<Vec<_>>(),
            vec![1, 1, 2, 2, 3, 3]
        );
        let subset: Vec<_> = net
            .arcs()
            .iter()
            .filter(|a| a.kind == ArcKind::SubsetEdge)
            .map(|a| (net.node(a.tail), net.node(a.head), a.k, a.weight))
            .collect();
        // G2 -> G1 twice, G4 -> G3 twice, G3 -> G1 four times
        assert_eq!(subset.len(), 8);
        let l1 = net.arcs().iter().filter(|a| a.kind == ArcKind::L1).count();
        assert_eq!(l1, 6);
        // balancing: every copy carries Δ_j(p) in and out
        for (v, kind) in net.nodes().iter().enumerate() {
            if let NodeKind::GroupCopy {
                platform, group, ..
            } = *kind
            {
                let d = inst.slots()[inst.slot(platform, group).unwrap()].degree;
                let cap_in: u32 = net.in_arcs(v).iter().map(|&a| net.arc(a).capacity).sum();
                let cap_out: u32 = net.out_arcs(v).iter().map(|&a| net.arc(a).capacity).sum();
                assert_eq!((cap_in as usize, cap_out as usize), (d, d));
            }
        }
        assert!(net.arc_count() <= NetworkSize::of(&inst).laminar_arc_bound(3));
    }

    #[test]
    fn fig2_path_through_i5_has_four_weighted_arcs() {
        let inst = fig2();
        let net = build_laminar(&inst).unwrap();
        let m = Matching::from_pairs(6, [(4, 0)]);
        let flow = net.canonical_flow(&inst, &m).unwrap();
        let weighted = (0..net.arc_count())
            .filter(|&a| flow.arc_flow()[a] == 1 && net.arc(a).kind.bears_weight())
            .count();
        assert_eq!(weighted, 4);
        let groups: Vec<_> = (0..net.arc_count())
            .filter(|&a| flow.arc_flow()[a] == 1)
            .filter_map(|a| match net.node(net.arc(a).tail) {
                NodeKind::GroupCopy { group, .. } => Some(group),
                _ => None,
            })
            .collect();
        let mut groups = groups;
        groups.sort_unstable();
        assert_eq!(groups, vec![0, 2, 3]);
    }

    #[test]
    fn degenerate_laminar_equals_disjoint() {
        let inst = instance(
            3,
            2,
            &[(0, 0, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 1, 4.0)],
            vec![vec![0, 2], vec![1]],
        );
        let a = build_disjoint(&inst).unwrap();
        let b = build_laminar(&inst).unwrap();
        assert_eq!(a.nodes(), b.nodes());
        assert_eq!(a.arcs(), b.arcs());
    }

    #[test]
    fn zero_flow_gives_empty_matching() {
        let inst = fig2();
        let net = build_laminar(&inst).unwrap();
        let flow = FlowState::from_arc_flow(&net, vec![0; net.arc_count()]);
        assert!(flow_to_matching(&net, &flow).unwrap().is_empty());
    }

    #[test]
    fn canonical_flow_roundtrip_and_costs() {
        let inst = fig2();
        let net = build_laminar(&inst).unwrap();
        let m = Matching::from_pairs(6, [(0, 0), (3, 0), (4, 0), (5, 0)]);
        let flow = net.canonical_flow(&inst, &m).unwrap();
        assert_eq!(flow_to_matching(&net, &flow).unwrap(), m);
        assert_eq!(flow.value(), 4);
        assert!(
            (flow.weight() + inst.base_cost() - matching_cost(&inst, &m).unwrap()).abs() < 1e-12
        );
        assert!((flow.utility() - matching_utility(&inst, &m)).abs() < 1e-12);
    }

    #[test]
    fn check_flow_catches_violations() {
        let inst = fig2();
        let net = build_laminar(&inst).unwrap();
        let mut f = vec![0; net.arc_count()];
        f[0] = 1;
        assert!(matches!(
            net.check_flow(&f),
            Err(NetworkError::ConservationViolated { .. })
        ));
        f[0] = 2;
        assert_eq!(
            net.check_flow(&f),
            Err(NetworkError::CapacityViolated { arc: 0 })
        );
        assert!(matches!(
            net.check_flow(&[0]),
            Err(NetworkError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn edge_list_export() {
        let inst = instance(1, 1, &[(0, 0, 2.0)], vec![vec![0]]);
        let net = build_disjoint(&inst).unwrap();
        let mut buf = Vec::new();
        net.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# node 0 s"));
        assert!(text.contains("1 2 1 0 2 item_edge 0"));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
    }
}
