//! Instances, group families, matchings and the exact cost/utility evaluators.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::{ConvexCostTable, CostSpec};
use crate::error::{MatchingError, ValidationError, ValidationIssue};

/// An item-platform pair with its utility. Serialized as `[item, platform, utility]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, f64)", into = "(usize, usize, f64)")]
pub struct Edge {
    pub item: usize,
    pub platform: usize,
    pub utility: f64,
}

impl Edge {
    pub fn new(item: usize, platform: usize, utility: f64) -> Self {
        Self {
            item,
            platform,
            utility,
        }
    }
}

impl From<(usize, usize, f64)> for Edge {
    fn from((item, platform, utility): (usize, usize, f64)) -> Self {
        Self::new(item, platform, utility)
    }
}

impl From<Edge> for (usize, usize, f64) {
    fn from(e: Edge) -> Self {
        (e.item, e.platform, e.utility)
    }
}

/// Structure a file claims its groups have. `Auto` accepts whatever
/// [`classify_groups`] finds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeclaredStructure {
    #[default]
    Auto,
    Disjoint,
    Laminar,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFamily {
    #[serde(default)]
    pub structure: DeclaredStructure,
    pub sets: Vec<Vec<usize>>,
}

impl GroupFamily {
    pub fn new(structure: DeclaredStructure, sets: Vec<Vec<usize>>) -> Self {
        Self { structure, sets }
    }

    /// Every item in its own group.
    pub fn singletons(n: usize) -> Self {
        Self::new(
            DeclaredStructure::Disjoint,
            (0..n).map(|i| vec![i]).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostDefaults {
    pub platform: CostSpec,
    pub group: CostSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformCost {
    pub platform: usize,
    pub cost: CostSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupPlatformCost {
    pub platform: usize,
    pub group: usize,
    pub cost: CostSpec,
}

/// The cost matrix: defaults plus per-platform and per-(platform, group) overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub platform_defaults: CostDefaults,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_platform: Vec<PlatformCost>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_group_per_platform: Vec<GroupPlatformCost>,
}

impl CostModel {
    /// Same function for every platform and every group.
    pub fn uniform(spec: CostSpec) -> Self {
        Self {
            platform_defaults: CostDefaults {
                platform: spec.clone(),
                group: spec,
            },
            per_platform: Vec::new(),
            per_group_per_platform: Vec::new(),
        }
    }

    pub fn with_defaults(platform: CostSpec, group: CostSpec) -> Self {
        Self {
            platform_defaults: CostDefaults { platform, group },
            per_platform: Vec::new(),
            per_group_per_platform: Vec::new(),
        }
    }
}

/// A problem instance as read from disk. Call [`validate_instance`] before solving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    pub m: usize,
    pub edges: Vec<Edge>,
    pub ell: f64,
    pub groups: GroupFamily,
    pub costs: CostModel,
}

/// Nesting forest of a laminar family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaminarForest {
    /// Minimal strict superset of each group.
    pub parent: Vec<Option<usize>>,
    /// Layer of each group in the network: 1 for groups without subgroups,
    /// otherwise one more than the highest child.
    pub level: Vec<usize>,
    /// Longest root-to-leaf chain, counted in groups.
    pub depth: usize,
}

impl LaminarForest {
    fn flat(groups: usize) -> Self {
        Self {
            parent: vec![None; groups],
            level: vec![1; groups],
            depth: usize::from(groups > 0),
        }
    }

    pub fn children(&self, group: usize) -> impl Iterator<Item = usize> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter(move |(_, p)| **p == Some(group))
            .map(|(c, _)| c)
    }

    /// `group` and all its ancestors, innermost first.
    pub fn chain(&self, group: usize) -> Vec<usize> {
        let mut out = vec![group];
        let mut cur = group;
        while let Some(p) = self.parent[cur] {
            out.push(p);
            cur = p;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupStructure {
    Disjoint,
    Laminar(LaminarForest),
    General,
}

impl GroupStructure {
    pub fn name(&self) -> &'static str {
        match self {
            GroupStructure::Disjoint => "disjoint",
            GroupStructure::Laminar(_) => "laminar",
            GroupStructure::General => "general",
        }
    }

    /// Maximum number of groups containing one item, when defined.
    pub fn depth(&self) -> Option<usize> {
        match self {
            GroupStructure::Disjoint => Some(1),
            GroupStructure::Laminar(f) => Some(f.depth),
            GroupStructure::General => None,
        }
    }
}

impl fmt::Display for GroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Disjoint, laminar (with its forest) or general.
///
/// Identical sets count as nested; the one with the lower index is the child.
pub fn classify_groups(sets: &[Vec<usize>]) -> GroupStructure {
    let sorted: Vec<Vec<usize>> = sets
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let tau = sorted.len();

    // inside[a][b]: group a is nested in group b (a below b in the forest order)
    let mut inside = vec![vec![false; tau]; tau];
    let mut disjoint = true;
    for a in 0..tau {
        for b in (a + 1)..tau {
            let common = intersection_len(&sorted[a], &sorted[b]);
            if common == 0 {
                continue;
            }
            disjoint = false;
            let (la, lb) = (sorted[a].len(), sorted[b].len());
            // equal sets: the lower index is the child
            if common == la {
                inside[a][b] = true;
            } else if common == lb {
                inside[b][a] = true;
            } else {
                return GroupStructure::General;
            }
        }
    }
    if disjoint {
        return GroupStructure::Disjoint;
    }

    let key = |g: usize| (sorted[g].len(), g);
    let parent: Vec<Option<usize>> = (0..tau)
        .map(|g| (0..tau).filter(|&h| inside[g][h]).min_by_key(|&h| key(h)))
        .collect();

    // children have strictly smaller keys, so increasing key order is a valid
    // bottom-up order
    let mut order: Vec<usize> = (0..tau).collect();
    order.sort_by_key(|&g| key(g));
    let mut level = vec![1usize; tau];
    for &g in &order {
        if let Some(p) = parent[g] {
            level[p] = level[p].max(level[g] + 1);
        }
    }
    let mut depth_from_root = vec![0usize; tau];
    for &g in order.iter().rev() {
        depth_from_root[g] = parent[g].map_or(1, |p| depth_from_root[p] + 1);
    }
    let depth = depth_from_root.iter().copied().max().unwrap_or(0);
    GroupStructure::Laminar(LaminarForest {
        parent,
        level,
        depth,
    })
}

fn intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Cost slot for one group at one platform (`f_p^j` together with `Δ_j(p)`).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSlot {
    pub platform: usize,
    pub group: usize,
    pub degree: usize,
    pub table: ConvexCostTable,
}

/// An instance that passed validation, with degrees, group structure and
/// materialized cost tables attached.
#[derive(Debug, Clone)]
pub struct ValidInstance {
    raw: Instance,
    structure: GroupStructure,
    forest: Option<LaminarForest>,
    item_groups: Vec<Vec<usize>>,
    smallest_group: Vec<usize>,
    item_edges: Vec<Vec<usize>>,
    edge_lookup: HashMap<(usize, usize), usize>,
    platform_degree: Vec<usize>,
    platform_tables: Vec<ConvexCostTable>,
    slots: Vec<GroupSlot>,
    slot_lookup: Vec<BTreeMap<usize, usize>>,
    edge_slots: Vec<Vec<usize>>,
}

impl ValidInstance {
    pub fn raw(&self) -> &Instance {
        &self.raw
    }

    pub fn into_raw(self) -> Instance {
        self.raw
    }

    pub fn n(&self) -> usize {
        self.raw.n
    }

    pub fn m(&self) -> usize {
        self.raw.m
    }

    pub fn ell(&self) -> f64 {
        self.raw.ell
    }

    pub fn edges(&self) -> &[Edge] {
        &self.raw.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.raw.edges[e]
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.raw.groups.sets
    }

    pub fn structure(&self) -> &GroupStructure {
        &self.structure
    }

    /// Nesting forest for disjoint (flat) and laminar families.
    pub fn forest(&self) -> Option<&LaminarForest> {
        self.forest.as_ref()
    }

    /// Groups containing `item`, ascending.
    pub fn item_groups(&self, item: usize) -> &[usize] {
        &self.item_groups[item]
    }

    /// Innermost group containing `item` (the one its network arcs attach to).
    pub fn smallest_group(&self, item: usize) -> usize {
        self.smallest_group[item]
    }

    /// Edge indices incident to `item`, by ascending platform.
    pub fn item_edges(&self, item: usize) -> &[usize] {
        &self.item_edges[item]
    }

    pub fn edge_index(&self, item: usize, platform: usize) -> Option<usize> {
        self.edge_lookup.get(&(item, platform)).copied()
    }

    /// `Δ(p)`.
    pub fn platform_degree(&self, p: usize) -> usize {
        self.platform_degree[p]
    }

    /// `f_p`.
    pub fn platform_table(&self, p: usize) -> &ConvexCostTable {
        &self.platform_tables[p]
    }

    /// All `(p, j)` slots with `Δ_j(p) >= 1`, ordered by platform then group.
    pub fn slots(&self) -> &[GroupSlot] {
        &self.slots
    }

    /// Slot index of group `j` at platform `p`, if `j ∈ g(p)`.
    pub fn slot(&self, p: usize, j: usize) -> Option<usize> {
        self.slot_lookup[p].get(&j).copied()
    }

    /// `g(p)` as `(group, slot index)` pairs.
    pub fn platform_groups(&self, p: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.slot_lookup[p].iter().map(|(&j, &s)| (j, s))
    }

    /// Slots whose count moves when edge `e` is used.
    pub fn edge_slots(&self, e: usize) -> &[usize] {
        &self.edge_slots[e]
    }

    /// `Σ_p f_p(0) + Σ_p Σ_{j∈g(p)} f_p^j(0)`: cost of the empty matching.
    pub fn base_cost(&self) -> f64 {
        self.platform_tables.iter().map(|t| t.value(0)).sum::<f64>()
            + self.slots.iter().map(|s| s.table.value(0)).sum::<f64>()
    }

    /// Sum over items of their best edge utility; no matching can exceed it.
    pub fn utility_upper_bound(&self) -> f64 {
        (0..self.n())
            .map(|i| {
                self.item_edges[i]
                    .iter()
                    .map(|&e| self.raw.edges[e].utility)
                    .fold(0.0, f64::max)
            })
            .sum()
    }

    /// Copy with a different utility floor.
    pub fn with_ell(&self, ell: f64) -> Self {
        let mut out = self.clone();
        out.raw.ell = ell;
        out
    }
}

/// Checks an instance and attaches the derived data solvers need.
///
/// All problems are collected before returning.
pub fn validate_instance(instance: Instance) -> Result<ValidInstance, ValidationError> {
    let mut issues = Vec::new();
    let (n, m) = (instance.n, instance.m);
    if n == 0 {
        issues.push(ValidationIssue::NoItems);
    }
    if !(instance.ell.is_finite() && instance.ell >= 0.0) {
        issues.push(ValidationIssue::BadFloor(instance.ell));
    }

    let mut edge_lookup = HashMap::new();
    let mut item_edges = vec![Vec::new(); n];
    let mut platform_degree = vec![0usize; m];
    for (index, e) in instance.edges.iter().enumerate() {
        if e.item >= n || e.platform >= m {
            issues.push(ValidationIssue::EdgeOutOfRange {
                index,
                item: e.item,
                platform: e.platform,
            });
            continue;
        }
        if !(e.utility.is_finite() && e.utility >= 0.0) {
            issues.push(ValidationIssue::BadUtility {
                item: e.item,
                platform: e.platform,
                utility: e.utility,
            });
        }
        if edge_lookup.insert((e.item, e.platform), index).is_some() {
            issues.push(ValidationIssue::DuplicateEdge {
                item: e.item,
                platform: e.platform,
            });
            continue;
        }
        item_edges[e.item].push(index);
        platform_degree[e.platform] += 1;
    }
    for list in &mut item_edges {
        list.sort_by_key(|&e| instance.edges[e].platform);
    }

    let mut item_groups = vec![Vec::new(); n];
    for (g, set) in instance.groups.sets.iter().enumerate() {
        if set.is_empty() {
            issues.push(ValidationIssue::EmptyGroup { group: g });
        }
        for &i in set {
            if i >= n {
                issues.push(ValidationIssue::GroupItemOutOfRange { group: g, item: i });
            } else if item_groups[i].last() != Some(&g) {
                item_groups[i].push(g);
            }
        }
    }
    for (i, gs) in item_groups.iter().enumerate() {
        if gs.is_empty() {
            issues.push(ValidationIssue::UncoveredItem { item: i });
        }
    }

    let structure = classify_groups(&instance.groups.sets);
    let declared_ok = match (instance.groups.structure, &structure) {
        (DeclaredStructure::Auto, _) | (DeclaredStructure::General, _) => true,
        (DeclaredStructure::Disjoint, GroupStructure::Disjoint) => true,
        (DeclaredStructure::Laminar, GroupStructure::Disjoint | GroupStructure::Laminar(_)) => true,
        _ => false,
    };
    if !declared_ok {
        issues.push(ValidationIssue::StructureMismatch {
            declared: format!("{:?}", instance.groups.structure).to_lowercase(),
            actual: structure.name().to_string(),
        });
    }

    if !issues.is_empty() {
        // cost tables depend on degrees computed from a well-formed graph
        return Err(ValidationError { issues });
    }

    let tau = instance.groups.sets.len();
    let forest = match &structure {
        GroupStructure::Disjoint => Some(LaminarForest::flat(tau)),
        GroupStructure::Laminar(f) => Some(f.clone()),
        GroupStructure::General => None,
    };
    let sizes: Vec<usize> = instance.groups.sets.iter().map(Vec::len).collect();
    let smallest_group: Vec<usize> = item_groups
        .iter()
        .map(|gs| *gs.iter().min_by_key(|&&g| (sizes[g], g)).expect("covered"))
        .collect();

    // Δ_j(p)
    let mut group_degree: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); m];
    for e in &instance.edges {
        for &g in &item_groups[e.item] {
            *group_degree[e.platform].entry(g).or_default() += 1;
        }
    }

    let mut platform_spec: Vec<&CostSpec> = vec![&instance.costs.platform_defaults.platform; m];
    for o in &instance.costs.per_platform {
        if o.platform < m {
            platform_spec[o.platform] = &o.cost;
        } else {
            issues.push(ValidationIssue::UnknownCostTarget {
                platform: o.platform,
                group: None,
            });
        }
    }
    let mut group_spec: HashMap<(usize, usize), &CostSpec> = HashMap::new();
    for o in &instance.costs.per_group_per_platform {
        if o.platform < m && o.group < tau {
            group_spec.insert((o.platform, o.group), &o.cost);
        } else {
            issues.push(ValidationIssue::UnknownCostTarget {
                platform: o.platform,
                group: Some(o.group),
            });
        }
    }

    let mut platform_tables = Vec::with_capacity(m);
    for p in 0..m {
        match platform_spec[p].tabulate(platform_degree[p]) {
            Ok(t) => platform_tables.push(t),
            Err(source) => issues.push(ValidationIssue::Cost {
                platform: p,
                group: None,
                source,
            }),
        }
    }
    let mut slots = Vec::new();
    let mut slot_lookup = vec![BTreeMap::new(); m];
    for p in 0..m {
        for (&g, &degree) in &group_degree[p] {
            let spec = group_spec
                .get(&(p, g))
                .copied()
                .unwrap_or(&instance.costs.platform_defaults.group);
            match spec.tabulate(degree) {
                Ok(table) => {
                    slot_lookup[p].insert(g, slots.len());
                    slots.push(GroupSlot {
                        platform: p,
                        group: g,
                        degree,
                        table,
                    });
                }
                Err(source) => issues.push(ValidationIssue::Cost {
                    platform: p,
                    group: Some(g),
                    source,
                }),
            }
        }
    }
    if !issues.is_empty() {
        return Err(ValidationError { issues });
    }

    let edge_slots = instance
        .edges
        .iter()
        .map(|e| {
            item_groups[e.item]
                .iter()
                .map(|&g| slot_lookup[e.platform][&g])
                .collect()
        })
        .collect();

    Ok(ValidInstance {
        raw: instance,
        structure,
        forest,
        item_groups,
        smallest_group,
        item_edges,
        edge_lookup,
        platform_degree,
        platform_tables,
        slots,
        slot_lookup,
        edge_slots,
    })
}

/// Partial assignment of items to platforms; each item to at most one platform.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Matching {
    assignment: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Self {
            assignment: vec![None; n],
        }
    }

    /// Builds from `(item, platform)` pairs; a later pair for the same item wins.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = Self::empty(n);
        for (i, p) in pairs {
            m.assign(i, p);
        }
        m
    }

    pub fn assign(&mut self, item: usize, platform: usize) {
        self.assignment[item] = Some(platform);
    }

    pub fn unassign(&mut self, item: usize) {
        self.assignment[item] = None;
    }

    pub fn platform_of(&self, item: usize) -> Option<usize> {
        self.assignment[item]
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Number of matched items.
    pub fn len(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Matched pairs by ascending item.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (i, p)))
    }

    /// Edge indices of the matched pairs.
    pub fn edge_indices(&self, inst: &ValidInstance) -> Result<Vec<usize>, MatchingError> {
        if self.n() != inst.n() {
            return Err(MatchingError::WrongSize {
                expected: inst.n(),
                found: self.n(),
            });
        }
        self.pairs()
            .map(|(item, platform)| {
                inst.edge_index(item, platform)
                    .ok_or(MatchingError::NotAnEdge { item, platform })
            })
            .collect()
    }
}

/// Running counts `σ_p` and `ν_p^j` for a partial matching.
///
/// Shared by every cost evaluation so all solvers price matchings the same way.
#[derive(Debug, Clone)]
pub struct Loads<'a> {
    inst: &'a ValidInstance,
    sigma: Vec<usize>,
    nu: Vec<usize>,
}

impl<'a> Loads<'a> {
    pub fn new(inst: &'a ValidInstance) -> Self {
        Self {
            inst,
            sigma: vec![0; inst.m()],
            nu: vec![0; inst.slots().len()],
        }
    }

    /// Cost increase if edge `e` were added now.
    pub fn add_cost(&self, e: usize) -> f64 {
        let p = self.inst.edge(e).platform;
        let mut delta = self.inst.platform_table(p).marginal(self.sigma[p] + 1);
        for &s in self.inst.edge_slots(e) {
            delta += self.inst.slots()[s].table.marginal(self.nu[s] + 1);
        }
        delta
    }

    /// Adds edge `e` and returns the cost increase.
    pub fn add(&mut self, e: usize) -> f64 {
        let delta = self.add_cost(e);
        self.sigma[self.inst.edge(e).platform] += 1;
        for &s in self.inst.edge_slots(e) {
            self.nu[s] += 1;
        }
        delta
    }

    /// Removes edge `e` (which must have been added) and returns the cost decrease.
    pub fn remove(&mut self, e: usize) -> f64 {
        let p = self.inst.edge(e).platform;
        let mut delta = self.inst.platform_table(p).marginal(self.sigma[p]);
        self.sigma[p] -= 1;
        for &s in self.inst.edge_slots(e) {
            delta += self.inst.slots()[s].table.marginal(self.nu[s]);
            self.nu[s] -= 1;
        }
        delta
    }

    /// `σ_p`.
    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// `ν` indexed by slot (see [`ValidInstance::slots`]).
    pub fn nu(&self) -> &[usize] {
        &self.nu
    }

    /// Total cost evaluated from the current counts.
    pub fn total_cost(&self) -> f64 {
        let platforms: f64 = self
            .sigma
            .iter()
            .enumerate()
            .map(|(p, &s)| self.inst.platform_table(p).value(s))
            .sum();
        let groups: f64 = self
            .nu
            .iter()
            .zip(self.inst.slots())
            .map(|(&c, slot)| slot.table.value(c))
            .sum();
        platforms + groups
    }
}

/// Loads of a matching.
pub fn matching_loads<'a>(
    inst: &'a ValidInstance,
    matching: &Matching,
) -> Result<Loads<'a>, MatchingError> {
    let mut loads = Loads::new(inst);
    for e in matching.edge_indices(inst)? {
        loads.add(e);
    }
    Ok(loads)
}

/// `Σ_p ( Σ_{j∈g(p)} f_p^j(ν_p^j) + f_p(σ_p) )`.
pub fn matching_cost(inst: &ValidInstance, matching: &Matching) -> Result<f64, MatchingError> {
    Ok(matching_loads(inst, matching)?.total_cost())
}

/// Sum of matched edge utilities.
pub fn matching_utility(inst: &ValidInstance, matching: &Matching) -> f64 {
    matching
        .pairs()
        .filter_map(|(i, p)| inst.edge_index(i, p))
        .map(|e| inst.edge(e).utility)
        .sum()
}
