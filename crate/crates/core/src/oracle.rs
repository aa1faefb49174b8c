//! Exhaustive oracle and instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{CostPreset, CostSpec};
use crate::error::{GenError, OracleError};
use crate::instance::{
    CostModel, DeclaredStructure, Edge, GroupFamily, GroupPlatformCost, Instance, Loads, Matching,
    PlatformCost, ValidInstance,
};

/// Largest number of assignments [`brute_force_opt`] will enumerate.
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub cost: f64,
    pub utility: f64,
    pub matching: Matching,
}

/// Minimum-cost matching with utility at least `ell`, by enumerating every
/// assignment of items to a neighbor or to nothing. `Ok(None)` when no
/// assignment meets the floor. Among equal costs the lexicographically first
/// assignment wins (unmatched before platforms, platforms ascending).
pub fn brute_force_opt(inst: &ValidInstance) -> Result<Option<Optimum>, OracleError> {
    let assignments: u128 = (0..inst.n())
        .map(|i| inst.item_edges(i).len() as u128 + 1)
        .try_fold(1u128, |acc, d| acc.checked_mul(d))
        .unwrap_or(u128::MAX);
    if assignments > ENUMERATION_LIMIT {
        return Err(OracleError::TooLarge {
            assignments,
            limit: ENUMERATION_LIMIT,
        });
    }
    // best utility still reachable from item i onward
    let mut tail_utility = vec![0.0; inst.n() + 1];
    for i in (0..inst.n()).rev() {
        let best = inst
            .item_edges(i)
            .iter()
            .map(|&e| inst.edge(e).utility)
            .fold(0.0, f64::max);
        tail_utility[i] = tail_utility[i + 1] + best;
    }
    let mut search = Search {
        inst,
        ell: inst.ell(),
        tail_utility,
        loads: Loads::new(inst),
        choice: vec![None; inst.n()],
        best: None,
    };
    search.dfs(0, 0.0);
    Ok(search.best.map(|(cost, choice)| {
        let matching = Matching::from_pairs(
            inst.n(),
            choice
                .iter()
                .enumerate()
                .filter_map(|(i, e)| e.map(|e| (i, inst.edge(e).platform))),
        );
        let utility = crate::instance::matching_utility(inst, &matching);
        Optimum {
            cost,
            utility,
            matching,
        }
    }))
}

struct Search<'a> {
    inst: &'a ValidInstance,
    ell: f64,
    tail_utility: Vec<f64>,
    loads: Loads<'a>,
    choice: Vec<Option<usize>>,
    best: Option<(f64, Vec<Option<usize>>)>,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize, utility: f64) {
        if utility + self.tail_utility[i] < self.ell - TOL {
            return;
        }
        if i == self.inst.n() {
            let cost = self.loads.total_cost();
            if self.best.as_ref().map_or(true, |(b, _)| cost < b - 1e-12) {
                self.best = Some((cost, self.choice.clone()));
            }
            return;
        }
        self.choice[i] = None;
        self.dfs(i + 1, utility);
        for &e in self.inst.item_edges(i) {
            self.loads.add(e);
            self.choice[i] = Some(e);
            self.dfs(i + 1, utility + self.inst.edge(e).utility);
            self.loads.remove(e);
        }
        self.choice[i] = None;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum UtilityDist {
    /// Integers drawn uniformly from `lo..=hi`.
    Integer {
        lo: u32,
        hi: u32,
    },
    /// Reals drawn uniformly from `[lo, hi)`.
    Uniform {
        lo: f64,
        hi: f64,
    },
    Constant {
        q: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenStructure {
    Disjoint,
    /// Random laminar family whose nesting depth is at most `depth`.
    Laminar {
        depth: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    Quadratic,
    /// Hinge costs `slope * max(0, k - threshold)` with random parameters.
    Piecewise,
    Nsw,
    /// Explicit tables with random nondecreasing marginals.
    RandomConvex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomParams {
    pub n: usize,
    pub m: usize,
    /// Probability that any given item-platform pair is an edge.
    pub density: f64,
    /// Cap on item degree applied before connecting the graph.
    pub max_degree: Option<usize>,
    pub utility: UtilityDist,
    pub num_groups: usize,
    pub structure: GenStructure,
    pub cost: CostKind,
    /// `ell` as a fraction of the sum over items of their best utility.
    pub ell_fraction: f64,
    pub seed: u64,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self {
            n: 6,
            m: 3,
            density: 0.5,
            max_degree: None,
            utility: UtilityDist::Integer { lo: 1, hi: 5 },
            num_groups: 2,
            structure: GenStructure::Disjoint,
            cost: CostKind::Quadratic,
            ell_fraction: 0.5,
            seed: 0,
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Reproducible random instance with a connected bipartite graph.
pub fn gen_random(params: &RandomParams) -> Result<Instance, GenError> {
    let RandomParams { n, m, density, .. } = *params;
    if n == 0 || m == 0 {
        return Err(GenError::BadParams("n and m must be positive".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenError::BadParams(format!(
            "density {density} outside (0, 1]"
        )));
    }
    if params.num_groups == 0 || params.num_groups > n {
        return Err(GenError::BadParams(format!(
            "num_groups {} must be between 1 and n = {n}",
            params.num_groups
        )));
    }
    if params.max_degree == Some(0) {
        return Err(GenError::BadParams("max_degree must be positive".into()));
    }
    if let GenStructure::Laminar { depth: 0 } = params.structure {
        return Err(GenError::BadParams("laminar depth must be positive".into()));
    }
    if !(params.ell_fraction >= 0.0 && params.ell_fraction.is_finite()) {
        return Err(GenError::BadParams(
            "ell_fraction must be nonnegative".into(),
        ));
    }
    match params.utility {
        UtilityDist::Integer { lo, hi } if lo > hi => {
            return Err(GenError::BadParams("utility range is empty".into()))
        }
        UtilityDist::Uniform { lo, hi } if !(lo >= 0.0 && lo < hi) => {
            return Err(GenError::BadParams(
                "utility range is empty or negative".into(),
            ))
        }
        UtilityDist::Constant { q } if !(q >= 0.0 && q.is_finite()) => {
            return Err(GenError::BadParams(
                "constant utility must be nonnegative".into(),
            ))
        }
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let cap = params.max_degree.unwrap_or(m).min(m);

    let mut adj = vec![vec![false; m]; n];
    for row in adj.iter_mut() {
        for cell in row.iter_mut() {
            *cell = rng.gen_bool(density);
        }
        let mut on: Vec<usize> = (0..m).filter(|&p| row[p]).collect();
        if on.len() > cap {
            on.shuffle(&mut rng);
            for &p in &on[cap..] {
                row[p] = false;
            }
        }
    }
    // join components until the graph is connected; a saturated item may
    // trade one of its edges when nothing else can bridge
    let degree = |adj: &Vec<Vec<bool>>, i: usize| adj[i].iter().filter(|&&x| x).count();
    let mut rounds = 0;
    loop {
        let mut uf = UnionFind((0..n + m).collect());
        for (i, row) in adj.iter().enumerate() {
            for (p, &on) in row.iter().enumerate() {
                if on {
                    uf.union(i, n + p);
                }
            }
        }
        let root = uf.find(0);
        if (0..n + m).all(|v| uf.find(v) == root) {
            break;
        }
        rounds += 1;
        if rounds > 100 * (n + m) {
            return Err(GenError::BadParams(
                "cannot connect the graph within the degree cap".into(),
            ));
        }
        let bridges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..m).map(move |p| (i, p)))
            .filter(|&(i, p)| uf.find(i) != uf.find(n + p))
            .collect();
        let open: Vec<(usize, usize)> = bridges
            .iter()
            .copied()
            .filter(|&(i, _)| degree(&adj, i) < cap)
            .collect();
        if let Some(&(i, p)) = open.choose(&mut rng) {
            adj[i][p] = true;
            continue;
        }
        let &(i, p) = bridges.choose(&mut rng).expect("graph is disconnected");
        let held: Vec<usize> = (0..m).filter(|&q| adj[i][q]).collect();
        let &drop = held.choose(&mut rng).expect("saturated item has edges");
        adj[i][drop] = false;
        adj[i][p] = true;
    }

    let mut edges = Vec::new();
    for (i, row) in adj.iter().enumerate() {
        for (p, &on) in row.iter().enumerate() {
            if on {
                let u = match params.utility {
                    UtilityDist::Integer { lo, hi } => rng.gen_range(lo..=hi) as f64,
                    UtilityDist::Uniform { lo, hi } => rng.gen_range(lo..hi),
                    UtilityDist::Constant { q } => q,
                };
                edges.push(Edge::new(i, p, u));
            }
        }
    }

    let sets = match params.structure {
        GenStructure::Disjoint => random_partition(&mut rng, n, params.num_groups),
        GenStructure::Laminar { depth } => random_laminar(&mut rng, n, params.num_groups, depth),
    };

    let best_sum: f64 = (0..n)
        .map(|i| {
            edges
                .iter()
                .filter(|e| e.item == i)
                .map(|e| e.utility)
                .fold(0.0, f64::max)
        })
        .sum();
    let ell = params.ell_fraction * best_sum;

    let costs = random_costs(&mut rng, params.cost, n, m, &edges, &sets);
    let structure = match params.structure {
        GenStructure::Disjoint => DeclaredStructure::Disjoint,
        GenStructure::Laminar { .. } => DeclaredStructure::Laminar,
    };
    Ok(Instance {
        n,
        m,
        edges,
        ell,
        groups: GroupFamily::new(structure, sets),
        costs,
    })
}

/// Random laminar instance with nesting depth at most `depth`.
pub fn gen_laminar(params: &RandomParams, depth: usize) -> Result<Instance, GenError> {
    gen_random(&RandomParams {
        structure: GenStructure::Laminar { depth },
        ..params.clone()
    })
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut items: Vec<usize> = (0..n).collect();
    items.shuffle(rng);
    let mut sets: Vec<Vec<usize>> = items[..parts].iter().map(|&i| vec![i]).collect();
    for &i in &items[parts..] {
        let g = rng.gen_range(0..parts);
        sets[g].push(i);
    }
    for s in &mut sets {
        s.sort_unstable();
    }
    sets
}

/// Roots partition the items; further groups are proper subsets of existing
/// ones, disjoint from their siblings, nested at most `depth` deep.
fn random_laminar(rng: &mut ChaCha8Rng, n: usize, total: usize, depth: usize) -> Vec<Vec<usize>> {
    let roots = total.div_ceil(2).max(1).min(n);
    let mut sets = random_partition(rng, n, roots);
    let mut level = vec![1usize; sets.len()];
    // items of each set not yet inside one of its children
    let mut free: Vec<Vec<usize>> = sets.clone();
    let mut attempts = 0;
    while sets.len() < total && attempts < 50 * total {
        attempts += 1;
        let eligible: Vec<usize> = (0..sets.len())
            .filter(|&g| level[g] < depth && sets[g].len() >= 2 && !free[g].is_empty())
            .collect();
        let Some(&g) = eligible.choose(rng) else {
            break;
        };
        let max_size = free[g].len().min(sets[g].len() - 1);
        if max_size == 0 {
            continue;
        }
        let size = rng.gen_range(1..=max_size);
        free[g].shuffle(rng);
        let mut child: Vec<usize> = free[g].drain(..size).collect();
        child.sort_unstable();
        free.push(child.clone());
        sets.push(child);
        level.push(level[g] + 1);
    }
    sets
}

fn random_costs(
    rng: &mut ChaCha8Rng,
    kind: CostKind,
    n: usize,
    m: usize,
    edges: &[Edge],
    sets: &[Vec<usize>],
) -> CostModel {
    match kind {
        CostKind::Quadratic => CostModel::uniform(CostSpec::quadratic()),
        CostKind::Nsw => CostModel::uniform(CostSpec::Preset(CostPreset::NswLog { scale: 1.0 })),
        CostKind::Piecewise | CostKind::RandomConvex => {
            let mut member = vec![vec![false; sets.len()]; n];
            for (g, s) in sets.iter().enumerate() {
                for &i in s {
                    member[i][g] = true;
                }
            }
            let mut pdeg = vec![0usize; m];
            let mut gdeg = vec![vec![0usize; sets.len()]; m];
            for e in edges {
                pdeg[e.platform] += 1;
                for g in 0..sets.len() {
                    if member[e.item][g] {
                        gdeg[e.platform][g] += 1;
                    }
                }
            }
            let mut draw = |cap: usize| -> CostSpec {
                match kind {
                    CostKind::Piecewise => CostSpec::Preset(CostPreset::Hinge {
                        threshold: rng.gen_range(0..=2),
                        slope: rng.gen_range(1..=3) as f64,
                    }),
                    _ => {
                        let mut marg = rng.gen_range(-2..=2) as f64;
                        let mut table = vec![0.0];
                        for _ in 0..cap {
                            table.push(table.last().unwrap() + marg);
                            marg += rng.gen_range(0..=3) as f64;
                        }
                        CostSpec::Table { table }
                    }
                }
            };
            let mut model = CostModel::uniform(CostSpec::zero());
            for (p, &cap) in pdeg.iter().enumerate() {
                model.per_platform.push(PlatformCost {
                    platform: p,
                    cost: draw(cap),
                });
            }
            for (p, row) in gdeg.iter().enumerate() {
                for (g, &cap) in row.iter().enumerate() {
                    if cap > 0 {
                        model.per_group_per_platform.push(GroupPlatformCost {
                            platform: p,
                            group: g,
                            cost: draw(cap),
                        });
                    }
                }
            }
            model
        }
    }
}

/// Simple undirected graph on vertices `0..vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn path(k: usize) -> Self {
        Self {
            vertices: k,
            edges: (1..k).map(|v| (v - 1, v)).collect(),
        }
    }

    pub fn cycle(k: usize) -> Self {
        let mut g = Self::path(k);
        if k >= 3 {
            g.edges.push((k - 1, 0));
        }
        g
    }

    pub fn complete(k: usize) -> Self {
        Self {
            vertices: k,
            edges: (0..k)
                .flat_map(|a| ((a + 1)..k).map(move |b| (a, b)))
                .collect(),
        }
    }

    pub fn empty(k: usize) -> Self {
        Self {
            vertices: k,
            edges: Vec::new(),
        }
    }

    /// Erdős–Rényi graph with edge probability `p`.
    pub fn random(vertices: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for a in 0..vertices {
            for b in (a + 1)..vertices {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        Self { vertices, edges }
    }
}

/// Size of a maximum independent set, by subset enumeration.
pub fn max_independent_set(g: &Graph) -> usize {
    assert!(g.vertices <= 24, "enumeration limited to 24 vertices");
    let mut nbr = vec![0u32; g.vertices];
    for &(a, b) in &g.edges {
        nbr[a] |= 1 << b;
        nbr[b] |= 1 << a;
    }
    (0u32..(1 << g.vertices))
        .filter(|&s| (0..g.vertices).all(|v| s & (1 << v) == 0 || nbr[v] & s == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Instance that has a zero-cost matching with utility `ell` exactly when the
/// graph has an independent set of size `ell`.
///
/// Vertices become items; every item may go to platform `a` (utility 1) or
/// `b` (utility 0). Each graph edge becomes a group that pays once both
/// endpoints sit on `a`; vertices without edges get their own cost-free
/// group. Platform `a` pays beyond `ell` items and `b` beyond `|V| - ell`.
pub fn gen_independent_set_reduction(graph: &Graph, ell: usize) -> Result<Instance, GenError> {
    let nv = graph.vertices;
    if ell > nv {
        return Err(GenError::BadParams(format!("ell {ell} exceeds |V| = {nv}")));
    }
    if graph
        .edges
        .iter()
        .any(|&(a, b)| a == b || a >= nv || b >= nv)
    {
        return Err(GenError::BadParams(
            "graph must be simple with valid vertices".into(),
        ));
    }
    let (a, b) = (0, 1);
    let mut edges = Vec::with_capacity(2 * nv);
    for v in 0..nv {
        edges.push(Edge::new(v, a, 1.0));
        edges.push(Edge::new(v, b, 0.0));
    }
    let mut sets: Vec<Vec<usize>> = graph
        .edges
        .iter()
        .map(|&(x, y)| vec![x.min(y), x.max(y)])
        .collect();
    let edge_groups = sets.len();
    let mut covered = vec![false; nv];
    for &(x, y) in &graph.edges {
        covered[x] = true;
        covered[y] = true;
    }
    sets.extend((0..nv).filter(|&v| !covered[v]).map(|v| vec![v]));

    let mut costs = CostModel::with_defaults(CostSpec::zero(), CostSpec::zero());
    costs.per_platform.push(PlatformCost {
        platform: a,
        cost: CostSpec::Preset(CostPreset::Hinge {
            threshold: ell,
            slope: 1.0,
        }),
    });
    costs.per_platform.push(PlatformCost {
        platform: b,
        cost: CostSpec::Preset(CostPreset::Hinge {
            threshold: nv - ell,
            slope: 1.0,
        }),
    });
    for g in 0..edge_groups {
        costs.per_group_per_platform.push(GroupPlatformCost {
            platform: a,
            group: g,
            cost: CostSpec::Preset(CostPreset::Piecewise {
                threshold: 1,
                slope: 1.0,
            }),
        });
    }
    Ok(Instance {
        n: nv,
        m: 2,
        edges,
        ell: ell as f64,
        groups: GroupFamily::new(DeclaredStructure::General, sets),
        costs,
    })
}
