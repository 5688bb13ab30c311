//! Instance and solution types shared by every solver, plus feasibility and cost.

use std::collections::BTreeSet;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("weight must be strictly positive, got {0}")]
    NonPositiveWeight(Rational),
    #[error("need at least two distinct terminals")]
    TooFewTerminals,
    #[error("terminal {0} listed twice")]
    DuplicateTerminal(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("terminals {0} and {1} are adjacent")]
    AdjacentTerminals(usize, usize),
    #[error("metric is not valid: {0}")]
    InvalidMetric(String),
    #[error("k = {k} must lie in 1..={n}")]
    InvalidK { k: usize, n: usize },
    #[error("solution kind does not match instance kind")]
    VariantMismatch,
    #[error("solution is infeasible")]
    Infeasible,
    #[error("malformed solution: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: Rational,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected graph with strictly positive edge weights. Endpoints are stored with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWeightedGraph {
    pub n: usize,
    pub edges: Vec<Edge>,
}

impl EdgeWeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, Rational)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            check_pair(n, u, v)?;
            if !w.is_positive() {
                return Err(ModelError::NonPositiveWeight(w));
            }
            let (a, b) = (u.min(v), u.max(v));
            if !seen.insert((a, b)) {
                return Err(ModelError::DuplicateEdge(a, b));
            }
            out.push(Edge { u: a, v: b, w });
        }
        Ok(EdgeWeightedGraph { n, edges: out })
    }

    /// Incident edge ids per vertex.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (id, e) in self.edges.iter().enumerate() {
            inc[e.u].push(id);
            inc[e.v].push(id);
        }
        inc
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.n);
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        self.n <= 1 || (0..self.n).all(|v| uf.find(v) == uf.find(0))
    }

    pub fn total_weight(&self) -> Rational {
        self.edges.iter().map(|e| &e.w).sum()
    }

    /// Same graph with every weight multiplied by `lambda`.
    pub fn scaled(&self, lambda: &Rational) -> Self {
        EdgeWeightedGraph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| Edge { u: e.u, v: e.v, w: &e.w * lambda })
                .collect(),
        }
    }
}

fn check_pair(n: usize, u: usize, v: usize) -> Result<()> {
    if u >= n {
        return Err(ModelError::VertexOutOfRange(u));
    }
    if v >= n {
        return Err(ModelError::VertexOutOfRange(v));
    }
    if u == v {
        return Err(ModelError::SelfLoop(u));
    }
    Ok(())
}

fn check_terminals(n: usize, terminals: &[usize]) -> Result<()> {
    if terminals.len() < 2 {
        return Err(ModelError::TooFewTerminals);
    }
    let mut seen = BTreeSet::new();
    for &t in terminals {
        if t >= n {
            return Err(ModelError::VertexOutOfRange(t));
        }
        if !seen.insert(t) {
            return Err(ModelError::DuplicateTerminal(t));
        }
    }
    Ok(())
}

/// Edge multiway cut: separate every pair of terminals by deleting edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiwayCutInstance {
    pub graph: EdgeWeightedGraph,
    pub terminals: Vec<usize>,
}

impl MultiwayCutInstance {
    pub fn new(graph: EdgeWeightedGraph, terminals: Vec<usize>) -> Result<Self> {
        check_terminals(graph.n, &terminals)?;
        if !graph.is_connected() {
            return Err(ModelError::Disconnected);
        }
        Ok(MultiwayCutInstance { graph, terminals })
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    /// Index `j` with `terminals[j] == v`.
    pub fn terminal_index(&self, v: usize) -> Option<usize> {
        self.terminals.iter().position(|&t| t == v)
    }

    pub fn non_terminals(&self) -> Vec<usize> {
        (0..self.graph.n).filter(|v| !self.terminals.contains(v)).collect()
    }

    /// Edge ids whose endpoints carry different labels.
    pub fn boundary(&self, labels: &[usize]) -> Vec<usize> {
        self.graph
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| labels[e.u] != labels[e.v])
            .map(|(id, _)| id)
            .collect()
    }

    /// Labels each vertex with the index of the terminal it stays connected to after
    /// deleting `cut`; components holding no terminal go to terminal 0. Errors if two
    /// terminals share a component.
    pub fn partition_from_cut(&self, cut: &[usize]) -> Result<Vec<usize>> {
        let removed: BTreeSet<usize> = cut.iter().copied().collect();
        let mut uf = UnionFind::new(self.graph.n);
        for (id, e) in self.graph.edges.iter().enumerate() {
            if !removed.contains(&id) {
                uf.union(e.u, e.v);
            }
        }
        let mut root_label = vec![usize::MAX; self.graph.n];
        for (j, &t) in self.terminals.iter().enumerate() {
            let r = uf.find(t);
            if root_label[r] != usize::MAX {
                return Err(ModelError::Infeasible);
            }
            root_label[r] = j;
        }
        Ok((0..self.graph.n)
            .map(|v| match root_label[uf.find(v)] {
                usize::MAX => 0,
                j => j,
            })
            .collect())
    }

    /// Inclusion-minimal representative: the boundary of the partition the cut induces.
    pub fn canonical_cut(&self, cut: &[usize]) -> Result<Vec<usize>> {
        let labels = self.partition_from_cut(cut)?;
        Ok(self.boundary(&labels))
    }
}

/// Simple undirected graph with strictly positive vertex weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexWeightedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub weights: Vec<Rational>,
    adjacency: Vec<Vec<usize>>,
}

impl VertexWeightedGraph {
    pub fn new(weights: Vec<Rational>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = weights.len();
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(ModelError::NonPositiveWeight(w.clone()));
        }
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            check_pair(n, u, v)?;
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(ModelError::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        let edges: Vec<(usize, usize)> = seen.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        Ok(VertexWeightedGraph { n, edges, weights, adjacency })
    }

    pub fn unit(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(vec![Rational::one(); n], edges)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn weight_of(&self, set: &[usize]) -> Rational {
        set.iter().map(|&v| &self.weights[v]).sum()
    }

    pub fn total_weight(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        self.edges.iter().all(|(u, v)| !(s.contains(u) && s.contains(v)))
    }

    pub fn is_vertex_cover(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        self.edges.iter().all(|(u, v)| s.contains(u) || s.contains(v))
    }

    /// Subgraph induced by `keep` (in the given order) and the map back to original ids.
    pub fn induced(&self, keep: &[usize]) -> (VertexWeightedGraph, Vec<usize>) {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|(u, v)| pos[*u] != usize::MAX && pos[*v] != usize::MAX)
            .map(|(u, v)| (pos[*u], pos[*v]))
            .collect();
        let weights = keep.iter().map(|&v| self.weights[v].clone()).collect();
        let g = VertexWeightedGraph::new(weights, edges).expect("induced subgraph of a valid graph");
        (g, keep.to_vec())
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..self.n {
            by_root.entry(uf.find(v)).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    pub fn with_weights(&self, weights: Vec<Rational>) -> Result<Self> {
        Self::new(weights, self.edges.clone())
    }
}

/// Node multiway cut: delete non-terminal vertices to separate all terminals.
///
/// Connectivity is not required, since the vertex cover reduction of a graph
/// with isolated vertices is disconnected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCutInstance {
    pub graph: VertexWeightedGraph,
    pub terminals: Vec<usize>,
}

impl NodeCutInstance {
    pub fn new(graph: VertexWeightedGraph, terminals: Vec<usize>) -> Result<Self> {
        check_terminals(graph.n, &terminals)?;
        for (i, &a) in terminals.iter().enumerate() {
            for &b in &terminals[i + 1..] {
                if graph.has_edge(a, b) {
                    return Err(ModelError::AdjacentTerminals(a, b));
                }
            }
        }
        Ok(NodeCutInstance { graph, terminals })
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn is_terminal(&self, v: usize) -> bool {
        self.terminals.contains(&v)
    }

    pub fn non_terminals(&self) -> Vec<usize> {
        (0..self.graph.n).filter(|&v| !self.is_terminal(v)).collect()
    }

    /// True iff deleting `cut` leaves no path between two distinct terminals.
    pub fn separates(&self, cut: &[usize]) -> bool {
        let removed: BTreeSet<usize> = cut.iter().copied().collect();
        if self.terminals.iter().any(|t| removed.contains(t)) {
            return false;
        }
        let mut uf = UnionFind::new(self.graph.n);
        for &(u, v) in &self.graph.edges {
            if !removed.contains(&u) && !removed.contains(&v) {
                uf.union(u, v);
            }
        }
        let roots: BTreeSet<usize> = self.terminals.iter().map(|&t| uf.find(t)).collect();
        roots.len() == self.terminals.len()
    }
}

/// Symmetric distance matrix satisfying the metric axioms exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metric {
    pub n: usize,
    pub d: Vec<Vec<Rational>>,
}

impl Metric {
    pub fn new(d: Vec<Vec<Rational>>) -> Result<Self> {
        let n = d.len();
        let bad = |m: String| Err(ModelError::InvalidMetric(m));
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return bad(format!("row {i} has {} entries, expected {n}", row.len()));
            }
            if !row[i].is_zero() {
                return bad(format!("d({i},{i}) is not zero"));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && !d[i][j].is_positive() {
                    return bad(format!("d({i},{j}) must be positive"));
                }
                if d[i][j] != d[j][i] {
                    return bad(format!("d({i},{j}) != d({j},{i})"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if d[i][l] > &d[i][j] + &d[j][l] {
                        return bad(format!("triangle inequality fails on ({i},{j},{l})"));
                    }
                }
            }
        }
        Ok(Metric { n, d })
    }

    /// Shortest-path closure of a weighted complete-or-sparse graph; `None` marks a missing edge.
    pub fn shortest_path_closure(n: usize, w: &[Vec<Option<Rational>>]) -> Result<Self> {
        let mut d: Vec<Vec<Option<Rational>>> = w.to_vec();
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(Rational::zero());
        }
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (&d[i][m], &d[m][j]) {
                        let via = a + b;
                        if d[i][j].as_ref().map_or(true, |cur| via < *cur) {
                            d[i][j] = Some(via);
                        }
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(n);
        for row in d {
            let mut r = Vec::with_capacity(n);
            for x in row {
                r.push(x.ok_or_else(|| ModelError::InvalidMetric("graph is disconnected".into()))?);
            }
            out.push(r);
        }
        Metric::new(out)
    }

    pub fn dist(&self, u: usize, v: usize) -> &Rational {
        &self.d[u][v]
    }

    /// Sorted distinct pairwise distances, including 0.
    pub fn distinct_distances(&self) -> Vec<Rational> {
        let mut s: BTreeSet<Rational> = BTreeSet::new();
        s.insert(Rational::zero());
        for row in &self.d {
            s.extend(row.iter().cloned());
        }
        s.into_iter().collect()
    }
}

/// Where centers may be opened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FacilityMode {
    /// Centers are chosen among the points themselves.
    NoSteiner,
    /// Centers are chosen among `facilities` extra locations; `cross[u][f]` is the
    /// distance from point `u` to facility `f`.
    Steiner { facilities: usize, cross: Vec<Vec<Rational>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricInstance {
    pub metric: Metric,
    pub k: usize,
    pub facilities: FacilityMode,
}

impl MetricInstance {
    pub fn new(metric: Metric, k: usize, facilities: FacilityMode) -> Result<Self> {
        let candidates = match &facilities {
            FacilityMode::NoSteiner => metric.n,
            FacilityMode::Steiner { facilities, cross } => {
                if cross.len() != metric.n || cross.iter().any(|r| r.len() != *facilities) {
                    return Err(ModelError::InvalidMetric("cross distances have the wrong shape".into()));
                }
                if cross.iter().flatten().any(|x| x.is_negative()) {
                    return Err(ModelError::InvalidMetric("negative cross distance".into()));
                }
                *facilities
            }
        };
        if k == 0 || k > candidates.max(1) || k > metric.n.max(1) {
            return Err(ModelError::InvalidK { k, n: candidates.min(metric.n) });
        }
        Ok(MetricInstance { metric, k, facilities })
    }

    pub fn plain(metric: Metric, k: usize) -> Result<Self> {
        Self::new(metric, k, FacilityMode::NoSteiner)
    }

    pub fn n(&self) -> usize {
        self.metric.n
    }

    pub fn num_candidates(&self) -> usize {
        match &self.facilities {
            FacilityMode::NoSteiner => self.metric.n,
            FacilityMode::Steiner { facilities, .. } => *facilities,
        }
    }

    /// Distance from point `u` to candidate center `c`.
    pub fn to_center(&self, u: usize, c: usize) -> &Rational {
        match &self.facilities {
            FacilityMode::NoSteiner => &self.metric.d[u][c],
            FacilityMode::Steiner { cross, .. } => &cross[u][c],
        }
    }

    /// Nearest center among `centers`, lowest id on ties.
    pub fn nearest(&self, u: usize, centers: &[usize]) -> usize {
        let mut best = centers[0];
        for &c in &centers[1..] {
            let (dc, db) = (self.to_center(u, c), self.to_center(u, best));
            if dc < db || (dc == db && c < best) {
                best = c;
            }
        }
        best
    }
}

/// Problem kinds understood by the library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    EdgeMc(MultiwayCutInstance),
    NodeMc(NodeCutInstance),
    Mis(VertexWeightedGraph),
    KCenter(MetricInstance),
    KMedian(MetricInstance),
    Tsp(Metric),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// A candidate answer. Vertex and edge sets are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Solution {
    /// Edge ids of the deleted edges.
    EdgeCut(Vec<usize>),
    /// Deleted non-terminal vertices.
    NodeCut(Vec<usize>),
    IndependentSet(Vec<usize>),
    /// `assignment[u]` is the center serving point `u`.
    Clustering { centers: Vec<usize>, assignment: Vec<usize> },
    /// Cyclic visiting order.
    Tour(Vec<usize>),
}

impl Solution {
    pub fn edge_cut(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Solution::EdgeCut(ids)
    }

    pub fn node_cut(mut vs: Vec<usize>) -> Self {
        vs.sort_unstable();
        vs.dedup();
        Solution::NodeCut(vs)
    }

    pub fn independent_set(mut vs: Vec<usize>) -> Self {
        vs.sort_unstable();
        vs.dedup();
        Solution::IndependentSet(vs)
    }

    /// Clustering with every point sent to its nearest chosen center.
    pub fn clustering(inst: &MetricInstance, mut centers: Vec<usize>) -> Self {
        centers.sort_unstable();
        centers.dedup();
        let assignment = (0..inst.n()).map(|u| inst.nearest(u, &centers)).collect();
        Solution::Clustering { centers, assignment }
    }

    /// The set of elements compared by the stability definitions, when the solution is a set.
    pub fn elements(&self) -> Option<&[usize]> {
        match self {
            Solution::EdgeCut(s) | Solution::NodeCut(s) | Solution::IndependentSet(s) => Some(s),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Solution::EdgeCut(_) => "edge_cut",
            Solution::NodeCut(_) => "node_cut",
            Solution::IndependentSet(_) => "independent_set",
            Solution::Clustering { .. } => "clustering",
            Solution::Tour(_) => "tour",
        }
    }
}

/// Unordered edge set `{min, max}` of a cyclic tour.
pub fn tour_edges(tour: &[usize]) -> BTreeSet<(usize, usize)> {
    let n = tour.len();
    (0..n)
        .map(|i| {
            let (a, b) = (tour[i], tour[(i + 1) % n]);
            (a.min(b), a.max(b))
        })
        .collect()
}

impl Instance {
    pub fn problem_name(&self) -> &'static str {
        match self {
            Instance::EdgeMc(_) => "edge_mc",
            Instance::NodeMc(_) => "node_mc",
            Instance::Mis(_) => "mis",
            Instance::KCenter(_) => "kcenter",
            Instance::KMedian(_) => "kmedian",
            Instance::Tsp(_) => "tsp",
        }
    }

    pub fn sense(&self) -> Sense {
        match self {
            Instance::Mis(_) => Sense::Maximize,
            _ => Sense::Minimize,
        }
    }

    /// Feasibility per problem definition. Errors only when the solution kind is wrong
    /// or refers to ids that do not exist.
    pub fn check_feasible(&self, sol: &Solution) -> Result<bool> {
        match (self, sol) {
            (Instance::EdgeMc(inst), Solution::EdgeCut(ids)) => {
                if let Some(&id) = ids.iter().find(|&&id| id >= inst.graph.edges.len()) {
                    return Err(ModelError::Malformed(format!("edge id {id} out of range")));
                }
                Ok(inst.partition_from_cut(ids).is_ok())
            }
            (Instance::NodeMc(inst), Solution::NodeCut(vs)) => {
                check_ids(vs, inst.graph.n)?;
                Ok(inst.separates(vs))
            }
            (Instance::Mis(g), Solution::IndependentSet(vs)) => {
                check_ids(vs, g.n)?;
                Ok(is_set(vs) && g.is_independent(vs))
            }
            (Instance::KCenter(m) | Instance::KMedian(m), Solution::Clustering { centers, assignment }) => {
                check_ids(centers, m.num_candidates())?;
                check_ids(assignment, m.num_candidates())?;
                Ok(is_set(centers)
                    && !centers.is_empty()
                    && centers.len() <= m.k
                    && assignment.len() == m.n()
                    && assignment.iter().all(|c| centers.contains(c)))
            }
            (Instance::Tsp(m), Solution::Tour(t)) => {
                check_ids(t, m.n)?;
                let distinct: BTreeSet<usize> = t.iter().copied().collect();
                Ok(m.n >= 3 && t.len() == m.n && distinct.len() == m.n)
            }
            _ => Err(ModelError::VariantMismatch),
        }
    }

    /// Exact objective of a feasible solution.
    pub fn solution_cost(&self, sol: &Solution) -> Result<Rational> {
        if !self.check_feasible(sol)? {
            return Err(ModelError::Infeasible);
        }
        Ok(match (self, sol) {
            (Instance::EdgeMc(inst), Solution::EdgeCut(ids)) => {
                ids.iter().map(|&id| &inst.graph.edges[id].w).sum()
            }
            (Instance::NodeMc(inst), Solution::NodeCut(vs)) => inst.graph.weight_of(vs),
            (Instance::Mis(g), Solution::IndependentSet(vs)) => g.weight_of(vs),
            (Instance::KCenter(m), Solution::Clustering { assignment, .. }) => assignment
                .iter()
                .enumerate()
                .map(|(u, &c)| m.to_center(u, c).clone())
                .max()
                .unwrap_or_else(Rational::zero),
            (Instance::KMedian(m), Solution::Clustering { assignment, .. }) => {
                assignment.iter().enumerate().map(|(u, &c)| m.to_center(u, c)).sum()
            }
            (Instance::Tsp(m), Solution::Tour(t)) => {
                let n = t.len();
                (0..n).map(|i| m.dist(t[i], t[(i + 1) % n])).sum()
            }
            _ => unreachable!("checked by check_feasible"),
        })
    }

    /// Per-element weights used by set-difference stability ratios.
    pub fn element_weight(&self, sol: &Solution, x: usize) -> Option<Rational> {
        match (self, sol) {
            (Instance::EdgeMc(i), Solution::EdgeCut(_)) => Some(i.graph.edges[x].w.clone()),
            (Instance::NodeMc(i), Solution::NodeCut(_)) => Some(i.graph.weights[x].clone()),
            (Instance::Mis(g), Solution::IndependentSet(_)) => Some(g.weights[x].clone()),
            _ => None,
        }
    }
}

fn check_ids(ids: &[usize], bound: usize) -> Result<()> {
    match ids.iter().find(|&&v| v >= bound) {
        Some(v) => Err(ModelError::Malformed(format!("id {v} out of range"))),
        None => Ok(()),
    }
}

fn is_set(vs: &[usize]) -> bool {
    vs.windows(2).all(|w| w[0] < w[1])
}

/// One point in the support of an enumerated rounding distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingOutcome<T> {
    pub outcome: T,
    pub probability: Rational,
}

/// Answer of a robust algorithm: the optimum, or a proof-backed refusal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Optimal(Solution),
    NotStable,
}

impl Verdict {
    pub fn is_optimal(&self) -> bool {
        matches!(self, Verdict::Optimal(_))
    }

    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Verdict::Optimal(s) => Some(s),
            Verdict::NotStable => None,
        }
    }
}

/// Verdict plus the relaxation value that backed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustReport {
    pub verdict: Verdict,
    pub lp_value: Rational,
}

/// Path-compressed, union-by-size disjoint sets.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn path_mc() -> MultiwayCutInstance {
        let g = EdgeWeightedGraph::new(3, vec![(0, 1, q(1, 1)), (1, 2, q(1, 1))]).unwrap();
        MultiwayCutInstance::new(g, vec![0, 2]).unwrap()
    }

    #[test]
    fn path_cut_feasibility() {
        let inst = Instance::EdgeMc(path_mc());
        assert!(inst.check_feasible(&Solution::edge_cut(vec![0])).unwrap());
        assert!(!inst.check_feasible(&Solution::edge_cut(vec![])).unwrap());
        assert_eq!(inst.solution_cost(&Solution::edge_cut(vec![0])).unwrap(), q(1, 1));
        assert!(inst.solution_cost(&Solution::edge_cut(vec![])).is_err());
    }

    #[test]
    fn mis_edge_pair_is_infeasible() {
        let g = VertexWeightedGraph::unit(2, vec![(0, 1)]).unwrap();
        let inst = Instance::Mis(g);
        assert!(!inst.check_feasible(&Solution::independent_set(vec![0, 1])).unwrap());
        assert_eq!(inst.solution_cost(&Solution::independent_set(vec![])).unwrap(), q(0, 1));
    }

    #[test]
    fn variant_mismatch_is_an_error() {
        let inst = Instance::EdgeMc(path_mc());
        assert_eq!(
            inst.check_feasible(&Solution::Tour(vec![0, 1, 2])),
            Err(ModelError::VariantMismatch)
        );
    }

    #[test]
    fn graph_validation() {
        assert!(EdgeWeightedGraph::new(2, vec![(0, 0, q(1, 1))]).is_err());
        assert!(EdgeWeightedGraph::new(2, vec![(0, 1, q(0, 1))]).is_err());
        assert!(EdgeWeightedGraph::new(2, vec![(0, 1, q(1, 1)), (1, 0, q(1, 1))]).is_err());
        let g = EdgeWeightedGraph::new(3, vec![(0, 1, q(1, 1))]).unwrap();
        assert_eq!(MultiwayCutInstance::new(g, vec![0, 1]), Err(ModelError::Disconnected));
        let vg = VertexWeightedGraph::unit(3, vec![(0, 1)]).unwrap();
        assert!(NodeCutInstance::new(vg, vec![0, 1]).is_err());
    }

    #[test]
    fn metric_validation() {
        let ok = Metric::new(vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]);
        assert!(ok.is_ok());
        let tri = Metric::new(vec![
            vec![q(0, 1), q(1, 1), q(3, 1)],
            vec![q(1, 1), q(0, 1), q(1, 1)],
            vec![q(3, 1), q(1, 1), q(0, 1)],
        ]);
        assert!(tri.is_err());
    }

    #[test]
    fn canonical_cut_drops_redundant_edges() {
        // triangle 0-1-2 with terminals 0, 2 plus pendant 3 on 1
        let g = EdgeWeightedGraph::new(
            4,
            vec![(0, 1, q(1, 1)), (1, 2, q(1, 1)), (0, 2, q(1, 1)), (1, 3, q(1, 1))],
        )
        .unwrap();
        let inst = MultiwayCutInstance::new(g, vec![0, 2]).unwrap();
        assert_eq!(inst.canonical_cut(&[1, 2, 3]).unwrap(), vec![1, 2]);
    }

    #[test]
    fn tour_feasibility_and_cost() {
        let one = q(1, 1);
        let z = q(0, 1);
        let m = Metric::new(vec![
            vec![z.clone(), one.clone(), one.clone()],
            vec![one.clone(), z.clone(), one.clone()],
            vec![one.clone(), one.clone(), z.clone()],
        ])
        .unwrap();
        let inst = Instance::Tsp(m);
        assert_eq!(inst.solution_cost(&Solution::Tour(vec![0, 2, 1])).unwrap(), q(3, 1));
        assert!(!inst.check_feasible(&Solution::Tour(vec![0, 0, 1])).unwrap());
    }

    proptest! {
        #[test]
        fn cost_scales_linearly(ws in proptest::collection::vec(1i64..50, 4), lam in 1i64..20, num in 1i64..5) {
            let lam = q(lam, num);
            let edges = vec![(0, 1), (1, 2), (2, 3), (0, 3)];
            let mk = |scale: &Rational| {
                let es = edges.iter().zip(&ws).map(|(&(u, v), &w)| (u, v, q(w, 1) * scale)).collect();
                Instance::EdgeMc(MultiwayCutInstance::new(EdgeWeightedGraph::new(4, es).unwrap(), vec![0, 2]).unwrap())
            };
            let a = mk(&Rational::one());
            let b = mk(&lam);
            let sol = Solution::edge_cut(vec![0, 3]);
            prop_assert_eq!(b.solution_cost(&sol).unwrap(), a.solution_cost(&sol).unwrap() * &lam);
        }
    }
}
