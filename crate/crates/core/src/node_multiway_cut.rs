//! Node multiway cut: the path LP solved by separation, the half-integral
//! rounding, the robust algorithm, the star gap family and the reduction from
//! vertex cover.

use std::collections::BTreeSet;

use crate::lp::{self, Constraint, LpError, LpProblem, LpSolution, Relation, SeparationOracle};
use crate::model::{
    Instance, ModelError, NodeCutInstance, RobustReport, RoundingOutcome, Sense, Solution, Verdict, VertexWeightedGraph,
};
use crate::rational::Rational;
use crate::stability_oracle::{self, EnumerationBudget, OracleError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NodeMcError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("solution is not half-integral at vertex {0}")]
    NotHalfIntegral(usize),
    #[error("solution violates a terminal path")]
    Infeasible,
    #[error("source instance has several optimal cuts")]
    MultipleOptima,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, NodeMcError>;

/// Cutting-plane rounds allowed per solve. Each round adds one path.
pub const MAX_SEPARATION_ROUNDS: usize = 20_000;

/// Node-weighted shortest distances from `src`, where a path costs the sum of `x`
/// over its vertices. Returns distances and predecessors.
fn node_dijkstra(g: &VertexWeightedGraph, x: &[Rational], src: usize) -> (Vec<Option<Rational>>, Vec<usize>) {
    let n = g.n;
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    dist[src] = Some(x[src].clone());
    loop {
        let mut best: Option<usize> = None;
        for v in 0..n {
            if !done[v] {
                if let Some(d) = &dist[v] {
                    if best.map_or(true, |b| d < dist[b].as_ref().unwrap()) {
                        best = Some(v);
                    }
                }
            }
        }
        let Some(u) = best else { break };
        done[u] = true;
        let du = dist[u].clone().unwrap();
        for &v in g.neighbors(u) {
            if done[v] {
                continue;
            }
            let cand = &du + &x[v];
            if dist[v].as_ref().map_or(true, |d| cand < *d) {
                dist[v] = Some(cand);
                pred[v] = u;
            }
        }
    }
    (dist, pred)
}

/// Separates `Σ_{u∈P} x_u ≥ 1` over all terminal-to-terminal paths `P`, returning the
/// shortest violated path. Variable `u` is vertex `u`.
pub struct PathOracle<'a> {
    pub instance: &'a NodeCutInstance,
}

impl SeparationOracle for PathOracle<'_> {
    fn separate(&mut self, x: &[Rational]) -> Option<Constraint> {
        let inst = self.instance;
        let one = Rational::one();
        let mut best: Option<(Rational, Vec<usize>)> = None;
        for (i, &s) in inst.terminals.iter().enumerate() {
            let (dist, pred) = node_dijkstra(&inst.graph, &x[..inst.graph.n], s);
            for &t in &inst.terminals[i + 1..] {
                let Some(d) = &dist[t] else { continue };
                if *d < one && best.as_ref().map_or(true, |(b, _)| d < b) {
                    let mut path = vec![];
                    let mut v = pred[t];
                    while v != s {
                        path.push(v);
                        v = pred[v];
                    }
                    best = Some((d.clone(), path));
                }
            }
        }
        best.map(|(_, mut path)| {
            path.sort();
            Constraint::new(path.into_iter().map(|v| (v, Rational::one())).collect(), Relation::Ge, Rational::one())
        })
    }
}

/// The path LP with no rows yet: `x_u ∈ [0,1]`, terminals pinned to 0, objective
/// `Σ w_u x_u`. Rows come from [`PathOracle`].
pub fn build_node_lp(inst: &NodeCutInstance) -> LpProblem {
    let mut p = LpProblem::new(Sense::Minimize);
    for v in 0..inst.graph.n {
        let x = p.add_var(inst.graph.weights[v].clone());
        let hi = if inst.is_terminal(v) { Rational::zero() } else { Rational::one() };
        p.set_bounds(x, Some(Rational::zero()), Some(hi));
    }
    p
}

/// Solves the path LP; the returned problem carries every separated row.
pub fn solve_node_lp(inst: &NodeCutInstance) -> Result<(LpProblem, LpSolution)> {
    let mut p = build_node_lp(inst);
    let sol = lp::solve_with_cuts(&mut p, &mut PathOracle { instance: inst }, MAX_SEPARATION_ROUNDS)?;
    Ok((p, sol))
}

/// A half-integral LP point split into its three levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfIntegralNodeSolution {
    pub x: Vec<Rational>,
    pub v0: Vec<usize>,
    pub v_half: Vec<usize>,
    pub v1: Vec<usize>,
}

impl HalfIntegralNodeSolution {
    /// Checks the levels, pinned terminals and every path row.
    pub fn new(inst: &NodeCutInstance, x: Vec<Rational>) -> Result<Self> {
        if x.len() != inst.graph.n {
            return Err(NodeMcError::InvalidParameter("one value per vertex expected".into()));
        }
        let half = Rational::new(1, 2);
        let (mut v0, mut v_half, mut v1) = (vec![], vec![], vec![]);
        for (u, val) in x.iter().enumerate() {
            if val.is_zero() {
                v0.push(u);
            } else if *val == half {
                v_half.push(u);
            } else if val.is_one() {
                v1.push(u);
            } else {
                return Err(NodeMcError::NotHalfIntegral(u));
            }
        }
        if inst.terminals.iter().any(|&t| !x[t].is_zero()) || (PathOracle { instance: inst }).separate(&x).is_some() {
            return Err(NodeMcError::Infeasible);
        }
        Ok(HalfIntegralNodeSolution { x, v0, v_half, v1 })
    }

    pub fn cost(&self, inst: &NodeCutInstance) -> Rational {
        (0..inst.graph.n).map(|u| &inst.graph.weights[u] * &self.x[u]).sum()
    }

    /// `B_i`: zero-valued vertices joined to `s_i` by a path of zero-valued vertices.
    pub fn zero_balls(&self, inst: &NodeCutInstance) -> Vec<BTreeSet<usize>> {
        let zero: BTreeSet<usize> = self.v0.iter().copied().collect();
        inst.terminals
            .iter()
            .map(|&s| {
                let mut ball = BTreeSet::from([s]);
                let mut stack = vec![s];
                while let Some(u) = stack.pop() {
                    for &v in inst.graph.neighbors(u) {
                        if zero.contains(&v) && ball.insert(v) {
                            stack.push(v);
                        }
                    }
                }
                ball
            })
            .collect()
    }

    /// `δ(B_i)`: half-valued neighbors of each ball.
    pub fn ball_boundaries(&self, inst: &NodeCutInstance) -> Vec<BTreeSet<usize>> {
        let half: BTreeSet<usize> = self.v_half.iter().copied().collect();
        self.zero_balls(inst)
            .iter()
            .map(|ball| {
                ball.iter()
                    .flat_map(|&u| inst.graph.neighbors(u).iter().copied())
                    .filter(|v| half.contains(v))
                    .collect()
            })
            .collect()
    }
}

/// Solves the path LP and returns a half-integral optimum. A basic optimum that is
/// not half-integral is re-solved over the optimal face with perturbed objectives;
/// if every attempt fails the error reports the offending vertex.
pub fn solve_half_integral(inst: &NodeCutInstance) -> Result<(LpProblem, LpSolution, HalfIntegralNodeSolution)> {
    let (p, sol) = solve_node_lp(inst)?;
    let n = inst.graph.n;
    let first_err = match HalfIntegralNodeSolution::new(inst, sol.values[..n].to_vec()) {
        Ok(h) => return Ok((p, sol, h)),
        Err(e) => e,
    };
    let perturbations: [fn(usize, usize) -> Rational; 3] = [
        |_, _| Rational::one(),
        |u, n| Rational::one() + Rational::new(u as i64, (n + 1) as i64),
        |u, n| Rational::from_int(2) - Rational::new(u as i64, (n + 1) as i64),
    ];
    for f in perturbations {
        let mut face = lp::optimal_face(&p, &sol.objective);
        face.objective = (0..n).map(|u| f(u, n)).collect();
        face.objective_offset = Rational::zero();
        let alt = lp::solve_with_cuts(&mut face, &mut PathOracle { instance: inst }, MAX_SEPARATION_ROUNDS)?;
        if let Ok(h) = HalfIntegralNodeSolution::new(inst, alt.values[..n].to_vec()) {
            let values = h.x.clone();
            let fixed = LpSolution { values, ..sol };
            return Ok((p, fixed, h));
        }
    }
    Err(first_err)
}

/// One outcome per choice of the spared terminal `j*`, each with probability `1/k`:
/// `V_1` together with `δ(B_i)` for every `i ≠ j*`.
pub fn half_integral_rounding(
    inst: &NodeCutInstance,
    sol: &HalfIntegralNodeSolution,
) -> Vec<RoundingOutcome<Vec<usize>>> {
    let k = inst.k();
    let bounds = sol.ball_boundaries(inst);
    let p = Rational::from(k).recip();
    (0..k)
        .map(|j| {
            let mut cut: BTreeSet<usize> = sol.v1.iter().copied().collect();
            for (i, b) in bounds.iter().enumerate() {
                if i != j {
                    cut.extend(b);
                }
            }
            RoundingOutcome { outcome: cut.into_iter().collect(), probability: p.clone() }
        })
        .collect()
}

/// Solve the path LP; answer with its cut iff the optimum is integral and unique.
pub fn robust_solve_node(inst: &NodeCutInstance) -> Result<RobustReport> {
    let (p, sol) = solve_node_lp(inst)?;
    let vars = inst.non_terminals();
    let verdict = if lp::is_integral(&sol, &vars)
        && lp::is_unique_integral_optimum(&p, &sol, &vars, &mut PathOracle { instance: inst }, MAX_SEPARATION_ROUNDS)?
    {
        Verdict::Optimal(Solution::node_cut(vars.into_iter().filter(|&u| sol.values[u].is_one()).collect()))
    } else {
        Verdict::NotStable
    };
    Ok(RobustReport { verdict, lp_value: sol.objective })
}

/// Star gap family on `2k + 1` vertices: terminal `s_i = i`, spoke `u_i = k + i` and
/// center `c = 2k`. Spokes weigh 1 except the last, which weighs `k − 1 − eps/2`;
/// the center weighs `k³`. Terminals weigh 1 and are never cut.
pub fn gen_node_star_gap(k: usize, eps: &Rational) -> Result<NodeCutInstance> {
    let kk = Rational::from(k);
    if k < 3 || !eps.is_positive() || *eps >= &kk - Rational::one() {
        return Err(NodeMcError::InvalidParameter("need k >= 3 and 0 < eps < k - 1".into()));
    }
    let mut weights = vec![Rational::one(); 2 * k + 1];
    weights[2 * k - 1] = &kk - Rational::one() - eps / Rational::from_int(2);
    weights[2 * k] = &kk * &kk * &kk;
    let mut edges = vec![];
    for i in 0..k {
        edges.push((i, k + i));
        edges.push((k + i, 2 * k));
    }
    Ok(NodeCutInstance::new(VertexWeightedGraph::new(weights, edges)?, (0..k).collect())?)
}

/// Divides the weight of every vertex of the optimal cut by `gamma`. When `optimum`
/// is `None` the optimum is found by enumeration and must be unique.
pub fn gen_node_stable_from_opt(
    inst: &NodeCutInstance,
    gamma: &Rational,
    optimum: Option<&[usize]>,
) -> Result<NodeCutInstance> {
    if *gamma <= Rational::one() {
        return Err(NodeMcError::InvalidParameter("gamma must exceed 1".into()));
    }
    let opt: Vec<usize> = match optimum {
        Some(c) => c.to_vec(),
        None => {
            let (sol, _, ties) =
                stability_oracle::brute_force_optimum(&Instance::NodeMc(inst.clone()), &EnumerationBudget::default())?;
            if !ties.is_empty() {
                return Err(NodeMcError::MultipleOptima);
            }
            sol.elements().expect("node cut").to_vec()
        }
    };
    let mut w = inst.graph.weights.clone();
    for u in opt {
        if u >= w.len() || inst.is_terminal(u) {
            return Err(NodeMcError::InvalidParameter(format!("vertex {u} cannot be cut")));
        }
        w[u] = &w[u] / gamma;
    }
    Ok(NodeCutInstance { graph: inst.graph.with_weights(w)?, terminals: inst.terminals.clone() })
}

/// Attaches a pendant terminal `n + i` to every vertex `i`. Vertex covers of the input
/// are exactly the node multiway cuts of the output, with the same weight. Needs at
/// least two vertices, since a cut instance needs two terminals.
pub fn reduce_vc_to_node_mc(g: &VertexWeightedGraph) -> Result<NodeCutInstance> {
    let n = g.n;
    let mut weights = g.weights.clone();
    weights.extend(std::iter::repeat(Rational::one()).take(n));
    let mut edges = g.edges.clone();
    edges.extend((0..n).map(|i| (i, n + i)));
    let graph = VertexWeightedGraph::new(weights, edges)?;
    Ok(NodeCutInstance::new(graph, (n..2 * n).collect())?)
}
