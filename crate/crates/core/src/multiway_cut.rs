//! Edge multiway cut: the CKR simplex relaxation, the robust solve-and-check
//! algorithm, an exactly enumerated ε-local rounding, the weakly-stable local
//! search, and generators for stable and gap instances.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lp::{self, LpError, LpProblem, LpSolution, NoSeparation, Relation};
use crate::model::{
    EdgeWeightedGraph, Instance, ModelError, MultiwayCutInstance, RobustReport, RoundingOutcome, Sense, Solution,
    Verdict,
};
use crate::rational::Rational;
use crate::stability_oracle::{self, EnumerationBudget, OracleError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum McError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("assignment is not ε-close to an integral one (vertex {0})")]
    NotEpsClose(usize),
    #[error("edge weights must be integers")]
    NonIntegerWeights,
    #[error("source instance has several optimal cuts")]
    MultipleOptima,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, McError>;

/// Where each CKR quantity lives in the LP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkrLayout {
    pub k: usize,
    /// Simplex coordinates per vertex; `None` for terminals, which are pinned to `e_j`.
    pub u_vars: Vec<Option<Vec<usize>>>,
    /// `t_{e,i} ≥ u_i − v_i` per edge between two non-terminals.
    pub aux: Vec<Option<Vec<usize>>>,
}

impl CkrLayout {
    /// All simplex-coordinate variables.
    pub fn simplex_vars(&self) -> Vec<usize> {
        self.u_vars.iter().flatten().flatten().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CkrLp {
    pub problem: LpProblem,
    pub layout: CkrLayout,
}

/// Builds the CKR relaxation. Terminal coordinates are substituted out: an edge from
/// `s_j` to `v` has length `1 − v_j`, and an edge between two non-terminals has
/// length `Σ_i max(0, u_i − v_i)`, which equals half the L1 distance on the simplex.
pub fn build_ckr(inst: &MultiwayCutInstance) -> Result<CkrLp> {
    let k = inst.k();
    if k < 2 {
        return Err(McError::Model(ModelError::TooFewTerminals));
    }
    let n = inst.graph.n;
    let mut p = LpProblem::new(Sense::Minimize);
    let mut u_vars = vec![None; n];
    for v in 0..n {
        if inst.terminal_index(v).is_none() {
            let vars: Vec<usize> = (0..k).map(|_| p.add_var(Rational::zero())).collect();
            p.add_constraint(vars.iter().map(|&x| (x, Rational::one())).collect(), Relation::Eq, Rational::one());
            u_vars[v] = Some(vars);
        }
    }
    let mut aux = vec![None; inst.graph.edges.len()];
    for (id, e) in inst.graph.edges.iter().enumerate() {
        match (inst.terminal_index(e.u), inst.terminal_index(e.v)) {
            (Some(_), Some(_)) => p.objective_offset += &e.w,
            (Some(j), None) | (None, Some(j)) => {
                let free = if inst.terminal_index(e.u).is_some() { e.v } else { e.u };
                let xj = u_vars[free].as_ref().expect("non-terminal")[j];
                p.objective_offset += &e.w;
                p.objective[xj] -= &e.w;
            }
            (None, None) => {
                let (uu, vv) = (u_vars[e.u].clone().unwrap(), u_vars[e.v].clone().unwrap());
                let ts: Vec<usize> = (0..k).map(|_| p.add_var(e.w.clone())).collect();
                for i in 0..k {
                    p.add_constraint(
                        vec![(ts[i], Rational::one()), (uu[i], -Rational::one()), (vv[i], Rational::one())],
                        Relation::Ge,
                        Rational::zero(),
                    );
                }
                aux[id] = Some(ts);
            }
        }
    }
    Ok(CkrLp { problem: p, layout: CkrLayout { k, u_vars, aux } })
}

/// A point of the CKR relaxation: one simplex vector per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkrAssignment {
    pub k: usize,
    pub vectors: Vec<Vec<Rational>>,
}

impl CkrAssignment {
    pub fn from_lp(inst: &MultiwayCutInstance, layout: &CkrLayout, values: &[Rational]) -> Self {
        let vectors = (0..inst.graph.n)
            .map(|v| match (&layout.u_vars[v], inst.terminal_index(v)) {
                (Some(vars), _) => vars.iter().map(|&x| values[x].clone()).collect(),
                (None, Some(j)) => unit(layout.k, j),
                (None, None) => unreachable!("every vertex is a terminal or has variables"),
            })
            .collect();
        CkrAssignment { k: layout.k, vectors }
    }

    /// Integral assignment of a labeling.
    pub fn from_labels(k: usize, labels: &[usize]) -> Self {
        CkrAssignment { k, vectors: labels.iter().map(|&l| unit(k, l)).collect() }
    }

    /// `½‖ū − v̄‖₁`.
    pub fn distance(&self, u: usize, v: usize) -> Rational {
        let s: Rational = self.vectors[u].iter().zip(&self.vectors[v]).map(|(a, b)| (a - b).abs()).sum();
        s / Rational::from_int(2)
    }

    pub fn is_integral(&self) -> bool {
        self.vectors.iter().flatten().all(|x| x.is_zero() || x.is_one())
    }

    /// Labels when integral.
    pub fn labels(&self) -> Option<Vec<usize>> {
        self.vectors.iter().map(|v| v.iter().position(|x| x.is_one())).collect()
    }

    pub fn is_eps_close(&self, eps: &Rational) -> bool {
        let hi = Rational::one() - eps;
        self.vectors.iter().flatten().all(|x| x <= eps || *x >= hi)
    }

    /// Coordinate closest to 1; unique for ε-close points with ε < 1/2.
    pub fn j(&self, u: usize) -> usize {
        let v = &self.vectors[u];
        (0..self.k).fold(0, |b, i| if v[i] > v[b] { i } else { b })
    }

    /// `(1 − ε)·self + ε·other`.
    pub fn blend(&self, other: &Self, eps: &Rational) -> Self {
        let keep = Rational::one() - eps;
        let vectors = self
            .vectors
            .iter()
            .zip(&other.vectors)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| &keep * x + eps * y).collect())
            .collect();
        CkrAssignment { k: self.k, vectors }
    }

    /// `Σ_e w_e d(e)`.
    pub fn cost(&self, inst: &MultiwayCutInstance) -> Rational {
        inst.graph.edges.iter().map(|e| &e.w * self.distance(e.u, e.v)).sum()
    }
}

fn unit(k: usize, j: usize) -> Vec<Rational> {
    (0..k).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect()
}

/// Solves the CKR relaxation and returns the LP solution with its assignment.
pub fn solve_ckr(inst: &MultiwayCutInstance) -> Result<(CkrLp, LpSolution, CkrAssignment)> {
    let ckr = build_ckr(inst)?;
    let sol = lp::solve(&ckr.problem)?;
    let a = CkrAssignment::from_lp(inst, &ckr.layout, &sol.values);
    Ok((ckr, sol, a))
}

/// Solve the relaxation; answer with its cut iff the optimum is integral and unique.
pub fn robust_solve(inst: &MultiwayCutInstance) -> Result<RobustReport> {
    let (ckr, sol, a) = solve_ckr(inst)?;
    let lp_value = sol.objective.clone();
    let verdict = match a.labels() {
        Some(labels)
            if lp::is_unique_integral_optimum(&ckr.problem, &sol, &ckr.layout.simplex_vars(), &mut NoSeparation, 0)? =>
        {
            Verdict::Optimal(Solution::EdgeCut(inst.canonical_cut(&inst.boundary(&labels))?))
        }
        _ => Verdict::NotStable,
    };
    Ok(RobustReport { verdict, lp_value })
}

/// Parameters of the ε-local rounding for `k` terminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingParams {
    pub k: usize,
    pub p: Rational,
    pub theta: Rational,
    pub eps: Rational,
    pub alpha: Rational,
    pub beta: Rational,
}

impl RoundingParams {
    pub fn for_k(k: usize) -> Self {
        let kk = Rational::from(k);
        let theta = Rational::new(6, 5) / &kk;
        let alpha = Rational::from_int(2) * (&kk - Rational::one()) / (&kk * &kk * &theta);
        let beta = &kk * &theta;
        RoundingParams { k, p: kk.recip(), eps: Rational::new(1, 10) / &kk, theta, alpha, beta }
    }
}

#[derive(Clone, Copy)]
enum Rule {
    A,
    B,
}

/// Exact output distribution of the rounding, one outcome per distinct partition.
///
/// Outcomes are vertex labels (terminal indices). For each rule and each `i`, the
/// outcome only changes when `r` crosses a breakpoint (`1 − u_{j(u)}` for rule A, `u_i`
/// for rule B), so each open interval between breakpoints contributes its length over θ.
pub fn epsilon_local_rounding(
    inst: &MultiwayCutInstance,
    a: &CkrAssignment,
    params: &RoundingParams,
) -> Result<Vec<RoundingOutcome<Vec<usize>>>> {
    if a.k != inst.k() || params.k != inst.k() || a.vectors.len() != inst.graph.n {
        return Err(McError::InvalidParameter("assignment does not match the instance".into()));
    }
    let hi = Rational::one() - &params.eps;
    for (u, v) in a.vectors.iter().enumerate() {
        if v.iter().any(|x| !(x <= &params.eps || *x >= hi)) {
            return Err(McError::NotEpsClose(u));
        }
    }
    let k = a.k;
    let n = a.vectors.len();
    let js: Vec<usize> = (0..n).map(|u| a.j(u)).collect();
    let theta = &params.theta;
    let kinv = Rational::from(k).recip();
    let mut dist: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    for rule in [Rule::A, Rule::B] {
        let rule_p = match rule {
            Rule::A => params.p.clone(),
            Rule::B => Rational::one() - &params.p,
        };
        for i in 0..k {
            let mut cuts: Vec<Rational> = vec![Rational::zero(), theta.clone()];
            for u in 0..n {
                let b = match rule {
                    Rule::A => Rational::one() - &a.vectors[u][js[u]],
                    Rule::B => a.vectors[u][i].clone(),
                };
                if b.is_positive() && b < *theta {
                    cuts.push(b);
                }
            }
            cuts.sort();
            cuts.dedup();
            for w in cuts.windows(2) {
                let r = (&w[0] + &w[1]) / Rational::from_int(2);
                let labels: Vec<usize> = (0..n)
                    .map(|u| {
                        let to_j = match rule {
                            Rule::A => a.vectors[u][js[u]] >= Rational::one() - &r,
                            Rule::B => a.vectors[u][i] < r,
                        };
                        if to_j {
                            js[u]
                        } else {
                            i
                        }
                    })
                    .collect();
                let mass = &rule_p * &kinv * (&w[1] - &w[0]) / theta;
                *dist.entry(labels).or_insert_with(Rational::zero) += mass;
            }
        }
    }
    Ok(dist.into_iter().map(|(outcome, probability)| RoundingOutcome { outcome, probability }).collect())
}

/// Probability that the endpoints of `edge` end up in different parts.
pub fn cut_probability(inst: &MultiwayCutInstance, outcomes: &[RoundingOutcome<Vec<usize>>], edge: usize) -> Rational {
    let e = &inst.graph.edges[edge];
    outcomes.iter().filter(|o| o.outcome[e.u] != o.outcome[e.v]).map(|o| &o.probability).sum()
}

/// Result of one call to the improvement step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Improvement {
    /// The reweighted relaxation was integral; its cut lies in the neighborhood.
    LpIntegral(Vec<usize>),
    /// A strictly cheaper cut from the rounding support.
    Improved(Vec<usize>),
    /// No cut in the support beats the current one.
    Certified,
}

/// One improvement step from the current cut `current` (canonical edge ids).
pub fn improvement_step(inst: &MultiwayCutInstance, current: &[usize]) -> Result<Improvement> {
    let params = RoundingParams::for_k(inst.k());
    let ab = &params.alpha * &params.beta;
    let in_cur: std::collections::BTreeSet<usize> = current.iter().copied().collect();
    let mut edges = Vec::with_capacity(inst.graph.edges.len());
    for (id, e) in inst.graph.edges.iter().enumerate() {
        let w = if in_cur.contains(&id) { e.w.clone() } else { &ab * &e.w };
        edges.push((e.u, e.v, w));
    }
    let reweighted = MultiwayCutInstance { graph: EdgeWeightedGraph::new(inst.graph.n, edges)?, terminals: inst.terminals.clone() };
    let (_, _, x) = solve_ckr(&reweighted)?;
    if let Some(labels) = x.labels() {
        return Ok(Improvement::LpIntegral(inst.canonical_cut(&inst.boundary(&labels))?));
    }
    let labels = inst.partition_from_cut(current)?;
    let blended = CkrAssignment::from_labels(inst.k(), &labels).blend(&x, &params.eps);
    let outcomes = epsilon_local_rounding(inst, &blended, &params)?;
    let cost = |cut: &[usize]| -> Rational { cut.iter().map(|&id| &inst.graph.edges[id].w).sum() };
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for o in &outcomes {
        let cut = inst.canonical_cut(&inst.boundary(&o.outcome))?;
        let c = cost(&cut);
        if best.as_ref().map_or(true, |(b, _)| c < *b) {
            best = Some((c, cut));
        }
    }
    let (bc, bcut) = best.expect("rounding support is never empty");
    Ok(if bc < cost(current) { Improvement::Improved(bcut) } else { Improvement::Certified })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeakTermination {
    LpIntegral,
    Certified,
    /// All `T` improvements ran; the iterate was picked by the geometric-decrease test.
    DecreaseTest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakReport {
    pub solution: Solution,
    pub cost: Rational,
    /// Improvement steps performed.
    pub iterations: usize,
    /// Iteration budget `T`.
    pub budget: usize,
    pub tau: Rational,
    pub termination: WeakTermination,
}

/// Smallest `m ≥ 0` with `(1/(1−τ))^m ≥ c`.
pub fn log_ceiling(tau: &Rational, c: &Rational) -> usize {
    let base = (Rational::one() - tau).recip();
    let mut acc = Rational::one();
    let mut m = 0;
    while acc < *c {
        acc = &acc * &base;
        m += 1;
    }
    m
}

/// Local search for weakly-stable instances with integer weights.
///
/// Starts from the cut that sends every non-terminal to the first terminal and runs at
/// most `T = ⌈log_{1/(1−τ)} C⁽⁰⁾⌉ + 2` improvement steps, `τ = εδ/(β(αβ+δ))`.
pub fn weakly_stable_solve(inst: &MultiwayCutInstance, delta: &Rational) -> Result<WeakReport> {
    if inst.graph.edges.iter().any(|e| !e.w.is_integer()) {
        return Err(McError::NonIntegerWeights);
    }
    if !delta.is_positive() {
        return Err(McError::InvalidParameter("delta must be positive".into()));
    }
    let params = RoundingParams::for_k(inst.k());
    let ab = &params.alpha * &params.beta;
    let tau = &params.eps * delta / (&params.beta * (&ab + delta));
    let cost = |cut: &[usize]| -> Rational { cut.iter().map(|&id| &inst.graph.edges[id].w).sum() };

    let mut labels = vec![0usize; inst.graph.n];
    for (j, &t) in inst.terminals.iter().enumerate() {
        labels[t] = j;
    }
    let start = inst.canonical_cut(&inst.boundary(&labels))?;
    let budget = log_ceiling(&tau, &cost(&start)) + 2;
    let mut iterates = vec![start];
    let finish = |cut: Vec<usize>, iterations, termination| WeakReport {
        cost: cost(&cut),
        solution: Solution::EdgeCut(cut),
        iterations,
        budget,
        tau: tau.clone(),
        termination,
    };
    for it in 0..budget {
        let cur = iterates.last().expect("nonempty").clone();
        match improvement_step(inst, &cur)? {
            Improvement::LpIntegral(cut) => return Ok(finish(cut, it + 1, WeakTermination::LpIntegral)),
            Improvement::Certified => return Ok(finish(cur, it + 1, WeakTermination::Certified)),
            Improvement::Improved(cut) => iterates.push(cut),
        }
    }
    let costs: Vec<Rational> = iterates.iter().map(|c| cost(c)).collect();
    let last = costs.last().expect("nonempty").clone();
    let keep = Rational::one() - &tau;
    let pick = (0..costs.len() - 1)
        .find(|&i| &costs[i + 1] - &last > &keep * (&costs[i] - &last))
        .unwrap_or(costs.len() - 1);
    Ok(finish(iterates.swap_remove(pick), budget, WeakTermination::DecreaseTest))
}

/// Divides the weight of every edge of the optimal cut by `gamma`. The result is
/// `(γ − ε)`-stable for every `ε ∈ (0, γ − 1)` with the same unique optimum.
///
/// When `optimum` is `None` the optimum is found by enumeration, which must be unique.
pub fn gen_stable_from_opt(
    inst: &MultiwayCutInstance,
    gamma: &Rational,
    optimum: Option<&[usize]>,
) -> Result<MultiwayCutInstance> {
    if *gamma <= Rational::one() {
        return Err(McError::InvalidParameter("gamma must exceed 1".into()));
    }
    let opt: Vec<usize> = match optimum {
        Some(c) => c.to_vec(),
        None => {
            let (sol, _, ties) =
                stability_oracle::brute_force_optimum(&Instance::EdgeMc(inst.clone()), &EnumerationBudget::default())?;
            if !ties.is_empty() {
                return Err(McError::MultipleOptima);
            }
            match sol {
                Solution::EdgeCut(c) => c,
                _ => unreachable!(),
            }
        }
    };
    let mut g = inst.graph.clone();
    for id in opt {
        let e = g.edges.get_mut(id).ok_or_else(|| McError::InvalidParameter(format!("edge {id} out of range")))?;
        e.w = &e.w / gamma;
    }
    Ok(MultiwayCutInstance { graph: g, terminals: inst.terminals.clone() })
}

/// Vertex id of pair `(i, j)`, `i < j`, in the gap construction on `k` terminals.
pub fn freund_karloff_pair_id(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < k);
    k + (0..i).map(|a| k - 1 - a).sum::<usize>() + (j - i - 1)
}

/// Terminals `0..k`, one vertex per pair `i < j` joined to both its terminals with
/// weight 1, and weight `3/(2k)` between pairs sharing exactly one index.
pub fn gen_freund_karloff(k: usize) -> Result<MultiwayCutInstance> {
    if k < 3 {
        return Err(McError::InvalidParameter("k must be at least 3".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let n = k + pairs.len();
    let light = Rational::new(3, 2) / Rational::from(k);
    let mut edges = Vec::new();
    for (p, &(i, j)) in pairs.iter().enumerate() {
        edges.push((i, k + p, Rational::one()));
        edges.push((j, k + p, Rational::one()));
    }
    for (p, &(i, j)) in pairs.iter().enumerate() {
        for (q, &(a, b)) in pairs.iter().enumerate().skip(p + 1) {
            let shared = [i == a, i == b, j == a, j == b].iter().filter(|&&x| x).count();
            if shared == 1 {
                edges.push((k + p, k + q, light.clone()));
            }
        }
    }
    Ok(MultiwayCutInstance::new(EdgeWeightedGraph::new(n, edges)?, (0..k).collect())?)
}

/// The optimal cut sending every pair vertex `(i, j)` to terminal `i`.
pub fn freund_karloff_optimal_cut(inst: &MultiwayCutInstance) -> Vec<usize> {
    let k = inst.k();
    let mut labels: Vec<usize> = (0..inst.graph.n).collect();
    for i in 0..k {
        for j in i + 1..k {
            labels[freund_karloff_pair_id(k, i, j)] = i;
        }
    }
    inst.boundary(&labels)
}

/// Random connected instance: a random spanning tree plus each other pair with
/// probability `density`, integer weights in `1..=max_weight`, terminals `0..k`.
pub fn gen_random(n: usize, k: usize, density: f64, max_weight: i64, seed: u64) -> Result<MultiwayCutInstance> {
    if k < 2 || k > n {
        return Err(McError::InvalidParameter(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = std::collections::BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        pairs.insert((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                pairs.insert((u, v));
            }
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(u, v)| (u, v, Rational::from_int(rng.gen_range(1..=max_weight))))
        .collect();
    Ok(MultiwayCutInstance::new(EdgeWeightedGraph::new(n, edges)?, (0..k).collect())?)
}

/// Multiplies all weights by the least common denominator, making them integers.
/// Stability margins and optimal cuts are unchanged.
pub fn scale_to_integer_weights(inst: &MultiwayCutInstance) -> MultiwayCutInstance {
    let lcm = inst.graph.edges.iter().fold(BigInt::one(), |acc, e| acc.lcm(&e.w.denom()));
    MultiwayCutInstance { graph: inst.graph.scaled(&Rational::from_bigint(lcm)), terminals: inst.terminals.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn path() -> MultiwayCutInstance {
        let g = EdgeWeightedGraph::new(3, vec![(0, 1, q(1, 1)), (1, 2, q(1, 1))]).unwrap();
        MultiwayCutInstance::new(g, vec![0, 2]).unwrap()
    }

    #[test]
    fn path_lp_is_one() {
        let (_, sol, a) = solve_ckr(&path()).unwrap();
        assert_eq!(sol.objective, q(1, 1));
        assert!(a.is_integral());
    }

    #[test]
    fn single_terminal_edge_is_constant() {
        let g = EdgeWeightedGraph::new(2, vec![(0, 1, q(5, 1))]).unwrap();
        let inst = MultiwayCutInstance::new(g, vec![0, 1]).unwrap();
        let rep = robust_solve(&inst).unwrap();
        assert_eq!(rep.lp_value, q(5, 1));
        assert_eq!(rep.verdict, Verdict::Optimal(Solution::EdgeCut(vec![0])));
    }

    #[test]
    fn freund_karloff_shape_and_lp() {
        let inst = gen_freund_karloff(3).unwrap();
        assert_eq!(inst.graph.n, 6);
        assert_eq!(inst.graph.edges.len(), 9);
        assert!(inst.graph.edges.iter().any(|e| e.w == q(1, 2)));
        let (_, sol, a) = solve_ckr(&inst).unwrap();
        assert_eq!(sol.objective, q(15, 4));
        assert!(!a.is_integral());
        let opt = freund_karloff_optimal_cut(&inst);
        assert_eq!(Instance::EdgeMc(inst).solution_cost(&Solution::EdgeCut(opt)).unwrap(), q(4, 1));
    }

    #[test]
    fn pair_ids_are_lexicographic() {
        assert_eq!(freund_karloff_pair_id(4, 0, 1), 4);
        assert_eq!(freund_karloff_pair_id(4, 0, 3), 6);
        assert_eq!(freund_karloff_pair_id(4, 1, 2), 7);
        assert_eq!(freund_karloff_pair_id(4, 2, 3), 9);
    }

    #[test]
    fn params_product() {
        for k in 3..=20 {
            let p = RoundingParams::for_k(k);
            let kk = Rational::from(k);
            assert_eq!(&p.alpha * &p.beta, Rational::from_int(2) - Rational::from_int(2) / kk);
            assert!(p.eps < p.theta);
        }
    }

    #[test]
    fn integral_assignment_rounds_to_itself() {
        let inst = path();
        let a = CkrAssignment::from_labels(2, &[0, 0, 1]);
        let out = epsilon_local_rounding(&inst, &a, &RoundingParams::for_k(2)).unwrap();
        assert_eq!(out, vec![RoundingOutcome { outcome: vec![0, 0, 1], probability: q(1, 1) }]);
    }

    #[test]
    fn close_pair_cut_probability_is_alpha_delta() {
        // terminals 0,1,2; u = 3, v = 4 both near e_0.
        let g = EdgeWeightedGraph::new(
            5,
            vec![(0, 3, q(1, 1)), (3, 4, q(1, 1)), (4, 1, q(1, 1)), (4, 2, q(1, 1))],
        )
        .unwrap();
        let inst = MultiwayCutInstance::new(g, vec![0, 1, 2]).unwrap();
        let mut a = CkrAssignment::from_labels(3, &[0, 1, 2, 0, 0]);
        a.vectors[3] = vec![q(49, 50), q(1, 100), q(1, 100)];
        a.vectors[4] = vec![q(19, 20), q(3, 100), q(1, 50)];
        // 19/20 sits outside [1 - 1/30, 1]; the rules only depend on θ, so widen ε.
        let strict = RoundingParams::for_k(3);
        assert_eq!(epsilon_local_rounding(&inst, &a, &strict), Err(McError::NotEpsClose(4)));
        let params = RoundingParams { eps: q(1, 20), ..strict };
        let out = epsilon_local_rounding(&inst, &a, &params).unwrap();
        assert_eq!(a.distance(3, 4), q(3, 100));
        assert_eq!(cut_probability(&inst, &out, 1), q(1, 30));
        assert_eq!(cut_probability(&inst, &out, 1), &params.alpha * q(3, 100));
        let total: Rational = out.iter().map(|o| &o.probability).sum();
        assert_eq!(total, q(1, 1));
        for o in &out {
            assert_eq!(&o.outcome[..3], &[0, 1, 2]);
        }
        assert!(out.len() <= 2 * 9 * 5);
    }

    #[test]
    fn rejects_far_assignment() {
        let inst = path();
        let mut a = CkrAssignment::from_labels(2, &[0, 0, 1]);
        a.vectors[1] = vec![q(1, 2), q(1, 2)];
        assert_eq!(epsilon_local_rounding(&inst, &a, &RoundingParams::for_k(2)), Err(McError::NotEpsClose(1)));
    }

    #[test]
    fn scaled_gap_instance_weights() {
        let fk = gen_freund_karloff(3).unwrap();
        let opt = freund_karloff_optimal_cut(&fk);
        let s = gen_stable_from_opt(&fk, &q(11, 10), Some(&opt)).unwrap();
        let ws: std::collections::BTreeSet<Rational> = opt.iter().map(|&id| s.graph.edges[id].w.clone()).collect();
        assert_eq!(ws.into_iter().collect::<Vec<_>>(), vec![q(5, 11), q(10, 11)]);
        let c = Instance::EdgeMc(s).solution_cost(&Solution::EdgeCut(opt)).unwrap();
        assert_eq!(c, q(40, 11));
        assert_eq!(gen_stable_from_opt(&fk, &q(11, 10), None), Err(McError::MultipleOptima));
    }

    #[test]
    fn log_ceiling_values() {
        assert_eq!(log_ceiling(&q(1, 2), &q(1, 1)), 0);
        assert_eq!(log_ceiling(&q(1, 2), &q(8, 1)), 3);
        assert_eq!(log_ceiling(&q(1, 2), &q(9, 1)), 4);
    }

    #[test]
    fn weak_solver_on_path_reaches_min_cut() {
        let g = EdgeWeightedGraph::new(4, vec![(0, 1, q(3, 1)), (1, 2, q(1, 1)), (2, 3, q(3, 1))]).unwrap();
        let inst = MultiwayCutInstance::new(g, vec![0, 3]).unwrap();
        let rep = weakly_stable_solve(&inst, &q(1, 1)).unwrap();
        assert_eq!(rep.cost, q(1, 1));
        assert!(rep.iterations <= rep.budget);
        let frac = MultiwayCutInstance { graph: inst.graph.scaled(&q(1, 2)), terminals: vec![0, 3] };
        assert_eq!(weakly_stable_solve(&frac, &q(1, 1)), Err(McError::NonIntegerWeights));
    }

    #[test]
    fn integer_scaling() {
        let fk = gen_freund_karloff(3).unwrap();
        let s = scale_to_integer_weights(&fk);
        assert!(s.graph.edges.iter().all(|e| e.w.is_integer()));
        assert_eq!(s.graph.edges[0].w, q(2, 1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn k2_lp_value_is_min_cut(seed in 0u64..1000) {
            let inst = gen_random(6, 2, 0.4, 9, seed).unwrap();
            let (_, sol, a) = solve_ckr(&inst).unwrap();
            prop_assert!(a.is_integral());
            let (_, opt, _) = stability_oracle::brute_force_optimum(
                &Instance::EdgeMc(inst), &EnumerationBudget::default()).unwrap();
            prop_assert_eq!(sol.objective, opt);
        }

        #[test]
        fn robust_never_errs(seed in 0u64..1000) {
            let inst = gen_random(6, 3, 0.4, 9, seed).unwrap();
            let rep = robust_solve(&inst).unwrap();
            let (opt, val, _) = stability_oracle::brute_force_optimum(
                &Instance::EdgeMc(inst.clone()), &EnumerationBudget::default()).unwrap();
            prop_assert!(rep.lp_value <= val);
            if let Verdict::Optimal(s) = rep.verdict {
                prop_assert_eq!(s, opt);
            }
        }
    }
}
