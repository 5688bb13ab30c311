//! Maximum weight independent set and its complement, vertex cover: the
//! standard LP, robust algorithms for bounded chromatic number, the greedy
//! algorithm, the recursive algorithm for unbounded degree, the Sherali–Adams
//! lift and a vertex cover estimator.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lp::{self, LpError, LpProblem, LpSolution, NoSeparation, Relation};
use crate::model::{Instance, ModelError, RobustReport, RoundingOutcome, Sense, Solution, Verdict, VertexWeightedGraph};
use crate::rational::Rational;
use crate::stability_oracle::{self, binomial, EnumerationBudget, OracleError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("solution is not half-integral at vertex {0}")]
    NotHalfIntegral(usize),
    #[error("coloring is not proper on edge ({0}, {1})")]
    ImproperColoring(usize, usize),
    #[error("Sherali-Adams level {t} on {n} vertices exceeds the size guard (n <= 14, t <= 3)")]
    TooLarge { n: usize, t: usize },
    #[error("source instance has several optimal sets")]
    MultipleOptima,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, MisError>;

/// A vertex coloring with colors `0..c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub c: usize,
}

impl Coloring {
    /// First monochromatic edge among those with both ends in `within` (all edges if `None`).
    pub fn conflict(&self, g: &VertexWeightedGraph, within: Option<&BTreeSet<usize>>) -> Option<(usize, usize)> {
        g.edges
            .iter()
            .copied()
            .filter(|(u, v)| within.map_or(true, |s| s.contains(u) && s.contains(v)))
            .find(|&(u, v)| self.colors[u] == self.colors[v])
    }

    pub fn is_proper(&self, g: &VertexWeightedGraph) -> bool {
        self.colors.len() == g.n && self.colors.iter().all(|&c| c < self.c) && self.conflict(g, None).is_none()
    }
}

/// `max Σ w_u x_u` subject to `x_u + x_v ≤ 1` per edge and `x ∈ [0,1]`; variable `u` is vertex `u`.
pub fn build_mis_lp(g: &VertexWeightedGraph) -> LpProblem {
    let mut p = LpProblem::new(Sense::Maximize);
    for u in 0..g.n {
        let x = p.add_var(g.weights[u].clone());
        p.set_bounds(x, Some(Rational::zero()), Some(Rational::one()));
    }
    for &(u, v) in &g.edges {
        p.add_constraint(vec![(u, Rational::one()), (v, Rational::one())], Relation::Le, Rational::one());
    }
    p
}

/// A half-integral LP point split into its three levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfIntegralSolution {
    pub x: Vec<Rational>,
    pub v0: Vec<usize>,
    pub v_half: Vec<usize>,
    pub v1: Vec<usize>,
}

impl HalfIntegralSolution {
    pub fn new(x: Vec<Rational>) -> Result<Self> {
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
                return Err(MisError::NotHalfIntegral(u));
            }
        }
        Ok(HalfIntegralSolution { x, v0, v_half, v1 })
    }

    pub fn is_integral(&self) -> bool {
        self.v_half.is_empty()
    }
}

/// Solves the standard LP and returns a half-integral optimum. Basic optima are
/// always half-integral; the face re-solve only guards against solver bugs.
pub fn solve_mis_lp(g: &VertexWeightedGraph) -> Result<(LpProblem, LpSolution, HalfIntegralSolution)> {
    let p = build_mis_lp(g);
    let sol = lp::solve(&p)?;
    match HalfIntegralSolution::new(sol.values.clone()) {
        Ok(h) => Ok((p, sol, h)),
        Err(e) => {
            let alt = lp::resolve_on_face(&p, &sol.objective, vec![Rational::one(); g.n], Sense::Minimize)?;
            let h = HalfIntegralSolution::new(alt.values.clone()).map_err(|_| e)?;
            Ok((p, LpSolution { values: alt.values, ..sol }, h))
        }
    }
}

/// Clique `K_k` weighted `(1, …, 1, k − 1 − eps/2)` plus `n − k` pendants on the heavy
/// vertex `k − 1`, each of weight `eps / (4(n − k))`. The LP is not integral even
/// though the instance is `(k − 1 − eps)`-stable.
pub fn gen_colorable_tight(k: usize, eps: &Rational, n: usize) -> Result<VertexWeightedGraph> {
    let kk = Rational::from(k);
    if k < 2 || n <= k || !eps.is_positive() || *eps >= &kk - Rational::one() {
        return Err(MisError::InvalidParameter("need k >= 2, n > k and 0 < eps < k - 1".into()));
    }
    let mut weights = vec![Rational::one(); k];
    weights[k - 1] = &kk - Rational::one() - eps / Rational::from_int(2);
    let pendant = eps / Rational::from((4 * (n - k)) as i64);
    weights.extend(std::iter::repeat(pendant).take(n - k));
    let mut edges = vec![];
    for u in 0..k {
        for v in u + 1..k {
            edges.push((u, v));
        }
    }
    edges.extend((k..n).map(|p| (k - 1, p)));
    Ok(VertexWeightedGraph::new(weights, edges)?)
}

/// Multiplies the weights of the optimal set by `gamma`, which makes the instance
/// stable for every factor below `gamma`. The optimum must be unique unless given.
pub fn gen_stable_from_opt(g: &VertexWeightedGraph, gamma: &Rational, optimum: Option<&[usize]>) -> Result<VertexWeightedGraph> {
    if *gamma <= Rational::one() {
        return Err(MisError::InvalidParameter("gamma must exceed 1".into()));
    }
    let opt: Vec<usize> = match optimum {
        Some(s) => s.to_vec(),
        None => {
            let (sol, _, ties) = stability_oracle::brute_force_optimum(&Instance::Mis(g.clone()), &EnumerationBudget::default())?;
            if !ties.is_empty() {
                return Err(MisError::MultipleOptima);
            }
            sol.elements().expect("independent set").to_vec()
        }
    };
    let mut w = g.weights.clone();
    for u in opt {
        w[u] = &w[u] * gamma;
    }
    Ok(g.with_weights(w)?)
}

/// Random graph with edge probability `density` and integer weights in `1..=max_weight`.
pub fn gen_random(n: usize, density: f64, max_weight: i64, seed: u64) -> Result<VertexWeightedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..n).map(|_| Rational::from_int(rng.gen_range(1..=max_weight.max(1)))).collect();
    let mut edges = vec![];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
    }
    Ok(VertexWeightedGraph::new(weights, edges)?)
}

/// Exact optimum on a graph of maximum degree at most 2 (disjoint paths and cycles).
pub fn max_degree_two_dp(g: &VertexWeightedGraph) -> Vec<usize> {
    assert!(g.max_degree() <= 2, "paths and cycles only");
    let mut chosen = vec![];
    for comp in g.components() {
        let start = comp.iter().copied().find(|&v| g.degree(v) < 2).unwrap_or(comp[0]);
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(&next) = g.neighbors(cur).iter().find(|&&v| v != prev && v != start) {
            if order.contains(&next) {
                break;
            }
            order.push(next);
            prev = cur;
            cur = next;
        }
        let is_cycle = order.len() >= 3 && g.has_edge(order[0], *order.last().unwrap());
        let w: Vec<Rational> = order.iter().map(|&v| g.weights[v].clone()).collect();
        let picks = if is_cycle {
            // Either the first vertex is out, or it is in and both its neighbors are out.
            let (a_val, a) = path_dp(&w[1..]);
            let inner = if w.len() > 3 { path_dp(&w[2..w.len() - 1]) } else { (Rational::zero(), vec![]) };
            let b_val = &w[0] + &inner.0;
            if b_val > a_val {
                std::iter::once(0).chain(inner.1.into_iter().map(|i| i + 2)).collect()
            } else {
                a.into_iter().map(|i| i + 1).collect()
            }
        } else {
            path_dp(&w).1
        };
        chosen.extend(picks.into_iter().map(|i| order[i]));
    }
    chosen.sort();
    chosen
}

/// Best independent set on a path with the given weights, as positions.
fn path_dp(w: &[Rational]) -> (Rational, Vec<usize>) {
    let n = w.len();
    // best[i]: optimum on the first i vertices.
    let mut best = vec![Rational::zero(); n + 1];
    for i in 1..=n {
        let take = &w[i - 1] + if i >= 2 { best[i - 2].clone() } else { Rational::zero() };
        best[i] = if take > best[i - 1] { take } else { best[i - 1].clone() };
    }
    let mut picks = vec![];
    let mut i = n;
    while i >= 1 {
        if best[i] != best[i - 1] {
            picks.push(i - 1);
            i = i.saturating_sub(2);
        } else {
            i -= 1;
        }
    }
    picks.reverse();
    (best[n].clone(), picks)
}

/// Robust algorithm for `(Δ − 1)`-stable instances and `(k − 1)`-stable instances of
/// `k`-colorable graphs. Graphs of degree at most 2 are solved exactly. Otherwise
/// every `K_{Δ+1}` component contributes its heaviest vertex and the rest goes to the
/// LP, which must have a unique integral optimum.
pub fn robust_colorable(g: &VertexWeightedGraph) -> Result<RobustReport> {
    let delta = g.max_degree();
    if delta <= 2 {
        let s = max_degree_two_dp(g);
        let value = g.weight_of(&s);
        return Ok(RobustReport { verdict: Verdict::Optimal(Solution::independent_set(s)), lp_value: value });
    }
    let mut picked = vec![];
    let mut rest = vec![];
    let mut clique_value = Rational::zero();
    for comp in g.components() {
        if comp.len() == delta + 1 && comp.iter().all(|&v| g.degree(v) == delta) {
            let best = comp.iter().copied().fold(comp[0], |b, v| if g.weights[v] > g.weights[b] { v } else { b });
            clique_value += &g.weights[best];
            picked.push(best);
        } else {
            rest.extend(comp);
        }
    }
    rest.sort();
    let (h, map) = g.induced(&rest);
    let (p, sol, half) = solve_mis_lp(&h)?;
    let lp_value = &clique_value + &sol.objective;
    let all: Vec<usize> = (0..h.n).collect();
    if !half.is_integral() || !lp::is_unique_integral_optimum(&p, &sol, &all, &mut NoSeparation, 0)? {
        return Ok(RobustReport { verdict: Verdict::NotStable, lp_value });
    }
    picked.extend(half.v1.iter().map(|&u| map[u]));
    Ok(RobustReport { verdict: Verdict::Optimal(Solution::independent_set(picked)), lp_value })
}

/// Solve the standard LP; answer with its set iff the optimum is integral and unique.
pub fn robust_lp(g: &VertexWeightedGraph) -> Result<RobustReport> {
    let (p, sol, half) = solve_mis_lp(g)?;
    let all: Vec<usize> = (0..g.n).collect();
    let verdict = if half.is_integral() && lp::is_unique_integral_optimum(&p, &sol, &all, &mut NoSeparation, 0)? {
        Verdict::Optimal(Solution::independent_set(half.v1.clone()))
    } else {
        Verdict::NotStable
    };
    Ok(RobustReport { verdict, lp_value: sol.objective })
}

/// `k` outcomes of probability `1/k`: `V_1` plus one color class of `G[V_{1/2}]`,
/// where `k` is the number of colors of `coloring`.
pub fn hochbaum_rounding(
    g: &VertexWeightedGraph,
    x: &HalfIntegralSolution,
    coloring: &Coloring,
) -> Result<Vec<RoundingOutcome<Vec<usize>>>> {
    if coloring.colors.len() != g.n || x.x.len() != g.n || coloring.c == 0 {
        return Err(MisError::InvalidParameter("coloring and solution must cover every vertex".into()));
    }
    let half: BTreeSet<usize> = x.v_half.iter().copied().collect();
    if let Some((u, v)) = coloring.conflict(g, Some(&half)) {
        return Err(MisError::ImproperColoring(u, v));
    }
    let p = Rational::from(coloring.c).recip();
    Ok((0..coloring.c)
        .map(|j| {
            let mut s: Vec<usize> = x.v1.clone();
            s.extend(half.iter().copied().filter(|&u| coloring.colors[u] == j));
            s.sort();
            RoundingOutcome { outcome: s, probability: p.clone() }
        })
        .collect())
}

/// Repeatedly takes the heaviest remaining vertex (lowest id on ties) and drops its neighbors.
pub fn greedy_mis(g: &VertexWeightedGraph) -> Solution {
    let mut alive = vec![true; g.n];
    let mut s = vec![];
    loop {
        let mut best: Option<usize> = None;
        for v in (0..g.n).filter(|&v| alive[v]) {
            if best.map_or(true, |b| g.weights[v] > g.weights[b]) {
                best = Some(v);
            }
        }
        let Some(u) = best else { break };
        s.push(u);
        alive[u] = false;
        for &v in g.neighbors(u) {
            alive[v] = false;
        }
    }
    Solution::independent_set(s)
}

/// Recursive algorithm for `(n/k)`-stable instances in time `n^{O(k)}`.
pub fn unbounded_degree_alg(g: &VertexWeightedGraph, k: usize) -> Result<Solution> {
    if k == 0 {
        return Err(MisError::InvalidParameter("k must be at least 1".into()));
    }
    if k == 1 || g.n == 0 {
        return Ok(greedy_mis(g));
    }
    let (_, _, half) = solve_mis_lp(g)?;
    if half.is_integral() {
        return Ok(Solution::independent_set(half.v1));
    }
    let threshold = g.n.div_ceil(k);
    let x: Vec<usize> = (0..g.n).filter(|&u| g.degree(u) >= threshold).collect();
    let lift = |sub: &Solution, map: &[usize]| -> Vec<usize> {
        sub.elements().expect("independent set").iter().map(|&i| map[i]).collect()
    };
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(x.len() + 1);
    for &u in &x {
        let keep: Vec<usize> = (0..g.n).filter(|&v| v != u && !g.has_edge(u, v)).collect();
        let (gu, map) = g.induced(&keep);
        let mut s = lift(&unbounded_degree_alg(&gu, k - 1)?, &map);
        s.push(u);
        candidates.push(s);
    }
    let keep: Vec<usize> = (0..g.n).filter(|v| !x.contains(v)).collect();
    let (gt, map) = g.induced(&keep);
    candidates.push(lift(&unbounded_degree_alg(&gt, k - 1)?, &map));
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for c in candidates {
        let w = g.weight_of(&c);
        if best.as_ref().map_or(true, |(b, _)| w > *b) {
            best = Some((w, c));
        }
    }
    Ok(Solution::independent_set(best.expect("at least one candidate").1))
}

/// Greedy coloring in non-increasing degree order (lowest id on ties), with the
/// bound `max_i min{d_i + 1, i}` on the number of colors it uses.
pub fn welsh_powell_bound(g: &VertexWeightedGraph) -> (Coloring, usize) {
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let bound = order.iter().enumerate().map(|(i, &v)| (g.degree(v) + 1).min(i + 1)).max().unwrap_or(0);
    let mut colors = vec![usize::MAX; g.n];
    let mut c = 0;
    for &v in &order {
        let used: BTreeSet<usize> = g.neighbors(v).iter().map(|&u| colors[u]).collect();
        let col = (0..).find(|x| !used.contains(x)).expect("some color is free");
        colors[v] = col;
        c = c.max(col + 1);
    }
    (Coloring { colors, c }, bound)
}

/// Sherali–Adams lift of level `t`: one variable `Y_S` per set of at most `t + 1`
/// vertices, with `Y_∅` pinned to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SaRelaxation {
    pub t: usize,
    /// Sorted vertex sets, indexed by LP variable.
    pub sets: Vec<Vec<usize>>,
    pub index: BTreeMap<Vec<usize>, usize>,
    pub problem: LpProblem,
}

impl SaRelaxation {
    pub fn var(&self, set: &[usize]) -> usize {
        self.index[set]
    }

    /// Variables `Y_{u}` in vertex order.
    pub fn singleton_vars(&self) -> Vec<usize> {
        let n = self.sets.iter().filter(|s| s.len() == 1).count();
        (0..n).map(|u| self.index[&vec![u]]).collect()
    }
}

fn subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for size in 1..=max.min(items.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            if !stability_oracle::next_combination(&mut idx, items.len()) {
                break;
            }
        }
    }
    out
}

fn union(a: &[usize], b: &[usize], extra: Option<usize>) -> Vec<usize> {
    let mut s: BTreeSet<usize> = a.iter().chain(b).copied().collect();
    s.extend(extra);
    s.into_iter().collect()
}

/// Builds the level-`t` lift. Guarded to `n ≤ 14` and `t ≤ 3`.
pub fn build_sa(g: &VertexWeightedGraph, t: usize) -> Result<SaRelaxation> {
    if g.n > 14 || t > 3 {
        return Err(MisError::TooLarge { n: g.n, t });
    }
    let verts: Vec<usize> = (0..g.n).collect();
    let sets = subsets_up_to(&verts, t + 1);
    let index: BTreeMap<Vec<usize>, usize> = sets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let mut p = LpProblem::new(Sense::Maximize);
    for s in &sets {
        let cost = if s.len() == 1 { g.weights[s[0]].clone() } else { Rational::zero() };
        let y = p.add_var(cost);
        let lo = if s.is_empty() { Rational::one() } else { Rational::zero() };
        p.set_bounds(y, Some(lo), Some(Rational::one()));
    }
    let mut rows: BTreeSet<(Vec<(usize, Rational)>, Relation)> = BTreeSet::new();
    let mut push = |acc: BTreeMap<usize, Rational>, rel: Relation| {
        let coeffs: Vec<(usize, Rational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if !coeffs.is_empty() {
            rows.insert((coeffs, rel));
        }
    };
    for s in subsets_up_to(&verts, t) {
        let others: Vec<usize> = verts.iter().copied().filter(|v| !s.contains(v)).collect();
        for tt in subsets_up_to(&others, t - s.len()) {
            let signed: Vec<(Vec<usize>, Rational)> = subsets_up_to(&tt, tt.len())
                .into_iter()
                .map(|tp| {
                    let sign = if tp.len() % 2 == 0 { Rational::one() } else { -Rational::one() };
                    (union(&s, &tp, None), sign)
                })
                .collect();
            let add = |acc: &mut BTreeMap<usize, Rational>, set: Vec<usize>, c: &Rational| {
                *acc.entry(index[&set]).or_insert_with(Rational::zero) += c;
            };
            for &(u, v) in &g.edges {
                let mut acc = BTreeMap::new();
                for (base, sign) in &signed {
                    add(&mut acc, union(base, &[], Some(u)), sign);
                    add(&mut acc, union(base, &[], Some(v)), sign);
                    add(&mut acc, base.clone(), &-sign);
                }
                push(acc, Relation::Le);
            }
            for u in 0..g.n {
                let mut lower = BTreeMap::new();
                let mut upper = BTreeMap::new();
                for (base, sign) in &signed {
                    add(&mut lower, union(base, &[], Some(u)), sign);
                    add(&mut upper, union(base, &[], Some(u)), sign);
                    add(&mut upper, base.clone(), &-sign);
                }
                push(lower, Relation::Ge);
                push(upper, Relation::Le);
            }
        }
    }
    for (coeffs, rel) in rows {
        p.add_constraint(coeffs, rel, Rational::zero());
    }
    Ok(SaRelaxation { t, sets, index, problem: p })
}

/// Solves the lift and answers with its set iff every `Y_{u}` is integral and the
/// integral point is the unique optimum in those coordinates.
pub fn robust_sa(g: &VertexWeightedGraph, t: usize) -> Result<RobustReport> {
    let sa = build_sa(g, t)?;
    let sol = lp::solve(&sa.problem)?;
    let ys = sa.singleton_vars();
    let verdict = if lp::is_integral(&sol, &ys) && lp::is_unique_integral_optimum(&sa.problem, &sol, &ys, &mut NoSeparation, 0)? {
        Verdict::Optimal(Solution::independent_set((0..g.n).filter(|&u| sol.values[ys[u]].is_one()).collect()))
    } else {
        Verdict::NotStable
    };
    Ok(RobustReport { verdict, lp_value: sol.objective })
}

/// Local-ratio 2-approximation for weighted vertex cover: every edge in order pays the
/// smaller residual weight of its ends; vertices with no residual weight form the cover.
pub fn local_ratio_vertex_cover(g: &VertexWeightedGraph) -> Vec<usize> {
    let mut residual = g.weights.clone();
    for &(u, v) in &g.edges {
        let m = residual[u].clone().min(residual[v].clone());
        residual[u] -= &m;
        residual[v] -= &m;
    }
    (0..g.n).filter(|&u| residual[u].is_zero()).collect()
}

/// Upper estimate of the minimum vertex cover weight, within `min{2, 1 + 1/(β − 2)}`
/// of it on `(αβ)`-stable inputs: the smaller of a local-ratio 2-approximation and
/// `(w(V_0) + w(V_{1/2}) − FRAC) / (2 − A)` with `A = min{α, β/(β − 1)}`.
pub fn estimate_vc(g: &VertexWeightedGraph, alpha: &Rational, beta: &Rational) -> Result<Rational> {
    if *beta <= Rational::from_int(2) {
        return Err(MisError::InvalidParameter("beta must exceed 2".into()));
    }
    if *alpha < Rational::one() {
        return Err(MisError::InvalidParameter("alpha must be at least 1".into()));
    }
    let approx = g.weight_of(&local_ratio_vertex_cover(g));
    let (_, _, half) = solve_mis_lp(g)?;
    let (gh, _) = g.induced(&half.v_half);
    let frac = if gh.n == 0 { Rational::zero() } else { solve_mis_lp(&gh)?.1.objective };
    let a = alpha.clone().min(beta / (beta - Rational::one()));
    let lp_side = (g.weight_of(&half.v0) + gh.total_weight() - frac) / (Rational::from_int(2) - a);
    Ok(approx.min(lp_side))
}

/// Number of Sherali–Adams variables at level `t` on `n` vertices.
pub fn sa_num_vars(n: usize, t: usize) -> u128 {
    (0..=t + 1).map(|i| binomial(n, i)).sum()
}
