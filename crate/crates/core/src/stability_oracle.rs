//! Brute-force ground truth for small instances: full enumeration of feasible
//! solutions, the exact optimum, and the exact stability margin.
//!
//! For a minimization problem with unique optimum `O`, the margin is
//! `γ* = min_{S ≠ O} w(S \ O) / w(O \ S)`; the instance is γ-stable exactly when
//! `γ < γ*`. Maximization swaps the two sides. Tours compare edge sets.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::model::{tour_edges, Instance, ModelError, MultiwayCutInstance, Sense, Solution};
use crate::rational::{ExtRational, Rational};

/// Env var that lifts the default size caps and sets the solution budget.
pub const BUDGET_ENV: &str = "STABLECUT_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationBudget {
    /// Candidates examined before giving up.
    pub max_solutions: usize,
    /// Apply the per-problem size caps (non-terminals ≤ 10, MIS n ≤ 10, TSP n ≤ 9,
    /// at most 10⁵ center sets).
    pub enforce_caps: bool,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_solutions: 5_000_000, enforce_caps: true }
    }
}

impl EnumerationBudget {
    /// Default budget, unless `STABLECUT_BUDGET` holds a count, which then replaces
    /// `max_solutions` and disables the caps.
    pub fn from_env() -> Self {
        match std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()) {
            Some(n) => EnumerationBudget { max_solutions: n, enforce_caps: false },
            None => Self::default(),
        }
    }

    pub fn unlimited() -> Self {
        EnumerationBudget { max_solutions: usize::MAX, enforce_caps: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("instance too large for enumeration: {0}")]
    TooLarge(String),
    #[error("enumeration budget of {0} candidates exceeded")]
    BudgetExceeded(usize),
    #[error("no stability oracle for {0}")]
    Unsupported(&'static str),
    #[error("instance has no feasible solution")]
    NoSolution,
    #[error(transparent)]
    Model(#[from] ModelError),
}

struct Counter {
    seen: usize,
    cap: usize,
}

impl Counter {
    fn tick(&mut self) -> Result<(), OracleError> {
        self.seen += 1;
        if self.seen > self.cap {
            Err(OracleError::BudgetExceeded(self.cap))
        } else {
            Ok(())
        }
    }
}

fn cap(enforce: bool, ok: bool, what: impl FnOnce() -> String) -> Result<(), OracleError> {
    if enforce && !ok {
        Err(OracleError::TooLarge(what()))
    } else {
        Ok(())
    }
}

/// Every feasible solution, canonicalized and without duplicates, in a fixed order.
///
/// Edge cuts are boundaries of terminal-connected partitions; node cuts, independent
/// sets and center sets are the sets themselves; tours fix vertex 0 first and list
/// each undirected cycle once. Clusterings use exactly `min(k, candidates)` centers,
/// each point served by its nearest center.
pub fn enumerate_solutions(inst: &Instance, budget: &EnumerationBudget) -> Result<Vec<Solution>, OracleError> {
    let mut ctr = Counter { seen: 0, cap: budget.max_solutions };
    let caps = budget.enforce_caps;
    match inst {
        Instance::EdgeMc(mc) => {
            let free = mc.non_terminals();
            cap(caps, free.len() <= 10, || format!("{} non-terminals (cap 10)", free.len()))?;
            let k = mc.k();
            let mut labels = vec![0usize; mc.graph.n];
            for (j, &t) in mc.terminals.iter().enumerate() {
                labels[t] = j;
            }
            let mut digits = vec![0usize; free.len()];
            let mut cuts = BTreeSet::new();
            loop {
                ctr.tick()?;
                for (d, &v) in digits.iter().zip(&free) {
                    labels[v] = *d;
                }
                cuts.insert(mc.canonical_cut(&mc.boundary(&labels))?);
                if !odometer(&mut digits, k) {
                    break;
                }
            }
            Ok(cuts.into_iter().map(Solution::EdgeCut).collect())
        }
        Instance::NodeMc(nc) => {
            let free = nc.non_terminals();
            cap(caps, free.len() <= 10, || format!("{} non-terminals (cap 10)", free.len()))?;
            let mut out = Vec::new();
            for mask in 0u64..(1u64 << free.len()) {
                ctr.tick()?;
                let set: Vec<usize> = bits(mask, &free);
                if nc.separates(&set) {
                    out.push(Solution::NodeCut(set));
                }
            }
            Ok(out)
        }
        Instance::Mis(g) => {
            cap(caps, g.n <= 10, || format!("n = {} (cap 10)", g.n))?;
            let mut out = Vec::new();
            let mut cur = Vec::new();
            independent_sets(g, 0, &mut cur, &mut out, &mut ctr)?;
            Ok(out)
        }
        Instance::Tsp(m) => {
            cap(caps, m.n <= 9, || format!("n = {} (cap 9)", m.n))?;
            if m.n < 3 {
                return Ok(Vec::new());
            }
            let mut rest: Vec<usize> = (1..m.n).collect();
            let mut out = Vec::new();
            permutations(&mut rest, 0, &mut |p| {
                if p[0] < p[p.len() - 1] {
                    ctr.tick()?;
                    let mut t = vec![0];
                    t.extend_from_slice(p);
                    out.push(Solution::Tour(t));
                }
                Ok(())
            })?;
            Ok(out)
        }
        Instance::KCenter(mi) | Instance::KMedian(mi) => {
            let c = mi.num_candidates();
            let k = mi.k.min(c);
            let count = binomial(c, k);
            cap(caps, count <= 100_000, || format!("C({c},{k}) = {count} center sets (cap 10^5)"))?;
            let mut out = Vec::new();
            let mut comb: Vec<usize> = (0..k).collect();
            loop {
                ctr.tick()?;
                out.push(Solution::clustering(mi, comb.clone()));
                if !next_combination(&mut comb, c) {
                    break;
                }
            }
            Ok(out)
        }
    }
}

fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn bits(mask: u64, items: &[usize]) -> Vec<usize> {
    items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect()
}

fn independent_sets(
    g: &crate::model::VertexWeightedGraph,
    v: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Solution>,
    ctr: &mut Counter,
) -> Result<(), OracleError> {
    if v == g.n {
        ctr.tick()?;
        out.push(Solution::IndependentSet(cur.clone()));
        return Ok(());
    }
    independent_sets(g, v + 1, cur, out, ctr)?;
    if cur.iter().all(|&u| !g.has_edge(u, v)) {
        cur.push(v);
        independent_sets(g, v + 1, cur, out, ctr)?;
        cur.pop();
    }
    Ok(())
}

fn permutations(
    xs: &mut Vec<usize>,
    i: usize,
    f: &mut dyn FnMut(&[usize]) -> Result<(), OracleError>,
) -> Result<(), OracleError> {
    if i == xs.len() {
        return f(xs);
    }
    for j in i..xs.len() {
        xs.swap(i, j);
        permutations(xs, i + 1, f)?;
        xs.swap(i, j);
    }
    Ok(())
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Advances `comb` (strictly increasing, values below `n`) to the next combination.
pub(crate) fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    for i in (0..k).rev() {
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Weighted element set used in set-difference comparisons.
fn weighted_elements(inst: &Instance, sol: &Solution) -> Result<BTreeMap<usize, Rational>, OracleError> {
    match (inst, sol) {
        (Instance::Tsp(m), Solution::Tour(t)) => Ok(tour_edges(t)
            .into_iter()
            .map(|(a, b)| (a * m.n + b, m.d[a][b].clone()))
            .collect()),
        (Instance::KCenter(_) | Instance::KMedian(_), _) => Err(OracleError::Unsupported("clustering")),
        _ => {
            let els = sol.elements().ok_or(ModelError::VariantMismatch)?;
            els.iter()
                .map(|&x| {
                    inst.element_weight(sol, x)
                        .map(|w| (x, w))
                        .ok_or(OracleError::Model(ModelError::VariantMismatch))
                })
                .collect()
        }
    }
}

/// `(w(a \ b), w(b \ a))`.
fn differences(a: &BTreeMap<usize, Rational>, b: &BTreeMap<usize, Rational>) -> (Rational, Rational) {
    let only_a = a.iter().filter(|(x, _)| !b.contains_key(x)).map(|(_, w)| w).sum();
    let only_b = b.iter().filter(|(x, _)| !a.contains_key(x)).map(|(_, w)| w).sum();
    (only_a, only_b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    /// Supremum of γ for which the instance is γ-stable; `1` when the optimum is not unique.
    pub gamma_star: ExtRational,
    /// Competitor attaining `gamma_star` (another optimum when not unique); `None` when
    /// the optimum is the only feasible solution.
    pub witness: Option<Solution>,
    pub optimum: Solution,
    pub optimum_value: Rational,
    pub is_unique_optimum: bool,
}

impl StabilityReport {
    /// True iff the instance is γ-stable, i.e. unique optimum and `γ < γ*`.
    pub fn is_stable(&self, gamma: &Rational) -> bool {
        self.is_unique_optimum && self.gamma_star > *gamma
    }
}

/// Optimum of an enumerated set, plus whether it is unique.
pub fn brute_force_optimum(
    inst: &Instance,
    budget: &EnumerationBudget,
) -> Result<(Solution, Rational, Vec<Solution>), OracleError> {
    let sols = enumerate_solutions(inst, budget)?;
    let sense = inst.sense();
    let mut best: Option<(usize, Rational)> = None;
    let mut costs = Vec::with_capacity(sols.len());
    for (i, s) in sols.iter().enumerate() {
        let c = inst.solution_cost(s)?;
        let better = match &best {
            None => true,
            Some((_, b)) => match sense {
                Sense::Minimize => c < *b,
                Sense::Maximize => c > *b,
            },
        };
        if better {
            best = Some((i, c.clone()));
        }
        costs.push(c);
    }
    let (bi, bc) = best.ok_or(OracleError::NoSolution)?;
    let ties = sols
        .iter()
        .zip(&costs)
        .enumerate()
        .filter(|(i, (_, c))| *i != bi && **c == bc)
        .map(|(_, (s, _))| s.clone())
        .collect();
    Ok((sols[bi].clone(), bc, ties))
}

/// Optimal edge multiway cut value by walking every labeling of the non-terminals.
///
/// Only the value is kept, so nothing is stored per labeling: weights are scaled to
/// integers and the cut weight is updated incrementally as the odometer turns.
pub fn edge_mc_optimum_value(mc: &MultiwayCutInstance, budget: &EnumerationBudget) -> Result<Rational, OracleError> {
    let free = mc.non_terminals();
    cap(budget.enforce_caps, free.len() <= 10, || format!("{} non-terminals (cap 10)", free.len()))?;
    let lcm = mc.graph.edges.iter().fold(BigInt::one(), |acc, e| acc.lcm(&e.w.denom()));
    let mut w = Vec::with_capacity(mc.graph.edges.len());
    for e in &mc.graph.edges {
        let scaled = e.w.numer() * (&lcm / e.w.denom());
        w.push(scaled.to_i128().ok_or_else(|| OracleError::TooLarge("weights overflow 128-bit scaling".into()))?);
    }
    let inc = mc.graph.incidence();
    let k = mc.k();
    let mut labels = vec![0usize; mc.graph.n];
    for (j, &t) in mc.terminals.iter().enumerate() {
        labels[t] = j;
    }
    let mut cost: i128 = mc.graph.edges.iter().zip(&w).filter(|(e, _)| labels[e.u] != labels[e.v]).map(|(_, x)| x).sum();
    let mut best = cost;
    let mut ctr = Counter { seen: 0, cap: budget.max_solutions };
    ctr.tick()?;
    let relabel = |v: usize, to: usize, labels: &mut [usize], cost: &mut i128| {
        for &id in &inc[v] {
            let o = mc.graph.edges[id].other(v);
            *cost += w[id] * ((labels[o] != to) as i128 - (labels[o] != labels[v]) as i128);
        }
        labels[v] = to;
    };
    'outer: loop {
        for &v in &free {
            if labels[v] + 1 < k {
                relabel(v, labels[v] + 1, &mut labels, &mut cost);
                ctr.tick()?;
                best = best.min(cost);
                continue 'outer;
            }
            relabel(v, 0, &mut labels, &mut cost);
        }
        break;
    }
    Ok(Rational::from_bigint(BigInt::from(best)) / Rational::from_bigint(lcm))
}

/// Exact stability margin by enumeration.
pub fn stability_margin(inst: &Instance, budget: &EnumerationBudget) -> Result<StabilityReport, OracleError> {
    if matches!(inst, Instance::KCenter(_) | Instance::KMedian(_)) {
        return Err(OracleError::Unsupported("clustering"));
    }
    let sols = enumerate_solutions(inst, budget)?;
    let mut costs = Vec::with_capacity(sols.len());
    for s in &sols {
        costs.push(inst.solution_cost(s)?);
    }
    let sense = inst.sense();
    let bi = (0..sols.len())
        .reduce(|a, b| {
            let better = match sense {
                Sense::Minimize => costs[b] < costs[a],
                Sense::Maximize => costs[b] > costs[a],
            };
            if better {
                b
            } else {
                a
            }
        })
        .ok_or(OracleError::NoSolution)?;
    let optimum = sols[bi].clone();
    let optimum_value = costs[bi].clone();
    if let Some(j) = (0..sols.len()).find(|&j| j != bi && costs[j] == optimum_value) {
        return Ok(StabilityReport {
            gamma_star: ExtRational::Finite(Rational::one()),
            witness: Some(sols[j].clone()),
            optimum,
            optimum_value,
            is_unique_optimum: false,
        });
    }
    let opt_els = weighted_elements(inst, &optimum)?;
    let mut gamma_star = ExtRational::Infinity;
    let mut witness = None;
    for (j, s) in sols.iter().enumerate() {
        if j == bi {
            continue;
        }
        let els = weighted_elements(inst, s)?;
        let (s_only, opt_only) = differences(&els, &opt_els);
        let ratio = match sense {
            Sense::Minimize => ExtRational::ratio(&s_only, &opt_only),
            Sense::Maximize => ExtRational::ratio(&opt_only, &s_only),
        };
        if witness.is_none() || ratio < gamma_star {
            gamma_star = ratio;
            witness = Some(s.clone());
        }
    }
    Ok(StabilityReport { gamma_star, witness, optimum, optimum_value, is_unique_optimum: true })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeakCertificate {
    /// No γ-perturbation-proof argument excludes the solution.
    InNeighborhood,
    /// A solution that beats the candidate even after the candidate's most
    /// favorable γ-perturbation.
    Violator(Solution),
}

/// Decides whether `solution` may lie in the neighborhood of a (γ, 𝒩)-weakly-stable
/// instance. It is excluded iff the optimum `O` still wins after scaling `O`'s private
/// elements by γ against it: `γ·w(O \ X) < w(X \ O)` when minimizing, and
/// `w(O \ X) > γ·w(X \ O)` when maximizing.
pub fn weak_stability_certificate(
    inst: &Instance,
    solution: &Solution,
    gamma: &Rational,
    budget: &EnumerationBudget,
) -> Result<WeakCertificate, OracleError> {
    if !inst.check_feasible(solution)? {
        return Err(OracleError::Model(ModelError::Infeasible));
    }
    let (opt, _, _) = brute_force_optimum(inst, budget)?;
    let (x_els, o_els) = (weighted_elements(inst, solution)?, weighted_elements(inst, &opt)?);
    let (x_only, o_only) = differences(&x_els, &o_els);
    let excluded = match inst.sense() {
        Sense::Minimize => gamma * &o_only < x_only,
        Sense::Maximize => o_only > gamma * &x_only,
    };
    Ok(if excluded { WeakCertificate::Violator(opt) } else { WeakCertificate::InNeighborhood })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Metric, VertexWeightedGraph};
    use crate::rational::q;
    use proptest::prelude::*;

    fn square_tsp(diag: Rational) -> Instance {
        let (o, z) = (q(1, 1), q(0, 1));
        Instance::Tsp(
            Metric::new(vec![
                vec![z.clone(), o.clone(), diag.clone(), o.clone()],
                vec![o.clone(), z.clone(), o.clone(), diag.clone()],
                vec![diag.clone(), o.clone(), z.clone(), o.clone()],
                vec![o.clone(), diag.clone(), o.clone(), z.clone()],
            ])
            .unwrap(),
        )
    }

    #[test]
    fn tsp_four_points_has_three_tours_and_margin_19_10() {
        let inst = square_tsp(q(19, 10));
        let b = EnumerationBudget::default();
        assert_eq!(enumerate_solutions(&inst, &b).unwrap().len(), 3);
        let rep = stability_margin(&inst, &b).unwrap();
        assert_eq!(rep.gamma_star, q(19, 10));
        assert_eq!(rep.optimum_value, q(4, 1));
        assert!(rep.is_unique_optimum);
    }

    #[test]
    fn fast_edge_mc_value_matches_enumeration() {
        for seed in 0..10 {
            let mc = crate::multiway_cut::gen_random(7, 3, 0.5, 9, seed).unwrap();
            let inst = Instance::EdgeMc(mc.clone());
            let b = EnumerationBudget::default();
            assert_eq!(edge_mc_optimum_value(&mc, &b).unwrap(), brute_force_optimum(&inst, &b).unwrap().1);
        }
    }

    #[test]
    fn tied_optima_report_gamma_one() {
        // Square with unit diagonals: every tour costs 4... diagonals 1 give ties.
        let inst = square_tsp(q(1, 1));
        let rep = stability_margin(&inst, &EnumerationBudget::default()).unwrap();
        assert!(!rep.is_unique_optimum);
        assert_eq!(rep.gamma_star, q(1, 1));
    }

    #[test]
    fn triangle_independent_sets() {
        let g = VertexWeightedGraph::unit(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let sols = enumerate_solutions(&Instance::Mis(g), &EnumerationBudget::default()).unwrap();
        let sets: Vec<_> = sols.iter().map(|s| s.elements().unwrap().to_vec()).collect();
        assert_eq!(sets, vec![vec![], vec![2], vec![1], vec![0]]);
    }

    #[test]
    fn path_mis_margin() {
        let g = VertexWeightedGraph::new(vec![q(1, 1), q(5, 1), q(1, 1)], vec![(0, 1), (1, 2)]).unwrap();
        let rep = stability_margin(&Instance::Mis(g), &EnumerationBudget::default()).unwrap();
        assert_eq!(rep.optimum, Solution::IndependentSet(vec![1]));
        assert_eq!(rep.gamma_star, q(5, 2));
        assert_eq!(rep.witness, Some(Solution::IndependentSet(vec![0, 2])));
    }

    #[test]
    fn weak_certificate_cases() {
        let g = VertexWeightedGraph::new(vec![q(1, 1), q(5, 1), q(1, 1)], vec![(0, 1), (1, 2)]).unwrap();
        let inst = Instance::Mis(g);
        let b = EnumerationBudget::default();
        let opt = Solution::IndependentSet(vec![1]);
        assert_eq!(weak_stability_certificate(&inst, &opt, &q(2, 1), &b).unwrap(), WeakCertificate::InNeighborhood);
        let bad = Solution::IndependentSet(vec![0]);
        assert_eq!(weak_stability_certificate(&inst, &bad, &q(3, 1), &b).unwrap(), WeakCertificate::Violator(opt.clone()));
        // {0,2} vs {1}: 5 > γ·2 only for γ < 5/2.
        let pair = Solution::IndependentSet(vec![0, 2]);
        assert_eq!(weak_stability_certificate(&inst, &pair, &q(2, 1), &b).unwrap(), WeakCertificate::Violator(opt));
        assert_eq!(weak_stability_certificate(&inst, &pair, &q(3, 1), &b).unwrap(), WeakCertificate::InNeighborhood);
    }

    #[test]
    fn caps_and_budget() {
        let g = VertexWeightedGraph::unit(11, vec![]).unwrap();
        let inst = Instance::Mis(g.clone());
        assert!(matches!(enumerate_solutions(&inst, &EnumerationBudget::default()), Err(OracleError::TooLarge(_))));
        let tight = EnumerationBudget { max_solutions: 100, enforce_caps: false };
        assert_eq!(enumerate_solutions(&inst, &tight), Err(OracleError::BudgetExceeded(100)));
        assert_eq!(enumerate_solutions(&inst, &EnumerationBudget::unlimited()).unwrap().len(), 2048);
    }

    #[test]
    fn combinations_helpers() {
        assert_eq!(binomial(9, 3), 84);
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 4) {
            count += 1;
        }
        assert_eq!(count, 6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn margin_is_scale_invariant(
            ws in proptest::collection::vec(1i64..20, 6),
            mask in proptest::collection::vec(any::<bool>(), 15),
            lam in 1i64..9,
        ) {
            let mut edges = Vec::new();
            let mut it = mask.iter();
            for u in 0..6 {
                for v in u + 1..6 {
                    if *it.next().unwrap() {
                        edges.push((u, v));
                    }
                }
            }
            let w: Vec<Rational> = ws.iter().map(|&x| q(x, 1)).collect();
            let g = VertexWeightedGraph::new(w.clone(), edges.clone()).unwrap();
            let g2 = VertexWeightedGraph::new(w.iter().map(|x| x * q(lam, 3)).collect(), edges).unwrap();
            let b = EnumerationBudget::default();
            let a = stability_margin(&Instance::Mis(g), &b).unwrap();
            let c = stability_margin(&Instance::Mis(g2), &b).unwrap();
            prop_assert_eq!(a.gamma_star, c.gamma_star);
            prop_assert_eq!(a.optimum, c.optimum);
        }

        #[test]
        fn enumeration_agrees_with_feasibility(mask in proptest::collection::vec(any::<bool>(), 10)) {
            let mut edges = Vec::new();
            let mut it = mask.iter();
            for u in 0..5 {
                for v in u + 1..5 {
                    if *it.next().unwrap() {
                        edges.push((u, v));
                    }
                }
            }
            let g = VertexWeightedGraph::unit(5, edges).unwrap();
            let inst = Instance::Mis(g);
            let listed: BTreeSet<Solution> =
                enumerate_solutions(&inst, &EnumerationBudget::default()).unwrap().into_iter().collect();
            for m in 0u32..32 {
                let set: Vec<usize> = (0..5).filter(|i| m >> i & 1 == 1).collect();
                let s = Solution::IndependentSet(set);
                prop_assert_eq!(inst.check_feasible(&s).unwrap(), listed.contains(&s));
            }
        }
    }
}
