//! Symmetric TSP: the subtour-elimination LP, greedy edge insertion, the robust
//! LP-certified solve and checkable consequences of stability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lp::{self, Constraint, LpError, LpProblem, LpSolution, LpStatus, NoSeparation, Relation, SeparationOracle};
use crate::model::{tour_edges, Metric, ModelError, Sense, Solution, UnionFind, Verdict};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TspError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("TSP needs at least 3 vertices, got {0}")]
    TooSmall(usize),
}

pub type Result<T> = std::result::Result<T, TspError>;

/// Cap on separation rounds; each round adds one distinct cut.
pub const MAX_SUBTOUR_ROUNDS: usize = 10_000;

/// Subsets are enumerated up to this many vertices; larger instances use Stoer–Wagner.
pub const BRUTE_FORCE_CUT_LIMIT: usize = 12;

/// Edge variables of the tour LP: one per unordered pair `{i, j}`, `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TourLp {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    index: Vec<Vec<usize>>,
    pub problem: LpProblem,
}

impl TourLp {
    /// `min Σ w_e x_e` with `x(δ(u)) = 2` and `0 ≤ x ≤ 1`; subtour cuts are added lazily.
    pub fn new(metric: &Metric) -> Self {
        let n = metric.n;
        let mut p = LpProblem::new(Sense::Minimize);
        let mut edges = vec![];
        let mut index = vec![vec![usize::MAX; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = p.add_var(metric.dist(i, j).clone());
                p.set_bounds(v, Some(Rational::zero()), Some(Rational::one()));
                index[i][j] = v;
                index[j][i] = v;
                edges.push((i, j));
            }
        }
        for u in 0..n {
            let row = (0..n).filter(|&v| v != u).map(|v| (index[u][v], Rational::one())).collect();
            p.add_constraint(row, Relation::Eq, Rational::from_int(2));
        }
        TourLp { n, edges, index, problem: p }
    }

    pub fn var(&self, u: usize, v: usize) -> usize {
        self.index[u][v]
    }

    /// `x(δ(S)) ≥ 2`.
    pub fn subtour_cut(&self, side: &[bool]) -> Constraint {
        let coeffs = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| side[i] != side[j])
            .map(|(e, _)| (e, Rational::one()))
            .collect();
        Constraint::new(coeffs, Relation::Ge, Rational::from_int(2))
    }

    /// 0/1 indicator of a tour.
    pub fn indicator(&self, tour: &[usize]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.problem.num_vars];
        for (a, b) in tour_edges(tour) {
            x[self.var(a, b)] = Rational::one();
        }
        x
    }

    fn support_weights(&self, x: &[Rational]) -> Vec<Vec<Rational>> {
        let mut w = vec![vec![Rational::zero(); self.n]; self.n];
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            w[i][j] = x[e].clone();
            w[j][i] = x[e].clone();
        }
        w
    }
}

/// Global minimum cut of a symmetric nonnegative weight matrix, as `(value, side)`.
pub fn min_cut(w: &[Vec<Rational>]) -> (Rational, Vec<bool>) {
    let n = w.len();
    if n <= BRUTE_FORCE_CUT_LIMIT {
        brute_force_min_cut(w)
    } else {
        stoer_wagner(w)
    }
}

fn cut_value(w: &[Vec<Rational>], side: &[bool]) -> Rational {
    let mut total = Rational::zero();
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if side[i] != side[j] {
                total += &w[i][j];
            }
        }
    }
    total
}

/// Tries every `S` with `0 ∈ S ≠ V`.
pub fn brute_force_min_cut(w: &[Vec<Rational>]) -> (Rational, Vec<bool>) {
    let n = w.len();
    let mut best: Option<(Rational, Vec<bool>)> = None;
    for mask in 0u64..(1u64 << (n - 1)) - 1 {
        let side: Vec<bool> = (0..n).map(|i| i == 0 || mask >> (i - 1) & 1 == 1).collect();
        let c = cut_value(w, &side);
        if best.as_ref().map_or(true, |(b, _)| c < *b) {
            best = Some((c, side));
        }
    }
    best.expect("n >= 2")
}

/// Maximum-adjacency phases with exact contraction.
pub fn stoer_wagner(w: &[Vec<Rational>]) -> (Rational, Vec<bool>) {
    let n = w.len();
    let mut w = w.to_vec();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    while alive.len() > 1 {
        let mut added = vec![alive[0]];
        let mut conn: Vec<Rational> = alive.iter().map(|&v| w[alive[0]][v].clone()).collect();
        let mut in_a = vec![false; alive.len()];
        in_a[0] = true;
        let mut last_gain = Rational::zero();
        for _ in 1..alive.len() {
            let pick = (0..alive.len()).filter(|&i| !in_a[i]).max_by(|&a, &b| conn[a].cmp(&conn[b]).then(b.cmp(&a))).unwrap();
            in_a[pick] = true;
            last_gain = conn[pick].clone();
            added.push(alive[pick]);
            for i in 0..alive.len() {
                if !in_a[i] {
                    conn[i] += &w[alive[pick]][alive[i]];
                }
            }
        }
        let t = added[added.len() - 1];
        let s = added[added.len() - 2];
        if best.as_ref().map_or(true, |(b, _)| last_gain < *b) {
            best = Some((last_gain, members[t].clone()));
        }
        let moved = std::mem::take(&mut members[t]);
        members[s].extend(moved);
        for &v in &alive {
            let add = w[t][v].clone();
            w[s][v] += &add;
            w[v][s] = w[s][v].clone();
        }
        w[s][s] = Rational::zero();
        alive.retain(|&v| v != t);
    }
    let (value, set) = best.expect("n >= 2");
    let mut side = vec![false; n];
    for v in set {
        side[v] = true;
    }
    (value, side)
}

/// Returns the cut `x(δ(S)) ≥ 2` for a minimum cut of the support below 2.
pub struct SubtourOracle<'a> {
    pub lp: &'a TourLp,
    pub cuts: usize,
}

impl SeparationOracle for SubtourOracle<'_> {
    fn separate(&mut self, values: &[Rational]) -> Option<Constraint> {
        let (value, side) = min_cut(&self.lp.support_weights(values));
        if value >= Rational::from_int(2) {
            return None;
        }
        self.cuts += 1;
        Some(self.lp.subtour_cut(&side))
    }
}

/// Solved tour LP, with the cuts that were needed kept in `lp.problem`.
#[derive(Debug, Clone, PartialEq)]
pub struct TourLpSolution {
    pub lp: TourLp,
    pub solution: LpSolution,
    pub cuts: usize,
}

pub fn solve_tour_lp(metric: &Metric, cycle_cover_only: bool) -> Result<TourLpSolution> {
    if metric.n < 3 {
        return Err(TspError::TooSmall(metric.n));
    }
    let mut lp = TourLp::new(metric);
    let mut problem = lp.problem.clone();
    let (solution, cuts) = if cycle_cover_only {
        (lp::solve_with_cuts(&mut problem, &mut NoSeparation, 0)?, 0)
    } else {
        let mut oracle = SubtourOracle { lp: &lp, cuts: 0 };
        let s = lp::solve_with_cuts(&mut problem, &mut oracle, MAX_SUBTOUR_ROUNDS)?;
        (s, oracle.cuts)
    };
    lp.problem = problem;
    Ok(TourLpSolution { lp, solution, cuts })
}

/// Greedy edge insertion: scan edges by `(weight, i, j)` and keep one iff both endpoints
/// have degree below 2 and it closes no cycle shorter than `n`.
pub fn greedy_tour(metric: &Metric) -> Result<Solution> {
    let n = metric.n;
    if n < 3 {
        return Err(TspError::TooSmall(n));
    }
    let mut edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    edges.sort_by(|a, b| metric.dist(a.0, a.1).cmp(metric.dist(b.0, b.1)).then(a.cmp(b)));
    let mut deg = vec![0usize; n];
    let mut adj = vec![vec![]; n];
    let mut uf = UnionFind::new(n);
    let mut taken = 0;
    for (i, j) in edges {
        if deg[i] >= 2 || deg[j] >= 2 {
            continue;
        }
        if uf.find(i) == uf.find(j) && taken < n - 1 {
            continue;
        }
        uf.union(i, j);
        deg[i] += 1;
        deg[j] += 1;
        adj[i].push(j);
        adj[j].push(i);
        taken += 1;
        if taken == n {
            break;
        }
    }
    let mut tour = vec![0];
    let mut prev = 0;
    let mut cur = *adj[0].iter().min().expect("greedy closes a Hamiltonian cycle");
    while cur != 0 {
        tour.push(cur);
        let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
        prev = cur;
        cur = next;
    }
    Ok(Solution::Tour(tour))
}

pub fn tour_cost(metric: &Metric, tour: &[usize]) -> Rational {
    tour_edges(tour).iter().map(|&(a, b)| metric.dist(a, b).clone()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TspReport {
    pub verdict: Verdict,
    pub lp_value: Rational,
    pub greedy_cost: Rational,
    pub lp_integral: bool,
    pub cuts: usize,
}

/// Robust solve: run greedy, solve the LP, and return the greedy tour iff its cost equals
/// the LP value and its indicator is the only point of the optimal face.
pub fn tsp_robust(metric: &Metric, cycle_cover_only: bool) -> Result<TspReport> {
    let greedy = greedy_tour(metric)?;
    let Solution::Tour(tour) = &greedy else { unreachable!() };
    let greedy_cost = tour_cost(metric, tour);
    let solved = solve_tour_lp(metric, cycle_cover_only)?;
    let lp_value = solved.solution.objective.clone();
    let vars: Vec<usize> = (0..solved.lp.edges.len()).collect();
    let lp_integral = lp::is_integral(&solved.solution, &vars);
    let mut verdict = Verdict::NotStable;
    if lp_value == greedy_cost {
        let point = LpSolution {
            status: LpStatus::Optimal,
            values: solved.lp.indicator(tour),
            objective: greedy_cost.clone(),
            basis: vec![],
            pivots: 0,
        };
        let unique = if cycle_cover_only {
            lp::is_unique_integral_optimum(&solved.lp.problem, &point, &vars, &mut NoSeparation, 0)?
        } else {
            let mut oracle = SubtourOracle { lp: &solved.lp, cuts: 0 };
            lp::is_unique_integral_optimum(&solved.lp.problem, &point, &vars, &mut oracle, MAX_SUBTOUR_ROUNDS)?
        };
        if unique {
            verdict = Verdict::Optimal(greedy.clone());
        }
    }
    Ok(TspReport { verdict, lp_value, greedy_cost, lp_integral, cuts: solved.cuts })
}

/// Consequences of stability evaluated on a tour.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TourProperties {
    /// Largest ratio between consecutive tour edges, in either order.
    pub max_ratio: Rational,
    /// `(q+1)²/(q²+1)` at `q = max_ratio`; no instance with this tour as its optimum is
    /// γ-stable for γ above it.
    pub stability_ceiling: Rational,
    /// `(u, v, holds)` for each pair not adjacent on the tour, where `holds` means
    /// `w(u,v)` exceeds half the sum of any tour edge at `u` and any tour edge at `v`.
    pub non_edges: Vec<(usize, usize, bool)>,
}

impl TourProperties {
    pub fn all_non_edges_hold(&self) -> bool {
        self.non_edges.iter().all(|e| e.2)
    }

    /// True when the tour's edge ratios already rule out γ-stability.
    pub fn refutes(&self, gamma: &Rational) -> bool {
        *gamma > self.stability_ceiling
    }
}

pub fn ratio_ceiling(q: &Rational) -> Rational {
    let one = Rational::one();
    let a = q + &one;
    &a * &a / (q * q + one)
}

pub fn check_stable_tour_properties(metric: &Metric, tour: &[usize]) -> TourProperties {
    let n = tour.len();
    let w = |i: usize| metric.dist(tour[i % n], tour[(i + 1) % n]).clone();
    let mut max_ratio = Rational::one();
    for i in 0..n {
        let (a, b) = (w(i), w(i + 1));
        let r = if a > b { &a / &b } else { &b / &a };
        if r > max_ratio {
            max_ratio = r;
        }
    }
    let mut pos = vec![0; metric.n];
    for (i, &v) in tour.iter().enumerate() {
        pos[v] = i;
    }
    let heaviest = |v: usize| {
        let p = pos[v];
        let (a, b) = (w(p), w(p + n - 1));
        if a > b { a } else { b }
    };
    let edges = tour_edges(tour);
    let mut non_edges = vec![];
    for u in 0..metric.n {
        for v in u + 1..metric.n {
            if !edges.contains(&(u, v)) {
                let half = (heaviest(u) + heaviest(v)) / Rational::from_int(2);
                non_edges.push((u, v, *metric.dist(u, v) > half));
            }
        }
    }
    TourProperties { stability_ceiling: ratio_ceiling(&max_ratio), max_ratio, non_edges }
}

/// Random integer weights in `1..=max_weight` closed under shortest paths.
pub fn gen_random_metric(n: usize, max_weight: i64, seed: u64) -> Result<Metric> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x = Rational::from_int(rng.gen_range(1..=max_weight.max(1)));
            w[i][j] = Some(x.clone());
            w[j][i] = Some(x);
        }
    }
    Ok(Metric::shortest_path_closure(n, &w)?)
}

/// Unit square with both diagonals of length `diagonal`, vertices in cyclic order.
pub fn square(diagonal: Rational) -> Metric {
    let (o, z) = (Rational::one(), Rational::zero());
    let d = diagonal;
    Metric::new(vec![
        vec![z.clone(), o.clone(), d.clone(), o.clone()],
        vec![o.clone(), z.clone(), o.clone(), d.clone()],
        vec![d.clone(), o.clone(), z.clone(), o.clone()],
        vec![o.clone(), d, o, z],
    ])
    .expect("valid for diagonal in [1, 2]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Instance;
    use crate::rational::q;
    use crate::stability_oracle::{brute_force_optimum, stability_margin, EnumerationBudget};
    use proptest::prelude::*;

    #[test]
    fn greedy_on_square_and_triangle() {
        let m = square(q(19, 10));
        assert_eq!(greedy_tour(&m).unwrap(), Solution::Tour(vec![0, 1, 2, 3]));
        let tri = Metric::new(vec![vec![q(0, 1), q(1, 1), q(1, 1)], vec![q(1, 1), q(0, 1), q(1, 1)], vec![q(1, 1), q(1, 1), q(0, 1)]]).unwrap();
        let Solution::Tour(t) = greedy_tour(&tri).unwrap() else { unreachable!() };
        assert_eq!(tour_cost(&tri, &t), q(3, 1));
        assert!(greedy_tour(&Metric::new(vec![vec![q(0, 1)]]).unwrap()).is_err());
    }

    #[test]
    fn square_is_certified_with_and_without_cuts() {
        let m = square(q(19, 10));
        for cc in [false, true] {
            let rep = tsp_robust(&m, cc).unwrap();
            assert_eq!(rep.lp_value, q(4, 1));
            assert_eq!(rep.verdict, Verdict::Optimal(Solution::Tour(vec![0, 1, 2, 3])));
        }
    }

    #[test]
    fn tied_square_is_not_stable() {
        let rep = tsp_robust(&square(q(1, 1)), false).unwrap();
        assert_eq!(rep.lp_value, q(4, 1));
        assert_eq!(rep.verdict, Verdict::NotStable);
    }

    #[test]
    fn two_triangles_need_a_cut() {
        // Two unit triangles joined by edges of length 10: the cycle cover splits them.
        let n = 6;
        let d = (0..n)
            .map(|i| (0..n).map(|j| if i == j { q(0, 1) } else if i / 3 == j / 3 { q(1, 1) } else { q(10, 1) }).collect())
            .collect();
        let m = Metric::new(d).unwrap();
        let cc = solve_tour_lp(&m, true).unwrap();
        assert_eq!(cc.solution.objective, q(6, 1));
        let full = solve_tour_lp(&m, false).unwrap();
        assert!(full.cuts >= 1);
        assert_eq!(full.solution.objective, q(24, 1));
        let (opt, val, _) = brute_force_optimum(&Instance::Tsp(m.clone()), &EnumerationBudget::default()).unwrap();
        assert_eq!(val, q(24, 1));
        assert!(Instance::Tsp(m).check_feasible(&opt).unwrap());
    }

    #[test]
    fn property_examples() {
        let p = check_stable_tour_properties(&square(q(19, 10)), &[0, 1, 2, 3]);
        assert_eq!(p.max_ratio, q(1, 1));
        assert_eq!(p.stability_ceiling, q(2, 1));
        assert!(p.all_non_edges_hold());
        assert_eq!(ratio_ceiling(&q(3, 1)), q(8, 5));
        // Collinear 0-1-4: tour edges 1, 3, 4.
        let line = Metric::new(vec![vec![q(0, 1), q(1, 1), q(4, 1)], vec![q(1, 1), q(0, 1), q(3, 1)], vec![q(4, 1), q(3, 1), q(0, 1)]]).unwrap();
        let p = check_stable_tour_properties(&line, &[0, 1, 2]);
        assert_eq!(p.max_ratio, q(4, 1));
        assert!(p.refutes(&q(9, 5)));
    }

    #[test]
    fn cut_routines_agree() {
        for seed in 0..20 {
            let m = gen_random_metric(7, 9, seed).unwrap();
            let w: Vec<Vec<Rational>> = (0..7).map(|i| (0..7).map(|j| if i == j { q(0, 1) } else { m.dist(i, j).clone() }).collect()).collect();
            let (a, _) = brute_force_min_cut(&w);
            let (b, side) = stoer_wagner(&w);
            assert_eq!(a, b);
            assert_eq!(cut_value(&w, &side), b);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn relaxation_and_certificate(n in 3usize..7, seed in any::<u64>()) {
            let m = gen_random_metric(n, 12, seed).unwrap();
            let inst = Instance::Tsp(m.clone());
            let b = EnumerationBudget::default();
            let (_, opt, _) = brute_force_optimum(&inst, &b).unwrap();
            let rep = tsp_robust(&m, false).unwrap();
            prop_assert!(rep.lp_value <= opt);
            let Solution::Tour(t) = greedy_tour(&m).unwrap() else { unreachable!() };
            prop_assert!(inst.check_feasible(&Solution::Tour(t)).unwrap());
            let sr = stability_margin(&inst, &b).unwrap();
            if let Verdict::Optimal(s) = &rep.verdict {
                prop_assert_eq!(inst.solution_cost(s).unwrap(), opt.clone());
                prop_assert!(sr.is_unique_optimum);
            }
            if sr.gamma_star >= q(9, 5) {
                prop_assert_eq!(rep.lp_value, opt.clone());
            }
            if sr.is_unique_optimum && !sr.gamma_star.is_infinite() {
                let Solution::Tour(ot) = &sr.optimum else { unreachable!() };
                let props = check_stable_tour_properties(&m, ot);
                prop_assert!(sr.gamma_star <= props.stability_ceiling);
                if sr.gamma_star >= q(9, 5) {
                    prop_assert!(props.all_non_edges_hold());
                }
            }
        }
    }
}
