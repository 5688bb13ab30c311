//! Clustering: the k-center polytope with a robust algorithm, the k-median LP,
//! and gap instances that are perturbation-resilient yet have fractional LP optima.

use std::collections::{BTreeMap, BTreeSet};

use crate::lp::{self, LpError, LpProblem, LpStatus, NoSeparation, Relation};
use crate::model::{FacilityMode, Instance, Metric, MetricInstance, ModelError, RobustReport, Sense, Solution, Verdict};
use crate::rational::Rational;
use crate::stability_oracle::{self, EnumerationBudget, OracleError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClusteringError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("k-center needs centers chosen among the points")]
    SteinerUnsupported,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, ClusteringError>;

/// `B(u, r)`: candidate centers within distance `r` of point `u`.
pub fn ball(inst: &MetricInstance, u: usize, r: &Rational) -> Vec<usize> {
    (0..inst.num_candidates()).filter(|&c| inst.to_center(u, c) <= r).collect()
}

/// The k-center polytope `𝒫(R)` as a feasibility LP.
#[derive(Debug, Clone, PartialEq)]
pub struct KCenterPolytope {
    pub radius: Rational,
    /// `x[u][v]` is the variable of point `u` served by candidate `v`.
    pub x: Vec<Vec<usize>>,
    pub y: Vec<usize>,
    pub problem: LpProblem,
}

impl KCenterPolytope {
    pub fn new(inst: &MetricInstance, radius: &Rational) -> Self {
        let (n, c) = (inst.n(), inst.num_candidates());
        let mut p = LpProblem::new(Sense::Minimize);
        let unit = |p: &mut LpProblem| {
            let v = p.add_var(Rational::zero());
            p.set_bounds(v, Some(Rational::zero()), Some(Rational::one()));
            v
        };
        let y: Vec<usize> = (0..c).map(|_| unit(&mut p)).collect();
        let x: Vec<Vec<usize>> = (0..n).map(|_| (0..c).map(|_| unit(&mut p)).collect()).collect();
        p.add_constraint(y.iter().map(|&v| (v, Rational::one())).collect(), Relation::Le, Rational::from(inst.k));
        for u in 0..n {
            for v in 0..c {
                p.add_constraint(vec![(x[u][v], Rational::one()), (y[v], -Rational::one())], Relation::Le, Rational::zero());
            }
            let inside = ball(inst, u, radius);
            let outside: Vec<usize> = (0..c).filter(|v| !inside.contains(v)).collect();
            p.add_constraint(inside.iter().map(|&v| (x[u][v], Rational::one())).collect(), Relation::Ge, Rational::one());
            if !outside.is_empty() {
                p.add_constraint(outside.iter().map(|&v| (x[u][v], Rational::one())).collect(), Relation::Eq, Rational::zero());
            }
        }
        KCenterPolytope { radius: radius.clone(), x, y, problem: p }
    }

    /// A point of the polytope, or `None` if it is empty.
    pub fn feasible_point(&self) -> Result<Option<Vec<Rational>>> {
        let sol = lp::solve(&self.problem)?;
        Ok(match sol.status {
            LpStatus::Optimal => Some(sol.values),
            _ => None,
        })
    }

    /// `supp_u`: candidates with positive `x_{uv}` at `point`.
    pub fn support(&self, point: &[Rational], u: usize) -> Vec<usize> {
        (0..self.y.len()).filter(|&v| point[self.x[u][v]].is_positive()).collect()
    }
}

/// Outcome of the greedy cover when more than `k` balls are needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TooManyCenters {
    pub needed: usize,
}

/// Greedy cover: take the lowest remaining point, remove its `2R`-ball, repeat. The
/// chosen points become centers and every point goes to its nearest one.
pub fn kcenter_greedy(inst: &MetricInstance, r: &Rational) -> Result<std::result::Result<Solution, TooManyCenters>> {
    if inst.facilities != FacilityMode::NoSteiner {
        return Err(ClusteringError::SteinerUnsupported);
    }
    if r.is_negative() {
        return Err(ClusteringError::InvalidParameter("radius must be nonnegative".into()));
    }
    let two_r = r * Rational::from_int(2);
    let mut alive: BTreeSet<usize> = (0..inst.n()).collect();
    let mut centers = vec![];
    while let Some(&u) = alive.iter().next() {
        centers.push(u);
        alive.retain(|&v| *inst.metric.dist(u, v) > two_r);
    }
    if centers.len() > inst.k {
        return Ok(Err(TooManyCenters { needed: centers.len() }));
    }
    Ok(Ok(Solution::clustering(inst, centers)))
}

/// Cost of a clustering under the k-center objective.
pub fn kcenter_cost(inst: &MetricInstance, sol: &Solution) -> Result<Rational> {
    Ok(Instance::KCenter(inst.clone()).solution_cost(sol)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KCenterReport {
    pub verdict: Verdict,
    /// Smallest candidate radius with a nonempty polytope.
    pub r_bar: Rational,
    /// Cost of the greedy clustering at `r_bar`.
    pub r_greedy: Rational,
    pub polytope: KCenterPolytope,
    /// The polytope point found at `r_bar`.
    pub point: Vec<Rational>,
}

/// Robust algorithm for 2-metric-perturbation-resilient k-center: find the smallest
/// pairwise distance `R̄` with `𝒫(R̄) ≠ ∅` (by bisection, since feasibility is monotone
/// in `R`), run the greedy cover at `R̄`, and accept iff its cost equals `R̄`.
pub fn kcenter_robust(inst: &MetricInstance) -> Result<KCenterReport> {
    if inst.facilities != FacilityMode::NoSteiner {
        return Err(ClusteringError::SteinerUnsupported);
    }
    let radii = inst.metric.distinct_distances();
    let (mut lo, mut hi) = (0, radii.len() - 1);
    let mut found = None;
    // The largest distance always admits a single center, so `hi` is feasible.
    while lo < hi {
        let mid = (lo + hi) / 2;
        let poly = KCenterPolytope::new(inst, &radii[mid]);
        match poly.feasible_point()? {
            Some(pt) => {
                hi = mid;
                found = Some((poly, pt));
            }
            None => lo = mid + 1,
        }
    }
    let (polytope, point) = match found {
        Some((poly, pt)) if poly.radius == radii[lo] => (poly, pt),
        _ => {
            let poly = KCenterPolytope::new(inst, &radii[lo]);
            let pt = poly.feasible_point()?.expect("largest radius is feasible");
            (poly, pt)
        }
    };
    let r_bar = radii[lo].clone();
    let greedy = kcenter_greedy(inst, &r_bar)?.expect("a nonempty polytope bounds the greedy cover by k");
    let r_greedy = kcenter_cost(inst, &greedy)?;
    let verdict = if r_greedy == r_bar { Verdict::Optimal(greedy) } else { Verdict::NotStable };
    Ok(KCenterReport { verdict, r_bar, r_greedy, polytope, point })
}

/// Smallest k-center radius over all center sets.
pub fn kcenter_brute_force(inst: &MetricInstance, budget: &EnumerationBudget) -> Result<(Solution, Rational)> {
    let (s, v, _) = stability_oracle::brute_force_optimum(&Instance::KCenter(inst.clone()), budget)?;
    Ok((s, v))
}

/// Variables of the k-median LP.
#[derive(Debug, Clone, PartialEq)]
pub struct KMedianLp {
    pub x: Vec<Vec<usize>>,
    pub z: Vec<usize>,
    pub problem: LpProblem,
}

/// `min Σ d(u,f) x(u,f)` subject to `Σ_f x(u,f) = 1`, `x(u,f) ≤ z_f`, `Σ z_f ≤ k`.
pub fn build_kmedian_lp(inst: &MetricInstance) -> KMedianLp {
    let (n, c) = (inst.n(), inst.num_candidates());
    let mut p = LpProblem::new(Sense::Minimize);
    let z: Vec<usize> = (0..c).map(|_| p.add_var(Rational::zero())).collect();
    let x: Vec<Vec<usize>> = (0..n).map(|u| (0..c).map(|f| p.add_var(inst.to_center(u, f).clone())).collect()).collect();
    for u in 0..n {
        p.add_constraint(x[u].iter().map(|&v| (v, Rational::one())).collect(), Relation::Eq, Rational::one());
        for f in 0..c {
            p.add_constraint(vec![(x[u][f], Rational::one()), (z[f], -Rational::one())], Relation::Le, Rational::zero());
        }
    }
    p.add_constraint(z.iter().map(|&v| (v, Rational::one())).collect(), Relation::Le, Rational::from(inst.k));
    KMedianLp { x, z, problem: p }
}

/// LP-certified k-median: returns the clustering read off the relaxation when its
/// assignment variables are integral and form the only optimal assignment.
pub fn kmedian_lp_solve(inst: &MetricInstance) -> Result<RobustReport> {
    let lp = build_kmedian_lp(inst);
    let sol = lp::solve(&lp.problem)?;
    let xs: Vec<usize> = lp.x.iter().flatten().copied().collect();
    let mut verdict = Verdict::NotStable;
    if lp::is_integral(&sol, &xs) && lp::is_unique_integral_optimum(&lp.problem, &sol, &xs, &mut NoSeparation, 0)? {
        let assignment: Vec<usize> =
            lp.x.iter().map(|row| row.iter().position(|&v| sol.values[v].is_one()).expect("integral row")).collect();
        let centers: BTreeSet<usize> = assignment.iter().copied().collect();
        verdict = Verdict::Optimal(Solution::Clustering { centers: centers.into_iter().collect(), assignment });
    }
    Ok(RobustReport { verdict, lp_value: sol.objective })
}

/// The partition a clustering induces, as sorted clusters in order of their least point.
pub fn partition_of(sol: &Solution) -> Vec<Vec<usize>> {
    let Solution::Clustering { assignment, .. } = sol else { return vec![] };
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (u, &c) in assignment.iter().enumerate() {
        groups.entry(c).or_default().push(u);
    }
    let mut parts: Vec<Vec<usize>> = groups.into_values().collect();
    parts.sort();
    parts
}

/// Result of [`resilience_certificate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResilienceCertificate {
    pub optimum: Vec<Vec<usize>>,
    pub optimum_value: Rational,
    /// Cheapest clustering whose partition differs from the optimum.
    pub runner_up_value: Option<Rational>,
    /// `runner_up_value > γ · optimum_value`.
    pub holds: bool,
}

/// Sufficient condition for γ-metric-perturbation resilience. A γ-perturbation scales
/// the optimum's cost by at most γ and never lowers any other cost, so the optimal
/// partition survives if every other partition already costs more than `γ · OPT`.
pub fn resilience_certificate(inst: &Instance, gamma: &Rational, budget: &EnumerationBudget) -> Result<ResilienceCertificate> {
    if !matches!(inst, Instance::KCenter(_) | Instance::KMedian(_)) {
        return Err(ClusteringError::InvalidParameter("clustering instance expected".into()));
    }
    let mut best: BTreeMap<Vec<Vec<usize>>, Rational> = BTreeMap::new();
    for s in stability_oracle::enumerate_solutions(inst, budget)? {
        let c = inst.solution_cost(&s)?;
        let e = best.entry(partition_of(&s)).or_insert_with(|| c.clone());
        if c < *e {
            *e = c;
        }
    }
    let (opt, opt_val) = best.iter().min_by(|a, b| a.1.cmp(b.1)).map(|(p, v)| (p.clone(), v.clone())).expect("some clustering");
    let runner_up_value = best.iter().filter(|(p, _)| **p != opt).map(|(_, v)| v.clone()).min();
    let holds = runner_up_value.as_ref().map_or(true, |r| *r > gamma * &opt_val);
    Ok(ResilienceCertificate { optimum: opt, optimum_value: opt_val, runner_up_value, holds })
}

/// Gap families for the k-median LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapVariant {
    Steiner,
    NoSteiner,
}

/// Intra-distance of the points inside one super-vertex.
pub fn super_vertex_spread() -> Rational {
    Rational::new(1, 1_000_000)
}

/// Ratio of consecutive Fibonacci numbers just below the golden ratio φ with
/// `|α − φ| < 10⁻⁹`, so that `α² < α + 1` holds exactly.
pub fn golden_ratio_approx() -> Rational {
    let tol = Rational::new(1, 1_000_000_000);
    let (mut a, mut b) = (1i64, 1i64);
    loop {
        let (na, nb) = (b, a + b);
        a = na;
        b = nb;
        let r = Rational::new(b, a);
        // φ − r = −(r² − r − 1)/(r − ψ) with ψ = 1 − φ and r − ψ > 2.
        let f = &r * &r - &r - Rational::one();
        if f.is_negative() && -f < &tol * Rational::from_int(2) {
            return r;
        }
    }
}

/// `δ = n/(n−1)²` for the Steiner family.
pub fn steiner_delta(n: usize) -> Rational {
    Rational::new(n as i64, ((n - 1) * (n - 1)) as i64)
}

/// The two gap families with `k = n − 1`.
///
/// Steiner: points `u_1..u_n` (ids `0..n`), facilities `f_i ≡ u_i` plus a hub `f_{n+1}`
/// at distance 1 from every point; `d(u_{n−1}, u_n) = 1 + n/(n−1)²`.
///
/// No Steiner: `n` super-vertices `U_i` of `n` points each (ids `(i−1)n..in`) at
/// pairwise distance 10⁻⁶, and a hub `v` (id `n²`); `d(U_1, v) = 1/α`, `d(U_i, v) = 1`
/// otherwise, `d(U_{n−1}, U_n) = 1 + 2/(αn)` with α the golden ratio approximation.
pub fn gen_kmedian_gap(variant: GapVariant, n: usize) -> Result<MetricInstance> {
    if n < 4 {
        return Err(ClusteringError::InvalidParameter("n must be at least 4".into()));
    }
    let one = Rational::one();
    match variant {
        GapVariant::Steiner => {
            let delta = steiner_delta(n);
            let m = n + 1;
            let mut w: Vec<Vec<Option<Rational>>> = vec![vec![None; m]; m];
            let mut link = |a: usize, b: usize, l: Rational| {
                w[a][b] = Some(l.clone());
                w[b][a] = Some(l);
            };
            for i in 0..n {
                link(i, n, one.clone());
            }
            link(n - 2, n - 1, &one + &delta);
            let full = Metric::shortest_path_closure(m, &w)?;
            let points = Metric::new((0..n).map(|i| full.d[i][..n].to_vec()).collect())?;
            let cross = (0..n).map(|i| full.d[i].clone()).collect();
            Ok(MetricInstance::new(points, n - 1, FacilityMode::Steiner { facilities: m, cross })?)
        }
        GapVariant::NoSteiner => {
            let alpha = golden_ratio_approx();
            let delta = Rational::from_int(2) / (&alpha * Rational::from(n));
            let hub = n * n;
            let m = hub + 1;
            let spread = super_vertex_spread();
            let mut w: Vec<Vec<Option<Rational>>> = vec![vec![None; m]; m];
            let mut link = |a: usize, b: usize, l: &Rational| {
                w[a][b] = Some(l.clone());
                w[b][a] = Some(l.clone());
            };
            let members = |i: usize| (i * n)..((i + 1) * n);
            for i in 0..n {
                for a in members(i) {
                    for b in members(i) {
                        if a < b {
                            link(a, b, &spread);
                        }
                    }
                    link(a, hub, &if i == 0 { alpha.recip() } else { one.clone() });
                }
            }
            let blue = &one + &delta;
            for a in members(n - 2) {
                for b in members(n - 1) {
                    link(a, b, &blue);
                }
            }
            Ok(MetricInstance::plain(Metric::shortest_path_closure(m, &w)?, n - 1)?)
        }
    }
}

/// The explicit fractional point of each gap family, as a full LP vector for
/// [`build_kmedian_lp`]. Its cost is below the integral optimum.
pub fn kmedian_gap_fractional_point(variant: GapVariant, n: usize, lp: &KMedianLp) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); lp.problem.num_vars];
    let big = Rational::new((n - 2) as i64, (n - 1) as i64);
    let small = Rational::new(1, (n - 1) as i64);
    match variant {
        GapVariant::Steiner => {
            for i in 0..n {
                v[lp.z[i]] = big.clone();
                v[lp.x[i][i]] = big.clone();
                v[lp.x[i][n]] = small.clone();
            }
            v[lp.z[n]] = small;
        }
        GapVariant::NoSteiner => {
            let hub = n * n;
            for i in 0..n {
                let c = i * n;
                v[lp.z[c]] = big.clone();
                for u in c..c + n {
                    v[lp.x[u][c]] = big.clone();
                }
            }
            v[lp.z[hub]] = small.clone();
            for u in 0..=hub {
                v[lp.x[u][hub]] = small.clone();
            }
            v[lp.x[hub][0]] = big;
        }
    }
    v
}

/// Resilience factor claimed for each family: `(2 − δ)/(1 + δ)` with Steiner points,
/// `α · αn/(αn + 4)` without.
pub fn gap_resilience(variant: GapVariant, n: usize) -> Rational {
    match variant {
        GapVariant::Steiner => {
            let d = steiner_delta(n);
            (Rational::from_int(2) - &d) / (Rational::one() + &d)
        }
        GapVariant::NoSteiner => {
            let a = golden_ratio_approx();
            let an = &a * Rational::from(n);
            &a * &an / (&an + Rational::from_int(4))
        }
    }
}

/// The inequalities behind each family's optimality and resilience argument, evaluated
/// exactly at the generator's parameters, as `(description, holds)`.
pub fn gap_case_inequalities(variant: GapVariant, n: usize) -> Vec<(&'static str, bool)> {
    let one = Rational::one();
    let two = Rational::from_int(2);
    let nn = Rational::from(n);
    let gamma = gap_resilience(variant, n);
    match variant {
        GapVariant::Steiner => {
            let d = steiner_delta(n);
            let opt = &one + &d;
            vec![
                ("opening the hub or two of the close pair costs at least 2 > OPT", two > opt),
                ("a close point joining a singleton costs 2 > γ·OPT", &gamma * &opt < two),
                ("γ·OPT = 2 − δ", &gamma * &opt == &two - &d),
                ("fractional cost n/(n−1) < OPT", Rational::new(n as i64, n as i64 - 1) < opt),
            ]
        }
        GapVariant::NoSteiner => {
            let a = golden_ratio_approx();
            let ia = a.recip();
            let three = Rational::from_int(3);
            let opt = &nn + &three * &ia;
            let an = &a * &nn;
            vec![
                ("a center at the hub costs n + n/α > n + 3/α", &nn + &nn * &ia > opt),
                ("splitting the blue pair costs n(1 + 1/α) + 1/α > n + 3/α", &nn * (&one + &ia) + &ia > opt),
                ("γ·OPT < αn", &gamma * &opt < an),
                ("αn < 2n", an < &two * &nn),
                ("α in (3/2, 2)", a > Rational::new(3, 2) && a < two),
                ("α ≤ 1 + 1/α", a <= &one + &ia),
                ("γ < α", gamma < a),
                ("fractional cost n + 2/α < n + 3/α", &nn + &two * &ia < opt),
            ]
        }
    }
}

/// Two pairs at distance 1 with cross distance 100; `k = 2`.
pub fn two_pairs() -> MetricInstance {
    let (a, b) = (Rational::one(), Rational::from_int(100));
    let z = Rational::zero();
    let d = vec![
        vec![z.clone(), a.clone(), b.clone(), b.clone()],
        vec![a.clone(), z.clone(), b.clone(), b.clone()],
        vec![b.clone(), b.clone(), z.clone(), a.clone()],
        vec![b.clone(), b.clone(), a, z],
    ];
    MetricInstance::plain(Metric::new(d).expect("valid metric"), 2).expect("k = 2 fits")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn line(n: usize, k: usize) -> MetricInstance {
        let d = (0..n).map(|i| (0..n).map(|j| Rational::from((i as i64 - j as i64).abs())).collect()).collect();
        MetricInstance::plain(Metric::new(d).unwrap(), k).unwrap()
    }

    #[test]
    fn greedy_examples() {
        let tp = two_pairs();
        for r in [q(1, 1), q(1, 2)] {
            let s = kcenter_greedy(&tp, &r).unwrap().unwrap();
            assert_eq!(partition_of(&s), vec![vec![0, 1], vec![2, 3]]);
            assert_eq!(kcenter_cost(&tp, &s).unwrap(), q(1, 1));
        }
        assert_eq!(kcenter_greedy(&tp, &q(1, 3)).unwrap(), Err(TooManyCenters { needed: 4 }));
        let l = line(3, 3);
        let s = kcenter_greedy(&l, &q(1, 3)).unwrap().unwrap();
        assert_eq!(kcenter_cost(&l, &s).unwrap(), q(0, 1));
    }

    #[test]
    fn robust_examples() {
        let rep = kcenter_robust(&two_pairs()).unwrap();
        assert_eq!(rep.r_bar, q(1, 1));
        assert!(rep.verdict.is_optimal());
        assert_eq!(partition_of(rep.verdict.solution().unwrap()), vec![vec![0, 1], vec![2, 3]]);
        let rep = kcenter_robust(&line(3, 1)).unwrap();
        assert_eq!(rep.r_bar, q(1, 1));
        // Greedy starts at the endpoint and pays 2; the line is not 2-resilient.
        assert_eq!(rep.r_greedy, q(2, 1));
        assert_eq!(rep.verdict, Verdict::NotStable);
        let rep = kcenter_robust(&line(4, 4)).unwrap();
        assert_eq!(rep.r_bar, q(0, 1));
        assert_eq!(rep.r_greedy, q(0, 1));
    }

    #[test]
    fn polytope_is_empty_below_optimum_on_two_pairs() {
        let tp = two_pairs();
        assert_eq!(KCenterPolytope::new(&tp, &q(99, 100)).feasible_point().unwrap(), None);
        assert!(KCenterPolytope::new(&tp, &q(1, 1)).feasible_point().unwrap().is_some());
    }

    #[test]
    fn golden_ratio_is_close_and_below() {
        let a = golden_ratio_approx();
        assert!(&a * &a < &a + q(1, 1));
        assert!(a > q(1618033988, 1_000_000_000) && a < q(1618033989, 1_000_000_000));
    }

    #[test]
    fn steiner_gap() {
        let inst = gen_kmedian_gap(GapVariant::Steiner, 4).unwrap();
        assert_eq!(steiner_delta(4), q(4, 9));
        assert_eq!(*inst.metric.dist(2, 3), q(13, 9));
        let lp = build_kmedian_lp(&inst);
        let sol = lp::solve(&lp.problem).unwrap();
        assert!(sol.objective <= q(4, 3));
        let pt = kmedian_gap_fractional_point(GapVariant::Steiner, 4, &lp);
        assert!(lp.problem.is_feasible(&pt));
        assert_eq!(lp.problem.objective_value(&pt), q(4, 3));
        let cert = resilience_certificate(&Instance::KMedian(inst), &gap_resilience(GapVariant::Steiner, 4), &Default::default()).unwrap();
        assert_eq!(cert.optimum_value, q(13, 9));
        assert_eq!(cert.optimum, vec![vec![0], vec![1], vec![2, 3]]);
        assert!(cert.holds);
        assert!(sol.objective < cert.optimum_value);
    }

    #[test]
    fn no_steiner_gap_shape() {
        let inst = gen_kmedian_gap(GapVariant::NoSteiner, 4).unwrap();
        assert_eq!(inst.n(), 17);
        let a = golden_ratio_approx();
        assert_eq!(*inst.metric.dist(0, 16), a.recip());
        assert_eq!(*inst.metric.dist(8, 12), q(1, 1) + q(2, 1) / (&a * q(4, 1)));
        assert_eq!(*inst.metric.dist(4, 5), super_vertex_spread());
        let lp = build_kmedian_lp(&inst);
        let pt = kmedian_gap_fractional_point(GapVariant::NoSteiner, 4, &lp);
        assert!(lp.problem.is_feasible(&pt));
        let frac = lp.problem.objective_value(&pt);
        let cert = resilience_certificate(&Instance::KMedian(inst), &gap_resilience(GapVariant::NoSteiner, 4), &Default::default()).unwrap();
        assert!(cert.holds);
        assert!(frac < cert.optimum_value);
    }

    #[test]
    fn kmedian_certified_on_two_pairs() {
        // Either point of a pair can serve it, so the LP optimum is not unique.
        let rep = kmedian_lp_solve(&two_pairs()).unwrap();
        assert_eq!(rep.lp_value, q(2, 1));
        assert_eq!(rep.verdict, Verdict::NotStable);
        // Two stars: hub at distance 1 from two leaves 2 apart, stars 100 apart.
        let d = (0..6)
            .map(|i| {
                (0..6)
                    .map(|j| match (i, j) {
                        _ if i == j => q(0, 1),
                        _ if i / 3 != j / 3 => q(100, 1),
                        _ if i % 3 == 0 || j % 3 == 0 => q(1, 1),
                        _ => q(2, 1),
                    })
                    .collect()
            })
            .collect();
        let stars = MetricInstance::plain(Metric::new(d).unwrap(), 2).unwrap();
        let rep = kmedian_lp_solve(&stars).unwrap();
        assert_eq!(rep.lp_value, q(4, 1));
        assert_eq!(rep.verdict, Verdict::Optimal(Solution::Clustering { centers: vec![0, 3], assignment: vec![0, 0, 0, 3, 3, 3] }));
        let gap = gen_kmedian_gap(GapVariant::Steiner, 4).unwrap();
        assert_eq!(kmedian_lp_solve(&gap).unwrap().verdict, Verdict::NotStable);
    }

    #[test]
    fn case_inequalities_hold() {
        for n in 4..9 {
            for v in [GapVariant::Steiner, GapVariant::NoSteiner] {
                for (what, ok) in gap_case_inequalities(v, n) {
                    assert!(ok, "{what} fails at n = {n}");
                }
            }
        }
    }

    #[test]
    fn trivial_kmedian_lp() {
        let l = line(3, 3);
        assert_eq!(lp::solve(&build_kmedian_lp(&l).problem).unwrap().objective, q(0, 1));
        assert!(gen_kmedian_gap(GapVariant::Steiner, 3).is_err());
    }

    fn random_metric(n: usize, raw: &[i64]) -> Metric {
        let mut w = vec![vec![None; n]; n];
        let mut it = raw.iter();
        for i in 0..n {
            for j in i + 1..n {
                let x = Rational::from_int(*it.next().unwrap());
                w[i][j] = Some(x.clone());
                w[j][i] = Some(x);
            }
        }
        Metric::shortest_path_closure(n, &w).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn relaxation_sandwich(n in 2usize..8, k in 1usize..4, raw in proptest::collection::vec(1i64..20, 28)) {
            let k = k.min(n);
            let inst = MetricInstance::plain(random_metric(n, &raw), k).unwrap();
            let (_, r_star) = kcenter_brute_force(&inst, &Default::default()).unwrap();
            prop_assert!(KCenterPolytope::new(&inst, &r_star).feasible_point().unwrap().is_some());
            let rep = kcenter_robust(&inst).unwrap();
            prop_assert!(rep.r_bar <= r_star);
            prop_assert!(rep.r_greedy <= &rep.r_bar * Rational::from_int(2));
            if let Verdict::Optimal(s) = &rep.verdict {
                prop_assert_eq!(kcenter_cost(&inst, s).unwrap(), r_star.clone());
                let Solution::Clustering { assignment, .. } = s else { unreachable!() };
                // Support lemma: every fractional center of u lies in u's returned cluster.
                for u in 0..n {
                    for v in rep.polytope.support(&rep.point, u) {
                        prop_assert_eq!(assignment[v], assignment[u]);
                    }
                }
            }
        }
    }
}
