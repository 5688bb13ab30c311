//! Command-line front end: `solve`, `generate`, `margin`, `verify` and `sweep`.
//!
//! Exit codes: 0 when a verdict or artifact was produced, 2 when `solve` reports
//! `NotStable`, 1 for usage, input or solver errors.

pub mod cert;
pub mod io;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use self::cert::{Certificate, SolutionFile, StabilityFile, VerdictKind};
use self::io::{InstanceFile, IoError, ProblemKind};
use crate::clustering::{self, ClusteringError, GapVariant};
use crate::independent_set::{self, MisError};
use crate::model::{Instance, Verdict};
use crate::multiway_cut::{self, McError};
use crate::node_multiway_cut::{self, NodeMcError};
use crate::rational::Rational;
use crate::stability_oracle::{self, EnumerationBudget, OracleError};
use crate::tsp::{self, TspError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_STABLE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    NodeMc(#[from] NodeMcError),
    #[error(transparent)]
    Mis(#[from] MisError),
    #[error(transparent)]
    Clustering(#[from] ClusteringError),
    #[error(transparent)]
    Tsp(#[from] TspError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("malformed certificate at line {line}, column {column}: {msg}")]
    Certificate { line: usize, column: usize, msg: String },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "stablecut", version, about = "Robust exact solvers for stable instances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Cap on solutions the brute-force oracle may enumerate; disables the size caps.
    /// Defaults to the STABLECUT_BUDGET environment variable.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    FreundKarloff,
    ScaledFreundKarloff,
    StarGap,
    Tight,
    Random,
    TwoPairs,
    GapSteiner,
    GapPlain,
    Square,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the robust algorithm for the instance and print a certificate.
    Solve {
        instance: String,
        /// Expected problem; must match the file.
        #[arg(long, value_enum)]
        problem: Option<ProblemKind>,
        /// Independent set: use the Sherali–Adams relaxation at this level.
        #[arg(long)]
        level: Option<usize>,
        /// TSP: drop the subtour cuts.
        #[arg(long)]
        cycle_cover_only: bool,
        /// Edge multiway cut: run the weakly-stable local search with this δ.
        #[arg(long)]
        delta: Option<Rational>,
        /// Attach the brute-force stability report.
        #[arg(long)]
        stability: bool,
    },
    /// Print an instance from one of the built-in families.
    Generate {
        #[arg(long, value_enum)]
        problem: ProblemKind,
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "2/5")]
        eps: Rational,
        #[arg(long, default_value = "11/10")]
        gamma: Rational,
        /// TSP square: length of both diagonals.
        #[arg(long, default_value = "19/10")]
        diagonal: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Brute-force stability margin; for clustering, the resilience check at `--gamma`.
    Margin {
        instance: String,
        #[arg(long)]
        gamma: Option<Rational>,
    },
    /// Re-check a certificate's solution against the instance.
    Verify { certificate: String, instance: String },
    /// CSV of LP integrality over a γ grid of instances made γ-stable around their optimum.
    Sweep {
        /// Source instance; defaults to the Freund–Karloff instance on `--k` terminals.
        instance: Option<String>,
        #[arg(long, value_enum, default_value = "edge_mc")]
        problem: ProblemKind,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "1")]
        gamma_min: Rational,
        #[arg(long, default_value = "2")]
        gamma_max: Rational,
        #[arg(long, default_value = "1/10")]
        gamma_step: Rational,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn budget(cli: &Cli) -> EnumerationBudget {
    match cli.budget {
        Some(n) => EnumerationBudget { max_solutions: n, enforce_caps: false },
        None => EnumerationBudget::from_env(),
    }
}

fn print_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    writeln!(out, "{text}").map_err(|e| CliError::Usage(e.to_string()))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Solve { instance, problem, level, cycle_cover_only, delta, stability } => {
            let file = InstanceFile::read(instance)?;
            if let Some(p) = problem {
                if *p != file.problem {
                    return Err(CliError::Usage(format!("--problem {p} but the file holds {}", file.problem)));
                }
            }
            let opts = SolveOptions { level: *level, cycle_cover_only: *cycle_cover_only, delta: delta.clone() };
            let mut cert = solve(&file, &opts)?;
            if *stability {
                let inst = file.to_instance()?;
                let rep = stability_oracle::stability_margin(&inst, &budget(cli))?;
                cert.stability = Some(StabilityFile::new(&rep, &inst, &file));
            }
            print_json(out, &cert)?;
            Ok(if cert.verdict == VerdictKind::NotStable { EXIT_NOT_STABLE } else { EXIT_OK })
        }
        Command::Generate { problem, family, k, n, eps, gamma, diagonal, seed } => {
            let inst = generate(*problem, *family, &GenOptions { k: *k, n: *n, eps: eps.clone(), gamma: gamma.clone(), diagonal: diagonal.clone(), seed: *seed })?;
            write!(out, "{}", InstanceFile::from_instance(&inst, None).to_json()).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(EXIT_OK)
        }
        Command::Margin { instance, gamma } => {
            let file = InstanceFile::read(instance)?;
            let inst = file.to_instance()?;
            if matches!(inst, Instance::KCenter(_) | Instance::KMedian(_)) {
                let gamma = gamma.clone().ok_or_else(|| CliError::Usage("clustering margins need --gamma".into()))?;
                let c = clustering::resilience_certificate(&inst, &gamma, &budget(cli))?;
                print_json(out, &serde_json::json!({
                    "gamma": gamma,
                    "resilient": c.holds,
                    "optimum_value": c.optimum_value,
                    "runner_up_value": c.runner_up_value,
                }))?;
            } else {
                let rep = stability_oracle::stability_margin(&inst, &budget(cli))?;
                print_json(out, &StabilityFile::new(&rep, &inst, &file))?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { certificate, instance } => {
            let text = std::fs::read_to_string(certificate).map_err(|source| IoError::Read { path: certificate.clone(), source })?;
            let cert: Certificate = serde_json::from_str(&text)
                .map_err(|e| CliError::Certificate { line: e.line(), column: e.column(), msg: e.to_string() })?;
            let file = InstanceFile::read(instance)?;
            let rep = cert::verify(&cert, &file)?;
            print_json(out, &rep)?;
            Ok(if rep.valid { EXIT_OK } else { EXIT_ERROR })
        }
        Command::Sweep { instance, problem, k, gamma_min, gamma_max, gamma_step } => {
            let source = match instance {
                Some(path) => InstanceFile::read(path)?.to_instance()?,
                None if *problem == ProblemKind::EdgeMc => Instance::EdgeMc(multiway_cut::gen_freund_karloff(*k)?),
                None => return Err(CliError::Usage("sweep needs an instance file for this problem".into())),
            };
            if ProblemKind::of(&source) != *problem && instance.is_some() {
                return Err(CliError::Usage(format!("--problem {problem} but the file holds {}", ProblemKind::of(&source))));
            }
            if !gamma_step.is_positive() || gamma_min > gamma_max {
                return Err(CliError::Usage("need gamma_step > 0 and gamma_min <= gamma_max".into()));
            }
            let mut grid = vec![];
            let mut g = gamma_min.clone();
            while g <= *gamma_max {
                grid.push(g.clone());
                g += gamma_step;
            }
            let rows = sweep(&source, &grid, &budget(cli))?;
            let mut text = String::from("gamma,integral,lp_value,opt_value\n");
            for r in rows {
                text.push_str(&format!("{},{},{},{}\n", r.gamma, r.integral, r.lp_value, r.opt_value));
            }
            write!(out, "{text}").map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(EXIT_OK)
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub level: Option<usize>,
    pub cycle_cover_only: bool,
    pub delta: Option<Rational>,
}

/// Runs the problem's robust algorithm and packages the result.
pub fn solve(file: &InstanceFile, opts: &SolveOptions) -> Result<Certificate, CliError> {
    let start = Instant::now();
    let inst = file.to_instance()?;
    let (method, verdict, lp_value): (&str, Verdict, Option<Rational>) = match &inst {
        Instance::EdgeMc(m) => match &opts.delta {
            Some(delta) => {
                let rep = multiway_cut::weakly_stable_solve(m, delta)?;
                let sol = SolutionFile::from_solution(&rep.solution, &inst, file);
                return Ok(Certificate {
                    problem: file.problem,
                    method: "weakly_stable_local_search".into(),
                    verdict: VerdictKind::Candidate,
                    solution: Some(sol),
                    objective: Some(rep.cost),
                    lp_value: None,
                    stability: None,
                    elapsed_ms: start.elapsed().as_millis() as u64,
                });
            }
            None => {
                let r = multiway_cut::robust_solve(m)?;
                ("ckr_lp", r.verdict, Some(r.lp_value))
            }
        },
        Instance::NodeMc(m) => {
            let r = node_multiway_cut::robust_solve_node(m)?;
            ("path_lp", r.verdict, Some(r.lp_value))
        }
        Instance::Mis(g) => {
            let r = match opts.level {
                Some(t) => independent_set::robust_sa(g, t)?,
                None => independent_set::robust_colorable(g)?,
            };
            (if opts.level.is_some() { "sherali_adams" } else { "mis_lp" }, r.verdict, Some(r.lp_value))
        }
        Instance::KCenter(m) => {
            let r = clustering::kcenter_robust(m)?;
            ("kcenter_polytope", r.verdict, Some(r.r_bar))
        }
        Instance::KMedian(m) => {
            let r = clustering::kmedian_lp_solve(m)?;
            ("kmedian_lp", r.verdict, Some(r.lp_value))
        }
        Instance::Tsp(m) => {
            let r = tsp::tsp_robust(m, opts.cycle_cover_only)?;
            (if opts.cycle_cover_only { "cycle_cover_lp" } else { "subtour_lp" }, r.verdict, Some(r.lp_value))
        }
    };
    let (kind, solution, objective) = match &verdict {
        Verdict::Optimal(s) => (VerdictKind::Optimal, Some(SolutionFile::from_solution(s, &inst, file)), Some(inst.solution_cost(s).map_err(IoError::from)?)),
        Verdict::NotStable => (VerdictKind::NotStable, None, None),
    };
    Ok(Certificate {
        problem: file.problem,
        method: method.into(),
        verdict: kind,
        solution,
        objective,
        lp_value,
        stability: None,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

#[derive(Debug, Clone)]
pub struct GenOptions {
    pub k: usize,
    pub n: Option<usize>,
    pub eps: Rational,
    pub gamma: Rational,
    pub diagonal: Rational,
    pub seed: u64,
}

pub fn generate(problem: ProblemKind, family: Family, o: &GenOptions) -> Result<Instance, CliError> {
    use Family as F;
    use ProblemKind as P;
    let n = |d: usize| o.n.unwrap_or(d);
    Ok(match (problem, family) {
        (P::EdgeMc, F::FreundKarloff) => Instance::EdgeMc(multiway_cut::gen_freund_karloff(o.k)?),
        (P::EdgeMc, F::ScaledFreundKarloff) => {
            let fk = multiway_cut::gen_freund_karloff(o.k)?;
            let opt = multiway_cut::freund_karloff_optimal_cut(&fk);
            Instance::EdgeMc(multiway_cut::gen_stable_from_opt(&fk, &o.gamma, Some(&opt))?)
        }
        (P::EdgeMc, F::Random) => Instance::EdgeMc(multiway_cut::gen_random(n(8), o.k, 0.5, 10, o.seed)?),
        (P::NodeMc, F::StarGap) => Instance::NodeMc(node_multiway_cut::gen_node_star_gap(o.k, &o.eps)?),
        (P::Mis, F::Tight) => Instance::Mis(independent_set::gen_colorable_tight(o.k, &o.eps, n(5))?),
        (P::Mis, F::Random) => Instance::Mis(independent_set::gen_random(n(8), 0.4, 10, o.seed)?),
        (P::Kcenter, F::TwoPairs) => Instance::KCenter(clustering::two_pairs()),
        (P::Kcenter | P::Kmedian, F::Random) => {
            let m = tsp::gen_random_metric(n(7), 20, o.seed)?;
            let mi = crate::model::MetricInstance::plain(m, o.k.min(n(7))).map_err(IoError::from)?;
            if problem == P::Kcenter { Instance::KCenter(mi) } else { Instance::KMedian(mi) }
        }
        (P::Kmedian, F::GapSteiner) => Instance::KMedian(clustering::gen_kmedian_gap(GapVariant::Steiner, n(4))?),
        (P::Kmedian, F::GapPlain) => Instance::KMedian(clustering::gen_kmedian_gap(GapVariant::NoSteiner, n(4))?),
        (P::Tsp, F::Square) => Instance::Tsp(tsp::square(o.diagonal.clone())),
        (P::Tsp, F::Random) => Instance::Tsp(tsp::gen_random_metric(n(6), 20, o.seed)?),
        (p, f) => {
            let f = f.to_possible_value().expect("named").get_name().to_string();
            return Err(CliError::Usage(format!("family {f} is not available for {p}")));
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub gamma: Rational,
    /// The integral optimum is the unique optimum of the relaxation.
    pub integral: bool,
    pub lp_value: Rational,
    pub opt_value: Rational,
}

/// For each γ, divides (or for independent set multiplies) the weights of the source
/// optimum by γ and records whether the relaxation certifies the optimum. γ = 1 keeps the
/// source unchanged. Grid points run on separate threads.
pub fn sweep(source: &Instance, grid: &[Rational], budget: &EnumerationBudget) -> Result<Vec<SweepRow>, CliError> {
    let opt = match source {
        Instance::EdgeMc(m) if m.terminals.len() >= 3 && is_freund_karloff(m) => multiway_cut::freund_karloff_optimal_cut(m),
        Instance::EdgeMc(_) | Instance::NodeMc(_) | Instance::Mis(_) => {
            let (s, _, ties) = stability_oracle::brute_force_optimum(source, budget)?;
            if !ties.is_empty() {
                return Err(CliError::Usage("the source instance has several optima".into()));
            }
            s.elements().expect("set solution").to_vec()
        }
        _ => return Err(CliError::Usage("sweep supports edge_mc, node_mc and mis".into())),
    };
    let one = Rational::one();
    std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .iter()
            .map(|gamma| {
                let opt = &opt;
                let one = &one;
                scope.spawn(move || -> Result<SweepRow, CliError> {
                    let scaled = gamma > one;
                    let (inst, rep) = match source {
                        Instance::EdgeMc(m) => {
                            let m = if scaled { multiway_cut::gen_stable_from_opt(m, gamma, Some(opt))? } else { m.clone() };
                            let r = multiway_cut::robust_solve(&m)?;
                            (Instance::EdgeMc(m), r)
                        }
                        Instance::NodeMc(m) => {
                            let m = if scaled { node_multiway_cut::gen_node_stable_from_opt(m, gamma, Some(opt))? } else { m.clone() };
                            let r = node_multiway_cut::robust_solve_node(&m)?;
                            (Instance::NodeMc(m), r)
                        }
                        Instance::Mis(g) => {
                            let g = if scaled { independent_set::gen_stable_from_opt(g, gamma, Some(opt))? } else { g.clone() };
                            let r = independent_set::robust_lp(&g)?;
                            (Instance::Mis(g), r)
                        }
                        _ => unreachable!(),
                    };
                    let (_, opt_value, _) = stability_oracle::brute_force_optimum(&inst, budget)?;
                    Ok(SweepRow { gamma: gamma.clone(), integral: rep.verdict.is_optimal(), lp_value: rep.lp_value, opt_value })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    })
}

fn is_freund_karloff(m: &crate::model::MultiwayCutInstance) -> bool {
    let k = m.terminals.len();
    multiway_cut::gen_freund_karloff(k).map_or(false, |fk| fk == *m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (vec![], vec![]);
        let code = run(std::iter::once("stablecut").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_ERROR);
        assert_eq!(run_str(&["solve", "/nonexistent.json"]).0, EXIT_ERROR);
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("sweep"));
    }

    #[test]
    fn generate_then_solve_square() {
        let (code, text, _) = run_str(&["generate", "--problem", "tsp", "--family", "square"]);
        assert_eq!(code, 0);
        let file = InstanceFile::parse(&text).unwrap();
        let cert = solve(&file, &SolveOptions::default()).unwrap();
        assert_eq!(cert.verdict, VerdictKind::Optimal);
        assert_eq!(cert.objective, Some(q(4, 1)));
        assert!(cert::verify(&cert, &file).unwrap().valid);
    }

    #[test]
    fn unavailable_family() {
        let (code, _, err) = run_str(&["generate", "--problem", "tsp", "--family", "star-gap"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("star-gap"));
    }

    #[test]
    fn sweep_rows_are_ordered() {
        let fk = Instance::EdgeMc(multiway_cut::gen_freund_karloff(3).unwrap());
        let rows = sweep(&fk, &[q(3, 2), q(1, 1)], &EnumerationBudget::default()).unwrap();
        assert_eq!(rows[0].gamma, q(3, 2));
        assert_eq!(rows[1].gamma, q(1, 1));
        assert_eq!(rows[1].opt_value, q(4, 1));
    }
}
