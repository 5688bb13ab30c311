//! Certificates: what `solve` prints and `verify` re-checks.

use serde::{Deserialize, Serialize};

use super::io::{IoError, InstanceFile, ProblemKind};
use crate::model::{Instance, Solution};
use crate::rational::{ExtRational, Rational};
use crate::stability_oracle::StabilityReport;

/// Solutions by vertex name; centers of Steiner instances use facility names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolutionFile {
    EdgeCut { edges: Vec<(String, String)> },
    NodeCut { vertices: Vec<String> },
    IndependentSet { vertices: Vec<String> },
    Clustering { centers: Vec<String>, assignment: Vec<String> },
    Tour { order: Vec<String> },
}

fn center_names(file: &InstanceFile) -> &[String] {
    file.facility_names().unwrap_or(&file.vertices)
}

fn find(names: &[String], s: &str) -> Result<usize, IoError> {
    names.iter().position(|n| n == s).ok_or_else(|| IoError::UnknownName(s.to_string()))
}

impl SolutionFile {
    pub fn from_solution(sol: &Solution, inst: &Instance, file: &InstanceFile) -> Self {
        let v = |xs: &[usize]| xs.iter().map(|&i| file.vertices[i].clone()).collect::<Vec<_>>();
        match sol {
            Solution::EdgeCut(ids) => {
                let Instance::EdgeMc(m) = inst else { unreachable!("edge cut on a non-cut instance") };
                let edges = ids.iter().map(|&e| (file.vertices[m.graph.edges[e].u].clone(), file.vertices[m.graph.edges[e].v].clone())).collect();
                SolutionFile::EdgeCut { edges }
            }
            Solution::NodeCut(s) => SolutionFile::NodeCut { vertices: v(s) },
            Solution::IndependentSet(s) => SolutionFile::IndependentSet { vertices: v(s) },
            Solution::Clustering { centers, assignment } => {
                let c = center_names(file);
                SolutionFile::Clustering {
                    centers: centers.iter().map(|&i| c[i].clone()).collect(),
                    assignment: assignment.iter().map(|&i| c[i].clone()).collect(),
                }
            }
            Solution::Tour(t) => SolutionFile::Tour { order: v(t) },
        }
    }

    pub fn to_solution(&self, inst: &Instance, file: &InstanceFile) -> Result<Solution, IoError> {
        let vs = |xs: &[String]| xs.iter().map(|s| find(&file.vertices, s)).collect::<Result<Vec<_>, _>>();
        Ok(match self {
            SolutionFile::EdgeCut { edges } => {
                let Instance::EdgeMc(m) = inst else { return Err(IoError::Missing("an edge_mc instance")) };
                let mut ids = vec![];
                for (a, b) in edges {
                    let (a, b) = (find(&file.vertices, a)?, find(&file.vertices, b)?);
                    let (a, b) = (a.min(b), a.max(b));
                    let id = m.graph.edges.iter().position(|e| e.u == a && e.v == b);
                    ids.push(id.ok_or_else(|| IoError::UnknownName(format!("{}-{}", file.vertices[a], file.vertices[b])))?);
                }
                Solution::edge_cut(ids)
            }
            SolutionFile::NodeCut { vertices } => Solution::node_cut(vs(vertices)?),
            SolutionFile::IndependentSet { vertices } => Solution::independent_set(vs(vertices)?),
            SolutionFile::Clustering { centers, assignment } => {
                let c = center_names(file);
                let mut centers = centers.iter().map(|s| find(c, s)).collect::<Result<Vec<_>, _>>()?;
                centers.sort_unstable();
                let assignment = assignment.iter().map(|s| find(c, s)).collect::<Result<Vec<_>, _>>()?;
                Solution::Clustering { centers, assignment }
            }
            SolutionFile::Tour { order } => Solution::Tour(vs(order)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Optimal,
    NotStable,
    /// Output of a non-robust heuristic; optimal only if the input meets its stability assumption.
    Candidate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityFile {
    pub gamma_star: ExtRational,
    pub unique_optimum: bool,
    pub optimum: SolutionFile,
    pub optimum_value: Rational,
    pub witness: Option<SolutionFile>,
}

impl StabilityFile {
    pub fn new(rep: &StabilityReport, inst: &Instance, file: &InstanceFile) -> Self {
        StabilityFile {
            gamma_star: rep.gamma_star.clone(),
            unique_optimum: rep.is_unique_optimum,
            optimum: SolutionFile::from_solution(&rep.optimum, inst, file),
            optimum_value: rep.optimum_value.clone(),
            witness: rep.witness.as_ref().map(|w| SolutionFile::from_solution(w, inst, file)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub problem: ProblemKind,
    pub method: String,
    pub verdict: VerdictKind,
    pub solution: Option<SolutionFile>,
    pub objective: Option<Rational>,
    pub lp_value: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityFile>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub problem_matches: bool,
    pub feasible: bool,
    pub objective_matches: bool,
    pub valid: bool,
}

/// Re-derives feasibility and cost of the certificate's solution from the instance alone.
/// A `NotStable` certificate carries no solution and is valid when it claims none.
pub fn verify(cert: &Certificate, file: &InstanceFile) -> Result<VerifyReport, IoError> {
    let inst = file.to_instance()?;
    let problem_matches = cert.problem == file.problem;
    let (feasible, objective_matches) = match (&cert.solution, cert.verdict) {
        (None, VerdictKind::NotStable) => (true, cert.objective.is_none()),
        (None, _) => (false, false),
        (Some(s), _) => {
            let sol = s.to_solution(&inst, file)?;
            let feasible = inst.check_feasible(&sol)?;
            let cost = if feasible { Some(inst.solution_cost(&sol)?) } else { None };
            (feasible, cost.is_some() && cost == cert.objective)
        }
    };
    Ok(VerifyReport { problem_matches, feasible, objective_matches, valid: problem_matches && feasible && objective_matches })
}
