//! JSON instance files. Vertices are named; every number is an exact `"p/q"` string.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    EdgeWeightedGraph, FacilityMode, Instance, Metric, MetricInstance, ModelError, MultiwayCutInstance, NodeCutInstance,
    VertexWeightedGraph,
};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ProblemKind {
    EdgeMc,
    NodeMc,
    Mis,
    Kcenter,
    Kmedian,
    Tsp,
}

impl ProblemKind {
    pub fn of(inst: &Instance) -> Self {
        match inst {
            Instance::EdgeMc(_) => ProblemKind::EdgeMc,
            Instance::NodeMc(_) => ProblemKind::NodeMc,
            Instance::Mis(_) => ProblemKind::Mis,
            Instance::KCenter(_) => ProblemKind::Kcenter,
            Instance::KMedian(_) => ProblemKind::Kmedian,
            Instance::Tsp(_) => ProblemKind::Tsp,
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        write!(f, "{}", s.as_str().expect("string"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub u: String,
    pub v: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Rational>,
}

/// On-disk instance. Which optional fields are required depends on `problem`:
/// `edges` with weights for edge_mc; `weights` (per vertex) and unweighted `edges` for
/// node_mc and mis; `metric` for the rest; `terminals` for both cut problems; `k` for
/// clustering, with `facilities` and `cross` when centers are separate locations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub problem: ProblemKind,
    pub vertices: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<Rational>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminals: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facilities: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross: Option<Vec<Vec<Rational>>>,
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed JSON at line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
    #[error("missing field `{0}` for this problem")]
    Missing(&'static str),
    #[error("unknown vertex name `{0}`")]
    UnknownName(String),
    #[error("duplicate vertex name `{0}`")]
    DuplicateName(String),
    #[error("edge {0}-{1} needs a weight")]
    MissingWeight(String, String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json { line: e.line(), column: e.column(), msg: e.to_string() }
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

fn index_of(names: &[String]) -> Result<HashMap<&str, usize>, IoError> {
    let mut map = HashMap::new();
    for (i, s) in names.iter().enumerate() {
        if map.insert(s.as_str(), i).is_some() {
            return Err(IoError::DuplicateName(s.clone()));
        }
    }
    Ok(map)
}

fn lookup(map: &HashMap<&str, usize>, name: &str) -> Result<usize, IoError> {
    map.get(name).copied().ok_or_else(|| IoError::UnknownName(name.to_string()))
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &str) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })?;
        Self::parse(&text)
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn facility_names(&self) -> Option<&[String]> {
        self.facilities.as_deref()
    }

    /// Validates and converts into a library instance.
    pub fn to_instance(&self) -> Result<Instance, IoError> {
        let ids = index_of(&self.vertices)?;
        let n = self.vertices.len();
        let terminals = || -> Result<Vec<usize>, IoError> {
            self.terminals.as_ref().ok_or(IoError::Missing("terminals"))?.iter().map(|t| lookup(&ids, t)).collect()
        };
        let plain_edges = || -> Result<Vec<(usize, usize)>, IoError> {
            self.edges.iter().flatten().map(|e| Ok((lookup(&ids, &e.u)?, lookup(&ids, &e.v)?))).collect()
        };
        let metric = || -> Result<Metric, IoError> { Ok(Metric::new(self.metric.clone().ok_or(IoError::Missing("metric"))?)?) };
        Ok(match self.problem {
            ProblemKind::EdgeMc => {
                let mut edges = vec![];
                for e in self.edges.as_ref().ok_or(IoError::Missing("edges"))? {
                    let w = e.w.clone().ok_or_else(|| IoError::MissingWeight(e.u.clone(), e.v.clone()))?;
                    edges.push((lookup(&ids, &e.u)?, lookup(&ids, &e.v)?, w));
                }
                Instance::EdgeMc(MultiwayCutInstance::new(EdgeWeightedGraph::new(n, edges)?, terminals()?)?)
            }
            ProblemKind::NodeMc | ProblemKind::Mis => {
                let weights = self.weights.clone().ok_or(IoError::Missing("weights"))?;
                let g = VertexWeightedGraph::new(weights, plain_edges()?)?;
                if self.problem == ProblemKind::Mis {
                    Instance::Mis(g)
                } else {
                    Instance::NodeMc(NodeCutInstance::new(g, terminals()?)?)
                }
            }
            ProblemKind::Kcenter | ProblemKind::Kmedian => {
                let k = self.k.ok_or(IoError::Missing("k"))?;
                let mode = match (&self.facilities, &self.cross) {
                    (None, None) => FacilityMode::NoSteiner,
                    (Some(f), Some(c)) => {
                        index_of(f)?;
                        FacilityMode::Steiner { facilities: f.len(), cross: c.clone() }
                    }
                    (Some(_), None) => return Err(IoError::Missing("cross")),
                    (None, Some(_)) => return Err(IoError::Missing("facilities")),
                };
                let mi = MetricInstance::new(metric()?, k, mode)?;
                if self.problem == ProblemKind::Kcenter {
                    Instance::KCenter(mi)
                } else {
                    Instance::KMedian(mi)
                }
            }
            ProblemKind::Tsp => Instance::Tsp(metric()?),
        })
    }

    /// File for `inst` with the given vertex names (default `v0, v1, …`).
    pub fn from_instance(inst: &Instance, names: Option<Vec<String>>) -> Self {
        let n = match inst {
            Instance::EdgeMc(m) => m.graph.n,
            Instance::NodeMc(m) => m.graph.n,
            Instance::Mis(g) => g.n,
            Instance::KCenter(m) | Instance::KMedian(m) => m.n(),
            Instance::Tsp(m) => m.n,
        };
        let vertices = names.unwrap_or_else(|| default_names(n));
        let name = |i: usize| vertices[i].clone();
        let mut f = InstanceFile {
            problem: ProblemKind::of(inst),
            vertices: vertices.clone(),
            edges: None,
            weights: None,
            metric: None,
            terminals: None,
            k: None,
            facilities: None,
            cross: None,
        };
        let unweighted = |g: &VertexWeightedGraph| g.edges.iter().map(|&(u, v)| EdgeEntry { u: name(u), v: name(v), w: None }).collect();
        match inst {
            Instance::EdgeMc(m) => {
                f.edges = Some(m.graph.edges.iter().map(|e| EdgeEntry { u: name(e.u), v: name(e.v), w: Some(e.w.clone()) }).collect());
                f.terminals = Some(m.terminals.iter().map(|&t| name(t)).collect());
            }
            Instance::NodeMc(m) => {
                f.weights = Some(m.graph.weights.clone());
                f.edges = Some(unweighted(&m.graph));
                f.terminals = Some(m.terminals.iter().map(|&t| name(t)).collect());
            }
            Instance::Mis(g) => {
                f.weights = Some(g.weights.clone());
                f.edges = Some(unweighted(g));
            }
            Instance::KCenter(m) | Instance::KMedian(m) => {
                f.metric = Some(m.metric.d.clone());
                f.k = Some(m.k);
                if let FacilityMode::Steiner { facilities, cross } = &m.facilities {
                    f.facilities = Some((0..*facilities).map(|i| format!("f{i}")).collect());
                    f.cross = Some(cross.clone());
                }
            }
            Instance::Tsp(m) => f.metric = Some(m.d.clone()),
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiway_cut::gen_freund_karloff;

    #[test]
    fn freund_karloff_round_trip() {
        let inst = Instance::EdgeMc(gen_freund_karloff(3).unwrap());
        let f = InstanceFile::from_instance(&inst, None);
        assert_eq!(f.vertices.len(), 6);
        let text = f.to_json();
        let back = InstanceFile::parse(&text).unwrap();
        assert_eq!(back.to_instance().unwrap(), inst);
        assert_eq!(InstanceFile::from_instance(&back.to_instance().unwrap(), None).to_json(), text);
    }

    #[test]
    fn json_errors_carry_positions() {
        match InstanceFile::parse("{\n  \"problem\": \"tsp\",\n  \"vertices\": [1]\n}") {
            Err(IoError::Json { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(InstanceFile::parse("{\"problem\": \"mis\", \"vertices\": []}").unwrap().to_instance(), Err(IoError::Missing("weights"))));
    }

    #[test]
    fn names_resolve() {
        let text = r#"{"problem":"mis","vertices":["a","b"],"weights":["1","3/2"],"edges":[{"u":"a","v":"b"}]}"#;
        let Instance::Mis(g) = InstanceFile::parse(text).unwrap().to_instance().unwrap() else { panic!() };
        assert!(g.has_edge(0, 1));
        let bad = r#"{"problem":"mis","vertices":["a"],"weights":["1"],"edges":[{"u":"a","v":"z"}]}"#;
        assert!(matches!(InstanceFile::parse(bad).unwrap().to_instance(), Err(IoError::UnknownName(_))));
    }
}
