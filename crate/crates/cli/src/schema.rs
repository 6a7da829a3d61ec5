//! JSON instance files.
//!
//! Every file carries a `{problem, version}` header; the body mirrors
//! the matching instance constructor field for field, with graphs as
//! `[u, v, cost]` edge lists and metrics as full matrices or planar
//! points. Probabilities travel as decimal strings so a corpus file
//! hashes identically on every platform, and `null` stands for an
//! opening cost of infinity.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use minemax_core::{
    CoveringBase, Graph, HybridInstance, KCenterInstance, Metric, MinCutInstance, MstInstance,
    ScenarioDistribution, SteinerInstance, UflInstance,
};
use serde::{Deserialize, Serialize};

/// The only schema revision this build reads or writes.
pub const SCHEMA_VERSION: u32 = 1;

/// A parsed instance of any supported problem.
#[derive(Debug, Clone)]
pub enum AnyInstance {
    MinCut(MinCutInstance),
    Mst(MstInstance),
    Steiner(SteinerInstance),
    Ufl(UflInstance),
    KCenter(KCenterInstance),
    Hybrid(HybridInstance),
}

impl AnyInstance {
    pub fn problem(&self) -> &'static str {
        match self {
            AnyInstance::MinCut(_) => "mincut",
            AnyInstance::Mst(_) => "mst",
            AnyInstance::Steiner(_) => "steiner",
            AnyInstance::Ufl(_) => "ufl",
            AnyInstance::KCenter(_) => "kcenter",
            AnyInstance::Hybrid(_) => "hybrid",
        }
    }
}

/// Tolerant probe read before dispatching to a typed body.
#[derive(Deserialize)]
struct Header {
    problem: String,
    version: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MinCutBody {
    problem: String,
    version: u32,
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    root: usize,
    terminals: Vec<usize>,
    inflation: Vec<f64>,
    probs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MstBody {
    problem: String,
    version: u32,
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    cost2: Vec<Vec<f64>>,
    probs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SteinerBody {
    problem: String,
    version: u32,
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    root: usize,
    scenarios: Vec<Vec<usize>>,
    inflation: Vec<f64>,
    probs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UflBody {
    problem: String,
    version: u32,
    metric: MetricBody,
    n_facilities: usize,
    demand: Vec<Vec<bool>>,
    open1: Vec<Option<f64>>,
    open2: Vec<Vec<Option<f64>>>,
    probs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KCenterBody {
    problem: String,
    version: u32,
    metric: MetricBody,
    k: usize,
    probs: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HybridBody {
    problem: String,
    version: u32,
    rho: f64,
    distribution: Vec<String>,
    base: serde_json::Value,
}

/// Metric given either as a full symmetric matrix or as planar points
/// whose pairwise Euclidean distances define it. Serialization always
/// writes the matrix form.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricBody {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<(f64, f64)>>,
}

impl MetricBody {
    fn from_metric(metric: &Metric) -> Self {
        let n = metric.len();
        let matrix =
            (0..n).map(|i| (0..n).map(|j| metric.dist(i, j)).collect()).collect();
        Self { matrix: Some(matrix), points: None }
    }

    fn into_metric(self) -> Result<Metric> {
        match (self.matrix, self.points) {
            (Some(matrix), None) => Ok(Metric::new(matrix)?),
            (None, Some(points)) => Ok(Metric::from_points(&points)),
            _ => bail!("metric needs exactly one of `matrix` or `points`"),
        }
    }
}

fn parse_probs(raw: &[String]) -> Result<ScenarioDistribution> {
    let probs = raw
        .iter()
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("probability {s:?} is not a decimal number"))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ScenarioDistribution::new(probs)?)
}

fn format_probs(dist: &ScenarioDistribution) -> Vec<String> {
    dist.probs().iter().map(|p| format!("{p}")).collect()
}

fn edge_list(graph: &Graph) -> Vec<(usize, usize, f64)> {
    graph.edges().iter().map(|e| (e.u, e.v, e.cost)).collect()
}

fn opening_costs(raw: Vec<Option<f64>>) -> Vec<f64> {
    raw.into_iter().map(|c| c.unwrap_or(f64::INFINITY)).collect()
}

fn nullable_costs(costs: &[f64]) -> Vec<Option<f64>> {
    costs.iter().map(|&c| if c.is_finite() { Some(c) } else { None }).collect()
}

pub fn parse_instance(text: &str) -> Result<AnyInstance> {
    let header: Header = serde_json::from_str(text)
        .context("instance file is not JSON with a problem/version header")?;
    if header.version != SCHEMA_VERSION {
        bail!(
            "schema version {} not supported (this build reads version {SCHEMA_VERSION})",
            header.version
        );
    }
    match header.problem.as_str() {
        "mincut" => {
            let body: MinCutBody = parse_body(text)?;
            let graph = Graph::new(body.n, body.edges)?;
            let dist = parse_probs(&body.probs)?;
            Ok(AnyInstance::MinCut(MinCutInstance::new(
                graph,
                body.root,
                body.terminals,
                body.inflation,
                dist,
            )?))
        }
        "mst" => {
            let body: MstBody = parse_body(text)?;
            let graph = Graph::new(body.n, body.edges)?;
            let dist = parse_probs(&body.probs)?;
            Ok(AnyInstance::Mst(MstInstance::new(graph, body.cost2, dist)?))
        }
        "steiner" => {
            let body: SteinerBody = parse_body(text)?;
            let graph = Graph::new(body.n, body.edges)?;
            let dist = parse_probs(&body.probs)?;
            Ok(AnyInstance::Steiner(SteinerInstance::new(
                graph,
                body.root,
                body.scenarios,
                body.inflation,
                dist,
            )?))
        }
        "ufl" => {
            let body: UflBody = parse_body(text)?;
            let metric = body.metric.into_metric()?;
            let dist = parse_probs(&body.probs)?;
            Ok(AnyInstance::Ufl(UflInstance::new(
                metric,
                body.n_facilities,
                body.demand,
                opening_costs(body.open1),
                body.open2.into_iter().map(opening_costs).collect(),
                dist,
            )?))
        }
        "kcenter" => {
            let body: KCenterBody = parse_body(text)?;
            let metric = body.metric.into_metric()?;
            let dist = parse_probs(&body.probs)?;
            Ok(AnyInstance::KCenter(KCenterInstance::new(metric, body.k, dist)?))
        }
        "hybrid" => {
            let body: HybridBody = parse_body(text)?;
            let base_text = serde_json::to_string(&body.base)?;
            let base = match parse_instance(&base_text).context("embedded base instance")? {
                AnyInstance::MinCut(mc) => CoveringBase::MinCut(mc),
                AnyInstance::Steiner(st) => CoveringBase::Steiner(st),
                other => bail!("hybrid base must be mincut or steiner, got {}", other.problem()),
            };
            let dist = parse_probs(&body.distribution)?;
            if dist.probs() != base.dist().probs() {
                bail!("hybrid distribution disagrees with the embedded base probabilities");
            }
            Ok(AnyInstance::Hybrid(HybridInstance::new(base, body.rho)?))
        }
        other => bail!("unknown problem {other:?}"),
    }
}

fn parse_body<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).context("instance body does not match its declared problem")
}

pub fn instance_to_value(inst: &AnyInstance) -> Result<serde_json::Value> {
    let value = match inst {
        AnyInstance::MinCut(mc) => serde_json::to_value(MinCutBody {
            problem: "mincut".into(),
            version: SCHEMA_VERSION,
            n: mc.graph().n(),
            edges: edge_list(mc.graph()),
            root: mc.root(),
            terminals: mc.terminals().to_vec(),
            inflation: mc.inflation().to_vec(),
            probs: format_probs(mc.dist()),
        })?,
        AnyInstance::Mst(inst) => serde_json::to_value(MstBody {
            problem: "mst".into(),
            version: SCHEMA_VERSION,
            n: inst.graph().n(),
            edges: edge_list(inst.graph()),
            cost2: inst.cost2().to_vec(),
            probs: format_probs(inst.dist()),
        })?,
        AnyInstance::Steiner(st) => serde_json::to_value(SteinerBody {
            problem: "steiner".into(),
            version: SCHEMA_VERSION,
            n: st.graph().n(),
            edges: edge_list(st.graph()),
            root: st.root(),
            scenarios: st.scenarios().to_vec(),
            inflation: st.inflation().to_vec(),
            probs: format_probs(st.dist()),
        })?,
        AnyInstance::Ufl(ufl) => serde_json::to_value(UflBody {
            problem: "ufl".into(),
            version: SCHEMA_VERSION,
            metric: MetricBody::from_metric(ufl.metric()),
            n_facilities: ufl.n_facilities(),
            demand: ufl.demand().to_vec(),
            open1: nullable_costs(ufl.open1()),
            open2: ufl.open2().iter().map(|row| nullable_costs(row)).collect(),
            probs: format_probs(ufl.dist()),
        })?,
        AnyInstance::KCenter(kc) => serde_json::to_value(KCenterBody {
            problem: "kcenter".into(),
            version: SCHEMA_VERSION,
            metric: MetricBody::from_metric(kc.metric()),
            k: kc.k(),
            probs: format_probs(kc.dist()),
        })?,
        AnyInstance::Hybrid(h) => {
            let base = match h.base() {
                CoveringBase::MinCut(mc) => {
                    instance_to_value(&AnyInstance::MinCut(mc.clone()))?
                }
                CoveringBase::Steiner(st) => {
                    instance_to_value(&AnyInstance::Steiner(st.clone()))?
                }
            };
            serde_json::to_value(HybridBody {
                problem: "hybrid".into(),
                version: SCHEMA_VERSION,
                rho: h.rho(),
                distribution: h.distribution().iter().map(|p| format!("{p}")).collect(),
                base,
            })?
        }
    };
    Ok(value)
}

pub fn serialize_instance(inst: &AnyInstance) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&instance_to_value(inst)?)?;
    text.push('\n');
    Ok(text)
}

pub fn read_instance(path: &Path) -> Result<AnyInstance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("cannot parse {}", path.display()))
}

/// Two-stage edge sets as stored in solution files and run reports.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSolutionBody {
    pub first_stage: Vec<usize>,
    pub second_stage: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacilitySolutionBody {
    pub first_stage_open: Vec<usize>,
    pub second_stage_open: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterSolutionBody {
    pub centers: Vec<usize>,
}
