use std::path::Path;

use holant::graph::{generate, GraphFamilySpec, Multigraph};
use holant::models::{model_from_predicate, perturbed_ones, vertex_to_edge, EdgeColoringModel, PredicateKind, VertexModel};
use holant::{Budget, HolantError, Result};

use crate::args::Common;

pub const BUDGET_ENV: &str = "HOLANT_BUDGET";

/// A loaded model; vertex models keep their original form so that exact
/// evaluation can use the direct vertex sum.
pub enum Model {
    Edge(EdgeColoringModel),
    Vertex(VertexModel),
}

impl Model {
    /// The edge-coloring form, tabulated up to `max_degree`.
    pub fn edge(&self, max_degree: usize) -> Result<EdgeColoringModel> {
        match self {
            Model::Edge(h) => Ok(h.clone()),
            Model::Vertex(vm) => vertex_to_edge(vm, None, max_degree as u32),
        }
    }
}

/// `--budget`, else `HOLANT_BUDGET`, else the library default.
pub fn budget(common: &Common) -> Result<Budget> {
    if let Some(b) = common.budget {
        return Ok(Budget(b));
    }
    match std::env::var(BUDGET_ENV) {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map(Budget)
            .map_err(|e| HolantError::Parse(format!("{BUDGET_ENV}='{text}': {e}"))),
        Err(_) => Ok(Budget::DEFAULT),
    }
}

pub fn family(common: &Common) -> Result<GraphFamilySpec> {
    common
        .family
        .as_deref()
        .ok_or_else(|| HolantError::Parse("--family is required".into()))?
        .parse()
}

/// The graph from `--graph` (file or inline edge list) or `--family`.
pub fn graph(common: &Common) -> Result<Multigraph> {
    match (&common.graph, &common.family) {
        (Some(source), None) => {
            if Path::new(source).is_file() {
                Multigraph::read_edge_list(source)
            } else if source.contains(';') || source.contains('\n') {
                Multigraph::parse_edge_list(&source.replace(';', "\n"))
            } else {
                Err(HolantError::Parse(format!("'{source}' is neither a file nor an inline edge list")))
            }
        }
        (None, Some(_)) => generate(&family(common)?),
        (Some(_), Some(_)) => Err(HolantError::Parse("give either --graph or --family, not both".into())),
        (None, None) => Err(HolantError::Parse("one of --graph or --family is required".into())),
    }
}

/// The model from `--model`, with built-ins tabulated up to `max_degree`.
pub fn model(common: &Common, max_degree: usize) -> Result<Model> {
    let source = common
        .model
        .as_deref()
        .ok_or_else(|| HolantError::Parse("--model is required".into()))?;
    let k = common.colors;
    let degree = max_degree as u32;
    if Path::new(source).is_file() {
        let text = std::fs::read_to_string(source)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        return if value.get("k").is_some() {
            EdgeColoringModel::from_json(&text).map(Model::Edge)
        } else if value.get("B").is_some() {
            VertexModel::from_json(&text).map(Model::Vertex)
        } else {
            Err(HolantError::Parse(format!("{source}: expected an edge model (key \"k\") or a vertex model (keys \"a\", \"B\")")))
        };
    }
    let edge = |h| Ok(Model::Edge(h));
    match source {
        "ones" => edge(EdgeColoringModel::ones(k)?),
        "matching" => edge(model_from_predicate(PredicateKind::Matching, k, degree)?),
        _ => {
            if let Some(d) = source.strip_prefix("dregular:") {
                let d = d.parse::<u32>().map_err(|e| HolantError::Parse(format!("'{source}': {e}")))?;
                return edge(model_from_predicate(PredicateKind::DRegular(d), k, degree)?);
            }
            let perturbed = source
                .strip_prefix("ones±uniform:")
                .or_else(|| source.strip_prefix("ones+-uniform:"));
            if let Some(rest) = perturbed {
                let (r, seed) = rest
                    .split_once(':')
                    .ok_or_else(|| HolantError::Parse(format!("'{source}': expected ones±uniform:R:SEED")))?;
                let r = r.parse::<f64>().map_err(|e| HolantError::Parse(format!("'{source}': {e}")))?;
                let seed = seed.parse::<u64>().map_err(|e| HolantError::Parse(format!("'{source}': {e}")))?;
                return edge(perturbed_ones(k, degree, r, seed)?);
            }
            Err(HolantError::Parse(format!("'{source}' is neither a file nor a built-in model")))
        }
    }
}
