//! JSON model files and the built-in models.
//!
//! ```json
//! {
//!   "kind": "probability",
//!   "worlds": ["w1", "w2", "w3"],
//!   "partition": [["w1", "w2", "w3"]],
//!   "valuation": {"w1": ["h1"], "w2": ["h2"], "w3": ["h3"]},
//!   "weights": {"w1": "1/2", "w2": "1/3", "w3": "1/6"}
//! }
//! ```
//!
//! Neighborhood files carry `"kind": "neighborhood"` and, instead of
//! weights, `"generators"`: one list of world-name lists per partition cell,
//! in partition order. Only minimal sets are stored; the closure is implied.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus;
use crate::model::{Frame, ModelError, NeighborhoodModel, ProbabilityModel};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Probability,
    Neighborhood,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub kind: ModelKind,
    pub worlds: Vec<String>,
    pub partition: Vec<Vec<String>>,
    #[serde(default)]
    pub valuation: IndexMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<IndexMap<String, Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<Vec<String>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LoadedModel {
    Probability(ProbabilityModel),
    Neighborhood(NeighborhoodModel),
}

impl LoadedModel {
    pub fn frame(&self) -> &Frame {
        match self {
            LoadedModel::Probability(m) => m.frame(),
            LoadedModel::Neighborhood(m) => m.frame(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("{source_name}: {err}")]
    Io { source_name: String, err: std::io::Error },
    #[error("{source_name}:{line}:{column}: {msg}")]
    Syntax { source_name: String, line: usize, column: usize, msg: String },
    #[error("{source_name}:{line}: in {field:?}: {msg}")]
    Invalid { source_name: String, line: usize, field: &'static str, msg: String },
}

fn frame_of(file: &ModelFile) -> Result<Frame, (&'static str, ModelError)> {
    let index = |w: &String| file.worlds.iter().position(|x| x == w).ok_or_else(|| ModelError::UnknownWorld(w.clone()));
    let cells = file
        .partition
        .iter()
        .map(|c| c.iter().map(index).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ("partition", e))?;
    let mut val = vec![BTreeSet::new(); file.worlds.len()];
    for (w, atoms) in &file.valuation {
        let i = index(w).map_err(|e| ("valuation", e))?;
        val[i].extend(atoms.iter().cloned());
    }
    let field = if file.worlds.is_empty() { "worlds" } else { "partition" };
    Frame::new(file.worlds.clone(), cells, val).map_err(|e| (field, e))
}

fn build(file: &ModelFile) -> Result<LoadedModel, (&'static str, String)> {
    let frame = frame_of(file).map_err(|(f, e)| (f, e.to_string()))?;
    match file.kind {
        ModelKind::Probability => {
            if file.generators.is_some() {
                return Err(("generators", "probability models take weights, not generators".into()));
            }
            let weights = file.weights.as_ref().ok_or(("weights", "missing".to_string()))?;
            let map = weights.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            crate::model::make_probability_model(frame, &map)
                .map(LoadedModel::Probability)
                .map_err(|e| ("weights", e.to_string()))
        }
        ModelKind::Neighborhood => {
            if file.weights.is_some() {
                return Err(("weights", "neighborhood models take generators, not weights".into()));
            }
            let gens = file.generators.as_ref().ok_or(("generators", "missing".to_string()))?;
            let sets = gens
                .iter()
                .map(|cell| cell.iter().map(|g| frame.set_of_names(g)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ("generators", e.to_string()))?;
            NeighborhoodModel::new(frame, sets)
                .map(LoadedModel::Neighborhood)
                .map_err(|e| ("generators", e.to_string()))
        }
    }
}

/// First line mentioning `"field"`, or 1.
fn line_of(text: &str, field: &str) -> usize {
    let key = format!("\"{field}\"");
    text.lines().position(|l| l.contains(&key)).map_or(1, |i| i + 1)
}

/// Parse and validate a model file; `source_name` labels error messages.
pub fn load_model_str(text: &str, source_name: &str) -> Result<LoadedModel, ModelFileError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| ModelFileError::Syntax {
        source_name: source_name.to_string(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    build(&file).map_err(|(field, msg)| ModelFileError::Invalid {
        source_name: source_name.to_string(),
        line: line_of(text, field),
        field,
        msg,
    })
}

/// A built-in model name (see [`builtin_names`]) or a path to a JSON file.
pub fn load_model(spec: &str) -> Result<LoadedModel, ModelFileError> {
    if let Some(m) = builtin(spec) {
        return Ok(m);
    }
    let text = std::fs::read_to_string(Path::new(spec))
        .map_err(|err| ModelFileError::Io { source_name: spec.to_string(), err })?;
    load_model_str(&text, spec)
}

pub fn builtin_names() -> &'static [&'static str] {
    &["horses1", "horses2", "horses-uniform", "walley-fine"]
}

pub fn builtin(name: &str) -> Option<LoadedModel> {
    Some(match name {
        "horses1" => LoadedModel::Probability(corpus::horses()),
        "horses2" => LoadedModel::Probability(corpus::horses_split()),
        "horses-uniform" => LoadedModel::Probability(corpus::horses_uniform()),
        "walley-fine" => LoadedModel::Neighborhood(corpus::walley_fine()),
        _ => return None,
    })
}

pub fn to_model_file(m: &LoadedModel) -> ModelFile {
    let frame = m.frame();
    let names = |s: &crate::event::EventSet| frame.names_of(s);
    let valuation = (0..frame.num_worlds())
        .filter(|&w| !frame.valuation(w).is_empty())
        .map(|w| (frame.world_name(w).to_string(), frame.valuation(w).iter().cloned().collect()))
        .collect();
    let mut file = ModelFile {
        kind: ModelKind::Probability,
        worlds: frame.worlds().to_vec(),
        partition: frame.cells().iter().map(names).collect(),
        valuation,
        weights: None,
        generators: None,
    };
    match m {
        LoadedModel::Probability(p) => {
            file.weights =
                Some((0..frame.num_worlds()).map(|w| (frame.world_name(w).to_string(), p.weight(w).clone())).collect());
        }
        LoadedModel::Neighborhood(n) => {
            file.kind = ModelKind::Neighborhood;
            file.generators = Some(n.all_generators().iter().map(|gs| gs.iter().map(names).collect()).collect());
        }
    }
    file
}

impl fmt::Display for ModelFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = serde_json::to_string_pretty(self).map_err(|_| fmt::Error)?;
        writeln!(f, "{text}")
    }
}

pub fn save_model(m: &LoadedModel) -> String {
    to_model_file(m).to_string()
}
