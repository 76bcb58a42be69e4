//! Browser bindings: each export takes plain values, returns a JSON string,
//! and throws a JS error on bad input.

use serde_json::{json, Value};
use walkwatch::eval::{link_prediction_eval, split_edges};
use walkwatch::generators::connected_planted_partition;
use walkwatch::graph::write_edge_list;
use walkwatch::{
    deepwalk_coefficients, empirical_vs_expected_report, glove_coefficients, parse_edge_list,
    softmax_context, train_with, transition_matrix, ContextMode, ContextParams, Error, Graph,
    Result, TrainConfig, WalkConfig,
};
use wasm_bindgen::prelude::*;

fn to_js(res: Result<Value>) -> std::result::Result<String, JsError> {
    res.map(|v| v.to_string())
        .map_err(|e| JsError::new(&e.to_string()))
}

fn parse_graph(edges: &str, directed: bool) -> Result<Graph> {
    Ok(parse_edge_list(edges.as_bytes(), directed)?.0)
}

/// Edge list of a connected planted-partition graph.
pub fn sample_graph_text(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<String> {
    if blocks == 0
        || block_size == 0
        || !(0.0..=1.0).contains(&p_in)
        || !(0.0..=1.0).contains(&p_out)
    {
        return Err(Error::InvalidConfig(
            "need positive sizes and probabilities in [0, 1]".into(),
        ));
    }
    let g = connected_planted_partition(blocks, block_size, p_in, p_out, seed);
    let mut out = Vec::new();
    write_edge_list(&g, &g.edges(), &mut out)?;
    Ok(String::from_utf8(out).expect("edge lists are ASCII"))
}

pub fn context_coefficients_json(mode: &str, horizon: usize) -> Result<Value> {
    let mode: ContextMode = mode.parse()?;
    let q = match mode {
        ContextMode::DeepWalk => deepwalk_coefficients(horizon)?,
        ContextMode::GloVe => glove_coefficients(horizon)?,
        ContextMode::Attention => softmax_context(&ContextParams::uniform(horizon, 1)?),
    };
    Ok(json!({ "mode": mode.as_str(), "weights": q.weights(), "normalized": q.is_normalized() }))
}

pub fn simulation_check_json(
    edges: &str,
    directed: bool,
    walks_per_node: u32,
    horizon: usize,
    seed: u64,
) -> Result<Value> {
    let g = parse_graph(edges, directed)?;
    let cfg = WalkConfig {
        walks_per_node,
        horizon,
        seed,
    };
    let report = empirical_vs_expected_report(&transition_matrix(&g), &cfg)?;
    Ok(json!({
        "num_nodes": g.num_nodes(),
        "num_edges": g.num_edges(),
        "max_abs_deviation": report.max_abs_deviation,
        "mean_abs_deviation": report.mean_abs_deviation,
        "fraction_within_3se": report.fraction_within_3se,
    }))
}

#[derive(Debug, Clone)]
pub struct DemoTraining {
    pub mode: String,
    pub dim: usize,
    pub horizon: usize,
    pub beta: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

pub fn link_prediction_json(
    edges: &str,
    directed: bool,
    fraction: f64,
    run: &DemoTraining,
) -> Result<Value> {
    let g = parse_graph(edges, directed)?.largest_component();
    let split = split_edges(&g, fraction, run.seed)?;
    let cfg = TrainConfig {
        dim: run.dim,
        horizon: run.horizon,
        beta: run.beta,
        epochs: run.epochs,
        learning_rate: run.learning_rate,
        seed: run.seed,
        context: run.mode.parse()?,
        ..TrainConfig::default()
    };
    let mut losses = Vec::with_capacity(run.epochs);
    let mut contexts = Vec::with_capacity(run.epochs);
    let outcome = train_with(&split.train_graph, &cfg, |rec| {
        losses.push(rec.total);
        contexts.push(rec.context.clone());
    })?;
    let auc = if split.test_pos.is_empty() || split.test_neg.is_empty() {
        None
    } else {
        link_prediction_eval(&outcome.embeddings, &split)?.roc_auc
    };
    Ok(json!({
        "num_nodes": g.num_nodes(),
        "num_test_edges": split.test_pos.len(),
        "roc_auc": auc,
        "context": outcome.distribution.weights(),
        "loss": losses,
        "context_per_epoch": contexts,
        "warnings": split.warnings,
    }))
}

#[wasm_bindgen]
pub fn sample_graph(
    blocks: usize,
    block_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> std::result::Result<String, JsError> {
    sample_graph_text(blocks, block_size, p_in, p_out, seed)
        .map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn context_coefficients(mode: &str, horizon: usize) -> std::result::Result<String, JsError> {
    to_js(context_coefficients_json(mode, horizon))
}

#[wasm_bindgen]
pub fn simulation_check(
    edges: &str,
    directed: bool,
    walks_per_node: u32,
    horizon: usize,
    seed: u64,
) -> std::result::Result<String, JsError> {
    to_js(simulation_check_json(
        edges,
        directed,
        walks_per_node,
        horizon,
        seed,
    ))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn link_prediction(
    edges: &str,
    directed: bool,
    fraction: f64,
    mode: &str,
    dim: usize,
    horizon: usize,
    beta: f64,
    epochs: usize,
    learning_rate: f64,
    seed: u64,
) -> std::result::Result<String, JsError> {
    let run = DemoTraining {
        mode: mode.to_string(),
        dim,
        horizon,
        beta,
        epochs,
        learning_rate,
        seed,
    };
    to_js(link_prediction_json(edges, directed, fraction, &run))
}
