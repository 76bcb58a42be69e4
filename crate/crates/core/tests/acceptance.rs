//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Dataset-backed criteria read edge lists from `$WALKWATCH_DATA` (default:
//! `data/` at the workspace root) and fail when the files are absent.

mod common;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use common::gradcheck::{check, instance, TOLERANCE};
use common::props::{
    any_graph, check_auc, check_row_stochastic, check_simplex_during_training, check_split,
    connected_graph,
};
use common::{naive_expectation, random_graph};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use walkwatch::eval::{
    accuracy, link_prediction_eval, parse_labels, select_alpha, smooth_knn_classify, split_edges,
    LabeledNodes,
};
use walkwatch::generators::connected_planted_partition;
use walkwatch::{
    deepwalk_coefficients, empirical_vs_expected_report, expected_cooccurrence, parse_edge_list,
    train, transition_matrix, ContextMode, Graph, TrainConfig, WalkConfig,
};

const GRADIENT_INSTANCES: u64 = 27;
const SIMULATION_WALKS: u32 = 10_000;
const SIMULATION_COVERAGE: f64 = 0.95;
const DENSE_TOLERANCE: f64 = 1e-9;
const PPI_AUC: f64 = 0.85;
const SPLIT_SEEDS: [u64; 3] = [0, 1, 2];
const ATTENTION_MARGIN: f64 = 0.01;
const UNIFORM_TOLERANCE: f64 = 0.01;
const CORA_ACCURACY: f64 = 0.60;
const CITESEER_ACCURACY: f64 = 0.44;
const PROPERTY_CASES: u32 = 100;
const SENSITIVITY_SPREAD: f64 = 0.02;
const LINK_FRACTION: f64 = 0.5;

type Outcome = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Outcome);

fn data_dir() -> PathBuf {
    std::env::var_os("WALKWATCH_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            let root = Path::new(env!("CARGO_MANIFEST_DIR"))
                .ancestors()
                .nth(2)
                .expect("crate sits two levels down");
            root.join("data")
        })
}

fn load_graph(name: &str) -> Result<Graph, String> {
    Ok(load_full_graph(name)?.largest_component())
}

fn load_full_graph(name: &str) -> Result<Graph, String> {
    let path = data_dir().join(name);
    let file =
        File::open(&path).map_err(|e| format!("dataset {} unavailable: {e}", path.display()))?;
    let (g, _) = parse_edge_list(BufReader::new(file), false)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(g)
}

fn link_auc(g: &Graph, cfg: &TrainConfig, split_seed: u64) -> Result<f64, String> {
    let split = split_edges(g, LINK_FRACTION, split_seed).map_err(|e| e.to_string())?;
    let outcome = train(&split.train_graph, cfg).map_err(|e| e.to_string())?;
    let metrics = link_prediction_eval(&outcome.embeddings, &split).map_err(|e| e.to_string())?;
    metrics.roc_auc.ok_or_else(|| "no ROC-AUC reported".into())
}

fn gradient_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..GRADIENT_INSTANCES {
        let (l, r, q) = check(&instance(i));
        worst = worst.max(l).max(r).max(q);
    }
    let msg = format!("worst relative error {worst:.2e} over {GRADIENT_INSTANCES} instances (limit {TOLERANCE:e})");
    if worst <= TOLERANCE {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn expectation_oracle() -> Outcome {
    let mut worst_coverage: f64 = 1.0;
    let mut worst_dense: f64 = 0.0;
    for seed in 0..5u64 {
        let n = 10 + 5 * seed as usize;
        let g = random_graph(n, 0.2, seed % 2 == 1, seed);
        let t = transition_matrix(&g);
        let cfg = WalkConfig {
            walks_per_node: SIMULATION_WALKS,
            horizon: 5,
            seed,
        };
        let report = empirical_vs_expected_report(&t, &cfg).map_err(|e| e.to_string())?;
        worst_coverage = worst_coverage.min(report.fraction_within_3se);

        let q = deepwalk_coefficients(5).map_err(|e| e.to_string())?;
        let streamed = expected_cooccurrence(&t, &q, 80).map_err(|e| e.to_string())?;
        let dense = naive_expectation(&g, q.weights(), 80.0);
        for (a, b) in streamed.as_array().iter().zip(&dense) {
            worst_dense = worst_dense.max((a - b).abs());
        }
    }
    let msg = format!(
        "lowest 3-SE coverage {:.3} (need {SIMULATION_COVERAGE}), dense vs streaming max diff {worst_dense:.1e} (limit {DENSE_TOLERANCE:e})",
        worst_coverage
    );
    if worst_coverage >= SIMULATION_COVERAGE && worst_dense <= DENSE_TOLERANCE {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ppi_link_prediction() -> Outcome {
    let g = load_graph("ppi.edges")?;
    let cfg = TrainConfig::default();
    let mut aucs = Vec::new();
    for seed in SPLIT_SEEDS {
        aucs.push(link_auc(&g, &cfg, seed)?);
    }
    let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
    let msg =
        format!("mean test ROC-AUC {mean:.4} over split seeds {SPLIT_SEEDS:?} (need ≥ {PPI_AUC})");
    if mean >= PPI_AUC {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn attention_beats_fixed() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in ["ppi.edges", "ca-HepTh.edges"] {
        let g = load_graph(name)?;
        let auc = |context| {
            link_auc(
                &g,
                &TrainConfig {
                    context,
                    ..TrainConfig::default()
                },
                SPLIT_SEEDS[0],
            )
        };
        let att = auc(ContextMode::Attention)?;
        let dw = auc(ContextMode::DeepWalk)?;
        let gl = auc(ContextMode::GloVe)?;
        ok &= att - dw.max(gl) >= ATTENTION_MARGIN;
        lines.push(format!(
            "{name}: attention {att:.4}, deepwalk {dw:.4}, glove {gl:.4}"
        ));
    }
    let msg = format!("{} (need margin ≥ {ATTENTION_MARGIN})", lines.join("; "));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn regularization_behavior() -> Outcome {
    let g = connected_planted_partition(4, 50, 0.2, 0.01, 7);
    let run = |beta| {
        train(
            &g,
            &TrainConfig {
                beta,
                ..TrainConfig::default()
            },
        )
        .map(|o| o.distribution)
        .map_err(|e| e.to_string())
    };
    let mut entropies = Vec::new();
    for beta in [0.1, 1.0, 10.0] {
        entropies.push(run(beta)?.entropy());
    }
    let monotone = entropies.windows(2).all(|w| w[1] >= w[0]);
    let strong = run(1e3)?;
    let uniform = 1.0 / strong.horizon() as f64;
    let linf = strong
        .weights()
        .iter()
        .map(|q| (q - uniform).abs())
        .fold(0.0, f64::max);
    let msg = format!(
        "planted partition n={}: entropy at beta 0.1/1/10 = {:.4}/{:.4}/{:.4}; beta 1e3 distance from uniform {linf:.4} (limit {UNIFORM_TOLERANCE})",
        g.num_nodes(),
        entropies[0],
        entropies[1],
        entropies[2]
    );
    if monotone && linf <= UNIFORM_TOLERANCE {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn classification_accuracy(stem: &str) -> Result<f64, String> {
    let g = load_full_graph(&format!("{stem}.edges"))?;
    let path = data_dir().join(format!("{stem}.labels"));
    let file =
        File::open(&path).map_err(|e| format!("dataset {} unavailable: {e}", path.display()))?;
    let labels = parse_labels(BufReader::new(file), &g).map_err(|e| e.to_string())?;
    let nodes = LabeledNodes::random_split(labels.labels, labels.num_classes, 20, 500, 1000, 0)
        .map_err(|e| e.to_string())?;
    let outcome = train(&g, &TrainConfig::default()).map_err(|e| e.to_string())?;
    let alpha = select_alpha(
        &outcome.embeddings,
        &nodes,
        &[0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
    )
    .map_err(|e| e.to_string())?;
    let preds =
        smooth_knn_classify(&outcome.embeddings, &nodes, alpha).map_err(|e| e.to_string())?;
    Ok(accuracy(&preds, &nodes, nodes.test()))
}

fn classification() -> Outcome {
    let cora = classification_accuracy("cora")?;
    let citeseer = classification_accuracy("citeseer")?;
    let msg = format!("cora {cora:.4} (need ≥ {CORA_ACCURACY}), citeseer {citeseer:.4} (need ≥ {CITESEER_ACCURACY})");
    if cora >= CORA_ACCURACY && citeseer >= CITESEER_ACCURACY {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn protocol_invariants() -> Outcome {
    let runner = || {
        TestRunner::new(Config {
            failure_persistence: None,
            ..Config::with_cases(PROPERTY_CASES)
        })
    };
    let mut failures = Vec::new();
    let mut record = |name: &str, res: Result<(), String>| {
        if let Err(e) = res {
            failures.push(format!("{name}: {e}"));
        }
    };
    record(
        "split soundness",
        runner()
            .run(
                &(connected_graph(), 0.01f64..0.99, any::<u64>()),
                |(g, f, s)| check_split(&g, f, s),
            )
            .map_err(|e| e.to_string()),
    );
    record(
        "AUC invariance",
        runner()
            .run(
                &(
                    prop::collection::vec(-5i32..5, 1..40),
                    prop::collection::vec(-5i32..5, 1..40),
                    0.1f64..10.0,
                    -3.0f64..3.0,
                ),
                |(p, n, a, b)| check_auc(p, n, a, b),
            )
            .map_err(|e| e.to_string()),
    );
    record(
        "simplex during training",
        runner()
            .run(
                &(
                    connected_graph(),
                    1usize..6,
                    0.0f64..2.0,
                    0.01f64..0.5,
                    any::<u64>(),
                ),
                |(g, c, beta, lr, seed)| check_simplex_during_training(&g, c, beta, lr, seed),
            )
            .map_err(|e| e.to_string()),
    );
    record(
        "row-stochastic transitions",
        runner()
            .run(&any_graph(), |g| check_row_stochastic(&g))
            .map_err(|e| e.to_string()),
    );
    if failures.is_empty() {
        Ok(format!("4 properties, {PROPERTY_CASES} cases each"))
    } else {
        Err(failures.join("; "))
    }
}

fn sensitivity() -> Outcome {
    let g = load_graph("ppi.edges")?;
    let base = TrainConfig::default();
    let reference = link_auc(&g, &base, SPLIT_SEEDS[0])?;
    let variants = [
        (
            "C=5",
            TrainConfig {
                horizon: 5,
                ..base.clone()
            },
        ),
        (
            "C=20",
            TrainConfig {
                horizon: 20,
                ..base.clone()
            },
        ),
        (
            "beta=0.25",
            TrainConfig {
                beta: 0.25,
                ..base.clone()
            },
        ),
        (
            "beta=1",
            TrainConfig {
                beta: 1.0,
                ..base.clone()
            },
        ),
    ];
    let mut worst: f64 = 0.0;
    let mut parts = vec![format!("default {reference:.4}")];
    for (name, cfg) in variants {
        let auc = link_auc(&g, &cfg, SPLIT_SEEDS[0])?;
        worst = worst.max((auc - reference).abs());
        parts.push(format!("{name} {auc:.4}"));
    }
    let msg = format!(
        "{}; largest change {worst:.4} (limit {SENSITIVITY_SPREAD})",
        parts.join(", ")
    );
    if worst <= SENSITIVITY_SPREAD {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "gradient oracle", gradient_oracle),
        (2, "expectation oracle", expectation_oracle),
        (3, "link prediction on PPI", ppi_link_prediction),
        (4, "attention beats fixed contexts", attention_beats_fixed),
        (5, "regularization behavior", regularization_behavior),
        (6, "classification on Cora and Citeseer", classification),
        (7, "protocol invariants", protocol_invariants),
        (8, "sensitivity to C and beta", sensitivity),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| name.contains(f.as_str()) || f == &id.to_string())
        {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {id} ({name}): {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}): {msg} [{secs:.1}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
