use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use log::info;
use serde_json::{json, Value};
use walkwatch::eval::{
    accuracy, link_prediction_eval, parse_labels, select_alpha, smooth_knn_classify, split_edges,
    LabeledNodes, Metrics,
};
use walkwatch::graph::write_edge_list;
use walkwatch::io::write_embeddings_tsv;
use walkwatch::{
    empirical_vs_expected_report, parse_edge_list, train_with, transition_matrix, Error, Graph,
    TrainConfig, TrainOutcome, WalkConfig,
};

use crate::manifest::ManifestBuilder;
use crate::{ClassifyCmd, GraphArgs, LinkpredCmd, SimulateCmd, TrainCmd};

fn load_graph(args: &GraphArgs) -> anyhow::Result<(Graph, Value)> {
    let file =
        File::open(&args.graph).with_context(|| format!("opening {}", args.graph.display()))?;
    let (mut graph, report) = parse_edge_list(BufReader::new(file), args.directed)
        .with_context(|| format!("parsing {}", args.graph.display()))?;
    let parsed_nodes = graph.num_nodes();
    if args.largest_component {
        graph = graph.largest_component();
    }
    info!(
        "loaded {}: {} nodes, {} edges ({} self-loops and {} duplicates dropped)",
        args.graph.display(),
        graph.num_nodes(),
        graph.num_edges(),
        report.self_loops_dropped,
        report.duplicates_dropped
    );
    let echo = json!({
        "path": args.graph.display().to_string(),
        "directed": args.directed,
        "largest_component": args.largest_component,
        "parsed_nodes": parsed_nodes,
        "num_nodes": graph.num_nodes(),
        "num_edges": graph.num_edges(),
        "self_loops_dropped": report.self_loops_dropped,
        "duplicates_dropped": report.duplicates_dropped,
    });
    Ok((graph, echo))
}

fn checked_config(cfg: TrainConfig) -> anyhow::Result<TrainConfig> {
    cfg.validate().context("invalid training flags")?;
    Ok(cfg)
}

fn run_training(graph: &Graph, cfg: &TrainConfig) -> anyhow::Result<TrainOutcome> {
    let every = (cfg.epochs / 10).max(1);
    let outcome = train_with(graph, cfg, |rec| {
        if rec.epoch == 1 || rec.epoch % every == 0 {
            info!(
                "epoch {:>4}: loss {:.6e} (nlgl {:.6e}, reg {:.4e})",
                rec.epoch, rec.total, rec.nlgl, rec.reg
            );
        }
    })?;
    info!(
        "learned context weights: {}",
        outcome.distribution.to_json()
    );
    Ok(outcome)
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

/// Embeddings, context weights and loss curve of a finished training run.
fn write_training(
    mf: &mut ManifestBuilder,
    graph: &Graph,
    outcome: &TrainOutcome,
) -> anyhow::Result<()> {
    let mut out = create(&mf.artifact("embeddings.tsv"))?;
    write_embeddings_tsv(graph, &outcome.embeddings, &mut out)?;
    out.flush()?;

    let mut out = create(&mf.artifact("context.json"))?;
    writeln!(out, "{}", outcome.distribution.to_json())?;
    out.flush()?;

    let mut out = create(&mf.artifact("loss.tsv"))?;
    writeln!(out, "epoch\ttotal\tnlgl\treg")?;
    for rec in &outcome.report.curve {
        writeln!(
            out,
            "{}\t{:.9e}\t{:.9e}\t{:.9e}",
            rec.epoch, rec.total, rec.nlgl, rec.reg
        )?;
    }
    out.flush()?;
    Ok(())
}

fn train_summary(outcome: &TrainOutcome) -> Value {
    json!({
        "context": outcome.distribution.weights(),
        "logits": outcome.context.logits(),
        "final_loss": {
            "total": outcome.report.total,
            "nlgl": outcome.report.nlgl,
            "reg": outcome.report.reg,
        },
    })
}

pub fn train(cmd: &TrainCmd, argv: &[String]) -> anyhow::Result<()> {
    let cfg = checked_config(cmd.train.config())?;
    let (graph, graph_echo) = load_graph(&cmd.graph)?;
    let mut mf = ManifestBuilder::new(
        "train",
        argv,
        &cmd.out,
        cfg.seed,
        json!({ "graph": graph_echo, "train": cfg }),
    )?;
    mf.input(&cmd.graph.graph)?;
    let outcome = run_training(&graph, &cfg)?;
    write_training(&mut mf, &graph, &outcome)?;
    mf.write_json("summary.json", &train_summary(&outcome))?;
    mf.finish()
}

fn write_pairs(
    mf: &mut ManifestBuilder,
    name: &str,
    graph: &Graph,
    pairs: &[(usize, usize)],
) -> anyhow::Result<()> {
    let mut out = create(&mf.artifact(name))?;
    write_edge_list(graph, pairs, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn linkpred(cmd: &LinkpredCmd, argv: &[String]) -> anyhow::Result<()> {
    let cfg = checked_config(cmd.train.config())?;
    let (graph, graph_echo) = load_graph(&cmd.graph)?;
    let split = match split_edges(&graph, cmd.fraction, cmd.split_seed) {
        Err(err @ Error::Disconnected { .. }) => {
            bail!("{err}; link prediction needs a connected graph (see --largest-component)")
        }
        other => other?,
    };
    for w in &split.warnings {
        log::warn!("{w}");
    }
    if split.test_pos.is_empty() {
        bail!(
            "no edge can be held out without disconnecting the graph ({} nodes, {} edges): nothing to evaluate",
            graph.num_nodes(),
            graph.num_edges()
        );
    }
    if split.test_neg.is_empty() {
        bail!("the graph has no non-edges to sample as negatives: nothing to evaluate");
    }

    let config = json!({
        "graph": graph_echo,
        "train": cfg,
        "fraction": cmd.fraction,
        "split_seed": cmd.split_seed,
    });
    let mut mf = ManifestBuilder::new("linkpred", argv, &cmd.out, cfg.seed, config.clone())?;
    mf.input(&cmd.graph.graph)?;
    write_pairs(&mut mf, "train_pos.edges", &graph, &split.train_pos)?;
    write_pairs(&mut mf, "test_pos.edges", &graph, &split.test_pos)?;
    write_pairs(&mut mf, "train_neg.edges", &graph, &split.train_neg)?;
    write_pairs(&mut mf, "test_neg.edges", &graph, &split.test_neg)?;
    mf.write_json(
        "split.json",
        &json!({
            "seed": split.seed,
            "fraction": split.fraction,
            "achieved_fraction": split.achieved_fraction,
            "num_train_pos": split.train_pos.len(),
            "num_test_pos": split.test_pos.len(),
            "num_train_neg": split.train_neg.len(),
            "num_test_neg": split.test_neg.len(),
            "warnings": split.warnings,
        }),
    )?;

    let outcome = run_training(&split.train_graph, &cfg)?;
    write_training(&mut mf, &split.train_graph, &outcome)?;
    let mut metrics = link_prediction_eval(&outcome.embeddings, &split)?;
    metrics
        .metadata
        .insert("training".into(), train_summary(&outcome));
    metrics.metadata.insert("config".into(), config);
    info!("test ROC-AUC {:.4}", metrics.roc_auc.unwrap_or(f64::NAN));
    mf.write_json("metrics.json", &metrics)?;
    mf.finish()
}

pub fn simulate(cmd: &SimulateCmd, argv: &[String]) -> anyhow::Result<()> {
    let (graph, graph_echo) = load_graph(&cmd.graph)?;
    let cfg = WalkConfig {
        walks_per_node: cmd.walks_per_node,
        horizon: cmd.horizon,
        seed: cmd.seed,
    };
    let mut mf = ManifestBuilder::new(
        "simulate",
        argv,
        &cmd.out,
        cmd.seed,
        json!({ "graph": graph_echo, "walk": cfg }),
    )?;
    mf.input(&cmd.graph.graph)?;
    let report = empirical_vs_expected_report(&transition_matrix(&graph), &cfg)?;
    info!(
        "max deviation {:.3e}, mean deviation {:.3e}, {:.1}% within 3 standard errors",
        report.max_abs_deviation,
        report.mean_abs_deviation,
        100.0 * report.fraction_within_3se
    );
    mf.write_json("oracle.json", &report)?;
    mf.finish()
}

fn read_node_list(path: &Path, graph: &Graph) -> anyhow::Result<Vec<usize>> {
    let index = graph.label_index();
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut nodes = Vec::new();
    let mut unknown = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let label: u64 = t
            .parse()
            .with_context(|| format!("{}:{}: invalid node id {t:?}", path.display(), i + 1))?;
        match index.get(&label) {
            Some(&u) => nodes.push(u),
            None => unknown.push(label),
        }
    }
    if !unknown.is_empty() {
        bail!(
            "{} lists nodes absent from the graph: {unknown:?}",
            path.display()
        );
    }
    Ok(nodes)
}

pub fn classify(cmd: &ClassifyCmd, argv: &[String]) -> anyhow::Result<()> {
    let cfg = checked_config(cmd.train.config())?;
    if cmd.alpha.is_none() && cmd.grid.is_empty() {
        bail!("--grid must list at least one alpha");
    }
    let (graph, graph_echo) = load_graph(&cmd.graph)?;
    let file =
        File::open(&cmd.labels).with_context(|| format!("opening {}", cmd.labels.display()))?;
    let label_file = parse_labels(BufReader::new(file), &graph)
        .with_context(|| format!("reading labels {}", cmd.labels.display()))?;

    let (labels, split_kind) = match (&cmd.train_nodes, &cmd.val_nodes, &cmd.test_nodes) {
        (Some(tr), Some(va), Some(te)) => (
            LabeledNodes::new(
                label_file.labels.clone(),
                label_file.num_classes,
                read_node_list(tr, &graph)?,
                read_node_list(va, &graph)?,
                read_node_list(te, &graph)?,
            )?,
            "files",
        ),
        _ => (
            LabeledNodes::random_split(
                label_file.labels.clone(),
                label_file.num_classes,
                cmd.train_per_class,
                cmd.num_val,
                cmd.num_test,
                cmd.split_seed,
            )?,
            "random",
        ),
    };

    let config = json!({
        "graph": graph_echo,
        "train": cfg,
        "labels": cmd.labels.display().to_string(),
        "split": split_kind,
        "split_seed": cmd.split_seed,
        "train_per_class": cmd.train_per_class,
        "num_val": cmd.num_val,
        "num_test": cmd.num_test,
        "grid": cmd.grid,
        "alpha": cmd.alpha,
    });
    let mut mf = ManifestBuilder::new("classify", argv, &cmd.out, cfg.seed, config.clone())?;
    mf.input(&cmd.graph.graph)?;
    mf.input(&cmd.labels)?;
    for path in [&cmd.train_nodes, &cmd.val_nodes, &cmd.test_nodes]
        .into_iter()
        .flatten()
    {
        mf.input(path)?;
    }

    let outcome = run_training(&graph, &cfg)?;
    write_training(&mut mf, &graph, &outcome)?;
    let alpha = match cmd.alpha {
        Some(a) => a,
        None => select_alpha(&outcome.embeddings, &labels, &cmd.grid)?,
    };
    let preds = smooth_knn_classify(&outcome.embeddings, &labels, alpha)?;
    let test_acc = accuracy(&preds, &labels, labels.test());
    let val_acc = accuracy(&preds, &labels, labels.validation());
    info!("alpha {alpha}: validation accuracy {val_acc:.4}, test accuracy {test_acc:.4}");

    let mut metrics = Metrics {
        roc_auc: None,
        accuracy: Some(test_acc),
        metadata: Default::default(),
    };
    let md = &mut metrics.metadata;
    md.insert("alpha".into(), json!(alpha));
    md.insert("validation_accuracy".into(), json!(val_acc));
    md.insert("split".into(), json!(split_kind));
    md.insert("num_train".into(), json!(labels.train().len()));
    md.insert("num_validation".into(), json!(labels.validation().len()));
    md.insert("num_test".into(), json!(labels.test().len()));
    md.insert("class_ids".into(), json!(label_file.class_ids));
    md.insert("training".into(), train_summary(&outcome));
    md.insert("config".into(), config);
    mf.write_json("metrics.json", &metrics)?;
    mf.finish()
}
