//! Strategies and property checks shared by the property suite and the
//! acceptance run.

use std::collections::HashSet;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use walkwatch::eval::{roc_auc, split_edges};
use walkwatch::{train_with, transition_matrix, ContextMode, Graph, TrainConfig};

use super::naive_auc;

/// Connected graph: a random spanning path plus random extra edges.
pub fn connected_graph() -> impl Strategy<Value = Graph> {
    (3usize..25, any::<bool>()).prop_flat_map(|(n, directed)| {
        let order = Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
        let extra = prop::collection::vec((0..n, 0..n), 0..3 * n);
        (order, extra).prop_map(move |(order, extra)| {
            let mut edges: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
            edges.extend(extra);
            Graph::from_edges(n, &edges, directed).unwrap().0
        })
    })
}

pub fn any_graph() -> impl Strategy<Value = Graph> {
    (1usize..30, any::<bool>()).prop_flat_map(|(n, directed)| {
        prop::collection::vec((0..n, 0..n), 0..4 * n)
            .prop_map(move |edges| Graph::from_edges(n, &edges, directed).unwrap().0)
    })
}

fn normalize(g: &Graph, (u, v): (usize, usize)) -> (usize, usize) {
    if g.is_directed() {
        (u, v)
    } else {
        (u.min(v), u.max(v))
    }
}

pub fn check_split(g: &Graph, fraction: f64, seed: u64) -> Result<(), TestCaseError> {
    let split = split_edges(g, fraction, seed).unwrap();
    prop_assert!(split.train_graph.is_connected());

    let all: HashSet<_> = g.edges().into_iter().collect();
    let train: HashSet<_> = split.train_pos.iter().copied().collect();
    let test: HashSet<_> = split.test_pos.iter().copied().collect();
    prop_assert_eq!(train.len(), split.train_pos.len());
    prop_assert_eq!(test.len(), split.test_pos.len());
    prop_assert!(train.is_disjoint(&test));
    prop_assert_eq!(&train | &test, all.clone());
    let in_train_graph: HashSet<_> = split.train_graph.edges().into_iter().collect();
    prop_assert_eq!(in_train_graph, train);
    prop_assert!(split.test_pos.len() <= (fraction * g.num_edges() as f64).floor() as usize);

    let train_neg: HashSet<_> = split.train_neg.iter().copied().collect();
    let test_neg: HashSet<_> = split.test_neg.iter().copied().collect();
    prop_assert_eq!(train_neg.len(), split.train_neg.len());
    prop_assert_eq!(test_neg.len(), split.test_neg.len());
    prop_assert!(train_neg.is_disjoint(&test_neg));
    for &p in split.train_neg.iter().chain(&split.test_neg) {
        prop_assert_ne!(p.0, p.1);
        prop_assert_eq!(normalize(g, p), p);
        prop_assert!(!g.is_edge(p.0, p.1).unwrap());
    }

    let again = split_edges(g, fraction, seed).unwrap();
    prop_assert_eq!(again.test_pos, split.test_pos);
    prop_assert_eq!(again.test_neg, split.test_neg);
    Ok(())
}

pub fn check_auc(
    pos: Vec<i32>,
    neg: Vec<i32>,
    scale: f64,
    shift: f64,
) -> Result<(), TestCaseError> {
    let pos: Vec<f64> = pos.into_iter().map(f64::from).collect();
    let neg: Vec<f64> = neg.into_iter().map(f64::from).collect();
    let auc = roc_auc(&pos, &neg).unwrap();
    prop_assert!((auc - naive_auc(&pos, &neg)).abs() < 1e-12);
    for f in [
        Box::new(move |x: f64| scale * x + shift) as Box<dyn Fn(f64) -> f64>,
        Box::new(|x: f64| x.powi(3)),
        Box::new(|x: f64| (x / 2.0).atan()),
        Box::new(|x: f64| (x / 4.0).exp()),
    ] {
        let tp: Vec<f64> = pos.iter().map(|&x| f(x)).collect();
        let tn: Vec<f64> = neg.iter().map(|&x| f(x)).collect();
        prop_assert!((roc_auc(&tp, &tn).unwrap() - auc).abs() < 1e-12);
    }
    let flipped = roc_auc(&neg, &pos).unwrap();
    prop_assert!((auc + flipped - 1.0).abs() < 1e-12);
    Ok(())
}

pub fn check_row_stochastic(g: &Graph) -> Result<(), TestCaseError> {
    let t = transition_matrix(g);
    for u in 0..g.num_nodes() {
        let (cols, vals) = t.row(u);
        prop_assert!(!cols.is_empty());
        prop_assert!(vals.iter().all(|&p| p > 0.0 && p <= 1.0));
        prop_assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        if g.out_degree(u) == 0 {
            prop_assert_eq!(cols, &[u][..]);
        } else {
            prop_assert_eq!(cols, g.neighbors(u));
        }
    }
    Ok(())
}

pub fn check_simplex_during_training(
    g: &Graph,
    horizon: usize,
    beta: f64,
    lr: f64,
    seed: u64,
) -> Result<(), TestCaseError> {
    let cfg = TrainConfig {
        dim: 4,
        horizon,
        beta,
        walks_per_node: 10,
        learning_rate: lr,
        epochs: 8,
        seed,
        context: ContextMode::Attention,
        ..TrainConfig::default()
    };
    let mut steps = 0;
    let mut bad = Vec::new();
    let outcome = train_with(g, &cfg, |rec| {
        steps += 1;
        let sum: f64 = rec.context.iter().sum();
        if rec.context.len() != horizon
            || rec.context.iter().any(|&p| !(0.0..=1.0).contains(&p))
            || (sum - 1.0).abs() > 1e-12
        {
            bad.push(rec.epoch);
        }
    })
    .unwrap();
    prop_assert_eq!(steps, 8);
    prop_assert!(bad.is_empty(), "off-simplex at epochs {:?}", bad);
    let q = outcome.distribution.weights();
    prop_assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    prop_assert!(q.iter().all(|&p| p >= 0.0));
    Ok(())
}
