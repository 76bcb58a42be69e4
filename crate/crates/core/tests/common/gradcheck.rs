//! Central-difference check of the analytic gradients against the dense
//! reference objective.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walkwatch::{
    expected_cooccurrence, gradients, softmax_context, transition_matrix, ContextParams,
    EmbeddingPair, Graph, TransitionPowers,
};

use super::{naive_objective, random_graph};

pub const STEP: f64 = 1e-5;
pub const TOLERANCE: f64 = 1e-4;

pub struct Instance {
    pub graph: Graph,
    pub left: Array2<f64>,
    pub right: Array2<f64>,
    pub logits: Vec<f64>,
    pub m: u32,
    pub beta: f64,
}

pub fn instance(i: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
    let n = rng.random_range(3..=12);
    let graph = random_graph(n, rng.random_range(0.15..0.6), i % 2 == 1, i);
    let mut uniform =
        |r: usize, c: usize| Array2::from_shape_fn((r, c), |_| rng.random_range(-1.0..1.0));
    let left = uniform(n, 2);
    let right = uniform(n, 2);
    let logits = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
    Instance {
        graph,
        left,
        right,
        logits,
        m: [1, 5, 20][(i % 3) as usize],
        beta: [0.0, 0.5, 5.0][((i / 3) % 3) as usize],
    }
}

fn rel_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let na: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nb: f64 = numeric.iter().map(|b| b * b).sum::<f64>().sqrt();
    let scale = na.max(nb);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn central<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    (f(x + STEP) - f(x - STEP)) / (2.0 * STEP)
}

/// Largest relative error over the three parameter blocks.
pub fn check(inst: &Instance) -> (f64, f64, f64) {
    let m = f64::from(inst.m);
    let t = transition_matrix(&inst.graph);
    let params = ContextParams::from_logits(inst.logits.clone(), inst.m).unwrap();
    let e = expected_cooccurrence(&t, &softmax_context(&params), inst.m).unwrap();
    let emb = EmbeddingPair::new(inst.left.clone(), inst.right.clone()).unwrap();
    let powers = TransitionPowers::streaming(&t, 3);
    let grads = gradients(
        &e,
        &powers,
        inst.m,
        &inst.graph,
        &emb,
        &inst.logits,
        inst.beta,
    )
    .unwrap();

    let loss = |l: &Array2<f64>, r: &Array2<f64>, q: &[f64]| {
        naive_objective(&inst.graph, l, r, q, m, inst.beta)
    };
    let base = loss(&inst.left, &inst.right, &inst.logits);
    assert!((grads.loss.total - base).abs() <= 1e-9 * base.abs().max(1.0));

    let mut num_left = Vec::new();
    for idx in 0..inst.left.len() {
        num_left.push(central(
            |x| {
                let mut l = inst.left.clone();
                l.as_slice_mut().unwrap()[idx] = x;
                loss(&l, &inst.right, &inst.logits)
            },
            inst.left.as_slice().unwrap()[idx],
        ));
    }
    let mut num_right = Vec::new();
    for idx in 0..inst.right.len() {
        num_right.push(central(
            |x| {
                let mut r = inst.right.clone();
                r.as_slice_mut().unwrap()[idx] = x;
                loss(&inst.left, &r, &inst.logits)
            },
            inst.right.as_slice().unwrap()[idx],
        ));
    }
    let mut num_q = Vec::new();
    for k in 0..inst.logits.len() {
        num_q.push(central(
            |x| {
                let mut q = inst.logits.clone();
                q[k] = x;
                loss(&inst.left, &inst.right, &q)
            },
            inst.logits[k],
        ));
    }
    (
        rel_error(grads.left.as_slice().unwrap(), &num_left),
        rel_error(grads.right.as_slice().unwrap(), &num_right),
        rel_error(&grads.logits, &num_q),
    )
}
