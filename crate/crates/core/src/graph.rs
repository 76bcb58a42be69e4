//! Graph ingestion and the row-normalized transition matrix.
//!
//! Graphs are stored in compressed sparse row form over dense node ids
//! `0..n`. The original integer labels from the input file are kept so that
//! embeddings and splits can be written back out under the same names.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use ndarray::{Array2, ArrayView2, ArrayViewMut2, Axis};

use crate::error::{Error, Result};
use crate::par;

/// Unweighted graph in CSR form with sorted, deduplicated neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    directed: bool,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    labels: Vec<u64>,
}

/// Counts of input items discarded while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

impl Graph {
    /// Builds a graph over `num_nodes` dense ids labelled `0..num_nodes`.
    pub fn from_edges(
        num_nodes: usize,
        edges: &[(usize, usize)],
        directed: bool,
    ) -> Result<(Self, BuildReport)> {
        Self::from_edges_with_labels((0..num_nodes as u64).collect(), edges, directed)
    }

    /// Builds a graph whose dense id `i` carries the external label `labels[i]`.
    pub fn from_edges_with_labels(
        labels: Vec<u64>,
        edges: &[(usize, usize)],
        directed: bool,
    ) -> Result<(Self, BuildReport)> {
        let n = labels.len();
        let mut report = BuildReport::default();
        let mut arcs = Vec::with_capacity(if directed {
            edges.len()
        } else {
            2 * edges.len()
        });
        for &(u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, num_nodes: n });
                }
            }
            if u == v {
                report.self_loops_dropped += 1;
                continue;
            }
            arcs.push((u, v));
            if !directed {
                arcs.push((v, u));
            }
        }
        let before = arcs.len();
        arcs.sort_unstable();
        arcs.dedup();
        let removed = before - arcs.len();
        report.duplicates_dropped = if directed { removed } else { removed / 2 };

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &arcs {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = arcs.into_iter().map(|(_, v)| v).collect();
        Ok((
            Graph {
                directed,
                offsets,
                targets,
                labels,
            },
            report,
        ))
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Number of stored arcs; an undirected edge contributes two.
    pub fn num_arcs(&self) -> usize {
        self.targets.len()
    }

    /// Number of edges: arcs for directed graphs, unordered pairs otherwise.
    pub fn num_edges(&self) -> usize {
        if self.directed {
            self.targets.len()
        } else {
            self.targets.len() / 2
        }
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// External label of dense node `u`.
    pub fn label(&self, u: usize) -> u64 {
        self.labels[u]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Map from external label to dense id.
    pub fn label_index(&self) -> HashMap<u64, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect()
    }

    /// True iff the arc `(u, v)` is present.
    pub fn is_edge(&self, u: usize, v: usize) -> Result<bool> {
        let n = self.num_nodes();
        for node in [u, v] {
            if node >= n {
                return Err(Error::NodeOutOfRange { node, num_nodes: n });
            }
        }
        Ok(self.has_arc(u, v))
    }

    pub(crate) fn has_arc(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges as dense id pairs: every arc when directed, `u < v` pairs otherwise.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for u in 0..self.num_nodes() {
            for &v in self.neighbors(u) {
                if self.directed || u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency_dense(&self) -> Array2<f64> {
        let n = self.num_nodes();
        let mut a = Array2::zeros((n, n));
        for u in 0..n {
            for &v in self.neighbors(u) {
                a[[u, v]] = 1.0;
            }
        }
        a
    }

    /// Component id per node, treating arcs as undirected. Ids are assigned
    /// in order of each component's smallest node.
    pub fn connected_components(&self) -> (usize, Vec<usize>) {
        let n = self.num_nodes();
        let mut sets = DisjointSets::new(n);
        for u in 0..n {
            for &v in self.neighbors(u) {
                sets.union(u, v);
            }
        }
        let mut ids = vec![usize::MAX; n];
        let mut root_id = HashMap::new();
        for (u, id) in ids.iter_mut().enumerate() {
            let r = sets.find(u);
            let next = root_id.len();
            *id = *root_id.entry(r).or_insert(next);
        }
        (root_id.len(), ids)
    }

    pub fn is_connected(&self) -> bool {
        self.num_nodes() == 0 || self.connected_components().0 == 1
    }

    /// Subgraph induced by the largest connected component (ties go to the
    /// component containing the smallest node id). Node order is preserved.
    pub fn largest_component(&self) -> Graph {
        let (count, ids) = self.connected_components();
        if count <= 1 {
            return self.clone();
        }
        let mut sizes = vec![0usize; count];
        for &c in &ids {
            sizes[c] += 1;
        }
        let best = (0..count)
            .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
            .unwrap_or(0);
        let mut remap = vec![usize::MAX; self.num_nodes()];
        let mut labels = Vec::with_capacity(sizes[best]);
        for u in 0..self.num_nodes() {
            if ids[u] == best {
                remap[u] = labels.len();
                labels.push(self.labels[u]);
            }
        }
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .filter(|&(u, v)| ids[u] == best && ids[v] == best)
            .map(|(u, v)| (remap[u], remap[v]))
            .collect();
        Graph::from_edges_with_labels(labels, &edges, self.directed)
            .expect("component edges are in range")
            .0
    }

    /// Graph on the same node set (and labels) with a different edge set.
    pub fn with_edges(&self, edges: &[(usize, usize)]) -> Result<Graph> {
        Ok(Graph::from_edges_with_labels(self.labels.clone(), edges, self.directed)?.0)
    }
}

/// Parses a SNAP-style edge list: one `u v` pair per line, `#` comments.
///
/// Nodes receive dense ids in order of first appearance. Self-loops and
/// duplicate edges are dropped and counted in the returned report.
pub fn parse_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<(Graph, BuildReport)> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |label: u64| -> usize {
        *index.entry(label).or_insert_with(|| {
            labels.push(label);
            labels.len() - 1
        })
    };
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 2 node labels, found {}", tokens.len()),
            });
        }
        let mut pair = [0usize; 2];
        for (slot, tok) in pair.iter_mut().zip(&tokens) {
            let label: u64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid node label {tok:?}"),
            })?;
            *slot = intern(label);
        }
        edges.push((pair[0], pair[1]));
    }
    let (graph, report) = Graph::from_edges_with_labels(labels, &edges, directed)?;
    if graph.num_arcs() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    Ok((graph, report))
}

/// Writes edges under their external labels, one per line.
pub fn write_edge_list<W: Write>(
    graph: &Graph,
    edges: &[(usize, usize)],
    mut out: W,
) -> Result<()> {
    for &(u, v) in edges {
        writeln!(out, "{} {}", graph.label(u), graph.label(v))?;
    }
    Ok(())
}

/// Row-stochastic transition matrix sharing the graph's sparsity pattern.
/// Nodes without out-arcs get a probability-one self-loop.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    values: Vec<f64>,
}

pub fn transition_matrix(graph: &Graph) -> TransitionMatrix {
    let n = graph.num_nodes();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::with_capacity(graph.num_arcs());
    let mut values = Vec::with_capacity(graph.num_arcs());
    offsets.push(0);
    for u in 0..n {
        let nbrs = graph.neighbors(u);
        if nbrs.is_empty() {
            targets.push(u);
            values.push(1.0);
        } else {
            let p = 1.0 / nbrs.len() as f64;
            targets.extend_from_slice(nbrs);
            values.extend(std::iter::repeat_n(p, nbrs.len()));
        }
        offsets.push(targets.len());
    }
    TransitionMatrix {
        offsets,
        targets,
        values,
    }
}

impl TransitionMatrix {
    pub fn num_nodes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.targets.len()
    }

    /// Column indices and probabilities of row `u`.
    pub fn row(&self, u: usize) -> (&[usize], &[f64]) {
        let r = self.offsets[u]..self.offsets[u + 1];
        (&self.targets[r.clone()], &self.values[r])
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.num_nodes();
        let mut t = Array2::zeros((n, n));
        for u in 0..n {
            let (cols, vals) = self.row(u);
            for (&v, &p) in cols.iter().zip(vals) {
                t[[u, v]] = p;
            }
        }
        t
    }

    /// `out = m · T` for dense `m`. Each output row only touches the sparse
    /// rows selected by nonzeros of the matching input row.
    pub fn right_multiply_into(&self, m: ArrayView2<'_, f64>, mut out: ArrayViewMut2<'_, f64>) {
        par::for_each_row_mut(&mut out, |i, mut row| {
            row.fill(0.0);
            let src = m.index_axis(Axis(0), i);
            for (j, &w) in src.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let (cols, vals) = self.row(j);
                for (&c, &p) in cols.iter().zip(vals) {
                    row[c] += w * p;
                }
            }
        });
    }
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
