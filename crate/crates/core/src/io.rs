//! Embedding TSV format.
//!
//! ```text
//! # dim=<d> halves=L,R
//! <label>\t<L_0>…<L_{d/2-1}>\t<R_0>…<R_{d/2-1}>
//! ```
//!
//! Values are written with 9 significant digits.

use std::io::{BufRead, Write};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::objective::EmbeddingPair;

pub fn write_embeddings_tsv<W: Write>(
    graph: &Graph,
    emb: &EmbeddingPair,
    mut out: W,
) -> Result<()> {
    writeln!(out, "# dim={} halves=L,R", emb.dim())?;
    let (left, right) = (emb.left(), emb.right());
    for u in 0..emb.num_nodes() {
        write!(out, "{}", graph.label(u))?;
        for x in left.row(u).iter().chain(right.row(u).iter()) {
            write!(out, "\t{x:.8e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads back node labels and embeddings in file order.
pub fn read_embeddings_tsv<R: BufRead>(reader: R) -> Result<(Vec<u64>, EmbeddingPair)> {
    let mut dim = None;
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        if let Some(header) = line.strip_prefix('#') {
            let d = header
                .split_whitespace()
                .find_map(|kv| kv.strip_prefix("dim="))
                .ok_or_else(|| err("missing dim= in header".into()))?;
            dim = Some(
                d.parse::<usize>()
                    .map_err(|_| err(format!("bad dim {d:?}")))?,
            );
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let d = dim.ok_or_else(|| err("embedding row before header".into()))?;
        let mut fields = line.split('\t');
        let label = fields
            .next()
            .and_then(|t| t.parse::<u64>().ok())
            .ok_or_else(|| err("bad node label".into()))?;
        let row: Vec<f64> = fields
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| err(format!("bad value {t:?}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != d {
            return Err(err(format!("expected {d} values, found {}", row.len())));
        }
        labels.push(label);
        values.push(row);
    }
    let d = dim.ok_or(Error::Parse {
        line: 0,
        message: "empty embedding file".into(),
    })?;
    let half = d / 2;
    let n = labels.len();
    let left = Array2::from_shape_fn((n, half), |(u, j)| values[u][j]);
    let right = Array2::from_shape_fn((n, half), |(u, j)| values[u][half + j]);
    Ok((labels, EmbeddingPair::new(left, right)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_to_nine_digits() {
        let (g, _) = crate::graph::parse_edge_list("7 3\n3 11\n".as_bytes(), false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let emb = EmbeddingPair::random(3, 4, &mut rng).unwrap();
        let mut buf = Vec::new();
        write_embeddings_tsv(&g, &emb, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# dim=4 halves=L,R\n7\t"));
        let (labels, back) = read_embeddings_tsv(buf.as_slice()).unwrap();
        assert_eq!(labels, vec![7, 3, 11]);
        for (a, b) in emb
            .left()
            .iter()
            .chain(emb.right().iter())
            .zip(back.left().iter().chain(back.right().iter()))
        {
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn rejects_short_rows() {
        let text = "# dim=4 halves=L,R\n1\t0.1\t0.2\n";
        assert!(matches!(
            read_embeddings_tsv(text.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
