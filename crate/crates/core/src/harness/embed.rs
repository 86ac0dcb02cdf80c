use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sequence::QubitGraph;

/// A connected set of device qubits used as one register.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub id: String,
    pub vertices: Vec<usize>,
}

impl Embedding {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }
}

/// Register size encoded in an `n<size>-<index>` id.
pub fn embedding_size(id: &str) -> Option<usize> {
    id.strip_prefix('n')?.split('-').next()?.parse().ok()
}

/// Heavy-hex lattice: `rows` horizontal chains of `width` qubits, joined by
/// bridge qubits every fourth column with the offset alternating between
/// row gaps. Chain qubit `(r, c)` is `r·width + c`; bridges follow.
pub fn heavy_hex(rows: usize, width: usize) -> Result<QubitGraph> {
    if rows == 0 || width < 2 {
        return Err(invalid("width", "need at least one row of two qubits"));
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 1..width {
            edges.push([r * width + c - 1, r * width + c]);
        }
    }
    let mut next = rows * width;
    for r in 0..rows.saturating_sub(1) {
        let offset = if r % 2 == 0 { 0 } else { 2 };
        for c in (offset..width).step_by(4) {
            edges.push([r * width + c, next]);
            edges.push([next, (r + 1) * width + c]);
            next += 1;
        }
    }
    QubitGraph::new(next, edges)
}

fn extend_paths(adj: &[Vec<usize>], path: &mut Vec<usize>, size: usize, out: &mut Vec<Vec<usize>>) {
    if path.len() == size {
        if path[0] < path[size - 1] || size == 1 {
            out.push(path.clone());
        }
        return;
    }
    let last = *path.last().expect("nonempty");
    for &w in &adj[last] {
        if !path.contains(&w) {
            path.push(w);
            extend_paths(adj, path, size, out);
            path.pop();
        }
    }
}

/// Every simple path on `size` vertices, each listed once (first endpoint
/// below the last), in lexicographic order.
pub fn all_paths(graph: &QubitGraph, size: usize) -> Vec<Vec<usize>> {
    let mut adj = graph.adjacency();
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let mut out = Vec::new();
    for v in 0..graph.n {
        extend_paths(&adj, &mut vec![v], size, &mut out);
    }
    out.sort();
    out
}

/// Up to `count` path embeddings chosen greedily to minimise reuse of
/// qubits already covered; ties go to the lexicographically first path.
pub fn path_embeddings(graph: &QubitGraph, size: usize, count: usize) -> Result<Vec<Embedding>> {
    if size == 0 {
        return Err(invalid("size", "must be at least 1"));
    }
    let paths = all_paths(graph, size);
    if paths.is_empty() {
        return Err(Error::Data(format!("graph has no path on {size} vertices")));
    }
    let mut uses = vec![0usize; graph.n];
    let mut taken: BTreeSet<usize> = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < count && taken.len() < paths.len() {
        let (best, _) = paths
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken.contains(i))
            .map(|(i, p)| (i, p.iter().map(|&v| uses[v]).sum::<usize>()))
            .min_by_key(|&(i, cost)| (cost, i))
            .expect("an untaken path remains");
        taken.insert(best);
        for &v in &paths[best] {
            uses[v] += 1;
        }
        out.push(Embedding {
            id: format!("n{size}-{}", out.len()),
            vertices: paths[best].clone(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heavy_hex_is_bipartite_with_degree_at_most_three() {
        let g = heavy_hex(3, 13).unwrap();
        assert!(g.two_color().is_ok());
        let adj = g.adjacency();
        assert!(adj.iter().all(|a| a.len() <= 3));
        assert_eq!(g.n, 3 * 13 + 4 + 3);
    }

    #[test]
    fn paths_on_a_path() {
        let g = QubitGraph::path(5);
        assert_eq!(all_paths(&g, 3), vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]]);
        let e = path_embeddings(&g, 2, 3).unwrap();
        let v: Vec<_> = e.iter().map(|x| x.vertices.clone()).collect();
        assert_eq!(v, vec![vec![0, 1], vec![2, 3], vec![3, 4]]);
        assert_eq!(e[2].id, "n2-2");
        assert_eq!(embedding_size(&e[2].id), Some(2));
    }

    #[test]
    fn greedy_spreads_out() {
        let g = heavy_hex(2, 9).unwrap();
        let e = path_embeddings(&g, 4, 4).unwrap();
        let mut seen = BTreeSet::new();
        for x in &e {
            for v in &x.vertices {
                assert!(seen.insert(*v), "overlap at {v}");
            }
        }
    }
}
