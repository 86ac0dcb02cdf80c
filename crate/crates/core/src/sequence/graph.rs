use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    R,
    B,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::R => Color::B,
            Color::B => Color::R,
        }
    }
}

/// Qubit connectivity graph with an optional two-colouring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitGraph {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<Color>>,
}

impl QubitGraph {
    pub fn new(n: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        let g = QubitGraph {
            n,
            edges,
            coloring: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// Path `0-1-…-(n−1)`.
    pub fn path(n: usize) -> Self {
        QubitGraph {
            n,
            edges: (1..n).map(|i| [i - 1, i]).collect(),
            coloring: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyGraph);
        }
        for &[u, v] in &self.edges {
            if u == v || u >= self.n || v >= self.n {
                return Err(Error::InvalidEdge(u, v));
            }
        }
        if let Some(c) = &self.coloring {
            if c.len() != self.n {
                return Err(Error::Data(format!(
                    "coloring has {} entries for {} vertices",
                    c.len(),
                    self.n
                )));
            }
            for &[u, v] in &self.edges {
                if c[u] == c[v] {
                    return Err(Error::Data(format!("edge ({u}, {v}) joins equal colours")));
                }
            }
        }
        Ok(())
    }

    /// Sorted adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &[u, v] in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// Subgraph induced on `vertices`, relabelled `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<QubitGraph> {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n || index[v] != usize::MAX {
                return Err(Error::Data(format!("bad embedding vertex {v}")));
            }
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|[u, v]| index[*u] != usize::MAX && index[*v] != usize::MAX)
            .map(|[u, v]| [index[*u], index[*v]])
            .collect();
        QubitGraph::new(vertices.len(), edges)
    }

    /// Proper two-colouring by breadth-first search. The lowest-index vertex
    /// of every component is red.
    pub fn two_color(&self) -> Result<QubitGraph> {
        self.validate()?;
        let adj = self.adjacency();
        let mut color: Vec<Option<Color>> = vec![None; self.n];
        let mut parent = vec![usize::MAX; self.n];
        for root in 0..self.n {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(Color::R);
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].expect("queued vertices are coloured");
                for &v in &adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(cu.other());
                            parent[v] = u;
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => {
                            return Err(Error::NotBipartite {
                                cycle: odd_cycle(&parent, u, v),
                            });
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(QubitGraph {
            n: self.n,
            edges: self.edges.clone(),
            coloring: Some(color.into_iter().map(|c| c.expect("all visited")).collect()),
        })
    }

    /// Vertices of the given colour (requires a colouring).
    pub fn class(&self, c: Color) -> Vec<usize> {
        self.coloring
            .as_ref()
            .map(|col| (0..self.n).filter(|&v| col[v] == c).collect())
            .unwrap_or_default()
    }
}

/// Cycle through the BFS tree closed by the edge `(u, v)`.
fn odd_cycle(parent: &[usize], u: usize, v: usize) -> Vec<usize> {
    let chain = |mut x: usize| {
        let mut out = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            out.push(x);
        }
        out
    };
    let (cu, cv) = (chain(u), chain(v));
    let lca = *cu.iter().find(|x| cv.contains(x)).expect("same component");
    let mut cycle: Vec<usize> = cu.iter().copied().take_while(|&x| x != lca).collect();
    cycle.push(lca);
    let back: Vec<usize> = cv.iter().copied().take_while(|&x| x != lca).collect();
    cycle.extend(back.into_iter().rev());
    cycle
}
