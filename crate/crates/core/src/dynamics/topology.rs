//! Directed dependency graphs and their enumeration up to relabeling of nodes.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Directed graph over `N` variables; `has_edge(j, i)` means flow from `j` to `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "GraphRecord", try_from = "GraphRecord")]
pub struct DependencyGraph {
    n_vars: usize,
    adjacency: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    n_vars: usize,
    edges: Vec<[usize; 2]>,
}

impl From<DependencyGraph> for GraphRecord {
    fn from(g: DependencyGraph) -> Self {
        GraphRecord {
            n_vars: g.n_vars,
            edges: g.edges().into_iter().map(|(j, i)| [j, i]).collect(),
        }
    }
}

impl TryFrom<GraphRecord> for DependencyGraph {
    type Error = Error;

    fn try_from(r: GraphRecord) -> Result<Self> {
        DependencyGraph::from_edges(r.n_vars, r.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl DependencyGraph {
    pub fn empty(n_vars: usize) -> Self {
        DependencyGraph {
            n_vars,
            adjacency: vec![vec![false; n_vars]; n_vars],
        }
    }

    pub fn complete(n_vars: usize) -> Self {
        let mut g = Self::empty(n_vars);
        for j in 0..n_vars {
            for i in 0..n_vars {
                g.adjacency[j][i] = i != j;
            }
        }
        g
    }

    /// Self loops are rejected; they carry no meaning here.
    pub fn from_edges(n_vars: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n_vars);
        for (j, i) in edges {
            if j >= n_vars || i >= n_vars {
                return Err(Error::IndexOutOfRange(format!("edge ({j}, {i}) in a {n_vars}-node graph")));
            }
            if i == j {
                return Err(Error::SelfPair(i));
            }
            g.adjacency[j][i] = true;
        }
        Ok(g)
    }

    /// Decodes the off-diagonal entries in row-major order, first entry in the
    /// most significant bit.
    pub fn from_code(n_vars: usize, code: u64) -> Self {
        let mut g = Self::empty(n_vars);
        let pairs = off_diagonal(n_vars);
        let n_bits = pairs.len();
        for (b, (j, i)) in pairs.into_iter().enumerate() {
            g.adjacency[j][i] = (code >> (n_bits - 1 - b)) & 1 == 1;
        }
        g
    }

    pub fn code(&self) -> u64 {
        off_diagonal(self.n_vars)
            .into_iter()
            .fold(0, |acc, (j, i)| (acc << 1) | u64::from(self.adjacency[j][i]))
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// The diagonal is always `false`.
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        from != to && self.adjacency[from][to]
    }

    pub fn set_edge(&mut self, from: usize, to: usize, present: bool) {
        if from != to {
            self.adjacency[from][to] = present;
        }
    }

    /// Edges `(from, to)` in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        off_diagonal(self.n_vars)
            .into_iter()
            .filter(|&(j, i)| self.adjacency[j][i])
            .collect()
    }

    /// Number of incoming edges of `i`.
    pub fn in_degree(&self, i: usize) -> usize {
        (0..self.n_vars).filter(|&j| self.has_edge(j, i)).count()
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut g = Self::empty(self.n_vars);
        for (j, i) in self.edges() {
            g.adjacency[perm[j]][perm[i]] = true;
        }
        g
    }
}

fn off_diagonal(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|j| (0..n).filter(move |&i| i != j).map(move |i| (j, i))).collect()
}

/// One isomorphism class: its minimal-code representative and member count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyClass {
    pub representative: DependencyGraph,
    pub size: usize,
}

/// All directed graphs on `n_vars` nodes up to node relabeling, in increasing
/// order of representative code (so the empty graph comes first).
pub fn enumerate_topologies(n_vars: usize) -> Result<Vec<TopologyClass>> {
    if !(2..=5).contains(&n_vars) {
        return Err(Error::NTooLarge(n_vars));
    }
    let pairs = off_diagonal(n_vars);
    let n_bits = pairs.len();
    let bit_of = |j: usize, i: usize| pairs.iter().position(|&p| p == (j, i)).expect("off-diagonal pair");
    // For each permutation, where every bit moves to (as a shift amount from the MSB side).
    let moves: Vec<Vec<usize>> = (0..n_vars)
        .permutations(n_vars)
        .map(|perm| pairs.iter().map(|&(j, i)| bit_of(perm[j], perm[i])).collect())
        .collect();

    let total = 1usize << n_bits;
    let mut visited = vec![false; total];
    let mut classes = Vec::new();
    let mut orbit = Vec::with_capacity(moves.len());
    for code in 0..total {
        if visited[code] {
            continue;
        }
        orbit.clear();
        for mv in &moves {
            let mut image = 0usize;
            for (b, &target) in mv.iter().enumerate() {
                if (code >> (n_bits - 1 - b)) & 1 == 1 {
                    image |= 1 << (n_bits - 1 - target);
                }
            }
            if !visited[image] {
                visited[image] = true;
                orbit.push(image);
            }
        }
        classes.push(TopologyClass {
            representative: DependencyGraph::from_code(n_vars, code as u64),
            size: orbit.len(),
        });
    }
    Ok(classes)
}
