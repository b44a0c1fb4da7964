//! Immutable undirected graphs in compressed sparse row form, plus the
//! canonical edge-list representation shared by the whole pipeline.
//!
//! Node ids are dense 0-based integers; string ids from input files are
//! remapped before they reach this module. Every edge is stored in both
//! directions, column indices are strictly increasing within a row, and
//! self-loops never survive construction.

use thiserror::Error;

use crate::tensor::Mat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node id {id} out of range for {num_nodes} nodes")]
    NodeOutOfRange { id: usize, num_nodes: usize },
    #[error("feature matrix has {got} rows, graph has {expected} nodes")]
    FeatureRowMismatch { expected: usize, got: usize },
    #[error("self-loop ({0}, {0}) not allowed in an edge list")]
    SelfLoop(usize),
}

/// Unique undirected edges in canonical `(u, v)` orientation with
/// `u < v`, sorted lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeList {
    edges: Vec<(usize, usize)>,
}

impl EdgeList {
    /// Canonicalize arbitrary pairs: orient, sort, drop duplicates.
    /// Self-loops are an error here; only graph construction tolerates
    /// (and counts) them.
    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        for (u, v) in pairs {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(EdgeList { edges })
    }

    pub fn empty() -> Self {
        EdgeList { edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn as_slice(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).is_ok()
    }

    pub fn is_disjoint(&self, other: &EdgeList) -> bool {
        // Both sides are sorted; a merge walk avoids the quadratic scan.
        let (mut i, mut j) = (0, 0);
        while i < self.edges.len() && j < other.edges.len() {
            match self.edges[i].cmp(&other.edges[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn max_node_id(&self) -> Option<usize> {
        self.edges.iter().map(|&(_, v)| v).max()
    }

    pub fn union(&self, other: &EdgeList) -> EdgeList {
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        let (mut i, mut j) = (0, 0);
        while i < self.edges.len() && j < other.edges.len() {
            match self.edges[i].cmp(&other.edges[j]) {
                std::cmp::Ordering::Less => {
                    edges.push(self.edges[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    edges.push(other.edges[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    edges.push(self.edges[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        edges.extend_from_slice(&self.edges[i..]);
        edges.extend_from_slice(&other.edges[j..]);
        EdgeList { edges }
    }
}

impl FromIterator<(usize, usize)> for EdgeList {
    /// Collects pairs that are already canonical; panics otherwise.
    /// Use [`EdgeList::from_pairs`] for untrusted input.
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        let edges: Vec<_> = iter.into_iter().collect();
        assert!(
            edges.iter().all(|&(u, v)| u < v) && edges.windows(2).all(|w| w[0] < w[1]),
            "edge list not canonical"
        );
        EdgeList { edges }
    }
}

/// Immutable undirected graph: CSR adjacency (both directions stored),
/// a dense node-feature matrix, and optional per-node class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    features: Mat<f64>,
    labels: Option<Vec<usize>>,
}

/// A constructed graph plus what ingestion had to clean up.
#[derive(Clone, Debug)]
pub struct GraphBuild {
    pub graph: Graph,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Build a graph from raw node pairs. Pairs are canonicalized and
/// deduplicated, self-loops are dropped and counted (the GCN operator
/// adds its own self-loop term, a stored one would double it).
pub fn build_graph(
    num_nodes: usize,
    edges: &[(usize, usize)],
    features: Mat<f64>,
) -> Result<GraphBuild, GraphError> {
    if features.rows() != num_nodes {
        return Err(GraphError::FeatureRowMismatch {
            expected: num_nodes,
            got: features.rows(),
        });
    }
    let mut canonical = Vec::with_capacity(edges.len());
    let mut self_loops_dropped = 0;
    for &(u, v) in edges {
        let hi = u.max(v);
        if hi >= num_nodes {
            return Err(GraphError::NodeOutOfRange {
                id: hi,
                num_nodes,
            });
        }
        if u == v {
            self_loops_dropped += 1;
            continue;
        }
        canonical.push((u.min(v), u.max(v)));
    }
    canonical.sort_unstable();
    let before = canonical.len();
    canonical.dedup();
    let duplicates_dropped = before - canonical.len();

    let mut degrees = vec![0usize; num_nodes];
    for &(u, v) in &canonical {
        degrees[u] += 1;
        degrees[v] += 1;
    }
    let mut row_offsets = Vec::with_capacity(num_nodes + 1);
    row_offsets.push(0);
    for &d in &degrees {
        row_offsets.push(row_offsets.last().unwrap() + d);
    }
    let mut col_indices = vec![0usize; 2 * canonical.len()];
    let mut cursor = row_offsets[..num_nodes].to_vec();
    // canonical is sorted by (u, v), so filling u-rows in order keeps them
    // sorted; v-rows receive strictly increasing u values for the same
    // reason.
    for &(u, v) in &canonical {
        col_indices[cursor[u]] = v;
        cursor[u] += 1;
    }
    for &(u, v) in &canonical {
        col_indices[cursor[v]] = u;
        cursor[v] += 1;
    }
    let mut graph = Graph {
        num_nodes,
        row_offsets,
        col_indices,
        features,
        labels: None,
    };
    for u in 0..num_nodes {
        let row = &mut graph.col_indices[graph.row_offsets[u]..graph.row_offsets[u + 1]];
        row.sort_unstable();
        debug_assert!(row.windows(2).all(|w| w[0] < w[1]));
    }
    Ok(GraphBuild {
        graph,
        self_loops_dropped,
        duplicates_dropped,
    })
}

impl Graph {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Undirected edge count.
    pub fn num_edges(&self) -> usize {
        self.col_indices.len() / 2
    }

    pub fn check_node(&self, id: usize) -> Result<(), GraphError> {
        if id < self.num_nodes {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                id,
                num_nodes: self.num_nodes,
            })
        }
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[u]..self.row_offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> Result<usize, GraphError> {
        self.check_node(u)?;
        Ok(self.row_offsets[u + 1] - self.row_offsets[u])
    }

    /// Binary search within the neighbor row of the lower-degree endpoint.
    pub fn has_edge(&self, u: usize, v: usize) -> Result<bool, GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Ok(false);
        }
        let (probe, target) = if self.neighbors(u).len() <= self.neighbors(v).len() {
            (u, v)
        } else {
            (v, u)
        };
        Ok(self.neighbors(probe).binary_search(&target).is_ok())
    }

    /// Canonical `(u, v)` edges with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn edge_list(&self) -> EdgeList {
        self.edges().collect()
    }

    pub fn features(&self) -> &Mat<f64> {
        &self.features
    }

    pub fn feature_dim(&self) -> usize {
        self.features.cols()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self, GraphError> {
        if labels.len() != self.num_nodes {
            return Err(GraphError::FeatureRowMismatch {
                expected: self.num_nodes,
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }
}
