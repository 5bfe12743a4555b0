//! Compressed-sparse-row weighted digraph over dense `u32` node ids.

/// Immutable weighted directed graph. Parallel edges are merged by summing weights.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiGraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    out_weights: Vec<u64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
    in_weights: Vec<u64>,
}

fn csr(n: usize, mut edges: Vec<(u32, u32, u64)>) -> (Vec<usize>, Vec<u32>, Vec<u64>) {
    edges.sort_unstable_by_key(|&(u, v, _)| (u, v));
    let mut offsets = vec![0usize; n + 1];
    let mut targets: Vec<u32> = Vec::with_capacity(edges.len());
    let mut weights: Vec<u64> = Vec::with_capacity(edges.len());
    let mut last: Option<(u32, u32)> = None;
    for (u, v, w) in edges {
        if last == Some((u, v)) {
            *weights.last_mut().expect("merged edge has a predecessor") += w;
            continue;
        }
        last = Some((u, v));
        offsets[u as usize + 1] += 1;
        targets.push(v);
        weights.push(w);
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    (offsets, targets, weights)
}

impl DiGraph {
    /// Builds from `(source, target, weight)` triples; every id must be `< node_count`.
    pub fn from_weighted_edges(node_count: usize, edges: impl IntoIterator<Item = (u32, u32, u64)>) -> Self {
        let edges: Vec<_> = edges
            .into_iter()
            .inspect(|&(u, v, _)| {
                assert!(
                    (u as usize) < node_count && (v as usize) < node_count,
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )
            })
            .collect();
        let reversed = edges.iter().map(|&(u, v, w)| (v, u, w)).collect();
        let (out_offsets, out_targets, out_weights) = csr(node_count, edges);
        let (in_offsets, in_sources, in_weights) = csr(node_count, reversed);
        DiGraph {
            out_offsets,
            out_targets,
            out_weights,
            in_offsets,
            in_sources,
            in_weights,
        }
    }

    /// Unit-weight edges.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        Self::from_weighted_edges(node_count, edges.into_iter().map(|(u, v)| (u, v, 1)))
    }

    pub fn node_count(&self) -> usize {
        self.out_offsets.len().saturating_sub(1)
    }

    /// Distinct ordered pairs, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.out_weights.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    pub fn out_edges(&self, u: u32) -> impl Iterator<Item = (u32, u64)> + '_ {
        let r = self.out_offsets[u as usize]..self.out_offsets[u as usize + 1];
        self.out_targets[r.clone()]
            .iter()
            .copied()
            .zip(self.out_weights[r].iter().copied())
    }

    pub fn in_edges(&self, v: u32) -> impl Iterator<Item = (u32, u64)> + '_ {
        let r = self.in_offsets[v as usize]..self.in_offsets[v as usize + 1];
        self.in_sources[r.clone()]
            .iter()
            .copied()
            .zip(self.in_weights[r].iter().copied())
    }

    pub fn successors(&self, u: u32) -> &[u32] {
        &self.out_targets[self.out_offsets[u as usize]..self.out_offsets[u as usize + 1]]
    }

    pub fn predecessors(&self, v: u32) -> &[u32] {
        &self.in_sources[self.in_offsets[v as usize]..self.in_offsets[v as usize + 1]]
    }

    pub fn out_degree(&self, u: u32) -> usize {
        self.successors(u).len()
    }

    pub fn in_degree(&self, v: u32) -> usize {
        self.predecessors(v).len()
    }

    pub fn out_weight(&self, u: u32) -> u64 {
        self.out_edges(u).map(|(_, w)| w).sum()
    }

    pub fn in_weight(&self, v: u32) -> u64 {
        self.in_edges(v).map(|(_, w)| w).sum()
    }

    pub fn weight(&self, u: u32, v: u32) -> Option<u64> {
        let succ = self.successors(u);
        succ.binary_search(&v)
            .ok()
            .map(|i| self.out_weights[self.out_offsets[u as usize] + i])
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.successors(u).binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        (0..self.node_count() as u32).flat_map(move |u| self.out_edges(u).map(move |(v, w)| (u, v, w)))
    }

    /// Sorted, de-duplicated neighbour lists of the undirected simple projection
    /// (self-loops dropped).
    pub fn undirected_adjacency(&self) -> Vec<Vec<u32>> {
        (0..self.node_count() as u32)
            .map(|u| {
                let (a, b) = (self.successors(u), self.predecessors(u));
                let mut merged = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let next = match (a.get(i), b.get(j)) {
                        (Some(&x), Some(&y)) if x == y => {
                            i += 1;
                            j += 1;
                            x
                        }
                        (Some(&x), Some(&y)) if x < y => {
                            i += 1;
                            x
                        }
                        (Some(_), Some(&y)) => {
                            j += 1;
                            y
                        }
                        (Some(&x), None) => {
                            i += 1;
                            x
                        }
                        (None, Some(&y)) => {
                            j += 1;
                            y
                        }
                        (None, None) => unreachable!(),
                    };
                    if next != u && merged.last() != Some(&next) {
                        merged.push(next);
                    }
                }
                merged
            })
            .collect()
    }
}
