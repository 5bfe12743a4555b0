//! Degree distributions and the structural coefficients of a directed graph.

use std::collections::BTreeMap;

use super::build::{CreateGraph, HoldGraph, TransferGraph};
use super::digraph::DiGraph;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

/// Graphs that expose a per-node degree sequence.
pub trait DegreeSource {
    /// One entry per node on the side `direction` refers to; zeros included.
    fn degree_sequence(&self, direction: Direction) -> Vec<u64>;
}

/// Plain graph-theoretic degree: number of distinct neighbours.
impl DegreeSource for DiGraph {
    fn degree_sequence(&self, direction: Direction) -> Vec<u64> {
        (0..self.node_count() as u32)
            .map(|u| match direction {
                Direction::Out => self.out_degree(u) as u64,
                Direction::In => self.in_degree(u) as u64,
            })
            .collect()
    }
}

/// Transfer counts: in-degree is NFTs received, out-degree NFTs sent.
impl DegreeSource for TransferGraph {
    fn degree_sequence(&self, direction: Direction) -> Vec<u64> {
        let g = self.digraph();
        (0..g.node_count() as u32)
            .map(|u| match direction {
                Direction::Out => g.out_weight(u),
                Direction::In => g.in_weight(u),
            })
            .collect()
    }
}

/// Out: NFTs created per creator (synthetic edges excluded). In: 1 per NFT.
impl DegreeSource for CreateGraph {
    fn degree_sequence(&self, direction: Direction) -> Vec<u64> {
        match direction {
            Direction::Out => self.creator_outdegrees(false).into_values().collect(),
            Direction::In => self.iter().filter(|(_, c)| !c.synthetic).map(|_| 1).collect(),
        }
    }
}

/// Out: NFTs held per account. In: 1 per NFT.
impl DegreeSource for HoldGraph {
    fn degree_sequence(&self, direction: Direction) -> Vec<u64> {
        match direction {
            Direction::Out => self.holder_outdegrees().into_values().collect(),
            Direction::In => vec![1; self.len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeDistribution {
    /// degree → node count
    pub histogram: BTreeMap<u64, u64>,
    pub direction: Direction,
}

impl DegreeDistribution {
    pub fn from_degrees(degrees: impl IntoIterator<Item = u64>, direction: Direction, include_zero: bool) -> Self {
        let mut histogram = BTreeMap::new();
        for d in degrees.into_iter().filter(|d| include_zero || *d > 0) {
            *histogram.entry(d).or_default() += 1;
        }
        DegreeDistribution {
            histogram,
            direction,
        }
    }

    pub fn node_count(&self) -> u64 {
        self.histogram.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.histogram.is_empty()
    }
}

pub fn degree_distribution(g: &impl DegreeSource, direction: Direction, include_zero: bool) -> DegreeDistribution {
    DegreeDistribution::from_degrees(g.degree_sequence(direction), direction, include_zero)
}

/// Fraction of non-loop ordered edges `(u, v)` whose reverse `(v, u)` also exists.
/// `None` when the graph has no non-loop edge.
pub fn reciprocity<F: Real>(g: &DiGraph) -> Option<F> {
    let (mut total, mut mutual) = (0u64, 0u64);
    for (u, v, _) in g.edges() {
        if u == v {
            continue;
        }
        total += 1;
        if g.has_edge(v, u) {
            mutual += 1;
        }
    }
    (total > 0).then(|| F::from_u64_lossy(mutual) / F::from_u64_lossy(total))
}

/// Mean local clustering over all nodes of the undirected simple projection;
/// nodes with fewer than two neighbours contribute 0. `None` for an empty graph.
pub fn clustering_coefficient<F: Real>(g: &DiGraph) -> Option<F> {
    let n = g.node_count();
    if n == 0 {
        return None;
    }
    let adj = g.undirected_adjacency();
    let sum: F = (0..n)
        .map(|u| {
            let nb = &adj[u];
            let k = nb.len();
            if k < 2 {
                return F::zero();
            }
            let mut links = 0u64;
            for (i, &a) in nb.iter().enumerate() {
                let na = &adj[a as usize];
                // count b in nb[i+1..] adjacent to a, merge-intersecting sorted lists
                let rest = &nb[i + 1..];
                let (mut p, mut q) = (0, 0);
                while p < rest.len() && q < na.len() {
                    match rest[p].cmp(&na[q]) {
                        std::cmp::Ordering::Less => p += 1,
                        std::cmp::Ordering::Greater => q += 1,
                        std::cmp::Ordering::Equal => {
                            links += 1;
                            p += 1;
                            q += 1;
                        }
                    }
                }
            }
            let pairs = (k * (k - 1) / 2) as u64;
            F::from_u64_lossy(links) / F::from_u64_lossy(pairs)
        })
        .sum();
    Some(sum / F::from_u64_lossy(n as u64))
}

/// Pearson correlation of endpoint degrees over the undirected simple projection's
/// edges, each edge counted in both orientations. `None` when undefined.
pub fn degree_assortativity<F: Real>(g: &DiGraph) -> Option<F> {
    let adj = g.undirected_adjacency();
    let deg: Vec<F> = adj.iter().map(|nb| F::from_u64_lossy(nb.len() as u64)).collect();
    let (mut m, mut sx, mut sxx, mut sxy) = (0u64, F::zero(), F::zero(), F::zero());
    for (u, nb) in adj.iter().enumerate() {
        let du = deg[u];
        for &v in nb {
            let dv = deg[v as usize];
            m += 1;
            sx = sx + du;
            sxx = sxx + du * du;
            sxy = sxy + du * dv;
        }
    }
    if m == 0 {
        return None;
    }
    let m = F::from_u64_lossy(m);
    let mean = sx / m;
    // symmetric: x and y share mean and variance
    let var = sxx / m - mean * mean;
    let cov = sxy / m - mean * mean;
    let scale = sxx / m;
    if var <= scale * F::epsilon() * F::from_u64_lossy(16) {
        return None;
    }
    Some((cov / var).max(-F::one()).min(F::one()))
}
