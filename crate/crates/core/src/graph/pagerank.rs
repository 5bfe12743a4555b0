use std::collections::HashMap;

use super::GraphError;
use super::build::TransferGraph;
use super::digraph::DiGraph;
use crate::scalar::Real;
use crate::types::AccountId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams<F> {
    pub damping: F,
    pub tol: F,
    pub max_iter: usize,
}

impl<F: Real> Default for PageRankParams<F> {
    fn default() -> Self {
        PageRankParams {
            damping: F::from_f64_lossy(0.85),
            tol: F::from_f64_lossy(1e-9),
            max_iter: 100,
        }
    }
}

/// Weighted PageRank by power iteration. Transition probability from `u` is its edge
/// weight over its total out-weight; dangling mass is spread uniformly. Stops once the
/// L1 change drops below `tol` or after `max_iter` sweeps.
pub fn pagerank<F: Real>(g: &DiGraph, params: PageRankParams<F>) -> Result<Vec<F>, GraphError> {
    let n = g.node_count();
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let d = params.damping;
    if !(d > F::zero() && d < F::one()) {
        return Err(GraphError::InvalidParameter(format!("damping {d} not in (0, 1)")));
    }
    let nf = F::from_u64_lossy(n as u64);
    let out_weight: Vec<F> = (0..n as u32).map(|u| F::from_u64_lossy(g.out_weight(u))).collect();
    let mut rank = vec![F::one() / nf; n];
    let mut next = vec![F::zero(); n];
    let teleport = (F::one() - d) / nf;
    for _ in 0..params.max_iter {
        let dangling: F = (0..n)
            .filter(|&u| out_weight[u] == F::zero())
            .map(|u| rank[u])
            .sum();
        let base = teleport + d * dangling / nf;
        for (v, slot) in next.iter_mut().enumerate() {
            let inflow: F = g
                .in_edges(v as u32)
                .map(|(u, w)| rank[u as usize] * F::from_u64_lossy(w) / out_weight[u as usize])
                .sum();
            *slot = base + d * inflow;
        }
        let delta: F = rank.iter().zip(&next).map(|(a, b)| (*a - *b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if delta < params.tol {
            break;
        }
    }
    Ok(rank)
}

/// PageRank of every account of the transfer graph.
pub fn account_pagerank<F: Real>(
    g: &TransferGraph,
    params: PageRankParams<F>,
) -> Result<HashMap<AccountId, F>, GraphError> {
    let scores = pagerank(g.digraph(), params)?;
    Ok(scores
        .into_iter()
        .enumerate()
        .map(|(i, s)| (g.account(i as u32), s))
        .collect())
}

/// The `k` highest-ranked accounts, ties broken by address.
pub fn top_accounts<F: Real>(scores: &HashMap<AccountId, F>, k: usize) -> Vec<(AccountId, F)> {
    let mut v: Vec<_> = scores.iter().map(|(a, s)| (*a, *s)).collect();
    v.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    v.truncate(k);
    v
}
