//! The create (NCG), transfer (NTG) and hold (NHG) graphs and their network metrics.

pub mod build;
pub mod components;
pub mod digraph;
pub mod export;
pub mod metrics;
pub mod pagerank;
pub mod powerlaw;
pub mod quarterly;

use std::collections::HashSet;

use alloy_primitives::Address;
use serde::Serialize;
use thiserror::Error;

pub use build::{
    CreateGraph, Creation, HistoryEntry, HoldGraph, Holding, TransferGraph, build_ncg, build_nhg, build_ntg,
};
pub use components::{ComponentSummary, scc, scc_labels, wcc, wcc_labels};
pub use digraph::DiGraph;
pub use metrics::{
    DegreeDistribution, DegreeSource, Direction, clustering_coefficient, degree_assortativity,
    degree_distribution, reciprocity,
};
pub use pagerank::{PageRankParams, account_pagerank, pagerank, top_accounts};
pub use powerlaw::{FitError, PowerLawFit, fit_power_law};
pub use quarterly::{QuarterCount, Role, quarterly_counts};

use crate::types::{NftKey, Standard, TransferRecord, lower_hex_addr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph is empty")]
    Empty,
    #[error("nft {0} has no transfer history")]
    UnknownNft(NftKey),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// All three graphs built from one record stream.
#[derive(Debug, Clone, Default)]
pub struct TradeGraphs {
    pub create: CreateGraph,
    pub transfer: TransferGraph,
    pub hold: HoldGraph,
}

impl TradeGraphs {
    /// Builds the three graphs; the folds are independent and run concurrently.
    pub fn build(records: &[TransferRecord]) -> Self {
        let (create, (transfer, hold)) = rayon::join(
            || build_ncg(records),
            || rayon::join(|| build_ntg(records), || build_nhg(records)),
        );
        TradeGraphs {
            create,
            transfer,
            hold,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FitSummary {
    pub alpha: f64,
    pub r2: f64,
    pub xmin: u64,
}

impl From<PowerLawFit<f64>> for FitSummary {
    fn from(f: PowerLawFit<f64>) -> Self {
        FitSummary {
            alpha: f.alpha,
            r2: f.r2,
            xmin: f.xmin,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RankedAccount {
    pub account: String,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AccountCounts {
    pub erc721: usize,
    pub erc1155: usize,
    pub union: usize,
}

/// Network metrics of the transfer graph, keyed by metric name when serialized.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NetworkReport {
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: u64,
    pub reciprocity: Option<f64>,
    pub clustering: Option<f64>,
    pub assortativity: Option<f64>,
    pub scc: ComponentSummary,
    pub wcc: ComponentSummary,
    pub pagerank_top: Vec<RankedAccount>,
}

impl NetworkReport {
    pub fn compute(g: &DiGraph, accounts: &[Address], top_k: usize) -> Self {
        let ranked = match pagerank::<f64>(g, PageRankParams::default()) {
            Ok(scores) => {
                let mut v: Vec<_> = scores.into_iter().enumerate().collect();
                v.sort_by(|a, b| {
                    b.1.partial_cmp(&a.1)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(accounts[a.0].cmp(&accounts[b.0]))
                });
                v.into_iter()
                    .take(top_k)
                    .map(|(i, score)| RankedAccount {
                        account: lower_hex_addr(&accounts[i]),
                        score,
                    })
                    .collect()
            }
            Err(_) => Vec::new(),
        };
        NetworkReport {
            nodes: g.node_count(),
            edges: g.edge_count(),
            total_weight: g.total_weight(),
            reciprocity: reciprocity(g),
            clustering: clustering_coefficient(g),
            assortativity: degree_assortativity(g),
            scc: scc(g),
            wcc: wcc(g),
            pagerank_top: ranked,
        }
    }
}

/// Whole-stream report: network metrics, degree fits and graph sizes.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StatsReport {
    pub network: NetworkReport,
    pub accounts: AccountCounts,
    pub create_graph_edges: usize,
    pub create_graph_synthetic: usize,
    pub creators: usize,
    pub hold_graph_edges: usize,
    pub holders: usize,
    pub power_law: std::collections::BTreeMap<String, Option<FitSummary>>,
}

impl StatsReport {
    pub fn compute(records: &[TransferRecord], graphs: &TradeGraphs, top_k: usize) -> Self {
        let network = NetworkReport::compute(graphs.transfer.digraph(), graphs.transfer.accounts(), top_k);
        let mut per: [HashSet<Address>; 2] = Default::default();
        for r in records {
            let i = usize::from(r.standard == Standard::Erc1155);
            per[i].insert(r.from);
            per[i].insert(r.to);
        }
        let union = per[0].union(&per[1]).count();
        let fit = |d: DegreeDistribution| fit_power_law::<f64>(&d, 1).ok().map(FitSummary::from);
        let power_law = [
            ("ntg_in", degree_distribution(&graphs.transfer, Direction::In, false)),
            ("ntg_out", degree_distribution(&graphs.transfer, Direction::Out, false)),
            ("ncg_out", degree_distribution(&graphs.create, Direction::Out, false)),
            ("nhg_out", degree_distribution(&graphs.hold, Direction::Out, false)),
        ]
        .into_iter()
        .map(|(k, d)| (k.to_string(), fit(d)))
        .collect();
        StatsReport {
            network,
            accounts: AccountCounts {
                erc721: per[0].len(),
                erc1155: per[1].len(),
                union,
            },
            create_graph_edges: graphs.create.len(),
            create_graph_synthetic: graphs.create.synthetic_count(),
            creators: graphs.create.creator_outdegrees(false).len(),
            hold_graph_edges: graphs.hold.len(),
            holders: graphs.hold.holder_outdegrees().len(),
            power_law,
        }
    }
}
