//! Streaming builders for the create, transfer and hold graphs.

use std::collections::HashMap;

use alloy_primitives::{Address, B256};

use super::GraphError;
use super::digraph::DiGraph;
use crate::types::{AccountId, NftKey, Standard, TransferRecord};

/// Creation edge of one NFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Creation {
    pub creator: AccountId,
    pub timestamp: u64,
    pub standard: Standard,
    /// No mint was seen; the creator is the first-seen sender.
    pub synthetic: bool,
}

/// Bipartite account → NFT graph, one edge per NFT.
#[derive(Debug, Clone, Default)]
pub struct CreateGraph {
    edges: HashMap<NftKey, Creation>,
    /// Mints of an NFT that already had a (non-synthetic) creation edge.
    pub duplicate_mints: usize,
}

impl CreateGraph {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn get(&self, nft: &NftKey) -> Option<&Creation> {
        self.edges.get(nft)
    }

    pub fn contains(&self, nft: &NftKey) -> bool {
        self.edges.contains_key(nft)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NftKey, &Creation)> {
        self.edges.iter()
    }

    /// Edges ordered by NFT.
    pub fn sorted_edges(&self) -> Vec<(NftKey, Creation)> {
        let mut v: Vec<_> = self.edges.iter().map(|(k, c)| (*k, *c)).collect();
        v.sort_by_key(|(k, _)| *k);
        v
    }

    pub fn synthetic_count(&self) -> usize {
        self.edges.values().filter(|c| c.synthetic).count()
    }

    /// NFTs created per creator.
    pub fn creator_outdegrees(&self, include_synthetic: bool) -> HashMap<AccountId, u64> {
        let mut out: HashMap<AccountId, u64> = HashMap::new();
        for c in self.edges.values().filter(|c| include_synthetic || !c.synthetic) {
            *out.entry(c.creator).or_default() += 1;
        }
        out
    }
}

/// Creation edges: the first mint of each NFT, or a flagged synthetic edge from the
/// first-seen sender when the stream starts after the mint.
pub fn build_ncg(records: &[TransferRecord]) -> CreateGraph {
    let mut g = CreateGraph::default();
    for r in records {
        let nft = r.nft();
        match g.edges.get_mut(&nft) {
            None => {
                g.edges.insert(
                    nft,
                    Creation {
                        creator: if r.is_mint() { r.to } else { r.from },
                        timestamp: r.timestamp,
                        standard: r.standard,
                        synthetic: !r.is_mint(),
                    },
                );
            }
            Some(existing) if r.is_mint() => {
                if existing.synthetic {
                    *existing = Creation {
                        creator: r.to,
                        timestamp: r.timestamp,
                        standard: r.standard,
                        synthetic: false,
                    };
                } else {
                    g.duplicate_mints += 1;
                }
            }
            Some(_) => {}
        }
    }
    if g.duplicate_mints > 0 {
        tracing::warn!(duplicates = g.duplicate_mints, "repeated mints ignored");
    }
    g
}

/// One movement in an NFT's history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistoryEntry {
    pub from: AccountId,
    pub to: AccountId,
    pub timestamp: u64,
    pub tx_hash: B256,
}

/// Weighted account graph (weight = number of transfers) plus per-NFT histories.
#[derive(Debug, Clone, Default)]
pub struct TransferGraph {
    accounts: Vec<AccountId>,
    index: HashMap<AccountId, u32>,
    graph: DiGraph,
    history: HashMap<NftKey, Vec<HistoryEntry>>,
}

impl TransferGraph {
    pub fn digraph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.accounts.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn total_weight(&self) -> u64 {
        self.graph.total_weight()
    }

    pub fn account(&self, id: u32) -> AccountId {
        self.accounts[id as usize]
    }

    pub fn accounts(&self) -> &[AccountId] {
        &self.accounts
    }

    pub fn node_id(&self, a: &AccountId) -> Option<u32> {
        self.index.get(a).copied()
    }

    pub fn weight(&self, from: &AccountId, to: &AccountId) -> u64 {
        match (self.node_id(from), self.node_id(to)) {
            (Some(u), Some(v)) => self.graph.weight(u, v).unwrap_or(0),
            _ => 0,
        }
    }

    /// `(from, to, weight)` ordered by node id.
    pub fn edges(&self) -> impl Iterator<Item = (AccountId, AccountId, u64)> + '_ {
        self.graph
            .edges()
            .map(|(u, v, w)| (self.accounts[u as usize], self.accounts[v as usize], w))
    }

    pub fn history(&self, nft: &NftKey) -> Option<&[HistoryEntry]> {
        self.history.get(nft).map(Vec::as_slice)
    }

    pub fn nfts(&self) -> impl Iterator<Item = &NftKey> {
        self.history.keys()
    }

    /// Distinct non-zero accounts that sent or received the NFT.
    pub fn count_transferors(&self, nft: &NftKey) -> Result<usize, GraphError> {
        let h = self.history(nft).ok_or(GraphError::UnknownNft(*nft))?;
        let mut seen: Vec<Address> = h
            .iter()
            .flat_map(|e| [e.from, e.to])
            .filter(|a| *a != Address::ZERO)
            .collect();
        seen.sort_unstable();
        seen.dedup();
        Ok(seen.len())
    }
}

/// Every record, mints and burns included, adds one to its `(from, to)` edge weight.
pub fn build_ntg(records: &[TransferRecord]) -> TransferGraph {
    let mut accounts = Vec::new();
    let mut index: HashMap<AccountId, u32> = HashMap::new();
    let mut intern = |a: AccountId| -> u32 {
        *index.entry(a).or_insert_with(|| {
            accounts.push(a);
            (accounts.len() - 1) as u32
        })
    };
    let mut weights: HashMap<(u32, u32), u64> = HashMap::new();
    let mut history: HashMap<NftKey, Vec<HistoryEntry>> = HashMap::new();
    for r in records {
        let (u, v) = (intern(r.from), intern(r.to));
        *weights.entry((u, v)).or_default() += 1;
        history.entry(r.nft()).or_default().push(HistoryEntry {
            from: r.from,
            to: r.to,
            timestamp: r.timestamp,
            tx_hash: r.tx_hash,
        });
    }
    for h in history.values_mut() {
        h.sort_by_key(|e| e.timestamp);
    }
    let graph = DiGraph::from_weighted_edges(accounts.len(), weights.into_iter().map(|((u, v), w)| (u, v, w)));
    TransferGraph {
        accounts,
        index,
        graph,
        history,
    }
}

/// Current holder of one NFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Holding {
    pub holder: AccountId,
    pub since: u64,
    pub standard: Standard,
    order: (u64, u64, u64, u32),
}

/// Bipartite account → NFT graph: who received each NFT last.
#[derive(Debug, Clone, Default)]
pub struct HoldGraph {
    holdings: HashMap<NftKey, Holding>,
}

impl HoldGraph {
    pub fn len(&self) -> usize {
        self.holdings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.holdings.is_empty()
    }

    pub fn holder(&self, nft: &NftKey) -> Option<AccountId> {
        self.holdings.get(nft).map(|h| h.holder)
    }

    pub fn get(&self, nft: &NftKey) -> Option<&Holding> {
        self.holdings.get(nft)
    }

    pub fn contains(&self, nft: &NftKey) -> bool {
        self.holdings.contains_key(nft)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NftKey, &Holding)> {
        self.holdings.iter()
    }

    pub fn sorted_edges(&self) -> Vec<(NftKey, Holding)> {
        let mut v: Vec<_> = self.holdings.iter().map(|(k, h)| (*k, *h)).collect();
        v.sort_by_key(|(k, _)| *k);
        v
    }

    /// NFTs held per account.
    pub fn holder_outdegrees(&self) -> HashMap<AccountId, u64> {
        let mut out: HashMap<AccountId, u64> = HashMap::new();
        for h in self.holdings.values() {
            *out.entry(h.holder).or_default() += 1;
        }
        out
    }
}

/// Holder = recipient of the latest record, ordered by
/// `(timestamp, block_number, log_index, batch_pos)`.
pub fn build_nhg(records: &[TransferRecord]) -> HoldGraph {
    let mut g = HoldGraph::default();
    for r in records {
        let order = r.chain_order();
        let h = Holding {
            holder: r.to,
            since: r.timestamp,
            standard: r.standard,
            order,
        };
        g.holdings
            .entry(r.nft())
            .and_modify(|cur| {
                if order >= cur.order {
                    *cur = h;
                }
            })
            .or_insert(h);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{addr, nft, rec};

    #[test]
    fn ncg_single_mint() {
        let (a, b) = (addr(0xa), addr(0xb));
        let x = nft(1, 1);
        let g = build_ncg(&[rec(Address::ZERO, a, x, 5), rec(a, b, x, 9)]);
        assert_eq!(g.len(), 1);
        assert_eq!(
            g.get(&x).copied(),
            Some(Creation {
                creator: a,
                timestamp: 5,
                standard: Standard::Erc721,
                synthetic: false
            })
        );
    }

    #[test]
    fn ncg_duplicate_mint_first_wins() {
        let x = nft(1, 1);
        let g = build_ncg(&[rec(Address::ZERO, addr(1), x, 5), rec(Address::ZERO, addr(2), x, 6)]);
        assert_eq!(g.get(&x).unwrap().creator, addr(1));
        assert_eq!(g.duplicate_mints, 1);
    }

    #[test]
    fn ncg_synthetic_edge_for_midlife_nft() {
        let x = nft(1, 1);
        let g = build_ncg(&[rec(addr(3), addr(4), x, 5)]);
        let c = g.get(&x).unwrap();
        assert!(c.synthetic);
        assert_eq!(c.creator, addr(3));
        assert_eq!(g.creator_outdegrees(false).len(), 0);
        assert_eq!(g.synthetic_count(), 1);
    }

    #[test]
    fn ntg_weights_and_reciprocal_witnesses() {
        let (a, b) = (addr(0xa), addr(0xb));
        let g = build_ntg(&[rec(a, b, nft(1, 1), 1), rec(a, b, nft(1, 2), 2), rec(b, a, nft(1, 1), 3)]);
        assert_eq!(g.weight(&a, &b), 2);
        assert_eq!(g.weight(&b, &a), 1);
        assert_eq!(g.total_weight(), 3);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.history(&nft(1, 1)).unwrap().len(), 2);

        let empty = build_ntg(&[]);
        assert_eq!((empty.node_count(), empty.edge_count()), (0, 0));
    }

    #[test]
    fn nhg_last_recipient_and_tiebreak() {
        let x = nft(1, 1);
        let (a, b, c) = (addr(0xa), addr(0xb), addr(0xc));
        let g = build_nhg(&[rec(Address::ZERO, a, x, 1), rec(a, b, x, 2), rec(b, c, x, 3)]);
        assert_eq!(g.holder(&x), Some(c));

        let g = build_nhg(&[rec(Address::ZERO, a, x, 1), rec(a, Address::ZERO, x, 2)]);
        assert_eq!(g.holder(&x), Some(Address::ZERO));

        let mut r1 = rec(a, b, x, 7);
        r1.log_index = 5;
        let mut r2 = rec(a, c, x, 7);
        r2.log_index = 2;
        // out of order input: the higher log index still wins
        assert_eq!(build_nhg(&[r1.clone(), r2.clone()]).holder(&x), Some(b));
        assert_eq!(build_nhg(&[r2, r1]).holder(&x), Some(b));
    }

    #[test]
    fn transferor_counts() {
        let x = nft(1, 1);
        let (a, b, c, d) = (addr(0xa), addr(0xb), addr(0xc), addr(0xd));
        // two accounts bouncing the NFT four times
        let g = build_ntg(&[rec(a, b, x, 1), rec(b, a, x, 2), rec(a, b, x, 3), rec(b, a, x, 4)]);
        assert_eq!(g.count_transferors(&x).unwrap(), 2);

        let g = build_ntg(&[rec(Address::ZERO, a, x, 1)]);
        assert_eq!(g.count_transferors(&x).unwrap(), 1);

        let g = build_ntg(&[rec(a, b, x, 1), rec(b, c, x, 2), rec(c, d, x, 3)]);
        assert_eq!(g.count_transferors(&x).unwrap(), 4);
        assert!(matches!(g.count_transferors(&nft(9, 9)), Err(GraphError::UnknownNft(_))));
    }
}
