//! Seeded market generator.

use std::collections::{BTreeMap, BTreeSet};

use alloy_primitives::{Address, B256, U256, keccak256};
use nftgraph::{NftKey, Standard, TransferRecord, TxValueRecord, lower_hex_addr};
use rand::distr::Distribution;
use rand::distr::weighted::WeightedIndex;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Name of the pseudo-random generator, pinned in the ground truth for reproducibility.
pub const GENERATOR: &str = "ChaCha8Rng";
/// Seconds in a generated quarter.
pub const QUARTER_SECS: u64 = 90 * 86_400;
const BLOCK_SECS: u64 = 12;
const FIRST_BLOCK: u64 = 10_000_000;

/// A set of colluding accounts trading fresh NFTs in a circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WashRing {
    pub ring_size: usize,
    pub nft_count: usize,
    pub trades_per_nft: usize,
    pub value_wei: u128,
    pub time_span_s: u64,
}

impl Default for WashRing {
    fn default() -> Self {
        WashRing {
            ring_size: 3,
            nft_count: 4,
            trades_per_nft: 12,
            value_wei: 100_000_000_000_000_000_000,
            time_span_s: 86_400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MarketSpec {
    pub seed: u64,
    pub n_series: usize,
    /// Inclusive range of NFTs minted per series.
    pub nfts_per_series: (usize, usize),
    /// Background account pool; the first `n_series` accounts are the creators.
    pub n_accounts: usize,
    /// Buyer `i` is drawn with weight `(i + 1)^-activity_exponent`.
    pub activity_exponent: f64,
    /// Background trades per NFT on average; every NFT trades at least once.
    pub trades_per_nft: f64,
    /// Inclusive wei interval of background sale prices.
    pub price_range: (u128, u128),
    pub priced_probability: f64,
    pub erc1155_share: f64,
    pub quarters: u64,
    pub start_time: u64,
    pub wash_rings: Vec<WashRing>,
}

impl Default for MarketSpec {
    fn default() -> Self {
        MarketSpec {
            seed: 1,
            n_series: 8,
            nfts_per_series: (4, 40),
            n_accounts: 300,
            activity_exponent: 1.2,
            trades_per_nft: 3.0,
            price_range: (1_000_000_000_000_000, 10_000_000_000_000_000),
            priced_probability: 0.7,
            erc1155_share: 0.25,
            quarters: 4,
            // 2021-01-01T00:00:00Z
            start_time: 1_609_459_200,
            wash_rings: vec![WashRing::default()],
        }
    }
}

impl MarketSpec {
    pub fn validate(&self) -> Result<(), String> {
        let (lo, hi) = self.nfts_per_series;
        if lo > hi {
            return Err(format!("nfts_per_series min {lo} exceeds max {hi}"));
        }
        if self.n_accounts < self.n_series + 2 {
            return Err(format!(
                "n_accounts {} must exceed n_series {} by at least 2",
                self.n_accounts, self.n_series
            ));
        }
        if self.price_range.0 == 0 || self.price_range.0 > self.price_range.1 {
            return Err("price_range must be a non-empty interval of positive wei".into());
        }
        for (name, p) in [("priced_probability", self.priced_probability), ("erc1155_share", self.erc1155_share)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} must lie in [0, 1]"));
            }
        }
        if self.activity_exponent.is_nan() || self.activity_exponent < 0.0 || self.trades_per_nft.is_nan() || self.trades_per_nft < 1.0 {
            return Err("activity_exponent must be >= 0 and trades_per_nft >= 1".into());
        }
        if self.quarters == 0 {
            return Err("quarters must be positive".into());
        }
        for r in &self.wash_rings {
            if r.ring_size < 2 || r.value_wei == 0 {
                return Err("wash rings need at least 2 accounts and a positive value".into());
            }
            if r.time_span_s >= self.quarters * QUARTER_SECS / 2 {
                return Err("wash ring time span must fit in the second half of the market".into());
            }
        }
        if !self.wash_rings.is_empty() && self.n_series == 0 {
            return Err("wash rings need at least one series".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTruth {
    pub contract: String,
    pub standard: Standard,
    pub creator: String,
    pub nft_count: u64,
    /// Non-mint transfers.
    pub transfer_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairTally {
    pub from: String,
    pub to: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NftRef {
    pub contract: String,
    pub token_id: String,
}

/// What the generator put into the market, tallied while emitting it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub generator: String,
    pub seed: u64,
    pub records: u64,
    pub wash_nfts: Vec<NftRef>,
    pub series: Vec<SeriesTruth>,
    pub pair_tallies: Vec<PairTally>,
}

impl GroundTruth {
    pub fn wash_set(&self) -> BTreeSet<NftKey> {
        self.wash_nfts
            .iter()
            .map(|n| NftKey::new(n.contract.parse().expect("own address"), n.token_id.parse().expect("own id")))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    /// Chain-ordered.
    pub records: Vec<TransferRecord>,
    pub tx_values: Vec<TxValueRecord>,
    pub truth: GroundTruth,
}

impl Market {
    pub fn tx_value_map(&self) -> std::collections::HashMap<B256, U256> {
        self.tx_values.iter().map(|t| (t.tx_hash, t.value_wei)).collect()
    }
}

fn account(tag: &[u8], seed: u64, a: u64, b: u64) -> Address {
    let mut buf = tag.to_vec();
    buf.extend_from_slice(&seed.to_be_bytes());
    buf.extend_from_slice(&a.to_be_bytes());
    buf.extend_from_slice(&b.to_be_bytes());
    Address::from_word(keccak256(&buf))
}

struct Event {
    ts: u64,
    nft_ix: usize,
    seq: usize,
    from: Address,
    to: Address,
    value: Option<u128>,
}

/// Builds a market. Generation is single-threaded and depends only on `spec`.
pub fn generate(spec: &MarketSpec) -> Result<Market, String> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let end = spec.start_time + spec.quarters * QUARTER_SECS;
    let accounts: Vec<Address> = (0..spec.n_accounts as u64).map(|i| account(b"acct", spec.seed, i, 0)).collect();
    let weights: Vec<f64> = (0..spec.n_accounts)
        .map(|i| ((i + 1) as f64).powf(-spec.activity_exponent))
        .collect();
    let buyer_dist = WeightedIndex::new(&weights).map_err(|e| e.to_string())?;

    let mut nfts: Vec<(NftKey, Standard)> = Vec::new();
    let mut events: Vec<Event> = Vec::new();
    let mut series_truth: Vec<SeriesTruth> = Vec::new();
    let mut series_next_id: Vec<u64> = Vec::new();
    let mut wash: BTreeSet<NftKey> = BTreeSet::new();

    for s in 0..spec.n_series {
        let contract = account(b"series", spec.seed, s as u64, 0);
        let standard = if rng.random_bool(spec.erc1155_share) {
            Standard::Erc1155
        } else {
            Standard::Erc721
        };
        let creator = accounts[s];
        let count = rng.random_range(spec.nfts_per_series.0..=spec.nfts_per_series.1);
        let mut transfers = 0u64;
        for t in 0..count {
            let ix = nfts.len();
            nfts.push((NftKey::new(contract, U256::from(t as u64)), standard));
            let mint = rng.random_range(spec.start_time..spec.start_time + QUARTER_SECS * spec.quarters / 4);
            events.push(Event {
                ts: mint,
                nft_ix: ix,
                seq: 0,
                from: Address::ZERO,
                to: creator,
                value: None,
            });
            // one guaranteed trade, then a geometric-ish tail around the requested mean
            let extra = spec.trades_per_nft - 1.0;
            let mut n_trades = 1 + extra.floor() as usize;
            if rng.random_bool(extra.fract()) {
                n_trades += 1;
            }
            let mut times: Vec<u64> = (0..n_trades).map(|_| rng.random_range(mint + 1..end)).collect();
            times.sort_unstable();
            let mut holder = s;
            for (j, ts) in times.into_iter().enumerate() {
                let mut buyer = buyer_dist.sample(&mut rng);
                if buyer == holder {
                    buyer = (buyer + 1) % accounts.len();
                }
                // the first trade of each series' first NFT is always priced, so every
                // series has a defined floor
                let priced = (t == 0 && j == 0) || rng.random_bool(spec.priced_probability);
                let value = priced.then(|| rng.random_range(spec.price_range.0..=spec.price_range.1));
                events.push(Event {
                    ts,
                    nft_ix: ix,
                    seq: j + 1,
                    from: accounts[holder],
                    to: accounts[buyer],
                    value,
                });
                holder = buyer;
                transfers += 1;
            }
        }
        series_truth.push(SeriesTruth {
            contract: lower_hex_addr(&contract),
            standard,
            creator: lower_hex_addr(&creator),
            nft_count: count as u64,
            transfer_count: transfers,
        });
        series_next_id.push(count as u64);
    }

    for (r, ring) in spec.wash_rings.iter().enumerate() {
        let s = r % spec.n_series;
        let contract = account(b"series", spec.seed, s as u64, 0);
        let standard = nfts
            .iter()
            .find(|(k, _)| k.contract == contract)
            .map_or(Standard::Erc721, |(_, st)| *st);
        let members: Vec<Address> = (0..ring.ring_size as u64)
            .map(|j| account(b"ring", spec.seed, r as u64, j))
            .collect();
        let half = spec.start_time + spec.quarters * QUARTER_SECS / 2;
        let t0 = rng.random_range(half..end - ring.time_span_s);
        for _ in 0..ring.nft_count {
            let id = series_next_id[s];
            series_next_id[s] += 1;
            let key = NftKey::new(contract, U256::from(id));
            let ix = nfts.len();
            nfts.push((key, standard));
            wash.insert(key);
            events.push(Event {
                ts: t0,
                nft_ix: ix,
                seq: 0,
                from: Address::ZERO,
                to: members[0],
                value: None,
            });
            for j in 0..ring.trades_per_nft {
                let ts = t0 + (j as u64 + 1) * ring.time_span_s / ring.trades_per_nft as u64;
                events.push(Event {
                    ts,
                    nft_ix: ix,
                    seq: j + 1,
                    from: members[j % ring.ring_size],
                    to: members[(j + 1) % ring.ring_size],
                    value: Some(ring.value_wei),
                });
            }
            series_truth[s].nft_count += 1;
            series_truth[s].transfer_count += ring.trades_per_nft as u64;
        }
    }

    events.sort_by_key(|e| (e.ts, e.nft_ix, e.seq));
    let mut records = Vec::with_capacity(events.len());
    let mut tx_values = Vec::new();
    let mut tallies: BTreeMap<(Address, Address), u64> = BTreeMap::new();
    let mut last_block = u64::MAX;
    let mut log_index = 0u64;
    for (counter, e) in events.iter().enumerate() {
        let block = FIRST_BLOCK + (e.ts - spec.start_time) / BLOCK_SECS;
        if block != last_block {
            last_block = block;
            log_index = 0;
        }
        let tx_hash = B256::from(U256::from(counter as u64 + 1));
        let (nft, standard) = nfts[e.nft_ix];
        records.push(TransferRecord {
            standard,
            from: e.from,
            to: e.to,
            contract: nft.contract,
            token_id: nft.token_id,
            amount: U256::from(1u8),
            block_number: block,
            timestamp: e.ts,
            tx_hash,
            log_index,
            batch_pos: 0,
        });
        log_index += 1;
        if let Some(v) = e.value {
            tx_values.push(TxValueRecord {
                tx_hash,
                value_wei: U256::from(v),
            });
        }
        *tallies.entry((e.from, e.to)).or_default() += 1;
    }

    let truth = GroundTruth {
        generator: GENERATOR.to_string(),
        seed: spec.seed,
        records: records.len() as u64,
        wash_nfts: wash
            .iter()
            .map(|k| NftRef {
                contract: lower_hex_addr(&k.contract),
                token_id: k.token_id.to_string(),
            })
            .collect(),
        series: series_truth,
        pair_tallies: tallies
            .into_iter()
            .map(|((from, to), count)| PairTally {
                from: lower_hex_addr(&from),
                to: lower_hex_addr(&to),
                count,
            })
            .collect(),
    };
    Ok(Market {
        records,
        tx_values,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_market() {
        let spec = MarketSpec::default();
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = MarketSpec {
            seed: 2,
            ..MarketSpec::default()
        };
        assert_ne!(generate(&spec).unwrap().records, generate(&other).unwrap().records);
    }

    #[test]
    fn records_are_chain_ordered_and_hashes_unique() {
        let m = generate(&MarketSpec::default()).unwrap();
        assert!(m.records.windows(2).all(|w| w[0].chain_order() < w[1].chain_order()));
        let hashes: BTreeSet<_> = m.records.iter().map(|r| r.tx_hash).collect();
        assert_eq!(hashes.len(), m.records.len());
    }

    #[test]
    fn ownership_chain_is_consistent() {
        let m = generate(&MarketSpec::default()).unwrap();
        let mut holder: BTreeMap<NftKey, Address> = BTreeMap::new();
        for r in &m.records {
            match holder.get(&r.nft()) {
                None => assert!(r.is_mint()),
                Some(h) => assert_eq!(*h, r.from),
            }
            holder.insert(r.nft(), r.to);
        }
    }

    #[test]
    fn truth_matches_stream() {
        let m = generate(&MarketSpec::default()).unwrap();
        let total: u64 = m.truth.pair_tallies.iter().map(|p| p.count).sum();
        assert_eq!(total, m.records.len() as u64);
        let nfts: u64 = m.truth.series.iter().map(|s| s.nft_count).sum();
        assert_eq!(nfts as usize, m.records.iter().filter(|r| r.is_mint()).count());
        assert_eq!(m.truth.wash_set().len(), 4);
    }

    #[test]
    fn no_rings_no_wash() {
        let spec = MarketSpec {
            wash_rings: vec![],
            ..MarketSpec::default()
        };
        assert!(generate(&spec).unwrap().truth.wash_nfts.is_empty());
    }

    #[test]
    fn invalid_specs_rejected() {
        let bad = MarketSpec {
            nfts_per_series: (5, 1),
            ..MarketSpec::default()
        };
        assert!(generate(&bad).is_err());
        let bad = MarketSpec {
            n_accounts: 3,
            ..MarketSpec::default()
        };
        assert!(generate(&bad).is_err());
    }
}
