//! Brute-force indicator tables, recomputed by direct enumeration over the records.
//!
//! Deliberately shares no code with the library's indicator module: values are
//! credited per transaction, grouped by NFT, and reduced with plain ordered maps.

use std::collections::{BTreeMap, BTreeSet};

use alloy_primitives::{Address, B256, U256};
use nftgraph::{TransferRecord, TxValueRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSeries {
    pub series: Address,
    pub nft_count: u64,
    pub transfer_count: u64,
    pub turnover: f64,
    pub floor_wei: Option<U256>,
    pub highest_wei: Option<U256>,
    pub hfratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleNft {
    pub contract: Address,
    pub token_id: U256,
    pub n: u64,
    pub p_value: f64,
    pub fratio: Option<f64>,
    pub volume_wei: U256,
    pub transferors: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleTables {
    pub series: Vec<OracleSeries>,
    pub nfts: Vec<OracleNft>,
}

/// Decimal rendering parsed back as `f64`, which rounds to nearest.
fn wei_f64(v: U256) -> f64 {
    v.to_string().parse().expect("decimal digits")
}

fn div(a: U256, b: U256) -> f64 {
    wei_f64(a) / wei_f64(b)
}

/// Records must be in chain order. Later duplicates in `tx_values` override earlier ones.
pub fn oracle_indicators(records: &[TransferRecord], tx_values: &[TxValueRecord]) -> OracleTables {
    let mut value_of: BTreeMap<B256, U256> = BTreeMap::new();
    for t in tx_values {
        value_of.insert(t.tx_hash, t.value_wei);
    }
    let mut by_tx: BTreeMap<B256, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_tx.entry(r.tx_hash).or_default().push(i);
    }
    let mut credited = vec![U256::ZERO; records.len()];
    for (tx, members) in &by_tx {
        let v = value_of.get(tx).copied().unwrap_or_default();
        let k = U256::from(members.len());
        for (pos, &i) in members.iter().enumerate() {
            credited[i] = v / k;
            if pos == 0 {
                credited[i] += v % k;
            }
        }
    }

    let mut by_nft: BTreeMap<(Address, U256), Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_nft.entry((r.contract, r.token_id)).or_default().push(i);
    }

    // price of each priced NFT: credited value of its last value-bearing record
    let mut price: BTreeMap<(Address, U256), U256> = BTreeMap::new();
    for (key, idx) in &by_nft {
        if let Some(&i) = idx.iter().rev().find(|&&i| credited[i] > U256::ZERO) {
            price.insert(*key, credited[i]);
        }
    }

    let contracts: BTreeSet<Address> = records.iter().map(|r| r.contract).collect();
    let mut out = OracleTables::default();
    let mut floors: BTreeMap<Address, U256> = BTreeMap::new();
    for c in contracts {
        let tokens: BTreeSet<U256> = records.iter().filter(|r| r.contract == c).map(|r| r.token_id).collect();
        let transfers = records
            .iter()
            .filter(|r| r.contract == c && r.from != Address::ZERO)
            .count() as u64;
        let prices: Vec<U256> = price.iter().filter(|(k, _)| k.0 == c).map(|(_, p)| *p).collect();
        let floor = prices.iter().min().copied();
        let highest = prices.iter().max().copied();
        if let Some(f) = floor {
            floors.insert(c, f);
        }
        out.series.push(OracleSeries {
            series: c,
            nft_count: tokens.len() as u64,
            transfer_count: transfers,
            turnover: transfers as f64 / tokens.len() as f64,
            floor_wei: floor,
            highest_wei: highest,
            hfratio: match (floor, highest) {
                (Some(f), Some(h)) if f > U256::ZERO => Some(div(h, f)),
                _ => None,
            },
        });
    }

    for ((contract, token_id), idx) in &by_nft {
        let times: Vec<u64> = idx.iter().map(|&i| records[i].timestamp).collect();
        let span = times.iter().max().unwrap() - times.iter().min().unwrap();
        let mut people: BTreeSet<Address> = BTreeSet::new();
        for &i in idx {
            people.insert(records[i].from);
            people.insert(records[i].to);
        }
        people.remove(&Address::ZERO);
        let volume = idx.iter().fold(U256::ZERO, |acc, &i| acc + credited[i]);
        let fratio = match (price.get(&(*contract, *token_id)), floors.get(contract)) {
            (Some(p), Some(f)) if *f > U256::ZERO => Some(div(*p, *f)),
            _ => None,
        };
        out.nfts.push(OracleNft {
            contract: *contract,
            token_id: *token_id,
            n: idx.len() as u64,
            p_value: span as f64 / idx.len() as f64,
            fratio,
            volume_wei: volume,
            transferors: people.len() as u64,
        });
    }
    out
}
