//! Per-quarter participation counts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use alloy_primitives::Address;

use super::build::build_ncg;
use crate::types::{NftKey, Quarter, Standard, TransferRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Distinct accounts that minted in the quarter.
    Creators,
    /// NFTs minted in the quarter.
    CreatedNfts,
    /// Distinct non-zero accounts sending or receiving in the quarter.
    Transferors,
    /// Records in the quarter.
    Transfers,
    /// Distinct accounts holding at least one NFT at quarter end.
    Holders,
}

impl Role {
    pub const ALL: [Role; 5] = [
        Role::Creators,
        Role::CreatedNfts,
        Role::Transferors,
        Role::Transfers,
        Role::Holders,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Creators => "creators",
            Role::CreatedNfts => "created_nfts",
            Role::Transferors => "transferors",
            Role::Transfers => "transfers",
            Role::Holders => "holders",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown role `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuarterCount {
    pub quarter: Quarter,
    pub standard: Standard,
    pub count: u64,
}

fn flatten(buckets: BTreeMap<(Quarter, Standard), u64>) -> Vec<QuarterCount> {
    buckets
        .into_iter()
        .filter(|(_, c)| *c > 0)
        .map(|((quarter, standard), count)| QuarterCount {
            quarter,
            standard,
            count,
        })
        .collect()
}

fn distinct_per_bucket(
    items: impl Iterator<Item = ((Quarter, Standard), Address)>,
) -> BTreeMap<(Quarter, Standard), u64> {
    let mut sets: HashMap<(Quarter, Standard), HashSet<Address>> = HashMap::new();
    for (k, a) in items {
        sets.entry(k).or_default().insert(a);
    }
    sets.into_iter().map(|(k, s)| (k, s.len() as u64)).collect()
}

/// Counts for one role per `(UTC quarter, standard)`, ordered, zero rows omitted.
pub fn quarterly_counts(records: &[TransferRecord], role: Role) -> Vec<QuarterCount> {
    let bucket = |ts: u64, s: Standard| (Quarter::from_unix(ts), s);
    match role {
        Role::Creators | Role::CreatedNfts => {
            let ncg = build_ncg(records);
            let real = ncg.iter().filter(|(_, c)| !c.synthetic);
            if role == Role::Creators {
                flatten(distinct_per_bucket(
                    real.map(|(_, c)| (bucket(c.timestamp, c.standard), c.creator)),
                ))
            } else {
                let mut b = BTreeMap::new();
                for (_, c) in real {
                    *b.entry(bucket(c.timestamp, c.standard)).or_default() += 1;
                }
                flatten(b)
            }
        }
        Role::Transferors => flatten(distinct_per_bucket(records.iter().flat_map(|r| {
            let k = bucket(r.timestamp, r.standard);
            [(k, r.from), (k, r.to)]
                .into_iter()
                .filter(|(_, a)| *a != Address::ZERO)
        }))),
        Role::Transfers => {
            let mut b = BTreeMap::new();
            for r in records {
                *b.entry(bucket(r.timestamp, r.standard)).or_default() += 1;
            }
            flatten(b)
        }
        Role::Holders => holders_at_quarter_end(records),
    }
}

fn holders_at_quarter_end(records: &[TransferRecord]) -> Vec<QuarterCount> {
    if records.is_empty() {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by_key(|&i| records[i].chain_order());
    let first = Quarter::from_unix(records[order[0]].timestamp);
    let last = Quarter::from_unix(records[*order.last().expect("non-empty")].timestamp);

    let mut holder_of: HashMap<NftKey, (Address, Standard)> = HashMap::new();
    let mut held: HashMap<(Address, Standard), u64> = HashMap::new();
    let mut distinct: HashMap<Standard, u64> = HashMap::new();
    let mut out = Vec::new();
    let mut cursor = order.into_iter().peekable();
    for q in first.range_inclusive(last) {
        while let Some(&i) = cursor.peek() {
            let r = &records[i];
            if Quarter::from_unix(r.timestamp) != q {
                break;
            }
            cursor.next();
            let std_ = r.standard;
            if let Some(prev) = holder_of.insert(r.nft(), (r.to, std_)) {
                let c = held.get_mut(&prev).expect("previous holder is tracked");
                *c -= 1;
                if *c == 0 {
                    held.remove(&prev);
                    *distinct.entry(prev.1).or_default() -= 1;
                }
            }
            let c = held.entry((r.to, std_)).or_default();
            *c += 1;
            if *c == 1 {
                *distinct.entry(std_).or_default() += 1;
            }
        }
        for s in Standard::ALL {
            let count = distinct.get(&s).copied().unwrap_or(0);
            if count > 0 {
                out.push(QuarterCount {
                    quarter: q,
                    standard: s,
                    count,
                });
            }
        }
    }
    out
}
