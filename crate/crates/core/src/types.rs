//! Identity and record types shared by every stage of the pipeline.

use std::fmt;
use std::str::FromStr;

use alloy_primitives::{Address, B256, U256};
use chrono::{DateTime, Datelike};
use serde::{Deserialize, Serialize};

/// An account (externally owned or contract). The zero address is a valid node.
pub type AccountId = Address;

/// Token standard that produced a transfer record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Standard {
    #[serde(rename = "ERC721")]
    Erc721,
    #[serde(rename = "ERC1155")]
    Erc1155,
}

impl Standard {
    pub const ALL: [Standard; 2] = [Standard::Erc721, Standard::Erc1155];

    pub fn as_str(self) -> &'static str {
        match self {
            Standard::Erc721 => "ERC721",
            Standard::Erc1155 => "ERC1155",
        }
    }
}

impl fmt::Display for Standard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Standard {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ERC721" => Ok(Standard::Erc721),
            "ERC1155" => Ok(Standard::Erc1155),
            other => Err(format!("unknown token standard `{other}`")),
        }
    }
}

/// A series is the set of NFTs issued by one contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeriesKey(pub Address);

impl fmt::Display for SeriesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", lower_hex_addr(&self.0))
    }
}

/// Identity of a single NFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NftKey {
    pub contract: Address,
    pub token_id: U256,
}

impl NftKey {
    pub fn new(contract: Address, token_id: U256) -> Self {
        Self { contract, token_id }
    }

    pub fn series(&self) -> SeriesKey {
        SeriesKey(self.contract)
    }
}

impl fmt::Display for NftKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", lower_hex_addr(&self.contract), self.token_id)
    }
}

/// One decoded NFT movement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransferRecord {
    pub standard: Standard,
    pub from: Address,
    pub to: Address,
    pub contract: Address,
    pub token_id: U256,
    /// Always 1 for ERC721.
    pub amount: U256,
    pub block_number: u64,
    pub timestamp: u64,
    pub tx_hash: B256,
    pub log_index: u64,
    /// Position inside a `TransferBatch`, 0 otherwise.
    pub batch_pos: u32,
}

impl TransferRecord {
    pub fn nft(&self) -> NftKey {
        NftKey::new(self.contract, self.token_id)
    }

    pub fn is_mint(&self) -> bool {
        self.from == Address::ZERO
    }

    pub fn is_burn(&self) -> bool {
        self.to == Address::ZERO
    }

    /// Total order of records within a chain: timestamp first, then position in the block.
    pub fn chain_order(&self) -> (u64, u64, u64, u32) {
        (self.timestamp, self.block_number, self.log_index, self.batch_pos)
    }
}

/// Native currency attached to a transaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TxValueRecord {
    pub tx_hash: B256,
    pub value_wei: U256,
}

/// Marketplace category of a contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Art,
    Collectibles,
    Ens,
    Music,
    Sports,
    Gaming,
    Decentraland,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Art,
        Category::Collectibles,
        Category::Ens,
        Category::Music,
        Category::Sports,
        Category::Gaming,
        Category::Decentraland,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Art => "art",
            Category::Collectibles => "collectibles",
            Category::Ens => "ens",
            Category::Music => "music",
            Category::Sports => "sports",
            Category::Gaming => "gaming",
            Category::Decentraland => "decentraland",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded = s.trim().to_ascii_lowercase();
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == folded)
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CategoryLabel {
    pub contract: Address,
    pub category: Category,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptiveText {
    pub contract: String,
    pub name: String,
    pub description: String,
}

/// A UTC calendar quarter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quarter {
    pub year: i32,
    /// 1..=4
    pub quarter: u8,
}

impl Quarter {
    pub fn from_unix(ts: u64) -> Quarter {
        let secs = i64::try_from(ts).unwrap_or(i64::MAX);
        let dt = DateTime::from_timestamp(secs, 0).unwrap_or(DateTime::<chrono::Utc>::MAX_UTC);
        Quarter {
            year: dt.year(),
            quarter: (dt.month0() / 3 + 1) as u8,
        }
    }

    pub fn next(self) -> Quarter {
        if self.quarter == 4 {
            Quarter {
                year: self.year + 1,
                quarter: 1,
            }
        } else {
            Quarter {
                year: self.year,
                quarter: self.quarter + 1,
            }
        }
    }

    /// Every quarter from `self` to `last`, both inclusive.
    pub fn range_inclusive(self, last: Quarter) -> impl Iterator<Item = Quarter> {
        std::iter::successors(Some(self), move |q| {
            let n = q.next();
            (n <= last).then_some(n)
        })
        .take_while(move |q| *q <= last)
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for Quarter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (y, q) = s
            .split_once('Q')
            .ok_or_else(|| format!("bad quarter `{s}`"))?;
        let year = y.parse().map_err(|_| format!("bad quarter year `{s}`"))?;
        let quarter: u8 = q.parse().map_err(|_| format!("bad quarter `{s}`"))?;
        if !(1..=4).contains(&quarter) {
            return Err(format!("bad quarter `{s}`"));
        }
        Ok(Quarter { year, quarter })
    }
}

/// `0x`-prefixed lower-case hex of an address.
pub fn lower_hex_addr(a: &Address) -> String {
    format!("{a:#x}")
}

pub fn lower_hex_b256(h: &B256) -> String {
    format!("{h:#x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarters_follow_utc_calendar() {
        // 2022-03-31T23:59:59Z and 2022-04-01T00:00:00Z
        assert_eq!(Quarter::from_unix(1_648_771_199).to_string(), "2022Q1");
        assert_eq!(Quarter::from_unix(1_648_771_200).to_string(), "2022Q2");
        assert_eq!(Quarter::from_unix(0).to_string(), "1970Q1");
        let q4 = Quarter {
            year: 2017,
            quarter: 4,
        };
        assert_eq!(q4.next().to_string(), "2018Q1");
        let span: Vec<_> = q4
            .range_inclusive("2018Q3".parse().unwrap())
            .map(|q| q.to_string())
            .collect();
        assert_eq!(span, ["2017Q4", "2018Q1", "2018Q2", "2018Q3"]);
    }

    #[test]
    fn lower_hex_formatting() {
        let a = Address::repeat_byte(0xAB);
        assert_eq!(lower_hex_addr(&a), format!("0x{}", "ab".repeat(20)));
    }

    #[test]
    fn category_parse_is_case_insensitive() {
        assert_eq!("ENS".parse::<Category>().unwrap(), Category::Ens);
        assert!("poetry".parse::<Category>().is_err());
    }
}
