use std::collections::HashMap;

use alloy_primitives::{B256, U256};

use crate::types::{NftKey, TransferRecord};

/// Transaction values joined onto transfers.
///
/// A transaction moving `k` NFT records with value `v` credits `v / k` (floor) to each
/// record and the remainder to its first record, so credited values always sum back to `v`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PriceModel {
    /// Credited value per record, aligned with the input records.
    pub transfer_values: Vec<U256>,
    /// Credited value of the latest value-bearing transfer; absent when unpriced.
    pub nft_price: HashMap<NftKey, U256>,
    /// Sum of credited values over the NFT's transfers.
    pub nft_volume: HashMap<NftKey, U256>,
}

impl PriceModel {
    pub fn price(&self, nft: &NftKey) -> U256 {
        self.nft_price.get(nft).copied().unwrap_or(U256::ZERO)
    }

    pub fn volume(&self, nft: &NftKey) -> U256 {
        self.nft_volume.get(nft).copied().unwrap_or(U256::ZERO)
    }

    pub fn is_priced(&self, nft: &NftKey) -> bool {
        self.nft_price.contains_key(nft)
    }
}

/// Records must be in chain order; "latest" refers to input order.
pub fn attach_values(records: &[TransferRecord], tx_values: &HashMap<B256, U256>) -> PriceModel {
    // tx -> (record count, index of first record)
    let mut per_tx: HashMap<B256, (u64, usize)> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        per_tx.entry(r.tx_hash).or_insert((0, i)).0 += 1;
    }
    let mut model = PriceModel {
        transfer_values: Vec::with_capacity(records.len()),
        ..PriceModel::default()
    };
    for (i, r) in records.iter().enumerate() {
        let v = tx_values.get(&r.tx_hash).copied().unwrap_or(U256::ZERO);
        let (k, first) = per_tx[&r.tx_hash];
        let credited = if v.is_zero() {
            U256::ZERO
        } else {
            let k = U256::from(k);
            let share = v / k;
            if i == first { share + v % k } else { share }
        };
        let nft = r.nft();
        let vol = model.nft_volume.entry(nft).or_default();
        *vol += credited;
        if !credited.is_zero() {
            model.nft_price.insert(nft, credited);
        }
        model.transfer_values.push(credited);
    }
    model
}
