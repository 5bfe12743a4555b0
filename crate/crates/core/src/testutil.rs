//! Small constructors shared by the unit tests.

use alloy_primitives::{Address, B256, U256, keccak256};

use crate::types::{NftKey, Standard, TransferRecord};

pub fn addr(b: u8) -> Address {
    Address::repeat_byte(b)
}

pub fn nft(contract: u8, token: u64) -> NftKey {
    NftKey::new(addr(contract), U256::from(token))
}

/// ERC721 record at block `ts` with a tx hash unique to `(ts, nft)`.
pub fn rec(from: Address, to: Address, nft: NftKey, ts: u64) -> TransferRecord {
    let mut seed = Vec::with_capacity(60);
    seed.extend_from_slice(&ts.to_be_bytes());
    seed.extend_from_slice(nft.contract.as_slice());
    seed.extend_from_slice(&nft.token_id.to_be_bytes::<32>());
    let tx_hash: B256 = keccak256(&seed);
    TransferRecord {
        standard: Standard::Erc721,
        from,
        to,
        contract: nft.contract,
        token_id: nft.token_id,
        amount: U256::from(1u8),
        block_number: ts,
        timestamp: ts,
        tx_hash,
        log_index: 0,
        batch_pos: 0,
    }
}
