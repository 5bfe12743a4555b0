//! Binary decoding of ERC721 / ERC1155 transfer logs.

use std::sync::LazyLock;

use alloy_primitives::{Address, B256, U256, keccak256};
use rayon::prelude::*;
use thiserror::Error;

use crate::types::{Standard, TransferRecord};

pub const ERC721_TRANSFER_SIGNATURE: &str = "Transfer(address,address,uint256)";
pub const ERC1155_SINGLE_SIGNATURE: &str = "TransferSingle(address,address,address,uint256,uint256)";
pub const ERC1155_BATCH_SIGNATURE: &str = "TransferBatch(address,address,address,uint256[],uint256[])";

static ERC721_TRANSFER_TOPIC: LazyLock<B256> =
    LazyLock::new(|| keccak256(ERC721_TRANSFER_SIGNATURE.as_bytes()));
static ERC1155_SINGLE_TOPIC: LazyLock<B256> =
    LazyLock::new(|| keccak256(ERC1155_SINGLE_SIGNATURE.as_bytes()));
static ERC1155_BATCH_TOPIC: LazyLock<B256> =
    LazyLock::new(|| keccak256(ERC1155_BATCH_SIGNATURE.as_bytes()));

/// `topics[0]` of an ERC721 `Transfer`. Shared with ERC20, told apart by topic count.
pub fn erc721_transfer_topic() -> B256 {
    *ERC721_TRANSFER_TOPIC
}

pub fn erc1155_single_topic() -> B256 {
    *ERC1155_SINGLE_TOPIC
}

pub fn erc1155_batch_topic() -> B256 {
    *ERC1155_BATCH_TOPIC
}

/// An undecoded log as returned by `eth_getLogs`, with the block timestamp attached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawLogEvent {
    pub contract_address: Address,
    pub topics: Vec<B256>,
    pub data: Vec<u8>,
    pub block_number: u64,
    pub timestamp: u64,
    pub tx_hash: B256,
    pub log_index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("address topic `{field}` has non-zero padding")]
    AddressPadding { field: &'static str },
    #[error("log data is {got} bytes, need at least {need}")]
    DataTooShort { need: usize, got: usize },
    #[error("batch ids/values length mismatch: {ids} ids, {values} values")]
    BatchLengthMismatch { ids: usize, values: usize },
    #[error("ABI {what} out of bounds (data is {len} bytes)")]
    AbiOutOfBounds { what: &'static str, len: usize },
    #[error("log has no topics")]
    NoTopics,
}

fn topic_address(topic: &B256, field: &'static str) -> Result<Address, DecodeError> {
    if topic[..12].iter().any(|b| *b != 0) {
        return Err(DecodeError::AddressPadding { field });
    }
    Ok(Address::from_slice(&topic[12..]))
}

fn record(
    ev: &RawLogEvent,
    standard: Standard,
    from: Address,
    to: Address,
    token_id: U256,
    amount: U256,
    batch_pos: u32,
) -> TransferRecord {
    TransferRecord {
        standard,
        from,
        to,
        contract: ev.contract_address,
        token_id,
        amount,
        block_number: ev.block_number,
        timestamp: ev.timestamp,
        tx_hash: ev.tx_hash,
        log_index: ev.log_index,
        batch_pos,
    }
}

/// Decodes an ERC721 `Transfer`. ERC20 logs share the signature but index only two
/// parameters (3 topics) and are not matched.
pub fn decode_erc721_transfer(ev: &RawLogEvent) -> Result<Option<TransferRecord>, DecodeError> {
    if ev.topics.len() != 4 || ev.topics[0] != erc721_transfer_topic() {
        return Ok(None);
    }
    let from = topic_address(&ev.topics[1], "from")?;
    let to = topic_address(&ev.topics[2], "to")?;
    let token_id = U256::from_be_bytes(ev.topics[3].0);
    Ok(Some(record(ev, Standard::Erc721, from, to, token_id, U256::from(1u8), 0)))
}

/// Decodes an ERC1155 `TransferSingle`: `from`/`to` from topics, `(id, value)` from data.
pub fn decode_erc1155_single(ev: &RawLogEvent) -> Result<Option<TransferRecord>, DecodeError> {
    if ev.topics.len() != 4 || ev.topics[0] != erc1155_single_topic() {
        return Ok(None);
    }
    topic_address(&ev.topics[1], "operator")?;
    let from = topic_address(&ev.topics[2], "from")?;
    let to = topic_address(&ev.topics[3], "to")?;
    if ev.data.len() < 64 {
        return Err(DecodeError::DataTooShort {
            need: 64,
            got: ev.data.len(),
        });
    }
    let id = U256::from_be_slice(&ev.data[..32]);
    let value = U256::from_be_slice(&ev.data[32..64]);
    Ok(Some(record(ev, Standard::Erc1155, from, to, id, value, 0)))
}

fn word_at(data: &[u8], offset: usize, what: &'static str) -> Result<U256, DecodeError> {
    let end = offset
        .checked_add(32)
        .filter(|end| *end <= data.len())
        .ok_or(DecodeError::AbiOutOfBounds {
            what,
            len: data.len(),
        })?;
    Ok(U256::from_be_slice(&data[offset..end]))
}

fn word_as_usize(w: U256, what: &'static str, len: usize) -> Result<usize, DecodeError> {
    usize::try_from(w).map_err(|_| DecodeError::AbiOutOfBounds { what, len })
}

/// Reads a `uint256[]` whose head word sits at `head`.
fn dynamic_array(data: &[u8], head: usize, what: &'static str) -> Result<Vec<U256>, DecodeError> {
    let len = data.len();
    let offset = word_as_usize(word_at(data, head, what)?, what, len)?;
    let count = word_as_usize(word_at(data, offset, what)?, what, len)?;
    let body = offset.checked_add(32).ok_or(DecodeError::AbiOutOfBounds { what, len })?;
    let bytes = count
        .checked_mul(32)
        .and_then(|n| body.checked_add(n))
        .filter(|end| *end <= len)
        .ok_or(DecodeError::AbiOutOfBounds { what, len })?;
    Ok(data[body..bytes].chunks_exact(32).map(U256::from_be_slice).collect())
}

/// Decodes an ERC1155 `TransferBatch` into one record per `(id, value)` pair.
/// Returns `None` when the log is not a batch transfer.
pub fn decode_erc1155_batch(ev: &RawLogEvent) -> Result<Option<Vec<TransferRecord>>, DecodeError> {
    if ev.topics.len() != 4 || ev.topics[0] != erc1155_batch_topic() {
        return Ok(None);
    }
    topic_address(&ev.topics[1], "operator")?;
    let from = topic_address(&ev.topics[2], "from")?;
    let to = topic_address(&ev.topics[3], "to")?;
    let ids = dynamic_array(&ev.data, 0, "ids offset")?;
    let values = dynamic_array(&ev.data, 32, "values offset")?;
    if ids.len() != values.len() {
        return Err(DecodeError::BatchLengthMismatch {
            ids: ids.len(),
            values: values.len(),
        });
    }
    let records = ids
        .into_iter()
        .zip(values)
        .enumerate()
        .map(|(pos, (id, value))| {
            let pos = u32::try_from(pos).unwrap_or(u32::MAX);
            record(ev, Standard::Erc1155, from, to, id, value, pos)
        })
        .collect();
    Ok(Some(records))
}

/// Outcome of running every decoder over one log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    NotNft,
    Records(Vec<TransferRecord>),
}

pub fn decode_log(ev: &RawLogEvent) -> Result<Decoded, DecodeError> {
    let Some(&sig) = ev.topics.first() else {
        return Err(DecodeError::NoTopics);
    };
    if sig == erc721_transfer_topic() {
        return Ok(decode_erc721_transfer(ev)?
            .map_or(Decoded::NotNft, |r| Decoded::Records(vec![r])));
    }
    if sig == erc1155_single_topic() {
        return Ok(decode_erc1155_single(ev)?
            .map_or(Decoded::NotNft, |r| Decoded::Records(vec![r])));
    }
    if sig == erc1155_batch_topic() {
        return Ok(decode_erc1155_batch(ev)?.map_or(Decoded::NotNft, Decoded::Records));
    }
    Ok(Decoded::NotNft)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    Strict,
    #[default]
    Lenient,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOutput {
    pub records: Vec<TransferRecord>,
    /// Logs that were not NFT transfers.
    pub dropped: usize,
    /// Logs that matched an NFT signature but failed to decode (lenient mode only).
    pub malformed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("log {index} (tx {tx_hash:#x}, log index {log_index}): {source}")]
pub struct StreamError {
    pub index: usize,
    pub tx_hash: B256,
    pub log_index: u64,
    #[source]
    pub source: DecodeError,
}

/// Decodes a `(block_number, log_index)`-ordered stream, preserving order.
///
/// Decoding fans out over the rayon pool; collection is order-preserving.
pub fn parse_log_stream(events: &[RawLogEvent], mode: ParseMode) -> Result<ParseOutput, StreamError> {
    let decoded: Vec<Result<Decoded, DecodeError>> = events.par_iter().map(decode_log).collect();
    let mut out = ParseOutput::default();
    for (index, (ev, d)) in events.iter().zip(decoded).enumerate() {
        match d {
            Ok(Decoded::NotNft) => out.dropped += 1,
            Ok(Decoded::Records(rs)) => out.records.extend(rs),
            Err(source) => match mode {
                ParseMode::Strict => {
                    return Err(StreamError {
                        index,
                        tx_hash: ev.tx_hash,
                        log_index: ev.log_index,
                        source,
                    });
                }
                ParseMode::Lenient => {
                    tracing::debug!(index, error = %source, "skipping malformed log");
                    out.malformed += 1;
                }
            },
        }
    }
    Ok(out)
}

fn pad_address(a: &Address) -> B256 {
    B256::left_padding_from(a.as_slice())
}

/// Re-encodes a record as the log that would have produced it. ERC1155 records become
/// `TransferSingle` logs with the sender as operator.
pub fn encode_transfer_log(r: &TransferRecord) -> RawLogEvent {
    let (topics, data) = match r.standard {
        Standard::Erc721 => (
            vec![
                erc721_transfer_topic(),
                pad_address(&r.from),
                pad_address(&r.to),
                B256::from(r.token_id.to_be_bytes::<32>()),
            ],
            Vec::new(),
        ),
        Standard::Erc1155 => {
            let mut data = Vec::with_capacity(64);
            data.extend_from_slice(&r.token_id.to_be_bytes::<32>());
            data.extend_from_slice(&r.amount.to_be_bytes::<32>());
            (
                vec![
                    erc1155_single_topic(),
                    pad_address(&r.from),
                    pad_address(&r.from),
                    pad_address(&r.to),
                ],
                data,
            )
        }
    };
    RawLogEvent {
        contract_address: r.contract,
        topics,
        data,
        block_number: r.block_number,
        timestamp: r.timestamp,
        tx_hash: r.tx_hash,
        log_index: r.log_index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn addr(b: u8) -> Address {
        Address::repeat_byte(b)
    }

    fn word(v: u64) -> [u8; 32] {
        U256::from(v).to_be_bytes::<32>()
    }

    fn log(topics: Vec<B256>, data: Vec<u8>) -> RawLogEvent {
        RawLogEvent {
            contract_address: addr(0xcc),
            topics,
            data,
            block_number: 10,
            timestamp: 1_000,
            tx_hash: B256::repeat_byte(0x77),
            log_index: 3,
        }
    }

    fn batch_data(ids: &[u64], values: &[u64]) -> Vec<u8> {
        // head: two offsets, then ids array, then values array
        let ids_off = 64u64;
        let vals_off = ids_off + 32 + 32 * ids.len() as u64;
        let mut d = Vec::new();
        d.extend(word(ids_off));
        d.extend(word(vals_off));
        d.extend(word(ids.len() as u64));
        ids.iter().for_each(|v| d.extend(word(*v)));
        d.extend(word(values.len() as u64));
        values.iter().for_each(|v| d.extend(word(*v)));
        d
    }

    fn batch_log(ids: &[u64], values: &[u64]) -> RawLogEvent {
        log(
            vec![
                erc1155_batch_topic(),
                pad_address(&addr(0x01)),
                pad_address(&addr(0xaa)),
                pad_address(&addr(0xbb)),
            ],
            batch_data(ids, values),
        )
    }

    #[test]
    fn erc721_transfer_decodes_indexed_fields() {
        let ev = log(
            vec![
                erc721_transfer_topic(),
                pad_address(&addr(0xaa)),
                pad_address(&addr(0xbb)),
                B256::from(word(0x2a)),
            ],
            vec![],
        );
        let r = decode_erc721_transfer(&ev).unwrap().unwrap();
        assert_eq!(r.from, addr(0xaa));
        assert_eq!(r.to, addr(0xbb));
        assert_eq!(r.token_id, U256::from(42u8));
        assert_eq!(r.amount, U256::from(1u8));
        assert_eq!(r.standard, Standard::Erc721);
    }

    #[test]
    fn erc20_shaped_transfer_is_not_an_nft() {
        let ev = log(
            vec![
                erc721_transfer_topic(),
                pad_address(&addr(0xaa)),
                pad_address(&addr(0xbb)),
            ],
            word(1000).to_vec(),
        );
        assert_eq!(decode_erc721_transfer(&ev).unwrap(), None);
        assert_eq!(decode_log(&ev).unwrap(), Decoded::NotNft);
    }

    #[test]
    fn other_signature_is_absent() {
        let ev = log(vec![B256::repeat_byte(9); 4], vec![]);
        assert_eq!(decode_erc721_transfer(&ev).unwrap(), None);
        assert_eq!(decode_erc1155_single(&ev).unwrap(), None);
        assert_eq!(decode_erc1155_batch(&ev).unwrap(), None);
    }

    #[test]
    fn dirty_address_padding_names_the_field() {
        let mut to = pad_address(&addr(0xbb));
        to.0[0] = 1;
        let ev = log(
            vec![erc721_transfer_topic(), pad_address(&addr(0xaa)), to, B256::ZERO],
            vec![],
        );
        assert_eq!(
            decode_erc721_transfer(&ev),
            Err(DecodeError::AddressPadding { field: "to" })
        );
    }

    #[test]
    fn erc1155_single_reads_id_and_value_words() {
        let mut data = word(7).to_vec();
        data.extend(word(3));
        let ev = log(
            vec![
                erc1155_single_topic(),
                pad_address(&addr(0x01)),
                pad_address(&addr(0xaa)),
                pad_address(&addr(0xbb)),
            ],
            data.clone(),
        );
        let r = decode_erc1155_single(&ev).unwrap().unwrap();
        assert_eq!((r.token_id, r.amount), (U256::from(7u8), U256::from(3u8)));
        assert_eq!((r.from, r.to, r.batch_pos), (addr(0xaa), addr(0xbb), 0));

        let short = log(ev.topics.clone(), data[..63].to_vec());
        assert_eq!(
            decode_erc1155_single(&short),
            Err(DecodeError::DataTooShort { need: 64, got: 63 })
        );
    }

    #[test]
    fn batch_expands_pairs_in_order() {
        let rs = decode_erc1155_batch(&batch_log(&[1, 2], &[5, 6])).unwrap().unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(
            rs.iter()
                .map(|r| (r.token_id, r.amount, r.batch_pos))
                .collect::<Vec<_>>(),
            vec![
                (U256::from(1u8), U256::from(5u8), 0),
                (U256::from(2u8), U256::from(6u8), 1)
            ]
        );
        assert!(decode_erc1155_batch(&batch_log(&[], &[])).unwrap().unwrap().is_empty());
    }

    #[test]
    fn batch_errors() {
        assert_eq!(
            decode_erc1155_batch(&batch_log(&[1], &[5, 6])),
            Err(DecodeError::BatchLengthMismatch { ids: 1, values: 2 })
        );
        let mut ev = batch_log(&[1], &[5]);
        ev.data[..32].copy_from_slice(&word(10_000));
        assert!(matches!(
            decode_erc1155_batch(&ev),
            Err(DecodeError::AbiOutOfBounds { .. })
        ));
        let mut ev = batch_log(&[1], &[5]);
        // claim a huge ids length
        ev.data[64..96].copy_from_slice(&[0xff; 32]);
        assert!(matches!(
            decode_erc1155_batch(&ev),
            Err(DecodeError::AbiOutOfBounds { .. })
        ));
        let ev = log(batch_log(&[], &[]).topics, vec![0; 20]);
        assert!(decode_erc1155_batch(&ev).is_err());
    }

    #[test]
    fn stream_mixes_decoders_and_counts_drops() {
        let erc20 = log(
            vec![erc721_transfer_topic(), pad_address(&addr(1)), pad_address(&addr(2))],
            word(5).to_vec(),
        );
        let nft = log(
            vec![
                erc721_transfer_topic(),
                pad_address(&addr(1)),
                pad_address(&addr(2)),
                B256::from(word(9)),
            ],
            vec![],
        );
        let batch = batch_log(&[1, 2], &[1, 1]);
        let out = parse_log_stream(&[erc20, nft, batch.clone()], ParseMode::Lenient).unwrap();
        assert_eq!(out.records.len(), 3);
        assert_eq!(out.dropped, 1);
        assert_eq!(out.malformed, 0);

        let bad = batch_log(&[1], &[1, 2]);
        let out = parse_log_stream(&[bad.clone(), batch.clone()], ParseMode::Lenient).unwrap();
        assert_eq!((out.records.len(), out.malformed), (2, 1));
        let err = parse_log_stream(&[batch, bad], ParseMode::Strict).unwrap_err();
        assert_eq!(err.index, 1);

        assert_eq!(parse_log_stream(&[], ParseMode::Strict).unwrap(), ParseOutput::default());
    }

    #[test]
    fn encode_inverts_decode() {
        let r = TransferRecord {
            standard: Standard::Erc1155,
            from: addr(1),
            to: addr(2),
            contract: addr(3),
            token_id: U256::from(99u8),
            amount: U256::from(4u8),
            block_number: 5,
            timestamp: 6,
            tx_hash: B256::repeat_byte(7),
            log_index: 8,
            batch_pos: 0,
        };
        assert_eq!(decode_log(&encode_transfer_log(&r)).unwrap(), Decoded::Records(vec![r.clone()]));
        let r721 = TransferRecord {
            standard: Standard::Erc721,
            amount: U256::from(1u8),
            ..r
        };
        assert_eq!(decode_log(&encode_transfer_log(&r721)).unwrap(), Decoded::Records(vec![r721]));
    }
}
