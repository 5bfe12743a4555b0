//! Log decoding against hand-laid-out ABI fixtures and independently hashed signatures.

use nftgraph::ingest::decode::{
    ERC721_TRANSFER_SIGNATURE, ERC1155_BATCH_SIGNATURE, ERC1155_SINGLE_SIGNATURE, erc721_transfer_topic,
    erc1155_batch_topic, erc1155_single_topic,
};
use nftgraph::ingest::{
    DecodeError, Decoded, ParseMode, RawLogEvent, decode_erc721_transfer, decode_erc1155_batch,
    decode_erc1155_single, decode_log, encode_transfer_log, parse_log_stream,
};
use nftgraph::{Address, B256, Standard, TransferRecord, U256};
use proptest::prelude::*;
use tiny_keccak::{Hasher, Keccak};

fn keccak(s: &str) -> [u8; 32] {
    let mut k = Keccak::v256();
    k.update(s.as_bytes());
    let mut out = [0u8; 32];
    k.finalize(&mut out);
    out
}

fn hex32(s: &str) -> [u8; 32] {
    let mut out = [0u8; 32];
    for (i, b) in out.iter_mut().enumerate() {
        *b = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).unwrap();
    }
    out
}

/// Manually left-pads a 20-byte address into a topic word.
fn pad(a: u8) -> B256 {
    let mut w = [0u8; 32];
    w[12..].fill(a);
    B256::from(w)
}

fn word(v: u64) -> [u8; 32] {
    let mut w = [0u8; 32];
    w[24..].copy_from_slice(&v.to_be_bytes());
    w
}

fn ev(topics: Vec<B256>, data: Vec<u8>) -> RawLogEvent {
    RawLogEvent {
        contract_address: Address::repeat_byte(0xc0),
        topics,
        data,
        block_number: 77,
        timestamp: 1_700_000_000,
        tx_hash: B256::repeat_byte(0x11),
        log_index: 5,
    }
}

/// `TransferBatch` data: heads at 0x00/0x20, then `ids` and `values` tails.
fn batch_data(ids: &[u64], values: &[u64]) -> Vec<u8> {
    let mut d = Vec::new();
    d.extend(word(64));
    d.extend(word(64 + 32 + 32 * ids.len() as u64));
    d.extend(word(ids.len() as u64));
    ids.iter().for_each(|i| d.extend(word(*i)));
    d.extend(word(values.len() as u64));
    values.iter().for_each(|v| d.extend(word(*v)));
    d
}

#[test]
fn signature_topics_match_independent_keccak_and_published_constants() {
    assert_eq!(keccak(""), hex32("c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"));
    let cases = [
        (ERC721_TRANSFER_SIGNATURE, erc721_transfer_topic(), "ddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef"),
        (ERC1155_SINGLE_SIGNATURE, erc1155_single_topic(), "c3d58168c5ae7397731d063d5bbf3d657854427343f4c083240f7aacaa2d0f62"),
        (ERC1155_BATCH_SIGNATURE, erc1155_batch_topic(), "4a39dc06d4c0dbc64b70af90fd698a233a518aa5d07e595d983b8c0526c8f7fb"),
    ];
    for (sig, topic, known) in cases {
        assert_eq!(topic.0, keccak(sig), "{sig}");
        assert_eq!(topic.0, hex32(known), "{sig}");
    }
}

#[test]
fn erc721_transfer_fixture() {
    let e = ev(vec![erc721_transfer_topic(), pad(0xaa), pad(0xbb), B256::from(word(0x2a))], vec![]);
    let r = decode_erc721_transfer(&e).unwrap().unwrap();
    assert_eq!((r.from, r.to, r.token_id, r.amount), (Address::repeat_byte(0xaa), Address::repeat_byte(0xbb), U256::from(42u8), U256::from(1u8)));
    assert_eq!((r.standard, r.block_number, r.log_index, r.batch_pos), (Standard::Erc721, 77, 5, 0));
}

#[test]
fn erc20_shape_and_foreign_signatures_are_not_nft_logs() {
    let erc20 = ev(vec![erc721_transfer_topic(), pad(0xaa), pad(0xbb)], word(1000).to_vec());
    assert_eq!(decode_erc721_transfer(&erc20).unwrap(), None);
    assert_eq!(decode_log(&erc20).unwrap(), Decoded::NotNft);
    let other = ev(vec![B256::repeat_byte(9), pad(1), pad(2), B256::ZERO], vec![]);
    assert_eq!(decode_log(&other).unwrap(), Decoded::NotNft);
    assert_eq!(decode_erc1155_single(&other).unwrap(), None);
}

#[test]
fn erc1155_single_fixture() {
    let mut data = word(7).to_vec();
    data.extend(word(3));
    let e = ev(vec![erc1155_single_topic(), pad(0x0e), pad(0xaa), pad(0xbb)], data.clone());
    let r = decode_erc1155_single(&e).unwrap().unwrap();
    assert_eq!((r.token_id, r.amount, r.from, r.to), (U256::from(7u8), U256::from(3u8), Address::repeat_byte(0xaa), Address::repeat_byte(0xbb)));
    data.pop();
    let short = ev(e.topics.clone(), data);
    assert_eq!(decode_erc1155_single(&short), Err(DecodeError::DataTooShort { need: 64, got: 63 }));
}

#[test]
fn erc1155_batch_fixtures() {
    let topics = vec![erc1155_batch_topic(), pad(0x0e), pad(0xaa), pad(0xbb)];
    let rs = decode_erc1155_batch(&ev(topics.clone(), batch_data(&[1, 2], &[5, 6]))).unwrap().unwrap();
    let got: Vec<_> = rs.iter().map(|r| (r.token_id, r.amount, r.batch_pos)).collect();
    assert_eq!(got, [(U256::from(1u8), U256::from(5u8), 0), (U256::from(2u8), U256::from(6u8), 1)]);
    assert_eq!(decode_erc1155_batch(&ev(topics.clone(), batch_data(&[], &[]))).unwrap(), Some(vec![]));
    assert_eq!(
        decode_erc1155_batch(&ev(topics.clone(), batch_data(&[1], &[5, 6]))),
        Err(DecodeError::BatchLengthMismatch { ids: 1, values: 2 })
    );
    let mut truncated = batch_data(&[1, 2], &[5, 6]);
    truncated.truncate(truncated.len() - 1);
    assert!(matches!(decode_erc1155_batch(&ev(topics, truncated)), Err(DecodeError::AbiOutOfBounds { .. })));
}

#[test]
fn mixed_stream_and_lenient_skip() {
    let erc20 = ev(vec![erc721_transfer_topic(), pad(0xaa), pad(0xbb)], word(1000).to_vec());
    let nft = ev(vec![erc721_transfer_topic(), pad(0xaa), pad(0xbb), B256::from(word(1))], vec![]);
    let topics = vec![erc1155_batch_topic(), pad(0x0e), pad(0xaa), pad(0xbb)];
    let batch = ev(topics.clone(), batch_data(&[1, 2], &[5, 6]));
    let out = parse_log_stream(&[erc20.clone(), nft.clone(), batch], ParseMode::Strict).unwrap();
    assert_eq!((out.records.len(), out.dropped), (3, 1));

    let bad = ev(topics, batch_data(&[1], &[5, 6]));
    let out = parse_log_stream(&[nft.clone(), bad.clone(), nft], ParseMode::Lenient).unwrap();
    assert_eq!((out.records.len(), out.malformed), (2, 1));
    let err = parse_log_stream(&[bad], ParseMode::Strict).unwrap_err();
    assert_eq!(err.index, 0);
    assert!(parse_log_stream(&[], ParseMode::Strict).unwrap().records.is_empty());
}

fn arb_record() -> impl Strategy<Value = TransferRecord> {
    (
        any::<bool>(),
        any::<[u8; 20]>(),
        any::<[u8; 20]>(),
        any::<[u8; 32]>(),
        any::<u64>(),
        0u64..1_000_000,
        0u64..1000,
    )
        .prop_map(|(erc1155, from, to, id, amount, block, log_index)| TransferRecord {
            standard: if erc1155 { Standard::Erc1155 } else { Standard::Erc721 },
            from: Address::from(from),
            to: Address::from(to),
            contract: Address::repeat_byte(0xc0),
            token_id: U256::from_be_bytes(id),
            amount: if erc1155 { U256::from(amount) } else { U256::from(1u8) },
            block_number: block,
            timestamp: block * 12,
            tx_hash: B256::repeat_byte(3),
            log_index,
            batch_pos: 0,
        })
}

proptest! {
    #[test]
    fn encoded_records_decode_back(r in arb_record()) {
        let e = encode_transfer_log(&r);
        prop_assert_eq!(decode_log(&e).unwrap(), Decoded::Records(vec![r]));
    }

    #[test]
    fn only_four_topic_transfers_are_nfts(r in arb_record(), n in 1usize..6) {
        let mut e = encode_transfer_log(&TransferRecord { standard: Standard::Erc721, amount: U256::from(1u8), ..r });
        e.topics.truncate(n.min(4));
        while e.topics.len() < n {
            e.topics.push(B256::ZERO);
        }
        let d = decode_log(&e).unwrap();
        prop_assert_eq!(matches!(d, Decoded::Records(_)), n == 4);
    }

    #[test]
    fn batch_preserves_count_and_total_amount(
        pairs in proptest::collection::vec((any::<u64>(), 0u64..1u64 << 40), 0..40),
    ) {
        let (ids, values): (Vec<u64>, Vec<u64>) = pairs.iter().copied().unzip();
        let e = ev(vec![erc1155_batch_topic(), pad(1), pad(2), pad(3)], batch_data(&ids, &values));
        let rs = decode_erc1155_batch(&e).unwrap().unwrap();
        prop_assert_eq!(rs.len(), ids.len());
        let total: U256 = rs.iter().map(|r| r.amount).sum();
        prop_assert_eq!(total, U256::from(values.iter().map(|v| *v as u128).sum::<u128>()));
        prop_assert!(rs.iter().enumerate().all(|(i, r)| r.batch_pos as usize == i));
    }

    #[test]
    fn stream_parse_is_deterministic_and_order_preserving(
        rs in proptest::collection::vec(arb_record(), 0..60),
    ) {
        let mut rs = rs;
        rs.sort_by_key(|r| (r.block_number, r.log_index));
        let logs: Vec<_> = rs.iter().map(encode_transfer_log).collect();
        let a = parse_log_stream(&logs, ParseMode::Strict).unwrap();
        let b = parse_log_stream(&logs, ParseMode::Strict).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.records, rs);
    }
}
