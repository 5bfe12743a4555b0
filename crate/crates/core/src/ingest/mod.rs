//! Turning raw Ethereum logs and side files into [`TransferRecord`](crate::TransferRecord)s.

pub mod decode;
pub mod files;
pub mod hexfmt;
pub mod rpc;
pub mod text;

pub use decode::{
    DecodeError, Decoded, ParseMode, ParseOutput, RawLogEvent, StreamError, decode_erc721_transfer,
    decode_erc1155_batch, decode_erc1155_single, decode_log, encode_transfer_log, parse_log_stream,
};
pub use files::{
    FormatError, Loaded, load_category_labels, load_descriptive_texts, load_raw_logs, load_transfers_csv,
    load_tx_values, load_wash_labels, save_raw_logs, save_transfers_csv, save_tx_values,
};
pub use rpc::{RpcConfig, RpcError, RpcFetcher, fetch_logs_rpc};
pub use text::term_frequency;
