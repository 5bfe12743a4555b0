//! Hex text encodings used in the file formats and the JSON-RPC wire format.

use alloy_primitives::{Address, B256, U256, hex};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HexError {
    #[error("hex string has an odd number of digits")]
    OddLength,
    #[error("invalid hex digit in `{0}`")]
    BadDigit(String),
    #[error("expected {expected} bytes, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("quantity `{0}` is not a valid 0x-prefixed hex number")]
    BadQuantity(String),
}

fn strip(s: &str) -> &str {
    s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s)
}

pub fn parse_bytes(s: &str) -> Result<Vec<u8>, HexError> {
    let body = strip(s.trim());
    if body.len() % 2 == 1 {
        return Err(HexError::OddLength);
    }
    hex::decode(body).map_err(|_| HexError::BadDigit(s.to_string()))
}

fn parse_fixed<const N: usize>(s: &str) -> Result<[u8; N], HexError> {
    let bytes = parse_bytes(s)?;
    <[u8; N]>::try_from(bytes.as_slice()).map_err(|_| HexError::WrongLength {
        expected: N,
        got: bytes.len(),
    })
}

pub fn parse_address(s: &str) -> Result<Address, HexError> {
    parse_fixed::<20>(s).map(Address::from)
}

pub fn parse_b256(s: &str) -> Result<B256, HexError> {
    parse_fixed::<32>(s).map(B256::from)
}

/// Parses a JSON-RPC quantity (`0x1a`). Plain decimal is accepted too.
pub fn parse_quantity(s: &str) -> Result<u64, HexError> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(body) => u64::from_str_radix(body, 16),
        None => t.parse::<u64>(),
    };
    parsed.map_err(|_| HexError::BadQuantity(s.to_string()))
}

pub fn format_quantity(v: u64) -> String {
    format!("{v:#x}")
}

pub fn format_bytes(b: &[u8]) -> String {
    format!("0x{}", hex::encode(b))
}

/// Decimal 256-bit integer.
pub fn parse_u256_dec(s: &str) -> Result<U256, String> {
    U256::from_str_radix(s.trim(), 10).map_err(|e| format!("bad decimal integer `{s}`: {e}"))
}
