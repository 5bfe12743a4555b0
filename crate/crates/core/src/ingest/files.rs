//! File formats: transfers / tx-value / label CSVs and the raw-log / descriptive JSONL files.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use alloy_primitives::{Address, B256, U256};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::decode::{ParseMode, RawLogEvent};
use super::hexfmt::{
    self, format_bytes, format_quantity, parse_address, parse_b256, parse_quantity, parse_u256_dec,
};
use crate::types::{
    Category, CategoryLabel, DescriptiveText, NftKey, TransferRecord, TxValueRecord, lower_hex_addr,
    lower_hex_b256,
};

pub const TRANSFERS_HEADER: [&str; 11] = [
    "standard",
    "from",
    "to",
    "contract",
    "token_id",
    "amount",
    "block_number",
    "timestamp",
    "tx_hash",
    "log_index",
    "batch_pos",
];
pub const TX_VALUES_HEADER: [&str; 2] = ["tx_hash", "value_wei"];
pub const LABELS_HEADER: [&str; 2] = ["contract", "category"];
pub const WASH_LABELS_HEADER: [&str; 2] = ["contract", "token_id"];

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("bad header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
}

impl FormatError {
    fn row(line: u64, message: impl Into<String>) -> Self {
        FormatError::Row {
            line,
            message: message.into(),
        }
    }
}

/// Loaded items plus the warnings raised while reading them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loaded<T> {
    pub items: T,
    /// Repeated keys resolved last-wins.
    pub duplicates: usize,
    /// Malformed rows skipped in lenient mode.
    pub skipped: usize,
}

fn open(path: &Path) -> Result<BufReader<File>, FormatError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| FormatError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn create(path: &Path) -> Result<BufWriter<File>, FormatError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| FormatError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn io_at(path: &Path) -> impl Fn(io::Error) -> FormatError + '_ {
    move |source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Drives a headed CSV through `parse_row`, applying the strict/lenient policy.
fn read_csv_rows<R: Read, T>(
    reader: R,
    header: &[&str],
    mode: ParseMode,
    mut parse_row: impl FnMut(&csv::StringRecord) -> Result<T, String>,
) -> Result<(Vec<T>, usize), FormatError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let found = rdr.headers()?.clone();
    if found.iter().map(str::trim).ne(header.iter().copied()) {
        return Err(FormatError::Header {
            expected: header.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut out = Vec::new();
    let mut skipped = 0;
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let parsed = if row.len() != header.len() {
            Err(format!("expected {} fields, found {}", header.len(), row.len()))
        } else {
            parse_row(&row)
        };
        match parsed {
            Ok(v) => out.push(v),
            Err(msg) if mode == ParseMode::Strict => return Err(FormatError::row(line, msg)),
            Err(msg) => {
                tracing::warn!(line, %msg, "skipping malformed row");
                skipped += 1;
            }
        }
    }
    Ok((out, skipped))
}

fn field<'a>(row: &'a csv::StringRecord, i: usize, name: &str) -> Result<&'a str, String> {
    row.get(i).ok_or_else(|| format!("missing field `{name}`"))
}

fn hex_field<T>(
    row: &csv::StringRecord,
    i: usize,
    name: &str,
    parse: impl Fn(&str) -> Result<T, hexfmt::HexError>,
) -> Result<T, String> {
    parse(field(row, i, name)?).map_err(|e| format!("field `{name}`: {e}"))
}

fn int_field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, name: &str) -> Result<T, String> {
    let s = field(row, i, name)?;
    s.trim()
        .parse()
        .map_err(|_| format!("field `{name}`: bad integer `{s}`"))
}

fn parse_transfer_row(row: &csv::StringRecord) -> Result<TransferRecord, String> {
    Ok(TransferRecord {
        standard: field(row, 0, "standard")?.parse()?,
        from: hex_field(row, 1, "from", parse_address)?,
        to: hex_field(row, 2, "to", parse_address)?,
        contract: hex_field(row, 3, "contract", parse_address)?,
        token_id: parse_u256_dec(field(row, 4, "token_id")?)?,
        amount: parse_u256_dec(field(row, 5, "amount")?)?,
        block_number: int_field(row, 6, "block_number")?,
        timestamp: int_field(row, 7, "timestamp")?,
        tx_hash: hex_field(row, 8, "tx_hash", parse_b256)?,
        log_index: int_field(row, 9, "log_index")?,
        batch_pos: int_field(row, 10, "batch_pos")?,
    })
}

pub fn read_transfers<R: Read>(reader: R, mode: ParseMode) -> Result<Loaded<Vec<TransferRecord>>, FormatError> {
    let (items, skipped) = read_csv_rows(reader, &TRANSFERS_HEADER, mode, parse_transfer_row)?;
    Ok(Loaded {
        items,
        duplicates: 0,
        skipped,
    })
}

pub fn write_transfers<W: Write>(writer: W, records: &[TransferRecord]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRANSFERS_HEADER)?;
    for r in records {
        w.write_record([
            r.standard.as_str().to_string(),
            lower_hex_addr(&r.from),
            lower_hex_addr(&r.to),
            lower_hex_addr(&r.contract),
            r.token_id.to_string(),
            r.amount.to_string(),
            r.block_number.to_string(),
            r.timestamp.to_string(),
            lower_hex_b256(&r.tx_hash),
            r.log_index.to_string(),
            r.batch_pos.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn load_transfers_csv(path: &Path, mode: ParseMode) -> Result<Loaded<Vec<TransferRecord>>, FormatError> {
    read_transfers(open(path)?, mode)
}

pub fn save_transfers_csv(path: &Path, records: &[TransferRecord]) -> Result<(), FormatError> {
    write_transfers(create(path)?, records)
}

/// Collapses `(key, value)` pairs last-wins, counting repeats.
fn last_wins<K: std::hash::Hash + Eq, V>(pairs: Vec<(K, V)>) -> (HashMap<K, V>, usize) {
    let mut map = HashMap::with_capacity(pairs.len());
    let mut dups = 0;
    for (k, v) in pairs {
        if map.insert(k, v).is_some() {
            dups += 1;
        }
    }
    (map, dups)
}

pub fn read_tx_values<R: Read>(reader: R, mode: ParseMode) -> Result<Loaded<HashMap<B256, U256>>, FormatError> {
    let (rows, skipped) = read_csv_rows(reader, &TX_VALUES_HEADER, mode, |row| {
        Ok((
            hex_field(row, 0, "tx_hash", parse_b256)?,
            parse_u256_dec(field(row, 1, "value_wei")?)?,
        ))
    })?;
    let (items, duplicates) = last_wins(rows);
    if duplicates > 0 {
        tracing::warn!(duplicates, "duplicate tx hashes in value file, kept last");
    }
    Ok(Loaded {
        items,
        duplicates,
        skipped,
    })
}

pub fn load_tx_values(path: &Path, mode: ParseMode) -> Result<Loaded<HashMap<B256, U256>>, FormatError> {
    read_tx_values(open(path)?, mode)
}

pub fn write_tx_values<W: Write>(writer: W, values: &[TxValueRecord]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TX_VALUES_HEADER)?;
    for v in values {
        w.write_record([lower_hex_b256(&v.tx_hash), v.value_wei.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn save_tx_values(path: &Path, values: &[TxValueRecord]) -> Result<(), FormatError> {
    write_tx_values(create(path)?, values)
}

pub fn read_category_labels<R: Read>(
    reader: R,
    mode: ParseMode,
) -> Result<Loaded<HashMap<Address, Category>>, FormatError> {
    let (rows, skipped) = read_csv_rows(reader, &LABELS_HEADER, mode, |row| {
        Ok((
            hex_field(row, 0, "contract", parse_address)?,
            field(row, 1, "category")?.parse::<Category>()?,
        ))
    })?;
    let (items, duplicates) = last_wins(rows);
    if duplicates > 0 {
        tracing::warn!(duplicates, "duplicate contracts in label file, kept last");
    }
    Ok(Loaded {
        items,
        duplicates,
        skipped,
    })
}

pub fn load_category_labels(
    path: &Path,
    mode: ParseMode,
) -> Result<Loaded<HashMap<Address, Category>>, FormatError> {
    read_category_labels(open(path)?, mode)
}

/// Labels are written sorted by contract.
pub fn write_category_labels<W: Write>(writer: W, labels: &[CategoryLabel]) -> Result<(), FormatError> {
    let mut sorted = labels.to_vec();
    sorted.sort_by_key(|l| l.contract);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(LABELS_HEADER)?;
    for l in sorted {
        w.write_record([lower_hex_addr(&l.contract), l.category.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Wash-trade labels: a `(contract, token_id)` list.
pub fn read_wash_labels<R: Read>(reader: R, mode: ParseMode) -> Result<Loaded<Vec<NftKey>>, FormatError> {
    let (mut items, skipped) = read_csv_rows(reader, &WASH_LABELS_HEADER, mode, |row| {
        Ok(NftKey::new(
            hex_field(row, 0, "contract", parse_address)?,
            parse_u256_dec(field(row, 1, "token_id")?)?,
        ))
    })?;
    let before = items.len();
    items.sort();
    items.dedup();
    Ok(Loaded {
        duplicates: before - items.len(),
        items,
        skipped,
    })
}

pub fn load_wash_labels(path: &Path, mode: ParseMode) -> Result<Loaded<Vec<NftKey>>, FormatError> {
    read_wash_labels(open(path)?, mode)
}

pub fn write_wash_labels<W: Write>(writer: W, nfts: &[NftKey]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(WASH_LABELS_HEADER)?;
    for k in nfts {
        w.write_record([lower_hex_addr(&k.contract), k.token_id.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// JSON-RPC quantity: providers send hex strings, hand-written files may use numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Hex(String),
    Num(u64),
}

impl Quantity {
    pub fn value(&self) -> Result<u64, hexfmt::HexError> {
        match self {
            Quantity::Hex(s) => parse_quantity(s),
            Quantity::Num(n) => Ok(*n),
        }
    }
}

/// A log object as it appears on the wire and in the raw-log JSONL file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LogObject {
    pub address: String,
    pub topics: Vec<String>,
    pub data: String,
    pub block_number: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<Quantity>,
    pub transaction_hash: String,
    pub log_index: Quantity,
}

impl LogObject {
    pub fn from_event(ev: &RawLogEvent) -> Self {
        LogObject {
            address: lower_hex_addr(&ev.contract_address),
            topics: ev.topics.iter().map(lower_hex_b256).collect(),
            data: format_bytes(&ev.data),
            block_number: Quantity::Hex(format_quantity(ev.block_number)),
            timestamp: Some(Quantity::Hex(format_quantity(ev.timestamp))),
            transaction_hash: lower_hex_b256(&ev.tx_hash),
            log_index: Quantity::Hex(format_quantity(ev.log_index)),
        }
    }

    /// Converts to an event; `timestamp` overrides the object's own when given.
    pub fn to_event(&self, timestamp: Option<u64>) -> Result<RawLogEvent, String> {
        let timestamp = match (timestamp, &self.timestamp) {
            (Some(t), _) => t,
            (None, Some(q)) => q.value().map_err(|e| format!("timestamp: {e}"))?,
            (None, None) => return Err("missing timestamp".into()),
        };
        Ok(RawLogEvent {
            contract_address: parse_address(&self.address).map_err(|e| format!("address: {e}"))?,
            topics: self
                .topics
                .iter()
                .map(|t| parse_b256(t))
                .collect::<Result<_, _>>()
                .map_err(|e| format!("topics: {e}"))?,
            data: hexfmt::parse_bytes(&self.data).map_err(|e| format!("data: {e}"))?,
            block_number: self.block_number.value().map_err(|e| format!("blockNumber: {e}"))?,
            timestamp,
            tx_hash: parse_b256(&self.transaction_hash).map_err(|e| format!("transactionHash: {e}"))?,
            log_index: self.log_index.value().map_err(|e| format!("logIndex: {e}"))?,
        })
    }
}

fn read_jsonl<R: Read, T>(
    reader: R,
    mode: ParseMode,
    mut parse_line: impl FnMut(&str) -> Result<T, String>,
) -> Result<(Vec<T>, usize), FormatError> {
    let mut out = Vec::new();
    let mut skipped = 0;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| FormatError::row(line_no, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line) {
            Ok(v) => out.push(v),
            Err(msg) if mode == ParseMode::Strict => return Err(FormatError::row(line_no, msg)),
            Err(msg) => {
                tracing::warn!(line = line_no, %msg, "skipping malformed line");
                skipped += 1;
            }
        }
    }
    Ok((out, skipped))
}

pub fn read_raw_logs<R: Read>(reader: R, mode: ParseMode) -> Result<Loaded<Vec<RawLogEvent>>, FormatError> {
    let (items, skipped) = read_jsonl(reader, mode, |line| {
        let obj: LogObject = serde_json::from_str(line).map_err(|e| e.to_string())?;
        obj.to_event(None)
    })?;
    Ok(Loaded {
        items,
        duplicates: 0,
        skipped,
    })
}

pub fn load_raw_logs(path: &Path, mode: ParseMode) -> Result<Loaded<Vec<RawLogEvent>>, FormatError> {
    read_raw_logs(open(path)?, mode)
}

pub fn write_raw_logs<W: Write>(mut writer: W, events: &[RawLogEvent]) -> io::Result<()> {
    for ev in events {
        serde_json::to_writer(&mut writer, &LogObject::from_event(ev))?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn save_raw_logs(path: &Path, events: &[RawLogEvent]) -> Result<(), FormatError> {
    write_raw_logs(create(path)?, events).map_err(io_at(path))
}

pub fn read_descriptive_texts<R: Read>(
    reader: R,
    mode: ParseMode,
) -> Result<Loaded<Vec<DescriptiveText>>, FormatError> {
    let (items, skipped) = read_jsonl(reader, mode, |line| {
        serde_json::from_str::<DescriptiveText>(line).map_err(|e| e.to_string())
    })?;
    Ok(Loaded {
        items,
        duplicates: 0,
        skipped,
    })
}

pub fn load_descriptive_texts(path: &Path, mode: ParseMode) -> Result<Loaded<Vec<DescriptiveText>>, FormatError> {
    read_descriptive_texts(open(path)?, mode)
}

pub fn write_descriptive_texts<W: Write>(mut writer: W, texts: &[DescriptiveText]) -> io::Result<()> {
    for t in texts {
        serde_json::to_writer(&mut writer, t)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
