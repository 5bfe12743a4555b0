//! Deterministic synthetic NFT markets with known ground truth, plus brute-force
//! oracles for the indicator tables and graph metrics.

pub mod graphs;
pub mod market;
pub mod oracle;

use std::fs;
use std::io;
use std::path::Path;

pub use market::{GENERATOR, GroundTruth, Market, MarketSpec, WashRing, generate};
pub use oracle::{OracleNft, OracleSeries, OracleTables, oracle_indicators};

use nftgraph::ingest::files::write_wash_labels;
use nftgraph::ingest::{FormatError, encode_transfer_log, save_raw_logs, save_transfers_csv, save_tx_values};

pub const TRANSFERS_FILE: &str = "transfers.csv";
pub const TX_VALUES_FILE: &str = "tx_values.csv";
pub const LOGS_FILE: &str = "logs.jsonl";
pub const WASH_LABELS_FILE: &str = "wash_labels.csv";
pub const TRUTH_FILE: &str = "ground_truth.json";

/// Writes a market in the ingest file formats: transfers, tx values, the equivalent
/// raw logs, wash labels and the ground truth.
pub fn write_fixture(dir: &Path, market: &Market) -> Result<(), FormatError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source: io::Error| FormatError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    save_transfers_csv(&dir.join(TRANSFERS_FILE), &market.records)?;
    save_tx_values(&dir.join(TX_VALUES_FILE), &market.tx_values)?;
    let logs: Vec<_> = market.records.iter().map(encode_transfer_log).collect();
    save_raw_logs(&dir.join(LOGS_FILE), &logs)?;
    let wash_path = dir.join(WASH_LABELS_FILE);
    let wash: Vec<_> = market.truth.wash_set().into_iter().collect();
    let f = fs::File::create(&wash_path).map_err(io_err(&wash_path))?;
    write_wash_labels(io::BufWriter::new(f), &wash)?;
    let truth_path = dir.join(TRUTH_FILE);
    let json = serde_json::to_string_pretty(&market.truth).expect("ground truth serializes");
    fs::write(&truth_path, json + "\n").map_err(io_err(&truth_path))?;
    Ok(())
}
