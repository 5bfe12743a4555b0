//! Reconstruction of the Ethereum NFT trade ecosystem from ERC721/ERC1155 event logs.
//!
//! The pipeline runs in four stages, each usable on its own:
//!
//! 1. [`ingest`] decodes raw logs (from JSON-RPC or files) into [`TransferRecord`]s.
//! 2. [`graph`] folds records into the create, transfer and hold graphs and measures them.
//! 3. [`indicators`] computes turnover, P value, floor/highest prices and their ratios.
//! 4. [`detection`] applies threshold-based bubble detection to the indicator tables.
//!
//! Real-valued computations are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`. Wei amounts are always exact [`U256`] integers.

pub mod detection;
pub mod graph;
pub mod indicators;
pub mod ingest;
pub mod scalar;
pub mod types;

#[cfg(test)]
mod testutil;

pub use alloy_primitives::{Address, B256, U256};
pub use scalar::Real;
pub use types::*;

pub type SeriesIndicators = indicators::SeriesIndicators<f64>;
pub type NftIndicators = indicators::NftIndicators<f64>;
pub type IndicatorTables = indicators::IndicatorTables<f64>;
pub type Thresholds = detection::Thresholds<f64>;
pub type BubbleReport = detection::BubbleReport<f64>;
pub type LabeledComparison = detection::LabeledComparison<f64>;
pub type PowerLawFit = graph::PowerLawFit<f64>;
pub type PageRankParams = graph::PageRankParams<f64>;
