use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nftgraph::detection::GateMode;

#[derive(Debug, Parser)]
#[command(name = "nftgraph", version, about = "NFT trade graphs, market indicators and bubble detection")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// TOML file supplying defaults; command-line flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fail on the first malformed row or log instead of skipping it.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads for the parallel stages.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Download raw logs over JSON-RPC into `logs.jsonl`.
    Fetch(SourceArgs),
    /// Decode a transfer source into `transfers.csv`.
    Parse(SourceArgs),
    /// Export the create, transfer and hold graphs plus quarterly counts.
    Graph(SourceArgs),
    /// Network metrics and degree fits as `metrics.json`.
    Stats(StatsArgs),
    /// Series and NFT indicator tables plus quarterly volume.
    Indicators(IndicatorArgs),
    /// Bubble detection report as `detection.json`.
    Detect(DetectArgs),
    /// Write a seeded synthetic market fixture.
    Gen,
    /// Labeled vs unlabeled indicator summaries as `comparison.json`.
    Compare(CompareArgs),
}

#[derive(Debug, Default, Clone, Args)]
pub struct SourceArgs {
    /// JSON-lines raw log file.
    #[arg(long)]
    pub logs: Option<PathBuf>,
    /// Decoded transfer CSV.
    #[arg(long)]
    pub transfers: Option<PathBuf>,
    /// JSON-RPC endpoint URL.
    #[arg(long)]
    pub rpc: Option<String>,
    /// Directory written by `gen`; supplies transfers, tx values and wash labels.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    #[arg(long)]
    pub from_block: Option<u64>,
    #[arg(long)]
    pub to_block: Option<u64>,
    /// Blocks per `eth_getLogs` request.
    #[arg(long)]
    pub chunk: Option<u64>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// `from,to,weight` edge list used instead of a transfer source.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Descriptive texts (JSON lines) for term frequencies.
    #[arg(long)]
    pub texts: Option<PathBuf>,
    /// One stopword per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Accounts listed in the PageRank ranking.
    #[arg(long)]
    pub top_k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct IndicatorArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub tx_values: Option<PathBuf>,
    /// Contract category labels.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub tx_values: Option<PathBuf>,
    /// Precomputed series table; requires `--nft-indicators`.
    #[arg(long)]
    pub series_indicators: Option<PathBuf>,
    #[arg(long)]
    pub nft_indicators: Option<PathBuf>,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
}

#[derive(Debug, Default, Args)]
pub struct ThresholdArgs {
    /// Minimum series turnover.
    #[arg(long, allow_negative_numbers = true)]
    pub n1: Option<f64>,
    /// Minimum series highest-to-floor ratio.
    #[arg(long, allow_negative_numbers = true)]
    pub n2: Option<f64>,
    /// Minimum NFT volume in wei; accepts `1e18` notation.
    #[arg(long)]
    pub n3: Option<String>,
    /// Minimum NFT price-to-floor ratio.
    #[arg(long, allow_negative_numbers = true)]
    pub n4: Option<f64>,
    /// P below this flags the NFT.
    #[arg(long, allow_negative_numbers = true)]
    pub n5: Option<f64>,
    /// Transferor counts below this flag the NFT.
    #[arg(long)]
    pub n6: Option<u64>,
    /// `either` (default) or `literal`.
    #[arg(long)]
    pub gate_mode: Option<GateMode>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub tx_values: Option<PathBuf>,
    /// Precomputed NFT table used instead of a transfer source.
    #[arg(long)]
    pub nft_indicators: Option<PathBuf>,
    /// `contract,token_id` list of known wash-traded NFTs.
    #[arg(long)]
    pub wash_labels: Option<PathBuf>,
}
