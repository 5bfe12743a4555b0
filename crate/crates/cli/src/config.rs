//! TOML configuration and its merge with command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use nftgraph::detection::GateMode;
use nftgraph::ingest::RpcConfig;
use nftgraph::ingest::hexfmt::parse_u256_dec;
use nftgraph::{Thresholds, U256};
use nftgraph_synthgen::{MarketSpec, TRANSFERS_FILE};
use serde::Deserialize;

use crate::args::{SourceArgs, ThresholdArgs};
use crate::error::CliError;

pub const DEFAULT_OUT: &str = "out";
pub const DEFAULT_CHUNK: u64 = 2000;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub strict: Option<bool>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub input: InputSection,
    pub rpc: RpcSection,
    pub thresholds: ThresholdSection,
    pub stats: StatsSection,
    pub market: Option<MarketSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    pub fixture: Option<PathBuf>,
    pub logs: Option<PathBuf>,
    pub transfers: Option<PathBuf>,
    pub tx_values: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub texts: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub wash_labels: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub series_indicators: Option<PathBuf>,
    pub nft_indicators: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RpcSection {
    pub endpoint: Option<String>,
    pub from_block: Option<u64>,
    pub to_block: Option<u64>,
    pub chunk: Option<u64>,
    pub max_retries: Option<u32>,
}

/// `n3` may be written as an integer or as a decimal/`1e18` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Wei {
    Int(u64),
    Text(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSection {
    pub n1: Option<f64>,
    pub n2: Option<f64>,
    pub n3: Option<Wei>,
    pub n4: Option<f64>,
    pub n5: Option<f64>,
    pub n6: Option<u64>,
    pub gate_mode: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsSection {
    pub top_k: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("config {}: {e}", path.display())))
    }
}

/// Where transfer records come from.
#[derive(Debug, Clone)]
pub enum Source {
    Logs(PathBuf),
    Transfers(PathBuf),
    Rpc(RpcConfig),
}

impl SourceArgs {
    pub fn any(&self) -> bool {
        self.logs.is_some() || self.transfers.is_some() || self.rpc.is_some() || self.fixture.is_some()
    }
}

/// The fixture directory in effect, flag first.
pub fn fixture_dir(args: &SourceArgs, cfg: &FileConfig) -> Option<PathBuf> {
    if args.any() {
        args.fixture.clone()
    } else {
        cfg.input.fixture.clone()
    }
}

/// Exactly one transfer source. Any source flag replaces the configured sources
/// wholesale, so a flag never combines with a file entry into a conflict.
pub fn resolve_source(args: &SourceArgs, cfg: &FileConfig) -> Result<Source, CliError> {
    let (logs, transfers, endpoint, fixture) = if args.any() {
        (args.logs.clone(), args.transfers.clone(), args.rpc.clone(), args.fixture.clone())
    } else {
        let i = &cfg.input;
        (i.logs.clone(), i.transfers.clone(), cfg.rpc.endpoint.clone(), i.fixture.clone())
    };
    let given = [logs.is_some(), transfers.is_some(), endpoint.is_some(), fixture.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if given != 1 {
        return Err(CliError::config(format!(
            "exactly one transfer source is required (--logs, --transfers, --rpc or --fixture), got {given}"
        )));
    }
    if let Some(p) = logs {
        return Ok(Source::Logs(p));
    }
    if let Some(p) = transfers {
        return Ok(Source::Transfers(p));
    }
    if let Some(d) = fixture {
        return Ok(Source::Transfers(d.join(TRANSFERS_FILE)));
    }
    rpc_config(endpoint.expect("one source is set"), args, cfg).map(Source::Rpc)
}

pub fn rpc_config(endpoint: String, args: &SourceArgs, cfg: &FileConfig) -> Result<RpcConfig, CliError> {
    let from = args.from_block.or(cfg.rpc.from_block);
    let to = args.to_block.or(cfg.rpc.to_block);
    let (Some(from), Some(to)) = (from, to) else {
        return Err(CliError::config("--rpc needs --from-block and --to-block"));
    };
    let chunk = args.chunk.or(cfg.rpc.chunk).unwrap_or(DEFAULT_CHUNK);
    let mut c = RpcConfig::new(endpoint, from, to, chunk);
    if let Some(r) = cfg.rpc.max_retries {
        c.max_retries = r;
    }
    Ok(c)
}

/// Decimal integer, optionally with a fraction and exponent (`1.5e18`), exactly
/// representable as an integer wei amount.
pub fn parse_wei(s: &str) -> Result<U256, String> {
    let s = s.trim();
    let Some((mant, exp)) = s.split_once(['e', 'E']) else {
        return parse_u256_dec(s);
    };
    let exp: i64 = exp.parse().map_err(|_| format!("bad exponent in `{s}`"))?;
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let digits = format!("{int}{frac}");
    let shift = exp - frac.len() as i64;
    if shift < 0 || digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("`{s}` is not an integer wei amount"));
    }
    let base = parse_u256_dec(&digits)?;
    let scale = U256::from(10u8)
        .checked_pow(U256::from(shift as u64))
        .ok_or_else(|| format!("`{s}` overflows 256 bits"))?;
    base.checked_mul(scale).ok_or_else(|| format!("`{s}` overflows 256 bits"))
}

pub fn resolve_thresholds(args: &ThresholdArgs, cfg: &ThresholdSection) -> Result<(Thresholds, GateMode), CliError> {
    let d = Thresholds::default();
    let n3 = match (&args.n3, &cfg.n3) {
        (Some(s), _) | (None, Some(Wei::Text(s))) => parse_wei(s).map_err(|e| CliError::config(format!("n3: {e}")))?,
        (None, Some(Wei::Int(v))) => U256::from(*v),
        (None, None) => d.n3,
    };
    let th = Thresholds {
        n1: args.n1.or(cfg.n1).unwrap_or(d.n1),
        n2: args.n2.or(cfg.n2).unwrap_or(d.n2),
        n3,
        n4: args.n4.or(cfg.n4).unwrap_or(d.n4),
        n5: args.n5.or(cfg.n5).unwrap_or(d.n5),
        n6: args.n6.or(cfg.n6).unwrap_or(d.n6),
    };
    th.validate().map_err(|e| CliError::config(e.to_string()))?;
    let mode = match (args.gate_mode, &cfg.gate_mode) {
        (Some(m), _) => m,
        (None, Some(s)) => s.parse().map_err(|e: String| CliError::config(format!("gate_mode: {e}")))?,
        (None, None) => GateMode::default(),
    };
    Ok((th, mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wei_notation() {
        assert_eq!(parse_wei("1e18").unwrap(), U256::from(10u64).pow(U256::from(18u8)));
        assert_eq!(parse_wei("1.5E3").unwrap(), U256::from(1500u32));
        assert_eq!(parse_wei("42").unwrap(), U256::from(42u8));
        assert!(parse_wei("1.25e1").is_err());
        assert!(parse_wei("1e99999").is_err());
        assert!(parse_wei("-1e3").is_err());
    }

    #[test]
    fn flags_override_file_thresholds() {
        let file: FileConfig = toml::from_str(
            "[thresholds]\nn1 = 2.0\nn3 = \"5e18\"\nn6 = 4\ngate_mode = \"literal\"\n",
        )
        .unwrap();
        let args = ThresholdArgs {
            n6: Some(9),
            ..ThresholdArgs::default()
        };
        let (th, mode) = resolve_thresholds(&args, &file.thresholds).unwrap();
        assert_eq!((th.n1, th.n6, mode), (2.0, 9, GateMode::Literal));
        assert_eq!(th.n3, U256::from(5u64) * U256::from(10u64).pow(U256::from(18u8)));
        assert_eq!(th.n2, Thresholds::default().n2);
    }

    #[test]
    fn negative_threshold_is_a_config_error() {
        let args = ThresholdArgs {
            n4: Some(-1.0),
            ..ThresholdArgs::default()
        };
        assert!(matches!(
            resolve_thresholds(&args, &ThresholdSection::default()),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn source_flags_replace_configured_sources() {
        let file: FileConfig = toml::from_str("[input]\ntransfers = \"a.csv\"\n").unwrap();
        let flags = SourceArgs {
            logs: Some("b.jsonl".into()),
            ..SourceArgs::default()
        };
        assert!(matches!(resolve_source(&flags, &file), Ok(Source::Logs(_))));
        assert!(matches!(resolve_source(&SourceArgs::default(), &file), Ok(Source::Transfers(_))));
        let both = SourceArgs {
            logs: Some("b".into()),
            transfers: Some("c".into()),
            ..SourceArgs::default()
        };
        assert!(matches!(resolve_source(&both, &file), Err(CliError::Config(_))));
        let none = FileConfig::default();
        assert!(matches!(resolve_source(&SourceArgs::default(), &none), Err(CliError::Config(_))));
        let rpc = SourceArgs {
            rpc: Some("http://x".into()),
            ..SourceArgs::default()
        };
        assert!(matches!(resolve_source(&rpc, &none), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("bogus = 1\n").is_err());
        let spec: FileConfig = toml::from_str("seed = 3\n[market]\nn_series = 2\n").unwrap();
        assert_eq!(spec.market.unwrap().n_series, 2);
    }
}
