//! Threshold-based bubble NFT detection and the wash-label distribution comparison.

pub mod compare;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use alloy_primitives::U256;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Value, json};
use thiserror::Error;

pub use compare::{FiveNumber, IndicatorComparison, LabeledComparison, compare_labeled};

use crate::graph::build_ntg;
use crate::indicators::{IndicatorError, IndicatorTables, NftIndicators, PriceModel, SeriesIndicators, compute_indicators};
use crate::scalar::Real;
use crate::types::{NftKey, SeriesKey, TransferRecord, lower_hex_addr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("threshold {name} must be a non-negative number, got {value}")]
    Threshold { name: &'static str, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetectError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
    #[error("nft {nft} does not belong to series {series}")]
    ForeignNft { nft: NftKey, series: SeriesKey },
}

/// The six detection cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds<F> {
    /// Minimum series turnover.
    pub n1: F,
    /// Minimum series highest/floor ratio.
    pub n2: F,
    /// Minimum NFT volume in wei.
    pub n3: U256,
    /// Minimum NFT price over series floor.
    pub n4: F,
    /// P value (seconds per transfer) below which trading is concentrated.
    pub n5: F,
    /// Transferor count below which an NFT is flagged.
    pub n6: u64,
}

impl<F: Real> Default for Thresholds<F> {
    fn default() -> Self {
        Thresholds {
            n1: F::from_f64_lossy(1.5),
            n2: F::from_f64_lossy(5e3),
            n3: U256::from(10u64).pow(U256::from(18u64)),
            n4: F::from_f64_lossy(1e3),
            n5: F::from_f64_lossy(1e7),
            n6: 3,
        }
    }
}

impl<F: Real> Thresholds<F> {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [("n1", self.n1), ("n2", self.n2), ("n4", self.n4), ("n5", self.n5)] {
            if v.is_nan() || v < F::zero() {
                return Err(ConfigError::Threshold {
                    name,
                    value: v.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// How the two series-level clauses combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateMode {
    /// Both turnover and HFratio must clear their cutoffs.
    Literal,
    /// Either clause suffices.
    #[default]
    Either,
}

impl GateMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GateMode::Literal => "literal",
            GateMode::Either => "either",
        }
    }
}

impl fmt::Display for GateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(GateMode::Literal),
            "either" => Ok(GateMode::Either),
            other => Err(format!("unknown gate mode `{other}` (expected literal or either)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagReason {
    ConcentratedP,
    FewTransferors,
}

impl FlagReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FlagReason::ConcentratedP => "concentrated_p",
            FlagReason::FewTransferors => "few_transferors",
        }
    }
}

impl fmt::Display for FlagReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate<F> {
    pub turnover: F,
    pub hfratio: Option<F>,
    pub passed: bool,
    pub mode: GateMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flag<F> {
    pub nft: NftKey,
    pub reason: FlagReason,
    pub indicators: NftIndicators<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BubbleReport<F> {
    pub series: SeriesKey,
    pub gate: Gate<F>,
    pub flagged: Vec<Flag<F>>,
}

impl<F: Real> BubbleReport<F> {
    pub fn is_empty(&self) -> bool {
        self.flagged.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "series": self.series.to_string(),
            "gate": {
                "turnover": num(self.gate.turnover),
                "hfratio": self.gate.hfratio.map_or(Value::Null, num),
                "passed": self.gate.passed,
                "mode": self.gate.mode.as_str(),
            },
            "flagged": self.flagged.iter().map(|f| json!({
                "contract": lower_hex_addr(&f.nft.contract),
                "token_id": f.nft.token_id.to_string(),
                "reason": f.reason.as_str(),
                "volume_wei": f.indicators.volume_wei.to_string(),
                "fratio": f.indicators.fratio.map_or(Value::Null, num),
                "p_value": num(f.indicators.p_value),
                "transferors": f.indicators.transferors,
            })).collect::<Vec<_>>(),
        })
    }
}

fn num<F: Real>(v: F) -> Value {
    serde_json::Number::from_f64(v.to_f64_lossy()).map_or(Value::Null, Value::Number)
}

/// Serializes reports as one JSON array.
pub fn reports_to_json<F: Real>(reports: &[BubbleReport<F>]) -> Value {
    Value::Array(reports.iter().map(BubbleReport::to_json).collect())
}

fn gate<F: Real>(s: &SeriesIndicators<F>, th: &Thresholds<F>, mode: GateMode) -> Gate<F> {
    let turnover_ok = s.turnover >= th.n1;
    // an undefined ratio never clears a >= cutoff
    let hfratio_ok = s.hfratio.is_some_and(|h| h >= th.n2);
    let passed = match mode {
        GateMode::Literal => turnover_ok && hfratio_ok,
        GateMode::Either => turnover_ok || hfratio_ok,
    };
    Gate {
        turnover: s.turnover,
        hfratio: s.hfratio,
        passed,
        mode,
    }
}

/// Per-NFT decision once the series has passed its gate.
pub fn classify<F: Real>(ind: &NftIndicators<F>, th: &Thresholds<F>) -> Option<FlagReason> {
    if ind.volume_wei < th.n3 {
        return None;
    }
    if !ind.fratio.is_some_and(|f| f >= th.n4) {
        return None;
    }
    if ind.p_value < th.n5 {
        Some(FlagReason::ConcentratedP)
    } else if ind.transferors < th.n6 {
        Some(FlagReason::FewTransferors)
    } else {
        None
    }
}

pub fn detect_bubbles<F: Real>(
    series_ind: &SeriesIndicators<F>,
    nft_inds: &[NftIndicators<F>],
    th: &Thresholds<F>,
    mode: GateMode,
) -> Result<BubbleReport<F>, DetectError> {
    th.validate()?;
    if let Some(foreign) = nft_inds.iter().find(|n| n.nft.contract != series_ind.series.0) {
        return Err(DetectError::ForeignNft {
            nft: foreign.nft,
            series: series_ind.series,
        });
    }
    let gate = gate(series_ind, th, mode);
    let flagged = if gate.passed {
        nft_inds
            .iter()
            .filter_map(|ind| {
                classify(ind, th).map(|reason| Flag {
                    nft: ind.nft,
                    reason,
                    indicators: ind.clone(),
                })
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(BubbleReport {
        series: series_ind.series,
        gate,
        flagged,
    })
}

/// Runs detection over precomputed tables, one report per series in contract order.
pub fn detect_tables<F: Real>(
    tables: &IndicatorTables<F>,
    th: &Thresholds<F>,
    mode: GateMode,
) -> Result<Vec<BubbleReport<F>>, DetectError> {
    th.validate()?;
    let mut by_series: HashMap<SeriesKey, Vec<NftIndicators<F>>> = HashMap::new();
    for n in &tables.nfts {
        by_series.entry(n.nft.series()).or_default().push(n.clone());
    }
    let mut series: Vec<&SeriesIndicators<F>> = tables.series.iter().collect();
    series.sort_by_key(|s| s.series);
    series
        .par_iter()
        .map(|s| detect_bubbles(s, by_series.get(&s.series).map_or(&[][..], Vec::as_slice), th, mode))
        .collect()
}

/// Computes indicators from the record stream and detects over every series.
pub fn detect_all<F: Real>(
    records: &[TransferRecord],
    model: &PriceModel,
    th: &Thresholds<F>,
    mode: GateMode,
) -> Result<Vec<BubbleReport<F>>, DetectError> {
    th.validate()?;
    let ntg = build_ntg(records);
    let tables = compute_indicators::<F>(records, model, &ntg)?;
    detect_tables(&tables, th, mode)
}
