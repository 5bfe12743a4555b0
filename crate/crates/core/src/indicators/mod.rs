//! Activeness and value indicators of NFT series and single NFTs.
//!
//! Wei amounts stay exact 256-bit integers. Ratios are formed in the scalar type `F`
//! only at the final division.

pub mod price;
pub mod report;

use std::collections::{BTreeMap, HashMap};

use alloy_primitives::{Address, U256};
use rayon::prelude::*;
use thiserror::Error;

pub use price::{PriceModel, attach_values};

use crate::graph::{GraphError, TransferGraph};
use crate::scalar::Real;
use crate::types::{Category, NftKey, Quarter, SeriesKey, TransferRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndicatorError {
    #[error("series {0} has no NFTs")]
    EmptySeries(SeriesKey),
    #[error("nft {0} has no transfers")]
    NoTransfers(NftKey),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesIndicators<F> {
    pub series: SeriesKey,
    pub nft_count: u64,
    /// Non-mint transfers over the whole history.
    pub transfer_count: u64,
    pub turnover: F,
    pub floor_wei: Option<U256>,
    pub highest_wei: Option<U256>,
    pub hfratio: Option<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NftIndicators<F> {
    pub nft: NftKey,
    /// Transfers, mint included.
    pub n: u64,
    /// Seconds per transfer between first and last transfer.
    pub p_value: F,
    pub fratio: Option<F>,
    pub volume_wei: U256,
    pub transferors: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuarterlyVolume {
    pub quarter: Quarter,
    /// `None` is the unlabeled bucket.
    pub category: Option<Category>,
    pub volume_wei: U256,
}

pub fn ratio<F: Real>(num: U256, den: U256) -> F {
    F::from_wei(num) / F::from_wei(den)
}

/// Non-mint transfers of the series divided by its distinct NFT count.
pub fn turnover<F: Real>(series: SeriesKey, records: &[TransferRecord]) -> Result<F, IndicatorError> {
    let mut nfts: Vec<U256> = Vec::new();
    let mut transfers = 0u64;
    for r in records.iter().filter(|r| r.contract == series.0) {
        nfts.push(r.token_id);
        if !r.is_mint() {
            transfers += 1;
        }
    }
    nfts.sort_unstable();
    nfts.dedup();
    if nfts.is_empty() {
        return Err(IndicatorError::EmptySeries(series));
    }
    Ok(F::from_u64_lossy(transfers) / F::from_u64_lossy(nfts.len() as u64))
}

/// `|T_last - T_first| / N` over the NFT's transfers; a single transfer gives 0.
pub fn p_value<F: Real>(nft: &NftKey, records: &[TransferRecord]) -> Result<F, IndicatorError> {
    let mut span: Option<(u64, u64)> = None;
    let mut n = 0u64;
    for r in records.iter().filter(|r| r.nft() == *nft) {
        n += 1;
        span = Some(match span {
            None => (r.timestamp, r.timestamp),
            Some((lo, hi)) => (lo.min(r.timestamp), hi.max(r.timestamp)),
        });
    }
    let (lo, hi) = span.ok_or(IndicatorError::NoTransfers(*nft))?;
    Ok(p_from_span(hi - lo, n))
}

fn p_from_span<F: Real>(span: u64, n: u64) -> F {
    F::from_u64_lossy(span) / F::from_u64_lossy(n)
}

/// `(floor, highest)` over the priced NFTs of a series; `None` if none is priced.
pub fn series_prices(series: SeriesKey, model: &PriceModel) -> Option<(U256, U256)> {
    model
        .nft_price
        .iter()
        .filter(|(k, _)| k.contract == series.0)
        .map(|(_, p)| *p)
        .fold(None, |acc, p| match acc {
            None => Some((p, p)),
            Some((lo, hi)) => Some((lo.min(p), hi.max(p))),
        })
}

/// Price over series floor; `None` when unpriced or the floor is missing/zero.
pub fn fratio<F: Real>(nft: &NftKey, model: &PriceModel, series_floor: Option<U256>) -> Option<F> {
    let floor = series_floor.filter(|f| !f.is_zero())?;
    let price = model.nft_price.get(nft)?;
    Some(ratio(*price, floor))
}

fn hfratio<F: Real>(prices: Option<(U256, U256)>) -> Option<F> {
    prices
        .filter(|(floor, _)| !floor.is_zero())
        .map(|(floor, highest)| ratio(highest, floor))
}

pub fn series_indicators<F: Real>(
    series: SeriesKey,
    records: &[TransferRecord],
    model: &PriceModel,
) -> Result<SeriesIndicators<F>, IndicatorError> {
    let in_series = records.iter().filter(|r| r.contract == series.0);
    let mut ids: Vec<U256> = in_series.clone().map(|r| r.token_id).collect();
    ids.sort_unstable();
    ids.dedup();
    let transfer_count = in_series.filter(|r| !r.is_mint()).count() as u64;
    let turnover = turnover(series, records)?;
    let prices = series_prices(series, model);
    Ok(SeriesIndicators {
        series,
        nft_count: ids.len() as u64,
        transfer_count,
        turnover,
        floor_wei: prices.map(|p| p.0),
        highest_wei: prices.map(|p| p.1),
        hfratio: hfratio(prices),
    })
}

pub fn nft_indicators<F: Real>(
    nft: &NftKey,
    records: &[TransferRecord],
    model: &PriceModel,
    ntg: &TransferGraph,
) -> Result<NftIndicators<F>, IndicatorError> {
    let n = records.iter().filter(|r| r.nft() == *nft).count() as u64;
    let p_value = p_value(nft, records)?;
    let floor = series_prices(nft.series(), model).map(|p| p.0);
    Ok(NftIndicators {
        nft: *nft,
        n,
        p_value,
        fratio: fratio(nft, model, floor),
        volume_wei: model.volume(nft),
        transferors: ntg.count_transferors(nft)? as u64,
    })
}

/// Every series and NFT indicator of a dataset, each table sorted by key.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IndicatorTables<F> {
    pub series: Vec<SeriesIndicators<F>>,
    pub nfts: Vec<NftIndicators<F>>,
}

#[derive(Default)]
struct NftAgg {
    n: u64,
    first: u64,
    last: u64,
}

/// One series row with its NFT rows.
type SeriesRows<F> = (SeriesIndicators<F>, Vec<NftIndicators<F>>);

/// Single-pass computation of both tables; series are processed in parallel.
pub fn compute_indicators<F: Real>(
    records: &[TransferRecord],
    model: &PriceModel,
    ntg: &TransferGraph,
) -> Result<IndicatorTables<F>, IndicatorError> {
    let mut by_series: HashMap<Address, (HashMap<U256, NftAgg>, u64)> = HashMap::new();
    for r in records {
        let (nfts, transfers) = by_series.entry(r.contract).or_default();
        if !r.is_mint() {
            *transfers += 1;
        }
        let agg = nfts.entry(r.token_id).or_insert_with(|| NftAgg {
            n: 0,
            first: r.timestamp,
            last: r.timestamp,
        });
        agg.n += 1;
        agg.first = agg.first.min(r.timestamp);
        agg.last = agg.last.max(r.timestamp);
    }
    let mut series_keys: Vec<Address> = by_series.keys().copied().collect();
    series_keys.sort_unstable();

    let mut floors: HashMap<Address, (U256, U256)> = HashMap::new();
    for (k, p) in &model.nft_price {
        floors
            .entry(k.contract)
            .and_modify(|(lo, hi)| {
                *lo = (*lo).min(*p);
                *hi = (*hi).max(*p);
            })
            .or_insert((*p, *p));
    }

    let per_series: Vec<Result<SeriesRows<F>, IndicatorError>> = series_keys
        .par_iter()
        .map(|contract| {
            let (nfts, transfers) = &by_series[contract];
            let prices = floors.get(contract).copied();
            let series = SeriesIndicators {
                series: SeriesKey(*contract),
                nft_count: nfts.len() as u64,
                transfer_count: *transfers,
                turnover: F::from_u64_lossy(*transfers) / F::from_u64_lossy(nfts.len() as u64),
                floor_wei: prices.map(|p| p.0),
                highest_wei: prices.map(|p| p.1),
                hfratio: hfratio(prices),
            };
            let mut ids: Vec<&U256> = nfts.keys().collect();
            ids.sort_unstable();
            let rows = ids
                .into_iter()
                .map(|id| {
                    let key = NftKey::new(*contract, *id);
                    let agg = &nfts[id];
                    Ok(NftIndicators {
                        nft: key,
                        n: agg.n,
                        p_value: p_from_span(agg.last - agg.first, agg.n),
                        fratio: fratio(&key, model, prices.map(|p| p.0)),
                        volume_wei: model.volume(&key),
                        transferors: ntg.count_transferors(&key)? as u64,
                    })
                })
                .collect::<Result<Vec<_>, IndicatorError>>()?;
            Ok((series, rows))
        })
        .collect();

    let mut tables = IndicatorTables::default();
    for r in per_series {
        let (s, rows) = r?;
        tables.series.push(s);
        tables.nfts.extend(rows);
    }
    Ok(tables)
}

/// Credited value per `(quarter, category)`; unlabeled contracts share the `None`
/// bucket and all-zero rows are dropped.
pub fn quarterly_volume(
    records: &[TransferRecord],
    model: &PriceModel,
    labels: &HashMap<Address, Category>,
) -> Vec<QuarterlyVolume> {
    let mut buckets: BTreeMap<(Quarter, Option<Category>), U256> = BTreeMap::new();
    for (r, v) in records.iter().zip(&model.transfer_values) {
        if v.is_zero() {
            continue;
        }
        let key = (Quarter::from_unix(r.timestamp), labels.get(&r.contract).copied());
        *buckets.entry(key).or_default() += *v;
    }
    let mut out: Vec<_> = buckets
        .into_iter()
        .map(|((quarter, category), volume_wei)| QuarterlyVolume {
            quarter,
            category,
            volume_wei,
        })
        .collect();
    // labeled categories first, unlabeled last within a quarter
    out.sort_by_key(|q| (q.quarter, q.category.is_none(), q.category));
    out
}
