//! CSV encodings of the indicator tables. Undefined ratios are empty fields; wei
//! amounts are exact decimal strings; reals use the shortest round-trip representation.

use std::io::{Read, Write};
use std::str::FromStr;

use alloy_primitives::U256;

use super::{IndicatorTables, NftIndicators, QuarterlyVolume, SeriesIndicators};
use crate::ingest::FormatError;
use crate::ingest::hexfmt::{parse_address, parse_u256_dec};
use crate::scalar::Real;
use crate::types::{NftKey, SeriesKey, lower_hex_addr};

pub const SERIES_HEADER: [&str; 7] = [
    "series",
    "nft_count",
    "transfer_count",
    "turnover",
    "floor_wei",
    "highest_wei",
    "hfratio",
];
pub const NFT_HEADER: [&str; 7] = [
    "contract",
    "token_id",
    "n",
    "p_value",
    "fratio",
    "volume_wei",
    "transferors",
];
pub const QUARTERLY_VOLUME_HEADER: [&str; 3] = ["quarter", "category", "volume_wei"];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

pub fn write_series_csv<W: Write, F: Real>(w: W, rows: &[SeriesIndicators<F>]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(SERIES_HEADER)?;
    for s in rows {
        w.write_record([
            s.series.to_string(),
            s.nft_count.to_string(),
            s.transfer_count.to_string(),
            s.turnover.to_string(),
            opt(&s.floor_wei),
            opt(&s.highest_wei),
            opt(&s.hfratio),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_nft_csv<W: Write, F: Real>(w: W, rows: &[NftIndicators<F>]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(NFT_HEADER)?;
    for r in rows {
        w.write_record([
            lower_hex_addr(&r.nft.contract),
            r.nft.token_id.to_string(),
            r.n.to_string(),
            r.p_value.to_string(),
            opt(&r.fratio),
            r.volume_wei.to_string(),
            r.transferors.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_quarterly_volume_csv<W: Write>(w: W, rows: &[QuarterlyVolume]) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(QUARTERLY_VOLUME_HEADER)?;
    for q in rows {
        w.write_record([
            q.quarter.to_string(),
            q.category.map_or_else(|| "unlabeled".to_string(), |c| c.to_string()),
            q.volume_wei.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn rows<R: Read>(r: R, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>, FormatError> {
    let mut rdr = csv::Reader::from_reader(r);
    let found = rdr.headers()?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(FormatError::Header {
            expected: header.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    rdr.records()
        .map(|row| {
            let row = row?;
            Ok((row.position().map_or(0, |p| p.line()), row))
        })
        .collect()
}

fn num<T: FromStr>(line: u64, s: &str, name: &str) -> Result<T, FormatError> {
    s.parse().map_err(|_| FormatError::Row {
        line,
        message: format!("field `{name}`: cannot parse `{s}`"),
    })
}

fn opt_num<T: FromStr>(line: u64, s: &str, name: &str) -> Result<Option<T>, FormatError> {
    if s.is_empty() { Ok(None) } else { num(line, s, name).map(Some) }
}

fn wei(line: u64, s: &str, name: &str) -> Result<U256, FormatError> {
    parse_u256_dec(s).map_err(|message| FormatError::Row {
        line,
        message: format!("field `{name}`: {message}"),
    })
}

fn opt_wei(line: u64, s: &str, name: &str) -> Result<Option<U256>, FormatError> {
    if s.is_empty() { Ok(None) } else { wei(line, s, name).map(Some) }
}

fn addr(line: u64, s: &str, name: &str) -> Result<alloy_primitives::Address, FormatError> {
    parse_address(s).map_err(|e| FormatError::Row {
        line,
        message: format!("field `{name}`: {e}"),
    })
}

pub fn read_series_csv<R: Read, F: Real>(r: R) -> Result<Vec<SeriesIndicators<F>>, FormatError> {
    rows(r, &SERIES_HEADER)?
        .into_iter()
        .map(|(line, row)| {
            Ok(SeriesIndicators {
                series: SeriesKey(addr(line, &row[0], "series")?),
                nft_count: num(line, &row[1], "nft_count")?,
                transfer_count: num(line, &row[2], "transfer_count")?,
                turnover: num(line, &row[3], "turnover")?,
                floor_wei: opt_wei(line, &row[4], "floor_wei")?,
                highest_wei: opt_wei(line, &row[5], "highest_wei")?,
                hfratio: opt_num(line, &row[6], "hfratio")?,
            })
        })
        .collect()
}

pub fn read_nft_csv<R: Read, F: Real>(r: R) -> Result<Vec<NftIndicators<F>>, FormatError> {
    rows(r, &NFT_HEADER)?
        .into_iter()
        .map(|(line, row)| {
            Ok(NftIndicators {
                nft: NftKey::new(addr(line, &row[0], "contract")?, wei(line, &row[1], "token_id")?),
                n: num(line, &row[2], "n")?,
                p_value: num(line, &row[3], "p_value")?,
                fratio: opt_num(line, &row[4], "fratio")?,
                volume_wei: wei(line, &row[5], "volume_wei")?,
                transferors: num(line, &row[6], "transferors")?,
            })
        })
        .collect()
}

/// Reads both tables back.
pub fn read_tables<F: Real>(series: impl Read, nfts: impl Read) -> Result<IndicatorTables<F>, FormatError> {
    Ok(IndicatorTables {
        series: read_series_csv(series)?,
        nfts: read_nft_csv(nfts)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloy_primitives::Address;
    use proptest::prelude::*;

    fn table(turnover: f64, hf: Option<f64>, p: f64, fr: Option<f64>) -> IndicatorTables<f64> {
        IndicatorTables {
            series: vec![SeriesIndicators {
                series: SeriesKey(Address::repeat_byte(1)),
                nft_count: 3,
                transfer_count: 7,
                turnover,
                floor_wei: hf.map(|_| U256::from(10u8)),
                highest_wei: hf.map(|_| U256::MAX),
                hfratio: hf,
            }],
            nfts: vec![NftIndicators {
                nft: NftKey::new(Address::repeat_byte(1), U256::MAX),
                n: 4,
                p_value: p,
                fratio: fr,
                volume_wei: U256::from(3u64) * U256::from(10u64).pow(U256::from(21u64)),
                transferors: 2,
            }],
        }
    }

    fn round_trip(t: &IndicatorTables<f64>) -> IndicatorTables<f64> {
        let (mut s, mut n) = (Vec::new(), Vec::new());
        write_series_csv(&mut s, &t.series).unwrap();
        write_nft_csv(&mut n, &t.nfts).unwrap();
        read_tables(s.as_slice(), n.as_slice()).unwrap()
    }

    #[test]
    fn undefined_ratios_are_empty_fields() {
        let t = table(0.0, None, 0.0, None);
        let mut n = Vec::new();
        write_nft_csv(&mut n, &t.nfts).unwrap();
        let text = String::from_utf8(n).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert!(row.contains(",0,,3000000000000000000000,"), "{row}");
        assert_eq!(round_trip(&t), t);
    }

    proptest! {
        #[test]
        fn reals_round_trip_bit_exactly(
            turnover in 0.0f64..1e6,
            hf in proptest::option::of(1.0f64..1e30),
            p in 0.0f64..1e12,
            fr in proptest::option::of(1e-3f64..1e30),
        ) {
            let t = table(turnover, hf, p, fr);
            prop_assert_eq!(round_trip(&t), t);
        }
    }
}
