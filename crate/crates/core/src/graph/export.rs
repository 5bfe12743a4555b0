//! Edge-list CSV export of the three graphs.

use std::io::Write;

use super::build::{CreateGraph, HoldGraph, TransferGraph};
use super::digraph::DiGraph;
use crate::ingest::FormatError;
use crate::ingest::hexfmt::{parse_address, parse_u256_dec};
use crate::types::{AccountId, lower_hex_addr};

pub const NTG_HEADER: [&str; 3] = ["from", "to", "weight"];
pub const NCG_HEADER: [&str; 4] = ["creator", "contract", "token_id", "timestamp"];
pub const NHG_HEADER: [&str; 4] = ["contract", "token_id", "holder", "since"];

/// `from,to,weight`, sorted by `(from, to)` address.
pub fn write_ntg_edges<W: Write>(w: W, g: &TransferGraph) -> Result<(), FormatError> {
    let mut edges: Vec<_> = g.edges().collect();
    edges.sort_by_key(|(a, b, _)| (*a, *b));
    let mut w = csv::Writer::from_writer(w);
    w.write_record(NTG_HEADER)?;
    for (a, b, weight) in edges {
        w.write_record([lower_hex_addr(&a), lower_hex_addr(&b), weight.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Synthetic creation edges are exported too; the CSV has no column to mark them.
pub fn write_ncg_edges<W: Write>(w: W, g: &CreateGraph) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(NCG_HEADER)?;
    for (nft, c) in g.sorted_edges() {
        w.write_record([
            lower_hex_addr(&c.creator),
            lower_hex_addr(&nft.contract),
            nft.token_id.to_string(),
            c.timestamp.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_nhg_edges<W: Write>(w: W, g: &HoldGraph) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(NHG_HEADER)?;
    for (nft, h) in g.sorted_edges() {
        w.write_record([
            lower_hex_addr(&nft.contract),
            nft.token_id.to_string(),
            lower_hex_addr(&h.holder),
            h.since.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a `from,to,weight` edge list back into a digraph plus its node addresses
/// (numbered in first-seen order).
pub fn read_ntg_edges<R: std::io::Read>(r: R) -> Result<(DiGraph, Vec<AccountId>), FormatError> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(NTG_HEADER) {
        return Err(FormatError::Header {
            expected: NTG_HEADER.join(","),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut accounts = Vec::new();
    let mut index = std::collections::HashMap::new();
    let mut edges = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |m: String| FormatError::Row { line, message: m };
        let mut id = |s: &str| -> Result<u32, FormatError> {
            let a = parse_address(s).map_err(|e| bad(e.to_string()))?;
            Ok(*index.entry(a).or_insert_with(|| {
                accounts.push(a);
                (accounts.len() - 1) as u32
            }))
        };
        let u = id(&row[0])?;
        let v = id(&row[1])?;
        let w = parse_u256_dec(&row[2])
            .ok()
            .and_then(|w| u64::try_from(w).ok())
            .filter(|w| *w >= 1)
            .ok_or_else(|| bad(format!("bad weight `{}`", &row[2])))?;
        edges.push((u, v, w));
    }
    Ok((DiGraph::from_weighted_edges(accounts.len(), edges), accounts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build::build_ntg;
    use crate::testutil::{addr, nft, rec};

    #[test]
    fn ntg_edge_list_round_trip() {
        let g = build_ntg(&[
            rec(addr(1), addr(2), nft(7, 1), 1),
            rec(addr(2), addr(3), nft(7, 1), 2),
            rec(addr(1), addr(2), nft(7, 2), 3),
        ]);
        let mut buf = Vec::new();
        write_ntg_edges(&mut buf, &g).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("from,to,weight\n"));
        let (dg, accounts) = read_ntg_edges(buf.as_slice()).unwrap();
        assert_eq!(dg.total_weight(), 3);
        assert_eq!(accounts, vec![addr(1), addr(2), addr(3)]);
        assert_eq!(dg.weight(0, 1), Some(2));
    }

    #[test]
    fn zero_weight_rejected() {
        let a = format!("0x{}", "01".repeat(20));
        let text = format!("from,to,weight\n{a},{a},0\n");
        assert!(matches!(read_ntg_edges(text.as_bytes()), Err(FormatError::Row { line: 2, .. })));
    }
}
