use std::collections::{BTreeSet, HashMap};

use nftgraph::detection::{GateMode, compare_labeled, detect_all};
use nftgraph::graph::{self, DiGraph, PageRankParams, TradeGraphs};
use nftgraph::indicators::{attach_values, compute_indicators};
use nftgraph::{IndicatorTables, NftKey, Thresholds, lower_hex_addr};
use nftgraph_synthgen::graphs::{Dense, pareto_degrees, random_digraph};
use nftgraph_synthgen::{Market, MarketSpec, OracleTables, WashRing, generate, oracle_indicators};
use proptest::prelude::*;

fn rel_eq(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

fn opt_rel_eq(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => rel_eq(x, y),
        (None, None) => true,
        _ => false,
    }
}

fn pipeline(m: &Market) -> IndicatorTables {
    let model = attach_values(&m.records, &m.tx_value_map());
    let graphs = TradeGraphs::build(&m.records);
    compute_indicators(&m.records, &model, &graphs.transfer).unwrap()
}

fn assert_tables_match(p: &IndicatorTables, o: &OracleTables) {
    assert_eq!(p.series.len(), o.series.len());
    for (a, b) in p.series.iter().zip(&o.series) {
        assert_eq!(a.series.0, b.series);
        assert_eq!((a.nft_count, a.transfer_count), (b.nft_count, b.transfer_count));
        assert_eq!((a.floor_wei, a.highest_wei), (b.floor_wei, b.highest_wei));
        assert!(rel_eq(a.turnover, b.turnover));
        assert!(opt_rel_eq(a.hfratio, b.hfratio), "{:?} vs {:?}", a.hfratio, b.hfratio);
    }
    assert_eq!(p.nfts.len(), o.nfts.len());
    for (a, b) in p.nfts.iter().zip(&o.nfts) {
        assert_eq!((a.nft.contract, a.nft.token_id), (b.contract, b.token_id));
        assert_eq!((a.n, a.volume_wei, a.transferors), (b.n, b.volume_wei, b.transferors));
        assert!(rel_eq(a.p_value, b.p_value));
        assert!(opt_rel_eq(a.fratio, b.fratio));
    }
}

#[test]
fn pipeline_equals_oracle_on_default_market() {
    let m = generate(&MarketSpec::default()).unwrap();
    assert_tables_match(&pipeline(&m), &oracle_indicators(&m.records, &m.tx_values));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pipeline_equals_oracle_on_random_markets(
        seed in any::<u64>(),
        n_series in 1usize..12,
        hi in 1usize..30,
        priced in 0.0f64..=1.0,
        rings in 0usize..3,
    ) {
        let spec = MarketSpec {
            seed,
            n_series,
            nfts_per_series: (1, hi),
            priced_probability: priced,
            wash_rings: vec![WashRing::default(); rings],
            ..MarketSpec::default()
        };
        let m = generate(&spec).unwrap();
        assert_tables_match(&pipeline(&m), &oracle_indicators(&m.records, &m.tx_values));
    }
}

#[test]
fn two_account_ring_has_two_transferors_and_five_records() {
    let spec = MarketSpec {
        wash_rings: vec![WashRing {
            ring_size: 2,
            nft_count: 1,
            trades_per_nft: 4,
            ..WashRing::default()
        }],
        ..MarketSpec::default()
    };
    let m = generate(&spec).unwrap();
    let wash = m.truth.wash_set();
    let key = *wash.iter().next().unwrap();
    let row = pipeline(&m).nfts.into_iter().find(|n| n.nft == key).unwrap();
    assert_eq!((row.transferors, row.n), (2, 5));
}

#[test]
fn transfer_graph_weights_equal_generator_tallies() {
    let m = generate(&MarketSpec::default()).unwrap();
    let g = graph::build_ntg(&m.records);
    let edges: Vec<(String, String, u64)> = {
        let mut v: Vec<_> = g
            .edges()
            .map(|(a, b, w)| (lower_hex_addr(&a), lower_hex_addr(&b), w))
            .collect();
        v.sort();
        v
    };
    let mut truth: Vec<_> = m.truth.pair_tallies.iter().map(|p| (p.from.clone(), p.to.clone(), p.count)).collect();
    truth.sort();
    assert_eq!(edges, truth);
}

#[test]
fn injected_rings_are_exactly_the_flagged_nfts() {
    let spec = MarketSpec {
        wash_rings: vec![WashRing::default(), WashRing { ring_size: 4, ..WashRing::default() }],
        ..MarketSpec::default()
    };
    let m = generate(&spec).unwrap();
    let model = attach_values(&m.records, &m.tx_value_map());
    for mode in [GateMode::Either, GateMode::Literal] {
        let reports = detect_all(&m.records, &model, &Thresholds::default(), mode).unwrap();
        let flagged: BTreeSet<NftKey> = reports.iter().flat_map(|r| r.flagged.iter().map(|f| f.nft)).collect();
        assert_eq!(flagged, m.truth.wash_set());
    }
}

#[test]
fn market_without_prices_yields_empty_reports() {
    let spec = MarketSpec {
        wash_rings: vec![],
        ..MarketSpec::default()
    };
    let m = generate(&spec).unwrap();
    let model = attach_values(&m.records, &HashMap::new());
    let reports = detect_all(&m.records, &model, &Thresholds::default(), GateMode::Either).unwrap();
    assert_eq!(reports.len(), spec.n_series);
    assert!(reports.iter().all(|r| r.flagged.is_empty()));
}

#[test]
fn wash_nfts_show_the_expected_median_gaps() {
    let m = generate(&MarketSpec::default()).unwrap();
    let tables = pipeline(&m);
    let wash = m.truth.wash_set().into_iter().collect();
    let c = compare_labeled(&tables.nfts, &wash);
    assert_eq!(
        (c.volume.gap_sign(), c.fratio.gap_sign(), c.p_value.gap_sign()),
        (Some(1), Some(1), Some(-1))
    );
}

#[test]
fn graph_metrics_match_dense_definitions() {
    for seed in 0..30u64 {
        let n = 1 + (seed as usize * 7) % 60;
        let density = [0.01, 0.05, 0.2][seed as usize % 3];
        let edges = random_digraph(seed, n, density);
        let g = DiGraph::from_weighted_edges(n, edges.iter().copied());
        let d = Dense::new(n, &edges);
        let scc = graph::scc(&g);
        let wcc = graph::wcc(&g);
        let (s, w) = (d.strong_components(), d.weak_components());
        assert_eq!((scc.count, scc.largest), (s.count, s.largest), "seed {seed}");
        assert_eq!((wcc.count, wcc.largest), (w.count, w.largest), "seed {seed}");
        assert!(opt_rel_eq(graph::reciprocity(&g), d.reciprocity()));
        let (cl, dcl) = (graph::clustering_coefficient::<f64>(&g), d.clustering());
        assert!(cl.zip(dcl).is_none_or(|(a, b)| (a - b).abs() <= 1e-12), "{cl:?} {dcl:?}");
        let (a, da) = (graph::degree_assortativity::<f64>(&g), d.assortativity());
        assert_eq!(a.is_some(), da.is_some(), "seed {seed}");
        assert!(a.zip(da).is_none_or(|(x, y)| (x - y).abs() <= 1e-12), "{a:?} {da:?}");
        let params = PageRankParams {
            damping: 0.85,
            tol: 1e-14,
            max_iter: 10_000,
        };
        let pr = graph::pagerank(&g, params).unwrap();
        for (x, y) in pr.iter().zip(d.pagerank(0.85)) {
            assert!((x - y).abs() <= 1e-9);
        }
    }
}

#[test]
fn power_law_exponent_is_recovered() {
    let degrees = pareto_degrees(7, 100_000, 2.5);
    let dist = graph::DegreeDistribution::from_degrees(degrees, graph::Direction::Out, false);
    let fit = graph::fit_power_law::<f64>(&dist, 1).unwrap();
    assert!((fit.alpha - 2.5).abs() <= 0.15, "alpha {}", fit.alpha);
}

#[test]
fn three_creators_with_four_nfts_each() {
    let spec = MarketSpec {
        n_series: 3,
        nfts_per_series: (4, 4),
        wash_rings: vec![],
        ..MarketSpec::default()
    };
    let m = generate(&spec).unwrap();
    let ncg = graph::build_ncg(&m.records);
    assert_eq!(ncg.len(), 12);
    let out = ncg.creator_outdegrees(false);
    assert_eq!(out.len(), 3);
    assert!(out.values().all(|d| *d == 4));
    for s in &m.truth.series {
        assert_eq!(out[&s.creator.parse::<nftgraph::Address>().unwrap()], 4);
    }
}
