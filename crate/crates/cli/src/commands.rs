use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nftgraph::detection::{compare_labeled, detect_all, detect_tables, reports_to_json};
use nftgraph::graph::export::{read_ntg_edges, write_ncg_edges, write_nhg_edges, write_ntg_edges};
use nftgraph::graph::{
    self, DegreeDistribution, DegreeSource, Direction, FitSummary, NetworkReport, Role, StatsReport, TradeGraphs,
};
use nftgraph::indicators::report::{read_nft_csv, read_tables, write_nft_csv, write_quarterly_volume_csv, write_series_csv};
use nftgraph::indicators::{PriceModel, attach_values, compute_indicators, quarterly_volume};
use nftgraph::ingest::{
    FormatError, Loaded, ParseMode, RawLogEvent, fetch_logs_rpc, load_category_labels, load_descriptive_texts,
    load_raw_logs, load_transfers_csv, load_tx_values, load_wash_labels, parse_log_stream, save_raw_logs,
    save_transfers_csv, term_frequency,
};
use nftgraph::{BubbleReport, IndicatorTables, TransferRecord};
use nftgraph_synthgen::{GENERATOR, MarketSpec, LOGS_FILE, TRANSFERS_FILE, TX_VALUES_FILE, WASH_LABELS_FILE, generate, write_fixture};
use serde::Serialize;
use serde_json::json;
use tracing::{info, warn};

use crate::args::{CompareArgs, DetectArgs, IndicatorArgs, SourceArgs, StatsArgs};
use crate::config::{FileConfig, Source, fixture_dir, resolve_source, resolve_thresholds, rpc_config};
use crate::error::CliError;

pub const NCG_FILE: &str = "ncg_edges.csv";
pub const NTG_FILE: &str = "ntg_edges.csv";
pub const NHG_FILE: &str = "nhg_edges.csv";
pub const QUARTERLY_COUNTS_FILE: &str = "quarterly_counts.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const DEGREES_FILE: &str = "degree_distributions.csv";
pub const TERMS_FILE: &str = "term_frequency.csv";
pub const SERIES_FILE: &str = "series_indicators.csv";
pub const NFTS_FILE: &str = "nft_indicators.csv";
pub const QUARTERLY_VOLUME_FILE: &str = "quarterly_volume.csv";
pub const DETECTION_FILE: &str = "detection.json";
pub const COMPARISON_FILE: &str = "comparison.json";
pub const MARKET_SPEC_FILE: &str = "market_spec.json";

const DEFAULT_TOP_K: usize = 10;

/// Settings shared by every subcommand after merging flags over the config file.
pub struct Ctx {
    pub out: PathBuf,
    pub mode: ParseMode,
    pub seed: Option<u64>,
    pub cfg: FileConfig,
}

impl Ctx {
    fn output(&self, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        let f = File::create(&path).map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
        Ok((path, BufWriter::new(f)))
    }

    fn write_json(&self, name: &str, v: &impl Serialize) -> Result<PathBuf, CliError> {
        let (path, mut w) = self.output(name)?;
        let text = serde_json::to_string_pretty(v).expect("json values serialize");
        writeln!(w, "{text}")
            .and_then(|_| w.flush())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    fn write_csv(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<PathBuf, CliError> {
        let (path, w) = self.output(name)?;
        let mut w = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| CliError::from(FormatError::Csv(e));
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(&r).map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    fn pick(&self, flag: &Option<PathBuf>, file: &Option<PathBuf>) -> Option<PathBuf> {
        flag.clone().or_else(|| file.clone())
    }
}

fn note_loaded<T>(what: &Path, l: &Loaded<T>) {
    if l.skipped > 0 {
        warn!("{}: skipped {} malformed rows", what.display(), l.skipped);
    }
    if l.duplicates > 0 {
        warn!("{}: {} repeated keys resolved last-wins", what.display(), l.duplicates);
    }
}

/// Records decoded from a source plus what was set aside on the way.
pub struct Ingested {
    pub records: Vec<TransferRecord>,
    pub dropped: usize,
    pub malformed: usize,
}

fn decode(events: &[RawLogEvent], mode: ParseMode) -> Result<Ingested, CliError> {
    let out = parse_log_stream(events, mode)?;
    if out.malformed > 0 {
        warn!("skipped {} malformed NFT logs", out.malformed);
    }
    Ok(Ingested {
        records: out.records,
        dropped: out.dropped,
        malformed: out.malformed,
    })
}

pub fn ingest(src: &Source, mode: ParseMode) -> Result<Ingested, CliError> {
    match src {
        Source::Logs(p) => {
            let l = load_raw_logs(p, mode)?;
            note_loaded(p, &l);
            decode(&l.items, mode)
        }
        Source::Transfers(p) => {
            let l = load_transfers_csv(p, mode)?;
            note_loaded(p, &l);
            Ok(Ingested {
                records: l.items,
                dropped: 0,
                malformed: 0,
            })
        }
        Source::Rpc(c) => {
            let events = fetch_logs_rpc(c.clone())?;
            decode(&events, mode)
        }
    }
}

fn records(ctx: &Ctx, args: &SourceArgs) -> Result<Vec<TransferRecord>, CliError> {
    let src = resolve_source(args, &ctx.cfg)?;
    let ing = ingest(&src, ctx.mode)?;
    info!(records = ing.records.len(), dropped = ing.dropped, "ingested");
    Ok(ing.records)
}

fn price_model(
    ctx: &Ctx,
    source: &SourceArgs,
    records: &[TransferRecord],
    tx_values: &Option<PathBuf>,
) -> Result<PriceModel, CliError> {
    let fixture = fixture_dir(source, &ctx.cfg).map(|d| d.join(TX_VALUES_FILE));
    let values = match ctx.pick(tx_values, &ctx.cfg.input.tx_values).or(fixture) {
        Some(p) => {
            let l = load_tx_values(&p, ctx.mode)?;
            note_loaded(&p, &l);
            l.items
        }
        None => {
            warn!("no --tx-values given; every transfer is unpriced");
            HashMap::new()
        }
    };
    Ok(attach_values(records, &values))
}

pub fn fetch(ctx: &Ctx, args: &SourceArgs) -> Result<String, CliError> {
    let endpoint = args
        .rpc
        .clone()
        .or_else(|| ctx.cfg.rpc.endpoint.clone())
        .ok_or_else(|| CliError::config("fetch needs --rpc"))?;
    if args.logs.is_some() || args.transfers.is_some() || args.fixture.is_some() {
        return Err(CliError::config("fetch reads only from --rpc"));
    }
    let c = rpc_config(endpoint, args, &ctx.cfg)?;
    let (from, to) = (c.from_block, c.to_block);
    let events = fetch_logs_rpc(c)?;
    fs::create_dir_all(&ctx.out).map_err(|e| CliError::Input(format!("{}: {e}", ctx.out.display())))?;
    let path = ctx.out.join(LOGS_FILE);
    save_raw_logs(&path, &events)?;
    Ok(format!("fetch: {} logs from blocks {from}..={to} -> {}", events.len(), path.display()))
}

pub fn parse(ctx: &Ctx, args: &SourceArgs) -> Result<String, CliError> {
    let src = resolve_source(args, &ctx.cfg)?;
    let ing = ingest(&src, ctx.mode)?;
    fs::create_dir_all(&ctx.out).map_err(|e| CliError::Input(format!("{}: {e}", ctx.out.display())))?;
    let path = ctx.out.join(TRANSFERS_FILE);
    save_transfers_csv(&path, &ing.records)?;
    Ok(format!(
        "parse: {} transfer records ({} non-NFT logs dropped, {} malformed skipped) -> {}",
        ing.records.len(),
        ing.dropped,
        ing.malformed,
        path.display()
    ))
}

pub fn graph(ctx: &Ctx, args: &SourceArgs) -> Result<String, CliError> {
    let rs = records(ctx, args)?;
    let g = TradeGraphs::build(&rs);
    let (_, w) = ctx.output(NCG_FILE)?;
    write_ncg_edges(w, &g.create)?;
    let (_, w) = ctx.output(NTG_FILE)?;
    write_ntg_edges(w, &g.transfer)?;
    let (_, w) = ctx.output(NHG_FILE)?;
    write_nhg_edges(w, &g.hold)?;
    let rows: Vec<Vec<String>> = Role::ALL
        .into_iter()
        .flat_map(|role| {
            graph::quarterly_counts(&rs, role).into_iter().map(move |q| {
                vec![role.to_string(), q.quarter.to_string(), q.standard.to_string(), q.count.to_string()]
            })
        })
        .collect();
    ctx.write_csv(QUARTERLY_COUNTS_FILE, &["role", "quarter", "standard", "count"], rows)?;
    Ok(format!(
        "graph: NCG {} edges, NTG {} nodes / {} edges, NHG {} edges -> {}",
        g.create.len(),
        g.transfer.node_count(),
        g.transfer.edge_count(),
        g.hold.len(),
        ctx.out.display()
    ))
}

fn degree_rows<'a>(name: &'a str, d: &'a DegreeDistribution) -> impl Iterator<Item = Vec<String>> + 'a {
    d.histogram
        .iter()
        .map(move |(k, c)| vec![name.to_string(), k.to_string(), c.to_string()])
}

fn fit(d: &DegreeDistribution) -> Option<FitSummary> {
    graph::fit_power_law::<f64>(d, 1).ok().map(FitSummary::from)
}

pub fn stats(ctx: &Ctx, args: &StatsArgs) -> Result<String, CliError> {
    let top_k = args.top_k.or(ctx.cfg.stats.top_k).unwrap_or(DEFAULT_TOP_K);
    let edges = ctx.pick(&args.edges, &ctx.cfg.input.edges);
    let source_flag = args.source.any();
    let (metrics, dists, summary) = match edges {
        Some(p) if !source_flag => {
            let f = File::open(&p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            let (g, accounts) = read_ntg_edges(f)?;
            let report = NetworkReport::compute(&g, &accounts, top_k);
            let dists = vec![
                ("ntg_in", g.degree_distribution(Direction::In)),
                ("ntg_out", g.degree_distribution(Direction::Out)),
            ];
            let power_law: BTreeMap<&str, Option<FitSummary>> = dists.iter().map(|(k, d)| (*k, fit(d))).collect();
            let summary = format!(
                "stats: {} nodes, {} edges, reciprocity {}",
                report.nodes,
                report.edges,
                fmt_opt(report.reciprocity)
            );
            (json!({"network": report, "power_law": power_law}), dists, summary)
        }
        Some(_) => return Err(CliError::config("stats takes either --edges or a transfer source, not both")),
        None => {
            let rs = records(ctx, &args.source)?;
            let g = TradeGraphs::build(&rs);
            let report = StatsReport::compute(&rs, &g, top_k);
            let dists = vec![
                ("ntg_in", g.transfer.degree_distribution(Direction::In)),
                ("ntg_out", g.transfer.degree_distribution(Direction::Out)),
                ("ncg_out", g.create.degree_distribution(Direction::Out)),
                ("nhg_out", g.hold.degree_distribution(Direction::Out)),
            ];
            let summary = format!(
                "stats: {} records, {} accounts, reciprocity {}",
                rs.len(),
                report.accounts.union,
                fmt_opt(report.network.reciprocity)
            );
            (serde_json::to_value(&report).expect("report serializes"), dists, summary)
        }
    };
    let path = ctx.write_json(METRICS_FILE, &metrics)?;
    ctx.write_csv(
        DEGREES_FILE,
        &["distribution", "degree", "count"],
        dists.iter().flat_map(|(k, d)| degree_rows(k, d)).collect::<Vec<_>>(),
    )?;
    if let Some(p) = ctx.pick(&args.texts, &ctx.cfg.input.texts) {
        let texts = load_descriptive_texts(&p, ctx.mode)?;
        note_loaded(&p, &texts);
        let stop: HashSet<String> = match ctx.pick(&args.stopwords, &ctx.cfg.input.stopwords) {
            Some(s) => fs::read_to_string(&s)
                .map_err(|e| CliError::Input(format!("{}: {e}", s.display())))?
                .lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect(),
            None => HashSet::new(),
        };
        let terms = term_frequency(&texts.items, &stop);
        ctx.write_csv(TERMS_FILE, &["term", "count"], terms.into_iter().map(|(t, c)| vec![t, c.to_string()]))?;
    }
    Ok(format!("{summary} -> {}", path.display()))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| x.to_string())
}

trait Distribution {
    fn degree_distribution(&self, d: Direction) -> DegreeDistribution;
}

impl<G: DegreeSource> Distribution for G {
    fn degree_distribution(&self, d: Direction) -> DegreeDistribution {
        graph::degree_distribution(self, d, false)
    }
}

fn tables_from_source(
    ctx: &Ctx,
    source: &SourceArgs,
    tx_values: &Option<PathBuf>,
) -> Result<(Vec<TransferRecord>, PriceModel, IndicatorTables), CliError> {
    let rs = records(ctx, source)?;
    let model = price_model(ctx, source, &rs, tx_values)?;
    let ntg = graph::build_ntg(&rs);
    let tables = compute_indicators(&rs, &model, &ntg)?;
    Ok((rs, model, tables))
}

pub fn indicators(ctx: &Ctx, args: &IndicatorArgs) -> Result<String, CliError> {
    let (rs, model, tables) = tables_from_source(ctx, &args.source, &args.tx_values)?;
    let labels = match ctx.pick(&args.labels, &ctx.cfg.input.labels) {
        Some(p) => {
            let l = load_category_labels(&p, ctx.mode)?;
            note_loaded(&p, &l);
            l.items
        }
        None => HashMap::new(),
    };
    let (_, w) = ctx.output(SERIES_FILE)?;
    write_series_csv(w, &tables.series)?;
    let (_, w) = ctx.output(NFTS_FILE)?;
    write_nft_csv(w, &tables.nfts)?;
    let (_, w) = ctx.output(QUARTERLY_VOLUME_FILE)?;
    write_quarterly_volume_csv(w, &quarterly_volume(&rs, &model, &labels))?;
    let priced = tables.series.iter().filter(|s| s.floor_wei.is_some()).count();
    Ok(format!(
        "indicators: {} series ({priced} priced), {} NFTs -> {}",
        tables.series.len(),
        tables.nfts.len(),
        ctx.out.display()
    ))
}

fn open(p: &Path) -> Result<File, CliError> {
    File::open(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))
}

pub fn detect(ctx: &Ctx, args: &DetectArgs) -> Result<String, CliError> {
    let (th, mode) = resolve_thresholds(&args.thresholds, &ctx.cfg.thresholds)?;
    let series = ctx.pick(&args.series_indicators, &ctx.cfg.input.series_indicators);
    let nfts = ctx.pick(&args.nft_indicators, &ctx.cfg.input.nft_indicators);
    let reports: Vec<BubbleReport> = match (series, nfts) {
        (Some(s), Some(n)) => {
            if args.source.any() {
                return Err(CliError::config("detect takes indicator tables or a transfer source, not both"));
            }
            let tables: IndicatorTables = read_tables(open(&s)?, open(&n)?)?;
            detect_tables(&tables, &th, mode)?
        }
        (None, None) => {
            let rs = records(ctx, &args.source)?;
            let model = price_model(ctx, &args.source, &rs, &args.tx_values)?;
            detect_all(&rs, &model, &th, mode)?
        }
        _ => return Err(CliError::config("--series-indicators and --nft-indicators go together")),
    };
    let path = ctx.write_json(DETECTION_FILE, &reports_to_json(&reports))?;
    let passed = reports.iter().filter(|r| r.gate.passed).count();
    let flagged: usize = reports.iter().map(|r| r.flagged.len()).sum();
    Ok(format!(
        "detect: {} series, {passed} passed the {mode} gate, {flagged} NFTs flagged -> {}",
        reports.len(),
        path.display()
    ))
}

pub fn gen_fixture(ctx: &Ctx) -> Result<String, CliError> {
    let seed = ctx
        .seed
        .ok_or_else(|| CliError::config("gen needs an explicit --seed (or `seed` in the config)"))?;
    let mut spec = ctx.cfg.market.clone().unwrap_or_default();
    spec.seed = seed;
    let market = generate(&spec).map_err(CliError::Config)?;
    write_fixture(&ctx.out, &market)?;
    // `json!` would route the u128 wei fields through `Value`, which rejects them
    #[derive(Serialize)]
    struct Echo<'a> {
        generator: &'a str,
        spec: &'a MarketSpec,
    }
    let echo = Echo {
        generator: GENERATOR,
        spec: &spec,
    };
    ctx.write_json(MARKET_SPEC_FILE, &echo)?;
    Ok(format!(
        "gen: seed {seed}, {} series, {} records, {} wash NFTs -> {}",
        market.truth.series.len(),
        market.records.len(),
        market.truth.wash_nfts.len(),
        ctx.out.display()
    ))
}

pub fn compare(ctx: &Ctx, args: &CompareArgs) -> Result<String, CliError> {
    let fixture = fixture_dir(&args.source, &ctx.cfg).map(|d| d.join(WASH_LABELS_FILE));
    let labels_path = ctx
        .pick(&args.wash_labels, &ctx.cfg.input.wash_labels)
        .or(fixture)
        .ok_or_else(|| CliError::config("compare needs --wash-labels"))?;
    let labels = load_wash_labels(&labels_path, ctx.mode)?;
    note_loaded(&labels_path, &labels);
    let wash: HashSet<_> = labels.items.into_iter().collect();
    let nfts = match ctx.pick(&args.nft_indicators, &ctx.cfg.input.nft_indicators) {
        Some(p) => read_nft_csv::<_, f64>(open(&p)?)?,
        None => tables_from_source(ctx, &args.source, &args.tx_values)?.2.nfts,
    };
    let c = compare_labeled(&nfts, &wash);
    let path = ctx.write_json(COMPARISON_FILE, &c.to_json())?;
    let matched = nfts.iter().filter(|n| wash.contains(&n.nft)).count();
    Ok(format!(
        "compare: {matched} labeled of {} NFTs ({} labels) -> {}",
        nfts.len(),
        wash.len(),
        path.display()
    ))
}
