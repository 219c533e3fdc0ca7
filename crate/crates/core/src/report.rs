//! End-to-end audit run and report emission.
//!
//! Report directory layout:
//!
//! | path | content |
//! |---|---|
//! | `tables/table1.csv` | disclosure and AM percentages, one column per platform and language, 3 decimals |
//! | `tables/table1_full.csv` | the same cells in long form with counts and full-precision percentages |
//! | `tables/table2.csv` | influencer counts and shares, one column per platform and size, 2 decimals |
//! | `tables/table2_full.csv` | long form with counts, denominators and full-precision shares |
//! | `tables/table2_block_sums.csv` | per-platform sums of the share blocks |
//! | `figures/fig1_instagram_composition.csv` | Instagram disclosure composition per language |
//! | `figures/fig2_top_am_disclosers.csv` | top accounts by disclosed AM |
//! | `figures/fig3_position_engagement.csv` | box statistics by platform, size and word position |
//! | `figures/fig4_composition_engagement.csv` | Instagram box statistics by size and disclosure class |
//! | `meta/metadata.json` | run metadata |
//! | `report.json` | the whole bundle (JSON and `all` formats) |
//!
//! Empty cells are written as empty strings. Every file is a pure function of
//! the inputs; no wall-clock time is recorded.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::{
    self, am_engagement, composition_engagement_groups, instagram_composition, overall_disclosure_rate,
    platform_language_table, position_engagement_groups, size_bucket, size_distribution_table, table2_block_sums,
    top_am_disclosers, BoxStats, CellStats, ClassifiedPost, Composition, CompositionGroup, PositionGroup,
    ShareBlockSums, SizeTableRow, TopAmEntry, ZScoreSummary,
};
use crate::corpus::{load_corpus_with, Corpus, CorpusError, Language, LoadOptions, LoadReport, Platform};
use crate::langid::{assign_languages, read_language_labels, LangIdError, LanguageIdentifier, LanguageSummary};
use crate::rules::lexicon::{load_lexicon, Lexicon, LexiconError};
use crate::rules::{analyze_post, RuleError};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Accounts listed per platform in the top-disclosers figure.
pub const TOP_K: usize = 5;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("lexicon: {0}")]
    Lexicon(#[from] LexiconError),
    #[error("corpus: {0}")]
    Corpus(#[from] CorpusError),
    #[error("langid: {0}")]
    LangId(#[from] LangIdError),
    #[error("rules: {0}")]
    Rules(#[from] RuleError),
    #[error("report: cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Default)]
pub struct AuditConfig {
    pub corpus: PathBuf,
    pub accounts: PathBuf,
    /// The shipped lexicon when `None`.
    pub lexicon: Option<PathBuf>,
    pub language_labels: Option<PathBuf>,
    pub load: LoadOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSpan {
    pub platform: Platform,
    pub posts: usize,
    pub first: Option<String>,
    pub last: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub tool_version: String,
    pub lexicon_version: String,
    pub langid_version: String,
    /// SHA-256 of the posts file followed by the accounts file.
    pub corpus_sha256: String,
    pub load: LoadReport,
    pub languages: LanguageSummary,
    pub analyzable_posts: usize,
    pub data_span: Vec<DataSpan>,
    pub am_engagement: BTreeMap<Platform, ZScoreSummary>,
    /// Platforms whose AM engagement had zero spread.
    pub degenerate_zscore_groups: Vec<Platform>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub meta: RunMeta,
    pub overall_disclosure_rate: Option<f64>,
    pub table1: Vec<CellStats>,
    pub table2: Vec<SizeTableRow>,
    pub table2_block_sums: Vec<ShareBlockSums>,
    pub composition: Vec<Composition>,
    pub top_am: Vec<TopAmEntry>,
    pub position_engagement: Vec<PositionGroup>,
    pub composition_engagement: Vec<CompositionGroup>,
}

/// Classify every analyzable post of a language-labelled corpus.
pub fn classify_corpus(corpus: &Corpus, lexicon: &Lexicon) -> Result<Vec<ClassifiedPost>, RuleError> {
    corpus
        .posts()
        .par_iter()
        .filter(|p| p.language.is_some_and(Language::is_analyzed))
        .map(|post| {
            let finding = analyze_post(post, lexicon)?;
            let account = corpus.account_of(post).expect("corpus accounts are complete");
            Ok(ClassifiedPost {
                post_id: post.id.clone(),
                account_id: post.account_id.clone(),
                platform: post.platform,
                language: post.language.expect("filtered to analyzed"),
                size: size_bucket(account.followers),
                engagement: analytics::engagement(post.likes, post.comments),
                class: finding.disclosure.class,
                first_position: finding.disclosure.first_position,
                am: finding.am.am_disclosure,
            })
        })
        .collect()
}

fn data_span(corpus: &Corpus) -> Vec<DataSpan> {
    let fmt = |t: DateTime<Utc>| t.to_rfc3339_opts(SecondsFormat::Secs, true);
    Platform::ALL
        .iter()
        .map(|&platform| {
            let times = corpus.posts().iter().filter(|p| p.platform == platform).map(|p| p.timestamp);
            let (mut n, mut first, mut last) = (0, None::<DateTime<Utc>>, None::<DateTime<Utc>>);
            for t in times {
                n += 1;
                first = Some(first.map_or(t, |f| f.min(t)));
                last = Some(last.map_or(t, |l| l.max(t)));
            }
            DataSpan {
                platform,
                posts: n,
                first: first.map(fmt),
                last: last.map(fmt),
            }
        })
        .collect()
}

/// Run language assignment, classification and aggregation on a loaded
/// corpus.
pub fn audit_corpus(
    corpus: Corpus,
    load: LoadReport,
    corpus_sha256: String,
    lexicon: &Lexicon,
    detector: &dyn LanguageIdentifier,
    overrides: Option<&HashMap<String, Language>>,
) -> Result<ReportBundle, AuditError> {
    let (corpus, languages) = assign_languages(corpus, detector, overrides);
    log::info!(
        "languages: {} English, {} Dutch, {} other ({} from overrides)",
        languages.english,
        languages.dutch,
        languages.other,
        languages.overridden
    );
    let posts = classify_corpus(&corpus, lexicon)?;
    let engagement = am_engagement(&posts);
    let meta = RunMeta {
        tool_version: TOOL_VERSION.to_string(),
        lexicon_version: lexicon.version.clone(),
        langid_version: detector.version().to_string(),
        corpus_sha256,
        load,
        analyzable_posts: posts.len(),
        languages,
        data_span: data_span(&corpus),
        degenerate_zscore_groups: engagement
            .per_platform
            .iter()
            .filter(|(_, s)| s.degenerate)
            .map(|(p, _)| *p)
            .collect(),
        am_engagement: engagement.per_platform.clone(),
    };
    let table2 = size_distribution_table(&posts);
    Ok(ReportBundle {
        overall_disclosure_rate: overall_disclosure_rate(&posts),
        table1: platform_language_table(&posts),
        table2_block_sums: table2_block_sums(&table2),
        table2,
        composition: instagram_composition(&posts),
        top_am: top_am_disclosers(&posts, TOP_K),
        position_engagement: position_engagement_groups(&posts, &engagement),
        composition_engagement: composition_engagement_groups(&posts, &engagement),
        meta,
    })
}

fn hash_files(paths: &[&Path]) -> Result<String, AuditError> {
    let mut h = Sha256::new();
    for path in paths {
        let bytes = fs::read(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

/// Load, label, classify and aggregate.
pub fn run_audit(config: &AuditConfig, detector: &dyn LanguageIdentifier) -> Result<ReportBundle, AuditError> {
    let lexicon = match &config.lexicon {
        Some(path) => load_lexicon(path)?,
        None => Lexicon::default_lexicon(),
    };
    let (corpus, load) = load_corpus_with(&config.corpus, &config.accounts, config.load)?;
    log::info!(
        "loaded {} posts from {} lines ({} invalid, {} non-influencer)",
        load.posts_out,
        load.lines_in,
        load.dropped_invalid,
        load.dropped_non_influencer
    );
    let hash = hash_files(&[&config.corpus, &config.accounts])?;
    let overrides = config.language_labels.as_deref().map(read_language_labels).transpose()?;
    audit_corpus(corpus, load, hash, &lexicon, detector, overrides.as_ref())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    All,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "all" => Ok(ReportFormat::All),
            _ => Err(format!("unknown report format `{s}` (expected csv, json or all)")),
        }
    }
}

fn full(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn rounded(v: Option<f64>, places: usize) -> String {
    v.map(|x| format!("{x:.places$}")).unwrap_or_default()
}

/// In-memory CSV writer; rows are joined with `\n`.
struct Csv(csv::Writer<Vec<u8>>);

impl Csv {
    fn new(header: &[&str]) -> Self {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(header).expect("write to memory");
        Csv(w)
    }

    fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.0.write_record(fields).expect("write to memory");
    }

    fn finish(self) -> Vec<u8> {
        self.0.into_inner().expect("flush to memory")
    }
}

fn table1_csv(cells: &[CellStats]) -> Vec<u8> {
    let names: Vec<String> = cells.iter().map(|c| format!("{} {}", c.platform, c.language)).collect();
    let mut header = vec!["metric"];
    header.extend(names.iter().map(String::as_str));
    let mut csv = Csv::new(&header);
    csv.row(std::iter::once("Posts".to_string()).chain(cells.iter().map(|c| c.n_posts.to_string())));
    type Pick = fn(&CellStats) -> Option<f64>;
    let rows: [(&str, Pick); 7] = [
        ("Percentage of disclosures", |c| c.pct_disclosed),
        ("Green disclosure", |c| c.pct_green),
        ("Yellow disclosure", |c| c.pct_yellow),
        ("Percentage of AM", |c| c.pct_am),
        ("Green disclosed AM", |c| c.pct_green_am),
        ("Yellow disclosed AM", |c| c.pct_yellow_am),
        ("Undisclosed AM", |c| c.pct_undisclosed_am),
    ];
    for (label, pick) in rows {
        csv.row(std::iter::once(label.to_string()).chain(cells.iter().map(|c| rounded(pick(c), 3))));
    }
    csv.finish()
}

fn table1_full_csv(cells: &[CellStats]) -> Vec<u8> {
    let mut csv = Csv::new(&[
        "platform",
        "language",
        "n_posts",
        "disclosed",
        "green",
        "yellow",
        "am",
        "green_am",
        "yellow_am",
        "undisclosed_am",
        "pct_disclosed",
        "pct_green",
        "pct_yellow",
        "pct_am",
        "pct_green_am",
        "pct_yellow_am",
        "pct_undisclosed_am",
    ]);
    for c in cells {
        let k = &c.counts;
        csv.row([
            c.platform.to_string(),
            c.language.to_string(),
            c.n_posts.to_string(),
            k.disclosed().to_string(),
            k.green.to_string(),
            k.yellow.to_string(),
            k.am.to_string(),
            k.green_am.to_string(),
            k.yellow_am.to_string(),
            k.undisclosed_am.to_string(),
            full(c.pct_disclosed),
            full(c.pct_green),
            full(c.pct_yellow),
            full(c.pct_am),
            full(c.pct_green_am),
            full(c.pct_yellow_am),
            full(c.pct_undisclosed_am),
        ]);
    }
    csv.finish()
}

fn table2_csv(rows: &[SizeTableRow]) -> Vec<u8> {
    let names: Vec<String> = rows.iter().map(|r| format!("{} {}", r.platform, r.size)).collect();
    let mut header = vec!["metric"];
    header.extend(names.iter().map(String::as_str));
    let mut csv = Csv::new(&header);
    csv.row(std::iter::once("# Influencers".to_string()).chain(rows.iter().map(|r| r.n_influencers.to_string())));
    type Pick = fn(&SizeTableRow) -> (u64, Option<f64>);
    let blocks: [(&str, Pick); 5] = [
        ("Green disclosure", |r| (r.counts.green, r.share_green_of_disclosed)),
        ("Yellow disclosure", |r| (r.counts.yellow, r.share_yellow_of_disclosed)),
        ("Green disclosed AM", |r| (r.counts.green_am, r.share_green_am_of_am)),
        ("Yellow disclosed AM", |r| (r.counts.yellow_am, r.share_yellow_am_of_am)),
        ("Undisclosed AM", |r| (r.counts.undisclosed_am, r.share_undisclosed_am_of_am)),
    ];
    for (label, pick) in blocks {
        csv.row(std::iter::once(format!("{label} #")).chain(rows.iter().map(|r| pick(r).0.to_string())));
        csv.row(std::iter::once(format!("{label} %")).chain(rows.iter().map(|r| rounded(pick(r).1, 2))));
    }
    csv.finish()
}

fn table2_full_csv(rows: &[SizeTableRow]) -> Vec<u8> {
    let mut csv = Csv::new(&[
        "platform",
        "size",
        "n_influencers",
        "n_posts",
        "green",
        "yellow",
        "green_am",
        "yellow_am",
        "undisclosed_am",
        "platform_disclosed",
        "platform_am",
        "share_green_of_disclosed",
        "share_yellow_of_disclosed",
        "share_green_am_of_am",
        "share_yellow_am_of_am",
        "share_undisclosed_am_of_am",
    ]);
    for r in rows {
        let k = &r.counts;
        csv.row([
            r.platform.to_string(),
            r.size.to_string(),
            r.n_influencers.to_string(),
            k.n_posts.to_string(),
            k.green.to_string(),
            k.yellow.to_string(),
            k.green_am.to_string(),
            k.yellow_am.to_string(),
            k.undisclosed_am.to_string(),
            r.platform_disclosed.to_string(),
            r.platform_am.to_string(),
            full(r.share_green_of_disclosed),
            full(r.share_yellow_of_disclosed),
            full(r.share_green_am_of_am),
            full(r.share_yellow_am_of_am),
            full(r.share_undisclosed_am_of_am),
        ]);
    }
    csv.finish()
}

fn block_sums_csv(sums: &[ShareBlockSums]) -> Vec<u8> {
    let mut csv = Csv::new(&["platform", "disclosure_share_sum", "am_share_sum"]);
    for s in sums {
        csv.row([s.platform.to_string(), full(s.disclosure_share_sum), full(s.am_share_sum)]);
    }
    csv.finish()
}

fn composition_csv(comp: &[Composition]) -> Vec<u8> {
    let mut csv = Csv::new(&["language", "class", "count", "share", "text_only_share"]);
    for c in comp {
        let rows = [
            ("green_words_position", c.green_words_position, c.share_green_words_position, c.text_only_share_green_words_position),
            ("green_toggle", c.green_toggle, c.share_green_toggle, None),
            (
                "green_toggle_words_position",
                c.green_toggle_words_position,
                c.share_green_toggle_words_position,
                c.text_only_share_green_toggle_words_position,
            ),
            ("yellow", c.yellow, c.share_yellow, c.text_only_share_yellow),
        ];
        for (class, n, share, text_only) in rows {
            csv.row([c.language.to_string(), class.to_string(), n.to_string(), full(share), full(text_only)]);
        }
    }
    csv.finish()
}

fn top_am_csv(top: &[TopAmEntry]) -> Vec<u8> {
    let mut csv = Csv::new(&[
        "platform",
        "rank",
        "account_id",
        "size",
        "disclosed_am",
        "total_am",
        "share_of_platform_disclosed_am",
        "own_am_disclosure_rate",
    ]);
    for t in top {
        csv.row([
            t.platform.to_string(),
            t.rank.to_string(),
            t.account_id.clone(),
            t.size.to_string(),
            t.disclosed_am.to_string(),
            t.total_am.to_string(),
            t.share_of_platform_disclosed_am.to_string(),
            t.own_am_disclosure_rate.to_string(),
        ]);
    }
    csv.finish()
}

const BOX_HEADER: [&str; 7] = ["n", "median", "q1", "q3", "whisker_low", "whisker_high", "outliers"];

fn box_fields(b: &BoxStats) -> [String; 7] {
    [
        b.n.to_string(),
        full(b.median),
        full(b.q1),
        full(b.q3),
        full(b.whisker_low),
        full(b.whisker_high),
        b.outlier_count.to_string(),
    ]
}

fn position_csv(groups: &[PositionGroup]) -> Vec<u8> {
    let header: Vec<&str> = ["platform", "size", "category"].into_iter().chain(BOX_HEADER).collect();
    let mut csv = Csv::new(&header);
    for g in groups {
        let keys = [g.platform.to_string(), g.size.to_string(), g.category.label().to_string()];
        csv.row(keys.into_iter().chain(box_fields(&g.stats)));
    }
    csv.finish()
}

fn composition_engagement_csv(groups: &[CompositionGroup]) -> Vec<u8> {
    let header: Vec<&str> = ["size", "class"].into_iter().chain(BOX_HEADER).collect();
    let mut csv = Csv::new(&header);
    for g in groups {
        let keys = [g.size.to_string(), g.class.label().to_string()];
        csv.row(keys.into_iter().chain(box_fields(&g.stats)));
    }
    csv.finish()
}

fn pretty_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report values serialize");
    out.push(b'\n');
    out
}

/// Render every report file as `(relative path, bytes)`.
pub fn render_report(bundle: &ReportBundle, format: ReportFormat) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    if matches!(format, ReportFormat::Csv | ReportFormat::All) {
        let tables = Path::new("tables");
        let figures = Path::new("figures");
        files.push((tables.join("table1.csv"), table1_csv(&bundle.table1)));
        files.push((tables.join("table1_full.csv"), table1_full_csv(&bundle.table1)));
        files.push((tables.join("table2.csv"), table2_csv(&bundle.table2)));
        files.push((tables.join("table2_full.csv"), table2_full_csv(&bundle.table2)));
        files.push((tables.join("table2_block_sums.csv"), block_sums_csv(&bundle.table2_block_sums)));
        files.push((figures.join("fig1_instagram_composition.csv"), composition_csv(&bundle.composition)));
        files.push((figures.join("fig2_top_am_disclosers.csv"), top_am_csv(&bundle.top_am)));
        files.push((figures.join("fig3_position_engagement.csv"), position_csv(&bundle.position_engagement)));
        files.push((
            figures.join("fig4_composition_engagement.csv"),
            composition_engagement_csv(&bundle.composition_engagement),
        ));
    }
    if matches!(format, ReportFormat::Json | ReportFormat::All) {
        files.push((PathBuf::from("report.json"), pretty_json(bundle)));
    }
    #[derive(Serialize)]
    struct Meta<'a> {
        #[serde(flatten)]
        meta: &'a RunMeta,
        overall_disclosure_rate: Option<f64>,
    }
    files.push((
        Path::new("meta").join("metadata.json"),
        pretty_json(&Meta {
            meta: &bundle.meta,
            overall_disclosure_rate: bundle.overall_disclosure_rate,
        }),
    ));
    files
}

/// Write the report under `out`, returning the written paths.
pub fn emit_report(bundle: &ReportBundle, out: &Path, format: ReportFormat) -> Result<Vec<PathBuf>, AuditError> {
    let mut written = Vec::new();
    for (rel, bytes) in render_report(bundle, format) {
        let path = out.join(rel);
        let io_err = |source| AuditError::Io {
            path: path.clone(),
            source,
        };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err)?;
        }
        fs::write(&path, bytes).map_err(io_err)?;
        written.push(path);
    }
    Ok(written)
}
