//! Aggregation of per-post findings into report tables and plot data.
//!
//! All functions take a slice of [`ClassifiedPost`], one per analyzable
//! (English or Dutch) post. Counts are integers merged associatively, so the
//! results do not depend on post order or worker count. Percentages are
//! derived from counts at the end.

pub mod stats;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Language, Platform};
use crate::rules::{AmDisclosure, DisclosureClass, POSITION_LIMIT};
pub use stats::{zscore, BoxStats, ZScored};

pub const MACRO_THRESHOLD: u64 = 500_000;
pub const MEGA_THRESHOLD: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SizeClass {
    Micro,
    Macro,
    Mega,
}

impl SizeClass {
    pub const ALL: [SizeClass; 3] = [SizeClass::Micro, SizeClass::Macro, SizeClass::Mega];

    pub fn as_str(self) -> &'static str {
        match self {
            SizeClass::Micro => "Micro",
            SizeClass::Macro => "Macro",
            SizeClass::Mega => "Mega",
        }
    }
}

impl std::fmt::Display for SizeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SizeClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "micro" => Ok(SizeClass::Micro),
            "macro" => Ok(SizeClass::Macro),
            "mega" => Ok(SizeClass::Mega),
            _ => Err(s.to_string()),
        }
    }
}

/// Follower-count class. 500,000 is Macro and 1,000,000 is Mega.
pub fn size_bucket(followers: u64) -> SizeClass {
    if followers >= MEGA_THRESHOLD {
        SizeClass::Mega
    } else if followers >= MACRO_THRESHOLD {
        SizeClass::Macro
    } else {
        SizeClass::Micro
    }
}

pub fn engagement(likes: u64, comments: u64) -> u64 {
    likes.saturating_add(comments)
}

/// The per-post facts analytics needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedPost {
    pub post_id: String,
    pub account_id: String,
    pub platform: Platform,
    pub language: Language,
    pub size: SizeClass,
    pub engagement: u64,
    pub class: DisclosureClass,
    pub first_position: Option<usize>,
    pub am: AmDisclosure,
}

impl ClassifiedPost {
    pub fn is_am(&self) -> bool {
        self.am != AmDisclosure::NotAM
    }
}

/// Mergeable per-cell counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    pub n_posts: u64,
    pub green: u64,
    pub yellow: u64,
    pub am: u64,
    pub green_am: u64,
    pub yellow_am: u64,
    pub undisclosed_am: u64,
}

impl CellCounts {
    pub fn add(&mut self, post: &ClassifiedPost) {
        self.n_posts += 1;
        if post.class.is_green() {
            self.green += 1;
        } else if post.class == DisclosureClass::Yellow {
            self.yellow += 1;
        }
        match post.am {
            AmDisclosure::GreenDisclosedAM => self.green_am += 1,
            AmDisclosure::YellowDisclosedAM => self.yellow_am += 1,
            AmDisclosure::UndisclosedAM => self.undisclosed_am += 1,
            AmDisclosure::NotAM => {}
        }
        if post.is_am() {
            self.am += 1;
        }
    }

    pub fn merge(mut self, other: CellCounts) -> CellCounts {
        self.n_posts += other.n_posts;
        self.green += other.green;
        self.yellow += other.yellow;
        self.am += other.am;
        self.green_am += other.green_am;
        self.yellow_am += other.yellow_am;
        self.undisclosed_am += other.undisclosed_am;
        self
    }

    pub fn disclosed(&self) -> u64 {
        self.green + self.yellow
    }
}

/// `100 * part / whole`, or `None` when `whole` is zero.
pub fn percent(part: u64, whole: u64) -> Option<f64> {
    (whole > 0).then(|| 100.0 * part as f64 / whole as f64)
}

fn merge_maps<K: Ord>(mut a: BTreeMap<K, CellCounts>, b: BTreeMap<K, CellCounts>) -> BTreeMap<K, CellCounts> {
    for (k, v) in b {
        let slot = a.entry(k).or_default();
        *slot = slot.merge(v);
    }
    a
}

/// Count posts per key in parallel.
pub fn count_by<K, F>(posts: &[ClassifiedPost], key: F) -> BTreeMap<K, CellCounts>
where
    K: Ord + Send,
    F: Fn(&ClassifiedPost) -> K + Sync,
{
    posts
        .par_iter()
        .fold(BTreeMap::new, |mut acc, post| {
            acc.entry(key(post)).or_insert_with(CellCounts::default).add(post);
            acc
        })
        .reduce(BTreeMap::new, merge_maps)
}

/// One Table 1 cell. Percentages are of `n_posts` and are `None` for an
/// empty cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub platform: Platform,
    pub language: Language,
    pub n_posts: u64,
    pub counts: CellCounts,
    pub pct_disclosed: Option<f64>,
    pub pct_green: Option<f64>,
    pub pct_yellow: Option<f64>,
    pub pct_am: Option<f64>,
    pub pct_green_am: Option<f64>,
    pub pct_yellow_am: Option<f64>,
    pub pct_undisclosed_am: Option<f64>,
}

impl CellStats {
    fn from_counts(platform: Platform, language: Language, c: CellCounts) -> Self {
        let n = c.n_posts;
        CellStats {
            platform,
            language,
            n_posts: n,
            counts: c,
            pct_disclosed: percent(c.disclosed(), n),
            pct_green: percent(c.green, n),
            pct_yellow: percent(c.yellow, n),
            pct_am: percent(c.am, n),
            pct_green_am: percent(c.green_am, n),
            pct_yellow_am: percent(c.yellow_am, n),
            pct_undisclosed_am: percent(c.undisclosed_am, n),
        }
    }
}

/// Six cells, platforms outer and languages inner.
pub fn platform_language_table(posts: &[ClassifiedPost]) -> Vec<CellStats> {
    let counts = count_by(posts, |p| (p.platform, p.language));
    Platform::ALL
        .iter()
        .flat_map(|&platform| Language::ANALYZED.iter().map(move |&language| (platform, language)))
        .map(|key| CellStats::from_counts(key.0, key.1, counts.get(&key).copied().unwrap_or_default()))
        .collect()
}

/// One Table 2 column. Disclosure shares divide by all disclosed posts of the
/// platform; AM shares divide by all AM posts of the platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeTableRow {
    pub platform: Platform,
    pub size: SizeClass,
    /// Accounts with at least one analyzable post.
    pub n_influencers: usize,
    pub counts: CellCounts,
    pub platform_disclosed: u64,
    pub platform_am: u64,
    pub share_green_of_disclosed: Option<f64>,
    pub share_yellow_of_disclosed: Option<f64>,
    pub share_green_am_of_am: Option<f64>,
    pub share_yellow_am_of_am: Option<f64>,
    pub share_undisclosed_am_of_am: Option<f64>,
}

/// Nine rows, platforms outer and sizes inner.
pub fn size_distribution_table(posts: &[ClassifiedPost]) -> Vec<SizeTableRow> {
    let counts = count_by(posts, |p| (p.platform, p.size));
    let mut influencers: BTreeMap<(Platform, SizeClass), BTreeSet<&str>> = BTreeMap::new();
    for p in posts {
        influencers.entry((p.platform, p.size)).or_default().insert(&p.account_id);
    }
    let mut rows = Vec::with_capacity(9);
    for platform in Platform::ALL {
        let total = SizeClass::ALL
            .iter()
            .filter_map(|s| counts.get(&(platform, *s)))
            .fold(CellCounts::default(), |a, b| a.merge(*b));
        let disclosed = total.disclosed();
        for size in SizeClass::ALL {
            let c = counts.get(&(platform, size)).copied().unwrap_or_default();
            rows.push(SizeTableRow {
                platform,
                size,
                n_influencers: influencers.get(&(platform, size)).map_or(0, BTreeSet::len),
                counts: c,
                platform_disclosed: disclosed,
                platform_am: total.am,
                share_green_of_disclosed: percent(c.green, disclosed),
                share_yellow_of_disclosed: percent(c.yellow, disclosed),
                share_green_am_of_am: percent(c.green_am, total.am),
                share_yellow_am_of_am: percent(c.yellow_am, total.am),
                share_undisclosed_am_of_am: percent(c.undisclosed_am, total.am),
            });
        }
    }
    rows
}

/// Per-platform sums of the Table 2 share blocks. Each is 100 (up to float
/// rounding) whenever the platform has disclosed or AM posts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareBlockSums {
    pub platform: Platform,
    pub disclosure_share_sum: Option<f64>,
    pub am_share_sum: Option<f64>,
}

pub fn table2_block_sums(rows: &[SizeTableRow]) -> Vec<ShareBlockSums> {
    Platform::ALL
        .iter()
        .map(|&platform| {
            let block: Vec<&SizeTableRow> = rows.iter().filter(|r| r.platform == platform).collect();
            let sum = |f: &dyn Fn(&SizeTableRow) -> Option<f64>| -> Option<f64> {
                block.iter().map(|r| f(r)).sum::<Option<f64>>()
            };
            ShareBlockSums {
                platform,
                disclosure_share_sum: sum(&|r| Some(r.share_green_of_disclosed? + r.share_yellow_of_disclosed?)),
                am_share_sum: sum(&|r| {
                    Some(r.share_green_am_of_am? + r.share_yellow_am_of_am? + r.share_undisclosed_am_of_am?)
                }),
            }
        })
        .collect()
}

/// Green plus yellow posts as a percentage of all analyzable posts.
pub fn overall_disclosure_rate(posts: &[ClassifiedPost]) -> Option<f64> {
    let disclosed = posts.iter().filter(|p| p.class.is_disclosed()).count() as u64;
    percent(disclosed, posts.len() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopAmEntry {
    pub platform: Platform,
    /// 1-based.
    pub rank: usize,
    pub account_id: String,
    pub size: SizeClass,
    pub disclosed_am: u64,
    pub total_am: u64,
    /// Percent of all disclosed AM posts on the platform.
    pub share_of_platform_disclosed_am: f64,
    /// Fraction in `[0, 1]` of the account's own AM posts that are disclosed.
    pub own_am_disclosure_rate: f64,
}

/// Up to `k` accounts per platform with the most disclosed AM posts, ties
/// broken by account id. Accounts without disclosed AM are not ranked.
pub fn top_am_disclosers(posts: &[ClassifiedPost], k: usize) -> Vec<TopAmEntry> {
    #[derive(Default)]
    struct Tally {
        disclosed: u64,
        total: u64,
        size: Option<SizeClass>,
    }
    let mut tallies: BTreeMap<(Platform, &str), Tally> = BTreeMap::new();
    for p in posts.iter().filter(|p| p.is_am()) {
        let t = tallies.entry((p.platform, &p.account_id)).or_default();
        t.total += 1;
        t.size = Some(p.size);
        if matches!(p.am, AmDisclosure::GreenDisclosedAM | AmDisclosure::YellowDisclosedAM) {
            t.disclosed += 1;
        }
    }
    let mut out = Vec::new();
    for platform in Platform::ALL {
        let mut ranked: Vec<(&str, &Tally)> = tallies
            .iter()
            .filter(|((p, _), t)| *p == platform && t.disclosed > 0)
            .map(|((_, id), t)| (*id, t))
            .collect();
        let platform_disclosed: u64 = ranked.iter().map(|(_, t)| t.disclosed).sum();
        ranked.sort_by(|a, b| b.1.disclosed.cmp(&a.1.disclosed).then_with(|| a.0.cmp(b.0)));
        for (i, (id, t)) in ranked.into_iter().take(k).enumerate() {
            out.push(TopAmEntry {
                platform,
                rank: i + 1,
                account_id: id.to_string(),
                size: t.size.expect("tallied accounts have a size"),
                disclosed_am: t.disclosed,
                total_am: t.total,
                share_of_platform_disclosed_am: 100.0 * t.disclosed as f64 / platform_disclosed as f64,
                own_am_disclosure_rate: t.disclosed as f64 / t.total as f64,
            });
        }
    }
    out
}

/// Instagram disclosure composition for one language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Composition {
    pub language: Language,
    pub n_disclosed: u64,
    pub green_words_position: u64,
    pub green_toggle: u64,
    pub green_toggle_words_position: u64,
    pub yellow: u64,
    /// Shares of all disclosed posts, in percent.
    pub share_green_words_position: Option<f64>,
    pub share_green_toggle: Option<f64>,
    pub share_green_toggle_words_position: Option<f64>,
    pub share_yellow: Option<f64>,
    /// Shares recomputed without toggle-only posts, for text-only comparison.
    pub text_only_share_green_words_position: Option<f64>,
    pub text_only_share_green_toggle_words_position: Option<f64>,
    pub text_only_share_yellow: Option<f64>,
}

pub fn instagram_composition(posts: &[ClassifiedPost]) -> Vec<Composition> {
    Language::ANALYZED
        .iter()
        .map(|&language| {
            let mut counts: BTreeMap<DisclosureClass, u64> = BTreeMap::new();
            for p in posts
                .iter()
                .filter(|p| p.platform == Platform::Instagram && p.language == language)
            {
                *counts.entry(p.class).or_default() += 1;
            }
            let get = |c| counts.get(&c).copied().unwrap_or(0);
            let words = get(DisclosureClass::GreenWordsPosition);
            let toggle = get(DisclosureClass::GreenToggle);
            let both = get(DisclosureClass::GreenToggleWordsPosition);
            let yellow = get(DisclosureClass::Yellow);
            let n = words + toggle + both + yellow;
            let text_n = n - toggle;
            Composition {
                language,
                n_disclosed: n,
                green_words_position: words,
                green_toggle: toggle,
                green_toggle_words_position: both,
                yellow,
                share_green_words_position: percent(words, n),
                share_green_toggle: percent(toggle, n),
                share_green_toggle_words_position: percent(both, n),
                share_yellow: percent(yellow, n),
                text_only_share_green_words_position: percent(words, text_n),
                text_only_share_green_toggle_words_position: percent(both, text_n),
                text_only_share_yellow: percent(yellow, text_n),
            }
        })
        .collect()
}

/// Where the first disclosure word of an AM post sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PositionCategory {
    /// No disclosure word and no toggle.
    Undisclosed,
    FirstFive,
    AfterFifth,
    /// Toggle set, no disclosure word in the text.
    ToggleOnly,
}

impl PositionCategory {
    pub const ALL: [PositionCategory; 4] = [
        PositionCategory::Undisclosed,
        PositionCategory::FirstFive,
        PositionCategory::AfterFifth,
        PositionCategory::ToggleOnly,
    ];

    pub fn of(post: &ClassifiedPost) -> PositionCategory {
        match post.first_position {
            Some(i) if i <= POSITION_LIMIT => PositionCategory::FirstFive,
            Some(_) => PositionCategory::AfterFifth,
            None if post.class.is_disclosed() => PositionCategory::ToggleOnly,
            None => PositionCategory::Undisclosed,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PositionCategory::Undisclosed => "undisclosed",
            PositionCategory::FirstFive => "word_in_first_five",
            PositionCategory::AfterFifth => "word_after_fifth",
            PositionCategory::ToggleOnly => "toggle_only",
        }
    }
}

/// Engagement of AM posts z-scored within each platform, in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmEngagement {
    /// Index into the input slice for every AM post.
    pub post_index: Vec<usize>,
    pub z: Vec<f64>,
    pub per_platform: BTreeMap<Platform, ZScoreSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreSummary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub degenerate: bool,
}

/// Z-score each platform's values independently.
pub fn zscore_by_platform(groups: &BTreeMap<Platform, Vec<f64>>) -> BTreeMap<Platform, ZScored> {
    groups.iter().map(|(p, v)| (*p, zscore(v))).collect()
}

pub fn am_engagement(posts: &[ClassifiedPost]) -> AmEngagement {
    let mut groups: BTreeMap<Platform, Vec<f64>> = BTreeMap::new();
    let mut members: BTreeMap<Platform, Vec<usize>> = BTreeMap::new();
    for (i, p) in posts.iter().enumerate().filter(|(_, p)| p.is_am()) {
        groups.entry(p.platform).or_default().push(p.engagement as f64);
        members.entry(p.platform).or_default().push(i);
    }
    let scored = zscore_by_platform(&groups);
    let mut pairs: Vec<(usize, f64)> = Vec::new();
    let mut per_platform = BTreeMap::new();
    for (platform, z) in &scored {
        if z.degenerate {
            log::warn!("{platform}: AM engagement has zero spread; z-scores set to 0");
        }
        pairs.extend(members[platform].iter().copied().zip(z.values.iter().copied()));
        per_platform.insert(
            *platform,
            ZScoreSummary {
                n: z.values.len(),
                mean: z.mean,
                std: z.std,
                degenerate: z.degenerate,
            },
        );
    }
    pairs.sort_by_key(|(i, _)| *i);
    let (post_index, z) = pairs.into_iter().unzip();
    AmEngagement {
        post_index,
        z,
        per_platform,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionGroup {
    pub platform: Platform,
    pub size: SizeClass,
    pub category: PositionCategory,
    pub stats: BoxStats,
}

/// Box statistics of z-scored AM engagement per (platform, size, position
/// category). Every combination is present; empty groups have `n = 0`.
pub fn position_engagement_groups(posts: &[ClassifiedPost], engagement: &AmEngagement) -> Vec<PositionGroup> {
    let mut values: BTreeMap<(Platform, SizeClass, PositionCategory), Vec<f64>> = BTreeMap::new();
    for (&i, &z) in engagement.post_index.iter().zip(&engagement.z) {
        let p = &posts[i];
        values
            .entry((p.platform, p.size, PositionCategory::of(p)))
            .or_default()
            .push(z);
    }
    let mut out = Vec::new();
    for platform in Platform::ALL {
        for size in SizeClass::ALL {
            for category in PositionCategory::ALL {
                let v = values.get(&(platform, size, category)).map(Vec::as_slice).unwrap_or(&[]);
                out.push(PositionGroup {
                    platform,
                    size,
                    category,
                    stats: BoxStats::from_values(v),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionGroup {
    pub size: SizeClass,
    pub class: DisclosureClass,
    pub stats: BoxStats,
}

/// Box statistics of z-scored engagement for Instagram AM posts per (size,
/// disclosure class). Every combination is present.
pub fn composition_engagement_groups(posts: &[ClassifiedPost], engagement: &AmEngagement) -> Vec<CompositionGroup> {
    let mut values: BTreeMap<(SizeClass, DisclosureClass), Vec<f64>> = BTreeMap::new();
    for (&i, &z) in engagement.post_index.iter().zip(&engagement.z) {
        let p = &posts[i];
        if p.platform == Platform::Instagram {
            values.entry((p.size, p.class)).or_default().push(z);
        }
    }
    let mut out = Vec::new();
    for size in SizeClass::ALL {
        for class in DisclosureClass::ALL {
            let v = values.get(&(size, class)).map(Vec::as_slice).unwrap_or(&[]);
            out.push(CompositionGroup {
                size,
                class,
                stats: BoxStats::from_values(v),
            });
        }
    }
    out
}
