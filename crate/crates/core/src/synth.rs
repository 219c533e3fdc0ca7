//! Seeded synthetic corpora with planted ground truth.
//!
//! A [`SynthSpec`] lists cells keyed by platform, language and size class.
//! Each cell fixes its account count, posts per account, disclosure and
//! affiliate-marketing rates, and an engagement distribution. Rates become
//! exact counts (`round(rate * posts)`) that are dealt to the cell's posts in
//! shuffled order, so the analyzer should recover them exactly.
//!
//! Post text is a window of ordinary filler words with lexicon terms written
//! in at chosen token positions. Filler never contains a lexicon word, planted
//! terms never touch each other, and every text is checked against the
//! bundled language detector so the cell language survives detection.
//!
//! Spec format (TOML):
//!
//! ```toml
//! seed = 7
//! start = "2023-01-01T00:00:00Z"   # optional
//! span_days = 365                   # optional
//!
//! [[cell]]
//! platform = "instagram"
//! language = "en"
//! size = "micro"
//! accounts = 20
//! posts_per_account = [40, 60]
//! green = 0.01039          # fractions of the cell's posts
//! yellow = 0.01794
//! am = 0.02841
//! green_am = 0.00076
//! yellow_am = 0.00164      # undisclosed AM is the remainder
//! toggle = 0.5             # Instagram only: share of green posts with the toggle
//! toggle_words = 0.2       # share of those that also carry an early green term
//! late_green = 0.1         # share of yellow posts that are a green term after word five
//! engagement_mu = 6.0
//! engagement_sigma = 1.0
//! disclosed_am_shift = 0.0 # added to mu for green or yellow disclosed AM
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytics::SizeClass;
use crate::corpus::{Account, Corpus, Language, Platform, Post};
use crate::langid::{Detection, LanguageIdentifier, TrigramDetector};
use crate::rules::lexicon::{Lexicon, Term};
use crate::rules::tokenize::normalize_word;
use crate::rules::{AmDisclosure, DisclosureClass, POSITION_LIMIT};

const FILLER_EN: &str = include_str!("../data/langid/train.en.txt");
const FILLER_NL: &str = include_str!("../data/langid/train.nl.txt");

/// Attempts at drawing filler that the detector assigns to the cell language.
const MAX_TEXT_ATTEMPTS: usize = 50;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid synth spec: {0}")]
    Spec(String),
    #[error("infeasible cell {cell}: {reason}")]
    Infeasible { cell: String, reason: String },
}

fn de_from_str<'de, D, T>(d: D) -> Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr<Err = String>,
{
    let raw = String::deserialize(d)?;
    raw.parse().map_err(|v| serde::de::Error::custom(format!("unknown value `{v}`")))
}

fn ser_display<S: Serializer, T: fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn default_start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap()
}

fn default_span() -> u32 {
    365
}

fn default_mu() -> f64 {
    6.0
}

fn default_sigma() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    #[serde(default = "default_start")]
    pub start: DateTime<Utc>,
    #[serde(default = "default_span")]
    pub span_days: u32,
    #[serde(rename = "cell", default)]
    pub cells: Vec<CellSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    #[serde(deserialize_with = "de_from_str", serialize_with = "ser_display")]
    pub platform: Platform,
    #[serde(deserialize_with = "de_from_str", serialize_with = "ser_display")]
    pub language: Language,
    #[serde(deserialize_with = "de_from_str", serialize_with = "ser_display")]
    pub size: SizeClass,
    pub accounts: u32,
    pub posts_per_account: (u32, u32),
    #[serde(default)]
    pub green: f64,
    #[serde(default)]
    pub yellow: f64,
    #[serde(default)]
    pub am: f64,
    #[serde(default)]
    pub green_am: f64,
    #[serde(default)]
    pub yellow_am: f64,
    #[serde(default)]
    pub toggle: f64,
    #[serde(default)]
    pub toggle_words: f64,
    #[serde(default)]
    pub late_green: f64,
    #[serde(default = "default_mu")]
    pub engagement_mu: f64,
    #[serde(default = "default_sigma")]
    pub engagement_sigma: f64,
    #[serde(default)]
    pub disclosed_am_shift: f64,
}

impl CellSpec {
    pub fn key(&self) -> String {
        format!("{}_{}_{}", platform_code(self.platform), self.language.code(), size_code(self.size))
    }
}

fn platform_code(p: Platform) -> &'static str {
    match p {
        Platform::Instagram => "ig",
        Platform::YouTube => "yt",
        Platform::TikTok => "tt",
    }
}

fn size_code(s: SizeClass) -> &'static str {
    match s {
        SizeClass::Micro => "micro",
        SizeClass::Macro => "macro",
        SizeClass::Mega => "mega",
    }
}

pub fn parse_spec(source: &str) -> Result<SynthSpec, SynthError> {
    toml::from_str(source).map_err(|e| SynthError::Spec(e.to_string()))
}

pub fn load_spec(path: &Path) -> Result<SynthSpec, SynthError> {
    let source = std::fs::read_to_string(path).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_spec(&source)
}

/// What the generator intended for one post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedPost {
    pub post_id: String,
    pub account_id: String,
    pub platform: Platform,
    pub language: Language,
    pub size: SizeClass,
    pub class: DisclosureClass,
    pub is_am: bool,
    pub am_disclosure: AmDisclosure,
    /// The disclosure term written into the text, if any.
    pub term: Option<String>,
    /// 1-based token index of the first word of `term`.
    pub position: Option<usize>,
    pub am_rule: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// In corpus post order.
    pub posts: Vec<PlantedPost>,
}

impl GroundTruth {
    /// Rows for a language-label override file.
    pub fn language_labels(&self) -> impl Iterator<Item = (String, Detection)> + '_ {
        self.posts.iter().map(|p| {
            (
                p.post_id.clone(),
                Detection {
                    language: p.language,
                    confidence: 1.0,
                },
            )
        })
    }
}

pub fn write_ground_truth(path: &Path, truth: &GroundTruth) -> Result<(), SynthError> {
    let io_err = |source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = String::new();
    for p in &truth.posts {
        out.push_str(&serde_json::to_string(p).expect("planted post serializes"));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(io_err)
}

pub fn read_ground_truth(path: &Path) -> Result<GroundTruth, SynthError> {
    let source = std::fs::read_to_string(path).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let posts = source
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| SynthError::Spec(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect::<Result<_, _>>()?;
    Ok(GroundTruth { posts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Plant {
    GreenWords,
    Toggle,
    ToggleWords,
    YellowTerm,
    LateGreen,
    Plain,
}

impl Plant {
    fn class(self) -> DisclosureClass {
        match self {
            Plant::GreenWords => DisclosureClass::GreenWordsPosition,
            Plant::Toggle => DisclosureClass::GreenToggle,
            Plant::ToggleWords => DisclosureClass::GreenToggleWordsPosition,
            Plant::YellowTerm | Plant::LateGreen => DisclosureClass::Yellow,
            Plant::Plain => DisclosureClass::None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    plant: Plant,
    am: bool,
}

/// Exact per-cell counts derived from the rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellPlan {
    pub n_posts: u64,
    pub green_words: u64,
    pub toggle_only: u64,
    pub toggle_words: u64,
    pub yellow_term: u64,
    pub late_green: u64,
    pub green_am: u64,
    pub yellow_am: u64,
    pub undisclosed_am: u64,
}

impl CellPlan {
    pub fn green(&self) -> u64 {
        self.green_words + self.toggle_only + self.toggle_words
    }

    pub fn yellow(&self) -> u64 {
        self.yellow_term + self.late_green
    }

    pub fn am(&self) -> u64 {
        self.green_am + self.yellow_am + self.undisclosed_am
    }
}

fn count(rate: f64, n: u64) -> u64 {
    (rate * n as f64).round() as u64
}

/// Turn a cell's rates into counts for `n_posts` posts.
pub fn plan_cell(cell: &CellSpec, n_posts: u64) -> Result<CellPlan, SynthError> {
    let infeasible = |reason: String| SynthError::Infeasible {
        cell: cell.key(),
        reason,
    };
    let rates = [
        ("green", cell.green),
        ("yellow", cell.yellow),
        ("am", cell.am),
        ("green_am", cell.green_am),
        ("yellow_am", cell.yellow_am),
        ("toggle", cell.toggle),
        ("toggle_words", cell.toggle_words),
        ("late_green", cell.late_green),
    ];
    for (name, r) in rates {
        if !(0.0..=1.0).contains(&r) {
            return Err(infeasible(format!("{name} = {r} is outside [0, 1]")));
        }
    }
    if cell.green + cell.yellow > 1.0 {
        return Err(infeasible("green + yellow exceeds 1".into()));
    }
    if cell.platform != Platform::Instagram && cell.toggle > 0.0 {
        return Err(infeasible("toggle is only available on Instagram".into()));
    }
    let green = count(cell.green, n_posts);
    let yellow = count(cell.yellow, n_posts);
    let am = count(cell.am, n_posts);
    let green_am = count(cell.green_am, n_posts);
    let yellow_am = count(cell.yellow_am, n_posts);
    if green_am > green {
        return Err(infeasible(format!("{green_am} green AM posts but only {green} green posts")));
    }
    if yellow_am > yellow {
        return Err(infeasible(format!("{yellow_am} yellow AM posts but only {yellow} yellow posts")));
    }
    if green_am + yellow_am > am {
        return Err(infeasible(format!("disclosed AM ({}) exceeds AM ({am})", green_am + yellow_am)));
    }
    let undisclosed_am = am - green_am - yellow_am;
    let none = n_posts - green - yellow;
    if undisclosed_am > none {
        return Err(infeasible(format!("{undisclosed_am} undisclosed AM posts but only {none} undisclosed posts")));
    }
    let toggled = count(cell.toggle, green);
    let toggle_words = count(cell.toggle_words, toggled);
    let late_green = count(cell.late_green, yellow);
    Ok(CellPlan {
        n_posts,
        green_words: green - toggled,
        toggle_only: toggled - toggle_words,
        toggle_words,
        yellow_term: yellow - late_green,
        late_green,
        green_am,
        yellow_am,
        undisclosed_am,
    })
}

/// Deterministic generator for a labelled stream.
fn seeded_rng(seed: u64, label: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

fn build_slots(plan: &CellPlan, rng: &mut ChaCha8Rng) -> Vec<Slot> {
    fn segment(parts: &[(Plant, u64)], n_am: u64, rng: &mut ChaCha8Rng) -> Vec<Slot> {
        let mut seg: Vec<Slot> = parts
            .iter()
            .flat_map(|&(plant, n)| std::iter::repeat_n(Slot { plant, am: false }, n as usize))
            .collect();
        seg.shuffle(rng);
        for s in seg.iter_mut().take(n_am as usize) {
            s.am = true;
        }
        seg
    }
    let none = plan.n_posts - plan.green() - plan.yellow();
    let mut slots = segment(
        &[
            (Plant::GreenWords, plan.green_words),
            (Plant::Toggle, plan.toggle_only),
            (Plant::ToggleWords, plan.toggle_words),
        ],
        plan.green_am,
        rng,
    );
    slots.extend(segment(
        &[(Plant::YellowTerm, plan.yellow_term), (Plant::LateGreen, plan.late_green)],
        plan.yellow_am,
        rng,
    ));
    slots.extend(segment(&[(Plant::Plain, none)], plan.undisclosed_am, rng));
    slots.shuffle(rng);
    slots
}

fn follower_range(size: SizeClass) -> (u64, u64) {
    match size {
        SizeClass::Micro => (1_000, 499_999),
        SizeClass::Macro => (500_000, 999_999),
        SizeClass::Mega => (1_000_000, 20_000_000),
    }
}

fn length_range(platform: Platform) -> (usize, usize) {
    match platform {
        Platform::Instagram => (12, 30),
        Platform::YouTube => (20, 60),
        Platform::TikTok => (12, 20),
    }
}

/// Filler word streams and plantable terms, built once per run.
struct Material {
    filler: BTreeMap<Language, Vec<String>>,
    green: BTreeMap<Language, Vec<Term>>,
    yellow: BTreeMap<Language, Vec<Term>>,
    /// Per rule, per set: terms usable for planting.
    am: Vec<(String, Vec<Vec<Term>>)>,
}

impl Material {
    fn new(lexicon: &Lexicon) -> Self {
        let vocab = lexicon.vocabulary();
        let stream = |text: &str| -> Vec<String> {
            text.split_whitespace()
                .filter_map(normalize_word)
                .filter(|w| w.chars().all(char::is_alphabetic) && !vocab.contains(w))
                .collect()
        };
        let filler = BTreeMap::from([
            (Language::English, stream(FILLER_EN)),
            (Language::Dutch, stream(FILLER_NL)),
        ]);
        let mut green = BTreeMap::new();
        let mut yellow = BTreeMap::new();
        let mut disclosure_words = BTreeSet::new();
        for lang in Language::ANALYZED {
            green.insert(lang, lexicon.green(lang).iter().cloned().collect::<Vec<_>>());
            yellow.insert(lang, lexicon.yellow(lang).iter().cloned().collect::<Vec<_>>());
            for t in lexicon.green(lang).iter().chain(lexicon.yellow(lang).iter()) {
                disclosure_words.extend(t.words().iter().cloned());
            }
        }
        // AM terms that double as disclosure words would change the class.
        let am = lexicon
            .am_rules
            .iter()
            .map(|r| {
                let sets: Vec<Vec<Term>> = r
                    .term_sets
                    .iter()
                    .map(|s| {
                        s.iter()
                            .filter(|t| t.words().iter().all(|w| !disclosure_words.contains(w)))
                            .cloned()
                            .collect()
                    })
                    .collect();
                (r.name.clone(), sets)
            })
            .filter(|(_, sets)| sets.iter().all(|s| !s.is_empty()))
            .collect();
        Material {
            filler,
            green,
            yellow,
            am,
        }
    }

    fn check(&self, cell: &CellSpec, plan: &CellPlan) -> Result<(), SynthError> {
        let infeasible = |reason: &str| SynthError::Infeasible {
            cell: cell.key(),
            reason: reason.into(),
        };
        if !cell.language.is_analyzed() {
            return Err(infeasible("language must be en or nl"));
        }
        let needs_green = plan.green_words + plan.toggle_words + plan.late_green > 0;
        if needs_green && self.green[&cell.language].is_empty() {
            return Err(infeasible("green posts requested but the lexicon has no green terms"));
        }
        if plan.yellow_term > 0 && self.yellow[&cell.language].is_empty() {
            return Err(infeasible("yellow posts requested but the lexicon has no yellow terms"));
        }
        if plan.am() > 0 && self.am.is_empty() {
            return Err(infeasible("AM posts requested but no AM rule can be planted"));
        }
        let max_term = self.green[&cell.language]
            .iter()
            .chain(&self.yellow[&cell.language])
            .map(|t| t.words().len())
            .max()
            .unwrap_or(0);
        if max_term > POSITION_LIMIT {
            return Err(infeasible("disclosure terms longer than five words cannot be planted"));
        }
        Ok(())
    }
}

struct PlantedText {
    text: String,
    term: Option<String>,
    position: Option<usize>,
    am_rule: Option<String>,
}

/// Lay out `len` tokens with a disclosure term at `position` and AM terms at
/// free, non-adjacent positions, then fill the rest from `filler`.
fn compose(
    len: usize,
    disclosure: Option<(&Term, usize)>,
    am_terms: &[&Term],
    filler: &[String],
    hashtag: bool,
    rng: &mut ChaCha8Rng,
) -> Option<String> {
    let mut slots: Vec<Option<String>> = vec![None; len];
    if let Some((term, position)) = disclosure {
        let tag = hashtag && term.words().len() == 1;
        for (k, w) in term.words().iter().enumerate() {
            slots[position - 1 + k] = Some(if tag { format!("#{w}") } else { w.clone() });
        }
    }
    for term in am_terms {
        let width = term.words().len();
        let free: Vec<usize> = (0..=len.saturating_sub(width))
            .filter(|&s| {
                let lo = s.saturating_sub(1);
                let hi = (s + width).min(len - 1);
                slots[lo..=hi].iter().all(Option::is_none)
            })
            .collect();
        let &start = free.choose(rng)?;
        for (k, w) in term.words().iter().enumerate() {
            slots[start + k] = Some(w.clone());
        }
    }
    let offset = rng.random_range(0..filler.len());
    let mut words = filler.iter().cycle().skip(offset);
    let mut tokens: Vec<String> = slots
        .into_iter()
        .map(|s| s.unwrap_or_else(|| words.next().expect("cycled filler").clone()))
        .collect();
    if let Some(first) = tokens.first_mut() {
        if !first.starts_with('#') {
            let mut c = first.chars();
            if let Some(h) = c.next() {
                *first = h.to_uppercase().chain(c).collect();
            }
        }
    }
    if let Some(last) = tokens.last_mut() {
        last.push('.');
    }
    Some(tokens.join(" "))
}

fn plant_text(
    cell: &CellSpec,
    slot: Slot,
    material: &Material,
    detector: &TrigramDetector,
    rng: &mut ChaCha8Rng,
) -> Result<PlantedText, SynthError> {
    let (lo, hi) = length_range(cell.platform);
    let lang = cell.language;
    let term = match slot.plant {
        Plant::GreenWords | Plant::ToggleWords | Plant::LateGreen => material.green[&lang].choose(rng),
        Plant::YellowTerm => material.yellow[&lang].choose(rng),
        Plant::Toggle | Plant::Plain => None,
    };
    let am = slot.am.then(|| {
        let (name, sets) = material.am.choose(rng).expect("checked non-empty");
        let terms: Vec<&Term> = sets.iter().map(|s| s.choose(rng).expect("checked non-empty")).collect();
        (name.clone(), terms)
    });
    let hashtag = rng.random_bool(0.5);
    for _ in 0..MAX_TEXT_ATTEMPTS {
        let len = rng.random_range(lo..=hi);
        let position = term.map(|t| {
            let last_start = len - t.words().len() + 1;
            match slot.plant {
                Plant::LateGreen => rng.random_range(POSITION_LIMIT + 1..=last_start),
                Plant::YellowTerm => rng.random_range(1..=last_start),
                _ => rng.random_range(1..=POSITION_LIMIT.min(last_start)),
            }
        });
        let am_terms = am.as_ref().map(|(_, t)| t.as_slice()).unwrap_or(&[]);
        let Some(text) = compose(
            len,
            term.zip(position),
            am_terms,
            &material.filler[&lang],
            hashtag,
            rng,
        ) else {
            continue;
        };
        if detector.detect(&text).language == lang {
            return Ok(PlantedText {
                text,
                term: term.map(Term::text),
                position,
                am_rule: am.map(|(n, _)| n),
            });
        }
    }
    Err(SynthError::Infeasible {
        cell: cell.key(),
        reason: format!("no text recognized as {lang} after {MAX_TEXT_ATTEMPTS} attempts"),
    })
}

struct AccountJob<'a> {
    cell: &'a CellSpec,
    id: String,
    slots: Vec<Slot>,
}

fn generate_account(
    spec: &SynthSpec,
    job: &AccountJob<'_>,
    material: &Material,
    detector: &TrigramDetector,
) -> Result<(Account, Vec<(Post, PlantedPost)>), SynthError> {
    let cell = job.cell;
    let mut rng = seeded_rng(spec.seed, &job.id);
    let (flo, fhi) = follower_range(cell.size);
    let account = Account {
        id: job.id.clone(),
        handle: job.id.clone(),
        platform: cell.platform,
        followers: rng.random_range(flo..=fhi),
        is_influencer: true,
    };
    let lognormal = |mu: f64| {
        LogNormal::new(mu, cell.engagement_sigma).map_err(|e| SynthError::Infeasible {
            cell: cell.key(),
            reason: format!("engagement distribution: {e}"),
        })
    };
    let base = lognormal(cell.engagement_mu)?;
    let shifted = lognormal(cell.engagement_mu + cell.disclosed_am_shift)?;
    let span = i64::from(spec.span_days.max(1)) * 86_400;
    let mut rows = Vec::with_capacity(job.slots.len());
    for slot in &job.slots {
        let planted = plant_text(cell, *slot, material, detector, &mut rng)?;
        let class = slot.plant.class();
        let disclosed_am = slot.am && class.is_disclosed();
        let dist = if disclosed_am { &shifted } else { &base };
        let engagement = dist.sample(&mut rng).round().min(1e15) as u64;
        let comment_share: f64 = rng.random_range(0.01..0.1);
        let comments = (engagement as f64 * comment_share).round() as u64;
        let timestamp = spec.start + Duration::seconds(rng.random_range(0..span));
        let toggle = (cell.platform == Platform::Instagram)
            .then_some(matches!(slot.plant, Plant::Toggle | Plant::ToggleWords));
        let am_disclosure = match (slot.am, class) {
            (false, _) => AmDisclosure::NotAM,
            (true, DisclosureClass::None) => AmDisclosure::UndisclosedAM,
            (true, DisclosureClass::Yellow) => AmDisclosure::YellowDisclosedAM,
            (true, _) => AmDisclosure::GreenDisclosedAM,
        };
        let post = Post {
            id: String::new(),
            account_id: job.id.clone(),
            platform: cell.platform,
            timestamp,
            text: planted.text,
            likes: engagement - comments,
            comments,
            toggle,
            language: None,
        };
        let truth = PlantedPost {
            post_id: String::new(),
            account_id: job.id.clone(),
            platform: cell.platform,
            language: cell.language,
            size: cell.size,
            class,
            is_am: slot.am,
            am_disclosure,
            term: planted.term,
            position: planted.position,
            am_rule: planted.am_rule,
        };
        rows.push((post, truth));
    }
    rows.sort_by_key(|(p, _)| p.timestamp);
    for (seq, (post, truth)) in rows.iter_mut().enumerate() {
        post.id = format!("{}-{:05}", job.id, seq + 1);
        truth.post_id = post.id.clone();
    }
    Ok((account, rows))
}

/// Generate the corpus described by `spec`, planting terms from `lexicon`.
///
/// Output is ordered by account id, then timestamp, and is identical for
/// identical inputs regardless of the rayon pool size.
pub fn generate_corpus(spec: &SynthSpec, lexicon: &Lexicon) -> Result<(Corpus, GroundTruth), SynthError> {
    let material = Material::new(lexicon);
    let detector = TrigramDetector::bundled();
    let mut seen = BTreeSet::new();
    let mut jobs = Vec::new();
    for cell in &spec.cells {
        let key = cell.key();
        if !seen.insert(key.clone()) {
            return Err(SynthError::Spec(format!("cell {key} is listed twice")));
        }
        let (lo, hi) = cell.posts_per_account;
        if lo > hi {
            return Err(SynthError::Spec(format!("cell {key}: posts_per_account [{lo}, {hi}] is empty")));
        }
        let mut rng = seeded_rng(spec.seed, &format!("cell/{key}"));
        let per_account: Vec<u32> = (0..cell.accounts).map(|_| rng.random_range(lo..=hi)).collect();
        let n: u64 = per_account.iter().map(|&c| u64::from(c)).sum();
        let plan = plan_cell(cell, n)?;
        material.check(cell, &plan)?;
        let mut slots = build_slots(&plan, &mut rng).into_iter();
        for (i, c) in per_account.into_iter().enumerate() {
            jobs.push(AccountJob {
                cell,
                id: format!("{key}_{:03}", i + 1),
                slots: slots.by_ref().take(c as usize).collect(),
            });
        }
    }
    jobs.sort_by(|a, b| a.id.cmp(&b.id));
    let generated: Vec<(Account, Vec<(Post, PlantedPost)>)> = jobs
        .par_iter()
        .map(|job| generate_account(spec, job, &material, detector))
        .collect::<Result<_, _>>()?;
    let mut accounts = Vec::with_capacity(generated.len());
    let mut posts = Vec::new();
    let mut truth = Vec::new();
    for (account, rows) in generated {
        accounts.push(account);
        for (p, t) in rows {
            posts.push(p);
            truth.push(t);
        }
    }
    let corpus = Corpus::new(posts, accounts).map_err(|e| SynthError::Spec(e.to_string()))?;
    Ok((corpus, GroundTruth { posts: truth }))
}
