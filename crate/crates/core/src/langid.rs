//! English/Dutch identification from character trigrams and stopwords.
//!
//! Each profile scores text by the mean log-probability of its character
//! trigrams plus a weighted share of tokens that are profile stopwords.
//! Hashtags, mentions, and URLs are removed first. A post is `Other` when it
//! has fewer than [`MIN_ALPHA_TOKENS`] alphabetic tokens, when the score
//! margin between the two profiles is below [`MIN_MARGIN`], or when even the
//! better profile scores under [`MIN_FIT`] (text in neither language, such
//! as German, otherwise lands on whichever profile is closer).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Language};

pub const MIN_ALPHA_TOKENS: usize = 3;
pub const MIN_MARGIN: f64 = 0.1;
pub const MIN_FIT: f64 = -7.1;
/// Weight of the stopword share relative to the trigram log-likelihood.
pub const STOPWORD_WEIGHT: f64 = 2.0;
/// Margin scale of the confidence curve `1 - exp(-margin / scale)`.
pub const CONFIDENCE_SCALE: f64 = 0.2;

/// Bundled profile file.
pub const BUNDLED_PROFILES: &str = include_str!("../data/langid/profiles.tsv");

#[derive(Debug, Error)]
pub enum LangIdError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("profile data line {line}: {message}")]
    Profile { line: usize, message: String },
    #[error("language labels {path} line {line}: {message}")]
    Labels {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageProfile {
    pub language: Language,
    trigram_weights: HashMap<String, f64>,
    /// Same weights keyed by [`pack_trigram`].
    packed: FxHashMap<u64, f64>,
    unseen_weight: f64,
    stopwords: BTreeSet<String>,
}

/// Lowercased alphabetic words of `text`, without hashtags, mentions, URLs,
/// digits, or punctuation.
pub fn detection_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter(|w| !w.starts_with(['#', '@']) && !w.contains("://") && !w.to_lowercase().starts_with("www."))
        .map(|w| w.to_lowercase().chars().filter(|c| c.is_alphabetic()).collect::<String>())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Character trigrams of a word padded with one space on each side.
pub fn word_trigrams(word: &str) -> impl Iterator<Item = String> + '_ {
    padded_windows(word).map(|w| w.iter().collect())
}

fn padded_windows(word: &str) -> impl Iterator<Item = [char; 3]> {
    let chars: Vec<char> = std::iter::once(' ')
        .chain(word.chars())
        .chain(std::iter::once(' '))
        .collect();
    (0..chars.len().saturating_sub(2)).map(move |i| [chars[i], chars[i + 1], chars[i + 2]])
}

/// A trigram as one integer (21 bits per char).
fn pack_trigram(t: [char; 3]) -> u64 {
    (u64::from(t[0]) << 42) | (u64::from(t[1]) << 21) | u64::from(t[2])
}

fn pack_str(trigram: &str) -> Option<u64> {
    let mut it = trigram.chars();
    let t = [it.next()?, it.next()?, it.next()?];
    it.next().is_none().then(|| pack_trigram(t))
}

impl LanguageProfile {
    /// Build a profile from training text with add-one smoothing.
    pub fn train(language: Language, text: &str, stopwords: impl IntoIterator<Item = String>) -> Self {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for word in detection_words(text) {
            for tri in word_trigrams(&word) {
                *counts.entry(tri).or_default() += 1;
            }
        }
        let total: u64 = counts.values().sum();
        let denom = (total + counts.len() as u64 + 1) as f64;
        let trigram_weights = counts
            .into_iter()
            .map(|(tri, c)| (tri, round6(((c + 1) as f64 / denom).ln())))
            .collect();
        LanguageProfile::new(
            language,
            trigram_weights,
            round6((1.0 / denom).ln()),
            stopwords.into_iter().map(|s| s.to_lowercase()).collect(),
        )
    }

    /// Trigrams other than exactly three characters are ignored.
    pub fn new(
        language: Language,
        trigram_weights: HashMap<String, f64>,
        unseen_weight: f64,
        stopwords: BTreeSet<String>,
    ) -> Self {
        let packed = trigram_weights
            .iter()
            .filter_map(|(t, w)| Some((pack_str(t)?, *w)))
            .collect();
        LanguageProfile {
            language,
            trigram_weights,
            packed,
            unseen_weight,
            stopwords,
        }
    }

    pub fn trigram_weights(&self) -> &HashMap<String, f64> {
        &self.trigram_weights
    }

    /// Log-probability used for trigrams absent from the profile.
    pub fn unseen_weight(&self) -> f64 {
        self.unseen_weight
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    /// Mean trigram log-probability plus weighted stopword share.
    pub fn score(&self, words: &[String]) -> f64 {
        let keys: Vec<u64> = words.iter().flat_map(|w| padded_windows(w)).map(pack_trigram).collect();
        self.score_packed(&keys, words)
    }

    fn score_packed(&self, keys: &[u64], words: &[String]) -> f64 {
        let sum: f64 = keys
            .iter()
            .map(|k| self.packed.get(k).copied().unwrap_or(self.unseen_weight))
            .sum();
        let likelihood = if keys.is_empty() {
            self.unseen_weight
        } else {
            sum / keys.len() as f64
        };
        let hits = words.iter().filter(|w| self.stopwords.contains(w.as_str())).count();
        likelihood + STOPWORD_WEIGHT * hits as f64 / words.len().max(1) as f64
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub language: Language,
    /// In `[0, 1]`; increases with the score margin between the profiles.
    pub confidence: f64,
}

/// Anything that can label text as English, Dutch, or Other.
pub trait LanguageIdentifier: Send + Sync {
    fn detect(&self, text: &str) -> Detection;
    /// Recorded in report metadata.
    fn version(&self) -> &str;
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigramDetector {
    version: String,
    english: LanguageProfile,
    dutch: LanguageProfile,
}

impl TrigramDetector {
    pub fn new(version: impl Into<String>, english: LanguageProfile, dutch: LanguageProfile) -> Self {
        TrigramDetector {
            version: version.into(),
            english,
            dutch,
        }
    }

    pub fn bundled() -> &'static TrigramDetector {
        static BUNDLED: LazyLock<TrigramDetector> =
            LazyLock::new(|| parse_profiles(BUNDLED_PROFILES).expect("bundled profiles are valid"));
        &BUNDLED
    }

    pub fn profiles(&self) -> [&LanguageProfile; 2] {
        [&self.english, &self.dutch]
    }

    /// Serialize in the format read by [`parse_profiles`].
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("# Character-trigram language profiles. Generated by the train_langid example.\n");
        out.push_str(&format!("version\t{}\n", self.version));
        for profile in self.profiles() {
            let code = profile.language.code();
            out.push_str(&format!("unseen\t{code}\t{:.6}\n", profile.unseen_weight));
            for stop in &profile.stopwords {
                out.push_str(&format!("stop\t{code}\t{stop}\n"));
            }
            let sorted: BTreeMap<&String, &f64> = profile.trigram_weights.iter().collect();
            for (tri, w) in sorted {
                out.push_str(&format!("tri\t{code}\t{tri}\t{w:.6}\n"));
            }
        }
        out
    }
}

impl LanguageIdentifier for TrigramDetector {
    fn detect(&self, text: &str) -> Detection {
        let words = detection_words(text);
        if words.len() < MIN_ALPHA_TOKENS {
            return Detection {
                language: Language::Other,
                confidence: 0.0,
            };
        }
        let keys: Vec<u64> = words.iter().flat_map(|w| padded_windows(w)).map(pack_trigram).collect();
        let en = self.english.score_packed(&keys, &words);
        let nl = self.dutch.score_packed(&keys, &words);
        let (top, margin) = if en >= nl {
            (Language::English, en - nl)
        } else {
            (Language::Dutch, nl - en)
        };
        let confidence = 1.0 - (-margin / CONFIDENCE_SCALE).exp();
        let language = if margin < MIN_MARGIN || en.max(nl) < MIN_FIT {
            Language::Other
        } else {
            top
        };
        Detection { language, confidence }
    }

    fn version(&self) -> &str {
        &self.version
    }
}

struct RawProfile {
    trigram_weights: HashMap<String, f64>,
    unseen_weight: f64,
    stopwords: BTreeSet<String>,
}

/// Parse profile data. Lines are tab-separated:
/// `version <v>`, `unseen <lang> <logp>`, `stop <lang> <word>`,
/// `tri <lang> <trigram> <logp>`. `#` starts a comment line.
pub fn parse_profiles(source: &str) -> Result<TrigramDetector, LangIdError> {
    let mut version = None;
    let mut profiles: BTreeMap<Language, RawProfile> = BTreeMap::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| LangIdError::Profile { line: line_no, message };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields[0] == "version" {
            version = Some(fields.get(1).ok_or_else(|| err("missing version".into()))?.to_string());
            continue;
        }
        let language = fields
            .get(1)
            .and_then(|c| c.parse::<Language>().ok())
            .filter(|l| l.is_analyzed())
            .ok_or_else(|| err(format!("bad language in `{line}`")))?;
        let profile = profiles.entry(language).or_insert_with(|| RawProfile {
            trigram_weights: HashMap::new(),
            unseen_weight: f64::NEG_INFINITY,
            stopwords: BTreeSet::new(),
        });
        let parse_weight = |s: Option<&&str>| -> Result<f64, LangIdError> {
            let w: f64 = s
                .ok_or_else(|| err("missing weight".into()))?
                .parse()
                .map_err(|e| err(format!("bad weight: {e}")))?;
            if w.is_finite() {
                Ok(w)
            } else {
                Err(err("weight is not finite".into()))
            }
        };
        match fields[0] {
            "unseen" => profile.unseen_weight = parse_weight(fields.get(2))?,
            "stop" => {
                let word = fields.get(2).ok_or_else(|| err("missing stopword".into()))?;
                profile.stopwords.insert(word.to_string());
            }
            "tri" => {
                let tri = fields.get(2).ok_or_else(|| err("missing trigram".into()))?;
                let w = parse_weight(fields.get(3))?;
                profile.trigram_weights.insert(tri.to_string(), w);
            }
            other => return Err(err(format!("unknown record kind `{other}`"))),
        }
    }
    let version = version.ok_or(LangIdError::Profile {
        line: 0,
        message: "missing version line".into(),
    })?;
    let mut take = |lang: Language| {
        let raw = profiles.remove(&lang).ok_or(LangIdError::Profile {
            line: 0,
            message: format!("no {lang} profile"),
        })?;
        if !raw.unseen_weight.is_finite() {
            return Err(LangIdError::Profile {
                line: 0,
                message: format!("{lang} profile lacks an unseen weight"),
            });
        }
        if let Some(bad) = raw.trigram_weights.keys().find(|t| pack_str(t).is_none()) {
            return Err(LangIdError::Profile {
                line: 0,
                message: format!("{lang} trigram `{bad}` is not three characters"),
            });
        }
        Ok(LanguageProfile::new(lang, raw.trigram_weights, raw.unseen_weight, raw.stopwords))
    };
    let english = take(Language::English)?;
    let dutch = take(Language::Dutch)?;
    if let Some(shared) = english.stopwords.intersection(&dutch.stopwords).next() {
        return Err(LangIdError::Profile {
            line: 0,
            message: format!("stopword `{shared}` appears in both profiles"),
        });
    }
    Ok(TrigramDetector::new(version, english, dutch))
}

/// Version tag of the bundled profiles.
pub const BUNDLED_VERSION: &str = "trigram-stopword-v1";

/// Train the bundled detector from the training text shipped in `data/langid`.
pub fn train_bundled_detector() -> TrigramDetector {
    let words = |s: &str| -> Vec<String> {
        s.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect()
    };
    let english = LanguageProfile::train(
        Language::English,
        include_str!("../data/langid/train.en.txt"),
        words(include_str!("../data/langid/stopwords.en.txt")),
    );
    let dutch = LanguageProfile::train(
        Language::Dutch,
        include_str!("../data/langid/train.nl.txt"),
        words(include_str!("../data/langid/stopwords.nl.txt")),
    );
    TrigramDetector::new(BUNDLED_VERSION, english, dutch)
}

/// Detect with the bundled profiles.
pub fn detect_language(text: &str) -> Detection {
    TrigramDetector::bundled().detect(text)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageSummary {
    pub english: usize,
    pub dutch: usize,
    pub other: usize,
    /// Posts whose language came from an override file.
    pub overridden: usize,
}

impl LanguageSummary {
    pub fn analyzable(&self) -> usize {
        self.english + self.dutch
    }
}

/// Label every post. Ids present in `overrides` take that label instead of
/// running detection.
pub fn assign_languages(
    corpus: Corpus,
    detector: &dyn LanguageIdentifier,
    overrides: Option<&HashMap<String, Language>>,
) -> (Corpus, LanguageSummary) {
    let labels: Vec<(Language, bool)> = corpus
        .posts()
        .par_iter()
        .map(|post| match overrides.and_then(|o| o.get(&post.id)) {
            Some(lang) => (*lang, true),
            None => (detector.detect(&post.text).language, false),
        })
        .collect();
    let mut summary = LanguageSummary::default();
    for (lang, overridden) in &labels {
        match lang {
            Language::English => summary.english += 1,
            Language::Dutch => summary.dutch += 1,
            Language::Other => summary.other += 1,
        }
        summary.overridden += usize::from(*overridden);
    }
    let corpus = corpus.with_languages(labels.into_iter().map(|(l, _)| l).collect());
    (corpus, summary)
}

/// Read a `post_id,language[,confidence]` CSV with a header row.
pub fn read_language_labels(path: &Path) -> Result<HashMap<String, Language>, LangIdError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| LangIdError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e),
        })?;
    let mut out = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let labels_err = |message: String| LangIdError::Labels {
            path: path.to_path_buf(),
            line,
            message,
        };
        let record = record.map_err(|e| labels_err(e.to_string()))?;
        let id = record.get(0).ok_or_else(|| labels_err("missing post_id".into()))?;
        let lang = record
            .get(1)
            .ok_or_else(|| labels_err("missing language".into()))?
            .parse::<Language>()
            .map_err(|v| labels_err(format!("unknown language `{v}`")))?;
        out.insert(id.to_string(), lang);
    }
    Ok(out)
}

/// Write detections as a label file readable by [`read_language_labels`].
pub fn write_language_labels(
    path: &Path,
    rows: impl IntoIterator<Item = (String, Detection)>,
) -> Result<(), LangIdError> {
    let io_err = |e: csv::Error| LangIdError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    };
    let mut writer = csv::Writer::from_path(path).map_err(io_err)?;
    writer.write_record(["post_id", "language", "confidence"]).map_err(io_err)?;
    for (id, det) in rows {
        writer
            .write_record([id.as_str(), det.language.code(), &format!("{:.6}", det.confidence)])
            .map_err(io_err)?;
    }
    writer.flush().map_err(|source| LangIdError::Io {
        path: path.to_path_buf(),
        source,
    })
}
