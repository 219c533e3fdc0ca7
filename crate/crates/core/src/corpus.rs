//! Canonical post/account model and line-delimited corpus I/O.
//!
//! Both the posts file and the accounts file hold one JSON object per line.
//! Field names are the lowercase snake-case names of [`Post`] and
//! [`Account`]. Blank lines are ignored.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

/// Maximum number of per-line failures carried by [`CorpusError::Validation`].
pub const MAX_REPORTED_ERRORS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Platform {
    Instagram,
    YouTube,
    TikTok,
}

impl Platform {
    pub const ALL: [Platform; 3] = [Platform::Instagram, Platform::YouTube, Platform::TikTok];

    pub fn as_str(self) -> &'static str {
        match self {
            Platform::Instagram => "Instagram",
            Platform::YouTube => "YouTube",
            Platform::TikTok => "TikTok",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Platform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "instagram" | "ig" => Ok(Platform::Instagram),
            "youtube" | "yt" => Ok(Platform::YouTube),
            "tiktok" | "tt" => Ok(Platform::TikTok),
            _ => Err(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Language {
    English,
    Dutch,
    Other,
}

impl Language {
    /// The two languages that take part in analytics.
    pub const ANALYZED: [Language; 2] = [Language::English, Language::Dutch];

    pub fn as_str(self) -> &'static str {
        match self {
            Language::English => "English",
            Language::Dutch => "Dutch",
            Language::Other => "Other",
        }
    }

    /// Short code used for lexicon sections and label files.
    pub fn code(self) -> &'static str {
        match self {
            Language::English => "en",
            Language::Dutch => "nl",
            Language::Other => "other",
        }
    }

    pub fn is_analyzed(self) -> bool {
        !matches!(self, Language::Other)
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "english" | "en" | "eng" => Ok(Language::English),
            "dutch" | "nl" | "nld" | "nederlands" => Ok(Language::Dutch),
            "other" | "und" | "xx" => Ok(Language::Other),
            _ => Err(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub account_id: String,
    pub platform: Platform,
    pub timestamp: DateTime<Utc>,
    pub text: String,
    pub likes: u64,
    pub comments: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toggle: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<Language>,
}

impl Post {
    /// Likes plus comments.
    pub fn engagement(&self) -> u64 {
        self.likes.saturating_add(self.comments)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Account {
    pub id: String,
    pub handle: String,
    pub platform: Platform,
    pub followers: u64,
    pub is_influencer: bool,
}

/// Accounts are identified by id within a platform.
pub type AccountKey = (Platform, String);

impl Account {
    pub fn key(&self) -> AccountKey {
        (self.platform, self.id.clone())
    }
}

/// A single record-level validation failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("line {line}: missing field `{field}`")]
    MissingField { field: &'static str, line: usize },
    #[error("line {line}: field `{field}` is negative")]
    NegativeCount { field: &'static str, line: usize },
    #[error("line {line}: unknown platform `{value}`")]
    UnknownPlatform { value: String, line: usize },
    #[error("line {line}: toggle present on a {platform} post (toggle data exists only for Instagram)")]
    ToggleOnNonInstagram { platform: Platform, line: usize },
    #[error("line {line}: field `{field}` has invalid value: {reason}")]
    InvalidField {
        field: &'static str,
        line: usize,
        reason: String,
    },
    #[error("line {line}: not a JSON object: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { id: String, line: usize },
    #[error("line {line}: account `{account_id}` on {platform} is not in the accounts file")]
    UnknownAccount {
        account_id: String,
        platform: Platform,
        line: usize,
    },
}

impl RecordError {
    pub fn line(&self) -> usize {
        match self {
            RecordError::MissingField { line, .. }
            | RecordError::NegativeCount { line, .. }
            | RecordError::UnknownPlatform { line, .. }
            | RecordError::ToggleOnNonInstagram { line, .. }
            | RecordError::InvalidField { line, .. }
            | RecordError::Malformed { line, .. }
            | RecordError::DuplicateId { line, .. }
            | RecordError::UnknownAccount { line, .. } => *line,
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {total} invalid record(s); first: {}", format_first(.errors))]
    Validation {
        path: PathBuf,
        total: usize,
        /// At most [`MAX_REPORTED_ERRORS`] failures, in line order.
        errors: Vec<RecordError>,
    },
}

fn format_first(errors: &[RecordError]) -> String {
    errors
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Parse a timestamp. RFC 3339 strings keep their offset and are converted
/// to UTC; naive `YYYY-MM-DD[ T]HH:MM:SS` strings and bare dates are read as
/// UTC; integers are Unix seconds.
pub fn parse_timestamp(value: &Value) -> Result<DateTime<Utc>, String> {
    match value {
        Value::String(s) => {
            let s = s.trim();
            if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
                return Ok(dt.with_timezone(&Utc));
            }
            for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
                if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
                    return Ok(Utc.from_utc_datetime(&naive));
                }
            }
            if let Ok(date) = chrono::NaiveDate::parse_from_str(s, "%Y-%m-%d") {
                return Ok(Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).expect("midnight")));
            }
            Err(format!("unrecognised timestamp `{s}`"))
        }
        Value::Number(n) => n
            .as_i64()
            .and_then(|secs| Utc.timestamp_opt(secs, 0).single())
            .ok_or_else(|| format!("timestamp {n} out of range")),
        other => Err(format!("expected string or integer, got {other}")),
    }
}

pub(crate) fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn required<'a>(
    raw: &'a Map<String, Value>,
    field: &'static str,
    line: usize,
) -> Result<&'a Value, RecordError> {
    match raw.get(field) {
        None | Some(Value::Null) => Err(RecordError::MissingField { field, line }),
        Some(v) => Ok(v),
    }
}

fn string_field(raw: &Map<String, Value>, field: &'static str, line: usize) -> Result<String, RecordError> {
    match required(raw, field, line)? {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(RecordError::InvalidField {
            field,
            line,
            reason: format!("expected string, got {other}"),
        }),
    }
}

pub(crate) fn count_field(raw: &Map<String, Value>, field: &'static str, line: usize) -> Result<u64, RecordError> {
    let value = required(raw, field, line)?;
    count_value(value, field, line)
}

/// Non-negative integer from a JSON number or a numeric string.
pub(crate) fn count_value(value: &Value, field: &'static str, line: usize) -> Result<u64, RecordError> {
    let invalid = |reason: String| RecordError::InvalidField { field, line, reason };
    match value {
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                Ok(u)
            } else if n.as_i64().is_some_and(|i| i < 0) || n.as_f64().is_some_and(|f| f < 0.0) {
                Err(RecordError::NegativeCount { field, line })
            } else {
                Err(invalid(format!("expected integer, got {n}")))
            }
        }
        Value::String(s) => {
            let s = s.trim();
            if let Ok(u) = s.parse::<u64>() {
                Ok(u)
            } else if s.parse::<i64>().is_ok_and(|i| i < 0) {
                Err(RecordError::NegativeCount { field, line })
            } else {
                Err(invalid(format!("expected integer, got `{s}`")))
            }
        }
        other => Err(invalid(format!("expected integer, got {other}"))),
    }
}

fn bool_value(value: &Value, field: &'static str, line: usize) -> Result<bool, RecordError> {
    match value {
        Value::Bool(b) => Ok(*b),
        Value::String(s) if s.eq_ignore_ascii_case("true") => Ok(true),
        Value::String(s) if s.eq_ignore_ascii_case("false") => Ok(false),
        other => Err(RecordError::InvalidField {
            field,
            line,
            reason: format!("expected boolean, got {other}"),
        }),
    }
}

/// Build a [`Post`] from one decoded posts-file record.
///
/// `line` is the 1-based line number used in error messages. Text is copied
/// unchanged. Unknown keys are ignored.
pub fn validate_post(raw: &Map<String, Value>, line: usize) -> Result<Post, RecordError> {
    let id = string_field(raw, "id", line)?;
    let account_id = string_field(raw, "account_id", line)?;
    let platform = match required(raw, "platform", line)? {
        Value::String(s) => s
            .parse::<Platform>()
            .map_err(|value| RecordError::UnknownPlatform { value, line })?,
        other => {
            return Err(RecordError::UnknownPlatform {
                value: other.to_string(),
                line,
            })
        }
    };
    let timestamp = parse_timestamp(required(raw, "timestamp", line)?).map_err(|reason| {
        RecordError::InvalidField {
            field: "timestamp",
            line,
            reason,
        }
    })?;
    let text = match required(raw, "text", line)? {
        Value::String(s) => s.clone(),
        other => {
            return Err(RecordError::InvalidField {
                field: "text",
                line,
                reason: format!("expected string, got {other}"),
            })
        }
    };
    let likes = count_field(raw, "likes", line)?;
    let comments = count_field(raw, "comments", line)?;
    let toggle = match raw.get("toggle") {
        None | Some(Value::Null) => None,
        Some(v) => Some(bool_value(v, "toggle", line)?),
    };
    if toggle.is_some() && platform != Platform::Instagram {
        return Err(RecordError::ToggleOnNonInstagram { platform, line });
    }
    let language = match raw.get("language") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.parse::<Language>().map_err(|v| RecordError::InvalidField {
            field: "language",
            line,
            reason: format!("unknown language `{v}`"),
        })?),
        Some(other) => {
            return Err(RecordError::InvalidField {
                field: "language",
                line,
                reason: format!("expected string, got {other}"),
            })
        }
    };
    Ok(Post {
        id,
        account_id,
        platform,
        timestamp,
        text,
        likes,
        comments,
        toggle,
        language,
    })
}

/// Build an [`Account`] from one decoded accounts-file record.
pub fn validate_account(raw: &Map<String, Value>, line: usize) -> Result<Account, RecordError> {
    let id = string_field(raw, "id", line)?;
    let handle = match raw.get("handle") {
        None | Some(Value::Null) => id.clone(),
        Some(_) => string_field(raw, "handle", line)?,
    };
    let platform = match required(raw, "platform", line)? {
        Value::String(s) => s
            .parse::<Platform>()
            .map_err(|value| RecordError::UnknownPlatform { value, line })?,
        other => {
            return Err(RecordError::UnknownPlatform {
                value: other.to_string(),
                line,
            })
        }
    };
    let followers = count_field(raw, "followers", line)?;
    let is_influencer = bool_value(required(raw, "is_influencer", line)?, "is_influencer", line)?;
    Ok(Account {
        id,
        handle,
        platform,
        followers,
        is_influencer,
    })
}

/// Load-time counters. `lines_in` counts non-blank lines only.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub lines_in: usize,
    pub dropped_invalid: usize,
    pub dropped_non_influencer: usize,
    pub posts_out: usize,
    pub accounts: usize,
    /// Posts whose exact text already appeared earlier in the corpus. They
    /// are kept.
    pub duplicate_texts: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Skip invalid post lines instead of failing the load. Invalid lines
    /// are still counted in [`LoadReport::dropped_invalid`].
    pub skip_invalid: bool,
}

/// A validated set of posts and the accounts they belong to.
///
/// Posts are held in file order. A corpus is never mutated in place; language
/// assignment produces a new value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    posts: Vec<Post>,
    accounts: BTreeMap<AccountKey, Account>,
}

impl Corpus {
    /// Assemble a corpus, checking post-id uniqueness and that every post
    /// references a known account.
    pub fn new(posts: Vec<Post>, accounts: Vec<Account>) -> Result<Self, RecordError> {
        let accounts: BTreeMap<AccountKey, Account> =
            accounts.into_iter().map(|a| (a.key(), a)).collect();
        let mut seen = HashSet::with_capacity(posts.len());
        for (i, post) in posts.iter().enumerate() {
            if !seen.insert(post.id.as_str()) {
                return Err(RecordError::DuplicateId {
                    id: post.id.clone(),
                    line: i + 1,
                });
            }
            if !accounts.contains_key(&(post.platform, post.account_id.clone())) {
                return Err(RecordError::UnknownAccount {
                    account_id: post.account_id.clone(),
                    platform: post.platform,
                    line: i + 1,
                });
            }
        }
        Ok(Corpus { posts, accounts })
    }

    pub fn posts(&self) -> &[Post] {
        &self.posts
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Account> {
        self.accounts.values()
    }

    pub fn account(&self, platform: Platform, id: &str) -> Option<&Account> {
        self.accounts.get(&(platform, id.to_string()))
    }

    pub fn account_of(&self, post: &Post) -> Option<&Account> {
        self.account(post.platform, &post.account_id)
    }

    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// Replace every post's language, consuming the corpus.
    ///
    /// # Panics
    /// If `languages` and the post list differ in length.
    pub fn with_languages(mut self, languages: Vec<Language>) -> Self {
        assert_eq!(languages.len(), self.posts.len(), "one language per post");
        for (post, lang) in self.posts.iter_mut().zip(languages) {
            post.language = Some(lang);
        }
        self
    }

    pub fn into_parts(self) -> (Vec<Post>, Vec<Account>) {
        (self.posts, self.accounts.into_values().collect())
    }
}

/// A parsed JSON object, or why the line is not one.
type RawRecord = Result<Map<String, Value>, RecordError>;

fn open(path: &Path) -> Result<BufReader<File>, CorpusError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Iterate `(line_number, object)` over a JSON-lines file, skipping blank lines.
pub(crate) fn read_records(
    path: &Path,
) -> Result<Vec<(usize, RawRecord)>, CorpusError> {
    let reader = open(path)?;
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = match serde_json::from_str::<Value>(&line) {
            Ok(Value::Object(map)) => Ok(map),
            Ok(other) => Err(RecordError::Malformed {
                line: line_no,
                reason: format!("expected object, got {other}"),
            }),
            Err(e) => Err(RecordError::Malformed {
                line: line_no,
                reason: e.to_string(),
            }),
        };
        out.push((line_no, parsed));
    }
    Ok(out)
}

fn validation_error(path: &Path, errors: Vec<RecordError>) -> CorpusError {
    let total = errors.len();
    CorpusError::Validation {
        path: path.to_path_buf(),
        total,
        errors: errors.into_iter().take(MAX_REPORTED_ERRORS).collect(),
    }
}

pub fn load_accounts(path: &Path) -> Result<Vec<Account>, CorpusError> {
    let mut accounts = Vec::new();
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for (line, record) in read_records(path)? {
        match record.and_then(|raw| validate_account(&raw, line)) {
            Ok(account) => {
                if seen.insert(account.key()) {
                    accounts.push(account);
                } else {
                    errors.push(RecordError::DuplicateId { id: account.id, line });
                }
            }
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(accounts)
    } else {
        Err(validation_error(path, errors))
    }
}

/// Load a posts file on its own, without account checks. Returns the posts
/// and the number of skipped invalid lines.
pub fn load_posts(path: &Path, options: LoadOptions) -> Result<(Vec<Post>, usize), CorpusError> {
    let mut posts = Vec::new();
    let mut errors = Vec::new();
    for (line, record) in read_records(path)? {
        match record.and_then(|raw| validate_post(&raw, line)) {
            Ok(post) => posts.push(post),
            Err(e) => errors.push(e),
        }
    }
    let skipped = errors.len();
    if skipped > 0 && !options.skip_invalid {
        return Err(validation_error(path, errors));
    }
    Ok((posts, skipped))
}

/// Load and validate a corpus with default options (any invalid line fails
/// the load).
pub fn load_corpus(posts_path: &Path, accounts_path: &Path) -> Result<(Corpus, LoadReport), CorpusError> {
    load_corpus_with(posts_path, accounts_path, LoadOptions::default())
}

/// Load and validate a corpus. Posts of accounts not annotated as
/// influencers are dropped and counted.
pub fn load_corpus_with(
    posts_path: &Path,
    accounts_path: &Path,
    options: LoadOptions,
) -> Result<(Corpus, LoadReport), CorpusError> {
    let accounts = load_accounts(accounts_path)?;
    let index: HashMap<AccountKey, bool> = accounts.iter().map(|a| (a.key(), a.is_influencer)).collect();

    let records = read_records(posts_path)?;
    let mut report = LoadReport {
        lines_in: records.len(),
        ..LoadReport::default()
    };
    let mut errors = Vec::new();
    let mut posts = Vec::with_capacity(records.len());
    let mut seen_ids: HashSet<String> = HashSet::with_capacity(records.len());
    let mut seen_texts: HashSet<u64> = HashSet::with_capacity(records.len());

    for (line, record) in records {
        let post = match record.and_then(|raw| validate_post(&raw, line)) {
            Ok(post) => post,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        if !seen_ids.insert(post.id.clone()) {
            errors.push(RecordError::DuplicateId { id: post.id, line });
            continue;
        }
        match index.get(&(post.platform, post.account_id.clone())) {
            None => errors.push(RecordError::UnknownAccount {
                account_id: post.account_id.clone(),
                platform: post.platform,
                line,
            }),
            Some(false) => report.dropped_non_influencer += 1,
            Some(true) => {
                if !post.text.is_empty() && !seen_texts.insert(text_fingerprint(&post.text)) {
                    report.duplicate_texts += 1;
                }
                posts.push(post);
            }
        }
    }

    report.dropped_invalid = errors.len();
    if !errors.is_empty() && !options.skip_invalid {
        return Err(validation_error(posts_path, errors));
    }
    for e in errors.iter().take(MAX_REPORTED_ERRORS) {
        log::warn!("skipping {}: {e}", posts_path.display());
    }

    let influencers: Vec<Account> = accounts.into_iter().filter(|a| a.is_influencer).collect();
    report.posts_out = posts.len();
    report.accounts = influencers.len();
    let corpus = Corpus::new(posts, influencers).expect("references checked above");
    Ok((corpus, report))
}

fn text_fingerprint(text: &str) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    text.hash(&mut h);
    h.finish()
}

fn post_record(post: &Post) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("id".into(), Value::String(post.id.clone()));
    map.insert("account_id".into(), Value::String(post.account_id.clone()));
    map.insert("platform".into(), Value::String(post.platform.as_str().into()));
    map.insert("timestamp".into(), Value::String(format_timestamp(&post.timestamp)));
    map.insert("text".into(), Value::String(post.text.clone()));
    map.insert("likes".into(), Value::from(post.likes));
    map.insert("comments".into(), Value::from(post.comments));
    if let Some(t) = post.toggle {
        map.insert("toggle".into(), Value::Bool(t));
    }
    if let Some(l) = post.language {
        map.insert("language".into(), Value::String(l.as_str().into()));
    }
    map
}

fn account_record(account: &Account) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("id".into(), Value::String(account.id.clone()));
    map.insert("handle".into(), Value::String(account.handle.clone()));
    map.insert("platform".into(), Value::String(account.platform.as_str().into()));
    map.insert("followers".into(), Value::from(account.followers));
    map.insert("is_influencer".into(), Value::Bool(account.is_influencer));
    map
}

fn create(path: &Path) -> Result<BufWriter<File>, CorpusError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| CorpusError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn write_lines<'a, I>(path: &Path, records: I) -> Result<(), CorpusError>
where
    I: Iterator<Item = Map<String, Value>> + 'a,
{
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = create(path)?;
    for record in records {
        serde_json::to_writer(&mut w, &record).map_err(|e| io_err(e.into()))?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_posts(path: &Path, posts: &[Post]) -> Result<(), CorpusError> {
    write_lines(path, posts.iter().map(post_record))
}

pub fn write_accounts<'a>(path: &Path, accounts: impl IntoIterator<Item = &'a Account>) -> Result<(), CorpusError> {
    write_lines(path, accounts.into_iter().map(account_record))
}

/// Write both corpus files in the format read by [`load_corpus`].
pub fn write_corpus(corpus: &Corpus, posts_path: &Path, accounts_path: &Path) -> Result<(), CorpusError> {
    write_posts(posts_path, corpus.posts())?;
    write_accounts(accounts_path, corpus.accounts())
}
