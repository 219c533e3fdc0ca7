//! Platform export adapters and registry filtering.
//!
//! Every input is UTF-8 JSON Lines. Keys not listed below are ignored.
//!
//! | platform  | id   | account          | timestamp                 | text                          | likes        | comments       | toggle             |
//! |-----------|------|------------------|---------------------------|-------------------------------|--------------|----------------|--------------------|
//! | Instagram | `id` | `account_handle` | `date`                    | `caption` (default `""`)      | `like_count` | `comment_count`| `paid_partnership` |
//! | YouTube   | `id` | `channel_id`     | `published_at`            | `description` (default `""`)  | `likeCount`  | `commentCount` | n/a                |
//! | TikTok    | `id` | `username`       | `create_time` (Unix secs) | `video_description` (default `""`) | `like_count` | `comment_count` | n/a          |
//!
//! YouTube records may also carry the API's nested layout
//! (`snippet.channelId`, `snippet.publishedAt`, `snippet.description`,
//! `statistics.likeCount`, `statistics.commentCount`); counts may be numeric
//! strings.
//!
//! Registry records: `{"name", "annotation": "influencer" | "other_media_company",
//! "instagram"?, "youtube"?, "tiktok"?, "followers"?: {"instagram": n, ...}}`.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::corpus::{self, count_value, parse_timestamp, Account, CorpusError, Platform, Post, RecordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdapterError {
    #[error("line {line}: {platform} record is missing `{key}`")]
    SchemaMismatch {
        platform: Platform,
        key: &'static str,
        line: usize,
    },
    #[error(transparent)]
    Record(#[from] RecordError),
}

impl AdapterError {
    /// Short reason used as the skip-count key in [`AdapterReport`].
    pub fn reason(&self) -> String {
        match self {
            AdapterError::SchemaMismatch { key, .. } => format!("missing {key}"),
            AdapterError::Record(RecordError::NegativeCount { field, .. }) => format!("negative {field}"),
            AdapterError::Record(RecordError::InvalidField { field, .. }) => format!("invalid {field}"),
            AdapterError::Record(RecordError::Malformed { .. }) => "malformed record".into(),
            AdapterError::Record(other) => other.to_string(),
        }
    }
}

/// Canonical account id for a handle: trimmed, no leading `@`, lowercase.
pub fn normalize_handle(handle: &str) -> String {
    handle.trim().trim_start_matches('@').to_lowercase()
}

fn lookup<'a>(record: &'a Map<String, Value>, path: &[&str]) -> Option<&'a Value> {
    let (last, parents) = path.split_last()?;
    let mut current = record;
    for p in parents {
        current = current.get(*p)?.as_object()?;
    }
    current.get(*last).filter(|v| !v.is_null())
}

struct Fields<'a> {
    record: &'a Map<String, Value>,
    platform: Platform,
    line: usize,
}

impl Fields<'_> {
    /// First present value among the alternative paths.
    fn find(&self, alternatives: &[&[&str]]) -> Option<&Value> {
        alternatives.iter().find_map(|path| lookup(self.record, path))
    }

    fn require(&self, key: &'static str, alternatives: &[&[&str]]) -> Result<&Value, AdapterError> {
        self.find(alternatives).ok_or(AdapterError::SchemaMismatch {
            platform: self.platform,
            key,
            line: self.line,
        })
    }

    fn string(&self, key: &'static str, alternatives: &[&[&str]]) -> Result<String, AdapterError> {
        match self.require(key, alternatives)? {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            other => Err(RecordError::InvalidField {
                field: key,
                line: self.line,
                reason: format!("expected string, got {other}"),
            }
            .into()),
        }
    }

    fn text(&self, key: &'static str, alternatives: &[&[&str]]) -> Result<String, AdapterError> {
        match self.find(alternatives) {
            None => Ok(String::new()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(other) => Err(RecordError::InvalidField {
                field: key,
                line: self.line,
                reason: format!("expected string, got {other}"),
            }
            .into()),
        }
    }

    fn count(&self, key: &'static str, alternatives: &[&[&str]]) -> Result<u64, AdapterError> {
        Ok(count_value(self.require(key, alternatives)?, key, self.line)?)
    }

    fn timestamp(&self, key: &'static str, alternatives: &[&[&str]]) -> Result<chrono::DateTime<chrono::Utc>, AdapterError> {
        parse_timestamp(self.require(key, alternatives)?).map_err(|reason| {
            RecordError::InvalidField {
                field: key,
                line: self.line,
                reason,
            }
            .into()
        })
    }
}

pub fn adapt_instagram(record: &Map<String, Value>, line: usize) -> Result<Post, AdapterError> {
    let f = Fields {
        record,
        platform: Platform::Instagram,
        line,
    };
    let toggle = match f.find(&[&["paid_partnership"]]) {
        None => None,
        Some(Value::Bool(b)) => Some(*b),
        Some(other) => {
            return Err(RecordError::InvalidField {
                field: "paid_partnership",
                line,
                reason: format!("expected boolean, got {other}"),
            }
            .into())
        }
    };
    Ok(Post {
        id: f.string("id", &[&["id"]])?,
        account_id: normalize_handle(&f.string("account_handle", &[&["account_handle"]])?),
        platform: Platform::Instagram,
        timestamp: f.timestamp("date", &[&["date"]])?,
        text: f.text("caption", &[&["caption"]])?,
        likes: f.count("like_count", &[&["like_count"]])?,
        comments: f.count("comment_count", &[&["comment_count"]])?,
        toggle,
        language: None,
    })
}

pub fn adapt_youtube(record: &Map<String, Value>, line: usize) -> Result<Post, AdapterError> {
    let f = Fields {
        record,
        platform: Platform::YouTube,
        line,
    };
    Ok(Post {
        id: f.string("id", &[&["id"]])?,
        account_id: normalize_handle(&f.string("channel_id", &[&["channel_id"], &["snippet", "channelId"]])?),
        platform: Platform::YouTube,
        timestamp: f.timestamp("published_at", &[&["published_at"], &["snippet", "publishedAt"]])?,
        text: f.text("description", &[&["description"], &["snippet", "description"]])?,
        likes: f.count("likeCount", &[&["likeCount"], &["statistics", "likeCount"]])?,
        comments: f.count("commentCount", &[&["commentCount"], &["statistics", "commentCount"]])?,
        toggle: None,
        language: None,
    })
}

pub fn adapt_tiktok(record: &Map<String, Value>, line: usize) -> Result<Post, AdapterError> {
    let f = Fields {
        record,
        platform: Platform::TikTok,
        line,
    };
    Ok(Post {
        id: f.string("id", &[&["id"]])?,
        account_id: normalize_handle(&f.string("username", &[&["username"]])?),
        platform: Platform::TikTok,
        timestamp: f.timestamp("create_time", &[&["create_time"]])?,
        text: f.text("video_description", &[&["video_description"]])?,
        likes: f.count("like_count", &[&["like_count"]])?,
        comments: f.count("comment_count", &[&["comment_count"]])?,
        toggle: None,
        language: None,
    })
}

pub fn adapt(platform: Platform, record: &Map<String, Value>, line: usize) -> Result<Post, AdapterError> {
    match platform {
        Platform::Instagram => adapt_instagram(record, line),
        Platform::YouTube => adapt_youtube(record, line),
        Platform::TikTok => adapt_tiktok(record, line),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterReport {
    pub records_in: usize,
    pub posts_out: usize,
    pub skipped: usize,
    pub skip_reasons: BTreeMap<String, usize>,
}

/// Adapt every record of an export file. Invalid records are skipped and
/// counted by reason; output keeps input order.
pub fn adapt_file(platform: Platform, path: &Path) -> Result<(Vec<Post>, AdapterReport), CorpusError> {
    let records = corpus::read_records(path)?;
    let results: Vec<Result<Post, AdapterError>> = records
        .into_par_iter()
        .map(|(line, record)| record.map_err(AdapterError::from).and_then(|r| adapt(platform, &r, line)))
        .collect();
    let mut report = AdapterReport {
        records_in: results.len(),
        ..AdapterReport::default()
    };
    let mut posts = Vec::with_capacity(results.len());
    for result in results {
        match result {
            Ok(post) => posts.push(post),
            Err(e) => {
                log::debug!("{}: {e}", path.display());
                *report.skip_reasons.entry(e.reason()).or_default() += 1;
                report.skipped += 1;
            }
        }
    }
    report.posts_out = posts.len();
    Ok((posts, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Annotation {
    Influencer,
    OtherMediaCompany,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryHandle {
    pub handle: String,
    /// Collection-day follower snapshot.
    pub followers: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub name: String,
    pub handles: BTreeMap<Platform, RegistryHandle>,
    pub annotation: Annotation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("line {line}: registry entry `{name}` has no platform handle")]
    NoHandles { name: String, line: usize },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

fn platform_key(p: Platform) -> &'static str {
    match p {
        Platform::Instagram => "instagram",
        Platform::YouTube => "youtube",
        Platform::TikTok => "tiktok",
    }
}

pub fn parse_registry_entry(record: &Map<String, Value>, line: usize) -> Result<RegistryEntry, RegistryError> {
    let invalid = |message: String| RegistryError::Invalid { line, message };
    let name = record
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| invalid("missing `name`".into()))?
        .to_string();
    let annotation: Annotation = record
        .get("annotation")
        .cloned()
        .ok_or_else(|| invalid("missing `annotation`".into()))
        .and_then(|v| serde_json::from_value(v).map_err(|e| invalid(format!("bad annotation: {e}"))))?;
    let followers = record.get("followers").and_then(Value::as_object);
    let mut handles = BTreeMap::new();
    for platform in Platform::ALL {
        let key = platform_key(platform);
        let Some(handle) = record.get(key).and_then(Value::as_str).filter(|h| !h.trim().is_empty()) else {
            continue;
        };
        let count = match followers.and_then(|f| f.get(key)) {
            None | Some(Value::Null) => 0,
            Some(v) => count_value(v, "followers", line).map_err(|e| invalid(e.to_string()))?,
        };
        handles.insert(
            platform,
            RegistryHandle {
                handle: handle.to_string(),
                followers: count,
            },
        );
    }
    if handles.is_empty() {
        return Err(RegistryError::NoHandles { name, line });
    }
    Ok(RegistryEntry {
        name,
        handles,
        annotation,
    })
}

/// One influencer [`Account`] per (entry, platform handle); entries annotated
/// as other media companies contribute nothing.
pub fn filter_registry(entries: &[RegistryEntry]) -> Vec<Account> {
    registry_accounts(entries).into_iter().filter(|a| a.is_influencer).collect()
}

/// Every registry handle as an [`Account`], with `is_influencer` taken from
/// the annotation. Loading drops posts of the non-influencer accounts.
pub fn registry_accounts(entries: &[RegistryEntry]) -> Vec<Account> {
    entries
        .iter()
        .flat_map(|e| {
            e.handles.iter().map(|(platform, h)| Account {
                id: normalize_handle(&h.handle),
                handle: h.handle.clone(),
                platform: *platform,
                followers: h.followers,
                is_influencer: e.annotation == Annotation::Influencer,
            })
        })
        .collect()
}

pub fn load_registry(path: &Path) -> Result<Vec<RegistryEntry>, CorpusError> {
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    for (line, record) in corpus::read_records(path)? {
        match record {
            Ok(r) => match parse_registry_entry(&r, line) {
                Ok(e) => entries.push(e),
                Err(e) => errors.push(RecordError::InvalidField {
                    field: "registry",
                    line,
                    reason: e.to_string(),
                }),
            },
            Err(e) => errors.push(e),
        }
    }
    if errors.is_empty() {
        Ok(entries)
    } else {
        Err(CorpusError::Validation {
            path: path.to_path_buf(),
            total: errors.len(),
            errors: errors.into_iter().take(corpus::MAX_REPORTED_ERRORS).collect(),
        })
    }
}
