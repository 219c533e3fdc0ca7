//! Disclosure and affiliate-marketing term lists.
//!
//! A lexicon is a TOML document:
//!
//! ```toml
//! version = "default-2024.1"
//! overlap_allowed = []          # optional: terms that may be both green and yellow
//!
//! [green.en]
//! terms = ["ad", "sponsored", "paid partnership"]
//! [green.nl]
//! terms = ["reclame", "advertentie"]
//! [yellow.en]
//! terms = ["ambassador", "partner"]
//! [yellow.nl]
//! terms = ["ambassadeur"]
//!
//! [[am_rule]]
//! name = "link_bio"
//! sets = [["link"], ["bio"]]
//! ```
//!
//! Every term is passed through the tokenizer's normalizer, so `"#Paid
//! Partnership"` is stored as `paid partnership`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tokenize::normalize_word;
use crate::corpus::Language;

/// Shipped default lexicon.
pub const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.default.toml");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("lexicon field `{field}` is empty")]
    EmptyTermSet { field: String },
    #[error("lexicon field `{field}`: term `{term}` has no word characters")]
    EmptyTerm { field: String, term: String },
    #[error("am_rule `{rule}` has {sets} term set(s); co-occurrence needs at least 2")]
    TooFewSets { rule: String, sets: usize },
    #[error("duplicate am_rule name `{0}`")]
    DuplicateRule(String),
    #[error("lexicon field `version` is missing or empty")]
    MissingVersion,
    #[error("term `{term}` is both green and yellow for `{language}` but is not listed in overlap_allowed")]
    UndocumentedOverlap { term: String, language: &'static str },
}

/// A normalized term: one or more token surfaces that must appear
/// consecutively.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Term(Vec<String>);

impl Term {
    pub fn words(&self) -> &[String] {
        &self.0
    }

    pub fn text(&self) -> String {
        self.0.join(" ")
    }

    /// Normalize raw term text. Returns `None` if nothing survives.
    pub fn parse(raw: &str) -> Option<Term> {
        let words: Vec<String> = raw.split_whitespace().filter_map(normalize_word).collect();
        (!words.is_empty()).then_some(Term(words))
    }
}

/// A set of terms indexed by first word for matching.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermSet {
    terms: BTreeSet<Term>,
    by_first: FxHashMap<String, Vec<Term>>,
}

impl TermSet {
    pub fn new(terms: impl IntoIterator<Item = Term>) -> Self {
        let terms: BTreeSet<Term> = terms.into_iter().collect();
        let mut by_first: FxHashMap<String, Vec<Term>> = FxHashMap::default();
        for term in &terms {
            by_first.entry(term.0[0].clone()).or_default().push(term.clone());
        }
        TermSet { terms, by_first }
    }

    /// Convenience for tests and fixtures. Panics on a term with no word
    /// characters.
    pub fn from_strs(raw: &[&str]) -> Self {
        TermSet::new(raw.iter().map(|r| Term::parse(r).expect("non-empty term")))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.terms.contains(term)
    }

    pub(crate) fn candidates(&self, first_word: &str) -> &[Term] {
        self.by_first.get(first_word).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmRule {
    pub name: String,
    /// The rule fires when every set has at least one matching term.
    pub term_sets: Vec<TermSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub version: String,
    green: BTreeMap<Language, TermSet>,
    yellow: BTreeMap<Language, TermSet>,
    pub am_rules: Vec<AmRule>,
}

static EMPTY_SET: std::sync::LazyLock<TermSet> = std::sync::LazyLock::new(TermSet::default);

impl Lexicon {
    pub fn new(
        version: impl Into<String>,
        green: BTreeMap<Language, TermSet>,
        yellow: BTreeMap<Language, TermSet>,
        am_rules: Vec<AmRule>,
    ) -> Self {
        Lexicon {
            version: version.into(),
            green,
            yellow,
            am_rules,
        }
    }

    /// The lexicon compiled from [`DEFAULT_LEXICON`].
    pub fn default_lexicon() -> Lexicon {
        parse_lexicon(DEFAULT_LEXICON).expect("shipped lexicon is valid")
    }

    pub fn green(&self, language: Language) -> &TermSet {
        self.green.get(&language).unwrap_or(&EMPTY_SET)
    }

    pub fn yellow(&self, language: Language) -> &TermSet {
        self.yellow.get(&language).unwrap_or(&EMPTY_SET)
    }

    /// Every word that occurs in any green, yellow, or AM term.
    pub fn vocabulary(&self) -> BTreeSet<String> {
        let disclosure = self.green.values().chain(self.yellow.values()).flat_map(|s| s.iter());
        let am = self.am_rules.iter().flat_map(|r| r.term_sets.iter()).flat_map(|s| s.iter());
        disclosure
            .chain(am)
            .flat_map(|t| t.words().iter().cloned())
            .collect()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLexicon {
    version: Option<String>,
    #[serde(default)]
    overlap_allowed: Vec<String>,
    #[serde(default)]
    green: BTreeMap<String, RawTerms>,
    #[serde(default)]
    yellow: BTreeMap<String, RawTerms>,
    #[serde(default)]
    am_rule: Vec<RawRule>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerms {
    terms: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    name: String,
    sets: Vec<Vec<String>>,
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

fn compile_terms(field: &str, raw: &[String]) -> Result<TermSet, LexiconError> {
    if raw.is_empty() {
        return Err(LexiconError::EmptyTermSet { field: field.to_string() });
    }
    let terms = raw
        .iter()
        .map(|t| {
            Term::parse(t).ok_or_else(|| LexiconError::EmptyTerm {
                field: field.to_string(),
                term: t.clone(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TermSet::new(terms))
}

fn compile_sections(
    kind: &str,
    raw: &BTreeMap<String, RawTerms>,
) -> Result<BTreeMap<Language, TermSet>, LexiconError> {
    let mut out = BTreeMap::new();
    for (code, terms) in raw {
        let field = format!("{kind}.{code}");
        let language = match code.parse::<Language>() {
            Ok(l) if l.is_analyzed() => l,
            _ => {
                return Err(LexiconError::Parse {
                    line: 0,
                    message: format!("unknown language section `{field}` (expected en or nl)"),
                })
            }
        };
        out.insert(language, compile_terms(&format!("{field}.terms"), &terms.terms)?);
    }
    for language in Language::ANALYZED {
        if !out.contains_key(&language) {
            return Err(LexiconError::EmptyTermSet {
                field: format!("{kind}.{}", language.code()),
            });
        }
    }
    Ok(out)
}

/// Parse and validate lexicon text.
pub fn parse_lexicon(source: &str) -> Result<Lexicon, LexiconError> {
    let raw: RawLexicon = toml::from_str(source).map_err(|e| LexiconError::Parse {
        line: e.span().map(|s| line_of(source, s.start)).unwrap_or(0),
        message: e.message().to_string(),
    })?;
    let version = raw
        .version
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .ok_or(LexiconError::MissingVersion)?;
    let green = compile_sections("green", &raw.green)?;
    let yellow = compile_sections("yellow", &raw.yellow)?;

    let allowed: BTreeSet<Term> = raw.overlap_allowed.iter().filter_map(|t| Term::parse(t)).collect();
    for language in Language::ANALYZED {
        for term in green[&language].iter() {
            if yellow[&language].contains(term) && !allowed.contains(term) {
                return Err(LexiconError::UndocumentedOverlap {
                    term: term.text(),
                    language: language.code(),
                });
            }
        }
    }

    if raw.am_rule.is_empty() {
        return Err(LexiconError::EmptyTermSet { field: "am_rule".into() });
    }
    let mut names = BTreeSet::new();
    let mut am_rules = Vec::with_capacity(raw.am_rule.len());
    for rule in raw.am_rule {
        if !names.insert(rule.name.clone()) {
            return Err(LexiconError::DuplicateRule(rule.name));
        }
        if rule.sets.len() < 2 {
            return Err(LexiconError::TooFewSets {
                rule: rule.name,
                sets: rule.sets.len(),
            });
        }
        let term_sets = rule
            .sets
            .iter()
            .enumerate()
            .map(|(i, set)| compile_terms(&format!("am_rule.{}.sets[{i}]", rule.name), set))
            .collect::<Result<Vec<_>, _>>()?;
        am_rules.push(AmRule {
            name: rule.name,
            term_sets,
        });
    }

    Ok(Lexicon {
        version,
        green,
        yellow,
        am_rules,
    })
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon, LexiconError> {
    let source = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_lexicon(&source)
}
