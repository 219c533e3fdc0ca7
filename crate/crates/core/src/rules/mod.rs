//! Disclosure classification and affiliate-marketing detection.
//!
//! A post is green when a green term starts within its first
//! [`POSITION_LIMIT`] tokens or when the platform's paid-partnership toggle
//! is set. A green term further into the text, or any yellow term, makes the
//! post yellow. Everything else is undisclosed.

pub mod lexicon;
pub mod tokenize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Language, Post};
pub use lexicon::{load_lexicon, parse_lexicon, AmRule, Lexicon, LexiconError, Term, TermSet};
pub use tokenize::{normalize_word, tokenize, Token};

/// A green term must start at or before this token index.
pub const POSITION_LIMIT: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("post `{post_id}` has no analyzable language (found {found:?})")]
    LanguageUnassigned { post_id: String, found: Option<Language> },
}

/// A term occurrence, reported at the index of its first token.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TermMatch {
    pub term: String,
    pub index: usize,
}

/// All occurrences of `terms` in `tokens`. Multi-word terms match only on
/// consecutive tokens. Sorted by index, then term.
pub fn match_terms(tokens: &[Token], terms: &TermSet) -> Vec<TermMatch> {
    let mut out = Vec::new();
    for (pos, token) in tokens.iter().enumerate() {
        for term in terms.candidates(&token.surface) {
            let words = term.words();
            let fits = pos + words.len() <= tokens.len()
                && words
                    .iter()
                    .zip(&tokens[pos..])
                    .all(|(w, t)| *w == t.surface);
            if fits {
                out.push(TermMatch {
                    term: term.text(),
                    index: token.index,
                });
            }
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DisclosureClass {
    GreenWordsPosition,
    GreenToggle,
    GreenToggleWordsPosition,
    Yellow,
    None,
}

impl DisclosureClass {
    pub const ALL: [DisclosureClass; 5] = [
        DisclosureClass::GreenWordsPosition,
        DisclosureClass::GreenToggle,
        DisclosureClass::GreenToggleWordsPosition,
        DisclosureClass::Yellow,
        DisclosureClass::None,
    ];

    pub fn is_green(self) -> bool {
        matches!(
            self,
            DisclosureClass::GreenWordsPosition
                | DisclosureClass::GreenToggle
                | DisclosureClass::GreenToggleWordsPosition
        )
    }

    pub fn is_disclosed(self) -> bool {
        self != DisclosureClass::None
    }

    pub fn label(self) -> &'static str {
        match self {
            DisclosureClass::GreenWordsPosition => "green_words_position",
            DisclosureClass::GreenToggle => "green_toggle",
            DisclosureClass::GreenToggleWordsPosition => "green_toggle_words_position",
            DisclosureClass::Yellow => "yellow",
            DisclosureClass::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TermKind {
    Green,
    Yellow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisclosureMatch {
    pub term: String,
    pub index: usize,
    pub kind: TermKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisclosureFinding {
    pub class: DisclosureClass,
    /// Green and yellow matches, sorted by index.
    pub matched_terms: Vec<DisclosureMatch>,
    /// Index of the earliest green or yellow match.
    pub first_position: Option<usize>,
    pub toggle_used: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AmDisclosure {
    GreenDisclosedAM,
    YellowDisclosedAM,
    UndisclosedAM,
    NotAM,
}

impl AmDisclosure {
    pub fn label(self) -> &'static str {
        match self {
            AmDisclosure::GreenDisclosedAM => "green_disclosed_am",
            AmDisclosure::YellowDisclosedAM => "yellow_disclosed_am",
            AmDisclosure::UndisclosedAM => "undisclosed_am",
            AmDisclosure::NotAM => "not_am",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmFinding {
    pub is_am: bool,
    /// Names of every rule that fired, in lexicon order.
    pub fired_rules: Vec<String>,
    pub am_disclosure: AmDisclosure,
}

fn analyzed_language(post: &Post) -> Result<Language, RuleError> {
    match post.language {
        Some(l) if l.is_analyzed() => Ok(l),
        found => Err(RuleError::LanguageUnassigned {
            post_id: post.id.clone(),
            found,
        }),
    }
}

/// Classify already tokenized text.
pub fn classify_tokens(
    tokens: &[Token],
    toggle: Option<bool>,
    language: Language,
    lexicon: &Lexicon,
) -> DisclosureFinding {
    let green = match_terms(tokens, lexicon.green(language));
    let yellow = match_terms(tokens, lexicon.yellow(language));

    let green_in_position = green.iter().any(|m| m.index <= POSITION_LIMIT);
    let toggle_used = toggle == Some(true);
    let class = match (toggle_used, green_in_position) {
        (true, true) => DisclosureClass::GreenToggleWordsPosition,
        (true, false) => DisclosureClass::GreenToggle,
        (false, true) => DisclosureClass::GreenWordsPosition,
        (false, false) if !green.is_empty() || !yellow.is_empty() => DisclosureClass::Yellow,
        (false, false) => DisclosureClass::None,
    };

    let mut matched_terms: Vec<DisclosureMatch> = green
        .into_iter()
        .map(|m| (m, TermKind::Green))
        .chain(yellow.into_iter().map(|m| (m, TermKind::Yellow)))
        .map(|(m, kind)| DisclosureMatch {
            term: m.term,
            index: m.index,
            kind,
        })
        .collect();
    matched_terms.sort_by(|a, b| (a.index, a.kind, &a.term).cmp(&(b.index, b.kind, &b.term)));
    let first_position = matched_terms.first().map(|m| m.index);

    DisclosureFinding {
        class,
        matched_terms,
        first_position,
        toggle_used,
    }
}

pub fn classify_disclosure(post: &Post, lexicon: &Lexicon) -> Result<DisclosureFinding, RuleError> {
    let language = analyzed_language(post)?;
    Ok(classify_tokens(&tokenize(&post.text), post.toggle, language, lexicon))
}

/// Names of the rules whose every term set is hit by `tokens`.
pub fn fired_rules(tokens: &[Token], rules: &[AmRule]) -> Vec<String> {
    rules
        .iter()
        .filter(|rule| {
            rule.term_sets
                .iter()
                .all(|set| !match_terms(tokens, set).is_empty())
        })
        .map(|rule| rule.name.clone())
        .collect()
}

/// AM verdict for a post. `am_disclosure` is `UndisclosedAM`/`NotAM` until
/// combined with a disclosure finding through [`classify_am_disclosure`].
pub fn detect_affiliate(post: &Post, lexicon: &Lexicon) -> Result<AmFinding, RuleError> {
    analyzed_language(post)?;
    Ok(am_from_tokens(&tokenize(&post.text), lexicon))
}

fn am_from_tokens(tokens: &[Token], lexicon: &Lexicon) -> AmFinding {
    let fired = fired_rules(tokens, &lexicon.am_rules);
    let is_am = !fired.is_empty();
    AmFinding {
        is_am,
        fired_rules: fired,
        am_disclosure: if is_am { AmDisclosure::UndisclosedAM } else { AmDisclosure::NotAM },
    }
}

pub fn classify_am_disclosure(disclosure: &DisclosureFinding, am: AmFinding) -> AmFinding {
    let am_disclosure = if !am.is_am {
        AmDisclosure::NotAM
    } else if disclosure.class.is_green() {
        AmDisclosure::GreenDisclosedAM
    } else if disclosure.class == DisclosureClass::Yellow {
        AmDisclosure::YellowDisclosedAM
    } else {
        AmDisclosure::UndisclosedAM
    };
    AmFinding { am_disclosure, ..am }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostFinding {
    pub disclosure: DisclosureFinding,
    pub am: AmFinding,
}

/// Disclosure and AM findings for one post, tokenizing once.
pub fn analyze_post(post: &Post, lexicon: &Lexicon) -> Result<PostFinding, RuleError> {
    let language = analyzed_language(post)?;
    let tokens = tokenize(&post.text);
    let disclosure = classify_tokens(&tokens, post.toggle, language, lexicon);
    let am = classify_am_disclosure(&disclosure, am_from_tokens(&tokens, lexicon));
    Ok(PostFinding { disclosure, am })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Platform;
    use chrono::{TimeZone, Utc};
    use std::collections::BTreeMap;

    fn lexicon() -> Lexicon {
        let mut green = BTreeMap::new();
        let mut yellow = BTreeMap::new();
        for lang in Language::ANALYZED {
            green.insert(lang, TermSet::from_strs(&["ad", "paid partnership", "reclame"]));
            yellow.insert(lang, TermSet::from_strs(&["ambassador", "partner"]));
        }
        let rules = vec![
            AmRule {
                name: "link_bio".into(),
                term_sets: vec![TermSet::from_strs(&["link"]), TermSet::from_strs(&["bio"])],
            },
            AmRule {
                name: "code_off".into(),
                term_sets: vec![TermSet::from_strs(&["code"]), TermSet::from_strs(&["off", "korting"])],
            },
        ];
        Lexicon::new("test", green, yellow, rules)
    }

    fn post(text: &str, platform: Platform, toggle: Option<bool>, language: Option<Language>) -> Post {
        Post {
            id: "p".into(),
            account_id: "a".into(),
            platform,
            timestamp: Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap(),
            text: text.into(),
            likes: 0,
            comments: 0,
            toggle,
            language,
        }
    }

    fn ig(text: &str, toggle: Option<bool>) -> Post {
        post(text, Platform::Instagram, toggle, Some(Language::English))
    }

    #[test]
    fn match_terms_cases() {
        let toks = tokenize("paid partnership with");
        let set = TermSet::from_strs(&["paid partnership"]);
        assert_eq!(
            match_terms(&toks, &set),
            vec![TermMatch { term: "paid partnership".into(), index: 1 }]
        );
        let toks = vec![Token { surface: "ad".into(), index: 4 }];
        assert_eq!(
            match_terms(&toks, &TermSet::from_strs(&["ad"])),
            vec![TermMatch { term: "ad".into(), index: 4 }]
        );
        assert!(match_terms(&tokenize("nothing here"), &set).is_empty());
        // split across a sentence
        assert!(match_terms(&tokenize("paid. the partnership"), &set).is_empty());
    }

    #[test]
    fn green_by_words_in_position() {
        let mut p = ig("#ad nieuwe collectie", None);
        p.language = Some(Language::Dutch);
        let f = classify_disclosure(&p, &lexicon()).unwrap();
        assert_eq!(f.class, DisclosureClass::GreenWordsPosition);
        assert_eq!(f.first_position, Some(1));
        assert!(!f.toggle_used);
    }

    #[test]
    fn yellow_term_late() {
        let f = classify_disclosure(&ig("lovely day with my fav brand #ambassador", Some(false)), &lexicon()).unwrap();
        assert_eq!(f.class, DisclosureClass::Yellow);
        assert_eq!(f.first_position, Some(7));
    }

    #[test]
    fn toggle_only() {
        let f = classify_disclosure(&ig("great recipe", Some(true)), &lexicon()).unwrap();
        assert_eq!(f.class, DisclosureClass::GreenToggle);
        assert!(f.toggle_used);
        assert_eq!(f.first_position, None);
        let f = classify_disclosure(&ig("#ad great recipe", Some(true)), &lexicon()).unwrap();
        assert_eq!(f.class, DisclosureClass::GreenToggleWordsPosition);
        let f = classify_disclosure(&ig("", Some(true)), &lexicon()).unwrap();
        assert_eq!(f.class, DisclosureClass::GreenToggle);
    }

    #[test]
    fn late_green_is_downgraded() {
        let f = classify_disclosure(&ig("thanks everyone for all the love #ad", Some(false)), &lexicon()).unwrap();
        assert_eq!(f.class, DisclosureClass::Yellow);
        assert_eq!(f.first_position, Some(7));
        assert_eq!(f.matched_terms[0].kind, TermKind::Green);
    }

    #[test]
    fn position_boundary() {
        let five = classify_disclosure(&ig("one two three four #ad", None), &lexicon()).unwrap();
        assert_eq!(five.class, DisclosureClass::GreenWordsPosition);
        let six = classify_disclosure(&ig("one two three four five #ad", None), &lexicon()).unwrap();
        assert_eq!(six.class, DisclosureClass::Yellow);
        // multi-word term starting at 5 counts
        let multi = classify_disclosure(&ig("one two three four paid partnership", None), &lexicon()).unwrap();
        assert_eq!(multi.class, DisclosureClass::GreenWordsPosition);
    }

    #[test]
    fn no_evidence_is_none() {
        let f = classify_disclosure(&ig("just a normal day", Some(false)), &lexicon()).unwrap();
        assert_eq!(f.class, DisclosureClass::None);
        assert!(f.matched_terms.is_empty());
        assert_eq!(f.first_position, None);
    }

    #[test]
    fn language_required() {
        let p = post("#ad", Platform::TikTok, None, None);
        assert!(matches!(classify_disclosure(&p, &lexicon()), Err(RuleError::LanguageUnassigned { .. })));
        let p = post("#ad", Platform::TikTok, None, Some(Language::Other));
        assert!(matches!(detect_affiliate(&p, &lexicon()), Err(RuleError::LanguageUnassigned { .. })));
    }

    #[test]
    fn affiliate_rules() {
        let f = detect_affiliate(&ig("use code ANNA20 for 20% off, link in bio", None), &lexicon()).unwrap();
        assert!(f.is_am);
        assert_eq!(f.fired_rules, vec!["link_bio".to_string(), "code_off".to_string()]);
        let f = detect_affiliate(&ig("link to my new video below", None), &lexicon()).unwrap();
        assert!(!f.is_am);
        assert_eq!(f.am_disclosure, AmDisclosure::NotAM);
    }

    #[test]
    fn am_disclosure_mapping() {
        let finding = |class| DisclosureFinding {
            class,
            matched_terms: vec![],
            first_position: None,
            toggle_used: false,
        };
        let am = |is_am| AmFinding {
            is_am,
            fired_rules: vec![],
            am_disclosure: AmDisclosure::NotAM,
        };
        assert_eq!(
            classify_am_disclosure(&finding(DisclosureClass::GreenToggle), am(true)).am_disclosure,
            AmDisclosure::GreenDisclosedAM
        );
        assert_eq!(
            classify_am_disclosure(&finding(DisclosureClass::None), am(true)).am_disclosure,
            AmDisclosure::UndisclosedAM
        );
        assert_eq!(
            classify_am_disclosure(&finding(DisclosureClass::Yellow), am(false)).am_disclosure,
            AmDisclosure::NotAM
        );
        assert_eq!(
            classify_am_disclosure(&finding(DisclosureClass::Yellow), am(true)).am_disclosure,
            AmDisclosure::YellowDisclosedAM
        );
    }

    #[test]
    fn analyze_post_combines() {
        let f = analyze_post(&ig("#ad code SUMMER for 10% off", None), &lexicon()).unwrap();
        assert_eq!(f.disclosure.class, DisclosureClass::GreenWordsPosition);
        assert_eq!(f.am.am_disclosure, AmDisclosure::GreenDisclosedAM);
    }
}
