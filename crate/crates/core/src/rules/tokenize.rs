use serde::{Deserialize, Serialize};

/// Surface emitted for any whitespace-delimited chunk that looks like a URL.
pub const URL_TOKEN: &str = "url";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// 1-based position among the emitted tokens.
    pub index: usize,
}

fn is_url(raw: &str) -> bool {
    let trimmed = raw.trim_start_matches(|c: char| !c.is_alphanumeric());
    let lower = trimmed.to_lowercase();
    raw.contains("://") || lower.starts_with("www.")
}

/// Normalize one whitespace-delimited chunk: lowercase, then keep only
/// alphanumeric characters. Leading `#`/`@` and every punctuation or symbol
/// character disappear. Returns `None` when nothing is left.
pub fn normalize_word(raw: &str) -> Option<String> {
    if is_url(raw) {
        return Some(URL_TOKEN.to_string());
    }
    let surface: String = raw
        .trim_start_matches(['#', '@'])
        .to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric())
        .collect();
    (!surface.is_empty()).then_some(surface)
}

/// Split on Unicode whitespace and normalize each chunk. Chunks that
/// normalize to nothing (emoji, punctuation) are dropped and do not take up
/// a position.
pub fn tokenize(text: &str) -> Vec<Token> {
    text.split_whitespace()
        .filter_map(normalize_word)
        .enumerate()
        .map(|(i, surface)| Token { surface, index: i + 1 })
        .collect()
}

/// Normalized surfaces only.
pub fn surfaces(text: &str) -> Vec<String> {
    text.split_whitespace().filter_map(normalize_word).collect()
}
