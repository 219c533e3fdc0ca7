use std::fs;
use std::path::Path;

use chrono::{TimeZone, Utc};
use proptest::prelude::*;
use tempfile::TempDir;

use disclosure_audit::corpus::{
    load_corpus, load_corpus_with, write_corpus, Account, Corpus, CorpusError, Language, LoadOptions, Platform, Post,
    RecordError,
};

const ACCOUNTS: &str = r#"{"id": "anna", "handle": "@anna", "platform": "Instagram", "followers": 120000, "is_influencer": true}
{"id": "bram", "handle": "@bram", "platform": "Instagram", "followers": 700000, "is_influencer": true}
{"id": "omroep", "handle": "@omroep", "platform": "Instagram", "followers": 50000, "is_influencer": false}
"#;

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn post_line(id: &str, account: &str, text: &str) -> String {
    format!(
        r#"{{"id": "{id}", "account_id": "{account}", "platform": "Instagram", "timestamp": "2023-05-01T12:00:00Z", "text": "{text}", "likes": 10, "comments": 2}}"#
    )
}

#[test]
fn non_influencer_posts_are_dropped_and_counted() {
    let dir = TempDir::new().unwrap();
    let posts = [
        post_line("1", "anna", "hallo"),
        post_line("2", "bram", "#ad nieuwe jas"),
        post_line("3", "omroep", "uitzending gemist"),
    ]
    .join("\n");
    let (corpus, report) = load_corpus(&write(dir.path(), "p.jsonl", &posts), &write(dir.path(), "a.jsonl", ACCOUNTS)).unwrap();
    assert_eq!(corpus.len(), 2);
    assert_eq!(report.dropped_non_influencer, 1);
    assert_eq!(report.dropped_invalid, 0);
    assert_eq!(report.accounts, 2);
    assert!(corpus.account(Platform::Instagram, "omroep").is_none());
}

#[test]
fn empty_posts_file_gives_empty_corpus() {
    let dir = TempDir::new().unwrap();
    let (corpus, report) = load_corpus(&write(dir.path(), "p.jsonl", "\n\n"), &write(dir.path(), "a.jsonl", ACCOUNTS)).unwrap();
    assert!(corpus.is_empty());
    assert_eq!(report.lines_in, 0);
}

#[test]
fn unknown_account_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let posts = post_line("1", "nobody", "hoi");
    let err = load_corpus(&write(dir.path(), "p.jsonl", &posts), &write(dir.path(), "a.jsonl", ACCOUNTS)).unwrap_err();
    match err {
        CorpusError::Validation { errors, .. } => {
            assert!(matches!(errors[0], RecordError::UnknownAccount { line: 1, .. }), "{errors:?}")
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn skip_invalid_keeps_the_line_arithmetic() {
    let dir = TempDir::new().unwrap();
    let posts = [
        post_line("1", "anna", "een"),
        "{not json".to_string(),
        post_line("2", "omroep", "twee"),
        r#"{"id": "3", "account_id": "anna", "platform": "Instagram", "timestamp": "2023-05-01", "text": "x", "likes": -1, "comments": 0}"#.to_string(),
        post_line("1", "bram", "duplicate id"),
        post_line("4", "bram", "vier"),
    ]
    .join("\n");
    let p = write(dir.path(), "p.jsonl", &posts);
    let a = write(dir.path(), "a.jsonl", ACCOUNTS);
    assert!(load_corpus(&p, &a).is_err());
    let (corpus, report) = load_corpus_with(&p, &a, LoadOptions { skip_invalid: true }).unwrap();
    assert_eq!(report.lines_in, 6);
    assert_eq!(report.dropped_invalid, 3);
    assert_eq!(report.dropped_non_influencer, 1);
    assert_eq!(corpus.len(), report.lines_in - report.dropped_invalid - report.dropped_non_influencer);
    assert_eq!(corpus.posts().iter().map(|p| p.id.as_str()).collect::<Vec<_>>(), ["1", "4"]);
}

fn arb_post() -> impl Strategy<Value = Post> {
    (
        prop_oneof![Just(Platform::Instagram), Just(Platform::YouTube), Just(Platform::TikTok)],
        0usize..3,
        "\\PC{0,40}",
        0u64..1_000_000,
        0u64..10_000,
        any::<bool>(),
        0i64..100_000_000,
        prop::option::of(prop_oneof![Just(Language::English), Just(Language::Dutch), Just(Language::Other)]),
    )
        .prop_map(|(platform, acct, text, likes, comments, toggle, secs, language)| Post {
            id: String::new(),
            account_id: format!("acct{acct}"),
            platform,
            timestamp: Utc.timestamp_opt(1_600_000_000 + secs, 0).unwrap(),
            text,
            likes,
            comments,
            toggle: (platform == Platform::Instagram).then_some(toggle),
            language,
        })
}

fn accounts() -> Vec<Account> {
    Platform::ALL
        .iter()
        .flat_map(|&platform| {
            (0..3).map(move |i| Account {
                id: format!("acct{i}"),
                handle: format!("@acct{i}"),
                platform,
                followers: 400_000 * i as u64,
                is_influencer: true,
            })
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn write_then_load_is_identity(mut posts in prop::collection::vec(arb_post(), 0..30)) {
        for (i, p) in posts.iter_mut().enumerate() {
            p.id = format!("post-{i}");
        }
        let n = posts.len();
        let corpus = Corpus::new(posts, accounts()).unwrap();
        let dir = TempDir::new().unwrap();
        let (p, a) = (dir.path().join("p.jsonl"), dir.path().join("a.jsonl"));
        write_corpus(&corpus, &p, &a).unwrap();
        let (loaded, report) = load_corpus(&p, &a).unwrap();
        prop_assert_eq!(report.posts_out, n);
        prop_assert_eq!(loaded, corpus);
    }
}
