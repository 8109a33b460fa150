//! Tweet JSON-lines.
//!
//! One object per line:
//!
//! ```text
//! {"id":str, "created_at":ISO-8601 UTC, "text":str,
//!  "author":{"id":str,"created_at":ISO-8601,"followers":int,"friends":int,
//!            "statuses":int,"verified":bool},
//!  "in_reply_to":str|null, "retweet_of":str|null, "retweet_count":int,
//!  "entities":{"hashtags":[str],"urls":[str],"media":[str],"mentions":[str]}}
//! ```
//!
//! `id`, `created_at`, `text`, and `author.id` are required. A missing
//! `author.created_at` defaults to the tweet's own timestamp; everything else
//! defaults to zero, false, absent, or empty.

use std::collections::BTreeSet;
use std::io::BufRead;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};
use threadcred_core::ingest::Timestamp;
use threadcred_core::{ThreadTree, TweetRecord};

use crate::error::{IoError, IoResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Abort on the first bad line.
    Strict,
    /// Skip bad lines and report them.
    #[default]
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedTweets {
    pub records: Vec<TweetRecord>,
    pub skipped: Vec<LineError>,
}

#[derive(Serialize, Deserialize)]
struct WireAuthor {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    created_at: Option<String>,
    #[serde(default)]
    followers: u64,
    #[serde(default)]
    friends: u64,
    #[serde(default)]
    statuses: u64,
    #[serde(default)]
    verified: bool,
}

#[derive(Serialize, Deserialize, Default)]
struct WireEntities {
    #[serde(default)]
    hashtags: Vec<String>,
    #[serde(default)]
    urls: Vec<String>,
    #[serde(default)]
    media: Vec<String>,
    #[serde(default)]
    mentions: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct WireTweet {
    id: String,
    created_at: String,
    text: String,
    author: WireAuthor,
    #[serde(default)]
    in_reply_to: Option<String>,
    #[serde(default)]
    retweet_of: Option<String>,
    #[serde(default)]
    retweet_count: u64,
    #[serde(default)]
    entities: WireEntities,
}

/// Seconds since the epoch for an RFC 3339 timestamp, or for a bare
/// `YYYY-MM-DDTHH:MM:SS` read as UTC. Fractional seconds are truncated.
pub fn parse_timestamp(s: &str) -> Result<Timestamp, String> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.timestamp());
    }
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f")
        .map(|t| t.and_utc().timestamp())
        .map_err(|e| format!("invalid timestamp {s:?}: {e}"))
}

pub fn format_timestamp(t: Timestamp) -> String {
    match DateTime::from_timestamp(t, 0) {
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
        None => t.to_string(),
    }
}

fn from_wire(w: WireTweet) -> Result<TweetRecord, String> {
    if w.id.is_empty() {
        return Err("empty tweet id".into());
    }
    let created_at = parse_timestamp(&w.created_at)?;
    let author_created_at = match &w.author.created_at {
        Some(s) => parse_timestamp(s)?,
        None => created_at,
    };
    Ok(TweetRecord {
        id: w.id,
        created_at,
        text: w.text,
        author_id: w.author.id,
        author_created_at,
        followers: w.author.followers,
        friends: w.author.friends,
        statuses: w.author.statuses,
        verified: w.author.verified,
        in_reply_to: w.in_reply_to,
        retweet_of: w.retweet_of,
        retweet_count: w.retweet_count,
        hashtags: w.entities.hashtags,
        urls: w.entities.urls,
        media: w.entities.media,
        mentions: w.entities.mentions,
    })
}

fn to_wire(t: &TweetRecord) -> WireTweet {
    WireTweet {
        id: t.id.clone(),
        created_at: format_timestamp(t.created_at),
        text: t.text.clone(),
        author: WireAuthor {
            id: t.author_id.clone(),
            created_at: Some(format_timestamp(t.author_created_at)),
            followers: t.followers,
            friends: t.friends,
            statuses: t.statuses,
            verified: t.verified,
        },
        in_reply_to: t.in_reply_to.clone(),
        retweet_of: t.retweet_of.clone(),
        retweet_count: t.retweet_count,
        entities: WireEntities {
            hashtags: t.hashtags.clone(),
            urls: t.urls.clone(),
            media: t.media.clone(),
            mentions: t.mentions.clone(),
        },
    }
}

/// Parses one line; `Ok(None)` for blank lines.
pub fn parse_line(line: &str) -> Result<Option<TweetRecord>, String> {
    if line.trim().is_empty() {
        return Ok(None);
    }
    let wire: WireTweet = serde_json::from_str(line).map_err(|e| e.to_string())?;
    from_wire(wire).map(Some)
}

/// Parses a tweet stream. Line numbers start at 1.
pub fn parse_tweets(reader: impl BufRead, mode: ParseMode) -> Result<ParsedTweets, LineError> {
    let mut out = ParsedTweets::default();
    for (i, line) in reader.lines().enumerate() {
        let number = i + 1;
        let parsed = line.map_err(|e| e.to_string()).and_then(|l| parse_line(&l));
        match parsed {
            Ok(Some(t)) => out.records.push(t),
            Ok(None) => {}
            Err(message) => {
                let err = LineError { line: number, message };
                match mode {
                    ParseMode::Strict => return Err(err),
                    ParseMode::Lenient => out.skipped.push(err),
                }
            }
        }
    }
    Ok(out)
}

pub fn read_tweets(path: &Path, mode: ParseMode) -> IoResult<ParsedTweets> {
    let file = std::fs::File::open(path).map_err(|e| IoError::io(path, e))?;
    parse_tweets(std::io::BufReader::new(file), mode).map_err(|e| IoError::line(path, e.line, e.message))
}

/// Rebuilds the single thread stored in a thread file.
///
/// The root is the one tweet without a parent, or, failing that, the one
/// tweet whose parent lies outside the file (a re-rooted event thread).
pub fn thread_from_tweets(tweets: &[TweetRecord]) -> Result<ThreadTree, String> {
    let ids: BTreeSet<&str> = tweets.iter().map(|t| t.id.as_str()).collect();
    if ids.len() != tweets.len() {
        return Err("duplicate tweet ids".into());
    }
    let parentless: Vec<&TweetRecord> = tweets.iter().filter(|t| t.parent_id().is_none()).collect();
    let root = match parentless.as_slice() {
        [one] => *one,
        [] => {
            let detached: Vec<&TweetRecord> = tweets
                .iter()
                .filter(|t| t.parent_id().is_some_and(|p| !ids.contains(p)))
                .collect();
            match detached.as_slice() {
                [one] => *one,
                [] => return Err("no root tweet".into()),
                _ => return Err(format!("{} candidate roots", detached.len())),
            }
        }
        many => return Err(format!("{} parentless tweets", many.len())),
    };
    Ok(ThreadTree::grow(&root.id, tweets).expect("root is in the pool"))
}

/// Reads a thread file. Returns the tree and the lines skipped in lenient
/// mode.
pub fn read_thread(path: &Path, mode: ParseMode) -> IoResult<(ThreadTree, Vec<LineError>)> {
    let parsed = read_tweets(path, mode)?;
    let tree = thread_from_tweets(&parsed.records).map_err(|m| IoError::format(path, m))?;
    Ok((tree, parsed.skipped))
}

pub fn to_jsonl(tweets: &[TweetRecord]) -> String {
    let mut out = String::new();
    for t in tweets {
        out.push_str(&serde_json::to_string(&to_wire(t)).expect("tweet serializes"));
        out.push('\n');
    }
    out
}

pub fn write_tweets(path: &Path, tweets: &[TweetRecord]) -> IoResult<()> {
    crate::error::write_string(path, &to_jsonl(tweets))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{"id":"1","created_at":"2015-01-07T12:00:00Z","text":"hi #x","author":{"id":"u","created_at":"2010-01-01T00:00:00Z","followers":5,"friends":6,"statuses":7,"verified":true},"in_reply_to":null,"retweet_of":"0","retweet_count":3,"entities":{"hashtags":["x"],"urls":["http://a"],"media":["m"],"mentions":["v"]}}"#;

    #[test]
    fn full_record_round_trips() {
        let t = parse_line(FULL).unwrap().unwrap();
        assert_eq!(t.created_at, 1_420_632_000);
        assert_eq!(t.author_created_at, 1_262_304_000);
        assert_eq!((t.followers, t.friends, t.statuses, t.verified), (5, 6, 7, true));
        assert!(t.is_retweet());
        assert_eq!(t.mentions, ["v"]);
        let again = parse_line(to_jsonl(std::slice::from_ref(&t)).trim()).unwrap().unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn optional_fields_default() {
        let t = parse_line(r#"{"id":"2","created_at":"2015-01-07T12:00:00Z","text":"","author":{"id":"u"}}"#)
            .unwrap()
            .unwrap();
        assert!(!t.is_retweet());
        assert_eq!(t.in_reply_to, None);
        assert_eq!(t.author_created_at, t.created_at);
        assert!(t.hashtags.is_empty());
    }

    #[test]
    fn invalid_calendar_date_names_line() {
        let bad = r#"{"id":"3","created_at":"2014-13-40T99:99:99Z","text":"x","author":{"id":"u"}}"#;
        let input = format!("{FULL}\n\n{bad}\n");
        let err = parse_tweets(input.as_bytes(), ParseMode::Strict).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("2014-13-40"));
        let lenient = parse_tweets(input.as_bytes(), ParseMode::Lenient).unwrap();
        assert_eq!(lenient.records.len(), 1);
        assert_eq!(lenient.skipped.len(), 1);
    }

    #[test]
    fn missing_required_field_is_an_error() {
        for line in [
            r#"{"created_at":"2015-01-07T12:00:00Z","text":"x","author":{"id":"u"}}"#,
            r#"{"id":"1","text":"x","author":{"id":"u"}}"#,
            r#"{"id":"1","created_at":"2015-01-07T12:00:00Z","author":{"id":"u"}}"#,
            r#"{"id":"1","created_at":"2015-01-07T12:00:00Z","text":"x","author":{}}"#,
            r#"{"id":"1","created_at":"2015-01-07T12:00:00Z","text":"x","author":{"id":"u","followers":-1}}"#,
            "not json",
        ] {
            assert!(parse_line(line).is_err(), "{line}");
        }
    }

    #[test]
    fn thread_roots() {
        let mk = |id: &str, parent: Option<&str>| TweetRecord {
            id: id.into(),
            in_reply_to: parent.map(String::from),
            ..TweetRecord::default()
        };
        let tree = thread_from_tweets(&[mk("a", None), mk("b", Some("a")), mk("c", Some("b"))]).unwrap();
        assert_eq!((tree.root_id(), tree.len()), ("a", 3));
        let rerooted = thread_from_tweets(&[mk("b", Some("a")), mk("c", Some("b"))]).unwrap();
        assert_eq!((rerooted.root_id(), rerooted.len()), ("b", 2));
        assert!(thread_from_tweets(&[mk("a", None), mk("b", None)]).is_err());
        assert!(thread_from_tweets(&[mk("b", Some("x")), mk("c", Some("y"))]).is_err());
        assert!(thread_from_tweets(&[]).is_err());
    }

    #[test]
    fn timestamps() {
        assert_eq!(parse_timestamp("1970-01-01T00:00:00Z").unwrap(), 0);
        assert_eq!(parse_timestamp("1970-01-01T01:00:00+01:00").unwrap(), 0);
        assert_eq!(parse_timestamp("1970-01-01T00:00:10.9").unwrap(), 10);
        assert_eq!(parse_timestamp("2016-02-29T00:00:00Z").unwrap(), 1_456_704_000);
        assert!(parse_timestamp("2015-02-29T00:00:00Z").is_err());
        assert_eq!(format_timestamp(1_420_632_000), "2015-01-07T12:00:00Z");
    }

    /// Days since 1970-01-01 for a proleptic Gregorian date, by counting.
    fn civil_days(y: i64, m: i64, d: i64) -> Option<i64> {
        let leap = |y: i64| (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        let month_len = [
            31,
            if leap(y) { 29 } else { 28 },
            31,
            30,
            31,
            30,
            31,
            31,
            30,
            31,
            30,
            31,
        ];
        if !(1..=12).contains(&m) || d < 1 || d > month_len[(m - 1) as usize] {
            return None;
        }
        let years: i64 = (1970..y).map(|yy| if leap(yy) { 366 } else { 365 }).sum();
        let months: i64 = month_len[..(m - 1) as usize].iter().sum();
        Some(years + months + d - 1)
    }

    proptest::proptest! {
        #[test]
        fn timestamps_match_calendar_oracle(y in 1970i64..2100, m in 0i64..14, d in 0i64..33, h in 0i64..26, mi in 0i64..62, sec in 0i64..60) {
            let text = format!("{y:04}-{m:02}-{d:02}T{h:02}:{mi:02}:{sec:02}Z");
            let expect = civil_days(y, m, d)
                .filter(|_| h < 24 && mi < 60)
                .map(|days| days * 86_400 + h * 3600 + mi * 60 + sec);
            proptest::prop_assert_eq!(parse_timestamp(&text).ok(), expect);
        }
    }
}
