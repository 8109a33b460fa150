//! Sentiment lexicons: TSV `token<TAB>polarity<TAB>subjectivity`, with blank
//! lines and `#` comments ignored.

use std::path::Path;

use threadcred_core::features::SentimentLexicon;

use crate::error::{read_to_string, IoError, IoResult};

const BUNDLED: &str = include_str!("../data/lexicon-v1.tsv");

/// Name recorded in outputs when the bundled lexicon is used.
pub const BUNDLED_NAME: &str = "bundled:lexicon-v1";

pub fn parse_lexicon(text: &str, path: &Path) -> IoResult<SentimentLexicon> {
    let mut lex = SentimentLexicon::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |m: String| IoError::line(path, i + 1, m);
        let fields: Vec<&str> = line.split('\t').collect();
        let [token, p, s] = fields[..] else {
            return Err(bad(format!("expected 3 tab-separated fields, got {}", fields.len())));
        };
        let p: f64 = p.trim().parse().map_err(|e| bad(format!("polarity: {e}")))?;
        let s: f64 = s.trim().parse().map_err(|e| bad(format!("subjectivity: {e}")))?;
        lex.insert(token.trim(), p, s).map_err(|e| bad(e.to_string()))?;
    }
    Ok(lex)
}

pub fn read_lexicon(path: &Path) -> IoResult<SentimentLexicon> {
    parse_lexicon(&read_to_string(path)?, path)
}

pub fn bundled_lexicon() -> SentimentLexicon {
    parse_lexicon(BUNDLED, Path::new(BUNDLED_NAME)).expect("bundled lexicon is valid")
}
