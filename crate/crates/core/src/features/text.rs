//! Tweet-text signals: lexicon sentiment and punctuation/pronoun/emoticon markers.

use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::error::{Error, Result};
use crate::stance::tokenize;

pub const FIRST_PERSON: [&str; 8] = ["i", "me", "my", "mine", "we", "us", "our", "ours"];
pub const SECOND_PERSON: [&str; 3] = ["you", "your", "yours"];
pub const THIRD_PERSON: [&str; 12] = [
    "he", "she", "they", "him", "her", "them", "his", "hers", "their", "theirs", "it", "its",
];
pub const SMILES: [&str; 6] = [":)", ":-)", ":D", "=)", ";)", "(:"];

/// Token-level polarity in [-1, 1] and subjectivity in [0, 1].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentLexicon {
    entries: BTreeMap<String, (f64, f64)>,
}

impl SentimentLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: &str, polarity: f64, subjectivity: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&polarity) || !(0.0..=1.0).contains(&subjectivity) {
            return Err(Error::InvalidConfig(alloc::format!(
                "lexicon entry \"{token}\" out of range: ({polarity}, {subjectivity})"
            )));
        }
        let token = token.to_lowercase();
        if self.entries.contains_key(&token) {
            return Err(Error::InvalidConfig(alloc::format!(
                "duplicate lexicon token \"{token}\""
            )));
        }
        self.entries.insert(token, (polarity, subjectivity));
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<(f64, f64)> {
        self.entries.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64, f64)> {
        self.entries.iter().map(|(k, &(p, s))| (k.as_str(), p, s))
    }
}

impl<'a> FromIterator<(&'a str, f64, f64)> for SentimentLexicon {
    /// Later duplicates and out-of-range entries are skipped.
    fn from_iter<I: IntoIterator<Item = (&'a str, f64, f64)>>(iter: I) -> Self {
        let mut lex = SentimentLexicon::new();
        for (t, p, s) in iter {
            let _ = lex.insert(t, p, s);
        }
        lex
    }
}

/// Mean `(polarity, subjectivity)` over the lexicon tokens in `text`;
/// `(0, 0)` when none match.
pub fn sentiment(text: &str, lexicon: &SentimentLexicon) -> (f64, f64) {
    sentiment_of_tokens(&tokenize(text), lexicon)
}

pub(crate) fn sentiment_of_tokens(tokens: &[String], lexicon: &SentimentLexicon) -> (f64, f64) {
    let (mut p, mut s, mut n) = (0.0, 0.0, 0usize);
    for tok in tokens {
        if let Some((tp, ts)) = lexicon.get(tok) {
            p += tp;
            s += ts;
            n += 1;
        }
    }
    if n == 0 {
        (0.0, 0.0)
    } else {
        (p / n as f64, s / n as f64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContentMarkers {
    pub question: bool,
    pub exclamation: bool,
    /// Two or more adjacent `?`/`!` characters in any mix.
    pub multi_punct: bool,
    pub first_pronoun: bool,
    pub second_pronoun: bool,
    pub third_pronoun: bool,
    pub smile: bool,
}

pub fn content_markers(text: &str) -> ContentMarkers {
    markers_with_tokens(text, &tokenize(text))
}

pub(crate) fn markers_with_tokens(text: &str, tokens: &[String]) -> ContentMarkers {
    let is_punct = |c: char| c == '?' || c == '!';
    let mut multi_punct = false;
    let mut prev = None;
    for c in text.chars() {
        if is_punct(c) && prev.is_some_and(is_punct) {
            multi_punct = true;
            break;
        }
        prev = Some(c);
    }
    let has = |list: &[&str]| tokens.iter().any(|t| list.contains(&t.as_str()));
    ContentMarkers {
        question: text.contains('?'),
        exclamation: text.contains('!'),
        multi_punct,
        first_pronoun: has(&FIRST_PERSON),
        second_pronoun: has(&SECOND_PERSON),
        third_pronoun: has(&THIRD_PERSON),
        smile: SMILES.iter().any(|s| text.contains(s)),
    }
}

impl ContentMarkers {
    pub fn to_flags(self) -> [bool; 7] {
        [
            self.question,
            self.exclamation,
            self.multi_punct,
            self.first_pronoun,
            self.second_pronoun,
            self.third_pronoun,
            self.smile,
        ]
    }
}
