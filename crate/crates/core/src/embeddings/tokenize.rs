use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use crate::error::{Error, Result};

const ENGLISH: &str = include_str!("../../data/english_stopwords.txt");

fn token_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // two or more word characters between word boundaries
    RE.get_or_init(|| Regex::new(r"\b\w\w+\b").unwrap())
}

/// Lowercased tokens of `text`, in order.
pub fn tokens(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    token_pattern()
        .find_iter(&lower)
        .map(|m| m.as_str().to_string())
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// The 318-word English list bundled with the crate.
    pub fn english() -> Self {
        Self::parse(ENGLISH)
    }

    pub fn none() -> Self {
        Self::default()
    }

    /// One word per line; blank lines ignored.
    pub fn parse(s: &str) -> Self {
        Self(
            s.lines()
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect(),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, w: &str) -> bool {
        self.0.contains(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

/// Token counts of `text` after stopword removal.
pub fn tokenize_counts(text: &str, stopwords: &Stopwords) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for t in tokens(text) {
        if !stopwords.contains(&t) {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_after_stopwords() {
        let sw: Stopwords = ["the"].into_iter().collect();
        let c = tokenize_counts("The cat cat sat", &sw);
        assert_eq!(c, BTreeMap::from([("cat".to_string(), 2), ("sat".to_string(), 1)]));
    }

    #[test]
    fn empty_and_short_tokens() {
        assert!(tokenize_counts("", &Stopwords::none()).is_empty());
        assert!(tokenize_counts("a I x", &Stopwords::none()).is_empty());
    }

    #[test]
    fn punctuation_splits_and_digits_count() {
        assert_eq!(
            tokens("Lee County, Alabama's 1974-race"),
            ["lee", "county", "alabama", "1974", "race"]
        );
        assert_eq!(tokens("Zürich été"), ["zürich", "été"]);
    }

    #[test]
    fn bundled_list() {
        let sw = Stopwords::english();
        assert_eq!(sw.len(), 318);
        for w in ["the", "and", "whereupon", "amoungst"] {
            assert!(sw.contains(w), "{w}");
        }
        assert!(!sw.contains("cat"));
    }
}
