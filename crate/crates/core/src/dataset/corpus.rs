use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One article of the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qid: Option<String>,
    pub title: String,
    pub text: String,
}

/// Documents keyed by `doc_id`, iterated in id order.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    docs: BTreeMap<String, Document>,
    /// Records skipped at load time because their text was empty.
    pub dropped_empty: usize,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a document, rejecting a second document with the same id.
    pub fn insert(&mut self, doc: Document) -> Result<()> {
        if self.docs.contains_key(&doc.doc_id) {
            return Err(Error::DuplicateDocId(doc.doc_id));
        }
        self.docs.insert(doc.doc_id.clone(), doc);
        Ok(())
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.docs.get(doc_id)
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.docs.contains_key(doc_id)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Document> {
        self.docs.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.docs.keys().map(String::as_str)
    }

    /// Maps Wikidata item ids to the doc ids carrying them.
    pub fn qid_index(&self) -> BTreeMap<&str, &str> {
        self.docs
            .values()
            .filter_map(|d| d.qid.as_deref().map(|q| (q, d.doc_id.as_str())))
            .collect()
    }
}

impl FromIterator<Document> for Result<Corpus> {
    fn from_iter<I: IntoIterator<Item = Document>>(iter: I) -> Self {
        let mut corpus = Corpus::new();
        for doc in iter {
            corpus.insert(doc)?;
        }
        Ok(corpus)
    }
}

/// Loads a line-delimited JSON corpus. Blank lines are ignored and records
/// with empty text are dropped and counted in [`Corpus::dropped_empty`].
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(file, path)
}

pub fn read_corpus(reader: impl Read, path: &Path) -> Result<Corpus> {
    let mut corpus = Corpus::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        if doc.text.trim().is_empty() {
            corpus.dropped_empty += 1;
            continue;
        }
        corpus.insert(doc)?;
    }
    if corpus.dropped_empty > 0 {
        log::warn!(
            "{}: dropped {} record(s) with empty text",
            path.display(),
            corpus.dropped_empty
        );
    }
    Ok(corpus)
}

pub fn write_corpus(path: impl AsRef<Path>, corpus: &Corpus) -> Result<()> {
    crate::io::write_jsonl(path, corpus.iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<Corpus> {
        read_corpus(s.as_bytes(), Path::new("test.jsonl"))
    }

    #[test]
    fn three_records() {
        let c = read(concat!(
            r#"{"doc_id":"a","qid":"Q1","title":"A","text":"alpha"}"#,
            "\n",
            r#"{"doc_id":"b","title":"B","text":"beta"}"#,
            "\n",
            r#"{"doc_id":"c","title":"C","text":"gamma"}"#,
            "\n",
        ))
        .unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.dropped_empty, 0);
        assert_eq!(c.get("a").unwrap().qid.as_deref(), Some("Q1"));
        assert_eq!(c.get("b").unwrap().qid, None);
        assert_eq!(c.qid_index().get("Q1"), Some(&"a"));
    }

    #[test]
    fn duplicate_id_is_an_error() {
        let err = read(concat!(
            r#"{"doc_id":"a","title":"A","text":"x"}"#,
            "\n",
            r#"{"doc_id":"a","title":"A2","text":"y"}"#,
            "\n",
        ))
        .unwrap_err();
        assert!(err.to_string().contains("duplicate doc_id"), "{err}");
        assert!(err.to_string().contains("\"a\""));
    }

    #[test]
    fn empty_text_is_dropped_and_counted() {
        let c = read(concat!(
            r#"{"doc_id":"a","title":"A","text":"x"}"#,
            "\n",
            r#"{"doc_id":"b","title":"B","text":""}"#,
            "\n",
        ))
        .unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.dropped_empty, 1);
    }

    #[test]
    fn malformed_line_names_line_number() {
        let err = read("{\"doc_id\":\"a\",\"title\":\"A\",\"text\":\"x\"}\nnot json\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }
}
