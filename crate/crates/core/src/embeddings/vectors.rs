//! Word and document vector tables and their text formats.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fixed-dimension vectors keyed by string.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorTable<T, M = HashMap<String, Vec<T>>> {
    dim: usize,
    entries: M,
    _scalar: std::marker::PhantomData<T>,
}

/// Pretrained word vectors; lookups only.
pub type WordVectorTable<T> = VectorTable<T, HashMap<String, Vec<T>>>;
/// Per-document vectors, iterated in doc id order.
pub type DocVectorTable<T> = VectorTable<T, BTreeMap<String, Vec<T>>>;

/// Map operations the tables need from their backing store.
pub trait VectorMap<T>: Default {
    fn get_vec(&self, key: &str) -> Option<&Vec<T>>;
    fn put(&mut self, key: String, v: Vec<T>) -> Option<Vec<T>>;
    fn size(&self) -> usize;
}

impl<T> VectorMap<T> for HashMap<String, Vec<T>> {
    fn get_vec(&self, key: &str) -> Option<&Vec<T>> {
        self.get(key)
    }
    fn put(&mut self, key: String, v: Vec<T>) -> Option<Vec<T>> {
        self.insert(key, v)
    }
    fn size(&self) -> usize {
        self.len()
    }
}

impl<T> VectorMap<T> for BTreeMap<String, Vec<T>> {
    fn get_vec(&self, key: &str) -> Option<&Vec<T>> {
        self.get(key)
    }
    fn put(&mut self, key: String, v: Vec<T>) -> Option<Vec<T>> {
        self.insert(key, v)
    }
    fn size(&self) -> usize {
        self.len()
    }
}

impl<T: Scalar, M: VectorMap<T>> VectorTable<T, M> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: M::default(),
            _scalar: std::marker::PhantomData,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<&[T]> {
        self.entries.get_vec(key).map(Vec::as_slice)
    }

    /// Inserts or replaces a vector; it must have `dim` finite components.
    pub fn insert(&mut self, key: impl Into<String>, v: Vec<T>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("vector has non-finite components".into()));
        }
        self.entries.put(key.into(), v);
        Ok(())
    }
}

impl<T: Scalar> WordVectorTable<T> {
    /// Writes `word v1 .. vN` lines sorted by word, with no header.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| Error::io(path, e);
        let mut words: Vec<&String> = self.entries.keys().collect();
        words.sort();
        let mut out = BufWriter::new(File::create(path).map_err(io)?);
        for w in words {
            write!(out, "{w}").map_err(io)?;
            for x in &self.entries[w] {
                write!(out, " {x}").map_err(io)?;
            }
            writeln!(out).map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

impl<T: Scalar> DocVectorTable<T> {
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[T])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Writes the `dim=N` header followed by one `doc_id v1 .. vN` line per document.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| Error::io(path, e);
        let mut out = BufWriter::new(File::create(path).map_err(io)?);
        writeln!(out, "dim={}", self.dim).map_err(io)?;
        for (id, v) in self.iter() {
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(Error::Invalid(format!(
                    "doc_id {id:?} cannot be written to a vector file"
                )));
            }
            write!(out, "{id}").map_err(io)?;
            for x in v {
                write!(out, " {x}").map_err(io)?;
            }
            writeln!(out).map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let parse_err = |line, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let header = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty file".into()))?
            .map_err(|e| Error::io(path, e))?;
        let dim: usize = header
            .trim()
            .strip_prefix("dim=")
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| parse_err(1, format!("expected header dim=N, got {header:?}")))?;
        let mut table = Self::new(dim);
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let (id, v) = parse_line::<T>(&line).map_err(|m| parse_err(i + 2, m))?;
            if v.len() != dim {
                return Err(parse_err(i + 2, format!("expected {dim} values, found {}", v.len())));
            }
            table.insert(id, v).map_err(|e| parse_err(i + 2, e.to_string()))?;
        }
        Ok(table)
    }
}

fn parse_line<T: Scalar>(line: &str) -> std::result::Result<(&str, Vec<T>), String> {
    let mut parts = line.split_whitespace();
    let key = parts.next().ok_or("blank line")?;
    let v = parts
        .map(|s| match T::parse_str(s) {
            Some(x) if x.is_finite() => Ok(x),
            _ => Err(format!("invalid value {s:?}")),
        })
        .collect::<std::result::Result<Vec<T>, _>>()?;
    Ok((key, v))
}

/// Outcome of a lenient word-vector load.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Lines skipped because their arity differed from the first line.
    pub rejected: usize,
    pub first_rejected_line: Option<usize>,
}

/// Loads whitespace-separated `word v1 .. vN` lines; `N` is taken from the
/// first line (a leading `count dim` header line, as written by word2vec,
/// is skipped). Lines of another arity are skipped and counted.
pub fn load_word_vectors<T: Scalar>(path: impl AsRef<Path>) -> Result<(WordVectorTable<T>, LoadStats)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_word_vectors(file, path, false)
}

/// Like [`load_word_vectors`] but any line of the wrong arity is an error
/// naming the line.
pub fn load_word_vectors_strict<T: Scalar>(path: impl AsRef<Path>) -> Result<WordVectorTable<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(read_word_vectors(file, path, true)?.0)
}

pub fn read_word_vectors<T: Scalar>(
    reader: impl Read,
    path: &Path,
    strict: bool,
) -> Result<(WordVectorTable<T>, LoadStats)> {
    let parse_err = |line, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut table: Option<WordVectorTable<T>> = None;
    let mut stats = LoadStats::default();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if table.is_none() && i == 0 && is_word2vec_header(&line) {
            continue;
        }
        let (word, v) = parse_line::<T>(&line).map_err(|m| parse_err(lineno, m))?;
        let t = table.get_or_insert_with(|| WordVectorTable::new(v.len()));
        if t.dim() == 0 {
            return Err(parse_err(lineno, "word without vector components".into()));
        }
        if v.len() != t.dim() {
            if strict {
                return Err(parse_err(
                    lineno,
                    format!("inconsistent dimensionality: expected {}, found {}", t.dim(), v.len()),
                ));
            }
            stats.rejected += 1;
            stats.first_rejected_line.get_or_insert(lineno);
            continue;
        }
        t.insert(word, v).map_err(|e| parse_err(lineno, e.to_string()))?;
    }
    let table = table.ok_or_else(|| parse_err(0, "empty word-vector file".into()))?;
    if stats.rejected > 0 {
        log::warn!(
            "{}: rejected {} line(s) with wrong arity (first at line {})",
            path.display(),
            stats.rejected,
            stats.first_rejected_line.unwrap_or(0)
        );
    }
    Ok((table, stats))
}

fn is_word2vec_header(line: &str) -> bool {
    let parts: Vec<_> = line.split_whitespace().collect();
    parts.len() == 2 && parts.iter().all(|p| p.parse::<usize>().is_ok())
}
