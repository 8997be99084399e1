//! Relation harvesting from a Wikidata SPARQL endpoint.
//!
//! Queries are templated per property and paginated with `LIMIT`/`OFFSET`
//! over a stable `ORDER BY`. Every binding must carry an English Wikipedia
//! sitelink for both items; bindings without one are dropped.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::relation::RelationClass;

pub const DEFAULT_ENDPOINT: &str = "https://query.wikidata.org/sparql";
pub const ENDPOINT_ENV: &str = "SPARQL_ENDPOINT";
const SPARQL_JSON: &str = "application/sparql-results+json";
const ENWIKI: &str = "https://en.wikipedia.org/";

/// A directed Wikidata statement `seed --pid--> target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationTriple {
    pub seed_qid: String,
    pub target_qid: String,
    pub pid: RelationClass,
}

impl RelationTriple {
    pub fn new(seed: impl Into<String>, target: impl Into<String>, pid: RelationClass) -> Self {
        debug_assert!(pid.is_positive());
        Self {
            seed_qid: seed.into(),
            target_qid: target.into(),
            pid,
        }
    }
}

/// One page of results. `rows` counts raw bindings, before sitelink filtering,
/// and drives pagination.
#[derive(Debug, Default)]
pub struct Page {
    pub triples: Vec<RelationTriple>,
    pub rows: usize,
}

/// Anything that can answer the two harvesting queries.
pub trait RelationSource {
    /// Endpoint description recorded in the dataset manifest.
    fn endpoint(&self) -> &str;

    /// All `?seed pid ?target` statements, one page at a time.
    fn fetch_page(&self, pid: RelationClass, limit: usize, offset: usize) -> Result<Page>;

    /// Statements `?seed pid ?target` whose seed is one of `seeds`.
    fn relations_from(&self, pid: RelationClass, seeds: &[&str]) -> Result<Vec<RelationTriple>>;
}

pub fn page_query(pid: RelationClass, limit: usize, offset: usize) -> String {
    let pid = pid.pid().expect("positive relation");
    format!(
        "SELECT ?seed ?target ?seedArticle ?targetArticle WHERE {{\n  \
           ?seed wdt:{pid} ?target .\n  \
           ?seedArticle schema:about ?seed ; schema:isPartOf <{ENWIKI}> .\n  \
           ?targetArticle schema:about ?target ; schema:isPartOf <{ENWIKI}> .\n\
         }}\nORDER BY ?seed ?target\nLIMIT {limit} OFFSET {offset}"
    )
}

pub fn relations_from_query(pid: RelationClass, seeds: &[&str]) -> String {
    let pid = pid.pid().expect("positive relation");
    let values: Vec<String> = seeds.iter().map(|q| format!("wd:{q}")).collect();
    format!(
        "SELECT ?seed ?target ?seedArticle ?targetArticle WHERE {{\n  \
           VALUES ?seed {{ {} }}\n  \
           ?seed wdt:{pid} ?target .\n  \
           ?seedArticle schema:about ?seed ; schema:isPartOf <{ENWIKI}> .\n  \
           ?targetArticle schema:about ?target ; schema:isPartOf <{ENWIKI}> .\n\
         }}",
        values.join(" ")
    )
}

/// Last path segment of an entity or property URI, e.g. `Q937` from
/// `http://www.wikidata.org/entity/Q937`.
pub fn id_from_uri(uri: &str) -> &str {
    uri.rsplit('/').next().unwrap_or(uri)
}

fn binding_value<'a>(binding: &'a Value, var: &str) -> Option<&'a str> {
    binding.get(var)?.get("value")?.as_str()
}

/// Parses a `application/sparql-results+json` document into triples.
///
/// The property comes from a `?pid` variable when present, otherwise from
/// `default_pid`. Bindings missing `?seedArticle` or `?targetArticle` are
/// skipped; any other missing or unrecognised field is a parse error naming
/// the binding index.
pub fn parse_results(body: &str, default_pid: Option<RelationClass>) -> Result<Page> {
    let json: Value = serde_json::from_str(body).map_err(|e| Error::SparqlParse(e.to_string()))?;
    let bindings = json
        .pointer("/results/bindings")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::SparqlParse("no results.bindings array".into()))?;
    let mut page = Page {
        rows: bindings.len(),
        ..Page::default()
    };
    for (i, b) in bindings.iter().enumerate() {
        let field = |var: &str| {
            binding_value(b, var).ok_or_else(|| Error::SparqlParse(format!("binding {i}: missing ?{var} in {b}")))
        };
        let seed = id_from_uri(field("seed")?);
        let target = id_from_uri(field("target")?);
        let pid = match binding_value(b, "pid") {
            Some(p) => RelationClass::from_pid(id_from_uri(p))
                .ok_or_else(|| Error::SparqlParse(format!("binding {i}: unsupported property {p}")))?,
            None => default_pid.ok_or_else(|| Error::SparqlParse(format!("binding {i}: missing ?pid in {b}")))?,
        };
        if binding_value(b, "seedArticle").is_none() || binding_value(b, "targetArticle").is_none() {
            continue;
        }
        page.triples.push(RelationTriple::new(seed, target, pid));
    }
    Ok(page)
}

/// Blocking HTTP client for a SPARQL endpoint.
pub struct SparqlClient {
    endpoint: String,
    http: reqwest::blocking::Client,
    pub max_retries: usize,
    pub backoff: Duration,
}

impl SparqlClient {
    pub fn new(endpoint: impl Into<String>) -> Result<Self> {
        let endpoint = endpoint.into();
        let http = reqwest::blocking::Client::builder()
            .user_agent(concat!("docrel/", env!("CARGO_PKG_VERSION")))
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| Error::Http {
                endpoint: endpoint.clone(),
                status: None,
                message: e.to_string(),
                retryable: false,
            })?;
        Ok(Self {
            endpoint,
            http,
            max_retries: 3,
            backoff: Duration::from_secs(2),
        })
    }

    /// Endpoint from `SPARQL_ENDPOINT`, falling back to the public Wikidata service.
    pub fn endpoint_from_env() -> String {
        std::env::var(ENDPOINT_ENV).unwrap_or_else(|_| DEFAULT_ENDPOINT.to_string())
    }

    fn select_once(&self, query: &str) -> Result<String> {
        let http_err = |status: Option<u16>, message: String, retryable: bool| Error::Http {
            endpoint: self.endpoint.clone(),
            status,
            message,
            retryable,
        };
        let resp = self
            .http
            .get(&self.endpoint)
            .query(&[("query", query)])
            .header(reqwest::header::ACCEPT, SPARQL_JSON)
            .send()
            .map_err(|e| http_err(None, e.to_string(), true))?;
        let status = resp.status();
        if !status.is_success() {
            let retryable = status.is_server_error() || status.as_u16() == 429;
            let body = resp.text().unwrap_or_default();
            let snippet: String = body.chars().take(200).collect();
            return Err(http_err(Some(status.as_u16()), snippet, retryable));
        }
        resp.text()
            .map_err(|e| http_err(Some(status.as_u16()), e.to_string(), true))
    }

    /// Runs a SELECT query, retrying retryable failures with linear backoff.
    pub fn select(&self, query: &str) -> Result<String> {
        let mut attempt = 0;
        loop {
            match self.select_once(query) {
                Err(Error::Http { retryable: true, .. }) if attempt < self.max_retries => {
                    attempt += 1;
                    log::warn!("{}: retrying ({attempt}/{})", self.endpoint, self.max_retries);
                    thread::sleep(self.backoff * attempt as u32);
                }
                other => return other,
            }
        }
    }
}

impl RelationSource for SparqlClient {
    fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn fetch_page(&self, pid: RelationClass, limit: usize, offset: usize) -> Result<Page> {
        let body = self.select(&page_query(pid, limit, offset))?;
        parse_results(&body, Some(pid))
    }

    fn relations_from(&self, pid: RelationClass, seeds: &[&str]) -> Result<Vec<RelationTriple>> {
        if seeds.is_empty() {
            return Ok(Vec::new());
        }
        let body = self.select(&relations_from_query(pid, seeds))?;
        Ok(parse_results(&body, Some(pid))?.triples)
    }
}

/// An offline endpoint backed by a single SPARQL results file whose bindings
/// carry `?seed ?target ?pid ?seedArticle ?targetArticle`.
#[derive(Debug, Clone)]
pub struct FixtureSource {
    name: String,
    triples: Vec<RelationTriple>,
}

impl FixtureSource {
    pub fn from_results(name: impl Into<String>, body: &str) -> Result<Self> {
        let mut triples = parse_results(body, None)?.triples;
        triples.sort();
        Ok(Self {
            name: name.into(),
            triples,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_results(format!("file://{}", path.display()), &body)
    }

    pub fn from_triples(name: impl Into<String>, mut triples: Vec<RelationTriple>) -> Self {
        triples.sort();
        Self {
            name: name.into(),
            triples,
        }
    }
}

impl RelationSource for FixtureSource {
    fn endpoint(&self) -> &str {
        &self.name
    }

    fn fetch_page(&self, pid: RelationClass, limit: usize, offset: usize) -> Result<Page> {
        let triples: Vec<_> = self
            .triples
            .iter()
            .filter(|t| t.pid == pid)
            .skip(offset)
            .take(limit)
            .cloned()
            .collect();
        Ok(Page {
            rows: triples.len(),
            triples,
        })
    }

    fn relations_from(&self, pid: RelationClass, seeds: &[&str]) -> Result<Vec<RelationTriple>> {
        let seeds: BTreeSet<&str> = seeds.iter().copied().collect();
        Ok(self
            .triples
            .iter()
            .filter(|t| t.pid == pid && seeds.contains(t.seed_qid.as_str()))
            .cloned()
            .collect())
    }
}

/// Opens `endpoint` as a live SPARQL service, or as a [`FixtureSource`] when
/// it is a `file://` URL.
pub fn open_source(endpoint: &str) -> Result<Box<dyn RelationSource>> {
    match endpoint.strip_prefix("file://") {
        Some(path) => Ok(Box::new(FixtureSource::load(path)?)),
        None => Ok(Box::new(SparqlClient::new(endpoint)?)),
    }
}

/// Harvests every statement for the requested properties, paging until a
/// short page signals exhaustion.
pub fn fetch_relations(
    source: &dyn RelationSource,
    pids: &BTreeSet<RelationClass>,
    page_size: usize,
) -> Result<Vec<RelationTriple>> {
    let mut out = Vec::new();
    for &pid in pids {
        out.extend(fetch_property(source, pid, page_size)?);
    }
    Ok(out)
}

fn fetch_property(source: &dyn RelationSource, pid: RelationClass, page_size: usize) -> Result<Vec<RelationTriple>> {
    if !pid.is_positive() {
        return Err(Error::Config("the None class cannot be harvested".into()));
    }
    if page_size == 0 {
        return Err(Error::Config("page_size must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut offset = 0;
    loop {
        let page = source.fetch_page(pid, page_size, offset)?;
        log::debug!(
            "{pid}: offset {offset}, {} rows, {} kept",
            page.rows,
            page.triples.len()
        );
        out.extend(page.triples);
        if page.rows < page_size {
            return Ok(out);
        }
        offset += page.rows;
    }
}

/// Adds every statement (among the nine properties) that links two items
/// already mentioned in `triples`. The result starts with `triples` in their
/// original order followed by newly found statements; duplicates are not added.
pub fn expand_missing_relations(
    source: &dyn RelationSource,
    triples: &[RelationTriple],
    chunk_size: usize,
) -> Result<Vec<RelationTriple>> {
    let mentioned: BTreeSet<&str> = triples
        .iter()
        .flat_map(|t| [t.seed_qid.as_str(), t.target_qid.as_str()])
        .collect();
    let items: Vec<&str> = mentioned.iter().copied().collect();
    let mut seen: BTreeSet<RelationTriple> = triples.iter().cloned().collect();
    let mut out = triples.to_vec();
    for pid in RelationClass::POSITIVE {
        for chunk in items.chunks(chunk_size.max(1)) {
            for t in source.relations_from(pid, chunk)? {
                if mentioned.contains(t.target_qid.as_str()) && seen.insert(t.clone()) {
                    out.push(t);
                }
            }
        }
    }
    Ok(out)
}

/// How the per-property sample is drawn before expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleOrder {
    #[default]
    Random,
    FirstN,
}

/// Keeps at most `per_class` triples of each property.
pub fn sample_balanced(
    triples: &[RelationTriple],
    per_class: usize,
    order: SampleOrder,
    seed: u64,
) -> Vec<RelationTriple> {
    let mut by_class: BTreeMap<RelationClass, Vec<&RelationTriple>> = BTreeMap::new();
    for t in triples {
        by_class.entry(t.pid).or_default().push(t);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (_, mut group) in by_class {
        if order == SampleOrder::Random {
            group.shuffle(&mut rng);
        }
        out.extend(group.into_iter().take(per_class).cloned());
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    pid: RelationClass,
    endpoint: String,
    fetched_at: String,
    triples: Vec<RelationTriple>,
}

/// Result of [`harvest`]: triples plus the time the oldest part was fetched.
#[derive(Debug)]
pub struct Harvest {
    pub triples: Vec<RelationTriple>,
    pub fetched_at: String,
}

/// [`fetch_relations`] with a per-property checkpoint in `cache_dir`.
/// Properties whose cache file exists are not fetched again.
pub fn harvest(
    source: &dyn RelationSource,
    pids: &BTreeSet<RelationClass>,
    page_size: usize,
    cache_dir: Option<&Path>,
) -> Result<Harvest> {
    let mut triples = Vec::new();
    let mut oldest: Option<String> = None;
    if let Some(dir) = cache_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    for &pid in pids {
        let cache_file: Option<PathBuf> = cache_dir.map(|d| d.join(format!("{}.json", pid.label())));
        let cached = match &cache_file {
            Some(f) if f.exists() => {
                let entry: CacheEntry = crate::io::read_json(f)?;
                if entry.endpoint != source.endpoint() {
                    log::warn!(
                        "{}: cached from {}, not {}",
                        f.display(),
                        entry.endpoint,
                        source.endpoint()
                    );
                }
                Some(entry)
            }
            _ => None,
        };
        let entry = match cached {
            Some(e) => e,
            None => {
                let entry = CacheEntry {
                    pid,
                    endpoint: source.endpoint().to_string(),
                    fetched_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                    triples: fetch_property(source, pid, page_size)?,
                };
                if let Some(f) = &cache_file {
                    crate::io::write_json(f, &entry)?;
                }
                entry
            }
        };
        if oldest.as_ref().is_none_or(|o| entry.fetched_at < *o) {
            oldest = Some(entry.fetched_at.clone());
        }
        triples.extend(entry.triples);
    }
    Ok(Harvest {
        triples,
        fetched_at: oldest.unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use RelationClass::{CountryOfCitizenship, EducatedAt, Employer, HasEffect, OppositeOf, Symptoms};

    const FIXTURE: &str = r#"{
      "head": {"vars": ["seed", "target", "pid", "seedArticle", "targetArticle"]},
      "results": {"bindings": [
        {"seed": {"type": "uri", "value": "http://www.wikidata.org/entity/Q937"},
         "target": {"type": "uri", "value": "http://www.wikidata.org/entity/Q43287"},
         "pid": {"type": "uri", "value": "http://www.wikidata.org/prop/direct/P27"},
         "seedArticle": {"type": "uri", "value": "https://en.wikipedia.org/wiki/Albert_Einstein"},
         "targetArticle": {"type": "uri", "value": "https://en.wikipedia.org/wiki/German_Empire"}},
        {"seed": {"type": "uri", "value": "http://www.wikidata.org/entity/Q1"},
         "target": {"type": "uri", "value": "http://www.wikidata.org/entity/Q2"},
         "pid": {"type": "literal", "value": "P27"},
         "seedArticle": {"type": "uri", "value": "https://en.wikipedia.org/wiki/A"}},
        {"seed": {"type": "uri", "value": "http://www.wikidata.org/entity/Q3"},
         "target": {"type": "uri", "value": "http://www.wikidata.org/entity/Q4"},
         "pid": {"type": "literal", "value": "P69"},
         "seedArticle": {"type": "uri", "value": "https://en.wikipedia.org/wiki/C"},
         "targetArticle": {"type": "uri", "value": "https://en.wikipedia.org/wiki/D"}}
      ]}
    }"#;

    #[test]
    fn binding_without_sitelink_is_dropped() {
        let page = parse_results(FIXTURE, None).unwrap();
        assert_eq!(page.rows, 3);
        assert_eq!(page.triples.len(), 2);
        assert_eq!(
            page.triples[0],
            RelationTriple::new("Q937", "Q43287", CountryOfCitizenship)
        );
        assert_eq!(page.triples[1].pid, EducatedAt);
    }

    #[test]
    fn malformed_binding_is_named() {
        let body = r#"{"results":{"bindings":[{"seed":{"value":"Q1"},"seedArticle":{"value":"x"}}]}}"#;
        let err = parse_results(body, Some(Employer)).unwrap_err();
        assert!(
            matches!(&err, Error::SparqlParse(m) if m.contains("binding 0") && m.contains("?target")),
            "{err}"
        );
        assert!(matches!(parse_results("{}", None), Err(Error::SparqlParse(_))));
        assert!(matches!(parse_results("<html>", None), Err(Error::SparqlParse(_))));
    }

    #[test]
    fn empty_property_set_fetches_nothing() {
        let src = FixtureSource::from_results("fixture", FIXTURE).unwrap();
        assert!(fetch_relations(&src, &BTreeSet::new(), 10).unwrap().is_empty());
    }

    #[test]
    fn pagination_runs_to_exhaustion() {
        let triples: Vec<_> = (0..23)
            .map(|i| RelationTriple::new(format!("Q{i}"), "Q999", Employer))
            .collect();
        let src = FixtureSource::from_triples("fixture", triples);
        for page_size in [1, 5, 23, 100] {
            let got = fetch_relations(&src, &BTreeSet::from([Employer]), page_size).unwrap();
            assert_eq!(got.len(), 23, "page_size {page_size}");
        }
    }

    #[test]
    fn expansion_adds_reverse_relation_between_known_items() {
        let endpoint = FixtureSource::from_triples(
            "fixture",
            vec![
                RelationTriple::new("A", "B", CountryOfCitizenship),
                RelationTriple::new("B", "A", OppositeOf),
                RelationTriple::new("B", "Z", OppositeOf),
            ],
        );
        let input = vec![RelationTriple::new("A", "B", CountryOfCitizenship)];
        let out = expand_missing_relations(&endpoint, &input, 1).unwrap();
        assert_eq!(
            out,
            vec![
                RelationTriple::new("A", "B", CountryOfCitizenship),
                RelationTriple::new("B", "A", OppositeOf),
            ]
        );
        // already closed: fixpoint
        assert_eq!(expand_missing_relations(&endpoint, &out, 50).unwrap(), out);
    }

    #[test]
    fn balanced_sample_caps_each_class() {
        let mut triples = Vec::new();
        for i in 0..10 {
            triples.push(RelationTriple::new(format!("Q{i}"), "X", Employer));
        }
        for i in 0..3 {
            triples.push(RelationTriple::new(format!("Q{i}"), "Y", Symptoms));
        }
        let s = sample_balanced(&triples, 4, SampleOrder::FirstN, 0);
        assert_eq!(s.len(), 7);
        assert_eq!(s[..4], triples[..4]);
        let r1 = sample_balanced(&triples, 4, SampleOrder::Random, 7);
        let r2 = sample_balanced(&triples, 4, SampleOrder::Random, 7);
        assert_eq!(r1, r2);
        assert_eq!(r1.iter().filter(|t| t.pid == Employer).count(), 4);
    }

    #[test]
    fn cache_makes_reruns_incremental() {
        let dir = tempfile::tempdir().unwrap();
        let src = FixtureSource::from_results("fixture", FIXTURE).unwrap();
        let pids = BTreeSet::from([CountryOfCitizenship, EducatedAt]);
        let first = harvest(&src, &pids, 10, Some(dir.path())).unwrap();
        assert!(dir.path().join("P27.json").exists());
        let empty = FixtureSource::from_triples("fixture", vec![]);
        let second = harvest(&empty, &pids, 10, Some(dir.path())).unwrap();
        assert_eq!(first.triples, second.triples);
        assert_eq!(first.fetched_at, second.fetched_at);
    }

    #[test]
    fn queries_mention_property_and_sitelinks() {
        let q = page_query(HasEffect, 500, 1000);
        assert!(q.contains("wdt:P1542"));
        assert!(q.contains("LIMIT 500 OFFSET 1000"));
        assert!(q.contains("schema:isPartOf <https://en.wikipedia.org/>"));
        let q = relations_from_query(Symptoms, &["Q1", "Q2"]);
        assert!(q.contains("VALUES ?seed { wd:Q1 wd:Q2 }"));
    }
}
