use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use docrel::classifier::{predict as predict_pair, Checkpoint, PredictionRecord};
use docrel::dataset::{
    assemble_dataset, expand_missing_relations, filter_triples, harvest, id_pool, load_corpus, negative_sample,
    open_source, read_pairs, resolve_to_corpus, sample_balanced, write_corpus, write_manifest, write_pairs, Corpus,
    Provenance,
};
use docrel::embeddings::{concat, embed_corpus, load_word_vectors, train_pvdbow, ConcatScheme, Stopwords};
use docrel::evaluation::{
    confusion_svg, render_report, render_summary, AggregateReport, ConfusionMatrix, ReportFormat, SummaryRow,
};
use docrel::experiment::{run_cell, train_full, CellResult, ExperimentConfig};
use docrel::synthetic::{generate, SyntheticConfig};
use docrel::{DocVectors, Error, Real, RelationClass, Result};
use serde::{Deserialize, Serialize};

use crate::config::{Embedder, RunConfig};

/// Resolves an input path from the flag or the config and checks it exists.
fn input(flag: Option<PathBuf>, configured: &Option<PathBuf>, what: &str, hint: &str) -> Result<PathBuf> {
    let path = flag
        .or_else(|| configured.clone())
        .ok_or_else(|| Error::Config(format!("no {what} given: pass {hint} or set it in the config")))?;
    if !path.exists() {
        return Err(Error::io(
            &path,
            io::Error::new(io::ErrorKind::NotFound, format!("{what} not found")),
        ));
    }
    Ok(path)
}

fn output_dir(flag: Option<PathBuf>, cfg: &RunConfig, default: &str) -> Result<PathBuf> {
    let dir = flag
        .or_else(|| cfg.paths.output.clone())
        .unwrap_or_else(|| PathBuf::from(default));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn stopwords(cfg: &RunConfig) -> Result<Stopwords> {
    match &cfg.paths.stopwords {
        Some(p) => Stopwords::load(p),
        None => Ok(Stopwords::english()),
    }
}

pub fn build_dataset(
    cfg: &RunConfig,
    corpus: Option<PathBuf>,
    out: Option<PathBuf>,
    cache: Option<PathBuf>,
) -> Result<()> {
    let corpus_path = input(corpus, &cfg.paths.corpus, "corpus", "--corpus")?;
    let ds = &cfg.dataset;
    if ds.pids.is_empty() {
        return Err(Error::Config("dataset.pids is empty".into()));
    }
    let corpus = load_corpus(&corpus_path)?;
    log::info!(
        "{}: {} documents ({} empty dropped)",
        corpus_path.display(),
        corpus.len(),
        corpus.dropped_empty
    );

    let out = output_dir(out, cfg, "dataset")?;
    let cache = cache
        .or_else(|| ds.cache_dir.clone())
        .unwrap_or_else(|| out.join("cache"));
    let endpoint = cfg.endpoint();
    let source = open_source(&endpoint)?;
    let pids: BTreeSet<RelationClass> = ds.pids.iter().copied().collect();

    let harvested = harvest(source.as_ref(), &pids, ds.page_size, Some(&cache))?;
    let per_class = ds.sample_size / pids.len();
    let sampled = sample_balanced(&harvested.triples, per_class, ds.sample_order, cfg.seed);
    let expanded = expand_missing_relations(source.as_ref(), &sampled, ds.expand_chunk)?;
    let (resolved, dropped) = resolve_to_corpus(&expanded, &corpus);
    let positives = filter_triples(&resolved);
    log::info!(
        "{} harvested, {} sampled, {} after expansion, {} outside the corpus, {} positive pairs",
        harvested.triples.len(),
        sampled.len(),
        expanded.len(),
        dropped,
        positives.len()
    );
    let negatives = negative_sample(&positives, &id_pool(&positives), positives.len(), cfg.seed)?;
    let provenance = Provenance {
        endpoint,
        harvested_at: harvested.fetched_at,
    };
    let (pairs, manifest) = assemble_dataset(positives, negatives, &corpus, cfg.seed, provenance)?;
    write_pairs(out.join("pairs.jsonl"), &pairs)?;
    write_manifest(out.join("manifest.json"), &manifest)?;

    println!("{:<24} {:>6} {:>7}", "relation", "pid", "pairs");
    for (class, n) in &manifest.counts {
        println!("{:<24} {:>6} {:>7}", class.name(), class.pid().unwrap_or("-"), n);
    }
    println!("{:<24} {:>6} {:>7}", "total", "", manifest.total);
    Ok(())
}

fn pvdbow_vectors(cfg: &RunConfig, corpus: &Corpus) -> Result<DocVectors> {
    let out = train_pvdbow::<Real>(corpus, &cfg.pvdbow)?;
    for (epoch, loss) in out.epoch_loss.iter().enumerate() {
        log::info!("epoch {}: loss {loss:.5}", epoch + 1);
    }
    if !out.untrained.is_empty() {
        log::warn!(
            "{} document(s) had no in-vocabulary word and keep their initial vector",
            out.untrained.len()
        );
    }
    Ok(out.vectors)
}

fn avgglove_vectors(cfg: &RunConfig, corpus: &Corpus, word_vectors: Option<PathBuf>) -> Result<DocVectors> {
    let path = input(word_vectors, &cfg.paths.word_vectors, "word vectors", "--word-vectors")?;
    let (words, stats) = load_word_vectors::<Real>(&path)?;
    log::info!(
        "{}: {} words, dim {}, {} line(s) rejected",
        path.display(),
        words.len(),
        words.dim(),
        stats.rejected
    );
    let (docs, flagged) = embed_corpus(corpus, &words, &stopwords(cfg)?)?;
    if !flagged.is_empty() {
        log::warn!("zero vectors for {} document(s), e.g. {}", flagged.len(), flagged[0]);
    }
    Ok(docs)
}

fn doc_vectors_for(cfg: &RunConfig, corpus: Option<PathBuf>, word_vectors: Option<PathBuf>) -> Result<DocVectors> {
    let corpus_path = input(corpus, &cfg.paths.corpus, "corpus", "--corpus")?;
    let corpus = load_corpus(&corpus_path)?;
    match cfg.embedder {
        Embedder::Avgglove => avgglove_vectors(cfg, &corpus, word_vectors),
        Embedder::Pvdbow => pvdbow_vectors(cfg, &corpus),
    }
}

fn vectors_out(flag: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.or_else(|| cfg.paths.doc_vectors.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{}_vectors.txt", cfg.embedder.name())))
}

pub fn train_embeddings(cfg: &RunConfig, corpus: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let cfg = RunConfig {
        embedder: Embedder::Pvdbow,
        ..cfg.clone()
    };
    embed(&cfg, corpus, None, out)
}

pub fn embed(
    cfg: &RunConfig,
    corpus: Option<PathBuf>,
    word_vectors: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<()> {
    let docs = doc_vectors_for(cfg, corpus, word_vectors)?;
    let out = vectors_out(out, cfg);
    docs.save(&out)?;
    println!(
        "{} document vectors (dim {}) written to {}",
        docs.len(),
        docs.dim(),
        out.display()
    );
    Ok(())
}

pub struct ExperimentArgs {
    pub pairs: Option<PathBuf>,
    pub doc_vectors: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub word_vectors: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub grid: bool,
    pub no_model: bool,
}

/// Identifies an experiment cell; stored next to its reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CellInfo {
    embedder: Embedder,
    scheme: ConcatScheme,
    k: usize,
    seed: u64,
    pairs: usize,
    fold_sizes: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ReportFile {
    report: AggregateReport,
    confusion: ConfusionMatrix,
}

pub fn experiment(cfg: &RunConfig, args: ExperimentArgs) -> Result<()> {
    let pairs_path = input(args.pairs, &cfg.paths.pairs, "pairs file", "--pairs")?;
    let doc_vectors = args.doc_vectors.or_else(|| cfg.paths.doc_vectors.clone());
    let corpus = args.corpus.or_else(|| cfg.paths.corpus.clone());
    if doc_vectors.is_none() && corpus.is_none() {
        return Err(Error::Config("experiment needs --doc-vectors or --corpus".into()));
    }
    let pairs = read_pairs(&pairs_path)?;
    let docs = match doc_vectors {
        Some(p) => DocVectors::load(input(Some(p), &None, "document vectors", "--doc-vectors")?)?,
        None => doc_vectors_for(cfg, corpus, args.word_vectors)?,
    };
    let out = output_dir(args.out, cfg, "runs")?;
    let schemes: Vec<ConcatScheme> = if args.grid {
        ConcatScheme::ALL.to_vec()
    } else {
        vec![cfg.scheme]
    };

    let mut rows = Vec::new();
    for scheme in schemes {
        let ecfg = ExperimentConfig {
            scheme,
            mlp: cfg.mlp.clone(),
            k: cfg.k,
            rng_seed: cfg.seed,
            parallel: cfg.parallel,
        };
        let cell = run_cell(&pairs, &docs, &ecfg)?;
        let dir = out.join(format!("{}_{}", cfg.embedder.name(), scheme.short_name()));
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        write_cell(&dir, cfg, &cell, pairs.len())?;
        if !args.no_model {
            let (model, _) = train_full(&pairs, &docs, &ecfg)?;
            let mut ckpt = Checkpoint::new(model);
            ckpt.metadata.insert("embedder".into(), cfg.embedder.name().into());
            ckpt.metadata.insert("scheme".into(), scheme.short_name().into());
            ckpt.metadata.insert("dim".into(), docs.dim().to_string());
            ckpt.metadata.insert("seed".into(), cfg.seed.to_string());
            ckpt.save(dir.join("model.json"))?;
        }
        log::info!("{}: micro-F1 {:.4}", dir.display(), cell.report.micro.f1.mean);
        rows.push(SummaryRow::new(cfg.embedder.display(), scheme.notation(), &cell.report));
    }
    let summary = render_summary(&rows, ReportFormat::Text);
    if args.grid {
        write_text(&out.join("summary.txt"), &summary)?;
        write_text(&out.join("summary.csv"), &render_summary(&rows, ReportFormat::Csv))?;
    }
    print!("{summary}");
    Ok(())
}

fn write_cell(dir: &Path, cfg: &RunConfig, cell: &CellResult, n_pairs: usize) -> Result<()> {
    for format in [ReportFormat::Text, ReportFormat::Csv, ReportFormat::Json] {
        let path = dir.join(format!("report.{}", format.extension()));
        write_text(&path, &render_report(&cell.report, &cell.confusion, format))?;
    }
    write_text(&dir.join("confusion.svg"), &confusion_svg(&cell.confusion))?;
    let records: Vec<&PredictionRecord> = cell.predictions().into_iter().map(|(_, r)| r).collect();
    docrel::io::write_jsonl(dir.join("predictions.jsonl"), records)?;
    cell.folds.save(dir.join("folds.jsonl"))?;
    let info = CellInfo {
        embedder: cfg.embedder,
        scheme: cell.scheme,
        k: cfg.k,
        seed: cfg.seed,
        pairs: n_pairs,
        fold_sizes: cell.folds.fold_sizes(),
    };
    docrel::io::write_json(dir.join("cell.json"), &info)
}

#[derive(Serialize)]
struct PredictOutput<'a> {
    #[serde(flatten)]
    record: &'a PredictionRecord,
    same_document: bool,
}

pub fn predict(
    cfg: &RunConfig,
    seed_id: &str,
    target_id: &str,
    model: &Path,
    doc_vectors: Option<PathBuf>,
    top: usize,
    json: bool,
) -> Result<()> {
    let model_path = input(Some(model.to_path_buf()), &None, "model", "--model")?;
    let vectors_path = input(doc_vectors, &cfg.paths.doc_vectors, "document vectors", "--doc-vectors")?;
    let ckpt = Checkpoint::<Real>::load(&model_path)?;
    let scheme: ConcatScheme = match ckpt.metadata.get("scheme") {
        Some(s) => s.parse()?,
        None => cfg.scheme,
    };
    let docs = DocVectors::load(&vectors_path)?;
    let missing: Vec<String> = [seed_id, target_id]
        .into_iter()
        .filter(|id| docs.get(id).is_none())
        .map(String::from)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingDocs(missing));
    }
    let x = concat(docs.get(seed_id).unwrap(), docs.get(target_id).unwrap(), scheme)?;
    let p = predict_pair(&ckpt.model, &x)?;
    let record = PredictionRecord::new(seed_id, target_id, None, &p);
    let same = seed_id == target_id;
    if json {
        let out = PredictOutput {
            record: &record,
            same_document: same,
        };
        println!("{}", serde_json::to_string(&out).expect("prediction serializes"));
    } else {
        let flag = if same {
            "  [seed and target are the same document]"
        } else {
            ""
        };
        println!("{seed_id} -> {target_id}: {}{flag}", record.describe(top)?);
    }
    Ok(())
}

fn cell_dirs(dirs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut cells = Vec::new();
    for d in dirs {
        if d.join("report.json").exists() {
            cells.push(d.clone());
            continue;
        }
        let entries = fs::read_dir(d).map_err(|e| Error::io(d, e))?;
        let mut found: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("report.json").exists())
            .collect();
        if found.is_empty() {
            return Err(Error::io(
                d,
                io::Error::new(io::ErrorKind::NotFound, "no experiment results (report.json) here"),
            ));
        }
        found.sort();
        cells.extend(found);
    }
    Ok(cells)
}

pub fn report(dirs: &[PathBuf], format: ReportFormat) -> Result<()> {
    let cells = cell_dirs(dirs)?;
    let mut loaded = Vec::with_capacity(cells.len());
    for dir in &cells {
        let info: CellInfo = docrel::io::read_json(dir.join("cell.json"))?;
        let file: ReportFile = docrel::io::read_json(dir.join("report.json"))?;
        loaded.push((info, file));
    }
    if let [(_, file)] = loaded.as_slice() {
        print!("{}", render_report(&file.report, &file.confusion, format));
    } else {
        let rows: Vec<SummaryRow> = loaded
            .iter()
            .map(|(info, file)| SummaryRow::new(info.embedder.display(), info.scheme.notation(), &file.report))
            .collect();
        print!("{}", render_summary(&rows, format));
    }
    Ok(())
}

pub fn synth(cfg: &RunConfig, out: &Path, preset: &str, pairs: Option<usize>) -> Result<()> {
    let mut sc = match preset {
        "separable" => SyntheticConfig::separable(),
        "overlapping" => SyntheticConfig::overlapping(),
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; expected separable or overlapping"
            )))
        }
    };
    sc.seed = cfg.seed;
    if let Some(n) = pairs {
        sc.pairs = n;
    }
    let data = generate::<Real>(&sc)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_corpus(out.join("corpus.jsonl"), &data.corpus)?;
    write_pairs(out.join("pairs.jsonl"), &data.pairs)?;
    data.vectors.save(out.join("word_vectors.txt"))?;
    println!(
        "{} pairs, {} documents, {} word vectors (dim {}) in {}",
        data.pairs.len(),
        data.corpus.len(),
        data.vectors.len(),
        data.vectors.dim(),
        out.display()
    );
    Ok(())
}
