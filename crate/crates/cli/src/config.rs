use std::path::{Path, PathBuf};

use clap::ValueEnum;
use docrel::classifier::MlpConfig;
use docrel::dataset::SampleOrder;
use docrel::embeddings::{ConcatScheme, PvdbowConfig};
use docrel::{Error, RelationClass, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Embedder {
    #[default]
    Avgglove,
    Pvdbow,
}

impl Embedder {
    pub fn name(self) -> &'static str {
        match self {
            Embedder::Avgglove => "avgglove",
            Embedder::Pvdbow => "pvdbow",
        }
    }

    /// Model name used in report tables.
    pub fn display(self) -> &'static str {
        match self {
            Embedder::Avgglove => "AvgGloVe",
            Embedder::Pvdbow => "Doc2vec",
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub pairs: Option<PathBuf>,
    pub word_vectors: Option<PathBuf>,
    pub doc_vectors: Option<PathBuf>,
    /// Stopword list, one word per line; the bundled English list otherwise.
    pub stopwords: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSettings {
    pub pids: Vec<RelationClass>,
    /// Pairs sampled before expansion, split evenly over `pids`.
    pub sample_size: usize,
    pub sample_order: SampleOrder,
    pub page_size: usize,
    /// Items per VALUES block when looking up missing relations.
    pub expand_chunk: usize,
    pub cache_dir: Option<PathBuf>,
}

impl Default for DatasetSettings {
    fn default() -> Self {
        Self {
            pids: RelationClass::POSITIVE.to_vec(),
            sample_size: 10_000,
            sample_order: SampleOrder::Random,
            page_size: 10_000,
            expand_chunk: 200,
            cache_dir: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Drives every random choice; copied into the model configs.
    pub seed: u64,
    pub embedder: Embedder,
    pub scheme: ConcatScheme,
    pub k: usize,
    /// Used when `SPARQL_ENDPOINT` is unset.
    pub sparql_endpoint: Option<String>,
    /// Run folds on all cores.
    pub parallel: bool,
    pub paths: Paths,
    pub dataset: DatasetSettings,
    pub mlp: MlpConfig,
    pub pvdbow: PvdbowConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            embedder: Embedder::default(),
            scheme: ConcatScheme::UvDiffProd,
            k: 4,
            sparql_endpoint: None,
            parallel: true,
            paths: Paths::default(),
            dataset: DatasetSettings::default(),
            mlp: MlpConfig::default(),
            pvdbow: PvdbowConfig::default(),
        }
    }
}

pub struct Overrides {
    pub seed: Option<u64>,
    pub scheme: Option<ConcatScheme>,
    pub embedder: Option<Embedder>,
    pub k: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.paths.corpus,
            &mut cfg.paths.pairs,
            &mut cfg.paths.word_vectors,
            &mut cfg.paths.doc_vectors,
            &mut cfg.paths.stopwords,
            &mut cfg.paths.output,
            &mut cfg.dataset.cache_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(s) = o.scheme {
            self.scheme = s;
        }
        if let Some(e) = o.embedder {
            self.embedder = e;
        }
        if let Some(k) = o.k {
            self.k = k;
        }
        self.mlp.rng_seed = self.seed;
        self.pvdbow.rng_seed = self.seed;
    }

    pub fn endpoint(&self) -> String {
        match (std::env::var(docrel::dataset::ENDPOINT_ENV), &self.sparql_endpoint) {
            (Ok(e), _) if !e.is_empty() => e,
            (_, Some(e)) => e.clone(),
            _ => docrel::dataset::DEFAULT_ENDPOINT.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_empty_file() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg.k, 4);
        assert_eq!(cfg.scheme, ConcatScheme::UvDiffProd);
        assert_eq!(cfg.dataset.pids.len(), 9);
        assert_eq!(cfg.mlp.hidden_layers, vec![512, 512]);
    }

    #[test]
    fn sections_and_overrides() {
        let mut cfg: RunConfig = toml::from_str(
            r#"
            seed = 9
            embedder = "pvdbow"
            scheme = "uv"
            [dataset]
            pids = ["P27", "P780"]
            sample_order = "first_n"
            [mlp]
            hidden_layers = [32]
            epochs = 3
            "#,
        )
        .unwrap();
        assert_eq!(
            cfg.dataset.pids,
            vec![RelationClass::CountryOfCitizenship, RelationClass::Symptoms]
        );
        assert_eq!(cfg.dataset.sample_order, SampleOrder::FirstN);
        cfg.apply(Overrides {
            seed: None,
            scheme: Some(ConcatScheme::UvDiff),
            embedder: None,
            k: Some(5),
        });
        assert_eq!((cfg.seed, cfg.mlp.rng_seed, cfg.pvdbow.rng_seed), (9, 9, 9));
        assert_eq!(cfg.scheme, ConcatScheme::UvDiff);
        assert_eq!(cfg.embedder, Embedder::Pvdbow);
        assert_eq!(cfg.k, 5);
        assert_eq!(cfg.mlp.epochs, 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("sed = 3").is_err());
    }
}
