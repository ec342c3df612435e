//! JSON run configuration. One file drives data loading, the search, the
//! evaluator, the downstream classifier, and output placement. Unknown
//! keys are rejected; omitted keys take the documented defaults, and the
//! fully resolved document is echoed into every report.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::DecompositionConfig;
use crate::classify::SvmSpec;
use crate::dataset::{CsvOptions, LabelMapping, LabelSpec};
use crate::engine::{CrossoverKind, EvolutionConfig};
use crate::error::{Error, Result};
use crate::neurocost::TrainSpec;

/// Where each row's label comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSource {
    /// Named column; the file must carry a header row.
    Column(String),
    /// Zero-based column index.
    ColumnIndex(usize),
    /// Separate file with one raw label token per line.
    File(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    /// Delimited text file with the feature matrix. Required.
    pub path: String,
    pub label_spec: LabelSource,
    /// Cell contents treated as missing, matched after trimming.
    pub missing_tokens: Vec<String>,
    /// Raw label token to class map; omitted means labels are already 0/1.
    pub label_mapping: Option<BTreeMap<String, u8>>,
    /// Fraction of rows in the training split.
    pub split_ratio: f64,
    pub split_seed: u64,
    /// Single-character field delimiter.
    pub delimiter: String,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            path: String::new(),
            label_spec: LabelSource::Column("label".into()),
            missing_tokens: vec!["".into(), "NaN".into(), "nan".into()],
            label_mapping: None,
            split_ratio: 0.7,
            split_seed: 7,
            delimiter: ",".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineSection {
    pub pop_size: usize,
    pub offspring_rate: f64,
    pub generations: usize,
    pub crossover: CrossoverKind,
    pub mutation_start: f64,
    pub mutation_end: f64,
    pub hidden_neurons: usize,
    pub master_seed: u64,
}

impl Default for EngineSection {
    fn default() -> Self {
        let base = EvolutionConfig::new(42);
        EngineSection {
            pop_size: base.pop_size,
            offspring_rate: base.offspring_rate,
            generations: base.generations,
            crossover: base.crossover,
            mutation_start: base.mutation_start,
            mutation_end: base.mutation_end,
            hidden_neurons: base.hidden_neurons,
            master_seed: base.master_seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluatorSection {
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub val_fraction: f64,
}

impl Default for EvaluatorSection {
    fn default() -> Self {
        let base = TrainSpec::new(0);
        EvaluatorSection {
            learning_rate: base.learning_rate,
            momentum: base.momentum,
            epochs: base.epochs,
            batch_size: base.batch_size,
            val_fraction: base.val_fraction,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifierSection {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        let base = SvmSpec::new(0);
        ClassifierSection { lambda: base.lambda, epochs: base.epochs }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineSection {
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub pop_size: usize,
    pub generations: usize,
}

impl Default for BaselineSection {
    fn default() -> Self {
        let base = DecompositionConfig::new(0);
        BaselineSection {
            crossover_rate: base.crossover_rate,
            mutation_rate: base.mutation_rate,
            pop_size: base.pop_size,
            generations: base.generations,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub offspring_rates: Vec<f64>,
    pub pop_sizes: Vec<usize>,
    pub neuron_counts: Vec<usize>,
    pub seeds_per_cell: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            offspring_rates: vec![0.6, 0.7, 0.8, 0.9],
            pop_sizes: vec![600, 700, 800, 900],
            neuron_counts: vec![10, 15, 20],
            seeds_per_cell: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: "out".into() }
    }
}

/// The whole configuration document.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfigFile {
    pub data: DataSection,
    pub engine: EngineSection,
    pub evaluator: EvaluatorSection,
    pub classifier: ClassifierSection,
    pub baseline: BaselineSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

impl RunConfigFile {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfigFile = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.data.path.is_empty() {
            return Err(Error::Config("data.path is required".into()));
        }
        if !(self.data.split_ratio > 0.0 && self.data.split_ratio < 1.0) {
            return Err(Error::Config(format!(
                "data.split_ratio must be inside (0, 1), got {}",
                self.data.split_ratio
            )));
        }
        if self.data.delimiter.as_bytes().len() != 1 {
            return Err(Error::Config(format!(
                "data.delimiter must be a single byte, got {:?}",
                self.data.delimiter
            )));
        }
        self.evolution().validate()?;
        self.train_spec().validate()?;
        self.svm_spec().validate()?;
        self.decomposition(0.5, 0).validate()?;
        let grid = &self.sweep;
        if grid.offspring_rates.is_empty()
            || grid.pop_sizes.is_empty()
            || grid.neuron_counts.is_empty()
        {
            return Err(Error::Config("sweep lists must be nonempty".into()));
        }
        if grid.seeds_per_cell == 0 {
            return Err(Error::Config("sweep.seeds_per_cell must be positive".into()));
        }
        if self.output.directory.is_empty() {
            return Err(Error::Config("output.directory is required".into()));
        }
        Ok(())
    }

    pub fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            pop_size: self.engine.pop_size,
            offspring_rate: self.engine.offspring_rate,
            generations: self.engine.generations,
            crossover: self.engine.crossover,
            mutation_start: self.engine.mutation_start,
            mutation_end: self.engine.mutation_end,
            master_seed: self.engine.master_seed,
            hidden_neurons: self.engine.hidden_neurons,
        }
    }

    /// Base training settings; the per-pattern seed is filled in by the
    /// evaluator.
    pub fn train_spec(&self) -> TrainSpec {
        TrainSpec {
            hidden: self.engine.hidden_neurons,
            learning_rate: self.evaluator.learning_rate,
            momentum: self.evaluator.momentum,
            epochs: self.evaluator.epochs,
            batch_size: self.evaluator.batch_size,
            val_fraction: self.evaluator.val_fraction,
            seed: 0,
        }
    }

    pub fn svm_spec(&self) -> SvmSpec {
        SvmSpec {
            lambda: self.classifier.lambda,
            epochs: self.classifier.epochs,
            seed: self.engine.master_seed,
        }
    }

    pub fn decomposition(&self, weight: f64, seed: u64) -> DecompositionConfig {
        DecompositionConfig {
            weight,
            crossover_rate: self.baseline.crossover_rate,
            mutation_rate: self.baseline.mutation_rate,
            pop_size: self.baseline.pop_size,
            generations: self.baseline.generations,
            seed,
        }
    }

    pub fn label_spec(&self) -> LabelSpec {
        match &self.data.label_spec {
            LabelSource::Column(name) => LabelSpec::Column(name.clone()),
            LabelSource::ColumnIndex(i) => LabelSpec::ColumnIndex(*i),
            LabelSource::File(p) => LabelSpec::File(PathBuf::from(p)),
        }
    }

    pub fn csv_options(&self) -> Result<CsvOptions> {
        let mapping = match &self.data.label_mapping {
            None => LabelMapping::identity(),
            Some(map) => {
                LabelMapping::new(map.iter().map(|(k, &v)| (k.clone(), v)))?
            }
        };
        Ok(CsvOptions {
            label: self.label_spec(),
            missing_tokens: self.data.missing_tokens.clone(),
            label_mapping: mapping,
            delimiter: self.data.delimiter.as_bytes()[0],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(path: &str) -> String {
        format!(r#"{{"data": {{"path": "{path}"}}}}"#)
    }

    #[test]
    fn minimal_document_fills_every_default() {
        let cfg = RunConfigFile::from_json(&minimal("d.csv")).unwrap();
        assert_eq!(cfg.data.path, "d.csv");
        assert_eq!(cfg.data.split_ratio, 0.7);
        assert_eq!(cfg.data.split_seed, 7);
        assert_eq!(cfg.data.delimiter, ",");
        assert_eq!(cfg.engine.pop_size, 800);
        assert_eq!(cfg.engine.offspring_rate, 0.7);
        assert_eq!(cfg.engine.generations, 100);
        assert_eq!(cfg.engine.mutation_start, 0.05);
        assert_eq!(cfg.engine.mutation_end, 0.005);
        assert_eq!(cfg.engine.hidden_neurons, 15);
        assert_eq!(cfg.engine.master_seed, 42);
        assert_eq!(cfg.evaluator.learning_rate, 0.001);
        assert_eq!(cfg.evaluator.momentum, 0.9);
        assert_eq!(cfg.evaluator.epochs, 10);
        assert_eq!(cfg.evaluator.batch_size, 32);
        assert_eq!(cfg.evaluator.val_fraction, 0.2);
        assert_eq!(cfg.classifier.lambda, 1e-4);
        assert_eq!(cfg.classifier.epochs, 100);
        assert_eq!(cfg.baseline.pop_size, 700);
        assert_eq!(cfg.sweep.offspring_rates, vec![0.6, 0.7, 0.8, 0.9]);
        assert_eq!(cfg.sweep.pop_sizes, vec![600, 700, 800, 900]);
        assert_eq!(cfg.sweep.neuron_counts, vec![10, 15, 20]);
        assert_eq!(cfg.output.directory, "out");
    }

    #[test]
    fn resolved_config_round_trips_through_json() {
        let cfg = RunConfigFile::from_json(&minimal("d.csv")).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfigFile = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_keys_are_rejected_at_any_depth() {
        let top = r#"{"data": {"path": "d.csv"}, "mystery": 1}"#;
        assert!(matches!(
            RunConfigFile::from_json(top),
            Err(Error::Config(_))
        ));
        let nested = r#"{"data": {"path": "d.csv"}, "engine": {"popsize": 10}}"#;
        assert!(matches!(
            RunConfigFile::from_json(nested),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn malformed_json_is_a_config_error() {
        assert!(matches!(
            RunConfigFile::from_json("{not json"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn missing_data_path_is_a_config_error() {
        assert!(matches!(
            RunConfigFile::from_json("{}"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let bad = [
            r#"{"data": {"path": "d.csv", "split_ratio": 1.5}}"#,
            r#"{"data": {"path": "d.csv", "delimiter": ";;"}}"#,
            r#"{"data": {"path": "d.csv"}, "engine": {"pop_size": 3}}"#,
            r#"{"data": {"path": "d.csv"}, "evaluator": {"momentum": 1.5}}"#,
            r#"{"data": {"path": "d.csv"}, "classifier": {"lambda": 0.0}}"#,
            r#"{"data": {"path": "d.csv"}, "sweep": {"pop_sizes": []}}"#,
        ];
        for doc in bad {
            assert!(
                matches!(RunConfigFile::from_json(doc), Err(Error::Config(_))),
                "accepted {doc}"
            );
        }
    }

    #[test]
    fn label_sources_parse_into_loader_specs() {
        let by_name = r#"{"data": {"path": "d.csv", "label_spec": {"column": "y"}}}"#;
        let cfg = RunConfigFile::from_json(by_name).unwrap();
        assert_eq!(cfg.label_spec(), LabelSpec::Column("y".into()));

        let by_index =
            r#"{"data": {"path": "d.csv", "label_spec": {"column_index": 3}}}"#;
        let cfg = RunConfigFile::from_json(by_index).unwrap();
        assert_eq!(cfg.label_spec(), LabelSpec::ColumnIndex(3));

        let by_file = r#"{"data": {"path": "d.csv", "label_spec": {"file": "y.txt"}}}"#;
        let cfg = RunConfigFile::from_json(by_file).unwrap();
        assert_eq!(cfg.label_spec(), LabelSpec::File(PathBuf::from("y.txt")));
    }

    #[test]
    fn label_mapping_feeds_the_loader() {
        let doc = r#"{"data": {"path": "d.csv", "label_mapping": {"pass": 0, "fail": 1}}}"#;
        let cfg = RunConfigFile::from_json(doc).unwrap();
        let opts = cfg.csv_options().unwrap();
        assert_eq!(opts.label_mapping.apply("pass"), Some(0));
        assert_eq!(opts.label_mapping.apply("fail"), Some(1));
        assert_eq!(opts.label_mapping.apply("hold"), None);
    }

    #[test]
    fn derived_specs_carry_the_configured_values() {
        let doc = r#"{
            "data": {"path": "d.csv"},
            "engine": {"hidden_neurons": 20, "master_seed": 9},
            "evaluator": {"learning_rate": 0.01},
            "classifier": {"lambda": 0.5}
        }"#;
        let cfg = RunConfigFile::from_json(doc).unwrap();
        let ev = cfg.evolution();
        assert_eq!(ev.hidden_neurons, 20);
        assert_eq!(ev.master_seed, 9);
        let ts = cfg.train_spec();
        assert_eq!(ts.hidden, 20);
        assert_eq!(ts.learning_rate, 0.01);
        let svm = cfg.svm_spec();
        assert_eq!(svm.lambda, 0.5);
        assert_eq!(svm.seed, 9);
        let dec = cfg.decomposition(0.3, 4);
        assert_eq!(dec.weight, 0.3);
        assert_eq!(dec.seed, 4);
        assert_eq!(dec.pop_size, 700);
    }
}
