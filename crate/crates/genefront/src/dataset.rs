//! Tabular data ingestion and preparation: CSV loading with explicit label
//! mapping, median imputation, z-score standardization, and seeded
//! train/test splitting.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Where a dataset came from and what has been done to it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Provenance {
    pub source: String,
    pub steps: Vec<String>,
    /// Features whose standardization span collapsed; their values are
    /// forced to zero but the columns are kept so masks stay aligned.
    pub zero_variance_features: Vec<usize>,
}

/// Numeric feature matrix with binary labels. Feature cells may hold NaN
/// for missing values until [`preprocess`] runs; labels are always 0 or 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    features: Vec<f64>,
    labels: Vec<u8>,
    pub feature_names: Vec<String>,
    pub provenance: Provenance,
}

impl Dataset {
    /// Assembles a dataset from a row-major feature buffer.
    pub fn from_parts(
        n: usize,
        d: usize,
        features: Vec<f64>,
        labels: Vec<u8>,
        feature_names: Vec<String>,
        source: impl Into<String>,
    ) -> Result<Self> {
        if features.len() != n * d {
            return Err(Error::Data(format!(
                "feature buffer holds {} values, expected {n} rows x {d} columns",
                features.len()
            )));
        }
        if labels.len() != n {
            return Err(Error::Data(format!(
                "{} labels for {n} rows",
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&y| y > 1) {
            return Err(Error::Data(format!("label {bad} is outside {{0, 1}}")));
        }
        if feature_names.len() != d {
            return Err(Error::Data(format!(
                "{} feature names for {d} columns",
                feature_names.len()
            )));
        }
        Ok(Dataset {
            n,
            d,
            features,
            labels,
            feature_names,
            provenance: Provenance { source: source.into(), ..Provenance::default() },
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.d
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.features[r * self.d..(r + 1) * self.d]
    }

    pub fn value(&self, r: usize, c: usize) -> f64 {
        self.features[r * self.d + c]
    }

    pub fn label(&self, r: usize) -> u8 {
        self.labels[r]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    fn set_value(&mut self, r: usize, c: usize, v: f64) {
        self.features[r * self.d + c] = v;
    }
}

/// How to find the label for each row.
#[derive(Clone, Debug, PartialEq)]
pub enum LabelSpec {
    /// Named column; requires a header row.
    Column(String),
    /// Zero-based column index.
    ColumnIndex(usize),
    /// Separate file, one raw label token per line, aligned with the data
    /// rows.
    File(PathBuf),
}

/// Explicit map from raw label tokens to 0 or 1. Nothing is inferred: a
/// token absent from the map is an error, and which raw value means which
/// class is always declared by the caller.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelMapping {
    map: BTreeMap<String, u8>,
}

impl LabelMapping {
    pub fn new(pairs: impl IntoIterator<Item = (String, u8)>) -> Result<Self> {
        let map: BTreeMap<String, u8> = pairs.into_iter().collect();
        if map.is_empty() {
            return Err(Error::Config("label mapping is empty".into()));
        }
        if let Some((tok, val)) = map.iter().find(|(_, &v)| v > 1) {
            return Err(Error::Config(format!(
                "label mapping sends {tok:?} to {val}, outside {{0, 1}}"
            )));
        }
        Ok(LabelMapping { map })
    }

    /// The usual case for data that already carries 0/1 labels.
    pub fn identity() -> Self {
        LabelMapping {
            map: BTreeMap::from([("0".into(), 0), ("1".into(), 1)]),
        }
    }

    pub fn apply(&self, raw: &str) -> Option<u8> {
        self.map.get(raw).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, u8)> {
        self.map.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Loader settings. `missing_tokens` are matched against trimmed cells;
/// matches become NaN and are filled in later by [`preprocess`].
#[derive(Clone, Debug)]
pub struct CsvOptions {
    pub label: LabelSpec,
    pub missing_tokens: Vec<String>,
    pub label_mapping: LabelMapping,
    pub delimiter: u8,
}

impl CsvOptions {
    pub fn new(label: LabelSpec) -> Self {
        CsvOptions {
            label,
            missing_tokens: vec!["".into(), "NaN".into(), "nan".into()],
            label_mapping: LabelMapping::identity(),
            delimiter: b',',
        }
    }
}

fn parse_cell(raw: &str, missing: &[String], line: usize, col: usize) -> Result<f64> {
    let cell = raw.trim();
    if missing.iter().any(|m| m == cell) {
        return Ok(f64::NAN);
    }
    cell.parse::<f64>().map_err(|_| {
        Error::Data(format!(
            "line {line}, column {}: {cell:?} is not numeric and not a declared missing token",
            col + 1
        ))
    })
}

/// Loads a delimited text file into a [`Dataset`]. The header row is
/// detected by content: when any cell of the first row fails to parse as a
/// number or missing token, that row is treated as column names.
pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(opts.delimiter)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Error::Data(format!("line {}: {e}", i + 1)))?;
        rows.push(record.iter().map(str::to_owned).collect());
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{} holds no rows", path.display())));
    }

    let first_is_header = rows[0].iter().any(|cell| {
        let cell = cell.trim();
        !opts.missing_tokens.iter().any(|m| m == cell) && cell.parse::<f64>().is_err()
    });
    let header: Option<Vec<String>> = first_is_header.then(|| rows.remove(0));
    if rows.is_empty() {
        return Err(Error::Data(format!(
            "{} holds only a header row",
            path.display()
        )));
    }

    let width = header.as_ref().map_or(rows[0].len(), Vec::len);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            let line = i + 1 + usize::from(first_is_header);
            return Err(Error::Data(format!(
                "line {line}: {} cells, expected {width}",
                row.len()
            )));
        }
    }

    let label_col: Option<usize> = match &opts.label {
        LabelSpec::Column(name) => {
            let header = header.as_ref().ok_or_else(|| {
                Error::Data(format!(
                    "label column {name:?} requested but {} has no header row",
                    path.display()
                ))
            })?;
            Some(header.iter().position(|h| h.trim() == name).ok_or_else(|| {
                Error::Data(format!("no column named {name:?} in {}", path.display()))
            })?)
        }
        LabelSpec::ColumnIndex(i) => {
            if *i >= width {
                return Err(Error::Data(format!(
                    "label column index {i} out of range for {width} columns"
                )));
            }
            Some(*i)
        }
        LabelSpec::File(_) => None,
    };

    let raw_labels: Vec<String> = match &opts.label {
        LabelSpec::File(label_path) => {
            let text = std::fs::read_to_string(label_path).map_err(|e| {
                Error::Data(format!("cannot read {}: {e}", label_path.display()))
            })?;
            let tokens: Vec<String> =
                text.lines().map(|l| l.trim().to_owned()).collect();
            if tokens.len() != rows.len() {
                return Err(Error::Data(format!(
                    "{} holds {} labels for {} data rows",
                    label_path.display(),
                    tokens.len(),
                    rows.len()
                )));
            }
            tokens
        }
        _ => {
            let col = label_col.unwrap();
            rows.iter().map(|r| r[col].trim().to_owned()).collect()
        }
    };

    let mut labels = Vec::with_capacity(rows.len());
    for (i, raw) in raw_labels.iter().enumerate() {
        let mapped = opts.label_mapping.apply(raw).ok_or_else(|| {
            Error::Data(format!(
                "row {}: label {raw:?} is not in the declared label mapping",
                i + 1
            ))
        })?;
        labels.push(mapped);
    }

    let feature_cols: Vec<usize> =
        (0..width).filter(|c| Some(*c) != label_col).collect();
    let feature_names: Vec<String> = feature_cols
        .iter()
        .map(|&c| match &header {
            Some(h) => h[c].trim().to_owned(),
            None => format!("f{c}"),
        })
        .collect();

    let n = rows.len();
    let d = feature_cols.len();
    let mut features = Vec::with_capacity(n * d);
    for (i, row) in rows.iter().enumerate() {
        let line = i + 1 + usize::from(first_is_header);
        for &c in &feature_cols {
            features.push(parse_cell(&row[c], &opts.missing_tokens, line, c)?);
        }
    }

    let mut ds = Dataset::from_parts(
        n,
        d,
        features,
        labels,
        feature_names,
        path.display().to_string(),
    )?;
    ds.provenance.steps.push(format!("loaded {n} rows x {d} features"));
    Ok(ds)
}

/// Row indices of a reproducible train/test partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIndices {
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub seed: u64,
}

/// Shuffles row indices under `seed` and takes `round(ratio * n)` of them
/// for training. Both sides are returned sorted; the same seed always
/// yields the same partition.
pub fn split(ds: &Dataset, ratio: f64, seed: u64) -> Result<SplitIndices> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Config(format!(
            "split ratio must be inside (0, 1), got {ratio}"
        )));
    }
    let n = ds.n_rows();
    let n_train = (ratio * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::Data(format!(
            "splitting {n} rows at ratio {ratio} leaves one side empty"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut train_rows = order[..n_train].to_vec();
    let mut test_rows = order[n_train..].to_vec();
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok(SplitIndices { train_rows, test_rows, seed })
}

fn median(sorted: &[f64]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0
    }
}

/// Fills every missing cell with its column's median over the non-missing
/// entries. A column with no observed values at all is an error.
pub fn impute_median(ds: &Dataset) -> Result<Dataset> {
    let mut out = ds.clone();
    for c in 0..ds.n_features() {
        let mut present: Vec<f64> =
            (0..ds.n_rows()).map(|r| ds.value(r, c)).filter(|v| !v.is_nan()).collect();
        if present.is_empty() {
            return Err(Error::Data(format!(
                "feature {:?} has no observed values to impute from",
                ds.feature_names[c]
            )));
        }
        if present.len() == ds.n_rows() {
            continue;
        }
        present.sort_unstable_by(f64::total_cmp);
        let fill = median(&present);
        for r in 0..ds.n_rows() {
            if ds.value(r, c).is_nan() {
                out.set_value(r, c, fill);
            }
        }
    }
    out.provenance.steps.push("imputed missing cells with column medians".into());
    Ok(out)
}

/// Z-scores every column. Statistics (mean and population standard
/// deviation) come from the training rows when a split is given, otherwise
/// from all rows, and are applied to the whole column either way. Columns
/// whose deviation collapses below 1e-12 are forced to zero and recorded
/// in the provenance.
pub fn standardize(ds: &Dataset, split: Option<&SplitIndices>) -> Result<Dataset> {
    let all_rows: Vec<usize>;
    let stat_rows: &[usize] = match split {
        Some(s) => &s.train_rows,
        None => {
            all_rows = (0..ds.n_rows()).collect();
            &all_rows
        }
    };
    if stat_rows.is_empty() {
        return Err(Error::Data("standardization got an empty row set".into()));
    }

    let mut out = ds.clone();
    let m = stat_rows.len() as f64;
    for c in 0..ds.n_features() {
        if stat_rows.iter().any(|&r| ds.value(r, c).is_nan()) {
            return Err(Error::Data(format!(
                "feature {:?} still has missing values; impute before standardizing",
                ds.feature_names[c]
            )));
        }
        let mean = stat_rows.iter().map(|&r| ds.value(r, c)).sum::<f64>() / m;
        let var = stat_rows
            .iter()
            .map(|&r| (ds.value(r, c) - mean).powi(2))
            .sum::<f64>()
            / m;
        let std = var.sqrt();
        if std < 1e-12 {
            for r in 0..ds.n_rows() {
                out.set_value(r, c, 0.0);
            }
            out.provenance.zero_variance_features.push(c);
        } else {
            for r in 0..ds.n_rows() {
                out.set_value(r, c, (ds.value(r, c) - mean) / std);
            }
        }
    }
    out.provenance.steps.push(match split {
        Some(s) => format!("standardized with statistics from {} training rows", s.train_rows.len()),
        None => "standardized with whole-data statistics".into(),
    });
    Ok(out)
}

/// Imputation followed by standardization. After this no cell is missing
/// and every non-degenerate column is centered and unit-scaled on the rows
/// its statistics came from.
pub fn preprocess(ds: &Dataset, split: Option<&SplitIndices>) -> Result<Dataset> {
    let imputed = impute_median(ds)?;
    standardize(&imputed, split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    fn toy(values: &[&[f64]], labels: &[u8]) -> Dataset {
        let n = values.len();
        let d = values[0].len();
        let flat: Vec<f64> = values.iter().flat_map(|r| r.iter().copied()).collect();
        let names = (0..d).map(|c| format!("f{c}")).collect();
        Dataset::from_parts(n, d, flat, labels.to_vec(), names, "toy").unwrap()
    }

    #[test]
    fn loads_headerless_csv_with_label_column_index() {
        let f = write_temp("1,2,0\n3,4,1\n5,6,0\n");
        let opts = CsvOptions::new(LabelSpec::ColumnIndex(2));
        let ds = load_csv(f.path(), &opts).unwrap();
        assert_eq!(ds.n_rows(), 3);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.labels(), &[0, 1, 0]);
        assert_eq!(ds.row(1), &[3.0, 4.0]);
        assert_eq!(ds.feature_names, vec!["f0", "f1"]);
    }

    #[test]
    fn loads_named_label_column_from_header() {
        let f = write_temp("a,b,outcome\n1,2,1\n3,4,0\n");
        let opts = CsvOptions::new(LabelSpec::Column("outcome".into()));
        let ds = load_csv(f.path(), &opts).unwrap();
        assert_eq!(ds.feature_names, vec!["a", "b"]);
        assert_eq!(ds.labels(), &[1, 0]);
    }

    #[test]
    fn missing_tokens_become_nan() {
        let f = write_temp("1,NaN,0\n,4,1\n");
        let opts = CsvOptions::new(LabelSpec::ColumnIndex(2));
        let ds = load_csv(f.path(), &opts).unwrap();
        assert!(ds.value(0, 1).is_nan());
        assert!(ds.value(1, 0).is_nan());
    }

    #[test]
    fn non_numeric_cell_reports_its_line() {
        let f = write_temp("1,2,0\n3,oops,1\n");
        let opts = CsvOptions::new(LabelSpec::ColumnIndex(2));
        let err = load_csv(f.path(), &opts).unwrap_err();
        assert!(err.to_string().contains("line 2"), "got: {err}");
    }

    #[test]
    fn ragged_row_reports_its_line() {
        let f = write_temp("1,2,0\n3,1\n");
        let opts = CsvOptions::new(LabelSpec::ColumnIndex(2));
        let err = load_csv(f.path(), &opts).unwrap_err();
        assert!(err.to_string().contains("line 2"), "got: {err}");
    }

    #[test]
    fn unmapped_label_is_rejected() {
        let f = write_temp("1,2,7\n");
        let opts = CsvOptions::new(LabelSpec::ColumnIndex(2));
        let err = load_csv(f.path(), &opts).unwrap_err();
        assert!(err.to_string().contains("label"), "got: {err}");
    }

    #[test]
    fn declared_mapping_translates_raw_labels() {
        let f = write_temp("1,2,-1\n3,4,1\n");
        let mut opts = CsvOptions::new(LabelSpec::ColumnIndex(2));
        opts.label_mapping =
            LabelMapping::new([("-1".to_string(), 1u8), ("1".to_string(), 0u8)]).unwrap();
        let ds = load_csv(f.path(), &opts).unwrap();
        assert_eq!(ds.labels(), &[1, 0]);
    }

    #[test]
    fn labels_can_come_from_a_separate_file() {
        let data = write_temp("1,2\n3,4\n");
        let labels = write_temp("1\n0\n");
        let opts = CsvOptions::new(LabelSpec::File(labels.path().to_path_buf()));
        let ds = load_csv(data.path(), &opts).unwrap();
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.labels(), &[1, 0]);
    }

    #[test]
    fn label_file_length_must_match() {
        let data = write_temp("1,2\n3,4\n");
        let labels = write_temp("1\n");
        let opts = CsvOptions::new(LabelSpec::File(labels.path().to_path_buf()));
        assert!(load_csv(data.path(), &opts).is_err());
    }

    #[test]
    fn imputation_fills_with_the_column_median() {
        let ds = toy(&[&[1.0], &[f64::NAN], &[3.0]], &[0, 1, 0]);
        let fixed = impute_median(&ds).unwrap();
        assert_eq!(fixed.value(1, 0), 2.0);
        assert_eq!(fixed.value(0, 0), 1.0);
    }

    #[test]
    fn fully_missing_column_names_the_feature() {
        let ds = toy(&[&[f64::NAN], &[f64::NAN]], &[0, 1]);
        let err = impute_median(&ds).unwrap_err();
        assert!(err.to_string().contains("f0"), "got: {err}");
    }

    #[test]
    fn standardization_uses_population_deviation() {
        let ds = toy(&[&[0.0], &[10.0]], &[0, 1]);
        let z = standardize(&ds, None).unwrap();
        assert!((z.value(0, 0) + 1.0).abs() < 1e-12);
        assert!((z.value(1, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_column_is_zeroed_and_flagged() {
        let ds = toy(&[&[2.0, 1.0], &[2.0, 3.0]], &[0, 1]);
        let z = standardize(&ds, None).unwrap();
        assert_eq!(z.value(0, 0), 0.0);
        assert_eq!(z.value(1, 0), 0.0);
        assert_eq!(z.provenance.zero_variance_features, vec![0]);
    }

    #[test]
    fn split_statistics_leave_training_columns_centered() {
        let ds = toy(
            &[&[1.0], &[2.0], &[3.0], &[4.0], &[50.0], &[6.0]],
            &[0, 1, 0, 1, 0, 1],
        );
        let split = split(&ds, 0.5, 9).unwrap();
        let z = standardize(&ds, Some(&split)).unwrap();
        let m = split.train_rows.len() as f64;
        let mean: f64 = split.train_rows.iter().map(|&r| z.value(r, 0)).sum::<f64>() / m;
        let var: f64 = split
            .train_rows
            .iter()
            .map(|&r| (z.value(r, 0) - mean).powi(2))
            .sum::<f64>()
            / m;
        assert!(mean.abs() < 1e-9);
        assert!((var.sqrt() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn preprocess_is_idempotent() {
        let ds = toy(
            &[&[1.0, 5.0], &[f64::NAN, 5.0], &[3.0, 5.0], &[4.0, 5.0]],
            &[0, 1, 0, 1],
        );
        let sp = split(&ds, 0.75, 3).unwrap();
        let once = preprocess(&ds, Some(&sp)).unwrap();
        let twice = preprocess(&once, Some(&sp)).unwrap();
        for r in 0..ds.n_rows() {
            for c in 0..ds.n_features() {
                assert!(
                    (once.value(r, c) - twice.value(r, c)).abs() < 1e-9,
                    "cell ({r}, {c}) drifted"
                );
            }
        }
    }

    #[test]
    fn split_sizes_round_the_ratio() {
        let ds = toy(
            &[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0], &[6.0], &[7.0], &[8.0], &[9.0], &[10.0]],
            &[0, 1, 0, 1, 0, 1, 0, 1, 0, 1],
        );
        let s = split(&ds, 0.7, 0).unwrap();
        assert_eq!(s.train_rows.len(), 7);
        assert_eq!(s.test_rows.len(), 3);
        let mut all: Vec<usize> = s.train_rows.iter().chain(&s.test_rows).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn split_of_1567_rows_takes_1097_for_training() {
        let n = 1567;
        let ds = Dataset::from_parts(
            n,
            1,
            vec![0.0; n],
            vec![0; n],
            vec!["f0".into()],
            "sized",
        )
        .unwrap();
        let s = split(&ds, 0.7, 0).unwrap();
        assert_eq!(s.train_rows.len(), 1097);
    }

    #[test]
    fn same_seed_reproduces_the_split_and_seeds_differ() {
        let ds = toy(
            &[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0], &[6.0], &[7.0], &[8.0]],
            &[0, 1, 0, 1, 0, 1, 0, 1],
        );
        assert_eq!(split(&ds, 0.5, 42).unwrap(), split(&ds, 0.5, 42).unwrap());
        assert_ne!(
            split(&ds, 0.5, 42).unwrap().train_rows,
            split(&ds, 0.5, 43).unwrap().train_rows
        );
    }

    #[test]
    fn out_of_range_ratio_is_a_config_error() {
        let ds = toy(&[&[1.0], &[2.0]], &[0, 1]);
        for ratio in [0.0, 1.0, -0.2, 1.5] {
            let err = split(&ds, ratio, 0).unwrap_err();
            assert_eq!(err.exit_code(), 2);
        }
    }
}
