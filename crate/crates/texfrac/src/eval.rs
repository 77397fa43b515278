//! Dataset manifests, split protocols, and accuracy evaluation.
//!
//! A manifest is a `path,label,group` CSV. Two split protocols are
//! supported: group holdout (train on each group in turn, test on the
//! rest) and repeated random sampling of a fixed train count per class.
//! Evaluation fits PCA and LDA on the train partition only, predicts
//! the test partition, and aggregates accuracy (mean and population
//! standard deviation) plus confusion matrices.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FeatureTable;
use crate::mlkit::{lda_fit, pca_fit, pca_transform, LdaConfig, LdaModel, Matrix, PcaModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One labeled image in a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: String,
    pub label: String,
    pub group: String,
}

/// Labeled image inventory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub name: String,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    /// Distinct class labels, sorted.
    pub fn class_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = self.entries.iter().map(|e| e.label.clone()).collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// Distinct group tags, sorted.
    pub fn group_tags(&self) -> Vec<String> {
        let mut groups: Vec<String> = self.entries.iter().map(|e| e.group.clone()).collect();
        groups.sort();
        groups.dedup();
        groups
    }
}

/// Reads a `path,label,group` CSV (exact header required).
pub fn read_manifest_csv(name: &str, text: &str) -> Result<DatasetManifest> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "path,label,group")) => {}
        Some((_, other)) => {
            return Err(Error::Parse {
                line: 1,
                message: format!("manifest header must be path,label,group, got {other:?}"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty manifest".to_string(),
            })
        }
    }
    let mut entries = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        entries.push(ManifestEntry {
            path: fields[0].to_string(),
            label: fields[1].to_string(),
            group: fields[2].to_string(),
        });
    }
    Ok(DatasetManifest {
        name: name.to_string(),
        entries,
    })
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::from_io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    read_manifest_csv(&name, &text)
}

pub fn write_manifest_csv(manifest: &DatasetManifest) -> String {
    let mut out = String::from("path,label,group\n");
    for e in &manifest.entries {
        out.push_str(&format!("{},{},{}\n", e.path, e.label, e.group));
    }
    out
}

/// How train/test partitions are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitProtocol {
    /// One split per group: train on that group, test on the rest.
    GroupHoldout,
    /// Seeded sampling without replacement of `train_per_class` images
    /// per class, repeated `repetitions` times.
    RandomPerClass {
        train_per_class: usize,
        repetitions: usize,
        seed: u64,
    },
}

/// Index sets into the manifest entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Builds the splits of a protocol over a manifest.
pub fn make_splits(manifest: &DatasetManifest, protocol: &SplitProtocol) -> Result<Vec<Split>> {
    if manifest.class_labels().len() < 2 {
        return Err(Error::InsufficientData(
            "need at least 2 classes".to_string(),
        ));
    }
    match protocol {
        SplitProtocol::GroupHoldout => {
            let groups = manifest.group_tags();
            if groups.len() < 2 {
                return Err(Error::InsufficientData(format!(
                    "group holdout needs >= 2 groups, got {}",
                    groups.len()
                )));
            }
            Ok(groups
                .iter()
                .map(|g| {
                    let (train, test) = (0..manifest.entries.len())
                        .partition(|&i| &manifest.entries[i].group == g);
                    Split { train, test }
                })
                .collect())
        }
        SplitProtocol::RandomPerClass {
            train_per_class,
            repetitions,
            seed,
        } => {
            let labels = manifest.class_labels();
            // class -> entry indices, in manifest order
            let by_class: Vec<Vec<usize>> = labels
                .iter()
                .map(|l| {
                    (0..manifest.entries.len())
                        .filter(|&i| &manifest.entries[i].label == l)
                        .collect()
                })
                .collect();
            for (l, idxs) in labels.iter().zip(&by_class) {
                if idxs.len() <= *train_per_class {
                    return Err(Error::InsufficientData(format!(
                        "class {l:?} has {} images, need more than {train_per_class}",
                        idxs.len()
                    )));
                }
            }
            Ok((0..*repetitions as u64)
                .map(|rep| {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_stream(rep);
                    let mut train = Vec::new();
                    let mut test = Vec::new();
                    for idxs in &by_class {
                        let mut pool = idxs.clone();
                        // partial Fisher-Yates: the first train_per_class
                        // positions become the train draw
                        for k in 0..*train_per_class {
                            let j = rng.random_range(k..pool.len());
                            pool.swap(k, j);
                        }
                        let (tr, te) = pool.split_at(*train_per_class);
                        train.extend_from_slice(tr);
                        test.extend_from_slice(te);
                    }
                    train.sort_unstable();
                    test.sort_unstable();
                    Split { train, test }
                })
                .collect())
        }
    }
}

/// Class-by-class count table; rows are true labels, columns predicted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        ConfusionMatrix {
            labels,
            counts: vec![0; n * n],
        }
    }

    pub fn record(&mut self, true_class: usize, predicted: usize) {
        let n = self.labels.len();
        self.counts[true_class * n + predicted] += 1;
    }

    pub fn count(&self, true_class: usize, predicted: usize) -> u64 {
        self.counts[true_class * self.labels.len() + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        let n = self.labels.len();
        (0..n).map(|i| self.counts[i * n + i]).sum()
    }

    /// Percentage of correct predictions.
    pub fn accuracy(&self) -> f64 {
        100.0 * self.trace() as f64 / self.total() as f64
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        assert_eq!(self.labels, other.labels);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

/// PCA retention and LDA shrinkage used by the evaluation pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlConfig {
    pub pca_retention: f64,
    pub lda_shrinkage: f64,
}

impl Default for MlConfig {
    fn default() -> Self {
        MlConfig {
            pca_retention: 0.99,
            lda_shrinkage: 1e-4,
        }
    }
}

/// Aggregated evaluation output.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub split_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Population standard deviation over splits.
    pub std_deviation: f64,
    pub per_split: Vec<ConfusionMatrix>,
    pub total: ConfusionMatrix,
}

/// Fits PCA + LDA on the given training rows only.
pub fn fit_pipeline(
    train: &Matrix<f64>,
    train_labels: &[String],
    config: &MlConfig,
) -> Result<(PcaModel<f64>, LdaModel<f64>)> {
    let pca = pca_fit(train, config.pca_retention)?;
    let reduced = pca_transform(&pca, train)?;
    let lda = lda_fit(
        &reduced,
        train_labels,
        &LdaConfig {
            shrinkage: config.lda_shrinkage,
            regularize: true,
        },
    )?;
    Ok((pca, lda))
}

fn select_rows(table: &FeatureTable, idxs: &[usize]) -> (Matrix<f64>, Vec<String>) {
    let rows: Vec<Vec<f64>> = idxs
        .iter()
        .map(|&i| table.values.row(i).to_vec())
        .collect();
    let labels = idxs.iter().map(|&i| table.labels[i].clone()).collect();
    (Matrix::from_rows(&rows), labels)
}

/// Runs every split: PCA and LDA fit on train, predictions on test.
pub fn evaluate(table: &FeatureTable, splits: &[Split], config: &MlConfig) -> Result<EvalResult> {
    evaluate_with(table, splits, |train, train_labels, test| {
        let (pca, lda) = fit_pipeline(train, train_labels, config)?;
        let reduced_test = pca_transform(&pca, test)?;
        reduced_test
            .row_iter()
            .map(|row| Ok(lda.predict_label(row)?.to_string()))
            .collect()
    })
}

/// Evaluation skeleton with an injectable classifier, used by tests to
/// substitute an oracle predictor.
pub fn evaluate_with<F>(table: &FeatureTable, splits: &[Split], classify: F) -> Result<EvalResult>
where
    F: Fn(&Matrix<f64>, &[String], &Matrix<f64>) -> Result<Vec<String>> + Sync,
{
    if splits.is_empty() {
        return Err(Error::InsufficientData("no splits".to_string()));
    }
    let mut class_labels: Vec<String> = table.labels.clone();
    class_labels.sort();
    class_labels.dedup();
    let class_index = |l: &String| {
        class_labels
            .binary_search(l)
            .map_err(|_| Error::UnknownLabelSpace(format!("label {l:?} not in the table")))
    };

    let outcomes: Vec<Result<(f64, ConfusionMatrix)>> = splits
        .par_iter()
        .map(|split| {
            let (train_x, train_y) = select_rows(table, &split.train);
            let (test_x, test_y) = select_rows(table, &split.test);
            let predicted = classify(&train_x, &train_y, &test_x)?;
            let mut confusion = ConfusionMatrix::new(class_labels.clone());
            for (truth, pred) in test_y.iter().zip(&predicted) {
                confusion.record(class_index(truth)?, class_index(pred)?);
            }
            Ok((confusion.accuracy(), confusion))
        })
        .collect();

    let mut split_accuracies = Vec::with_capacity(splits.len());
    let mut per_split = Vec::with_capacity(splits.len());
    let mut total = ConfusionMatrix::new(class_labels.clone());
    for outcome in outcomes {
        let (acc, confusion) = outcome?;
        split_accuracies.push(acc);
        total.merge(&confusion);
        per_split.push(confusion);
    }
    let n = split_accuracies.len() as f64;
    let mean_accuracy = split_accuracies.iter().sum::<f64>() / n;
    let variance = split_accuracies
        .iter()
        .map(|&a| (a - mean_accuracy) * (a - mean_accuracy))
        .sum::<f64>()
        / n;
    Ok(EvalResult {
        split_accuracies,
        mean_accuracy,
        std_deviation: variance.sqrt(),
        per_split,
        total,
    })
}

/// `split,accuracy` rows plus a `summary` row with mean and deviation.
pub fn write_results_csv(result: &EvalResult) -> String {
    let mut out = String::from("split,accuracy\n");
    for (i, acc) in result.split_accuracies.iter().enumerate() {
        out.push_str(&format!("{i},{acc:?}\n"));
    }
    out.push_str(&format!(
        "summary,{:?},{:?}\n",
        result.mean_accuracy, result.std_deviation
    ));
    out
}

/// Square integer table with a label header row and column.
pub fn write_confusion_csv(matrix: &ConfusionMatrix) -> String {
    let mut out = String::from("true\\predicted");
    for l in &matrix.labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    for (i, l) in matrix.labels.iter().enumerate() {
        out.push_str(l);
        for j in 0..matrix.labels.len() {
            out.push(',');
            out.push_str(&matrix.count(i, j).to_string());
        }
        out.push('\n');
    }
    out
}

/// Binary PPM (P6) heat map of the confusion matrix, scaled `cell`
/// pixels per class, warm where counts are high.
pub fn write_confusion_ppm(matrix: &ConfusionMatrix, cell: usize) -> Vec<u8> {
    let n = matrix.labels.len();
    let side = n * cell;
    let max = matrix
        .counts
        .iter()
        .copied()
        .max()
        .unwrap_or(0)
        .max(1);
    let mut out = format!("P6\n{side} {side}\n255\n").into_bytes();
    for y in 0..side {
        for x in 0..side {
            let v = matrix.count(y / cell, x / cell);
            let heat = ((255 * v) / max) as u8;
            out.extend_from_slice(&[heat, 0, 255 - heat]);
        }
    }
    out
}

/// Writes results, confusion CSV, and confusion PPM under `out_dir`.
/// Contents depend only on `result`, so reruns are byte-identical.
pub fn report(result: &EvalResult, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::from_io(dir, e))?;
    let files = vec![
        (dir.join("results.csv"), write_results_csv(result).into_bytes()),
        (
            dir.join("confusion.csv"),
            write_confusion_csv(&result.total).into_bytes(),
        ),
        (
            dir.join("confusion.ppm"),
            write_confusion_ppm(&result.total, 8),
        ),
    ];
    let mut written = Vec::new();
    for (path, bytes) in files {
        fs::write(&path, bytes).map_err(|e| Error::from_io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
