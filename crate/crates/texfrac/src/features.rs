//! Descriptor assembly: fractal estimators over the LBP threshold stack.
//!
//! Every image in a run shares one schema, ordered by estimator as
//! configured, then threshold level ascending, then coefficient (dim or
//! alpha before beta; spectrum values by ascending q). Threshold slices
//! with no white pixels contribute zeros, which keeps the vector length
//! fixed and assigns the empty set its dimension.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::ManifestEntry;
use crate::fractal;
use crate::lbp::{self, LbpParams};
use crate::mlkit::Matrix;
use crate::raster::{self, BinaryImage, GrayImage};

/// One fractal estimator with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorKind {
    /// Box counting; `None` sizes pick powers of two per image.
    BoxCounting { deltas: Option<Vec<usize>> },
    /// Dilation volume up to the given radius.
    Minkowski { max_radius: f64 },
    /// Gliding-box lacunarity over the given box sizes.
    Lacunarity { deltas: Vec<usize> },
    /// Multifractal spectrum; `exponents` are kept sorted ascending.
    Multifractal {
        exponents: Vec<f64>,
        cell_sizes: Vec<usize>,
    },
}

impl EstimatorKind {
    pub fn box_counting() -> Self {
        EstimatorKind::BoxCounting { deltas: None }
    }

    pub fn minkowski() -> Self {
        EstimatorKind::Minkowski {
            max_radius: fractal::DEFAULT_MAX_RADIUS,
        }
    }

    pub fn lacunarity() -> Self {
        EstimatorKind::Lacunarity {
            deltas: fractal::default_lacunarity_deltas(),
        }
    }

    pub fn multifractal() -> Self {
        EstimatorKind::Multifractal {
            exponents: fractal::default_exponents(),
            cell_sizes: fractal::default_cell_sizes(),
        }
    }

    /// Short code used in schema entries and CSV headers.
    pub fn code(&self) -> &'static str {
        match self {
            EstimatorKind::BoxCounting { .. } => "BC",
            EstimatorKind::Minkowski { .. } => "BM",
            EstimatorKind::Lacunarity { .. } => "L",
            EstimatorKind::Multifractal { .. } => "MF",
        }
    }

    /// Parses a code like "BC" into the estimator with default parameters.
    pub fn from_code(code: &str) -> Result<Self> {
        match code {
            "BC" => Ok(Self::box_counting()),
            "BM" => Ok(Self::minkowski()),
            "L" => Ok(Self::lacunarity()),
            "MF" => Ok(Self::multifractal()),
            other => Err(Error::InvalidParameter(format!(
                "unknown estimator code {other:?} (expected BC, BM, L, MF)"
            ))),
        }
    }

    fn coefficients(&self) -> Vec<String> {
        match self {
            EstimatorKind::BoxCounting { .. } | EstimatorKind::Minkowski { .. } => {
                vec!["dim".to_string(), "beta".to_string()]
            }
            EstimatorKind::Lacunarity { .. } => vec!["alpha".to_string(), "beta".to_string()],
            EstimatorKind::Multifractal { exponents, .. } => {
                exponents.iter().map(|&q| format!("f({})", fmt_q(q))).collect()
            }
        }
    }
}

fn fmt_q(q: f64) -> String {
    if q == q.trunc() {
        format!("{}", q as i64)
    } else {
        format!("{q:?}")
    }
}

/// Identifies one descriptor entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureId {
    pub estimator: &'static str,
    pub level: u32,
    pub coefficient: String,
}

impl FeatureId {
    pub fn header(&self) -> String {
        format!("{}:{}:{}", self.estimator, self.level, self.coefficient)
    }
}

/// Ordered schema shared by every image in a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    pub entries: Vec<FeatureId>,
}

impl FeatureSchema {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn headers(&self) -> Vec<String> {
        self.entries.iter().map(FeatureId::header).collect()
    }
}

/// Extraction configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractConfig {
    pub lbp: LbpParams,
    /// Threshold levels, strictly increasing.
    pub levels: Vec<u32>,
    /// Estimators in schema order; at least one.
    pub kinds: Vec<EstimatorKind>,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        let lbp = LbpParams::default();
        ExtractConfig {
            levels: lbp.default_levels(),
            lbp,
            kinds: vec![EstimatorKind::box_counting()],
        }
    }
}

impl ExtractConfig {
    /// Normalizes and validates: multifractal exponents sorted, at
    /// least one estimator, levels strictly increasing and in range.
    pub fn validated(mut self) -> Result<Self> {
        if self.kinds.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one estimator kind required".to_string(),
            ));
        }
        for kind in &mut self.kinds {
            if let EstimatorKind::Multifractal { exponents, .. } = kind {
                exponents.sort_by(|a, b| a.partial_cmp(b).expect("finite exponents"));
                exponents.dedup();
            }
        }
        let max = self.lbp.max_code();
        for pair in self.levels.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::InvalidParameter(
                    "threshold levels must be strictly increasing".to_string(),
                ));
            }
        }
        if let Some(&level) = self.levels.iter().find(|&&l| l > max) {
            return Err(Error::LevelOutOfRange { level, max });
        }
        Ok(self)
    }

    pub fn schema(&self) -> FeatureSchema {
        let mut entries = Vec::new();
        for kind in &self.kinds {
            for &level in &self.levels {
                for coefficient in kind.coefficients() {
                    entries.push(FeatureId {
                        estimator: kind.code(),
                        level,
                        coefficient,
                    });
                }
            }
        }
        FeatureSchema { entries }
    }
}

/// One image's descriptor values with the schema that names them.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorVector {
    pub values: Vec<f64>,
    pub schema: FeatureSchema,
}

/// Computes the descriptor vector of one image.
pub fn extract(img: &GrayImage, config: &ExtractConfig) -> Result<DescriptorVector> {
    let map = lbp::lbp_map(img, &config.lbp)?;
    let stack = lbp::threshold_stack(&map, &config.levels)?;
    let mut values = Vec::new();
    for kind in &config.kinds {
        for slice in &stack {
            append_slice_features(&mut values, kind, slice)?;
        }
    }
    Ok(DescriptorVector {
        values,
        schema: config.schema(),
    })
}

fn append_slice_features(
    values: &mut Vec<f64>,
    kind: &EstimatorKind,
    slice: &BinaryImage,
) -> Result<()> {
    let empty = slice.count_white() == 0;
    match kind {
        EstimatorKind::BoxCounting { deltas } => {
            let pair = if empty {
                (0.0, 0.0)
            } else {
                let owned;
                let deltas = match deltas {
                    Some(d) => d.as_slice(),
                    None => {
                        owned = fractal::default_box_deltas(slice.width(), slice.height());
                        owned.as_slice()
                    }
                };
                fractal::box_dimension::<f64>(slice, deltas)?
            };
            values.push(pair.0);
            values.push(pair.1);
        }
        EstimatorKind::Minkowski { max_radius } => {
            let pair = if empty {
                (0.0, 0.0)
            } else {
                fractal::minkowski_dimension::<f64>(slice, *max_radius)?
            };
            values.push(pair.0);
            values.push(pair.1);
        }
        EstimatorKind::Lacunarity { deltas } => {
            let pair = if empty {
                (0.0, 0.0)
            } else {
                fractal::lacunarity_fit::<f64>(slice, deltas)?
            };
            values.push(pair.0);
            values.push(pair.1);
        }
        EstimatorKind::Multifractal {
            exponents,
            cell_sizes,
        } => {
            if empty {
                values.extend(std::iter::repeat_n(0.0, exponents.len()));
            } else {
                let spec = fractal::multifractal_spectrum(slice, exponents, cell_sizes)?;
                values.extend(spec.fvals);
            }
        }
    }
    Ok(())
}

/// Feature table: one row per image, fixed schema, carry-through
/// path/label/group columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub schema: FeatureSchema,
    pub paths: Vec<String>,
    pub labels: Vec<String>,
    pub groups: Vec<String>,
    pub values: Matrix<f64>,
}

impl FeatureTable {
    pub fn rows(&self) -> usize {
        self.values.rows()
    }
}

/// Extracts descriptors for every manifest entry, in manifest order.
/// Images are processed in parallel; any failure fails the batch with
/// all offending paths listed.
pub fn extract_batch(entries: &[ManifestEntry], config: &ExtractConfig) -> Result<FeatureTable> {
    let schema = config.schema();
    let results: Vec<(usize, Result<Vec<f64>>)> = entries
        .par_iter()
        .enumerate()
        .map(|(i, entry)| {
            let row = raster::load_gray(&entry.path)
                .and_then(|img| extract(&img, config))
                .map(|d| d.values);
            (i, row)
        })
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(entries.len());
    let mut failures = Vec::new();
    for (i, r) in results {
        match r {
            Ok(values) => rows.push(values),
            Err(e) => failures.push(format!("{}: {e}", entries[i].path)),
        }
    }
    if !failures.is_empty() {
        return Err(Error::BatchFailed {
            failed: failures.len(),
            total: entries.len(),
            details: failures.join("\n"),
        });
    }
    Ok(FeatureTable {
        schema,
        paths: entries.iter().map(|e| e.path.clone()).collect(),
        labels: entries.iter().map(|e| e.label.clone()).collect(),
        groups: entries.iter().map(|e| e.group.clone()).collect(),
        values: Matrix::from_rows(&rows),
    })
}

/// Renders the table as CSV: `path,label,group` then one column per
/// schema entry. Fields must not contain commas or line breaks.
pub fn write_feature_csv(table: &FeatureTable) -> Result<String> {
    let mut out = String::from("path,label,group");
    for h in table.schema.headers() {
        out.push(',');
        out.push_str(&h);
    }
    out.push('\n');
    for (i, row) in table.values.row_iter().enumerate() {
        for field in [&table.paths[i], &table.labels[i], &table.groups[i]] {
            if field.contains(',') || field.contains('\n') {
                return Err(Error::InvalidParameter(format!(
                    "field {field:?} contains a comma or newline"
                )));
            }
        }
        out.push_str(&table.paths[i]);
        out.push(',');
        out.push_str(&table.labels[i]);
        out.push(',');
        out.push_str(&table.groups[i]);
        for v in row {
            out.push(',');
            out.push_str(&format!("{v:?}"));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parses a feature CSV produced by `write_feature_csv`.
pub fn read_feature_csv(text: &str) -> Result<FeatureTable> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty feature csv".to_string(),
        })?;
    let mut cols = header.split(',');
    for expected in ["path", "label", "group"] {
        if cols.next() != Some(expected) {
            return Err(Error::Parse {
                line: 1,
                message: format!("header must start with path,label,group, got {header:?}"),
            });
        }
    }
    let entries: Vec<FeatureId> = cols
        .map(|h| {
            let mut parts = h.splitn(3, ':');
            let estimator = match parts.next() {
                Some("BC") => "BC",
                Some("BM") => "BM",
                Some("L") => "L",
                Some("MF") => "MF",
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        message: format!("unknown estimator in column {other:?}"),
                    })
                }
            };
            let level = parts
                .next()
                .and_then(|l| l.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    message: format!("bad level in column {h:?}"),
                })?;
            let coefficient = parts
                .next()
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    message: format!("missing coefficient in column {h:?}"),
                })?
                .to_string();
            Ok(FeatureId {
                estimator,
                level,
                coefficient,
            })
        })
        .collect::<Result<_>>()?;
    let width = entries.len();

    let mut paths = Vec::new();
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width + 3 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {} fields, got {}", width + 3, fields.len()),
            });
        }
        paths.push(fields[0].to_string());
        labels.push(fields[1].to_string());
        groups.push(fields[2].to_string());
        let row: Vec<f64> = fields[3..]
            .iter()
            .map(|f| {
                f.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("bad float {f:?}"),
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    Ok(FeatureTable {
        schema: FeatureSchema { entries },
        paths,
        labels,
        groups,
        values: Matrix::from_rows(&rows),
    })
}
