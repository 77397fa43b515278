//! Versioned text container for a trained PCA + LDA pipeline.
//!
//! Line oriented, one `key value...` record per line, floats written in
//! shortest round-trip form so save/load is lossless. Layout:
//!
//! ```text
//! texfrac-model 1
//! pca.mean <f> ...
//! pca.total_variance <f>
//! pca.ratios <f> ...
//! pca.component <f> ...     (one line per retained component)
//! lda.label <i> <label>
//! lda.priors <f> ...
//! lda.mean <f> ...          (one line per class)
//! lda.cov <f> ...           (one line per covariance row)
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mlkit::lda::LdaModel;
use crate::mlkit::linalg::Matrix;
use crate::mlkit::pca::PcaModel;

const MAGIC: &str = "texfrac-model 1";

/// A fitted reduction + classification pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub pca: PcaModel<f64>,
    pub lda: LdaModel<f64>,
}

pub fn write_model(model: &TrainedModel) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    push_floats(&mut out, "pca.mean", &model.pca.mean);
    out.push_str(&format!(
        "pca.total_variance {:?}\n",
        model.pca.total_variance
    ));
    push_floats(&mut out, "pca.ratios", &model.pca.explained_variance_ratio);
    for row in model.pca.components.row_iter() {
        push_floats(&mut out, "pca.component", row);
    }
    for (i, label) in model.lda.labels().iter().enumerate() {
        out.push_str(&format!("lda.label {i} {label}\n"));
    }
    push_floats(&mut out, "lda.priors", model.lda.priors());
    for row in model.lda.means().row_iter() {
        push_floats(&mut out, "lda.mean", row);
    }
    for row in model.lda.covariance().row_iter() {
        push_floats(&mut out, "lda.cov", row);
    }
    out
}

fn push_floats(out: &mut String, key: &str, values: &[f64]) {
    out.push_str(key);
    for v in values {
        out.push(' ');
        out.push_str(&format!("{v:?}"));
    }
    out.push('\n');
}

pub fn read_model(text: &str) -> Result<TrainedModel> {
    let mut lines = text.lines().enumerate();
    let (_, magic) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty model file"))?;
    if magic.trim() != MAGIC {
        return Err(parse_err(1, &format!("bad magic {magic:?}")));
    }

    let mut pca_mean = None;
    let mut total_variance = None;
    let mut ratios = None;
    let mut components: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut priors = None;
    let mut class_means: Vec<Vec<f64>> = Vec::new();
    let mut cov_rows: Vec<Vec<f64>> = Vec::new();

    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(' ')
            .ok_or_else(|| parse_err(lineno, "missing value"))?;
        match key {
            "pca.mean" => pca_mean = Some(parse_floats(rest, lineno)?),
            "pca.total_variance" => {
                total_variance = Some(parse_float(rest.trim(), lineno)?);
            }
            "pca.ratios" => ratios = Some(parse_floats(rest, lineno)?),
            "pca.component" => components.push(parse_floats(rest, lineno)?),
            "lda.label" => {
                let (i, label) = rest
                    .split_once(' ')
                    .ok_or_else(|| parse_err(lineno, "label record needs index and name"))?;
                let i: usize = i
                    .parse()
                    .map_err(|_| parse_err(lineno, "bad label index"))?;
                if i != labels.len() {
                    return Err(parse_err(lineno, "label records out of order"));
                }
                labels.push(label.to_string());
            }
            "lda.priors" => priors = Some(parse_floats(rest, lineno)?),
            "lda.mean" => class_means.push(parse_floats(rest, lineno)?),
            "lda.cov" => cov_rows.push(parse_floats(rest, lineno)?),
            other => return Err(parse_err(lineno, &format!("unknown key {other:?}"))),
        }
    }

    let mean = pca_mean.ok_or_else(|| parse_err(0, "missing pca.mean"))?;
    let pca = PcaModel {
        mean,
        components: Matrix::from_rows(&components),
        explained_variance_ratio: ratios.ok_or_else(|| parse_err(0, "missing pca.ratios"))?,
        total_variance: total_variance.ok_or_else(|| parse_err(0, "missing pca.total_variance"))?,
    };
    let lda = LdaModel::from_parts(
        labels,
        Matrix::from_rows(&class_means),
        Matrix::from_rows(&cov_rows),
        priors.ok_or_else(|| parse_err(0, "missing lda.priors"))?,
    )?;
    Ok(TrainedModel { pca, lda })
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), write_model(model)).map_err(|e| Error::from_io(path.as_ref(), e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TrainedModel> {
    let text = fs::read_to_string(path.as_ref()).map_err(|e| Error::from_io(path.as_ref(), e))?;
    read_model(&text)
}

fn parse_floats(s: &str, lineno: usize) -> Result<Vec<f64>> {
    s.split_whitespace().map(|t| parse_float(t, lineno)).collect()
}

fn parse_float(t: &str, lineno: usize) -> Result<f64> {
    t.parse()
        .map_err(|_| parse_err(lineno, &format!("bad float {t:?}")))
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlkit::lda::{lda_fit, LdaConfig};
    use crate::mlkit::pca::pca_fit;

    fn sample_model() -> TrainedModel {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let t = i as f64;
                vec![t, (t * 0.7).sin() * 3.0, t * t * 0.05]
            })
            .collect();
        let x = Matrix::from_rows(&rows);
        let pca = pca_fit(&x, 0.999).unwrap();
        let labels: Vec<String> = (0..12)
            .map(|i| if i % 2 == 0 { "even" } else { "odd" }.to_string())
            .collect();
        let reduced = crate::mlkit::pca::pca_transform(&pca, &x).unwrap();
        let lda = lda_fit(&reduced, &labels, &LdaConfig::default()).unwrap();
        TrainedModel { pca, lda }
    }

    #[test]
    fn round_trip_is_lossless() {
        let model = sample_model();
        let text = write_model(&model);
        let back = read_model(&text).unwrap();
        assert_eq!(model, back);
    }

    #[test]
    fn rejects_bad_magic() {
        assert!(matches!(
            read_model("not-a-model 9\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn reports_unknown_key_with_line() {
        let model = sample_model();
        let mut text = write_model(&model);
        text.push_str("mystery.key 1 2 3\n");
        match read_model(&text) {
            Err(Error::Parse { line, message }) => {
                assert!(line > 1);
                assert!(message.contains("mystery.key"));
            }
            other => panic!("expected Parse error, got {other:?}"),
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join("texfrac-model-tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("model.txt");
        let model = sample_model();
        save_model(&model, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), model);
    }
}
