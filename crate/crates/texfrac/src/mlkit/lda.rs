//! Linear discriminant analysis with a shrinkage-regularized pooled
//! covariance.
//!
//! Scoring rule: assign the class maximizing
//! `x . Sigma^-1 mu_c - (1/2) mu_c . Sigma^-1 mu_c + ln prior_c`,
//! ties going to the lowest class index. The pooled within-class
//! covariance is shrunk toward its scaled identity,
//! `(1 - lambda) Sigma + lambda (tr Sigma / d) I`, which keeps the
//! solve well posed after PCA.

use crate::error::{Error, Result};
use crate::mlkit::linalg::{cholesky, cholesky_solve, dot, Matrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaConfig<T> {
    /// Shrinkage weight lambda in [0, 1).
    pub shrinkage: T,
    /// Disable to use the raw pooled covariance (may be singular).
    pub regularize: bool,
}

impl<T: Real> Default for LdaConfig<T> {
    fn default() -> Self {
        LdaConfig {
            shrinkage: T::of(1e-4),
            regularize: true,
        }
    }
}

/// Fitted discriminant model.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel<T> {
    labels: Vec<String>,
    /// Class means, one per row.
    means: Matrix<T>,
    /// Pooled within-class covariance after regularization.
    covariance: Matrix<T>,
    priors: Vec<T>,
    // cached discriminant: weights[c] = Sigma^-1 mu_c, biases[c] as above
    weights: Matrix<T>,
    biases: Vec<T>,
}

impl<T: Real> LdaModel<T> {
    /// Rebuilds the discriminant from its stored statistics.
    pub fn from_parts(
        labels: Vec<String>,
        means: Matrix<T>,
        covariance: Matrix<T>,
        priors: Vec<T>,
    ) -> Result<Self> {
        let classes = labels.len();
        let d = means.cols();
        if means.rows() != classes || priors.len() != classes {
            return Err(Error::InvalidParameter(
                "class count mismatch between labels, means, priors".to_string(),
            ));
        }
        let factor = cholesky(&covariance)?;
        let mut weights = Matrix::zeros(classes, d);
        let mut biases = Vec::with_capacity(classes);
        for c in 0..classes {
            let w = cholesky_solve(&factor, means.row(c));
            let bias = -dot(means.row(c), &w) / T::of(2.0) + priors[c].ln();
            for (j, &v) in w.iter().enumerate() {
                weights[(c, j)] = v;
            }
            biases.push(bias);
        }
        Ok(LdaModel {
            labels,
            means,
            covariance,
            priors,
            weights,
            biases,
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn means(&self) -> &Matrix<T> {
        &self.means
    }

    pub fn covariance(&self) -> &Matrix<T> {
        &self.covariance
    }

    pub fn priors(&self) -> &[T] {
        &self.priors
    }

    pub fn input_dim(&self) -> usize {
        self.means.cols()
    }

    /// Discriminant score of `sample` for class `c`.
    pub fn score(&self, sample: &[T], c: usize) -> T {
        dot(sample, self.weights.row(c)) + self.biases[c]
    }

    /// Index of the winning class; exact ties go to the lowest index.
    pub fn predict(&self, sample: &[T]) -> Result<usize> {
        if sample.len() != self.input_dim() {
            return Err(Error::UnknownLabelSpace(format!(
                "expected {} features, got {}",
                self.input_dim(),
                sample.len()
            )));
        }
        let mut best = 0usize;
        let mut best_score = self.score(sample, 0);
        for c in 1..self.labels.len() {
            let s = self.score(sample, c);
            if s > best_score {
                best = c;
                best_score = s;
            }
        }
        Ok(best)
    }

    pub fn predict_label(&self, sample: &[T]) -> Result<&str> {
        Ok(&self.labels[self.predict(sample)?])
    }
}

/// Fits the discriminant on labeled rows. Needs at least two classes
/// with at least two samples each.
pub fn lda_fit<T: Real>(x: &Matrix<T>, labels: &[String], config: &LdaConfig<T>) -> Result<LdaModel<T>> {
    let (n, d) = (x.rows(), x.cols());
    if labels.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{n} rows but {} labels",
            labels.len()
        )));
    }

    let mut class_labels: Vec<String> = labels.to_vec();
    class_labels.sort();
    class_labels.dedup();
    let classes = class_labels.len();
    if classes < 2 {
        return Err(Error::InsufficientData(format!(
            "need >= 2 classes, got {classes}"
        )));
    }
    let class_index = |l: &String| class_labels.binary_search(l).expect("label present");
    let mut counts = vec![0usize; classes];
    for l in labels {
        counts[class_index(l)] += 1;
    }
    if let Some(c) = counts.iter().position(|&k| k < 2) {
        return Err(Error::InsufficientData(format!(
            "class {:?} has {} samples, need >= 2",
            class_labels[c], counts[c]
        )));
    }

    let mut means = Matrix::zeros(classes, d);
    for (row, l) in x.row_iter().zip(labels) {
        let c = class_index(l);
        for (j, &v) in row.iter().enumerate() {
            means[(c, j)] = means[(c, j)] + v;
        }
    }
    for c in 0..classes {
        let k = T::of_usize(counts[c]);
        for j in 0..d {
            means[(c, j)] = means[(c, j)] / k;
        }
    }

    // pooled within-class scatter over n - classes degrees of freedom
    let mut cov = Matrix::zeros(d, d);
    for (row, l) in x.row_iter().zip(labels) {
        let c = class_index(l);
        let centered: Vec<T> = row
            .iter()
            .enumerate()
            .map(|(j, &v)| v - means[(c, j)])
            .collect();
        for i in 0..d {
            for j in i..d {
                cov[(i, j)] = cov[(i, j)] + centered[i] * centered[j];
            }
        }
    }
    let denom = T::of_usize(n - classes);
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    if config.regularize {
        let lambda = config.shrinkage;
        let mut trace = T::zero();
        for i in 0..d {
            trace = trace + cov[(i, i)];
        }
        let ridge = lambda * trace / T::of_usize(d);
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] = (T::one() - lambda) * cov[(i, j)];
            }
            cov[(i, i)] = cov[(i, i)] + ridge;
        }
    }

    let total = T::of_usize(n);
    let priors = counts.iter().map(|&k| T::of_usize(k) / total).collect();
    LdaModel::from_parts(class_labels, means, cov, priors)
}
