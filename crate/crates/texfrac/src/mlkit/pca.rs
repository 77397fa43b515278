//! Principal component analysis via the covariance eigendecomposition.

use crate::error::{Error, Result};
use crate::mlkit::linalg::{dot, jacobi_symmetric, Matrix};
use crate::scalar::Real;

/// Fitted PCA basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel<T> {
    /// Per-feature training mean.
    pub mean: Vec<T>,
    /// Retained components, one per row, mutually orthonormal.
    pub components: Matrix<T>,
    /// Fraction of total variance carried by each retained component.
    pub explained_variance_ratio: Vec<T>,
    /// Total variance of the training data (sum over all eigenvalues).
    pub total_variance: T,
}

impl<T: Real> PcaModel<T> {
    pub fn retained(&self) -> usize {
        self.components.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.components.cols()
    }
}

/// Fits a PCA basis retaining the smallest component count whose
/// cumulative explained variance reaches `retention`, capped at
/// `min(rows - 1, cols)`.
pub fn pca_fit<T: Real>(x: &Matrix<T>, retention: T) -> Result<PcaModel<T>> {
    let (n, d) = (x.rows(), x.cols());
    if n < 2 || d < 1 {
        return Err(Error::InsufficientData(format!(
            "PCA needs >= 2 rows and >= 1 column, got {n}x{d}"
        )));
    }
    if x.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "feature table contains NaN or infinity".to_string(),
        ));
    }
    if !(retention > T::zero() && retention <= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "retention {retention} outside (0, 1]"
        )));
    }

    let n_t = T::of_usize(n);
    let mut mean = vec![T::zero(); d];
    for row in x.row_iter() {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m = *m + v;
        }
    }
    for m in &mut mean {
        *m = *m / n_t;
    }

    // covariance of the centered data, normalized by n - 1
    let denom = T::of_usize(n - 1);
    let mut cov = Matrix::zeros(d, d);
    for row in x.row_iter() {
        let centered: Vec<T> = row.iter().zip(&mean).map(|(&v, &m)| v - m).collect();
        for i in 0..d {
            for j in i..d {
                cov[(i, j)] = cov[(i, j)] + centered[i] * centered[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let (mut eigenvalues, vectors) = jacobi_symmetric(&cov);
    for v in &mut eigenvalues {
        if *v < T::zero() {
            *v = T::zero();
        }
    }
    let total: T = eigenvalues.iter().copied().sum();
    if total <= T::zero() {
        return Err(Error::DegenerateData(
            "all rows identical: zero variance".to_string(),
        ));
    }

    let cap = (n - 1).min(d);
    let mut retained = cap;
    let mut cumulative = T::zero();
    for (i, &v) in eigenvalues.iter().take(cap).enumerate() {
        cumulative = cumulative + v / total;
        if cumulative >= retention {
            retained = i + 1;
            break;
        }
    }

    let mut components = Matrix::zeros(retained, d);
    for k in 0..retained {
        // canonical sign: the largest-magnitude entry is positive
        let row = vectors.row(k);
        let mut lead = T::zero();
        for &v in row {
            if v.abs() > lead.abs() {
                lead = v;
            }
        }
        let flip = lead < T::zero();
        for j in 0..d {
            components[(k, j)] = if flip { -row[j] } else { row[j] };
        }
    }
    let explained_variance_ratio = eigenvalues[..retained]
        .iter()
        .map(|&v| v / total)
        .collect();
    Ok(PcaModel {
        mean,
        components,
        explained_variance_ratio,
        total_variance: total,
    })
}

/// Projects rows of `x` onto the retained components.
pub fn pca_transform<T: Real>(model: &PcaModel<T>, x: &Matrix<T>) -> Result<Matrix<T>> {
    if x.cols() != model.input_dim() {
        return Err(Error::UnknownLabelSpace(format!(
            "expected {} features, got {}",
            model.input_dim(),
            x.cols()
        )));
    }
    let k = model.retained();
    let mut out = Matrix::zeros(x.rows(), k);
    for (r, row) in x.row_iter().enumerate() {
        let centered: Vec<T> = row.iter().zip(&model.mean).map(|(&v, &m)| v - m).collect();
        for c in 0..k {
            out[(r, c)] = dot(&centered, model.components.row(c));
        }
    }
    Ok(out)
}
