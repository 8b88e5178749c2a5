//! Dense symmetric linear algebra for small matrices (dim ≤ ~32):
//! Cholesky factorization, multivariate normal log-density, and the
//! variogram ↔ covariance constructions used by the Hüsler–Reiss family.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // hosted test builds link std, which shadows the trait
use num_traits::Float;

use crate::error::LinalgError;
use crate::math::LN_SQRT_2PI;

/// Relative pivot threshold below which Cholesky declares the matrix
/// not positive definite. No jitter is ever applied.
const CHOL_PIVOT_REL: f64 = 1e-14;

/// Symmetric matrix with zero diagonal, conditionally negative definite:
/// `vᵀΓv < 0` for all nonzero `v ⊥ 1`. Parameterizes Hüsler–Reiss
/// dependence. The empty 0×0 matrix is the singleton-face case.
#[derive(Clone, Debug, PartialEq)]
pub struct VariogramMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl VariogramMatrix {
    /// Validates symmetry, zero diagonal and conditional negative
    /// definiteness. Returns the violated constraint on failure.
    pub fn new(rows: &[Vec<f64>]) -> Result<Self, &'static str> {
        let m = rows.len();
        let mut data = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err("variogram is not square");
            }
            data.extend_from_slice(row);
        }
        let g = VariogramMatrix { dim: m, data };
        for s in 0..m {
            if g.get(s, s) != 0.0 {
                return Err("variogram has a nonzero diagonal entry");
            }
            for t in (s + 1)..m {
                if !g.get(s, t).is_finite() {
                    return Err("variogram has a non-finite entry");
                }
                if (g.get(s, t) - g.get(t, s)).abs() > 1e-12 * (1.0 + g.get(s, t).abs()) {
                    return Err("variogram is asymmetric");
                }
            }
        }
        if m >= 2 && !g.is_conditionally_negative_definite() {
            return Err("variogram is not conditionally negative definite");
        }
        Ok(g)
    }

    pub fn empty() -> Self {
        VariogramMatrix { dim: 0, data: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.data[s * self.dim + t]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|s| self.data[s * self.dim..(s + 1) * self.dim].to_vec())
            .collect()
    }

    /// Checks that `-½ΠΓΠ` (Π the centering projection) is positive
    /// semidefinite with a single zero eigenvalue along the all-ones vector.
    fn is_conditionally_negative_definite(&self) -> bool {
        let m = self.dim;
        let centered = self.centered_neg_half();
        let scale = centered
            .iter()
            .fold(0.0f64, |acc, &x| acc.max(x.abs()))
            .max(1.0);
        let (eigvals, eigvecs) = jacobi_eigen(&centered, m);
        let zero_tol = 1e-10 * scale;
        let mut near_zero = 0usize;
        let mut zero_along_ones = false;
        for (i, &lam) in eigvals.iter().enumerate() {
            if lam < -zero_tol {
                return false;
            }
            if lam.abs() <= zero_tol {
                near_zero += 1;
                // eigenvector i is column i of eigvecs
                let dot: f64 = (0..m).map(|s| eigvecs[s * m + i]).sum();
                if dot.abs() / (m as f64).sqrt() > 0.99 {
                    zero_along_ones = true;
                }
            }
        }
        near_zero == 1 && zero_along_ones
    }

    /// `-½ Π Γ Π` in dense form.
    fn centered_neg_half(&self) -> Vec<f64> {
        let m = self.dim;
        let row_mean: Vec<f64> = (0..m)
            .map(|s| (0..m).map(|t| self.get(s, t)).sum::<f64>() / m as f64)
            .collect();
        let grand = row_mean.iter().sum::<f64>() / m as f64;
        let mut out = vec![0.0; m * m];
        for s in 0..m {
            for t in 0..m {
                out[s * m + t] = -0.5 * (self.get(s, t) - row_mean[s] - row_mean[t] + grand);
            }
        }
        out
    }
}

/// Symmetric positive definite matrix (Cholesky must succeed).
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl CovarianceMatrix {
    /// Wraps a row-major symmetric matrix. Positive definiteness is not
    /// checked here; `cholesky` is the test.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, &'static str> {
        let m = rows.len();
        if m == 0 {
            return Err("covariance must have dimension >= 1");
        }
        let mut data = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err("covariance is not square");
            }
            data.extend_from_slice(row);
        }
        for s in 0..m {
            for t in (s + 1)..m {
                let a = data[s * m + t];
                let b = data[t * m + s];
                if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                    return Err("covariance is asymmetric");
                }
            }
        }
        Ok(CovarianceMatrix { dim: m, data })
    }

    pub fn identity(m: usize) -> Self {
        let mut data = vec![0.0; m * m];
        for i in 0..m {
            data[i * m + i] = 1.0;
        }
        CovarianceMatrix { dim: m, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.data[s * self.dim + t]
    }

    /// Keeps the rows and columns listed in `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> CovarianceMatrix {
        let m = idx.len();
        let mut data = Vec::with_capacity(m * m);
        for &s in idx {
            for &t in idx {
                data.push(self.get(s, t));
            }
        }
        CovarianceMatrix { dim: m, data }
    }

    /// The variogram of this covariance: `Γ_st = Σ_ss + Σ_tt − 2Σ_st`.
    pub fn variogram(&self) -> Vec<f64> {
        let m = self.dim;
        let mut g = vec![0.0; m * m];
        for s in 0..m {
            for t in 0..m {
                g[s * m + t] = self.get(s, s) + self.get(t, t) - 2.0 * self.get(s, t);
            }
        }
        g
    }
}

/// Lower-triangular Cholesky factor `L` with `L·Lᵀ = C`.
#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<f64>,
}

/// Cholesky factorization. Fails loudly if any pivot falls at or below
/// `1e-14 ×` the largest diagonal entry.
pub fn cholesky(c: &CovarianceMatrix) -> Result<CholeskyFactor, LinalgError> {
    let m = c.dim;
    let mut l = vec![0.0; m * m];
    let max_diag = (0..m).fold(0.0f64, |acc, i| acc.max(c.get(i, i)));
    let threshold = CHOL_PIVOT_REL * max_diag;
    for i in 0..m {
        for j in 0..=i {
            let mut s = c.get(i, j);
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if s <= threshold {
                    return Err(LinalgError::NotPositiveDefinite);
                }
                l[i * m + i] = s.sqrt();
            } else {
                l[i * m + j] = s / l[j * m + j];
            }
        }
    }
    Ok(CholeskyFactor { dim: m, lower: l })
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.dim + j]
    }

    /// `ln det C = 2 Σ ln L_ii` of the factored matrix.
    pub fn logdet(&self) -> f64 {
        2.0 * (0..self.dim).map(|i| self.get(i, i).ln()).sum::<f64>()
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower(&self, b: &mut [f64]) {
        let m = self.dim;
        for i in 0..m {
            let (solved, rest) = b.split_at_mut(i);
            let mut s = rest[0];
            for (k, bk) in solved.iter().enumerate() {
                s -= self.get(i, k) * bk;
            }
            rest[0] = s / self.get(i, i);
        }
    }

    /// `xᵀ C⁻¹ x` via a single forward solve.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let mut y = x.to_vec();
        self.solve_lower(&mut y);
        y.iter().map(|v| v * v).sum()
    }

    /// `L·z`, the map from standard normals to correlated draws.
    pub fn mul_vec(&self, z: &[f64]) -> Vec<f64> {
        let m = self.dim;
        (0..m)
            .map(|i| (0..=i).map(|k| self.get(i, k) * z[k]).sum())
            .collect()
    }
}

/// Log-density of the m-variate normal `N(mean, C)` at `x`.
pub fn mvn_logpdf(x: &[f64], mean: &[f64], c: &CovarianceMatrix) -> Result<f64, LinalgError> {
    let chol = cholesky(c)?;
    Ok(mvn_logpdf_chol(x, mean, &chol))
}

/// Same as [`mvn_logpdf`] with a precomputed factor.
pub fn mvn_logpdf_chol(x: &[f64], mean: &[f64], chol: &CholeskyFactor) -> f64 {
    let m = chol.dim();
    debug_assert_eq!(x.len(), m);
    debug_assert_eq!(mean.len(), m);
    let diff: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
    let q = chol.quad_form(&diff);
    -(m as f64) * LN_SQRT_2PI - 0.5 * chol.logdet() - 0.5 * q
}

/// Builds a positive definite covariance with variogram `G`:
/// `Σ = −½ Π G Π + c·11ᵀ`, Π the centering projection.
///
/// Any `c > 0` yields the same mgp law; the default is `c = 1`.
pub fn variogram_to_covariance(g: &VariogramMatrix) -> Result<CovarianceMatrix, LinalgError> {
    variogram_to_covariance_with(g, 1.0)
}

/// [`variogram_to_covariance`] with an explicit shift constant `c`.
pub fn variogram_to_covariance_with(
    g: &VariogramMatrix,
    c: f64,
) -> Result<CovarianceMatrix, LinalgError> {
    debug_assert!(c > 0.0);
    let m = g.dim();
    if m == 0 {
        // singleton faces carry the 1×1 covariance [c]
        return Ok(CovarianceMatrix { dim: 1, data: vec![c] });
    }
    let mut data = g.centered_neg_half();
    for v in data.iter_mut() {
        *v += c;
    }
    let cov = CovarianceMatrix { dim: m, data };
    cholesky(&cov)?;
    Ok(cov)
}

/// The anchored Hüsler–Reiss covariance over positions `!= anchor`:
/// entries `½(Γ_js + Γ_jt − Γ_st)` with `j = anchor`, in the order of the
/// remaining positions.
pub fn anchored_sigma(g: &VariogramMatrix, anchor: usize) -> CovarianceMatrix {
    let m = g.dim();
    debug_assert!(m >= 2 && anchor < m);
    let others: Vec<usize> = (0..m).filter(|&s| s != anchor).collect();
    let mm = m - 1;
    let mut data = Vec::with_capacity(mm * mm);
    for &s in &others {
        for &t in &others {
            data.push(0.5 * (g.get(anchor, s) + g.get(anchor, t) - g.get(s, t)));
        }
    }
    CovarianceMatrix { dim: mm, data }
}

/// Eigenvalues and eigenvectors of a dense symmetric matrix by cyclic
/// Jacobi rotations. Eigenvectors are the columns of the returned matrix.
fn jacobi_eigen(a: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = a.to_vec();
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..m {
            for q in (p + 1)..m {
                off += a[p * m + q] * a[p * m + q];
            }
        }
        if off.sqrt() < 1e-15 {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - s * vkq;
                    v[k * m + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eig: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    (eig, v)
}
