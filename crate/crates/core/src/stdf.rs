//! Stable tail dependence functions.
//!
//! Per-factor stdfs (logistic, Hüsler–Reiss), the mixture stdf
//! `ell(y) = Σ_k ell^{(k)}((a_jk y_j)_{j∈J_k})`, the normalizing constant
//! `ell(1)`, and the face weights `w_k = ell^{(k)}((a_jk)_j) / ell(1)`.
//!
//! Hüsler–Reiss evaluation calls the QMC multivariate normal CDF with
//! fixed seeds derived from term indices, so every value here is
//! bit-reproducible across runs.

use alloc::vec::Vec;
#[allow(unused_imports)] // hosted test builds link std, which shadows the trait
use num_traits::Float;

use crate::error::EvalError;
use crate::linalg::anchored_sigma;
use crate::math::logsumexp;
use crate::model::{CoefficientMatrix, FactorFamily, MixtureModel, Signature};
use crate::mvn::mvn_cdf;
use crate::rng::mix;

/// Seed base for MVN CDF calls made during stdf evaluation.
const STDF_SEED_BASE: u64 = 0x7d1e_57df_0001_a001;
/// Seed base for MVN CDF calls made during face-weight computation.
const WEIGHT_SEED_BASE: u64 = 0x7d1e_57df_0002_b002;

/// Face weights `w_k`, one per column, strictly positive and summing to 1.
/// `w_k` is the probability that a sample lies on face `J_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceWeights {
    weights: Vec<f64>,
}

impl FaceWeights {
    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// The stdf of a single factor at a nonnegative argument whose length is
/// the factor's signature cardinality.
///
/// Logistic: `(Σ_j y_j^{1/α})^α`. Hüsler–Reiss:
/// `Σ_j y_j Φ_{m-1}(η^j(y); Σ^j)` with
/// `η^j(y)_s = ln(y_j/y_s) + Γ_js/2`; a zero `y_s` pushes that coordinate
/// of `η` to `+∞`, and a zero `y_j` kills the j-th summand. Singleton
/// signatures give the identity.
pub fn factor_stdf(family: &FactorFamily, y: &[f64]) -> Result<f64, EvalError> {
    factor_stdf_with(family, y, crate::MVN_TOL_DEFAULT, STDF_SEED_BASE)
}

pub(crate) fn factor_stdf_with(
    family: &FactorFamily,
    y: &[f64],
    mvn_tol: f64,
    seed: u64,
) -> Result<f64, EvalError> {
    if let Some((index, &value)) = y.iter().enumerate().find(|(_, v)| v.is_nan() || **v < 0.0) {
        return Err(EvalError::NegativeInput { index, value });
    }
    match family {
        FactorFamily::Logistic { alpha } => Ok(logistic_stdf(*alpha, y)),
        FactorFamily::HueslerReiss { variogram } => {
            let m = y.len();
            if m == 1 {
                return Ok(y[0]);
            }
            debug_assert_eq!(variogram.dim(), m);
            let ln_y: Vec<f64> = y.iter().map(|&v| v.ln()).collect(); // ln 0 = -inf
            let mut total = 0.0;
            for j in 0..m {
                if y[j] == 0.0 {
                    continue;
                }
                let eta: Vec<f64> = (0..m)
                    .filter(|&s| s != j)
                    .map(|s| {
                        if y[s] == 0.0 {
                            f64::INFINITY
                        } else {
                            ln_y[j] - ln_y[s] + 0.5 * variogram.get(j, s)
                        }
                    })
                    .collect();
                let sigma = anchored_sigma(variogram, j);
                let term_tol = mvn_tol / (m as f64 * y[j].max(1.0));
                let phi = mvn_cdf(&eta, &sigma, term_tol, mix(seed, j as u64))?;
                total += y[j] * phi.value;
            }
            Ok(total)
        }
    }
}

// (Σ y^{1/α})^α in log space, so y near 1e-300 or 1e300 cannot underflow
// the inner powers
fn logistic_stdf(alpha: f64, y: &[f64]) -> f64 {
    let terms: Vec<f64> = y
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v.ln() / alpha)
        .collect();
    if terms.is_empty() {
        return 0.0;
    }
    (alpha * logsumexp(&terms)).exp()
}

/// The mixture stdf `ell(y) = Σ_k ell^{(k)}((a_jk y_j)_{j∈J_k})` at a
/// nonnegative d-vector.
pub fn mixture_stdf(model: &MixtureModel, y: &[f64]) -> Result<f64, EvalError> {
    debug_assert_eq!(y.len(), model.d());
    if let Some((index, &value)) = y.iter().enumerate().find(|(_, v)| v.is_nan() || **v < 0.0) {
        return Err(EvalError::NegativeInput { index, value });
    }
    let mut total = 0.0;
    for (k, sig) in model.signatures().iter().enumerate() {
        let scaled: Vec<f64> = sig
            .members()
            .iter()
            .map(|&j| model.matrix().get(j, k) * y[j])
            .collect();
        total += factor_stdf_with(
            &model.families()[k],
            &scaled,
            model.mvn_tol(),
            mix(STDF_SEED_BASE, k as u64),
        )?;
    }
    Ok(total)
}

/// The face weights of a model. Precomputed at validation; this accessor
/// exists for symmetry with the other stdf operations.
pub fn face_weights(model: &MixtureModel) -> &FaceWeights {
    model.face_weights()
}

/// Computes `(w, ell(1))` from the model parts. `ell(1)` is the sum of the
/// per-column stdf values at the column coefficients, so the weights sum
/// to 1 by construction.
pub(crate) fn compute_face_weights(
    matrix: &CoefficientMatrix,
    signatures: &[Signature],
    families: &[FactorFamily],
    mvn_tol: f64,
) -> Result<(FaceWeights, f64), EvalError> {
    let mut column_values = Vec::with_capacity(families.len());
    for (k, (sig, family)) in signatures.iter().zip(families).enumerate() {
        let coeffs = matrix.column_on(k, sig);
        let value = factor_stdf_with(family, &coeffs, mvn_tol, mix(WEIGHT_SEED_BASE, k as u64))?;
        column_values.push(value);
    }
    let ell_one: f64 = column_values.iter().sum();
    let weights = column_values.iter().map(|v| v / ell_one).collect();
    Ok((FaceWeights { weights }, ell_one))
}
