//! Densities of mgp distributions with respect to the face-wise dominating
//! measure (the sum over faces of Lebesgue measures of matching dimension).
//!
//! Closed forms per family, evaluated in log space, plus an independent
//! numerical oracle that integrates the tilted mixture-generator density
//! `h(y) = 1{max y > 0} · (1/ell(1)) ∫ f_U(r + y) e^r dr` by adaptive
//! quadrature. The two routes share no formulas and cross-validate each
//! other.

use alloc::vec::Vec;
#[allow(unused_imports)] // hosted test builds link std, which shadows the trait
use num_traits::Float;

use crate::error::EvalError;
use crate::generators::FactorGenerator;
use crate::linalg::{anchored_sigma, cholesky, mvn_logpdf_chol, VariogramMatrix};
use crate::math::{ln_gamma, logsumexp};
use crate::model::{FactorFamily, MixtureModel, Signature};
use crate::quad;

/// A point of the extended orthant `[-inf, inf)^d`: the support set lists
/// the coordinates with finite values, everything else sits at `-inf`.
/// Minus infinity is structural, never a float sentinel.
#[derive(Clone, Debug, PartialEq)]
pub struct MgpPoint {
    dim: usize,
    support: Signature,
    values: Vec<f64>,
}

impl MgpPoint {
    pub fn new(dim: usize, support: Signature, values: Vec<f64>) -> Result<Self, &'static str> {
        if support.len() != values.len() {
            return Err("support and values disagree in length");
        }
        if support.members().last().copied().unwrap_or(0) >= dim {
            return Err("support index out of range");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err("values must be finite");
        }
        Ok(MgpPoint { dim, support, values })
    }

    /// Reads a dense vector in which `-inf` marks off-support coordinates.
    pub fn from_dense(coords: &[f64]) -> Result<Self, &'static str> {
        let dim = coords.len();
        let mut members = Vec::new();
        let mut values = Vec::new();
        for (j, &v) in coords.iter().enumerate() {
            if v == f64::NEG_INFINITY {
                continue;
            }
            if !v.is_finite() {
                return Err("coordinates must be finite or -inf");
            }
            members.push(j);
            values.push(v);
        }
        let support = Signature::new(members, dim).map_err(|_| "point has empty support")?;
        Ok(MgpPoint { dim, support, values })
    }

    /// Dense representation with `-inf` in off-support coordinates.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = alloc::vec![f64::NEG_INFINITY; self.dim];
        for (&j, &v) in self.support.members().iter().zip(&self.values) {
            out[j] = v;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &Signature {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The value at component `j`, or `-inf` off support.
    pub fn get(&self, j: usize) -> f64 {
        match self.support.position(j) {
            Some(pos) => self.values[pos],
            None => f64::NEG_INFINITY,
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Log-density of the exponent measure of a Hüsler–Reiss distribution in
/// Gumbel coordinates, anchored at position `anchor`:
///
/// `ln λ(x) = −x_a + ln N(x_{-a} − x_a·1; −½Γ_{·a}, Σ^{a})`
///
/// Any anchor yields the same function; the production density fixes the
/// anchor at the last (largest) member.
pub fn hr_exponent_logdensity(
    gamma: &VariogramMatrix,
    x: &[f64],
    anchor: usize,
) -> Result<f64, EvalError> {
    let m = x.len();
    if m == 1 {
        return Ok(-x[0]);
    }
    debug_assert_eq!(gamma.dim(), m);
    debug_assert!(anchor < m);
    let sigma = anchored_sigma(gamma, anchor);
    let chol = cholesky(&sigma)?;
    let others: Vec<usize> = (0..m).filter(|&s| s != anchor).collect();
    let centered: Vec<f64> = others.iter().map(|&s| x[s] - x[anchor]).collect();
    let mean: Vec<f64> = others.iter().map(|&s| -0.5 * gamma.get(s, anchor)).collect();
    Ok(-x[anchor] + mvn_logpdf_chol(&centered, &mean, &chol))
}

/// Log of the mgp density `h_Y(p)` with respect to the face-wise
/// dominating measure. Columns whose signature equals the point's support
/// contribute their closed-form term; mixed-family models sum each
/// column's own form. Returns `-inf` when `max(p) < 0` or when no column
/// lives on the point's face.
///
/// The boundary slice `max(p) = 0` carries no probability mass; this
/// evaluator returns the formula value there (the closure of the
/// support), while [`density_oracle`] keeps the strict indicator and
/// returns 0.
pub fn log_density(model: &MixtureModel, p: &MgpPoint) -> Result<f64, EvalError> {
    debug_assert_eq!(p.dim(), model.d());
    if p.max_value() < 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let ln_ell_one = model.ell_one().ln();
    let mut terms = Vec::new();
    for (k, sig) in model.signatures().iter().enumerate() {
        if sig != p.support() {
            continue;
        }
        let coeffs = model.matrix().column_on(k, sig);
        let term = match &model.families()[k] {
            FactorFamily::Logistic { alpha } => {
                logistic_log_term(*alpha, &coeffs, p.values())
            }
            FactorFamily::HueslerReiss { variogram } => {
                let x: Vec<f64> = p
                    .values()
                    .iter()
                    .zip(&coeffs)
                    .map(|(y, a)| y - a.ln())
                    .collect();
                let anchor = x.len() - 1; // the largest member of J_k
                hr_exponent_logdensity(variogram, &x, anchor)?
            }
        };
        terms.push(term - ln_ell_one);
    }
    Ok(logsumexp(&terms))
}

/// One column's logistic log-term (without the `1/ell(1)` factor):
/// `(m−1) ln(1/α) + ln Γ(m−α) − ln Γ(1−α) + Σ t_j − (m−α) ln Σ e^{t_j}`
/// with `t_j = (ln a_j − y_j)/α`.
fn logistic_log_term(alpha: f64, coeffs: &[f64], y: &[f64]) -> f64 {
    let m = y.len();
    let t: Vec<f64> = coeffs
        .iter()
        .zip(y)
        .map(|(a, yj)| (a.ln() - yj) / alpha)
        .collect();
    let ln_sum = logsumexp(&t);
    -(m as f64 - 1.0) * alpha.ln() + ln_gamma(m as f64 - alpha) - ln_gamma(1.0 - alpha)
        + t.iter().sum::<f64>()
        - (m as f64 - alpha) * ln_sum
}

/// Half-width beyond the data range for the oracle's integration domain.
const ORACLE_DOMAIN_PAD: f64 = 40.0;

/// Numerical density oracle: integrates the mixture-generator density
/// against the exponential tilt by 1-D adaptive quadrature with absolute
/// tolerance `quad_tol`. Independent of the closed forms in
/// [`log_density`].
pub fn density_oracle(model: &MixtureModel, p: &MgpPoint, quad_tol: f64) -> Result<f64, EvalError> {
    debug_assert_eq!(p.dim(), model.d());
    if p.max_value() <= 0.0 {
        return Ok(0.0);
    }
    let mut columns = Vec::new();
    for (k, sig) in model.signatures().iter().enumerate() {
        if sig != p.support() {
            continue;
        }
        let generator = FactorGenerator::new(&model.families()[k], sig.len())?;
        let m_k = model.masses().get(k);
        let shifts: Vec<f64> = model
            .matrix()
            .column_on(k, sig)
            .iter()
            .map(|a| (a / m_k).ln())
            .collect();
        columns.push((m_k, generator, shifts));
    }
    if columns.is_empty() {
        return Ok(0.0);
    }
    let y = p.values();
    let lo = -ORACLE_DOMAIN_PAD - p.max_value();
    let min_y = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ORACLE_DOMAIN_PAD + min_y.abs();
    let integrand = |r: f64| -> f64 {
        let mut total = 0.0;
        for (m_k, generator, shifts) in &columns {
            let u: Vec<f64> = y
                .iter()
                .zip(shifts)
                .map(|(yj, s)| yj + r - s)
                .collect();
            total += m_k * (generator.logpdf(&u) + r).exp();
        }
        total
    };
    let integral = quad::integrate(integrand, lo, hi, quad_tol, 1e-10)
        .map_err(|_| EvalError::QuadratureFailure)?;
    Ok(integral / model.ell_one())
}

/// Probability that a sample lies on face `J_k`; for duplicated signatures
/// this aggregates the weights of every matching column.
pub fn face_mass(model: &MixtureModel, k: usize) -> f64 {
    let sig = &model.signatures()[k];
    model
        .signatures()
        .iter()
        .enumerate()
        .filter(|(_, s)| *s == sig)
        .map(|(k2, _)| model.face_weights().get(k2))
        .sum()
}
