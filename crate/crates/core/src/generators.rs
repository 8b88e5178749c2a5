//! Factor generators and exponentially tilted proposals.
//!
//! Each column `k` carries a generator `U^{(k)}` with `E[e^{U_j}] = 1`:
//! independent transformed-Fréchet coordinates for the logistic family,
//! a multivariate normal `N(−½ diag Σ̃, Σ̃)` for Hüsler–Reiss. The
//! rejection sampler draws from the tilted densities
//! `q_{j,k}(t) ∝ e^{t_j} f_{U^{(k)}}(t − s)` with shifts
//! `s_i = ln(a_ik/m_k)`. All per-column caches (Cholesky factors, shifts,
//! tilted means, Gamma samplers) are built once per model.

use alloc::vec::Vec;
#[allow(unused_imports)] // hosted test builds link std, which shadows the trait
use num_traits::Float;
use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::LinalgError;
use crate::linalg::{
    mvn_logpdf_chol, variogram_to_covariance_with, CholeskyFactor, CovarianceMatrix,
};
use crate::math::ln_gamma;
use crate::model::{FactorFamily, MixtureModel};

/// Gumbel density with scale `alpha` and location `−c`:
/// the law of `α ln X − c` for unit-Fréchet `X`.
#[inline]
fn gumbel_logpdf(u: f64, alpha: f64, c: f64) -> f64 {
    let z = (u + c) / alpha;
    -alpha.ln() - z - (-z).exp()
}

#[inline]
fn gumbel_sample<R: Rng + ?Sized>(alpha: f64, c: f64, rng: &mut R) -> f64 {
    // V on the open interval keeps ln(-ln V) finite
    let v: f64 = rng.sample(Open01);
    -alpha * (-v.ln()).ln() - c
}

/// Prepared generator `U^{(k)}` for one column.
#[derive(Clone, Debug)]
pub enum FactorGenerator {
    Logistic {
        alpha: f64,
        dim: usize,
        /// `ln Γ(1−α)`, the normalizing location shift.
        ln_gamma_1ma: f64,
    },
    HueslerReiss {
        /// `−½ diag Σ̃`.
        mean: Vec<f64>,
        chol: CholeskyFactor,
        cov: CovarianceMatrix,
    },
}

impl FactorGenerator {
    pub fn new(family: &FactorFamily, dim: usize) -> Result<Self, LinalgError> {
        Self::with_shift_constant(family, dim, 1.0)
    }

    /// Builds the generator with an explicit constant `c` in the
    /// variogram-to-covariance construction. Any `c > 0` induces the same
    /// mgp law.
    pub fn with_shift_constant(
        family: &FactorFamily,
        dim: usize,
        c: f64,
    ) -> Result<Self, LinalgError> {
        match family {
            FactorFamily::Logistic { alpha } => Ok(FactorGenerator::Logistic {
                alpha: *alpha,
                dim,
                ln_gamma_1ma: ln_gamma(1.0 - alpha),
            }),
            FactorFamily::HueslerReiss { variogram } => {
                let cov = variogram_to_covariance_with(variogram, c)?;
                debug_assert_eq!(cov.dim(), dim);
                let chol = crate::linalg::cholesky(&cov)?;
                let mean = (0..dim).map(|i| -0.5 * cov.get(i, i)).collect();
                Ok(FactorGenerator::HueslerReiss { mean, chol, cov })
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FactorGenerator::Logistic { dim, .. } => *dim,
            FactorGenerator::HueslerReiss { mean, .. } => mean.len(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            FactorGenerator::Logistic { alpha, dim, ln_gamma_1ma } => {
                (0..*dim).map(|_| gumbel_sample(*alpha, *ln_gamma_1ma, rng)).collect()
            }
            FactorGenerator::HueslerReiss { mean, chol, .. } => {
                let z: Vec<f64> = (0..mean.len()).map(|_| rng.sample(StandardNormal)).collect();
                let lz = chol.mul_vec(&z);
                mean.iter().zip(lz).map(|(m, v)| m + v).collect()
            }
        }
    }

    /// Log of the Lebesgue density `f_{U^{(k)}}` at `u`.
    pub fn logpdf(&self, u: &[f64]) -> f64 {
        match self {
            FactorGenerator::Logistic { alpha, ln_gamma_1ma, .. } => u
                .iter()
                .map(|&ui| gumbel_logpdf(ui, *alpha, *ln_gamma_1ma))
                .sum(),
            FactorGenerator::HueslerReiss { mean, chol, .. } => {
                mvn_logpdf_chol(u, mean, chol)
            }
        }
    }
}

/// Draws one realization of a factor generator. `dim` is the signature
/// cardinality (the logistic family does not know it by itself).
pub fn sample_factor_generator<R: Rng + ?Sized>(
    family: &FactorFamily,
    dim: usize,
    rng: &mut R,
) -> Result<Vec<f64>, LinalgError> {
    Ok(FactorGenerator::new(family, dim)?.sample(rng))
}

/// The tilt-index weights `n_{j,k} = a_jk / Σ_i a_ik` over `J_k`.
pub fn tilt_weights(model: &MixtureModel, k: usize) -> Vec<f64> {
    let sig = &model.signatures()[k];
    let col = model.matrix().column_on(k, sig);
    let total: f64 = col.iter().sum();
    col.iter().map(|a| a / total).collect()
}

/// Tilted proposal `q_{j,k}(t) = e^{t_j} f_{U^{(k)}}(t − s) / (a_jk/m_k)`
/// for a fixed column `k` and tilt position within `J_k`.
#[derive(Clone, Debug)]
pub struct TiltedProposal {
    column: usize,
    tilt_pos: usize,
    shifts: Vec<f64>,
    kind: TiltedKind,
}

#[derive(Clone, Debug)]
enum TiltedKind {
    Logistic {
        alpha: f64,
        ln_gamma_1ma: f64,
        /// Gamma(2−α, 1); the shape-(1−α) draw is boosted from it in
        /// log space so tiny shapes cannot underflow to zero.
        boost: Gamma<f64>,
    },
    HueslerReiss {
        tilted_mean: Vec<f64>,
        generator_mean: Vec<f64>,
        chol: CholeskyFactor,
    },
}

impl TiltedProposal {
    pub fn new(model: &MixtureModel, column: usize, tilt_pos: usize) -> Result<Self, LinalgError> {
        Self::with_shift_constant(model, column, tilt_pos, 1.0)
    }

    pub fn with_shift_constant(
        model: &MixtureModel,
        column: usize,
        tilt_pos: usize,
        c: f64,
    ) -> Result<Self, LinalgError> {
        let sig = &model.signatures()[column];
        debug_assert!(tilt_pos < sig.len());
        let m_k = model.masses().get(column);
        let shifts: Vec<f64> = model
            .matrix()
            .column_on(column, sig)
            .iter()
            .map(|a| (a / m_k).ln())
            .collect();
        let kind = match &model.families()[column] {
            FactorFamily::Logistic { alpha } => TiltedKind::Logistic {
                alpha: *alpha,
                ln_gamma_1ma: ln_gamma(1.0 - alpha),
                boost: Gamma::new(2.0 - alpha, 1.0).expect("shape in (1, 2)"),
            },
            FactorFamily::HueslerReiss { variogram } => {
                let cov = variogram_to_covariance_with(variogram, c)?;
                let chol = crate::linalg::cholesky(&cov)?;
                let generator_mean: Vec<f64> =
                    (0..cov.dim()).map(|i| -0.5 * cov.get(i, i)).collect();
                let tilted_mean: Vec<f64> = (0..cov.dim())
                    .map(|i| shifts[i] - 0.5 * cov.get(i, i) + cov.get(i, tilt_pos))
                    .collect();
                TiltedKind::HueslerReiss { tilted_mean, generator_mean, chol }
            }
        };
        Ok(TiltedProposal { column, tilt_pos, shifts, kind })
    }

    pub fn column(&self) -> usize {
        self.column
    }

    pub fn tilt_pos(&self) -> usize {
        self.tilt_pos
    }

    pub fn dim(&self) -> usize {
        self.shifts.len()
    }

    /// One draw from `q_{j,k}`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.kind {
            TiltedKind::Logistic { alpha, ln_gamma_1ma, boost } => {
                self.shifts
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| {
                        if i == self.tilt_pos {
                            // ln N for N ~ Gamma(1−α, 1), via the boost
                            // N = G' · u^{1/(1−α)} with G' ~ Gamma(2−α, 1)
                            let g: f64 = boost.sample(rng);
                            let u: f64 = rng.sample(Open01);
                            let ln_n = g.ln() + u.ln() / (1.0 - alpha);
                            -alpha * ln_n + s - ln_gamma_1ma
                        } else {
                            gumbel_sample(*alpha, *ln_gamma_1ma, rng) + s
                        }
                    })
                    .collect()
            }
            TiltedKind::HueslerReiss { tilted_mean, chol, .. } => {
                let z: Vec<f64> =
                    (0..tilted_mean.len()).map(|_| rng.sample(StandardNormal)).collect();
                let lz = chol.mul_vec(&z);
                tilted_mean.iter().zip(lz).map(|(m, v)| m + v).collect()
            }
        }
    }

    /// Log of `q_{j,k}(t)`, evaluated through the tilt identity
    /// `e^{t_j} f_{U^{(k)}}(t − s) / (a_jk/m_k)`.
    pub fn logdensity(&self, t: &[f64]) -> f64 {
        debug_assert_eq!(t.len(), self.shifts.len());
        let centered: Vec<f64> = t.iter().zip(&self.shifts).map(|(ti, s)| ti - s).collect();
        let f_u = match &self.kind {
            TiltedKind::Logistic { alpha, ln_gamma_1ma, .. } => centered
                .iter()
                .map(|&u| gumbel_logpdf(u, *alpha, *ln_gamma_1ma))
                .sum::<f64>(),
            TiltedKind::HueslerReiss { generator_mean, chol, .. } => {
                mvn_logpdf_chol(&centered, generator_mean, chol)
            }
        };
        t[self.tilt_pos] + f_u - self.shifts[self.tilt_pos]
    }
}

/// All per-model sampling caches: one tilted proposal per (column, tilt
/// position), tilt-weight cumulative sums, factor generators, shifts and
/// mass cumulative sums. Immutable and shareable across threads.
#[derive(Clone, Debug)]
pub struct ProposalTable {
    proposals: Vec<Vec<TiltedProposal>>,
    tilt_cum: Vec<Vec<f64>>,
    generators: Vec<FactorGenerator>,
    shifts: Vec<Vec<f64>>,
    mass_cum: Vec<f64>,
}

impl ProposalTable {
    pub fn new(model: &MixtureModel) -> Result<Self, LinalgError> {
        Self::with_shift_constant(model, 1.0)
    }

    pub fn with_shift_constant(model: &MixtureModel, c: f64) -> Result<Self, LinalgError> {
        let r = model.r();
        let mut proposals = Vec::with_capacity(r);
        let mut tilt_cum = Vec::with_capacity(r);
        let mut generators = Vec::with_capacity(r);
        let mut shifts = Vec::with_capacity(r);
        for k in 0..r {
            let sig = &model.signatures()[k];
            let per_tilt: Result<Vec<TiltedProposal>, LinalgError> = (0..sig.len())
                .map(|pos| TiltedProposal::with_shift_constant(model, k, pos, c))
                .collect();
            proposals.push(per_tilt?);
            tilt_cum.push(cumulative(&tilt_weights(model, k)));
            generators.push(FactorGenerator::with_shift_constant(
                &model.families()[k],
                sig.len(),
                c,
            )?);
            let m_k = model.masses().get(k);
            shifts.push(
                model
                    .matrix()
                    .column_on(k, sig)
                    .iter()
                    .map(|a| (a / m_k).ln())
                    .collect(),
            );
        }
        let mass_cum = cumulative(model.masses().as_slice());
        Ok(ProposalTable { proposals, tilt_cum, generators, shifts, mass_cum })
    }

    pub fn proposal(&self, column: usize, tilt_pos: usize) -> &TiltedProposal {
        &self.proposals[column][tilt_pos]
    }

    pub fn generator(&self, column: usize) -> &FactorGenerator {
        &self.generators[column]
    }

    pub fn shifts(&self, column: usize) -> &[f64] {
        &self.shifts[column]
    }

    /// Draws a tilt position within column `k` with probabilities `n_{j,k}`.
    pub fn draw_tilt<R: Rng + ?Sized>(&self, column: usize, rng: &mut R) -> usize {
        draw_from_cumulative(&self.tilt_cum[column], rng)
    }

    /// One draw of the mixture generator `U`: picks a column with its
    /// mass, draws the factor generator and applies the column shifts.
    /// Returns the column and the shifted values on its signature.
    pub fn sample_mixture_u<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Vec<f64>) {
        let k = draw_from_cumulative(&self.mass_cum, rng);
        let mut u = self.generators[k].sample(rng);
        for (ui, s) in u.iter_mut().zip(&self.shifts[k]) {
            *ui += s;
        }
        (k, u)
    }

    /// Log of the mixture generator density `f_U` restricted to the face
    /// of column `k`, at face values `u`.
    pub fn mixture_logpdf_on(&self, model: &MixtureModel, k: usize, u: &[f64]) -> f64 {
        let centered: Vec<f64> = u.iter().zip(&self.shifts[k]).map(|(ui, s)| ui - s).collect();
        model.masses().get(k).ln() + self.generators[k].logpdf(&centered)
    }
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cum: Vec<f64> = weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    if let Some(last) = cum.last_mut() {
        *last = 1.0;
    }
    cum
}

pub(crate) fn draw_from_cumulative<R: Rng + ?Sized>(cum: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    cum.partition_point(|&c| c < u).min(cum.len() - 1)
}
