//! Exact simulation of mgp samples.
//!
//! A sample is drawn by: pick a face `b` with the face weights, then
//! rejection-sample the face block from exponentially tilted proposals
//! (accept with probability `e^{max Q} / Σ_j e^{Q_j}`, tested in log
//! space), and return `Y = Q − max(Q) + E` with `E` unit exponential.
//! Expected proposals per sample total `d / ell(1)`.
//!
//! Sample `i` of a batch is generated from the RNG substream derived from
//! `(seed, i)`, so batch output is bit-identical no matter how the indices
//! are partitioned across threads.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // hosted test builds link std, which shadows the trait
use num_traits::Float;
use rand::distr::OpenClosed01;
use rand::Rng;
use rand_distr::Exp1;

use crate::density::MgpPoint;
use crate::error::{LinalgError, SimError};
use crate::generators::{draw_from_cumulative, ProposalTable};
use crate::math::logsumexp;
use crate::model::MixtureModel;
use crate::rng::substream;

/// Batch parameters. `workers` is a scheduling hint for parallel drivers;
/// it never affects the output because each sample has its own substream.
#[derive(Clone, Copy, Debug)]
pub struct SimulationConfig {
    pub n: u64,
    pub seed: u64,
    pub max_rejections: u64,
    pub workers: usize,
}

impl SimulationConfig {
    pub fn new(n: u64, seed: u64) -> Self {
        SimulationConfig { n, seed, max_rejections: 1_000_000, workers: 1 }
    }
}

/// Counters accumulated over a batch.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BatchStats {
    pub proposals: u64,
    pub acceptances: u64,
    /// Accepted samples per column index.
    pub column_counts: Vec<u64>,
}

/// A batch of mgp samples with its sampling counters.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub points: Vec<MgpPoint>,
    pub stats: BatchStats,
}

/// One accepted sample with its provenance.
#[derive(Clone, Debug)]
pub struct SampleDraw {
    pub point: MgpPoint,
    pub proposals: u64,
    pub column: usize,
}

/// Prepared sampler: face-weight and tilt cumulative sums plus all tilted
/// proposal caches. Immutable; share freely across threads.
#[derive(Clone, Debug)]
pub struct Sampler<'m> {
    model: &'m MixtureModel,
    table: ProposalTable,
    weight_cum: Vec<f64>,
    /// Per component `j`: the columns containing `j` with the tilt
    /// position of `j` and cumulative probabilities `a_jk` (row sums
    /// make these a distribution).
    extremal: Vec<Vec<(usize, usize, f64)>>,
}

impl<'m> Sampler<'m> {
    pub fn new(model: &'m MixtureModel) -> Result<Self, LinalgError> {
        Self::with_shift_constant(model, 1.0)
    }

    /// Builds the sampler with an explicit variogram-to-covariance
    /// constant for Hüsler–Reiss columns. The mgp law does not depend on
    /// it; the default is 1.
    pub fn with_shift_constant(model: &'m MixtureModel, c: f64) -> Result<Self, LinalgError> {
        let table = ProposalTable::with_shift_constant(model, c)?;
        let mut acc = 0.0;
        let mut weight_cum: Vec<f64> = model
            .face_weights()
            .as_slice()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        *weight_cum.last_mut().expect("r >= 1") = 1.0;
        let mut extremal = Vec::with_capacity(model.d());
        for j in 0..model.d() {
            let mut rows = Vec::new();
            let mut cum = 0.0;
            for (k, sig) in model.signatures().iter().enumerate() {
                if let Some(pos) = sig.position(j) {
                    cum += model.matrix().get(j, k);
                    rows.push((k, pos, cum));
                }
            }
            if let Some(last) = rows.last_mut() {
                last.2 = 1.0;
            }
            extremal.push(rows);
        }
        Ok(Sampler { model, table, weight_cum, extremal })
    }

    pub fn model(&self) -> &MixtureModel {
        self.model
    }

    pub fn table(&self) -> &ProposalTable {
        &self.table
    }

    /// One sample from the caller's RNG. Fails after `max_rejections`
    /// proposals.
    pub fn sample_one<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        max_rejections: u64,
    ) -> Result<SampleDraw, SimError> {
        self.draw(rng, max_rejections).ok_or(SimError::RejectionBudgetExceeded {
            sample_index: 0,
            budget: max_rejections,
        })
    }

    /// The sample at batch position `index` under `seed`; independent of
    /// any other index.
    pub fn sample_at_index(
        &self,
        seed: u64,
        index: u64,
        max_rejections: u64,
    ) -> Result<SampleDraw, SimError> {
        let mut rng = substream(seed, index);
        self.draw(&mut rng, max_rejections).ok_or(SimError::RejectionBudgetExceeded {
            sample_index: index,
            budget: max_rejections,
        })
    }

    /// A full batch, sequentially over substreams. Parallel drivers get
    /// identical output by calling [`Sampler::sample_at_index`] for any
    /// partition of `0..n`.
    pub fn sample_batch(&self, config: &SimulationConfig) -> Result<SampleBatch, SimError> {
        let mut points = Vec::with_capacity(config.n as usize);
        let mut stats =
            BatchStats { proposals: 0, acceptances: 0, column_counts: vec![0; self.model.r()] };
        for index in 0..config.n {
            let draw = self.sample_at_index(config.seed, index, config.max_rejections)?;
            stats.proposals += draw.proposals;
            stats.acceptances += 1;
            stats.column_counts[draw.column] += 1;
            points.push(draw.point);
        }
        Ok(SampleBatch { points, stats })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, max_rejections: u64) -> Option<SampleDraw> {
        // the face index is drawn once; the rejection loop re-draws only
        // the tilt index, the proposal and the uniform
        let b = draw_from_cumulative(&self.weight_cum, rng);
        let sig = &self.model.signatures()[b];
        let mut proposals = 0u64;
        loop {
            proposals += 1;
            if proposals > max_rejections {
                return None;
            }
            let tilt = self.table.draw_tilt(b, rng);
            let q = self.table.proposal(b, tilt).sample(rng);
            let u0: f64 = rng.sample(OpenClosed01);
            let max_q = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if u0.ln() <= max_q - logsumexp(&q) {
                let e = positive_exponential(rng);
                let values: Vec<f64> = q.iter().map(|qi| qi - max_q + e).collect();
                let point = MgpPoint::new(self.model.d(), sig.clone(), values)
                    .expect("face values are finite");
                return Some(SampleDraw { point, proposals, column: b });
            }
        }
    }

    /// Draws the extremal function `Q^{(j)}`: a column containing `j` is
    /// picked with probability `a_jk`, then the proposal tilted at `j` is
    /// sampled on that column's face. `exp(Q^{(j)} − Q_j^{(j)})` has the
    /// law of `exp(Y − Y_j)` given `Y_j > 0`.
    pub fn sample_extremal_function<R: Rng + ?Sized>(&self, j: usize, rng: &mut R) -> MgpPoint {
        let rows = &self.extremal[j];
        let u: f64 = rng.random();
        let idx = rows.partition_point(|&(_, _, cum)| cum < u).min(rows.len() - 1);
        let (k, pos, _) = rows[idx];
        let q = self.table.proposal(k, pos).sample(rng);
        MgpPoint::new(self.model.d(), self.model.signatures()[k].clone(), q)
            .expect("proposal values are finite")
    }
}

fn positive_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let e: f64 = rng.sample(Exp1);
        if e > 0.0 {
            return e;
        }
    }
}

/// The componentwise transform `z_j = s·(e^{y_j/s} − 1)`; off-support
/// coordinates map to the finite floor `−s`.
pub fn boxcox_transform(p: &MgpPoint, scale: f64) -> Vec<f64> {
    debug_assert!(scale > 0.0);
    p.to_dense()
        .iter()
        .map(|&y| {
            if y == f64::NEG_INFINITY {
                -scale
            } else {
                scale * (y / scale).exp_m1()
            }
        })
        .collect()
}
