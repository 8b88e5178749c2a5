//! Statistical validation of models and sample batches: face-frequency
//! reports against the true face weights, distributional identities
//! (`max(Y) ~ Exp(1)`, `P[Y_j > 0] = 1/ell(1)`, acceptance rate
//! `ell(1)/d`), and Monte-Carlo checks of the stdf against its generator
//! representation.
//!
//! Test level is 1e-3 throughout; KS critical values come from the
//! asymptotic Kolmogorov distribution, adequate for the n ≥ 1000 batches
//! these checks require.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // hosted test builds link std, which shadows the trait
use num_traits::Float;

use crate::density::face_mass;
use crate::error::{EvalError, LinalgError};
use crate::generators::ProposalTable;
use crate::math::norm_quantile;
use crate::model::{MixtureModel, Signature};
use crate::rng::substream;
use crate::simulate::SampleBatch;
use crate::stdf::mixture_stdf;

/// Two-sided test level shared by every check.
pub const TEST_LEVEL: f64 = 1e-3;
/// Band, in standard errors, for frequency-style checks.
pub const FREQUENCY_SE_BAND: f64 = 4.0;
/// Minimum batch size accepted by `distribution_checks`.
pub const MIN_BATCH: usize = 1_000;

/// Asymptotic Kolmogorov critical constant at `TEST_LEVEL`:
/// `P[sup|D| > c/√n] ≈ level` for `c = sqrt(−ln(level/2)/2)`.
pub fn ks_critical_constant() -> f64 {
    (-(TEST_LEVEL / 2.0).ln() / 2.0).sqrt()
}

/// One-sample KS critical value at `TEST_LEVEL` for sample size `n`.
pub fn ks_one_sample_critical(n: usize) -> f64 {
    ks_critical_constant() / (n as f64).sqrt()
}

/// Two-sample KS critical value at `TEST_LEVEL`.
pub fn ks_two_sample_critical(n: usize, m: usize) -> f64 {
    ks_critical_constant() * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Two-sided normal quantile for `TEST_LEVEL`.
pub fn z_critical() -> f64 {
    norm_quantile(1.0 - TEST_LEVEL / 2.0)
}

/// KS statistic of `values` against the unit exponential CDF.
pub fn ks_statistic_exp1(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = 1.0 - (-x).exp();
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Two-sample KS statistic.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(|p, q| p.total_cmp(q));
    ys.sort_unstable_by(|p, q| p.total_cmp(q));
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d.max((1.0 - i as f64 / n).abs().max((1.0 - j as f64 / m).abs()))
}

/// Per-direction comparison of empirical face frequencies against the
/// aggregated true weights.
#[derive(Clone, Debug)]
pub struct FaceReportRow {
    pub direction: Signature,
    pub true_prob: f64,
    pub empirical_prob: f64,
    pub count: u64,
    pub z_score: f64,
}

#[derive(Clone, Debug)]
pub struct FaceReport {
    pub rows: Vec<FaceReportRow>,
    pub n: usize,
}

impl FaceReport {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for FaceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<14} {:>10} {:>10} {:>8}", "direction", "empirical", "true", "z")?;
        for row in &self.rows {
            writeln!(
                f,
                "{:<14} {:>10.4} {:>10.4} {:>8.2}",
                format!("{}", row.direction),
                row.empirical_prob,
                row.true_prob,
                row.z_score
            )?;
        }
        Ok(())
    }
}

/// Counts batch points per deduplicated direction and compares to the
/// aggregated face weights.
pub fn face_report(model: &MixtureModel, batch: &SampleBatch) -> FaceReport {
    let n = batch.points.len();
    let mut index: BTreeMap<&Signature, usize> = BTreeMap::new();
    let mut rows: Vec<FaceReportRow> = Vec::new();
    for (k, sig) in model.signatures().iter().enumerate() {
        if !index.contains_key(sig) {
            index.insert(sig, rows.len());
            rows.push(FaceReportRow {
                direction: sig.clone(),
                true_prob: face_mass(model, k),
                empirical_prob: 0.0,
                count: 0,
                z_score: 0.0,
            });
        }
    }
    for p in &batch.points {
        if let Some(&i) = index.get(p.support()) {
            rows[i].count += 1;
        }
    }
    for row in &mut rows {
        row.empirical_prob = row.count as f64 / n as f64;
        let se = (row.true_prob * (1.0 - row.true_prob) / n as f64).sqrt();
        row.z_score = (row.empirical_prob - row.true_prob) / se;
    }
    FaceReport { rows, n }
}

/// One named check with its statistic and decision threshold.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<32} statistic {:>9.4}  threshold {:>9.4}",
            if self.passed { "pass" } else { "FAIL" },
            self.name,
            self.statistic,
            self.threshold
        )
    }
}

#[derive(Clone, Debug)]
pub struct DistributionChecks {
    pub results: Vec<CheckResult>,
}

impl DistributionChecks {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|c| c.passed)
    }
}

impl fmt::Display for DistributionChecks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.results {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Batch too small for the asymptotic critical values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchTooSmall {
    pub n: usize,
    pub min: usize,
}

impl fmt::Display for BatchTooSmall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "batch of {} is below the minimum {}", self.n, self.min)
    }
}

/// Runs the distributional identity checks on a batch:
/// face frequencies within 4 standard errors, `max(Y)` against `Exp(1)`
/// by KS, `P[Y_j > 0]` against `1/ell(1)` per coordinate, and the pooled
/// acceptance rate against `ell(1)/d`.
pub fn distribution_checks(
    model: &MixtureModel,
    batch: &SampleBatch,
) -> Result<DistributionChecks, BatchTooSmall> {
    let n = batch.points.len();
    if n < MIN_BATCH {
        return Err(BatchTooSmall { n, min: MIN_BATCH });
    }
    let nf = n as f64;
    let mut results = Vec::new();

    let report = face_report(model, batch);
    for row in &report.rows {
        results.push(CheckResult {
            name: format!("face {} frequency", row.direction),
            statistic: row.z_score.abs(),
            threshold: FREQUENCY_SE_BAND,
            passed: row.z_score.abs() <= FREQUENCY_SE_BAND,
        });
    }

    let maxima: Vec<f64> = batch.points.iter().map(|p| p.max_value()).collect();
    let d_stat = ks_statistic_exp1(&maxima);
    let d_crit = ks_one_sample_critical(n);
    results.push(CheckResult {
        name: String::from("max(Y) ~ Exp(1) KS"),
        statistic: d_stat,
        threshold: d_crit,
        passed: d_stat <= d_crit,
    });

    let p_exceed = 1.0 / model.ell_one();
    let z_crit = z_critical();
    for j in 0..model.d() {
        let count = batch.points.iter().filter(|p| p.get(j) > 0.0).count() as f64;
        let se = (p_exceed * (1.0 - p_exceed) / nf).sqrt();
        let z = (count / nf - p_exceed) / se;
        results.push(CheckResult {
            name: format!("P[Y_{} > 0] = 1/ell(1)", j + 1),
            statistic: z.abs(),
            threshold: z_crit,
            passed: z.abs() <= z_crit,
        });
    }

    if batch.stats.proposals > 0 {
        let p_accept = model.ell_one() / model.d() as f64;
        let trials = batch.stats.proposals as f64;
        let rate = batch.stats.acceptances as f64 / trials;
        let se = (p_accept * (1.0 - p_accept) / trials).sqrt();
        let z = (rate - p_accept) / se;
        results.push(CheckResult {
            name: String::from("acceptance rate = ell(1)/d"),
            statistic: z.abs(),
            threshold: FREQUENCY_SE_BAND,
            passed: z.abs() <= FREQUENCY_SE_BAND,
        });
    }

    Ok(DistributionChecks { results })
}

/// One grid point of the Monte-Carlo stdf comparison.
#[derive(Clone, Debug)]
pub struct McStdfRow {
    pub y: Vec<f64>,
    pub stdf: f64,
    pub mc_mean: f64,
    pub std_error: f64,
    pub z: f64,
}

#[derive(Clone, Debug)]
pub struct McStdfCheck {
    pub rows: Vec<McStdfRow>,
}

impl McStdfCheck {
    pub fn max_abs_z(&self) -> f64 {
        self.rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max)
    }
}

/// Compares `mixture_stdf` against the empirical mean of
/// `max_j(y_j e^{U_j})` under the mixture generator, on a grid of
/// nonnegative arguments.
pub fn mc_stdf_check(
    model: &MixtureModel,
    y_grid: &[Vec<f64>],
    n_draws: u64,
    seed: u64,
) -> Result<McStdfCheck, EvalError> {
    let table = ProposalTable::new(model).map_err(|e: LinalgError| EvalError::Linalg(e))?;
    let mut rng = substream(seed, 0);
    let g = y_grid.len();
    let mut sums = alloc::vec![0.0f64; g];
    let mut sumsq = alloc::vec![0.0f64; g];
    for _ in 0..n_draws {
        let (k, u) = table.sample_mixture_u(&mut rng);
        let members = model.signatures()[k].members();
        for (gi, y) in y_grid.iter().enumerate() {
            let v = members
                .iter()
                .zip(&u)
                .map(|(&j, &uj)| y[j] * uj.exp())
                .fold(0.0f64, f64::max);
            sums[gi] += v;
            sumsq[gi] += v * v;
        }
    }
    let nf = n_draws as f64;
    let mut rows = Vec::with_capacity(g);
    for (gi, y) in y_grid.iter().enumerate() {
        let mean = sums[gi] / nf;
        let var = (sumsq[gi] / nf - mean * mean).max(0.0);
        let se = (var / nf).sqrt();
        let stdf = mixture_stdf(model, y)?;
        let z = if se > 0.0 { (mean - stdf) / se } else { 0.0 };
        rows.push(McStdfRow { y: y.clone(), stdf, mc_mean: mean, std_error: se, z });
    }
    Ok(McStdfCheck { rows })
}
