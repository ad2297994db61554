//! Monte Carlo check of the Cramér–Rao bound on Θ.
//!
//! Bob measures his reduced state `n_shots` times, estimates Θ by maximum
//! likelihood, and the spread over many replicas is compared with `1/(N H)`.
//! Replica `k` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `k`,
//! so results do not depend on thread count or scheduling.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::metrology::fisher::{gaussian_qfi, CentralMatrixMode};
use crate::metrology::qfi::qfi_closed_form_appendix;
use crate::metrology::{SchemeKind, SchemeSpec};

pub const MIN_REPLICAS: usize = 100;
/// Golden-section tolerance on Θ.
pub const MLE_TOL: f64 = 1e-10;
pub const THETA_MIN: f64 = 1e-3;
const PRESCAN_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measurement {
    /// Outcome `~ N(⟨X⟩, (Σ + 1)/2)` over all probe quadratures.
    #[default]
    Heterodyne,
    /// First quadrature of each probe mode, `~ N(⟨X₁⟩, Σ₁₁/2)`.
    HomodyneX,
    /// Second quadrature of each probe mode.
    HomodyneP,
}

impl Measurement {
    pub fn name(self) -> &'static str {
        match self {
            Measurement::Heterodyne => "heterodyne",
            Measurement::HomodyneX => "homodyne_x",
            Measurement::HomodyneP => "homodyne_p",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub scheme: SchemeSpec,
    pub true_theta: f64,
    pub n_shots: usize,
    pub seed: u64,
    #[serde(default)]
    pub measurement: Measurement,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        self.scheme.validate()?;
        check_finite("true_theta", self.true_theta)?;
        if !(self.true_theta > 0.0 && self.true_theta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "true_theta",
                value: self.true_theta,
                reason: "must lie in (0, 1]",
            });
        }
        if self.n_shots == 0 {
            return Err(Error::InvalidParameter {
                name: "n_shots",
                value: 0.0,
                reason: "at least one shot is needed",
            });
        }
        Ok(())
    }
}

/// Mean and covariance of one measurement outcome on Bob's state at `theta`.
pub fn outcome_model(scheme: &SchemeSpec, measurement: Measurement, theta: f64) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let state = scheme.output_state_at_theta(theta)?;
    Ok(project(measurement, state.first_moments(), state.covariance(), true))
}

fn quadrature_indices(measurement: Measurement, dim: usize) -> Vec<usize> {
    match measurement {
        Measurement::Heterodyne => (0..dim).collect(),
        Measurement::HomodyneX => (0..dim).step_by(2).collect(),
        Measurement::HomodyneP => (1..dim).step_by(2).collect(),
    }
}

/// Restrict to measured quadratures; `add_noise` adds the heterodyne vacuum term.
fn project(measurement: Measurement, x: &DVector<f64>, cov: &DMatrix<f64>, add_noise: bool) -> (DVector<f64>, DMatrix<f64>) {
    let idx = quadrature_indices(measurement, x.len());
    let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| x[i]));
    let mut c = DMatrix::from_fn(idx.len(), idx.len(), |i, j| cov[(idx[i], idx[j])]);
    if add_noise && measurement == Measurement::Heterodyne {
        c += DMatrix::identity(idx.len(), idx.len());
    }
    (mean, c * 0.5)
}

pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

fn draw(mean: &DVector<f64>, chol: &DMatrix<f64>, n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let d = mean.len();
    let mut out = DMatrix::zeros(n, d);
    let mut z = DVector::zeros(d);
    for row in 0..n {
        for v in z.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let y = mean + chol * &z;
        out.row_mut(row).copy_from(&y.transpose());
    }
    out
}

fn cholesky(c: DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(c).ok_or_else(|| Error::Numerical("outcome covariance is not positive definite".into()))
}

fn sample_with_rng(config: &TrialConfig, rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>> {
    let (mean, cov) = outcome_model(&config.scheme, config.measurement, config.true_theta)?;
    let l = cholesky(cov)?.l();
    Ok(draw(&mean, &l, config.n_shots, rng))
}

/// `n_shots × d` matrix of outcomes, one row per shot; replica 0 of `config.seed`.
pub fn sample_measurements(config: &TrialConfig) -> Result<DMatrix<f64>> {
    config.validate()?;
    sample_with_rng(config, &mut replica_rng(config.seed, 0))
}

/// Sample mean and scatter matrix: the sufficient statistics of a Gaussian sample.
struct Stats {
    n: f64,
    mean: DVector<f64>,
    scatter: DMatrix<f64>,
}

impl Stats {
    fn new(samples: &DMatrix<f64>) -> Self {
        let n = samples.nrows();
        let mean = samples.row_mean().transpose();
        let mut scatter = DMatrix::zeros(samples.ncols(), samples.ncols());
        for r in samples.row_iter() {
            let d = r.transpose() - &mean;
            scatter += &d * d.transpose();
        }
        Self {
            n: n as f64,
            mean,
            scatter,
        }
    }
}

fn log_likelihood(stats: &Stats, scheme: &SchemeSpec, measurement: Measurement, theta: f64) -> Result<f64> {
    let (mu, c) = outcome_model(scheme, measurement, theta)?;
    let chol = cholesky(c)?;
    let log_det: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let inv = chol.inverse();
    let d = &stats.mean - mu;
    let quad = (&inv * &stats.scatter).trace() + stats.n * (d.transpose() * &inv * d)[(0, 0)];
    Ok(-0.5 * quad - 0.5 * stats.n * log_det)
}

/// Maximum-likelihood Θ on `[1e-3, 1]`.
///
/// A coarse grid locates the peak and guards against flat or multimodal
/// likelihoods; golden-section search then refines it to `1e-10`.
pub fn mle_theta(samples: &DMatrix<f64>, scheme: &SchemeSpec, measurement: Measurement) -> Result<f64> {
    let stats = Stats::new(samples);
    let ll = |t: f64| log_likelihood(&stats, scheme, measurement, t);
    let grid: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|i| THETA_MIN + (1.0 - THETA_MIN) * i as f64 / (PRESCAN_POINTS - 1) as f64)
        .collect();
    let vals = grid.iter().map(|&t| ll(t)).collect::<Result<Vec<f64>>>()?;
    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Err(Error::NotIdentifiable);
    }
    let last = vals.len() - 1;
    let peaks: Vec<usize> = (0..vals.len())
        .filter(|&i| {
            let left = i == 0 || vals[i] > vals[i - 1];
            let right = i == last || vals[i] >= vals[i + 1];
            left && right
        })
        .collect();
    if peaks.len() > 1 {
        return Err(Error::Multimodal {
            peaks: peaks.len(),
            locations: peaks.iter().map(|&i| grid[i]).collect(),
        });
    }
    let k = peaks[0];
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(last)]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (ll(c)?, ll(d)?);
    while b - a > MLE_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = ll(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = ll(d)?;
        }
    }
    let est = 0.5 * (a + b);
    Ok(if k == last && 1.0 - est <= 2.0 * MLE_TOL { 1.0 } else { est })
}

/// Classical Fisher information per shot of the chosen Gaussian measurement.
pub fn measurement_fisher_information(scheme: &SchemeSpec, measurement: Measurement, theta: f64) -> Result<f64> {
    let n = scheme.kind.probe_modes();
    let (dx, dcov) = scheme.output_derivative(&vec![theta; n], &vec![1.0; n])?;
    let (_, c) = outcome_model(scheme, measurement, theta)?;
    let (dmu, dc) = project(measurement, &dx, &dcov, false);
    let inv = cholesky(c)?.inverse();
    let m = &inv * &dc;
    Ok((dmu.transpose() * &inv * &dmu)[(0, 0)] + 0.5 * (&m * &m).trace())
}

/// Quantum Fisher information of Bob's state with respect to Θ.
pub fn quantum_fisher_information(scheme: &SchemeSpec, theta: f64) -> Result<f64> {
    let n = scheme.kind.probe_modes();
    let o = vec![theta; n];
    let (dx, dcov) = scheme.output_derivative(&o, &vec![1.0; n])?;
    gaussian_qfi(&scheme.output_state(&o)?, &dx, &dcov, CentralMatrixMode::Inverse)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub scheme: SchemeKind,
    pub measurement: Measurement,
    pub theta_true: f64,
    /// Mean of the replica estimates.
    pub estimate: f64,
    pub bias: f64,
    pub empirical_variance: f64,
    /// Standard error of `empirical_variance`, `var √(2/(R - 1))`.
    pub variance_std_error: f64,
    /// `1/(N H)` with the quantum Fisher information of Bob's state.
    pub crb_variance: f64,
    /// `1/(N F)` with the Fisher information of the simulated measurement.
    pub classical_crb_variance: f64,
    /// `1/(N H)` with the closed-form appendix `H`, squeezed pure probes only.
    pub appendix_crb_variance: Option<f64>,
    pub n_shots: usize,
    pub replicas: usize,
    pub seed: u64,
    pub passed: bool,
    pub violation: Option<String>,
}

impl TrialResult {
    pub const CSV_HEADER: &'static str = "scheme,theta_true,N,replicas,var_emp,var_crb_quantum,ratio,seed";

    /// `var_emp / var_crb_quantum`.
    pub fn ratio(&self) -> f64 {
        self.empirical_variance / self.crb_variance
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e},{},{}",
            self.scheme.name(),
            self.theta_true,
            self.n_shots,
            self.replicas,
            self.empirical_variance,
            self.crb_variance,
            self.ratio(),
            self.seed
        )
    }
}

/// Estimate Θ in `replicas` independent experiments and compare the spread with `1/(N H)`.
pub fn crb_validation_report(config: &TrialConfig, replicas: usize) -> Result<TrialResult> {
    config.validate()?;
    if replicas < MIN_REPLICAS {
        return Err(Error::InvalidParameter {
            name: "replicas",
            value: replicas as f64,
            reason: "at least 100 replicas are required",
        });
    }
    let (mean, cov) = outcome_model(&config.scheme, config.measurement, config.true_theta)?;
    let l = cholesky(cov)?.l();
    let estimates = (0..replicas as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = replica_rng(config.seed, k);
            let samples = draw(&mean, &l, config.n_shots, &mut rng);
            mle_theta(&samples, &config.scheme, config.measurement)
        })
        .collect::<Result<Vec<f64>>>()?;
    let r = replicas as f64;
    let avg = estimates.iter().sum::<f64>() / r;
    let var = estimates.iter().map(|e| (e - avg).powi(2)).sum::<f64>() / (r - 1.0);
    let std_err = var * (2.0 / (r - 1.0)).sqrt();
    let n = config.n_shots as f64;
    let theta = config.true_theta;
    let crb = 1.0 / (n * quantum_fisher_information(&config.scheme, theta)?);
    let classical = 1.0 / (n * measurement_fisher_information(&config.scheme, config.measurement, theta)?);
    let s = &config.scheme;
    let appendix = (s.kind == SchemeKind::SingleModeSqueezed && s.mu_a == 1.0 && s.mu_b == 1.0 && theta < 1.0)
        .then(|| qfi_closed_form_appendix(theta, 1.0, s.r).ok())
        .flatten()
        .filter(|h| *h > 0.0)
        .map(|h| 1.0 / (n * h));
    let passed = var + 3.0 * std_err >= crb;
    let violation = (!passed).then(|| {
        format!("empirical variance {var:e} (± {std_err:e}) is below the quantum bound {crb:e} by more than 3 sigma")
    });
    Ok(TrialResult {
        scheme: s.kind,
        measurement: config.measurement,
        theta_true: theta,
        estimate: avg,
        bias: avg - theta,
        empirical_variance: var,
        variance_std_error: std_err,
        crb_variance: crb,
        classical_crb_variance: classical,
        appendix_crb_variance: appendix,
        n_shots: config.n_shots,
        replicas,
        seed: config.seed,
        passed,
        violation,
    })
}
