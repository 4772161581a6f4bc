//! Seeded, parallel Monte Carlo estimates of the analytical quantities.
//!
//! Replicate `i` of a run draws only from `replicate_rng(base_seed, i)`.
//! Results are gathered in replicate order and reduced sequentially, so an
//! estimate is bit-identical for any worker count.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::assoc::build_link_state;
use crate::channel::{CarrierConfig, EnvironmentProfile};
use crate::error::{check, domain, Result};
use crate::modeselect::{
    a_tilde, avg_dth, decide, dth_instantaneous, ModeDecision, PowerConfig, Scheme, SchemeConfig,
};
use crate::nearestdist::{grid_upper, sample_nearest_distance, DistancePdfParams};
use crate::pointprocess::{sample_mhcp, MhcpParams, Point};
use crate::rng::{replicate_rng, SimRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentConfig {
    pub lambda_parent: f64,
    pub delta: f64,
    pub region_radius: f64,
    pub altitude: f64,
    /// Transmitter intensity. Carried for completeness; each replicate uses a
    /// single transmitter/receiver pair.
    pub lambda_tx: f64,
    pub lambda_rx: f64,
}

impl DeploymentConfig {
    pub fn validate(&self) -> Result<()> {
        self.mhcp().validate()?;
        check("region_radius", self.region_radius, self.region_radius > 0.0, "must be > 0")?;
        check("altitude", self.altitude, self.altitude > 0.0, "must be > 0")?;
        check("lambda_tx", self.lambda_tx, self.lambda_tx >= 0.0, "must be >= 0")?;
        check("lambda_rx", self.lambda_rx, self.lambda_rx >= 0.0, "must be >= 0")
    }

    pub fn mhcp(&self) -> MhcpParams {
        MhcpParams { lambda_parent: self.lambda_parent, delta: self.delta }
    }

    pub fn lambda_retained(&self) -> f64 {
        self.mhcp().retained_density()
    }

    pub fn distance_params(&self) -> Result<DistancePdfParams> {
        DistancePdfParams::new(self.lambda_parent, self.delta, self.altitude)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub deployment: DeploymentConfig,
    pub env: EnvironmentProfile,
    pub carrier: CarrierConfig,
    pub power: PowerConfig,
    pub scheme: Scheme,
    pub association_probability: f64,
    pub n_replicates: u64,
    pub base_seed: u64,
    pub worker_count: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.deployment.validate()?;
        self.env.validate()?;
        self.power.validate()?;
        self.scheme_config().validate()?;
        if self.n_replicates == 0 {
            return Err(domain("n_replicates = 0 (must be >= 1)"));
        }
        if self.worker_count == 0 {
            return Err(domain("worker_count = 0 (must be >= 1)"));
        }
        Ok(())
    }

    pub fn scheme_config(&self) -> SchemeConfig {
        SchemeConfig {
            scheme: self.scheme,
            association_probability: self.association_probability,
            region_radius: self.deployment.region_radius,
            altitude: self.deployment.altitude,
        }
    }

    /// Closed-form d̄_th for this configuration.
    pub fn avg_dth(&self) -> Result<f64> {
        avg_dth(&self.power, self.deployment.lambda_retained(), self.deployment.altitude, &self.env, &self.carrier)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

impl EstimateWithCI {
    /// Sample mean and standard error of the mean.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self { mean, std_error: (var / n).sqrt(), n: xs.len() as u64 }
    }

    /// Proportion with the binomial standard error √(m(1−m)/n).
    pub fn from_successes(successes: u64, n: u64) -> Self {
        let mean = successes as f64 / n as f64;
        Self { mean, std_error: (mean * (1.0 - mean) / n as f64).sqrt(), n }
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

/// Runs `f(i, rng_i)` for every replicate on a pool of `workers` threads and
/// returns the outcomes in replicate order.
pub fn run_replicates<T, F>(n: u64, base_seed: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut SimRng) -> Result<T> + Sync,
{
    if workers == 0 {
        return Err(domain("worker_count = 0 (must be >= 1)"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| domain(format!("worker pool: {e}")))?;
    pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| f(i, &mut replicate_rng(base_seed, i)))
            .collect::<Result<Vec<T>>>()
    })
}

fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    Point::new(r * theta.cos(), r * theta.sin())
}

/// Fraction of replicates in which the configured scheme selects D2D.
///
/// Each replicate samples a platform pattern, puts the transmitter at the
/// centre and the receiver uniformly on the disk, and applies the decision
/// rule with the closed-form d̄_th.
pub fn estimate_p_d2d(config: &ExperimentConfig) -> Result<EstimateWithCI> {
    config.validate()?;
    let d_bar = config.avg_dth()?;
    let dep = config.deployment;
    let mhcp = dep.mhcp();
    let hits = run_replicates(config.n_replicates, config.base_seed, config.worker_count, |_, rng| {
        let platforms = sample_mhcp(&mhcp, dep.region_radius, rng)?;
        let rx = loop {
            let p = uniform_in_disk(dep.region_radius, rng);
            if p != Point::ORIGIN {
                break p;
            }
        };
        let link = build_link_state(
            Point::ORIGIN,
            rx,
            &platforms,
            dep.altitude,
            &config.env,
            &config.carrier,
            &config.power,
            config.association_probability,
            rng,
        )?;
        Ok(decide(config.scheme, &link, d_bar, &config.power) == ModeDecision::D2d)
    })?;
    let successes = hits.iter().filter(|&&h| h).count() as u64;
    Ok(EstimateWithCI::from_successes(successes, config.n_replicates))
}

/// Sample mean of the instantaneous threshold distance with Ã on both links.
///
/// The uplink and downlink distances of one sample come from two independent
/// platform realizations, each measured from the disk centre.
pub fn estimate_avg_dth(config: &ExperimentConfig) -> Result<EstimateWithCI> {
    config.validate()?;
    let dep = config.deployment;
    let params = dep.distance_params()?;
    let a_t = a_tilde(params.lambda_retained, dep.altitude, &config.env, &config.carrier);
    let a_dd = config.carrier.free_space_gain();
    let samples = run_replicates(config.n_replicates, config.base_seed, config.worker_count, |_, rng| {
        let r_ul = sample_nearest_distance(&params, dep.region_radius, rng)?.distance;
        let r_dl = sample_nearest_distance(&params, dep.region_radius, rng)?.distance;
        Ok(dth_instantaneous(r_ul, r_dl, &config.power, a_t, a_t, a_dd, config.env.alpha))
    })?;
    Ok(EstimateWithCI::from_samples(&samples))
}

/// Mean retained intensity of sampled platform patterns on the disk.
pub fn estimate_retained_density(config: &ExperimentConfig) -> Result<EstimateWithCI> {
    config.validate()?;
    let dep = config.deployment;
    let mhcp = dep.mhcp();
    let area = PI * dep.region_radius * dep.region_radius;
    let samples = run_replicates(config.n_replicates, config.base_seed, config.worker_count, |_, rng| {
        Ok(sample_mhcp(&mhcp, dep.region_radius, rng)?.len() as f64 / area)
    })?;
    Ok(EstimateWithCI::from_samples(&samples))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub center: f64,
    pub count: u64,
    /// Count normalized so that Σ density·width = 1.
    pub density: f64,
    /// Binomial standard error of `density`.
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
    pub n_samples: u64,
    /// Platform realizations that were empty and redrawn.
    pub empty_realizations: u64,
}

impl Histogram {
    pub fn width(&self) -> f64 {
        self.bins[0].upper - self.bins[0].lower
    }

    /// Bin holding `r`, if any.
    pub fn bin_of(&self, r: f64) -> Option<&HistogramBin> {
        let first = self.bins.first()?;
        if r < first.lower || r > self.bins.last()?.upper {
            return None;
        }
        let idx = (((r - first.lower) / self.width()) as usize).min(self.bins.len() - 1);
        Some(&self.bins[idx])
    }
}

/// Normalized histogram of `n_replicates` nearest-platform slant distances;
/// see [`distance_histogram`].
pub fn pdf_histogram(config: &ExperimentConfig, n_bins: usize) -> Result<Histogram> {
    config.validate()?;
    distance_histogram(&config.deployment, config.n_replicates, config.base_seed, config.worker_count, n_bins)
}

/// Normalized histogram of `n_samples` nearest-platform slant distances on
/// [L, L + 5/√(λ_Bπ)], widened to the largest draw if one falls beyond.
pub fn distance_histogram(
    deployment: &DeploymentConfig,
    n_samples: u64,
    base_seed: u64,
    workers: usize,
    n_bins: usize,
) -> Result<Histogram> {
    deployment.validate()?;
    if n_samples == 0 {
        return Err(domain("n_samples = 0 (must be >= 1)"));
    }
    if n_bins < 2 {
        return Err(domain(format!("n_bins = {n_bins} (must be >= 2)")));
    }
    let dep = *deployment;
    let params = dep.distance_params()?;
    let draws = run_replicates(n_samples, base_seed, workers, |_, rng| {
        sample_nearest_distance(&params, dep.region_radius, rng)
    })?;
    let lo = dep.altitude;
    let max_draw = draws.iter().map(|s| s.distance).fold(lo, f64::max);
    let hi = grid_upper(params.lambda_retained, lo).max(max_draw);
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for s in &draws {
        let idx = (((s.distance - lo) / width) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let n = draws.len() as f64;
    let bins = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let lower = lo + width * i as f64;
            let p = count as f64 / n;
            HistogramBin {
                lower,
                upper: lower + width,
                center: lower + 0.5 * width,
                count,
                density: p / width,
                stderr: (p * (1.0 - p) / n).sqrt() / width,
            }
        })
        .collect();
    Ok(Histogram {
        bins,
        n_samples: draws.len() as u64,
        empty_realizations: draws.iter().map(|s| s.empty_realizations).sum(),
    })
}
