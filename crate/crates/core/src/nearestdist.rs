//! Distribution of the slant distance r = √(h² + L²) from a ground user to its
//! nearest platform, where h is the horizontal distance to the nearest point
//! of a Matérn type-II process and L the platform altitude.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{check, Error, Result};
use crate::pointprocess::{retention_factor, sample_mhcp_nearest_distance, MhcpParams, Point};
use crate::specfun::{integrate, QuadratureSpec};

/// Consecutive empty realizations tolerated by [`sample_nearest_distance`].
const MAX_EMPTY_REALIZATIONS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistancePdfParams {
    pub lambda_parent: f64,
    pub lambda_retained: f64,
    pub delta: f64,
    pub altitude: f64,
}

impl DistancePdfParams {
    /// Derives the retained intensity from the parent intensity and δ.
    pub fn new(lambda_parent: f64, delta: f64, altitude: f64) -> Result<Self> {
        let mhcp = MhcpParams::new(lambda_parent, delta)?;
        check("altitude", altitude, altitude > 0.0, "must be > 0")?;
        Ok(Self { lambda_parent, lambda_retained: mhcp.retained_density(), delta, altitude })
    }

    pub fn from_mhcp(mhcp: &MhcpParams, altitude: f64) -> Result<Self> {
        Self::new(mhcp.lambda_parent, mhcp.delta, altitude)
    }

    pub fn mhcp(&self) -> MhcpParams {
        MhcpParams { lambda_parent: self.lambda_parent, delta: self.delta }
    }
}

/// Overlap area of two disks of radius δ whose centres are `x` apart.
///
/// Zero beyond 2δ; at x = 0 it is the full disk area πδ².
pub fn lens_area(x: f64, delta: f64) -> f64 {
    if x > 2.0 * delta {
        return 0.0;
    }
    let c = (x / (2.0 * delta)).min(1.0);
    2.0 * delta * delta * c.acos() - 0.5 * x * (4.0 * delta * delta - x * x).max(0.0).sqrt()
}

/// Probability that a parent at horizontal distance `u` survives thinning,
/// (1 − e^{−z})/z with z = λ_P(πδ² − g(u, δ)).
fn retention_kernel(u: f64, lambda_parent: f64, delta: f64) -> f64 {
    let uncovered = (PI * delta * delta - lens_area(u, delta)).max(0.0);
    retention_factor(lambda_parent * uncovered)
}

/// Nearest-platform slant-distance density derived from the MHCP retention
/// kernel. Zero below the altitude.
///
/// The exponent ∫_L^r 2πyλ_P k(√(y²−L²)) dy is evaluated in the horizontal
/// variable u = √(y²−L²); beyond u = 2δ the kernel is the constant τ and that
/// part is integrated in closed form.
pub fn pdf_exact(r: f64, params: &DistancePdfParams, quad: &QuadratureSpec) -> Result<f64> {
    let alt = params.altitude;
    if r < alt {
        return Ok(0.0);
    }
    let (lp, delta) = (params.lambda_parent, params.delta);
    let h = ((r - alt) * (r + alt)).sqrt();
    let knee = h.min(2.0 * delta);
    let near = integrate(|u| 2.0 * PI * u * lp * retention_kernel(u, lp, delta), 0.0, knee, quad)?;
    let far = if h > 2.0 * delta {
        PI * params.lambda_retained * (h * h - 4.0 * delta * delta)
    } else {
        0.0
    };
    Ok(2.0 * PI * lp * r * retention_kernel(h, lp, delta) * (-(near + far)).exp())
}

/// Rayleigh-type approximation 2λ_Bπr·exp(−λ_Bπ(r² − L²)), zero below L.
pub fn pdf_approx(r: f64, lambda_retained: f64, altitude: f64) -> f64 {
    if r < altitude {
        return 0.0;
    }
    2.0 * lambda_retained * PI * r * (-lambda_retained * PI * (r - altitude) * (r + altitude)).exp()
}

/// CDF of [`pdf_approx`].
pub fn cdf_approx(r: f64, lambda_retained: f64, altitude: f64) -> f64 {
    if r < altitude {
        return 0.0;
    }
    -(-lambda_retained * PI * (r - altitude) * (r + altitude)).exp_m1()
}

/// Upper end of the figure grid, L + 5/√(λ_Bπ).
pub fn grid_upper(lambda_retained: f64, altitude: f64) -> f64 {
    altitude + 5.0 / (lambda_retained * PI).sqrt()
}

/// `n` uniform points on [L, L + 5/√(λ_Bπ)].
pub fn evaluation_grid(lambda_retained: f64, altitude: f64, n: usize) -> Vec<f64> {
    let hi = grid_upper(lambda_retained, altitude);
    match n {
        0 => Vec::new(),
        1 => vec![altitude],
        _ => (0..n).map(|i| altitude + (hi - altitude) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearestDistanceSample {
    /// Slant distance to the nearest platform.
    pub distance: f64,
    /// Realizations discarded because they held no platform.
    pub empty_realizations: u64,
}

/// Draws one platform realization on the disk and returns the slant distance
/// from the origin to its nearest platform. Empty realizations are redrawn
/// from the same generator and counted.
pub fn sample_nearest_distance<R: Rng + ?Sized>(
    params: &DistancePdfParams,
    region_radius: f64,
    rng: &mut R,
) -> Result<NearestDistanceSample> {
    let mhcp = params.mhcp();
    for empty in 0..MAX_EMPTY_REALIZATIONS {
        if let Some(h) = sample_mhcp_nearest_distance(&mhcp, region_radius, &Point::ORIGIN, rng)? {
            return Ok(NearestDistanceSample { distance: h.hypot(params.altitude), empty_realizations: empty });
        }
    }
    Err(Error::NoCoverage)
}
