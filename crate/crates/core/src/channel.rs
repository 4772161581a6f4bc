//! Air-to-ground and device-to-device path-loss models.
//!
//! Received powers are linear: `P · A · distance^(−exponent)`, with the
//! attenuation prefactor `A` folding in the free-space constant and the
//! environment-dependent excess losses.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{check, domain, Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Unit in which the elevation angle enters the LOS sigmoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleUnit {
    #[default]
    Degrees,
    Radians,
}

impl FromStr for AngleUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degrees" | "deg" => Ok(Self::Degrees),
            "radians" | "rad" => Ok(Self::Radians),
            other => Err(domain(format!("unknown angle unit '{other}' (expected degrees or radians)"))),
        }
    }
}

impl fmt::Display for AngleUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Degrees => "degrees",
            Self::Radians => "radians",
        })
    }
}

/// LOS-model constants and path-loss exponent of a propagation environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentProfile {
    pub a: f64,
    pub b: f64,
    pub eta_los_db: f64,
    pub eta_nlos_db: f64,
    /// D2D path-loss exponent.
    pub alpha: f64,
    pub angle_unit: AngleUnit,
}

impl EnvironmentProfile {
    pub fn new(a: f64, b: f64, eta_los_db: f64, eta_nlos_db: f64, alpha: f64) -> Result<Self> {
        let env = Self { a, b, eta_los_db, eta_nlos_db, alpha, angle_unit: AngleUnit::Degrees };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        check("a", self.a, self.a > 0.0, "must be > 0")?;
        check("b", self.b, self.b > 0.0, "must be > 0")?;
        check("eta_los_db", self.eta_los_db, self.eta_los_db >= 0.0, "must be >= 0")?;
        check("eta_nlos_db", self.eta_nlos_db, self.eta_nlos_db >= self.eta_los_db, "must be >= eta_los_db")?;
        check("alpha", self.alpha, self.alpha > 2.0, "must be > 2")
    }

    pub fn with_angle_unit(mut self, unit: AngleUnit) -> Self {
        self.angle_unit = unit;
        self
    }
}

/// Built-in environment classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Environment {
    HighRiseUrban,
    DenseUrban,
    Urban,
    Suburban,
}

impl Environment {
    pub const ALL: [Environment; 4] = [Self::HighRiseUrban, Self::DenseUrban, Self::Urban, Self::Suburban];

    pub fn profile(self) -> EnvironmentProfile {
        let (alpha, a, b, eta_los_db, eta_nlos_db) = match self {
            Self::HighRiseUrban => (3.5, 27.23, 0.08, 2.3, 34.0),
            Self::DenseUrban => (3.1, 12.08, 0.11, 1.6, 23.0),
            Self::Urban => (2.9, 4.88, 0.43, 1.0, 20.0),
            Self::Suburban => (2.7, 4.88, 0.43, 0.1, 21.0),
        };
        EnvironmentProfile { a, b, eta_los_db, eta_nlos_db, alpha, angle_unit: AngleUnit::Degrees }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::HighRiseUrban => "high_rise_urban",
            Self::DenseUrban => "dense_urban",
            Self::Urban => "urban",
            Self::Suburban => "suburban",
        }
    }
}

impl FromStr for Environment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| domain(format!("unknown environment '{s}'")))
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierConfig {
    /// Carrier frequency in Hz.
    pub f_c: f64,
    /// Speed of light in m/s.
    pub c: f64,
}

impl CarrierConfig {
    pub fn new(f_c: f64) -> Result<Self> {
        Self::with_speed_of_light(f_c, SPEED_OF_LIGHT)
    }

    pub fn with_speed_of_light(f_c: f64, c: f64) -> Result<Self> {
        check("f_c", f_c, f_c > 0.0, "must be > 0")?;
        check("c", c, c > 0.0, "must be > 0")?;
        Ok(Self { f_c, c })
    }

    /// (c / 4πf_c)², the free-space gain at unit distance.
    pub fn free_space_gain(&self) -> f64 {
        let k = self.c / (4.0 * PI * self.f_c);
        k * k
    }
}

/// Sigmoid probability that the link from a user at horizontal distance `h`
/// to a platform at altitude `altitude` is line-of-sight.
pub fn los_probability(h: f64, altitude: f64, env: &EnvironmentProfile) -> f64 {
    // atan2 gives the full 90° elevation directly below the platform (h = 0)
    let elevation = altitude.atan2(h);
    let theta = match env.angle_unit {
        AngleUnit::Degrees => elevation.to_degrees(),
        AngleUnit::Radians => elevation,
    };
    1.0 / (1.0 + env.a * (-env.b * (theta - env.a)).exp())
}

/// Mean excess loss in dB, P_LOS·η_LOS + (1 − P_LOS)·η_NLOS.
fn excess_loss_db(h: f64, altitude: f64, env: &EnvironmentProfile) -> f64 {
    let p = los_probability(h, altitude, env);
    p * (env.eta_los_db - env.eta_nlos_db) + env.eta_nlos_db
}

/// Air-to-ground path loss in dB at slant range √(h² + L²).
pub fn atg_pathloss_db(h: f64, altitude: f64, env: &EnvironmentProfile, carrier: &CarrierConfig) -> f64 {
    let r = h.hypot(altitude);
    20.0 * (4.0 * PI * carrier.f_c / carrier.c).log10() + 20.0 * r.log10() + excess_loss_db(h, altitude, env)
}

/// Linear attenuation prefactor A(h, L); the received fraction is A·r⁻².
pub fn atg_attenuation(h: f64, altitude: f64, env: &EnvironmentProfile, carrier: &CarrierConfig) -> f64 {
    carrier.free_space_gain() * 10f64.powf(-excess_loss_db(h, altitude, env) / 10.0)
}

/// D2D attenuation prefactor A_DD; the received fraction is A_DD·d^(−α).
pub fn d2d_attenuation(carrier: &CarrierConfig) -> f64 {
    carrier.free_space_gain()
}

/// Received signal strength `p_tx · attenuation · distance^(−exponent)`.
pub fn rss(p_tx: f64, attenuation: f64, distance: f64, exponent: f64) -> Result<f64> {
    check("p_tx", p_tx, p_tx >= 0.0, "must be >= 0")?;
    check("attenuation", attenuation, attenuation >= 0.0, "must be >= 0")?;
    check("distance", distance, distance > 0.0, "must be > 0")?;
    check("exponent", exponent, exponent > 0.0, "must be > 0")?;
    Ok(p_tx * attenuation * distance.powf(-exponent))
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}
