//! Threshold D2D distances, the TDDS / RSSS mode-selection rules and their
//! D2D-use probabilities.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::channel::{atg_attenuation, dbm_to_watts, CarrierConfig, EnvironmentProfile};
use crate::error::{check, domain, Error, Result};
use crate::specfun::upper_incomplete_gamma_scaled;

/// Transmit powers and the D2D RSS threshold, all in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    pub p_dd: f64,
    pub p_ul: f64,
    pub p_dl: f64,
    pub rss_threshold: f64,
}

impl PowerConfig {
    pub fn new(p_dd: f64, p_ul: f64, p_dl: f64, rss_threshold: f64) -> Result<Self> {
        let cfg = Self { p_dd, p_ul, p_dl, rss_threshold };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_dbm(p_dd_dbm: f64, p_ul_dbm: f64, p_dl_dbm: f64, rss_threshold_dbm: f64) -> Result<Self> {
        Self::new(
            dbm_to_watts(p_dd_dbm),
            dbm_to_watts(p_ul_dbm),
            dbm_to_watts(p_dl_dbm),
            dbm_to_watts(rss_threshold_dbm),
        )
    }

    pub fn validate(&self) -> Result<()> {
        check("p_dd", self.p_dd, self.p_dd > 0.0, "must be > 0")?;
        check("p_ul", self.p_ul, self.p_ul > 0.0, "must be > 0")?;
        check("p_dl", self.p_dl, self.p_dl > 0.0, "must be > 0")?;
        check("rss_threshold", self.rss_threshold, self.rss_threshold > 0.0, "must be > 0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Threshold-D2D-distance based selection.
    Tdds,
    /// Received-signal-strength based selection.
    Rsss,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::Tdds => "TDDS",
            Self::Rsss => "RSSS",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TDDS" => Ok(Self::Tdds),
            "RSSS" => Ok(Self::Rsss),
            _ => Err(domain(format!("unknown scheme '{s}' (expected TDDS or RSSS)"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    /// Probability that the transmitter is associated with a platform.
    pub association_probability: f64,
    pub region_radius: f64,
    pub altitude: f64,
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        let p = self.association_probability;
        check("association_probability", p, (0.0..=1.0).contains(&p), "must lie in [0, 1]")?;
        check("region_radius", self.region_radius, self.region_radius > 0.0, "must be > 0")?;
        check("altitude", self.altitude, self.altitude > 0.0, "must be > 0")
    }
}

/// Geometry and association state of one transmitter/receiver pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    /// Transmitter-receiver distance.
    pub d: f64,
    /// Slant distance from the transmitter to its nearest platform.
    pub r_ul: Option<f64>,
    /// Slant distance from the receiver to its nearest platform.
    pub r_dl: Option<f64>,
    pub tx_associated: bool,
    /// D2D received signal strength in watts.
    pub rss_dd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeDecision {
    D2d,
    Standard,
    NoService,
}

/// Distance at which the D2D RSS drops to the threshold,
/// (P_DD·A_DD / RSS_th)^(1/α).
pub fn r_bar_th(power: &PowerConfig, a_dd: f64, alpha: f64) -> f64 {
    (power.p_dd * a_dd / power.rss_threshold).powf(1.0 / alpha)
}

/// Instantaneous threshold D2D distance: the distance at which the D2D RSS
/// equals the weaker of the uplink and downlink RSS.
pub fn dth_instantaneous(
    r_ul: f64,
    r_dl: f64,
    power: &PowerConfig,
    a_ul: f64,
    a_dl: f64,
    a_dd: f64,
    alpha: f64,
) -> f64 {
    let ul = power.p_ul * a_ul / (r_ul * r_ul);
    let dl = power.p_dl * a_dl / (r_dl * r_dl);
    if dl >= ul {
        (power.p_dd * a_dd / (power.p_ul * a_ul)).powf(1.0 / alpha) * r_ul.powf(2.0 / alpha)
    } else {
        (power.p_dd * a_dd / (power.p_dl * a_dl)).powf(1.0 / alpha) * r_dl.powf(2.0 / alpha)
    }
}

/// Horizontal distance substituted for h in the averaged attenuation,
/// 1/(2√λ_B).
pub fn mean_horizontal_distance(lambda_retained: f64) -> f64 {
    0.5 / lambda_retained.sqrt()
}

/// Air-to-ground attenuation at the mean horizontal distance, Ã.
pub fn a_tilde(lambda_retained: f64, altitude: f64, env: &EnvironmentProfile, carrier: &CarrierConfig) -> f64 {
    atg_attenuation(mean_horizontal_distance(lambda_retained), altitude, env, carrier)
}

/// Closed-form average threshold D2D distance d̄_th(L).
///
/// 2·[P_DD·A_DD/(πλ_B·P_UL·Ã)]^{1/α} · [e^{x}Γ(s, x) − e^{2x}·q^s·Γ(s, x/q)]
/// with s = (α+1)/α, x = λ_BπL² and q = P_UL/(P_UL + P_DL). The exponentials
/// are folded into scaled incomplete gamma values so large altitudes do not
/// overflow.
pub fn avg_dth(
    power: &PowerConfig,
    lambda_retained: f64,
    altitude: f64,
    env: &EnvironmentProfile,
    carrier: &CarrierConfig,
) -> Result<f64> {
    power.validate()?;
    env.validate()?;
    check("lambda_retained", lambda_retained, lambda_retained > 0.0, "must be > 0")?;
    check("altitude", altitude, altitude > 0.0, "must be > 0")?;
    let alpha = env.alpha;
    let a_dd = carrier.free_space_gain();
    let a_t = a_tilde(lambda_retained, altitude, env, carrier);
    let s = (alpha + 1.0) / alpha;
    let x0 = lambda_retained * PI * altitude * altitude;
    let q = power.p_ul / (power.p_ul + power.p_dl);
    let x1 = x0 / q;
    let first = upper_incomplete_gamma_scaled(s, x0)?;
    let second = (2.0 * x0 - x1).exp() * q.powf(s) * upper_incomplete_gamma_scaled(s, x1)?;
    let lead = (power.p_dd * a_dd / (PI * lambda_retained * power.p_ul * a_t)).powf(1.0 / alpha);
    Ok(2.0 * lead * (first - second))
}

/// TDDS: D2D within d̄_th; otherwise the standard mode when the transmitter
/// is associated, else D2D if the D2D RSS clears the threshold.
pub fn tdds_decide(link: &LinkState, d_bar_th: f64, power: &PowerConfig) -> ModeDecision {
    if link.d <= d_bar_th {
        ModeDecision::D2d
    } else if link.tx_associated {
        ModeDecision::Standard
    } else if link.rss_dd >= power.rss_threshold {
        ModeDecision::D2d
    } else {
        ModeDecision::NoService
    }
}

/// RSSS: D2D whenever the D2D RSS clears the threshold; otherwise the
/// standard mode for an associated transmitter beyond d̄_th.
pub fn rsss_decide(link: &LinkState, d_bar_th: f64, power: &PowerConfig) -> ModeDecision {
    if link.rss_dd >= power.rss_threshold {
        ModeDecision::D2d
    } else if link.d > d_bar_th && link.tx_associated {
        ModeDecision::Standard
    } else {
        ModeDecision::NoService
    }
}

pub fn decide(scheme: Scheme, link: &LinkState, d_bar_th: f64, power: &PowerConfig) -> ModeDecision {
    match scheme {
        Scheme::Tdds => tdds_decide(link, d_bar_th, power),
        Scheme::Rsss => rsss_decide(link, d_bar_th, power),
    }
}

/// Which branch of the piecewise TDDS probability applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TddsCase {
    /// d̄_th ≤ r̄_th ≤ R
    ThresholdInside,
    /// d̄_th ≤ R < r̄_th
    ThresholdBeyondRegion,
    /// r̄_th ≤ d̄_th ≤ R
    DistanceDominates,
    /// d̄_th > R
    Saturated,
}

pub fn tdds_case(d_bar_th: f64, r_bar_th: f64, region_radius: f64) -> TddsCase {
    let (d, r, big_r) = (d_bar_th, r_bar_th, region_radius);
    if d <= r && r <= big_r {
        TddsCase::ThresholdInside
    } else if d <= big_r && big_r < r {
        TddsCase::ThresholdBeyondRegion
    } else if r <= d && d <= big_r {
        TddsCase::DistanceDominates
    } else {
        TddsCase::Saturated
    }
}

/// Probability that a pair with the receiver uniform on the disk uses D2D
/// under TDDS.
pub fn p_d2d_tdds(d_bar_th: f64, scheme: &SchemeConfig, power: &PowerConfig, a_dd: f64, alpha: f64) -> f64 {
    let r_bar = r_bar_th(power, a_dd, alpha);
    let big_r2 = scheme.region_radius * scheme.region_radius;
    let d2 = d_bar_th * d_bar_th;
    let unassoc = 1.0 - scheme.association_probability;
    let p = match tdds_case(d_bar_th, r_bar, scheme.region_radius) {
        TddsCase::ThresholdInside => d2 / big_r2 + (r_bar * r_bar - d2) * unassoc / big_r2,
        TddsCase::ThresholdBeyondRegion => d2 / big_r2 + (1.0 - d2 / big_r2) * unassoc,
        TddsCase::DistanceDominates => d2 / big_r2,
        TddsCase::Saturated => 1.0,
    };
    p.clamp(0.0, 1.0)
}

/// Probability that a pair with the receiver uniform on the disk uses D2D
/// under RSSS: r̄_th²/R² when r̄_th ≤ R, else 1.
pub fn p_d2d_rsss(scheme: &SchemeConfig, power: &PowerConfig, a_dd: f64, alpha: f64) -> f64 {
    let r_bar = r_bar_th(power, a_dd, alpha);
    let p = if r_bar <= scheme.region_radius {
        (r_bar / scheme.region_radius).powi(2)
    } else {
        1.0
    };
    p.clamp(0.0, 1.0)
}

/// D2D-use probability of the configured scheme. RSSS ignores `d_bar_th`.
pub fn p_d2d(d_bar_th: f64, scheme: &SchemeConfig, power: &PowerConfig, a_dd: f64, alpha: f64) -> f64 {
    match scheme.scheme {
        Scheme::Tdds => p_d2d_tdds(d_bar_th, scheme, power, a_dd, alpha),
        Scheme::Rsss => p_d2d_rsss(scheme, power, a_dd, alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Environment;
    use crate::nearestdist::pdf_approx;
    use crate::rng::rng_from_seed;
    use crate::specfun::{integrate, integrate_to_infinity, QuadratureSpec};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn unit_power() -> PowerConfig {
        PowerConfig::new(1.0, 1.0, 1.0, 1e-12).unwrap()
    }

    fn scheme(p: f64, big_r: f64) -> SchemeConfig {
        SchemeConfig { scheme: Scheme::Tdds, association_probability: p, region_radius: big_r, altitude: 100.0 }
    }

    /// Power config whose r̄_th equals `r_bar` for A_DD = 1, α = 2.
    fn power_for_r_bar(r_bar: f64) -> PowerConfig {
        PowerConfig::new(1.0, 1.0, 1.0, 1.0 / (r_bar * r_bar)).unwrap()
    }

    // Direct two-dimensional quadrature of the averaged threshold distance with
    // the approximate distance density and Ã for both links.
    pub(crate) fn avg_dth_oracle(
        power: &PowerConfig,
        lb: f64,
        alt: f64,
        env: &EnvironmentProfile,
        carrier: &CarrierConfig,
    ) -> f64 {
        let q = QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-11, max_subdivisions: 4000 };
        let alpha = env.alpha;
        let a_dd = carrier.free_space_gain();
        let a_t = a_tilde(lb, alt, env, carrier);
        let f = |r: f64| pdf_approx(r, lb, alt);
        let width = (1.0 / (lb * PI).sqrt()).min(1.0 / (lb * PI * alt));
        let part = |p_self: f64, p_other: f64| {
            let ratio = (p_other / p_self).sqrt();
            let coef = (power.p_dd * a_dd / (p_self * a_t)).powf(1.0 / alpha);
            integrate_to_infinity(
                |r| {
                    let upper = (ratio * r).max(alt);
                    let inner = integrate(f, alt, upper, &q).unwrap();
                    coef * r.powf(2.0 / alpha) * f(r) * inner
                },
                alt,
                width,
                &q,
            )
            .unwrap()
        };
        part(power.p_ul, power.p_dl) + part(power.p_dl, power.p_ul)
    }

    #[test]
    fn r_bar_examples() {
        let p = PowerConfig::new(2.0, 1.0, 1.0, 2.0 * 0.5).unwrap();
        assert_relative_eq!(r_bar_th(&p, 0.5, 3.5), 1.0, max_relative = 1e-15);
        let v = r_bar_th(&unit_power(), 9.1189e-5, 3.5);
        assert_relative_eq!(v, (9.1189e7f64).powf(1.0 / 3.5), max_relative = 1e-14);
        assert!((v - 188.1).abs() < 0.1, "{v}");
        let stricter = PowerConfig { rss_threshold: 2e-12, ..unit_power() };
        assert!(r_bar_th(&stricter, 9.1189e-5, 3.5) < v);
    }

    #[test]
    fn dth_examples() {
        let p = unit_power();
        // equal link strengths: both branches coincide
        let a = dth_instantaneous(200.0, 200.0, &p, 1e-4, 1e-4, 1e-3, 3.5);
        let ul_branch = (1e-3f64 / 1e-4).powf(1.0 / 3.5) * 200f64.powf(2.0 / 3.5);
        assert_relative_eq!(a, ul_branch, max_relative = 1e-14);

        // identical D2D and UL models at α = 2 give back the UL distance
        assert_relative_eq!(dth_instantaneous(200.0, 150.0, &p, 1e-4, 1e-4, 1e-4, 2.0), 200.0, max_relative = 1e-14);

        let v = dth_instantaneous(300.0, 100.0, &p, 1.0, 1.0, 10.0, 3.5);
        assert_relative_eq!(v, 10f64.powf(1.0 / 3.5) * 300f64.powf(2.0 / 3.5), max_relative = 1e-14);
        // independent route: bisection on P_DD·A_DD·d^{−α} = min(RSS_UL, RSS_DL)
        let target = (1.0f64 / 300.0f64.powi(2)).min(1.0 / 100.0f64.powi(2));
        let (mut lo, mut hi) = (1e-3, 1e4);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 10.0 * f64::powf(mid, -3.5) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_relative_eq!(v, lo, max_relative = 1e-12);
        assert!((v - 50.26).abs() < 0.01);
    }

    #[test]
    fn a_tilde_examples() {
        let env = Environment::HighRiseUrban.profile();
        let c = CarrierConfig::new(2.5e9).unwrap();
        assert_eq!(mean_horizontal_distance(1e-4), 50.0);
        assert_eq!(a_tilde(1e-4, 300.0, &env, &c), atg_attenuation(50.0, 300.0, &env, &c));
        assert!((mean_horizontal_distance(1.48495e-5) - 129.75).abs() < 0.01);
        let v = a_tilde(1.48495e-5, 300.0, &env, &c);
        let lo = atg_attenuation(1e12, 300.0, &env, &c);
        let hi = atg_attenuation(0.0, 300.0, &env, &c);
        assert!(lo < v && v < hi);
    }

    #[test]
    fn closed_form_matches_quadrature_oracle() {
        let env = Environment::HighRiseUrban.profile();
        let c = CarrierConfig::new(2.5e9).unwrap();
        let p = PowerConfig::from_dbm(20.0, 20.0, 20.0, -90.0).unwrap();
        for &alt in &[100.0, 500.0] {
            let closed = avg_dth(&p, 1e-4, alt, &env, &c).unwrap();
            let oracle = avg_dth_oracle(&p, 1e-4, alt, &env, &c);
            assert_relative_eq!(closed, oracle, max_relative = 1e-6);
        }
    }

    #[test]
    fn symmetric_bracket_reduction() {
        use crate::specfun::upper_incomplete_gamma;
        let env = Environment::Urban.profile();
        let c = CarrierConfig::new(2.5e9).unwrap();
        let p = PowerConfig::from_dbm(17.0, 5.0, 5.0, -90.0).unwrap();
        let (lb, alt) = (5e-5, 120.0);
        let s = (env.alpha + 1.0) / env.alpha;
        let x = lb * PI * alt * alt;
        let bracket = x.exp() * upper_incomplete_gamma(s, x).unwrap()
            - (2.0 * x).exp() * 0.5f64.powf(s) * upper_incomplete_gamma(s, 2.0 * x).unwrap();
        let lead = (p.p_dd * c.free_space_gain() / (PI * lb * p.p_ul * a_tilde(lb, alt, &env, &c))).powf(1.0 / env.alpha);
        assert_relative_eq!(avg_dth(&p, lb, alt, &env, &c).unwrap(), 2.0 * lead * bracket, max_relative = 1e-12);
    }

    #[test]
    fn closed_form_matches_sampling_oracle() {
        // r ~ pdf_approx by inversion: r = √(L² − ln U / (λπ))
        let env = Environment::HighRiseUrban.profile();
        let c = CarrierConfig::new(2.5e9).unwrap();
        let p = PowerConfig::from_dbm(23.0, 0.0, 0.0, -110.0).unwrap();
        let (lb, alt) = (1e-4, 200.0);
        let a_t = a_tilde(lb, alt, &env, &c);
        let mut rng = rng_from_seed(17);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let mut draw = || (alt * alt - (1.0 - rng.random::<f64>()).ln() / (lb * PI)).sqrt();
            let (ru, rd) = (draw(), draw());
            sum += dth_instantaneous(ru, rd, &p, a_t, a_t, c.free_space_gain(), env.alpha);
        }
        let mc = sum / n as f64;
        let closed = avg_dth(&p, lb, alt, &env, &c).unwrap();
        assert!((mc - closed).abs() < 0.005 * closed, "{mc} vs {closed}");
    }

    #[test]
    fn tdds_rules() {
        let power = unit_power();
        let link = |d: f64, assoc: bool, rss: f64| LinkState {
            d,
            r_ul: Some(120.0),
            r_dl: Some(130.0),
            tx_associated: assoc,
            rss_dd: rss,
        };
        assert_eq!(tdds_decide(&link(50.0, true, 0.0), 100.0, &power), ModeDecision::D2d);
        assert_eq!(tdds_decide(&link(150.0, true, 1.0), 100.0, &power), ModeDecision::Standard);
        assert_eq!(tdds_decide(&link(150.0, false, 1e-12), 100.0, &power), ModeDecision::D2d);
        assert_eq!(tdds_decide(&link(150.0, false, 1e-13), 100.0, &power), ModeDecision::NoService);
    }

    #[test]
    fn rsss_rules() {
        let power = unit_power();
        let link = |d: f64, assoc: bool, rss: f64| LinkState { d, r_ul: None, r_dl: None, tx_associated: assoc, rss_dd: rss };
        assert_eq!(rsss_decide(&link(5000.0, true, 2e-12), 100.0, &power), ModeDecision::D2d);
        assert_eq!(rsss_decide(&link(10.0, false, 1e-12), 100.0, &power), ModeDecision::D2d);
        assert_eq!(rsss_decide(&link(150.0, true, 1e-13), 100.0, &power), ModeDecision::Standard);
        assert_eq!(rsss_decide(&link(50.0, true, 1e-13), 100.0, &power), ModeDecision::NoService);
        assert_eq!(rsss_decide(&link(150.0, false, 1e-13), 100.0, &power), ModeDecision::NoService);
    }

    #[test]
    fn tdds_probability_cases() {
        // p = 1: pure area ratio
        let v = p_d2d_tdds(100.0, &scheme(1.0, 500.0), &power_for_r_bar(200.0), 1.0, 2.0);
        assert_relative_eq!(v, 0.04, max_relative = 1e-12);
        // case (i)
        let v = p_d2d_tdds(100.0, &scheme(0.5, 500.0), &power_for_r_bar(200.0), 1.0, 2.0);
        assert_relative_eq!(v, 0.04 + (4e4 - 1e4) * 0.5 / 2.5e5, max_relative = 1e-12);
        assert_relative_eq!(v, 0.10, max_relative = 1e-12);
        // case (ii)
        let v = p_d2d_tdds(100.0, &scheme(0.5, 500.0), &power_for_r_bar(800.0), 1.0, 2.0);
        assert_relative_eq!(v, 0.52, max_relative = 1e-12);
        // case (iii)
        let v = p_d2d_tdds(300.0, &scheme(0.5, 500.0), &power_for_r_bar(200.0), 1.0, 2.0);
        assert_relative_eq!(v, 0.36, max_relative = 1e-12);
        // case (iv)
        assert_eq!(p_d2d_tdds(600.0, &scheme(0.5, 500.0), &power_for_r_bar(200.0), 1.0, 2.0), 1.0);
        assert_eq!(tdds_case(600.0, 200.0, 500.0), TddsCase::Saturated);
    }

    #[test]
    fn rsss_probability_cases() {
        let v = p_d2d_rsss(&scheme(0.5, 500.0), &power_for_r_bar(250.0), 1.0, 2.0);
        assert_relative_eq!(v, 0.25, max_relative = 1e-12);
        assert_eq!(p_d2d_rsss(&scheme(0.5, 500.0), &power_for_r_bar(500.0 + 1e-6), 1.0, 2.0), 1.0);
        let base = p_d2d_rsss(&scheme(0.5, 500.0), &power_for_r_bar(250.0), 1.0, 2.0);
        for &alt in &[100.0, 1000.0, 5000.0] {
            let s = SchemeConfig { altitude: alt, ..scheme(0.5, 500.0) };
            assert_eq!(p_d2d_rsss(&s, &power_for_r_bar(250.0), 1.0, 2.0), base);
        }
    }

    #[test]
    fn tdds_with_certain_association_is_area_ratio() {
        for &d in &[10.0, 250.0, 499.0, 700.0] {
            let v = p_d2d_tdds(d, &scheme(1.0, 500.0), &power_for_r_bar(300.0), 1.0, 2.0);
            assert_relative_eq!(v, (d * d / 2.5e5f64).min(1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn tdds_probability_monotone_sweeps() {
        for &d in &[50.0, 200.0, 450.0] {
            let mut prev = f64::INFINITY;
            for k in 0..200 {
                let rss_th = 1e-14 * 1.1f64.powi(k);
                let pw = PowerConfig::new(1.0, 1.0, 1.0, rss_th).unwrap();
                let v = p_d2d_tdds(d, &scheme(0.3, 500.0), &pw, 9e-5, 3.5);
                assert!(v <= prev + 1e-15);
                prev = v;
            }
            let mut prev = f64::INFINITY;
            for k in 0..=100 {
                let v = p_d2d_tdds(d, &scheme(k as f64 / 100.0, 500.0), &power_for_r_bar(300.0), 1.0, 2.0);
                assert!(v <= prev + 1e-15);
                prev = v;
            }
        }
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("tdds".parse::<Scheme>().unwrap(), Scheme::Tdds);
        assert_eq!("RSSS".parse::<Scheme>().unwrap(), Scheme::Rsss);
        assert!("both".parse::<Scheme>().is_err());
    }

    proptest! {
        #[test]
        fn dth_branches_agree_on_boundary(
            r_ul in 100.0f64..2000.0,
            ratio in 0.1f64..10.0,
            a_ul in 1e-8f64..1e-4,
            a_dl in 1e-8f64..1e-4,
            alpha in 2.1f64..5.0,
        ) {
            // choose r_dl so that RSS_UL = RSS_DL exactly in real arithmetic
            let power = PowerConfig::new(1.0, 1.0, ratio, 1e-12).unwrap();
            let r_dl = r_ul * (ratio * a_dl / a_ul).sqrt();
            let ul_branch = (power.p_dd * 1e-4 / (power.p_ul * a_ul)).powf(1.0 / alpha) * r_ul.powf(2.0 / alpha);
            let dl_branch = (power.p_dd * 1e-4 / (power.p_dl * a_dl)).powf(1.0 / alpha) * r_dl.powf(2.0 / alpha);
            prop_assert!((ul_branch - dl_branch).abs() <= 1e-12 * ul_branch);
            let v = dth_instantaneous(r_ul, r_dl, &power, a_ul, a_dl, 1e-4, alpha);
            prop_assert!((v - ul_branch).abs() <= 1e-12 * ul_branch);
        }

        #[test]
        fn dth_solves_equal_rss(
            r_ul in 100.0f64..3000.0,
            r_dl in 100.0f64..3000.0,
            p_ul in 1e-4f64..1.0,
            p_dl in 1e-4f64..10.0,
            a_ul in 1e-9f64..1e-4,
            a_dl in 1e-9f64..1e-4,
            alpha in 2.1f64..5.0,
        ) {
            let power = PowerConfig::new(0.2, p_ul, p_dl, 1e-12).unwrap();
            let a_dd = 9e-5;
            let d = dth_instantaneous(r_ul, r_dl, &power, a_ul, a_dl, a_dd, alpha);
            let weaker = (p_ul * a_ul / (r_ul * r_ul)).min(p_dl * a_dl / (r_dl * r_dl));
            let at_d = power.p_dd * a_dd * d.powf(-alpha);
            prop_assert!((at_d - weaker).abs() <= 1e-9 * weaker);
        }

        #[test]
        fn unassociated_strong_link_is_d2d_under_both(d in 1.0f64..5000.0, d_bar in 1.0f64..1000.0, excess in 1.0f64..100.0) {
            let power = unit_power();
            let link = LinkState { d, r_ul: None, r_dl: None, tx_associated: false, rss_dd: power.rss_threshold * excess };
            prop_assert_eq!(tdds_decide(&link, d_bar, &power), ModeDecision::D2d);
            prop_assert_eq!(rsss_decide(&link, d_bar, &power), ModeDecision::D2d);
        }
    }
}
