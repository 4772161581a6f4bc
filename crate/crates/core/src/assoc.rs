//! Binds ground endpoints to their nearest platforms and assembles the
//! [`LinkState`] consumed by the mode-selection rules.

use rand::Rng;

use crate::channel::{d2d_attenuation, rss, CarrierConfig, EnvironmentProfile};
use crate::error::{check, Error, Result};
use crate::modeselect::{LinkState, PowerConfig};
use crate::pointprocess::{nearest_point, Point, PointPattern};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationRecord {
    pub endpoint: Point,
    pub platform: Option<Point>,
    pub horizontal_distance_m: Option<f64>,
    pub slant_distance_m: Option<f64>,
}

/// Nearest platform of `endpoint`, with horizontal and slant distances.
pub fn associate(endpoint: Point, platforms: &PointPattern, altitude: f64) -> AssociationRecord {
    match nearest_point(&endpoint, platforms) {
        Some((idx, h)) => AssociationRecord {
            endpoint,
            platform: Some(platforms.points()[idx]),
            horizontal_distance_m: Some(h),
            slant_distance_m: Some(h.hypot(altitude)),
        },
        None => AssociationRecord { endpoint, platform: None, horizontal_distance_m: None, slant_distance_m: None },
    }
}

/// Link state of the pair (`tx`, `rx`). Uplink and downlink attach to the
/// platforms nearest their own endpoints. The association draw is taken from
/// `rng` on every call, so the stream advances identically whether or not any
/// platform exists; without platforms the transmitter is never associated.
#[allow(clippy::too_many_arguments)]
pub fn build_link_state<R: Rng + ?Sized>(
    tx: Point,
    rx: Point,
    platforms: &PointPattern,
    altitude: f64,
    env: &EnvironmentProfile,
    carrier: &CarrierConfig,
    power: &PowerConfig,
    p_assoc: f64,
    rng: &mut R,
) -> Result<LinkState> {
    check("association_probability", p_assoc, (0.0..=1.0).contains(&p_assoc), "must lie in [0, 1]")?;
    check("altitude", altitude, altitude > 0.0, "must be > 0")?;
    let d = tx.distance(&rx);
    if d == 0.0 {
        return Err(Error::DegeneratePair);
    }
    let drawn = rng.random_bool(p_assoc);
    let up = associate(tx, platforms, altitude);
    let down = associate(rx, platforms, altitude);
    Ok(LinkState {
        d,
        r_ul: up.slant_distance_m,
        r_dl: down.slant_distance_m,
        tx_associated: drawn && up.platform.is_some(),
        rss_dd: rss(power.p_dd, d2d_attenuation(carrier), d, env.alpha)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Environment;
    use crate::pointprocess::{sample_ppp, Point};
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn setup() -> (EnvironmentProfile, CarrierConfig, PowerConfig) {
        (
            Environment::Urban.profile(),
            CarrierConfig::new(2.5e9).unwrap(),
            PowerConfig::from_dbm(23.0, 0.0, 0.0, -110.0).unwrap(),
        )
    }

    #[test]
    fn pair_distance() {
        let (env, c, pw) = setup();
        let pats = PointPattern::new(vec![Point::new(10.0, 0.0)], 100.0).unwrap();
        let tx = Point::new(1.0, 2.0);
        let rx = Point::new(4.0, 6.0);
        let link = build_link_state(tx, rx, &pats, 50.0, &env, &c, &pw, 0.5, &mut rng_from_seed(1)).unwrap();
        assert_eq!(link.d, 5.0);
        let expected = pw.p_dd * c.free_space_gain() * 5f64.powf(-env.alpha);
        assert!((link.rss_dd - expected).abs() <= 1e-15 * expected);
    }

    #[test]
    fn coincident_endpoints_rejected() {
        let (env, c, pw) = setup();
        let pats = PointPattern::empty(100.0).unwrap();
        let p = Point::new(3.0, 3.0);
        let err = build_link_state(p, p, &pats, 50.0, &env, &c, &pw, 0.5, &mut rng_from_seed(1)).unwrap_err();
        assert!(matches!(err, Error::DegeneratePair));
    }

    #[test]
    fn no_platforms_means_unassociated() {
        let (env, c, pw) = setup();
        let pats = PointPattern::empty(100.0).unwrap();
        let mut rng = rng_from_seed(2);
        for _ in 0..200 {
            let link =
                build_link_state(Point::ORIGIN, Point::new(10.0, 0.0), &pats, 50.0, &env, &c, &pw, 1.0, &mut rng).unwrap();
            assert!(!link.tx_associated);
            assert_eq!(link.r_ul, None);
            assert_eq!(link.r_dl, None);
        }
    }

    #[test]
    fn decoupled_links() {
        let pats = PointPattern::new(vec![Point::new(-30.0, 0.0), Point::new(40.0, 0.0)], 100.0).unwrap();
        let up = associate(Point::new(-20.0, 0.0), &pats, 30.0);
        let down = associate(Point::new(30.0, 0.0), &pats, 30.0);
        assert_eq!(up.platform, Some(Point::new(-30.0, 0.0)));
        assert_eq!(down.platform, Some(Point::new(40.0, 0.0)));
        assert_eq!(up.slant_distance_m, Some(10f64.hypot(30.0)));
    }

    #[test]
    fn slant_distance_matches_exhaustive_scan() {
        let mut rng = rng_from_seed(9);
        for _ in 0..1000 {
            let pats = sample_ppp(2e-4, 300.0, &mut rng).unwrap();
            let e = Point::new(rng.random_range(-200.0..200.0), rng.random_range(-200.0..200.0));
            let rec = associate(e, &pats, 120.0);
            let brute = pats
                .points()
                .iter()
                .map(|q| ((q.x - e.x).powi(2) + (q.y - e.y).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            match rec.slant_distance_m {
                Some(s) => assert_eq!(s, brute.hypot(120.0)),
                None => assert!(pats.is_empty()),
            }
        }
    }

    proptest! {
        #[test]
        fn slant_at_least_altitude_and_certain_association(
            seed in 0u64..10_000,
            alt in 1.0f64..2000.0,
        ) {
            let (env, c, pw) = setup();
            let mut rng = rng_from_seed(seed);
            let pats = sample_ppp(1e-4, 200.0, &mut rng).unwrap();
            let link = build_link_state(
                Point::ORIGIN, Point::new(25.0, -5.0), &pats, alt, &env, &c, &pw, 1.0, &mut rng,
            ).unwrap();
            if pats.is_empty() {
                prop_assert!(!link.tx_associated);
            } else {
                prop_assert!(link.tx_associated);
                prop_assert!(link.r_ul.unwrap() >= alt);
                prop_assert!(link.r_dl.unwrap() >= alt);
            }
        }
    }
}
