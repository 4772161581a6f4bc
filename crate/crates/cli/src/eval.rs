//! Single-shot evaluation of closed-form quantities from `key=value` pairs.

use std::collections::BTreeMap;
use std::str::FromStr;

use aerial_d2d::channel::{atg_attenuation, los_probability, AngleUnit, CarrierConfig, Environment, EnvironmentProfile};
use aerial_d2d::modeselect::{avg_dth, p_d2d, PowerConfig, Scheme, SchemeConfig};
use aerial_d2d::pointprocess::{mhcp_density, MhcpParams};

use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub const EXPRESSIONS: &[&str] = &["mhcp_density", "avg_dth", "p_d2d", "plos", "atg_attenuation"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub unit: &'static str,
}

impl Evaluation {
    /// Ten significant digits followed by the unit.
    pub fn render(&self) -> String {
        format!("{:.9e} {}", self.value, self.unit)
    }
}

struct Params {
    expr: String,
    values: BTreeMap<String, String>,
}

const ENV_KEYS: &[&str] = &["a", "b", "eta_los_db", "eta_nlos_db", "alpha"];

impl Params {
    fn parse(expr: &str, pairs: &[String]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for pair in pairs {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("{expr}: expected key=value, got '{pair}'")))?;
            if values.insert(k.trim().to_owned(), v.trim().to_owned()).is_some() {
                return Err(CliError::Config(format!("{expr}: key '{}' given twice", k.trim())));
            }
        }
        Ok(Self { expr: expr.to_owned(), values })
    }

    fn err(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::Config(format!("{}: {msg}", self.expr))
    }

    /// Fails listing every key in `keys` that is absent.
    fn require(&self, keys: &[&str]) -> Result<()> {
        let missing: Vec<&str> = keys.iter().copied().filter(|k| !self.values.contains_key(*k)).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(self.err(format!("missing keys: {}", missing.join(", "))))
        }
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(self.err(format!("unknown key '{k}' (accepted: {})", allowed.join(", ")))),
            None => Ok(()),
        }
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.values.get(key).ok_or_else(|| self.err(format!("missing keys: {key}")))?;
        raw.parse().map_err(|e| self.err(format!("{key}: cannot parse '{raw}': {e}")))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.parsed(key)
    }

    fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    /// Keys needed to describe the environment: a preset name or the five
    /// explicit constants.
    fn env_keys(&self) -> Vec<&'static str> {
        if self.has("env") {
            vec![]
        } else if ENV_KEYS.iter().any(|k| self.has(k)) {
            ENV_KEYS.to_vec()
        } else {
            vec!["env"]
        }
    }

    fn env(&self) -> Result<EnvironmentProfile> {
        let unit = if self.has("angle_unit") { self.parsed::<AngleUnit>("angle_unit")? } else { AngleUnit::Degrees };
        let profile = if self.has("env") {
            self.parsed::<Environment>("env")?.profile()
        } else {
            EnvironmentProfile::new(
                self.f64("a")?,
                self.f64("b")?,
                self.f64("eta_los_db")?,
                self.f64("eta_nlos_db")?,
                self.f64("alpha")?,
            )
            .map_err(|e| self.err(e))?
        };
        Ok(profile.with_angle_unit(unit))
    }

    fn carrier(&self) -> Result<CarrierConfig> {
        CarrierConfig::new(self.f64("f_c")?).map_err(|e| self.err(e))
    }

    fn density_keys(&self) -> Vec<&'static str> {
        if self.has("lambda_retained") {
            vec![]
        } else {
            vec!["lambda_parent", "delta"]
        }
    }

    fn lambda_retained(&self) -> Result<f64> {
        if self.has("lambda_retained") {
            return self.f64("lambda_retained");
        }
        let mhcp = MhcpParams::new(self.f64("lambda_parent")?, self.f64("delta")?).map_err(|e| self.err(e))?;
        Ok(mhcp.retained_density())
    }
}

fn with_env(mut base: Vec<&'static str>, p: &Params) -> Vec<&'static str> {
    base.extend(p.env_keys());
    base
}

fn all_keys(extra: &[&'static str]) -> Vec<&'static str> {
    let mut keys = vec!["env", "angle_unit"];
    keys.extend_from_slice(ENV_KEYS);
    keys.extend_from_slice(extra);
    keys
}

/// Evaluates `expr` with the given `key=value` pairs.
pub fn evaluate(expr: &str, pairs: &[String]) -> Result<Evaluation> {
    let p = Params::parse(expr, pairs)?;
    match expr {
        "mhcp_density" => {
            p.reject_unknown(&["lambda_parent", "delta"])?;
            p.require(&["lambda_parent", "delta"])?;
            let mhcp = MhcpParams::new(p.f64("lambda_parent")?, p.f64("delta")?).map_err(|e| p.err(e))?;
            Ok(Evaluation { value: mhcp_density(&mhcp), unit: "1/m^2" })
        }
        "plos" => {
            p.reject_unknown(&all_keys(&["h", "L"]))?;
            p.require(&with_env(vec!["h", "L"], &p))?;
            let value = los_probability(p.f64("h")?, p.f64("L")?, &p.env()?);
            Ok(Evaluation { value, unit: "(probability)" })
        }
        "atg_attenuation" => {
            p.reject_unknown(&all_keys(&["h", "L", "f_c"]))?;
            p.require(&with_env(vec!["h", "L", "f_c"], &p))?;
            let value = atg_attenuation(p.f64("h")?, p.f64("L")?, &p.env()?, &p.carrier()?);
            Ok(Evaluation { value, unit: "(linear gain)" })
        }
        "avg_dth" => {
            p.reject_unknown(&all_keys(&[
                "L", "f_c", "p_dd_dbm", "p_ul_dbm", "p_dl_dbm", "lambda_retained", "lambda_parent", "delta",
            ]))?;
            let mut keys = with_env(vec!["L", "f_c", "p_dd_dbm", "p_ul_dbm", "p_dl_dbm"], &p);
            keys.extend(p.density_keys());
            p.require(&keys)?;
            // the RSS threshold does not enter d̄_th
            let power = PowerConfig::from_dbm(p.f64("p_dd_dbm")?, p.f64("p_ul_dbm")?, p.f64("p_dl_dbm")?, 0.0)
                .map_err(|e| p.err(e))?;
            let value = avg_dth(&power, p.lambda_retained()?, p.f64("L")?, &p.env()?, &p.carrier()?)
                .map_err(|e| CliError::numeric(expr, e))?;
            Ok(Evaluation { value, unit: "m" })
        }
        "p_d2d" => {
            p.reject_unknown(&all_keys(&[
                "scheme", "R", "p", "L", "f_c", "p_dd_dbm", "p_ul_dbm", "p_dl_dbm", "rss_th_dbm",
                "lambda_retained", "lambda_parent", "delta",
            ]))?;
            p.require(&["scheme"])?;
            let scheme: Scheme = p.parsed("scheme")?;
            let mut keys = with_env(vec!["R", "f_c", "p_dd_dbm", "rss_th_dbm"], &p);
            if scheme == Scheme::Tdds {
                keys.extend(["p", "L", "p_ul_dbm", "p_dl_dbm"]);
                keys.extend(p.density_keys());
            }
            p.require(&keys)?;
            let env = p.env()?;
            let carrier = p.carrier()?;
            let p_dd = p.f64("p_dd_dbm")?;
            // RSSS depends only on P_DD and the threshold
            let (p_ul, p_dl) = match scheme {
                Scheme::Tdds => (p.f64("p_ul_dbm")?, p.f64("p_dl_dbm")?),
                Scheme::Rsss => (p_dd, p_dd),
            };
            let power = PowerConfig::from_dbm(p_dd, p_ul, p_dl, p.f64("rss_th_dbm")?).map_err(|e| p.err(e))?;
            let cfg = SchemeConfig {
                scheme,
                association_probability: if p.has("p") { p.f64("p")? } else { 0.0 },
                region_radius: p.f64("R")?,
                altitude: if p.has("L") { p.f64("L")? } else { 1.0 },
            };
            cfg.validate().map_err(|e| p.err(e))?;
            let d_bar = match scheme {
                Scheme::Tdds => avg_dth(&power, p.lambda_retained()?, cfg.altitude, &env, &carrier)
                    .map_err(|e| CliError::numeric(expr, e))?,
                Scheme::Rsss => 0.0,
            };
            let value = p_d2d(d_bar, &cfg, &power, carrier.free_space_gain(), env.alpha);
            Ok(Evaluation { value, unit: "(probability)" })
        }
        other => Err(CliError::Config(format!(
            "unknown expression '{other}' (expected one of: {})",
            EXPRESSIONS.join(", ")
        ))),
    }
}
