//! TOML run configuration.
//!
//! Sections: `deployment`, `env`, `carrier`, `power`, `scheme`, `mc`, `pdf`,
//! `sweep`, `numerics`. A `manifest` section, written next to every output,
//! is ignored on load so a manifest can be fed back as a config.

use std::fs;
use std::path::Path;

use aerial_d2d::channel::{dbm_to_watts, AngleUnit, CarrierConfig, Environment, EnvironmentProfile};
use aerial_d2d::modeselect::{PowerConfig, Scheme};
use aerial_d2d::montecarlo::DeploymentConfig;
use aerial_d2d::pointprocess::MhcpParams;
use aerial_d2d::specfun::QuadratureSpec;
use toml::{Table, Value};

use crate::error::CliError;

/// Overrides the default seed when neither `--seed` nor `mc.seed` is given.
pub const SEED_ENV: &str = "AERIAL_D2D_SEED";

type Result<T> = std::result::Result<T, CliError>;

fn cfg_err(section: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{section}.{key}: {msg}"))
}

struct Reader<'a> {
    section: &'a str,
    table: Option<&'a Table>,
}

impl<'a> Reader<'a> {
    fn new(root: &'a Table, section: &'a str) -> Result<Self> {
        match root.get(section) {
            None => Ok(Self { section, table: None }),
            Some(Value::Table(t)) => Ok(Self { section, table: Some(t) }),
            Some(_) => Err(CliError::Config(format!("{section}: expected a table"))),
        }
    }

    fn present(&self) -> bool {
        self.table.is_some()
    }

    fn has(&self, key: &str) -> bool {
        self.table.is_some_and(|t| t.contains_key(key))
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn err(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        cfg_err(self.section, key, msg)
    }

    fn deny_unknown(&self, allowed: &[&str]) -> Result<()> {
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(self.err(k, format!("unknown key (expected one of: {})", allowed.join(", "))));
            }
        }
        Ok(())
    }

    fn as_f64(&self, key: &str, v: &Value) -> Result<f64> {
        match v {
            Value::Float(x) => Ok(*x),
            Value::Integer(i) => Ok(*i as f64),
            _ => Err(self.err(key, "expected a number")),
        }
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| self.as_f64(key, v)).transpose()
    }

    fn f64_req(&self, key: &str) -> Result<f64> {
        self.f64_opt(key)?.ok_or_else(|| self.err(key, "required"))
    }

    fn u64_opt(&self, key: &str) -> Result<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(_) => Err(self.err(key, "expected a non-negative integer")),
        }
    }

    fn str_opt(&self, key: &str) -> Result<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(self.err(key, "expected a string")),
        }
    }

    /// A scalar or an array of scalars.
    fn list<T>(&self, key: &str, parse: impl Fn(&Value) -> Option<T>) -> Result<Option<Vec<T>>> {
        let items: Vec<&Value> = match self.get(key) {
            None => return Ok(None),
            Some(Value::Array(a)) => a.iter().collect(),
            Some(v) => vec![v],
        };
        if items.is_empty() {
            return Err(self.err(key, "must not be empty"));
        }
        items
            .into_iter()
            .map(|v| parse(v).ok_or_else(|| self.err(key, format!("invalid entry {v}"))))
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }
}

fn number(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn string(v: &Value) -> Option<String> {
    v.as_str().map(str::to_owned)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlatformDensity {
    Parent(f64),
    /// Retained intensity; the parent intensity is recovered by inverting the
    /// retention formula.
    Retained(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentSpec {
    pub density: PlatformDensity,
    pub delta: f64,
    pub region_radius: f64,
    pub altitude: Option<f64>,
    pub lambda_tx: f64,
    pub lambda_rx: f64,
}

impl DeploymentSpec {
    pub fn mhcp(&self) -> Result<MhcpParams> {
        match self.density {
            PlatformDensity::Parent(lp) => {
                MhcpParams::new(lp, self.delta).map_err(|e| cfg_err("deployment", "lambda_parent", e))
            }
            PlatformDensity::Retained(lb) => MhcpParams::from_retained(lb, self.delta)
                .map_err(|e| cfg_err("deployment", "lambda_retained", e)),
        }
    }

    pub fn altitude(&self) -> Result<f64> {
        self.altitude.ok_or_else(|| cfg_err("deployment", "altitude", "required"))
    }

    /// Core deployment at `altitude`.
    pub fn at_altitude(&self, altitude: f64) -> Result<DeploymentConfig> {
        let mhcp = self.mhcp()?;
        let dep = DeploymentConfig {
            lambda_parent: mhcp.lambda_parent,
            delta: self.delta,
            region_radius: self.region_radius,
            altitude,
            lambda_tx: self.lambda_tx,
            lambda_rx: self.lambda_rx,
        };
        dep.validate().map_err(|e| CliError::Config(format!("deployment: {e}")))?;
        Ok(dep)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnvSpec {
    Presets { presets: Vec<Environment>, angle_unit: AngleUnit },
    Explicit { name: String, profile: EnvironmentProfile },
}

impl EnvSpec {
    pub fn profiles(&self) -> Vec<(String, EnvironmentProfile)> {
        match self {
            Self::Presets { presets, angle_unit } => presets
                .iter()
                .map(|e| (e.name().to_owned(), e.profile().with_angle_unit(*angle_unit)))
                .collect(),
            Self::Explicit { name, profile } => vec![(name.clone(), *profile)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpec {
    pub p_dd_dbm: f64,
    pub p_ul_dbm: f64,
    pub p_dl_dbm: f64,
    pub rss_th_dbm: Vec<f64>,
}

impl PowerSpec {
    pub fn at_threshold(&self, rss_th_dbm: f64) -> Result<PowerConfig> {
        PowerConfig::from_dbm(self.p_dd_dbm, self.p_ul_dbm, self.p_dl_dbm, rss_th_dbm)
            .map_err(|e| CliError::Config(format!("power: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub kinds: Vec<Scheme>,
    pub association_probability: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSpec {
    pub replicates: u64,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfSpec {
    pub samples: u64,
    pub bins: usize,
    pub grid_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub l_min: f64,
    pub l_max: f64,
    pub n_points: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.l_min.is_finite() && self.l_min > 0.0) {
            return Err(cfg_err("sweep", "l_min", "must be > 0"));
        }
        if !(self.l_max.is_finite() && self.l_max >= self.l_min) {
            return Err(cfg_err("sweep", "l_max", "must be >= sweep.l_min"));
        }
        if self.n_points < 2 {
            return Err(cfg_err("sweep", "n_points", "must be >= 2"));
        }
        Ok(())
    }

    pub fn altitudes(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n)
            .map(|i| self.l_min + (self.l_max - self.l_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub deployment: DeploymentSpec,
    pub env: Option<EnvSpec>,
    pub carrier: Option<CarrierConfig>,
    pub power: Option<PowerSpec>,
    pub scheme: SchemeSpec,
    pub mc: McSpec,
    pub pdf: PdfSpec,
    pub sweep: Option<SweepSpec>,
    pub numerics: QuadratureSpec,
}

const SECTIONS: &[&str] =
    &["deployment", "env", "carrier", "power", "scheme", "mc", "pdf", "sweep", "numerics", "manifest"];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: cannot read config: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let root: Table = text.parse().map_err(|e| CliError::Config(format!("invalid TOML: {e}")))?;
        if let Some(k) = root.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
            return Err(CliError::Config(format!("{k}: unknown section")));
        }
        Ok(Self {
            deployment: parse_deployment(&root)?,
            env: parse_env(&root)?,
            carrier: parse_carrier(&root)?,
            power: parse_power(&root)?,
            scheme: parse_scheme(&root)?,
            mc: parse_mc(&root)?,
            pdf: parse_pdf(&root)?,
            sweep: parse_sweep(&root)?,
            numerics: parse_numerics(&root)?,
        })
    }

    pub fn env(&self) -> Result<&EnvSpec> {
        self.env.as_ref().ok_or_else(|| CliError::Config("env: section required".into()))
    }

    pub fn carrier(&self) -> Result<CarrierConfig> {
        self.carrier.ok_or_else(|| cfg_err("carrier", "f_c", "required"))
    }

    pub fn power(&self) -> Result<&PowerSpec> {
        self.power.as_ref().ok_or_else(|| CliError::Config("power: section required".into()))
    }

    pub fn association_probability(&self) -> Result<f64> {
        self.scheme
            .association_probability
            .ok_or_else(|| cfg_err("scheme", "association_probability", "required"))
    }

    pub fn sweep(&self) -> Result<SweepSpec> {
        self.sweep.ok_or_else(|| CliError::Config("sweep: section required".into()))
    }

    /// Seed precedence: explicit override, `mc.seed`, the environment
    /// variable, then 0.
    pub fn resolve_seed(&mut self, cli: Option<u64>) -> Result<u64> {
        let seed = match (cli, self.mc.seed) {
            (Some(s), _) | (None, Some(s)) => s,
            (None, None) => match std::env::var(SEED_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("{SEED_ENV}: expected an unsigned integer, got '{v}'")))?,
                Err(_) => 0,
            },
        };
        self.mc.seed = Some(seed);
        Ok(seed)
    }

    pub fn resolve_workers(&mut self, cli: Option<usize>) -> Result<usize> {
        let workers = cli
            .or(self.mc.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if workers == 0 {
            return Err(cfg_err("mc", "workers", "must be >= 1"));
        }
        self.mc.workers = Some(workers);
        Ok(workers)
    }

    /// Fully resolved configuration as TOML tables.
    pub fn to_table(&self) -> Table {
        let mut root = Table::new();
        let d = &self.deployment;
        let mut dep = Table::new();
        match d.density {
            PlatformDensity::Parent(v) => dep.insert("lambda_parent".into(), v.into()),
            PlatformDensity::Retained(v) => dep.insert("lambda_retained".into(), v.into()),
        };
        dep.insert("delta".into(), d.delta.into());
        dep.insert("region_radius".into(), d.region_radius.into());
        if let Some(l) = d.altitude {
            dep.insert("altitude".into(), l.into());
        }
        dep.insert("lambda_tx".into(), d.lambda_tx.into());
        dep.insert("lambda_rx".into(), d.lambda_rx.into());
        root.insert("deployment".into(), dep.into());

        if let Some(env) = &self.env {
            let mut t = Table::new();
            match env {
                EnvSpec::Presets { presets, angle_unit } => {
                    let names: Vec<Value> = presets.iter().map(|e| Value::from(e.name())).collect();
                    t.insert("preset".into(), Value::Array(names));
                    t.insert("angle_unit".into(), angle_unit.to_string().into());
                }
                EnvSpec::Explicit { name, profile } => {
                    t.insert("name".into(), name.clone().into());
                    t.insert("a".into(), profile.a.into());
                    t.insert("b".into(), profile.b.into());
                    t.insert("eta_los_db".into(), profile.eta_los_db.into());
                    t.insert("eta_nlos_db".into(), profile.eta_nlos_db.into());
                    t.insert("alpha".into(), profile.alpha.into());
                    t.insert("angle_unit".into(), profile.angle_unit.to_string().into());
                }
            }
            root.insert("env".into(), t.into());
        }
        if let Some(c) = &self.carrier {
            let mut t = Table::new();
            t.insert("f_c".into(), c.f_c.into());
            t.insert("speed_of_light".into(), c.c.into());
            root.insert("carrier".into(), t.into());
        }
        if let Some(p) = &self.power {
            let mut t = Table::new();
            t.insert("p_dd_dbm".into(), p.p_dd_dbm.into());
            t.insert("p_ul_dbm".into(), p.p_ul_dbm.into());
            t.insert("p_dl_dbm".into(), p.p_dl_dbm.into());
            t.insert("rss_th_dbm".into(), Value::Array(p.rss_th_dbm.iter().map(|&v| v.into()).collect()));
            root.insert("power".into(), t.into());
        }
        let mut t = Table::new();
        t.insert("kind".into(), Value::Array(self.scheme.kinds.iter().map(|s| Value::from(s.name())).collect()));
        if let Some(p) = self.scheme.association_probability {
            t.insert("association_probability".into(), p.into());
        }
        root.insert("scheme".into(), t.into());

        let mut t = Table::new();
        t.insert("replicates".into(), (self.mc.replicates as i64).into());
        if let Some(s) = self.mc.seed {
            t.insert("seed".into(), (s as i64).into());
        }
        if let Some(w) = self.mc.workers {
            t.insert("workers".into(), (w as i64).into());
        }
        root.insert("mc".into(), t.into());

        let mut t = Table::new();
        t.insert("samples".into(), (self.pdf.samples as i64).into());
        t.insert("bins".into(), (self.pdf.bins as i64).into());
        t.insert("grid_points".into(), (self.pdf.grid_points as i64).into());
        root.insert("pdf".into(), t.into());

        if let Some(s) = &self.sweep {
            let mut t = Table::new();
            t.insert("l_min".into(), s.l_min.into());
            t.insert("l_max".into(), s.l_max.into());
            t.insert("n_points".into(), (s.n_points as i64).into());
            root.insert("sweep".into(), t.into());
        }

        let mut t = Table::new();
        t.insert("abs_tol".into(), self.numerics.abs_tol.into());
        t.insert("rel_tol".into(), self.numerics.rel_tol.into());
        t.insert("max_subdivisions".into(), (self.numerics.max_subdivisions as i64).into());
        root.insert("numerics".into(), t.into());
        root
    }

    /// Linear-unit echo of the dBm power settings.
    pub fn power_watts_table(&self) -> Option<Table> {
        let p = self.power.as_ref()?;
        let mut t = Table::new();
        t.insert("p_dd_w".into(), dbm_to_watts(p.p_dd_dbm).into());
        t.insert("p_ul_w".into(), dbm_to_watts(p.p_ul_dbm).into());
        t.insert("p_dl_w".into(), dbm_to_watts(p.p_dl_dbm).into());
        t.insert(
            "rss_th_w".into(),
            Value::Array(p.rss_th_dbm.iter().map(|&v| dbm_to_watts(v).into()).collect()),
        );
        Some(t)
    }
}

fn parse_deployment(root: &Table) -> Result<DeploymentSpec> {
    let r = Reader::new(root, "deployment")?;
    r.deny_unknown(&["lambda_parent", "lambda_retained", "delta", "region_radius", "altitude", "lambda_tx", "lambda_rx"])?;
    let density = match (r.f64_opt("lambda_parent")?, r.f64_opt("lambda_retained")?) {
        (Some(_), Some(_)) => {
            return Err(r.err("lambda_retained", "give either lambda_parent or lambda_retained, not both"))
        }
        (Some(v), None) => PlatformDensity::Parent(v),
        (None, Some(v)) => PlatformDensity::Retained(v),
        (None, None) => return Err(r.err("lambda_parent", "required")),
    };
    let spec = DeploymentSpec {
        density,
        delta: r.f64_req("delta")?,
        region_radius: r.f64_req("region_radius")?,
        altitude: r.f64_opt("altitude")?,
        lambda_tx: r.f64_opt("lambda_tx")?.unwrap_or(0.0),
        lambda_rx: r.f64_opt("lambda_rx")?.unwrap_or(0.0),
    };
    spec.mhcp()?;
    if let Some(l) = spec.altitude {
        if !(l.is_finite() && l > 0.0) {
            return Err(r.err("altitude", "must be > 0"));
        }
    }
    for (key, v) in [("region_radius", spec.region_radius), ("lambda_tx", spec.lambda_tx), ("lambda_rx", spec.lambda_rx)] {
        let ok = if key == "region_radius" { v > 0.0 } else { v >= 0.0 };
        if !(v.is_finite() && ok) {
            return Err(r.err(key, "out of range"));
        }
    }
    Ok(spec)
}

fn parse_env(root: &Table) -> Result<Option<EnvSpec>> {
    let r = Reader::new(root, "env")?;
    if !r.present() {
        return Ok(None);
    }
    r.deny_unknown(&["preset", "angle_unit", "name", "a", "b", "eta_los_db", "eta_nlos_db", "alpha"])?;
    let angle_unit = match r.str_opt("angle_unit")? {
        Some(s) => s.parse::<AngleUnit>().map_err(|e| r.err("angle_unit", e))?,
        None => AngleUnit::Degrees,
    };
    let explicit = ["a", "b", "eta_los_db", "eta_nlos_db", "alpha"];
    if r.has("preset") {
        if let Some(k) = explicit.iter().find(|k| r.has(k)) {
            return Err(r.err(k, "not allowed together with env.preset"));
        }
        let names = r.list("preset", string)?.unwrap_or_default();
        let presets = names
            .iter()
            .map(|n| n.parse::<Environment>().map_err(|e| r.err("preset", e)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Some(EnvSpec::Presets { presets, angle_unit }));
    }
    let profile = EnvironmentProfile::new(
        r.f64_req("a")?,
        r.f64_req("b")?,
        r.f64_req("eta_los_db")?,
        r.f64_req("eta_nlos_db")?,
        r.f64_req("alpha")?,
    )
    .map_err(|e| CliError::Config(format!("env: {e}")))?
    .with_angle_unit(angle_unit);
    let name = r.str_opt("name")?.unwrap_or("custom").to_owned();
    Ok(Some(EnvSpec::Explicit { name, profile }))
}

fn parse_carrier(root: &Table) -> Result<Option<CarrierConfig>> {
    let r = Reader::new(root, "carrier")?;
    if !r.present() {
        return Ok(None);
    }
    r.deny_unknown(&["f_c", "speed_of_light"])?;
    let f_c = r.f64_req("f_c")?;
    let carrier = match r.f64_opt("speed_of_light")? {
        Some(c) => CarrierConfig::with_speed_of_light(f_c, c),
        None => CarrierConfig::new(f_c),
    };
    carrier.map(Some).map_err(|e| CliError::Config(format!("carrier: {e}")))
}

fn parse_power(root: &Table) -> Result<Option<PowerSpec>> {
    let r = Reader::new(root, "power")?;
    if !r.present() {
        return Ok(None);
    }
    r.deny_unknown(&["p_dd_dbm", "p_ul_dbm", "p_dl_dbm", "rss_th_dbm"])?;
    let spec = PowerSpec {
        p_dd_dbm: r.f64_req("p_dd_dbm")?,
        p_ul_dbm: r.f64_req("p_ul_dbm")?,
        p_dl_dbm: r.f64_req("p_dl_dbm")?,
        rss_th_dbm: r.list("rss_th_dbm", number)?.ok_or_else(|| r.err("rss_th_dbm", "required"))?,
    };
    for &th in &spec.rss_th_dbm {
        spec.at_threshold(th)?;
    }
    Ok(Some(spec))
}

fn parse_scheme(root: &Table) -> Result<SchemeSpec> {
    let r = Reader::new(root, "scheme")?;
    r.deny_unknown(&["kind", "association_probability"])?;
    let kinds = match r.list("kind", string)? {
        Some(names) => names
            .iter()
            .map(|n| n.parse::<Scheme>().map_err(|e| r.err("kind", e)))
            .collect::<Result<Vec<_>>>()?,
        None => vec![Scheme::Tdds, Scheme::Rsss],
    };
    let p = r.f64_opt("association_probability")?;
    if let Some(p) = p {
        if !(0.0..=1.0).contains(&p) {
            return Err(r.err("association_probability", "must lie in [0, 1]"));
        }
    }
    Ok(SchemeSpec { kinds, association_probability: p })
}

fn parse_mc(root: &Table) -> Result<McSpec> {
    let r = Reader::new(root, "mc")?;
    r.deny_unknown(&["replicates", "seed", "workers"])?;
    let replicates = r.u64_opt("replicates")?.unwrap_or(10_000);
    if replicates == 0 {
        return Err(r.err("replicates", "must be >= 1"));
    }
    let workers = r.u64_opt("workers")?.map(|w| w as usize);
    if workers == Some(0) {
        return Err(r.err("workers", "must be >= 1"));
    }
    Ok(McSpec { replicates, seed: r.u64_opt("seed")?, workers })
}

fn parse_pdf(root: &Table) -> Result<PdfSpec> {
    let r = Reader::new(root, "pdf")?;
    r.deny_unknown(&["samples", "bins", "grid_points"])?;
    let spec = PdfSpec {
        samples: r.u64_opt("samples")?.unwrap_or(100_000),
        bins: r.u64_opt("bins")?.unwrap_or(60) as usize,
        grid_points: r.u64_opt("grid_points")?.unwrap_or(500) as usize,
    };
    if spec.samples == 0 {
        return Err(r.err("samples", "must be >= 1"));
    }
    if spec.bins < 2 {
        return Err(r.err("bins", "must be >= 2"));
    }
    if spec.grid_points < 2 {
        return Err(r.err("grid_points", "must be >= 2"));
    }
    Ok(spec)
}

fn parse_sweep(root: &Table) -> Result<Option<SweepSpec>> {
    let r = Reader::new(root, "sweep")?;
    if !r.present() {
        return Ok(None);
    }
    r.deny_unknown(&["l_min", "l_max", "n_points"])?;
    let spec = SweepSpec {
        l_min: r.f64_req("l_min")?,
        l_max: r.f64_req("l_max")?,
        n_points: r.u64_opt("n_points")?.ok_or_else(|| r.err("n_points", "required"))? as usize,
    };
    spec.validate()?;
    Ok(Some(spec))
}

fn parse_numerics(root: &Table) -> Result<QuadratureSpec> {
    let r = Reader::new(root, "numerics")?;
    r.deny_unknown(&["abs_tol", "rel_tol", "max_subdivisions"])?;
    let d = QuadratureSpec::default();
    let spec = QuadratureSpec {
        abs_tol: r.f64_opt("abs_tol")?.unwrap_or(d.abs_tol),
        rel_tol: r.f64_opt("rel_tol")?.unwrap_or(d.rel_tol),
        max_subdivisions: r.u64_opt("max_subdivisions")?.map_or(d.max_subdivisions, |v| v as usize),
    };
    spec.validate().map_err(|e| CliError::Config(format!("numerics: {e}")))?;
    Ok(spec)
}
