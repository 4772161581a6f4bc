//! The `pdf` and `pd2d-sweep` commands and their manifests.

use std::fs;
use std::path::{Path, PathBuf};

use aerial_d2d::modeselect::{p_d2d, r_bar_th, Scheme};
use aerial_d2d::montecarlo::{distance_histogram, estimate_p_d2d, EstimateWithCI, ExperimentConfig, Histogram};
use aerial_d2d::nearestdist::{evaluation_grid, pdf_approx, pdf_exact};
use toml::{Table, Value};

use crate::config::RunConfig;
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Options shared by the file-producing commands.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfRow {
    pub r: f64,
    pub exact: f64,
    pub approx: f64,
    pub hist_density: f64,
    pub hist_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdfReport {
    pub rows: Vec<PdfRow>,
    pub histogram: Histogram,
    /// Mean |pdf_exact − pdf_approx| over the grid.
    pub mae: f64,
}

impl PdfReport {
    pub fn summary(&self) -> String {
        format!(
            "mean |pdf_exact - pdf_approx| over {} grid points: {:e} 1/m",
            self.rows.len(),
            self.mae
        )
    }
}

pub fn compute_pdf(cfg: &RunConfig, seed: u64, workers: usize) -> Result<PdfReport> {
    let altitude = cfg.deployment.altitude()?;
    let dep = cfg.deployment.at_altitude(altitude)?;
    let params = dep.distance_params().map_err(|e| CliError::numeric("deployment", e))?;
    let histogram = distance_histogram(&dep, cfg.pdf.samples, seed, workers, cfg.pdf.bins)
        .map_err(|e| CliError::numeric("histogram", e))?;
    let rows = evaluation_grid(params.lambda_retained, altitude, cfg.pdf.grid_points)
        .into_iter()
        .map(|r| {
            let exact = pdf_exact(r, &params, &cfg.numerics).map_err(|e| CliError::numeric(format!("pdf_exact at r = {r}"), e))?;
            let bin = histogram.bin_of(r);
            Ok(PdfRow {
                r,
                exact,
                approx: pdf_approx(r, params.lambda_retained, altitude),
                hist_density: bin.map_or(0.0, |b| b.density),
                hist_stderr: bin.map_or(0.0, |b| b.stderr),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mae = rows.iter().map(|row| (row.exact - row.approx).abs()).sum::<f64>() / rows.len() as f64;
    Ok(PdfReport { rows, histogram, mae })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub altitude: f64,
    pub p_d2d_analytic: f64,
    pub mc: Option<EstimateWithCI>,
    pub d_bar_th: f64,
    pub r_bar_th: f64,
    pub scheme: Scheme,
    pub environment: String,
    pub rss_th_dbm: f64,
}

/// One row per (environment, scheme, RSS threshold, altitude). Every Monte
/// Carlo estimate reuses the run seed, so curves share random numbers.
pub fn compute_sweep(cfg: &RunConfig, seed: u64, workers: usize, with_mc: bool) -> Result<Vec<SweepRow>> {
    let envs = cfg.env()?.profiles();
    let carrier = cfg.carrier()?;
    let power = cfg.power()?;
    let p_assoc = cfg.association_probability()?;
    let sweep = cfg.sweep()?;
    let a_dd = carrier.free_space_gain();
    let mut rows = Vec::new();
    for (env_name, env) in &envs {
        for &scheme in &cfg.scheme.kinds {
            for &th in &power.rss_th_dbm {
                let pw = power.at_threshold(th)?;
                let r_bar = r_bar_th(&pw, a_dd, env.alpha);
                for altitude in sweep.altitudes() {
                    let exp = ExperimentConfig {
                        deployment: cfg.deployment.at_altitude(altitude)?,
                        env: *env,
                        carrier,
                        power: pw,
                        scheme,
                        association_probability: p_assoc,
                        n_replicates: cfg.mc.replicates,
                        base_seed: seed,
                        worker_count: workers,
                    };
                    let context = || format!("{env_name} {scheme} rss_th={th} dBm L={altitude} m");
                    let d_bar = exp.avg_dth().map_err(|e| CliError::numeric(context(), e))?;
                    let analytic = p_d2d(d_bar, &exp.scheme_config(), &pw, a_dd, env.alpha);
                    let mc = if with_mc {
                        Some(estimate_p_d2d(&exp).map_err(|e| CliError::numeric(context(), e))?)
                    } else {
                        None
                    };
                    rows.push(SweepRow {
                        altitude,
                        p_d2d_analytic: analytic,
                        mc,
                        d_bar_th: d_bar,
                        r_bar_th: r_bar,
                        scheme,
                        environment: env_name.clone(),
                        rss_th_dbm: th,
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv { path: path.display().to_string(), source }
}

pub fn write_pdf_csv(path: &Path, report: &PdfReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["r_m", "pdf_exact", "pdf_approx", "hist_density", "hist_stderr"])
        .map_err(csv_err(path))?;
    for row in &report.rows {
        w.write_record([num(row.r), num(row.exact), num(row.approx), num(row.hist_density), num(row.hist_stderr)])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record([
        "L_m",
        "p_d2d_analytic",
        "p_d2d_mc_mean",
        "p_d2d_mc_stderr",
        "d_bar_th_m",
        "r_bar_th_m",
        "scheme",
        "environment",
        "rss_th_dbm",
    ])
    .map_err(csv_err(path))?;
    for row in rows {
        let (mean, se) = match row.mc {
            Some(e) => (num(e.mean), num(e.std_error)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            num(row.altitude),
            num(row.p_d2d_analytic),
            mean,
            se,
            num(row.d_bar_th),
            num(row.r_bar_th),
            row.scheme.name().to_owned(),
            row.environment.clone(),
            num(row.rss_th_dbm),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// `<out>.manifest.toml`
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.toml");
    out.with_file_name(name)
}

/// Writes the resolved configuration plus a `[manifest]` table. The file
/// loads as a config and reproduces the output exactly.
pub fn write_manifest(cfg: &RunConfig, command: &str, opts: &RunOptions, extra: Table) -> Result<PathBuf> {
    let mut root = cfg.to_table();
    let mut m = Table::new();
    m.insert("command".into(), command.into());
    m.insert("config_path".into(), opts.config.display().to_string().into());
    m.insert("output".into(), opts.out.display().to_string().into());
    m.insert("tool_version".into(), TOOL_VERSION.into());
    m.insert("base_seed".into(), Value::Integer(cfg.mc.seed.unwrap_or(0) as i64));
    if let Some(w) = cfg.power_watts_table() {
        m.insert("power_watts".into(), w.into());
    }
    if let Ok(mhcp) = cfg.deployment.mhcp() {
        let mut d = Table::new();
        d.insert("lambda_parent".into(), mhcp.lambda_parent.into());
        d.insert("lambda_retained".into(), mhcp.retained_density().into());
        m.insert("derived".into(), d.into());
    }
    m.extend(extra);
    root.insert("manifest".into(), m.into());
    let path = manifest_path(&opts.out);
    fs::write(&path, root.to_string())
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    Ok(path)
}

/// Runs `pdf`; returns the summary line.
pub fn run_pdf(opts: &RunOptions) -> Result<String> {
    let mut cfg = RunConfig::load(&opts.config)?;
    let seed = cfg.resolve_seed(opts.seed)?;
    let workers = cfg.resolve_workers(opts.workers)?;
    let report = compute_pdf(&cfg, seed, workers)?;
    write_pdf_csv(&opts.out, &report)?;
    let mut extra = Table::new();
    extra.insert("mae_exact_vs_approx".into(), report.mae.into());
    extra.insert("empty_realizations".into(), Value::Integer(report.histogram.empty_realizations as i64));
    write_manifest(&cfg, "pdf", opts, extra)?;
    Ok(report.summary())
}

/// Runs `pd2d-sweep`; returns a one-line summary.
pub fn run_sweep(opts: &RunOptions, with_mc: bool) -> Result<String> {
    let mut cfg = RunConfig::load(&opts.config)?;
    let seed = cfg.resolve_seed(opts.seed)?;
    let workers = cfg.resolve_workers(opts.workers)?;
    let rows = compute_sweep(&cfg, seed, workers, with_mc)?;
    write_sweep_csv(&opts.out, &rows)?;
    let mut extra = Table::new();
    extra.insert("monte_carlo".into(), with_mc.into());
    write_manifest(&cfg, "pd2d-sweep", opts, extra)?;
    Ok(format!("wrote {} rows to {}", rows.len(), opts.out.display()))
}
