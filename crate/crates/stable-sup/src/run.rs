//! Command-line front end: configuration, deterministic parallel runs, and
//! CSV/JSON emission.
//!
//! The contract that matters here is reproducibility: identical config and
//! seed produce byte-identical output files for any worker count. Every
//! random quantity is drawn from a per-sample sub-stream indexed by its row
//! or grid position, so parallelism changes scheduling but never values,
//! and rows are written in index order. Floats are printed in shortest
//! round-trip form — the file is an exact record of what was computed.
//!
//! Configuration is layered: defaults, then an optional `key=value` file
//! (`--config`), then explicit flags. The seed is always echoed (into the
//! JSON for `verify`, as a `seed=…` line otherwise) so an unseeded run can
//! be replayed.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::RngCore;

use crate::bounds::{refl_bound, BoundQuery};
use crate::chi::simulate_joint;
use crate::error::{Error, Result};
use crate::estimator::{decay_rate_check, estimate_density_grid, EstimatorOptions};
use crate::params::StableParams;
use crate::verify::{run_suite, Suite};

/// Extra decay-rate margin allowed over the theoretical ceiling before
/// `rate-check` reports failure; matches the acceptance tolerance.
const RATE_MARGIN: f64 = 0.05;

#[derive(Parser)]
#[command(
    name = "stable-sup",
    about = "Simulate and verify the joint law of a stable process and its supremum",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw (X_T, sup) pairs from the stick-breaking approximation
    Sample(CommonArgs),
    /// Estimate the joint density (or a higher mixed derivative) on a grid
    DensityGrid(CommonArgs),
    /// Evaluate the closed-form density bound envelope on a grid
    BoundsGrid(CommonArgs),
    /// Run a verification suite and emit a JSON report
    Verify(CommonArgs),
    /// Estimate per-level decay of the telescoped series against its ceiling
    RateCheck(CommonArgs),
}

/// The flag set shared by every subcommand, before defaulting.
#[derive(Args, Clone, Default)]
pub struct CommonArgs {
    /// stability index in (0,2); 1 selects Cauchy mode
    #[arg(long)]
    alpha: Option<f64>,
    /// positivity parameter P(X_1 > 0)
    #[arg(long)]
    rho: Option<f64>,
    /// time horizon
    #[arg(long = "T")]
    t: Option<f64>,
    /// remainder decay rate; defaults to the smallest admissible value
    #[arg(long)]
    kappa: Option<f64>,
    /// base truncation level
    #[arg(long)]
    n0: Option<usize>,
    /// number of telescoped tail levels
    #[arg(long = "J")]
    tail_levels: Option<usize>,
    /// Monte Carlo samples (per grid point / per level)
    #[arg(long = "N")]
    samples: Option<usize>,
    /// derivative orders "k+,k-"
    #[arg(long)]
    orders: Option<String>,
    /// grid axis "start:stop:count[:log]", optionally prefixed "pm:" or
    /// "xsup:"; repeat for distinct x/y axes
    #[arg(long)]
    grid: Vec<String>,
    /// RNG seed; generated and echoed when absent
    #[arg(long)]
    seed: Option<u64>,
    /// worker threads (0 = all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// verification suite: fast, full, appendix, ibp, rates
    #[arg(long)]
    suite: Option<String>,
    /// populate per-check runtimes in the verify report
    #[arg(long)]
    timings: bool,
    /// key=value config file; explicit flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Coordinate system of a grid: the reflected pair (x₊, x₋) or the raw
/// endpoint/supremum pair (x_T, sup).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coords {
    PlusMinus,
    XSup,
}

/// One grid axis, linearly or logarithmically spaced.
#[derive(Debug, Clone, Copy)]
pub struct GridAxis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl GridAxis {
    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.start];
        }
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

/// Parse "start:stop:count[:log]" with an optional "pm:"/"xsup:" prefix.
fn parse_grid_axis(spec: &str) -> Result<(Option<Coords>, GridAxis)> {
    let bad = || Error::Config(format!("bad grid spec {spec:?}, want start:stop:count[:log]"));
    let mut parts: Vec<&str> = spec.split(':').collect();
    let coords = match parts.first() {
        Some(&"pm") => {
            parts.remove(0);
            Some(Coords::PlusMinus)
        }
        Some(&"xsup") => {
            parts.remove(0);
            Some(Coords::XSup)
        }
        _ => None,
    };
    let log = match parts.last() {
        Some(&"log") => {
            parts.pop();
            true
        }
        Some(&"lin") => {
            parts.pop();
            false
        }
        _ => false,
    };
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(Error::Config(format!("grid {spec:?} must be finite with count >= 1")));
    }
    if log && (start <= 0.0 || stop <= 0.0) {
        return Err(Error::Config(format!("log grid {spec:?} needs positive endpoints")));
    }
    Ok((coords, GridAxis { start, stop, count, log }))
}

/// A fully resolved run configuration: validated parameters plus estimator,
/// grid, and output settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: StableParams,
    pub kappa: f64,
    pub n0: usize,
    pub tail_levels: usize,
    pub samples: usize,
    pub orders: (u32, u32),
    pub coords: Coords,
    pub grid: Vec<GridAxis>,
    pub seed: u64,
    pub seed_was_given: bool,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub suite: Option<String>,
    pub timings: bool,
}

fn parse_orders(s: &str) -> Result<(u32, u32)> {
    let err = || Error::Config(format!("bad orders {s:?}, want \"k+,k-\" with k >= 1"));
    let (a, b) = s.split_once(',').ok_or_else(err)?;
    let kp: u32 = a.trim().parse().map_err(|_| err())?;
    let km: u32 = b.trim().parse().map_err(|_| err())?;
    if kp == 0 || km == 0 {
        return Err(err());
    }
    Ok((kp, km))
}

impl CommonArgs {
    /// Layer `other` (typically file values) underneath self: every field
    /// absent here is taken from `other`.
    fn or(mut self, other: CommonArgs) -> CommonArgs {
        self.alpha = self.alpha.or(other.alpha);
        self.rho = self.rho.or(other.rho);
        self.t = self.t.or(other.t);
        self.kappa = self.kappa.or(other.kappa);
        self.n0 = self.n0.or(other.n0);
        self.tail_levels = self.tail_levels.or(other.tail_levels);
        self.samples = self.samples.or(other.samples);
        self.orders = self.orders.or(other.orders);
        if self.grid.is_empty() {
            self.grid = other.grid;
        }
        self.seed = self.seed.or(other.seed);
        self.workers = self.workers.or(other.workers);
        self.out = self.out.or(other.out);
        self.suite = self.suite.or(other.suite);
        self.timings |= other.timings;
        self
    }
}

/// Parse one `key=value` per line; `#` comments and blank lines ignored.
/// Keys match the long flag names.
fn parse_config_file(path: &PathBuf) -> Result<CommonArgs> {
    let text = std::fs::read_to_string(path)?;
    let mut args = CommonArgs::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let parse_err = |what: &str| {
            Error::Config(format!("{}:{}: bad {what} value {value:?}", path.display(), lineno + 1))
        };
        match key {
            "alpha" => args.alpha = Some(value.parse().map_err(|_| parse_err("alpha"))?),
            "rho" => args.rho = Some(value.parse().map_err(|_| parse_err("rho"))?),
            "T" => args.t = Some(value.parse().map_err(|_| parse_err("T"))?),
            "kappa" => args.kappa = Some(value.parse().map_err(|_| parse_err("kappa"))?),
            "n0" => args.n0 = Some(value.parse().map_err(|_| parse_err("n0"))?),
            "J" => args.tail_levels = Some(value.parse().map_err(|_| parse_err("J"))?),
            "N" => args.samples = Some(value.parse().map_err(|_| parse_err("N"))?),
            "orders" => args.orders = Some(value.to_string()),
            "grid" => args.grid = value.split(';').map(|s| s.trim().to_string()).collect(),
            "seed" => args.seed = Some(value.parse().map_err(|_| parse_err("seed"))?),
            "workers" => args.workers = Some(value.parse().map_err(|_| parse_err("workers"))?),
            "out" => args.out = Some(PathBuf::from(value)),
            "suite" => args.suite = Some(value.to_string()),
            "timings" => args.timings = value.parse().map_err(|_| parse_err("timings"))?,
            other => {
                return Err(Error::Config(format!(
                    "{}:{}: unknown key {other:?}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(args)
}

impl RunConfig {
    /// Resolve flags + optional config file + defaults into a validated
    /// configuration. Every error here is a usage error.
    pub fn resolve(args: &CommonArgs) -> Result<RunConfig> {
        let mut merged = args.clone();
        if let Some(path) = &args.config {
            merged = merged.or(parse_config_file(path)?);
        }
        let alpha = merged.alpha.unwrap_or(1.5);
        let rho = merged.rho.unwrap_or(0.5);
        let t = merged.t.unwrap_or(1.0);
        let params = StableParams::new(alpha, rho, t)?;
        let kappa = match merged.kappa {
            Some(k) => {
                params.check_kappa(k)?;
                k
            }
            None => params.default_kappa(),
        };
        let orders = match &merged.orders {
            Some(s) => parse_orders(s)?,
            None => (1, 1),
        };
        let mut coords = None;
        let mut grid = Vec::new();
        for spec in &merged.grid {
            let (c, axis) = parse_grid_axis(spec)?;
            if let Some(c) = c {
                if *coords.get_or_insert(c) != c {
                    return Err(Error::Config("grid axes disagree on coordinate system".into()));
                }
            }
            grid.push(axis);
        }
        if grid.len() > 2 {
            return Err(Error::Config("at most two grid axes".into()));
        }
        let (seed, seed_was_given) = match merged.seed {
            Some(s) => (s, true),
            None => (rand::rngs::OsRng.next_u64(), false),
        };
        Ok(RunConfig {
            params,
            kappa,
            n0: merged.n0.unwrap_or(4),
            tail_levels: merged.tail_levels.unwrap_or(12),
            samples: merged.samples.unwrap_or(100_000),
            orders,
            coords: coords.unwrap_or(Coords::PlusMinus),
            grid,
            seed,
            seed_was_given,
            workers: merged.workers.unwrap_or(0),
            out: merged.out.clone(),
            suite: merged.suite.clone(),
            timings: merged.timings,
        })
    }

    /// The resolved two-axis grid; a single spec serves both axes, no spec
    /// is an error for grid commands.
    fn grid_points(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        match self.grid.len() {
            0 => Err(Error::Config("grid commands need --grid start:stop:count[:log]".into())),
            1 => Ok((self.grid[0].points(), self.grid[0].points())),
            _ => Ok((self.grid[0].points(), self.grid[1].points())),
        }
    }

    fn estimator_options(&self) -> EstimatorOptions {
        EstimatorOptions {
            n0: self.n0,
            tail_levels: self.tail_levels,
            samples: self.samples,
            workers: self.workers,
            seed: self.seed,
            stratify_s1: false,
        }
    }
}

/// Shortest round-trip decimal form — the written value re-parses to the
/// exact bits that were computed.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Write the data stream to `--out` or stdout, and the metadata lines
/// (seed echo plus any command summary) to the other channel so the data
/// stays machine-readable either way.
fn write_output(config: &RunConfig, content: &str, meta: &[String]) -> Result<()> {
    let mut meta_lines = vec![format!("seed={}", config.seed)];
    if !config.seed_was_given {
        meta_lines.push(format!("note=seed was generated; pass --seed {} to replay", config.seed));
    }
    meta_lines.extend_from_slice(meta);
    match &config.out {
        Some(path) => {
            std::fs::write(path, content)?;
            for line in meta_lines {
                println!("{line}");
            }
        }
        None => {
            print!("{content}");
            for line in meta_lines {
                eprintln!("{line}");
            }
        }
    }
    Ok(())
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool")
            .install(f)
    }
}

/// `sample`: N rows of (x_T, sup) at truncation depth n0 + J.
pub fn cmd_sample(config: &RunConfig) -> Result<String> {
    use rayon::prelude::*;
    let depth = config.n0 + config.tail_levels;
    let p = &config.params;
    let rows: Vec<(f64, f64)> = in_pool(config.workers, || {
        (0..config.samples)
            .into_par_iter()
            .map(|i| simulate_joint(p, config.kappa, depth, config.seed, i as u64))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut out = String::from("x_t,sup\n");
    for (x, s) in rows {
        let _ = writeln!(out, "{},{}", fmt_f64(x), fmt_f64(s));
    }
    Ok(out)
}

/// Map a grid point to reflected coordinates; `None` marks points outside
/// the support {sup > max(x_T, 0)}, whose density is identically zero.
fn to_plus_minus(coords: Coords, a: f64, b: f64) -> Option<(f64, f64)> {
    match coords {
        Coords::PlusMinus => Some((a, b)),
        Coords::XSup => (b > a.max(0.0)).then_some((b, b - a)),
    }
}

/// `density-grid`: one row per grid point, row-major over (axis0, axis1).
pub fn cmd_density_grid(config: &RunConfig) -> Result<String> {
    let (xs, ys) = config.grid_points()?;
    let mut points = Vec::new();
    let mut mapped = Vec::with_capacity(xs.len() * ys.len());
    for &a in &xs {
        for &b in &ys {
            let pm = to_plus_minus(config.coords, a, b);
            if let Some(pt) = pm {
                if pt.0 <= 0.0 || pt.1 <= 0.0 {
                    return Err(Error::Config(format!(
                        "density grid point ({a}, {b}) is not interior to the support"
                    )));
                }
                points.push(pt);
            }
            mapped.push((a, b, pm));
        }
    }
    let estimates = if points.is_empty() {
        Vec::new()
    } else {
        estimate_density_grid(
            &points,
            config.orders,
            &config.params,
            config.kappa,
            &config.estimator_options(),
        )?
    };
    let header = match config.coords {
        Coords::PlusMinus => "x_plus,x_minus,estimate,stderr",
        Coords::XSup => "x_t,sup,estimate,stderr",
    };
    let mut out = String::from(header);
    out.push('\n');
    let mut next = estimates.iter();
    for (a, b, pm) in mapped {
        let (value, stderr) = match pm {
            Some(_) => {
                let e = next.next().expect("estimate per interior point");
                (e.value, e.stderr)
            }
            None => (0.0, 0.0),
        };
        let _ = writeln!(out, "{},{},{},{}", fmt_f64(a), fmt_f64(b), fmt_f64(value), fmt_f64(stderr));
    }
    Ok(out)
}

/// `bounds-grid`: the closed-form envelope at each grid point.
pub fn cmd_bounds_grid(config: &RunConfig) -> Result<String> {
    let (xs, ys) = config.grid_points()?;
    let q = BoundQuery::new(&config.params, config.orders)?;
    let header = match config.coords {
        Coords::PlusMinus => "x_plus,x_minus,bound",
        Coords::XSup => "x_t,sup,bound",
    };
    let mut out = String::from(header);
    out.push('\n');
    for &a in &xs {
        for &b in &ys {
            let bound = match to_plus_minus(config.coords, a, b) {
                Some((xp, xm)) if xp > 0.0 && xm > 0.0 => refl_bound(&q, xp, xm),
                _ => 0.0,
            };
            let _ = writeln!(out, "{},{},{}", fmt_f64(a), fmt_f64(b), fmt_f64(bound));
        }
    }
    Ok(out)
}

/// `verify`: run the selected suite, emit the JSON report, and fail the
/// process if any check failed.
pub fn cmd_verify(config: &RunConfig) -> Result<(String, bool)> {
    let suite: Suite = config
        .suite
        .as_deref()
        .ok_or_else(|| Error::Config("verify needs --suite (fast, full, appendix, ibp, rates)".into()))?
        .parse()
        .map_err(Error::Config)?;
    let checks = run_suite(suite, config.seed, config.timings);
    let all_passed = checks.iter().all(|c| c.passed());
    let report = serde_json::json!({
        "suite": format!("{suite:?}").to_lowercase(),
        "seed": config.seed,
        "checks": checks,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("report serialization");
    text.push('\n');
    Ok((text, all_passed))
}

/// `rate-check`: per-level decay of the telescoped series as CSV, plus a
/// one-line summary comparing the fitted rate to its ceiling; the process
/// fails when the margin is exceeded.
pub fn cmd_rate_check(config: &RunConfig) -> Result<(String, String, bool)> {
    let p = &config.params;
    let alpha_prime = 0.8 * p.alpha();
    let levels = config.n0.max(1)..=(config.n0.max(1) + config.tail_levels.max(1));
    let report = in_pool(config.workers, || {
        decay_rate_check(
            (1.0, 1.0),
            config.orders,
            p,
            config.kappa,
            alpha_prime,
            levels,
            config.samples,
            config.seed,
        )
    })?;
    let mut out = String::from("level,mean_abs,stderr\n");
    for l in &report.levels {
        let _ = writeln!(out, "{},{},{}", l.level, fmt_f64(l.mean_abs), fmt_f64(l.stderr));
    }
    let ok = report.fitted_rate.is_finite() && report.fitted_rate <= report.ceiling + RATE_MARGIN;
    let summary = format!(
        "fitted_rate={} ceiling={} poly_degree={} used_levels={} status={}",
        fmt_f64(report.fitted_rate),
        fmt_f64(report.ceiling),
        fmt_f64(report.poly_degree),
        report.used_levels,
        if ok { "pass" } else { "fail" }
    );
    Ok((out, summary, ok))
}

/// Process entry point behind `main`: 0 ok, 1 check failure, 2 usage error.
pub fn main_entry() -> i32 {
    type Runner = fn(&RunConfig) -> Result<(String, Vec<String>, bool)>;
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, Runner) = match &cli.command {
        Command::Sample(a) => (a, |c| cmd_sample(c).map(|s| (s, vec![], true))),
        Command::DensityGrid(a) => (a, |c| cmd_density_grid(c).map(|s| (s, vec![], true))),
        Command::BoundsGrid(a) => (a, |c| cmd_bounds_grid(c).map(|s| (s, vec![], true))),
        Command::Verify(a) => (a, |c| cmd_verify(c).map(|(s, ok)| (s, vec![], ok))),
        Command::RateCheck(a) => (a, |c| cmd_rate_check(c).map(|(s, sum, ok)| (s, vec![sum], ok))),
    };
    let config = match RunConfig::resolve(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(&config) {
        Ok((content, meta, ok)) => {
            if let Err(e) = write_output(&config, &content, &meta) {
                eprintln!("error: {e}");
                return 2;
            }
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_axis_parsing() {
        let (c, ax) = parse_grid_axis("0.1:4:20").unwrap();
        assert!(c.is_none());
        assert!(!ax.log && ax.count == 20);
        // log with negative endpoint rejected
        assert!(parse_grid_axis("xsup:-2:2:5:log").is_err());
        let (c, ax2) = parse_grid_axis("pm:0.5:8:7:log").unwrap();
        assert_eq!(c, Some(Coords::PlusMinus));
        assert!(ax2.log);
        let pts = ax2.points();
        assert_eq!(pts.len(), 7);
        assert!((pts[0] - 0.5).abs() < 1e-12 && (pts[6] - 8.0).abs() < 1e-12);
        // log spacing: constant ratio
        let r = pts[1] / pts[0];
        for w in pts.windows(2) {
            assert!((w[1] / w[0] - r).abs() < 1e-12);
        }
        assert!(parse_grid_axis("1:2").is_err());
        assert!(parse_grid_axis("a:b:3").is_err());
        assert!(parse_grid_axis("1:2:0").is_err());
    }

    #[test]
    fn orders_and_config_file_layering() {
        assert_eq!(parse_orders("2,1").unwrap(), (2, 1));
        assert!(parse_orders("0,1").is_err());
        assert!(parse_orders("2").is_err());

        let dir = std::env::temp_dir().join("stable-sup-run-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.txt");
        std::fs::write(
            &path,
            "# comment\nalpha = 0.7\nrho=0.6\nN = 500\ngrid = 0.1:1:3 ; 0.2:2:4\nseed=9\n",
        )
        .unwrap();
        let args = CommonArgs {
            rho: Some(0.55),
            config: Some(path.clone()),
            ..CommonArgs::default()
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        // flag wins over file; file fills the rest
        assert_eq!(cfg.params.rho(), 0.55);
        assert_eq!(cfg.params.alpha(), 0.7);
        assert_eq!(cfg.samples, 500);
        assert_eq!(cfg.grid.len(), 2);
        assert_eq!(cfg.grid[1].count, 4);
        assert!(cfg.seed_was_given && cfg.seed == 9);

        std::fs::write(&path, "bogus_key=1\n").unwrap();
        assert!(RunConfig::resolve(&CommonArgs {
            config: Some(path),
            ..CommonArgs::default()
        })
        .is_err());
    }

    #[test]
    fn xsup_points_outside_support_are_zero_density() {
        assert_eq!(to_plus_minus(Coords::XSup, 1.0, 0.5), None);
        assert_eq!(to_plus_minus(Coords::XSup, -1.0, 0.5), Some((0.5, 1.5)));
        assert_eq!(to_plus_minus(Coords::PlusMinus, 0.3, 0.4), Some((0.3, 0.4)));
    }

    #[test]
    fn sample_csv_shape_and_support() {
        let args = CommonArgs {
            alpha: Some(1.5),
            samples: Some(50),
            seed: Some(3),
            tail_levels: Some(6),
            ..CommonArgs::default()
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        let csv = cmd_sample(&cfg).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x_t,sup");
        assert_eq!(lines.len(), 51);
        for line in &lines[1..] {
            let (x, s) = line.split_once(',').unwrap();
            let (x, s): (f64, f64) = (x.parse().unwrap(), s.parse().unwrap());
            assert!(s >= x && s >= 0.0, "sup dominates endpoint: {line}");
        }
        // header-only at N = 0
        let empty = RunConfig::resolve(&CommonArgs {
            samples: Some(0),
            seed: Some(3),
            ..CommonArgs::default()
        })
        .unwrap();
        assert_eq!(cmd_sample(&empty).unwrap(), "x_t,sup\n");
    }
}
