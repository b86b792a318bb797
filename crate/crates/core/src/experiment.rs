//! Batch harness: sweeps a grid of generator settings, evaluates the
//! requested policies on every generated instance and emits one CSV row per
//! (instance, policy).
//!
//! Config files are TOML:
//!
//! ```toml
//! n = [50]            # one grid axis; a list of target counts
//! m = 10              # or: n_over_m = 5.0
//! rho = [0.0, 0.5, 1.0]
//! lambda = 100
//! phi = [10, 50, 100]
//! include_zero_sum = true
//! runs = 50
//! master_seed = 1
//! policies = ["sse", "optimal", "qr"]
//! ```

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gen::{generate_instance, substream_seed, GenConfig};
use crate::policy::{
    eop_with, qr_policy_from, sse_policy_from, OptimalPolicySolver, SseTable, DEFAULT_PHIS,
};

pub const CSV_HEADER: [&str; 9] = [
    "seed",
    "n",
    "m",
    "lambda",
    "rho",
    "policy",
    "phi",
    "eop",
    "wall_time_ms",
];

/// Environment variable capping harness parallelism (0 = all cores).
pub const THREADS_ENV: &str = "SSG_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Sse,
    Optimal,
    Qr,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Sse => "sse",
            PolicyKind::Optimal => "optimal",
            PolicyKind::Qr => "qr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: Vec<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub n_over_m: Option<f64>,
    pub rho: Vec<f64>,
    pub lambda: usize,
    #[serde(default = "default_phis")]
    pub phi: Vec<f64>,
    #[serde(default = "default_true")]
    pub include_zero_sum: bool,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_policies")]
    pub policies: Vec<PolicyKind>,
    #[serde(default)]
    pub payoff_low: f64,
    #[serde(default = "default_high")]
    pub payoff_high: f64,
    /// Bisection width for the optimal policy.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Record wall-clock times; disable for byte-reproducible output.
    #[serde(default = "default_true")]
    pub timing: bool,
}

fn default_phis() -> Vec<f64> {
    DEFAULT_PHIS.to_vec()
}
fn default_true() -> bool {
    true
}
fn default_runs() -> usize {
    50
}
fn default_policies() -> Vec<PolicyKind> {
    vec![PolicyKind::Sse, PolicyKind::Optimal, PolicyKind::Qr]
}
fn default_high() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    1e-6
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if self.n.is_empty() || self.rho.is_empty() {
            return bad("grids for n and rho must be non-empty");
        }
        if self.runs < 1 {
            return bad("runs must be at least 1");
        }
        if self.policies.is_empty() {
            return bad("no policies requested");
        }
        if self.policies.contains(&PolicyKind::Qr) && self.phi.is_empty() {
            return bad("qr policy requested without phi values");
        }
        if self.phi.iter().any(|&p| p.is_nan() || p <= 0.0) {
            return bad("phi values must be positive");
        }
        if self.m.is_some() == self.n_over_m.is_some() {
            return bad("give exactly one of m and n_over_m");
        }
        if self.delta.is_nan() || self.delta <= 0.0 {
            return bad("delta must be positive");
        }
        for point in self.grid() {
            point.gen_config(0).validate()?;
        }
        Ok(())
    }

    fn resources_for(&self, n: usize) -> usize {
        match (self.m, self.n_over_m) {
            (Some(m), _) => m,
            (None, Some(ratio)) => ((n as f64 / ratio).round() as usize).max(1),
            (None, None) => unreachable!("validated"),
        }
    }

    /// Grid points in output order: `n` outer, `rho` inner.
    pub fn grid(&self) -> Vec<GridPoint<'_>> {
        self.n
            .iter()
            .flat_map(|&n| {
                self.rho.iter().map(move |&rho| GridPoint {
                    cfg: self,
                    n,
                    m: self.resources_for(n),
                    rho,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridPoint<'a> {
    cfg: &'a ExperimentConfig,
    pub n: usize,
    pub m: usize,
    pub rho: f64,
}

impl GridPoint<'_> {
    fn gen_config(&self, seed: u64) -> GenConfig {
        GenConfig {
            n: self.n,
            m: self.m,
            lambda: self.cfg.lambda,
            rho: self.rho,
            seed,
            include_zero_sum: self.cfg.include_zero_sum,
            payoff_low: self.cfg.payoff_low,
            payoff_high: self.cfg.payoff_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub lambda: usize,
    pub rho: f64,
    /// Policy name, suffixed `!error` when the evaluation failed.
    pub policy: String,
    pub phi: Option<f64>,
    pub eop: Option<f64>,
    pub wall_time_ms: Option<f64>,
}

impl ResultRow {
    pub fn is_error(&self) -> bool {
        self.policy.ends_with("!error")
    }

    fn record(&self) -> [String; 9] {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.seed.to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.lambda.to_string(),
            self.rho.to_string(),
            self.policy.clone(),
            opt(self.phi),
            opt(self.eop),
            self.wall_time_ms
                .map(|t| format!("{t:.3}"))
                .unwrap_or_default(),
        ]
    }
}

/// Runs the whole sweep. Rows come back ordered by (grid point, run,
/// policy) regardless of how work was scheduled.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;

    let grid = cfg.grid();
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..cfg.runs).map(move |r| (g, r)))
        .collect();
    let rows: Vec<Vec<ResultRow>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(g, run)| {
                evaluate_instance(cfg, &grid[g], substream_seed(cfg.master_seed, run as u64))
            })
            .collect()
    });
    Ok(rows.into_iter().flatten().collect())
}

/// Evaluates every requested policy on one generated instance. SSEs are
/// computed once up front and excluded from the recorded times.
pub fn evaluate_instance(
    cfg: &ExperimentConfig,
    point: &GridPoint<'_>,
    seed: u64,
) -> Vec<ResultRow> {
    let row = |policy: String, phi: Option<f64>, eop: Option<f64>, ms: Option<f64>| ResultRow {
        seed,
        n: point.n,
        m: point.m,
        lambda: cfg.lambda,
        rho: point.rho,
        policy,
        phi,
        eop,
        wall_time_ms: ms.filter(|_| cfg.timing),
    };

    let mut slots: Vec<(PolicyKind, Option<f64>)> = Vec::new();
    for &kind in &cfg.policies {
        match kind {
            PolicyKind::Qr => slots.extend(cfg.phi.iter().map(|&p| (kind, Some(p)))),
            _ => slots.push((kind, None)),
        }
    }

    let prepared = generate_instance(&point.gen_config(seed))
        .and_then(|(game, types)| SseTable::compute(&game, &types).map(|sse| (game, types, sse)));
    let (game, types, sse) = match prepared {
        Ok(p) => p,
        Err(_) => {
            return slots
                .into_iter()
                .map(|(k, phi)| row(format!("{}!error", k.name()), phi, None, None))
                .collect()
        }
    };

    slots
        .into_iter()
        .map(|(kind, phi)| {
            let start = Instant::now();
            let result = match kind {
                PolicyKind::Sse => eop_with(&sse_policy_from(&sse), &game, &types, &sse),
                PolicyKind::Optimal => {
                    let solver = OptimalPolicySolver::with_sse(&game, &types, sse.clone());
                    solver
                        .maximize(cfg.delta)
                        .and_then(|(policy, _)| eop_with(&policy, &game, &types, &sse))
                }
                PolicyKind::Qr => {
                    qr_policy_from(&game, &types, &sse, phi.expect("qr slots carry phi"))
                        .and_then(|policy| eop_with(&policy, &game, &types, &sse))
                }
            };
            let ms = start.elapsed().as_secs_f64() * 1e3;
            match result {
                Ok(report) => row(kind.name().to_string(), phi, Some(report.overall), Some(ms)),
                Err(_) => row(format!("{}!error", kind.name()), phi, None, Some(ms)),
            }
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Mean EoP per (grid point, policy, phi) over non-error rows, in first-seen
/// order.
pub fn summarize(rows: &[ResultRow]) -> Vec<Summary> {
    let mut out: Vec<Summary> = Vec::new();
    for r in rows.iter().filter(|r| !r.is_error()) {
        let Some(eop) = r.eop else { continue };
        let key = |s: &Summary| {
            s.n == r.n && s.m == r.m && s.rho == r.rho && s.policy == r.policy && s.phi == r.phi
        };
        match out.iter_mut().find(|s| key(s)) {
            Some(s) => {
                s.count += 1;
                s.mean_eop += (eop - s.mean_eop) / s.count as f64;
            }
            None => out.push(Summary {
                n: r.n,
                m: r.m,
                rho: r.rho,
                policy: r.policy.clone(),
                phi: r.phi,
                mean_eop: eop,
                count: 1,
            }),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub m: usize,
    pub rho: f64,
    pub policy: String,
    pub phi: Option<f64>,
    pub mean_eop: f64,
    pub count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(runs: usize) -> ExperimentConfig {
        ExperimentConfig::from_toml(&format!(
            r#"
            n = [6]
            m = 2
            rho = [0.0, 1.0]
            lambda = 4
            phi = [10.0]
            runs = {runs}
            master_seed = 7
            timing = false
            "#
        ))
        .unwrap()
    }

    #[test]
    fn row_count_and_order() {
        let cfg = small(3);
        let rows = run_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 2 * 3 * 3);
        assert_eq!(rows[0].policy, "sse");
        assert_eq!(rows[1].policy, "optimal");
        assert_eq!(rows[2].policy, "qr");
        assert_eq!(rows[2].phi, Some(10.0));
        assert!(rows.iter().take(9).all(|r| r.rho == 0.0));
        assert!(rows.iter().all(|r| !r.is_error()));
    }

    #[test]
    fn single_point_single_run() {
        let mut cfg = small(1);
        cfg.rho = vec![0.5];
        cfg.policies = vec![PolicyKind::Sse, PolicyKind::Optimal];
        assert_eq!(run_experiment(&cfg).unwrap().len(), 2);
    }

    #[test]
    fn zero_sum_grid_point_is_fully_efficient() {
        let rows = run_experiment(&small(2)).unwrap();
        for r in rows.iter().filter(|r| r.rho == 1.0) {
            assert!((r.eop.unwrap() - 1.0).abs() < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn csv_is_reproducible() {
        let cfg = small(2);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&run_experiment(&cfg).unwrap(), &mut a).unwrap();
        write_csv(&run_experiment(&cfg).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("seed,n,m,lambda,rho,policy,phi,eop,wall_time_ms\n"));
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::from_toml("n = [5]\nm = 1\nrho = []\nlambda = 2").is_err());
        assert!(ExperimentConfig::from_toml("n = [5]\nrho = [0.5]\nlambda = 2").is_err());
        assert!(ExperimentConfig::from_toml(
            "n = [5]\nm = 1\nn_over_m = 5.0\nrho = [0.5]\nlambda = 2"
        )
        .is_err());
        assert!(ExperimentConfig::from_toml("n = [5]\nm = 5\nrho = [0.5]\nlambda = 2").is_err());
        assert!(
            ExperimentConfig::from_toml("n = [5]\nm = 1\nrho = [0.5]\nlambda = 2\nruns = 0")
                .is_err()
        );
        assert!(
            ExperimentConfig::from_toml("n = [5]\nm = 1\nrho = [0.5]\nlambda = 2\nbogus = 1")
                .is_err()
        );
        let cfg =
            ExperimentConfig::from_toml("n = [10, 20]\nn_over_m = 5.0\nrho = [0.5]\nlambda = 2")
                .unwrap();
        let ms: Vec<usize> = cfg.grid().iter().map(|p| p.m).collect();
        assert_eq!(ms, vec![2, 4]);
        assert_eq!(cfg.runs, 50);
    }

    #[test]
    fn summaries_average_runs() {
        let rows = run_experiment(&small(3)).unwrap();
        let s = summarize(&rows);
        assert_eq!(s.len(), 6);
        assert!(s.iter().all(|s| s.count == 3));
    }
}
