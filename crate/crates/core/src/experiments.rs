//! Seeded Monte Carlo sweeps over `T(h, 1 - q)`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_height, enumerate_rays};
use crate::random::sample_fan_in;
use crate::table::{Cell, Format, Table};

/// How `q` (or `1 - q`) is chosen for each `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QSchedule {
    /// One value per entry of `h_values`.
    Explicit(Vec<f64>),
    /// `min(1, c·h^(-alpha))`
    Power { c: f64, alpha: f64 },
}

/// Whether the schedule drives `q` directly or `1 - q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    #[default]
    QSmall,
    QLarge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl OutputSpec {
    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| Format::from_path(&self.path))
    }
}

/// A Monte Carlo sweep. Fans are drawn from `T(h, 1 - q)`: each ray is dropped with probability `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub h_values: Vec<u32>,
    pub q_schedule: QSchedule,
    #[serde(default)]
    pub regime: Regime,
    pub trials: u32,
    #[serde(default)]
    pub k_list: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_density: Option<f64>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

/// One sweep point: drop probability `q`, inclusion probability `p = 1 - q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub h: u32,
    pub q: f64,
    pub p: f64,
}

impl ExperimentSpec {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parsed = match Format::from_path(path) {
            Format::Json => serde_json::from_str(&text).map_err(|e| e.to_string()),
            Format::Csv => toml::from_str(&text).map_err(|e| e.to_string()),
        };
        let spec: Self = parsed.map_err(|message| Error::Parse { path: path.to_owned(), message })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment specs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.h_values.is_empty() {
            return Err(Error::Config("h_values must not be empty".into()));
        }
        for &h in &self.h_values {
            check_height(h)?;
        }
        match &self.q_schedule {
            QSchedule::Explicit(values) => {
                if values.len() != self.h_values.len() {
                    return Err(Error::Config(format!(
                        "explicit q schedule has {} values for {} heights",
                        values.len(),
                        self.h_values.len()
                    )));
                }
                for &v in values {
                    crate::random::check_probability("scheduled q", v)?;
                }
            }
            QSchedule::Power { c, alpha } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(Error::Config(format!("schedule constant c must be positive, got {c}")));
                }
                if !alpha.is_finite() {
                    return Err(Error::Config(format!("schedule exponent alpha must be finite, got {alpha}")));
                }
            }
        }
        if let Some(&k) = self.k_list.iter().find(|&&k| k == 0) {
            return Err(Error::Config(format!("k_list entries must be at least 1, got {k}")));
        }
        if let Some(c) = self.c_density {
            if !(c > 0.0 && c < 1.0) {
                return Err(Error::Config(format!("c_density must lie in (0, 1), got {c}")));
            }
        }
        Ok(())
    }

    /// The `(h, q)` points in sweep order.
    pub fn points(&self) -> Vec<SweepPoint> {
        self.h_values
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let s = match &self.q_schedule {
                    QSchedule::Explicit(v) => v[i],
                    QSchedule::Power { c, alpha } => (c * f64::from(h).powf(-alpha)).clamp(0.0, 1.0),
                };
                match self.regime {
                    Regime::QSmall => SweepPoint { h, q: s, p: 1.0 - s },
                    Regime::QLarge => SweepPoint { h, q: 1.0 - s, p: s },
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub h: u32,
    pub q: f64,
    pub trial_index: u64,
    pub n_rays_drawn: usize,
    pub n_cones: usize,
    pub smooth: bool,
    /// 0 when the fan has no 2-cones.
    pub max_index: u64,
    /// `None` when the fan has no fixed points.
    pub delta_k: BTreeMap<u64, Option<Ratio<u64>>>,
}

/// Runs every trial of one sweep point. Trial `t` uses stream `first_trial + t`.
pub fn run_trials(
    point: SweepPoint,
    trials: u32,
    k_list: &[u64],
    master_seed: u64,
    first_trial: u64,
) -> Result<Vec<TrialRecord>> {
    let universe = enumerate_rays(point.h)?;
    (0..u64::from(trials))
        .into_par_iter()
        .map(|t| {
            let trial_index = first_trial + t;
            let fan = sample_fan_in(&universe, point.p, master_seed, trial_index)?;
            let spectrum = fan.spectrum();
            let max_index = spectrum.indices.iter().copied().max().unwrap_or(0);
            let smooth = fan.is_smooth();
            if smooth != (max_index <= 1) {
                return Err(Error::Invariant(format!(
                    "trial {trial_index}: smoothness disagrees with max index {max_index}"
                )));
            }
            let delta_k = k_list.iter().map(|&k| spectrum.delta_k(k).map(|d| (k, d))).collect::<Result<_>>()?;
            Ok(TrialRecord {
                h: point.h,
                q: point.q,
                trial_index,
                n_rays_drawn: fan.rays().len(),
                n_cones: fan.n_fixed_points(),
                smooth,
                max_index,
                delta_k,
            })
        })
        .collect()
}

/// Two-sided 99% normal quantile.
const Z_99: f64 = 2.575_829_303_548_901;

/// Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Aggregate of one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub h: u32,
    pub q: f64,
    pub trials: u32,
    pub n_smooth: u64,
    pub frac_smooth: f64,
    pub frac_singular: f64,
    pub wilson_ci_low: f64,
    pub wilson_ci_high: f64,
    /// Trials whose fan has no 2-cones (smooth, `δ_k` undefined).
    pub n_no_cones: u64,
    pub max_index_median: u64,
    pub max_index_p90: u64,
    pub max_index_max: u64,
    /// Mean of `δ_k` over trials where it is defined.
    pub mean_delta_k: BTreeMap<u64, Option<f64>>,
    /// Fraction of all trials with `δ_k` defined and `> c_density`.
    pub frac_delta_k_above_c: BTreeMap<u64, f64>,
}

fn nearest_rank(sorted: &[u64], fraction: f64) -> u64 {
    let rank = ((fraction * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

impl SweepRow {
    pub fn aggregate(point: SweepPoint, records: &[TrialRecord], k_list: &[u64], c_density: f64) -> SweepRow {
        let n = records.len() as u64;
        let n_smooth = records.iter().filter(|r| r.smooth).count() as u64;
        let (wilson_ci_low, wilson_ci_high) = wilson_interval(n_smooth, n, Z_99);
        let mut max_indices: Vec<u64> = records.iter().map(|r| r.max_index).collect();
        max_indices.sort_unstable();
        let mut mean_delta_k = BTreeMap::new();
        let mut frac_delta_k_above_c = BTreeMap::new();
        for &k in k_list {
            let defined: Vec<f64> =
                records.iter().filter_map(|r| r.delta_k[&k].map(|d| *d.numer() as f64 / *d.denom() as f64)).collect();
            let mean = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
            mean_delta_k.insert(k, mean);
            let above = defined.iter().filter(|&&d| d > c_density).count();
            frac_delta_k_above_c.insert(k, above as f64 / n as f64);
        }
        SweepRow {
            h: point.h,
            q: point.q,
            trials: n as u32,
            n_smooth,
            frac_smooth: n_smooth as f64 / n as f64,
            frac_singular: (n - n_smooth) as f64 / n as f64,
            wilson_ci_low,
            wilson_ci_high,
            n_no_cones: records.iter().filter(|r| r.n_cones == 0).count() as u64,
            max_index_median: nearest_rank(&max_indices, 0.5),
            max_index_p90: nearest_rank(&max_indices, 0.9),
            max_index_max: max_indices.last().copied().unwrap_or(0),
            mean_delta_k,
            frac_delta_k_above_c,
        }
    }
}

fn run_sweep(spec: &ExperimentSpec, c_density: f64) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let per_point = u64::from(spec.trials);
    spec.points()
        .into_iter()
        .enumerate()
        .map(|(i, point)| {
            let records = run_trials(point, spec.trials, &spec.k_list, spec.master_seed, i as u64 * per_point)?;
            Ok(SweepRow::aggregate(point, &records, &spec.k_list, c_density))
        })
        .collect()
}

/// Smooth/singular classification of `trials` fans per `(h, q)`.
pub fn run_threshold_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    run_sweep(spec, spec.c_density.unwrap_or(0.0))
}

/// `δ_k > c_density` success rates per `(h, q, k)`.
pub fn run_density_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    let c = spec.c_density.ok_or_else(|| Error::Config("density sweeps require c_density".into()))?;
    if spec.k_list.is_empty() {
        return Err(Error::Config("density sweeps require a non-empty k_list".into()));
    }
    run_sweep(spec, c)
}

/// CSV layout of a threshold sweep.
pub fn threshold_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new([
        "h",
        "q",
        "trials",
        "frac_smooth",
        "frac_singular",
        "wilson_ci_low",
        "wilson_ci_high",
        "n_no_cones",
        "max_index_median",
        "max_index_p90",
        "max_index_max",
    ]);
    for r in rows {
        t.push(vec![
            Cell::from(r.h),
            Cell::from(r.q),
            Cell::from(r.trials),
            Cell::from(r.frac_smooth),
            Cell::from(r.frac_singular),
            Cell::from(r.wilson_ci_low),
            Cell::from(r.wilson_ci_high),
            Cell::from(r.n_no_cones),
            Cell::from(r.max_index_median),
            Cell::from(r.max_index_p90),
            Cell::from(r.max_index_max),
        ]);
    }
    t
}

/// CSV layout of a density sweep, one line per `(h, q, k)`.
pub fn density_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(["h", "q", "k", "trials", "mean_delta_k", "frac_delta_k_above_c", "n_no_cones"]);
    for r in rows {
        for (&k, &frac) in &r.frac_delta_k_above_c {
            t.push(vec![
                Cell::from(r.h),
                Cell::from(r.q),
                Cell::from(k),
                Cell::from(r.trials),
                Cell::from(r.mean_delta_k[&k]),
                Cell::from(frac),
                Cell::from(r.n_no_cones),
            ]);
        }
    }
    t
}
