//! The random fan distribution `T(h, p)`.
//!
//! Each ray of `R_h` is kept independently with probability `p` and the kept
//! rays are completed to a fan.
//!
//! # Stream contract
//!
//! A trial draws from ChaCha8 (`rand_chacha` 0.3) seeded with
//! `seed_from_u64(master_seed)` on stream number `trial_index`. Exactly one
//! `u64` is consumed per ray, in canonical angular order; the ray is kept iff
//! the top 53 bits, read as a fraction in `[0, 1)`, are below `p`. The output
//! therefore depends only on `(h, p, master_seed, trial_index)`. Changing any
//! of this invalidates the golden tests.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fan::{Fan, FanRecord};
use crate::lattice::{enumerate_rays, RayUniverse, RayVec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub h: u32,
    /// Inclusion probability of each ray; `q = 1 - p`.
    pub p: f64,
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        crate::lattice::check_height(self.h)?;
        check_probability("p", self.p)
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")))
    }
}

/// The per-trial decision stream.
pub fn trial_stream(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

fn keep(rng: &mut ChaCha8Rng, p: f64) -> bool {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    ((rng.next_u64() >> 11) as f64 * SCALE) < p
}

/// Samples from an already enumerated universe; the result stays in canonical order.
pub fn sample_rays_in(universe: &RayUniverse, p: f64, master_seed: u64, trial_index: u64) -> Result<Vec<RayVec>> {
    check_probability("p", p)?;
    let mut rng = trial_stream(master_seed, trial_index);
    Ok(universe.rays().iter().copied().filter(|_| keep(&mut rng, p)).collect())
}

pub fn sample_rays(cfg: &SampleConfig) -> Result<Vec<RayVec>> {
    cfg.validate()?;
    sample_rays_in(&enumerate_rays(cfg.h)?, cfg.p, cfg.master_seed, cfg.trial_index)
}

pub fn sample_fan_in(universe: &RayUniverse, p: f64, master_seed: u64, trial_index: u64) -> Result<Fan> {
    Ok(Fan::from_sorted(sample_rays_in(universe, p, master_seed, trial_index)?))
}

pub fn sample_fan(cfg: &SampleConfig) -> Result<Fan> {
    cfg.validate()?;
    sample_fan_in(&enumerate_rays(cfg.h)?, cfg.p, cfg.master_seed, cfg.trial_index)
}

/// A sampled fan's record, tagged with the configuration that produced it.
pub fn sampled_record(cfg: &SampleConfig, fan: &Fan) -> FanRecord {
    FanRecord {
        h: Some(cfg.h),
        p: Some(cfg.p),
        master_seed: Some(cfg.master_seed),
        trial_index: Some(cfg.trial_index),
        ..fan.to_record()
    }
}

/// Probability that every one of `n` rays is kept when each is dropped with probability `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompleteProbability {
    /// `(1 - q)^n`
    pub exact: f64,
    /// `exp(-n·q)`
    pub approx: f64,
}

pub fn prob_complete_n(n: u64, q: f64) -> Result<CompleteProbability> {
    check_probability("q", q)?;
    let n = n as f64;
    Ok(CompleteProbability { exact: (n * (-q).ln_1p()).exp(), approx: (-n * q).exp() })
}

/// `P(Σ = Σ_h)` under `T(h, 1 - q)`, exactly and in the small-`q` limit form.
pub fn prob_complete(h: u32, q: f64) -> Result<CompleteProbability> {
    prob_complete_n(enumerate_rays(h)?.len() as u64, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(h: u32, p: f64, seed: u64, trial: u64) -> SampleConfig {
        SampleConfig { h, p, master_seed: seed, trial_index: trial }
    }

    #[test]
    fn certain_inclusion_and_exclusion() {
        for seed in [0, 1, u64::MAX] {
            assert_eq!(sample_rays(&cfg(6, 1.0, seed, 3)).unwrap(), enumerate_rays(6).unwrap().into_rays());
            assert!(sample_rays(&cfg(6, 0.0, seed, 3)).unwrap().is_empty());
        }
        let full = sample_fan(&cfg(9, 1.0, 5, 0)).unwrap();
        assert!(full.is_smooth());
        assert_eq!(full.n_fixed_points(), enumerate_rays(9).unwrap().len());
        let empty = sample_fan(&cfg(9, 0.0, 5, 0)).unwrap();
        assert!(empty.is_smooth() && empty.rays().is_empty());
    }

    #[test]
    fn rejects_invalid_probability() {
        for p in [-0.1, 1.5, f64::NAN] {
            assert!(matches!(sample_rays(&cfg(3, p, 0, 0)), Err(Error::Config(_))));
        }
        assert!(sample_rays(&cfg(0, 0.5, 0, 0)).is_err());
        assert!(prob_complete(3, 2.0).is_err());
    }

    #[test]
    fn deterministic_and_stream_separated() {
        let a = sample_rays(&cfg(30, 0.5, 42, 7)).unwrap();
        assert_eq!(a, sample_rays(&cfg(30, 0.5, 42, 7)).unwrap());
        assert_ne!(a, sample_rays(&cfg(30, 0.5, 42, 8)).unwrap());
        assert_ne!(a, sample_rays(&cfg(30, 0.5, 43, 7)).unwrap());
        let u = enumerate_rays(30).unwrap();
        assert!(a.iter().all(|&v| u.contains(v)));
    }

    #[test]
    fn golden_sample_h50() {
        let rays = sample_rays(&cfg(50, 0.5, 20_240_601, 0)).unwrap();
        let n = enumerate_rays(50).unwrap().len() as f64;
        let sigma = (0.25 / n).sqrt();
        assert!((rays.len() as f64 / n - 0.5).abs() < 4.0 * sigma);
        assert_eq!(rays.len(), GOLDEN_H50_LEN);
        let head: Vec<(i64, i64)> = rays.iter().take(6).map(|v| (v.x(), v.y())).collect();
        assert_eq!(head, GOLDEN_H50_HEAD);
    }

    #[test]
    fn golden_fan_h5() {
        let f = sample_fan(&cfg(5, 0.5, 20_240_601, 0)).unwrap();
        let s = f.spectrum();
        assert_eq!(f.rays().len(), GOLDEN_H5_RAYS);
        assert_eq!(s.counts.iter().map(|(&k, &n)| (k, n)).collect::<Vec<_>>(), GOLDEN_H5_COUNTS);
    }

    // Frozen from the first run of the stream contract above.
    const GOLDEN_H50_LEN: usize = 3177;
    const GOLDEN_H50_HEAD: [(i64, i64); 6] = [(1, 0), (49, 1), (48, 1), (47, 1), (45, 1), (44, 1)];
    const GOLDEN_H5_RAYS: usize = 52;
    const GOLDEN_H5_COUNTS: &[(u64, usize)] = &[(1, 43), (2, 2), (3, 1), (4, 1), (5, 3), (8, 1), (13, 1)];

    #[test]
    fn mean_inclusion_rate() {
        let u = enumerate_rays(20).unwrap();
        let n = u.len() as f64;
        let trials = 1000;
        let mean =
            (0..trials).map(|t| sample_rays_in(&u, 0.3, 99, t).unwrap().len() as f64 / n).sum::<f64>() / trials as f64;
        let se = (0.3 * 0.7 / n / trials as f64).sqrt();
        assert!((mean - 0.3).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn prob_complete_examples() {
        let n = enumerate_rays(4).unwrap().len() as f64;
        let p = prob_complete(4, 0.0).unwrap();
        assert_eq!((p.exact, p.approx), (1.0, 1.0));
        let p = prob_complete(4, 1.0).unwrap();
        assert_eq!(p.exact, 0.0);
        assert_eq!(p.approx, (-n).exp());
        let p = prob_complete(100, 1e-7).unwrap();
        assert!(((p.exact - p.approx) / p.approx).abs() < 1e-4);
    }

    #[test]
    fn limit_form_is_accurate_for_q_of_order_one_over_n() {
        for h in [100, 150, 300] {
            let n = enumerate_rays(h).unwrap().len() as u64;
            for c in [0.1, 1.0, 10.0] {
                let p = prob_complete_n(n, c / n as f64).unwrap();
                assert!(((p.exact - p.approx) / p.approx).abs() < 1e-2, "h={h} c={c}");
            }
        }
    }
}
