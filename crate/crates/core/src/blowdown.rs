//! Single-ray blowdowns of the complete fan `Σ_h`.
//!
//! Removing a ray `ρ` from `Σ_h` merges its two cones into one spanned by the
//! neighbors `τ` and `ω`. The index of that merged cone is the unique `k` with
//! `k·u_ρ = u_τ + u_ω`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{enumerate_rays, sup_norm, wedge, RayUniverse, RayVec};
use crate::table::{Cell, Table};

/// Angular predecessor and successor of `rho` in `R_h`, cyclically.
pub fn neighbors(universe: &RayUniverse, rho: RayVec) -> Result<(RayVec, RayVec)> {
    let i = universe
        .position(rho)
        .ok_or_else(|| Error::Validation(format!("{rho} is not a ray of R_{}", universe.height())))?;
    Ok(neighbors_at(universe.rays(), i))
}

fn neighbors_at(rays: &[RayVec], i: usize) -> (RayVec, RayVec) {
    let n = rays.len();
    (rays[(i + n - 1) % n], rays[(i + 1) % n])
}

/// Blowdown index of `rho` relative to `Σ_h`.
pub fn blowdown_index(universe: &RayUniverse, rho: RayVec) -> Result<u64> {
    let (tau, omega) = neighbors(universe, rho)?;
    index_from_neighbors(rho, tau, omega)
}

/// Solves `k·rho = tau + omega` exactly and cross-checks `k = |tau ∧ omega|`.
fn index_from_neighbors(rho: RayVec, tau: RayVec, omega: RayVec) -> Result<u64> {
    let (sx, sy) = (tau.x() + omega.x(), tau.y() + omega.y());
    let k = if rho.x() != 0 { sx / rho.x() } else { sy / rho.y() };
    if k < 1 || k * rho.x() != sx || k * rho.y() != sy {
        return Err(Error::Invariant(format!("neighbor sum ({sx}, {sy}) of {rho} is not a positive multiple of it")));
    }
    let det = wedge(tau, omega).unsigned_abs();
    if det != k as u64 {
        return Err(Error::Invariant(format!(
            "blowdown index of {rho}: neighbor sum gives {k}, determinant gives {det}"
        )));
    }
    Ok(k as u64)
}

/// Blowdown index of every ray of `Σ_h`, plus the measured `ε(h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowdownTable {
    h: u32,
    /// `(ray, k)` in canonical ray order.
    entries: Vec<(RayVec, u64)>,
    histogram: BTreeMap<u64, usize>,
    epsilon: f64,
}

impl BlowdownTable {
    pub fn from_universe(universe: &RayUniverse) -> Result<Self> {
        let rays = universe.rays();
        let entries = (0..rays.len())
            .into_par_iter()
            .map(|i| {
                let (tau, omega) = neighbors_at(rays, i);
                index_from_neighbors(rays[i], tau, omega).map(|k| (rays[i], k))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut histogram = BTreeMap::new();
        for &(_, k) in &entries {
            *histogram.entry(k).or_insert(0) += 1;
        }
        Ok(BlowdownTable { h: universe.height(), entries, histogram, epsilon: epsilon_of_universe(universe) })
    }

    pub fn height(&self) -> u32 {
        self.h
    }

    pub fn entries(&self) -> &[(RayVec, u64)] {
        &self.entries
    }

    /// `N_h`.
    pub fn n_rays(&self) -> usize {
        self.entries.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Blowdown index of `rho`, if it is a ray of `Σ_h`.
    pub fn get(&self, rho: RayVec) -> Option<u64> {
        self.entries.binary_search_by(|(v, _)| v.cmp(&rho)).ok().map(|i| self.entries[i].1)
    }

    /// `k` to `|S_k|`.
    pub fn histogram(&self) -> &BTreeMap<u64, usize> {
        &self.histogram
    }

    /// `|S_k|`
    pub fn count_eq(&self, k: u64) -> usize {
        self.histogram.get(&k).copied().unwrap_or(0)
    }

    /// `|S_{≥k}|`
    pub fn count_geq(&self, k: u64) -> usize {
        self.histogram.range(k..).map(|(_, &n)| n).sum()
    }

    /// Rays of `S_k`, in canonical order.
    pub fn s_k(&self, k: u64) -> impl Iterator<Item = RayVec> + '_ {
        self.entries.iter().filter(move |e| e.1 == k).map(|e| e.0)
    }

    /// Rays of `S_{≥k}`, in canonical order.
    pub fn s_geq(&self, k: u64) -> impl Iterator<Item = RayVec> + '_ {
        self.entries.iter().filter(move |e| e.1 >= k).map(|e| e.0)
    }

    /// CSV layout `x,y,norm,k`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["x", "y", "norm", "k"]);
        for &(v, k) in &self.entries {
            t.push(vec![Cell::Int(v.x()), Cell::Int(v.y()), Cell::from(sup_norm(v)), Cell::from(k)]);
        }
        t
    }
}

pub fn blowdown_table(h: u32) -> Result<BlowdownTable> {
    BlowdownTable::from_universe(&enumerate_rays(h)?)
}

/// `|S_{≥k}| / N_h` as an exact fraction.
pub fn ratio_geq(t: &BlowdownTable, k: u64) -> Ratio<u64> {
    Ratio::new(t.count_geq(k) as u64, t.n_rays() as u64)
}

/// The band `(2 - ε)/(k + 2)·h <= |u_ρ| <= 2h/k` for rays of blowdown index `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub lower: f64,
    pub upper: Ratio<u64>,
}

impl Band {
    /// Upper inequality in integer form, `k·norm <= 2h`.
    pub fn upper_holds(h: u32, k: u64, norm: u64) -> bool {
        k * norm <= 2 * u64::from(h)
    }
}

pub fn band_bounds(h: u32, k: u64, eps: f64) -> Result<Band> {
    if k == 0 {
        return Err(Error::Validation("band bounds require k >= 1".into()));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::Validation(format!("epsilon must be non-negative, got {eps}")));
    }
    let h64 = u64::from(h);
    Ok(Band { lower: (2.0 - eps) / (k as f64 + 2.0) * h as f64, upper: Ratio::new(2 * h64, k) })
}

fn unit(v: RayVec) -> (f64, f64) {
    let n = sup_norm(v) as f64;
    (v.x() as f64 / n, v.y() as f64 / n)
}

/// Largest sup-norm distance between sup-normalized neighbors of `R_h`.
pub fn epsilon_of_universe(universe: &RayUniverse) -> f64 {
    let rays = universe.rays();
    let n = rays.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (unit(rays[i]), unit(rays[(i + 1) % n]));
            (a.0 - b.0).abs().max((a.1 - b.1).abs())
        })
        .reduce(|| 0.0, f64::max)
}

pub fn epsilon_of(h: u32) -> Result<f64> {
    Ok(epsilon_of_universe(&enumerate_rays(h)?))
}

/// Extended Euclid: returns `(g, s, t)` with `s·a + t·b = g`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

/// Every `τ ∈ R_h` with `|u_ρ ∧ u_τ| = 1`, in canonical order.
///
/// Solutions of `ρ ∧ τ = ±1` lie on two lines parallel to `ρ`; each line is
/// walked inside the box `[-h, h]^2`.
pub fn smooth_partners(h: u32, rho: RayVec) -> Result<Vec<RayVec>> {
    crate::lattice::check_height(h)?;
    let (rx, ry) = (rho.x(), rho.y());
    let hh = i64::from(h);
    // rx·b - ry·a = 1
    let (g, s, t) = ext_gcd(rx, -ry);
    let (a0, b0) = (t * g, s * g);
    debug_assert_eq!(rx * b0 - ry * a0, 1);

    let norm = sup_norm(rho);
    let per_side_limit = (2 * hh as u64).div_ceil(norm) + 1;
    let mut partners = Vec::new();
    for sign in [1i64, -1] {
        let (px, py) = (sign * a0, sign * b0);
        // range of m with |px + m·rx| <= h and |py + m·ry| <= h
        let (mut lo, mut hi) = (i64::MIN, i64::MAX);
        for (p, r) in [(px, rx), (py, ry)] {
            if r == 0 {
                if p.abs() > hh {
                    lo = 1;
                    hi = 0;
                }
                continue;
            }
            let (l, u) = if r > 0 {
                (div_ceil(-hh - p, r), div_floor(hh - p, r))
            } else {
                (div_ceil(hh - p, r), div_floor(-hh - p, r))
            };
            lo = lo.max(l);
            hi = hi.min(u);
        }
        let side: Vec<RayVec> = (lo..=hi)
            .map(|m| RayVec::new(px + m * rx, py + m * ry))
            .collect::<Result<_>>()
            .map_err(|e| Error::Invariant(format!("smooth partner of {rho} not primitive: {e}")))?;
        if side.len() as u64 > per_side_limit {
            return Err(Error::Invariant(format!(
                "{} smooth partners of {rho} on one side exceed the bound {per_side_limit}",
                side.len()
            )));
        }
        partners.extend(side);
    }
    partners.sort_unstable();
    Ok(partners)
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}
