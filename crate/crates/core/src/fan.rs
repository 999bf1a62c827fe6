//! Two-dimensional fans obtained by completing a set of rays.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{angular_compare, wedge, RayVec};

/// A 2-cone spanned by `rays[a]` and `rays[b]`, with `a` preceding `b` counter-clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cone2 {
    pub a: usize,
    pub b: usize,
}

/// The maximal fan on a set of rays.
///
/// Every pair of cyclically adjacent rays whose counter-clockwise gap is
/// strictly less than pi spans a cone. Antipodal neighbors span nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    rays: Vec<RayVec>,
    cones: Vec<Cone2>,
}

impl Fan {
    /// Completes rays that are already strictly increasing in angular order.
    pub(crate) fn from_sorted(rays: Vec<RayVec>) -> Self {
        debug_assert!(rays.windows(2).all(|w| angular_compare(w[0], w[1]).is_lt()));
        let n = rays.len();
        let cones = if n < 2 {
            Vec::new()
        } else {
            (0..n).map(|a| Cone2 { a, b: (a + 1) % n }).filter(|c| wedge(rays[c.a], rays[c.b]) > 0).collect()
        };
        Fan { rays, cones }
    }

    pub fn empty() -> Self {
        Fan { rays: Vec::new(), cones: Vec::new() }
    }

    pub fn rays(&self) -> &[RayVec] {
        &self.rays
    }

    pub fn cones(&self) -> &[Cone2] {
        &self.cones
    }

    /// Number of torus fixed points, one per 2-cone.
    pub fn n_fixed_points(&self) -> usize {
        self.cones.len()
    }

    pub fn cone_rays(&self, c: Cone2) -> (RayVec, RayVec) {
        (self.rays[c.a], self.rays[c.b])
    }

    pub fn cone_index(&self, c: Cone2) -> u64 {
        cone_index(self, c)
    }

    /// Singularity indices in cone order.
    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.cones.iter().map(|&c| cone_index(self, c))
    }

    pub fn is_smooth(&self) -> bool {
        is_smooth(self)
    }

    /// Largest singularity index, or 0 for a fan without 2-cones.
    pub fn max_index(&self) -> u64 {
        self.indices().max().unwrap_or(0)
    }

    pub fn spectrum(&self) -> SingularitySpectrum {
        spectrum(self)
    }

    pub fn delta_k(&self, k: u64) -> Result<Option<Ratio<u64>>> {
        delta_k(self, k)
    }

    pub fn to_record(&self) -> FanRecord {
        FanRecord { rays: self.rays.clone(), ..FanRecord::default() }
    }
}

/// Completes an arbitrary collection of rays. Duplicates collapse.
pub fn complete_fan<I: IntoIterator<Item = RayVec>>(rays: I) -> Fan {
    let mut rays: Vec<RayVec> = rays.into_iter().collect();
    rays.sort_unstable();
    rays.dedup();
    Fan::from_sorted(rays)
}

/// Like [`complete_fan`], validating raw coordinates first.
pub fn complete_fan_from_coords(coords: &[(i64, i64)]) -> Result<Fan> {
    let rays = coords.iter().map(|&(x, y)| RayVec::new(x, y)).collect::<Result<Vec<_>>>()?;
    Ok(complete_fan(rays))
}

pub fn cone_index(f: &Fan, c: Cone2) -> u64 {
    let (u, v) = f.cone_rays(c);
    wedge(u, v).unsigned_abs()
}

/// A fan is smooth when every 2-cone has index 1; fans without 2-cones are smooth.
pub fn is_smooth(f: &Fan) -> bool {
    f.indices().all(|k| k == 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularitySpectrum {
    /// One index per cone, in cone order.
    pub indices: Vec<u64>,
    /// Index `k` to the number of cones with that index.
    pub counts: BTreeMap<u64, usize>,
}

impl SingularitySpectrum {
    pub fn n_cones(&self) -> usize {
        self.indices.len()
    }

    /// Number of cones with index at least `k`.
    pub fn count_geq(&self, k: u64) -> usize {
        self.counts.range(k..).map(|(_, &n)| n).sum()
    }

    /// `delta_k`; `None` when there are no fixed points.
    pub fn delta_k(&self, k: u64) -> Result<Option<Ratio<u64>>> {
        if k == 0 {
            return Err(Error::Validation("delta_k requires k >= 1".into()));
        }
        if self.indices.is_empty() {
            return Ok(None);
        }
        Ok(Some(Ratio::new(self.count_geq(k) as u64, self.n_cones() as u64)))
    }
}

pub fn spectrum(f: &Fan) -> SingularitySpectrum {
    let indices: Vec<u64> = f.indices().collect();
    let mut counts = BTreeMap::new();
    for &k in &indices {
        *counts.entry(k).or_insert(0) += 1;
    }
    SingularitySpectrum { indices, counts }
}

/// Fraction of fixed points with singularity index at least `k`.
///
/// Returns `Ok(None)` for a fan without 2-cones, where the ratio is 0/0.
pub fn delta_k(f: &Fan, k: u64) -> Result<Option<Ratio<u64>>> {
    if k == 0 {
        return Err(Error::Validation("delta_k requires k >= 1".into()));
    }
    if f.cones.is_empty() {
        return Ok(None);
    }
    let geq = f.indices().filter(|&i| i >= k).count() as u64;
    Ok(Some(Ratio::new(geq, f.cones.len() as u64)))
}

/// On-disk form of a fan. Cones are never stored; they are recomputed on load.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FanRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<u32>,
    pub rays: Vec<RayVec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial_index: Option<u64>,
}

impl FanRecord {
    pub fn to_fan(&self) -> Result<Fan> {
        if let Some(h) = self.h {
            if let Some(bad) = self.rays.iter().find(|r| r.sup_norm() > u64::from(h)) {
                return Err(Error::Validation(format!("ray {bad} exceeds the record's height bound {h}")));
            }
        }
        Ok(complete_fan(self.rays.iter().copied()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("fan records always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(format!("invalid fan record: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse { path: path.to_owned(), message: e.to_string() })
    }
}
