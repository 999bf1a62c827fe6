//! Exact integer geometry on primitive lattice vectors.
//!
//! Coordinates are stored as `i32` and every product is taken in `i64`, so
//! wedges and neighbor sums are exact for all `h <= MAX_HEIGHT`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported height bound.
///
/// Coordinates stay below `2 * MAX_HEIGHT` in magnitude (neighbor sums), and
/// wedges stay below `2 * MAX_HEIGHT^2`, both far inside `i64`.
pub const MAX_HEIGHT: u32 = 1_000_000;

/// Minimal lattice generator of a ray: a nonzero vector with coprime coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct RayVec {
    x: i32,
    y: i32,
}

impl RayVec {
    /// Validates that `(x, y)` is primitive.
    pub fn new(x: i64, y: i64) -> Result<Self> {
        let bound = 2 * i64::from(MAX_HEIGHT);
        if x.abs() > bound || y.abs() > bound {
            return Err(Error::Validation(format!("ray ({x}, {y}) exceeds the supported coordinate range")));
        }
        if !is_primitive(x, y) {
            return Err(Error::Validation(format!("({x}, {y}) is not a primitive lattice vector")));
        }
        Ok(Self { x: x as i32, y: y as i32 })
    }

    pub(crate) const fn new_unchecked(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn x(self) -> i64 {
        i64::from(self.x)
    }

    pub fn y(self) -> i64 {
        i64::from(self.y)
    }

    /// Quarter turn counter-clockwise: `(x, y) -> (-y, x)`.
    pub fn rotate_quarter(self) -> Self {
        Self { x: -self.y, y: self.x }
    }

    pub fn sup_norm(self) -> u64 {
        sup_norm(self)
    }
}

impl fmt::Display for RayVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl TryFrom<[i64; 2]> for RayVec {
    type Error = Error;

    fn try_from([x, y]: [i64; 2]) -> Result<Self> {
        Self::new(x, y)
    }
}

impl From<RayVec> for [i64; 2] {
    fn from(v: RayVec) -> Self {
        [v.x(), v.y()]
    }
}

impl PartialOrd for RayVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Rays are ordered by [`angular_compare`].
impl Ord for RayVec {
    fn cmp(&self, other: &Self) -> Ordering {
        angular_compare(*self, *other)
    }
}

pub fn sup_norm(v: RayVec) -> u64 {
    sup_norm_coords(v.x(), v.y())
}

/// `max(|x|, |y|)` for arbitrary lattice points.
pub fn sup_norm_coords(x: i64, y: i64) -> u64 {
    x.unsigned_abs().max(y.unsigned_abs())
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn is_primitive(x: i64, y: i64) -> bool {
    (x, y) != (0, 0) && gcd(x.unsigned_abs(), y.unsigned_abs()) == 1
}

/// Signed determinant of the matrix with columns `u` and `v`.
pub fn wedge(u: RayVec, v: RayVec) -> i64 {
    u.x() * v.y() - u.y() * v.x()
}

/// 0 for directions in `[0, pi)`, 1 for `[pi, 2pi)`.
fn half_plane(v: RayVec) -> u8 {
    if v.y > 0 || (v.y == 0 && v.x > 0) {
        0
    } else {
        1
    }
}

/// Counter-clockwise order of directions, starting at `(1, 0)` inclusive.
pub fn angular_compare(u: RayVec, v: RayVec) -> Ordering {
    half_plane(u).cmp(&half_plane(v)).then_with(|| 0.cmp(&wedge(u, v)))
}

/// The primitive vectors of sup-norm at most `h`, in canonical angular order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayUniverse {
    h: u32,
    rays: Vec<RayVec>,
}

impl RayUniverse {
    pub fn height(&self) -> u32 {
        self.h
    }

    pub fn rays(&self) -> &[RayVec] {
        &self.rays
    }

    /// `N_h`, the number of rays.
    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    /// Position of `v` in the canonical order, if `v` belongs to the universe.
    pub fn position(&self, v: RayVec) -> Option<usize> {
        if v.sup_norm() > u64::from(self.h) {
            return None;
        }
        self.rays.binary_search(&v).ok()
    }

    pub fn contains(&self, v: RayVec) -> bool {
        self.position(v).is_some()
    }

    pub fn into_rays(self) -> Vec<RayVec> {
        self.rays
    }
}

pub fn check_height(h: u32) -> Result<()> {
    if h == 0 {
        return Err(Error::Config("height bound h must be at least 1".into()));
    }
    if h > MAX_HEIGHT {
        return Err(Error::Config(format!("height bound h = {h} exceeds the supported maximum {MAX_HEIGHT}")));
    }
    Ok(())
}

/// Enumerates `R_h`.
///
/// The quadrant `x > 0, y >= 0` is filtered by gcd and sorted by slope; the
/// other three quadrants are its quarter-turn images, which keeps the result
/// in canonical order without a global sort.
pub fn enumerate_rays(h: u32) -> Result<RayUniverse> {
    check_height(h)?;
    let h_i = h as i32;
    let mut quadrant: Vec<RayVec> = (1..=h_i)
        .flat_map(|x| (0..=h_i).map(move |y| (x, y)))
        .filter(|&(x, y)| gcd(x as u64, y as u64) == 1)
        .map(|(x, y)| RayVec::new_unchecked(x, y))
        .collect();
    quadrant.sort_unstable_by(|a, b| angular_compare(*a, *b));

    let mut rays = Vec::with_capacity(4 * quadrant.len());
    rays.extend_from_slice(&quadrant);
    for _ in 0..3 {
        for v in quadrant.iter_mut() {
            *v = v.rotate_quarter();
        }
        rays.extend_from_slice(&quadrant);
    }
    Ok(RayUniverse { h, rays })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(x: i64, y: i64) -> RayVec {
        RayVec::new(x, y).unwrap()
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(sup_norm(r(1, 0)), 1);
        assert_eq!(sup_norm(r(3, -5)), 5);
        assert_eq!(sup_norm_coords(-7, 7), 7);
        assert_eq!(sup_norm(r(-7, 6)), 7);
    }

    #[test]
    fn primitivity() {
        assert!(!is_primitive(2, 4));
        assert!(is_primitive(3, 5));
        assert!(!is_primitive(0, 0));
        assert!(is_primitive(0, -1));
        assert!(!is_primitive(0, 2));
        assert!(RayVec::new(-7, 7).is_err());
        assert!(RayVec::new(0, 0).is_err());
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge(r(1, 0), r(0, 1)), 1);
        assert_eq!(wedge(r(1, 1), r(1, 1)), 0);
        assert_eq!(wedge(r(1, 0), r(1, 2)), 2);
    }

    #[test]
    fn wedge_is_exact_at_max_height() {
        let m = i64::from(MAX_HEIGHT);
        let a = r(m, m - 1);
        let b = r(-(m - 1), m);
        assert_eq!(wedge(a, b), m * m + (m - 1) * (m - 1));
    }

    #[test]
    fn angular_examples() {
        assert_eq!(angular_compare(r(1, 0), r(1, 1)), Ordering::Less);
        assert_eq!(angular_compare(r(0, 1), r(-1, 0)), Ordering::Less);
        assert_eq!(angular_compare(r(1, -1), r(1, 0)), Ordering::Greater);
        assert_eq!(angular_compare(r(-1, 0), r(-1, -1)), Ordering::Less);
        assert_eq!(angular_compare(r(3, 2), r(3, 2)), Ordering::Equal);
    }

    #[test]
    fn enumerate_small() {
        let u1 = enumerate_rays(1).unwrap();
        let expected = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
        let got: Vec<_> = u1.rays().iter().map(|v| (v.x(), v.y())).collect();
        assert_eq!(got, expected);
        assert_eq!(enumerate_rays(2).unwrap().len(), 16);
    }

    #[test]
    fn enumerate_rejects_bad_heights() {
        assert!(matches!(enumerate_rays(0), Err(Error::Config(_))));
        assert!(matches!(enumerate_rays(MAX_HEIGHT + 1), Err(Error::Config(_))));
    }

    #[test]
    fn enumerate_matches_brute_force() {
        for h in 1..=25i64 {
            let universe = enumerate_rays(h as u32).unwrap();
            let mut brute: Vec<(i64, i64)> =
                (-h..=h).flat_map(|x| (-h..=h).map(move |y| (x, y))).filter(|&(x, y)| is_primitive(x, y)).collect();
            brute.sort_by(|a, b| {
                let ta = (a.1 as f64).atan2(a.0 as f64).rem_euclid(std::f64::consts::TAU);
                let tb = (b.1 as f64).atan2(b.0 as f64).rem_euclid(std::f64::consts::TAU);
                ta.partial_cmp(&tb).unwrap()
            });
            let got: Vec<_> = universe.rays().iter().map(|v| (v.x(), v.y())).collect();
            assert_eq!(got, brute, "h = {h}");
        }
    }

    #[test]
    fn universe_invariants() {
        let mut previous: Option<RayUniverse> = None;
        for h in 1..=40 {
            let u = enumerate_rays(h).unwrap();
            assert_eq!(u.len() % 4, 0);
            for w in u.rays().windows(2) {
                assert_eq!(angular_compare(w[0], w[1]), Ordering::Less);
            }
            for &v in u.rays() {
                assert!(is_primitive(v.x(), v.y()));
                assert!(v.sup_norm() <= u64::from(h));
                assert!(u.contains(v.rotate_quarter()));
            }
            if let Some(p) = previous {
                assert!(p.rays().iter().all(|&v| u.contains(v)));
            }
            previous = Some(u);
        }
    }

    #[test]
    fn position_rejects_outside_rays() {
        let u = enumerate_rays(3).unwrap();
        assert_eq!(u.position(r(1, 0)), Some(0));
        assert_eq!(u.position(r(4, 1)), None);
    }

    #[test]
    fn serde_rejects_non_primitive() {
        let v: RayVec = serde_json::from_str("[2, -3]").unwrap();
        assert_eq!(v, r(2, -3));
        assert!(serde_json::from_str::<RayVec>("[2, 4]").is_err());
    }

    #[test]
    fn angular_agrees_with_atan2_on_many_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut draw = || loop {
            let (x, y) = (rng.gen_range(-5_000i64..=5_000), rng.gen_range(-5_000i64..=5_000));
            if is_primitive(x, y) {
                return r(x, y);
            }
        };
        let angle = |w: RayVec| (w.y() as f64).atan2(w.x() as f64).rem_euclid(std::f64::consts::TAU);
        for _ in 0..100_000 {
            let (u, v) = (draw(), draw());
            assert_eq!(angular_compare(u, v), angle(u).partial_cmp(&angle(v)).unwrap(), "{u} vs {v}");
        }
    }

    fn primitive_pair() -> impl Strategy<Value = RayVec> {
        (-10_000i64..=10_000, -10_000i64..=10_000)
            .prop_filter("primitive", |&(x, y)| is_primitive(x, y))
            .prop_map(|(x, y)| r(x, y))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2_000))]

        #[test]
        fn wedge_antisymmetric(u in primitive_pair(), v in primitive_pair()) {
            prop_assert_eq!(wedge(u, v), -wedge(v, u));
            prop_assert_eq!(wedge(u, u), 0);
        }

        #[test]
        fn angular_agrees_with_atan2(u in primitive_pair(), v in primitive_pair()) {
            let angle = |w: RayVec| (w.y() as f64).atan2(w.x() as f64).rem_euclid(std::f64::consts::TAU);
            let (a, b) = (angle(u), angle(v));
            // Distinct primitive directions in this range differ by far more than f64 resolution.
            prop_assert_eq!(angular_compare(u, v), a.partial_cmp(&b).unwrap());
            prop_assert_eq!(angular_compare(u, v) == Ordering::Equal, u == v);
        }
    }
}
