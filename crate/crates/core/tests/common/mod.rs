//! Independent reference implementations used only by tests.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use toricrand::{complete_fan, RayVec};

/// Sorted rays, then `(a, b, index)` per cone.
pub type FanShape = (Vec<(i64, i64)>, Vec<((i64, i64), (i64, i64), u64)>);

/// The library's completion, flattened into a [`FanShape`].
pub fn library_fan(rays: &[(i64, i64)]) -> FanShape {
    let f = complete_fan(rays.iter().map(|&(x, y)| RayVec::new(x, y).unwrap()));
    let sorted = f.rays().iter().map(|v| (v.x(), v.y())).collect();
    let cones = f
        .cones()
        .iter()
        .map(|&c| {
            let (a, b) = f.cone_rays(c);
            ((a.x(), a.y()), (b.x(), b.y()), f.cone_index(c))
        })
        .collect();
    (sorted, cones)
}

/// Cones of the completion of `rays`, computed naively: sort by floating-point
/// angle, then join cyclic neighbors whose angular gap is below pi, with `|det|`
/// as the index.
pub fn oracle_fan(rays: &[(i64, i64)]) -> FanShape {
    let angle = |&(x, y): &(i64, i64)| (y as f64).atan2(x as f64).rem_euclid(TAU);
    let mut sorted: Vec<(i64, i64)> = rays.to_vec();
    sorted.sort_by(|a, b| angle(a).partial_cmp(&angle(b)).unwrap());
    sorted.dedup();
    let n = sorted.len();
    let mut cones = Vec::new();
    if n >= 2 {
        for i in 0..n {
            let (a, b) = (sorted[i], sorted[(i + 1) % n]);
            let mut gap = angle(&b) - angle(&a);
            if gap <= 0.0 {
                gap += TAU;
            }
            if gap < PI - 1e-9 {
                let det = (a.0 * b.1 - a.1 * b.0).unsigned_abs();
                cones.push((a, b, det));
            }
        }
    }
    (sorted, cones)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive points of `[-h, h]^2`, in no particular order.
pub fn brute_rays(h: i64) -> Vec<(i64, i64)> {
    (-h..=h).flat_map(|x| (-h..=h).map(move |y| (x, y))).filter(|&(x, y)| gcd(x, y) == 1).collect()
}

/// The points plotted for h = 5, grouped by index.
pub const SPACE_H5: [(i64, i64, u64); 21] = [
    (1, 5, 1),
    (2, 5, 1),
    (3, 5, 1),
    (4, 5, 1),
    (5, 4, 1),
    (5, 3, 1),
    (5, 2, 1),
    (5, 1, 1),
    (1, 4, 2),
    (3, 4, 2),
    (4, 3, 2),
    (4, 1, 2),
    (1, 3, 3),
    (2, 3, 3),
    (3, 2, 3),
    (3, 1, 3),
    (1, 2, 5),
    (2, 1, 5),
    (1, 1, 9),
    (1, 0, 10),
    (0, 1, 10),
];

/// Published `|S_{>=k}| / N_h` for k = 2..=7.
pub const LIMITS_H500: [f64; 6] = [0.6666, 0.3334, 0.2000, 0.1334, 0.0952, 0.0714];
pub const LIMITS_H1000: [f64; 6] = [0.6667, 0.3333, 0.2000, 0.1333, 0.0953, 0.0714];
