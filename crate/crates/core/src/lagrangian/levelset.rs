use std::collections::HashMap;

use super::flow::FlowSampler;
use super::patch::segment_distance;
use super::transport::{advect_cubic, departure_points_flow};
use crate::spectral::ScalarField;

/// Transported level-set function whose zero set is the patch boundary.
#[derive(Debug, Clone)]
pub struct LevelSet {
    pub f: ScalarField,
    /// Nodes with `|f| < band_level` form the narrow band.
    pub band_level: f64,
}

impl LevelSet {
    pub fn new(f: ScalarField, band_level: f64) -> Self {
        Self { f, band_level }
    }

    pub fn band_mask(&self) -> Vec<bool> {
        self.f.values().iter().map(|v| v.abs() < self.band_level).collect()
    }

    /// Zero contour as closed polylines (marching squares restricted to
    /// cells touching the band).
    pub fn zero_contour(&self) -> Vec<Vec<[f64; 2]>> {
        marching_squares(&self.f, Some(&self.band_mask()))
    }
}

/// Semi-Lagrangian step of `∂_t f + u·∇f = 0` with cubic interpolation.
pub fn advect_level_set(ls: &LevelSet, flow: &dyn FlowSampler, t: f64, dt: f64) -> LevelSet {
    let d = departure_points_flow(ls.f.grid(), flow, t, dt);
    LevelSet {
        f: advect_cubic(&ls.f, &d),
        band_level: ls.band_level,
    }
}

/// Zero contour of `f`. Saddle cells are split according to the sign of
/// the cell average.
pub fn marching_squares(f: &ScalarField, band: Option<&[bool]>) -> Vec<Vec<[f64; 2]>> {
    let g = f.grid();
    let (n, h) = (g.n(), g.spacing());
    let v = f.values();
    let at = |i: usize, j: usize| v[(j % n) * n + (i % n)];
    let pos = |x: f64| x > 0.0;
    // Edge keys: horizontal edge (i, j)→(i+1, j) is 2·id, vertical (i, j)→(i, j+1) is 2·id+1.
    let hkey = |i: usize, j: usize| 2 * ((j % n) * n + (i % n));
    let vkey = |i: usize, j: usize| 2 * ((j % n) * n + (i % n)) + 1;
    let cross = |a: f64, b: f64, pa: [f64; 2], pb: [f64; 2]| {
        let w = a / (a - b);
        [pa[0] + w * (pb[0] - pa[0]), pa[1] + w * (pb[1] - pa[1])]
    };
    let mut points: HashMap<usize, [f64; 2]> = HashMap::new();
    let mut links: HashMap<usize, Vec<usize>> = HashMap::new();
    for j in 0..n {
        for i in 0..n {
            if let Some(b) = band {
                let touch = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
                    .iter()
                    .any(|&(a, c)| b[(c % n) * n + (a % n)]);
                if !touch {
                    continue;
                }
            }
            let c = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let s = c.map(pos);
            if s.iter().all(|&x| x == s[0]) {
                continue;
            }
            let p = [
                [i as f64 * h, j as f64 * h],
                [(i + 1) as f64 * h, j as f64 * h],
                [(i + 1) as f64 * h, (j + 1) as f64 * h],
                [i as f64 * h, (j + 1) as f64 * h],
            ];
            // edges: 0 bottom (c0-c1), 1 right (c1-c2), 2 top (c3-c2), 3 left (c0-c3)
            let keys = [hkey(i, j), vkey(i + 1, j), hkey(i, j + 1), vkey(i, j)];
            let ends = [(0, 1), (1, 2), (3, 2), (0, 3)];
            let mut crossing = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = ends[e];
                if s[a] != s[b] {
                    points.entry(keys[e]).or_insert_with(|| cross(c[a], c[b], p[a], p[b]));
                    crossing.push(e);
                }
            }
            let pairs: Vec<(usize, usize)> = if crossing.len() == 2 {
                vec![(crossing[0], crossing[1])]
            } else {
                let centre = pos(0.25 * (c[0] + c[1] + c[2] + c[3]));
                if centre == s[0] {
                    // corners 1 and 3 are cut off
                    vec![(0, 1), (2, 3)]
                } else {
                    vec![(3, 0), (1, 2)]
                }
            };
            for (a, b) in pairs {
                links.entry(keys[a]).or_default().push(keys[b]);
                links.entry(keys[b]).or_default().push(keys[a]);
            }
        }
    }
    let mut keys: Vec<usize> = links.keys().copied().collect();
    keys.sort_unstable();
    let mut used = std::collections::HashSet::new();
    let mut lines = Vec::new();
    for start in keys {
        if used.contains(&start) {
            continue;
        }
        let mut line = vec![points[&start]];
        used.insert(start);
        let mut prev = start;
        let mut cur = match links[&start].first() {
            Some(&k) => k,
            None => continue,
        };
        while !used.contains(&cur) {
            used.insert(cur);
            line.push(points[&cur]);
            let next = links[&cur].iter().copied().find(|&k| k != prev && !used.contains(&k));
            prev = cur;
            match next {
                Some(k) => cur = k,
                None => break,
            }
        }
        lines.push(line);
    }
    lines
}

fn distance_to_closed(poly: &[[f64; 2]], p: [f64; 2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| segment_distance(poly[i], poly[(i + 1) % n], p).1)
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric Hausdorff distance between contour polylines (treated as
/// closed) and a closed polygon, measured at vertices.
pub fn hausdorff(contours: &[Vec<[f64; 2]>], polygon: &[[f64; 2]]) -> f64 {
    if contours.is_empty() || polygon.is_empty() {
        return f64::INFINITY;
    }
    let a = contours
        .iter()
        .flatten()
        .map(|&p| distance_to_closed(polygon, p))
        .fold(0.0, f64::max);
    let b = polygon
        .iter()
        .map(|&p| {
            contours
                .iter()
                .map(|c| distance_to_closed(c, p))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    a.max(b)
}
