//! Voronoi cells of the BS sites, clipped to the window, by successive
//! half-plane clipping against neighbours found on a uniform grid.

use crate::montecarlo::realization::Window;

pub(crate) type Point = [f64; 2];

struct Grid {
    cell: f64,
    lo: f64,
    n: usize,
    buckets: Vec<Vec<usize>>,
}

impl Grid {
    fn new(sites: &[Point], window: &Window, cell: f64) -> Grid {
        let w = window.half_width();
        let n = ((2.0 * w / cell).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); n * n];
        let mut g = Grid {
            cell,
            lo: -w,
            n,
            buckets: Vec::new(),
        };
        for (i, s) in sites.iter().enumerate() {
            let (cx, cy) = g.locate(*s);
            buckets[cy * n + cx].push(i);
        }
        g.buckets = buckets;
        g
    }

    fn locate(&self, p: Point) -> (usize, usize) {
        let f = |x: f64| (((x - self.lo) / self.cell).floor().max(0.0) as usize).min(self.n - 1);
        (f(p[0]), f(p[1]))
    }
}

/// Keeps the part of convex `poly` closer to `p` than to `q`.
fn clip(poly: &[Point], p: Point, q: Point) -> Vec<Point> {
    let n = [q[0] - p[0], q[1] - p[1]];
    let m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    let side = |v: Point| (v[0] - m[0]) * n[0] + (v[1] - m[1]) * n[1];
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (sa, sb) = (side(a), side(b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

fn max_radius(poly: &[Point], p: Point) -> f64 {
    poly.iter()
        .map(|v| (v[0] - p[0]).hypot(v[1] - p[1]))
        .fold(0.0, f64::max)
}

/// Cell polygons (counter-clockwise) of every site, clipped to `window`.
/// `cell` is the neighbour-search grid spacing, ideally near the mean
/// nearest-neighbour distance.
pub(crate) fn cells(sites: &[Point], window: &Window, cell: f64) -> Vec<Vec<Point>> {
    let grid = Grid::new(sites, window, cell);
    let w = window.half_width();
    let square = vec![[-w, -w], [w, -w], [w, w], [-w, w]];
    sites
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut poly = square.clone();
            let (cx, cy) = grid.locate(p);
            let (cx, cy) = (cx as i64, cy as i64);
            let n = grid.n as i64;
            let mut ring = 0i64;
            loop {
                for gy in (cy - ring)..=(cy + ring) {
                    for gx in (cx - ring)..=(cx + ring) {
                        let on_ring = (gy - cy).abs() == ring || (gx - cx).abs() == ring;
                        if !on_ring || gx < 0 || gy < 0 || gx >= n || gy >= n {
                            continue;
                        }
                        for &j in &grid.buckets[(gy * n + gx) as usize] {
                            if j != i && sites[j] != p {
                                poly = clip(&poly, p, sites[j]);
                            }
                        }
                    }
                }
                // Unvisited sites lie at least ring·cell away; a site farther
                // than twice the cell's radius cannot cut it.
                let covered = ring as f64 * grid.cell;
                if covered >= 2.0 * max_radius(&poly, p) || ring > n {
                    break;
                }
                ring += 1;
            }
            poly
        })
        .collect()
}

#[cfg(test)]
pub(crate) fn area(poly: &[Point]) -> f64 {
    let mut a = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

/// Uniform point in convex `poly` from three uniforms: a fan triangle picked
/// by area, then a uniform point in it.
pub(crate) fn uniform_in_polygon(poly: &[Point], u: [f64; 3]) -> Point {
    if poly.len() < 3 {
        return poly.first().copied().unwrap_or([0.0, 0.0]);
    }
    let o = poly[0];
    let tri_area = |i: usize| {
        let (a, b) = (poly[i], poly[i + 1]);
        0.5 * ((a[0] - o[0]) * (b[1] - o[1]) - (b[0] - o[0]) * (a[1] - o[1])).abs()
    };
    let total: f64 = (1..poly.len() - 1).map(tri_area).sum();
    let mut target = u[0] * total;
    let mut idx = poly.len() - 2;
    for i in 1..poly.len() - 1 {
        let a = tri_area(i);
        if target < a {
            idx = i;
            break;
        }
        target -= a;
    }
    let (a, b) = (poly[idx], poly[idx + 1]);
    let r = u[1].sqrt();
    let (wa, wb) = (r * (1.0 - u[2]), r * u[2]);
    [
        o[0] + wa * (a[0] - o[0]) + wb * (b[0] - o[0]),
        o[1] + wa * (a[1] - o[1]) + wb * (b[1] - o[1]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sites(n: usize, w: f64, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                [
                    w * (2.0 * rng.random::<f64>() - 1.0),
                    w * (2.0 * rng.random::<f64>() - 1.0),
                ]
            })
            .collect()
    }

    #[test]
    fn cells_tile_the_window() {
        let w = 200.0;
        let sites = random_sites(150, w, 1);
        let window = Window::new(w).unwrap();
        let polys = cells(&sites, &window, 20.0);
        let total: f64 = polys.iter().map(|p| area(p)).sum();
        assert!((total - window.area()).abs() < 1e-6 * window.area(), "{total}");
    }

    #[test]
    fn cell_points_are_nearest_to_their_site() {
        let w = 200.0;
        let sites = random_sites(120, w, 2);
        let window = Window::new(w).unwrap();
        let polys = cells(&sites, &window, 20.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (i, poly) in polys.iter().enumerate() {
            for _ in 0..5 {
                let x = uniform_in_polygon(poly, [rng.random(), rng.random(), rng.random()]);
                assert!(window.contains(x));
                let d = |s: Point| (s[0] - x[0]).hypot(s[1] - x[1]);
                let di = d(sites[i]);
                assert!(sites.iter().all(|&s| d(s) >= di - 1e-9));
            }
        }
    }

    #[test]
    fn polygon_sampling_is_uniform() {
        // Unit square: the fraction landing in the left half is ≈ 1/2.
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 40_000;
        let left = (0..n)
            .filter(|_| uniform_in_polygon(&sq, [rng.random(), rng.random(), rng.random()])[0] < 0.5)
            .count() as f64
            / n as f64;
        assert!((left - 0.5).abs() < 4.0 * (0.25f64 / n as f64).sqrt());
    }
}
