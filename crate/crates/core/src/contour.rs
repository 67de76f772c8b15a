//! Zero-level contours of the resultants on a rectangular `(ε, Δ)` grid.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::topology::ResultantField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    R1,
    R2,
}

impl Component {
    pub fn as_str(&self) -> &'static str {
        match self {
            Component::R1 => "R1",
            Component::R2 => "R2",
        }
    }
}

/// Inclusive, uniformly spaced grid over `ε` and `Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub eps: (T, T),
    pub eps_count: usize,
    pub delta: (T, T),
    pub delta_count: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(eps: (T, T), eps_count: usize, delta: (T, T), delta_count: usize) -> Result<Self> {
        let g = Self { eps, eps_count, delta, delta_count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps_count < 2 || self.delta_count < 2 {
            return Err(Error::invalid("grid", "counts must be at least 2"));
        }
        let finite = [self.eps.0, self.eps.1, self.delta.0, self.delta.1].iter().all(|v| v.is_finite());
        if !finite || self.eps.0 == self.eps.1 || self.delta.0 == self.delta.1 {
            return Err(Error::invalid("grid", "ranges must be finite and non-empty"));
        }
        Ok(())
    }

    pub fn eps_at(&self, i: usize) -> T {
        lerp(self.eps, i, self.eps_count)
    }

    pub fn delta_at(&self, j: usize) -> T {
        lerp(self.delta, j, self.delta_count)
    }
}

fn lerp<T: Real>(range: (T, T), i: usize, n: usize) -> T {
    if i + 1 == n {
        return range.1;
    }
    range.0 + (range.1 - range.0) * T::from_usize_lossy(i) / T::from_usize_lossy(n - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<T> {
    /// `(ε, Δ)` vertices in traversal order.
    pub points: Vec<(T, T)>,
    /// Last vertex connects back to the first.
    pub closed: bool,
}

/// Samples of one resultant on a grid, indexed `[i_eps][j_delta]`.
#[derive(Debug, Clone)]
pub struct ScalarGrid<T> {
    pub grid: GridSpec<T>,
    pub values: Vec<Vec<T>>,
}

pub fn sample<T: Real>(grid: &GridSpec<T>, which: Component, field: &ResultantField<T>) -> Result<ScalarGrid<T>> {
    grid.validate()?;
    let values = (0..grid.eps_count)
        .into_par_iter()
        .map(|i| {
            let e = grid.eps_at(i);
            (0..grid.delta_count).map(|j| pick(field, which, e, grid.delta_at(j))).collect()
        })
        .collect();
    Ok(ScalarGrid { grid: *grid, values })
}

fn pick<T: Real>(field: &ResultantField<T>, which: Component, e: T, d: T) -> T {
    let r = field.eval(e, d);
    match which {
        Component::R1 => r.r1,
        Component::R2 => r.r2,
    }
}

/// Zero-level polylines of `R₁` or `R₂` by marching squares.
///
/// Crossings are placed by linear interpolation along cell edges; saddle
/// cells are split according to the sign of the field at the cell center.
pub fn zero_contours<T: Real>(grid: &GridSpec<T>, which: Component, field: &ResultantField<T>) -> Result<Vec<Polyline<T>>> {
    let sampled = sample(grid, which, field)?;
    Ok(trace_zero_level(&sampled, |e, d| pick(field, which, e, d)))
}

/// Edge identifier: horizontal edges run along `ε` from vertex `(i, j)`,
/// vertical ones along `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

pub fn trace_zero_level<T: Real>(s: &ScalarGrid<T>, center: impl Fn(T, T) -> T) -> Vec<Polyline<T>> {
    let g = &s.grid;
    let v = &s.values;
    let pos = |x: T| x >= T::zero();
    let two = T::lit(2.0);
    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for i in 0..g.eps_count - 1 {
        for j in 0..g.delta_count - 1 {
            let c = [v[i][j], v[i + 1][j], v[i + 1][j + 1], v[i][j + 1]];
            let s = c.map(pos);
            let edges = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            // Edge k joins corners k and k+1 (mod 4).
            let cut: Vec<usize> = (0..4).filter(|&k| s[k] != s[(k + 1) % 4]).collect();
            match cut.len() {
                2 => segments.push((edges[cut[0]], edges[cut[1]])),
                4 => {
                    let ce = (g.eps_at(i) + g.eps_at(i + 1)) / two;
                    let cd = (g.delta_at(j) + g.delta_at(j + 1)) / two;
                    if pos(center(ce, cd)) == s[0] {
                        // Corners 0 and 2 connect through the center.
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }
    let point = |e: Edge| -> (T, T) {
        let (a, b, pa, pb) = match e {
            Edge::H(i, j) => (v[i][j], v[i + 1][j], (g.eps_at(i), g.delta_at(j)), (g.eps_at(i + 1), g.delta_at(j))),
            Edge::V(i, j) => (v[i][j], v[i][j + 1], (g.eps_at(i), g.delta_at(j)), (g.eps_at(i), g.delta_at(j + 1))),
        };
        let t = if a == b { T::lit(0.5) } else { a / (a - b) };
        (pa.0 + (pb.0 - pa.0) * t, pa.1 + (pb.1 - pa.1) * t)
    };
    let mut adj: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(k);
        adj.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start_seg: usize, start_edge: Edge, used: &mut Vec<bool>| -> (Vec<Edge>, bool) {
        let mut path = vec![start_edge];
        let mut seg = start_seg;
        let mut at = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            if next == start_edge {
                return (path, true);
            }
            path.push(next);
            at = next;
            match adj[&next].iter().find(|&&k| !used[k]) {
                Some(&k) => seg = k,
                None => return (path, false),
            }
        }
    };
    // Open polylines start at edges with a single incident segment.
    let mut starts: Vec<Edge> = adj.iter().filter(|(_, s)| s.len() == 1).map(|(e, _)| *e).collect();
    starts.sort_by_key(|e| match *e {
        Edge::H(i, j) => (0, i, j),
        Edge::V(i, j) => (1, i, j),
    });
    for e in starts {
        let k = adj[&e][0];
        if used[k] {
            continue;
        }
        let (path, closed) = walk(k, e, &mut used);
        out.push(Polyline { points: path.into_iter().map(point).collect(), closed });
    }
    for k in 0..segments.len() {
        if used[k] {
            continue;
        }
        let (path, closed) = walk(k, segments[k].0, &mut used);
        out.push(Polyline { points: path.into_iter().map(point).collect(), closed });
    }
    out
}

/// Crossing points between two sets of polylines.
pub fn intersections<T: Real>(a: &[Polyline<T>], b: &[Polyline<T>]) -> Vec<(T, T)> {
    let segs = |ls: &[Polyline<T>]| -> Vec<((T, T), (T, T))> {
        let mut out = Vec::new();
        for l in ls {
            for w in l.points.windows(2) {
                out.push((w[0], w[1]));
            }
            if l.closed && l.points.len() > 2 {
                out.push((*l.points.last().unwrap(), l.points[0]));
            }
        }
        out
    };
    let (sa, sb) = (segs(a), segs(b));
    let mut out = Vec::new();
    for &(p, q) in &sa {
        for &(r, s) in &sb {
            let d1 = (q.0 - p.0, q.1 - p.1);
            let d2 = (s.0 - r.0, s.1 - r.1);
            let den = d1.0 * d2.1 - d1.1 * d2.0;
            if den.is_zero() {
                continue;
            }
            let w = (r.0 - p.0, r.1 - p.1);
            let t = (w.0 * d2.1 - w.1 * d2.0) / den;
            let u = (w.0 * d1.1 - w.1 * d1.0) / den;
            if t >= T::zero() && t <= T::one() && u >= T::zero() && u <= T::one() {
                out.push((p.0 + d1.0 * t, p.1 + d1.1 * t));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_grid(n: usize) -> ScalarGrid<f64> {
        let g = GridSpec::<f64>::new((-1.0, 1.0), n, (-1.0, 1.0), n).unwrap();
        let values =
            (0..n).map(|i| (0..n).map(|j| g.eps_at(i).powi(2) + g.delta_at(j).powi(2) - 0.25).collect()).collect();
        ScalarGrid { grid: g, values }
    }

    #[test]
    fn circle_is_one_closed_polyline() {
        let s = circle_grid(41);
        let lines = trace_zero_level(&s, |x, y| x * x + y * y - 0.25);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        for &(x, y) in &lines[0].points {
            assert!(((x * x + y * y).sqrt() - 0.5).abs() < 5e-3);
        }
    }

    #[test]
    fn line_runs_boundary_to_boundary() {
        let g = GridSpec::<f64>::new((0.0, 1.0), 11, (0.0, 1.0), 7).unwrap();
        let values = (0..11).map(|i| (0..7).map(|_| g.eps_at(i) - 0.33).collect()).collect();
        let lines = trace_zero_level(&ScalarGrid { grid: g, values }, |x, _| x - 0.33);
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
        assert_eq!(lines[0].points.len(), 7);
        assert!(lines[0].points.iter().all(|p| (p.0 - 0.33).abs() < 1e-12));
    }

    #[test]
    fn saddle_uses_center_sign() {
        // f = x·y has a saddle at the origin cell.
        let g = GridSpec::new((-1.0, 1.0), 2, (-1.0, 1.0), 2).unwrap();
        let values = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let s = ScalarGrid { grid: g, values };
        assert_eq!(trace_zero_level(&s, |_, _| 0.5).len(), 2);
        assert_eq!(trace_zero_level(&s, |_, _| -0.5).len(), 2);
    }

    #[test]
    fn crossing_lines_intersect_once() {
        let a = Polyline { points: vec![(0.0, 0.0), (1.0, 1.0)], closed: false };
        let b = Polyline { points: vec![(0.0, 1.0), (1.0, 0.0)], closed: false };
        let x = intersections(&[a], &[b]);
        assert_eq!(x, vec![(0.5, 0.5)]);
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new((0.0, 1.0), 1, (0.0, 1.0), 3).is_err());
        assert!(GridSpec::new((0.0, f64::NAN), 3, (0.0, 1.0), 3).is_err());
    }
}
