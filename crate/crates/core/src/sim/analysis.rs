//! Scalar diagnostics extracted from fields: strain probes, damage
//! symmetry, crack-tip extent, and damage-lobe direction.

use crate::field::VectorField;
use crate::grid::Grid;

/// Relative change of a monitored series over its final `fraction` of
/// entries: `|y_end - y_start| / |y_end|`.
pub fn tail_relative_change(series: &[f64], fraction: f64) -> f64 {
    let n = series.len();
    let k = ((n as f64 * fraction).ceil() as usize).clamp(1, n - 1);
    let (start, end) = (series[n - 1 - k], series[n - 1]);
    (end - start).abs() / end.abs()
}

/// Central-difference strain `ε_aa` at node `p` over `±span` lattice steps
/// along axis `a`.
pub fn axial_strain(grid: &Grid, u: &VectorField, p: usize, axis: usize, span: usize) -> f64 {
    let s = span as i64;
    let mut plus = [0i64; 3];
    let mut minus = [0i64; 3];
    plus[axis] = s;
    minus[axis] = -s;
    let (Some(q1), Some(q0)) = (grid.offset_node(p, plus), grid.offset_node(p, minus)) else {
        return f64::NAN;
    };
    (u.get(axis, q1) - u.get(axis, q0)) / (2.0 * span as f64 * grid.h())
}

fn mirror(grid: &Grid, p: usize, axis: usize) -> usize {
    let mut ijk = grid.unflat(p);
    ijk[axis] = grid.dims()[axis] - 1 - ijk[axis];
    grid.flat(ijk)
}

/// Largest node-wise damage difference between the field and its mirror
/// images about the mid-planes of the listed axes.
pub fn damage_asymmetry(grid: &Grid, damage: &[f64], axes: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for &a in axes {
        for p in 0..grid.len() {
            worst = worst.max((damage[p] - damage[mirror(grid, p, a)]).abs());
        }
    }
    worst
}

/// Tips of the crack that runs along `y = yc` through `x = xc`: walking
/// outward from `xc` along the node rows adjacent to the line, the last
/// positions before damage drops below `threshold`. Damage elsewhere, such as
/// cracks starting at the plate edges, is ignored. `None` if the node at
/// `xc` is not damaged.
pub fn crack_tips(grid: &Grid, damage: &[f64], xc: f64, yc: f64, threshold: f64) -> Option<(f64, f64)> {
    let h = grid.h();
    let nx = grid.dims()[0] as i64;
    let mut best: Option<(f64, f64)> = None;
    for y in [yc - 0.5 * h, yc + 0.5 * h] {
        let start = grid.nearest_node(&[xc, y, 0.0]);
        if (grid.position(start)[1] - y).abs() > 0.5 * h || damage[start] < threshold {
            continue;
        }
        let i0 = grid.unflat(start)[0] as i64;
        let walk = |dir: i64| -> f64 {
            let mut last = start;
            let mut i = i0 + dir;
            while (0..nx).contains(&i) {
                let q = grid.offset_node(start, [i - i0, 0, 0]).expect("row node");
                if damage[q] < threshold {
                    break;
                }
                last = q;
                i += dir;
            }
            grid.position(last)[0]
        };
        let (lo, hi) = (walk(-1), walk(1));
        best = Some(match best {
            None => (lo, hi),
            Some((a, b)) => (a.min(lo), b.max(hi)),
        });
    }
    best
}

/// Damage-weighted centroid, in the `x`–`y` plane, of the nodes within
/// `radius` of `tip` whose damage grew by at least `threshold`.
pub fn lobe_centroid(grid: &Grid, growth: &[f64], tip: [f64; 2], radius: f64, threshold: f64) -> Option<[f64; 2]> {
    let (mut wx, mut wy, mut w) = (0.0, 0.0, 0.0);
    for (p, &g) in growth.iter().enumerate() {
        if g < threshold {
            continue;
        }
        let x = grid.position(p);
        let (dx, dy) = (x[0] - tip[0], x[1] - tip[1]);
        if dx * dx + dy * dy <= radius * radius {
            wx += g * x[0];
            wy += g * x[1];
            w += g;
        }
    }
    (w > 0.0).then(|| [wx / w, wy / w])
}

/// Angle in degrees, in `[0, 180]`, between `axis` and `v`.
pub fn angle_between(axis: [f64; 2], v: [f64; 2]) -> f64 {
    let dot = axis[0] * v[0] + axis[1] * v[1];
    let n = (axis[0].hypot(axis[1])) * v[0].hypot(v[1]);
    (dot / n).clamp(-1.0, 1.0).acos().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strain_of_linear_field() {
        let g = Grid::build(&[(0.0, 2.0), (0.0, 1.0)], 0.1, Some(0.1)).unwrap();
        let mut u = VectorField::zeros(2, g.len());
        for p in 0..g.len() {
            u.set(0, p, 1e-3 * g.position(p)[0]);
        }
        let c = g.nearest_node(&[1.0, 0.5]);
        assert!((axial_strain(&g, &u, c, 0, 5) - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn symmetric_damage_has_zero_asymmetry() {
        let g = Grid::build(&[(0.0, 4.0), (0.0, 4.0)], 1.0, Some(1.0)).unwrap();
        let mut d = vec![0.0; g.len()];
        d[g.flat([1, 1, 0])] = 0.5;
        d[g.flat([2, 1, 0])] = 0.5;
        d[g.flat([1, 2, 0])] = 0.5;
        d[g.flat([2, 2, 0])] = 0.5;
        assert_eq!(damage_asymmetry(&g, &d, &[0, 1]), 0.0);
        d[0] = 0.1;
        assert_eq!(damage_asymmetry(&g, &d, &[0]), 0.1);
    }

    #[test]
    fn tips_ignore_disconnected_damage() {
        let g = Grid::build(&[(0.0, 10.0), (0.0, 4.0)], 1.0, Some(1.0)).unwrap();
        let mut d = vec![0.0; g.len()];
        for i in 3..7 {
            d[g.flat([i, 1, 0])] = 0.5;
        }
        d[g.flat([9, 2, 0])] = 0.5;
        assert_eq!(crack_tips(&g, &d, 5.0, 2.0, 0.3), Some((3.5, 6.5)));
        assert_eq!(crack_tips(&g, &d, 1.0, 2.0, 0.3), None);
    }

    #[test]
    fn angles() {
        assert!((angle_between([0.0, 1.0], [1.0, 1.0]) - 45.0).abs() < 1e-12);
        assert!((angle_between([0.0, 1.0], [-1.0, -1.0]) - 135.0).abs() < 1e-12);
    }

    #[test]
    fn tail_change() {
        let s: Vec<f64> = (1..=100).map(|i| 1.0 - (-(i as f64) / 5.0).exp()).collect();
        assert!(tail_relative_change(&s, 0.1) < 1e-3);
        assert!(tail_relative_change(&[1.0, 2.0], 0.1) > 0.4);
    }
}
