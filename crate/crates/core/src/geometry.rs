//! Axis-aligned boxes and the segment predicates used to seed cracks.
//!
//! Orientation signs are first evaluated in `f64`; when the result is too
//! close to zero to trust, they are recomputed exactly on the rational
//! expansion of the inputs so that seeding never depends on rounding noise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Closed axis-aligned box. Missing trailing axes are unbounded, so a 2D box
/// matches every `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "AabbRepr", into = "AabbRepr")]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn new(min: &[f64], max: &[f64]) -> Self {
        let mut lo = [f64::NEG_INFINITY; 3];
        let mut hi = [f64::INFINITY; 3];
        for (a, (&l, &h)) in min.iter().zip(max).enumerate().take(3) {
            lo[a] = l;
            hi[a] = h;
        }
        Self { min: lo, max: hi }
    }

    pub fn everything() -> Self {
        Self::new(&[], &[])
    }

    pub fn contains(&self, x: &[f64; 3]) -> bool {
        (0..3).all(|a| x[a] >= self.min[a] && x[a] <= self.max[a])
    }

    /// Containment widened by `tol` on every side.
    pub fn contains_with(&self, x: &[f64; 3], tol: f64) -> bool {
        (0..3).all(|a| x[a] >= self.min[a] - tol && x[a] <= self.max[a] + tol)
    }

    pub fn expanded(&self, by: f64) -> Self {
        let mut out = *self;
        for a in 0..3 {
            out.min[a] -= by;
            out.max[a] += by;
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct AabbRepr {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl From<AabbRepr> for Aabb {
    fn from(r: AabbRepr) -> Self {
        Aabb::new(&r.min, &r.max)
    }
}

impl From<Aabb> for AabbRepr {
    fn from(b: Aabb) -> Self {
        let mut len = 3;
        while len > 0 && b.min[len - 1] == f64::NEG_INFINITY && b.max[len - 1] == f64::INFINITY {
            len -= 1;
        }
        AabbRepr { min: b.min[..len].to_vec(), max: b.max[..len].to_vec() }
    }
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(BigInt::zero()))
}

fn sign_of(r: &BigRational) -> Ordering {
    if r.is_zero() {
        Ordering::Equal
    } else if r.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Sign of the 2D orientation determinant of `(a, b, c)`.
pub fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Ordering {
    let l = (b[0] - a[0]) * (c[1] - a[1]);
    let r = (b[1] - a[1]) * (c[0] - a[0]);
    let det = l - r;
    let bound = 1e-12 * (l.abs() + r.abs());
    if det.abs() > bound {
        return det.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
    }
    let [ax, ay] = a.map(exact);
    let [bx, by] = b.map(exact);
    let [cx, cy] = c.map(exact);
    let det = (&bx - &ax) * (&cy - &ay) - (&by - &ay) * (&cx - &ax);
    sign_of(&det)
}

/// Sign of the 3D orientation of `d` relative to the plane through `a, b, c`.
pub fn orient3d(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> Ordering {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let w = [d[0] - a[0], d[1] - a[1], d[2] - a[2]];
    let terms = [
        u[0] * (v[1] * w[2] - v[2] * w[1]),
        u[1] * (v[2] * w[0] - v[0] * w[2]),
        u[2] * (v[0] * w[1] - v[1] * w[0]),
    ];
    let det: f64 = terms.iter().sum();
    let mag = u.iter().map(|x| x.abs()).sum::<f64>()
        * v.iter().map(|x| x.abs()).sum::<f64>()
        * w.iter().map(|x| x.abs()).sum::<f64>();
    if det.abs() > 1e-12 * mag {
        return det.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
    }
    let ex = |p: [f64; 3], q: [f64; 3]| -> [BigRational; 3] {
        [exact(p[0]) - exact(q[0]), exact(p[1]) - exact(q[1]), exact(p[2]) - exact(q[2])]
    };
    let u = ex(b, a);
    let v = ex(c, a);
    let w = ex(d, a);
    let det = &u[0] * (&v[1] * &w[2] - &v[2] * &w[1])
        + &u[1] * (&v[2] * &w[0] - &v[0] * &w[2])
        + &u[2] * (&v[0] * &w[1] - &v[1] * &w[0]);
    sign_of(&det)
}

/// Whether the closed segment `[c0, c1]` meets the open segment `(p, q)`.
///
/// Collinear overlap counts as grazing and returns `false`; so does contact at
/// `p` or `q` themselves.
pub fn crack_cuts_bond_2d(c0: [f64; 2], c1: [f64; 2], p: [f64; 2], q: [f64; 2]) -> bool {
    let o1 = orient2d(p, q, c0);
    let o2 = orient2d(p, q, c1);
    if o1 == Ordering::Equal && o2 == Ordering::Equal {
        return false;
    }
    if o1 == o2 {
        return false;
    }
    let o3 = orient2d(c0, c1, p);
    let o4 = orient2d(c0, c1, q);
    o3 != Ordering::Equal && o4 != Ordering::Equal && o3 != o4
}

/// Whether the open segment `(p, q)` crosses the closed planar rectangle
/// spanned by `origin + s·e1 + t·e2`, `s, t ∈ [0, 1]`.
///
/// Segments lying in the plane, or touching it only at an endpoint, do not
/// cross.
pub fn crack_cuts_bond_3d(origin: [f64; 3], e1: [f64; 3], e2: [f64; 3], p: [f64; 3], q: [f64; 3]) -> bool {
    let a = origin;
    let b = [a[0] + e1[0], a[1] + e1[1], a[2] + e1[2]];
    let c = [a[0] + e2[0], a[1] + e2[1], a[2] + e2[2]];
    let sp = orient3d(a, b, c, p);
    let sq = orient3d(a, b, c, q);
    if sp == Ordering::Equal || sq == Ordering::Equal || sp == sq {
        return false;
    }
    // Intersection point with the plane; test it against the rectangle in
    // its own (s, t) coordinates.
    let n = cross(e1, e2);
    let dp = dot(n, sub(p, a));
    let dq = dot(n, sub(q, a));
    let t = dp / (dp - dq);
    let x = [
        p[0] + t * (q[0] - p[0]),
        p[1] + t * (q[1] - p[1]),
        p[2] + t * (q[2] - p[2]),
    ];
    let r = sub(x, a);
    let g11 = dot(e1, e1);
    let g22 = dot(e2, e2);
    let g12 = dot(e1, e2);
    let det = g11 * g22 - g12 * g12;
    let r1 = dot(r, e1);
    let r2 = dot(r, e2);
    let s = (r1 * g22 - r2 * g12) / det;
    let u = (r2 * g11 - r1 * g12) / det;
    let tol = 1e-12;
    (-tol..=1.0 + tol).contains(&s) && (-tol..=1.0 + tol).contains(&u)
}

pub fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
