//! Planar and 3D geometry primitives shared across the crate.
//!
//! Units are meters, coordinates right-handed with z pointing up.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// 2D point / vector in the floor plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

/// 3D point / vector, z up.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2 { x: a[0], y: a[1] }
    }
}
impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}
impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3 { x: a[0], y: a[1], z: a[2] }
    }
}
impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

pub const fn vec2(x: f64, y: f64) -> Vec2 {
    Vec2 { x, y }
}
pub const fn vec3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec2 {
    pub const ZERO: Vec2 = vec2(0.0, 0.0);

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z component of the 2D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        vec2(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn from_angle(a: f64) -> Vec2 {
        vec2(a.cos(), a.sin())
    }

    pub fn rotate(self, a: f64) -> Vec2 {
        let (s, c) = a.sin_cos();
        vec2(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn normalized_or(self, fallback: Vec2) -> Vec2 {
        let n = self.norm();
        if n > 1e-12 {
            self / n
        } else {
            fallback
        }
    }

    /// Zero vector when the input is (near) zero, unit vector otherwise.
    pub fn normalized_or_zero(self) -> Vec2 {
        self.normalized_or(Vec2::ZERO)
    }

    pub fn clamp_norm(self, max: f64) -> Vec2 {
        let n = self.norm();
        if n > max {
            self * (max / n)
        } else {
            self
        }
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }

    pub fn with_z(self, z: f64) -> Vec3 {
        vec3(self.x, self.y, z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = vec3(0.0, 0.0, 0.0);
    pub const Z: Vec3 = vec3(0.0, 0.0, 1.0);

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        vec3(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn normalized_or(self, fallback: Vec3) -> Vec3 {
        let n = self.norm();
        if n > 1e-12 {
            self / n
        } else {
            fallback
        }
    }

    pub fn normalized_or_zero(self) -> Vec3 {
        self.normalized_or(Vec3::ZERO)
    }

    pub fn lerp(self, o: Vec3, t: f64) -> Vec3 {
        self + (o - self) * t
    }

    pub fn xy(self) -> Vec2 {
        vec2(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Rotation about the z axis.
    pub fn rotate_z(self, a: f64) -> Vec3 {
        let (s, c) = a.sin_cos();
        vec3(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }

    pub fn min_elem(self, o: Vec3) -> Vec3 {
        vec3(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max_elem(self, o: Vec3) -> Vec3 {
        vec3(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }
}

macro_rules! impl_vec_ops {
    ($t:ty { $($f:ident),+ }) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t { Self { $($f: self.$f + o.$f),+ } }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t { Self { $($f: self.$f - o.$f),+ } }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t { Self { $($f: -self.$f),+ } }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, s: f64) -> $t { Self { $($f: self.$f * s),+ } }
        }
        impl Div<f64> for $t {
            type Output = $t;
            fn div(self, s: f64) -> $t { Self { $($f: self.$f / s),+ } }
        }
        impl AddAssign for $t {
            fn add_assign(&mut self, o: $t) { $(self.$f += o.$f;)+ }
        }
        impl SubAssign for $t {
            fn sub_assign(&mut self, o: $t) { $(self.$f -= o.$f;)+ }
        }
    };
}

impl_vec_ops!(Vec2 { x, y });
impl_vec_ops!(Vec3 { x, y, z });

/// Axis-aligned rectangle in the floor plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(min: Vec2, max: Vec2) -> Rect {
        Rect { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }

    pub fn contains(&self, p: Vec2, eps: f64) -> bool {
        p.x >= self.min.x - eps
            && p.x <= self.max.x + eps
            && p.y >= self.min.y - eps
            && p.y <= self.max.y + eps
    }

    pub fn expand(&self, m: f64) -> Rect {
        Rect::new(self.min - vec2(m, m), self.max + vec2(m, m))
    }
}

/// Planar rigid transform with a 3D translation: rotation about z followed
/// by a translation. Used for body canonicalization and object placements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidXY {
    pub yaw: f64,
    pub t: Vec3,
}

impl RigidXY {
    pub const IDENTITY: RigidXY = RigidXY { yaw: 0.0, t: Vec3::ZERO };

    pub fn new(yaw: f64, t: Vec3) -> RigidXY {
        RigidXY { yaw, t }
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        p.rotate_z(self.yaw) + self.t
    }

    /// Rotates a direction without translating it.
    pub fn apply_dir(&self, v: Vec3) -> Vec3 {
        v.rotate_z(self.yaw)
    }

    pub fn apply_dir2(&self, v: Vec2) -> Vec2 {
        v.rotate(self.yaw)
    }

    pub fn apply2(&self, p: Vec2) -> Vec2 {
        p.rotate(self.yaw) + self.t.xy()
    }

    pub fn inverse(&self) -> RigidXY {
        RigidXY {
            yaw: -self.yaw,
            t: -(self.t.rotate_z(-self.yaw)),
        }
    }
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut a = a % std::f64::consts::TAU;
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    } else if a <= -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    }
    a
}

/// Cubic smoothstep on [0, 1]: zero slope at both ends.
pub fn smoothstep01(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

// ---------------------------------------------------------------------------
// Convex polygons
// ---------------------------------------------------------------------------

/// Convex hull of a planar point set (Andrew's monotone chain), CCW order.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| a.dist(*b) < 1e-12);
    let n = pts.len();
    if n < 3 {
        return pts;
    }
    let turn = |chain: &[Vec2], p: Vec2| {
        let a = chain[chain.len() - 2];
        let b = chain[chain.len() - 1];
        (b - a).cross(p - a)
    };
    let mut lower: Vec<Vec2> = Vec::with_capacity(n);
    for &p in &pts {
        while lower.len() >= 2 && turn(&lower, p) <= 1e-12 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::with_capacity(n);
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(&upper, p) <= 1e-12 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Point containment in a CCW convex polygon, boundary inclusive.
pub fn point_in_convex(p: Vec2, poly: &[Vec2], eps: f64) -> bool {
    if poly.len() < 3 {
        return false;
    }
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        if (b - a).cross(p - a) < -eps {
            return false;
        }
    }
    true
}

pub fn point_segment_dist(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = if ab.norm2() > 1e-18 {
        ((p - a).dot(ab) / ab.norm2()).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.dist(a + ab * t)
}

/// Distance from a point to a convex polygon; zero inside.
pub fn point_convex_dist(p: Vec2, poly: &[Vec2]) -> f64 {
    if point_in_convex(p, poly, 0.0) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for i in 0..poly.len() {
        let d = point_segment_dist(p, poly[i], poly[(i + 1) % poly.len()]);
        if d < best {
            best = d;
        }
    }
    best
}

/// Separating-axis overlap test for two convex polygons (closed: touching
/// counts as intersecting).
pub fn convex_intersects(a: &[Vec2], b: &[Vec2]) -> bool {
    let axes = |poly: &[Vec2]| -> Vec<Vec2> {
        (0..poly.len())
            .map(|i| (poly[(i + 1) % poly.len()] - poly[i]).perp())
            .collect()
    };
    for axis in axes(a).into_iter().chain(axes(b)) {
        let project = |poly: &[Vec2]| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &p in poly {
                let d = p.dot(axis);
                lo = lo.min(d);
                hi = hi.max(d);
            }
            (lo, hi)
        };
        let (a0, a1) = project(a);
        let (b0, b1) = project(b);
        if a1 < b0 - 1e-12 || b1 < a0 - 1e-12 {
            return false;
        }
    }
    true
}

/// Point-in-triangle test, boundary inclusive, for CCW triangles.
pub fn point_in_tri_2d(p: Vec2, a: Vec2, b: Vec2, c: Vec2, eps: f64) -> bool {
    (b - a).cross(p - a) >= -eps && (c - b).cross(p - b) >= -eps && (a - c).cross(p - c) >= -eps
}

// ---------------------------------------------------------------------------
// 3D helpers (SDF baking support)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb3 {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb3 {
    pub fn empty() -> Aabb3 {
        Aabb3 {
            min: vec3(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: vec3(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn from_points<I: IntoIterator<Item = Vec3>>(pts: I) -> Aabb3 {
        let mut b = Aabb3::empty();
        for p in pts {
            b.add_point(p);
        }
        b
    }

    pub fn add_point(&mut self, p: Vec3) {
        self.min = self.min.min_elem(p);
        self.max = self.max.max_elem(p);
    }

    pub fn union(&self, o: &Aabb3) -> Aabb3 {
        Aabb3 {
            min: self.min.min_elem(o.min),
            max: self.max.max_elem(o.max),
        }
    }

    pub fn expand(&self, m: f64) -> Aabb3 {
        Aabb3 {
            min: self.min - vec3(m, m, m),
            max: self.max + vec3(m, m, m),
        }
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn clamp_point(&self, p: Vec3) -> Vec3 {
        vec3(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
            p.z.clamp(self.min.z, self.max.z),
        )
    }

    /// Squared distance from a point to the box (zero inside).
    pub fn dist2(&self, p: Vec3) -> f64 {
        (p - self.clamp_point(p)).norm2()
    }

    /// Whether the segment [a, b] touches the box (slab test).
    pub fn segment_intersects(&self, a: Vec3, b: Vec3) -> bool {
        let d = b - a;
        let mut t0 = 0.0f64;
        let mut t1 = 1.0f64;
        for (da, amin, amax, pa) in [
            (d.x, self.min.x, self.max.x, a.x),
            (d.y, self.min.y, self.max.y, a.y),
            (d.z, self.min.z, self.max.z, a.z),
        ] {
            if da.abs() < 1e-15 {
                if pa < amin || pa > amax {
                    return false;
                }
            } else {
                let inv = 1.0 / da;
                let (mut ta, mut tb) = ((amin - pa) * inv, (amax - pa) * inv);
                if ta > tb {
                    std::mem::swap(&mut ta, &mut tb);
                }
                t0 = t0.max(ta);
                t1 = t1.min(tb);
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }

    /// Whether a ray (origin, unit-ish direction) touches the box.
    pub fn ray_intersects(&self, o: Vec3, d: Vec3) -> bool {
        let mut t0 = 0.0f64;
        let mut t1 = f64::INFINITY;
        for (da, amin, amax, pa) in [
            (d.x, self.min.x, self.max.x, o.x),
            (d.y, self.min.y, self.max.y, o.y),
            (d.z, self.min.z, self.max.z, o.z),
        ] {
            if da.abs() < 1e-15 {
                if pa < amin || pa > amax {
                    return false;
                }
            } else {
                let inv = 1.0 / da;
                let (mut ta, mut tb) = ((amin - pa) * inv, (amax - pa) * inv);
                if ta > tb {
                    std::mem::swap(&mut ta, &mut tb);
                }
                t0 = t0.max(ta);
                t1 = t1.min(tb);
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }
}

/// Squared distance from point `p` to triangle `(a, b, c)`.
pub fn point_triangle_dist2(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> f64 {
    // Region classification following Ericson, "Real-Time Collision Detection".
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm2();
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm2();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (ap - ab * v).norm2();
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm2();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (ap - ac * w).norm2();
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (bp - (c - b) * w).norm2();
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (ap - (ab * v + ac * w)).norm2()
}

/// Parametric intersection of ray `o + t d` with a triangle (Moller-Trumbore).
/// Returns `t > eps`, or None for misses and near-parallel configurations.
pub fn ray_triangle_t(o: Vec3, d: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let pv = d.cross(e2);
    let det = e1.dot(pv);
    if det.abs() < 1e-14 {
        return None;
    }
    let inv = 1.0 / det;
    let tv = o - a;
    let u = tv.dot(pv) * inv;
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let qv = tv.cross(e1);
    let v = d.dot(qv) * inv;
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    let t = e2.dot(qv) * inv;
    if t > 1e-9 {
        Some(t)
    } else {
        None
    }
}

/// Whether segment [p, q] crosses the triangle.
pub fn segment_triangle_intersects(p: Vec3, q: Vec3, a: Vec3, b: Vec3, c: Vec3) -> bool {
    let d = q - p;
    match ray_triangle_t(p, d, a, b, c) {
        Some(t) => t <= 1.0 + 1e-9,
        None => false,
    }
}
