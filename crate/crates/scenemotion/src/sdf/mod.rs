//! Signed distance grids with precomputed gradients.
//!
//! Grids are baked once per object mesh and sampled with trilinear
//! interpolation at marker and body-surface positions. Values are negative
//! inside the solid. Queries outside the grid bounds are clamped to the
//! boundary and offset by the clamp distance, so far-away bodies see large
//! positive distances and an outward-pointing gradient.

mod bake;
mod bvh;
mod cache;

pub use bake::bake_sdf;
pub use bvh::TriBvh;
pub use cache::{bake_or_load, cache_path, load_grid, save_grid};

use crate::geom::{vec3, Aabb3, Vec3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdfError {
    #[error("mesh is not watertight: sign checks disagree on {0:.1}% of probes")]
    NotWatertight(f64),
    #[error("invalid mesh: {0}")]
    Mesh(#[from] crate::mesh::MeshError),
    #[error("bad sdf parameters: {0}")]
    Params(String),
    #[error("sdf cache format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub const DEFAULT_SDF_RESOLUTION: usize = 128;
pub const DEFAULT_SDF_MARGIN: f64 = 0.3;

/// Dense signed-distance grid over the padded mesh bounds.
#[derive(Clone, Debug)]
pub struct SdfGrid {
    pub resolution: usize,
    pub bounds: Aabb3,
    spacing: Vec3,
    /// x-fastest layout: `values[(iz * r + iy) * r + ix]`.
    values: Vec<f32>,
    gradients: Vec<[f32; 3]>,
}

impl SdfGrid {
    pub(crate) fn from_parts(
        resolution: usize,
        bounds: Aabb3,
        values: Vec<f32>,
        gradients: Vec<[f32; 3]>,
    ) -> SdfGrid {
        let ext = bounds.extent();
        let n = (resolution - 1) as f64;
        SdfGrid {
            resolution,
            bounds,
            spacing: vec3(ext.x / n, ext.y / n, ext.z / n),
            values,
            gradients,
        }
    }

    pub fn spacing(&self) -> Vec3 {
        self.spacing
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn gradients(&self) -> &[[f32; 3]] {
        &self.gradients
    }

    #[inline]
    pub fn node_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (iz * self.resolution + iy) * self.resolution + ix
    }

    pub fn node_position(&self, ix: usize, iy: usize, iz: usize) -> Vec3 {
        self.bounds.min
            + vec3(
                ix as f64 * self.spacing.x,
                iy as f64 * self.spacing.y,
                iz as f64 * self.spacing.z,
            )
    }

    pub fn node_value(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        self.values[self.node_index(ix, iy, iz)] as f64
    }

    /// Trilinear sample of value and gradient. Points outside the bounds are
    /// clamped; the value is offset by the distance to the clamp point and
    /// the gradient points from the clamp point to the query.
    pub fn sample(&self, p: Vec3) -> (f64, Vec3) {
        let q = self.bounds.clamp_point(p);
        let outside = p - q;
        let out_dist = outside.norm();

        let r = self.resolution;
        let local = q - self.bounds.min;
        let fx = (local.x / self.spacing.x).clamp(0.0, (r - 1) as f64);
        let fy = (local.y / self.spacing.y).clamp(0.0, (r - 1) as f64);
        let fz = (local.z / self.spacing.z).clamp(0.0, (r - 1) as f64);
        let ix = (fx.floor() as usize).min(r - 2);
        let iy = (fy.floor() as usize).min(r - 2);
        let iz = (fz.floor() as usize).min(r - 2);
        let (tx, ty, tz) = (fx - ix as f64, fy - iy as f64, fz - iz as f64);

        let mut value = 0.0f64;
        let mut grad = Vec3::ZERO;
        for (dz, wz) in [(0usize, 1.0 - tz), (1, tz)] {
            for (dy, wy) in [(0usize, 1.0 - ty), (1, ty)] {
                for (dx, wx) in [(0usize, 1.0 - tx), (1, tx)] {
                    let w = wx * wy * wz;
                    if w == 0.0 {
                        continue;
                    }
                    let idx = self.node_index(ix + dx, iy + dy, iz + dz);
                    value += w * self.values[idx] as f64;
                    let g = self.gradients[idx];
                    grad += vec3(g[0] as f64, g[1] as f64, g[2] as f64) * w;
                }
            }
        }

        if out_dist > 0.0 {
            (value + out_dist, outside / out_dist)
        } else {
            (value, grad)
        }
    }

    /// Elementwise `sample` over a point batch.
    pub fn batch_sample(&self, points: &[Vec3]) -> (Vec<f64>, Vec<Vec3>) {
        let mut values = Vec::with_capacity(points.len());
        let mut grads = Vec::with_capacity(points.len());
        for &p in points {
            let (v, g) = self.sample(p);
            values.push(v);
            grads.push(g);
        }
        (values, grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec3;
    use crate::mesh::{box_mesh, icosphere};

    fn sphere_grid(res: usize) -> SdfGrid {
        bake_sdf(&icosphere(0.5, 3), res, 0.3).unwrap()
    }

    #[test]
    fn node_query_is_exact() {
        let g = sphere_grid(32);
        let p = g.node_position(5, 7, 9);
        let (v, _) = g.sample(p);
        assert_eq!(v, g.node_value(5, 7, 9));
    }

    #[test]
    fn midpoint_is_average_of_nodes() {
        let g = sphere_grid(32);
        let a = g.node_position(5, 7, 9);
        let b = g.node_position(6, 7, 9);
        let (va, _) = g.sample(a);
        let (vb, _) = g.sample(b);
        let (vm, _) = g.sample((a + b) * 0.5);
        assert!((vm - 0.5 * (va + vb)).abs() < 1e-12);
    }

    #[test]
    fn outside_bounds_clamp_convention() {
        // Sphere of radius 0.5: bounds reach 0.8; query at x = 1.0 is outside.
        let g = sphere_grid(48);
        let (v, grad) = g.sample(vec3(1.0, 0.0, 0.0));
        assert!((v - 0.5).abs() < 0.02, "value {v}");
        assert!(grad.dist(vec3(1.0, 0.0, 0.0)) < 0.1, "gradient {grad:?}");
    }

    #[test]
    fn sphere_accuracy_near_surface() {
        let g = sphere_grid(64);
        let r = g.resolution;
        let mut checked = 0;
        for iz in 0..r {
            for iy in 0..r {
                for ix in 0..r {
                    let p = g.node_position(ix, iy, iz);
                    let analytic = p.norm() - 0.5;
                    if analytic.abs() < 0.1 && p.norm() > 0.05 {
                        let v = g.node_value(ix, iy, iz);
                        assert!(
                            (v - analytic).abs() <= 0.02,
                            "node {p:?}: {v} vs {analytic}"
                        );
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn box_center_node_value() {
        // Odd resolution puts a node exactly at the box center.
        let g = bake_sdf(&box_mesh(vec3(-0.5, -0.5, -0.5), vec3(0.5, 0.5, 0.5)), 65, 0.3).unwrap();
        let mid = (g.resolution - 1) / 2;
        let v = g.node_value(mid, mid, mid);
        assert!((v + 0.5).abs() <= 0.02, "center value {v}");
        // A node on the surface reads near zero.
        let (vs, _) = g.sample(vec3(0.5, 0.0, 0.0));
        assert!(vs.abs() <= g.spacing().norm(), "surface value {vs}");
    }

    #[test]
    fn batch_matches_pointwise() {
        let g = sphere_grid(32);
        let pts: Vec<Vec3> = (0..67)
            .map(|i| vec3(0.02 * i as f64 - 0.6, 0.01 * i as f64, 0.3))
            .collect();
        let (vals, grads) = g.batch_sample(&pts);
        assert_eq!(vals.len(), 67);
        for (i, &p) in pts.iter().enumerate() {
            let (v, g2) = g.sample(p);
            assert_eq!(v.to_bits(), vals[i].to_bits());
            assert_eq!(g2, grads[i]);
        }
        let (e1, e2) = g.batch_sample(&[]);
        assert!(e1.is_empty() && e2.is_empty());
    }

    #[test]
    fn far_markers_all_positive() {
        let g = sphere_grid(24);
        let pts: Vec<Vec3> = (0..67).map(|i| vec3(5.0 + i as f64 * 0.01, 2.0, 1.0)).collect();
        let (vals, _) = g.batch_sample(&pts);
        assert!(vals.iter().all(|&v| v > 0.3));
    }

    #[test]
    fn gradient_matches_value_finite_differences() {
        let g = sphere_grid(48);
        let mut rng_state = 0x12345u64;
        let mut rand01 = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((rng_state >> 33) as f64) / ((1u64 << 31) as f64)
        };
        let h = 0.5 * g.spacing().x;
        let mut tested = 0;
        for _ in 0..5000 {
            if tested >= 1000 {
                break;
            }
            let p = vec3(
                -0.6 + 1.2 * rand01(),
                -0.6 + 1.2 * rand01(),
                -0.6 + 1.2 * rand01(),
            );
            // Stay inside bounds and away from the center (medial axis).
            if p.norm() < 0.15 || p.norm() > 0.7 {
                continue;
            }
            let (_, grad) = g.sample(p);
            for axis in 0..3 {
                let mut dp = Vec3::ZERO;
                match axis {
                    0 => dp.x = h,
                    1 => dp.y = h,
                    _ => dp.z = h,
                }
                let (vp, _) = g.sample(p + dp);
                let (vm, _) = g.sample(p - dp);
                let fd = (vp - vm) / (2.0 * h);
                let gc = match axis {
                    0 => grad.x,
                    1 => grad.y,
                    _ => grad.z,
                };
                assert!(
                    (fd - gc).abs() < 0.05,
                    "axis {axis} at {p:?}: fd {fd} vs grad {gc}"
                );
            }
            tested += 1;
        }
        assert!(tested >= 500);
    }

    #[test]
    fn gradient_norm_near_unit_off_medial_axis() {
        let g = sphere_grid(48);
        let r = g.resolution;
        for iz in (2..r - 2).step_by(5) {
            for iy in (2..r - 2).step_by(5) {
                for ix in (2..r - 2).step_by(5) {
                    let p = g.node_position(ix, iy, iz);
                    if p.norm() < 0.15 {
                        continue;
                    }
                    let gv = g.gradients()[g.node_index(ix, iy, iz)];
                    let n = vec3(gv[0] as f64, gv[1] as f64, gv[2] as f64).norm();
                    assert!((0.5..=1.5).contains(&n), "|grad| = {n} at {p:?}");
                }
            }
        }
    }

    #[test]
    fn open_mesh_rejected() {
        // Box with the top two faces removed.
        let mut m = box_mesh(vec3(-0.5, -0.5, -0.5), vec3(0.5, 0.5, 0.5));
        m.faces.remove(3);
        m.faces.remove(2);
        assert!(matches!(
            bake_sdf(&m, 32, 0.3),
            Err(SdfError::NotWatertight(_))
        ));
    }

    #[test]
    fn sign_agrees_with_ray_parity_oracle() {
        let g = sphere_grid(48);
        let bvh = TriBvh::build(&icosphere(0.5, 3));
        let mut rng_state = 0x9876u64;
        let mut rand01 = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((rng_state >> 33) as f64) / ((1u64 << 31) as f64)
        };
        let mut agree = 0;
        let mut total = 0;
        for _ in 0..10_000 {
            let p = vec3(
                -0.75 + 1.5 * rand01(),
                -0.75 + 1.5 * rand01(),
                -0.75 + 1.5 * rand01(),
            );
            // Skip the ambiguous shell around the surface.
            if (p.norm() - 0.5).abs() < 0.04 {
                continue;
            }
            let (v, _) = g.sample(p);
            let inside_parity = bvh.ray_hit_count(p, vec3(1.0, 0.0, 0.0)) % 2 == 1;
            total += 1;
            if (v < 0.0) == inside_parity {
                agree += 1;
            }
        }
        assert_eq!(agree, total, "{agree}/{total} sign agreements");
    }
}
