//! SDF baking: unsigned distances from a triangle BVH, sign from a
//! boundary flood fill over grid edges, and a ray-parity consistency check
//! that rejects open meshes.

use super::bvh::TriBvh;
use super::{SdfError, SdfGrid};
use crate::geom::{vec3, Vec3};
use crate::mesh::TriMesh;
use rayon::prelude::*;
use std::collections::VecDeque;

/// Bakes a signed-distance grid with `resolution` nodes per axis over the
/// mesh AABB padded by `margin` meters, plus a central-difference gradient
/// grid. The mesh must enclose its interior (watertight, possibly composed
/// of touching closed parts).
pub fn bake_sdf(mesh: &TriMesh, resolution: usize, margin: f64) -> Result<SdfGrid, SdfError> {
    mesh.validate()?;
    if resolution < 8 {
        return Err(SdfError::Params(format!("resolution {resolution} < 8")));
    }
    if !(margin > 0.0) {
        return Err(SdfError::Params(format!("margin {margin} must be > 0")));
    }
    let bounds = mesh.aabb().expand(margin);
    let r = resolution;
    let ext = bounds.extent();
    let n = (r - 1) as f64;
    let spacing = vec3(ext.x / n, ext.y / n, ext.z / n);
    let max_spacing = spacing.x.max(spacing.y).max(spacing.z);
    let bvh = TriBvh::build(mesh);

    let node_pos = |ix: usize, iy: usize, iz: usize| -> Vec3 {
        bounds.min
            + vec3(
                ix as f64 * spacing.x,
                iy as f64 * spacing.y,
                iz as f64 * spacing.z,
            )
    };

    // Unsigned distances, parallel over z-slabs.
    let dist: Vec<f64> = (0..r)
        .into_par_iter()
        .flat_map_iter(|iz| {
            let bvh = &bvh;
            (0..r).flat_map(move |iy| {
                (0..r).map(move |ix| bvh.distance(node_pos(ix, iy, iz)))
            })
        })
        .collect();

    let idx = |ix: usize, iy: usize, iz: usize| (iz * r + iy) * r + ix;

    // Outside-region flood fill from the grid boundary. A grid edge is
    // passable unless the segment between its nodes crosses the surface;
    // only edges with an endpoint near the surface can cross at all.
    let edge_blocked = |a: (usize, usize, usize), b: (usize, usize, usize)| -> bool {
        let (pa, pb) = (node_pos(a.0, a.1, a.2), node_pos(b.0, b.1, b.2));
        let len = (pb - pa).norm();
        if dist[idx(a.0, a.1, a.2)] > len && dist[idx(b.0, b.1, b.2)] > len {
            return false;
        }
        bvh.segment_hits(pa, pb)
    };

    let mut outside = vec![false; r * r * r];
    let mut queue: VecDeque<(usize, usize, usize)> = VecDeque::new();
    for iz in 0..r {
        for iy in 0..r {
            for ix in 0..r {
                if ix == 0 || iy == 0 || iz == 0 || ix == r - 1 || iy == r - 1 || iz == r - 1 {
                    if !outside[idx(ix, iy, iz)] {
                        outside[idx(ix, iy, iz)] = true;
                        queue.push_back((ix, iy, iz));
                    }
                }
            }
        }
    }
    while let Some((ix, iy, iz)) = queue.pop_front() {
        let neighbors = [
            (ix.wrapping_sub(1), iy, iz),
            (ix + 1, iy, iz),
            (ix, iy.wrapping_sub(1), iz),
            (ix, iy + 1, iz),
            (ix, iy, iz.wrapping_sub(1)),
            (ix, iy, iz + 1),
        ];
        for nb in neighbors {
            if nb.0 >= r || nb.1 >= r || nb.2 >= r {
                continue;
            }
            if outside[idx(nb.0, nb.1, nb.2)] {
                continue;
            }
            if edge_blocked((ix, iy, iz), nb) {
                continue;
            }
            outside[idx(nb.0, nb.1, nb.2)] = true;
            queue.push_back(nb);
        }
    }

    // Consistency probe: three axis-aligned ray parities per sampled node
    // must agree with each other and with the flood-fill classification.
    // Open meshes leak the fill and scatter parities, tripping this check.
    let mut probes = 0usize;
    let mut bad = 0usize;
    let stride = ((r * r * r) / 4096).max(1);
    let mut k = 0usize;
    let mut hash = 0x2545f4914f6cdd1du64;
    for iz in 0..r {
        for iy in 0..r {
            for ix in 0..r {
                k += 1;
                if k % stride != 0 || probes >= 600 {
                    continue;
                }
                let d = dist[idx(ix, iy, iz)];
                if d < 1.5 * max_spacing {
                    continue;
                }
                hash = hash.wrapping_mul(6364136223846793005).wrapping_add(k as u64);
                let jit = |h: u64| (((h >> 40) as f64) / (1u64 << 24) as f64 - 0.5) * 0.3;
                let o = node_pos(ix, iy, iz)
                    + vec3(
                        jit(hash) * spacing.x,
                        jit(hash.rotate_left(21)) * spacing.y,
                        jit(hash.rotate_left(42)) * spacing.z,
                    );
                let px = bvh.ray_hit_count(o, vec3(1.0, 0.0, 0.0)) % 2 == 1;
                let py = bvh.ray_hit_count(o, vec3(0.0, 1.0, 0.0)) % 2 == 1;
                let pz = bvh.ray_hit_count(o, vec3(0.0, 0.0, 1.0)) % 2 == 1;
                let flood_inside = !outside[idx(ix, iy, iz)];
                probes += 1;
                if px != py || py != pz || px != flood_inside {
                    bad += 1;
                }
            }
        }
    }
    if probes > 0 {
        let frac = bad as f64 / probes as f64;
        if frac > 0.02 {
            return Err(SdfError::NotWatertight(frac * 100.0));
        }
    }

    let values: Vec<f32> = (0..r * r * r)
        .map(|i| {
            let d = dist[i];
            if outside[i] {
                d as f32
            } else {
                -d as f32
            }
        })
        .collect();

    // Central differences, one-sided at the borders.
    let mut gradients = vec![[0.0f32; 3]; r * r * r];
    let diff = |lo: f32, hi: f32, h: f64| ((hi - lo) as f64 / h) as f32;
    for iz in 0..r {
        for iy in 0..r {
            for ix in 0..r {
                let i = idx(ix, iy, iz);
                let gx = match ix {
                    0 => diff(values[i], values[idx(ix + 1, iy, iz)], spacing.x),
                    x if x == r - 1 => diff(values[idx(ix - 1, iy, iz)], values[i], spacing.x),
                    _ => diff(
                        values[idx(ix - 1, iy, iz)],
                        values[idx(ix + 1, iy, iz)],
                        2.0 * spacing.x,
                    ),
                };
                let gy = match iy {
                    0 => diff(values[i], values[idx(ix, iy + 1, iz)], spacing.y),
                    y if y == r - 1 => diff(values[idx(ix, iy - 1, iz)], values[i], spacing.y),
                    _ => diff(
                        values[idx(ix, iy - 1, iz)],
                        values[idx(ix, iy + 1, iz)],
                        2.0 * spacing.y,
                    ),
                };
                let gz = match iz {
                    0 => diff(values[i], values[idx(ix, iy, iz + 1)], spacing.z),
                    z if z == r - 1 => diff(values[idx(ix, iy, iz - 1)], values[i], spacing.z),
                    _ => diff(
                        values[idx(ix, iy, iz - 1)],
                        values[idx(ix, iy, iz + 1)],
                        2.0 * spacing.z,
                    ),
                };
                gradients[i] = [gx, gy, gz];
            }
        }
    }

    Ok(SdfGrid::from_parts(resolution, bounds, values, gradients))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::box_mesh;
    use crate::scene::{object_library, FurnitureConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn touching_component_furniture_bakes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for t in object_library(&FurnitureConfig::default(), &mut rng) {
            let g = bake_sdf(&t.mesh, 48, 0.3).unwrap();
            // A point inside a solid slab must read negative: seat interior
            // for sittable pieces, top-plate interior for desks and tables.
            let probe = match t.seat {
                Some(s) => vec3(s.center.x, s.center.y, s.center.z - 0.03),
                None => {
                    let bb = t.mesh.aabb();
                    let c = (bb.min + bb.max) * 0.5;
                    vec3(c.x, c.y, bb.max.z - 0.02)
                }
            };
            let (v, _) = g.sample(probe);
            assert!(v < 0.0, "{:?}: interior probe {v}", t.category);
        }
    }

    #[test]
    fn sphere_nodes_near_radius_1_5x() {
        // Nodes around 1.5 units from the center of a unit sphere read ~0.5.
        let g = bake_sdf(&crate::mesh::icosphere(1.0, 4), 64, 0.6).unwrap();
        let r = g.resolution;
        let mut checked = 0;
        for iz in 0..r {
            for iy in 0..r {
                for ix in 0..r {
                    let p = g.node_position(ix, iy, iz);
                    if (p.norm() - 1.5).abs() < 0.05 {
                        let v = g.node_value(ix, iy, iz);
                        assert!((v - (p.norm() - 1.0)).abs() <= 0.02, "{p:?}: {v}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn degenerate_params_rejected() {
        let m = box_mesh(vec3(0.0, 0.0, 0.0), vec3(1.0, 1.0, 1.0));
        assert!(matches!(bake_sdf(&m, 4, 0.3), Err(SdfError::Params(_))));
        assert!(matches!(bake_sdf(&m, 32, 0.0), Err(SdfError::Params(_))));
    }
}
