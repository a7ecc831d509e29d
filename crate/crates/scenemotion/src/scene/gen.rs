//! Random scene synthesis.
//!
//! Layout follows four steps: sample the initial floor rectangle, sample
//! furniture per category, place each piece with a random rotation and
//! translation (rejecting overlaps), and finally expand the boundary until
//! every object keeps the configured clearance from the walls.

use super::furniture::build_category;
use super::{Category, Scene, SceneError, SceneGenConfig, SceneObject};
use crate::geom::{convex_intersects, vec2, Rect, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministically generates a scene for the seed. Objects that cannot be
/// placed without overlap within the configured attempt budget are dropped.
pub fn generate_scene(seed: u64, cfg: &SceneGenConfig) -> Result<Scene, SceneError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Step 1: initial rectangle. The upper bound reserves room for boundary
    // expansion so the final edges stay inside [edge_min, edge_max].
    let init_max = cfg.edge_max - 2.0 * cfg.boundary_margin;
    let w = rng.gen_range(cfg.edge_min..=init_max);
    let h = rng.gen_range(cfg.edge_min..=init_max);
    let mut floor = Rect::new(Vec2::ZERO, vec2(w, h));

    // Step 2: sample object counts per category.
    let mut wanted: Vec<Category> = Vec::new();
    for cat in Category::ALL {
        let cap = cfg.cap(cat);
        let count = if cap == 0 { 0 } else { rng.gen_range(0..=cap) };
        for _ in 0..count {
            wanted.push(cat);
        }
    }

    // Step 3: random rotation + translation with overlap rejection.
    let mut objects: Vec<SceneObject> = Vec::new();
    for cat in wanted {
        let template = build_category(cat, &cfg.furniture, &mut rng);
        let radius = template
            .mesh
            .vertices
            .iter()
            .map(|v| v.xy().norm())
            .fold(0.0f64, f64::max);
        let mut placed = None;
        for _ in 0..cfg.place_attempts {
            let yaw = rng.gen_range(0.0..std::f64::consts::TAU);
            let lo_x = floor.min.x + radius;
            let hi_x = floor.max.x - radius;
            let lo_y = floor.min.y + radius;
            let hi_y = floor.max.y - radius;
            if lo_x >= hi_x || lo_y >= hi_y {
                break; // object does not fit in this floor at all
            }
            let t = vec2(rng.gen_range(lo_x..hi_x), rng.gen_range(lo_y..hi_y));
            let candidate =
                SceneObject::new(cat, template.mesh.clone(), t, yaw, template.seat);
            let inside = candidate
                .footprint()
                .iter()
                .all(|p| floor.contains(*p, 0.0));
            if !inside {
                continue;
            }
            let overlaps = objects
                .iter()
                .any(|o| convex_intersects(o.footprint(), candidate.footprint()));
            if overlaps {
                continue;
            }
            placed = Some(candidate);
            break;
        }
        if let Some(obj) = placed {
            objects.push(obj);
        }
    }

    // Step 4: expand each wall outward by the clearance shortfall.
    if !objects.is_empty() {
        let mut lo = vec2(f64::INFINITY, f64::INFINITY);
        let mut hi = vec2(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for obj in &objects {
            for p in obj.footprint() {
                lo.x = lo.x.min(p.x);
                lo.y = lo.y.min(p.y);
                hi.x = hi.x.max(p.x);
                hi.y = hi.y.max(p.y);
            }
        }
        let m = cfg.boundary_margin;
        floor.min.x -= (m - (lo.x - floor.min.x)).max(0.0);
        floor.min.y -= (m - (lo.y - floor.min.y)).max(0.0);
        floor.max.x += (m - (floor.max.x - hi.x)).max(0.0);
        floor.max.y += (m - (floor.max.y - hi.y)).max(0.0);
    }

    Ok(Scene {
        floor,
        objects,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_edges_in_range() {
        let cfg = SceneGenConfig::default();
        let scene = generate_scene(7, &cfg).unwrap();
        let w = scene.floor.width();
        let h = scene.floor.height();
        assert!((2.0..=7.0).contains(&w), "width {w}");
        assert!((2.0..=7.0).contains(&h), "height {h}");
    }

    #[test]
    fn zero_caps_give_floor_only() {
        let cfg = SceneGenConfig {
            max_chairs: 0,
            max_beds: 0,
            max_sofas: 0,
            max_desks: 0,
            max_tables: 0,
            ..Default::default()
        };
        let scene = generate_scene(123, &cfg).unwrap();
        assert!(scene.objects.is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = SceneGenConfig::default();
        let a = generate_scene(7, &cfg).unwrap();
        let b = generate_scene(7, &cfg).unwrap();
        assert_eq!(a.floor, b.floor);
        assert_eq!(a.objects.len(), b.objects.len());
        for (x, y) in a.objects.iter().zip(&b.objects) {
            assert_eq!(x.mesh, y.mesh);
            assert_eq!(x.translation, y.translation);
            assert_eq!(x.yaw.to_bits(), y.yaw.to_bits());
        }
    }

    #[test]
    fn empty_edge_range_rejected() {
        let cfg = SceneGenConfig {
            edge_min: 5.0,
            edge_max: 4.0,
            ..Default::default()
        };
        assert!(matches!(
            generate_scene(1, &cfg),
            Err(SceneError::Config(_))
        ));
    }

    #[test]
    fn invariants_hold_over_many_seeds() {
        let cfg = SceneGenConfig::default();
        for seed in 0..1000 {
            let scene = generate_scene(seed, &cfg).unwrap();
            scene.check_invariants(&cfg).unwrap();
            // footprints pairwise disjoint
            for i in 0..scene.objects.len() {
                for j in (i + 1)..scene.objects.len() {
                    assert!(
                        !convex_intersects(
                            scene.objects[i].footprint(),
                            scene.objects[j].footprint()
                        ),
                        "seed {seed}: objects {i} and {j} overlap"
                    );
                }
            }
        }
    }
}
