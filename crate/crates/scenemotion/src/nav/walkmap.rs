//! Body-centric local walkability map.
//!
//! A 16 x 16 binary grid covering a 1.6 m square centered at the pelvis,
//! with rows along the facing direction and columns along the body's left.
//! Cell values: 1 = walkable, 0 = blocked. Recomputed every step against the
//! tightly fitting navmesh by testing each cell centroid.

use super::NavMesh;
use crate::geom::{vec2, Vec2};
use serde::{Deserialize, Serialize};

pub const WALKMAP_CELLS: usize = 16;
pub const WALKMAP_CELL_SIZE: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkMap {
    /// Row-major: `values[row * 16 + col]`, row along facing.
    pub values: Vec<u8>,
    pub pelvis: Vec2,
    pub facing: Vec2,
}

impl WalkMap {
    pub fn all_walkable(pelvis: Vec2, facing: Vec2) -> WalkMap {
        WalkMap {
            values: vec![1; WALKMAP_CELLS * WALKMAP_CELLS],
            pelvis,
            facing,
        }
    }

    fn local_coord(i: usize) -> f64 {
        (i as f64 + 0.5) * WALKMAP_CELL_SIZE - 0.8
    }

    /// Scene-frame centroid of cell (row, col).
    pub fn centroid_world(&self, row: usize, col: usize) -> Vec2 {
        let fwd = Self::local_coord(row);
        let left = Self::local_coord(col);
        self.pelvis + self.facing * fwd + self.facing.perp() * left
    }

    pub fn value(&self, row: usize, col: usize) -> u8 {
        self.values[row * WALKMAP_CELLS + col]
    }

    pub fn walkable_count(&self) -> usize {
        self.values.iter().filter(|&&v| v == 1).count()
    }

    /// Number of blocked cells whose centroids fall inside the closed
    /// axis-aligned box `[lo, hi]` in scene coordinates.
    pub fn blocked_in_bbox(&self, lo: Vec2, hi: Vec2) -> usize {
        let mut count = 0;
        for row in 0..WALKMAP_CELLS {
            for col in 0..WALKMAP_CELLS {
                if self.value(row, col) != 0 {
                    continue;
                }
                let c = self.centroid_world(row, col);
                if c.x >= lo.x && c.x <= hi.x && c.y >= lo.y && c.y <= hi.y {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Samples the walkability map at a pelvis position and facing direction.
pub fn walkability_map(nav_tight: &NavMesh, pelvis: Vec2, facing: Vec2) -> WalkMap {
    let facing = facing.normalized_or(vec2(1.0, 0.0));
    let mut map = WalkMap {
        values: vec![0; WALKMAP_CELLS * WALKMAP_CELLS],
        pelvis,
        facing,
    };
    for row in 0..WALKMAP_CELLS {
        for col in 0..WALKMAP_CELLS {
            let c = map.centroid_world(row, col);
            if nav_tight.point_walkable(c) {
                map.values[row * WALKMAP_CELLS + col] = 1;
            }
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{vec3, Rect};
    use crate::mesh::box_mesh;
    use crate::nav::build_navmesh;
    use crate::scene::{Category, Scene, SceneObject};

    #[test]
    fn empty_scene_all_walkable() {
        let scene = Scene::empty(Rect::new(vec2(0.0, 0.0), vec2(6.0, 6.0)), 0);
        let nav = build_navmesh(&scene, 0.02).unwrap();
        let map = walkability_map(&nav, vec2(3.0, 3.0), vec2(1.0, 0.0));
        assert_eq!(map.walkable_count(), 256);
    }

    #[test]
    fn wall_blocks_lateral_columns() {
        // Long wall at x = 4.0..4.3 spanning the floor; pelvis 0.3 m to the
        // left of the wall face, facing +y (parallel to the wall).
        let mesh = box_mesh(vec3(-0.15, -3.0, 0.0), vec3(0.15, 3.0, 1.0));
        let obj = SceneObject::new(Category::Table, mesh, vec2(4.15, 3.0), 0.0, None);
        let scene = Scene {
            floor: Rect::new(vec2(0.0, 0.0), vec2(8.0, 6.0)),
            objects: vec![obj],
            seed: 0,
        };
        let nav = build_navmesh(&scene, 0.02).unwrap();
        let pelvis = vec2(3.7, 3.0);
        let facing = vec2(0.0, 1.0);
        let map = walkability_map(&nav, pelvis, facing);
        // Facing +y, the wall is to the body's right (-x side = negative
        // lateral coordinate = low column indices).
        for row in 0..WALKMAP_CELLS {
            for col in 0..WALKMAP_CELLS {
                let c = map.centroid_world(row, col);
                let expected = nav.point_walkable(c);
                assert_eq!(map.value(row, col) == 1, expected, "cell {row},{col}");
                if c.x > 4.0 && c.x < 4.3 {
                    assert_eq!(map.value(row, col), 0, "inside wall at {c:?}");
                }
            }
        }
        // Columns well clear of the wall stay walkable.
        assert!(map.value(8, 15) == 1);
    }

    #[test]
    fn quarter_turn_equivariance() {
        // Rotating the scene and the query by the same quarter turn leaves
        // the cell grid unchanged (the raster aligns with the floor corner).
        let mesh = box_mesh(vec3(-0.4, -0.3, 0.0), vec3(0.4, 0.3, 1.0));
        let base = Scene {
            floor: Rect::new(vec2(0.0, 0.0), vec2(6.0, 6.0)),
            objects: vec![SceneObject::new(
                Category::Table,
                mesh.clone(),
                vec2(3.5, 2.8),
                0.3,
                None,
            )],
            seed: 0,
        };
        let nav = build_navmesh(&base, 0.02).unwrap();
        let pelvis = vec2(2.9, 2.7);
        let facing = vec2(1.0, 0.0);
        let map = walkability_map(&nav, pelvis, facing);

        // Rotate everything by 90 degrees about the floor center.
        let center = vec2(3.0, 3.0);
        let rot = |p: Vec2| center + (p - center).rotate(std::f64::consts::FRAC_PI_2);
        let rotated = Scene {
            floor: base.floor,
            objects: vec![SceneObject::new(
                Category::Table,
                mesh,
                rot(vec2(3.5, 2.8)),
                0.3 + std::f64::consts::FRAC_PI_2,
                None,
            )],
            seed: 0,
        };
        let nav_r = build_navmesh(&rotated, 0.02).unwrap();
        let map_r = walkability_map(
            &nav_r,
            rot(pelvis),
            facing.rotate(std::f64::consts::FRAC_PI_2),
        );
        assert_eq!(map.values, map_r.values);
    }

    #[test]
    fn blocked_cell_count_in_bbox() {
        let mut map = WalkMap::all_walkable(vec2(0.0, 0.0), vec2(1.0, 0.0));
        // Block three cells straight ahead.
        for row in 10..13 {
            map.values[row * WALKMAP_CELLS + 8] = 0;
        }
        let n = map.blocked_in_bbox(vec2(-0.8, -0.8), vec2(0.8, 0.8));
        assert_eq!(n, 3);
        let none = map.blocked_in_bbox(vec2(5.0, 5.0), vec2(6.0, 6.0));
        assert_eq!(none, 0);
    }
}
