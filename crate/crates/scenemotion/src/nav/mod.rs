//! Navigation meshes over the walkable floor area.
//!
//! Construction rasterizes the floor at a fixed cell size, discards cells
//! within `agent_radius` of any obstacle footprint (conservatively, by the
//! cell half-diagonal), and emits two triangles per walkable cell. All
//! containment and pathfinding queries run against those triangles, so
//! brute-force loops over the triangle list serve as exact oracles.

mod path;
mod walkmap;

pub use path::{find_path, Path};
pub use walkmap::{walkability_map, WalkMap, WALKMAP_CELLS, WALKMAP_CELL_SIZE};

use crate::geom::{point_convex_dist, point_in_tri_2d, vec2, Vec2};
use crate::scene::Scene;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NavError {
    #[error("no walkable floor area remains")]
    EmptyWalkable,
    #[error("point ({0:.3}, {1:.3}) is not walkable")]
    NotWalkable(f64, f64),
    #[error("start and goal lie in disconnected walkable regions")]
    NoPath,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Default raster cell size for navmesh construction, meters.
pub const NAV_CELL_SIZE: f64 = 0.05;

/// Agent radius used for pathfinding queries.
pub const PATH_AGENT_RADIUS: f64 = 0.2;

/// Agent radius for the tightly fitting mesh behind walkability queries.
pub const TIGHT_AGENT_RADIUS: f64 = 0.02;

/// Tolerance for boundary-inclusive triangle containment.
const CONTAIN_EPS: f64 = 1e-12;

/// Triangulated walkable floor area for one agent radius.
#[derive(Clone, Debug)]
pub struct NavMesh {
    pub agent_radius: f64,
    vertices: Vec<Vec2>,
    triangles: Vec<[u32; 3]>,
    /// Neighbor triangle across each edge (v[i], v[i+1]), or -1.
    adjacency: Vec<[i32; 3]>,
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    /// First triangle index for each walkable cell, -1 otherwise. A walkable
    /// cell owns triangles t and t+1.
    cell_tri: Vec<i32>,
}

impl NavMesh {
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn adjacency(&self) -> &[[i32; 3]] {
        &self.adjacency
    }

    pub fn tri_vertices(&self, t: usize) -> (Vec2, Vec2, Vec2) {
        let [a, b, c] = self.triangles[t];
        (
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        )
    }

    pub fn centroid(&self, t: usize) -> Vec2 {
        let (a, b, c) = self.tri_vertices(t);
        (a + b + c) / 3.0
    }

    /// Total walkable area in square meters.
    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&[a, b, c]| {
                let (a, b, c) = (
                    self.vertices[a as usize],
                    self.vertices[b as usize],
                    self.vertices[c as usize],
                );
                (b - a).cross(c - a) * 0.5
            })
            .sum()
    }

    fn cell_index(&self, ix: i64, iy: i64) -> Option<usize> {
        if ix < 0 || iy < 0 || ix >= self.nx as i64 || iy >= self.ny as i64 {
            None
        } else {
            Some(iy as usize * self.nx + ix as usize)
        }
    }

    /// Triangle indices that could contain points in or near cell (ix, iy).
    fn candidate_tris(&self, p: Vec2) -> impl Iterator<Item = usize> + '_ {
        let ix = ((p.x - self.origin.x) / self.cell).floor() as i64;
        let iy = ((p.y - self.origin.y) / self.cell).floor() as i64;
        (-1..=1).flat_map(move |dy| {
            (-1..=1).filter_map(move |dx| {
                self.cell_index(ix + dx, iy + dy)
                    .and_then(|c| (self.cell_tri[c] >= 0).then_some(self.cell_tri[c] as usize))
            })
        })
    }

    /// True iff the point lies inside some navmesh triangle (boundary
    /// inclusive). Equivalent to a brute-force scan over all triangles.
    pub fn point_walkable(&self, p: Vec2) -> bool {
        self.tri_containing(p).is_some()
    }

    /// Lowest-index triangle containing the point, if any.
    pub fn tri_containing(&self, p: Vec2) -> Option<usize> {
        let mut best: Option<usize> = None;
        for t0 in self.candidate_tris(p) {
            for t in [t0, t0 + 1] {
                let (a, b, c) = self.tri_vertices(t);
                if point_in_tri_2d(p, a, b, c, CONTAIN_EPS) && best.map_or(true, |x| t < x) {
                    best = Some(t);
                }
            }
        }
        best
    }

    /// Conservative check that the whole segment stays inside walkable
    /// cells. Walks every cell the segment passes through with a positive
    /// length; boundary grazing of blocked cells is allowed (the closed
    /// walkable region includes its boundary).
    pub fn segment_walkable(&self, a: Vec2, b: Vec2) -> bool {
        let mut ts = vec![0.0, 1.0];
        let d = b - a;
        for (da, oa, n) in [
            (d.x, a.x - self.origin.x, self.nx),
            (d.y, a.y - self.origin.y, self.ny),
        ] {
            if da.abs() < 1e-15 {
                continue;
            }
            for k in 0..=n {
                let t = (k as f64 * self.cell - oa) / da;
                if t > 1e-12 && t < 1.0 - 1e-12 {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(|x, y| x.total_cmp(y));
        for w in ts.windows(2) {
            if w[1] - w[0] < 1e-12 {
                continue;
            }
            let mid = a + d * ((w[0] + w[1]) * 0.5);
            let ix = ((mid.x - self.origin.x) / self.cell).floor() as i64;
            let iy = ((mid.y - self.origin.y) / self.cell).floor() as i64;
            match self.cell_index(ix, iy) {
                Some(c) if self.cell_tri[c] >= 0 => {}
                _ => return false,
            }
        }
        true
    }

    /// Debug/visualization export.
    pub fn export_json(&self) -> String {
        #[derive(Serialize)]
        struct Export<'a> {
            vertices: &'a [Vec2],
            faces: &'a [[u32; 3]],
            agent_radius: f64,
        }
        serde_json::to_string(&Export {
            vertices: &self.vertices,
            faces: &self.triangles,
            agent_radius: self.agent_radius,
        })
        .expect("navmesh export")
    }
}

/// Builds the navmesh for a scene at the given agent radius.
pub fn build_navmesh(scene: &Scene, agent_radius: f64) -> Result<NavMesh, NavError> {
    build_navmesh_with_cell(scene, agent_radius, NAV_CELL_SIZE)
}

pub fn build_navmesh_with_cell(
    scene: &Scene,
    agent_radius: f64,
    cell: f64,
) -> Result<NavMesh, NavError> {
    assert!(agent_radius >= 0.0 && cell > 0.0);
    let floor = scene.floor;
    // Only cells fully inside the floor are used; a partial strip at the max
    // edge is dropped.
    let nx = ((floor.width() / cell) + 1e-9).floor() as usize;
    let ny = ((floor.height() / cell) + 1e-9).floor() as usize;
    if nx == 0 || ny == 0 {
        return Err(NavError::EmptyWalkable);
    }
    let origin = floor.min;
    let half_diag = cell * std::f64::consts::FRAC_1_SQRT_2;
    let clearance = agent_radius + half_diag;

    let footprints: Vec<&[Vec2]> = scene.objects.iter().map(|o| o.footprint()).collect();
    let mut cell_walkable = vec![false; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let c = origin + vec2((ix as f64 + 0.5) * cell, (iy as f64 + 0.5) * cell);
            let clear = footprints
                .iter()
                .all(|fp| point_convex_dist(c, fp) > clearance);
            cell_walkable[iy * nx + ix] = clear;
        }
    }
    if !cell_walkable.iter().any(|&w| w) {
        return Err(NavError::EmptyWalkable);
    }

    // Emit two CCW triangles per walkable cell with shared corner vertices.
    let mut vertex_id = vec![-1i64; (nx + 1) * (ny + 1)];
    let mut vertices: Vec<Vec2> = Vec::new();
    let mut corner = |ix: usize, iy: usize, vertices: &mut Vec<Vec2>| -> u32 {
        let k = iy * (nx + 1) + ix;
        if vertex_id[k] < 0 {
            vertex_id[k] = vertices.len() as i64;
            vertices.push(origin + vec2(ix as f64 * cell, iy as f64 * cell));
        }
        vertex_id[k] as u32
    };
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    let mut cell_tri = vec![-1i32; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            if !cell_walkable[iy * nx + ix] {
                continue;
            }
            let bl = corner(ix, iy, &mut vertices);
            let br = corner(ix + 1, iy, &mut vertices);
            let tr = corner(ix + 1, iy + 1, &mut vertices);
            let tl = corner(ix, iy + 1, &mut vertices);
            cell_tri[iy * nx + ix] = triangles.len() as i32;
            triangles.push([bl, br, tr]);
            triangles.push([bl, tr, tl]);
        }
    }

    // Adjacency over shared edges.
    let mut edge_map: std::collections::HashMap<(u32, u32), (i32, u8)> =
        std::collections::HashMap::new();
    let mut adjacency = vec![[-1i32; 3]; triangles.len()];
    for (t, tri) in triangles.iter().enumerate() {
        for e in 0..3 {
            let a = tri[e];
            let b = tri[(e + 1) % 3];
            let key = (a.min(b), a.max(b));
            match edge_map.get(&key) {
                Some(&(other_t, other_e)) => {
                    adjacency[t][e] = other_t;
                    adjacency[other_t as usize][other_e as usize] = t as i32;
                }
                None => {
                    edge_map.insert(key, (t as i32, e as u8));
                }
            }
        }
    }

    Ok(NavMesh {
        agent_radius,
        vertices,
        triangles,
        adjacency,
        origin,
        cell,
        nx,
        ny,
        cell_tri,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::scene::{generate_scene, Category, Scene, SceneGenConfig, SceneObject};
    use crate::mesh::box_mesh;
    use crate::geom::vec3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn box_scene() -> Scene {
        // 1 x 1 m box centered in a 5 x 5 m floor.
        let mesh = box_mesh(vec3(-0.5, -0.5, 0.0), vec3(0.5, 0.5, 0.8));
        let obj = SceneObject::new(Category::Table, mesh, vec2(2.5, 2.5), 0.0, None);
        Scene {
            floor: Rect::new(vec2(0.0, 0.0), vec2(5.0, 5.0)),
            objects: vec![obj],
            seed: 0,
        }
    }

    #[test]
    fn empty_scene_full_area() {
        let scene = Scene::empty(Rect::new(vec2(0.0, 0.0), vec2(5.0, 5.0)), 0);
        let nav = build_navmesh(&scene, 0.2).unwrap();
        assert!((nav.area() - 25.0).abs() < 1e-9);
        assert!(nav.point_walkable(vec2(0.0, 0.0)));
        assert!(nav.point_walkable(vec2(5.0, 5.0)));
        assert!(!nav.point_walkable(vec2(5.1, 2.0)));
    }

    #[test]
    fn centered_box_area_within_tolerance() {
        let nav = build_navmesh(&box_scene(), 0.0).unwrap();
        let expected = 25.0 - 1.0;
        assert!(
            (nav.area() - expected).abs() / expected < 0.01,
            "area {} vs {}",
            nav.area(),
            expected
        );
        assert!(!nav.point_walkable(vec2(2.5, 2.5)));
    }

    #[test]
    fn fully_covered_scene_is_empty_walkable() {
        let mesh = box_mesh(vec3(-4.0, -4.0, 0.0), vec3(4.0, 4.0, 1.0));
        let obj = SceneObject::new(Category::Table, mesh, vec2(2.0, 2.0), 0.0, None);
        let scene = Scene {
            floor: Rect::new(vec2(0.0, 0.0), vec2(4.0, 4.0)),
            objects: vec![obj],
            seed: 0,
        };
        assert!(matches!(
            build_navmesh(&scene, 0.2),
            Err(NavError::EmptyWalkable)
        ));
    }

    #[test]
    fn point_walkable_matches_brute_force() {
        let scene = generate_scene(11, &SceneGenConfig::default()).unwrap();
        let nav = build_navmesh(&scene, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let brute = |p: Vec2| {
            nav.triangles().iter().any(|&[a, b, c]| {
                point_in_tri_2d(
                    p,
                    nav.vertices()[a as usize],
                    nav.vertices()[b as usize],
                    nav.vertices()[c as usize],
                    CONTAIN_EPS,
                )
            })
        };
        for _ in 0..10_000 {
            let p = vec2(
                rng.gen_range(scene.floor.min.x - 0.5..scene.floor.max.x + 0.5),
                rng.gen_range(scene.floor.min.y - 0.5..scene.floor.max.y + 0.5),
            );
            assert_eq!(nav.point_walkable(p), brute(p), "mismatch at {p:?}");
        }
    }

    #[test]
    fn triangles_avoid_inflated_footprints() {
        let scene = generate_scene(21, &SceneGenConfig::default()).unwrap();
        for radius in [0.02, 0.2] {
            let nav = build_navmesh(&scene, radius).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..100_000 {
                let t = rng.gen_range(0..nav.triangles().len());
                let (a, b, c) = nav.tri_vertices(t);
                let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
                if u + v > 1.0 {
                    u = 1.0 - u;
                    v = 1.0 - v;
                }
                let p = a + (b - a) * u + (c - a) * v;
                for obj in &scene.objects {
                    assert!(
                        point_convex_dist(p, obj.footprint()) >= radius - 1e-9,
                        "sampled point {p:?} within radius {radius} of footprint"
                    );
                }
            }
        }
    }

    #[test]
    fn walkable_area_monotone_in_radius() {
        let scene = generate_scene(33, &SceneGenConfig::default()).unwrap();
        let mut last = f64::INFINITY;
        for radius in [0.0, 0.02, 0.1, 0.2, 0.4] {
            let area = build_navmesh(&scene, radius).map(|n| n.area()).unwrap_or(0.0);
            assert!(area <= last + 1e-9, "area grew with radius");
            last = area;
        }
    }

    #[test]
    fn adjacency_is_symmetric() {
        let nav = build_navmesh(&box_scene(), 0.2).unwrap();
        for (t, adj) in nav.adjacency().iter().enumerate() {
            for &n in adj {
                if n >= 0 {
                    assert!(nav.adjacency()[n as usize].contains(&(t as i32)));
                }
            }
        }
    }
}
