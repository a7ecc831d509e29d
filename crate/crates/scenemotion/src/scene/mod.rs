//! Scene data model: a rectangular floor populated with placed furniture.

mod furniture;
mod gen;
mod io;

pub use furniture::{object_library, FurnitureConfig, FurnitureTemplate};
pub use gen::generate_scene;
pub use io::{load_scene, save_scene};

use crate::geom::{convex_hull, Rect, RigidXY, Vec2, Vec3};
use crate::mesh::TriMesh;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid scene config: {0}")]
    Config(String),
    #[error("scene parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Chair,
    Bed,
    Sofa,
    Desk,
    Table,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Chair,
        Category::Bed,
        Category::Sofa,
        Category::Desk,
        Category::Table,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Chair => "chair",
            Category::Bed => "bed",
            Category::Sofa => "sofa",
            Category::Desk => "desk",
            Category::Table => "table",
        }
    }
}

/// Sittable / lie-able patch on top of a furniture piece, in the object's
/// local frame. `outward` points away from the backrest toward open space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeatRegion {
    pub center: Vec3,
    pub half_x: f64,
    pub half_y: f64,
    pub outward: Vec2,
}

impl SeatRegion {
    /// Unit direction of the longer side, in the local frame.
    pub fn long_axis(&self) -> Vec2 {
        if self.half_x >= self.half_y {
            Vec2 { x: 1.0, y: 0.0 }
        } else {
            Vec2 { x: 0.0, y: 1.0 }
        }
    }

    pub fn long_half(&self) -> f64 {
        self.half_x.max(self.half_y)
    }
}

/// A furniture piece placed in a scene. The mesh lives in the object's local
/// frame (z-up, base at z = 0); `translation` and `yaw` place it on the floor.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneObject {
    pub category: Category,
    pub mesh: TriMesh,
    pub translation: Vec2,
    pub yaw: f64,
    pub seat: Option<SeatRegion>,
    footprint: Vec<Vec2>,
}

impl SceneObject {
    pub fn new(
        category: Category,
        mesh: TriMesh,
        translation: Vec2,
        yaw: f64,
        seat: Option<SeatRegion>,
    ) -> SceneObject {
        let xf = RigidXY::new(yaw, translation.with_z(0.0));
        let pts: Vec<Vec2> = mesh.vertices.iter().map(|&v| xf.apply(v).xy()).collect();
        let footprint = convex_hull(&pts);
        SceneObject {
            category,
            mesh,
            translation,
            yaw,
            seat,
            footprint,
        }
    }

    /// Projection of the placed mesh onto the floor plane (convex outline).
    pub fn footprint(&self) -> &[Vec2] {
        &self.footprint
    }

    pub fn placement(&self) -> RigidXY {
        RigidXY::new(self.yaw, self.translation.with_z(0.0))
    }

    pub fn to_world(&self, p_local: Vec3) -> Vec3 {
        self.placement().apply(p_local)
    }

    pub fn to_local(&self, p_world: Vec3) -> Vec3 {
        self.placement().inverse().apply(p_world)
    }

    pub fn placed_mesh(&self) -> TriMesh {
        self.mesh.transformed(&self.placement())
    }
}

/// A rectangular room with placed furniture. Immutable after construction;
/// shared read-only across rollout workers.
#[derive(Clone, Debug)]
pub struct Scene {
    pub floor: Rect,
    pub objects: Vec<SceneObject>,
    pub seed: u64,
}

impl Scene {
    pub fn empty(floor: Rect, seed: u64) -> Scene {
        Scene {
            floor,
            objects: Vec::new(),
            seed,
        }
    }

    /// Checks the structural invariants; used by tests and the loader.
    pub fn check_invariants(&self, cfg: &SceneGenConfig) -> Result<(), SceneError> {
        let w = self.floor.width();
        let h = self.floor.height();
        if !(cfg.edge_min - 1e-9..=cfg.edge_max + 1e-9).contains(&w)
            || !(cfg.edge_min - 1e-9..=cfg.edge_max + 1e-9).contains(&h)
        {
            return Err(SceneError::Config(format!(
                "floor edges {w:.3} x {h:.3} outside [{}, {}]",
                cfg.edge_min, cfg.edge_max
            )));
        }
        for (i, obj) in self.objects.iter().enumerate() {
            obj.mesh
                .validate()
                .map_err(|e| SceneError::Config(format!("object {i}: {e}")))?;
            for p in obj.footprint() {
                let d = (p.x - self.floor.min.x)
                    .min(self.floor.max.x - p.x)
                    .min(p.y - self.floor.min.y)
                    .min(self.floor.max.y - p.y);
                if d < cfg.boundary_margin - 1e-9 {
                    return Err(SceneError::Config(format!(
                        "object {i} closer than margin to boundary ({d:.3})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Configuration for random scene synthesis.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneGenConfig {
    /// Bounds for the final floor edge lengths, meters.
    pub edge_min: f64,
    pub edge_max: f64,
    /// Minimum clearance between any object footprint and the floor boundary.
    pub boundary_margin: f64,
    /// Per-category caps on sampled object counts.
    pub max_chairs: u32,
    pub max_beds: u32,
    pub max_sofas: u32,
    pub max_desks: u32,
    pub max_tables: u32,
    /// Placement retries per object before it is dropped.
    pub place_attempts: u32,
    pub furniture: FurnitureConfig,
}

impl Default for SceneGenConfig {
    fn default() -> Self {
        SceneGenConfig {
            edge_min: 2.0,
            edge_max: 7.0,
            boundary_margin: 0.8,
            max_chairs: 3,
            max_beds: 1,
            max_sofas: 1,
            max_desks: 1,
            max_tables: 1,
            place_attempts: 50,
            furniture: FurnitureConfig::default(),
        }
    }
}

impl SceneGenConfig {
    pub fn cap(&self, cat: Category) -> u32 {
        match cat {
            Category::Chair => self.max_chairs,
            Category::Bed => self.max_beds,
            Category::Sofa => self.max_sofas,
            Category::Desk => self.max_desks,
            Category::Table => self.max_tables,
        }
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.edge_min > 0.0) || !(self.edge_max >= self.edge_min) {
            return Err(SceneError::Config(format!(
                "empty edge range [{}, {}]",
                self.edge_min, self.edge_max
            )));
        }
        // The initial rectangle is sampled small enough that boundary
        // expansion cannot push an edge past edge_max.
        if self.edge_max - 2.0 * self.boundary_margin < self.edge_min {
            return Err(SceneError::Config(format!(
                "edge range [{}, {}] empty after reserving 2 x margin {}",
                self.edge_min, self.edge_max, self.boundary_margin
            )));
        }
        if !(self.boundary_margin >= 0.0) {
            return Err(SceneError::Config("negative boundary margin".into()));
        }
        Ok(())
    }
}
