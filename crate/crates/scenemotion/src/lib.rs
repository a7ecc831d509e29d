//! Scene-aware human motion synthesis at desk scale.
//!
//! The crate couples a procedural marker-based body model with scene
//! perception (navigation meshes, local walkability maps, signed distance
//! fields) and reinforcement-learned control policies. Locomotion policies
//! steer the body through cluttered rooms toward pelvis goals; interaction
//! policies drive the body markers onto goal configurations such as sitting
//! on a chair or lying on a sofa, and back up again. Long activity sequences
//! are composed from per-stage policies with tree-based action sampling.

pub mod geom;
pub mod scene;
pub mod sdf;
pub mod mesh;
pub mod nav;

pub use geom::{Rect, RigidXY, Vec2, Vec3};
pub use mesh::TriMesh;
