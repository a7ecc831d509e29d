//! Procedural furniture library.
//!
//! Each category is composed of axis-aligned boxes in a local frame with the
//! base at z = 0 and the front facing +x. Components touch but never overlap
//! volumetrically, which keeps containment queries on the union well posed.
//! Sittable categories expose a seat region used for goal-body placement.

use super::{Category, SeatRegion};
use crate::geom::{vec2, vec3, Vec3};
use crate::mesh::{box_mesh, TriMesh};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Dimension ranges (meters) for the procedural furniture, roughly matching
/// common real furniture sizes.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct FurnitureConfig {
    pub chair_seat_width: (f64, f64),
    pub chair_seat_depth: (f64, f64),
    pub chair_seat_height: (f64, f64),
    pub chair_back_height: (f64, f64),
    pub sofa_width: (f64, f64),
    pub sofa_depth: (f64, f64),
    pub sofa_seat_height: (f64, f64),
    pub bed_length: (f64, f64),
    pub bed_width: (f64, f64),
    pub bed_height: (f64, f64),
    pub desk_width: (f64, f64),
    pub desk_depth: (f64, f64),
    pub desk_height: (f64, f64),
    pub table_width: (f64, f64),
    pub table_depth: (f64, f64),
    pub table_height: (f64, f64),
}

impl Default for FurnitureConfig {
    fn default() -> Self {
        FurnitureConfig {
            chair_seat_width: (0.40, 0.50),
            chair_seat_depth: (0.40, 0.50),
            chair_seat_height: (0.35, 0.55),
            chair_back_height: (0.35, 0.45),
            sofa_width: (1.40, 2.00),
            sofa_depth: (0.85, 1.00),
            sofa_seat_height: (0.38, 0.45),
            bed_length: (1.90, 2.10),
            bed_width: (0.90, 1.60),
            bed_height: (0.45, 0.60),
            desk_width: (1.00, 1.60),
            desk_depth: (0.50, 0.80),
            desk_height: (0.72, 0.78),
            table_width: (0.60, 1.20),
            table_depth: (0.60, 1.20),
            table_height: (0.70, 0.76),
        }
    }
}

/// A generated furniture piece in its local frame.
#[derive(Clone, Debug)]
pub struct FurnitureTemplate {
    pub category: Category,
    pub mesh: TriMesh,
    pub seat: Option<SeatRegion>,
}

fn sample(rng: &mut impl Rng, range: (f64, f64)) -> f64 {
    if range.1 > range.0 {
        rng.gen_range(range.0..range.1)
    } else {
        range.0
    }
}

fn legs(mesh: &mut TriMesh, half_x: f64, half_y: f64, top: f64) {
    let s = 0.05;
    let inset = 0.01;
    for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let cx = sx * (half_x - s / 2.0 - inset);
        let cy = sy * (half_y - s / 2.0 - inset);
        mesh.append(&box_mesh(
            vec3(cx - s / 2.0, cy - s / 2.0, 0.0),
            vec3(cx + s / 2.0, cy + s / 2.0, top),
        ));
    }
}

pub fn build_chair(cfg: &FurnitureConfig, rng: &mut impl Rng) -> FurnitureTemplate {
    let w = sample(rng, cfg.chair_seat_width);
    let d = sample(rng, cfg.chair_seat_depth);
    let h = sample(rng, cfg.chair_seat_height);
    let back_h = sample(rng, cfg.chair_back_height);
    let seat_t = 0.06;
    let back_t = 0.06;
    let mut mesh = TriMesh::new(Vec::new(), Vec::new());
    legs(&mut mesh, d / 2.0, w / 2.0, h - seat_t);
    mesh.append(&box_mesh(
        vec3(-d / 2.0, -w / 2.0, h - seat_t),
        vec3(d / 2.0, w / 2.0, h),
    ));
    mesh.append(&box_mesh(
        vec3(-d / 2.0, -w / 2.0, h),
        vec3(-d / 2.0 + back_t, w / 2.0, h + back_h),
    ));
    let seat = SeatRegion {
        center: vec3((back_t + 0.02) / 2.0, 0.0, h),
        half_x: (d - back_t - 0.06) / 2.0,
        half_y: w / 2.0 - 0.02,
        outward: vec2(1.0, 0.0),
    };
    FurnitureTemplate {
        category: Category::Chair,
        mesh,
        seat: Some(seat),
    }
}

pub fn build_sofa(cfg: &FurnitureConfig, rng: &mut impl Rng) -> FurnitureTemplate {
    let w = sample(rng, cfg.sofa_width);
    let d = sample(rng, cfg.sofa_depth);
    let h = sample(rng, cfg.sofa_seat_height);
    let back_t = 0.15;
    let back_h = 0.40;
    let arm_w = 0.12;
    let arm_h = 0.22;
    let mut mesh = box_mesh(vec3(-d / 2.0, -w / 2.0, 0.0), vec3(d / 2.0, w / 2.0, h));
    mesh.append(&box_mesh(
        vec3(-d / 2.0, -w / 2.0, h),
        vec3(-d / 2.0 + back_t, w / 2.0, h + back_h),
    ));
    for sy in [-1.0, 1.0] {
        let y0 = sy * (w / 2.0) - if sy > 0.0 { arm_w } else { 0.0 };
        mesh.append(&box_mesh(
            vec3(-d / 2.0 + back_t, y0, h),
            vec3(d / 2.0, y0 + arm_w, h + arm_h),
        ));
    }
    let seat = SeatRegion {
        center: vec3((back_t + 0.02) / 2.0, 0.0, h),
        half_x: (d - back_t - 0.06) / 2.0,
        half_y: w / 2.0 - arm_w - 0.02,
        outward: vec2(1.0, 0.0),
    };
    FurnitureTemplate {
        category: Category::Sofa,
        mesh,
        seat: Some(seat),
    }
}

pub fn build_bed(cfg: &FurnitureConfig, rng: &mut impl Rng) -> FurnitureTemplate {
    let len = sample(rng, cfg.bed_length);
    let w = sample(rng, cfg.bed_width);
    let h = sample(rng, cfg.bed_height);
    let head_t = 0.08;
    let mut mesh = box_mesh(vec3(-len / 2.0, -w / 2.0, 0.0), vec3(len / 2.0, w / 2.0, h));
    mesh.append(&box_mesh(
        vec3(-len / 2.0 - head_t, -w / 2.0, 0.0),
        vec3(-len / 2.0, w / 2.0, h + 0.45),
    ));
    let seat = SeatRegion {
        center: vec3(0.0, 0.0, h),
        half_x: len / 2.0 - 0.15,
        half_y: w / 2.0 - 0.05,
        outward: vec2(1.0, 0.0),
    };
    FurnitureTemplate {
        category: Category::Bed,
        mesh,
        seat: Some(seat),
    }
}

fn build_top_and_legs(half_x: f64, half_y: f64, h: f64) -> TriMesh {
    let top_t = 0.04;
    let mut mesh = TriMesh::new(Vec::new(), Vec::new());
    legs(&mut mesh, half_x, half_y, h - top_t);
    mesh.append(&box_mesh(
        vec3(-half_x, -half_y, h - top_t),
        vec3(half_x, half_y, h),
    ));
    mesh
}

pub fn build_desk(cfg: &FurnitureConfig, rng: &mut impl Rng) -> FurnitureTemplate {
    let w = sample(rng, cfg.desk_width);
    let d = sample(rng, cfg.desk_depth);
    let h = sample(rng, cfg.desk_height);
    FurnitureTemplate {
        category: Category::Desk,
        mesh: build_top_and_legs(d / 2.0, w / 2.0, h),
        seat: None,
    }
}

pub fn build_table(cfg: &FurnitureConfig, rng: &mut impl Rng) -> FurnitureTemplate {
    let w = sample(rng, cfg.table_width);
    let d = sample(rng, cfg.table_depth);
    let h = sample(rng, cfg.table_height);
    FurnitureTemplate {
        category: Category::Table,
        mesh: build_top_and_legs(d / 2.0, w / 2.0, h),
        seat: None,
    }
}

pub fn build_category(
    cat: Category,
    cfg: &FurnitureConfig,
    rng: &mut impl Rng,
) -> FurnitureTemplate {
    match cat {
        Category::Chair => build_chair(cfg, rng),
        Category::Bed => build_bed(cfg, rng),
        Category::Sofa => build_sofa(cfg, rng),
        Category::Desk => build_desk(cfg, rng),
        Category::Table => build_table(cfg, rng),
    }
}

/// One randomized template per category, in `Category::ALL` order.
pub fn object_library(cfg: &FurnitureConfig, rng: &mut impl Rng) -> Vec<FurnitureTemplate> {
    Category::ALL
        .iter()
        .map(|&c| build_category(c, cfg, rng))
        .collect()
}

/// Categories a given interaction can target.
pub fn sittable(cat: Category) -> bool {
    matches!(cat, Category::Chair | Category::Sofa | Category::Bed)
}

pub fn lieable(cat: Category) -> bool {
    matches!(cat, Category::Sofa | Category::Bed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chair_seat_height_in_range() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = build_chair(&FurnitureConfig::default(), &mut rng);
            let seat = t.seat.unwrap();
            assert!(seat.center.z >= 0.35 && seat.center.z <= 0.55);
            t.mesh.validate().unwrap();
        }
    }

    #[test]
    fn table_has_no_seat_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = build_table(&FurnitureConfig::default(), &mut rng);
        assert!(t.seat.is_none());
        let d = build_desk(&FurnitureConfig::default(), &mut rng);
        assert!(d.seat.is_none());
    }

    #[test]
    fn library_is_deterministic_per_seed() {
        let cfg = FurnitureConfig::default();
        let a = object_library(&cfg, &mut ChaCha8Rng::seed_from_u64(9));
        let b = object_library(&cfg, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a.len(), 5);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.mesh, y.mesh);
        }
    }

    #[test]
    fn meshes_stand_on_floor() {
        let cfg = FurnitureConfig::default();
        for t in object_library(&cfg, &mut ChaCha8Rng::seed_from_u64(1)) {
            let bb = t.mesh.aabb();
            assert!(bb.min.z.abs() < 1e-9, "{:?} base {}", t.category, bb.min.z);
        }
    }
}
