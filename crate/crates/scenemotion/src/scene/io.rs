//! Scene file format: versioned JSON, meters, z-up, right-handed.

use super::{Category, Scene, SceneError, SceneObject, SeatRegion};
use crate::geom::{vec2, Rect, Vec2, Vec3};
use crate::mesh::TriMesh;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCENE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct FloorRecord {
    min_xy: [f64; 2],
    max_xy: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct ObjectRecord {
    category: Category,
    vertices: Vec<Vec3>,
    faces: Vec<[u32; 3]>,
    translation: [f64; 2],
    yaw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seat: Option<SeatRegion>,
}

#[derive(Serialize, Deserialize)]
struct SceneRecord {
    version: u32,
    seed: u64,
    floor: FloorRecord,
    objects: Vec<ObjectRecord>,
}

pub fn save_scene(scene: &Scene, path: &Path) -> Result<(), SceneError> {
    let record = SceneRecord {
        version: SCENE_FORMAT_VERSION,
        seed: scene.seed,
        floor: FloorRecord {
            min_xy: scene.floor.min.into(),
            max_xy: scene.floor.max.into(),
        },
        objects: scene
            .objects
            .iter()
            .map(|o| ObjectRecord {
                category: o.category,
                vertices: o.mesh.vertices.clone(),
                faces: o.mesh.faces.clone(),
                translation: o.translation.into(),
                yaw: o.yaw,
                seat: o.seat,
            })
            .collect(),
    };
    let text = serde_json::to_string_pretty(&record)
        .map_err(|e| SceneError::Parse(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_scene(path: &Path) -> Result<Scene, SceneError> {
    let text = std::fs::read_to_string(path)?;
    let record: SceneRecord = serde_json::from_str(&text).map_err(|e| {
        SceneError::Parse(format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    if record.version != SCENE_FORMAT_VERSION {
        return Err(SceneError::Parse(format!(
            "unsupported scene version {} (expected {})",
            record.version, SCENE_FORMAT_VERSION
        )));
    }
    let floor = Rect::new(record.floor.min_xy.into(), record.floor.max_xy.into());
    if floor.width() <= 0.0 || floor.height() <= 0.0 {
        return Err(SceneError::Parse("field floor: degenerate rectangle".into()));
    }
    let mut objects = Vec::with_capacity(record.objects.len());
    for (i, o) in record.objects.into_iter().enumerate() {
        let mesh = TriMesh::new(o.vertices, o.faces);
        mesh.validate()
            .map_err(|e| SceneError::Parse(format!("field objects[{i}]: {e}")))?;
        let translation: Vec2 = vec2(o.translation[0], o.translation[1]);
        objects.push(SceneObject::new(
            o.category,
            mesh,
            translation,
            o.yaw,
            o.seat,
        ));
    }
    Ok(Scene {
        floor,
        objects,
        seed: record.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{generate_scene, SceneGenConfig};

    #[test]
    fn roundtrip_generated_scene() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.json");
        let cfg = SceneGenConfig::default();
        for seed in [0u64, 7, 99] {
            let scene = generate_scene(seed, &cfg).unwrap();
            save_scene(&scene, &path).unwrap();
            let loaded = load_scene(&path).unwrap();
            assert_eq!(scene.seed, loaded.seed);
            assert_eq!(scene.floor, loaded.floor);
            assert_eq!(scene.objects.len(), loaded.objects.len());
            for (a, b) in scene.objects.iter().zip(&loaded.objects) {
                assert_eq!(a.category, b.category);
                assert_eq!(a.mesh, b.mesh);
                assert_eq!(a.translation, b.translation);
                assert_eq!(a.yaw.to_bits(), b.yaw.to_bits());
                assert_eq!(a.seat, b.seat);
                assert_eq!(a.footprint(), b.footprint());
            }
        }
    }

    #[test]
    fn empty_scene_roundtrips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.json");
        let scene = Scene::empty(Rect::new(vec2(0.0, 0.0), vec2(3.0, 4.0)), 5);
        save_scene(&scene, &path).unwrap();
        let loaded = load_scene(&path).unwrap();
        assert_eq!(loaded.objects.len(), 0);
        assert_eq!(loaded.floor, scene.floor);
    }

    #[test]
    fn truncated_file_is_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.json");
        let scene = generate_scene(3, &SceneGenConfig::default()).unwrap();
        save_scene(&scene, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        match load_scene(&path) {
            Err(SceneError::Parse(msg)) => assert!(msg.contains("line")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_face_index_is_parse_error_with_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scene.json");
        let text = r#"{
            "version": 1, "seed": 0,
            "floor": {"min_xy": [0,0], "max_xy": [3,3]},
            "objects": [{"category":"chair","vertices":[[0,0,0]],"faces":[[0,0,9]],"translation":[1,1],"yaw":0}]
        }"#;
        std::fs::write(&path, text).unwrap();
        match load_scene(&path) {
            Err(SceneError::Parse(msg)) => assert!(msg.contains("objects[0]"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
