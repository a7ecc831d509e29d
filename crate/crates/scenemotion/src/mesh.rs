//! Triangle meshes and procedural primitives.

use crate::geom::{vec3, Aabb3, RigidXY, Vec3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh has no faces")]
    Empty,
    #[error("face {face} references vertex {index} out of {count}")]
    BadIndex { face: usize, index: u32, count: usize },
    #[error("vertex {0} has non-finite coordinates")]
    NonFinite(usize),
}

/// Indexed triangle mesh, z-up, units in meters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[u32; 3]>) -> TriMesh {
        TriMesh { vertices, faces }
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        if self.faces.is_empty() {
            return Err(MeshError::Empty);
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(MeshError::NonFinite(i));
            }
        }
        for (f, face) in self.faces.iter().enumerate() {
            for &ix in face {
                if ix as usize >= self.vertices.len() {
                    return Err(MeshError::BadIndex {
                        face: f,
                        index: ix,
                        count: self.vertices.len(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn aabb(&self) -> Aabb3 {
        Aabb3::from_points(self.vertices.iter().copied())
    }

    pub fn face_vertices(&self, f: usize) -> (Vec3, Vec3, Vec3) {
        let [a, b, c] = self.faces[f];
        (
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        )
    }

    pub fn transformed(&self, xf: &RigidXY) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|&v| xf.apply(v)).collect(),
            faces: self.faces.clone(),
        }
    }

    /// Appends another mesh, offsetting its indices.
    pub fn append(&mut self, other: &TriMesh) {
        let off = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.faces
            .extend(other.faces.iter().map(|&[a, b, c]| [a + off, b + off, c + off]));
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len())
            .map(|f| {
                let (a, b, c) = self.face_vertices(f);
                (b - a).cross(c - a).norm() * 0.5
            })
            .sum()
    }

    /// SHA-256 over vertex and index data; used as a bake-cache key.
    pub fn content_hash(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        for v in &self.vertices {
            h.update(v.x.to_le_bytes());
            h.update(v.y.to_le_bytes());
            h.update(v.z.to_le_bytes());
        }
        for f in &self.faces {
            for &ix in f {
                h.update(ix.to_le_bytes());
            }
        }
        h.finalize().into()
    }
}

/// Axis-aligned closed box with outward-facing triangles.
pub fn box_mesh(min: Vec3, max: Vec3) -> TriMesh {
    let v = vec![
        vec3(min.x, min.y, min.z),
        vec3(max.x, min.y, min.z),
        vec3(max.x, max.y, min.z),
        vec3(min.x, max.y, min.z),
        vec3(min.x, min.y, max.z),
        vec3(max.x, min.y, max.z),
        vec3(max.x, max.y, max.z),
        vec3(min.x, max.y, max.z),
    ];
    let faces = vec![
        // bottom (z = min, normal -z)
        [0, 2, 1],
        [0, 3, 2],
        // top (z = max, normal +z)
        [4, 5, 6],
        [4, 6, 7],
        // front (y = min, normal -y)
        [0, 1, 5],
        [0, 5, 4],
        // right (x = max, normal +x)
        [1, 2, 6],
        [1, 6, 5],
        // back (y = max, normal +y)
        [2, 3, 7],
        [2, 7, 6],
        // left (x = min, normal -x)
        [3, 0, 4],
        [3, 4, 7],
    ];
    TriMesh::new(v, faces)
}

/// Icosphere by repeated subdivision of an icosahedron; vertices lie exactly
/// on the sphere of the given radius.
pub fn icosphere(radius: f64, subdivisions: u32) -> TriMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = vec![
        vec3(-1.0, phi, 0.0),
        vec3(1.0, phi, 0.0),
        vec3(-1.0, -phi, 0.0),
        vec3(1.0, -phi, 0.0),
        vec3(0.0, -1.0, phi),
        vec3(0.0, 1.0, phi),
        vec3(0.0, -1.0, -phi),
        vec3(0.0, 1.0, -phi),
        vec3(phi, 0.0, -1.0),
        vec3(phi, 0.0, 1.0),
        vec3(-phi, 0.0, -1.0),
        vec3(-phi, 0.0, 1.0),
    ]
    .into_iter()
    .map(|v| v.normalized_or(Vec3::Z))
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    use std::collections::HashMap;
    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let mut mid = |i: u32, j: u32, vertices: &mut Vec<Vec3>| -> u32 {
                let key = (i.min(j), i.max(j));
                *midpoint.entry(key).or_insert_with(|| {
                    let m = ((vertices[i as usize] + vertices[j as usize]) * 0.5)
                        .normalized_or(Vec3::Z);
                    vertices.push(m);
                    (vertices.len() - 1) as u32
                })
            };
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    TriMesh::new(
        vertices.into_iter().map(|v| v * radius).collect(),
        faces,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_is_valid_and_closed() {
        let m = box_mesh(vec3(0.0, 0.0, 0.0), vec3(1.0, 2.0, 3.0));
        m.validate().unwrap();
        assert_eq!(m.faces.len(), 12);
        // Surface area of a 1x2x3 box.
        assert!((m.surface_area() - 22.0).abs() < 1e-12);
        // Every edge must be shared by exactly two faces for a closed mesh.
        let mut counts = std::collections::HashMap::new();
        for &[a, b, c] in &m.faces {
            for (i, j) in [(a, b), (b, c), (c, a)] {
                *counts.entry((i.min(j), i.max(j))).or_insert(0) += 1;
            }
        }
        assert!(counts.values().all(|&c| c == 2));
    }

    #[test]
    fn icosphere_counts_and_radius() {
        let m = icosphere(1.0, 2);
        m.validate().unwrap();
        assert_eq!(m.faces.len(), 20 * 4usize.pow(2));
        for v in &m.vertices {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn content_hash_changes_with_geometry() {
        let a = box_mesh(vec3(0.0, 0.0, 0.0), vec3(1.0, 1.0, 1.0));
        let mut b = a.clone();
        assert_eq!(a.content_hash(), b.content_hash());
        b.vertices[0].x += 1e-9;
        assert_ne!(a.content_hash(), b.content_hash());
    }
}
