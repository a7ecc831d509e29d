//! Axis-aligned BVH over mesh triangles for distance, segment, and ray
//! queries during SDF baking.

use crate::geom::{point_triangle_dist2, ray_triangle_t, segment_triangle_intersects, Aabb3, Vec3};
use crate::mesh::TriMesh;

struct Node {
    aabb: Aabb3,
    // Leaf: start/count into `tris`. Inner: children indices.
    left: i32,
    right: i32,
    start: u32,
    count: u32,
}

pub struct TriBvh {
    nodes: Vec<Node>,
    tris: Vec<(Vec3, Vec3, Vec3)>,
}

const LEAF_SIZE: usize = 8;

impl TriBvh {
    pub fn build(mesh: &TriMesh) -> TriBvh {
        let mut tris: Vec<(Vec3, Vec3, Vec3)> = (0..mesh.faces.len())
            .map(|f| mesh.face_vertices(f))
            .collect();
        let mut order: Vec<usize> = (0..tris.len()).collect();
        let mut nodes = Vec::new();
        Self::split(&mut tris, &mut order, 0, mesh.faces.len(), &mut nodes);
        // Reorder triangles to match leaf ranges.
        let tris = order.iter().map(|&i| tris[i]).collect();
        TriBvh { nodes, tris }
    }

    fn tri_aabb(t: &(Vec3, Vec3, Vec3)) -> Aabb3 {
        Aabb3::from_points([t.0, t.1, t.2])
    }

    fn split(
        tris: &mut [(Vec3, Vec3, Vec3)],
        order: &mut Vec<usize>,
        start: usize,
        count: usize,
        nodes: &mut Vec<Node>,
    ) -> i32 {
        let mut aabb = Aabb3::empty();
        for &i in &order[start..start + count] {
            aabb = aabb.union(&Self::tri_aabb(&tris[i]));
        }
        let id = nodes.len() as i32;
        nodes.push(Node {
            aabb,
            left: -1,
            right: -1,
            start: start as u32,
            count: 0,
        });
        if count <= LEAF_SIZE {
            nodes[id as usize].count = count as u32;
            return id;
        }
        let ext = aabb.extent();
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let centroid = |t: &(Vec3, Vec3, Vec3)| {
            let c = (t.0 + t.1 + t.2) / 3.0;
            match axis {
                0 => c.x,
                1 => c.y,
                _ => c.z,
            }
        };
        order[start..start + count]
            .sort_by(|&a, &b| centroid(&tris[a]).total_cmp(&centroid(&tris[b])));
        let half = count / 2;
        let l = Self::split(tris, order, start, half, nodes);
        let r = Self::split(tris, order, start + half, count - half, nodes);
        nodes[id as usize].left = l;
        nodes[id as usize].right = r;
        id
    }

    /// Distance from a point to the closest triangle.
    pub fn distance(&self, p: Vec3) -> f64 {
        let mut best = f64::INFINITY;
        self.distance_rec(0, p, &mut best);
        best.sqrt()
    }

    fn distance_rec(&self, node: i32, p: Vec3, best: &mut f64) {
        let n = &self.nodes[node as usize];
        if n.aabb.dist2(p) >= *best {
            return;
        }
        if n.count > 0 {
            for t in &self.tris[n.start as usize..(n.start + n.count) as usize] {
                let d2 = point_triangle_dist2(p, t.0, t.1, t.2);
                if d2 < *best {
                    *best = d2;
                }
            }
            return;
        }
        // Visit the nearer child first for tighter pruning.
        let (l, r) = (n.left, n.right);
        let dl = self.nodes[l as usize].aabb.dist2(p);
        let dr = self.nodes[r as usize].aabb.dist2(p);
        if dl <= dr {
            self.distance_rec(l, p, best);
            self.distance_rec(r, p, best);
        } else {
            self.distance_rec(r, p, best);
            self.distance_rec(l, p, best);
        }
    }

    /// Whether segment [a, b] intersects any triangle.
    pub fn segment_hits(&self, a: Vec3, b: Vec3) -> bool {
        let mut stack = vec![0i32];
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id as usize];
            if !n.aabb.segment_intersects(a, b) {
                continue;
            }
            if n.count > 0 {
                for t in &self.tris[n.start as usize..(n.start + n.count) as usize] {
                    if segment_triangle_intersects(a, b, t.0, t.1, t.2) {
                        return true;
                    }
                }
            } else {
                stack.push(n.left);
                stack.push(n.right);
            }
        }
        false
    }

    /// Number of triangle crossings along the ray. Coincident coplanar faces
    /// are each counted, which preserves parity for solids assembled from
    /// touching closed components.
    pub fn ray_hit_count(&self, o: Vec3, d: Vec3) -> usize {
        let mut count = 0;
        let mut stack = vec![0i32];
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id as usize];
            if !n.aabb.ray_intersects(o, d) {
                continue;
            }
            if n.count > 0 {
                for t in &self.tris[n.start as usize..(n.start + n.count) as usize] {
                    if ray_triangle_t(o, d, t.0, t.1, t.2).is_some() {
                        count += 1;
                    }
                }
            } else {
                stack.push(n.left);
                stack.push(n.right);
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::vec3;
    use crate::mesh::{box_mesh, icosphere};

    #[test]
    fn distance_to_unit_box() {
        let bvh = TriBvh::build(&box_mesh(vec3(-0.5, -0.5, -0.5), vec3(0.5, 0.5, 0.5)));
        assert!((bvh.distance(vec3(1.5, 0.0, 0.0)) - 1.0).abs() < 1e-12);
        assert!((bvh.distance(vec3(0.0, 0.0, 0.0)) - 0.5).abs() < 1e-12);
        assert!((bvh.distance(vec3(1.0, 1.0, 0.0)) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sphere_ray_parity() {
        let bvh = TriBvh::build(&icosphere(1.0, 3));
        // From inside: odd number of crossings; outside: even.
        assert_eq!(bvh.ray_hit_count(vec3(0.0, 0.01, 0.02), vec3(1.0, 0.0, 0.0)) % 2, 1);
        assert_eq!(bvh.ray_hit_count(vec3(2.0, 0.01, 0.02), vec3(1.0, 0.0, 0.0)) % 2, 0);
    }

    #[test]
    fn segment_queries() {
        let bvh = TriBvh::build(&box_mesh(vec3(-0.5, -0.5, -0.5), vec3(0.5, 0.5, 0.5)));
        assert!(bvh.segment_hits(vec3(-1.0, 0.0, 0.0), vec3(0.0, 0.0, 0.0)));
        assert!(!bvh.segment_hits(vec3(0.6, 0.0, 0.0), vec3(1.5, 0.0, 0.0)));
    }
}
