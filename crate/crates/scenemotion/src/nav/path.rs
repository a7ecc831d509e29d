//! A* pathfinding over triangle adjacency with funnel smoothing.
//!
//! The search graph has one node per triangle plus virtual endpoints: cost =
//! |start - c(t_start)| + centroid-to-centroid hops + |c(t_goal) - goal|.
//! The smoothed polyline is the taut path through the corridor portals.

use super::{NavError, NavMesh};
use crate::geom::Vec2;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Waypoint path between two walkable points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Path {
    pub waypoints: Vec<Vec2>,
    /// Length of the smoothed waypoint polyline, meters.
    pub total_length: f64,
    /// Cost of the triangle-graph path found by the search.
    pub graph_cost: f64,
    /// Length of the unsmoothed start -> centroids -> goal polyline.
    pub corridor_length: f64,
}

#[derive(PartialEq)]
struct HeapEntry {
    priority: f64,
    tri: usize,
}

impl Eq for HeapEntry {}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on priority; ties broken toward the lower triangle index
        // for determinism.
        other
            .priority
            .total_cmp(&self.priority)
            .then_with(|| other.tri.cmp(&self.tri))
    }
}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn find_path(nav: &NavMesh, start: Vec2, goal: Vec2) -> Result<Path, NavError> {
    let t_start = nav
        .tri_containing(start)
        .ok_or(NavError::NotWalkable(start.x, start.y))?;
    let t_goal = nav
        .tri_containing(goal)
        .ok_or(NavError::NotWalkable(goal.x, goal.y))?;

    if t_start == t_goal {
        let c = nav.centroid(t_start);
        let len = start.dist(goal);
        let via = start.dist(c) + c.dist(goal);
        return Ok(Path {
            waypoints: vec![start, goal],
            total_length: len,
            graph_cost: via,
            corridor_length: via,
        });
    }

    let n = nav.triangles().len();
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![-1i64; n];
    let mut closed = vec![false; n];
    let mut heap = BinaryHeap::new();
    g[t_start] = start.dist(nav.centroid(t_start));
    heap.push(HeapEntry {
        priority: g[t_start] + nav.centroid(t_start).dist(goal),
        tri: t_start,
    });
    while let Some(HeapEntry { tri, .. }) = heap.pop() {
        if closed[tri] {
            continue;
        }
        closed[tri] = true;
        if tri == t_goal {
            break;
        }
        let c = nav.centroid(tri);
        for &nb in &nav.adjacency()[tri] {
            if nb < 0 {
                continue;
            }
            let nb = nb as usize;
            if closed[nb] {
                continue;
            }
            let cn = nav.centroid(nb);
            let cand = g[tri] + c.dist(cn);
            if cand < g[nb] - 1e-15 {
                g[nb] = cand;
                parent[nb] = tri as i64;
                heap.push(HeapEntry {
                    priority: cand + cn.dist(goal),
                    tri: nb,
                });
            }
        }
    }
    if !closed[t_goal] {
        return Err(NavError::NoPath);
    }

    // Reconstruct the triangle corridor.
    let mut corridor = vec![t_goal];
    let mut cur = t_goal;
    while parent[cur] >= 0 {
        cur = parent[cur] as usize;
        corridor.push(cur);
    }
    corridor.reverse();
    debug_assert_eq!(corridor[0], t_start);

    let graph_cost = g[t_goal] + nav.centroid(t_goal).dist(goal);
    let mut corridor_length = start.dist(nav.centroid(corridor[0]));
    for w in corridor.windows(2) {
        corridor_length += nav.centroid(w[0]).dist(nav.centroid(w[1]));
    }
    corridor_length += nav.centroid(t_goal).dist(goal);

    // Portals: crossing out of a CCW triangle through directed edge
    // (v[e], v[e+1]) puts v[e+1] on the left and v[e] on the right.
    let mut portals: Vec<(Vec2, Vec2)> = vec![(start, start)];
    for w in corridor.windows(2) {
        let (t, next) = (w[0], w[1]);
        let e = (0..3)
            .find(|&e| nav.adjacency()[t][e] == next as i32)
            .expect("corridor edge");
        let tri = nav.triangles()[t];
        let left = nav.vertices()[tri[(e + 1) % 3] as usize];
        let right = nav.vertices()[tri[e] as usize];
        portals.push((left, right));
    }
    portals.push((goal, goal));

    let waypoints = shortcut(nav, funnel(&portals));
    let total_length = polyline_length(&waypoints);
    Ok(Path {
        waypoints,
        total_length,
        graph_cost,
        corridor_length,
    })
}

pub fn polyline_length(pts: &[Vec2]) -> f64 {
    pts.windows(2).map(|w| w[0].dist(w[1])).sum()
}

fn triarea2(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn veq(a: Vec2, b: Vec2) -> bool {
    a.dist(b) < 1e-12
}

/// Simple stupid funnel over the portal sequence; the first and last portals
/// are the degenerate (start, start) and (goal, goal) pairs.
fn funnel(portals: &[(Vec2, Vec2)]) -> Vec<Vec2> {
    let mut pts = Vec::new();
    let (mut apex, _) = portals[0];
    let mut portal_left = apex;
    let mut portal_right = apex;
    let (mut left_i, mut right_i) = (0usize, 0usize);
    pts.push(apex);

    let mut i = 1;
    while i < portals.len() {
        let (left, right) = portals[i];

        // Tighten the right leg: the new right endpoint narrows the funnel
        // when it sits at or CCW-of the current right leg.
        if triarea2(apex, portal_right, right) >= 0.0 {
            if veq(apex, portal_right) || triarea2(apex, portal_left, right) < 0.0 {
                portal_right = right;
                right_i = i;
            } else {
                // Right leg crossed over the left: turn the corner at left.
                if !veq(portal_left, *pts.last().unwrap()) {
                    pts.push(portal_left);
                }
                apex = portal_left;
                portal_right = apex;
                right_i = left_i;
                i = left_i + 1;
                continue;
            }
        }

        // Tighten the left leg (mirror image).
        if triarea2(apex, portal_left, left) <= 0.0 {
            if veq(apex, portal_left) || triarea2(apex, portal_right, left) > 0.0 {
                portal_left = left;
                left_i = i;
            } else {
                if !veq(portal_right, *pts.last().unwrap()) {
                    pts.push(portal_right);
                }
                apex = portal_right;
                portal_left = apex;
                left_i = right_i;
                i = right_i + 1;
                continue;
            }
        }
        i += 1;
    }
    let goal = portals[portals.len() - 1].0;
    if !veq(goal, *pts.last().unwrap()) {
        pts.push(goal);
    }
    pts
}

/// Greedy line-of-sight shortcutting. The funnel is taut only within the
/// corridor A* happened to pick; this pass removes corners whenever the
/// direct segment is verifiably walkable, so an unobstructed query yields a
/// two-point path.
fn shortcut(nav: &NavMesh, pts: Vec<Vec2>) -> Vec<Vec2> {
    if pts.len() <= 2 {
        return pts;
    }
    let mut out = vec![pts[0]];
    let mut anchor = 0;
    while anchor < pts.len() - 1 {
        let mut best = anchor + 1;
        for j in (anchor + 2..pts.len()).rev() {
            if nav.segment_walkable(pts[anchor], pts[j]) {
                best = j;
                break;
            }
        }
        out.push(pts[best]);
        anchor = best;
    }
    out
}
