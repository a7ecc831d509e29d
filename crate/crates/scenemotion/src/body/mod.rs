//! Marker-based body representation.
//!
//! A body is a set of surface markers driven by a small state: pelvis
//! position, planar facing, and a barycentric blend over three canonical
//! poses (stand / sit / lie). Short motion clips are decoded from latent
//! actions by [`decoder::decode_primitive`]; the last frames of a clip seed
//! the next one.

mod decoder;
mod io;
mod surface;
mod template;

pub use decoder::{decode_primitive, DecoderConfig, LatentAction};
pub use io::{read_motion, write_motion};
pub use surface::body_surface_samples;
pub use template::{FeetPair, MarkerTemplate, Pose, TEMPLATE_VERSION};

use crate::geom::{RigidXY, Vec2, Vec3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BodyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("motion parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub const MOTION_FPS: f64 = 40.0;
pub const FRAME_DT: f64 = 1.0 / MOTION_FPS;
/// Frames per motion primitive (0.25 s at 40 FPS).
pub const PRIMITIVE_FRAMES: usize = 10;

/// One body frame: scene-frame marker positions plus the driving state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkerFrame {
    pub markers: Vec<Vec3>,
    pub pelvis: Vec3,
    pub facing: Vec2,
    /// Barycentric weights over (stand, sit, lie); non-negative, sums to 1.
    pub pose_blend: [f64; 3],
}

impl MarkerFrame {
    pub fn transformed(&self, xf: &RigidXY) -> MarkerFrame {
        MarkerFrame {
            markers: self.markers.iter().map(|&m| xf.apply(m)).collect(),
            pelvis: xf.apply(self.pelvis),
            facing: xf.apply_dir2(self.facing),
            pose_blend: self.pose_blend,
        }
    }

    pub fn yaw(&self) -> f64 {
        self.facing.angle()
    }
}

pub fn normalize_blend(blend: [f64; 3]) -> [f64; 3] {
    let mut b = blend.map(|w| w.max(0.0));
    let s: f64 = b.iter().sum();
    if s <= 1e-12 {
        return [1.0, 0.0, 0.0];
    }
    for w in &mut b {
        *w /= s;
    }
    b
}

/// Motion history conditioning the next primitive (one or two frames,
/// time-ordered, 40 FPS spacing).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MotionSeed {
    frames: Vec<MarkerFrame>,
}

impl MotionSeed {
    pub fn new(frames: Vec<MarkerFrame>) -> MotionSeed {
        assert!(
            (1..=2).contains(&frames.len()),
            "seed must hold 1 or 2 frames"
        );
        MotionSeed { frames }
    }

    /// A stationary seed: the frame repeated `m` times.
    pub fn from_rest(frame: MarkerFrame, m: usize) -> MotionSeed {
        MotionSeed::new(vec![frame; m.clamp(1, 2)])
    }

    pub fn frames(&self) -> &[MarkerFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &MarkerFrame {
        &self.frames[0]
    }

    pub fn last(&self) -> &MarkerFrame {
        self.frames.last().unwrap()
    }

    /// Frame before the last (the last itself for single-frame seeds).
    pub fn prev(&self) -> &MarkerFrame {
        &self.frames[self.frames.len().saturating_sub(2)]
    }

    pub fn transformed(&self, xf: &RigidXY) -> MotionSeed {
        MotionSeed {
            frames: self.frames.iter().map(|f| f.transformed(xf)).collect(),
        }
    }
}

/// A decoded motion primitive: a fixed number of frames plus per-frame
/// marker velocities (finite differences against the previous frame, with
/// the seed's last frame before frame 0).
#[derive(Clone, Debug)]
pub struct MotionClip {
    pub frames: Vec<MarkerFrame>,
    velocities: Vec<Vec<Vec3>>,
}

impl MotionClip {
    pub fn new(prev: &MarkerFrame, frames: Vec<MarkerFrame>) -> MotionClip {
        assert!(!frames.is_empty());
        let mut velocities = Vec::with_capacity(frames.len());
        let mut last = prev;
        for f in &frames {
            velocities.push(
                f.markers
                    .iter()
                    .zip(&last.markers)
                    .map(|(a, b)| (*a - *b) * MOTION_FPS)
                    .collect(),
            );
            last = f;
        }
        MotionClip { frames, velocities }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Marker velocities of frame `k`, meters per second.
    pub fn velocities(&self, k: usize) -> &[Vec3] {
        &self.velocities[k]
    }

    pub fn last_frame(&self) -> &MarkerFrame {
        self.frames.last().unwrap()
    }

    /// Seed for the next primitive: the last `m` frames.
    pub fn seed_for_next(&self, m: usize) -> MotionSeed {
        let m = m.clamp(1, 2).min(self.frames.len());
        MotionSeed::new(self.frames[self.frames.len() - m..].to_vec())
    }

    pub fn transformed(&self, xf: &RigidXY) -> MotionClip {
        MotionClip {
            frames: self.frames.iter().map(|f| f.transformed(xf)).collect(),
            velocities: self
                .velocities
                .iter()
                .map(|vs| vs.iter().map(|&v| xf.apply_dir(v)).collect())
                .collect(),
        }
    }
}

/// Rigid transform taking the clip's first-frame pelvis to the origin with
/// facing along +x; returns the canonical clip and the forward transform
/// (its inverse maps canonical coordinates back).
pub fn canonicalize(clip: &MotionClip) -> (MotionClip, RigidXY) {
    let xf = canonical_transform(&clip.frames[0]);
    (clip.transformed(&xf), xf)
}

pub fn canonicalize_seed(seed: &MotionSeed) -> (MotionSeed, RigidXY) {
    let xf = canonical_transform(seed.first());
    (seed.transformed(&xf), xf)
}

pub fn canonical_transform(frame: &MarkerFrame) -> RigidXY {
    let yaw = frame.facing.angle();
    RigidXY {
        yaw: -yaw,
        t: -(frame.pelvis.rotate_z(-yaw)),
    }
}
