//! Binary grid cache: header plus little-endian f32 arrays, keyed by mesh
//! content hash, resolution, and margin.

use super::{bake_sdf, SdfError, SdfGrid};
use crate::geom::{vec3, Aabb3};
use crate::mesh::TriMesh;
use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 4] = b"SMSD";
const VERSION: u32 = 1;

pub fn save_grid(grid: &SdfGrid, path: &Path) -> Result<(), SdfError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(MAGIC)?;
    f.write_all(&VERSION.to_le_bytes())?;
    f.write_all(&(grid.resolution as u32).to_le_bytes())?;
    for v in [
        grid.bounds.min.x,
        grid.bounds.min.y,
        grid.bounds.min.z,
        grid.bounds.max.x,
        grid.bounds.max.y,
        grid.bounds.max.z,
    ] {
        f.write_all(&v.to_le_bytes())?;
    }
    for v in grid.values() {
        f.write_all(&v.to_le_bytes())?;
    }
    for g in grid.gradients() {
        for c in g {
            f.write_all(&c.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn load_grid(path: &Path) -> Result<SdfGrid, SdfError> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    f.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(SdfError::Format("bad magic".into()));
    }
    let mut u32buf = [0u8; 4];
    f.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(SdfError::Format(format!("unsupported version {version}")));
    }
    f.read_exact(&mut u32buf)?;
    let resolution = u32::from_le_bytes(u32buf) as usize;
    if !(8..=1024).contains(&resolution) {
        return Err(SdfError::Format(format!("bad resolution {resolution}")));
    }
    let mut f64buf = [0u8; 8];
    let mut bounds = [0f64; 6];
    for b in &mut bounds {
        f.read_exact(&mut f64buf)?;
        *b = f64::from_le_bytes(f64buf);
    }
    let n = resolution * resolution * resolution;
    let mut values = vec![0f32; n];
    for v in &mut values {
        f.read_exact(&mut u32buf)?;
        *v = f32::from_le_bytes(u32buf);
    }
    let mut gradients = vec![[0f32; 3]; n];
    for g in &mut gradients {
        for c in g.iter_mut() {
            f.read_exact(&mut u32buf)?;
            *c = f32::from_le_bytes(u32buf);
        }
    }
    let bounds = Aabb3 {
        min: vec3(bounds[0], bounds[1], bounds[2]),
        max: vec3(bounds[3], bounds[4], bounds[5]),
    };
    Ok(SdfGrid::from_parts(resolution, bounds, values, gradients))
}

/// Cache file path for a mesh/resolution/margin combination.
pub fn cache_path(dir: &Path, mesh: &TriMesh, resolution: usize, margin: f64) -> PathBuf {
    let mut h = Sha256::new();
    h.update(mesh.content_hash());
    h.update((resolution as u64).to_le_bytes());
    h.update(margin.to_le_bytes());
    let digest = h.finalize();
    let hex: String = digest[..12].iter().map(|b| format!("{b:02x}")).collect();
    dir.join(format!("sdf_{hex}_{resolution}.bin"))
}

/// Loads the cached grid when present, baking and caching otherwise.
pub fn bake_or_load(
    dir: &Path,
    mesh: &TriMesh,
    resolution: usize,
    margin: f64,
) -> Result<SdfGrid, SdfError> {
    std::fs::create_dir_all(dir)?;
    let path = cache_path(dir, mesh, resolution, margin);
    if path.exists() {
        if let Ok(grid) = load_grid(&path) {
            return Ok(grid);
        }
    }
    let grid = bake_sdf(mesh, resolution, margin)?;
    save_grid(&grid, &path)?;
    Ok(grid)
}
