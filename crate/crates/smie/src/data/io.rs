//! Bit-exact file I/O: SMSK skeleton files, SMEM embedding files, JSON
//! manifests and splits.
//!
//! Binary layouts are little-endian. Values are 32-bit reals on disk and
//! 64-bit in memory.

use crate::data::{ClassSplit, DatasetManifest, SkeletonSequence};
use crate::error::{Result, SmieError};
use std::collections::BTreeSet;
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const SMSK_MAGIC: [u8; 4] = *b"SMSK";
const SMEM_MAGIC: [u8; 4] = *b"SMEM";
const FORMAT_VERSION: u32 = 1;

fn read_u32(r: &mut impl Read, path: &Path, what: &str) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|_| SmieError::format(path, format!("truncated {what}")))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f32s(r: &mut impl Read, count: usize, path: &Path) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; count * 4];
    r.read_exact(&mut bytes)
        .map_err(|_| SmieError::format(path, "truncated payload"))?;
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect())
}

fn expect_eof(r: &mut impl Read, path: &Path) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe) {
        Ok(0) => Ok(()),
        Ok(_) => Err(SmieError::format(path, "trailing bytes after payload")),
        Err(e) => Err(SmieError::io(path, e)),
    }
}

/// Write a skeleton sequence in the SMSK layout.
pub fn write_skeleton(path: impl AsRef<Path>, seq: &SkeletonSequence) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| SmieError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| SmieError::io(path, e);
    w.write_all(&SMSK_MAGIC).map_err(io_err)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io_err)?;
    for dim in [seq.frames(), seq.joints(), seq.channels()] {
        w.write_all(&(dim as u32).to_le_bytes()).map_err(io_err)?;
    }
    for &v in seq.values() {
        w.write_all(&(v as f32).to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Read a skeleton sequence, validating magic, version, shape, payload
/// length, and finiteness.
pub fn read_skeleton(path: impl AsRef<Path>) -> Result<SkeletonSequence> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| SmieError::io(path, e))?;
    let len = file.metadata().map_err(|e| SmieError::io(path, e))?.len();
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| SmieError::format(path, "truncated header"))?;
    if magic != SMSK_MAGIC {
        return Err(SmieError::format(path, "bad magic, not an SMSK file"));
    }
    let version = read_u32(&mut r, path, "version")?;
    if version != FORMAT_VERSION {
        return Err(SmieError::format(
            path,
            format!("unsupported SMSK version {version}"),
        ));
    }
    let frames = read_u32(&mut r, path, "frame count")? as usize;
    let joints = read_u32(&mut r, path, "joint count")? as usize;
    let channels = read_u32(&mut r, path, "channel count")? as usize;
    if frames == 0 || joints == 0 || channels == 0 {
        return Err(SmieError::format(path, "zero dimension in header"));
    }
    let count = frames
        .checked_mul(joints)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| SmieError::format(path, "dimension overflow"))?;
    let expected_len = 20 + 4 * count as u64;
    if len != expected_len {
        return Err(SmieError::format(
            path,
            format!("truncated payload: expected {expected_len} bytes, file has {len}"),
        ));
    }
    let values = read_f32s(&mut r, count, path)?;
    expect_eof(&mut r, path)?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SmieError::format(path, "non-finite value in payload"));
    }
    SkeletonSequence::new(frames, joints, channels, values)
}

/// Write an embedding vector in the SMEM layout.
pub fn write_embedding(path: impl AsRef<Path>, vector: &[f64]) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| SmieError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| SmieError::io(path, e);
    w.write_all(&SMEM_MAGIC).map_err(io_err)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(vector.len() as u32).to_le_bytes())
        .map_err(io_err)?;
    for &v in vector {
        w.write_all(&(v as f32).to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Read an embedding vector from an SMEM file.
pub fn read_embedding(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| SmieError::io(path, e))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| SmieError::format(path, "truncated header"))?;
    if magic != SMEM_MAGIC {
        return Err(SmieError::format(path, "bad magic, not an SMEM file"));
    }
    let version = read_u32(&mut r, path, "version")?;
    if version != FORMAT_VERSION {
        return Err(SmieError::format(
            path,
            format!("unsupported SMEM version {version}"),
        ));
    }
    let dim = read_u32(&mut r, path, "dimension")? as usize;
    if dim == 0 {
        return Err(SmieError::format(path, "zero-dimensional embedding"));
    }
    let values = read_f32s(&mut r, dim, path)?;
    expect_eof(&mut r, path)?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SmieError::format(path, "non-finite value in payload"));
    }
    Ok(values)
}

/// Load a manifest and validate it: non-empty classes, unique class ids,
/// resolvable class references, and existing referenced files.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| SmieError::io(path, e))?;
    let mut manifest: DatasetManifest = serde_json::from_str(&text)
        .map_err(|e| SmieError::format(path, format!("invalid manifest JSON: {e}")))?;
    manifest.root = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| ".".into());

    if manifest.classes.is_empty() {
        return Err(SmieError::Validation(format!(
            "manifest {} has no classes",
            path.display()
        )));
    }
    let mut seen_classes = BTreeSet::new();
    for class in &manifest.classes {
        if !seen_classes.insert(class.id) {
            return Err(SmieError::Validation(format!(
                "duplicate class id {} in manifest {}",
                class.id,
                path.display()
            )));
        }
        let emb = manifest.embedding_path(class);
        if !emb.is_file() {
            return Err(SmieError::Validation(format!(
                "class {} references missing embedding file {}",
                class.id,
                emb.display()
            )));
        }
    }
    let mut seen_samples = BTreeSet::new();
    for sample in &manifest.samples {
        if !seen_samples.insert(sample.id) {
            return Err(SmieError::Validation(format!(
                "duplicate sample id {} in manifest {}",
                sample.id,
                path.display()
            )));
        }
        if !seen_classes.contains(&sample.class_id) {
            return Err(SmieError::Validation(format!(
                "sample {} references unknown class id {}",
                sample.id, sample.class_id
            )));
        }
        let skel = manifest.skeleton_path(sample);
        if !skel.is_file() {
            return Err(SmieError::Validation(format!(
                "sample {} references missing skeleton file {}",
                sample.id,
                skel.display()
            )));
        }
    }
    Ok(manifest)
}

/// Serialize a manifest as pretty JSON.
pub fn write_manifest(path: impl AsRef<Path>, manifest: &DatasetManifest) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| SmieError::format(path, e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| SmieError::io(path, e))
}

/// Read a split file and check its invariants.
pub fn read_split(path: impl AsRef<Path>) -> Result<ClassSplit> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| SmieError::io(path, e))?;
    let split: ClassSplit = serde_json::from_str(&text)
        .map_err(|e| SmieError::format(path, format!("invalid split JSON: {e}")))?;
    ClassSplit::new(split.seen, split.unseen)
}

pub fn write_split(path: impl AsRef<Path>, split: &ClassSplit) -> Result<()> {
    let path = path.as_ref();
    let text =
        serde_json::to_string_pretty(split).map_err(|e| SmieError::format(path, e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| SmieError::io(path, e))
}
