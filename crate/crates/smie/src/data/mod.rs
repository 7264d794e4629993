//! Dataset model: domain types, file formats, preprocessing, synthetic data
//! generation, and zero-shot class splits.

mod io;
mod preprocess;
mod splits;
mod synth;

pub use io::{
    load_manifest, read_embedding, read_skeleton, read_split, write_embedding, write_manifest,
    write_skeleton, write_split,
};
pub use preprocess::{drop_invalid_frames, l2_normalize, resample_time};
pub use splits::make_splits;
pub use synth::{generate_synthetic, SynthConfig, TEST_MANIFEST, TRAIN_MANIFEST};

use crate::error::{Result, SmieError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

/// A skeleton sequence: K frames of J joints with C coordinate channels,
/// stored row-major in (frame, joint, channel) order.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonSequence {
    frames: usize,
    joints: usize,
    channels: usize,
    values: Vec<f64>,
}

impl SkeletonSequence {
    /// Validates shape consistency and finiteness.
    pub fn new(frames: usize, joints: usize, channels: usize, values: Vec<f64>) -> Result<Self> {
        if frames == 0 || joints == 0 || channels == 0 {
            return Err(SmieError::Validation(format!(
                "sequence dimensions must be positive, got {frames}x{joints}x{channels}"
            )));
        }
        if values.len() != frames * joints * channels {
            return Err(SmieError::Validation(format!(
                "value count {} does not match shape {frames}x{joints}x{channels}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(SmieError::Validation(format!(
                "non-finite value at flat index {bad}"
            )));
        }
        Ok(SkeletonSequence {
            frames,
            joints,
            channels,
            values,
        })
    }

    /// Like [`SkeletonSequence::new`] but for values already known finite
    /// (outputs of arithmetic on validated sequences).
    pub(crate) fn from_raw_parts(
        frames: usize,
        joints: usize,
        channels: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != frames * joints * channels || frames == 0 {
            return Err(SmieError::Validation(
                "inconsistent sequence dimensions".into(),
            ));
        }
        Ok(SkeletonSequence {
            frames,
            joints,
            channels,
            values,
        })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn joints(&self) -> usize {
        self.joints
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// One frame as a flat (joint-major) slice of length J*C.
    pub fn frame(&self, k: usize) -> &[f64] {
        let stride = self.joints * self.channels;
        &self.values[k * stride..(k + 1) * stride]
    }

    pub fn at(&self, frame: usize, joint: usize, channel: usize) -> f64 {
        self.values[(frame * self.joints + joint) * self.channels + channel]
    }
}

/// A class-name embedding vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticEmbedding {
    pub class_id: u32,
    pub vector: Vec<f64>,
}

impl SemanticEmbedding {
    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

/// Manifest record: one class with its embedding file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ManifestClass {
    pub id: u32,
    pub name: String,
    pub embedding: String,
}

/// Manifest record: one skeleton sample.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ManifestSample {
    pub id: u32,
    pub class_id: u32,
    pub skeleton: String,
}

/// A dataset manifest; file paths are relative to the manifest's directory.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DatasetManifest {
    pub classes: Vec<ManifestClass>,
    pub samples: Vec<ManifestSample>,
    #[serde(skip)]
    pub root: PathBuf,
}

impl DatasetManifest {
    pub fn class_ids(&self) -> BTreeSet<u32> {
        self.classes.iter().map(|c| c.id).collect()
    }

    pub fn class_names(&self) -> BTreeMap<u32, String> {
        self.classes
            .iter()
            .map(|c| (c.id, c.name.clone()))
            .collect()
    }

    pub fn embedding_path(&self, class: &ManifestClass) -> PathBuf {
        self.root.join(&class.embedding)
    }

    pub fn skeleton_path(&self, sample: &ManifestSample) -> PathBuf {
        self.root.join(&sample.skeleton)
    }

    /// Load and L2-normalize every class embedding.
    pub fn load_embeddings(&self) -> Result<BTreeMap<u32, SemanticEmbedding>> {
        let mut out = BTreeMap::new();
        for class in &self.classes {
            let raw = read_embedding(&self.embedding_path(class))?;
            let normalized = l2_normalize(class.id, &raw)?;
            out.insert(class.id, normalized);
        }
        Ok(out)
    }

    pub fn load_skeleton(&self, sample: &ManifestSample) -> Result<SkeletonSequence> {
        read_skeleton(&self.skeleton_path(sample))
    }
}

/// Disjoint seen/unseen class-id sets defining one zero-shot fold.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassSplit {
    pub seen: BTreeSet<u32>,
    pub unseen: BTreeSet<u32>,
}

impl ClassSplit {
    pub fn new(seen: BTreeSet<u32>, unseen: BTreeSet<u32>) -> Result<Self> {
        if seen.is_empty() || unseen.is_empty() {
            return Err(SmieError::Validation(
                "split must have non-empty seen and unseen sets".into(),
            ));
        }
        if seen.intersection(&unseen).next().is_some() {
            return Err(SmieError::Validation(
                "seen and unseen classes must be disjoint".into(),
            ));
        }
        Ok(ClassSplit { seen, unseen })
    }

    /// Check that every split class exists in the manifest.
    pub fn validate_against(&self, manifest: &DatasetManifest) -> Result<()> {
        let known = manifest.class_ids();
        for id in self.seen.iter().chain(self.unseen.iter()) {
            if !known.contains(id) {
                return Err(SmieError::Validation(format!(
                    "split references unknown class id {id}"
                )));
            }
        }
        Ok(())
    }
}

/// Standard dataset directory layout written by the synthetic generator.
#[derive(Debug, Clone)]
pub struct DatasetDir {
    pub root: PathBuf,
    pub train: DatasetManifest,
    pub test: DatasetManifest,
}

impl DatasetDir {
    /// Open a dataset directory containing train and test manifests.
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let train = load_manifest(root.join(TRAIN_MANIFEST))?;
        let test = load_manifest(root.join(TEST_MANIFEST))?;
        Ok(DatasetDir { root, train, test })
    }

    pub fn default_split_path(&self) -> PathBuf {
        self.root.join("split.json")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_rejects_bad_shapes_and_values() {
        assert!(SkeletonSequence::new(0, 1, 1, vec![]).is_err());
        assert!(SkeletonSequence::new(1, 1, 1, vec![1.0, 2.0]).is_err());
        assert!(SkeletonSequence::new(1, 1, 1, vec![f64::NAN]).is_err());
        assert!(SkeletonSequence::new(1, 1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn sequence_indexing_is_row_major() {
        let seq = SkeletonSequence::new(2, 2, 3, (0..12).map(f64::from).collect()).unwrap();
        assert_eq!(seq.at(0, 0, 0), 0.0);
        assert_eq!(seq.at(0, 1, 2), 5.0);
        assert_eq!(seq.at(1, 0, 0), 6.0);
        assert_eq!(seq.frame(1), &[6.0, 7.0, 8.0, 9.0, 10.0, 11.0]);
    }

    #[test]
    fn split_invariants() {
        let seen: BTreeSet<u32> = [0, 1].into();
        let unseen: BTreeSet<u32> = [2].into();
        assert!(ClassSplit::new(seen.clone(), unseen).is_ok());
        assert!(ClassSplit::new(seen.clone(), BTreeSet::new()).is_err());
        assert!(ClassSplit::new(seen.clone(), seen).is_err());
    }
}
