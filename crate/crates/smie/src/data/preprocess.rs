//! Preprocessing: embedding normalization, invalid-frame removal, temporal
//! resampling.

use crate::data::{SemanticEmbedding, SkeletonSequence};
use crate::error::{Result, SmieError};

/// Scale a vector to unit Euclidean norm.
pub fn l2_normalize(class_id: u32, vector: &[f64]) -> Result<SemanticEmbedding> {
    let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(SmieError::Validation(format!(
            "cannot L2-normalize vector for class {class_id}: norm is {norm}"
        )));
    }
    Ok(SemanticEmbedding {
        class_id,
        vector: vector.iter().map(|v| v / norm).collect(),
    })
}

/// Remove frames whose values are all exactly zero, preserving order.
///
/// Zeroed frames are the conventional dropout encoding of skeleton capture
/// rigs; a sequence of nothing but dropouts is rejected.
pub fn drop_invalid_frames(seq: &SkeletonSequence) -> Result<SkeletonSequence> {
    let mut kept = Vec::with_capacity(seq.values().len());
    let mut kept_frames = 0;
    for k in 0..seq.frames() {
        let frame = seq.frame(k);
        if frame.iter().any(|&v| v != 0.0) {
            kept.extend_from_slice(frame);
            kept_frames += 1;
        }
    }
    if kept_frames == 0 {
        return Err(SmieError::Validation(
            "all frames are invalid (all-zero)".into(),
        ));
    }
    SkeletonSequence::from_raw_parts(kept_frames, seq.joints(), seq.channels(), kept)
}

/// Resample a sequence to `target_frames` frames by linear interpolation.
///
/// Source positions are endpoint-aligned: target index t maps to
/// s = t*(K-1)/(target-1), so the first and last frames are preserved
/// exactly. A single-frame source (or a single-frame target) replicates.
pub fn resample_time(seq: &SkeletonSequence, target_frames: usize) -> Result<SkeletonSequence> {
    if target_frames == 0 {
        return Err(SmieError::Validation(
            "target frame count must be positive".into(),
        ));
    }
    let k = seq.frames();
    let stride = seq.joints() * seq.channels();
    if k == target_frames {
        return Ok(seq.clone());
    }
    let mut values = Vec::with_capacity(target_frames * stride);
    for t in 0..target_frames {
        if k == 1 || target_frames == 1 {
            // replication / first-frame mapping
            values.extend_from_slice(seq.frame(0));
            continue;
        }
        let s = t as f64 * (k - 1) as f64 / (target_frames - 1) as f64;
        let lo = s.floor() as usize;
        let hi = lo.min(k - 2) + 1;
        let frac = s - lo as f64;
        let lo_frame = seq.frame(lo.min(k - 1));
        let hi_frame = seq.frame(hi);
        for i in 0..stride {
            values.push(lo_frame[i] + frac * (hi_frame[i] - lo_frame[i]));
        }
    }
    SkeletonSequence::from_raw_parts(target_frames, seq.joints(), seq.channels(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_1d(values: &[f64]) -> SkeletonSequence {
        SkeletonSequence::new(values.len(), 1, 1, values.to_vec()).unwrap()
    }

    #[test]
    fn l2_normalize_hand_example() {
        let e = l2_normalize(0, &[3.0, 4.0]).unwrap();
        assert!((e.vector[0] - 0.6).abs() < 1e-15);
        assert!((e.vector[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn l2_normalize_unit_vector_is_identity() {
        let e = l2_normalize(1, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(e.vector, vec![0.0, 1.0, 0.0]);
        let norm: f64 = e.vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn l2_normalize_rejects_zero_vector() {
        assert!(l2_normalize(2, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn drop_invalid_removes_zero_frames_in_order() {
        let seq = SkeletonSequence::new(3, 1, 2, vec![1.0, 2.0, 0.0, 0.0, 3.0, 4.0]).unwrap();
        let out = drop_invalid_frames(&seq).unwrap();
        assert_eq!(out.frames(), 2);
        assert_eq!(out.values(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn drop_invalid_is_identity_without_zero_frames() {
        let seq = seq_1d(&[1.0, 2.0, 3.0]);
        let out = drop_invalid_frames(&seq).unwrap();
        assert_eq!(out.values(), seq.values());
    }

    #[test]
    fn drop_invalid_rejects_all_zero() {
        let seq = SkeletonSequence::new(2, 1, 1, vec![0.0, 0.0]).unwrap();
        assert!(drop_invalid_frames(&seq).is_err());
    }

    #[test]
    fn drop_invalid_is_idempotent() {
        let seq = SkeletonSequence::new(4, 1, 1, vec![1.0, 0.0, 2.0, 0.0]).unwrap();
        let once = drop_invalid_frames(&seq).unwrap();
        let twice = drop_invalid_frames(&once).unwrap();
        assert_eq!(once.values(), twice.values());
    }

    #[test]
    fn resample_hand_example() {
        let seq = seq_1d(&[0.0, 2.0]);
        let out = resample_time(&seq, 3).unwrap();
        assert_eq!(out.values(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn resample_identity_when_target_matches() {
        let seq = seq_1d(&[0.5, 1.5, -2.0]);
        let out = resample_time(&seq, 3).unwrap();
        assert_eq!(out.values(), seq.values());
    }

    #[test]
    fn resample_replicates_single_frame() {
        let seq = seq_1d(&[5.0]);
        let out = resample_time(&seq, 4).unwrap();
        assert_eq!(out.values(), &[5.0; 4]);
    }

    #[test]
    fn resample_to_single_frame_takes_first() {
        let seq = seq_1d(&[3.0, 9.0, 27.0]);
        let out = resample_time(&seq, 1).unwrap();
        assert_eq!(out.values(), &[3.0]);
    }

    #[test]
    fn resample_preserves_endpoints_exactly() {
        let seq = seq_1d(&[1.25, -0.5, 7.75, 2.0]);
        let out = resample_time(&seq, 9).unwrap();
        assert_eq!(out.values()[0], 1.25);
        assert_eq!(out.values()[8], 2.0);
    }

    #[test]
    fn resample_stays_within_bracketing_values() {
        let seq = seq_1d(&[0.0, 4.0, -2.0, 6.0]);
        let out = resample_time(&seq, 11).unwrap();
        let lo = -2.0;
        let hi = 6.0;
        for &v in out.values() {
            assert!((lo..=hi).contains(&v));
        }
    }
}
