//! Bidirectional motion attention, keyframe selection, and masking.
//!
//! Frames with large squared displacement to both temporal neighbors get the
//! highest attention; the top-P are zeroed out to build the attention-masked
//! sample whose features should carry less information than the original.

use crate::data::SkeletonSequence;
use crate::error::{Result, SmieError};

/// Per-frame motion and the normalized attention weights derived from it.
#[derive(Debug, Clone)]
pub struct MotionAttention {
    pub per_frame_motion: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Squared displacement to the next and previous frame, summed elementwise.
///
/// Displacements past either end of the sequence are 0, so no motion is
/// invented at the boundaries. Output layout matches the sequence values.
pub fn bidirectional_motion(seq: &SkeletonSequence) -> Vec<f64> {
    let k = seq.frames();
    let stride = seq.joints() * seq.channels();
    let values = seq.values();
    let mut motion = vec![0.0; values.len()];
    for frame in 0..k {
        let cur = &values[frame * stride..(frame + 1) * stride];
        let out = &mut motion[frame * stride..(frame + 1) * stride];
        if frame + 1 < k {
            let next = &values[(frame + 1) * stride..(frame + 2) * stride];
            for i in 0..stride {
                let d = next[i] - cur[i];
                out[i] += d * d;
            }
        }
        if frame > 0 {
            let prev = &values[(frame - 1) * stride..frame * stride];
            for i in 0..stride {
                let d = prev[i] - cur[i];
                out[i] += d * d;
            }
        }
    }
    motion
}

/// Average motion over joints and channels for each frame.
pub fn frame_motion(motion: &[f64], frames: usize) -> Vec<f64> {
    assert!(frames > 0 && motion.len() % frames == 0);
    let stride = motion.len() / frames;
    motion
        .chunks_exact(stride)
        .map(|chunk| chunk.iter().sum::<f64>() / stride as f64)
        .collect()
}

/// Normalize per-frame motion into attention weights summing to 1.
///
/// A static sequence (zero total motion) falls back to uniform weights.
pub fn attention_weights(per_frame_motion: &[f64]) -> Result<Vec<f64>> {
    if per_frame_motion.iter().any(|&p| p < 0.0) {
        return Err(SmieError::Validation(
            "per-frame motion must be non-negative".into(),
        ));
    }
    let total: f64 = per_frame_motion.iter().sum();
    let k = per_frame_motion.len();
    if total == 0.0 {
        return Ok(vec![1.0 / k as f64; k]);
    }
    Ok(per_frame_motion.iter().map(|&p| p / total).collect())
}

/// Convenience: attention weights straight from a sequence.
pub fn motion_attention(seq: &SkeletonSequence) -> Result<MotionAttention> {
    let motion = bidirectional_motion(seq);
    let per_frame_motion = frame_motion(&motion, seq.frames());
    let weights = attention_weights(&per_frame_motion)?;
    Ok(MotionAttention {
        per_frame_motion,
        weights,
    })
}

/// Indices of the P largest attention weights, ties broken toward the
/// smaller frame index, returned in ascending index order.
pub fn select_keyframes(weights: &[f64], p: usize) -> Result<Vec<usize>> {
    if p > weights.len() {
        return Err(SmieError::Validation(format!(
            "cannot select {p} keyframes from {} frames",
            weights.len()
        )));
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    // stable sort by descending weight keeps smaller indices first on ties
    order.sort_by(|&a, &b| weights[b].partial_cmp(&weights[a]).unwrap());
    let mut selected: Vec<usize> = order.into_iter().take(p).collect();
    selected.sort_unstable();
    Ok(selected)
}

/// Copy of the sequence with every value of each selected frame set to 0.
pub fn mask_keyframes(seq: &SkeletonSequence, indices: &[usize]) -> Result<SkeletonSequence> {
    let stride = seq.joints() * seq.channels();
    let mut values = seq.values().to_vec();
    for &idx in indices {
        if idx >= seq.frames() {
            return Err(SmieError::Validation(format!(
                "keyframe index {idx} out of range for {} frames",
                seq.frames()
            )));
        }
        values[idx * stride..(idx + 1) * stride].fill(0.0);
    }
    SkeletonSequence::from_raw_parts(seq.frames(), seq.joints(), seq.channels(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_1d(values: &[f64]) -> SkeletonSequence {
        SkeletonSequence::new(values.len(), 1, 1, values.to_vec()).unwrap()
    }

    #[test]
    fn hand_example_motion_chain() {
        // x = [0, 1, 3]: p_nex = [1, 2, 0], p_pre = [0, -1, -2], p = [1, 5, 4]
        let seq = seq_1d(&[0.0, 1.0, 3.0]);
        let p = bidirectional_motion(&seq);
        assert_eq!(p, vec![1.0, 5.0, 4.0]);
        let pk = frame_motion(&p, 3);
        assert_eq!(pk, vec![1.0, 5.0, 4.0]);
        let q = attention_weights(&pk).unwrap();
        for (qi, expect) in q.iter().zip([0.1, 0.5, 0.4]) {
            assert!((qi - expect).abs() < 1e-12);
        }
        assert_eq!(select_keyframes(&q, 1).unwrap(), vec![1]);
        let masked = mask_keyframes(&seq, &[1]).unwrap();
        assert_eq!(masked.values(), &[0.0, 0.0, 3.0]);
    }

    #[test]
    fn constant_sequence_is_motionless() {
        let seq = seq_1d(&[2.5, 2.5, 2.5, 2.5]);
        let p = bidirectional_motion(&seq);
        assert!(p.iter().all(|&v| v == 0.0));
        let q = attention_weights(&frame_motion(&p, 4)).unwrap();
        assert_eq!(q, vec![0.25; 4]);
    }

    #[test]
    fn single_frame_has_zero_motion() {
        let seq = seq_1d(&[7.0]);
        assert_eq!(bidirectional_motion(&seq), vec![0.0]);
        let q = attention_weights(&[0.0]).unwrap();
        assert_eq!(q, vec![1.0]);
    }

    #[test]
    fn frame_motion_averages_and_scales_linearly() {
        // 2 frames, 2 joints, 1 channel
        let p = vec![1.0, 3.0, 2.0, 6.0];
        let pk = frame_motion(&p, 2);
        assert_eq!(pk, vec![2.0, 4.0]);
        let doubled: Vec<f64> = p.iter().map(|v| v * 2.0).collect();
        let pk2 = frame_motion(&doubled, 2);
        assert_eq!(pk2, vec![4.0, 8.0]);
    }

    #[test]
    fn attention_rejects_negative_motion() {
        assert!(attention_weights(&[0.5, -0.1]).is_err());
    }

    #[test]
    fn attention_sums_to_one() {
        let q = attention_weights(&[0.3, 1.7, 0.0, 2.2]).unwrap();
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(q.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn keyframe_selection_edge_cases() {
        let q = [0.25, 0.25, 0.25, 0.25];
        assert_eq!(select_keyframes(&q, 0).unwrap(), Vec::<usize>::new());
        // uniform ties resolve toward smaller indices
        assert_eq!(select_keyframes(&q, 2).unwrap(), vec![0, 1]);
        assert!(select_keyframes(&q, 5).is_err());
    }

    #[test]
    fn masking_edge_cases() {
        let seq = seq_1d(&[1.0, 2.0, 3.0]);
        let same = mask_keyframes(&seq, &[]).unwrap();
        assert_eq!(same.values(), seq.values());
        let all = mask_keyframes(&seq, &[0, 1, 2]).unwrap();
        assert!(all.values().iter().all(|&v| v == 0.0));
        assert!(mask_keyframes(&seq, &[3]).is_err());
    }

    #[test]
    fn masking_preserves_unselected_frames_bitwise() {
        let values = vec![0.1, -0.2, 0.3, 123.456, -9.9, 0.0];
        let seq = SkeletonSequence::new(3, 2, 1, values.clone()).unwrap();
        let masked = mask_keyframes(&seq, &[1]).unwrap();
        assert_eq!(masked.values()[0..2], values[0..2]);
        assert_eq!(masked.values()[2..4], [0.0, 0.0]);
        assert_eq!(masked.values()[4..6], values[4..6]);
        assert_eq!(masked.frames(), 3);
    }

    #[test]
    fn attention_is_translation_invariant() {
        let base = seq_1d(&[0.0, 1.0, 3.0, 2.0, 5.0]);
        let shifted_vals: Vec<f64> = base.values().iter().map(|v| v + 17.5).collect();
        let shifted = seq_1d(&shifted_vals);
        let qa = motion_attention(&base).unwrap();
        let qb = motion_attention(&shifted).unwrap();
        for (a, b) in qa.weights.iter().zip(&qb.weights) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
