//! Confidence-targeted augmentation strength tuning.
//!
//! Given an original cloud and an augmentation proposal, compute a target
//! confidence from a difficulty coefficient λ, linearize the confidence of
//! a point-wise mix in the mixing ratio, solve for the ratio α̃, and return
//! the convex combination α̃·orig + (1−α̃)·proposal. Because the result is
//! always a convex combination, the mechanism acts as a safeguard on the
//! sample's shape identity no matter what the oracle reports.
//!
//! Two mixing routes exist: input space (interpolate the two clouds
//! directly, Θ(N)) and transform space (attenuate the sampled transform
//! parameters and re-run the Θ(M·N) blend). Both are exposed with
//! operation counts so the cost asymmetry stays measurable.

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::oracle::ConfidenceOracle;
use crate::transform::EulerAngles;
use crate::wolf::{
    blend_pointwise_counted, pointwolf, LocalTransform, WolfConfig,
};

/// Denominators smaller than this make the mixing ratio degenerate.
pub const DEGENERATE_CONFIDENCE_GAP: f64 = 1e-9;

/// Everything the tuning step decided for one sample, for logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugTuneState {
    pub lambda: f64,
    pub c_orig: f64,
    pub c_prop: f64,
    pub c_target: f64,
    pub alpha: f64,
}

fn validate_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must lie in (0, 1], got {lambda}"
        )));
    }
    Ok(())
}

/// Target confidence `max(c_prop, (1−λ)·c_orig)`: allow the sample to get
/// at most λ·c_orig harder, and never ask for more than the proposal
/// already achieves... except when the proposal is the easier one, in
/// which case the proposal wins the max and is used as-is.
pub fn target_confidence(c_orig: f64, c_prop: f64, lambda: f64) -> Result<f64> {
    validate_lambda(lambda)?;
    Ok(c_prop.max((1.0 - lambda) * c_orig))
}

/// Mixing ratio `(c_target − c_prop)/(c_orig − c_prop)`, clamped to [0, 1].
/// A near-zero denominator means the proposal already sits at the original's
/// confidence, so the proposal is used (ratio 0).
pub fn mixing_ratio(c_orig: f64, c_prop: f64, c_target: f64) -> f64 {
    let gap = c_orig - c_prop;
    if gap.abs() < DEGENERATE_CONFIDENCE_GAP {
        return 0.0;
    }
    ((c_target - c_prop) / gap).clamp(0.0, 1.0)
}

/// Point-wise convex combination `α·orig + (1−α)·prop`.
///
/// The endpoints α=0 and α=1 return exact copies of the proposal and the
/// original respectively, so no floating-point residue distinguishes "no
/// adjustment" from the raw input.
pub fn interpolate_clouds(orig: &PointCloud, prop: &PointCloud, alpha: f64) -> Result<PointCloud> {
    if orig.len() != prop.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot interpolate clouds of {} and {} points",
            orig.len(),
            prop.len()
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "mixing ratio must lie in [0, 1], got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return Ok(prop.clone());
    }
    if alpha == 1.0 {
        return Ok(orig.clone());
    }
    Ok(PointCloud::from_points_unchecked(
        orig.iter()
            .zip(prop.iter())
            .map(|(p, q)| alpha * p + (1.0 - alpha) * q)
            .collect(),
    ))
}

/// Attenuates transform parameters toward the identity: per-axis scale
/// `α + (1−α)·s`, angles `(1−α)·θ`, translation `(1−α)·b`. Anchors and
/// masks are preserved.
pub fn interpolate_transform_space(
    transforms: &[LocalTransform],
    alpha: f64,
) -> Result<Vec<LocalTransform>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "mixing ratio must lie in [0, 1], got {alpha}"
        )));
    }
    let keep = 1.0 - alpha;
    transforms
        .iter()
        .map(|t| {
            let s = t.scale();
            let scale = s.map(|v| alpha + keep * v);
            let a = t.angles();
            let angles = EulerAngles::new(keep * a.x, keep * a.y, keep * a.z);
            LocalTransform::new(t.anchor(), scale, angles, keep * t.translation(), t.mask())
        })
        .collect()
}

/// One tuning step: propose with the wolf engine, score original and
/// proposal, solve for the mixing ratio, and mix in input space.
pub fn augtune_step(
    orig: &PointCloud,
    label: usize,
    oracle: &dyn ConfidenceOracle,
    cfg: &WolfConfig,
    lambda: f64,
    rng: &mut impl rand::Rng,
) -> Result<(PointCloud, AugTuneState)> {
    validate_lambda(lambda)?;
    let proposal = pointwolf(orig, cfg, rng)?;
    let c_orig = oracle.evaluate(orig, label).map_err(|e| Error::Oracle {
        context: "original cloud".into(),
        msg: e.to_string(),
    })?;
    let c_prop = oracle
        .evaluate(&proposal, label)
        .map_err(|e| Error::Oracle {
            context: "augmentation proposal".into(),
            msg: e.to_string(),
        })?;
    let c_target = target_confidence(c_orig, c_prop, lambda)?;
    let alpha = mixing_ratio(c_orig, c_prop, c_target);
    let mixed = interpolate_clouds(orig, &proposal, alpha)?;
    Ok((
        mixed,
        AugTuneState {
            lambda,
            c_orig,
            c_prop,
            c_target,
            alpha,
        },
    ))
}

/// Mean of per-point confidences, the aggregation rule for tasks that score
/// every point separately.
pub fn aggregate_confidence(pointwise: &[f64]) -> Result<f64> {
    if pointwise.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot aggregate an empty confidence list".into(),
        ));
    }
    Ok(pointwise.iter().sum::<f64>() / pointwise.len() as f64)
}

/// Input-space mix with its operation count: one update per point, Θ(N).
pub fn mix_in_input_space(
    orig: &PointCloud,
    prop: &PointCloud,
    alpha: f64,
) -> Result<(PointCloud, usize)> {
    let mixed = interpolate_clouds(orig, prop, alpha)?;
    Ok((mixed, orig.len()))
}

/// Transform-space mix with its operation count: attenuate the parameters,
/// then re-blend every point against every anchor, Θ(M·N).
pub fn mix_in_transform_space(
    pc: &PointCloud,
    transforms: &[LocalTransform],
    alpha: f64,
    bandwidth: f64,
) -> Result<(PointCloud, usize)> {
    let attenuated = interpolate_transform_space(transforms, alpha)?;
    blend_pointwise_counted(pc, &attenuated, bandwidth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ScriptedOracle;
    use nalgebra::Vector3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cloud(n: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointCloud::new(
            (0..n)
                .map(|_| {
                    Vector3::new(
                        rng.random::<f64>() * 2.0 - 1.0,
                        rng.random::<f64>() * 2.0 - 1.0,
                        rng.random::<f64>() * 2.0 - 1.0,
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn target_confidence_golden_arithmetic() {
        let c = target_confidence(0.9, 0.5, 0.3).unwrap();
        assert!((c - 0.63).abs() <= 1e-12);
    }

    #[test]
    fn target_confidence_lambda_one_keeps_the_proposal() {
        assert_eq!(target_confidence(0.9, 0.5, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn target_confidence_dominated_by_a_confident_proposal() {
        assert_eq!(target_confidence(0.4, 0.8, 0.3).unwrap(), 0.8);
    }

    #[test]
    fn target_confidence_rejects_lambda_outside_unit_interval() {
        assert!(target_confidence(0.9, 0.5, 0.0).is_err());
        assert!(target_confidence(0.9, 0.5, 1.5).is_err());
        assert!(target_confidence(0.9, 0.5, -0.2).is_err());
    }

    #[test]
    fn mixing_ratio_golden_arithmetic() {
        let alpha = mixing_ratio(0.9, 0.5, 0.63);
        assert!((alpha - 0.325).abs() <= 1e-12);
    }

    #[test]
    fn mixing_ratio_endpoints() {
        assert_eq!(mixing_ratio(0.9, 0.5, 0.5), 0.0);
        assert_eq!(mixing_ratio(0.9, 0.5, 0.9), 1.0);
    }

    #[test]
    fn mixing_ratio_degenerate_gap_uses_the_proposal() {
        assert_eq!(mixing_ratio(0.7, 0.7, 0.7), 0.0);
        assert_eq!(mixing_ratio(0.7, 0.7 + 1e-12, 0.9), 0.0);
    }

    #[test]
    fn mixing_ratio_clamps_out_of_range_targets() {
        assert_eq!(mixing_ratio(0.9, 0.5, 1.2), 1.0);
        assert_eq!(mixing_ratio(0.5, 0.9, 0.95), 0.0);
    }

    #[test]
    fn interpolation_endpoints_are_exact_copies() {
        let orig = random_cloud(32, 1);
        let prop = random_cloud(32, 2);
        assert_eq!(
            interpolate_clouds(&orig, &prop, 1.0).unwrap().points(),
            orig.points()
        );
        assert_eq!(
            interpolate_clouds(&orig, &prop, 0.0).unwrap().points(),
            prop.points()
        );
    }

    #[test]
    fn interpolation_midpoint_arithmetic() {
        let orig = PointCloud::from_coords([[0.0, 0.0, 0.0]]).unwrap();
        let prop = PointCloud::from_coords([[2.0, 4.0, 6.0]]).unwrap();
        let mid = interpolate_clouds(&orig, &prop, 0.5).unwrap();
        assert_eq!(mid.points()[0], Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn interpolation_rejects_mismatched_sizes_and_bad_alpha() {
        let a = random_cloud(8, 3);
        let b = random_cloud(9, 4);
        assert!(interpolate_clouds(&a, &b, 0.5).is_err());
        assert!(interpolate_clouds(&a, &a, 1.5).is_err());
    }

    #[test]
    fn transform_interpolation_golden_arithmetic() {
        let t = LocalTransform::new(
            Vector3::zeros(),
            Vector3::new(2.0, 2.0, 2.0),
            EulerAngles::new(0.0, 0.0, 30f64.to_radians()),
            Vector3::new(1.0, 0.0, 0.0),
            [true, true, true],
        )
        .unwrap();
        let half = interpolate_transform_space(std::slice::from_ref(&t), 0.5).unwrap();
        assert_eq!(half[0].scale(), Vector3::new(1.5, 1.5, 1.5));
        assert!((half[0].angles().z - 15f64.to_radians()).abs() <= 1e-15);
        assert_eq!(half[0].translation(), Vector3::new(0.5, 0.0, 0.0));
        assert_eq!(half[0].mask(), t.mask());
        assert_eq!(half[0].anchor(), t.anchor());
    }

    #[test]
    fn transform_interpolation_endpoints() {
        let t = LocalTransform::new(
            Vector3::new(0.1, 0.2, 0.3),
            Vector3::new(1.7, 1.1, 1.4),
            EulerAngles::new(0.2, -0.3, 0.1),
            Vector3::new(-0.4, 0.5, 0.6),
            [true, false, true],
        )
        .unwrap();
        let idle = interpolate_transform_space(std::slice::from_ref(&t), 1.0).unwrap();
        assert_eq!(idle[0].scale(), Vector3::new(1.0, 1.0, 1.0));
        assert_eq!(idle[0].angles(), EulerAngles::zero());
        assert_eq!(idle[0].translation(), Vector3::zeros());
        let kept = interpolate_transform_space(std::slice::from_ref(&t), 0.0).unwrap();
        assert_eq!(kept[0], t);
    }

    #[test]
    fn augtune_lambda_one_returns_the_raw_proposal() {
        let orig = random_cloud(64, 5);
        let cfg = WolfConfig::default();
        let proposal = pointwolf(&orig, &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let oracle = ScriptedOracle::new([0.9, 0.4]);
        let (tuned, state) = augtune_step(
            &orig,
            0,
            &oracle,
            &cfg,
            1.0,
            &mut ChaCha8Rng::seed_from_u64(9),
        )
        .unwrap();
        assert_eq!(tuned.points(), proposal.points());
        assert_eq!(state.alpha, 0.0);
        assert_eq!(state.c_target, 0.4);
    }

    #[test]
    fn augtune_equal_confidences_use_the_proposal() {
        let orig = random_cloud(32, 6);
        let oracle = ScriptedOracle::new([0.6, 0.6]);
        let (_, state) = augtune_step(
            &orig,
            0,
            &oracle,
            &WolfConfig::default(),
            0.3,
            &mut ChaCha8Rng::seed_from_u64(11),
        )
        .unwrap();
        assert_eq!(state.alpha, 0.0);
    }

    #[test]
    fn augtune_synthetic_difficulty_setting() {
        let orig = random_cloud(32, 7);
        let oracle = ScriptedOracle::new([1.0, 0.0]);
        let (_, state) = augtune_step(
            &orig,
            0,
            &oracle,
            &WolfConfig::default(),
            0.1,
            &mut ChaCha8Rng::seed_from_u64(13),
        )
        .unwrap();
        assert!((state.c_target - 0.9).abs() <= 1e-12);
        assert!((state.alpha - 0.9).abs() <= 1e-12);
    }

    #[test]
    fn augtune_propagates_oracle_failures_with_context() {
        let orig = random_cloud(16, 8);
        let oracle = ScriptedOracle::new([0.9]);
        let err = augtune_step(
            &orig,
            0,
            &oracle,
            &WolfConfig::default(),
            0.3,
            &mut ChaCha8Rng::seed_from_u64(17),
        )
        .unwrap_err();
        match err {
            Error::Oracle { context, .. } => assert_eq!(context, "augmentation proposal"),
            other => panic!("expected oracle error, got {other}"),
        }
    }

    #[test]
    fn augtune_output_is_a_convex_combination() {
        let orig = random_cloud(48, 9);
        let cfg = WolfConfig::default();
        let proposal = pointwolf(&orig, &cfg, &mut ChaCha8Rng::seed_from_u64(19)).unwrap();
        let oracle = ScriptedOracle::new([0.8, 0.3]);
        let (tuned, state) = augtune_step(
            &orig,
            0,
            &oracle,
            &cfg,
            0.4,
            &mut ChaCha8Rng::seed_from_u64(19),
        )
        .unwrap();
        assert!(state.alpha > 0.0 && state.alpha < 1.0);
        for ((p, q), m) in orig.iter().zip(proposal.iter()).zip(tuned.iter()) {
            for axis in 0..3 {
                let lo = p[axis].min(q[axis]);
                let hi = p[axis].max(q[axis]);
                assert!(m[axis] >= lo - 1e-12 && m[axis] <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn alpha_is_monotone_nonincreasing_in_lambda() {
        let mut last = f64::INFINITY;
        for i in 0..100 {
            let lambda = (i + 1) as f64 / 100.0;
            let c_target = target_confidence(0.9, 0.2, lambda).unwrap();
            let alpha = mixing_ratio(0.9, 0.2, c_target);
            assert!(alpha <= last + 1e-15);
            last = alpha;
        }
    }

    #[test]
    fn aggregate_confidence_means_and_rejects_empty() {
        assert_eq!(aggregate_confidence(&[0.5]).unwrap(), 0.5);
        assert_eq!(aggregate_confidence(&[0.0, 1.0]).unwrap(), 0.5);
        assert!((aggregate_confidence(&[0.2, 0.4, 0.9]).unwrap() - 0.5).abs() <= 1e-12);
        assert!(aggregate_confidence(&[]).is_err());
    }

    #[test]
    fn mix_operation_counts_expose_the_cost_asymmetry() {
        let pc = random_cloud(128, 10);
        let cfg = WolfConfig {
            anchors: 4,
            ..WolfConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let transforms = crate::wolf::sample_local_transforms(&pc, &cfg, &mut rng).unwrap();
        let proposal = crate::wolf::blend_pointwise(&pc, &transforms, cfg.bandwidth).unwrap();
        let (_, fast) = mix_in_input_space(&pc, &proposal, 0.5).unwrap();
        let (_, slow) = mix_in_transform_space(&pc, &transforms, 0.5, cfg.bandwidth).unwrap();
        assert_eq!(fast, 128);
        assert_eq!(slow, 4 * 128);
    }

    #[test]
    fn mix_routes_agree_at_the_endpoints() {
        let pc = random_cloud(32, 11);
        let cfg = WolfConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let transforms = crate::wolf::sample_local_transforms(&pc, &cfg, &mut rng).unwrap();
        let proposal = crate::wolf::blend_pointwise(&pc, &transforms, cfg.bandwidth).unwrap();

        let (full_orig, _) = mix_in_transform_space(&pc, &transforms, 1.0, cfg.bandwidth).unwrap();
        for (p, q) in pc.iter().zip(full_orig.iter()) {
            assert!((p - q).norm() <= 1e-12);
        }
        let (full_prop, _) = mix_in_transform_space(&pc, &transforms, 0.0, cfg.bandwidth).unwrap();
        for (p, q) in proposal.iter().zip(full_prop.iter()) {
            assert!((p - q).norm() <= 1e-12);
        }
    }
}
