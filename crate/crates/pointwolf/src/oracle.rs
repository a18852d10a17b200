//! Confidence oracles: anything that can score how confidently a sample
//! belongs to its true class.
//!
//! The tuning loop only ever consumes the probability mass assigned to the
//! true label, so that single number is the whole interface. Three oracles
//! ship with the crate: a nearest-centroid classifier over a fixed
//! geometric descriptor (the reference oracle used by tests and the demo),
//! a scripted oracle that replays preprogrammed values (for isolating the
//! tuning arithmetic), and an oracle affine in the cloud's centroid (for
//! exactness checks on the linearized mixing rule).

use std::cell::RefCell;
use std::collections::VecDeque;

use nalgebra::Vector3;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Number of radial histogram bins in [`descriptor`].
pub const RADIAL_BINS: usize = 12;

/// Length of the descriptor vector: 3 extents + 12 bins + mean radius.
pub const DESCRIPTOR_LEN: usize = 3 + RADIAL_BINS + 1;

/// Scores a cloud against a class label.
pub trait ConfidenceOracle {
    /// Predicted probability mass on the true class, in [0, 1].
    /// Implementations state whether concurrent calls are safe; all oracles
    /// in this module are safe unless their docs say otherwise.
    fn evaluate(&self, pc: &PointCloud, label: usize) -> Result<f64>;
}

/// Fixed 16-dimensional geometric summary of a cloud: per-axis extents,
/// fractions of points in 12 equal radial shells around the centroid, and
/// the mean centroid distance.
pub fn descriptor(pc: &PointCloud) -> [f64; DESCRIPTOR_LEN] {
    let mut d = [0.0; DESCRIPTOR_LEN];
    let (lo, hi) = pc.bounding_box();
    for axis in 0..3 {
        d[axis] = hi[axis] - lo[axis];
    }

    let centroid = pc.centroid();
    let radii: Vec<f64> = pc.iter().map(|p| (p - centroid).norm()).collect();
    let r_max = radii.iter().fold(0.0f64, |m, &r| m.max(r));
    let frac = 1.0 / pc.len() as f64;
    for &r in &radii {
        let bin = if r_max > 0.0 {
            (((r / r_max) * RADIAL_BINS as f64) as usize).min(RADIAL_BINS - 1)
        } else {
            0
        };
        d[3 + bin] += frac;
    }

    d[3 + RADIAL_BINS] = radii.iter().sum::<f64>() * frac;
    d
}

fn descriptor_distance(a: &[f64; DESCRIPTOR_LEN], b: &[f64; DESCRIPTOR_LEN]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Nearest-centroid classifier over [`descriptor`] space, with class
/// posteriors given by a softmax over negative centroid distances at
/// temperature 1. Evaluation is read-only and safe to call concurrently.
#[derive(Debug, Clone)]
pub struct NearestCentroidOracle {
    centroids: Vec<[f64; DESCRIPTOR_LEN]>,
}

impl NearestCentroidOracle {
    /// Fits one descriptor centroid per class; `classes[k]` holds the
    /// training clouds of class `k` and must be nonempty.
    pub fn fit(classes: &[Vec<PointCloud>]) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidArgument(
                "oracle needs at least one class".into(),
            ));
        }
        let mut centroids = Vec::with_capacity(classes.len());
        for (k, members) in classes.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "class {k} has no training clouds"
                )));
            }
            let mut mean = [0.0; DESCRIPTOR_LEN];
            for pc in members {
                let d = descriptor(pc);
                for (m, v) in mean.iter_mut().zip(d) {
                    *m += v;
                }
            }
            for m in mean.iter_mut() {
                *m /= members.len() as f64;
            }
            centroids.push(mean);
        }
        Ok(Self { centroids })
    }

    pub fn class_count(&self) -> usize {
        self.centroids.len()
    }

    /// Softmax posteriors over negative descriptor distances.
    pub fn posteriors(&self, pc: &PointCloud) -> Vec<f64> {
        let distances: Vec<f64> = self
            .centroids
            .iter()
            .map(|c| descriptor_distance(c, &descriptor(pc)))
            .collect();
        let best = distances.iter().fold(f64::INFINITY, |m, &d| m.min(d));
        let mut posts: Vec<f64> = distances.iter().map(|d| (best - d).exp()).collect();
        let sum: f64 = posts.iter().sum();
        for p in posts.iter_mut() {
            *p /= sum;
        }
        posts
    }

    /// Most probable class; distance ties resolve to the lower class id.
    pub fn predict(&self, pc: &PointCloud) -> usize {
        let posts = self.posteriors(pc);
        let mut best = 0;
        for (k, &p) in posts.iter().enumerate() {
            if p > posts[best] {
                best = k;
            }
        }
        best
    }
}

impl ConfidenceOracle for NearestCentroidOracle {
    fn evaluate(&self, pc: &PointCloud, label: usize) -> Result<f64> {
        if label >= self.centroids.len() {
            return Err(Error::Oracle {
                context: "nearest-centroid oracle".into(),
                msg: format!(
                    "label {label} out of range for {} classes",
                    self.centroids.len()
                ),
            });
        }
        Ok(self.posteriors(pc)[label])
    }
}

/// Replays a fixed sequence of confidences, one per call, ignoring the
/// cloud entirely. Single-threaded test double; not safe for concurrent
/// calls.
#[derive(Debug)]
pub struct ScriptedOracle {
    script: RefCell<VecDeque<f64>>,
}

impl ScriptedOracle {
    pub fn new(values: impl IntoIterator<Item = f64>) -> Self {
        Self {
            script: RefCell::new(values.into_iter().collect()),
        }
    }
}

impl ConfidenceOracle for ScriptedOracle {
    fn evaluate(&self, _pc: &PointCloud, _label: usize) -> Result<f64> {
        self.script
            .borrow_mut()
            .pop_front()
            .ok_or_else(|| Error::Oracle {
                context: "scripted oracle".into(),
                msg: "script exhausted".into(),
            })
    }
}

/// Confidence affine in the cloud's centroid: `bias + weight · centroid`.
///
/// Deliberately unclamped so that mixing two clouds mixes the scores
/// exactly linearly; callers pick coefficients that keep results inside
/// [0, 1] for the clouds in play. Read-only and safe to call concurrently.
#[derive(Debug, Clone, Copy)]
pub struct AffineOracle {
    pub weight: Vector3<f64>,
    pub bias: f64,
}

impl ConfidenceOracle for AffineOracle {
    fn evaluate(&self, pc: &PointCloud, _label: usize) -> Result<f64> {
        Ok(self.bias + self.weight.dot(&pc.centroid()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ball_cloud(radius: f64, n: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointCloud::new(
            (0..n)
                .map(|_| {
                    loop {
                        let v = Vector3::new(
                            rng.random::<f64>() * 2.0 - 1.0,
                            rng.random::<f64>() * 2.0 - 1.0,
                            rng.random::<f64>() * 2.0 - 1.0,
                        );
                        if v.norm() <= 1.0 {
                            break v * radius;
                        }
                    }
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn descriptor_has_extent_histogram_and_mean_blocks() {
        let pc = PointCloud::from_coords([
            [-1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, -2.0, 0.0],
            [0.0, 2.0, 0.0],
        ])
        .unwrap();
        let d = descriptor(&pc);
        assert_eq!(d[0], 2.0);
        assert_eq!(d[1], 4.0);
        assert_eq!(d[2], 0.0);
        let hist_sum: f64 = d[3..3 + RADIAL_BINS].iter().sum();
        assert!((hist_sum - 1.0).abs() <= 1e-12);
        assert!((d[15] - 1.5).abs() <= 1e-12);
    }

    #[test]
    fn descriptor_handles_coincident_points() {
        let pc = PointCloud::from_coords([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]).unwrap();
        let d = descriptor(&pc);
        assert_eq!(d[3], 1.0);
        assert_eq!(d[15], 0.0);
    }

    #[test]
    fn oracle_separates_different_radii() {
        let small: Vec<_> = (0..5).map(|s| ball_cloud(0.5, 200, s)).collect();
        let large: Vec<_> = (0..5).map(|s| ball_cloud(2.0, 200, 100 + s)).collect();
        let oracle = NearestCentroidOracle::fit(&[small, large]).unwrap();
        assert_eq!(oracle.class_count(), 2);
        assert_eq!(oracle.predict(&ball_cloud(0.5, 200, 999)), 0);
        assert_eq!(oracle.predict(&ball_cloud(2.0, 200, 998)), 1);
    }

    #[test]
    fn posteriors_are_a_distribution_and_confidence_matches() {
        let classes = [
            vec![ball_cloud(0.5, 128, 1)],
            vec![ball_cloud(1.0, 128, 2)],
            vec![ball_cloud(2.0, 128, 3)],
        ];
        let oracle = NearestCentroidOracle::fit(&classes).unwrap();
        let probe = ball_cloud(1.0, 128, 4);
        let posts = oracle.posteriors(&probe);
        assert_eq!(posts.len(), 3);
        assert!((posts.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(posts.iter().all(|&p| (0.0..=1.0).contains(&p)));
        for label in 0..3 {
            assert_eq!(oracle.evaluate(&probe, label).unwrap(), posts[label]);
        }
    }

    #[test]
    fn fit_rejects_empty_classes() {
        assert!(NearestCentroidOracle::fit(&[]).is_err());
        assert!(NearestCentroidOracle::fit(&[vec![]]).is_err());
    }

    #[test]
    fn evaluate_rejects_unknown_label() {
        let oracle = NearestCentroidOracle::fit(&[vec![ball_cloud(1.0, 64, 5)]]).unwrap();
        assert!(oracle.evaluate(&ball_cloud(1.0, 64, 6), 1).is_err());
    }

    #[test]
    fn scripted_oracle_replays_then_errors() {
        let oracle = ScriptedOracle::new([0.9, 0.5]);
        let pc = ball_cloud(1.0, 4, 7);
        assert_eq!(oracle.evaluate(&pc, 0).unwrap(), 0.9);
        assert_eq!(oracle.evaluate(&pc, 0).unwrap(), 0.5);
        assert!(matches!(
            oracle.evaluate(&pc, 0),
            Err(Error::Oracle { .. })
        ));
    }

    #[test]
    fn affine_oracle_is_linear_in_the_centroid() {
        let oracle = AffineOracle {
            weight: Vector3::new(0.1, 0.2, 0.3),
            bias: 0.5,
        };
        let a = PointCloud::from_coords([[1.0, 0.0, 0.0]]).unwrap();
        let b = PointCloud::from_coords([[0.0, 1.0, 0.0]]).unwrap();
        let ca = oracle.evaluate(&a, 0).unwrap();
        let cb = oracle.evaluate(&b, 0).unwrap();
        assert!((ca - 0.6).abs() <= 1e-15);
        assert!((cb - 0.7).abs() <= 1e-15);
        let mix = PointCloud::from_coords([[0.5, 0.5, 0.0]]).unwrap();
        let cm = oracle.evaluate(&mix, 0).unwrap();
        assert!((cm - 0.5 * (ca + cb)).abs() <= 1e-12);
    }
}
