//! Desk-scale robustness demonstration: train the reference classifier on
//! clean versus augmented synthetic shapes and score both against the
//! corruption grid.
//!
//! The numbers are regression bounds for this crate's fixtures — a cheap,
//! reproducible stand-in for network-scale robustness benchmarks, not a
//! claim about any external result.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::cloud::PointCloud;
use crate::corrupt::{Corruption, PadMode};
use crate::error::{Error, Result};
use crate::oracle::NearestCentroidOracle;
use crate::seed::child_rng;
use crate::wolf::{pointwolf, WolfConfig};

/// Cluster width shared by both local corruptions across the grid.
pub const LOCAL_CLUSTER_SIZE: usize = 50;

/// The three separable synthetic classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoShape {
    Sphere,
    Box,
    Cylinder,
}

pub const DEMO_SHAPES: [DemoShape; 3] = [DemoShape::Sphere, DemoShape::Box, DemoShape::Cylinder];

impl DemoShape {
    pub fn name(&self) -> &'static str {
        match self {
            DemoShape::Sphere => "sphere",
            DemoShape::Box => "box",
            DemoShape::Cylinder => "cylinder",
        }
    }
}

/// Uniform sample from the shape's surface, before normalization.
pub fn sample_shape(shape: DemoShape, n: usize, rng: &mut impl Rng) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "shape sample needs at least one point".into(),
        ));
    }
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let p = match shape {
            DemoShape::Sphere => loop {
                let g: [f64; 3] = [
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ];
                let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
                if norm > 1e-12 {
                    break [g[0] / norm, g[1] / norm, g[2] / norm];
                }
            },
            DemoShape::Box => {
                let face = rng.random_range(0..6usize);
                let u = crate::sampling::draw_uniform(rng, -1.0, 1.0);
                let v = crate::sampling::draw_uniform(rng, -1.0, 1.0);
                let s = if face % 2 == 0 { 1.0 } else { -1.0 };
                match face / 2 {
                    0 => [s, u, v],
                    1 => [u, s, v],
                    _ => [u, v, s],
                }
            }
            DemoShape::Cylinder => {
                // Unit radius, height 2: lateral area 4π vs 2π for both
                // caps, so two thirds of the mass is lateral.
                let u = rng.random::<f64>();
                let theta = crate::sampling::draw_uniform(rng, 0.0, std::f64::consts::TAU);
                if u < 2.0 / 3.0 {
                    let z = crate::sampling::draw_uniform(rng, -1.0, 1.0);
                    [theta.cos(), theta.sin(), z]
                } else {
                    let z = if u < 5.0 / 6.0 { 1.0 } else { -1.0 };
                    let r = rng.random::<f64>().sqrt();
                    [r * theta.cos(), r * theta.sin(), z]
                }
            }
        };
        points.push(p);
    }
    PointCloud::from_coords(points)
}

/// Demo run parameters. The shape count exceeds the largest LocalDrop
/// cell (7 clusters of 50), which a smaller cloud could not absorb.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoConfig {
    pub seed: u64,
    pub points: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    /// Augmented copies added per training cloud in the augmented regime.
    pub augment_copies: usize,
    /// Re-center and re-scale augmented copies before fitting, matching
    /// how the classifier's inputs are prepared.
    pub normalize_copies: bool,
    /// Padding applied to the corrupted evaluation clouds.
    pub eval_pad: PadMode,
    pub wolf: WolfConfig,
}

impl Default for DemoConfig {
    /// Defaults tuned for the desk-scale fixture: a gentle deformation
    /// range keeps the three classes separable for the reference
    /// classifier while still covering the corruption grid's variation.
    fn default() -> Self {
        DemoConfig {
            seed: 0,
            points: 1024,
            train_per_class: 30,
            test_per_class: 20,
            augment_copies: 2,
            normalize_copies: true,
            eval_pad: PadMode::Shrink,
            wolf: WolfConfig {
                rho_s: 1.1,
                rho_r: 10f64.to_radians(),
                rho_t: 0.1,
                ..WolfConfig::default()
            },
        }
    }
}

impl DemoConfig {
    pub fn validate(&self) -> Result<()> {
        self.wolf.validate()?;
        if self.train_per_class < 1 || self.test_per_class < 1 {
            return Err(Error::InvalidArgument(
                "train and test sets need at least one cloud per class".into(),
            ));
        }
        let largest_drop = 7 * LOCAL_CLUSTER_SIZE;
        if self.points <= largest_drop {
            return Err(Error::InvalidArgument(format!(
                "clouds of {} points cannot absorb the largest LocalDrop cell ({} points)",
                self.points, largest_drop
            )));
        }
        Ok(())
    }
}

/// Training regimes compared by the demo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    CleanTrained,
    WolfTrained,
}

/// Accuracy of both regimes on one corruption cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub corruption: Corruption,
    pub clean_trained: f64,
    pub wolf_trained: f64,
}

impl GridCell {
    pub fn accuracy(&self, regime: Regime) -> f64 {
        match regime {
            Regime::CleanTrained => self.clean_trained,
            Regime::WolfTrained => self.wolf_trained,
        }
    }
}

/// Full demo outcome: clean-test accuracy plus the 4-kind × 3-level grid,
/// each scored under both training regimes.
#[derive(Debug, Clone)]
pub struct RobustnessReport {
    pub clean_trained_clean_acc: f64,
    pub wolf_trained_clean_acc: f64,
    pub cells: Vec<GridCell>,
    pub elapsed: Duration,
}

impl RobustnessReport {
    pub fn clean_accuracy(&self, regime: Regime) -> f64 {
        match regime {
            Regime::CleanTrained => self.clean_trained_clean_acc,
            Regime::WolfTrained => self.wolf_trained_clean_acc,
        }
    }

    /// Mean accuracy over all corruption cells for one regime.
    pub fn grid_mean(&self, regime: Regime) -> f64 {
        let sum: f64 = self.cells.iter().map(|c| c.accuracy(regime)).sum();
        sum / self.cells.len() as f64
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:<12} {:>14} {:>14}",
            "corruption", "level", "clean-trained", "wolf-trained"
        );
        let _ = writeln!(
            out,
            "{:<12} {:<12} {:>14.3} {:>14.3}",
            "none", "-", self.clean_trained_clean_acc, self.wolf_trained_clean_acc
        );
        for cell in &self.cells {
            let _ = writeln!(
                out,
                "{:<12} {:<12} {:>14.3} {:>14.3}",
                cell.corruption.name(),
                level_label(&cell.corruption),
                cell.clean_trained,
                cell.wolf_trained
            );
        }
        let _ = writeln!(
            out,
            "{:<12} {:<12} {:>14.3} {:>14.3}",
            "grid mean",
            "-",
            self.grid_mean(Regime::CleanTrained),
            self.grid_mean(Regime::WolfTrained)
        );
        out
    }
}

fn level_label(corruption: &Corruption) -> String {
    match corruption {
        Corruption::LocalDrop { clusters, .. } | Corruption::LocalAdd { clusters, .. } => {
            format!("C={clusters}")
        }
        Corruption::Dropout { rate } => format!("r={rate}"),
        Corruption::Noise { sigma } => format!("sigma={sigma}"),
    }
}

/// The 4-kind × 3-level corruption grid, in table order.
pub fn corruption_grid() -> Vec<Corruption> {
    let mut cells = Vec::with_capacity(12);
    for clusters in [3, 5, 7] {
        cells.push(Corruption::LocalDrop {
            clusters,
            cluster_size: LOCAL_CLUSTER_SIZE,
        });
    }
    for clusters in [3, 5, 7] {
        cells.push(Corruption::LocalAdd {
            clusters,
            cluster_size: LOCAL_CLUSTER_SIZE,
        });
    }
    for rate in [0.25, 0.5, 0.75] {
        cells.push(Corruption::Dropout { rate });
    }
    for sigma in [0.01, 0.03, 0.05] {
        cells.push(Corruption::Noise { sigma });
    }
    cells
}

// Stream ids keep the demo's seed fan-out disjoint: shape sampling per
// split, augmentation, and one stream per corruption cell.
const STREAM_TRAIN: u64 = 0;
const STREAM_TEST: u64 = 1;
const STREAM_AUGMENT: u64 = 2;
const STREAM_CORRUPT_BASE: u64 = 3;

fn sample_split(cfg: &DemoConfig, stream: u64, per_class: usize) -> Result<Vec<Vec<PointCloud>>> {
    DEMO_SHAPES
        .iter()
        .enumerate()
        .map(|(class, &shape)| {
            (0..per_class)
                .map(|i| {
                    let mut rng = child_rng(cfg.seed, stream, class as u64, i as u64);
                    sample_shape(shape, cfg.points, &mut rng).map(|pc| pc.normalize())
                })
                .collect()
        })
        .collect()
}

fn accuracy(
    oracle: &NearestCentroidOracle,
    test: &[Vec<PointCloud>],
    corrupt: impl Fn(&PointCloud, u64, u64) -> Result<PointCloud>,
) -> Result<f64> {
    let mut correct = 0usize;
    let mut total = 0usize;
    for (class, clouds) in test.iter().enumerate() {
        for (i, pc) in clouds.iter().enumerate() {
            let sample = corrupt(pc, class as u64, i as u64)?;
            if oracle.predict(&sample) == class {
                correct += 1;
            }
            total += 1;
        }
    }
    Ok(correct as f64 / total as f64)
}

/// Runs the full comparison: sample shapes, fit the classifier under both
/// regimes, and score clean plus every corruption cell.
pub fn demo_robustness(cfg: &DemoConfig) -> Result<RobustnessReport> {
    cfg.validate()?;
    let started = Instant::now();

    let train = sample_split(cfg, STREAM_TRAIN, cfg.train_per_class)?;
    let test = sample_split(cfg, STREAM_TEST, cfg.test_per_class)?;

    let clean_oracle = NearestCentroidOracle::fit(&train)?;
    let mut augmented = train.clone();
    for (class, clouds) in train.iter().enumerate() {
        for (i, pc) in clouds.iter().enumerate() {
            for copy in 0..cfg.augment_copies {
                let mut rng = child_rng(
                    cfg.seed,
                    STREAM_AUGMENT,
                    class as u64,
                    (i * cfg.augment_copies + copy) as u64,
                );
                let copy = pointwolf(pc, &cfg.wolf, &mut rng)?;
                augmented[class].push(if cfg.normalize_copies {
                    copy.normalize()
                } else {
                    copy
                });
            }
        }
    }
    let wolf_oracle = NearestCentroidOracle::fit(&augmented)?;

    let clean = |pc: &PointCloud, _: u64, _: u64| Ok(pc.clone());
    let clean_trained_clean_acc = accuracy(&clean_oracle, &test, clean)?;
    let wolf_trained_clean_acc = accuracy(&wolf_oracle, &test, clean)?;

    let mut cells = Vec::new();
    for (cell_idx, corruption) in corruption_grid().into_iter().enumerate() {
        let stream = STREAM_CORRUPT_BASE + cell_idx as u64;
        let corrupt = |pc: &PointCloud, class: u64, i: u64| {
            let mut rng = child_rng(cfg.seed, stream, class, i);
            corruption.apply(pc, cfg.eval_pad, &mut rng)
        };
        cells.push(GridCell {
            corruption,
            clean_trained: accuracy(&clean_oracle, &test, &corrupt)?,
            wolf_trained: accuracy(&wolf_oracle, &test, &corrupt)?,
        });
    }

    Ok(RobustnessReport {
        clean_trained_clean_acc,
        wolf_trained_clean_acc,
        cells,
        elapsed: started.elapsed(),
    })
}
