//! Declarative batch pipelines: expand input globs, apply an ordered list
//! of stages to every (file, repetition) pair under derived child seeds,
//! write the outputs, and report what happened.
//!
//! Seeding discipline: stage j of repetition k of file i runs on a fresh
//! stream seeded with `child_seed(master, i, k, j)`, so any single sample
//! can be replayed from the report alone, and changing one coordinate
//! perturbs only the streams that depend on it.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::augtune::{augtune_step, AugTuneState};
use crate::cda::{cda_augment, CdaConfig, UpAxis};
use crate::cloud::PointCloud;
use crate::corrupt::{Corruption, PadMode};
use crate::error::{Error, Result};
use crate::io::{read_cloud_with_format, write_cloud, CloudFormat};
use crate::oracle::NearestCentroidOracle;
use crate::seed::child_seed;
use crate::wolf::{pointwolf, WolfConfig};

/// One processing stage of a pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Cda(CdaConfig),
    Pointwolf(WolfConfig),
    Augtune { wolf: WolfConfig, lambda: f64 },
    Corrupt { kind: Corruption, pad: PadMode },
}

impl Stage {
    /// Stage name as written in configs and reports.
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Cda(_) => "cda",
            Stage::Pointwolf(_) => "pointwolf",
            Stage::Augtune { .. } => "augtune",
            Stage::Corrupt { kind, .. } => kind.name(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Stage::Cda(cfg) => cfg.validate(),
            Stage::Pointwolf(cfg) => cfg.validate(),
            Stage::Augtune { wolf, lambda } => {
                wolf.validate()?;
                if !(*lambda > 0.0 && *lambda <= 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "lambda must lie in (0, 1], got {lambda}"
                    )));
                }
                Ok(())
            }
            Stage::Corrupt { kind, .. } => match *kind {
                Corruption::LocalDrop { cluster_size, .. }
                | Corruption::LocalAdd { cluster_size, .. } => {
                    if cluster_size < 1 {
                        return Err(Error::InvalidArgument(
                            "cluster size must be at least 1".into(),
                        ));
                    }
                    Ok(())
                }
                Corruption::Dropout { rate } => {
                    if !(rate.is_finite() && (0.0..1.0).contains(&rate)) {
                        return Err(Error::InvalidArgument(format!(
                            "dropout rate must lie in [0, 1), got {rate}"
                        )));
                    }
                    Ok(())
                }
                Corruption::Noise { sigma } => {
                    if !(sigma.is_finite() && sigma >= 0.0) {
                        return Err(Error::InvalidArgument(format!(
                            "sigma must be nonnegative, got {sigma}"
                        )));
                    }
                    Ok(())
                }
            },
        }
    }
}

/// A validated batch run description.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSpec {
    /// Input paths; entries may contain glob patterns.
    pub inputs: Vec<String>,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Center each input on its centroid and scale it to the unit sphere
    /// before the first stage.
    pub normalize: bool,
    pub repetitions: usize,
    /// Output format; `None` keeps each input's own format.
    pub format: Option<CloudFormat>,
    /// Abort on the first per-file error instead of skipping it.
    pub strict: bool,
    pub stages: Vec<Stage>,
}

impl PipelineSpec {
    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Config("no inputs given".into()));
        }
        if self.repetitions < 1 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.stages.is_empty() {
            return Err(Error::Config("at least one stage is required".into()));
        }
        for (i, stage) in self.stages.iter().enumerate() {
            stage.validate().map_err(|e| {
                Error::Config(format!("stage {} ({}): {e}", i, stage.name()))
            })?;
        }
        Ok(())
    }

    /// Parses the TOML pipeline description; see the README for the schema.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawPipeline =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let format = match raw.format.as_deref() {
            None => None,
            Some(name) => Some(
                CloudFormat::parse_name(name).map_err(|e| Error::Config(e.to_string()))?,
            ),
        };
        let stages = raw
            .stage
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                stage_from_raw(s).map_err(|e| Error::Config(format!("stage {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = PipelineSpec {
            inputs: raw.inputs,
            output_dir: raw.output_dir,
            seed: raw.seed.unwrap_or(0),
            normalize: raw.normalize.unwrap_or(true),
            repetitions: raw.repetitions.unwrap_or(1),
            format,
            strict: raw.strict.unwrap_or(false),
            stages,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPipeline {
    inputs: Vec<String>,
    output_dir: PathBuf,
    seed: Option<u64>,
    normalize: Option<bool>,
    repetitions: Option<usize>,
    format: Option<String>,
    strict: Option<bool>,
    #[serde(default)]
    stage: Vec<RawStage>,
}

#[derive(Deserialize)]
struct RawStage {
    kind: String,
    #[serde(flatten)]
    params: toml::Table,
}

fn take_f64(params: &mut toml::Table, key: &str, default: f64) -> Result<f64> {
    match params.remove(key) {
        None => Ok(default),
        Some(toml::Value::Float(v)) => Ok(v),
        Some(toml::Value::Integer(v)) => Ok(v as f64),
        Some(other) => Err(Error::Config(format!(
            "'{key}' must be a number, got {other}"
        ))),
    }
}

fn take_usize(params: &mut toml::Table, key: &str, default: usize) -> Result<usize> {
    match params.remove(key) {
        None => Ok(default),
        Some(toml::Value::Integer(v)) if v >= 0 => Ok(v as usize),
        Some(other) => Err(Error::Config(format!(
            "'{key}' must be a nonnegative integer, got {other}"
        ))),
    }
}

fn take_bool(params: &mut toml::Table, key: &str, default: bool) -> Result<bool> {
    match params.remove(key) {
        None => Ok(default),
        Some(toml::Value::Boolean(v)) => Ok(v),
        Some(other) => Err(Error::Config(format!(
            "'{key}' must be a boolean, got {other}"
        ))),
    }
}

fn take_string(params: &mut toml::Table, key: &str, default: &str) -> Result<String> {
    match params.remove(key) {
        None => Ok(default.to_string()),
        Some(toml::Value::String(v)) => Ok(v),
        Some(other) => Err(Error::Config(format!(
            "'{key}' must be a string, got {other}"
        ))),
    }
}

fn reject_leftovers(params: toml::Table, kind: &str) -> Result<()> {
    if let Some(key) = params.keys().next() {
        return Err(Error::Config(format!(
            "unknown key '{key}' for stage kind '{kind}'"
        )));
    }
    Ok(())
}

fn take_wolf_config(params: &mut toml::Table) -> Result<WolfConfig> {
    let defaults = WolfConfig::default();
    Ok(WolfConfig {
        anchors: take_usize(params, "anchors", defaults.anchors)?,
        bandwidth: take_f64(params, "bandwidth", defaults.bandwidth)?,
        rho_s: take_f64(params, "rho_s", defaults.rho_s)?,
        rho_r: take_f64(params, "rho_r_deg", defaults.rho_r.to_degrees())?.to_radians(),
        rho_t: take_f64(params, "rho_t", defaults.rho_t)?,
        beta: take_f64(params, "beta", defaults.beta)?,
    })
}

fn take_pad_mode(params: &mut toml::Table) -> Result<PadMode> {
    match take_string(params, "pad", "duplicate-first")?.as_str() {
        "duplicate-first" => Ok(PadMode::DuplicateFirst),
        "shrink" => Ok(PadMode::Shrink),
        other => Err(Error::Config(format!(
            "unknown pad mode '{other}' (expected 'duplicate-first' or 'shrink')"
        ))),
    }
}

fn stage_from_raw(raw: RawStage) -> Result<Stage> {
    let mut params = raw.params;
    let stage = match raw.kind.as_str() {
        "cda" => {
            let defaults = CdaConfig::default();
            let up_axis = match take_string(&mut params, "up_axis", "y")?.as_str() {
                "x" => UpAxis::X,
                "y" => UpAxis::Y,
                "z" => UpAxis::Z,
                other => {
                    return Err(Error::Config(format!(
                        "unknown up_axis '{other}' (expected 'x', 'y' or 'z')"
                    )))
                }
            };
            Stage::Cda(CdaConfig {
                scale_lo: take_f64(&mut params, "scale_lo", defaults.scale_lo)?,
                scale_hi: take_f64(&mut params, "scale_hi", defaults.scale_hi)?,
                rotate: take_bool(&mut params, "rotate", defaults.rotate)?,
                rotation_range: take_f64(
                    &mut params,
                    "rotation_range_deg",
                    defaults.rotation_range.to_degrees(),
                )?
                .to_radians(),
                up_axis,
                translation: take_f64(&mut params, "translation", defaults.translation)?,
                sigma: take_f64(&mut params, "sigma", defaults.sigma)?,
                clip: take_f64(&mut params, "clip", defaults.clip)?,
            })
        }
        "pointwolf" => Stage::Pointwolf(take_wolf_config(&mut params)?),
        "augtune" => {
            let lambda = take_f64(&mut params, "lambda", 0.3)?;
            Stage::Augtune {
                wolf: take_wolf_config(&mut params)?,
                lambda,
            }
        }
        "local_drop" => Stage::Corrupt {
            kind: Corruption::LocalDrop {
                clusters: take_usize(&mut params, "clusters", 3)?,
                cluster_size: take_usize(&mut params, "cluster_size", 50)?,
            },
            pad: take_pad_mode(&mut params)?,
        },
        "local_add" => Stage::Corrupt {
            kind: Corruption::LocalAdd {
                clusters: take_usize(&mut params, "clusters", 3)?,
                cluster_size: take_usize(&mut params, "cluster_size", 50)?,
            },
            pad: take_pad_mode(&mut params)?,
        },
        "dropout" => Stage::Corrupt {
            kind: Corruption::Dropout {
                rate: take_f64(&mut params, "rate", 0.25)?,
            },
            pad: take_pad_mode(&mut params)?,
        },
        "noise" => Stage::Corrupt {
            kind: Corruption::Noise {
                sigma: take_f64(&mut params, "sigma", 0.01)?,
            },
            pad: take_pad_mode(&mut params)?,
        },
        other => {
            return Err(Error::Config(format!(
                "unknown stage kind '{other}' (expected cda, pointwolf, augtune, \
                 local_drop, local_add, dropout or noise)"
            )))
        }
    };
    reject_leftovers(params, raw.kind.as_str())?;
    Ok(stage)
}

/// One successfully written output sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub input: PathBuf,
    pub file_ordinal: usize,
    pub rep: usize,
    pub output: PathBuf,
    pub points_in: usize,
    pub points_out: usize,
    /// Child seed per stage, in stage order.
    pub stage_seeds: Vec<u64>,
    /// Tuning decisions keyed by stage ordinal.
    pub augtune: Vec<(usize, AugTuneState)>,
}

/// A sample the run could not produce.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRecord {
    pub input: PathBuf,
    /// `None` when the input file itself failed to load (all repetitions).
    pub rep: Option<usize>,
    pub error: String,
}

/// Everything a run did. The rendered report is fully deterministic;
/// `elapsed` is returned for display but never written into it.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub master_seed: u64,
    pub normalize: bool,
    pub repetitions: usize,
    pub stage_names: Vec<String>,
    pub records: Vec<SampleRecord>,
    pub skipped: Vec<SkippedRecord>,
    pub elapsed: Duration,
}

impl RunReport {
    /// Renders the machine-readable report: a header, then one `[record]`
    /// or `[skipped]` block per sample, keyed `key=value`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "master_seed={}", self.master_seed);
        let _ = writeln!(out, "normalize={}", self.normalize);
        let _ = writeln!(out, "repetitions={}", self.repetitions);
        let _ = writeln!(out, "stages={}", self.stage_names.join(","));
        let _ = writeln!(out, "records={}", self.records.len());
        let _ = writeln!(out, "skipped={}", self.skipped.len());
        for r in &self.records {
            let _ = writeln!(out, "\n[record]");
            let _ = writeln!(out, "input={}", r.input.display());
            let _ = writeln!(out, "file_ordinal={}", r.file_ordinal);
            let _ = writeln!(out, "rep={}", r.rep);
            let _ = writeln!(out, "output={}", r.output.display());
            let _ = writeln!(out, "points_in={}", r.points_in);
            let _ = writeln!(out, "points_out={}", r.points_out);
            let seeds: Vec<String> = r.stage_seeds.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "stage_seeds={}", seeds.join(","));
            for (stage, s) in &r.augtune {
                let _ = writeln!(out, "augtune_stage={stage}");
                let _ = writeln!(out, "augtune_lambda={:.17e}", s.lambda);
                let _ = writeln!(out, "augtune_c_orig={:.17e}", s.c_orig);
                let _ = writeln!(out, "augtune_c_prop={:.17e}", s.c_prop);
                let _ = writeln!(out, "augtune_c_target={:.17e}", s.c_target);
                let _ = writeln!(out, "augtune_alpha={:.17e}", s.alpha);
            }
        }
        for s in &self.skipped {
            let _ = writeln!(out, "\n[skipped]");
            let _ = writeln!(out, "input={}", s.input.display());
            if let Some(rep) = s.rep {
                let _ = writeln!(out, "rep={rep}");
            }
            let _ = writeln!(out, "error={}", s.error);
        }
        out
    }
}

/// Expands the input list: entries containing `*`, `?` or `[` run through
/// glob matching (each pattern's matches sorted); plain paths pass through.
/// Duplicates keep their first position.
pub fn expand_inputs(inputs: &[String]) -> Result<Vec<PathBuf>> {
    let mut seen = BTreeSet::new();
    let mut files = Vec::new();
    for entry in inputs {
        if entry.contains(['*', '?', '[']) {
            let matches =
                glob::glob(entry).map_err(|e| Error::Config(format!("bad glob '{entry}': {e}")))?;
            let mut found: Vec<PathBuf> = Vec::new();
            for m in matches {
                match m {
                    Ok(p) => found.push(p),
                    Err(e) => {
                        return Err(Error::io(e.path().to_path_buf(), e.into()));
                    }
                }
            }
            found.sort();
            for p in found {
                if seen.insert(p.clone()) {
                    files.push(p);
                }
            }
        } else {
            let p = PathBuf::from(entry);
            if seen.insert(p.clone()) {
                files.push(p);
            }
        }
    }
    Ok(files)
}

/// The oracle the pipeline's tuning stage scores against: each input file
/// is its own class, fitted on the normalized input clouds. Retaining a
/// sample's identity against the other inputs in the batch is exactly the
/// shape-identity question the tuning step safeguards.
fn fit_batch_oracle(clouds: &[Option<PointCloud>]) -> Result<Option<NearestCentroidOracle>> {
    let classes: Vec<Vec<PointCloud>> = clouds
        .iter()
        .flatten()
        .map(|pc| vec![pc.clone()])
        .collect();
    if classes.is_empty() {
        return Ok(None);
    }
    NearestCentroidOracle::fit(&classes).map(Some)
}

fn apply_stage(
    pc: &PointCloud,
    stage: &Stage,
    seed: u64,
    oracle: Option<(&NearestCentroidOracle, usize)>,
) -> Result<(PointCloud, Option<AugTuneState>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match stage {
        Stage::Cda(cfg) => Ok((cda_augment(pc, cfg, &mut rng)?, None)),
        Stage::Pointwolf(cfg) => Ok((pointwolf(pc, cfg, &mut rng)?, None)),
        Stage::Augtune { wolf, lambda } => {
            let (oracle, label) = oracle.ok_or_else(|| Error::Oracle {
                context: "pipeline".into(),
                msg: "no oracle available for the tuning stage".into(),
            })?;
            let (out, state) = augtune_step(pc, label, oracle, wolf, *lambda, &mut rng)?;
            Ok((out, Some(state)))
        }
        Stage::Corrupt { kind, pad } => Ok((kind.apply(pc, *pad, &mut rng)?, None)),
    }
}

/// Runs the whole pipeline and writes outputs named `<stem>__rep<k>.<ext>`
/// plus `report.txt` into the output directory.
pub fn run_pipeline(spec: &PipelineSpec) -> Result<RunReport> {
    spec.validate()?;
    let started = Instant::now();
    let files = expand_inputs(&spec.inputs)?;
    if files.is_empty() {
        return Err(Error::InvalidInput(
            "no input files matched the given paths".into(),
        ));
    }
    std::fs::create_dir_all(&spec.output_dir)
        .map_err(|e| Error::io(spec.output_dir.clone(), e))?;

    let needs_oracle = spec
        .stages
        .iter()
        .any(|s| matches!(s, Stage::Augtune { .. }));

    // Load (and optionally normalize) every input up front; per-file
    // failures become skip records unless the run is strict.
    let mut skipped: Vec<SkippedRecord> = Vec::new();
    let mut loaded: Vec<Option<(PointCloud, CloudFormat)>> = Vec::with_capacity(files.len());
    for path in &files {
        let format = match spec.format {
            Some(f) => Ok(f),
            None => CloudFormat::from_path(path),
        };
        let cloud = format.and_then(|f| read_cloud_with_format(path, f).map(|pc| (pc, f)));
        match cloud {
            Ok((pc, f)) => {
                let pc = if spec.normalize { pc.normalize() } else { pc };
                loaded.push(Some((pc, f)));
            }
            Err(e) => {
                if spec.strict {
                    return Err(e);
                }
                skipped.push(SkippedRecord {
                    input: path.clone(),
                    rep: None,
                    error: e.to_string(),
                });
                loaded.push(None);
            }
        }
    }

    let oracle = if needs_oracle {
        let clouds: Vec<Option<PointCloud>> = loaded
            .iter()
            .map(|l| l.as_ref().map(|(pc, _)| pc.clone()))
            .collect();
        fit_batch_oracle(&clouds)?
    } else {
        None
    };
    // Labels index the oracle's classes, which hold loaded files only.
    let labels: Vec<usize> = {
        let mut next = 0;
        loaded
            .iter()
            .map(|l| {
                let label = next;
                if l.is_some() {
                    next += 1;
                }
                label
            })
            .collect()
    };

    let mut records: Vec<SampleRecord> = Vec::new();
    for (file_ordinal, (path, slot)) in files.iter().zip(&loaded).enumerate() {
        let Some((input_cloud, input_format)) = slot else {
            continue;
        };
        let out_format = spec.format.unwrap_or(*input_format);
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("cloud");
        for rep in 0..spec.repetitions {
            let mut pc = input_cloud.clone();
            let mut stage_seeds = Vec::with_capacity(spec.stages.len());
            let mut augtune = Vec::new();
            let mut failure: Option<Error> = None;
            for (stage_ordinal, stage) in spec.stages.iter().enumerate() {
                let seed =
                    child_seed(spec.seed, file_ordinal as u64, rep as u64, stage_ordinal as u64);
                stage_seeds.push(seed);
                let oracle_ctx = oracle.as_ref().map(|o| (o, labels[file_ordinal]));
                match apply_stage(&pc, stage, seed, oracle_ctx) {
                    Ok((next, state)) => {
                        if let Some(state) = state {
                            augtune.push((stage_ordinal, state));
                        }
                        pc = next;
                    }
                    Err(e) => {
                        failure = Some(e);
                        break;
                    }
                }
            }
            if let Some(e) = failure {
                if spec.strict {
                    return Err(e);
                }
                skipped.push(SkippedRecord {
                    input: path.clone(),
                    rep: Some(rep),
                    error: e.to_string(),
                });
                continue;
            }
            let output = spec
                .output_dir
                .join(format!("{stem}__rep{rep}.{}", out_format.extension()));
            write_cloud(&pc, &output, out_format)?;
            records.push(SampleRecord {
                input: path.clone(),
                file_ordinal,
                rep,
                output,
                points_in: input_cloud.len(),
                points_out: pc.len(),
                stage_seeds,
                augtune,
            });
        }
    }

    let report = RunReport {
        master_seed: spec.seed,
        normalize: spec.normalize,
        repetitions: spec.repetitions,
        stage_names: spec.stages.iter().map(|s| s.name().to_string()).collect(),
        records,
        skipped,
        elapsed: started.elapsed(),
    };
    std::fs::write(spec.output_dir.join("report.txt"), report.render())
        .map_err(|e| Error::io(spec.output_dir.join("report.txt"), e))?;
    Ok(report)
}

/// Re-applies the stage chain of one recorded sample from its stored child
/// seeds, reproducing the written output exactly.
pub fn replay_sample(
    spec: &PipelineSpec,
    record: &SampleRecord,
    oracle: Option<(&NearestCentroidOracle, usize)>,
) -> Result<PointCloud> {
    let format = match spec.format {
        Some(f) => f,
        None => CloudFormat::from_path(&record.input)?,
    };
    let mut pc = read_cloud_with_format(&record.input, format)?;
    if spec.normalize {
        pc = pc.normalize();
    }
    for (stage, seed) in spec.stages.iter().zip(&record.stage_seeds) {
        let (next, _) = apply_stage(&pc, stage, *seed, oracle)?;
        pc = next;
    }
    Ok(pc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_toml() -> &'static str {
        r#"
inputs = ["in/*.xyz"]
output_dir = "out"
seed = 7
repetitions = 2

[[stage]]
kind = "pointwolf"
anchors = 2
rho_r_deg = 10.0

[[stage]]
kind = "noise"
sigma = 0.02
"#
    }

    #[test]
    fn toml_round_trips_into_a_validated_spec() {
        let spec = PipelineSpec::from_toml_str(minimal_toml()).unwrap();
        assert_eq!(spec.seed, 7);
        assert_eq!(spec.repetitions, 2);
        assert!(spec.normalize);
        assert!(!spec.strict);
        assert_eq!(spec.format, None);
        assert_eq!(spec.stages.len(), 2);
        match &spec.stages[0] {
            Stage::Pointwolf(cfg) => {
                assert_eq!(cfg.anchors, 2);
                assert!((cfg.rho_r - 10f64.to_radians()).abs() <= 1e-15);
                assert_eq!(cfg.rho_s, WolfConfig::default().rho_s);
            }
            other => panic!("expected pointwolf, got {other:?}"),
        }
        match &spec.stages[1] {
            Stage::Corrupt {
                kind: Corruption::Noise { sigma },
                pad,
            } => {
                assert_eq!(*sigma, 0.02);
                assert_eq!(*pad, PadMode::DuplicateFirst);
            }
            other => panic!("expected noise, got {other:?}"),
        }
    }

    #[test]
    fn toml_rejects_unknown_stage_kinds_and_keys() {
        let bad_kind = r#"
inputs = ["a.xyz"]
output_dir = "out"
[[stage]]
kind = "blur"
"#;
        assert!(matches!(
            PipelineSpec::from_toml_str(bad_kind),
            Err(Error::Config(_))
        ));
        let bad_key = r#"
inputs = ["a.xyz"]
output_dir = "out"
[[stage]]
kind = "pointwolf"
bandwith = 0.5
"#;
        let err = PipelineSpec::from_toml_str(bad_key).unwrap_err();
        assert!(err.to_string().contains("bandwith"), "{err}");
    }

    #[test]
    fn toml_rejects_missing_stages_and_bad_values() {
        let no_stage = "inputs = [\"a.xyz\"]\noutput_dir = \"out\"\n";
        assert!(PipelineSpec::from_toml_str(no_stage).is_err());
        let bad_lambda = r#"
inputs = ["a.xyz"]
output_dir = "out"
[[stage]]
kind = "augtune"
lambda = 1.5
"#;
        assert!(PipelineSpec::from_toml_str(bad_lambda).is_err());
        let bad_pad = r#"
inputs = ["a.xyz"]
output_dir = "out"
[[stage]]
kind = "dropout"
pad = "mirror"
"#;
        assert!(PipelineSpec::from_toml_str(bad_pad).is_err());
    }

    #[test]
    fn expand_inputs_passes_plain_paths_and_dedupes() {
        let files = expand_inputs(&[
            "a.xyz".to_string(),
            "b.xyz".to_string(),
            "a.xyz".to_string(),
        ])
        .unwrap();
        assert_eq!(files, vec![PathBuf::from("a.xyz"), PathBuf::from("b.xyz")]);
    }

    #[test]
    fn stage_names_match_config_keywords() {
        let spec = PipelineSpec::from_toml_str(minimal_toml()).unwrap();
        let names: Vec<_> = spec.stages.iter().map(Stage::name).collect();
        assert_eq!(names, vec!["pointwolf", "noise"]);
    }
}
