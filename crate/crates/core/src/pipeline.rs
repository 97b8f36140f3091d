//! End-to-end segmentation of one scan: super-segmentation, greedy matching,
//! joining, evaluation and reports.
//!
//! Each stage is a plain function so that running them one at a time and
//! chaining through files yields the same artifacts as [`run_pipeline`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrgError};
use crate::evaluation::{dice_report, SegmentationReport};
use crate::graph::{format_graph, read_model, Model, RegionTable};
use crate::io::{load_labels, load_scalar, save_volume, VolumeFormat};
use crate::matching::{
    evaluate_table, format_assignment, format_match_report, greedy_initial, CostWeights,
    DistanceSpec, Solution,
};
use crate::superseg::{supersegment, Element, SupersegResult};
use crate::volume::{LabelVolume, ScalarVolume};

pub const SUPER_FILE: &str = "super.srgvol";
pub const SUPER_GRAPH_FILE: &str = "super.srg";
pub const OBSERVATION_FILE: &str = "obs.srg";
pub const ASSIGNMENT_FILE: &str = "assignment.txt";
pub const SEGMENTATION_FILE: &str = "seg.srgvol";
pub const MATCH_REPORT_FILE: &str = "report.txt";
pub const EVAL_REPORT_FILE: &str = "eval.txt";
pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupersegParams {
    pub element: Element,
    /// Minima of depth at most this are merged into their neighbors.
    pub min_depth: f64,
}

impl Default for SupersegParams {
    fn default() -> Self {
        Self {
            element: Element::Cross6,
            min_depth: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub model: PathBuf,
    pub scalar: PathBuf,
    /// Precomputed super-segmentation; computed from `scalar` when absent.
    #[serde(rename = "super", default, skip_serializing_if = "Option::is_none")]
    pub super_labels: Option<PathBuf>,
    /// Ground-truth labels; enables the evaluation report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<PathBuf>,
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub weights: CostWeights,
    #[serde(default)]
    pub superseg: SupersegParams,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| SrgError::Config(e.to_string()))
    }

    /// Reads a config file; relative paths are taken relative to its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| SrgError::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(dir) = path.parent() {
            cfg.rebase(dir);
        }
        Ok(cfg)
    }

    fn rebase(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        fix(&mut self.model);
        fix(&mut self.scalar);
        fix(&mut self.output);
        self.super_labels.as_mut().map(fix);
        self.truth.as_mut().map(fix);
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| SrgError::Config(e.to_string()))
    }

    fn inputs(&self) -> Vec<&Path> {
        let mut v = vec![self.model.as_path(), self.scalar.as_path()];
        v.extend(self.super_labels.as_deref());
        v.extend(self.truth.as_deref());
        v
    }

    pub fn validate(&self) -> Result<()> {
        for p in self.inputs() {
            if !p.is_file() {
                return Err(SrgError::io(
                    p,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
                ));
            }
        }
        self.weights.validate()?;
        if !(self.superseg.min_depth.is_finite() && self.superseg.min_depth >= 0.0) {
            return Err(SrgError::Config(format!(
                "superseg min_depth must be finite and ≥ 0, got {}",
                self.superseg.min_depth
            )));
        }
        Ok(())
    }
}

/// Reads only the `[weights]` table of a pipeline config file.
pub fn load_weights(path: impl AsRef<Path>) -> Result<CostWeights> {
    #[derive(Deserialize)]
    struct WeightsOnly {
        #[serde(default)]
        weights: CostWeights,
    }
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| SrgError::io(path, e))?;
    let w: WeightsOnly = toml::from_str(&text).map_err(|e| SrgError::Config(e.to_string()))?;
    Ok(w.weights)
}

/// Greedy match of a super-segmentation and everything derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchOutcome {
    pub table: RegionTable,
    pub solution: Solution,
    /// Super-regions painted with their model labels.
    pub segmentation: LabelVolume,
}

/// Greedy initial solution, joined and evaluated under `weights`.
pub fn match_super(
    model: &Model,
    scalar: &ScalarVolume,
    super_labels: &LabelVolume,
    weights: &CostWeights,
) -> Result<MatchOutcome> {
    weights.validate()?;
    let table = RegionTable::from_volumes(super_labels, scalar)?;
    let assignment = greedy_initial(&table.super_graph(), model, weights);
    let dist = DistanceSpec::from_stats(&model.stats);
    let solution = evaluate_table(&assignment, &table, model, &dist, weights)?;
    let segmentation = table.paint(super_labels, &assignment, model.labels())?;
    Ok(MatchOutcome {
        table,
        solution,
        segmentation,
    })
}

/// Scores a segmentation against the truth over every label present in
/// either volume, background included.
pub fn evaluate_segmentation(
    pred: &LabelVolume,
    truth: &LabelVolume,
) -> Result<SegmentationReport> {
    let mut labels = truth.distinct_labels_with_background();
    labels.extend(pred.distinct_labels_with_background());
    labels.sort_unstable();
    labels.dedup();
    dice_report(pred, truth, &labels)
}

/// What a finished run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSummary {
    pub output: PathBuf,
    pub n_super: usize,
    pub cost: f64,
    pub macro_dice: Option<f64>,
}

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| SrgError::io(path, e))
}

fn manifest(cfg: &PipelineConfig, n_super: usize, summary_cost: f64) -> Result<String> {
    let absolute = |p: &Path| fs::canonicalize(p).map_err(|e| SrgError::io(p, e));
    let mut replay = cfg.clone();
    replay.model = absolute(&cfg.model)?;
    replay.scalar = absolute(&cfg.scalar)?;
    replay.super_labels = cfg.super_labels.as_deref().map(absolute).transpose()?;
    replay.truth = cfg.truth.as_deref().map(absolute).transpose()?;
    replay.output = PathBuf::from(".");

    let mut out = String::new();
    writeln!(out, "# srg pipeline manifest").unwrap();
    writeln!(out, "# srg_version {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(out, "# n_super {n_super}").unwrap();
    writeln!(out, "# cost {summary_cost:e}").unwrap();
    for p in replay.inputs() {
        let len = fs::metadata(p).map_err(|e| SrgError::io(p, e))?.len();
        writeln!(out, "# input {} ({len} bytes)", p.display()).unwrap();
    }
    writeln!(
        out,
        "# replay: srg pipeline --config manifest.txt --output <dir>"
    )
    .unwrap();
    writeln!(out).unwrap();
    out.push_str(&replay.to_toml_string()?);
    Ok(out)
}

fn run_stages(cfg: &PipelineConfig, dir: &Path) -> Result<PipelineSummary> {
    let model = read_model(&cfg.model)?;
    let scalar = load_scalar(&cfg.scalar)?;
    let (super_labels, n_super) = match &cfg.super_labels {
        Some(p) => {
            let labels = load_labels(p)?;
            let n = labels.max_label() as usize;
            (labels, n)
        }
        None => {
            let SupersegResult {
                labels, n_super, ..
            } = supersegment(&scalar, cfg.superseg.element, cfg.superseg.min_depth)?;
            (labels, n_super)
        }
    };
    save_volume(&super_labels, dir.join(SUPER_FILE), VolumeFormat::Raw)?;
    let outcome = match_super(&model, &scalar, &super_labels, &cfg.weights)?;
    write(
        dir,
        SUPER_GRAPH_FILE,
        format_graph(&outcome.table.super_graph()),
    )?;
    write(
        dir,
        OBSERVATION_FILE,
        format_graph(&outcome.solution.observation),
    )?;
    write(
        dir,
        ASSIGNMENT_FILE,
        format_assignment(&outcome.solution.assignment),
    )?;
    write(
        dir,
        MATCH_REPORT_FILE,
        format_match_report(&outcome.solution, &cfg.weights),
    )?;
    save_volume(
        &outcome.segmentation,
        dir.join(SEGMENTATION_FILE),
        VolumeFormat::Raw,
    )?;
    let macro_dice = match &cfg.truth {
        Some(p) => {
            let truth = load_labels(p)?;
            let report = evaluate_segmentation(&outcome.segmentation, &truth)?;
            write(dir, EVAL_REPORT_FILE, report.to_string())?;
            Some(report.macro_dice)
        }
        None => None,
    };
    let cost = outcome.solution.report.total;
    write(dir, MANIFEST_FILE, manifest(cfg, n_super, cost)?)?;
    Ok(PipelineSummary {
        output: cfg.output.clone(),
        n_super,
        cost,
        macro_dice,
    })
}

fn staging_dir(output: &Path) -> PathBuf {
    let mut name = output
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".partial");
    output.with_file_name(name)
}

/// Runs every stage, writing artifacts into `cfg.output`.
///
/// Work happens in a sibling `.partial` directory that is renamed into place
/// only after the last artifact is written, so a failed run leaves nothing
/// behind. An existing output directory is replaced only if it holds a
/// manifest from an earlier run.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineSummary> {
    cfg.validate()?;
    let out = &cfg.output;
    if out.exists() && !out.join(MANIFEST_FILE).is_file() {
        let empty = fs::read_dir(out)
            .map_err(|e| SrgError::io(out, e))?
            .next()
            .is_none();
        if !empty {
            return Err(SrgError::Config(format!(
                "output {} exists and is not a previous pipeline run",
                out.display()
            )));
        }
    }
    let stage = staging_dir(out);
    if stage.exists() {
        fs::remove_dir_all(&stage).map_err(|e| SrgError::io(&stage, e))?;
    }
    fs::create_dir_all(&stage).map_err(|e| SrgError::io(&stage, e))?;
    let result = run_stages(cfg, &stage).and_then(|summary| {
        if out.exists() {
            fs::remove_dir_all(out).map_err(|e| SrgError::io(out, e))?;
        }
        fs::rename(&stage, out).map_err(|e| SrgError::io(out, e))?;
        Ok(summary)
    });
    if result.is_err() {
        let _ = fs::remove_dir_all(&stage);
    }
    result
}
