use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::Result;
use crate::volume::LabelVolume;

/// `2|A∩B| / (|A| + |B|)`, 1 when both sets are empty.
pub fn dice(intersection: u64, a: u64, b: u64) -> f64 {
    if a + b == 0 {
        1.0
    } else {
        2.0 * intersection as f64 / (a + b) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureScore {
    pub label: u32,
    pub dice: f64,
    pub truth_voxels: u64,
    pub predicted_voxels: u64,
    pub intersection: u64,
}

/// Voxels with truth label `truth` predicted as `pred`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionCell {
    pub truth: u32,
    pub pred: u32,
    pub voxels: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentationReport {
    pub structures: Vec<StructureScore>,
    /// Mean Dice over the nonzero labels of the label map (over all labels if
    /// the map holds only background).
    pub macro_dice: f64,
    /// Fraction of voxels whose predicted label equals the truth.
    pub accuracy: f64,
    /// Every nonzero (truth, pred) voxel count, in ascending label order.
    pub confusion: Vec<ConfusionCell>,
}

/// Per-structure overlap of `pred` with `truth` for every label in `label_map`.
pub fn dice_report(
    pred: &LabelVolume,
    truth: &LabelVolume,
    label_map: &[u32],
) -> Result<SegmentationReport> {
    pred.geometry().ensure_same(truth.geometry())?;
    let mut cells: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut agree = 0u64;
    for (&p, &t) in pred.data().iter().zip(truth.data()) {
        *cells.entry((t, p)).or_default() += 1;
        agree += u64::from(p == t);
    }
    let mut truth_count: BTreeMap<u32, u64> = BTreeMap::new();
    let mut pred_count: BTreeMap<u32, u64> = BTreeMap::new();
    for (&(t, p), &c) in &cells {
        *truth_count.entry(t).or_default() += c;
        *pred_count.entry(p).or_default() += c;
    }
    let structures: Vec<StructureScore> = label_map
        .iter()
        .map(|&label| {
            let t = truth_count.get(&label).copied().unwrap_or(0);
            let p = pred_count.get(&label).copied().unwrap_or(0);
            let i = cells.get(&(label, label)).copied().unwrap_or(0);
            StructureScore {
                label,
                dice: dice(i, t, p),
                truth_voxels: t,
                predicted_voxels: p,
                intersection: i,
            }
        })
        .collect();
    let foreground: Vec<f64> = structures
        .iter()
        .filter(|s| s.label != 0)
        .map(|s| s.dice)
        .collect();
    let scored: Vec<f64> = if foreground.is_empty() {
        structures.iter().map(|s| s.dice).collect()
    } else {
        foreground
    };
    let macro_dice = if scored.is_empty() {
        1.0
    } else {
        scored.iter().sum::<f64>() / scored.len() as f64
    };
    let total = pred.len() as u64;
    Ok(SegmentationReport {
        structures,
        macro_dice,
        accuracy: if total == 0 {
            1.0
        } else {
            agree as f64 / total as f64
        },
        confusion: cells
            .into_iter()
            .map(|((truth, pred), voxels)| ConfusionCell {
                truth,
                pred,
                voxels,
            })
            .collect(),
    })
}

impl fmt::Display for SegmentationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "macro_dice {}", self.macro_dice)?;
        writeln!(out, "accuracy {}", self.accuracy)?;
        writeln!(out, "label\tdice\ttruth\tpredicted\tintersection")?;
        for s in &self.structures {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                s.label, s.dice, s.truth_voxels, s.predicted_voxels, s.intersection
            )?;
        }
        writeln!(out, "confusion truth\tpred\tvoxels")?;
        for c in &self.confusion {
            writeln!(out, "{}\t{}\t{}", c.truth, c.pred, c.voxels)?;
        }
        f.write_str(&out)
    }
}
