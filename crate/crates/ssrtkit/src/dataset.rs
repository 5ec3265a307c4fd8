//! Random-bar dataset generation, ground-truth labeling through the
//! rotate-by-pi oracle, and the batch evaluation harness with its
//! precision report.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::compute_moments;
use crate::raster::{em_measure, normalize, save_image, GrayImage};
use crate::shapes::{bars_union, RotatedRect};
use crate::symmetry::{check_central_symmetry, AngleCheck, SymmetryOptions, SymmetryParams};

/// Generator configuration. Bars get uniformly random centers anywhere in
/// the frame, orientations over `[0, pi)`, widths from `width_range` and
/// lengths from `length_range` (defaulting to `[size/4, 3 size/4]`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenConfig {
    pub count: usize,
    /// Square image side, pixels.
    pub size: usize,
    pub bar_count_range: (usize, usize),
    pub width_range: (f64, f64),
    /// Defaults to `[size/4, 3 size/4]` when absent.
    pub length_range: Option<(f64, f64)>,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// When set, every image is labeled with the rotation oracle at this
    /// threshold and the label lands in the manifest.
    pub label_t: Option<f64>,
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Error::InvalidParameter { name, reason };
        if self.count == 0 {
            return Err(bad("count", "must be at least 1".into()));
        }
        if self.size < 32 {
            return Err(bad("size", format!("{} below the minimum of 32", self.size)));
        }
        if self.bar_count_range.0 == 0 || self.bar_count_range.0 > self.bar_count_range.1 {
            return Err(bad("bar_count_range", format!("{:?}", self.bar_count_range)));
        }
        let ranges = [("width_range", self.width_range)]
            .into_iter()
            .chain(self.length_range.map(|r| ("length_range", r)));
        for (name, (lo, hi)) in ranges {
            if !(lo > 0.0 && lo <= hi) {
                return Err(bad("range", format!("{name} {lo}..{hi} is empty")));
            }
        }
        Ok(())
    }

    fn length_range(&self) -> (f64, f64) {
        self.length_range
            .unwrap_or((self.size as f64 / 4.0, 3.0 * self.size as f64 / 4.0))
    }
}

/// One manifest line per generated image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub id: usize,
    pub path: String,
    pub n_bars: usize,
    pub params: Vec<RotatedRect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<bool>,
}

fn sample_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// Draws one image worth of bars; resamples in the rare case the union
/// rasterizes to fewer than two pixels.
pub fn sample_bar_image(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> (GrayImage, Vec<RotatedRect>) {
    let s = cfg.size as f64;
    let (lmin, lmax) = cfg.length_range();
    loop {
        let n = rng.gen_range(cfg.bar_count_range.0..=cfg.bar_count_range.1);
        let bars: Vec<RotatedRect> = (0..n)
            .map(|_| RotatedRect {
                cx: (rng.gen::<f64>() - 0.5) * (s - 1.0),
                cy: (rng.gen::<f64>() - 0.5) * (s - 1.0),
                length: sample_in(rng, lmin, lmax),
                width: sample_in(rng, cfg.width_range.0, cfg.width_range.1),
                angle: rng.gen::<f64>() * PI,
            })
            .collect();
        let img = bars_union(cfg.size, cfg.size, &bars);
        if img.foreground_area() >= 2 {
            return (img, bars);
        }
    }
}

/// Generates the whole dataset in memory, deterministically: image `i`
/// draws from stream `i` of the seeded generator.
pub fn generate_bars_in_memory(cfg: &GenConfig) -> Result<Vec<(GrayImage, Vec<RotatedRect>)>> {
    cfg.validate()?;
    Ok((0..cfg.count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            sample_bar_image(cfg, &mut rng)
        })
        .collect())
}

/// Generates the dataset, writes one PNG per image plus a
/// `manifest.jsonl`, and returns the manifest records.
pub fn generate_bars(cfg: &GenConfig) -> Result<Vec<ManifestRecord>> {
    let images = generate_bars_in_memory(cfg)?;
    fs::create_dir_all(&cfg.output_dir).map_err(|source| Error::Write {
        path: cfg.output_dir.clone(),
        source,
    })?;
    let mut records = Vec::with_capacity(images.len());
    for (id, (img, bars)) in images.into_iter().enumerate() {
        let name = format!("bar_{id:05}.png");
        save_image(&img, &cfg.output_dir.join(&name))?;
        let label = match cfg.label_t {
            Some(t) => Some(label_ground_truth(&img, t)?.1),
            None => None,
        };
        records.push(ManifestRecord {
            id,
            path: name,
            n_bars: bars.len(),
            params: bars,
            label,
        });
    }
    write_manifest(&records, &cfg.output_dir.join("manifest.jsonl"))?;
    Ok(records)
}

pub fn write_manifest(records: &[ManifestRecord], path: &Path) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("manifest record serializes"));
        out.push('\n');
    }
    crate::raster::atomic_write(path, out.as_bytes())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            serde_json::from_str(l).map_err(|e| Error::CorruptDump(format!("manifest: {e}")))
        })
        .collect()
}

/// Ground truth from first principles: rotate the object by pi about its
/// centroid and threshold the E_m overlap mismatch at `t`.
pub fn label_ground_truth(img: &GrayImage, t: f64) -> Result<(f64, bool)> {
    let n = normalize(img)?;
    let centroid = compute_moments(&n).centroid;
    let rotated = img.rotate_pi_about_centroid(centroid)?;
    em_measure(img, &rotated, t)
}

/// One evaluation input: an image and its oracle label.
#[derive(Debug, Clone)]
pub struct EvalCase {
    pub id: String,
    pub image: GrayImage,
    pub truth: bool,
}

/// Parameters the report was produced with.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvalParams {
    #[serde(flatten)]
    pub symmetry: SymmetryParams,
    /// Ground-truth E_m threshold.
    pub t: f64,
}

/// A case where the method and the oracle disagree (or the method failed),
/// kept with its D values for inspection.
#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    pub id: String,
    pub method_sym: bool,
    pub truth_sym: bool,
    pub d_values: Vec<AngleCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Confusion counts with the method verdict as the predicted class and
/// precision `tp / (tp + fp)` (null when nothing was predicted positive).
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: Option<f64>,
    pub disagreements: Vec<Disagreement>,
    pub params_used: EvalParams,
}

impl EvalReport {
    pub fn summary_line(&self) -> String {
        let p = match self.precision {
            Some(v) => format!("{v:.4}"),
            None => "null".into(),
        };
        format!(
            "precision={p} tp={} fp={} tn={} fn={}",
            self.tp, self.fp, self.tn, self.fn_
        )
    }
}

/// Classifies every case and tallies it against the oracle label. Images
/// run in parallel; the tallies and the disagreement order are
/// deterministic. A per-image failure is recorded as a non-symmetric
/// verdict with a note, so the four counts always add up to the input
/// size.
pub fn evaluate(cases: &[EvalCase], opts: &SymmetryOptions, t: f64) -> EvalReport {
    // no short-circuit here: disagreements should carry all three D values
    let full = SymmetryOptions {
        short_circuit: false,
        keep_projections: false,
        ..*opts
    };
    let outcomes: Vec<(bool, Vec<AngleCheck>, Option<String>)> = cases
        .par_iter()
        .map(|case| match check_central_symmetry(&case.image, &full) {
            Ok(r) => (r.sym, r.checks, None),
            Err(e) => (false, Vec::new(), Some(e.to_string())),
        })
        .collect();

    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    let mut disagreements = Vec::new();
    for (case, (method_sym, d_values, note)) in cases.iter().zip(outcomes) {
        match (method_sym, case.truth) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
        if method_sym != case.truth || note.is_some() {
            disagreements.push(Disagreement {
                id: case.id.clone(),
                method_sym,
                truth_sym: case.truth,
                d_values,
                note,
            });
        }
    }
    let precision = (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64);
    EvalReport {
        tp,
        fp,
        tn,
        fn_,
        precision,
        disagreements,
        params_used: EvalParams {
            symmetry: full.params,
            t,
        },
    }
}
