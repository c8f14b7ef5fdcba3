//! Subcommand implementations. Each takes explicit inputs and a config and
//! returns a summary; printing is left to the binary.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cocoio::{
    self, annotation_file_name, assign_splits, compute_stats, format_stats_table, CocoDataset,
    CocoError, SizeBuckets, SizeStats, Split, SplitKey,
};
use crate::composer::{
    compose_check_with_ink, load_templates, CheckTemplate, ComposeError, GeneratedCheck,
    GlyphAtlas,
};
use crate::config::{ConfigError, ExtractConfig, GenerationConfig};
use crate::evaluator::{self, report, EvalConfig, EvalError, EvalResult, ReportLayout};
use crate::geom::Rect;
use crate::inkaug::{sample_ink, InkColor};
use crate::morphology::{self, CorpusReport, MorphologyError, StructuringElement};
use crate::raster::to_luminance;
use crate::seed;
use crate::sheets::{
    self, load_manifest, load_samples, validate_collection_with_roster, CollectionProtocol,
    SheetError, SignatureSample, ValidationReport,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Sheet(#[from] SheetError),
    #[error("sheet {sheet}, manifest line {line}: {source}")]
    Extract {
        sheet: String,
        line: u64,
        #[source]
        source: SheetError,
    },
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error("sample {sample} ({person}) on template {template}: {source}")]
    Render {
        sample: usize,
        person: String,
        template: String,
        #[source]
        source: ComposeError,
    },
    #[error(transparent)]
    Coco(#[from] CocoError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Morphology(#[from] MorphologyError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

/// Crops every manifest box from its sheet and writes the sample store.
/// Returns the number of samples.
pub fn cmd_extract(
    manifest: &Path,
    sheets_dir: &Path,
    out_dir: &Path,
    cfg: &ExtractConfig,
) -> Result<usize> {
    let sheets = load_manifest(manifest)?;
    let per_sheet: Vec<Vec<(SignatureSample, String, Rect)>> = sheets
        .par_iter()
        .map(|sheet| {
            let path = sheets_dir.join(&sheet.sheet_id);
            let img = image::open(&path).map_err(|source| SheetError::Image {
                path: path.clone(),
                source,
            })?;
            let gray = to_luminance(&img);
            let threshold = cfg.threshold_for(&sheet.sheet_id);
            sheet
                .boxes
                .iter()
                .map(|b| {
                    sheets::extract_sample(&gray, b.rect, &sheet.person_id, b.forged, b.pen, threshold)
                        .map(|s| (s, sheet.sheet_id.clone(), b.rect))
                        .map_err(|source| PipelineError::Extract {
                            sheet: sheet.sheet_id.clone(),
                            line: b.line,
                            source,
                        })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let samples: Vec<_> = per_sheet.into_iter().flatten().collect();
    sheets::write_samples(out_dir, &samples)?;
    Ok(samples.len())
}

/// One planned check: which signature, in which ink, on which template.
#[derive(Debug, Clone)]
struct Job {
    sample: usize,
    ink: InkColor,
    template: usize,
}

/// Expands every sample into `augmentations × checks` candidate jobs. Ink
/// is drawn once per augmentation, the template once per check, all from
/// the "plan" stream.
fn plan_jobs(samples: &[SignatureSample], n_templates: usize, cfg: &GenerationConfig) -> Vec<Job> {
    let mut rng = seed::stream(cfg.master_seed, "plan", 0);
    let mut jobs = Vec::with_capacity(samples.len() * cfg.checks_per_signature());
    for sample in 0..samples.len() {
        for _ in 0..cfg.augmentations_per_signature {
            let ink = sample_ink(&cfg.compose.ink_weights, &cfg.compose.palette, &mut rng);
            for _ in 0..cfg.checks_per_augmentation {
                jobs.push(Job {
                    sample,
                    ink,
                    template: rng.gen_range(0..n_templates),
                });
            }
        }
    }
    jobs
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SplitCounts {
    pub genuine: usize,
    pub forged: usize,
    pub annotations: usize,
}

impl SplitCounts {
    pub fn total(&self) -> usize {
        self.genuine + self.forged
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenerateSummary {
    pub samples: usize,
    pub candidates: usize,
    pub train: SplitCounts,
    pub val: SplitCounts,
    pub output_dir: PathBuf,
}

impl GenerateSummary {
    pub fn split(&self, split: Split) -> &SplitCounts {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
        }
    }
}

impl fmt::Display for GenerateSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} signatures, {} candidate checks, written to {}",
            self.samples,
            self.candidates,
            self.output_dir.display()
        )?;
        writeln!(f, "{:<10} {:>8} {:>8} {:>8}", "Split", "Genuine", "Forged", "Total")?;
        for s in Split::ALL {
            let c = self.split(s);
            writeln!(f, "{:<10} {:>8} {:>8} {:>8}", s.as_str(), c.genuine, c.forged, c.total())?;
        }
        let (t, v) = (&self.train, &self.val);
        writeln!(
            f,
            "{:<10} {:>8} {:>8} {:>8}",
            "Total",
            t.genuine + v.genuine,
            t.forged + v.forged,
            t.total() + v.total()
        )
    }
}

pub fn load_atlas(cfg: &GenerationConfig) -> Result<GlyphAtlas> {
    Ok(match &cfg.glyphs {
        Some(dir) => GlyphAtlas::load(dir)?,
        None => GlyphAtlas::builtin(),
    })
}

/// Plans candidates, assigns splits, renders the selected checks and
/// writes both COCO splits under `cfg.output_dir`.
pub fn cmd_generate(cfg: &GenerationConfig) -> Result<GenerateSummary> {
    cfg.validate()?;
    let samples = load_samples(&cfg.samples)?;
    let templates = load_templates(&cfg.templates)?;
    let atlas = load_atlas(cfg)?;
    generate_from(cfg, &samples, &templates, &atlas)
}

/// [`cmd_generate`] with inputs already in memory.
pub fn generate_from(
    cfg: &GenerationConfig,
    samples: &[SignatureSample],
    templates: &[CheckTemplate],
    atlas: &GlyphAtlas,
) -> Result<GenerateSummary> {
    if templates.is_empty() {
        return Err(PipelineError::Input("no check templates".into()));
    }
    let jobs = plan_jobs(samples, templates.len(), cfg);
    let keys: Vec<SplitKey> = jobs
        .iter()
        .map(|j| SplitKey {
            forged: samples[j.sample].forged(),
            person_id: samples[j.sample].person_id().to_string(),
        })
        .collect();
    let assignment = assign_splits(&keys, &cfg.splits, &mut seed::stream(cfg.master_seed, "split", 0))?;

    std::fs::create_dir_all(&cfg.output_dir).map_err(|source| CocoError::Io {
        path: cfg.output_dir.clone(),
        source,
    })?;
    let mut summary = GenerateSummary {
        samples: samples.len(),
        candidates: jobs.len(),
        train: SplitCounts::default(),
        val: SplitCounts::default(),
        output_dir: cfg.output_dir.clone(),
    };
    for split in Split::ALL {
        let selected: Vec<&Job> = jobs
            .iter()
            .zip(&assignment)
            .filter(|(_, a)| **a == Some(split))
            .map(|(j, _)| j)
            .collect();
        let render = |i: usize| -> Result<GeneratedCheck> {
            let job = selected[i];
            let sample = &samples[job.sample];
            let template = &templates[job.template];
            let mut rng = seed::stream(cfg.master_seed, split.as_str(), i as u64);
            compose_check_with_ink(template, sample, job.ink, atlas, &mut rng, &cfg.compose).map_err(
                |source| PipelineError::Render {
                    sample: job.sample,
                    person: sample.person_id().to_string(),
                    template: template.template_id.clone(),
                    source,
                },
            )
        };
        let ds = cocoio::write_dataset_with(selected.len(), split.as_str(), &cfg.output_dir, render)?;
        let forged = selected.iter().filter(|j| samples[j.sample].forged()).count();
        let counts = SplitCounts {
            genuine: selected.len() - forged,
            forged,
            annotations: ds.annotations.len(),
        };
        match split {
            Split::Train => summary.train = counts,
            Split::Val => summary.val = counts,
        }
    }
    Ok(summary)
}

/// Reads annotation files and tabulates size buckets. A directory argument
/// stands for its `instances_train.json` and `instances_val.json`.
pub fn cmd_stats(paths: &[PathBuf], buckets: &SizeBuckets) -> Result<(Vec<(String, SizeStats)>, String)> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            for s in Split::ALL {
                let f = p.join(annotation_file_name(s.as_str()));
                if f.exists() {
                    files.push(f);
                }
            }
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        return Err(PipelineError::Input("no annotation files found".into()));
    }
    let mut stats = Vec::new();
    for f in &files {
        let ds = cocoio::read_dataset(f)?;
        let name = if ds.info.split.is_empty() {
            f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        } else {
            ds.info.split.clone()
        };
        stats.push((name, compute_stats(&ds, buckets)));
    }
    let refs: Vec<(&str, &SizeStats)> = stats.iter().map(|(n, s)| (n.as_str(), s)).collect();
    let table = format_stats_table(&refs);
    Ok((stats, table))
}

pub fn cmd_dilate(in_dir: &Path, out_dir: &Path, radius: u32, iterations: u32) -> Result<CorpusReport> {
    let se = StructuringElement::square(radius, iterations)?;
    Ok(morphology::preprocess_corpus(in_dir, out_dir, se)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layouts {
    Overall,
    ClassWise,
    Both,
}

/// Scores a prediction file against ground truth. Optionally writes the
/// result as JSON. Returns the result and the formatted tables.
pub fn cmd_evaluate(
    pred_path: &Path,
    gt_path: &Path,
    cfg: &EvalConfig,
    layouts: Layouts,
    json_out: Option<&Path>,
) -> Result<(EvalResult, String)> {
    let gt: CocoDataset = cocoio::read_dataset(gt_path)?;
    let preds = evaluator::load_predictions(pred_path)?;
    let result = evaluator::evaluate(&preds, &gt, cfg)?;
    if let Some(p) = json_out {
        evaluator::write_result(&result, p)?;
    }
    let label = pred_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "predictions".into());
    let mut text = String::new();
    if matches!(layouts, Layouts::Overall | Layouts::Both) {
        text.push_str(&report(&result, ReportLayout::Overall, &label));
    }
    if layouts == Layouts::Both {
        text.push('\n');
    }
    if matches!(layouts, Layouts::ClassWise | Layouts::Both) {
        text.push_str(&report(&result, ReportLayout::ClassWise, &label));
    }
    Ok((result, text))
}

/// Checks a sample store against the collection protocol. Deviations are
/// reported, not treated as errors.
pub fn cmd_validate_samples(index: &Path, roster: &[String]) -> Result<ValidationReport> {
    let samples = load_samples(index)?;
    let roster: Vec<&str> = roster.iter().map(String::as_str).collect();
    Ok(validate_collection_with_roster(
        &samples,
        &roster,
        CollectionProtocol::default(),
    ))
}

/// Reads an annotation file; any invariant violation is an error.
pub fn cmd_validate_dataset(path: &Path) -> Result<CocoDataset> {
    Ok(cocoio::read_dataset(path)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaffoldSummary {
    pub boxes: usize,
    pub templates: usize,
    pub config: PathBuf,
}

/// Writes demo collection sheets, templates and a config into `dir` so the
/// whole pipeline can run without scanned inputs.
pub fn cmd_scaffold(dir: &Path, persons: usize, templates: usize, seed_value: u64) -> Result<ScaffoldSummary> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| PipelineError::Coco(CocoError::Io { path, source })
    };
    let sheets_dir = dir.join("sheets");
    let boxes = crate::demo::write_collection(&sheets_dir, persons, seed_value).map_err(io(&sheets_dir))?;
    crate::demo::write_template_set(&dir.join("templates"), templates, 600, 270, seed_value)?;
    let cfg = GenerationConfig {
        master_seed: seed_value,
        ..GenerationConfig::default()
    };
    let config = dir.join("checksynth.toml");
    std::fs::write(&config, cfg.to_toml()).map_err(io(&config))?;
    Ok(ScaffoldSummary {
        boxes,
        templates,
        config,
    })
}
