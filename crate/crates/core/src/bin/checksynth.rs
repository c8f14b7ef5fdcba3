use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use checksynth::config::{GenerationConfig, CONFIG_ENV};
use checksynth::pipeline::{self, Layouts};

#[derive(Parser)]
#[command(name = "checksynth", version, about = "Synthetic bank-check dataset tooling")]
struct Cli {
    /// TOML config; flags given on the command line take precedence.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Crop signatures from scanned collection sheets.
    Extract {
        /// CSV manifest: sheet_file,person_id,forged,pen,x,y,w,h
        #[arg(long)]
        manifest: PathBuf,
        /// Directory holding the sheet images; defaults to the manifest's.
        #[arg(long)]
        sheets: Option<PathBuf>,
        /// Sample store directory; defaults to the config's samples dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ink threshold for sheets without a per-sheet override.
        #[arg(long)]
        threshold: Option<u8>,
    },
    /// Compose checks and write COCO train/val splits.
    Generate(GenerateArgs),
    /// Small/medium/large annotation counts per class.
    Stats {
        /// Annotation files, or dataset directories.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Thicken dark strokes in every image of a directory.
    Dilate {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 1)]
        radius: u32,
        #[arg(long, default_value_t = 1)]
        iterations: u32,
    },
    /// Score a COCO results file against ground truth.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, value_enum, default_value_t = LayoutArg::Both)]
        layout: LayoutArg,
        /// Also write the result as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        max_dets: Option<usize>,
        /// Report per-class AP at this IoU instead of over the sweep.
        #[arg(long)]
        per_class_iou: Option<f64>,
        /// IoU for the size-bucketed AP and AR.
        #[arg(long)]
        size_iou: Option<f64>,
    },
    /// Check a sample store against the collection protocol, or an
    /// annotation file against the dataset invariants.
    Validate {
        #[arg(long, conflicts_with = "dataset", required_unless_present = "dataset")]
        samples: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// People expected in the collection, comma separated.
        #[arg(long, value_delimiter = ',')]
        roster: Vec<String>,
    },
    /// Write procedural sheets, templates and a config to try the pipeline.
    Scaffold {
        dir: PathBuf,
        #[arg(long, default_value_t = 19)]
        persons: usize,
        #[arg(long, default_value_t = 4)]
        templates: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long)]
    glyphs: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    augmentations: Option<usize>,
    #[arg(long)]
    checks_per_augmentation: Option<usize>,
    #[arg(long)]
    genuine_train: Option<usize>,
    #[arg(long)]
    genuine_val: Option<usize>,
    #[arg(long)]
    forged_train: Option<usize>,
    #[arg(long)]
    forged_val: Option<usize>,
    /// Keep each writer's checks inside one split.
    #[arg(long)]
    writer_disjoint: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Overall,
    ClassWise,
    Both,
}

fn apply<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl GenerateArgs {
    fn apply(self, cfg: &mut GenerationConfig) {
        apply(&mut cfg.master_seed, self.seed);
        apply(&mut cfg.samples, self.samples);
        apply(&mut cfg.templates, self.templates);
        if self.glyphs.is_some() {
            cfg.glyphs = self.glyphs;
        }
        apply(&mut cfg.output_dir, self.out);
        apply(&mut cfg.augmentations_per_signature, self.augmentations);
        apply(&mut cfg.checks_per_augmentation, self.checks_per_augmentation);
        apply(&mut cfg.splits.genuine_train, self.genuine_train);
        apply(&mut cfg.splits.genuine_val, self.genuine_val);
        apply(&mut cfg.splits.forged_train, self.forged_train);
        apply(&mut cfg.splits.forged_val, self.forged_val);
        cfg.splits.writer_disjoint |= self.writer_disjoint;
    }
}

fn parent_or_dot(p: &Path) -> PathBuf {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = GenerationConfig::load_or_default(cli.config.as_deref()).context("loading config")?;
    match cli.command {
        Command::Extract {
            manifest,
            sheets,
            out,
            threshold,
        } => {
            apply(&mut cfg.extract.threshold, threshold);
            let sheets = sheets.unwrap_or_else(|| parent_or_dot(&manifest));
            let out = out.unwrap_or_else(|| parent_or_dot(&cfg.samples));
            let n = pipeline::cmd_extract(&manifest, &sheets, &out, &cfg.extract)?;
            println!("extracted {n} samples into {}", out.display());
        }
        Command::Generate(args) => {
            args.apply(&mut cfg);
            let summary = pipeline::cmd_generate(&cfg)?;
            print!("{summary}");
        }
        Command::Stats { paths } => {
            let (_, table) = pipeline::cmd_stats(&paths, &cfg.eval.buckets)?;
            print!("{table}");
        }
        Command::Dilate {
            input,
            output,
            radius,
            iterations,
        } => {
            let report = pipeline::cmd_dilate(&input, &output, radius, iterations)?;
            println!("dilated {} images into {}", report.processed, output.display());
            for s in &report.skipped {
                eprintln!("skipped {}: {}", s.path.display(), s.reason);
            }
        }
        Command::Evaluate {
            pred,
            gt,
            layout,
            json,
            max_dets,
            per_class_iou,
            size_iou,
        } => {
            let mut eval = cfg.eval.clone();
            apply(&mut eval.max_dets, max_dets);
            apply(&mut eval.size_metric_iou, size_iou);
            if per_class_iou.is_some() {
                eval.per_class_iou = per_class_iou;
            }
            let layouts = match layout {
                LayoutArg::Overall => Layouts::Overall,
                LayoutArg::ClassWise => Layouts::ClassWise,
                LayoutArg::Both => Layouts::Both,
            };
            let (_, text) = pipeline::cmd_evaluate(&pred, &gt, &eval, layouts, json.as_deref())?;
            print!("{text}");
        }
        Command::Validate {
            samples,
            dataset,
            roster,
        } => {
            if let Some(path) = dataset {
                let ds = pipeline::cmd_validate_dataset(&path)?;
                println!(
                    "{}: {} images, {} annotations, no violations",
                    path.display(),
                    ds.images.len(),
                    ds.annotations.len()
                );
            } else if let Some(path) = samples {
                let report = pipeline::cmd_validate_samples(&path, &roster)?;
                print!("{report}");
                println!("{} protocol flag(s)", report.flag_count());
            }
        }
        Command::Scaffold {
            dir,
            persons,
            templates,
            seed,
        } => {
            let s = pipeline::cmd_scaffold(&dir, persons, templates, seed)?;
            println!(
                "wrote {} sheet boxes, {} templates and {}",
                s.boxes,
                s.templates,
                s.config.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
