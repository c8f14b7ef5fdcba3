//! Procedural stand-ins for the scanned inputs: scribbled signatures,
//! 4x2 collection sheets with their manifest, and check templates. Used by
//! `checksynth scaffold` and the test suites.

use std::fmt::Write as _;
use std::path::Path;

use image::{GrayImage, Luma};
use rand::Rng;

use crate::composer::{synthetic_template, write_templates, CheckTemplate, ComposeError};
use crate::geom::Rect;
use crate::seed;
use crate::sheets::{binarize, Pen, SignatureSample, DEFAULT_THRESHOLD};

const CELL_W: u32 = 200;
const CELL_H: u32 = 100;
const MARGIN: u32 = 20;
pub const SHEET_COLS: u32 = 4;
pub const SHEET_ROWS: u32 = 2;

/// Stroke shape shared by all signatures of one person.
#[derive(Debug, Clone)]
struct Hand {
    points: Vec<(f64, f64)>,
    loops: f64,
}

fn hand_for(person: &str) -> Hand {
    let mut rng = seed::stream(0x5167, person, 0);
    let n = rng.gen_range(5..9);
    let points = (0..n)
        .map(|i| {
            let x = 0.05 + 0.9 * i as f64 / (n - 1) as f64;
            (x, rng.gen_range(0.2..0.8))
        })
        .collect();
    Hand {
        points,
        loops: rng.gen_range(2.0..6.0),
    }
}

/// Draws one signature of `person` into `canvas` inside `cell`. `wobble`
/// controls how far this instance strays from the person's hand.
fn draw_signature(
    canvas: &mut GrayImage,
    cell: Rect,
    person: &str,
    pen: Pen,
    wobble: f64,
    rng: &mut seed::Stream,
) {
    let hand = hand_for(person);
    let (ink, radius) = match pen {
        Pen::Ballpoint => (25u8, 1.2),
        Pen::Pencil => (105u8, 0.9),
    };
    let pts: Vec<(f64, f64)> = hand
        .points
        .iter()
        .map(|&(x, y)| {
            (
                x + rng.gen_range(-wobble..=wobble) * 0.5,
                y + rng.gen_range(-wobble..=wobble),
            )
        })
        .collect();
    let scale = rng.gen_range(0.85..1.0);
    let (cw, ch) = (cell.w as f64 * scale, cell.h as f64 * scale);
    let steps = 400;
    for s in 0..=steps {
        let t = s as f64 / steps as f64;
        let seg = t * (pts.len() - 1) as f64;
        let i = (seg.floor() as usize).min(pts.len() - 2);
        let f = seg - i as f64;
        let (x0, y0) = pts[i];
        let (x1, y1) = pts[i + 1];
        let loop_y = (t * hand.loops * std::f64::consts::TAU).sin() * 0.12;
        let x = (x0 + (x1 - x0) * f) * cw + cell.x as f64 + (cell.w as f64 - cw) / 2.0;
        let y = ((y0 + (y1 - y0) * f + loop_y).clamp(0.05, 0.95)) * ch
            + cell.y as f64
            + (cell.h as f64 - ch) / 2.0;
        stamp(canvas, x, y, radius, ink);
    }
}

fn stamp(canvas: &mut GrayImage, cx: f64, cy: f64, r: f64, ink: u8) {
    let (w, h) = canvas.dimensions();
    let x0 = (cx - r).floor().max(0.0) as u32;
    let y0 = (cy - r).floor().max(0.0) as u32;
    let x1 = ((cx + r).ceil() as u32).min(w - 1);
    let y1 = ((cy + r).ceil() as u32).min(h - 1);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            if d <= r {
                let p = canvas.get_pixel_mut(x, y);
                p[0] = p[0].min(ink);
            }
        }
    }
}

/// A single scribbled signature, tight-cropped.
pub fn scribble_sample(person: &str, forged: bool, pen: Pen, seed_value: u64) -> SignatureSample {
    let mut rng = seed::stream(seed_value, person, forged as u64);
    let mut canvas = GrayImage::from_pixel(CELL_W, CELL_H, Luma([248]));
    let wobble = if forged { 0.08 } else { 0.04 };
    draw_signature(
        &mut canvas,
        Rect::new(0, 0, CELL_W, CELL_H),
        person,
        pen,
        wobble,
        &mut rng,
    );
    let mask = binarize(&canvas, DEFAULT_THRESHOLD);
    let b = mask.ink_bounds().expect("scribble has ink");
    let crop = GrayImage::from_fn(b.w, b.h, |x, y| *canvas.get_pixel(b.x + x, b.y + y));
    SignatureSample::new(person, forged, pen, crop, mask.crop(b)).expect("scribble is tight")
}

/// Boxes of a 4x2 sheet, row-major.
pub fn sheet_boxes() -> Vec<Rect> {
    let mut v = Vec::new();
    for row in 0..SHEET_ROWS {
        for col in 0..SHEET_COLS {
            v.push(Rect::new(
                MARGIN + col * CELL_W + 4,
                MARGIN + row * CELL_H + 4,
                CELL_W - 8,
                CELL_H - 8,
            ));
        }
    }
    v
}

/// A collection sheet with one signature per cell. `cells` gives
/// `(forged, pen)` for each of the eight cells.
pub fn collection_sheet(person: &str, cells: &[(bool, Pen)], seed_value: u64) -> GrayImage {
    let w = SHEET_COLS * CELL_W + 2 * MARGIN;
    let h = SHEET_ROWS * CELL_H + 2 * MARGIN;
    let mut sheet = GrayImage::from_pixel(w, h, Luma([246]));
    // Light grid rules; lighter than the default ink threshold.
    for row in 0..=SHEET_ROWS {
        let y = MARGIN + row * CELL_H;
        for x in MARGIN..w - MARGIN {
            sheet.put_pixel(x, y.min(h - 1), Luma([200]));
        }
    }
    for col in 0..=SHEET_COLS {
        let x = MARGIN + col * CELL_W;
        for y in MARGIN..h - MARGIN {
            sheet.put_pixel(x.min(w - 1), y, Luma([200]));
        }
    }
    for (i, (cell, &(forged, pen))) in sheet_boxes().iter().zip(cells).enumerate() {
        let mut rng = seed::stream(seed_value, person, i as u64);
        let inner = Rect::new(cell.x + 6, cell.y + 6, cell.w - 12, cell.h - 12);
        let wobble = if forged { 0.08 } else { 0.04 };
        draw_signature(&mut sheet, inner, person, pen, wobble, &mut rng);
    }
    sheet
}

/// Writes `persons` people's worth of sheets plus `manifest.csv` into `dir`:
/// per person, one ballpoint sheet and one pencil sheet of genuine
/// signatures, and one forgery sheet split four and four. Returns the
/// number of boxes.
pub fn write_collection(dir: &Path, persons: usize, seed_value: u64) -> std::io::Result<usize> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = String::from("sheet_file,person_id,forged,pen,x,y,w,h\n");
    let mut count = 0;
    let layouts: [(&str, [(bool, Pen); 8]); 3] = [
        ("g1", [(false, Pen::Ballpoint); 8]),
        ("g2", [(false, Pen::Pencil); 8]),
        (
            "f1",
            [
                (true, Pen::Ballpoint),
                (true, Pen::Ballpoint),
                (true, Pen::Ballpoint),
                (true, Pen::Ballpoint),
                (true, Pen::Pencil),
                (true, Pen::Pencil),
                (true, Pen::Pencil),
                (true, Pen::Pencil),
            ],
        ),
    ];
    for p in 0..persons {
        let person = format!("p{:02}", p + 1);
        for (k, (tag, cells)) in layouts.iter().enumerate() {
            let file = format!("{person}_{tag}.png");
            let sheet = collection_sheet(&person, cells, seed_value.wrapping_add(k as u64));
            sheet
                .save(dir.join(&file))
                .map_err(|e| std::io::Error::other(e.to_string()))?;
            for (b, (forged, pen)) in sheet_boxes().iter().zip(cells) {
                writeln!(
                    manifest,
                    "{file},{person},{},{},{},{},{},{}",
                    *forged as u8,
                    pen.code(),
                    b.x,
                    b.y,
                    b.w,
                    b.h
                )
                .unwrap();
                count += 1;
            }
        }
    }
    std::fs::write(dir.join("manifest.csv"), manifest)?;
    Ok(count)
}

/// `n` procedural templates of the given size.
pub fn templates(n: usize, width: u32, height: u32, seed_value: u64) -> Vec<CheckTemplate> {
    (0..n)
        .map(|i| synthetic_template(&format!("t{:02}", i + 1), width, height, seed_value))
        .collect()
}

pub fn write_template_set(
    dir: &Path,
    n: usize,
    width: u32,
    height: u32,
    seed_value: u64,
) -> Result<(), ComposeError> {
    write_templates(dir, &templates(n, width, height, seed_value))
}
