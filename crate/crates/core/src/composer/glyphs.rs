//! Glyph atlases for rendering field text.
//!
//! An atlas directory holds one grayscale image per character (dark = ink)
//! and an `atlas.toml` manifest:
//!
//! ```toml
//! [glyphs]
//! "A" = "u0041.png"
//! "$" = "u0024.png"
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use image::{GrayImage, Luma};
use serde::{Deserialize, Serialize};

use super::ComposeError;
use crate::raster::AlphaMap;

pub const ATLAS_MANIFEST: &str = "atlas.toml";

#[derive(Debug, Clone, PartialEq)]
pub struct GlyphAtlas {
    glyphs: BTreeMap<char, AlphaMap>,
    height: u32,
}

#[derive(Serialize, Deserialize)]
struct AtlasManifest {
    glyphs: BTreeMap<String, String>,
}

impl GlyphAtlas {
    pub fn from_glyphs(glyphs: BTreeMap<char, AlphaMap>) -> Self {
        let height = glyphs.values().map(AlphaMap::height).max().unwrap_or(0);
        GlyphAtlas { glyphs, height }
    }

    pub fn glyph(&self, c: char) -> Option<&AlphaMap> {
        self.glyphs.get(&c)
    }

    /// Tallest glyph height; the text strip is this tall plus jitter room.
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.glyphs.keys().copied()
    }

    pub fn load(dir: &Path) -> Result<Self, ComposeError> {
        let manifest_path = dir.join(ATLAS_MANIFEST);
        let text = std::fs::read_to_string(&manifest_path).map_err(|source| ComposeError::Io {
            path: manifest_path.clone(),
            source,
        })?;
        let manifest: AtlasManifest =
            toml::from_str(&text).map_err(|e| ComposeError::Config {
                path: manifest_path.clone(),
                message: e.to_string(),
            })?;
        let mut glyphs = BTreeMap::new();
        for (key, file) in manifest.glyphs {
            let mut chars = key.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(ComposeError::Config {
                    path: manifest_path.clone(),
                    message: format!("glyph key {key:?} must be a single character"),
                });
            };
            let path = dir.join(&file);
            let img = image::open(&path)
                .map_err(|source| ComposeError::Image {
                    path: path.clone(),
                    source,
                })?
                .to_luma8();
            let alpha = AlphaMap::from_fn(img.width(), img.height(), |x, y| {
                (255 - img.get_pixel(x, y)[0]) as f32 / 255.0
            });
            glyphs.insert(c, alpha);
        }
        Ok(GlyphAtlas::from_glyphs(glyphs))
    }

    /// Writes the atlas in the directory layout read by [`GlyphAtlas::load`].
    pub fn write(&self, dir: &Path) -> Result<(), ComposeError> {
        std::fs::create_dir_all(dir).map_err(|source| ComposeError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut manifest = AtlasManifest {
            glyphs: BTreeMap::new(),
        };
        for (&c, alpha) in &self.glyphs {
            let file = format!("u{:04x}.png", c as u32);
            let img = GrayImage::from_fn(alpha.width(), alpha.height(), |x, y| {
                Luma([255 - (alpha.get(x, y) * 255.0).round() as u8])
            });
            let path = dir.join(&file);
            img.save(&path).map_err(|source| ComposeError::Image { path, source })?;
            manifest.glyphs.insert(c.to_string(), file);
        }
        let path = dir.join(ATLAS_MANIFEST);
        let text = toml::to_string(&manifest).expect("manifest serializes");
        std::fs::write(&path, text).map_err(|source| ComposeError::Io { path, source })
    }

    /// Built-in 7-row bitmap hand, covering ASCII letters, digits and the
    /// punctuation used in dates and amounts.
    pub fn builtin() -> Self {
        let glyphs = BUILTIN
            .iter()
            .map(|(c, rows)| {
                let w = rows.iter().map(|r| r.len()).max().unwrap_or(0) as u32;
                let alpha = AlphaMap::from_fn(w, rows.len() as u32, |x, y| {
                    let row = rows[y as usize].as_bytes();
                    if row.get(x as usize) == Some(&b'#') {
                        1.0
                    } else {
                        0.0
                    }
                });
                (*c, alpha)
            })
            .collect();
        GlyphAtlas::from_glyphs(glyphs)
    }
}

impl Default for GlyphAtlas {
    fn default() -> Self {
        GlyphAtlas::builtin()
    }
}

type Glyph = (char, [&'static str; 7]);

#[rustfmt::skip]
const BUILTIN: &[Glyph] = &[
    (' ', ["...", "...", "...", "...", "...", "...", "..."]),
    ('$', [".###.", "#.#..", "#.#..", ".###.", "..#.#", "..#.#", ".###."]),
    (',', ["..", "..", "..", "..", "..", ".#", "#."]),
    ('-', ["...", "...", "...", "###", "...", "...", "..."]),
    ('.', [".", ".", ".", ".", ".", ".", "#"]),
    ('/', ["....#", "...#.", "...#.", "..#..", ".#...", ".#...", "#...."]),
    ('\'', ["#", "#", ".", ".", ".", ".", "."]),
    ('0', [".##.", "#..#", "#.##", "#..#", "##.#", "#..#", ".##."]),
    ('1', [".#.", "##.", ".#.", ".#.", ".#.", ".#.", "###"]),
    ('2', [".##.", "#..#", "...#", "..#.", ".#..", "#...", "####"]),
    ('3', ["###.", "...#", "...#", ".##.", "...#", "...#", "###."]),
    ('4', ["..#.", ".##.", "#.#.", "#.#.", "####", "..#.", "..#."]),
    ('5', ["####", "#...", "###.", "...#", "...#", "#..#", ".##."]),
    ('6', [".##.", "#...", "#...", "###.", "#..#", "#..#", ".##."]),
    ('7', ["####", "...#", "..#.", "..#.", ".#..", ".#..", ".#.."]),
    ('8', [".##.", "#..#", "#..#", ".##.", "#..#", "#..#", ".##."]),
    ('9', [".##.", "#..#", "#..#", ".###", "...#", "...#", ".##."]),
    ('A', [".##.", "#..#", "#..#", "####", "#..#", "#..#", "#..#"]),
    ('B', ["###.", "#..#", "#..#", "###.", "#..#", "#..#", "###."]),
    ('C', [".###", "#...", "#...", "#...", "#...", "#...", ".###"]),
    ('D', ["###.", "#..#", "#..#", "#..#", "#..#", "#..#", "###."]),
    ('E', ["####", "#...", "#...", "###.", "#...", "#...", "####"]),
    ('F', ["####", "#...", "#...", "###.", "#...", "#...", "#..."]),
    ('G', [".###", "#...", "#...", "#.##", "#..#", "#..#", ".###"]),
    ('H', ["#..#", "#..#", "#..#", "####", "#..#", "#..#", "#..#"]),
    ('I', ["###", ".#.", ".#.", ".#.", ".#.", ".#.", "###"]),
    ('J', ["..##", "...#", "...#", "...#", "...#", "#..#", ".##."]),
    ('K', ["#..#", "#.#.", "##..", "#...", "##..", "#.#.", "#..#"]),
    ('L', ["#...", "#...", "#...", "#...", "#...", "#...", "####"]),
    ('M', ["#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"]),
    ('N', ["#..#", "##.#", "##.#", "#.##", "#.##", "#..#", "#..#"]),
    ('O', [".##.", "#..#", "#..#", "#..#", "#..#", "#..#", ".##."]),
    ('P', ["###.", "#..#", "#..#", "###.", "#...", "#...", "#..."]),
    ('Q', [".##.", "#..#", "#..#", "#..#", "#.##", "#..#", ".##.#"]),
    ('R', ["###.", "#..#", "#..#", "###.", "##..", "#.#.", "#..#"]),
    ('S', [".###", "#...", "#...", ".##.", "...#", "...#", "###."]),
    ('T', ["#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."]),
    ('U', ["#..#", "#..#", "#..#", "#..#", "#..#", "#..#", ".##."]),
    ('V', ["#...#", "#...#", "#...#", ".#.#.", ".#.#.", ".#.#.", "..#.."]),
    ('W', ["#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"]),
    ('X', ["#...#", ".#.#.", ".#.#.", "..#..", ".#.#.", ".#.#.", "#...#"]),
    ('Y', ["#...#", ".#.#.", ".#.#.", "..#..", "..#..", "..#..", "..#.."]),
    ('Z', ["####", "...#", "..#.", ".#..", ".#..", "#...", "####"]),
    ('a', ["....", "....", ".##.", "...#", ".###", "#..#", ".###"]),
    ('b', ["#...", "#...", "###.", "#..#", "#..#", "#..#", "###."]),
    ('c', ["...", "...", ".##", "#..", "#..", "#..", ".##"]),
    ('d', ["...#", "...#", ".###", "#..#", "#..#", "#..#", ".###"]),
    ('e', ["....", "....", ".##.", "#..#", "####", "#...", ".###"]),
    ('f', ["..#", ".#.", "###", ".#.", ".#.", ".#.", ".#."]),
    ('g', ["....", ".###", "#..#", "#..#", ".###", "...#", ".##."]),
    ('h', ["#...", "#...", "###.", "#..#", "#..#", "#..#", "#..#"]),
    ('i', [".", "#", ".", "#", "#", "#", "#"]),
    ('j', ["..#", "...", "..#", "..#", "..#", "#.#", ".#."]),
    ('k', ["#..", "#..", "#.#", "##.", "#..", "##.", "#.#"]),
    ('l', ["#.", "#.", "#.", "#.", "#.", "#.", ".#"]),
    ('m', [".....", ".....", "##.#.", "#.#.#", "#.#.#", "#.#.#", "#.#.#"]),
    ('n', ["....", "....", "###.", "#..#", "#..#", "#..#", "#..#"]),
    ('o', ["....", "....", ".##.", "#..#", "#..#", "#..#", ".##."]),
    ('p', ["....", "###.", "#..#", "#..#", "###.", "#...", "#..."]),
    ('q', ["....", ".###", "#..#", "#..#", ".###", "...#", "...#"]),
    ('r', ["...", "...", "#.#", "##.", "#..", "#..", "#.."]),
    ('s', ["....", "....", ".###", "#...", ".##.", "...#", "###."]),
    ('t', [".#.", ".#.", "###", ".#.", ".#.", ".#.", "..#"]),
    ('u', ["....", "....", "#..#", "#..#", "#..#", "#..#", ".###"]),
    ('v', [".....", ".....", "#...#", "#...#", ".#.#.", ".#.#.", "..#.."]),
    ('w', [".....", ".....", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."]),
    ('x', ["....", "....", "#..#", ".##.", ".##.", ".##.", "#..#"]),
    ('y', ["....", "#..#", "#..#", "#..#", ".###", "...#", ".##."]),
    ('z', ["....", "....", "####", "..#.", ".#..", "#...", "####"]),
];
