//! Ink color sampling, signature recoloring and placement inside a field
//! region.

mod placement;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::AlphaMap;
use crate::sheets::SignatureSample;

pub use placement::{apply_placement, fitting_scale, sample_placement, Placement};

#[derive(Debug, Error, PartialEq)]
pub enum InkError {
    #[error("ink weights must be non-negative, {name} has {weight}")]
    NegativeWeight { name: InkName, weight: f64 },
    #[error("ink weights sum to {0}, expected 1")]
    BadTotal(f64),
    #[error("ink distribution has no weight for {0}")]
    MissingWeight(InkName),
    #[error("signature mask is empty")]
    EmptyMask,
    #[error(
        "signature {sig_w}x{sig_h} cannot fit {region_w}x{region_h} region at scale {lo}; \
         largest fitting scale is {max_fit}"
    )]
    DoesNotFit {
        sig_w: u32,
        sig_h: u32,
        region_w: u32,
        region_h: u32,
        lo: f64,
        max_fit: f64,
    },
    #[error("invalid scale range [{lo}, {hi}]")]
    BadScaleRange { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InkName {
    Black,
    DarkGray,
    DarkBlue,
    Red,
    Green,
}

impl InkName {
    pub const ALL: [InkName; 5] = [
        InkName::Black,
        InkName::DarkGray,
        InkName::DarkBlue,
        InkName::Red,
        InkName::Green,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InkName::Black => "black",
            InkName::DarkGray => "dark_gray",
            InkName::DarkBlue => "dark_blue",
            InkName::Red => "red",
            InkName::Green => "green",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for InkName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InkName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InkName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown ink {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InkColor {
    pub name: InkName,
    pub rgb: [u8; 3],
}

/// Name → RGB mapping. Total over [`InkName::ALL`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "BTreeMap<InkName, [u8; 3]>", into = "BTreeMap<InkName, [u8; 3]>")]
pub struct InkPalette {
    rgb: [[u8; 3]; 5],
}

impl Default for InkPalette {
    fn default() -> Self {
        InkPalette {
            rgb: [
                [20, 20, 20],
                [90, 90, 90],
                [20, 30, 110],
                [170, 30, 30],
                [25, 100, 50],
            ],
        }
    }
}

impl InkPalette {
    pub fn color(&self, name: InkName) -> InkColor {
        InkColor {
            name,
            rgb: self.rgb[name.index()],
        }
    }

    pub fn set(&mut self, name: InkName, rgb: [u8; 3]) {
        self.rgb[name.index()] = rgb;
    }
}

// Partial maps override the defaults, so the palette stays total.
impl From<BTreeMap<InkName, [u8; 3]>> for InkPalette {
    fn from(m: BTreeMap<InkName, [u8; 3]>) -> Self {
        let mut p = InkPalette::default();
        for (name, rgb) in m {
            p.set(name, rgb);
        }
        p
    }
}

impl From<InkPalette> for BTreeMap<InkName, [u8; 3]> {
    fn from(p: InkPalette) -> Self {
        InkName::ALL.into_iter().map(|n| (n, p.rgb[n.index()])).collect()
    }
}

/// Categorical distribution over ink names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<InkName, f64>", into = "BTreeMap<InkName, f64>")]
pub struct InkDistribution {
    weights: [f64; 5],
}

pub const WEIGHT_TOLERANCE: f64 = 1e-9;

impl InkDistribution {
    /// Weights in [`InkName::ALL`] order.
    pub fn new(weights: [f64; 5]) -> Result<Self, InkError> {
        for (name, &w) in InkName::ALL.iter().zip(&weights) {
            if !(w >= 0.0) {
                return Err(InkError::NegativeWeight {
                    name: *name,
                    weight: w,
                });
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(InkError::BadTotal(total));
        }
        Ok(InkDistribution { weights })
    }

    /// 0.2 black, 0.2 dark gray, 0.3 dark blue, 0.2 red, 0.1 green.
    pub fn reference() -> Self {
        InkDistribution {
            weights: [0.2, 0.2, 0.3, 0.2, 0.1],
        }
    }

    pub fn weight(&self, name: InkName) -> f64 {
        self.weights[name.index()]
    }

    pub fn weights(&self) -> [f64; 5] {
        self.weights
    }
}

impl Default for InkDistribution {
    fn default() -> Self {
        InkDistribution::reference()
    }
}

impl TryFrom<BTreeMap<InkName, f64>> for InkDistribution {
    type Error = InkError;

    fn try_from(m: BTreeMap<InkName, f64>) -> Result<Self, Self::Error> {
        let mut w = [0.0; 5];
        for name in InkName::ALL {
            w[name.index()] = *m.get(&name).ok_or(InkError::MissingWeight(name))?;
        }
        InkDistribution::new(w)
    }
}

impl From<InkDistribution> for BTreeMap<InkName, f64> {
    fn from(d: InkDistribution) -> Self {
        InkName::ALL.into_iter().map(|n| (n, d.weights[n.index()])).collect()
    }
}

/// Draws one ink. Consumes exactly one `f64` from `rng`.
pub fn sample_ink<R: Rng + ?Sized>(
    dist: &InkDistribution,
    palette: &InkPalette,
    rng: &mut R,
) -> InkColor {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    let mut last_positive = InkName::Black;
    for name in InkName::ALL {
        let w = dist.weight(name);
        if w <= 0.0 {
            continue;
        }
        last_positive = name;
        cum += w;
        if u < cum {
            return palette.color(name);
        }
    }
    // Rounding left the cumulative sum a hair under 1.
    palette.color(last_positive)
}

/// Solid-ink layer: opacity is 1 on the signature mask and 0 elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureLayer {
    pub color: InkColor,
    pub alpha: AlphaMap,
}

impl SignatureLayer {
    pub fn dimensions(&self) -> (u32, u32) {
        self.alpha.dimensions()
    }
}

pub fn recolor(sample: &SignatureSample, ink: InkColor) -> Result<SignatureLayer, InkError> {
    if sample.mask().count_ink() == 0 {
        return Err(InkError::EmptyMask);
    }
    Ok(SignatureLayer {
        color: ink,
        alpha: AlphaMap::from_mask(sample.mask()),
    })
}
