//! Synthetic bank-check dataset tooling.
//!
//! The generation pipeline runs signature extraction ([`sheets`]), ink
//! recoloring and placement ([`inkaug`]), check composition ([`composer`])
//! and COCO serialization ([`cocoio`]). [`morphology`] provides the
//! dark-stroke dilation used as detector preprocessing and [`evaluator`]
//! scores prediction files against ground truth.

pub mod cocoio;
pub mod composer;
pub mod config;
pub mod demo;
pub mod evaluator;
pub mod geom;
pub mod inkaug;
pub mod morphology;
pub mod pipeline;
pub mod raster;
pub mod seed;
pub mod sheets;

pub use geom::Rect;
pub use raster::{AlphaMap, Mask};
