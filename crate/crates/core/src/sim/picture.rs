use std::fmt;

use thiserror::Error;

use crate::value::{write_quoted, Value};

/// Stand-in for a bitmap: dimensions, a content seed, and any text drawn on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PictureData {
    width: u32,
    height: u32,
    seed: u64,
    overlays: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("BAD_DIMENSIONS: picture must be at least 1x1, got {width}x{height}")]
pub struct BadDimensions {
    pub width: u32,
    pub height: u32,
}

impl BadDimensions {
    pub fn code(&self) -> &'static str {
        "BAD_DIMENSIONS"
    }
}

impl PictureData {
    pub fn new(width: u32, height: u32, seed: u64) -> Result<Self, BadDimensions> {
        Self::with_overlays(width, height, seed, Vec::new())
    }

    pub fn with_overlays(
        width: u32,
        height: u32,
        seed: u64,
        overlays: Vec<String>,
    ) -> Result<Self, BadDimensions> {
        if width == 0 || height == 0 {
            return Err(BadDimensions { width, height });
        }
        Ok(PictureData {
            width,
            height,
            seed,
            overlays,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn overlays(&self) -> &[String] {
        &self.overlays
    }

    /// Copy of this picture with `text` drawn on top.
    pub fn overlay(&self, text: impl Into<String>) -> PictureData {
        let mut p = self.clone();
        p.overlays.push(text.into());
        p
    }
}

impl fmt::Display for PictureData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "picture({}x{},seed={}",
            self.width, self.height, self.seed
        )?;
        if !self.overlays.is_empty() {
            f.write_str(",overlays=[")?;
            for (i, o) in self.overlays.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write_quoted(f, o)?;
            }
            f.write_str("]")?;
        }
        f.write_str(")")
    }
}

pub fn make_picture(width: u32, height: u32, seed: u64) -> Result<Value, BadDimensions> {
    PictureData::new(width, height, seed).map(Value::Picture)
}

pub fn overlay(p: &PictureData, text: impl Into<String>) -> PictureData {
    p.overlay(text)
}
