//! Binary PGM/PPM output for grid histograms and membership masks.
//!
//! Images are `g x g`, one pixel per cell. Row 0 of the image is the top
//! row `y` near 1, column 0 is `x` near 0, so the picture reads like the
//! unit square drawn with the usual axes.

use std::path::Path;

use num_bigint::BigUint;

use crate::arith::{Rat, TorusPoint};
use crate::construct::{in_rhombus_set, RhombusSet};
use crate::error::{Error, Result};

/// Largest supported image side.
pub const MAX_SIDE: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    /// `P5` grayscale.
    Pgm,
    /// `P6` color, written with equal channels.
    Ppm,
}

impl ImageFormat {
    /// Picks the format from a `.pgm` or `.ppm` extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("pgm") => Ok(ImageFormat::Pgm),
            Some("ppm") => Ok(ImageFormat::Ppm),
            _ => Err(Error::precondition(format!(
                "image path `{}` must end in .pgm or .ppm",
                path.display()
            ))),
        }
    }
}

/// Intensities `floor(255 count / max)`, rows flipped so that row 0 is the
/// top of the square. An all-zero histogram is black.
pub fn intensities(counts: &[u64], g: u32) -> Result<Vec<u8>> {
    if g == 0 || g > MAX_SIDE {
        return Err(Error::precondition(format!("image side {g} outside 1..={MAX_SIDE}")));
    }
    let g = g as usize;
    if counts.len() != g * g {
        return Err(Error::precondition("histogram is not g x g"));
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let mut out = Vec::with_capacity(g * g);
    for row in 0..g {
        let j = g - 1 - row;
        for i in 0..g {
            let c = counts[j * g + i];
            let v = if max == 0 {
                0
            } else {
                (255 * u128::from(c) / u128::from(max)) as u8
            };
            out.push(v);
        }
    }
    Ok(out)
}

/// Full file contents for a heatmap.
pub fn encode_heatmap(counts: &[u64], g: u32, format: ImageFormat) -> Result<Vec<u8>> {
    let pixels = intensities(counts, g)?;
    let magic = match format {
        ImageFormat::Pgm => "P5",
        ImageFormat::Ppm => "P6",
    };
    let mut out = format!("{magic}\n# row 0 is y=1, column 0 is x=0\n{g} {g}\n255\n").into_bytes();
    match format {
        ImageFormat::Pgm => out.extend_from_slice(&pixels),
        ImageFormat::Ppm => out.extend(pixels.iter().flat_map(|&p| [p, p, p])),
    }
    Ok(out)
}

/// Writes a `g x g` histogram as PGM or PPM, chosen by the file extension.
pub fn render_heatmap(counts: &[u64], g: u32, path: &Path) -> Result<()> {
    let bytes = encode_heatmap(counts, g, ImageFormat::from_path(path)?)?;
    std::fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Cells whose center lies in `E` get weight 0 and the rest weight 1, so the
/// heatmap draws `E` black on white.
pub fn rhombus_mask(e: &RhombusSet, g: u32) -> Vec<u64> {
    let two_g = BigUint::from(2 * u64::from(g));
    let center = |k: u32| Rat::from_big_rational(&num_rational::BigRational::new(
        (2 * i64::from(k) + 1).into(),
        two_g.clone().into(),
    ));
    let mut out = Vec::with_capacity((g * g) as usize);
    for j in 0..g {
        let y = center(j);
        for i in 0..g {
            let p = TorusPoint::exact(center(i), y.clone());
            out.push(u64::from(!in_rhombus_set(e, &p).is_inside()));
        }
    }
    out
}
