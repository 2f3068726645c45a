use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PointCloud;
use crate::par;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Viewport {
    pub center: [f64; 2],
    pub half_width: f64,
    pub half_height: f64,
    pub pixels_x: u32,
    pub pixels_y: u32,
}

impl Viewport {
    /// Square viewport.
    pub fn square(center: Complex64, half_width: f64, pixels: u32) -> Self {
        Viewport {
            center: [center.re, center.im],
            half_width,
            half_height: half_width,
            pixels_x: pixels,
            pixels_y: pixels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = self.half_width > 0.0
            && self.half_height > 0.0
            && self.half_width.is_finite()
            && self.half_height.is_finite();
        if !positive || self.pixels_x == 0 || self.pixels_y == 0 {
            return Err(Error::InvalidArgument("viewport sizes must be positive".into()));
        }
        if !(self.center[0].is_finite() && self.center[1].is_finite()) {
            return Err(Error::InvalidArgument("viewport center must be finite".into()));
        }
        let pixel_aspect = self.pixels_y as f64 / self.pixels_x as f64;
        let aspect = self.half_height / self.half_width;
        if (pixel_aspect / aspect - 1.0).abs() > 0.01 {
            return Err(Error::InvalidArgument(format!(
                "pixel aspect {pixel_aspect} does not match viewport aspect {aspect}"
            )));
        }
        Ok(())
    }

    /// Width of one pixel in the plane.
    pub fn pixel_pitch(&self) -> f64 {
        2.0 * self.half_width / self.pixels_x as f64
    }

    /// `(row, col)` of the pixel containing `z`, row 0 at the top.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let fx = (z.re - (self.center[0] - self.half_width)) / (2.0 * self.half_width);
        let fy = ((self.center[1] + self.half_height) - z.im) / (2.0 * self.half_height);
        if !(0.0..1.0).contains(&fx) || !(0.0..1.0).contains(&fy) {
            return None;
        }
        let col = ((fx * self.pixels_x as f64) as usize).min(self.pixels_x as usize - 1);
        let row = ((fy * self.pixels_y as f64) as usize).min(self.pixels_y as usize - 1);
        Some((row, col))
    }

    /// Plane coordinate of a pixel center.
    pub fn pixel_center(&self, row: usize, col: usize) -> Complex64 {
        let pitch_x = 2.0 * self.half_width / self.pixels_x as f64;
        let pitch_y = 2.0 * self.half_height / self.pixels_y as f64;
        Complex64::new(
            self.center[0] - self.half_width + (col as f64 + 0.5) * pitch_x,
            self.center[1] + self.half_height - (row as f64 + 0.5) * pitch_y,
        )
    }
}

/// Hit-count raster, row-major with row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub counts: Vec<u32>,
    /// Points that fell outside the viewport.
    pub outside: usize,
}

impl Image {
    pub fn nonzero_pixels(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn count(&self, row: usize, col: usize) -> u32 {
        self.counts[row * self.width as usize + col]
    }

    /// Log-scaled 8-bit intensities; any hit maps to at least 1.
    pub fn to_gray8(&self) -> Vec<u8> {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        if max == 0 {
            return vec![0; self.counts.len()];
        }
        let denom = (1.0 + max as f64).ln();
        self.counts
            .iter()
            .map(|&c| {
                if c == 0 {
                    0
                } else {
                    ((255.0 * (1.0 + c as f64).ln() / denom).round() as u8).max(1)
                }
            })
            .collect()
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        let img = image::GrayImage::from_raw(self.width, self.height, self.to_gray8())
            .ok_or_else(|| Error::Io("raster size mismatch".into()))?;
        img.save_with_format(path, image::ImageFormat::Png)?;
        Ok(())
    }
}

pub fn rasterize(cloud: &PointCloud, vp: &Viewport) -> Result<Image> {
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    vp.validate()?;
    let (w, h) = (vp.pixels_x as usize, vp.pixels_y as usize);
    let pixels: Vec<Option<(usize, usize)>> = par::map(&cloud.points, |&z| vp.pixel_of(z));
    let outside = pixels.iter().filter(|p| p.is_none()).count();

    // bucket columns by row so rows can be filled independently
    let mut row_start = vec![0usize; h + 1];
    for &(r, _) in pixels.iter().flatten() {
        row_start[r + 1] += 1;
    }
    for r in 0..h {
        row_start[r + 1] += row_start[r];
    }
    let mut cursor = row_start.clone();
    let mut cols = vec![0u32; row_start[h]];
    for &(r, c) in pixels.iter().flatten() {
        cols[cursor[r]] = c as u32;
        cursor[r] += 1;
    }

    let mut counts = vec![0u32; w * h];
    par::for_each_chunk_mut(&mut counts, w, |r, row| {
        for &c in &cols[row_start[r]..row_start[r + 1]] {
            row[c as usize] += 1;
        }
    });
    Ok(Image { width: vp.pixels_x, height: vp.pixels_y, counts, outside })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_lights_one_pixel() {
        let vp = Viewport::square(Complex64::new(0.0, 0.0), 1.0, 64);
        let img = rasterize(&PointCloud::from_points(vec![Complex64::new(0.0, 0.0)]), &vp).unwrap();
        assert_eq!(img.nonzero_pixels(), 1);
        assert_eq!(img.outside, 0);
    }

    #[test]
    fn cloud_outside_viewport_is_blank() {
        let vp = Viewport::square(Complex64::new(0.0, 0.0), 1.0, 16);
        let pts = vec![Complex64::new(5.0, 0.0), Complex64::new(0.0, -3.0)];
        let img = rasterize(&PointCloud::from_points(pts), &vp).unwrap();
        assert_eq!(img.nonzero_pixels(), 0);
        assert_eq!(img.outside, 2);
        assert!(img.to_gray8().iter().all(|&v| v == 0));
    }

    #[test]
    fn empty_cloud_is_an_error() {
        let vp = Viewport::square(Complex64::new(0.0, 0.0), 1.0, 16);
        assert_eq!(rasterize(&PointCloud::from_points(vec![]), &vp), Err(Error::EmptyCloud));
    }

    #[test]
    fn degenerate_viewports_are_rejected() {
        let mut vp = Viewport::square(Complex64::new(0.0, 0.0), 0.0, 16);
        assert!(vp.validate().is_err());
        vp.half_width = 1.0;
        vp.pixels_y = 32;
        assert!(vp.validate().is_err(), "aspect mismatch");
    }

    #[test]
    fn orientation_top_row_is_positive_imaginary() {
        let vp = Viewport::square(Complex64::new(0.0, 0.0), 1.0, 4);
        assert_eq!(vp.pixel_of(Complex64::new(-0.9, 0.9)), Some((0, 0)));
        assert_eq!(vp.pixel_of(Complex64::new(0.9, -0.9)), Some((3, 3)));
        let c = vp.pixel_center(0, 0);
        assert!((c - Complex64::new(-0.75, 0.75)).norm() < 1e-15);
    }
}
