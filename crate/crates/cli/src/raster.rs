//! Heatmaps of sweep grids as binary PPM (`P6`) or PGM (`P5`) images.
//!
//! Lattice point `(i, j)` becomes pixel column `i`, row `height - 1 - j`, so
//! the `y` parameter grows upward. Curve overlays are drawn as one-pixel
//! Bresenham polylines in `(rho, mu)` coordinates.

use std::io::{self, Write};

use saddlefocus::{Cell, CurveKind, CurveSet, Param, SweepGrid};

use crate::colormap::{self, Colormap, Rgb};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Pgm,
}

impl ImageFormat {
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "ppm" => Some(ImageFormat::Ppm),
            "pgm" => Some(ImageFormat::Pgm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("overlay curves live in the (rho, mu) plane but the grid spans ({x}, {y})")]
pub struct AxisMismatch {
    pub x: &'static str,
    pub y: &'static str,
}

impl Image {
    fn set(&mut self, px: i64, py: i64, c: Rgb) {
        if px >= 0 && py >= 0 && (px as usize) < self.width && (py as usize) < self.height {
            let at = py as usize * self.width + px as usize;
            self.pixels[at] = c;
        }
    }

    pub fn write<W: Write>(&self, format: ImageFormat, mut w: W) -> io::Result<()> {
        let mut out = Vec::with_capacity(32 + 3 * self.pixels.len());
        match format {
            ImageFormat::Ppm => {
                out.extend_from_slice(format!("P6\n{} {}\n255\n", self.width, self.height).as_bytes());
                for p in &self.pixels {
                    out.extend_from_slice(p);
                }
            }
            ImageFormat::Pgm => {
                out.extend_from_slice(format!("P5\n{} {}\n255\n", self.width, self.height).as_bytes());
                out.extend(self.pixels.iter().map(|&p| luma(p)));
            }
        }
        w.write_all(&out)?;
        w.flush()
    }

    pub fn to_bytes(&self, format: ImageFormat) -> Vec<u8> {
        let mut out = Vec::new();
        self.write(format, &mut out).expect("writing to a Vec cannot fail");
        out
    }
}

/// Integer Rec. 601 luma; exact on gray pixels.
pub fn luma([r, g, b]: Rgb) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Value range mapped onto the colour table when `--clip` is not given:
/// the finite extent of the data, made symmetric about zero for the
/// diverging map so that white sits at zero.
pub fn auto_clip(grid: &SweepGrid, cmap: Colormap) -> (f64, f64) {
    let (lo, hi) = grid
        .values
        .iter()
        .filter_map(|&v| Cell::decode(v).value())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return (0.0, 1.0);
    }
    match cmap {
        Colormap::Diverging => {
            let m = lo.abs().max(hi.abs());
            if m == 0.0 {
                (-1.0, 1.0)
            } else {
                (-m, m)
            }
        }
        _ if lo == hi => (lo - 0.5, hi + 0.5),
        _ => (lo, hi),
    }
}

pub fn render(grid: &SweepGrid, cmap: Colormap, clip: (f64, f64)) -> Image {
    let (w, h) = (grid.x_axis.count, grid.y_axis.count);
    let (lo, hi) = clip;
    let span = hi - lo;
    let mut pixels = vec![[0u8; 3]; w * h];
    for j in 0..h {
        let row = h - 1 - j;
        for i in 0..w {
            pixels[row * w + i] = match grid.cell(i, j) {
                Cell::Value(v) => cmap.at(if span > 0.0 { (v - lo) / span } else { 0.5 }),
                Cell::Diverged => colormap::DIVERGED,
                Cell::ReachedZero => colormap::REACHED_ZERO,
                Cell::Undefined => colormap::UNDEFINED,
            };
        }
    }
    Image { width: w, height: h, pixels }
}

/// Overlay colour per curve family.
pub fn curve_colour(kind: CurveKind) -> Rgb {
    match kind {
        CurveKind::GammaG => [0, 170, 0],
        CurveKind::GammaP => [150, 0, 170],
        CurveKind::BelyakovExplicit | CurveKind::BelyakovImplicit => [20, 20, 20],
        CurveKind::HomoclinicOrder => [255, 200, 0],
    }
}

/// Draw every polyline of `set` onto `img`, which must have been rendered
/// from `grid`.
pub fn overlay(img: &mut Image, grid: &SweepGrid, set: &CurveSet) -> Result<(), AxisMismatch> {
    let swapped = match (grid.x_axis.param, grid.y_axis.param) {
        (Param::Rho, Param::Mu) => false,
        (Param::Mu, Param::Rho) => true,
        (x, y) => return Err(AxisMismatch { x: x.as_str(), y: y.as_str() }),
    };
    let (xa, ya) = (grid.x_axis, grid.y_axis);
    let (w, h) = (img.width as f64, img.height as f64);
    let to_px = |(rho, mu): (f64, f64)| {
        let (x, y) = if swapped { (mu, rho) } else { (rho, mu) };
        ((x - xa.min) / (xa.max - xa.min) * (w - 1.0), (ya.max - y) / (ya.max - ya.min) * (h - 1.0))
    };
    for c in &set.curves {
        let colour = curve_colour(c.label.kind);
        let px: Vec<(f64, f64)> = c.points.iter().copied().map(to_px).collect();
        if let [only] = px.as_slice() {
            img.set(only.0.round() as i64, only.1.round() as i64, colour);
        }
        for seg in px.windows(2) {
            if let Some((a, b)) = clip_segment(seg[0], seg[1], (-0.5, -0.5), (w - 0.5, h - 0.5)) {
                line(img, (a.0.round() as i64, a.1.round() as i64), (b.0.round() as i64, b.1.round() as i64), colour);
            }
        }
    }
    Ok(())
}

/// Clip a segment to an axis-aligned box by sliding each end onto the box
/// edges it lies beyond. Intersections are computed from the edge value
/// directly, so segments whose far ends sit at +-1e300 still clip exactly.
fn clip_segment(a: (f64, f64), b: (f64, f64), min: (f64, f64), max: (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    if ![a.0, a.1, b.0, b.1].iter().all(|v| v.is_finite()) {
        return None;
    }
    Some((clip_end(a, b, min, max)?, clip_end(b, a, min, max)?))
}

fn clip_end(mut a: (f64, f64), b: (f64, f64), min: (f64, f64), max: (f64, f64)) -> Option<(f64, f64)> {
    // Slide along x to `edge`, keeping the point on the segment.
    let on_x = |a: (f64, f64), edge: f64| (edge, a.1 + (b.1 - a.1) * ((edge - a.0) / (b.0 - a.0)));
    let on_y = |a: (f64, f64), edge: f64| (a.0 + (b.0 - a.0) * ((edge - a.1) / (b.1 - a.1)), edge);
    for _ in 0..4 {
        a = if a.0 < min.0 && b.0 >= min.0 {
            on_x(a, min.0)
        } else if a.0 > max.0 && b.0 <= max.0 {
            on_x(a, max.0)
        } else if a.1 < min.1 && b.1 >= min.1 {
            on_y(a, min.1)
        } else if a.1 > max.1 && b.1 <= max.1 {
            on_y(a, max.1)
        } else {
            break;
        };
    }
    const SLACK: f64 = 1e-9;
    let inside = a.0 >= min.0 - SLACK && a.0 <= max.0 + SLACK && a.1 >= min.1 - SLACK && a.1 <= max.1 + SLACK;
    inside.then_some(a)
}

fn line(img: &mut Image, (mut x0, mut y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb) {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        img.set(x0, y0, c);
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use saddlefocus::sweep::sentinel;
    use saddlefocus::{AxisSpec, Curve, CurveLabel, FieldKind, FieldSpec, MapParams};

    fn grid(values: Vec<f64>, w: usize, h: usize) -> SweepGrid {
        SweepGrid {
            x_axis: AxisSpec::new(Param::Rho, 0.0, 1.0, w).unwrap(),
            y_axis: AxisSpec::new(Param::Mu, 0.0, 1.0, h).unwrap(),
            field: FieldSpec::new(FieldKind::IterateValue(1), MapParams::symmetric(0.5, 0.1, 3.6).unwrap()),
            values,
        }
    }

    #[test]
    fn y_grows_upward_and_sentinels_have_fixed_colours() {
        let g = grid(vec![sentinel::DIVERGED, sentinel::REACHED_ZERO, sentinel::UNDEFINED, 1.0], 2, 2);
        let img = render(&g, Colormap::Grayscale, (0.0, 1.0));
        // Bottom row holds j = 0.
        assert_eq!(img.pixels, vec![colormap::UNDEFINED, [255; 3], colormap::DIVERGED, colormap::REACHED_ZERO]);
    }

    #[test]
    fn file_headers() {
        let g = grid(vec![0.0, 0.5, 1.0, 0.25], 2, 2);
        let img = render(&g, Colormap::Grayscale, (0.0, 1.0));
        let ppm = img.to_bytes(ImageFormat::Ppm);
        assert!(ppm.starts_with(b"P6\n2 2\n255\n"));
        assert_eq!(ppm.len(), 11 + 12);
        let pgm = img.to_bytes(ImageFormat::Pgm);
        assert_eq!(pgm, b"P5\n2 2\n255\n\xff\x40\x00\x80".to_vec());
    }

    #[test]
    fn diverging_clip_is_centred() {
        let g = grid(vec![-0.2, 0.5, sentinel::DIVERGED, 0.1], 2, 2);
        assert_eq!(auto_clip(&g, Colormap::Diverging), (-0.5, 0.5));
        assert_eq!(auto_clip(&g, Colormap::Linear), (-0.2, 0.5));
        let all = grid(vec![sentinel::UNDEFINED; 4], 2, 2);
        assert_eq!(auto_clip(&all, Colormap::Linear), (0.0, 1.0));
    }

    #[test]
    fn overlay_draws_connected_pixels() {
        let g = grid(vec![0.0; 100], 10, 10);
        let mut img = render(&g, Colormap::Grayscale, (-1.0, 1.0));
        let set = CurveSet {
            curves: vec![Curve { label: CurveLabel { kind: CurveKind::GammaG, index: None }, points: vec![(0.0, 0.0), (1.0, 1.0)] }],
        };
        overlay(&mut img, &g, &set).unwrap();
        let green = curve_colour(CurveKind::GammaG);
        for k in 0..10 {
            assert_eq!(img.pixels[(9 - k) * 10 + k], green);
        }
        assert_eq!(img.pixels.iter().filter(|&&p| p == green).count(), 10);
    }

    #[test]
    fn overlay_clips_far_away_points() {
        let g = grid(vec![0.0; 16], 4, 4);
        let mut img = render(&g, Colormap::Grayscale, (-1.0, 1.0));
        let set = CurveSet {
            curves: vec![Curve {
                label: CurveLabel { kind: CurveKind::GammaP, index: None },
                points: vec![(-1e300, 0.5), (1e300, 0.5), (5.0, 5.0)],
            }],
        };
        overlay(&mut img, &g, &set).unwrap();
        assert_eq!(img.pixels.iter().filter(|&&p| p == curve_colour(CurveKind::GammaP)).count(), 4);
    }

    #[test]
    fn clipping_cases() {
        let (lo, hi) = ((0.0, 0.0), (10.0, 10.0));
        assert_eq!(clip_segment((-5.0, 5.0), (15.0, 5.0), lo, hi), Some(((0.0, 5.0), (10.0, 5.0))));
        assert_eq!(clip_segment((-10.0, -10.0), (20.0, 20.0), lo, hi), Some(((0.0, 0.0), (10.0, 10.0))));
        assert_eq!(clip_segment((2.0, 3.0), (4.0, 5.0), lo, hi), Some(((2.0, 3.0), (4.0, 5.0))));
        // Passes beside the box corner.
        assert_eq!(clip_segment((-5.0, 8.0), (5.0, 18.0), lo, hi), None);
        assert_eq!(clip_segment((-5.0, -1.0), (15.0, -1.0), lo, hi), None);
        assert_eq!(clip_segment((f64::NAN, 1.0), (1.0, 1.0), lo, hi), None);
    }

    #[test]
    fn overlay_needs_rho_mu_axes() {
        let mut g = grid(vec![0.0; 4], 2, 2);
        g.y_axis = AxisSpec::new(Param::Omega, 1.0, 2.0, 2).unwrap();
        let mut img = render(&g, Colormap::Linear, (0.0, 1.0));
        assert!(overlay(&mut img, &g, &CurveSet::default()).is_err());
    }
}
