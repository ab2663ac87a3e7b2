//! Fixed 256-entry colour tables.
//!
//! Each table is a piecewise-linear ramp through the anchors listed below,
//! evaluated once at compile time with integer rounding, so a given index
//! always produces the same bytes.
//!
//! | name        | anchors (index: r, g, b)                                          |
//! |-------------|-------------------------------------------------------------------|
//! | `diverging` | 0: 59,76,192 · 128: 247,247,247 · 255: 180,4,38                   |
//! | `linear`    | 0: 68,1,84 · 85: 59,82,139 · 170: 33,145,140 · 255: 253,231,37    |
//! | `grayscale` | 0: 0,0,0 · 255: 255,255,255                                       |
//!
//! Sentinel cells bypass the table: black for diverged orbits, white for
//! orbits that reached the origin, mid-gray for undefined cells.

use std::fmt;
use std::str::FromStr;

pub type Rgb = [u8; 3];

pub const DIVERGED: Rgb = [0, 0, 0];
pub const REACHED_ZERO: Rgb = [255, 255, 255];
pub const UNDEFINED: Rgb = [128, 128, 128];

const fn ramp(anchors: &[(usize, Rgb)]) -> [Rgb; 256] {
    let mut table = [[0u8; 3]; 256];
    let mut a = 0;
    while a + 1 < anchors.len() {
        let (i0, c0) = anchors[a];
        let (i1, c1) = anchors[a + 1];
        let mut i = i0;
        while i <= i1 {
            let mut ch = 0;
            while ch < 3 {
                let (lo, hi) = (c0[ch] as i32, c1[ch] as i32);
                let span = (i1 - i0) as i32;
                let num = (hi - lo) * (i - i0) as i32;
                // Round half away from zero.
                let step = if num >= 0 { (2 * num + span) / (2 * span) } else { -((-2 * num + span) / (2 * span)) };
                table[i][ch] = (lo + step) as u8;
                ch += 1;
            }
            i += 1;
        }
        a += 1;
    }
    table
}

pub static DIVERGING: [Rgb; 256] = ramp(&[(0, [59, 76, 192]), (128, [247, 247, 247]), (255, [180, 4, 38])]);
pub static LINEAR: [Rgb; 256] =
    ramp(&[(0, [68, 1, 84]), (85, [59, 82, 139]), (170, [33, 145, 140]), (255, [253, 231, 37])]);
pub static GRAYSCALE: [Rgb; 256] = ramp(&[(0, [0, 0, 0]), (255, [255, 255, 255])]);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Colormap {
    Diverging,
    Linear,
    Grayscale,
}

impl Colormap {
    pub fn table(self) -> &'static [Rgb; 256] {
        match self {
            Colormap::Diverging => &DIVERGING,
            Colormap::Linear => &LINEAR,
            Colormap::Grayscale => &GRAYSCALE,
        }
    }

    /// Colour of `t` in `[0, 1]` (clamped; NaN maps to index 0).
    pub fn at(self, t: f64) -> Rgb {
        let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
        self.table()[(t * 255.0).round() as usize]
    }
}

impl FromStr for Colormap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "diverging" => Ok(Colormap::Diverging),
            "linear" => Ok(Colormap::Linear),
            "grayscale" | "greyscale" => Ok(Colormap::Grayscale),
            other => Err(format!("unknown colormap `{other}` (expected diverging, linear or grayscale)")),
        }
    }
}

impl fmt::Display for Colormap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Colormap::Diverging => "diverging",
            Colormap::Linear => "linear",
            Colormap::Grayscale => "grayscale",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_are_hit_exactly() {
        assert_eq!(DIVERGING[0], [59, 76, 192]);
        assert_eq!(DIVERGING[128], [247, 247, 247]);
        assert_eq!(DIVERGING[255], [180, 4, 38]);
        assert_eq!(LINEAR[85], [59, 82, 139]);
        assert_eq!(LINEAR[170], [33, 145, 140]);
        for (i, c) in GRAYSCALE.iter().enumerate() {
            assert_eq!(*c, [i as u8; 3]);
        }
    }

    #[test]
    fn ramps_move_monotonically_between_anchors() {
        for w in DIVERGING[..=128].windows(2) {
            assert!(w[1][0] >= w[0][0] && w[1][1] >= w[0][1]);
        }
        for w in DIVERGING[128..].windows(2) {
            assert!(w[1][2] <= w[0][2]);
        }
    }

    #[test]
    fn lookup_clamps() {
        assert_eq!(Colormap::Grayscale.at(-3.0), [0; 3]);
        assert_eq!(Colormap::Grayscale.at(7.0), [255; 3]);
        assert_eq!(Colormap::Grayscale.at(0.5), [128; 3]);
        assert_eq!(Colormap::Grayscale.at(f64::NAN), [0; 3]);
    }
}
