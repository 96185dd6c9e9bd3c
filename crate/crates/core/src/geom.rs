//! Small planar helpers shared by the raster and curve code.

use serde::{Deserialize, Serialize};

/// Axis-aligned box in Log coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Window { x_min, x_max, y_min, y_max }
    }

    pub fn square(half: f64) -> Self {
        Window::new(-half, half, -half, half)
    }

    pub fn centered(c: [f64; 2], half: f64) -> Self {
        Window::new(c[0] - half, c[0] + half, c[1] - half, c[1] + half)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn is_valid(&self) -> bool {
        self.width() > 0.0 && self.height() > 0.0 && [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite())
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    pub fn scaled(&self, h: f64) -> Window {
        Window::new(self.x_min * h, self.x_max * h, self.y_min * h, self.y_max * h)
    }

    /// Clips the segment `p + s·d`, `s ∈ [s0, s1]`, to the box (Liang–Barsky).
    pub fn clip(&self, p: [f64; 2], d: [f64; 2], s0: f64, s1: f64) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (s0, s1);
        let checks = [
            (-d[0], p[0] - self.x_min),
            (d[0], self.x_max - p[0]),
            (-d[1], p[1] - self.y_min),
            (d[1], self.y_max - p[1]),
        ];
        for (q, r) in checks {
            if q == 0.0 {
                if r < 0.0 {
                    return None;
                }
            } else {
                let s = r / q;
                if q < 0.0 {
                    lo = lo.max(s);
                } else {
                    hi = hi.min(s);
                }
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// Points along `p + s·d` for `s ∈ [s0, s1]` with at most `spacing` between
/// consecutive samples, endpoints included.
pub fn sample_segment(p: [f64; 2], d: [f64; 2], s0: f64, s1: f64, spacing: f64, out: &mut Vec<[f64; 2]>) {
    let len = (s1 - s0) * (d[0] * d[0] + d[1] * d[1]).sqrt();
    let k = ((len / spacing).ceil() as usize).max(1);
    for i in 0..=k {
        let s = s0 + (s1 - s0) * i as f64 / k as f64;
        out.push([p[0] + s * d[0], p[1] + s * d[1]]);
    }
}
