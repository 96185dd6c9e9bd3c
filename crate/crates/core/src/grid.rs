//! Connected-component labeling, distance transforms and dilation on
//! boolean rasters. Row-major, row 0 on top.

use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub pixels: usize,
    pub touches_border: bool,
    /// Smallest pixel index in the region.
    pub first: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labels {
    pub rows: usize,
    pub cols: usize,
    /// Region index per pixel, `None` outside the mask.
    pub label: Vec<Option<u32>>,
    pub regions: Vec<Region>,
}

impl Labels {
    pub fn pixels_of(&self, region: usize) -> Vec<usize> {
        self.label
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == Some(region as u32))
            .map(|(i, _)| i)
            .collect()
    }
}

/// 4-connected components of `mask`. With `wrap`, opposite edges are
/// adjacent (torus) and no region touches the border.
pub fn label_components(mask: &[bool], rows: usize, cols: usize, wrap: bool) -> Labels {
    assert_eq!(mask.len(), rows * cols);
    let mut label = vec![None; mask.len()];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..mask.len() {
        if !mask[start] || label[start].is_some() {
            continue;
        }
        let id = regions.len() as u32;
        let mut region = Region { pixels: 0, touches_border: false, first: start };
        label[start] = Some(id);
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            region.pixels += 1;
            let (r, c) = (p / cols, p % cols);
            if !wrap && (r == 0 || c == 0 || r + 1 == rows || c + 1 == cols) {
                region.touches_border = true;
            }
            for q in neighbours4(r, c, rows, cols, wrap).into_iter().flatten() {
                if mask[q] && label[q].is_none() {
                    label[q] = Some(id);
                    queue.push_back(q);
                }
            }
        }
        regions.push(region);
    }
    Labels { rows, cols, label, regions }
}

fn neighbours4(r: usize, c: usize, rows: usize, cols: usize, wrap: bool) -> [Option<usize>; 4] {
    let up = if r > 0 { Some(r - 1) } else if wrap { Some(rows - 1) } else { None };
    let down = if r + 1 < rows { Some(r + 1) } else if wrap { Some(0) } else { None };
    let left = if c > 0 { Some(c - 1) } else if wrap { Some(cols - 1) } else { None };
    let right = if c + 1 < cols { Some(c + 1) } else if wrap { Some(0) } else { None };
    [
        up.map(|r| r * cols + c),
        down.map(|r| r * cols + c),
        left.map(|c| r * cols + c),
        right.map(|c| r * cols + c),
    ]
}

/// Squared Euclidean distance (in pixels) from every pixel to the nearest
/// pixel where `source` is set; `f64::INFINITY` when there is none.
pub fn distance_transform_sq(source: &[bool], rows: usize, cols: usize) -> Vec<f64> {
    let mut g: Vec<f64> = source.iter().map(|&s| if s { 0.0 } else { f64::INFINITY }).collect();
    let mut buf = vec![0.0; rows.max(cols)];
    for c in 0..cols {
        let col: Vec<f64> = (0..rows).map(|r| g[r * cols + c]).collect();
        edt_1d(&col, &mut buf[..rows]);
        for r in 0..rows {
            g[r * cols + c] = buf[r];
        }
    }
    for r in 0..rows {
        let row = g[r * cols..(r + 1) * cols].to_vec();
        edt_1d(&row, &mut buf[..cols]);
        g[r * cols..(r + 1) * cols].copy_from_slice(&buf[..cols]);
    }
    g
}

/// Lower envelope of parabolas (Felzenszwalb–Huttenlocher).
fn edt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    let finite: Vec<usize> = (0..n).filter(|&i| f[i].is_finite()).collect();
    if finite.is_empty() {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    let mut v: Vec<usize> = Vec::with_capacity(finite.len());
    let mut z: Vec<f64> = Vec::with_capacity(finite.len() + 1);
    for &q in &finite {
        let fq = f[q] + (q * q) as f64;
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    z.clear();
                    z.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
                    if s <= *z.last().unwrap() {
                        v.pop();
                        z.pop();
                    } else {
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
    }
    z.push(f64::INFINITY);
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Pixels within Euclidean distance `radius` of a set pixel, optionally on
/// the torus.
pub fn dilate(mask: &[bool], rows: usize, cols: usize, radius: usize, wrap: bool) -> Vec<bool> {
    let r2 = (radius * radius) as i64;
    let rad = radius as i64;
    let mut out = vec![false; mask.len()];
    for p in 0..mask.len() {
        if !mask[p] {
            continue;
        }
        let (r, c) = ((p / cols) as i64, (p % cols) as i64);
        for dr in -rad..=rad {
            for dc in -rad..=rad {
                if dr * dr + dc * dc > r2 {
                    continue;
                }
                let (mut rr, mut cc) = (r + dr, c + dc);
                if wrap {
                    rr = rr.rem_euclid(rows as i64);
                    cc = cc.rem_euclid(cols as i64);
                } else if rr < 0 || cc < 0 || rr >= rows as i64 || cc >= cols as i64 {
                    continue;
                }
                out[rr as usize * cols + cc as usize] = true;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(rows: &[&str]) -> (Vec<bool>, usize, usize) {
        let cols = rows[0].len();
        (rows.iter().flat_map(|r| r.chars().map(|c| c == '#')).collect(), rows.len(), cols)
    }

    #[test]
    fn four_connectivity_and_border() {
        let (m, r, c) = parse(&["#..#", "#..#", "...#", "##.."]);
        let l = label_components(&m, r, c, false);
        assert_eq!(l.regions.len(), 3);
        assert!(l.regions.iter().all(|g| g.touches_border));
        let (m, r, c) = parse(&[".....", ".##..", ".#...", "....."]);
        let l = label_components(&m, r, c, false);
        assert_eq!(l.regions.len(), 1);
        assert!(!l.regions[0].touches_border);
        assert_eq!(l.regions[0].pixels, 3);
    }

    #[test]
    fn diagonal_pixels_are_separate() {
        let (m, r, c) = parse(&["#.", ".#"]);
        assert_eq!(label_components(&m, r, c, false).regions.len(), 2);
    }

    #[test]
    fn torus_wraps() {
        let (m, r, c) = parse(&["#..#", "....", "....", "#..#"]);
        let l = label_components(&m, r, c, true);
        assert_eq!(l.regions.len(), 1);
        assert_eq!(l.regions[0].pixels, 4);
    }

    #[test]
    fn edt_matches_brute_force() {
        let (m, r, c) = parse(&["#.......", "........", "...#....", "........", ".......#"]);
        let d = distance_transform_sq(&m, r, c);
        for p in 0..m.len() {
            let (pr, pc) = ((p / c) as f64, (p % c) as f64);
            let best = (0..m.len())
                .filter(|&q| m[q])
                .map(|q| ((q / c) as f64 - pr).powi(2) + ((q % c) as f64 - pc).powi(2))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(d[p], best);
        }
        assert!(distance_transform_sq(&[false; 4], 2, 2).iter().all(|v| v.is_infinite()));
    }

    #[test]
    fn dilation_radius() {
        let (m, r, c) = parse(&[".....", ".....", "..#..", ".....", "....."]);
        let d = dilate(&m, r, c, 1, false);
        assert_eq!(d.iter().filter(|&&x| x).count(), 5);
        let d2 = dilate(&m, r, c, 2, false);
        assert_eq!(d2.iter().filter(|&&x| x).count(), 13);
        let (m, r, c) = parse(&["#....", ".....", "....."]);
        let w = dilate(&m, r, c, 1, true);
        assert!(w[4] && w[2 * 5]);
    }
}
