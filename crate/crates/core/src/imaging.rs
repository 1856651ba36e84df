//! Pixel neighbourhoods as two-component sequences: for each pixel with a
//! full window, component 0 scans `d + 1` pixels along x and component 1
//! along y, both centred on the pixel. Also grid connectivity and the
//! per-pixel maps used to inspect modes and clusters.

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::clustering::ConnectivityGraph;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::signal_model::{GrainImage, SeriesEnsemble};

#[derive(Debug, Clone, PartialEq)]
pub struct PixelEnsemble {
    pub ensemble: SeriesEnsemble,
    /// `(x, y)` of series `i`, row-major over the interior.
    pub pixel_index: Vec<(usize, usize)>,
    pub width: usize,
    pub height: usize,
    pub d: usize,
    /// Border excluded on every side, `d / 2`.
    pub margin: usize,
}

impl PixelEnsemble {
    pub fn interior_width(&self) -> usize {
        self.width - 2 * self.margin
    }

    pub fn interior_height(&self) -> usize {
        self.height - 2 * self.margin
    }

    /// Series index of pixel `(x, y)`, if it is interior.
    pub fn series_of(&self, x: usize, y: usize) -> Option<usize> {
        let m = self.margin;
        if x < m || y < m || x >= self.width - m || y >= self.height - m {
            return None;
        }
        Some((y - m) * self.interior_width() + (x - m))
    }
}

/// Scan windows of every interior pixel. With `demean` each window has its
/// own mean removed.
pub fn pixel_profiles(image: &GrainImage, d: usize, demean: bool) -> Result<PixelEnsemble> {
    if d == 0 || d % 2 != 0 {
        return Err(Error::InvalidArgument(format!("window length d = {d} must be even and positive")));
    }
    if image.width <= d || image.height <= d {
        return Err(Error::InsufficientLength {
            needed: d + 1,
            got: image.width.min(image.height),
        });
    }
    let m = d / 2;
    let mut series = Vec::with_capacity((image.width - d) * (image.height - d));
    let mut pixel_index = Vec::with_capacity(series.capacity());
    for y in m..image.height - m {
        for x in m..image.width - m {
            let mut xs: Vec<f64> = (0..=d).map(|t| image.at(x - m + t, y)).collect();
            let mut ys: Vec<f64> = (0..=d).map(|t| image.at(x, y - m + t)).collect();
            if demean {
                for w in [&mut xs, &mut ys] {
                    let mean = w.iter().sum::<f64>() / w.len() as f64;
                    w.iter_mut().for_each(|v| *v -= mean);
                }
            }
            series.push(
                xs.iter()
                    .zip(&ys)
                    .map(|(&a, &b)| vec![c64::new(a, 0.0), c64::new(b, 0.0)])
                    .collect(),
            );
            pixel_index.push((x, y));
        }
    }
    Ok(PixelEnsemble {
        ensemble: SeriesEnsemble::new(series)?,
        pixel_index,
        width: image.width,
        height: image.height,
        d,
        margin: m,
    })
}

/// Grid edges between interior pixels: 4-neighbourhood, or 8 with
/// `diagonal`.
pub fn pixel_connectivity(pixels: &PixelEnsemble, diagonal: bool) -> ConnectivityGraph {
    let (w, h) = (pixels.interior_width(), pixels.interior_height());
    let mut edges = Vec::with_capacity(4 * w * h);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w {
                edges.push((i, i + 1));
            }
            if y + 1 < h {
                edges.push((i, i + w));
                if diagonal && x + 1 < w {
                    edges.push((i, i + w + 1));
                }
                if diagonal && x > 0 {
                    edges.push((i, i + w - 1));
                }
            }
        }
    }
    ConnectivityGraph::new(w * h, edges).expect("grid edges are valid")
}

/// Full-size grayscale maps, row-major, border pixels zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeMaps {
    pub width: usize,
    pub height: usize,
    pub x_map: Vec<f64>,
    pub y_map: Vec<f64>,
}

/// `|Q|` of one eigenvector row split into its x-scan and y-scan entries,
/// scaled by the largest entry of the row.
pub fn mode_map(q: &CMat, pixels: &PixelEnsemble, eigenvalue_index: usize) -> Result<ModeMaps> {
    if eigenvalue_index >= q.nrows() {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue index {eigenvalue_index} out of range for {} modes",
            q.nrows()
        )));
    }
    let n = pixels.pixel_index.len();
    if q.ncols() != 2 * n {
        return Err(Error::ShapeMismatch(format!(
            "Q has {} columns, expected {}",
            q.ncols(),
            2 * n
        )));
    }
    let row: Vec<f64> = (0..q.ncols()).map(|c| q[(eigenvalue_index, c)].norm()).collect();
    let max = row.iter().copied().fold(0.0, f64::max);
    let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
    let mut maps = ModeMaps {
        width: pixels.width,
        height: pixels.height,
        x_map: vec![0.0; pixels.width * pixels.height],
        y_map: vec![0.0; pixels.width * pixels.height],
    };
    for (i, &(x, y)) in pixels.pixel_index.iter().enumerate() {
        maps.x_map[y * pixels.width + x] = row[2 * i] * scale;
        maps.y_map[y * pixels.width + x] = row[2 * i + 1] * scale;
    }
    Ok(maps)
}

/// Per-pixel labels, row-major; border pixels get 0.
pub fn label_map(labels: &[usize], pixels: &PixelEnsemble) -> Result<Vec<usize>> {
    if labels.len() != pixels.pixel_index.len() {
        return Err(Error::DimensionMismatch {
            expected: pixels.pixel_index.len(),
            got: labels.len(),
        });
    }
    let mut out = vec![0; pixels.width * pixels.height];
    for (&l, &(x, y)) in labels.iter().zip(&pixels.pixel_index) {
        out[y * pixels.width + x] = l;
    }
    Ok(out)
}

/// Pixels whose Euclidean `band`-neighbourhood holds only their own region.
pub fn away_from_boundaries(regions: &[usize], width: usize, height: usize, band: usize) -> Vec<bool> {
    let b = band as isize;
    let mut keep = vec![true; width * height];
    for y in 0..height as isize {
        for x in 0..width as isize {
            let own = regions[(y as usize) * width + x as usize];
            'scan: for dy in -b..=b {
                for dx in -b..=b {
                    if dx * dx + dy * dy > b * b {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                        continue;
                    }
                    if regions[(ny as usize) * width + nx as usize] != own {
                        keep[(y as usize) * width + x as usize] = false;
                        break 'scan;
                    }
                }
            }
        }
    }
    keep
}

/// Fraction of masked items whose predicted label maps to the true one
/// under the best one-to-one relabelling. Labels are positive; at most nine
/// distinct labels per side.
pub fn best_permutation_agreement(predicted: &[usize], truth: &[usize], mask: &[bool]) -> Result<f64> {
    if predicted.len() != truth.len() || mask.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: predicted.len().min(mask.len()),
        });
    }
    let kp = predicted.iter().copied().max().unwrap_or(0);
    let kt = truth.iter().copied().max().unwrap_or(0);
    if kp.max(kt) > 9 {
        return Err(Error::InvalidArgument("too many labels for exhaustive matching".into()));
    }
    let mut table = vec![vec![0usize; kt + 1]; kp + 1];
    let mut total = 0;
    for ((&p, &t), &m) in predicted.iter().zip(truth).zip(mask) {
        if m {
            table[p][t] += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Ok(1.0);
    }
    fn search(table: &[Vec<usize>], p: usize, used: &mut Vec<bool>) -> usize {
        if p == table.len() {
            return 0;
        }
        let mut best = search(table, p + 1, used);
        for t in 1..used.len() {
            if !used[t] {
                used[t] = true;
                best = best.max(table[p][t] + search(table, p + 1, used));
                used[t] = false;
            }
        }
        best
    }
    let mut used = vec![false; kt + 1];
    Ok(search(&table[1..], 0, &mut used) as f64 / total as f64)
}
