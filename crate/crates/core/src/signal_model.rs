//! Ground-truth damped-sinusoid signals, the 23-series toy ensemble, the
//! synthetic lattice image, and ESPRIT-style factor matrices.
//!
//! Randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`; Gaussian
//! draws use `rand_distr::Normal`. The stream is portable across platforms.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as c64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// One sample `y(t)` of an n-dimensional sequence.
pub type Sample = Vec<c64>;
/// A sequence `y(0), y(1), ...`.
pub type Series = Vec<Sample>;

/// `x(t) = sum_j v_j * lambda_j^t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DampedSinusoidModel {
    modes: Vec<Vec<c64>>,
    frequencies: Vec<c64>,
}

impl DampedSinusoidModel {
    pub fn new(modes: Vec<Vec<c64>>, frequencies: Vec<c64>) -> Result<Self> {
        if modes.is_empty() || frequencies.is_empty() {
            return Err(Error::EmptyModel);
        }
        if modes.len() != frequencies.len() {
            return Err(Error::DimensionMismatch {
                expected: modes.len(),
                got: frequencies.len(),
            });
        }
        let n = modes[0].len();
        if n == 0 {
            return Err(Error::InvalidArgument("mode dimension must be at least 1".into()));
        }
        if let Some(bad) = modes.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(Self { modes, frequencies })
    }

    /// Scalar model `sum_j c_j lambda_j^t`.
    pub fn scalar(coefficients: &[c64], frequencies: &[c64]) -> Result<Self> {
        Self::new(
            coefficients.iter().map(|&c| vec![c]).collect(),
            frequencies.to_vec(),
        )
    }

    pub fn modes(&self) -> &[Vec<c64>] {
        &self.modes
    }

    pub fn frequencies(&self) -> &[c64] {
        &self.frequencies
    }

    pub fn term_count(&self) -> usize {
        self.frequencies.len()
    }

    pub fn dim(&self) -> usize {
        self.modes[0].len()
    }

    /// Noise-free `x(t)`.
    pub fn evaluate(&self, t: i32) -> Sample {
        let mut out = vec![c64::new(0.0, 0.0); self.dim()];
        for (v, &lambda) in self.modes.iter().zip(&self.frequencies) {
            let p = lambda.powi(t);
            for (o, &vk) in out.iter_mut().zip(v) {
                *o += vk * p;
            }
        }
        out
    }

    pub fn exhibits(&self, lambda: c64, tol: f64) -> bool {
        self.frequencies.iter().any(|&f| (f - lambda).norm() <= tol)
    }
}

/// Samples `y(t) = x(t) + s(t)` for `t = 0..t_count`.
///
/// With `real_part_only` the real part of `x(t)` is taken before real-valued
/// noise is added; otherwise complex data gets independent noise on the real
/// and imaginary parts.
pub fn synthesize(
    model: &DampedSinusoidModel,
    t_count: usize,
    noise_sigma: f64,
    seed: u64,
    real_part_only: bool,
) -> Result<Series> {
    if model.term_count() == 0 {
        return Err(Error::EmptyModel);
    }
    if t_count == 0 {
        return Err(Error::InvalidArgument("t_count must be at least 1".into()));
    }
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::InvalidArgument("noise_sigma must be finite and >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise_sigma.max(0.0))
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let complex_data = !real_part_only
        && model
            .modes
            .iter()
            .flatten()
            .chain(&model.frequencies)
            .any(|z| z.im != 0.0);
    let mut out = Vec::with_capacity(t_count);
    for t in 0..t_count {
        let mut x = model.evaluate(t as i32);
        for z in x.iter_mut() {
            if real_part_only {
                z.im = 0.0;
            }
            if noise_sigma > 0.0 {
                z.re += normal.sample(&mut rng);
                if complex_data {
                    z.im += normal.sample(&mut rng);
                }
            }
        }
        out.push(x);
    }
    Ok(out)
}

/// N sequences of n-dimensional samples sharing one length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEnsemble {
    pub series: Vec<Series>,
    /// Ground-truth partition index per series (1-based), when known.
    pub labels: Option<Vec<usize>>,
    pub noise_sigma: f64,
    /// Generating model per series, when known.
    pub models: Option<Vec<DampedSinusoidModel>>,
}

impl SeriesEnsemble {
    pub fn new(series: Vec<Series>) -> Result<Self> {
        let ens = Self {
            series,
            labels: None,
            noise_sigma: 0.0,
            models: None,
        };
        ens.validate()?;
        Ok(ens)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.series.len() {
            return Err(Error::DimensionMismatch {
                expected: self.series.len(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Every series has the same length and dimension.
    pub fn validate(&self) -> Result<()> {
        let first = self
            .series
            .first()
            .ok_or_else(|| Error::InvalidArgument("ensemble has no series".into()))?;
        let len = first.len();
        let dim = first.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::InvalidArgument("series must have dimension >= 1".into()));
        }
        for (i, s) in self.series.iter().enumerate() {
            if s.len() != len {
                return Err(Error::RaggedEnsemble {
                    series: i,
                    expected: len,
                    got: s.len(),
                });
            }
            if let Some(bad) = s.iter().find(|y| y.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: bad.len(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// Samples per series (T + 1).
    pub fn samples(&self) -> usize {
        self.series.first().map_or(0, Vec::len)
    }

    pub fn dim(&self) -> usize {
        self.series
            .first()
            .and_then(|s| s.first())
            .map_or(0, Vec::len)
    }

    /// Ensemble built by sampling each model, one derived seed per series.
    pub fn from_models(
        models: Vec<DampedSinusoidModel>,
        labels: Option<Vec<usize>>,
        t_count: usize,
        noise_sigma: f64,
        seed: u64,
        real_part_only: bool,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let series = models
            .iter()
            .map(|m| synthesize(m, t_count, noise_sigma, rng.next_u64(), real_part_only))
            .collect::<Result<Vec<_>>>()?;
        let mut ens = Self::new(series)?;
        if let Some(l) = labels {
            ens = ens.with_labels(l)?;
        }
        ens.noise_sigma = noise_sigma;
        ens.models = Some(models);
        Ok(ens)
    }
}

pub const TOY_OMEGA_A: f64 = 1.0;
pub const TOY_OMEGA_B: f64 = 1.7;
pub const TOY_OMEGA_C: f64 = 0.8;
pub const TOY_OMEGA_D: f64 = 1.5;
pub const TOY_SIGMA: f64 = 0.1;
pub const TOY_SAMPLES: usize = 20;

/// Point with phase uniform on [0, 2pi) and modulus uniform on [1, 2].
pub fn sample_annulus<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    let phase = rng.random_range(0.0..2.0 * PI);
    let modulus = rng.random_range(1.0..=2.0);
    c64::from_polar(modulus, phase)
}

/// The three-group toy ensemble: 6 series at omega_A, 6 at omega_B and 11
/// mixing omega_C and omega_D, observed as `Re x(t) + s(t)` at t = 0..19.
pub fn make_toy_ensemble(seed: u64) -> SeriesEnsemble {
    make_toy_ensemble_with_sigma(seed, TOY_SIGMA)
}

pub fn make_toy_ensemble_with_sigma(seed: u64, noise_sigma: f64) -> SeriesEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = |w: f64| c64::from_polar(1.0, w);
    let mut models = Vec::with_capacity(23);
    let mut labels = Vec::with_capacity(23);
    for i in 0..23 {
        let model = if i < 6 {
            labels.push(1);
            DampedSinusoidModel::scalar(&[sample_annulus(&mut rng)], &[e(TOY_OMEGA_A)])
        } else if i < 12 {
            labels.push(2);
            DampedSinusoidModel::scalar(&[sample_annulus(&mut rng)], &[e(TOY_OMEGA_B)])
        } else {
            labels.push(3);
            let alpha = sample_annulus(&mut rng);
            let beta = sample_annulus(&mut rng);
            DampedSinusoidModel::scalar(&[alpha, beta], &[e(TOY_OMEGA_C), e(TOY_OMEGA_D)])
        };
        models.push(model.expect("toy models are well formed"));
    }
    SeriesEnsemble::from_models(
        models,
        Some(labels),
        TOY_SAMPLES,
        noise_sigma,
        rng.next_u64(),
        true,
    )
    .expect("toy ensemble is well formed")
}

/// Grayscale image with brightness in [0, 1], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrainImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
    /// Ground-truth region per pixel (1-based), when known.
    pub region_labels: Option<Vec<usize>>,
}

impl GrainImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width * height != pixels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} image needs {} pixels, got {}",
                width,
                height,
                width * height,
                pixels.len()
            )));
        }
        if pixels.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0) {
            return Err(Error::InvalidArgument("brightness must lie in [0, 1]".into()));
        }
        Ok(Self {
            width,
            height,
            pixels,
            region_labels: None,
        })
    }

    /// Brightness at column `x`, row `y`.
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn region_at(&self, x: usize, y: usize) -> Option<usize> {
        self.region_labels.as_ref().map(|l| l[y * self.width + x])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeKind {
    /// Centered-rectangular cell of `period x 1.5 period`: along the lattice
    /// axis one frequency, across it the row frequency and its double.
    Hexagonal,
    /// Fundamental plus second harmonic along the orientation only.
    Stripes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    /// Polygon vertices in pixel coordinates `(x, y)`.
    pub polygon: Vec<(f64, f64)>,
    /// Lattice axis angle from the x axis, degrees.
    pub orientation_deg: f64,
    /// Period along the lattice axis in pixels.
    pub period: f64,
    /// Peak-to-peak brightness swing; zero gives a flat region.
    pub amplitude: f64,
    pub lattice: LatticeKind,
}

impl RegionSpec {
    pub fn hexagonal(polygon: Vec<(f64, f64)>, orientation_deg: f64, period: f64, amplitude: f64) -> Self {
        Self {
            polygon,
            orientation_deg,
            period,
            amplitude,
            lattice: LatticeKind::Hexagonal,
        }
    }

    /// Wave vectors of the two gratings, radians per pixel.
    pub fn wave_vectors(&self) -> [(f64, f64); 2] {
        let k = 2.0 * PI / self.period;
        let (g1, g2) = match self.lattice {
            LatticeKind::Hexagonal => ((k, k / 1.5), (0.0, 2.0 * k / 1.5)),
            LatticeKind::Stripes => ((k, 0.0), (2.0 * k, 0.0)),
        };
        let (s, c) = self.orientation_deg.to_radians().sin_cos();
        let rot = |(u, w): (f64, f64)| (c * u - s * w, s * u + c * w);
        [rot(g1), rot(g2)]
    }
}

/// Crossing-number point-in-polygon test.
fn point_in_polygon(poly: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Synthetic lattice image. Each region is `0.5 + amplitude/4 * (cos g1.r +
/// cos g2.r)` with its own grating phases, plus Gaussian noise, clamped to
/// [0, 1]. Pixel centres `(x + 0.5, y + 0.5)` must fall in exactly one polygon.
pub fn make_lattice_image(
    width: usize,
    height: usize,
    regions: &[RegionSpec],
    noise_sigma: f64,
    seed: u64,
) -> Result<GrainImage> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidRegionSpec("image must be nonempty".into()));
    }
    if regions.is_empty() {
        return Err(Error::InvalidRegionSpec("no regions given".into()));
    }
    for (r, spec) in regions.iter().enumerate() {
        if spec.polygon.len() < 3 {
            return Err(Error::InvalidRegionSpec(format!("region {r} has fewer than 3 vertices")));
        }
        if !(spec.period >= 4.0) {
            return Err(Error::InvalidRegionSpec(format!("region {r} period below 4 px")));
        }
        if !(spec.amplitude >= 0.0) || !spec.orientation_deg.is_finite() {
            return Err(Error::InvalidRegionSpec(format!("region {r} has invalid amplitude or orientation")));
        }
    }
    if !(noise_sigma >= 0.0) {
        return Err(Error::InvalidArgument("noise_sigma must be >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phases: Vec<(f64, f64)> = regions
        .iter()
        .map(|_| (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI)))
        .collect();
    let gratings: Vec<[(f64, f64); 2]> = regions.iter().map(RegionSpec::wave_vectors).collect();
    let normal = Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let mut pixels = Vec::with_capacity(width * height);
    let mut labels = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
            let mut owner = None;
            for (r, spec) in regions.iter().enumerate() {
                if point_in_polygon(&spec.polygon, cx, cy) {
                    if owner.is_some() {
                        return Err(Error::InvalidRegionSpec(format!(
                            "regions overlap at pixel ({x}, {y})"
                        )));
                    }
                    owner = Some(r);
                }
            }
            let r = owner.ok_or_else(|| {
                Error::InvalidRegionSpec(format!("pixel ({x}, {y}) not covered by any region"))
            })?;
            let [g1, g2] = gratings[r];
            let (p1, p2) = phases[r];
            let (fx, fy) = (x as f64, y as f64);
            let wave = (g1.0 * fx + g1.1 * fy + p1).cos() + (g2.0 * fx + g2.1 * fy + p2).cos();
            let mut v = 0.5 + regions[r].amplitude / 4.0 * wave;
            if noise_sigma > 0.0 {
                v += normal.sample(&mut rng);
            }
            pixels.push(v.clamp(0.0, 1.0));
            labels.push(r + 1);
        }
    }
    let mut img = GrainImage::new(width, height, pixels)?;
    img.region_labels = Some(labels);
    Ok(img)
}

/// Six textured regions on a 3 x 2 grid, each a different lattice
/// orientation and period. Column cuts split the part of the canvas inside
/// `margin` into equal thirds, so every region keeps the same share of
/// pixels that have full scan windows.
pub fn six_region_layout(width: usize, height: usize, margin: usize) -> Vec<RegionSpec> {
    let (w, h, m) = (width as f64, height as f64, margin as f64);
    let xs = [0.0, m + (w - 2.0 * m) / 3.0, m + 2.0 * (w - 2.0 * m) / 3.0, w];
    let ys = [0.0, h / 2.0, h];
    let specs = [
        (0.0, 9.0, LatticeKind::Hexagonal),
        (45.0, 12.0, LatticeKind::Hexagonal),
        (90.0, 7.0, LatticeKind::Hexagonal),
        (30.0, 14.0, LatticeKind::Hexagonal),
        (120.0, 10.0, LatticeKind::Hexagonal),
        (20.0, 8.0, LatticeKind::Stripes),
    ];
    specs
        .iter()
        .enumerate()
        .map(|(i, &(orientation_deg, period, lattice))| {
            let (r, c) = (i / 3, i % 3);
            RegionSpec {
                polygon: vec![(xs[c], ys[r]), (xs[c + 1], ys[r]), (xs[c + 1], ys[r + 1]), (xs[c], ys[r + 1])],
                orientation_deg,
                period,
                amplitude: 0.8,
                lattice,
            }
        })
        .collect()
}

/// ESPRIT factors for a noise-free model: `A` is `(d+1)n x R` with column j
/// stacking `v_j/|v_j| * lambda_j^k` for k = 0..d, and `B` is `R x M` with
/// entry `(j, m) = |v_j| * lambda_j^{t_m}`, so that `X = A * B`.
pub fn esprit_factors(model: &DampedSinusoidModel, d: usize, times: &[i32]) -> Result<(CMat, CMat)> {
    let n = model.dim();
    let r = model.term_count();
    let norms: Vec<f64> = model
        .modes
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    if norms.iter().any(|&s| s == 0.0) {
        return Err(Error::DegenerateMode);
    }
    let a = Mat::from_fn((d + 1) * n, r, |row, j| {
        let (k, comp) = (row / n, row % n);
        model.modes[j][comp] / norms[j] * model.frequencies[j].powi(k as i32)
    });
    let b = Mat::from_fn(r, times.len(), |j, m| {
        model.frequencies[j].powi(times[m]) * norms[j]
    });
    Ok((a, b))
}
