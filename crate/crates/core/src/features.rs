//! Per-series spectral features from the left generalized eigenvectors of
//! the ensemble pencil `(X^, Y^)`, where row block `i` of `X^` holds series
//! `i` at times `0..d-1`.
//!
//! `Q = W^ U*` has one row per mode and `n` columns per series; the feature
//! block of series `i` is the elementwise modulus of its column block. Rows
//! of `W^` are scaled to unit norm, so rows of `Q` are too.

use faer::Mat;
use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::dmd::{select_rank, TruncationPolicy};
use crate::error::{Error, Result};
use crate::hankel::{build_ensemble_by_series, build_ensemble_by_time, Arrangement, DelayMatrixPair};
use crate::linalg::{self, CMat, Eig, Svd};
use crate::matrix_pencil::pencil_decompose_with_svd;
use crate::signal_model::{DampedSinusoidModel, Sample, SeriesEnsemble};

/// Relative singular value floor for premise rank checks.
pub const PREMISE_RANK_TOL: f64 = 1e-9;
/// Eigenvalue-to-frequency matches further apart than this are rejected on
/// noise-free data.
pub const MATCH_REJECT_TOL: f64 = 1e-6;

/// Trained map from a length-`d` series to its feature block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureModel {
    pub rank: usize,
    /// `W^ S^{-1} V*`, rank x d.
    #[serde(with = "mat_serde")]
    pub embed_operator: CMat,
    pub eigenvalues: Vec<c64>,
    pub n: usize,
    pub d: usize,
}

mod mat_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
        linalg::to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMat, D::Error> {
        let rows: Vec<Vec<c64>> = Vec::deserialize(d)?;
        if rows.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(linalg::from_rows(&rows))
    }
}

/// `rank x n` block of nonnegative reals, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBlock {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl FeatureBlock {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {rows}x{cols} block",
                values.len()
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.cols + k]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub blocks: Vec<FeatureBlock>,
    pub series_ids: Vec<usize>,
}

impl FeatureSet {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Flattened blocks, one vector per series.
    pub fn vectors(&self) -> Vec<Vec<f64>> {
        self.blocks.iter().map(|b| b.values.clone()).collect()
    }

    /// Copy with every block scaled to unit Frobenius norm. Zero blocks stay zero.
    ///
    /// Moduli of `Q` carry each series' coefficient magnitude and phase, so two series
    /// of the same partition can sit far apart. Scaling removes that spread.
    pub fn normalized(&self) -> FeatureSet {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let norm = b.values.iter().map(|v| v * v).sum::<f64>().sqrt();
                let values = if norm > 0.0 { b.values.iter().map(|v| v / norm).collect() } else { b.values.clone() };
                FeatureBlock { rows: b.rows, cols: b.cols, values }
            })
            .collect();
        FeatureSet { blocks, series_ids: self.series_ids.clone() }
    }
}

/// Output of [`fit`]: the trained model plus the complex `Q`.
#[derive(Debug, Clone)]
pub struct FeatureFit {
    pub model: FeatureModel,
    pub q: CMat,
    pub singular_values: Vec<f64>,
}

pub fn fit(pair: &DelayMatrixPair, policy: TruncationPolicy) -> Result<FeatureFit> {
    let svd = Svd::compute(&pair.x)?;
    let rank = select_rank(&svd.s, policy)?;
    fit_with_svd(pair, &svd, rank)
}

pub fn fit_with_svd(pair: &DelayMatrixPair, svd: &Svd, rank: usize) -> Result<FeatureFit> {
    if pair.arrangement != Arrangement::EnsembleBySeries {
        return Err(Error::InvalidArgument(format!(
            "features need the by-series arrangement, got {:?}",
            pair.arrangement
        )));
    }
    crate::dmd::check_rank(svd, rank)?;
    let (u, sigma, v) = svd.truncate(rank);
    let inv: Vec<f64> = sigma.iter().map(|s| 1.0 / s).collect();
    let k_hat = linalg::diag_scale_cols(&(u.adjoint() * &pair.y * &v), &inv);
    let eig = Eig::compute(&k_hat)?;
    let mut w = eig.inverse;
    for i in 0..rank {
        linalg::normalize_row(&mut w, i);
    }
    let q = &w * u.adjoint();
    let embed_operator = linalg::diag_scale_cols(&w, &inv) * v.adjoint();
    Ok(FeatureFit {
        model: FeatureModel {
            rank,
            embed_operator,
            eigenvalues: eig.values,
            n: pair.n,
            d: pair.d,
        },
        q,
        singular_values: svd.s.clone(),
    })
}

/// `(q_i)_{j,k} = |Q_{j, i n + k}|` with zero-based `i`, `j`, `k`.
pub fn extract(q: &CMat, n: usize, series_count: usize) -> Result<FeatureSet> {
    if n == 0 || q.ncols() != n * series_count {
        return Err(Error::ShapeMismatch(format!(
            "Q has {} columns, expected n*N = {}*{}",
            q.ncols(),
            n,
            series_count
        )));
    }
    let rows = q.nrows();
    let blocks = (0..series_count)
        .map(|i| FeatureBlock {
            rows,
            cols: n,
            values: (0..rows)
                .flat_map(|j| (0..n).map(move |k| (j, k)))
                .map(|(j, k)| q[(j, i * n + k)].norm())
                .collect(),
        })
        .collect();
    Ok(FeatureSet {
        blocks,
        series_ids: (0..series_count).collect(),
    })
}

/// Frobenius distance between two blocks.
pub fn distance(a: &FeatureBlock, b: &FeatureBlock) -> Result<f64> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{} feature blocks",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Feature block of an unseen series `y(0..d-1)`.
pub fn embed(model: &FeatureModel, series: &[Sample]) -> Result<FeatureBlock> {
    if series.len() < model.d {
        return Err(Error::InsufficientLength {
            needed: model.d,
            got: series.len(),
        });
    }
    if series.len() > model.d {
        return Err(Error::DimensionMismatch {
            expected: model.d,
            got: series.len(),
        });
    }
    if let Some(bad) = series.iter().find(|y| y.len() != model.n) {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            got: bad.len(),
        });
    }
    let cols = Mat::from_fn(model.d, model.n, |t, k| series[t][k].conj());
    let out = &model.embed_operator * cols;
    FeatureBlock::new(
        model.rank,
        model.n,
        (0..model.rank)
            .flat_map(|j| (0..model.n).map(move |k| (j, k)))
            .map(|(j, k)| out[(j, k)].norm())
            .collect(),
    )
}

/// Summary of a zero-structure check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroStructureReport {
    /// Largest entry of a unit-norm eigenvector on a series that does not
    /// exhibit its eigenvalue.
    pub max_off_support: f64,
    pub independent_eigenvectors: usize,
    pub distinct_frequencies: usize,
    /// Worst eigenvalue-to-frequency distance.
    pub match_error: f64,
    /// Off-support maximum per recovered eigenvalue, in eigenvalue order.
    pub per_eigenvalue: Vec<f64>,
    pub eigenvalues: Vec<c64>,
}

fn ensemble_models(ensemble: &SeriesEnsemble) -> Result<&[DampedSinusoidModel]> {
    let models = ensemble
        .models
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("ensemble carries no generating models".into()))?;
    if models.len() != ensemble.len() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.len(),
            got: models.len(),
        });
    }
    Ok(models)
}

/// Distinct frequencies across all models, merged within `tol`.
pub fn distinct_frequencies(models: &[DampedSinusoidModel], tol: f64) -> Vec<c64> {
    let mut out: Vec<c64> = Vec::new();
    for f in models.iter().flat_map(|m| m.frequencies().iter().copied()) {
        if !out.iter().any(|g| (g - f).norm() <= tol) {
            out.push(f);
        }
    }
    out
}

/// Rows of `vectors` (one per eigenvalue, length N*n) are checked against
/// the series that do not exhibit the matched frequency.
fn off_support(
    vectors: &CMat,
    eigenvalues: &[c64],
    models: &[DampedSinusoidModel],
    freqs: &[c64],
    n: usize,
    reject: Option<f64>,
) -> Result<(Vec<f64>, f64)> {
    let (perm, worst) = linalg::match_eigenvalues(eigenvalues, freqs);
    if let Some(tol) = reject {
        if worst > tol {
            return Err(Error::PremisesUnmet(format!(
                "eigenvalue {worst:.3e} away from every generating frequency"
            )));
        }
    }
    let mut per = Vec::with_capacity(eigenvalues.len());
    for (j, &p) in perm.iter().enumerate() {
        let norm = (0..vectors.ncols()).map(|c| vectors[(j, c)].norm_sqr()).sum::<f64>().sqrt();
        let mut m: f64 = 0.0;
        if p != usize::MAX && norm > 0.0 {
            for (i, model) in models.iter().enumerate() {
                if model.exhibits(freqs[p], PREMISE_RANK_TOL) {
                    continue;
                }
                for k in 0..n {
                    m = m.max(vectors[(j, i * n + k)].norm() / norm);
                }
            }
        }
        per.push(m);
    }
    Ok((per, worst))
}

fn independent_rows(m: &CMat) -> Result<usize> {
    Ok(linalg::numerical_rank(&Svd::compute(m)?.s, PREMISE_RANK_TOL))
}

/// Fits features on the by-series pencil and measures how far each left
/// generalized eigenvector strays onto series lacking its eigenvalue.
///
/// The data must be noise-free with `l` distinct frequencies and a data
/// matrix of numerical rank `l`; otherwise the premises are reported unmet.
pub fn verify_zero_structure(ensemble: &SeriesEnsemble, d: usize) -> Result<ZeroStructureReport> {
    let models = ensemble_models(ensemble)?;
    let freqs = distinct_frequencies(models, PREMISE_RANK_TOL);
    let pair = build_ensemble_by_series(ensemble, d)?;
    let svd = Svd::compute(&pair.x)?;
    let l = freqs.len();
    let rank = svd.numerical_rank(PREMISE_RANK_TOL);
    if d < l || rank != l {
        return Err(Error::PremisesUnmet(format!(
            "premises unmet: data rank {rank}, {l} distinct frequencies, d = {d}"
        )));
    }
    let fit = fit_with_svd(&pair, &svd, l)?;
    let (per, worst) = off_support(&fit.q, &fit.model.eigenvalues, models, &freqs, pair.n, Some(MATCH_REJECT_TOL))?;
    Ok(ZeroStructureReport {
        max_off_support: per.iter().copied().fold(0.0, f64::max),
        independent_eigenvectors: independent_rows(&fit.q)?,
        distinct_frequencies: l,
        match_error: worst,
        per_eigenvalue: per,
        eigenvalues: fit.model.eigenvalues,
    })
}

/// Off-support magnitude of `Q` on possibly noisy data, fitting with one
/// mode per distinct generating frequency and no match rejection.
pub fn off_support_magnitude(ensemble: &SeriesEnsemble, d: usize) -> Result<f64> {
    let models = ensemble_models(ensemble)?;
    let freqs = distinct_frequencies(models, PREMISE_RANK_TOL);
    let pair = build_ensemble_by_series(ensemble, d)?;
    let fit = fit(&pair, TruncationPolicy::FixedRank(freqs.len()))?;
    let (per, _) = off_support(&fit.q, &fit.model.eigenvalues, models, &freqs, pair.n, None)?;
    Ok(per.into_iter().fold(0.0, f64::max))
}

/// Same check on the by-time arrangement (`(d+1) x N` for scalar series),
/// using the right generalized eigenvectors, whose entries are indexed by
/// series. Scalar series only.
pub fn verify_by_time_zero_structure(ensemble: &SeriesEnsemble, d: usize) -> Result<ZeroStructureReport> {
    if ensemble.dim() != 1 {
        return Err(Error::InvalidArgument("by-time check supports scalar series only".into()));
    }
    let models = ensemble_models(ensemble)?;
    let freqs = distinct_frequencies(models, PREMISE_RANK_TOL);
    let pair = build_ensemble_by_time(ensemble, d)?;
    let svd = Svd::compute(&pair.x)?;
    let l = freqs.len();
    let rank = svd.numerical_rank(PREMISE_RANK_TOL);
    if d < l || rank != l {
        return Err(Error::PremisesUnmet(format!(
            "premises unmet: data rank {rank}, {l} distinct frequencies, d = {d}"
        )));
    }
    let pencil = pencil_decompose_with_svd(&pair, &svd, l)?;
    let rows = pencil.right_gen_eigs.transpose().to_owned();
    let (per, worst) = off_support(&rows, &pencil.eigenvalues, models, &freqs, 1, Some(MATCH_REJECT_TOL))?;
    Ok(ZeroStructureReport {
        max_off_support: per.iter().copied().fold(0.0, f64::max),
        independent_eigenvectors: independent_rows(&rows)?,
        distinct_frequencies: l,
        match_error: worst,
        per_eigenvalue: per,
        eigenvalues: pencil.eigenvalues,
    })
}
