//! Shifted data-matrix pairs `(X, Y)` built from delayed observables.
//!
//! Four arrangements are supported: delay (Hankel) matrices of one series,
//! unordered snapshot pairs, and the two ensemble arrangements that stack
//! many series either as columns (`EnsembleByTime`) or as rows
//! (`EnsembleBySeries`).

use faer::Mat;
use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::signal_model::{Sample, SeriesEnsemble};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arrangement {
    SingleSeries,
    Snapshots,
    EnsembleByTime,
    EnsembleBySeries,
}

#[derive(Debug, Clone)]
pub struct DelayMatrixPair {
    pub x: CMat,
    pub y: CMat,
    pub arrangement: Arrangement,
    /// Component dimension of the underlying samples.
    pub n: usize,
    /// Delay count (0 for snapshot pairs).
    pub d: usize,
    /// Number of series (ensemble arrangements only).
    pub series_count: Option<usize>,
}

impl DelayMatrixPair {
    pub fn rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn cols(&self) -> usize {
        self.x.ncols()
    }
}

/// Delayed observable `z(t) = [y(t); y(t+1); ...; y(t+d)]`.
pub fn delayed_observable(series: &[Sample], t: usize, d: usize) -> Vec<c64> {
    series[t..=t + d].iter().flatten().copied().collect()
}

/// Hankel pair of a single series: column m of `X` is `z(m)`, of `Y` is
/// `z(m+1)`, for m = 0..T-d-1.
pub fn build_single_series(series: &[Sample], d: usize) -> Result<DelayMatrixPair> {
    if series.len() < d + 2 {
        return Err(Error::InsufficientLength {
            needed: d + 2,
            got: series.len(),
        });
    }
    let n = check_dims(series)?;
    let m = series.len() - d - 1;
    let rows = (d + 1) * n;
    let x = Mat::from_fn(rows, m, |r, col| series[col + r / n][r % n]);
    let y = Mat::from_fn(rows, m, |r, col| series[col + 1 + r / n][r % n]);
    Ok(DelayMatrixPair {
        x,
        y,
        arrangement: Arrangement::SingleSeries,
        n,
        d,
        series_count: None,
    })
}

/// Snapshot pairs `(z(t), z(t+1))` in the order given.
pub fn build_snapshots(pairs: &[(Vec<c64>, Vec<c64>)]) -> Result<DelayMatrixPair> {
    let rows = pairs
        .first()
        .map(|p| p.0.len())
        .ok_or_else(|| Error::InvalidArgument("no snapshot pairs".into()))?;
    if rows == 0 {
        return Err(Error::InvalidArgument("snapshots must be nonempty".into()));
    }
    for (a, b) in pairs {
        for v in [a, b] {
            if v.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    got: v.len(),
                });
            }
        }
    }
    let x = Mat::from_fn(rows, pairs.len(), |r, c| pairs[c].0[r]);
    let y = Mat::from_fn(rows, pairs.len(), |r, c| pairs[c].1[r]);
    Ok(DelayMatrixPair {
        x,
        y,
        arrangement: Arrangement::Snapshots,
        n: rows,
        d: 0,
        series_count: None,
    })
}

/// Series as columns: column i of `X` stacks `y_i(0..=d)`, of `Y` stacks
/// `y_i(1..=d+1)`. Shape `(d+1)n x N`.
pub fn build_ensemble_by_time(ensemble: &SeriesEnsemble, d: usize) -> Result<DelayMatrixPair> {
    ensemble.validate()?;
    if ensemble.samples() < d + 2 {
        return Err(Error::InsufficientLength {
            needed: d + 2,
            got: ensemble.samples(),
        });
    }
    let n = ensemble.dim();
    let rows = (d + 1) * n;
    let s = &ensemble.series;
    let x = Mat::from_fn(rows, s.len(), |r, i| s[i][r / n][r % n]);
    let y = Mat::from_fn(rows, s.len(), |r, i| s[i][1 + r / n][r % n]);
    Ok(DelayMatrixPair {
        x,
        y,
        arrangement: Arrangement::EnsembleByTime,
        n,
        d,
        series_count: Some(s.len()),
    })
}

/// Series as row blocks: row `i*n + k` of `X` holds component k of
/// `y_i(0..d)`, of `Y` holds `y_i(1..=d)`. Shape `nN x d`, consuming d+1
/// samples per series.
pub fn build_ensemble_by_series(ensemble: &SeriesEnsemble, d: usize) -> Result<DelayMatrixPair> {
    ensemble.validate()?;
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if ensemble.samples() < d + 1 {
        return Err(Error::InsufficientLength {
            needed: d + 1,
            got: ensemble.samples(),
        });
    }
    let n = ensemble.dim();
    let s = &ensemble.series;
    let x = Mat::from_fn(n * s.len(), d, |r, t| s[r / n][t][r % n]);
    let y = Mat::from_fn(n * s.len(), d, |r, t| s[r / n][t + 1][r % n]);
    Ok(DelayMatrixPair {
        x,
        y,
        arrangement: Arrangement::EnsembleBySeries,
        n,
        d,
        series_count: Some(s.len()),
    })
}

fn check_dims(series: &[Sample]) -> Result<usize> {
    let n = series[0].len();
    if n == 0 {
        return Err(Error::InvalidArgument("samples must have dimension >= 1".into()));
    }
    if let Some(bad) = series.iter().find(|y| y.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.len(),
        });
    }
    Ok(n)
}

/// Promote real scalars to a one-dimensional complex series.
pub fn real_series(values: &[f64]) -> Vec<Sample> {
    values.iter().map(|&v| vec![c64::new(v, 0.0)]).collect()
}
