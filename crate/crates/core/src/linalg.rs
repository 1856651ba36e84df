//! Thin wrappers over faer's dense complex SVD / eigensolvers, plus the
//! canonical eigenvalue ordering and eigenvector normalization shared by the
//! DMD, pencil and feature code paths.

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;
use num_complex::Complex64 as c64;

use crate::error::{Error, Result};

pub type CMat = Mat<c64>;

/// Relative magnitude tolerance under which two eigenvalues count as tied
/// and are ordered by phase instead.
const MAGNITUDE_TIE_TOL: f64 = 1e-9;

/// Condition number of the eigenvector matrix above which an operator is
/// treated as defective.
pub const DEFECTIVE_CONDITION: f64 = 1e12;

/// Thin SVD `X = U diag(s) V*` with `s` nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

impl Svd {
    pub fn compute(x: &CMat) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::ShapeMismatch("cannot decompose an empty matrix".into()));
        }
        if !x.norm_l2().is_finite() {
            return Err(Error::Numerical("non-finite entries in data matrix".into()));
        }
        let svd = x
            .thin_svd()
            .map_err(|e| Error::Numerical(format!("svd did not converge: {e:?}")))?;
        let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
        let u = Mat::from_fn(x.nrows(), s.len(), |i, j| svd.U()[(i, order[j])]);
        let v = Mat::from_fn(x.ncols(), s.len(), |i, j| svd.V()[(i, order[j])]);
        let s = order.iter().map(|&k| s[k].max(0.0)).collect();
        Ok(Self { u, s, v })
    }

    /// Number of singular values above `rel * s[0]`.
    pub fn numerical_rank(&self, rel: f64) -> usize {
        numerical_rank(&self.s, rel)
    }

    /// Leading `rank` singular triplets.
    pub fn truncate(&self, rank: usize) -> (CMat, Vec<f64>, CMat) {
        let u = self.u.subcols(0, rank).to_owned();
        let v = self.v.subcols(0, rank).to_owned();
        (u, self.s[..rank].to_vec(), v)
    }
}

pub fn numerical_rank(s: &[f64], rel: f64) -> usize {
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel * top).count(),
        _ => 0,
    }
}

/// Diagonalization `A = V diag(values) V^{-1}` in canonical order.
#[derive(Debug, Clone)]
pub struct Eig {
    pub values: Vec<c64>,
    pub vectors: CMat,
    pub inverse: CMat,
    pub condition: f64,
}

impl Eig {
    /// Eigendecomposition of a square matrix. Eigenvalues are sorted by
    /// descending magnitude then ascending phase in (-pi, pi]; eigenvectors
    /// have unit norm with their first nonzero entry real and positive.
    pub fn compute(a: &CMat) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() || n == 0 {
            return Err(Error::ShapeMismatch(format!(
                "eigendecomposition needs a nonempty square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let evd = a
            .eigen()
            .map_err(|e| Error::Numerical(format!("eigensolver did not converge: {e:?}")))?;
        let raw: Vec<c64> = evd.S().column_vector().iter().copied().collect();
        let order = canonical_order(&raw);
        let values: Vec<c64> = order.iter().map(|&k| raw[k]).collect();
        let mut vectors = Mat::from_fn(n, n, |i, j| evd.U()[(i, order[j])]);
        for j in 0..n {
            normalize_column(&mut vectors, j);
        }
        let condition = condition_number(&vectors)?;
        if !(condition <= DEFECTIVE_CONDITION) {
            return Err(Error::DefectiveOperator { condition });
        }
        let inverse = inverse(&vectors);
        Ok(Self {
            values,
            vectors,
            inverse,
            condition,
        })
    }
}

/// Phase in (-pi, pi].
pub fn phase(z: c64) -> f64 {
    let p = z.arg();
    if p <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        p
    }
}

/// Permutation putting `values` in canonical order: magnitude descending,
/// near-equal magnitudes broken by ascending phase.
pub fn canonical_order(values: &[c64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].norm().total_cmp(&values[a].norm()));
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let lead = values[idx[start]].norm();
        let mut end = start + 1;
        while end < idx.len() {
            let m = values[idx[end]].norm();
            if lead - m > MAGNITUDE_TIE_TOL * lead.max(f64::MIN_POSITIVE) {
                break;
            }
            end += 1;
        }
        let mut group = idx[start..end].to_vec();
        group.sort_by(|&a, &b| phase(values[a]).total_cmp(&phase(values[b])));
        out.extend(group);
        start = end;
    }
    out
}

/// Scale column `j` to unit norm and rotate its first nonzero entry onto the
/// positive real axis.
pub fn normalize_column(m: &mut CMat, j: usize) {
    let col: Vec<c64> = (0..m.nrows()).map(|i| m[(i, j)]).collect();
    if let Some(scale) = canonical_scale(&col) {
        for i in 0..m.nrows() {
            m[(i, j)] *= scale;
        }
    }
}

/// Same normalization as [`normalize_column`] applied to a row.
pub fn normalize_row(m: &mut CMat, i: usize) {
    let row: Vec<c64> = (0..m.ncols()).map(|j| m[(i, j)]).collect();
    if let Some(scale) = canonical_scale(&row) {
        for j in 0..m.ncols() {
            m[(i, j)] *= scale;
        }
    }
}

fn canonical_scale(v: &[c64]) -> Option<c64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = v.iter().find(|z| z.norm() > 1e-10 * max)?;
    Some(lead.conj() / (lead.norm() * norm))
}

pub fn inverse(a: &CMat) -> CMat {
    a.partial_piv_lu().inverse()
}

/// 2-norm condition number via singular values.
pub fn condition_number(a: &CMat) -> Result<f64> {
    let s = a
        .singular_values()
        .map_err(|e| Error::Numerical(format!("svd did not converge: {e:?}")))?;
    let max = s.iter().copied().fold(0.0, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

pub fn fro(a: &CMat) -> f64 {
    a.norm_l2()
}

pub fn diag_scale_rows(s: &[f64], a: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s[i])
}

pub fn diag_scale_cols(a: &CMat, s: &[f64]) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s[j])
}

pub fn from_rows(rows: &[Vec<c64>]) -> CMat {
    let ncols = rows.first().map_or(0, Vec::len);
    Mat::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

pub fn from_real_rows(rows: &[Vec<f64>]) -> CMat {
    let ncols = rows.first().map_or(0, Vec::len);
    Mat::from_fn(rows.len(), ncols, |i, j| c64::new(rows[i][j], 0.0))
}

pub fn to_rows(a: &CMat) -> Vec<Vec<c64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

pub fn is_real(a: &CMat) -> bool {
    (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| a[(i, j)].im == 0.0))
}

/// Smallest achievable `||a - e^{i theta} b||` over theta, for rows/columns
/// already scaled to unit norm.
pub fn phase_aligned_distance(a: &[c64], b: &[c64]) -> f64 {
    let inner: c64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let rot = if inner.norm() > 0.0 {
        inner.conj() / inner.norm()
    } else {
        c64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y * rot).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Greedy nearest-neighbour pairing between two equally sized eigenvalue
/// lists. Returns `perm` with `a[i] ~ b[perm[i]]` and the worst distance.
pub fn match_eigenvalues(a: &[c64], b: &[c64]) -> (Vec<usize>, f64) {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut perm = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for (dist, i, j) in pairs {
        if perm[i] == usize::MAX && !used[j] {
            perm[i] = j;
            used[j] = true;
            worst = worst.max(dist);
        }
    }
    (perm, worst)
}
