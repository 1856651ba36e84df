//! Matrix Pencil estimation and its algebraic equivalence with DMD.
//!
//! With `X ~ U S V*`, the pencil operator is `L = S^{-1} U* Y V`, while DMD
//! uses `K = U* Y V S^{-1}`. Hence `L = S^{-1} K S`: same spectrum, and the
//! eigenvectors relate by `W = S^{-1} V~`.

use num_complex::Complex64 as c64;

use crate::dmd::{check_rank, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::hankel::DelayMatrixPair;
use crate::linalg::{self, CMat, Eig, Svd};

/// Eigenvalues closer than this cannot be paired unambiguously.
pub const COLLISION_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PencilDecomposition {
    pub rank: usize,
    pub pencil_operator: CMat,
    pub eigenvalues: Vec<c64>,
    /// Eigenvectors `W` of the pencil operator (columns, unit norm).
    pub eigenvectors: CMat,
    /// Right generalized eigenvectors `V_r W`, one per column.
    pub right_gen_eigs: CMat,
    /// Left generalized eigenvectors `W^{-1} S^{-1} U_r*`, one per row.
    pub left_gen_eigs: CMat,
    pub sigma: Vec<f64>,
}

pub fn pencil_decompose(pair: &DelayMatrixPair, rank: usize) -> Result<PencilDecomposition> {
    let svd = Svd::compute(&pair.x)?;
    pencil_decompose_with_svd(pair, &svd, rank)
}

pub fn pencil_decompose_with_svd(pair: &DelayMatrixPair, svd: &Svd, rank: usize) -> Result<PencilDecomposition> {
    check_rank(svd, rank)?;
    let (u, sigma, v) = svd.truncate(rank);
    let inv: Vec<f64> = sigma.iter().map(|s| 1.0 / s).collect();
    let projected = u.adjoint() * &pair.y * &v;
    let pencil_operator = linalg::diag_scale_rows(&inv, &projected);
    let eig = Eig::compute(&pencil_operator)?;
    let right_gen_eigs = &v * &eig.vectors;
    let left_gen_eigs = &eig.inverse * linalg::diag_scale_rows(&inv, &u.adjoint().to_owned());
    Ok(PencilDecomposition {
        rank,
        pencil_operator,
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
        right_gen_eigs,
        left_gen_eigs,
        sigma,
    })
}

fn check_shared(dmd: &SpectralDecomposition, pencil: &PencilDecomposition) -> Result<()> {
    if dmd.rank != pencil.rank {
        return Err(Error::ShapeMismatch(format!(
            "rank mismatch: dmd {} vs pencil {}",
            dmd.rank, pencil.rank
        )));
    }
    if dmd.sigma != pencil.sigma {
        return Err(Error::InvalidArgument(
            "decompositions were not computed from the same SVD factors".into(),
        ));
    }
    Ok(())
}

/// `||L - S^{-1} K S||_F / max(1, ||L||_F)`.
pub fn verify_similarity(dmd: &SpectralDecomposition, pencil: &PencilDecomposition) -> Result<f64> {
    check_shared(dmd, pencil)?;
    let s = &pencil.sigma;
    let inv: Vec<f64> = s.iter().map(|x| 1.0 / x).collect();
    let similar = linalg::diag_scale_cols(&linalg::diag_scale_rows(&inv, &dmd.reduced_operator), s);
    let diff = &pencil.pencil_operator - &similar;
    Ok(linalg::fro(&diff) / linalg::fro(&pencil.pencil_operator).max(1.0))
}

/// Largest row distance between DMD adjoint modes and pencil left
/// generalized eigenvectors, after pairing eigenvalues and scaling each row
/// to unit norm with the best common phase.
pub fn verify_adjoint_mode_match(dmd: &SpectralDecomposition, pencil: &PencilDecomposition) -> Result<f64> {
    check_shared(dmd, pencil)?;
    for (i, a) in dmd.eigenvalues.iter().enumerate() {
        for b in &dmd.eigenvalues[i + 1..] {
            if (a - b).norm() < COLLISION_TOL {
                return Err(Error::DegenerateSpectrum);
            }
        }
    }
    let (perm, _) = linalg::match_eigenvalues(&dmd.eigenvalues, &pencil.eigenvalues);
    let mut worst: f64 = 0.0;
    for (j, &p) in perm.iter().enumerate() {
        let a = unit_row(&dmd.adjoint_modes, j);
        let b = unit_row(&pencil.left_gen_eigs, p);
        worst = worst.max(linalg::phase_aligned_distance(&a, &b));
    }
    Ok(worst)
}

fn unit_row(m: &CMat, i: usize) -> Vec<c64> {
    let row: Vec<c64> = (0..m.ncols()).map(|j| m[(i, j)]).collect();
    let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        row
    } else {
        row.into_iter().map(|z| z / norm).collect()
    }
}

/// Largest phase-aligned distance between the columns of `W` and of
/// `S^{-1} V~`, both scaled to unit norm, after pairing eigenvalues.
pub fn eigenvector_relation_residual(dmd: &SpectralDecomposition, pencil: &PencilDecomposition) -> Result<f64> {
    check_shared(dmd, pencil)?;
    let inv: Vec<f64> = pencil.sigma.iter().map(|s| 1.0 / s).collect();
    let mapped = linalg::diag_scale_rows(&inv, &dmd.reduced_eigenvectors);
    let (perm, _) = linalg::match_eigenvalues(&dmd.eigenvalues, &pencil.eigenvalues);
    let mut worst: f64 = 0.0;
    for (j, &p) in perm.iter().enumerate() {
        let a = unit_row(&mapped.transpose().to_owned(), j);
        let b = unit_row(&pencil.eigenvectors.transpose().to_owned(), p);
        worst = worst.max(linalg::phase_aligned_distance(&a, &b));
    }
    Ok(worst)
}

/// `||q* (Y - lambda X)|| / (||q|| ||[X Y]||)` for left generalized
/// eigenvector `j`.
pub fn left_residual(pair: &DelayMatrixPair, pencil: &PencilDecomposition, j: usize) -> f64 {
    let lambda = pencil.eigenvalues[j];
    let q = pencil.left_gen_eigs.subrows(j, 1);
    let pencil_mat = &pair.y - faer::Scale(lambda) * &pair.x;
    let r = q * &pencil_mat;
    let scale = (linalg::fro(&pair.x).powi(2) + linalg::fro(&pair.y).powi(2)).sqrt();
    r.norm_l2() / (q.norm_l2() * scale)
}

/// `||(Y - lambda X) p|| / (||p|| ||[X Y]||)` for right generalized
/// eigenvector `j`.
pub fn right_residual(pair: &DelayMatrixPair, pencil: &PencilDecomposition, j: usize) -> f64 {
    let lambda = pencil.eigenvalues[j];
    let p = pencil.right_gen_eigs.subcols(j, 1);
    let pencil_mat = &pair.y - faer::Scale(lambda) * &pair.x;
    let r = &pencil_mat * p;
    let scale = (linalg::fro(&pair.x).powi(2) + linalg::fro(&pair.y).powi(2)).sqrt();
    r.norm_l2() / (p.norm_l2() * scale)
}

/// Worst pairwise distance between two eigenvalue multisets.
pub fn eigenvalue_distance(a: &[c64], b: &[c64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    linalg::match_eigenvalues(a, b).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmd::decompose_with_svd;
    use crate::hankel::{build_single_series, Arrangement};
    use crate::signal_model::{synthesize, DampedSinusoidModel};
    use faer::Mat;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    fn pair_of(x: CMat, y: CMat) -> DelayMatrixPair {
        DelayMatrixPair {
            n: x.nrows(),
            x,
            y,
            arrangement: Arrangement::Snapshots,
            d: 0,
            series_count: None,
        }
    }

    #[test]
    fn identical_pair_gives_identity_pencil() {
        let x = Mat::from_fn(4, 4, |i, j| c(((i + 1) * (j + 2)) as f64 % 7.0 + if i == j { 5.0 } else { 0.0 }, 0.2 * i as f64));
        let pair = pair_of(x.clone(), x);
        let svd = Svd::compute(&pair.x).unwrap();
        let pen = pencil_decompose_with_svd(&pair, &svd, 4).unwrap();
        assert!(linalg::fro(&(&pen.pencil_operator - Mat::<c64>::identity(4, 4))) < 1e-12);
        assert!(pen.eigenvalues.iter().all(|l| (l - c(1.0, 0.0)).norm() < 1e-12));
        let dmd = decompose_with_svd(&pair, &svd, 4).unwrap();
        assert!(verify_similarity(&dmd, &pen).unwrap() < 1e-13);
    }

    #[test]
    fn geometric_series_eigenvalue() {
        let m = DampedSinusoidModel::scalar(&[c(1.0, 0.0)], &[c(0.7, 0.0)]).unwrap();
        let y = synthesize(&m, 10, 0.0, 0, false).unwrap();
        let pair = build_single_series(&y, 2).unwrap();
        let pen = pencil_decompose(&pair, 1).unwrap();
        assert!((pen.eigenvalues[0] - c(0.7, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn rank_one_adjoint_match() {
        let m = DampedSinusoidModel::scalar(&[c(1.0, 2.0)], &[c64::from_polar(0.9, 0.5)]).unwrap();
        let y = synthesize(&m, 10, 0.0, 0, false).unwrap();
        let pair = build_single_series(&y, 3).unwrap();
        let svd = Svd::compute(&pair.x).unwrap();
        let dmd = decompose_with_svd(&pair, &svd, 1).unwrap();
        let pen = pencil_decompose_with_svd(&pair, &svd, 1).unwrap();
        assert!(verify_adjoint_mode_match(&dmd, &pen).unwrap() < 1e-12);
    }

    #[test]
    fn rank_mismatch_and_foreign_svd_are_rejected() {
        let m = DampedSinusoidModel::scalar(&[c(1.0, 0.0), c(0.5, 0.5)], &[c(0.9, 0.1), c(0.2, 0.8)]).unwrap();
        let y = synthesize(&m, 12, 0.0, 0, false).unwrap();
        let pair = build_single_series(&y, 3).unwrap();
        let svd = Svd::compute(&pair.x).unwrap();
        let dmd = decompose_with_svd(&pair, &svd, 2).unwrap();
        let pen = pencil_decompose_with_svd(&pair, &svd, 1).unwrap();
        assert!(matches!(verify_similarity(&dmd, &pen), Err(Error::ShapeMismatch(_))));
        let other = build_single_series(&y[1..], 3).unwrap();
        let pen2 = pencil_decompose(&other, 2).unwrap();
        assert!(verify_similarity(&dmd, &pen2).is_err());
    }

    #[test]
    fn collision_is_reported() {
        let x = Mat::<c64>::identity(3, 3);
        let y = Mat::<c64>::identity(3, 3);
        let pair = pair_of(x, y);
        let svd = Svd::compute(&pair.x).unwrap();
        let dmd = decompose_with_svd(&pair, &svd, 3).unwrap();
        let pen = pencil_decompose_with_svd(&pair, &svd, 3).unwrap();
        assert_eq!(verify_adjoint_mode_match(&dmd, &pen).unwrap_err(), Error::DegenerateSpectrum);
    }

    #[test]
    fn generalized_eigenpairs_and_eigenvector_relation() {
        let freqs = [c64::from_polar(1.0, 0.4), c64::from_polar(0.95, 1.3), c64::from_polar(0.9, -2.0)];
        let m = DampedSinusoidModel::scalar(&[c(1.0, 0.0), c(0.4, -0.3), c(0.8, 0.8)], &freqs).unwrap();
        let y = synthesize(&m, 25, 0.0, 0, false).unwrap();
        let pair = build_single_series(&y, 6).unwrap();
        let svd = Svd::compute(&pair.x).unwrap();
        let dmd = decompose_with_svd(&pair, &svd, 3).unwrap();
        let pen = pencil_decompose_with_svd(&pair, &svd, 3).unwrap();
        assert!(eigenvalue_distance(&dmd.eigenvalues, &pen.eigenvalues) < 1e-10);
        assert!(eigenvector_relation_residual(&dmd, &pen).unwrap() < 1e-8);
        for j in 0..3 {
            assert!(left_residual(&pair, &pen, j) < 1e-8);
            assert!(right_residual(&pair, &pen, j) < 1e-8);
        }
    }

    #[test]
    fn noisy_pair_similarity_is_algebraic() {
        let x = Mat::from_fn(8, 12, |i, j| c(((i * 13 + j * 7) as f64).sin(), ((i * 3 + j) as f64).cos()));
        let y = Mat::from_fn(8, 12, |i, j| c(((i * 5 + j * 11) as f64).cos(), ((i + 2 * j) as f64).sin()));
        let pair = pair_of(x, y);
        let svd = Svd::compute(&pair.x).unwrap();
        let dmd = decompose_with_svd(&pair, &svd, 4).unwrap();
        let pen = pencil_decompose_with_svd(&pair, &svd, 4).unwrap();
        assert!(verify_similarity(&dmd, &pen).unwrap() < 1e-10);
        assert!(verify_adjoint_mode_match(&dmd, &pen).unwrap() < 1e-8);
    }
}
