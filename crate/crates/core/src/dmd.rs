//! Exact DMD on delayed observables: truncated SVD, reduced operator,
//! eigendecomposition, mode lift, averaged scalings and recovery of the
//! per-term vector coefficients.

use faer::Mat;
use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::DelayMatrixPair;
use crate::linalg::{self, CMat, Eig, Svd};

/// Singular values at or below this fraction of the largest are treated as
/// numerically zero when validating a truncation rank.
pub const NUMERICAL_RANK_TOL: f64 = 1e-14;

/// Eigenvalues with modulus below this cannot be raised to negative powers.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-12;

/// How many singular directions to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TruncationPolicy {
    FixedRank(usize),
    /// Smallest rank capturing this fraction of the squared singular values.
    Energy(f64),
    /// Rank with the largest ratio `s_r / s_{r+1}`, among ranks whose
    /// `s_r / s_1` exceeds the given floor.
    Gap(f64),
}

impl TruncationPolicy {
    pub const DEFAULT_GAP_FLOOR: f64 = 1e-12;

    pub fn gap() -> Self {
        TruncationPolicy::Gap(Self::DEFAULT_GAP_FLOOR)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TruncationPolicy::FixedRank(0) => Err(Error::InvalidArgument("fixed rank must be >= 1".into())),
            TruncationPolicy::Energy(t) | TruncationPolicy::Gap(t) if !(t > 0.0 && t < 1.0) => Err(
                Error::InvalidArgument(format!("truncation threshold {t} outside (0, 1)")),
            ),
            _ => Ok(()),
        }
    }
}

pub fn select_rank(singular_values: &[f64], policy: TruncationPolicy) -> Result<usize> {
    policy.validate()?;
    if singular_values.is_empty() {
        return Err(Error::InvalidArgument("empty singular value list".into()));
    }
    if singular_values.iter().any(|s| !(*s >= 0.0)) {
        return Err(Error::InvalidArgument("singular values must be nonnegative".into()));
    }
    let top = singular_values[0];
    if top == 0.0 {
        return Err(Error::ZeroData);
    }
    let positive = singular_values.iter().filter(|&&s| s > 0.0).count();
    Ok(match policy {
        TruncationPolicy::FixedRank(r) => r.min(positive),
        TruncationPolicy::Energy(tau) => {
            let total: f64 = singular_values.iter().map(|s| s * s).sum();
            let mut acc = 0.0;
            let mut rank = singular_values.len();
            for (i, s) in singular_values.iter().enumerate() {
                acc += s * s;
                if acc >= tau * total {
                    rank = i + 1;
                    break;
                }
            }
            rank
        }
        TruncationPolicy::Gap(floor) => {
            if singular_values.len() == 1 {
                return Ok(1);
            }
            let mut best = (f64::NEG_INFINITY, 1);
            for r in 1..singular_values.len() {
                let (s, next) = (singular_values[r - 1], singular_values[r]);
                if s / top <= floor {
                    break;
                }
                let ratio = if next > 0.0 { s / next } else { f64::INFINITY };
                if ratio > best.0 {
                    best = (ratio, r);
                }
            }
            best.1
        }
    })
}

/// Rank-`r` projection of a pair: `K = U_r* Y V_r S_r^{-1}`.
#[derive(Debug, Clone)]
pub struct ReducedOperator {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub sigma: Vec<f64>,
    pub left_basis: CMat,
    pub right_basis: CMat,
    pub operator: CMat,
}

impl ReducedOperator {
    /// Reduced operator from precomputed SVD factors of `pair.x`.
    pub fn from_svd(pair: &DelayMatrixPair, svd: &Svd, rank: usize) -> Result<Self> {
        check_rank(svd, rank)?;
        let (u, sigma, v) = svd.truncate(rank);
        let inv: Vec<f64> = sigma.iter().map(|s| 1.0 / s).collect();
        let projected = u.adjoint() * &pair.y * &v;
        let operator = linalg::diag_scale_cols(&projected, &inv);
        Ok(Self {
            rank,
            singular_values: svd.s.clone(),
            sigma,
            left_basis: u,
            right_basis: v,
            operator,
        })
    }
}

pub(crate) fn check_rank(svd: &Svd, rank: usize) -> Result<()> {
    if svd.s.first().map_or(true, |&s| s == 0.0) {
        return Err(Error::ZeroData);
    }
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be >= 1".into()));
    }
    let available = svd.numerical_rank(NUMERICAL_RANK_TOL);
    if rank > available {
        return Err(Error::TruncationBeyondRank {
            requested: rank,
            available,
        });
    }
    Ok(())
}

pub fn reduced_operator(pair: &DelayMatrixPair, rank: usize) -> Result<ReducedOperator> {
    let svd = Svd::compute(&pair.x)?;
    ReducedOperator::from_svd(pair, &svd, rank)
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub rank: usize,
    /// Full singular spectrum of `X`, nonincreasing.
    pub singular_values: Vec<f64>,
    pub eigenvalues: Vec<c64>,
    pub reduced_operator: CMat,
    /// Eigenvectors of the reduced operator (columns, unit norm).
    pub reduced_eigenvectors: CMat,
    /// DMD modes `U_r V~`, one per column.
    pub modes: CMat,
    /// Adjoint modes `V~^{-1} U_r*`, one per row.
    pub adjoint_modes: CMat,
    pub left_basis: CMat,
    pub right_basis: CMat,
    pub sigma: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn from_reduced(reduced: ReducedOperator) -> Result<Self> {
        let eig = Eig::compute(&reduced.operator)?;
        let modes = &reduced.left_basis * &eig.vectors;
        let adjoint_modes = &eig.inverse * reduced.left_basis.adjoint();
        Ok(Self {
            rank: reduced.rank,
            singular_values: reduced.singular_values,
            eigenvalues: eig.values,
            reduced_operator: reduced.operator,
            reduced_eigenvectors: eig.vectors,
            modes,
            adjoint_modes,
            left_basis: reduced.left_basis,
            right_basis: reduced.right_basis,
            sigma: reduced.sigma,
        })
    }

    pub fn mode(&self, j: usize) -> Vec<c64> {
        (0..self.modes.nrows()).map(|i| self.modes[(i, j)]).collect()
    }

    /// `U_r K U_r*` applied to `z`.
    pub fn propagate(&self, z: &[c64]) -> Vec<c64> {
        let col = Mat::from_fn(z.len(), 1, |i, _| z[i]);
        let out = &self.left_basis * (&self.reduced_operator * (self.left_basis.adjoint() * &col));
        (0..out.nrows()).map(|i| out[(i, 0)]).collect()
    }
}

pub fn decompose(pair: &DelayMatrixPair, policy: TruncationPolicy) -> Result<SpectralDecomposition> {
    let svd = Svd::compute(&pair.x)?;
    let rank = select_rank(&svd.s, policy)?;
    decompose_with_svd(pair, &svd, rank)
}

/// Decomposition from shared SVD factors, for comparisons against the
/// matrix pencil computed from the same factors.
pub fn decompose_with_svd(pair: &DelayMatrixPair, svd: &Svd, rank: usize) -> Result<SpectralDecomposition> {
    SpectralDecomposition::from_reduced(ReducedOperator::from_svd(pair, svd, rank)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledModes {
    pub scalings: Vec<c64>,
    /// Recovered `v_j`, filled by [`recover_coefficients`].
    pub coefficients: Vec<Vec<c64>>,
}

/// `lambda^{-k}`, refusing to invert a zero eigenvalue for k > 0.
fn inverse_power(lambda: c64, k: i64) -> Result<c64> {
    if k == 0 {
        return Ok(c64::new(1.0, 0.0));
    }
    if k > 0 && lambda.norm() < ZERO_EIGENVALUE_TOL {
        return Err(Error::ZeroEigenvalue);
    }
    let k = i32::try_from(k).map_err(|_| Error::InvalidArgument("time index out of range".into()))?;
    Ok(lambda.powi(-k))
}

/// Averaged scalings `c_j = mean_tau (V~^{-1} U_r* z(tau))_j lambda_j^{-tau}`
/// over `(tau, z(tau))` snapshots.
pub fn scale_modes(dec: &SpectralDecomposition, snapshots: &[(i64, Vec<c64>)]) -> Result<ScaledModes> {
    if snapshots.is_empty() {
        return Err(Error::InvalidArgument("no snapshots to scale against".into()));
    }
    let rows = dec.adjoint_modes.ncols();
    let mut sums = vec![c64::new(0.0, 0.0); dec.rank];
    for (tau, z) in snapshots {
        if z.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                got: z.len(),
            });
        }
        for (j, sum) in sums.iter_mut().enumerate() {
            let proj: c64 = (0..rows).map(|i| dec.adjoint_modes[(j, i)] * z[i]).sum();
            *sum += proj * inverse_power(dec.eigenvalues[j], *tau)?;
        }
    }
    let m = snapshots.len() as f64;
    Ok(ScaledModes {
        scalings: sums.into_iter().map(|s| s / m).collect(),
        coefficients: Vec::new(),
    })
}

/// Columns of `pair.x` tagged with times 0..M-1 (sequential data).
pub fn sequential_snapshots(pair: &DelayMatrixPair) -> Vec<(i64, Vec<c64>)> {
    (0..pair.x.ncols())
        .map(|m| (m as i64, (0..pair.x.nrows()).map(|r| pair.x[(r, m)]).collect()))
        .collect()
}

/// `v_j = 1/(d+1) sum_k (c_j w_j)[kn..(k+1)n] lambda_j^{-k}`.
pub fn recover_coefficients(
    dec: &SpectralDecomposition,
    scaled: &ScaledModes,
    n: usize,
    d: usize,
) -> Result<Vec<Vec<c64>>> {
    if n == 0 || dec.modes.nrows() != (d + 1) * n {
        return Err(Error::DimensionMismatch {
            expected: (d + 1) * n,
            got: dec.modes.nrows(),
        });
    }
    if scaled.scalings.len() != dec.rank {
        return Err(Error::DimensionMismatch {
            expected: dec.rank,
            got: scaled.scalings.len(),
        });
    }
    (0..dec.rank)
        .map(|j| {
            let mut v = vec![c64::new(0.0, 0.0); n];
            for k in 0..=d {
                let back = inverse_power(dec.eigenvalues[j], k as i64)?;
                for (c, vc) in v.iter_mut().enumerate() {
                    *vc += scaled.scalings[j] * dec.modes[(k * n + c, j)] * back;
                }
            }
            Ok(v.into_iter().map(|z| z / (d + 1) as f64).collect())
        })
        .collect()
}

/// `z(t) ~ sum_j c_j w_j lambda_j^t`.
pub fn reconstruct(dec: &SpectralDecomposition, scaled: &ScaledModes, t: i64) -> Vec<c64> {
    let rows = dec.modes.nrows();
    let mut out = vec![c64::new(0.0, 0.0); rows];
    for j in 0..dec.rank {
        let p = scaled.scalings[j] * dec.eigenvalues[j].powi(t as i32);
        for (i, o) in out.iter_mut().enumerate() {
            *o += dec.modes[(i, j)] * p;
        }
    }
    out
}

/// `||Z_hat - Z||_F / ||Z||_F` over the given snapshots.
pub fn reconstruction_error(dec: &SpectralDecomposition, scaled: &ScaledModes, snapshots: &[(i64, Vec<c64>)]) -> f64 {
    let mut err = 0.0;
    let mut norm = 0.0;
    for (t, z) in snapshots {
        let zh = reconstruct(dec, scaled, *t);
        err += zh.iter().zip(z).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        norm += z.iter().map(|a| a.norm_sqr()).sum::<f64>();
    }
    if norm == 0.0 {
        err.sqrt()
    } else {
        (err / norm).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::{build_single_series, real_series};
    use crate::signal_model::{synthesize, DampedSinusoidModel};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    fn scalar_series(coeffs: &[c64], freqs: &[c64], len: usize) -> Vec<Vec<c64>> {
        let m = DampedSinusoidModel::scalar(coeffs, freqs).unwrap();
        synthesize(&m, len, 0.0, 0, false).unwrap()
    }

    #[test]
    fn gap_on_exact_rank_one() {
        assert_eq!(select_rank(&[1.0, 0.0, 0.0], TruncationPolicy::gap()).unwrap(), 1);
    }

    #[test]
    fn fixed_and_energy_policies() {
        let s = [4.0, 2.0, 1.0, 0.0];
        assert_eq!(select_rank(&s, TruncationPolicy::FixedRank(10)).unwrap(), 3);
        assert_eq!(select_rank(&s, TruncationPolicy::FixedRank(2)).unwrap(), 2);
        // energies 16, 4, 1 of 21
        assert_eq!(select_rank(&s, TruncationPolicy::Energy(0.7)).unwrap(), 1);
        assert_eq!(select_rank(&s, TruncationPolicy::Energy(0.9)).unwrap(), 2);
        assert_eq!(select_rank(&s, TruncationPolicy::Energy(0.99)).unwrap(), 3);
    }

    #[test]
    fn zero_spectrum_and_bad_policies() {
        assert_eq!(select_rank(&[0.0, 0.0], TruncationPolicy::gap()), Err(Error::ZeroData));
        assert!(select_rank(&[1.0], TruncationPolicy::FixedRank(0)).is_err());
        assert!(select_rank(&[1.0], TruncationPolicy::Energy(1.5)).is_err());
        assert!(select_rank(&[], TruncationPolicy::gap()).is_err());
    }

    #[test]
    fn gap_finds_constructed_rank_three() {
        // Three outer products plus a perturbation of norm 1e-6.
        let mut x = Mat::<c64>::zeros(9, 7);
        for k in 0..3 {
            let u: Vec<c64> = (0..9).map(|i| c(((i * (k + 2)) % 5) as f64 - 2.0, (i + k) as f64 * 0.1)).collect();
            let v: Vec<c64> = (0..7).map(|j| c(((j + 3 * k) % 4) as f64 + 0.5, -0.2 * j as f64)).collect();
            for i in 0..9 {
                for j in 0..7 {
                    x[(i, j)] += u[i] * v[j] * (3 - k) as f64;
                }
            }
        }
        let mut noise = Mat::<c64>::from_fn(9, 7, |i, j| c(((i * 7 + j) as f64).sin(), ((i + 3 * j) as f64).cos()));
        let scale = 1e-6 / linalg::fro(&noise);
        noise = Mat::from_fn(9, 7, |i, j| noise[(i, j)] * scale);
        let svd = Svd::compute(&(&x + &noise)).unwrap();
        assert_eq!(select_rank(&svd.s, TruncationPolicy::gap()).unwrap(), 3);
    }

    #[test]
    fn identical_pair_gives_identity_operator() {
        let x = Mat::from_fn(3, 3, |i, j| c(if i == j { 2.0 + i as f64 } else { 0.3 }, (i as f64 - j as f64) * 0.1));
        let pair = DelayMatrixPair {
            x: x.clone(),
            y: x,
            arrangement: crate::hankel::Arrangement::Snapshots,
            n: 3,
            d: 0,
            series_count: None,
        };
        let red = reduced_operator(&pair, 3).unwrap();
        let id = Mat::<c64>::identity(3, 3);
        assert!(linalg::fro(&(&red.operator - &id)) < 1e-12);
    }

    #[test]
    fn rank_one_geometric_series() {
        let y = scalar_series(&[c(1.0, 0.0)], &[c(0.9, 0.0)], 6);
        let pair = build_single_series(&y, 1).unwrap();
        let red = reduced_operator(&pair, 1).unwrap();
        assert!((red.operator[(0, 0)] - c(0.9, 0.0)).norm() < 1e-12);
        assert_eq!(
            reduced_operator(&pair, 2).unwrap_err(),
            Error::TruncationBeyondRank {
                requested: 2,
                available: 1
            }
        );
    }

    #[test]
    fn single_decaying_mode() {
        let y = scalar_series(&[c(2.0, 0.0)], &[c(0.5, 0.0)], 8);
        let pair = build_single_series(&y, 1).unwrap();
        let dec = decompose(&pair, TruncationPolicy::gap()).unwrap();
        assert_eq!(dec.rank, 1);
        assert!((dec.eigenvalues[0] - c(0.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn two_frequency_recovery() {
        let freqs = [c64::from_polar(1.0, 0.3), c64::from_polar(1.0, 0.7)];
        let y = scalar_series(&[c(1.0, 0.2), c(-0.4, 0.9)], &freqs, 20);
        let pair = build_single_series(&y, 3).unwrap();
        let dec = decompose(&pair, TruncationPolicy::FixedRank(2)).unwrap();
        let (_, worst) = linalg::match_eigenvalues(&dec.eigenvalues, &freqs);
        assert!(worst < 1e-8, "worst {worst}");
    }

    #[test]
    fn scaling_of_consistent_snapshots() {
        let lambda = c64::from_polar(0.95, 0.6);
        let y = scalar_series(&[c(1.5, -1.0)], &[lambda], 10);
        let pair = build_single_series(&y, 2).unwrap();
        let dec = decompose(&pair, TruncationPolicy::FixedRank(1)).unwrap();
        let snaps = sequential_snapshots(&pair);
        let scaled = scale_modes(&dec, &snaps).unwrap();
        // z(t) = c w lambda^t with w the unit mode: c = <w, z(0)>.
        let z0 = &snaps[0].1;
        let w = dec.mode(0);
        let expect: c64 = w.iter().zip(z0).map(|(a, b)| a.conj() * b).sum();
        assert!((scaled.scalings[0] - expect).norm() < 1e-10);

        let single = scale_modes(&dec, &snaps[..1]).unwrap();
        let direct: c64 = (0..z0.len()).map(|i| dec.adjoint_modes[(0, i)] * z0[i]).sum();
        assert_eq!(single.scalings[0], direct);
    }

    #[test]
    fn zero_eigenvalue_guard() {
        let pair = build_single_series(&real_series(&[1.0, 0.0, 0.0, 0.0]), 0).unwrap();
        let dec = decompose(&pair, TruncationPolicy::FixedRank(1)).unwrap();
        assert!(dec.eigenvalues[0].norm() < 1e-12);
        let snaps = vec![(0, vec![c(1.0, 0.0)]), (1, vec![c(0.0, 0.0)])];
        assert_eq!(scale_modes(&dec, &snaps).unwrap_err(), Error::ZeroEigenvalue);
        assert!(scale_modes(&dec, &snaps[..1]).is_ok());
    }

    #[test]
    fn coefficient_recovery() {
        let lambda = c64::from_polar(1.0, 0.2);
        let y = scalar_series(&[c(3.0, 4.0)], &[lambda], 12);
        let pair = build_single_series(&y, 4).unwrap();
        let dec = decompose(&pair, TruncationPolicy::FixedRank(1)).unwrap();
        let scaled = scale_modes(&dec, &sequential_snapshots(&pair)).unwrap();
        let v = recover_coefficients(&dec, &scaled, 1, 4).unwrap();
        assert!((v[0][0] - c(3.0, 4.0)).norm() < 1e-9);
    }

    #[test]
    fn no_delay_coefficients_are_scaled_modes() {
        let y = scalar_series(&[c(2.0, 1.0)], &[c(0.8, 0.1)], 6);
        let pair = build_single_series(&y, 0).unwrap();
        let dec = decompose(&pair, TruncationPolicy::FixedRank(1)).unwrap();
        let scaled = scale_modes(&dec, &sequential_snapshots(&pair)).unwrap();
        let v = recover_coefficients(&dec, &scaled, 1, 0).unwrap();
        assert_eq!(v[0][0], scaled.scalings[0] * dec.modes[(0, 0)]);
    }

    #[test]
    fn real_data_gives_conjugate_coefficients() {
        let m = DampedSinusoidModel::scalar(&[c(1.2, 0.7)], &[c64::from_polar(0.98, 0.9)]).unwrap();
        let y = synthesize(&m, 25, 0.0, 0, true).unwrap();
        let pair = build_single_series(&y, 4).unwrap();
        let dec = decompose(&pair, TruncationPolicy::FixedRank(2)).unwrap();
        let scaled = scale_modes(&dec, &sequential_snapshots(&pair)).unwrap();
        let v = recover_coefficients(&dec, &scaled, 1, 4).unwrap();
        assert!((dec.eigenvalues[0] - dec.eigenvalues[1].conj()).norm() < 1e-9);
        assert!((v[0][0] - v[1][0].conj()).norm() < 1e-9);
        // Re(a lambda^t) = (a lambda^t + conj) / 2
        let half = c(0.6, 0.35);
        let pos = if dec.eigenvalues[0].im > 0.0 { 0 } else { 1 };
        assert!((v[pos][0] - half).norm() < 1e-8);
    }

    #[test]
    fn reconstruction_of_exact_rank_data() {
        let freqs = [c64::from_polar(0.99, 0.5), c64::from_polar(0.9, -1.3), c(0.7, 0.0)];
        let y = scalar_series(&[c(1.0, 0.0), c(0.5, 0.5), c(-2.0, 0.1)], &freqs, 30);
        let pair = build_single_series(&y, 5).unwrap();
        let dec = decompose(&pair, TruncationPolicy::FixedRank(3)).unwrap();
        let snaps = sequential_snapshots(&pair);
        let scaled = scale_modes(&dec, &snaps).unwrap();
        for (t, z) in &snaps {
            let zh = reconstruct(&dec, &scaled, *t);
            let err: f64 = zh.iter().zip(z).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let norm: f64 = z.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            assert!(err < 1e-8 * norm, "t={t}");
        }
        let z0 = reconstruct(&dec, &scaled, 0);
        for i in 0..z0.len() {
            let s: c64 = (0..3).map(|j| scaled.scalings[j] * dec.modes[(i, j)]).sum();
            assert!((z0[i] - s).norm() < 1e-14);
        }
    }

    #[test]
    fn constant_signal_reconstructs_constant() {
        let pair = build_single_series(&real_series(&[2.5; 6]), 1).unwrap();
        let dec = decompose(&pair, TruncationPolicy::gap()).unwrap();
        assert_eq!(dec.rank, 1);
        let scaled = scale_modes(&dec, &sequential_snapshots(&pair)).unwrap();
        let a = reconstruct(&dec, &scaled, 0);
        let b = reconstruct(&dec, &scaled, 9);
        assert!((a[0] - b[0]).norm() < 1e-10);
    }

    #[test]
    fn lift_consistency_and_biorthogonality() {
        let freqs = [c64::from_polar(1.0, 0.4), c64::from_polar(0.97, 1.9)];
        let y = scalar_series(&[c(1.0, 1.0), c(0.3, -0.8)], &freqs, 24);
        let pair = build_single_series(&y, 6).unwrap();
        let dec = decompose(&pair, TruncationPolicy::FixedRank(2)).unwrap();
        let prod = &dec.adjoint_modes * &dec.modes;
        assert!(linalg::fro(&(&prod - Mat::<c64>::identity(2, 2))) < 1e-8);
        let snaps = sequential_snapshots(&pair);
        for w in snaps.windows(2) {
            let next = dec.propagate(&w[0].1);
            let err: f64 = next.iter().zip(&w[1].1).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let norm: f64 = w[1].1.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            assert!(err < 1e-8 * norm);
        }
    }

    proptest! {
        #[test]
        fn conjugate_closure_on_real_data(vals in prop::collection::vec(-3.0f64..3.0, 16..40), d in 2usize..6, rank in 1usize..5) {
            let pair = build_single_series(&real_series(&vals), d).unwrap();
            prop_assume!(rank <= pair.rows().min(pair.cols()));
            let dec = match decompose(&pair, TruncationPolicy::FixedRank(rank)) {
                Ok(dec) => dec,
                Err(_) => return Ok(()),
            };
            prop_assert!(dec.singular_values.windows(2).all(|w| w[0] >= w[1]));
            let conj: Vec<c64> = dec.eigenvalues.iter().map(|z| z.conj()).collect();
            let (_, worst) = linalg::match_eigenvalues(&dec.eigenvalues, &conj);
            prop_assert!(worst < 1e-8 * dec.eigenvalues[0].norm().max(1.0));
        }
    }
}
