//! PSD certification and rank factorization.
//!
//! Every PSD verdict in the crate comes from one oracle: a full Hermitian
//! eigendecomposition. Each verdict therefore carries the minimum eigenvalue
//! and a witness eigenvector, at the cost of being slower than a Cholesky
//! probe — irrelevant at the dense desk-scale dimensions handled here.

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Coefficient of the relative tolerance policy: a matrix passes when
/// `min_eig >= -DEFAULT_TOL_COEFF * scale`, with `scale = max(1, max |diag|)`.
pub const DEFAULT_TOL_COEFF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Psd,
    NotPsd,
}

impl Verdict {
    pub fn is_psd(self) -> bool {
        matches!(self, Verdict::Psd)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Psd => "psd",
            Verdict::NotPsd => "not_psd",
        }
    }
}

/// Outcome of a PSD check: verdict, extremal eigenvalue, the unit eigenvector
/// attaining it, the eigenvalue count above tolerance, and the full spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdReport {
    pub verdict: Verdict,
    pub min_eigenvalue: f64,
    pub tolerance_used: f64,
    pub witness: Vec<Complex64>,
    pub numerical_rank: usize,
    pub eigenvalues: Vec<f64>,
}

/// Default absolute tolerance for `a`: `DEFAULT_TOL_COEFF * scale(a)`.
pub fn default_tolerance(a: &HermitianMatrix) -> f64 {
    DEFAULT_TOL_COEFF * a.scale()
}

/// Full spectrum ascending, eigenvectors in matching column order.
/// Deterministic: identical input bits give identical output bits.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let se = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// PSD check at the default relative tolerance.
pub fn psd_check(a: &HermitianMatrix) -> Result<PsdReport> {
    psd_check_tol(a, default_tolerance(a))
}

/// PSD check at an absolute eigenvalue tolerance `tol >= 0`.
pub fn psd_check_tol(a: &HermitianMatrix, tol: f64) -> Result<PsdReport> {
    if let Some((row, col)) = a.first_non_finite() {
        return Err(Error::NonFiniteEntry { row, col });
    }
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::InvalidTolerance {
            tol,
            requirement: "finite and >= 0",
        });
    }
    let (values, vectors) = hermitian_eigen(a.matrix());
    let min_eigenvalue = values[0];
    let mut witness: Vec<Complex64> = vectors.column(0).iter().copied().collect();
    let norm = witness.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in &mut witness {
            *v /= norm;
        }
    }
    let numerical_rank = values.iter().filter(|&&v| v > tol).count();
    let verdict = if min_eigenvalue >= -tol {
        Verdict::Psd
    } else {
        Verdict::NotPsd
    };
    Ok(PsdReport {
        verdict,
        min_eigenvalue,
        tolerance_used: tol,
        witness,
        numerical_rank,
        eigenvalues: values,
    })
}

/// `sum_m a[m] * conj(b[m])` — the row-vector product `a b*`.
pub fn dot_adjoint(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x * y.conj())
        .sum()
}

/// Factors a PSD matrix as `A_ij = v_i v_j*` with row vectors of length
/// `r = #{eigenvalues > tol}`. Eigenvalues in `[-tol, tol]` are clamped to
/// zero and dropped. Any `V` with `V V* = A` is equally valid, so compare
/// reconstructions, never the factors themselves.
pub fn rank_factorization(a: &HermitianMatrix, tol: f64) -> Result<Vec<Vec<Complex64>>> {
    let report = psd_check_tol(a, tol)?;
    if !report.verdict.is_psd() {
        return Err(Error::NotPsd {
            min_eigenvalue: report.min_eigenvalue,
        });
    }
    let (values, vectors) = hermitian_eigen(a.matrix());
    let n = a.dim();
    // dominant eigenvalue first
    let kept: Vec<usize> = (0..n).rev().filter(|&m| values[m] > tol).collect();
    let mut factors = vec![Vec::with_capacity(kept.len()); n];
    for &m in &kept {
        let s = values[m].max(0.0).sqrt();
        for (i, f) in factors.iter_mut().enumerate() {
            f.push(vectors[(i, m)] * s);
        }
    }
    Ok(factors)
}

/// Largest entrywise error of the reconstruction `v_i v_j*` against `a`.
pub fn reconstruction_error(a: &HermitianMatrix, factors: &[Vec<Complex64>]) -> f64 {
    let n = a.dim();
    let mut err = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            err = err.max((dot_adjoint(&factors[i], &factors[j]) - a.get(i, j)).norm());
        }
    }
    err
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_psd_with_unit_spectrum() {
        let id = HermitianMatrix::identity(2).unwrap();
        let rep = psd_check(&id).unwrap();
        assert!(rep.verdict.is_psd());
        assert!((rep.min_eigenvalue - 1.0).abs() < 1e-14);
        assert_eq!(rep.numerical_rank, 2);
        assert_eq!(rep.eigenvalues.len(), 2);
    }

    #[test]
    fn zero_matrix_is_psd_rank_zero() {
        let z = HermitianMatrix::zeros(3).unwrap();
        let rep = psd_check(&z).unwrap();
        assert!(rep.verdict.is_psd());
        assert_eq!(rep.min_eigenvalue, 0.0);
        assert_eq!(rep.numerical_rank, 0);
    }

    #[test]
    fn indefinite_two_by_two() {
        // eigenvalues of [[a, b], [b, a]] are a ± b
        let m =
            HermitianMatrix::from_real_rows(&[vec![0.4375, -0.5625], vec![-0.5625, 0.4375]])
                .unwrap();
        let rep = psd_check(&m).unwrap();
        assert_eq!(rep.verdict, Verdict::NotPsd);
        assert!((rep.min_eigenvalue - (-0.125)).abs() < 1e-12);
    }

    #[test]
    fn witness_is_unit_and_attains_min_eigenvalue() {
        let m = HermitianMatrix::from_fn(3, |i, j| {
            Complex64::new(
                if i == j { 2.0 } else { 0.3 },
                if i < j { 0.4 } else if i > j { -0.4 } else { 0.0 },
            )
        })
        .unwrap();
        let rep = psd_check(&m).unwrap();
        let norm: f64 = rep.witness.iter().map(|v| v.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        // rayleigh quotient w* A w against the reported eigenvalue
        let mut q = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                q += rep.witness[i].conj() * m.get(i, j) * rep.witness[j];
            }
        }
        assert!((q.re - rep.min_eigenvalue).abs() <= 10.0 * rep.tolerance_used * m.scale());
        assert!(q.im.abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_tolerance() {
        let id = HermitianMatrix::identity(2).unwrap();
        assert!(matches!(
            psd_check_tol(&id, -1.0),
            Err(Error::InvalidTolerance { .. })
        ));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let m = HermitianMatrix::from_fn(2, |i, j| {
            if i == 0 && j == 0 {
                Complex64::new(f64::NAN, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .unwrap();
        assert!(matches!(
            psd_check(&m),
            Err(Error::NonFiniteEntry { .. })
        ));
    }

    #[test]
    fn rank_one_all_ones_factorization() {
        let m = HermitianMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let f = rank_factorization(&m, default_tolerance(&m)).unwrap();
        assert_eq!(f[0].len(), 1);
        assert!(reconstruction_error(&m, &f) < 1e-12);
        // factors of both rows agree up to the shared unit phase
        assert!((f[0][0] - f[1][0]).norm() < 1e-12);
        assert!((f[0][0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_factorization_is_orthonormal() {
        let id = HermitianMatrix::identity(2).unwrap();
        let f = rank_factorization(&id, default_tolerance(&id)).unwrap();
        assert_eq!(f[0].len(), 2);
        assert!((dot_adjoint(&f[0], &f[0]).re - 1.0).abs() < 1e-12);
        assert!((dot_adjoint(&f[1], &f[1]).re - 1.0).abs() < 1e-12);
        assert!(dot_adjoint(&f[0], &f[1]).norm() < 1e-12);
    }

    #[test]
    fn factorization_refuses_indefinite_input() {
        let m =
            HermitianMatrix::from_real_rows(&[vec![0.4375, -0.5625], vec![-0.5625, 0.4375]])
                .unwrap();
        assert!(matches!(
            rank_factorization(&m, default_tolerance(&m)),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn trace_matches_eigenvalue_sum() {
        let m = HermitianMatrix::from_fn(4, |i, j| {
            Complex64::new(1.0 / (1.0 + i as f64 + j as f64), 0.1 * (j as f64 - i as f64))
        })
        .unwrap();
        let rep = psd_check(&m).unwrap();
        let sum: f64 = rep.eigenvalues.iter().sum();
        assert!((sum - m.trace()).abs() <= 1e-9 * m.dim() as f64 * m.scale());
    }
}
