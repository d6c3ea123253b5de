//! The quotient criterion kernel `F_z`, the Schur-complement kernel `k^z`,
//! the finite-sample positivity sweep over base points, and irreducibility
//! diagnostics.
//!
//! For a kernel `k` and base point `z`,
//!
//! ```text
//! F_z(x, y) = 1 - k(x,z) k(z,y) / (k(z,z) k(x,y))
//! k^z(x, y) = k(x,y) - k(x,z) k(z,y) / k(z,z)
//! ```
//!
//! `k^z` is the Schur complement of the `(z,z)` entry in the Gram of
//! `sample + {z}`, and `F_z . k = k^z` entrywise.

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::kernel::{assemble_gram, KernelSpec, VANISHING_COEFF};
use crate::par;
use crate::point::{Point, PointSet};
use crate::psd::{psd_check, PsdReport, DEFAULT_TOL_COEFF};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// One base point's criterion matrix together with its PSD verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub base_point: Point,
    pub sample: PointSet,
    /// Gram of `F_z` over the sample, symmetrized.
    pub gram: HermitianMatrix,
    pub psd: PsdReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrreducibilityReport {
    /// No sampled kernel value vanishes (within `1e-14 * scale`).
    pub nonvanishing: bool,
    /// Every 2x2 Gram determinant `k(x,x)k(y,y) - |k(x,y)|^2` is strictly
    /// positive for distinct points.
    pub independent_pairs: bool,
    /// Index pairs that failed either test.
    pub offending_pairs: Vec<(usize, usize)>,
}

/// Gram of `sample + {z}` plus the vanishing threshold derived from it.
struct AugmentedGram {
    full: HermitianMatrix,
    threshold: f64,
}

fn augmented_gram(spec: &KernelSpec, z: Point, sample: &PointSet) -> Result<AugmentedGram> {
    let full = assemble_gram(spec, &sample.append(z))?;
    let threshold = VANISHING_COEFF * full.scale();
    Ok(AugmentedGram { full, threshold })
}

/// Raw `F_z` matrix over the sample, Hermitian-symmetrized but not yet
/// PSD-checked. The quotient needs `k(z,z) != 0` and `k(x_i,x_j) != 0`.
pub(crate) fn fz_matrix(
    spec: &KernelSpec,
    z: Point,
    sample: &PointSet,
) -> Result<HermitianMatrix> {
    let n = sample.len();
    let aug = augmented_gram(spec, z, sample)?;
    let kzz = aug.full.get(n, n);
    if kzz.norm() <= aug.threshold {
        return Err(Error::VanishingKernel { x: z, y: z });
    }
    for i in 0..n {
        for j in i..n {
            if aug.full.get(i, j).norm() <= aug.threshold {
                return Err(Error::VanishingKernel {
                    x: sample.get(i),
                    y: sample.get(j),
                });
            }
        }
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let gi = aug.full.get(i, n); // k(x_i, z)
        for j in 0..n {
            let gj_conj = aug.full.get(j, n).conj(); // k(z, x_j)
            m[(i, j)] = Complex64::new(1.0, 0.0) - gi * gj_conj / (kzz * aug.full.get(i, j));
        }
    }
    HermitianMatrix::new(m)
}

/// Criterion matrix of `F_z` over the sample with its PSD verdict at the
/// default tolerance. If `z` itself occurs in the sample, its row and column
/// vanish by cancellation.
pub fn fz_gram(spec: &KernelSpec, z: Point, sample: &PointSet) -> Result<CriterionReport> {
    let gram = fz_matrix(spec, z, sample)?;
    let psd = psd_check(&gram)?;
    Ok(CriterionReport {
        base_point: z,
        sample: sample.clone(),
        gram,
        psd,
    })
}

/// Raw `k^z` matrix over the sample. Needs `k(z,z) > 0`.
pub(crate) fn kz_matrix(
    spec: &KernelSpec,
    z: Point,
    sample: &PointSet,
) -> Result<HermitianMatrix> {
    let n = sample.len();
    let aug = augmented_gram(spec, z, sample)?;
    let kzz = aug.full.get(n, n);
    if kzz.re <= aug.threshold {
        return Err(Error::DegenerateBasePoint { value: kzz.re });
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let gi = aug.full.get(i, n);
        for j in 0..n {
            let gj_conj = aug.full.get(j, n).conj();
            m[(i, j)] = aug.full.get(i, j) - gi * gj_conj / kzz;
        }
    }
    HermitianMatrix::new(m)
}

/// Gram of the Schur-complement kernel `k^z` over the sample. Equals the
/// Schur complement of the `(z,z)` entry in the Gram of `sample + {z}`, and
/// is PSD whenever that ambient Gram is.
pub fn schur_complement_gram(
    spec: &KernelSpec,
    z: Point,
    sample: &PointSet,
) -> Result<HermitianMatrix> {
    kz_matrix(spec, z, sample)
}

/// Runs `fz_gram` for every base point, in input order. This is a
/// finite-sample necessary test of the quotient-criterion positivity, not a
/// proof over the whole domain: positivity must hold for *every* base point,
/// and only the supplied ones are checked.
///
/// Base points are evaluated concurrently when the `parallel` feature is on;
/// report order matches input order either way.
pub fn cpp_check(
    spec: &KernelSpec,
    base_points: &PointSet,
    sample: &PointSet,
) -> Result<Vec<CriterionReport>> {
    par::try_map_enumerated(base_points.points(), |index, &z| {
        fz_gram(spec, z, sample).map_err(|source| Error::AtBasePoint {
            index,
            point: z,
            source: Box::new(source),
        })
    })
}

/// True when every report in a sweep is PSD.
pub fn all_psd(reports: &[CriterionReport]) -> bool {
    reports.iter().all(|r| r.psd.verdict.is_psd())
}

/// Non-vanishing and pairwise-independence diagnostics over a sample.
/// Reports, never fails, beyond kernel-domain errors.
pub fn irreducibility_check(
    spec: &KernelSpec,
    sample: &PointSet,
) -> Result<IrreducibilityReport> {
    let g = assemble_gram(spec, sample)?;
    let n = sample.len();
    let vanish_thr = VANISHING_COEFF * g.scale();
    // determinants are quadratic in k, so the threshold uses scale^2
    let det_thr = DEFAULT_TOL_COEFF * g.scale() * g.scale();
    let mut nonvanishing = true;
    let mut independent_pairs = true;
    let mut offending = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut bad = false;
            if g.get(i, j).norm() <= vanish_thr {
                nonvanishing = false;
                bad = true;
            }
            if i != j {
                let det = g.diag(i) * g.diag(j) - g.get(i, j).norm_sqr();
                if det <= det_thr {
                    independent_pairs = false;
                    bad = true;
                }
            }
            if bad {
                offending.push((i, j));
            }
        }
    }
    Ok(IrreducibilityReport {
        nonvanishing,
        independent_pairs,
        offending_pairs: offending,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psd::Verdict;

    #[test]
    fn szego_fz_at_origin_is_product_kernel() {
        // F_0(x, y) = x conj(y) for the szego kernel
        let sample = PointSet::from_reals(&[0.5, -0.5]).unwrap();
        let rep = fz_gram(&KernelSpec::Szego, Point::real(0.0), &sample).unwrap();
        let expect = [[0.25, -0.25], [-0.25, 0.25]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (rep.gram.get(i, j) - Complex64::new(expect[i][j], 0.0)).norm() < 1e-15,
                    "entry ({i},{j})"
                );
            }
        }
        assert!(rep.psd.verdict.is_psd());
        // spectrum {0, 1/2}
        assert!(rep.psd.min_eigenvalue.abs() < 1e-12);
        assert!((rep.psd.eigenvalues[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bergman_fz_counterexample() {
        let sample = PointSet::from_reals(&[0.5, -0.5]).unwrap();
        let rep = fz_gram(&KernelSpec::Bergman, Point::real(0.0), &sample).unwrap();
        let expect = [[0.4375, -0.5625], [-0.5625, 0.4375]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (rep.gram.get(i, j) - Complex64::new(expect[i][j], 0.0)).norm() < 1e-12
                );
            }
        }
        assert_eq!(rep.psd.verdict, Verdict::NotPsd);
        assert!((rep.psd.min_eigenvalue - (-0.125)).abs() < 1e-9);
    }

    #[test]
    fn fz_row_vanishes_when_base_point_in_sample() {
        let sample = PointSet::from_reals(&[0.3, -0.2, 0.25]).unwrap();
        let z = Point::real(0.25);
        for spec in [KernelSpec::Szego, KernelSpec::Bergman] {
            let rep = fz_gram(&spec, z, &sample).unwrap();
            let scale = rep.gram.scale();
            for i in 0..3 {
                assert!(rep.gram.get(i, 2).norm() <= 1e-12 * scale);
                assert!(rep.gram.get(2, i).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn fz_diagonal_nonnegative() {
        let sample = PointSet::random_in_disk(6, 0.8, 3).unwrap();
        let z = Point::new(0.1, -0.4);
        for spec in [
            KernelSpec::Szego,
            KernelSpec::Bergman,
            KernelSpec::power(0.5).unwrap(),
        ] {
            let rep = fz_gram(&spec, z, &sample).unwrap();
            for i in 0..sample.len() {
                assert!(rep.gram.diag(i) >= -1e-12);
            }
        }
    }

    #[test]
    fn fz_vanishing_kernel_detected() {
        // tabulated kernel with a zero off-diagonal value
        let pts = PointSet::from_reals(&[0.0, 0.5, -0.5]).unwrap();
        let m = HermitianMatrix::from_real_rows(&[
            vec![1.0, 0.0, 0.3],
            vec![0.0, 1.0, 0.2],
            vec![0.3, 0.2, 1.0],
        ])
        .unwrap();
        let spec = KernelSpec::gram_table(m, pts.clone()).unwrap();
        let sample = pts.prefix(2);
        let err = fz_gram(&spec, pts.get(2), &sample).unwrap_err();
        assert!(matches!(err, Error::VanishingKernel { .. }));
    }

    #[test]
    fn kz_szego_single_point() {
        // k^0(x, y) = x conj(y) / (1 - x conj(y)); at x = y = 1/2 this is 1/3
        let sample = PointSet::from_reals(&[0.5]).unwrap();
        let m = schur_complement_gram(&KernelSpec::Szego, Point::real(0.0), &sample).unwrap();
        assert!((m.get(0, 0).re - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn kz_vanishes_at_base_point() {
        let z = Point::new(0.2, 0.3);
        let sample = PointSet::new(vec![z]).unwrap();
        for spec in [KernelSpec::Szego, KernelSpec::power(1.7).unwrap()] {
            let m = schur_complement_gram(&spec, z, &sample).unwrap();
            assert!(m.get(0, 0).norm() < 1e-13);
        }
    }

    #[test]
    fn kz_two_point_szego_is_psd() {
        let sample = PointSet::from_reals(&[0.5, -0.5]).unwrap();
        let m = schur_complement_gram(&KernelSpec::Szego, Point::real(0.0), &sample).unwrap();
        assert!(psd_check(&m).unwrap().verdict.is_psd());
    }

    #[test]
    fn degenerate_base_point_rejected() {
        let pts = PointSet::from_reals(&[0.0, 0.5]).unwrap();
        let m = HermitianMatrix::from_real_rows(&[vec![1.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let spec = KernelSpec::gram_table(m, pts.clone()).unwrap();
        let sample = pts.prefix(1);
        let err = schur_complement_gram(&spec, pts.get(1), &sample).unwrap_err();
        assert!(matches!(err, Error::DegenerateBasePoint { .. }));
    }

    #[test]
    fn cpp_check_szego_random_sweep_all_psd() {
        let bases = PointSet::random_in_disk(5, 0.85, 11).unwrap();
        let sample = PointSet::random_in_disk(10, 0.85, 12).unwrap();
        let reports = cpp_check(&KernelSpec::Szego, &bases, &sample).unwrap();
        assert_eq!(reports.len(), 5);
        assert!(all_psd(&reports));
        // order follows input order
        for (i, rep) in reports.iter().enumerate() {
            assert_eq!(rep.base_point, bases.get(i));
        }
    }

    #[test]
    fn cpp_check_bergman_counterexample_flagged() {
        let bases = PointSet::from_reals(&[0.0]).unwrap();
        let sample = PointSet::from_reals(&[0.5, -0.5]).unwrap();
        let reports = cpp_check(&KernelSpec::Bergman, &bases, &sample).unwrap();
        assert!(!all_psd(&reports));
        assert!((reports[0].psd.min_eigenvalue - (-0.125)).abs() < 1e-9);
    }

    #[test]
    fn cpp_check_power_one_matches_szego_bitwise() {
        let bases = PointSet::random_in_disk(4, 0.7, 21).unwrap();
        let sample = PointSet::random_in_disk(7, 0.7, 22).unwrap();
        let a = cpp_check(&KernelSpec::Szego, &bases, &sample).unwrap();
        let b = cpp_check(&KernelSpec::power(1.0).unwrap(), &bases, &sample).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cpp_check_tags_offending_base_point() {
        let pts = PointSet::from_reals(&[0.0, 0.5]).unwrap();
        let m = HermitianMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let spec = KernelSpec::gram_table(m, pts.clone()).unwrap();
        let err = cpp_check(&spec, &pts, &pts).unwrap_err();
        match err {
            Error::AtBasePoint { source, .. } => {
                assert!(matches!(*source, Error::VanishingKernel { .. }));
            }
            other => panic!("expected AtBasePoint, got {other:?}"),
        }
    }

    #[test]
    fn irreducibility_szego_pair() {
        let sample = PointSet::from_reals(&[0.0, 0.5]).unwrap();
        let rep = irreducibility_check(&KernelSpec::Szego, &sample).unwrap();
        assert!(rep.nonvanishing);
        assert!(rep.independent_pairs);
        assert!(rep.offending_pairs.is_empty());
    }

    #[test]
    fn irreducibility_single_point_vacuous() {
        let sample = PointSet::from_reals(&[0.3]).unwrap();
        let rep = irreducibility_check(&KernelSpec::Bergman, &sample).unwrap();
        assert!(rep.nonvanishing && rep.independent_pairs);
    }

    #[test]
    fn irreducibility_flags_duplicated_rows() {
        let pts = PointSet::from_reals(&[0.0, 0.5]).unwrap();
        let m = HermitianMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let spec = KernelSpec::gram_table(m, pts.clone()).unwrap();
        let rep = irreducibility_check(&spec, &pts).unwrap();
        assert!(rep.nonvanishing);
        assert!(!rep.independent_pairs);
        assert_eq!(rep.offending_pairs, vec![(0, 1)]);
    }
}
