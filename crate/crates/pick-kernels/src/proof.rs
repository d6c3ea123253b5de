//! Executable inductive positivity certificates.
//!
//! For a kernel `k` and an ordered point list, the engine replays the
//! inductive argument that positivity of the quotient criterion at one base
//! point propagates to the next: each step factors the zero-padded criterion
//! Gram, verifies the rank-one quotient identities, checks that the defect
//! built from the factors stays PSD over the Schur-complement kernel, and
//! Schur-multiplies back to the next criterion Gram. Every asserted matrix
//! fact is recorded as a named check, so a run is a falsifiable certificate:
//! all checks pass on kernels with the quotient-positivity property, and the
//! first failing check localizes the obstruction on kernels without it.

use crate::error::{Error, Result};
use crate::hermitian::{schur_product, HermitianMatrix};
use crate::kernel::{assemble_gram, KernelSpec, VANISHING_COEFF};
use crate::par;
use crate::pick::{fz_matrix, kz_matrix, CriterionReport};
use crate::point::PointSet;
use crate::psd::{dot_adjoint, psd_check_tol, rank_factorization, PsdReport};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Names of the per-step checks, in execution order.
pub mod check_names {
    pub const PADDED_ZERO_ROW: &str = "padded_zero_row";
    pub const PADDED_MATRIX_PSD: &str = "padded_matrix_psd";
    pub const FACTORIZATION_RESIDUAL: &str = "factorization_residual";
    pub const RANK_ONE_IDENTITY: &str = "rank_one_identity";
    pub const RANK_ONE_PSD: &str = "rank_one_psd";
    pub const COROLLARY_DEFECT_PSD: &str = "corollary_defect_psd";
    pub const COROLLARY_IDENTITY: &str = "corollary_identity";
    pub const SCALER_RANK_ONE_PSD: &str = "scaler_rank_one_psd";
    pub const CONCLUSION_IDENTITY: &str = "conclusion_identity";
    pub const CONCLUSION_PSD: &str = "conclusion_psd";
    pub const FINAL_CROSS_CHECK: &str = "final_cross_check";
    pub const BASE_CASE: &str = "base_case_diagonal";
}

const ZERO_ROW_COEFF: f64 = 1e-12;
// entrywise identities compound one factorization, so they get a looser
// budget than the PSD tolerance
const IDENTITY_RESIDUAL_COEFF: f64 = 1e-8;

/// One recorded matrix fact: a PSD verdict, a residual bound, or both.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedCheck {
    pub name: &'static str,
    pub passed: bool,
    pub psd: Option<PsdReport>,
    pub residual: Option<f64>,
}

impl NamedCheck {
    fn psd_check(name: &'static str, report: PsdReport) -> Self {
        NamedCheck {
            name,
            passed: report.verdict.is_psd(),
            psd: Some(report),
            residual: None,
        }
    }

    fn rank_one(name: &'static str, report: PsdReport) -> Self {
        NamedCheck {
            name,
            passed: report.verdict.is_psd() && report.numerical_rank == 1,
            psd: Some(report),
            residual: None,
        }
    }

    fn residual(name: &'static str, residual: f64, threshold: f64) -> Self {
        NamedCheck {
            name,
            passed: residual <= threshold,
            psd: None,
            residual: Some(residual),
        }
    }

    fn skipped(name: &'static str) -> Self {
        NamedCheck {
            name,
            passed: false,
            psd: None,
            residual: None,
        }
    }
}

/// Record of one induction step over the points `x_1, ..., x_{N+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InductionStepRecord {
    /// The `N + 1` points consumed by the step.
    pub points: PointSet,
    /// The criterion Gram at base point `x_N` over `x_1..x_N`; its last row
    /// and column vanish by cancellation (the zero-padded matrix).
    pub padded_matrix: HermitianMatrix,
    /// Row vectors with `padded_matrix[i][j] = v_i v_j*`; empty when the
    /// factorization could not run.
    pub factors: Vec<Vec<Complex64>>,
    /// `R_ij = k_iN k_Nj / k_NN`, rank one and PSD.
    pub rank_one_matrix: HermitianMatrix,
    /// `S_ij = k_NN / (k_iN k_Nj)`, the entrywise inverse of `R`.
    pub schur_scaler: HermitianMatrix,
    /// Criterion report at base point `x_{N+1}` over `x_1..x_N`.
    pub conclusion: CriterionReport,
    pub checks: Vec<NamedCheck>,
}

impl InductionStepRecord {
    /// The step label `n`: a step over `n + 1` points proves the criterion
    /// Gram on the first `n` points.
    pub fn step_index(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&NamedCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// One base-case scalar check `F_{x_z}(x, x) >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalCheck {
    pub x_index: usize,
    pub z_index: usize,
    pub value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertificateOutcome {
    Valid,
    InvalidAt { step: usize, check: String },
}

impl CertificateOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, CertificateOutcome::Valid)
    }
}

/// The full recorded chain: base case, induction steps over every prefix,
/// and a direct final cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofCertificate {
    pub kernel: KernelSpec,
    pub ordering: PointSet,
    pub base_case: Vec<DiagonalCheck>,
    pub steps: Vec<InductionStepRecord>,
    /// Direct PSD check of the criterion Gram at the last point over all
    /// earlier points; present when every step ran.
    pub final_cross_check: Option<PsdReport>,
    pub overall: CertificateOutcome,
}

fn check_all_pairs_nonvanishing(gram: &HermitianMatrix, points: &PointSet) -> Result<()> {
    let thr = VANISHING_COEFF * gram.scale();
    for i in 0..gram.dim() {
        for j in i..gram.dim() {
            if gram.get(i, j).norm() <= thr {
                return Err(Error::VanishingKernel {
                    x: points.get(i),
                    y: points.get(j),
                });
            }
        }
    }
    Ok(())
}

fn validate_tol(tol: f64) -> Result<()> {
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::InvalidTolerance {
            tol,
            requirement: "finite and >= 0",
        });
    }
    Ok(())
}

/// One induction step over `points = x_1, ..., x_{N+1}` (`N >= 2`).
///
/// Requires every pairwise kernel value to be non-vanishing and the
/// hypothesis Gram (criterion at `x_N` over `x_1..x_{N-1}`) to be PSD at
/// `tol`; those failures are errors. Everything the step asserts afterwards
/// is recorded as a named check and never raised: a failing check is
/// evidence about the kernel, exactly what the certificate exists to expose.
pub fn induction_step(
    spec: &KernelSpec,
    points: &PointSet,
    tol: f64,
) -> Result<InductionStepRecord> {
    validate_tol(tol)?;
    let m = points.len();
    if m < 3 {
        return Err(Error::PreconditionFailed(format!(
            "induction step needs at least 3 points, got {m}"
        )));
    }
    let n = m - 1; // conclusion dimension
    let mid = n - 1; // index of x_N
    let last = m - 1; // index of x_{N+1}

    let full = assemble_gram(spec, points)?;
    check_all_pairs_nonvanishing(&full, points)?;

    // hypothesis: criterion at x_N over x_1..x_{N-1}
    let hypothesis = fz_matrix(spec, points.get(mid), &points.prefix(n - 1))?;
    let hyp_report = psd_check_tol(&hypothesis, tol)?;
    if !hyp_report.verdict.is_psd() {
        return Err(Error::HypothesisFailed {
            min_eigenvalue: hyp_report.min_eigenvalue,
        });
    }

    let mut checks = Vec::with_capacity(10);

    // (1) the hypothesis padded with the vanishing row/column at x_N
    let padded = fz_matrix(spec, points.get(mid), &points.prefix(n))?;
    let mut zero_resid = 0.0f64;
    for i in 0..n {
        zero_resid = zero_resid
            .max(padded.get(i, n - 1).norm())
            .max(padded.get(n - 1, i).norm());
    }
    checks.push(NamedCheck::residual(
        check_names::PADDED_ZERO_ROW,
        zero_resid,
        ZERO_ROW_COEFF * padded.scale(),
    ));
    let padded_report = psd_check_tol(&padded, tol)?;
    let padded_ok = padded_report.verdict.is_psd();
    checks.push(NamedCheck::psd_check(
        check_names::PADDED_MATRIX_PSD,
        padded_report,
    ));

    // (2) factor A = V V*
    let factors = if padded_ok {
        rank_factorization(&padded, tol).ok()
    } else {
        None
    };
    match &factors {
        Some(v) => {
            let mut resid = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    resid = resid.max((dot_adjoint(&v[i], &v[j]) - padded.get(i, j)).norm());
                }
            }
            checks.push(NamedCheck::residual(
                check_names::FACTORIZATION_RESIDUAL,
                resid,
                IDENTITY_RESIDUAL_COEFF * padded.scale(),
            ));
        }
        None => checks.push(NamedCheck::skipped(check_names::FACTORIZATION_RESIDUAL)),
    }

    // R_ij = k_iN k_Nj / k_NN over the first N points
    let k_nn = full.get(mid, mid);
    let rank_one_matrix = HermitianMatrix::from_fn(n, |i, j| {
        full.get(i, mid) * full.get(mid, j) / k_nn
    })?;

    // (3) (1 - v_i v_j*) k_ij = R_ij, and R is rank-one PSD
    let identity_scale = IDENTITY_RESIDUAL_COEFF * full.scale().max(rank_one_matrix.scale());
    match &factors {
        Some(v) => {
            let mut resid = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let lhs = (Complex64::ONE - dot_adjoint(&v[i], &v[j])) * full.get(i, j);
                    resid = resid.max((lhs - rank_one_matrix.get(i, j)).norm());
                }
            }
            checks.push(NamedCheck::residual(
                check_names::RANK_ONE_IDENTITY,
                resid,
                identity_scale,
            ));
        }
        None => checks.push(NamedCheck::skipped(check_names::RANK_ONE_IDENTITY)),
    }
    checks.push(NamedCheck::rank_one(
        check_names::RANK_ONE_PSD,
        psd_check_tol(&rank_one_matrix, tol)?,
    ));

    // (4) the defect built from the factors over the Schur-complement kernel
    // k^{x_{N+1}} must stay PSD; this is the one check that needs the
    // quotient-positivity property and the one that fails on kernels without
    // it
    let kz = kz_matrix(spec, points.get(last), &points.prefix(n))?;
    let corollary = match &factors {
        Some(v) => Some(HermitianMatrix::from_fn(n, |i, j| {
            (Complex64::ONE - dot_adjoint(&v[i], &v[j])) * kz.get(i, j)
        })?),
        None => None,
    };
    match &corollary {
        Some(c) => checks.push(NamedCheck::psd_check(
            check_names::COROLLARY_DEFECT_PSD,
            psd_check_tol(c, tol)?,
        )),
        None => checks.push(NamedCheck::skipped(check_names::COROLLARY_DEFECT_PSD)),
    }

    // conclusion Gram, assembled directly
    let conclusion_matrix = fz_matrix(spec, points.get(last), &points.prefix(n))?;

    // (5) the corollary matrix equals R entrywise-times the conclusion Gram
    match &corollary {
        Some(c) => {
            let mut resid = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let rhs = rank_one_matrix.get(i, j) * conclusion_matrix.get(i, j);
                    resid = resid.max((c.get(i, j) - rhs).norm());
                }
            }
            checks.push(NamedCheck::residual(
                check_names::COROLLARY_IDENTITY,
                resid,
                identity_scale,
            ));
        }
        None => checks.push(NamedCheck::skipped(check_names::COROLLARY_IDENTITY)),
    }

    // (6) S_ij = k_NN / (k_iN k_Nj), rank-one PSD
    let schur_scaler = HermitianMatrix::from_fn(n, |i, j| {
        k_nn / (full.get(i, mid) * full.get(mid, j))
    })?;
    checks.push(NamedCheck::rank_one(
        check_names::SCALER_RANK_ONE_PSD,
        psd_check_tol(&schur_scaler, tol)?,
    ));

    // (7) Schur product recovers the conclusion Gram, which must be PSD
    match &corollary {
        Some(c) => {
            let via_schur = schur_product(c, &schur_scaler)?;
            let resid = via_schur.max_abs_diff(&conclusion_matrix)?;
            checks.push(NamedCheck::residual(
                check_names::CONCLUSION_IDENTITY,
                resid,
                IDENTITY_RESIDUAL_COEFF * conclusion_matrix.scale(),
            ));
        }
        None => checks.push(NamedCheck::skipped(check_names::CONCLUSION_IDENTITY)),
    }
    let conclusion_report = psd_check_tol(&conclusion_matrix, tol)?;
    checks.push(NamedCheck::psd_check(
        check_names::CONCLUSION_PSD,
        conclusion_report.clone(),
    ));

    Ok(InductionStepRecord {
        points: points.clone(),
        padded_matrix: padded,
        factors: factors.unwrap_or_default(),
        rank_one_matrix,
        schur_scaler,
        conclusion: CriterionReport {
            base_point: points.get(last),
            sample: points.prefix(n),
            gram: conclusion_matrix,
            psd: conclusion_report,
        },
        checks,
    })
}

/// Runs the base case and the induction step on every prefix of `ordering`,
/// recording all checks. The certificate is `Valid` iff every check passed;
/// otherwise it names the first failing step and check. A valid certificate
/// always includes a direct PSD cross-check of the final criterion Gram.
pub fn necessity_certificate(
    spec: &KernelSpec,
    ordering: &PointSet,
    tol: f64,
) -> Result<ProofCertificate> {
    validate_tol(tol)?;
    let m = ordering.len();
    if m < 3 {
        return Err(Error::PreconditionFailed(format!(
            "certificate needs at least 3 points, got {m}"
        )));
    }
    let gram = assemble_gram(spec, ordering)?;
    check_all_pairs_nonvanishing(&gram, ordering)?;

    // base case: F_{x_z}(x, x) = 1 - |k(x,z)|^2 / (k(x,x) k(z,z)) >= 0
    let mut base_case = Vec::with_capacity(m * (m - 1));
    let mut base_ok = true;
    for x in 0..m {
        for z in 0..m {
            if x == z {
                continue;
            }
            let value = 1.0 - gram.get(x, z).norm_sqr() / (gram.diag(x) * gram.diag(z));
            let passed = value >= -tol;
            base_ok &= passed;
            base_case.push(DiagonalCheck {
                x_index: x,
                z_index: z,
                value,
                passed,
            });
        }
    }
    if !base_ok {
        return Ok(ProofCertificate {
            kernel: spec.clone(),
            ordering: ordering.clone(),
            base_case,
            steps: Vec::new(),
            final_cross_check: None,
            overall: CertificateOutcome::InvalidAt {
                step: 1,
                check: check_names::BASE_CASE.to_string(),
            },
        });
    }

    let mut steps = Vec::with_capacity(m - 2);
    let mut overall = CertificateOutcome::Valid;
    for prefix_len in 3..=m {
        let step_no = prefix_len - 1;
        let record = induction_step(spec, &ordering.prefix(prefix_len), tol).map_err(
            |source| Error::AtStep {
                step: step_no,
                source: Box::new(source),
            },
        )?;
        let valid = record.is_valid();
        let failure = record
            .first_failure()
            .map(|c| c.name.to_string())
            .unwrap_or_default();
        steps.push(record);
        if !valid {
            overall = CertificateOutcome::InvalidAt {
                step: step_no,
                check: failure,
            };
            break;
        }
    }

    let final_cross_check = if overall.is_valid() {
        let final_gram = fz_matrix(spec, ordering.get(m - 1), &ordering.prefix(m - 1))?;
        let report = psd_check_tol(&final_gram, tol)?;
        if !report.verdict.is_psd() {
            overall = CertificateOutcome::InvalidAt {
                step: m - 1,
                check: check_names::FINAL_CROSS_CHECK.to_string(),
            };
        }
        Some(report)
    } else {
        None
    };

    Ok(ProofCertificate {
        kernel: spec.clone(),
        ordering: ordering.clone(),
        base_case,
        steps,
        final_cross_check,
        overall,
    })
}

/// Reproducibly shuffled copies of an ordering. The argument is order-
/// agnostic in exact arithmetic, so replaying the certificate over several
/// orderings exercises different numerical paths.
pub fn shuffled_orderings(ordering: &PointSet, shuffles: usize, seed: u64) -> Vec<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ordering.len();
    (0..shuffles)
        .map(|_| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let points = idx.iter().map(|&i| ordering.get(i)).collect();
            match ordering.labels() {
                Some(labels) => PointSet::with_labels(
                    points,
                    idx.iter().map(|&i| labels[i].clone()).collect(),
                )
                .expect("permutation preserves validity"),
                None => PointSet::new(points).expect("permutation preserves validity"),
            }
        })
        .collect()
}

/// Certificates for `shuffles` seeded shuffles of `ordering`, preceded by the
/// certificate of the given order itself. Orderings run concurrently under
/// the `parallel` feature; output order is deterministic either way.
pub fn shuffled_certificates(
    spec: &KernelSpec,
    ordering: &PointSet,
    tol: f64,
    shuffles: usize,
    seed: u64,
) -> Result<Vec<ProofCertificate>> {
    let mut orderings = vec![ordering.clone()];
    orderings.extend(shuffled_orderings(ordering, shuffles, seed));
    par::try_map_enumerated(&orderings, |_, o| necessity_certificate(spec, o, tol))
}
