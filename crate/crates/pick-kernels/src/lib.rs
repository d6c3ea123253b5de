//! Finite-sample machinery for positive kernels on the unit disk.
//!
//! The crate turns the classical objects around Pick interpolation into
//! computable ones on finite point sets:
//!
//! - a kernel catalog (szego, bergman, the power family, tabulated Gram
//!   kernels) with Gram assembly ([`kernel`]),
//! - Hermitian/PSD matrix services with eigenvalue witnesses and rank
//!   factorization ([`hermitian`], [`psd`]),
//! - the quotient criterion kernel `F_z`, the Schur-complement kernel `k^z`,
//!   and irreducibility diagnostics ([`pick`]),
//! - multiplier defect Grams, contractivity, multiplier norms, Pick
//!   feasibility, and one-point extension disks ([`multiplier`]),
//! - an executable inductive certificate that replays the positivity
//!   argument step by step and records every matrix fact ([`proof`]).
//!
//! Everything is pure and deterministic: identical inputs give identical
//! outputs, including eigenvector witnesses. Randomized helpers take explicit
//! seeds. With the default `parallel` feature, sweeps over base points, grid
//! scans, and shuffled certificate runs fan out over rayon; disabling the
//! feature swaps in sequential fallbacks with identical results.

pub mod error;
pub mod hermitian;
pub mod kernel;
pub mod multiplier;
pub mod pick;
pub mod point;
pub mod proof;
pub mod psd;

mod json;
mod par;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use hermitian::{schur_product, HermitianMatrix};
pub use kernel::{assemble_gram, evaluate_kernel, KernelSpec, VANISHING_COEFF};
pub use multiplier::{
    defect_gram, defect_invariance_check, extension_disk_grid_oracle, is_contractive_multiplier,
    multiplier_norm, one_point_extension_disk, pick_feasible, pick_matrices, DefectInvariance,
    ExtensionDisk, ExtensionScan, MultiplierData, PickMatrices,
};
pub use pick::{
    all_psd, cpp_check, fz_gram, irreducibility_check, schur_complement_gram, CriterionReport,
    IrreducibilityReport,
};
pub use point::{Point, PointSet};
pub use proof::{
    check_names, induction_step, necessity_certificate, shuffled_certificates,
    shuffled_orderings, CertificateOutcome, DiagonalCheck, InductionStepRecord, NamedCheck,
    ProofCertificate,
};
pub use psd::{
    default_tolerance, psd_check, psd_check_tol, rank_factorization, reconstruction_error,
    PsdReport, Verdict, DEFAULT_TOL_COEFF,
};
