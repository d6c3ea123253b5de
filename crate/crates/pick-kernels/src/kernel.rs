//! Kernel catalog and Gram assembly.
//!
//! Closed-form kernels live on the open unit disk:
//! szego `1/(1 - x conj(y))`, bergman `1/(1 - x conj(y))^2`, and the power
//! family `1/(1 - x conj(y))^alpha` for `alpha > 0`. A tabulated kernel is a
//! Hermitian Gram matrix over an explicit node set.

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::point::{Point, PointSet};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Relative cutoff below which a kernel value counts as vanishing. The
/// quotient criteria divide by kernel values, so "zero" needs a stated
/// threshold: `|k| <= VANISHING_COEFF * scale` of the ambient Gram.
pub const VANISHING_COEFF: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Szego,
    Bergman,
    Power { alpha: f64 },
    GramTable {
        matrix: HermitianMatrix,
        points: PointSet,
    },
}

impl KernelSpec {
    /// Power-family kernel; `alpha` must be finite and positive.
    /// `power(1)` evaluates identically to szego and `power(2)` to bergman.
    pub fn power(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidAlpha { alpha });
        }
        Ok(KernelSpec::Power { alpha })
    }

    /// Tabulated kernel; the matrix dimension must equal the node count.
    pub fn gram_table(matrix: HermitianMatrix, points: PointSet) -> Result<Self> {
        if matrix.dim() != points.len() {
            return Err(Error::DimensionMismatch {
                left: matrix.dim(),
                right: points.len(),
            });
        }
        Ok(KernelSpec::GramTable { matrix, points })
    }

    pub fn is_disk_kernel(&self) -> bool {
        !matches!(self, KernelSpec::GramTable { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Szego => "szego",
            KernelSpec::Bergman => "bergman",
            KernelSpec::Power { .. } => "power",
            KernelSpec::GramTable { .. } => "gram_table",
        }
    }
}

fn check_disk(p: Point) -> Result<()> {
    if !p.is_finite() || p.abs() >= 1.0 {
        return Err(Error::DomainError { point: p });
    }
    Ok(())
}

fn one_minus_x_conj_y(x: Point, y: Point) -> Complex64 {
    Complex64::new(1.0, 0.0) - x.to_complex() * y.to_complex().conj()
}

fn szego_value(x: Point, y: Point) -> Complex64 {
    one_minus_x_conj_y(x, y).inv()
}

fn bergman_value(x: Point, y: Point) -> Complex64 {
    let d = one_minus_x_conj_y(x, y);
    (d * d).inv()
}

fn power_value(x: Point, y: Point, alpha: f64) -> Complex64 {
    // integer special cases route through the closed forms so power(1) and
    // power(2) agree with szego and bergman bit for bit
    if alpha == 1.0 {
        szego_value(x, y)
    } else if alpha == 2.0 {
        bergman_value(x, y)
    } else {
        // 1 - x conj(y) has positive real part on the disk, so the principal
        // branch is smooth here
        one_minus_x_conj_y(x, y).powf(-alpha)
    }
}

/// Evaluates `k(x, y)`. Disk kernels require `|x| < 1` and `|y| < 1`;
/// tabulated kernels require both points to be nodes.
pub fn evaluate_kernel(spec: &KernelSpec, x: Point, y: Point) -> Result<Complex64> {
    match spec {
        KernelSpec::Szego => {
            check_disk(x)?;
            check_disk(y)?;
            Ok(szego_value(x, y))
        }
        KernelSpec::Bergman => {
            check_disk(x)?;
            check_disk(y)?;
            Ok(bergman_value(x, y))
        }
        KernelSpec::Power { alpha } => {
            check_disk(x)?;
            check_disk(y)?;
            Ok(power_value(x, y, *alpha))
        }
        KernelSpec::GramTable { matrix, points } => {
            let i = points.index_of(x).ok_or(Error::UnknownPoint { point: x })?;
            let j = points.index_of(y).ok_or(Error::UnknownPoint { point: y })?;
            Ok(matrix.get(i, j))
        }
    }
}

/// Gram matrix `(k(x_i, x_j))_{i,j}` over `pts`, in list order.
pub fn assemble_gram(spec: &KernelSpec, pts: &PointSet) -> Result<HermitianMatrix> {
    let n = pts.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = evaluate_kernel(spec, pts.get(i), pts.get(j))?;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    HermitianMatrix::new(m)
}
