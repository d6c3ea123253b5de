//! Finite-set multipliers: defect Gram matrices, contractivity, the least
//! contractive scale (multiplier norm), Schur-complement invariance of the
//! defect, Pick interpolation feasibility, and one-point extension geometry.

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::kernel::{assemble_gram, evaluate_kernel, KernelSpec, VANISHING_COEFF};
use crate::par;
use crate::pick::kz_matrix;
use crate::point::{Point, PointSet};
use crate::psd::{default_tolerance, hermitian_eigen, psd_check, PsdReport};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// A kernel, `N` points, and one `s x t` target matrix per point. The target
/// shape is shared across points; the scalar case is `s = t = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierData {
    spec: KernelSpec,
    points: PointSet,
    targets: Vec<DMatrix<Complex64>>,
}

impl MultiplierData {
    pub fn new(
        spec: KernelSpec,
        points: PointSet,
        targets: Vec<DMatrix<Complex64>>,
    ) -> Result<Self> {
        if targets.len() != points.len() {
            return Err(Error::TargetCountMismatch {
                points: points.len(),
                targets: targets.len(),
            });
        }
        let (s, t) = (targets[0].nrows(), targets[0].ncols());
        if s == 0 || t == 0 {
            return Err(Error::ShapeMismatch {
                index: 0,
                rows: s,
                cols: t,
                expected_rows: 1.max(s),
                expected_cols: 1.max(t),
            });
        }
        for (index, w) in targets.iter().enumerate() {
            if w.nrows() != s || w.ncols() != t {
                return Err(Error::ShapeMismatch {
                    index,
                    rows: w.nrows(),
                    cols: w.ncols(),
                    expected_rows: s,
                    expected_cols: t,
                });
            }
            if let Some(v) = w.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinitePoint { re: v.re, im: v.im });
            }
        }
        Ok(MultiplierData {
            spec,
            points,
            targets,
        })
    }

    /// Scalar targets (`s = t = 1`).
    pub fn scalar(spec: KernelSpec, points: PointSet, values: &[Complex64]) -> Result<Self> {
        let targets = values
            .iter()
            .map(|&v| DMatrix::from_element(1, 1, v))
            .collect();
        MultiplierData::new(spec, points, targets)
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn targets(&self) -> &[DMatrix<Complex64>] {
        &self.targets
    }

    pub fn target_shape(&self) -> (usize, usize) {
        (self.targets[0].nrows(), self.targets[0].ncols())
    }

    /// Copy with every target multiplied by `lambda`.
    pub fn scaled(&self, lambda: Complex64) -> MultiplierData {
        MultiplierData {
            spec: self.spec.clone(),
            points: self.points.clone(),
            targets: self.targets.iter().map(|w| w * lambda).collect(),
        }
    }
}

/// Block defect matrix over given Gram values: block `(i, j)` is
/// `(c^2 I - W_i W_j*) k(x_i, x_j)`, an `Ns x Ns` Hermitian matrix.
fn defect_from_gram(
    gram: &HermitianMatrix,
    targets: &[DMatrix<Complex64>],
    c: f64,
) -> Result<HermitianMatrix> {
    let n = gram.dim();
    let s = targets[0].nrows();
    let c2 = Complex64::new(c * c, 0.0);
    let mut big = DMatrix::<Complex64>::zeros(n * s, n * s);
    for i in 0..n {
        for j in i..n {
            let mut block = &targets[i] * targets[j].adjoint() * (-Complex64::ONE);
            for d in 0..s {
                block[(d, d)] += c2;
            }
            let kij = gram.get(i, j);
            for a in 0..s {
                for b in 0..s {
                    let v = block[(a, b)] * kij;
                    big[(i * s + a, j * s + b)] = v;
                }
            }
            if i != j {
                for a in 0..s {
                    for b in 0..s {
                        big[(j * s + a, i * s + b)] = big[(i * s + b, j * s + a)].conj();
                    }
                }
            }
        }
    }
    HermitianMatrix::new(big)
}

/// Defect Gram at scale `c >= 0`: block `(i,j)` is `(c^2 I - W_i W_j*) k_ij`.
pub fn defect_gram(data: &MultiplierData, c: f64) -> Result<HermitianMatrix> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "defect scale c must be finite and >= 0, got {c}"
        )));
    }
    let gram = assemble_gram(&data.spec, &data.points)?;
    defect_from_gram(&gram, &data.targets, c)
}

/// The finite-set contractivity criterion: PSD check of the defect at `c = 1`.
pub fn is_contractive_multiplier(data: &MultiplierData) -> Result<PsdReport> {
    psd_check(&defect_gram(data, 1.0)?)
}

const MAX_BRACKET_DOUBLINGS: u32 = 40;

/// Smallest `c >= 0` whose defect Gram is PSD, to within `tol`.
///
/// The defect grows by the PSD matrix `(Gram x I)` per unit of `c^2`, so
/// feasibility is monotone in `c^2`; bisection over `c^2` between an
/// infeasible floor and a doubled-until-feasible ceiling is exact reference
/// semantics. Fails with `NonConvergence` when no bracket exists, which
/// signals ill-posed data such as an ambient Gram that is not PSD.
pub fn multiplier_norm(data: &MultiplierData, tol: f64) -> Result<f64> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidTolerance {
            tol,
            requirement: "finite and > 0",
        });
    }
    let gram = assemble_gram(&data.spec, &data.points)?;
    let feasible = |c: f64| -> Result<bool> {
        Ok(psd_check(&defect_from_gram(&gram, &data.targets, c)?)?
            .verdict
            .is_psd())
    };
    if feasible(0.0)? {
        return Ok(0.0);
    }
    // c = 0 infeasible, so some target is nonzero and sigma_max > 0
    let sigma_max = data
        .targets
        .iter()
        .map(|w| {
            w.clone()
                .singular_values()
                .iter()
                .fold(0.0f64, |m, &s| m.max(s))
        })
        .fold(0.0f64, f64::max);
    let mut hi = sigma_max.max(f64::MIN_POSITIVE);
    let mut doublings = 0;
    while !feasible(hi)? {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(Error::NonConvergence {
                max_doublings: MAX_BRACKET_DOUBLINGS,
            });
        }
    }
    let mut lo_t = 0.0f64;
    let mut hi_t = hi * hi;
    while hi_t.sqrt() - lo_t.sqrt() > tol {
        let mid_t = 0.5 * (lo_t + hi_t);
        if !(mid_t > lo_t && mid_t < hi_t) {
            break; // interval at float resolution
        }
        if feasible(mid_t.sqrt())? {
            hi_t = mid_t;
        } else {
            lo_t = mid_t;
        }
    }
    Ok(0.5 * (lo_t.sqrt() + hi_t.sqrt()))
}

/// PSD reports for the defect over `k` (ambient) and over `k^z` (restricted),
/// same points and targets.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectInvariance {
    pub ambient: PsdReport,
    pub restricted: PsdReport,
}

/// Checks that a contractive defect stays PSD when the kernel is replaced by
/// its Schur complement `k^z`. Errors if the ambient defect is not PSD (the
/// hypothesis); reports the restricted verdict rather than erroring on it,
/// since a restricted failure is evidence about the kernel, not bad input.
pub fn defect_invariance_check(data: &MultiplierData, z: Point) -> Result<DefectInvariance> {
    let gram = assemble_gram(&data.spec, &data.points)?;
    let ambient = psd_check(&defect_from_gram(&gram, &data.targets, 1.0)?)?;
    if !ambient.verdict.is_psd() {
        return Err(Error::PreconditionFailed(format!(
            "ambient defect is not PSD (min eigenvalue {:e})",
            ambient.min_eigenvalue
        )));
    }
    let kz = kz_matrix(&data.spec, z, &data.points)?;
    let restricted = psd_check(&defect_from_gram(&kz, &data.targets, 1.0)?)?;
    Ok(DefectInvariance {
        ambient,
        restricted,
    })
}

/// The two classical interpolation matrices for data `z_i -> w_i`:
/// the product form `(1 - w_i conj(w_j)) k(z_i, z_j)` for the ambient kernel,
/// and the szego-denominator quotient form `(1 - w_i conj(w_j)) / (1 - z_i conj(z_j))`
/// when no denominator vanishes. For the szego kernel the two are the same
/// matrix up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct PickMatrices {
    pub product: HermitianMatrix,
    pub product_psd: PsdReport,
    pub quotient: Option<(HermitianMatrix, PsdReport)>,
}

fn check_targets_finite(w: &[Complex64]) -> Result<()> {
    for v in w {
        if !v.is_finite() {
            return Err(Error::NonFinitePoint { re: v.re, im: v.im });
        }
    }
    Ok(())
}

pub fn pick_matrices(
    z: &PointSet,
    w: &[Complex64],
    spec: &KernelSpec,
) -> Result<PickMatrices> {
    if w.len() != z.len() {
        return Err(Error::DimensionMismatch {
            left: z.len(),
            right: w.len(),
        });
    }
    check_targets_finite(w)?;
    let gram = assemble_gram(spec, z)?;
    let n = z.len();
    let product = HermitianMatrix::from_fn(n, |i, j| {
        (Complex64::ONE - w[i] * w[j].conj()) * gram.get(i, j)
    })?;
    let product_psd = psd_check(&product)?;
    // quotient form; denominators 1 - z_i conj(z_j) cannot vanish strictly
    // inside the disk but can for tabulated nodes elsewhere
    let mut quotient_defined = true;
    let mut q = DMatrix::<Complex64>::zeros(n, n);
    'outer: for i in 0..n {
        for j in 0..n {
            let d = Complex64::ONE - z.get(i).to_complex() * z.get(j).to_complex().conj();
            if d.norm() <= VANISHING_COEFF {
                quotient_defined = false;
                break 'outer;
            }
            q[(i, j)] = (Complex64::ONE - w[i] * w[j].conj()) / d;
        }
    }
    let quotient = if quotient_defined {
        let qm = HermitianMatrix::new(q)?;
        let qp = psd_check(&qm)?;
        Some((qm, qp))
    } else {
        None
    };
    Ok(PickMatrices {
        product,
        product_psd,
        quotient,
    })
}

/// Feasibility of interpolation `z_i -> w_i` with multiplier norm at most
/// one: PSD check of the product-form matrix `(1 - w_i conj(w_j)) k(z_i, z_j)`.
pub fn pick_feasible(z: &PointSet, w: &[Complex64], spec: &KernelSpec) -> Result<PsdReport> {
    Ok(pick_matrices(z, w, spec)?.product_psd)
}

/// The set of feasible targets at one new node. For feasible base data this
/// is a closed disk, possibly a single point.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtensionDisk {
    Disk { center: Complex64, radius: f64 },
    Empty,
}

impl ExtensionDisk {
    pub fn is_empty(&self) -> bool {
        matches!(self, ExtensionDisk::Empty)
    }

    pub fn contains(&self, w: Complex64, slack: f64) -> bool {
        match self {
            ExtensionDisk::Empty => false,
            ExtensionDisk::Disk { center, radius } => (w - center).norm() <= radius + slack,
        }
    }
}

// Relative size below which a component orthogonal to the range of the base
// matrix counts as zero when deciding between the disk and point cases.
const PERP_COEFF: f64 = 1e-8;

/// Feasible-target disk at `z_new` for base data `z_i -> w_i`, from the Schur
/// complement of the augmented interpolation matrix.
///
/// With `P` the base product matrix, `u_i = k(z_i, z_new)`, `v_i = w_i u_i`
/// and `knn = k(z_new, z_new)`, a target `omega` is feasible iff
/// `(knn + v*P+v) |omega|^2 - 2 Re(omega v*P+u) <= knn - u*P+u` and the
/// augmented column stays in the range of `P`. Completing the square gives
/// the disk. A singular base pins `omega` through the range condition and
/// yields a point (the uniqueness case), handled through the pseudo-inverse
/// with rank decided by the default eigenvalue tolerance.
pub fn one_point_extension_disk(
    z: &PointSet,
    w: &[Complex64],
    z_new: Point,
    spec: &KernelSpec,
) -> Result<ExtensionDisk> {
    let matrices = pick_matrices(z, w, spec)?;
    if !matrices.product_psd.verdict.is_psd() {
        return Err(Error::InfeasibleBase {
            min_eigenvalue: matrices.product_psd.min_eigenvalue,
        });
    }
    let p = &matrices.product;
    let n = z.len();
    let knn = evaluate_kernel(spec, z_new, z_new)?.re;
    if knn <= VANISHING_COEFF * knn.abs().max(1.0) {
        return Err(Error::DegenerateBasePoint { value: knn });
    }
    let mut u = Vec::with_capacity(n);
    for i in 0..n {
        u.push(evaluate_kernel(spec, z.get(i), z_new)?);
    }
    let v: Vec<Complex64> = (0..n).map(|i| w[i] * u[i]).collect();

    let (values, vectors) = hermitian_eigen(p.matrix());
    let rank_tol = default_tolerance(p);
    let kept: Vec<usize> = (0..n).filter(|&m| values[m] > rank_tol).collect();

    // x -> P+ x and the residual of x against range(P)
    let coeff = |x: &[Complex64], m: usize| -> Complex64 {
        (0..n).map(|i| vectors[(i, m)].conj() * x[i]).sum()
    };
    let pinv_quad = |x: &[Complex64], y: &[Complex64]| -> Complex64 {
        // x* P+ y
        kept.iter()
            .map(|&m| coeff(x, m).conj() * coeff(y, m) / values[m])
            .sum()
    };
    let perp = |x: &[Complex64]| -> Vec<Complex64> {
        let mut r = x.to_vec();
        for &m in &kept {
            let c = coeff(x, m);
            for i in 0..n {
                r[i] -= vectors[(i, m)] * c;
            }
        }
        r
    };
    let norm2 = |x: &[Complex64]| -> f64 { x.iter().map(|v| v.norm_sqr()).sum() };

    let alpha = pinv_quad(&u, &u).re;
    let beta = pinv_quad(&v, &v).re;
    let gamma = pinv_quad(&v, &u);
    let u_perp = perp(&u);
    let v_perp = perp(&v);
    let eps = PERP_COEFF * norm2(&u).sqrt().max(norm2(&v).sqrt()).max(1.0);
    let feas_tol = default_tolerance(p).max(DEFAULT_QUAD_COEFF * knn.abs().max(1.0));

    let nu = norm2(&u_perp).sqrt();
    let nv = norm2(&v_perp).sqrt();
    if nv > eps {
        // range condition forces conj(omega) v_perp = u_perp
        let om_bar: Complex64 = u_perp
            .iter()
            .zip(v_perp.iter())
            .map(|(ui, vi)| vi.conj() * ui)
            .sum::<Complex64>()
            / Complex64::new(nv * nv, 0.0);
        let resid2: f64 = u_perp
            .iter()
            .zip(v_perp.iter())
            .map(|(ui, vi)| (ui - om_bar * vi).norm_sqr())
            .sum();
        if resid2.sqrt() > eps {
            return Ok(ExtensionDisk::Empty);
        }
        let omega = om_bar.conj();
        let q = (knn - alpha) + 2.0 * (omega * gamma).re - omega.norm_sqr() * (knn + beta);
        if q < -feas_tol {
            return Ok(ExtensionDisk::Empty);
        }
        return Ok(ExtensionDisk::Disk {
            center: omega,
            radius: 0.0,
        });
    }
    if nu > eps {
        // u has a component outside range(P) that no omega can cancel
        return Ok(ExtensionDisk::Empty);
    }
    let denom = knn + beta; // knn > 0, beta >= 0
    let center = gamma.conj() / denom;
    let r2 = (knn - alpha) / denom + gamma.norm_sqr() / (denom * denom);
    if r2 < -feas_tol / denom {
        return Ok(ExtensionDisk::Empty);
    }
    Ok(ExtensionDisk::Disk {
        center,
        radius: r2.max(0.0).sqrt(),
    })
}

const DEFAULT_QUAD_COEFF: f64 = 1e-9;

/// Brute-force estimate of the extension disk from grid membership.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionScan {
    pub resolution: f64,
    pub feasible_count: usize,
    pub disk: ExtensionDisk,
}

/// Scans targets over a square grid of the closed unit disk at the given
/// resolution, testing each with `pick_feasible` on the augmented data, and
/// returns the extremes of the feasible region as a disk estimate. Grid rows
/// run concurrently under the `parallel` feature.
pub fn extension_disk_grid_oracle(
    z: &PointSet,
    w: &[Complex64],
    z_new: Point,
    spec: &KernelSpec,
    resolution: f64,
) -> Result<ExtensionScan> {
    if !resolution.is_finite() || resolution <= 0.0 || resolution > 1.0 {
        return Err(Error::InvalidTolerance {
            tol: resolution,
            requirement: "a grid resolution in (0, 1]",
        });
    }
    if w.len() != z.len() {
        return Err(Error::DimensionMismatch {
            left: z.len(),
            right: w.len(),
        });
    }
    check_targets_finite(w)?;
    let z_aug = z.append(z_new);
    // surface domain or table errors once, before the scan
    pick_feasible(&z_aug, &{
        let mut ws = w.to_vec();
        ws.push(Complex64::new(0.0, 0.0));
        ws
    }, spec)?;

    let steps = (2.0 / resolution).round() as usize + 1;
    let coord = |i: usize| -> f64 { -1.0 + i as f64 * resolution };

    struct RowScan {
        count: usize,
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    }

    let rows = par::try_map_range(steps, |ix| -> Result<RowScan> {
        let x = coord(ix);
        let mut row = RowScan {
            count: 0,
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        let mut ws = w.to_vec();
        ws.push(Complex64::new(0.0, 0.0));
        for iy in 0..steps {
            let y = coord(iy);
            if x * x + y * y > 1.0 {
                continue;
            }
            *ws.last_mut().expect("nonempty") = Complex64::new(x, y);
            if pick_feasible(&z_aug, &ws, spec)?.verdict.is_psd() {
                row.count += 1;
                row.x_min = row.x_min.min(x);
                row.x_max = row.x_max.max(x);
                row.y_min = row.y_min.min(y);
                row.y_max = row.y_max.max(y);
            }
        }
        Ok(row)
    })?;

    let mut count = 0;
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in rows {
        count += r.count;
        x_min = x_min.min(r.x_min);
        x_max = x_max.max(r.x_max);
        y_min = y_min.min(r.y_min);
        y_max = y_max.max(r.y_max);
    }
    let disk = if count == 0 {
        ExtensionDisk::Empty
    } else {
        ExtensionDisk::Disk {
            center: Complex64::new(0.5 * (x_min + x_max), 0.5 * (y_min + y_max)),
            radius: 0.25 * ((x_max - x_min) + (y_max - y_min)),
        }
    };
    Ok(ExtensionScan {
        resolution,
        feasible_count: count,
        disk,
    })
}
