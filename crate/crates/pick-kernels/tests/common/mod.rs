//! Shared generators for the seeded randomized suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pick_kernels::{HermitianMatrix, KernelSpec, MultiplierData, Point, PointSet};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_complex(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::new(rng.random_range(-r..r), rng.random_range(-r..r))
}

pub fn rand_disk_point(rng: &mut ChaCha8Rng, max_radius: f64) -> Point {
    let radius = max_radius * rng.random_range(0.0..1.0f64).sqrt();
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    Point::new(radius * theta.cos(), radius * theta.sin())
}

/// `n` disk points with pairwise separation at least `min_sep`.
pub fn separated_points(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_radius: f64,
    min_sep: f64,
) -> PointSet {
    let mut points: Vec<Point> = Vec::with_capacity(n);
    while points.len() < n {
        let p = rand_disk_point(rng, max_radius);
        if points
            .iter()
            .all(|q| (p.to_complex() - q.to_complex()).norm() >= min_sep)
        {
            points.push(p);
        }
    }
    PointSet::new(points).expect("nonempty")
}

/// Random PSD matrix `B B*` with `B` of shape `dim x rank`.
pub fn rand_psd(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> HermitianMatrix {
    let b = DMatrix::from_fn(dim, rank, |_, _| rand_complex(rng, 1.0));
    HermitianMatrix::new(&b * b.adjoint()).expect("square")
}

/// Random unitary matrix from the QR factorization of a random complex matrix.
pub fn rand_unitary(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| rand_complex(rng, 1.0));
    m.qr().q()
}

/// Random kernel from the whole catalog (PSD for every exponent).
pub fn rand_builtin_kernel(rng: &mut ChaCha8Rng) -> KernelSpec {
    match rng.random_range(0..4u32) {
        0 => KernelSpec::Szego,
        1 => KernelSpec::Bergman,
        2 => KernelSpec::power(rng.random_range(0.2..1.0)).expect("valid alpha"),
        _ => KernelSpec::power(rng.random_range(1.0..3.5)).expect("valid alpha"),
    }
}

/// Random kernel from the family whose contractive data always extends by one
/// point (szego and powers up to one); the restricted-defect invariance
/// sweeps sample from this family.
pub fn rand_extendable_kernel(rng: &mut ChaCha8Rng) -> KernelSpec {
    if rng.random_bool(0.5) {
        KernelSpec::Szego
    } else {
        KernelSpec::power(rng.random_range(0.2..=1.0)).expect("valid alpha")
    }
}

/// Random targets shrunk geometrically until the ambient defect is PSD.
pub fn contractive_data(
    rng: &mut ChaCha8Rng,
    spec: KernelSpec,
    points: PointSet,
    s: usize,
    t: usize,
) -> MultiplierData {
    let n = points.len();
    let mut targets: Vec<DMatrix<Complex64>> = (0..n)
        .map(|_| DMatrix::from_fn(s, t, |_, _| rand_complex(rng, 1.0)))
        .collect();
    for _ in 0..300 {
        let data = MultiplierData::new(spec.clone(), points.clone(), targets.clone())
            .expect("consistent shapes");
        if pick_kernels::is_contractive_multiplier(&data)
            .expect("finite data")
            .verdict
            .is_psd()
        {
            return data;
        }
        for w in &mut targets {
            *w *= Complex64::new(0.8, 0.0);
        }
    }
    panic!("targets did not become contractive after 300 shrinks");
}
