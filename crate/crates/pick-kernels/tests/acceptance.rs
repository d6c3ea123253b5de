//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with
//! `cargo test -p pick-kernels --test acceptance -- --nocapture`.

mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use pick_kernels::{
    all_psd, cpp_check, defect_invariance_check, extension_disk_grid_oracle, fz_gram,
    multiplier_norm, necessity_certificate, one_point_extension_disk, pick_matrices, psd_check,
    rank_factorization, reconstruction_error, schur_complement_gram, schur_product,
    CertificateOutcome, ExtensionDisk, HermitianMatrix, KernelSpec, MultiplierData, Point,
    PointSet,
};
use rand::RngExt;
use std::time::Instant;

fn report(number: u32, name: &str, pass: bool) {
    println!(
        "[acceptance] criterion {number} ({name}): {}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_1_szego_positivity_sweep() {
    let start = Instant::now();
    let bases = PointSet::random_in_disk(10, 0.9, 101).unwrap();
    let sample = PointSet::random_in_disk(15, 0.9, 202).unwrap();
    let reports = cpp_check(&KernelSpec::Szego, &bases, &sample).unwrap();
    let elapsed = start.elapsed();
    let all_ok = all_psd(&reports)
        && reports.iter().all(|r| r.psd.min_eigenvalue >= -1e-9)
        && reports.len() == 10;
    let fast = elapsed.as_secs_f64() < 2.0;
    report(1, "szego positivity sweep", all_ok && fast);
    assert!(all_ok, "some report failed: {reports:?}");
    assert!(fast, "sweep took {elapsed:?}, budget 2 s");
}

#[test]
fn criterion_2_bergman_counterexample_exactness() {
    let sample = PointSet::from_reals(&[0.5, -0.5]).unwrap();
    let rep = fz_gram(&KernelSpec::Bergman, Point::real(0.0), &sample).unwrap();
    let expected = [[0.4375, -0.5625], [-0.5625, 0.4375]];
    let mut entry_err = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            entry_err = entry_err
                .max((rep.gram.get(i, j) - Complex64::new(expected[i][j], 0.0)).norm());
        }
    }
    let eig_err = (rep.psd.min_eigenvalue - (-0.125)).abs();
    let pass = entry_err <= 1e-12 && eig_err <= 1e-9 && !rep.psd.verdict.is_psd();
    report(2, "bergman counterexample exactness", pass);
    assert!(pass, "entry error {entry_err:e}, eigenvalue error {eig_err:e}");
}

#[test]
fn criterion_3_schur_complement_oracle_equivalence() {
    let mut rng = rng(303);
    let mut worst_diff = 0.0f64;
    let mut all_psd_ok = true;
    for _ in 0..100 {
        let spec = rand_builtin_kernel(&mut rng);
        let n = rng.random_range(1..=8usize);
        let sample = separated_points(&mut rng, n, 0.85, 0.02);
        let z = rand_disk_point(&mut rng, 0.85);

        let kz = schur_complement_gram(&spec, z, &sample).unwrap();

        // oracle: Schur complement of the (z,z) entry in the augmented Gram,
        // via whole-vector operations
        let full = pick_kernels::assemble_gram(&spec, &sample.append(z)).unwrap();
        let g = DMatrix::from_fn(n, 1, |i, _| full.get(i, n));
        let kzz = full.get(n, n);
        let outer = &g * g.adjoint() / kzz;
        let oracle = HermitianMatrix::from_fn(n, |i, j| full.get(i, j) - outer[(i, j)]).unwrap();

        let scale = kz.scale();
        worst_diff = worst_diff.max(kz.max_abs_diff(&oracle).unwrap() / scale);
        all_psd_ok &= psd_check(&kz).unwrap().verdict.is_psd();
    }
    let pass = worst_diff <= 1e-12 && all_psd_ok;
    report(3, "schur-complement oracle equivalence", pass);
    assert!(pass, "worst relative diff {worst_diff:e}, psd ok {all_psd_ok}");
}

#[test]
fn criterion_4_restricted_defect_invariance_suite() {
    let mut rng = rng(404);
    let mut failures = 0usize;
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let spec = rand_extendable_kernel(&mut rng);
        let n = rng.random_range(1..=6usize);
        let points = separated_points(&mut rng, n, 0.85, 0.05);
        let s = rng.random_range(1..=2usize);
        let t = rng.random_range(1..=2usize);
        let data = contractive_data(&mut rng, spec, points, s, t);
        let z = rand_disk_point(&mut rng, 0.85);
        let inv = defect_invariance_check(&data, z).unwrap();
        worst = worst.min(inv.restricted.min_eigenvalue);
        if !inv.restricted.verdict.is_psd() {
            failures += 1;
        }
    }
    let pass = failures == 0;
    report(4, "restricted defect invariance suite", pass);
    assert!(pass, "{failures}/200 restricted defects failed, worst min eigenvalue {worst:e}");
}

#[test]
fn criterion_5_multiplier_norm_exactness_and_homogeneity() {
    const TOL: f64 = 1e-8;
    let points = PointSet::from_reals(&[0.0, 0.5]).unwrap();
    let data = MultiplierData::scalar(
        KernelSpec::Szego,
        points,
        &[Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
    )
    .unwrap();
    let norm = multiplier_norm(&data, TOL).unwrap();
    let exact = (norm - 1.0).abs() <= 2.0 * TOL;

    // homogeneity over random non-degenerate scalar instances: the defect
    // must cross strictly at the norm, the carve-out for data whose
    // feasibility boundary is flat
    let mut rng = rng(505);
    let mut worst_gap = 0.0f64;
    let mut accepted = 0usize;
    while accepted < 50 {
        let n = rng.random_range(1..=4usize);
        let points = separated_points(&mut rng, n, 0.8, 0.2);
        let targets: Vec<Complex64> = (0..n).map(|_| rand_complex(&mut rng, 0.9)).collect();
        let data = MultiplierData::scalar(KernelSpec::Szego, points, &targets).unwrap();
        let base = multiplier_norm(&data, TOL).unwrap();
        if base < 1e-3 {
            continue;
        }
        let probe = pick_kernels::defect_gram(&data, base * (1.0 - 1e-3)).unwrap();
        let probe_rep = psd_check(&probe).unwrap();
        if probe_rep.min_eigenvalue > -probe_rep.tolerance_used {
            continue; // degenerate crossing
        }
        let lambda = rand_complex(&mut rng, 1.0);
        if lambda.norm() < 0.3 {
            continue;
        }
        let scaled = multiplier_norm(&data.scaled(lambda), TOL).unwrap();
        worst_gap = worst_gap.max((scaled - lambda.norm() * base).abs());
        accepted += 1;
    }
    let homogeneous = worst_gap <= 2.0 * TOL;
    let pass = exact && homogeneous;
    report(5, "multiplier norm exactness and homogeneity", pass);
    assert!(exact, "norm {norm} differs from 1 by more than 2e-8");
    assert!(homogeneous, "worst homogeneity gap {worst_gap:e} exceeds 2e-8");
}

#[test]
fn criterion_6_pick_feasibility_pair() {
    let z = PointSet::from_reals(&[0.0, 0.5]).unwrap();
    let feasible = pick_matrices(
        &z,
        &[Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        &KernelSpec::Szego,
    )
    .unwrap();
    let (qm, qp) = feasible.quotient.as_ref().unwrap();
    let mut quotient_is_ones = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            quotient_is_ones = quotient_is_ones.max((qm.get(i, j) - Complex64::ONE).norm());
        }
    }
    let feasible_ok = feasible.product_psd.verdict.is_psd()
        && feasible.product_psd.min_eigenvalue.abs() <= 1e-9
        && qp.verdict.is_psd()
        && quotient_is_ones <= 1e-12;

    let infeasible = pick_matrices(
        &z,
        &[Complex64::new(0.0, 0.0), Complex64::new(0.9, 0.0)],
        &KernelSpec::Szego,
    )
    .unwrap();
    let (qm, _) = infeasible.quotient.as_ref().unwrap();
    let det = qm.diag(0) * qm.diag(1) - qm.get(0, 1).norm_sqr();
    let infeasible_ok = !infeasible.product_psd.verdict.is_psd()
        && (det - (19.0 / 75.0 - 1.0)).abs() <= 1e-12;

    let pass = feasible_ok && infeasible_ok;
    report(6, "pick feasibility pair", pass);
    assert!(feasible_ok, "feasible pair mis-certified: {feasible:?}");
    assert!(infeasible_ok, "infeasible pair: det {det}");
}

#[test]
fn criterion_7_proof_engine_soundness() {
    const TOL: f64 = 1e-9;
    let start = Instant::now();
    let ordering = PointSet::random_in_disk(6, 0.85, 707).unwrap();
    let cert = necessity_certificate(&KernelSpec::Szego, &ordering, TOL).unwrap();
    let szego_elapsed = start.elapsed();
    let cross = cert.final_cross_check.as_ref();
    let direct = fz_gram(&KernelSpec::Szego, ordering.get(5), &ordering.prefix(5)).unwrap();
    let szego_ok = cert.overall.is_valid()
        && cross.is_some_and(|c| {
            c.verdict.is_psd() && (c.min_eigenvalue - direct.psd.min_eigenvalue).abs() < 1e-12
        })
        && direct.psd.verdict.is_psd();

    let start = Instant::now();
    let bad_ordering = PointSet::from_reals(&[0.5, -0.5, 0.0]).unwrap();
    let bad = necessity_certificate(&KernelSpec::Bergman, &bad_ordering, TOL).unwrap();
    let bergman_elapsed = start.elapsed();
    let bergman_ok = matches!(
        &bad.overall,
        CertificateOutcome::InvalidAt { check, .. } if !check.is_empty()
    );
    let fast = szego_elapsed.as_secs_f64() < 2.0 && bergman_elapsed.as_secs_f64() < 2.0;

    let pass = szego_ok && bergman_ok && fast;
    report(7, "proof engine soundness", pass);
    assert!(szego_ok, "szego certificate unsound: {:?}", cert.overall);
    assert!(bergman_ok, "bergman certificate not invalidated: {:?}", bad.overall);
    assert!(fast, "runtimes {szego_elapsed:?} / {bergman_elapsed:?}, budget 2 s each");
}

#[test]
fn criterion_8_extension_disk_oracle() {
    let z = PointSet::from_reals(&[0.0]).unwrap();
    let w = [Complex64::new(0.0, 0.0)];
    let disk =
        one_point_extension_disk(&z, &w, Point::real(0.5), &KernelSpec::Szego).unwrap();
    let ExtensionDisk::Disk { center, radius } = disk else {
        report(8, "extension disk oracle", false);
        panic!("expected a disk");
    };
    let formula_ok = center.norm() <= 1e-9 && (radius - 0.5).abs() <= 1e-6;

    let scan =
        extension_disk_grid_oracle(&z, &w, Point::real(0.5), &KernelSpec::Szego, 1e-3).unwrap();
    let ExtensionDisk::Disk {
        center: scan_center,
        radius: scan_radius,
    } = scan.disk
    else {
        report(8, "extension disk oracle", false);
        panic!("grid scan found nothing feasible");
    };
    let oracle_ok =
        (scan_center - center).norm() <= 2e-3 && (scan_radius - radius).abs() <= 2e-3;

    let pass = formula_ok && oracle_ok;
    report(8, "extension disk oracle", pass);
    assert!(formula_ok, "formula disk: center {center}, radius {radius}");
    assert!(
        oracle_ok,
        "grid disagrees: center {scan_center} vs {center}, radius {scan_radius} vs {radius}"
    );
}

#[test]
fn criterion_9_rank_factorization_and_schur_product() {
    let mut rng = rng(909);
    let mut worst_recon = 0.0f64;
    for _ in 0..100 {
        let dim = rng.random_range(1..=10usize);
        let rank = rng.random_range(1..=dim);
        let a = rand_psd(&mut rng, dim, rank);
        let tol = pick_kernels::default_tolerance(&a);
        let factors = rank_factorization(&a, tol).unwrap();
        worst_recon = worst_recon.max(reconstruction_error(&a, &factors) / a.scale());
    }
    let recon_ok = worst_recon <= 1e-8;

    let mut schur_failures = 0usize;
    for _ in 0..100 {
        let dim = rng.random_range(1..=8usize);
        let a = rand_psd(&mut rng, dim, rng.random_range(1..=dim));
        let b = rand_psd(&mut rng, dim, rng.random_range(1..=dim));
        let p = schur_product(&a, &b).unwrap();
        if !psd_check(&p).unwrap().verdict.is_psd() {
            schur_failures += 1;
        }
    }
    let schur_ok = schur_failures == 0;

    let pass = recon_ok && schur_ok;
    report(9, "rank factorization and schur product", pass);
    assert!(recon_ok, "worst relative reconstruction error {worst_recon:e}");
    assert!(schur_ok, "{schur_failures}/100 schur products failed psd_check");
}
