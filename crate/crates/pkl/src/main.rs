//! `pkl` — command-line front end for the pick-kernels toolkit.
//!
//! Every command reads one JSON document (from `--input FILE` or stdin),
//! writes one output document to stdout, and encodes its verdict in the exit
//! code so shell pipelines can branch without parsing JSON:
//!
//! - `0`: computation succeeded and the verdict is affirmative
//!   (PSD / feasible / valid, where a verdict applies),
//! - `1`: computation succeeded, verdict negative,
//! - `2`: input or usage error; a one-line `{"error": code, "detail": ...}`
//!   object goes to stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pick_kernels::{
    all_psd, cpp_check, defect_gram, extension_disk_grid_oracle,
    fz_gram, irreducibility_check, multiplier_norm, necessity_certificate,
    one_point_extension_disk, pick_matrices, psd_check, psd_check_tol, schur_complement_gram,
    shuffled_certificates, CertificateOutcome, CriterionReport, ExtensionDisk, HermitianMatrix,
    KernelSpec, MultiplierData, Point, PointSet, ProofCertificate, PsdReport,
};
use serde::Deserialize;
use serde_json::{json, Value};
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pkl",
    version,
    about = "Gram matrices, PSD certificates, Pick feasibility, multiplier norms, and inductive positivity certificates over the JSON wire formats"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Common {
    /// Input file; stdin when omitted
    #[arg(long, global = false)]
    input: Option<PathBuf>,
    /// Absolute PSD eigenvalue tolerance (per-matrix default when omitted);
    /// bisection accuracy for multnorm, step tolerance for prove
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for the shuffled orderings of `prove`; the only randomness source
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the Gram matrix of a kernel over a point set and PSD-check it
    Gram(Common),
    /// PSD-check one Hermitian matrix
    Psd(Common),
    /// Criterion matrix F_z over a sample at one base point
    Fz(Common),
    /// Schur-complement kernel Gram k^z over a sample
    Kz(Common),
    /// Criterion sweep over a set of base points
    Cpp(Common),
    /// Non-vanishing and pairwise-independence diagnostics
    Irreducible(Common),
    /// Block defect matrix of multiplier data at scale c (default 1)
    Defect(Common),
    /// Least c with a PSD defect, by bisection
    Multnorm(Common),
    /// Interpolation feasibility: product and quotient matrices
    Pick(Common),
    /// One-point extension disk of feasible targets
    Extend {
        #[command(flatten)]
        common: Common,
        /// Also run the brute-force grid oracle at this resolution
        #[arg(long, value_name = "RES")]
        grid_check: Option<f64>,
    },
    /// Inductive positivity certificate over an ordering
    Prove {
        #[command(flatten)]
        common: Common,
        /// Additionally certify this many seeded shuffles of the ordering
        #[arg(long, default_value_t = 0)]
        shuffles: usize,
    },
}

struct Failure {
    code: &'static str,
    detail: String,
}

impl Failure {
    fn new(code: &'static str, detail: impl ToString) -> Self {
        Failure {
            code,
            detail: detail.to_string(),
        }
    }
}

impl From<pick_kernels::Error> for Failure {
    fn from(err: pick_kernels::Error) -> Self {
        Failure {
            code: err.code(),
            detail: err.to_string(),
        }
    }
}

/// Output document plus the verdict that drives the exit code.
struct Outcome {
    doc: Value,
    text: String,
    affirmative: bool,
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Failure::new("io_error", format!("{}: {e}", p.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::new("io_error", e))?;
            Ok(buf)
        }
    }
}

fn parse<'a, T: Deserialize<'a>>(input: &'a str) -> Result<T, Failure> {
    serde_json::from_str(input).map_err(|e| Failure::new("parse_error", e))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn warn_duplicates(name: &str, set: &PointSet) {
    let dups = set.duplicate_pairs();
    if !dups.is_empty() {
        eprintln!("warning: duplicate {name} points at index pairs {dups:?} force a singular Gram");
    }
}

/// Re-check a report's matrix at an explicit absolute tolerance.
fn recheck(
    matrix: &HermitianMatrix,
    report: PsdReport,
    tol: Option<f64>,
) -> Result<PsdReport, Failure> {
    match tol {
        Some(t) => Ok(psd_check_tol(matrix, t)?),
        None => Ok(report),
    }
}

fn recheck_criterion(
    mut report: CriterionReport,
    tol: Option<f64>,
) -> Result<CriterionReport, Failure> {
    report.psd = recheck(&report.gram, report.psd, tol)?;
    Ok(report)
}

fn psd_text(report: &PsdReport) -> String {
    format!(
        "verdict: {}\nmin eigenvalue: {:.6e}\ntolerance: {:.3e}\nnumerical rank: {}",
        report.verdict.as_str(),
        report.min_eigenvalue,
        report.tolerance_used,
        report.numerical_rank
    )
}

fn default_kernel() -> KernelSpec {
    KernelSpec::Szego
}

fn cmd_gram(input: &str, tol: Option<f64>) -> Result<Outcome, Failure> {
    #[derive(Deserialize)]
    struct Input {
        kernel: KernelSpec,
        points: PointSet,
    }
    let input: Input = parse(input)?;
    warn_duplicates("input", &input.points);
    let gram = pick_kernels::assemble_gram(&input.kernel, &input.points)?;
    let report = recheck(&gram, psd_check(&gram)?, tol)?;
    let affirmative = report.verdict.is_psd();
    Ok(Outcome {
        doc: json!({
            "matrix": to_value(&gram),
            "psd": to_value(&report),
            "duplicate_pairs": input.points.duplicate_pairs(),
        }),
        text: format!("{}x{} Gram\n{}", gram.dim(), gram.dim(), psd_text(&report)),
        affirmative,
    })
}

fn cmd_psd(input: &str, tol: Option<f64>) -> Result<Outcome, Failure> {
    #[derive(Deserialize)]
    struct Input {
        matrix: HermitianMatrix,
    }
    let input: Input = parse(input)?;
    let report = match tol {
        Some(t) => psd_check_tol(&input.matrix, t)?,
        None => psd_check(&input.matrix)?,
    };
    let affirmative = report.verdict.is_psd();
    Ok(Outcome {
        doc: to_value(&report),
        text: psd_text(&report),
        affirmative,
    })
}

#[derive(Deserialize)]
struct CriterionInput {
    kernel: KernelSpec,
    z: Point,
    sample: PointSet,
}

fn cmd_fz(input: &str, tol: Option<f64>) -> Result<Outcome, Failure> {
    let input: CriterionInput = parse(input)?;
    let report = recheck_criterion(fz_gram(&input.kernel, input.z, &input.sample)?, tol)?;
    let affirmative = report.psd.verdict.is_psd();
    Ok(Outcome {
        doc: to_value(&report),
        text: format!("F_z at z = {}\n{}", input.z, psd_text(&report.psd)),
        affirmative,
    })
}

fn cmd_kz(input: &str, tol: Option<f64>) -> Result<Outcome, Failure> {
    let input: CriterionInput = parse(input)?;
    let matrix = schur_complement_gram(&input.kernel, input.z, &input.sample)?;
    let report = recheck(&matrix, psd_check(&matrix)?, tol)?;
    let affirmative = report.verdict.is_psd();
    Ok(Outcome {
        doc: json!({
            "matrix": to_value(&matrix),
            "psd": to_value(&report),
        }),
        text: format!("k^z at z = {}\n{}", input.z, psd_text(&report)),
        affirmative,
    })
}

fn cmd_cpp(input: &str, tol: Option<f64>) -> Result<Outcome, Failure> {
    #[derive(Deserialize)]
    struct Input {
        kernel: KernelSpec,
        base_points: PointSet,
        sample: PointSet,
    }
    let input: Input = parse(input)?;
    warn_duplicates("sample", &input.sample);
    let mut reports = cpp_check(&input.kernel, &input.base_points, &input.sample)?;
    if tol.is_some() {
        reports = reports
            .into_iter()
            .map(|r| recheck_criterion(r, tol))
            .collect::<Result<_, _>>()?;
    }
    let affirmative = all_psd(&reports);
    let overall = if affirmative { "psd" } else { "not_psd" };
    let text = reports
        .iter()
        .map(|r| {
            format!(
                "z = {}: {} (min eigenvalue {:.6e})",
                r.base_point,
                r.psd.verdict.as_str(),
                r.psd.min_eigenvalue
            )
        })
        .chain(std::iter::once(format!("overall: {overall}")))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome {
        doc: json!({
            "reports": to_value(&reports),
            "overall": overall,
        }),
        text,
        affirmative,
    })
}

fn cmd_irreducible(input: &str) -> Result<Outcome, Failure> {
    #[derive(Deserialize)]
    struct Input {
        kernel: KernelSpec,
        sample: PointSet,
    }
    let input: Input = parse(input)?;
    let report = irreducibility_check(&input.kernel, &input.sample)?;
    let affirmative = report.nonvanishing && report.independent_pairs;
    Ok(Outcome {
        doc: to_value(&report),
        text: format!(
            "nonvanishing: {}\nindependent pairs: {}\noffending pairs: {:?}",
            report.nonvanishing, report.independent_pairs, report.offending_pairs
        ),
        affirmative,
    })
}

fn cmd_defect(input: &str, tol: Option<f64>) -> Result<Outcome, Failure> {
    #[derive(Deserialize)]
    struct Input {
        #[serde(default)]
        c: Option<f64>,
        #[serde(flatten)]
        data: MultiplierData,
    }
    let input: Input = parse(input)?;
    let c = input.c.unwrap_or(1.0);
    let matrix = defect_gram(&input.data, c)?;
    let report = recheck(&matrix, psd_check(&matrix)?, tol)?;
    let affirmative = report.verdict.is_psd();
    Ok(Outcome {
        doc: json!({
            "c": c,
            "matrix": to_value(&matrix),
            "psd": to_value(&report),
        }),
        text: format!("defect at c = {c}\n{}", psd_text(&report)),
        affirmative,
    })
}

fn cmd_multnorm(input: &str, tol: Option<f64>) -> Result<Outcome, Failure> {
    let data: MultiplierData = parse(input)?;
    let tol = tol.unwrap_or(1e-8);
    let norm = multiplier_norm(&data, tol)?;
    Ok(Outcome {
        doc: json!({ "norm": norm, "tolerance": tol }),
        text: format!("multiplier norm: {norm} (+/- {tol:.1e})"),
        affirmative: true,
    })
}

#[derive(Deserialize)]
struct PickInput {
    z: PointSet,
    w: Vec<Point>,
    #[serde(default = "default_kernel")]
    kernel: KernelSpec,
}

impl PickInput {
    fn targets(&self) -> Vec<pick_kernels::Complex64> {
        self.w.iter().map(|p| p.to_complex()).collect()
    }
}

fn cmd_pick(input: &str, tol: Option<f64>) -> Result<Outcome, Failure> {
    let input: PickInput = parse(input)?;
    warn_duplicates("node", &input.z);
    let mut matrices = pick_matrices(&input.z, &input.targets(), &input.kernel)?;
    if tol.is_some() {
        matrices.product_psd = recheck(&matrices.product, matrices.product_psd, tol)?;
        if let Some((m, p)) = matrices.quotient.take() {
            let rechecked = recheck(&m, p, tol)?;
            matrices.quotient = Some((m, rechecked));
        }
    }
    let affirmative = matrices.product_psd.verdict.is_psd();
    let verdict = matrices.product_psd.verdict.as_str();
    let text = format!(
        "product form: {}\nquotient form: {}\nverdict: {verdict}",
        psd_text(&matrices.product_psd).replace('\n', "; "),
        matrices
            .quotient
            .as_ref()
            .map(|(_, p)| psd_text(p).replace('\n', "; "))
            .unwrap_or_else(|| "undefined (vanishing denominator)".to_string()),
    );
    let mut doc = to_value(&matrices);
    doc["verdict"] = json!(verdict);
    Ok(Outcome {
        doc,
        text,
        affirmative,
    })
}

fn cmd_extend(input: &str, grid_check: Option<f64>) -> Result<Outcome, Failure> {
    #[derive(Deserialize)]
    struct Input {
        z: PointSet,
        w: Vec<Point>,
        z_new: Point,
        #[serde(default = "default_kernel")]
        kernel: KernelSpec,
    }
    let input: Input = parse(input)?;
    let targets: Vec<pick_kernels::Complex64> = input.w.iter().map(|p| p.to_complex()).collect();
    let disk = one_point_extension_disk(&input.z, &targets, input.z_new, &input.kernel)?;
    let scan = match grid_check {
        Some(res) => Some(extension_disk_grid_oracle(
            &input.z,
            &targets,
            input.z_new,
            &input.kernel,
            res,
        )?),
        None => None,
    };
    let affirmative = !disk.is_empty();
    let mut text = match &disk {
        ExtensionDisk::Disk { center, radius } => {
            format!("disk: center ({}, {}), radius {radius}", center.re, center.im)
        }
        ExtensionDisk::Empty => "disk: empty".to_string(),
    };
    if let Some(scan) = &scan {
        text.push_str(&format!(
            "\ngrid oracle at {}: {} feasible samples",
            scan.resolution, scan.feasible_count
        ));
    }
    let mut doc = json!({ "disk": to_value(&disk) });
    if let Some(scan) = &scan {
        doc["grid_check"] = to_value(scan);
    }
    Ok(Outcome {
        doc,
        text,
        affirmative,
    })
}

fn certificate_text(cert: &ProofCertificate) -> String {
    let mut lines = Vec::new();
    for step in &cert.steps {
        let status = if step.is_valid() {
            "ok".to_string()
        } else {
            format!(
                "FAILED at {}",
                step.first_failure().map(|c| c.name).unwrap_or("?")
            )
        };
        lines.push(format!(
            "step n = {}: {} (conclusion min eigenvalue {:.6e})",
            step.step_index(),
            status,
            step.conclusion.psd.min_eigenvalue
        ));
    }
    match &cert.overall {
        CertificateOutcome::Valid => lines.push("overall: valid".to_string()),
        CertificateOutcome::InvalidAt { step, check } => {
            lines.push(format!("overall: invalid at step {step}, check {check}"))
        }
    }
    lines.join("\n")
}

fn cmd_prove(input: &str, tol: Option<f64>, seed: u64, shuffles: usize) -> Result<Outcome, Failure> {
    #[derive(Deserialize)]
    struct Input {
        kernel: KernelSpec,
        ordering: PointSet,
    }
    let input: Input = parse(input)?;
    warn_duplicates("ordering", &input.ordering);
    let tol = tol.unwrap_or(1e-9);
    if shuffles == 0 {
        let cert = necessity_certificate(&input.kernel, &input.ordering, tol)?;
        let affirmative = cert.overall.is_valid();
        Ok(Outcome {
            doc: to_value(&cert),
            text: certificate_text(&cert),
            affirmative,
        })
    } else {
        let certs = shuffled_certificates(&input.kernel, &input.ordering, tol, shuffles, seed)?;
        let all_valid = certs.iter().all(|c| c.overall.is_valid());
        let text = certs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                format!(
                    "ordering {i}: {}",
                    if c.overall.is_valid() { "valid" } else { "invalid" }
                )
            })
            .chain(std::iter::once(format!("all valid: {all_valid}")))
            .collect::<Vec<_>>()
            .join("\n");
        Ok(Outcome {
            doc: json!({
                "certificates": to_value(&certs),
                "all_valid": all_valid,
            }),
            text,
            affirmative: all_valid,
        })
    }
}

fn run(cli: Cli) -> Result<(Outcome, Format), Failure> {
    let (common, outcome) = match &cli.command {
        Command::Gram(c) => (c, cmd_gram(&read_input(&c.input)?, c.tol)?),
        Command::Psd(c) => (c, cmd_psd(&read_input(&c.input)?, c.tol)?),
        Command::Fz(c) => (c, cmd_fz(&read_input(&c.input)?, c.tol)?),
        Command::Kz(c) => (c, cmd_kz(&read_input(&c.input)?, c.tol)?),
        Command::Cpp(c) => (c, cmd_cpp(&read_input(&c.input)?, c.tol)?),
        Command::Irreducible(c) => (c, cmd_irreducible(&read_input(&c.input)?)?),
        Command::Defect(c) => (c, cmd_defect(&read_input(&c.input)?, c.tol)?),
        Command::Multnorm(c) => (c, cmd_multnorm(&read_input(&c.input)?, c.tol)?),
        Command::Pick(c) => (c, cmd_pick(&read_input(&c.input)?, c.tol)?),
        Command::Extend { common, grid_check } => (
            common,
            cmd_extend(&read_input(&common.input)?, *grid_check)?,
        ),
        Command::Prove { common, shuffles } => (
            common,
            cmd_prove(&read_input(&common.input)?, common.tol, common.seed, *shuffles)?,
        ),
    };
    Ok((outcome, common.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, format)) => {
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string(&outcome.doc).expect("value serializes")
                ),
                Format::Text => println!("{}", outcome.text),
            }
            if outcome.affirmative {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(failure) => {
            eprintln!(
                "{}",
                json!({ "error": failure.code, "detail": failure.detail })
            );
            ExitCode::from(2)
        }
    }
}
