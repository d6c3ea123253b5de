//! JSON wire formats.
//!
//! Complex numbers travel as `[re, im]`. A point set is
//! `{"points": [[re,im], ...], "labels": [...]?}`, a Hermitian matrix is a
//! row-major nested array of `[re, im]` pairs, and a kernel is tagged by
//! `"type"`. These encodings are the contract for every CLI command; report
//! types serialize to the shapes documented on each impl.

use crate::hermitian::HermitianMatrix;
use crate::kernel::KernelSpec;
use crate::multiplier::{
    DefectInvariance, ExtensionDisk, ExtensionScan, MultiplierData, PickMatrices,
};
use crate::pick::{CriterionReport, IrreducibilityReport};
use crate::point::{Point, PointSet};
use crate::proof::{
    CertificateOutcome, DiagonalCheck, InductionStepRecord, NamedCheck, ProofCertificate,
};
use crate::psd::{PsdReport, Verdict};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::{self, Deserialize, Deserializer};
use serde::ser::{Serialize, SerializeSeq, SerializeStruct, Serializer};

struct Cx(Complex64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.0.re, self.0.im).serialize(serializer)
    }
}

struct CxSlice<'a>(&'a [Complex64]);

impl Serialize for CxSlice<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for &c in self.0 {
            seq.serialize_element(&Cx(c))?;
        }
        seq.end()
    }
}

pub(crate) fn complex_from_pair(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

// ---- Point / PointSet ----

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.re, self.im).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(deserializer)?;
        let p = Point::new(re, im);
        if !p.is_finite() {
            return Err(de::Error::custom("point components must be finite"));
        }
        Ok(p)
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let has_labels = self.labels().is_some();
        let mut s = serializer.serialize_struct("PointSet", 1 + usize::from(has_labels))?;
        s.serialize_field("points", self.points())?;
        if let Some(labels) = self.labels() {
            s.serialize_field("labels", labels)?;
        }
        s.end()
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Dto {
            points: Vec<Point>,
            #[serde(default)]
            labels: Option<Vec<String>>,
        }
        let dto = Dto::deserialize(deserializer)?;
        match dto.labels {
            Some(labels) => {
                PointSet::with_labels(dto.points, labels).map_err(de::Error::custom)
            }
            None => PointSet::new(dto.points).map_err(de::Error::custom),
        }
    }
}

// ---- HermitianMatrix ----

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Row<'a>(&'a HermitianMatrix, usize);
        impl Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let n = self.0.dim();
                let mut seq = serializer.serialize_seq(Some(n))?;
                for j in 0..n {
                    seq.serialize_element(&Cx(self.0.get(self.1, j)))?;
                }
                seq.end()
            }
        }
        let n = self.dim();
        let mut seq = serializer.serialize_seq(Some(n))?;
        for i in 0..n {
            seq.serialize_element(&Row(self, i))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(de::Error::custom(
                "matrix must be a nonempty square nested array of [re, im] pairs",
            ));
        }
        let m = DMatrix::from_fn(n, n, |i, j| complex_from_pair(rows[i][j]));
        HermitianMatrix::new(m).map_err(de::Error::custom)
    }
}

// ---- KernelSpec ----

impl Serialize for KernelSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            KernelSpec::Szego | KernelSpec::Bergman => {
                let mut s = serializer.serialize_struct("KernelSpec", 1)?;
                s.serialize_field("type", self.name())?;
                s.end()
            }
            KernelSpec::Power { alpha } => {
                let mut s = serializer.serialize_struct("KernelSpec", 2)?;
                s.serialize_field("type", "power")?;
                s.serialize_field("alpha", alpha)?;
                s.end()
            }
            KernelSpec::GramTable { matrix, points } => {
                let mut s = serializer.serialize_struct("KernelSpec", 3)?;
                s.serialize_field("type", "gram_table")?;
                s.serialize_field("matrix", matrix)?;
                s.serialize_field("points", points)?;
                s.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for KernelSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Dto {
            #[serde(rename = "type")]
            kind: String,
            #[serde(default)]
            alpha: Option<f64>,
            #[serde(default)]
            matrix: Option<HermitianMatrix>,
            #[serde(default)]
            points: Option<PointSet>,
        }
        let dto = Dto::deserialize(deserializer)?;
        match dto.kind.as_str() {
            "szego" => Ok(KernelSpec::Szego),
            "bergman" => Ok(KernelSpec::Bergman),
            "power" => {
                let alpha = dto
                    .alpha
                    .ok_or_else(|| de::Error::custom("power kernel requires \"alpha\""))?;
                KernelSpec::power(alpha).map_err(de::Error::custom)
            }
            "gram_table" => {
                let matrix = dto.matrix.ok_or_else(|| {
                    de::Error::custom("gram_table kernel requires \"matrix\"")
                })?;
                let points = dto.points.ok_or_else(|| {
                    de::Error::custom("gram_table kernel requires \"points\"")
                })?;
                KernelSpec::gram_table(matrix, points).map_err(de::Error::custom)
            }
            other => Err(de::Error::custom(format!("unknown kernel type {other:?}"))),
        }
    }
}

// ---- reports ----

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// `{"verdict", "min_eigenvalue", "tolerance", "numerical_rank", "witness",
/// "eigenvalues"}`
impl Serialize for PsdReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PsdReport", 6)?;
        s.serialize_field("verdict", &self.verdict)?;
        s.serialize_field("min_eigenvalue", &self.min_eigenvalue)?;
        s.serialize_field("tolerance", &self.tolerance_used)?;
        s.serialize_field("numerical_rank", &self.numerical_rank)?;
        s.serialize_field("witness", &CxSlice(&self.witness))?;
        s.serialize_field("eigenvalues", &self.eigenvalues)?;
        s.end()
    }
}

/// `{"z", "verdict", "min_eigenvalue", "tolerance", "matrix", "witness"}`
impl Serialize for CriterionReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CriterionReport", 6)?;
        s.serialize_field("z", &self.base_point)?;
        s.serialize_field("verdict", &self.psd.verdict)?;
        s.serialize_field("min_eigenvalue", &self.psd.min_eigenvalue)?;
        s.serialize_field("tolerance", &self.psd.tolerance_used)?;
        s.serialize_field("matrix", &self.gram)?;
        s.serialize_field("witness", &CxSlice(&self.psd.witness))?;
        s.end()
    }
}

impl Serialize for IrreducibilityReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("IrreducibilityReport", 3)?;
        s.serialize_field("nonvanishing", &self.nonvanishing)?;
        s.serialize_field("independent_pairs", &self.independent_pairs)?;
        s.serialize_field("offending_pairs", &self.offending_pairs)?;
        s.end()
    }
}

// ---- multiplier data ----

/// `{"kernel", "points", "targets"}` with targets as `N` matrices, each an
/// `s x t` nested array of `[re, im]` pairs.
impl Serialize for MultiplierData {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Target<'a>(&'a DMatrix<Complex64>);
        impl Serialize for Target<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                struct Row<'a>(&'a DMatrix<Complex64>, usize);
                impl Serialize for Row<'_> {
                    fn serialize<S: Serializer>(
                        &self,
                        serializer: S,
                    ) -> Result<S::Ok, S::Error> {
                        let mut seq = serializer.serialize_seq(Some(self.0.ncols()))?;
                        for j in 0..self.0.ncols() {
                            seq.serialize_element(&Cx(self.0[(self.1, j)]))?;
                        }
                        seq.end()
                    }
                }
                let mut seq = serializer.serialize_seq(Some(self.0.nrows()))?;
                for i in 0..self.0.nrows() {
                    seq.serialize_element(&Row(self.0, i))?;
                }
                seq.end()
            }
        }
        struct Targets<'a>(&'a [DMatrix<Complex64>]);
        impl Serialize for Targets<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for t in self.0 {
                    seq.serialize_element(&Target(t))?;
                }
                seq.end()
            }
        }
        let mut s = serializer.serialize_struct("MultiplierData", 3)?;
        s.serialize_field("kernel", self.spec())?;
        s.serialize_field("points", self.points())?;
        s.serialize_field("targets", &Targets(self.targets()))?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for MultiplierData {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Dto {
            kernel: KernelSpec,
            points: PointSet,
            targets: Vec<Vec<Vec<[f64; 2]>>>,
        }
        let dto = Dto::deserialize(deserializer)?;
        let mut targets = Vec::with_capacity(dto.targets.len());
        for (index, rows) in dto.targets.iter().enumerate() {
            let s = rows.len();
            let t = rows.first().map(|r| r.len()).unwrap_or(0);
            if s == 0 || t == 0 || rows.iter().any(|r| r.len() != t) {
                return Err(de::Error::custom(format!(
                    "target {index} must be a nonempty rectangular nested array"
                )));
            }
            targets.push(DMatrix::from_fn(s, t, |i, j| complex_from_pair(rows[i][j])));
        }
        MultiplierData::new(dto.kernel, dto.points, targets).map_err(de::Error::custom)
    }
}

impl Serialize for DefectInvariance {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DefectInvariance", 2)?;
        s.serialize_field("ambient", &self.ambient)?;
        s.serialize_field("restricted", &self.restricted)?;
        s.end()
    }
}

/// `{"product": {"matrix", "psd"}, "quotient": {"matrix", "psd"} | null}`
impl Serialize for PickMatrices {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Form<'a>(&'a HermitianMatrix, &'a PsdReport);
        impl Serialize for Form<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut s = serializer.serialize_struct("Form", 2)?;
                s.serialize_field("matrix", self.0)?;
                s.serialize_field("psd", self.1)?;
                s.end()
            }
        }
        let mut s = serializer.serialize_struct("PickMatrices", 2)?;
        s.serialize_field("product", &Form(&self.product, &self.product_psd))?;
        match &self.quotient {
            Some((m, p)) => s.serialize_field("quotient", &Form(m, p))?,
            None => s.serialize_field("quotient", &Option::<()>::None)?,
        }
        s.end()
    }
}

/// `{"center": [re, im], "radius": r}` or `{"empty": true}`
impl Serialize for ExtensionDisk {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtensionDisk::Disk { center, radius } => {
                let mut s = serializer.serialize_struct("ExtensionDisk", 2)?;
                s.serialize_field("center", &Cx(*center))?;
                s.serialize_field("radius", radius)?;
                s.end()
            }
            ExtensionDisk::Empty => {
                let mut s = serializer.serialize_struct("ExtensionDisk", 1)?;
                s.serialize_field("empty", &true)?;
                s.end()
            }
        }
    }
}

impl Serialize for ExtensionScan {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ExtensionScan", 3)?;
        s.serialize_field("resolution", &self.resolution)?;
        s.serialize_field("feasible_count", &self.feasible_count)?;
        s.serialize_field("disk", &self.disk)?;
        s.end()
    }
}

// ---- proof certificates ----

fn pass_fail(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

/// `{"name", "verdict": "pass"|"fail", "min_eigenvalue"?, "residual"?}`
impl Serialize for NamedCheck {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let len = 2 + usize::from(self.psd.is_some()) + usize::from(self.residual.is_some());
        let mut s = serializer.serialize_struct("NamedCheck", len)?;
        s.serialize_field("name", self.name)?;
        s.serialize_field("verdict", pass_fail(self.passed))?;
        if let Some(psd) = &self.psd {
            s.serialize_field("min_eigenvalue", &psd.min_eigenvalue)?;
        }
        if let Some(residual) = &self.residual {
            s.serialize_field("residual", residual)?;
        }
        s.end()
    }
}

impl Serialize for DiagonalCheck {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DiagonalCheck", 4)?;
        s.serialize_field("x", &self.x_index)?;
        s.serialize_field("z", &self.z_index)?;
        s.serialize_field("value", &self.value)?;
        s.serialize_field("verdict", pass_fail(self.passed))?;
        s.end()
    }
}

/// `{"n", "points", "checks", "conclusion"}`
impl Serialize for InductionStepRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("InductionStepRecord", 4)?;
        s.serialize_field("n", &self.step_index())?;
        s.serialize_field("points", &self.points)?;
        s.serialize_field("checks", &self.checks)?;
        s.serialize_field("conclusion", &self.conclusion)?;
        s.end()
    }
}

/// `"valid"` or `{"invalid_at": {"step", "check"}}`
impl Serialize for CertificateOutcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CertificateOutcome::Valid => serializer.serialize_str("valid"),
            CertificateOutcome::InvalidAt { step, check } => {
                struct At<'a>(usize, &'a str);
                impl Serialize for At<'_> {
                    fn serialize<S: Serializer>(
                        &self,
                        serializer: S,
                    ) -> Result<S::Ok, S::Error> {
                        let mut s = serializer.serialize_struct("At", 2)?;
                        s.serialize_field("step", &self.0)?;
                        s.serialize_field("check", self.1)?;
                        s.end()
                    }
                }
                let mut s = serializer.serialize_struct("CertificateOutcome", 1)?;
                s.serialize_field("invalid_at", &At(*step, check))?;
                s.end()
            }
        }
    }
}

/// `{"kernel", "ordering", "base_case", "steps", "final_cross_check"?,
/// "overall"}`
impl Serialize for ProofCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let len = 5 + usize::from(self.final_cross_check.is_some());
        let mut s = serializer.serialize_struct("ProofCertificate", len)?;
        s.serialize_field("kernel", &self.kernel)?;
        s.serialize_field("ordering", &self.ordering)?;
        s.serialize_field("base_case", &self.base_case)?;
        s.serialize_field("steps", &self.steps)?;
        if let Some(cross) = &self.final_cross_check {
            s.serialize_field("final_cross_check", cross)?;
        }
        s.serialize_field("overall", &self.overall)?;
        s.end()
    }
}
