//! File formats and the command pipeline behind the `qfilter` binary.
//!
//! Every command reads an ensemble file (or an upstream artifact), runs one
//! stage of `solve -> design -> synthesize / simulate`, and writes a JSON
//! artifact that can be read back and revalidated. `sweep` writes CSV.
//! Floating-point values in artifacts are rounded to 15 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;

use crate::designer::{design, design_with, MeasurementDesign, Placement, FAILURE_MODE};
use crate::error::Error;
use crate::filter::{solve, FilterSolution, Regime};
use crate::instances;
use crate::linalg::{Mat4, Vec4, C64};
use crate::multiport::{decompose, recompose, recomposition_error, BeamSplitterLayer, MeshProgram};
use crate::oracle::{compare, Comparison, DEFAULT_THREE_STATE_RESOLUTION};
use crate::simulator::{
    sample, von_neumann_baseline, von_neumann_baselines, SimulationReport, VonNeumannBaselines,
};
use crate::states::{Ensemble, StateVector};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: u64 = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin}: line {line}, column {column}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: field `{field}`: {message}")]
    Field {
        origin: String,
        field: String,
        message: String,
    },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Error,
    },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn stage(name: &'static str) -> impl Fn(Error) -> CliError {
    move |source| CliError::Stage {
        stage: name,
        source,
    }
}

fn field_error(origin: &str, field: impl Into<String>, message: impl ToString) -> CliError {
    CliError::Field {
        origin: origin.to_string(),
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Complex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<Complex> for C64 {
    fn from(z: Complex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Input file describing three states and their priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub states: Vec<Vec<Complex>>,
    pub priors: Vec<f64>,
}

impl EnsembleFile {
    pub fn from_ensemble(e: &Ensemble, label: Option<&str>) -> Self {
        Self {
            schema_version: Some(SCHEMA_VERSION),
            label: label.map(str::to_string),
            states: e
                .states()
                .iter()
                .map(|s| s.amplitudes().iter().map(|&z| z.into()).collect())
                .collect(),
            priors: e.priors().to_vec(),
        }
    }

    /// Parses JSON text; `origin` names the source in diagnostics.
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        from_json(text, origin)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Self::parse(&read(path)?, &path.display().to_string())
    }

    /// Validates against the ensemble invariants, naming the offending field.
    pub fn to_ensemble(&self, origin: &str) -> CliResult<Ensemble> {
        check_schema(self.schema_version, origin)?;
        if self.states.len() != 3 {
            return Err(field_error(
                origin,
                "states",
                format!("expected 3 states, found {}", self.states.len()),
            ));
        }
        if self.priors.len() != 3 {
            return Err(field_error(
                origin,
                "priors",
                format!("expected 3 priors, found {}", self.priors.len()),
            ));
        }
        let mut states = Vec::with_capacity(3);
        for (i, amplitudes) in self.states.iter().enumerate() {
            let v = StateVector::new(amplitudes.iter().map(|&z| z.into()).collect())
                .map_err(|err| field_error(origin, format!("states[{i}]"), err))?;
            states.push(v);
        }
        let states: [StateVector; 3] = states.try_into().expect("three states");
        let priors = [self.priors[0], self.priors[1], self.priors[2]];
        Ensemble::new(states, priors).map_err(|err| {
            let field = match err {
                Error::InvalidPriors(_) | Error::DegeneratePrior => "priors",
                _ => "states",
            };
            field_error(origin, field, err)
        })
    }
}

fn check_schema(version: Option<u32>, origin: &str) -> CliResult<()> {
    match version {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(field_error(
            origin,
            "schema_version",
            format!("unsupported version {v}, expected {SCHEMA_VERSION}"),
        )),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn from_json<T: DeserializeOwned>(text: &str, origin: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|err| CliError::Syntax {
        origin: origin.to_string(),
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    })
}

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round15(x))) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded by [`round15`].
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("artifacts serialize");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn matrix_rows(m: &Mat4) -> Vec<Vec<Complex>> {
    (0..4).map(|i| (0..4).map(|j| m[(i, j)].into()).collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<Complex>], origin: &str) -> CliResult<Mat4> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(field_error(origin, "unitary", "expected a 4x4 matrix"));
    }
    Ok(Mat4::from_fn(|i, j| rows[i][j].into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveArtifact {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub solution: FilterSolution,
    /// Failure of the projective filter the optimum is compared against.
    pub von_neumann_baseline: f64,
    pub von_neumann: VonNeumannBaselines,
}

impl SolveArtifact {
    pub fn revalidate(&self, tol: f64) -> CliResult<()> {
        check_schema(Some(self.schema_version), "solve artifact")?;
        let s = &self.solution;
        let sum: f64 = s.q.iter().sum();
        if !sum.is_finite() || s.q.iter().any(|&q| !(-tol..=1.0 + tol).contains(&q)) {
            return Err(field_error("solve artifact", "solution.q", "outside [0, 1]"));
        }
        if s.average_failure > self.von_neumann_baseline + tol {
            return Err(field_error(
                "solve artifact",
                "solution.average_failure",
                "exceeds the projective baseline",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignArtifact {
    pub schema_version: u32,
    pub ensemble: EnsembleFile,
    pub solution: FilterSolution,
    pub placement: Placement,
    pub theta: f64,
    pub chi: [f64; 3],
    /// `M(4)` row by row.
    pub unitary: Vec<Vec<Complex>>,
    /// Exact detection probabilities, `port_probabilities[i][k]` for input `i`.
    pub port_probabilities: [[f64; 4]; 3],
}

impl DesignArtifact {
    pub fn new(e: &Ensemble, label: Option<&str>, d: &MeasurementDesign, sol: &FilterSolution) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            ensemble: EnsembleFile::from_ensemble(e, label),
            solution: *sol,
            placement: d.placement,
            theta: d.theta,
            chi: d.chi,
            unitary: matrix_rows(&d.unitary),
            port_probabilities: [0, 1, 2].map(|i| crate::simulator::port_probabilities(d, i)),
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        from_json(&read(path)?, &path.display().to_string())
    }

    /// Rebuilds the measurement from the stored unitary and validates it
    /// against a fresh solve of the stored ensemble.
    pub fn to_design(&self, tol: f64) -> CliResult<(Ensemble, MeasurementDesign)> {
        let origin = "design artifact";
        check_schema(Some(self.schema_version), origin)?;
        let e = self.ensemble.to_ensemble(origin)?;
        let unitary = matrix_from_rows(&self.unitary, origin)?;
        let inputs = e.embedded().map_err(stage("design"))?;
        let outputs = inputs.map(|v| unitary * v);
        let split = |v: &Vec4| {
            let mut success = *v;
            success[FAILURE_MODE] = C64::new(0.0, 0.0);
            let mut failure = Vec4::zeros();
            failure[FAILURE_MODE] = v[FAILURE_MODE];
            (success, failure)
        };
        let parts = outputs.map(|v| split(&v));
        let d = MeasurementDesign {
            placement: self.placement,
            inputs,
            success: parts.map(|p| p.0),
            failure: parts.map(|p| p.1),
            unitary,
            theta: self.theta,
            chi: self.chi,
        };
        let sol = solve(&e).map_err(stage("solve"))?;
        d.validate(tol).map_err(stage("design"))?;
        d.validate_against(&sol, tol.max(1e-9)).map_err(stage("design"))?;
        Ok((e, d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeshFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshArtifact {
    pub schema_version: u32,
    #[serde(flatten)]
    pub program: MeshProgram,
    /// Max-abs deviation of the recomposed mesh from the design unitary.
    pub recomposition_error: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct MeshRow {
    kind: String,
    p: usize,
    q: Option<usize>,
    t: Option<f64>,
    r: Option<f64>,
    phi: f64,
}

impl MeshArtifact {
    pub fn revalidate(&self) -> CliResult<()> {
        check_schema(Some(self.schema_version), "mesh artifact")?;
        self.program.validate().map_err(stage("synthesize"))
    }

    /// One `layer` row per beam splitter in product order, then one `phase`
    /// row per output mode.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut rows: Vec<MeshRow> = self
            .program
            .layers
            .iter()
            .map(|l| MeshRow {
                kind: "layer".into(),
                p: l.p,
                q: Some(l.q),
                t: Some(round15(l.t)),
                r: Some(round15(l.r)),
                phi: round15(l.phi),
            })
            .collect();
        rows.extend(self.program.output_phases.iter().enumerate().map(|(k, &phi)| MeshRow {
            kind: "phase".into(),
            p: k + 1,
            q: None,
            t: None,
            r: None,
            phi: round15(phi),
        }));
        for row in rows {
            w.serialize(row).expect("in-memory csv");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8");
        format!("# schema_version={SCHEMA_VERSION}\n{body}")
    }

    pub fn from_csv(text: &str, origin: &str) -> CliResult<MeshProgram> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut program = MeshProgram::identity();
        for (n, row) in reader.deserialize::<MeshRow>().enumerate() {
            let line = n + 2;
            let row = row.map_err(|err| CliError::Syntax {
                origin: origin.to_string(),
                line: err.position().map_or(line, |p| p.line() as usize),
                column: 0,
                message: err.to_string(),
            })?;
            let bad = |msg: &str| field_error(origin, format!("row {line}"), msg);
            match row.kind.as_str() {
                "layer" => {
                    let (Some(q), Some(t), Some(r)) = (row.q, row.t, row.r) else {
                        return Err(bad("layer rows need q, t and r"));
                    };
                    let layer = BeamSplitterLayer::new(row.p, q, t, r, row.phi)
                        .map_err(|err| field_error(origin, format!("row {line}"), err))?;
                    program.layers.push(layer);
                }
                "phase" if (1..=4).contains(&row.p) => program.output_phases[row.p - 1] = row.phi,
                _ => return Err(bad("expected kind `layer` or `phase` with a valid mode")),
            }
        }
        Ok(program)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationArtifact {
    pub schema_version: u32,
    pub report: SimulationReport,
    /// Optimal average failure from the closed form.
    pub expected_failure: f64,
    /// Binomial standard deviation of the empirical failure rate.
    pub sigma: f64,
    /// `(empirical - expected) / sigma`, 0 when `sigma = 0`.
    pub z_score: f64,
}

impl SimulationArtifact {
    pub fn new(report: SimulationReport, expected_failure: f64) -> Self {
        let p = expected_failure;
        let sigma = (p * (1.0 - p) / report.trials as f64).sqrt();
        let z_score = if sigma > 0.0 {
            (report.empirical_failure - p) / sigma
        } else {
            0.0
        };
        Self {
            schema_version: SCHEMA_VERSION,
            report,
            expected_failure,
            sigma,
            z_score,
        }
    }

    pub fn revalidate(&self) -> CliResult<()> {
        let origin = "simulation artifact";
        check_schema(Some(self.schema_version), origin)?;
        let r = &self.report;
        let total: u64 = r.per_state.iter().map(|s| s.trials).sum();
        if total != r.trials {
            return Err(field_error(origin, "report.trials", "per-state trials do not add up"));
        }
        for (i, s) in r.per_state.iter().enumerate() {
            if s.counts.iter().sum::<u64>() != s.trials {
                return Err(field_error(
                    origin,
                    format!("report.per_state[{i}].counts"),
                    "counts do not add up",
                ));
            }
        }
        let violations: u64 = r.per_state.iter().map(|s| s.violations).sum();
        if violations != r.violations {
            return Err(field_error(origin, "report.violations", "does not match per-state counts"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonArtifact {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub resolution: f64,
    #[serde(flatten)]
    pub comparison: Comparison,
}

impl ComparisonArtifact {
    pub fn revalidate(&self) -> CliResult<()> {
        check_schema(Some(self.schema_version), "comparison artifact")?;
        let c = &self.comparison;
        if c.q > c.q_prime + self.resolution {
            return Err(field_error("comparison artifact", "Q", "exceeds Q_prime"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SweepFamily {
    /// All overlaps equal to `s`.
    SymmetricS,
    /// `O12 = O13 = s`, `O23` fixed.
    TwoOverlap,
}

/// A one-parameter sweep over overlap `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub family: SweepFamily,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// `O23` for the two-overlap family.
    #[serde(default)]
    pub s2: Option<f64>,
    #[serde(default = "equal_priors")]
    pub priors: [f64; 3],
    #[serde(default = "default_sweep_resolution")]
    pub resolution: f64,
}

fn equal_priors() -> [f64; 3] {
    [1.0 / 3.0; 3]
}

fn default_sweep_resolution() -> f64 {
    DEFAULT_THREE_STATE_RESOLUTION
}

impl SweepSpec {
    /// Figure-style sweep of the symmetric family from 0.01 to 0.99.
    pub fn symmetric_default() -> Self {
        Self {
            family: SweepFamily::SymmetricS,
            start: 0.01,
            stop: 0.99,
            step: 0.01,
            s2: None,
            priors: equal_priors(),
            resolution: DEFAULT_THREE_STATE_RESOLUTION,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |field: &str, msg: &str| field_error("sweep spec", field, msg);
        let open = |x: f64| x > 0.0 && x < 1.0;
        if !open(self.start) {
            return Err(bad("start", "must lie in (0, 1)"));
        }
        if !open(self.stop) || self.stop < self.start {
            return Err(bad("stop", "must lie in (0, 1) and not below start"));
        }
        if !(self.step > 0.0) {
            return Err(bad("step", "must be positive"));
        }
        match (self.family, self.s2) {
            (SweepFamily::TwoOverlap, None) => Err(bad("s2", "required for two_overlap")),
            (SweepFamily::TwoOverlap, Some(s2)) if !(0.0..1.0).contains(&s2) => {
                Err(bad("s2", "must lie in [0, 1)"))
            }
            _ => Ok(()),
        }
    }

    /// Grid points, rounded to 12 decimals so that `0.01 k` prints cleanly.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }

    fn ensemble(&self, s: f64) -> crate::Result<Ensemble> {
        match self.family {
            SweepFamily::SymmetricS => instances::two_overlap_with_priors(s, s, self.priors),
            SweepFamily::TwoOverlap => {
                instances::two_overlap_with_priors(s, self.s2.unwrap_or(0.0), self.priors)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "Q_prime")]
    pub q_prime: f64,
    #[serde(rename = "Q_double_prime")]
    pub q_double_prime: f64,
    pub regime: Regime,
}

pub fn sweep(spec: &SweepSpec) -> CliResult<Vec<SweepRow>> {
    spec.validate()?;
    spec.grid()
        .into_iter()
        .map(|s| {
            let e = spec.ensemble(s).map_err(stage("sweep"))?;
            let c = compare(&e, spec.resolution).map_err(stage("compare"))?;
            let regime = solve(&e).map_err(stage("solve"))?.regime;
            Ok(SweepRow {
                s,
                q: c.q,
                q_prime: c.q_prime,
                q_double_prime: c.q_double_prime,
                regime,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        let rounded = SweepRow {
            s: round15(row.s),
            q: round15(row.q),
            q_prime: round15(row.q_prime),
            q_double_prime: round15(row.q_double_prime),
            regime: row.regime,
        };
        w.serialize(rounded).expect("in-memory csv");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8");
    format!("# schema_version={SCHEMA_VERSION}\n{body}")
}

pub fn parse_sweep_csv(text: &str) -> CliResult<Vec<SweepRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|row| {
            row.map_err(|err| CliError::Syntax {
                origin: "sweep csv".into(),
                line: err.position().map_or(0, |p| p.line() as usize),
                column: 0,
                message: err.to_string(),
            })
        })
        .collect()
}

/// Loads either a design artifact (`--design`) or an ensemble file
/// (`--input`), designing from scratch in the latter case.
pub fn load_design(
    input: &Source,
    placement: Option<Placement>,
    tol: f64,
) -> CliResult<(Ensemble, MeasurementDesign)> {
    match (&input.input, &input.design) {
        (_, Some(path)) => DesignArtifact::load(path)?.to_design(tol),
        (Some(path), None) => {
            let e = EnsembleFile::load(path)?.to_ensemble(&path.display().to_string())?;
            let d = design_ensemble(&e, placement, tol)?.1;
            Ok((e, d))
        }
        (None, None) => Err(CliError::Usage("either --input or --design is required".into())),
    }
}

fn design_ensemble(
    e: &Ensemble,
    placement: Option<Placement>,
    tol: f64,
) -> CliResult<(FilterSolution, MeasurementDesign)> {
    let sol = solve(e).map_err(stage("solve"))?;
    let d = match placement {
        Some(p) => design_with(e, &sol, p),
        None => design(e, &sol),
    }
    .map_err(stage("design"))?;
    d.validate(tol).map_err(stage("design"))?;
    Ok((sol, d))
}

pub fn run_solve(file: &EnsembleFile, origin: &str) -> CliResult<SolveArtifact> {
    let e = file.to_ensemble(origin)?;
    Ok(SolveArtifact {
        schema_version: SCHEMA_VERSION,
        label: file.label.clone(),
        solution: solve(&e).map_err(stage("solve"))?,
        von_neumann_baseline: von_neumann_baseline(&e).map_err(stage("solve"))?,
        von_neumann: von_neumann_baselines(&e).map_err(stage("solve"))?,
    })
}

pub fn run_design(
    file: &EnsembleFile,
    origin: &str,
    placement: Option<Placement>,
    tol: f64,
) -> CliResult<DesignArtifact> {
    let e = file.to_ensemble(origin)?;
    let (sol, d) = design_ensemble(&e, placement, tol)?;
    Ok(DesignArtifact::new(&e, file.label.as_deref(), &d, &sol))
}

pub fn run_synthesize(d: &MeasurementDesign, tol: f64) -> CliResult<MeshArtifact> {
    let program = decompose(&d.unitary).map_err(stage("synthesize"))?;
    let err = recomposition_error(&program, &d.unitary);
    if err > tol.max(1e-9) {
        return Err(CliError::Stage {
            stage: "synthesize",
            source: Error::NotUnitary { residual: err },
        });
    }
    debug_assert!(recompose(&program).iter().all(|z| z.is_finite()));
    Ok(MeshArtifact {
        schema_version: SCHEMA_VERSION,
        program,
        recomposition_error: err,
    })
}

pub fn run_simulate(
    e: &Ensemble,
    d: &MeasurementDesign,
    trials: u64,
    seed: u64,
) -> CliResult<SimulationArtifact> {
    let report = sample(d, e, trials, seed).map_err(stage("simulate"))?;
    let expected = solve(e).map_err(stage("solve"))?.average_failure;
    Ok(SimulationArtifact::new(report, expected))
}

pub fn run_compare(file: &EnsembleFile, origin: &str, resolution: f64) -> CliResult<ComparisonArtifact> {
    let e = file.to_ensemble(origin)?;
    Ok(ComparisonArtifact {
        schema_version: SCHEMA_VERSION,
        label: file.label.clone(),
        resolution,
        comparison: compare(&e, resolution).map_err(stage("compare"))?,
    })
}

/// Optimal unambiguous filtering of one quantum state against two others.
#[derive(Debug, Parser)]
#[command(name = "qfilter", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Validation tolerance.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct Source {
    /// Ensemble file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Design artifact produced by `qfilter design`.
    #[arg(long, conflicts_with = "input")]
    pub design: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal failure probabilities and regime.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Four-mode unitary realizing the optimum.
    Design {
        #[arg(long)]
        input: PathBuf,
        /// primary, swapped or pass_through.
        #[arg(long)]
        placement: Option<Placement>,
        #[command(flatten)]
        common: Common,
    },
    /// Beam-splitter mesh for a design.
    Synthesize {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        placement: Option<Placement>,
        #[arg(long, value_enum, default_value_t = MeshFormat::Json)]
        format: MeshFormat,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo photon counting on a design.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        placement: Option<Placement>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Filtering against full three-state and two-state discrimination.
    Compare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THREE_STATE_RESOLUTION)]
        resolution: f64,
        #[command(flatten)]
        common: Common,
    },
    /// CSV of Q, Q' and Q'' over a one-parameter family.
    Sweep {
        /// JSON sweep specification; the flags below are used without it.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SweepFamily::SymmetricS)]
        family: SweepFamily,
        #[arg(long, default_value_t = 0.01)]
        start: f64,
        #[arg(long, default_value_t = 0.99)]
        stop: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        s2: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_THREE_STATE_RESOLUTION)]
        resolution: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn load_ensemble_file(path: &Path) -> CliResult<(EnsembleFile, String)> {
    Ok((EnsembleFile::load(path)?, path.display().to_string()))
}

/// Runs one command and returns the text to emit.
pub fn execute(command: &Command) -> CliResult<String> {
    match command {
        Command::Solve { input, .. } => {
            let (file, origin) = load_ensemble_file(input)?;
            let a = run_solve(&file, &origin)?;
            Ok(to_json(&a))
        }
        Command::Design {
            input,
            placement,
            common,
        } => {
            let (file, origin) = load_ensemble_file(input)?;
            Ok(to_json(&run_design(&file, &origin, *placement, common.tolerance)?))
        }
        Command::Synthesize {
            source,
            placement,
            format,
            common,
        } => {
            let (_, d) = load_design(source, *placement, common.tolerance)?;
            let mesh = run_synthesize(&d, common.tolerance)?;
            Ok(match format {
                MeshFormat::Json => to_json(&mesh),
                MeshFormat::Csv => mesh.to_csv(),
            })
        }
        Command::Simulate {
            source,
            placement,
            trials,
            seed,
            common,
        } => {
            let (e, d) = load_design(source, *placement, common.tolerance)?;
            Ok(to_json(&run_simulate(&e, &d, *trials, *seed)?))
        }
        Command::Compare {
            input, resolution, ..
        } => {
            let (file, origin) = load_ensemble_file(input)?;
            Ok(to_json(&run_compare(&file, &origin, *resolution)?))
        }
        Command::Sweep {
            input,
            family,
            start,
            stop,
            step,
            s2,
            resolution,
            ..
        } => {
            let spec = match input {
                Some(path) => from_json(&read(path)?, &path.display().to_string())?,
                None => SweepSpec {
                    family: *family,
                    start: *start,
                    stop: *stop,
                    step: *step,
                    s2: *s2,
                    priors: equal_priors(),
                    resolution: *resolution,
                },
            };
            Ok(sweep_csv(&sweep(&spec)?))
        }
    }
}

fn output_of(command: &Command) -> Option<&Path> {
    let common = match command {
        Command::Solve { common, .. }
        | Command::Design { common, .. }
        | Command::Synthesize { common, .. }
        | Command::Simulate { common, .. }
        | Command::Compare { common, .. }
        | Command::Sweep { common, .. } => common,
    };
    common.output.as_deref()
}

/// Executes and writes to `--output` or stdout.
pub fn run(cli: &Cli) -> CliResult<()> {
    let text = execute(&cli.command)?;
    match output_of(&cli.command) {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut out = String::new();
            write!(out, "{text}").expect("string write");
            print!("{out}");
            Ok(())
        }
    }
}
