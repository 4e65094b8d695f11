//! Batch runs behind the `chanres` binary: channel analysis, randomized
//! verification suites and sweeps, rendered as JSON or CSV.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::convex::ConvexError;
use crate::discrimination::{
    advantage, explore_coherent_probe_advantage, incoherent_probe_sandwich, p_succ_free_probes,
    verify_incoherent_povm_collapse, DiscriminationError, GameClass, ROUTE_TOL,
};
use crate::measures::{c_l1, c_robustness, c_trace, c_trace_sdp, omega, DistanceMeasure, FreeStateSet, MeasureError};
use crate::objects::{is_dio, is_mio, ChannelSpec, ClassTag, DensityMatrix, FreeChannelClass, ObjectError, QuantumChannel};
use crate::power::{
    generating_power, increasing_power_search, omega_1, property_suite, qubit_unitary_power, Clause, PowerError,
    SearchSettings,
};
use crate::random::{
    haar_unitary, random_channel, random_class_channel, random_density_matrix, random_pure_state, Rng, RNG_ALGORITHM,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    /// Bad input: malformed spec, invalid channel, unsupported option.
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("solver failed: {0}")]
    Solver(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 2,
            HarnessError::Solver(_) => 3,
        }
    }
}

impl From<ObjectError> for HarnessError {
    fn from(e: ObjectError) -> Self {
        match e.invariant() {
            Some(inv) => HarnessError::Validation(format!("{inv}: {e}")),
            None => HarnessError::Validation(e.to_string()),
        }
    }
}

impl From<ConvexError> for HarnessError {
    fn from(e: ConvexError) -> Self {
        match e {
            ConvexError::Object(o) => o.into(),
            ConvexError::InvalidTolerance(_) | ConvexError::Dimension(_) => HarnessError::Validation(e.to_string()),
            other => HarnessError::Solver(other.to_string()),
        }
    }
}

impl From<MeasureError> for HarnessError {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Solver(s) => s.into(),
            MeasureError::Object(o) => o.into(),
            other => HarnessError::Validation(other.to_string()),
        }
    }
}

impl From<PowerError> for HarnessError {
    fn from(e: PowerError) -> Self {
        match e {
            PowerError::Measure(m) => m.into(),
            PowerError::Object(o) => o.into(),
            other => HarnessError::Validation(other.to_string()),
        }
    }
}

impl From<DiscriminationError> for HarnessError {
    fn from(e: DiscriminationError) -> Self {
        match e {
            DiscriminationError::Solver(s) => s.into(),
            DiscriminationError::Measure(m) => m.into(),
            DiscriminationError::Power(p) => p.into(),
            DiscriminationError::Object(o) => o.into(),
            DiscriminationError::AssertionMismatch { .. } => HarnessError::Solver(e.to_string()),
            other => HarnessError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown output format `{other}` (expected json or csv)")),
        }
    }
}

/// Channel family generated by `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// Haar-random unitary channels.
    #[default]
    Unitary,
    /// Random channels with two Kraus operators.
    Channel,
}

impl FromStr for Generator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "unitary" => Ok(Generator::Unitary),
            "channel" => Ok(Generator::Channel),
            other => Err(format!("unknown generator `{other}` (expected unitary or channel)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub dim: usize,
    /// `None` runs both MIO and DIO where a suite supports it.
    pub class: Option<ClassTag>,
    pub measure: DistanceMeasure,
    pub tol: f64,
    pub trials: usize,
    pub seed: u64,
    pub restarts: usize,
    pub generator: Generator,
    #[serde(skip)]
    pub format: OutputFormat,
    pub inputs: Vec<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            class: None,
            measure: DistanceMeasure::TraceDistance,
            tol: 1e-8,
            trials: 20,
            seed: 0,
            restarts: 32,
            generator: Generator::Unitary,
            format: OutputFormat::Json,
            inputs: Vec::new(),
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.dim < 2 {
            return Err(HarnessError::Validation(format!("dimension must be at least 2, got {}", self.dim)));
        }
        if !(self.tol >= 1e-8 && self.tol < 1.0) {
            return Err(HarnessError::Validation(format!("tolerance {} outside [1e-8, 1)", self.tol)));
        }
        if self.restarts == 0 {
            return Err(HarnessError::Validation("restarts must be at least 1".into()));
        }
        Ok(())
    }

    fn classes(&self) -> Vec<ClassTag> {
        match self.class {
            Some(c) => vec![c],
            None => ClassTag::ALL.to_vec(),
        }
    }

    fn search(&self, iterations: usize) -> SearchSettings {
        SearchSettings {
            restarts: self.restarts,
            iterations,
            seed: self.seed,
            basis_starts: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub tool: &'static str,
    pub version: &'static str,
    pub rng: &'static str,
    pub command: String,
    pub config: RunConfig,
}

impl ReportHeader {
    fn new(command: impl Into<String>, config: &RunConfig) -> Self {
        Self {
            tool: "chanres",
            version: env!("CARGO_PKG_VERSION"),
            rng: RNG_ALGORITHM,
            command: command.into(),
            config: config.clone(),
        }
    }
}

/// Rendered report and the exit code the process should return.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub exit_code: i32,
}

/// Formats with 12 significant digits.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.11e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn csv_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 output")
}

fn opt(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

pub fn load_spec(path: &Path) -> Result<(String, QuantumChannel), HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let spec = ChannelSpec::from_json(&text)?;
    let channel = spec.to_channel()?;
    let name = spec.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "channel".into())
    });
    Ok((name, channel))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisProbeRow {
    pub probe: usize,
    /// Distance of `N(|i><i|)` to the free states under the chosen measure.
    pub coherence: f64,
    pub c1: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub header: ReportHeader,
    pub channel: String,
    pub dim_in: usize,
    pub dim_out: usize,
    pub is_mio: bool,
    pub is_dio: bool,
    pub measure: DistanceMeasure,
    pub per_basis: Vec<BasisProbeRow>,
    /// Trace-distance generating power.
    pub generating_power: f64,
    /// Generating power under the chosen measure.
    pub generating_power_measure: f64,
    /// Best `ω(N(ρ)) − ω(ρ)` found by multistart search.
    pub increasing_power_search: f64,
    /// Free-probe success probability per class.
    pub p_succ_free_probes: BTreeMap<ClassTag, f64>,
    pub max_certificate_gap: f64,
}

pub fn analyze(name: &str, channel: &QuantumChannel, config: &RunConfig) -> Result<AnalyzeReport, HarnessError> {
    config.validate()?;
    let tol = config.tol;
    let set = FreeStateSet::Incoherent(channel.dim_in());
    let out_set = FreeStateSet::Incoherent(channel.dim_out());
    let mut per_basis = Vec::new();
    let mut gap = 0.0f64;
    for i in 0..channel.dim_in() {
        let out = channel.apply(&DensityMatrix::basis(channel.dim_in(), i))?;
        let m = omega(config.measure, out_set, &out, tol)?;
        let c1 = c_trace(&out, tol)?;
        let g = m.gap.max(c1.gap);
        gap = gap.max(g);
        per_basis.push(BasisProbeRow {
            probe: i,
            coherence: m.value,
            c1: c1.value,
            gap: g,
        });
    }
    let trace = generating_power(channel, DistanceMeasure::TraceDistance, set, tol)?;
    let chosen = generating_power(channel, config.measure, set, tol)?;
    gap = gap.max(trace.certificate_gap).max(chosen.certificate_gap);
    let search = increasing_power_search(channel, config.measure, &config.search(200), tol)?;
    let mut free = BTreeMap::new();
    if channel.dim_in() == channel.dim_out() {
        for tag in config.classes() {
            let r = p_succ_free_probes(channel, tag, tol)?;
            gap = gap.max(r.certificate_gap);
            free.insert(tag, r.value);
        }
    }
    Ok(AnalyzeReport {
        header: ReportHeader::new("analyze", config),
        channel: name.to_string(),
        dim_in: channel.dim_in(),
        dim_out: channel.dim_out(),
        is_mio: is_mio(channel, 1e-8),
        is_dio: is_dio(channel, 1e-8),
        measure: config.measure,
        per_basis,
        generating_power: trace.generating,
        generating_power_measure: chosen.generating,
        increasing_power_search: search.value,
        p_succ_free_probes: free,
        max_certificate_gap: gap,
    })
}

impl AnalyzeReport {
    /// Long-form CSV: `quantity,index,value`.
    pub fn to_csv(&self) -> String {
        let mut rows = vec![
            vec!["dim_in".into(), String::new(), self.dim_in.to_string()],
            vec!["dim_out".into(), String::new(), self.dim_out.to_string()],
            vec!["is_mio".into(), String::new(), self.is_mio.to_string()],
            vec!["is_dio".into(), String::new(), self.is_dio.to_string()],
        ];
        for r in &self.per_basis {
            rows.push(vec!["coherence".into(), r.probe.to_string(), format_number(r.coherence)]);
            rows.push(vec!["c1".into(), r.probe.to_string(), format_number(r.c1)]);
        }
        rows.push(vec!["generating_power".into(), String::new(), format_number(self.generating_power)]);
        rows.push(vec![
            "generating_power_measure".into(),
            String::new(),
            format_number(self.generating_power_measure),
        ]);
        rows.push(vec![
            "increasing_power_search".into(),
            String::new(),
            format_number(self.increasing_power_search),
        ]);
        for (tag, v) in &self.p_succ_free_probes {
            rows.push(vec!["p_succ_free_probes".into(), tag.to_string(), format_number(*v)]);
        }
        rows.push(vec!["max_certificate_gap".into(), String::new(), format_number(self.max_certificate_gap)]);
        csv_table(&["quantity".into(), "index".into(), "value".into()], &rows)
    }
}

pub fn cmd_analyze(config: &RunConfig) -> Result<Output, HarnessError> {
    let path = match config.inputs.as_slice() {
        [p] => p,
        [] => return Err(HarnessError::Validation("analyze needs --input <path>".into())),
        _ => return Err(HarnessError::Validation("analyze takes exactly one --input".into())),
    };
    let (name, channel) = load_spec(path)?;
    let report = analyze(&name, &channel, config)?;
    let text = match config.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => report.to_csv(),
    };
    Ok(Output { text, exit_code: 0 })
}

/// Verification suites, one per result being checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    /// Increasing power equals generating power.
    #[serde(rename = "prop1")]
    Prop1,
    /// Free-probe success probability through both routes.
    #[serde(rename = "thm2")]
    Thm2,
    /// Structural properties of the generating power.
    #[serde(rename = "prop3")]
    Prop3,
    /// Advantage of a probe bounded by half its coherence.
    #[serde(rename = "thm4")]
    Thm4,
    /// Absolute ceiling on the success probability.
    #[serde(rename = "cor5")]
    Cor5,
    /// Incoherent-probe value across SIO, IO, DIO and MIO.
    #[serde(rename = "prop6")]
    Prop6,
    /// Diagonal measurements give no advantage.
    #[serde(rename = "thm9")]
    Thm9,
    /// Closed form for qubit unitaries.
    #[serde(rename = "qubit-closed-form")]
    QubitClosedForm,
    /// Coherence bounds and qubit relations.
    #[serde(rename = "bounds")]
    Bounds,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Prop1,
        Suite::Thm2,
        Suite::Prop3,
        Suite::Thm4,
        Suite::Cor5,
        Suite::Prop6,
        Suite::Thm9,
        Suite::QubitClosedForm,
        Suite::Bounds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Prop1 => "prop1",
            Suite::Thm2 => "thm2",
            Suite::Prop3 => "prop3",
            Suite::Thm4 => "thm4",
            Suite::Cor5 => "cor5",
            Suite::Prop6 => "prop6",
            Suite::Thm9 => "thm9",
            Suite::QubitClosedForm => "qubit-closed-form",
            Suite::Bounds => "bounds",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|t| t.as_str()).collect();
                format!("unknown suite `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub label: String,
    pub passed: bool,
    /// Quantity compared against `slack`; positive beyond it is a failure.
    pub violation: f64,
    pub slack: f64,
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    fn new(index: usize, label: impl Into<String>, violation: f64, slack: f64, values: &[(&str, f64)]) -> Self {
        Self {
            index,
            label: label.into(),
            passed: violation <= slack,
            violation,
            slack,
            values: values.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            error: None,
        }
    }

    fn failed(index: usize, label: impl Into<String>, error: &HarnessError) -> Self {
        Self {
            index,
            label: label.into(),
            passed: false,
            violation: f64::INFINITY,
            slack: 0.0,
            values: BTreeMap::new(),
            error: Some(error.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub header: ReportHeader,
    pub suite: Suite,
    pub trials: Vec<TrialRecord>,
    pub max_violation: f64,
    pub failures: usize,
    pub solver_failures: usize,
    pub passed: bool,
}

impl VerifyReport {
    pub fn to_csv(&self) -> String {
        let keys: BTreeSet<&String> = self.trials.iter().flat_map(|t| t.values.keys()).collect();
        let mut header: Vec<String> = ["index", "label", "passed", "violation", "slack"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend(keys.iter().map(|k| k.to_string()));
        header.push("error".into());
        let rows: Vec<Vec<String>> = self
            .trials
            .iter()
            .map(|t| {
                let mut r = vec![
                    t.index.to_string(),
                    t.label.clone(),
                    t.passed.to_string(),
                    format_number(t.violation),
                    format_number(t.slack),
                ];
                r.extend(keys.iter().map(|k| opt(t.values.get(*k).copied())));
                r.push(t.error.clone().unwrap_or_default());
                r
            })
            .collect();
        csv_table(&header, &rows)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

/// Probe for trial `index`: pure on even trials, mixed on odd ones.
fn trial_probe(rng: &mut Rng, d: usize, index: usize) -> DensityMatrix {
    if index % 2 == 0 {
        random_pure_state(rng, d)
    } else {
        random_density_matrix(rng, d)
    }
}

fn trial_channel(rng: &mut Rng, d: usize, index: usize) -> QuantumChannel {
    random_channel(rng, d, 1 + index % 3)
}

fn run_trial(suite: Suite, config: &RunConfig, index: usize) -> Result<Vec<TrialRecord>, HarnessError> {
    let d = config.dim;
    let tol = config.tol;
    let mut rng = Rng::for_trial(config.seed, index as u64);
    let mut out = Vec::new();
    match suite {
        Suite::Prop1 => {
            let n = random_channel(&mut rng, d, 2);
            let g = generating_power(&n, config.measure, FreeStateSet::Incoherent(d), tol)?.generating;
            let settings = SearchSettings {
                restarts: config.restarts,
                iterations: 500,
                seed: config.seed.wrapping_add(index as u64),
                // Haar starts only, so the basis optimum is not handed over
                basis_starts: false,
            };
            let s = increasing_power_search(&n, config.measure, &settings, tol)?.value;
            out.push(TrialRecord::new(
                index,
                config.measure.as_str(),
                (g - s).abs(),
                1e-3,
                &[("generating", g), ("search", s)],
            ));
        }
        Suite::Thm2 => {
            let n = trial_channel(&mut rng, d, index);
            for tag in config.classes() {
                let rec = match p_succ_free_probes(&n, tag, tol) {
                    Ok(r) => TrialRecord::new(
                        index,
                        tag.as_str(),
                        (r.route_generating - r.route_probes).abs(),
                        ROUTE_TOL,
                        &[
                            ("route_generating", r.route_generating),
                            ("route_probes", r.route_probes),
                            ("certificate_gap", r.certificate_gap),
                        ],
                    ),
                    Err(DiscriminationError::AssertionMismatch { generating, probes }) => TrialRecord::new(
                        index,
                        tag.as_str(),
                        (generating - probes).abs(),
                        ROUTE_TOL,
                        &[("route_generating", generating), ("route_probes", probes)],
                    ),
                    Err(e) => return Err(e.into()),
                };
                out.push(rec);
            }
        }
        Suite::Prop3 => {
            let n1 = trial_channel(&mut rng, d, index);
            let n2 = trial_channel(&mut rng, d, index + 1);
            let class = FreeChannelClass::mio(d);
            let m1 = random_class_channel(&mut rng, &class)?;
            let m2 = random_class_channel(&mut rng, &class)?;
            let p = rng.uniform();
            let rep = property_suite(&n1, &n2, &m1, &m2, p, 1e-6, tol)?;
            for clause in Clause::ALL {
                let worst = rep
                    .clause(clause)
                    .max_by(|a, b| a.violation.total_cmp(&b.violation))
                    .expect("every clause is checked");
                out.push(TrialRecord::new(
                    index,
                    clause.label(),
                    worst.violation,
                    1e-6,
                    &[("lhs", worst.lhs), ("rhs", worst.rhs), ("p", p)],
                ));
            }
        }
        Suite::Thm4 | Suite::Cor5 => {
            let n = trial_channel(&mut rng, d, index);
            let rho = trial_probe(&mut rng, d, index);
            for tag in config.classes() {
                let r = advantage(&n, tag, &rho, tol)?;
                let values = [
                    ("p_succ_probe", r.p_succ_probe),
                    ("p_succ_free", r.p_succ_free),
                    ("advantage", r.advantage),
                    ("bound", r.bound),
                    ("total_bound", r.total_bound),
                    ("certificate_gap", r.certificate_gap),
                ];
                let violation = if suite == Suite::Thm4 {
                    r.advantage - r.bound
                } else {
                    r.p_succ_probe - r.total_bound
                };
                out.push(TrialRecord::new(index, tag.as_str(), violation, 1e-6, &values));
            }
        }
        Suite::Prop6 => {
            let n = trial_channel(&mut rng, d, index);
            let s = incoherent_probe_sandwich(&n, tol)?;
            out.push(TrialRecord::new(
                index,
                "all",
                s.max_deviation,
                ROUTE_TOL,
                &[("expected", s.expected), ("mio", s.mio), ("dio", s.dio), ("sio_upper", s.sio_upper)],
            ));
        }
        Suite::Thm9 => {
            let n = trial_channel(&mut rng, d, index);
            let rho = trial_probe(&mut rng, d, index);
            let classes: Vec<GameClass> = match config.class {
                Some(t) => vec![t.into()],
                None => GameClass::ALL.to_vec(),
            };
            for class in classes {
                let r = verify_incoherent_povm_collapse(&n, class, &rho, tol)?;
                let mut values = vec![
                    ("witness_value", r.witness_value),
                    ("witness_in_class", f64::from(u8::from(r.witness_in_class))),
                    ("witness_sio_kraus", f64::from(u8::from(r.witness_sio_kraus))),
                ];
                if let Some(v) = r.solver_value {
                    values.push(("solver_value", v));
                    values.push(("solver_gap", r.solver_gap));
                }
                let deviation = (r.witness_value - 0.5)
                    .abs()
                    .max(r.solver_value.map_or(0.0, |v| (v - 0.5).abs()));
                let mut rec = TrialRecord::new(index, class.to_string(), deviation, 1e-8, &values);
                rec.passed &= r.passed;
                out.push(rec);
            }
        }
        Suite::QubitClosedForm => {
            if d != 2 {
                return Err(HarnessError::Validation(format!(
                    "qubit-closed-form needs --dim 2, got {d}"
                )));
            }
            let u = haar_unitary(&mut rng, 2);
            let closed = qubit_unitary_power(&u)?;
            let solver = omega_1(&QuantumChannel::unitary(&u)?, tol)?;
            out.push(TrialRecord::new(
                index,
                "unitary",
                (closed - solver.generating).abs(),
                1e-6,
                &[
                    ("closed_form", closed),
                    ("solver", solver.generating),
                    ("certificate_gap", solver.certificate_gap),
                ],
            ));
        }
        Suite::Bounds => {
            let rho = trial_probe(&mut rng, d, index);
            let c1 = c_trace_sdp(&rho, tol)?;
            let bound = 1.0 - 1.0 / d as f64;
            out.push(TrialRecord::new(
                index,
                "upper_bound",
                c1.value - bound,
                1e-9,
                &[("c1", c1.value), ("bound", bound), ("certificate_gap", c1.gap)],
            ));
            if d == 2 {
                let l1 = c_l1(&rho);
                let cr = c_robustness(&rho, tol)?;
                let dev = (c1.value - 0.5 * l1).abs().max((cr.value - 2.0 * c1.value).abs());
                out.push(TrialRecord::new(
                    index,
                    "qubit_relations",
                    dev,
                    1e-6,
                    &[("c1", c1.value), ("c_l1", l1), ("c_robustness", cr.value)],
                ));
            }
        }
    }
    Ok(out)
}

/// Runs `config.trials` trials of a suite; trial `i` draws from its own
/// seeded stream, so reports do not depend on execution order.
pub fn verify(suite: Suite, config: &RunConfig) -> Result<VerifyReport, HarnessError> {
    config.validate()?;
    if suite == Suite::QubitClosedForm && config.dim != 2 {
        return Err(HarnessError::Validation(format!(
            "qubit-closed-form needs --dim 2, got {}",
            config.dim
        )));
    }
    let mut trials = Vec::new();
    let mut solver_failures = 0;
    for index in 0..config.trials {
        match run_trial(suite, config, index) {
            Ok(recs) => trials.extend(recs),
            Err(e @ HarnessError::Solver(_)) => {
                solver_failures += 1;
                trials.push(TrialRecord::failed(index, "error", &e));
            }
            Err(e) => return Err(e),
        }
    }
    let failures = trials.iter().filter(|t| !t.passed).count();
    let max_violation = trials
        .iter()
        .map(|t| t.violation)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(VerifyReport {
        header: ReportHeader::new(format!("verify {suite}"), config),
        suite,
        trials,
        max_violation: if max_violation.is_finite() || failures > 0 { max_violation } else { 0.0 },
        failures,
        solver_failures,
        passed: failures == 0,
    })
}

/// Exit code 0 when every trial passes, 1 otherwise.
pub fn cmd_verify(suite: Suite, config: &RunConfig) -> Result<Output, HarnessError> {
    let report = verify(suite, config)?;
    Ok(Output {
        text: report.render(config.format),
        exit_code: if report.passed { 0 } else { 1 },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub id: String,
    pub omega_1: Option<f64>,
    /// Qubit-unitary closed form, when it applies.
    pub closed_form: Option<f64>,
    pub p_succ_free_probes: Option<f64>,
    /// Best probe value found by the coherent-probe search.
    pub best_coherent_probe: Option<f64>,
    /// Distance of the best value below its absolute ceiling.
    pub bound_slack: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub header: ReportHeader,
    pub class: ClassTag,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn solver_failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status != "ok").count()
    }

    pub fn to_csv(&self) -> String {
        let header: Vec<String> = [
            "id",
            "omega_1",
            "closed_form",
            "p_succ_free_probes",
            "best_coherent_probe",
            "bound_slack",
            "status",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.id.clone(),
                    opt(r.omega_1),
                    opt(r.closed_form),
                    opt(r.p_succ_free_probes),
                    opt(r.best_coherent_probe),
                    opt(r.bound_slack),
                    r.status.clone(),
                ]
            })
            .collect();
        csv_table(&header, &rows)
    }
}

fn sweep_row(id: String, channel: &QuantumChannel, closed_form: Option<f64>, class: ClassTag, config: &RunConfig) -> SweepRow {
    let mut row = SweepRow {
        id,
        omega_1: None,
        closed_form,
        p_succ_free_probes: None,
        best_coherent_probe: None,
        bound_slack: None,
        status: "ok".into(),
    };
    let tol = config.tol;
    let result = (|| -> Result<(), HarnessError> {
        let w = omega_1(channel, tol)?.generating;
        row.omega_1 = Some(w);
        row.p_succ_free_probes = Some(p_succ_free_probes(channel, class, tol)?.value);
        let best = explore_coherent_probe_advantage(channel, class.into(), &config.search(10), &[], tol)?;
        row.best_coherent_probe = Some(best.p_succ);
        let ceiling = 0.5 + 0.5 * w + 0.5 * c_trace(&best.probe, tol)?.value;
        row.bound_slack = Some(ceiling - best.p_succ);
        Ok(())
    })();
    if let Err(e) = result {
        row.status = format!("solver_error: {e}");
    }
    row
}

/// Rows for every `--input` spec followed by `config.trials` generated
/// channels.
pub fn sweep(config: &RunConfig) -> Result<SweepReport, HarnessError> {
    config.validate()?;
    let class = config.class.unwrap_or(ClassTag::Mio);
    let mut rows = Vec::new();
    for path in &config.inputs {
        let (name, channel) = load_spec(path)?;
        if channel.dim_in() != channel.dim_out() {
            return Err(HarnessError::Validation(format!("{name}: sweep needs equal input and output dimensions")));
        }
        rows.push(sweep_row(name, &channel, None, class, config));
    }
    for index in 0..config.trials {
        let mut rng = Rng::for_trial(config.seed, index as u64);
        let (id, channel, closed) = match config.generator {
            Generator::Unitary => {
                let u = haar_unitary(&mut rng, config.dim);
                let closed = if config.dim == 2 { Some(qubit_unitary_power(&u)?) } else { None };
                (format!("unitary-{index}"), QuantumChannel::unitary(&u)?, closed)
            }
            Generator::Channel => (format!("channel-{index}"), random_channel(&mut rng, config.dim, 2), None),
        };
        rows.push(sweep_row(id, &channel, closed, class, config));
    }
    Ok(SweepReport {
        header: ReportHeader::new("sweep", config),
        class,
        rows,
    })
}

/// Exit code 3 when any row hit a solver failure; the table is still
/// complete.
pub fn cmd_sweep(config: &RunConfig) -> Result<Output, HarnessError> {
    let report = sweep(config)?;
    let text = match config.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv => report.to_csv(),
    };
    Ok(Output {
        exit_code: if report.solver_failures() > 0 { 3 } else { 0 },
        text,
    })
}
