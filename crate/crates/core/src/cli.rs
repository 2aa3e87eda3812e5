//! Batch experiment runner behind the `strainlim` binary.
//!
//! A run reads a JSON [`ExperimentConfig`], performs one study, writes
//! `<command>.csv` and `<command>.json` into the output directory and
//! prints a one-line PASS/FAIL summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{
    certify_constants, default_deltas, run_convergence, run_convergence_hencky, sample_ball,
    study_rows, CertificateReport, ConvergenceReport, Formulation, OrderFit, MIN_FIT_POINTS,
};
use crate::energy::EnergyProfile;
use crate::error::{Error, Result};
use crate::families::{FamilyKind, FamilySpec};
use crate::kinematics::RotationSpec;
use crate::scalar1d::{oned_delta0_study, OnedStudy, Scalar1DParams};
use crate::solver::{solve_implicit, SolveReport};
use crate::symtensor::SymTensor;

/// Environment variable consulted when neither the flag nor the config sets a seed.
pub const SEED_ENV: &str = "STRAINLIM_SEED";

pub const CONVERGE_HEADER: &str = "delta,delta0,residual_full,residual_leading,stress_gap,strain_gap";
pub const CERTIFY_HEADER: &str = "delta,C0_hat,C1_hat,D0_hat,C3_hat";
pub const ONED_HEADER: &str = "Sbar,E,eps,delta0,sigma,gap";
pub const SOLVE_HEADER: &str =
    "delta,iterations,residual,method,interior_ball_ok,E_xx,E_yy,E_zz,E_xy,E_xz,E_yz";
pub const ENERGY_HEADER: &str =
    "Sbar_norm,W_star,Etilde_norm,W,gradient_error,fenchel_young_error,round_trip_error";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Converge,
    ConvergeHencky,
    Certify,
    Oned,
    Energy,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Converge => "converge",
            Command::ConvergeHencky => "converge-hencky",
            Command::Certify => "certify",
            Command::Oned => "oned",
            Command::Energy => "energy",
        }
    }

    pub fn csv_header(self) -> &'static str {
        match self {
            Command::Solve => SOLVE_HEADER,
            Command::Converge | Command::ConvergeHencky => CONVERGE_HEADER,
            Command::Certify => CERTIFY_HEADER,
            Command::Oned => ONED_HEADER,
            Command::Energy => ENERGY_HEADER,
        }
    }
}

/// Stress input: a tensor, a scalar (hydrostatic `sI`, or a single 1D
/// stress) or a list of 1D stresses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StressInput {
    Scalar(f64),
    List(Vec<f64>),
    Tensor(SymTensor),
}

impl StressInput {
    fn tensor(&self) -> Result<SymTensor> {
        match self {
            StressInput::Tensor(t) => Ok(*t),
            StressInput::Scalar(s) => Ok(SymTensor::scaled_identity(*s)),
            StressInput::List(_) => Err(Error::ConfigInvalid(
                "this command needs a stress tensor, not a list".into(),
            )),
        }
    }

    fn scalars(&self) -> Result<Vec<f64>> {
        match self {
            StressInput::Scalar(s) => Ok(vec![*s]),
            StressInput::List(v) => Ok(v.clone()),
            StressInput::Tensor(_) => Err(Error::ConfigInvalid(
                "oned needs a scalar stress or a list of them".into(),
            )),
        }
    }
}

/// Acceptance thresholds; the defaults are the project's acceptance windows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub order_full: [f64; 2],
    pub order_leading: [f64; 2],
    pub order_stress: [f64; 2],
    /// Per-row bound `stress_gap ≤ factor·δ·|S̄|`.
    pub stress_gap_factor: f64,
    pub oned_slope: [f64; 2],
    pub gradient_tol: f64,
    pub fenchel_young_tol: f64,
    pub round_trip_tol: f64,
    /// Overrides the family's closed-form bound on `C0_hat`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d0_max: Option<f64>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            order_full: [1.9, 2.1],
            order_leading: [1.9, 2.1],
            order_stress: [0.9, 1.1],
            stress_gap_factor: 10.0,
            oned_slope: [0.9, 1.1],
            gradient_tol: 1e-6,
            fenchel_young_tol: 1e-9,
            round_trip_tol: 1e-8,
            c0_max: None,
            c1_max: None,
            d0_max: None,
        }
    }
}

fn default_samples() -> usize {
    10_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Set by the command-line subcommand when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stress: Option<StressInput>,
    #[serde(default)]
    pub rotation: RotationSpec,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    /// Single δ for `oned` and `energy`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn command(&self) -> Result<Command> {
        self.command
            .ok_or_else(|| Error::ConfigInvalid("no command given".into()))
    }

    /// Seed from the config, else from `STRAINLIM_SEED`, else 0.
    pub fn resolved_seed(&self) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::ConfigInvalid(format!("{SEED_ENV}={v:?} is not an integer"))),
            Err(_) => Ok(0),
        }
    }

    fn stress(&self) -> Result<&StressInput> {
        self.stress
            .as_ref()
            .ok_or_else(|| Error::ConfigInvalid("missing `stress`".into()))
    }

    fn single_delta(&self) -> Result<f64> {
        self.delta
            .ok_or_else(|| Error::ConfigInvalid("missing `delta`".into()))
    }

    /// Checks the config against its command and the family's domain.
    pub fn validate(&self) -> Result<()> {
        let invalid = |e: Error| Error::ConfigInvalid(e.to_string());
        let command = self.command()?;
        self.family.validate().map_err(invalid)?;
        let needs_ladder = matches!(
            command,
            Command::Solve | Command::Converge | Command::ConvergeHencky | Command::Certify
        );
        if needs_ladder {
            if self.deltas.is_empty() {
                return Err(Error::ConfigInvalid("`deltas` is empty".into()));
            }
            for &d in &self.deltas {
                self.family.check_delta(d).map_err(invalid)?;
            }
        }
        match command {
            Command::Solve | Command::Converge | Command::ConvergeHencky => {
                let s = self.stress()?.tensor()?;
                if !self.family.domain().contains_stress(&s) {
                    return Err(Error::ConfigInvalid(format!(
                        "stress norm {} is outside the stress ball of radius {}",
                        s.frobenius(),
                        self.family.c
                    )));
                }
                if command != Command::Solve {
                    if self.deltas.len() < MIN_FIT_POINTS {
                        return Err(Error::ConfigInvalid(format!(
                            "a convergence study needs at least {MIN_FIT_POINTS} deltas"
                        )));
                    }
                    if self.deltas.windows(2).any(|w| !(w[1] < w[0])) {
                        return Err(Error::ConfigInvalid("`deltas` must be strictly decreasing".into()));
                    }
                }
            }
            Command::Certify => {
                if self.samples < 100 {
                    return Err(Error::ConfigInvalid("`samples` must be at least 100".into()));
                }
            }
            Command::Oned => {
                self.oned_params()?;
                if self.stress()?.scalars()?.iter().any(|s| !s.is_finite()) {
                    return Err(Error::ConfigInvalid("stresses must be finite".into()));
                }
            }
            Command::Energy => {
                EnergyProfile::new(self.family.clone(), 64).map_err(invalid)?;
                let d = self.single_delta()?;
                if !(d > 0.0) {
                    return Err(Error::ConfigInvalid("`delta` must be positive".into()));
                }
                if self.samples == 0 {
                    return Err(Error::ConfigInvalid("`samples` must be positive".into()));
                }
            }
        }
        self.resolved_seed()?;
        Ok(())
    }

    fn oned_params(&self) -> Result<Scalar1DParams> {
        Scalar1DParams::new(self.family.a, self.family.p, self.single_delta()?)
            .map_err(|e| Error::ConfigInvalid(e.to_string()))
    }
}

/// Result of a completed run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub command: Command,
    pub passed: bool,
    pub summary: String,
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }

    pub fn status_line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{verdict} {}: {}", self.command.name(), self.summary)
    }
}

/// Exit status for an error: 1 for configuration and I/O problems, 2 for
/// studies that could not be completed.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::StudyFailed(_) => 2,
        _ => 1,
    }
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

/// In-memory CSV table with a fixed header.
struct Table(csv::Writer<Vec<u8>>);

impl Table {
    fn new(header: &str) -> Self {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header.split(',')).expect("in-memory write");
        Table(w)
    }

    fn row(&mut self, fields: &[String]) {
        self.0.write_record(fields).expect("in-memory write");
    }

    fn finish(self) -> Result<String> {
        let bytes = self.0.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn in_window(w: [f64; 2], fit: &OrderFit) -> bool {
    match fit {
        OrderFit::Slope(s) => w[0] <= *s && *s <= w[1],
        OrderFit::IdenticallyZero => true,
        OrderFit::Underdetermined => false,
    }
}

fn describe(fit: &OrderFit) -> String {
    match fit {
        OrderFit::Slope(s) => format!("{s:.4}"),
        OrderFit::IdenticallyZero => "identically zero".into(),
        OrderFit::Underdetermined => "underdetermined".into(),
    }
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

struct Produced {
    csv: String,
    report: serde_json::Value,
    passed: bool,
    summary: String,
}

/// Runs the configured study and writes its outputs into `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    config.validate()?;
    let command = config.command()?;
    let produced = match command {
        Command::Solve => run_solve(config)?,
        Command::Converge => run_converge(config, Formulation::GreenPiola)?,
        Command::ConvergeHencky => run_converge(config, Formulation::HenckyCauchy)?,
        Command::Certify => run_certify(config)?,
        Command::Oned => run_oned(config)?,
        Command::Energy => run_energy(config)?,
    };
    fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join(format!("{}.csv", command.name()));
    let json_path = out_dir.join(format!("{}.json", command.name()));
    let mut resolved = config.clone();
    resolved.seed = Some(config.resolved_seed()?);
    let doc = json!({
        "command": command.name(),
        "passed": produced.passed,
        "summary": produced.summary,
        "config": resolved,
        "report": produced.report,
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    write_atomic(&csv_path, &produced.csv)?;
    write_atomic(&json_path, &text)?;
    Ok(RunOutcome {
        command,
        passed: produced.passed,
        summary: produced.summary,
        csv_path,
        json_path,
    })
}

fn run_solve(config: &ExperimentConfig) -> Result<Produced> {
    let s = config.stress()?.tensor()?;
    let mut csv = Table::new(SOLVE_HEADER);
    let mut reports: Vec<(f64, SolveReport)> = Vec::new();
    for &delta in &config.deltas {
        let r = solve_implicit(&config.family, delta, &s, None)
            .map_err(|e| Error::StudyFailed(format!("delta = {delta}: {e}")))?;
        let mut fields = vec![
            fmt(delta),
            r.iterations.to_string(),
            fmt(r.residual),
            format!("{:?}", r.method).to_lowercase(),
            r.interior_ball_ok.to_string(),
        ];
        fields.extend(r.solution.components().iter().map(|c| fmt(*c)));
        csv.row(&fields);
        reports.push((delta, r));
    }
    let rows: Vec<_> = reports
        .iter()
        .map(|(d, r)| json!({ "delta": d, "solve": r }))
        .collect();
    let worst = reports.iter().map(|(_, r)| r.residual).fold(0.0, f64::max);
    Ok(Produced {
        csv: csv.finish()?,
        report: json!({ "rows": rows }),
        passed: true,
        summary: format!("{} solves, max residual {worst:e}", reports.len()),
    })
}

fn converge_csv(report: &ConvergenceReport) -> Result<String> {
    let mut csv = Table::new(CONVERGE_HEADER);
    for r in &report.records {
        csv.row(&[
            fmt(r.delta),
            fmt(r.delta0),
            fmt(r.residual_full),
            fmt(r.residual_leading),
            fmt(r.stress_gap),
            fmt(r.strain_gap),
        ]);
    }
    csv.finish()
}

fn run_converge(config: &ExperimentConfig, formulation: Formulation) -> Result<Produced> {
    let s = config.stress()?.tensor()?;
    let (spec, rot, deltas) = (&config.family, &config.rotation, &config.deltas);
    let result = match formulation {
        Formulation::GreenPiola => run_convergence(spec, &s, rot, deltas),
        Formulation::HenckyCauchy => run_convergence_hencky(spec, &s, rot, deltas),
    };
    let report = match result {
        Ok(r) => r,
        Err(Error::FitUnderdetermined { got, .. }) => {
            let (_, failures) = study_rows(formulation, spec, &s, rot, deltas);
            let first = failures
                .first()
                .map(|f| format!("first failing row delta = {}: {}", f.delta, f.error))
                .unwrap_or_default();
            return Err(Error::StudyFailed(format!(
                "only {got} rows succeeded; {first}"
            )));
        }
        Err(e) => return Err(Error::StudyFailed(e.to_string())),
    };
    let th = &config.thresholds;
    let snorm = s.frobenius();
    let gap_ok = report
        .records
        .iter()
        .all(|r| r.stress_gap <= th.stress_gap_factor * r.delta * snorm);
    let mut problems = Vec::new();
    if !report.failures.is_empty() {
        let f = &report.failures[0];
        problems.push(format!("row delta = {} failed: {}", f.delta, f.error));
    }
    if !in_window(th.order_full, &report.fitted_order_full) {
        problems.push("full order outside window".into());
    }
    if !in_window(th.order_leading, &report.fitted_order_leading) {
        problems.push("leading order outside window".into());
    }
    if !in_window(th.order_stress, &report.fitted_order_stress) {
        problems.push("stress order outside window".into());
    }
    if !gap_ok {
        problems.push("stress gap bound violated".into());
    }
    let mut summary = format!(
        "{} rows, order full {}, leading {}, stress {}, strain {}",
        report.records.len(),
        describe(&report.fitted_order_full),
        describe(&report.fitted_order_leading),
        describe(&report.fitted_order_stress),
        describe(&report.fitted_order_strain),
    );
    for p in &problems {
        let _ = write!(summary, "; {p}");
    }
    Ok(Produced {
        csv: converge_csv(&report)?,
        report: serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?,
        passed: problems.is_empty(),
        summary,
    })
}

/// Closed-form ceilings on the certified constants where they are known.
fn certificate_limits(config: &ExperimentConfig) -> (Option<f64>, Option<f64>, Option<f64>) {
    let f = &config.family;
    let th = &config.thresholds;
    let (c0, c1, d0) = match f.kind {
        FamilyKind::PowerLaw => (Some(1.0 + 1e-9), Some(1e-12), Some(2.0 * f.a * (1.0 + 1e-6))),
        FamilyKind::DensityModulusReciprocal | FamilyKind::DensityModulusDirect => {
            (Some(f.density_c0_bound()), None, None)
        }
        FamilyKind::ScaledBase => (None, None, None),
    };
    (th.c0_max.or(c0), th.c1_max.or(c1), th.d0_max.or(d0))
}

fn run_certify(config: &ExperimentConfig) -> Result<Produced> {
    let seed = config.resolved_seed()?;
    let report: CertificateReport =
        certify_constants(&config.family, &config.deltas, config.samples, seed)
            .map_err(|e| Error::StudyFailed(e.to_string()))?;
    let mut csv = Table::new(CERTIFY_HEADER);
    for r in &report.rows {
        csv.row(&[
            fmt(r.delta),
            fmt(r.c0_hat),
            fmt(r.c1_hat),
            fmt(r.d0_hat),
            fmt(r.c3_hat),
        ]);
    }
    let (c0, c1, d0) = certificate_limits(config);
    let mut problems = Vec::new();
    let mut check = |name: &str, value: f64, limit: Option<f64>| {
        if !value.is_finite() {
            problems.push(format!("{name} is not finite"));
        } else if let Some(l) = limit {
            if value > l {
                problems.push(format!("{name} = {value:e} exceeds {l:e}"));
            }
        }
    };
    check("C0_hat", report.c0_hat, c0);
    check("C1_hat", report.c1_hat, c1);
    check("D0_hat", report.d0_hat, d0);
    check("C3_hat", report.c3_hat, None);
    let mut summary = format!(
        "C0_hat {:.6e}, C1_hat {:.6e}, D0_hat {:.6e}, C3_hat {:.6e} from {} samples per delta",
        report.c0_hat, report.c1_hat, report.d0_hat, report.c3_hat, report.samples
    );
    for p in &problems {
        let _ = write!(summary, "; {p}");
    }
    Ok(Produced {
        csv: csv.finish()?,
        report: serde_json::to_value(&report).map_err(|e| Error::Io(e.to_string()))?,
        passed: problems.is_empty(),
        summary,
    })
}

fn run_oned(config: &ExperimentConfig) -> Result<Produced> {
    let params = config.oned_params()?;
    let stresses = config.stress()?.scalars()?;
    let study: OnedStudy =
        oned_delta0_study(&params, &stresses).map_err(|e| Error::StudyFailed(e.to_string()))?;
    let mut csv = Table::new(ONED_HEADER);
    for r in &study.rows {
        csv.row(&[
            fmt(r.sbar),
            fmt(r.e),
            fmt(r.eps),
            fmt(r.delta0),
            fmt(r.sigma),
            fmt(r.gap),
        ]);
    }
    let bounded = study.max_ratio.is_finite() && study.max_quadratic_ratio.is_finite();
    let passed = in_window(config.thresholds.oned_slope, &study.slope) && bounded;
    let summary = format!(
        "slope of gap vs delta0 {}, max gap*delta/(|Sbar| delta0) {:.6e}, max gap*a*delta^2/delta0^2 {:.6e}",
        describe(&study.slope),
        study.max_ratio,
        study.max_quadratic_ratio
    );
    Ok(Produced {
        csv: csv.finish()?,
        report: serde_json::to_value(&study).map_err(|e| Error::Io(e.to_string()))?,
        passed,
        summary,
    })
}

fn run_energy(config: &ExperimentConfig) -> Result<Produced> {
    let profile = EnergyProfile::new(config.family.clone(), 64)
        .map_err(|e| Error::ConfigInvalid(e.to_string()))?;
    let delta = config.single_delta()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.resolved_seed()?);
    let stress_radius = 0.99 * config.family.c;
    let mut csv = Table::new(ENERGY_HEADER);
    let (mut g, mut fy, mut rt) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..config.samples {
        let sbar = sample_ball(&mut rng, stress_radius);
        let etilde = sample_ball(&mut rng, 0.9);
        let p = profile
            .probe(&sbar, &etilde, delta)
            .map_err(|e| Error::StudyFailed(e.to_string()))?;
        g = g.max(p.gradient_error);
        fy = fy.max(p.fenchel_young_error);
        rt = rt.max(p.round_trip_error);
        csv.row(&[
            fmt(p.sbar_norm),
            fmt(p.w_star),
            fmt(p.etilde_norm),
            fmt(p.w),
            fmt(p.gradient_error),
            fmt(p.fenchel_young_error),
            fmt(p.round_trip_error),
        ]);
    }
    let th = &config.thresholds;
    let passed = g <= th.gradient_tol && fy <= th.fenchel_young_tol && rt <= th.round_trip_tol;
    Ok(Produced {
        csv: csv.finish()?,
        report: json!({
            "samples": config.samples,
            "max_gradient_error": g,
            "max_fenchel_young_error": fy,
            "max_round_trip_error": rt,
        }),
        passed,
        summary: format!(
            "max gradient error {g:.3e}, Fenchel-Young {fy:.3e}, stress round trip {rt:.3e}"
        ),
    })
}

/// Command-line arguments of the `strainlim` binary.
#[derive(Debug, Parser)]
#[command(name = "strainlim", version, about = "Strain-limiting constitutive relation studies")]
pub struct Cli {
    /// Study to run.
    #[arg(value_enum)]
    pub command: Command,
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output_path`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed; overrides the config and the environment.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Cli {
    /// Loads the config and applies the command-line overrides.
    pub fn resolve(&self) -> Result<(ExperimentConfig, PathBuf)> {
        let mut config = ExperimentConfig::load(&self.config)?;
        config.command = Some(self.command);
        if let Some(seed) = self.seed {
            config.seed = Some(seed);
        }
        let out = match (&self.out, &config.output_path) {
            (Some(o), _) => o.clone(),
            (None, Some(p)) => PathBuf::from(p),
            (None, None) => PathBuf::from("."),
        };
        Ok((config, out))
    }

    /// Runs and reports; returns the process exit status.
    pub fn execute(&self) -> i32 {
        let outcome = self.resolve().and_then(|(config, out)| run(&config, &out));
        match outcome {
            Ok(o) => {
                println!("{}", o.status_line());
                o.exit_code()
            }
            Err(e) => {
                let code = exit_code_for(&e);
                let verdict = if code == 2 { "FAIL" } else { "ERROR" };
                println!("{verdict} {}: {e}", self.command.name());
                code
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_round_trip() {
        let cfg = ExperimentConfig::from_json(
            r#"{"command": "converge", "family": {"kind": "power_law", "a": 1.0},
                "stress": {"xx": 0.5, "yy": 0.25, "zz": -0.125, "xy": 0, "xz": 0, "yz": 0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.deltas, default_deltas());
        assert_eq!(cfg.samples, 10_000);
        assert_eq!(cfg.thresholds, Thresholds::default());
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn stress_input_shapes() {
        let s: StressInput = serde_json::from_str("0.25").unwrap();
        assert_eq!(s.tensor().unwrap(), SymTensor::scaled_identity(0.25));
        let l: StressInput = serde_json::from_str("[0.1, 0.2]").unwrap();
        assert_eq!(l.scalars().unwrap(), vec![0.1, 0.2]);
        assert!(l.tensor().is_err());
    }

    #[test]
    fn empty_deltas_is_invalid() {
        let cfg = ExperimentConfig::from_json(
            r#"{"command": "converge", "stress": 0.1, "deltas": []}"#,
        )
        .unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(matches!(err, Error::ConfigInvalid(_)));
        assert_eq!(exit_code_for(&err), 1);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"command": "oned", "sedd": 3}"#).is_err());
    }

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.1, 1e-7, 2f64.powi(-13), 123456.789, 0.0] {
            assert_eq!(fmt(x).parse::<f64>().unwrap(), x);
        }
    }
}
