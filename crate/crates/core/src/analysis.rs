//! Convergence-order studies and sampled certification of family constants.
//!
//! A convergence study walks a ladder of δ values. For each δ it solves
//! the implicit relation, builds the deformation gradient from the
//! solution and a small rotation `R_δ`, and measures how far the
//! linearized strain `ε_δ` is from satisfying the same relation with the
//! associated stress `σ_δ`. The residuals are fitted against δ in log-log
//! space; the expected orders are 2 for the strain residuals and 1 for the
//! stress gap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::kinematics::{
    deformation_from_green, deformation_from_hencky, make_rotation, sigma_from_cauchy,
    sigma_from_piola, RotationSpec,
};
use crate::solver::{solve_implicit, solve_implicit_hencky};
use crate::symtensor::SymTensor;

/// Minimum number of positive residuals for an order fit.
pub const MIN_FIT_POINTS: usize = 4;
/// Partner probes sit at this fraction of the domain radius.
pub const PROBE_DISTANCE: f64 = 1e-3;

/// Default δ ladder `2^-6, …, 2^-13`.
pub fn default_deltas() -> Vec<f64> {
    (6..=13).map(|k| 2f64.powi(-k)).collect()
}

/// Which strain/stress pair the implicit relation is posed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Green–Saint Venant strain and symmetric Piola–Kirchhoff stress.
    GreenPiola,
    /// Hencky strain and Cauchy stress.
    HenckyCauchy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub delta: f64,
    /// `|F_δ − I|`.
    pub delta0: f64,
    /// `|ε_δ − f_δ(ε_δ, σ_δ)|`.
    pub residual_full: f64,
    /// `|ε_δ − δ f₁(ε_δ/δ, σ_δ)|`.
    pub residual_leading: f64,
    /// `|σ_δ − S̄|` (or `|σ_δ − T|`).
    pub stress_gap: f64,
    /// `|E_δ − ε_δ|` (or `|H_δ − ε_δ|`).
    pub strain_gap: f64,
    /// `|E_δ|`, the solved strain magnitude.
    pub strain_norm: f64,
    pub interior_ball_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailedRow {
    pub delta: f64,
    pub error: String,
}

/// Outcome of a log-log order fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "slope", rename_all = "snake_case")]
pub enum OrderFit {
    Slope(f64),
    /// Every residual was exactly zero: the relation holds identically.
    IdenticallyZero,
    /// Fewer than [`MIN_FIT_POINTS`] positive residuals.
    Underdetermined,
}

impl OrderFit {
    pub fn slope(&self) -> Option<f64> {
        match self {
            OrderFit::Slope(s) => Some(*s),
            _ => None,
        }
    }

    fn from_fit(result: Result<f64>) -> Self {
        match result {
            Ok(s) => OrderFit::Slope(s),
            Err(Error::AllZeroResiduals) => OrderFit::IdenticallyZero,
            Err(_) => OrderFit::Underdetermined,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub formulation: Formulation,
    /// Successful rows, sorted by descending δ.
    pub records: Vec<ConvergenceRow>,
    pub failures: Vec<FailedRow>,
    pub fitted_order_full: OrderFit,
    pub fitted_order_leading: OrderFit,
    pub fitted_order_stress: OrderFit,
    pub fitted_order_strain: OrderFit,
    /// Orders between consecutive rows, `ln(r_i/r_{i+1}) / ln(δ_i/δ_{i+1})`.
    pub pairwise_orders_full: Vec<f64>,
}

impl ConvergenceReport {
    /// `max residual_full / δ²` over the rows.
    pub fn max_normalized_residual(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.residual_full / (r.delta * r.delta))
            .fold(0.0, f64::max)
    }

    fn column(&self, pick: impl Fn(&ConvergenceRow) -> f64) -> (Vec<f64>, Vec<f64>) {
        self.records.iter().map(|r| (r.delta, pick(r))).unzip()
    }
}

/// Computes one row of a study at a single δ.
pub fn study_row(
    formulation: Formulation,
    spec: &FamilySpec,
    stress: &SymTensor,
    rot: &RotationSpec,
    delta: f64,
) -> Result<ConvergenceRow> {
    let r = make_rotation(rot, delta)?;
    let (strain, state, sigma, solve) = match formulation {
        Formulation::GreenPiola => {
            let solve = solve_implicit(spec, delta, stress, None)?;
            let state = deformation_from_green(&solve.solution, &r)?;
            let sigma = sigma_from_piola(&state.f, stress);
            (solve.solution, state, sigma, solve)
        }
        Formulation::HenckyCauchy => {
            let solve = solve_implicit_hencky(spec, delta, stress, None)?;
            let state = deformation_from_hencky(&solve.solution, &r)?;
            let sigma = sigma_from_cauchy(&state.f, stress)?;
            (solve.solution, state, sigma, solve)
        }
    };
    let eps = state.eps;
    // domain-checked: (ε_δ, σ_δ) must lie in U_δ × V
    let full = spec.eval(delta, &eps, &sigma)?;
    let lead = spec.leading_unchecked(&(eps / delta), &sigma)? * delta;
    Ok(ConvergenceRow {
        delta,
        delta0: state.delta0(),
        residual_full: (eps - full).frobenius(),
        residual_leading: (eps - lead).frobenius(),
        stress_gap: (sigma - *stress).frobenius(),
        strain_gap: (strain - eps).frobenius(),
        strain_norm: strain.frobenius(),
        interior_ball_ok: solve.interior_ball_ok,
    })
}

/// Evaluates every δ, keeping successes and failures apart.
pub fn study_rows(
    formulation: Formulation,
    spec: &FamilySpec,
    stress: &SymTensor,
    rot: &RotationSpec,
    deltas: &[f64],
) -> (Vec<ConvergenceRow>, Vec<FailedRow>) {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &delta in deltas {
        match study_row(formulation, spec, stress, rot, delta) {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(FailedRow {
                delta,
                error: e.to_string(),
            }),
        }
    }
    rows.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    (rows, failures)
}

fn check_ladder(deltas: &[f64]) -> Result<()> {
    if deltas.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidArgument(format!(
            "a convergence study needs at least {MIN_FIT_POINTS} deltas, got {}",
            deltas.len()
        )));
    }
    if deltas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("deltas must be strictly decreasing".into()));
    }
    Ok(())
}

fn run_study(
    formulation: Formulation,
    spec: &FamilySpec,
    stress: &SymTensor,
    rot: &RotationSpec,
    deltas: &[f64],
) -> Result<ConvergenceReport> {
    check_ladder(deltas)?;
    spec.validate()?;
    let (records, failures) = study_rows(formulation, spec, stress, rot, deltas);
    if records.len() < MIN_FIT_POINTS {
        return Err(Error::FitUnderdetermined {
            needed: MIN_FIT_POINTS,
            got: records.len(),
        });
    }
    let mut report = ConvergenceReport {
        formulation,
        records,
        failures,
        fitted_order_full: OrderFit::Underdetermined,
        fitted_order_leading: OrderFit::Underdetermined,
        fitted_order_stress: OrderFit::Underdetermined,
        fitted_order_strain: OrderFit::Underdetermined,
        pairwise_orders_full: Vec::new(),
    };
    let fit = |pick: fn(&ConvergenceRow) -> f64, report: &ConvergenceReport| {
        let (d, r) = report.column(pick);
        OrderFit::from_fit(fit_order(&d, &r))
    };
    report.fitted_order_full = fit(|r| r.residual_full, &report);
    report.fitted_order_leading = fit(|r| r.residual_leading, &report);
    report.fitted_order_stress = fit(|r| r.stress_gap, &report);
    report.fitted_order_strain = fit(|r| r.strain_gap, &report);
    let (d, r) = report.column(|r| r.residual_full);
    report.pairwise_orders_full = pairwise_orders(&d, &r);
    Ok(report)
}

/// Study of `ε_δ = f_δ(ε_δ, σ_δ) + O(δ²)` in the Green/Piola setting:
/// `F_δ = R_δ(I + 2E_δ)^{1/2}`, `σ_δ = ½(F_δS̄ + S̄F_δᵀ)`.
pub fn run_convergence(
    spec: &FamilySpec,
    sbar: &SymTensor,
    rot: &RotationSpec,
    deltas: &[f64],
) -> Result<ConvergenceReport> {
    run_study(Formulation::GreenPiola, spec, sbar, rot, deltas)
}

/// The Hencky/Cauchy variant: `F_δ = e^{H_δ}R_δ`,
/// `σ_δ = det(F_δ)·½(T F_δ⁻ᵀ + F_δ⁻¹T)`.
pub fn run_convergence_hencky(
    spec: &FamilySpec,
    t: &SymTensor,
    rot: &RotationSpec,
    deltas: &[f64],
) -> Result<ConvergenceReport> {
    run_study(Formulation::HenckyCauchy, spec, t, rot, deltas)
}

/// Least-squares slope of `ln(residual)` against `ln(delta)`.
///
/// Zero residuals are left out of the fit. Returns
/// [`Error::AllZeroResiduals`] when every residual is zero and
/// [`Error::FitUnderdetermined`] when fewer than four remain.
pub fn fit_order(deltas: &[f64], residuals: &[f64]) -> Result<f64> {
    if deltas.len() != residuals.len() {
        return Err(Error::InvalidArgument(format!(
            "fit_order: {} deltas vs {} residuals",
            deltas.len(),
            residuals.len()
        )));
    }
    if deltas.iter().any(|d| !(*d > 0.0)) || residuals.iter().any(|r| !(*r >= 0.0)) {
        return Err(Error::InvalidArgument(
            "fit_order: deltas must be positive and residuals nonnegative".into(),
        ));
    }
    if !residuals.is_empty() && residuals.iter().all(|&r| r == 0.0) {
        return Err(Error::AllZeroResiduals);
    }
    let points: Vec<(f64, f64)> = deltas
        .iter()
        .zip(residuals)
        .filter(|(_, &r)| r > 0.0)
        .map(|(d, r)| (d.ln(), r.ln()))
        .collect();
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::FitUnderdetermined {
            needed: MIN_FIT_POINTS,
            got: points.len(),
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Local orders between consecutive entries; pairs with a zero residual
/// are skipped.
pub fn pairwise_orders(deltas: &[f64], residuals: &[f64]) -> Vec<f64> {
    deltas
        .windows(2)
        .zip(residuals.windows(2))
        .filter(|(_, r)| r[0] > 0.0 && r[1] > 0.0)
        .map(|(d, r)| (r[0] / r[1]).ln() / (d[0] / d[1]).ln())
        .collect()
}

/// Upper bound on `|F_δ − I|` in terms of the strain bound `C₀` and the
/// rotation constant `C₂`:
/// `[(3 + 2√3 C₀δ)^{1/2} C₂ + (1 − 2C₀δ)^{-1/2} C₀] δ`.
pub fn delta0_bound(c0: f64, c2: f64, delta: f64) -> f64 {
    let s3 = 3f64.sqrt();
    ((3.0 + 2.0 * s3 * c0 * delta).sqrt() * c2 + c0 / (1.0 - 2.0 * c0 * delta).sqrt()) * delta
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertificateRow {
    pub delta: f64,
    pub c0_hat: f64,
    pub c1_hat: f64,
    pub d0_hat: f64,
    pub c3_hat: f64,
}

/// Sampled suprema of the family constants. Each is a lower bound on the
/// true constant over the sampled domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    pub rows: Vec<CertificateRow>,
    /// `max |f_δ|/δ`.
    pub c0_hat: f64,
    /// `max |f_δ(E₂,S̄) − f_δ(E₁,S̄)| / |E₂ − E₁|`.
    pub c1_hat: f64,
    /// `max |f_δ(E,S̄₂) − f_δ(E,S̄₁)| / (δ|S̄₂ − S̄₁|)`.
    pub d0_hat: f64,
    /// `max |f_δ − δf₁(·/δ)| / δ²`.
    pub c3_hat: f64,
    pub samples: usize,
    pub seed: u64,
}

/// One sampled point of `U_δ × V` together with perturbed partners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub e: SymTensor,
    pub e_partner: SymTensor,
    pub sbar: SymTensor,
    pub sbar_partner: SymTensor,
}

/// Uniform sample from the Frobenius ball of the given radius.
///
/// Works in the isometric coordinates `(xx, yy, zz, √2xy, √2xz, √2yz)`:
/// Gaussian direction, radius `R·u^{1/6}`.
pub fn sample_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> SymTensor {
    let dir = unit_direction(rng);
    let u: f64 = rng.random();
    dir * (radius * u.powf(1.0 / 6.0))
}

fn unit_direction<R: Rng + ?Sized>(rng: &mut R) -> SymTensor {
    loop {
        let g: [f64; 6] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = SymTensor::new(g[0], g[1], g[2], g[3] * s, g[4] * s, g[5] * s);
        let n = t.frobenius();
        if n > 1e-12 {
            return t / n;
        }
    }
}

/// The deterministic probe set used by [`certify_constants`] for one δ.
///
/// `row` selects an independent ChaCha stream so rows can be generated
/// in any order.
pub fn draw_probes(
    spec: &FamilySpec,
    delta: f64,
    samples: usize,
    seed: u64,
    row: u64,
) -> Vec<Probe> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row);
    let dom = spec.domain();
    let (ru, rv) = (dom.strain_radius(delta), dom.stress_radius);
    let shrink = 1.0 - 2.0 * PROBE_DISTANCE;
    (0..samples)
        .map(|_| {
            let e = sample_ball(&mut rng, ru * shrink);
            let sbar = sample_ball(&mut rng, rv * shrink);
            let e_partner = e + unit_direction(&mut rng) * (PROBE_DISTANCE * ru);
            let sbar_partner = sbar + unit_direction(&mut rng) * (PROBE_DISTANCE * rv);
            Probe {
                e,
                e_partner,
                sbar,
                sbar_partner,
            }
        })
        .collect()
}

/// Estimates `C₀, C₁, D₀` and the leading-gap constant `C₃` by sampling
/// `samples` probes per δ, deterministically from `seed`.
pub fn certify_constants(
    spec: &FamilySpec,
    deltas: &[f64],
    samples: usize,
    seed: u64,
) -> Result<CertificateReport> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "certification needs at least 100 samples, got {samples}"
        )));
    }
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("no deltas given".into()));
    }
    spec.validate()?;
    let mut rows = Vec::with_capacity(deltas.len());
    for (idx, &delta) in deltas.iter().enumerate() {
        spec.check_delta(delta)?;
        let mut row = CertificateRow {
            delta,
            c0_hat: 0.0,
            c1_hat: 0.0,
            d0_hat: 0.0,
            c3_hat: 0.0,
        };
        for probe in draw_probes(spec, delta, samples, seed, idx as u64) {
            let f0 = spec.eval(delta, &probe.e, &probe.sbar)?;
            let fe = spec.eval(delta, &probe.e_partner, &probe.sbar)?;
            let fs = spec.eval(delta, &probe.e, &probe.sbar_partner)?;
            let lead = spec.leading_unchecked(&(probe.e / delta), &probe.sbar)? * delta;
            row.c0_hat = row.c0_hat.max(f0.frobenius() / delta);
            row.c1_hat = row
                .c1_hat
                .max((fe - f0).frobenius() / (probe.e_partner - probe.e).frobenius());
            row.d0_hat = row
                .d0_hat
                .max((fs - f0).frobenius() / (delta * (probe.sbar_partner - probe.sbar).frobenius()));
            row.c3_hat = row.c3_hat.max((f0 - lead).frobenius() / (delta * delta));
        }
        rows.push(row);
    }
    let max_of = |pick: fn(&CertificateRow) -> f64| rows.iter().map(pick).fold(0.0, f64::max);
    Ok(CertificateReport {
        c0_hat: max_of(|r| r.c0_hat),
        c1_hat: max_of(|r| r.c1_hat),
        d0_hat: max_of(|r| r.d0_hat),
        c3_hat: max_of(|r| r.c3_hat),
        rows,
        samples,
        seed,
    })
}
