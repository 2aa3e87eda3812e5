//! One-dimensional model problem.
//!
//! The scalar relation `E = δa(1 + |aS̄|ᵖ)^{-1/p} S̄` limits the strain to
//! `|E| < δ` for every finite stress. Here `E` is the Green strain of a
//! uniaxial stretch, `ε = (1 + 2E)^{1/2} − 1` the linearized strain and
//! `δ₀ = |ε|` the displacement gradient.

use serde::{Deserialize, Serialize};

use crate::analysis::{fit_order, OrderFit};
use crate::error::{Error, Result};
use crate::families::power_saturation;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scalar1DParams {
    pub a: f64,
    pub p: f64,
    pub delta: f64,
}

impl Default for Scalar1DParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            p: 2.0,
            delta: 1e-3,
        }
    }
}

impl Scalar1DParams {
    pub fn new(a: f64, p: f64, delta: f64) -> Result<Self> {
        let params = Self { a, p, delta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidArgument(format!("a must be positive, got {}", self.a)));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p must be at least 1, got {}", self.p)));
        }
        if !(self.delta > 0.0 && self.delta <= 0.1) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0, 0.1], got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// `E = δa(1 + |aS̄|ᵖ)^{-1/p} S̄`.
///
/// For huge stresses the product can round up to `±δ`; the result is then
/// the adjacent float toward zero so that `|E| < δ` holds strictly.
pub fn oned_forward(params: &Scalar1DParams, sbar: f64) -> f64 {
    let x = params.a * sbar;
    let ax = x.abs();
    // x(1 + |x|ᵖ)^{-1/p}, written so that |x| → ∞ (even overflow) saturates
    let ratio = if ax <= 1.0 {
        x * power_saturation(ax, params.p)
    } else {
        (1.0 + ax.powf(-params.p)).powf(-1.0 / params.p).copysign(x)
    };
    let e = params.delta * ratio;
    if e.abs() >= params.delta {
        params.delta.next_down().copysign(e)
    } else {
        e
    }
}

/// `ε = (1 + 2E)^{1/2} − 1`, so that `E = ε + ε²/2`.
pub fn oned_strain(e: f64) -> Result<f64> {
    if !(e > -0.5) {
        return Err(Error::DomainError { value: e });
    }
    // 2E / ((1 + 2E)^{1/2} + 1) avoids cancellation for small E
    Ok(2.0 * e / ((1.0 + 2.0 * e).sqrt() + 1.0))
}

/// Inverse of [`oned_forward`]: `S̄ = a⁻¹(1 − |E/δ|ᵖ)^{-1/p} E/δ`.
pub fn oned_invert(params: &Scalar1DParams, e: f64) -> Result<f64> {
    let x = e / params.delta;
    let ax = x.abs();
    if !(ax < 1.0) {
        return Err(Error::Saturation { ratio: ax });
    }
    if ax == 0.0 {
        return Ok(0.0);
    }
    // 1 − |x|ᵖ without cancellation near the limit; |x| − 1 is exact there
    let gap = if ax > 0.5 {
        -(params.p * (ax - 1.0).ln_1p()).exp_m1()
    } else {
        1.0 - ax.powf(params.p)
    };
    Ok(x * gap.powf(-1.0 / params.p) / params.a)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OnedRow {
    pub sbar: f64,
    pub e: f64,
    pub eps: f64,
    pub delta0: f64,
    /// `σ_δ = ε/(aδ)`.
    pub sigma: f64,
    /// `|σ_δ − S̄|`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OnedStudy {
    pub params: Scalar1DParams,
    pub rows: Vec<OnedRow>,
    /// Log-log slope of `gap` against `δ₀` at fixed δ.
    pub slope: OrderFit,
    /// `max gap·δ/(|S̄|δ₀)` over rows with `S̄ ≠ 0`.
    pub max_ratio: f64,
    /// `max gap·aδ²/δ₀²` over rows with `S̄ ≠ 0`.
    pub max_quadratic_ratio: f64,
}

/// Compares `S̄` with the stress `σ_δ = ε/(aδ)` read off the linearized strain.
pub fn oned_delta0_study(params: &Scalar1DParams, sbar_list: &[f64]) -> Result<OnedStudy> {
    params.validate()?;
    let mut rows = Vec::with_capacity(sbar_list.len());
    for &sbar in sbar_list {
        if !sbar.is_finite() {
            return Err(Error::InvalidArgument(format!("stress must be finite, got {sbar}")));
        }
        let e = oned_forward(params, sbar);
        let eps = oned_strain(e)?;
        let sigma = eps / (params.a * params.delta);
        rows.push(OnedRow {
            sbar,
            e,
            eps,
            delta0: eps.abs(),
            sigma,
            gap: (sigma - sbar).abs(),
        });
    }
    let (mut max_ratio, mut max_quadratic_ratio) = (0.0f64, 0.0f64);
    for r in rows.iter().filter(|r| r.sbar != 0.0 && r.delta0 > 0.0) {
        max_ratio = max_ratio.max(r.gap * params.delta / (r.sbar.abs() * r.delta0));
        max_quadratic_ratio =
            max_quadratic_ratio.max(r.gap * params.a * params.delta.powi(2) / r.delta0.powi(2));
    }
    let fit_rows: Vec<&OnedRow> = rows.iter().filter(|r| r.delta0 > 0.0).collect();
    let d0: Vec<f64> = fit_rows.iter().map(|r| r.delta0).collect();
    let gaps: Vec<f64> = fit_rows.iter().map(|r| r.gap).collect();
    let slope = match fit_order(&d0, &gaps) {
        Ok(s) => OrderFit::Slope(s),
        Err(Error::AllZeroResiduals) => OrderFit::IdenticallyZero,
        Err(_) => OrderFit::Underdetermined,
    };
    Ok(OnedStudy {
        params: *params,
        rows,
        slope,
        max_ratio,
        max_quadratic_ratio,
    })
}

/// `n` evenly spaced stresses from `lo` to `hi` inclusive.
pub fn stress_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
