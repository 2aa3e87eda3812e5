//! Families of strain-limiting response functions `f_δ(E, S̄)`.
//!
//! Four constructions are provided:
//!
//! * [`FamilyKind::PowerLaw`]: `f_δ = δ·a(1 + aᵖ|S̄|ᵖ)^{-1/p} S̄`, independent of `E`.
//! * [`FamilyKind::DensityModulusReciprocal`] and
//!   [`FamilyKind::DensityModulusDirect`]: an isotropic linear law
//!   `[(1+ν)S̄ − ν tr(S̄)I]/E_δ` whose generalized Young's modulus `E_δ`
//!   depends on the density through `det(I + 2E)`.
//! * [`FamilyKind::ScaledBase`]: `(δ/δ₁)·f(δ₁E/δ, S̄)` generated from a base
//!   response `f` that is bounded by `δ₁`.
//!
//! Each family also exposes its leading-order profile `f₁`, for which
//! `f_δ(E, S̄) = δ f₁(E/δ, S̄) + O(δ²)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symtensor::SymTensor;

/// Base function for [`FamilyKind::ScaledBase`] supplied at runtime.
pub type BaseFn = dyn Fn(&SymTensor, &SymTensor) -> SymTensor + Send + Sync;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    ScaledBase,
    PowerLaw,
    DensityModulusReciprocal,
    DensityModulusDirect,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::ScaledBase => "scaled_base",
            FamilyKind::PowerLaw => "power_law",
            FamilyKind::DensityModulusReciprocal => "density_modulus_reciprocal",
            FamilyKind::DensityModulusDirect => "density_modulus_direct",
        }
    }

    pub fn is_density(self) -> bool {
        matches!(
            self,
            FamilyKind::DensityModulusReciprocal | FamilyKind::DensityModulusDirect
        )
    }
}

/// Named base responses usable by [`FamilyKind::ScaledBase`] from a config file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseProfile {
    /// `f ≡ 0`.
    #[default]
    Zero,
    /// `f(E, S̄) = δ₁·a(1 + aᵖ|S̄|ᵖ)^{-1/p} S̄`.
    PowerLaw,
}

/// A caller-supplied base response. Not serializable.
#[derive(Clone)]
pub struct CustomBase {
    f: Arc<BaseFn>,
    stress_only: bool,
}

impl CustomBase {
    /// `stress_only` declares that the function ignores its strain argument,
    /// which lets the solver finish in a single step.
    pub fn new(
        f: impl Fn(&SymTensor, &SymTensor) -> SymTensor + Send + Sync + 'static,
        stress_only: bool,
    ) -> Self {
        Self {
            f: Arc::new(f),
            stress_only,
        }
    }
}

impl fmt::Debug for CustomBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomBase")
            .field("stress_only", &self.stress_only)
            .finish_non_exhaustive()
    }
}

impl PartialEq for CustomBase {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.f, &other.f) && self.stress_only == other.stress_only
    }
}

/// Tagged description of one strain-limiting family.
///
/// Parameters not used by a kind are ignored by it. Defaults:
/// `a = 0.3, p = 2, E₀ = 1, ν = 0.3, b = 0.5, c = 1, δ₁ = 0.1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub a: f64,
    pub p: f64,
    pub e0: f64,
    pub nu: f64,
    pub b: f64,
    pub c: f64,
    pub delta1: f64,
    pub base: BaseProfile,
    /// Relative slack of the strain ball over the range of `δ f₁` for the
    /// strain-independent kinds.
    pub strain_margin: f64,
    /// Overrides the admissible δ ceiling of the kind.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_ceiling: Option<f64>,
    #[serde(skip)]
    pub custom_base: Option<CustomBase>,
}

impl Default for FamilySpec {
    fn default() -> Self {
        Self {
            kind: FamilyKind::PowerLaw,
            a: 0.3,
            p: 2.0,
            e0: 1.0,
            nu: 0.3,
            b: 0.5,
            c: 1.0,
            delta1: 0.1,
            base: BaseProfile::Zero,
            strain_margin: 0.05,
            delta_ceiling: None,
            custom_base: None,
        }
    }
}

/// Admissible domain `U_δ × V`: two balls about the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainSpec {
    /// `U_δ = B(0, strain_coefficient·δ)`, capped at ½.
    pub strain_coefficient: f64,
    pub stress_radius: f64,
}

impl DomainSpec {
    pub fn strain_radius(&self, delta: f64) -> f64 {
        (self.strain_coefficient * delta).min(0.5)
    }

    /// Radius of the ball that must fit around a solution inside `U_δ`.
    pub fn interior_radius(&self, delta: f64) -> f64 {
        0.5 * self.strain_radius(delta)
    }

    pub fn contains_strain(&self, delta: f64, e: &SymTensor) -> bool {
        e.frobenius() < self.strain_radius(delta)
    }

    pub fn contains_stress(&self, s: &SymTensor) -> bool {
        s.frobenius() < self.stress_radius
    }
}

impl FamilySpec {
    pub fn power_law(a: f64, p: f64) -> Self {
        Self {
            kind: FamilyKind::PowerLaw,
            a,
            p,
            ..Self::default()
        }
    }

    pub fn density_reciprocal(e0: f64, nu: f64, a: f64, b: f64, c: f64) -> Self {
        Self {
            kind: FamilyKind::DensityModulusReciprocal,
            e0,
            nu,
            a,
            b,
            c,
            ..Self::default()
        }
    }

    pub fn density_direct(e0: f64, nu: f64, a: f64, b: f64, c: f64) -> Self {
        Self {
            kind: FamilyKind::DensityModulusDirect,
            ..Self::density_reciprocal(e0, nu, a, b, c)
        }
    }

    pub fn scaled_base(base: BaseProfile, delta1: f64) -> Self {
        Self {
            kind: FamilyKind::ScaledBase,
            base,
            delta1,
            ..Self::default()
        }
    }

    pub fn with_custom_base(mut self, base: CustomBase) -> Self {
        self.kind = FamilyKind::ScaledBase;
        self.custom_base = Some(base);
        self
    }

    pub fn with_stress_radius(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ConfigInvalid(msg));
        let positive = [("a", self.a), ("E0", self.e0), ("b", self.b), ("c", self.c)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return bad(format!("p must be >= 1, got {}", self.p));
        }
        if !(0.0..0.5).contains(&self.nu) {
            return bad(format!("nu must lie in [0, 1/2), got {}", self.nu));
        }
        if !(self.delta1 > 0.0) {
            return bad(format!("delta1 must be positive, got {}", self.delta1));
        }
        if !(self.strain_margin >= 0.0) {
            return bad(format!("strain_margin must be >= 0, got {}", self.strain_margin));
        }
        if self.kind.is_density() && self.a * self.b >= 0.5 {
            return bad(format!("density families need a*b < 1/2, got {}", self.a * self.b));
        }
        if let Some(ceiling) = self.delta_ceiling {
            if !(ceiling > 0.0) {
                return bad(format!("delta_ceiling must be positive, got {ceiling}"));
            }
        }
        Ok(())
    }

    /// Largest δ for which the family is certified.
    pub fn delta_ceiling(&self) -> f64 {
        if let Some(c) = self.delta_ceiling {
            return c;
        }
        if self.kind.is_density() {
            0.1f64.min(1.0 / (100.0 * self.a.max(1.0)))
        } else {
            0.1
        }
    }

    pub fn check_delta(&self, delta: f64) -> Result<()> {
        let ceiling = self.delta_ceiling();
        if delta > 0.0 && delta <= ceiling {
            Ok(())
        } else {
            Err(Error::InadmissibleDelta { delta, ceiling })
        }
    }

    pub fn domain(&self) -> DomainSpec {
        let strain_coefficient = if self.kind.is_density() {
            self.b
        } else {
            1.0 + self.strain_margin
        };
        DomainSpec {
            strain_coefficient,
            stress_radius: self.c,
        }
    }

    /// `true` when `f_δ` ignores its strain argument.
    pub fn is_strain_independent(&self) -> bool {
        match self.kind {
            FamilyKind::PowerLaw => true,
            FamilyKind::ScaledBase => self.custom_base.as_ref().is_none_or(|c| c.stress_only),
            FamilyKind::DensityModulusReciprocal | FamilyKind::DensityModulusDirect => false,
        }
    }

    fn check_inputs(&self, delta: f64, e: &SymTensor, sbar: &SymTensor) -> Result<DomainSpec> {
        self.check_delta(delta)?;
        let dom = self.domain();
        if !dom.contains_strain(delta, e) {
            return Err(Error::OutOfDomain {
                what: "strain",
                norm: e.frobenius(),
                radius: dom.strain_radius(delta),
            });
        }
        if !dom.contains_stress(sbar) {
            return Err(Error::OutOfDomain {
                what: "stress",
                norm: sbar.frobenius(),
                radius: dom.stress_radius,
            });
        }
        Ok(dom)
    }

    /// `f_δ(E, S̄)` with domain and δ checks.
    pub fn eval(&self, delta: f64, e: &SymTensor, sbar: &SymTensor) -> Result<SymTensor> {
        self.check_inputs(delta, e, sbar)?;
        self.eval_unchecked(delta, e, sbar)
    }

    /// `f_δ(E, S̄)` without the domain membership checks. Still fails where
    /// the formula itself breaks down (nonpositive modulus, `I + 2E`
    /// singular).
    pub fn eval_unchecked(&self, delta: f64, e: &SymTensor, sbar: &SymTensor) -> Result<SymTensor> {
        match self.kind {
            FamilyKind::PowerLaw => Ok(power_leading(self.a, self.p, sbar) * delta),
            FamilyKind::DensityModulusReciprocal => {
                let beta = self.modulus_bracket(delta, e)?;
                Ok(self.isotropic(sbar) * (delta / (self.e0 * beta)))
            }
            FamilyKind::DensityModulusDirect => {
                let beta = self.modulus_bracket(delta, e)?;
                Ok(self.isotropic(sbar) * (delta * beta / self.e0))
            }
            FamilyKind::ScaledBase => {
                let scaled = *e * (self.delta1 / delta);
                Ok(self.base_eval(&scaled, sbar) * (delta / self.delta1))
            }
        }
    }

    /// The generalized Young's modulus `E_δ(E)` of the density kinds.
    pub fn generalized_modulus(&self, delta: f64, e: &SymTensor) -> Result<f64> {
        if !self.kind.is_density() {
            return Err(Error::UnsupportedFamily {
                expected: "a density-modulus family",
                found: self.kind.name(),
            });
        }
        self.check_inputs(delta, e, &SymTensor::ZERO)?;
        let beta = self.modulus_bracket(delta, e)?;
        Ok(match self.kind {
            FamilyKind::DensityModulusReciprocal => self.e0 * beta / delta,
            _ => self.e0 / (delta * beta),
        })
    }

    /// The bracket `1 + aδ⁻¹(det(I+2E)^{∓1/2} − 1)`; `δE_δ/E₀` for the
    /// reciprocal kind and its inverse for the direct kind.
    fn modulus_bracket(&self, delta: f64, e: &SymTensor) -> Result<f64> {
        let x = (*e * 2.0).det_identity_plus_minus_one();
        if !(x > -1.0) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: f64::NAN });
        }
        let half_log = 0.5 * x.ln_1p();
        let change = match self.kind {
            // (ρ/ρ_R) − 1
            FamilyKind::DensityModulusReciprocal => (-half_log).exp_m1(),
            // (ρ_R/ρ) − 1
            _ => half_log.exp_m1(),
        };
        let bracket = 1.0 + self.a / delta * change;
        let bound = 1.0 - 2.0 * self.a * self.b;
        if !(bracket >= bound * (1.0 - 1e-12)) || bracket <= 0.0 {
            return Err(Error::NonpositiveModulus { bracket, bound });
        }
        Ok(bracket)
    }

    /// `(1+ν)S̄ − ν tr(S̄) I`.
    pub fn isotropic(&self, sbar: &SymTensor) -> SymTensor {
        *sbar * (1.0 + self.nu) - SymTensor::scaled_identity(self.nu * sbar.trace())
    }

    fn base_eval(&self, e: &SymTensor, sbar: &SymTensor) -> SymTensor {
        if let Some(custom) = &self.custom_base {
            return (custom.f)(e, sbar);
        }
        match self.base {
            BaseProfile::Zero => SymTensor::ZERO,
            BaseProfile::PowerLaw => power_leading(self.a, self.p, sbar) * self.delta1,
        }
    }

    /// Leading-order profile `f₁(Ẽ, S̄)` on the rescaled domain `U × V`.
    pub fn leading(&self, etilde: &SymTensor, sbar: &SymTensor) -> Result<SymTensor> {
        let dom = self.domain();
        if etilde.frobenius() >= dom.strain_coefficient {
            return Err(Error::OutOfDomain {
                what: "rescaled strain",
                norm: etilde.frobenius(),
                radius: dom.strain_coefficient,
            });
        }
        if !dom.contains_stress(sbar) {
            return Err(Error::OutOfDomain {
                what: "stress",
                norm: sbar.frobenius(),
                radius: dom.stress_radius,
            });
        }
        self.leading_unchecked(etilde, sbar)
    }

    pub fn leading_unchecked(&self, etilde: &SymTensor, sbar: &SymTensor) -> Result<SymTensor> {
        match self.kind {
            FamilyKind::PowerLaw => Ok(power_leading(self.a, self.p, sbar)),
            FamilyKind::DensityModulusReciprocal => {
                let factor = 1.0 - self.a * etilde.trace();
                if factor <= 0.0 {
                    return Err(Error::SingularLeading { factor });
                }
                Ok(self.isotropic(sbar) / (self.e0 * factor))
            }
            FamilyKind::DensityModulusDirect => {
                Ok(self.isotropic(sbar) * ((1.0 + self.a * etilde.trace()) / self.e0))
            }
            FamilyKind::ScaledBase => {
                Ok(self.base_eval(&(*etilde * self.delta1), sbar) / self.delta1)
            }
        }
    }

    /// `|f_δ(E, S̄) − δ f₁(E/δ, S̄)|`.
    pub fn leading_gap(&self, delta: f64, e: &SymTensor, sbar: &SymTensor) -> Result<f64> {
        let full = self.eval(delta, e, sbar)?;
        let lead = self.leading_unchecked(&(*e / delta), sbar)?;
        Ok((full - lead * delta).frobenius())
    }

    /// `(1+4ν)c / (E₀(1−2ab))`: the density kinds' bound on `|f_δ|/δ`.
    pub fn density_c0_bound(&self) -> f64 {
        (1.0 + 4.0 * self.nu) * self.c / (self.e0 * (1.0 - 2.0 * self.a * self.b))
    }

    /// Coefficients `(L_E, L_S)` of the joint Lipschitz bound
    /// `|Δf| ≤ L_E|ΔE| + L_S|ΔS̄|` for the density kinds.
    pub fn density_lipschitz_bounds(&self, delta: f64) -> (f64, f64) {
        let k = 1.0 - 2.0 * self.a * self.b;
        let iso = 1.0 + 4.0 * self.nu;
        (
            iso * self.a * self.c * std::f64::consts::SQRT_2 / (self.e0 * k * k),
            iso * delta / (self.e0 * k),
        )
    }

    /// `ab²(1+4ν)c / (E₀(1−2ab)²)`: the leading-gap constant up to an
    /// absolute factor.
    pub fn leading_gap_scale(&self) -> f64 {
        let k = 1.0 - 2.0 * self.a * self.b;
        self.a * self.b * self.b * (1.0 + 4.0 * self.nu) * self.c / (self.e0 * k * k)
    }
}

/// `a(1 + aᵖ|S̄|ᵖ)^{-1/p} S̄`, evaluated without overflow for large `a|S̄|`.
pub fn power_leading(a: f64, p: f64, sbar: &SymTensor) -> SymTensor {
    *sbar * (a * power_saturation(a * sbar.frobenius(), p))
}

/// `(1 + xᵖ)^{-1/p}` for `x ≥ 0`.
pub(crate) fn power_saturation(x: f64, p: f64) -> f64 {
    if x <= 1.0 {
        (1.0 + x.powf(p)).powf(-1.0 / p)
    } else {
        (1.0 + x.powf(-p)).powf(-1.0 / p) / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn density(kind: FamilyKind) -> FamilySpec {
        FamilySpec {
            kind,
            ..FamilySpec::density_reciprocal(1.0, 0.3, 0.3, 0.5, 1.0)
        }
    }

    fn all_kinds() -> Vec<FamilySpec> {
        vec![
            FamilySpec::power_law(1.0, 2.0),
            density(FamilyKind::DensityModulusReciprocal),
            density(FamilyKind::DensityModulusDirect),
            FamilySpec::scaled_base(BaseProfile::PowerLaw, 0.05),
        ]
    }

    #[test]
    fn zero_stress_gives_zero() {
        for spec in all_kinds() {
            let out = spec.eval(0.01, &SymTensor::ZERO, &SymTensor::ZERO).unwrap();
            assert_eq!(out.frobenius(), 0.0, "{:?}", spec.kind);
            let lead = spec.leading(&SymTensor::ZERO, &SymTensor::ZERO).unwrap();
            assert_eq!(lead.frobenius(), 0.0);
        }
    }

    #[test]
    fn power_law_example() {
        let spec = FamilySpec::power_law(1.0, 2.0).with_stress_radius(10.0);
        let out = spec
            .eval(0.01, &SymTensor::ZERO, &SymTensor::diag(3.0, 0.0, 0.0))
            .unwrap();
        // 0.01 · 3/√10
        let want = 0.01 * 3.0 / 10f64.sqrt();
        assert!((out.xx - want).abs() < 1e-17);
        assert!((out.xx - 0.0094868).abs() < 1e-7);
        assert_eq!(out.yy, 0.0);
    }

    #[test]
    fn power_saturation_is_stable_for_large_arguments() {
        assert!((power_saturation(1e200, 4.0) * 1e200 - 1.0).abs() < 1e-15);
        assert!((power_saturation(0.0, 3.0) - 1.0).abs() == 0.0);
        let x: f64 = 2.5;
        let direct = (1.0 + x.powf(3.0)).powf(-1.0 / 3.0);
        assert!((power_saturation(x, 3.0) - direct).abs() < 1e-15);
    }

    #[test]
    fn density_at_zero_strain_is_classical() {
        let spec = density(FamilyKind::DensityModulusReciprocal);
        let s = SymTensor::new(0.3, -0.1, 0.2, 0.05, 0.0, -0.1);
        let delta = 0.005;
        let got = spec.eval(delta, &SymTensor::ZERO, &s).unwrap();
        let want = spec.isotropic(&s) * (delta / spec.e0);
        assert!((got - want).frobenius() < 1e-18);
        let lead = spec.leading(&SymTensor::ZERO, &s).unwrap();
        assert!((lead - spec.isotropic(&s) / spec.e0).frobenius() < 1e-16);
    }

    #[test]
    fn modulus_at_rest() {
        let delta = 0.004;
        for kind in [FamilyKind::DensityModulusReciprocal, FamilyKind::DensityModulusDirect] {
            let m = density(kind).generalized_modulus(delta, &SymTensor::ZERO).unwrap();
            assert!((m - 1.0 / delta).abs() < 1e-12);
        }
        assert!(FamilySpec::power_law(1.0, 2.0)
            .generalized_modulus(0.01, &SymTensor::ZERO)
            .is_err());
    }

    #[test]
    fn modulus_scalar_oracle() {
        let delta = 0.01;
        let spec = FamilySpec {
            a: 1.0,
            b: 0.4,
            ..density(FamilyKind::DensityModulusReciprocal)
        };
        let e = delta * 1e-2;
        let got = spec
            .generalized_modulus(delta, &SymTensor::scaled_identity(e))
            .unwrap();
        let want = spec.e0 / delta * (1.0 + ((1.0 + 2.0 * e).powf(-1.5) - 1.0) / delta);
        assert!((got - want).abs() < 1e-9 * want);
        assert!(got >= spec.e0 / delta * (1.0 - 2.0 * spec.a * spec.b));
    }

    #[test]
    fn modulus_decreases_with_volumetric_strain() {
        let delta = 0.01;
        for kind in [FamilyKind::DensityModulusReciprocal, FamilyKind::DensityModulusDirect] {
            let spec = density(kind);
            let limit = spec.domain().strain_radius(delta) / 3f64.sqrt();
            let mut prev = f64::INFINITY;
            for i in -20..=20 {
                let e = 0.95 * limit * i as f64 / 20.0;
                let m = spec
                    .generalized_modulus(delta, &SymTensor::scaled_identity(e))
                    .unwrap();
                assert!(m < prev, "{kind:?} not decreasing at e = {e}");
                prev = m;
            }
        }
    }

    #[test]
    fn leading_profiles_agree_to_second_order() {
        let (rec, dir) = (
            density(FamilyKind::DensityModulusReciprocal),
            density(FamilyKind::DensityModulusDirect),
        );
        let s = SymTensor::new(0.4, -0.2, 0.1, 0.3, -0.1, 0.2);
        for t in [0.05, 0.01, 0.002] {
            let et = SymTensor::diag(t, 0.5 * t, -0.2 * t);
            let gap = (rec.leading(&et, &s).unwrap() - dir.leading(&et, &s).unwrap()).frobenius();
            let at = rec.a * et.trace();
            let bound = 2.0 * at * at / rec.e0 * (1.0 + 4.0 * rec.nu) * s.frobenius();
            assert!(gap <= bound, "t = {t}: {gap} > {bound}");
        }
    }

    #[test]
    fn power_law_leading_gap_is_exactly_zero() {
        let spec = FamilySpec::power_law(0.7, 3.0);
        let s = SymTensor::new(0.4, -0.2, 0.1, 0.3, -0.1, 0.2);
        let e = SymTensor::diag(0.001, 0.0, 0.0);
        assert_eq!(spec.leading_gap(0.01, &e, &s).unwrap(), 0.0);
    }

    #[test]
    fn density_leading_gap_vanishes_at_rest() {
        let s = SymTensor::diag(0.5, 0.2, -0.1);
        for kind in [FamilyKind::DensityModulusReciprocal, FamilyKind::DensityModulusDirect] {
            assert_eq!(density(kind).leading_gap(0.01, &SymTensor::ZERO, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn density_leading_gap_is_second_order() {
        let spec = density(FamilyKind::DensityModulusReciprocal);
        let s = SymTensor::diag(0.5, 0.2, -0.1);
        let deltas = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
        let gaps: Vec<f64> = deltas
            .iter()
            .map(|&d| {
                let e = SymTensor::IDENTITY * (d * spec.b / 2.0 / 3f64.sqrt());
                spec.leading_gap(d, &e, &s).unwrap()
            })
            .collect();
        for (d, g) in deltas.iter().zip(&gaps) {
            assert!(g / (d * d) < 10.0, "{g} at {d}");
        }
        // least-squares slope in log-log
        let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
        let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 5.0, ys.iter().sum::<f64>() / 5.0);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!(slope >= 1.9, "slope {slope}");
    }

    #[test]
    fn scaled_base_reproduces_power_law() {
        let base = FamilySpec {
            a: 1.0,
            ..FamilySpec::scaled_base(BaseProfile::PowerLaw, 0.05)
        };
        let power = FamilySpec::power_law(1.0, 2.0);
        let s = SymTensor::new(0.4, -0.2, 0.1, 0.3, -0.1, 0.2);
        let e = SymTensor::diag(0.001, 0.0, 0.0);
        let a = base.eval(0.02, &e, &s).unwrap();
        let b = power.eval(0.02, &e, &s).unwrap();
        assert!((a - b).frobenius() < 1e-17);
        assert!(base.leading_gap(0.02, &e, &s).unwrap() < 1e-17);
    }

    #[test]
    fn scaled_base_with_custom_strain_dependent_base() {
        let base = CustomBase::new(|e: &SymTensor, s: &SymTensor| (*e * 0.5 + *s * 0.01) * 0.1, false);
        let spec = FamilySpec::scaled_base(BaseProfile::Zero, 0.1).with_custom_base(base);
        assert!(!spec.is_strain_independent());
        let e = SymTensor::diag(0.001, 0.0, 0.0);
        let s = SymTensor::diag(0.5, 0.0, 0.0);
        let delta = 0.02;
        let got = spec.eval(delta, &e, &s).unwrap();
        // (δ/δ₁)·0.1·(0.5·δ₁E/δ + 0.01 S)
        let want = (e * 0.5 * 0.1) * (delta / 0.1) * (0.1 / delta) + s * (0.001 * delta / 0.1);
        assert!((got - want).frobenius() < 1e-17);
    }

    #[test]
    fn domain_and_delta_errors() {
        let spec = density(FamilyKind::DensityModulusReciprocal);
        assert!(matches!(
            spec.eval(0.02, &SymTensor::ZERO, &SymTensor::ZERO),
            Err(Error::InadmissibleDelta { .. })
        ));
        assert!(spec.eval(0.01, &SymTensor::ZERO, &SymTensor::ZERO).is_ok());
        let big = SymTensor::diag(0.006, 0.0, 0.0);
        assert!(matches!(
            spec.eval(0.01, &big, &SymTensor::ZERO),
            Err(Error::OutOfDomain { what: "strain", .. })
        ));
        assert!(matches!(
            spec.eval(0.01, &SymTensor::ZERO, &SymTensor::diag(2.0, 0.0, 0.0)),
            Err(Error::OutOfDomain { what: "stress", .. })
        ));
        let power = FamilySpec::power_law(1.0, 2.0);
        assert!(power.eval(0.1, &SymTensor::ZERO, &SymTensor::ZERO).is_ok());
        assert!(power.eval(0.11, &SymTensor::ZERO, &SymTensor::ZERO).is_err());
        assert!(power.eval(0.0, &SymTensor::ZERO, &SymTensor::ZERO).is_err());
    }

    #[test]
    fn singular_leading_factor() {
        let spec = density(FamilyKind::DensityModulusReciprocal);
        let et = SymTensor::scaled_identity(1.2);
        assert!(matches!(
            spec.leading_unchecked(&et, &SymTensor::IDENTITY),
            Err(Error::SingularLeading { .. })
        ));
    }

    #[test]
    fn validation() {
        assert!(FamilySpec::default().validate().is_ok());
        let bad = FamilySpec {
            a: 2.0,
            b: 0.5,
            ..density(FamilyKind::DensityModulusDirect)
        };
        assert!(bad.validate().is_err());
        assert!(FamilySpec::power_law(1.0, 0.5).validate().is_err());
        assert!(FamilySpec { nu: 0.5, ..FamilySpec::default() }.validate().is_err());
    }

    #[test]
    fn ceilings() {
        assert_eq!(FamilySpec::power_law(1.0, 2.0).delta_ceiling(), 0.1);
        assert_eq!(density(FamilyKind::DensityModulusReciprocal).delta_ceiling(), 0.01);
        let big_a = FamilySpec {
            a: 0.8,
            b: 0.5,
            ..density(FamilyKind::DensityModulusDirect)
        };
        assert_eq!(big_a.delta_ceiling(), 0.01);
        let tiny_a = FamilySpec {
            a: 4.0,
            b: 0.1,
            ..density(FamilyKind::DensityModulusDirect)
        };
        assert_eq!(tiny_a.delta_ceiling(), 1.0 / 400.0);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = density(FamilyKind::DensityModulusDirect);
        let text = serde_json::to_string(&spec).unwrap();
        let back: FamilySpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
        let partial: FamilySpec =
            serde_json::from_str(r#"{"kind": "power_law", "a": 1.0}"#).unwrap();
        assert_eq!(partial.p, 2.0);
        assert_eq!(partial.a, 1.0);
    }
}
