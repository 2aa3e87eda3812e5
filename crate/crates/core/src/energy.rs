//! Complementary energy and its Legendre transform for the power-law profile.
//!
//! The leading profile `f₁(S̄) = a(1 + aᵖ|S̄|ᵖ)^{-1/p} S̄` is the gradient of
//! the radial potential `W*(S̄) = G(|S̄|)` with
//! `G(s) = ∫₀ˢ a t (1 + aᵖtᵖ)^{-1/p} dt`, normalized so `W*(0) = 0`.
//! Its conjugate `W` gives the stress of a Green elastic solid in terms of
//! the linearized strain.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{power_leading, power_saturation, BaseProfile, FamilyKind, FamilySpec};
use crate::symtensor::SymTensor;

/// Absolute tolerance of the adaptive quadrature for `G`.
pub const QUADRATURE_TOL: f64 = 1e-12;
/// Relative finite-difference step for gradients.
pub const FD_STEP: f64 = 1e-5;
const MAX_DEPTH: u32 = 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyProfile {
    pub family: FamilySpec,
    /// Panels of the fixed-panel fallback quadrature.
    pub quadrature_points: usize,
}

impl EnergyProfile {
    pub fn new(family: FamilySpec, quadrature_points: usize) -> Result<Self> {
        let gradient_base = match family.kind {
            FamilyKind::PowerLaw => true,
            FamilyKind::ScaledBase => {
                family.base == BaseProfile::PowerLaw && family.custom_base.is_none()
            }
            _ => false,
        };
        if !gradient_base {
            return Err(Error::UnsupportedFamily {
                expected: "power_law or scaled_base with a power-law base",
                found: family.kind.name(),
            });
        }
        if quadrature_points < 64 {
            return Err(Error::InvalidArgument(format!(
                "quadrature_points must be at least 64, got {quadrature_points}"
            )));
        }
        family.validate()?;
        Ok(Self {
            family,
            quadrature_points,
        })
    }

    pub fn a(&self) -> f64 {
        self.family.a
    }

    pub fn p(&self) -> f64 {
        self.family.p
    }

    /// `f₁(S̄)`.
    pub fn leading(&self, sbar: &SymTensor) -> SymTensor {
        power_leading(self.a(), self.p(), sbar)
    }

    /// Inverse of [`leading`](Self::leading): `S̄ = a⁻¹(1 − |Ẽ|ᵖ)^{-1/p} Ẽ`.
    pub fn leading_inverse(&self, etilde: &SymTensor) -> Result<SymTensor> {
        let r = etilde.frobenius();
        if !(r < 1.0) {
            return Err(Error::Saturation { ratio: r });
        }
        Ok(*etilde * (radial_gap(r, self.p()).powf(-1.0 / self.p()) / self.a()))
    }

    fn integrand(&self, t: f64) -> f64 {
        let a = self.a();
        a * t * power_saturation(a * t, self.p())
    }

    /// `G(s)` by adaptive Gauss–Kronrod quadrature, for any `p`.
    pub fn radial_energy_quadrature(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let f = |t: f64| self.integrand(t);
        match adaptive_gk(&f, 0.0, s, QUADRATURE_TOL, MAX_DEPTH) {
            Some(v) => v,
            None => fixed_panels(&f, 0.0, s, self.quadrature_points),
        }
    }

    /// `G(s)`; closed form `a⁻¹[(1 + a²s²)^{1/2} − 1]` when `p = 2`.
    pub fn radial_energy(&self, s: f64) -> f64 {
        if self.p() == 2.0 {
            let x = self.a() * s;
            // (1 + x²)^{1/2} − 1 = x² / ((1 + x²)^{1/2} + 1)
            x * x / ((1.0 + x * x).sqrt() + 1.0) / self.a()
        } else {
            self.radial_energy_quadrature(s)
        }
    }

    fn stress_check(&self, sbar: &SymTensor) -> Result<()> {
        let dom = self.family.domain();
        if !dom.contains_stress(sbar) {
            return Err(Error::OutOfDomain {
                what: "stress",
                norm: sbar.frobenius(),
                radius: dom.stress_radius,
            });
        }
        Ok(())
    }

    /// `W*(S̄)` on `V`.
    pub fn complementary_energy(&self, sbar: &SymTensor) -> Result<f64> {
        self.stress_check(sbar)?;
        Ok(self.radial_energy(sbar.frobenius()))
    }

    /// `W(Ẽ) = Ẽ·S̄ − W*(S̄)` at the maximizer `S̄ = f₁⁻¹(Ẽ)`.
    ///
    /// The maximizer may lie outside `V`; the potential is evaluated there
    /// regardless since `W` is defined on the whole range of `f₁`.
    pub fn legendre_transform(&self, etilde: &SymTensor) -> Result<f64> {
        let sbar = self.leading_inverse(etilde)?;
        if self.p() == 2.0 {
            // a⁻¹[1 − (1 − r²)^{1/2}]
            let r2 = etilde.frobenius().powi(2);
            return Ok(r2 / (1.0 + (1.0 - r2).sqrt()) / self.a());
        }
        Ok(etilde.dot(&sbar) - self.radial_energy(sbar.frobenius()))
    }

    /// Stress `∂_ε[δ W(ε/δ)] = ∇W(ε/δ)` by central differences on `W`.
    pub fn green_stress(&self, delta: f64, eps: &SymTensor) -> Result<SymTensor> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
        let etilde = *eps / delta;
        let r = etilde.frobenius();
        if !(r < 1.0) {
            return Err(Error::Saturation { ratio: r });
        }
        // keep every stencil point inside the unit ball
        let h = (FD_STEP * r.max(1.0)).min(0.5 * (1.0 - r));
        fd_gradient(|x| self.legendre_transform(x), &etilde, h)
    }
}

/// Errors of the three consistency relations at one probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyProbe {
    pub sbar_norm: f64,
    pub w_star: f64,
    pub etilde_norm: f64,
    pub w: f64,
    /// `|∇W*(S̄) − f₁(S̄)|` with a central-difference gradient.
    pub gradient_error: f64,
    /// `|W(Ẽ) + W*(S̄) − Ẽ·S̄|` at `S̄ = f₁⁻¹(Ẽ)`.
    pub fenchel_young_error: f64,
    /// `|δ f₁(σ) − ε|` with `σ` the Green stress of `ε = δẼ`.
    pub round_trip_error: f64,
}

impl EnergyProfile {
    /// Checks `f₁ = ∇W*` at `sbar` and the conjugate pair and stress
    /// round trip at `etilde`.
    pub fn probe(&self, sbar: &SymTensor, etilde: &SymTensor, delta: f64) -> Result<EnergyProbe> {
        let w_star = self.complementary_energy(sbar)?;
        let h = FD_STEP * sbar.frobenius().max(1.0);
        let grad = fd_gradient(|x| Ok(self.radial_energy(x.frobenius())), sbar, h)?;
        let w = self.legendre_transform(etilde)?;
        let conj = self.leading_inverse(etilde)?;
        let fy = w + self.radial_energy(conj.frobenius()) - etilde.dot(&conj);
        let eps = *etilde * delta;
        let sigma = self.green_stress(delta, &eps)?;
        Ok(EnergyProbe {
            sbar_norm: sbar.frobenius(),
            w_star,
            etilde_norm: etilde.frobenius(),
            w,
            gradient_error: (grad - self.leading(sbar)).frobenius(),
            fenchel_young_error: fy.abs(),
            round_trip_error: (self.leading(&sigma) * delta - eps).frobenius(),
        })
    }
}

/// `1 − rᵖ` for `0 ≤ r < 1`, accurate near `r = 1`.
fn radial_gap(r: f64, p: f64) -> f64 {
    if r > 0.5 {
        -(p * (r - 1.0).ln_1p()).exp_m1()
    } else {
        1.0 - r.powf(p)
    }
}

/// Central-difference gradient of `f` at `x` with respect to the Frobenius
/// inner product. The off-diagonal entries carry the factor ½ because each
/// appears twice in the full matrix.
pub fn fd_gradient<F>(f: F, x: &SymTensor, h: f64) -> Result<SymTensor>
where
    F: Fn(&SymTensor) -> Result<f64>,
{
    let base = x.components();
    let mut grad = [0.0; 6];
    for (i, g) in grad.iter_mut().enumerate() {
        let mut plus = base;
        let mut minus = base;
        plus[i] += h;
        minus[i] -= h;
        let d = (f(&SymTensor::from_components(plus))? - f(&SymTensor::from_components(minus))?)
            / (2.0 * h);
        *g = if i < 3 { d } else { 0.5 * d };
    }
    Ok(SymTensor::from_components(grad))
}

const GK_NODES: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// weights of the embedded 7-point Gauss rule at the odd nodes 1, 3, 5, 7
const G7_WEIGHTS: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod estimate and its difference from the embedded Gauss estimate.
fn gk15(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = K15_WEIGHTS[7] * fc;
    let mut g = G7_WEIGHTS[3] * fc;
    for j in 0..7 {
        let pair = f(c - h * GK_NODES[j]) + f(c + h * GK_NODES[j]);
        k += K15_WEIGHTS[j] * pair;
        if j % 2 == 1 {
            g += G7_WEIGHTS[j / 2] * pair;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection on G7/K15 panels; `None` if the depth budget runs out.
fn adaptive_gk(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, depth: u32) -> Option<f64> {
    let (k, err) = gk15(f, lo, hi);
    if err <= tol {
        return Some(k);
    }
    if depth == 0 {
        return None;
    }
    let mid = 0.5 * (lo + hi);
    let left = adaptive_gk(f, lo, mid, 0.5 * tol, depth - 1)?;
    let right = adaptive_gk(f, mid, hi, 0.5 * tol, depth - 1)?;
    Some(left + right)
}

fn fixed_panels(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let w = (hi - lo) / panels as f64;
    (0..panels)
        .map(|i| gk15(f, lo + w * i as f64, lo + w * (i + 1) as f64).0)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(a: f64, p: f64) -> EnergyProfile {
        EnergyProfile::new(FamilySpec::power_law(a, p).with_stress_radius(10.0), 64).unwrap()
    }

    #[test]
    fn quadrature_integrates_polynomials() {
        let v = adaptive_gk(&|t: f64| t.powi(5), 0.0, 2.0, 1e-12, 10).unwrap();
        assert!((v - 64.0 / 6.0).abs() < 1e-12);
        let w = fixed_panels(&|t: f64| t.cos(), 0.0, 1.0, 64);
        assert!((w - 1f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_and_quadrature_agree() {
        let pr = profile(1.3, 2.0);
        for s in [0.0, 0.01, 0.5, 1.0, 3.0, 9.0] {
            let d = (pr.radial_energy(s) - pr.radial_energy_quadrature(s)).abs();
            assert!(d < 1e-10, "s = {s}: {d}");
        }
    }

    #[test]
    fn energy_examples() {
        let pr = profile(1.0, 2.0);
        assert_eq!(pr.complementary_energy(&SymTensor::ZERO).unwrap(), 0.0);
        let s = SymTensor::new(0.6, 0.0, 0.0, 0.4, 0.0, 0.0) / (0.36f64 + 0.32).sqrt();
        let w = pr.complementary_energy(&s).unwrap();
        assert!((w - (2f64.sqrt() - 1.0)).abs() < 1e-14);
        assert!(matches!(
            pr.complementary_energy(&SymTensor::diag(20.0, 0.0, 0.0)),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn transform_examples() {
        for p in [2.0, 3.0] {
            let pr = profile(0.7, p);
            assert_eq!(pr.legendre_transform(&SymTensor::ZERO).unwrap(), 0.0);
            assert!(matches!(
                pr.legendre_transform(&SymTensor::diag(1.0, 0.0, 0.0)),
                Err(Error::Saturation { .. })
            ));
        }
        // scalar p = 2: W(e) = a⁻¹[1 − (1 − e²)^{1/2}]
        let pr = profile(2.0, 2.0);
        let w = pr.legendre_transform(&SymTensor::diag(0.6, 0.0, 0.0)).unwrap();
        assert!((w - 0.1).abs() < 1e-15);
    }

    #[test]
    fn fenchel_young_equality_for_general_p() {
        let pr = profile(0.8, 3.0);
        let e = SymTensor::new(0.2, -0.3, 0.1, 0.25, -0.05, 0.1);
        let s = pr.leading_inverse(&e).unwrap();
        let lhs = pr.legendre_transform(&e).unwrap() + pr.radial_energy(s.frobenius());
        assert!((lhs - e.dot(&s)).abs() < 1e-12);
    }

    #[test]
    fn green_stress_round_trip_and_zero() {
        let pr = profile(1.0, 2.0);
        let delta = 0.01;
        assert_eq!(pr.green_stress(delta, &SymTensor::ZERO).unwrap(), SymTensor::ZERO);
        let eps = SymTensor::new(0.004, -0.002, 0.001, 0.003, 0.0, -0.001);
        let sigma = pr.green_stress(delta, &eps).unwrap();
        assert!((pr.leading(&sigma) * delta - eps).frobenius() < 1e-10);
        assert!(matches!(
            pr.green_stress(delta, &SymTensor::diag(0.02, 0.0, 0.0)),
            Err(Error::Saturation { .. })
        ));
    }

    #[test]
    fn unsupported_profiles() {
        let dens = FamilySpec::density_reciprocal(1.0, 0.3, 0.3, 0.5, 1.0);
        assert!(matches!(EnergyProfile::new(dens, 64), Err(Error::UnsupportedFamily { .. })));
        let zero = FamilySpec::scaled_base(BaseProfile::Zero, 0.1);
        assert!(EnergyProfile::new(zero, 64).is_err());
        let good = FamilySpec::scaled_base(BaseProfile::PowerLaw, 0.1);
        assert!(EnergyProfile::new(good.clone(), 64).is_ok());
        assert!(EnergyProfile::new(good, 32).is_err());
    }

    #[test]
    fn fd_gradient_of_quadratic_form() {
        // f(X) = X·A gives gradient A
        let a = SymTensor::new(1.0, 2.0, 3.0, 0.5, -0.25, 0.75);
        let g = fd_gradient(|x| Ok(x.dot(&a)), &SymTensor::ZERO, 1e-3).unwrap();
        assert!((g - a).frobenius() < 1e-12);
    }
}
