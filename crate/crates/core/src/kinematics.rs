//! Deformation gradients and the strain/stress measures built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symtensor::{SymTensor, Tensor3};

/// Tolerance on `|RᵀR − I|` for inputs tagged as rotations.
pub const ROTATION_TOL: f64 = 1e-12;
const AXIS_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationMode {
    #[default]
    ExactExponential,
}

/// A one-parameter family of rotations `R_δ = exp(δ·C·W)`, where `W` is
/// the cross-product matrix of the unit `axis` and `C` the
/// `magnitude_coefficient`. The rotation angle is `C·δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationSpec {
    pub axis: [f64; 3],
    pub magnitude_coefficient: f64,
    #[serde(default)]
    pub mode: RotationMode,
}

impl RotationSpec {
    pub fn new(axis: [f64; 3], magnitude_coefficient: f64) -> Self {
        Self {
            axis,
            magnitude_coefficient,
            mode: RotationMode::ExactExponential,
        }
    }

    pub fn none() -> Self {
        Self::new([0.0, 0.0, 1.0], 0.0)
    }

    /// Bound on `|R_δ − I|` from the exponential series, `|tW|e^{|tW|}`
    /// with `|W| = √2`.
    pub fn deviation_bound(&self, delta: f64) -> f64 {
        let x = std::f64::consts::SQRT_2 * self.magnitude_coefficient * delta;
        x * x.exp()
    }

    /// The constant `C₂` with `|R_δ − I| ≤ C₂δ` for every δ.
    ///
    /// `|R − I| = 2√2 sin(θ/2) ≤ √2 θ` for a rotation by angle θ.
    pub fn c2(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.magnitude_coefficient
    }
}

impl Default for RotationSpec {
    fn default() -> Self {
        Self::new([0.0, 0.0, 1.0], 1.0)
    }
}

/// Everything derived from one deformation gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeformationState {
    pub f: Tensor3,
    /// Right Cauchy–Green tensor `FᵀF`.
    pub c: SymTensor,
    /// Left Cauchy–Green tensor `FFᵀ`.
    pub b: SymTensor,
    /// Green–Saint Venant strain `½(C − I)`.
    pub green: SymTensor,
    /// Linearized strain `½(F + Fᵀ) − I`.
    pub eps: SymTensor,
    /// Hencky strain `½ log B`.
    pub hencky: SymTensor,
    /// `ρ/ρ_R = 1/det F`.
    pub density_ratio: f64,
}

impl DeformationState {
    pub fn from_deformation_gradient(f: Tensor3) -> Result<Self> {
        let det = f.det();
        if det <= 0.0 {
            return Err(Error::Singular { det });
        }
        let b = f.outer_gram();
        Ok(Self {
            f,
            c: f.gram(),
            b,
            green: green_strain(&f),
            eps: linearized_strain(&f),
            hencky: b.sym_log()? * 0.5,
            density_ratio: 1.0 / det,
        })
    }

    /// `δ₀ = |F − I|`.
    pub fn delta0(&self) -> f64 {
        displacement_gradient_norm(&self.f)
    }
}

/// Rodrigues rotation `I + sin θ K + (1 − cos θ)K²` with θ = C·δ.
pub fn make_rotation(spec: &RotationSpec, delta: f64) -> Result<Tensor3> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rotation parameter delta must be positive, got {delta}"
        )));
    }
    let [x, y, z] = spec.axis;
    let norm = (x * x + y * y + z * z).sqrt();
    if (norm - 1.0).abs() > AXIS_TOL {
        return Err(Error::InvalidAxis { norm });
    }
    let [x, y, z] = spec.axis.map(|c| c / norm);
    let k = Tensor3::from_rows([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]]);
    let angle = spec.magnitude_coefficient * delta;
    Ok(Tensor3::IDENTITY + k * angle.sin() + (k * k) * (1.0 - angle.cos()))
}

/// `F = R (I + 2E)^{1/2}`.
pub fn deformation_from_green(e: &SymTensor, r: &Tensor3) -> Result<DeformationState> {
    check_rotation(r)?;
    let c = SymTensor::IDENTITY + *e * 2.0;
    let u = c.spd_sqrt()?;
    DeformationState::from_deformation_gradient(*r * u.to_tensor3())
}

/// `F = e^H R`.
pub fn deformation_from_hencky(h: &SymTensor, r: &Tensor3) -> Result<DeformationState> {
    check_rotation(r)?;
    DeformationState::from_deformation_gradient(h.sym_exp().to_tensor3() * *r)
}

pub fn green_strain(f: &Tensor3) -> SymTensor {
    (f.gram() - SymTensor::IDENTITY) * 0.5
}

pub fn linearized_strain(f: &Tensor3) -> SymTensor {
    f.sym() - SymTensor::IDENTITY
}

pub fn hencky_strain(f: &Tensor3) -> Result<SymTensor> {
    Ok(f.outer_gram().sym_log()? * 0.5)
}

pub fn displacement_gradient_norm(f: &Tensor3) -> f64 {
    (*f - Tensor3::IDENTITY).frobenius()
}

/// `σ = ½(F S̄ + S̄ Fᵀ)`.
pub fn sigma_from_piola(f: &Tensor3, sbar: &SymTensor) -> SymTensor {
    (*f * sbar.to_tensor3()).sym()
}

/// `σ = det F · ½(T F⁻ᵀ + F⁻¹ T)`.
pub fn sigma_from_cauchy(f: &Tensor3, t: &SymTensor) -> Result<SymTensor> {
    let finv = f.inverse()?;
    Ok((finv * t.to_tensor3()).sym() * f.det())
}

/// `|ρ/ρ_R − (1 − tr ε)|`.
pub fn density_linearization_gap(state: &DeformationState) -> f64 {
    (state.density_ratio - (1.0 - state.eps.trace())).abs()
}

fn check_rotation(r: &Tensor3) -> Result<()> {
    if r.is_rotation(ROTATION_TOL) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "rotation input is not orthogonal with positive determinant".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn z_axis(c: f64) -> RotationSpec {
        RotationSpec::new([0.0, 0.0, 1.0], c)
    }

    #[test]
    fn zero_coefficient_gives_identity() {
        for delta in [1e-6, 0.1, 3.0] {
            assert_eq!(make_rotation(&z_axis(0.0), delta).unwrap(), Tensor3::IDENTITY);
        }
    }

    #[test]
    fn rotation_about_z_matches_planar_rotation() {
        let r = make_rotation(&z_axis(1.0), FRAC_PI_2).unwrap();
        let want = Tensor3::from_rows([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!((r - want).frobenius() < 1e-15);
        assert!(r.is_rotation(1e-12));
    }

    #[test]
    fn small_rotation_bound() {
        let spec = z_axis(1.0);
        let r = make_rotation(&spec, 1e-6).unwrap();
        let dev = (r - Tensor3::IDENTITY).frobenius();
        assert!(dev <= 1.5e-6);
        assert!(dev <= spec.deviation_bound(1e-6));
        assert!(dev <= spec.c2() * 1e-6);
        let r = make_rotation(&RotationSpec::new([0.6, 0.0, 0.8], 3.0), 0.2).unwrap();
        assert!((r - Tensor3::IDENTITY).frobenius() <= 3.0 * SQRT_2 * 0.2);
    }

    #[test]
    fn rotation_rejects_bad_axis_and_delta() {
        let bad = RotationSpec::new([1.0, 1.0, 0.0], 1.0);
        assert!(matches!(make_rotation(&bad, 0.1), Err(Error::InvalidAxis { .. })));
        assert!(make_rotation(&z_axis(1.0), 0.0).is_err());
    }

    #[test]
    fn green_at_rest() {
        let s = deformation_from_green(&SymTensor::ZERO, &Tensor3::IDENTITY).unwrap();
        assert_eq!(s.f, Tensor3::IDENTITY);
        assert_eq!(s.eps, SymTensor::ZERO);
        assert_eq!(s.hencky, SymTensor::ZERO);
        assert_eq!(s.density_ratio, 1.0);
        assert_eq!(s.delta0(), 0.0);
    }

    #[test]
    fn green_uniaxial() {
        let e = 0.005;
        let s = deformation_from_green(&SymTensor::diag(e, 0.0, 0.0), &Tensor3::IDENTITY).unwrap();
        let stretch = 1.01f64.sqrt();
        assert!((s.f - Tensor3::diag(stretch, 1.0, 1.0)).frobenius() < 1e-15);
        assert!((s.eps - SymTensor::diag(stretch - 1.0, 0.0, 0.0)).frobenius() < 1e-15);
        assert!((s.green - SymTensor::diag(e, 0.0, 0.0)).frobenius() < 1e-15);
    }

    #[test]
    fn pure_rotation_strain_is_second_order() {
        let theta = 1e-3;
        let r = make_rotation(&z_axis(1.0), theta).unwrap();
        let s = deformation_from_green(&SymTensor::ZERO, &r).unwrap();
        assert!((s.eps - (r.sym() - SymTensor::IDENTITY)).frobenius() < 1e-18);
        // eps = diag(cos θ − 1, cos θ − 1, 0)
        let want = SQRT_2 * (1.0 - theta.cos());
        assert!((s.eps.frobenius() - want).abs() < 1e-15);
        assert!(s.eps.frobenius() < theta * theta);
    }

    #[test]
    fn green_requires_positive_definite_c() {
        let e = SymTensor::diag(-0.6, 0.0, 0.0);
        assert!(matches!(
            deformation_from_green(&e, &Tensor3::IDENTITY),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn hencky_examples() {
        let s = deformation_from_hencky(&SymTensor::ZERO, &Tensor3::IDENTITY).unwrap();
        assert_eq!(s.f, Tensor3::IDENTITY);

        let h = 0.02;
        let s = deformation_from_hencky(&SymTensor::scaled_identity(h), &Tensor3::IDENTITY).unwrap();
        let want = (-3.0 * h).exp();
        assert!((s.density_ratio - want).abs() <= 1e-11 * want);

        let s = deformation_from_hencky(&SymTensor::diag(0.01, 0.0, 0.0), &Tensor3::IDENTITY)
            .unwrap();
        assert!((s.f - Tensor3::diag(0.01f64.exp(), 1.0, 1.0)).frobenius() < 1e-15);
    }

    #[test]
    fn hencky_round_trip_with_rotation() {
        let h = SymTensor::new(0.3, -0.2, 0.1, 0.05, -0.15, 0.25);
        let r = make_rotation(&RotationSpec::new([0.0, 0.6, 0.8], 2.0), 0.3).unwrap();
        let s = deformation_from_hencky(&h, &r).unwrap();
        assert!((hencky_strain(&s.f).unwrap() - h).frobenius() < 1e-11);
        let want = (-h.trace()).exp();
        assert!((s.density_ratio - want).abs() < 1e-11 * want);
    }

    #[test]
    fn piola_sigma_examples() {
        let sbar = SymTensor::new(1.0, 2.0, 3.0, 0.5, -0.5, 0.25);
        assert_eq!(sigma_from_piola(&Tensor3::IDENTITY, &sbar), sbar);
        assert_eq!(
            sigma_from_piola(&Tensor3::diag(1.3, 0.9, 1.1), &SymTensor::ZERO),
            SymTensor::ZERO
        );
        let (a, s) = (0.2, 1.5);
        let got = sigma_from_piola(&Tensor3::diag(1.0 + a, 1.0, 1.0), &SymTensor::diag(s, 0.0, 0.0));
        assert!((got - SymTensor::diag((1.0 + a) * s, 0.0, 0.0)).frobenius() < 1e-15);
    }

    #[test]
    fn cauchy_sigma_examples() {
        let t = SymTensor::new(1.0, 2.0, 3.0, 0.5, -0.5, 0.25);
        assert!((sigma_from_cauchy(&Tensor3::IDENTITY, &t).unwrap() - t).frobenius() < 1e-15);
        assert_eq!(
            sigma_from_cauchy(&Tensor3::diag(2.0, 1.0, 1.0), &SymTensor::ZERO).unwrap(),
            SymTensor::ZERO
        );
        let (lambda, tv) = (1.1, 0.7);
        let got = sigma_from_cauchy(&(Tensor3::IDENTITY * lambda), &SymTensor::diag(tv, 0.0, 0.0))
            .unwrap();
        let want = SymTensor::diag(lambda * lambda * tv, 0.0, 0.0);
        assert!((got - want).frobenius() < 1e-14);
        assert!(matches!(
            sigma_from_cauchy(&Tensor3::ZERO, &t),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn density_gap_examples() {
        let rest = deformation_from_green(&SymTensor::ZERO, &Tensor3::IDENTITY).unwrap();
        assert_eq!(density_linearization_gap(&rest), 0.0);

        let e = 1e-3;
        let s = deformation_from_green(&SymTensor::diag(e, 0.0, 0.0), &Tensor3::IDENTITY).unwrap();
        // with u = √(1+2e): 1/u − (1 − (u − 1)) = (u − 1)²/u
        let u = (1.0f64 + 2.0 * e).sqrt();
        let gap = density_linearization_gap(&s);
        assert!((gap - (u - 1.0).powi(2) / u).abs() < 1e-15);
        assert!((gap - e * e).abs() < 3.0 * e.powi(3));
    }

    #[test]
    fn density_gap_is_quadratic_in_delta0() {
        let dir = SymTensor::new(1.0, -0.5, 0.25, 0.3, 0.0, -0.2);
        let dir = dir / dir.frobenius();
        let mut ratios = Vec::new();
        for d0 in [1e-2, 1e-3, 1e-4] {
            let s = deformation_from_green(&(dir * d0), &Tensor3::IDENTITY).unwrap();
            ratios.push(density_linearization_gap(&s) / s.delta0().powi(2));
        }
        for r in &ratios {
            assert!(*r < 10.0 && *r > 0.01, "{ratios:?}");
        }
    }

    #[test]
    fn state_invariants() {
        let e = SymTensor::new(0.1, -0.05, 0.2, 0.03, -0.04, 0.06);
        let r = make_rotation(&RotationSpec::new([1.0, 0.0, 0.0], 1.0), 0.4).unwrap();
        let s = deformation_from_green(&e, &r).unwrap();
        let ft = s.f.transpose();
        assert!(((ft * s.f).sym() - s.c).frobenius() < 1e-12 * s.c.frobenius());
        assert!(((s.f * ft).sym() - s.b).frobenius() < 1e-12 * s.b.frobenius());
        assert!((s.green - e).frobenius() < 1e-11);
        let from_c = s.c.det().powf(-0.5);
        assert!((s.density_ratio - from_c).abs() < 1e-12 * from_c);
        assert!((s.hencky - s.b.sym_log().unwrap() * 0.5).frobenius() < 1e-15);
    }
}
