//! Fixed-size tensor algebra on 3×3 matrices.
//!
//! [`SymTensor`] stores the six independent components of a symmetric
//! tensor; [`Tensor3`] is a general 3×3 matrix. Spectral functions
//! (square root, logarithm, exponential) go through a cyclic Jacobi
//! eigendecomposition, which stays accurate near repeated eigenvalues
//! where the closed-form cubic solution does not.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues at or below this are rejected by the SPD-only functions.
pub const POSITIVITY_TOL: f64 = 1e-14;
/// Determinants at or below this (in magnitude) are treated as singular.
pub const SINGULARITY_TOL: f64 = 1e-14;

const JACOBI_MAX_SWEEPS: usize = 50;
const JACOBI_REL_TOL: f64 = 1e-14;

/// Symmetric 3×3 tensor stored by its six independent components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SymTensor {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
    pub xz: f64,
    pub yz: f64,
}

/// General (not necessarily symmetric) 3×3 tensor, row-major.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tensor3 {
    pub m: [[f64; 3]; 3],
}

/// Eigendecomposition of a [`SymTensor`].
///
/// `eigenvalues` are sorted in descending order and column `k` of `frame`
/// is the unit eigenvector belonging to `eigenvalues[k]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: [f64; 3],
    pub frame: Tensor3,
}

impl SymTensor {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Self = Self::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0);

    pub const fn new(xx: f64, yy: f64, zz: f64, xy: f64, xz: f64, yz: f64) -> Self {
        Self {
            xx,
            yy,
            zz,
            xy,
            xz,
            yz,
        }
    }

    pub const fn diag(x: f64, y: f64, z: f64) -> Self {
        Self::new(x, y, z, 0.0, 0.0, 0.0)
    }

    pub const fn scaled_identity(s: f64) -> Self {
        Self::diag(s, s, s)
    }

    /// Components in the order `xx, yy, zz, xy, xz, yz`.
    pub const fn components(&self) -> [f64; 6] {
        [self.xx, self.yy, self.zz, self.xy, self.xz, self.yz]
    }

    pub const fn from_components(c: [f64; 6]) -> Self {
        Self::new(c[0], c[1], c[2], c[3], c[4], c[5])
    }

    /// Full matrix form. Symmetric by construction.
    pub const fn to_matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ]
    }

    pub const fn to_tensor3(&self) -> Tensor3 {
        Tensor3 {
            m: self.to_matrix(),
        }
    }

    /// Frobenius inner product `A : B = tr(A Bᵀ)`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.xx * other.xx
            + self.yy * other.yy
            + self.zz * other.zz
            + 2.0 * (self.xy * other.xy + self.xz * other.xz + self.yz * other.yz)
    }

    /// `[tr(A Aᵀ)]^{1/2}`.
    pub fn frobenius(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> f64 {
        self.to_tensor3().det()
    }

    /// Second principal invariant, `½[(tr A)² − tr(A²)]`.
    pub fn second_invariant(&self) -> f64 {
        self.xx * self.yy + self.yy * self.zz + self.zz * self.xx
            - self.xy * self.xy
            - self.xz * self.xz
            - self.yz * self.yz
    }

    /// `det(I + A) − 1`, computed from the invariants so that no
    /// cancellation against 1 occurs for small `A`.
    pub fn det_identity_plus_minus_one(&self) -> f64 {
        self.trace() + self.second_invariant() + self.det()
    }

    /// Matrix product of two symmetric tensors (generally not symmetric).
    pub fn matmul(&self, other: &Self) -> Tensor3 {
        self.to_tensor3() * other.to_tensor3()
    }

    pub fn eig(&self) -> Spectrum {
        eig_sym(self)
    }

    /// Applies a scalar function to the eigenvalues: `Q diag(f(λ)) Qᵀ`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        self.eig().compose(f)
    }

    /// Principal square root of a positive definite tensor.
    pub fn spd_sqrt(&self) -> Result<Self> {
        let spec = self.eig();
        spec.require_positive()?;
        Ok(spec.compose(f64::sqrt))
    }

    /// Principal logarithm of a positive definite tensor.
    pub fn sym_log(&self) -> Result<Self> {
        let spec = self.eig();
        spec.require_positive()?;
        Ok(spec.compose(f64::ln))
    }

    pub fn sym_exp(&self) -> Self {
        self.map_spectrum(f64::exp)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.to_tensor3().inverse().map(|t| t.sym())
    }
}

impl Spectrum {
    /// `frame · diag(f(eigenvalues)) · frameᵀ`, assembled componentwise so
    /// the result is exactly symmetric.
    pub fn compose(&self, f: impl Fn(f64) -> f64) -> SymTensor {
        let q = &self.frame.m;
        let d = self.eigenvalues.map(f);
        let entry = |i: usize, j: usize| (0..3).map(|k| q[i][k] * d[k] * q[j][k]).sum::<f64>();
        SymTensor::new(
            entry(0, 0),
            entry(1, 1),
            entry(2, 2),
            entry(0, 1),
            entry(0, 2),
            entry(1, 2),
        )
    }

    pub fn reconstruct(&self) -> SymTensor {
        self.compose(|x| x)
    }

    fn require_positive(&self) -> Result<()> {
        // eigenvalues are sorted descending
        let min = self.eigenvalues[2];
        if min <= POSITIVITY_TOL || min.is_nan() {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric tensor.
///
/// Sweeps until the off-diagonal Frobenius norm drops below
/// `1e-14·|A|` or 50 sweeps have run. Eigenvalues are sorted descending
/// (stable on ties) and each eigenvector is signed so that its
/// largest-magnitude component is positive.
pub fn eig_sym(a: &SymTensor) -> Spectrum {
    let mut m = a.to_matrix();
    let mut v = Tensor3::IDENTITY.m;
    let scale = a.frobenius();

    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off = (2.0 * (m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2))).sqrt();
            if off <= JACOBI_REL_TOL * scale {
                break;
            }
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let mut rot = Tensor3::IDENTITY.m;
                rot[p][p] = c;
                rot[q][q] = c;
                rot[p][q] = s;
                rot[q][p] = -s;
                let r = Tensor3 { m: rot };
                let next = r.transpose() * Tensor3 { m } * r;
                m = next.m;
                // kill roundoff asymmetry and the annihilated pair
                m[p][q] = 0.0;
                m[q][p] = 0.0;
                for i in 0..3 {
                    for j in (i + 1)..3 {
                        let avg = 0.5 * (m[i][j] + m[j][i]);
                        m[i][j] = avg;
                        m[j][i] = avg;
                    }
                }
                v = (Tensor3 { m: v } * r).m;
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap_or(std::cmp::Ordering::Equal));

    let mut eigenvalues = [0.0; 3];
    let mut frame = [[0.0; 3]; 3];
    for (col, &k) in order.iter().enumerate() {
        eigenvalues[col] = m[k][k];
        let mut big = 0;
        for i in 1..3 {
            if v[i][k].abs() > v[big][k].abs() {
                big = i;
            }
        }
        let sign = if v[big][k] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..3 {
            frame[i][col] = sign * v[i][k];
        }
    }

    Spectrum {
        eigenvalues,
        frame: Tensor3 { m: frame },
    }
}

impl Tensor3 {
    pub const ZERO: Self = Self { m: [[0.0; 3]; 3] };
    pub const IDENTITY: Self = Self {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub const fn from_rows(m: [[f64; 3]; 3]) -> Self {
        Self { m }
    }

    pub const fn diag(x: f64, y: f64, z: f64) -> Self {
        Self {
            m: [[x, 0.0, 0.0], [0.0, y, 0.0], [0.0, 0.0, z]],
        }
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Self {
            m: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn frobenius(&self) -> f64 {
        self.m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Inverse via the adjugate.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.abs() <= SINGULARITY_TOL || !det.is_finite() {
            return Err(Error::Singular { det });
        }
        let m = &self.m;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        Ok(Self { m: adj } * (1.0 / det))
    }

    /// Symmetric part `½(A + Aᵀ)`.
    pub fn sym(&self) -> SymTensor {
        let m = &self.m;
        SymTensor::new(
            m[0][0],
            m[1][1],
            m[2][2],
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[0][2] + m[2][0]),
            0.5 * (m[1][2] + m[2][1]),
        )
    }

    /// `AᵀA`, exactly symmetric.
    pub fn gram(&self) -> SymTensor {
        self.transpose().outer_gram()
    }

    /// `AAᵀ`, exactly symmetric.
    pub fn outer_gram(&self) -> SymTensor {
        let m = &self.m;
        let row = |i: usize, j: usize| (0..3).map(|k| m[i][k] * m[j][k]).sum::<f64>();
        SymTensor::new(
            row(0, 0),
            row(1, 1),
            row(2, 2),
            row(0, 1),
            row(0, 2),
            row(1, 2),
        )
    }

    /// `|RᵀR − I| ≤ tol` and `det R > 0`.
    pub fn is_rotation(&self, tol: f64) -> bool {
        (self.gram() - SymTensor::IDENTITY).frobenius() <= tol && self.det() > 0.0
    }
}

macro_rules! impl_linear_ops {
    ($t:ty, $map:ident, $zip:ident) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                self.$zip(&rhs, |a, b| a + b)
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                self.$zip(&rhs, |a, b| a - b)
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                self.$map(|a| -a)
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, s: f64) -> $t {
                self.$map(|a| a * s)
            }
        }
        impl Mul<$t> for f64 {
            type Output = $t;
            fn mul(self, t: $t) -> $t {
                t * self
            }
        }
        impl Div<f64> for $t {
            type Output = $t;
            fn div(self, s: f64) -> $t {
                self.$map(|a| a / s)
            }
        }
        impl AddAssign for $t {
            fn add_assign(&mut self, rhs: $t) {
                *self = *self + rhs;
            }
        }
        impl SubAssign for $t {
            fn sub_assign(&mut self, rhs: $t) {
                *self = *self - rhs;
            }
        }
    };
}

impl SymTensor {
    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_components(self.components().map(f))
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let (a, b) = (self.components(), other.components());
        Self::from_components(std::array::from_fn(|i| f(a[i], b[i])))
    }
}

impl Tensor3 {
    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            m: self.m.map(|row| row.map(&f)),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            m: std::array::from_fn(|i| std::array::from_fn(|j| f(self.m[i][j], other.m[i][j]))),
        }
    }
}

impl_linear_ops!(SymTensor, map, zip);
impl_linear_ops!(Tensor3, map, zip);

impl Mul for Tensor3 {
    type Output = Tensor3;
    fn mul(self, rhs: Tensor3) -> Tensor3 {
        Tensor3 {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| (0..3).map(|k| self.m[i][k] * rhs.m[k][j]).sum())
            }),
        }
    }
}

impl From<SymTensor> for Tensor3 {
    fn from(s: SymTensor) -> Self {
        s.to_tensor3()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rodrigues(axis: [f64; 3], angle: f64) -> Tensor3 {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let [x, y, z] = axis.map(|c| c / n);
        let k = Tensor3::from_rows([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]]);
        Tensor3::IDENTITY + k * angle.sin() + (k * k) * (1.0 - angle.cos())
    }

    fn conj(q: &Tensor3, d: [f64; 3]) -> SymTensor {
        (*q * Tensor3::diag(d[0], d[1], d[2]) * q.transpose()).sym()
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(SymTensor::ZERO.frobenius(), 0.0);
        assert_eq!(SymTensor::IDENTITY.frobenius(), 3f64.sqrt());
        assert_eq!(SymTensor::diag(1.0, 2.0, 2.0).frobenius(), 3.0);
        assert_eq!(Tensor3::diag(1.0, 2.0, 2.0).frobenius(), 3.0);
        // off-diagonals count twice
        let a = SymTensor::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        assert_eq!(a.frobenius(), 2f64.sqrt());
    }

    #[test]
    fn trace_and_det_examples() {
        assert_eq!(SymTensor::IDENTITY.trace(), 3.0);
        assert_eq!(SymTensor::diag(1.0, -1.0, 0.0).trace(), 0.0);
        assert!((SymTensor::diag(0.1, 0.2, 0.3).trace() - 0.6).abs() < 1e-15);
        assert_eq!(SymTensor::IDENTITY.det(), 1.0);
        assert_eq!(SymTensor::scaled_identity(2.0).det(), 8.0);
        assert_eq!(SymTensor::diag(1.0, 2.0, 3.0).det(), 6.0);
        assert_eq!(Tensor3::diag(1.0, 2.0, 3.0).det(), 6.0);
    }

    #[test]
    fn det_identity_plus_matches_direct() {
        let a = SymTensor::new(0.1, -0.2, 0.05, 0.03, -0.07, 0.02);
        let direct = (SymTensor::IDENTITY + a).det() - 1.0;
        assert!((a.det_identity_plus_minus_one() - direct).abs() < 1e-15);
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let s = SymTensor::IDENTITY.eig();
        assert_eq!(s.eigenvalues, [1.0, 1.0, 1.0]);
        assert_eq!(s.frame, Tensor3::IDENTITY);

        let s = SymTensor::diag(1.0, 4.0, 1.0).eig();
        assert_eq!(s.eigenvalues, [4.0, 1.0, 1.0]);
    }

    #[test]
    fn eig_recovers_constructed_spectrum() {
        let q = rodrigues([1.0, 2.0, -0.5], 0.7);
        let a = conj(&q, [1.0, 5.0, 2.0]);
        let s = a.eig();
        for (got, want) in s.eigenvalues.iter().zip([5.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
        let ortho = (s.frame.gram() - SymTensor::IDENTITY).frobenius();
        assert!(ortho < 1e-12);
        let recon = (s.reconstruct() - a).frobenius();
        assert!(recon <= 1e-12 * (1.0 + a.frobenius()));
    }

    #[test]
    fn eig_handles_near_repeated_eigenvalues() {
        let q = rodrigues([0.3, -1.0, 0.2], 1.1);
        let a = conj(&q, [1.0 + 1e-12, 1.0, 1.0 - 1e-12]);
        let s = a.eig();
        assert!((s.reconstruct() - a).frobenius() < 1e-14);
        assert!((s.frame.gram() - SymTensor::IDENTITY).frobenius() < 1e-12);
    }

    #[test]
    fn eigenvector_sign_convention() {
        let q = rodrigues([0.0, 0.0, 1.0], 2.5);
        let s = conj(&q, [3.0, 2.0, 1.0]).eig();
        for col in 0..3 {
            let column: Vec<f64> = (0..3).map(|i| s.frame.m[i][col]).collect();
            let big = column
                .iter()
                .copied()
                .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn spd_sqrt_examples() {
        assert_eq!(SymTensor::IDENTITY.spd_sqrt().unwrap(), SymTensor::IDENTITY);
        let r = SymTensor::diag(4.0, 9.0, 16.0).spd_sqrt().unwrap();
        assert!((r - SymTensor::diag(2.0, 3.0, 4.0)).frobenius() < 1e-15);

        let q = rodrigues([1.0, 1.0, 0.0], 0.4);
        let c = conj(&q, [4.0, 9.0, 16.0]);
        let want = conj(&q, [2.0, 3.0, 4.0]);
        assert!((c.spd_sqrt().unwrap() - want).frobenius() < 1e-13);
    }

    #[test]
    fn spd_sqrt_rejects_indefinite() {
        let err = SymTensor::diag(1.0, 1.0, -1e-3).spd_sqrt().unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
        assert!(SymTensor::diag(1.0, 1.0, 1e-15).spd_sqrt().is_err());
        assert!(SymTensor::diag(1.0, 1.0, 0.0).sym_log().is_err());
    }

    #[test]
    fn log_exp_examples() {
        assert_eq!(SymTensor::IDENTITY.sym_log().unwrap(), SymTensor::ZERO);
        assert_eq!(SymTensor::ZERO.sym_exp(), SymTensor::IDENTITY);
        let e = std::f64::consts::E;
        let l = SymTensor::diag(e, e * e, e * e * e).sym_log().unwrap();
        assert!((l - SymTensor::diag(1.0, 2.0, 3.0)).frobenius() < 1e-14);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(SymTensor::IDENTITY.inverse().unwrap(), SymTensor::IDENTITY);
        assert_eq!(
            SymTensor::scaled_identity(2.0).inverse().unwrap(),
            SymTensor::scaled_identity(0.5)
        );
        let a = Tensor3::from_rows([[2.0, 0.3, -0.1], [0.5, 1.5, 0.2], [-0.4, 0.1, 3.0]]);
        let prod = a * a.inverse().unwrap();
        assert!((prod - Tensor3::IDENTITY).frobenius() < 1e-14);
        assert!(matches!(
            Tensor3::ZERO.inverse(),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn symmetric_reconstruction_is_exact() {
        let a = SymTensor::new(1.0, 2.0, 3.0, 0.1, 0.2, 0.3);
        let m = a.to_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[i][j].to_bits(), m[j][i].to_bits());
            }
        }
    }

    #[test]
    fn rotation_predicate() {
        assert!(rodrigues([1.0, 0.0, 0.0], 0.3).is_rotation(1e-12));
        assert!(!Tensor3::diag(1.0, 1.0, -1.0).is_rotation(1e-12));
        assert!(!Tensor3::diag(1.1, 1.0, 1.0).is_rotation(1e-12));
    }
}
