//! 2×2 complex linear algebra for a single qubit.
//!
//! Everything is expressed in the energy eigenbasis `{|0⟩, |1⟩}` of the qubit
//! Hamiltonian `H = -E σz / 2`. The charge states `|L⟩`, `|R⟩` are fixed
//! vectors in that basis determined by the mixing angle `β`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};

/// A (not necessarily normalized) qubit amplitude vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ket<T>(pub [Complex<T>; 2]);

impl<T: Real> Ket<T> {
    pub fn new(c0: Complex<T>, c1: Complex<T>) -> Self {
        Ket([c0, c1])
    }

    pub fn real(c0: T, c1: T) -> Self {
        Ket([Complex::new(c0, T::zero()), Complex::new(c1, T::zero())])
    }

    pub fn ground() -> Self {
        Self::real(T::one(), T::zero())
    }

    pub fn excited() -> Self {
        Self::real(T::zero(), T::one())
    }

    pub fn norm_sqr(&self) -> T {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Ket<T>) -> Complex<T> {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn scale(&self, c: Complex<T>) -> Ket<T> {
        Ket([self.0[0] * c, self.0[1] * c])
    }

    pub fn normalized(&self) -> Ket<T> {
        let n = self.norm();
        Ket([self.0[0] / n, self.0[1] / n])
    }

    /// The orthogonal vector `(-c1*, c0*)`. For a unit input the pair
    /// `[self, self.orthogonal()]` forms a unitary with determinant one.
    pub fn orthogonal(&self) -> Ket<T> {
        Ket([-self.0[1].conj(), self.0[0].conj()])
    }

    /// `|self⟩⟨other|`
    pub fn outer(&self, other: &Ket<T>) -> Mat2<T> {
        let a = &self.0;
        let b = &other.0;
        Mat2([
            [a[0] * b[0].conj(), a[0] * b[1].conj()],
            [a[1] * b[0].conj(), a[1] * b[1].conj()],
        ])
    }

    pub fn projector(&self) -> Mat2<T> {
        self.outer(self)
    }
}

/// Row-major 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T>(pub [[Complex<T>; 2]; 2]);

impl<T: Real> Mat2<T> {
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Mat2([[z, z], [z, z]])
    }

    pub fn identity() -> Self {
        Self::diag(Complex::new(T::one(), T::zero()), Complex::new(T::one(), T::zero()))
    }

    pub fn diag(d0: Complex<T>, d1: Complex<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Mat2([[d0, z], [z, d1]])
    }

    pub fn from_real(m: [[T; 2]; 2]) -> Self {
        let c = |x: T| Complex::new(x, T::zero());
        Mat2([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    pub fn pauli_x() -> Self {
        Self::from_real([[T::zero(), T::one()], [T::one(), T::zero()]])
    }

    pub fn pauli_y() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        Mat2([[z, -i], [i, z]])
    }

    pub fn pauli_z() -> Self {
        Self::from_real([[T::one(), T::zero()], [T::zero(), -T::one()]])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex<T> {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex<T> {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn frobenius_norm(&self) -> T {
        self.0
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn scale(&self, c: T) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * c, m[0][1] * c], [m[1][0] * c, m[1][1] * c]])
    }

    pub fn scale_complex(&self, c: Complex<T>) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * c, m[0][1] * c], [m[1][0] * c, m[1][1] * c]])
    }

    /// `self · rho · self†`
    pub fn conjugate(&self, rho: &Mat2<T>) -> Mat2<T> {
        *self * *rho * self.adjoint()
    }

    /// Frobenius distance to the Hermitian conjugate.
    pub fn hermiticity_defect(&self) -> T {
        (*self - self.adjoint()).frobenius_norm()
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &Mat2<T>) -> T {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()))
    }

    /// `⟨bra|self|ket⟩`
    pub fn sandwich(&self, bra: &Ket<T>, ket: &Ket<T>) -> Complex<T> {
        bra.inner(&(*self * *ket))
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Mat2<T>;

    #[inline]
    fn mul(self, rhs: Mat2<T>) -> Mat2<T> {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

impl<T: Real> Mul<Ket<T>> for Mat2<T> {
    type Output = Ket<T>;

    #[inline]
    fn mul(self, v: Ket<T>) -> Ket<T> {
        let a = &self.0;
        Ket([
            a[0][0] * v.0[0] + a[0][1] * v.0[1],
            a[1][0] * v.0[0] + a[1][1] * v.0[1],
        ])
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Mat2<T>;

    fn add(self, rhs: Mat2<T>) -> Mat2<T> {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Mat2<T>;

    fn sub(self, rhs: Mat2<T>) -> Mat2<T> {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] - b[0][0], a[0][1] - b[0][1]],
            [a[1][0] - b[1][0], a[1][1] - b[1][1]],
        ])
    }
}

/// Eigen-decomposition of a Hermitian 2×2 matrix.
#[derive(Clone, Copy, Debug)]
pub struct HermitianEigen<T> {
    /// Eigenvalues in descending order.
    pub values: [T; 2],
    /// Unit eigenvectors matching `values`; `vectors[1] == vectors[0].orthogonal()`.
    pub vectors: [Ket<T>; 2],
    /// `values[0] - values[1]`, computed without cancellation.
    pub splitting: T,
}

/// Closed-form eigen-decomposition of a Hermitian 2×2 matrix (only the upper
/// triangle and the real diagonal are read).
pub fn hermitian_eigen<T: Real>(m: &Mat2<T>) -> HermitianEigen<T> {
    let a = m.0[0][0].re;
    let d = m.0[1][1].re;
    let b = m.0[0][1];
    let two = T::lit(2.0);
    let half_diff = (a - d) / two;
    let mean = (a + d) / two;
    let radius = half_diff.hypot(b.norm());
    let top = if b.norm() == T::zero() {
        if a >= d {
            Ket::ground()
        } else {
            Ket::excited()
        }
    } else if half_diff >= T::zero() {
        // (λ₁ - d, b*) avoids cancellation when a ≥ d
        Ket::new(Complex::new(radius + half_diff, T::zero()), b.conj()).normalized()
    } else {
        Ket::new(b, Complex::new(radius - half_diff, T::zero())).normalized()
    };
    HermitianEigen {
        values: [mean + radius, mean - radius],
        vectors: [top, top.orthogonal()],
        splitting: two * radius,
    }
}

/// The two qubit parameters of the model Hamiltonian and detector coupling axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitParams<T> {
    /// Level splitting `E` (angular frequency, ħ = 1).
    pub energy_splitting: T,
    /// Angle `β ∈ [0, π/2]` between the charge basis and the energy eigenbasis.
    pub beta: T,
}

impl<T: Real> QubitParams<T> {
    pub fn new(energy_splitting: T, beta: T) -> Result<Self> {
        if !(energy_splitting > T::zero()) || !energy_splitting.is_finite() {
            return Err(Error::Config(format!(
                "energy splitting must be positive, got {energy_splitting}"
            )));
        }
        if !(beta >= T::zero() && beta <= T::FRAC_PI_2() + T::tol(1e-12)) {
            return Err(Error::Config(format!("beta must lie in [0, pi/2], got {beta}")));
        }
        Ok(Self { energy_splitting, beta })
    }
}

/// Returns `(|L⟩, |R⟩)` in the energy eigenbasis:
/// `|R⟩ = cos(β/2)|0⟩ + sin(β/2)|1⟩`, `|L⟩ = sin(β/2)|0⟩ - cos(β/2)|1⟩`.
pub fn charge_states<T: Real>(qp: &QubitParams<T>) -> (Ket<T>, Ket<T>) {
    let half = qp.beta / T::lit(2.0);
    let (s, c) = half.sin_cos();
    (Ket::real(s, -c), Ket::real(c, s))
}

/// A 2×2 density matrix in the energy eigenbasis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix<T>(Mat2<T>);

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity (all to 1e-12).
    pub fn new(m: Mat2<T>) -> Result<Self> {
        let tol = T::tol(1e-12);
        if m.hermiticity_defect() > tol {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let rho = DensityMatrix(m);
        if rho.min_eigenvalue() < -tol {
            return Err(Error::InvalidState("density matrix is not positive".into()));
        }
        Ok(rho)
    }

    /// Normalizes an unnormalized positive matrix by its trace and restores exact
    /// Hermiticity. Returns `None` if the trace is below the representable floor.
    pub fn from_unnormalized(m: &Mat2<T>) -> Option<Self> {
        let tr = m.0[0][0].re + m.0[1][1].re;
        if !(tr > T::tiny()) || !tr.is_finite() {
            return None;
        }
        let two = T::lit(2.0);
        let off = (m.0[0][1] + m.0[1][0].conj()) / two / tr;
        let d0 = Complex::new(m.0[0][0].re / tr, T::zero());
        let d1 = Complex::new(m.0[1][1].re / tr, T::zero());
        Some(DensityMatrix(Mat2([[d0, off], [off.conj(), d1]])))
    }

    pub fn pure(psi: &Ket<T>) -> Self {
        DensityMatrix(psi.normalized().projector())
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat2::identity().scale(T::lit(0.5)))
    }

    /// `(1 + x σx + y σy + z σz) / 2`; fails if `|(x, y, z)| > 1`.
    pub fn from_bloch_components(v: [T; 3]) -> Result<Self> {
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if len > T::one() + T::tol(1e-12) {
            return Err(Error::InvalidState(format!("Bloch vector length {len} exceeds 1")));
        }
        let half = T::lit(0.5);
        let m = (Mat2::identity()
            + Mat2::pauli_x().scale(v[0])
            + Mat2::pauli_y().scale(v[1])
            + Mat2::pauli_z().scale(v[2]))
        .scale(half);
        Ok(DensityMatrix(m))
    }

    pub fn matrix(&self) -> &Mat2<T> {
        &self.0
    }

    /// `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`
    pub fn bloch_components(&self) -> [T; 3] {
        let two = T::lit(2.0);
        let off = self.0 .0[1][0];
        [two * off.re, two * off.im, self.0 .0[0][0].re - self.0 .0[1][1].re]
    }

    pub fn bloch(&self) -> BlochVector<T> {
        BlochVector::from_cartesian(self.bloch_components())
    }

    pub fn purity(&self) -> T {
        let m = &self.0 .0;
        m[0][0].re * m[0][0].re + m[1][1].re * m[1][1].re + T::lit(2.0) * m[0][1].norm_sqr()
    }

    pub fn min_eigenvalue(&self) -> T {
        hermitian_eigen(&self.0).values[1]
    }

    /// `⟨psi|ρ|psi⟩`
    pub fn population(&self, psi: &Ket<T>) -> T {
        self.0.sandwich(psi, psi).re
    }

    pub fn trace(&self) -> T {
        self.0.trace().re
    }
}

/// Spherical Bloch coordinates `(r, θ, φ)` with the convention
/// `|ψ⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`, so the ground state sits at `θ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector<T> {
    pub r: T,
    pub theta: T,
    pub phi: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(r: T, theta: T, phi: T) -> Self {
        Self { r, theta, phi }
    }

    pub fn unit(theta: T, phi: T) -> Self {
        Self::new(T::one(), theta, phi)
    }

    /// Unit direction `(sin θ cos φ, sin θ sin φ, cos θ)`; `r` is ignored.
    pub fn unit_vector(&self) -> [T; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn cartesian(&self) -> [T; 3] {
        let n = self.unit_vector();
        [self.r * n[0], self.r * n[1], self.r * n[2]]
    }

    /// Inverse of [`cartesian`](Self::cartesian). The zero vector maps to `(0, 0, 0)`.
    pub fn from_cartesian(v: [T; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if r == T::zero() {
            return Self::new(T::zero(), T::zero(), T::zero());
        }
        let theta = (v[2] / r).max(-T::one()).min(T::one()).acos();
        let phi = if v[0] == T::zero() && v[1] == T::zero() {
            T::zero()
        } else {
            wrap_angle(v[1].atan2(v[0]))
        };
        Self::new(r, theta, phi)
    }

    /// The diametrically opposite direction, same `r`.
    pub fn antipode(&self) -> Self {
        Self::new(self.r, T::PI() - self.theta, wrap_angle(self.phi + T::PI()))
    }

    /// Pure state with this direction, `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn to_state(&self) -> Ket<T> {
        let half = self.theta / T::lit(2.0);
        let (s, c) = half.sin_cos();
        Ket::new(Complex::new(c, T::zero()), Complex::from_polar(s, self.phi))
    }
}

/// Bloch coordinates of a unit state vector.
///
/// The global phase is fixed so the `|0⟩` amplitude is real and non-negative;
/// if that amplitude vanishes the result is `(1, π, 0)`.
pub fn bloch_from_state<T: Real>(psi: &Ket<T>) -> Result<BlochVector<T>> {
    let n2 = psi.norm_sqr();
    if (n2 - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::InvalidState(format!("state norm² {n2} is not 1")));
    }
    let a0 = psi.0[0].norm();
    let a1 = psi.0[1].norm();
    if a0 == T::zero() {
        return Ok(BlochVector::unit(T::PI(), T::zero()));
    }
    let theta = T::lit(2.0) * a1.atan2(a0);
    let phi = if a1 == T::zero() {
        T::zero()
    } else {
        wrap_angle(psi.0[1].arg() - psi.0[0].arg())
    };
    Ok(BlochVector::unit(theta, phi))
}

/// Angle between two Bloch directions in `[0, π]`; lengths are ignored.
pub fn angle_between<T: Real>(a: &BlochVector<T>, b: &BlochVector<T>) -> T {
    let na = a.unit_vector();
    let nb = b.unit_vector();
    let dot = na[0] * nb[0] + na[1] * nb[1] + na[2] * nb[2];
    dot.max(-T::one()).min(T::one()).acos()
}

/// Right polar factors `M = rotation · positive_part`, together with the
/// singular-value data they were built from.
#[derive(Clone, Copy, Debug)]
pub struct PolarFactors<T> {
    pub rotation: Mat2<T>,
    pub positive_part: Mat2<T>,
    /// Singular values `s₁ ≥ s₂ ≥ 0`.
    pub singular_values: [T; 2],
    /// Right singular vectors: eigenvectors of `positive_part` matching `singular_values`.
    pub basis: [Ket<T>; 2],
    /// `(s₁² - s₂²) / (s₁² + s₂²)`, evaluated without cancellation.
    pub contrast: T,
}

/// Closed-form right polar decomposition via the singular-value factorization
/// `M = W Σ V†`: `positive_part = V Σ V†`, `rotation = W V†`.
pub fn polar_decompose<T: Real>(m: &Mat2<T>) -> Result<PolarFactors<T>> {
    let gram = m.adjoint() * *m;
    let eig = hermitian_eigen(&gram);
    let top = eig.values[0].max(T::zero());
    let s1 = top.sqrt();
    if !(s1 >= T::tiny()) {
        return Err(Error::DegeneratePropagator);
    }
    let det = m.det();
    let abs_det = det.norm();
    // s₁ s₂ = |det M| keeps s₂ accurate when s₂ ≪ s₁.
    let s2 = (abs_det / s1).min(s1);
    let [v1, v2] = eig.vectors;
    let w1 = (*m * v1).scale(Complex::new(T::one() / s1, T::zero()));
    let phase = if abs_det > T::zero() {
        det / abs_det
    } else {
        Complex::new(T::one(), T::zero())
    };
    let w2 = w1.orthogonal().scale(phase);
    let rotation = w1.outer(&v1) + w2.outer(&v2);
    let positive_part = v1.projector().scale(s1) + v2.projector().scale(s2);
    let trace = gram.0[0][0].re + gram.0[1][1].re;
    let contrast = (eig.splitting / trace).min(T::one());
    Ok(PolarFactors {
        rotation,
        positive_part,
        singular_values: [s1, s2],
        basis: [v1, v2],
        contrast,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn charge_states_at_zero_beta() {
        let (l, r) = charge_states(&QubitParams::new(1.0, 0.0).unwrap());
        assert_eq!(r, Ket::real(1.0, 0.0));
        assert_eq!(l, Ket::real(0.0, -1.0));
    }

    #[test]
    fn charge_states_at_right_angle() {
        let (l, r) = charge_states(&QubitParams::new(1.0, FRAC_PI_2).unwrap());
        let h = 1.0 / 2f64.sqrt();
        assert!((r.0[0].re - h).abs() < 1e-15 && (r.0[1].re - h).abs() < 1e-15);
        assert!((l.0[0].re - h).abs() < 1e-15 && (l.0[1].re + h).abs() < 1e-15);
    }

    #[test]
    fn charge_states_orthonormal() {
        for i in 0..=20 {
            let beta = FRAC_PI_2 * i as f64 / 20.0;
            let (l, r) = charge_states(&QubitParams::new(2.0, beta).unwrap());
            assert!(l.inner(&r).norm() < 1e-15);
            assert!((l.norm() - 1.0).abs() < 1e-15 && (r.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn qubit_params_validation() {
        assert!(QubitParams::new(0.0, 0.1).is_err());
        assert!(QubitParams::new(1.0, -0.1).is_err());
        assert!(QubitParams::new(1.0, 1.7).is_err());
        assert!(QubitParams::new(1.0, FRAC_PI_2).is_ok());
    }

    #[test]
    fn bloch_anchors() {
        let b = bloch_from_state(&Ket::<f64>::ground()).unwrap();
        assert_eq!((b.r, b.theta, b.phi), (1.0, 0.0, 0.0));

        let (_, r) = charge_states(&QubitParams::new(1.0, FRAC_PI_4).unwrap());
        let b = bloch_from_state(&r).unwrap();
        assert!((b.theta - FRAC_PI_4).abs() < 1e-14 && b.phi.abs() < 1e-14);

        let h = 1.0 / 2f64.sqrt();
        let b = bloch_from_state(&Ket::new(c(h, 0.0), c(0.0, h))).unwrap();
        assert!((b.theta - FRAC_PI_2).abs() < 1e-14 && (b.phi - FRAC_PI_2).abs() < 1e-14);

        let b = bloch_from_state(&Ket::new(c(0.0, 0.0), c(0.0, -1.0))).unwrap();
        assert_eq!((b.theta, b.phi), (PI, 0.0));
    }

    #[test]
    fn bloch_global_phase_is_removed() {
        let psi = Ket::new(c(0.6, 0.0), c(0.0, 0.8));
        let rotated = psi.scale(Complex::from_polar(1.0, 2.1));
        let a = bloch_from_state(&psi).unwrap();
        let b = bloch_from_state(&rotated).unwrap();
        assert!((a.theta - b.theta).abs() < 1e-14 && (a.phi - b.phi).abs() < 1e-14);
    }

    #[test]
    fn bloch_rejects_non_unit() {
        assert!(bloch_from_state(&Ket::real(1.0, 1.0)).is_err());
    }

    #[test]
    fn polar_of_identity() {
        let p = polar_decompose(&Mat2::<f64>::identity()).unwrap();
        assert!(p.rotation.max_abs_diff(&Mat2::identity()) < 1e-15);
        assert!(p.positive_part.max_abs_diff(&Mat2::identity()) < 1e-15);
        assert_eq!(p.contrast, 0.0);
    }

    #[test]
    fn polar_of_positive_diagonal() {
        let m = Mat2::from_real([[3.0, 0.0], [0.0, 0.5]]);
        let p = polar_decompose(&m).unwrap();
        assert!(p.rotation.max_abs_diff(&Mat2::identity()) < 1e-15);
        assert!(p.positive_part.max_abs_diff(&m) < 1e-15);
        assert_eq!(p.singular_values, [3.0, 0.5]);
    }

    #[test]
    fn polar_of_rank_one() {
        let m = Mat2::from_real([[0.0, 0.0], [2.0, 0.0]]);
        let p = polar_decompose(&m).unwrap();
        assert_eq!(p.singular_values[1], 0.0);
        let u = p.rotation;
        assert!((u * u.adjoint()).max_abs_diff(&Mat2::identity()) < 1e-14);
        assert!((u * p.positive_part).max_abs_diff(&m) < 1e-14);
        assert_eq!(p.contrast, 1.0);
    }

    #[test]
    fn polar_rejects_zero() {
        assert_eq!(
            polar_decompose(&Mat2::<f64>::zero()).unwrap_err(),
            Error::DegeneratePropagator
        );
    }

    #[test]
    fn polar_on_f32() {
        let m = Mat2::<f32>([
            [Complex::new(0.3, 0.2), Complex::new(-1.0, 0.5)],
            [Complex::new(0.7, -0.1), Complex::new(0.2, 0.9)],
        ]);
        let p = polar_decompose(&m).unwrap();
        assert!((p.rotation * p.positive_part).max_abs_diff(&m) < 1e-5);
    }

    #[test]
    fn angle_between_examples() {
        let z = BlochVector::unit(0.0, 0.0);
        assert_eq!(angle_between(&z, &z), 0.0);
        let down = BlochVector::unit(PI, 1.3);
        assert!((angle_between(&z, &down) - PI).abs() < 1e-15);
        let x = BlochVector::unit(FRAC_PI_2, 0.0);
        let y = BlochVector::unit(FRAC_PI_2, FRAC_PI_2);
        assert!((angle_between(&x, &y) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(Mat2::<f64>::identity()).is_err());
        assert!(DensityMatrix::new(Mat2::from_real([[1.2, 0.0], [0.0, -0.2]])).is_err());
        assert!(DensityMatrix::new(Mat2::from_real([[0.5, 0.1], [0.0, 0.5]])).is_err());
        assert!(DensityMatrix::new(Mat2::from_real([[0.5, 0.5], [0.5, 0.5]])).is_ok());
        assert!(DensityMatrix::from_bloch_components([0.0, 0.8, 0.8]).is_err());
    }

    #[test]
    fn bloch_components_round_trip() {
        let v: [f64; 3] = [0.3, -0.4, 0.5];
        let rho = DensityMatrix::from_bloch_components(v).unwrap();
        let back = rho.bloch_components();
        for i in 0..3 {
            assert!((back[i] - v[i]).abs() < 1e-15);
        }
        let psi = BlochVector::<f64>::unit(1.1, -2.0).to_state();
        let b = DensityMatrix::pure(&psi).bloch();
        assert!((b.r - 1.0).abs() < 1e-14);
        assert!((b.theta - 1.1).abs() < 1e-14 && (b.phi + 2.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_eigen_matches_definition() {
        let m = Mat2([[c(0.7, 0.0), c(0.1, -0.25)], [c(0.1, 0.25), c(0.3, 0.0)]]);
        let e = hermitian_eigen(&m);
        for i in 0..2 {
            let lhs = m * e.vectors[i];
            let rhs = e.vectors[i].scale(c(e.values[i], 0.0));
            assert!((lhs.0[0] - rhs.0[0]).norm() < 1e-15);
            assert!((lhs.0[1] - rhs.0[1]).norm() < 1e-15);
        }
        assert!(e.values[0] >= e.values[1]);
    }
}
