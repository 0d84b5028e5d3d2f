//! Observables extracted from an accumulated propagator: measurement basis,
//! relative likelihoods, fidelity, rotation and the inferred result.

use crate::error::{Error, Result};
use crate::qmat::{bloch_from_state, polar_decompose, BlochVector, Ket, Mat2};
use crate::scalar::Real;
use crate::trajectory::ScaledPropagator;

/// Below this `|w1 - w2|` the basis axis is reported but flagged unreliable.
pub const DEGENERATE_TOLERANCE: f64 = 1e-9;

/// Width of the band around the equator where the azimuth decides the
/// canonical representative of an axis.
pub const EQUATOR_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct MeasurementOutcome<T> {
    /// Basis state with the larger likelihood.
    pub psi1: Ket<T>,
    pub psi2: Ket<T>,
    /// Normalized likelihood weights, `w1 ≥ w2`, `w1 + w2 = 1`.
    pub w1: T,
    pub w2: T,
    pub fidelity: T,
    pub rotation: Mat2<T>,
    /// Measurement part of the propagator normalized to unit Frobenius norm.
    pub positive_part: Mat2<T>,
    /// `s₁² + s₂²` of the matrix that was analyzed (its squared Frobenius norm).
    /// The only field that depends on the overall scale.
    pub weight_scale: T,
    /// Canonical upper-hemisphere direction of the basis axis.
    pub basis_angles: BlochVector<T>,
    /// 1 or 2; the maximum-likelihood basis state.
    pub result_index: u8,
    /// `rotation · psi_winner`
    pub final_state: Ket<T>,
    pub degenerate: bool,
}

impl<T: Real> MeasurementOutcome<T> {
    pub fn winner(&self) -> &Ket<T> {
        if self.result_index == 1 {
            &self.psi1
        } else {
            &self.psi2
        }
    }
}

/// Analyzes an accumulated propagator. Only the direction of the matrix matters,
/// so `log_scale` is ignored.
pub fn analyze<T: Real>(prop: &ScaledPropagator<T>) -> Result<MeasurementOutcome<T>> {
    analyze_matrix(&prop.matrix)
}

pub fn analyze_matrix<T: Real>(m: &Mat2<T>) -> Result<MeasurementOutcome<T>> {
    let norm = m.frobenius_norm();
    if !(norm >= T::tiny()) || !norm.is_finite() {
        return Err(Error::DegeneratePropagator);
    }
    // Only the direction of the matrix carries information.
    let m = m.scale(T::one() / norm);
    let polar = polar_decompose(&m)?;
    let [s1, s2] = polar.singular_values;
    let (a, b) = (s1 * s1, s2 * s2);
    let (w1, w2) = (a / (a + b), b / (a + b));
    let [psi1, psi2] = polar.basis;
    let result_index = if w1 >= w2 { 1 } else { 2 };
    let winner = if result_index == 1 { psi1 } else { psi2 };
    Ok(MeasurementOutcome {
        psi1,
        psi2,
        w1,
        w2,
        fidelity: polar.contrast,
        rotation: polar.rotation,
        positive_part: polar.positive_part,
        weight_scale: norm * norm,
        basis_angles: canonical_axis(&psi1, &psi2),
        result_index,
        final_state: polar.rotation * winner,
        degenerate: (w1 - w2).abs() < T::tol(DEGENERATE_TOLERANCE),
    })
}

fn unit_bloch<T: Real>(psi: &Ket<T>) -> BlochVector<T> {
    bloch_from_state(&psi.normalized()).expect("normalized state")
}

/// Canonical representative of the axis spanned by an orthonormal pair: the
/// direction with `θ ∈ [0, π/2]`, and on the equator the one with `φ ∈ [-π/2, π/2)`.
pub fn canonical_axis<T: Real>(psi1: &Ket<T>, psi2: &Ket<T>) -> BlochVector<T> {
    let (b1, b2) = (unit_bloch(psi1), unit_bloch(psi2));
    // Pick from the representative nearer the pole so swapped inputs agree.
    let reference = if b1.theta <= b2.theta { b1 } else { b2.antipode() };
    let half_pi = T::FRAC_PI_2();
    if (reference.theta - half_pi).abs() <= T::tol(EQUATOR_TOLERANCE) {
        let in_front = reference.phi >= -half_pi && reference.phi < half_pi;
        let pick = if in_front { reference } else { reference.antipode() };
        BlochVector::unit(half_pi, pick.phi)
    } else if reference.theta < half_pi {
        reference
    } else {
        reference.antipode()
    }
}

/// Bloch direction of the winning basis state: the inferred pre-measurement state.
pub fn result_direction<T: Real>(outcome: &MeasurementOutcome<T>) -> Result<BlochVector<T>> {
    if outcome.degenerate {
        return Err(Error::NoInformation);
    }
    Ok(unit_bloch(outcome.winner()))
}
