//! Two-qubit realizations in Schmidt form with general binary POVMs.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::general::GeneralRealization;
use super::linalg::{self, CMat};
use crate::error::{Error, Result};
use crate::scenario::CorrelatorBox;

const POVM_TOL: f64 = 1e-12;

/// `cos(α/2)|00> + sin(α/2)|11>`. The closed range `[0, π]` is accepted so
/// that boundary scans can reach product states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtState {
    pub alpha: f64,
}

impl SchmidtState {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(-1e-12..=PI + 1e-12).contains(&alpha) {
            return Err(Error::InvalidState(format!(
                "Schmidt angle {alpha} outside [0, pi]"
            )));
        }
        Ok(Self {
            alpha: alpha.clamp(0.0, PI),
        })
    }

    pub fn maximally_entangled() -> Self {
        Self { alpha: PI / 2.0 }
    }

    pub fn vector(&self) -> [Complex64; 4] {
        let (s, c) = (self.alpha / 2.0).sin_cos();
        [
            Complex64::new(c, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ]
    }
}

/// Binary POVM `A_{a|x} = [(1 + s κ) 1 + s η (n·σ)] / 2` with
/// `s = (-1)^(1-a)` and `n` the Bloch vector at polar angle `theta`,
/// azimuth `phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryMeasurement {
    pub kappa: f64,
    pub eta: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Maps any `(θ, φ)` onto the chart `θ ∈ [0, π]`, `φ ∈ [0, 2π)` without
/// changing the Bloch vector.
pub fn normalize_angles(theta: f64, phi: f64) -> (f64, f64) {
    let mut t = theta.rem_euclid(TAU);
    let mut p = phi;
    if t > PI {
        t = TAU - t;
        p += PI;
    }
    p = p.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if p >= TAU {
        p = 0.0;
    }
    (t, p)
}

impl BinaryMeasurement {
    /// Angles are brought onto the canonical chart; `kappa` and `eta` are
    /// stored as given (see [`validate_povm`]).
    pub fn new(kappa: f64, eta: f64, theta: f64, phi: f64) -> Self {
        let (theta, phi) = normalize_angles(theta, phi);
        Self {
            kappa,
            eta,
            theta,
            phi,
        }
    }

    pub fn projective(theta: f64, phi: f64) -> Self {
        Self::new(0.0, 1.0, theta, phi)
    }

    pub fn is_pvm(&self) -> bool {
        self.kappa.abs() <= POVM_TOL && (self.eta - 1.0).abs() <= POVM_TOL
    }

    pub fn bloch(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.kappa, self.eta, self.theta, self.phi]
    }

    /// Effects for outputs 0 and 1.
    pub fn effects(&self) -> [CMat; 2] {
        let [px, py, pz] = linalg::pauli();
        let n = self.bloch();
        let ns = px.scale(n[0]) + py.scale(n[1]) + pz.scale(n[2]);
        let id = linalg::identity(2);
        std::array::from_fn(|a| {
            let s = if a == 1 { 1.0 } else { -1.0 };
            (id.scale(1.0 + s * self.kappa) + ns.scale(s * self.eta)).scale(0.5)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PovmBound {
    /// `η - 1 <= κ`
    Lower,
    /// `κ <= 1 - η`
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmViolation {
    pub bound: PovmBound,
    pub excess: f64,
}

/// Positivity of both effects: `η - 1 <= κ <= 1 - η`.
pub fn validate_povm(m: &BinaryMeasurement) -> Vec<PovmViolation> {
    let mut out = Vec::new();
    if !(m.kappa.is_finite() && m.eta.is_finite()) {
        out.push(PovmViolation {
            bound: PovmBound::Upper,
            excess: f64::INFINITY,
        });
        return out;
    }
    let lower = (m.eta - 1.0) - m.kappa;
    if lower > POVM_TOL {
        out.push(PovmViolation {
            bound: PovmBound::Lower,
            excess: lower,
        });
    }
    let upper = m.kappa - (1.0 - m.eta);
    if upper > POVM_TOL {
        out.push(PovmViolation {
            bound: PovmBound::Upper,
            excess: upper,
        });
    }
    out
}

/// Seventeen real parameters: the Schmidt angle and `(κ, η, θ, φ)` for
/// `A0, A1, B0, B1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitRealization {
    pub state: SchmidtState,
    pub alice: [BinaryMeasurement; 2],
    pub bob: [BinaryMeasurement; 2],
}

impl QubitRealization {
    pub fn new(
        state: SchmidtState,
        alice: [BinaryMeasurement; 2],
        bob: [BinaryMeasurement; 2],
    ) -> Result<Self> {
        let r = Self { state, alice, bob };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        SchmidtState::new(self.state.alpha)?;
        for (name, m) in self.measurements_named() {
            if let Some(v) = validate_povm(m).first() {
                return Err(Error::InvalidPovm(format!(
                    "{name}: {:?} bound exceeded by {:.3e} (kappa={}, eta={})",
                    v.bound, v.excess, m.kappa, m.eta
                )));
            }
        }
        Ok(())
    }

    fn measurements_named(&self) -> [(&'static str, &BinaryMeasurement); 4] {
        [
            ("A0", &self.alice[0]),
            ("A1", &self.alice[1]),
            ("B0", &self.bob[0]),
            ("B1", &self.bob[1]),
        ]
    }

    pub fn measurements(&self) -> [BinaryMeasurement; 4] {
        [self.alice[0], self.alice[1], self.bob[0], self.bob[1]]
    }

    pub fn parameters(&self) -> [f64; 17] {
        let mut out = [0.0; 17];
        out[0] = self.state.alpha;
        for (k, m) in self.measurements().iter().enumerate() {
            out[1 + 4 * k..5 + 4 * k].copy_from_slice(&m.as_array());
        }
        out
    }

    pub fn from_parameters(p: &[f64; 17]) -> Result<Self> {
        let m = |k: usize| {
            BinaryMeasurement::new(p[1 + 4 * k], p[2 + 4 * k], p[3 + 4 * k], p[4 + 4 * k])
        };
        Self::new(SchmidtState::new(p[0])?, [m(0), m(1)], [m(2), m(3)])
    }

    /// Maximally entangled state with `A0 = B0 = σ_Z`, `A1 = B1 = σ_X`.
    pub fn bell_pair_zx() -> Self {
        let z = BinaryMeasurement::projective(0.0, 0.0);
        let x = BinaryMeasurement::projective(PI / 2.0, 0.0);
        Self {
            state: SchmidtState::maximally_entangled(),
            alice: [z, x],
            bob: [z, x],
        }
    }

    /// Projective measurements reaching `2√2`.
    pub fn tsirelson() -> Self {
        Self {
            state: SchmidtState::maximally_entangled(),
            alice: [
                BinaryMeasurement::projective(0.0, 0.0),
                BinaryMeasurement::projective(PI / 2.0, 0.0),
            ],
            bob: [
                BinaryMeasurement::projective(PI / 4.0, 0.0),
                BinaryMeasurement::projective(-PI / 4.0, 0.0),
            ],
        }
    }

    /// Embeds the realization as an explicit 4x4 density matrix with 2x2
    /// effects.
    pub fn to_general(&self) -> GeneralRealization {
        let psi = self.state.vector();
        let effects = vec![
            self.alice.iter().map(|m| m.effects().to_vec()).collect(),
            self.bob.iter().map(|m| m.effects().to_vec()).collect(),
        ];
        GeneralRealization::with_dims(vec![2, 2], linalg::outer(&psi), effects)
            .expect("qubit embedding is valid")
    }
}

/// Closed-form biases for a Schmidt angle and four measurements given as
/// `[κ, η, θ, φ]` in the order `A0, A1, B0, B1`. No validity checks.
pub fn analytic_correlators(alpha: f64, m: &[[f64; 4]; 4]) -> [f64; 8] {
    let (sa, ca) = alpha.sin_cos();
    let mut cos_t = [0.0; 4];
    let mut sin_t = [0.0; 4];
    for k in 0..4 {
        let (s, c) = m[k][2].sin_cos();
        sin_t[k] = s;
        cos_t[k] = c;
    }
    let mut out = [0.0; 8];
    for k in 0..4 {
        out[k] = m[k][1] * ca * cos_t[k] + m[k][0];
    }
    for x in 0..2 {
        for y in 0..2 {
            let (a, b) = (x, 2 + y);
            let (ka, ea, pa) = (m[a][0], m[a][1], m[a][3]);
            let (kb, eb, pb) = (m[b][0], m[b][1], m[b][3]);
            out[4 + x + 2 * y] = ea * eb * (pa + pb).cos() * sa * sin_t[a] * sin_t[b]
                + ea * eb * cos_t[a] * cos_t[b]
                + ea * kb * ca * cos_t[a]
                + eb * ka * ca * cos_t[b]
                + ka * kb;
        }
    }
    out
}

pub fn qubit_box_analytic(r: &QubitRealization) -> Result<CorrelatorBox> {
    r.validate()?;
    let m = r.measurements().map(|m| m.as_array());
    Ok(CorrelatorBox::from_array(analytic_correlators(
        r.state.alpha,
        &m,
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{canonical_box, BoxLabel};

    #[test]
    fn marginal_equals_cos_alpha_for_z_projector() {
        for alpha in [0.0, 0.3, 1.0, 2.5, PI] {
            let z = BinaryMeasurement::projective(0.0, 0.0);
            let r =
                QubitRealization::new(SchmidtState::new(alpha).unwrap(), [z, z], [z, z]).unwrap();
            let b = qubit_box_analytic(&r).unwrap();
            assert!((b.alice(0) - alpha.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_pair_zx_gives_p14() {
        let b = qubit_box_analytic(&QubitRealization::bell_pair_zx()).unwrap();
        assert!(b.distance(&canonical_box(BoxLabel::P1to4)) < 1e-15);
    }

    #[test]
    fn tsirelson_settings_give_ptb() {
        let b = qubit_box_analytic(&QubitRealization::tsirelson()).unwrap();
        let ptb = canonical_box(BoxLabel::Tsirelson);
        assert!(b.distance(&ptb) < 1e-12, "{b:?}");
    }

    #[test]
    fn angle_chart_is_canonical() {
        let m = BinaryMeasurement::projective(-PI / 4.0, 0.0);
        assert!((m.theta - PI / 4.0).abs() < 1e-15);
        assert!((m.phi - PI).abs() < 1e-15);
        let (t, p) = normalize_angles(7.0, -1.0);
        assert!((0.0..=PI).contains(&t) && (0.0..TAU).contains(&p));
    }

    #[test]
    fn povm_validation() {
        let pvm = BinaryMeasurement::new(0.0, 1.0, 0.3, 0.1);
        assert!(validate_povm(&pvm).is_empty());
        assert!(pvm.is_pvm());

        let bad = BinaryMeasurement::new(0.5, 0.7, 0.0, 0.0);
        let v = validate_povm(&bad);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].bound, PovmBound::Upper);
        assert!((v[0].excess - 0.2).abs() < 1e-12);

        let ok = BinaryMeasurement::new(-0.3, 0.7, 0.0, 0.0);
        assert!(validate_povm(&ok).is_empty());
        assert!(!ok.is_pvm());

        let r = QubitRealization {
            state: SchmidtState::maximally_entangled(),
            alice: [bad, pvm],
            bob: [pvm, pvm],
        };
        assert!(matches!(qubit_box_analytic(&r), Err(Error::InvalidPovm(_))));
    }

    #[test]
    fn effects_are_positive_and_complete() {
        let m = BinaryMeasurement::new(-0.2, 0.75, 1.1, 4.0);
        let [e0, e1] = m.effects();
        assert!(linalg::min_eigenvalue(&e0) >= -1e-14);
        assert!(linalg::min_eigenvalue(&e1) >= -1e-14);
        assert!(linalg::max_abs(&(&e0 + &e1 - linalg::identity(2))) < 1e-15);
    }

    #[test]
    fn schmidt_angle_range() {
        assert!(SchmidtState::new(0.0).is_ok());
        assert!(SchmidtState::new(PI).is_ok());
        assert!(SchmidtState::new(-0.1).is_err());
        assert!(SchmidtState::new(3.5).is_err());
    }

    #[test]
    fn parameter_round_trip() {
        let r = QubitRealization::tsirelson();
        let back = QubitRealization::from_parameters(&r.parameters()).unwrap();
        assert_eq!(r, back);
    }
}
