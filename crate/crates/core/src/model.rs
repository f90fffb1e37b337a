//! Two-mode equations of motion for a binary mixture in a double well.
//!
//! The phase-space point is `(Z_a, Z_b, phi_a, phi_b)`: scaled population
//! imbalances and relative phases of the two species. Time is measured in
//! units of `1/K` and all couplings are dimensionless (`hbar = 1`).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance on `f_a + f_b = 1`.
const FRACTION_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Species {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Species::A => f.write_str("a"),
            Species::B => f.write_str("b"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("state outside the model domain: |Z_{species}| = {z} must be < 1")]
    Domain { species: Species, z: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
}

/// How the tunnelling amplitudes enter the equations of motion.
///
/// `Constant` uses the bare `K_l` and `Lambda_l` and ignores the overlap
/// corrections `C_l`, `D_ab`. `Variable` dresses both with the instantaneous
/// state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TunnelingVariant {
    #[default]
    Constant,
    Variable,
}

/// All constants of the two-mode model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub f_a: f64,
    pub f_b: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub lambda_ab: f64,
    #[serde(default)]
    pub c_a: f64,
    #[serde(default)]
    pub c_b: f64,
    #[serde(default)]
    pub d_ab: f64,
    #[serde(default)]
    pub tunneling: TunnelingVariant,
}

impl ModelParams {
    /// Equal populations, equal tunnelling `k`, equal intra-species `lambda`,
    /// no overlap corrections.
    pub fn symmetric(k: f64, lambda: f64, lambda_ab: f64) -> Self {
        Self {
            f_a: 0.5,
            f_b: 0.5,
            k_a: k,
            k_b: k,
            lambda_a: lambda,
            lambda_b: lambda,
            lambda_ab,
            c_a: 0.0,
            c_b: 0.0,
            d_ab: 0.0,
            tunneling: TunnelingVariant::Constant,
        }
    }

    /// Symmetric parameters with `K = 1` and `Lambda_ab = ratio * Lambda`.
    pub fn with_ratio(lambda: f64, ratio: f64) -> Self {
        Self::symmetric(1.0, lambda, ratio * lambda)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            self.f_a,
            self.f_b,
            self.k_a,
            self.k_b,
            self.lambda_a,
            self.lambda_b,
            self.lambda_ab,
            self.c_a,
            self.c_b,
            self.d_ab,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidParams("all parameters must be finite".into()));
        }
        if self.f_a <= 0.0 || self.f_b <= 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "population fractions must be positive (f_a = {}, f_b = {})",
                self.f_a, self.f_b
            )));
        }
        if (self.f_a + self.f_b - 1.0).abs() > FRACTION_SUM_TOL {
            return Err(ModelError::InvalidParams(format!(
                "population fractions must sum to 1 (f_a + f_b = {})",
                self.f_a + self.f_b
            )));
        }
        if self.k_a <= 0.0 || self.k_b <= 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "tunnelling amplitudes must be positive (K_a = {}, K_b = {})",
                self.k_a, self.k_b
            )));
        }
        Ok(())
    }

    /// True when `K_a = K_b`, `Lambda_a = Lambda_b`, `f_a = f_b` and `C_a = C_b`.
    pub fn is_symmetric(&self) -> bool {
        self.k_a == self.k_b
            && self.lambda_a == self.lambda_b
            && self.f_a == self.f_b
            && self.c_a == self.c_b
    }

    /// The same system with the species labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            f_a: self.f_b,
            f_b: self.f_a,
            k_a: self.k_b,
            k_b: self.k_a,
            lambda_a: self.lambda_b,
            lambda_b: self.lambda_a,
            c_a: self.c_b,
            c_b: self.c_a,
            ..*self
        }
    }

    /// Overlap corrections that are active under the configured variant.
    fn active_overlaps(&self) -> (f64, f64, f64) {
        match self.tunneling {
            TunnelingVariant::Constant => (0.0, 0.0, 0.0),
            TunnelingVariant::Variable => (self.c_a, self.c_b, self.d_ab),
        }
    }
}

/// A point in phase space. Phases are kept unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub z_a: f64,
    pub z_b: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl State {
    pub const fn new(z_a: f64, z_b: f64, phi_a: f64, phi_b: f64) -> Self {
        Self { z_a, z_b, phi_a, phi_b }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if ![self.z_a, self.z_b, self.phi_a, self.phi_b]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(ModelError::InvalidState("state components must be finite".into()));
        }
        check_domain(self.z_a, Species::A)?;
        check_domain(self.z_b, Species::B)
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.z_b, self.z_a, self.phi_b, self.phi_a)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.z_a, self.z_b, self.phi_a, self.phi_b]
    }

    pub fn from_array(y: [f64; 4]) -> Self {
        Self::new(y[0], y[1], y[2], y[3])
    }
}

/// Time derivative of a [`State`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDerivative {
    pub dz_a: f64,
    pub dz_b: f64,
    pub dphi_a: f64,
    pub dphi_b: f64,
}

impl StateDerivative {
    pub fn to_array(&self) -> [f64; 4] {
        [self.dz_a, self.dz_b, self.dphi_a, self.dphi_b]
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// State-dependent tunnelling and interaction coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedCoefficients {
    pub k_a: f64,
    pub k_b: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
}

fn check_domain(z: f64, species: Species) -> Result<(), ModelError> {
    if z.abs() < 1.0 {
        Ok(())
    } else {
        Err(ModelError::Domain { species, z: z.abs() })
    }
}

pub fn dressed_coefficients(p: &ModelParams, s: &State) -> Result<DressedCoefficients, ModelError> {
    check_domain(s.z_a, Species::A)?;
    check_domain(s.z_b, Species::B)?;
    Ok(dressed_unchecked(p, s))
}

fn dressed_unchecked(p: &ModelParams, s: &State) -> DressedCoefficients {
    match p.tunneling {
        TunnelingVariant::Constant => DressedCoefficients {
            k_a: p.k_a,
            k_b: p.k_b,
            lambda_a: p.lambda_a,
            lambda_b: p.lambda_b,
        },
        TunnelingVariant::Variable => {
            let xa = (1.0 - s.z_a * s.z_a).sqrt() * s.phi_a.cos();
            let xb = (1.0 - s.z_b * s.z_b).sqrt() * s.phi_b.cos();
            DressedCoefficients {
                k_a: p.k_a - 2.0 * p.f_a * p.c_a * xa + p.f_b * p.d_ab * xb,
                k_b: p.k_b - 2.0 * p.f_b * p.c_b * xb + p.f_a * p.d_ab * xa,
                lambda_a: p.lambda_a + p.c_a,
                lambda_b: p.lambda_b + p.c_b,
            }
        }
    }
}

/// Right-hand side of the two-mode equations.
pub fn eval_rhs(p: &ModelParams, s: &State) -> Result<StateDerivative, ModelError> {
    check_domain(s.z_a, Species::A)?;
    check_domain(s.z_b, Species::B)?;
    Ok(rhs_unchecked(p, s))
}

/// Caller guarantees `|Z_l| < 1`.
pub(crate) fn rhs_unchecked(p: &ModelParams, s: &State) -> StateDerivative {
    let d = dressed_unchecked(p, s);
    let ra = (1.0 - s.z_a * s.z_a).sqrt();
    let rb = (1.0 - s.z_b * s.z_b).sqrt();
    let (sin_a, cos_a) = s.phi_a.sin_cos();
    let (sin_b, cos_b) = s.phi_b.sin_cos();
    StateDerivative {
        dz_a: -d.k_a * ra * sin_a,
        dz_b: -d.k_b * rb * sin_b,
        dphi_a: d.lambda_a * p.f_a * s.z_a + p.lambda_ab * p.f_b * s.z_b + d.k_a * s.z_a / ra * cos_a,
        dphi_b: d.lambda_b * p.f_b * s.z_b + p.lambda_ab * p.f_a * s.z_a + d.k_b * s.z_b / rb * cos_b,
    }
}

/// Conserved energy of the two-mode flow.
///
/// With `f_a = f_b = 1/2` and no overlap corrections this is
/// `1/2 [f Lambda Z_a^2 + f Lambda Z_b^2 + 2 f Lambda_ab Z_a Z_b] - sum K_l sqrt(1 - Z_l^2) cos phi_l`.
/// The population weights make it an exact integral of [`eval_rhs`] for
/// either tunnelling variant and any population split.
pub fn hamiltonian(p: &ModelParams, s: &State) -> Result<f64, ModelError> {
    check_domain(s.z_a, Species::A)?;
    check_domain(s.z_b, Species::B)?;
    Ok(hamiltonian_unchecked(p, s))
}

pub(crate) fn hamiltonian_unchecked(p: &ModelParams, s: &State) -> f64 {
    let spins = spin_map(s);
    energy_in_spin_variables(p, &spins)
}

fn energy_in_spin_variables(p: &ModelParams, sp: &SpinPair) -> f64 {
    let (c_a, c_b, d_ab) = p.active_overlaps();
    let species = |f: f64, k: f64, lambda: f64, c: f64, s: &Spin| {
        f * f * (lambda + c) * s.z * s.z + 2.0 * f * f * c * s.x * s.x - 2.0 * f * k * s.x
    };
    let interspecies = 2.0 * p.f_a * p.f_b * (p.lambda_ab * sp.a.z * sp.b.z - d_ab * sp.a.x * sp.b.x);
    species(p.f_a, p.k_a, p.lambda_a, c_a, &sp.a) + species(p.f_b, p.k_b, p.lambda_b, c_b, &sp.b) + interspecies
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spin {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Spin {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinPair {
    pub a: Spin,
    pub b: Spin,
}

fn single_spin(z: f64, phi: f64) -> Spin {
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (sin, cos) = phi.sin_cos();
    Spin { x: r * cos, y: r * sin, z }
}

/// Classical-spin representation: each species is a point on the unit sphere.
pub fn spin_map(s: &State) -> SpinPair {
    SpinPair {
        a: single_spin(s.z_a, s.phi_a),
        b: single_spin(s.z_b, s.phi_b),
    }
}

/// Energy written in spin components with bare couplings.
///
/// Agrees with [`hamiltonian`] on every state, so the two can be used
/// interchangeably. Overlap terms follow the configured variant.
pub fn spin_hamiltonian(p: &ModelParams, sp: &SpinPair) -> f64 {
    energy_in_spin_variables(p, sp)
}
