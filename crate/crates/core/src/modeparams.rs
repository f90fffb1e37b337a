//! Effective two-mode coefficients from gridded spatial modes.
//!
//! All overlap integrals use the composite trapezoid rule on the supplied
//! grid. A Richardson-style estimate compares each integral with the same
//! rule on every other node.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelParams, Species, TunnelingVariant};

/// Allowed deviation of `∫χ² dx` from one.
pub const NORM_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModeError {
    #[error("grid error: {0}")]
    Grid(String),
    #[error("mode chi_{species}_{mode} has norm {norm} (expected 1 within {tol})")]
    Normalization {
        species: Species,
        mode: &'static str,
        norm: f64,
        tol: f64,
    },
    #[error("modes of species {species} are not localized (left-well mass {left_mass})")]
    DegenerateModes { species: Species, left_mass: f64 },
}

/// Symmetric (`plus`) and antisymmetric (`minus`) stationary modes for both
/// species on a shared grid, together with the scalar inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialModes {
    pub x: Vec<f64>,
    pub chi_a_plus: Vec<f64>,
    pub chi_a_minus: Vec<f64>,
    pub chi_b_plus: Vec<f64>,
    pub chi_b_minus: Vec<f64>,
    pub gbar_a: f64,
    pub gbar_b: f64,
    pub gbar_ab: f64,
    pub delta_e_a: f64,
    pub delta_e_b: f64,
    pub f_a: f64,
    pub f_b: f64,
}

impl SpatialModes {
    /// Checks grid monotonicity, array lengths and normalization.
    pub fn validate(&self) -> Result<(), ModeError> {
        let n = self.x.len();
        if n < 3 {
            return Err(ModeError::Grid(format!("need at least 3 grid points, got {n}")));
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(ModeError::Grid("grid contains non-finite values".into()));
        }
        if let Some(i) = self.x.windows(2).position(|w| w[1] <= w[0]) {
            return Err(ModeError::Grid(format!(
                "grid is not strictly increasing at index {} ({} -> {})",
                i + 1,
                self.x[i],
                self.x[i + 1]
            )));
        }
        for (name, chi) in self.named_modes() {
            if chi.len() != n {
                return Err(ModeError::Grid(format!(
                    "chi_{name} has {} values but the grid has {n}",
                    chi.len()
                )));
            }
            if chi.iter().any(|v| !v.is_finite()) {
                return Err(ModeError::Grid(format!("chi_{name} contains non-finite values")));
            }
        }
        let scalars = [
            self.gbar_a,
            self.gbar_b,
            self.gbar_ab,
            self.delta_e_a,
            self.delta_e_b,
            self.f_a,
            self.f_b,
        ];
        if scalars.iter().any(|v| !v.is_finite()) {
            return Err(ModeError::Grid("scalar inputs must be finite".into()));
        }
        for (species, mode, chi) in self.species_modes() {
            // An all-zero species carries no atoms and is exempt.
            if chi.iter().all(|&v| v == 0.0) && self.species_is_empty(species) {
                continue;
            }
            let norm = trapezoid(&self.x, |i| chi[i] * chi[i]);
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(ModeError::Normalization {
                    species,
                    mode,
                    norm,
                    tol: NORM_TOL,
                });
            }
        }
        Ok(())
    }

    /// Largest `|∫χ_+ χ_- dx|` over both species.
    pub fn orthogonality_defect(&self) -> f64 {
        let a = trapezoid(&self.x, |i| self.chi_a_plus[i] * self.chi_a_minus[i]);
        let b = trapezoid(&self.x, |i| self.chi_b_plus[i] * self.chi_b_minus[i]);
        a.abs().max(b.abs())
    }

    /// Exchanges the roles of the two species.
    pub fn swapped(&self) -> Self {
        Self {
            x: self.x.clone(),
            chi_a_plus: self.chi_b_plus.clone(),
            chi_a_minus: self.chi_b_minus.clone(),
            chi_b_plus: self.chi_a_plus.clone(),
            chi_b_minus: self.chi_a_minus.clone(),
            gbar_a: self.gbar_b,
            gbar_b: self.gbar_a,
            gbar_ab: self.gbar_ab,
            delta_e_a: self.delta_e_b,
            delta_e_b: self.delta_e_a,
            f_a: self.f_b,
            f_b: self.f_a,
        }
    }

    fn named_modes(&self) -> [(&'static str, &[f64]); 4] {
        [
            ("a_plus", &self.chi_a_plus),
            ("a_minus", &self.chi_a_minus),
            ("b_plus", &self.chi_b_plus),
            ("b_minus", &self.chi_b_minus),
        ]
    }

    fn species_modes(&self) -> [(Species, &'static str, &[f64]); 4] {
        [
            (Species::A, "plus", &self.chi_a_plus),
            (Species::A, "minus", &self.chi_a_minus),
            (Species::B, "plus", &self.chi_b_plus),
            (Species::B, "minus", &self.chi_b_minus),
        ]
    }

    fn species_is_empty(&self, species: Species) -> bool {
        let (p, m) = match species {
            Species::A => (&self.chi_a_plus, &self.chi_a_minus),
            Species::B => (&self.chi_b_plus, &self.chi_b_minus),
        };
        p.iter().chain(m.iter()).all(|&v| v == 0.0)
    }
}

/// Effective coefficients of the two-mode equations (units with ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeParams {
    pub gamma_plus_a: f64,
    pub gamma_plus_b: f64,
    pub gamma_minus_a: f64,
    pub gamma_minus_b: f64,
    pub gammabar_a: f64,
    pub gammabar_b: f64,
    pub delta_gamma_a: f64,
    pub delta_gamma_b: f64,
    pub delta_gamma_ab: f64,
    pub delta_gammabar_ab: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub lambda_ab: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub c_a: f64,
    pub c_b: f64,
    pub d_ab: f64,
}

impl TwoModeParams {
    /// Model parameters with state-dependent tunnelling enabled.
    pub fn to_model_params(&self, f_a: f64, f_b: f64) -> ModelParams {
        ModelParams {
            f_a,
            f_b,
            k_a: self.k_a,
            k_b: self.k_b,
            lambda_a: self.lambda_a,
            lambda_b: self.lambda_b,
            lambda_ab: self.lambda_ab,
            c_a: self.c_a,
            c_b: self.c_b,
            d_ab: self.d_ab,
            tunneling: TunnelingVariant::Variable,
        }
    }
}

/// Per-species raw integrals (before multiplying by the coupling).
#[derive(Debug, Clone, Copy)]
struct SpeciesIntegrals {
    plus4: f64,
    minus4: f64,
    mixed: f64,
    lambda: f64,
}

fn species_integrals(x: &[f64], p: &[f64], m: &[f64]) -> SpeciesIntegrals {
    SpeciesIntegrals {
        plus4: trapezoid(x, |i| p[i].powi(4)),
        minus4: trapezoid(x, |i| m[i].powi(4)),
        mixed: trapezoid(x, |i| (p[i] * m[i]).powi(2)),
        lambda: trapezoid(x, |i| {
            let pm = p[i] * m[i];
            let diff = m[i] * m[i] - p[i] * p[i];
            2.0 * pm * pm - 0.25 * diff * diff
        }),
    }
}

/// Evaluates every overlap integral and assembles the model coefficients.
pub fn compute_two_mode_params(m: &SpatialModes) -> Result<TwoModeParams, ModeError> {
    m.validate()?;
    let x = &m.x;
    let (ap, am, bp, bm) = (&m.chi_a_plus, &m.chi_a_minus, &m.chi_b_plus, &m.chi_b_minus);

    let ia = species_integrals(x, ap, am);
    let ib = species_integrals(x, bp, bm);
    let cross_same = trapezoid(x, |i| (am[i] * bm[i]).powi(2) - (ap[i] * bp[i]).powi(2));
    let cross_mixed = trapezoid(x, |i| (am[i] * bp[i]).powi(2) - (ap[i] * bm[i]).powi(2));
    let cross_four = trapezoid(x, |i| ap[i] * am[i] * bp[i] * bm[i]);

    let gamma_plus_a = m.gbar_a * ia.plus4;
    let gamma_minus_a = m.gbar_a * ia.minus4;
    let gammabar_a = m.gbar_a * ia.mixed;
    let gamma_plus_b = m.gbar_b * ib.plus4;
    let gamma_minus_b = m.gbar_b * ib.minus4;
    let gammabar_b = m.gbar_b * ib.mixed;

    let delta_gamma_a = gamma_minus_a - gamma_plus_a;
    let delta_gamma_b = gamma_minus_b - gamma_plus_b;
    let delta_gamma_ab = m.gbar_ab * cross_same;
    let delta_gammabar_ab = m.gbar_ab * cross_mixed;

    let c_a = (gamma_plus_a + gamma_minus_a - 2.0 * gammabar_a) / 2.0;
    let c_b = (gamma_plus_b + gamma_minus_b - 2.0 * gammabar_b) / 2.0;
    let d_ab = (delta_gamma_ab - delta_gammabar_ab) / 2.0;

    Ok(TwoModeParams {
        gamma_plus_a,
        gamma_plus_b,
        gamma_minus_a,
        gamma_minus_b,
        gammabar_a,
        gammabar_b,
        delta_gamma_a,
        delta_gamma_b,
        delta_gamma_ab,
        delta_gammabar_ab,
        lambda_a: m.gbar_a * ia.lambda,
        lambda_b: m.gbar_b * ib.lambda,
        lambda_ab: 2.0 * m.gbar_ab * cross_four,
        k_a: m.delta_e_a - m.f_a * delta_gamma_a - m.f_b * d_ab,
        k_b: m.delta_e_b - m.f_b * delta_gamma_b - m.f_a * d_ab,
        c_a,
        c_b,
        d_ab,
    })
}

/// Largest Richardson error estimate `|T_h - T_2h| / 3` over the overlap
/// integrals used by [`compute_two_mode_params`].
pub fn quadrature_error_estimate(m: &SpatialModes) -> Result<f64, ModeError> {
    m.validate()?;
    let (ap, am, bp, bm) = (&m.chi_a_plus, &m.chi_a_minus, &m.chi_b_plus, &m.chi_b_minus);
    let integrands: [&dyn Fn(usize) -> f64; 11] = [
        &|i| ap[i].powi(4),
        &|i| am[i].powi(4),
        &|i| (ap[i] * am[i]).powi(2),
        &|i| 2.0 * (ap[i] * am[i]).powi(2) - 0.25 * (am[i] * am[i] - ap[i] * ap[i]).powi(2),
        &|i| bp[i].powi(4),
        &|i| bm[i].powi(4),
        &|i| (bp[i] * bm[i]).powi(2),
        &|i| 2.0 * (bp[i] * bm[i]).powi(2) - 0.25 * (bm[i] * bm[i] - bp[i] * bp[i]).powi(2),
        &|i| (am[i] * bm[i]).powi(2) - (ap[i] * bp[i]).powi(2),
        &|i| (am[i] * bp[i]).powi(2) - (ap[i] * bm[i]).powi(2),
        &|i| ap[i] * am[i] * bp[i] * bm[i],
    ];
    let coarse: Vec<usize> = coarse_nodes(m.x.len());
    Ok(integrands
        .iter()
        .map(|g| {
            let fine = trapezoid(&m.x, g);
            let rough = trapezoid_on(&m.x, &coarse, g);
            (fine - rough).abs() / 3.0
        })
        .fold(0.0, f64::max))
}

/// Localized modes `(χ_1, χ_2)` of one species; `χ_1` lives mostly left of
/// the median grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedPair {
    pub chi_1: Vec<f64>,
    pub chi_2: Vec<f64>,
    /// Fraction of `∫χ_1²` located left of the median.
    pub left_mass_1: f64,
    /// Fraction of `∫χ_2²` located right of the median.
    pub right_mass_2: f64,
}

/// Builds `(χ_+ ± χ_-)/√2` for each species and renormalizes numerically.
pub fn localized_modes(m: &SpatialModes) -> Result<[LocalizedPair; 2], ModeError> {
    m.validate()?;
    let a = localize(&m.x, &m.chi_a_plus, &m.chi_a_minus, Species::A)?;
    let b = localize(&m.x, &m.chi_b_plus, &m.chi_b_minus, Species::B)?;
    Ok([a, b])
}

fn localize(x: &[f64], p: &[f64], m: &[f64], species: Species) -> Result<LocalizedPair, ModeError> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut u: Vec<f64> = p.iter().zip(m).map(|(p, m)| (p + m) * s).collect();
    let mut v: Vec<f64> = p.iter().zip(m).map(|(p, m)| (p - m) * s).collect();
    normalize(x, &mut u);
    normalize(x, &mut v);
    let median = median(x);
    let left = |w: &[f64]| trapezoid(x, |i| if x[i] < median { w[i] * w[i] } else { 0.0 });
    let (mut lu, mut lv) = (left(&u), left(&v));
    if lv > lu {
        std::mem::swap(&mut u, &mut v);
        std::mem::swap(&mut lu, &mut lv);
    }
    // Equal halves (within rounding) mean the pair is not localized.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(lu >= 0.5 + NORM_TOL) {
        return Err(ModeError::DegenerateModes {
            species,
            left_mass: lu,
        });
    }
    Ok(LocalizedPair {
        chi_1: u,
        chi_2: v,
        left_mass_1: lu,
        right_mass_2: 1.0 - lv,
    })
}

fn normalize(x: &[f64], w: &mut [f64]) {
    let norm = trapezoid(x, |i| w[i] * w[i]);
    if norm > 0.0 {
        let scale = norm.sqrt().recip();
        w.iter_mut().for_each(|v| *v *= scale);
    }
}

fn median(x: &[f64]) -> f64 {
    let n = x.len();
    if n % 2 == 1 {
        x[n / 2]
    } else {
        0.5 * (x[n / 2 - 1] + x[n / 2])
    }
}

/// Composite trapezoid rule of `g(i)` over the nodes `x`.
pub fn trapezoid(x: &[f64], g: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut prev = g(0);
    for i in 1..x.len() {
        let cur = g(i);
        sum += 0.5 * (x[i] - x[i - 1]) * (prev + cur);
        prev = cur;
    }
    sum
}

fn trapezoid_on(x: &[f64], nodes: &[usize], g: impl Fn(usize) -> f64) -> f64 {
    nodes
        .windows(2)
        .map(|w| 0.5 * (x[w[1]] - x[w[0]]) * (g(w[0]) + g(w[1])))
        .sum()
}

fn coarse_nodes(n: usize) -> Vec<usize> {
    let mut nodes: Vec<usize> = (0..n).step_by(2).collect();
    if *nodes.last().unwrap() != n - 1 {
        nodes.push(n - 1);
    }
    nodes
}
