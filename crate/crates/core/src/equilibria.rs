//! Equilibria of the two-mode flow and their linear stability.
//!
//! Only equilibria with a common phase `phi_a = phi_b` in `{0, pi}` are
//! considered. Stability of every returned point is decided from the spectrum
//! of the 4x4 Jacobian; the closed-form normal-mode frequencies apply to the
//! trivial points `Z_a = Z_b = 0` only.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{dressed_coefficients, eval_rhs, rhs_unchecked, ModelError, ModelParams, State, TunnelingVariant};

/// Newton convergence threshold on the max-norm of the residual.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 200;
/// Roots closer than this (max-norm) are the same root.
pub const DEDUP_DISTANCE: f64 = 1e-8;
/// Default upper end of the coupling scan in [`critical_lambda`].
pub const DEFAULT_LAMBDA_MAX: f64 = 100.0;

const SCAN_POINTS: usize = 20_000;
const BISECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("symmetric parameters required: {0}")]
    SymmetryViolation(String),
    #[error("no stability transition for Lambda in (0, {lambda_max}]")]
    NoTransition { lambda_max: f64 },
    #[error("Newton iteration from seed ({}, {}) did not converge", seed.0, seed.1)]
    NoConvergence { seed: (f64, f64) },
}

/// Common equilibrium phase of both species.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMode {
    Zero,
    Pi,
}

impl PhaseMode {
    pub fn phase(self) -> f64 {
        match self {
            PhaseMode::Zero => 0.0,
            PhaseMode::Pi => PI,
        }
    }

    /// `cos(phi*)`, i.e. `(-1)^p`.
    pub fn parity(self) -> f64 {
        match self {
            PhaseMode::Zero => 1.0,
            PhaseMode::Pi => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Trivial,
    PlusMinus,
    MinusPlus,
    PlusPlus,
    MinusMinus,
    /// `|Z_a*| != |Z_b*|`: no permutation symmetry between the species.
    Asymmetric,
}

impl Branch {
    fn classify(z_a: f64, z_b: f64) -> Self {
        let scale = z_a.abs().max(z_b.abs());
        if scale < 1e-9 {
            return Branch::Trivial;
        }
        if (z_a.abs() - z_b.abs()).abs() > 1e-9 * scale.max(1.0) {
            return Branch::Asymmetric;
        }
        match (z_a >= 0.0, z_b >= 0.0) {
            (true, false) => Branch::PlusMinus,
            (false, true) => Branch::MinusPlus,
            (true, true) => Branch::PlusPlus,
            (false, false) => Branch::MinusMinus,
        }
    }
}

/// Small-oscillation frequencies of an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequencies {
    /// Two nonnegative angular frequencies, larger first.
    Stable([f64; 2]),
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub mode: PhaseMode,
    pub z_a: f64,
    pub z_b: f64,
    pub branch: Branch,
    /// Verdict from the Jacobian spectrum (purely imaginary means stable).
    pub stable: bool,
    pub frequencies: Frequencies,
    /// Max-norm of the equations of motion at the point.
    pub residual: f64,
}

impl FixedPoint {
    pub fn state(&self) -> State {
        let phi = self.mode.phase();
        State::new(self.z_a, self.z_b, phi, phi)
    }

    fn at(p: &ModelParams, mode: PhaseMode, z_a: f64, z_b: f64, branch: Branch) -> Result<Self, ModelError> {
        let phi = mode.phase();
        let s = State::new(z_a, z_b, phi, phi);
        let residual = eval_rhs(p, &s)?.max_abs();
        let (stable, frequencies) = linear_stability(p, &s)?;
        Ok(Self { mode, z_a, z_b, branch, stable, frequencies, residual })
    }
}

/// Normal-mode data of the trivial equilibrium of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub mode: PhaseMode,
    pub omega2_plus: f64,
    pub omega2_minus: f64,
    /// `sqrt(omega2_plus)` when nonnegative.
    pub omega_plus: Option<f64>,
    pub omega_minus: Option<f64>,
    /// Self-trapping criterion `f_a f_b Lambda_ab^2 >= Lambda*_a Lambda*_b`.
    pub mqst: bool,
    pub lambda_star_a: f64,
    pub lambda_star_b: f64,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.omega2_plus > 0.0 && self.omega2_minus > 0.0
    }
}

/// Jacobian of [`eval_rhs`] with respect to `(Z_a, Z_b, phi_a, phi_b)`.
///
/// Analytic for constant tunnelling, central differences otherwise.
pub fn jacobian(p: &ModelParams, s: &State) -> Result<Matrix4<f64>, ModelError> {
    eval_rhs(p, s)?;
    let constant = p.tunneling == TunnelingVariant::Constant || (p.c_a == 0.0 && p.c_b == 0.0 && p.d_ab == 0.0);
    if constant {
        let ra = (1.0 - s.z_a * s.z_a).sqrt();
        let rb = (1.0 - s.z_b * s.z_b).sqrt();
        let (sa, ca) = s.phi_a.sin_cos();
        let (sb, cb) = s.phi_b.sin_cos();
        #[rustfmt::skip]
        let j = Matrix4::new(
            p.k_a * s.z_a / ra * sa, 0.0, -p.k_a * ra * ca, 0.0,
            0.0, p.k_b * s.z_b / rb * sb, 0.0, -p.k_b * rb * cb,
            p.f_a * p.lambda_a + p.k_a * ca / (ra * ra * ra), p.f_b * p.lambda_ab, -p.k_a * s.z_a / ra * sa, 0.0,
            p.f_a * p.lambda_ab, p.f_b * p.lambda_b + p.k_b * cb / (rb * rb * rb), 0.0, -p.k_b * s.z_b / rb * sb,
        );
        return Ok(j);
    }
    let y = s.to_array();
    let mut j = Matrix4::zeros();
    for col in 0..4 {
        let h = if col < 2 { 1e-6 * (1.0 - y[col].abs()).min(1.0) } else { 1e-6 };
        let mut up = y;
        let mut dn = y;
        up[col] += h;
        dn[col] -= h;
        let fu = rhs_unchecked(p, &State::from_array(up)).to_array();
        let fd = rhs_unchecked(p, &State::from_array(dn)).to_array();
        for row in 0..4 {
            j[(row, col)] = (fu[row] - fd[row]) / (2.0 * h);
        }
    }
    Ok(j)
}

/// Stability verdict and frequencies from the Jacobian spectrum.
pub fn linear_stability(p: &ModelParams, s: &State) -> Result<(bool, Frequencies), ModelError> {
    let j = jacobian(p, s)?;
    let eig = j.complex_eigenvalues();
    let scale = eig.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let max_re = eig.iter().fold(0.0_f64, |m, z| m.max(z.re.abs()));
    if max_re > 1e-7 * (1.0 + scale) {
        return Ok((false, Frequencies::Unstable));
    }
    let mut im: Vec<f64> = eig.iter().map(|z| z.im.abs()).collect();
    im.sort_by(|a, b| b.total_cmp(a));
    Ok((true, Frequencies::Stable([im[0], im[2]])))
}

fn require_symmetric(p: &ModelParams) -> Result<(), EquilibriumError> {
    p.validate()?;
    if p.k_a != p.k_b || p.lambda_a != p.lambda_b || p.f_a != p.f_b {
        return Err(EquilibriumError::SymmetryViolation(format!(
            "need K_a = K_b, Lambda_a = Lambda_b, f_a = f_b (got K = ({}, {}), Lambda = ({}, {}), f = ({}, {}))",
            p.k_a, p.k_b, p.lambda_a, p.lambda_b, p.f_a, p.f_b
        )));
    }
    if p.tunneling == TunnelingVariant::Variable && (p.c_a != 0.0 || p.c_b != 0.0 || p.d_ab != 0.0) {
        return Err(EquilibriumError::SymmetryViolation(
            "closed-form equilibria assume constant tunnelling".into(),
        ));
    }
    Ok(())
}

/// Closed-form equilibria for symmetric parameters.
///
/// Always contains the trivial point. Each branch `Z_b* = s Z_a*` adds a pair
/// `+-Z` with `Z = sqrt(G^2 - 4K^2) / G` whenever
/// `G = -cos(phi*) (Lambda + s Lambda_ab) > 2K`. For repulsive couplings this
/// is the phase-separated zero-mode pair and the coexisting pi-mode pair.
pub fn symmetric_fixed_points(p: &ModelParams, mode: PhaseMode) -> Result<Vec<FixedPoint>, EquilibriumError> {
    require_symmetric(p)?;
    let k = p.k_a;
    let mut out = vec![FixedPoint::at(p, mode, 0.0, 0.0, Branch::Trivial)?];
    let branches = [
        (1.0, [(1.0, 1.0, Branch::PlusPlus), (-1.0, -1.0, Branch::MinusMinus)]),
        (-1.0, [(1.0, -1.0, Branch::PlusMinus), (-1.0, 1.0, Branch::MinusPlus)]),
    ];
    for (s, pair) in branches {
        let g = -mode.parity() * (p.lambda_a + s * p.lambda_ab);
        if g > 2.0 * k {
            let z = (g * g - 4.0 * k * k).sqrt() / g;
            for (sa, sb, branch) in pair {
                out.push(FixedPoint::at(p, mode, sa * z, sb * z, branch)?);
            }
        }
    }
    Ok(out)
}

/// Default Newton seeds: a 9x9 grid over `(-0.95, 0.95)^2`.
pub fn default_seed_grid() -> Vec<(f64, f64)> {
    seed_grid(9, 0.95)
}

pub fn seed_grid(n: usize, extent: f64) -> Vec<(f64, f64)> {
    let axis: Vec<f64> = if n == 1 {
        vec![0.0]
    } else {
        (0..n).map(|i| -extent + 2.0 * extent * i as f64 / (n - 1) as f64).collect()
    };
    axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).collect()
}

/// Roots found by [`numeric_fixed_points`] plus the seeds that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericRoots {
    pub roots: Vec<FixedPoint>,
    pub failures: Vec<EquilibriumError>,
}

fn phase_equations(p: &ModelParams, phi: f64, z: &Vector2<f64>) -> Vector2<f64> {
    let d = rhs_unchecked(p, &State::new(z[0], z[1], phi, phi));
    Vector2::new(d.dphi_a, d.dphi_b)
}

fn newton(p: &ModelParams, mode: PhaseMode, seed: (f64, f64)) -> Option<Vector2<f64>> {
    let phi = mode.phase();
    let mut z = Vector2::new(seed.0, seed.1);
    let mut f = phase_equations(p, phi, &z);
    for _ in 0..NEWTON_MAX_ITER {
        let norm = f.amax();
        if norm < NEWTON_TOL {
            return Some(z);
        }
        let j = jacobian(p, &State::new(z[0], z[1], phi, phi)).ok()?;
        let jz = Matrix2::new(j[(2, 0)], j[(2, 1)], j[(3, 0)], j[(3, 1)]);
        let step = jz.lu().solve(&(-f))?;
        let mut damping = 1.0;
        loop {
            let trial = z + step * damping;
            if trial[0].abs() < 1.0 && trial[1].abs() < 1.0 {
                let ft = phase_equations(p, phi, &trial);
                if ft.amax() < norm {
                    z = trial;
                    f = ft;
                    break;
                }
            }
            damping *= 0.5;
            if damping < 1e-12 {
                return None;
            }
        }
    }
    (f.amax() < NEWTON_TOL).then_some(z)
}

/// Equilibria of the general (asymmetric) problem by damped Newton from each
/// seed, deduplicated and sorted by `(Z_a, Z_b)`.
pub fn numeric_fixed_points(
    p: &ModelParams,
    mode: PhaseMode,
    seeds: &[(f64, f64)],
) -> Result<NumericRoots, EquilibriumError> {
    p.validate()?;
    let mut found: Vec<Vector2<f64>> = Vec::new();
    let mut failures = Vec::new();
    for &seed in seeds {
        if !(seed.0.abs() < 1.0 && seed.1.abs() < 1.0) {
            failures.push(EquilibriumError::NoConvergence { seed });
            continue;
        }
        match newton(p, mode, seed) {
            Some(z) => match found.iter_mut().find(|r| (**r - z).amax() <= DEDUP_DISTANCE) {
                // Keep whichever duplicate solves the equations better.
                Some(r) => {
                    if phase_equations(p, mode.phase(), &z).amax() < phase_equations(p, mode.phase(), r).amax() {
                        *r = z;
                    }
                }
                None => found.push(z),
            },
            None => failures.push(EquilibriumError::NoConvergence { seed }),
        }
    }
    found.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let roots = found
        .into_iter()
        .map(|z| {
            // Exact zeros keep the trivial root bit-identical to the closed form.
            let clean = |v: f64| if v.abs() < 1e-14 { 0.0 } else { v };
            let (za, zb) = (clean(z[0]), clean(z[1]));
            FixedPoint::at(p, mode, za, zb, Branch::classify(za, zb))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NumericRoots { roots, failures })
}

/// Closed-form small-oscillation frequencies about the trivial equilibrium.
///
/// With `Lambda*_l = (-1)^p K_l + f_l Lambda_l` the squared frequencies are
/// `(-1)^p [1/2 (K_a L*_a + K_b L*_b) +- 1/2 sqrt((K_a L*_a - K_b L*_b)^2 + 4 K_a K_b f_a f_b Lambda_ab^2)]`.
/// Under variable tunnelling the coefficients are dressed at the equilibrium.
pub fn normal_mode_frequencies(p: &ModelParams, mode: PhaseMode) -> Result<StabilityReport, EquilibriumError> {
    p.validate()?;
    let phi = mode.phase();
    let d = dressed_coefficients(p, &State::new(0.0, 0.0, phi, phi))?;
    let s = mode.parity();
    let ls_a = s * d.k_a + p.f_a * d.lambda_a;
    let ls_b = s * d.k_b + p.f_b * d.lambda_b;
    let ta = d.k_a * ls_a;
    let tb = d.k_b * ls_b;
    let root = ((ta - tb).powi(2) + 4.0 * d.k_a * d.k_b * p.f_a * p.f_b * p.lambda_ab.powi(2)).sqrt();
    let hi = 0.5 * (ta + tb) + 0.5 * root;
    let lo = 0.5 * (ta + tb) - 0.5 * root;
    let (omega2_plus, omega2_minus) = match mode {
        PhaseMode::Zero => (hi, lo),
        PhaseMode::Pi => (-lo, -hi),
    };
    let freq = |w2: f64| (w2 >= 0.0).then(|| w2.sqrt());
    Ok(StabilityReport {
        mode,
        omega2_plus,
        omega2_minus,
        omega_plus: freq(omega2_plus),
        omega_minus: freq(omega2_minus),
        mqst: p.f_a * p.f_b * p.lambda_ab * p.lambda_ab >= ls_a * ls_b,
        lambda_star_a: ls_a,
        lambda_star_b: ls_b,
    })
}

/// Smallest `Lambda > 0` at which the lower squared frequency of `mode`
/// crosses zero along `Lambda_a = Lambda_b = Lambda`, `Lambda_ab = ratio * Lambda`.
pub fn critical_lambda(
    template: &ModelParams,
    mode: PhaseMode,
    ratio: f64,
    lambda_max: f64,
) -> Result<f64, EquilibriumError> {
    require_symmetric(template)?;
    let at = |lambda: f64| -> Result<f64, EquilibriumError> {
        let p = ModelParams { lambda_a: lambda, lambda_b: lambda, lambda_ab: ratio * lambda, ..*template };
        Ok(normal_mode_frequencies(&p, mode)?.omega2_minus)
    };
    let mut lo = 0.0;
    let mut g_lo = at(lo)?;
    if g_lo <= 0.0 {
        return Err(EquilibriumError::NoTransition { lambda_max });
    }
    let mut bracket = None;
    for i in 1..=SCAN_POINTS {
        let x = lambda_max * i as f64 / SCAN_POINTS as f64;
        let g = at(x)?;
        if g <= 0.0 {
            bracket = Some((lo, x));
            break;
        }
        lo = x;
        g_lo = g;
    }
    let Some((mut a, mut b)) = bracket else {
        return Err(EquilibriumError::NoTransition { lambda_max });
    };
    debug_assert!(g_lo > 0.0);
    while b - a > BISECTION_TOL {
        let m = 0.5 * (a + b);
        if at(m)? > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Stability of the trivial equilibrium of `mode` over a `(Lambda_a, Lambda_b)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityGrid {
    pub lambda_a: Vec<f64>,
    pub lambda_b: Vec<f64>,
    /// `stable[i][j]` is the node `(lambda_a[i], lambda_b[j])`.
    pub stable: Vec<Vec<bool>>,
}

/// Per node: true iff both squared normal-mode frequencies are positive.
/// The tunnelling ratio sets `K_a = ratio * K_b`.
pub fn stability_region(
    template: &ModelParams,
    lambda_a: &[f64],
    lambda_b: &[f64],
    ratio: f64,
    mode: PhaseMode,
) -> Result<StabilityGrid, EquilibriumError> {
    let base = ModelParams { k_a: ratio * template.k_b, ..*template };
    base.validate()?;
    let stable = lambda_a
        .par_iter()
        .map(|&la| {
            lambda_b
                .iter()
                .map(|&lb| {
                    let p = ModelParams { lambda_a: la, lambda_b: lb, ..base };
                    normal_mode_frequencies(&p, mode).map(|r| r.is_stable())
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StabilityGrid { lambda_a: lambda_a.to_vec(), lambda_b: lambda_b.to_vec(), stable })
}
