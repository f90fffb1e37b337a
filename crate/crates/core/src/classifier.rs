//! Regime labels from time averages, correlations and phase growth, plus
//! spectral peak extraction and one-dimensional transition scans.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibria::{normal_mode_frequencies, PhaseMode};
use crate::integrator::{integrate, IntegrateError, IntegratorConfig, Trajectory};
use crate::model::{ModelParams, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseClass {
    ZeroPhase,
    PiPhase,
    RunningPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trapping {
    Oscillatory,
    #[serde(rename = "MQST_Separated")]
    MqstSeparated,
    #[serde(rename = "MQST_Coexisting")]
    MqstCoexisting,
    #[serde(rename = "Swapping_Avoiding")]
    SwappingAvoiding,
    #[serde(rename = "Swapping_Chasing")]
    SwappingChasing,
}

impl Trapping {
    pub fn is_mqst(self) -> bool {
        matches!(self, Self::MqstSeparated | Self::MqstCoexisting)
    }

    pub fn is_swapping(self) -> bool {
        matches!(self, Self::SwappingAvoiding | Self::SwappingChasing)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Oscillatory => "Oscillatory",
            Self::MqstSeparated => "MQST_Separated",
            Self::MqstCoexisting => "MQST_Coexisting",
            Self::SwappingAvoiding => "Swapping_Avoiding",
            Self::SwappingChasing => "Swapping_Chasing",
        }
    }
}

impl std::fmt::Display for Trapping {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Thresholds are relative: `trap_fraction` multiplies the peak `|Z_l|` in
/// the analysis window and `corr_fraction` multiplies `rms Z_a · rms Z_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub min_duration: f64,
    pub transient_fraction: f64,
    pub trap_fraction: f64,
    pub corr_fraction: f64,
    pub phi_tol: f64,
    pub slope_threshold: f64,
    pub min_r_squared: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            min_duration: 100.0,
            transient_fraction: 0.1,
            trap_fraction: 0.1,
            corr_fraction: 0.2,
            phi_tol: 0.3,
            slope_threshold: 0.05,
            min_r_squared: 0.99,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<(), ClassifyError> {
        let ok = self.min_duration >= 0.0
            && (0.0..1.0).contains(&self.transient_fraction)
            && self.trap_fraction > 0.0
            && self.corr_fraction > 0.0
            && self.phi_tol > 0.0
            && self.phi_tol < PI / 2.0
            && self.slope_threshold > 0.0
            && (0.0..=1.0).contains(&self.min_r_squared);
        if ok {
            Ok(())
        } else {
            Err(ClassifyError::InvalidConfig(format!("{self:?}")))
        }
    }
}

/// Per-species statistics over the analysis window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeciesStats {
    pub mean_z: f64,
    pub peak_z: f64,
    pub rms_z: f64,
    /// Circular mean of the phase, in `(-π, π]`.
    pub mean_phase: f64,
    /// Least-squares slope of the unwrapped phase.
    pub phase_slope: f64,
    pub slope_r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeLabel {
    pub phase_class_a: PhaseClass,
    pub phase_class_b: PhaseClass,
    pub trapping: Trapping,
    pub mean_z_a: f64,
    pub mean_z_b: f64,
    pub corr_zz: f64,
    pub phase_slopes: [f64; 2],
    pub trap_thresholds: [f64; 2],
    pub corr_threshold: f64,
}

impl RegimeLabel {
    /// The common phase class, if both species agree.
    pub fn phase_class(&self) -> Option<PhaseClass> {
        (self.phase_class_a == self.phase_class_b).then_some(self.phase_class_a)
    }
}

/// Signed distances `|value| - threshold` for the comparisons that decided
/// (or failed to decide) a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub trap_a: f64,
    pub trap_b: f64,
    pub corr: f64,
    pub phase_a: Option<PhaseMargins>,
    pub phase_b: Option<PhaseMargins>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMargins {
    pub mean_phase: f64,
    pub slope: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("invalid classifier configuration: {0}")]
    InvalidConfig(String),
    #[error("trajectory too short: duration {duration} < {min_duration}")]
    TooShort { duration: f64, min_duration: f64 },
    #[error("ambiguous regime ({reason}); margins {margins:?}")]
    Ambiguous { reason: String, margins: Box<Margins> },
}

/// Labels a trajectory. See [`classify_samples`].
pub fn classify(traj: &Trajectory, cfg: &ClassifierConfig) -> Result<RegimeLabel, ClassifyError> {
    classify_samples(&traj.times, &traj.states, Some(&traj.params), cfg)
}

/// Labels sampled states after discarding the leading transient.
///
/// Trapping needs both `|⟨Z_l⟩|` above threshold (sign of the product picks
/// separated or coexisting); swapping needs both below and `|⟨Z_a Z_b⟩|`
/// above the correlation threshold. One mean above and one below is
/// reported as ambiguous.
///
/// With `params` given, correlated zero-mean motion about a phase-locked
/// equilibrium that is linearly stable is a Josephson oscillation, not
/// swapping, and is labelled `Oscillatory`.
pub fn classify_samples(
    times: &[f64],
    states: &[State],
    params: Option<&ModelParams>,
    cfg: &ClassifierConfig,
) -> Result<RegimeLabel, ClassifyError> {
    cfg.validate()?;
    if times.len() != states.len() {
        return Err(ClassifyError::InvalidConfig("times and states differ in length".into()));
    }
    let duration = match (times.first(), times.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    };
    if duration < cfg.min_duration || times.len() < 3 {
        return Err(ClassifyError::TooShort {
            duration,
            min_duration: cfg.min_duration,
        });
    }
    let cut = times[0] + cfg.transient_fraction * duration;
    let start = times.partition_point(|&t| t < cut).min(times.len() - 3);
    let t = &times[start..];
    let s = &states[start..];

    let za: Vec<f64> = s.iter().map(|s| s.z_a).collect();
    let zb: Vec<f64> = s.iter().map(|s| s.z_b).collect();
    let pa: Vec<f64> = s.iter().map(|s| s.phi_a).collect();
    let pb: Vec<f64> = s.iter().map(|s| s.phi_b).collect();
    let a = species_stats(t, &za, &pa);
    let b = species_stats(t, &zb, &pb);
    let corr_zz = mean(za.iter().zip(&zb).map(|(x, y)| x * y), za.len());

    let trap_a = cfg.trap_fraction * a.peak_z;
    let trap_b = cfg.trap_fraction * b.peak_z;
    let corr_threshold = cfg.corr_fraction * a.rms_z * b.rms_z;

    let phase_a = phase_class(&a, cfg);
    let phase_b = phase_class(&b, cfg);
    let margins = || Margins {
        trap_a: a.mean_z.abs() - trap_a,
        trap_b: b.mean_z.abs() - trap_b,
        corr: corr_zz.abs() - corr_threshold,
        phase_a: Some(phase_margins(&a, cfg)),
        phase_b: Some(phase_margins(&b, cfg)),
    };

    let above_a = a.mean_z.abs() > trap_a;
    let above_b = b.mean_z.abs() > trap_b;
    let trapping = match (above_a, above_b) {
        (true, true) if a.mean_z * b.mean_z < 0.0 => Trapping::MqstSeparated,
        (true, true) => Trapping::MqstCoexisting,
        (false, false) if corr_zz < -corr_threshold => Trapping::SwappingAvoiding,
        (false, false) if corr_zz > corr_threshold => Trapping::SwappingChasing,
        (false, false) => Trapping::Oscillatory,
        _ => {
            return Err(ClassifyError::Ambiguous {
                reason: "one species is above the trapping threshold and the other below".into(),
                margins: Box::new(margins()),
            })
        }
    };
    let (Some(phase_class_a), Some(phase_class_b)) = (phase_a, phase_b) else {
        return Err(ClassifyError::Ambiguous {
            reason: "phase is neither locked near 0 or pi nor running linearly".into(),
            margins: Box::new(margins()),
        });
    };
    let trapping = match (trapping.is_swapping(), params) {
        (true, Some(p)) if reference_is_stable(p, phase_class_a, phase_class_b) => Trapping::Oscillatory,
        _ => trapping,
    };

    Ok(RegimeLabel {
        phase_class_a,
        phase_class_b,
        trapping,
        mean_z_a: a.mean_z,
        mean_z_b: b.mean_z,
        corr_zz,
        phase_slopes: [a.phase_slope, b.phase_slope],
        trap_thresholds: [trap_a, trap_b],
        corr_threshold,
    })
}

/// Window statistics of one species.
pub fn species_stats(t: &[f64], z: &[f64], phi: &[f64]) -> SpeciesStats {
    let n = z.len();
    let mean_z = mean(z.iter().copied(), n);
    let peak_z = z.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rms_z = mean(z.iter().map(|v| v * v), n).sqrt();
    let (sin, cos) = phi.iter().fold((0.0, 0.0), |(s, c), p| (s + p.sin(), c + p.cos()));
    let mean_phase = sin.atan2(cos);
    let unwrapped = unwrap(phi);
    let (phase_slope, slope_r_squared) = linear_fit(t, &unwrapped);
    SpeciesStats {
        mean_z,
        peak_z,
        rms_z,
        mean_phase,
        phase_slope,
        slope_r_squared,
    }
}

fn reference_is_stable(p: &ModelParams, a: PhaseClass, b: PhaseClass) -> bool {
    let mode = match (a, b) {
        (PhaseClass::ZeroPhase, PhaseClass::ZeroPhase) => PhaseMode::Zero,
        (PhaseClass::PiPhase, PhaseClass::PiPhase) => PhaseMode::Pi,
        _ => return false,
    };
    normal_mode_frequencies(p, mode).is_ok_and(|r| r.is_stable())
}

fn phase_class(s: &SpeciesStats, cfg: &ClassifierConfig) -> Option<PhaseClass> {
    let running = s.phase_slope.abs() > cfg.slope_threshold;
    if running {
        return (s.slope_r_squared > cfg.min_r_squared).then_some(PhaseClass::RunningPhase);
    }
    if s.mean_phase.abs() < cfg.phi_tol {
        Some(PhaseClass::ZeroPhase)
    } else if PI - s.mean_phase.abs() < cfg.phi_tol {
        Some(PhaseClass::PiPhase)
    } else {
        None
    }
}

fn phase_margins(s: &SpeciesStats, cfg: &ClassifierConfig) -> PhaseMargins {
    let from_lock = s.mean_phase.abs().min(PI - s.mean_phase.abs());
    PhaseMargins {
        mean_phase: cfg.phi_tol - from_lock,
        slope: s.phase_slope.abs() - cfg.slope_threshold,
        r_squared: s.slope_r_squared - cfg.min_r_squared,
    }
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

/// Removes `2π` jumps between consecutive samples.
pub fn unwrap(phi: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phi.len());
    let mut offset = 0.0;
    for (i, &p) in phi.iter().enumerate() {
        if i > 0 {
            let d = p - phi[i - 1];
            offset -= 2.0 * PI * (d / (2.0 * PI)).round();
        }
        out.push(p + offset);
    }
    out
}

/// Least-squares slope and coefficient of determination.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return (0.0, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 0.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// A spectral peak as an angular frequency with its window-normalized
/// amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPeak {
    pub omega: f64,
    pub amplitude: f64,
}

/// Strongest local maxima of the Hann-windowed, zero-padded spectrum of a
/// uniformly sampled signal, sorted by decreasing amplitude. Peak positions
/// are refined by parabolic interpolation of the log magnitude.
pub fn spectral_peaks(signal: &[f64], dt: f64, max_peaks: usize) -> Vec<SpectralPeak> {
    let n = signal.len();
    if n < 4 || dt <= 0.0 || max_peaks == 0 {
        return Vec::new();
    }
    let avg = signal.iter().sum::<f64>() / n as f64;
    let padded = (8 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); padded];
    let mut wsum = 0.0;
    for (i, v) in signal.iter().enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
        wsum += w;
        buf[i] = Complex::new((v - avg) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
    let mag: Vec<f64> = buf[..padded / 2].iter().map(|c| c.norm() * 2.0 / wsum).collect();
    let d_omega = 2.0 * PI / (padded as f64 * dt);

    let mut peaks: Vec<SpectralPeak> = (1..mag.len() - 1)
        .filter(|&k| mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])
        .map(|k| {
            let (l, c, r) = (mag[k - 1].ln(), mag[k].ln(), mag[k + 1].ln());
            let denom = l - 2.0 * c + r;
            let shift = if denom != 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
            let shift = shift.clamp(-0.5, 0.5);
            SpectralPeak {
                omega: (k as f64 + shift) * d_omega,
                amplitude: (c - 0.25 * (l - r) * shift).exp(),
            }
        })
        .collect();
    peaks.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    peaks.truncate(max_peaks);
    peaks
}

/// Control parameter of a transition scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Control {
    /// Scales `Lambda_a`, `Lambda_b` and `Lambda_ab` together, keeping their
    /// ratios from the template.
    Lambda,
    /// Sets the initial imbalance amplitude of the family.
    InitialImbalance,
}

/// Initial states `(z·scale_a, z·scale_b, phi_a, phi_b)` parameterized by an
/// amplitude `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcFamily {
    pub z: f64,
    pub scale_a: f64,
    pub scale_b: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl IcFamily {
    pub fn state(&self, z: f64) -> State {
        State::new(z * self.scale_a, z * self.scale_b, self.phi_a, self.phi_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub grid_points: usize,
    pub tolerance: f64,
    pub integrator: IntegratorConfig,
    pub classifier: ClassifierConfig,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            grid_points: 21,
            tolerance: 1e-4,
            integrator: IntegratorConfig::default(),
            classifier: ClassifierConfig::default(),
        }
    }
}

/// Outcome of classifying one control value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScanLabel {
    Label(RegimeLabel),
    Ambiguous(String),
    Failed(String),
}

impl ScanLabel {
    pub fn trapping(&self) -> Option<Trapping> {
        match self {
            Self::Label(l) => Some(l.trapping),
            _ => None,
        }
    }

    fn side(&self) -> Option<Side> {
        match self.trapping() {
            Some(t) if t.is_mqst() => Some(Side::Trapped),
            Some(t) if t.is_swapping() => Some(Side::Swapping),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Trapped,
    Swapping,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Midpoint of the final bracket.
    pub value: f64,
    pub bracket: (f64, f64),
    pub below: Trapping,
    pub above: Trapping,
    /// Every grid value with its classification, in scan order.
    pub grid: Vec<(f64, ScanLabel)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("invalid scan: {0}")]
    InvalidScan(String),
    #[error("no self-trapping/swapping boundary in [{lo}, {hi}]")]
    NoTransition { lo: f64, hi: f64 },
}

/// Classifies one point of a scan.
pub fn scan_point(template: &ModelParams, family: &IcFamily, control: Control, value: f64, opts: &ScanOptions) -> ScanLabel {
    let (params, s0) = match control {
        Control::Lambda => (scale_lambda(template, value), family.state(family.z)),
        Control::InitialImbalance => (*template, family.state(value)),
    };
    match integrate(&params, &s0, &opts.integrator) {
        Ok(traj) => match classify(&traj, &opts.classifier) {
            Ok(l) => ScanLabel::Label(l),
            Err(ClassifyError::Ambiguous { reason, .. }) => ScanLabel::Ambiguous(reason),
            Err(e) => ScanLabel::Failed(e.to_string()),
        },
        Err(e @ IntegrateError::PoleApproach { .. }) => ScanLabel::Failed(e.to_string()),
        Err(e) => ScanLabel::Failed(e.to_string()),
    }
}

fn scale_lambda(template: &ModelParams, lambda: f64) -> ModelParams {
    let base = template.lambda_a;
    let mut p = *template;
    p.lambda_a = lambda;
    p.lambda_b = template.lambda_b / base * lambda;
    p.lambda_ab = template.lambda_ab / base * lambda;
    p
}

/// Locates a boundary between self-trapped and swapping labels along one
/// control parameter.
///
/// The grid is classified in parallel; the first adjacent pair of
/// classifiable points with trapped and swapping labels is then bisected
/// until the bracket is narrower than `opts.tolerance`. Bisection stops
/// early if a midpoint is neither trapped nor swapping.
pub fn swap_transition_scan(
    template: &ModelParams,
    family: &IcFamily,
    control: Control,
    range: (f64, f64),
    opts: &ScanOptions,
) -> Result<Transition, ScanError> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(ScanError::InvalidScan(format!("bad range [{lo}, {hi}]")));
    }
    if control == Control::Lambda && template.lambda_a == 0.0 {
        return Err(ScanError::InvalidScan("template Lambda_a must be nonzero to scale".into()));
    }
    if hi == lo || opts.grid_points < 2 {
        return Err(ScanError::NoTransition { lo, hi });
    }
    let n = opts.grid_points;
    let values: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let grid: Vec<(f64, ScanLabel)> = values
        .par_iter()
        .map(|&v| (v, scan_point(template, family, control, v, opts)))
        .collect();

    let classified: Vec<(f64, Side, Trapping)> = grid
        .iter()
        .filter_map(|(v, l)| l.side().map(|s| (*v, s, l.trapping().unwrap())))
        .collect();
    let Some(pair) = classified.windows(2).find(|w| w[0].1 != w[1].1) else {
        return Err(ScanError::NoTransition { lo, hi });
    };
    let (mut a, side_a, mut below) = pair[0];
    let (mut b, _, mut above) = pair[1];
    while b - a > opts.tolerance {
        let mid = 0.5 * (a + b);
        let label = scan_point(template, family, control, mid, opts);
        match label.side() {
            Some(s) if s == side_a => {
                a = mid;
                below = label.trapping().unwrap();
            }
            Some(_) => {
                b = mid;
                above = label.trapping().unwrap();
            }
            None => break,
        }
    }
    Ok(Transition {
        value: 0.5 * (a + b),
        bracket: (a, b),
        below,
        above,
        grid,
    })
}
