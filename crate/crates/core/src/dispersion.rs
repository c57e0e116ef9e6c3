//! Gaussian pulse broadening and inter-symbol interference.
//!
//! Widths are intensity FWHM in ps, β₂ in ps²/km, lengths in km. β₂ carries
//! its sign (β₂ = −Dλ²/2πc), so a DCF with D < 0 undoes the GVD of a D > 0
//! transmission fiber.
//!
//! An unchirped Gaussian that has crossed several segments is again a
//! Gaussian whose width depends only on the accumulated GVD
//! `B = Σ β₂ᵢ Lᵢ`:
//!
//! ```text
//! τ(B) = τ_FWHM,0 · √(1 + (B / τ₀²)²),   τ₀ = τ_FWHM,0 / (2√ln2)
//! ```
//!
//! This is the single-segment broadening formula applied to each stage with
//! the chirp picked up in the previous stages, without tracking that chirp.

use std::f64::consts::{LN_2, PI};

use crate::link::LinkScenario;
use crate::phys::SPEED_OF_LIGHT_NM_PER_PS;
use crate::solve::bisect_boundary;
use crate::special::erfc;
use crate::{ModelError, Result};

/// Lower end of the repetition-rate search, GHz (1 MHz).
pub const MIN_REP_RATE_GHZ: f64 = 1e-3;
/// Absolute tolerance of the repetition-rate search, GHz.
pub const REP_RATE_TOL_GHZ: f64 = 1e-4;
const REP_RATE_MAX_ITER: usize = 200;

/// One homogeneous piece of fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub beta2_ps2_per_km: f64,
    pub length_km: f64,
}

impl Segment {
    pub fn new(beta2_ps2_per_km: f64, length_km: f64) -> Self {
        Segment {
            beta2_ps2_per_km,
            length_km,
        }
    }

    /// Group-delay dispersion of the whole segment, ps².
    pub fn gvd(&self) -> f64 {
        self.beta2_ps2_per_km * self.length_km
    }
}

/// A Gaussian pulse before and after propagation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseState {
    pub input_fwhm_ps: f64,
    pub input_chirp: f64,
    pub accumulated_gvd_ps2: f64,
    pub output_fwhm_ps: f64,
}

impl PulseState {
    /// Propagates an unchirped pulse through `segments` in order.
    pub fn propagate(input_fwhm_ps: f64, segments: &[Segment]) -> Result<Self> {
        check_width(input_fwhm_ps)?;
        let gvd: f64 = segments.iter().map(Segment::gvd).sum();
        Ok(PulseState {
            input_fwhm_ps,
            input_chirp: 0.0,
            accumulated_gvd_ps2: gvd,
            output_fwhm_ps: width_after_gvd(input_fwhm_ps, gvd),
        })
    }
}

fn check_width(fwhm_ps: f64) -> Result<()> {
    if fwhm_ps > 0.0 && fwhm_ps.is_finite() {
        Ok(())
    } else {
        Err(ModelError::invalid("fwhm_ps", fwhm_ps, "pulse width must be positive"))
    }
}

/// 1/e intensity half-width τ₀ of a Gaussian with the given FWHM.
pub fn half_width_1e(fwhm_ps: f64) -> f64 {
    fwhm_ps / (2.0 * LN_2.sqrt())
}

/// GVD coefficient β₂ in ps²/km from the dispersion parameter D in ps/(nm·km).
pub fn beta2_from_d(d_ps_nm_km: f64, wavelength_nm: f64) -> f64 {
    -d_ps_nm_km * wavelength_nm * wavelength_nm / (2.0 * PI * SPEED_OF_LIGHT_NM_PER_PS)
}

/// Dispersion length L_D in km; infinite for a dispersionless fiber.
pub fn dispersion_length(fwhm_ps: f64, beta2_ps2_per_km: f64) -> Result<f64> {
    check_width(fwhm_ps)?;
    if beta2_ps2_per_km == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(fwhm_ps * fwhm_ps / (4.0 * LN_2 * beta2_ps2_per_km.abs()))
}

/// Output-to-input FWHM ratio of a linearly chirped Gaussian after `length_km`.
pub fn broadening_ratio(fwhm_ps: f64, chirp: f64, beta2_ps2_per_km: f64, length_km: f64) -> f64 {
    let tau0 = half_width_1e(fwhm_ps);
    let b = beta2_ps2_per_km * length_km;
    let compression = 1.0 + chirp * b / (tau0 * tau0);
    let spread = b / (tau0 * tau0);
    (compression * compression + spread * spread).sqrt()
}

/// FWHM of an initially unchirped pulse after accumulated GVD `gvd_ps2`.
pub fn width_after_gvd(input_fwhm_ps: f64, gvd_ps2: f64) -> f64 {
    let tau0 = half_width_1e(input_fwhm_ps);
    input_fwhm_ps * (1.0 + (gvd_ps2 / (tau0 * tau0)).powi(2)).sqrt()
}

/// FWHM at distance `z_km` into the last of `segments`, the preceding ones
/// having been traversed completely.
pub fn pulse_width_at(input_fwhm_ps: f64, segments: &[Segment], z_km: f64) -> Result<f64> {
    check_width(input_fwhm_ps)?;
    let (last, done) = segments
        .split_last()
        .ok_or(ModelError::invalid("segments", 0.0, "at least one segment is required"))?;
    if !(z_km >= 0.0 && z_km <= last.length_km) {
        return Err(ModelError::PositionOutOfRange {
            z: z_km,
            length: last.length_km,
        });
    }
    let gvd = done.iter().map(Segment::gvd).sum::<f64>() + last.beta2_ps2_per_km * z_km;
    Ok(width_after_gvd(input_fwhm_ps, gvd))
}

/// Normalised Gaussian intensity profile with the given FWHM, 1/ps.
pub fn gaussian_intensity(t_ps: f64, fwhm_ps: f64) -> f64 {
    let ln2 = LN_2;
    2.0 * ln2.sqrt() / (PI.sqrt() * fwhm_ps) * (-4.0 * ln2 * (t_ps / fwhm_ps).powi(2)).exp()
}

/// Fraction of the pulse energy inside a centred gate.
pub fn t_isi(gate_ns: f64, fwhm_ps: f64) -> f64 {
    let x = LN_2.sqrt() * gate_ns * 1e3 / fwhm_ps;
    0.5 * (erfc(-x) - erfc(x))
}

/// Fraction of the pulse energy falling in the neighbouring gate one period
/// `period_ps` away.
pub fn f_err_isi_exact(period_ps: f64, gate_ps: f64, fwhm_ps: f64) -> f64 {
    let k = LN_2.sqrt() / fwhm_ps;
    0.5 * (erfc(k * (2.0 * period_ps - gate_ps)) - erfc(k * (2.0 * period_ps + gate_ps)))
}

/// Leading-term approximation of [`f_err_isi_exact`], written in terms of
/// the repetition rate.
pub fn f_err_isi_approx(f_rep_ghz: f64, gate_ps: f64, fwhm_ps: f64) -> Result<f64> {
    let double_period_ps = 2e3 / f_rep_ghz;
    if !(double_period_ps > gate_ps) {
        return Err(ModelError::invalid(
            "gate_ps",
            gate_ps,
            "gate must be shorter than two bit periods",
        ));
    }
    Ok(0.5 * erfc(LN_2.sqrt() / fwhm_ps * (double_period_ps - gate_ps)))
}

/// Timing quantities of a scenario at one repetition rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingPoint {
    pub f_rep_ghz: f64,
    pub period_ps: f64,
    pub gate_ps: f64,
    pub input_fwhm_ps: f64,
    pub output_fwhm_ps: f64,
    /// In-gate energy fraction.
    pub t_isi: f64,
    /// Energy fraction leaking into one neighbouring gate.
    pub f_err: f64,
}

impl TimingPoint {
    pub fn new(scenario: &LinkScenario, f_rep_ghz: f64) -> Self {
        let p = &scenario.protocol;
        let period_ps = 1e3 / f_rep_ghz;
        let gate_ps = p.gate_fraction * period_ps;
        let input_fwhm_ps = p.pulse_fraction * period_ps;
        let output_fwhm_ps = width_after_gvd(input_fwhm_ps, scenario.accumulated_gvd());
        TimingPoint {
            f_rep_ghz,
            period_ps,
            gate_ps,
            input_fwhm_ps,
            output_fwhm_ps,
            t_isi: t_isi(gate_ps * 1e-3, output_fwhm_ps),
            f_err: f_err_isi_exact(period_ps, gate_ps, output_fwhm_ps),
        }
    }

    pub fn gate_ns(&self) -> f64 {
        self.gate_ps * 1e-3
    }
}

/// ISI overlap of `scenario` at `f_rep_ghz` under the leading-term formula.
fn isi_overlap_at(scenario: &LinkScenario, gvd: f64, f_rep_ghz: f64) -> f64 {
    let p = &scenario.protocol;
    let period_ps = 1e3 / f_rep_ghz;
    let width = width_after_gvd(p.pulse_fraction * period_ps, gvd);
    // gate_fraction ≤ 1 keeps the gate inside two periods.
    f_err_isi_approx(f_rep_ghz, p.gate_fraction * period_ps, width).unwrap_or(1.0)
}

/// Highest repetition rate (GHz, capped) whose ISI overlap stays within the
/// protocol's target, with pulse width and gate scaling with the period.
///
/// The overlap grows monotonically with the rate: a higher rate means a
/// shorter input pulse, which spreads more, and a shorter guard interval.
pub fn max_rep_rate(scenario: &LinkScenario) -> f64 {
    let cap = scenario.protocol.rep_rate_cap_ghz;
    let target = scenario.protocol.isi_error_target;
    let gvd = scenario.accumulated_gvd();
    let ok = |f: f64| isi_overlap_at(scenario, gvd, f) <= target;
    if ok(cap) {
        return cap;
    }
    if !ok(MIN_REP_RATE_GHZ) {
        return MIN_REP_RATE_GHZ;
    }
    bisect_boundary(ok, MIN_REP_RATE_GHZ, cap, REP_RATE_TOL_GHZ, REP_RATE_MAX_ITER).x
}
