//! Signal and ISI detection probabilities, QBER, and the COW key-rate chain
//! (raw → sifted → secret).

use serde::Serialize;

use crate::dispersion::TimingPoint;
use crate::link::{DetectorSpec, LinkScenario, ProtocolSpec};
use crate::noise::{afterpulse_prob, NoiseBudget};
use crate::phys::db_to_linear;
use crate::{ModelError, Result};

/// Everything that reaches Bob's detectors within one gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionBudget {
    pub p_mu: f64,
    pub noise: NoiseBudget,
    pub p_isi: f64,
    pub t_isi: f64,
    /// Pulse energy fraction leaking into one neighbouring gate.
    pub f_err: f64,
    pub t_f: f64,
    pub t_il: f64,
    pub t_b: f64,
    pub eta: f64,
    pub mu: f64,
    pub detector_count: u32,
    pub f_rep_ghz: f64,
    pub gate_ns: f64,
    pub pulse_fwhm_out_ps: f64,
}

impl DetectionBudget {
    /// Builds the budget for mean photon number `mu` at a timing point.
    /// `background` must come from [`NoiseBudget::background`] at the same gate.
    pub fn assemble(
        scenario: &LinkScenario,
        timing: &TimingPoint,
        background: NoiseBudget,
        mu: f64,
    ) -> Result<Self> {
        let det = &scenario.detector;
        let t_f = crate::phys::fiber_transmission(scenario.fiber.attenuation_db_per_km, scenario.length_km)?;
        let t_il = db_to_linear(scenario.wdm_insertion_loss_db());
        let t_b = db_to_linear(det.internal_loss_db);
        let eta = det.efficiency;
        let p_mu = signal_prob(mu, t_f, t_il, t_b, timing.t_isi, eta);
        let p_isi = isi_error_detection_prob(timing.f_err, mu, t_f, t_il, t_b, eta);
        let others = p_mu + background.total(det.detector_count) + p_isi;
        let p_ap = afterpulse_prob(det.afterpulse_ratio, others)?;
        Ok(DetectionBudget {
            p_mu,
            noise: background.with_afterpulses(p_ap),
            p_isi,
            t_isi: timing.t_isi,
            f_err: timing.f_err,
            t_f,
            t_il,
            t_b,
            eta,
            mu,
            detector_count: det.detector_count,
            f_rep_ghz: timing.f_rep_ghz,
            gate_ns: timing.gate_ns(),
            pulse_fwhm_out_ps: timing.output_fwhm_ps,
        })
    }

    /// Sum of all non-signal detection probabilities, ISI included.
    pub fn noise_total(&self) -> f64 {
        self.noise.total(self.detector_count) + self.p_isi
    }

    /// Total detection probability per gate.
    pub fn total(&self) -> f64 {
        self.p_mu + self.noise_total()
    }
}

/// Probability of an error click caused by both neighbouring pulses.
pub fn isi_error_detection_prob(f_err: f64, mu: f64, t_f: f64, t_il: f64, t_b: f64, eta: f64) -> f64 {
    2.0 * f_err * mu * t_f * t_il * t_b * eta
}

pub fn signal_prob(mu: f64, t_f: f64, t_il: f64, t_b: f64, t_isi: f64, eta: f64) -> f64 {
    mu * t_f * t_il * t_b * t_isi * eta
}

/// QBER of the COW protocol. Every noise click is a coin flip.
pub fn qber_cow(budget: &DetectionBudget, beta: f64, detector_count: u32) -> Result<f64> {
    let noise = detector_count as f64 * budget.noise.p_dc
        + budget.noise.p_ap
        + budget.noise.p_ram
        + budget.noise.p_lcxt
        + budget.p_isi;
    let denom = beta * budget.p_mu + noise;
    if !(denom > 0.0) {
        return Err(ModelError::UndefinedQber);
    }
    Ok(0.5 * noise / denom)
}

/// Binary Shannon entropy in bits.
pub fn shannon_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ModelError::invalid("p", p, "probability outside [0, 1]"));
    }
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}

/// Alice–Bob mutual information per sifted bit after error correction.
pub fn i_ab(qber: f64, ec_penalty: f64) -> Result<f64> {
    Ok(1.0 - ec_penalty * shannon_entropy(qber)?)
}

/// Eve's information per bit for COW: beam-splitting plus intercept-resend.
/// The intercept-resend exponent uses the mean photon number reaching Bob,
/// `μ·t_F`.
pub fn i_ae_cow(mu: f64, t_f: f64, visibility: f64) -> f64 {
    let mu_bob = mu * t_f;
    mu * (1.0 - t_f) + (1.0 - visibility) * (1.0 + (-mu_bob).exp()) / (2.0 * (-mu_bob).exp())
}

/// Fraction of clicks surviving detector dead time, `1/(1 + R·τ/N_d)` with
/// `R` the click rate before dead-time losses.
pub fn dead_time_factor(total_prob: f64, f_rep_ghz: f64, duty: f64, dead_time_us: f64, detector_count: u32) -> f64 {
    let click_rate_hz = total_prob * f_rep_ghz * 1e9 * duty;
    1.0 / (1.0 + click_rate_hz * dead_time_us * 1e-6 / detector_count as f64)
}

/// Why a secret key rate was forced to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateClamp {
    /// QBER above the error-correction limit.
    QberAboveThreshold,
    /// Eve knows at least as much as Bob.
    NoSecrecy,
    /// Nothing is detected at all.
    NoDetections,
}

/// Key rates of one operating point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyRateReport {
    /// `None` when no detection probability is left to define it.
    pub qber: Option<f64>,
    pub r_raw: f64,
    pub r_sift: f64,
    pub r_sec: f64,
    /// `R_sift·(I_AB − I_AE)` before any clamping.
    pub r_sec_unclamped: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub eta_dead: f64,
    /// `None` when no photon number yields a positive key rate.
    pub mu_opt: Option<f64>,
    pub f_rep_ghz: f64,
    pub pulse_fwhm_out_ps: f64,
    pub clamp: Option<RateClamp>,
    pub budget: DetectionBudget,
}

/// Evaluates the key-rate chain for one detection budget.
pub fn key_rates(budget: &DetectionBudget, protocol: &ProtocolSpec, detector: &DetectorSpec) -> KeyRateReport {
    let total = budget.total();
    let eta_dead = dead_time_factor(
        total,
        budget.f_rep_ghz,
        protocol.duty,
        detector.dead_time_us,
        detector.detector_count,
    );
    let gates_per_s = budget.f_rep_ghz * 1e9 * protocol.duty * eta_dead;
    let r_raw = total * gates_per_s;
    let r_sift = 0.5 * (protocol.beta * budget.p_mu + budget.noise_total()) * gates_per_s;
    let i_ae = i_ae_cow(budget.mu, budget.t_f, protocol.visibility);

    let base = KeyRateReport {
        qber: None,
        r_raw,
        r_sift,
        r_sec: 0.0,
        r_sec_unclamped: 0.0,
        i_ab: 0.0,
        i_ae,
        eta_dead,
        mu_opt: Some(budget.mu),
        f_rep_ghz: budget.f_rep_ghz,
        pulse_fwhm_out_ps: budget.pulse_fwhm_out_ps,
        clamp: Some(RateClamp::NoDetections),
        budget: *budget,
    };
    let Ok(qber) = qber_cow(budget, protocol.beta, detector.detector_count) else {
        return base;
    };
    // qber ∈ [0, 0.5] by construction.
    let i_ab = i_ab(qber, protocol.ec_penalty).unwrap_or(f64::NAN);
    let r_sec_unclamped = r_sift * (i_ab - i_ae);
    let clamp = if qber > protocol.qber_threshold {
        Some(RateClamp::QberAboveThreshold)
    } else if i_ab <= i_ae {
        Some(RateClamp::NoSecrecy)
    } else {
        None
    };
    KeyRateReport {
        qber: Some(qber),
        r_sec: if clamp.is_none() { r_sec_unclamped } else { 0.0 },
        r_sec_unclamped,
        i_ab,
        clamp,
        ..base
    }
}
