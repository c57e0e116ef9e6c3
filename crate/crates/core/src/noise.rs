//! Background detection probabilities per gate: Raman scattering from the
//! classical channels, linear crosstalk, dark counts and after-pulses.
//!
//! All powers are in watts and refer to the classical channel power leaving
//! the fiber, which is pinned to the classical receiver sensitivity plus the
//! WDM insertion loss.

use serde::Serialize;

use crate::link::LinkScenario;
use crate::phys::{attenuation_per_km, db_to_linear, dbm_to_watts, photon_energy};
use crate::{ModelError, Result};

/// Per-gate noise probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct NoiseBudget {
    pub p_ram_f: f64,
    pub p_ram_b: f64,
    pub p_ram: f64,
    pub p_lcxt: f64,
    /// Dark-count probability of a single detector.
    pub p_dc: f64,
    pub p_ap: f64,
}

impl NoiseBudget {
    /// Everything except after-pulses, which depend on the signal level.
    pub fn background(scenario: &LinkScenario, gate_ns: f64) -> Self {
        let det = &scenario.detector;
        let lambda = scenario.wavelength_nm();
        let p_dc = dark_count_prob(det.dark_count_rate_per_ns, gate_ns);
        let Some(cl) = &scenario.classical else {
            return NoiseBudget {
                p_dc,
                ..Default::default()
            };
        };
        let p_out = launch_power(cl.receiver_sensitivity_dbm, cl.wdm_insertion_loss_db);
        let (ram_f, ram_b) = raman_powers(
            p_out,
            cl.forward_count,
            cl.backward_count,
            scenario.fiber.attenuation_db_per_km,
            scenario.length_km,
            cl.raman_cross_section,
            cl.receiver_bandwidth_nm,
        );
        let p_ram_f = detection_prob_from_power(ram_f, lambda, det.efficiency, gate_ns);
        let p_ram_b = detection_prob_from_power(ram_b, lambda, det.efficiency, gate_ns);
        NoiseBudget {
            p_ram_f,
            p_ram_b,
            p_ram: p_ram_f + p_ram_b,
            p_lcxt: lcxt_prob(
                p_out,
                cl.forward_count,
                cl.isolation_nonadjacent_db,
                lambda,
                det.efficiency,
                gate_ns,
            ),
            p_dc,
            p_ap: 0.0,
        }
    }

    pub fn with_afterpulses(self, p_ap: f64) -> Self {
        NoiseBudget { p_ap, ..self }
    }

    /// `N_d·P_dc + P_AP + P_ram + P_LCXT`.
    pub fn total(&self, detector_count: u32) -> f64 {
        detector_count as f64 * self.p_dc + self.p_ap + self.p_ram + self.p_lcxt
    }

    /// Checks that every entry is a probability below one.
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_ram_f", self.p_ram_f),
            ("p_ram_b", self.p_ram_b),
            ("p_ram", self.p_ram),
            ("p_lcxt", self.p_lcxt),
            ("p_dc", self.p_dc),
            ("p_ap", self.p_ap),
        ] {
            if !(0.0..1.0).contains(&p) {
                return Err(ModelError::invalid(name, p, "noise probability outside [0, 1)"));
            }
        }
        Ok(())
    }
}

/// Classical channel power at the fiber output, W.
pub fn launch_power(receiver_sensitivity_dbm: f64, insertion_loss_db: f64) -> f64 {
    dbm_to_watts(receiver_sensitivity_dbm + insertion_loss_db)
}

/// `sinh(αL)/α` in km, with the series form near zero.
fn sinh_over_alpha(alpha_per_km: f64, length_km: f64) -> f64 {
    let x = alpha_per_km * length_km;
    if x.abs() < 1e-6 {
        length_km * (1.0 + x * x / 6.0)
    } else {
        x.sinh() / alpha_per_km
    }
}

/// Forward and backward spontaneous Raman power within the quantum receiver
/// bandwidth, W.
pub fn raman_powers(
    p_out_w: f64,
    forward_count: u32,
    backward_count: u32,
    alpha_db_per_km: f64,
    length_km: f64,
    raman_cross_section: f64,
    bandwidth_nm: f64,
) -> (f64, f64) {
    let per_channel = p_out_w * raman_cross_section * bandwidth_nm;
    let alpha = attenuation_per_km(alpha_db_per_km);
    let forward = forward_count as f64 * per_channel * length_km;
    let backward = backward_count as f64 * per_channel * sinh_over_alpha(alpha, length_km);
    (forward, backward)
}

/// Detection probability per gate for a continuous optical power at the
/// receiver.
///
/// Values at or above one mean the linear model no longer holds; they are
/// returned unchanged and rejected later by [`NoiseBudget::validate`].
pub fn detection_prob_from_power(power_w: f64, wavelength_nm: f64, efficiency: f64, gate_ns: f64) -> f64 {
    power_w / photon_energy(wavelength_nm) * efficiency * gate_ns * 1e-9
}

/// Linear crosstalk detection probability. Only co-propagating channels reach
/// the quantum demultiplexer port; the quantum channel sits at least two
/// channel spacings away, so the non-adjacent isolation applies.
pub fn lcxt_prob(
    p_out_w: f64,
    forward_count: u32,
    isolation_nonadjacent_db: f64,
    wavelength_nm: f64,
    efficiency: f64,
    gate_ns: f64,
) -> f64 {
    let leak = forward_count as f64 * p_out_w * db_to_linear(isolation_nonadjacent_db);
    detection_prob_from_power(leak, wavelength_nm, efficiency, gate_ns)
}

pub fn dark_count_prob(rate_per_ns: f64, gate_ns: f64) -> f64 {
    rate_per_ns * gate_ns
}

/// After-pulse probability such that after-pulses make up exactly the
/// fraction `ratio` of all detections.
pub fn afterpulse_prob(ratio: f64, other_probs_sum: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(ModelError::invalid("afterpulse_ratio", ratio, "must lie in [0, 1)"));
    }
    Ok(ratio / (1.0 - ratio) * other_probs_sum)
}
