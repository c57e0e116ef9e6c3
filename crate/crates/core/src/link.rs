//! Scenario description: fiber, detector, classical channels, protocol.
//!
//! Every `Default` impl carries the model's reference parameter set (SNSPD
//! receiver, COW protocol, 100G PM-BPSK classical channels).

use serde::{Deserialize, Serialize};

use crate::dispersion::{beta2_from_d, Segment};
use crate::{ModelError, Result};

/// WDM insertion loss applied to the quantum path when the scenario carries
/// no classical-channel description.
pub const DEFAULT_WDM_INSERTION_LOSS_DB: f64 = 1.95;

/// A fiber family at the quantum reference wavelength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    pub label: String,
    pub attenuation_db_per_km: f64,
    /// Dispersion parameter D in ps/(nm·km).
    pub dispersion_ps_nm_km: f64,
}

impl FiberSpec {
    pub fn new(label: impl Into<String>, attenuation_db_per_km: f64, dispersion_ps_nm_km: f64) -> Result<Self> {
        let spec = FiberSpec {
            label: label.into(),
            attenuation_db_per_km,
            dispersion_ps_nm_km,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.attenuation_db_per_km > 0.0) || !self.attenuation_db_per_km.is_finite() {
            return Err(ModelError::invalid(
                "attenuation_db_per_km",
                self.attenuation_db_per_km,
                "must be positive and finite",
            ));
        }
        if !self.dispersion_ps_nm_km.is_finite() {
            return Err(ModelError::invalid(
                "dispersion_ps_nm_km",
                self.dispersion_ps_nm_km,
                "must be finite",
            ));
        }
        Ok(())
    }

    /// GVD coefficient β₂ (ps²/km) at `wavelength_nm`.
    pub fn beta2(&self, wavelength_nm: f64) -> f64 {
        beta2_from_d(self.dispersion_ps_nm_km, wavelength_nm)
    }

    /// Same fiber with a different dispersion; used for zero-CD comparisons.
    pub fn with_dispersion(&self, dispersion_ps_nm_km: f64) -> Self {
        FiberSpec {
            dispersion_ps_nm_km,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    /// Quantum detection efficiency η.
    pub efficiency: f64,
    /// Dark-count probability rate p'_dc in 1/ns.
    pub dark_count_rate_per_ns: f64,
    pub dead_time_us: f64,
    /// Fraction of all detections that are after-pulses.
    pub afterpulse_ratio: f64,
    pub detector_count: u32,
    /// Loss of Bob's internal components, t_B.
    pub internal_loss_db: f64,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        DetectorSpec {
            efficiency: 0.014,
            dark_count_rate_per_ns: 50e-9,
            dead_time_us: 0.1,
            afterpulse_ratio: 0.0,
            detector_count: 2,
            internal_loss_db: 2.65,
        }
    }
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(ModelError::invalid("efficiency", self.efficiency, "must lie in (0, 1]"));
        }
        if !(self.dark_count_rate_per_ns >= 0.0) {
            return Err(ModelError::invalid(
                "dark_count_rate_per_ns",
                self.dark_count_rate_per_ns,
                "must be non-negative",
            ));
        }
        if !(self.dead_time_us >= 0.0) {
            return Err(ModelError::invalid("dead_time_us", self.dead_time_us, "must be non-negative"));
        }
        if !(self.afterpulse_ratio >= 0.0 && self.afterpulse_ratio < 1.0) {
            return Err(ModelError::invalid(
                "afterpulse_ratio",
                self.afterpulse_ratio,
                "must lie in [0, 1)",
            ));
        }
        if self.detector_count < 1 {
            return Err(ModelError::invalid(
                "detector_count",
                self.detector_count as f64,
                "at least one detector is required",
            ));
        }
        if !self.internal_loss_db.is_finite() {
            return Err(ModelError::invalid("internal_loss_db", self.internal_loss_db, "must be finite"));
        }
        Ok(())
    }
}

/// Classical WDM channels sharing the fiber with the quantum channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalChannelSpec {
    /// Channels co-propagating with the quantum signal.
    pub forward_count: u32,
    /// Channels counter-propagating to the quantum signal.
    pub backward_count: u32,
    pub receiver_sensitivity_dbm: f64,
    /// Effective Raman cross-section ρ(λ) in 1/(km·nm).
    pub raman_cross_section: f64,
    /// Quantum receiver bandwidth Δλ, nm.
    pub receiver_bandwidth_nm: f64,
    pub channel_spacing_nm: f64,
    pub isolation_adjacent_db: f64,
    pub isolation_nonadjacent_db: f64,
    pub wdm_insertion_loss_db: f64,
}

impl Default for ClassicalChannelSpec {
    fn default() -> Self {
        ClassicalChannelSpec {
            forward_count: 2,
            backward_count: 2,
            receiver_sensitivity_dbm: -50.0,
            raman_cross_section: 2e-9,
            receiver_bandwidth_nm: 0.6,
            channel_spacing_nm: 0.8,
            isolation_adjacent_db: 59.0,
            isolation_nonadjacent_db: 82.0,
            wdm_insertion_loss_db: DEFAULT_WDM_INSERTION_LOSS_DB,
        }
    }
}

impl ClassicalChannelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.isolation_adjacent_db > 0.0) {
            return Err(ModelError::invalid(
                "isolation_adjacent_db",
                self.isolation_adjacent_db,
                "isolation must be positive",
            ));
        }
        if !(self.isolation_nonadjacent_db > 0.0) {
            return Err(ModelError::invalid(
                "isolation_nonadjacent_db",
                self.isolation_nonadjacent_db,
                "isolation must be positive",
            ));
        }
        if !(self.receiver_bandwidth_nm > 0.0) {
            return Err(ModelError::invalid(
                "receiver_bandwidth_nm",
                self.receiver_bandwidth_nm,
                "must be positive",
            ));
        }
        if !(self.raman_cross_section >= 0.0) {
            return Err(ModelError::invalid(
                "raman_cross_section",
                self.raman_cross_section,
                "must be non-negative",
            ));
        }
        if !self.receiver_sensitivity_dbm.is_finite() || !self.wdm_insertion_loss_db.is_finite() {
            return Err(ModelError::invalid(
                "receiver_sensitivity_dbm",
                self.receiver_sensitivity_dbm,
                "power levels must be finite",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    /// Sifting factor β (1 for COW).
    pub beta: f64,
    pub visibility: f64,
    pub qber_threshold: f64,
    /// Error-correction inefficiency η_ec.
    pub ec_penalty: f64,
    /// Synchronisation duty factor η_duty.
    pub duty: f64,
    /// Allowed pulse overlap with a neighbouring gate.
    pub isi_error_target: f64,
    /// Input pulse FWHM as a fraction of the bit period.
    pub pulse_fraction: f64,
    /// Detector gate as a fraction of the bit period.
    pub gate_fraction: f64,
    pub rep_rate_cap_ghz: f64,
    pub min_skr_bps: f64,
    pub quantum_wavelength_nm: f64,
}

impl Default for ProtocolSpec {
    fn default() -> Self {
        ProtocolSpec {
            beta: 1.0,
            visibility: 0.997,
            qber_threshold: 0.09,
            ec_penalty: 6.0 / 5.0,
            duty: 0.71,
            isi_error_target: 0.001,
            pulse_fraction: 0.15,
            gate_fraction: 0.5,
            rep_rate_cap_ghz: 10.0,
            min_skr_bps: 2.0 * 256.0 / 60.0,
            quantum_wavelength_nm: 1553.3,
        }
    }
}

impl ProtocolSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(ModelError::invalid("beta", self.beta, "must be positive"));
        }
        if !(self.visibility > 0.0 && self.visibility <= 1.0) {
            return Err(ModelError::invalid("visibility", self.visibility, "must lie in (0, 1]"));
        }
        if !(self.qber_threshold > 0.0 && self.qber_threshold < 0.5) {
            return Err(ModelError::invalid(
                "qber_threshold",
                self.qber_threshold,
                "must lie in (0, 0.5)",
            ));
        }
        if !(self.ec_penalty >= 1.0) {
            return Err(ModelError::invalid("ec_penalty", self.ec_penalty, "must be at least 1"));
        }
        if !(self.duty > 0.0 && self.duty <= 1.0) {
            return Err(ModelError::invalid("duty", self.duty, "must lie in (0, 1]"));
        }
        if !(self.isi_error_target > 0.0 && self.isi_error_target < 0.5) {
            return Err(ModelError::invalid(
                "isi_error_target",
                self.isi_error_target,
                "must lie in (0, 0.5)",
            ));
        }
        if !(self.pulse_fraction > 0.0 && self.pulse_fraction < self.gate_fraction) {
            return Err(ModelError::invalid(
                "pulse_fraction",
                self.pulse_fraction,
                "must be positive and shorter than the gate fraction",
            ));
        }
        if !(self.gate_fraction <= 1.0) {
            return Err(ModelError::invalid("gate_fraction", self.gate_fraction, "must not exceed 1"));
        }
        if !(self.rep_rate_cap_ghz > 1e-3) || !self.rep_rate_cap_ghz.is_finite() {
            return Err(ModelError::invalid(
                "rep_rate_cap_ghz",
                self.rep_rate_cap_ghz,
                "must be finite and above 1 MHz",
            ));
        }
        if !(self.min_skr_bps >= 0.0) {
            return Err(ModelError::invalid("min_skr_bps", self.min_skr_bps, "must be non-negative"));
        }
        if !(self.quantum_wavelength_nm > 0.0) {
            return Err(ModelError::invalid(
                "quantum_wavelength_nm",
                self.quantum_wavelength_nm,
                "must be positive",
            ));
        }
        Ok(())
    }
}

/// Dispersion pre-compensation placed ahead of the quantum attenuator.
///
/// Only the accumulated dispersion matters: the DCF sits before the signal is
/// attenuated to the single-photon level, so its loss never enters the
/// quantum power budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecompSpec {
    pub dcf: FiberSpec,
    pub length_km: f64,
}

impl PrecompSpec {
    pub fn validate(&self, transmission: &FiberSpec) -> Result<()> {
        self.dcf.validate()?;
        if !(self.length_km >= 0.0) || !self.length_km.is_finite() {
            return Err(ModelError::invalid("dcf_length_km", self.length_km, "must be non-negative"));
        }
        if self.length_km > 0.0
            && self.dcf.dispersion_ps_nm_km * transmission.dispersion_ps_nm_km >= 0.0
        {
            return Err(ModelError::invalid(
                "dcf.dispersion_ps_nm_km",
                self.dcf.dispersion_ps_nm_km,
                "must be opposite in sign to the transmission fiber dispersion",
            ));
        }
        Ok(())
    }

    /// Attenuation of the DCF spool in dB.
    pub fn attenuation_db(&self) -> f64 {
        self.dcf.attenuation_db_per_km * self.length_km
    }
}

/// Complete description of one QKD link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkScenario {
    pub fiber: FiberSpec,
    pub length_km: f64,
    pub precomp: Option<PrecompSpec>,
    pub detector: DetectorSpec,
    pub classical: Option<ClassicalChannelSpec>,
    pub protocol: ProtocolSpec,
}

impl LinkScenario {
    /// QKD-only link with the reference detector and protocol parameters.
    pub fn new(fiber: FiberSpec, length_km: f64) -> Self {
        LinkScenario {
            fiber,
            length_km,
            precomp: None,
            detector: DetectorSpec::default(),
            classical: None,
            protocol: ProtocolSpec::default(),
        }
    }

    pub fn with_length(&self, length_km: f64) -> Self {
        LinkScenario {
            length_km,
            ..self.clone()
        }
    }

    pub fn with_precomp(mut self, precomp: PrecompSpec) -> Self {
        self.precomp = Some(precomp);
        self
    }

    pub fn with_classical(mut self, classical: ClassicalChannelSpec) -> Self {
        self.classical = Some(classical);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.fiber.validate()?;
        if !(self.length_km >= 0.0) || !self.length_km.is_finite() {
            return Err(ModelError::invalid("length_km", self.length_km, "must be non-negative"));
        }
        if let Some(precomp) = &self.precomp {
            precomp.validate(&self.fiber)?;
        }
        self.detector.validate()?;
        if let Some(classical) = &self.classical {
            classical.validate()?;
        }
        self.protocol.validate()
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.protocol.quantum_wavelength_nm
    }

    pub fn wdm_insertion_loss_db(&self) -> f64 {
        self.classical
            .as_ref()
            .map_or(DEFAULT_WDM_INSERTION_LOSS_DB, |c| c.wdm_insertion_loss_db)
    }

    /// Dispersive segments in propagation order: DCF (if any), then the
    /// transmission fiber.
    pub fn segments(&self) -> Vec<Segment> {
        let lambda = self.wavelength_nm();
        let mut segments = Vec::with_capacity(2);
        if let Some(precomp) = &self.precomp {
            segments.push(Segment::new(precomp.dcf.beta2(lambda), precomp.length_km));
        }
        segments.push(Segment::new(self.fiber.beta2(lambda), self.length_km));
        segments
    }

    /// Net group-delay dispersion at the receiver, ps².
    pub fn accumulated_gvd(&self) -> f64 {
        self.segments().iter().map(Segment::gvd).sum()
    }
}
