//! Built-in fiber families and the reference parameter set.

use crate::link::{ClassicalChannelSpec, DetectorSpec, FiberSpec, ProtocolSpec};
use crate::ModelError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberPreset {
    /// Family label, `<1>` … `<5>`.
    pub label: &'static str,
    pub name: &'static str,
    pub representative: &'static str,
    pub aliases: &'static [&'static str],
    pub dispersion_ps_nm_km: f64,
    pub attenuation_db_per_km: f64,
}

impl FiberPreset {
    pub fn spec(&self) -> FiberSpec {
        FiberSpec {
            label: self.name.to_string(),
            attenuation_db_per_km: self.attenuation_db_per_km,
            dispersion_ps_nm_km: self.dispersion_ps_nm_km,
        }
    }

    fn matches(&self, key: &str) -> bool {
        let key = key.trim();
        let bare = self.label.trim_start_matches('<').trim_end_matches('>');
        key == self.label
            || key == bare
            || key.eq_ignore_ascii_case(self.name)
            || self.aliases.iter().any(|a| key.eq_ignore_ascii_case(a))
    }
}

pub const FIBER_PRESETS: [FiberPreset; 5] = [
    FiberPreset {
        label: "<1>",
        name: "EX2000",
        representative: "Vascade EX2000",
        aliases: &["VASCADE", "VASCADE-EX2000"],
        dispersion_ps_nm_km: 20.35,
        attenuation_db_per_km: 0.16,
    },
    FiberPreset {
        label: "<2>",
        name: "LEAF",
        representative: "LEAF",
        aliases: &[],
        dispersion_ps_nm_km: 4.25,
        attenuation_db_per_km: 0.185,
    },
    FiberPreset {
        label: "<3>",
        name: "LDF",
        representative: "LDF/DSF",
        aliases: &["DSF", "LDF/DSF"],
        dispersion_ps_nm_km: 0.1,
        attenuation_db_per_km: 0.185,
    },
    FiberPreset {
        label: "<4>",
        name: "SMF28e",
        representative: "SMF28e",
        aliases: &["SMF28", "SMF-28", "SMF"],
        dispersion_ps_nm_km: 17.0,
        attenuation_db_per_km: 0.21,
    },
    FiberPreset {
        label: "<5>",
        name: "DCF",
        representative: "DCF",
        aliases: &[],
        dispersion_ps_nm_km: -132.4,
        attenuation_db_per_km: 0.42,
    },
];

/// Looks a fiber family up by label (`<1>` or `1`), name or alias.
/// Names are case-insensitive.
pub fn fiber(key: &str) -> Result<FiberSpec, ModelError> {
    FIBER_PRESETS
        .iter()
        .find(|p| p.matches(key))
        .map(FiberPreset::spec)
        .ok_or_else(|| ModelError::UnknownPreset(key.to_string()))
}

/// One row of the reference parameter listing.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterRow {
    pub key: &'static str,
    pub value: f64,
    pub unit: &'static str,
    pub description: &'static str,
}

/// Reference parameter set in config-key order.
pub fn reference_parameters() -> Vec<ParameterRow> {
    let d = DetectorSpec::default();
    let c = ClassicalChannelSpec::default();
    let p = ProtocolSpec::default();
    let row = |key, value, unit, description| ParameterRow {
        key,
        value,
        unit,
        description,
    };
    vec![
        row("detector.efficiency", d.efficiency, "-", "quantum detection efficiency (SNSPD)"),
        row("detector.dark_count_rate_per_ns", d.dark_count_rate_per_ns, "1/ns", "dark count probability rate"),
        row("detector.dead_time_us", d.dead_time_us, "us", "detector dead time"),
        row("detector.afterpulse_ratio", d.afterpulse_ratio, "-", "after-pulse share of all detections"),
        row("detector.detector_count", d.detector_count as f64, "-", "number of detectors"),
        row("detector.internal_loss_db", d.internal_loss_db, "dB", "receiver internal loss"),
        row("classical.forward_count", c.forward_count as f64, "-", "co-propagating classical channels"),
        row("classical.backward_count", c.backward_count as f64, "-", "counter-propagating classical channels"),
        row("classical.receiver_sensitivity_dbm", c.receiver_sensitivity_dbm, "dBm", "classical receiver sensitivity"),
        row("classical.raman_cross_section", c.raman_cross_section, "1/(km nm)", "effective Raman cross-section"),
        row("classical.receiver_bandwidth_nm", c.receiver_bandwidth_nm, "nm", "quantum receiver bandwidth"),
        row("classical.channel_spacing_nm", c.channel_spacing_nm, "nm", "classical channel spacing"),
        row("classical.isolation_adjacent_db", c.isolation_adjacent_db, "dB", "adjacent channel isolation"),
        row("classical.isolation_nonadjacent_db", c.isolation_nonadjacent_db, "dB", "non-adjacent channel isolation"),
        row("classical.wdm_insertion_loss_db", c.wdm_insertion_loss_db, "dB", "WDM insertion loss"),
        row("protocol.beta", p.beta, "-", "sifting factor (COW)"),
        row("protocol.visibility", p.visibility, "-", "fringe visibility"),
        row("protocol.qber_threshold", p.qber_threshold, "-", "error-correction QBER limit"),
        row("protocol.ec_penalty", p.ec_penalty, "-", "error-correction inefficiency"),
        row("protocol.duty", p.duty, "-", "synchronisation duty factor"),
        row("protocol.isi_error_target", p.isi_error_target, "-", "allowed overlap with neighbouring gate"),
        row("protocol.pulse_fraction", p.pulse_fraction, "T", "input pulse FWHM / bit period"),
        row("protocol.gate_fraction", p.gate_fraction, "T", "detector gate / bit period"),
        row("protocol.rep_rate_cap_ghz", p.rep_rate_cap_ghz, "GHz", "maximum repetition rate"),
        row("protocol.min_skr_bps", p.min_skr_bps, "b/s", "key-rate floor (2 AES-256 keys per minute)"),
        row("protocol.quantum_wavelength_nm", p.quantum_wavelength_nm, "nm", "quantum channel wavelength"),
    ]
}
