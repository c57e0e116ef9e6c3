//! TOML scenario files.
//!
//! ```toml
//! fiber = "EX2000"            # preset name, or a [fiber] table
//!
//! [precomp]                   # optional; omit for no pre-compensation
//! dcf = "DCF"
//! length_km = 40              # or target_km = 250 to size the spool
//!
//! [detector]                  # every key optional, reference values otherwise
//! efficiency = 0.014
//!
//! [classical]                 # optional; presence enables classical channels
//! forward_count = 2
//!
//! [protocol]
//! rep_rate_cap_ghz = 10
//!
//! [sweep]
//! start_km = 1
//! stop_km = 400
//! step_km = 1
//! format = "csv"
//! ```
//!
//! Keys and units are listed in `docs/config.md`. Unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;

use crate::link::{ClassicalChannelSpec, DetectorSpec, FiberSpec, LinkScenario, PrecompSpec, ProtocolSpec};
use crate::optimize::dcf_length_for_reach;
use crate::presets;
use crate::sweep::{Column, OutputFormat};
use crate::{ConfigError, ModelError};

const ROOT_KEYS: &[&str] = &["fiber", "precomp", "detector", "classical", "protocol", "sweep"];
const FIBER_KEYS: &[&str] = &["preset", "label", "attenuation_db_per_km", "dispersion_ps_nm_km", "length_km"];
const PRECOMP_KEYS: &[&str] = &[
    "dcf",
    "dcf_attenuation_db_per_km",
    "dcf_dispersion_ps_nm_km",
    "length_km",
    "target_km",
];
const DETECTOR_KEYS: &[&str] = &[
    "efficiency",
    "dark_count_rate_per_ns",
    "dead_time_us",
    "afterpulse_ratio",
    "detector_count",
    "internal_loss_db",
];
const CLASSICAL_KEYS: &[&str] = &[
    "forward_count",
    "backward_count",
    "receiver_sensitivity_dbm",
    "raman_cross_section",
    "receiver_bandwidth_nm",
    "channel_spacing_nm",
    "isolation_adjacent_db",
    "isolation_nonadjacent_db",
    "wdm_insertion_loss_db",
];
const PROTOCOL_KEYS: &[&str] = &[
    "beta",
    "visibility",
    "qber_threshold",
    "ec_penalty",
    "duty",
    "isi_error_target",
    "pulse_fraction",
    "gate_fraction",
    "rep_rate_cap_ghz",
    "min_skr_bps",
    "quantum_wavelength_nm",
];
const SWEEP_KEYS: &[&str] = &["start_km", "stop_km", "step_km", "lengths", "columns", "format"];

const DEFAULT_FIBER: &str = "EX2000";
const DEFAULT_LENGTH_KM: f64 = 100.0;

/// A scenario template plus the lengths and columns to emit.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub scenario: LinkScenario,
    /// Link lengths in km, ascending.
    pub lengths: Vec<f64>,
    pub columns: Vec<Column>,
    pub format: OutputFormat,
}

impl SweepRequest {
    pub fn new(scenario: LinkScenario, lengths: Vec<f64>) -> Self {
        SweepRequest {
            scenario,
            lengths,
            columns: Column::ALL.to_vec(),
            format: OutputFormat::Csv,
        }
    }
}

/// Evenly spaced lengths from `start` to `stop` inclusive.
pub fn length_range(start_km: f64, stop_km: f64, step_km: f64) -> Result<Vec<f64>, ConfigError> {
    if !(step_km > 0.0) {
        return Err(out_of_range("sweep.step_km", "step must be positive"));
    }
    if !(start_km >= 0.0) {
        return Err(out_of_range("sweep.start_km", "lengths must be non-negative"));
    }
    if !(start_km <= stop_km) {
        return Err(out_of_range("sweep.stop_km", "stop must not precede start"));
    }
    let n = ((stop_km - start_km) / step_km + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start_km + i as f64 * step_km).collect())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    fiber: Option<RawFiber>,
    precomp: Option<RawPrecomp>,
    #[serde(default)]
    detector: RawDetector,
    classical: Option<RawClassical>,
    #[serde(default)]
    protocol: RawProtocol,
    #[serde(default)]
    sweep: RawSweep,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawFiber {
    Preset(String),
    Section(RawFiberSection),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFiberSection {
    preset: Option<String>,
    label: Option<String>,
    attenuation_db_per_km: Option<f64>,
    dispersion_ps_nm_km: Option<f64>,
    length_km: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrecomp {
    dcf: Option<String>,
    dcf_attenuation_db_per_km: Option<f64>,
    dcf_dispersion_ps_nm_km: Option<f64>,
    length_km: Option<f64>,
    target_km: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    efficiency: Option<f64>,
    dark_count_rate_per_ns: Option<f64>,
    dead_time_us: Option<f64>,
    afterpulse_ratio: Option<f64>,
    detector_count: Option<u32>,
    internal_loss_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClassical {
    forward_count: Option<u32>,
    backward_count: Option<u32>,
    receiver_sensitivity_dbm: Option<f64>,
    raman_cross_section: Option<f64>,
    receiver_bandwidth_nm: Option<f64>,
    channel_spacing_nm: Option<f64>,
    isolation_adjacent_db: Option<f64>,
    isolation_nonadjacent_db: Option<f64>,
    wdm_insertion_loss_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProtocol {
    beta: Option<f64>,
    visibility: Option<f64>,
    qber_threshold: Option<f64>,
    ec_penalty: Option<f64>,
    duty: Option<f64>,
    isi_error_target: Option<f64>,
    pulse_fraction: Option<f64>,
    gate_fraction: Option<f64>,
    rep_rate_cap_ghz: Option<f64>,
    min_skr_bps: Option<f64>,
    quantum_wavelength_nm: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    start_km: Option<f64>,
    stop_km: Option<f64>,
    step_km: Option<f64>,
    lengths: Option<Vec<f64>>,
    columns: Option<Vec<String>>,
    format: Option<String>,
}

fn out_of_range(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::OutOfRange {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn parse_error(text: &str, err: &toml::de::Error) -> ConfigError {
    ConfigError::Parse {
        line: err.span().map_or(0, |s| line_of(text, s.start)),
        message: err.message().trim().to_string(),
    }
}

/// Rejects keys outside the documented grammar before typed parsing, so a
/// typo is reported by name.
fn check_keys(table: &toml::Table) -> Result<(), ConfigError> {
    let unknown = |section: &str, key: &str| ConfigError::UnknownKey {
        section: section.to_string(),
        key: key.to_string(),
    };
    for (key, value) in table {
        let allowed = match key.as_str() {
            "fiber" => FIBER_KEYS,
            "precomp" => PRECOMP_KEYS,
            "detector" => DETECTOR_KEYS,
            "classical" => CLASSICAL_KEYS,
            "protocol" => PROTOCOL_KEYS,
            "sweep" => SWEEP_KEYS,
            other => return Err(unknown("root", other)),
        };
        debug_assert!(ROOT_KEYS.contains(&key.as_str()));
        if let toml::Value::Table(section) = value {
            if let Some(bad) = section.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(unknown(key, bad));
            }
        }
    }
    Ok(())
}

fn model_to_config(err: ModelError, section: &str) -> ConfigError {
    match err {
        ModelError::InvalidParameter { name, value, reason } => {
            out_of_range(&format!("{section}.{name}"), format!("{value}: {reason}"))
        }
        other => ConfigError::Model(other),
    }
}

fn build_fiber(raw: Option<RawFiber>) -> Result<(FiberSpec, f64), ConfigError> {
    let section = match raw {
        None => RawFiberSection::default(),
        Some(RawFiber::Preset(name)) => RawFiberSection {
            preset: Some(name),
            ..Default::default()
        },
        Some(RawFiber::Section(s)) => s,
    };
    let mut fiber = presets::fiber(section.preset.as_deref().unwrap_or(DEFAULT_FIBER))?;
    if let Some(label) = section.label {
        fiber.label = label;
    }
    if let Some(a) = section.attenuation_db_per_km {
        fiber.attenuation_db_per_km = a;
    }
    if let Some(d) = section.dispersion_ps_nm_km {
        fiber.dispersion_ps_nm_km = d;
    }
    fiber.validate().map_err(|e| model_to_config(e, "fiber"))?;
    Ok((fiber, section.length_km.unwrap_or(DEFAULT_LENGTH_KM)))
}

fn build_precomp(raw: RawPrecomp, fiber: &FiberSpec) -> Result<PrecompSpec, ConfigError> {
    let mut dcf = presets::fiber(raw.dcf.as_deref().unwrap_or("DCF"))?;
    if let Some(a) = raw.dcf_attenuation_db_per_km {
        dcf.attenuation_db_per_km = a;
    }
    if let Some(d) = raw.dcf_dispersion_ps_nm_km {
        dcf.dispersion_ps_nm_km = d;
    }
    let length_km = match (raw.length_km, raw.target_km) {
        (Some(_), Some(_)) => {
            return Err(out_of_range("precomp.target_km", "give either length_km or target_km, not both"))
        }
        (Some(l), None) => l,
        (None, Some(target)) => {
            dcf_length_for_reach(target, fiber, &dcf).map_err(|e| model_to_config(e, "precomp"))?
        }
        (None, None) => return Err(out_of_range("precomp.length_km", "missing; set length_km or target_km")),
    };
    Ok(PrecompSpec { dcf, length_km })
}

fn build_detector(raw: RawDetector) -> DetectorSpec {
    let d = DetectorSpec::default();
    DetectorSpec {
        efficiency: raw.efficiency.unwrap_or(d.efficiency),
        dark_count_rate_per_ns: raw.dark_count_rate_per_ns.unwrap_or(d.dark_count_rate_per_ns),
        dead_time_us: raw.dead_time_us.unwrap_or(d.dead_time_us),
        afterpulse_ratio: raw.afterpulse_ratio.unwrap_or(d.afterpulse_ratio),
        detector_count: raw.detector_count.unwrap_or(d.detector_count),
        internal_loss_db: raw.internal_loss_db.unwrap_or(d.internal_loss_db),
    }
}

fn build_classical(raw: RawClassical) -> ClassicalChannelSpec {
    let c = ClassicalChannelSpec::default();
    ClassicalChannelSpec {
        forward_count: raw.forward_count.unwrap_or(c.forward_count),
        backward_count: raw.backward_count.unwrap_or(c.backward_count),
        receiver_sensitivity_dbm: raw.receiver_sensitivity_dbm.unwrap_or(c.receiver_sensitivity_dbm),
        raman_cross_section: raw.raman_cross_section.unwrap_or(c.raman_cross_section),
        receiver_bandwidth_nm: raw.receiver_bandwidth_nm.unwrap_or(c.receiver_bandwidth_nm),
        channel_spacing_nm: raw.channel_spacing_nm.unwrap_or(c.channel_spacing_nm),
        isolation_adjacent_db: raw.isolation_adjacent_db.unwrap_or(c.isolation_adjacent_db),
        isolation_nonadjacent_db: raw.isolation_nonadjacent_db.unwrap_or(c.isolation_nonadjacent_db),
        wdm_insertion_loss_db: raw.wdm_insertion_loss_db.unwrap_or(c.wdm_insertion_loss_db),
    }
}

fn build_protocol(raw: RawProtocol) -> ProtocolSpec {
    let p = ProtocolSpec::default();
    ProtocolSpec {
        beta: raw.beta.unwrap_or(p.beta),
        visibility: raw.visibility.unwrap_or(p.visibility),
        qber_threshold: raw.qber_threshold.unwrap_or(p.qber_threshold),
        ec_penalty: raw.ec_penalty.unwrap_or(p.ec_penalty),
        duty: raw.duty.unwrap_or(p.duty),
        isi_error_target: raw.isi_error_target.unwrap_or(p.isi_error_target),
        pulse_fraction: raw.pulse_fraction.unwrap_or(p.pulse_fraction),
        gate_fraction: raw.gate_fraction.unwrap_or(p.gate_fraction),
        rep_rate_cap_ghz: raw.rep_rate_cap_ghz.unwrap_or(p.rep_rate_cap_ghz),
        min_skr_bps: raw.min_skr_bps.unwrap_or(p.min_skr_bps),
        quantum_wavelength_nm: raw.quantum_wavelength_nm.unwrap_or(p.quantum_wavelength_nm),
    }
}

fn build_sweep(raw: RawSweep) -> Result<(Vec<f64>, Vec<Column>, OutputFormat), ConfigError> {
    let lengths = match raw.lengths {
        Some(mut list) => {
            if raw.start_km.is_some() || raw.stop_km.is_some() || raw.step_km.is_some() {
                return Err(out_of_range("sweep.lengths", "give either lengths or start/stop/step, not both"));
            }
            if let Some(bad) = list.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
                return Err(out_of_range("sweep.lengths", format!("{bad} is not a valid length")));
            }
            list.sort_by(f64::total_cmp);
            list
        }
        None => length_range(
            raw.start_km.unwrap_or(1.0),
            raw.stop_km.unwrap_or(400.0),
            raw.step_km.unwrap_or(1.0),
        )?,
    };
    let columns = match raw.columns {
        None => Column::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| Column::from_name(n).ok_or_else(|| out_of_range("sweep.columns", format!("unknown column `{n}`"))))
            .collect::<Result<_, _>>()?,
    };
    let format = match raw.format.as_deref() {
        None => OutputFormat::Csv,
        Some(f) => f
            .parse()
            .map_err(|_| out_of_range("sweep.format", format!("`{f}` is not csv or json")))?,
    };
    Ok((lengths, columns, format))
}

/// Parses configuration text. `unspecified` keys take the reference values.
pub fn parse_config(text: &str) -> Result<SweepRequest, ConfigError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
    check_keys(&table)?;
    let raw: RawConfig = toml::from_str(text).map_err(|e| parse_error(text, &e))?;

    let (fiber, length_km) = build_fiber(raw.fiber)?;
    let precomp = raw.precomp.map(|p| build_precomp(p, &fiber)).transpose()?;
    let scenario = LinkScenario {
        precomp,
        detector: build_detector(raw.detector),
        classical: raw.classical.map(build_classical),
        protocol: build_protocol(raw.protocol),
        ..LinkScenario::new(fiber, length_km)
    };
    validate_sections(&scenario)?;
    let (lengths, columns, format) = build_sweep(raw.sweep)?;
    Ok(SweepRequest {
        scenario,
        lengths,
        columns,
        format,
    })
}

fn validate_sections(s: &LinkScenario) -> Result<(), ConfigError> {
    if !(s.length_km >= 0.0) {
        return Err(out_of_range("fiber.length_km", format!("{}: must be non-negative", s.length_km)));
    }
    if let Some(p) = &s.precomp {
        p.validate(&s.fiber).map_err(|e| model_to_config(e, "precomp"))?;
    }
    s.detector.validate().map_err(|e| model_to_config(e, "detector"))?;
    if let Some(c) = &s.classical {
        c.validate().map_err(|e| model_to_config(e, "classical"))?;
    }
    s.protocol.validate().map_err(|e| model_to_config(e, "protocol"))
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SweepRequest, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
