//! Length sweeps and their CSV / JSON emission.
//!
//! Rows are computed in parallel and emitted in length order. Cells the model
//! cannot fill (undefined QBER, a clamped secret key rate, no optimal μ, or a
//! failed row) are written as `n/a` in CSV and `null` in JSON.

use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::SweepRequest;
use crate::metrics::KeyRateReport;
use crate::optimize::evaluate_point;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "QKD_LINKSIM_THREADS";

/// Sentinel for cells without a value.
pub const NOT_AVAILABLE: &str = "n/a";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    LengthKm,
    FRepGhz,
    MuOpt,
    Qber,
    RRawBps,
    RSiftBps,
    RSecBps,
    PulseFwhmOutPs,
    TIsi,
    PMu,
    PDc,
    PRam,
    PLcxt,
    PIsi,
    EtaDead,
}

impl Column {
    pub const ALL: [Column; 15] = [
        Column::LengthKm,
        Column::FRepGhz,
        Column::MuOpt,
        Column::Qber,
        Column::RRawBps,
        Column::RSiftBps,
        Column::RSecBps,
        Column::PulseFwhmOutPs,
        Column::TIsi,
        Column::PMu,
        Column::PDc,
        Column::PRam,
        Column::PLcxt,
        Column::PIsi,
        Column::EtaDead,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::LengthKm => "L_km",
            Column::FRepGhz => "f_rep_GHz",
            Column::MuOpt => "mu_opt",
            Column::Qber => "qber",
            Column::RRawBps => "r_raw_bps",
            Column::RSiftBps => "r_sift_bps",
            Column::RSecBps => "r_sec_bps",
            Column::PulseFwhmOutPs => "pulse_fwhm_out_ps",
            Column::TIsi => "t_isi",
            Column::PMu => "p_mu",
            Column::PDc => "p_dc",
            Column::PRam => "p_ram",
            Column::PLcxt => "p_lcxt",
            Column::PIsi => "p_isi",
            Column::EtaDead => "eta_dead",
        }
    }

    pub fn from_name(name: &str) -> Option<Column> {
        Column::ALL.into_iter().find(|c| c.name() == name)
    }

    fn value(self, length_km: f64, r: &KeyRateReport) -> Option<f64> {
        let b = &r.budget;
        match self {
            Column::LengthKm => Some(length_km),
            Column::FRepGhz => Some(r.f_rep_ghz),
            Column::MuOpt => r.mu_opt,
            Column::Qber => r.qber,
            Column::RRawBps => Some(r.r_raw),
            Column::RSiftBps => Some(r.r_sift),
            Column::RSecBps => r.clamp.is_none().then_some(r.r_sec),
            Column::PulseFwhmOutPs => Some(r.pulse_fwhm_out_ps),
            Column::TIsi => Some(b.t_isi),
            Column::PMu => Some(b.p_mu),
            Column::PDc => Some(b.noise.p_dc),
            Column::PRam => Some(b.noise.p_ram),
            Column::PLcxt => Some(b.noise.p_lcxt),
            Column::PIsi => Some(b.p_isi),
            Column::EtaDead => Some(r.eta_dead),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub length_km: f64,
    /// Error text when the point could not be evaluated.
    pub report: Result<KeyRateReport, String>,
}

impl SweepRow {
    pub fn value(&self, column: Column) -> Option<f64> {
        match &self.report {
            Ok(r) => column.value(self.length_km, r),
            Err(_) if column == Column::LengthKm => Some(self.length_km),
            Err(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub columns: Vec<Column>,
    pub rows: Vec<SweepRow>,
}

fn evaluate_row(request: &SweepRequest, length_km: f64) -> SweepRow {
    let report = evaluate_point(&request.scenario.with_length(length_km)).map_err(|e| e.to_string());
    SweepRow { length_km, report }
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Evaluates every length of the request, sorted by length.
pub fn run_sweep(request: &SweepRequest) -> SweepTable {
    run_sweep_with_threads(request, threads_from_env())
}

pub fn run_sweep_with_threads(request: &SweepRequest, threads: Option<usize>) -> SweepTable {
    let mut lengths = request.lengths.clone();
    lengths.sort_by(f64::total_cmp);
    let compute = || -> Vec<SweepRow> { lengths.par_iter().map(|&l| evaluate_row(request, l)).collect() };
    let rows = match threads.map(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build()) {
        Some(Ok(pool)) => pool.install(compute),
        _ => compute(),
    };
    SweepTable {
        columns: request.columns.clone(),
        rows,
    }
}

impl SweepTable {
    /// Comma-separated, header first, LF line endings. Numbers use the
    /// shortest representation that parses back to the same `f64`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header: Vec<&str> = self.columns.iter().map(|c| c.name()).collect();
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = self
                .columns
                .iter()
                .map(|&c| row.value(c).map_or_else(|| NOT_AVAILABLE.to_string(), format_number))
                .collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Array of objects keyed by column name; unavailable cells are `null`.
    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .map(|&c| (c.name().to_string(), row.value(c).map_or(serde_json::Value::Null, Into::into)))
                    .collect();
                if let Err(e) = &row.report {
                    obj.insert("error".into(), e.clone().into());
                }
                obj
            })
            .collect();
        serde_json::to_writer_pretty(&mut out, &rows)?;
        writeln!(out)
    }

    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> io::Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }
}

fn format_number(x: f64) -> String {
    if !x.is_finite() {
        NOT_AVAILABLE.to_string()
    } else if x == 0.0 || (1e-3..1e7).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
