use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qkd_linksim::config::load_config;
use qkd_linksim::dispersion::max_rep_rate;
use qkd_linksim::optimize::dcf_length_for_reach;
use qkd_linksim::presets::{self, FIBER_PRESETS};
use qkd_linksim::sweep::{run_sweep, OutputFormat};
use qkd_linksim::{evaluate_point, KeyRateReport};

#[derive(Parser)]
#[command(name = "qkd-linksim", version, about = "COW QKD link model with dispersion, Raman noise and key-rate optimisation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PointFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single link length.
    Point {
        #[arg(long)]
        config: PathBuf,
        /// Link length in km; overrides [fiber] length_km.
        #[arg(long)]
        length: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: PointFormat,
    },
    /// Sweep link lengths and write a table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides [sweep] format.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Highest repetition rate the ISI budget allows at a given length.
    MaxBitrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        length: f64,
    },
    /// DCF length and loss that compensate a transmission fiber.
    SizeDcf {
        #[arg(long)]
        target_km: f64,
        #[arg(long)]
        fiber: String,
        #[arg(long, default_value = "DCF")]
        dcf: String,
    },
    /// Print fiber presets and reference parameters.
    Presets,
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

fn print_report(out: &mut impl Write, length_km: f64, r: &KeyRateReport) -> io::Result<()> {
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6e}"));
    writeln!(out, "length_km         {length_km}")?;
    writeln!(out, "f_rep_GHz         {:.6}", r.f_rep_ghz)?;
    writeln!(out, "mu_opt            {}", opt(r.mu_opt))?;
    writeln!(out, "qber              {}", opt(r.qber))?;
    writeln!(out, "r_raw_bps         {:.6e}", r.r_raw)?;
    writeln!(out, "r_sift_bps        {:.6e}", r.r_sift)?;
    writeln!(out, "r_sec_bps         {:.6e}", r.r_sec)?;
    writeln!(out, "i_ab              {:.6}", r.i_ab)?;
    writeln!(out, "i_ae              {:.6}", r.i_ae)?;
    writeln!(out, "eta_dead          {:.6}", r.eta_dead)?;
    writeln!(out, "pulse_fwhm_out_ps {:.4}", r.pulse_fwhm_out_ps)?;
    writeln!(out, "t_isi             {:.6}", r.budget.t_isi)?;
    writeln!(out, "p_mu              {:.6e}", r.budget.p_mu)?;
    writeln!(out, "p_dc              {:.6e}", r.budget.noise.p_dc)?;
    writeln!(out, "p_ram             {:.6e}", r.budget.noise.p_ram)?;
    writeln!(out, "p_lcxt            {:.6e}", r.budget.noise.p_lcxt)?;
    writeln!(out, "p_isi             {:.6e}", r.budget.p_isi)?;
    if let Some(clamp) = r.clamp {
        writeln!(out, "rate_clamped      {clamp:?}")?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Point { config, length, format } => {
            let mut scenario = load_config(config)?.scenario;
            if let Some(l) = length {
                scenario.length_km = l;
            }
            let report = evaluate_point(&scenario)?;
            match format {
                PointFormat::Text => print_report(&mut out, scenario.length_km, &report)?,
                PointFormat::Json => {
                    serde_json::to_writer_pretty(&mut out, &report)?;
                    writeln!(out)?;
                }
            }
        }
        Command::Sweep { config, out: path, format } => {
            let request = load_config(config)?;
            let format = match format {
                Some(Format::Csv) => OutputFormat::Csv,
                Some(Format::Json) => OutputFormat::Json,
                None => request.format,
            };
            let table = run_sweep(&request);
            let mut file = BufWriter::new(File::create(&path)?);
            table.write(format, &mut file)?;
            file.flush()?;
            writeln!(out, "wrote {} rows to {}", table.rows.len(), path.display())?;
        }
        Command::MaxBitrate { config, length } => {
            let scenario = load_config(config)?.scenario.with_length(length);
            scenario.validate()?;
            writeln!(out, "{:.4} GHz", max_rep_rate(&scenario))?;
        }
        Command::SizeDcf { target_km, fiber, dcf } => {
            let fiber = presets::fiber(&fiber)?;
            let dcf = presets::fiber(&dcf)?;
            let length = dcf_length_for_reach(target_km, &fiber, &dcf)?;
            writeln!(out, "{:.2} km, {:.2} dB", length, length * dcf.attenuation_db_per_km)?;
        }
        Command::Presets => {
            writeln!(out, "label  name      D [ps/nm/km]  loss [dB/km]  representative")?;
            for p in FIBER_PRESETS {
                writeln!(
                    out,
                    "{:<6} {:<9} {:>12}  {:>12}  {}",
                    p.label, p.name, p.dispersion_ps_nm_km, p.attenuation_db_per_km, p.representative
                )?;
            }
            writeln!(out)?;
            for row in presets::reference_parameters() {
                writeln!(out, "{:<38} {:>12} {:<10} {}", row.key, row.value, row.unit, row.description)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
