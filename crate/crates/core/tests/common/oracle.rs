//! Independent reference evaluations. Nothing here calls into the crate's
//! numerics: error functions come from libm, constants are restated, and
//! every equation is written out in a single straight line.

use std::f64::consts::{LN_10, LN_2, PI};

use libm::{erf, erfc};
use qkd_linksim::LinkScenario;

const H: f64 = 6.626_070_15e-34;
const C_M_PER_S: f64 = 299_792_458.0;
const C_NM_PER_PS: f64 = 299_792.458;

/// Adaptive Simpson quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
                + step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    step(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// Quadrature over `[a, b]` split into `pieces` equal panels.
pub fn integrate_panels(f: &dyn Fn(f64) -> f64, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let w = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| integrate(f, a + i as f64 * w, a + (i + 1) as f64 * w, tol / pieces as f64))
        .sum()
}

/// erf from its defining integral.
pub fn erf_quadrature(x: f64) -> f64 {
    let density = |t: f64| 2.0 / PI.sqrt() * (-t * t).exp();
    integrate_panels(&density, 0.0, x, 16, 1e-14)
}

/// Unit-area Gaussian intensity with the given FWHM.
pub fn intensity(t: f64, fwhm: f64) -> f64 {
    2.0 * (LN_2 / PI).sqrt() / fwhm * (-4.0 * LN_2 * t * t / (fwhm * fwhm)).exp()
}

/// Energy of the pulse inside `[lo, hi]`, by quadrature.
pub fn energy_between(lo: f64, hi: f64, fwhm: f64) -> f64 {
    integrate_panels(&|t| intensity(t, fwhm), lo, hi, 32, 1e-15)
}

pub fn beta2(d: f64, lambda_nm: f64) -> f64 {
    -d * lambda_nm * lambda_nm / (2.0 * PI * C_NM_PER_PS)
}

/// Output FWHM at a repetition rate, pulse and gate scaling with the period.
pub fn output_fwhm(s: &LinkScenario, f_rep_ghz: f64) -> f64 {
    let lambda = s.protocol.quantum_wavelength_nm;
    let period = 1000.0 / f_rep_ghz;
    let fwhm0 = s.protocol.pulse_fraction * period;
    let mut b = beta2(s.fiber.dispersion_ps_nm_km, lambda) * s.length_km;
    if let Some(p) = &s.precomp {
        b += beta2(p.dcf.dispersion_ps_nm_km, lambda) * p.length_km;
    }
    let t0 = fwhm0 / (2.0 * LN_2.sqrt());
    fwhm0 * (1.0 + (b / (t0 * t0)).powi(2)).sqrt()
}

/// Leading-term ISI overlap used for the repetition-rate condition.
pub fn isi_condition(s: &LinkScenario, f_rep_ghz: f64) -> f64 {
    let period = 1000.0 / f_rep_ghz;
    let gate = s.protocol.gate_fraction * period;
    let fwhm = output_fwhm(s, f_rep_ghz);
    0.5 * erfc(LN_2.sqrt() / fwhm * (2.0 * period - gate))
}

pub fn rate_feasible(s: &LinkScenario, f_rep_ghz: f64) -> bool {
    isi_condition(s, f_rep_ghz) <= s.protocol.isi_error_target
}

/// Plain bisection for the highest feasible repetition rate.
pub fn max_rep_rate(s: &LinkScenario, tol: f64) -> f64 {
    let cap = s.protocol.rep_rate_cap_ghz;
    if rate_feasible(s, cap) {
        return cap;
    }
    let (mut lo, mut hi) = (1e-6, cap);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if rate_feasible(s, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Width of a pulse after `b` ps² of accumulated dispersion.
pub fn width_after(fwhm0: f64, b: f64) -> f64 {
    let t0 = fwhm0 / (2.0 * LN_2.sqrt());
    fwhm0 * (1.0 + (b / (t0 * t0)).powi(2)).sqrt()
}

/// Agrawal's chirped-Gaussian broadening, with `t0` the 1/e half-width.
pub fn chirped_ratio(t0: f64, chirp: f64, b: f64) -> f64 {
    ((1.0 + chirp * b / (t0 * t0)).powi(2) + (b / (t0 * t0)).powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct Rates {
    pub qber: f64,
    pub r_raw: f64,
    pub r_sift: f64,
    pub r_sec: f64,
    pub p_mu: f64,
    pub p_isi: f64,
    pub p_dc: f64,
    pub p_ram: f64,
    pub p_lcxt: f64,
    pub t_isi: f64,
    pub eta_dead: f64,
}

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Straight-line evaluation of the full model at fixed `f_rep` and `mu`.
pub fn evaluate(s: &LinkScenario, f_rep_ghz: f64, mu: f64) -> Rates {
    let d = &s.detector;
    let pr = &s.protocol;
    let period = 1000.0 / f_rep_ghz;
    let gate_ps = pr.gate_fraction * period;
    let gate_s = gate_ps * 1e-12;
    let fwhm = output_fwhm(s, f_rep_ghz);
    let k = LN_2.sqrt() / fwhm;

    let t_isi = erf(k * gate_ps);
    let f_err = 0.5 * (erfc(k * (2.0 * period - gate_ps)) - erfc(k * (2.0 * period + gate_ps)));

    let t_f = 10f64.powf(-s.fiber.attenuation_db_per_km * s.length_km / 10.0);
    let il_db = s.classical.as_ref().map_or(1.95, |c| c.wdm_insertion_loss_db);
    let t_il = 10f64.powf(-il_db / 10.0);
    let t_b = 10f64.powf(-d.internal_loss_db / 10.0);
    let eta = d.efficiency;
    let n_d = d.detector_count as f64;

    let p_mu = mu * t_f * t_il * t_b * t_isi * eta;
    let p_isi = 2.0 * f_err * mu * t_f * t_il * t_b * eta;
    let p_dc = d.dark_count_rate_per_ns * gate_ps * 1e-3;

    let e_photon = H * C_M_PER_S / (pr.quantum_wavelength_nm * 1e-9);
    let (p_ram, p_lcxt) = match &s.classical {
        None => (0.0, 0.0),
        Some(c) => {
            let p_out = 1e-3 * 10f64.powf((c.receiver_sensitivity_dbm + c.wdm_insertion_loss_db) / 10.0);
            let a = s.fiber.attenuation_db_per_km * LN_10 / 10.0;
            let l = s.length_km;
            let rd = c.raman_cross_section * c.receiver_bandwidth_nm;
            let forward = c.forward_count as f64 * p_out * l * rd;
            let backward = c.backward_count as f64 * p_out * (a * l).sinh() / a * rd;
            let leak = c.forward_count as f64 * p_out * 10f64.powf(-c.isolation_nonadjacent_db / 10.0);
            (
                (forward + backward) / e_photon * eta * gate_s,
                leak / e_photon * eta * gate_s,
            )
        }
    };

    let others = p_mu + n_d * p_dc + p_ram + p_lcxt + p_isi;
    let rho = d.afterpulse_ratio;
    let p_ap = rho / (1.0 - rho) * others;
    let noise = n_d * p_dc + p_ap + p_ram + p_lcxt + p_isi;
    let total = p_mu + noise;

    let qber = 0.5 * noise / (pr.beta * p_mu + noise);
    let clicks_per_s = total * f_rep_ghz * 1e9 * pr.duty;
    let eta_dead = 1.0 / (1.0 + clicks_per_s * d.dead_time_us * 1e-6 / n_d);
    let r_raw = total * f_rep_ghz * 1e9 * pr.duty * eta_dead;
    let r_sift = 0.5 * (pr.beta * p_mu + noise) * f_rep_ghz * 1e9 * pr.duty * eta_dead;

    let i_ab = 1.0 - pr.ec_penalty * binary_entropy(qber);
    let mu_f = mu * t_f;
    let i_ae = mu * (1.0 - t_f) + (1.0 - pr.visibility) * (1.0 + (-mu_f).exp()) / (2.0 * (-mu_f).exp());
    let r_sec = if qber > pr.qber_threshold || i_ab <= i_ae {
        0.0
    } else {
        r_sift * (i_ab - i_ae)
    };

    Rates {
        qber,
        r_raw,
        r_sift,
        r_sec,
        p_mu,
        p_isi,
        p_dc,
        p_ram,
        p_lcxt,
        t_isi,
        eta_dead,
    }
}

/// Secret key rate maximised over μ on a dense log grid.
pub fn dense_mu_max(s: &LinkScenario, f_rep_ghz: f64, points: usize) -> (f64, f64) {
    let (lo, hi): (f64, f64) = (1e-4, 2.0);
    (0..points)
        .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
        .map(|mu| (mu, evaluate(s, f_rep_ghz, mu).r_sec))
        .fold((0.0, f64::NEG_INFINITY), |best, x| if x.1 > best.1 { x } else { best })
}
