//! Per-link optimizations: mean photon number, operating point, DCF length
//! and reach.

use serde::Serialize;

use crate::dispersion::{max_rep_rate, TimingPoint};
use crate::link::{FiberSpec, LinkScenario, PrecompSpec};
use crate::metrics::{key_rates, DetectionBudget, KeyRateReport};
use crate::noise::NoiseBudget;
use crate::solve::golden_section_max;
use crate::{ModelError, Result};

/// Search settings for the mean photon number.
///
/// The upper bound of 2 keeps μ in the few-photon regime where the COW
/// information bound is meaningful; the secret key rate is already negative
/// well below it on any lossy link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuSearch {
    pub lower: f64,
    pub upper: f64,
    /// Points of the logarithmic seeding grid, endpoints included.
    pub grid_points: usize,
    /// Relative bracket width at which golden-section refinement stops.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for MuSearch {
    fn default() -> Self {
        MuSearch {
            lower: 1e-4,
            upper: 2.0,
            grid_points: 64,
            rel_tol: 1e-10,
            max_iter: 200,
        }
    }
}

impl MuSearch {
    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.grid_points.max(2);
        let ratio = (self.upper / self.lower).ln();
        (0..n).map(move |i| {
            if i + 1 == n {
                self.upper
            } else {
                self.lower * (ratio * i as f64 / (n - 1) as f64).exp()
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizationResult {
    /// `None` when no photon number gives a positive secret key rate.
    pub mu_opt: Option<f64>,
    pub r_sec_opt: f64,
    pub f_rep_ghz: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// A scenario frozen at one repetition rate; only μ is left free.
struct OperatingPoint<'a> {
    scenario: &'a LinkScenario,
    timing: TimingPoint,
    background: NoiseBudget,
}

impl<'a> OperatingPoint<'a> {
    fn new(scenario: &'a LinkScenario, f_rep_ghz: f64) -> Self {
        let timing = TimingPoint::new(scenario, f_rep_ghz);
        let background = NoiseBudget::background(scenario, timing.gate_ns());
        OperatingPoint {
            scenario,
            timing,
            background,
        }
    }

    fn rates(&self, mu: f64) -> Result<KeyRateReport> {
        let budget = DetectionBudget::assemble(self.scenario, &self.timing, self.background, mu)?;
        Ok(key_rates(&budget, &self.scenario.protocol, &self.scenario.detector))
    }

    fn search(&self, search: &MuSearch) -> Result<(OptimizationResult, KeyRateReport)> {
        let mut evaluations = 0;
        let mut grid = Vec::with_capacity(search.grid_points);
        for mu in search.grid() {
            grid.push((mu, self.rates(mu)?));
            evaluations += 1;
        }
        let best = grid
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.r_sec.total_cmp(&b.1 .1.r_sec))
            .map(|(i, _)| i)
            .unwrap_or(0);

        if !(grid[best].1.r_sec > 0.0) {
            // No key anywhere: report the point closest to producing one.
            let (_, report) = grid
                .into_iter()
                .max_by(|a, b| a.1.r_sec_unclamped.total_cmp(&b.1.r_sec_unclamped))
                .expect("grid has at least two points");
            let result = OptimizationResult {
                mu_opt: None,
                r_sec_opt: 0.0,
                f_rep_ghz: self.timing.f_rep_ghz,
                converged: true,
                evaluations,
            };
            return Ok((result, KeyRateReport { mu_opt: None, ..report }));
        }

        let lo = grid[best.saturating_sub(1)].0;
        let hi = grid[(best + 1).min(grid.len() - 1)].0;
        let objective = |mu: f64| {
            evaluations += 1;
            self.rates(mu).map_or(f64::NEG_INFINITY, |r| r.r_sec)
        };
        let (refined, r_sec) = golden_section_max(objective, lo, hi, search.rel_tol, search.max_iter);

        let (mu_opt, report) = if r_sec >= grid[best].1.r_sec {
            (refined.x, self.rates(refined.x)?)
        } else {
            let (mu, report) = grid.swap_remove(best);
            (mu, report)
        };
        let result = OptimizationResult {
            mu_opt: Some(mu_opt),
            r_sec_opt: report.r_sec,
            f_rep_ghz: self.timing.f_rep_ghz,
            converged: refined.converged,
            evaluations,
        };
        Ok((result, report))
    }
}

/// Maximises the secret key rate over μ at a fixed repetition rate.
pub fn optimize_mu(scenario: &LinkScenario, f_rep_ghz: f64) -> Result<OptimizationResult> {
    optimize_mu_with(scenario, f_rep_ghz, &MuSearch::default())
}

pub fn optimize_mu_with(scenario: &LinkScenario, f_rep_ghz: f64, search: &MuSearch) -> Result<OptimizationResult> {
    if !(f_rep_ghz > 0.0) {
        return Err(ModelError::invalid("f_rep_ghz", f_rep_ghz, "must be positive"));
    }
    scenario.validate()?;
    Ok(OperatingPoint::new(scenario, f_rep_ghz).search(search)?.0)
}

/// Secret key rate at a given μ and repetition rate, without optimisation.
pub fn rates_at(scenario: &LinkScenario, f_rep_ghz: f64, mu: f64) -> Result<KeyRateReport> {
    scenario.validate()?;
    OperatingPoint::new(scenario, f_rep_ghz).rates(mu)
}

/// Full evaluation of one link: repetition rate from the ISI budget, then
/// the optimal μ at that rate.
pub fn evaluate_point(scenario: &LinkScenario) -> Result<KeyRateReport> {
    evaluate_point_with(scenario, &MuSearch::default())
}

pub fn evaluate_point_with(scenario: &LinkScenario, search: &MuSearch) -> Result<KeyRateReport> {
    scenario.validate()?;
    let f_rep = max_rep_rate(scenario);
    let (_, report) = OperatingPoint::new(scenario, f_rep).search(search)?;
    Ok(report)
}

/// DCF length (km) whose accumulated dispersion cancels `target_km` of the
/// transmission fiber.
pub fn dcf_length_for_reach(target_km: f64, fiber: &FiberSpec, dcf: &FiberSpec) -> Result<f64> {
    if !(target_km >= 0.0) {
        return Err(ModelError::invalid("target_km", target_km, "must be non-negative"));
    }
    if target_km == 0.0 {
        return Ok(0.0);
    }
    let d_dcf = dcf.dispersion_ps_nm_km;
    let d_fiber = fiber.dispersion_ps_nm_km;
    if d_dcf == 0.0 {
        return Err(ModelError::invalid(
            "dcf.dispersion_ps_nm_km",
            d_dcf,
            "compensating fiber has no dispersion",
        ));
    }
    if d_fiber * d_dcf > 0.0 {
        return Err(ModelError::invalid(
            "dcf.dispersion_ps_nm_km",
            d_dcf,
            "must be opposite in sign to the transmission fiber dispersion",
        ));
    }
    Ok(target_km * d_fiber.abs() / d_dcf.abs())
}

impl PrecompSpec {
    /// DCF spool that fully compensates `target_km` of `fiber`.
    pub fn sized_for(target_km: f64, fiber: &FiberSpec, dcf: &FiberSpec) -> Result<Self> {
        Ok(PrecompSpec {
            dcf: dcf.clone(),
            length_km: dcf_length_for_reach(target_km, fiber, dcf)?,
        })
    }
}

/// Settings for [`reach_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachSearch {
    pub max_km: f64,
    pub coarse_step_km: f64,
    pub fine_tol_km: f64,
}

impl Default for ReachSearch {
    fn default() -> Self {
        ReachSearch {
            max_km: 1000.0,
            coarse_step_km: 5.0,
            fine_tol_km: 0.1,
        }
    }
}

/// Longest link (km) on which the secret key rate stays at or above
/// `skr_floor` with QBER within the protocol threshold; 0 if never met.
pub fn reach(scenario: &LinkScenario, skr_floor: f64) -> Result<f64> {
    reach_with(scenario, skr_floor, &ReachSearch::default())
}

pub fn reach_with(scenario: &LinkScenario, skr_floor: f64, search: &ReachSearch) -> Result<f64> {
    if !(skr_floor > 0.0) {
        return Err(ModelError::invalid("skr_floor", skr_floor, "must be positive"));
    }
    scenario.validate()?;
    if skr_floor.is_infinite() {
        return Ok(0.0);
    }
    let threshold = scenario.protocol.qber_threshold;
    let meets = |length: f64| -> bool {
        evaluate_point(&scenario.with_length(length)).is_ok_and(|r| {
            r.r_sec >= skr_floor && r.qber.is_some_and(|q| q <= threshold)
        })
    };

    let steps = (search.max_km / search.coarse_step_km).floor() as usize;
    let mut last_ok = None;
    for i in 0..=steps {
        let length = i as f64 * search.coarse_step_km;
        if meets(length) {
            last_ok = Some(length);
        }
    }
    let Some(lo) = last_ok else {
        return Ok(0.0);
    };
    let hi = (lo + search.coarse_step_km).min(search.max_km);
    if hi <= lo {
        return Ok(lo);
    }
    Ok(crate::solve::bisect_boundary(meets, lo, hi, search.fine_tol_km, 64).x)
}
