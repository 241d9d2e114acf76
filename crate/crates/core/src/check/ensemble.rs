//! Ensembles of main-bound cells and empirical calibration of the constant.
//!
//! A cell is one (measure, polynomial pair, delta) triple. All randomness is
//! split per cell group from the top-level seed, and cells carry a fixed
//! index, so runs are bit-identical no matter how many threads execute them.

use super::SIGMA_FLOOR;
use crate::error::{Error, Result};
use crate::measure::LogConcaveMeasure;
use crate::numeric::nth_root;
use crate::poly::{random_polynomial, Polynomial};
use crate::pushforward::{self, push};
use crate::rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Declarative description of a main-bound ensemble: for every trial and
/// measure, draw one pair (g, h) of degree-d polynomials and compare the
/// pushforwards of g and g + delta h across the delta grid on one shared
/// sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub d: u32,
    pub measures: Vec<LogConcaveMeasure>,
    pub trials: usize,
    pub coefficient_scale: f64,
    pub deltas: Vec<f64>,
    pub n: usize,
}

impl EnsembleSpec {
    /// Gaussian plus centered unit box in dimension 2, 10 trials over a
    /// 10-point logarithmic delta grid: 200 cells.
    pub fn default_for_degree(d: u32, n: usize) -> Self {
        EnsembleSpec {
            d,
            measures: vec![
                LogConcaveMeasure::standard_gaussian(2),
                LogConcaveMeasure::uniform_box(vec![-1.0, -1.0], vec![1.0, 1.0]).expect("valid box"),
            ],
            trials: 10,
            coefficient_scale: 1.0,
            deltas: super::log_grid(1e-3, 1e-1, 10),
            n,
        }
    }

    pub fn cells(&self) -> usize {
        self.trials * self.measures.len() * self.deltas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.measures.is_empty() || self.trials == 0 || self.deltas.is_empty() {
            return Err(Error::Empty("ensemble needs measures, trials and deltas"));
        }
        if self.d == 0 {
            return Err(Error::DegreeTooLow { required: 1, got: 0 });
        }
        if self.deltas.iter().any(|&d| !(d > 0.0)) || self.deltas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("deltas must be positive and strictly increasing".into()));
        }
        for m in &self.measures {
            m.validate()?;
        }
        Ok(())
    }
}

/// One ensemble cell outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub index: usize,
    pub measure: String,
    pub trial: usize,
    pub delta: f64,
    pub ratio: f64,
    pub tv: f64,
    pub tv_stderr: f64,
    pub sigma_g: f64,
    pub l2_diff: f64,
}

/// Empirical view of the degree-d constant: the max ratio over an ensemble
/// and its running-max trajectory in cell order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub d: u32,
    pub trials: usize,
    pub cells: usize,
    pub ratios: Vec<f64>,
    pub c_hat: f64,
    pub trajectory: Vec<f64>,
    pub records: Vec<CellRecord>,
}

/// Cells for one (measure, g, h) group over a delta grid, sharing one
/// sample set g-side and f-side (common random numbers).
pub fn main_bound_cells(
    m: &LogConcaveMeasure,
    g: &Polynomial,
    h: &Polynomial,
    d: u32,
    deltas: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<CellRecord>> {
    let s = m.sample(n, seed)?;
    let pf_g = push(&s, g)?;
    let (_, var_g) = pushforward::mean_and_variance(&pf_g);
    let sigma_g = var_g.sqrt();
    if sigma_g < SIGMA_FLOOR {
        return Err(Error::DegenerateVariance { floor: SIGMA_FLOOR });
    }
    let weight = nth_root(sigma_g, d);
    let measure_tag = serde_json::to_string(m)?;

    let mut out = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let f = g.add(&h.scale(delta))?;
        let pf_f = push(&s, &f)?;
        let tv = pushforward::tv_histogram(&pf_f, &pf_g, None)?;
        let diff = f.subtract(g)?;
        let l2 = pushforward::moment_norm(&push(&s, &diff)?, 2.0)?;
        let rhs_core = nth_root(l2, d);
        let lhs = weight * tv.tv;
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs_core };
        out.push(CellRecord {
            index: 0,
            measure: measure_tag.clone(),
            trial: 0,
            delta,
            ratio,
            tv: tv.tv,
            tv_stderr: tv.stderr,
            sigma_g,
            l2_diff: l2,
        });
    }
    Ok(out)
}

/// Run the ensemble and calibrate the empirical constant. Cell groups run
/// in parallel; output order is fixed by (trial, measure, delta).
pub fn estimate_constant(spec: &EnsembleSpec, seed: u64) -> Result<ConstantEstimate> {
    spec.validate()?;
    let groups: Vec<(usize, usize)> = (0..spec.trials)
        .flat_map(|t| (0..spec.measures.len()).map(move |mi| (t, mi)))
        .collect();

    let group_results: Vec<Result<Vec<CellRecord>>> = groups
        .par_iter()
        .map(|&(trial, mi)| {
            let m = &spec.measures[mi];
            let gid = (trial * spec.measures.len() + mi) as u64;
            let mut poly_rng = rng::stream(seed, &[3, gid]);
            let g = random_polynomial(m.dim(), spec.d, spec.coefficient_scale, &mut poly_rng);
            let h = random_polynomial(m.dim(), spec.d, spec.coefficient_scale, &mut poly_rng);
            let sample_seed: u64 = rng::stream(seed, &[2, gid]).random();
            let mut records = main_bound_cells(m, &g, &h, spec.d, &spec.deltas, spec.n, sample_seed)?;
            for r in records.iter_mut() {
                r.trial = trial;
            }
            Ok(records)
        })
        .collect();

    let mut records = Vec::with_capacity(spec.cells());
    for gr in group_results {
        records.extend(gr?);
    }
    for (i, r) in records.iter_mut().enumerate() {
        r.index = i;
    }

    let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    let mut trajectory = Vec::with_capacity(ratios.len());
    let mut running = 0.0f64;
    for &r in &ratios {
        running = running.max(r);
        trajectory.push(running);
    }
    let c_hat = running;

    Ok(ConstantEstimate {
        d: spec.d,
        trials: spec.trials,
        cells: records.len(),
        ratios,
        c_hat,
        trajectory,
        records,
    })
}

/// The measure list behind the default Carbery-Wright ensemble: Gaussian in
/// dimensions 1-4, centered unit boxes and unit-scale products of symmetric
/// exponentials in dimensions 1-3.
pub fn carbery_wright_default_measures() -> Vec<LogConcaveMeasure> {
    let mut out = Vec::new();
    for dim in 1..=4 {
        out.push(LogConcaveMeasure::standard_gaussian(dim));
    }
    for dim in 1..=3 {
        out.push(LogConcaveMeasure::uniform_box(vec![-1.0; dim], vec![1.0; dim]).expect("valid box"));
    }
    for dim in 1..=3 {
        out.push(LogConcaveMeasure::product_exponential(vec![1.0; dim]).expect("valid scales"));
    }
    out
}

/// Default degree-2 small-ball ensemble: 6 random polynomials per measure,
/// 60 cells. Returns one report per cell in deterministic order.
pub fn run_carbery_wright_ensemble(n: usize, seed: u64) -> Result<Vec<super::CarberyWrightReport>> {
    let measures = carbery_wright_default_measures();
    let trials = 6usize;
    let jobs: Vec<(usize, usize)> = (0..measures.len())
        .flat_map(|mi| (0..trials).map(move |t| (mi, t)))
        .collect();
    let results: Vec<Result<super::CarberyWrightReport>> = jobs
        .par_iter()
        .map(|&(mi, trial)| {
            let m = &measures[mi];
            let gid = (mi * trials + trial) as u64;
            let mut poly_rng = rng::stream(seed, &[5, gid]);
            let f = random_polynomial(m.dim(), 2, 1.0, &mut poly_rng);
            let cell_seed: u64 = rng::stream(seed, &[6, gid]).random();
            super::check_carbery_wright(m, &f, None, n, cell_seed)
        })
        .collect();
    results.into_iter().collect()
}
