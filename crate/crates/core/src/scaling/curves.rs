//! Observables sampled over a `u` grid and a set of levels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{report, EntanglementReport, LogBase};
use crate::rg::{rg_flow, sites_at_level, RgConfig};
use crate::{Error, Result};

/// Largest level a scan may request; the top problem then covers `7^9` sites.
pub const MAX_LEVEL: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    /// Central effective site vs rest, bits.
    Ebb,
    /// Rim effective site vs rest, bits.
    Eb7,
    /// `(2 E_bb + E_b7) / 7`, bits.
    Eavg,
    /// Bare central site vs rest, in the requested base.
    Esingle,
    /// Charge gap of the top problem in bare units.
    Gap,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::Ebb,
        Observable::Eb7,
        Observable::Eavg,
        Observable::Esingle,
        Observable::Gap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Ebb => "E_bb",
            Observable::Eb7 => "E_b7",
            Observable::Eavg => "E_avg",
            Observable::Esingle => "E_single",
            Observable::Gap => "gap",
        }
    }

    pub fn extract(self, r: &EntanglementReport) -> f64 {
        match self {
            Observable::Ebb => r.e_bb,
            Observable::Eb7 => r.e_b7,
            Observable::Eavg => r.e_avg,
            Observable::Esingle => r.e_single,
            Observable::Gap => r.gap,
        }
    }
}

impl std::str::FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown observable {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub u: f64,
    pub value: f64,
}

/// Samples of one observable at one system size, sorted by strictly
/// increasing `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementCurve {
    pub observable: String,
    pub n_sites: u64,
    pub samples: Vec<CurveSample>,
}

impl EntanglementCurve {
    /// Builds a curve, sorting by `u` and rejecting repeated `u`.
    pub fn new(observable: impl Into<String>, n_sites: u64, mut samples: Vec<CurveSample>) -> Result<Self> {
        samples.sort_by(|a, b| a.u.total_cmp(&b.u));
        if samples.windows(2).any(|w| w[0].u >= w[1].u) {
            return Err(Error::CollapseInput(format!("strictly increasing u for N = {n_sites}")));
        }
        Ok(Self {
            observable: observable.into(),
            n_sites,
            samples,
        })
    }
}

/// `count` evenly spaced points on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// 41 points on `[0.2 u*, 1.8 u*]`.
pub fn default_grid(u_star: f64) -> Vec<f64> {
    linear_grid(0.2 * u_star, 1.8 * u_star, 41)
}

fn check_levels(levels: &[usize]) -> Result<usize> {
    let max = *levels
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidParameter("empty level list".into()))?;
    if max > MAX_LEVEL {
        return Err(Error::InvalidParameter(format!("level {max} above {MAX_LEVEL}")));
    }
    Ok(max)
}

/// Reports for every `(u, level)`, outer index over `u` in grid order. Each
/// grid point is an independent flow, computed in parallel; a failure at one
/// point does not stop the others.
pub fn scan_reports(
    u_grid: &[f64],
    levels: &[usize],
    single_base: LogBase,
    config: &RgConfig,
) -> Result<Vec<Result<Vec<EntanglementReport>>>> {
    let max = check_levels(levels)?;
    Ok(u_grid
        .par_iter()
        .map(|&u| {
            let traj = rg_flow(u, max + 1, config)?;
            levels.iter().map(|&l| report(&traj, l, single_base)).collect()
        })
        .collect())
}

/// One curve per level of `observable`, `N = 7^(level + 1)`.
pub fn build_curves(
    u_grid: &[f64],
    levels: &[usize],
    observable: Observable,
    single_base: LogBase,
    config: &RgConfig,
) -> Result<Vec<EntanglementCurve>> {
    let rows = scan_reports(u_grid, levels, single_base, config)?
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    curves_from_reports(u_grid, levels, &rows, observable)
}

/// Regroups scan rows (outer `u`, inner level) into curves.
pub fn curves_from_reports(
    u_grid: &[f64],
    levels: &[usize],
    rows: &[Vec<EntanglementReport>],
    observable: Observable,
) -> Result<Vec<EntanglementCurve>> {
    levels
        .iter()
        .enumerate()
        .map(|(li, &level)| {
            let samples = u_grid
                .iter()
                .zip(rows)
                .map(|(&u, row)| CurveSample {
                    u,
                    value: observable.extract(&row[li]),
                })
                .collect();
            EntanglementCurve::new(observable.name(), sites_at_level(level), samples)
        })
        .collect()
}

/// Charge-gap curves in units of the bare hopping.
pub fn gap_curves(u_grid: &[f64], levels: &[usize], config: &RgConfig) -> Result<Vec<EntanglementCurve>> {
    build_curves(u_grid, levels, Observable::Gap, LogBase::Two, config)
}
