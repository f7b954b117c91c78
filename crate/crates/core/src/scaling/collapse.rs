//! Collapse quality and the exponent fit.
//!
//! Each sample `(u, N, E)` maps to `x = q N^(1/(2ν))`, `y = E / |q|^y_E` with
//! `q = u − u_c`. Every point of every curve is compared with the linear
//! interpolation of each other curve whose `x` range covers it. The residual
//! is the mean of these squared differences divided by the variance of all
//! `y`, so it does not depend on the units of `E`.
//!
//! With `y_E = 0` the division is skipped. Otherwise samples with
//! `|q| < 1e-8` are dropped before the transform.

use serde::{Deserialize, Serialize};

use super::curves::EntanglementCurve;
use super::simplex::{nelder_mead, SimplexOptions};
use crate::{Error, Result};

pub const MIN_CURVES: usize = 2;
pub const MIN_POINTS: usize = 4;
/// Samples this close to `u_c` are dropped when `y_E != 0`.
pub const Q_EXCLUSION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseParams {
    pub u_c: f64,
    pub nu: f64,
    pub y_e: f64,
}

impl CollapseParams {
    pub fn new(u_c: f64, nu: f64, y_e: f64) -> Self {
        Self { u_c, nu, y_e }
    }

    fn to_vec(self) -> [f64; 3] {
        [self.u_c, self.nu, self.y_e]
    }

    fn from_slice(v: &[f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// Which parameters the fit holds at their initial values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FixedMask {
    pub u_c: bool,
    pub nu: bool,
    pub y_e: bool,
}

impl FixedMask {
    pub const NONE: FixedMask = FixedMask {
        u_c: false,
        nu: false,
        y_e: false,
    };
    pub const ALL: FixedMask = FixedMask {
        u_c: true,
        nu: true,
        y_e: true,
    };
    /// Only `y_E` fixed.
    pub const Y_E: FixedMask = FixedMask {
        u_c: false,
        nu: false,
        y_e: true,
    };

    fn as_array(self) -> [bool; 3] {
        [self.u_c, self.nu, self.y_e]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseFit {
    pub u_c: f64,
    pub nu: f64,
    pub y_e: f64,
    pub residual: f64,
    pub fixed: FixedMask,
    pub evaluations: usize,
    pub converged: bool,
}

impl CollapseFit {
    pub fn params(&self) -> CollapseParams {
        CollapseParams::new(self.u_c, self.nu, self.y_e)
    }
}

/// One curve after the scaling transform, sorted by `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledCurve {
    pub n_sites: u64,
    pub points: Vec<(f64, f64)>,
}

/// Applies the scaling transform to every curve.
pub fn transform(curves: &[EntanglementCurve], params: &CollapseParams) -> Result<Vec<ScaledCurve>> {
    if !(params.nu > 0.0) || !params.nu.is_finite() {
        return Err(Error::CollapseInput(format!("nu > 0, got {}", params.nu)));
    }
    curves
        .iter()
        .map(|c| {
            let stretch = (c.n_sites as f64).powf(1.0 / (2.0 * params.nu));
            let mut points: Vec<(f64, f64)> = c
                .samples
                .iter()
                .filter_map(|s| {
                    let q = s.u - params.u_c;
                    if params.y_e == 0.0 {
                        Some((q * stretch, s.value))
                    } else if q.abs() < Q_EXCLUSION {
                        None
                    } else {
                        Some((q * stretch, s.value / q.abs().powf(params.y_e)))
                    }
                })
                .collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Ok(ScaledCurve {
                n_sites: c.n_sites,
                points,
            })
        })
        .collect()
}

fn validate(curves: &[EntanglementCurve]) -> Result<()> {
    if curves.len() < MIN_CURVES {
        return Err(Error::CollapseInput(format!(
            "at least {MIN_CURVES} curves, got {}",
            curves.len()
        )));
    }
    if let Some(c) = curves.iter().find(|c| c.samples.len() < MIN_POINTS) {
        return Err(Error::CollapseInput(format!(
            "at least {MIN_POINTS} points per curve, N = {} has {}",
            c.n_sites,
            c.samples.len()
        )));
    }
    if curves.iter().flat_map(|c| &c.samples).any(|s| !s.u.is_finite() || !s.value.is_finite()) {
        return Err(Error::CollapseInput("finite samples".into()));
    }
    Ok(())
}

/// Linear interpolation of `points` (sorted by x) at `x`, if inside.
fn interpolate(points: &[(f64, f64)], x: f64) -> Option<f64> {
    let (first, last) = (points.first()?, points.last()?);
    if x < first.0 || x > last.0 {
        return None;
    }
    let hi = points.partition_point(|p| p.0 < x);
    if hi == 0 {
        return Some(first.1);
    }
    let (x0, y0) = points[hi - 1];
    let (x1, y1) = points[hi.min(points.len() - 1)];
    if x1 == x0 {
        return Some(0.5 * (y0 + y1));
    }
    Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}

/// Normalized collapse residual; zero for a perfect collapse.
pub fn collapse_residual(curves: &[EntanglementCurve], params: &CollapseParams) -> Result<f64> {
    validate(curves)?;
    let scaled = transform(curves, params)?;

    let ys: Vec<f64> = scaled.iter().flat_map(|c| c.points.iter().map(|p| p.1)).collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let variance = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / ys.len() as f64;

    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, curve) in scaled.iter().enumerate() {
        for &(x, y) in &curve.points {
            for (j, other) in scaled.iter().enumerate() {
                if i == j {
                    continue;
                }
                if let Some(yo) = interpolate(&other.points, x) {
                    sum += (y - yo).powi(2);
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::NoOverlap);
    }
    let msd = sum / count as f64;
    if variance > 0.0 {
        Ok(msd / variance)
    } else {
        Ok(msd)
    }
}

/// Minimizes the collapse residual over the parameters not in `fixed`.
pub fn fit_collapse(
    curves: &[EntanglementCurve],
    init: &CollapseParams,
    fixed: FixedMask,
) -> Result<CollapseFit> {
    fit_collapse_with(curves, init, fixed, &SimplexOptions::default())
}

pub fn fit_collapse_with(
    curves: &[EntanglementCurve],
    init: &CollapseParams,
    fixed: FixedMask,
    options: &SimplexOptions,
) -> Result<CollapseFit> {
    let start = collapse_residual(curves, init)?;
    if !start.is_finite() {
        return Err(Error::CollapseInput("finite residual at the initial point".into()));
    }
    let base = init.to_vec();
    let mask = fixed.as_array();
    let free: Vec<usize> = (0..3).filter(|&i| !mask[i]).collect();
    let assemble = |x: &[f64]| {
        let mut full = base;
        for (&i, &v) in free.iter().zip(x) {
            full[i] = v;
        }
        CollapseParams::from_slice(&full)
    };
    let x0: Vec<f64> = free.iter().map(|&i| base[i]).collect();
    let result = nelder_mead(
        |x| collapse_residual(curves, &assemble(x)).unwrap_or(f64::INFINITY),
        &x0,
        options,
    );
    let best = assemble(&result.x);
    Ok(CollapseFit {
        u_c: best.u_c,
        nu: best.nu,
        y_e: best.y_e,
        residual: result.value,
        fixed,
        evaluations: result.evaluations,
        converged: result.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::curves::{linear_grid, CurveSample};

    fn synthetic(u_c: f64, nu: f64, y_e: f64, sizes: &[u64]) -> Vec<EntanglementCurve> {
        sizes
            .iter()
            .map(|&n| {
                let samples = linear_grid(u_c - 3.0, u_c + 3.0, 161)
                    .into_iter()
                    .map(|u| {
                        let q: f64 = u - u_c;
                        let x = q * (n as f64).powf(1.0 / (2.0 * nu));
                        CurveSample {
                            u,
                            value: q.abs().powf(y_e) * (1.5 - 0.5 * (x / 3.0).tanh()),
                        }
                    })
                    .collect();
                EntanglementCurve::new("E_bb", n, samples).unwrap()
            })
            .collect()
    }

    #[test]
    fn exact_parameters_collapse_perfectly() {
        let curves = synthetic(4.0, 1.0, 0.0, &[7, 49, 343]);
        let r = collapse_residual(&curves, &CollapseParams::new(4.0, 1.0, 0.0)).unwrap();
        assert!(r < 1e-3, "{r}");
        let off = collapse_residual(&curves, &CollapseParams::new(4.5, 1.0, 0.0)).unwrap();
        assert!(off > 10.0 * r);
    }

    #[test]
    fn fit_recovers_synthetic_exponents() {
        let curves = synthetic(4.0, 1.0, 0.0, &[7, 49, 343]);
        let fit = fit_collapse(&curves, &CollapseParams::new(4.3, 1.3, 0.0), FixedMask::Y_E).unwrap();
        assert!((fit.u_c - 4.0).abs() < 0.005 * 4.0, "{fit:?}");
        assert!((fit.nu - 1.0).abs() < 0.05, "{fit:?}");
        assert_eq!(fit.y_e, 0.0);
    }

    #[test]
    fn residual_ignores_curve_order() {
        let mut curves = synthetic(4.0, 1.0, 0.0, &[7, 49, 343]);
        let p = CollapseParams::new(4.2, 0.9, 0.0);
        let a = collapse_residual(&curves, &p).unwrap();
        curves.reverse();
        let b = collapse_residual(&curves, &p).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn nonzero_y_e_drops_the_critical_sample() {
        let curves = synthetic(4.0, 1.0, 0.5, &[7, 49]);
        let p = CollapseParams::new(curves[0].samples[10].u, 1.0, 0.5);
        let scaled = transform(&curves, &p).unwrap();
        assert_eq!(scaled[0].points.len(), curves[0].samples.len() - 1);
        assert!(collapse_residual(&curves, &p).unwrap().is_finite());
    }

    #[test]
    fn disjoint_curves_have_no_overlap() {
        let a = EntanglementCurve::new(
            "E_bb",
            7,
            (0..5).map(|i| CurveSample { u: i as f64, value: 1.0 }).collect(),
        )
        .unwrap();
        let b = EntanglementCurve::new(
            "E_bb",
            7,
            (0..5).map(|i| CurveSample { u: 100.0 + i as f64, value: 1.0 }).collect(),
        )
        .unwrap();
        assert!(matches!(
            collapse_residual(&[a, b], &CollapseParams::new(0.0, 1.0, 0.0)),
            Err(Error::NoOverlap)
        ));
    }

    #[test]
    fn rejects_too_few_curves_or_points() {
        let curves = synthetic(4.0, 1.0, 0.0, &[7]);
        assert!(collapse_residual(&curves, &CollapseParams::new(4.0, 1.0, 0.0)).is_err());
        let short = EntanglementCurve::new(
            "E_bb",
            49,
            (0..3).map(|i| CurveSample { u: i as f64, value: 1.0 }).collect(),
        )
        .unwrap();
        let mut two = curves.clone();
        two.push(short);
        assert!(collapse_residual(&two, &CollapseParams::new(4.0, 1.0, 0.0)).is_err());
        assert!(collapse_residual(&curves, &CollapseParams::new(4.0, -1.0, 0.0)).is_err());
    }
}
