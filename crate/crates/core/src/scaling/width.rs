//! Width of the entanglement step between the two plateaus.

use serde::{Deserialize, Serialize};

use crate::entanglement::block_block_entanglement;
use crate::rg::{rg_flow, RgConfig};
use crate::{Error, Result};

/// `E_bb` leaves the metal plateau here.
pub const UPPER_THRESHOLD: f64 = 1.75;
/// `E_bb` reaches the insulator plateau here.
pub const LOWER_THRESHOLD: f64 = 1.25;

/// Bisection stops when the bracket shrinks below this fraction of its
/// starting width.
const RELATIVE_TOL: f64 = 1e-4;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionWidth {
    pub level: usize,
    /// Where `E_bb` crosses the upper threshold.
    pub u_upper: f64,
    /// Where `E_bb` crosses the lower threshold.
    pub u_lower: f64,
    pub width: f64,
}

fn e_bb(u0: f64, level: usize, config: &RgConfig) -> Result<f64> {
    let traj = rg_flow(u0, level + 1, config)?;
    Ok(block_block_entanglement(&traj, level)?.0)
}

/// A `u` in `[lo, hi]` where `E_bb(level) − threshold` changes sign.
fn crossing(lo: f64, hi: f64, threshold: f64, level: usize, config: &RgConfig) -> Result<f64> {
    let g = |u: f64| e_bb(u, level, config).map(|e| e - threshold);
    let (mut lo, mut hi) = (lo, hi);
    let g_lo = g(lo)?;
    let g_hi = g(hi)?;
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let tol = RELATIVE_TOL * (hi - lo);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid)?.signum() == g_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Width of the `E_bb` step at `level`, searched in `[lo, hi]` where `lo`
/// lies on the metal plateau and `hi` on the insulating one.
pub fn transition_width(level: usize, lo: f64, hi: f64, config: &RgConfig) -> Result<TransitionWidth> {
    let u_upper = crossing(lo, hi, UPPER_THRESHOLD, level, config)?;
    let u_lower = crossing(lo, hi, LOWER_THRESHOLD, level, config)?;
    Ok(TransitionWidth {
        level,
        u_upper,
        u_lower,
        width: u_lower - u_upper,
    })
}

/// Widths for ascending `levels`. The step narrows around the fixed point as
/// the level grows, so the crossings of one level bracket those of the next;
/// the full bracket is used again whenever that fails.
pub fn transition_widths(
    levels: &[usize],
    lo: f64,
    hi: f64,
    config: &RgConfig,
) -> Result<Vec<TransitionWidth>> {
    let mut out: Vec<TransitionWidth> = Vec::with_capacity(levels.len());
    for &level in levels {
        let narrowed = out.last().and_then(|prev| {
            let (a, b) = (prev.u_upper.min(prev.u_lower), prev.u_upper.max(prev.u_lower));
            let pad = 0.5 * (b - a);
            transition_width(level, a - pad, b + pad, config).ok()
        });
        let w = match narrowed {
            Some(w) => w,
            None => transition_width(level, lo, hi, config)?,
        };
        out.push(w);
    }
    Ok(out)
}
