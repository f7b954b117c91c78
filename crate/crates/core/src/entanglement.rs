//! Occupation-space entanglement of sites and blocks.
//!
//! For an eigenstate with fixed particle number and `S_z`, the reduced density
//! matrix of one site is diagonal in `{|0>, |↑>, |↓>, |↑↓>}`: any off-diagonal
//! element would connect configurations of the rest of the system with
//! different charge or spin. The entanglement of a site with everything else
//! is then the Shannon entropy of its occupation distribution.
//!
//! Block quantities are measured on renormalized sites. The top 7-site problem
//! at level `k` has sites that each stand for `7^k` bare sites. The descent
//! chain (products of the row-stochastic descent matrices recorded by the
//! flow) maps the distribution of an effective site onto that of its central
//! sub-site one level down.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ed::{GroundMultiplet, SectorBasis};
use crate::rg::{rg_flow, RgConfig, RgTrajectory};
use crate::{Error, Result};

/// Occupation probabilities of one site, ordered `[empty, up, down, double]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupationDistribution(pub [f64; 4]);

pub const EMPTY: usize = 0;
pub const UP: usize = 1;
pub const DOWN: usize = 2;
pub const DOUBLE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    /// bits
    Two,
    /// nats
    E,
}

impl LogBase {
    pub fn label(self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => Err(Error::InvalidParameter(format!("entropy base {other:?}"))),
        }
    }
}

impl OccupationDistribution {
    pub fn uniform() -> Self {
        Self([0.25; 4])
    }

    pub fn point(state: usize) -> Self {
        let mut p = [0.0; 4];
        p[state] = 1.0;
        Self(p)
    }

    pub fn p_empty(&self) -> f64 {
        self.0[EMPTY]
    }

    pub fn p_up(&self) -> f64 {
        self.0[UP]
    }

    pub fn p_down(&self) -> f64 {
        self.0[DOWN]
    }

    pub fn p_double(&self) -> f64 {
        self.0[DOUBLE]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Average with the spin-exchanged distribution, so `p_up == p_down`.
    pub fn spin_symmetrized(&self) -> Self {
        let s = 0.5 * (self.0[UP] + self.0[DOWN]);
        Self([self.0[EMPTY], s, s, self.0[DOUBLE]])
    }

    pub fn spin_swapped(&self) -> Self {
        Self([self.0[EMPTY], self.0[DOWN], self.0[UP], self.0[DOUBLE]])
    }

    /// Row vector times a row-stochastic matrix.
    pub fn propagate(&self, w: &[[f64; 4]; 4]) -> Self {
        let mut out = [0.0; 4];
        for (row, &p) in w.iter().zip(&self.0) {
            for (o, &x) in out.iter_mut().zip(row) {
                *o += p * x;
            }
        }
        Self(out)
    }

    pub fn entropy(&self, base: LogBase) -> f64 {
        entropy(self, base)
    }
}

/// `-Σ p log p` with `0 log 0 = 0`.
pub fn entropy(dist: &OccupationDistribution, base: LogBase) -> f64 {
    let nats: f64 = dist
        .0
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    match base {
        LogBase::E => nats,
        LogBase::Two => nats / std::f64::consts::LN_2,
    }
}

/// Occupation index of `site` in a configuration: 0 empty, 1 up, 2 down,
/// 3 double.
fn occupation_index(up: u32, down: u32, site: usize) -> usize {
    let u = ((up >> site) & 1) as usize;
    let d = ((down >> site) & 1) as usize;
    u + 2 * d
}

/// Occupation distribution of `site` in a unit-norm sector state.
pub fn site_distribution(
    state: &[f64],
    basis: &SectorBasis,
    site: usize,
) -> Result<OccupationDistribution> {
    if site >= basis.nsites() {
        return Err(Error::SiteOutOfRange {
            site,
            nsites: basis.nsites(),
        });
    }
    let mut p = [0.0; 4];
    for (&(up, down), &amp) in basis.states().iter().zip(state) {
        p[occupation_index(up, down, site)] += amp * amp;
    }
    Ok(OccupationDistribution(p))
}

/// Site distribution averaged with equal weights over a ground multiplet,
/// which does not depend on the basis chosen inside the multiplet.
pub fn multiplet_site_distribution(
    multiplet: &GroundMultiplet,
    basis: &SectorBasis,
    site: usize,
) -> Result<OccupationDistribution> {
    let mut acc = [0.0; 4];
    for v in multiplet.vectors() {
        let d = site_distribution(v, basis, site)?;
        acc.iter_mut().zip(d.0).for_each(|(a, x)| *a += x);
    }
    let g = multiplet.len() as f64;
    Ok(OccupationDistribution(acc.map(|a| a / g)))
}

/// Full 4×4 one-site reduced density matrix, computed by embedding the state
/// in the whole Fock space and tracing out every other site. Only meant for
/// checking that the occupation distribution loses nothing.
pub fn brute_force_site_rdm(state: &[f64], basis: &SectorBasis, site: usize) -> DMatrix<f64> {
    // Reorder each configuration so the traced site comes first: moving its
    // operators to the front of the up and down strings produces the sign.
    let rest_mask = |m: u32| {
        let low = m & ((1 << site) - 1);
        let high = (m >> (site + 1)) << site;
        low | high
    };
    let mut amps: std::collections::BTreeMap<(u32, u32), [f64; 4]> = Default::default();
    for (&(up, down), &amp) in basis.states().iter().zip(state) {
        let occ = occupation_index(up, down, site);
        let below_up = (up & ((1 << site) - 1)).count_ones();
        let below_dn = (down & ((1 << site) - 1)).count_ones();
        let up_here = (up >> site) & 1;
        let dn_here = (down >> site) & 1;
        // c†_s↑ jumps over the up operators below it; c†_s↓ over those below
        // it plus all remaining up operators of the rest
        let swaps = up_here * below_up
            + dn_here * (below_dn + (up.count_ones() - up_here));
        let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
        amps.entry((rest_mask(up), rest_mask(down))).or_insert([0.0; 4])[occ] += sign * amp;
    }
    let mut rho = DMatrix::zeros(4, 4);
    for a in amps.values() {
        for i in 0..4 {
            for j in 0..4 {
                rho[(i, j)] += a[i] * a[j];
            }
        }
    }
    rho
}

/// Multiplies `p_top` by the descent matrices from `from_level` down to
/// `to_level`, giving the distribution of the central level-`to_level` site.
pub fn descend(
    p_top: &OccupationDistribution,
    traj: &RgTrajectory,
    from_level: usize,
    to_level: usize,
) -> Result<OccupationDistribution> {
    if to_level > from_level {
        return Err(Error::InvalidParameter(format!(
            "cannot descend from level {from_level} to {to_level}"
        )));
    }
    if from_level > traj.levels.len() {
        return Err(Error::LevelOutOfRange {
            requested: from_level,
            available: traj.levels.len(),
        });
    }
    let mut p = *p_top;
    for level in (to_level..from_level).rev() {
        p = p.propagate(&traj.levels[level].step.descent_w);
    }
    Ok(p)
}

fn top_level(traj: &RgTrajectory, level: usize) -> Result<&crate::rg::RgLevel> {
    traj.levels.get(level).ok_or(Error::LevelOutOfRange {
        requested: level,
        available: traj.levels.len(),
    })
}

/// Spin-symmetrized occupation distribution of the central effective site of
/// the top problem at `level`.
pub fn top_center_distribution(traj: &RgTrajectory, level: usize) -> Result<OccupationDistribution> {
    Ok(top_level(traj, level)?.step.center.spin_symmetrized())
}

/// `(E_bb, E_b7)` in bits: entropies of the central and of one rim effective
/// site of the top problem at `level`.
pub fn block_block_entanglement(traj: &RgTrajectory, level: usize) -> Result<(f64, f64)> {
    let step = &top_level(traj, level)?.step;
    Ok((
        step.center.spin_symmetrized().entropy(LogBase::Two),
        step.rim.spin_symmetrized().entropy(LogBase::Two),
    ))
}

/// `(2 E_bb + E_b7) / 7`.
pub fn average_entanglement(e_bb: f64, e_b7: f64) -> f64 {
    (2.0 * e_bb + e_b7) / 7.0
}

/// Entropy of a bare site at the centre of the top problem at `level`.
pub fn single_site_entanglement(traj: &RgTrajectory, level: usize, base: LogBase) -> Result<f64> {
    let p = top_center_distribution(traj, level)?;
    Ok(descend(&p, traj, level, 0)?.entropy(base))
}

/// Entanglement (bits) of a central block of `7^m` bare sites with the rest
/// of a `7^(total_level + 1)`-site system, for each `m` in `block_levels`.
/// Returns `(block_sites, E)` pairs.
pub fn block_entanglement_vs_size(
    u0: f64,
    total_level: usize,
    block_levels: &[usize],
    config: &RgConfig,
) -> Result<Vec<(u64, f64)>> {
    let traj = rg_flow(u0, total_level + 1, config)?;
    block_entanglement_curve(&traj, total_level, block_levels)
}

/// Same as [`block_entanglement_vs_size`] on an existing trajectory.
pub fn block_entanglement_curve(
    traj: &RgTrajectory,
    total_level: usize,
    block_levels: &[usize],
) -> Result<Vec<(u64, f64)>> {
    let top = top_center_distribution(traj, total_level)?;
    block_levels
        .iter()
        .map(|&m| {
            if m > total_level {
                return Err(Error::InvalidParameter(format!(
                    "block level {m} above total level {total_level}"
                )));
            }
            let p = descend(&top, traj, total_level, m)?;
            Ok((7u64.pow(m as u32), p.entropy(LogBase::Two)))
        })
        .collect()
}

/// One row of the entanglement report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub u0: f64,
    pub level: usize,
    /// Bare sites in the whole system, `7^(level + 1)`.
    pub n_sites: u64,
    pub e_bb: f64,
    pub e_b7: f64,
    pub e_avg: f64,
    pub e_single: f64,
    /// Charge gap of the top problem in units of the bare hopping.
    pub gap: f64,
    pub base: LogBase,
}

/// All observables for one `(u0, level)`. `E_bb`, `E_b7` and `E_avg` are in
/// bits; `E_single` uses `single_base`.
pub fn report(traj: &RgTrajectory, level: usize, single_base: LogBase) -> Result<EntanglementReport> {
    let (e_bb, e_b7) = block_block_entanglement(traj, level)?;
    Ok(EntanglementReport {
        u0: traj.u0,
        level,
        n_sites: crate::rg::sites_at_level(level),
        e_bb,
        e_b7,
        e_avg: average_entanglement(e_bb, e_b7),
        e_single: single_site_entanglement(traj, level, single_base)?,
        gap: traj.gap_at(level)?,
        base: single_base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert!((entropy(&OccupationDistribution::uniform(), LogBase::Two) - 2.0).abs() < 1e-15);
        let half = OccupationDistribution([0.0, 0.5, 0.5, 0.0]);
        assert!((entropy(&half, LogBase::Two) - 1.0).abs() < 1e-15);
        assert!((entropy(&half, LogBase::E) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(entropy(&OccupationDistribution::point(EMPTY), LogBase::Two), 0.0);
        assert_eq!(entropy(&OccupationDistribution::point(DOUBLE), LogBase::E), 0.0);
    }

    #[test]
    fn averages() {
        assert!((average_entanglement(2.0, 2.0) - 6.0 / 7.0).abs() < 1e-15);
        assert!((average_entanglement(1.0, 1.0) - 3.0 / 7.0).abs() < 1e-15);
        assert!((average_entanglement(2.0, 1.8) - 5.8 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn propagate_identity() {
        let id = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
        let p = OccupationDistribution([0.1, 0.2, 0.3, 0.4]);
        assert_eq!(p.propagate(&id), p);
    }

    #[test]
    fn site_out_of_range() {
        let b = SectorBasis::new(2, 1, 1).unwrap();
        assert!(site_distribution(&[0.5; 4], &b, 2).is_err());
    }

    #[test]
    fn base_parsing() {
        assert_eq!("2".parse::<LogBase>().unwrap(), LogBase::Two);
        assert_eq!("e".parse::<LogBase>().unwrap(), LogBase::E);
        assert!("10".parse::<LogBase>().is_err());
    }
}
