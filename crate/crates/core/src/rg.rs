//! Real-space renormalization of the 7-site block.
//!
//! One step diagonalizes a block at couplings `(t, U)` and keeps four states
//! that play the roles of the bare site states:
//!
//! | label    | sector `(N↑, N↓)` | charge |
//! |----------|-------------------|--------|
//! | empty′   | (3, 3)            | −1     |
//! | up′      | (4, 3)            | 0      |
//! | down′    | (3, 4)            | 0      |
//! | double′  | (4, 4)            | +1     |
//!
//! The renormalized site then has on-site repulsion `U′ = E(empty′) +
//! E(double′) − 2 E(up′)`, the block charge gap, and hopping
//! `t′ = t |Σ_(i,j) A_i A_j|` with `A_k = <empty′| c_k↑ |up′>` summed over
//! the three bonds joining two neighbouring blocks.
//!
//! When a kept sector has a degenerate ground multiplet, the default policy
//! averages over it: the hopping becomes the root-mean-square transition
//! amplitude between the two multiplets and the descent rows are averaged
//! with equal weights. Both are independent of the basis chosen inside the
//! multiplet and reduce to the plain formulas for unique ground states.
//!
//! Each level is renormalized to `t = 1`, so the flow is a map `u → u′` of
//! `u = U/t` alone. Deep in the insulator the map grows without bound; the
//! block problem is then solved at `u_cap` instead, with the true energy
//! scale carried by the recorded scale factor.

use serde::{Deserialize, Serialize};

use crate::ed::{
    annihilate, solve_sector, spin_flip, Bond, EigenPair, GroundMultiplet, HubbardParams,
    SectorBasis, SolverConfig, Spin,
};
use crate::entanglement::{multiplet_site_distribution, OccupationDistribution};
use crate::lattice::{build_block_geometry, BlockGeometry};
use crate::{Error, Result};

pub const BLOCK_SITES: usize = 7;
/// Index of the block centre in the canonical geometry.
pub const CENTER_SITE: usize = 0;
/// The rim site standing for every rim site.
pub const RIM_SITE: usize = 1;

/// Bare sites in the whole system when the top problem sits at `level`.
pub fn sites_at_level(level: usize) -> u64 {
    7u64.pow(level as u32 + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KeptLabel {
    Empty,
    Up,
    Down,
    Double,
}

impl KeptLabel {
    /// Row order of the descent matrix.
    pub const ALL: [KeptLabel; 4] = [KeptLabel::Empty, KeptLabel::Up, KeptLabel::Down, KeptLabel::Double];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Charge relative to half filling.
    pub fn charge(self) -> i32 {
        match self {
            KeptLabel::Empty => -1,
            KeptLabel::Up | KeptLabel::Down => 0,
            KeptLabel::Double => 1,
        }
    }

    pub fn sector(self) -> (usize, usize) {
        match self {
            KeptLabel::Empty => (3, 3),
            KeptLabel::Up => (4, 3),
            KeptLabel::Down => (3, 4),
            KeptLabel::Double => (4, 4),
        }
    }
}

#[derive(Debug, Clone)]
pub struct KeptState {
    pub label: KeptLabel,
    pub basis: SectorBasis,
    pub multiplet: GroundMultiplet,
}

impl KeptState {
    pub fn energy(&self) -> f64 {
        self.multiplet.energy()
    }

    pub fn is_degenerate(&self) -> bool {
        self.multiplet.is_degenerate()
    }
}

/// The four block states that become one renormalized site, indexed by
/// [`KeptLabel::index`].
#[derive(Debug, Clone)]
pub struct KeptStates {
    pub params: HubbardParams,
    pub states: [KeptState; 4],
}

impl KeptStates {
    pub fn get(&self, label: KeptLabel) -> &KeptState {
        &self.states[label.index()]
    }

    pub fn energies(&self) -> [f64; 4] {
        KeptLabel::ALL.map(|l| self.get(l).energy())
    }

    pub fn degeneracy_flags(&self) -> [bool; 4] {
        KeptLabel::ALL.map(|l| self.get(l).is_degenerate())
    }

    pub fn multiplicities(&self) -> [usize; 4] {
        KeptLabel::ALL.map(|l| self.get(l).multiplet.len())
    }

    pub fn any_degenerate(&self) -> bool {
        self.degeneracy_flags().iter().any(|&d| d)
    }
}

/// What to do when a kept sector has a degenerate ground multiplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegeneracyPolicy {
    /// Fail with [`Error::Degenerate`].
    Strict,
    /// Average hopping and descent rows over the multiplet.
    MultipletAverage,
}

/// Which transition defines `t′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HoppingChannel {
    /// `empty′ ↔ up′` via `c↑`.
    Electron,
    /// `up′ ↔ double′` via `c↓`.
    Hole,
    /// Arithmetic mean of the two.
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgConfig {
    pub solver: SolverConfig,
    pub degeneracy: DegeneracyPolicy,
    pub channel: HoppingChannel,
    /// Neighbour direction whose boundary bonds define `t′`.
    pub direction: usize,
    /// Largest `u` at which a block is actually diagonalized.
    pub u_cap: f64,
}

impl Default for RgConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            degeneracy: DegeneracyPolicy::MultipletAverage,
            channel: HoppingChannel::Electron,
            direction: 0,
            u_cap: 1000.0,
        }
    }
}

/// Output of one renormalization step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgStepResult {
    pub t_next: f64,
    #[serde(rename = "U_next")]
    pub u_next: f64,
    /// Per-site offset of the renormalized site, the mean of the charged
    /// block energies.
    pub e0_next: f64,
    /// Half the energy difference of the charged block states. It multiplies
    /// `Σ (n_i − 1)` and so never changes a fixed-charge energy difference.
    pub mu_next: f64,
    /// `descent_w[r][c]`: probability of centre occupation `c` given kept state
    /// `r`, both in the order empty, up, down, double.
    pub descent_w: [[f64; 4]; 4],
    /// Kept energies in label order.
    pub kept_energies: [f64; 4],
    pub multiplicities: [usize; 4],
    pub t_electron: f64,
    pub t_hole: f64,
    /// Centre-site distribution of up′ (unsymmetrized).
    pub center: OccupationDistribution,
    /// Rim-site distribution of up′ (unsymmetrized).
    pub rim: OccupationDistribution,
}

impl RgStepResult {
    /// `u′ = U′ / t′`.
    pub fn ratio(&self) -> f64 {
        self.u_next / self.t_next
    }

    pub fn any_degenerate(&self) -> bool {
        self.multiplicities.iter().any(|&g| g > 1)
    }
}

fn check_params(params: &HubbardParams) -> Result<()> {
    if !(params.t > 0.0) || !params.t.is_finite() {
        return Err(Error::NonPositiveHopping(params.t));
    }
    if !(params.u >= 0.0) || !params.u.is_finite() {
        return Err(Error::InvalidParameter(format!("U = {} must be finite and >= 0", params.u)));
    }
    Ok(())
}

/// Diagonalizes the block in the three independent kept sectors and builds
/// down′ as the spin flip of up′.
pub fn compute_kept_states(
    geometry: &BlockGeometry,
    params: &HubbardParams,
    config: &RgConfig,
) -> Result<KeptStates> {
    check_params(params)?;
    let bonds = Bond::uniform(&geometry.intra_bonds);
    let n = geometry.nsites();
    let solve = |label: KeptLabel| -> Result<KeptState> {
        let (nup, ndown) = label.sector();
        let (basis, mut multiplet) = solve_sector(&bonds, params, n, nup, ndown, &config.solver)?;
        multiplet.fix_phases();
        if config.degeneracy == DegeneracyPolicy::Strict && multiplet.is_degenerate() {
            return Err(Error::Degenerate {
                nup,
                ndown,
                gap: multiplet.states[1].energy - multiplet.states[0].energy,
            });
        }
        Ok(KeptState {
            label,
            basis,
            multiplet,
        })
    };
    let empty = solve(KeptLabel::Empty)?;
    let up = solve(KeptLabel::Up)?;
    let double = solve(KeptLabel::Double)?;

    let mut flipped_basis = None;
    let states = up
        .multiplet
        .states
        .iter()
        .map(|s| {
            let (b, v) = spin_flip(&up.basis, &s.vector);
            flipped_basis.get_or_insert(b);
            EigenPair {
                energy: s.energy,
                vector: v,
            }
        })
        .collect();
    let down = KeptState {
        label: KeptLabel::Down,
        basis: flipped_basis.expect("multiplet is never empty"),
        multiplet: GroundMultiplet {
            states,
            gap: up.multiplet.gap,
        },
    };
    Ok(KeptStates {
        params: *params,
        states: [empty, up, down, double],
    })
}

/// `A[k][a][b] = <lower_a| c_{k,spin} |upper_b>` for every block site `k`.
fn transition_amplitudes(lower: &KeptState, upper: &KeptState, spin: Spin) -> Result<Vec<Vec<Vec<f64>>>> {
    let nsites = lower.basis.nsites();
    (0..nsites)
        .map(|k| {
            lower
                .multiplet
                .vectors()
                .map(|bra| {
                    upper
                        .multiplet
                        .vectors()
                        .map(|ket| {
                            let moved = annihilate(&upper.basis, ket, &lower.basis, k, spin)?;
                            Ok(moved.iter().zip(bra).map(|(x, y)| x * y).sum())
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Root-mean-square block-to-block amplitude for moving one electron of
/// `spin` across `bonds`, in units of the block hopping. Two adjacent blocks
/// start in `(lower_a, upper_b)` and end in `(upper_b′, lower_a′)`; the
/// amplitude is `Σ_(i,j) A_i[a][b′] A_j[a′][b]`.
fn channel_hopping(
    lower: &KeptState,
    upper: &KeptState,
    spin: Spin,
    bonds: &[(usize, usize)],
) -> Result<f64> {
    let amps = transition_amplitudes(lower, upper, spin)?;
    let (gl, gu) = (lower.multiplet.len(), upper.multiplet.len());
    let mut sum_sq = 0.0;
    for a in 0..gl {
        for b2 in 0..gu {
            for a2 in 0..gl {
                for b in 0..gu {
                    let t: f64 = bonds.iter().map(|&(i, j)| amps[i][a][b2] * amps[j][a2][b]).sum();
                    sum_sq += t * t;
                }
            }
        }
    }
    Ok((sum_sq / (gl * gu) as f64).sqrt())
}

/// Renormalized couplings and descent matrix from the kept states.
pub fn renormalize(kept: &KeptStates, geometry: &BlockGeometry, config: &RgConfig) -> Result<RgStepResult> {
    let params = kept.params;
    let bonds = geometry
        .boundary_bonds
        .get(config.direction)
        .ok_or_else(|| Error::InvalidParameter(format!("direction {} out of range", config.direction)))?;
    let [e6, e7, _, e8] = kept.energies();

    let scale = params.t.max(params.u);
    let mut u_next = e6 + e8 - 2.0 * e7;
    if u_next < -1e-9 * scale {
        return Err(Error::NegativeGap(u_next));
    }
    u_next = u_next.max(0.0);

    let t_electron = params.t
        * channel_hopping(kept.get(KeptLabel::Empty), kept.get(KeptLabel::Up), Spin::Up, bonds)?;
    let t_hole = params.t
        * channel_hopping(kept.get(KeptLabel::Up), kept.get(KeptLabel::Double), Spin::Down, bonds)?;
    let t_next = match config.channel {
        HoppingChannel::Electron => t_electron,
        HoppingChannel::Hole => t_hole,
        HoppingChannel::Mean => 0.5 * (t_electron + t_hole),
    };
    if !(t_next > 0.0) {
        return Err(Error::NonPositiveHopping(t_next));
    }

    let mut descent_w = [[0.0; 4]; 4];
    for label in KeptLabel::ALL {
        let s = kept.get(label);
        descent_w[label.index()] = multiplet_site_distribution(&s.multiplet, &s.basis, CENTER_SITE)?.0;
    }
    let up = kept.get(KeptLabel::Up);
    Ok(RgStepResult {
        t_next,
        u_next,
        e0_next: 0.5 * (e6 + e8),
        mu_next: 0.5 * (e8 - e6),
        descent_w,
        kept_energies: kept.energies(),
        multiplicities: kept.multiplicities(),
        t_electron,
        t_hole,
        center: OccupationDistribution(descent_w[KeptLabel::Up.index()]),
        rim: multiplet_site_distribution(&up.multiplet, &up.basis, RIM_SITE)?,
    })
}

/// [`compute_kept_states`] followed by [`renormalize`].
pub fn rg_step(geometry: &BlockGeometry, params: &HubbardParams, config: &RgConfig) -> Result<RgStepResult> {
    let kept = compute_kept_states(geometry, params, config)?;
    renormalize(&kept, geometry, config)
}

/// `u′(u)` at `t = 1`, without any cap.
pub fn flow_map(u: f64, config: &RgConfig) -> Result<f64> {
    Ok(rg_step(&build_block_geometry(), &HubbardParams::from_ratio(u), config)?.ratio())
}

/// One level of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgLevel {
    pub level: usize,
    /// Couplings actually diagonalized: `t = 1`, `U = u_k`, `e0 = 0`.
    pub params: HubbardParams,
    pub step: RgStepResult,
    /// Energy unit of this level in units of the bare `t`.
    pub t_scale: f64,
    /// Per-site offset of this level's sites in bare units.
    pub e0: f64,
    /// Charge-asymmetry shift of this level's sites in bare units.
    pub mu: f64,
    /// Whether `u_k` was lowered to the cap.
    pub capped: bool,
}

impl RgLevel {
    /// Couplings of this level in bare units.
    pub fn bare_params(&self) -> HubbardParams {
        HubbardParams {
            t: self.t_scale,
            u: self.params.u * self.t_scale,
            e0: self.e0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgTrajectory {
    pub u0: f64,
    pub levels: Vec<RgLevel>,
    /// `u_0 … u_n`, each the ratio handed to its level before capping; one
    /// more entry than `levels`.
    pub ratios: Vec<f64>,
}

impl RgTrajectory {
    pub fn nlevels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, level: usize) -> Result<&RgLevel> {
        self.levels.get(level).ok_or(Error::LevelOutOfRange {
            requested: level,
            available: self.levels.len(),
        })
    }

    /// Charge gap of the top problem at `level` in bare units.
    pub fn gap_at(&self, level: usize) -> Result<f64> {
        let l = self.level(level)?;
        Ok(l.step.u_next * l.t_scale)
    }
}

/// Iterates the step `nlevels` times from `u0`. Level `k` holds the block
/// solved at `u_k`, which is also the top problem for a `7^(k+1)`-site system.
pub fn rg_flow(u0: f64, nlevels: usize, config: &RgConfig) -> Result<RgTrajectory> {
    if !(u0 >= 0.0) || !u0.is_finite() {
        return Err(Error::InvalidParameter(format!("u0 = {u0} must be finite and >= 0")));
    }
    if !(config.u_cap > 0.0) {
        return Err(Error::InvalidParameter(format!("u_cap = {} must be positive", config.u_cap)));
    }
    let geometry = build_block_geometry();
    let mut levels = Vec::with_capacity(nlevels);
    let mut ratios = vec![u0];
    let (mut u, mut t_scale, mut e0, mut mu) = (u0, 1.0, 0.0, 0.0);
    let mut capped_step: Option<RgStepResult> = None;
    for level in 0..nlevels {
        let capped = u > config.u_cap;
        if capped {
            // keep the true U in bare units, let t absorb the change
            t_scale *= u / config.u_cap;
            u = config.u_cap;
        }
        let params = HubbardParams::from_ratio(u);
        let step = match (&capped_step, capped) {
            (Some(step), true) => step.clone(),
            _ => rg_step(&geometry, &params, config)?,
        };
        if capped {
            capped_step = Some(step.clone());
        }
        let next = LevelState {
            u: step.ratio(),
            t_scale: t_scale * step.t_next,
            e0: BLOCK_SITES as f64 * e0 + t_scale * step.e0_next,
            mu: mu + t_scale * step.mu_next,
        };
        ratios.push(next.u);
        levels.push(RgLevel {
            level,
            params,
            step,
            t_scale,
            e0,
            mu,
            capped,
        });
        (u, t_scale, e0, mu) = (next.u, next.t_scale, next.e0, next.mu);
    }
    Ok(RgTrajectory { u0, levels, ratios })
}

struct LevelState {
    u: f64,
    t_scale: f64,
    e0: f64,
    mu: f64,
}

/// Bisection tolerance on the bracket width.
pub const BISECTION_TOL: f64 = 1e-6;

/// Unstable fixed point of `u → u′` inside `[u_lo, u_hi]`.
pub fn find_fixed_point(u_lo: f64, u_hi: f64, config: &RgConfig) -> Result<f64> {
    if !(u_lo < u_hi) || u_lo < 0.0 {
        return Err(Error::InvalidParameter(format!("bracket [{u_lo}, {u_hi}]")));
    }
    let f = |u: f64| flow_map(u, config).map(|v| v - u);
    let (mut lo, mut hi) = (u_lo, u_hi);
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let lo_sign = f_lo.signum();
    while hi - lo >= BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub u_star: f64,
    /// `du′/du` at `u_star`.
    pub slope: f64,
    pub nu: f64,
}

/// Length rescaling per step.
pub fn rescaling_factor() -> f64 {
    7f64.sqrt()
}

/// `ν = ln √7 / ln(du′/du)` by a central difference with step `1e-4 u*`.
pub fn nu_from_linearization(u_star: f64, config: &RgConfig) -> Result<Linearization> {
    if !(u_star > 0.0) {
        return Err(Error::InvalidParameter(format!("u* = {u_star} must be positive")));
    }
    let h = 1e-4 * u_star;
    let slope = (flow_map(u_star + h, config)? - flow_map(u_star - h, config)?) / (2.0 * h);
    if !(slope > 1.0) {
        return Err(Error::IrrelevantFixedPoint(slope));
    }
    Ok(Linearization {
        u_star,
        slope,
        nu: rescaling_factor().ln() / slope.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(KeptLabel::ALL.map(KeptLabel::charge), [-1, 0, 0, 1]);
        assert_eq!(KeptLabel::Down.sector(), (3, 4));
        assert_eq!(sites_at_level(0), 7);
        assert_eq!(sites_at_level(8), 40_353_607);
    }

    #[test]
    fn rejects_bad_params() {
        let g = build_block_geometry();
        let cfg = RgConfig::default();
        assert!(compute_kept_states(&g, &HubbardParams::new(0.0, 1.0), &cfg).is_err());
        assert!(compute_kept_states(&g, &HubbardParams::new(1.0, -1.0), &cfg).is_err());
        assert!(rg_flow(-1.0, 2, &cfg).is_err());
    }
}
