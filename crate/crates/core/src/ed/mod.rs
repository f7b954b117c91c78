//! Exact diagonalization of the Hubbard Hamiltonian in fixed `(N↑, N↓)`
//! sectors.

mod basis;
mod fermion;
mod hamiltonian;
mod solver;

pub use basis::{binomial, Mask, SectorBasis, MAX_SITES};
pub use fermion::{annihilate, annihilation_element, spin_flip, Spin};
pub use hamiltonian::{build_hamiltonian, Bond, HubbardParams, SparseOperator};
pub use solver::{
    dense_multiplet, dense_spectrum, fix_phase, ground_multiplet, lanczos_lowest,
    lanczos_multiplet, start_vector, EigenPair, GroundMultiplet, SolverConfig,
};

use crate::{Error, Result};

/// Enumerates the sector basis.
pub fn enumerate_sector(nsites: usize, nup: usize, ndown: usize) -> Result<SectorBasis> {
    SectorBasis::new(nsites, nup, ndown)
}

/// Builds and solves one sector.
pub fn solve_sector(
    bonds: &[Bond],
    params: &HubbardParams,
    nsites: usize,
    nup: usize,
    ndown: usize,
    config: &SolverConfig,
) -> Result<(SectorBasis, GroundMultiplet)> {
    let basis = SectorBasis::new(nsites, nup, ndown)?;
    let op = build_hamiltonian(bonds, params, &basis)?;
    let multiplet = ground_multiplet(&op, config)?;
    Ok((basis, multiplet))
}

/// Lowest eigenpair with the default solver configuration.
pub fn ground_state(op: &SparseOperator) -> Result<GroundMultiplet> {
    ground_multiplet(op, &SolverConfig::default())
}

/// Spin sector holding `n` electrons with `S_z >= 0` minimal.
pub fn half_sector(n: usize) -> (usize, usize) {
    (n.div_ceil(2), n / 2)
}

/// Allowed slack below zero before a negative gap is an error.
const GAP_TOL: f64 = 1e-9;

/// `E(N-1) + E(N+1) - 2 E(N)` at half filling `N = nsites`.
pub fn charge_gap(
    bonds: &[Bond],
    params: &HubbardParams,
    nsites: usize,
    config: &SolverConfig,
) -> Result<f64> {
    let energy = |n: usize| -> Result<f64> {
        let (nup, ndown) = half_sector(n);
        let (_, m) = solve_sector(bonds, params, nsites, nup, ndown, config)?;
        Ok(m.energy())
    };
    let gap = energy(nsites - 1)? + energy(nsites + 1)? - 2.0 * energy(nsites)?;
    if gap < -GAP_TOL {
        return Err(Error::NegativeGap(gap));
    }
    Ok(gap.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sectors_for_half_filling() {
        assert_eq!(half_sector(7), (4, 3));
        assert_eq!(half_sector(6), (3, 3));
        assert_eq!(half_sector(8), (4, 4));
        assert_eq!(half_sector(0), (0, 0));
    }

    #[test]
    fn single_site_gap() {
        let g = charge_gap(&[], &HubbardParams::new(1.0, 3.0), 1, &SolverConfig::default()).unwrap();
        assert!((g - 3.0).abs() < 1e-14);
    }

    #[test]
    fn gap_ignores_offset() {
        let bonds = Bond::uniform(&[(0, 1), (1, 2), (0, 2)]);
        let mut p = HubbardParams::new(1.0, 2.5);
        let cfg = SolverConfig::default();
        let g0 = charge_gap(&bonds, &p, 3, &cfg).unwrap();
        p.e0 = 0.7;
        let g1 = charge_gap(&bonds, &p, 3, &cfg).unwrap();
        assert!((g0 - g1).abs() < 1e-12);
    }
}
