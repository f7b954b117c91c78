use hubbard_rg::ed::{
    build_hamiltonian, dense_spectrum, ground_multiplet, lanczos_lowest, solve_sector, spin_flip,
    Bond, HubbardParams, SectorBasis, SolverConfig,
};
use hubbard_rg::lattice::{build_block_geometry, SiteCoord};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn block_bonds() -> Vec<Bond> {
    Bond::uniform(&build_block_geometry().intra_bonds)
}

fn lanczos_only() -> SolverConfig {
    SolverConfig {
        dense_max_dim: 0,
        fallback_max_dim: 0,
        ..SolverConfig::default()
    }
}

/// The constant `K` summed over the sites.
fn k_total(u: f64, nsites: usize) -> f64 {
    -0.25 * u * nsites as f64
}

fn dimer_energy(t: f64, u: f64, config: &SolverConfig) -> f64 {
    let (_, m) = solve_sector(&Bond::uniform(&[(0, 1)]), &HubbardParams::new(t, u), 2, 1, 1, config).unwrap();
    m.energy()
}

#[test]
fn dimer_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let t: f64 = rng.gen_range(0.05..3.0);
        let u: f64 = rng.gen_range(0.0..20.0);
        let exact = -(u * u / 4.0 + 4.0 * t * t).sqrt();
        for cfg in [SolverConfig::default(), lanczos_only()] {
            let e = dimer_energy(t, u, &cfg) - k_total(u, 2);
            assert!((e - exact).abs() < 1e-10, "t={t} U={u}: {e} vs {exact}");
        }
    }
}

/// One-particle levels of `−t` times the block adjacency matrix.
fn one_particle_levels(t: f64) -> Vec<f64> {
    let g = build_block_geometry();
    let mut h = DMatrix::zeros(7, 7);
    for &(i, j) in &g.intra_bonds {
        h[(i, j)] = -t;
        h[(j, i)] = -t;
    }
    let mut levels: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    levels.sort_by(f64::total_cmp);
    levels
}

#[test]
fn free_block_fills_one_particle_levels() {
    for t in [1.0, 0.7] {
        let levels = one_particle_levels(t);
        for (nup, ndown) in [(4, 3), (3, 3), (4, 4), (3, 4), (2, 1)] {
            let exact: f64 = levels[..nup].iter().sum::<f64>() + levels[..ndown].iter().sum::<f64>();
            let (_, m) = solve_sector(
                &block_bonds(),
                &HubbardParams::new(t, 0.0),
                7,
                nup,
                ndown,
                &SolverConfig::default(),
            )
            .unwrap();
            assert!((m.energy() - exact).abs() < 1e-9, "({nup},{ndown}): {} vs {exact}", m.energy());
        }
    }
}

#[test]
fn atomic_limit_energies() {
    let cfg = SolverConfig::default();
    for u in [1.0, 2.0, 7.5] {
        for (nup, ndown) in [(4, 3), (3, 3), (4, 4), (7, 7), (0, 0), (5, 5)] {
            let basis = SectorBasis::new(7, nup, ndown).unwrap();
            let op = build_hamiltonian(&block_bonds(), &HubbardParams::new(0.0, u), &basis).unwrap();
            let e = lanczos_lowest(&op, &[], &cfg).unwrap().energy;
            let doubles = (nup + ndown).saturating_sub(7);
            let singles = nup + ndown - 2 * doubles;
            let empties = 7 - singles - doubles;
            let exact = u * (-(singles as f64) + (doubles + empties) as f64) / 4.0 + k_total(u, 7);
            assert!((e - exact).abs() < 1e-6, "U={u} ({nup},{ndown}): {e} vs {exact}");
        }
    }
    // single site, one electron: U (1/2 − 1)(1/2) + K = −U/2
    let basis = SectorBasis::new(1, 1, 0).unwrap();
    let op = build_hamiltonian(&[], &HubbardParams::new(1.0, 4.0), &basis).unwrap();
    assert_eq!(op.to_dense()[(0, 0)], -2.0);
}

#[test]
fn atomic_charge_gap_is_u() {
    let cfg = SolverConfig::default();
    let energy = |nup: usize, ndown: usize| {
        let basis = SectorBasis::new(7, nup, ndown).unwrap();
        let op = build_hamiltonian(&block_bonds(), &HubbardParams::new(0.0, 2.0), &basis).unwrap();
        lanczos_lowest(&op, &[], &cfg).unwrap().energy
    };
    let gap = energy(3, 3) + energy(4, 4) - 2.0 * energy(4, 3);
    assert!((gap - 2.0).abs() < 1e-6, "{gap}");
}

#[test]
fn sparse_solver_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (nup, ndown) in [(2, 2), (3, 2), (1, 1)] {
        let basis = SectorBasis::new(7, nup, ndown).unwrap();
        let params = HubbardParams::new(rng.gen_range(0.3..2.0), rng.gen_range(0.0..15.0));
        let op = build_hamiltonian(&block_bonds(), &params, &basis).unwrap();
        assert!(op.is_symmetric(0.0));
        let dense = dense_spectrum(&op)[0].energy;
        let sparse = ground_multiplet(&op, &lanczos_only()).unwrap();
        assert!((sparse.energy() - dense).abs() < 1e-10, "{} vs {dense}", sparse.energy());
        let v = &sparse.ground().vector;
        let hv = op.mul_vec(v);
        let residual: f64 = hv.iter().zip(v).map(|(a, b)| (a - sparse.energy() * b).powi(2)).sum::<f64>().sqrt();
        assert!(residual < 1e-8, "{residual}");
    }
}

/// Bonds of the block after relabeling site `i` as `perm[i]`.
fn relabeled(perm: &[usize]) -> Vec<Bond> {
    let pairs: Vec<(usize, usize)> = build_block_geometry()
        .intra_bonds
        .iter()
        .map(|&(i, j)| (perm[i], perm[j]))
        .collect();
    Bond::uniform(&pairs)
}

#[test]
fn relabeling_sites_leaves_energies_unchanged() {
    let g = build_block_geometry();
    // rotation by 60 degrees and a mirror through the a1 axis, as permutations
    let rotate: Vec<usize> = g.sites.iter().map(|s| g.index_of(s.rotate60()).unwrap()).collect();
    let mirror: Vec<usize> = g
        .sites
        .iter()
        .map(|s| g.index_of(SiteCoord::new(s.a1 + s.a2, -s.a2)).unwrap())
        .collect();
    let scramble = vec![3, 6, 0, 2, 5, 1, 4];
    for u in [0.5, 4.8, 12.0] {
        let params = HubbardParams::from_ratio(u);
        for (nup, ndown) in [(4, 3), (3, 3), (4, 4)] {
            let solve = |bonds: &[Bond]| {
                solve_sector(bonds, &params, 7, nup, ndown, &SolverConfig::default())
                    .unwrap()
                    .1
                    .energy()
            };
            let e = solve(&block_bonds());
            for perm in [&rotate, &mirror, &scramble] {
                let e2 = solve(&relabeled(perm));
                assert!((e - e2).abs() < 1e-9, "u={u} ({nup},{ndown}): {e} vs {e2}");
            }
        }
    }
}

#[test]
fn spin_flip_maps_eigenstates() {
    for u in [0.0, 3.0, 9.0] {
        let params = HubbardParams::from_ratio(u);
        let (basis, m) = solve_sector(&block_bonds(), &params, 7, 4, 3, &SolverConfig::default()).unwrap();
        let (_, m2) = solve_sector(&block_bonds(), &params, 7, 3, 4, &SolverConfig::default()).unwrap();
        assert!((m.energy() - m2.energy()).abs() < 1e-9);
        assert_eq!(m.len(), m2.len());
        let (flipped_basis, v) = spin_flip(&basis, &m.ground().vector);
        assert_eq!((flipped_basis.nup(), flipped_basis.ndown()), (3, 4));
        let op = build_hamiltonian(&block_bonds(), &params, &flipped_basis).unwrap();
        let hv = op.mul_vec(&v);
        let residual: f64 = hv.iter().zip(&v).map(|(a, b)| (a - m.energy() * b).powi(2)).sum::<f64>().sqrt();
        assert!(residual < 1e-8, "u={u}: {residual}");
    }
}

#[test]
fn energies_scale_with_couplings() {
    let params = HubbardParams::from_ratio(4.0);
    let (_, a) = solve_sector(&block_bonds(), &params, 7, 4, 3, &SolverConfig::default()).unwrap();
    let (_, b) = solve_sector(&block_bonds(), &params.scaled(2.5), 7, 4, 3, &SolverConfig::default()).unwrap();
    assert!((2.5 * a.energy() - b.energy()).abs() < 1e-9);
}

#[test]
fn offset_shifts_energies_per_site() {
    let mut params = HubbardParams::from_ratio(4.0);
    let (_, a) = solve_sector(&block_bonds(), &params, 7, 4, 3, &SolverConfig::default()).unwrap();
    params.e0 = -0.3;
    let (_, b) = solve_sector(&block_bonds(), &params, 7, 4, 3, &SolverConfig::default()).unwrap();
    assert!((b.energy() - a.energy() + 7.0 * 0.3).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dimer_energy_for_any_couplings(t in 0.01f64..10.0, u in 0.0f64..50.0) {
        let e = dimer_energy(t, u, &SolverConfig::default()) - k_total(u, 2);
        prop_assert!((e + (u * u / 4.0 + 4.0 * t * t).sqrt()).abs() < 1e-9 * (1.0 + u + t));
    }

    #[test]
    fn ring_hamiltonian_is_symmetric(t in 0.1f64..3.0, u in 0.0f64..10.0, nup in 0usize..=4, ndown in 0usize..=4) {
        let basis = SectorBasis::new(4, nup, ndown).unwrap();
        let bonds = Bond::uniform(&[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]);
        let op = build_hamiltonian(&bonds, &HubbardParams::new(t, u), &basis).unwrap();
        prop_assert!(op.is_symmetric(1e-14));
    }
}
