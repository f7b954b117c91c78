use hubbard_rg::lattice::{build_block_geometry, verify_tiling, SiteCoord, UNIT_VECTORS};
use proptest::prelude::*;
use serde_json::Value;

#[test]
fn geometry_matches_golden_file() {
    let golden: Value = serde_json::from_str(include_str!("golden/geometry.json")).unwrap();
    let dumped: Value = serde_json::from_str(&build_block_geometry().to_json()).unwrap();
    assert_eq!(dumped, golden);
}

#[test]
fn build_is_deterministic() {
    assert_eq!(build_block_geometry(), build_block_geometry());
    assert_eq!(build_block_geometry().to_json(), build_block_geometry().to_json());
}

#[test]
fn bonds_are_unit_length() {
    let g = build_block_geometry();
    for &(i, j) in &g.intra_bonds {
        assert!(i < j);
        assert_eq!((g.sites[i] - g.sites[j]).norm_sq(), 1);
    }
    let degree = |k: usize| g.intra_bonds.iter().filter(|&&(i, j)| i == k || j == k).count();
    assert_eq!(degree(0), 6);
    assert!((1..7).all(|k| degree(k) == 3));
    for (d, bonds) in g.neighbor_directions.iter().zip(&g.boundary_bonds) {
        assert_eq!(d.norm_sq(), 7);
        assert_eq!(bonds.len(), 3);
        for &(i, j) in bonds {
            assert_eq!((g.sites[i] - (g.sites[j] + *d)).norm_sq(), 1);
        }
    }
}

#[test]
fn rotation_permutes_the_block() {
    let g = build_block_geometry();
    assert_eq!(g.index_of(SiteCoord::ORIGIN), Some(0));
    for k in 1..7 {
        let next = g.sites[k].rotate60();
        assert_eq!(g.index_of(next), Some(k % 6 + 1));
    }
    for d in 0..6 {
        assert_eq!(g.neighbor_directions[d].rotate60(), g.neighbor_directions[(d + 1) % 6]);
        let rotated: Vec<(usize, usize)> = g.boundary_bonds[d]
            .iter()
            .map(|&(i, j)| {
                let r = |k: usize| g.index_of(g.sites[k].rotate60()).unwrap();
                (r(i), r(j))
            })
            .collect();
        let mut a = rotated;
        let mut b = g.boundary_bonds[(d + 1) % 6].clone();
        a.sort();
        b.sort();
        assert_eq!(a, b, "direction {d}");
    }
}

#[test]
fn opposite_directions_mirror_boundary_bonds() {
    let g = build_block_geometry();
    for d in 0..3 {
        assert_eq!(g.neighbor_directions[d + 3], -1 * g.neighbor_directions[d]);
        let mut back: Vec<(usize, usize)> = g.boundary_bonds[d + 3].iter().map(|&(i, j)| (j, i)).collect();
        let mut fwd = g.boundary_bonds[d].clone();
        back.sort();
        fwd.sort();
        assert_eq!(back, fwd);
    }
}

#[test]
fn blocks_tile_the_plane() {
    let g = build_block_geometry();
    assert!(verify_tiling(&g));
    let mut broken = g.clone();
    broken.neighbor_directions[0] = SiteCoord::new(3, 0);
    broken.neighbor_directions[1] = SiteCoord::new(0, 3);
    assert!(!verify_tiling(&broken));
}

proptest! {
    #[test]
    fn rotation_is_an_isometry_of_order_six(a1 in -50i32..50, a2 in -50i32..50) {
        let p = SiteCoord::new(a1, a2);
        prop_assert_eq!(p.rotate60().norm_sq(), p.norm_sq());
        let mut q = p;
        for _ in 0..6 {
            q = q.rotate60();
        }
        prop_assert_eq!(q, p);
        let (x, y) = p.cartesian();
        prop_assert!((x * x + y * y - f64::from(p.norm_sq())).abs() < 1e-9);
        let neighbours = UNIT_VECTORS.iter().filter(|&&u| (p + u).is_neighbor(p)).count();
        prop_assert_eq!(neighbours, 6);
    }
}
