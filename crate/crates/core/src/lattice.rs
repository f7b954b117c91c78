//! Geometry of the 7-site hexagonal block on the triangular lattice.
//!
//! Sites are written in the primitive basis `a1 = (1, 0)`, `a2 = (1/2, √3/2)`.
//! The block is the central site plus its six nearest neighbours, listed
//! counterclockwise starting at `+a1`. Blocks sit on the superlattice spanned
//! by `A1 = 2a1 + a2` and its 60° rotation `A2 = -a1 + 3a2`; both have squared
//! length 7, so one blocking step rescales lengths by √7. The superlattice is
//! again triangular, so the same block description is reused at every level.
//!
//! Fermionic signs downstream follow the site order fixed here.

use serde::{Deserialize, Serialize};

/// A triangular-lattice site in the primitive basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteCoord {
    pub a1: i32,
    pub a2: i32,
}

/// The six nearest-neighbour displacements, counterclockwise from `+a1`.
pub const UNIT_VECTORS: [SiteCoord; 6] = [
    SiteCoord::new(1, 0),
    SiteCoord::new(0, 1),
    SiteCoord::new(-1, 1),
    SiteCoord::new(-1, 0),
    SiteCoord::new(0, -1),
    SiteCoord::new(1, -1),
];

/// First superlattice vector `2a1 + a2`.
pub const SUPERLATTICE_A1: SiteCoord = SiteCoord::new(2, 1);

impl SiteCoord {
    pub const fn new(a1: i32, a2: i32) -> Self {
        Self { a1, a2 }
    }

    pub const ORIGIN: SiteCoord = SiteCoord::new(0, 0);

    pub fn cartesian(self) -> (f64, f64) {
        let (m, n) = (f64::from(self.a1), f64::from(self.a2));
        (m + 0.5 * n, n * 3f64.sqrt() / 2.0)
    }

    /// Squared Euclidean length in units of the lattice constant.
    pub fn norm_sq(self) -> i32 {
        self.a1 * self.a1 + self.a1 * self.a2 + self.a2 * self.a2
    }

    /// Counterclockwise rotation by 60°: `a1 -> a2`, `a2 -> a2 - a1`.
    pub fn rotate60(self) -> Self {
        Self::new(-self.a2, self.a1 + self.a2)
    }

    pub fn is_neighbor(self, other: SiteCoord) -> bool {
        UNIT_VECTORS.contains(&(self - other))
    }
}

impl std::ops::Add for SiteCoord {
    type Output = SiteCoord;
    fn add(self, rhs: SiteCoord) -> SiteCoord {
        SiteCoord::new(self.a1 + rhs.a1, self.a2 + rhs.a2)
    }
}

impl std::ops::Sub for SiteCoord {
    type Output = SiteCoord;
    fn sub(self, rhs: SiteCoord) -> SiteCoord {
        SiteCoord::new(self.a1 - rhs.a1, self.a2 - rhs.a2)
    }
}

impl std::ops::Mul<SiteCoord> for i32 {
    type Output = SiteCoord;
    fn mul(self, rhs: SiteCoord) -> SiteCoord {
        SiteCoord::new(self * rhs.a1, self * rhs.a2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockGeometry {
    /// Index 0 is the centre; 1..=6 the rim, counterclockwise from `+a1`.
    pub sites: Vec<SiteCoord>,
    /// Unordered pairs `(i, j)` with `i < j`.
    pub intra_bonds: Vec<(usize, usize)>,
    /// Superlattice vectors to the six adjacent blocks, each the 60° rotation
    /// of the previous one.
    pub neighbor_directions: Vec<SiteCoord>,
    /// `boundary_bonds[d]` lists `(i, j)`: site `i` of this block is a nearest
    /// neighbour of site `j` of the block displaced by `neighbor_directions[d]`.
    pub boundary_bonds: Vec<Vec<(usize, usize)>>,
}

/// Unit-distance pairs `(i, j)` with `sites[i]` next to `sites[j] + shift`.
fn bonds_between(sites: &[SiteCoord], shift: SiteCoord) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &si) in sites.iter().enumerate() {
        for (j, &sj) in sites.iter().enumerate() {
            if si.is_neighbor(sj + shift) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Builds the canonical block. Bonds are enumerated from coordinates rather
/// than listed by hand.
pub fn build_block_geometry() -> BlockGeometry {
    let mut sites = vec![SiteCoord::ORIGIN];
    sites.extend_from_slice(&UNIT_VECTORS);

    let intra_bonds = bonds_between(&sites, SiteCoord::ORIGIN)
        .into_iter()
        .filter(|&(i, j)| i < j)
        .collect();

    let neighbor_directions: Vec<SiteCoord> =
        std::iter::successors(Some(SUPERLATTICE_A1), |d| Some(d.rotate60()))
            .take(6)
            .collect();

    let boundary_bonds = neighbor_directions
        .iter()
        .map(|&d| bonds_between(&sites, d))
        .collect();

    BlockGeometry {
        sites,
        intra_bonds,
        neighbor_directions,
        boundary_bonds,
    }
}

impl BlockGeometry {
    pub fn nsites(&self) -> usize {
        self.sites.len()
    }

    /// Index of `coord` in the block, if present.
    pub fn index_of(&self, coord: SiteCoord) -> Option<usize> {
        self.sites.iter().position(|&s| s == coord)
    }

    /// Serializes sites, bonds and directions as pretty JSON.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            sites: Vec<SiteDump>,
            intra_bonds: &'a [(usize, usize)],
            neighbor_directions: &'a [SiteCoord],
            boundary_bonds: &'a [Vec<(usize, usize)>],
        }
        #[derive(Serialize)]
        struct SiteDump {
            index: usize,
            a1: i32,
            a2: i32,
            x: f64,
            y: f64,
        }
        let dump = Dump {
            sites: self
                .sites
                .iter()
                .enumerate()
                .map(|(index, s)| {
                    let (x, y) = s.cartesian();
                    SiteDump {
                        index,
                        a1: s.a1,
                        a2: s.a2,
                        x,
                        y,
                    }
                })
                .collect(),
            intra_bonds: &self.intra_bonds,
            neighbor_directions: &self.neighbor_directions,
            boundary_bonds: &self.boundary_bonds,
        };
        serde_json::to_string_pretty(&dump).expect("geometry serializes")
    }
}

/// Half-width of the square window (in primitive coordinates) used by
/// [`verify_tiling`].
const TILING_WINDOW: i32 = 10;

/// Checks that copies of the block placed on every superlattice point cover
/// each site of a 20×20 window exactly once.
pub fn verify_tiling(geometry: &BlockGeometry) -> bool {
    if geometry.neighbor_directions.len() < 2 {
        return false;
    }
    let (b1, b2) = (geometry.neighbor_directions[0], geometry.neighbor_directions[1]);
    let side = (2 * TILING_WINDOW) as usize;
    let mut cover = vec![0u32; side * side];

    // generous range of superlattice translations so the window is reached
    let reach = 2 * TILING_WINDOW;
    for m in -reach..=reach {
        for n in -reach..=reach {
            let origin = m * b1 + n * b2;
            for &s in &geometry.sites {
                let p = origin + s;
                let (x, y) = (p.a1 + TILING_WINDOW, p.a2 + TILING_WINDOW);
                if (0..2 * TILING_WINDOW).contains(&x) && (0..2 * TILING_WINDOW).contains(&y) {
                    cover[x as usize * side + y as usize] += 1;
                }
            }
        }
    }
    cover.iter().all(|&c| c == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_counts() {
        let g = build_block_geometry();
        assert_eq!(g.sites.len(), 7);
        assert_eq!(g.intra_bonds.len(), 12);
        assert_eq!(g.neighbor_directions.len(), 6);
        for bonds in &g.boundary_bonds {
            assert_eq!(bonds.len(), 3);
        }
    }

    #[test]
    fn spokes_and_rim() {
        let g = build_block_geometry();
        let spokes = g.intra_bonds.iter().filter(|&&(i, _)| i == 0).count();
        assert_eq!(spokes, 6);
        for k in 1..=6 {
            let next = k % 6 + 1;
            let pair = (k.min(next), k.max(next));
            assert!(g.intra_bonds.contains(&pair), "missing rim bond {pair:?}");
        }
    }

    #[test]
    fn coordination_identity() {
        let g = build_block_geometry();
        let boundary: usize = g.boundary_bonds.iter().map(Vec::len).sum();
        assert_eq!(2 * g.intra_bonds.len() + boundary, 6 * 7);
        // bonds per site counting each inter-block bond once
        assert_eq!((g.intra_bonds.len() * 2 + boundary) / 2 / 7, 3);
    }

    #[test]
    fn superlattice_vectors() {
        let g = build_block_geometry();
        assert_eq!(g.neighbor_directions[0], SiteCoord::new(2, 1));
        assert_eq!(g.neighbor_directions[1], SiteCoord::new(-1, 3));
        for (d, v) in g.neighbor_directions.iter().enumerate() {
            assert_eq!(v.norm_sq(), 7);
            assert_eq!(g.neighbor_directions[(d + 1) % 6], v.rotate60());
        }
    }

    #[test]
    fn boundary_bonds_toward_a1() {
        let g = build_block_geometry();
        // brute force: all unit-distance pairs between the block and its copy at 2a1 + a2
        let shift = SiteCoord::new(2, 1);
        let mut expect = Vec::new();
        for i in 0..7 {
            for j in 0..7 {
                let d = g.sites[i] - (g.sites[j] + shift);
                if d.norm_sq() == 1 {
                    expect.push((i, j));
                }
            }
        }
        assert_eq!(g.boundary_bonds[0], expect);
        assert_eq!(expect, vec![(1, 4), (1, 5), (2, 4)]);
    }

    #[test]
    fn rotation_permutes_rim() {
        let g = build_block_geometry();
        let rot = |i: usize| if i == 0 { 0 } else { i % 6 + 1 };
        for (i, s) in g.sites.iter().enumerate() {
            assert_eq!(g.index_of(s.rotate60()), Some(rot(i)));
        }
        for d in 0..6 {
            let mut mapped: Vec<_> = g.boundary_bonds[d]
                .iter()
                .map(|&(i, j)| (rot(i), rot(j)))
                .collect();
            mapped.sort_unstable();
            let mut next = g.boundary_bonds[(d + 1) % 6].clone();
            next.sort_unstable();
            assert_eq!(mapped, next);
        }
    }

    #[test]
    fn tiling() {
        let g = build_block_geometry();
        assert!(verify_tiling(&g));

        let mut missing = g.clone();
        missing.sites.remove(3);
        assert!(!verify_tiling(&missing));

        let mut doubled = g.clone();
        doubled.sites.push(doubled.sites[2]);
        assert!(!verify_tiling(&doubled));
    }

    #[test]
    fn geometry_json_has_all_fields() {
        let g = build_block_geometry();
        let v: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(v["sites"].as_array().unwrap().len(), 7);
        assert_eq!(v["intra_bonds"].as_array().unwrap().len(), 12);
        assert_eq!(v["boundary_bonds"][0].as_array().unwrap().len(), 3);
    }
}
