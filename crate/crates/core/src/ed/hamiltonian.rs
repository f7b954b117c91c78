use serde::{Deserialize, Serialize};

use super::basis::{Mask, SectorBasis};
use crate::{Error, Result};

/// Couplings of the particle-hole-symmetric Hubbard Hamiltonian
///
/// `H = -t Σ_<ij>,σ (c†_iσ c_jσ + h.c.) + U Σ_i (1/2 - n_i↑)(1/2 - n_i↓) - (U/4) N_s + e0 N_s`.
///
/// The `-U/4` per site makes the empty and doubly occupied site levels zero
/// and the singly occupied level `-U/2`. `e0` is the per-site energy the
/// renormalization accumulates; it never changes a state, only energies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HubbardParams {
    pub t: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub e0: f64,
}

impl HubbardParams {
    pub fn new(t: f64, u: f64) -> Self {
        Self { t, u, e0: 0.0 }
    }

    /// Parameters with `t = 1` at coupling ratio `ratio = U/t`.
    pub fn from_ratio(ratio: f64) -> Self {
        Self::new(1.0, ratio)
    }

    pub fn ratio(&self) -> f64 {
        self.u / self.t
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            t: self.t * factor,
            u: self.u * factor,
            e0: self.e0 * factor,
        }
    }
}

/// A hopping bond between sites `i` and `j`; the amplitude is `weight * t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

impl Bond {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j, weight: 1.0 }
    }

    pub fn uniform(pairs: &[(usize, usize)]) -> Vec<Bond> {
        pairs.iter().map(|&(i, j)| Bond::new(i, j)).collect()
    }
}

/// Real symmetric matrix in compressed row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOperator {
    /// Builds from unsorted `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            row_ptr[r + 1] += 1;
            cols.push(c);
            values.push(v);
            last = Some((r, c));
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).filter(|&(cc, _)| cc == c).map(|(_, v)| v).sum()
    }

    /// `out = self * x`
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply(x, &mut out);
        out
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.dim).all(|r| self.row(r).all(|(c, v)| (self.get(c, r) - v).abs() <= tol))
    }
}

/// Sign and result of `c†_to c_from` on a single-species mask, or `None` if
/// the move is blocked. The sign is the parity of occupied sites strictly
/// between the two endpoints.
pub(crate) fn hop(mask: Mask, to: usize, from: usize) -> Option<(f64, Mask)> {
    if mask & (1 << from) == 0 || mask & (1 << to) != 0 {
        return None;
    }
    let (lo, hi) = if to < from { (to, from) } else { (from, to) };
    let between = (1 << hi) - (1 << (lo + 1));
    let sign = if (mask & between).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    Some((sign, (mask & !(1 << from)) | (1 << to)))
}

/// Diagonal energy of one configuration.
pub(crate) fn diagonal_energy(up: Mask, down: Mask, nsites: usize, params: &HubbardParams) -> f64 {
    let mut e = 0.0;
    for i in 0..nsites {
        let nu = f64::from((up >> i) & 1);
        let nd = f64::from((down >> i) & 1);
        e += (0.5 - nu) * (0.5 - nd);
    }
    params.u * e + (params.e0 - 0.25 * params.u) * nsites as f64
}

/// Assembles the Hamiltonian in `basis`. Operators are ordered with the
/// spin-up string first and sites ascending within each species.
pub fn build_hamiltonian(
    bonds: &[Bond],
    params: &HubbardParams,
    basis: &SectorBasis,
) -> Result<SparseOperator> {
    let n = basis.nsites();
    if let Some(b) = bonds.iter().find(|b| b.i >= n || b.j >= n || b.i == b.j) {
        return Err(Error::BondOutOfRange(b.i, b.j));
    }
    let mut triplets = Vec::with_capacity(basis.dim() * (1 + 4 * bonds.len()));
    for (col, &(up, down)) in basis.states().iter().enumerate() {
        triplets.push((col, col, diagonal_energy(up, down, n, params)));
        for bond in bonds {
            let amp = -params.t * bond.weight;
            for (a, b) in [(bond.i, bond.j), (bond.j, bond.i)] {
                if let Some((sign, up2)) = hop(up, a, b) {
                    let row = basis.index(up2, down).expect("hop stays in sector");
                    triplets.push((row, col, amp * sign));
                }
                if let Some((sign, down2)) = hop(down, a, b) {
                    let row = basis.index(up, down2).expect("hop stays in sector");
                    triplets.push((row, col, amp * sign));
                }
            }
        }
    }
    Ok(SparseOperator::from_triplets(basis.dim(), triplets))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(bonds: &[Bond], p: HubbardParams, n: usize, nu: usize, nd: usize) -> nalgebra::DMatrix<f64> {
        let b = SectorBasis::new(n, nu, nd).unwrap();
        build_hamiltonian(bonds, &p, &b).unwrap().to_dense()
    }

    #[test]
    fn single_site_levels() {
        let p = HubbardParams::new(1.0, 4.0);
        assert_eq!(dense(&[], p, 1, 1, 0)[(0, 0)], -2.0);
        assert_eq!(dense(&[], p, 1, 0, 0)[(0, 0)], 0.0);
        assert_eq!(dense(&[], p, 1, 1, 1)[(0, 0)], 0.0);
    }

    #[test]
    fn offset_shifts_every_level() {
        let mut p = HubbardParams::new(1.0, 4.0);
        p.e0 = 0.5;
        assert_eq!(dense(&[], p, 1, 1, 0)[(0, 0)], -1.5);
        assert_eq!(dense(&[], p, 1, 0, 0)[(0, 0)], 0.5);
    }

    #[test]
    fn dimer_matrix() {
        let h = dense(&[Bond::new(0, 1)], HubbardParams::new(1.0, 0.0), 2, 1, 1);
        assert_eq!(h.nrows(), 4);
        let eig = h.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min + 2.0).abs() < 1e-12);
        assert!((h.clone() - h.transpose()).abs().max() < 1e-15);
    }

    #[test]
    fn hop_signs() {
        // c†_0 c_2 across an occupied site 1
        assert_eq!(hop(0b110, 0, 2), Some((-1.0, 0b011)));
        assert_eq!(hop(0b100, 0, 2), Some((1.0, 0b001)));
        assert_eq!(hop(0b101, 0, 2), None);
        assert_eq!(hop(0b001, 0, 2), None);
        assert_eq!(hop(0b0010, 3, 1), Some((1.0, 0b1000)));
        assert_eq!(hop(0b0110, 3, 1), Some((-1.0, 0b1100)));
    }

    #[test]
    fn bad_bond() {
        let b = SectorBasis::new(2, 1, 1).unwrap();
        let p = HubbardParams::new(1.0, 1.0);
        assert!(build_hamiltonian(&[Bond::new(0, 2)], &p, &b).is_err());
    }

    #[test]
    fn triplets_merge_duplicates() {
        let op = SparseOperator::from_triplets(2, vec![(0, 1, 1.0), (1, 0, 1.0), (0, 1, 2.0)]);
        assert_eq!(op.nnz(), 2);
        assert_eq!(op.get(0, 1), 3.0);
    }
}
