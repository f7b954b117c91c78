use crate::{Error, Result};

/// Largest site count a basis may have; masks are stored in `u32`.
pub const MAX_SITES: usize = 16;

/// Occupation bit pattern of one spin species: bit `i` set means site `i`
/// is occupied.
pub type Mask = u32;

/// All configurations with `nup` spin-up and `ndown` spin-down electrons on
/// `nsites` sites, ordered lexicographically by `(up_mask, down_mask)`.
///
/// Lookup does not need a hash map: for a fixed popcount, ascending mask value
/// is colexicographic order, so the position of a mask among its peers is its
/// combinatorial rank `sum_k C(pos_k, k + 1)`.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    nsites: usize,
    nup: usize,
    ndown: usize,
    states: Vec<(Mask, Mask)>,
    binom: Vec<Vec<usize>>,
    ndown_states: usize,
}

pub(crate) fn binomial_table(n: usize) -> Vec<Vec<usize>> {
    let mut table = vec![vec![0usize; n + 1]; n + 1];
    for i in 0..=n {
        table[i][0] = 1;
        for k in 1..=i {
            table[i][k] = table[i - 1][k - 1] + if k < i { table[i - 1][k] } else { 0 };
        }
    }
    table
}

/// Masks of `nsites` bits with exactly `count` set, in ascending order.
fn masks_with_popcount(nsites: usize, count: usize) -> Vec<Mask> {
    if count == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut m: Mask = (1 << count) - 1;
    let limit: u64 = 1 << nsites;
    while u64::from(m) < limit {
        out.push(m);
        // Gosper's hack: next larger integer with the same popcount
        let c = m & m.wrapping_neg();
        let r = m + c;
        if r == 0 {
            break;
        }
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}

impl SectorBasis {
    pub fn new(nsites: usize, nup: usize, ndown: usize) -> Result<Self> {
        if nsites == 0 || nsites > MAX_SITES || nup > nsites || ndown > nsites {
            return Err(Error::SectorOutOfRange {
                nsites,
                nup,
                ndown,
            });
        }
        let ups = masks_with_popcount(nsites, nup);
        let downs = masks_with_popcount(nsites, ndown);
        let mut states = Vec::with_capacity(ups.len() * downs.len());
        for &u in &ups {
            for &d in &downs {
                states.push((u, d));
            }
        }
        Ok(Self {
            nsites,
            nup,
            ndown,
            states,
            binom: binomial_table(nsites),
            ndown_states: downs.len(),
        })
    }

    pub fn nsites(&self) -> usize {
        self.nsites
    }

    pub fn nup(&self) -> usize {
        self.nup
    }

    pub fn ndown(&self) -> usize {
        self.ndown
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[(Mask, Mask)] {
        &self.states
    }

    pub fn state(&self, index: usize) -> (Mask, Mask) {
        self.states[index]
    }

    fn rank(&self, mut mask: Mask) -> usize {
        let mut rank = 0;
        let mut k = 1;
        while mask != 0 {
            let pos = mask.trailing_zeros() as usize;
            rank += self.binom[pos][k];
            mask &= mask - 1;
            k += 1;
        }
        rank
    }

    /// Position of `(up, down)` in the basis, or `None` if the pair is not in
    /// this sector.
    pub fn index(&self, up: Mask, down: Mask) -> Option<usize> {
        let inside = |m: Mask| (m >> self.nsites) == 0;
        if !inside(up)
            || !inside(down)
            || up.count_ones() as usize != self.nup
            || down.count_ones() as usize != self.ndown
        {
            return None;
        }
        Some(self.rank(up) * self.ndown_states + self.rank(down))
    }

    /// The sector obtained by exchanging spin species.
    pub fn spin_flipped(&self) -> Self {
        Self::new(self.nsites, self.ndown, self.nup).expect("flipped sector is valid")
    }
}

/// `C(n, k)` for small arguments.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    binomial_table(n)[n][k]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(SectorBasis::new(7, 4, 3).unwrap().dim(), 1225);
        assert_eq!(SectorBasis::new(2, 1, 1).unwrap().dim(), 4);
        let single = SectorBasis::new(1, 1, 1).unwrap();
        assert_eq!(single.dim(), 1);
        assert_eq!(single.state(0), (1, 1));
        assert_eq!(SectorBasis::new(16, 1, 0).unwrap().dim(), 16);
    }

    #[test]
    fn out_of_range() {
        assert!(SectorBasis::new(7, 8, 0).is_err());
        assert!(SectorBasis::new(17, 1, 1).is_err());
        assert!(SectorBasis::new(0, 0, 0).is_err());
    }

    #[test]
    fn sorted_and_lookup_roundtrip() {
        for (n, u, d) in [(7, 4, 3), (5, 0, 2), (6, 3, 3), (4, 4, 4)] {
            let b = SectorBasis::new(n, u, d).unwrap();
            assert_eq!(b.dim(), binomial(n, u) * binomial(n, d));
            for w in b.states().windows(2) {
                assert!(w[0] < w[1]);
            }
            for (i, &(up, dn)) in b.states().iter().enumerate() {
                assert_eq!(up.count_ones() as usize, u);
                assert_eq!(dn.count_ones() as usize, d);
                assert_eq!(b.index(up, dn), Some(i));
            }
        }
    }

    #[test]
    fn foreign_state_not_found() {
        let b = SectorBasis::new(7, 4, 3).unwrap();
        assert_eq!(b.index(0b111, 0b111), None);
        assert_eq!(b.index(0b1111 << 4, 0b111), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(7, 3), 35);
        assert_eq!(binomial(16, 8), 12870);
        assert_eq!(binomial(3, 5), 0);
    }
}
