//! Single-fermion operators and spin flips acting on sector vectors.

use super::basis::{Mask, SectorBasis};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

fn parity_below(mask: Mask, site: usize) -> f64 {
    if (mask & ((1 << site) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `c_{site,spin} |psi>` expressed in `target`, which must be the sector with
/// one fewer electron of `spin`.
pub fn annihilate(
    source: &SectorBasis,
    psi: &[f64],
    target: &SectorBasis,
    site: usize,
    spin: Spin,
) -> Result<Vec<f64>> {
    if site >= source.nsites() {
        return Err(Error::SiteOutOfRange {
            site,
            nsites: source.nsites(),
        });
    }
    let expected = match spin {
        Spin::Up => (source.nup().checked_sub(1), Some(source.ndown())),
        Spin::Down => (Some(source.nup()), source.ndown().checked_sub(1)),
    };
    if target.nsites() != source.nsites() || expected != (Some(target.nup()), Some(target.ndown())) {
        return Err(Error::InvalidParameter(
            "target sector does not match the annihilated electron".into(),
        ));
    }
    let bit = 1 << site;
    let mut out = vec![0.0; target.dim()];
    for (&(up, down), &amp) in source.states().iter().zip(psi) {
        let (sign, up2, down2) = match spin {
            Spin::Up if up & bit != 0 => (parity_below(up, site), up & !bit, down),
            Spin::Down if down & bit != 0 => {
                let through_up = if up.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                (through_up * parity_below(down, site), up, down & !bit)
            }
            _ => continue,
        };
        let idx = target.index(up2, down2).expect("annihilated state lies in target");
        out[idx] += sign * amp;
    }
    Ok(out)
}

/// `<bra| c_{site,spin} |ket>` for real vectors.
pub fn annihilation_element(
    bra_basis: &SectorBasis,
    bra: &[f64],
    ket_basis: &SectorBasis,
    ket: &[f64],
    site: usize,
    spin: Spin,
) -> Result<f64> {
    let moved = annihilate(ket_basis, ket, bra_basis, site, spin)?;
    Ok(moved.iter().zip(bra).map(|(a, b)| a * b).sum())
}

/// Exchanges spin species: `|up, down> -> (-1)^(nup*ndown) |down, up>` in the
/// flipped sector. The sign comes from reordering the creation strings.
pub fn spin_flip(basis: &SectorBasis, psi: &[f64]) -> (SectorBasis, Vec<f64>) {
    let flipped = basis.spin_flipped();
    let sign = if (basis.nup() * basis.ndown()) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let mut out = vec![0.0; flipped.dim()];
    for (&(up, down), &amp) in basis.states().iter().zip(psi) {
        let idx = flipped.index(down, up).expect("flipped state lies in flipped sector");
        out[idx] = sign * amp;
    }
    (flipped, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annihilate_signs() {
        // |up = {0, 2}, down = {1}> = c†0↑ c†2↑ c†1↓ |0>
        let src = SectorBasis::new(3, 2, 1).unwrap();
        let mut psi = vec![0.0; src.dim()];
        psi[src.index(0b101, 0b010).unwrap()] = 1.0;

        let t_up = SectorBasis::new(3, 1, 1).unwrap();
        let a = annihilate(&src, &psi, &t_up, 2, Spin::Up).unwrap();
        assert_eq!(a[t_up.index(0b001, 0b010).unwrap()], -1.0);
        let a = annihilate(&src, &psi, &t_up, 0, Spin::Up).unwrap();
        assert_eq!(a[t_up.index(0b100, 0b010).unwrap()], 1.0);

        // c_1↓ passes both up operators
        let t_dn = SectorBasis::new(3, 2, 0).unwrap();
        let a = annihilate(&src, &psi, &t_dn, 1, Spin::Down).unwrap();
        assert_eq!(a[t_dn.index(0b101, 0).unwrap()], 1.0);

        assert!(annihilate(&src, &psi, &t_dn, 1, Spin::Up).is_err());
        assert!(annihilate(&src, &psi, &t_dn, 3, Spin::Down).is_err());
    }

    #[test]
    fn flip_twice_is_identity() {
        let b = SectorBasis::new(5, 3, 2).unwrap();
        let psi: Vec<f64> = (0..b.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
        let (fb, f) = spin_flip(&b, &psi);
        assert_eq!((fb.nup(), fb.ndown()), (2, 3));
        let (bb, back) = spin_flip(&fb, &f);
        assert_eq!((bb.nup(), bb.ndown()), (3, 2));
        assert_eq!(back, psi);
    }
}
