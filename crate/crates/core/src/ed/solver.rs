use nalgebra::{DMatrix, SymmetricEigen};

use super::hamiltonian::SparseOperator;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub energy: f64,
    /// Unit-norm amplitudes over the sector basis.
    pub vector: Vec<f64>,
}

/// The lowest eigenvalue of an operator together with every eigenvector whose
/// energy lies within the degeneracy tolerance of it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundMultiplet {
    pub states: Vec<EigenPair>,
    /// Distance from the lowest energy to the first level outside the
    /// multiplet; `f64::INFINITY` when the multiplet fills the space.
    pub gap: f64,
}

impl GroundMultiplet {
    pub fn energy(&self) -> f64 {
        self.states[0].energy
    }

    pub fn ground(&self) -> &EigenPair {
        &self.states[0]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.states.len() > 1
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.states.iter().map(|s| s.vector.as_slice())
    }

    /// Multiplies every vector by ±1 so that its largest-magnitude amplitude is
    /// positive (first index wins ties).
    pub fn fix_phases(&mut self) {
        for s in &mut self.states {
            fix_phase(&mut s.vector);
        }
    }
}

pub fn fix_phase(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Sectors up to this dimension are diagonalized densely.
    pub dense_max_dim: usize,
    /// Sectors up to this dimension are diagonalized densely when the sparse
    /// solver stalls on a cluster of nearly degenerate levels.
    pub fallback_max_dim: usize,
    /// Levels closer than this to the lowest one belong to the multiplet.
    pub degeneracy_tol: f64,
    /// Krylov subspace size between restarts.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Residual `||Hv - Ev||` accepted, relative to the operator norm bound.
    pub residual_tol: f64,
    /// Eigenvalue change between restarts accepted as converged.
    pub shift_tol: f64,
    /// Refuse multiplets larger than this.
    pub max_multiplet: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dense_max_dim: 512,
            fallback_max_dim: 4096,
            degeneracy_tol: 1e-8,
            krylov_dim: 40,
            max_restarts: 400,
            residual_tol: 1e-11,
            shift_tol: 1e-11,
            max_multiplet: 64,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Two passes of classical Gram-Schmidt against `basis`.
fn orthogonalize<'a>(v: &mut [f64], basis: impl Iterator<Item = &'a [f64]> + Clone) {
    for _ in 0..2 {
        for b in basis.clone() {
            let c = dot(v, b);
            axpy(-c, b, v);
        }
    }
}

/// Like [`orthogonalize`], returning the total coefficient removed along each
/// basis vector.
fn orthogonalize_with_coefficients(v: &mut [f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (b, acc) in basis.iter().zip(coeffs.iter_mut()) {
            let c = dot(v, b);
            axpy(-c, b, v);
            *acc += c;
        }
    }
    coeffs
}

/// Deterministic positive start vector with entries in `[0.5, 1.5)`.
///
/// A constant vector can be orthogonal to the ground state when the latter
/// transforms nontrivially under a lattice symmetry, so the entries are
/// scrambled by a splitmix64 sequence. Each deflated solve uses its own
/// `seed`: a Krylov space holds one direction per degenerate eigenspace, and
/// reusing the start vector after deflating that direction would leave no
/// overlap with the partner states.
pub fn start_vector(dim: usize, seed: u64) -> Vec<f64> {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15 ^ seed.wrapping_mul(0xd1b5_4a32_d192_ed03);
    (0..dim)
        .map(|_| {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^= z >> 31;
            0.5 + (z >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

fn residual_norm(op: &SparseOperator, pair: &EigenPair) -> f64 {
    let hv = op.mul_vec(&pair.vector);
    hv.iter()
        .zip(&pair.vector)
        .map(|(h, v)| (h - pair.energy * v).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Lowest eigenpair of `op` restricted to the orthogonal complement of
/// `deflate`, by restarted Lanczos with full reorthogonalization.
pub fn lanczos_lowest(
    op: &SparseOperator,
    deflate: &[Vec<f64>],
    config: &SolverConfig,
) -> Result<EigenPair> {
    let dim = op.dim();
    let scale = op.norm_bound().max(1.0);
    let free = dim.saturating_sub(deflate.len());
    if free == 0 {
        return Err(Error::InvalidParameter(
            "no space left after deflation".into(),
        ));
    }
    let m = config.krylov_dim.min(free).max(1);
    let deflated = || deflate.iter().map(Vec::as_slice);

    let mut v = start_vector(dim, deflate.len() as u64);
    orthogonalize(&mut v, deflated());
    normalize(&mut v);

    let mut prev = f64::INFINITY;
    let mut last_residual = f64::INFINITY;
    for _restart in 0..config.max_restarts {
        // The projected matrix is filled with the full Gram-Schmidt
        // coefficients `q_i . H q_j` rather than the three-term recurrence, so
        // an undetected breakdown cannot corrupt the Ritz pairs.
        let mut krylov: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut projected = DMatrix::<f64>::zeros(m, m);
        krylov.push(v.clone());
        let mut exhausted = false;
        let mut k = 0;
        for j in 0..m {
            let mut w = op.mul_vec(&krylov[j]);
            orthogonalize(&mut w, deflated());
            let before = dot(&w, &w).sqrt();
            let coeffs = orthogonalize_with_coefficients(&mut w, &krylov);
            for (i, c) in coeffs.into_iter().enumerate() {
                projected[(i, j)] = c;
                projected[(j, i)] = c;
            }
            k = j + 1;
            let b = normalize(&mut w);
            if b < 1e-13 * scale || j + 1 == free {
                exhausted = true;
                break;
            }
            if b < 1e-6 * before {
                // near-invariant subspace: rounding left over from removing
                // large components is no longer small next to the remainder
                orthogonalize(&mut w, deflated().chain(krylov.iter().map(Vec::as_slice)));
                normalize(&mut w);
            }
            if j + 1 < m {
                projected[(j + 1, j)] = b;
                projected[(j, j + 1)] = b;
                krylov.push(w);
            }
        }
        let projected = projected.view((0, 0), (k, k)).into_owned();
        let eig = SymmetricEigen::new(projected);
        let (imin, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty projection");
        let s = eig.eigenvectors.column(imin);
        let mut x = vec![0.0; dim];
        for (i, q) in krylov.iter().take(k).enumerate() {
            axpy(s[i], q, &mut x);
        }
        orthogonalize(&mut x, deflated());
        normalize(&mut x);

        let pair = EigenPair {
            energy: dot(&x, &op.mul_vec(&x)),
            vector: x,
        };
        let residual = residual_norm(op, &pair);
        let converged_residual = residual <= config.residual_tol * scale;
        // the shift criterion only ends a stalled run: while the residual
        // still drops the vector keeps improving even if the energy does not
        let converged_shift = (theta - prev).abs() < config.shift_tol * scale
            && residual <= 1e-9 * scale
            && residual > 0.5 * last_residual;
        if exhausted || converged_residual || converged_shift {
            return Ok(pair);
        }
        prev = theta;
        last_residual = residual;
        v = pair.vector;
    }
    Err(Error::NoConvergence {
        iterations: config.max_restarts * m,
        residual: last_residual,
    })
}

/// All eigenpairs from a dense diagonalization, ascending.
pub fn dense_spectrum(op: &SparseOperator) -> Vec<EigenPair> {
    let eig = SymmetricEigen::new(op.to_dense());
    let mut order: Vec<usize> = (0..op.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order
        .into_iter()
        .map(|i| EigenPair {
            energy: eig.eigenvalues[i],
            vector: eig.eigenvectors.column(i).iter().copied().collect(),
        })
        .collect()
}

pub fn dense_multiplet(op: &SparseOperator, config: &SolverConfig) -> GroundMultiplet {
    let spectrum = dense_spectrum(op);
    let e0 = spectrum[0].energy;
    let count = spectrum
        .iter()
        .take_while(|p| p.energy - e0 < config.degeneracy_tol)
        .count();
    let gap = spectrum.get(count).map_or(f64::INFINITY, |p| p.energy - e0);
    let mut states = spectrum;
    states.truncate(count);
    GroundMultiplet { states, gap }
}

/// Ground multiplet by repeated deflated Lanczos: after each converged
/// vector the next solve runs in its orthogonal complement, until a level
/// beyond the degeneracy tolerance appears.
pub fn lanczos_multiplet(op: &SparseOperator, config: &SolverConfig) -> Result<GroundMultiplet> {
    let first = lanczos_lowest(op, &[], config)?;
    let e0 = first.energy;
    let mut states = vec![first];
    loop {
        if states.len() == op.dim() {
            return Ok(GroundMultiplet {
                states,
                gap: f64::INFINITY,
            });
        }
        let found: Vec<Vec<f64>> = states.iter().map(|s| s.vector.clone()).collect();
        let next = lanczos_lowest(op, &found, config)?;
        if next.energy - e0 < config.degeneracy_tol {
            if states.len() >= config.max_multiplet {
                return Err(Error::InvalidParameter(format!(
                    "ground multiplet exceeds {} states",
                    config.max_multiplet
                )));
            }
            states.push(next);
        } else {
            return Ok(GroundMultiplet {
                gap: next.energy - e0,
                states,
            });
        }
    }
}

/// Ground multiplet, dense up to `config.dense_max_dim` and Lanczos above.
/// A stalled Lanczos run is redone densely up to `config.fallback_max_dim`.
pub fn ground_multiplet(op: &SparseOperator, config: &SolverConfig) -> Result<GroundMultiplet> {
    if op.dim() == 0 {
        return Err(Error::InvalidParameter("empty operator".into()));
    }
    if op.dim() <= config.dense_max_dim {
        return Ok(dense_multiplet(op, config));
    }
    match lanczos_multiplet(op, config) {
        Err(Error::NoConvergence { .. }) if op.dim() <= config.fallback_max_dim => Ok(dense_multiplet(op, config)),
        other => other,
    }
}
