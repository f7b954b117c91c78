//! Nelder-Mead minimization with a fixed, deterministic initial simplex.

/// Stopping rules and the initial simplex size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Largest distance from the best vertex to any other vertex.
    pub diameter_tol: f64,
    /// Largest spread of function values over the simplex.
    pub spread_tol: f64,
    pub max_evaluations: usize,
    /// Relative offset of each initial vertex along its coordinate.
    pub relative_step: f64,
    /// Offset used instead when a coordinate starts at zero.
    pub zero_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            diameter_tol: 1e-5,
            spread_tol: 1e-10,
            max_evaluations: 2000,
            relative_step: 0.05,
            zero_step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Minimizes `f` from `x0`. Non-finite values are treated as `+∞`, so `f`
/// may signal an invalid point with `f64::INFINITY` or `NaN`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], options: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    if n == 0 {
        let value = eval(x0, &mut evaluations);
        return SimplexResult {
            x: Vec::new(),
            value,
            evaluations,
            converged: true,
        };
    }

    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += if x0[i] == 0.0 {
            options.zero_step
        } else {
            options.relative_step * x0[i]
        };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evaluations)).collect();

    let mut converged = false;
    while evaluations < options.max_evaluations {
        // stable sort keeps the vertex order, and thus the run, reproducible
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| distance(v, &simplex[0]))
            .fold(0.0, f64::max);
        let spread = values[n] - values[0];
        if diameter < options.diameter_tol && spread < options.spread_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            centroid.iter_mut().zip(v).for_each(|(c, x)| *c += x / n as f64);
        }
        let worst = simplex[n].clone();
        let reflected = lerp(&centroid, &worst, -REFLECT);
        let f_r = eval(&reflected, &mut evaluations);

        if f_r < values[0] {
            let expanded = lerp(&centroid, &worst, -EXPAND);
            let f_e = eval(&expanded, &mut evaluations);
            if f_e < f_r {
                simplex[n] = expanded;
                values[n] = f_e;
            } else {
                simplex[n] = reflected;
                values[n] = f_r;
            }
            continue;
        }
        if f_r < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_r;
            continue;
        }
        // outside contraction toward the reflected point, inside otherwise
        let outside = f_r < values[n];
        let contracted = if outside {
            lerp(&centroid, &reflected, CONTRACT)
        } else {
            lerp(&centroid, &worst, CONTRACT)
        };
        let f_c = eval(&contracted, &mut evaluations);
        let accept = if outside { f_c <= f_r } else { f_c < values[n] };
        if accept {
            simplex[n] = contracted;
            values[n] = f_c;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = lerp(&best, &simplex[i], SHRINK);
            values[i] = eval(&simplex[i], &mut evaluations);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("simplex has vertices");
    SimplexResult {
        x: simplex[best].clone(),
        value: values[best],
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2),
            &[3.0, 1.0],
            &SimplexOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] + 2.0).abs() < 1e-4);
        assert!(r.evaluations <= 2000);
    }

    #[test]
    fn rosenbrock() {
        let r = nelder_mead(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &SimplexOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn zero_start_and_infinite_region() {
        // minimum at 0.3, with everything below -0.5 rejected
        let r = nelder_mead(
            |x| if x[0] < -0.5 { f64::NAN } else { (x[0] - 0.3).powi(2) },
            &[0.0],
            &SimplexOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 0.3).abs() < 1e-5);
    }

    #[test]
    fn evaluation_cap() {
        let opts = SimplexOptions {
            max_evaluations: 10,
            ..SimplexOptions::default()
        };
        let r = nelder_mead(|x| x[0].abs().sqrt(), &[5.0], &opts);
        assert!(!r.converged);
        assert!(r.evaluations <= 12);
    }
}
