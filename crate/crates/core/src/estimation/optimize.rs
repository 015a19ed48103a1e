//! Derivative-free minimization (Nelder-Mead with dimension-adapted
//! coefficients and restarts).

use std::cell::Cell;

#[derive(Debug, Clone, Copy)]
pub(crate) struct NelderMead {
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below
    /// `f_tol * (1 + |f_best|)`.
    pub f_tol: f64,
    /// ... and every vertex is within `x_tol` of the best one.
    pub x_tol: f64,
    pub restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_evals: 3000,
            f_tol: 1e-10,
            x_tol: 1e-7,
            restarts: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

impl NelderMead {
    /// Minimizes `f` from `x0` with initial simplex edges `steps`. Non-finite
    /// values are treated as `+inf`, so infeasible points are never kept.
    pub fn minimize(&self, f: &mut dyn FnMut(&[f64]) -> f64, x0: &[f64], steps: &[f64]) -> Minimum {
        let evals = Cell::new(0usize);
        let mut g = |x: &[f64]| {
            evals.set(evals.get() + 1);
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut best_x = x0.to_vec();
        let mut best_f = g(x0);
        let mut converged = false;
        let mut scale = 1.0;
        for round in 0..=self.restarts {
            let steps: Vec<f64> = steps.iter().map(|s| s * scale).collect();
            let budget = self.max_evals.saturating_sub(evals.get());
            let (x, fx, ok) = self.run(&mut g, &best_x, best_f, &steps, budget);
            let improved = fx < best_f - self.f_tol * (1.0 + best_f.abs());
            if fx <= best_f {
                best_x = x;
                best_f = fx;
            }
            converged = ok;
            // a restart that finds nothing new confirms the optimum
            if round > 0 && !improved {
                break;
            }
            if evals.get() >= self.max_evals {
                break;
            }
            scale *= 0.5;
        }
        Minimum {
            x: best_x,
            f: best_f,
            evals: evals.get(),
            converged,
        }
    }

    fn run(
        &self,
        f: &mut dyn FnMut(&[f64]) -> f64,
        x0: &[f64],
        f0: f64,
        steps: &[f64],
        budget: usize,
    ) -> (Vec<f64>, f64, bool) {
        let n = x0.len();
        let nf = n as f64;
        // adaptive coefficients (Gao & Han) keep the method effective for n > 2
        let (rho, chi, psi, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), f0));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += steps[i];
            let v = f(&x);
            simplex.push((x, v));
        }
        let mut used = n;
        let order = |s: &mut Vec<(Vec<f64>, f64)>| {
            s.sort_by(|a, b| a.1.total_cmp(&b.1));
        };
        order(&mut simplex);
        let mut converged = false;
        while used < budget {
            let fb = simplex[0].1;
            let fw = simplex[n].1;
            let x_spread = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if (fw - fb).abs() <= self.f_tol * (1.0 + fb.abs()) && x_spread <= self.x_tol
                || (fw - fb).abs() == 0.0 && fb.is_finite()
            {
                converged = true;
                break;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / nf)
                .collect();
            let worst = simplex[n].0.clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(rho);
            let fr = f(&xr);
            used += 1;
            if fr < simplex[0].1 {
                let xe = along(rho * chi);
                let fe = f(&xe);
                used += 1;
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[n].1 {
                    let xc = along(rho * psi);
                    let fc = f(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-psi);
                    let fc = f(&xc);
                    (xc, fc)
                };
                used += 1;
                if fc < simplex[n].1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for (x, v) in simplex.iter_mut().skip(1) {
                        for (xi, bi) in x.iter_mut().zip(&x0) {
                            *xi = bi + sigma * (*xi - bi);
                        }
                        *v = f(x);
                        used += 1;
                    }
                }
            }
            order(&mut simplex);
        }
        let (x, v) = simplex.swap_remove(0);
        (x, v, converged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = NelderMead::default().minimize(&mut f, &[-1.2, 1.0], &[0.5, 0.5]);
        assert!(
            (m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4,
            "{:?}",
            m
        );
    }

    #[test]
    fn quadratic_4d_with_infeasible_region() {
        let mut f = |x: &[f64]| {
            if x[0] > 2.0 {
                return f64::NAN;
            }
            x.iter()
                .enumerate()
                .map(|(i, v)| (i as f64 + 1.0) * (v - 0.3 * i as f64).powi(2))
                .sum()
        };
        let m = NelderMead::default().minimize(&mut f, &[1.0, 1.0, 1.0, 1.0], &[0.3; 4]);
        for (i, v) in m.x.iter().enumerate() {
            assert!((v - 0.3 * i as f64).abs() < 1e-4);
        }
        assert!(m.converged);
    }
}
