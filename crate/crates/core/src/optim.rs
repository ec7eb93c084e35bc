//! Quasi-Newton (BFGS) minimization with central finite-difference gradients.

/// Termination settings for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub max_iterations: usize,
    /// Stop when the gradient infinity-norm falls below this.
    pub gradient_tolerance: f64,
    /// Stop when the relative change in the objective falls below this.
    pub relative_tolerance: f64,
    /// Relative finite-difference step.
    pub step: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            gradient_tolerance: 1e-6,
            relative_tolerance: 1e-10,
            step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
}

// Accept a stalled line search as convergence only this close to stationarity.
const STALL_GRADIENT: f64 = 1e-3;
const MAX_STEP: f64 = 5.0;

fn gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], step: f64, fx: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = step * x[i].abs().max(1.0);
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            match (up.is_finite(), down.is_finite()) {
                (true, true) => (up - down) / (2.0 * h),
                (true, false) => (up - fx) / h,
                (false, true) => (fx - down) / h,
                (false, false) => 0.0,
            }
        })
        .collect()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes `f` from `x0`. Non-finite objective values are treated as
/// infeasible and rejected by the line search.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &OptimizerOptions) -> Minimum {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if n == 0 || !fx.is_finite() {
        return Minimum {
            x,
            value: fx,
            iterations: 0,
            converged: n == 0 && fx.is_finite(),
            gradient_norm: 0.0,
        };
    }
    let identity = |h: &mut Vec<f64>| {
        h.iter_mut().for_each(|v| *v = 0.0);
        (0..n).for_each(|i| h[i * n + i] = 1.0);
    };
    let mut h = vec![0.0; n * n];
    identity(&mut h);
    let mut g = gradient(&f, &x, opts.step, fx);
    let mut fresh_hessian = true;

    for iter in 0..opts.max_iterations {
        let gnorm = inf_norm(&g);
        if gnorm < opts.gradient_tolerance {
            return Minimum {
                x,
                value: fx,
                iterations: iter,
                converged: true,
                gradient_norm: gnorm,
            };
        }
        let mut dir: Vec<f64> = (0..n)
            .map(|i| -(0..n).map(|j| h[i * n + j] * g[j]).sum::<f64>())
            .collect();
        let mut slope: f64 = dir.iter().zip(&g).map(|(d, gi)| d * gi).sum();
        if !(slope < 0.0) {
            identity(&mut h);
            dir = g.iter().map(|v| -v).collect();
            slope = -g.iter().map(|v| v * v).sum::<f64>();
            fresh_hessian = true;
        }
        let dnorm = inf_norm(&dir);
        if dnorm > MAX_STEP {
            let shrink = MAX_STEP / dnorm;
            dir.iter_mut().for_each(|d| *d *= shrink);
            slope *= shrink;
        }

        // Armijo backtracking
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + alpha * di).collect();
            let ft = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if !fresh_hessian {
                identity(&mut h);
                fresh_hessian = true;
                continue;
            }
            return Minimum {
                x,
                value: fx,
                iterations: iter,
                converged: gnorm < STALL_GRADIENT,
                gradient_norm: gnorm,
            };
        };

        let g_new = gradient(&f, &x_new, opts.step, f_new);
        let rel_change = (fx - f_new).abs() / fx.abs().max(1.0);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        x = x_new;
        fx = f_new;
        g = g_new;
        if rel_change < opts.relative_tolerance {
            return Minimum {
                x,
                value: fx,
                iterations: iter + 1,
                converged: true,
                gradient_norm: inf_norm(&g),
            };
        }

        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 {
            if fresh_hessian {
                // scale the initial inverse Hessian
                let yy: f64 = y.iter().map(|v| v * v).sum();
                let scale = sy / yy;
                h.iter_mut().for_each(|v| *v *= scale);
            }
            let hy: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum())
                .collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            let rho = 1.0 / sy;
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] +=
                        rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
                }
            }
            fresh_hessian = false;
        }
    }
    let gnorm = inf_norm(&g);
    Minimum {
        x,
        value: fx,
        iterations: opts.max_iterations,
        converged: gnorm < opts.gradient_tolerance,
        gradient_norm: gnorm,
    }
}
