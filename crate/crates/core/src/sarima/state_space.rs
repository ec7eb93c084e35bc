//! Companion-form state space representation of the reduced-form ARMA.
//!
//! With `m = max(r, s + 1)` for AR length `r` and MA length `s`:
//!
//! ```text
//! alpha_{t+1} = T alpha_t + R eps_{t+1},   y_t - mu = alpha_t[0]
//! T = [a | I_{m-1} ; 0],                   R = (1, b_1, ..., b_{m-1})'
//! ```

use crate::error::{Error, Result};
use crate::linalg::solve;

use super::order::{SarimaOrder, SarimaParams};
use super::polynomial::{expand_polynomials, ReducedForm};

/// Time-invariant linear Gaussian system with scalar observation.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceSystem {
    /// First column of the transition matrix, length `dim`.
    ar: Vec<f64>,
    /// Selection vector `R`, length `dim`, `R[0] = 1`.
    selection: Vec<f64>,
    pub mu: f64,
    pub sigma2: f64,
}

/// Builds the system for admissible parameters.
pub fn state_space(order: &SarimaOrder, params: &SarimaParams) -> Result<StateSpaceSystem> {
    let rf = expand_polynomials(order, params)?;
    if !params.is_admissible() {
        return Err(Error::NonStationary);
    }
    Ok(StateSpaceSystem::from_reduced(
        &rf,
        params.mu,
        params.sigma2,
    ))
}

impl StateSpaceSystem {
    pub(crate) fn from_reduced(rf: &ReducedForm, mu: f64, sigma2: f64) -> Self {
        let m = rf.ar.len().max(rf.ma.len() + 1);
        let mut ar = vec![0.0; m];
        ar[..rf.ar.len()].copy_from_slice(&rf.ar);
        let mut selection = vec![0.0; m];
        selection[0] = 1.0;
        selection[1..=rf.ma.len()].copy_from_slice(&rf.ma);
        Self {
            ar,
            selection,
            mu,
            sigma2,
        }
    }

    pub fn dim(&self) -> usize {
        self.ar.len()
    }

    pub fn ar(&self) -> &[f64] {
        &self.ar
    }

    pub fn selection(&self) -> &[f64] {
        &self.selection
    }

    /// Dense transition matrix, row-major.
    pub fn transition_matrix(&self) -> Vec<Vec<f64>> {
        let m = self.dim();
        (0..m)
            .map(|i| {
                let mut row = vec![0.0; m];
                row[0] = self.ar[i];
                if i + 1 < m {
                    row[i + 1] = 1.0;
                }
                row
            })
            .collect()
    }

    /// MA weights `b_0 = 1, b_1, ..`, zero-padded to `dim`.
    fn ma_weights(&self) -> &[f64] {
        &self.selection
    }

    /// Infinite moving-average weights `psi_0..=psi_n`.
    pub fn psi_weights(&self, n: usize) -> Vec<f64> {
        let b = self.ma_weights();
        let mut psi = vec![0.0; n + 1];
        for j in 0..=n {
            let mut v = b.get(j).copied().unwrap_or(0.0);
            for k in 1..=j.min(self.ar.len()) {
                v += self.ar[k - 1] * psi[j - k];
            }
            psi[j] = v;
        }
        psi
    }

    /// Autocovariances `gamma(0..=nlags)` of the observation for unit innovation variance.
    pub(crate) fn unit_autocovariances(&self, nlags: usize) -> Result<Vec<f64>> {
        let a = &self.ar;
        let b = self.ma_weights();
        let p = a.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1);
        let q = b.iter().rposition(|&c| c != 0.0).unwrap_or(0);
        let psi = self.psi_weights(q);
        // sum_{j=h}^{q} b_j psi_{j-h}
        let rhs = |h: usize| -> f64 { (h..=q).map(|j| b[j] * psi[j - h]).sum() };

        let mut gamma = vec![0.0; nlags.max(p) + 1];
        if p == 0 {
            for (h, g) in gamma.iter_mut().enumerate().take(q + 1) {
                *g = rhs(h);
            }
        } else {
            let n = p + 1;
            let mut mat = vec![0.0; n * n];
            for h in 0..n {
                mat[h * n + h] += 1.0;
                for k in 1..=p {
                    mat[h * n + h.abs_diff(k)] -= a[k - 1];
                }
            }
            let solved = solve(mat, (0..n).map(rhs).collect()).ok_or(Error::NonStationary)?;
            gamma[..n].copy_from_slice(&solved);
            for h in n..gamma.len() {
                let ar_part: f64 = (1..=p).map(|k| a[k - 1] * gamma[h - k]).sum();
                gamma[h] = ar_part + if h <= q { rhs(h) } else { 0.0 };
            }
        }
        if !(gamma[0] > 0.0) || gamma.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonStationary);
        }
        gamma.truncate(nlags + 1);
        Ok(gamma)
    }

    /// Autocovariances `gamma(0..=nlags)` scaled by `sigma2`.
    pub fn autocovariances(&self, nlags: usize) -> Result<Vec<f64>> {
        Ok(self
            .unit_autocovariances(nlags)?
            .into_iter()
            .map(|g| g * self.sigma2)
            .collect())
    }

    /// Stationary state covariance for unit innovation variance, row-major.
    pub(crate) fn unit_initial_covariance(&self) -> Result<Vec<f64>> {
        let m = self.dim();
        let gamma = self.unit_autocovariances(m)?;
        let psi = self.psi_weights(m);
        let a = &self.ar;
        let b = self.ma_weights();

        // alpha_t[i] = sum_l u_i(l) y_{t-l} + sum_l v_i(l) eps_{t-l}
        let mut ys: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        let mut es: Vec<Vec<(usize, f64)>> = Vec::with_capacity(m);
        ys.push(vec![(0, 1.0)]);
        es.push(Vec::new());
        for i in 1..m {
            ys.push(
                (1..=m - i)
                    .map(|l| (l, a[i + l - 1]))
                    .filter(|t| t.1 != 0.0)
                    .collect(),
            );
            es.push(
                (0..m - i)
                    .map(|l| (l, b[i + l]))
                    .filter(|t| t.1 != 0.0)
                    .collect(),
            );
        }
        // cov(y_{t-l}, eps_{t-l'}) = psi_{l'-l} for l' >= l
        let cross = |l: usize, lp: usize| if lp >= l { psi[lp - l] } else { 0.0 };

        let mut cov = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let mut acc = 0.0;
                for &(l, u) in &ys[i] {
                    for &(lp, w) in &ys[j] {
                        acc += u * w * gamma[l.abs_diff(lp)];
                    }
                    for &(lp, w) in &es[j] {
                        acc += u * w * cross(l, lp);
                    }
                }
                for &(l, v) in &es[i] {
                    for &(lp, w) in &ys[j] {
                        acc += v * w * cross(lp, l);
                    }
                    for &(lp, w) in &es[j] {
                        if l == lp {
                            acc += v * w;
                        }
                    }
                }
                cov[i * m + j] = acc;
                cov[j * m + i] = acc;
            }
        }
        Ok(cov)
    }

    /// First column of the unit stationary state covariance, `cov(alpha_t, y_t)`.
    pub(crate) fn unit_initial_first_column(&self) -> Result<Vec<f64>> {
        let m = self.dim();
        let gamma = self.unit_autocovariances(m)?;
        let psi = self.psi_weights(m);
        let a = &self.ar;
        let b = self.ma_weights();
        let mut col = vec![0.0; m];
        col[0] = gamma[0];
        for (i, c) in col.iter_mut().enumerate().skip(1) {
            let ys: f64 = (1..=m - i).map(|l| a[i + l - 1] * gamma[l]).sum();
            let es: f64 = (0..m - i).map(|l| b[i + l] * psi[l]).sum();
            *c = ys + es;
        }
        Ok(col)
    }

    /// Stationary covariance of the state, `sigma2 * P0`, row-major.
    pub fn initial_state_covariance(&self) -> Result<Vec<f64>> {
        Ok(self
            .unit_initial_covariance()?
            .into_iter()
            .map(|v| v * self.sigma2)
            .collect())
    }
}
