//! Monotone map between unconstrained reals and stable lag polynomials.
//!
//! Each block of coefficients is parameterized by its partial
//! autocorrelations `r_k = x_k / sqrt(1 + x_k^2)`, which the Durbin-Levinson
//! recursion turns into the coefficients of a stationary AR polynomial
//! `1 - sum a_k L^k`. MA blocks reuse the map with a sign flip.

/// Durbin-Levinson recursion from partial autocorrelations to AR coefficients.
pub fn pacf_to_ar(pacf: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = Vec::with_capacity(pacf.len());
    for (k, &r) in pacf.iter().enumerate() {
        let prev = a.clone();
        for j in 0..k {
            a[j] = prev[j] - r * prev[k - 1 - j];
        }
        a.push(r);
    }
    a
}

/// Step-down recursion; `None` if some partial autocorrelation has `|r| >= 1`.
pub fn ar_to_pacf(coeffs: &[f64]) -> Option<Vec<f64>> {
    let mut a = coeffs.to_vec();
    let mut pacf = vec![0.0; a.len()];
    for k in (0..a.len()).rev() {
        let r = a[k];
        if !(r.abs() < 1.0) {
            return None;
        }
        pacf[k] = r;
        let denom = 1.0 - r * r;
        let prev = a.clone();
        for j in 0..k {
            a[j] = (prev[j] + r * prev[k - 1 - j]) / denom;
        }
        a.truncate(k);
    }
    Some(pacf)
}

/// True when `1 - sum a_k L^k` has all roots strictly outside the unit circle.
pub fn is_stable(coeffs: &[f64]) -> bool {
    ar_to_pacf(coeffs).is_some()
}

pub fn constrain_ar(free: &[f64]) -> Vec<f64> {
    let pacf: Vec<f64> = free.iter().map(|x| x / (1.0 + x * x).sqrt()).collect();
    pacf_to_ar(&pacf)
}

pub fn unconstrain_ar(coeffs: &[f64]) -> Option<Vec<f64>> {
    ar_to_pacf(coeffs).map(|p| p.iter().map(|r| r / (1.0 - r * r).sqrt()).collect())
}

/// MA coefficients in `1 + sum theta_j L^j` convention, always invertible.
pub fn constrain_ma(free: &[f64]) -> Vec<f64> {
    constrain_ar(free).into_iter().map(|c| -c).collect()
}

pub fn unconstrain_ma(coeffs: &[f64]) -> Option<Vec<f64>> {
    let neg: Vec<f64> = coeffs.iter().map(|c| -c).collect();
    unconstrain_ar(&neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Largest root modulus of the companion matrix via its eigenvalues.
    fn spectral_radius(a: &[f64]) -> f64 {
        let m = a.len();
        if m == 0 {
            return 0.0;
        }
        let t = nalgebra::DMatrix::from_fn(m, m, |i, j| {
            if i == 0 {
                a[j]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        t.complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn agrees_with_eigenvalues_on_known_polynomials() {
        for a in [
            vec![0.5, 0.3],
            vec![1.6, -0.5],
            vec![1.5, -0.6],
            vec![0.2, 0.1, 0.95],
            vec![-0.3, 1.2],
            vec![0.9, 0.0, 0.0, 0.5, -0.45],
        ] {
            assert_eq!(is_stable(&a), spectral_radius(&a) < 1.0, "{a:?}");
        }
    }

    #[test]
    fn known_cases() {
        assert!(is_stable(&[0.5]));
        assert!(!is_stable(&[1.0]));
        assert!(!is_stable(&[1.2]));
        assert!(is_stable(&[0.5, 0.3]));
        // 1 - 1.5L + 0.5L^2 has a unit root
        assert!(!is_stable(&[1.5, -0.5]));
        assert!(is_stable(&[]));
    }

    #[test]
    fn ar1_is_tanh_like() {
        let c = constrain_ar(&[1.0]);
        assert!((c[0] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn constrained_blocks_are_stable(free in prop::collection::vec(-4.0f64..4.0, 1..6)) {
            let a = constrain_ar(&free);
            prop_assert!(is_stable(&a));
            prop_assert!(spectral_radius(&a) < 1.0);
            let back = unconstrain_ar(&a).unwrap();
            for (x, y) in back.iter().zip(&free) {
                prop_assert!((x - y).abs() < 1e-6 * y.abs().max(1.0));
            }
            let m = constrain_ma(&free);
            let neg: Vec<f64> = m.iter().map(|v| -v).collect();
            prop_assert!(is_stable(&neg));
        }
    }
}
