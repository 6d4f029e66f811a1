//! Search-space and factor-base parameters in L-notation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_K1: u64 = 5;
pub const Q0_FLOOR: u64 = 256;
pub const Q0_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LParams {
    pub log_delta: f64,
    pub n0: f64,
    pub d0: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub rho: f64,
    pub delta: f64,
    pub nu: f64,
    #[serde(rename = "B")]
    pub b: u64,
    pub a: u64,
    pub k: u64,
    pub q0: u64,
    #[serde(rename = "K1")]
    pub k1: u64,
    /// Set when log n / log log|Δ| fell outside [1/3, 2/3) and was clamped.
    #[serde(skip)]
    pub alpha_clamped: bool,
}

/// `L(s, c) = exp(c · logΔ^s · (log logΔ)^(1-s))`.
pub fn l_notation(log_delta: f64, s: f64, c: f64) -> Result<f64> {
    if !(log_delta > std::f64::consts::E) {
        return Err(Error::Domain(format!(
            "L-notation needs log|disc| > e, got {log_delta}"
        )));
    }
    let m = log_delta.ln();
    Ok((c * log_delta.powf(s) * m.powf(1.0 - s)).exp())
}

/// ρ, δ = ν at the optimum for a given κ.
pub fn optimal_rho_delta_nu(kappa: f64) -> (f64, f64, f64) {
    let rho = (5.0 * kappa / 144.0).cbrt();
    let dn = (5.0 * rho / kappa).sqrt();
    (rho, dn, dn)
}

pub fn choose_params(log_delta: f64, n: u64, d: u64, k1_override: Option<u64>) -> Result<LParams> {
    if n < 2 {
        return Err(Error::Domain(format!("degree must be at least 2, got {n}")));
    }
    if d < 1 {
        return Err(Error::Domain("coefficient size d must be at least 1".into()));
    }
    let lo = 1.0 / 3.0;
    let hi = 2.0 / 3.0 - 1e-9;
    l_notation(log_delta, 1.0 / 3.0, 1.0)?;
    let m = log_delta.ln();
    let raw_alpha = (n as f64).ln() / m;
    let alpha = raw_alpha.clamp(lo, hi);
    let alpha_clamped = alpha != raw_alpha;
    let n0 = n as f64 / log_delta.powf(alpha);
    let d0 = d as f64 / log_delta.powf(1.0 - alpha);
    let kappa = n0 * d0;
    let (rho, delta, nu) = optimal_rho_delta_nu(kappa);
    let b = (l_notation(log_delta, 1.0 / 3.0, rho)?.ceil() as u64).max(2);
    let scale = (log_delta / m).cbrt();
    let a = ((delta * kappa * log_delta / n as f64 / scale).ceil() as u64).max(1);
    let k = ((nu * n as f64 / scale).ceil() as u64).clamp(1, n - 1);
    let q0_raw = l_notation(log_delta, 1.0 / 3.0, 3.0 * rho)?.ceil();
    let q0 = if q0_raw.is_finite() {
        (q0_raw as u64).min(Q0_CAP).max(Q0_FLOOR)
    } else {
        Q0_CAP
    };
    Ok(LParams {
        log_delta,
        n0,
        d0,
        alpha,
        kappa,
        rho,
        delta,
        nu,
        b,
        a,
        k,
        q0,
        k1: k1_override.unwrap_or(DEFAULT_K1),
        alpha_clamped,
    })
}

/// Candidates per relation by the u^u rule, u = ι/μ.
pub fn expected_trials(log_norm_bound: f64, log_prime_bound: f64) -> f64 {
    let u = log_norm_bound / log_prime_bound;
    u.powf(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn l_notation_examples() {
        let ee = E.powf(E);
        assert!(rel(l_notation(ee, 1.0, 1.0).unwrap(), ee.exp()) < 1e-12);
        assert!(rel(l_notation(ee, 0.0, 2.0).unwrap(), 229.651_664_083_524) < 1e-12);
        // exp(100^(1/3) (ln 100)^(2/3)), reference from a 30-digit evaluation
        let v = l_notation(100.0, 1.0 / 3.0, 1.0).unwrap();
        assert!(rel(v.ln(), 12.847_849_961_892) < 1e-9, "{}", v.ln());
        assert!(l_notation(E, 0.5, 1.0).is_err());
        assert!(l_notation(1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn optimum_at_unit_rho() {
        let (rho, delta, nu) = optimal_rho_delta_nu(144.0 / 5.0);
        assert!((rho - 1.0).abs() < 1e-14);
        assert!((delta - 5.0 / 12.0).abs() < 1e-14);
        assert_eq!(delta, nu);
    }

    #[test]
    fn product_constraint_and_double_root() {
        for kappa in [0.3, 1.0, 144.0 / 5.0, 7.5, 123.0] {
            let (rho, delta, nu) = optimal_rho_delta_nu(kappa);
            assert!(rel(nu * delta * kappa, 5.0 * rho) < 1e-12);
            let b = 24.0 * rho * rho / kappa;
            let c = 5.0 * rho / kappa;
            for x in [delta, nu] {
                assert!((x * x - b * x + c).abs() <= 1e-12 * (x * x).max(c));
            }
            // discriminant of the quadratic vanishes at the optimum
            assert!((b * b - 4.0 * c).abs() < 1e-12 * b * b);
        }
    }

    #[test]
    fn yield_constraint_value_at_optimum() {
        // With sum δ+ν = 24ρ²/κ, κ(ν+δ)/(3ρ) + ρ equals 9ρ, not the 5ρ of the
        // product constraint.
        let kappa = 144.0 / 5.0;
        let (rho, delta, nu) = optimal_rho_delta_nu(kappa);
        let lhs = kappa * (nu + delta) / (3.0 * rho) + rho;
        assert!(rel(lhs, 9.0 * rho) < 1e-12);
        assert!(rel(nu * delta * kappa, 5.0 * rho) < 1e-12);
    }

    #[test]
    fn expected_trials_examples() {
        assert_eq!(expected_trials(7.0, 7.0), 1.0);
        assert!(rel(expected_trials(2.0, 1.0), 4.0) < 1e-15);
        assert!(rel(expected_trials(100.0, 20.0), 3125.0) < 1e-12);
    }

    #[test]
    fn choose_params_shape() {
        let p = choose_params(50000f64.ln(), 5, 2, None).unwrap();
        assert!((p.kappa - p.n0 * p.d0).abs() < 1e-12);
        assert!(p.alpha >= 1.0 / 3.0 && p.alpha < 2.0 / 3.0);
        assert!(p.b >= 2 && p.a >= 1 && (1..5).contains(&p.k));
        assert!(p.q0 >= Q0_FLOOR && p.q0 <= Q0_CAP);
        assert_eq!(p.k1, DEFAULT_K1);
        assert!(rel(p.nu * p.delta * p.kappa, 5.0 * p.rho) < 1e-12);
        assert_eq!(choose_params(50000f64.ln(), 5, 2, Some(9)).unwrap().k1, 9);
        // cubic with tiny discriminant: clamped alpha is reported
        let q = choose_params(3.0, 3, 1, None).unwrap();
        assert!(q.alpha_clamped);
        assert!(choose_params(2.0, 2, 1, None).is_err());
    }

    #[test]
    fn json_keys() {
        let p = choose_params(20.0, 3, 2, None).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        let mut want = vec![
            "log_delta", "n0", "d0", "alpha", "kappa", "rho", "delta", "nu", "B", "a", "k", "q0", "K1",
        ];
        want.sort();
        assert_eq!(keys, want);
    }

    proptest! {
        #[test]
        fn l_notation_monotone(ld in 3.0f64..1e4, s in 0.01f64..1.0, c in 0.1f64..3.0, dl in 0.01f64..10.0, dc in 0.01f64..1.0) {
            let base = l_notation(ld, s, c).unwrap();
            prop_assert!(l_notation(ld + dl, s, c).unwrap() >= base);
            prop_assert!(l_notation(ld, s, c + dc).unwrap() >= base);
        }

        #[test]
        fn choose_params_deterministic(ld in 3.0f64..500.0, n in 2u64..12, d in 1u64..40) {
            let a = choose_params(ld, n, d, None).unwrap();
            let b = choose_params(ld, n, d, None).unwrap();
            prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
            let b2 = 24.0 * a.rho * a.rho / a.kappa;
            let c2 = 5.0 * a.rho / a.kappa;
            prop_assert!((a.delta * a.delta - b2 * a.delta + c2).abs() <= 1e-12 * c2.max(a.delta * a.delta));
        }
    }
}
