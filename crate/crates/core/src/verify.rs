//! Analytic class number check and independent oracles for quadratic and
//! small-unit fields.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::fixedreal::FixedReal;
use crate::fpoly::{self, FpPoly};
use crate::numfield::{embeddings, log_embedding, norm, NumberField};
use crate::params::LParams;
use crate::poly::ZPoly;
use crate::regulator::{compute_regulator, independent_rows, UnitCompact, UnitLogMatrix};
use crate::util::primes_up_to;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalUnit {
    #[serde(with = "crate::serde_big::bigint_vec")]
    pub exponents: Vec<BigInt>,
    pub over_generators: Vec<ZPoly>,
    pub log_vector: Vec<FixedReal>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassGroupResult {
    pub schema_version: u32,
    pub poly: String,
    #[serde(with = "crate::serde_big::bigint")]
    pub disc: BigInt,
    pub signature: (usize, usize),
    pub h: u64,
    pub divisors: Vec<u64>,
    pub regulator: FixedReal,
    pub regulator_approx: f64,
    pub fundamental_units: Vec<FundamentalUnit>,
    pub hstar: (f64, f64),
    pub verified: bool,
    pub w: u64,
    pub euler_bound: u64,
    pub params: LParams,
    pub factor_base_size: usize,
    pub relations: usize,
    pub trials: u64,
    pub seed: u64,
    pub attempts: u32,
}

impl FundamentalUnit {
    /// Keep only the generators with nonzero exponent.
    pub fn from_compact(unit: &UnitCompact, gens: &[&ZPoly], logs: &[FixedReal]) -> Self {
        let (exponents, over_generators) = unit
            .w
            .iter()
            .zip(gens)
            .filter(|(w, _)| !w.is_zero())
            .map(|(w, g)| (w.clone(), (*g).clone()))
            .unzip();
        FundamentalUnit {
            exponents,
            over_generators,
            log_vector: logs.to_vec(),
        }
    }
}

fn euler_phi(mut m: u64) -> u64 {
    let mut out = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

/// Completely split primes not dividing the discriminant, in order.
fn split_primes(field: &NumberField, count: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut bound = 1000;
    while out.len() < count {
        out.clear();
        for p in primes_up_to(bound) {
            if (&field.disc % BigInt::from(p)).is_zero() {
                continue;
            }
            let degs = fpoly::factor_degrees(&FpPoly::from_zpoly(&field.t, p));
            if degs.iter().all(|&(d, _)| d == 1) && degs.len() == field.n {
                out.push(p);
                if out.len() == count {
                    break;
                }
            }
        }
        bound *= 4;
    }
    out
}

/// Number of roots of unity: 2 with a real place; otherwise the largest even
/// m with φ(m) | n such that the first 20 split primes are all 1 mod m.
pub fn roots_of_unity(field: &NumberField) -> u64 {
    if field.r1 > 0 {
        return 2;
    }
    let n = field.n as u64;
    let primes = split_primes(field, 20);
    let mut w = 2;
    for m in (2..=4 * n * n + 2).step_by(2) {
        let ph = euler_phi(m);
        if n % ph == 0 && primes.iter().all(|&p| p % m == 1) {
            w = w.max(m);
        }
    }
    w
}

/// ln of the truncated Euler product `∏_{p≤P} (1-1/p) / ∏_{𝔭|p} (1-1/N𝔭)`.
pub fn log_euler_product(field: &NumberField, bound: u64) -> f64 {
    let mut s = 0.0;
    for p in primes_up_to(bound) {
        let pf = p as f64;
        s += (-1.0 / pf).ln_1p();
        for (d, _) in fpoly::factor_degrees(&FpPoly::from_zpoly(&field.t, p)) {
            let nm = pf.powi(d as i32);
            s -= (-1.0 / nm).ln_1p();
        }
    }
    s
}

/// `w √|d| / (2^r1 (2π)^r2)` times the truncated Euler product: an estimate
/// of h·R.
pub fn analytic_estimate(field: &NumberField, bound: u64, w: u64) -> f64 {
    let ld = crate::util::log2_abs(&field.disc) * LN_2;
    let l = (w as f64).ln() + 0.5 * ld - field.r1 as f64 * LN_2 - field.r2 as f64 * (2.0 * PI).ln()
        + log_euler_product(field, bound);
    l.exp()
}

/// h* as the interval [E/2, E] around the estimate E.
pub fn euler_product_hstar(field: &NumberField, bound: u64) -> (f64, f64) {
    assert!(bound >= 100);
    let e = analytic_estimate(field, bound, roots_of_unity(field));
    (e / 2.0, e)
}

/// `h·R ∈ [low, 2·high)`.
pub fn check_result(h: u64, r: &FixedReal, hstar: (f64, f64)) -> bool {
    let hr = h as f64 * r.to_f64();
    hr >= hstar.0 && hr < 2.0 * hstar.1
}

/// Class number from the analytic estimate and a known regulator.
pub fn analytic_class_number(field: &NumberField, regulator: f64, bound: u64) -> u64 {
    let e = analytic_estimate(field, bound, roots_of_unity(field));
    (e / regulator).round().max(1.0) as u64
}

pub type Form = (i64, i64, i64);

fn reduce_form((mut a, mut b, mut c): Form) -> Form {
    loop {
        // b into (-a, a]
        let two_a = 2 * a;
        let mut bb = b.mod_floor(&two_a);
        if bb > a {
            bb -= two_a;
        }
        if bb != b {
            let d = b * b - 4 * a * c;
            b = bb;
            c = (b * b - d) / (4 * a);
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        return (a, b, c);
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    (e.x, e.y, e.gcd)
}

/// Composition of primitive positive definite forms of equal discriminant,
/// reduced.
pub fn compose((a1, b1, c1): Form, (a2, b2, c2): Form) -> Form {
    let (f1, f2) = if a1 > a2 {
        ((a2, b2, c2), (a1, b1, c1))
    } else {
        ((a1, b1, c1), (a2, b2, c2))
    };
    let (a1, b1, _) = f1;
    let (a2, b2, c2) = f2;
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (y1, d) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let (u, _, d) = ext_gcd(a2, a1);
        (u, d)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let (x2, y2, d1) = ext_gcd(s, d);
        (x2, -y2, d1)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 as i128 * y2 as i128 * n as i128 - x2 as i128 * c2 as i128).rem_euclid(v1 as i128) as i64;
    let b3 = b2 + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
    reduce_form((a3, b3, c3))
}

/// All reduced primitive forms of discriminant d < 0.
pub fn reduced_forms(d: i64) -> Vec<Form> {
    assert!(d < 0 && d.rem_euclid(4) <= 1);
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 || (b * b - d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - d) / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    out
}

/// Invariant factors of a finite abelian group from the sizes of its
/// p^k-torsion subgroups.
fn invariants_from_orders(orders: &[u64]) -> Vec<u64> {
    let h = orders.len() as u64;
    let mut per_prime: Vec<Vec<u64>> = Vec::new();
    let mut m = h;
    let mut p = 2;
    while m > 1 {
        if m % p != 0 {
            p += 1;
            continue;
        }
        while m % p == 0 {
            m /= p;
        }
        // counts[k] = #{x : ord(x) | p^k}
        let mut counts = vec![1u64];
        let mut pk = 1;
        loop {
            pk *= p;
            let c = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
            counts.push(c);
            if c == counts[counts.len() - 2] {
                break;
            }
        }
        // #{λ_i >= k} = log_p(counts[k]/counts[k-1])
        let mut ge: Vec<u32> = Vec::new();
        for k in 1..counts.len() {
            let mut ratio = counts[k] / counts[k - 1];
            let mut e = 0;
            while ratio > 1 {
                ratio /= p;
                e += 1;
            }
            ge.push(e);
        }
        let parts = ge[0] as usize;
        let mut lambdas = vec![0u32; parts];
        for e in &ge {
            for l in lambdas.iter_mut().take(*e as usize) {
                *l += 1;
            }
        }
        per_prime.push(lambdas.iter().map(|&l| p.pow(l)).collect());
    }
    let len = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
    // lambdas are descending; the largest parts multiply into the last factor
    let mut out = vec![1u64; len];
    for v in per_prime {
        for (i, x) in v.iter().enumerate() {
            out[len - 1 - i] *= x;
        }
    }
    out
}

/// Class number and ascending invariant factors for a negative fundamental
/// discriminant, from reduced forms and composition.
pub fn oracle_imag_quadratic(d: i64) -> (u64, Vec<u64>) {
    let forms = reduced_forms(d);
    let h = forms.len();
    let identity = reduce_form((1, d.rem_euclid(2), (d.rem_euclid(2) - d) / 4));
    let index: HashMap<Form, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let orders: Vec<u64> = forms
        .iter()
        .map(|&f| {
            let mut x = f;
            let mut k = 1;
            while x != identity {
                x = compose(x, f);
                debug_assert!(index.contains_key(&x));
                k += 1;
            }
            k
        })
        .collect();
    (h as u64, invariants_from_orders(&orders).into_iter().filter(|&d| d > 1).collect())
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Regulator of the real quadratic field of fundamental discriminant d > 0:
/// sum of the logs of the complete quotients of (P0 + √d)/2 over one
/// period, P0 the largest integer below √d with P0 ≡ d (mod 2).
pub fn oracle_real_quadratic(d: i64) -> f64 {
    assert!(d > 1 && d.rem_euclid(4) <= 1);
    let s = isqrt(d);
    let sqrt_d = (d as f64).sqrt();
    let mut p0 = if s * s == d { s - 1 } else { s };
    if (p0 - d).rem_euclid(2) != 0 {
        p0 -= 1;
    }
    let start = (p0, 2i64);
    let (mut p, mut q) = start;
    let mut reg = 0.0;
    loop {
        let xi = (p as f64 + sqrt_d) / q as f64;
        reg += xi.ln();
        // floor((p + √d)/q) with exact integer arithmetic (q > 0)
        let a = (p + s).div_euclid(q);
        let p1 = a * q - p;
        let q1 = (d - p1 * p1) / q;
        p = p1;
        q = q1;
        if (p, q) == start {
            return reg;
        }
    }
}

/// Units A(θ) with coefficients in [-H, H] and norm ±1, other than ±1, up
/// to sign.
pub fn oracle_unit_search(field: &NumberField, height: i64) -> Vec<ZPoly> {
    let n = field.n;
    let side = (2 * height + 1) as usize;
    let total = side.pow(n as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut c = Vec::with_capacity(n);
        let mut x = idx;
        for _ in 0..n {
            c.push((x % side) as i64 - height);
            x /= side;
        }
        let a = ZPoly::from_i64(&c);
        if a.is_zero() || a.lc().is_negative() || (a.is_constant() && a.coeff(0).abs() == BigInt::from(1)) {
            continue;
        }
        if norm(field, &a).map_or(false, |v| v.abs() == BigInt::from(1)) {
            out.push(a);
        }
    }
    out
}

/// Covolume of the lattice spanned by the log vectors of the given units.
pub fn unit_lattice_regulator(field: &NumberField, units: &[ZPoly], q: u64) -> crate::Result<f64> {
    let r = field.unit_rank();
    if r == 0 {
        return Ok(1.0);
    }
    let emb = embeddings(field, q)?;
    let mut rows = Vec::new();
    let mut compact = Vec::new();
    for (i, u) in units.iter().enumerate() {
        rows.push(log_embedding(field, &emb, u, q)?);
        let mut w = vec![BigInt::zero(); units.len()];
        w[i] = BigInt::from(1);
        compact.push(UnitCompact { w });
    }
    let m = UnitLogMatrix { rows, units: compact };
    let perm = independent_rows(&m, r, field.n)?;
    Ok(compute_regulator(&m, &perm, r, q)?.value.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::build_field;
    use proptest::prelude::*;

    fn field(s: &str) -> NumberField {
        build_field(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn imag_quadratic_examples() {
        assert_eq!(reduced_forms(-23), vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]);
        assert_eq!(oracle_imag_quadratic(-23), (3, vec![3]));
        assert_eq!(oracle_imag_quadratic(-4), (1, vec![]));
        assert_eq!(oracle_imag_quadratic(-47), (5, vec![5]));
        assert_eq!(oracle_imag_quadratic(-71), (7, vec![7]));
        assert_eq!(oracle_imag_quadratic(-8), (1, vec![]));
        // Z/2 × Z/2 and Z/2 × Z/4 structures
        assert_eq!(oracle_imag_quadratic(-84), (4, vec![2, 2]));
        assert_eq!(oracle_imag_quadratic(-260), (8, vec![2, 4]));
        assert_eq!(oracle_imag_quadratic(-56).0, 4);
        assert_eq!(oracle_imag_quadratic(-56).1, vec![4]);
    }

    // class numbers of imaginary quadratic fields via the analytic formula
    // h = w √|d| L(1,χ) / 2π, with L(1,χ) from the finite sum
    // -(1/|d|) Σ χ(a) a
    fn jacobi(a: i64, n: i64) -> i64 {
        let (mut a, mut n) = (a.rem_euclid(n), n);
        let mut t = 1;
        while a != 0 {
            while a % 2 == 0 {
                a /= 2;
                if n % 8 == 3 || n % 8 == 5 {
                    t = -t;
                }
            }
            std::mem::swap(&mut a, &mut n);
            if a % 4 == 3 && n % 4 == 3 {
                t = -t;
            }
            a %= n;
        }
        if n == 1 {
            t
        } else {
            0
        }
    }

    fn kronecker(d: i64, mut a: i64) -> i64 {
        let mut t = 1;
        while a % 2 == 0 {
            a /= 2;
            match d.rem_euclid(8) {
                1 | 7 => {}
                3 | 5 => t = -t,
                _ => return 0,
            }
        }
        t * jacobi(d, a)
    }

    proptest! {
        #[test]
        fn form_count_matches_character_sum(k in 3i64..2000) {
            let d = -k;
            prop_assume!(d.rem_euclid(4) <= 1);
            // fundamental: squarefree away from 2-power conditions
            let fundamental = if d.rem_euclid(4) == 1 {
                (2..=k).take_while(|p| p * p <= k).all(|p| k % (p * p) != 0)
            } else {
                let m = d / 4;
                (m.rem_euclid(4) == 2 || m.rem_euclid(4) == 3)
                    && (2..=m.abs()).take_while(|p| p * p <= m.abs()).all(|p| m.abs() % (p * p) != 0)
            };
            prop_assume!(fundamental);
            let s: i64 = (1..k).map(|a| kronecker(d, a) * a).sum();
            let w = match d { -3 => 6, -4 => 4, _ => 2 };
            let h = -s * w / (2 * k);
            let (h_forms, divs) = oracle_imag_quadratic(d);
            prop_assert_eq!(h_forms as i64, h);
            prop_assert_eq!(divs.iter().product::<u64>().max(1), h_forms);
            for pair in divs.windows(2) {
                prop_assert_eq!(pair[1] % pair[0], 0);
            }
        }
    }

    #[test]
    fn real_quadratic_regulators() {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(oracle_real_quadratic(5), ((1.0 + 5f64.sqrt()) / 2.0).ln()));
        assert!(close(oracle_real_quadratic(8), (1.0 + 2f64.sqrt()).ln()));
        assert!(close(oracle_real_quadratic(13), ((3.0 + 13f64.sqrt()) / 2.0).ln()));
        // d = 12: ε = 2 + √3; d = 21: ε = (5 + √21)/2
        assert!(close(oracle_real_quadratic(12), (2.0 + 3f64.sqrt()).ln()));
        assert!(close(oracle_real_quadratic(21), ((5.0 + 21f64.sqrt()) / 2.0).ln()));
        // d = 229 has ε = (15 + √229)/2 of norm -1
        assert!(close(oracle_real_quadratic(229), ((15.0 + 229f64.sqrt()) / 2.0).ln()));
    }

    #[test]
    fn roots_of_unity_examples() {
        assert_eq!(roots_of_unity(&field("x^2+1")), 4);
        assert_eq!(roots_of_unity(&field("x^2+x+1")), 6);
        assert_eq!(roots_of_unity(&field("x^2+x+6")), 2);
        assert_eq!(roots_of_unity(&field("x^2-2")), 2);
        assert_eq!(roots_of_unity(&field("x^4+1")), 8);
    }

    #[test]
    fn hstar_windows() {
        let f = field("x^2-x-1");
        let hs = euler_product_hstar(&f, 10_000);
        let r = FixedReal::from_f64(0.48121182505960347, 64);
        assert!(check_result(1, &r, hs), "{hs:?}");
        let f = field("x^2+1");
        let hs = euler_product_hstar(&f, 10_000);
        let one = FixedReal::from_int(&BigInt::from(1), 64);
        assert!(check_result(1, &one, hs), "{hs:?}");
        assert!(!check_result(3, &one, (hs.1 / 6.0, hs.1 / 3.0 - 0.01)));
        let mid = (hs.0 + hs.1) / 2.0;
        assert!(check_result(1, &FixedReal::from_f64(mid, 64), hs));
        assert!(!check_result(1, &FixedReal::from_f64(3.0 * hs.1, 64), hs));
    }

    #[test]
    fn cubic_unit_search() {
        let f = field("x^3-2");
        let units = oracle_unit_search(&f, 1);
        assert!(units.contains(&ZPoly::from_i64(&[-1, 1])));
        let r = unit_lattice_regulator(&f, &units, 128).unwrap();
        assert!((r - 1.3473773483293841).abs() < 1e-12, "{r}");
        assert_eq!(analytic_class_number(&f, r, 10_000), 1);
        let f = field("x^3-7");
        let units = oracle_unit_search(&f, 2);
        let r = unit_lattice_regulator(&f, &units, 128).unwrap();
        assert_eq!(analytic_class_number(&f, r, 10_000), 3);
    }
}
