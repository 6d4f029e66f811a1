//! Small numeric helpers shared across modules.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

/// Nearest f64 (saturating to +-inf for enormous values).
pub fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.sign() == Sign::Minus {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// log2 |x| as f64, accurate to about 1e-15 relative; `-inf` for zero.
pub fn log2_abs(x: &BigInt) -> f64 {
    log2_uint(x.magnitude())
}

pub fn log2_uint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.log2() + shift as f64
}

/// ⌈√x⌉ for a nonnegative integer.
pub fn ceil_sqrt(x: &BigUint) -> BigUint {
    let s = x.sqrt();
    if &s * &s == *x {
        s
    } else {
        s + 1u32
    }
}

/// ⌈a / b⌉ for b > 0.
pub fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// Primes up to and including `bound` (sieve of Eratosthenes).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &p)| p)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Reduce a BigInt into [0, p).
pub fn mod_u64(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = if r.sign() == Sign::Minus { r + p } else { r };
    r.to_u64().unwrap()
}
