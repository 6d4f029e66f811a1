//! Polynomials over a prime field F_p and their factorization.
//!
//! Factorization is squarefree decomposition, then distinct-degree, then
//! Cantor-Zassenhaus equal-degree splitting (trace map when p = 2). The
//! splitting randomness is seeded from (p, degree) so results never depend on
//! call order.

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::ZPoly;
use crate::util::{mod_u64, mul_mod, pow_mod};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_zpoly(f: &ZPoly, p: u64) -> Self {
        FpPoly::new(p, f.coeffs().iter().map(|x| mod_u64(x, p)).collect())
    }

    /// Lift with coefficients in [0, p).
    pub fn to_zpoly(&self) -> ZPoly {
        ZPoly::new(self.c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    fn deg_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    fn inv(&self, a: u64) -> u64 {
        pow_mod(a, self.p - 2, self.p)
    }

    pub fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let li = self.inv(self.lc());
        self.scale(li)
    }

    pub fn scale(&self, s: u64) -> FpPoly {
        let p = self.p;
        FpPoly::new(p, self.c.iter().map(|&a| mul_mod(a, s, p)).collect())
    }

    pub fn add(&self, o: &FpPoly) -> FpPoly {
        let p = self.p;
        let n = self.c.len().max(o.c.len());
        FpPoly::new(
            p,
            (0..n)
                .map(|i| (self.c.get(i).copied().unwrap_or(0) + o.c.get(i).copied().unwrap_or(0)) % p)
                .collect(),
        )
    }

    pub fn sub(&self, o: &FpPoly) -> FpPoly {
        let p = self.p;
        let n = self.c.len().max(o.c.len());
        FpPoly::new(
            p,
            (0..n)
                .map(|i| {
                    (self.c.get(i).copied().unwrap_or(0) + p - o.c.get(i).copied().unwrap_or(0)) % p
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &FpPoly) -> FpPoly {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u128; self.c.len() + o.c.len() - 1];
        let pp = p as u128;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % pp;
            }
        }
        FpPoly::new(p, out.into_iter().map(|x| x as u64).collect())
    }

    pub fn divrem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        let p = self.p;
        let dd = d.degree().expect("division by zero polynomial");
        if self.c.len() <= dd {
            return (FpPoly::zero(p), self.clone());
        }
        let li = self.inv(d.lc());
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = mul_mod(r[i], li, p);
            if c == 0 {
                continue;
            }
            q[i - dd] = c;
            for j in 0..=dd {
                let t = mul_mod(c, d.c[j], p);
                r[i - dd + j] = (r[i - dd + j] + p - t) % p;
            }
        }
        r.truncate(dd);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &FpPoly) -> FpPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns monic g with s*self + t*o = g.
    pub fn ext_gcd(&self, o: &FpPoly) -> (FpPoly, FpPoly, FpPoly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (FpPoly::one(p), FpPoly::zero(p));
        let (mut t0, mut t1) = (FpPoly::zero(p), FpPoly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let li = self.inv(r0.lc());
        (r0.scale(li), s0.scale(li), t0.scale(li))
    }

    pub fn derivative(&self) -> FpPoly {
        let p = self.p;
        FpPoly::new(
            p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| mul_mod(a, i as u64 % p, p))
                .collect(),
        )
    }

    /// self^e mod m.
    pub fn pow_mod(&self, e: &BigUint, m: &FpPoly) -> FpPoly {
        let mut result = FpPoly::one(self.p).rem(m);
        let base = self.rem(m);
        let bits = e.bits();
        for i in (0..bits).rev() {
            result = result.mul(&result).rem(m);
            if e.bit(i) {
                result = result.mul(&base).rem(m);
            }
        }
        result
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.c
            .iter()
            .rev()
            .fold(0u64, |acc, &a| (mul_mod(acc, x, p) + a) % p)
    }

    /// Inverse of the Frobenius on coefficients: requires every exponent to be
    /// a multiple of p.
    fn pth_root(&self) -> FpPoly {
        let p = self.p as usize;
        FpPoly::new(
            self.p,
            self.c.iter().step_by(p).copied().collect(),
        )
    }
}

/// Squarefree decomposition of a monic polynomial: pairs (g, m), g squarefree,
/// pairwise coprime, with f = prod g^m.
pub fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.modulus();
    let mut out = Vec::new();
    if f.deg_or_zero() == 0 {
        return out;
    }
    let f = f.monic();
    let mut c = f.gcd(&f.derivative());
    let mut w = f.divrem(&c).0;
    let mut i = 1;
    while w.deg_or_zero() > 0 {
        let y = w.gcd(&c);
        let z = w.divrem(&y).0;
        if z.deg_or_zero() > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.divrem(&w).0;
    }
    if c.deg_or_zero() > 0 {
        for (g, m) in squarefree_decomposition(&c.pth_root()) {
            out.push((g, m * p as usize));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial: pairs
/// (product of all irreducible factors of degree d, d).
pub fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.modulus();
    let mut out = Vec::new();
    let mut f = f.monic();
    let x = FpPoly::x(p);
    let mut h = x.clone();
    let pe = BigUint::from(p);
    let mut d = 1;
    while f.deg_or_zero() >= 2 * d {
        h = h.pow_mod(&pe, &f);
        let g = h.sub(&x).gcd(&f);
        if g.deg_or_zero() > 0 {
            f = f.divrem(&g).0;
            h = h.rem(&f);
            out.push((g, d));
        }
        d += 1;
    }
    if f.deg_or_zero() > 0 {
        let deg = f.deg_or_zero();
        out.push((f, deg));
    }
    out
}

/// Split a product of distinct irreducibles of degree `d` into its factors.
pub fn equal_degree(g: &FpPoly, d: usize) -> Vec<FpPoly> {
    let p = g.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(p.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ d as u64);
    let mut out = Vec::new();
    let mut stack = vec![g.monic()];
    while let Some(f) = stack.pop() {
        let n = f.deg_or_zero();
        if n == d {
            out.push(f);
            continue;
        }
        loop {
            let a = FpPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
            if a.deg_or_zero() == 0 {
                continue;
            }
            let b = if p == 2 {
                let mut t = a.rem(&f);
                let mut acc = t.clone();
                for _ in 1..d {
                    t = t.mul(&t).rem(&f);
                    acc = acc.add(&t);
                }
                acc
            } else {
                let e = (num_traits::pow(BigUint::from(p), d) - 1u32) / 2u32;
                a.pow_mod(&e, &f).sub(&FpPoly::one(p))
            };
            let h = b.gcd(&f);
            let hd = h.deg_or_zero();
            if hd > 0 && hd < n {
                let other = f.divrem(&h).0.monic();
                stack.push(h);
                stack.push(other);
                break;
            }
        }
    }
    out
}

/// Complete factorization of f mod p into monic irreducibles with
/// multiplicities, sorted by (degree, coefficients).
pub fn factor(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let mut out = Vec::new();
    for (g, m) in squarefree_decomposition(f) {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d) {
                out.push((irr, m));
            }
        }
    }
    out.sort_by(|a, b| {
        (a.0.deg_or_zero(), a.0.c.iter().rev().collect::<Vec<_>>())
            .cmp(&(b.0.deg_or_zero(), b.0.c.iter().rev().collect::<Vec<_>>()))
    });
    out
}

/// Degrees and multiplicities of the irreducible factors of f mod p.
pub fn factor_degrees(f: &FpPoly) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (g, m) in squarefree_decomposition(f) {
        for (h, d) in distinct_degree(&g) {
            for _ in 0..h.deg_or_zero() / d {
                out.push((d, m));
            }
        }
    }
    out.sort();
    out
}
