//! Irreducibility of monic integer polynomials: modular degree patterns, then
//! Hensel lifting and Zassenhaus recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::fpoly::{self, FpPoly};
use crate::poly::{discriminant, ZPoly};
use crate::util::{ceil_sqrt, is_prime_u64};

fn reduce_mod(f: &ZPoly, m: &BigInt) -> ZPoly {
    ZPoly::new(f.coeffs().iter().map(|c| c.mod_floor(m)).collect())
}

fn reduce_sym(f: &ZPoly, m: &BigInt) -> ZPoly {
    let half = m >> 1;
    ZPoly::new(
        f.coeffs()
            .iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// Lift `f ≡ g·h (mod p)` to a factorization modulo `p^k`. `g`, `h` monic
/// and coprime mod p; `f` monic.
fn lift_pair(f: &ZPoly, g: &FpPoly, h: &FpPoly, p: u64, k: u32) -> (ZPoly, ZPoly) {
    let (one, _, t) = g.ext_gcd(h);
    debug_assert!(one.is_one());
    let mut big_g = g.to_zpoly();
    let mut big_h = h.to_zpoly();
    let pb = BigInt::from(p);
    let mut m = pb.clone();
    for _ in 1..k {
        let err = f.sub(&big_g.mul(&big_h));
        let e = ZPoly::new(err.coeffs().iter().map(|c| c / &m).collect());
        let e = FpPoly::from_zpoly(&e, p);
        let dg = e.mul(&t).rem(g);
        let (dh, rem) = e.sub(&h.mul(&dg)).divrem(g);
        debug_assert!(rem.is_zero());
        big_g = big_g.add(&dg.to_zpoly().scale(&m));
        big_h = big_h.add(&dh.to_zpoly().scale(&m));
        m *= &pb;
    }
    (reduce_mod(&big_g, &m), reduce_mod(&big_h, &m))
}

fn lift_all(f: &ZPoly, facs: &[FpPoly], p: u64, k: u32) -> Vec<ZPoly> {
    if facs.len() == 1 {
        return vec![reduce_mod(f, &BigInt::from(p).pow(k))];
    }
    let mid = facs.len() / 2;
    let a = facs[..mid].iter().fold(FpPoly::one(p), |acc, x| acc.mul(x));
    let b = facs[mid..].iter().fold(FpPoly::one(p), |acc, x| acc.mul(x));
    let (g, h) = lift_pair(f, &a, &b, p, k);
    let mut out = lift_all(&g, &facs[..mid], p, k);
    out.extend(lift_all(&h, &facs[mid..], p, k));
    out
}

fn subset_sums(degrees: &[usize], n: usize) -> Vec<bool> {
    let mut can = vec![false; n + 1];
    can[0] = true;
    for &d in degrees {
        for s in (d..=n).rev() {
            if can[s - d] {
                can[s] = true;
            }
        }
    }
    can
}

/// Whether a monic squarefree polynomial of degree >= 1 is irreducible over Q.
pub fn is_irreducible(f: &ZPoly) -> bool {
    assert!(f.is_monic());
    let n = f.degree().unwrap_or(0);
    if n <= 1 {
        return n == 1;
    }
    let disc = discriminant(f);
    assert!(!disc.is_zero(), "is_irreducible needs a squarefree polynomial");
    // possible factor degrees, intersected over several primes
    let mut possible = vec![true; n + 1];
    let mut best: Option<(u64, Vec<FpPoly>)> = None;
    let mut good = 0;
    let mut p = 2u64;
    while good < 8 {
        p += 1;
        if !is_prime_u64(p) || (&disc % BigInt::from(p)).is_zero() {
            continue;
        }
        good += 1;
        let facs: Vec<FpPoly> = fpoly::factor(&FpPoly::from_zpoly(f, p))
            .into_iter()
            .map(|(g, e)| {
                debug_assert_eq!(e, 1);
                g
            })
            .collect();
        if facs.len() == 1 {
            return true;
        }
        let degs: Vec<usize> = facs.iter().map(|g| g.degree().unwrap()).collect();
        let sums = subset_sums(&degs, n);
        for d in 1..n {
            possible[d] &= sums[d];
        }
        if (1..n).all(|d| !possible[d]) {
            return true;
        }
        if best.as_ref().map_or(true, |(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
    }
    let (p, facs) = best.unwrap();
    // Mignotte: factor coefficients are below 2^n |f|_2
    let norm = ceil_sqrt(&f.norm2_sq().to_biguint().unwrap());
    let bound = BigInt::from(norm) << (n + 1);
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut pk = pb.clone();
    while pk <= bound {
        pk *= &pb;
        k += 1;
    }
    let lifted = lift_all(f, &facs, p, k);
    let r = lifted.len();
    let f0 = f.coeff(0);
    // subsets of size up to r/2 (complements cover the rest)
    for size in 1..=r / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let deg: usize = idx.iter().map(|&i| lifted[i].degree().unwrap()).sum();
            if possible[deg] {
                let mut g = ZPoly::constant(BigInt::one());
                for &i in &idx {
                    g = reduce_mod(&g.mul(&lifted[i]), &pk);
                }
                let g = reduce_sym(&g, &pk);
                let g0 = g.coeff(0);
                if !g0.is_zero() && (&f0 % &g0).is_zero() && f.rem_monic(&g).is_zero() {
                    return false;
                }
            }
            // next combination
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] < r - size + i {
                    idx[i] += 1;
                    for j in i + 1..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    true
}
