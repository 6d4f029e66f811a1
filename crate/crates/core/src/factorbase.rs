//! The factor base: non-inert prime ideals of norm at most B, each in
//! two-element form (p, g(θ)), with HNF bases for valuation tests.

use std::collections::BTreeMap;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::fpoly::{self, FpPoly};
use crate::intlinalg::{hnf_modular, IntMatrix};
use crate::numfield::NumberField;
use crate::poly::ZPoly;
use crate::util::primes_up_to;

#[derive(Debug)]
pub struct PrimeIdeal {
    pub p: u64,
    /// Monic lift (symmetric residues) of an irreducible factor of T mod p.
    pub g: ZPoly,
    pub f: usize,
    pub e_ram: usize,
    pub norm: u64,
    /// Upper-triangular Z-basis of the ideal in the power basis, rows as
    /// coefficient vectors.
    pub hnf_basis: IntMatrix,
    pow_cache: RwLock<Vec<IntMatrix>>,
}

impl Clone for PrimeIdeal {
    fn clone(&self) -> Self {
        PrimeIdeal {
            p: self.p,
            g: self.g.clone(),
            f: self.f,
            e_ram: self.e_ram,
            norm: self.norm,
            hnf_basis: self.hnf_basis.clone(),
            pow_cache: RwLock::new(self.pow_cache.read().unwrap().clone()),
        }
    }
}

impl PartialEq for PrimeIdeal {
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p && self.g == o.g
    }
}

/// JSON record of an ideal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeIdealRecord {
    pub p: u64,
    pub g_coeffs: ZPoly,
    pub f: usize,
    pub e_ram: usize,
    pub norm: u64,
}

/// How the ideals above one rational prime sit in the base.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeSplit {
    /// Indices in `ideals`, in base order.
    pub indices: Vec<usize>,
    /// Every prime ideal above p is in the base.
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct FactorBase {
    pub ideals: Vec<PrimeIdeal>,
    pub bound: u64,
    pub by_prime: BTreeMap<u64, PrimeSplit>,
}

fn sym_lift(g: &FpPoly) -> ZPoly {
    let p = g.modulus();
    ZPoly::new(
        g.coeffs()
            .iter()
            .map(|&c| {
                if c > p / 2 {
                    BigInt::from(c) - BigInt::from(p)
                } else {
                    BigInt::from(c)
                }
            })
            .collect(),
    )
}

fn coeff_row(a: &ZPoly, n: usize) -> Vec<BigInt> {
    (0..n).map(|i| a.coeff(i)).collect()
}

/// HNF of the Z-module spanned by `gens · θ^j` (j < n), given that `m·Z^n`
/// lies inside it.
fn module_hnf(field: &NumberField, gens: &[ZPoly], m: &BigInt) -> IntMatrix {
    let n = field.n;
    let mut rows = Vec::with_capacity(n * (gens.len() + 1));
    for j in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[j] = m.clone();
        rows.push(e);
    }
    for g in gens {
        let mut cur = field.reduce(g);
        for _ in 0..n {
            rows.push(coeff_row(&cur, n));
            cur = field.reduce(&cur.shift(1));
        }
    }
    hnf_modular(&IntMatrix::from_rows(rows, n), &m.pow(n as u32))
}

impl PrimeIdeal {
    fn new(field: &NumberField, p: u64, g: ZPoly, e_ram: usize) -> Self {
        let f = g.degree().unwrap();
        let pb = BigInt::from(p);
        let hnf_basis = module_hnf(field, &[g.clone()], &pb);
        PrimeIdeal {
            p,
            g,
            f,
            e_ram,
            norm: p.pow(f as u32),
            hnf_basis,
            pow_cache: RwLock::new(Vec::new()),
        }
    }

    pub fn record(&self) -> PrimeIdealRecord {
        PrimeIdealRecord {
            p: self.p,
            g_coeffs: self.g.clone(),
            f: self.f,
            e_ram: self.e_ram,
            norm: self.norm,
        }
    }
}

/// HNF basis of P^e, spanned by `p^(e-i) g(θ)^i θ^j`.
pub fn ideal_pow_hnf(field: &NumberField, ideal: &PrimeIdeal, e: usize) -> IntMatrix {
    assert!(e >= 1);
    if e == 1 {
        return ideal.hnf_basis.clone();
    }
    if let Some(h) = ideal.pow_cache.read().unwrap().get(e - 2) {
        return h.clone();
    }
    let pb = BigInt::from(ideal.p);
    let pe = pb.pow(e as u32);
    let mut gens = Vec::with_capacity(e);
    let mut gpow = ZPoly::constant(BigInt::one());
    for i in 1..=e {
        gpow = field.mul(&gpow, &ideal.g);
        gens.push(gpow.scale(&pb.pow((e - i) as u32)));
    }
    let h = module_hnf(field, &gens, &pe);
    let mut cache = ideal.pow_cache.write().unwrap();
    while cache.len() < e - 1 {
        cache.push(IntMatrix::zeros(0, 0));
    }
    cache[e - 2] = h.clone();
    h
}

/// Membership of a coefficient vector in the lattice of a square
/// upper-triangular HNF.
pub fn in_hnf_lattice(h: &IntMatrix, v: &[BigInt]) -> bool {
    let n = h.cols();
    let mut v = v.to_vec();
    for i in 0..n {
        let piv = &h[(i, i)];
        let (q, r) = v[i].div_rem(piv);
        if !r.is_zero() {
            return false;
        }
        if !q.is_zero() {
            for j in i..n {
                let t = &q * &h[(i, j)];
                v[j] -= t;
            }
        }
    }
    true
}

/// Largest `e <= e_max` with `A(θ) ∈ P^e`.
pub fn valuation(field: &NumberField, ideal: &PrimeIdeal, a: &ZPoly, e_max: usize) -> usize {
    let v = coeff_row(&field.reduce(a), field.n);
    let mut e = 0;
    while e < e_max {
        let h = ideal_pow_hnf(field, ideal, e + 1);
        if !in_hnf_lattice(&h, &v) {
            break;
        }
        e += 1;
    }
    e
}

fn key(ideal: &PrimeIdeal) -> (u64, u64, Vec<BigInt>) {
    (ideal.norm, ideal.p, ideal.g.coeffs().to_vec())
}

/// Factorization pattern of T mod p: `(g_i, e_i)` with symmetric lifts.
pub fn split_prime(field: &NumberField, p: u64) -> Vec<(ZPoly, usize)> {
    fpoly::factor(&FpPoly::from_zpoly(&field.t, p))
        .into_iter()
        .map(|(g, e)| (sym_lift(&g), e))
        .collect()
}

pub fn build_factor_base(field: &NumberField, bound: u64) -> FactorBase {
    let mut ideals = Vec::new();
    let mut complete_primes = BTreeMap::new();
    for p in primes_up_to(bound) {
        let facs = split_prime(field, p);
        if facs.len() == 1 && facs[0].1 == 1 {
            continue; // inert
        }
        let mut complete = true;
        for (g, e) in facs {
            let f = g.degree().unwrap() as u32;
            let fits = (p as u128).checked_pow(f).map_or(false, |nm| nm <= bound as u128);
            if fits {
                ideals.push(PrimeIdeal::new(field, p, g, e));
            } else {
                complete = false;
            }
        }
        complete_primes.insert(p, complete);
    }
    ideals.sort_by_key(key);
    let mut by_prime: BTreeMap<u64, PrimeSplit> = BTreeMap::new();
    for (i, ideal) in ideals.iter().enumerate() {
        by_prime
            .entry(ideal.p)
            .or_insert(PrimeSplit {
                indices: Vec::new(),
                complete: complete_primes[&ideal.p],
            })
            .indices
            .push(i);
    }
    FactorBase {
        ideals,
        bound,
        by_prime,
    }
}

impl FactorBase {
    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    /// Indices of the base ideals above p.
    pub fn above(&self, p: u64) -> &[usize] {
        self.by_prime.get(&p).map_or(&[], |s| &s.indices)
    }

    pub fn records(&self) -> Vec<PrimeIdealRecord> {
        self.ideals.iter().map(|i| i.record()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.records()).unwrap()
    }
}
