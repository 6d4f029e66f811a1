//! Test fields with independently derived invariants.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::ZPoly;
use crate::util::is_prime_u64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub poly: String,
    pub h: u64,
    pub divisors: Vec<u64>,
    /// Absent for totally complex fields of unit rank 0 (R = 1).
    pub regulator: Option<f64>,
    /// Oracle the expected values come from.
    pub provenance: String,
    #[serde(default)]
    pub notes: String,
}

pub const CORPUS_JSON: &str = include_str!("../data/corpus.json");

pub fn load() -> Vec<CorpusEntry> {
    serde_json::from_str(CORPUS_JSON).expect("corpus.json is well formed")
}

/// X^n - K when n² ∤ K^(n-1) - 1, which keeps Z[θ] maximal for prime n, K.
pub fn generate_pure_field(n: u64, k: u64) -> Option<ZPoly> {
    assert!(is_prime_u64(n) && is_prime_u64(k), "n and K must be prime");
    let n2 = BigInt::from(n * n);
    let v = BigInt::from(k).pow(n as u32 - 1) - BigInt::one();
    if (v % n2).is_zero() {
        return None;
    }
    Some(ZPoly::monomial(BigInt::one(), n as usize).sub(&ZPoly::constant(BigInt::from(k))))
}
