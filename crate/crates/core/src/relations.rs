//! Random search for smooth principal ideals (A(θ)) and the relation matrix
//! `[M_Z | M_R]`.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorbase::{valuation, FactorBase};
use crate::fixedreal::FixedReal;
use crate::intlinalg::{rank, IntMatrix};
use crate::numfield::{log_embedding, norm, Embeddings, NumberField};
use crate::poly::ZPoly;
use crate::util::primes_up_to;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub gen: ZPoly,
    #[serde(with = "crate::serde_big::bigint")]
    pub norm: BigInt,
    pub e: Vec<i64>,
    pub logs: Vec<FixedReal>,
}

impl Relation {
    pub fn max_abs_e(&self) -> u64 {
        self.e.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RelationSet {
    pub relations: Vec<Relation>,
    /// Candidates evaluated.
    pub trials: u64,
}

impl RelationSet {
    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn generators(&self) -> Vec<&ZPoly> {
        self.relations.iter().map(|r| &r.gen).collect()
    }

    /// The exponent block M_Z, one row per relation.
    pub fn m_z(&self, n_base: usize) -> IntMatrix {
        IntMatrix::from_rows(
            self.relations
                .iter()
                .map(|r| r.e.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            n_base,
        )
    }
}

/// A uniform polynomial of degree at most k with coefficients in
/// `[-2^a, 2^a]`, redrawn while zero or ±1.
pub fn random_candidate<R: Rng>(a: u32, k: usize, rng: &mut R) -> ZPoly {
    assert!(a <= 62, "coefficient bound 2^{a} exceeds the sampler range");
    let bound = 1i64 << a;
    loop {
        let c: Vec<i64> = (0..=k).map(|_| rng.gen_range(-bound..=bound)).collect();
        let p = ZPoly::from_i64(&c);
        if p.is_zero() || (p.is_constant() && p.coeff(0).magnitude().is_one()) {
            continue;
        }
        return p;
    }
}

/// Sign-normalized key: A and -A generate the same ideal.
fn canonical_key(p: &ZPoly) -> Vec<BigInt> {
    if p.lc().is_negative() {
        p.neg().into_coeffs()
    } else {
        p.coeffs().to_vec()
    }
}

/// Deduplicating candidate stream over a seeded generator.
pub struct CandidateStream {
    rng: ChaCha8Rng,
    a: u32,
    k: usize,
    seen: HashSet<Vec<BigInt>>,
    /// Number of ± classes in the box, when it fits in u64.
    classes: Option<u64>,
}

impl CandidateStream {
    pub fn new(seed: u64, a: u32, k: usize) -> Self {
        let side = (1u64 << a).checked_mul(2).map(|x| x + 1);
        let total = side.and_then(|s| s.checked_pow(k as u32 + 1));
        // all non-zero, non-±1 polynomials pair up under negation
        let classes = total.map(|t| (t - 3) / 2);
        CandidateStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            a,
            k,
            seen: HashSet::new(),
            classes,
        }
    }

    pub fn exhausted(&self) -> bool {
        self.classes.map_or(false, |c| self.seen.len() as u64 >= c)
    }
}

impl Iterator for CandidateStream {
    type Item = ZPoly;

    fn next(&mut self) -> Option<ZPoly> {
        loop {
            if self.exhausted() {
                return None;
            }
            let p = random_candidate(self.a, self.k, &mut self.rng);
            if self.seen.insert(canonical_key(&p)) {
                return Some(p);
            }
        }
    }
}

/// Exponents of `|n|` over the given primes, or `None` if a cofactor above 1
/// remains.
pub fn smooth_factor_with(n: &BigInt, primes: &[u64]) -> Option<BTreeMap<u64, u32>> {
    assert!(!n.is_zero());
    let mut m = n.abs();
    let mut out = BTreeMap::new();
    for &p in primes {
        if m.is_one() {
            break;
        }
        let pb = BigInt::from(p);
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            out.insert(p, e);
        }
    }
    m.is_one().then_some(out)
}

pub fn smooth_factor(n: &BigInt, b: u64) -> Option<BTreeMap<u64, u32>> {
    smooth_factor_with(n, &primes_up_to(b))
}

/// Factor (φ) over the base. `Ok(None)` when φ is not smooth over it.
pub fn to_relation(
    field: &NumberField,
    base: &FactorBase,
    emb: &Embeddings,
    primes: &[u64],
    phi: &ZPoly,
    q: u64,
) -> Result<Option<Relation>> {
    let nm = norm(field, phi)?;
    let Some(fac) = smooth_factor_with(&nm, primes) else {
        return Ok(None);
    };
    let mut e = vec![0i64; base.len()];
    for (&p, &vp) in &fac {
        let Some(split) = base.by_prime.get(&p) else {
            return Ok(None);
        };
        let mut found = 0u64;
        for &i in &split.indices {
            let ideal = &base.ideals[i];
            let v = valuation(field, ideal, phi, vp as usize / ideal.f + 1);
            e[i] = v as i64;
            found += (v * ideal.f) as u64;
        }
        if found > vp as u64 || (split.complete && found != vp as u64) {
            return Err(Error::NormConsistency {
                p,
                found,
                expected: vp as u64,
            });
        }
        if found < vp as u64 {
            return Ok(None);
        }
    }
    let logs = log_embedding(field, emb, phi, q)?;
    Ok(Some(Relation {
        gen: field.reduce(phi),
        norm: nm,
        e,
        logs,
    }))
}

#[derive(Clone, Debug)]
pub struct CollectConfig {
    pub a: u32,
    pub k: usize,
    pub target: usize,
    pub budget: u64,
    pub seed: u64,
    pub batch: usize,
    /// Log precision used while collecting.
    pub q: u64,
}

fn overlaps(x: &[FixedReal], y: &[FixedReal]) -> bool {
    x.iter().zip(y).all(|(a, b)| a.sub(b).may_be_zero())
}

/// Sample until `target` distinct relations are found and M_Z has full
/// column rank.
pub fn collect(
    field: &NumberField,
    base: &FactorBase,
    emb: &Embeddings,
    cfg: &CollectConfig,
) -> Result<RelationSet> {
    let primes = primes_up_to(base.bound);
    let mut stream = CandidateStream::new(cfg.seed, cfg.a, cfg.k);
    let mut set = RelationSet::default();
    let mut by_e: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let n = base.len();
    let mut rank_ok = n == 0;
    loop {
        if set.len() >= cfg.target && rank_ok {
            return Ok(set);
        }
        if set.trials >= cfg.budget || stream.exhausted() {
            return Err(Error::BudgetExhausted {
                trials: set.trials,
                found: set.len(),
                target: cfg.target,
            });
        }
        let want = (cfg.budget - set.trials).min(cfg.batch as u64) as usize;
        let batch: Vec<ZPoly> = stream.by_ref().take(want).collect();
        set.trials += batch.len() as u64;
        let results: Vec<Result<Option<Relation>>> = batch
            .par_iter()
            .map(|phi| to_relation(field, base, emb, &primes, phi, cfg.q))
            .collect();
        let before = set.len();
        for r in results {
            let Some(rel) = r? else { continue };
            let same = by_e.entry(rel.e.clone()).or_default();
            if same.iter().any(|&i| overlaps(&set.relations[i].logs, &rel.logs)) {
                continue;
            }
            same.push(set.len());
            set.relations.push(rel);
        }
        if !rank_ok && set.len() >= cfg.target.min(n) && set.len() > before {
            rank_ok = rank(&set.m_z(n)) == n;
        }
        log::debug!("collect: {} relations after {} trials", set.len(), set.trials);
    }
}

/// Trial budget 200 · expected_trials · target, saturating.
pub fn trial_budget(expected_trials: f64, target: usize) -> u64 {
    let b = 200.0 * expected_trials.max(1.0) * target as f64;
    b.min(u64::MAX as f64 / 2.0).to_u64().unwrap_or(u64::MAX / 2).max(1000)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorbase::build_factor_base;
    use crate::fixedreal::fx_ln_int;
    use crate::numfield::{build_field, embeddings};
    use proptest::prelude::*;
    use rand::Rng;

    fn field(s: &str) -> NumberField {
        build_field(&s.parse().unwrap()).unwrap()
    }

    fn zp(c: &[i64]) -> ZPoly {
        ZPoly::from_i64(c)
    }

    #[test]
    fn smooth_examples() {
        let f = smooth_factor(&BigInt::from(12), 5).unwrap();
        assert_eq!(f, BTreeMap::from([(2, 2), (3, 1)]));
        assert!(smooth_factor(&BigInt::from(14), 5).is_none());
        assert_eq!(smooth_factor(&BigInt::from(-1), 5).unwrap(), BTreeMap::new());
    }

    fn oracle_factor(mut n: u64) -> BTreeMap<u64, u32> {
        let mut out = BTreeMap::new();
        let mut d = 2;
        while d * d <= n {
            while n % d == 0 {
                *out.entry(d).or_insert(0) += 1;
                n /= d;
            }
            d += 1;
        }
        if n > 1 {
            *out.entry(n).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn smooth_matches_full_factorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let primes = primes_up_to(1000);
        let mut smooth_seen = 0;
        for i in 0..400 {
            // mix in products of small primes so both outcomes occur
            let n: u64 = if i % 2 == 0 {
                rng.gen_range(1u64 << 39..1u64 << 40)
            } else {
                let mut m = 1u64;
                while m < 1 << 39 {
                    m *= primes[rng.gen_range(0..primes.len())];
                }
                m
            };
            let full = oracle_factor(n);
            let smooth = full.keys().all(|&p| p <= 1000);
            let got = smooth_factor_with(&BigInt::from(n), &primes);
            assert_eq!(got.is_some(), smooth, "{n}");
            if let Some(g) = got {
                assert_eq!(g, full);
                smooth_seen += 1;
            }
        }
        assert!(smooth_seen >= 200);
    }

    #[test]
    fn box_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = HashSet::new();
        for _ in 0..5000 {
            let p = random_candidate(1, 1, &mut rng);
            seen.insert(p.coeffs().to_vec());
        }
        let mut expect = HashSet::new();
        for c in -2i64..=2 {
            for d in -2i64..=2 {
                let p = zp(&[d, c]);
                if !(p.is_zero() || (p.is_constant() && p.coeff(0).magnitude().is_one())) {
                    expect.insert(p.coeffs().to_vec());
                }
            }
        }
        assert_eq!(seen, expect);
        assert_eq!(expect.len(), 22);
        let stream = CandidateStream::new(3, 1, 1);
        assert_eq!(stream.count(), 11);
    }

    #[test]
    fn stream_deterministic() {
        let a: Vec<ZPoly> = CandidateStream::new(42, 5, 2).take(50).collect();
        let b: Vec<ZPoly> = CandidateStream::new(42, 5, 2).take(50).collect();
        let c: Vec<ZPoly> = CandidateStream::new(43, 5, 2).take(50).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn coefficient_coverage_chi_square() {
        // a = 2, k = 1: each coefficient ranges over 9 values
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let mut counts = [[0u64; 9]; 2];
        for _ in 0..draws {
            let p = random_candidate(2, 1, &mut rng);
            for (j, row) in counts.iter_mut().enumerate() {
                let c = p.coeff(j).to_i64().unwrap();
                row[(c + 4) as usize] += 1;
            }
        }
        // uniform over the 78 admissible pairs (d, c)
        let weight = |j: usize, v: i64| -> f64 {
            let admissible = (-4i64..=4)
                .filter(|&other| {
                    let (d, c) = if j == 0 { (v, other) } else { (other, v) };
                    !(c == 0 && d.abs() <= 1)
                })
                .count();
            admissible as f64 / 78.0
        };
        for (j, row) in counts.iter().enumerate() {
            let chi2: f64 = row
                .iter()
                .enumerate()
                .map(|(i, &o)| {
                    let expected = draws as f64 * weight(j, i as i64 - 4);
                    (o as f64 - expected).powi(2) / expected
                })
                .sum();
            // 8 degrees of freedom: mean 8, sd 4
            assert!(chi2 < 8.0 + 3.0 * 4.0, "chi2 = {chi2}");
        }
    }

    fn gaussian() -> (NumberField, FactorBase, Embeddings, Vec<u64>) {
        let f = field("x^2+1");
        let fb = build_factor_base(&f, 10);
        let emb = embeddings(&f, 128).unwrap();
        (f, fb, emb, primes_up_to(10))
    }

    #[test]
    fn gaussian_relations() {
        let (f, fb, emb, primes) = gaussian();
        let r = to_relation(&f, &fb, &emb, &primes, &zp(&[1, 1]), 128).unwrap().unwrap();
        assert_eq!(r.e, vec![1, 0, 0]);
        let s = r.logs.iter().fold(FixedReal::zero(128), |a, b| a.add(b));
        let ln2 = fx_ln_int(&2u32.into(), 128);
        assert!(s.sub(&ln2).may_be_zero());
        let r = to_relation(&f, &fb, &emb, &primes, &zp(&[3, 1]), 128).unwrap().unwrap();
        assert_eq!(r.e, vec![1, 1, 0]);
        assert!(to_relation(&f, &fb, &emb, &primes, &zp(&[0, 7]), 128).unwrap().is_none());
    }

    #[test]
    fn unit_relation() {
        let f = field("x^2-x-1");
        let fb = build_factor_base(&f, 20);
        let emb = embeddings(&f, 128).unwrap();
        let r = to_relation(&f, &fb, &emb, &primes_up_to(20), &zp(&[0, 1]), 128)
            .unwrap()
            .unwrap();
        assert!(r.e.iter().all(|&x| x == 0));
        assert!((r.logs[1].to_f64() - 0.48121182505960347).abs() < 1e-15);
    }

    fn check_invariants(f: &NumberField, fb: &FactorBase, rel: &Relation) {
        let mut prod = BigInt::one();
        for (i, &ei) in rel.e.iter().enumerate() {
            assert!(ei >= 0);
            prod *= BigInt::from(fb.ideals[i].norm).pow(ei as u32);
        }
        assert_eq!(prod, rel.norm.abs());
        let s = rel.logs.iter().fold(FixedReal::zero(rel.logs[0].scale_bits()), |a, b| a.add(b));
        let ln = fx_ln_int(rel.norm.magnitude(), s.scale_bits());
        assert!(s.sub(&ln).may_be_zero());
        assert!(rel.max_abs_e() <= rel.norm.magnitude().bits().saturating_sub(1));
        assert_eq!(norm(f, &rel.gen).unwrap(), rel.norm);
    }

    #[test]
    fn collect_cubic() {
        let f = field("x^3-2");
        let fb = build_factor_base(&f, 60);
        let emb = embeddings(&f, 128).unwrap();
        let cfg = CollectConfig {
            a: 3,
            k: 2,
            target: fb.len() + 10,
            budget: 100_000,
            seed: 5,
            batch: 64,
            q: 128,
        };
        let set = collect(&f, &fb, &emb, &cfg).unwrap();
        assert!(set.len() >= cfg.target);
        assert_eq!(rank(&set.m_z(fb.len())), fb.len());
        for rel in &set.relations {
            check_invariants(&f, &fb, rel);
        }
        let again = collect(&f, &fb, &emb, &cfg).unwrap();
        assert_eq!(set.relations, again.relations);
        let json = serde_json::to_string(&set).unwrap();
        let back: RelationSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back.relations, set.relations);
    }

    #[test]
    fn budget_exhaustion() {
        let f = field("x^3-2");
        let fb = build_factor_base(&f, 60);
        let emb = embeddings(&f, 128).unwrap();
        let cfg = CollectConfig {
            a: 3,
            k: 2,
            target: 10_000,
            budget: 500,
            seed: 5,
            batch: 64,
            q: 128,
        };
        assert!(matches!(collect(&f, &fb, &emb, &cfg), Err(Error::BudgetExhausted { trials: 500, .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn accepted_relations_are_consistent(c in proptest::collection::vec(-40i64..40, 3)) {
            let f = field("x^3-3");
            let fb = build_factor_base(&f, 200);
            let emb = embeddings(&f, 128).unwrap();
            let phi = zp(&c);
            prop_assume!(!phi.is_zero());
            if let Some(rel) = to_relation(&f, &fb, &emb, &primes_up_to(200), &phi, 128).unwrap() {
                check_invariants(&f, &fb, &rel);
            }
        }
    }
}
