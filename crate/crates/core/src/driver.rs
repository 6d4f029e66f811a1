//! End-to-end pipeline: field → parameters → factor base → relations →
//! class group → unit lattice → regulator → analytic check.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorbase::{build_factor_base, FactorBase};
use crate::intlinalg::{kernel_basis, snf};
use crate::numfield::{build_field, embeddings, log_embedding, norm_log_bound, norm_log_bound_rigorous, NumberField};
use crate::params::{choose_params, expected_trials, LParams};
use crate::poly::ZPoly;
use crate::regulator::{build_unit_log_matrix, compute_regulator, independent_rows, Regulator};
use crate::relations::{collect, trial_budget, CollectConfig, RelationSet};
use crate::util::log2_abs;
use crate::verify::{check_result, euler_product_hstar, roots_of_unity, ClassGroupResult, FundamentalUnit, SCHEMA_VERSION};

pub const DEFAULT_SEED: u64 = 0x5eed_c1a5;
pub const DEFAULT_EULER_BOUND: u64 = 10_000;
const MIN_B: u64 = 30;
const COLLECT_Q: u64 = 128;
const MAX_Q: u64 = 1 << 16;
const K1_DOUBLINGS: u32 = 3;
const B_DOUBLINGS: u32 = 2;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub poly: String,
    pub b: Option<u64>,
    pub a: Option<u64>,
    pub k: Option<u64>,
    pub k1: Option<u64>,
    pub q0: Option<u64>,
    pub seed: Option<u64>,
    pub euler_bound: Option<u64>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn new(poly: &str) -> Self {
        RunConfig {
            poly: poly.into(),
            ..Default::default()
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Diagnostics from one run; not part of the deterministic result.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub trials: u64,
    pub relations: usize,
    pub trials_per_relation: f64,
    pub expected_trials: f64,
    pub trial_ratio: f64,
    pub working_precision_bits: u64,
    pub regulator_correct_bits: f64,
    pub precision_lost_bits: f64,
    pub precision_budget_bits: f64,
    pub stage_seconds: BTreeMap<String, f64>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub result: ClassGroupResult,
    pub stats: RunStats,
}

/// Minkowski bound `(4/π)^r2 · n!/n^n · √|d|`.
pub fn minkowski_bound(field: &NumberField) -> f64 {
    let n = field.n as f64;
    let mut l = field.r2 as f64 * (4.0 / std::f64::consts::PI).ln();
    l += (1..=field.n).map(|i| (i as f64).ln()).sum::<f64>() - n * n.ln();
    l += 0.5 * log2_abs(&field.disc) * std::f64::consts::LN_2;
    l.exp()
}

/// Parameters for a field with overrides and desk-scale floors applied.
pub fn effective_params(field: &NumberField, cfg: &RunConfig) -> Result<LParams> {
    let log_delta = (log2_abs(&field.disc) * std::f64::consts::LN_2).max(3.0);
    let mut p = choose_params(log_delta, field.n as u64, field.coeff_bits(), cfg.k1)?;
    p.b = cfg
        .b
        .unwrap_or_else(|| p.b.max(minkowski_bound(field).ceil() as u64).max(MIN_B));
    if let Some(a) = cfg.a {
        p.a = a;
    }
    if let Some(k) = cfg.k {
        p.k = k.clamp(1, field.n as u64 - 1);
    }
    if let Some(q0) = cfg.q0 {
        p.q0 = q0;
    }
    if p.b < 2 {
        return Err(Error::Domain("B must be at least 2".into()));
    }
    if p.a > 62 {
        return Err(Error::Domain(format!("coefficient bound a = {} exceeds 62 bits", p.a)));
    }
    Ok(p)
}

fn target(base: &FactorBase, r: usize, k1: u64) -> usize {
    base.len() + k1 as usize * (r + 1)
}

/// Smallest a (at least `a`) whose ± box holds 50·target candidates.
fn box_a(a: u64, k: u64, target: usize) -> u64 {
    let mut a = a.max(1);
    while a < 62 {
        let side = ((1u128 << (a + 1)) + 1) as f64;
        if side.powi(k as i32 + 1) / 2.0 >= 50.0 * target as f64 {
            break;
        }
        a += 1;
    }
    a
}

fn stage<T>(stats: &mut RunStats, name: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    *stats.stage_seconds.entry(name.into()).or_insert(0.0) += t.elapsed().as_secs_f64();
    out
}

fn relogged(field: &NumberField, rels: &RelationSet, q: u64) -> Result<RelationSet> {
    let emb = embeddings(field, q)?;
    let mut out = rels.clone();
    for rel in &mut out.relations {
        rel.logs = log_embedding(field, &emb, &rel.gen, q)?;
    }
    Ok(out)
}

/// Regulator with precision doubling from `q0`.
fn regulator_phase(
    field: &NumberField,
    rels: &RelationSet,
    kernel: &[Vec<BigInt>],
    q0: u64,
) -> Result<(Regulator, RelationSet, u64)> {
    let r = field.unit_rank();
    let kbits = kernel
        .iter()
        .flatten()
        .map(|x| x.bits())
        .max()
        .unwrap_or(0);
    let lbits = 64 - (rels.len() as u64).leading_zeros() as u64;
    let mut q = q0 + kbits * (r as u64 + 1) + 2 * lbits + 32;
    loop {
        let attempt = (|| {
            let rq = relogged(field, rels, q)?;
            let um = build_unit_log_matrix(&rq, kernel)?;
            let perm = independent_rows(&um, r, field.n)?;
            let reg = compute_regulator(&um, &perm, r, q)?;
            Ok((reg, rq))
        })();
        match attempt {
            Ok((reg, rq)) => return Ok((reg, rq, q)),
            Err(Error::Precision { reason, .. }) if q < MAX_Q => {
                log::info!("precision {q} insufficient ({reason}); doubling");
                q *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

struct Attempt {
    h: u64,
    divisors: Vec<u64>,
    reg: Regulator,
    rels: RelationSet,
    q: u64,
    base_len: usize,
}

fn attempt(
    field: &NumberField,
    base: &FactorBase,
    p: &LParams,
    seed: u64,
    stats: &mut RunStats,
) -> Result<Attempt> {
    if base.is_empty() {
        return Err(Error::EmptyFactorBase);
    }
    let r = field.unit_rank();
    let tgt = target(base, r, p.k1);
    let a = box_a(p.a, p.k, tgt);
    let ab = a.min(62);
    let rig = norm_log_bound_rigorous(field, ab, p.k);
    let expected = expected_trials(rig, (p.b as f64).ln());
    let cfg = CollectConfig {
        a: a as u32,
        k: p.k as usize,
        target: tgt,
        budget: trial_budget(expected, tgt),
        seed,
        batch: 256,
        q: COLLECT_Q,
    };
    let emb = stage(stats, "embeddings", || embeddings(field, COLLECT_Q))?;
    let rels = stage(stats, "collect", || collect(field, base, &emb, &cfg))?;
    stats.trials = rels.trials;
    stats.relations = rels.len();
    stats.trials_per_relation = rels.trials as f64 / rels.len().max(1) as f64;
    stats.expected_trials = expected_trials(norm_log_bound(field, ab, p.k), (p.b as f64).ln());
    stats.trial_ratio = stats.trials_per_relation / stats.expected_trials.max(1e-300);
    let mz = rels.m_z(base.len());
    let s = stage(stats, "class_group", || snf(&mz, false));
    let mut divisors = Vec::new();
    let mut h: u64 = 1;
    for d in &s.divisors {
        let d = d.abs().to_u64().ok_or_else(|| Error::Internal("class group divisor overflow".into()))?;
        if d == 0 {
            return Err(Error::Internal("relation matrix is not of full rank".into()));
        }
        h = h.checked_mul(d).ok_or_else(|| Error::Internal("class number overflow".into()))?;
        if d > 1 {
            divisors.push(d);
        }
    }
    let kernel = stage(stats, "kernel", || kernel_basis(&mz));
    let (reg, rels, q) = stage(stats, "regulator", || regulator_phase(field, &rels, &kernel, p.q0))?;
    let kbits = kernel.iter().flatten().map(|x| x.bits()).max().unwrap_or(0) as f64;
    stats.working_precision_bits = q;
    stats.regulator_correct_bits = reg.value.correct_bits();
    stats.precision_lost_bits = q as f64 - reg.value.correct_bits().min(q as f64);
    stats.precision_budget_bits = base.len() as f64 + (p.k1 as usize * r) as f64 + kbits;
    Ok(Attempt {
        h,
        divisors,
        reg,
        rels,
        q,
        base_len: base.len(),
    })
}

/// Run the pipeline with the verification retry loop: K1 doubles up to three
/// times, then B doubles up to twice.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    pool.install(|| run_inner(cfg))
}

fn run_inner(cfg: &RunConfig) -> Result<RunOutcome> {
    let mut stats = RunStats::default();
    let t: ZPoly = cfg.poly.parse()?;
    let field = stage(&mut stats, "field", || build_field(&t))?;
    let mut p = effective_params(&field, cfg)?;
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let euler = cfg.euler_bound.unwrap_or(DEFAULT_EULER_BOUND).max(p.b).max(100);
    let hstar = stage(&mut stats, "hstar", || euler_product_hstar(&field, euler));
    let w = roots_of_unity(&field);
    let mut attempts = 0;
    let mut base = stage(&mut stats, "factor_base", || build_factor_base(&field, p.b));
    loop {
        attempts += 1;
        log::info!("attempt {attempts}: B = {}, K1 = {}, N = {}", p.b, p.k1, base.len());
        let at = attempt(&field, &base, &p, seed, &mut stats)?;
        let verified = check_result(at.h, &at.reg.value, hstar);
        let exhausted = attempts > K1_DOUBLINGS + B_DOUBLINGS;
        if verified || exhausted {
            let gens = at.rels.generators();
            let funds = at
                .reg
                .funds
                .iter()
                .zip(&at.reg.fund_logs)
                .map(|(u, l)| FundamentalUnit::from_compact(u, &gens, l))
                .collect();
            let result = ClassGroupResult {
                schema_version: SCHEMA_VERSION,
                poly: t.to_string(),
                disc: field.disc.clone(),
                signature: (field.r1, field.r2),
                h: at.h,
                divisors: at.divisors,
                regulator_approx: at.reg.value.to_f64(),
                regulator: at.reg.value,
                fundamental_units: funds,
                hstar,
                verified,
                w,
                euler_bound: euler,
                params: p.clone(),
                factor_base_size: at.base_len,
                relations: at.rels.len(),
                trials: at.rels.trials,
                seed,
                attempts,
            };
            log::info!("working precision {} bits", at.q);
            return Ok(RunOutcome { result, stats });
        }
        log::warn!(
            "h R = {} outside [{}, {}); retrying",
            at.h as f64 * at.reg.value.to_f64(),
            hstar.0,
            2.0 * hstar.1
        );
        if attempts <= K1_DOUBLINGS {
            p.k1 *= 2;
        } else {
            p.b *= 2;
            base = stage(&mut stats, "factor_base", || build_factor_base(&field, p.b));
        }
    }
}

/// Re-run the analytic check on a stored result.
pub fn verify_result(res: &ClassGroupResult) -> Result<bool> {
    let t: ZPoly = res.poly.parse()?;
    let field = build_field(&t)?;
    let hstar = euler_product_hstar(&field, res.euler_bound.max(100));
    Ok(check_result(res.h, &res.regulator, hstar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minkowski_examples() {
        let f = build_field(&"x^2+1".parse().unwrap()).unwrap();
        assert!((minkowski_bound(&f) - 4.0 / std::f64::consts::PI).abs() < 1e-12);
        let f = build_field(&"x^3-2".parse().unwrap()).unwrap();
        // (4/π) · 3!/27 · √108
        let m = 4.0 / std::f64::consts::PI * 6.0 / 27.0 * 108f64.sqrt();
        assert!((minkowski_bound(&f) - m).abs() < 1e-12);
    }

    #[test]
    fn golden_ratio_field() {
        let out = run(&RunConfig::new("x^2-x-1")).unwrap();
        let r = &out.result;
        assert_eq!(r.h, 1);
        assert!(r.divisors.is_empty());
        assert!((r.regulator_approx - 0.48121182505960347).abs() < 1e-12);
        assert_eq!(r.fundamental_units.len(), 1);
        assert!(r.verified);
    }

    #[test]
    fn class_number_three() {
        let r = run(&RunConfig::new("x^2+x+6")).unwrap().result;
        assert_eq!((r.h, r.divisors.clone()), (3, vec![3]));
        assert_eq!(r.regulator_approx, 1.0);
        assert!(r.verified);
        assert!(verify_result(&r).unwrap());
    }

    #[test]
    fn deterministic_json() {
        let a = run(&RunConfig::new("x^2-2")).unwrap().result;
        let b = run(&RunConfig::new("x^2-2")).unwrap().result;
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(run(&RunConfig::new("x^2-4")), Err(Error::Reducible)));
        assert!(matches!(run(&RunConfig::new("2*x^2+1")), Err(Error::NotMonic)));
        assert!(matches!(run(&RunConfig::new("x^2+")), Err(Error::Parse(_))));
    }
}
