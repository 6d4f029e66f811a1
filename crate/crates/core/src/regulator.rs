//! Unit log lattice, independent rows, real GCDs and the regulator with a
//! compact system of fundamental units.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixedreal::{fx_det, fx_floor_div, fx_round_div, FixedReal};
use crate::intlinalg::{hnf_with_transform, IntMatrix};
use crate::relations::RelationSet;

/// γ = ∏ φ_i^{w_i} over the relation generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitCompact {
    #[serde(with = "crate::serde_big::bigint_vec")]
    pub w: Vec<BigInt>,
}

impl UnitCompact {
    fn combine(terms: &[(&BigInt, &UnitCompact)]) -> UnitCompact {
        let len = terms[0].1.w.len();
        let mut w = vec![BigInt::zero(); len];
        for (c, u) in terms {
            if c.is_zero() {
                continue;
            }
            for (x, y) in w.iter_mut().zip(&u.w) {
                *x += *c * y;
            }
        }
        UnitCompact { w }
    }

    /// Log vector `Σ w_i Log(φ_i)`.
    pub fn log_vector(&self, rels: &RelationSet) -> Vec<FixedReal> {
        combine_rows(
            self.w.iter().zip(rels.relations.iter().map(|r| r.logs.as_slice())),
        )
    }

    /// Σ w_i e(φ_i); zero exactly for a unit.
    pub fn exponent_image(&self, rels: &RelationSet) -> Vec<BigInt> {
        let n = rels.relations.first().map_or(0, |r| r.e.len());
        let mut out = vec![BigInt::zero(); n];
        for (w, rel) in self.w.iter().zip(&rels.relations) {
            if w.is_zero() {
                continue;
            }
            for (o, &e) in out.iter_mut().zip(&rel.e) {
                *o += w * e;
            }
        }
        out
    }
}

fn combine_rows<'a>(terms: impl Iterator<Item = (&'a BigInt, &'a [FixedReal])>) -> Vec<FixedReal> {
    let mut acc: Option<Vec<FixedReal>> = None;
    for (c, row) in terms {
        let acc = acc.get_or_insert_with(|| vec![FixedReal::zero(row[0].scale_bits()); row.len()]);
        if c.is_zero() {
            continue;
        }
        for (a, x) in acc.iter_mut().zip(row) {
            *a = a.add(&x.scale_int(c));
        }
    }
    acc.unwrap_or_default()
}

#[derive(Clone, Debug)]
pub struct UnitLogMatrix {
    pub rows: Vec<Vec<FixedReal>>,
    pub units: Vec<UnitCompact>,
}

/// Rows `u · [M_Z | M_R]` for each kernel vector u of M_Z.
pub fn build_unit_log_matrix(rels: &RelationSet, kernel: &[Vec<BigInt>]) -> Result<UnitLogMatrix> {
    let mut rows = Vec::with_capacity(kernel.len());
    let mut units = Vec::with_capacity(kernel.len());
    for u in kernel {
        if u.len() != rels.len() {
            return Err(Error::Internal("kernel vector length mismatch".into()));
        }
        let unit = UnitCompact { w: u.clone() };
        if unit.exponent_image(rels).iter().any(|x| !x.is_zero()) {
            return Err(Error::Internal("kernel vector does not annihilate M_Z".into()));
        }
        rows.push(unit.log_vector(rels));
        units.push(unit);
    }
    Ok(UnitLogMatrix { rows, units })
}

/// Lower bound for the Gram determinant of k independent unit log vectors
/// in a degree-n field: (21/128 · ln n / n²)^(2k) · k^(-k).
pub fn gram_lower_bound(n: usize, k: usize) -> f64 {
    let n = n as f64;
    let lambda = 21.0 / 128.0 * n.ln() / (n * n);
    lambda.powi(2 * k as i32) * (k as f64).powi(-(k as i32))
}

fn gram_det(rows: &[&Vec<FixedReal>]) -> FixedReal {
    let k = rows.len();
    let mut g = vec![Vec::with_capacity(k); k];
    for i in 0..k {
        for j in 0..k {
            let s = rows[i]
                .iter()
                .zip(rows[j].iter())
                .fold(FixedReal::zero(rows[i][0].scale_bits()), |acc, (a, b)| acc.add(&a.mul(b)));
            g[i].push(s);
        }
    }
    fx_det(&g)
}

/// Permutation of the rows of `u` with r independent rows first, as decided
/// by prefix Gram determinants.
pub fn independent_rows(u: &UnitLogMatrix, r: usize, degree: usize) -> Result<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::with_capacity(r);
    if r == 0 {
        return Ok((0..u.rows.len()).collect());
    }
    for i in 0..u.rows.len() {
        if chosen.len() == r {
            break;
        }
        let mut trial: Vec<&Vec<FixedReal>> = chosen.iter().map(|&j| &u.rows[j]).collect();
        trial.push(&u.rows[i]);
        let det = gram_det(&trial);
        if det.is_certainly_positive() && !det.may_be_zero() {
            chosen.push(i);
            continue;
        }
        // the error window must lie below the bound for independent rows
        let window = det.abs().add(&FixedReal::new(
            BigInt::from(det.err_ulps().clone()),
            det.scale_bits(),
            Default::default(),
        ));
        let bound = gram_lower_bound(degree, trial.len());
        if window.to_f64() >= bound {
            return Err(Error::Precision {
                bits: u.rows[i][0].scale_bits(),
                reason: format!("Gram determinant of {} rows undecided", trial.len()),
            });
        }
    }
    if chosen.len() < r {
        return Err(Error::UnitRankDeficient {
            found: chosen.len(),
            needed: r,
        });
    }
    let mut perm = chosen.clone();
    perm.extend((0..u.rows.len()).filter(|i| !chosen.contains(i)));
    Ok(perm)
}

fn untrusted(x: &FixedReal, what: &str) -> Error {
    Error::Precision {
        bits: x.scale_bits(),
        reason: what.into(),
    }
}

/// Whether `x` certainly exceeds 0.1, certainly does not, or is undecided.
fn above_tenth(x: &FixedReal) -> Result<bool> {
    x.exceeds_ratio(1, 10).ok_or_else(|| untrusted(x, "value too close to 0.1"))
}

/// Euclid on two positive multiples of a common R > 0.1: returns
/// `(u, v, g)` with `u·R1 + v·R2 = g = gcd·R`.
pub fn real_gcd(r1: &FixedReal, r2: &FixedReal) -> Result<(BigInt, BigInt, FixedReal)> {
    let s = r1.scale_bits().max(r2.scale_bits());
    let mut a = r1.shift_to(s);
    let mut b = r2.shift_to(s);
    let (mut u0, mut v0) = (BigInt::one(), BigInt::zero());
    let (mut u1, mut v1) = (BigInt::zero(), BigInt::one());
    while above_tenth(&b)? {
        let (mut q, ok) = fx_floor_div(&a, &b);
        if !ok {
            // an exact integer ratio sits on the floor boundary
            let (qr, okr) = fx_round_div(&a, &b);
            if !okr || above_tenth(&a.sub(&b.scale_int(&qr)).abs())? {
                return Err(untrusted(&b, "real GCD quotient undecided"));
            }
            q = qr;
        }
        let rem = a.sub(&b.scale_int(&q));
        let u2 = &u0 - &q * &u1;
        let v2 = &v0 - &q * &v1;
        a = std::mem::replace(&mut b, rem);
        u0 = std::mem::replace(&mut u1, u2);
        v0 = std::mem::replace(&mut v1, v2);
    }
    Ok((u0, v0, a))
}

/// |det| of the rows with the last column dropped.
pub fn minor(rows: &[&Vec<FixedReal>]) -> FixedReal {
    let r = rows.len();
    let m: Vec<Vec<FixedReal>> = rows.iter().map(|row| row[..r].to_vec()).collect();
    fx_det(&m)
}

/// Exact rational `x / y` for two multiples of a common R > 0.1, as
/// (numerator, denominator > 0); `None` numerator means x is zero.
fn ratio(x: &FixedReal, y: &FixedReal) -> Result<(BigInt, BigInt)> {
    if !above_tenth(&x.abs())? {
        return Ok((BigInt::zero(), BigInt::one()));
    }
    let (_, _, g) = real_gcd(&y.abs(), &x.abs())?;
    let (num, ok1) = fx_round_div(&x.abs(), &g);
    let (den, ok2) = fx_round_div(&y.abs(), &g);
    if !ok1 || !ok2 || den.is_zero() {
        return Err(untrusted(&g, "ratio of minors undecided"));
    }
    let sign = x.mantissa().is_negative() != y.mantissa().is_negative();
    Ok((if sign { -num } else { num }, den))
}

#[derive(Clone, Debug)]
pub struct Regulator {
    pub value: FixedReal,
    pub funds: Vec<UnitCompact>,
    pub fund_logs: Vec<Vec<FixedReal>>,
}

/// Fold every unit row into a lattice basis, starting from the r
/// independent rows; the regulator is the covolume of the final basis.
pub fn compute_regulator(u: &UnitLogMatrix, perm: &[usize], r: usize, q: u64) -> Result<Regulator> {
    if r == 0 {
        return Ok(Regulator {
            value: FixedReal::from_int(&BigInt::one(), q),
            funds: Vec::new(),
            fund_logs: Vec::new(),
        });
    }
    if perm.len() < r {
        return Err(Error::UnitRankDeficient {
            found: perm.len(),
            needed: r,
        });
    }
    let mut basis: Vec<Vec<FixedReal>> = perm[..r].iter().map(|&i| u.rows[i].clone()).collect();
    let mut units: Vec<UnitCompact> = perm[..r].iter().map(|&i| u.units[i].clone()).collect();
    let mut d = minor(&basis.iter().collect::<Vec<_>>());
    if r == 1 {
        return gcd_chain(u, perm, basis.pop().unwrap(), units.pop().unwrap(), d);
    }
    for &idx in &perm[r..] {
        let b = &u.rows[idx];
        let mut coords = Vec::with_capacity(r);
        for k in 0..r {
            let mut rows: Vec<&Vec<FixedReal>> = basis.iter().collect();
            rows[k] = b;
            coords.push(ratio(&minor(&rows), &d)?);
        }
        if coords.iter().all(|(n, _)| n.is_zero()) {
            continue;
        }
        if coords.iter().all(|(_, den)| den.is_one()) {
            // b already in the lattice
            continue;
        }
        let l = coords.iter().fold(BigInt::one(), |acc, (_, den)| acc.lcm(den));
        let mut m = IntMatrix::zeros(r + 1, r);
        for k in 0..r {
            m[(k, k)] = l.clone();
            m[(r, k)] = &coords[k].0 * (&l / &coords[k].1);
        }
        let t = hnf_with_transform(&m);
        if t.rank != r {
            return Err(Error::Internal("lattice update lost rank".into()));
        }
        let mut rows_all = basis.clone();
        rows_all.push(b.clone());
        let mut units_all = units.clone();
        units_all.push(u.units[idx].clone());
        let mut new_basis = Vec::with_capacity(r);
        let mut new_units = Vec::with_capacity(r);
        for i in 0..r {
            let coeffs = t.u.row(i);
            new_basis.push(combine_rows(coeffs.iter().zip(rows_all.iter().map(|x| x.as_slice()))));
            let terms: Vec<(&BigInt, &UnitCompact)> = coeffs.iter().zip(units_all.iter()).collect();
            new_units.push(UnitCompact::combine(&terms));
        }
        basis = new_basis;
        units = new_units;
        d = minor(&basis.iter().collect::<Vec<_>>());
        log::trace!("regulator candidate {}", d.abs());
    }
    Ok(Regulator {
        value: d.abs(),
        funds: units,
        fund_logs: basis,
    })
}

/// Rank one: chain real GCDs along the rows, combining units with the
/// Bézout coefficients.
fn gcd_chain(
    u: &UnitLogMatrix,
    perm: &[usize],
    mut row: Vec<FixedReal>,
    mut unit: UnitCompact,
    mut d: FixedReal,
) -> Result<Regulator> {
    let sign = |x: &FixedReal| BigInt::from(if x.mantissa().is_negative() { -1 } else { 1 });
    for &idx in &perm[1..] {
        let b = &u.rows[idx];
        let db = minor(&[b]);
        if !above_tenth(&db.abs())? {
            continue;
        }
        let (x, y, _) = real_gcd(&d.abs(), &db.abs())?;
        let (x, y) = (x * sign(&d), y * sign(&db));
        row = combine_rows([(&x, row.as_slice()), (&y, b.as_slice())].into_iter());
        unit = UnitCompact::combine(&[(&x, &unit), (&y, &u.units[idx])]);
        d = minor(&[&row]);
    }
    Ok(Regulator {
        value: d.abs(),
        funds: vec![unit],
        fund_logs: vec![row],
    })
}

/// Coordinates of `row` in the basis `basis` (r rows, r + 1 columns) by
/// Cramer's rule; each entry pairs the nearest integer with whether the
/// coordinate is integral within error.
pub fn lattice_coordinates(basis: &[Vec<FixedReal>], row: &[FixedReal]) -> Vec<(BigInt, bool)> {
    let r = basis.len();
    let d = minor(&basis.iter().collect::<Vec<_>>());
    let row = row.to_vec();
    (0..r)
        .map(|k| {
            let mut rows: Vec<&Vec<FixedReal>> = basis.iter().collect();
            rows[k] = &row;
            let dk = minor(&rows);
            let (c, ok) = fx_round_div(&dk, &d);
            let resid = dk.sub(&d.scale_int(&c));
            let close = resid.abs().to_f64() <= 1e-6 * d.abs().to_f64().max(1e-300)
                || resid.may_be_zero();
            (c, ok && close)
        })
        .collect()
}

/// Whether `row` is an integer combination of `basis` within error.
pub fn in_lattice(basis: &[Vec<FixedReal>], row: &[FixedReal]) -> bool {
    lattice_coordinates(basis, row).iter().all(|(_, ok)| *ok)
}

impl Regulator {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}
