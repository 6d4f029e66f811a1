//! Fixed-point reals with a worst-case error ledger.
//!
//! A [`FixedReal`] stores `mantissa / 2^scale_bits` together with `err_ulps`,
//! a guaranteed bound `|stored - true| <= err_ulps * 2^-scale_bits`. Every
//! operation propagates the bound soundly, so a value's error is known
//! exactly at the end of a computation instead of being estimated a priori.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::intlinalg::{det_exact, IntMatrix};
use crate::util::{bigint_to_f64, ceil_div, ceil_sqrt, log2_uint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedReal {
    #[serde(with = "crate::serde_big::bigint_str")]
    mantissa: BigInt,
    scale_bits: u64,
    #[serde(with = "crate::serde_big::biguint")]
    err_ulps: BigUint,
}

impl FixedReal {
    pub fn new(mantissa: BigInt, scale_bits: u64, err_ulps: BigUint) -> Self {
        FixedReal {
            mantissa,
            scale_bits,
            err_ulps,
        }
    }

    pub fn zero(scale_bits: u64) -> Self {
        Self::new(BigInt::zero(), scale_bits, BigUint::zero())
    }

    /// An exactly represented integer.
    pub fn from_int(v: &BigInt, scale_bits: u64) -> Self {
        Self::new(v << scale_bits, scale_bits, BigUint::zero())
    }

    /// Nearest representable value to `x`, with the rounding counted as error.
    pub fn from_f64(x: f64, scale_bits: u64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Self::zero(scale_bits);
        }
        // x = frac * 2^exp exactly, frac a 53-bit integer
        let bits = x.abs().to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let (frac, exp) = if raw_exp == 0 {
            (bits & ((1 << 52) - 1), -1074)
        } else {
            ((bits & ((1 << 52) - 1)) | (1 << 52), raw_exp - 1075)
        };
        let exact = FixedReal::new(BigInt::from(frac), 0, BigUint::zero());
        let shifted = exp + scale_bits as i64;
        let m = if shifted >= 0 {
            exact.mantissa << shifted as u64
        } else {
            round_shift(&exact.mantissa, (-shifted) as u64).0
        };
        let m = if x < 0.0 { -m } else { m };
        Self::new(m, scale_bits, BigUint::one())
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale_bits(&self) -> u64 {
        self.scale_bits
    }

    pub fn err_ulps(&self) -> &BigUint {
        &self.err_ulps
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits();
        if bits == 0 {
            return 0.0;
        }
        let drop = bits.saturating_sub(80);
        let top = bigint_to_f64(&(&self.mantissa >> drop));
        let e = drop as i64 - self.scale_bits as i64;
        let e = e.clamp(-2200, 2200) as i32;
        top * 2f64.powi(e / 2) * 2f64.powi(e - e / 2)
    }

    /// log2 of the absolute error bound (`-inf` when exact).
    pub fn err_log2(&self) -> f64 {
        log2_uint(&self.err_ulps) - self.scale_bits as f64
    }

    /// Number of bits below the binary point that are still trustworthy.
    pub fn correct_bits(&self) -> f64 {
        if self.err_ulps.is_zero() {
            return f64::INFINITY;
        }
        -self.err_log2()
    }

    pub fn neg(&self) -> Self {
        Self::new(-&self.mantissa, self.scale_bits, self.err_ulps.clone())
    }

    pub fn abs(&self) -> Self {
        Self::new(self.mantissa.abs(), self.scale_bits, self.err_ulps.clone())
    }

    fn check_scale(&self, other: &FixedReal) {
        assert_eq!(
            self.scale_bits, other.scale_bits,
            "fixed-point operands must share a scale (align with shift_to)"
        );
    }

    /// Sum; operands must have equal scale. The error bounds add.
    pub fn add(&self, other: &FixedReal) -> Self {
        self.check_scale(other);
        Self::new(
            &self.mantissa + &other.mantissa,
            self.scale_bits,
            &self.err_ulps + &other.err_ulps,
        )
    }

    pub fn sub(&self, other: &FixedReal) -> Self {
        self.check_scale(other);
        Self::new(
            &self.mantissa - &other.mantissa,
            self.scale_bits,
            &self.err_ulps + &other.err_ulps,
        )
    }

    /// Multiply by an exact integer.
    pub fn scale_int(&self, u: &BigInt) -> Self {
        Self::new(
            &self.mantissa * u,
            self.scale_bits,
            &self.err_ulps * u.magnitude(),
        )
    }

    /// Product rescaled (round to nearest) to the common scale.
    pub fn mul(&self, other: &FixedReal) -> Self {
        self.check_scale(other);
        let q = self.scale_bits;
        let prod = &self.mantissa * &other.mantissa;
        let ex = &self.err_ulps;
        let ey = &other.err_ulps;
        let err2q = self.mantissa.magnitude() * ey + other.mantissa.magnitude() * ex + ex * ey;
        let (m, exact) = round_shift(&prod, q);
        let mut err = ceil_div(&err2q, &(BigUint::one() << q));
        if !exact {
            err += 1u32;
        }
        Self::new(m, q, err)
    }

    /// Exact move to a finer scale.
    pub fn shift_to(&self, scale_bits: u64) -> Self {
        assert!(scale_bits >= self.scale_bits);
        let k = scale_bits - self.scale_bits;
        Self::new(&self.mantissa << k, scale_bits, &self.err_ulps << k)
    }

    /// Round to a coarser (or equal) scale; finer targets shift exactly.
    pub fn rescale(&self, scale_bits: u64) -> Self {
        if scale_bits >= self.scale_bits {
            return self.shift_to(scale_bits);
        }
        let k = self.scale_bits - scale_bits;
        let (m, exact) = round_shift(&self.mantissa, k);
        let mut err = ceil_div(&self.err_ulps, &(BigUint::one() << k));
        if !exact {
            err += 1u32;
        }
        Self::new(m, scale_bits, err)
    }

    /// True value is certainly > 0.
    pub fn is_certainly_positive(&self) -> bool {
        self.mantissa.sign() == Sign::Plus && self.mantissa.magnitude() > &self.err_ulps
    }

    /// The error window contains zero.
    pub fn may_be_zero(&self) -> bool {
        self.mantissa.magnitude() <= &self.err_ulps
    }

    /// Compare against the rational `num/den` (den > 0): `Some(true)` when the
    /// true value is certainly greater, `Some(false)` when certainly not
    /// greater, `None` when the error window straddles the threshold.
    pub fn exceeds_ratio(&self, num: i64, den: i64) -> Option<bool> {
        let threshold = BigInt::from(num) << self.scale_bits;
        let d = BigInt::from(den);
        let lo = (&self.mantissa - BigInt::from(self.err_ulps.clone())) * &d;
        let hi = (&self.mantissa + BigInt::from(self.err_ulps.clone())) * &d;
        if lo > threshold {
            Some(true)
        } else if hi <= threshold {
            Some(false)
        } else {
            None
        }
    }

    fn interval(&self) -> (BigInt, BigInt) {
        let e = BigInt::from(self.err_ulps.clone());
        (&self.mantissa - &e, &self.mantissa + &e)
    }
}

/// Round `x / 2^k` to nearest; the flag reports whether no bits were lost.
fn round_shift(x: &BigInt, k: u64) -> (BigInt, bool) {
    if k == 0 {
        return (x.clone(), true);
    }
    let den = BigInt::one() << k;
    let (q, r) = x.div_mod_floor(&den);
    let exact = r.is_zero();
    let twice = &r << 1;
    let q = if twice >= den { q + 1 } else { q };
    (q, exact)
}

/// Floor of `r1 / r2` with a trust flag.
///
/// `trusted` is false when the combined error windows allow two different
/// floors (the quotient sits too close to an integer, or the denominator's
/// window reaches zero); the caller must then raise precision.
pub fn fx_floor_div(r1: &FixedReal, r2: &FixedReal) -> (BigInt, bool) {
    let s = r1.scale_bits.max(r2.scale_bits);
    let a = r1.shift_to(s);
    let b = r2.shift_to(s);
    let (n_lo, n_hi) = a.interval();
    let (d_lo, d_hi) = b.interval();
    if !b.mantissa.is_positive() {
        return (BigInt::zero(), false);
    }
    let value = a.mantissa.div_floor(&b.mantissa);
    if !d_lo.is_positive() {
        return (value, false);
    }
    let candidates = [
        n_lo.div_floor(&d_lo),
        n_lo.div_floor(&d_hi),
        n_hi.div_floor(&d_lo),
        n_hi.div_floor(&d_hi),
    ];
    let lo = candidates.iter().min().unwrap();
    let hi = candidates.iter().max().unwrap();
    (value, lo == hi)
}

/// Nearest integer to `r1 / r2`, trusted when the whole error window rounds
/// to the same integer.
pub fn fx_round_div(r1: &FixedReal, r2: &FixedReal) -> (BigInt, bool) {
    // round(x) = floor(x + 1/2) = floor((2 r1 + r2) / (2 r2))
    let s = r1.scale_bits.max(r2.scale_bits);
    let a = r1.shift_to(s).scale_int(&BigInt::from(2)).add(&r2.shift_to(s));
    let b = r2.shift_to(s).scale_int(&BigInt::from(2));
    fx_floor_div(&a, &b)
}

/// Determinant of a square matrix of fixed-point values at a common scale q.
///
/// The mantissa matrix A is integral, so `det = det(A) / 2^(rq)` is computed
/// exactly. The error bound follows the multilinearity/Hadamard argument:
/// `|det Ω̂ - det Ω| <= r^(r/2+1) (M^(r-1) + 1) ε`, with ε the largest entry
/// error and M the largest entry magnitude plus ε.
pub fn fx_det(m: &[Vec<FixedReal>]) -> FixedReal {
    let r = m.len();
    assert!(r >= 1, "fx_det needs a nonempty matrix");
    let q = m[0][0].scale_bits;
    let mut entries = Vec::with_capacity(r * r);
    let mut max_mag = BigUint::zero();
    let mut max_err = BigUint::zero();
    for row in m {
        assert_eq!(row.len(), r, "fx_det needs a square matrix");
        for x in row {
            assert_eq!(x.scale_bits, q, "fx_det needs a common scale");
            entries.push(x.mantissa.clone());
            max_mag = max_mag.max(x.mantissa.magnitude().clone());
            max_err = max_err.max(x.err_ulps.clone());
        }
    }
    let det = det_exact(&IntMatrix::from_vec(r, r, entries));
    let err = det_error_ulps(r, q, &max_mag, &max_err);
    FixedReal::new(det, r as u64 * q, err)
}

/// Error bound, in ulps of scale r*q, for an r×r fixed-point determinant.
pub fn det_error_ulps(r: usize, q: u64, max_mag: &BigUint, max_err: &BigUint) -> BigUint {
    if max_err.is_zero() {
        return BigUint::zero();
    }
    // r^(r/2+1) = sqrt(r^(r+2)), rounded up.
    let hadamard = ceil_sqrt(&num_traits::pow(BigUint::from(r), r + 2));
    let m = max_mag + max_err;
    let one_scaled = BigUint::one() << (q * (r as u64 - 1));
    hadamard * (num_traits::pow(m, r - 1) + one_scaled) * max_err
}

fn ln2_cache() -> &'static Mutex<HashMap<u64, (BigInt, u64)>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, (BigInt, u64)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// 2·atanh(num/den) at scale g, plus the number of series terms used. The
/// result is within 8·(terms+1) ulps of the truth; requires num/den <= 1/3.
fn two_atanh(num: &BigInt, den: &BigInt, g: u64) -> (BigInt, u64) {
    let y = (num << g) / den;
    let y2 = (&y * &y) >> g;
    let mut power = y;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * k + 1);
        power = (&power * &y2) >> g;
        k += 1;
    }
    (sum << 1, k)
}

fn ln2_at(g: u64) -> (BigInt, u64) {
    if let Some(v) = ln2_cache().lock().unwrap().get(&g) {
        return v.clone();
    }
    let v = two_atanh(&BigInt::one(), &BigInt::from(3), g);
    ln2_cache().lock().unwrap().insert(g, v.clone());
    v
}

/// ln(num / 2^shift) for num > 0, at scale q with a certified error (at most
/// 2 ulps in practice).
pub fn fx_ln_ratio(num: &BigUint, shift: u64, q: u64) -> FixedReal {
    assert!(!num.is_zero(), "logarithm of zero");
    let l = num.bits();
    if l == shift + 1 && num.count_ones() == 1 {
        return FixedReal::zero(q);
    }
    let e = l as i64 - 1 - shift as i64;
    let e_abs = e.unsigned_abs();
    let guard = 16 + 64 - (e_abs + 1).leading_zeros() as u64 + 64 - (q + 64).leading_zeros() as u64;
    let g = q + guard;
    let top = BigInt::one() << (l - 1);
    let n = BigInt::from(num.clone());
    let (lnm, terms_m) = two_atanh(&(&n - &top), &(&n + &top), g);
    let (ln2, terms_2) = ln2_at(g);
    let total = lnm + ln2 * BigInt::from(e);
    let gerr = BigUint::from(8u32) * BigUint::from(terms_m + 1)
        + BigUint::from(8u32) * BigUint::from(terms_2 + 1) * BigUint::from(e_abs);
    FixedReal::new(total, g, gerr).rescale(q)
}

/// ln of a positive integer.
pub fn fx_ln_int(n: &BigUint, q: u64) -> FixedReal {
    fx_ln_ratio(n, 0, q)
}

impl fmt::Display for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± 2^{:.1}", self.to_f64(), self.err_log2())
    }
}
