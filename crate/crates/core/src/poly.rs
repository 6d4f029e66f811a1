//! Dense univariate polynomials over Z.
//!
//! Coefficients are stored low-to-high and always normalized (no trailing
//! zeros), so the zero polynomial is the empty vector.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ZPoly {
    coeffs: Vec<BigInt>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().map_or(false, |c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> ZPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        self.div_exact_scalar(&g)
    }

    pub fn div_exact_scalar(&self, c: &BigInt) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|a| a / c).collect())
    }

    pub fn scale(&self, c: &BigInt) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn add(&self, other: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let mut v = vec![BigInt::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        ZPoly::new(v)
    }

    pub fn derivative(&self) -> ZPoly {
        ZPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Division with remainder by a monic divisor; exact over Z.
    pub fn divrem_monic(&self, d: &ZPoly) -> (ZPoly, ZPoly) {
        assert!(d.is_monic(), "divrem_monic needs a monic divisor");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (ZPoly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = std::mem::take(&mut r[i]);
            if c.is_zero() {
                continue;
            }
            for j in 0..dd {
                r[i - dd + j] -= &c * &d.coeffs[j];
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        (ZPoly::new(q), ZPoly::new(r))
    }

    pub fn rem_monic(&self, d: &ZPoly) -> ZPoly {
        self.divrem_monic(d).1
    }

    /// Pseudo-remainder: `lc(d)^(deg self - deg d + 1) * self mod d`.
    pub fn pseudo_rem(&self, d: &ZPoly) -> ZPoly {
        let dd = d.degree().expect("pseudo_rem by zero");
        let Some(ds) = self.degree() else {
            return ZPoly::zero();
        };
        if ds < dd {
            return self.clone();
        }
        let lc = d.lc();
        let mut r = self.coeffs.clone();
        let mut steps = ds - dd + 1;
        let mut top = ds;
        loop {
            let c = r[top].clone();
            for x in r.iter_mut().take(top + 1) {
                *x *= &lc;
            }
            if !c.is_zero() {
                for j in 0..=dd {
                    r[top - dd + j] -= &c * &d.coeffs[j];
                }
            }
            debug_assert!(r[top].is_zero());
            steps -= 1;
            if steps == 0 {
                break;
            }
            top -= 1;
        }
        r.truncate(dd);
        ZPoly::new(r)
    }

    /// Exact quotient of `self / d` over Z, or `None` if `d` does not divide.
    pub fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        let ds = self.degree()?;
        if ds < dd {
            return None;
        }
        let lc = d.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); ds - dd + 1];
        for i in (dd..=ds).rev() {
            if r[i].is_zero() {
                continue;
            }
            let (c, rem) = r[i].div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            for j in 0..=dd {
                r[i - dd + j] -= &c * &d.coeffs[j];
            }
            q[i - dd] = c;
        }
        if r.iter().all(|c| c.is_zero()) {
            Some(ZPoly::new(q))
        } else {
            None
        }
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// Squared Euclidean norm of the coefficient vector.
    pub fn norm2_sq(&self) -> BigInt {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(crate::util::bigint_to_f64).collect()
    }
}

/// Resultant via the subresultant pseudo-remainder sequence.
///
/// Follows the convention `Res(P, Q) = lc(P)^deg Q * prod Q(alpha)` over the
/// roots alpha of P, so `Res(P, Q) = (-1)^(deg P deg Q) Res(Q, P)`.
pub fn resultant(p: &ZPoly, q: &ZPoly) -> BigInt {
    let (Some(dp), Some(dq)) = (p.degree(), q.degree()) else {
        return BigInt::zero();
    };
    if dp == 0 {
        return num_traits::pow(p.lc(), dq);
    }
    if dq == 0 {
        return num_traits::pow(q.lc(), dp);
    }
    let ca = p.content();
    let cb = q.content();
    let mut a = p.div_exact_scalar(&ca);
    let mut b = q.div_exact_scalar(&cb);
    let t = num_traits::pow(ca, dq) * num_traits::pow(cb, dp);
    let mut s = BigInt::one();
    if dp < dq {
        std::mem::swap(&mut a, &mut b);
        if dp % 2 == 1 && dq % 2 == 1 {
            s = -s;
        }
    }
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let da = a.degree().unwrap();
        let db = b.degree().unwrap();
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        let divisor = &g * num_traits::pow(h.clone(), delta);
        b = r.div_exact_scalar(&divisor);
        g = a.lc();
        // h <- h^(1 - delta) * g^delta
        h = if delta == 0 {
            h
        } else {
            num_traits::pow(g.clone(), delta) / num_traits::pow(h.clone(), delta - 1)
        };
        match b.degree() {
            None => return BigInt::zero(),
            Some(0) => {
                let da = a.degree().unwrap();
                let hh = if da == 0 {
                    h
                } else {
                    num_traits::pow(b.lc(), da) / num_traits::pow(h, da - 1)
                };
                return s * t * hh;
            }
            Some(_) => {}
        }
    }
}

/// Discriminant of a monic polynomial: `(-1)^(n(n-1)/2) Res(T, T')`.
pub fn discriminant(t: &ZPoly) -> BigInt {
    let n = t.degree().unwrap_or(0);
    let r = resultant(t, &t.derivative()) / t.lc();
    if (n * (n.saturating_sub(1)) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Number of distinct real roots of a squarefree polynomial (Sturm sequence).
pub fn count_real_roots(t: &ZPoly) -> usize {
    let mut seq = vec![t.primitive_part(), t.derivative().primitive_part()];
    loop {
        let n = seq.len();
        if seq[n - 1].degree().unwrap_or(0) == 0 {
            break;
        }
        // Sign-honest remainder: multiply by |lc|^k, never by a negative number.
        let b = &seq[n - 1];
        let a = &seq[n - 2];
        let mut r = a.pseudo_rem(b);
        let k = a.degree().unwrap() - b.degree().unwrap() + 1;
        if b.lc().is_negative() && k % 2 == 1 {
            r = r.neg();
        }
        if r.is_zero() {
            break;
        }
        seq.push(r.neg().primitive_part_keep_sign());
    }
    let sign_changes = |signs: Vec<i8>| -> usize {
        let s: Vec<i8> = signs.into_iter().filter(|&x| x != 0).collect();
        s.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let at_pos = seq.iter().map(|p| sign_of(&p.lc())).collect();
    let at_neg = seq
        .iter()
        .map(|p| {
            let s = sign_of(&p.lc());
            if p.degree().unwrap_or(0) % 2 == 1 {
                -s
            } else {
                s
            }
        })
        .collect();
    sign_changes(at_neg) - sign_changes(at_pos)
}

fn sign_of(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl ZPoly {
    /// Divide by the (positive) content, preserving the sign of every value.
    fn primitive_part_keep_sign(&self) -> ZPoly {
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        self.div_exact_scalar(&g)
    }
}

impl serde::Serialize for ZPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_big::bigint_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> serde::Deserialize<'de> for ZPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(ZPoly::new(crate::serde_big::bigint_vec::deserialize(d)?))
    }
}

/// Parse strings like `x^3-2`, `x^2 - x - 1`, `2*x^2+3x+1`.
impl FromStr for ZPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let bytes = s.as_bytes();
        let mut terms: Vec<(bool, &str)> = Vec::new();
        let mut start = 0;
        let mut negative = false;
        let mut i = 0;
        if bytes[0] == b'+' || bytes[0] == b'-' {
            negative = bytes[0] == b'-';
            start = 1;
            i = 1;
        }
        while i < bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && i > start && bytes[i - 1] != b'^' {
                terms.push((negative, &s[start..i]));
                negative = bytes[i] == b'-';
                start = i + 1;
            }
            i += 1;
        }
        terms.push((negative, &s[start..]));

        let mut coeffs: Vec<BigInt> = Vec::new();
        for (neg, term) in terms {
            if term.is_empty() {
                return Err(Error::Parse(format!("empty term in {s:?}")));
            }
            let (c, k) = parse_term(term)?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigInt::zero());
            }
            coeffs[k] += if neg { -c } else { c };
        }
        Ok(ZPoly::new(coeffs))
    }
}

fn parse_term(term: &str) -> Result<(BigInt, usize)> {
    let lower = term.to_ascii_lowercase();
    let bad = || Error::Parse(format!("cannot parse term {term:?}"));
    match lower.find('x') {
        None => Ok((lower.parse::<BigInt>().map_err(|_| bad())?, 0)),
        Some(pos) => {
            let head = lower[..pos].trim_end_matches('*');
            let c = if head.is_empty() {
                BigInt::one()
            } else {
                head.parse::<BigInt>().map_err(|_| bad())?
            };
            let tail = &lower[pos + 1..];
            let k = if tail.is_empty() {
                1
            } else if let Some(e) = tail.strip_prefix('^') {
                e.parse::<usize>().map_err(|_| bad())?
            } else {
                return Err(bad());
            };
            Ok((c, k))
        }
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (k, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}*x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{a}*x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ZPoly {
        s.parse().unwrap()
    }

    // Sylvester-matrix determinant by cofactor expansion: an oracle that shares
    // nothing with the subresultant sequence.
    fn sylvester_resultant(a: &ZPoly, b: &ZPoly) -> BigInt {
        let m = a.degree().unwrap();
        let n = b.degree().unwrap();
        let size = m + n;
        let mut mat = vec![vec![BigInt::zero(); size]; size];
        for i in 0..n {
            for j in 0..=m {
                mat[i][i + j] = a.coeff(m - j);
            }
        }
        for i in 0..m {
            for j in 0..=n {
                mat[n + i][i + j] = b.coeff(n - j);
            }
        }
        cofactor_det(&mat)
    }

    fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let mut total = BigInt::zero();
        for col in 0..n {
            if m[0][col].is_zero() {
                continue;
            }
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != col)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let term = &m[0][col] * cofactor_det(&minor);
            if col % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("x^3-2"), ZPoly::from_i64(&[-2, 0, 0, 1]));
        assert_eq!(p("x^2-x-1"), ZPoly::from_i64(&[-1, -1, 1]));
        assert_eq!(p("-x^2 + 3*x + 12"), ZPoly::from_i64(&[12, 3, -1]));
        assert_eq!(p("2x^5+x"), ZPoly::from_i64(&[0, 1, 0, 0, 0, 2]));
        assert_eq!(p("x^2-x-1").to_string(), "x^2-x-1");
        assert_eq!(p("x^3-2"), p(&p("x^3-2").to_string()));
        assert!("x^".parse::<ZPoly>().is_err());
        assert!("y+1".parse::<ZPoly>().is_err());
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&p("x^2+1"), &p("x")), BigInt::from(1));
        assert_eq!(resultant(&p("x^2+1"), &p("x^2+1")), BigInt::from(0));
        assert_eq!(resultant(&p("x^3-2"), &p("x-1")), BigInt::from(1));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&p("x^2-x-1")), BigInt::from(5));
        assert_eq!(discriminant(&p("x^2+1")), BigInt::from(-4));
        assert_eq!(discriminant(&p("x^3-2")), BigInt::from(-108));
        assert_eq!(discriminant(&p("x^2+x+6")), BigInt::from(-23));
        // n^n K^(n-1) for x^5 - 2, sign (-1)^(n(n-1)/2) = +1
        assert_eq!(discriminant(&p("x^5-2")), BigInt::from(3125 * 16));
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(count_real_roots(&p("x^2-x-1")), 2);
        assert_eq!(count_real_roots(&p("x^2+1")), 0);
        assert_eq!(count_real_roots(&p("x^3-2")), 1);
        assert_eq!(count_real_roots(&p("x^5-2")), 1);
        assert_eq!(count_real_roots(&p("x^3-3*x+1")), 3);
        assert_eq!(count_real_roots(&p("x^4-10*x^2+1")), 4);
        assert_eq!(count_real_roots(&p("x^4+1")), 0);
    }

    #[test]
    fn div_exact_and_pseudo_rem() {
        let a = p("x^3-1");
        assert_eq!(a.div_exact(&p("x-1")), Some(p("x^2+x+1")));
        assert_eq!(a.div_exact(&p("x+2")), None);
        assert_eq!(p("6x^2+5x+1").div_exact(&p("2x+1")), Some(p("3x+1")));
        let (q, r) = p("x^3+2x+5").divrem_monic(&p("x^2+1"));
        assert_eq!(q, p("x"));
        assert_eq!(r, p("x+5"));
    }

    use proptest::prelude::*;

    fn small_poly(max_deg: usize) -> impl Strategy<Value = ZPoly> {
        proptest::collection::vec(-6i64..=6, 1..=max_deg + 1)
            .prop_map(|v| ZPoly::from_i64(&v))
            .prop_filter("nonconstant", |p| p.degree().unwrap_or(0) >= 1)
    }

    proptest! {
        #[test]
        fn resultant_matches_sylvester(a in small_poly(4), b in small_poly(3)) {
            prop_assert_eq!(resultant(&a, &b), sylvester_resultant(&a, &b));
        }

        #[test]
        fn resultant_antisymmetry(a in small_poly(4), b in small_poly(4)) {
            let da = a.degree().unwrap();
            let db = b.degree().unwrap();
            let sign = if (da * db) % 2 == 1 { -1 } else { 1 };
            prop_assert_eq!(resultant(&a, &b), resultant(&b, &a) * sign);
        }
    }
}
