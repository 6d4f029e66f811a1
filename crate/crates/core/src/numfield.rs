//! The number field K = Q[X]/T(X) for monic irreducible T: validation,
//! signature, norms, certified complex embeddings and the Log map.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixedreal::{fx_ln_int, fx_ln_ratio, FixedReal};
use crate::poly::{count_real_roots, discriminant, resultant, ZPoly};
use crate::util::{ceil_div, ceil_sqrt};
use crate::zfactor::is_irreducible;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumberField {
    pub t: ZPoly,
    pub n: usize,
    #[serde(with = "crate::serde_big::bigint")]
    pub disc: BigInt,
    pub r1: usize,
    pub r2: usize,
    /// Upper bound on log2 |σ_i(θ)| for every root.
    pub root_bound_log2: f64,
}

impl NumberField {
    /// Unit rank r = r1 + r2 - 1.
    pub fn unit_rank(&self) -> usize {
        self.r1 + self.r2 - 1
    }

    /// Number of archimedean places r1 + r2 (= r + 1).
    pub fn num_places(&self) -> usize {
        self.r1 + self.r2
    }

    /// Bit length of the largest coefficient of T (at least 1).
    pub fn coeff_bits(&self) -> u64 {
        self.t.max_abs_coeff().bits().max(1)
    }

    pub fn reduce(&self, a: &ZPoly) -> ZPoly {
        a.rem_monic(&self.t)
    }

    pub fn mul(&self, a: &ZPoly, b: &ZPoly) -> ZPoly {
        self.reduce(&a.mul(b))
    }

    /// Multiplicity of place j in the Log map (1 real, 2 complex).
    pub fn place_weight(&self, j: usize) -> u32 {
        if j < self.r1 {
            1
        } else {
            2
        }
    }
}

pub fn build_field(t: &ZPoly) -> Result<NumberField> {
    let n = t.degree().unwrap_or(0);
    if n < 2 {
        return Err(Error::DegreeTooSmall(n));
    }
    if !t.is_monic() {
        return Err(Error::NotMonic);
    }
    let disc = discriminant(t);
    if disc.is_zero() {
        return Err(Error::NotSquarefree);
    }
    if !is_irreducible(t) {
        return Err(Error::Reducible);
    }
    let r1 = count_real_roots(t);
    debug_assert!((n - r1) % 2 == 0);
    let norm = t.norm2_sq().to_f64().unwrap_or(f64::MAX).sqrt();
    Ok(NumberField {
        t: t.clone(),
        n,
        disc,
        r1,
        r2: (n - r1) / 2,
        root_bound_log2: (norm + 1.0).log2() * (1.0 + 1e-12) + 1e-12,
    })
}

/// N(A(θ)) = Res(T, A).
pub fn norm(field: &NumberField, a: &ZPoly) -> Result<BigInt> {
    let a = field.reduce(a);
    if a.is_zero() {
        return Err(Error::Domain("norm of zero".into()));
    }
    Ok(resultant(&field.t, &a))
}

/// `n a + d k + n ln k + k ln n` in natural-log units: `a = a_bits · ln 2`
/// and `d = ln max|t_i|`.
pub fn norm_log_bound(field: &NumberField, a_bits: u64, k: u64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let n = field.n as f64;
    let k = k as f64;
    let a = a_bits as f64 * ln2;
    let d = crate::util::log2_abs(&field.t.max_abs_coeff()) * ln2;
    n * a + d * k + n * k.ln() + k * n.ln()
}

/// A bound that is valid for every element of the search box:
/// `|A(θ_i)| <= 2^a (k+1) max(1, |θ_i|)^k` and the Mahler measure of T is at
/// most `|T|_2`.
pub fn norm_log_bound_rigorous(field: &NumberField, a_bits: u64, k: u64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let n = field.n as f64;
    let t2 = field.t.norm2_sq().to_f64().unwrap_or(f64::MAX).sqrt();
    n * (a_bits as f64 * ln2 + ((k + 1) as f64).ln()) + k as f64 * t2.ln()
}

/// A root of T enclosed in the disc of radius `rad_ulps · 2^-scale` around
/// `(re + i·im) · 2^-scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBall {
    pub re: BigInt,
    pub im: BigInt,
    pub rad_ulps: BigUint,
}

impl RootBall {
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_c64(&self, scale: u64) -> Complex64 {
        let s = FixedReal::new(self.re.clone(), scale, BigUint::zero()).to_f64();
        let t = FixedReal::new(self.im.clone(), scale, BigUint::zero()).to_f64();
        Complex64::new(s, t)
    }
}

/// Certified embeddings: r1 real places (ascending) then r2 complex places
/// with positive imaginary part (ascending real part).
#[derive(Clone, Debug)]
pub struct Embeddings {
    pub places: Vec<RootBall>,
    pub r1: usize,
    /// Fixed-point scale of the centres.
    pub scale_bits: u64,
    /// Precision the balls were certified for.
    pub q: u64,
}

fn aberth_f64(t: &ZPoly) -> Vec<Complex64> {
    let c = t.to_f64_coeffs();
    let n = c.len() - 1;
    let mut rad: f64 = 0.0;
    for k in 1..=n {
        rad = rad.max(c[n - k].abs().powf(1.0 / k as f64));
    }
    let rad = (2.0 * rad).max(1e-6);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::from_polar(
                rad * 0.5,
                std::f64::consts::TAU * k as f64 / n as f64 + 0.4,
            )
        })
        .collect();
    for _ in 0..2000 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let zi = z[i];
            let mut p = Complex64::new(1.0, 0.0);
            let mut dp = Complex64::new(0.0, 0.0);
            for k in (0..n).rev() {
                dp = dp * zi + p;
                p = p * zi + c[k];
            }
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s += 1.0 / (zi - zj);
                }
            }
            let w = ratio / (1.0 - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] = zi - w;
            worst = worst.max(w.norm() / zi.norm().max(1.0));
        }
        if worst < 1e-15 {
            break;
        }
    }
    z
}

#[derive(Clone, Debug)]
struct CFix {
    re: BigInt,
    im: BigInt,
}

impl CFix {
    fn sub(&self, o: &CFix) -> CFix {
        CFix {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    fn mul(&self, o: &CFix, s: u64) -> CFix {
        CFix {
            re: (&self.re * &o.re - &self.im * &o.im) >> s,
            im: (&self.re * &o.im + &self.im * &o.re) >> s,
        }
    }

    fn div(&self, o: &CFix, s: u64) -> Option<CFix> {
        let den = &o.re * &o.re + &o.im * &o.im;
        if den.is_zero() {
            return None;
        }
        Some(CFix {
            re: ((&self.re * &o.re + &self.im * &o.im) << s) / &den,
            im: ((&self.im * &o.re - &self.re * &o.im) << s) / &den,
        })
    }

    fn shl(&self, k: u64) -> CFix {
        CFix {
            re: &self.re << k,
            im: &self.im << k,
        }
    }

    fn max_abs_part(&self) -> BigInt {
        self.re.abs().max(self.im.abs())
    }
}

fn eval_fix(t: &ZPoly, z: &CFix, s: u64) -> CFix {
    let c = t.coeffs();
    let n = c.len() - 1;
    let mut acc = CFix {
        re: &c[n] << s,
        im: BigInt::zero(),
    };
    for k in (0..n).rev() {
        acc = acc.mul(z, s);
        acc.re += &c[k] << s;
    }
    acc
}

/// One Weierstrass (Durand-Kerner) sweep; returns the largest correction.
fn dk_sweep(t: &ZPoly, z: &mut [CFix], s: u64) -> BigInt {
    let n = z.len();
    let mut worst = BigInt::zero();
    for i in 0..n {
        let num = eval_fix(t, &z[i], s);
        let mut den = CFix {
            re: BigInt::one() << s,
            im: BigInt::zero(),
        };
        for j in 0..n {
            if j != i {
                den = den.mul(&z[i].sub(&z[j]), s);
            }
        }
        let w = match num.div(&den, s) {
            Some(w) => w,
            None => {
                // coincident centres: nudge apart
                z[i].re += BigInt::one() << (s / 2);
                z[i].im += BigInt::one() << (s / 2);
                worst = worst.max(BigInt::one() << s);
                continue;
            }
        };
        worst = worst.max(w.max_abs_part());
        z[i] = z[i].sub(&w);
    }
    worst
}

fn refine(t: &ZPoly, approx: &[Complex64], w: u64, extra: usize) -> Vec<CFix> {
    let mut s = 64u64.min(w);
    let mut z: Vec<CFix> = approx
        .iter()
        .map(|c| CFix {
            re: FixedReal::from_f64(c.re, s).mantissa().clone(),
            im: FixedReal::from_f64(c.im, s).mantissa().clone(),
        })
        .collect();
    loop {
        for _ in 0..200 {
            let corr = dk_sweep(t, &mut z, s);
            if corr.bits() < s / 2 {
                break;
            }
        }
        if s == w {
            break;
        }
        let next = (2 * s).min(w);
        z = z.iter().map(|c| c.shl(next - s)).collect();
        s = next;
    }
    for _ in 0..(60 + extra) {
        let corr = dk_sweep(t, &mut z, s);
        if corr.bits() <= 4 {
            break;
        }
    }
    for _ in 0..1 + extra {
        dk_sweep(t, &mut z, s);
    }
    z
}

/// Exact Weierstrass inclusion radius (in ulps at scale `w`) for each centre:
/// `n |T(z_i)| / |∏_{j≠i} (z_i - z_j)|`, rounded up.
fn inclusion_radii(t: &ZPoly, z: &[CFix], w: u64) -> Option<Vec<BigUint>> {
    let c = t.coeffs();
    let n = z.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // 2^(nW) T(z) exactly
        let mut re = BigInt::one();
        let mut im = BigInt::zero();
        for k in (0..n).rev() {
            let nre = &re * &z[i].re - &im * &z[i].im;
            let nim = &re * &z[i].im + &im * &z[i].re;
            re = nre + (&c[k] << ((n - k) as u64 * w));
            im = nim;
        }
        let tnorm2 = (&re * &re + &im * &im).to_biguint().unwrap();
        let mut pre = BigInt::one();
        let mut pim = BigInt::zero();
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = z[i].sub(&z[j]);
            let nre = &pre * &d.re - &pim * &d.im;
            let nim = &pre * &d.im + &pim * &d.re;
            pre = nre;
            pim = nim;
        }
        let pnorm2 = (&pre * &pre + &pim * &pim).to_biguint().unwrap();
        if pnorm2.is_zero() {
            return None;
        }
        let num = tnorm2 * BigUint::from((n * n) as u64);
        out.push(ceil_sqrt(&ceil_div(&num, &pnorm2)));
    }
    Some(out)
}

fn try_embeddings(field: &NumberField, q: u64, w: u64, extra: usize) -> Result<Embeddings> {
    let fail = |reason: &str| Error::RootIsolation {
        bits: q,
        reason: reason.to_string(),
    };
    let n = field.n;
    let approx = aberth_f64(&field.t);
    let mut z = refine(&field.t, &approx, w, extra);
    // snap the r1 centres nearest the real axis onto it
    let mut by_im: Vec<usize> = (0..n).collect();
    by_im.sort_by(|&a, &b| z[a].im.abs().cmp(&z[b].im.abs()));
    let reals: Vec<usize> = by_im[..field.r1].to_vec();
    for &i in &reals {
        z[i].im = BigInt::zero();
    }
    let mut upper: Vec<usize> = by_im[field.r1..].iter().copied().filter(|&i| z[i].im.is_positive()).collect();
    let mut lower: Vec<usize> = by_im[field.r1..].iter().copied().filter(|&i| z[i].im.is_negative()).collect();
    if upper.len() != field.r2 || lower.len() != field.r2 {
        return Err(fail("non-real roots do not pair into conjugates"));
    }
    let mut real_sorted = reals.clone();
    real_sorted.sort_by(|&a, &b| z[a].re.cmp(&z[b].re));
    upper.sort_by(|&a, &b| (&z[a].re, &z[a].im).cmp(&(&z[b].re, &z[b].im)));
    // make each lower root the exact conjugate of its nearest upper partner
    let mut ordered: Vec<CFix> = real_sorted.iter().map(|&i| z[i].clone()).collect();
    ordered.extend(upper.iter().map(|&i| z[i].clone()));
    for &u in &upper {
        let target = CFix {
            re: z[u].re.clone(),
            im: -z[u].im.clone(),
        };
        let (pos, _) = lower
            .iter()
            .enumerate()
            .map(|(p, &l)| (p, z[l].sub(&target).max_abs_part()))
            .min_by(|a, b| a.1.cmp(&b.1))
            .unwrap();
        lower.swap_remove(pos);
        ordered.push(target);
    }
    let radii = inclusion_radii(&field.t, &ordered, w).ok_or_else(|| fail("coincident centres"))?;
    let allowed = BigUint::one() << (w - q - field.root_bound_log2.ceil().max(0.0) as u64);
    if radii.iter().any(|r| r >= &allowed) {
        return Err(fail("inclusion radius too large"));
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = ordered[i].sub(&ordered[j]);
            let dist2 = (&d.re * &d.re + &d.im * &d.im).to_biguint().unwrap();
            let sum = &radii[i] + &radii[j];
            if dist2 <= &sum * &sum {
                return Err(fail("inclusion discs overlap"));
            }
        }
    }
    let places = ordered
        .into_iter()
        .zip(radii)
        .take(field.r1 + field.r2)
        .map(|(c, rad)| RootBall {
            re: c.re,
            im: c.im,
            rad_ulps: rad,
        })
        .collect();
    Ok(Embeddings {
        places,
        r1: field.r1,
        scale_bits: w,
        q,
    })
}

/// Certified root balls of radius below `2^(-q - ceil(root_bound_log2))`.
pub fn embeddings(field: &NumberField, q: u64) -> Result<Embeddings> {
    if q < 64 {
        return Err(Error::Domain(format!("embedding precision must be at least 64 bits, got {q}")));
    }
    let rb = field.root_bound_log2.ceil().max(0.0) as u64;
    let base = q + rb + 32 + 2 * (64 - (field.n as u64).leading_zeros() as u64);
    let mut last = None;
    for attempt in 0..3 {
        match try_embeddings(field, q, base + 64 * attempt as u64, 20 * attempt) {
            Ok(e) => return Ok(e),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

/// Log row `c_j = m_j ln|A(σ_j(θ))|` at scale `q`, including the error from
/// the root enclosure.
pub fn log_embedding(field: &NumberField, emb: &Embeddings, a: &ZPoly, q: u64) -> Result<Vec<FixedReal>> {
    let a = field.reduce(a);
    let Some(deg) = a.degree() else {
        return Err(Error::Domain("log embedding of zero".into()));
    };
    let places = field.num_places();
    if deg == 0 {
        let v = fx_ln_int(a.coeff(0).magnitude(), q);
        return Ok((0..places)
            .map(|j| v.scale_int(&BigInt::from(field.place_weight(j))))
            .collect());
    }
    let w = emb.scale_bits;
    let c = a.coeffs();
    let mut out = Vec::with_capacity(places);
    for (j, ball) in emb.places.iter().enumerate() {
        // 2^(deg W) A(z) exactly
        let mut re = c[deg].clone();
        let mut im = BigInt::zero();
        for k in (0..deg).rev() {
            let nre = &re * &ball.re - &im * &ball.im;
            let nim = &re * &ball.im + &im * &ball.re;
            re = nre + (&c[k] << ((deg - k) as u64 * w));
            im = nim;
        }
        let complex = j >= field.r1;
        let (value, abs_lower) = if complex {
            let mag2 = (&re * &re + &im * &im).to_biguint().unwrap();
            if mag2.is_zero() {
                return Err(Error::Precision { bits: q, reason: "element vanishes at a root centre".into() });
            }
            let lower = mag2.sqrt();
            (fx_ln_ratio(&mag2, 2 * deg as u64 * w, q), lower)
        } else {
            let mag = re.magnitude().clone();
            if mag.is_zero() {
                return Err(Error::Precision { bits: q, reason: "element vanishes at a root centre".into() });
            }
            (fx_ln_ratio(&mag, deg as u64 * w, q), mag)
        };
        // |A(σ) - A(z)| <= R · Σ k|a_k| (|z| + R)^(k-1), everything in ulps
        let zabs = ceil_sqrt(&(&ball.re * &ball.re + &ball.im * &ball.im).to_biguint().unwrap()) + &ball.rad_ulps;
        let mut dsum = BigUint::zero();
        let mut zpow = BigUint::one();
        for k in 1..=deg {
            dsum += BigUint::from(k as u64) * c[k].magnitude() * &zpow << ((deg - k) as u64 * w);
            zpow *= &zabs;
        }
        let pert = &ball.rad_ulps * dsum;
        if abs_lower.is_zero() || &pert * 2u32 > abs_lower {
            return Err(Error::Precision { bits: q, reason: "root enclosure too coarse for this element".into() });
        }
        let weight = field.place_weight(j);
        let extra = ceil_div(&((pert * (2 * weight)) << q), &abs_lower);
        let err = value.err_ulps() + extra;
        out.push(FixedReal::new(value.mantissa().clone(), q, err));
    }
    Ok(out)
}
