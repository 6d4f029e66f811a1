//! Exact integer matrix algorithms: Hermite and Smith normal forms, left
//! kernel bases and determinants over arbitrary-precision integers.
//!
//! Conventions are row-style throughout: the HNF spans the same Z-module as
//! the rows of the input, transforms act from the left (`U * M = H`), and a
//! kernel vector `u` satisfies `u * M = 0`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::util::mod_u64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "dimension mismatch");
        IntMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        IntMatrix { rows: n, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += c * &self[(i, j)];
            }
        }
        out
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(|x| x.is_zero())
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_submul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = q * &self[(src, j)];
            self[(dst, j)] -= t;
        }
    }

    /// col[dst] -= q * col[src]
    fn col_submul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = q * &self[(i, src)];
            self[(i, dst)] -= t;
        }
    }

    fn row_add(&mut self, dst: usize, src: usize) {
        for j in 0..self.cols {
            let t = self[(src, j)].clone();
            self[(dst, j)] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let t = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = t;
        }
    }

    /// Keep only the listed rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        IntMatrix::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect(), self.cols)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            }))
            .finish()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::serde_big::bigint_vec_vec::serialize(&self.row_vecs(), s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = crate::serde_big::bigint_vec_vec::deserialize(d)?;
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(IntMatrix::from_rows(rows, cols))
    }
}

/// Nearest-integer quotient, for size-reducing elimination steps.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

/// Result of an HNF computation with its transform: `u * input = h`.
#[derive(Clone, Debug)]
pub struct HnfTransform {
    /// Full m×c echelon matrix; rows `rank..m` are zero.
    pub h: IntMatrix,
    /// Unimodular m×m transform.
    pub u: IntMatrix,
    pub rank: usize,
    /// Pivot column of each nonzero row.
    pub pivots: Vec<usize>,
}

/// Classical row-style HNF with the unimodular transform.
pub fn hnf_with_transform(m: &IntMatrix) -> HnfTransform {
    hnf_classical(m, true)
}

fn hnf_classical(m: &IntMatrix, track: bool) -> HnfTransform {
    let rows = m.rows;
    let mut a = m.clone();
    let mut u = if track {
        IntMatrix::identity(rows)
    } else {
        IntMatrix::zeros(0, 0)
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m.cols {
        if r == rows {
            break;
        }
        let mut found = false;
        loop {
            let pick = (r..rows)
                .filter(|&i| !a[(i, col)].is_zero())
                .min_by(|&x, &y| a[(x, col)].magnitude().cmp(a[(y, col)].magnitude()));
            let Some(p) = pick else { break };
            found = true;
            a.swap_rows(r, p);
            if track {
                u.swap_rows(r, p);
            }
            let mut clean = true;
            for i in r + 1..rows {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let q = round_div(&a[(i, col)], &a[(r, col)]);
                a.row_submul(i, r, &q);
                if track {
                    u.row_submul(i, r, &q);
                }
                if !a[(i, col)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        if a[(r, col)].is_negative() {
            a.negate_row(r);
            if track {
                u.negate_row(r);
            }
        }
        for i in 0..r {
            let q = a[(i, col)].div_floor(&a[(r, col)]);
            a.row_submul(i, r, &q);
            if track {
                u.row_submul(i, r, &q);
            }
        }
        pivots.push(col);
        r += 1;
    }
    HnfTransform {
        h: a,
        u,
        rank: r,
        pivots,
    }
}

/// Row-style Hermite normal form: the nonzero rows only, pivots positive and
/// strictly increasing in column, entries above each pivot in `[0, pivot)`.
///
/// Full-column-rank inputs go through the modular algorithm with a
/// determinant multiple taken from an independent square submatrix; other
/// inputs use classical elimination.
pub fn hnf(m: &IntMatrix) -> IntMatrix {
    if m.rows >= m.cols && m.cols > 0 {
        let sel = independent_rows_mod_p(m);
        if sel.len() == m.cols {
            let d = det_exact(&m.select_rows(&sel)).abs();
            return hnf_modular(m, &d);
        }
    }
    hnf_classical_rows(m)
}

/// Classical HNF, nonzero rows only.
pub fn hnf_classical_rows(m: &IntMatrix) -> IntMatrix {
    let t = hnf_classical(m, false);
    IntMatrix::from_rows((0..t.rank).map(|i| t.h.row(i).to_vec()).collect(), m.cols)
}

/// HNF of a full-column-rank lattice, working modulo a positive multiple
/// `d` of its determinant.
pub fn hnf_modular(m: &IntMatrix, d: &BigInt) -> IntMatrix {
    let c = m.cols;
    assert!(d.is_positive(), "modular HNF needs a positive determinant multiple");
    let reduce = |v: &mut Vec<BigInt>, from: usize, r: &BigInt| {
        for x in v.iter_mut().skip(from) {
            *x = x.mod_floor(r);
        }
    };
    let mut modulus = d.clone();
    let mut work: Vec<Vec<BigInt>> = m.row_vecs();
    for w in work.iter_mut() {
        reduce(w, 0, &modulus);
    }
    let mut h_rows: Vec<Vec<BigInt>> = Vec::with_capacity(c);
    for j in 0..c {
        // gcd-combine column j down to at most one row
        loop {
            let nz: Vec<usize> = (0..work.len()).filter(|&i| !work[i][j].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz
                .iter()
                .min_by(|&&x, &&y| work[x][j].magnitude().cmp(work[y][j].magnitude()))
                .unwrap();
            let pivot_row = work[p].clone();
            for &i in &nz {
                if i == p {
                    continue;
                }
                let q = work[i][j].div_floor(&pivot_row[j]);
                for k in j..c {
                    let t = &q * &pivot_row[k];
                    work[i][k] -= t;
                }
                reduce(&mut work[i], j + 1, &modulus);
            }
        }
        let idx = (0..work.len()).find(|&i| !work[i][j].is_zero());
        let p = match idx {
            Some(i) => work.swap_remove(i),
            None => vec![BigInt::zero(); c],
        };
        let ext = p[j].extended_gcd(&modulus);
        let (g, s) = if ext.gcd.is_negative() {
            (-ext.gcd, -ext.x)
        } else {
            (ext.gcd, ext.x)
        };
        let mut h = vec![BigInt::zero(); c];
        h[j] = g.clone();
        for k in j + 1..c {
            h[k] = (&s * &p[k]).mod_floor(&modulus);
        }
        let cofactor = &modulus / &g;
        let mut rest = vec![BigInt::zero(); c];
        for k in j + 1..c {
            rest[k] = -(&cofactor * &p[k]);
        }
        work.push(rest);
        h_rows.push(h);
        modulus = cofactor;
        if modulus.is_one() {
            // Remaining lattice is all of Z^(c-j-1).
            for k in j + 1..c {
                let mut e = vec![BigInt::zero(); c];
                e[k] = BigInt::one();
                h_rows.push(e);
            }
            break;
        }
        for w in work.iter_mut() {
            reduce(w, j + 1, &modulus);
        }
    }
    // reduce above the diagonal
    for j in 0..c {
        let pivot_row = h_rows[j].clone();
        for row in h_rows.iter_mut().take(j) {
            let q = row[j].div_floor(&pivot_row[j]);
            if q.is_zero() {
                continue;
            }
            for k in j..c {
                let t = &q * &pivot_row[k];
                row[k] -= t;
            }
        }
    }
    IntMatrix::from_rows(h_rows, c)
}

pub struct Snf {
    /// Diagonal of the Smith form in ascending divisibility (zeros last).
    pub divisors: Vec<BigInt>,
    /// `u * m * v` is the Smith form when transforms were requested.
    pub u: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
}

/// Smith normal form: `min(m, c)` nonnegative divisors `d_i | d_{i+1}`.
pub fn snf(m: &IntMatrix, transforms: bool) -> Snf {
    let rows = m.rows;
    let cols = m.cols;
    let mut a = m.clone();
    let mut u = if transforms { IntMatrix::identity(rows) } else { IntMatrix::zeros(0, 0) };
    let mut v = if transforms { IntMatrix::identity(cols) } else { IntMatrix::zeros(0, 0) };
    let n = rows.min(cols);
    for t in 0..n {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[(i, j)].is_zero()
                    && best.map_or(true, |(bi, bj)| a[(i, j)].magnitude() < a[(bi, bj)].magnitude())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        a.swap_cols(t, bj);
        if transforms {
            u.swap_rows(t, bi);
            v.swap_cols(t, bj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = round_div(&a[(i, t)], &a[(t, t)]);
                a.row_submul(i, t, &q);
                if transforms {
                    u.row_submul(i, t, &q);
                }
                dirty |= !a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = round_div(&a[(t, j)], &a[(t, t)]);
                a.col_submul(j, t, &q);
                if transforms {
                    v.col_submul(j, t, &q);
                }
                dirty |= !a[(t, j)].is_zero();
            }
            if dirty {
                // move the smallest remaining entry of row/column t to the pivot
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..rows {
                    if !a[(i, t)].is_zero() && a[(i, t)].magnitude() < a[(bi, bj)].magnitude() {
                        bi = i;
                        bj = t;
                    }
                }
                for j in t + 1..cols {
                    if !a[(t, j)].is_zero() && a[(t, j)].magnitude() < a[(bi, bj)].magnitude() {
                        bi = t;
                        bj = j;
                    }
                }
                a.swap_rows(t, bi);
                a.swap_cols(t, bj);
                if transforms {
                    u.swap_rows(t, bi);
                    v.swap_cols(t, bj);
                }
                continue;
            }
            // row and column clear: enforce divisibility of the trailing block
            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !a[(i, j)].mod_floor(&a[(t, t)]).is_zero())
            });
            match offender {
                Some(i) => {
                    a.row_add(t, i);
                    if transforms {
                        u.row_add(t, i);
                    }
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            if transforms {
                u.negate_row(t);
            }
        }
    }
    let divisors = (0..n).map(|i| a[(i, i)].clone()).collect();
    Snf {
        divisors,
        u: transforms.then_some(u),
        v: transforms.then_some(v),
    }
}

/// Basis of the saturated left kernel `{x in Z^m : x * M = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let t = hnf_with_transform(m);
    (t.rank..m.rows).map(|i| t.u.row(i).to_vec()).collect()
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_exact(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = a[(k, k)].clone();
    }
    sign * &a[(n - 1, n - 1)]
}

const RANK_PRIME: u64 = 2_305_843_009_213_693_951; // 2^61 - 1

/// Indices of a maximal set of rows independent modulo a large prime, chosen
/// greedily in row order. Independence mod p implies independence over Q.
pub fn independent_rows_mod_p(m: &IntMatrix) -> Vec<usize> {
    let p = RANK_PRIME;
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new(); // (pivot col, reduced row)
    let mut chosen = Vec::new();
    for i in 0..m.rows {
        let mut v: Vec<u64> = m.row(i).iter().map(|x| mod_u64(x, p)).collect();
        for (pc, b) in &basis {
            let f = v[*pc];
            if f == 0 {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                *x = (*x + p - crate::util::mul_mod(f, *y, p)) % p;
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = crate::util::pow_mod(v[pc], p - 2, p);
            for x in v.iter_mut() {
                *x = crate::util::mul_mod(*x, inv, p);
            }
            basis.push((pc, v));
            chosen.push(i);
            if chosen.len() == m.cols {
                break;
            }
        }
    }
    chosen
}

/// Rank over Q (exact: via fraction-free elimination on a copy).
pub fn rank(m: &IntMatrix) -> usize {
    let fast = independent_rows_mod_p(m).len();
    if fast == m.rows.min(m.cols) {
        return fast;
    }
    hnf_classical(m, false).rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn random_matrix(rng: &mut impl Rng, r: usize, c: usize, bound: i64) -> IntMatrix {
        IntMatrix::from_vec(
            r,
            c,
            (0..r * c).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect(),
        )
    }

    fn cofactor_det(m: &IntMatrix) -> BigInt {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut total = BigInt::zero();
        for col in 0..n {
            let minor = IntMatrix::from_rows(
                (1..n)
                    .map(|i| (0..n).filter(|&j| j != col).map(|j| m[(i, j)].clone()).collect())
                    .collect(),
                n - 1,
            );
            let t = &m[(0, col)] * cofactor_det(&minor);
            if col % 2 == 0 {
                total += t
            } else {
                total -= t
            }
        }
        total
    }

    // Is `v` an integer combination of the rows of an HNF `h`? Solve by
    // forward substitution along the pivots.
    fn in_row_lattice(h: &IntMatrix, v: &[BigInt]) -> bool {
        let mut v = v.to_vec();
        for i in 0..h.rows() {
            let pc = (0..h.cols()).find(|&j| !h[(i, j)].is_zero()).unwrap();
            for j in 0..pc {
                if !v[j].is_zero() {
                    return false;
                }
            }
            let (q, r) = v[pc].div_rem(&h[(i, pc)]);
            if !r.is_zero() {
                return false;
            }
            for j in 0..h.cols() {
                v[j] -= &q * &h[(i, j)];
            }
        }
        v.iter().all(|x| x.is_zero())
    }

    fn is_hnf(h: &IntMatrix) -> bool {
        let mut last: Option<usize> = None;
        for i in 0..h.rows() {
            let Some(pc) = (0..h.cols()).find(|&j| !h[(i, j)].is_zero()) else {
                return false;
            };
            if last.map_or(false, |l| pc <= l) || !h[(i, pc)].is_positive() {
                return false;
            }
            for k in 0..i {
                if h[(k, pc)].is_negative() || h[(k, pc)] >= h[(i, pc)] {
                    return false;
                }
            }
            last = Some(pc);
        }
        true
    }

    // Left kernel over Q by Gaussian elimination on the transpose, cleared of
    // denominators.
    fn rational_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
        let t = m.transpose(); // solve t * x = 0
        let rows = t.rows();
        let cols = t.cols();
        let mut a: Vec<Vec<BigRational>> = (0..rows)
            .map(|i| (0..cols).map(|j| BigRational::from_integer(t[(i, j)].clone())).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for x in a[r].iter_mut() {
                *x = &*x * &inv;
            }
            for i in 0..rows {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..cols {
                        let t = &f * &a[r][j];
                        a[i][j] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![BigRational::zero(); cols];
                x[f] = BigRational::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    x[pc] = -a[i][f].clone();
                }
                let den = x.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
                x.iter().map(|v| (v * BigRational::from_integer(den.clone())).to_integer()).collect()
            })
            .collect()
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(hnf(&mat(&[&[2, 0], &[0, 3]])), mat(&[&[2, 0], &[0, 3]]));
        assert_eq!(hnf(&mat(&[&[4, 6], &[2, 4]])), mat(&[&[2, 0], &[0, 2]]));
        assert_eq!(hnf_classical_rows(&mat(&[&[4, 6], &[2, 4]])), mat(&[&[2, 0], &[0, 2]]));
        // rank-deficient input goes through the classical path
        assert_eq!(hnf(&mat(&[&[1, 1], &[2, 2]])), mat(&[&[1, 1]]));
    }

    #[test]
    fn snf_examples() {
        let s = snf(&mat(&[&[2, 0], &[0, 3]]), false);
        assert_eq!(s.divisors, vec![BigInt::from(1), BigInt::from(6)]);
        let s = snf(&mat(&[&[1, 0], &[0, 1]]), false);
        assert_eq!(s.divisors, vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&mat(&[&[1, 1], &[2, 2]]));
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert!(v == &vec![BigInt::from(-2), BigInt::from(1)] || v == &vec![BigInt::from(2), BigInt::from(-1)]);
        assert!(kernel_basis(&IntMatrix::identity(3)).is_empty());
    }

    #[test]
    fn det_examples() {
        assert_eq!(det_exact(&IntMatrix::identity(4)), BigInt::one());
        assert_eq!(det_exact(&mat(&[&[2, 1], &[1, 2]])), BigInt::from(3));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 8, 8, 9);
            assert_eq!(det_exact(&m), cofactor_det(&m));
        }
        // a zero pivot forces a swap
        assert_eq!(det_exact(&mat(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
    }

    #[test]
    fn modular_agrees_with_classical() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let c = rng.gen_range(1..6);
            let r = c + rng.gen_range(0..4);
            let m = random_matrix(&mut rng, r, c, 20);
            let classical = hnf_classical_rows(&m);
            assert_eq!(hnf(&m), classical);
            assert!(is_hnf(&classical));
        }
    }

    #[test]
    fn random_hnf_row_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 6, 6, 30);
            let h = hnf(&m);
            for i in 0..m.rows() {
                assert!(in_row_lattice(&h, m.row(i)));
            }
            // and every HNF row is an integer combination of the input rows:
            // the transform is integral
            let t = hnf_with_transform(&m);
            assert_eq!(t.u.mul(&m), t.h);
            assert_eq!(det_exact(&t.u).abs(), BigInt::one());
        }
    }

    #[test]
    fn kernel_rank_and_exactness() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let n = rng.gen_range(2..6);
            let m = random_matrix(&mut rng, n + 5, n, 50);
            assert_eq!(rank(&m), n);
            let k = kernel_basis(&m);
            assert_eq!(k.len(), 5);
            for v in &k {
                assert!(m.left_mul_vec(v).iter().all(|x| x.is_zero()));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn snf_properties(seed in 0u64..10_000, r in 1usize..6, c in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, r, c, 12);
            let s = snf(&m, true);
            let (u, v) = (s.u.unwrap(), s.v.unwrap());
            prop_assert_eq!(det_exact(&u).abs(), BigInt::one());
            prop_assert_eq!(det_exact(&v).abs(), BigInt::one());
            let d = u.mul(&m).mul(&v);
            for i in 0..r {
                for j in 0..c {
                    if i == j {
                        prop_assert_eq!(&d[(i, j)], &s.divisors[i]);
                    } else {
                        prop_assert!(d[(i, j)].is_zero());
                    }
                }
            }
            for w in s.divisors.windows(2) {
                prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
            }
        }

        #[test]
        fn kernel_saturation(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = rng.gen_range(1..5);
            let r = c + rng.gen_range(1..4);
            let m = random_matrix(&mut rng, r, c, 15);
            let basis = kernel_basis(&m);
            let kb = hnf_classical_rows(&IntMatrix::from_rows(basis.clone(), r));
            for v in rational_kernel(&m) {
                prop_assert!(in_row_lattice(&kb, &v));
            }
            prop_assert_eq!(basis.len(), r - rank(&m));
        }
    }
}
