//! Graded free chain complexes over the integers and the tools to take them
//! apart: the Khovanov TQFT, delooping, Gaussian elimination, Smith normal
//! form and bigraded homology.
//!
//! An object at a fixed height is a direct sum of [`Summand`]s, each one a
//! tensor power `V^{⊗k}{s}` of `V = span{1, X}` shifted by `s`. Generators of a
//! summand are bitmasks over its circles, bit set meaning `X`, so the
//! quantum degree of generator `m` is `k - 2·popcount(m) + s`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::fraction::int_json;

// ---------------------------------------------------------------------------
// Polynomials

/// Finitely supported Laurent polynomial in `q` with integer coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c.into());
        p
    }

    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut p = Self::zero();
        for &(e, c) in terms {
            p.add_term(e, BigInt::from(c));
        }
        p
    }

    /// `q + q^{-1}`, the graded dimension of `V`.
    pub fn circle() -> Self {
        Self::from_terms(&[(-1, 1), (1, 1)])
    }

    pub fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Substitute `q ↦ q^k`.
    pub fn substitute_power(&self, k: i64) -> Self {
        let mut p = Self::zero();
        for (e, c) in self.terms() {
            p.add_term(e * k, c.clone());
        }
        p
    }

    /// Multiply by `c·q^e`.
    pub fn shift(&self, c: &BigInt, e: i64) -> Self {
        let mut p = Self::zero();
        for (d, v) in self.terms() {
            p.add_term(d + e, v * c);
        }
        p
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        let (dlo, dhi) = (d.min_degree()?, d.max_degree()?);
        let lead = d.coeff(dhi);
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(hi) = rem.max_degree() {
            let lo = rem.min_degree().expect("nonempty");
            if hi - lo < dhi - dlo {
                return None;
            }
            let c = rem.coeff(hi);
            if !(&c % &lead).is_zero() {
                return None;
            }
            let q = &c / &lead;
            let e = hi - dhi;
            rem = &rem - &d.shift(&q, e);
            quot.add_term(e, q);
        }
        Some(quot)
    }

    /// Exponent → coefficient map, keys as strings.
    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (e, c) in self.terms() {
            map.insert(e.to_string(), int_json(c));
        }
        Value::Object(map)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}q")?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{mag}q^{e}")?,
            }
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (e, c) in rhs.terms() {
            p.add_term(e, c.clone());
        }
        p
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.shift(&-BigInt::one(), 0)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (a, x) in self.terms() {
            for (b, y) in rhs.terms() {
                p.add_term(a + b, x * y);
            }
        }
        p
    }
}

/// Laurent polynomial in `t` and `q`; keys are `(t exponent, q exponent)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TwoVarPoly {
    coeffs: BTreeMap<(i64, i64), BigInt>,
}

impl TwoVarPoly {
    pub fn add_term(&mut self, t: i64, q: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry((t, q)).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&(t, q));
        }
    }

    pub fn coeff(&self, t: i64, q: i64) -> BigInt {
        self.coeffs.get(&(t, q)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &BigInt)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Set `t = -1`.
    pub fn at_t_minus_one(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for ((t, q), c) in self.terms() {
            p.add_term(q, if t.is_even() { c.clone() } else { -c });
        }
        p
    }

    /// `"t^j q^i"` → coefficient map.
    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for ((t, q), c) in self.terms() {
            map.insert(format!("t^{t} q^{q}"), int_json(c));
        }
        Value::Object(map)
    }
}

// ---------------------------------------------------------------------------
// Sparse matrices

/// Sparse integer matrix stored as row-major triplets without zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m.add(i, j, BigInt::from(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn add(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) outside {}x{}", self.rows, self.cols);
        if v.is_zero() {
            return;
        }
        let slot = self.entries.entry((i, j)).or_insert_with(BigInt::zero);
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&(i, j));
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, c: &BigInt) -> SparseMatrix {
        let mut m = Self::zeros(self.rows, self.cols);
        for (i, j, v) in self.entries() {
            m.add(i, j, v * c);
        }
        m
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut by_row: HashMap<usize, Vec<(usize, &BigInt)>> = HashMap::new();
        for (i, j, v) in rhs.entries() {
            by_row.entry(i).or_default().push((j, v));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for (i, k, a) in self.entries() {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    out.add(i, j, a * b);
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (i, j, v) in self.entries() {
            d[i][j] = v.clone();
        }
        d
    }

    /// Keep only the listed rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let rmap: HashMap<usize, usize> = rows.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let cmap: HashMap<usize, usize> = cols.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let mut m = Self::zeros(rows.len(), cols.len());
        for (i, j, v) in self.entries() {
            if let (Some(&a), Some(&b)) = (rmap.get(&i), cmap.get(&j)) {
                m.add(a, b, v.clone());
            }
        }
        m
    }
}

// ---------------------------------------------------------------------------
// Smith normal form

pub type DenseMatrix = Vec<Vec<BigInt>>;

/// Returns `(D, U, V)` with `U·M·V = D`, `U` and `V` unimodular, and `D`
/// diagonal with nonnegative entries `d1 | d2 | ...`.
pub fn smith_normal_form(m: &DenseMatrix) -> (DenseMatrix, DenseMatrix, DenseMatrix) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut d = m.clone();
    snf_in_place(&mut d, Some((&mut u, &mut v)));
    (d, u, v)
}

/// Nonzero diagonal entries of the Smith normal form of `m`.
pub fn invariant_factors(m: &DenseMatrix) -> Vec<BigInt> {
    let mut d = m.clone();
    snf_in_place(&mut d, None);
    (0..d.len().min(d.first().map_or(0, |r| r.len()))).map(|i| d[i][i].clone()).filter(|x| !x.is_zero()).collect()
}

pub fn identity(n: usize) -> DenseMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn dense_mul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = b.first().map_or(0, |r| r.len());
    a.iter().map(|row| (0..n).map(|j| row.iter().zip(b.iter()).map(|(x, brow)| x * &brow[j]).sum()).collect()).collect()
}

fn snf_in_place<'a>(d: &mut DenseMatrix, mut tr: Option<(&'a mut DenseMatrix, &'a mut DenseMatrix)>) {
    let rows = d.len();
    let cols = d.first().map_or(0, |r| r.len());
    for t in 0..rows.min(cols) {
        // Smallest nonzero entry of the remaining block becomes the pivot.
        let Some((pi, pj)) = min_entry(d, t) else { break };
        swap_rows(d, t, pi, &mut tr);
        swap_cols(d, t, pj, &mut tr);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                row_axpy(d, i, t, &-q, &mut tr);
                if !d[i][t].is_zero() {
                    swap_rows(d, t, i, &mut tr);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                col_axpy(d, j, t, &-q, &mut tr);
                if !d[t][j].is_zero() {
                    swap_cols(d, t, j, &mut tr);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Enforce divisibility by folding an offending row into row t.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&d[i][j] % &d[t][t]).is_zero()));
            match bad {
                Some(i) => row_axpy(d, t, i, &BigInt::one(), &mut tr),
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            if let Some((u, _)) = tr.as_mut() {
                for x in u[t].iter_mut() {
                    *x = -&*x;
                }
            }
        }
    }
}

fn min_entry(d: &DenseMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in d.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            let a = x.abs();
            if best.as_ref().is_none_or(|b| a < b.2) {
                let done = a.is_one();
                best = Some((i, j, a));
                if done {
                    return best.map(|b| (b.0, b.1));
                }
            }
        }
    }
    best.map(|b| (b.0, b.1))
}

type Transforms<'a> = Option<(&'a mut DenseMatrix, &'a mut DenseMatrix)>;

fn swap_rows(d: &mut DenseMatrix, a: usize, b: usize, tr: &mut Transforms<'_>) {
    if a == b {
        return;
    }
    d.swap(a, b);
    if let Some((u, _)) = tr.as_mut() {
        u.swap(a, b);
    }
}

fn swap_cols(d: &mut DenseMatrix, a: usize, b: usize, tr: &mut Transforms<'_>) {
    if a == b {
        return;
    }
    for row in d.iter_mut() {
        row.swap(a, b);
    }
    if let Some((_, v)) = tr.as_mut() {
        for row in v.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// `row_dst += c · row_src`.
fn row_axpy(d: &mut DenseMatrix, dst: usize, src: usize, c: &BigInt, tr: &mut Transforms<'_>) {
    fn go(m: &mut DenseMatrix, dst: usize, src: usize, c: &BigInt) {
        let s = m[src].clone();
        for (x, y) in m[dst].iter_mut().zip(s.iter()) {
            *x += c * y;
        }
    }
    go(d, dst, src, c);
    if let Some((u, _)) = tr.as_mut() {
        go(u, dst, src, c);
    }
}

/// `col_dst += c · col_src`.
fn col_axpy(d: &mut DenseMatrix, dst: usize, src: usize, c: &BigInt, tr: &mut Transforms<'_>) {
    fn go(m: &mut DenseMatrix, dst: usize, src: usize, c: &BigInt) {
        for row in m.iter_mut() {
            let s = row[src].clone();
            row[dst] += c * s;
        }
    }
    go(d, dst, src, c);
    if let Some((_, v)) = tr.as_mut() {
        go(v, dst, src, c);
    }
}

/// Rank and invariant factors of a sparse matrix.
///
/// Unit pivots are eliminated sparsely first (each step replaces the matrix
/// by a Schur complement); the small residual goes through dense SNF.
pub fn rank_and_factors(m: &SparseMatrix) -> (usize, Vec<BigInt>) {
    let mut rows: Vec<HashMap<usize, BigInt>> = vec![HashMap::new(); m.rows];
    let mut cols: Vec<HashSet<usize>> = vec![HashSet::new(); m.cols];
    for (i, j, v) in m.entries() {
        rows[i].insert(j, v.clone());
        cols[j].insert(i);
    }
    let mut alive_row = vec![true; m.rows];
    let mut units = 0usize;
    let mut progress = true;
    while progress {
        progress = false;
        for r in 0..m.rows {
            if !alive_row[r] || rows[r].is_empty() {
                continue;
            }
            let pivot =
                rows[r].iter().filter(|(_, v)| v.abs().is_one()).map(|(&c, _)| c).min_by_key(|&c| (cols[c].len(), c));
            let Some(c) = pivot else { continue };
            let p = rows[r][&c].clone();
            let prow: Vec<(usize, BigInt)> = rows[r].iter().map(|(&k, v)| (k, v.clone())).collect();
            let others: Vec<usize> = cols[c].iter().copied().filter(|&r2| r2 != r).collect();
            for r2 in others {
                let factor = &rows[r2][&c] * &p;
                for (k, v) in &prow {
                    let slot = rows[r2].entry(*k).or_insert_with(BigInt::zero);
                    *slot -= &factor * v;
                    if slot.is_zero() {
                        rows[r2].remove(k);
                        cols[*k].remove(&r2);
                    } else {
                        cols[*k].insert(r2);
                    }
                }
            }
            for (k, _) in &prow {
                cols[*k].remove(&r);
            }
            rows[r].clear();
            alive_row[r] = false;
            units += 1;
            progress = true;
        }
    }
    let live_rows: Vec<usize> = (0..m.rows).filter(|&r| alive_row[r] && !rows[r].is_empty()).collect();
    if live_rows.is_empty() {
        return (units, Vec::new());
    }
    let mut live_cols: Vec<usize> = live_rows.iter().flat_map(|&r| rows[r].keys().copied()).collect();
    live_cols.sort_unstable();
    live_cols.dedup();
    let cidx: HashMap<usize, usize> = live_cols.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let mut dense = vec![vec![BigInt::zero(); live_cols.len()]; live_rows.len()];
    for (a, &r) in live_rows.iter().enumerate() {
        for (k, v) in &rows[r] {
            dense[a][cidx[k]] = v.clone();
        }
    }
    let factors = invariant_factors(&dense);
    let mut all = vec![BigInt::one(); units];
    all.extend(factors);
    (all.len(), all)
}

// ---------------------------------------------------------------------------
// Graded bases and the TQFT

/// `V^{⊗circles}{shift}` with a tag naming where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub tag: String,
    pub circles: usize,
    pub shift: i64,
}

impl Summand {
    pub fn new(tag: impl Into<String>, circles: usize, shift: i64) -> Self {
        Summand { tag: tag.into(), circles, shift }
    }

    pub fn rank(&self) -> usize {
        1 << self.circles
    }

    pub fn qdeg(&self, mask: usize) -> i64 {
        self.circles as i64 - 2 * mask.count_ones() as i64 + self.shift
    }
}

/// Labelled generators with their quantum degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBasis {
    pub generators: Vec<(String, i64)>,
}

impl GradedBasis {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn qdims(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (_, q) in &self.generators {
            p.add_term(*q, BigInt::one());
        }
        p
    }
}

/// Tensor word of a generator: `1` or `X` per circle, circle 0 first.
pub fn word(mask: usize, circles: usize) -> String {
    (0..circles).map(|i| if mask >> i & 1 == 1 { 'X' } else { '1' }).collect()
}

pub fn tqft_module(circles: usize, shift: i64) -> GradedBasis {
    let s = Summand::new("", circles, shift);
    GradedBasis { generators: (0..s.rank()).map(|m| (word(m, circles), s.qdeg(m))).collect() }
}

/// Elementary Frobenius-algebra maps on `V^{⊗k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frobenius {
    /// `m`, fusing circles `i < j` into circle `i`; circle `j` disappears.
    Merge(usize, usize),
    /// `Δ`, splitting circle `i` into `i` and a new last circle.
    Split(usize),
    /// `η`, a new last circle labelled `1`.
    Birth,
    /// `ε`, capping off circle `i`.
    Death(usize),
    /// Multiplication by `X` on circle `i`.
    Dot(usize),
}

/// Matrix of `kind` from `V^{⊗k}` (columns) to its target (rows).
pub fn frobenius_map(kind: Frobenius, k: usize) -> Result<SparseMatrix> {
    let check = |i: usize| if i < k { Ok(()) } else { domain(format!("circle {i} out of range for {k} circles")) };
    let bit = |m: usize, i: usize| m >> i & 1;
    let remove = |m: usize, i: usize| (m & ((1 << i) - 1)) | ((m >> (i + 1)) << i);
    let one = BigInt::one;
    let out = match kind {
        Frobenius::Merge(i, j) => {
            check(i)?;
            check(j)?;
            if i >= j {
                return domain("merge needs circles i < j");
            }
            let mut mat = SparseMatrix::zeros(1 << (k - 1), 1 << k);
            for m in 0..1usize << k {
                if bit(m, i) == 1 && bit(m, j) == 1 {
                    continue;
                }
                let t = remove(m, j) | (bit(m, j) << i);
                mat.add(t, m, one());
            }
            mat
        }
        Frobenius::Split(i) => {
            check(i)?;
            let mut mat = SparseMatrix::zeros(1 << (k + 1), 1 << k);
            for m in 0..1usize << k {
                if bit(m, i) == 1 {
                    mat.add(m | 1 << k, m, one());
                } else {
                    mat.add(m | 1 << i, m, one());
                    mat.add(m | 1 << k, m, one());
                }
            }
            mat
        }
        Frobenius::Birth => {
            let mut mat = SparseMatrix::zeros(1 << (k + 1), 1 << k);
            for m in 0..1usize << k {
                mat.add(m, m, one());
            }
            mat
        }
        Frobenius::Death(i) => {
            check(i)?;
            let mut mat = SparseMatrix::zeros(1 << (k - 1), 1 << k);
            for m in 0..1usize << k {
                if bit(m, i) == 1 {
                    mat.add(remove(m, i), m, one());
                }
            }
            mat
        }
        Frobenius::Dot(i) => {
            check(i)?;
            let mut mat = SparseMatrix::zeros(1 << k, 1 << k);
            for m in 0..1usize << k {
                if bit(m, i) == 0 {
                    mat.add(m | 1 << i, m, one());
                }
            }
            mat
        }
    };
    Ok(out)
}

// ---------------------------------------------------------------------------
// Chain complexes

/// Cochain complex `C^h → C^{h+1}` of graded free modules.
///
/// `diffs[i]` maps `objects[i]` (columns) to `objects[i + 1]` (rows); heights
/// run from `start` to `start + objects.len() - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    start: i64,
    objects: Vec<Vec<Summand>>,
    diffs: Vec<SparseMatrix>,
}

impl ChainComplex {
    pub fn new(start: i64, objects: Vec<Vec<Summand>>, diffs: Vec<SparseMatrix>) -> Result<Self> {
        let c = ChainComplex { start, objects, diffs };
        c.validate()?;
        Ok(c)
    }

    /// A complex with no generators at all.
    pub fn empty() -> Self {
        ChainComplex { start: 0, objects: Vec::new(), diffs: Vec::new() }
    }

    fn validate(&self) -> Result<()> {
        if self.diffs.len() + 1 != self.objects.len().max(1) {
            return domain("need exactly one differential between consecutive heights");
        }
        for (i, d) in self.diffs.iter().enumerate() {
            let (src, tgt) = (self.dim_at(i), self.dim_at(i + 1));
            if d.cols() != src || d.rows() != tgt {
                return domain(format!(
                    "differential at height {} is {}x{}, expected {}x{}",
                    self.start + i as i64,
                    d.rows(),
                    d.cols(),
                    tgt,
                    src
                ));
            }
            let (qs, qt) = (self.qdegs_at(i), self.qdegs_at(i + 1));
            if let Some((r, c, _)) = d.entries().find(|(r, c, _)| qt[*r] != qs[*c]) {
                return domain(format!(
                    "differential at height {} is not homogeneous: q {} -> q {}",
                    self.start + i as i64,
                    qs[c],
                    qt[r]
                ));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn heights(&self) -> std::ops::Range<i64> {
        self.start..self.start + self.objects.len() as i64
    }

    pub fn objects(&self) -> &[Vec<Summand>] {
        &self.objects
    }

    pub fn diffs(&self) -> &[SparseMatrix] {
        &self.diffs
    }

    fn index(&self, h: i64) -> Option<usize> {
        let i = h - self.start;
        (0..self.objects.len() as i64).contains(&i).then_some(i as usize)
    }

    pub fn object(&self, h: i64) -> &[Summand] {
        self.index(h).map_or(&[], |i| &self.objects[i])
    }

    /// Differential leaving height `h`, if both ends are inside the range.
    pub fn differential(&self, h: i64) -> Option<&SparseMatrix> {
        self.index(h).and_then(|i| self.diffs.get(i))
    }

    fn dim_at(&self, i: usize) -> usize {
        self.objects.get(i).map_or(0, |o| o.iter().map(Summand::rank).sum())
    }

    fn qdegs_at(&self, i: usize) -> Vec<i64> {
        let mut out = Vec::new();
        for s in self.objects.get(i).map_or(&[][..], |o| &o[..]) {
            out.extend((0..s.rank()).map(|m| s.qdeg(m)));
        }
        out
    }

    pub fn dim(&self, h: i64) -> usize {
        self.index(h).map_or(0, |i| self.dim_at(i))
    }

    pub fn total_rank(&self) -> usize {
        (0..self.objects.len()).map(|i| self.dim_at(i)).sum()
    }

    pub fn basis(&self, h: i64) -> GradedBasis {
        let mut generators = Vec::new();
        for s in self.object(h) {
            for m in 0..s.rank() {
                generators.push((format!("{}:{}", s.tag, word(m, s.circles)), s.qdeg(m)));
            }
        }
        GradedBasis { generators }
    }

    /// First height whose `d∘d` is nonzero, if any.
    pub fn d_squared_violation(&self) -> Option<i64> {
        self.diffs.windows(2).position(|w| !w[1].mul(&w[0]).is_zero()).map(|i| self.start + i as i64)
    }

    pub fn assert_d_squared_zero(&self) -> Result<()> {
        match self.d_squared_violation() {
            None => Ok(()),
            Some(h) => domain(format!("d∘d is nonzero at height {h}")),
        }
    }

    /// Generator offset of summand `idx` at height index `i`.
    fn offset(&self, i: usize, idx: usize) -> usize {
        self.objects[i][..idx].iter().map(Summand::rank).sum()
    }

    /// Shift all heights by `dh` and all quantum degrees by `dq`.
    pub fn shifted(&self, dh: i64, dq: i64) -> ChainComplex {
        let mut c = self.clone();
        c.start += dh;
        for o in &mut c.objects {
            for s in o {
                s.shift += dq;
            }
        }
        c
    }

    pub fn graded_euler(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (i, o) in self.objects.iter().enumerate() {
            let sign = if (self.start + i as i64).is_even() { 1 } else { -1 };
            for s in o {
                for m in 0..s.rank() {
                    p.add_term(s.qdeg(m), BigInt::from(sign));
                }
            }
        }
        p
    }
}

/// Replace the circle `circle` of summand `idx` at height `h` by two copies of
/// the rest, shifted by `+1` (the `1` label) and `-1` (the `X` label).
pub fn deloop(c: &ChainComplex, h: i64, idx: usize, circle: usize) -> Result<ChainComplex> {
    let Some(i) = c.index(h) else { return domain(format!("no object at height {h}")) };
    let Some(s) = c.objects[i].get(idx) else { return domain(format!("no summand {idx} at height {h}")) };
    if circle >= s.circles {
        return domain(format!("summand {idx} at height {h} has no circle {circle}"));
    }
    let k = s.circles;
    let off = c.offset(i, idx);
    let half = 1usize << (k - 1);
    // Old generator position → new position.
    let dim = c.dim_at(i);
    let mut perm: Vec<usize> = (0..dim).collect();
    for m in 0..1usize << k {
        let rest = (m & ((1 << circle) - 1)) | ((m >> (circle + 1)) << circle);
        let x = m >> circle & 1;
        perm[off + m] = off + x * half + rest;
    }
    let mut out = c.clone();
    let upper = Summand::new(format!("{}+", s.tag), k - 1, s.shift + 1);
    let lower = Summand::new(format!("{}-", s.tag), k - 1, s.shift - 1);
    out.objects[i].splice(idx..=idx, [upper, lower]);
    if i > 0 {
        out.diffs[i - 1] = permute(&c.diffs[i - 1], Some(&perm), None);
    }
    if i < c.diffs.len() {
        out.diffs[i] = permute(&c.diffs[i], None, Some(&perm));
    }
    debug_assert!(out.validate().is_ok());
    Ok(out)
}

fn permute(m: &SparseMatrix, rows: Option<&[usize]>, cols: Option<&[usize]>) -> SparseMatrix {
    let mut out = SparseMatrix::zeros(m.rows(), m.cols());
    for (r, c, v) in m.entries() {
        let r = rows.map_or(r, |p| p[r]);
        let c = cols.map_or(c, |p| p[c]);
        out.add(r, c, v.clone());
    }
    out
}

/// Cancel summand `src` at height `h` against summand `tgt` at height `h+1`.
///
/// Both must be circle-free and joined by a `±1` entry. The surviving
/// differential becomes `μ - γ·φ⁻¹·δ`.
pub fn gaussian_eliminate(c: &ChainComplex, h: i64, src: usize, tgt: usize) -> Result<ChainComplex> {
    let (Some(i), Some(j)) = (c.index(h), c.index(h + 1)) else {
        return domain(format!("no differential leaving height {h}"));
    };
    let (Some(a), Some(b)) = (c.objects[i].get(src), c.objects[j].get(tgt)) else {
        return domain("summand index out of range");
    };
    if a.circles != 0 || b.circles != 0 {
        return domain("deloop both summands before eliminating");
    }
    let x = c.offset(i, src);
    let y = c.offset(j, tgt);
    let d = &c.diffs[i];
    let phi = d.get(y, x);
    if !phi.abs().is_one() {
        return Err(Error::Domain(format!("pivot {phi} is not invertible over the integers")));
    }
    let gamma: Vec<(usize, BigInt)> =
        d.entries().filter(|(r, cc, _)| *cc == x && *r != y).map(|(r, _, v)| (r, v.clone())).collect();
    let delta: Vec<(usize, BigInt)> =
        d.entries().filter(|(r, cc, _)| *r == y && *cc != x).map(|(_, cc, v)| (cc, v.clone())).collect();
    let mut nd = d.clone();
    for (r, g) in &gamma {
        for (cc, dl) in &delta {
            nd.add(*r, *cc, -(g * &phi * dl));
        }
    }
    let mut out = c.clone();
    out.objects[i].remove(src);
    out.objects[j].remove(tgt);
    out.diffs[i] = drop_index(&nd, Some(y), Some(x));
    if i > 0 {
        out.diffs[i - 1] = drop_index(&c.diffs[i - 1], Some(x), None);
    }
    if j < c.diffs.len() {
        out.diffs[j] = drop_index(&c.diffs[j], None, Some(y));
    }
    debug_assert!(out.validate().is_ok());
    Ok(out)
}

fn drop_index(m: &SparseMatrix, row: Option<usize>, col: Option<usize>) -> SparseMatrix {
    let nr = m.rows() - row.is_some() as usize;
    let nc = m.cols() - col.is_some() as usize;
    let mut out = SparseMatrix::zeros(nr, nc);
    for (r, c, v) in m.entries() {
        if Some(r) == row || Some(c) == col {
            continue;
        }
        let r = if row.is_some_and(|x| r > x) { r - 1 } else { r };
        let c = if col.is_some_and(|x| c > x) { c - 1 } else { c };
        out.add(r, c, v.clone());
    }
    out
}

/// Deloop every circle at once. Fully delooping `V^{⊗k}{s}` leaves one
/// circle-free summand per generator, in generator order, so only the labels
/// change.
pub fn deloop_all(c: &ChainComplex) -> ChainComplex {
    let mut out = c.clone();
    for o in &mut out.objects {
        *o = o
            .iter()
            .flat_map(|s| {
                (0..s.rank()).map(move |m| Summand::new(format!("{}:{}", s.tag, word(m, s.circles)), 0, s.qdeg(m)))
            })
            .collect();
    }
    out
}

/// One differential stored both ways round for in-place elimination.
struct Incidence {
    by_row: Vec<BTreeMap<usize, BigInt>>,
    by_col: Vec<BTreeMap<usize, BigInt>>,
}

impl Incidence {
    fn new(m: &SparseMatrix) -> Self {
        let mut by_row = vec![BTreeMap::new(); m.rows()];
        let mut by_col = vec![BTreeMap::new(); m.cols()];
        for (r, c, v) in m.entries() {
            by_row[r].insert(c, v.clone());
            by_col[c].insert(r, v.clone());
        }
        Incidence { by_row, by_col }
    }

    fn add(&mut self, r: usize, c: usize, v: BigInt) {
        let slot = self.by_row[r].entry(c).or_insert_with(BigInt::zero);
        *slot += &v;
        if slot.is_zero() {
            self.by_row[r].remove(&c);
            self.by_col[c].remove(&r);
        } else {
            self.by_col[c].insert(r, slot.clone());
        }
    }

    fn clear_row(&mut self, r: usize) {
        for c in std::mem::take(&mut self.by_row[r]).into_keys() {
            self.by_col[c].remove(&r);
        }
    }

    fn clear_col(&mut self, c: usize) {
        for r in std::mem::take(&mut self.by_col[c]).into_keys() {
            self.by_row[r].remove(&c);
        }
    }
}

/// Deloop every circle, then cancel `±1` entries until none remain.
///
/// Produces the same kind of result as alternating [`deloop`] and
/// [`gaussian_eliminate`], but edits the differentials in place.
pub fn simplify(c: &ChainComplex) -> ChainComplex {
    let flat = deloop_all(c);
    let levels = flat.objects.len();
    let mut alive: Vec<Vec<bool>> = flat.objects.iter().map(|o| vec![true; o.len()]).collect();
    let mut inc: Vec<Incidence> = flat.diffs.iter().map(Incidence::new).collect();
    for i in 0..inc.len() {
        loop {
            let mut changed = false;
            for x in 0..alive[i].len() {
                if !alive[i][x] {
                    continue;
                }
                let Some((y, phi)) =
                    inc[i].by_col[x].iter().find(|(_, v)| v.abs().is_one()).map(|(&y, v)| (y, v.clone()))
                else {
                    continue;
                };
                let gamma: Vec<(usize, BigInt)> =
                    inc[i].by_col[x].iter().filter(|(&r, _)| r != y).map(|(&r, v)| (r, v.clone())).collect();
                let delta: Vec<(usize, BigInt)> =
                    inc[i].by_row[y].iter().filter(|(&cc, _)| cc != x).map(|(&cc, v)| (cc, v.clone())).collect();
                for (r, g) in &gamma {
                    let gp = g * &phi;
                    for (cc, dl) in &delta {
                        inc[i].add(*r, *cc, -(&gp * dl));
                    }
                }
                inc[i].clear_col(x);
                inc[i].clear_row(y);
                if i > 0 {
                    inc[i - 1].clear_row(x);
                }
                if i + 1 < inc.len() {
                    inc[i + 1].clear_col(y);
                }
                alive[i][x] = false;
                alive[i + 1][y] = false;
                changed = true;
            }
            if !changed {
                break;
            }
        }
    }
    let remap: Vec<Vec<Option<usize>>> = alive
        .iter()
        .map(|a| {
            let mut next = 0;
            a.iter()
                .map(|&keep| {
                    keep.then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        })
        .collect();
    let objects: Vec<Vec<Summand>> = (0..levels)
        .map(|l| flat.objects[l].iter().zip(&alive[l]).filter(|(_, &k)| k).map(|(s, _)| s.clone()).collect())
        .collect();
    let diffs = inc
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut out = SparseMatrix::zeros(objects[i + 1].len(), objects[i].len());
            for (r, row) in m.by_row.iter().enumerate() {
                for (&cc, v) in row {
                    let (Some(nr), Some(nc)) = (remap[i + 1][r], remap[i][cc]) else {
                        unreachable!("entries of cancelled generators are cleared")
                    };
                    out.add(nr, nc, v.clone());
                }
            }
            out
        })
        .collect();
    ChainComplex { start: flat.start, objects, diffs }
}

// ---------------------------------------------------------------------------
// Homology

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HomologyGroup {
    pub free: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free {
            0 => {}
            1 => parts.push("Z".to_string()),
            n => parts.push(format!("Z^{n}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// `(h, q) → H^{h,q}` with zero groups omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BigradedHomology {
    entries: BTreeMap<(i64, i64), HomologyGroup>,
}

impl BigradedHomology {
    pub fn insert(&mut self, h: i64, q: i64, g: HomologyGroup) {
        if g.is_zero() {
            self.entries.remove(&(h, q));
        } else {
            self.entries.insert((h, q), g);
        }
    }

    pub fn get(&self, h: i64, q: i64) -> HomologyGroup {
        self.entries.get(&(h, q)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((i64, i64), &HomologyGroup)> {
        self.entries.iter().map(|(&k, g)| (k, g))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Direct sum.
    pub fn merge(&mut self, other: &BigradedHomology) {
        for ((h, q), g) in other.entries() {
            let mut cur = self.get(h, q);
            cur.free += g.free;
            cur.torsion.extend(g.torsion.iter().cloned());
            cur.torsion.sort();
            self.insert(h, q, cur);
        }
    }

    /// Free ranks weighted by `(-1)^h q^q`; torsion is ignored.
    pub fn graded_euler(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for ((h, q), g) in self.entries() {
            let c = BigInt::from(g.free);
            p.add_term(q, if h.is_even() { c } else { -c });
        }
        p
    }

    /// `Σ_j qdim(Kh^j) t^j`.
    pub fn khovanov_polynomial(&self) -> TwoVarPoly {
        let mut p = TwoVarPoly::default();
        for ((h, q), g) in self.entries() {
            p.add_term(h, q, BigInt::from(g.free));
        }
        p
    }

    pub fn total_rank(&self) -> usize {
        self.entries.values().map(|g| g.free).sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.entries()
                .map(|((h, q), g)| {
                    json!({
                        "h": h,
                        "q": q,
                        "free": g.free,
                        "torsion": g.torsion.iter().map(int_json).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

impl fmt::Display for BigradedHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((h, q), g) in self.entries() {
            writeln!(f, "h={h} q={q}: {g}")?;
        }
        Ok(())
    }
}

/// Homology of `c`, one quantum degree at a time.
pub fn homology(c: &ChainComplex) -> BigradedHomology {
    homology_with_order(c, false)
}

/// As [`homology`], optionally visiting the quantum slices in reverse.
pub fn homology_with_order(c: &ChainComplex, reverse: bool) -> BigradedHomology {
    let n = c.objects.len();
    let qdegs: Vec<Vec<i64>> = (0..n).map(|i| c.qdegs_at(i)).collect();
    let mut slices: BTreeMap<i64, Vec<Vec<usize>>> = BTreeMap::new();
    for (i, qs) in qdegs.iter().enumerate() {
        for (g, &q) in qs.iter().enumerate() {
            slices.entry(q).or_insert_with(|| vec![Vec::new(); n])[i].push(g);
        }
    }
    let mut out = BigradedHomology::default();
    let mut order: Vec<(&i64, &Vec<Vec<usize>>)> = slices.iter().collect();
    if reverse {
        order.reverse();
    }
    for (&q, idx) in order {
        // (rank, factors) of the slice of d leaving height index i.
        let reduced: Vec<(usize, Vec<BigInt>)> = (0..n.saturating_sub(1))
            .map(|i| {
                if idx[i].is_empty() || idx[i + 1].is_empty() {
                    (0, Vec::new())
                } else {
                    rank_and_factors(&c.diffs[i].submatrix(&idx[i + 1], &idx[i]))
                }
            })
            .collect();
        for i in 0..n {
            if idx[i].is_empty() {
                continue;
            }
            let out_rank = reduced.get(i).map_or(0, |r| r.0);
            let (in_rank, torsion) = if i > 0 {
                let (r, f) = &reduced[i - 1];
                (*r, f.iter().filter(|x| !x.is_one()).cloned().collect())
            } else {
                (0, Vec::new())
            };
            let free = idx[i].len() - out_rank - in_rank;
            out.insert(c.start + i as i64, q, HomologyGroup { free, torsion });
        }
    }
    out
}
