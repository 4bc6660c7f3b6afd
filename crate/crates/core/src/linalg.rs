//! Dense linear algebra over exact fields.
//!
//! Two fields are provided: small prime fields [`Fp`] (elements are `u8`
//! residues) and the rationals [`QQ`]. Subspaces are always stored by a basis in
//! reduced row-echelon form, which makes equality of subspaces structural
//! equality.

use std::fmt;

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `a` must be nonzero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_rational(&self, q: &Rational) -> Result<Self::Elem>;
    fn render(&self, a: &Self::Elem) -> String;
}

/// The prime field with `p` elements, `p < 256`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u8,
}

impl Fp {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..256).contains(&p) || !(2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            return Err(Error::InvalidParameter(format!("{p} is not a prime below 256")));
        }
        Ok(Fp { p: p as u8 })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn elem(&self, n: i64) -> u8 {
        n.rem_euclid(self.p as i64) as u8
    }
}

impl Field for Fp {
    type Elem = u8;

    fn zero(&self) -> u8 {
        0
    }
    fn one(&self) -> u8 {
        1
    }
    fn add(&self, a: &u8, b: &u8) -> u8 {
        ((*a as u16 + *b as u16) % self.p as u16) as u8
    }
    fn sub(&self, a: &u8, b: &u8) -> u8 {
        ((*a as u16 + self.p as u16 - *b as u16) % self.p as u16) as u8
    }
    fn mul(&self, a: &u8, b: &u8) -> u8 {
        ((*a as u16 * *b as u16) % self.p as u16) as u8
    }
    fn neg(&self, a: &u8) -> u8 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u8) -> u8 {
        debug_assert!(*a != 0);
        let mut r = 1u8;
        for _ in 0..self.p - 2 {
            r = self.mul(&r, a);
        }
        r
    }
    fn is_zero(&self, a: &u8) -> bool {
        *a == 0
    }
    fn from_rational(&self, q: &Rational) -> Result<u8> {
        let p = BigInt::from(self.p);
        let den = q.denom().mod_floor(&p);
        if den.is_zero() {
            return Err(Error::NotReducible(format_rational(q)));
        }
        let num = q.numer().mod_floor(&p).to_u8().unwrap();
        let den = den.to_u8().unwrap();
        Ok(self.mul(&num, &self.inv(&den)))
    }
    fn render(&self, a: &u8) -> String {
        a.to_string()
    }
}

/// The field of rational numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct QQ;

impl Field for QQ {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Rational {
        a.recip()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, q: &Rational) -> Result<Rational> {
        Ok(q.clone())
    }
    fn render(&self, a: &Rational) -> String {
        format_rational(a)
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|x| self.field.render(x)).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &F, rows: usize, cols: usize, entries: Vec<Vec<F::Elem>>) -> Result<Self> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!("expected a {rows}x{cols} matrix")));
        }
        Ok(Matrix { field: field.clone(), rows, cols, data: entries.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(field: &F, rows: usize, columns: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (r, x) in col.iter().enumerate() {
                m.set(r, c, x.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }
    pub fn set(&mut self, r: usize, c: usize, x: F::Elem) {
        self.data[r * self.cols + c] = x;
    }
    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
    pub fn to_rows(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
    pub fn column(&self, c: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn mul(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if f.is_zero(a) {
                    continue;
                }
                for c in 0..other.cols {
                    let prod = f.mul(a, other.get(k, c));
                    let cur = f.add(out.get(r, c), &prod);
                    out.set(r, c, cur);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let f = &self.field;
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f.add(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &F::Elem) -> Matrix<F> {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.mul(a, c)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix<F> {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn block_diag(&self, other: &Matrix<F>) -> Matrix<F> {
        let mut m = Self::zeros(&self.field, self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).clone());
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                m.set(self.rows + r, self.cols + c, other.get(r, c).clone());
            }
        }
        m
    }

    /// Reduced row-echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col));
            for c in col..m.cols {
                let x = f.mul(m.get(row, c), &inv);
                m.set(row, c, x);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for c in col..m.cols {
                    let x = f.sub(m.get(r, c), &f.mul(&factor, m.get(row, c)));
                    m.set(r, c, x);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : A x = 0}`, in canonical (RREF) form.
    pub fn kernel(&self) -> Subspace<F> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let vectors: Vec<Vec<F::Elem>> = free
            .iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.cols];
                v[fc] = f.one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(r.get(i, fc));
                }
                v
            })
            .collect();
        Subspace::span(f, self.cols, &vectors)
    }

    /// Image of the matrix (column space).
    pub fn image(&self) -> Subspace<F> {
        let cols: Vec<Vec<F::Elem>> = (0..self.cols).map(|c| self.column(c)).collect();
        Subspace::span(&self.field, self.rows, &cols)
    }
}

/// A linear subspace of `F^n`, stored by an RREF basis.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    basis: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: Field> fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|v| v.iter().map(|x| self.field.render(x)).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "<{}> in {}", rows.join(" | "), self.ambient)
    }
}

impl<F: Field> Subspace<F> {
    pub fn zero(field: &F, ambient: usize) -> Self {
        Subspace { field: field.clone(), ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![field.zero(); ambient];
                v[i] = field.one();
                v
            })
            .collect();
        Subspace { field: field.clone(), ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn span(field: &F, ambient: usize, vectors: &[Vec<F::Elem>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(field, ambient);
        }
        let m = Matrix {
            field: field.clone(),
            rows: vectors.len(),
            cols: ambient,
            data: vectors.iter().flat_map(|v| {
                assert_eq!(v.len(), ambient, "vector length does not match ambient dimension");
                v.iter().cloned()
            }).collect(),
        };
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { field: field.clone(), ambient, basis, pivots }
    }

    /// Builds a subspace from rows already known to be in RREF.
    pub(crate) fn from_rref_unchecked(field: &F, ambient: usize, basis: Vec<Vec<F::Elem>>, pivots: Vec<usize>) -> Self {
        Subspace { field: field.clone(), ambient, basis, pivots }
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }
    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// Residue of `v` after eliminating the pivot coordinates; zero iff `v`
    /// lies in the subspace.
    pub fn reduce(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let mut w = v.to_vec();
        for (b, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = w[pc].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (x, y) in w.iter_mut().zip(b) {
                *x = f.sub(x, &f.mul(&c, y));
            }
        }
        w
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.reduce(v).iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_subspace_of(&self, other: &Subspace<F>) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(&self.field, self.ambient, &vs)
    }

    /// Image of the subspace under `m` (which must have `ambient` columns).
    pub fn image_under(&self, m: &Matrix<F>) -> Subspace<F> {
        let vs: Vec<_> = self.basis.iter().map(|b| m.apply(b)).collect();
        Subspace::span(&self.field, m.rows(), &vs)
    }

    /// Matrix of the linear map `v ↦ reduce(v)`.
    fn reduction_matrix(&self) -> Matrix<F> {
        let f = &self.field;
        let mut m = Matrix::identity(f, self.ambient);
        for (b, &pc) in self.basis.iter().zip(&self.pivots) {
            for (r, x) in b.iter().enumerate() {
                let cur = f.sub(m.get(r, pc), x);
                m.set(r, pc, cur);
            }
        }
        m
    }

    /// `{v : m v ∈ self}` for `m` mapping into this subspace's ambient space.
    pub fn preimage_under(&self, m: &Matrix<F>) -> Subspace<F> {
        self.reduction_matrix().mul(m).kernel()
    }

    pub fn intersection(&self, other: &Subspace<F>) -> Subspace<F> {
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(&self.field, self.ambient);
        }
        let b = Matrix::from_columns(&self.field, self.ambient, &self.basis);
        let coeffs = other.preimage_under(&b);
        let vs: Vec<_> = coeffs.basis.iter().map(|c| b.apply(c)).collect();
        Subspace::span(&self.field, self.ambient, &vs)
    }

    /// Coordinates (the non-pivot positions) of `v` in the quotient `F^n / self`.
    pub fn quotient_coords(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let w = self.reduce(v);
        self.complement_positions().into_iter().map(|c| w[c].clone()).collect()
    }

    /// Lifts quotient coordinates back to a representative in `F^n`.
    pub fn lift(&self, coords: &[F::Elem]) -> Vec<F::Elem> {
        let mut v = vec![self.field.zero(); self.ambient];
        for (c, x) in self.complement_positions().into_iter().zip(coords) {
            v[c] = x.clone();
        }
        v
    }

    pub fn complement_positions(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }
}

impl Subspace<Fp> {
    /// Number of subspaces of `F_p^n` (sum of Gaussian binomials).
    pub fn count_all(p: u8, n: usize) -> u128 {
        let p = p as u128;
        let mut total: u128 = 0;
        for k in 0..=n {
            let mut num: u128 = 1;
            let mut den: u128 = 1;
            for i in 0..k {
                num = num.saturating_mul(p.saturating_pow((n - i) as u32).saturating_sub(1));
                den = den.saturating_mul(p.saturating_pow((i + 1) as u32).saturating_sub(1));
            }
            total = total.saturating_add(num / den.max(1));
        }
        total
    }

    /// Every subspace of `F_p^n`, ordered by dimension, then pivot set
    /// (lexicographically), then free entries.
    pub fn enumerate_all(field: &Fp, n: usize) -> Vec<Subspace<Fp>> {
        let p = field.p();
        let mut out = Vec::new();
        for k in 0..=n {
            for pivots in combinations(n, k) {
                // free positions: (row i, column c) with c > pivot_i and c not a pivot
                let free: Vec<(usize, usize)> = (0..k)
                    .flat_map(|i| {
                        let pv = &pivots;
                        (pv[i] + 1..n).filter(move |c| !pv.contains(c)).map(move |c| (i, c))
                    })
                    .collect();
                let mut counter = vec![0u8; free.len()];
                loop {
                    let mut basis = vec![vec![0u8; n]; k];
                    for (i, &pc) in pivots.iter().enumerate() {
                        basis[i][pc] = 1;
                    }
                    for (&(i, c), &x) in free.iter().zip(&counter) {
                        basis[i][c] = x;
                    }
                    out.push(Subspace::from_rref_unchecked(field, n, basis, pivots.clone()));
                    // odometer increment, last position fastest
                    let mut exhausted = true;
                    for pos in (0..free.len()).rev() {
                        counter[pos] += 1;
                        if counter[pos] < p {
                            exhausted = false;
                            break;
                        }
                        counter[pos] = 0;
                    }
                    if exhausted {
                        break;
                    }
                }
            }
        }
        out
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Converts an integer-valued rational matrix to `i64` entries when possible.
pub fn integer_entries(m: &Matrix<QQ>) -> Option<Vec<Vec<i64>>> {
    (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .map(|q| if q.is_integer() && q.numer().abs() < BigInt::from(i64::MAX) { q.numer().to_i64() } else { None })
                .collect()
        })
        .collect()
}
