//! Arbitrary-precision integer matrices and Smith normal form.
//!
//! The Smith normal form is the homology-rank oracle's workhorse: for an
//! integer matrix `A` it produces unimodular `U`, `V` with `U * A * V = D`
//! diagonal and `d_1 | d_2 | ...`. Pivots are chosen by smallest nonzero
//! absolute value to control entry growth; correctness, not speed, is the
//! contract here (matrices stay small, a few hundred rows at most).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Dense row-major integer matrix; `rows * cols` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().map(BigInt::from).collect(),
        }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        IntMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(
            self.cols, other.rows,
            "dimension mismatch in matrix product"
        );
        let mut out = IntMatrix::zero(self.rows, other.cols);
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

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let addend = factor * &self[(source, j)];
            self[(target, j)] += addend;
        }
    }

    /// col[target] += factor * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let addend = factor * &self[(i, source)];
            self[(i, target)] += addend;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }

    /// Determinant of a square matrix by fraction-free (Bareiss)
    /// elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut prev = BigInt::one();
        let mut sign = 1i32;
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = num / &prev;
                }
                m[(i, k)] = BigInt::zero();
            }
            prev = m[(k, k)].clone();
        }
        let det = m[(n - 1, n - 1)].clone();
        if sign < 0 {
            -det
        } else {
            det
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Smith normal form decomposition `u * a * v = d`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Nonnegative diagonal of `d`, including trailing zeros.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }

    /// Invariant factors greater than one (torsion coefficients).
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .collect()
    }
}

/// Minimal-absolute-value entry position in the trailing block starting at
/// `(t, t)`, among nonzero entries.
fn min_abs_pivot(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..m.rows() {
        for j in t..m.cols() {
            let e = &m[(i, j)];
            if e.is_zero() {
                continue;
            }
            let a = e.abs();
            match &best {
                Some((_, b)) if *b <= a => {}
                _ => best = Some(((i, j), a)),
            }
        }
    }
    best.map(|(pos, _)| pos)
}

/// Smith normal form with transformation matrices: `u * a * v = d`, `u` and
/// `v` unimodular, `d` diagonal nonnegative with each entry dividing the
/// next.
pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let mut d = a.clone();
    let mut u = IntMatrix::identity(a.rows());
    let mut v = IntMatrix::identity(a.cols());

    let steps = a.rows().min(a.cols());
    let mut t = 0;
    while t < steps {
        let Some((pi, pj)) = min_abs_pivot(&d, t) else {
            break; // trailing block is zero
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        'reduce: loop {
            // Clear column t by Euclidean row steps, re-pivoting on the
            // smallest remainder until only the pivot survives.
            loop {
                let mut dirty = false;
                for i in t + 1..d.rows() {
                    if d[(i, t)].is_zero() {
                        continue;
                    }
                    let q = rounded_div(&d[(i, t)], &d[(t, t)]);
                    if !q.is_zero() {
                        let f = -q;
                        d.add_row_multiple(i, t, &f);
                        u.add_row_multiple(i, t, &f);
                    }
                    if !d[(i, t)].is_zero() {
                        // remainder is strictly smaller than the pivot
                        d.swap_rows(t, i);
                        u.swap_rows(t, i);
                        dirty = true;
                    }
                }
                if !dirty {
                    break;
                }
            }
            // Same for row t with column steps.
            let mut row_dirtied_column = false;
            loop {
                let mut dirty = false;
                for j in t + 1..d.cols() {
                    if d[(t, j)].is_zero() {
                        continue;
                    }
                    let q = rounded_div(&d[(t, j)], &d[(t, t)]);
                    if !q.is_zero() {
                        let f = -q;
                        d.add_col_multiple(j, t, &f);
                        v.add_col_multiple(j, t, &f);
                    }
                    if !d[(t, j)].is_zero() {
                        d.swap_cols(t, j);
                        v.swap_cols(t, j);
                        dirty = true;
                        row_dirtied_column = true;
                    }
                }
                if !dirty {
                    break;
                }
            }
            if row_dirtied_column && (t + 1..d.rows()).any(|i| !d[(i, t)].is_zero()) {
                continue 'reduce;
            }
            // Divisibility: the pivot must divide every remaining entry.
            let pivot = d[(t, t)].clone();
            let offender = (t + 1..d.rows())
                .flat_map(|i| (t + 1..d.cols()).map(move |j| (i, j)))
                .find(|&(i, j)| !(&d[(i, j)] % &pivot).is_zero());
            match offender {
                Some((i, _)) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                    continue 'reduce;
                }
                None => break 'reduce,
            }
        }

        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Snf { u, d, v }
}

/// Quotient rounding to the nearest integer (ties toward zero), so the
/// remainder has at most half the pivot's absolute value.
fn rounded_div(a: &BigInt, b: &BigInt) -> BigInt {
    let q = a / b;
    let r = a - &q * b;
    if r.is_zero() {
        return q;
    }
    let two_r = r.abs() * BigInt::from(2);
    if two_r > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}
