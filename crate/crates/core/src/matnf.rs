//! Dense matrices over a Euclidean domain and their normal forms.
//!
//! Relations are columns throughout: a module presented by `A` is the
//! cokernel of `A` acting on column vectors, so Hermite forms are column
//! Hermite forms (`A * U = H`).

use std::fmt;

use crate::error::{Error, Result};
use crate::euclid::EuclideanDomain;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

pub type DMat<D> = Mat<<D as EuclideanDomain>::Elem>;

impl<E: fmt::Debug> fmt::Debug for Mat<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<&E> = (0..self.cols).map(|j| &self.data[i * self.cols + j]).collect();
            write!(f, "{row:?}")?;
        }
        write!(f, "]")
    }
}

impl<E: Clone> Mat<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Mat<E> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<E>) -> Result<Mat<E>> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_columns(rows: usize, columns: &[Vec<E>]) -> Mat<E> {
        for c in columns {
            assert_eq!(c.len(), rows, "column length");
        }
        Mat::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<E>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Mat<E> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn select_columns(&self, idx: &[usize]) -> Mat<E> {
        Mat::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat<E> {
        Mat::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn row_range(&self, start: usize, end: usize) -> Mat<E> {
        Mat::from_fn(end - start, self.cols, |i, j| self.get(start + i, j).clone())
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &Mat<E>) -> Mat<E> {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// `[self; other]`.
    pub fn vcat(&self, other: &Mat<E>) -> Mat<E> {
        assert_eq!(self.cols, other.cols, "vcat column mismatch");
        Mat::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                other.get(i - self.rows, j).clone()
            }
        })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn map<F: Clone>(&self, f: impl Fn(&E) -> F) -> Mat<F> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }
}

// Arithmetic needs the domain object, so it lives on free functions.

pub fn zeros<D: EuclideanDomain>(d: &D, rows: usize, cols: usize) -> DMat<D> {
    Mat::from_fn(rows, cols, |_, _| d.zero())
}

pub fn identity<D: EuclideanDomain>(d: &D, n: usize) -> DMat<D> {
    Mat::from_fn(n, n, |i, j| if i == j { d.one() } else { d.zero() })
}

pub fn diagonal<D: EuclideanDomain>(d: &D, rows: usize, cols: usize, diag: &[D::Elem]) -> DMat<D> {
    Mat::from_fn(rows, cols, |i, j| if i == j && i < diag.len() { diag[i].clone() } else { d.zero() })
}

pub fn from_i64<D: EuclideanDomain>(d: &D, rows: &[Vec<i64>]) -> DMat<D> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    Mat::from_fn(r, c, |i, j| d.from_i64(rows[i][j]))
}

pub fn mul<D: EuclideanDomain>(d: &D, a: &DMat<D>, b: &DMat<D>) -> DMat<D> {
    assert_eq!(a.cols, b.rows, "product shape mismatch");
    let mut out = zeros(d, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if d.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if d.is_zero(y) {
                    continue;
                }
                let v = d.add(out.get(i, j), &d.mul(x, y));
                out.set(i, j, v);
            }
        }
    }
    out
}

pub fn mul_vec<D: EuclideanDomain>(d: &D, a: &DMat<D>, v: &[D::Elem]) -> Vec<D::Elem> {
    assert_eq!(a.cols, v.len(), "matrix-vector shape mismatch");
    (0..a.rows)
        .map(|i| {
            let mut acc = d.zero();
            for (k, x) in v.iter().enumerate() {
                if !d.is_zero(x) {
                    acc = d.add(&acc, &d.mul(a.get(i, k), x));
                }
            }
            acc
        })
        .collect()
}

pub fn add<D: EuclideanDomain>(d: &D, a: &DMat<D>, b: &DMat<D>) -> DMat<D> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "sum shape mismatch");
    Mat::from_fn(a.rows, a.cols, |i, j| d.add(a.get(i, j), b.get(i, j)))
}

pub fn sub<D: EuclideanDomain>(d: &D, a: &DMat<D>, b: &DMat<D>) -> DMat<D> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "difference shape mismatch");
    Mat::from_fn(a.rows, a.cols, |i, j| d.sub(a.get(i, j), b.get(i, j)))
}

pub fn scale<D: EuclideanDomain>(d: &D, c: &D::Elem, a: &DMat<D>) -> DMat<D> {
    a.map(|x| d.mul(c, x))
}

/// Kronecker product `a ⊗ b`.
pub fn kron<D: EuclideanDomain>(d: &D, a: &DMat<D>, b: &DMat<D>) -> DMat<D> {
    Mat::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        d.mul(a.get(i / b.rows, j / b.cols), b.get(i % b.rows, j % b.cols))
    })
}

/// Block diagonal `diag(a, b)`.
pub fn block_diag<D: EuclideanDomain>(d: &D, a: &DMat<D>, b: &DMat<D>) -> DMat<D> {
    Mat::from_fn(a.rows + b.rows, a.cols + b.cols, |i, j| match (i < a.rows, j < a.cols) {
        (true, true) => a.get(i, j).clone(),
        (false, false) => b.get(i - a.rows, j - a.cols).clone(),
        _ => d.zero(),
    })
}

pub fn is_zero_matrix<D: EuclideanDomain>(d: &D, a: &DMat<D>) -> bool {
    a.data.iter().all(|x| d.is_zero(x))
}

/// Drops all-zero columns.
pub fn nonzero_columns<D: EuclideanDomain>(d: &D, a: &DMat<D>) -> DMat<D> {
    let keep: Vec<usize> = (0..a.cols).filter(|&j| (0..a.rows).any(|i| !d.is_zero(a.get(i, j)))).collect();
    a.select_columns(&keep)
}

// Elementary operations. `c` is a scalar multiplier.

fn col_axpy<D: EuclideanDomain>(d: &D, m: &mut DMat<D>, target: usize, src: usize, c: &D::Elem) {
    if d.is_zero(c) {
        return;
    }
    for i in 0..m.rows {
        let s = m.get(i, src);
        if d.is_zero(s) {
            continue;
        }
        let v = d.add(m.get(i, target), &d.mul(c, s));
        m.set(i, target, v);
    }
}

fn row_axpy<D: EuclideanDomain>(d: &D, m: &mut DMat<D>, target: usize, src: usize, c: &D::Elem) {
    if d.is_zero(c) {
        return;
    }
    for j in 0..m.cols {
        let s = m.get(src, j);
        if d.is_zero(s) {
            continue;
        }
        let v = d.add(m.get(target, j), &d.mul(c, s));
        m.set(target, j, v);
    }
}

fn col_scale<D: EuclideanDomain>(d: &D, m: &mut DMat<D>, j: usize, u: &D::Elem) {
    for i in 0..m.rows {
        let v = d.mul(u, m.get(i, j));
        m.set(i, j, v);
    }
}

fn row_scale<D: EuclideanDomain>(d: &D, m: &mut DMat<D>, i: usize, u: &D::Elem) {
    for j in 0..m.cols {
        let v = d.mul(u, m.get(i, j));
        m.set(i, j, v);
    }
}

/// Column Hermite normal form: returns `(H, U)` with `A * U = H`, `U`
/// unimodular.
///
/// `H` is in column echelon form: nonzero columns come first, pivot rows
/// strictly increase, pivots are canonical, entries left of a pivot are
/// reduced to canonical residues modulo it and entries right of it vanish.
/// The nonzero part of `H` depends only on the column span of `A`.
pub fn hnf<D: EuclideanDomain>(d: &D, a: &DMat<D>) -> (DMat<D>, DMat<D>) {
    let mut h = a.clone();
    let mut u = identity(d, a.cols);
    let mut r = 0;
    for i in 0..h.rows {
        if r == h.cols {
            break;
        }
        loop {
            let pick =
                (r..h.cols).filter(|&j| !d.is_zero(h.get(i, j))).min_by(|&x, &y| d.size_cmp(h.get(i, x), h.get(i, y)));
            let Some(j) = pick else { break };
            h.swap_cols(r, j);
            u.swap_cols(r, j);
            let mut clean = true;
            for j in r + 1..h.cols {
                if d.is_zero(h.get(i, j)) {
                    continue;
                }
                let q = d.div_rem(h.get(i, j), h.get(i, r)).0;
                let nq = d.neg(&q);
                col_axpy(d, &mut h, j, r, &nq);
                col_axpy(d, &mut u, j, r, &nq);
                if !d.is_zero(h.get(i, j)) {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if d.is_zero(h.get(i, r)) {
            continue;
        }
        let inv = d.unit_inverse(&d.unit_part(h.get(i, r)));
        col_scale(d, &mut h, r, &inv);
        col_scale(d, &mut u, r, &inv);
        for j in 0..r {
            let q = d.div_rem(h.get(i, j), h.get(i, r)).0;
            let nq = d.neg(&q);
            col_axpy(d, &mut h, j, r, &nq);
            col_axpy(d, &mut u, j, r, &nq);
        }
        r += 1;
    }
    (h, u)
}

/// Smith form with transforms and their inverses.
#[derive(Clone, Debug)]
pub struct Smith<E> {
    /// `D = U * A * V`, diagonal with canonical entries `d1 | d2 | ...`.
    pub diag: Mat<E>,
    pub u: Mat<E>,
    pub u_inv: Mat<E>,
    pub v: Mat<E>,
    pub v_inv: Mat<E>,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl<E: Clone> Smith<E> {
    pub fn invariant_factors(&self) -> Vec<E> {
        (0..self.rank).map(|i| self.diag.get(i, i).clone()).collect()
    }
}

/// Smith normal form `U * A * V = D` with unimodular `U`, `V`.
pub fn snf<D: EuclideanDomain>(d: &D, a: &DMat<D>) -> Smith<D::Elem> {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = identity(d, m);
    let mut u_inv = identity(d, m);
    let mut v = identity(d, n);
    let mut v_inv = identity(d, n);

    // Row op `row_t += c * row_s` on (S, U) and its inverse on U^-1.
    let row_op = |s: &mut DMat<D>, u: &mut DMat<D>, u_inv: &mut DMat<D>, t: usize, src: usize, c: &D::Elem| {
        row_axpy(d, s, t, src, c);
        row_axpy(d, u, t, src, c);
        col_axpy(d, u_inv, src, t, &d.neg(c));
    };
    let col_op = |s: &mut DMat<D>, v: &mut DMat<D>, v_inv: &mut DMat<D>, t: usize, src: usize, c: &D::Elem| {
        col_axpy(d, s, t, src, c);
        col_axpy(d, v, t, src, c);
        row_axpy(d, v_inv, src, t, &d.neg(c));
    };

    let mut t = 0;
    while t < m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = s.get(i, j);
                if d.is_zero(x) {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| d.size_cmp(x, s.get(bi, bj)).is_lt()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        v_inv.swap_rows(t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..m {
                if d.is_zero(s.get(i, t)) {
                    continue;
                }
                let q = d.div_rem(s.get(i, t), s.get(t, t)).0;
                row_op(&mut s, &mut u, &mut u_inv, i, t, &d.neg(&q));
                if !d.is_zero(s.get(i, t)) {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d.is_zero(s.get(t, j)) {
                    continue;
                }
                let q = d.div_rem(s.get(t, j), s.get(t, t)).0;
                col_op(&mut s, &mut v, &mut v_inv, j, t, &d.neg(&q));
                if !d.is_zero(s.get(t, j)) {
                    clean = false;
                }
            }
            if !clean {
                // move the smallest remainder in row/column t to the pivot
                let mut best = (t, t);
                for i in t + 1..m {
                    let x = s.get(i, t);
                    if !d.is_zero(x) && d.size_cmp(x, s.get(best.0, best.1)).is_lt() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    let x = s.get(t, j);
                    if !d.is_zero(x) && d.size_cmp(x, s.get(best.0, best.1)).is_lt() {
                        best = (t, j);
                    }
                }
                let (bi, bj) = best;
                s.swap_rows(t, bi);
                u.swap_rows(t, bi);
                u_inv.swap_cols(t, bi);
                s.swap_cols(t, bj);
                v.swap_cols(t, bj);
                v_inv.swap_rows(t, bj);
                continue;
            }
            let offender = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d.divides(s.get(t, t), s.get(i, j)));
            match offender {
                Some((i, _)) => {
                    let one = d.one();
                    row_op(&mut s, &mut u, &mut u_inv, t, i, &one);
                }
                None => break,
            }
        }
        let unit = d.unit_part(s.get(t, t));
        let inv = d.unit_inverse(&unit);
        row_scale(d, &mut s, t, &inv);
        row_scale(d, &mut u, t, &inv);
        col_scale(d, &mut u_inv, t, &unit);
        t += 1;
    }
    let rank = (0..m.min(n)).take_while(|&i| !d.is_zero(s.get(i, i))).count();
    Smith { diag: s, u, u_inv, v, v_inv, rank }
}

/// Cached Smith data for repeated solves against one matrix.
#[derive(Clone, Debug)]
pub struct LinearSolver<D: EuclideanDomain> {
    domain: D,
    smith: Smith<D::Elem>,
    rows: usize,
    cols: usize,
}

impl<D: EuclideanDomain> LinearSolver<D> {
    pub fn new(d: &D, a: &DMat<D>) -> LinearSolver<D> {
        LinearSolver { domain: d.clone(), smith: snf(d, a), rows: a.rows, cols: a.cols }
    }

    /// Some `x` with `A * x = b`, if one exists over the domain.
    pub fn solve(&self, b: &[D::Elem]) -> Option<Vec<D::Elem>> {
        let d = &self.domain;
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let y = mul_vec(d, &self.smith.u, b);
        let mut z = vec![d.zero(); self.cols];
        for (i, yi) in y.iter().enumerate() {
            if i < self.smith.rank {
                z[i] = d.exact_div(yi, self.smith.diag.get(i, i))?;
            } else if !d.is_zero(yi) {
                return None;
            }
        }
        Some(mul_vec(d, &self.smith.v, &z))
    }

    /// Solves column by column; `None` if any column fails.
    pub fn solve_matrix(&self, b: &DMat<D>) -> Option<DMat<D>> {
        let cols: Option<Vec<Vec<D::Elem>>> = b.columns().iter().map(|c| self.solve(c)).collect();
        Some(Mat::from_columns(self.cols, &cols?))
    }
}

/// Some `x` with `A * x = b`, or `None`.
pub fn solve<D: EuclideanDomain>(d: &D, a: &DMat<D>, b: &[D::Elem]) -> Result<Option<Vec<D::Elem>>> {
    if b.len() != a.rows {
        return Err(Error::Shape(format!("rhs of length {} for {} rows", b.len(), a.rows)));
    }
    Ok(LinearSolver::new(d, a).solve(b))
}

/// Generators of `{x : A * x = 0}` as columns, in canonical Hermite form.
pub fn kernel<D: EuclideanDomain>(d: &D, a: &DMat<D>) -> DMat<D> {
    let (h, u) = hnf(d, a);
    let zero_cols: Vec<usize> = (0..h.cols).filter(|&j| (0..h.rows).all(|i| d.is_zero(h.get(i, j)))).collect();
    let basis = u.select_columns(&zero_cols);
    nonzero_columns(d, &hnf(d, &basis).0)
}

/// Canonical column-span representative: nonzero columns of the Hermite form.
pub fn span_normal_form<D: EuclideanDomain>(d: &D, a: &DMat<D>) -> DMat<D> {
    nonzero_columns(d, &hnf(d, a).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euclid::{Integers, PolyFp};
    use num_bigint::BigInt;

    fn zm(rows: &[Vec<i64>]) -> DMat<Integers> {
        from_i64(&Integers, rows)
    }

    fn check_smith(a: &DMat<Integers>) -> Smith<BigInt> {
        let d = Integers;
        let s = snf(&d, a);
        assert_eq!(mul(&d, &mul(&d, &s.u, a), &s.v), s.diag);
        assert_eq!(mul(&d, &s.u, &s.u_inv), identity(&d, a.rows()));
        assert_eq!(mul(&d, &s.v, &s.v_inv), identity(&d, a.cols()));
        s
    }

    #[test]
    fn hnf_row_gcd() {
        let (h, u) = hnf(&Integers, &zm(&[vec![12, 6]]));
        assert_eq!(h, zm(&[vec![6, 0]]));
        assert_eq!(mul(&Integers, &zm(&[vec![12, 6]]), &u), h);
    }

    #[test]
    fn hnf_identity_and_diagonal() {
        let id = identity(&Integers, 3);
        let (h, u) = hnf(&Integers, &id);
        assert_eq!(h, id);
        assert_eq!(u, id);
        let (h, _) = hnf(&Integers, &zm(&[vec![4, 0], vec![0, 6]]));
        assert_eq!(h, zm(&[vec![4, 0], vec![0, 6]]));
    }

    #[test]
    fn hnf_reduces_left_entries() {
        let a = zm(&[vec![3, 0], vec![7, 5]]);
        let (h, _) = hnf(&Integers, &a);
        assert_eq!(h, zm(&[vec![3, 0], vec![2, 5]]));
        assert_eq!(hnf(&Integers, &h).0, h);
    }

    #[test]
    fn snf_examples() {
        let s = check_smith(&zm(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
        let s = check_smith(&zm(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
        let s = check_smith(&zm(&[vec![0, 0], vec![0, 0]]));
        assert_eq!(s.rank, 0);
        assert!(is_zero_matrix(&Integers, &s.diag));
    }

    #[test]
    fn snf_empty_shapes() {
        let a: DMat<Integers> = Mat::from_fn(0, 3, |_, _| BigInt::from(0));
        let s = check_smith(&a);
        assert_eq!(s.rank, 0);
        let b: DMat<Integers> = Mat::from_fn(2, 0, |_, _| BigInt::from(0));
        let s = check_smith(&b);
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn snf_polynomial() {
        let d = PolyFp::new(2).unwrap();
        // diag(x, x+1) ~ diag(1, x^2+x)
        let a = Mat::from_rows(2, 2, vec![d.poly(&[0, 1]), d.zero(), d.zero(), d.poly(&[1, 1])]).unwrap();
        let s = snf(&d, &a);
        assert_eq!(s.invariant_factors(), vec![d.one(), d.poly(&[0, 1, 1])]);
        assert_eq!(mul(&d, &mul(&d, &s.u, &a), &s.v), s.diag);
    }

    #[test]
    fn solve_examples() {
        let d = Integers;
        assert_eq!(solve(&d, &zm(&[vec![2]]), &[BigInt::from(4)]).unwrap(), Some(vec![BigInt::from(2)]));
        assert_eq!(solve(&d, &zm(&[vec![2]]), &[BigInt::from(3)]).unwrap(), None);
        let a = zm(&[vec![2, 4]]);
        let x = solve(&d, &a, &[BigInt::from(6)]).unwrap().unwrap();
        assert_eq!(mul_vec(&d, &a, &x), vec![BigInt::from(6)]);
        assert!(solve(&d, &a, &[]).is_err());
    }

    #[test]
    fn kernel_examples() {
        let d = Integers;
        let k = kernel(&d, &zm(&[vec![2, 4]]));
        assert_eq!(k.cols(), 1);
        assert!(is_zero_matrix(&d, &mul(&d, &zm(&[vec![2, 4]]), &k)));
        // generator is ±(-2, 1); canonical pivot makes it (2, -1)
        assert_eq!(k, zm(&[vec![2], vec![-1]]));
        assert_eq!(kernel(&d, &zm(&[vec![1, 2], vec![3, 5]])).cols(), 0);
        let k = kernel(&d, &zm(&[vec![0, 0]]));
        assert_eq!(k, identity(&d, 2));
    }
}
