//! Dense exact linear algebra over Z: Smith normal form with transformation
//! matrices, Hermite-style canonical row spans, kernels and solving.
//!
//! Row convention as in the rest of the crate: vectors are rows, maps act by
//! `v * A`.  Pivoting is on minimal absolute value to control entry growth.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl ZMat {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols);
        ZMat { rows, cols, data }
    }
    pub fn zero(rows: usize, cols: usize) -> Self {
        ZMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = ZMat::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols);
            data.extend(row);
        }
        ZMat { rows: r, cols, data }
    }
    pub fn mul(&self, other: &ZMat) -> ZMat {
        assert_eq!(self.cols, other.rows);
        let mut out = ZMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

pub struct SnfResult {
    /// Diagonal matrix `d = u * a * v` with non-negative entries in a
    /// divisibility chain.
    pub d: ZMat,
    pub u: ZMat,
    pub uinv: ZMat,
    pub v: ZMat,
    pub vinv: ZMat,
    pub rank: usize,
}

struct SnfCalc {
    a: ZMat,
    u: ZMat,
    uinv: ZMat,
    v: ZMat,
    vinv: ZMat,
}

impl SnfCalc {
    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        for j in 0..self.a.cols {
            self.a.data.swap(i * self.a.cols + j, k * self.a.cols + j);
        }
        for j in 0..self.u.cols {
            self.u.data.swap(i * self.u.cols + j, k * self.u.cols + j);
        }
        // uinv <- uinv * swap (column swap)
        for r in 0..self.uinv.rows {
            self.uinv.data.swap(r * self.uinv.cols + i, r * self.uinv.cols + k);
        }
    }

    fn swap_cols(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        for r in 0..self.a.rows {
            self.a.data.swap(r * self.a.cols + i, r * self.a.cols + k);
        }
        for r in 0..self.v.rows {
            self.v.data.swap(r * self.v.cols + i, r * self.v.cols + k);
        }
        for j in 0..self.vinv.cols {
            self.vinv.data.swap(i * self.vinv.cols + j, k * self.vinv.cols + j);
        }
    }

    /// row_i += c * row_k
    fn add_row(&mut self, i: usize, k: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.a.cols {
            let v = self.a.at(i, j) + c * self.a.at(k, j);
            self.a.set(i, j, v);
        }
        for j in 0..self.u.cols {
            let v = self.u.at(i, j) + c * self.u.at(k, j);
            self.u.set(i, j, v);
        }
        // uinv <- uinv * (row op)^{-1}: column op col_k -= c * col_i
        for r in 0..self.uinv.rows {
            let v = self.uinv.at(r, k) - c * self.uinv.at(r, i);
            self.uinv.set(r, k, v);
        }
    }

    /// col_j += c * col_k
    fn add_col(&mut self, j: usize, k: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for r in 0..self.a.rows {
            let v = self.a.at(r, j) + c * self.a.at(r, k);
            self.a.set(r, j, v);
        }
        for r in 0..self.v.rows {
            let v = self.v.at(r, j) + c * self.v.at(r, k);
            self.v.set(r, j, v);
        }
        for jj in 0..self.vinv.cols {
            let v = self.vinv.at(k, jj) - c * self.vinv.at(j, jj);
            self.vinv.set(k, jj, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.a.cols {
            let v = -self.a.at(i, j);
            self.a.set(i, j, v);
        }
        for j in 0..self.u.cols {
            let v = -self.u.at(i, j);
            self.u.set(i, j, v);
        }
        for r in 0..self.uinv.rows {
            let v = -self.uinv.at(r, i);
            self.uinv.set(r, i, v);
        }
    }
}

/// Smith normal form with transforms: `u * a * v = d`.
pub fn smith(a: &ZMat) -> SnfResult {
    let mut c = SnfCalc {
        a: a.clone(),
        u: ZMat::identity(a.rows),
        uinv: ZMat::identity(a.rows),
        v: ZMat::identity(a.cols),
        vinv: ZMat::identity(a.cols),
    };
    let (rows, cols) = (a.rows, a.cols);
    let mut t = 0usize;
    while t < rows.min(cols) {
        // minimal |entry| pivot in the trailing submatrix
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !c.a.at(i, j).is_zero()
                    && best.map_or(true, |(bi, bj)| c.a.at(i, j).abs() < c.a.at(bi, bj).abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        c.swap_rows(t, bi);
        c.swap_cols(t, bj);
        'pivot: loop {
            // clear column t by row operations
            for i in t + 1..rows {
                if !c.a.at(i, t).is_zero() {
                    let q = -(c.a.at(i, t).div_floor(c.a.at(t, t)));
                    c.add_row(i, t, &q);
                    if !c.a.at(i, t).is_zero() {
                        // remainder became the smaller pivot candidate
                        c.swap_rows(t, i);
                        continue 'pivot;
                    }
                }
            }
            // clear row t by column operations
            for j in t + 1..cols {
                if !c.a.at(t, j).is_zero() {
                    let q = -(c.a.at(t, j).div_floor(c.a.at(t, t)));
                    c.add_col(j, t, &q);
                    if !c.a.at(t, j).is_zero() {
                        c.swap_cols(t, j);
                        continue 'pivot;
                    }
                }
            }
            // divisibility of the trailing block by the pivot
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(c.a.at(i, j) % c.a.at(t, t)).is_zero() {
                        c.add_row(t, i, &BigInt::one());
                        continue 'pivot;
                    }
                }
            }
            break;
        }
        if c.a.at(t, t).is_negative() {
            c.negate_row(t);
        }
        t += 1;
    }
    let rank = (0..rows.min(cols)).take_while(|&i| !c.a.at(i, i).is_zero()).count();
    SnfResult { d: c.a, u: c.u, uinv: c.uinv, v: c.v, vinv: c.vinv, rank }
}

/// Basis of `{v : v * A = 0}` as rows (a saturated lattice basis).
pub fn kernel(a: &ZMat) -> ZMat {
    let s = smith(a);
    let mut rows = Vec::new();
    for i in s.rank..a.rows {
        rows.push(s.u.row(i).to_vec());
    }
    hermite_span(&ZMat::from_rows(a.rows, rows))
}

/// Solve `x * A = b` over Z.
pub fn solve(a: &ZMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), a.cols);
    let s = smith(a);
    // w * D = b * V, then x = w * U
    let bv: Vec<BigInt> = (0..a.cols)
        .map(|j| (0..a.cols).map(|k| &b[k] * s.v.at(k, j)).sum())
        .collect();
    let mut w = vec![BigInt::zero(); a.rows];
    for j in 0..a.cols {
        if j < s.rank {
            let d = s.d.at(j, j);
            if (&bv[j] % d).is_zero() {
                w[j] = &bv[j] / d;
            } else {
                return None;
            }
        } else if !bv[j].is_zero() {
            return None;
        }
    }
    let x: Vec<BigInt> =
        (0..a.rows).map(|j| (0..a.rows).map(|k| &w[k] * s.u.at(k, j)).sum()).collect();
    Some(x)
}

/// Canonical Hermite-style row form of the row span: rows sorted by pivot
/// column, positive pivots, entries above each pivot reduced into `[0, pivot)`.
/// Two integer matrices have equal row span iff their forms are equal.
pub fn hermite_span(a: &ZMat) -> ZMat {
    let cols = a.cols;
    // (pivot column, row)
    let mut ech: Vec<(usize, Vec<BigInt>)> = Vec::new();
    let insert = |mut v: Vec<BigInt>, ech: &mut Vec<(usize, Vec<BigInt>)>| {
        loop {
            let Some(j) = v.iter().position(|x| !x.is_zero()) else { return };
            match ech.binary_search_by(|(p, _)| p.cmp(&j)) {
                Err(pos) => {
                    if v[j].is_negative() {
                        for x in v.iter_mut() {
                            *x = -&*x;
                        }
                    }
                    ech.insert(pos, (j, v));
                    return;
                }
                Ok(pos) => {
                    let d = ech[pos].1[j].clone();
                    if (&v[j] % &d).is_zero() {
                        let q = &v[j] / &d;
                        for (x, y) in v.iter_mut().zip(&ech[pos].1) {
                            *x -= &q * y;
                        }
                    } else {
                        let eg = d.extended_gcd(&v[j]);
                        let (g, s, t) = (eg.gcd, eg.x, eg.y);
                        let old = ech[pos].1.clone();
                        let mut new_row: Vec<BigInt> = old
                            .iter()
                            .zip(&v)
                            .map(|(x, y)| &s * x + &t * y)
                            .collect();
                        let (fd, fv) = (&d / &g, &v[j] / &g);
                        let rep: Vec<BigInt> =
                            old.iter().zip(&v).map(|(x, y)| fd.clone() * y - fv.clone() * x).collect();
                        if new_row[j].is_negative() {
                            for x in new_row.iter_mut() {
                                *x = -&*x;
                            }
                        }
                        ech[pos].1 = new_row;
                        v = rep;
                    }
                }
            }
        }
    };
    for i in 0..a.rows {
        insert(a.row(i).to_vec(), &mut ech);
    }
    // reduce entries above pivots
    for p in 0..ech.len() {
        let (col, prow) = (ech[p].0, ech[p].1.clone());
        let d = prow[col].clone();
        for r in 0..p {
            let q = ech[r].1[col].div_floor(&d);
            if !q.is_zero() {
                for (x, y) in ech[r].1.iter_mut().zip(&prow) {
                    *x -= &q * y;
                }
            }
        }
    }
    ZMat::from_rows(cols, ech.into_iter().map(|(_, v)| v).collect())
}

/// Membership of `b` in the row span of the canonical form `h`.
pub fn span_contains(h: &ZMat, b: &[BigInt]) -> bool {
    let mut v = b.to_vec();
    for i in 0..h.rows {
        let j = h.row(i).iter().position(|x| !x.is_zero()).unwrap();
        if !v[j].is_zero() {
            if (&v[j] % h.at(i, j)).is_zero() {
                let q = &v[j] / h.at(i, j);
                for (x, y) in v.iter_mut().zip(h.row(i)) {
                    *x -= &q * y;
                }
            } else {
                return false;
            }
        }
    }
    v.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zmat(rows: &[&[i64]]) -> ZMat {
        let cols = rows.first().map_or(0, |r| r.len());
        ZMat::from_rows(
            cols,
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        )
    }

    #[test]
    fn smith_examples() {
        // [[2,4],[6,8]] -> diag(2,4)
        let a = zmat(&[&[2, 4], &[6, 8]]);
        let s = smith(&a);
        assert_eq!(s.d.at(0, 0), &BigInt::from(2));
        assert_eq!(s.d.at(1, 1), &BigInt::from(4));
        assert_eq!(s.rank, 2);
        // u*a*v = d and u*uinv = id, v*vinv = id
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.uinv), ZMat::identity(2));
        assert_eq!(s.v.mul(&s.vinv), ZMat::identity(2));
        // identity -> identity
        let id = ZMat::identity(3);
        let s = smith(&id);
        assert_eq!(s.d, id);
        // zero -> zero
        let z = ZMat::zero(2, 3);
        let s = smith(&z);
        assert!(s.d.is_zero());
        assert_eq!(s.rank, 0);
    }

    #[test]
    fn smith_divisibility_chain() {
        let a = zmat(&[&[4, 0], &[0, 6]]);
        let s = smith(&a);
        assert_eq!(s.d.at(0, 0), &BigInt::from(2));
        assert_eq!(s.d.at(1, 1), &BigInt::from(12));
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn kernel_examples() {
        // A = [[2,4]]: kernel of v*A over Z^1... use [[2],[4]] stacked: v*(2,4)^T
        // spec example: A = [[2,4]] over Z has kernel spanned by [2,-1] acting on rows of A^T;
        // in our row convention take A with 2 rows: rows (2),(4): {(a,b): 2a+4b=0} = span{(2,-1)}
        let a = zmat(&[&[2], &[4]]);
        let k = kernel(&a);
        assert_eq!(k.rows, 1);
        let g = k.row(0);
        assert!(g == [BigInt::from(2), BigInt::from(-1)] || g == [BigInt::from(-2), BigInt::from(1)]);
        // identity: kernel 0
        let k = kernel(&ZMat::identity(3));
        assert_eq!(k.rows, 0);
    }

    #[test]
    fn solve_examples() {
        let a = zmat(&[&[2, 0], &[0, 3]]);
        let b = [BigInt::from(4), BigInt::from(9)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(3)]);
        assert!(solve(&a, &[BigInt::from(1), BigInt::from(0)]).is_none());
    }

    #[test]
    fn hermite_canonical() {
        let a = zmat(&[&[2, 4], &[6, 8]]);
        let b = zmat(&[&[2, 4], &[4, 4], &[6, 8]]); // same span
        assert_eq!(hermite_span(&a), hermite_span(&b));
        let h = hermite_span(&a);
        assert!(span_contains(&h, &[BigInt::from(8), BigInt::from(12)]));
        assert!(!span_contains(&h, &[BigInt::from(1), BigInt::from(0)]));
    }
}
