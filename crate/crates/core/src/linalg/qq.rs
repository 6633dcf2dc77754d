//! Dense exact linear algebra over Q (arbitrary-precision rationals):
//! reduced row echelon forms with transformation tracking, kernels, solving.

use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigRational>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }
    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigRational>>) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols);
            data.extend(row);
        }
        QMat { rows: r, cols, data }
    }
}

pub struct Rref {
    /// (pivot column, reduced row, combination of original rows)
    pub rows: Vec<(usize, Vec<BigRational>, Vec<BigRational>)>,
    /// combinations that reduced to zero: kernel basis
    pub zero_ts: Vec<Vec<BigRational>>,
    pub t_cols: usize,
}

/// Reduced row echelon form with transformation tracking.
pub fn rref(a: &QMat) -> Rref {
    let mut rows: Vec<(usize, Vec<BigRational>, Vec<BigRational>)> = Vec::new();
    let mut zero_ts = Vec::new();
    for i in 0..a.rows {
        let mut v = a.row(i).to_vec();
        let mut t = vec![BigRational::zero(); a.rows];
        t[i] = BigRational::one();
        loop {
            let Some(j) = v.iter().position(|x| !x.is_zero()) else {
                if t.iter().any(|x| !x.is_zero()) {
                    zero_ts.push(t);
                }
                break;
            };
            match rows.binary_search_by(|(p, _, _)| p.cmp(&j)) {
                Err(pos) => {
                    let inv = v[j].recip();
                    for x in v.iter_mut() {
                        *x = &*x * &inv;
                    }
                    for x in t.iter_mut() {
                        *x = &*x * &inv;
                    }
                    rows.insert(pos, (j, v, t));
                    break;
                }
                Ok(pos) => {
                    let c = v[j].clone();
                    let (rv, rt) = (rows[pos].1.clone(), rows[pos].2.clone());
                    for (x, y) in v.iter_mut().zip(&rv) {
                        *x = &*x - &(&c * y);
                    }
                    for (x, y) in t.iter_mut().zip(&rt) {
                        *x = &*x - &(&c * y);
                    }
                }
            }
        }
    }
    // clear entries above pivots
    for p in 0..rows.len() {
        let (col, pv, pt) = (rows[p].0, rows[p].1.clone(), rows[p].2.clone());
        for r in 0..p {
            let c = rows[r].1[col].clone();
            if !c.is_zero() {
                for (x, y) in rows[r].1.iter_mut().zip(&pv) {
                    *x = &*x - &(&c * y);
                }
                for (x, y) in rows[r].2.iter_mut().zip(&pt) {
                    *x = &*x - &(&c * y);
                }
            }
        }
    }
    Rref { rows, zero_ts, t_cols: a.rows }
}

impl Rref {
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        let mut v = b.to_vec();
        let mut coeffs = vec![BigRational::zero(); self.t_cols];
        loop {
            let Some(j) = v.iter().position(|x| !x.is_zero()) else {
                return Some(coeffs);
            };
            let pos = self.rows.binary_search_by(|(p, _, _)| p.cmp(&j)).ok()?;
            let c = v[j].clone();
            for (x, y) in v.iter_mut().zip(&self.rows[pos].1) {
                *x = &*x - &(&c * y);
            }
            for (x, y) in coeffs.iter_mut().zip(&self.rows[pos].2) {
                *x = &*x + &(&c * y);
            }
        }
    }
}

/// Canonical form of the row span (RREF rows).
pub fn canonical_span(a: &QMat) -> QMat {
    let r = rref(a);
    QMat::from_rows(a.cols, r.rows.into_iter().map(|(_, v, _)| v).collect())
}

pub fn kernel(a: &QMat) -> QMat {
    let r = rref(a);
    canonical_span(&QMat::from_rows(a.rows, r.zero_ts))
}

pub fn solve(a: &QMat, b: &[BigRational]) -> Option<Vec<BigRational>> {
    rref(a).solve(b)
}

pub fn rank(a: &QMat) -> usize {
    rref(a).rows.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(v: i64) -> BigRational {
        BigRational::from(BigInt::from(v))
    }

    #[test]
    fn rref_rank_kernel() {
        let a = QMat::from_rows(3, vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]]);
        assert_eq!(rank(&a), 2);
        let k = kernel(&a);
        assert_eq!(k.rows, 1);
        // kernel row * a = 0
        for j in 0..3 {
            let mut s = BigRational::zero();
            for i in 0..3 {
                s = &s + &(&k.row(0)[i] * a.at(i, j));
            }
            assert!(s.is_zero());
        }
    }

    #[test]
    fn solve_basic() {
        let a = QMat::from_rows(2, vec![vec![q(2), q(0)], vec![q(1), q(3)]]);
        let x = solve(&a, &[q(4), q(3)]).unwrap();
        // x * a = b
        assert_eq!(&(&x[0] * a.at(0, 0)) + &(&x[1] * a.at(1, 0)), q(4));
        assert_eq!(&(&x[0] * a.at(0, 1)) + &(&x[1] * a.at(1, 1)), q(3));
    }
}
