//! Exact matrix normal forms and finitely presented module classification.
//!
//! Everything uses the row convention: vectors are rows, a homomorphism
//! `R^g -> R^h` is a `g x h` matrix `A` acting by `v * A`, and composition is
//! left-to-right matrix multiplication.  Normal forms dispatch per ring kind:
//! Smith over Z, Gauss over the fields, Howell over Z/N; finite algebras are
//! flattened to their base Z/N before any normal form.

pub mod qq;
pub mod zn;
pub mod zz;

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{Payload, Ring, RingElem, RingSpec};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Payload>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {} [", self.rows, self.cols, self.ring)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(ring: &Ring, rows: usize, cols: usize) -> Matrix {
        let z = ring.zero().payload_clone();
        Matrix { ring: ring.clone(), rows, cols, data: vec![z; rows * cols] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Matrix {
        let mut m = Matrix::zero(ring, n, n);
        let one = ring.one();
        for i in 0..n {
            m.set(i, i, one.clone());
        }
        m
    }

    pub fn from_fn(ring: &Ring, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RingElem) -> Matrix {
        let mut m = Matrix::zero(ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(ring: &Ring, cols: usize, rows: Vec<Vec<RingElem>>) -> Matrix {
        let r = rows.len();
        let mut m = Matrix::zero(ring, r, cols);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (j, e) in row.into_iter().enumerate() {
                m.set(i, j, e);
            }
        }
        m
    }

    /// Convenience constructor from integer literals.
    pub fn from_i64(ring: &Ring, rows: &[&[i64]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_fn(ring, rows.len(), cols, |i, j| ring.from_i64(rows[i][j]))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> RingElem {
        RingElem::from_payload(&self.ring, self.data[i * self.cols + j].clone())
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElem) {
        assert!(v.ring() == &self.ring, "ring mismatch in Matrix::set");
        self.data[i * self.cols + j] = v.payload_clone();
    }

    pub fn row_vec(&self, i: usize) -> Vec<RingElem> {
        (0..self.cols).map(|j| self.at(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|p| RingElem::payload_is_zero(p))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.ring, self.cols, self.rows, |i, j| self.at(j, i))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in Matrix::mul");
        assert!(self.ring == other.ring);
        let mut out = Matrix::zero(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j).add(&a.mul(&other.at(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| self.at(i, j).add(&other.at(i, j)))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| self.at(i, j).sub(&other.at(i, j)))
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| self.at(i, j).neg())
    }

    pub fn scale(&self, c: &RingElem) -> Matrix {
        Matrix::from_fn(&self.ring, self.rows, self.cols, |i, j| self.at(i, j).mul(c))
    }

    /// Vertical stack: rows of `self` above rows of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { ring: self.ring.clone(), rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Horizontal stack.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(&self.ring, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j)
            } else {
                other.at(i, j - self.cols)
            }
        })
    }

    pub fn block_diag(blocks: &[&Matrix], ring: &Ring) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zero(ring, rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(ro + i, co + j, b.at(i, j));
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        m
    }

    /// Kronecker product with index convention `(a, b) -> a * other.rows + b`
    /// on rows (and similarly on columns).
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zero(&self.ring, self.rows * other.rows, self.cols * other.cols);
        for a in 0..self.rows {
            for b in 0..other.rows {
                for c in 0..self.cols {
                    for d in 0..other.cols {
                        let v = self.at(a, c).mul(&other.at(b, d));
                        m.set(a * other.rows + b, c * other.cols + d, v);
                    }
                }
            }
        }
        m
    }

    pub fn take_rows(&self, range: std::ops::Range<usize>) -> Matrix {
        Matrix::from_fn(&self.ring, range.len(), self.cols, |i, j| self.at(range.start + i, j))
    }

    pub fn take_cols(&self, range: std::ops::Range<usize>) -> Matrix {
        Matrix::from_fn(&self.ring, self.rows, range.len(), |i, j| self.at(i, range.start + j))
    }

    // ---- raw engine views ------------------------------------------------

    pub(crate) fn to_zn(&self) -> zn::ZnMat {
        let n = self.ring.modulus().expect("to_zn on a non-residue ring");
        let data = self
            .data
            .iter()
            .map(|p| match p {
                Payload::Res(v) => *v,
                _ => unreachable!(),
            })
            .collect();
        zn::ZnMat::new(n, self.rows, self.cols, data)
    }

    pub(crate) fn from_zn(ring: &Ring, m: &zn::ZnMat) -> Matrix {
        Matrix {
            ring: ring.clone(),
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&v| Payload::Res(v)).collect(),
        }
    }

    /// Flatten a finite-algebra matrix to base-ring data.  Rows of the result
    /// are indexed by (row, basis) pairs, columns by (col, basis) pairs, so a
    /// flattened coordinate row `(c_{i,b})` represents `v_i = sum_b c_ib e_b`.
    pub(crate) fn to_zn_flat(&self) -> zn::ZnMat {
        let (base, k) = self.ring.algebra_shape().expect("to_zn_flat on a non-algebra ring");
        let mut out = zn::ZnMat::zero(base, self.rows * k, self.cols * k);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.at(i, j);
                if e.is_zero() {
                    continue;
                }
                let act = e.action_rows(); // act[b*k + c] = coeff of e_c in e * e_b
                for b in 0..k {
                    for c in 0..k {
                        out.data[(i * k + b) * (self.cols * k) + (j * k + c)] = act[b * k + c];
                    }
                }
            }
        }
        out
    }

    pub(crate) fn from_zn_flat(ring: &Ring, m: &zn::ZnMat) -> Matrix {
        let (_, k) = ring.algebra_shape().unwrap();
        assert_eq!(m.cols % k, 0);
        let cols = m.cols / k;
        Matrix::from_fn(ring, m.rows, cols, |i, j| {
            let coeffs: Vec<i64> = (0..k).map(|b| m.data[i * m.cols + j * k + b] as i64).collect();
            ring.from_tuple(&coeffs).unwrap()
        })
    }

    /// Flatten a row vector over a finite algebra to base coordinates.
    pub(crate) fn flatten_vec(ring: &Ring, v: &[RingElem]) -> Vec<u64> {
        let (_, k) = ring.algebra_shape().unwrap();
        let mut out = vec![0u64; v.len() * k];
        for (i, e) in v.iter().enumerate() {
            let Payload::Alg(cs) = &e.payload else { unreachable!() };
            out[i * k..(i + 1) * k].copy_from_slice(cs);
        }
        out
    }

    pub(crate) fn unflatten_vec(ring: &Ring, v: &[u64]) -> Vec<RingElem> {
        let (_, k) = ring.algebra_shape().unwrap();
        v.chunks(k).map(|c| ring.from_tuple(&c.iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap()).collect()
    }

    pub(crate) fn to_z(&self) -> zz::ZMat {
        let data = self
            .data
            .iter()
            .map(|p| match p {
                Payload::Int(v) => v.clone(),
                _ => unreachable!(),
            })
            .collect();
        zz::ZMat::new(self.rows, self.cols, data)
    }

    pub(crate) fn from_z(ring: &Ring, m: &zz::ZMat) -> Matrix {
        Matrix {
            ring: ring.clone(),
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|v| Payload::Int(v.clone())).collect(),
        }
    }

    pub(crate) fn to_q(&self) -> qq::QMat {
        let data = self
            .data
            .iter()
            .map(|p| match p {
                Payload::Rat(v) => v.clone(),
                _ => unreachable!(),
            })
            .collect();
        qq::QMat { rows: self.rows, cols: self.cols, data }
    }

    pub(crate) fn from_q(ring: &Ring, m: &qq::QMat) -> Matrix {
        Matrix {
            ring: ring.clone(),
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|v| Payload::Rat(v.clone())).collect(),
        }
    }

    // ---- normal forms ----------------------------------------------------

    /// Generators of the left kernel `{v : v * A = 0}` (canonical form).
    pub fn kernel(&self) -> Matrix {
        let k = match self.ring.spec() {
            RingSpec::IntegersModN(_) | RingSpec::PrimeField(_) => {
                Matrix::from_zn(&self.ring, &zn::kernel(&self.to_zn()))
            }
            RingSpec::FiniteAlgebra { .. } => {
                Matrix::from_zn_flat(&self.ring, &zn::kernel(&self.to_zn_flat()))
            }
            RingSpec::Integers => Matrix::from_z(&self.ring, &zz::kernel(&self.to_z())),
            RingSpec::Rationals => Matrix::from_q(&self.ring, &qq::kernel(&self.to_q())),
        };
        debug_assert!(k.rows == 0 || k.mul(self).is_zero());
        k
    }

    /// Canonical form of the row span; equal spans give equal forms.
    pub fn canonical_span(&self) -> Matrix {
        match self.ring.spec() {
            RingSpec::IntegersModN(_) | RingSpec::PrimeField(_) => {
                Matrix::from_zn(&self.ring, &zn::howell(&self.to_zn()))
            }
            RingSpec::FiniteAlgebra { .. } => {
                // R-span flattens to the base span of all basis multiples,
                // which to_zn_flat's (row, basis)-indexed rows already are.
                Matrix::from_zn_flat(&self.ring, &zn::howell(&self.to_zn_flat()))
            }
            RingSpec::Integers => Matrix::from_z(&self.ring, &zz::hermite_span(&self.to_z())),
            RingSpec::Rationals => Matrix::from_q(&self.ring, &qq::canonical_span(&self.to_q())),
        }
    }

    /// Solve `x * A = b`.
    pub fn solve_row(&self, b: &[RingElem]) -> Option<Vec<RingElem>> {
        self.solver().solve(b)
    }

    /// Prepared solver for repeated queries against the rows of this matrix.
    pub fn solver(&self) -> SpanSolver {
        let inner = match self.ring.spec() {
            RingSpec::IntegersModN(_) | RingSpec::PrimeField(_) => {
                let mut red = zn::Reducer::reduce_matrix(&self.to_zn());
                red.close();
                SolverInner::Zn(red)
            }
            RingSpec::FiniteAlgebra { .. } => {
                let mut red = zn::Reducer::reduce_matrix(&self.to_zn_flat());
                red.close();
                SolverInner::Zn(red)
            }
            RingSpec::Integers => SolverInner::Z(Box::new(zz::smith(&self.to_z())), self.to_z()),
            RingSpec::Rationals => SolverInner::Q(qq::rref(&self.to_q())),
        };
        SpanSolver { ring: self.ring.clone(), rows: self.rows, cols: self.cols, inner }
    }
}

enum SolverInner {
    Zn(zn::Reducer),
    Z(Box<zz::SnfResult>, zz::ZMat),
    Q(qq::Rref),
}

/// Prepared row-reduction of a matrix `A`, answering membership of vectors in
/// the row span and producing combination coefficients.
pub struct SpanSolver {
    ring: Ring,
    rows: usize,
    cols: usize,
    inner: SolverInner,
}

impl SpanSolver {
    pub fn solve(&self, b: &[RingElem]) -> Option<Vec<RingElem>> {
        assert_eq!(b.len(), self.cols);
        match &self.inner {
            SolverInner::Zn(red) => {
                let vb: Vec<u64> = match self.ring.spec() {
                    RingSpec::FiniteAlgebra { .. } => Matrix::flatten_vec(&self.ring, b),
                    _ => b
                        .iter()
                        .map(|e| match &e.payload {
                            Payload::Res(v) => *v,
                            _ => unreachable!(),
                        })
                        .collect(),
                };
                let coeffs = red.solve(&vb)?;
                Some(match self.ring.spec() {
                    RingSpec::FiniteAlgebra { .. } => Matrix::unflatten_vec(&self.ring, &coeffs),
                    _ => coeffs.iter().map(|&v| RingElem::from_payload(&self.ring, Payload::Res(v))).collect(),
                })
            }
            SolverInner::Z(snf, a) => {
                let vb: Vec<BigInt> = b
                    .iter()
                    .map(|e| match &e.payload {
                        Payload::Int(v) => v.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                let x = zz_solve_with(snf, a, &vb)?;
                Some(x.into_iter().map(|v| RingElem::from_payload(&self.ring, Payload::Int(v))).collect())
            }
            SolverInner::Q(r) => {
                let vb: Vec<BigRational> = b
                    .iter()
                    .map(|e| match &e.payload {
                        Payload::Rat(v) => v.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                let x = r.solve(&vb)?;
                Some(x.into_iter().map(|v| RingElem::from_payload(&self.ring, Payload::Rat(v))).collect())
            }
        }
    }

    pub fn contains(&self, b: &[RingElem]) -> bool {
        self.solve(b).is_some()
    }

    pub fn contains_all_rows(&self, m: &Matrix) -> bool {
        (0..m.rows()).all(|i| self.contains(&m.row_vec(i)))
    }

    pub fn source_rows(&self) -> usize {
        self.rows
    }
}

fn zz_solve_with(s: &zz::SnfResult, a: &zz::ZMat, b: &[BigInt]) -> Option<Vec<BigInt>> {
    // w * D = b * V, x = w * U
    let bv: Vec<BigInt> = (0..a.cols).map(|j| (0..a.cols).map(|k| &b[k] * s.v.at(k, j)).sum()).collect();
    let mut w = vec![BigInt::zero(); a.rows];
    for j in 0..a.cols {
        if j < s.rank.min(a.rows) {
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
    Some((0..a.rows).map(|j| (0..a.rows).map(|k| &w[k] * s.u.at(k, j)).sum()).collect())
}

// ---- spec-level operations ------------------------------------------------

/// Smith normal form `U * A * V = D` over Z or a field.  Over fields the
/// diagonal has 0/1 pivots.
pub fn smith_normal_form(a: &Matrix) -> Result<(Matrix, Matrix, Matrix)> {
    match a.ring().spec() {
        RingSpec::Integers => {
            let s = zz::smith(&a.to_z());
            Ok((
                Matrix::from_z(a.ring(), &s.u),
                Matrix::from_z(a.ring(), &s.d),
                Matrix::from_z(a.ring(), &s.v),
            ))
        }
        RingSpec::Rationals | RingSpec::PrimeField(_) => Ok(field_smith(a)),
        _ => Err(Error::UnsupportedRing(format!("smith_normal_form over {}", a.ring()))),
    }
}

/// Gaussian two-sided reduction over a field: `U * A * V = D`, 0/1 pivots.
fn field_smith(a: &Matrix) -> (Matrix, Matrix, Matrix) {
    let ring = a.ring().clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::identity(&ring, rows);
    let mut v = Matrix::identity(&ring, cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // find pivot
        let mut piv = None;
        'search: for i in t..rows {
            for j in t..cols {
                if !d.at(i, j).is_zero() {
                    piv = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        // swap into place
        if pi != t {
            for j in 0..cols {
                let (x, y) = (d.at(t, j), d.at(pi, j));
                d.set(t, j, y);
                d.set(pi, j, x);
            }
            for j in 0..rows {
                let (x, y) = (u.at(t, j), u.at(pi, j));
                u.set(t, j, y);
                u.set(pi, j, x);
            }
        }
        if pj != t {
            for i in 0..rows {
                let (x, y) = (d.at(i, t), d.at(i, pj));
                d.set(i, t, y);
                d.set(i, pj, x);
            }
            for i in 0..cols {
                let (x, y) = (v.at(i, t), v.at(i, pj));
                v.set(i, t, y);
                v.set(i, pj, x);
            }
        }
        let inv = d.at(t, t).inverse().expect("field pivot invertible");
        for j in 0..cols {
            d.set(t, j, d.at(t, j).mul(&inv));
        }
        for j in 0..rows {
            u.set(t, j, u.at(t, j).mul(&inv));
        }
        for i in 0..rows {
            if i != t {
                let c = d.at(i, t);
                if !c.is_zero() {
                    for j in 0..cols {
                        let x = d.at(i, j).sub(&c.mul(&d.at(t, j)));
                        d.set(i, j, x);
                    }
                    for j in 0..rows {
                        let x = u.at(i, j).sub(&c.mul(&u.at(t, j)));
                        u.set(i, j, x);
                    }
                }
            }
        }
        for j in t + 1..cols {
            let c = d.at(t, j);
            if !c.is_zero() {
                for i in 0..rows {
                    let x = d.at(i, j).sub(&c.mul(&d.at(i, t)));
                    d.set(i, j, x);
                }
                for i in 0..cols {
                    let x = v.at(i, j).sub(&c.mul(&v.at(i, t)));
                    v.set(i, j, x);
                }
            }
        }
        t += 1;
    }
    (u, d, v)
}

/// Canonical Howell form over Z/N (or a flattened finite algebra).
pub fn howell_form(a: &Matrix) -> Result<Matrix> {
    match a.ring().spec() {
        RingSpec::IntegersModN(_) | RingSpec::PrimeField(_) | RingSpec::FiniteAlgebra { .. } => {
            Ok(a.canonical_span())
        }
        _ => Err(Error::UnsupportedRing(format!("howell_form over {}", a.ring()))),
    }
}

/// `(kernel generators, image generators)` of `v -> v * A`.
pub fn kernel_image(a: &Matrix) -> (Matrix, Matrix) {
    (a.kernel(), a.canonical_span())
}

/// Solve `x * A = b`.
pub fn solve_linear(a: &Matrix, b: &[RingElem]) -> Option<Vec<RingElem>> {
    a.solve_row(b)
}

// ---- finitely presented modules --------------------------------------------

/// A finitely presented module `R^gens / rowspan(rels)` with a list of named
/// endomorphism matrices (such as the actions of adjoined variables).
#[derive(Clone)]
pub struct FpModule {
    ring: Ring,
    gens: usize,
    rels: Matrix,
    ops: Vec<(String, Matrix)>,
    rel_solver: Option<Arc<SpanSolver>>,
}

impl fmt::Debug for FpModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpModule(gens={}, rels={}x{}, over {})", self.gens, self.rels.rows(), self.rels.cols(), self.ring)
    }
}

impl PartialEq for FpModule {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.gens == other.gens
            && self.rels.canonical_span() == other.rels.canonical_span()
    }
}

impl FpModule {
    pub fn new(ring: &Ring, gens: usize, rels: Matrix, ops: Vec<(String, Matrix)>) -> Result<FpModule> {
        if rels.cols() != gens && !(rels.rows() == 0) {
            return Err(Error::DimensionMismatch(format!(
                "relations have {} columns for {} generators",
                rels.cols(),
                gens
            )));
        }
        let rels = if rels.rows() == 0 { Matrix::zero(ring, 0, gens) } else { rels };
        let rel_solver =
            if rels.rows() > 0 { Some(Arc::new(rels.solver())) } else { None };
        let m = FpModule { ring: ring.clone(), gens, rels, ops: Vec::new(), rel_solver };
        let mut m = m;
        for (name, op) in ops {
            m.push_op(name, op)?;
        }
        Ok(m)
    }

    pub fn free(ring: &Ring, gens: usize) -> FpModule {
        FpModule::new(ring, gens, Matrix::zero(ring, 0, gens), Vec::new()).unwrap()
    }

    /// Add a named operator; it must map relations into the relation span.
    pub fn push_op(&mut self, name: String, op: Matrix) -> Result<()> {
        if op.rows() != self.gens || op.cols() != self.gens {
            return Err(Error::DimensionMismatch("operator shape".into()));
        }
        if !self.maps_rels_into(&op, self) {
            return Err(Error::NotAModuleMap);
        }
        self.ops.push((name, op));
        Ok(())
    }

    /// Does `f` (gens x target.gens) send our relations into `target`'s span?
    pub fn maps_rels_into(&self, f: &Matrix, target: &FpModule) -> bool {
        if self.rels.rows() == 0 {
            return true;
        }
        let image = self.rels.mul(f);
        target.contains_rows_in_rels(&image)
    }

    fn contains_rows_in_rels(&self, m: &Matrix) -> bool {
        match &self.rel_solver {
            None => m.is_zero(),
            Some(s) => s.contains_all_rows(m),
        }
    }

    /// Is the row `v` zero in the quotient?
    pub fn is_zero_elem(&self, v: &[RingElem]) -> bool {
        match &self.rel_solver {
            None => v.iter().all(|e| e.is_zero()),
            Some(s) => s.contains(v),
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn gens(&self) -> usize {
        self.gens
    }
    pub fn rels(&self) -> &Matrix {
        &self.rels
    }
    pub fn ops(&self) -> &[(String, Matrix)] {
        &self.ops
    }
    pub fn op(&self, name: &str) -> Option<&Matrix> {
        self.ops.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }
    pub fn is_free_presentation(&self) -> bool {
        self.rels.rows() == 0
    }
    pub fn rel_solver(&self) -> Option<&SpanSolver> {
        self.rel_solver.as_deref()
    }

    /// `M^k` with block-diagonal relations and operators.
    pub fn power(&self, k: usize) -> FpModule {
        let rels = {
            let blocks: Vec<&Matrix> = std::iter::repeat(&self.rels).take(k).collect();
            Matrix::block_diag(&blocks, &self.ring)
        };
        let ops = self
            .ops
            .iter()
            .map(|(n, m)| {
                let blocks: Vec<&Matrix> = std::iter::repeat(m).take(k).collect();
                (n.clone(), Matrix::block_diag(&blocks, &self.ring))
            })
            .collect();
        FpModule::new(&self.ring, self.gens * k, rels, ops).unwrap()
    }

    pub fn direct_sum(&self, other: &FpModule) -> FpModule {
        assert!(self.ring == other.ring);
        let rels = Matrix::block_diag(&[&self.rels, &other.rels], &self.ring);
        // operators are only kept when both sides carry the same names
        let ops = self
            .ops
            .iter()
            .filter_map(|(n, m)| {
                other.op(n).map(|m2| (n.clone(), Matrix::block_diag(&[m, m2], &self.ring)))
            })
            .collect();
        FpModule::new(&self.ring, self.gens + other.gens, rels, ops).unwrap()
    }

    /// Quotient by additional relation rows.
    pub fn quotient(&self, extra: &Matrix) -> FpModule {
        let rels = self.rels.vstack(extra);
        FpModule::new(&self.ring, self.gens, rels, self.ops.clone()).unwrap()
    }

    /// Classification of the quotient module.
    pub fn classify(&self) -> ModuleClassification {
        classify_module(self)
    }

    pub fn cardinality(&self) -> Option<BigUint> {
        self.classify().cardinality
    }

    /// Canonical coset representatives of all elements (finite modules only).
    pub fn enumerate(&self, limit: u64) -> Result<Vec<Vec<RingElem>>> {
        let card = self.cardinality().ok_or(Error::InfiniteRing)?;
        if card > BigUint::from(limit) {
            return Err(Error::TooLarge(format!("module has {} elements", card)));
        }
        let ring_elems = self.ring.elements()?;
        let total = (ring_elems.len() as u128).checked_pow(self.gens as u32);
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        if total.is_none() || total.unwrap() > 1 << 26 {
            return Err(Error::TooLarge("generator coordinate space too large to enumerate".into()));
        }
        let mut idx = vec![0usize; self.gens];
        loop {
            let v: Vec<RingElem> = idx.iter().map(|&i| ring_elems[i].clone()).collect();
            let r = self.reduce(&v);
            let key: Vec<String> = r.iter().map(|e| e.to_string()).collect();
            if seen.insert(key) {
                out.push(r);
            }
            let mut i = 0;
            loop {
                if i == self.gens {
                    return Ok(out);
                }
                idx[i] += 1;
                if idx[i] < ring_elems.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    /// Canonical coset representative of `v`.
    pub fn reduce(&self, v: &[RingElem]) -> Vec<RingElem> {
        if self.rels.rows() == 0 {
            return v.to_vec();
        }
        reduce_mod_span(&self.rels.canonical_span(), v)
    }
}

/// Greedy reduction of `v` modulo the row span of `h`; the result is a
/// canonical coset representative.
pub fn reduce_mod_span(h: &Matrix, v: &[RingElem]) -> Vec<RingElem> {
    let ring = h.ring().clone();
    match ring.spec() {
        RingSpec::IntegersModN(_) | RingSpec::PrimeField(_) => {
            let hm = zn::howell(&h.to_zn());
            let n = hm.n;
            let mut w: Vec<u64> = v
                .iter()
                .map(|e| match &e.payload {
                    Payload::Res(x) => *x,
                    _ => unreachable!(),
                })
                .collect();
            for i in 0..hm.rows {
                let row = hm.row(i);
                let j = row.iter().position(|&x| x != 0).unwrap();
                let d = row[j];
                let q = w[j] / d;
                if q != 0 {
                    for (x, &y) in w.iter_mut().zip(row) {
                        *x = crate::arith::submod(*x, crate::arith::mulmod(q, y, n), n);
                    }
                }
            }
            w.into_iter().map(|x| RingElem::from_payload(&ring, Payload::Res(x))).collect()
        }
        RingSpec::FiniteAlgebra { .. } => {
            let hm = zn::howell(&h.to_zn_flat());
            let n = hm.n;
            let mut w = Matrix::flatten_vec(&ring, v);
            for i in 0..hm.rows {
                let row = hm.row(i);
                let j = row.iter().position(|&x| x != 0).unwrap();
                let d = row[j];
                let q = w[j] / d;
                if q != 0 {
                    for (x, &y) in w.iter_mut().zip(row) {
                        *x = crate::arith::submod(*x, crate::arith::mulmod(q, y, n), n);
                    }
                }
            }
            Matrix::unflatten_vec(&ring, &w)
        }
        RingSpec::Integers => {
            let hm = zz::hermite_span(&h.to_z());
            let mut w: Vec<BigInt> = v
                .iter()
                .map(|e| match &e.payload {
                    Payload::Int(x) => x.clone(),
                    _ => unreachable!(),
                })
                .collect();
            for i in 0..hm.rows {
                let row = hm.row(i);
                let j = row.iter().position(|x| !x.is_zero()).unwrap();
                let q = num_integer::Integer::div_floor(&w[j], &row[j]);
                if !q.is_zero() {
                    for (x, y) in w.iter_mut().zip(row) {
                        *x -= &q * y;
                    }
                }
            }
            w.into_iter().map(|x| RingElem::from_payload(&ring, Payload::Int(x))).collect()
        }
        RingSpec::Rationals => {
            let hm = qq::canonical_span(&h.to_q());
            let mut w: Vec<BigRational> = v
                .iter()
                .map(|e| match &e.payload {
                    Payload::Rat(x) => x.clone(),
                    _ => unreachable!(),
                })
                .collect();
            for i in 0..hm.rows {
                let row = hm.row(i);
                let j = row.iter().position(|x| !x.is_zero()).unwrap();
                let c = w[j].clone();
                if !c.is_zero() {
                    for (x, y) in w.iter_mut().zip(row) {
                        *x = &*x - &(&c * y);
                    }
                }
            }
            w.into_iter().map(|x| RingElem::from_payload(&ring, Payload::Rat(x))).collect()
        }
    }
}

// ---- classification ---------------------------------------------------------

/// Canonical value of a finitely presented module: free rank, torsion
/// invariant factors (divisibility chain, rendered as element literals), and
/// the cardinality when finite.  Finite-algebra modules are classified over
/// their flattened base ring Z/baseN.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleClassification {
    pub free_rank: usize,
    pub torsion: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cardinality: Option<BigUint>,
}

impl ModuleClassification {
    pub fn zero() -> Self {
        ModuleClassification { free_rank: 0, torsion: Vec::new(), cardinality: Some(BigUint::one()) }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for ModuleClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("free^{}", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("C{}", t));
        }
        if parts.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", parts.join("+"))?;
        }
        if let Some(c) = &self.cardinality {
            write!(f, " (|{}|)", c)?;
        }
        Ok(())
    }
}

/// Invariant-factor classification of `coker(rels)`.
pub fn classify_module(m: &FpModule) -> ModuleClassification {
    let gens = m.gens();
    let rels = m.rels();
    match m.ring().spec() {
        RingSpec::Rationals => {
            let rank = qq::rank(&rels.to_q());
            ModuleClassification { free_rank: gens - rank, torsion: Vec::new(), cardinality: None }
        }
        RingSpec::PrimeField(p) => {
            let h = zn::howell(&rels.to_zn());
            let rank = h.rows;
            let fr = gens - rank;
            ModuleClassification {
                free_rank: fr,
                torsion: Vec::new(),
                cardinality: Some(BigUint::from(*p).pow(fr as u32)),
            }
        }
        RingSpec::Integers => {
            let s = zz::smith(&rels.to_z());
            let mut torsion = Vec::new();
            let mut card = BigUint::one();
            for i in 0..s.rank {
                let d = s.d.at(i, i);
                if !d.is_one() {
                    torsion.push(d.to_string());
                }
                card *= d.to_biguint().unwrap();
            }
            let free_rank = gens - s.rank;
            let cardinality = if free_rank == 0 { Some(card) } else { None };
            ModuleClassification { free_rank, torsion, cardinality }
        }
        RingSpec::IntegersModN(n) => {
            classification_from_invariants(zn::cokernel_invariants(&rels.to_zn()), *n, gens)
        }
        RingSpec::FiniteAlgebra { base_n, rank, .. } => {
            let flat = rels.to_zn_flat();
            let flat = zn::ZnMat { n: flat.n, rows: flat.rows, cols: gens * rank, data: flat.data };
            let inv = zn::cokernel_invariants(&flat);
            // classified over the flattened base: no free summands reported
            let mut card = BigUint::one();
            for &d in &inv {
                card *= BigUint::from(d);
            }
            let torsion = inv.iter().map(|d| d.to_string()).collect();
            let _ = base_n;
            ModuleClassification { free_rank: 0, torsion, cardinality: Some(card) }
        }
    }
}

fn classification_from_invariants(inv: Vec<u64>, n: u64, _gens: usize) -> ModuleClassification {
    let mut card = BigUint::one();
    for &d in &inv {
        card *= BigUint::from(d);
    }
    let free_rank = inv.iter().filter(|&&d| d == n).count();
    let torsion = inv.iter().filter(|&&d| d != n).map(|d| d.to_string()).collect();
    ModuleClassification { free_rank, torsion, cardinality: Some(card) }
}

// ---- subquotient machinery ---------------------------------------------------

/// Generators of `{v in R^g : v * A in rowspan(target_rels)}`.
pub fn kernel_mod(a: &Matrix, target_rels: Option<&Matrix>) -> Matrix {
    match target_rels {
        None => a.kernel(),
        Some(s) if s.rows() == 0 => a.kernel(),
        Some(s) => {
            let stacked = a.vstack(s);
            let k = stacked.kernel();
            k.take_cols(0..a.rows()).canonical_span()
        }
    }
}

/// Coefficients `C` with `B = C * A (mod rowspan(rels))`, when every row of
/// `B` factors.
pub fn factor_through(b: &Matrix, a: &Matrix, rels: Option<&Matrix>) -> Option<Matrix> {
    let ring = a.ring().clone();
    let stacked = match rels {
        Some(s) if s.rows() > 0 => a.vstack(s),
        _ => a.clone(),
    };
    let solver = stacked.solver();
    let mut out = Matrix::zero(&ring, b.rows(), a.rows());
    for i in 0..b.rows() {
        let x = solver.solve(&b.row_vec(i))?;
        for j in 0..a.rows() {
            out.set(i, j, x[j].clone());
        }
    }
    Some(out)
}

/// Presentation of the submodule of `ambient` generated by the rows of
/// `gens`, together with the inclusion matrix (which is `gens` itself).
pub fn submodule_presentation(ambient: &FpModule, gens: &Matrix) -> (FpModule, Matrix) {
    assert_eq!(gens.cols(), ambient.gens());
    let rels = kernel_mod(gens, Some(ambient.rels()));
    let mut sub = FpModule::new(ambient.ring(), gens.rows(), rels, Vec::new()).unwrap();
    // induce the ambient operators when they restrict
    for (name, op) in ambient.ops() {
        let moved = gens.mul(op);
        if let Some(c) = factor_through(&moved, gens, Some(ambient.rels())) {
            let _ = sub.push_op(name.clone(), c);
        }
    }
    (sub, gens.clone())
}

// ---- Hom modules ---------------------------------------------------------------

/// `Hom_R(M, N)` as a finitely presented module: elements are `gens(M) x
/// gens(N)` matrices sending relations into relations, modulo those with
/// image inside `N`'s relation span.  `ops` optionally imposes equivariance
/// constraints `P . F = F . Q (mod rels_N)` for operator pairs `(P, Q)`.
pub struct HomModule {
    pub module: FpModule,
    /// Representative matrices for the generators.
    pub basis: Vec<Matrix>,
    vec_basis: Matrix,
    trivial: Matrix,
}

pub fn hom_module(m: &FpModule, n: &FpModule, ops: &[(Matrix, Matrix)]) -> HomModule {
    let ring = m.ring().clone();
    let (gm, gn) = (m.gens(), n.gens());
    let dim = gm * gn;
    // constraints: rows of rel_M times F land in span(rel_N)
    let mut constraint = m.rels().transpose().kron(&Matrix::identity(&ring, gn));
    let mut target_rels = {
        let blocks: Vec<&Matrix> = std::iter::repeat(n.rels()).take(m.rels().rows()).collect();
        Matrix::block_diag(&blocks, &ring)
    };
    for (p, q) in ops {
        let c = p
            .transpose()
            .kron(&Matrix::identity(&ring, gn))
            .sub(&Matrix::identity(&ring, gm).kron(q));
        constraint = constraint.hstack(&c);
        let blocks: Vec<&Matrix> = std::iter::repeat(n.rels()).take(gm).collect();
        target_rels = Matrix::block_diag(&[&target_rels, &Matrix::block_diag(&blocks, &ring)], &ring);
    }
    let k = if constraint.cols() == 0 {
        Matrix::identity(&ring, dim).canonical_span()
    } else {
        kernel_mod(&constraint, Some(&target_rels))
    };
    // trivial homs: image contained in span(rel_N)
    let trivial = Matrix::identity(&ring, gm).kron(n.rels());
    let rels = kernel_mod(&k, Some(&trivial));
    let module = FpModule::new(&ring, k.rows(), rels, Vec::new()).unwrap();
    let basis = (0..k.rows())
        .map(|i| {
            Matrix::from_fn(&ring, gm, gn, |a, b| k.at(i, a * gn + b))
        })
        .collect();
    HomModule { module, basis, vec_basis: k, trivial }
}

impl HomModule {
    /// Coordinates of a hom matrix in the chosen generators; `None` when it
    /// is not a valid hom element.
    pub fn express(&self, f: &Matrix) -> Option<Vec<RingElem>> {
        let ring = f.ring().clone();
        let gn = if self.basis.is_empty() { f.cols() } else { self.basis[0].cols() };
        let v: Vec<RingElem> =
            (0..f.rows()).flat_map(|a| (0..gn).map(move |b| (a, b))).map(|(a, b)| f.at(a, b)).collect();
        let row = Matrix::from_rows(&ring, v.len(), vec![v]);
        if self.vec_basis.rows() == 0 {
            // only the zero module: valid iff f is trivial
            let solver = self.trivial.solver();
            return solver.contains(&row.row_vec(0)).then(Vec::new);
        }
        let c = factor_through(&row, &self.vec_basis, Some(&self.trivial))?;
        Some(c.row_vec(0))
    }

    /// The hom matrix represented by a coordinate row.
    pub fn realize(&self, coords: &[RingElem]) -> Matrix {
        assert_eq!(coords.len(), self.basis.len());
        let ring = self.module.ring().clone();
        let (gm, gn) = if self.basis.is_empty() {
            (0, 0)
        } else {
            (self.basis[0].rows(), self.basis[0].cols())
        };
        let mut out = Matrix::zero(&ring, gm, gn);
        for (c, b) in coords.iter().zip(&self.basis) {
            out = out.add(&b.scale(c));
        }
        out
    }
}

#[cfg(test)]
mod tests;
