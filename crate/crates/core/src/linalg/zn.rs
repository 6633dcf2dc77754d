//! Dense linear algebra over Z/n with u64 entries: Howell forms with
//! transformation tracking, kernels, solving, and mod-n Smith reduction.
//!
//! Row convention throughout: vectors are rows, a map is a matrix acting by
//! `v * A`, and "span" means the row span.

use crate::arith::{addmod, gcd_u64, mulmod, submod, unit_lift, xgcd};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZnMat {
    pub n: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl ZnMat {
    pub fn new(n: u64, rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        let data = data.into_iter().map(|x| x % n).collect();
        ZnMat { n, rows, cols, data }
    }

    pub fn zero(n: u64, rows: usize, cols: usize) -> Self {
        ZnMat { n, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn from_rows(n: u64, cols: usize, rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols);
            data.extend(row.into_iter().map(|x| x % n));
        }
        ZnMat { n, rows: r, cols, data }
    }
}

/// One echelon row with its transformation record.
struct EchRow {
    pivot: usize,
    d: u64, // pivot entry, a divisor of n
    v: Vec<u64>,
    t: Vec<u64>,
}

/// Incremental Howell reduction over Z/n with combination tracking.
pub struct Reducer {
    n: u64,
    #[allow(dead_code)]
    cols: usize,
    t_cols: usize,
    rows: Vec<EchRow>, // sorted by pivot column, pivot entries normalized to divisors of n
    /// Combination rows that reduced to zero: generators of the kernel of the
    /// map (combination coefficients) -> (row space element).
    pub zero_ts: Vec<Vec<u64>>,
}

fn scale_row(v: &[u64], c: u64, n: u64) -> Vec<u64> {
    v.iter().map(|&x| mulmod(x, c, n)).collect()
}

fn sub_scaled(v: &mut [u64], w: &[u64], q: u64, n: u64) {
    if q == 0 {
        return;
    }
    for (x, &y) in v.iter_mut().zip(w) {
        *x = submod(*x, mulmod(q, y, n), n);
    }
}

fn leading(v: &[u64]) -> Option<usize> {
    v.iter().position(|&x| x != 0)
}

impl Reducer {
    pub fn new(n: u64, cols: usize, t_cols: usize) -> Self {
        Reducer { n, cols, t_cols, rows: Vec::new(), zero_ts: Vec::new() }
    }

    /// Reduce a matrix, tracking each row as a standard basis combination.
    pub fn reduce_matrix(a: &ZnMat) -> Reducer {
        let mut red = Reducer::new(a.n, a.cols, a.rows);
        for i in 0..a.rows {
            let mut t = vec![0u64; a.rows];
            t[i] = 1 % a.n;
            red.insert(a.row(i).to_vec(), t);
        }
        red.close();
        red
    }

    fn pos_for(&self, col: usize) -> std::result::Result<usize, usize> {
        self.rows.binary_search_by(|r| r.pivot.cmp(&col))
    }

    /// Insert a tracked row, reducing it against the current echelon.
    pub fn insert(&mut self, v: Vec<u64>, t: Vec<u64>) {
        let n = self.n;
        let mut v = v;
        let mut t = t;
        loop {
            let Some(j) = leading(&v) else {
                if t.iter().any(|&x| x != 0) {
                    self.zero_ts.push(t);
                }
                return;
            };
            match self.pos_for(j) {
                Err(pos) => {
                    // new pivot at column j
                    let w = unit_lift(v[j], n);
                    let v = scale_row(&v, w, n);
                    let t = scale_row(&t, w, n);
                    let d = v[j];
                    debug_assert_eq!(d, gcd_u64(d, n));
                    self.rows.insert(pos, EchRow { pivot: j, d, v: v.clone(), t: t.clone() });
                    // annihilator multiple stays in the span; feed it back in
                    let u = n / d;
                    if u % n != 0 {
                        let uv = scale_row(&v, u % n, n);
                        let ut = scale_row(&t, u % n, n);
                        self.insert(uv, ut);
                    }
                    return;
                }
                Ok(pos) => {
                    let d = self.rows[pos].d;
                    if v[j] % d == 0 {
                        let q = v[j] / d;
                        let (rv, rt) = (self.rows[pos].v.clone(), self.rows[pos].t.clone());
                        sub_scaled(&mut v, &rv, q, n);
                        sub_scaled(&mut t, &rt, q, n);
                        debug_assert_eq!(v[j], 0);
                    } else {
                        // gcd-combine: unimodular 2x2 on (pivot row, v)
                        let a = d;
                        let b = v[j];
                        let (g, x, y) = xgcd(a as i128, b as i128);
                        let g = g as u64;
                        let x = x.rem_euclid(n as i128) as u64;
                        let y = y.rem_euclid(n as i128) as u64;
                        let old_v = self.rows[pos].v.clone();
                        let old_t = self.rows[pos].t.clone();
                        let mut new_v = scale_row(&old_v, x, n);
                        let mut new_t = scale_row(&old_t, x, n);
                        for (p, &q) in new_v.iter_mut().zip(&v) {
                            *p = addmod(*p, mulmod(y, q, n), n);
                        }
                        for (p, &q) in new_t.iter_mut().zip(&t) {
                            *p = addmod(*p, mulmod(y, q, n), n);
                        }
                        let mut rep_v = scale_row(&v, (a / g) % n, n);
                        let mut rep_t = scale_row(&t, (a / g) % n, n);
                        sub_scaled(&mut rep_v, &old_v, (b / g) % n, n);
                        sub_scaled(&mut rep_t, &old_t, (b / g) % n, n);
                        // normalize the improved pivot row
                        let w = unit_lift(new_v[j], n);
                        let new_v = scale_row(&new_v, w, n);
                        let new_t = scale_row(&new_t, w, n);
                        let nd = new_v[j];
                        self.rows[pos] = EchRow { pivot: j, d: nd, v: new_v.clone(), t: new_t.clone() };
                        let u = n / nd;
                        if u % n != 0 {
                            self.insert(scale_row(&new_v, u % n, n), scale_row(&new_t, u % n, n));
                        }
                        debug_assert_eq!(rep_v[j], 0);
                        v = rep_v;
                        t = rep_t;
                    }
                }
            }
        }
    }

    /// Run the annihilator-closure to a fixpoint so the echelon satisfies the
    /// Howell property and `zero_ts` generates the full kernel.
    pub fn close(&mut self) {
        loop {
            let snapshot: Vec<(u64, Vec<u64>, Vec<u64>)> =
                self.rows.iter().map(|r| (r.d, r.v.clone(), r.t.clone())).collect();
            let before: Vec<(usize, u64)> = self.rows.iter().map(|r| (r.pivot, r.d)).collect();
            for (d, v, t) in snapshot {
                let u = (self.n / d) % self.n;
                if u != 0 {
                    self.insert(scale_row(&v, u, self.n), scale_row(&t, u, self.n));
                }
            }
            let after: Vec<(usize, u64)> = self.rows.iter().map(|r| (r.pivot, r.d)).collect();
            if before == after {
                break;
            }
        }
    }

    /// Canonicalize: entries above each pivot reduced modulo the pivot.
    fn canonicalize(&mut self) {
        let n = self.n;
        for p in 0..self.rows.len() {
            let (col, d, pv, pt) =
                (self.rows[p].pivot, self.rows[p].d, self.rows[p].v.clone(), self.rows[p].t.clone());
            for r in 0..p {
                let e = self.rows[r].v[col];
                let q = e / d;
                if q != 0 {
                    sub_scaled(&mut self.rows[r].v, &pv, q, n);
                    sub_scaled(&mut self.rows[r].t, &pt, q, n);
                }
            }
        }
    }

    /// The canonical Howell form (zero rows dropped).
    pub fn howell_rows(&mut self) -> Vec<Vec<u64>> {
        self.canonicalize();
        self.rows.iter().map(|r| r.v.clone()).collect()
    }

    /// Solve `x * A = b` where the reducer was built from `A`'s rows.
    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let n = self.n;
        let mut v: Vec<u64> = b.iter().map(|&x| x % n).collect();
        let mut coeffs = vec![0u64; self.t_cols];
        loop {
            let Some(j) = leading(&v) else {
                return Some(coeffs);
            };
            let pos = self.pos_for(j).ok()?;
            let d = self.rows[pos].d;
            if v[j] % d != 0 {
                return None;
            }
            let q = v[j] / d;
            sub_scaled(&mut v, &self.rows[pos].v, q, n);
            for (c, &tc) in coeffs.iter_mut().zip(&self.rows[pos].t) {
                *c = addmod(*c, mulmod(q, tc, n), n);
            }
        }
    }

    pub fn contains(&self, b: &[u64]) -> bool {
        self.solve(b).is_some()
    }
}

/// Canonical Howell form of the row span.
pub fn howell(a: &ZnMat) -> ZnMat {
    let mut red = Reducer::reduce_matrix(a);
    let rows = red.howell_rows();
    ZnMat::from_rows(a.n, a.cols, rows)
}

/// Generators of `{v : v * A = 0}`, in canonical Howell form.
pub fn kernel(a: &ZnMat) -> ZnMat {
    let red = Reducer::reduce_matrix(a);
    let ker = ZnMat::from_rows(a.n, a.rows, red.zero_ts.clone());
    howell(&ker)
}

pub fn solve(a: &ZnMat, b: &[u64]) -> Option<Vec<u64>> {
    let red = Reducer::reduce_matrix(a);
    red.solve(b)
}

pub fn mul(a: &ZnMat, b: &ZnMat) -> ZnMat {
    assert_eq!(a.cols, b.rows);
    let n = a.n;
    let mut out = ZnMat::zero(n, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik == 0 {
                continue;
            }
            for j in 0..b.cols {
                let x = out.data[i * b.cols + j];
                out.data[i * b.cols + j] = addmod(x, mulmod(aik, b.data[k * b.cols + j], n), n);
            }
        }
    }
    out
}

/// Invariant factors of the cokernel of `v -> v * A` on `(Z/n)^cols`,
/// i.e. of the module `(Z/n)^cols / rowspan(A)`.
///
/// Returns the full length-`cols` list of annihilators `d_1 | d_2 | ... | n`
/// with trivial (= 1) factors removed.
pub fn cokernel_invariants(a: &ZnMat) -> Vec<u64> {
    let n = a.n;
    let mut m = a.data.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut diag: Vec<u64> = Vec::new();
    let mut top = 0usize;
    let mut left = 0usize;
    let idx = |i: usize, j: usize| i * cols + j;
    while top < rows && left < cols {
        // find a pivot with minimal nonzero gcd with n
        let mut best: Option<(usize, usize, u64)> = None;
        for i in top..rows {
            for j in left..cols {
                let e = m[idx(i, j)];
                if e != 0 {
                    let g = gcd_u64(e, n);
                    if best.map_or(true, |(_, _, bg)| g < bg) {
                        best = Some((i, j, g));
                    }
                }
            }
        }
        let Some((bi, bj, _)) = best else { break };
        // move pivot to (top, left)
        if bi != top {
            for j in 0..cols {
                m.swap(idx(top, j), idx(bi, j));
            }
        }
        if bj != left {
            for i in 0..rows {
                m.swap(idx(i, left), idx(i, bj));
            }
        }
        loop {
            let mut dirty = false;
            // clear column below pivot
            for i in top + 1..rows {
                let e = m[idx(i, left)];
                if e == 0 {
                    continue;
                }
                let p = m[idx(top, left)];
                if e % gcd_u64(p, n) == 0 {
                    // e = q*p + r with r in (p)+(n); use q = e / p under gcd normalization
                    let w = unit_lift(p, n);
                    let d = mulmod(w, p, n);
                    // scale pivot row virtually: subtract (e/d)*w*(pivot row)
                    let q = mulmod(e / d, w, n);
                    for j in left..cols {
                        let sub = mulmod(q, m[idx(top, j)], n);
                        m[idx(i, j)] = submod(m[idx(i, j)], sub, n);
                    }
                } else {
                    let p = m[idx(top, left)];
                    let (g, x, y) = xgcd(p as i128, e as i128);
                    let g = g as u64;
                    let x = x.rem_euclid(n as i128) as u64;
                    let y = y.rem_euclid(n as i128) as u64;
                    let u = (p / g) % n;
                    let v = (e / g) % n;
                    for j in left..cols {
                        let a0 = m[idx(top, j)];
                        let b0 = m[idx(i, j)];
                        m[idx(top, j)] = addmod(mulmod(x, a0, n), mulmod(y, b0, n), n);
                        m[idx(i, j)] = submod(mulmod(u, b0, n), mulmod(v, a0, n), n);
                    }
                    dirty = true;
                }
            }
            // clear row right of pivot
            for j in left + 1..cols {
                let e = m[idx(top, j)];
                if e == 0 {
                    continue;
                }
                let p = m[idx(top, left)];
                if e % gcd_u64(p, n) == 0 {
                    let w = unit_lift(p, n);
                    let d = mulmod(w, p, n);
                    let q = mulmod(e / d, w, n);
                    for i in top..rows {
                        let sub = mulmod(q, m[idx(i, left)], n);
                        m[idx(i, j)] = submod(m[idx(i, j)], sub, n);
                    }
                } else {
                    let p = m[idx(top, left)];
                    let (g, x, y) = xgcd(p as i128, e as i128);
                    let g = g as u64;
                    let x = x.rem_euclid(n as i128) as u64;
                    let y = y.rem_euclid(n as i128) as u64;
                    let u = (p / g) % n;
                    let v = (e / g) % n;
                    for i in top..rows {
                        let a0 = m[idx(i, left)];
                        let b0 = m[idx(i, j)];
                        m[idx(i, left)] = addmod(mulmod(x, a0, n), mulmod(y, b0, n), n);
                        m[idx(i, j)] = submod(mulmod(u, b0, n), mulmod(v, a0, n), n);
                    }
                    dirty = true;
                }
            }
            let col_clear = (top + 1..rows).all(|i| m[idx(i, left)] == 0);
            let row_clear = (left + 1..cols).all(|j| m[idx(top, j)] == 0);
            if col_clear && row_clear {
                break;
            }
            let _ = dirty;
        }
        diag.push(gcd_u64(m[idx(top, left)], n));
        top += 1;
        left += 1;
    }
    // generators without a pivot are free Z/n summands (annihilator n)
    let mut invariants: Vec<u64> = diag;
    invariants.extend(std::iter::repeat(n).take(cols - invariants.len()));
    chain_normalize(&mut invariants);
    invariants.retain(|&d| d != 1);
    invariants
}

/// Normalize a multiset of annihilators (divisors of n) to a divisibility
/// chain via gcd/lcm exchanges; both operations stay divisors of n.
fn chain_normalize(ds: &mut Vec<u64>) {
    loop {
        let mut changed = false;
        for i in 0..ds.len() {
            for j in i + 1..ds.len() {
                let (a, b) = (ds[i], ds[j]);
                if b % a != 0 {
                    let g = gcd_u64(a, b);
                    let l = ((a as u128 * b as u128) / g as u128) as u64;
                    ds[i] = g;
                    ds[j] = l;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    ds.sort_unstable();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span_elements(a: &ZnMat) -> std::collections::BTreeSet<Vec<u64>> {
        // brute-force enumeration of all Z/n combinations of the rows
        let n = a.n;
        let mut out = std::collections::BTreeSet::new();
        let mut coeffs = vec![0u64; a.rows];
        loop {
            let mut v = vec![0u64; a.cols];
            for (i, &c) in coeffs.iter().enumerate() {
                for j in 0..a.cols {
                    v[j] = addmod(v[j], mulmod(c, a.row(i)[j], n), n);
                }
            }
            out.insert(v);
            let mut i = 0;
            loop {
                if i == a.rows {
                    return out;
                }
                coeffs[i] += 1;
                if coeffs[i] < n {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn howell_examples() {
        // [[2,1]] over Z/4 -> [[2,1],[0,2]]
        let a = ZnMat::from_rows(4, 2, vec![vec![2, 1]]);
        let h = howell(&a);
        assert_eq!(h.rows, 2);
        assert_eq!(h.row(0), &[2, 1]);
        assert_eq!(h.row(1), &[0, 2]);
        // identity over Z/6 -> identity
        let id = ZnMat::from_rows(6, 2, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(howell(&id), id);
        // [[2]] over Z/4 -> [[2]]
        let b = ZnMat::from_rows(4, 1, vec![vec![2]]);
        assert_eq!(howell(&b).data, vec![2]);
    }

    #[test]
    fn howell_canonical_for_equal_spans() {
        // spans {(0,0),(2,1),(0,2),(2,3)} presented two ways
        let a = ZnMat::from_rows(4, 2, vec![vec![2, 1]]);
        let b = ZnMat::from_rows(4, 2, vec![vec![2, 3], vec![0, 2]]);
        assert_eq!(span_elements(&a), span_elements(&b));
        assert_eq!(howell(&a), howell(&b));
    }

    #[test]
    fn kernel_example() {
        // A = [2] over Z/4: kernel {0,2}
        let a = ZnMat::from_rows(4, 1, vec![vec![2]]);
        let k = kernel(&a);
        assert_eq!(k.rows, 1);
        assert_eq!(k.data, vec![2]);
        // v*A = 0 check for a wider matrix
        let a = ZnMat::from_rows(12, 2, vec![vec![2, 4], vec![6, 0], vec![3, 9]]);
        let k = kernel(&a);
        for i in 0..k.rows {
            let prod = mul(&ZnMat::from_rows(12, 3, vec![k.row(i).to_vec()]), &a);
            assert!(prod.data.iter().all(|&x| x == 0));
        }
        // kernel cardinality equals brute force count
        let brute: Vec<Vec<u64>> = {
            let mut out = Vec::new();
            for v0 in 0..12u64 {
                for v1 in 0..12u64 {
                    for v2 in 0..12u64 {
                        let r0 = addmod(addmod(mulmod(v0, 2, 12), mulmod(v1, 6, 12), 12), mulmod(v2, 3, 12), 12);
                        let r1 = addmod(mulmod(v0, 4, 12), mulmod(v2, 9, 12), 12);
                        if r0 == 0 && r1 == 0 {
                            out.push(vec![v0, v1, v2]);
                        }
                    }
                }
            }
            out
        };
        let kspan = span_elements(&k);
        assert_eq!(kspan.len(), brute.len());
        for v in brute {
            assert!(kspan.contains(&v));
        }
    }

    #[test]
    fn solve_examples() {
        let a = ZnMat::from_rows(4, 1, vec![vec![2]]);
        assert_eq!(solve(&a, &[2]), Some(vec![1]));
        assert_eq!(solve(&a, &[1]), None);
        let id = ZnMat::from_rows(12, 2, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(solve(&id, &[7, 5]), Some(vec![7, 5]));
        // solution validity on a random-ish instance
        let a = ZnMat::from_rows(12, 2, vec![vec![2, 4], vec![6, 3]]);
        let b = [10, 7];
        if let Some(x) = solve(&a, &b) {
            let prod = mul(&ZnMat::from_rows(12, 2, vec![x]), &a);
            assert_eq!(prod.data, b.to_vec());
        }
    }

    #[test]
    fn cokernel_invariants_examples() {
        // (Z/4)/(2) = Z/2
        let a = ZnMat::from_rows(4, 1, vec![vec![2]]);
        assert_eq!(cokernel_invariants(&a), vec![2]);
        // full rank identity: trivial module
        let id = ZnMat::from_rows(6, 2, vec![vec![1, 0], vec![0, 1]]);
        assert!(cokernel_invariants(&id).is_empty());
        // no relations: free summands
        let empty = ZnMat::zero(12, 0, 2);
        assert_eq!(cokernel_invariants(&empty), vec![12, 12]);
        // (Z/12)^2 / span{(2,1)}: the quotient has 12 elements: (2,1) ~ gen swap
        let a = ZnMat::from_rows(12, 2, vec![vec![2, 1]]);
        let inv = cokernel_invariants(&a);
        let card: u64 = inv.iter().product();
        assert_eq!(card, 12);
    }
}
