//! Koszul chain and cochain complexes, their two constructions (iterated
//! cone/fibre and exterior algebra), power transitions, change of sequence,
//! and the torsion/quotient maps of the one-element case.
//!
//! Basis bookkeeping: the iterated constructions label their slots by index
//! subsets.  At step `k` the cone puts the subsets containing `k` first, the
//! fibre puts them last; the exterior construction uses lexicographic order
//! of the index tuples.  Signed permutations between the bases are produced
//! explicitly and validated.

use std::collections::BTreeMap;

use crate::complex::{cone, fibre, hom_complex, ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::linalg::{factor_through, FpModule, Matrix};
use crate::ring::{Ring, RingElem};

/// A system of elements `x_1, ..., x_r` of one ring.
#[derive(Clone, Debug)]
pub struct SequenceContext {
    ring: Ring,
    elements: Vec<RingElem>,
}

impl SequenceContext {
    pub fn new(ring: &Ring, elements: Vec<RingElem>) -> Result<SequenceContext> {
        if elements.is_empty() {
            return Err(Error::DimensionMismatch("sequence must have length >= 1".into()));
        }
        for e in &elements {
            if e.ring() != ring {
                return Err(Error::DimensionMismatch("sequence element from a different ring".into()));
            }
        }
        Ok(SequenceContext { ring: ring.clone(), elements })
    }

    pub fn parse(ring: &Ring, literals: &[&str]) -> Result<SequenceContext> {
        let elements = literals.iter().map(|s| ring.parse_element(s)).collect::<Result<_>>()?;
        SequenceContext::new(ring, elements)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn elements(&self) -> &[RingElem] {
        &self.elements
    }
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The sequence of `n`-th powers (uniform exponent).
    pub fn powers(&self, n: u64) -> Vec<RingElem> {
        self.elements.iter().map(|x| x.pow(n)).collect()
    }
}

// ---- subset bookkeeping ----------------------------------------------------

/// Subsets of `{1..r}` of size `d` in lexicographic order of index tuples,
/// as bit masks (bit `i-1` for element `i`).
pub(crate) fn lex_subsets(r: usize, d: usize) -> Vec<u32> {
    fn go(r: usize, d: usize, start: usize, acc: u32, out: &mut Vec<u32>) {
        if d == 0 {
            out.push(acc);
            return;
        }
        for i in start..=r {
            go(r, d - 1, i + 1, acc | (1 << (i - 1)), out);
        }
    }
    let mut out = Vec::new();
    if d <= r {
        go(r, d, 1, 0, &mut out);
    }
    out
}

/// Degree-`d` slot labels of the `r`-fold iterated cone (subsets containing
/// the newest element first).
pub(crate) fn cone_subsets(r: usize, d: usize) -> Vec<u32> {
    if r == 0 {
        return if d == 0 { vec![0] } else { vec![] };
    }
    let mut out: Vec<u32> = if d >= 1 {
        cone_subsets(r - 1, d - 1).into_iter().map(|s| s | (1 << (r - 1))).collect()
    } else {
        Vec::new()
    };
    out.extend(cone_subsets(r - 1, d));
    out
}

/// Degree-`-d` slot labels of the `r`-fold iterated fibre (subsets without
/// the newest element first).
pub(crate) fn fibre_subsets(r: usize, d: usize) -> Vec<u32> {
    if r == 0 {
        return if d == 0 { vec![0] } else { vec![] };
    }
    let mut out = fibre_subsets(r - 1, d);
    if d >= 1 {
        out.extend(fibre_subsets(r - 1, d - 1).into_iter().map(|s| s | (1 << (r - 1))));
    }
    out
}

fn subset_elems(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

// ---- iterated constructions -------------------------------------------------

/// `K_.(x^(powers); X)` built iteratively as cones, degrees `[X.lo, X.hi + r]`.
pub fn koszul_chain_on_complex(ctx: &SequenceContext, x: &ChainComplex, powers: &[u64]) -> ChainComplex {
    assert_eq!(powers.len(), ctx.len());
    let mut c = x.clone();
    for (xi, &n) in ctx.elements().iter().zip(powers) {
        let mu = ChainMap::scalar(&c, &xi.pow(n));
        c = cone(&mu).0;
    }
    c
}

/// `K_.(x^(powers); M)` for a module `M` in degree 0.
pub fn koszul_chain(ctx: &SequenceContext, m: &FpModule, powers: &[u64]) -> ChainComplex {
    koszul_chain_on_complex(ctx, &ChainComplex::from_module(m, 0), powers)
}

/// `K^.(x^(powers); X)` built iteratively as fibres, stored homologically in
/// degrees `[X.lo - r, X.hi]` (cohomological degree `i` = homological `-i`).
pub fn koszul_cochain_on_complex(ctx: &SequenceContext, x: &ChainComplex, powers: &[u64]) -> ChainComplex {
    assert_eq!(powers.len(), ctx.len());
    let mut c = x.clone();
    for (xi, &n) in ctx.elements().iter().zip(powers) {
        let mu = ChainMap::scalar(&c, &xi.pow(n));
        c = fibre(&mu).0;
    }
    c
}

pub fn koszul_cochain(ctx: &SequenceContext, m: &FpModule, powers: &[u64]) -> ChainComplex {
    koszul_cochain_on_complex(ctx, &ChainComplex::from_module(m, 0), powers)
}

// ---- exterior construction ---------------------------------------------------

/// Exterior-algebra Koszul chain complex of commuting generator-level
/// operators on `module`: degree-`d` term is `module^(C(r,d))` with slots in
/// lexicographic subset order, and
/// `d(e_S ⊗ v) = sum_j (-1)^(j+1) e_(S - i_j) ⊗ op_(i_j)(v)`.
pub fn koszul_operators_chain(module: &FpModule, ops: &[Matrix]) -> Result<ChainComplex> {
    let ring = module.ring().clone();
    let r = ops.len();
    let g = module.gens();
    for op in ops {
        if op.rows() != g || op.cols() != g {
            return Err(Error::DimensionMismatch("operator shape".into()));
        }
    }
    let terms: Vec<FpModule> = (0..=r).map(|d| module.power(binom(r, d))).collect();
    let mut diffs = Vec::new();
    for d in 1..=r {
        let src = lex_subsets(r, d);
        let tgt = lex_subsets(r, d - 1);
        let tgt_pos: BTreeMap<u32, usize> = tgt.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut m = Matrix::zero(&ring, src.len() * g, tgt.len() * g);
        for (si, &s) in src.iter().enumerate() {
            for (j, i_j) in subset_elems(s).into_iter().enumerate() {
                let t = s & !(1 << (i_j - 1));
                let ti = tgt_pos[&t];
                let block = if j % 2 == 0 { ops[i_j - 1].clone() } else { ops[i_j - 1].neg() };
                for a in 0..g {
                    for b in 0..g {
                        let v = block.at(a, b);
                        if !v.is_zero() {
                            m.set(si * g + a, ti * g + b, v);
                        }
                    }
                }
            }
        }
        diffs.push(m);
    }
    ChainComplex::new(&ring, 0, terms, diffs)
}

/// Exterior-algebra Koszul cochain complex of operators, stored in
/// homological degrees `[-r, 0]` with slots in lexicographic subset order:
/// `d(δ_S ⊗ v) = (-1)^|S| sum_(t ∉ S) (-1)^(pos(t, S+t)+1) δ_(S+t) ⊗ op_t(v)`.
///
/// The sign is chosen so that `Hom(this complex over the free module, M)`
/// is the operator chain complex on the nose under the evaluation pairing.
pub fn koszul_operators_cochain(module: &FpModule, ops: &[Matrix]) -> Result<ChainComplex> {
    let ring = module.ring().clone();
    let r = ops.len();
    let g = module.gens();
    let terms: Vec<FpModule> = (0..=r).rev().map(|d| module.power(binom(r, d))).collect();
    let mut diffs = Vec::new();
    // terms[k] is degree -r + k, i.e. subset size r - k; differential out of
    // degree n = -d goes to degree -d - 1 (subset size d + 1).
    for d in (0..r).rev() {
        // map: size-d slots  ->  size-(d+1) slots
        let src = lex_subsets(r, d);
        let tgt = lex_subsets(r, d + 1);
        let tgt_pos: BTreeMap<u32, usize> = tgt.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut m = Matrix::zero(&ring, src.len() * g, tgt.len() * g);
        for (si, &s) in src.iter().enumerate() {
            for t in 1..=r {
                if s & (1 << (t - 1)) != 0 {
                    continue;
                }
                let u = s | (1 << (t - 1));
                let ti = tgt_pos[&u];
                let pos = subset_elems(u).into_iter().position(|e| e == t).unwrap() + 1;
                let negate = (d + pos + 1) % 2 != 0; // (-1)^d * (-1)^(pos+1)
                let block = if negate { ops[t - 1].neg() } else { ops[t - 1].clone() };
                for a in 0..g {
                    for b in 0..g {
                        let v = block.at(a, b);
                        if !v.is_zero() {
                            m.set(si * g + a, ti * g + b, v);
                        }
                    }
                }
            }
        }
        diffs.push(m);
    }
    ChainComplex::new(&ring, -(r as i64), terms, diffs)
}

pub(crate) fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Scalar multiplication operators `x_i^(n_i) * id` for the exterior builders.
fn scalar_ops(ctx: &SequenceContext, m: &FpModule, powers: &[u64]) -> Vec<Matrix> {
    ctx.elements()
        .iter()
        .zip(powers)
        .map(|(x, &n)| Matrix::identity(m.ring(), m.gens()).scale(&x.pow(n)))
        .collect()
}

/// Exterior Koszul chain complex of `x^(powers)` on `M` together with the
/// explicit isomorphism onto the iterated-cone model: a signed permutation
/// with per-degree sign `(-1)^(C(d,2))`.
pub fn koszul_exterior(ctx: &SequenceContext, m: &FpModule, powers: &[u64]) -> Result<(ChainComplex, ChainMap)> {
    let ext = koszul_operators_chain(m, &scalar_ops(ctx, m, powers))?;
    let cone_model = koszul_chain(ctx, m, powers);
    let r = ctx.len();
    let g = m.gens();
    let ring = ctx.ring().clone();
    let mut comps = BTreeMap::new();
    for d in 0..=r {
        let lex = lex_subsets(r, d);
        let cones = cone_subsets(r, d);
        let cone_pos: BTreeMap<u32, usize> = cones.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut mat = Matrix::zero(&ring, lex.len() * g, cones.len() * g);
        let sign = (d * (d.saturating_sub(1)) / 2) % 2 != 0;
        let one = if sign { ring.one().neg() } else { ring.one() };
        for (li, &s) in lex.iter().enumerate() {
            let ci = cone_pos[&s];
            for a in 0..g {
                mat.set(li * g + a, ci * g + a, one.clone());
            }
        }
        comps.insert(d as i64, mat);
    }
    let iso = ChainMap::new(ext.clone(), cone_model, comps)?;
    Ok((ext, iso))
}

// ---- transitions and change of sequence --------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KoszulVariant {
    Chain,
    Cochain,
}

/// Power transition morphisms for uniform exponents `m >= n >= 1`:
/// chain variant `K_.(x^(m); M) -> K_.(x^(n); M)`, cochain variant
/// `K^.(x^(n); M) -> K^.(x^(m); M)`.  Degree components are the exterior
/// powers of the diagonal matrix with entries `x_i^(m-n)`.
pub fn koszul_transition(
    ctx: &SequenceContext,
    module: &FpModule,
    m: usize,
    n: usize,
    variant: KoszulVariant,
) -> Result<ChainMap> {
    if m < n || n < 1 {
        return Err(Error::BadExponents { m, n });
    }
    let r = ctx.len();
    let g = module.gens();
    let ring = ctx.ring().clone();
    let diff_pow = (m - n) as u64;
    let slot_scalar = |s: u32| -> RingElem {
        let mut acc = ring.one();
        for i in subset_elems(s) {
            acc = acc.mul(&ctx.elements()[i - 1].pow(diff_pow));
        }
        acc
    };
    match variant {
        KoszulVariant::Chain => {
            let src = koszul_chain(ctx, module, &vec![m as u64; r]);
            let tgt = koszul_chain(ctx, module, &vec![n as u64; r]);
            let mut comps = BTreeMap::new();
            for d in 0..=r {
                let slots = cone_subsets(r, d);
                let mut mat = Matrix::zero(&ring, slots.len() * g, slots.len() * g);
                for (i, &s) in slots.iter().enumerate() {
                    let c = slot_scalar(s);
                    for a in 0..g {
                        mat.set(i * g + a, i * g + a, c.clone());
                    }
                }
                comps.insert(d as i64, mat);
            }
            ChainMap::new(src, tgt, comps)
        }
        KoszulVariant::Cochain => {
            let src = koszul_cochain(ctx, module, &vec![n as u64; r]);
            let tgt = koszul_cochain(ctx, module, &vec![m as u64; r]);
            let mut comps = BTreeMap::new();
            for d in 0..=r {
                let slots = fibre_subsets(r, d);
                let mut mat = Matrix::zero(&ring, slots.len() * g, slots.len() * g);
                for (i, &s) in slots.iter().enumerate() {
                    let c = slot_scalar(s);
                    for a in 0..g {
                        mat.set(i * g + a, i * g + a, c.clone());
                    }
                }
                comps.insert(-(d as i64), mat);
            }
            ChainMap::new(src, tgt, comps)
        }
    }
}

/// Is the square matrix invertible over its ring?
pub fn is_invertible(a: &Matrix) -> bool {
    a.rows() == a.cols()
        && a.canonical_span() == Matrix::identity(a.ring(), a.rows()).canonical_span()
        && factor_through(&Matrix::identity(a.ring(), a.rows()), a, None).is_some()
}

/// Change of sequence: for `y = x * A` with `A` invertible, the isomorphism
/// `K_.(y; M) -> K_.(x; M)` whose degree-`d` component is the d-th exterior
/// power of `A` (minor matrices), transported to the iterated-cone bases.
pub fn change_of_sequence(
    ctx_x: &SequenceContext,
    ctx_y: &SequenceContext,
    a: &Matrix,
    module: &FpModule,
) -> Result<ChainMap> {
    let r = ctx_x.len();
    if ctx_y.len() != r || a.rows() != r || a.cols() != r {
        return Err(Error::DimensionMismatch("change-of-sequence shape".into()));
    }
    if !is_invertible(a) {
        return Err(Error::NotInvertible);
    }
    // verify y_j = sum_i x_i A[i][j]
    for j in 0..r {
        let mut acc = ctx_x.ring().zero();
        for i in 0..r {
            acc = acc.add(&ctx_x.elements()[i].mul(&a.at(i, j)));
        }
        if acc != ctx_y.elements()[j] {
            return Err(Error::SequenceMismatch);
        }
    }
    let ring = ctx_x.ring().clone();
    let g = module.gens();
    let ones = vec![1u64; r];
    let src = koszul_chain(ctx_y, module, &ones);
    let tgt = koszul_chain(ctx_x, module, &ones);
    let mut comps = BTreeMap::new();
    for d in 0..=r {
        let src_slots = cone_subsets(r, d);
        let tgt_slots = cone_subsets(r, d);
        // signed-permutation conjugation of the lex-basis exterior power: the
        // per-degree sign is global on both sides and cancels, leaving minors.
        let mut mat = Matrix::zero(&ring, src_slots.len() * g, tgt_slots.len() * g);
        for (si, &s) in src_slots.iter().enumerate() {
            for (ti, &t) in tgt_slots.iter().enumerate() {
                let v = minor(a, &subset_elems(t), &subset_elems(s));
                if !v.is_zero() {
                    for x in 0..g {
                        mat.set(si * g + x, ti * g + x, v.clone());
                    }
                }
            }
        }
        comps.insert(d as i64, mat);
    }
    ChainMap::new(src, tgt, comps)
}

/// Determinant of the submatrix on the given 1-based rows/columns.
fn minor(a: &Matrix, rows: &[usize], cols: &[usize]) -> RingElem {
    let ring = a.ring().clone();
    let k = rows.len();
    if k != cols.len() {
        return ring.zero();
    }
    if k == 0 {
        return ring.one();
    }
    // Laplace expansion along the first row; k <= 3 at desk scale
    let mut det = ring.zero();
    for (pos, &c) in cols.iter().enumerate() {
        let sub_rows: Vec<usize> = rows[1..].to_vec();
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = a.at(rows[0] - 1, c - 1).mul(&minor(a, &sub_rows, &sub_cols));
        det = if pos % 2 == 0 { det.add(&term) } else { det.sub(&term) };
    }
    det
}

// ---- torsion and quotient maps (one element) ----------------------------------

/// For one element `x` and a complex `X`, the inclusion of the shifted
/// annihilator subcomplex into `K_.(x; X)` and the termwise surjection onto
/// `X/xX`.  Their composite is zero; the homology-level two-term exact
/// sequences are checked by the callers.
pub fn torsion_and_quotient_maps(x: &RingElem, c: &ChainComplex) -> Result<(ChainMap, ChainMap)> {
    let ring = c.ring().clone();
    let k = {
        let ctx = SequenceContext::new(&ring, vec![x.clone()])?;
        koszul_chain_on_complex(&ctx, c, &[1])
    };
    // annihilator subcomplex
    let mut ann_terms = Vec::new();
    let mut incls = Vec::new();
    for n in c.degrees() {
        let term = c.term_or_zero(n);
        let (sub, incl) = crate::complex::annihilator_submodule(&term, x);
        ann_terms.push(sub);
        incls.push(incl);
    }
    let mut ann_diffs = Vec::new();
    for (idx, n) in c.degrees().enumerate() {
        if idx == 0 {
            continue;
        }
        let moved = incls[idx].mul(&c.diff(n));
        let dn = factor_through(&moved, &incls[idx - 1], c.term(n - 1).map(|t| t.rels()))
            .expect("differential preserves the annihilator");
        ann_diffs.push(dn);
    }
    let ann = ChainComplex::new(&ring, c.lo(), ann_terms.clone(), ann_diffs)?.shift(1);
    // inclusion into the X-part slot of the cone: K_n = X_{n-1} ⊕ X_n
    let mut inc_comps = BTreeMap::new();
    for n in ann.degrees() {
        let gx = c.gens_at(n - 1);
        let _ = gx;
        let idx = (n - 1 - c.lo()) as usize;
        let sub_gens = ann.gens_at(n);
        let mut m = Matrix::zero(&ring, sub_gens, k.gens_at(n));
        if idx < incls.len() {
            let inc = &incls[idx];
            for i in 0..inc.rows() {
                for j in 0..inc.cols() {
                    m.set(i, j, inc.at(i, j));
                }
            }
        }
        inc_comps.insert(n, m);
    }
    let incl = ChainMap::new(ann, k.clone(), inc_comps)?;
    // surjection onto X/xX on the Y-part slot
    let mut q_terms = Vec::new();
    for n in c.degrees() {
        let term = c.term_or_zero(n);
        let xi = Matrix::identity(&ring, term.gens()).scale(x);
        q_terms.push(term.quotient(&xi));
    }
    let q_diffs: Vec<Matrix> = c.degrees().skip(1).map(|n| c.diff(n)).collect();
    let q = ChainComplex::new(&ring, c.lo(), q_terms, q_diffs)?;
    let mut s_comps = BTreeMap::new();
    for n in k.degrees() {
        let gx = c.gens_at(n - 1);
        let gy = c.gens_at(n);
        let mut m = Matrix::zero(&ring, gx + gy, q.gens_at(n));
        if q.gens_at(n) == gy {
            for i in 0..gy {
                m.set(gx + i, i, ring.one());
            }
        }
        s_comps.insert(n, m);
    }
    let surj = ChainMap::new(k, q, s_comps)?;
    Ok((incl, surj))
}

// ---- Hom-duality ---------------------------------------------------------------

/// The explicit isomorphism `Hom(K_.(x^(p); R), M) -> K^.(x^(p); M)`
/// between the Hom-dual of the free Koszul chain complex and the iterated
/// fibre cochain model.  Signed permutation; signs follow the recursion
/// `Hom(cone(μ), M) ≅ fibre(Hom(μ, M))` with sign `(-1)^(n+1)` on the slots
/// that contain the newest element.
pub fn hom_dual_iso(ctx: &SequenceContext, powers: &[u64], m: &FpModule) -> Result<ChainMap> {
    let ring = ctx.ring().clone();
    let r = ctx.len();
    let free = FpModule::free(&ring, 1);
    let kchain = koszul_chain(ctx, &free, powers);
    let src = hom_complex(&kchain, &ChainComplex::from_module(m, 0))?;
    let tgt = koszul_cochain(ctx, m, powers);
    let g = m.gens();
    // sign sigma(S, n): recursion over the largest element of S
    fn sigma(mask: u32, n: i64) -> i64 {
        if mask == 0 {
            return 1;
        }
        let k = 31 - mask.leading_zeros();
        let rest = mask & !(1 << k);
        let sgn = if (n + 1) % 2 == 0 { 1 } else { -1 };
        sgn * sigma(rest, n + 1)
    }
    let mut comps = BTreeMap::new();
    for d in 0..=r {
        let n = -(d as i64);
        let hom_slots = cone_subsets(r, d);
        let fib_slots = fibre_subsets(r, d);
        let fib_pos: BTreeMap<u32, usize> = fib_slots.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut mat = Matrix::zero(&ring, hom_slots.len() * g, fib_slots.len() * g);
        for (hi, &s) in hom_slots.iter().enumerate() {
            let fi = fib_pos[&s];
            let v = if sigma(s, n) > 0 { ring.one() } else { ring.one().neg() };
            for a in 0..g {
                mat.set(hi * g + a, fi * g + a, v.clone());
            }
        }
        comps.insert(n, mat);
    }
    ChainMap::new(src, tgt, comps)
}


/// Power transition on the exterior models: chain variant
/// `K_.(x^(m); M) -> K_.(x^(n); M)`, cochain variant
/// `K^.(x^(n); M) -> K^.(x^(m); M)`; degree-`d` blocks are diagonal with the
/// slot scalars `prod_(i in S) x_i^(m-n)`.
pub fn exterior_power_transition(
    ctx: &SequenceContext,
    module: &FpModule,
    m: usize,
    n: usize,
    variant: KoszulVariant,
) -> Result<ChainMap> {
    if m < n || n < 1 {
        return Err(Error::BadExponents { m, n });
    }
    let ring = ctx.ring().clone();
    let r = ctx.len();
    let g = module.gens();
    let mk = |p: usize| -> Result<ChainComplex> {
        let ops: Vec<Matrix> = ctx
            .elements()
            .iter()
            .map(|x| Matrix::identity(&ring, g).scale(&x.pow(p as u64)))
            .collect();
        match variant {
            KoszulVariant::Chain => koszul_operators_chain(module, &ops),
            KoszulVariant::Cochain => koszul_operators_cochain(module, &ops),
        }
    };
    let (src, tgt) = match variant {
        KoszulVariant::Chain => (mk(m)?, mk(n)?),
        KoszulVariant::Cochain => (mk(n)?, mk(m)?),
    };
    let mut comps = BTreeMap::new();
    for d in 0..=r {
        let slots = lex_subsets(r, d);
        let mut mat = Matrix::zero(&ring, slots.len() * g, slots.len() * g);
        for (i, &s) in slots.iter().enumerate() {
            let mut c = ring.one();
            for e in subset_elems(s) {
                c = c.mul(&ctx.elements()[e - 1].pow((m - n) as u64));
            }
            for a in 0..g {
                mat.set(i * g + a, i * g + a, c.clone());
            }
        }
        let deg = match variant {
            KoszulVariant::Chain => d as i64,
            KoszulVariant::Cochain => -(d as i64),
        };
        comps.insert(deg, mat);
    }
    ChainMap::new(src, tgt, comps)
}
