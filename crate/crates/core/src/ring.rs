//! The supported coefficient rings and their exact element arithmetic.
//!
//! Five ring kinds are available: the rationals, prime fields, the integers,
//! Z/N, and finite commutative algebras presented by structure constants over
//! some Z/N (used for rings such as Z/4[t]/(t^2)).  Every element is kept in a
//! canonical normal form so equality and hashing are structural.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Constructor data for a ring; `Ring::new` validates it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RingSpec {
    Rationals,
    PrimeField(u64),
    Integers,
    IntegersModN(u64),
    FiniteAlgebra {
        base_n: u64,
        rank: usize,
        /// `mul_table[i][j]` is the coefficient tuple of `basis_i * basis_j`.
        mul_table: Vec<Vec<Vec<u64>>>,
        unit_index: usize,
        /// Display name, e.g. `"Z/4[t]/(t^2)"`.
        #[serde(default)]
        name: Option<String>,
    },
}

#[derive(Debug)]
pub(crate) struct RingInner {
    pub spec: RingSpec,
}

/// A validated ring handle. Cheap to clone and share across threads.
#[derive(Clone)]
pub struct Ring(pub(crate) Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({})", self)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.spec {
            RingSpec::Rationals => write!(f, "Q"),
            RingSpec::PrimeField(p) => write!(f, "F{}", p),
            RingSpec::Integers => write!(f, "Z"),
            RingSpec::IntegersModN(n) => write!(f, "Z/{}", n),
            RingSpec::FiniteAlgebra { base_n, rank, name, .. } => match name {
                Some(s) => write!(f, "{}", s),
                None => write!(f, "Z/{}-algebra(rank {})", base_n, rank),
            },
        }
    }
}

/// Canonical element payload. Internal representation; `RingElem` is the
/// public value type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Payload {
    Int(BigInt),
    Rat(BigRational),
    Res(u64),
    Alg(Vec<u64>),
}

/// An element of a [`Ring`] in canonical form.
#[derive(Clone, PartialEq, Eq)]
pub struct RingElem {
    pub(crate) ring: Ring,
    pub(crate) payload: Payload,
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Int(v) => write!(f, "{}", v),
            Payload::Rat(v) => {
                if v.denom().is_one() {
                    write!(f, "{}", v.numer())
                } else {
                    write!(f, "{}/{}", v.numer(), v.denom())
                }
            }
            Payload::Res(v) => write!(f, "{}", v),
            Payload::Alg(cs) => {
                write!(f, "[")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", c)?;
                }
                write!(f, "]")
            }
        }
    }
}

impl Ring {
    /// Validate a spec and build a ring handle.
    ///
    /// Finite-algebra axioms (commutativity, associativity, unit) are checked
    /// exhaustively on basis tuples.
    pub fn new(spec: RingSpec) -> Result<Ring> {
        match &spec {
            RingSpec::Rationals | RingSpec::Integers => {}
            RingSpec::PrimeField(p) => {
                if !arith::is_prime_u64(*p) {
                    return Err(Error::NonPrime(*p));
                }
            }
            RingSpec::IntegersModN(n) => {
                if *n < 2 {
                    return Err(Error::ModulusTooSmall(*n));
                }
            }
            RingSpec::FiniteAlgebra { base_n, rank, mul_table, unit_index, .. } => {
                let (b, k, u) = (*base_n, *rank, *unit_index);
                if b < 2 {
                    return Err(Error::ModulusTooSmall(b));
                }
                if k < 1 || u >= k {
                    return Err(Error::ParseError("algebra rank/unit out of range".into()));
                }
                if mul_table.len() != k
                    || mul_table.iter().any(|r| r.len() != k)
                    || mul_table.iter().flatten().any(|t| t.len() != k)
                {
                    return Err(Error::ParseError("multiplication table has wrong shape".into()));
                }
                let tbl = |i: usize, j: usize| -> Vec<u64> {
                    mul_table[i][j].iter().map(|c| c % b).collect()
                };
                for i in 0..k {
                    for j in 0..k {
                        if tbl(i, j) != tbl(j, i) {
                            return Err(Error::NonCommutative(i, j));
                        }
                    }
                }
                // unit: e_u * e_j = e_j
                for j in 0..k {
                    let mut expect = vec![0u64; k];
                    expect[j] = 1 % b;
                    if tbl(u, j) != expect {
                        return Err(Error::NoUnit(u));
                    }
                }
                // associativity on all basis triples
                let mul_basis = |i: usize, j: usize| tbl(i, j);
                let mul_vec = |v: &[u64], j: usize| -> Vec<u64> {
                    let mut out = vec![0u64; k];
                    for (i, &ci) in v.iter().enumerate() {
                        if ci != 0 {
                            for (l, &t) in mul_basis(i, j).iter().enumerate() {
                                out[l] = arith::addmod(out[l], arith::mulmod(ci, t, b), b);
                            }
                        }
                    }
                    out
                };
                for i in 0..k {
                    for j in 0..k {
                        let ij = mul_basis(i, j);
                        for l in 0..k {
                            let left = mul_vec(&ij, l);
                            let jl = mul_basis(j, l);
                            let mut right = vec![0u64; k];
                            for (m, &cm) in jl.iter().enumerate() {
                                if cm != 0 {
                                    for (t, &c) in mul_basis(i, m).iter().enumerate() {
                                        right[t] =
                                            arith::addmod(right[t], arith::mulmod(cm, c, b), b);
                                    }
                                }
                            }
                            if left != right {
                                return Err(Error::NonAssociative(i, j, l));
                            }
                        }
                    }
                }
            }
        }
        Ok(Ring(Arc::new(RingInner { spec })))
    }

    pub fn rationals() -> Ring {
        Ring::new(RingSpec::Rationals).unwrap()
    }
    pub fn integers() -> Ring {
        Ring::new(RingSpec::Integers).unwrap()
    }
    pub fn zmod(n: u64) -> Result<Ring> {
        Ring::new(RingSpec::IntegersModN(n))
    }
    pub fn prime_field(p: u64) -> Result<Ring> {
        Ring::new(RingSpec::PrimeField(p))
    }

    /// The truncated polynomial algebra `Z/N[t]/(t^e)` as a finite algebra.
    pub fn truncated_poly(base_n: u64, e: usize) -> Result<Ring> {
        if e < 1 {
            return Err(Error::ParseError("truncation exponent must be >= 1".into()));
        }
        let k = e;
        let mut table = vec![vec![vec![0u64; k]; k]; k];
        for i in 0..k {
            for j in 0..k {
                if i + j < k {
                    table[i][j][i + j] = 1 % base_n;
                }
            }
        }
        Ring::new(RingSpec::FiniteAlgebra {
            base_n,
            rank: k,
            mul_table: table,
            unit_index: 0,
            name: Some(format!("Z/{}[t]/(t^{})", base_n, e)),
        })
    }

    /// Parse a ring literal: `Z`, `Q`, `Z/12`, `F5`, `GF(5)`, `Z/4[t]/(t^2)`.
    pub fn parse(text: &str) -> Result<Ring> {
        let s0 = text.trim();
        let s = s0.replace('ℤ', "Z").replace('ℚ', "Q").replace('𝔽', "F");
        match s.as_str() {
            "Z" | "ZZ" => return Ring::new(RingSpec::Integers),
            "Q" | "QQ" => return Ring::new(RingSpec::Rationals),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')) {
            let p: u64 = rest.trim().parse().map_err(|_| Error::ParseError(s.clone()))?;
            return Ring::new(RingSpec::PrimeField(p));
        }
        if let Some(rest) = s.strip_prefix('F') {
            if let Ok(p) = rest.trim().parse::<u64>() {
                return Ring::new(RingSpec::PrimeField(p));
            }
        }
        if let Some(rest) = s.strip_prefix("Z/") {
            if let Some((n_str, alg)) = rest.split_once('[') {
                let n: u64 = n_str.trim().parse().map_err(|_| Error::ParseError(s.clone()))?;
                // accept t]/(t^e)
                let alg = alg.trim();
                let var_end = alg.find(']').ok_or_else(|| Error::ParseError(s.clone()))?;
                let var = &alg[..var_end];
                let tail = alg[var_end + 1..].trim();
                let inner = tail
                    .strip_prefix("/(")
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| Error::ParseError(s.clone()))?;
                let e: usize = match inner.trim().strip_prefix(var) {
                    Some(p) => {
                        let p = p.trim();
                        if p.is_empty() {
                            1
                        } else {
                            p.strip_prefix('^')
                                .ok_or_else(|| Error::ParseError(s.clone()))?
                                .trim()
                                .parse()
                                .map_err(|_| Error::ParseError(s.clone()))?
                        }
                    }
                    None => return Err(Error::ParseError(s.clone())),
                };
                return Ring::truncated_poly(n, e);
            }
            let n: u64 = rest.trim().parse().map_err(|_| Error::ParseError(s.clone()))?;
            return Ring::new(RingSpec::IntegersModN(n));
        }
        Err(Error::ParseError(s0.to_string()))
    }

    pub fn spec(&self) -> &RingSpec {
        &self.0.spec
    }

    pub fn is_field(&self) -> bool {
        matches!(self.0.spec, RingSpec::Rationals | RingSpec::PrimeField(_))
    }

    pub fn is_finite(&self) -> bool {
        matches!(
            self.0.spec,
            RingSpec::PrimeField(_) | RingSpec::IntegersModN(_) | RingSpec::FiniteAlgebra { .. }
        )
    }

    /// Number of elements for finite rings.
    pub fn cardinality(&self) -> Option<BigUint> {
        match &self.0.spec {
            RingSpec::PrimeField(p) => Some(BigUint::from(*p)),
            RingSpec::IntegersModN(n) => Some(BigUint::from(*n)),
            RingSpec::FiniteAlgebra { base_n, rank, .. } => {
                Some(BigUint::from(*base_n).pow(*rank as u32))
            }
            _ => None,
        }
    }

    /// Residue modulus for the Z/N-like kinds (`PrimeField`, `IntegersModN`).
    pub(crate) fn modulus(&self) -> Option<u64> {
        match self.0.spec {
            RingSpec::PrimeField(p) => Some(p),
            RingSpec::IntegersModN(n) => Some(n),
            _ => None,
        }
    }

    /// `(base modulus, rank)` of a finite algebra.
    pub fn algebra_shape(&self) -> Option<(u64, usize)> {
        match &self.0.spec {
            RingSpec::FiniteAlgebra { base_n, rank, .. } => Some((*base_n, *rank)),
            _ => None,
        }
    }

    fn elem(&self, payload: Payload) -> RingElem {
        RingElem { ring: self.clone(), payload }
    }

    pub fn zero(&self) -> RingElem {
        match &self.0.spec {
            RingSpec::Integers => self.elem(Payload::Int(BigInt::zero())),
            RingSpec::Rationals => self.elem(Payload::Rat(BigRational::zero())),
            RingSpec::PrimeField(_) | RingSpec::IntegersModN(_) => self.elem(Payload::Res(0)),
            RingSpec::FiniteAlgebra { rank, .. } => self.elem(Payload::Alg(vec![0; *rank])),
        }
    }

    pub fn one(&self) -> RingElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> RingElem {
        match &self.0.spec {
            RingSpec::Integers => self.elem(Payload::Int(BigInt::from(v))),
            RingSpec::Rationals => self.elem(Payload::Rat(BigRational::from(BigInt::from(v)))),
            RingSpec::PrimeField(n) | RingSpec::IntegersModN(n) => {
                self.elem(Payload::Res((v as i128).rem_euclid(*n as i128) as u64))
            }
            RingSpec::FiniteAlgebra { base_n, rank, unit_index, .. } => {
                let mut cs = vec![0u64; *rank];
                cs[*unit_index] = (v as i128).rem_euclid(*base_n as i128) as u64;
                self.elem(Payload::Alg(cs))
            }
        }
    }

    /// Element from a finite-algebra coefficient tuple.
    pub fn from_tuple(&self, coeffs: &[i64]) -> Result<RingElem> {
        match &self.0.spec {
            RingSpec::FiniteAlgebra { base_n, rank, .. } => {
                if coeffs.len() != *rank {
                    return Err(Error::ParseError(format!(
                        "tuple length {} does not match rank {}",
                        coeffs.len(),
                        rank
                    )));
                }
                Ok(self.elem(Payload::Alg(
                    coeffs.iter().map(|&c| (c as i128).rem_euclid(*base_n as i128) as u64).collect(),
                )))
            }
            _ => Err(Error::WrongRingKind { expected: "FiniteAlgebra", got: self.to_string() }),
        }
    }

    /// Parse an element literal: decimal integer, `a/b`, or `[c0,...,ck-1]`.
    pub fn parse_element(&self, literal: &str) -> Result<RingElem> {
        let s = literal.trim();
        if s.is_empty() {
            return Err(Error::ParseError("empty element literal".into()));
        }
        if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let coeffs: Vec<i64> = inner
                .split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| Error::ParseError(s.into())))
                .collect::<Result<_>>()?;
            return self.from_tuple(&coeffs);
        }
        if let Some((num, den)) = s.split_once('/') {
            let a: i64 = num.trim().parse().map_err(|_| Error::ParseError(s.into()))?;
            let b: i64 = den.trim().parse().map_err(|_| Error::ParseError(s.into()))?;
            if b == 0 {
                return Err(Error::ParseError("zero denominator".into()));
            }
            if matches!(self.0.spec, RingSpec::Rationals) {
                return Ok(self.elem(Payload::Rat(BigRational::new(a.into(), b.into()))));
            }
            let bv = self.from_i64(b);
            let inv = bv.inverse().ok_or_else(|| Error::NotInvertibleDenominator(b.to_string()))?;
            return Ok(self.from_i64(a).mul(&inv));
        }
        let v: i128 = s.parse().map_err(|_| Error::ParseError(s.into()))?;
        match &self.0.spec {
            RingSpec::Integers => Ok(self.elem(Payload::Int(BigInt::from(v)))),
            RingSpec::Rationals => Ok(self.elem(Payload::Rat(BigRational::from(BigInt::from(v))))),
            RingSpec::PrimeField(n) | RingSpec::IntegersModN(n) => {
                Ok(self.elem(Payload::Res(v.rem_euclid(*n as i128) as u64)))
            }
            RingSpec::FiniteAlgebra { base_n, rank, unit_index, .. } => {
                let mut cs = vec![0u64; *rank];
                cs[*unit_index] = v.rem_euclid(*base_n as i128) as u64;
                Ok(self.elem(Payload::Alg(cs)))
            }
        }
    }

    /// All elements of a finite ring, in a fixed order.
    pub fn elements(&self) -> Result<Vec<RingElem>> {
        match &self.0.spec {
            RingSpec::PrimeField(n) | RingSpec::IntegersModN(n) => {
                Ok((0..*n).map(|v| self.elem(Payload::Res(v))).collect())
            }
            RingSpec::FiniteAlgebra { base_n, rank, .. } => {
                let total = (*base_n as u128).checked_pow(*rank as u32).ok_or_else(|| {
                    Error::TooLarge("finite algebra too large to enumerate".into())
                })?;
                if total > 1 << 22 {
                    return Err(Error::TooLarge("finite algebra too large to enumerate".into()));
                }
                let mut out = Vec::with_capacity(total as usize);
                let mut cs = vec![0u64; *rank];
                loop {
                    out.push(self.elem(Payload::Alg(cs.clone())));
                    let mut i = 0;
                    loop {
                        if i == *rank {
                            return Ok(out);
                        }
                        cs[i] += 1;
                        if cs[i] < *base_n {
                            break;
                        }
                        cs[i] = 0;
                        i += 1;
                    }
                }
            }
            _ => Err(Error::InfiniteRing),
        }
    }
}

impl RingElem {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        match &self.payload {
            Payload::Int(v) => v.is_zero(),
            Payload::Rat(v) => v.is_zero(),
            Payload::Res(v) => *v == 0,
            Payload::Alg(cs) => cs.iter().all(|&c| c == 0),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.ring.one()
    }

    fn check_same_ring(&self, other: &RingElem) {
        assert!(self.ring == other.ring, "ring mismatch: {} vs {}", self.ring, other.ring);
    }

    pub fn add(&self, other: &RingElem) -> RingElem {
        self.check_same_ring(other);
        let payload = match (&self.payload, &other.payload) {
            (Payload::Int(a), Payload::Int(b)) => Payload::Int(a + b),
            (Payload::Rat(a), Payload::Rat(b)) => Payload::Rat(a + b),
            (Payload::Res(a), Payload::Res(b)) => {
                Payload::Res(arith::addmod(*a, *b, self.ring.modulus().unwrap()))
            }
            (Payload::Alg(a), Payload::Alg(b)) => {
                let (bn, _) = self.ring.algebra_shape().unwrap();
                Payload::Alg(a.iter().zip(b).map(|(&x, &y)| arith::addmod(x, y, bn)).collect())
            }
            _ => unreachable!(),
        };
        RingElem { ring: self.ring.clone(), payload }
    }

    pub fn neg(&self) -> RingElem {
        let payload = match &self.payload {
            Payload::Int(a) => Payload::Int(-a),
            Payload::Rat(a) => Payload::Rat(-a),
            Payload::Res(a) => {
                let n = self.ring.modulus().unwrap();
                Payload::Res(arith::submod(0, *a, n))
            }
            Payload::Alg(a) => {
                let (bn, _) = self.ring.algebra_shape().unwrap();
                Payload::Alg(a.iter().map(|&x| arith::submod(0, x, bn)).collect())
            }
        };
        RingElem { ring: self.ring.clone(), payload }
    }

    pub fn sub(&self, other: &RingElem) -> RingElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingElem) -> RingElem {
        self.check_same_ring(other);
        let payload = match (&self.payload, &other.payload) {
            (Payload::Int(a), Payload::Int(b)) => Payload::Int(a * b),
            (Payload::Rat(a), Payload::Rat(b)) => Payload::Rat(a * b),
            (Payload::Res(a), Payload::Res(b)) => {
                Payload::Res(arith::mulmod(*a, *b, self.ring.modulus().unwrap()))
            }
            (Payload::Alg(a), Payload::Alg(b)) => {
                let RingSpec::FiniteAlgebra { base_n, rank, mul_table, .. } = self.ring.spec()
                else {
                    unreachable!()
                };
                let mut out = vec![0u64; *rank];
                for (i, &ai) in a.iter().enumerate() {
                    if ai == 0 {
                        continue;
                    }
                    for (j, &bj) in b.iter().enumerate() {
                        if bj == 0 {
                            continue;
                        }
                        let c = arith::mulmod(ai, bj, *base_n);
                        for (l, &t) in mul_table[i][j].iter().enumerate() {
                            out[l] = arith::addmod(out[l], arith::mulmod(c, t, *base_n), *base_n);
                        }
                    }
                }
                Payload::Alg(out)
            }
            _ => unreachable!(),
        };
        RingElem { ring: self.ring.clone(), payload }
    }

    pub fn pow(&self, mut e: u64) -> RingElem {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// True iff the element has a multiplicative inverse.
    ///
    /// For finite algebras this is decided by invertibility of the
    /// multiplication-by-`a` matrix over Z/baseN.
    pub fn is_unit(&self) -> bool {
        match &self.payload {
            Payload::Int(v) => v.abs().is_one(),
            Payload::Rat(v) => !v.is_zero(),
            Payload::Res(v) => {
                let n = self.ring.modulus().unwrap();
                arith::gcd_u64(*v, n) == 1
            }
            Payload::Alg(_) => self.inverse().is_some(),
        }
    }

    pub fn inverse(&self) -> Option<RingElem> {
        match &self.payload {
            Payload::Int(v) => {
                if v.abs().is_one() {
                    Some(self.clone())
                } else {
                    None
                }
            }
            Payload::Rat(v) => {
                if v.is_zero() {
                    None
                } else {
                    Some(RingElem { ring: self.ring.clone(), payload: Payload::Rat(v.recip()) })
                }
            }
            Payload::Res(v) => {
                let n = self.ring.modulus().unwrap();
                arith::invmod(*v, n)
                    .map(|w| RingElem { ring: self.ring.clone(), payload: Payload::Res(w) })
            }
            Payload::Alg(_) => {
                let (bn, k) = self.ring.algebra_shape().unwrap();
                let m = self.mult_matrix_rows();
                let inv = arith::invert_mod(&m, k, bn)?;
                // The unit's coordinate row under multiplication-by-a^{-1}:
                // row of the unit in inv gives unit * a^{-1}... we want the element x
                // with x*a = 1, i.e. unit row of the inverse action matrix.
                let RingSpec::FiniteAlgebra { unit_index, .. } = self.ring.spec() else {
                    unreachable!()
                };
                let row = &inv[unit_index * k..(unit_index + 1) * k];
                let cand = RingElem { ring: self.ring.clone(), payload: Payload::Alg(row.to_vec()) };
                debug_assert!(cand.mul(self).is_one());
                Some(cand)
            }
        }
    }

    /// Row-convention action matrix of a finite-algebra element:
    /// entry `(i, j)` is the coefficient of `basis_j` in `a * basis_i`
    /// (so coordinate rows multiply it from the left).
    fn mult_matrix_rows(&self) -> Vec<u64> {
        let Payload::Alg(a) = &self.payload else { panic!("not an algebra element") };
        let RingSpec::FiniteAlgebra { base_n, rank, mul_table, .. } = self.ring.spec() else {
            unreachable!()
        };
        let (b, k) = (*base_n, *rank);
        let mut m = vec![0u64; k * k];
        for i in 0..k {
            // a * basis_i
            for (s, &cs) in a.iter().enumerate() {
                if cs == 0 {
                    continue;
                }
                for (j, &t) in mul_table[s][i].iter().enumerate() {
                    m[i * k + j] = arith::addmod(m[i * k + j], arith::mulmod(cs, t, b), b);
                }
            }
        }
        m
    }

    /// Multiplication-by-`a` matrix in the chosen basis, with columns carrying
    /// the images of the basis vectors (entry `(i, j)` = coefficient of
    /// `basis_i` in `a * basis_j`).  Satisfies
    /// `flatten_action(a*b) = flatten_action(a) . flatten_action(b)`.
    pub fn flatten_action(&self) -> Result<Vec<Vec<u64>>> {
        match self.ring.spec() {
            RingSpec::FiniteAlgebra { rank, .. } => {
                let k = *rank;
                let rows = self.mult_matrix_rows();
                let mut out = vec![vec![0u64; k]; k];
                for i in 0..k {
                    for j in 0..k {
                        out[j][i] = rows[i * k + j];
                    }
                }
                Ok(out)
            }
            _ => Err(Error::WrongRingKind { expected: "FiniteAlgebra", got: self.ring.to_string() }),
        }
    }

    /// Row-convention flattened action, used by the matrix flattening code.
    pub(crate) fn action_rows(&self) -> Vec<u64> {
        self.mult_matrix_rows()
    }

    pub(crate) fn from_payload(ring: &Ring, payload: Payload) -> RingElem {
        RingElem { ring: ring.clone(), payload }
    }

    pub(crate) fn payload_clone(&self) -> Payload {
        self.payload.clone()
    }

    pub(crate) fn payload_is_zero(p: &Payload) -> bool {
        match p {
            Payload::Int(v) => v.is_zero(),
            Payload::Rat(v) => v.is_zero(),
            Payload::Res(v) => *v == 0,
            Payload::Alg(cs) => cs.iter().all(|&c| c == 0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_ring_examples() {
        let z12 = Ring::zmod(12).unwrap();
        assert_eq!(z12.elements().unwrap().len(), 12);
        assert_eq!(Ring::prime_field(4).unwrap_err(), Error::NonPrime(4));
        let a = Ring::truncated_poly(4, 2).unwrap();
        assert_eq!(a.elements().unwrap().len(), 16);
        assert_eq!(Ring::zmod(1).unwrap_err(), Error::ModulusTooSmall(1));
    }

    #[test]
    fn bad_structure_constants() {
        // t*t = 1 but 1*t = 0: breaks unit axiom
        let bad = Ring::new(RingSpec::FiniteAlgebra {
            base_n: 4,
            rank: 2,
            mul_table: vec![
                vec![vec![1, 0], vec![0, 0]],
                vec![vec![0, 0], vec![1, 0]],
            ],
            unit_index: 0,
            name: None,
        });
        assert!(matches!(bad, Err(Error::NoUnit(_)) | Err(Error::NonCommutative(..))));
    }

    #[test]
    fn parse_element_examples() {
        let z12 = Ring::zmod(12).unwrap();
        assert_eq!(z12.parse_element("14").unwrap(), z12.from_i64(2));
        let q = Ring::rationals();
        let e = q.parse_element("4/6").unwrap();
        assert_eq!(e, q.parse_element("2/3").unwrap());
        assert_eq!(e.to_string(), "2/3");
        let a = Ring::parse("Z/4[t]/(t^2)").unwrap();
        let t = a.parse_element("[1,2]").unwrap();
        assert_eq!(t.to_string(), "[1,2]");
        // a/b with non-invertible denominator mod N
        assert_eq!(
            z12.parse_element("1/2").unwrap_err(),
            Error::NotInvertibleDenominator("2".into())
        );
        assert_eq!(z12.parse_element("5/7").unwrap(), z12.from_i64(5).mul(&z12.from_i64(7).inverse().unwrap()));
    }

    #[test]
    fn parse_render_roundtrip() {
        let rings = [
            Ring::integers(),
            Ring::rationals(),
            Ring::zmod(12).unwrap(),
            Ring::prime_field(7).unwrap(),
            Ring::truncated_poly(4, 2).unwrap(),
        ];
        for r in &rings {
            for v in [-5i64, 0, 1, 3, 17] {
                let e = r.from_i64(v);
                assert_eq!(r.parse_element(&e.to_string()).unwrap(), e);
            }
        }
        let a = Ring::truncated_poly(4, 2).unwrap();
        let t = a.from_tuple(&[3, 2]).unwrap();
        assert_eq!(a.parse_element(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn is_unit_examples() {
        let z12 = Ring::zmod(12).unwrap();
        assert!(z12.from_i64(5).is_unit());
        assert!(!z12.from_i64(2).is_unit());
        assert!(!Ring::integers().from_i64(2).is_unit());
        assert!(Ring::integers().from_i64(-1).is_unit());
        let a = Ring::truncated_poly(4, 2).unwrap();
        let e = a.from_tuple(&[1, 2]).unwrap(); // 1 + 2t
        assert!(e.is_unit());
        let inv = e.inverse().unwrap();
        assert!(e.mul(&inv).is_one());
        // t is not a unit, 2 is not a unit
        assert!(!a.from_tuple(&[0, 1]).unwrap().is_unit());
        assert!(!a.from_i64(2).is_unit());
    }

    #[test]
    fn is_unit_matches_exhaustive_search() {
        for ring in [Ring::zmod(12).unwrap(), Ring::truncated_poly(4, 2).unwrap(), Ring::zmod(16).unwrap()] {
            let elems = ring.elements().unwrap();
            for a in &elems {
                let brute = elems.iter().any(|b| a.mul(b).is_one());
                assert_eq!(a.is_unit(), brute, "{} in {}", a, ring);
            }
        }
    }

    #[test]
    fn flatten_action_examples() {
        let a = Ring::truncated_poly(4, 2).unwrap();
        let t = a.from_tuple(&[0, 1]).unwrap();
        assert_eq!(t.flatten_action().unwrap(), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(a.one().flatten_action().unwrap(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(a.zero().flatten_action().unwrap(), vec![vec![0, 0], vec![0, 0]]);
        // multiplicativity
        let x = a.from_tuple(&[1, 2]).unwrap();
        let y = a.from_tuple(&[3, 1]).unwrap();
        let fx = x.flatten_action().unwrap();
        let fy = y.flatten_action().unwrap();
        let fxy = x.mul(&y).flatten_action().unwrap();
        let mut prod = vec![vec![0u64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    prod[i][j] = arith::addmod(prod[i][j], arith::mulmod(fx[i][l], fy[l][j], 4), 4);
                }
            }
        }
        assert_eq!(fxy, prod);
    }

    #[test]
    fn ring_literals() {
        assert_eq!(Ring::parse("ℤ/12").unwrap(), Ring::zmod(12).unwrap());
        assert_eq!(Ring::parse("ℚ").unwrap(), Ring::rationals());
        assert_eq!(Ring::parse("Z").unwrap(), Ring::integers());
        assert_eq!(Ring::parse("GF(7)").unwrap(), Ring::prime_field(7).unwrap());
        assert_eq!(Ring::parse("F7").unwrap(), Ring::prime_field(7).unwrap());
        assert_eq!(Ring::parse("Z/4[t]/(t^2)").unwrap(), Ring::truncated_poly(4, 2).unwrap());
        assert!(Ring::parse("wat").is_err());
    }
}
