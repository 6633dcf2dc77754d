use super::*;
use crate::ring::Ring;
use num_bigint::BigInt;
use num_traits::Signed;

fn z() -> Ring {
    Ring::integers()
}
fn zn(n: u64) -> Ring {
    Ring::zmod(n).unwrap()
}

/// Independent oracle: invariant factors of an integer matrix from gcds of
/// k x k minors: d_1 ... d_k = gcd of all k-minors.
fn minor_gcd_invariants(m: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let r = rows.min(cols);
    fn minor_det(m: &[Vec<i64>], ri: &[usize], ci: &[usize]) -> BigInt {
        let k = ri.len();
        if k == 0 {
            return BigInt::from(1);
        }
        let mut det = BigInt::from(0);
        // Laplace expansion along the first row (k <= 3 here)
        for (pos, &c) in ci.iter().enumerate() {
            let sub_r: Vec<usize> = ri[1..].to_vec();
            let sub_c: Vec<usize> = ci.iter().copied().filter(|&x| x != c).collect();
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            det += BigInt::from(sign * m[ri[0]][c]) * minor_det(m, &sub_r, &sub_c);
        }
        det
    }
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in 0..n {
            for mut rest in subsets(n, k - 1) {
                if rest.iter().all(|&x| x > first) {
                    let mut s = vec![first];
                    s.append(&mut rest);
                    out.push(s);
                }
            }
        }
        out.retain(|s| s.len() == k);
        out
    }
    let mut gcds = Vec::new();
    for k in 1..=r {
        let mut g = BigInt::from(0);
        for ri in subsets(rows, k) {
            for ci in subsets(cols, k) {
                let d = minor_det(m, &ri, &ci);
                g = num_integer::Integer::gcd(&g, &d);
            }
        }
        gcds.push(g);
    }
    let mut inv = Vec::new();
    let mut prev = BigInt::from(1);
    for g in gcds {
        if g.is_zero() {
            break;
        }
        inv.push(&g / &prev);
        prev = g;
    }
    inv.into_iter().map(|d| d.abs()).collect()
}

#[test]
fn snf_matches_minor_gcd_oracle() {
    let cases: Vec<Vec<Vec<i64>>> = vec![
        vec![vec![2, 4], vec![6, 8]],
        vec![vec![1, 0], vec![0, 1]],
        vec![vec![0, 0], vec![0, 0]],
        vec![vec![2, 4, 4]],
        vec![vec![-4, 2], vec![3, -1], vec![0, 4]],
        vec![vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 4]],
    ];
    for m in cases {
        let rows: Vec<&[i64]> = m.iter().map(|r| r.as_slice()).collect();
        let a = Matrix::from_i64(&z(), &rows);
        let (u, d, v) = smith_normal_form(&a).unwrap();
        assert_eq!(u.mul(&a).mul(&v), d, "U*A*V = D fails for {:?}", m);
        let expected = minor_gcd_invariants(&m);
        let got: Vec<BigInt> = (0..a.rows().min(a.cols()))
            .map(|i| d.at(i, i))
            .filter(|e| !e.is_zero())
            .map(|e| BigInt::parse_bytes(e.to_string().as_bytes(), 10).unwrap())
            .collect();
        assert_eq!(got, expected, "invariant factors for {:?}", m);
        // divisibility chain
        for w in got.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
    }
}

#[test]
fn snf_spec_examples() {
    let a = Matrix::from_i64(&z(), &[&[2, 4], &[6, 8]]);
    let (_, d, _) = smith_normal_form(&a).unwrap();
    assert_eq!(d.at(0, 0), z().from_i64(2));
    assert_eq!(d.at(1, 1), z().from_i64(4));
    let id = Matrix::identity(&z(), 2);
    let (_, d, _) = smith_normal_form(&id).unwrap();
    assert_eq!(d, id);
    let zero = Matrix::zero(&z(), 2, 2);
    let (_, d, _) = smith_normal_form(&zero).unwrap();
    assert!(d.is_zero());
}

#[test]
fn field_smith_shape() {
    let q = Ring::rationals();
    let a = Matrix::from_i64(&q, &[&[2, 4], &[1, 2]]);
    let (u, d, v) = smith_normal_form(&a).unwrap();
    assert_eq!(u.mul(&a).mul(&v), d);
    assert_eq!(d.at(0, 0), q.one());
    assert!(d.at(1, 1).is_zero());
    let f5 = Ring::prime_field(5).unwrap();
    let a = Matrix::from_i64(&f5, &[&[2, 4], &[1, 3]]);
    let (u, d, v) = smith_normal_form(&a).unwrap();
    assert_eq!(u.mul(&a).mul(&v), d);
    assert_eq!(d.at(0, 0), f5.one());
    assert_eq!(d.at(1, 1), f5.one());
}

/// Brute-force row span over a finite ring.
fn enumerate_span(a: &Matrix) -> std::collections::BTreeSet<Vec<String>> {
    let ring = a.ring().clone();
    let elems = ring.elements().unwrap();
    let mut out = std::collections::BTreeSet::new();
    let rows = a.rows();
    let mut idx = vec![0usize; rows];
    loop {
        let mut v = vec![ring.zero(); a.cols()];
        for (i, &ix) in idx.iter().enumerate() {
            let c = &elems[ix];
            for j in 0..a.cols() {
                v[j] = v[j].add(&c.mul(&a.at(i, j)));
            }
        }
        out.insert(v.iter().map(|e| e.to_string()).collect());
        let mut i = 0;
        loop {
            if i == rows {
                return out;
            }
            idx[i] += 1;
            if idx[i] < elems.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn howell_spec_examples() {
    let z4 = zn(4);
    let a = Matrix::from_i64(&z4, &[&[2, 1]]);
    let h = howell_form(&a).unwrap();
    assert_eq!(h, Matrix::from_i64(&z4, &[&[2, 1], &[0, 2]]));
    let z6 = zn(6);
    let id = Matrix::identity(&z6, 2);
    assert_eq!(howell_form(&id).unwrap(), id);
    let b = Matrix::from_i64(&z4, &[&[2]]);
    assert_eq!(howell_form(&b).unwrap(), b);
}

#[test]
fn howell_canonical_iff_equal_span() {
    // deterministic pseudo-random small matrices over Z/N, N <= 16
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for n in [4u64, 6, 8, 12, 16] {
        let ring = zn(n);
        for _ in 0..12 {
            let rows = (next() % 3 + 1) as usize;
            let cols = (next() % 2 + 2) as usize;
            let a = Matrix::from_fn(&ring, rows, cols, |_, _| ring.from_i64((next() % n) as i64));
            let b = Matrix::from_fn(&ring, rows.min(2), cols, |_, _| ring.from_i64((next() % n) as i64));
            let ha = howell_form(&a).unwrap();
            let hb = howell_form(&b).unwrap();
            let sa = enumerate_span(&a);
            let sb = enumerate_span(&b);
            assert_eq!(sa == sb, ha == hb, "span/canonical mismatch over Z/{}", n);
            // canonical form spans the same set
            assert_eq!(enumerate_span(&ha), sa);
        }
    }
}

#[test]
fn kernel_image_examples() {
    let z4 = zn(4);
    let a = Matrix::from_i64(&z4, &[&[2]]);
    let (k, im) = kernel_image(&a);
    assert_eq!(k, Matrix::from_i64(&z4, &[&[2]]));
    assert_eq!(im, Matrix::from_i64(&z4, &[&[2]]));
    let id = Matrix::identity(&z4, 2);
    let (k, im) = kernel_image(&id);
    assert_eq!(k.rows(), 0);
    assert_eq!(im, id);
    // A as a map Z^2 -> Z^1 via rows (2),(4): kernel span {(2,-1)}
    let a = Matrix::from_i64(&z(), &[&[2], &[4]]);
    let (k, _) = kernel_image(&a);
    assert_eq!(k.rows(), 1);
    let kr = k.row_vec(0);
    let g = (kr[0].clone(), kr[1].clone());
    assert!(
        (g.0 == z().from_i64(2) && g.1 == z().from_i64(-1))
            || (g.0 == z().from_i64(-2) && g.1 == z().from_i64(1))
    );
}

#[test]
fn kernel_image_counting_over_finite_rings() {
    // |ker| * |im| = |domain| for v -> v*A
    for ring in [zn(4), zn(12), Ring::truncated_poly(4, 2).unwrap()] {
        let a = Matrix::from_i64(&ring, &[&[2, 1], &[0, 2]]);
        let (k, im) = kernel_image(&a);
        let dom = FpModule::free(&ring, a.rows());
        let (ksub, _) = submodule_presentation(&dom, &k);
        let cod = FpModule::free(&ring, a.cols());
        let (imsub, _) = submodule_presentation(&cod, &im);
        let kc = ksub.cardinality().unwrap();
        let ic = imsub.cardinality().unwrap();
        let dc = dom.cardinality().unwrap();
        assert_eq!(kc * ic, dc, "over {}", ring);
    }
}

#[test]
fn rank_nullity_over_fields() {
    let f5 = Ring::prime_field(5).unwrap();
    let a = Matrix::from_i64(&f5, &[&[1, 2, 0], &[2, 4, 0], &[0, 0, 3]]);
    let (k, im) = kernel_image(&a);
    let rank = im.rows();
    assert_eq!(k.rows() + rank, a.rows());
}

#[test]
fn classify_spec_examples() {
    // g=1, relations [2] over Z/4 -> Z/2, cardinality 2
    let z4 = zn(4);
    let m = FpModule::new(&z4, 1, Matrix::from_i64(&z4, &[&[2]]), vec![]).unwrap();
    let c = m.classify();
    assert_eq!(c.torsion, vec!["2".to_string()]);
    assert_eq!(c.cardinality, Some(2u32.into()));
    // g=2, no relations over Q -> free rank 2
    let q = Ring::rationals();
    let m = FpModule::free(&q, 2);
    let c = m.classify();
    assert_eq!(c.free_rank, 2);
    assert!(c.torsion.is_empty());
    // g=1, relations [6],[4] over Z -> Z/2
    let m = FpModule::new(&z(), 1, Matrix::from_i64(&z(), &[&[6], &[4]]), vec![]).unwrap();
    let c = m.classify();
    assert_eq!(c.free_rank, 0);
    assert_eq!(c.torsion, vec!["2".to_string()]);
}

#[test]
fn classify_matches_enumeration() {
    for (ring, rels, gens) in [
        (zn(4), vec![vec![2i64]], 1usize),
        (zn(12), vec![vec![2, 1], vec![0, 4]], 2),
        (zn(8), vec![], 1),
        (Ring::truncated_poly(4, 2).unwrap(), vec![vec![2, 1]], 2),
        (zn(6), vec![vec![3, 0], vec![0, 2]], 2),
    ] {
        let rel_rows: Vec<&[i64]> = rels.iter().map(|r| r.as_slice()).collect();
        let rm = if rel_rows.is_empty() {
            Matrix::zero(&ring, 0, gens)
        } else {
            Matrix::from_i64(&ring, &rel_rows)
        };
        let m = FpModule::new(&ring, gens, rm, vec![]).unwrap();
        let c = m.classify();
        let elems = m.enumerate(4096).unwrap();
        assert_eq!(
            c.cardinality,
            Some((elems.len() as u64).into()),
            "cardinality over {} rels {:?}",
            ring,
            rels
        );
    }
}

#[test]
fn classify_zlift_agreement() {
    // mod-N Smith classification agrees with the Z-lift + SNF route
    for n in [4u64, 6, 8, 12, 16] {
        let ring = zn(n);
        let cases: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![2, 1], vec![0, 2]],
            vec![vec![3, 3]],
            vec![vec![0, 0]],
            vec![vec![2, 4], vec![6, 8]],
        ];
        for rels in cases {
            let rel_rows: Vec<&[i64]> = rels.iter().map(|r| r.as_slice()).collect();
            let gens = rel_rows[0].len();
            let m = FpModule::new(&ring, gens, Matrix::from_i64(&ring, &rel_rows), vec![]).unwrap();
            let fast = m.classify();
            // Z-lift: rels + N*I, SNF over Z
            let mut lifted: Vec<Vec<i64>> = rels.clone();
            for i in 0..gens {
                let mut row = vec![0i64; gens];
                row[i] = n as i64;
                lifted.push(row);
            }
            let lift_rows: Vec<&[i64]> = lifted.iter().map(|r| r.as_slice()).collect();
            let zm = FpModule::new(&z(), gens, Matrix::from_i64(&z(), &lift_rows), vec![]).unwrap();
            let slow = zm.classify();
            let mut fast_all: Vec<String> = fast.torsion.clone();
            fast_all.extend(std::iter::repeat(n.to_string()).take(fast.free_rank));
            fast_all.sort_by_key(|s| s.parse::<u64>().unwrap());
            let mut slow_all = slow.torsion.clone();
            slow_all.sort_by_key(|s| s.parse::<u64>().unwrap());
            assert_eq!(fast_all, slow_all, "Z/{} rels {:?}", n, rels);
            assert_eq!(fast.cardinality, slow.cardinality);
        }
    }
}

#[test]
fn solve_linear_examples() {
    let z4 = zn(4);
    let a = Matrix::from_i64(&z4, &[&[2]]);
    assert_eq!(solve_linear(&a, &[z4.from_i64(2)]), Some(vec![z4.from_i64(1)]));
    assert_eq!(solve_linear(&a, &[z4.from_i64(1)]), None);
    let id = Matrix::identity(&z4, 3);
    let b = vec![z4.from_i64(1), z4.from_i64(2), z4.from_i64(3)];
    assert_eq!(solve_linear(&id, &b), Some(b.clone()));
}

#[test]
fn solve_over_algebra() {
    let a4t = Ring::truncated_poly(4, 2).unwrap();
    let t = a4t.from_tuple(&[0, 1]).unwrap();
    let two = a4t.from_i64(2);
    let m = Matrix::from_rows(&a4t, 1, vec![vec![t.clone()], vec![two.clone()]]);
    // x1*t + x2*2 = 2+t? solve
    let target = two.add(&t);
    let sol = solve_linear(&m, &[target.clone()]).unwrap();
    let got = sol[0].mul(&t).add(&sol[1].mul(&two));
    assert_eq!(got, target);
}

#[test]
fn submodule_and_kernel_mod() {
    let z12 = zn(12);
    // ambient = Z/12, submodule generated by 4: {0,4,8} = Z/3
    let ambient = FpModule::free(&z12, 1);
    let gens = Matrix::from_i64(&z12, &[&[4]]);
    let (sub, incl) = submodule_presentation(&ambient, &gens);
    assert_eq!(incl, gens);
    assert_eq!(sub.cardinality(), Some(3u32.into()));
    // kernel_mod: {v : v*2 in span(4)} over Z/12: 2v in {0,4,8} -> v in {0,2,4,6,8,10}
    let a = Matrix::from_i64(&z12, &[&[2]]);
    let rels = Matrix::from_i64(&z12, &[&[4]]);
    let k = kernel_mod(&a, Some(&rels));
    let km = FpModule::free(&z12, 1);
    let (sub2, _) = submodule_presentation(&km, &k);
    assert_eq!(sub2.cardinality(), Some(6u32.into()));
}

#[test]
fn factor_through_works() {
    let z12 = zn(12);
    let a = Matrix::from_i64(&z12, &[&[2, 0], &[0, 3]]);
    let b = Matrix::from_i64(&z12, &[&[4, 3]]);
    let c = factor_through(&b, &a, None).unwrap();
    assert_eq!(c.mul(&a), b);
}

#[test]
fn hom_module_examples() {
    let z12 = zn(12);
    // Hom(Z/4, Z/12): maps 1 -> t with 4t = 0: t in {0,3,6,9} = Z/4... as
    // Z/12-modules Hom(Z/12 / (4), Z/12) = 0:4 = {0,3,6,9}
    let m = FpModule::new(&z12, 1, Matrix::from_i64(&z12, &[&[4]]), vec![]).unwrap();
    let n = FpModule::free(&z12, 1);
    let h = hom_module(&m, &n, &[]);
    assert_eq!(h.module.cardinality(), Some(4u32.into()));
    // Hom(R, N) = N
    let h2 = hom_module(&FpModule::free(&z12, 1), &m, &[]);
    assert_eq!(h2.module.cardinality(), Some(4u32.into()));
    // express/realize round trip on each basis element
    for (i, b) in h.basis.iter().enumerate() {
        let c = h.express(b).unwrap();
        let mut expected = vec![z12.zero(); h.basis.len()];
        expected[i] = z12.one();
        assert!(h.module.is_zero_elem(
            &c.iter().zip(&expected).map(|(a, b)| a.sub(b)).collect::<Vec<_>>()
        ));
    }
}

#[test]
fn hom_module_equivariant() {
    // maps commuting with a nilpotent shift
    let z4 = zn(4);
    let m = FpModule::free(&z4, 2);
    let shift = Matrix::from_i64(&z4, &[&[0, 1], &[0, 0]]);
    let h_all = hom_module(&m, &m, &[]);
    let h_eq = hom_module(&m, &m, &[(shift.clone(), shift.clone())]);
    // commuting with the shift: matrices a*I + b*shift -> 16 of 256
    assert_eq!(h_all.module.cardinality(), Some(256u32.into()));
    assert_eq!(h_eq.module.cardinality(), Some(16u32.into()));
    for b in &h_eq.basis {
        assert_eq!(shift.mul(b), b.mul(&shift));
    }
}
