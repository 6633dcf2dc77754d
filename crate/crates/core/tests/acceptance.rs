//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criterion 8 contains a deliberate red assertion: the stage-level
//! quasi-isomorphism from the truncated window model to the Čech complex is
//! obstructed by a cardinality count over finite rings (the alternating
//! product of |H^i| equals that of the term sizes, which is 1 for the window
//! model and |M|/|M_x| for the Čech complex), so it can only hold when every
//! sequence element acts invertibly.  The remaining structure of that
//! criterion (chain maps, H^0 isomorphism beyond the stabilization exponent,
//! colimit identification, diagram exactness, splitting) is verified and
//! passes.

use std::time::Instant;

use koszul_cech::adic::LimitValue;
use koszul_cech::cech::{cech_cohomology_oracle, proregular_check, ProZeroOutcome};
use koszul_cech::koszul::{koszul_operators_cochain, SequenceContext};
use koszul_cech::linalg::{hom_module, smith_normal_form, howell_form, FpModule};
use koszul_cech::verify::{run_check, InstanceConfig, ModuleSpec, Verdict};
use koszul_cech::{Matrix, Ring};

fn criterion(n: usize, desc: &str, bound_s: f64, body: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed().as_secs_f64();
    match &result {
        Ok(()) => println!("criterion {:>2}: PASS ({:6.2}s < {}s) - {}", n, elapsed, bound_s, desc),
        Err(e) => println!("criterion {:>2}: FAIL ({:6.2}s) - {} - {}", n, elapsed, desc, e),
    }
    if let Err(e) = result {
        panic!("criterion {} failed: {}", n, e);
    }
    assert!(
        elapsed < bound_s,
        "criterion {} exceeded its time bound: {:.2}s >= {}s",
        n,
        elapsed,
        bound_s
    );
}

/// The instance matrix: rings x modules x sequences drawn from
/// zero divisors, units, nilpotents and regular elements.
fn sequences_for(ring: &str) -> Vec<Vec<&'static str>> {
    match ring {
        "Z/4" => vec![vec!["2"], vec!["3"], vec!["0"], vec!["2", "3"], vec!["2", "2"], vec!["2", "0"]],
        "Z/8" => vec![vec!["2"], vec!["5"], vec!["4"], vec!["2", "4"], vec!["2", "6"]],
        "Z/12" => vec![vec!["2"], vec!["3"], vec!["6"], vec!["5"], vec!["2", "3"], vec!["2", "6"]],
        "Z/4[t]/(t^2)" => vec![
            vec!["[0,1]"],
            vec!["2"],
            vec!["[1,1]"],
            vec!["[2,1]"],
            vec!["2", "[0,1]"],
            vec!["[0,1]", "[1,1]"],
        ],
        _ => unreachable!(),
    }
}

fn matrix_rings() -> Vec<&'static str> {
    vec!["Z/4", "Z/8", "Z/12", "Z/4[t]/(t^2)"]
}

fn modules() -> Vec<ModuleSpec> {
    vec![
        ModuleSpec::Shorthand("R".into()),
        ModuleSpec::Shorthand("R/(x1)".into()),
        ModuleSpec::Presented {
            gens: 2,
            relations: vec![vec!["2".into(), "1".into()], vec!["0".into(), "2".into()]],
        },
    ]
}

fn instance_matrix() -> Vec<InstanceConfig> {
    let mut out = Vec::new();
    for ring in matrix_rings() {
        for seq in sequences_for(ring) {
            for module in modules() {
                out.push(InstanceConfig::new(ring, &seq).with_module(module).with_n_max(6));
            }
        }
    }
    out
}

fn expect_pass(check: &str, cfg: &InstanceConfig) -> Result<(), String> {
    let report = run_check(check, cfg);
    match report.verdict {
        Verdict::Pass => Ok(()),
        other => Err(format!("{} on [{}]: {:?}", check, cfg.describe(), other)),
    }
}

#[test]
fn criterion_01_oracle_equivalence() {
    criterion(1, "stabilized window-avatar cohomology equals the Cech oracle over the instance matrix", 60.0, || {
        let mut count = 0;
        for cfg in instance_matrix() {
            expect_pass("coh3_oracle", &cfg)?;
            count += 1;
        }
        assert!(count >= 60, "matrix too small: {}", count);
        Ok(())
    });
}

#[test]
fn criterion_02_stage_comparisons() {
    criterion(2, "explicit stage comparisons are certified quasi-isomorphisms with commuting transition squares", 60.0, || {
        for cfg in instance_matrix() {
            for (n, m) in [(1usize, 2usize), (2, 4)] {
                let c = cfg.clone().with_nm(n, m);
                expect_pass("weak5", &c)?;
                expect_pass("coh2", &c)?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_03_derived_completion_stages() {
    criterion(3, "completion stages over Z assemble the 2-adic pro-object; Z/12 completion stabilizes", 10.0, || {
        // R = Z, x = (2): H_0 stage n is Z/2^n (SNF determinant +-2^n), H_1 = 0
        let z = Ring::integers();
        let ctx = SequenceContext::parse(&z, &["2"]).map_err(|e| e.to_string())?;
        let m = FpModule::free(&z, 1);
        for n in 1..=6usize {
            let stage = koszul_cech::adic::koszul_xu_chain(&ctx, &m, n).map_err(|e| e.to_string())?;
            let h0 = stage.homology_at(0);
            let expected = vec![(1u64 << n).to_string()];
            if h0.torsion != expected {
                return Err(format!("H_0 stage {} is {:?}, expected Z/{}", n, h0.torsion, 1u64 << n));
            }
            if !stage.homology_at(1).is_zero() {
                return Err(format!("H_1 stage {} is nonzero", n));
            }
            // determinant via invariant factors of the full differential
            let (_, d, _) = smith_normal_form(&stage.diff(1)).map_err(|e| e.to_string())?;
            let mut det = 1i64;
            for i in 0..d.rows().min(d.cols()) {
                let s = d.at(i, i).to_string();
                det *= s.parse::<i64>().map_err(|e| e.to_string())?;
            }
            if det.unsigned_abs() != 1u64 << n {
                return Err(format!("SNF determinant at stage {} is {}", n, det));
            }
        }
        let sys = koszul_cech::adic::xu_systems(&ctx, &m, 6, koszul_cech::koszul::KoszulVariant::Chain)
            .map_err(|e| e.to_string())?;
        let lim = koszul_cech::adic::limits(&sys, 2);
        let d0 = lim.degree(0).ok_or("no degree 0")?;
        if d0.lim != LimitValue::ProObject {
            return Err("the 2-adic limit over Z must be reported as a pro-object".into());
        }
        if !matches!(&d0.lim1, LimitValue::Stabilized { value, .. } if value.is_zero()) {
            return Err("lim1 of the surjective tower must vanish".into());
        }
        // Z/12, x = (2): Lambda_0 = Z/4, higher degrees vanish with lim1 = 0
        let z12 = Ring::zmod(12).map_err(|e| e.to_string())?;
        let ctx12 = SequenceContext::parse(&z12, &["2"]).map_err(|e| e.to_string())?;
        let rep = koszul_cech::cech::derived_completion_koszul(&ctx12, &FpModule::free(&z12, 1), 6, 10, 2)
            .map_err(|e| e.to_string())?;
        if !rep.identified {
            return Err("Z/12 must be weakly pro-regular at (2)".into());
        }
        let l0 = rep.limits.degree(0).ok_or("no degree 0")?;
        match &l0.lim {
            LimitValue::Stabilized { value, .. } if value.torsion == vec!["4".to_string()] => {}
            other => return Err(format!("Lambda_0 = {:?}", other)),
        }
        let l1 = rep.limits.degree(1).ok_or("no degree 1")?;
        if !matches!(&l1.lim, LimitValue::Stabilized { value, .. } if value.is_zero())
            || !matches!(&l1.lim1, LimitValue::Stabilized { value, .. } if value.is_zero())
        {
            return Err("Lambda_1 and lim1 must vanish with certificates".into());
        }
        Ok(())
    });
}

#[test]
fn criterion_04_hom_from_localization() {
    criterion(4, "H_1 limits equal ker(Hom(R_x, M) -> M) and bounded torsion gives the completion", 10.0, || {
        for ring in matrix_rings() {
            for seq in sequences_for(ring) {
                if seq.len() != 1 {
                    continue;
                }
                for module in modules() {
                    let cfg = InstanceConfig::new(ring, &seq).with_module(module).with_n_max(5);
                    expect_pass("hoc2", &cfg)?;
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_05_proregularity() {
    criterion(5, "pro-zero witnesses m(n) = n + 2 over Z/12 and the injective-hom consequence", 10.0, || {
        let z12 = Ring::zmod(12).map_err(|e| e.to_string())?;
        let ctx = SequenceContext::parse(&z12, &["2"]).map_err(|e| e.to_string())?;
        let m = FpModule::free(&z12, 1);
        let v = proregular_check(&ctx, &m, 3, 8).map_err(|e| e.to_string())?;
        let ProZeroOutcome::VerifiedUpTo { witnesses } = &v.per_index[&1] else {
            return Err("expected witnesses for i = 1".into());
        };
        for (n, mm) in witnesses {
            if *mm != n + 2 {
                return Err(format!("witness m({}) = {}, expected {}", n, mm, n + 2));
            }
        }
        // consequence: H^i(Cech ⊗ Hom(M, R)) = 0 for i > 0 on verified instances
        for (ring_name, seq) in [("Z/12", vec!["2"]), ("Z/12", vec!["2", "3"]), ("Z/8", vec!["2"])] {
            let ring = Ring::parse(ring_name).map_err(|e| e.to_string())?;
            let ctx = SequenceContext::parse(&ring, &seq).map_err(|e| e.to_string())?;
            for module in modules() {
                let cfg = InstanceConfig::new(ring_name, &seq).with_module(module);
                let inst = koszul_cech::verify::resolve_instance(&cfg).map_err(|e| e.to_string())?;
                let verdict = proregular_check(&ctx, &inst.module, 3, 8).map_err(|e| e.to_string())?;
                if !verdict.verified() {
                    continue;
                }
                let hom = hom_module(&inst.module, &FpModule::free(&ring, 1), &[]);
                let table = cech_cohomology_oracle(&ctx, &hom.module).map_err(|e| e.to_string())?;
                for (i, c) in &table {
                    if *i > 0 && !c.is_zero() {
                        return Err(format!(
                            "H^{}(Cech ⊗ Hom(M, R)) = {} on [{}]",
                            i,
                            c,
                            cfg.describe()
                        ));
                    }
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_06_duality_suite() {
    criterion(6, "duality isomorphisms with U-action intertwining over Z/4 and Z/12", 30.0, || {
        for ring in ["Z/4", "Z/12"] {
            for (seq, n) in [(vec!["2"], 3usize), (vec!["2", "3"], 2)] {
                for check in ["dual0", "dual1", "dual2", "dual3", "dual6"] {
                    let cfg = InstanceConfig::new(ring, &seq).with_n(n);
                    expect_pass(check, &cfg)?;
                }
                let cfg = InstanceConfig::new(ring, &seq).with_n_max(4);
                expect_pass("dual7", &cfg)?;
            }
        }
        // one non-free module instance
        let cfg = InstanceConfig::new("Z/12", &["2"])
            .with_module(ModuleSpec::Presented {
                gens: 2,
                relations: vec![vec!["2".into(), "1".into()], vec!["0".into(), "2".into()]],
            })
            .with_n(2);
        for check in ["dual0", "dual1", "dual2", "dual3", "dual6"] {
            expect_pass(check, &cfg)?;
        }
        expect_pass("dual7", &cfg.clone().with_n_max(4))?;
        Ok(())
    });
}

#[test]
fn criterion_07_enlargement() {
    criterion(7, "enlargement exact sequences for ideal (2) and extra element 3 over Z/12", 30.0, || {
        let cfg = InstanceConfig::new("Z/12", &["2"]).with_y("3").with_n(2).with_n_max(5);
        expect_pass("enl1", &cfg)?;
        expect_pass("enl2", &cfg)?;
        expect_pass("enl4", &cfg)?;
        // a second instance with a presented module
        let cfg2 = InstanceConfig::new("Z/12", &["2"])
            .with_module(ModuleSpec::Presented {
                gens: 2,
                relations: vec![vec!["2".into(), "1".into()], vec!["0".into(), "2".into()]],
            })
            .with_y("3")
            .with_n(2)
            .with_n_max(5);
        expect_pass("enl1", &cfg2)?;
        expect_pass("enl4", &cfg2)?;
        Ok(())
    });
}

#[test]
fn criterion_08_resolution_structure() {
    criterion(8, "resolution diagram, splitting, structural identities, and the stage-level comparison", 10.0, || {
        for (ring, seq) in [("Z/12", vec!["2"]), ("Z/8", vec!["2"]), ("Z/12", vec!["2", "3"])] {
            let cfg = InstanceConfig::new(ring, &seq).with_n(3);
            if seq.len() == 1 {
                expect_pass("comp6", &cfg)?;
            }
            expect_pass("hoc1", &cfg)?;
            // the comparison map: chain map, H^0 isomorphism beyond the
            // stabilization exponent, window compatibility, and the colimit
            // identification all hold...
            let report = run_check("comp5", &cfg.clone().with_n_max(6));
            for key in ["chain_map", "h0_iso", "window_compatible", "colimit_identification"] {
                if report.artifacts.get(key) != Some(&serde_json::json!(true)) {
                    return Err(format!("comp5 artifact {} missing or false on [{}]", key, cfg.describe()));
                }
            }
            // ... and the literal stage-level quasi-isomorphism claim is
            // asserted as stated; it is obstructed by the cardinality count
            // whenever some x_i acts non-invertibly (see the check witness).
            if report.artifacts.get("stage_quasi_iso") != Some(&serde_json::json!(true)) {
                let witness = match &report.verdict {
                    Verdict::Fail { witness } => witness.clone(),
                    other => format!("{:?}", other),
                };
                return Err(format!("stage-level quasi-isomorphism on [{}]: {}", cfg.describe(), witness));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_09_substrate_oracles() {
    criterion(9, "SNF and Howell forms agree with brute-force oracles on 550 random matrices", 30.0, || {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        let z = Ring::integers();
        // SNF vs gcd-of-minors
        for case in 0..250 {
            let rows = rng.gen_range(1..=3);
            let cols = rng.gen_range(1..=3);
            let entries: Vec<Vec<i64>> =
                (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-4..=4)).collect()).collect();
            let refs: Vec<&[i64]> = entries.iter().map(|r| r.as_slice()).collect();
            let a = Matrix::from_i64(&z, &refs);
            let (u, d, v) = smith_normal_form(&a).map_err(|e| e.to_string())?;
            if u.mul(&a).mul(&v) != d {
                return Err(format!("UAV != D for case {} {:?}", case, entries));
            }
            let got: Vec<i64> = (0..rows.min(cols))
                .map(|i| d.at(i, i).to_string().parse::<i64>().unwrap())
                .filter(|x| *x != 0)
                .collect();
            let expected = minor_gcd_invariants(&entries);
            if got != expected {
                return Err(format!("SNF mismatch for {:?}: got {:?} expected {:?}", entries, got, expected));
            }
        }
        // Howell vs exhaustive span enumeration
        for case in 0..300 {
            let n = [4u64, 6, 8, 9, 12, 16][rng.gen_range(0..6)];
            let ring = Ring::zmod(n).map_err(|e| e.to_string())?;
            let rows = rng.gen_range(1..=3);
            let cols = rng.gen_range(1..=3);
            let a = Matrix::from_fn(&ring, rows, cols, |_, _| ring.from_i64(rng.gen_range(0..n as i64)));
            let b = Matrix::from_fn(&ring, rng.gen_range(1..=3), cols, |_, _| {
                ring.from_i64(rng.gen_range(0..n as i64))
            });
            let ha = howell_form(&a).map_err(|e| e.to_string())?;
            let hb = howell_form(&b).map_err(|e| e.to_string())?;
            let sa = enumerate_span(&a);
            let sb = enumerate_span(&b);
            if (sa == sb) != (ha == hb) {
                return Err(format!("Howell canonicality mismatch over Z/{} case {}", n, case));
            }
            if enumerate_span(&ha) != sa {
                return Err(format!("Howell span changed over Z/{} case {}", n, case));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_10_inverse_polynomial_grading() {
    criterion(10, "inverse-polynomial grading over Q: dim H^1(U^n) = min(n, 5) with embedding transitions", 5.0, || {
        let q = Ring::rationals();
        let free = FpModule::free(&q, 1);
        let grid = koszul_cech::adic::MonomialGrid::uniform(1, 5);
        let p = koszul_cech::adic::trunc_poly_module(&free, &grid);
        let u = p.op("U1").unwrap().clone();
        let mk = |n: usize| {
            let mut op = Matrix::identity(&q, 5);
            for _ in 0..n {
                op = op.mul(&u);
            }
            koszul_operators_cochain(&p, &[op])
        };
        let mut prev: Option<koszul_cech::ChainComplex> = None;
        for n in 1..=7usize {
            let c = mk(n).map_err(|e| e.to_string())?;
            let h1 = c.homology_at(-1);
            let expected = n.min(5);
            if h1.free_rank != expected {
                return Err(format!("dim H^1(U^{}) = {}, expected {}", n, h1.free_rank, expected));
            }
            if let Some(pc) = &prev {
                // transition: identity in degree 0, multiplication by U in
                // degree -1; it embeds stage n into stage n + 1
                let mut comps = std::collections::BTreeMap::new();
                comps.insert(0, Matrix::identity(&q, 5));
                comps.insert(-1, u.clone());
                let t = koszul_cech::ChainMap::new(pc.clone(), c.clone(), comps)
                    .map_err(|e| format!("transition is not a chain map: {}", e))?;
                let src_h = pc.homology_data(-1);
                let tgt_h = c.homology_data(-1);
                let induced = t.induced_on_homology(-1, &src_h, &tgt_h);
                let ker = koszul_cech::linalg::kernel_mod(&induced, Some(tgt_h.module.rels()));
                let injective =
                    (0..ker.rows()).all(|i| src_h.module.is_zero_elem(&ker.row_vec(i)));
                if n < 5 && !injective {
                    return Err(format!("transition H^1(U^{}) -> H^1(U^{}) is not injective", n - 1, n));
                }
            }
            prev = Some(c);
        }
        Ok(())
    });
}

// ---- brute-force oracles used above ----------------------------------------------------

/// Invariant factors from gcds of k x k minors (independent of the SNF path).
fn minor_gcd_invariants(m: &[Vec<i64>]) -> Vec<i64> {
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    fn minor_det(m: &[Vec<i64>], ri: &[usize], ci: &[usize]) -> BigInt {
        if ri.is_empty() {
            return BigInt::from(1);
        }
        let mut det = BigInt::from(0);
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
            for rest in subsets(n, k - 1) {
                if rest.iter().all(|&x| x > first) {
                    let mut s = vec![first];
                    s.extend(rest);
                    out.push(s);
                }
            }
        }
        out.retain(|s| s.len() == k);
        out
    }
    let mut gcds = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for ri in subsets(rows, k) {
            for ci in subsets(cols, k) {
                g = num_integer::Integer::gcd(&g, &minor_det(m, &ri, &ci));
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
        inv.push((&g / &prev).abs());
        prev = g;
    }
    inv.into_iter().map(|d| d.to_string().parse().unwrap()).collect()
}

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
