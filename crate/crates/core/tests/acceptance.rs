//! Acceptance suite: one test per criterion, each printing a pass line.
//! Everything is exact arithmetic; the only tolerances are wall-clock
//! budgets, asserted where stated.

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pdcohom_core::cech;
use pdcohom_core::complex::ModuleInvariants;
use pdcohom_core::crystalline::{mod_p_comparison, perturb_lift, LiftSpec};
use pdcohom_core::derham::{
    self, connecting_class_matches_derivation, derham_slice, hodge_graded_rank, index_tuples,
};
use pdcohom_core::envelope::{EnvelopeAlgebra, RegularQuotientPresentation};
use pdcohom_core::pd::{
    pd_gamma, pd_mul, random_pd_element, rational_realization, PdElement, PdMonomial,
};
use pdcohom_core::poly::{parse_polynomial, random_polynomial, IdealMode, Polynomial};
use pdcohom_core::scalar::{binomial, factorial, pd_composition_coefficient, ScalarRing};
use pdcohom_core::selftest::selftest;

fn pass(criterion: u32, name: &str, started: Instant) {
    println!(
        "[acceptance] criterion {criterion} ({name}): PASS ({} ms)",
        started.elapsed().as_millis()
    );
}

/// Criterion 1: all five divided-power axioms hold exactly on 500 random
/// pairs in Gamma_Z(Z^3) truncated at N = 8, in under 10 seconds.
#[test]
fn criterion_01_pd_axiom_suite() {
    let started = Instant::now();
    let z = ScalarRing::integers();
    let (ngens, trunc) = (3usize, 8u32);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..500 {
        let x = random_pd_element(&z, ngens, trunc, 3, &mut rng);
        let y = random_pd_element(&z, ngens, trunc, 3, &mut rng);
        // axiom 1
        assert_eq!(pd_gamma(1, &x).unwrap(), x);
        // axiom 2
        let n = rng.gen_range(2..=4u32);
        let lhs = pd_gamma(n, &x.add(&y).unwrap()).unwrap();
        let mut rhs = PdElement::zero(&z, 0, ngens, trunc);
        for i in 0..=n {
            let gi = if i == 0 {
                PdElement::one(&z, 0, ngens, trunc)
            } else {
                pd_gamma(i, &x).unwrap()
            };
            let gj = if n - i == 0 {
                PdElement::one(&z, 0, ngens, trunc)
            } else {
                pd_gamma(n - i, &y).unwrap()
            };
            rhs = rhs.add(&pd_mul(&gi, &gj).unwrap()).unwrap();
        }
        assert_eq!(lhs, rhs, "axiom 2");
        // axiom 3
        let a = rng.gen_range(-4..=4i64);
        let k = rng.gen_range(2..=3u32);
        assert_eq!(
            pd_gamma(k, &x.scale(&Polynomial::from_i64(&z, 0, a))).unwrap(),
            pd_gamma(k, &x)
                .unwrap()
                .scale(&Polynomial::from_i64(&z, 0, a.pow(k))),
            "axiom 3"
        );
        // axiom 4
        let (m, n4) = (rng.gen_range(1..=2u32), rng.gen_range(2..=3u32));
        assert_eq!(
            pd_mul(&pd_gamma(m, &x).unwrap(), &pd_gamma(n4, &x).unwrap()).unwrap(),
            pd_gamma(m + n4, &x).unwrap().scale(&Polynomial::constant(
                &z,
                0,
                z.from_bigint(&binomial(m + n4, m))
            )),
            "axiom 4"
        );
        // axiom 5
        let (m5, n5) = (rng.gen_range(2..=3u32), 2u32);
        assert_eq!(
            pd_gamma(n5, &pd_gamma(m5, &x).unwrap()).unwrap(),
            pd_gamma(m5 * n5, &x).unwrap().scale(&Polynomial::constant(
                &z,
                0,
                z.from_bigint(&pd_composition_coefficient(m5, n5))
            )),
            "axiom 5"
        );
    }
    assert!(started.elapsed().as_secs() < 10, "budget exceeded");
    pass(1, "pd axiom suite", started);
}

/// Criterion 2: the rational realization intertwines pd_mul and pd_gamma
/// with polynomial arithmetic and f -> f^n/n! on 500 random cases, exactly.
#[test]
fn criterion_02_q_embedding_oracle() {
    let started = Instant::now();
    let z = ScalarRing::integers();
    let q = ScalarRing::rationals();
    let trunc = 8u32;
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    for _ in 0..500 {
        let x = random_pd_element(&z, 3, trunc, 3, &mut rng);
        let y = random_pd_element(&z, 3, trunc, 3, &mut rng);
        let lhs = rational_realization(&pd_mul(&x, &y).unwrap()).unwrap();
        let rhs = rational_realization(&x)
            .unwrap()
            .mul(&rational_realization(&y).unwrap())
            .truncate_degree(trunc - 1);
        assert_eq!(lhs, rhs);
        let n = rng.gen_range(2..=3u32);
        let lhs = rational_realization(&pd_gamma(n, &x).unwrap()).unwrap();
        let rhs = rational_realization(&x)
            .unwrap()
            .pow(n)
            .scale(&q.inv(&q.from_bigint(&factorial(n))).unwrap())
            .truncate_degree(trunc - 1);
        assert_eq!(lhs, rhs);
    }
    assert!(started.elapsed().as_secs() < 10, "budget exceeded");
    pass(2, "Q-embedding oracle", started);
}

/// Criterion 3: envelope structure for I = (t) in Z[t] at N = 10; graded
/// rank one in every weight, the rewriting rule against the Q-oracle, and
/// the filtration laws on 200 random elements.
#[test]
fn criterion_03_envelope_structure() {
    let started = Instant::now();
    let z = ScalarRing::integers();
    let pres = RegularQuotientPresentation::new(
        &z,
        1,
        vec![parse_polynomial(&z, 1, "x0").unwrap()],
        IdealMode::Triangular,
        10,
    )
    .unwrap();
    let env = EnvelopeAlgebra::build(pres, 4).unwrap();
    for n in 0..10u32 {
        assert_eq!(env.graded_piece(n).unwrap().rank(), 1);
    }
    let t = parse_polynomial(&z, 1, "x0").unwrap();
    for n in 1..9u32 {
        let mut yn = env.zero();
        yn.add_term(PdMonomial(vec![n]), Polynomial::one(&z, 1));
        let prod = env.normal_form(&yn.scale(&t));
        let mut expected = env.zero();
        expected.add_term(
            PdMonomial(vec![n + 1]),
            Polynomial::from_i64(&z, 1, (n + 1) as i64),
        );
        assert_eq!(prod, expected, "rewriting t*y^[{n}]");
        assert_eq!(
            env.rational_realization(&yn.scale(&t)).unwrap(),
            env.rational_realization(&prod).unwrap(),
            "Q-oracle at n={n}"
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    for _ in 0..200 {
        let mut a = env.zero();
        let mut b = env.zero();
        for _ in 0..2 {
            a.add_term(
                PdMonomial(vec![rng.gen_range(1..8u32)]),
                random_polynomial(&z, 1, 2, 2, &mut rng),
            );
            b.add_term(
                PdMonomial(vec![rng.gen_range(1..8u32)]),
                random_polynomial(&z, 1, 2, 2, &mut rng),
            );
        }
        let (a, b) = (env.normal_form(&a), env.normal_form(&b));
        let (Some(wa), Some(wb)) = (a.min_weight(), b.min_weight()) else {
            continue;
        };
        assert!(env.mul(&a, &b).unwrap().in_filtration(wa + wb));
        for n in 2..=3u32 {
            assert!(env.gamma(n, &a).unwrap().in_filtration(n * wa));
        }
    }
    pass(3, "envelope structure", started);
}

/// Criterion 4: graded law gr^n rank = C(r+n-1, n) for r <= 4, n <= 7.
#[test]
fn criterion_04_graded_law() {
    let started = Instant::now();
    let z = ScalarRing::integers();
    for r in 1..=4usize {
        let gens: Vec<Polynomial> = (0..r)
            .map(|i| Polynomial::variable(&z, 4, i).unwrap())
            .collect();
        let pres =
            RegularQuotientPresentation::new(&z, 4, gens, IdealMode::Triangular, 8).unwrap();
        let env = EnvelopeAlgebra::build(pres, 4).unwrap();
        for n in 0..=7u32 {
            let expected = binomial(r as u32 + n - 1, n).to_usize().unwrap();
            assert_eq!(env.graded_piece(n).unwrap().rank(), expected, "r={r}, n={n}");
        }
    }
    pass(4, "graded law", started);
}

/// Criterion 5: d.d = 0 and graded Leibniz on 500 random forms (m <= 3,
/// degree <= 20); the Poincare lemma over Q for m in {1,2} through slice 15,
/// verified both by Smith reduction and by the explicit Euler homotopy;
/// under 60 seconds.
#[test]
fn criterion_05_derham() {
    let started = Instant::now();
    let rings = [
        ScalarRing::integers(),
        ScalarRing::rationals(),
        ScalarRing::prime_field(3u32).unwrap(),
        ScalarRing::padic_trunc(2u32, 3).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2027);
    let mut checked = 0usize;
    while checked < 500 {
        for ring in &rings {
            for m in 1..=3usize {
                let w = random_derham_form(ring, m, 20, &mut rng);
                assert!(w.d().d().is_zero());
                let p = rng.gen_range(0..=m);
                let tuples = index_tuples(m, p);
                let s = tuples[rng.gen_range(0..tuples.len())].clone();
                let a = derham::DeRhamForm::from_part(
                    &random_polynomial(ring, m, 10, 4, &mut rng),
                    &s,
                );
                let b = random_derham_form(ring, m, 10, &mut rng);
                let lhs = a.wedge(&b).d();
                let db = if p % 2 == 1 { b.d().neg() } else { b.d() };
                let rhs = a.d().wedge(&b).add(&a.wedge(&db));
                assert_eq!(lhs, rhs, "graded Leibniz");
                checked += 1;
            }
        }
    }
    // Poincare lemma, two independent routes
    let q = ScalarRing::rationals();
    for m in 1..=2usize {
        for d in 0..=15u32 {
            let slice = derham_slice(&q, m, d);
            for n in 0..=m {
                let inv = slice.cohomology_at(n as i64).unwrap();
                if n == 0 && d == 0 {
                    assert_eq!(inv, ModuleInvariants::free(1));
                } else {
                    assert!(inv.is_zero(), "Smith route: H^{n} slice {d}");
                }
            }
            // homotopy route: (d iota + iota d) = d * id on every basis
            // element, so positive slices are exact
            if d > 0 {
                for n in 0..=m {
                    for (s, e) in pdcohom_core::derham::slice_basis(m, n, d) {
                        let b = derham::DeRhamForm::from_part(
                            &Polynomial::monomial(&q, m, &e.0, q.one()),
                            &s,
                        );
                        let lhs = b.euler_contraction().d().add(&b.d().euler_contraction());
                        assert_eq!(lhs, b.scale_by_slice_degree(), "homotopy route");
                    }
                }
                // explicit primitives of exact forms
                let w = random_derham_form(&q, m, 8, &mut rng).d();
                if !w.is_zero() {
                    let primitive = integrate_closed(&q, &w);
                    assert_eq!(primitive.d(), w, "explicit primitive");
                }
            }
        }
    }
    assert!(started.elapsed().as_secs() < 60, "budget exceeded");
    pass(5, "De Rham differential and Poincare lemma", started);
}

fn random_derham_form(
    ring: &ScalarRing,
    m: usize,
    deg: u32,
    rng: &mut ChaCha8Rng,
) -> derham::DeRhamForm {
    let mut out = derham::DeRhamForm::zero(ring, m);
    for _ in 0..rng.gen_range(1..=3) {
        let q = rng.gen_range(0..=m);
        let tuples = index_tuples(m, q);
        let s = tuples[rng.gen_range(0..tuples.len())].clone();
        out.add_part(s, random_polynomial(ring, m, deg, 4, rng));
    }
    out
}

/// Euler primitive of a closed form with no slice-0 component.
fn integrate_closed(ring: &ScalarRing, w: &derham::DeRhamForm) -> derham::DeRhamForm {
    // split into slices, divide the contraction by the slice degree
    let mut out = derham::DeRhamForm::zero(ring, w.nvars);
    // contraction preserves slice degree, so each term of iota(w) divides
    // by its own slice degree deg(mono) + |s|
    let contracted = w.euler_contraction();
    for (s, c) in &contracted.parts {
        for (mono, coef) in &c.terms {
            let deg = mono.total_degree() as i64 + s.len() as i64;
            let inv = ring
                .inv(&ring.from_i64(deg))
                .expect("positive slice degree invertible in Q");
            out.add_part(
                s.clone(),
                Polynomial::monomial(ring, w.nvars, &mono.0, ring.mul(coef, &inv)),
            );
        }
    }
    out
}

/// Criterion 6: Cartier-type count over F_p, one variable: dim H^1 in slice
/// d is 1 exactly when p divides d, through d <= 30, for p in {2, 3, 5}.
#[test]
fn criterion_06_cartier_count() {
    let started = Instant::now();
    for p in [2u32, 3, 5] {
        let fp = ScalarRing::prime_field(p).unwrap();
        for d in 0..=30u32 {
            let slice = derham_slice(&fp, 1, d);
            let h1 = slice.cohomology_at(1).unwrap();
            assert!(h1.torsion.is_empty());
            let expected = usize::from(d > 0 && d % p == 0);
            assert_eq!(h1.free_rank, expected, "p={p}, d={d}");
        }
    }
    pass(6, "Cartier-type count", started);
}

/// Criterion 7: the crystalline mod-p comparison holds per slice for
/// F_p[x] and F_p[x,y], precision 3, d <= 20, p in {2,3,5}; under 5 min.
#[test]
fn criterion_07_crystalline_mod_p_comparison() {
    let started = Instant::now();
    for p in [2u32, 3, 5] {
        for vars in [1usize, 2] {
            let lift = LiftSpec::default_lift(p, 3, vars, vec![], 4).unwrap();
            let rep = mod_p_comparison(&lift, 20).unwrap();
            assert!(rep.pass, "p={p}, vars={vars}");
            rep.ensure_pass().unwrap();
        }
    }
    assert!(started.elapsed().as_secs() < 300, "budget exceeded");
    pass(7, "crystalline mod-p comparison", started);
}

/// Criterion 8: twenty randomized lift pairs for Triangular quotient
/// targets produce identical comparison tables.
#[test]
fn criterion_08_lift_independence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2028);
    let mut pairs = 0;
    while pairs < 20 {
        let p = *[3u32, 5, 7].iter().nth(rng.gen_range(0..3)).unwrap();
        let fp = ScalarRing::prime_field(p).unwrap();
        // random triangular target: y = g(x) in F_p[x, y]
        let mut g = random_polynomial(&fp, 2, 3, 3, &mut rng);
        g = g.substitute(1, &Polynomial::zero(&fp, 2));
        let target = Polynomial::variable(&fp, 2, 1).unwrap().sub(&g);
        let spec = LiftSpec::default_lift(p, 3, 2, vec![target], 4).unwrap();
        let lift_a = perturb_lift(&spec, &mut rng).unwrap();
        let lift_b = perturb_lift(&spec, &mut rng).unwrap();
        let rep_a = mod_p_comparison(&lift_a, 6).unwrap();
        let rep_b = mod_p_comparison(&lift_b, 6).unwrap();
        assert!(rep_a.pass && rep_b.pass);
        assert_eq!(rep_a.structural.len(), rep_b.structural.len());
        for (a, b) in rep_a.structural.iter().zip(&rep_b.structural) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.lift_side, b.lift_side, "tables differ at {}", a.label);
            assert_eq!(a.target_side, b.target_side);
        }
        pairs += 1;
    }
    pass(8, "lift independence", started);
}

/// Criterion 9: for R in {Q, F_3, Z}, m <= 2 and weights n <= 3 with caps
/// M = n+1 and M = n+2, the totalized weight-n cohomology equals the
/// exterior-power model in every slice d <= 8, including integral torsion;
/// under 10 minutes.
#[test]
fn criterion_09_cech_alexander() {
    let started = Instant::now();
    let rings = [
        ScalarRing::rationals(),
        ScalarRing::prime_field(3u32).unwrap(),
        ScalarRing::integers(),
    ];
    for ring in &rings {
        for m in 1..=2usize {
            for n in 0..=3u32 {
                let mut tables = Vec::new();
                for cap in [n as usize + 1, n as usize + 2] {
                    let c = cech::build_cech(ring, m, cap, n + 1).unwrap();
                    let table = cech::totalize_weight(&c, n, 8).unwrap();
                    for (&(deg, d), inv) in &table {
                        let expected = if deg == n as i64 {
                            hodge_graded_rank(m, d, n as usize)
                        } else {
                            0
                        };
                        assert_eq!(
                            inv.free_rank, expected,
                            "ring={ring}, m={m}, n={n}, M={cap}, deg={deg}, d={d}"
                        );
                        assert!(
                            inv.torsion.is_empty(),
                            "spurious torsion: ring={ring}, m={m}, n={n}, d={d}"
                        );
                    }
                    tables.push(table);
                }
                // stability across the two caps on shared degrees
                for (&(deg, d), inv) in &tables[0] {
                    assert_eq!(inv, &tables[1][&(deg, d)], "cap instability");
                }
            }
        }
    }
    assert!(started.elapsed().as_secs() < 600, "budget exceeded");
    pass(9, "Cech-Alexander totalization", started);
}

/// Criterion 10: universal square-zero extension for I = (x, y) in Z[x, y]:
/// conormal module free of rank 2, and the connecting class matches the
/// universal derivation under the conormal identification.
#[test]
fn criterion_10_square_zero_extension() {
    let started = Instant::now();
    let z = ScalarRing::integers();
    let gens = vec![
        parse_polynomial(&z, 2, "x0").unwrap(),
        parse_polynomial(&z, 2, "x1").unwrap(),
    ];
    let pres =
        RegularQuotientPresentation::new(&z, 2, gens.clone(), IdealMode::Triangular, 3).unwrap();
    let env = EnvelopeAlgebra::build(pres, 3).unwrap();
    let data = env.square_zero_truncation(2).unwrap();
    assert_eq!(data.conormal_rank, 2);
    assert_eq!(data.extension_basis, vec!["1", "[x0]", "[x1]"]);
    // connecting class vs universal derivation, on generators and on
    // random ideal elements
    for f in &gens {
        assert!(connecting_class_matches_derivation(&env, f).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2029);
    for _ in 0..50 {
        let a = random_polynomial(&z, 2, 3, 3, &mut rng);
        let b = random_polynomial(&z, 2, 3, 3, &mut rng);
        let f = gens[0].mul(&a).add(&gens[1].mul(&b));
        assert!(connecting_class_matches_derivation(&env, &f).unwrap());
    }
    pass(10, "universal square-zero extension", started);
}

/// Criterion 11: the full selftest produces identical report hashes across
/// 10 runs with 1 and 8 worker threads.
#[test]
fn criterion_11_determinism() {
    let started = Instant::now();
    let mut hashes = Vec::new();
    for threads in [1usize, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        for _ in 0..5 {
            let report = pool.install(|| selftest(42)).unwrap();
            assert!(report.passed());
            hashes.push(report.content_hash());
        }
    }
    assert_eq!(hashes.len(), 10);
    assert!(
        hashes.iter().all(|h| h == &hashes[0]),
        "hashes diverged: {hashes:?}"
    );
    pass(11, "determinism", started);
}

/// The decalage rank dictionary used throughout: weight-n divided powers
/// against degree-n exterior powers (companion bookkeeping for criterion 4).
#[test]
fn rank_dictionary_companion() {
    let started = Instant::now();
    for r in 1..=4usize {
        for n in 0..=7u32 {
            let gamma_rank = pdcohom_core::pd::pd_monomials_of_weight(r, n).len();
            assert_eq!(
                gamma_rank,
                binomial(r as u32 + n - 1, n).to_usize().unwrap()
            );
            let lambda_rank = index_tuples(r, n as usize).len();
            assert_eq!(lambda_rank, binomial(r as u32, n).to_usize().unwrap());
        }
    }
    let _ = BigUint::from(1u32);
    pass(0, "rank dictionary companion", started);
}
