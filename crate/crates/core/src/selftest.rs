//! Fixed self-test battery: seeded property samples plus a canonical set of
//! jobs through the dispatcher. The resulting report is byte-identical
//! across runs and thread counts for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::envelope::{EnvelopeAlgebra, RegularQuotientPresentation};
use crate::error::Result;
use crate::job::parse_job;
use crate::linalg::{smith_normal_form, TransformRequest};
use crate::pd::{
    norm_weight_matrix, pd_gamma, pd_mul, random_pd_element, rational_realization, PdMonomial,
};
use crate::poly::{parse_polynomial, IdealMode, Polynomial};
use crate::report::{run_job, Report};
use crate::scalar::{factorial, ScalarRing};

/// Run the full battery with the given seed.
pub fn selftest(seed: u64) -> Result<Report> {
    let started = std::time::Instant::now();
    let mut report = Report::new("selftest", &format!("{{\"seed\":{seed}}}"));

    report.add_verdict("scalar_ring_laws", scalar_laws(seed ^ 0x01));
    report.add_verdict("pd_axioms_sample", pd_axioms(seed ^ 0x02));
    report.add_verdict("rational_realization_sample", realization(seed ^ 0x03));
    report.add_verdict("envelope_rewriting_oracle", envelope_oracle()?);
    norm_cokernel_table(&mut report);

    // canonical jobs through the dispatcher
    let jobs = [
        ("poincare_q", r#"{"command":"derham","ring":"Q","vars":1,"D":8}"#),
        ("cartier_f3", r#"{"command":"derham","ring":"Fp","p":3,"vars":1,"D":12}"#),
        ("integral_torsion", r#"{"command":"derham","ring":"Z","vars":1,"D":6}"#),
        (
            "envelope_zt",
            r#"{"command":"envelope","ring":"Z","vars":1,"gens":["x0"],"N":8,"D":4}"#,
        ),
        (
            "modp_comparison",
            r#"{"command":"compare-modp","p":3,"precision":2,"vars":1,"D":10}"#,
        ),
        (
            "cech_q",
            r#"{"command":"compare-cech","ring":"Q","vars":1,"M":3,"N":3,"D":5}"#,
        ),
        (
            "cech_z",
            r#"{"command":"compare-cech","ring":"Z","vars":1,"M":3,"N":2,"D":4}"#,
        ),
        (
            "probe_regular",
            r#"{"command":"probe","ring":"Q","vars":2,"gens":["x0","x1"],"D":5}"#,
        ),
    ];
    for (name, text) in jobs {
        let spec = parse_job(text).map_err(crate::job::JobSpec::to_error)?;
        let sub = run_job(&spec)?;
        let sub_passed = sub.passed();
        for (title, csv) in sub.tables {
            report.add_table(&format!("{name}/{title}"), csv);
        }
        report.add_verdict(name, sub_passed);
    }

    report.wall_ms = started.elapsed().as_millis();
    Ok(report)
}

fn scalar_laws(seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rings = [
        ScalarRing::integers(),
        ScalarRing::rationals(),
        ScalarRing::prime_field(7u32).unwrap(),
        ScalarRing::padic_trunc(2u32, 4).unwrap(),
    ];
    for ring in &rings {
        for _ in 0..100 {
            let a = ring.from_i64(rng.gen_range(-40..=40));
            let b = ring.from_i64(rng.gen_range(-40..=40));
            let c = ring.from_i64(rng.gen_range(-40..=40));
            if ring.add(&a, &b) != ring.add(&b, &a)
                || ring.mul(&ring.mul(&a, &b), &c) != ring.mul(&a, &ring.mul(&b, &c))
                || ring.mul(&a, &ring.add(&b, &c))
                    != ring.add(&ring.mul(&a, &b), &ring.mul(&a, &c))
            {
                return false;
            }
        }
    }
    true
}

fn pd_axioms(seed: u64) -> bool {
    let z = ScalarRing::integers();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..30 {
        let x = random_pd_element(&z, 2, 5, 2, &mut rng);
        let y = random_pd_element(&z, 2, 5, 2, &mut rng);
        let Ok(sum) = x.add(&y) else { return false };
        for n in 2..=3u32 {
            let Ok(lhs) = pd_gamma(n, &sum) else { return false };
            let mut rhs = crate::pd::PdElement::zero(&z, 0, 2, 5);
            for i in 0..=n {
                let gi = if i == 0 {
                    crate::pd::PdElement::one(&z, 0, 2, 5)
                } else {
                    pd_gamma(i, &x).unwrap()
                };
                let gj = if n - i == 0 {
                    crate::pd::PdElement::one(&z, 0, 2, 5)
                } else {
                    pd_gamma(n - i, &y).unwrap()
                };
                rhs = rhs.add(&pd_mul(&gi, &gj).unwrap()).unwrap();
            }
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

fn realization(seed: u64) -> bool {
    let z = ScalarRing::integers();
    let q = ScalarRing::rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..30 {
        let x = random_pd_element(&z, 2, 5, 2, &mut rng);
        let y = random_pd_element(&z, 2, 5, 2, &mut rng);
        let lhs = rational_realization(&pd_mul(&x, &y).unwrap()).unwrap();
        let rhs = rational_realization(&x)
            .unwrap()
            .mul(&rational_realization(&y).unwrap())
            .truncate_degree(4);
        if lhs != rhs {
            return false;
        }
        let lhs = rational_realization(&pd_gamma(2, &x).unwrap()).unwrap();
        let inv = q.inv(&q.from_bigint(&factorial(2))).unwrap();
        let rhs = rational_realization(&x)
            .unwrap()
            .pow(2)
            .scale(&inv)
            .truncate_degree(4);
        if lhs != rhs {
            return false;
        }
    }
    true
}

fn envelope_oracle() -> Result<bool> {
    // t * y^[n] = (n+1) y^[n+1] in the envelope of (t), against the Q-oracle
    let z = ScalarRing::integers();
    let pres = RegularQuotientPresentation::new(
        &z,
        1,
        vec![parse_polynomial(&z, 1, "x0")?],
        IdealMode::Triangular,
        8,
    )?;
    let env = EnvelopeAlgebra::build(pres, 3)?;
    let t = parse_polynomial(&z, 1, "x0")?;
    for n in 1..7u32 {
        let mut yn = env.zero();
        yn.add_term(PdMonomial(vec![n]), Polynomial::one(&z, 1));
        let prod = env.normal_form(&yn.scale(&t));
        let mut expected = env.zero();
        expected.add_term(
            PdMonomial(vec![n + 1]),
            Polynomial::from_i64(&z, 1, (n + 1) as i64),
        );
        if prod != expected {
            return Ok(false);
        }
        if env.rational_realization(&yn.scale(&t))? != env.rational_realization(&prod)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn norm_cokernel_table(report: &mut Report) {
    let mut csv = String::from("generators,weight,invariant_factors\n");
    let mut pass = true;
    let z = ScalarRing::integers();
    for r in 1..=2usize {
        for w in 1..=4u32 {
            let m = norm_weight_matrix(r, w);
            let d = smith_normal_form(&m, TransformRequest::none());
            let rendered: Vec<String> = d.diag.iter().map(|s| z.render(s)).collect();
            csv.push_str(&format!("{r},{w},{}\n", rendered.join(";")));
            let nf = factorial(w);
            for inv in &d.diag {
                pass &= z.div_exact(&z.from_bigint(&nf), inv).is_some();
            }
        }
    }
    report.add_table("norm_cokernel", csv);
    report.add_verdict("norm_cokernel_divides_factorial", pass);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_and_is_deterministic() {
        let a = selftest(7).unwrap();
        assert!(a.passed());
        let b = selftest(7).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        // a different seed reruns the random suites but the verdicts hold
        let c = selftest(8).unwrap();
        assert!(c.passed());
    }
}
