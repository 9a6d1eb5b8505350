//! Weight-truncated free divided-power algebras over a polynomial
//! coefficient ring, with the full gamma-operation calculus.
//!
//! Elements are sums `c * y0^[e0] * y1^[e1] * ...` where the `c` are
//! polynomials in the base ring and `y^[e]` denotes the divided-power
//! monomial `gamma_{e0}(y0) * gamma_{e1}(y1) * ...` of weight `sum e_i`.
//! All arithmetic drops terms of weight `>= N`, the truncation bound; the
//! graded pieces below `N` are exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{monomials_of_degree, MonomialExp, Polynomial};
use crate::scalar::{binomial, factorial, pd_composition_coefficient, ScalarRing};

/// Divided-power monomial: exponents over the pd generators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PdMonomial(pub Vec<u32>);

impl PdMonomial {
    pub fn unit(ngens: usize) -> Self {
        PdMonomial(vec![0; ngens])
    }

    pub fn generator(i: usize, ngens: usize) -> Self {
        let mut e = vec![0; ngens];
        e[i] = 1;
        PdMonomial(e)
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
    }
}

/// All pd monomials of weight exactly `w` over `ngens` generators.
pub fn pd_monomials_of_weight(ngens: usize, w: u32) -> Vec<PdMonomial> {
    monomials_of_degree(ngens, w)
        .into_iter()
        .map(|m| PdMonomial(m.0))
        .collect()
}

/// Element of the weight-truncated free divided-power algebra
/// `A<y_1..y_r> / Fil^N` with polynomial coefficients in `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdElement {
    pub ring: ScalarRing,
    pub nvars: usize,
    pub ngens: usize,
    pub truncation: u32,
    pub terms: BTreeMap<PdMonomial, Polynomial>,
}

impl PdElement {
    pub fn zero(ring: &ScalarRing, nvars: usize, ngens: usize, truncation: u32) -> Self {
        PdElement {
            ring: ring.clone(),
            nvars,
            ngens,
            truncation,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &ScalarRing, nvars: usize, ngens: usize, truncation: u32) -> Self {
        let mut e = Self::zero(ring, nvars, ngens, truncation);
        e.add_term(PdMonomial::unit(ngens), Polynomial::one(ring, nvars));
        e
    }

    pub fn generator(
        ring: &ScalarRing,
        nvars: usize,
        ngens: usize,
        truncation: u32,
        i: usize,
    ) -> Self {
        let mut e = Self::zero(ring, nvars, ngens, truncation);
        e.add_term(
            PdMonomial::generator(i, ngens),
            Polynomial::one(ring, nvars),
        );
        e
    }

    /// Coefficient polynomial embedded in weight 0.
    pub fn from_coefficient(c: &Polynomial, ngens: usize, truncation: u32) -> Self {
        let mut e = Self::zero(&c.ring, c.nvars, ngens, truncation);
        e.add_term(PdMonomial::unit(ngens), c.clone());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: PdMonomial, c: Polynomial) {
        if c.is_zero() || mono.weight() >= self.truncation {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn check_compatible(&self, other: &PdElement) -> Result<()> {
        if self.ring != other.ring || self.nvars != other.nvars || self.ngens != other.ngens {
            return Err(Error::RingMismatch);
        }
        if self.truncation != other.truncation {
            return Err(Error::TruncationMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &PdElement) -> Result<PdElement> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> PdElement {
        let mut out = Self::zero(&self.ring, self.nvars, self.ngens, self.truncation);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &PdElement) -> Result<PdElement> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Polynomial) -> PdElement {
        let mut out = Self::zero(&self.ring, self.nvars, self.ngens, self.truncation);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.mul(c));
        }
        out
    }

    /// Minimal weight among the terms (`None` for zero): the pd filtration
    /// stage this element certifiably lives in.
    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.weight()).min()
    }

    /// The weight-exactly-`w` homogeneous part.
    pub fn weight_part(&self, w: u32) -> PdElement {
        let mut out = Self::zero(&self.ring, self.nvars, self.ngens, self.truncation);
        for (m, c) in &self.terms {
            if m.weight() == w {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Whether the element lies in filtration stage `Fil^n`.
    pub fn in_filtration(&self, n: u32) -> bool {
        self.min_weight().is_none_or(|w| w >= n)
    }
}

/// Monomial product rule `y^[e] * y^[f] = prod_i C(e_i + f_i, e_i) * y^[e+f]`.
fn monomial_product_coefficient(a: &PdMonomial, b: &PdMonomial) -> BigInt {
    let mut acc = BigInt::one();
    for (x, y) in a.0.iter().zip(&b.0) {
        if *x > 0 && *y > 0 {
            acc *= binomial(x + y, *x);
        }
    }
    acc
}

/// Product in the truncated free divided-power algebra.
pub fn pd_mul(a: &PdElement, b: &PdElement) -> Result<PdElement> {
    a.check_compatible(b)?;
    let ring = &a.ring;
    let mut out = PdElement::zero(ring, a.nvars, a.ngens, a.truncation);
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            if ma.weight() + mb.weight() >= a.truncation {
                continue;
            }
            let mono = PdMonomial(ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect());
            let coef = ring.from_bigint(&monomial_product_coefficient(ma, mb));
            let c = ca.mul(cb).scale(&coef);
            out.add_term(mono, c);
        }
    }
    Ok(out)
}

/// `gamma_n` of a single pd monomial: `(n!)^(s-1) * prod_i comp(e_i, n)`
/// times `y^[n*e]`, where `s` is the support size. The factorized product
/// rule keeps the operation valid over every coefficient ring; the rational
/// realization validates it wherever both exist.
fn gamma_of_monomial(mono: &PdMonomial, n: u32) -> (PdMonomial, BigInt) {
    let support: Vec<usize> = mono.support().collect();
    assert!(!support.is_empty(), "gamma of a weight-0 monomial");
    let mut coef = BigInt::one();
    let nfact = factorial(n);
    for _ in 1..support.len() {
        coef *= &nfact;
    }
    for &i in &support {
        coef *= pd_composition_coefficient(mono.0[i], n);
    }
    (PdMonomial(mono.0.iter().map(|e| e * n).collect()), coef)
}

/// `gamma_n` on an augmentation-ideal element: expand by the sum rule over
/// the terms, apply the scalar rule to coefficients and the composition and
/// product rules on each monomial.
pub fn pd_gamma(n: u32, a: &PdElement) -> Result<PdElement> {
    assert!(n >= 1, "gamma_n needs n >= 1");
    let unit = PdMonomial::unit(a.ngens);
    if a.terms.contains_key(&unit) {
        return Err(Error::NotInAugmentationIdeal);
    }
    let ring = &a.ring;
    let terms: Vec<(&PdMonomial, &Polynomial)> = a.terms.iter().collect();
    let mut out = PdElement::zero(ring, a.nvars, a.ngens, a.truncation);

    // compositions of n over the terms (sum rule expansion)
    fn compositions(n: u32, k: usize) -> Vec<Vec<u32>> {
        if k == 0 {
            return if n == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 0..=n {
            for mut rest in compositions(n - first, k - 1) {
                let mut v = vec![first];
                v.append(&mut rest);
                out.push(v);
            }
        }
        out
    }

    for comp in compositions(n, terms.len()) {
        // gamma_j multiplies weight by j; skip overflowing contributions
        let weight: u32 = comp
            .iter()
            .zip(&terms)
            .map(|(&j, (m, _))| j * m.weight())
            .sum();
        if weight >= a.truncation {
            continue;
        }
        let mut mono = PdMonomial::unit(a.ngens);
        let mut num = BigInt::one();
        let mut coeff = Polynomial::one(ring, a.nvars);
        let mut first = true;
        for (&j, (m, c)) in comp.iter().zip(&terms) {
            if j == 0 {
                continue;
            }
            let (gm, gc) = gamma_of_monomial(m, j);
            num *= gc;
            // scalar rule: coefficients exit to the j-th power
            coeff = coeff.mul(&c.pow(j));
            if first {
                mono = gm;
                first = false;
            } else {
                num *= monomial_product_coefficient(&mono, &gm);
                mono = PdMonomial(mono.0.iter().zip(&gm.0).map(|(x, y)| x + y).collect());
            }
        }
        let scaled = coeff.scale(&ring.from_bigint(&num));
        out.add_term(mono, scaled);
    }
    Ok(out)
}

/// Embedding into the rational polynomial ring: the coefficient variables
/// come first, then one variable per pd generator, and
/// `y^[e] -> prod y_i^{e_i} / e_i!`.
pub fn rational_realization(a: &PdElement) -> Result<Polynomial> {
    let q = ScalarRing::rationals();
    let nv = a.nvars + a.ngens;
    let mut out = Polynomial::zero(&q, nv);
    for (m, c) in &a.terms {
        let mut denom = BigInt::one();
        for &e in &m.0 {
            denom *= factorial(e);
        }
        let scale = q
            .inv(&q.from_bigint(&denom))
            .expect("factorial is invertible in Q");
        for (pm, pc) in &c.terms {
            let mut exps = vec![0u32; nv];
            exps[..a.nvars].copy_from_slice(&pm.0);
            for (i, &e) in m.0.iter().enumerate() {
                exps[a.nvars + i] = e;
            }
            let rat = a.ring.embed_rational(pc)?;
            let coef = q.mul(&crate::scalar::Scalar::Rat(rat), &scale);
            out.add_term(MonomialExp(exps), coef);
        }
    }
    Ok(out)
}

/// Norm map from the symmetric algebra: the algebra map `y_i -> gamma_1(y_i)`,
/// so the monomial `y^e` lands on `(prod e_i!) * y^[e]`.
///
/// The input is a polynomial in the pd-generator variables only.
pub fn norm_from_sym(
    f: &Polynomial,
    ring: &ScalarRing,
    nvars: usize,
    truncation: u32,
) -> Result<PdElement> {
    if !ring.is_zero(&f.constant_term()) {
        return Err(Error::NonzeroConstantTerm);
    }
    let ngens = f.nvars;
    let mut out = PdElement::zero(ring, nvars, ngens, truncation);
    for (m, c) in &f.terms {
        let mut num = BigInt::one();
        for &e in &m.0 {
            num *= factorial(e);
        }
        let coef = ring.mul(c, &ring.from_bigint(&num));
        out.add_term(
            PdMonomial(m.0.clone()),
            Polynomial::constant(ring, nvars, coef),
        );
    }
    Ok(out)
}

/// Matrix of the weight-`w` piece of the norm map on the monomial bases,
/// over the integers: diagonal with entries `prod e_i!`.
pub fn norm_weight_matrix(ngens: usize, w: u32) -> crate::linalg::Matrix {
    let z = ScalarRing::integers();
    let monos = pd_monomials_of_weight(ngens, w);
    crate::linalg::Matrix::from_fn(&z, monos.len(), monos.len(), |i, j| {
        if i != j {
            return z.zero();
        }
        let mut num = BigInt::one();
        for &e in &monos[i].0 {
            num *= factorial(e);
        }
        z.from_bigint(&num)
    })
}

impl fmt::Display for PdElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let coeff = if c.is_constant() {
                self.ring.render(&c.constant_term())
            } else {
                format!("({c})")
            };
            let mut factors = Vec::new();
            if coeff != "1" || m.weight() == 0 {
                factors.push(coeff);
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    factors.push(format!("g{i}^[{e}]"));
                }
            }
            parts.push(factors.join(" * "));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Uniform random augmentation-ideal element for the property suites.
pub fn random_pd_element(
    ring: &ScalarRing,
    ngens: usize,
    trunc: u32,
    max_terms: usize,
    rng: &mut impl rand::Rng,
) -> PdElement {
    let mut out = PdElement::zero(ring, 0, ngens, trunc);
    let monos: Vec<PdMonomial> = (1..trunc)
        .flat_map(|w| pd_monomials_of_weight(ngens, w))
        .collect();
    for _ in 0..rng.gen_range(1..=max_terms) {
        let m = monos[rng.gen_range(0..monos.len())].clone();
        let c = Polynomial::from_i64(ring, 0, rng.gen_range(-4..=4));
        out.add_term(m, c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{smith_normal_form, TransformRequest};
    use crate::poly::parse_polynomial;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gamma_free(ring: &ScalarRing, ngens: usize, n: u32) -> PdElement {
        PdElement::zero(ring, 0, ngens, n)
    }

    fn gen(ring: &ScalarRing, ngens: usize, trunc: u32, i: usize) -> PdElement {
        PdElement::generator(ring, 0, ngens, trunc, i)
    }

    fn gamma_single(ring: &ScalarRing, ngens: usize, trunc: u32, i: usize, e: u32) -> PdElement {
        let mut out = gamma_free(ring, ngens, trunc);
        let mut mono = PdMonomial::unit(ngens);
        mono.0[i] = e;
        out.add_term(mono, Polynomial::one(ring, 0));
        out
    }

    #[test]
    fn product_rule_examples() {
        let z = ScalarRing::integers();
        // gamma_2(y) * gamma_3(y) = C(5,2) gamma_5(y) = 10 gamma_5(y)
        let a = gamma_single(&z, 1, 8, 0, 2);
        let b = gamma_single(&z, 1, 8, 0, 3);
        let expected = gamma_single(&z, 1, 8, 0, 5).scale(&Polynomial::from_i64(&z, 0, 10));
        assert_eq!(pd_mul(&a, &b).unwrap(), expected);

        // gamma_1(y)^2 = 2 gamma_2(y)
        let y = gen(&z, 1, 8, 0);
        let expected = gamma_single(&z, 1, 8, 0, 2).scale(&Polynomial::from_i64(&z, 0, 2));
        assert_eq!(pd_mul(&y, &y).unwrap(), expected);

        // disjoint generators multiply with coefficient 1
        let y1 = gen(&z, 2, 8, 0);
        let y2 = gen(&z, 2, 8, 1);
        let prod = pd_mul(&y1, &y2).unwrap();
        assert_eq!(prod.terms.len(), 1);
        let (m, c) = prod.terms.iter().next().unwrap();
        assert_eq!(m, &PdMonomial(vec![1, 1]));
        assert!(c.is_constant() && z.is_one(&c.constant_term()));

        // truncation mismatch is rejected
        let other = gen(&z, 1, 9, 0);
        assert_eq!(pd_mul(&y, &other).unwrap_err(), Error::TruncationMismatch);
    }

    #[test]
    fn gamma_examples() {
        let z = ScalarRing::integers();
        // gamma_2(y1 + y2) = gamma_2(y1) + y1 y2 + gamma_2(y2)
        let sum = gen(&z, 2, 8, 0).add(&gen(&z, 2, 8, 1)).unwrap();
        let g = pd_gamma(2, &sum).unwrap();
        let mut expected = gamma_free(&z, 2, 8);
        expected.add_term(PdMonomial(vec![2, 0]), Polynomial::one(&z, 0));
        expected.add_term(PdMonomial(vec![1, 1]), Polynomial::one(&z, 0));
        expected.add_term(PdMonomial(vec![0, 2]), Polynomial::one(&z, 0));
        assert_eq!(g, expected);

        // gamma_2(gamma_2(y)) = 3 gamma_4(y)
        let g22 = pd_gamma(2, &gamma_single(&z, 1, 8, 0, 2)).unwrap();
        assert_eq!(
            g22,
            gamma_single(&z, 1, 8, 0, 4).scale(&Polynomial::from_i64(&z, 0, 3))
        );

        // gamma_3(2 y) = 8 gamma_3(y)
        let two_y = gen(&z, 1, 8, 0).scale(&Polynomial::from_i64(&z, 0, 2));
        assert_eq!(
            pd_gamma(3, &two_y).unwrap(),
            gamma_single(&z, 1, 8, 0, 3).scale(&Polynomial::from_i64(&z, 0, 8))
        );

        // weight-0 components are rejected
        let bad = PdElement::one(&z, 0, 1, 8);
        assert_eq!(pd_gamma(2, &bad).unwrap_err(), Error::NotInAugmentationIdeal);
    }

    #[test]
    fn realization_examples() {
        let z = ScalarRing::integers();
        let q = ScalarRing::rationals();
        // gamma_3(y) -> y^3/6
        let r = rational_realization(&gamma_single(&z, 1, 8, 0, 3)).unwrap();
        assert_eq!(r, parse_polynomial(&q, 1, "1/6*x0^3").unwrap());
        // gamma_1(y) -> y
        let r = rational_realization(&gen(&z, 1, 8, 0)).unwrap();
        assert_eq!(r, parse_polynomial(&q, 1, "x0").unwrap());
        // gamma_2(y1) gamma_1(y2) -> y1^2 y2 / 2
        let mut e = gamma_free(&z, 2, 8);
        e.add_term(PdMonomial(vec![2, 1]), Polynomial::one(&z, 0));
        let r = rational_realization(&e).unwrap();
        assert_eq!(r, parse_polynomial(&q, 2, "1/2*x0^2*x1").unwrap());
    }

    #[test]
    fn norm_examples() {
        let z = ScalarRing::integers();
        // y^2 -> 2 gamma_2(y)
        let f = parse_polynomial(&z, 1, "x0^2").unwrap();
        let n = norm_from_sym(&f, &z, 0, 8).unwrap();
        assert_eq!(
            n,
            gamma_single(&z, 1, 8, 0, 2).scale(&Polynomial::from_i64(&z, 0, 2))
        );
        // y -> gamma_1(y)
        let f = parse_polynomial(&z, 1, "x0").unwrap();
        assert_eq!(norm_from_sym(&f, &z, 0, 8).unwrap(), gen(&z, 1, 8, 0));
        // y1^2 y2 -> 2 gamma_2(y1) gamma_1(y2)
        let f = parse_polynomial(&z, 2, "x0^2*x1").unwrap();
        let n = norm_from_sym(&f, &z, 0, 8).unwrap();
        let mut expected = gamma_free(&z, 2, 8);
        expected.add_term(PdMonomial(vec![2, 1]), Polynomial::from_i64(&z, 0, 2));
        assert_eq!(n, expected);
        // oracle: rational realization recovers the plain polynomial
        let q = ScalarRing::rationals();
        let r = rational_realization(&n).unwrap();
        assert_eq!(r, parse_polynomial(&q, 2, "x0^2*x1").unwrap());

        let bad = parse_polynomial(&z, 1, "x0 + 1").unwrap();
        assert_eq!(
            norm_from_sym(&bad, &z, 0, 8).unwrap_err(),
            Error::NonzeroConstantTerm
        );
    }

    #[test]
    fn five_axioms_on_random_pairs() {
        let z = ScalarRing::integers();
        let trunc = 8;
        let ngens = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..120 {
            let x = random_pd_element(&z, ngens, trunc, 3, &mut rng);
            let y = random_pd_element(&z, ngens, trunc, 3, &mut rng);
            // axiom 1: gamma_1 = id
            assert_eq!(pd_gamma(1, &x).unwrap(), x);
            // axiom 2: sum rule
            for n in 2..=4u32 {
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
                assert_eq!(lhs, rhs, "sum rule failed at n={n}");
            }
            // axiom 3: scalar rule
            let a = rng.gen_range(-3..=3i64);
            let ax = x.scale(&Polynomial::from_i64(&z, 0, a));
            for n in 2..=3u32 {
                let lhs = pd_gamma(n, &ax).unwrap();
                let rhs = pd_gamma(n, &x)
                    .unwrap()
                    .scale(&Polynomial::from_i64(&z, 0, a.pow(n)));
                assert_eq!(lhs, rhs, "scalar rule failed at n={n}");
            }
            // axiom 4: product rule on a single element
            for (m, n) in [(1u32, 2u32), (2, 2), (2, 3)] {
                let gm = pd_gamma(m, &x).unwrap();
                let gn = pd_gamma(n, &x).unwrap();
                let lhs = pd_mul(&gm, &gn).unwrap();
                let coef = binomial(m + n, m);
                let rhs = pd_gamma(m + n, &x)
                    .unwrap()
                    .scale(&Polynomial::constant(&z, 0, z.from_bigint(&coef)));
                assert_eq!(lhs, rhs, "product rule failed at ({m},{n})");
            }
            // axiom 5: composition rule
            for (m, n) in [(2u32, 2u32), (2, 3), (3, 2)] {
                let inner = pd_gamma(m, &x).unwrap();
                let lhs = pd_gamma(n, &inner).unwrap();
                let coef = pd_composition_coefficient(m, n);
                let rhs = pd_gamma(m * n, &x)
                    .unwrap()
                    .scale(&Polynomial::constant(&z, 0, z.from_bigint(&coef)));
                assert_eq!(lhs, rhs, "composition rule failed at ({m},{n})");
            }
        }
    }

    #[test]
    fn realization_intertwines_operations() {
        let z = ScalarRing::integers();
        let q = ScalarRing::rationals();
        let trunc = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..200 {
            let x = random_pd_element(&z, 3, trunc, 3, &mut rng);
            let y = random_pd_element(&z, 3, trunc, 3, &mut rng);
            // ring homomorphism; compare below the shared truncation weight
            let lhs = rational_realization(&pd_mul(&x, &y).unwrap()).unwrap();
            let rhs = rational_realization(&x)
                .unwrap()
                .mul(&rational_realization(&y).unwrap());
            assert_eq!(lhs, rhs.truncate_degree(trunc - 1));
            // gamma_n realizes as f^n / n!
            for n in 2..=3u32 {
                let lhs = rational_realization(&pd_gamma(n, &x).unwrap()).unwrap();
                let inv_fact = q.inv(&q.from_bigint(&factorial(n))).unwrap();
                let rhs = rational_realization(&x).unwrap().pow(n).scale(&inv_fact);
                assert_eq!(lhs, rhs.truncate_degree(trunc - 1), "gamma_{n} realization");
            }
        }
    }

    #[test]
    fn weight_rank_dictionary() {
        // weight-n piece of Gamma(Z^r) has rank C(r+n-1, n); the exterior
        // counterpart Lambda^n(Z^r) has rank C(r, n)
        for r in 1..=4usize {
            for n in 0..8u32 {
                let rank = pd_monomials_of_weight(r, n).len();
                assert_eq!(rank, binomial(r as u32 + n - 1, n).to_usize().unwrap());
                let ext = binomial(r as u32, n).to_usize().unwrap();
                let subsets = (0..(1u32 << r)).filter(|s| s.count_ones() == n).count();
                assert_eq!(ext, subsets);
            }
        }
    }

    #[test]
    fn norm_cokernel_divides_factorial() {
        for r in 1..=3usize {
            for w in 1..=6u32 {
                let m = norm_weight_matrix(r, w);
                let d = smith_normal_form(&m, TransformRequest::none());
                let z = ScalarRing::integers();
                let nf = factorial(w);
                for inv in &d.diag {
                    assert!(
                        z.div_exact(&z.from_bigint(&nf), inv).is_some(),
                        "invariant factor {inv:?} does not divide {w}!"
                    );
                }
            }
        }
    }

    #[test]
    fn gamma_respects_filtration() {
        let z = ScalarRing::integers();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..200 {
            let x = random_pd_element(&z, 3, 8, 3, &mut rng);
            let Some(a) = x.min_weight() else { continue };
            for n in 2..=3u32 {
                let g = pd_gamma(n, &x).unwrap();
                assert!(g.in_filtration(n * a), "gamma_{n} dropped filtration");
            }
        }
    }

    #[test]
    fn display_format() {
        let z = ScalarRing::integers();
        let mut e = gamma_free(&z, 2, 8);
        e.add_term(PdMonomial(vec![2, 1]), Polynomial::from_i64(&z, 0, 3));
        e.add_term(PdMonomial(vec![1, 0]), Polynomial::from_i64(&z, 0, 1));
        assert_eq!(e.to_string(), "g0^[1] + 3 * g0^[2] * g1^[1]");
    }
}
