//! Sparse multivariate polynomials with exponent-map representation, plus
//! normal forms modulo the two supported ideal presentations.
//!
//! The monomial order is graded-lex everywhere; it only matters for
//! determinism of serialized output, never for correctness.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarRing};

/// Exponent vector of a monomial; length equals the ambient variable count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialExp(pub Vec<u32>);

impl MonomialExp {
    pub fn constant(nvars: usize) -> Self {
        MonomialExp(vec![0; nvars])
    }

    pub fn variable(i: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MonomialExp(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &MonomialExp) -> MonomialExp {
        MonomialExp(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// Graded-lex: compare total degree first, then exponents left to right.
impl Ord for MonomialExp {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MonomialExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over a [`ScalarRing`]. No zero
/// coefficients are stored and the term map is ordered graded-lex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    pub ring: ScalarRing,
    pub nvars: usize,
    pub terms: BTreeMap<MonomialExp, Scalar>,
}

impl Polynomial {
    pub fn zero(ring: &ScalarRing, nvars: usize) -> Self {
        Polynomial {
            ring: ring.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &ScalarRing, nvars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(ring, nvars);
        p.add_term(MonomialExp::constant(nvars), c);
        p
    }

    pub fn one(ring: &ScalarRing, nvars: usize) -> Self {
        Self::constant(ring, nvars, ring.one())
    }

    pub fn from_i64(ring: &ScalarRing, nvars: usize, v: i64) -> Self {
        Self::constant(ring, nvars, ring.from_i64(v))
    }

    pub fn variable(ring: &ScalarRing, nvars: usize, i: usize) -> Result<Self> {
        if i >= nvars {
            return Err(Error::IndexOutOfRange { index: i, nvars });
        }
        let mut p = Self::zero(ring, nvars);
        p.add_term(MonomialExp::variable(i, nvars), ring.one());
        Ok(p)
    }

    pub fn monomial(ring: &ScalarRing, nvars: usize, exps: &[u32], c: Scalar) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(ring, nvars);
        p.add_term(MonomialExp(exps.to_vec()), c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_constant())
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms
            .get(&MonomialExp::constant(self.nvars))
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    /// Leading term under graded-lex.
    pub fn leading(&self) -> Option<(&MonomialExp, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Add `c * x^mono`, dropping the term if the result is zero.
    pub fn add_term(&mut self, mono: MonomialExp, c: Scalar) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = self.ring.add(e.get(), &c);
                if self.ring.is_zero(&s) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn assert_compatible(&self, other: &Polynomial) {
        assert!(
            self.ring == other.ring && self.nvars == other.nvars,
            "polynomials from different rings"
        );
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = Self::zero(&self.ring, self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), self.ring.neg(c));
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        let mut out = Self::zero(&self.ring, self.nvars);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), self.ring.mul(v, c));
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.mul_truncated(other, None)
    }

    /// Product, dropping terms of total degree above `cap` when one is given.
    pub fn mul_truncated(&self, other: &Polynomial, cap: Option<u32>) -> Polynomial {
        self.assert_compatible(other);
        let mut out = Self::zero(&self.ring, self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                if let Some(cap) = cap {
                    if m.total_degree() > cap {
                        continue;
                    }
                }
                out.add_term(m, self.ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Self::one(&self.ring, self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Drop all terms of total degree above `cap`.
    pub fn truncate_degree(&self, cap: u32) -> Polynomial {
        let mut out = Self::zero(&self.ring, self.nvars);
        for (m, c) in &self.terms {
            if m.total_degree() <= cap {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn partial_derivative(&self, i: usize) -> Result<Polynomial> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let mut out = Self::zero(&self.ring, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut me = m.clone();
            me.0[i] -= 1;
            let factor = self.ring.from_i64(e as i64);
            out.add_term(me, self.ring.mul(c, &factor));
        }
        Ok(out)
    }

    /// Substitute `replacement` for variable `i` everywhere.
    pub fn substitute(&self, i: usize, replacement: &Polynomial) -> Polynomial {
        self.assert_compatible(replacement);
        let mut powers: Vec<Polynomial> = vec![Self::one(&self.ring, self.nvars)];
        let mut out = Self::zero(&self.ring, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap().mul(replacement);
                powers.push(next);
            }
            let mut rest = m.clone();
            rest.0[i] = 0;
            let part = Polynomial::monomial(&self.ring, self.nvars, &rest.0, c.clone());
            out = out.add(&part.mul(&powers[e]));
        }
        out
    }

    /// Evaluate at `x_i = images[i]` (a ring map out of the polynomial ring).
    pub fn substitute_all(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars);
        let nvars = images.first().map_or(self.nvars, |p| p.nvars);
        let ring = images.first().map_or(&self.ring, |p| &p.ring);
        let mut out = Polynomial::zero(ring, nvars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(ring, nvars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[i].pow(e));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Coefficient-wise canonical ring map.
    pub fn base_change(&self, target: &ScalarRing) -> Result<Polynomial> {
        let mut out = Self::zero(target, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), self.ring.map_into(target, c)?);
        }
        Ok(out)
    }

    /// Extend to a wider variable set, sending variable `i` to `mapping[i]`.
    pub fn relabel_variables(&self, nvars: usize, mapping: &[usize]) -> Polynomial {
        assert_eq!(mapping.len(), self.nvars);
        let mut out = Self::zero(&self.ring, nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; nvars];
            for (i, &exp) in m.0.iter().enumerate() {
                e[mapping[i]] += exp;
            }
            out.add_term(MonomialExp(e), c.clone());
        }
        out
    }
}

/// Checked product: the public entry point that validates ring compatibility.
pub fn poly_mul(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    if a.ring != b.ring || a.nvars != b.nvars {
        return Err(Error::RingMismatch);
    }
    Ok(a.mul(b))
}

/// Uniform random polynomial for property suites; coefficient sizes are kept
/// small so products stay readable in failure output.
pub fn random_polynomial(
    ring: &ScalarRing,
    nvars: usize,
    max_degree: u32,
    max_terms: usize,
    rng: &mut impl Rng,
) -> Polynomial {
    let mut out = Polynomial::zero(ring, nvars);
    let nterms = rng.gen_range(0..=max_terms);
    for _ in 0..nterms {
        let mut exps = vec![0u32; nvars];
        let mut budget = max_degree;
        for e in exps.iter_mut() {
            *e = rng.gen_range(0..=budget);
            budget -= *e;
        }
        let c = match ring {
            ScalarRing::Integers => ring.from_i64(rng.gen_range(-9..=9)),
            ScalarRing::Rationals => {
                let n = rng.gen_range(-9..=9i64);
                let d = rng.gen_range(1..=6i64);
                let inv = ring.inv(&ring.from_i64(d)).unwrap();
                ring.mul(&ring.from_i64(n), &inv)
            }
            _ => ring.from_i64(rng.gen_range(0..=29)),
        };
        out.add_term(MonomialExp(exps), c);
    }
    out
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let rendered = self.ring.render(c);
            let (neg, mag) = match rendered.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, rendered),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if mag != "1" || m.is_constant() {
                factors.push(mag);
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    factors.push(format!("x{i}"));
                } else if e > 1 {
                    factors.push(format!("x{i}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Parse the canonical string format, e.g. `3*x0^2*x1 - x1 + 1/2`.
pub fn parse_polynomial(ring: &ScalarRing, nvars: usize, input: &str) -> Result<Polynomial> {
    let mut out = Polynomial::zero(ring, nvars);
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::ParseError("empty polynomial".into()));
    }
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut sign = false;
    for (i, ch) in s.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !matches!(s.as_bytes()[i - 1], b'+' | b'-') {
            terms.push((sign, std::mem::take(&mut cur)));
            sign = ch == '-';
        } else if ch == '-' && i == 0 {
            sign = true;
        } else if ch == '+' && i == 0 {
            sign = false;
        } else {
            cur.push(ch);
        }
    }
    terms.push((sign, cur));

    for (neg, term) in terms {
        if term.is_empty() {
            return Err(Error::ParseError(format!("dangling sign in '{input}'")));
        }
        let mut coeff = ring.one();
        let mut exps = vec![0u32; nvars];
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(Error::ParseError(format!("empty factor in '{term}'")));
            }
            if let Some(rest) = factor.strip_prefix('x') {
                let (var, exp) = match rest.split_once('^') {
                    Some((v, e)) => (v, e),
                    None => (rest, "1"),
                };
                let var: usize = var
                    .parse()
                    .map_err(|_| Error::ParseError(format!("bad variable '{factor}'")))?;
                let exp: u32 = exp
                    .parse()
                    .map_err(|_| Error::ParseError(format!("bad exponent '{factor}'")))?;
                if var >= nvars {
                    return Err(Error::IndexOutOfRange { index: var, nvars });
                }
                exps[var] += exp;
            } else {
                // numeric factor, optionally a fraction
                let value = match factor.split_once('/') {
                    Some((num, den)) => {
                        let num: i128 = num
                            .parse()
                            .map_err(|_| Error::ParseError(format!("bad number '{factor}'")))?;
                        let den: i128 = den
                            .parse()
                            .map_err(|_| Error::ParseError(format!("bad number '{factor}'")))?;
                        if !ring.is_field() {
                            return Err(Error::ParseError(format!(
                                "fractional coefficient '{factor}' over {ring}"
                            )));
                        }
                        let d = ring.from_i64(den as i64);
                        let inv = ring.inv(&d).map_err(|_| {
                            Error::ParseError(format!("non-invertible denominator '{factor}'"))
                        })?;
                        ring.mul(&ring.from_i64(num as i64), &inv)
                    }
                    None => {
                        let v: i128 = factor
                            .parse()
                            .map_err(|_| Error::ParseError(format!("bad number '{factor}'")))?;
                        ring.from_i64(v as i64)
                    }
                };
                coeff = ring.mul(&coeff, &value);
            }
        }
        if neg {
            coeff = ring.neg(&coeff);
        }
        out.add_term(MonomialExp(exps), coeff);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdealMode {
    Triangular,
    Groebner,
}

/// Presentation of an ideal supporting canonical normal forms.
///
/// Triangular presentations (`f_i = x_{j_i} - g_i` with an eliminable chain)
/// work over every coefficient ring; Groebner presentations require field
/// coefficients. Either way `normal_form` is an idempotent linear projection,
/// and `reduce_with_cofactors` additionally returns the quotients with
/// respect to the *original* generators, which the envelope rewriting needs.
#[derive(Debug, Clone)]
pub struct IdealPresentation {
    pub mode: IdealMode,
    pub generators: Vec<Polynomial>,
    /// Triangular: eliminated variable index per generator.
    eliminated: Vec<usize>,
    /// Groebner: reduced basis plus tracking rows (basis = tracking * gens).
    basis: Vec<Polynomial>,
    tracking: Vec<Vec<Polynomial>>,
}

impl IdealPresentation {
    pub fn ring(&self) -> &ScalarRing {
        &self.generators[0].ring
    }

    pub fn nvars(&self) -> usize {
        self.generators[0].nvars
    }

    /// Validate an eliminable chain: each generator contains a linear term
    /// `u * x_{j_i}` with unit `u`, the variable occurs nowhere else in the
    /// generator, the `j_i` are distinct, and the rest is free of all
    /// previously eliminated variables.
    pub fn triangular(gens: Vec<Polynomial>) -> Result<Self> {
        if gens.is_empty() {
            return Ok(IdealPresentation {
                mode: IdealMode::Triangular,
                generators: gens,
                eliminated: Vec::new(),
                basis: Vec::new(),
                tracking: Vec::new(),
            });
        }
        let ring = gens[0].ring.clone();
        let nvars = gens[0].nvars;
        let mut eliminated: Vec<usize> = Vec::new();
        for f in &gens {
            if f.ring != ring || f.nvars != nvars {
                return Err(Error::RingMismatch);
            }
            let mut chosen = None;
            'var: for j in 0..nvars {
                if eliminated.contains(&j) {
                    continue;
                }
                let lin = MonomialExp::variable(j, nvars);
                let Some(c) = f.terms.get(&lin) else { continue };
                if !ring.is_unit(c) {
                    continue;
                }
                // x_j must not occur in any other term
                for m in f.terms.keys() {
                    if m != &lin && m.0[j] > 0 {
                        continue 'var;
                    }
                }
                // the rest must be free of previously eliminated variables
                for m in f.terms.keys() {
                    if m == &lin {
                        continue;
                    }
                    if eliminated.iter().any(|&k| m.0[k] > 0) {
                        continue 'var;
                    }
                }
                chosen = Some(j);
                break;
            }
            match chosen {
                Some(j) => eliminated.push(j),
                None => {
                    return Err(Error::InvalidPresentation(format!(
                        "generator '{f}' does not extend the eliminable chain"
                    )))
                }
            }
        }
        Ok(IdealPresentation {
            mode: IdealMode::Triangular,
            generators: gens,
            eliminated,
            basis: Vec::new(),
            tracking: Vec::new(),
        })
    }

    /// Reduced Groebner basis under graded-lex, with tracking of each basis
    /// element as a combination of the original generators.
    pub fn buchberger(gens: Vec<Polynomial>) -> Result<Self> {
        let gens: Vec<Polynomial> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        if gens.is_empty() {
            return Err(Error::InvalidPresentation("no nonzero generators".into()));
        }
        let ring = gens[0].ring.clone();
        if !ring.is_field() {
            return Err(Error::UnsupportedRing(format!(
                "Groebner bases need field coefficients, got {ring}"
            )));
        }
        let nvars = gens[0].nvars;
        for g in &gens {
            if g.ring != ring || g.nvars != nvars {
                return Err(Error::RingMismatch);
            }
        }

        // working basis with tracking rows
        let mut basis: Vec<(Polynomial, Vec<Polynomial>)> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            let mut row = vec![Polynomial::zero(&ring, nvars); gens.len()];
            row[i] = Polynomial::one(&ring, nvars);
            basis.push((g.clone(), row));
        }

        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..basis.len() {
            for j in 0..i {
                pairs.push((j, i));
            }
        }
        while let Some((i, j)) = pairs.pop() {
            let (s, mut srow) = s_polynomial(&basis[i], &basis[j], gens.len());
            let (rem, quots) = divide_tracked(&s, &basis.iter().map(|b| b.0.clone()).collect::<Vec<_>>());
            for (k, q) in quots.iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                for (t, row_t) in srow.iter_mut().enumerate() {
                    *row_t = row_t.sub(&q.mul(&basis[k].1[t]));
                }
            }
            if !rem.is_zero() {
                for k in 0..basis.len() {
                    pairs.push((k, basis.len()));
                }
                basis.push((rem, srow));
            }
        }

        // minimize: drop elements whose leading term is divisible by another's
        let mut keep: Vec<bool> = vec![true; basis.len()];
        for i in 0..basis.len() {
            if !keep[i] {
                continue;
            }
            let (lt_i, _) = basis[i].0.leading().unwrap();
            for j in 0..basis.len() {
                if i == j || !keep[j] {
                    continue;
                }
                let (lt_j, _) = basis[j].0.leading().unwrap();
                if divides(lt_j, lt_i) && !(divides(lt_i, lt_j) && j > i) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut minimal: Vec<(Polynomial, Vec<Polynomial>)> = basis
            .into_iter()
            .zip(keep)
            .filter_map(|(b, k)| k.then_some(b))
            .collect();

        // fully reduce tails and normalize leading coefficients to 1
        for i in 0..minimal.len() {
            let others: Vec<Polynomial> = minimal
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| b.0.clone())
                .collect();
            let (mut rem, quots) = divide_tracked(&minimal[i].0, &others);
            let mut row = minimal[i].1.clone();
            let mut oi = 0;
            for (j, b) in minimal.clone().iter().enumerate() {
                if j == i {
                    continue;
                }
                let q = &quots[oi];
                oi += 1;
                if q.is_zero() {
                    continue;
                }
                for (t, row_t) in row.iter_mut().enumerate() {
                    *row_t = row_t.sub(&q.mul(&b.1[t]));
                }
            }
            let (_, lc) = rem.leading().expect("reduced basis element is nonzero");
            let inv = ring.inv(lc).expect("field leading coefficient");
            rem = rem.scale(&inv);
            for row_t in row.iter_mut() {
                *row_t = row_t.scale(&inv);
            }
            minimal[i] = (rem, row);
        }
        minimal.sort_by(|a, b| a.0.leading().unwrap().0.cmp(b.0.leading().unwrap().0));

        let (bas, track): (Vec<_>, Vec<_>) = minimal.into_iter().unzip();
        Ok(IdealPresentation {
            mode: IdealMode::Groebner,
            generators: gens,
            eliminated: Vec::new(),
            basis: bas,
            tracking: track,
        })
    }

    /// The reduced Groebner basis (Groebner mode only).
    pub fn groebner_basis(&self) -> &[Polynomial] {
        &self.basis
    }

    /// Canonical representative of `f` modulo the ideal.
    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial> {
        Ok(self.reduce_with_cofactors(f)?.0)
    }

    /// Normal form together with cofactors `h_i` such that
    /// `f = nf(f) + sum_i h_i * generators[i]`.
    pub fn reduce_with_cofactors(&self, f: &Polynomial) -> Result<(Polynomial, Vec<Polynomial>)> {
        if !self.generators.is_empty()
            && (f.ring != *self.ring() || f.nvars != self.nvars())
        {
            return Err(Error::RingMismatch);
        }
        match self.mode {
            IdealMode::Triangular => Ok(self.reduce_triangular(f)),
            IdealMode::Groebner => {
                let (nf, quots) = divide_tracked(f, &self.basis);
                let ring = self.ring().clone();
                let nvars = self.nvars();
                let mut cof = vec![Polynomial::zero(&ring, nvars); self.generators.len()];
                for (k, q) in quots.iter().enumerate() {
                    if q.is_zero() {
                        continue;
                    }
                    for (i, c) in cof.iter_mut().enumerate() {
                        *c = c.add(&q.mul(&self.tracking[k][i]));
                    }
                }
                Ok((nf, cof))
            }
        }
    }

    fn reduce_triangular(&self, f: &Polynomial) -> (Polynomial, Vec<Polynomial>) {
        let ring = f.ring.clone();
        let nvars = f.nvars;
        let mut cur = f.clone();
        let mut cof = vec![Polynomial::zero(&ring, nvars); self.generators.len()];
        for (gi, gen) in self.generators.iter().enumerate() {
            let j = self.eliminated[gi];
            let lin = MonomialExp::variable(j, nvars);
            let u = gen.terms.get(&lin).expect("validated eliminable chain");
            let u_inv = ring.inv(u).expect("unit coefficient");
            // x_j = u^{-1} gen - u^{-1} rest =: u^{-1} gen + g
            let mut rest = gen.clone();
            rest.terms.remove(&lin);
            let g = rest.scale(&ring.neg(&u_inv));
            // substitute x_j -> g term by term, accumulating the cofactor:
            // x_j^a * t = g^a * t + (x_j - g) * (sum_{k<a} x_j^k g^{a-1-k}) * t
            // and x_j - g = u^{-1} * gen.
            let mut out = Polynomial::zero(&ring, nvars);
            let mut powers_g: Vec<Polynomial> = vec![Polynomial::one(&ring, nvars)];
            for (m, c) in &cur.terms {
                let a = m.0[j] as usize;
                if a == 0 {
                    out.add_term(m.clone(), c.clone());
                    continue;
                }
                while powers_g.len() <= a {
                    let next = powers_g.last().unwrap().mul(&g);
                    powers_g.push(next);
                }
                let mut rest_m = m.clone();
                rest_m.0[j] = 0;
                let t = Polynomial::monomial(&ring, nvars, &rest_m.0, c.clone());
                out = out.add(&t.mul(&powers_g[a]));
                // telescoping cofactor
                let mut tele = Polynomial::zero(&ring, nvars);
                for k in 0..a {
                    let xk = Polynomial::monomial(
                        &ring,
                        nvars,
                        &MonomialExp::variable(j, nvars).0,
                        ring.one(),
                    )
                    .pow(k as u32);
                    tele = tele.add(&xk.mul(&powers_g[a - 1 - k]));
                }
                cof[gi] = cof[gi].add(&t.mul(&tele).scale(&u_inv));
            }
            cur = out;
        }
        (cur, cof)
    }

    /// Basis monomial test for the canonical complement of the ideal:
    /// Triangular mode keeps monomials free of eliminated variables, Groebner
    /// mode keeps monomials outside the leading-term ideal.
    pub fn is_standard_monomial(&self, m: &MonomialExp) -> bool {
        match self.mode {
            IdealMode::Triangular => self.eliminated.iter().all(|&j| m.0[j] == 0),
            IdealMode::Groebner => self
                .basis
                .iter()
                .all(|g| !divides(g.leading().unwrap().0, m)),
        }
    }

    /// Enumerate standard monomials of total degree exactly `d`.
    pub fn standard_monomials(&self, d: u32) -> Vec<MonomialExp> {
        monomials_of_degree(self.nvars(), d)
            .into_iter()
            .filter(|m| self.is_standard_monomial(m))
            .collect()
    }
}

/// All exponent vectors of total degree exactly `d`, graded-lex ascending.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<MonomialExp> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MonomialExp>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(MonomialExp(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    if nvars == 0 {
        if d == 0 {
            out.push(MonomialExp(vec![]));
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out.sort();
    out
}

fn divides(a: &MonomialExp, b: &MonomialExp) -> bool {
    a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
}

/// Multivariate division: returns (remainder, quotients) with
/// `f = sum quotients[k] * divisors[k] + remainder` and no remainder term
/// divisible by any divisor's leading term.
fn divide_tracked(f: &Polynomial, divisors: &[Polynomial]) -> (Polynomial, Vec<Polynomial>) {
    let ring = f.ring.clone();
    let nvars = f.nvars;
    let mut rem = Polynomial::zero(&ring, nvars);
    let mut quots = vec![Polynomial::zero(&ring, nvars); divisors.len()];
    let mut work = f.clone();
    'outer: while let Some((m, c)) = work.leading().map(|(m, c)| (m.clone(), c.clone())) {
        for (k, g) in divisors.iter().enumerate() {
            let (lt, lc) = match g.leading() {
                Some(x) => x,
                None => continue,
            };
            if divides(lt, &m) {
                let q_mono = MonomialExp(m.0.iter().zip(&lt.0).map(|(a, b)| a - b).collect());
                let q_coef = ring.mul(&c, &ring.inv(lc).expect("field division"));
                let q = Polynomial::monomial(&ring, nvars, &q_mono.0, q_coef);
                work = work.sub(&q.mul(g));
                quots[k] = quots[k].add(&q);
                continue 'outer;
            }
        }
        work.terms.remove(&m);
        rem.add_term(m, c);
    }
    (rem, quots)
}

fn s_polynomial(
    a: &(Polynomial, Vec<Polynomial>),
    b: &(Polynomial, Vec<Polynomial>),
    ngens: usize,
) -> (Polynomial, Vec<Polynomial>) {
    let ring = a.0.ring.clone();
    let nvars = a.0.nvars;
    let (lta, lca) = a.0.leading().unwrap();
    let (ltb, lcb) = b.0.leading().unwrap();
    let lcm = MonomialExp(
        lta.0
            .iter()
            .zip(&ltb.0)
            .map(|(x, y)| *x.max(y))
            .collect(),
    );
    let ma = MonomialExp(lcm.0.iter().zip(&lta.0).map(|(x, y)| x - y).collect());
    let mb = MonomialExp(lcm.0.iter().zip(&ltb.0).map(|(x, y)| x - y).collect());
    let fa = Polynomial::monomial(&ring, nvars, &ma.0, ring.inv(lca).unwrap());
    let fb = Polynomial::monomial(&ring, nvars, &mb.0, ring.inv(lcb).unwrap());
    let s = fa.mul(&a.0).sub(&fb.mul(&b.0));
    let mut row = vec![Polynomial::zero(&ring, nvars); ngens];
    for t in 0..ngens {
        row[t] = fa.mul(&a.1[t]).sub(&fb.mul(&b.1[t]));
    }
    (s, row)
}
