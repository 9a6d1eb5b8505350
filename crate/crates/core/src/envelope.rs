//! Divided-power envelopes of regular-sequence ideals with the pd-adic
//! filtration, realized as weight-truncated free pd algebras with a
//! confluent rewriting rule.
//!
//! Elements live in `A<y_1..y_r>` with one pd generator per ideal generator
//! `f_i`. The normal form reduces every coefficient to the canonical
//! complement basis of `A mod I` and pushes the ideal part upward through
//! `f_i * y^[e] => (e_i + 1) * y^[e + delta_i]`; each push raises pd weight,
//! so rewriting terminates below the truncation bound.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::complex::cohomology_of_pair;
use crate::error::{Error, Result};
use crate::linalg::{kernel_gens, smith_normal_form, solve, Matrix, TransformRequest};
use crate::pd::{pd_gamma, pd_mul, pd_monomials_of_weight, PdElement, PdMonomial};
use crate::poly::{monomials_of_degree, IdealMode, IdealPresentation, MonomialExp, Polynomial};
use crate::scalar::{factorial, ScalarRing};

/// A surjection `A -> A/I` presented by an ordered generating sequence of
/// `I`, together with the pd weight truncation used for the envelope.
#[derive(Debug, Clone)]
pub struct RegularQuotientPresentation {
    pub ring: ScalarRing,
    pub nvars: usize,
    pub sequence: Vec<Polynomial>,
    pub ideal: IdealPresentation,
    pub truncation: u32,
}

impl RegularQuotientPresentation {
    pub fn new(
        ring: &ScalarRing,
        nvars: usize,
        sequence: Vec<Polynomial>,
        mode: IdealMode,
        truncation: u32,
    ) -> Result<Self> {
        for f in &sequence {
            if f.ring != *ring || f.nvars != nvars {
                return Err(Error::RingMismatch);
            }
            if f.is_zero() {
                return Err(Error::InvalidPresentation("zero generator".into()));
            }
        }
        let ideal = match mode {
            IdealMode::Triangular => IdealPresentation::triangular(sequence.clone())?,
            IdealMode::Groebner => {
                // Groebner envelopes only over the rationals; modular rings
                // take the Triangular route.
                if *ring != ScalarRing::Rationals {
                    return Err(Error::UnsupportedRingModeCombination(format!(
                        "Groebner envelope presentations over {ring}"
                    )));
                }
                if sequence.is_empty() {
                    IdealPresentation::triangular(Vec::new())?
                } else {
                    IdealPresentation::buchberger(sequence.clone())?
                }
            }
        };
        if truncation == 0 {
            return Err(Error::TruncationTooSmall(0));
        }
        Ok(RegularQuotientPresentation {
            ring: ring.clone(),
            nvars,
            sequence,
            ideal,
            truncation,
        })
    }

    pub fn ngens(&self) -> usize {
        self.sequence.len()
    }
}

/// Outcome of the bounded-degree Koszul regularity probe.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub pass: bool,
    /// Koszul 1-cycle that is not a boundary, one polynomial per generator.
    pub witness: Option<Vec<Polynomial>>,
    pub failed_degree: Option<u32>,
}

/// Check that the Koszul complex of the sequence has vanishing first
/// homology in total degree `<= degree_bound`. This is a bounded soundness
/// probe: full regularity is not decidable at this interface.
pub fn regularity_probe(
    pres: &RegularQuotientPresentation,
    degree_bound: u32,
) -> Result<ProbeReport> {
    let ring = &pres.ring;
    let nvars = pres.nvars;
    let r = pres.ngens();
    if r == 0 {
        return Ok(ProbeReport {
            pass: true,
            witness: None,
            failed_degree: None,
        });
    }
    let deg: Vec<u32> = pres
        .sequence
        .iter()
        .map(|f| f.total_degree().unwrap_or(0))
        .collect();

    // chain bases: 1-chains (i, mu) with deg mu <= D - deg f_i,
    // 2-chains (i<j, nu) with deg nu <= D - deg f_i - deg f_j
    let mut basis1: Vec<(usize, MonomialExp)> = Vec::new();
    for i in 0..r {
        if deg[i] > degree_bound {
            continue;
        }
        for d in 0..=(degree_bound - deg[i]) {
            for m in monomials_of_degree(nvars, d) {
                basis1.push((i, m));
            }
        }
    }
    let mut basis2: Vec<(usize, usize, MonomialExp)> = Vec::new();
    for i in 0..r {
        for j in (i + 1)..r {
            if deg[i] + deg[j] > degree_bound {
                continue;
            }
            for d in 0..=(degree_bound - deg[i] - deg[j]) {
                for m in monomials_of_degree(nvars, d) {
                    basis2.push((i, j, m));
                }
            }
        }
    }
    let mut basis0: Vec<MonomialExp> = Vec::new();
    for d in 0..=degree_bound {
        basis0.extend(monomials_of_degree(nvars, d));
    }
    let index0: BTreeMap<&MonomialExp, usize> =
        basis0.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let index1: BTreeMap<&(usize, MonomialExp), usize> =
        basis1.iter().enumerate().map(|(k, m)| (m, k)).collect();

    // boundary of a 1-chain basis vector: mu * f_i
    let mut d1 = Matrix::zero(ring, basis0.len(), basis1.len());
    for (k, (i, mu)) in basis1.iter().enumerate() {
        let prod = Polynomial::monomial(ring, nvars, &mu.0, ring.one()).mul(&pres.sequence[*i]);
        for (m, c) in &prod.terms {
            d1.set(index0[m], k, c.clone());
        }
    }
    // boundary of a 2-chain basis vector: nu * (f_i e_j - f_j e_i)
    let mut d2 = Matrix::zero(ring, basis1.len(), basis2.len());
    for (k, (i, j, nu)) in basis2.iter().enumerate() {
        let nu_poly = Polynomial::monomial(ring, nvars, &nu.0, ring.one());
        let pi = nu_poly.mul(&pres.sequence[*i]);
        let pj = nu_poly.mul(&pres.sequence[*j]);
        for (m, c) in &pi.terms {
            d2.set(index1[&(*j, m.clone())], k, c.clone());
        }
        for (m, c) in &pj.terms {
            d2.set(index1[&(*i, m.clone())], k, ring.neg(c));
        }
    }

    let h1 = cohomology_of_pair(ring, &d2, &d1)?;
    if h1.is_zero() {
        return Ok(ProbeReport {
            pass: true,
            witness: None,
            failed_degree: None,
        });
    }

    // extract a cycle that is not a boundary
    let decomp = smith_normal_form(&d1, TransformRequest { q: true, ..Default::default() });
    let q = decomp.q.as_ref().unwrap();
    for gen in kernel_gens(ring, &decomp, d1.cols) {
        let mut v = q.column(gen.col);
        if gen.shift > 0 {
            let p = ring.char_p().unwrap().clone();
            let factor = ring.from_bigint(&BigInt::from(p.pow(gen.shift)));
            v = v.iter().map(|x| ring.mul(x, &factor)).collect();
        }
        if solve(&d2, &v).is_none() {
            let mut wit = vec![Polynomial::zero(ring, nvars); r];
            let mut min_deg = None;
            for (k, c) in v.iter().enumerate() {
                if !ring.is_zero(c) {
                    let (i, mu) = &basis1[k];
                    wit[*i].add_term(mu.clone(), c.clone());
                    let d = mu.total_degree() + deg[*i];
                    min_deg = Some(min_deg.map_or(d, |x: u32| x.min(d)));
                }
            }
            return Ok(ProbeReport {
                pass: false,
                witness: Some(wit),
                failed_degree: min_deg,
            });
        }
    }
    // torsion-only failure with every generator individually a boundary
    // cannot happen: some generator must fall outside the image
    unreachable!("nonzero Koszul H1 without a witness generator");
}

/// Description of one graded piece `gr^n` of the pd-adic filtration: a free
/// `A/I`-module on the weight-`n` pd monomials.
#[derive(Debug, Clone)]
pub struct GradedPiece {
    pub weight: u32,
    pub monomials: Vec<PdMonomial>,
}

impl GradedPiece {
    pub fn rank(&self) -> usize {
        self.monomials.len()
    }
}

/// The weight-<=1 truncation data: the conormal module, a module basis of
/// `A/I^2`, and the boundary map realized through envelope rewriting.
#[derive(Debug, Clone)]
pub struct SquareZeroData {
    /// Rank of `I/I^2` over `A/I` (one class per sequence generator).
    pub conormal_rank: usize,
    pub conormal_basis: Vec<String>,
    /// Module basis of `A/I^2` up to the reported degree cap: the standard
    /// monomials of `A/I` followed by the conormal classes.
    pub extension_basis: Vec<String>,
    pub degree_cap: u32,
}

/// The divided power envelope `Env^pd_A(I)` truncated at pd weight `N`.
#[derive(Debug, Clone)]
pub struct EnvelopeAlgebra {
    pub pres: RegularQuotientPresentation,
}

impl EnvelopeAlgebra {
    /// Build the envelope after passing the regularity probe through
    /// `probe_degree`.
    pub fn build(pres: RegularQuotientPresentation, probe_degree: u32) -> Result<Self> {
        let report = regularity_probe(&pres, probe_degree)?;
        if !report.pass {
            let wit = report
                .witness
                .as_ref()
                .map(|w| {
                    w.iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                })
                .unwrap_or_default();
            return Err(Error::RegularityProbeFailed {
                degree: report.failed_degree.unwrap_or(0),
                witness: format!("({wit})"),
            });
        }
        Ok(EnvelopeAlgebra { pres })
    }

    /// Build without probing (for presentations that are regular by
    /// construction, e.g. the Cech kernel sequences).
    pub fn build_unchecked(pres: RegularQuotientPresentation) -> Self {
        EnvelopeAlgebra { pres }
    }

    pub fn ring(&self) -> &ScalarRing {
        &self.pres.ring
    }

    pub fn zero(&self) -> PdElement {
        PdElement::zero(
            &self.pres.ring,
            self.pres.nvars,
            self.pres.ngens(),
            self.pres.truncation,
        )
    }

    pub fn one(&self) -> PdElement {
        PdElement::one(
            &self.pres.ring,
            self.pres.nvars,
            self.pres.ngens(),
            self.pres.truncation,
        )
    }

    pub fn pd_generator(&self, i: usize) -> PdElement {
        PdElement::generator(
            &self.pres.ring,
            self.pres.nvars,
            self.pres.ngens(),
            self.pres.truncation,
            i,
        )
    }

    /// Ambient element embedded and normal-formed.
    pub fn from_ambient(&self, f: &Polynomial) -> PdElement {
        self.normal_form(&PdElement::from_coefficient(
            f,
            self.pres.ngens(),
            self.pres.truncation,
        ))
    }

    /// Canonical normal form: coefficients in the complement basis of
    /// `A mod I`, ideal parts pushed to higher pd weight.
    pub fn normal_form(&self, elem: &PdElement) -> PdElement {
        self.normal_form_with(elem, |dirty| {
            dirty
                .iter()
                .map(|m| (m.weight(), (*m).clone()))
                .min()
                .map(|(_, m)| m)
                .unwrap()
        })
    }

    /// Normal form with a caller-chosen processing strategy over the dirty
    /// agenda; rewriting is confluent, so every strategy agrees.
    pub fn normal_form_with(
        &self,
        elem: &PdElement,
        mut pick: impl FnMut(&[&PdMonomial]) -> PdMonomial,
    ) -> PdElement {
        let mut acc: BTreeMap<PdMonomial, Polynomial> = elem.terms.clone();
        let mut dirty: Vec<PdMonomial> = acc.keys().cloned().collect();
        while !dirty.is_empty() {
            let refs: Vec<&PdMonomial> = dirty.iter().collect();
            let mono = pick(&refs);
            dirty.retain(|m| m != &mono);
            let Some(coeff) = acc.get(&mono).cloned() else { continue };
            let (nf, cof) = self
                .pres
                .ideal
                .reduce_with_cofactors(&coeff)
                .expect("validated presentation");
            if nf.is_zero() {
                acc.remove(&mono);
            } else {
                acc.insert(mono.clone(), nf);
            }
            for (i, h) in cof.iter().enumerate() {
                if h.is_zero() {
                    continue;
                }
                let mut target = mono.clone();
                target.0[i] += 1;
                if target.weight() >= self.pres.truncation {
                    continue;
                }
                let bump = self
                    .pres
                    .ring
                    .from_i64((mono.0[i] + 1) as i64);
                let contrib = h.scale(&bump);
                let entry = acc
                    .entry(target.clone())
                    .or_insert_with(|| Polynomial::zero(&self.pres.ring, self.pres.nvars));
                *entry = entry.add(&contrib);
                if entry.is_zero() {
                    acc.remove(&target);
                }
                if !dirty.contains(&target) {
                    dirty.push(target);
                }
            }
        }
        let mut out = self.zero();
        for (m, c) in acc {
            out.add_term(m, c);
        }
        out
    }

    pub fn mul(&self, a: &PdElement, b: &PdElement) -> Result<PdElement> {
        Ok(self.normal_form(&pd_mul(a, b)?))
    }

    pub fn gamma(&self, n: u32, a: &PdElement) -> Result<PdElement> {
        Ok(self.normal_form(&pd_gamma(n, a)?))
    }

    /// Filtration stage of a (normal-formed) element.
    pub fn fil_weight(&self, a: &PdElement) -> Option<u32> {
        self.normal_form(a).min_weight()
    }

    /// `gr^n` as a free `A/I`-module on the weight-`n` pd monomials.
    pub fn graded_piece(&self, n: u32) -> Result<GradedPiece> {
        if n >= self.pres.truncation {
            return Err(Error::WeightOutOfRange {
                weight: n,
                bound: self.pres.truncation,
            });
        }
        Ok(GradedPiece {
            weight: n,
            monomials: pd_monomials_of_weight(self.pres.ngens(), n),
        })
    }

    /// Class of an ambient element in `gr^1 = I/I^2`, as `A/I` coefficients
    /// on the conormal classes of the sequence generators.
    pub fn conormal_class(&self, f: &Polynomial) -> Vec<Polynomial> {
        let nf = self.from_ambient(f);
        let mut out = vec![Polynomial::zero(&self.pres.ring, self.pres.nvars); self.pres.ngens()];
        for (m, c) in &nf.terms {
            if m.weight() == 1 {
                let i = m.support().next().unwrap();
                out[i] = c.clone();
            }
        }
        out
    }

    /// Weight-<=1 truncation: the universal square-zero extension data.
    pub fn square_zero_truncation(&self, degree_cap: u32) -> Result<SquareZeroData> {
        if self.pres.truncation < 2 {
            return Err(Error::TruncationTooSmall(self.pres.truncation));
        }
        let conormal_basis: Vec<String> = self
            .pres
            .sequence
            .iter()
            .map(|f| format!("[{f}]"))
            .collect();
        let mut extension_basis: Vec<String> = Vec::new();
        for d in 0..=degree_cap {
            for m in self.pres.ideal.standard_monomials(d) {
                extension_basis.push(
                    Polynomial::monomial(&self.pres.ring, self.pres.nvars, &m.0, self.pres.ring.one())
                        .to_string(),
                );
            }
        }
        extension_basis.extend(conormal_basis.iter().cloned());
        Ok(SquareZeroData {
            conormal_rank: self.pres.ngens(),
            conormal_basis,
            extension_basis,
            degree_cap,
        })
    }

    /// Value-preserving realization over a base embedding in Q: sends
    /// `c * y^[e]` to `c * prod f_i^{e_i} / e_i!` inside `Q (x) A`. This is
    /// independent of the rewriting engine and serves as its oracle.
    pub fn rational_realization(&self, a: &PdElement) -> Result<Polynomial> {
        let q = ScalarRing::rationals();
        let mut out = Polynomial::zero(&q, self.pres.nvars);
        let gens_q: Vec<Polynomial> = self
            .pres
            .sequence
            .iter()
            .map(|f| {
                let mut g = Polynomial::zero(&q, self.pres.nvars);
                for (m, c) in &f.terms {
                    g.add_term(m.clone(), crate::scalar::Scalar::Rat(f.ring.embed_rational(c)?));
                }
                Ok(g)
            })
            .collect::<Result<_>>()?;
        for (m, c) in &a.terms {
            let mut term = Polynomial::one(&q, self.pres.nvars);
            let mut denom = BigInt::from(1);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&gens_q[i].pow(e));
                    denom *= factorial(e);
                }
            }
            let scale = q.inv(&q.from_bigint(&denom)).unwrap();
            let mut c_q = Polynomial::zero(&q, self.pres.nvars);
            for (pm, pc) in &c.terms {
                c_q.add_term(
                    pm.clone(),
                    crate::scalar::Scalar::Rat(a.ring.embed_rational(pc)?),
                );
            }
            out = out.add(&term.mul(&c_q).scale(&scale));
        }
        Ok(out)
    }

    /// Per-weight basis listings and generator multiplication tables in a
    /// deterministic text format.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "envelope over {}[x0..x{}] / ({}), truncation {}\n",
            self.pres.ring,
            self.pres.nvars.saturating_sub(1),
            self.pres
                .sequence
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            self.pres.truncation
        ));
        for w in 0..self.pres.truncation {
            let piece = self.graded_piece(w).unwrap();
            let monos: Vec<String> = piece
                .monomials
                .iter()
                .map(|m| {
                    let e = PdElement {
                        ring: self.pres.ring.clone(),
                        nvars: self.pres.nvars,
                        ngens: self.pres.ngens(),
                        truncation: self.pres.truncation,
                        terms: BTreeMap::from([(
                            m.clone(),
                            Polynomial::one(&self.pres.ring, self.pres.nvars),
                        )]),
                    };
                    e.to_string()
                })
                .collect();
            out.push_str(&format!("weight {w}: rank {} [{}]\n", piece.rank(), monos.join(", ")));
        }
        for i in 0..self.pres.ngens() {
            for j in i..self.pres.ngens() {
                let prod = self
                    .mul(&self.pd_generator(i), &self.pd_generator(j))
                    .unwrap();
                out.push_str(&format!("g{i} * g{j} = {prod}\n"));
            }
        }
        for v in 0..self.pres.nvars {
            let xv = Polynomial::variable(&self.pres.ring, self.pres.nvars, v).unwrap();
            for i in 0..self.pres.ngens() {
                let prod = self.normal_form(&self.pd_generator(i).scale(&xv));
                out.push_str(&format!("x{v} * g{i} = {prod}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn parse(ring: &ScalarRing, nvars: usize, s: &str) -> Polynomial {
        parse_polynomial(ring, nvars, s).unwrap()
    }

    fn t_envelope(n: u32) -> EnvelopeAlgebra {
        // A = Z[t], I = (t)
        let z = ScalarRing::integers();
        let pres = RegularQuotientPresentation::new(
            &z,
            1,
            vec![parse(&z, 1, "x0")],
            IdealMode::Triangular,
            n,
        )
        .unwrap();
        EnvelopeAlgebra::build(pres, 4).unwrap()
    }

    #[test]
    fn probe_examples() {
        let q = ScalarRing::rationals();
        // regular pair of variables
        let pres = RegularQuotientPresentation::new(
            &q,
            2,
            vec![parse(&q, 2, "x0"), parse(&q, 2, "x1")],
            IdealMode::Triangular,
            4,
        )
        .unwrap();
        assert!(regularity_probe(&pres, 6).unwrap().pass);

        // repeated generator (x, x): Groebner mode over Q
        let pres = RegularQuotientPresentation::new(
            &q,
            1,
            vec![parse(&q, 1, "x0"), parse(&q, 1, "x0")],
            IdealMode::Groebner,
            4,
        )
        .unwrap();
        let rep = regularity_probe(&pres, 2).unwrap();
        assert!(!rep.pass);
        let w = rep.witness.unwrap();
        // the witness is a genuine cycle
        let cycle = w[0].mul(&parse(&q, 1, "x0")).add(&w[1].mul(&parse(&q, 1, "x0")));
        assert!(cycle.is_zero());
        // and (1, -1) spans the cycle space in degree 1
        assert!(w[0].is_constant() && w[1].is_constant());
        assert_eq!(w[0], w[1].neg());

        // (xy, x): witness proportional to (1, -y)
        let pres = RegularQuotientPresentation::new(
            &q,
            2,
            vec![parse(&q, 2, "x0*x1"), parse(&q, 2, "x0")],
            IdealMode::Groebner,
            4,
        )
        .unwrap();
        let rep = regularity_probe(&pres, 3).unwrap();
        assert!(!rep.pass);
        let w = rep.witness.unwrap();
        let cycle = w[0]
            .mul(&parse(&q, 2, "x0*x1"))
            .add(&w[1].mul(&parse(&q, 2, "x0")));
        assert!(cycle.is_zero());

        // build_envelope surfaces the failure
        let pres = RegularQuotientPresentation::new(
            &q,
            1,
            vec![parse(&q, 1, "x0"), parse(&q, 1, "x0")],
            IdealMode::Groebner,
            4,
        )
        .unwrap();
        assert!(matches!(
            EnvelopeAlgebra::build(pres, 2),
            Err(Error::RegularityProbeFailed { .. })
        ));
    }

    #[test]
    fn envelope_of_variable_ideal() {
        // Z[t], I = (t), N = 5: basis 1, y, y^[2], y^[3], y^[4]; t*1 = y
        let env = t_envelope(5);
        for w in 0..5 {
            assert_eq!(env.graded_piece(w).unwrap().rank(), 1);
        }
        assert!(matches!(
            env.graded_piece(5),
            Err(Error::WeightOutOfRange { .. })
        ));
        let z = ScalarRing::integers();
        let t = parse(&z, 1, "x0");
        assert_eq!(env.from_ambient(&t), env.pd_generator(0));

        // rewriting t * y^[3] = 4 y^[4], matching the Q-oracle t*t^3/3! = 4 t^4/4!
        let env = t_envelope(10);
        let mut y3 = env.zero();
        y3.add_term(PdMonomial(vec![3]), Polynomial::one(&z, 1));
        let prod = env.normal_form(&y3.scale(&t));
        let mut expected = env.zero();
        expected.add_term(PdMonomial(vec![4]), Polynomial::from_i64(&z, 1, 4));
        assert_eq!(prod, expected);
        assert_eq!(
            env.rational_realization(&y3.scale(&t)).unwrap(),
            env.rational_realization(&prod).unwrap()
        );
    }

    #[test]
    fn char_zero_collapse() {
        // over Q the envelope realizes isomorphically onto (A, I-adic)
        let q = ScalarRing::rationals();
        let pres = RegularQuotientPresentation::new(
            &q,
            1,
            vec![parse(&q, 1, "x0")],
            IdealMode::Triangular,
            6,
        )
        .unwrap();
        let env = EnvelopeAlgebra::build(pres, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let f = crate::poly::random_polynomial(&q, 1, 5, 4, &mut rng);
            let nf = env.from_ambient(&f);
            // value preserved and recoverable: the realization is f itself
            assert_eq!(env.rational_realization(&nf).unwrap(), f);
        }
        // y^[n] realizes to t^n/n!
        let mut y2 = env.zero();
        y2.add_term(PdMonomial(vec![2]), Polynomial::one(&q, 1));
        assert_eq!(
            env.rational_realization(&y2).unwrap(),
            parse(&q, 1, "1/2*x0^2")
        );
    }

    #[test]
    fn rewriting_preserves_realized_value() {
        // normal form changes representation, never the realized value
        // modulo I^N: weight-crossing terms are truncated
        let z = ScalarRing::integers();
        let q = ScalarRing::rationals();
        let trunc = 6u32;
        let pres = RegularQuotientPresentation::new(
            &z,
            2,
            vec![parse(&z, 2, "x0 - x1^2")],
            IdealMode::Triangular,
            trunc,
        )
        .unwrap();
        let env = EnvelopeAlgebra::build(pres, 5).unwrap();
        let ideal_power =
            IdealPresentation::buchberger(vec![parse(&q, 2, "x0 - x1^2").pow(trunc)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let mut e = env.zero();
            for _ in 0..rng.gen_range(1..=3) {
                let w = rng.gen_range(0..5u32);
                let mono = PdMonomial(vec![w]);
                let c = crate::poly::random_polynomial(&z, 2, 3, 3, &mut rng);
                e.add_term(mono, c);
            }
            let nf = env.normal_form(&e);
            let before = ideal_power
                .normal_form(&env.rational_realization(&e).unwrap())
                .unwrap();
            let after = ideal_power
                .normal_form(&env.rational_realization(&nf).unwrap())
                .unwrap();
            assert_eq!(before, after);
            // normal forms have fully reduced coefficients
            for (_, c) in &nf.terms {
                for (m, _) in &c.terms {
                    assert!(env.pres.ideal.is_standard_monomial(m));
                }
            }
        }
    }

    #[test]
    fn rewriting_confluence_under_random_strategies() {
        let z = ScalarRing::integers();
        let pres = RegularQuotientPresentation::new(
            &z,
            2,
            vec![parse(&z, 2, "x0 - x1^2"), parse(&z, 2, "x1")],
            IdealMode::Triangular,
            6,
        )
        .unwrap();
        let env = EnvelopeAlgebra::build(pres, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let mut e = env.zero();
            for _ in 0..rng.gen_range(1..=4) {
                let monos = pd_monomials_of_weight(2, rng.gen_range(0..5u32));
                let m = monos[rng.gen_range(0..monos.len())].clone();
                let c = crate::poly::random_polynomial(&z, 2, 3, 3, &mut rng);
                e.add_term(m, c);
            }
            let canonical = env.normal_form(&e);
            let mut rng2 = ChaCha8Rng::seed_from_u64(rng.gen());
            let shuffled = env.normal_form_with(&e, |dirty| {
                dirty[rng2.gen_range(0..dirty.len())].clone()
            });
            assert_eq!(canonical, shuffled);
        }
    }

    #[test]
    fn filtration_laws() {
        let env = t_envelope(8);
        let z = ScalarRing::integers();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let mut a = env.zero();
            let mut b = env.zero();
            for _ in 0..2 {
                let wa = rng.gen_range(1..6u32);
                a.add_term(PdMonomial(vec![wa]), crate::poly::random_polynomial(&z, 1, 2, 2, &mut rng));
                let wb = rng.gen_range(1..6u32);
                b.add_term(PdMonomial(vec![wb]), crate::poly::random_polynomial(&z, 1, 2, 2, &mut rng));
            }
            let (a, b) = (env.normal_form(&a), env.normal_form(&b));
            let (wa, wb) = match (a.min_weight(), b.min_weight()) {
                (Some(wa), Some(wb)) => (wa, wb),
                _ => continue,
            };
            // Fil^a * Fil^b <= Fil^(a+b)
            let prod = env.mul(&a, &b).unwrap();
            assert!(prod.in_filtration(wa + wb));
            // gamma_n(Fil^a) <= Fil^(n a)
            for n in 2..=3u32 {
                let g = env.gamma(n, &a).unwrap();
                assert!(g.in_filtration(n * wa));
            }
        }
    }

    #[test]
    fn graded_rank_law() {
        let z = ScalarRing::integers();
        for r in 1..=4usize {
            let gens: Vec<Polynomial> = (0..r)
                .map(|i| Polynomial::variable(&z, 4, i).unwrap())
                .collect();
            let pres =
                RegularQuotientPresentation::new(&z, 4, gens, IdealMode::Triangular, 8).unwrap();
            let env = EnvelopeAlgebra::build(pres, 4).unwrap();
            for n in 0..8u32 {
                use num_traits::ToPrimitive;
                let expected = crate::scalar::binomial(r as u32 + n - 1, n)
                    .to_usize()
                    .unwrap();
                assert_eq!(env.graded_piece(n).unwrap().rank(), expected);
            }
        }
    }

    #[test]
    fn square_zero_examples() {
        let z = ScalarRing::integers();
        // I = (x, y) in Z[x, y]
        let pres = RegularQuotientPresentation::new(
            &z,
            2,
            vec![parse(&z, 2, "x0"), parse(&z, 2, "x1")],
            IdealMode::Triangular,
            3,
        )
        .unwrap();
        let env = EnvelopeAlgebra::build(pres, 4).unwrap();
        let data = env.square_zero_truncation(2).unwrap();
        assert_eq!(data.conormal_rank, 2);
        assert_eq!(data.extension_basis, vec!["1", "[x0]", "[x1]"]);

        // I = (t) in Z[t]
        let env = t_envelope(4);
        let data = env.square_zero_truncation(1).unwrap();
        assert_eq!(data.conormal_rank, 1);
        assert_eq!(data.extension_basis, vec!["1", "[x0]"]);

        // I = (x^2, y) over Q in Groebner mode
        let q = ScalarRing::rationals();
        let pres = RegularQuotientPresentation::new(
            &q,
            2,
            vec![parse(&q, 2, "x0^2"), parse(&q, 2, "x1")],
            IdealMode::Groebner,
            3,
        )
        .unwrap();
        let env = EnvelopeAlgebra::build(pres, 4).unwrap();
        let data = env.square_zero_truncation(2).unwrap();
        assert_eq!(data.conormal_rank, 2);
        assert_eq!(data.conormal_basis, vec!["[x0^2]", "[x1]"]);

        // truncation too small
        let zpres = RegularQuotientPresentation::new(
            &z,
            1,
            vec![parse(&z, 1, "x0")],
            IdealMode::Triangular,
            1,
        )
        .unwrap();
        let env = EnvelopeAlgebra::build(zpres, 2).unwrap();
        assert!(matches!(
            env.square_zero_truncation(1),
            Err(Error::TruncationTooSmall(1))
        ));
    }

    #[test]
    fn conormal_class_by_rewriting() {
        let z = ScalarRing::integers();
        let pres = RegularQuotientPresentation::new(
            &z,
            2,
            vec![parse(&z, 2, "x0"), parse(&z, 2, "x1")],
            IdealMode::Triangular,
            3,
        )
        .unwrap();
        let env = EnvelopeAlgebra::build(pres, 3).unwrap();
        // f = 3x + xy + y^2: class = 3 [x] + 0 [y] modulo I^2...
        // xy and y^2 lie in I^2, so only the linear part survives
        let f = parse(&z, 2, "3*x0 + x0*x1 + x1^2");
        let class = env.conormal_class(&f);
        assert_eq!(class[0], parse(&z, 2, "3"));
        assert_eq!(class[1], parse(&z, 2, "0"));
    }

    #[test]
    fn groebner_envelope_rejected_over_modular_rings() {
        let f5 = ScalarRing::prime_field(5u32).unwrap();
        let err = RegularQuotientPresentation::new(
            &f5,
            1,
            vec![parse(&f5, 1, "x0")],
            IdealMode::Groebner,
            3,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsupportedRingModeCombination(_)));
    }
}
