//! Crystalline cohomology over the pd base `(p) < Z/p^N`, computed through
//! lifts, with the mod-p comparison against the directly built `F_p` De Rham
//! side.
//!
//! Semantics of the finite precision: for polynomial targets the lift's
//! slice complexes carry literal integer differentials, so the p-adically
//! completed cohomology is computed integrally and its invariant factors
//! are then truncated at `p^N` (an invariant factor `p^v` with `v >= N` is
//! indistinguishable from a free `Z/p^N` summand at this precision). The
//! comparison identity is checked against the integral model, where it is
//! exact in every slice.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::complex::{BoundedCochainComplex, ModuleInvariants};
use crate::derham::derham_slice;
use crate::envelope::{EnvelopeAlgebra, RegularQuotientPresentation};
use crate::error::{Error, Result};
use crate::pd::PdElement;
use crate::poly::{IdealMode, Polynomial};
use crate::scalar::ScalarRing;

/// An `F_p`-algebra presentation together with a `Z/p^N` lift whose
/// coefficient-wise reduction recovers the target.
#[derive(Debug, Clone)]
pub struct LiftSpec {
    pub target_ring: ScalarRing,
    pub lift_ring: ScalarRing,
    pub nvars: usize,
    pub target_gens: Vec<Polynomial>,
    pub lift_gens: Vec<Polynomial>,
    /// pd weight truncation for envelope (quotient) targets.
    pub weight_truncation: u32,
}

impl LiftSpec {
    pub fn new(
        p: impl Into<BigUint>,
        precision: u32,
        nvars: usize,
        target_gens: Vec<Polynomial>,
        lift_gens: Vec<Polynomial>,
        weight_truncation: u32,
    ) -> Result<Self> {
        let p = p.into();
        let target_ring = ScalarRing::prime_field(p.clone())?;
        let lift_ring = ScalarRing::padic_trunc(p, precision)?;
        if target_gens.len() != lift_gens.len() {
            return Err(Error::InvalidPresentation(
                "lift and target generator counts differ".into(),
            ));
        }
        for (t, l) in target_gens.iter().zip(&lift_gens) {
            if t.ring != target_ring || l.ring != lift_ring
                || t.nvars != nvars || l.nvars != nvars
            {
                return Err(Error::RingMismatch);
            }
            if l.base_change(&target_ring)? != *t {
                return Err(Error::InvalidPresentation(format!(
                    "lift generator '{l}' does not reduce to '{t}' mod p"
                )));
            }
        }
        Ok(LiftSpec {
            target_ring,
            lift_ring,
            nvars,
            target_gens,
            lift_gens,
            weight_truncation,
        })
    }

    /// The essentially unique default lift: reinterpret the canonical
    /// residues `[0, p)` in `Z/p^N`.
    pub fn default_lift(
        p: impl Into<BigUint>,
        precision: u32,
        nvars: usize,
        target_gens: Vec<Polynomial>,
        weight_truncation: u32,
    ) -> Result<Self> {
        let p = p.into();
        let lift_ring = ScalarRing::padic_trunc(p.clone(), precision)?;
        let lift_gens = target_gens
            .iter()
            .map(|f| {
                let mut out = Polynomial::zero(&lift_ring, nvars);
                for (m, c) in &f.terms {
                    let crate::scalar::Scalar::Res(v) = c else { unreachable!() };
                    out.add_term(m.clone(), crate::scalar::Scalar::Res(v.clone()));
                }
                out
            })
            .collect();
        LiftSpec::new(p, precision, nvars, target_gens, lift_gens, weight_truncation)
    }

    pub fn is_polynomial_target(&self) -> bool {
        self.target_gens.is_empty()
    }

    pub fn p(&self) -> &BigUint {
        self.target_ring.char_p().unwrap()
    }

    pub fn precision(&self) -> u32 {
        self.lift_ring.precision().unwrap()
    }

    /// Envelope of the lifted presentation over `Z/p^N`.
    pub fn lift_envelope(&self, probe_degree: u32) -> Result<EnvelopeAlgebra> {
        let pres = RegularQuotientPresentation::new(
            &self.lift_ring,
            self.nvars,
            self.lift_gens.clone(),
            IdealMode::Triangular,
            self.weight_truncation,
        )?;
        EnvelopeAlgebra::build(pres, probe_degree)
    }

    /// Envelope of the target presentation over `F_p`.
    pub fn target_envelope(&self, probe_degree: u32) -> Result<EnvelopeAlgebra> {
        let pres = RegularQuotientPresentation::new(
            &self.target_ring,
            self.nvars,
            self.target_gens.clone(),
            IdealMode::Triangular,
            self.weight_truncation,
        )?;
        EnvelopeAlgebra::build(pres, probe_degree)
    }
}

/// Cap every invariant factor at its p-part of exponent at most `N`;
/// factors with `v_p >= N` become free `Z/p^N` summands at this precision.
pub fn truncate_invariants(inv: &ModuleInvariants, p: &BigUint, precision: u32) -> ModuleInvariants {
    let mut free_rank = inv.free_rank;
    let mut torsion = Vec::new();
    for t in &inv.torsion {
        let mut v = 0u32;
        let mut x = t.clone();
        while !x.is_zero() && (&x % p).is_zero() {
            x /= p;
            v += 1;
        }
        if v >= precision {
            free_rank += 1;
        } else if v > 0 {
            torsion.push(p.pow(v));
        }
    }
    torsion.sort();
    ModuleInvariants { free_rank, torsion }
}

/// One slice entry of the crystalline table for a polynomial target.
#[derive(Debug, Clone)]
pub struct CrysEntry {
    /// Invariants of the integral model (the honest p-completed data).
    pub integral: ModuleInvariants,
    /// The same data truncated at precision `p^N`.
    pub truncated: ModuleInvariants,
    pub representative: Option<String>,
}

/// Crystalline cohomology table computed through the lift.
#[derive(Debug, Clone)]
pub enum CrystallineTable {
    /// Polynomial target: per (cohomological degree, polynomial degree).
    Polynomial {
        entries: BTreeMap<(usize, u32), CrysEntry>,
    },
    /// Regular-quotient target: graded envelope data per pd weight.
    Quotient { rows: Vec<QuotientGradedRow> },
}

#[derive(Debug, Clone)]
pub struct QuotientGradedRow {
    pub weight: u32,
    pub rank: usize,
}

/// The canonical integral model of the lift's slice complex for polynomial
/// targets: differentials have literal integer entries independent of the
/// lift representative.
pub fn integral_slice_model(nvars: usize, d: u32) -> BoundedCochainComplex {
    derham_slice(&ScalarRing::integers(), nvars, d)
}

/// Crystalline cohomology via the lift.
pub fn crystalline_via_lift(spec: &LiftSpec, degree_cap: u32) -> Result<CrystallineTable> {
    if spec.is_polynomial_target() {
        let p = spec.p().clone();
        let precision = spec.precision();
        let mut entries = BTreeMap::new();
        for d in 0..=degree_cap {
            let slice = integral_slice_model(spec.nvars, d);
            for n in 0..=spec.nvars {
                let integral = slice.cohomology_at(n as i64)?;
                let truncated = truncate_invariants(&integral, &p, precision);
                let representative = if truncated.is_zero() {
                    None
                } else {
                    slice.representative_at(n as i64)
                };
                entries.insert(
                    (n, d),
                    CrysEntry {
                        integral,
                        truncated,
                        representative,
                    },
                );
            }
        }
        Ok(CrystallineTable::Polynomial { entries })
    } else {
        let env = spec.lift_envelope(degree_cap)?;
        let mut rows = Vec::new();
        for w in 0..spec.weight_truncation {
            rows.push(QuotientGradedRow {
                weight: w,
                rank: env.graded_piece(w)?.rank(),
            });
        }
        Ok(CrystallineTable::Quotient { rows })
    }
}

/// One slice of the mod-p comparison for polynomial targets: the dimension
/// over `F_p` of the directly built De Rham side must equal the
/// base-change prediction from the integral crystalline model.
#[derive(Debug, Clone)]
pub struct ModpSliceCheck {
    pub d: u32,
    pub n: usize,
    pub fp_side: ModuleInvariants,
    pub crys_integral: ModuleInvariants,
    pub crys_truncated: ModuleInvariants,
    pub pass: bool,
}

/// Structural comparison row for quotient targets: the lift envelope
/// reduced mod p against the target envelope.
#[derive(Debug, Clone)]
pub struct StructuralCheck {
    pub label: String,
    pub lift_side: String,
    pub target_side: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ModpComparison {
    pub slices: Vec<ModpSliceCheck>,
    pub structural: Vec<StructuralCheck>,
    pub pass: bool,
}

impl ModpComparison {
    pub fn ensure_pass(&self) -> Result<()> {
        if self.pass {
            return Ok(());
        }
        let offending = self
            .slices
            .iter()
            .find(|s| !s.pass)
            .map(|s| format!("slice d={} n={}", s.d, s.n))
            .or_else(|| {
                self.structural
                    .iter()
                    .find(|s| !s.pass)
                    .map(|s| s.label.clone())
            })
            .unwrap_or_default();
        Err(Error::ComparisonFailed(offending))
    }
}

/// Reduce a pd element coefficient-wise along a canonical ring map.
pub fn pd_base_change(elem: &PdElement, target: &ScalarRing) -> Result<PdElement> {
    let mut out = PdElement::zero(target, elem.nvars, elem.ngens, elem.truncation);
    for (m, c) in &elem.terms {
        out.add_term(m.clone(), c.base_change(target)?);
    }
    Ok(out)
}

/// The mod-p comparison. For polynomial targets this asserts, per slice,
/// `dim_Fp H^n(C (x) F_p) = dim(H^n(C) (x) F_p) + dim Tor_1(H^{n+1}(C), F_p)`
/// with `C` the integral model of the lift's slice complex. For quotient
/// targets it compares the lift envelope reduced mod p against the target
/// envelope: graded ranks and the rewriting action of the ambient
/// variables on the pd generators.
pub fn mod_p_comparison(spec: &LiftSpec, degree_cap: u32) -> Result<ModpComparison> {
    let p = spec.p().clone();
    let precision = spec.precision();
    let mut slices = Vec::new();
    let mut structural = Vec::new();
    let mut pass = true;

    if spec.is_polynomial_target() {
        for d in 0..=degree_cap {
            let fp_slice = derham_slice(&spec.target_ring, spec.nvars, d);
            let z_slice = integral_slice_model(spec.nvars, d);
            for n in 0..=spec.nvars {
                let fp_side = fp_slice.cohomology_at(n as i64)?;
                let crys_integral = z_slice.cohomology_at(n as i64)?;
                let next = if (n as i64) < z_slice.hi() {
                    z_slice.cohomology_at(n as i64 + 1)?
                } else {
                    ModuleInvariants::default()
                };
                let predicted = crys_integral.dim_tensor_fp(&p) + next.torsion_divisible_by(&p);
                let ok = fp_side.free_rank == predicted && fp_side.torsion.is_empty();
                pass &= ok;
                slices.push(ModpSliceCheck {
                    d,
                    n,
                    fp_side,
                    crys_truncated: truncate_invariants(&crys_integral, &p, precision),
                    crys_integral,
                    pass: ok,
                });
            }
        }
    } else {
        let lift_env = spec.lift_envelope(degree_cap)?;
        let target_env = spec.target_envelope(degree_cap)?;
        for w in 0..spec.weight_truncation {
            let a = lift_env.graded_piece(w)?.rank();
            let b = target_env.graded_piece(w)?.rank();
            let ok = a == b;
            pass &= ok;
            structural.push(StructuralCheck {
                label: format!("gr^{w} rank"),
                lift_side: a.to_string(),
                target_side: b.to_string(),
                pass: ok,
            });
        }
        // rewriting action mod p: x_v * y_i on both sides
        for v in 0..spec.nvars {
            let xv_lift = Polynomial::variable(&spec.lift_ring, spec.nvars, v)?;
            let xv_target = Polynomial::variable(&spec.target_ring, spec.nvars, v)?;
            for i in 0..spec.lift_gens.len() {
                let lift_nf = lift_env.normal_form(&lift_env.pd_generator(i).scale(&xv_lift));
                let reduced = pd_base_change(&lift_nf, &spec.target_ring)?;
                let target_nf =
                    target_env.normal_form(&target_env.pd_generator(i).scale(&xv_target));
                let ok = reduced == target_nf;
                pass &= ok;
                structural.push(StructuralCheck {
                    label: format!("x{v} * g{i} mod p"),
                    lift_side: reduced.to_string(),
                    target_side: target_nf.to_string(),
                    pass: ok,
                });
            }
        }
        // gamma action mod p on each generator
        for i in 0..spec.lift_gens.len() {
            for gn in 2..=3u32 {
                if gn >= spec.weight_truncation {
                    continue;
                }
                let lift_g = lift_env.gamma(gn, &lift_env.pd_generator(i))?;
                let reduced = pd_base_change(&lift_g, &spec.target_ring)?;
                let target_g = target_env.gamma(gn, &target_env.pd_generator(i))?;
                let ok = reduced == target_g;
                pass &= ok;
                structural.push(StructuralCheck {
                    label: format!("gamma_{gn}(g{i}) mod p"),
                    lift_side: reduced.to_string(),
                    target_side: target_g.to_string(),
                    pass: ok,
                });
            }
        }
    }
    Ok(ModpComparison {
        slices,
        structural,
        pass,
    })
}

/// Randomized alternative lift of a Triangular quotient target: perturb
/// each substitution tail by `p * h` with `h` respecting the eliminable
/// chain. The comparison tables must be identical for every valid lift.
pub fn perturb_lift(spec: &LiftSpec, rng: &mut impl rand::Rng) -> Result<LiftSpec> {
    assert!(!spec.is_polynomial_target());
    let ring = &spec.lift_ring;
    let p_scalar = ring.from_bigint(&num_bigint::BigInt::from(spec.p().clone()));
    let mut forbidden: Vec<usize> = Vec::new();
    let mut new_gens = Vec::new();
    for f in &spec.lift_gens {
        // perturbation free of all previously eliminated variables and of
        // the current generator's eliminated variable
        let mut h = crate::poly::random_polynomial(ring, spec.nvars, 2, 2, rng);
        for &j in &forbidden {
            h = h.substitute(j, &Polynomial::zero(ring, spec.nvars));
        }
        // determine the eliminated variable the same way the presentation
        // validator does
        let mut this_elim = None;
        'var: for j in 0..spec.nvars {
            if forbidden.contains(&j) {
                continue;
            }
            let lin = crate::poly::MonomialExp::variable(j, spec.nvars);
            let Some(c) = f.terms.get(&lin) else { continue };
            if !ring.is_unit(c) {
                continue;
            }
            for m in f.terms.keys() {
                if m != &lin && m.0[j] > 0 {
                    continue 'var;
                }
            }
            this_elim = Some(j);
            break;
        }
        let j = this_elim.ok_or_else(|| {
            Error::InvalidPresentation("perturbation target is not an eliminable chain".into())
        })?;
        h = h.substitute(j, &Polynomial::zero(ring, spec.nvars));
        forbidden.push(j);
        new_gens.push(f.add(&h.scale(&p_scalar)));
    }
    LiftSpec::new(
        spec.p().clone(),
        spec.precision(),
        spec.nvars,
        spec.target_gens.clone(),
        new_gens,
        spec.weight_truncation,
    )
}
