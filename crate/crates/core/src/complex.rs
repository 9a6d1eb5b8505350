//! Bounded cochain complexes and their cohomology, reported as invariant
//! factors plus free rank.
//!
//! Over `Z` and `Z/p^N` the cohomology `ker(d_n)/im(d_{n-1})` is computed by
//! presenting the kernel on Smith-transform generators and running a second
//! Smith reduction on the relation matrix; over fields it degenerates to
//! rank counting.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{kernel_gens, smith_normal_form, solve, Matrix, TransformRequest};
use crate::scalar::{Scalar, ScalarRing};

/// A finitely generated module over the coefficient ring: free rank plus a
/// divisibility chain of invariant factors (empty over a field). Over
/// `Z/p^N`, "free" means free as a `Z/p^N`-module and the torsion factors
/// are proper powers `p^w`, `0 < w < N`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModuleInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

impl ModuleInvariants {
    pub fn free(rank: usize) -> Self {
        ModuleInvariants {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Dimension after tensoring with `F_p`: the free rank plus the number
    /// of invariant factors divisible by `p`.
    pub fn dim_tensor_fp(&self, p: &BigUint) -> usize {
        self.free_rank + self.torsion_divisible_by(p)
    }

    /// Number of invariant factors divisible by `p` (the `Tor_1` count).
    pub fn torsion_divisible_by(&self, p: &BigUint) -> usize {
        self.torsion.iter().filter(|t| (*t % p).is_zero()).count()
    }

    /// Factors rendered as `2;4;12`, empty string when torsion-free.
    pub fn torsion_string(&self) -> String {
        self.torsion
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl std::fmt::Display for ModuleInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("free^{}", self.free_rank));
        }
        for t in &self.torsion {
            parts.push(format!("tors({t})"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Cochain complex supported on a contiguous degree range, with one
/// differential matrix per step and a basis label per slot for reporting.
#[derive(Debug, Clone)]
pub struct BoundedCochainComplex {
    pub ring: ScalarRing,
    pub lo: i64,
    pub dims: Vec<usize>,
    /// `diffs[k]` maps degree `lo + k` to `lo + k + 1`.
    pub diffs: Vec<Matrix>,
    pub labels: Vec<Vec<String>>,
}

impl BoundedCochainComplex {
    /// Validates shape compatibility and `d . d = 0` exactly.
    pub fn new(
        ring: ScalarRing,
        lo: i64,
        dims: Vec<usize>,
        diffs: Vec<Matrix>,
        labels: Vec<Vec<String>>,
    ) -> Result<Self> {
        assert_eq!(diffs.len() + 1, dims.len().max(1), "one differential per step");
        assert_eq!(labels.len(), dims.len());
        for (k, d) in diffs.iter().enumerate() {
            if d.rows != dims[k + 1] || d.cols != dims[k] || d.ring != ring {
                return Err(Error::InvalidPresentation(format!(
                    "differential {k} has shape {}x{}, expected {}x{}",
                    d.rows,
                    d.cols,
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        for (k, labs) in labels.iter().enumerate() {
            assert_eq!(labs.len(), dims[k], "label count per degree");
        }
        for k in 0..diffs.len().saturating_sub(1) {
            if !diffs[k + 1].mul(&diffs[k]).is_zero() {
                return Err(Error::InvalidPresentation(format!(
                    "d.d != 0 between degrees {} and {}",
                    lo + k as i64,
                    lo + k as i64 + 2
                )));
            }
        }
        Ok(BoundedCochainComplex {
            ring,
            lo,
            dims,
            diffs,
            labels,
        })
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn dim_at(&self, n: i64) -> usize {
        if n < self.lo || n > self.hi() {
            0
        } else {
            self.dims[(n - self.lo) as usize]
        }
    }

    /// Differential out of degree `n`; zero map at and beyond the boundary.
    fn diff_out(&self, n: i64) -> Matrix {
        let idx = n - self.lo;
        if idx >= 0 && (idx as usize) < self.diffs.len() {
            self.diffs[idx as usize].clone()
        } else {
            Matrix::zero(&self.ring, self.dim_at(n + 1), self.dim_at(n))
        }
    }

    /// Invariants of `ker(d_n) / im(d_{n-1})`.
    pub fn cohomology_at(&self, n: i64) -> Result<ModuleInvariants> {
        if n < self.lo || n > self.hi() {
            return Err(Error::DegreeOutOfRange {
                degree: n,
                lo: self.lo,
                hi: self.hi(),
            });
        }
        let d_out = self.diff_out(n);
        let d_in = self.diff_out(n - 1);
        cohomology_of_pair(&self.ring, &d_in, &d_out)
    }

    /// A cocycle representative of a nonzero class in degree `n`, rendered
    /// on the basis labels; `None` when the cohomology vanishes there.
    pub fn representative_at(&self, n: i64) -> Option<String> {
        if n < self.lo || n > self.hi() || self.dim_at(n) == 0 {
            return None;
        }
        let ring = &self.ring;
        let d_out = self.diff_out(n);
        let d_in = self.diff_out(n - 1);
        let decomp = smith_normal_form(&d_out, TransformRequest { q: true, ..Default::default() });
        let q = decomp.q.as_ref().unwrap();
        for gen in kernel_gens(ring, &decomp, d_out.cols) {
            let mut v = q.column(gen.col);
            if gen.shift > 0 {
                let p = ring.char_p().unwrap().clone();
                let factor = ring.from_bigint(&num_bigint::BigInt::from(p.pow(gen.shift)));
                v = v.iter().map(|x| ring.mul(x, &factor)).collect();
            }
            let in_image = if d_in.cols == 0 {
                v.iter().all(|x| ring.is_zero(x))
            } else {
                solve(&d_in, &v).is_some()
            };
            if !in_image {
                return Some(self.render_vector(n, &v));
            }
        }
        None
    }

    fn render_vector(&self, n: i64, v: &[Scalar]) -> String {
        let labels = &self.labels[(n - self.lo) as usize];
        let mut parts = Vec::new();
        for (i, c) in v.iter().enumerate() {
            if self.ring.is_zero(c) {
                continue;
            }
            if self.ring.is_one(c) {
                parts.push(labels[i].clone());
            } else {
                parts.push(format!("{}*{}", self.ring.render(c), labels[i]));
            }
        }
        parts.join(" + ")
    }

    /// Entrywise canonical ring map; re-validates `d . d = 0`.
    pub fn base_change(&self, target: &ScalarRing) -> Result<BoundedCochainComplex> {
        let diffs = self
            .diffs
            .iter()
            .map(|d| d.base_change(target))
            .collect::<Result<Vec<_>>>()?;
        BoundedCochainComplex::new(
            target.clone(),
            self.lo,
            self.dims.clone(),
            diffs,
            self.labels.clone(),
        )
    }
}

/// Cohomology `ker(d_out)/im(d_in)` for one pair of composable differentials.
pub fn cohomology_of_pair(
    ring: &ScalarRing,
    d_in: &Matrix,
    d_out: &Matrix,
) -> Result<ModuleInvariants> {
    if ring.is_field() {
        let dim = d_out.cols;
        let r_out = smith_normal_form(d_out, TransformRequest::none()).rank();
        let r_in = smith_normal_form(d_in, TransformRequest::none()).rank();
        return Ok(ModuleInvariants::free(dim - r_out - r_in));
    }

    let decomp = smith_normal_form(
        d_out,
        TransformRequest {
            q_inv: true,
            ..Default::default()
        },
    );
    let gens = kernel_gens(ring, &decomp, d_out.cols);
    if gens.is_empty() {
        return Ok(ModuleInvariants::default());
    }
    let q_inv = decomp.q_inv.as_ref().unwrap();
    let coords = q_inv.mul(d_in);

    // rows of `coords` away from kernel generators must vanish (d.d = 0)
    let gen_rows: Vec<usize> = gens.iter().map(|g| g.col).collect();
    for i in 0..coords.rows {
        if gen_rows.contains(&i) {
            continue;
        }
        for j in 0..coords.cols {
            assert!(
                ring.is_zero(coords.get(i, j)),
                "image not contained in kernel"
            );
        }
    }

    // present H on the kernel generators
    let t = gens.len();
    let prec = ring.precision();
    let mut rel_cols: Vec<Vec<Scalar>> = Vec::new();
    for j in 0..coords.cols {
        let mut col = Vec::with_capacity(t);
        for g in &gens {
            let c = coords.get(g.col, j);
            let v = if g.shift == 0 {
                c.clone()
            } else {
                let p = ring.char_p().unwrap().clone();
                let pw = ring.from_bigint(&num_bigint::BigInt::from(p.pow(g.shift)));
                ring.div_exact(c, &pw)
                    .expect("kernel coordinate divisibility")
            };
            col.push(v);
        }
        rel_cols.push(col);
    }
    // internal annihilator relations p^(N - shift) per generator over Z/p^N
    if let Some(n) = prec {
        for (i, g) in gens.iter().enumerate() {
            let v = n - g.shift;
            if v < n {
                let p = ring.char_p().unwrap().clone();
                let mut col = vec![ring.zero(); t];
                col[i] = ring.from_bigint(&num_bigint::BigInt::from(p.pow(v)));
                rel_cols.push(col);
            }
        }
    }
    let rels = Matrix::from_fn(ring, t, rel_cols.len(), |i, j| rel_cols[j][i].clone());
    let rel_snf = smith_normal_form(&rels, TransformRequest::none());

    let mut torsion: Vec<BigUint> = Vec::new();
    for d in &rel_snf.diag {
        let f = crate::linalg::invariant_as_biguint(ring, d);
        if !f.is_one() {
            torsion.push(f);
        }
    }
    Ok(ModuleInvariants {
        free_rank: t - rel_snf.rank(),
        torsion,
    })
}
