//! Exact dense linear algebra over the scalar rings: Smith normal form with
//! optional unimodular transforms, linear solving, and kernel extraction.
//!
//! Pivoting strategy per ring: minimal absolute value over the integers (to
//! limit coefficient blowup), minimal p-valuation over `Z/p^N` (a local chain
//! ring, where the diagonal normalizes to pure p-powers), first nonzero over
//! fields.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::Result;
use crate::scalar::{Scalar, ScalarRing};

/// Dense matrix with entries in a single [`ScalarRing`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub ring: ScalarRing,
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(ring: &ScalarRing, rows: usize, cols: usize) -> Self {
        Matrix {
            ring: ring.clone(),
            rows,
            cols,
            entries: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &ScalarRing, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    pub fn from_fn(
        ring: &ScalarRing,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let mut m = Self::zero(ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(ring: &ScalarRing, rows: Vec<Vec<Scalar>>, cols: usize) -> Self {
        let nrows = rows.len();
        let mut m = Self::zero(ring, nrows, cols);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn from_i64(ring: &ScalarRing, data: &[&[i64]]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        Self::from_fn(ring, rows, cols, |i, j| ring.from_i64(data[i][j]))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| self.ring.is_zero(v))
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        assert_eq!(self.ring, other.ring, "ring mismatch");
        let mut out = Matrix::zero(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if self.ring.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if self.ring.is_zero(b) {
                        continue;
                    }
                    let v = self.ring.add(out.get(i, j), &self.ring.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = self.ring.zero();
                for j in 0..self.cols {
                    acc = self.ring.add(&acc, &self.ring.mul(self.get(i, j), &v[j]));
                }
                acc
            })
            .collect()
    }

    /// Coefficient-wise canonical ring map.
    pub fn base_change(&self, target: &ScalarRing) -> Result<Matrix> {
        let mut out = Matrix::zero(target, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.ring.map_into(target, self.get(i, j))?);
            }
        }
        Ok(out)
    }

    /// Sparse triplet text format `row col value`, one entry per line,
    /// row-major, zeros omitted.
    pub fn to_triplets(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if !self.ring.is_zero(v) {
                    out.push_str(&format!("{} {} {}\n", i, j, self.ring.render(v)));
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_a += c * row_b
    fn add_row_multiple(&mut self, a: usize, b: usize, c: &Scalar) {
        if self.ring.is_zero(c) {
            return;
        }
        for j in 0..self.cols {
            let v = self
                .ring
                .add(self.get(a, j), &self.ring.mul(self.get(b, j), c));
            self.set(a, j, v);
        }
    }

    /// col_a += c * col_b
    fn add_col_multiple(&mut self, a: usize, b: usize, c: &Scalar) {
        if self.ring.is_zero(c) {
            return;
        }
        for i in 0..self.rows {
            let v = self
                .ring
                .add(self.get(i, a), &self.ring.mul(self.get(i, b), c));
            self.set(i, a, v);
        }
    }

    fn scale_row(&mut self, a: usize, c: &Scalar) {
        for j in 0..self.cols {
            let v = self.ring.mul(self.get(a, j), c);
            self.set(a, j, v);
        }
    }

    fn scale_col(&mut self, a: usize, c: &Scalar) {
        for i in 0..self.rows {
            let v = self.ring.mul(self.get(i, a), c);
            self.set(i, a, v);
        }
    }
}

/// Which unimodular transforms to accumulate during Smith reduction.
#[derive(Debug, Clone, Copy, Default)]
pub struct TransformRequest {
    pub p: bool,
    pub p_inv: bool,
    pub q: bool,
    pub q_inv: bool,
}

impl TransformRequest {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn all() -> Self {
        TransformRequest {
            p: true,
            p_inv: true,
            q: true,
            q_inv: true,
        }
    }
}

/// Smith decomposition `P * A * Q = D` with `D` diagonal and the diagonal
/// entries forming a divisibility chain. `diag` holds only the nonzero
/// invariant factors, normalized (positive over `Z`, `1` over fields, pure
/// p-powers over `Z/p^N`).
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub diag: Vec<Scalar>,
    pub p: Option<Matrix>,
    pub p_inv: Option<Matrix>,
    pub q: Option<Matrix>,
    pub q_inv: Option<Matrix>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }
}

struct Reducer {
    a: Matrix,
    p: Option<Matrix>,
    p_inv: Option<Matrix>,
    q: Option<Matrix>,
    q_inv: Option<Matrix>,
}

impl Reducer {
    fn new(a: Matrix, want: TransformRequest) -> Self {
        let ring = a.ring.clone();
        let (r, c) = (a.rows, a.cols);
        Reducer {
            a,
            p: want.p.then(|| Matrix::identity(&ring, r)),
            p_inv: want.p_inv.then(|| Matrix::identity(&ring, r)),
            q: want.q.then(|| Matrix::identity(&ring, c)),
            q_inv: want.q_inv.then(|| Matrix::identity(&ring, c)),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        if let Some(p) = &mut self.p {
            p.swap_rows(i, j);
        }
        if let Some(pi) = &mut self.p_inv {
            pi.swap_cols(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        if let Some(q) = &mut self.q {
            q.swap_cols(i, j);
        }
        if let Some(qi) = &mut self.q_inv {
            qi.swap_rows(i, j);
        }
    }

    /// row_i += c * row_j (left multiplication by an elementary matrix)
    fn row_op(&mut self, i: usize, j: usize, c: &Scalar) {
        let ring = self.a.ring.clone();
        self.a.add_row_multiple(i, j, c);
        if let Some(p) = &mut self.p {
            p.add_row_multiple(i, j, c);
        }
        if let Some(pi) = &mut self.p_inv {
            pi.add_col_multiple(j, i, &ring.neg(c));
        }
    }

    /// col_i += c * col_j (right multiplication by an elementary matrix)
    fn col_op(&mut self, i: usize, j: usize, c: &Scalar) {
        let ring = self.a.ring.clone();
        self.a.add_col_multiple(i, j, c);
        if let Some(q) = &mut self.q {
            q.add_col_multiple(i, j, c);
        }
        if let Some(qi) = &mut self.q_inv {
            qi.add_row_multiple(j, i, &ring.neg(c));
        }
    }

    /// row_i *= u for a unit u
    fn scale_row(&mut self, i: usize, u: &Scalar) {
        let inv = self.a.ring.inv(u).expect("transform scale must be a unit");
        self.a.scale_row(i, u);
        if let Some(p) = &mut self.p {
            p.scale_row(i, u);
        }
        if let Some(pi) = &mut self.p_inv {
            pi.scale_col(i, &inv);
        }
    }
}

/// Smith normal form. Over fields this degenerates to Gaussian rank
/// reduction with unit diagonal.
pub fn smith_normal_form(a: &Matrix, want: TransformRequest) -> SmithDecomposition {
    let ring = a.ring.clone();
    let mut red = Reducer::new(a.clone(), want);
    let n = a.rows.min(a.cols);
    let mut t = 0;
    while t < n {
        if !select_pivot(&mut red, t) {
            break;
        }
        clear_cross(&mut red, t);
        if matches!(ring, ScalarRing::Integers) {
            // enforce divisibility of the remaining block by the pivot
            loop {
                let mut offending = None;
                'scan: for i in (t + 1)..red.a.rows {
                    for j in (t + 1)..red.a.cols {
                        if ring
                            .div_exact(red.a.get(i, j), red.a.get(t, t))
                            .is_none()
                        {
                            offending = Some(i);
                            break 'scan;
                        }
                    }
                }
                match offending {
                    Some(i) => {
                        let one = ring.one();
                        red.row_op(t, i, &one);
                        clear_cross(&mut red, t);
                    }
                    None => break,
                }
            }
        }
        normalize_pivot(&mut red, t);
        t += 1;
    }
    let mut diag = Vec::new();
    for i in 0..n {
        let v = red.a.get(i, i);
        if !ring.is_zero(v) {
            diag.push(v.clone());
        }
    }
    SmithDecomposition {
        diag,
        p: red.p,
        p_inv: red.p_inv,
        q: red.q,
        q_inv: red.q_inv,
    }
}

/// Move the best pivot of the trailing block to position (t, t).
/// Returns false when the block is zero.
fn select_pivot(red: &mut Reducer, t: usize) -> bool {
    let ring = red.a.ring.clone();
    let mut best: Option<(usize, usize)> = None;
    for i in t..red.a.rows {
        for j in t..red.a.cols {
            let v = red.a.get(i, j);
            if ring.is_zero(v) {
                continue;
            }
            best = Some(match best {
                None => (i, j),
                Some(b) => {
                    if pivot_better(&ring, v, red.a.get(b.0, b.1)) {
                        (i, j)
                    } else {
                        b
                    }
                }
            });
        }
    }
    match best {
        Some((i, j)) => {
            red.swap_rows(t, i);
            red.swap_cols(t, j);
            true
        }
        None => false,
    }
}

fn pivot_better(ring: &ScalarRing, cand: &Scalar, cur: &Scalar) -> bool {
    match ring {
        ScalarRing::Integers => cand.int_abs() < cur.int_abs(),
        ScalarRing::PadicTrunc { .. } => ring.val_p(cand) < ring.val_p(cur),
        _ => false,
    }
}

/// Clear row t and column t except for the pivot.
fn clear_cross(red: &mut Reducer, t: usize) {
    let ring = red.a.ring.clone();
    loop {
        let mut dirty = false;
        // column t
        for i in (t + 1)..red.a.rows {
            let v = red.a.get(i, t).clone();
            if ring.is_zero(&v) {
                continue;
            }
            match ring.div_exact(&v, red.a.get(t, t)) {
                Some(qv) => {
                    red.row_op(i, t, &ring.neg(&qv));
                }
                None => {
                    // integer case: division with remainder shrinks the entry
                    let qv = int_quotient(&ring, &v, red.a.get(t, t));
                    red.row_op(i, t, &ring.neg(&qv));
                    red.swap_rows(t, i);
                    dirty = true;
                }
            }
        }
        // row t
        for j in (t + 1)..red.a.cols {
            let v = red.a.get(t, j).clone();
            if ring.is_zero(&v) {
                continue;
            }
            match ring.div_exact(&v, red.a.get(t, t)) {
                Some(qv) => {
                    red.col_op(j, t, &ring.neg(&qv));
                }
                None => {
                    let qv = int_quotient(&ring, &v, red.a.get(t, t));
                    red.col_op(j, t, &ring.neg(&qv));
                    red.swap_cols(t, j);
                    dirty = true;
                }
            }
        }
        let col_clear = ((t + 1)..red.a.rows).all(|i| ring.is_zero(red.a.get(i, t)));
        let row_clear = ((t + 1)..red.a.cols).all(|j| ring.is_zero(red.a.get(t, j)));
        if !dirty && col_clear && row_clear {
            break;
        }
    }
}

/// Rounded integer quotient for the remainder-shrinking step.
fn int_quotient(ring: &ScalarRing, a: &Scalar, b: &Scalar) -> Scalar {
    let (Scalar::Int(x), Scalar::Int(y)) = (a, b) else {
        panic!("integer quotient outside Z")
    };
    let _ = ring;
    Scalar::Int(x / y)
}

/// Normalize the pivot: sign over Z, to 1 over fields, to a pure p-power
/// over Z/p^N.
fn normalize_pivot(red: &mut Reducer, t: usize) {
    let ring = red.a.ring.clone();
    let v = red.a.get(t, t).clone();
    match &ring {
        ScalarRing::Integers => {
            if let Scalar::Int(x) = &v {
                if x.sign() == num_bigint::Sign::Minus {
                    red.scale_row(t, &ring.from_i64(-1));
                }
            }
        }
        ScalarRing::Rationals | ScalarRing::PrimeField { .. } => {
            let inv = ring.inv(&v).expect("nonzero pivot over a field");
            red.scale_row(t, &inv);
        }
        ScalarRing::PadicTrunc { p, .. } => {
            let val = ring.val_p(&v).unwrap();
            let pv = ring.from_bigint(&num_bigint::BigInt::from(p.pow(val)));
            let unit = ring
                .div_exact(&v, &pv)
                .expect("valuation split");
            let inv = ring.inv(&unit).expect("unit part invertible");
            red.scale_row(t, &inv);
        }
    }
}

pub fn rank(a: &Matrix) -> usize {
    smith_normal_form(a, TransformRequest::none()).rank()
}

/// One kernel generator of a matrix, in terms of the Smith transform `Q`:
/// the generator is `p^shift * (column `col` of Q)`; `shift` is zero except
/// over `Z/p^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelGen {
    pub col: usize,
    pub shift: u32,
}

/// Generators of `ker(A)` read off a decomposition of `A`.
/// Over a field or `Z` these columns form a basis of a direct summand; over
/// `Z/p^N` the generator `p^shift * q_col` has annihilator `p^(N-shift)`.
pub fn kernel_gens(ring: &ScalarRing, decomp: &SmithDecomposition, cols: usize) -> Vec<KernelGen> {
    let mut out = Vec::new();
    for j in 0..cols {
        let d = decomp.diag.get(j);
        match ring {
            ScalarRing::PadicTrunc { .. } => {
                let prec = ring.precision().unwrap();
                let v = d.map_or(prec, |d| ring.val_p(d).unwrap());
                if v > 0 {
                    out.push(KernelGen {
                        col: j,
                        shift: prec - v,
                    });
                }
            }
            _ => {
                if d.is_none() {
                    out.push(KernelGen { col: j, shift: 0 });
                }
            }
        }
    }
    out
}

/// Solve `A x = b` exactly; `None` when no solution exists over the ring.
/// The decomposition must carry `p` and `q`.
pub fn solve_with(
    ring: &ScalarRing,
    decomp: &SmithDecomposition,
    rows: usize,
    cols: usize,
    b: &[Scalar],
) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), rows);
    let p = decomp.p.as_ref().expect("need P transform");
    let q = decomp.q.as_ref().expect("need Q transform");
    let c = p.mul_vec(b);
    let mut y = vec![ring.zero(); cols];
    for (i, ci) in c.iter().enumerate() {
        match decomp.diag.get(i) {
            Some(d) => {
                y[i] = ring.div_exact(ci, d)?;
            }
            None => {
                if !ring.is_zero(ci) {
                    return None;
                }
            }
        }
    }
    Some(q.mul_vec(&y))
}

pub fn solve(a: &Matrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    let decomp = smith_normal_form(
        a,
        TransformRequest {
            p: true,
            q: true,
            ..Default::default()
        },
    );
    solve_with(&a.ring, &decomp, a.rows, a.cols, b)
}

/// Invariant-factor exponent of a `Z/p^N` diagonal entry as a plain integer.
pub fn invariant_as_biguint(ring: &ScalarRing, d: &Scalar) -> BigUint {
    match (ring, d) {
        (ScalarRing::Integers, Scalar::Int(v)) => v.magnitude().clone(),
        (_, Scalar::Res(v)) => v.clone(),
        _ => BigUint::zero(),
    }
}
