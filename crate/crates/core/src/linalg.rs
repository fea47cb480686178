//! Dense Hermitian operators, tensor-product bookkeeping and a Lanczos
//! eigensolver for operators that are only available as matrix-vector
//! products.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Above this dimension extremal eigenpairs are computed iteratively.
pub const DENSE_LIMIT: usize = 600;

/// Largest Hilbert-space dimension accepted anywhere in the crate.
pub const MAX_DIM: usize = 100_000;

const HERMITIAN_TOL: f64 = 1e-9;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Largest entry modulus of a complex matrix or vector.
pub trait MaxAbs {
    fn max_abs(&self) -> f64;
}

impl<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<C64, R, C>> MaxAbs
    for nalgebra::Matrix<C64, R, C, S>
{
    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// A square complex matrix known to be Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Wraps `matrix`, rejecting non-square or non-Hermitian input.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Numerical(format!(
                "operator is {}x{}, expected square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = (&matrix - matrix.adjoint()).max_abs();
        let scale = matrix.max_abs().max(1.0);
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::Numerical(format!(
                "operator is not Hermitian (deviation {dev:.3e})"
            )));
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Wraps `matrix` after replacing it by `(A + A^dagger)/2`.
    pub(crate) fn symmetrized(matrix: CMatrix) -> Self {
        let adj = matrix.adjoint();
        Self {
            matrix: (matrix + adj) * c(0.5),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    /// Rank-one projector onto the normalized `v`.
    pub fn projector(v: &CVector) -> Self {
        let n = v.norm();
        let u = v / c(n);
        Self {
            matrix: &u * u.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            matrix: &self.matrix * c(a),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// `<v|A|v>` for a vector that need not be normalized.
    pub fn expectation(&self, v: &CVector) -> f64 {
        (v.adjoint() * &self.matrix * v)[(0, 0)].re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().0
    }

    /// Eigenvalues in ascending order with matching eigenvector columns.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        hermitian_eigh(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        (&self.matrix * &self.matrix - &self.matrix).max_abs() <= tol
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && (&self.matrix - &other.matrix).max_abs() <= tol
    }
}

/// Eigen-decomposition of a Hermitian matrix, ascending. Real input takes
/// the cheaper real symmetric path.
pub fn hermitian_eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let (values, vectors) = if m.iter().all(|z| z.im == 0.0) {
        let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
        let evd = a.selfadjoint_eigendecomposition(faer::Side::Lower);
        let s = evd.s().column_vector();
        let u = evd.u();
        (
            (0..n).map(|i| s.read(i)).collect::<Vec<f64>>(),
            CMatrix::from_fn(n, n, |i, j| c(u.read(i, j))),
        )
    } else {
        let a = faer::Mat::<faer::complex_native::c64>::from_fn(n, n, |i, j| {
            let z = m[(i, j)];
            faer::complex_native::c64::new(z.re, z.im)
        });
        let evd = a.selfadjoint_eigendecomposition(faer::Side::Lower);
        let s = evd.s().column_vector();
        let u = evd.u();
        (
            (0..n).map(|i| s.read(i).re).collect::<Vec<f64>>(),
            CMatrix::from_fn(n, n, |i, j| {
                let z = u.read(i, j);
                C64::new(z.re, z.im)
            }),
        )
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let mut out = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        out.set_column(k, &vectors.column(i));
    }
    (sorted, out)
}

/// An operator known only through its action on vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &CVector) -> CVector;
}

impl LinearOperator for HermitianOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }
    fn apply(&self, x: &CVector) -> CVector {
        &self.matrix * x
    }
}

/// Materializes a matrix-free operator column by column.
pub fn to_dense<O: LinearOperator + ?Sized>(op: &O) -> CMatrix {
    let n = op.dim();
    let mut m = CMatrix::zeros(n, n);
    let mut e = CVector::zeros(n);
    for j in 0..n {
        e[j] = c(1.0);
        m.set_column(j, &op.apply(&e));
        e[j] = c(0.0);
    }
    m
}

/// Index bookkeeping for a tensor product of sites. Site 0 is the most
/// significant factor, matching the Kronecker product order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSpace {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl TensorSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= MAX_DIM)
                .ok_or_else(|| {
                    Error::ResourceGuard(format!(
                        "Hilbert-space dimension exceeds {MAX_DIM}"
                    ))
                })?;
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(Self {
            dims,
            strides,
            total,
        })
    }

    pub fn dim(&self) -> usize {
        self.total
    }

    pub fn sites(&self) -> usize {
        self.dims.len()
    }

    pub fn site_dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    pub fn stride(&self, i: usize) -> usize {
        self.strides[i]
    }

    /// Local level of site `i` in basis index `idx`.
    pub fn digit(&self, idx: usize, i: usize) -> usize {
        (idx / self.strides[i]) % self.dims[i]
    }

    fn bases(&self, sites: &[usize]) -> impl Iterator<Item = usize> + '_ {
        let sites = sites.to_vec();
        (0..self.total).filter(move |&idx| sites.iter().all(|&s| self.digit(idx, s) == 0))
    }

    /// `y += coeff * op_{ab} x`, where `op` acts on sites `a` (slow index)
    /// and `b` (fast index).
    pub fn apply_two_site(
        &self,
        op: &CMatrix,
        a: usize,
        b: usize,
        coeff: C64,
        x: &CVector,
        y: &mut CVector,
    ) {
        let (da, db) = (self.dims[a], self.dims[b]);
        let (sa, sb) = (self.strides[a], self.strides[b]);
        let k = da * db;
        debug_assert_eq!(op.nrows(), k);
        let offsets: Vec<usize> = (0..k).map(|i| (i / db) * sa + (i % db) * sb).collect();
        let mut local = vec![C64::new(0.0, 0.0); k];
        for base in self.bases(&[a, b]) {
            let mut nonzero = false;
            for (l, &o) in local.iter_mut().zip(&offsets) {
                *l = x[base + o];
                nonzero |= l.re != 0.0 || l.im != 0.0;
            }
            if !nonzero {
                continue;
            }
            for (row, &o) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (col, l) in local.iter().enumerate() {
                    acc += op[(row, col)] * l;
                }
                y[base + o] += coeff * acc;
            }
        }
    }

    /// `op_a x` for a single-site operator.
    pub fn apply_one_site(&self, op: &CMatrix, a: usize, x: &CVector) -> CVector {
        let d = self.dims[a];
        let s = self.strides[a];
        let mut y = CVector::zeros(self.total);
        let mut local = vec![C64::new(0.0, 0.0); d];
        for base in self.bases(&[a]) {
            for (i, l) in local.iter_mut().enumerate() {
                *l = x[base + i * s];
            }
            for row in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for (col, l) in local.iter().enumerate() {
                    acc += op[(row, col)] * l;
                }
                y[base + row * s] = acc;
            }
        }
        y
    }

    /// Dense embedding of a two-site operator into the full space.
    pub fn embed_two_site(&self, op: &CMatrix, a: usize, b: usize) -> CMatrix {
        let n = self.total;
        let mut m = CMatrix::zeros(n, n);
        let mut e = CVector::zeros(n);
        for j in 0..n {
            e[j] = c(1.0);
            let mut col = CVector::zeros(n);
            self.apply_two_site(op, a, b, c(1.0), &e, &mut col);
            m.set_column(j, &col);
            e[j] = c(0.0);
        }
        m
    }
}

/// Which end of the spectrum to target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Smallest,
    Largest,
}

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    pub max_basis: usize,
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_basis: 160,
            tol: 1e-10,
            max_restarts: 60,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: CVector,
}

fn project_out(v: &mut CVector, basis: &[CVector]) {
    for b in basis {
        let ov = b.dotc(v);
        v.axpy(-ov, b, c(1.0));
    }
}

/// Extremal eigenpairs of `op` restricted to the orthogonal complement of
/// `deflate` (which must be orthonormal). The first returned pair is
/// converged to `opts.tol`; further pairs are the next Ritz pairs of the
/// final Krylov space and are only approximate.
pub fn extremal_eigenpairs<O: LinearOperator + ?Sized>(
    op: &O,
    which: Which,
    count: usize,
    deflate: &[CVector],
    opts: &LanczosOptions,
) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    if deflate.len() >= n {
        return Ok(Vec::new());
    }
    if n <= DENSE_LIMIT {
        return dense_extremal(op, which, count, deflate);
    }
    lanczos(op, which, count, deflate, opts)
}

fn dense_extremal<O: LinearOperator + ?Sized>(
    op: &O,
    which: Which,
    count: usize,
    deflate: &[CVector],
) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    let mut m = to_dense(op);
    if !deflate.is_empty() {
        let mut q = CMatrix::zeros(n, n);
        for d in deflate {
            q += d * d.adjoint();
        }
        let p = CMatrix::identity(n, n) - &q;
        let shift = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() + 1.0;
        let sign = if which == Which::Smallest { 1.0 } else { -1.0 };
        m = &p * m * &p + q * c(sign * shift);
    }
    let (vals, vecs) = hermitian_eigh(&HermitianOperator::symmetrized(m).matrix);
    let avail = n - deflate.len();
    let take = count.min(avail);
    let idx: Vec<usize> = match which {
        Which::Smallest => (0..take).collect(),
        Which::Largest => (0..take).map(|k| n - 1 - k).collect(),
    };
    Ok(idx
        .into_iter()
        .map(|i| EigenPair {
            value: vals[i],
            vector: vecs.column(i).into_owned(),
        })
        .collect())
}

/// Lanczos iteration with full reorthogonalization and explicit restarts.
pub fn lanczos<O: LinearOperator + ?Sized>(
    op: &O,
    which: Which,
    count: usize,
    deflate: &[CVector],
    opts: &LanczosOptions,
) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    let avail = n - deflate.len();
    let kmax = opts.max_basis.min(avail).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start = CVector::from_fn(n, |_, _| {
        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let mut last_residual = f64::INFINITY;
    for _restart in 0..=opts.max_restarts {
        project_out(&mut start, deflate);
        project_out(&mut start, deflate);
        let nrm = start.norm();
        if nrm < 1e-14 {
            return Err(Error::Numerical("Lanczos start vector vanished".into()));
        }
        let mut basis: Vec<CVector> = vec![start.unscale(nrm)];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            let mut w = op.apply(&basis[j]);
            let a = basis[j].dotc(&w).re;
            alpha.push(a);
            w.axpy(c(-a), &basis[j], c(1.0));
            if j > 0 {
                w.axpy(c(-beta[j - 1]), &basis[j - 1], c(1.0));
            }
            for _ in 0..2 {
                project_out(&mut w, &basis);
                project_out(&mut w, deflate);
            }
            let b = w.norm();
            let size = alpha.len();
            let exhausted = b < 1e-12 || size >= kmax;
            if exhausted || size % 10 == 0 {
                let (theta, y) = tridiagonal_eigh(&alpha, &beta);
                let pick: Vec<usize> = match which {
                    Which::Smallest => (0..size).collect(),
                    Which::Largest => (0..size).rev().collect(),
                };
                let first = pick[0];
                let residual = b * y[(size - 1, first)].abs();
                last_residual = residual;
                let converged = residual <= opts.tol * theta[first].abs().max(1.0) || b < 1e-12;
                if converged || size >= kmax {
                    let ritz = |i: usize| -> CVector {
                        let mut v = CVector::zeros(n);
                        for (k, bk) in basis.iter().enumerate().take(size) {
                            v.axpy(c(y[(k, i)]), bk, c(1.0));
                        }
                        let nv = v.norm();
                        v.unscale(nv)
                    };
                    if converged {
                        return Ok(pick
                            .iter()
                            .take(count.max(1).min(size))
                            .map(|&i| EigenPair {
                                value: theta[i],
                                vector: ritz(i),
                            })
                            .collect());
                    }
                    start = ritz(first);
                    break;
                }
            }
            beta.push(b);
            basis.push(w.unscale(b));
        }
    }
    Err(Error::NoConvergence(format!(
        "Lanczos residual {last_residual:.3e} after {} restarts",
        opts.max_restarts
    )))
}

fn tridiagonal_eigh(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let evd = faer::Mat::<f64>::from_fn(k, k, |i, j| t[(i, j)])
        .selfadjoint_eigendecomposition(faer::Side::Lower);
    let (s, u) = (evd.s().column_vector(), evd.u());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s.read(a).total_cmp(&s.read(b)));
    let vals = order.iter().map(|&i| s.read(i)).collect();
    let vecs = DMatrix::<f64>::from_fn(k, k, |r, col| u.read(r, order[col]));
    (vals, vecs)
}
