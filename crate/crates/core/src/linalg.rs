//! Dense complex linear algebra on small square matrices.
//!
//! Composite spaces always use the ordering
//! `spin_1 ⊗ spin_2 ⊗ … ⊗ spin_N ⊗ cavity`, with `spin_1` the most
//! significant factor. For a single spin, index 0 is `|g⟩` and index 1 is
//! `|e⟩`; for the cavity, index `k` is the Fock state `|k⟩`. A full-space
//! basis index is therefore `spin_index * cavity_dim + fock`, where
//! `spin_index = Σ_i bit_i · 2^(N-1-i)` and `bit_i = 1` means spin `i` is
//! excited. [`HilbertFactorization`] is the only place this arithmetic lives.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Maximum `|h - h†|` entry accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a
    /// perfect square.
    pub fn from_row_major(data: Vec<C64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() {
            return Err(Error::DimensionMismatch { context: "from_row_major", expected: dim * dim, found: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        assert_eq!(v.len(), w.len(), "outer product of unequal lengths");
        Self::from_fn(v.len(), |r, c| v[r] * w[c].conj())
    }

    /// Projector onto a single basis vector.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(index, index)] = ONE;
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `|h - h†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(h + h†) / 2`, in place.
    pub fn symmetrize(&mut self) {
        for r in 0..self.dim {
            let d = self[(r, r)].re;
            self[(r, r)] = C64::new(d, 0.0);
            for c in (r + 1)..self.dim {
                let avg = (self[(r, c)] + self[(c, r)].conj()) * 0.5;
                self[(r, c)] = avg;
                self[(c, r)] = avg.conj();
            }
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &Self, s: C64) {
        assert_eq!(self.dim, other.dim, "add_scaled dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// `self = self - self†`, in place.
    pub fn sub_adjoint_in_place(&mut self) {
        for r in 0..self.dim {
            let d = self[(r, r)];
            self[(r, r)] = C64::new(0.0, 2.0 * d.im);
            for c in (r + 1)..self.dim {
                let a = self[(r, c)];
                let b = self[(c, r)];
                self[(r, c)] = a - b.conj();
                self[(c, r)] = b - a.conj();
            }
        }
    }

    /// Writes `self†` into `out`.
    pub fn adjoint_into(&self, out: &mut Self) {
        assert_eq!(self.dim, out.dim, "adjoint_into dimension mismatch");
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|z| *z = ZERO);
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "apply dimension mismatch");
        (0..self.dim)
            .map(|r| self.data[r * self.dim..(r + 1) * self.dim].iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self[(r, c)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.add_scaled(rhs, ONE);
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "mul dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out.data[r * n..(r + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Nonzero entries of a dense operator, for repeated products against dense
/// states. Built from a [`ComplexMatrix`]; the dense matrix stays the
/// canonical representation.
#[derive(Debug, Clone)]
pub struct OperatorEntries {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl OperatorEntries {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let mut entries = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let z = m[(r, c)];
                if z != ZERO {
                    entries.push((r, c, z));
                }
            }
        }
        Self { dim: n, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `out += s · (self · m)`.
    pub fn left_mul_into(&self, m: &ComplexMatrix, s: C64, out: &mut ComplexMatrix) {
        let n = self.dim;
        debug_assert_eq!(m.dim(), n);
        for &(r, k, v) in &self.entries {
            let a = v * s;
            let src = &m.data[k * n..(k + 1) * n];
            for (o, &b) in out.data[r * n..(r + 1) * n].iter_mut().zip(src) {
                *o += a * b;
            }
        }
    }
}

/// Tensor layout of the spin-chain ⊗ cavity space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertFactorization {
    spin_count: usize,
    cavity_dim: usize,
}

/// Which factors survive a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Spins,
    Cavity,
}

impl HilbertFactorization {
    pub fn new(spin_count: usize, cavity_dim: usize) -> Result<Self> {
        if spin_count == 0 || cavity_dim == 0 {
            return Err(Error::InvalidSpec(format!(
                "factorization needs at least one spin and a nonempty cavity (got N={spin_count}, cavity_dim={cavity_dim})"
            )));
        }
        if spin_count > 16 {
            return Err(Error::InvalidSpec(format!("N={spin_count} is too large for dense storage")));
        }
        Ok(Self { spin_count, cavity_dim })
    }

    pub fn spin_count(&self) -> usize {
        self.spin_count
    }

    pub fn cavity_dim(&self) -> usize {
        self.cavity_dim
    }

    pub fn spin_dim(&self) -> usize {
        1 << self.spin_count
    }

    pub fn total_dim(&self) -> usize {
        self.spin_dim() * self.cavity_dim
    }

    pub fn index(&self, spin_index: usize, fock: usize) -> usize {
        debug_assert!(spin_index < self.spin_dim() && fock < self.cavity_dim);
        spin_index * self.cavity_dim + fock
    }

    /// Spin-register index with the given spins excited (`true`).
    pub fn spin_index(&self, excited: &[bool]) -> usize {
        debug_assert_eq!(excited.len(), self.spin_count);
        excited.iter().fold(0, |acc, &e| (acc << 1) | usize::from(e))
    }

    /// Whether spin `site` (0-based, left to right) is excited in `spin_index`.
    pub fn is_excited(&self, spin_index: usize, site: usize) -> bool {
        (spin_index >> (self.spin_count - 1 - site)) & 1 == 1
    }
}

/// Kronecker product: entry `(i·b.dim+k, j·b.dim+l) = a(i,j)·b(k,l)`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors.into_iter().fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Reduced state on `keep`, tracing out the other factor.
pub fn partial_trace(rho: &ComplexMatrix, fact: &HilbertFactorization, keep: Subsystem) -> Result<ComplexMatrix> {
    if rho.dim() != fact.total_dim() {
        return Err(Error::DimensionMismatch {
            context: "partial_trace",
            expected: fact.total_dim(),
            found: rho.dim(),
        });
    }
    let (ds, dc) = (fact.spin_dim(), fact.cavity_dim());
    Ok(match keep {
        Subsystem::Spins => {
            ComplexMatrix::from_fn(ds, |s, t| (0..dc).map(|k| rho[(fact.index(s, k), fact.index(t, k))]).sum())
        }
        Subsystem::Cavity => {
            ComplexMatrix::from_fn(dc, |k, l| (0..ds).map(|s| rho[(fact.index(s, k), fact.index(s, l))]).sum())
        }
    })
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigh {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

/// Diagonalizes a Hermitian matrix; eigenvalues come back ascending.
pub fn eigh(h: &ComplexMatrix) -> Result<Eigh> {
    let dev = h.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = h.dim();
    if n == 0 {
        return Ok(Eigh { values: Vec::new(), vectors: ComplexMatrix::zeros(0) });
    }
    let mut herm = h.clone();
    herm.symmetrize();
    let decomposition = herm
        .to_nalgebra()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(Error::EigenFailure { dim: n, norm: h.frobenius_norm() })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| decomposition.eigenvalues[a].total_cmp(&decomposition.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| decomposition.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, c| decomposition.eigenvectors[(r, order[c])]);
    Ok(Eigh { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(h: &ComplexMatrix) -> Result<Vec<f64>> {
    eigh(h).map(|e| e.values)
}

/// `e^{-iht} ρ₀ e^{+iht}` for time-independent Hermitian `h`.
pub fn expm_propagate(h: &ComplexMatrix, rho0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if h.dim() != rho0.dim() {
        return Err(Error::DimensionMismatch { context: "expm_propagate", expected: h.dim(), found: rho0.dim() });
    }
    let Eigh { values, vectors } = eigh(h)?;
    let phases: Vec<C64> = values.iter().map(|&e| C64::from_polar(1.0, -e * t)).collect();
    let n = h.dim();
    let mut v_phase = vectors.clone();
    for r in 0..n {
        for c in 0..n {
            v_phase[(r, c)] *= phases[c];
        }
    }
    let u = &v_phase * &vectors.adjoint();
    Ok(&(&u * rho0) * &u.adjoint())
}

/// Single-spin and cavity building blocks.
pub mod ops {
    use super::*;

    /// `σ⁺ = |e⟩⟨g|`.
    pub fn sigma_plus() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2);
        m[(1, 0)] = ONE;
        m
    }

    /// `σ⁻ = |g⟩⟨e|`.
    pub fn sigma_minus() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = ONE;
        m
    }

    pub fn sigma_x() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = ONE;
        m[(1, 0)] = ONE;
        m
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    /// Truncated annihilation operator on Fock states `|0⟩ … |dim-1⟩`.
    pub fn annihilation(dim: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim);
        for k in 1..dim {
            m[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
        }
        m
    }

    pub fn creation(dim: usize) -> ComplexMatrix {
        annihilation(dim).adjoint()
    }
}
