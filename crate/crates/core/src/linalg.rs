//! Dense complex Hermitian linear algebra for small dimensions.
//!
//! Every operator in this crate is a d×d complex matrix with d of order
//! ten at most, so the eigensolver is a cyclic Jacobi iteration on the
//! Hermitian input: dependency-free, unconditionally stable, and accurate
//! to machine precision for the problem sizes at hand.
//!
//! Sums over POVM outcomes are accumulated in a canonical (sorted) order so
//! that relabeling the outcomes reproduces bit-identical results.

use num_complex::Complex64;

use crate::{Error, Result};

/// Hermiticity tolerance enforced when a [`HermitianMatrix`] is constructed.
pub const HERM_TOL: f64 = 1e-12;
/// Positive-semidefiniteness tolerance used across the crate.
pub const PSD_TOL: f64 = 1e-9;
/// Tolerance for identities that hold exactly in real arithmetic.
pub const EQ_TOL: f64 = 1e-10;

/// Convergence threshold on the off-diagonal Frobenius mass of the Jacobi
/// iteration.
const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

pub type C64 = Complex64;

/// Dense row-major d×d complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.set(k, k, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Builds a matrix from nested rows, rejecting ragged input.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::NotSquare {
                expected: dim.max(1),
            });
        }
        Ok(Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, &x) in diag.iter().enumerate() {
            m.set(k, k, C64::new(x, 0.0));
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.get(r, k) * other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| (0..self.dim).map(|k| self.get(r, k) * v[k]).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Entrywise ℓ¹ norm `Σ_{jk} |M[j][k]|`, accumulated in sorted order so
    /// the value is invariant under row/column permutations.
    pub fn entrywise_l1_norm(&self) -> f64 {
        sum_canonical(self.data.iter().map(|z| z.norm()).collect())
    }

    /// `‖U†U − I‖_max ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let gram = self.adjoint().matmul(self);
        gram.sub(&Self::identity(self.dim)).max_abs_entry() <= tol
    }
}

/// `Σ_k xs[k]` accumulated in `f64::total_cmp` order, so the result does not
/// depend on the order the terms were supplied in.
pub(crate) fn sum_canonical(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs.iter().sum()
}

/// Entrywise canonical-order sum of same-shape matrices.
pub(crate) fn sum_matrices_canonical(terms: &[ComplexMatrix]) -> ComplexMatrix {
    assert!(!terms.is_empty());
    let dim = terms[0].dim();
    ComplexMatrix::from_fn(dim, |r, c| {
        let re = sum_canonical(terms.iter().map(|t| t.get(r, c).re).collect());
        let im = sum_canonical(terms.iter().map(|t| t.get(r, c).im).collect());
        C64::new(re, im)
    })
}

/// `Tr[A·B]` without forming the product matrix.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    assert_eq!(a.dim(), b.dim());
    let d = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..d {
        for c in 0..d {
            acc += a.get(r, c) * b.get(c, r);
        }
    }
    acc
}

/// A complex matrix certified Hermitian at construction
/// (`max |M[j][k] − conj(M[k][j])| ≤ 1e−12`).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let max_deviation = m.sub(&m.adjoint()).max_abs_entry();
        if max_deviation > HERM_TOL {
            return Err(Error::NotHermitian { max_deviation });
        }
        Ok(Self { m })
    }

    /// Wraps `(M + M†)/2` without a tolerance check. Reserved for matrices
    /// that are Hermitian by algebra and carry rounding dust at most.
    pub(crate) fn symmetrized(m: ComplexMatrix) -> Self {
        let sym = m.add(&m.adjoint()).scale(0.5);
        Self { m: sym }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::zeros(dim),
        }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self {
            m: ComplexMatrix::from_real_diag(diag),
        }
    }

    /// Rank-one projector `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn projector(v: &[C64]) -> Self {
        let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!(norm_sqr > 0.0, "cannot project on the zero vector");
        let m = ComplexMatrix::from_fn(v.len(), |r, c| v[r] * v[c].conj() / norm_sqr);
        Self::symmetrized(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn trace_real(&self) -> f64 {
        self.m.trace().re
    }

    /// Full eigendecomposition, eigenvalues ascending.
    pub fn eig(&self) -> EigenDecomposition {
        jacobi_eig(&self.m)
    }

    /// `max_k |λ_k|`; equals `λ_max` for PSD input.
    pub fn operator_norm(&self) -> f64 {
        self.eig()
            .values
            .iter()
            .map(|l| l.abs())
            .fold(0.0, f64::max)
    }

    /// `Σ_k |λ_k|`.
    pub fn trace_norm(&self) -> f64 {
        sum_canonical(self.eig().values.iter().map(|l| l.abs()).collect())
    }

    /// `λ_min ≥ −tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.eig().min_value() >= -tol
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().min_value()
    }

    /// PSD square root. Eigenvalues in `[−1e−9, 0)` are clamped to zero;
    /// anything lower is a PSD violation. Positive eigenvalues below the
    /// solver's resolution are snapped to zero too: the square root is
    /// infinitely steep at the origin, and `√(1e−17)` dust would otherwise
    /// pollute the result at the `1e−9` scale.
    pub fn psd_sqrt(&self) -> Result<HermitianMatrix> {
        let eig = self.eig();
        let min = eig.min_value();
        if min < -PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        let snap = 1e-14 * eig.max_value().abs().max(1.0);
        Ok(eig.assemble(|l| if l <= snap { 0.0 } else { l.sqrt() }))
    }

    /// `H^{−1/2}` for strictly positive definite `H`.
    pub(crate) fn inv_psd_sqrt(&self) -> Result<HermitianMatrix> {
        let eig = self.eig();
        if eig.min_value() <= 1e-12 {
            return Err(Error::SingularEffectSum);
        }
        Ok(eig.assemble(|l| 1.0 / l.sqrt()))
    }
}

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn column(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.dim())
            .map(|r| self.vectors.get(r, k))
            .collect()
    }

    /// Eigenvector of the largest eigenvalue; on an exact tie the column with
    /// the lowest index in the ascending order wins, which keeps downstream
    /// samplers deterministic.
    pub fn max_eigenvector(&self) -> Vec<C64> {
        let d = self.values.len();
        let max = self.values[d - 1];
        let k = self.values.iter().position(|&l| l == max).unwrap_or(d - 1);
        self.column(k)
    }

    /// Reassembles `V f(Λ) V†`.
    fn assemble(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let d = self.values.len();
        let v = &self.vectors;
        let m = ComplexMatrix::from_fn(d, |r, c| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d {
                acc += v.get(r, k) * f(self.values[k]) * v.get(c, k).conj();
            }
            acc
        });
        HermitianMatrix::symmetrized(m)
    }
}

fn off_diag_mass(h: &ComplexMatrix) -> f64 {
    let d = h.dim();
    let mut acc = 0.0;
    for r in 0..d {
        for c in 0..d {
            if r != c {
                acc += h.get(r, c).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each (p, q) rotation is a complex Givens rotation
/// `R = [[c, −s·e^{iβ}], [s·e^{−iβ}, c]]` with `β = arg H[p][q]`, chosen to
/// zero the (p, q) entry of `R† H R`. Sweeps repeat until the off-diagonal
/// Frobenius mass drops below `1e−14`.
fn jacobi_eig(input: &ComplexMatrix) -> EigenDecomposition {
    let d = input.dim();
    // Work on the symmetrized copy: kills sub-tolerance asymmetry and makes
    // the diagonal exactly real.
    let mut h = input.add(&input.adjoint()).scale(0.5);
    let mut v = ComplexMatrix::identity(d);

    if d > 1 {
        for _sweep in 0..JACOBI_MAX_SWEEPS {
            if off_diag_mass(&h) < JACOBI_OFF_TOL {
                break;
            }
            for p in 0..d - 1 {
                for q in p + 1..d {
                    rotate(&mut h, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| h.get(a, a).re.total_cmp(&h.get(b, b).re));

    let values: Vec<f64> = order.iter().map(|&k| h.get(k, k).re).collect();
    let vectors = ComplexMatrix::from_fn(d, |r, c| v.get(r, order[c]));
    EigenDecomposition { values, vectors }
}

fn rotate(h: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = h.get(p, q);
    let babs = b.norm();
    if babs == 0.0 {
        return;
    }
    let phase = b / babs; // e^{iβ}
    let a = h.get(p, p).re;
    let c = h.get(q, q).re;
    let tau = (c - a) / (2.0 * babs);
    // Smaller root of t² − 2τt − 1 = 0 for this rotation convention.
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let d = h.dim();

    // H ← H·R
    for k in 0..d {
        let hkp = h.get(k, p);
        let hkq = h.get(k, q);
        h.set(k, p, cs * hkp + sn * phase.conj() * hkq);
        h.set(k, q, -sn * phase * hkp + cs * hkq);
    }
    // H ← R†·H
    for k in 0..d {
        let hpk = h.get(p, k);
        let hqk = h.get(q, k);
        h.set(p, k, cs * hpk + sn * phase * hqk);
        h.set(q, k, -sn * phase.conj() * hpk + cs * hqk);
    }
    // Pivot entries are zero by construction; pin them and keep the diagonal
    // exactly real.
    h.set(p, q, C64::new(0.0, 0.0));
    h.set(q, p, C64::new(0.0, 0.0));
    let hpp = h.get(p, p);
    let hqq = h.get(q, q);
    h.set(p, p, C64::new(hpp.re, 0.0));
    h.set(q, q, C64::new(hqq.re, 0.0));

    // V ← V·R
    for k in 0..d {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, cs * vkp + sn * phase.conj() * vkq);
        v.set(k, q, -sn * phase * vkp + cs * vkq);
    }
}
