//! Dense complex linear algebra on the base space and its doubled tensor square.
//!
//! Everything here operates on plain dense matrices at desk scale (base
//! dimension up to ~16, so up to 256x256 on the doubled space). The Kronecker
//! convention is fixed once for the whole crate: the FIRST factor indexes the
//! outer blocks, i.e. `(a ⊗ b)[(i*p + k, j*q + l)] = a[(i,j)] * b[(k,l)]`,
//! and the basis vector `|i⟩ ⊗ |k⟩` of the doubled space has index `i*d + k`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Dense complex matrix; the carrier for operators on the base and doubled spaces.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

/// Default tolerance for Hermiticity, orthonormality, and unit-norm checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Kraus operators with Frobenius norm below this are dropped at construction.
pub const ZERO_OPERATOR_NORM: f64 = 1e-14;

#[inline]
pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Largest entry magnitude (max norm).
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Max-norm deviation of `m` from its own adjoint.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

/// Max-norm deviation of `u` from unitarity (`u† u = I`).
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let id = ComplexMatrix::identity(u.ncols(), u.ncols());
    max_abs(&(u.adjoint() * u - id))
}

/// Kronecker product with the first factor indexing the outer blocks.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// SWAP operator on the doubled space: `S (|i⟩ ⊗ |j⟩) = |j⟩ ⊗ |i⟩`.
pub fn swap_operator(d: usize) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for m in 0..d {
        for l in 0..d {
            s[(m * d + l, l * d + m)] = re(1.0);
        }
    }
    Ok(s)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Real eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

/// Hermitian eigendecomposition with the default Hermiticity tolerance.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    hermitian_eigensystem_with_tol(m, DEFAULT_TOL)
}

/// Hermitian eigendecomposition, rejecting input whose asymmetry exceeds `tol`.
pub fn hermitian_eigensystem_with_tol(m: &ComplexMatrix, tol: f64) -> Result<Eigensystem> {
    let deviation = hermiticity_deviation(m);
    if !(deviation <= tol) {
        return Err(Error::NotHermitian { deviation, tol });
    }
    // Work on the exactly Hermitian average so roundoff in the input cannot
    // leak imaginary parts into the eigenvalues.
    let h = (m + m.adjoint()).scale(0.5);
    let se = SymmetricEigen::new(h);
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(Eigensystem {
        eigenvalues,
        eigenvectors,
    })
}

/// A pure state: unit-norm complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    /// Wraps an amplitude vector, requiring unit norm within the default tolerance.
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        Self::with_tol(amplitudes, DEFAULT_TOL)
    }

    /// Wraps an amplitude vector, requiring unit norm within `tol`.
    pub fn with_tol(amplitudes: ComplexVector, tol: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm, tol });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector into a state.
    pub fn normalized(v: ComplexVector) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::ZeroDimension);
        }
        let norm = v.norm();
        if norm < 1e-14 {
            return Err(Error::NotNormalized {
                norm,
                tol: DEFAULT_TOL,
            });
        }
        Ok(Self {
            amplitudes: v / re(norm),
        })
    }

    /// The computational basis state `|i⟩` in dimension `d`.
    pub fn basis_state(d: usize, i: usize) -> Self {
        assert!(i < d, "basis index {i} out of range for dimension {d}");
        let mut v = ComplexVector::zeros(d);
        v[i] = re(1.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// Density matrix `|ψ⟩⟨ψ|`.
    pub fn density_matrix(&self) -> ComplexMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// The doubled vector `|ψ⟩ ⊗ |ψ⟩` on the tensor-square space.
    pub fn doubled(&self) -> ComplexVector {
        self.amplitudes.kronecker(&self.amplitudes)
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass.
///
/// Preserves the span of the input while absorbing the rounding that
/// file-supplied bases carry; near linear dependence is rejected.
fn orthonormalize(ambient_dim: usize, vectors: &[ComplexVector]) -> Result<Vec<ComplexVector>> {
    let mut out: Vec<ComplexVector> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        if v.len() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                got: v.len(),
            });
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let overlap = b.dotc(&w);
                w -= b * overlap;
            }
        }
        let norm = w.norm();
        if norm <= 1e-10 * v.norm().max(1.0) {
            return Err(Error::LinearlyDependent { index });
        }
        out.push(w / re(norm));
    }
    Ok(out)
}

/// An orthonormal set of vectors spanning a subspace of the base space.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<PureState>,
}

impl SubspaceBasis {
    /// Builds a basis from spanning vectors, orthonormalizing them first.
    ///
    /// The span is preserved exactly; only near linear dependence and
    /// dimension mismatches are rejected.
    pub fn new(ambient_dim: usize, vectors: Vec<ComplexVector>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if vectors.is_empty() {
            return Err(Error::EmptyBasis);
        }
        if vectors.len() > ambient_dim {
            return Err(Error::LinearlyDependent {
                index: ambient_dim,
            });
        }
        let vectors = orthonormalize(ambient_dim, &vectors)?
            .into_iter()
            .map(|v| PureState { amplitudes: v })
            .collect();
        Ok(Self {
            ambient_dim,
            vectors,
        })
    }

    /// A basis of states already known to be orthonormal.
    pub fn from_states(ambient_dim: usize, states: Vec<PureState>) -> Result<Self> {
        let raw = states.into_iter().map(|s| s.amplitudes).collect();
        Self::new(ambient_dim, raw)
    }

    /// The full space, spanned by the computational basis.
    pub fn full_space(d: usize) -> Self {
        let vectors = (0..d).map(|i| PureState::basis_state(d, i)).collect();
        Self {
            ambient_dim: d,
            vectors,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Number of basis vectors (the subspace dimension).
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[PureState] {
        &self.vectors
    }

    /// Basis vectors as the columns of an `ambient_dim x dim` matrix.
    pub fn basis_matrix(&self) -> ComplexMatrix {
        let mut b = ComplexMatrix::zeros(self.ambient_dim, self.dim());
        for (j, v) in self.vectors.iter().enumerate() {
            b.set_column(j, v.amplitudes());
        }
        b
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> ComplexMatrix {
        let b = self.basis_matrix();
        &b * b.adjoint()
    }

    /// Largest deviation of pairwise inner products from the identity pattern.
    pub fn orthonormality_deviation(&self) -> f64 {
        let b = self.basis_matrix();
        let gram = b.adjoint() * &b;
        max_abs(&(gram - ComplexMatrix::identity(self.dim(), self.dim())))
    }

    /// Orthonormal basis of the symmetric part of the doubled subspace.
    ///
    /// Columns are `|b_i⟩⊗|b_i⟩` for each basis vector followed by
    /// `(|b_i⟩⊗|b_j⟩ + |b_j⟩⊗|b_i⟩)/√2` for `i < j`, giving a
    /// `d² x k(k+1)/2` matrix in the ambient doubled coordinates.
    pub fn symmetric_basis_matrix(&self) -> ComplexMatrix {
        let d = self.ambient_dim;
        let k = self.dim();
        let mut cols = ComplexMatrix::zeros(d * d, k * (k + 1) / 2);
        let mut next = 0;
        for i in 0..k {
            let v = self.vectors[i].amplitudes();
            cols.set_column(next, &v.kronecker(v));
            next += 1;
        }
        let inv_sqrt2 = re(1.0 / 2.0_f64.sqrt());
        for i in 0..k {
            for j in (i + 1)..k {
                let vi = self.vectors[i].amplitudes();
                let vj = self.vectors[j].amplitudes();
                let col = (vi.kronecker(vj) + vj.kronecker(vi)) * inv_sqrt2;
                cols.set_column(next, &col);
                next += 1;
            }
        }
        cols
    }
}

/// Normalized projector onto the symmetric part of the doubled subspace,
/// `Π⁺(C)`, with unit trace.
pub fn symmetric_projector(c: &SubspaceBasis) -> ComplexMatrix {
    let b = c.symmetric_basis_matrix();
    let k = c.dim();
    let sym_dim = (k * (k + 1) / 2) as f64;
    (&b * b.adjoint()).scale(1.0 / sym_dim)
}

fn standard_complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure state drawn from the given generator.
pub fn haar_state_with_rng<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    let v = ComplexVector::from_fn(d, |_, _| standard_complex_gaussian(rng));
    PureState::normalized(v).expect("Gaussian vector is nonzero with probability one")
}

/// Haar-distributed pure state; deterministic for a fixed seed.
pub fn haar_random_state(d: usize, rng_seed: u64) -> PureState {
    assert!(d >= 1, "dimension must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    haar_state_with_rng(d, &mut rng)
}

/// Haar-distributed unitary drawn from the given generator.
///
/// QR of a Ginibre matrix with the R diagonal phases folded back in, which
/// makes the distribution exactly Haar rather than QR-convention dependent.
pub fn haar_unitary_with_rng<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| standard_complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / re(rjj.norm())
        } else {
            re(1.0)
        };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// Haar-distributed unitary; deterministic for a fixed seed.
pub fn haar_random_unitary(d: usize, rng_seed: u64) -> ComplexMatrix {
    assert!(d >= 1, "dimension must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    haar_unitary_with_rng(d, &mut rng)
}

/// The four Pauli matrices `[I, σx, σy, σz]`.
pub fn pauli_matrices() -> [ComplexMatrix; 4] {
    let z = Complex64::new(0.0, 0.0);
    let one = re(1.0);
    let i = Complex64::new(0.0, 1.0);
    [
        ComplexMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        ComplexMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        ComplexMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        ComplexMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}
