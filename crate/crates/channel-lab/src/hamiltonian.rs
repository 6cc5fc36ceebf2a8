//! Doubled-space Hamiltonians associated with a channel.
//!
//! A channel `T` with Kraus operators `Aᵢ` carries three operators on the
//! tensor square of its base space:
//!
//! * the purity Hamiltonian `Ω(T) = Σᵢⱼ (Aᵢ†Aⱼ)† ⊗ (Aᵢ†Aⱼ)`, whose
//!   expectation on `|ψ⟩⊗|ψ⟩` is the output purity of `T` on `|ψ⟩`;
//! * the fidelity Hamiltonian `Ω₁(T) = Σᵢ Aᵢ ⊗ Aᵢ†` (generally
//!   non-Hermitian), whose expectation on `|ψ⟩⊗|ψ⟩` is the input-output
//!   fidelity;
//! * the Hermitian fidelity Hamiltonian `Ω′(T) = (I ⊗ T*)(S)`, which has the
//!   same expectations as `Ω₁` on symmetric states.
//!
//! `Ω` is also computable through the dual map as `T*⊗²(S)·S`; the two routes
//! are kept independent so they can cross-validate each other.

use num_complex::Complex64;

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::tensor::{
    hermitian_eigensystem, hermiticity_deviation, max_abs, swap_operator, tensor_product,
    ComplexMatrix, PureState, SubspaceBasis,
};

#[cfg(test)]
use crate::tensor::re;

/// Membership tolerance for the eigenvalue-one subspace of `Ω`.
///
/// Looser than the arithmetic tolerance because eigenvalues of
/// near-degenerate `Ω` cluster around 1.
pub const INVARIANT_EIGENVALUE_TOL: f64 = 1e-8;

/// Which doubled-space Hamiltonian a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianKind {
    /// `Ω(T)`: Hermitian, commutes with SWAP.
    Purity,
    /// `Ω₁(T)`: generally non-Hermitian.
    Fidelity,
    /// `Ω′(T)`: Hermitian, equal to `Ω₁` in expectation on symmetric states.
    FidelityHermitian,
}

impl HamiltonianKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            HamiltonianKind::Purity => "purity",
            HamiltonianKind::Fidelity => "fidelity",
            HamiltonianKind::FidelityHermitian => "fidelity-hermitian",
        }
    }

    pub fn is_hermitian(&self) -> bool {
        !matches!(self, HamiltonianKind::Fidelity)
    }
}

/// A `d² x d²` operator on the doubled space, tagged by its role.
#[derive(Debug, Clone)]
pub struct ChannelHamiltonian {
    kind: HamiltonianKind,
    matrix: ComplexMatrix,
    source_dim: usize,
}

impl ChannelHamiltonian {
    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Dimension `d` of the base space (the matrix acts on `d²` coordinates).
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// Expectation `⟨ψ⊗²| H |ψ⊗²⟩` on a symmetric product state.
    pub fn product_expectation(&self, psi: &PureState) -> Result<Complex64> {
        if psi.dim() != self.source_dim {
            return Err(Error::DimensionMismatch {
                expected: self.source_dim,
                got: psi.dim(),
            });
        }
        let doubled = psi.doubled();
        Ok(doubled.dotc(&(&self.matrix * &doubled)))
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.matrix
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .fold(0.0, |acc: f64, &s| acc.max(s))
    }

    /// Max-norm of `S H S - H` (zero for operators that commute with SWAP).
    pub fn swap_symmetry_deviation(&self) -> f64 {
        let s = swap_operator(self.source_dim).expect("source dimension is positive");
        max_abs(&(&s * &self.matrix * &s - &self.matrix))
    }

    /// Max-norm deviation from Hermitianity.
    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.matrix)
    }
}

/// The purity Hamiltonian `Ω(T) = Σᵢⱼ (Aᵢ†Aⱼ)† ⊗ (Aᵢ†Aⱼ)`.
pub fn purity_hamiltonian(t: &KrausChannel) -> ChannelHamiltonian {
    let d = t.dim();
    let mut omega = ComplexMatrix::zeros(d * d, d * d);
    for ai in t.kraus() {
        for aj in t.kraus() {
            let prod = ai.adjoint() * aj;
            omega += tensor_product(&prod.adjoint(), &prod);
        }
    }
    ChannelHamiltonian {
        kind: HamiltonianKind::Purity,
        matrix: omega,
        source_dim: d,
    }
}

/// The purity Hamiltonian through the dual route, `Ω(T) = T*⊗²(S)·S`.
///
/// Kept independent of [`purity_hamiltonian`] so the two can cross-validate.
pub fn purity_hamiltonian_dual(t: &KrausChannel) -> ChannelHamiltonian {
    let d = t.dim();
    let s = swap_operator(d).expect("channel dimension is positive");
    let mut dualized = ComplexMatrix::zeros(d * d, d * d);
    for ai in t.kraus() {
        for aj in t.kraus() {
            let factor = tensor_product(ai, aj);
            dualized += factor.adjoint() * &s * factor;
        }
    }
    ChannelHamiltonian {
        kind: HamiltonianKind::Purity,
        matrix: dualized * s,
        source_dim: d,
    }
}

/// The fidelity Hamiltonian `Ω₁(T) = Σᵢ Aᵢ ⊗ Aᵢ†`; generally non-Hermitian.
pub fn fidelity_hamiltonian(t: &KrausChannel) -> ChannelHamiltonian {
    let d = t.dim();
    let mut omega = ComplexMatrix::zeros(d * d, d * d);
    for a in t.kraus() {
        omega += tensor_product(a, &a.adjoint());
    }
    ChannelHamiltonian {
        kind: HamiltonianKind::Fidelity,
        matrix: omega,
        source_dim: d,
    }
}

/// The Hermitian fidelity Hamiltonian `Ω′(T) = (I ⊗ T*)(S)`.
pub fn fidelity_hamiltonian_hermitian(t: &KrausChannel) -> ChannelHamiltonian {
    let d = t.dim();
    let s = swap_operator(d).expect("channel dimension is positive");
    let id = ComplexMatrix::identity(d, d);
    let mut omega = ComplexMatrix::zeros(d * d, d * d);
    for a in t.kraus() {
        let factor = tensor_product(&id, a);
        omega += factor.adjoint() * &s * factor;
    }
    ChannelHamiltonian {
        kind: HamiltonianKind::FidelityHermitian,
        matrix: omega,
        source_dim: d,
    }
}

/// Spectrum of a Hermitian doubled-space Hamiltonian on the symmetric sector.
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    /// Eigenvalues of the symmetric-sector compression, ascending.
    pub eigenvalues: Vec<f64>,
    /// The least symmetric eigenvalue ω₀⁺.
    pub min_symmetric_eigenvalue: f64,
    /// Eigenvectors lifted back to doubled-space coordinates (columns).
    pub eigenvectors: ComplexMatrix,
}

/// Eigendecomposition restricted to the symmetric subspace of the full
/// doubled space (dimension `d(d+1)/2`).
pub fn symmetric_sector_spectrum(h: &ChannelHamiltonian) -> Result<SymmetricSpectrum> {
    symmetric_sector_spectrum_in(h, &SubspaceBasis::full_space(h.source_dim()))
}

/// Eigendecomposition of `h` compressed to the symmetric part of the doubled
/// subspace spanned by `c`.
pub fn symmetric_sector_spectrum_in(
    h: &ChannelHamiltonian,
    c: &SubspaceBasis,
) -> Result<SymmetricSpectrum> {
    if !h.kind().is_hermitian() {
        return Err(Error::HamiltonianKindMismatch {
            context: "symmetric sector spectrum",
            expected: "purity or fidelity-hermitian",
            got: h.kind().as_str(),
        });
    }
    if c.ambient_dim() != h.source_dim() {
        return Err(Error::DimensionMismatch {
            expected: h.source_dim(),
            got: c.ambient_dim(),
        });
    }
    let basis = c.symmetric_basis_matrix();
    let compressed = basis.adjoint() * h.matrix() * &basis;
    let eig = hermitian_eigensystem(&compressed)?;
    let eigenvectors = basis * &eig.eigenvectors;
    let min = eig.eigenvalues[0];
    Ok(SymmetricSpectrum {
        eigenvalues: eig.eigenvalues,
        min_symmetric_eigenvalue: min,
        eigenvectors,
    })
}

/// Orthonormal basis of the eigenvalue-one eigenspace of `Ω`.
#[derive(Debug, Clone)]
pub struct InvariantSubspace {
    /// Basis columns in doubled-space coordinates; may have zero columns.
    pub basis: ComplexMatrix,
    /// Eigenvalues are accepted as 1 when within this distance.
    pub eigenvalue_tolerance: f64,
}

impl InvariantSubspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Largest residual `‖Ω v - v‖` over the basis columns.
    pub fn max_residual(&self, h: &ChannelHamiltonian) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.basis.ncols() {
            let v = self.basis.column(j).into_owned();
            let residual = (h.matrix() * &v - &v).norm();
            worst = worst.max(residual);
        }
        worst
    }
}

/// Extracts the eigenvalue-one invariant subspace of a purity Hamiltonian.
pub fn invariant_subspace(h: &ChannelHamiltonian, tol: f64) -> Result<InvariantSubspace> {
    if h.kind() != HamiltonianKind::Purity {
        return Err(Error::HamiltonianKindMismatch {
            context: "invariant subspace",
            expected: "purity",
            got: h.kind().as_str(),
        });
    }
    let eig = hermitian_eigensystem(h.matrix())?;
    let selected: Vec<usize> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &lambda)| (lambda - 1.0).abs() <= tol)
        .map(|(i, _)| i)
        .collect();
    let n = h.matrix().nrows();
    let mut basis = ComplexMatrix::zeros(n, selected.len());
    for (dst, &src) in selected.iter().enumerate() {
        basis.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(InvariantSubspace {
        basis,
        eigenvalue_tolerance: tol,
    })
}
