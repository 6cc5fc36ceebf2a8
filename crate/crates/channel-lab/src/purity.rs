//! Pointwise purity and fidelity, spectral bounds, decoherence-free-subspace
//! verification, Haar averages, and the code-matrix purity identity.
//!
//! Pointwise quantities are always computed by two independent routes (the
//! direct channel action and the doubled-space Hamiltonian expectation) and
//! must agree to `1e-10`; any disagreement is surfaced as an error rather
//! than silently picking one side.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::hamiltonian::{
    fidelity_hamiltonian, invariant_subspace, purity_hamiltonian, symmetric_sector_spectrum,
    symmetric_sector_spectrum_in, INVARIANT_EIGENVALUE_TOL,
};
use crate::optimizer::{minimize_product_expectation, OptimizerConfig};
use crate::tensor::{
    haar_state_with_rng, swap_operator, symmetric_projector, tensor_product, ComplexMatrix,
    PureState, SubspaceBasis, DEFAULT_TOL,
};

/// Two independent evaluation routes must agree to this tolerance.
pub const CROSS_ROUTE_TOL: f64 = 1e-10;

fn check_state_dim(t: &KrausChannel, psi: &PureState) -> Result<()> {
    if psi.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: psi.dim(),
        });
    }
    Ok(())
}

fn check_subspace_dim(t: &KrausChannel, c: &SubspaceBasis) -> Result<()> {
    if c.ambient_dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: c.ambient_dim(),
        });
    }
    Ok(())
}

/// Output purity by direct channel action only: `Tr[T(|ψ⟩⟨ψ|)²]`.
fn output_purity_direct(t: &KrausChannel, psi: &PureState) -> Result<f64> {
    let out = t.apply(&psi.density_matrix())?;
    Ok((&out * &out).trace().re)
}

/// Fidelity by direct channel action only: `⟨ψ|T(|ψ⟩⟨ψ|)|ψ⟩`.
fn fidelity_direct(t: &KrausChannel, psi: &PureState) -> Result<f64> {
    let out = t.apply(&psi.density_matrix())?;
    Ok(psi.amplitudes().dotc(&(&out * psi.amplitudes())).re)
}

/// Output purity `Tr[T(|ψ⟩⟨ψ|)²]`, cross-checked against the Hamiltonian
/// route `⟨ψ⊗²|Ω(T)|ψ⊗²⟩`. The direct value is returned.
pub fn output_purity(t: &KrausChannel, psi: &PureState) -> Result<f64> {
    check_state_dim(t, psi)?;
    let direct = output_purity_direct(t, psi)?;
    let omega = purity_hamiltonian(t);
    let via_omega = omega.product_expectation(psi)?.re;
    let deviation = (direct - via_omega).abs();
    if deviation > CROSS_ROUTE_TOL {
        return Err(Error::RouteDisagreement {
            what: "output purity",
            deviation,
            tol: CROSS_ROUTE_TOL,
        });
    }
    Ok(direct)
}

/// Pure-state fidelity `⟨ψ|T(|ψ⟩⟨ψ|)|ψ⟩`, cross-checked against
/// `⟨ψ⊗²|Ω₁(T)|ψ⊗²⟩` (whose imaginary residue must vanish on symmetric
/// product states). The direct value is returned.
pub fn pure_state_fidelity(t: &KrausChannel, psi: &PureState) -> Result<f64> {
    check_state_dim(t, psi)?;
    let direct = fidelity_direct(t, psi)?;
    let omega1 = fidelity_hamiltonian(t);
    let expectation = omega1.product_expectation(psi)?;
    if expectation.im.abs() > CROSS_ROUTE_TOL {
        return Err(Error::RouteDisagreement {
            what: "fidelity imaginary residue",
            deviation: expectation.im.abs(),
            tol: CROSS_ROUTE_TOL,
        });
    }
    let deviation = (direct - expectation.re).abs();
    if deviation > CROSS_ROUTE_TOL {
        return Err(Error::RouteDisagreement {
            what: "pure state fidelity",
            deviation,
            tol: CROSS_ROUTE_TOL,
        });
    }
    Ok(direct)
}

/// Spectral bounds on the channel purity over a subspace.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PurityBounds {
    /// `Tr[Π⁺(C) Ω(T)]`, an upper bound on the purity over `C`.
    pub upper: f64,
    /// Least eigenvalue of `Ω` on the symmetric sector of the full space.
    pub lower_global: f64,
    /// Least eigenvalue of `Ω` compressed to the symmetric part of the
    /// doubled subspace; at least as tight as the global bound.
    pub lower_subspace: f64,
}

/// Upper and lower bounds sandwiching `P(T, C)`.
pub fn purity_bounds(t: &KrausChannel, c: &SubspaceBasis) -> Result<PurityBounds> {
    check_subspace_dim(t, c)?;
    let omega = purity_hamiltonian(t);
    let upper = (symmetric_projector(c) * omega.matrix()).trace().re;
    let lower_global = symmetric_sector_spectrum(&omega)?.min_symmetric_eigenvalue;
    let lower_subspace = symmetric_sector_spectrum_in(&omega, c)?.min_symmetric_eigenvalue;
    Ok(PurityBounds {
        upper,
        lower_global,
        lower_subspace,
    })
}

/// Evidence behind a decoherence-free-subspace verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DfsCertificate {
    /// Exact criterion for unital channels: every basis vector of the
    /// symmetric doubled subspace must be fixed by `Ω`.
    Unital {
        max_eigen_residual: f64,
        checked_vectors: usize,
    },
    /// Sampled certificate for non-unital channels: per-state purities on a
    /// basis plus random superpositions, and the optimizer minimum over the
    /// subspace.
    NonUnital {
        min_sampled_purity: f64,
        optimizer_min: f64,
        sampled_states: usize,
    },
}

/// Verdict plus evidence for the DFS property of a subspace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DfsReport {
    pub is_dfs: bool,
    pub tol: f64,
    pub certificate: DfsCertificate,
}

/// Decides whether `c` is decoherence-free for `t`.
///
/// Unital channels get the exact eigenvector criterion; non-unital channels
/// fall back to sampled purity certificates plus the optimizer minimum, which
/// is sound but sampled.
pub fn dfs_check(t: &KrausChannel, c: &SubspaceBasis, tol: f64, seed: u64) -> Result<DfsReport> {
    check_subspace_dim(t, c)?;
    let (unital, _) = t.is_unital(DEFAULT_TOL);
    let omega = purity_hamiltonian(t);
    if unital {
        let basis = c.symmetric_basis_matrix();
        let mut max_residual: f64 = 0.0;
        for j in 0..basis.ncols() {
            let v = basis.column(j).into_owned();
            let residual = (omega.matrix() * &v - &v).norm();
            max_residual = max_residual.max(residual);
        }
        Ok(DfsReport {
            is_dfs: max_residual <= tol,
            tol,
            certificate: DfsCertificate::Unital {
                max_eigen_residual: max_residual,
                checked_vectors: basis.ncols(),
            },
        })
    } else {
        let mut min_purity = f64::INFINITY;
        let mut sampled = 0;
        for v in c.vectors() {
            min_purity = min_purity.min(output_purity(t, v)?);
            sampled += 1;
        }
        let b = c.basis_matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let coeff = haar_state_with_rng(c.dim(), &mut rng);
            let psi = PureState::normalized(&b * coeff.amplitudes())?;
            min_purity = min_purity.min(output_purity(t, &psi)?);
            sampled += 1;
        }
        let result =
            minimize_product_expectation(&omega, c, &OptimizerConfig::with_seed(seed))?;
        Ok(DfsReport {
            is_dfs: min_purity >= 1.0 - tol && result.value >= 1.0 - tol,
            tol,
            certificate: DfsCertificate::NonUnital {
                min_sampled_purity: min_purity,
                optimizer_min: result.value,
                sampled_states: sampled,
            },
        })
    }
}

/// Haar-average output purity, `Tr[S·T⊗²(I) + Ω(T)] / d(d+1)`.
pub fn average_purity(t: &KrausChannel) -> f64 {
    let d = t.dim();
    let s = swap_operator(d).expect("channel dimension is positive");
    let t_of_identity = t
        .apply(&ComplexMatrix::identity(d, d))
        .expect("identity matches the channel dimension");
    let first = (&s * tensor_product(&t_of_identity, &t_of_identity)).trace();
    let second = purity_hamiltonian(t).matrix().trace();
    (first + second).re / (d as f64 * (d as f64 + 1.0))
}

/// Haar-average pure-state fidelity, `Tr[Ω₁(T) + S·(I ⊗ T(I))] / d(d+1)`.
pub fn average_fidelity(t: &KrausChannel) -> f64 {
    let d = t.dim();
    let s = swap_operator(d).expect("channel dimension is positive");
    let t_of_identity = t
        .apply(&ComplexMatrix::identity(d, d))
        .expect("identity matches the channel dimension");
    let first = fidelity_hamiltonian(t).matrix().trace();
    let second = (&s * tensor_product(&ComplexMatrix::identity(d, d), &t_of_identity)).trace();
    (first + second).re / (d as f64 * (d as f64 + 1.0))
}

/// Which pointwise quantity a Monte-Carlo run averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageQuantity {
    Purity,
    Fidelity,
}

/// Sample mean and standard error of a Monte-Carlo average.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Monte-Carlo Haar average of the pointwise purity or fidelity.
///
/// Deterministic per seed: states are drawn sequentially from one seeded
/// stream, and the pointwise quantity uses the direct channel action.
pub fn monte_carlo_average(
    t: &KrausChannel,
    quantity: AverageQuantity,
    n: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if n < 2 {
        return Err(Error::TooFewSamples { got: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..n {
        let psi = haar_state_with_rng(t.dim(), &mut rng);
        let x = match quantity {
            AverageQuantity::Purity => output_purity_direct(t, &psi)?,
            AverageQuantity::Fidelity => fidelity_direct(t, &psi)?,
        };
        // Welford update
        let delta = x - mean;
        mean += delta / (i as f64 + 1.0);
        m2 += delta * (x - mean);
    }
    let variance = m2 / (n as f64 - 1.0);
    Ok(MonteCarloEstimate {
        estimate: mean,
        stderr: (variance.max(0.0) / n as f64).sqrt(),
        samples: n,
    })
}

/// The Hermitian matrix of the error-correction condition
/// `⟨ψ_α|Aᵢ†Aⱼ|ψ_β⟩ = cᵢⱼ δ_αβ`, with the worst deviation from that pattern.
#[derive(Debug, Clone)]
pub struct CodeMatrix {
    /// `k x k` matrix `c`, computed from the first codeword.
    pub matrix: ComplexMatrix,
    /// Largest deviation of `⟨ψ_α|Aᵢ†Aⱼ|ψ_β⟩` from `cᵢⱼ δ_αβ` over all
    /// codeword pairs, including off-diagonal leakage.
    pub kl_residual: f64,
}

/// Result of checking a code subspace against the error-correction condition.
#[derive(Debug, Clone)]
pub struct QeccReport {
    pub code_matrix: CodeMatrix,
    /// Whether the error-correction condition holds within `tol`.
    pub condition_holds: bool,
    pub tol: f64,
    /// `Tr(c²)`, reported only when the condition holds.
    pub purity: Option<f64>,
    /// Direct output purity of every codeword, for cross-checking.
    pub codeword_purities: Vec<f64>,
}

/// Computes the code matrix of `code` under `t` and, when the
/// error-correction condition holds, the purity identity `P(T,C) = Tr(c²)`.
///
/// The identity is asserted against the direct per-codeword purity to `1e-9`;
/// a violated condition is reported, not asserted.
pub fn qecc_code_matrix(t: &KrausChannel, code: &SubspaceBasis, tol: f64) -> Result<QeccReport> {
    check_subspace_dim(t, code)?;
    let k = t.kraus().len();
    let codewords = code.vectors();
    // pairwise blocks ⟨ψ_α| Aᵢ†Aⱼ |ψ_β⟩
    let block = |alpha: usize, beta: usize| -> ComplexMatrix {
        ComplexMatrix::from_fn(k, k, |i, j| {
            let data = t.kraus()[i].adjoint() * &t.kraus()[j] * codewords[beta].amplitudes();
            codewords[alpha].amplitudes().dotc(&data)
        })
    };
    let c = block(0, 0);
    let mut kl_residual: f64 = 0.0;
    for alpha in 0..codewords.len() {
        for beta in 0..codewords.len() {
            let observed = block(alpha, beta);
            let target = if alpha == beta {
                c.clone()
            } else {
                ComplexMatrix::zeros(k, k)
            };
            kl_residual = kl_residual.max(crate::tensor::max_abs(&(observed - target)));
        }
    }
    let condition_holds = kl_residual <= tol;
    let mut codeword_purities = Vec::with_capacity(codewords.len());
    for word in codewords {
        codeword_purities.push(output_purity(t, word)?);
    }
    let purity = if condition_holds {
        let trace_c_squared = (&c * &c).trace().re;
        for (index, &p) in codeword_purities.iter().enumerate() {
            let deviation = (p - trace_c_squared).abs();
            if deviation > 1e-9 {
                return Err(Error::RouteDisagreement {
                    what: "code-matrix purity identity",
                    deviation,
                    tol: 1e-9,
                });
            }
            let _ = index;
        }
        Some(trace_c_squared)
    } else {
        None
    };
    Ok(QeccReport {
        code_matrix: CodeMatrix {
            matrix: c,
            kl_residual,
        },
        condition_holds,
        tol,
        purity,
        codeword_purities,
    })
}

/// Per-state purity and fidelity entry of a [`PurityReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateEntry {
    /// Amplitudes as `[re, im]` pairs.
    pub state: Vec<[f64; 2]>,
    pub output_purity: f64,
    pub fidelity: f64,
}

/// Summary of the eigenvalue-one subspace of `Ω`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DfsBasisSummary {
    pub dimension: usize,
    pub eigenvalue_tolerance: f64,
}

/// Purity and fidelity survey of a channel over a subspace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PurityReport {
    pub channel: String,
    /// One entry per basis vector of the analyzed subspace.
    pub states: Vec<StateEntry>,
    pub bounds: PurityBounds,
    pub average_purity: f64,
    pub average_fidelity: f64,
    /// Present when the eigenvalue-one subspace of `Ω` is nonempty.
    pub dfs_basis: Option<DfsBasisSummary>,
}

fn state_to_pairs(psi: &PureState) -> Vec<[f64; 2]> {
    psi.amplitudes().iter().map(|c| [c.re, c.im]).collect()
}

/// Assembles the per-state, bounds, and average survey for a subspace.
pub fn purity_report(t: &KrausChannel, c: &SubspaceBasis) -> Result<PurityReport> {
    check_subspace_dim(t, c)?;
    let mut states = Vec::with_capacity(c.dim());
    for v in c.vectors() {
        states.push(StateEntry {
            state: state_to_pairs(v),
            output_purity: output_purity(t, v)?,
            fidelity: pure_state_fidelity(t, v)?,
        });
    }
    let bounds = purity_bounds(t, c)?;
    let omega = purity_hamiltonian(t);
    let inv = invariant_subspace(&omega, INVARIANT_EIGENVALUE_TOL)?;
    let dfs_basis = (inv.dim() > 0).then_some(DfsBasisSummary {
        dimension: inv.dim(),
        eigenvalue_tolerance: inv.eigenvalue_tolerance,
    });
    Ok(PurityReport {
        channel: t.label().to_string(),
        states,
        bounds,
        average_purity: average_purity(t),
        average_fidelity: average_fidelity(t),
        dfs_basis,
    })
}
