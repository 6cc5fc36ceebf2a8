//! Extremization of the quartic form `⟨ψ⊗²|H|ψ⊗²⟩` over unit-norm states,
//! optionally constrained to a subspace.
//!
//! The search runs in the coefficient space of the subspace basis: `H` is
//! compressed to the doubled subspace coordinates once, and multistart
//! projected-gradient descent with backtracking line search runs on the unit
//! sphere of coefficients. A dense grid over the Bloch sphere serves as an
//! independent oracle for qubit-sized problems.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::ChannelHamiltonian;
use crate::tensor::{
    haar_state_with_rng, re, swap_operator, ComplexMatrix, ComplexVector, PureState,
    SubspaceBasis,
};

/// Multistart projected-gradient settings.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Initial line-search step; grows on accepted steps, shrinks on rejects.
    pub step_size: f64,
    /// Convergence threshold on the projected-gradient norm.
    pub gradient_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 2000,
            step_size: 0.25,
            gradient_tolerance: 1e-9,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::BadOptimizerConfig {
                detail: "restarts must be at least 1".into(),
            });
        }
        if !(self.gradient_tolerance > 0.0) {
            return Err(Error::BadOptimizerConfig {
                detail: "gradient_tolerance must be positive".into(),
            });
        }
        if !(self.step_size > 0.0) {
            return Err(Error::BadOptimizerConfig {
                detail: "step_size must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Outcome of one extremization run.
#[derive(Debug, Clone)]
pub struct OptimizationResult {
    /// The quartic form at `state` (not sign-flipped for maximization).
    pub value: f64,
    /// The optimizing state in ambient coordinates.
    pub state: PureState,
    pub converged: bool,
    pub iterations_used: usize,
    /// Attained value of every restart, in restart order.
    pub restart_values: Vec<f64>,
}

impl OptimizationResult {
    /// Whether the attained value flags a candidate decoherence-free direction.
    pub fn is_dfs_candidate(&self, tol: f64) -> bool {
        self.value >= 1.0 - tol
    }
}

/// Contraction of one tensor slot of `h` against `ψ`:
/// `M(ψ)ᵢⱼ = Σ_{kl} conj(ψ_k) H_{(i,k),(j,l)} ψ_l`, so that
/// `⟨ψ⊗²|H|ψ⊗²⟩ = ⟨ψ|M(ψ)|ψ⟩`.
pub fn effective_matrix(h: &ChannelHamiltonian, psi: &PureState) -> Result<ComplexMatrix> {
    if !h.kind().is_hermitian() {
        return Err(Error::HamiltonianKindMismatch {
            context: "effective matrix",
            expected: "purity or fidelity-hermitian",
            got: h.kind().as_str(),
        });
    }
    if psi.dim() != h.source_dim() {
        return Err(Error::DimensionMismatch {
            expected: h.source_dim(),
            got: psi.dim(),
        });
    }
    Ok(effective_matrix_raw(h.matrix(), psi.amplitudes()))
}

fn effective_matrix_raw(h: &ComplexMatrix, psi: &ComplexVector) -> ComplexMatrix {
    let k = psi.len();
    ComplexMatrix::from_fn(k, k, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..k {
            let row = i * k + a;
            let pa = psi[a].conj();
            for b in 0..k {
                acc += pa * h[(row, j * k + b)] * psi[b];
            }
        }
        acc
    })
}

fn quartic_form(h: &ComplexMatrix, x: &ComplexVector) -> f64 {
    let doubled = x.kronecker(x);
    doubled.dotc(&(h * &doubled)).re
}

struct RestartOutcome {
    coefficients: ComplexVector,
    value: f64,
    converged: bool,
    iterations: usize,
}

/// Projected-gradient descent of `sign * quartic(h, x)` from `x0`.
///
/// The trial step is the Barzilai-Borwein spectral length (plain backtracking
/// pins itself to the stability edge on these quartics and crawls), safeguarded
/// by a monotone Armijo line search with projection retraction.
fn descend(
    h: &ComplexMatrix,
    sign: f64,
    x0: ComplexVector,
    cfg: &OptimizerConfig,
) -> RestartOutcome {
    let mut x = x0;
    let mut fx = sign * quartic_form(h, &x);
    let mut step = cfg.step_size;
    let mut previous: Option<(ComplexVector, ComplexVector)> = None;
    let mut iterations = 0;
    let mut converged = false;
    for iter in 0..=cfg.max_iterations {
        iterations = iter;
        let m = effective_matrix_raw(h, &x);
        // Euclidean gradient of the quartic; the factor 4 accounts for both
        // tensor slots (validated against finite differences in tests).
        let grad = (&m * &x).scale(4.0 * sign);
        let radial = x.dotc(&grad).re;
        let tangent = &grad - &x * re(radial);
        if tangent.norm() <= cfg.gradient_tolerance {
            converged = true;
            break;
        }
        if iter == cfg.max_iterations {
            break;
        }
        // spectral step from the previous iterate/gradient pair
        if let Some((prev_x, prev_tangent)) = &previous {
            let displacement = &x - prev_x;
            let gradient_change = &tangent - prev_tangent;
            let sy = displacement.dotc(&gradient_change).re;
            if sy > 1e-18 {
                step = (displacement.norm_squared() / sy).clamp(1e-12, 1e3);
            }
        }
        previous = Some((x.clone(), tangent.clone()));
        // Armijo backtracking with projection retraction
        let slope = tangent.norm_squared();
        let mut eta = step;
        let mut accepted = false;
        while eta >= 1e-18 {
            let raw = &x - tangent.scale(eta);
            let norm = raw.norm();
            if norm > 1e-14 {
                let trial = raw / re(norm);
                let ft = sign * quartic_form(h, &trial);
                if ft <= fx - 1e-4 * eta * slope {
                    x = trial;
                    fx = ft;
                    accepted = true;
                    step = eta;
                    break;
                }
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    RestartOutcome {
        value: quartic_form(h, &x),
        coefficients: x,
        converged,
        iterations,
    }
}

fn optimize(
    h: &ChannelHamiltonian,
    c: &SubspaceBasis,
    cfg: &OptimizerConfig,
    sign: f64,
) -> Result<OptimizationResult> {
    cfg.check()?;
    if !h.kind().is_hermitian() {
        return Err(Error::HamiltonianKindMismatch {
            context: "product-state optimization",
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
    let k = c.dim();
    let b = c.basis_matrix();
    let doubled_basis = b.kronecker(&b);
    let mut compressed = doubled_basis.adjoint() * h.matrix() * &doubled_basis;
    // Slot-symmetrize: expectations on x⊗x are unchanged, and the gradient
    // formula assumes S H S = H (needed for the fidelity-hermitian kind).
    let s = swap_operator(k).expect("subspace dimension is positive");
    compressed = (&compressed + &s * &compressed * &s).scale(0.5);
    // Hermitian-average away compression roundoff.
    compressed = (&compressed + compressed.adjoint()).scale(0.5);

    let mut best: Option<RestartOutcome> = None;
    let mut restart_values = Vec::with_capacity(cfg.restarts);
    for restart in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(restart as u64);
        let x0 = haar_state_with_rng(k, &mut rng).amplitudes().clone();
        let outcome = descend(&compressed, sign, x0, cfg);
        restart_values.push(outcome.value);
        let better = match &best {
            None => true,
            // ties broken by earliest restart
            Some(current) => sign * outcome.value < sign * current.value,
        };
        if better {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one restart ran");
    let ambient = &b * &best.coefficients;
    let state = PureState::normalized(ambient)?;
    // Re-evaluate at the returned state so the reported value is exactly the
    // quartic form there.
    let value = h.product_expectation(&state)?.re;
    Ok(OptimizationResult {
        value,
        state,
        converged: best.converged,
        iterations_used: best.iterations,
        restart_values,
    })
}

/// Minimizes `⟨ψ⊗²|H|ψ⊗²⟩` over unit states of the subspace `c`.
pub fn minimize_product_expectation(
    h: &ChannelHamiltonian,
    c: &SubspaceBasis,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    optimize(h, c, cfg, 1.0)
}

/// Maximizes `⟨ψ⊗²|H|ψ⊗²⟩` over unit states of the subspace `c`.
pub fn maximize_product_expectation(
    h: &ChannelHamiltonian,
    c: &SubspaceBasis,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    optimize(h, c, cfg, -1.0)
}

/// Dense-grid extrema for qubit-sized problems.
#[derive(Debug, Clone)]
pub struct GridExtrema {
    pub min_value: f64,
    pub argmin: PureState,
    pub max_value: f64,
    pub argmax: PureState,
}

/// Evaluates the quartic form on a `resolution x 2*resolution` grid of the
/// Bloch sphere `ψ(θ,φ) = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` and returns the
/// grid extrema. Only defined for a 2-dimensional base space.
pub fn brute_force_grid(h: &ChannelHamiltonian, resolution: usize) -> Result<GridExtrema> {
    if h.source_dim() != 2 {
        return Err(Error::GridDimension {
            dim: h.source_dim(),
        });
    }
    if !h.kind().is_hermitian() {
        return Err(Error::HamiltonianKindMismatch {
            context: "grid oracle",
            expected: "purity or fidelity-hermitian",
            got: h.kind().as_str(),
        });
    }
    assert!(resolution >= 2, "grid needs at least two polar samples");
    let m = h.matrix();
    let mut min_value = f64::INFINITY;
    let mut max_value = f64::NEG_INFINITY;
    let mut argmin = ComplexVector::zeros(2);
    let mut argmax = ComplexVector::zeros(2);
    for i in 0..resolution {
        let theta = std::f64::consts::PI * i as f64 / (resolution - 1) as f64;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        for j in 0..2 * resolution {
            let phi = std::f64::consts::PI * j as f64 / resolution as f64;
            let psi = ComplexVector::from_vec(vec![re(c), Complex64::from_polar(s, phi)]);
            let value = quartic_form(m, &psi);
            if value < min_value {
                min_value = value;
                argmin = psi.clone();
            }
            if value > max_value {
                max_value = value;
                argmax = psi;
            }
        }
    }
    Ok(GridExtrema {
        min_value,
        argmin: PureState::normalized(argmin)?,
        max_value,
        argmax: PureState::normalized(argmax)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_named_channel, identity_channel, random_channel, NamedChannel};
    use crate::hamiltonian::{purity_hamiltonian, HamiltonianKind};
    use crate::tensor::{haar_random_state, max_abs};
    use approx::assert_relative_eq;

    fn pauli_omega(p: [f64; 4]) -> ChannelHamiltonian {
        purity_hamiltonian(&build_named_channel(&NamedChannel::Pauli { p }).unwrap())
    }

    #[test]
    fn effective_matrix_of_doubled_identity() {
        let h = purity_hamiltonian(&identity_channel(3));
        for seed in 0..3 {
            let psi = haar_random_state(3, seed);
            let m = effective_matrix(&h, &psi).unwrap();
            assert!(max_abs(&(m - ComplexMatrix::identity(3, 3))) <= 1e-12);
        }
    }

    #[test]
    fn effective_matrix_of_swap_is_the_state_projector() {
        // S contracts to |ψ⟩⟨ψ| because S_{(ik),(jl)} = δ_il δ_kj.
        let t = build_named_channel(&NamedChannel::PartialReplacement { dim: 3, p: 1.0 })
            .unwrap();
        let h = purity_hamiltonian(&t); // equals SWAP for full replacement
        let psi = haar_random_state(3, 4);
        let m = effective_matrix(&h, &psi).unwrap();
        assert!(max_abs(&(m - psi.density_matrix())) <= 1e-12);
    }

    #[test]
    fn effective_matrix_reproduces_quartic_form_and_is_hermitian() {
        for seed in 0..5 {
            let t = random_channel(3, 3, 150 + seed);
            let h = purity_hamiltonian(&t);
            let psi = haar_random_state(3, 250 + seed);
            let m = effective_matrix(&h, &psi).unwrap();
            assert!(crate::tensor::hermiticity_deviation(&m) <= 1e-10);
            let via_m = psi.amplitudes().dotc(&(&m * psi.amplitudes())).re;
            let direct = h.product_expectation(&psi).unwrap().re;
            assert_relative_eq!(via_m, direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn effective_matrix_at_bit_flip_plus_state() {
        let h = pauli_omega([0.5, 0.5, 0.0, 0.0]);
        let s = 1.0 / 2.0_f64.sqrt();
        let psi = PureState::new(ComplexVector::from_vec(vec![re(s), re(s)])).unwrap();
        let m = effective_matrix(&h, &psi).unwrap();
        let value = psi.amplitudes().dotc(&(&m * psi.amplitudes())).re;
        assert_relative_eq!(value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(999);
        for seed in 0..20 {
            let d = 2 + (seed % 3) as usize;
            let t = random_channel(d, 3, 500 + seed);
            let h = purity_hamiltonian(&t);
            let psi = haar_random_state(d, 600 + seed);
            let x = psi.amplitudes().clone();
            let m = effective_matrix(&h, &psi).unwrap();
            let grad = (&m * &x).scale(4.0);
            let radial = x.dotc(&grad).re;
            let tangent_grad = &grad - &x * re(radial);
            for _ in 0..10 {
                // random tangent direction
                let raw = ComplexVector::from_fn(d, |_, _| {
                    Complex64::new(
                        rand::Rng::sample(&mut rng, rand_distr::StandardNormal),
                        rand::Rng::sample(&mut rng, rand_distr::StandardNormal),
                    )
                });
                let mut v = raw.clone();
                let overlap = x.dotc(&v).re;
                v -= &x * re(overlap);
                if v.norm() < 1e-8 {
                    continue;
                }
                v /= re(v.norm());
                let eps = 1e-5;
                let eval = |vec: ComplexVector| {
                    let n = vec.norm();
                    quartic_form(h.matrix(), &(vec / re(n)))
                };
                let fd = (eval(&x + v.scale(eps)) - eval(&x - v.scale(eps))) / (2.0 * eps);
                let analytic = {
                    let mut dot = 0.0;
                    for i in 0..d {
                        dot += (tangent_grad[i].conj() * v[i]).re;
                    }
                    dot
                };
                let scale = fd.abs().max(analytic.abs()).max(1.0);
                assert!(
                    (fd - analytic).abs() / scale <= 1e-6,
                    "fd {fd} vs analytic {analytic}"
                );
            }
        }
    }

    #[test]
    fn constant_objective_converges_immediately() {
        let t = build_named_channel(&NamedChannel::Depolarizing { p0: 0.25 }).unwrap();
        let h = purity_hamiltonian(&t);
        let c = SubspaceBasis::full_space(2);
        let result =
            minimize_product_expectation(&h, &c, &OptimizerConfig::with_seed(1)).unwrap();
        assert!(result.converged);
        assert_eq!(result.iterations_used, 0);
        assert_relative_eq!(result.value, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn identity_channel_constant_value_one() {
        let h = purity_hamiltonian(&identity_channel(3));
        let c = SubspaceBasis::full_space(3);
        let result =
            minimize_product_expectation(&h, &c, &OptimizerConfig::with_seed(2)).unwrap();
        assert_relative_eq!(result.value, 1.0, epsilon = 1e-9);
        assert!(result.converged);
    }

    #[test]
    fn maximization_finds_the_bit_flip_dfs_states() {
        let h = pauli_omega([0.5, 0.5, 0.0, 0.0]);
        let c = SubspaceBasis::full_space(2);
        let result =
            maximize_product_expectation(&h, &c, &OptimizerConfig::with_seed(3)).unwrap();
        assert_relative_eq!(result.value, 1.0, epsilon = 1e-8);
        assert!(result.is_dfs_candidate(1e-6));
        // argmax is |+⟩ or |−⟩ up to phase
        let amp = result.state.amplitudes();
        let overlap_plus = (amp[0] + amp[1]).norm() / 2.0_f64.sqrt();
        let overlap_minus = (amp[0] - amp[1]).norm() / 2.0_f64.sqrt();
        assert!(overlap_plus > 1.0 - 1e-6 || overlap_minus > 1.0 - 1e-6);
    }

    #[test]
    fn correlated_channel_reaches_the_paper_minimum() {
        let p = [0.25, 0.25, 0.25, 0.25];
        let t = build_named_channel(&NamedChannel::CorrelatedPauli2 { p }).unwrap();
        let h = purity_hamiltonian(&t);
        let c = SubspaceBasis::full_space(4);
        let result =
            minimize_product_expectation(&h, &c, &OptimizerConfig::with_seed(4)).unwrap();
        assert_relative_eq!(result.value, 0.25, epsilon = 1e-6);
    }

    #[test]
    fn optimizer_matches_grid_oracle_on_random_qubit_channels() {
        for seed in 0..20 {
            let t = random_channel(2, 3, 700 + seed);
            let h = purity_hamiltonian(&t);
            let c = SubspaceBasis::full_space(2);
            let cfg = OptimizerConfig {
                restarts: 16,
                seed,
                ..OptimizerConfig::default()
            };
            let min = minimize_product_expectation(&h, &c, &cfg).unwrap();
            let max = maximize_product_expectation(&h, &c, &cfg).unwrap();
            let grid = brute_force_grid(&h, 200).unwrap();
            assert!(
                (min.value - grid.min_value).abs() <= 1e-3,
                "seed {seed}: min {} vs grid {}",
                min.value,
                grid.min_value
            );
            assert!(
                (max.value - grid.max_value).abs() <= 1e-3,
                "seed {seed}: max {} vs grid {}",
                max.value,
                grid.max_value
            );
            // the optimizer refines the grid, so it may only undershoot/overshoot
            assert!(min.value <= grid.min_value + 1e-9);
            assert!(max.value >= grid.max_value - 1e-9);
        }
    }

    #[test]
    fn grid_on_constant_objectives() {
        let identity = purity_hamiltonian(&identity_channel(2));
        let grid = brute_force_grid(&identity, 50).unwrap();
        assert_relative_eq!(grid.min_value, 1.0, epsilon = 1e-12);
        assert_relative_eq!(grid.max_value, 1.0, epsilon = 1e-12);

        let t = build_named_channel(&NamedChannel::Depolarizing { p0: 0.25 }).unwrap();
        let grid = brute_force_grid(&purity_hamiltonian(&t), 100).unwrap();
        assert_relative_eq!(grid.min_value, 0.5, epsilon = 1e-9);
        assert_relative_eq!(grid.max_value, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn grid_rejects_non_qubit_dimensions() {
        let h = purity_hamiltonian(&identity_channel(3));
        assert!(matches!(
            brute_force_grid(&h, 10),
            Err(Error::GridDimension { dim: 3 })
        ));
    }

    #[test]
    fn global_phase_invariance_of_the_objective() {
        let t = random_channel(3, 3, 41);
        let h = purity_hamiltonian(&t);
        let psi = haar_random_state(3, 42);
        let base = h.product_expectation(&psi).unwrap().re;
        for k in 0..8 {
            let phase = Complex64::from_polar(1.0, 0.25 * k as f64);
            let rotated = PureState::normalized(psi.amplitudes() * phase).unwrap();
            let value = h.product_expectation(&rotated).unwrap().re;
            assert_relative_eq!(value, base, epsilon = 1e-12);
        }
    }

    #[test]
    fn value_is_consistent_with_returned_state() {
        for seed in 0..5 {
            let t = random_channel(3, 3, 800 + seed);
            let h = purity_hamiltonian(&t);
            let c = SubspaceBasis::full_space(3);
            let result =
                minimize_product_expectation(&h, &c, &OptimizerConfig::with_seed(seed))
                    .unwrap();
            let recomputed = h.product_expectation(&result.state).unwrap().re;
            assert!((result.value - recomputed).abs() <= 1e-12);
            assert!(result.value >= -1.0 - 1e-9 && result.value <= 1.0 + 1e-9);
            assert!(result.value > 0.0); // valid channels keep purity positive
            assert_eq!(result.restart_values.len(), 32);
        }
    }

    #[test]
    fn optimizer_deterministic_per_seed() {
        let t = random_channel(2, 4, 901);
        let h = purity_hamiltonian(&t);
        let c = SubspaceBasis::full_space(2);
        let a = minimize_product_expectation(&h, &c, &OptimizerConfig::with_seed(7)).unwrap();
        let b = minimize_product_expectation(&h, &c, &OptimizerConfig::with_seed(7)).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.state.amplitudes(), b.state.amplitudes());
        assert_eq!(a.restart_values, b.restart_values);
    }

    #[test]
    fn rejects_non_hermitian_kind_and_bad_config() {
        let t = identity_channel(2);
        let omega1 = crate::hamiltonian::fidelity_hamiltonian(&t);
        assert_eq!(omega1.kind(), HamiltonianKind::Fidelity);
        let c = SubspaceBasis::full_space(2);
        assert!(matches!(
            minimize_product_expectation(&omega1, &c, &OptimizerConfig::default()),
            Err(Error::HamiltonianKindMismatch { .. })
        ));
        let h = purity_hamiltonian(&t);
        let bad = OptimizerConfig {
            restarts: 0,
            ..OptimizerConfig::default()
        };
        assert!(matches!(
            minimize_product_expectation(&h, &c, &bad),
            Err(Error::BadOptimizerConfig { .. })
        ));
    }

    #[test]
    fn subspace_constrained_optimization() {
        // constrain the bit-flip channel to span{|0⟩, |1⟩} rotated into the
        // |+⟩/|−⟩ basis; the minimum over the 1-dim span{|+⟩} must be 1
        let h = pauli_omega([0.5, 0.5, 0.0, 0.0]);
        let s = 1.0 / 2.0_f64.sqrt();
        let plus = ComplexVector::from_vec(vec![re(s), re(s)]);
        let c = SubspaceBasis::new(2, vec![plus]).unwrap();
        let result =
            minimize_product_expectation(&h, &c, &OptimizerConfig::with_seed(5)).unwrap();
        assert_relative_eq!(result.value, 1.0, epsilon = 1e-10);
    }
}
