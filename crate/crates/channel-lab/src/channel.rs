//! Kraus-form quantum channels: validation, application, the dual map,
//! Kraus-representation mixing, and the builtin channel families.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{
    hermitian_eigensystem, max_abs, pauli_matrices, re, tensor_product, unitarity_deviation,
    ComplexMatrix, DEFAULT_TOL, ZERO_OPERATOR_NORM,
};

/// Largest tolerated drift of a probability vector's sum from 1 before the
/// input is rejected instead of renormalized.
pub const PROBABILITY_SUM_TOL: f64 = 1e-9;

/// A completely positive trace-preserving map in Kraus form.
///
/// Construction checks shapes only; trace preservation is checked by
/// [`KrausChannel::validate`], so deliberately broken channels can be built
/// and reported on.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    label: String,
}

/// Outcome of the trace-preservation check `Σ Aᵢ†Aᵢ = I`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub dim: usize,
    pub kraus_count: usize,
    /// Max-norm deviation of `Σ Aᵢ†Aᵢ` from the identity.
    pub max_deviation: f64,
    pub tol: f64,
    pub passes: bool,
}

impl KrausChannel {
    /// Wraps a Kraus operator list. Operators with Frobenius norm below
    /// [`ZERO_OPERATOR_NORM`] are dropped.
    pub fn new(
        dim: usize,
        kraus: Vec<ComplexMatrix>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        for (index, a) in kraus.iter().enumerate() {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(Error::KrausShape {
                    index,
                    rows: a.nrows(),
                    cols: a.ncols(),
                    dim,
                });
            }
        }
        let kraus: Vec<ComplexMatrix> = kraus
            .into_iter()
            .filter(|a| a.norm() > ZERO_OPERATOR_NORM)
            .collect();
        if kraus.is_empty() {
            return Err(Error::EmptyKraus);
        }
        Ok(Self {
            dim,
            kraus,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Checks `Σ Aᵢ†Aᵢ = I` and reports the max deviation.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            sum += a.adjoint() * a;
        }
        let max_deviation = max_abs(&(sum - ComplexMatrix::identity(self.dim, self.dim)));
        ValidationReport {
            dim: self.dim,
            kraus_count: self.kraus.len(),
            max_deviation,
            tol,
            passes: max_deviation <= tol,
        }
    }

    /// Applies the channel: `T(ρ) = Σ Aᵢ ρ Aᵢ†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_square(rho)?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            out += a * rho * a.adjoint();
        }
        Ok(out)
    }

    /// Applies the trace-pairing dual: `T*(X) = Σ Aᵢ† X Aᵢ`.
    pub fn apply_dual(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_square(x)?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            out += a.adjoint() * x * a;
        }
        Ok(out)
    }

    /// The dual map as a value of its own.
    pub fn dual(&self) -> DualMap {
        DualMap {
            dim: self.dim,
            kraus: self.kraus.clone(),
        }
    }

    /// Whether `T(I) = I`, together with the max deviation of `Σ AᵢAᵢ†` from I.
    pub fn is_unital(&self, tol: f64) -> (bool, f64) {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            sum += a * a.adjoint();
        }
        let deviation = max_abs(&(sum - ComplexMatrix::identity(self.dim, self.dim)));
        (deviation <= tol, deviation)
    }

    /// Re-mixes the Kraus list by a unitary: `A'ᵢ = Σⱼ uᵢⱼ Aⱼ`.
    ///
    /// The resulting channel acts identically as a map.
    pub fn mix_kraus(&self, u: &ComplexMatrix) -> Result<KrausChannel> {
        let k = self.kraus.len();
        if u.nrows() != k || u.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: u.nrows(),
            });
        }
        let deviation = unitarity_deviation(u);
        if deviation > DEFAULT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let mixed: Vec<ComplexMatrix> = (0..k)
            .map(|i| {
                let mut a = ComplexMatrix::zeros(self.dim, self.dim);
                for (j, original) in self.kraus.iter().enumerate() {
                    a += original.scale(1.0) * u[(i, j)];
                }
                a
            })
            .collect();
        KrausChannel::new(self.dim, mixed, self.label.clone())
    }

    fn check_square(&self, m: &ComplexMatrix) -> Result<()> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: m.nrows().max(m.ncols()),
            });
        }
        Ok(())
    }
}

/// The dual `T*` of a CP map, sharing the Kraus list of the original.
#[derive(Debug, Clone)]
pub struct DualMap {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl DualMap {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `T*(X) = Σ Aᵢ† X Aᵢ`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.nrows().max(x.ncols()),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            out += a.adjoint() * x * a;
        }
        Ok(out)
    }
}

/// Descriptor for the builtin channel families.
#[derive(Debug, Clone)]
pub enum NamedChannel {
    /// Single-qubit Pauli channel `ρ → Σ pᵢ σᵢ ρ σᵢ`.
    Pauli { p: [f64; 4] },
    /// Isotropic single-qubit channel: Pauli with `pᵢ = (1-p₀)/3`.
    Depolarizing { p0: f64 },
    /// Correlated two-qubit channel `ρ → Σ p_α (σ_α⊗σ_α) ρ (σ_α⊗σ_α)`.
    CorrelatedPauli2 { p: [f64; 4] },
    /// `ρ → (1-p) ρ + p |0⟩⟨0|` on a `d`-dimensional space.
    PartialReplacement { dim: usize, p: f64 },
    /// Projective measurement `ρ → Σ Πᵢ ρ Πᵢ` for a complete orthogonal family.
    Projective { projectors: Vec<ComplexMatrix> },
    /// Mixture of unitaries `ρ → Σ p_g U_g ρ U_g†`.
    UnitaryMixture {
        probabilities: Vec<f64>,
        unitaries: Vec<ComplexMatrix>,
    },
}

fn checked_probabilities(p: &[f64]) -> Result<Vec<f64>> {
    for (index, &value) in p.iter().enumerate() {
        if value < 0.0 {
            return Err(Error::NegativeProbability { index, value });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(Error::ProbabilitySum { sum });
    }
    Ok(p.iter().map(|&x| x / sum).collect())
}

fn format_probs(p: &[f64]) -> String {
    p.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Builds one of the builtin channel families from its descriptor.
pub fn build_named_channel(spec: &NamedChannel) -> Result<KrausChannel> {
    match spec {
        NamedChannel::Pauli { p } => {
            let p = checked_probabilities(p)?;
            let sigmas = pauli_matrices();
            let kraus = sigmas
                .iter()
                .zip(&p)
                .map(|(s, &pi)| s.scale(pi.sqrt()))
                .collect();
            KrausChannel::new(2, kraus, format!("pauli({})", format_probs(&p)))
        }
        NamedChannel::Depolarizing { p0 } => {
            let rest = (1.0 - p0) / 3.0;
            let channel = build_named_channel(&NamedChannel::Pauli {
                p: [*p0, rest, rest, rest],
            })?;
            KrausChannel::new(2, channel.kraus.clone(), format!("depolarizing({p0})"))
        }
        NamedChannel::CorrelatedPauli2 { p } => {
            let p = checked_probabilities(p)?;
            let sigmas = pauli_matrices();
            let kraus = sigmas
                .iter()
                .zip(&p)
                .map(|(s, &pa)| tensor_product(s, s).scale(pa.sqrt()))
                .collect();
            KrausChannel::new(
                4,
                kraus,
                format!("correlated_pauli2({})", format_probs(&p)),
            )
        }
        NamedChannel::PartialReplacement { dim, p } => {
            let d = *dim;
            if d == 0 {
                return Err(Error::ZeroDimension);
            }
            if !(0.0..=1.0).contains(p) {
                return Err(Error::NegativeProbability {
                    index: 0,
                    value: *p,
                });
            }
            let mut kraus = vec![ComplexMatrix::identity(d, d).scale((1.0 - p).sqrt())];
            for i in 0..d {
                let mut a = ComplexMatrix::zeros(d, d);
                a[(0, i)] = re(p.sqrt());
                kraus.push(a);
            }
            KrausChannel::new(d, kraus, format!("partial_replacement(d={d},p={p})"))
        }
        NamedChannel::Projective { projectors } => {
            if projectors.is_empty() {
                return Err(Error::EmptyKraus);
            }
            let d = projectors[0].nrows();
            let mut completeness = ComplexMatrix::zeros(d, d);
            for (i, pi) in projectors.iter().enumerate() {
                if pi.nrows() != d || pi.ncols() != d {
                    return Err(Error::KrausShape {
                        index: i,
                        rows: pi.nrows(),
                        cols: pi.ncols(),
                        dim: d,
                    });
                }
                let herm = max_abs(&(pi - pi.adjoint()));
                if herm > DEFAULT_TOL {
                    return Err(Error::ProjectorFamily {
                        detail: format!("projector {i} is not Hermitian"),
                        deviation: herm,
                    });
                }
                completeness += pi;
                for (j, pj) in projectors.iter().enumerate() {
                    let product = pi * pj;
                    let target = if i == j { pi.clone() } else { ComplexMatrix::zeros(d, d) };
                    let dev = max_abs(&(product - target));
                    if dev > DEFAULT_TOL {
                        return Err(Error::ProjectorFamily {
                            detail: format!("Π{i}·Π{j} violates orthogonality"),
                            deviation: dev,
                        });
                    }
                }
            }
            let completeness_dev =
                max_abs(&(completeness - ComplexMatrix::identity(d, d)));
            if completeness_dev > DEFAULT_TOL {
                return Err(Error::ProjectorFamily {
                    detail: "projector family does not sum to the identity".to_string(),
                    deviation: completeness_dev,
                });
            }
            KrausChannel::new(
                d,
                projectors.clone(),
                format!("projective(k={},d={d})", projectors.len()),
            )
        }
        NamedChannel::UnitaryMixture {
            probabilities,
            unitaries,
        } => {
            if unitaries.is_empty() {
                return Err(Error::EmptyKraus);
            }
            if probabilities.len() != unitaries.len() {
                return Err(Error::DimensionMismatch {
                    expected: unitaries.len(),
                    got: probabilities.len(),
                });
            }
            let p = checked_probabilities(probabilities)?;
            let d = unitaries[0].nrows();
            for (i, u) in unitaries.iter().enumerate() {
                if u.nrows() != d || u.ncols() != d {
                    return Err(Error::KrausShape {
                        index: i,
                        rows: u.nrows(),
                        cols: u.ncols(),
                        dim: d,
                    });
                }
                let deviation = unitarity_deviation(u);
                if deviation > DEFAULT_TOL {
                    return Err(Error::NotUnitary { deviation });
                }
            }
            let kraus = unitaries
                .iter()
                .zip(&p)
                .map(|(u, &pg)| u.scale(pg.sqrt()))
                .collect();
            KrausChannel::new(
                d,
                kraus,
                format!("unitary_mixture(k={},d={d})", unitaries.len()),
            )
        }
    }
}

/// A random valid channel with `kraus_count` Kraus operators, deterministic per seed.
///
/// Built by drawing Ginibre matrices `Gᵢ` and right-normalizing with
/// `M^{-1/2}` where `M = Σ Gᵢ†Gᵢ`, which enforces `Σ Aᵢ†Aᵢ = I` exactly up
/// to roundoff.
pub fn random_channel(dim: usize, kraus_count: usize, seed: u64) -> KrausChannel {
    assert!(dim >= 1 && kraus_count >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<ComplexMatrix> = (0..kraus_count)
        .map(|_| {
            ComplexMatrix::from_fn(dim, dim, |_, _| {
                Complex64::new(
                    rand::Rng::sample(&mut rng, rand_distr::StandardNormal),
                    rand::Rng::sample(&mut rng, rand_distr::StandardNormal),
                )
            })
        })
        .collect();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for gi in &g {
        m += gi.adjoint() * gi;
    }
    // M is positive definite almost surely; M^{-1/2} via its eigensystem.
    let eig = hermitian_eigensystem(&m).expect("Gram matrix is Hermitian");
    let mut inv_sqrt = ComplexMatrix::zeros(dim, dim);
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(idx);
        inv_sqrt += (v * v.adjoint()).scale(1.0 / lambda.sqrt());
    }
    let kraus = g.into_iter().map(|gi| gi * &inv_sqrt).collect();
    KrausChannel::new(
        dim,
        kraus,
        format!("random(d={dim},k={kraus_count},seed={seed})"),
    )
    .expect("shapes are consistent by construction")
}

/// Identity channel on a `d`-dimensional space.
pub fn identity_channel(d: usize) -> KrausChannel {
    KrausChannel::new(d, vec![ComplexMatrix::identity(d, d)], format!("identity(d={d})"))
        .expect("identity Kraus set is well formed")
}
