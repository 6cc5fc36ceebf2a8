//! Command implementations behind the `channel-lab` binary.
//!
//! Exit codes: 0 success, 2 parse error, 3 validation error, 4 numerical
//! failure (cross-route disagreement or a violated error-correction
//! condition). Commands that can report a failure (qecc) still produce a
//! full report before exiting nonzero.

use std::path::Path;

use crate::channel::KrausChannel;
use crate::error::Error;
use crate::hamiltonian::{
    fidelity_hamiltonian_hermitian, invariant_subspace, purity_hamiltonian,
    purity_hamiltonian_dual, symmetric_sector_spectrum, ChannelHamiltonian,
    INVARIANT_EIGENVALUE_TOL,
};
use crate::optimizer::{
    brute_force_grid, maximize_product_expectation, minimize_product_expectation,
    OptimizerConfig,
};
use crate::purity::{
    average_fidelity, average_purity, dfs_check, monte_carlo_average, purity_report,
    qecc_code_matrix, AverageQuantity, CROSS_ROUTE_TOL,
};
use crate::report::{
    AnalyzeResult, DfsResult, GridOracleResult, MonteCarloResult, OptimizeResult, QeccResult,
    ReportDocument,
};
use crate::specfile::{matrix_to_spec, vector_to_spec, BuildError, ChannelSpecFile, SpecFileError};
use crate::tensor::{hermitian_eigensystem, max_abs, SubspaceBasis, DEFAULT_TOL};

/// Default sample count for Monte-Carlo commands.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Grid resolution used when the oracle auto-runs on qubit channels.
pub const ORACLE_RESOLUTION: usize = 200;

/// A command failure carrying the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<SpecFileError> for CliError {
    fn from(e: SpecFileError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::RouteDisagreement { .. } | Error::CodeCondition { .. } => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Spec(s) => s.into(),
            BuildError::Channel(c) => c.into(),
        }
    }
}

/// Option overrides shared by every command; `None` defers to the spec file
/// or the documented default.
#[derive(Debug, Clone, Default)]
pub struct CommandOptions {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub restarts: Option<usize>,
}

/// Extremization direction for the optimize command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    fn as_str(&self) -> &'static str {
        match self {
            Direction::Min => "min",
            Direction::Max => "max",
        }
    }
}

/// Objective selector for optimize and montecarlo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Purity,
    Fidelity,
}

impl Quantity {
    fn as_str(&self) -> &'static str {
        match self {
            Quantity::Purity => "purity",
            Quantity::Fidelity => "fidelity",
        }
    }
}

struct Loaded {
    spec: ChannelSpecFile,
    channel: KrausChannel,
    seed: u64,
}

fn load(path: &Path, opts: &CommandOptions) -> Result<Loaded, CliError> {
    let spec = ChannelSpecFile::from_path(path)?;
    let channel = spec.build_channel()?;
    let validation = channel.validate(opts.tol.unwrap_or(DEFAULT_TOL));
    if !validation.passes {
        return Err(CliError::Validation(format!(
            "channel is not trace preserving: max deviation {:.3e} exceeds tolerance {:.3e}",
            validation.max_deviation, validation.tol
        )));
    }
    let seed = opts.seed.or(spec.seed).unwrap_or(0);
    Ok(Loaded {
        spec,
        channel,
        seed,
    })
}

fn analysis_subspace(loaded: &Loaded) -> Result<SubspaceBasis, CliError> {
    Ok(loaded
        .spec
        .subspace_basis(loaded.channel.dim())?
        .unwrap_or_else(|| SubspaceBasis::full_space(loaded.channel.dim())))
}

/// Builds `Ω` by both routes and fails with exit code 4 if they disagree.
fn cross_checked_purity_hamiltonian(
    t: &KrausChannel,
) -> Result<(ChannelHamiltonian, f64), CliError> {
    let direct = purity_hamiltonian(t);
    let dual = purity_hamiltonian_dual(t);
    let deviation = max_abs(&(direct.matrix() - dual.matrix()));
    if deviation > CROSS_ROUTE_TOL {
        return Err(CliError::Numerical(format!(
            "purity Hamiltonian routes disagree by {deviation:.3e} (tolerance {CROSS_ROUTE_TOL:.1e})"
        )));
    }
    Ok((direct, deviation))
}

/// Full spectral and statistical survey of the channel.
pub fn cmd_analyze(path: &Path, opts: &CommandOptions) -> Result<ReportDocument, CliError> {
    let loaded = load(path, opts)?;
    let t = &loaded.channel;
    let subspace = analysis_subspace(&loaded)?;
    let (omega, route_deviation) = cross_checked_purity_hamiltonian(t)?;
    let full = hermitian_eigensystem(omega.matrix()).map_err(CliError::from)?;
    let symmetric = symmetric_sector_spectrum(&omega).map_err(CliError::from)?;
    let survey = purity_report(t, &subspace)?;
    let (unital, unitality_deviation) = t.is_unital(DEFAULT_TOL);
    let mut report = ReportDocument::new("analyze", loaded.seed, loaded.spec.clone());
    report.results.analyze = Some(AnalyzeResult {
        dim: t.dim(),
        kraus_count: t.kraus().len(),
        validation: t.validate(opts.tol.unwrap_or(DEFAULT_TOL)),
        unital,
        unitality_deviation,
        route_deviation,
        operator_norm: omega.operator_norm(),
        full_spectrum: full.eigenvalues,
        symmetric_spectrum: symmetric.eigenvalues,
        min_symmetric_eigenvalue: symmetric.min_symmetric_eigenvalue,
        survey,
    });
    Ok(report)
}

/// Extremizes purity or fidelity over product states of the subspace.
pub fn cmd_optimize(
    path: &Path,
    direction: Direction,
    quantity: Quantity,
    opts: &CommandOptions,
) -> Result<ReportDocument, CliError> {
    let loaded = load(path, opts)?;
    let t = &loaded.channel;
    let subspace = analysis_subspace(&loaded)?;
    let hamiltonian = match quantity {
        Quantity::Purity => cross_checked_purity_hamiltonian(t)?.0,
        Quantity::Fidelity => fidelity_hamiltonian_hermitian(t),
    };
    let mut cfg = OptimizerConfig::with_seed(loaded.seed);
    if let Some(restarts) = opts.restarts {
        cfg.restarts = restarts;
    }
    let result = match direction {
        Direction::Min => minimize_product_expectation(&hamiltonian, &subspace, &cfg)?,
        Direction::Max => maximize_product_expectation(&hamiltonian, &subspace, &cfg)?,
    };
    let oracle = if t.dim() == 2 {
        let grid = brute_force_grid(&hamiltonian, ORACLE_RESOLUTION)?;
        Some(GridOracleResult {
            resolution: ORACLE_RESOLUTION,
            min_value: grid.min_value,
            max_value: grid.max_value,
        })
    } else {
        None
    };
    let dfs_tol = opts.tol.unwrap_or(INVARIANT_EIGENVALUE_TOL);
    let dfs_candidate = direction == Direction::Max && result.is_dfs_candidate(dfs_tol);
    let mut report = ReportDocument::new("optimize", loaded.seed, loaded.spec.clone());
    report.results.optimize = Some(OptimizeResult {
        direction: direction.as_str().to_string(),
        quantity: quantity.as_str().to_string(),
        subspace_dim: subspace.dim(),
        value: result.value,
        state: vector_to_spec(result.state.amplitudes()),
        converged: result.converged,
        iterations_used: result.iterations_used,
        restarts: cfg.restarts,
        restart_values: result.restart_values,
        dfs_candidate,
        oracle,
    });
    Ok(report)
}

/// Checks the given subspace for decoherence freedom, or discovers the
/// eigenvalue-one subspace when no subspace is supplied.
pub fn cmd_dfs(path: &Path, opts: &CommandOptions) -> Result<ReportDocument, CliError> {
    let loaded = load(path, opts)?;
    let t = &loaded.channel;
    let tol = opts.tol.unwrap_or(INVARIANT_EIGENVALUE_TOL);
    let result = match loaded.spec.subspace_basis(t.dim())? {
        Some(subspace) => {
            let verdict = dfs_check(t, &subspace, tol, loaded.seed)?;
            DfsResult::Subspace {
                subspace_dim: subspace.dim(),
                is_dfs: verdict.is_dfs,
                tol: verdict.tol,
                certificate: verdict.certificate,
            }
        }
        None => {
            let omega = cross_checked_purity_hamiltonian(t)?.0;
            let inv = invariant_subspace(&omega, tol)?;
            let basis = (0..inv.basis.ncols())
                .map(|j| vector_to_spec(&inv.basis.column(j).into_owned()))
                .collect();
            DfsResult::Discovery {
                invariant_dimension: inv.dim(),
                eigenvalue_tolerance: inv.eigenvalue_tolerance,
                max_residual: inv.max_residual(&omega),
                basis,
            }
        }
    };
    let mut report = ReportDocument::new("dfs", loaded.seed, loaded.spec.clone());
    report.results.dfs = Some(result);
    Ok(report)
}

/// Checks the error-correction condition for the code in the spec and, when
/// it holds, the code-matrix purity identity.
///
/// Returns the report together with the exit code (4 when the condition is
/// violated: the report is still complete and should be emitted).
pub fn cmd_qecc(path: &Path, opts: &CommandOptions) -> Result<(ReportDocument, i32), CliError> {
    let loaded = load(path, opts)?;
    let t = &loaded.channel;
    let code = loaded
        .spec
        .code_basis(t.dim())?
        .ok_or(SpecFileError::MissingSection("code"))
        .map_err(CliError::from)?;
    let tol = opts.tol.unwrap_or(INVARIANT_EIGENVALUE_TOL);
    let outcome = qecc_code_matrix(t, &code, tol)?;
    let exit = if outcome.condition_holds { 0 } else { 4 };
    let mut report = ReportDocument::new("qecc", loaded.seed, loaded.spec.clone());
    report.results.qecc = Some(QeccResult {
        code_dim: code.dim(),
        kraus_count: t.kraus().len(),
        code_matrix: matrix_to_spec(&outcome.code_matrix.matrix),
        kl_residual: outcome.code_matrix.kl_residual,
        tol: outcome.tol,
        condition_holds: outcome.condition_holds,
        trace_c_squared: outcome.purity,
        codeword_purities: outcome.codeword_purities,
    });
    Ok((report, exit))
}

/// Monte-Carlo Haar average with the analytic value and z-score.
pub fn cmd_montecarlo(
    path: &Path,
    quantity: Quantity,
    opts: &CommandOptions,
) -> Result<ReportDocument, CliError> {
    let loaded = load(path, opts)?;
    let t = &loaded.channel;
    let samples = opts
        .samples
        .or(loaded.spec.samples)
        .unwrap_or(DEFAULT_SAMPLES);
    let (avg_quantity, analytic) = match quantity {
        Quantity::Purity => (AverageQuantity::Purity, average_purity(t)),
        Quantity::Fidelity => (AverageQuantity::Fidelity, average_fidelity(t)),
    };
    let estimate = monte_carlo_average(t, avg_quantity, samples, loaded.seed)?;
    let diff = (estimate.estimate - analytic).abs();
    // below roundoff scale the integrand was constant and the ratio is noise
    let z_score = (estimate.stderr > 1e-14).then(|| diff / estimate.stderr);
    let mut report = ReportDocument::new("montecarlo", loaded.seed, loaded.spec.clone());
    report.results.montecarlo = Some(MonteCarloResult {
        quantity: quantity.as_str().to_string(),
        estimate,
        analytic,
        z_score,
    });
    Ok(report)
}
