//! Machine-readable report documents and their plain-text rendering.
//!
//! A report echoes the parsed input, records tool version and seed, and keys
//! its payload by the command that produced it. Floats pass through
//! serde_json's shortest round-trip encoding, so re-parsing a report yields
//! bit-identical values. The `generated_at_unix` field is the only
//! non-deterministic part and sits on its own line in pretty output so
//! comparison tooling can drop it.

use serde::{Deserialize, Serialize};

use crate::channel::ValidationReport;
use crate::purity::{DfsCertificate, MonteCarloEstimate, PurityBounds, PurityReport};
use crate::specfile::{ChannelSpecFile, MatrixSpec, VectorSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub generated_at_unix: u64,
    /// Echo of the parsed spec file.
    pub input: ChannelSpecFile,
    pub results: CommandResults,
}

/// Per-command payloads; exactly one is populated per invocation.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CommandResults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dfs: Option<DfsResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qecc: Option<QeccResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub montecarlo: Option<MonteCarloResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzeResult {
    pub dim: usize,
    pub kraus_count: usize,
    pub validation: ValidationReport,
    pub unital: bool,
    pub unitality_deviation: f64,
    /// Max-norm gap between the direct and dual constructions of the purity
    /// Hamiltonian.
    pub route_deviation: f64,
    pub operator_norm: f64,
    /// Eigenvalues on the whole doubled space, ascending.
    pub full_spectrum: Vec<f64>,
    /// Eigenvalues on the symmetric sector, ascending.
    pub symmetric_spectrum: Vec<f64>,
    pub min_symmetric_eigenvalue: f64,
    pub survey: PurityReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub direction: String,
    pub quantity: String,
    pub subspace_dim: usize,
    pub value: f64,
    pub state: VectorSpec,
    pub converged: bool,
    pub iterations_used: usize,
    pub restarts: usize,
    pub restart_values: Vec<f64>,
    pub dfs_candidate: bool,
    /// Present when the base space is 2-dimensional and the dense grid
    /// oracle was auto-run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<GridOracleResult>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridOracleResult {
    pub resolution: usize,
    pub min_value: f64,
    pub max_value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DfsResult {
    /// Verdict for the subspace given in the spec file.
    Subspace {
        subspace_dim: usize,
        is_dfs: bool,
        tol: f64,
        certificate: DfsCertificate,
    },
    /// No subspace given: the eigenvalue-one subspace of the purity
    /// Hamiltonian, reported as discovered candidates.
    Discovery {
        invariant_dimension: usize,
        eigenvalue_tolerance: f64,
        max_residual: f64,
        basis: Vec<VectorSpec>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QeccResult {
    pub code_dim: usize,
    pub kraus_count: usize,
    pub code_matrix: MatrixSpec,
    pub kl_residual: f64,
    pub tol: f64,
    pub condition_holds: bool,
    /// `Tr(c²)`; absent when the error-correction condition fails.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_c_squared: Option<f64>,
    pub codeword_purities: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub quantity: String,
    pub estimate: MonteCarloEstimate,
    pub analytic: f64,
    /// `|estimate - analytic| / stderr`; absent when the spread is zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_score: Option<f64>,
}

impl ReportDocument {
    pub fn new(command: &str, seed: u64, input: ChannelSpecFile) -> Self {
        let generated_at_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool: "channel-lab".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            generated_at_unix,
            input,
            results: CommandResults::default(),
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    /// Plain-text rendering for standard output.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, k: &str, v: String| {
            out.push_str(&format!("  {k:<28} {v}\n"));
        };
        out.push_str(&format!("channel-lab {} (seed {})\n", self.command, self.seed));
        if let Some(a) = &self.results.analyze {
            line(&mut out, "channel", a.survey.channel.clone());
            line(&mut out, "dimension", a.dim.to_string());
            line(&mut out, "kraus operators", a.kraus_count.to_string());
            line(
                &mut out,
                "trace preservation",
                format!(
                    "{} (deviation {:.3e})",
                    if a.validation.passes { "ok" } else { "VIOLATED" },
                    a.validation.max_deviation
                ),
            );
            line(&mut out, "unital", format!("{}", a.unital));
            line(
                &mut out,
                "construction routes agree to",
                format!("{:.3e}", a.route_deviation),
            );
            line(&mut out, "operator norm", format!("{:.12}", a.operator_norm));
            line(&mut out, "full spectrum", render_vec(&a.full_spectrum));
            line(
                &mut out,
                "symmetric spectrum",
                render_vec(&a.symmetric_spectrum),
            );
            line(
                &mut out,
                "least symmetric eigenvalue",
                format!("{:.12}", a.min_symmetric_eigenvalue),
            );
            render_bounds(&mut out, &a.survey.bounds);
            line(
                &mut out,
                "average purity",
                format!("{:.12}", a.survey.average_purity),
            );
            line(
                &mut out,
                "average fidelity",
                format!("{:.12}", a.survey.average_fidelity),
            );
            match &a.survey.dfs_basis {
                Some(basis) => line(
                    &mut out,
                    "invariant subspace",
                    format!("dimension {}", basis.dimension),
                ),
                None => line(&mut out, "invariant subspace", "empty".to_string()),
            }
            out.push_str("  per-state survey:\n");
            out.push_str("      purity            fidelity\n");
            for entry in &a.survey.states {
                out.push_str(&format!(
                    "      {:<17.12} {:<17.12}\n",
                    entry.output_purity, entry.fidelity
                ));
            }
        }
        if let Some(o) = &self.results.optimize {
            line(&mut out, "direction", o.direction.clone());
            line(&mut out, "quantity", o.quantity.clone());
            line(&mut out, "subspace dimension", o.subspace_dim.to_string());
            line(&mut out, "value", format!("{:.12}", o.value));
            line(&mut out, "converged", o.converged.to_string());
            line(&mut out, "iterations", o.iterations_used.to_string());
            line(&mut out, "restarts", o.restarts.to_string());
            line(&mut out, "dfs candidate", o.dfs_candidate.to_string());
            if let Some(oracle) = &o.oracle {
                line(
                    &mut out,
                    "grid oracle (min, max)",
                    format!(
                        "({:.12}, {:.12}) at resolution {}",
                        oracle.min_value, oracle.max_value, oracle.resolution
                    ),
                );
            }
            line(&mut out, "state", render_state(&o.state));
        }
        if let Some(d) = &self.results.dfs {
            match d {
                DfsResult::Subspace {
                    subspace_dim,
                    is_dfs,
                    tol,
                    certificate,
                } => {
                    line(&mut out, "subspace dimension", subspace_dim.to_string());
                    line(
                        &mut out,
                        "decoherence free",
                        format!("{is_dfs} (tol {tol:.1e})"),
                    );
                    match certificate {
                        DfsCertificate::Unital {
                            max_eigen_residual,
                            checked_vectors,
                        } => {
                            line(
                                &mut out,
                                "certificate",
                                format!(
                                    "eigen residual {max_eigen_residual:.3e} over {checked_vectors} vectors"
                                ),
                            );
                        }
                        DfsCertificate::NonUnital {
                            min_sampled_purity,
                            optimizer_min,
                            sampled_states,
                        } => {
                            line(
                                &mut out,
                                "certificate",
                                format!(
                                    "min sampled purity {min_sampled_purity:.12} over {sampled_states} states, optimizer min {optimizer_min:.12}"
                                ),
                            );
                        }
                    }
                }
                DfsResult::Discovery {
                    invariant_dimension,
                    eigenvalue_tolerance,
                    max_residual,
                    ..
                } => {
                    line(
                        &mut out,
                        "invariant subspace dimension",
                        invariant_dimension.to_string(),
                    );
                    line(
                        &mut out,
                        "eigenvalue tolerance",
                        format!("{eigenvalue_tolerance:.1e}"),
                    );
                    line(&mut out, "max residual", format!("{max_residual:.3e}"));
                }
            }
        }
        if let Some(q) = &self.results.qecc {
            line(&mut out, "code dimension", q.code_dim.to_string());
            line(&mut out, "kraus operators", q.kraus_count.to_string());
            line(
                &mut out,
                "error-correction condition",
                format!(
                    "{} (residual {:.3e}, tol {:.1e})",
                    if q.condition_holds { "holds" } else { "VIOLATED" },
                    q.kl_residual,
                    q.tol
                ),
            );
            if let Some(p) = q.trace_c_squared {
                line(&mut out, "code purity Tr(c^2)", format!("{p:.12}"));
            }
            line(
                &mut out,
                "codeword purities",
                render_vec(&q.codeword_purities),
            );
        }
        if let Some(m) = &self.results.montecarlo {
            line(&mut out, "quantity", m.quantity.clone());
            line(&mut out, "samples", m.estimate.samples.to_string());
            line(&mut out, "estimate", format!("{:.12}", m.estimate.estimate));
            line(&mut out, "stderr", format!("{:.3e}", m.estimate.stderr));
            line(&mut out, "analytic", format!("{:.12}", m.analytic));
            match m.z_score {
                Some(z) => line(&mut out, "z-score", format!("{z:.3}")),
                None => line(&mut out, "z-score", "0 (zero spread)".to_string()),
            }
        }
        out
    }
}

fn render_vec(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.9}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_state(v: &VectorSpec) -> String {
    v.iter()
        .map(|[re, im]| format!("{re:.9}{im:+.9}i"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_bounds(out: &mut String, b: &PurityBounds) {
    out.push_str(&format!(
        "  {:<28} upper {:.12}, lower(global) {:.12}, lower(subspace) {:.12}\n",
        "purity bounds", b.upper, b.lower_global, b.lower_subspace
    ));
}
