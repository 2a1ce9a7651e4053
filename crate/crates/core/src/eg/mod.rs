//! Toy-scale entanglement generation: quantum codewords, coherent decoding,
//! Uhlmann decoupling, GHZ conversion and removal of the classical assistance,
//! all evaluated exactly on dense vectors.

mod code;
mod ghz;
mod protocol;
mod uhlmann;

use serde::{Deserialize, Serialize};

pub use code::{build_quantum_codewords, sample_eg_code, EgToyCode};
pub use ghz::{ghz_state, ghz_to_epr, ghz_to_epr_channel, GhzBranch};
pub use protocol::{
    align_from_overlaps, align_phases, average_decoding_error, branch_fidelity, build_decoupler,
    canonical_purification, classical_willie_average, decoupled_trace_distance, eliminate_assistance,
    encoder_defect, ideal_state, letter_outputs, omega_alpha_letter, protocol_state, protocol_state_branch,
    word_output, CoherentPovm, Decoupler, DecouplingTarget, IdealState, PhaseAlignment, ProtocolState,
    DEFAULT_EG_MAX_DIM,
};
pub use uhlmann::{bipartite_matrix, uhlmann_from_matrices, uhlmann_isometry, UhlmannIsometry};

use crate::channel::{build_covert_channel, StinespringIsometry};
use crate::divergence::{qre, Divergence};
use crate::error::Result;
use crate::operator::{trace_norm, CMatrix, DensityOperator, Tolerances};
use crate::sim::{codeword_projectors, Povm, SquareRootMeasurement};

/// How Bob's decoding POVM is built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PovmChoice {
    /// Square-root measurement; threshold defaults to `alpha n D(sigma1||sigma0) / 2`.
    SquareRoot { threshold: Option<f64> },
    /// Projectors onto the codeword strings (suited to noiseless channels).
    CodewordProjectors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EgOptions {
    /// Bernoulli weight defining the `omega_alpha` target.
    pub alpha: f64,
    pub target: DecouplingTarget,
    /// Replace the code's phases by [`align_phases`] before running.
    pub align: bool,
    pub povm: PovmChoice,
    pub max_dim: usize,
}

impl EgOptions {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            target: DecouplingTarget::OmegaAlpha,
            align: true,
            povm: PovmChoice::SquareRoot { threshold: None },
            max_dim: DEFAULT_EG_MAX_DIM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EgReport {
    /// `max_j F_j`.
    pub fidelity: f64,
    /// `D(tau_{W^n} || omega0^{⊗n})`.
    pub covert_divergence: Divergence,
    /// Ideal state after decoupling versus `GHZ ⊗ theta`.
    pub trace_distance_ghz: f64,
    pub best_j: usize,
    pub per_j_fidelity: Vec<f64>,
    pub target: DecouplingTarget,
    pub per_step_diagnostics: Vec<Diagnostic>,
}

impl EgReport {
    pub fn diagnostic(&self, label: &str) -> Option<f64> {
        self.per_step_diagnostics.iter().find(|d| d.label == label).map(|d| d.value)
    }
}

/// Bob's decoding POVM for `code` over `v`.
pub fn decoding_povm(code: &EgToyCode, v: &StinespringIsometry, opts: &EgOptions, tol: &Tolerances) -> Result<Povm> {
    match opts.povm {
        PovmChoice::CodewordProjectors => {
            let dim_b = v.dim_b().pow(code.n as u32);
            if dim_b != 1usize << code.n {
                return Err(crate::error::Error::DimMismatch {
                    expected: 1 << code.n,
                    found: dim_b,
                });
            }
            codeword_projectors(&code.classical_words)
        }
        PovmChoice::SquareRoot { threshold } => {
            let ch = build_covert_channel(v, tol)?;
            let a = match threshold {
                Some(a) => a,
                None => 0.5 * opts.alpha * code.n as f64 * qre(ch.sigma1(), ch.sigma0(), tol)?.as_f64(),
            };
            SquareRootMeasurement::new(&code.classical_words, &ch, a, tol, opts.max_dim)?.to_povm()
        }
    }
}

/// Runs the whole protocol. Returns the code actually used (phases and
/// `chosen_j` filled in) and the report.
pub fn eg_report(
    code: &EgToyCode,
    v: &StinespringIsometry,
    opts: &EgOptions,
    tol: &Tolerances,
) -> Result<(EgToyCode, EgReport)> {
    code.validate()?;
    code.check_distinct_within_messages()?;
    protocol::check_budget(code, v, opts.max_dim)?;
    let povm = decoding_povm(code, v, opts, tol)?;
    let alignment = align_phases(code, v, &povm, opts.max_dim)?;
    let mut code = code.clone();
    if opts.align {
        code.encode_phases = alignment.encode_phases.clone();
        code.decode_phases = alignment.decode_phases.clone();
    }

    let tau = protocol_state(&code, v, &povm, opts.max_dim)?;
    let eta = ideal_state(&code, v)?;
    let eta_overlap = eta.overlap(&tau).norm();
    let decoupler = build_decoupler(&code, v, opts.target, opts.alpha)?;
    let trace_distance_ghz = decoupled_trace_distance(&code, v, &decoupler)?;
    let (best_j, per_j) = eliminate_assistance(&code, v, &povm, &decoupler, opts.max_dim)?;
    code.chosen_j = best_j;

    let tau_w = tau.willie_state();
    let letters = letter_outputs(v)?;
    let omega0 = letters[0].transpose() * letters[0].conjugate();
    let innocent = DensityOperator::from_trusted(crate::operator::tensor_power(&omega0, code.n));
    let covert_divergence = qre(&tau_w, &innocent, tol)?;
    let classical = classical_willie_average(&code, v)?;
    let mixed = crate::operator::tensor_power(&omega_alpha_letter(v, opts.alpha)?, code.n);
    let max_bin_distance = (0..code.message_dim)
        .map(|m| trace_norm(&(eta.bin_state(m) - &mixed)))
        .fold(0.0, f64::max);
    let mean_fidelity = per_j.iter().sum::<f64>() / per_j.len() as f64;
    let diag = |label: &str, value: f64| Diagnostic {
        label: label.into(),
        value,
    };
    let per_step_diagnostics = vec![
        diag("coherentPovmDefect", CoherentPovm::new(&povm).isometry_defect()),
        diag("encoderDefect", encoder_defect(&code)),
        diag("decouplerDefect", decoupler.isometry_defect()),
        diag("averageDecodingError", average_decoding_error(&code, v, &povm)?),
        diag("overlapAligned", alignment.aligned_overlap),
        diag("overlapZeroPhase", alignment.zero_phase_overlap),
        diag("traceDistanceTauEta", 2.0 * (1.0 - eta_overlap * eta_overlap).max(0.0).sqrt()),
        diag("willieTauToClassical", trace_norm(&(tau_w.matrix() - &classical))),
        diag("maxBinDistanceToMixed", max_bin_distance),
        diag("secrecyBound", 2.0 * max_bin_distance.sqrt()),
        diag(
            "minRootFidelity",
            decoupler.root_fidelities.iter().copied().fold(f64::INFINITY, f64::min),
        ),
        diag("meanFidelity", mean_fidelity),
    ];
    let report = EgReport {
        fidelity: per_j[best_j],
        covert_divergence,
        trace_distance_ghz,
        best_j,
        per_j_fidelity: per_j,
        target: opts.target,
        per_step_diagnostics,
    };
    Ok((code, report))
}

/// `tau_{W^n}` computed by applying the complementary channel to each
/// `|phi_m><phi_m|` (reference path for tests).
pub fn willie_state_via_kraus(code: &EgToyCode, v: &StinespringIsometry) -> Result<CMatrix> {
    let phis = build_quantum_codewords(code)?;
    let (db, dw, din) = (v.dim_b(), v.dim_w(), v.in_dim());
    // complementary Kraus operators E_b[w, a] = <b, w| V |a>
    let comp: Vec<CMatrix> = (0..db)
        .map(|b| CMatrix::from_fn(dw, din, |w, a| v.matrix()[(b * dw + w, a)]))
        .collect();
    let n = code.n;
    let dim_w = dw.pow(n as u32);
    let mut out = CMatrix::zeros(dim_w, dim_w);
    // qubit codewords embedded into the channel input
    let embed = CMatrix::from_fn(din, 2, |a, x| if a == x { crate::operator::ONE } else { crate::operator::ZERO });
    let comp2: Vec<CMatrix> = comp.iter().map(|e| e * &embed).collect();
    for phi in &phis {
        let rho = phi.amplitudes() * phi.amplitudes().adjoint();
        for idx in 0..db.pow(n as u32) {
            let mut k = CMatrix::identity(1, 1);
            let mut rest = idx;
            let mut digits = vec![0; n];
            for d in digits.iter_mut().rev() {
                *d = rest % db;
                rest /= db;
            }
            for &d in &digits {
                k = crate::operator::tensor(&k, &comp2[d]);
            }
            out += &k * &rho * k.adjoint();
        }
    }
    Ok(out.unscale(phis.len() as f64))
}
