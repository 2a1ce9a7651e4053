//! Pure-state bookkeeping of the coherent protocol.
//!
//! `R` and `M` always carry the same value `m`, so the global state is stored
//! as blocks `X[m][k]`: the `B^n ⊗ W^n` coefficient matrix (`dim B^n x dim W^n`)
//! of the component with `R = M = m` and decoder register `(Mhat, Lhat) = k`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::code::EgToyCode;
use super::uhlmann::uhlmann_from_matrices;
use crate::channel::StinespringIsometry;
use crate::error::{Error, Result};
use crate::operator::{eigh, max_abs, tensor, tensor_all, tensor_power, CMatrix, CVector, DensityOperator, PureState, C64};
use crate::sim::Povm;

/// Default cap on the dimension of `R ⊗ M ⊗ B^n ⊗ W^n ⊗ Mhat ⊗ Lhat`.
pub const DEFAULT_EG_MAX_DIM: usize = 1 << 22;

fn frob(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn unit_phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

fn root_of_unity(t: usize, k: usize) -> C64 {
    unit_phase(2.0 * PI * ((k % t) as f64) / t as f64)
}

/// Output coefficient matrices `A_x[b, w] = <b, w| V |x>` for inputs `0` and `1`.
pub fn letter_outputs(v: &StinespringIsometry) -> Result<[CMatrix; 2]> {
    if v.in_dim() < 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            found: v.in_dim(),
        });
    }
    let (db, dw) = (v.dim_b(), v.dim_w());
    let m = v.matrix();
    Ok([0, 1].map(|x| CMatrix::from_fn(db, dw, |b, w| m[(b * dw + w, x)])))
}

/// `V^{⊗n} |x^n>` as a `dim B^n x dim W^n` matrix.
pub fn word_output(letters: &[CMatrix; 2], word: &[u8]) -> CMatrix {
    tensor_all(word.iter().map(|&x| &letters[x as usize]))
}

/// `tr_B |psi><psi|` for a coefficient matrix `X`: `X^T conj(X)`.
fn willie_part(x: &CMatrix) -> CMatrix {
    x.transpose() * x.conjugate()
}

/// `D = sum_k K_k ⊗ |k>` with `K_k = sqrt(Lambda_k)`; the POVM remainder is
/// merged into outcome `0` (`K_0 = sqrt(Lambda_0 + remainder)`) so `D` is an isometry.
#[derive(Debug, Clone)]
pub struct CoherentPovm {
    pub kraus: Vec<CMatrix>,
}

impl CoherentPovm {
    pub fn new(povm: &Povm) -> Self {
        let sqrt = |m: &CMatrix| eigh(m).map(|x| x.max(0.0).sqrt());
        let kraus = povm
            .elements
            .iter()
            .enumerate()
            .map(|(k, e)| if k == 0 { sqrt(&(e + &povm.remainder)) } else { sqrt(e) })
            .collect();
        Self { kraus }
    }

    /// `max |D^dagger D - I|`.
    pub fn isometry_defect(&self) -> f64 {
        let dim = self.kraus[0].nrows();
        let sum = self.kraus.iter().fold(CMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
        max_abs(&(sum - CMatrix::identity(dim, dim)))
    }
}

/// The coherent protocol state after Bob's coherent measurement.
#[derive(Debug, Clone)]
pub struct ProtocolState {
    pub t: usize,
    pub l_size: usize,
    pub dim_b: usize,
    pub dim_w: usize,
    blocks: Vec<Vec<CMatrix>>,
}

impl ProtocolState {
    pub fn block(&self, m: usize, k: usize) -> &CMatrix {
        &self.blocks[m][k]
    }

    /// Dimensions of `R, M, B^n, W^n, Mhat, Lhat`.
    pub fn dims(&self) -> [usize; 6] {
        [self.t, self.t, self.dim_b, self.dim_w, self.t, self.l_size]
    }

    pub fn to_pure_state(&self) -> PureState {
        let [t, _, db, dw, _, l] = self.dims();
        let k_count = t * l;
        let mut v = CVector::zeros(t * t * db * dw * k_count);
        for (m, row) in self.blocks.iter().enumerate() {
            for (k, x) in row.iter().enumerate() {
                for b in 0..db {
                    for w in 0..dw {
                        v[(((m * t + m) * db + b) * dw + w) * k_count + k] = x[(b, w)];
                    }
                }
            }
        }
        PureState::normalized(v).expect("protocol state is nonzero")
    }

    pub fn norm_squared(&self) -> f64 {
        self.blocks.iter().flatten().map(|x| x.norm_squared()).sum()
    }

    /// `tau_{W^n}`.
    pub fn willie_state(&self) -> DensityOperator {
        let sum = self
            .blocks
            .iter()
            .flatten()
            .fold(CMatrix::zeros(self.dim_w, self.dim_w), |acc, x| acc + willie_part(x));
        DensityOperator::from_trusted(sum)
    }
}

pub(crate) fn check_budget(code: &EgToyCode, v: &StinespringIsometry, cap: usize) -> Result<()> {
    let dims = [
        code.message_dim,
        code.message_dim,
        v.dim_b().pow(code.n as u32),
        v.dim_w().pow(code.n as u32),
        code.message_dim,
        code.l_size,
    ];
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    match total {
        Some(dim) if dim <= cap => Ok(()),
        other => Err(Error::BudgetExceeded {
            dim: other.unwrap_or(usize::MAX),
            cap,
        }),
    }
}

/// Protocol state where message `m` additionally carries the phase `m_phase(m)`.
fn build_state(
    code: &EgToyCode,
    v: &StinespringIsometry,
    povm: &Povm,
    m_phase: impl Fn(usize) -> C64,
    cap: usize,
) -> Result<ProtocolState> {
    code.validate()?;
    check_budget(code, v, cap)?;
    let letters = letter_outputs(v)?;
    let (t, l) = (code.message_dim, code.l_size);
    let dim_b = v.dim_b().pow(code.n as u32);
    let dim_w = v.dim_w().pow(code.n as u32);
    if povm.len() != t * l || povm.dim() != dim_b {
        return Err(Error::DimMismatch {
            expected: t * l,
            found: povm.len(),
        });
    }
    let coherent = CoherentPovm::new(povm);
    let scale = 1.0 / ((t * l) as f64).sqrt();
    let blocks = (0..t)
        .map(|m| {
            let mut phi = CMatrix::zeros(dim_b, dim_w);
            for ell in 0..l {
                let k = m * l + ell;
                phi += word_output(&letters, &code.classical_words[k]) * unit_phase(code.encode_phases[k]);
            }
            phi *= m_phase(m) * scale;
            coherent.kraus.iter().map(|kr| kr * &phi).collect()
        })
        .collect();
    Ok(ProtocolState {
        t,
        l_size: l,
        dim_b,
        dim_w,
        blocks,
    })
}

/// Global state on `R ⊗ M ⊗ B^n ⊗ W^n ⊗ Mhat ⊗ Lhat` after encoding, `n`
/// channel uses and Bob's coherent measurement.
pub fn protocol_state(code: &EgToyCode, v: &StinespringIsometry, povm: &Povm, cap: usize) -> Result<ProtocolState> {
    build_state(code, v, povm, |_| C64::new(1.0, 0.0), cap)
}

/// Same as [`protocol_state`] with the assistance-free encoder of outcome `j`,
/// which multiplies message `m` by `exp(2 pi i j m / T)`.
pub fn protocol_state_branch(
    code: &EgToyCode,
    v: &StinespringIsometry,
    povm: &Povm,
    j: usize,
    cap: usize,
) -> Result<ProtocolState> {
    let t = code.message_dim;
    build_state(code, v, povm, |m| root_of_unity(t, j * m), cap)
}

/// The ideal state: per `m`, `(1/sqrt(T L)) sum_l e^{i h(m,l)} |x^n(m,l)> ⊗ |m, l>`,
/// stored as blocks `Y[m][l]`.
pub struct IdealState {
    blocks: Vec<Vec<CMatrix>>,
}

pub fn ideal_state(code: &EgToyCode, v: &StinespringIsometry) -> Result<IdealState> {
    code.validate()?;
    let letters = letter_outputs(v)?;
    let (t, l) = (code.message_dim, code.l_size);
    let scale = 1.0 / ((t * l) as f64).sqrt();
    let blocks = (0..t)
        .map(|m| {
            (0..l)
                .map(|ell| {
                    let k = m * l + ell;
                    word_output(&letters, &code.classical_words[k]) * (unit_phase(code.decode_phases[k]) * scale)
                })
                .collect()
        })
        .collect();
    Ok(IdealState { blocks })
}

impl IdealState {
    /// `<eta|tau>`: only components with `Mhat = m` contribute.
    pub fn overlap(&self, tau: &ProtocolState) -> C64 {
        let l = tau.l_size;
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(m, row)| row.iter().enumerate().map(move |(ell, y)| (m, ell, y)))
            .map(|(m, ell, y)| frob(y, tau.block(m, m * l + ell)))
            .sum()
    }

    /// `tr_{B^n Lhat} |eta_m><eta_m|` (normalized bin state).
    pub fn bin_state(&self, m: usize) -> CMatrix {
        let t = self.blocks.len() as f64;
        let dim_w = self.blocks[0][0].ncols();
        self.blocks[m]
            .iter()
            .fold(CMatrix::zeros(dim_w, dim_w), |acc, y| acc + willie_part(y))
            .scale(t)
    }

    /// `|eta_m>` as a `W^n x (B^n Lhat)` matrix (normalized).
    fn purifier_matrix(&self, m: usize) -> CMatrix {
        let row = &self.blocks[m];
        let l = row.len();
        let (db, dw) = (row[0].nrows(), row[0].ncols());
        let t = self.blocks.len() as f64;
        CMatrix::from_fn(dw, db * l, |w, c| row[c % l][(c / l, w)] * t.sqrt())
    }
}

/// Phase choice and the overlaps `|<eta|tau>|` it produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PhaseAlignment {
    pub encode_phases: Vec<f64>,
    pub decode_phases: Vec<f64>,
    pub aligned_overlap: f64,
    pub zero_phase_overlap: f64,
}

/// `h_k = arg(o_k)`, and `0` for vanishing overlaps.
pub fn align_from_overlaps(overlaps: &[C64]) -> Vec<f64> {
    overlaps.iter().map(|o| if o.norm() > 0.0 { o.arg() } else { 0.0 }).collect()
}

/// Sets `t = 0` and `h(m,l) = arg <x^n(m,l)| tau_{m,(m,l)}>`, which makes every
/// term of `<eta|tau>` real and nonnegative.
pub fn align_phases(code: &EgToyCode, v: &StinespringIsometry, povm: &Povm, cap: usize) -> Result<PhaseAlignment> {
    let mut zeroed = code.clone();
    zeroed.encode_phases.iter_mut().for_each(|p| *p = 0.0);
    zeroed.decode_phases.iter_mut().for_each(|p| *p = 0.0);
    let tau = protocol_state(&zeroed, v, povm, cap)?;
    let eta0 = ideal_state(&zeroed, v)?;
    let l = code.l_size;
    let overlaps: Vec<C64> = (0..code.message_dim * l)
        .map(|k| frob(&eta0.blocks[k / l][k % l], tau.block(k / l, k)))
        .collect();
    let decode_phases = align_from_overlaps(&overlaps);
    let zero_phase_overlap = eta0.overlap(&tau).norm();
    zeroed.decode_phases = decode_phases.clone();
    let aligned_overlap = ideal_state(&zeroed, v)?.overlap(&tau).norm();
    Ok(PhaseAlignment {
        encode_phases: zeroed.encode_phases,
        decode_phases,
        aligned_overlap,
        zero_phase_overlap,
    })
}

/// Reference purification targeted by the decoupler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecouplingTarget {
    /// Canonical purification of `omega_alpha^{⊗n}`.
    OmegaAlpha,
    /// Canonical purification of the average bin state `(1/T) sum_m rho_W^(m)`.
    SelfTarget,
}

/// `sum_i sqrt(lambda_i) |e_i>|e_i>` as a coefficient matrix `U sqrt(Lambda) U^T`.
pub fn canonical_purification(rho: &CMatrix) -> CMatrix {
    let e = eigh(rho);
    let mut scaled = e.vectors.clone();
    for (k, &x) in e.values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(x.max(0.0).sqrt());
    }
    scaled * e.vectors.transpose()
}

/// `Delta = sum_m |m><m| ⊗ Gamma^m` with `Gamma^m : B^n ⊗ Lhat -> Wbreve^n ⊗ P`.
#[derive(Debug, Clone)]
pub struct Decoupler {
    pub gammas: Vec<CMatrix>,
    /// Target coefficient matrix on `W^n x (Wbreve^n P)`.
    pub target: CMatrix,
    /// `<theta|(I ⊗ Gamma^m)|eta_m>` per `m`.
    pub root_fidelities: Vec<f64>,
    /// Padding dimension `P` appended to `Wbreve^n`.
    pub padding: usize,
}

impl Decoupler {
    pub fn isometry_defect(&self) -> f64 {
        self.gammas
            .iter()
            .map(|g| max_abs(&(g.adjoint() * g - CMatrix::identity(g.ncols(), g.ncols()))))
            .fold(0.0, f64::max)
    }
}

/// Single-letter `omega_alpha` on `W`.
pub fn omega_alpha_letter(v: &StinespringIsometry, alpha: f64) -> Result<CMatrix> {
    let letters = letter_outputs(v)?;
    Ok(willie_part(&letters[0]).scale(1.0 - alpha) + willie_part(&letters[1]).scale(alpha))
}

pub fn build_decoupler(
    code: &EgToyCode,
    v: &StinespringIsometry,
    target: DecouplingTarget,
    alpha: f64,
) -> Result<Decoupler> {
    let eta = ideal_state(code, v)?;
    let t = code.message_dim;
    let dim_w = v.dim_w().pow(code.n as u32);
    let dim_bl = v.dim_b().pow(code.n as u32) * code.l_size;
    let theta = match target {
        DecouplingTarget::OmegaAlpha => tensor_power(&canonical_purification(&omega_alpha_letter(v, alpha)?), code.n),
        DecouplingTarget::SelfTarget => {
            let avg = (0..t).fold(CMatrix::zeros(dim_w, dim_w), |acc, m| acc + eta.bin_state(m));
            canonical_purification(&avg.unscale(t as f64))
        }
    };
    let padding = dim_bl.div_ceil(dim_w).max(1);
    let mut pad = CMatrix::zeros(1, padding);
    pad[(0, 0)] = C64::new(1.0, 0.0);
    let target = tensor(&theta, &pad);
    let mut gammas = Vec::with_capacity(t);
    let mut root_fidelities = Vec::with_capacity(t);
    for m in 0..t {
        let u = uhlmann_from_matrices(&eta.purifier_matrix(m), &target)?;
        gammas.push(u.isometry);
        root_fidelities.push(u.overlap);
    }
    Ok(Decoupler {
        gammas,
        target,
        root_fidelities,
        padding,
    })
}

/// `||eta' - GHZ ⊗ theta||_1` where `eta'` is the ideal state after `Delta`.
pub fn decoupled_trace_distance(code: &EgToyCode, v: &StinespringIsometry, dec: &Decoupler) -> Result<f64> {
    let eta = ideal_state(code, v)?;
    let t = code.message_dim;
    let overlap: C64 = (0..t)
        .map(|m| frob(&dec.target, &(eta.purifier_matrix(m) * dec.gammas[m].transpose())))
        .sum::<C64>()
        / t as f64;
    Ok(2.0 * (1.0 - overlap.norm_sqr()).max(0.0).sqrt())
}

/// `F_j = <Phi| D^j(N^{⊗n}(F^j(Phi))) |Phi>` for the assistance-free pair `j`.
pub fn branch_fidelity(
    code: &EgToyCode,
    v: &StinespringIsometry,
    povm: &Povm,
    dec: &Decoupler,
    j: usize,
    cap: usize,
) -> Result<f64> {
    let tau = protocol_state_branch(code, v, povm, j, cap)?;
    let (t, l) = (code.message_dim, code.l_size);
    let (db, dw) = (tau.dim_b, tau.dim_w);
    let mut amp = CMatrix::zeros(dw, dec.target.ncols());
    for m in 0..t {
        // components with Mhat = m, laid out as W^n x (B^n Lhat)
        let chi = CMatrix::from_fn(dw, db * l, |w, c| tau.block(m, m * l + c % l)[(c / l, w)]);
        let correction = root_of_unity(t, j * m).conj();
        amp += chi * dec.gammas[m].transpose() * correction;
    }
    Ok((amp.norm_squared() / t as f64).clamp(0.0, 1.0))
}

/// Every `F_j`, the best `j` (lowest index among values within `1e-12` of the
/// maximum) and the maximum.
pub fn eliminate_assistance(
    code: &EgToyCode,
    v: &StinespringIsometry,
    povm: &Povm,
    dec: &Decoupler,
    cap: usize,
) -> Result<(usize, Vec<f64>)> {
    let per_j = (0..code.message_dim)
        .map(|j| branch_fidelity(code, v, povm, dec, j, cap))
        .collect::<Result<Vec<_>>>()?;
    let max = per_j.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best = per_j.iter().position(|&f| f >= max - 1e-12).unwrap_or(0);
    Ok((best, per_j))
}

/// `max |F^j^dagger F^j - I|` of the assistance-free encoder (independent of `j`).
pub fn encoder_defect(code: &EgToyCode) -> f64 {
    let (t, l) = (code.message_dim, code.l_size);
    let mut worst = 0.0f64;
    for m in 0..t {
        for m2 in 0..t {
            let mut g = C64::new(0.0, 0.0);
            for a in 0..l {
                for b in 0..l {
                    if code.classical_words[m * l + a] == code.classical_words[m2 * l + b] {
                        g += unit_phase(code.encode_phases[m2 * l + b] - code.encode_phases[m * l + a]);
                    }
                }
            }
            g /= l as f64;
            let target = if m == m2 { 1.0 } else { 0.0 };
            worst = worst.max((g - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// `(1/(T L)) sum_k tr_B |x_k><x_k|`: Willie's state for the classical code.
pub fn classical_willie_average(code: &EgToyCode, v: &StinespringIsometry) -> Result<CMatrix> {
    let letters = letter_outputs(v)?;
    let dim_w = v.dim_w().pow(code.n as u32);
    let count = code.classical_words.len() as f64;
    Ok(code
        .classical_words
        .iter()
        .fold(CMatrix::zeros(dim_w, dim_w), |acc, w| acc + willie_part(&word_output(&letters, w)))
        .unscale(count))
}

/// `1 - tr[Lambda_k sigma_{x_k}]` averaged over codewords.
pub fn average_decoding_error(code: &EgToyCode, v: &StinespringIsometry, povm: &Povm) -> Result<f64> {
    let letters = letter_outputs(v)?;
    let total: f64 = code
        .classical_words
        .iter()
        .zip(&povm.elements)
        .map(|(w, e)| {
            let x = word_output(&letters, w);
            1.0 - (e * &x * x.adjoint()).trace().re
        })
        .sum();
    Ok(total / code.classical_words.len() as f64)
}
