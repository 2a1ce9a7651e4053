//! Square-root measurement over pinched threshold projectors.
//!
//! All operators are block-diagonal in the product eigenbasis of
//! `sigma0^{⊗n}` once pinched, so each codeword projector is built block by
//! block: strings `y` are grouped by their clustered product eigenvalue
//! `Lambda(y)`, and within a block the pinched `sigma_x` is just the
//! restriction of the rotated product state.

use serde::{Deserialize, Serialize};

use super::codebook::{Codebook, SimConfig};
use super::space::dense_dim;
use crate::channel::BinaryCovertChannel;
use crate::divergence::qre;
use crate::error::{Error, Result};
use crate::operator::{cluster_runs, eigh, nonneg_eigenspace_projector, tensor_power, CMatrix, Tolerances, C64};

/// Largest codebook the decoder accepts.
pub const MAX_DECODER_CODEWORDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MessageError {
    pub m: usize,
    pub l: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecoderReport {
    /// m-major order.
    pub per_message_error: Vec<MessageError>,
    pub average_error: f64,
    pub max_error: f64,
    /// Threshold `a` of the projectors `{pinch(sigma_x) >= e^a sigma0^{⊗n}}`.
    pub threshold: f64,
}

/// Dense POVM on `B^n` in the computational basis; `remainder = I - sum elements`.
#[derive(Debug, Clone)]
pub struct Povm {
    pub elements: Vec<CMatrix>,
    pub remainder: CMatrix,
}

impl Povm {
    /// Completes `elements` with the remainder `I - sum elements`.
    pub fn from_elements(elements: Vec<CMatrix>) -> Result<Self> {
        let dim = elements.first().map(|e| e.nrows()).ok_or_else(|| {
            Error::InvalidParameter("a POVM needs at least one element".into())
        })?;
        let remainder = elements.iter().fold(CMatrix::identity(dim, dim), |acc, e| acc - e);
        Ok(Self { elements, remainder })
    }

    pub fn dim(&self) -> usize {
        self.remainder.nrows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Default `a = alpha n D(sigma1 || sigma0) / 2`.
pub fn default_threshold(ch: &BinaryCovertChannel, cfg: &SimConfig, tol: &Tolerances) -> Result<f64> {
    let d = qre(ch.sigma1(), ch.sigma0(), tol)?.as_f64();
    Ok(0.5 * cfg.alpha * cfg.n as f64 * d)
}

struct Block {
    /// Strings `y` (product-eigenbasis indices), ascending.
    strings: Vec<usize>,
    /// `Lambda(y)` for each string.
    lambdas: Vec<f64>,
    /// Per codeword: `Upsilon` restricted to this block.
    upsilon: Vec<CMatrix>,
}

/// The square-root measurement of a codebook, stored block-diagonally in the
/// product eigenbasis `u^{⊗n}` of `sigma0^{⊗n}`.
pub struct SquareRootMeasurement {
    n: usize,
    d: usize,
    u: CMatrix,
    blocks: Vec<Block>,
    words: Vec<Vec<u8>>,
    /// `<e_a| sigma_x |e_b>` in the eigenbasis of `sigma0`.
    rotated: [CMatrix; 2],
    threshold: f64,
}

fn digits(mut y: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = y % d;
        y /= d;
    }
    out
}

/// Pseudo-inverse square root: eigenvalues at or below `floor` map to zero.
fn pinv_sqrt(s: &CMatrix, floor: f64) -> CMatrix {
    eigh(s).map_on_support(floor, |x| 1.0 / x.sqrt())
}

impl SquareRootMeasurement {
    /// Builds the measurement for `words` with threshold `a`.
    pub fn new(
        words: &[Vec<u8>],
        ch: &BinaryCovertChannel,
        threshold: f64,
        tol: &Tolerances,
        cap: usize,
    ) -> Result<Self> {
        if words.is_empty() || words.len() > MAX_DECODER_CODEWORDS {
            return Err(Error::InvalidParameter(format!(
                "the decoder handles 1 to {MAX_DECODER_CODEWORDS} codewords, got {}",
                words.len()
            )));
        }
        let n = words[0].len();
        let d = ch.sigma0().dim();
        let dim = dense_dim(d, n, cap)?;
        let e = ch.sigma0().eigh();
        let u = e.vectors.clone();
        let lambda: Vec<f64> = e.values.iter().map(|&x| x.max(0.0)).collect();
        let rotated = [
            u.adjoint() * ch.sigma0().matrix() * &u,
            u.adjoint() * ch.sigma1().matrix() * &u,
        ];
        let strings: Vec<Vec<usize>> = (0..dim).map(|y| digits(y, d, n)).collect();
        let big_lambda: Vec<f64> = strings.iter().map(|s| s.iter().map(|&k| lambda[k]).product()).collect();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| big_lambda[b].total_cmp(&big_lambda[a]).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&y| big_lambda[y]).collect();
        let scale = threshold.exp();

        let mut blocks = Vec::new();
        for (start, end) in cluster_runs(&sorted, tol.cluster_tol) {
            let mut members = order[start..end].to_vec();
            members.sort_unstable();
            let lambdas: Vec<f64> = members.iter().map(|&y| big_lambda[y]).collect();
            let projectors = words
                .iter()
                .map(|w| {
                    let mut m = block_of(&rotated, w, &members, &strings);
                    for (i, l) in lambdas.iter().enumerate() {
                        m[(i, i)] -= C64::new(scale * l, 0.0);
                    }
                    nonneg_eigenspace_projector(&m, tol)
                })
                .collect::<Result<Vec<_>>>()?;
            let size = members.len();
            let s = projectors.iter().fold(CMatrix::zeros(size, size), |acc, p| acc + p);
            let r = pinv_sqrt(&s, tol.support_tol);
            let upsilon = projectors.iter().map(|p| &r * p * &r).collect();
            blocks.push(Block {
                strings: members,
                lambdas,
                upsilon,
            });
        }
        Ok(Self {
            n,
            d,
            u,
            blocks,
            words: words.to_vec(),
            rotated,
            threshold,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// `tr[Upsilon_k sigma_{x_k}]`; only the block diagonal of `sigma_{x_k}` contributes.
    pub fn success_probability(&self, k: usize) -> f64 {
        let strings: Vec<Vec<usize>> = (0..self.d.pow(self.n as u32)).map(|y| digits(y, self.d, self.n)).collect();
        self.success_with(k, &strings)
    }

    fn success_with(&self, k: usize, strings: &[Vec<usize>]) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let sigma = block_of(&self.rotated, &self.words[k], &b.strings, strings);
                (&b.upsilon[k] * sigma).trace().re
            })
            .sum()
    }

    /// Error `1 - tr[Upsilon sigma]` per codeword, clamped to `[0, 1]`.
    pub fn errors(&self) -> Vec<f64> {
        let strings: Vec<Vec<usize>> = (0..self.d.pow(self.n as u32)).map(|y| digits(y, self.d, self.n)).collect();
        (0..self.words.len())
            .map(|k| (1.0 - self.success_with(k, &strings)).clamp(0.0, 1.0))
            .collect()
    }

    /// Dense elements in the computational basis.
    pub fn to_povm(&self) -> Result<Povm> {
        let dim = self.d.pow(self.n as u32);
        let full = tensor_power(&self.u, self.n);
        let elements = (0..self.words.len())
            .map(|k| {
                let mut m = CMatrix::zeros(dim, dim);
                for b in &self.blocks {
                    for (i, &yi) in b.strings.iter().enumerate() {
                        for (j, &yj) in b.strings.iter().enumerate() {
                            m[(yi, yj)] = b.upsilon[k][(i, j)];
                        }
                    }
                }
                &full * m * full.adjoint()
            })
            .collect();
        Povm::from_elements(elements)
    }

    /// Product eigenvalues `Lambda(y)` grouped by block.
    pub fn block_eigenvalues(&self) -> Vec<Vec<f64>> {
        self.blocks.iter().map(|b| b.lambdas.clone()).collect()
    }
}

/// Restriction of `⊗_t rotated[w_t]` to rows and columns `members`.
fn block_of(rotated: &[CMatrix; 2], w: &[u8], members: &[usize], strings: &[Vec<usize>]) -> CMatrix {
    let size = members.len();
    CMatrix::from_fn(size, size, |i, j| {
        let (a, b) = (&strings[members[i]], &strings[members[j]]);
        w.iter()
            .enumerate()
            .fold(C64::new(1.0, 0.0), |acc, (t, &x)| acc * rotated[x as usize][(a[t], b[t])])
    })
}

/// Error report of the square-root decoder for codebook `cb`.
pub fn sqrt_measurement_decoder(
    cb: &Codebook,
    ch: &BinaryCovertChannel,
    cfg: &SimConfig,
    tol: &Tolerances,
) -> Result<DecoderReport> {
    let threshold = match cfg.a_threshold {
        Some(a) => a,
        None => default_threshold(ch, cfg, tol)?,
    };
    let srm = SquareRootMeasurement::new(cb.words(), ch, threshold, tol, cfg.max_dense_dim)?;
    let errors = srm.errors();
    let per_message_error = errors
        .iter()
        .enumerate()
        .map(|(k, &error)| MessageError {
            m: k / cb.l_size,
            l: k % cb.l_size,
            error,
        })
        .collect();
    Ok(DecoderReport {
        per_message_error,
        average_error: errors.iter().sum::<f64>() / errors.len() as f64,
        max_error: errors.iter().copied().fold(0.0, f64::max),
        threshold,
    })
}

/// Projective measurement onto the codeword strings themselves (plus the
/// complement). Useful when Bob's outputs are orthogonal basis states.
pub fn codeword_projectors(words: &[Vec<u8>]) -> Result<Povm> {
    let n = words.first().map(|w| w.len()).unwrap_or(0);
    let dim = 1usize << n;
    let elements = words
        .iter()
        .map(|w| {
            let y = w.iter().fold(0usize, |acc, &b| 2 * acc + b as usize);
            let mut m = CMatrix::zeros(dim, dim);
            m[(y, y)] = C64::new(1.0, 0.0);
            m
        })
        .collect();
    Povm::from_elements(elements)
}
