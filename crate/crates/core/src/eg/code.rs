use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{CVector, PureState, C64};
use crate::sim::codebook::{sample_codebook_indexed, word_string, Codebook, SimConfig};

/// Classical codebook plus the phases of its quantum superpositions.
/// Words, encode phases `t(m,l)` and decode phases `h(m,l)` are m-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EgToyCode {
    #[serde(rename = "T")]
    pub message_dim: usize,
    pub l_size: usize,
    pub n: usize,
    #[serde(with = "crate::sim::codebook::word_strings")]
    pub classical_words: Vec<Vec<u8>>,
    pub encode_phases: Vec<f64>,
    pub decode_phases: Vec<f64>,
    pub chosen_j: usize,
}

impl EgToyCode {
    /// Zero phases, `chosen_j = 0`.
    pub fn new(message_dim: usize, l_size: usize, words: Vec<Vec<u8>>) -> Result<Self> {
        let n = words.first().map(Vec::len).unwrap_or(0);
        let count = words.len();
        let code = Self {
            message_dim,
            l_size,
            n,
            classical_words: words,
            encode_phases: vec![0.0; count],
            decode_phases: vec![0.0; count],
            chosen_j: 0,
        };
        code.validate()?;
        Ok(code)
    }

    pub fn from_strings(message_dim: usize, l_size: usize, words: &[&str]) -> Result<Self> {
        let cb = Codebook::from_strings(message_dim, l_size, words)?;
        Self::from_codebook(&cb)
    }

    pub fn from_codebook(cb: &Codebook) -> Result<Self> {
        Self::new(cb.m_size, cb.l_size, cb.words().to_vec())
    }

    pub fn codebook(&self) -> Result<Codebook> {
        Codebook::new(self.n, self.message_dim, self.l_size, self.classical_words.clone())
    }

    pub fn validate(&self) -> Result<()> {
        let count = self.message_dim * self.l_size;
        if self.message_dim == 0 || self.l_size == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("T, lSize and n must be positive".into()));
        }
        for len in [self.classical_words.len(), self.encode_phases.len(), self.decode_phases.len()] {
            if len != count {
                return Err(Error::DimMismatch { expected: count, found: len });
            }
        }
        if self.classical_words.iter().any(|w| w.len() != self.n || w.iter().any(|&b| b > 1)) {
            return Err(Error::InvalidParameter(format!("codewords must be binary strings of length {}", self.n)));
        }
        if self.encode_phases.iter().chain(&self.decode_phases).any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("phases must be finite".into()));
        }
        if self.chosen_j >= self.message_dim {
            return Err(Error::IndexOutOfRange {
                index: self.chosen_j,
                size: self.message_dim,
            });
        }
        Ok(())
    }

    /// `DuplicateWord` if a string repeats within one message.
    pub fn check_distinct_within_messages(&self) -> Result<()> {
        for (m, bin) in self.classical_words.chunks(self.l_size).enumerate() {
            let mut seen = HashSet::new();
            for w in bin {
                if !seen.insert(w) {
                    return Err(Error::DuplicateWord {
                        message: m,
                        word: word_string(w),
                    });
                }
            }
        }
        Ok(())
    }

    /// `true` when no string is shared by two different messages.
    pub fn messages_disjoint(&self) -> bool {
        let mut owner = std::collections::HashMap::new();
        for (k, w) in self.classical_words.iter().enumerate() {
            let m = k / self.l_size;
            if *owner.entry(w).or_insert(m) != m {
                return false;
            }
        }
        true
    }
}

/// `|phi_m> = (1/sqrt(L)) sum_l e^{i t(m,l)} |x^n(m,l)>` on `(C^2)^{⊗n}`.
pub fn build_quantum_codewords(code: &EgToyCode) -> Result<Vec<PureState>> {
    code.validate()?;
    code.check_distinct_within_messages()?;
    let dim = 1usize << code.n;
    let amp = 1.0 / (code.l_size as f64).sqrt();
    code.classical_words
        .chunks(code.l_size)
        .zip(code.encode_phases.chunks(code.l_size))
        .map(|(words, phases)| {
            let mut v = CVector::zeros(dim);
            for (w, &t) in words.iter().zip(phases) {
                let y = w.iter().fold(0usize, |acc, &b| 2 * acc + b as usize);
                v[y] += C64::from_polar(amp, t);
            }
            PureState::normalized(v)
        })
        .collect()
}

/// First seeded Bernoulli(alpha) codebook (over sample indices `0, 1, ...`)
/// whose `T * L` words are pairwise distinct.
pub fn sample_eg_code(n: usize, t: usize, l_size: usize, alpha: f64, seed: u64) -> Result<EgToyCode> {
    const ATTEMPTS: u64 = 4096;
    let cfg = SimConfig::with_alpha(n, alpha, t, l_size, seed)?;
    for index in 0..ATTEMPTS {
        let cb = sample_codebook_indexed(&cfg, index);
        let distinct: HashSet<&Vec<u8>> = cb.words().iter().collect();
        if distinct.len() == cb.len() {
            return EgToyCode::from_codebook(&cb);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no codebook with {} distinct words of length {n} found in {ATTEMPTS} draws",
        t * l_size
    )))
}
