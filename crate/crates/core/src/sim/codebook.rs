use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default dense-dimension budget (`2^12` for qubit outputs).
pub const DEFAULT_MAX_DENSE_DIM: usize = 4096;

/// Default exponents `s` searched by the resolvability bound.
pub const DEFAULT_S_GRID: [f64; 5] = [-1.0, -0.5, -0.25, -0.1, -0.05];

/// Parameters of one covert-coding experiment.
///
/// `alpha = gamma / sqrt(n)` is the Bernoulli weight of a codeword bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimConfig {
    pub n: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub m_size: usize,
    pub l_size: usize,
    pub seed: u64,
    pub samples: usize,
    pub s_grid: Vec<f64>,
    /// Empty means the default log-spaced grid around `alpha n D(omega1||omega0)`.
    pub beta_grid: Vec<f64>,
    /// `None` means `alpha n D(sigma1||sigma0) / 2`.
    pub a_threshold: Option<f64>,
    pub max_dense_dim: usize,
    /// Allows covertness-only evaluation beyond `max_dense_dim` when Willie's
    /// outputs commute.
    #[serde(default)]
    pub commuting_fast_path: bool,
    /// Draws per estimate when the large-blocklength path falls back to sampling.
    #[serde(default = "default_mc_draws")]
    pub monte_carlo_draws: usize,
}

/// Default number of Monte-Carlo draws.
pub const DEFAULT_MC_DRAWS: usize = 20_000;

fn default_mc_draws() -> usize {
    DEFAULT_MC_DRAWS
}

impl SimConfig {
    pub fn new(n: usize, gamma: f64, m_size: usize, l_size: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("blocklength must be positive".into()));
        }
        Self::with_alpha(n, gamma / (n as f64).sqrt(), m_size, l_size, seed)
    }

    /// Fixes `alpha` directly; `gamma` is set to `alpha sqrt(n)`.
    pub fn with_alpha(n: usize, alpha: f64, m_size: usize, l_size: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            n,
            gamma: alpha * (n as f64).sqrt(),
            alpha,
            m_size,
            l_size,
            seed,
            samples: 1,
            s_grid: DEFAULT_S_GRID.to_vec(),
            beta_grid: Vec::new(),
            a_threshold: None,
            max_dense_dim: DEFAULT_MAX_DENSE_DIM,
            commuting_fast_path: false,
            monte_carlo_draws: DEFAULT_MC_DRAWS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m_size == 0 || self.l_size == 0 || self.samples == 0 || self.monte_carlo_draws == 0 {
            return Err(Error::InvalidParameter(
                "n, mSize, lSize, samples and monteCarloDraws must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha = gamma / sqrt(n) must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.s_grid.is_empty() || self.s_grid.iter().any(|s| !(*s < 0.0)) {
            return Err(Error::InvalidParameter("sGrid must be nonempty and negative".into()));
        }
        if self.beta_grid.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter("betaGrid must be finite".into()));
        }
        Ok(())
    }

    pub fn codewords(&self) -> usize {
        self.m_size * self.l_size
    }
}

/// Binary codewords indexed by `(m, l)`, stored m-major (`m * l_size + l`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Codebook {
    pub n: usize,
    pub m_size: usize,
    pub l_size: usize,
    #[serde(with = "word_strings")]
    words: Vec<Vec<u8>>,
}

pub(crate) mod word_strings {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(words: &[Vec<u8>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(words.iter().map(|w| super::word_string(w)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<u8>>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| {
                s.bytes()
                    .map(|b| match b {
                        b'0' => Ok(0),
                        b'1' => Ok(1),
                        _ => Err(D::Error::custom("codeword must be a 0/1 string")),
                    })
                    .collect()
            })
            .collect()
    }
}

pub(crate) fn word_string(w: &[u8]) -> String {
    w.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

impl Codebook {
    /// `words` in m-major order; every word has length `n` over `{0, 1}`.
    pub fn new(n: usize, m_size: usize, l_size: usize, words: Vec<Vec<u8>>) -> Result<Self> {
        if m_size == 0 || l_size == 0 || words.len() != m_size * l_size {
            return Err(Error::DimMismatch {
                expected: m_size * l_size,
                found: words.len(),
            });
        }
        if let Some(bad) = words.iter().find(|w| w.len() != n || w.iter().any(|&b| b > 1)) {
            return Err(Error::InvalidParameter(format!(
                "codeword {bad:?} is not a binary string of length {n}"
            )));
        }
        Ok(Self {
            n,
            m_size,
            l_size,
            words,
        })
    }

    /// Parses `"0101"`-style strings.
    pub fn from_strings(m_size: usize, l_size: usize, words: &[&str]) -> Result<Self> {
        let n = words.first().map(|w| w.len()).unwrap_or(0);
        let parsed = words
            .iter()
            .map(|w| w.bytes().map(|b| b.wrapping_sub(b'0')).collect())
            .collect();
        Self::new(n, m_size, l_size, parsed)
    }

    pub fn word(&self, m: usize, l: usize) -> Result<&[u8]> {
        if m >= self.m_size {
            return Err(Error::IndexOutOfRange {
                index: m,
                size: self.m_size,
            });
        }
        if l >= self.l_size {
            return Err(Error::IndexOutOfRange {
                index: l,
                size: self.l_size,
            });
        }
        Ok(&self.words[m * self.l_size + l])
    }

    /// All words in m-major order.
    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn bin(&self, m: usize) -> Result<&[Vec<u8>]> {
        if m >= self.m_size {
            return Err(Error::IndexOutOfRange {
                index: m,
                size: self.m_size,
            });
        }
        Ok(&self.words[m * self.l_size..(m + 1) * self.l_size])
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream key for codeword `(m, l)` of codebook `sample_index` under `seed`:
/// SplitMix64 folded over the four counters.
pub fn codeword_stream_key(seed: u64, sample_index: u64, m: u64, l: u64) -> u64 {
    [sample_index, m, l]
        .iter()
        .fold(splitmix64(seed), |acc, &x| splitmix64(acc ^ splitmix64(x)))
}

/// Bit `i` of a codeword is the `i`-th draw of a ChaCha8 stream seeded with
/// [`codeword_stream_key`]: `1` iff `(next_u64 >> 11) * 2^-53 < alpha`.
pub fn sample_codeword(seed: u64, sample_index: u64, m: u64, l: u64, n: usize, alpha: f64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(codeword_stream_key(seed, sample_index, m, l));
    (0..n)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            u8::from(u < alpha)
        })
        .collect()
}

/// Codebook number `sample_index` of the experiment described by `cfg`.
pub fn sample_codebook_indexed(cfg: &SimConfig, sample_index: u64) -> Codebook {
    let words = (0..cfg.m_size as u64)
        .flat_map(|m| (0..cfg.l_size as u64).map(move |l| (m, l)))
        .map(|(m, l)| sample_codeword(cfg.seed, sample_index, m, l, cfg.n, cfg.alpha))
        .collect();
    Codebook {
        n: cfg.n,
        m_size: cfg.m_size,
        l_size: cfg.l_size,
        words,
    }
}

/// i.i.d. Bernoulli(alpha) codebook, deterministic in `cfg.seed`.
pub fn sample_codebook(cfg: &SimConfig) -> Codebook {
    sample_codebook_indexed(cfg, 0)
}

/// One-time pad: message `(m, m2)` under key `k` is sent as word `(m, (m2 + k) mod l_size)`.
pub fn otp_encode(m: usize, m2: usize, k: usize, cb: &Codebook) -> Result<&[u8]> {
    for (index, size) in [(m2, cb.l_size), (k, cb.l_size)] {
        if index >= size {
            return Err(Error::IndexOutOfRange { index, size });
        }
    }
    cb.word(m, (m2 + k) % cb.l_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_alphas() {
        let zero = sample_codebook(&SimConfig::with_alpha(6, 0.0, 2, 3, 1).unwrap());
        assert!(zero.words().iter().all(|w| w.iter().all(|&b| b == 0)));
        let one = sample_codebook(&SimConfig::with_alpha(6, 1.0, 2, 3, 1).unwrap());
        assert!(one.words().iter().all(|w| w.iter().all(|&b| b == 1)));
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = SimConfig::with_alpha(8, 0.25, 4, 4, 42).unwrap();
        let a = sample_codebook(&cfg);
        let b = sample_codebook(&cfg);
        assert_eq!(a, b);
        let other = sample_codebook(&SimConfig { seed: 43, ..cfg.clone() });
        assert_ne!(a, other);
        assert_ne!(a, sample_codebook_indexed(&cfg, 1));
    }

    #[test]
    fn codeword_streams_are_independent_of_codebook_shape() {
        let small = sample_codebook(&SimConfig::with_alpha(8, 0.3, 2, 2, 7).unwrap());
        let large = sample_codebook(&SimConfig::with_alpha(8, 0.3, 4, 8, 7).unwrap());
        assert_eq!(small.word(1, 1).unwrap(), large.word(1, 1).unwrap());
    }

    #[test]
    fn bit_frequency_tracks_alpha() {
        let cfg = SimConfig::with_alpha(100, 0.3, 20, 20, 5).unwrap();
        let cb = sample_codebook(&cfg);
        let ones: usize = cb.words().iter().flatten().map(|&b| b as usize).sum();
        let freq = ones as f64 / (100.0 * 400.0);
        assert!((freq - 0.3).abs() < 0.01, "{freq}");
    }

    #[test]
    fn config_from_gamma() {
        let cfg = SimConfig::new(16, 0.8, 2, 2, 0).unwrap();
        assert!((cfg.alpha - 0.2).abs() < 1e-15);
        assert!(SimConfig::new(1, 2.0, 1, 1, 0).is_err());
    }

    #[test]
    fn otp_examples() {
        let cb = Codebook::from_strings(2, 3, &["000", "001", "010", "011", "100", "101"]).unwrap();
        assert_eq!(otp_encode(1, 2, 0, &cb).unwrap(), cb.word(1, 2).unwrap());
        assert_eq!(otp_encode(1, 2, 2, &cb).unwrap(), cb.word(1, 1).unwrap());
        assert_eq!(otp_encode(0, 1, 2, &cb).unwrap(), cb.word(0, 0).unwrap());
        assert!(matches!(otp_encode(0, 0, 3, &cb), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn codebook_json_round_trip() {
        let cb = Codebook::from_strings(1, 2, &["0110", "1000"]).unwrap();
        let text = serde_json::to_string(&cb).unwrap();
        assert!(text.contains("\"0110\""));
        let back: Codebook = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cb);
    }
}
