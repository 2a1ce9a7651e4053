use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codebook::{sample_codebook_indexed, Codebook, SimConfig};
use super::large_n;
use super::space::{common_eigenbasis, dense_dim, ProductSpace, Repr};
use crate::channel::{mixed_output, BinaryCovertChannel};
use crate::divergence::{distinct_eigenvalue_count, phi, qre, CqEnsemble, Divergence};
use crate::error::{Error, Result};
use crate::operator::{DensityOperator, Tolerances};

fn willie_space(ch: &BinaryCovertChannel, n: usize, tol: &Tolerances, cap: usize) -> Result<ProductSpace> {
    ProductSpace::new(ch.omega0(), ch.omega1(), n, tol, cap, false)
}

/// `(1 / (|M||L|)) sum_{m,l} ⊗_i omega_{c_i(m,l)}`, summed in m-major order.
pub fn willie_average_state(
    cb: &Codebook,
    ch: &BinaryCovertChannel,
    tol: &Tolerances,
    cap: usize,
) -> Result<DensityOperator> {
    let space = willie_space(ch, cb.n, tol, cap)?;
    Ok(space.to_density(&space.average(cb.words())?))
}

/// Willie's state given secret message `m`, averaged over the bin index.
pub fn willie_bin_state(
    cb: &Codebook,
    ch: &BinaryCovertChannel,
    m: usize,
    tol: &Tolerances,
    cap: usize,
) -> Result<DensityOperator> {
    let bin = cb.bin(m)?;
    let space = willie_space(ch, cb.n, tol, cap)?;
    Ok(space.to_density(&space.average(bin)?))
}

/// Monte-Carlo standard errors of the large-blocklength estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MonteCarloErrors {
    pub draws: usize,
    pub d_covert: f64,
    pub trace_dist_to_mixed: f64,
    pub trace_dist_to_innocent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CovertnessReport {
    /// `D(rho_bar || omega0^{⊗n})`.
    pub d_covert: Divergence,
    /// `n D(omega_alpha || omega0)`.
    pub d_reference: f64,
    /// `||rho_bar - omega_alpha^{⊗n}||_1`.
    pub trace_dist_to_mixed: f64,
    /// `||rho_bar - omega0^{⊗n}||_1`.
    pub trace_dist_to_innocent: f64,
    pub helstrom_error: f64,
    /// `(1 - sqrt(d_covert / 2)) / 2`.
    pub pinsker_lower_bound: f64,
    pub resolvability_rhs: f64,
    /// `dense`, `commuting-exact`, `commuting-union-types` or `commuting-monte-carlo`.
    pub method: String,
    pub standard_errors: Option<MonteCarloErrors>,
}

impl CovertnessReport {
    pub(crate) fn assemble(
        d_covert: Divergence,
        d_reference: f64,
        trace_dist_to_mixed: f64,
        trace_dist_to_innocent: f64,
        resolvability_rhs: f64,
        method: &str,
    ) -> Self {
        Self {
            d_covert,
            d_reference,
            trace_dist_to_mixed,
            trace_dist_to_innocent,
            helstrom_error: (0.5 * (1.0 - 0.5 * trace_dist_to_innocent)).clamp(0.0, 0.5),
            pinsker_lower_bound: 0.5 * (1.0 - (0.5 * d_covert.as_f64()).sqrt()),
            resolvability_rhs,
            method: method.into(),
            standard_errors: None,
        }
    }
}

/// Minimizer of the resolvability bound over the `(s, beta)` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolvabilityBound {
    pub rhs: f64,
    pub s: f64,
    pub beta: f64,
    /// Distinct eigenvalues of `omega_alpha^{⊗n}`.
    pub nu: usize,
    pub codewords: usize,
}

/// `beta0 * 10^(k/10)` for `k = -10..=10`; `beta0 = 1` when `alpha n D(omega1||omega0)` is zero.
pub fn default_beta_grid(ch: &BinaryCovertChannel, n: usize, alpha: f64, tol: &Tolerances) -> Result<Vec<f64>> {
    let d_w = qre(ch.omega1(), ch.omega0(), tol)?.as_f64();
    let beta0 = alpha * n as f64 * d_w;
    let beta0 = if beta0 > 0.0 && beta0.is_finite() { beta0 } else { 1.0 };
    Ok((-10..=10).map(|k| beta0 * 10f64.powf(k as f64 / 10.0)).collect())
}

/// `min_{s, beta} 2 sqrt(exp(beta s + n phi(s, alpha))) + sqrt(exp(beta) nu / K)`.
pub fn resolvability_rhs(
    ch: &BinaryCovertChannel,
    n: usize,
    alpha: f64,
    codewords: usize,
    s_grid: &[f64],
    beta_grid: &[f64],
    tol: &Tolerances,
) -> Result<ResolvabilityBound> {
    let ensemble = CqEnsemble::new(
        vec![1.0 - alpha, alpha],
        vec![ch.omega0().clone(), ch.omega1().clone()],
        tol,
    )?;
    let nu = distinct_eigenvalue_count(&ensemble.average(), n, tol);
    let default_grid;
    let betas = if beta_grid.is_empty() {
        default_grid = default_beta_grid(ch, n, alpha, tol)?;
        &default_grid
    } else {
        beta_grid
    };
    let log_ratio = (nu as f64).ln() - (codewords as f64).ln();
    let mut best = ResolvabilityBound {
        rhs: f64::INFINITY,
        s: f64::NAN,
        beta: f64::NAN,
        nu,
        codewords,
    };
    for &s in s_grid {
        let n_phi = n as f64 * phi(s, &ensemble, tol)?;
        for &beta in betas {
            let rhs = 2.0 * (0.5 * (beta * s + n_phi)).exp() + (0.5 * (beta + log_ratio)).exp();
            if rhs < best.rhs {
                best = ResolvabilityBound { rhs, s, beta, nu, codewords };
            }
        }
    }
    Ok(best)
}

fn config_rhs(ch: &BinaryCovertChannel, cfg: &SimConfig, codewords: usize, tol: &Tolerances) -> Result<ResolvabilityBound> {
    resolvability_rhs(ch, cfg.n, cfg.alpha, codewords, &cfg.s_grid, &cfg.beta_grid, tol)
}

/// Covertness metrics of a codebook against Willie.
///
/// Blocklengths within the dense budget are evaluated exactly (as probability
/// vectors when `omega0` and `omega1` commute). Larger blocklengths need
/// `cfg.commuting_fast_path` and commuting Willie outputs.
pub fn covertness_report(
    cb: &Codebook,
    ch: &BinaryCovertChannel,
    cfg: &SimConfig,
    tol: &Tolerances,
) -> Result<CovertnessReport> {
    let d_reference = cfg.n as f64 * qre(&mixed_output(ch, cfg.alpha)?, ch.omega0(), tol)?.as_f64();
    let rhs = config_rhs(ch, cfg, cb.len(), tol)?.rhs;
    match dense_dim(ch.omega0().dim(), cb.n, cfg.max_dense_dim) {
        Ok(_) => {
            let space = willie_space(ch, cb.n, tol, cfg.max_dense_dim)?;
            let avg = space.average(cb.words())?;
            let innocent = space.mixture_power(0.0);
            let mixed = space.mixture_power(cfg.alpha);
            let method = if space.is_commuting() { "commuting-exact" } else { "dense" };
            Ok(CovertnessReport::assemble(
                space.relative_entropy(&avg, &innocent)?,
                d_reference,
                space.trace_distance(&avg, &mixed),
                space.trace_distance(&avg, &innocent),
                rhs,
                method,
            ))
        }
        Err(budget) => {
            if !cfg.commuting_fast_path {
                return Err(budget);
            }
            let basis = common_eigenbasis(ch.omega0(), ch.omega1(), tol).ok_or(budget)?;
            large_n::covertness(cb, &basis, cfg, d_reference, rhs)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SecrecyReport {
    /// `||rho_W^{(m)} - omega_alpha^{⊗n}||_1` per secret message.
    pub per_bin_distances: Vec<f64>,
    pub average_leakage: f64,
}

pub fn secrecy_report(
    cb: &Codebook,
    ch: &BinaryCovertChannel,
    cfg: &SimConfig,
    tol: &Tolerances,
) -> Result<SecrecyReport> {
    let space = willie_space(ch, cb.n, tol, cfg.max_dense_dim)?;
    let target = space.mixture_power(cfg.alpha);
    let per_bin_distances = (0..cb.m_size)
        .map(|m| Ok(space.trace_distance(&space.average(cb.bin(m)?)?, &target)))
        .collect::<Result<Vec<_>>>()?;
    let average_leakage = per_bin_distances.iter().sum::<f64>() / per_bin_distances.len() as f64;
    Ok(SecrecyReport {
        per_bin_distances,
        average_leakage,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolvabilityResult {
    pub empirical_mean_distance: f64,
    pub standard_error: f64,
    pub rhs: f64,
    pub holds: bool,
    pub samples: usize,
    pub codewords: usize,
    pub best_s: f64,
    pub best_beta: f64,
    pub nu: usize,
}

/// Mean over `cfg.samples` seeded codebooks of `||avg_k omega_{c(k)} - omega_alpha^{⊗n}||_1`,
/// with all `mSize * lSize` codewords forming the set `K`. Samples run in
/// parallel; the mean is reduced in sample order.
pub fn resolvability_experiment(
    cfg: &SimConfig,
    ch: &BinaryCovertChannel,
    tol: &Tolerances,
) -> Result<ResolvabilityResult> {
    cfg.validate()?;
    let space = willie_space(ch, cfg.n, tol, cfg.max_dense_dim)?;
    let target = space.mixture_power(cfg.alpha);
    let distances = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|s| {
            let cb = sample_codebook_indexed(cfg, s);
            Ok(space.trace_distance(&space.average(cb.words())?, &target))
        })
        .collect::<Result<Vec<f64>>>()?;
    let count = distances.len() as f64;
    let mean = distances.iter().sum::<f64>() / count;
    let standard_error = if distances.len() > 1 {
        let var = distances.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    let bound = config_rhs(ch, cfg, cfg.codewords(), tol)?;
    Ok(ResolvabilityResult {
        empirical_mean_distance: mean,
        standard_error,
        rhs: bound.rhs,
        holds: mean <= bound.rhs + 3.0 * standard_error,
        samples: cfg.samples,
        codewords: cfg.codewords(),
        best_s: bound.s,
        best_beta: bound.beta,
        nu: bound.nu,
    })
}

/// Dense evaluation with the commuting shortcut disabled (reference path).
pub fn willie_average_state_dense(
    cb: &Codebook,
    ch: &BinaryCovertChannel,
    tol: &Tolerances,
    cap: usize,
) -> Result<DensityOperator> {
    let space = ProductSpace::new(ch.omega0(), ch.omega1(), cb.n, tol, cap, true)?;
    match space.average(cb.words())? {
        Repr::Dense(m) => Ok(DensityOperator::from_trusted(m)),
        Repr::Diagonal(_) => Err(Error::InvalidParameter("dense path expected".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_covert_channel, excitation_channel};
    use crate::divergence::helstrom_error;
    use crate::operator::{max_abs, tensor_all, tensor_power, trace_norm};
    use crate::random::random_density;
    use crate::sim::codebook::{otp_encode, sample_codebook, DEFAULT_MAX_DENSE_DIM};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const CAP: usize = DEFAULT_MAX_DENSE_DIM;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn excitation(g: f64) -> BinaryCovertChannel {
        build_covert_channel(&excitation_channel(g).unwrap().to_stinespring(), &tol()).unwrap()
    }

    fn noncommuting(seed: u64) -> BinaryCovertChannel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = tol();
        let s = [random_density(2, 2, &mut rng), random_density(2, 2, &mut rng)];
        let w = [random_density(2, 2, &mut rng), random_density(2, 2, &mut rng)];
        BinaryCovertChannel::new(s[0].clone(), s[1].clone(), w[0].clone(), w[1].clone(), &t).unwrap()
    }

    #[test]
    fn all_zero_codeword_gives_innocent_state() {
        let ch = excitation(0.25);
        let cb = Codebook::from_strings(1, 1, &["0000"]).unwrap();
        let rho = willie_average_state(&cb, &ch, &tol(), CAP).unwrap();
        let expected = tensor_power(ch.omega0().matrix(), 4);
        assert!(max_abs(&(rho.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn full_population_gives_half_mixture() {
        for ch in [excitation(0.25), noncommuting(1)] {
            let n = 3;
            let words: Vec<String> = (0..(1 << n)).map(|i| format!("{i:03b}")).collect();
            let refs: Vec<&str> = words.iter().map(String::as_str).collect();
            let cb = Codebook::from_strings(1, 8, &refs).unwrap();
            let rho = willie_average_state(&cb, &ch, &tol(), CAP).unwrap();
            let half = mixed_output(&ch, 0.5).unwrap();
            assert!(max_abs(&(rho.matrix() - tensor_power(half.matrix(), n))) < 1e-14);
        }
    }

    #[test]
    fn two_word_average() {
        let ch = noncommuting(2);
        let (w0, w1) = (ch.omega0().matrix(), ch.omega1().matrix());
        let cb = Codebook::from_strings(1, 2, &["00", "11"]).unwrap();
        let rho = willie_average_state(&cb, &ch, &tol(), CAP).unwrap();
        let expected = (tensor_all([w0, w0]) + tensor_all([w1, w1])).scale(0.5);
        assert!(max_abs(&(rho.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn bin_state_examples() {
        let ch = noncommuting(3);
        let (w0, w1) = (ch.omega0().matrix(), ch.omega1().matrix());
        let cb = Codebook::from_strings(2, 2, &["00", "11", "01", "10"]).unwrap();
        let bin1 = willie_bin_state(&cb, &ch, 1, &tol(), CAP).unwrap();
        let expected = (tensor_all([w0, w1]) + tensor_all([w1, w0])).scale(0.5);
        assert!(max_abs(&(bin1.matrix() - expected)) < 1e-15);
        let single = Codebook::from_strings(2, 1, &["01", "10"]).unwrap();
        let b0 = willie_bin_state(&single, &ch, 0, &tol(), CAP).unwrap();
        assert!(max_abs(&(b0.matrix() - tensor_all([w0, w1]))) < 1e-15);
        let same = Codebook::from_strings(1, 3, &["10", "10", "10"]).unwrap();
        let b = willie_bin_state(&same, &ch, 0, &tol(), CAP).unwrap();
        assert!(max_abs(&(b.matrix() - tensor_all([w1, w0]))) < 1e-15);
        assert!(matches!(willie_bin_state(&cb, &ch, 2, &tol(), CAP), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn budget_exceeded_for_large_dense_n() {
        let ch = noncommuting(4);
        let cfg = SimConfig::with_alpha(13, 0.1, 1, 1, 0).unwrap();
        let cb = sample_codebook(&cfg);
        assert!(matches!(
            willie_average_state(&cb, &ch, &tol(), CAP),
            Err(Error::BudgetExceeded { dim: 8192, cap: 4096 })
        ));
    }

    #[test]
    fn fast_path_matches_dense_path() {
        let ch = excitation(0.25);
        for n in [2, 5, 8] {
            let cfg = SimConfig::with_alpha(n, 0.3, 4, 4, 11).unwrap();
            let cb = sample_codebook(&cfg);
            let fast = willie_average_state(&cb, &ch, &tol(), CAP).unwrap();
            let dense = willie_average_state_dense(&cb, &ch, &tol(), CAP).unwrap();
            assert!(max_abs(&(fast.matrix() - dense.matrix())) < 1e-10);
        }
    }

    #[test]
    fn averaged_states_are_valid() {
        let ch = noncommuting(5);
        let cfg = SimConfig::with_alpha(5, 0.4, 3, 3, 8).unwrap();
        let rho = willie_average_state(&sample_codebook(&cfg), &ch, &tol(), CAP).unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(rho.eigh().values.iter().all(|&x| x > -tol().psd_tol));
    }

    #[test]
    fn covertness_all_zero_codebook() {
        let ch = excitation(0.25);
        let cfg = SimConfig::with_alpha(4, 0.25, 2, 2, 1).unwrap();
        let cb = Codebook::from_strings(2, 2, &["0000"; 4]).unwrap();
        let r = covertness_report(&cb, &ch, &cfg, &tol()).unwrap();
        assert_eq!(r.d_covert, Divergence::Finite(0.0));
        assert_eq!(r.helstrom_error, 0.5);
    }

    #[test]
    fn covertness_reference_instance() {
        let t = tol();
        let ch = excitation(0.25);
        let cfg = SimConfig::with_alpha(8, 0.25, 16, 16, 42).unwrap();
        let cb = sample_codebook(&cfg);
        let r = covertness_report(&cb, &ch, &cfg, &t).unwrap();
        assert!(r.helstrom_error >= r.pinsker_lower_bound);
        // additivity against the explicit 256-dimensional product pair
        let wa = mixed_output(&ch, 0.25).unwrap();
        let dense = qre(&wa.tensor_power(8), &ch.omega0().tensor_power(8), &t).unwrap().as_f64();
        assert!((r.d_reference - dense).abs() < 1e-9);
        assert!(0.5 * r.trace_dist_to_innocent <= (0.5 * r.d_covert.as_f64()).sqrt());
        let rho = willie_average_state(&cb, &ch, &t, CAP).unwrap();
        let h = helstrom_error(&rho, &ch.omega0().tensor_power(8)).unwrap();
        assert!((h - r.helstrom_error).abs() < 1e-12);
    }

    #[test]
    fn dense_and_commuting_reports_agree() {
        let t = tol();
        let ch = excitation(0.3);
        let cfg = SimConfig::with_alpha(6, 0.3, 4, 2, 3).unwrap();
        let cb = sample_codebook(&cfg);
        let fast = covertness_report(&cb, &ch, &cfg, &t).unwrap();
        assert_eq!(fast.method, "commuting-exact");
        let rho = willie_average_state_dense(&cb, &ch, &t, CAP).unwrap();
        let innocent = ch.omega0().tensor_power(6);
        let mixed = mixed_output(&ch, 0.3).unwrap().tensor_power(6);
        let d = qre(&rho, &innocent, &t).unwrap().as_f64();
        assert!((fast.d_covert.as_f64() - d).abs() < 1e-10);
        let tm = trace_norm(&(rho.matrix() - mixed.matrix()));
        assert!((fast.trace_dist_to_mixed - tm).abs() < 1e-10);
    }

    #[test]
    fn noncommuting_report_is_dense() {
        let ch = noncommuting(6);
        let cfg = SimConfig::with_alpha(4, 0.3, 2, 2, 3).unwrap();
        let r = covertness_report(&sample_codebook(&cfg), &ch, &cfg, &tol()).unwrap();
        assert_eq!(r.method, "dense");
        assert!(r.helstrom_error >= r.pinsker_lower_bound);
    }

    #[test]
    fn secrecy_examples() {
        let t = tol();
        let ch = excitation(0.25);
        let mut cfg = SimConfig::with_alpha(3, 0.2, 2, 1, 0).unwrap();
        let cb = Codebook::from_strings(2, 1, &["000", "000"]).unwrap();
        let r = secrecy_report(&cb, &ch, &cfg, &t).unwrap();
        // diagonal oracle: ||p0^{⊗3} - q^{⊗3}||_1 with q = (0.8, 0.2)
        let (p, q) = ([0.75, 0.25], [0.8, 0.2]);
        let mut oracle = 0.0;
        for y in 0..8 {
            let bits = [(y >> 2) & 1, (y >> 1) & 1, y & 1];
            let a: f64 = bits.iter().map(|&b| p[b]).product();
            let c: f64 = bits.iter().map(|&b| q[b]).product();
            oracle += (a - c).abs();
        }
        assert!((r.per_bin_distances[0] - oracle).abs() < 1e-14);
        assert_eq!(r.per_bin_distances[0], r.per_bin_distances[1]);
        assert!((r.average_leakage - oracle).abs() < 1e-14);

        cfg.m_size = 3;
        let cb = Codebook::from_strings(3, 2, &["001", "100", "110", "000", "011", "111"]).unwrap();
        let r = secrecy_report(&cb, &ch, &cfg, &t).unwrap();
        let mean = r.per_bin_distances.iter().sum::<f64>() / 3.0;
        assert!((r.average_leakage - mean).abs() < 1e-15);
    }

    #[test]
    fn otp_averaging_hides_second_message() {
        let t = tol();
        let ch = noncommuting(7);
        let cfg = SimConfig::with_alpha(3, 0.4, 2, 3, 5).unwrap();
        let cb = sample_codebook(&cfg);
        let space = ProductSpace::new(ch.omega0(), ch.omega1(), 3, &t, CAP, false).unwrap();
        for m in 0..2 {
            let bin = space.to_matrix(&space.average(cb.bin(m).unwrap()).unwrap());
            for m2 in 0..3 {
                let words: Vec<Vec<u8>> = (0..3).map(|k| otp_encode(m, m2, k, &cb).unwrap().to_vec()).collect();
                let keyed = space.to_matrix(&space.average(&words).unwrap());
                assert!(max_abs(&(keyed - &bin)) < 1e-15);
            }
        }
    }

    #[test]
    fn resolvability_alpha_zero() {
        let ch = excitation(0.25);
        let mut cfg = SimConfig::with_alpha(6, 0.0, 2, 2, 1).unwrap();
        cfg.samples = 4;
        let r = resolvability_experiment(&cfg, &ch, &tol()).unwrap();
        assert_eq!(r.empirical_mean_distance, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn resolvability_rhs_reference_values() {
        let ch = excitation(0.25);
        let t = tol();
        let grid = crate::sim::DEFAULT_S_GRID;
        for (k, expected) in [(16, 2.794), (64, 2.014), (256, 1.429)] {
            let b = resolvability_rhs(&ch, 8, 0.25, k, &grid, &[], &t).unwrap();
            assert!((b.rhs - expected).abs() < 5e-3, "K={k}: {}", b.rhs);
            assert_eq!(b.nu, 9);
        }
    }
}
