//! Covertness beyond the dense budget for commuting Willie outputs.
//!
//! Positions where every codeword is `0` contribute the same `p0` factor to
//! `rho_bar` and `omega0^{⊗n}`, so relative entropy and the distance to the
//! innocent state only involve the union support `U` of the codewords. The
//! distance to `omega_alpha^{⊗n}` sums the remaining positions over type
//! classes. When `U` is too large, all three are estimated by sampling
//! `y ~ rho_bar`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::codebook::{codeword_stream_key, Codebook, SimConfig};
use super::space::{classical_kl, product_distribution, CommonBasis};
use super::willie::{CovertnessReport, MonteCarloErrors};
use crate::divergence::Divergence;
use crate::error::Result;

/// Work limit (in float products) for the exact union-support evaluation.
const EXACT_WORK: f64 = (1u64 << 26) as f64;

pub(crate) fn covertness(
    cb: &Codebook,
    basis: &CommonBasis,
    cfg: &SimConfig,
    d_reference: f64,
    rhs: f64,
) -> Result<CovertnessReport> {
    let [p0, p1] = &basis.probs;
    let q: Vec<f64> = p0.iter().zip(p1).map(|(a, b)| (1.0 - cfg.alpha) * a + cfg.alpha * b).collect();
    let union: Vec<usize> = (0..cb.n).filter(|&i| cb.words().iter().any(|w| w[i] == 1)).collect();
    let d = p0.len() as f64;
    let rest = cb.n - union.len();
    let strings = d.powi(union.len() as i32);
    let work = strings * (cb.len() as f64 + type_count(p0.len(), rest));
    if work <= EXACT_WORK {
        Ok(exact_union(cb, &union, p0, p1, &q, rest, d_reference, rhs))
    } else {
        Ok(monte_carlo(cb, p0, p1, &q, cfg, d_reference, rhs))
    }
}

fn type_count(d: usize, r: usize) -> f64 {
    // C(r + d - 1, d - 1)
    (1..d).fold(1.0, |acc, k| acc * (r + k) as f64 / k as f64)
}

/// Count vectors over `d` letters summing to `r`.
fn types(d: usize, r: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![r]];
    }
    (0..=r)
        .flat_map(|first| {
            types(d - 1, r - first).into_iter().map(move |mut t| {
                t.insert(0, first);
                t
            })
        })
        .collect()
}

/// `ln(C(r; t) prod_k p_k^{t_k})`, `-inf` if some used letter has `p_k = 0`.
fn log_type_mass(t: &[usize], p: &[f64], log_fact: &[f64]) -> f64 {
    let mut acc = log_fact[t.iter().sum::<usize>()];
    for (&c, &pk) in t.iter().zip(p) {
        if c == 0 {
            continue;
        }
        if pk <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += c as f64 * pk.ln() - log_fact[c];
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn exact_union(
    cb: &Codebook,
    union: &[usize],
    p0: &[f64],
    p1: &[f64],
    q: &[f64],
    rest: usize,
    d_reference: f64,
    rhs: f64,
) -> CovertnessReport {
    let size = p0.len().pow(union.len() as u32);
    let mut p_u = vec![0.0; size];
    for w in cb.words() {
        let letters: Vec<&[f64]> = union.iter().map(|&i| if w[i] == 1 { p1 } else { p0 }).collect();
        p_u.iter_mut().zip(product_distribution(&letters)).for_each(|(a, x)| *a += x);
    }
    let scale = 1.0 / cb.len() as f64;
    p_u.iter_mut().for_each(|a| *a *= scale);
    let q0_u = product_distribution(&vec![p0; union.len()]);
    let qa_u = product_distribution(&vec![q; union.len()]);

    let d_covert = classical_kl(&p_u, &q0_u);
    let to_innocent: f64 = p_u.iter().zip(&q0_u).map(|(a, b)| (a - b).abs()).sum();

    let log_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=rest).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let weights: Vec<(f64, f64)> = types(p0.len(), rest)
        .iter()
        .map(|t| (log_type_mass(t, p0, &log_fact).exp(), log_type_mass(t, q, &log_fact).exp()))
        .collect();
    let mut to_mixed = 0.0;
    for (pu, qu) in p_u.iter().zip(&qa_u) {
        for (w0, wa) in &weights {
            to_mixed += (pu * w0 - qu * wa).abs();
        }
    }
    CovertnessReport::assemble(d_covert, d_reference, to_mixed, to_innocent, rhs, "commuting-union-types")
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn draw_letter(cdf: &[f64], u: f64) -> usize {
    let total = cdf[cdf.len() - 1];
    cdf.iter().position(|&c| u * total < c).unwrap_or(cdf.len() - 1)
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sampling estimates `D = E[ln P/Q0]` and `||P - Q||_1 = 2 E[(1 - Q/P)_+]`
/// with `y ~ P = rho_bar`. `ln P(y)` is `base(y)` plus, per codeword, the log
/// ratios `ln p1/p0` at its ones. The draws use a dedicated stream keyed by
/// `(seed, u64::MAX, u64::MAX, u64::MAX)`.
fn monte_carlo(
    cb: &Codebook,
    p0: &[f64],
    p1: &[f64],
    q: &[f64],
    cfg: &SimConfig,
    d_reference: f64,
    rhs: f64,
) -> CovertnessReport {
    let ln = |x: f64| if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
    let ln_p0: Vec<f64> = p0.iter().map(|&x| ln(x)).collect();
    let ln_q: Vec<f64> = q.iter().map(|&x| ln(x)).collect();
    let delta: Vec<f64> = p0.iter().zip(p1).map(|(&a, &b)| ln(b) - ln(a)).collect();
    let cdf = [cumulative(p0), cumulative(p1)];
    let ones: Vec<Vec<usize>> = cb
        .words()
        .iter()
        .map(|w| (0..w.len()).filter(|&i| w[i] == 1).collect())
        .collect();
    let ln_count = (cb.len() as f64).ln();
    let mut rng = ChaCha8Rng::seed_from_u64(codeword_stream_key(cfg.seed, u64::MAX, u64::MAX, u64::MAX));
    let unit = |rng: &mut ChaCha8Rng| (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);

    let draws = cfg.monte_carlo_draws;
    let (mut kl, mut f0, mut fa) = (Vec::with_capacity(draws), Vec::with_capacity(draws), Vec::with_capacity(draws));
    let mut y = vec![0usize; cb.n];
    let mut terms = vec![0.0; cb.len()];
    for _ in 0..draws {
        let k = rng.random_range(0..cb.len());
        let word = &cb.words()[k];
        for (yi, &b) in y.iter_mut().zip(word) {
            *yi = draw_letter(&cdf[b as usize], unit(&mut rng));
        }
        let base: f64 = y.iter().map(|&l| ln_p0[l]).sum();
        let ln_qa: f64 = y.iter().map(|&l| ln_q[l]).sum();
        for (t, o) in terms.iter_mut().zip(&ones) {
            *t = o.iter().map(|&i| delta[y[i]]).sum();
        }
        // ln P - base, kept relative to base for accuracy
        let excess = log_sum_exp(&terms) - ln_count;
        kl.push(excess);
        f0.push((1.0 - (-excess).exp()).max(0.0));
        fa.push((1.0 - (ln_qa - base - excess).exp()).max(0.0));
    }
    let (d_covert, se_d) = mean_and_se(&kl);
    let (m0, se0) = mean_and_se(&f0);
    let (ma, sea) = mean_and_se(&fa);
    let mut report = CovertnessReport::assemble(
        Divergence::Finite(d_covert.max(0.0)),
        d_reference,
        2.0 * ma,
        2.0 * m0,
        rhs,
        "commuting-monte-carlo",
    );
    report.standard_errors = Some(MonteCarloErrors {
        draws,
        d_covert: se_d,
        trace_dist_to_mixed: 2.0 * sea,
        trace_dist_to_innocent: 2.0 * se0,
    });
    report
}
