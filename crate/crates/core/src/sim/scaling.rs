use serde::{Deserialize, Serialize};

use super::space::{classical_kl, common_eigenbasis};
use crate::channel::{mixed_output, BinaryCovertChannel};
use crate::divergence::{chi_square, qre};
use crate::error::Result;
use crate::operator::Tolerances;

/// One blocklength of the square-root-law scaling study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalingPoint {
    pub n: usize,
    pub alpha: f64,
    /// `n D(omega_alpha || omega0)` with `alpha = gamma / sqrt(n)`.
    pub n_divergence: f64,
    /// `gamma^2 chi^2(omega1 || omega0) / 2`.
    pub limit: f64,
    pub relative_deviation: f64,
}

/// `n D(omega_{gamma/sqrt(n)} || omega0)` for each `n`, by additivity. Commuting
/// outputs use the classical letter distributions; otherwise single-letter `qre`.
pub fn covertness_scaling(
    ch: &BinaryCovertChannel,
    gamma: f64,
    ns: &[usize],
    tol: &Tolerances,
) -> Result<Vec<ScalingPoint>> {
    let limit = 0.5 * gamma * gamma * chi_square(ch.omega1(), ch.omega0(), tol)?;
    let basis = common_eigenbasis(ch.omega0(), ch.omega1(), tol);
    ns.iter()
        .map(|&n| {
            let alpha = gamma / (n as f64).sqrt();
            let d = match &basis {
                Some(b) => {
                    let q: Vec<f64> = b.probs[0]
                        .iter()
                        .zip(&b.probs[1])
                        .map(|(p0, p1)| (1.0 - alpha) * p0 + alpha * p1)
                        .collect();
                    classical_kl(&q, &b.probs[0]).as_f64()
                }
                None => qre(&mixed_output(ch, alpha)?, ch.omega0(), tol)?.as_f64(),
            };
            let n_divergence = n as f64 * d;
            Ok(ScalingPoint {
                n,
                alpha,
                n_divergence,
                limit,
                relative_deviation: (n_divergence - limit).abs() / limit,
            })
        })
        .collect()
}

/// `D(q^{⊗n} || p^{⊗n})` summed over type classes; equals `n D(q || p)`.
pub fn type_class_relative_entropy(q: &[f64], p: &[f64], n: usize) -> f64 {
    assert_eq!(q.len(), p.len());
    let log_fact: Vec<f64> = (0..=n)
        .scan(0.0, |acc, i| {
            if i > 0 {
                *acc += (i as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    let mut total = 0.0;
    let mut t = vec![0usize; q.len()];
    visit_types(&mut t, 0, n, &mut |t| {
        let mut log_mass = log_fact[n];
        let mut log_ratio = 0.0;
        for ((&c, &qk), &pk) in t.iter().zip(q).zip(p) {
            if c == 0 {
                continue;
            }
            if qk <= 0.0 {
                return;
            }
            log_mass += c as f64 * qk.ln() - log_fact[c];
            log_ratio += c as f64 * (qk / pk).ln();
        }
        total += log_mass.exp() * log_ratio;
    });
    total
}

fn visit_types(t: &mut [usize], k: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if k + 1 == t.len() {
        t[k] = left;
        f(t);
        return;
    }
    for c in 0..=left {
        t[k] = c;
        visit_types(t, k + 1, left - c, f);
    }
}
