//! Information measures between density operators. Logarithms are natural.
//!
//! Relative entropies return [`Divergence`], which carries `+∞` as an explicit
//! variant when the support condition fails.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::{cluster_runs, eigh, trace_norm, CMatrix, DensityOperator, Eigh, Tolerances};

/// A divergence value: finite or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }

    /// `+∞` maps to `f64::INFINITY`; for arithmetic only, never for storage.
    pub fn as_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

/// JSON: a number, or the string `"inf"`.
impl Serialize for Divergence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Divergence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Self::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(Self::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad divergence {s:?}"))),
        }
    }
}

/// Probability vector over a finite alphabet paired with one state per symbol.
#[derive(Debug, Clone)]
pub struct CqEnsemble {
    probs: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl CqEnsemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityOperator>, tol: &Tolerances) -> Result<Self> {
        if probs.is_empty() || probs.len() != states.len() {
            return Err(Error::DimMismatch {
                expected: probs.len(),
                found: states.len(),
            });
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0)
            || (probs.iter().sum::<f64>() - 1.0).abs() > tol.trace_tol
        {
            return Err(Error::InvalidParameter(
                "ensemble probabilities must be nonnegative and sum to 1".into(),
            ));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { probs, states })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    /// `sum_x p(x) omega_x`.
    pub fn average(&self) -> DensityOperator {
        let dim = self.states[0].dim();
        let m = self
            .probs
            .iter()
            .zip(&self.states)
            .fold(CMatrix::zeros(dim, dim), |acc, (p, s)| acc + s.matrix().scale(*p));
        DensityOperator::from_trusted(m)
    }
}

fn same_dim(a: &DensityOperator, b: &DensityOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `supp(inner) ⊆ supp(outer)`: every eigenvector of `inner` above
/// `support_tol` keeps all but `sqrt(support_tol)` of its norm when projected
/// onto the eigenvectors of `outer` above `support_tol`.
pub fn support_contained(inner: &Eigh, outer: &Eigh, tol: &Tolerances) -> bool {
    let outer_support = outer.support_indices(tol.support_tol);
    let basis = outer.vectors.select_columns(&outer_support);
    let threshold = tol.support_tol.sqrt();
    inner.support_indices(tol.support_tol).into_iter().all(|k| {
        let v = inner.vector(k);
        let coeffs = basis.adjoint() * &v;
        let residual = (&v - &basis * coeffs).norm();
        residual < threshold
    })
}

/// Umegaki relative entropy `tr[rho (log rho - log sigma)]`.
pub fn qre(rho: &DensityOperator, sigma: &DensityOperator, tol: &Tolerances) -> Result<Divergence> {
    same_dim(rho, sigma)?;
    let er = rho.eigh();
    let es = sigma.eigh();
    if !support_contained(&er, &es, tol) {
        return Ok(Divergence::Infinite);
    }
    let neg_entropy: f64 = er
        .values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum();
    // tr[rho log sigma] = sum_j log(mu_j) <s_j|rho|s_j> over supp(sigma)
    let cross: f64 = es
        .support_indices(tol.support_tol)
        .into_iter()
        .map(|j| {
            let s = es.vector(j);
            let weight = s.dotc(&(rho.matrix() * &s)).re;
            weight * es.values[j].ln()
        })
        .sum();
    Ok(Divergence::Finite((neg_entropy - cross).max(0.0)))
}

/// Spectral form of the chi-square (eta) divergence
/// `sum_{a,b} |<a|rho - sigma|b>|^2 g(lambda_a, lambda_b)` in the eigenbasis
/// of `sigma`, where `g` is the divided difference of `log` and `1/lambda`
/// inside one eigenvalue cluster.
pub fn chi_square(rho: &DensityOperator, sigma: &DensityOperator, tol: &Tolerances) -> Result<f64> {
    same_dim(rho, sigma)?;
    let es = sigma.eigh();
    let min = es.values.last().copied().unwrap_or(0.0);
    if min <= tol.support_tol {
        return Err(Error::SingularReference { min_eigenvalue: min });
    }
    let dim = es.dim();
    let mut cluster_of = vec![0usize; dim];
    let mut cluster_value = Vec::new();
    for (c, (start, end)) in cluster_runs(&es.values, tol.cluster_tol).into_iter().enumerate() {
        cluster_of[start..end].iter_mut().for_each(|x| *x = c);
        cluster_value.push(es.values[start..end].iter().sum::<f64>() / (end - start) as f64);
    }
    let delta = rho.matrix() - sigma.matrix();
    let rotated = es.vectors.adjoint() * delta * &es.vectors;
    let mut total = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let (ca, cb) = (cluster_of[a], cluster_of[b]);
            let (la, lb) = (cluster_value[ca], cluster_value[cb]);
            let g = if ca == cb {
                1.0 / la
            } else {
                (la.ln() - lb.ln()) / (la - lb)
            };
            total += rotated[(a, b)].norm_sqr() * g;
        }
    }
    Ok(total.max(0.0))
}

/// Classical chi-square `sum (p - q)^2 / q`.
pub fn chi_square_commuting(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimMismatch {
            expected: q.len(),
            found: p.len(),
        });
    }
    if let Some(&min) = q.iter().find(|&&x| x <= 0.0) {
        return Err(Error::SingularReference { min_eigenvalue: min });
    }
    Ok(p.iter().zip(q).map(|(p, q)| (p - q) * (p - q) / q).sum())
}

/// Sum of the positive eigenvalues of `rho - gamma * sigma`, `gamma >= 1`.
pub fn hockey_stick(rho: &DensityOperator, sigma: &DensityOperator, gamma: f64) -> Result<f64> {
    if !(gamma >= 1.0) || !gamma.is_finite() {
        return Err(Error::InvalidGamma(gamma));
    }
    same_dim(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix().scale(gamma);
    Ok(eigh(&diff).values.iter().filter(|&&v| v > 0.0).sum())
}

/// Petz-Rényi divergence `log tr[rho^s sigma^(1-s)] / (s - 1)`, powers taken on
/// the supports.
///
/// For `s > 1` a support violation gives `+∞`; for `s < 1` an empty overlap
/// of the supports gives `+∞`. For `s < 0` the value may be negative.
pub fn petz_renyi(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    s: f64,
    tol: &Tolerances,
) -> Result<Divergence> {
    same_dim(rho, sigma)?;
    if s == 1.0 || !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Rényi order must be finite and != 1, got {s}"
        )));
    }
    let er = rho.eigh();
    let es = sigma.eigh();
    if s > 1.0 && !support_contained(&er, &es, tol) {
        return Ok(Divergence::Infinite);
    }
    let q = power_overlap(&er, s, &es, 1.0 - s, tol.support_tol);
    if q <= 0.0 {
        return Ok(Divergence::Infinite);
    }
    Ok(Divergence::Finite(q.ln() / (s - 1.0)))
}

/// `tr[A^a B^b]` with powers restricted to eigenvalues above `floor`.
fn power_overlap(ea: &Eigh, a: f64, eb: &Eigh, b: f64, floor: f64) -> f64 {
    let ia = ea.support_indices(floor);
    let ib = eb.support_indices(floor);
    let overlaps = ea.vectors.select_columns(&ia).adjoint() * eb.vectors.select_columns(&ib);
    let mut total = 0.0;
    for (r, &i) in ia.iter().enumerate() {
        let wa = ea.values[i].powf(a);
        for (c, &j) in ib.iter().enumerate() {
            total += wa * eb.values[j].powf(b) * overlaps[(r, c)].norm_sqr();
        }
    }
    total
}

/// `phi(s, p) = log sum_x p(x) tr[omega_x^(1-s) omega_p^s]` for `s <= 0`.
pub fn phi(s: f64, ensemble: &CqEnsemble, tol: &Tolerances) -> Result<f64> {
    if !(s <= 0.0) {
        return Err(Error::InvalidParameter(format!("phi needs s <= 0, got {s}")));
    }
    let ep = ensemble.average().eigh();
    let total: f64 = ensemble
        .probs
        .iter()
        .zip(&ensemble.states)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, w)| p * power_overlap(&w.eigh(), 1.0 - s, &ep, s, tol.support_tol))
        .sum();
    Ok(total.ln())
}

/// Minimum error of discriminating two equiprobable states, `(1 - ||rho - sigma||_1 / 2) / 2`.
pub fn helstrom_error(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_dim(rho, sigma)?;
    let half_dist = 0.5 * trace_norm(&(rho.matrix() - sigma.matrix()));
    Ok((0.5 * (1.0 - half_dist)).clamp(0.0, 0.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinskerCheck {
    pub lhs: f64,
    /// `+∞` when the relative entropy is infinite.
    pub rhs: f64,
    pub holds: bool,
}

/// `||rho - sigma||_1 / 2 <= sqrt(D(rho||sigma) / 2)`.
pub fn pinsker_check(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    tol: &Tolerances,
) -> Result<PinskerCheck> {
    let lhs = 0.5 * trace_norm(&(rho.matrix() - sigma.matrix()));
    let rhs = (0.5 * qre(rho, sigma, tol)?.as_f64()).sqrt();
    Ok(PinskerCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}

/// Number of distinct eigenvalues of `omega^{⊗n}`.
///
/// Eigenvalues of `omega` are clustered with `cluster_tol`; products are
/// enumerated per type (multiset of cluster indices) and merged when their
/// logarithms agree within `cluster_tol`. All products containing a zero
/// eigenvalue count as the single value 0.
pub fn distinct_eigenvalue_count(omega: &DensityOperator, n: usize, tol: &Tolerances) -> usize {
    let e = omega.eigh();
    let mut levels: Vec<f64> = cluster_runs(&e.values, tol.cluster_tol)
        .into_iter()
        .map(|(s, t)| e.values[s..t].iter().sum::<f64>() / (t - s) as f64)
        .collect();
    let has_zero = levels.iter().any(|&v| v <= tol.cluster_tol);
    levels.retain(|&v| v > tol.cluster_tol);
    if n == 0 {
        return 1;
    }
    let logs: Vec<f64> = levels.iter().map(|v| v.ln()).collect();
    let mut products = Vec::new();
    let mut counts = vec![0usize; logs.len()];
    enumerate_types(&logs, n, 0, &mut counts, &mut products);
    products.sort_by(|a, b| b.total_cmp(a));
    let distinct = cluster_runs(&products, tol.cluster_tol).len();
    distinct + usize::from(has_zero)
}

fn enumerate_types(logs: &[f64], remaining: usize, k: usize, counts: &mut [usize], out: &mut Vec<f64>) {
    if logs.is_empty() {
        return;
    }
    if k + 1 == logs.len() {
        counts[k] = remaining;
        out.push(counts.iter().zip(logs).map(|(&c, l)| c as f64 * l).sum());
        return;
    }
    for c in 0..=remaining {
        counts[k] = c;
        enumerate_types(logs, remaining - c, k + 1, counts, out);
    }
}
