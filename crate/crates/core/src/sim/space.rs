//! Representations of product-state mixtures on `W^n`.
//!
//! When `omega0` and `omega1` commute, every state built from them is
//! diagonal in the product of a common eigenbasis and is stored as a
//! probability vector over eigen-index strings (first letter most
//! significant). Otherwise states are dense `d^n x d^n` matrices.

use crate::divergence::{qre, Divergence};
use crate::error::{Error, Result};
use crate::operator::{
    eigh, max_abs, tensor_all, tensor_power, trace_norm, CMatrix, DensityOperator, Tolerances,
    C64,
};

/// Shared eigenbasis `u` of two commuting states with their eigenvalues
/// `probs[x][k] = <u_k| state_x |u_k>`.
#[derive(Debug, Clone)]
pub struct CommonBasis {
    pub u: CMatrix,
    /// `true` when `u` is the identity (both states already diagonal).
    pub computational: bool,
    pub probs: [Vec<f64>; 2],
}

fn diagonal_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

fn letter_probs(m: &CMatrix, tol: &Tolerances) -> Vec<f64> {
    (0..m.nrows())
        .map(|k| {
            let p = m[(k, k)].re;
            if p <= tol.support_tol {
                0.0
            } else {
                p
            }
        })
        .collect()
}

/// Common eigenbasis of `a` and `b`, or `None` if they do not commute.
/// Letter probabilities at or below `support_tol` are set to zero.
pub fn common_eigenbasis(a: &DensityOperator, b: &DensityOperator, tol: &Tolerances) -> Option<CommonBasis> {
    let (ma, mb) = (a.matrix(), b.matrix());
    if max_abs(&(ma * mb - mb * ma)) > tol.herm_tol {
        return None;
    }
    let check = 10.0 * tol.herm_tol;
    if diagonal_defect(ma) <= check && diagonal_defect(mb) <= check {
        return Some(CommonBasis {
            u: CMatrix::identity(a.dim(), a.dim()),
            computational: true,
            probs: [letter_probs(ma, tol), letter_probs(mb, tol)],
        });
    }
    // A generic combination separates the joint eigenspaces.
    const GOLDEN_CONJUGATE: f64 = 0.618_033_988_749_894_9;
    let u = eigh(&(ma + mb.scale(GOLDEN_CONJUGATE))).vectors;
    let ra = u.adjoint() * ma * &u;
    let rb = u.adjoint() * mb * &u;
    if diagonal_defect(&ra) > check || diagonal_defect(&rb) > check {
        return None;
    }
    Some(CommonBasis {
        u,
        computational: false,
        probs: [letter_probs(&ra, tol), letter_probs(&rb, tol)],
    })
}

/// `d^n`, or `BudgetExceeded` above `cap` (also on overflow).
pub fn dense_dim(d: usize, n: usize, cap: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..n {
        dim = match dim.checked_mul(d) {
            Some(x) if x <= cap => x,
            _ => {
                let approx = (d as f64).powi(n as i32);
                return Err(Error::BudgetExceeded {
                    dim: if approx >= usize::MAX as f64 { usize::MAX } else { approx as usize },
                    cap,
                });
            }
        };
    }
    Ok(dim)
}

/// Product distribution `prod_i p_{x_i}(y_i)` over `d^n` strings.
pub fn product_distribution(letters: &[&[f64]]) -> Vec<f64> {
    letters.iter().fold(vec![1.0], |acc, p| {
        let mut out = Vec::with_capacity(acc.len() * p.len());
        for a in &acc {
            out.extend(p.iter().map(|q| a * q));
        }
        out
    })
}

/// A state on `W^n` in one of the two representations.
#[derive(Debug, Clone)]
pub enum Repr {
    Diagonal(Vec<f64>),
    Dense(CMatrix),
}

/// Evaluation context for mixtures of `omega_{x^n}` at blocklength `n`.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    states: [DensityOperator; 2],
    basis: Option<CommonBasis>,
    n: usize,
    dim: usize,
    tol: Tolerances,
}

impl ProductSpace {
    /// Fails with `BudgetExceeded` if `d^n > cap`. `force_dense` disables the
    /// commuting representation.
    pub fn new(
        state0: &DensityOperator,
        state1: &DensityOperator,
        n: usize,
        tol: &Tolerances,
        cap: usize,
        force_dense: bool,
    ) -> Result<Self> {
        let dim = dense_dim(state0.dim(), n, cap)?;
        let basis = if force_dense {
            None
        } else {
            common_eigenbasis(state0, state1, tol)
        };
        Ok(Self {
            states: [state0.clone(), state1.clone()],
            basis,
            n,
            dim,
            tol: *tol,
        })
    }

    pub fn is_commuting(&self) -> bool {
        self.basis.is_some()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `⊗_i omega_{x_i}`.
    pub fn word_state(&self, word: &[u8]) -> Repr {
        match &self.basis {
            Some(b) => {
                let letters: Vec<&[f64]> = word.iter().map(|&x| b.probs[x as usize].as_slice()).collect();
                Repr::Diagonal(product_distribution(&letters))
            }
            None => Repr::Dense(tensor_all(word.iter().map(|&x| self.states[x as usize].matrix()))),
        }
    }

    /// Uniform mixture of the word states, summed in the given order.
    pub fn average(&self, words: &[Vec<u8>]) -> Result<Repr> {
        if words.is_empty() {
            return Err(Error::InvalidParameter("empty set of codewords".into()));
        }
        let scale = 1.0 / words.len() as f64;
        match &self.basis {
            Some(_) => {
                let mut acc = vec![0.0; self.dim];
                for w in words {
                    if let Repr::Diagonal(p) = self.word_state(w) {
                        acc.iter_mut().zip(&p).for_each(|(a, x)| *a += x);
                    }
                }
                acc.iter_mut().for_each(|a| *a *= scale);
                Ok(Repr::Diagonal(acc))
            }
            None => {
                let mut acc = CMatrix::zeros(self.dim, self.dim);
                for w in words {
                    if let Repr::Dense(m) = self.word_state(w) {
                        acc += m;
                    }
                }
                Ok(Repr::Dense(acc.scale(scale)))
            }
        }
    }

    /// `((1 - alpha) omega0 + alpha omega1)^{⊗n}`.
    pub fn mixture_power(&self, alpha: f64) -> Repr {
        match &self.basis {
            Some(b) => {
                let q: Vec<f64> = b.probs[0]
                    .iter()
                    .zip(&b.probs[1])
                    .map(|(p0, p1)| (1.0 - alpha) * p0 + alpha * p1)
                    .collect();
                let letters = vec![q.as_slice(); self.n];
                Repr::Diagonal(product_distribution(&letters))
            }
            None => {
                let m = self.states[0].matrix().scale(1.0 - alpha) + self.states[1].matrix().scale(alpha);
                Repr::Dense(tensor_power(&m, self.n))
            }
        }
    }

    pub fn trace_distance(&self, a: &Repr, b: &Repr) -> f64 {
        match (a, b) {
            (Repr::Diagonal(p), Repr::Diagonal(q)) => p.iter().zip(q).map(|(x, y)| (x - y).abs()).sum(),
            _ => trace_norm(&(self.to_matrix(a) - self.to_matrix(b))),
        }
    }

    pub fn relative_entropy(&self, a: &Repr, b: &Repr) -> Result<Divergence> {
        match (a, b) {
            (Repr::Diagonal(p), Repr::Diagonal(q)) => Ok(classical_kl(p, q)),
            _ => qre(&self.to_density(a), &self.to_density(b), &self.tol),
        }
    }

    /// Matrix in the computational basis.
    pub fn to_matrix(&self, r: &Repr) -> CMatrix {
        match r {
            Repr::Dense(m) => m.clone(),
            Repr::Diagonal(p) => {
                let d = CMatrix::from_diagonal(&crate::operator::CVector::from_iterator(
                    p.len(),
                    p.iter().map(|&x| C64::new(x, 0.0)),
                ));
                let b = self.basis.as_ref().expect("diagonal repr implies a common basis");
                if b.computational {
                    d
                } else {
                    let u = tensor_power(&b.u, self.n);
                    &u * d * u.adjoint()
                }
            }
        }
    }

    pub fn to_density(&self, r: &Repr) -> DensityOperator {
        DensityOperator::from_trusted(self.to_matrix(r))
    }
}

/// `sum p ln(p / q)`; `+∞` if some `p > 0` meets `q = 0`.
pub fn classical_kl(p: &[f64], q: &[f64]) -> Divergence {
    let mut total = 0.0;
    for (&x, &y) in p.iter().zip(q) {
        if x <= 0.0 {
            continue;
        }
        if y <= 0.0 {
            return Divergence::Infinite;
        }
        total += x * (x / y).ln();
    }
    Divergence::Finite(total.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{diag, standard_unitaries};

    #[test]
    fn detects_commuting_pairs() {
        let tol = Tolerances::default();
        let a = DensityOperator::from_diagonal(&[0.75, 0.25], &tol).unwrap();
        let b = DensityOperator::basis(2, 0).unwrap();
        let cb = common_eigenbasis(&a, &b, &tol).unwrap();
        assert!(cb.computational);
        assert_eq!(cb.probs[1], vec![1.0, 0.0]);

        let h = standard_unitaries(2).unwrap().fourier;
        let ra = DensityOperator::new(&h * diag(&[0.75, 0.25]) * h.adjoint(), &tol).unwrap();
        let rb = DensityOperator::new(&h * diag(&[0.1, 0.9]) * h.adjoint(), &tol).unwrap();
        let cb = common_eigenbasis(&ra, &rb, &tol).unwrap();
        assert!(!cb.computational);
        let mut p0 = cb.probs[0].clone();
        p0.sort_by(f64::total_cmp);
        assert!((p0[0] - 0.25).abs() < 1e-12 && (p0[1] - 0.75).abs() < 1e-12);

        assert!(common_eigenbasis(&a, &rb, &tol).is_none());
    }

    #[test]
    fn budget_is_enforced() {
        assert_eq!(dense_dim(2, 12, 4096).unwrap(), 4096);
        assert!(matches!(dense_dim(2, 13, 4096), Err(Error::BudgetExceeded { dim: 8192, cap: 4096 })));
        assert!(matches!(dense_dim(2, 200, 4096), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn product_distribution_ordering() {
        let p = product_distribution(&[&[0.9, 0.1], &[0.3, 0.7]]);
        assert_eq!(p.len(), 4);
        assert!((p[1] - 0.9 * 0.7).abs() < 1e-15);
        assert!((p[2] - 0.1 * 0.3).abs() < 1e-15);
    }
}
