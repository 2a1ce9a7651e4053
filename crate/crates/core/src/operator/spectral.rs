use nalgebra::SymmetricEigen;

use super::{hermitian_defect, CMatrix, CVector, Hermitian, Tolerances};
use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in decreasing order.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// Spectral functional calculus: `sum_k f(lambda_k) |v_k><v_k|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            scaled.column_mut(k).scale_mut(w);
        }
        &scaled * self.vectors.adjoint()
    }

    /// Functional calculus restricted to eigenvalues above `floor`; the rest map to zero.
    pub fn map_on_support(&self, floor: f64, f: impl Fn(f64) -> f64) -> CMatrix {
        self.map(|x| if x > floor { f(x) } else { 0.0 })
    }

    /// Columns of the eigenvectors whose eigenvalue exceeds `floor`.
    pub fn support_indices(&self, floor: f64) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > floor)
            .map(|(k, _)| k)
            .collect()
    }
}

/// Hermitian eigensolver (symmetrizes the input first).
pub fn eigh(m: &CMatrix) -> Eigh {
    let sym = (m + m.adjoint()).scale(0.5);
    let dim = sym.nrows();
    let se = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Eigh { values, vectors }
}

#[derive(Debug, Clone)]
pub struct SpectralCluster {
    pub value: f64,
    pub projector: CMatrix,
    pub rank: usize,
}

/// `H = sum_i value_i * projector_i` with strictly decreasing cluster values.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub clusters: Vec<SpectralCluster>,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.clusters[0].projector.nrows();
        self.clusters
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, c| {
                acc + c.projector.scale(c.value)
            })
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Groups sorted (decreasing) values into runs whose consecutive gaps are at
/// most `tol`; returns the run boundaries as `[start, end)` pairs.
pub(crate) fn cluster_runs(sorted_desc: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = 0;
    for k in 1..=sorted_desc.len() {
        if k == sorted_desc.len() || sorted_desc[k - 1] - sorted_desc[k] > tol {
            runs.push((start, k));
            start = k;
        }
    }
    runs
}

pub fn spectral_decompose(h: &CMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    let asymmetry = hermitian_defect(h);
    if asymmetry > tol.herm_tol {
        return Err(Error::NotHermitian { asymmetry });
    }
    let herm = Hermitian::from_trusted(h.clone());
    let e = herm.eigh();
    let dim = e.dim();
    let clusters = cluster_runs(&e.values, tol.cluster_tol)
        .into_iter()
        .map(|(start, end)| {
            let value = e.values[start..end].iter().sum::<f64>() / (end - start) as f64;
            let block = e.vectors.columns(start, end - start);
            let projector = block * block.adjoint();
            debug_assert_eq!(projector.nrows(), dim);
            SpectralCluster {
                value,
                projector,
                rank: end - start,
            }
        })
        .collect();
    Ok(SpectralDecomposition { clusters })
}
