use super::{
    eigh, hermitian_defect, spectral_decompose, CMatrix, CVector, DensityOperator, Tolerances,
    C64,
};
use crate::error::{Error, Result};

/// Largest entry modulus (sup norm over entries).
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Kronecker product `A ⊗ B`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors
        .into_iter()
        .fold(CMatrix::from_element(1, 1, C64::new(1.0, 0.0)), |acc, f| {
            acc.kronecker(f)
        })
}

pub fn tensor_power(a: &CMatrix, n: usize) -> CMatrix {
    tensor_all(std::iter::repeat_n(a, n))
}

fn check_dims(total: usize, dims: &[usize], keep: &[usize]) -> Result<()> {
    let product: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || product != total {
        return Err(Error::DimMismatch {
            expected: total,
            found: product,
        });
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            size: dims.len(),
        });
    }
    Ok(())
}

/// For each full index: (index within the kept subsystems, index within the traced ones).
fn split_indices(dims: &[usize], keep: &[usize]) -> (Vec<usize>, Vec<usize>, usize, usize) {
    let total: usize = dims.iter().product();
    let kept_dim: usize = dims
        .iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, d)| d)
        .product();
    let traced_dim = total / kept_dim;
    let mut kept = vec![0; total];
    let mut traced = vec![0; total];
    let mut digits = vec![0usize; dims.len()];
    for full in 0..total {
        let mut rem = full;
        for s in (0..dims.len()).rev() {
            digits[s] = rem % dims[s];
            rem /= dims[s];
        }
        let (mut k, mut t) = (0, 0);
        for (s, &d) in dims.iter().enumerate() {
            if keep.contains(&s) {
                k = k * d + digits[s];
            } else {
                t = t * d + digits[s];
            }
        }
        kept[full] = k;
        traced[full] = t;
    }
    (kept, traced, kept_dim, traced_dim)
}

/// Partial trace of an arbitrary square matrix. Kept subsystems appear in
/// their original relative order.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_dims(m.nrows(), dims, keep)?;
    let (kept, traced, kept_dim, traced_dim) = split_indices(dims, keep);
    let mut classes: Vec<Vec<usize>> = vec![Vec::with_capacity(kept_dim); traced_dim];
    for full in 0..m.nrows() {
        classes[traced[full]].push(full);
    }
    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for class in &classes {
        for &a in class {
            for &b in class {
                out[(kept[a], kept[b])] += m[(a, b)];
            }
        }
    }
    Ok(out)
}

pub fn partial_trace(
    rho: &DensityOperator,
    dims: &[usize],
    keep: &[usize],
) -> Result<DensityOperator> {
    partial_trace_matrix(rho.matrix(), dims, keep).map(DensityOperator::from_trusted)
}

/// Reduced density matrix `tr_{not keep} |psi><psi|` without forming the
/// full projector.
pub fn reduced_from_vector(psi: &CVector, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_dims(psi.len(), dims, keep)?;
    let (kept, traced, kept_dim, traced_dim) = split_indices(dims, keep);
    let mut block = CMatrix::zeros(kept_dim, traced_dim);
    for full in 0..psi.len() {
        block[(kept[full], traced[full])] = psi[full];
    }
    Ok(&block * block.adjoint())
}

/// Schatten 1-norm: sum of singular values (sum of |eigenvalues| for Hermitian input).
pub fn trace_norm(a: &CMatrix) -> f64 {
    if a.is_square() && hermitian_defect(a) <= 1e-12 * (1.0 + max_abs(a)) {
        eigh(a).values.iter().map(|v| v.abs()).sum()
    } else {
        a.clone().svd(false, false).singular_values.iter().sum()
    }
}

/// `F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1^2`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    // singular values of sqrt(rho) sqrt(sigma) avoid square roots of round-off eigenvalues
    let sqrt_rho = rho.eigh().map(|x| x.max(0.0).sqrt());
    let sqrt_sigma = sigma.eigh().map(|x| x.max(0.0).sqrt());
    let root_sum: f64 = (sqrt_rho * sqrt_sigma).svd(false, false).singular_values.iter().sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// Projector onto the span of eigenvectors with eigenvalue `>= -cluster_tol`
/// (zero counts as nonnegative).
pub fn nonneg_eigenspace_projector(p: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let asymmetry = hermitian_defect(p);
    if asymmetry > tol.herm_tol {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(eigh(p).map(|x| if x >= -tol.cluster_tol { 1.0 } else { 0.0 }))
}

/// `sum_j P_j Q P_j` over the eigenprojectors of `p`.
pub fn pinching(q: &CMatrix, p: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    if q.shape() != p.shape() {
        return Err(Error::DimMismatch {
            expected: p.nrows(),
            found: q.nrows(),
        });
    }
    let sd = spectral_decompose(p, tol)?;
    let dim = q.nrows();
    Ok(sd.clusters.iter().fold(CMatrix::zeros(dim, dim), |acc, c| {
        acc + &c.projector * q * &c.projector
    }))
}
