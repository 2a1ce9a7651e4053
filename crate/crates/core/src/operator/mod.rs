//! Dense complex-matrix primitives for finite-dimensional quantum states.
//!
//! Every operator is an `nalgebra::DMatrix<Complex64>` in the computational
//! basis; multipartite operators use the usual Kronecker ordering with the
//! first subsystem most significant. The validated wrappers [`Hermitian`],
//! [`DensityOperator`] and [`PureState`] carry the invariants the rest of the
//! crate relies on.

mod ops;
mod spectral;
mod unitaries;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ops::{
    fidelity, max_abs, nonneg_eigenspace_projector, partial_trace, partial_trace_matrix, pinching,
    reduced_from_vector, tensor, tensor_all, tensor_power, trace_norm,
};
pub(crate) use spectral::cluster_runs;
pub use spectral::{eigh, spectral_decompose, Eigh, SpectralCluster, SpectralDecomposition};
pub use unitaries::{standard_unitaries, StandardUnitaries};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tolerances {
    pub herm_tol: f64,
    pub psd_tol: f64,
    pub trace_tol: f64,
    pub cluster_tol: f64,
    pub support_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm_tol: 1e-9,
            psd_tol: 1e-9,
            trace_tol: 1e-9,
            cluster_tol: 1e-10,
            support_tol: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.herm_tol,
            self.psd_tol,
            self.trace_tol,
            self.cluster_tol,
            self.support_tol,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "all tolerances must be finite and positive".into(),
            ))
        }
    }
}

/// Largest entrywise deviation of `m` from its conjugate transpose.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::DimMismatch {
            expected: m.nrows().max(1),
            found: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter("non-finite matrix entry".into()));
    }
    Ok(())
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Builds a real diagonal matrix.
pub fn diag(values: &[f64]) -> CMatrix {
    let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
    CMatrix::from_diagonal(&CVector::from_vec(v))
}

/// `|i><j|` in dimension `dim`.
pub fn ket_bra(dim: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = ONE;
    m
}

/// A Hermitian operator, stored exactly Hermitian after validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub fn new(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        check_square(&m)?;
        let asymmetry = hermitian_defect(&m);
        if asymmetry > tol.herm_tol {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(Self(symmetrize(&m)))
    }

    /// Wraps a matrix that is Hermitian by construction (symmetrizes roundoff).
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self(symmetrize(&m))
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        Self(diag(values))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn eigh(&self) -> Eigh {
        eigh(&self.0)
    }
}

/// A density operator: Hermitian, positive semidefinite and unit trace.
///
/// Eigenvalues in `[-psd_tol, 0)` are clamped to zero on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(CMatrix);

impl DensityOperator {
    pub fn new(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        let h = Hermitian::new(m, tol)?;
        let tr = h.0.trace();
        if (tr.re - 1.0).abs() > tol.trace_tol || tr.im.abs() > tol.trace_tol {
            return Err(Error::NotDensity(format!("trace is {tr}")));
        }
        let e = h.eigh();
        let min = e.values.last().copied().unwrap_or(0.0);
        if min < -tol.psd_tol {
            return Err(Error::NotDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        if min < 0.0 {
            return Ok(Self(e.map(|x| x.max(0.0))));
        }
        Ok(Self(h.0))
    }

    /// Wraps a matrix that is a state by construction (e.g. a convex
    /// combination or image of states); only symmetrizes roundoff.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self(symmetrize(&m))
    }

    pub fn from_diagonal(probs: &[f64], tol: &Tolerances) -> Result<Self> {
        Self::new(diag(probs), tol)
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, size: dim });
        }
        Ok(Self(ket_bra(dim, index, index)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim).unscale(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn eigh(&self) -> Eigh {
        eigh(&self.0)
    }

    /// `(1 - weight) * self + weight * other`.
    pub fn mix(&self, other: &DensityOperator, weight: f64) -> Result<DensityOperator> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight {weight} outside [0, 1]"
            )));
        }
        Ok(Self(self.0.scale(1.0 - weight) + other.0.scale(weight)))
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        Self(tensor(&self.0, &other.0))
    }

    pub fn tensor_power(&self, n: usize) -> DensityOperator {
        Self(tensor_power(&self.0, n))
    }
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(CVector);

impl PureState {
    pub fn new(v: CVector, tol: &Tolerances) -> Result<Self> {
        let norm = v.norm();
        if v.is_empty() || (norm - 1.0).abs() > tol.trace_tol {
            return Err(Error::InvalidParameter(format!(
                "state vector norm {norm} is not 1"
            )));
        }
        Ok(Self(v))
    }

    /// Normalizes `v`; fails on the zero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize zero vector".into()));
        }
        Ok(Self(v.unscale(norm)))
    }


    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, size: dim });
        }
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Ok(Self(v))
    }

    /// `(1/sqrt(d)) sum_j |j>|j>`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut v = CVector::zeros(d * d);
        let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        for j in 0..d {
            v[j * d + j] = amp;
        }
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    pub fn into_amplitudes(self) -> CVector {
        self.0
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator(&self.0 * self.0.adjoint())
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        Self(self.0.kronecker(&other.0))
    }
}
