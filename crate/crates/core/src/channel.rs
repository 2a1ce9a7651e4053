//! Kraus and Stinespring channel representations and the binary covert-channel
//! quadruple `(sigma0, sigma1, omega0, omega1)`.
//!
//! Dilations use `V = sum_k K_k ⊗ |k>_W` with Bob's system `B` before the
//! environment `W`, so `V[(b * dim_w + k, a)] = K_k[(b, a)]`.

use serde::{Deserialize, Serialize};

use crate::divergence::support_contained;
use crate::error::{Error, Result, SupportAssumption};
use crate::json;
use crate::operator::{
    max_abs, partial_trace_matrix, reduced_from_vector, tensor, CMatrix, DensityOperator,
    Tolerances, C64,
};

/// Kraus operators `K_k: C^in -> C^out` with `sum K^dag K = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>, tol: &Tolerances) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameter("no Kraus operators".into()))?;
        let (out_dim, in_dim) = first.shape();
        if let Some(bad) = kraus.iter().find(|k| k.shape() != (out_dim, in_dim)) {
            return Err(Error::DimMismatch {
                expected: out_dim * in_dim,
                found: bad.nrows() * bad.ncols(),
            });
        }
        let ch = Self {
            in_dim,
            out_dim,
            kraus,
        };
        let defect = max_abs(&(ch.completeness() - CMatrix::identity(in_dim, in_dim)));
        if defect > tol.herm_tol {
            return Err(Error::NotTracePreserving { defect });
        }
        Ok(ch)
    }

    /// `sum_k K_k^dag K_k`.
    pub fn completeness(&self) -> CMatrix {
        self.kraus
            .iter()
            .fold(CMatrix::zeros(self.in_dim, self.in_dim), |acc, k| {
                acc + k.adjoint() * k
            })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `sum_k K rho K^dag`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.in_dim {
            return Err(Error::DimMismatch {
                expected: self.in_dim,
                found: rho.dim(),
            });
        }
        let out = self
            .kraus
            .iter()
            .fold(CMatrix::zeros(self.out_dim, self.out_dim), |acc, k| {
                acc + k * rho.matrix() * k.adjoint()
            });
        Ok(DensityOperator::from_trusted(out))
    }

    pub fn to_stinespring(&self) -> StinespringIsometry {
        let dim_w = self.kraus.len();
        let v = CMatrix::from_fn(self.out_dim * dim_w, self.in_dim, |row, a| {
            self.kraus[row % dim_w][(row / dim_w, a)]
        });
        StinespringIsometry {
            in_dim: self.in_dim,
            dim_b: self.out_dim,
            dim_w,
            v,
        }
    }
}

/// Isometry `V: A -> B ⊗ W`, `V^dag V = I_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringIsometry {
    in_dim: usize,
    dim_b: usize,
    dim_w: usize,
    v: CMatrix,
}

impl StinespringIsometry {
    pub fn new(v: CMatrix, dim_b: usize, dim_w: usize, tol: &Tolerances) -> Result<Self> {
        let in_dim = v.ncols();
        let iso = Self::from_matrix(v, in_dim, dim_b, dim_w)?;
        let defect = iso.isometry_defect();
        if defect > tol.herm_tol {
            return Err(Error::NotIsometry { defect });
        }
        Ok(iso)
    }

    /// Shape checks only.
    pub(crate) fn from_matrix(v: CMatrix, in_dim: usize, dim_b: usize, dim_w: usize) -> Result<Self> {
        if v.shape() != (dim_b * dim_w, in_dim) || in_dim == 0 || dim_b == 0 || dim_w == 0 {
            return Err(Error::DimMismatch {
                expected: dim_b * dim_w,
                found: v.nrows(),
            });
        }
        Ok(Self {
            in_dim,
            dim_b,
            dim_w,
            v,
        })
    }

    /// The noiseless channel `V = I ⊗ |0>_W` with a one-dimensional environment.
    pub fn identity(dim: usize) -> Self {
        Self {
            in_dim: dim,
            dim_b: dim,
            dim_w: 1,
            v: CMatrix::identity(dim, dim),
        }
    }

    pub fn isometry_defect(&self) -> f64 {
        max_abs(&(self.v.adjoint() * &self.v - CMatrix::identity(self.in_dim, self.in_dim)))
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim_w(&self) -> usize {
        self.dim_w
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.v
    }

    pub fn to_kraus(&self) -> KrausChannel {
        let kraus = (0..self.dim_w)
            .map(|k| {
                CMatrix::from_fn(self.dim_b, self.in_dim, |b, a| self.v[(b * self.dim_w + k, a)])
            })
            .collect();
        KrausChannel {
            in_dim: self.in_dim,
            out_dim: self.dim_b,
            kraus,
        }
    }

    /// `(I_B ⊗ U) V` for a unitary `U` on the environment.
    pub fn rotate_environment(&self, u: &CMatrix) -> Result<Self> {
        if u.shape() != (self.dim_w, self.dim_w) {
            return Err(Error::DimMismatch {
                expected: self.dim_w,
                found: u.nrows(),
            });
        }
        let full = tensor(&CMatrix::identity(self.dim_b, self.dim_b), u);
        Ok(Self {
            v: full * &self.v,
            ..self.clone()
        })
    }
}

pub fn stinespring_from_kraus(ch: &KrausChannel) -> StinespringIsometry {
    ch.to_stinespring()
}

/// Joint output `V rho V^dag` on `B ⊗ W`.
pub fn apply_isometry(v: &StinespringIsometry, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != v.in_dim {
        return Err(Error::DimMismatch {
            expected: v.in_dim,
            found: rho.dim(),
        });
    }
    Ok(DensityOperator::from_trusted(&v.v * rho.matrix() * v.v.adjoint()))
}

/// Bob's and Willie's outputs `(sigma_x, omega_x)` for the basis input `|x>`.
pub fn marginal_outputs(
    v: &StinespringIsometry,
    x: usize,
) -> Result<(DensityOperator, DensityOperator)> {
    if x >= v.in_dim {
        return Err(Error::IndexOutOfRange {
            index: x,
            size: v.in_dim,
        });
    }
    let psi = v.v.column(x).into_owned();
    let dims = [v.dim_b, v.dim_w];
    let sigma = reduced_from_vector(&psi, &dims, &[0])?;
    let omega = reduced_from_vector(&psi, &dims, &[1])?;
    Ok((
        DensityOperator::from_trusted(sigma),
        DensityOperator::from_trusted(omega),
    ))
}

/// Qubit excitation channel: `K0 = sqrt(1-g)|0><0| + |1><1|`, `K1 = sqrt(g)|1><0|`.
pub fn excitation_channel(gamma: f64) -> Result<KrausChannel> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "excitation probability must lie in (0, 1], got {gamma}"
        )));
    }
    let mut k0 = CMatrix::zeros(2, 2);
    k0[(0, 0)] = C64::new((1.0 - gamma).sqrt(), 0.0);
    k0[(1, 1)] = C64::new(1.0, 0.0);
    let mut k1 = CMatrix::zeros(2, 2);
    k1[(1, 0)] = C64::new(gamma.sqrt(), 0.0);
    Ok(KrausChannel {
        in_dim: 2,
        out_dim: 2,
        kraus: vec![k0, k1],
    })
}

/// Outputs of the innocent input 0 and the active input 1 at Bob and Willie.
#[derive(Debug, Clone)]
pub struct BinaryCovertChannel {
    sigma0: DensityOperator,
    sigma1: DensityOperator,
    omega0: DensityOperator,
    omega1: DensityOperator,
}

impl BinaryCovertChannel {
    /// Checks `omega1 != omega0` (entrywise beyond `herm_tol`), then
    /// `supp(sigma1) ⊆ supp(sigma0)` and `supp(omega1) ⊆ supp(omega0)`.
    pub fn new(
        sigma0: DensityOperator,
        sigma1: DensityOperator,
        omega0: DensityOperator,
        omega1: DensityOperator,
        tol: &Tolerances,
    ) -> Result<Self> {
        for (a, b) in [(&sigma0, &sigma1), (&omega0, &omega1)] {
            if a.dim() != b.dim() {
                return Err(Error::DimMismatch {
                    expected: a.dim(),
                    found: b.dim(),
                });
            }
        }
        if max_abs(&(omega1.matrix() - omega0.matrix())) <= tol.herm_tol {
            return Err(Error::TrivialTest);
        }
        if !support_contained(&sigma1.eigh(), &sigma0.eigh(), tol) {
            return Err(Error::AssumptionViolation(SupportAssumption::Bob));
        }
        if !support_contained(&omega1.eigh(), &omega0.eigh(), tol) {
            return Err(Error::AssumptionViolation(SupportAssumption::Willie));
        }
        Ok(Self {
            sigma0,
            sigma1,
            omega0,
            omega1,
        })
    }

    pub fn sigma0(&self) -> &DensityOperator {
        &self.sigma0
    }

    pub fn sigma1(&self) -> &DensityOperator {
        &self.sigma1
    }

    pub fn omega0(&self) -> &DensityOperator {
        &self.omega0
    }

    pub fn omega1(&self) -> &DensityOperator {
        &self.omega1
    }

    /// Exchanges the roles of Bob and Willie.
    pub fn swapped(&self, tol: &Tolerances) -> Result<Self> {
        Self::new(
            self.omega0.clone(),
            self.omega1.clone(),
            self.sigma0.clone(),
            self.sigma1.clone(),
            tol,
        )
    }
}

/// Quadruple induced by the inputs `|0>` and `|1>` of a dilation.
pub fn build_covert_channel(
    v: &StinespringIsometry,
    tol: &Tolerances,
) -> Result<BinaryCovertChannel> {
    if v.in_dim < 2 {
        return Err(Error::InvalidParameter(
            "a covert channel needs at least two inputs".into(),
        ));
    }
    let (sigma0, omega0) = marginal_outputs(v, 0)?;
    let (sigma1, omega1) = marginal_outputs(v, 1)?;
    BinaryCovertChannel::new(sigma0, sigma1, omega0, omega1, tol)
}

/// `omega_alpha = (1 - alpha) omega0 + alpha omega1`.
pub fn mixed_output(ch: &BinaryCovertChannel, alpha: f64) -> Result<DensityOperator> {
    ch.omega0.mix(&ch.omega1, alpha)
}

/// Same mixture on Bob's side.
pub fn mixed_output_bob(ch: &BinaryCovertChannel, alpha: f64) -> Result<DensityOperator> {
    ch.sigma0.mix(&ch.sigma1, alpha)
}

/// Channel description accepted on input.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChannelSpec {
    Excitation {
        gamma: f64,
    },
    #[serde(rename_all = "camelCase")]
    Kraus {
        in_dim: usize,
        #[serde(with = "json::matrix_list")]
        kraus: Vec<CMatrix>,
    },
    CqPair {
        #[serde(with = "json::matrix")]
        sigma0: CMatrix,
        #[serde(with = "json::matrix")]
        sigma1: CMatrix,
        #[serde(with = "json::matrix")]
        omega0: CMatrix,
        #[serde(with = "json::matrix")]
        omega1: CMatrix,
    },
}

impl ChannelSpec {
    /// The dilation, if the spec describes a channel rather than bare outputs.
    pub fn isometry(&self, tol: &Tolerances) -> Result<Option<StinespringIsometry>> {
        match self {
            Self::Excitation { gamma } => Ok(Some(excitation_channel(*gamma)?.to_stinespring())),
            Self::Kraus { in_dim, kraus } => {
                let ch = KrausChannel::new(kraus.clone(), tol)?;
                if ch.in_dim() != *in_dim {
                    return Err(Error::DimMismatch {
                        expected: *in_dim,
                        found: ch.in_dim(),
                    });
                }
                Ok(Some(ch.to_stinespring()))
            }
            Self::CqPair { .. } => Ok(None),
        }
    }

    pub fn covert_channel(&self, tol: &Tolerances) -> Result<BinaryCovertChannel> {
        match self {
            Self::CqPair {
                sigma0,
                sigma1,
                omega0,
                omega1,
            } => BinaryCovertChannel::new(
                DensityOperator::new(sigma0.clone(), tol)?,
                DensityOperator::new(sigma1.clone(), tol)?,
                DensityOperator::new(omega0.clone(), tol)?,
                DensityOperator::new(omega1.clone(), tol)?,
                tol,
            ),
            _ => {
                let v = self.isometry(tol)?.expect("channel kinds carry a dilation");
                build_covert_channel(&v, tol)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Partial trace over `B` of a joint `B ⊗ W` operator.
pub fn willie_marginal(joint: &DensityOperator, v: &StinespringIsometry) -> Result<DensityOperator> {
    partial_trace_matrix(joint.matrix(), &[v.dim_b, v.dim_w], &[1]).map(DensityOperator::from_trusted)
}
