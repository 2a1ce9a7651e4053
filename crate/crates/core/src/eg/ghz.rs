use crate::error::{Error, Result};
use crate::operator::{standard_unitaries, CMatrix, CVector, DensityOperator, PureState, C64};

/// `(1/sqrt(T)) sum_m |m>_R |m>_M |m>_Mhat`.
pub fn ghz_state(t: usize) -> PureState {
    let mut v = CVector::zeros(t * t * t);
    let amp = C64::new(1.0 / (t as f64).sqrt(), 0.0);
    for m in 0..t {
        v[(m * t + m) * t + m] = amp;
    }
    PureState::normalized(v).expect("nonzero")
}

/// Outcome `j` of the conversion: the post-measurement state on `R ⊗ Mhat`
/// and the outcome probability.
#[derive(Debug, Clone)]
pub struct GhzBranch {
    pub state: PureState,
    pub probability: f64,
}

fn branch_vector(state: &PureState, t: usize, j: usize) -> Result<CVector> {
    if t < 2 {
        return Err(Error::InvalidParameter("GHZ conversion needs T >= 2".into()));
    }
    if state.dim() != t * t * t {
        return Err(Error::DimMismatch {
            expected: t * t * t,
            found: state.dim(),
        });
    }
    if j >= t {
        return Err(Error::IndexOutOfRange { index: j, size: t });
    }
    let u = standard_unitaries(t)?;
    let psi = state.amplitudes();
    let mut out = CVector::zeros(t * t);
    for r in 0..t {
        for mh in 0..t {
            // <j|_M F_M applied, then Z^{-j} on Mhat
            let amp: C64 = (0..t).map(|m| u.fourier[(j, m)] * psi[(r * t + m) * t + mh]).sum();
            out[r * t + mh] = u.phase_z[(mh, mh)].powu(j as u32).conj() * amp;
        }
    }
    Ok(out)
}

/// Fourier transform on `M`, outcome `j`, then `Z^{-j}` on `Mhat`. The input is
/// a state on `R ⊗ M ⊗ Mhat`, each of dimension `t`.
pub fn ghz_to_epr(state: &PureState, t: usize, j: usize) -> Result<GhzBranch> {
    let v = branch_vector(state, t, j)?;
    let probability = v.norm_squared();
    if probability == 0.0 {
        return Err(Error::InvalidParameter(format!("outcome {j} has probability zero")));
    }
    Ok(GhzBranch {
        state: PureState::normalized(v)?,
        probability,
    })
}

/// The conversion as a channel: all outcomes, each corrected, summed.
pub fn ghz_to_epr_channel(state: &PureState, t: usize) -> Result<DensityOperator> {
    let mut rho = CMatrix::zeros(t * t, t * t);
    for j in 0..t {
        let v = branch_vector(state, t, j)?;
        rho += &v * v.adjoint();
    }
    Ok(DensityOperator::from_trusted(rho))
}
