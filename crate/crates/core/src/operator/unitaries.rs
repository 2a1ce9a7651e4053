use std::f64::consts::PI;

use super::{tensor, CMatrix, C64, ONE};
use crate::error::{Error, Result};

/// Fourier, Heisenberg-Weyl shift/phase, and qudit CNOT in dimension `d`.
#[derive(Debug, Clone)]
pub struct StandardUnitaries {
    /// `F = (1/sqrt d) sum_{k,j} e^{2 pi i k j / d} |k><j|`.
    pub fourier: CMatrix,
    /// `X |j> = |j + 1 mod d>`.
    pub shift_x: CMatrix,
    /// `Z |j> = e^{2 pi i j / d} |j>`.
    pub phase_z: CMatrix,
    /// `sum_j |j><j| ⊗ X^j` on control ⊗ target.
    pub cnot: CMatrix,
}

pub(crate) fn root_of_unity(d: usize, k: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * ((k % d) as f64) / d as f64)
}

pub fn standard_unitaries(d: usize) -> Result<StandardUnitaries> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "qudit dimension must be >= 2, got {d}"
        )));
    }
    let norm = 1.0 / (d as f64).sqrt();
    let fourier = CMatrix::from_fn(d, d, |k, j| root_of_unity(d, k * j).scale(norm));
    let shift_x = CMatrix::from_fn(d, d, |row, col| if row == (col + 1) % d { ONE } else { super::ZERO });
    let phase_z = CMatrix::from_fn(d, d, |row, col| {
        if row == col {
            root_of_unity(d, row)
        } else {
            super::ZERO
        }
    });
    let mut cnot = CMatrix::zeros(d * d, d * d);
    let mut x_power = CMatrix::identity(d, d);
    for j in 0..d {
        let proj = super::ket_bra(d, j, j);
        cnot += tensor(&proj, &x_power);
        x_power = &shift_x * x_power;
    }
    Ok(StandardUnitaries {
        fourier,
        shift_x,
        phase_z,
        cnot,
    })
}
