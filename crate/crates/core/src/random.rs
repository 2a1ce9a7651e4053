//! Haar-style random states, unitaries and channels for tests and sweeps.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{KrausChannel, StinespringIsometry};
use crate::operator::{CMatrix, CVector, DensityOperator, PureState, C64};

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary (QR of a Ginibre matrix with phase fixing).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    random_isometry(dim, dim, rng)
}

/// Random `rows x cols` isometry, `rows >= cols`.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = ginibre(rows, cols, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..cols {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let col = q.column(k) * phase;
        q.set_column(k, &col);
    }
    q
}

pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let v: CVector = ginibre(dim, 1, rng).column(0).into_owned();
    PureState::normalized(v).expect("Gaussian vector is nonzero")
}

/// Random density operator of the given rank (Hilbert-Schmidt measure for full rank).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityOperator {
    let g = ginibre(dim, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_trusted(m.unscale(tr))
}

/// Random channel with `kraus_count` Kraus operators, raised to
/// `ceil(in_dim / out_dim)` if needed for the dilation to exist.
pub fn random_channel<R: Rng + ?Sized>(
    in_dim: usize,
    out_dim: usize,
    kraus_count: usize,
    rng: &mut R,
) -> KrausChannel {
    let kraus_count = kraus_count.max(in_dim.div_ceil(out_dim));
    let v = random_isometry(out_dim * kraus_count, in_dim, rng);
    StinespringIsometry::from_matrix(v, in_dim, out_dim, kraus_count)
        .expect("random isometry is valid")
        .to_kraus()
}
