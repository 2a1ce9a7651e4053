use crate::error::{Error, Result};
use crate::operator::{CMatrix, PureState};

/// An isometry `B -> C` aligning two purifications on `A ⊗ B` and `A ⊗ C`.
#[derive(Debug, Clone)]
pub struct UhlmannIsometry {
    /// `dim C x dim B`, `W^dagger W = I_B`.
    pub isometry: CMatrix,
    /// `<theta| (I ⊗ W) |psi>`, real and equal to the root fidelity of the `A` marginals.
    pub overlap: f64,
}

/// `|psi>` on `A ⊗ B` as the `dim A x dim B` coefficient matrix.
pub fn bipartite_matrix(v: &PureState, dim_a: usize) -> Result<CMatrix> {
    if dim_a == 0 || v.dim() % dim_a != 0 {
        return Err(Error::DimMismatch {
            expected: dim_a,
            found: v.dim(),
        });
    }
    let dim_b = v.dim() / dim_a;
    Ok(CMatrix::from_fn(dim_a, dim_b, |a, b| v.amplitudes()[a * dim_b + b]))
}

/// Uhlmann isometry from coefficient matrices `psi` (`A x B`) and `theta` (`A x C`).
///
/// With `Q = theta^dagger psi = U S V^dagger`, `W = conj(U V^dagger)` gives
/// `<theta|(I ⊗ W)|psi> = tr[Q W^T] = tr S`. Needs `dim C >= dim B`; callers pad `C`.
pub fn uhlmann_from_matrices(psi: &CMatrix, theta: &CMatrix) -> Result<UhlmannIsometry> {
    if psi.nrows() != theta.nrows() {
        return Err(Error::DimMismatch {
            expected: psi.nrows(),
            found: theta.nrows(),
        });
    }
    if theta.ncols() < psi.ncols() {
        return Err(Error::DimMismatch {
            expected: psi.ncols(),
            found: theta.ncols(),
        });
    }
    let q = theta.adjoint() * psi;
    let svd = q.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^dagger");
    let isometry = (u * v_t).conjugate();
    let overlap = (theta.adjoint() * psi * isometry.transpose()).trace().re;
    Ok(UhlmannIsometry { isometry, overlap })
}

/// Uhlmann isometry for `psi` on `A ⊗ B` and `theta` on `A ⊗ C`.
pub fn uhlmann_isometry(psi: &PureState, theta: &PureState, dim_a: usize) -> Result<UhlmannIsometry> {
    uhlmann_from_matrices(&bipartite_matrix(psi, dim_a)?, &bipartite_matrix(theta, dim_a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{fidelity, max_abs, reduced_from_vector, tensor, CVector, DensityOperator, C64};
    use crate::random::{random_pure, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn apply(psi: &PureState, w: &CMatrix, dim_a: usize) -> CVector {
        let id = CMatrix::identity(dim_a, dim_a);
        tensor(&id, w) * psi.amplitudes()
    }

    #[test]
    fn identical_states_give_unit_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_pure(6, &mut rng);
        let u = uhlmann_isometry(&psi, &psi, 3).unwrap();
        assert!((u.overlap - 1.0).abs() < 1e-12);
        let out = apply(&psi, &u.isometry, 3);
        assert!((psi.amplitudes().dotc(&out).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn related_purifications_align_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = random_pure(8, &mut rng);
        let local = random_unitary(4, &mut rng);
        let theta = PureState::normalized(apply(&psi, &local, 2)).unwrap();
        let u = uhlmann_isometry(&psi, &theta, 2).unwrap();
        assert!((u.overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_built_qubit_example() {
        // psi_A = |0><0|, theta_A = diag(0.9, 0.1): F = 0.9
        let c = |x: f64| C64::new(x, 0.0);
        let psi = PureState::normalized(CVector::from_vec(vec![c(1.0), c(0.0), c(0.0), c(0.0)])).unwrap();
        let theta = PureState::normalized(CVector::from_vec(vec![
            c(0.0),
            c(0.9f64.sqrt()),
            c(0.1f64.sqrt()),
            c(0.0),
        ]))
        .unwrap();
        let u = uhlmann_isometry(&psi, &theta, 2).unwrap();
        assert!((u.overlap * u.overlap - 0.9).abs() < 1e-12);
        // brute force over real rotations of the purifying qubit
        let best = (0..=3600)
            .map(|k| {
                let a = k as f64 * std::f64::consts::PI / 1800.0;
                let w = CMatrix::from_fn(2, 2, |i, j| {
                    c(match (i, j) {
                        (0, 0) | (1, 1) => a.cos(),
                        (0, 1) => -a.sin(),
                        _ => a.sin(),
                    })
                });
                theta.amplitudes().dotc(&apply(&psi, &w, 2)).norm_sqr()
            })
            .fold(0.0, f64::max);
        assert!((best - 0.9).abs() < 1e-6);
    }

    #[test]
    fn optimum_matches_fidelity_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // rank-deficient marginals (da > db) limit the reference to about
        // sqrt(eps): square roots of round-off eigenvalues enter it
        for (da, db, dc, ftol) in [(2, 2, 2, 1e-10), (3, 2, 4, 1e-7), (4, 4, 8, 1e-10), (2, 3, 3, 1e-10)] {
            let psi = random_pure(da * db, &mut rng);
            let theta = random_pure(da * dc, &mut rng);
            let u = uhlmann_isometry(&psi, &theta, da).unwrap();
            let w = &u.isometry;
            assert!(max_abs(&(w.adjoint() * w - CMatrix::identity(db, db))) < 1e-12);
            let ra = DensityOperator::from_trusted(reduced_from_vector(psi.amplitudes(), &[da, db], &[0]).unwrap());
            let ta = DensityOperator::from_trusted(reduced_from_vector(theta.amplitudes(), &[da, dc], &[0]).unwrap());
            let f = fidelity(&ra, &ta).unwrap();
            assert!((u.overlap * u.overlap - f).abs() < ftol, "{da}{db}{dc}");
            let achieved = theta.amplitudes().dotc(&apply(&psi, w, da));
            assert!((achieved.re - u.overlap).abs() < 1e-12 && achieved.im.abs() < 1e-12);
        }
    }

    #[test]
    fn small_target_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = random_pure(8, &mut rng);
        let theta = random_pure(4, &mut rng);
        assert!(matches!(uhlmann_isometry(&psi, &theta, 2), Err(Error::DimMismatch { .. })));
    }
}
