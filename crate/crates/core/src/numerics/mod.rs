//! Minimal dense complex linear algebra used by every solver module.
//!
//! Everything here is dense and double precision; the problem sizes in this
//! crate (antenna counts and IRS element counts up to a few hundred) do not
//! justify sparse formats or external backends.

mod cmat;
mod eig;
mod qr;
mod solve;

pub mod power;
pub mod vec;

pub use cmat::{CMat, C64};
pub use eig::{hermitian_eig, EigDecomposition, HermitianMatrix};
pub use qr::{null_space_basis, rank};
pub use solve::{cholesky_factor, linear_solve, CholeskyFactor};

use crate::{Error, Result};

/// Element-wise (Hadamard) product of two Hermitian matrices of equal order.
///
/// The result is Hermitian by construction and, by the Schur product theorem,
/// PSD whenever both inputs are.
pub fn hadamard(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    if a.order() != b.order() {
        return Err(Error::DimensionMismatch {
            expected: a.order(),
            got: b.order(),
            what: "hadamard operand order",
        });
    }
    let n = a.order();
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = a.as_mat()[(i, j)] * b.as_mat()[(i, j)];
        }
    }
    Ok(HermitianMatrix::new_unchecked(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> C64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = CMat::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = c(rng.gen::<f64>() * 2.0 - 1.0, 0.0);
            for j in i + 1..n {
                let z = c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        HermitianMatrix::new(a).unwrap()
    }

    fn random_psd(n: usize, seed: u64) -> HermitianMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let b = CMat::from_fn(n, n, |_, _| {
            c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
        });
        let prod = b.mul(&b.adjoint());
        HermitianMatrix::new(prod.symmetrized()).unwrap()
    }

    #[test]
    fn hadamard_with_identity_extracts_diagonal() {
        let a = random_hermitian(4, 7);
        let id = HermitianMatrix::new(CMat::identity(4)).unwrap();
        let h = hadamard(&a, &id).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { a.as_mat()[(i, i)] } else { c(0.0, 0.0) };
                assert!((h.as_mat()[(i, j)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn hadamard_with_zero_is_zero() {
        let a = random_hermitian(3, 9);
        let zero = HermitianMatrix::new(CMat::zeros(3, 3)).unwrap();
        let h = hadamard(&a, &zero).unwrap();
        assert!(h.as_mat().frob_norm() == 0.0);
    }

    #[test]
    fn hadamard_of_psd_is_psd() {
        // Schur product theorem, checked through the eigenvalues.
        for seed in 0..5u64 {
            let a = random_psd(4, seed);
            let b = random_psd(4, seed + 100);
            let h = hadamard(&a, &b).unwrap();
            let trace = h.trace();
            let eig = hermitian_eig(&h);
            let min = eig.values.last().copied().unwrap();
            assert!(min >= -1e-10 * trace.max(1.0), "min eig {min} trace {trace}");
        }
    }

    #[test]
    fn hadamard_order_mismatch_is_an_error() {
        let a = random_hermitian(3, 1);
        let b = random_hermitian(4, 2);
        assert!(matches!(hadamard(&a, &b), Err(Error::DimensionMismatch { .. })));
    }
}
