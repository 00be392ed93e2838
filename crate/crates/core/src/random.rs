//! Seeded random quantum objects.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::hilbert::{CMatrix, DensityOperator, StateVector};
use crate::scalar::Real;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T>
where
    StandardNormal: Distribution<T>,
{
    Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Uniformly distributed unit vector.
pub fn random_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> StateVector<T>
where
    StandardNormal: Distribution<T>,
{
    loop {
        let amps: Vec<Complex<T>> = (0..d).map(|_| gaussian(rng)).collect();
        if let Ok(s) = StateVector::normalized(amps) {
            return s;
        }
    }
}

/// Haar-random orthonormal basis, by Gram-Schmidt on Gaussian vectors.
pub fn haar_basis<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<StateVector<T>>
where
    StandardNormal: Distribution<T>,
{
    'retry: loop {
        let mut basis: Vec<StateVector<T>> = Vec::with_capacity(d);
        for _ in 0..d {
            let mut v: Vec<Complex<T>> = (0..d).map(|_| gaussian(rng)).collect();
            // Two passes keep the result orthogonal to working precision.
            for _ in 0..2 {
                for b in &basis {
                    let overlap = b
                        .amplitudes()
                        .iter()
                        .zip(&v)
                        .fold(Complex::zero(), |acc: Complex<T>, (x, y)| acc + x.conj() * y);
                    for (vi, bi) in v.iter_mut().zip(b.amplitudes()) {
                        *vi = *vi - overlap * bi;
                    }
                }
            }
            let norm = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
            if norm < T::lit(1e-6) {
                continue 'retry;
            }
            basis.push(StateVector::normalized(v).expect("nonzero"));
        }
        return basis;
    }
}

/// Unitary whose columns form a Haar-random basis.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix<T>
where
    StandardNormal: Distribution<T>,
{
    let basis = haar_basis(d, rng);
    let mut u = CMatrix::zeros(d);
    for (j, b) in basis.iter().enumerate() {
        for (i, &a) in b.amplitudes().iter().enumerate() {
            u[(i, j)] = a;
        }
    }
    u
}

/// Full-rank random density operator `G G† / Tr[G G†]` with Gaussian `G`.
pub fn random_density<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityOperator<T>
where
    StandardNormal: Distribution<T>,
{
    let mut g = CMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            g[(i, j)] = gaussian(rng);
        }
    }
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    let m = m.scale_real(T::one() / tr).hermitian_part();
    DensityOperator::new(m).expect("Wishart matrices are valid density operators")
}

/// Random Hermitian matrix `U diag(λ) U†` with known spectrum.
pub fn hermitian_with_spectrum<T: Real, R: Rng + ?Sized>(spectrum: &[T], rng: &mut R) -> CMatrix<T>
where
    StandardNormal: Distribution<T>,
{
    let u = haar_unitary(spectrum.len(), rng);
    (&(&u * &CMatrix::from_real_diag(spectrum)) * &u.adjoint()).hermitian_part()
}
