//! Shannon and von Neumann entropies.
//!
//! Natural logarithms are used internally; [`Base::Two`] divides by `ln 2`.

use rand_distr::{Distribution as RandDistribution, StandardNormal};
use thiserror::Error;

use crate::hilbert::{born, DensityOperator, HilbertError, StateVector};
use crate::random::{haar_basis, seeded};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("empty distribution")]
    Empty,
    #[error("probability {value} at index {index} is negative")]
    Negative { index: usize, value: f64 },
    #[error("probabilities sum to {0}, not 1")]
    Sum(f64),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    E,
    Two,
}

/// Values below this are treated as exact zeros.
const ZERO_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<T> {
    probs: Vec<T>,
}

impl<T: Real> Distribution<T> {
    /// Entries down to `-1e-12` are clamped to zero; the total must be 1 within `1e-9`.
    pub fn new(probs: Vec<T>) -> Result<Self, EntropyError> {
        if probs.is_empty() {
            return Err(EntropyError::Empty);
        }
        let cutoff = T::lit(ZERO_CUTOFF);
        if let Some((index, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= -cutoff)) {
            return Err(EntropyError::Negative {
                index,
                value: p.to_f64().unwrap_or(f64::NAN),
            });
        }
        let probs: Vec<T> = probs.into_iter().map(|p| p.max(T::zero())).collect();
        let total = probs.iter().fold(T::zero(), |a, &p| a + p);
        if (total - T::one()).abs() > T::lit(1e-9) {
            return Err(EntropyError::Sum(total.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Distribution { probs })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }
}

fn in_base<T: Real>(nats: T, base: Base) -> T {
    match base {
        Base::E => nats,
        Base::Two => nats / T::lit(2.0).ln(),
    }
}

/// `−Σ p log p` with `0 log 0 = 0`.
pub fn shannon<T: Real>(p: &Distribution<T>, base: Base) -> T {
    let cutoff = T::lit(ZERO_CUTOFF);
    let nats = p
        .probs
        .iter()
        .filter(|&&x| x > cutoff)
        .fold(T::zero(), |acc, &x| acc - x * x.ln());
    in_base(nats.max(T::zero()), base)
}

/// Shannon entropy of the spectrum of `ρ`.
pub fn von_neumann<T: Real>(rho: &DensityOperator<T>, base: Base) -> T {
    let (values, _) = rho.eigen();
    let cutoff = T::lit(ZERO_CUTOFF);
    let nats = values
        .iter()
        .filter(|&&x| x > cutoff)
        .fold(T::zero(), |acc, &x| acc - x * x.ln());
    in_base(nats.max(T::zero()), base)
}

/// Born probabilities of `ρ` in an orthonormal basis.
pub fn born_distribution<T: Real>(
    rho: &DensityOperator<T>,
    basis: &[StateVector<T>],
) -> Result<Distribution<T>, EntropyError> {
    let probs = basis
        .iter()
        .map(|v| born(&v.projector(), rho))
        .collect::<Result<Vec<T>, _>>()?;
    Distribution::new(probs)
}

#[derive(Clone, Debug)]
pub struct ContextEntropy<T: Real> {
    /// Minimum Shannon entropy (nats) over the bases examined.
    pub value: T,
    pub basis: Vec<StateVector<T>>,
    pub is_eigenbasis: bool,
    /// Entropy of every sampled basis, in sampling order.
    pub sampled: Vec<T>,
}

/// Minimum Born-probability entropy over the eigenbasis of `ρ` and
/// `n_samples` Haar-random bases.
pub fn min_context_entropy<T: Real>(
    rho: &DensityOperator<T>,
    n_samples: usize,
    seed: u64,
) -> Result<ContextEntropy<T>, EntropyError>
where
    StandardNormal: RandDistribution<T>,
{
    let eigenbasis = rho.eigenbasis();
    let mut best = ContextEntropy {
        value: shannon(&born_distribution(rho, &eigenbasis)?, Base::E),
        basis: eigenbasis,
        is_eigenbasis: true,
        sampled: Vec::with_capacity(n_samples),
    };
    let mut rng = seeded(seed);
    for _ in 0..n_samples {
        let basis = haar_basis::<T, _>(rho.dim(), &mut rng);
        let h = shannon(&born_distribution(rho, &basis)?, Base::E);
        best.sampled.push(h);
        if h < best.value {
            best.value = h;
            best.basis = basis;
            best.is_eigenbasis = false;
        }
    }
    Ok(best)
}
