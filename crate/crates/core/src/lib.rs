//! Betting contexts, Dutch books and quantum probability.
//!
//! The crate is organized bottom-up:
//!
//! * [`events`] — finite sample spaces and their Boolean algebras of events.
//! * [`coherence`] — exact Dutch-book checking within one betting context,
//!   backed by the rational [`simplex`] solver.
//! * [`hilbert`] — finite-dimensional state vectors, projectors, PVMs,
//!   spectral decomposition and the Born rule.
//! * [`frames`] — quantum betting contexts, per-context probability frames,
//!   noncontextuality checks and density-operator fitting.
//! * [`kochen_specker`] — search for noncontextual 0/1 value assignments.
//! * [`entropy`] — Shannon and von Neumann entropies.
//! * [`twenty_questions`] — the surprise version of twenty questions, with
//!   bets that can be voided.
//!
//! Numeric code is generic over the scalar. Exact modules take any
//! [`scalar::Exact`] field, floating point modules any [`scalar::Real`]. The
//! aliases below fix the scalars used by the command line tool.

pub mod coherence;
pub mod entropy;
pub mod events;
pub mod frames;
pub mod hilbert;
pub mod io;
pub mod kochen_specker;
pub mod random;
pub mod scalar;
pub mod simplex;
pub mod twenty_questions;

pub use scalar::{Exact, Real};

/// Arbitrary precision rational used for prices and stakes.
pub type Rational = num_rational::BigRational;
pub type Complex = num_complex::Complex<f64>;

pub type StateVector = hilbert::StateVector<f64>;
pub type Projector = hilbert::Projector<f64>;
pub type Pvm = hilbert::Pvm<f64>;
pub type Observable = hilbert::Observable<f64>;
pub type DensityOperator = hilbert::DensityOperator<f64>;
pub type CMatrix = hilbert::CMatrix<f64>;

pub type QuantumContext = frames::QuantumContext<f64>;
pub type Frame = frames::Frame<f64>;
pub type KsInstance = kochen_specker::KsInstance<f64>;

pub type PriceBook = coherence::PriceBook<Rational>;
pub type BetPortfolio = coherence::BetPortfolio<Rational>;
pub type ProbabilityMeasure = coherence::ProbabilityMeasure<Rational>;
pub type CoherenceVerdict = coherence::CoherenceVerdict<Rational>;
