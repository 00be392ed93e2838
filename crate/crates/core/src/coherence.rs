//! Dutch-book coherence within a single betting context.
//!
//! A book of fair prices is coherent iff some probability measure on the
//! context's atoms reproduces every price. Both directions are decided exactly:
//! the primal feasibility problem yields the extension, and when it is empty the
//! dual problem (minimize the agent's best-case payoff over stakes in `[-1, 1]`)
//! yields a normalized Dutch book.

use thiserror::Error;

use crate::events::{BettingContext, Event};
use crate::scalar::Exact;
use crate::simplex::{self, LinearProgram, LpOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoherenceError<T: Exact> {
    #[error("price book is empty")]
    EmptyBook,
    #[error("priced event {0} does not belong to the context's sample space")]
    ForeignEvent(String),
    #[error("event {0} is priced more than once")]
    DuplicateEvent(String),
    #[error("stake on unpriced event {0}")]
    UnpricedStake(String),
    #[error("outcome index {0} is not an atom of the context")]
    UnknownOutcome(usize),
    #[error("book is incoherent: guaranteed loss {loss}")]
    Incoherent { witness: BetPortfolio<T>, loss: T },
}

/// Fair prices an agent quotes for unit tickets on events of one context.
#[derive(Debug, Clone)]
pub struct PriceBook<T> {
    pub context: BettingContext,
    pub prices: Vec<(Event, T)>,
}

impl<T: Exact> PriceBook<T> {
    pub fn new(context: BettingContext) -> Self {
        PriceBook {
            context,
            prices: Vec::new(),
        }
    }

    /// Set the price of `event`, replacing any earlier price for it.
    pub fn with_price(mut self, event: Event, price: T) -> Self {
        match self.prices.iter_mut().find(|(e, _)| *e == event) {
            Some(slot) => slot.1 = price,
            None => self.prices.push((event, price)),
        }
        self
    }

    pub fn price_of(&self, event: &Event) -> Option<&T> {
        self.prices.iter().find(|(e, _)| e == event).map(|(_, p)| p)
    }

    fn validate(&self) -> Result<(), CoherenceError<T>> {
        if self.prices.is_empty() {
            return Err(CoherenceError::EmptyBook);
        }
        for (i, (e, _)) in self.prices.iter().enumerate() {
            if !e.space().same_as(&self.context.space) {
                return Err(CoherenceError::ForeignEvent(format!("{e:?}")));
            }
            if self.prices[..i].iter().any(|(f, _)| f == e) {
                return Err(CoherenceError::DuplicateEvent(format!("{e:?}")));
            }
        }
        Ok(())
    }
}

/// Signed ticket counts: positive buys, negative sells.
#[derive(Debug, Clone, PartialEq)]
pub struct BetPortfolio<T> {
    pub stakes: Vec<(Event, T)>,
}

impl<T: Exact> BetPortfolio<T> {
    pub fn stake_of(&self, event: &Event) -> Option<&T> {
        self.stakes.iter().find(|(e, _)| e == event).map(|(_, s)| s)
    }
}

/// Probability of each atom of a context. Sums to exactly one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure<T> {
    pub context: BettingContext,
    pub atom_probs: Vec<T>,
}

impl<T: Exact> ProbabilityMeasure<T> {
    pub fn prob(&self, event: &Event) -> T {
        event
            .indices()
            .fold(T::zero(), |acc, i| acc + self.atom_probs[i].clone())
    }
}

impl PartialEq for BettingContext {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.space.same_as(&other.space)
    }
}

#[derive(Debug, Clone)]
pub struct CoherenceVerdict<T> {
    pub coherent: bool,
    pub witness: Option<BetPortfolio<T>>,
    pub guaranteed_loss: Option<T>,
    pub extension: Option<ProbabilityMeasure<T>>,
}

/// Decide whether any portfolio of fair bets guarantees the agent a loss.
pub fn check_coherence<T: Exact>(book: &PriceBook<T>) -> Result<CoherenceVerdict<T>, CoherenceError<T>> {
    book.validate()?;
    let (a, b) = measure_constraints(book);
    let n = book.context.space.size();
    if simplex::feasible_point(&a, &b, n).is_some() {
        let atom_probs =
            simplex::lexicographic_min(&a, &b, n).expect("bounded nonempty polytope");
        return Ok(CoherenceVerdict {
            coherent: true,
            witness: None,
            guaranteed_loss: None,
            extension: Some(ProbabilityMeasure {
                context: book.context.clone(),
                atom_probs,
            }),
        });
    }
    let (witness, loss) = dutch_book(book);
    Ok(CoherenceVerdict {
        coherent: false,
        witness: Some(witness),
        guaranteed_loss: Some(loss),
        extension: None,
    })
}

/// The lexicographically smallest measure consistent with every price.
pub fn extend_to_measure<T: Exact>(book: &PriceBook<T>) -> Result<ProbabilityMeasure<T>, CoherenceError<T>> {
    let verdict = check_coherence(book)?;
    match verdict.extension {
        Some(m) => Ok(m),
        None => Err(CoherenceError::Incoherent {
            witness: verdict.witness.expect("incoherent verdict carries a witness"),
            loss: verdict.guaranteed_loss.expect("incoherent verdict carries a loss"),
        }),
    }
}

/// Agent's net payoff when `outcome` (an atom index) occurs.
pub fn settle<T: Exact>(
    portfolio: &BetPortfolio<T>,
    book: &PriceBook<T>,
    outcome: usize,
) -> Result<T, CoherenceError<T>> {
    if outcome >= book.context.space.size() {
        return Err(CoherenceError::UnknownOutcome(outcome));
    }
    let mut total = T::zero();
    for (e, stake) in &portfolio.stakes {
        let price = book
            .price_of(e)
            .ok_or_else(|| CoherenceError::UnpricedStake(format!("{e:?}")))?;
        let pays = if e.contains(outcome) { T::one() } else { T::zero() };
        total = total + stake.clone() * (pays - price.clone());
    }
    Ok(total)
}

// Rows: sum of atom probabilities is one, and each priced event sums to its price.
fn measure_constraints<T: Exact>(book: &PriceBook<T>) -> (Vec<Vec<T>>, Vec<T>) {
    let n = book.context.space.size();
    let mut a = vec![vec![T::one(); n]];
    let mut b = vec![T::one()];
    for (e, p) in &book.prices {
        a.push(
            (0..n)
                .map(|i| if e.contains(i) { T::one() } else { T::zero() })
                .collect(),
        );
        b.push(p.clone());
    }
    (a, b)
}

// Minimize t subject to payoff(ω) ≤ t for every atom ω and |stake| ≤ 1.
// Variables: u_k = stake_k + 1 ∈ [0, 2], t = t⁺ − t⁻, one slack per atom and
// one per stake bound.
fn dutch_book<T: Exact>(book: &PriceBook<T>) -> (BetPortfolio<T>, T) {
    let n_atoms = book.context.space.size();
    let k = book.prices.len();
    let n_vars = k + 2 + n_atoms + k;
    let two = T::from_int(2);
    let mut a = Vec::with_capacity(n_atoms + k);
    let mut b = Vec::with_capacity(n_atoms + k);
    for w in 0..n_atoms {
        let mut row = vec![T::zero(); n_vars];
        let mut rhs = T::zero();
        for (j, (e, p)) in book.prices.iter().enumerate() {
            let pays = if e.contains(w) { T::one() } else { T::zero() };
            let coef = pays - p.clone();
            rhs = rhs + coef.clone();
            row[j] = coef;
        }
        row[k] = -T::one();
        row[k + 1] = T::one();
        row[k + 2 + w] = T::one();
        a.push(row);
        b.push(rhs);
    }
    for j in 0..k {
        let mut row = vec![T::zero(); n_vars];
        row[j] = T::one();
        row[k + 2 + n_atoms + j] = T::one();
        a.push(row);
        b.push(two.clone());
    }
    let mut c = vec![T::zero(); n_vars];
    c[k] = T::one();
    c[k + 1] = -T::one();
    let (x, value) = match LinearProgram::new(a, b, c).solve() {
        LpOutcome::Optimal { x, value } => (x, value),
        other => unreachable!("stake-bounded dual is feasible and bounded: {other:?}"),
    };
    assert!(
        value.is_negative(),
        "infeasible measure problem must admit a Dutch book"
    );
    let stakes = book
        .prices
        .iter()
        .zip(&x)
        .filter_map(|((e, _), u)| {
            let s = u.clone() - T::one();
            (!s.is_zero()).then(|| (e.clone(), s))
        })
        .collect();
    (BetPortfolio { stakes }, -value)
}
