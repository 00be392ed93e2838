//! Quantum betting contexts and probability frames.
//!
//! A [`QuantumContext`] is an orthonormal basis whose vectors are the atoms of
//! the context's sample space; an event is a subset of the basis and maps to
//! the projector `Π_E = Σ_{ψ∈E} |ψ⟩⟨ψ|`. A [`Frame`] assigns a probability
//! distribution to every context independently. Frames store atom-level values
//! only, so additivity inside a context holds by construction.

use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

use crate::events::{BettingContext, Event, EventError, SampleSpace};
use crate::hilbert::{
    born, check_orthonormal, hermitian_eigen, CMatrix, DensityOperator, HilbertError, Projector,
    StateVector,
};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Event(#[from] EventError),
    #[error("basis for context {id:?} has {found} vectors in dimension {dim}")]
    IncompleteBasis { id: String, dim: usize, found: usize },
    #[error("frame needs at least one context")]
    NoContexts,
    #[error("duplicate context id {0:?}")]
    DuplicateContext(String),
    #[error("unknown context {0:?}")]
    UnknownContext(String),
    #[error("context {id:?} has dimension {found}, expected {expected}")]
    DimMismatch { id: String, expected: usize, found: usize },
    #[error("context {id:?} needs {expected} atom probabilities, got {found}")]
    AssignmentLength { id: String, expected: usize, found: usize },
    #[error("context {id:?}: {detail}")]
    Axiom { id: String, detail: String },
    #[error("event does not belong to context {0:?}")]
    ForeignEvent(String),
    #[error("events have different projectors (max-norm distance {distance:.3e})")]
    ProjectorsDiffer { distance: f64 },
    #[error("prices are equal ({price}); no book exists")]
    NoBook { price: f64 },
}

/// Orthonormal basis viewed as a betting context.
#[derive(Clone, Debug)]
pub struct QuantumContext<T: Real> {
    context: BettingContext,
    basis: Vec<StateVector<T>>,
    atom_projectors: Vec<Projector<T>>,
}

impl<T: Real> QuantumContext<T> {
    /// Atoms are labelled by basis index.
    pub fn from_basis(id: impl Into<String>, basis: Vec<StateVector<T>>) -> Result<Self, FrameError> {
        let labels = (0..basis.len()).map(|i| i.to_string()).collect();
        Self::with_labels(id, basis, labels)
    }

    pub fn with_labels(
        id: impl Into<String>,
        basis: Vec<StateVector<T>>,
        labels: Vec<String>,
    ) -> Result<Self, FrameError> {
        let id = id.into();
        let dim = basis.first().map(StateVector::dim).unwrap_or(0);
        if basis.is_empty() || basis.len() != dim {
            return Err(FrameError::IncompleteBasis {
                id,
                dim,
                found: basis.len(),
            });
        }
        check_orthonormal(&basis)?;
        let space = SampleSpace::new(labels)?;
        if space.size() != dim {
            return Err(FrameError::IncompleteBasis {
                id,
                dim,
                found: space.size(),
            });
        }
        let atom_projectors = basis.iter().map(StateVector::projector).collect();
        Ok(QuantumContext {
            context: BettingContext::new(id, space),
            basis,
            atom_projectors,
        })
    }

    pub fn id(&self) -> &str {
        &self.context.id
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn space(&self) -> &SampleSpace {
        &self.context.space
    }

    pub fn betting_context(&self) -> &BettingContext {
        &self.context
    }

    pub fn basis(&self) -> &[StateVector<T>] {
        &self.basis
    }

    pub fn atom_projector(&self, i: usize) -> &Projector<T> {
        &self.atom_projectors[i]
    }

    pub fn event(&self, labels: &[&str]) -> Result<Event, FrameError> {
        Ok(self.space().event_from_labels(labels)?)
    }

    /// `Π_E`, composed from the atom projectors.
    pub fn event_projector(&self, e: &Event) -> Result<Projector<T>, FrameError> {
        if !e.space().same_as(self.space()) {
            return Err(FrameError::ForeignEvent(self.id().to_string()));
        }
        let mut m = CMatrix::zeros(self.dim());
        for i in e.indices() {
            m = &m + self.atom_projectors[i].matrix();
        }
        Ok(Projector::from_matrix(m)?)
    }
}

/// Per-context probability assignments `p(E|B)`.
#[derive(Clone, Debug)]
pub struct Frame<T: Real> {
    contexts: Vec<QuantumContext<T>>,
    assignments: Vec<Vec<T>>,
}

impl<T: Real> Frame<T> {
    /// Validates that every context shares one dimension and that each
    /// context's atom probabilities are nonnegative and sum to one.
    pub fn new(contexts: Vec<QuantumContext<T>>, assignments: Vec<Vec<T>>) -> Result<Self, FrameError> {
        let dim = contexts.first().ok_or(FrameError::NoContexts)?.dim();
        let tol = T::structural_tol();
        for (i, c) in contexts.iter().enumerate() {
            if contexts[..i].iter().any(|o| o.id() == c.id()) {
                return Err(FrameError::DuplicateContext(c.id().to_string()));
            }
            if c.dim() != dim {
                return Err(FrameError::DimMismatch {
                    id: c.id().to_string(),
                    expected: dim,
                    found: c.dim(),
                });
            }
        }
        if assignments.len() != contexts.len() {
            return Err(FrameError::NoContexts);
        }
        let mut clean = Vec::with_capacity(assignments.len());
        for (c, probs) in contexts.iter().zip(assignments) {
            if probs.len() != dim {
                return Err(FrameError::AssignmentLength {
                    id: c.id().to_string(),
                    expected: dim,
                    found: probs.len(),
                });
            }
            if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(**p >= -tol)) {
                return Err(FrameError::Axiom {
                    id: c.id().to_string(),
                    detail: format!("atom {} has negative probability {}", c.space().labels()[i], p),
                });
            }
            let total = probs.iter().fold(T::zero(), |a, &p| a + p);
            if (total - T::one()).abs() > tol {
                return Err(FrameError::Axiom {
                    id: c.id().to_string(),
                    detail: format!("probabilities sum to {total}, not 1"),
                });
            }
            clean.push(probs.into_iter().map(|p| p.max(T::zero())).collect());
        }
        Ok(Frame {
            contexts,
            assignments: clean,
        })
    }

    pub fn dim(&self) -> usize {
        self.contexts[0].dim()
    }

    pub fn contexts(&self) -> &[QuantumContext<T>] {
        &self.contexts
    }

    pub fn context(&self, id: &str) -> Result<(usize, &QuantumContext<T>), FrameError> {
        self.contexts
            .iter()
            .enumerate()
            .find(|(_, c)| c.id() == id)
            .ok_or_else(|| FrameError::UnknownContext(id.to_string()))
    }

    pub fn atom_probs(&self, context: usize) -> &[T] {
        &self.assignments[context]
    }

    /// `p(E|B)` by additivity over atoms.
    pub fn prob(&self, context: usize, e: &Event) -> Result<T, FrameError> {
        let c = &self.contexts[context];
        if !e.space().same_as(c.space()) {
            return Err(FrameError::ForeignEvent(c.id().to_string()));
        }
        Ok(e
            .indices()
            .fold(T::zero(), |acc, i| acc + self.assignments[context][i]))
    }
}

/// The Born frame `p(E|B) = Tr[Π_E ρ]` over the given contexts.
pub fn born_frame<T: Real>(
    rho: &DensityOperator<T>,
    contexts: Vec<QuantumContext<T>>,
) -> Result<Frame<T>, FrameError> {
    let mut assignments = Vec::with_capacity(contexts.len());
    for c in &contexts {
        if c.dim() != rho.dim() {
            return Err(FrameError::DimMismatch {
                id: c.id().to_string(),
                expected: rho.dim(),
                found: c.dim(),
            });
        }
        let mut probs = (0..c.dim())
            .map(|i| born(c.atom_projector(i), rho))
            .collect::<Result<Vec<T>, _>>()?;
        // Renormalize away rounding so the axiom check is exact to working precision.
        let total = probs.iter().fold(T::zero(), |a, &p| a + p);
        for p in probs.iter_mut() {
            *p = *p / total;
        }
        assignments.push(probs);
    }
    Frame::new(contexts, assignments)
}

/// Two events from different contexts with the same projector.
#[derive(Clone, Debug, PartialEq)]
pub struct EventMatch<T> {
    pub context_a: String,
    pub event_a: Vec<String>,
    pub prob_a: T,
    pub context_b: String,
    pub event_b: Vec<String>,
    pub prob_b: T,
    pub delta: T,
}

#[derive(Clone, Debug)]
pub struct NoncontextualityReport<T> {
    pub noncontextual: bool,
    pub violations: Vec<EventMatch<T>>,
    /// Number of cross-context event pairs with equal projectors.
    pub matched_pairs: usize,
}

/// Maximum number of shared blocks for which every union is listed.
const MAX_LISTED_BLOCKS: usize = 16;

/// Shared blocks between two contexts: connected components of the
/// "nonzero overlap" graph between their bases. Two events have equal
/// projectors exactly when they are the same union of blocks.
fn shared_blocks<T: Real>(a: &QuantumContext<T>, b: &QuantumContext<T>) -> Vec<(Vec<usize>, Vec<usize>)> {
    let d = a.dim();
    let tol = T::structural_tol();
    // Union-find over 2d nodes: a's atoms then b's atoms.
    let mut parent: Vec<usize> = (0..2 * d).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..d {
        for j in 0..d {
            if a.basis[i].inner(&b.basis[j]).norm() > tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, d + j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut blocks: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
    for node in 0..2 * d {
        let root = find(&mut parent, node);
        let idx = match blocks.iter().position(|(r, _, _)| *r == root) {
            Some(k) => k,
            None => {
                blocks.push((root, Vec::new(), Vec::new()));
                blocks.len() - 1
            }
        };
        if node < d {
            blocks[idx].1.push(node);
        } else {
            blocks[idx].2.push(node - d);
        }
    }
    blocks
        .into_iter()
        .map(|(_, ea, eb)| (ea, eb))
        .filter(|(ea, eb)| {
            // Blocks are equal-projector pairs up to tolerance; confirm directly.
            if ea.len() != eb.len() {
                return false;
            }
            let ev_a = a.space().event_from_indices(ea.iter().copied()).unwrap();
            let ev_b = b.space().event_from_indices(eb.iter().copied()).unwrap();
            let pa = a.event_projector(&ev_a).unwrap();
            let pb = b.event_projector(&ev_b).unwrap();
            pa.approx_eq(&pb, tol)
        })
        .collect()
}

/// Compare every pair of events from different contexts whose projectors
/// coincide, reporting those whose probabilities differ by more than `tol`.
pub fn check_noncontextual<T: Real>(frame: &Frame<T>, tol: T) -> NoncontextualityReport<T> {
    let mut violations = Vec::new();
    let mut matched_pairs = 0;
    let mut noncontextual = true;
    let n = frame.contexts.len();
    for ia in 0..n {
        for ib in (ia + 1)..n {
            let (a, b) = (&frame.contexts[ia], &frame.contexts[ib]);
            let blocks = shared_blocks(a, b);
            let deltas: Vec<(T, T, T)> = blocks
                .iter()
                .map(|(ea, eb)| {
                    let pa = ea.iter().fold(T::zero(), |s, &i| s + frame.assignments[ia][i]);
                    let pb = eb.iter().fold(T::zero(), |s, &i| s + frame.assignments[ib][i]);
                    (pa, pb, pa - pb)
                })
                .collect();
            // Largest |Δ| over all unions of blocks.
            let pos = deltas.iter().fold(T::zero(), |s, d| s + d.2.max(T::zero()));
            let neg = deltas.iter().fold(T::zero(), |s, d| s + (-d.2).max(T::zero()));
            if pos.max(neg) > tol {
                noncontextual = false;
            }
            let k = blocks.len();
            matched_pairs += (1usize << k.min(usize::BITS as usize - 1)) - 1;
            let unions: Box<dyn Iterator<Item = u64>> = if k <= MAX_LISTED_BLOCKS {
                Box::new(1..(1u64 << k))
            } else {
                Box::new((0..k).map(|i| 1u64 << i))
            };
            for mask in unions {
                let mut ea = Vec::new();
                let mut eb = Vec::new();
                let (mut pa, mut pb) = (T::zero(), T::zero());
                for (bi, (xa, xb)) in blocks.iter().enumerate() {
                    if mask >> bi & 1 == 1 {
                        ea.extend_from_slice(xa);
                        eb.extend_from_slice(xb);
                        pa = pa + deltas[bi].0;
                        pb = pb + deltas[bi].1;
                    }
                }
                let delta = (pa - pb).abs();
                if delta > tol {
                    ea.sort_unstable();
                    eb.sort_unstable();
                    violations.push(EventMatch {
                        context_a: a.id().to_string(),
                        event_a: ea.iter().map(|&i| a.space().labels()[i].clone()).collect(),
                        prob_a: pa,
                        context_b: b.id().to_string(),
                        event_b: eb.iter().map(|&i| b.space().labels()[i].clone()).collect(),
                        prob_b: pb,
                        delta,
                    });
                }
            }
        }
    }
    NoncontextualityReport {
        noncontextual: noncontextual && violations.is_empty(),
        violations,
        matched_pairs,
    }
}

/// Result of fitting a density operator to a frame.
#[derive(Clone, Debug)]
pub struct GleasonFit<T: Real> {
    pub rho_hat: DensityOperator<T>,
    /// Root mean square of `p(E|B) − Tr[Π_E ρ̂]` over all (context, atom) pairs.
    pub residual: T,
    /// Rank of the map from Hermitian matrices to atom probabilities.
    pub constraint_rank: usize,
    /// `constraint_rank < d²`: the frame does not pin down a unique operator.
    pub degenerate: bool,
    /// `d = 2`: noncontextual frames need not be of Born form.
    pub low_dimension: bool,
    pub iterations: usize,
}

const FIT_MAX_ITERATIONS: usize = 500;

/// Orthonormal (Hilbert-Schmidt) basis of the d×d Hermitian matrices.
fn hermitian_basis<T: Real>(d: usize) -> Vec<CMatrix<T>> {
    let mut out = Vec::with_capacity(d * d);
    let r = T::one() / T::lit(2.0).sqrt();
    for j in 0..d {
        let mut m = CMatrix::zeros(d);
        m[(j, j)] = Complex::new(T::one(), T::zero());
        out.push(m);
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = CMatrix::zeros(d);
            m[(j, k)] = Complex::new(r, T::zero());
            m[(k, j)] = Complex::new(r, T::zero());
            out.push(m);
            let mut m = CMatrix::zeros(d);
            m[(j, k)] = Complex::new(T::zero(), r);
            m[(k, j)] = Complex::new(T::zero(), -r);
            out.push(m);
        }
    }
    out
}

fn compose<T: Real>(basis: &[CMatrix<T>], x: &[T]) -> CMatrix<T> {
    let d = basis[0].dim();
    basis
        .iter()
        .zip(x)
        .fold(CMatrix::zeros(d), |acc, (h, &c)| &acc + &h.scale_real(c))
}

fn decompose<T: Real>(basis: &[CMatrix<T>], m: &CMatrix<T>) -> Vec<T> {
    basis.iter().map(|h| h.trace_product(m).re).collect()
}

/// Euclidean projection of `v` onto the probability simplex.
fn project_to_simplex<T: Real>(v: &[T]) -> Vec<T> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (i, &u) in sorted.iter().enumerate() {
        cumsum = cumsum + u;
        let t = (cumsum - T::one()) / T::from_usize(i + 1).unwrap();
        if u - t > T::zero() {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(T::zero())).collect()
}

/// Nearest density operator in Frobenius norm.
fn project_to_density<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let (values, vecs) = hermitian_eigen(m);
    let clipped = project_to_simplex(&values);
    let d = m.dim();
    let mut out = CMatrix::zeros(d);
    for (j, &l) in clipped.iter().enumerate() {
        if l > T::zero() {
            let v = vecs.column(j);
            out = &out + &CMatrix::outer(&v, &v).scale_real(l);
        }
    }
    out.hermitian_part()
}

/// Least-squares fit of a density operator to the frame's atom probabilities.
///
/// Starts from the minimum-norm unconstrained least-squares solution, projects
/// onto the density operators, then runs projected gradient descent until the
/// residual changes by less than `1e-12` or the iteration cap is reached.
pub fn fit_density<T: Real>(frame: &Frame<T>) -> Result<GleasonFit<T>, FrameError> {
    let d = frame.dim();
    let basis = hermitian_basis::<T>(d);
    let k = basis.len();
    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut targets: Vec<T> = Vec::new();
    for (ci, c) in frame.contexts.iter().enumerate() {
        for i in 0..d {
            let p = c.atom_projector(i).matrix();
            rows.push(basis.iter().map(|h| h.trace_product(p).re).collect());
            targets.push(frame.assignments[ci][i]);
        }
    }
    let m = rows.len();
    let mut ata = CMatrix::<T>::zeros(k);
    let mut atb = vec![T::zero(); k];
    for (row, &t) in rows.iter().zip(&targets) {
        for a in 0..k {
            atb[a] = atb[a] + row[a] * t;
            for b in 0..k {
                ata[(a, b)] = ata[(a, b)] + Complex::new(row[a] * row[b], T::zero());
            }
        }
    }
    let (evals, evecs) = hermitian_eigen(&ata);
    let lmax = evals[0].max(T::min_positive_value());
    let cutoff = lmax * T::lit(1e-10);
    let constraint_rank = evals.iter().filter(|&&l| l > cutoff).count();
    // Pseudo-inverse solution x = Σ v vᵀ Aᵀb / λ over the significant spectrum.
    let mut x = vec![T::zero(); k];
    for (j, &l) in evals.iter().enumerate() {
        if l > cutoff {
            let v: Vec<T> = evecs.column(j).iter().map(|z| z.re).collect();
            let coef = v.iter().zip(&atb).fold(T::zero(), |s, (a, b)| s + *a * *b) / l;
            for (xi, vi) in x.iter_mut().zip(&v) {
                *xi = *xi + coef * *vi;
            }
        }
    }
    let residual_of = |x: &[T]| -> T {
        let sq = rows.iter().zip(&targets).fold(T::zero(), |s, (row, &t)| {
            let pred = row.iter().zip(x).fold(T::zero(), |a, (r, v)| a + *r * *v);
            s + (pred - t) * (pred - t)
        });
        (sq / T::from_usize(m).unwrap()).sqrt()
    };
    let mut x = decompose(&basis, &project_to_density(&compose(&basis, &x)));
    let mut residual = residual_of(&x);
    let step = T::one() / lmax;
    let mut iterations = 0;
    while iterations < FIT_MAX_ITERATIONS {
        iterations += 1;
        let mut grad = vec![T::zero(); k];
        for (row, &t) in rows.iter().zip(&targets) {
            let err = row.iter().zip(&x).fold(T::zero(), |a, (r, v)| a + *r * *v) - t;
            for (g, r) in grad.iter_mut().zip(row) {
                *g = *g + err * *r;
            }
        }
        let moved: Vec<T> = x.iter().zip(&grad).map(|(&v, &g)| v - step * g).collect();
        let next = decompose(&basis, &project_to_density(&compose(&basis, &moved)));
        let next_residual = residual_of(&next);
        let change = (residual - next_residual).abs();
        x = next;
        residual = next_residual;
        if change < T::lit(1e-12) {
            break;
        }
    }
    let rho = compose(&basis, &x).hermitian_part();
    let rho_hat = DensityOperator::new(rho)?;
    Ok(GleasonFit {
        rho_hat,
        residual,
        constraint_rank,
        degenerate: constraint_rank < k,
        low_dimension: d < 3,
        iterations,
    })
}

/// Ticket in a cross-context book.
#[derive(Clone, Debug, PartialEq)]
pub struct Ticket<T> {
    pub context: String,
    pub event: Vec<String>,
    pub price: T,
}

/// Two-ticket book exploiting `p(E|B) ≠ p(F|B')` for `Π_E = Π_F`.
///
/// Valid only if the agent accepts that a ticket on `F` would have paid
/// whenever `E` occurred and vice versa.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossContextBook<T> {
    /// The bookie buys this (cheaper) ticket from the agent.
    pub bookie_buys: Ticket<T>,
    /// The bookie sells this (dearer) ticket to the agent.
    pub bookie_sells: Ticket<T>,
    pub sure_loss_per_unit: T,
    pub conditional_on: &'static str,
}

pub const COUNTERFACTUAL_CAVEAT: &str = "conditional on counterfactual equivalence";

pub fn cross_context_dutch_book<T: Real>(
    frame: &Frame<T>,
    e: &Event,
    context_b: &str,
    f: &Event,
    context_b2: &str,
) -> Result<CrossContextBook<T>, FrameError> {
    let (ib, cb) = frame.context(context_b)?;
    let (ib2, cb2) = frame.context(context_b2)?;
    let pe = cb.event_projector(e)?;
    let pf = cb2.event_projector(f)?;
    if !pe.approx_eq(&pf, T::structural_tol()) {
        return Err(FrameError::ProjectorsDiffer {
            distance: pe.distance(&pf).to_f64().unwrap_or(f64::NAN),
        });
    }
    let p = frame.prob(ib, e)?;
    let q = frame.prob(ib2, f)?;
    if (p - q).abs() <= T::composite_tol() {
        return Err(FrameError::NoBook {
            price: p.to_f64().unwrap_or(f64::NAN),
        });
    }
    let te = Ticket {
        context: context_b.to_string(),
        event: e.atoms_of(),
        price: p,
    };
    let tf = Ticket {
        context: context_b2.to_string(),
        event: f.atoms_of(),
        price: q,
    };
    let (bookie_buys, bookie_sells) = if p < q { (te, tf) } else { (tf, te) };
    Ok(CrossContextBook {
        sure_loss_per_unit: bookie_sells.price - bookie_buys.price,
        bookie_buys,
        bookie_sells,
        conditional_on: COUNTERFACTUAL_CAVEAT,
    })
}

impl<T: Real> NoncontextualityReport<T> {
    pub fn max_delta(&self) -> T {
        self.violations
            .iter()
            .fold(T::zero(), |m, v| m.max(v.delta))
    }
}

impl<T: Zero> Default for NoncontextualityReport<T> {
    fn default() -> Self {
        NoncontextualityReport {
            noncontextual: true,
            violations: Vec::new(),
            matched_pairs: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_basis, random_density, seeded};

    fn e3(i: usize) -> StateVector<f64> {
        StateVector::basis(3, i)
    }

    fn b_context() -> QuantumContext<f64> {
        QuantumContext::with_labels(
            "B",
            vec![e3(0), e3(1), e3(2)],
            vec!["0".into(), "1".into(), "2".into()],
        )
        .unwrap()
    }

    fn b_prime_context() -> QuantumContext<f64> {
        let plus = StateVector::from_real(&[1.0, 1.0, 0.0]).unwrap();
        let minus = StateVector::from_real(&[1.0, -1.0, 0.0]).unwrap();
        QuantumContext::with_labels(
            "B'",
            vec![plus, minus, e3(2)],
            vec!["+".into(), "-".into(), "2".into()],
        )
        .unwrap()
    }

    #[test]
    fn context_examples() {
        assert_eq!(b_context().dim(), 3);
        assert_eq!(b_prime_context().space().labels(), &["+", "-", "2"]);
        let err = QuantumContext::from_basis("short", vec![e3(0), e3(1)]).unwrap_err();
        assert!(matches!(err, FrameError::IncompleteBasis { found: 2, .. }));
        let skew = StateVector::from_real(&[1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(
            QuantumContext::from_basis("skew", vec![e3(0), skew, e3(2)]),
            Err(FrameError::Hilbert(HilbertError::NonOrthogonal { .. }))
        ));
    }

    #[test]
    fn projector_algebra_matches_event_algebra() {
        let mut rng = seeded(3);
        for d in 2..=4 {
            let c = QuantumContext::from_basis("c", haar_basis::<f64, _>(d, &mut rng)).unwrap();
            let full = c.event_projector(&c.space().full_event()).unwrap();
            assert!(full.approx_eq(&crate::hilbert::Projector::identity(d), 1e-12));
            let events: Vec<Event> = c.space().all_events().collect();
            for a in &events {
                let pa = c.event_projector(a).unwrap();
                let not = c.event_projector(&a.not()).unwrap();
                assert!(not.approx_eq(&pa.complement(), 1e-12));
                for b in &events {
                    let pb = c.event_projector(b).unwrap();
                    let and = c.event_projector(&a.and(b).unwrap()).unwrap();
                    assert!((&(pa.matrix() * pb.matrix()) - and.matrix()).max_abs() < 1e-12);
                    let or = c.event_projector(&a.or(b).unwrap()).unwrap();
                    let expect = &(pa.matrix() + pb.matrix()) - &(pa.matrix() * pb.matrix());
                    assert!((&expect - or.matrix()).max_abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn born_frame_identities() {
        let rho = DensityOperator::pure(&e3(0));
        let f = born_frame(&rho, vec![b_context(), b_prime_context()]).unwrap();
        let b = &f.contexts()[0];
        let bp = &f.contexts()[1];
        let p2b = f.prob(0, &b.event(&["2"]).unwrap()).unwrap();
        let p2bp = f.prob(1, &bp.event(&["2"]).unwrap()).unwrap();
        assert_eq!(p2b, 0.0);
        assert_eq!(p2bp, 0.0);
        let p01 = f.prob(0, &b.event(&["0", "1"]).unwrap()).unwrap();
        let ppm = f.prob(1, &bp.event(&["+", "-"]).unwrap()).unwrap();
        assert!((p01 - 1.0).abs() < 1e-12 && (ppm - 1.0).abs() < 1e-12);

        let mixed = DensityOperator::maximally_mixed(3);
        let f = born_frame(&mixed, vec![b_context(), b_prime_context()]).unwrap();
        for c in 0..2 {
            for &p in f.atom_probs(c) {
                assert!((p - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    fn contextual_frame() -> Frame<f64> {
        Frame::new(
            vec![b_context(), b_prime_context()],
            vec![vec![0.5, 0.3, 0.2], vec![0.35, 0.35, 0.3]],
        )
        .unwrap()
    }

    #[test]
    fn noncontextuality_examples() {
        let mut rng = seeded(5);
        let rho = random_density::<f64, _>(3, &mut rng);
        let f = born_frame(&rho, vec![b_context(), b_prime_context()]).unwrap();
        let r = check_noncontextual(&f, 1e-8);
        assert!(r.noncontextual);
        // {2}, {0,1}, and the full space.
        assert_eq!(r.matched_pairs, 3);

        let r = check_noncontextual(&contextual_frame(), 1e-8);
        assert!(!r.noncontextual);
        let v = r
            .violations
            .iter()
            .find(|v| v.event_a == ["2"] && v.event_b == ["2"])
            .unwrap();
        assert!((v.delta - 0.1).abs() < 1e-12);
        // {0,1} vs {+,-} inherits the same gap; the full space does not.
        assert_eq!(r.violations.len(), 2);

        // A single context has nothing to compare.
        let lone = Frame::new(vec![b_context()], vec![vec![0.2, 0.3, 0.5]]).unwrap();
        assert!(check_noncontextual(&lone, 1e-8).noncontextual);
    }

    #[test]
    fn unrelated_contexts_only_share_the_certain_event() {
        let mut rng = seeded(9);
        let a = QuantumContext::from_basis("a", haar_basis::<f64, _>(3, &mut rng)).unwrap();
        let b = QuantumContext::from_basis("b", haar_basis::<f64, _>(3, &mut rng)).unwrap();
        let f = Frame::new(vec![a, b], vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let r = check_noncontextual(&f, 1e-8);
        assert!(r.noncontextual);
        assert_eq!(r.matched_pairs, 1);
    }

    #[test]
    fn frame_axioms_enforced() {
        let bad = Frame::new(vec![b_context()], vec![vec![0.5, 0.6, -0.1]]);
        assert!(matches!(bad, Err(FrameError::Axiom { .. })));
        let bad = Frame::new(vec![b_context()], vec![vec![0.5, 0.6, 0.1]]);
        assert!(matches!(bad, Err(FrameError::Axiom { .. })));
        let bad = Frame::new(vec![b_context(), b_context()], vec![vec![1.0, 0.0, 0.0]; 2]);
        assert!(matches!(bad, Err(FrameError::DuplicateContext(_))));
    }

    #[test]
    fn fit_uniform_frame() {
        let mut rng = seeded(1);
        for d in 2..=4 {
            let ctxs = (0..3)
                .map(|i| QuantumContext::from_basis(format!("c{i}"), haar_basis::<f64, _>(d, &mut rng)).unwrap())
                .collect();
            let f = born_frame(&DensityOperator::maximally_mixed(d), ctxs).unwrap();
            let fit = fit_density(&f).unwrap();
            assert!(fit.residual <= 1e-9);
            let diff = fit.rho_hat.matrix() - DensityOperator::<f64>::maximally_mixed(d).matrix();
            assert!(diff.frobenius() <= 1e-9);
            assert_eq!(fit.low_dimension, d == 2);
        }
    }

    #[test]
    fn fit_round_trip_random_state() {
        let mut rng = seeded(21);
        let rho = random_density::<f64, _>(3, &mut rng);
        let ctxs = (0..6)
            .map(|i| QuantumContext::from_basis(format!("c{i}"), haar_basis::<f64, _>(3, &mut rng)).unwrap())
            .collect();
        let f = born_frame(&rho, ctxs).unwrap();
        let fit = fit_density(&f).unwrap();
        assert_eq!(fit.constraint_rank, 9);
        assert!(!fit.degenerate);
        assert!((fit.rho_hat.matrix() - rho.matrix()).frobenius() <= 1e-6);
        assert!(fit.residual <= 1e-8);
    }

    #[test]
    fn fit_contextual_frame_has_residual() {
        let fit = fit_density(&contextual_frame()).unwrap();
        // Any single operator gives one value x to Π_{|2⟩}; the two constraints
        // 0.2 and 0.3 leave at least (0.05² + 0.05²) of squared error over 6 pairs.
        let bound = (2.0 * 0.05f64 * 0.05 / 6.0).sqrt();
        assert!(fit.residual >= bound - 1e-9, "{}", fit.residual);
        assert!(fit.residual >= 0.01);
        assert!(fit.degenerate);
    }

    #[test]
    fn cross_context_book_examples() {
        let f = Frame::new(
            vec![b_context(), b_prime_context()],
            vec![vec![0.3, 0.3, 0.4], vec![0.2, 0.2, 0.6]],
        )
        .unwrap();
        let e = f.contexts()[0].event(&["2"]).unwrap();
        let g = f.contexts()[1].event(&["2"]).unwrap();
        let book = cross_context_dutch_book(&f, &e, "B", &g, "B'").unwrap();
        assert!((book.sure_loss_per_unit - 0.2).abs() < 1e-12);
        assert_eq!(book.bookie_buys.context, "B");
        assert_eq!(book.bookie_sells.context, "B'");
        assert_eq!(book.conditional_on, COUNTERFACTUAL_CAVEAT);

        let even = Frame::new(
            vec![b_context(), b_prime_context()],
            vec![vec![0.3, 0.3, 0.4], vec![0.3, 0.3, 0.4]],
        )
        .unwrap();
        let e = even.contexts()[0].event(&["2"]).unwrap();
        let g = even.contexts()[1].event(&["2"]).unwrap();
        assert!(matches!(
            cross_context_dutch_book(&even, &e, "B", &g, "B'"),
            Err(FrameError::NoBook { .. })
        ));
        let zero = even.contexts()[0].event(&["0"]).unwrap();
        assert!(matches!(
            cross_context_dutch_book(&even, &zero, "B", &g, "B'"),
            Err(FrameError::ProjectorsDiffer { .. })
        ));
    }
}
