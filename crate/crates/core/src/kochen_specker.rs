//! Noncontextual 0/1 value assignments over families of orthonormal bases.
//!
//! An assignment gives every ray the value 0 or 1 so that each basis has
//! exactly one ray valued 1, with a ray keeping its value in every basis it
//! belongs to. [`search_assignment`] decides whether one exists by complete
//! backtracking with unit propagation.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::hilbert::{born, DensityOperator, HilbertError, StateVector};
use crate::random::{random_state, seeded};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KsError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("ray {ray} has dimension {found}, expected {expected}")]
    RayDim { ray: usize, expected: usize, found: usize },
    #[error("ray {0} is the zero vector")]
    ZeroRay(usize),
    #[error("basis {basis} references unknown ray {ray}")]
    UnknownRay { basis: usize, ray: usize },
    #[error("basis {basis} has {found} distinct rays, expected {expected}")]
    IncompleteBasis { basis: usize, expected: usize, found: usize },
    #[error("rays {a} and {b} in basis {basis} are not orthogonal")]
    NonOrthogonal { basis: usize, a: usize, b: usize },
    #[error("ray {0} appears in no basis")]
    UnusedRay(usize),
    #[error("assignment has {found} values for {expected} rays")]
    AssignmentLength { expected: usize, found: usize },
    #[error("basis {basis} has {ones} rays valued 1")]
    NotExactlyOne { basis: usize, ones: usize },
    #[error("the demonstration needs dimension at least 3, got {0}")]
    DimensionTooSmall(usize),
}

/// Rays and the bases they form, after deduplication up to global phase.
#[derive(Clone, Debug)]
pub struct KsInstance<T: Real> {
    dim: usize,
    rays: Vec<StateVector<T>>,
    bases: Vec<Vec<usize>>,
    exact: bool,
}

/// Ray amplitudes as exact complex rationals.
pub type ExactRay = Vec<Complex<BigRational>>;

impl<T: Real> KsInstance<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[StateVector<T>] {
        &self.rays
    }

    pub fn bases(&self) -> &[Vec<usize>] {
        &self.bases
    }

    /// Whether orthogonality was established in exact arithmetic.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Number of bases each ray belongs to.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.rays.len()];
        for b in &self.bases {
            for &r in b {
                m[r] += 1;
            }
        }
        m
    }

    /// Same instance with rays and bases reordered; used to test order independence.
    pub fn permuted(&self, ray_order: &[usize], basis_order: &[usize]) -> Self {
        // ray_order[new] = old
        let mut new_index = vec![0; ray_order.len()];
        for (new, &old) in ray_order.iter().enumerate() {
            new_index[old] = new;
        }
        KsInstance {
            dim: self.dim,
            rays: ray_order.iter().map(|&i| self.rays[i].clone()).collect(),
            bases: basis_order
                .iter()
                .map(|&b| self.bases[b].iter().map(|&r| new_index[r]).collect())
                .collect(),
            exact: self.exact,
        }
    }
}

/// Merge rays that agree up to phase; returns the kept rays and the old → new index map.
fn dedup_rays<T: Real>(rays: Vec<StateVector<T>>) -> (Vec<StateVector<T>>, Vec<usize>) {
    let threshold = T::one() - T::structural_tol();
    let mut kept: Vec<StateVector<T>> = Vec::new();
    let mut map = Vec::with_capacity(rays.len());
    for r in rays {
        match kept.iter().position(|k| k.inner(&r).norm() > threshold) {
            Some(i) => map.push(i),
            None => {
                map.push(kept.len());
                kept.push(r);
            }
        }
    }
    (kept, map)
}

fn finish_instance<T: Real>(
    dim: usize,
    rays: Vec<StateVector<T>>,
    map: Vec<usize>,
    bases: Vec<Vec<usize>>,
    exact: bool,
) -> Result<KsInstance<T>, KsError> {
    let mut out_bases = Vec::with_capacity(bases.len());
    for (bi, b) in bases.iter().enumerate() {
        let mut mapped: Vec<usize> = b.iter().map(|&r| map[r]).collect();
        mapped.sort_unstable();
        mapped.dedup();
        if mapped.len() != dim {
            return Err(KsError::IncompleteBasis {
                basis: bi,
                expected: dim,
                found: mapped.len(),
            });
        }
        if !exact {
            for (x, &a) in mapped.iter().enumerate() {
                for &c in &mapped[x + 1..] {
                    if rays[a].inner(&rays[c]).norm() > T::structural_tol() {
                        return Err(KsError::NonOrthogonal { basis: bi, a, b: c });
                    }
                }
            }
        }
        out_bases.push(mapped);
    }
    let mut used = vec![false; rays.len()];
    for b in &out_bases {
        for &r in b {
            used[r] = true;
        }
    }
    if let Some(r) = used.iter().position(|u| !u) {
        return Err(KsError::UnusedRay(r));
    }
    Ok(KsInstance {
        dim,
        rays,
        bases: out_bases,
        exact,
    })
}

fn check_basis_refs(n_rays: usize, bases: &[Vec<usize>]) -> Result<(), KsError> {
    for (bi, b) in bases.iter().enumerate() {
        if let Some(&r) = b.iter().find(|&&r| r >= n_rays) {
            return Err(KsError::UnknownRay { basis: bi, ray: r });
        }
    }
    Ok(())
}

/// Validate floating point rays and bases (orthogonality within tolerance).
pub fn build_instance<T: Real>(
    dim: usize,
    rays: Vec<StateVector<T>>,
    bases: Vec<Vec<usize>>,
) -> Result<KsInstance<T>, KsError> {
    if dim == 0 {
        return Err(KsError::ZeroDim);
    }
    for (i, r) in rays.iter().enumerate() {
        if r.dim() != dim {
            return Err(KsError::RayDim {
                ray: i,
                expected: dim,
                found: r.dim(),
            });
        }
    }
    check_basis_refs(rays.len(), &bases)?;
    let (rays, map) = dedup_rays(rays);
    finish_instance(dim, rays, map, bases, false)
}

fn exact_inner(a: &ExactRay, b: &ExactRay) -> Complex<BigRational> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| {
        let xc = Complex::new(x.re.clone(), -x.im.clone());
        acc + xc * y.clone()
    })
}

/// Validate rays with exact rational amplitudes. Orthogonality is checked
/// exactly; the rays are then normalized into floating point.
pub fn build_exact_instance<T: Real>(
    dim: usize,
    rays: Vec<ExactRay>,
    bases: Vec<Vec<usize>>,
) -> Result<KsInstance<T>, KsError> {
    if dim == 0 {
        return Err(KsError::ZeroDim);
    }
    for (i, r) in rays.iter().enumerate() {
        if r.len() != dim {
            return Err(KsError::RayDim {
                ray: i,
                expected: dim,
                found: r.len(),
            });
        }
        if r.iter().all(|z| z.is_zero()) {
            return Err(KsError::ZeroRay(i));
        }
    }
    check_basis_refs(rays.len(), &bases)?;
    // Parallel rays: |⟨a|b⟩|² = ⟨a|a⟩⟨b|b⟩ (Cauchy-Schwarz equality), exactly.
    let norms: Vec<BigRational> = rays.iter().map(|r| exact_inner(r, r).re).collect();
    let mut kept: Vec<usize> = Vec::new();
    let mut map = Vec::with_capacity(rays.len());
    for (i, r) in rays.iter().enumerate() {
        let same = kept.iter().position(|&k| {
            let ip = exact_inner(&rays[k], r);
            ip.norm_sqr() == norms[k].clone() * norms[i].clone()
        });
        match same {
            Some(j) => map.push(j),
            None => {
                map.push(kept.len());
                kept.push(i);
            }
        }
    }
    for (bi, b) in bases.iter().enumerate() {
        for (x, &a) in b.iter().enumerate() {
            for &c in &b[x + 1..] {
                if map[a] != map[c] && !exact_inner(&rays[a], &rays[c]).is_zero() {
                    return Err(KsError::NonOrthogonal {
                        basis: bi,
                        a: map[a],
                        b: map[c],
                    });
                }
            }
        }
    }
    let to_t = |q: &BigRational| T::lit(crate::scalar::rational_to_f64(q));
    let float_rays = kept
        .iter()
        .map(|&i| {
            let amps = rays[i].iter().map(|z| Complex::new(to_t(&z.re), to_t(&z.im))).collect();
            StateVector::normalized(amps).map_err(KsError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    finish_instance(dim, float_rays, map, bases, true)
}

/// Evidence of unsatisfiability by counting: each ray lies in an even number
/// of bases, so the 1s counted with multiplicity are even, yet there must be
/// exactly one per basis and the number of bases is odd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityObstruction {
    pub multiplicities: Vec<usize>,
    pub basis_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KsVerdict {
    pub satisfiable: bool,
    pub assignment: Option<Vec<bool>>,
    pub nodes_explored: u64,
    pub parity_obstruction: Option<ParityObstruction>,
}

/// Check exactly-one-per-basis. Per-ray consistency is implied by using one
/// value per ray.
pub fn verify_assignment<T: Real>(inst: &KsInstance<T>, assignment: &[bool]) -> Result<(), KsError> {
    verify_raw(&inst.bases, inst.rays.len(), assignment)
}

fn verify_raw(bases: &[Vec<usize>], n: usize, assignment: &[bool]) -> Result<(), KsError> {
    if assignment.len() != n {
        return Err(KsError::AssignmentLength {
            expected: n,
            found: assignment.len(),
        });
    }
    for (bi, b) in bases.iter().enumerate() {
        let ones = b.iter().filter(|&&r| assignment[r]).count();
        if ones != 1 {
            return Err(KsError::NotExactlyOne { basis: bi, ones });
        }
    }
    Ok(())
}

struct Solver<'a> {
    bases: &'a [Vec<usize>],
    /// Bases containing each ray.
    member_of: Vec<Vec<usize>>,
    order: Vec<usize>,
    values: Vec<Option<bool>>,
    trail: Vec<usize>,
    nodes: u64,
}

impl<'a> Solver<'a> {
    fn new(bases: &'a [Vec<usize>], n: usize) -> Self {
        let mut member_of = vec![Vec::new(); n];
        for (bi, b) in bases.iter().enumerate() {
            for &r in b {
                member_of[r].push(bi);
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| member_of[b].len().cmp(&member_of[a].len()).then(a.cmp(&b)));
        Solver {
            bases,
            member_of,
            order,
            values: vec![None; n],
            trail: Vec::new(),
            nodes: 0,
        }
    }

    fn assign(&mut self, r: usize, v: bool) {
        self.values[r] = Some(v);
        self.trail.push(r);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let r = self.trail.pop().unwrap();
            self.values[r] = None;
        }
    }

    /// Assign `r := v` and propagate; false on conflict.
    fn set_and_propagate(&mut self, r: usize, v: bool) -> bool {
        self.assign(r, v);
        let mut queue: Vec<usize> = self.member_of[r].clone();
        while let Some(bi) = queue.pop() {
            let basis = &self.bases[bi];
            let mut ones = 0;
            let mut free = Vec::new();
            for &x in basis {
                match self.values[x] {
                    Some(true) => ones += 1,
                    Some(false) => {}
                    None => free.push(x),
                }
            }
            let forced = match (ones, free.len()) {
                (0, 0) => return false,
                (0, 1) => Some(true),
                (1, 0) => None,
                (1, _) => Some(false),
                (0, _) => None,
                _ => return false,
            };
            if let Some(val) = forced {
                for x in free {
                    self.assign(x, val);
                    queue.extend_from_slice(&self.member_of[x]);
                }
            }
        }
        true
    }

    fn search(&mut self) -> bool {
        let next = self.order.iter().copied().find(|&r| self.values[r].is_none());
        let Some(r) = next else {
            return true;
        };
        self.nodes += 1;
        for v in [true, false] {
            let mark = self.trail.len();
            if self.set_and_propagate(r, v) && self.search() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }

    fn assignment(&self) -> Vec<bool> {
        self.values.iter().map(|v| v.unwrap_or(false)).collect()
    }
}

fn parity_of<T: Real>(inst: &KsInstance<T>) -> Option<ParityObstruction> {
    let multiplicities = inst.multiplicities();
    let basis_count = inst.bases.len();
    (multiplicities.iter().all(|m| m % 2 == 0) && basis_count % 2 == 1).then_some(ParityObstruction {
        multiplicities,
        basis_count,
    })
}

fn finish_verdict<T: Real>(inst: &KsInstance<T>, found: Option<Vec<bool>>, nodes: u64) -> KsVerdict {
    match found {
        Some(a) => {
            verify_assignment(inst, &a).expect("search produced an invalid assignment");
            KsVerdict {
                satisfiable: true,
                assignment: Some(a),
                nodes_explored: nodes,
                parity_obstruction: None,
            }
        }
        None => KsVerdict {
            satisfiable: false,
            assignment: None,
            nodes_explored: nodes,
            parity_obstruction: parity_of(inst),
        },
    }
}

/// Deterministic single-threaded search.
pub fn search_assignment<T: Real>(inst: &KsInstance<T>) -> KsVerdict {
    let mut s = Solver::new(&inst.bases, inst.rays.len());
    let found = s.search().then(|| s.assignment());
    finish_verdict(inst, found, s.nodes)
}

/// Search the two branches of the first variable on separate threads.
/// Verdict, assignment and node count match [`search_assignment`].
pub fn search_assignment_parallel<T: Real>(inst: &KsInstance<T>) -> KsVerdict {
    let n = inst.rays.len();
    let probe = Solver::new(&inst.bases, n);
    let Some(&first) = probe.order.first() else {
        return search_assignment(inst);
    };
    let branch = |v: bool| {
        let mut s = Solver::new(&inst.bases, n);
        let ok = s.set_and_propagate(first, v) && s.search();
        (ok.then(|| s.assignment()), s.nodes)
    };
    let ((a_true, n_true), (a_false, n_false)) = std::thread::scope(|scope| {
        let h = scope.spawn(|| branch(false));
        let t = branch(true);
        (t, h.join().expect("search thread panicked"))
    });
    match a_true {
        Some(a) => finish_verdict(inst, Some(a), 1 + n_true),
        None => finish_verdict(inst, a_false, 1 + n_true + n_false),
    }
}

/// A rank-one projector whose Born probability is strictly between 0 and 1.
#[derive(Clone, Debug)]
pub struct BornWitness<T: Real> {
    pub ray: StateVector<T>,
    pub probability: T,
    pub draws: usize,
    pub band: (T, T),
}

const WITNESS_BAND: (f64, f64) = (0.05, 0.95);
const DRAWS_BEFORE_WIDENING: usize = 100_000;

/// Sample Haar-random rays until one has Born probability inside
/// `[0.05, 0.95]`, showing the Born frame is not 0/1-valued. After 10⁵ draws
/// the band widens to any probability strictly inside `(0, 1)`.
pub fn gleason_implies_ks_demo<T: Real>(rho: &DensityOperator<T>, seed: u64) -> Result<BornWitness<T>, KsError>
where
    StandardNormal: Distribution<T>,
{
    let d = rho.dim();
    if d < 3 {
        return Err(KsError::DimensionTooSmall(d));
    }
    let mut rng = seeded(seed);
    let mut band = (T::lit(WITNESS_BAND.0), T::lit(WITNESS_BAND.1));
    let mut draws = 0;
    loop {
        if draws == DRAWS_BEFORE_WIDENING {
            band = (T::composite_tol(), T::one() - T::composite_tol());
        }
        draws += 1;
        let ray = random_state::<T, _>(d, &mut rng);
        let p = born(&ray.projector(), rho)?;
        if p >= band.0 && p <= band.1 {
            return Ok(BornWitness {
                ray,
                probability: p,
                draws,
                band,
            });
        }
    }
}

/// Exact ray from integer amplitudes.
pub fn integer_ray(entries: &[i64]) -> ExactRay {
    entries
        .iter()
        .map(|&x| Complex::new(BigRational::from_integer(x.into()), BigRational::zero()))
        .collect()
}

/// Rays and bases of the 18-ray, 9-basis set in dimension four; every ray
/// lies in exactly two bases.
pub fn cabello18() -> (Vec<ExactRay>, Vec<Vec<usize>>) {
    const RAYS: [[i64; 4]; 18] = [
        [0, 0, 0, 1],
        [0, 0, 1, 0],
        [1, 1, 0, 0],
        [1, -1, 0, 0],
        [0, 1, 0, 0],
        [1, 0, 1, 0],
        [1, 0, -1, 0],
        [1, -1, 1, -1],
        [1, -1, -1, 1],
        [0, 0, 1, 1],
        [1, 1, 1, 1],
        [0, 1, 0, -1],
        [1, 0, 0, 1],
        [1, 0, 0, -1],
        [0, 1, -1, 0],
        [1, 1, -1, 1],
        [1, 1, 1, -1],
        [-1, 1, 1, 1],
    ];
    let bases = vec![
        vec![0, 1, 2, 3],
        vec![0, 4, 5, 6],
        vec![7, 8, 2, 9],
        vec![7, 10, 6, 11],
        vec![1, 4, 12, 13],
        vec![8, 10, 13, 14],
        vec![15, 16, 3, 9],
        vec![15, 17, 5, 11],
        vec![16, 17, 12, 14],
    ];
    (RAYS.iter().map(|r| integer_ray(r)).collect(), bases)
}
