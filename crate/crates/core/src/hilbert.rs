//! Finite-dimensional complex Hilbert spaces.
//!
//! Matrices are small dense row-major arrays of `Complex<T>`. Every validated
//! type ([`Projector`], [`Pvm`], [`Observable`], [`DensityOperator`]) checks its
//! invariants at construction against the tolerances of its scalar type
//! ([`Real::structural_tol`] for single checks, [`Real::composite_tol`] for
//! reconstructions).

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("dimension must be positive")]
    ZeroDim,
    #[error("vector norm {norm} is not 1")]
    NotNormalized { norm: f64 },
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("rays {i} and {j} are not orthogonal (overlap magnitude {overlap:.3e})")]
    NonOrthogonal { i: usize, j: usize, overlap: f64 },
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not idempotent (max deviation {deviation:.3e})")]
    NotIdempotent { deviation: f64 },
    #[error("projectors do not sum to the identity (max deviation {deviation:.3e})")]
    Incomplete { deviation: f64 },
    #[error("basis has {found} vectors but dimension is {dim}")]
    IncompleteBasis { dim: usize, found: usize },
    #[error("projectors {i} and {j} do not commute")]
    NonCommuting { i: usize, j: usize },
    #[error("a PVM needs at least one element")]
    EmptyPvm,
    #[error("{elements} elements but {labels} labels")]
    LabelCount { elements: usize, labels: usize },
    #[error("invalid density operator: {0}")]
    InvalidDensity(DensityDiagnostic),
}

fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{}", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self, HilbertError> {
        let n = rows.len();
        if n == 0 {
            return Err(HilbertError::ZeroDim);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(HilbertError::NotSquare);
        }
        Ok(CMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        let n = u.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<Complex<T>>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn hermitian_deviation(&self) -> T {
        (self - &self.adjoint()).max_abs()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(M + M†) / 2`
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(T::lit(0.5))
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(Complex::zero(), |acc, j| acc + self[(i, j)] * v[j])
            })
            .collect()
    }

    /// `Tr[A B]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        let mut acc = Complex::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                acc = acc + self[(i, j)] * other[(j, i)];
            }
        }
        acc
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    fn check_dim(&self, other: &Self) -> Result<(), HilbertError> {
        if self.n != other.n {
            Err(HilbertError::DimMismatch {
                expected: self.n,
                found: other.n,
            })
        } else {
            Ok(())
        }
    }
}

impl<'a, T: Real> Add for &'a CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: Self) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a, T: Real> Sub for &'a CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: Self) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a, T: Real> Mul for &'a CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: Self) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in descending order and a unitary whose columns are the
/// matching eigenvectors. Only the Hermitian part of `m` is used.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius().max(T::min_positive_value());
    let eps = T::epsilon();
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off + a[(i, j)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= eps * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= eps * eps * scale {
                    continue;
                }
                let phase = apq / Complex::new(r, T::zero());
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (r + r);
                let t = if zeta == T::zero() {
                    T::one()
                } else {
                    zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // U = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane.
                let upp = Complex::new(c, T::zero());
                let upq = Complex::new(s, T::zero());
                let uqp = phase.conj() * Complex::new(-s, T::zero());
                let uqq = phase.conj() * Complex::new(c, T::zero());
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * upp + akq * uqp;
                    a[(k, q)] = akp * upq + akq * uqq;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * upp + vkq * uqp;
                    v[(k, q)] = vkp * upq + vkq * uqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
                    a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
                }
                a[(p, q)] = Complex::zero();
                a[(q, p)] = Complex::zero();
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vecs = CMatrix::zeros(n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, new_j)] = v[(i, old_j)];
        }
    }
    (values, vecs)
}

/// Unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self, HilbertError> {
        if amps.is_empty() {
            return Err(HilbertError::ZeroDim);
        }
        let norm = norm(&amps);
        if (norm - T::one()).abs() > T::structural_tol() {
            return Err(HilbertError::NotNormalized { norm: to_f64(norm) });
        }
        Ok(StateVector { amps })
    }

    /// Scale an arbitrary nonzero vector to unit norm.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self, HilbertError> {
        if amps.is_empty() {
            return Err(HilbertError::ZeroDim);
        }
        let norm = norm(&amps);
        if norm <= T::min_positive_value() {
            return Err(HilbertError::ZeroVector);
        }
        let inv = Complex::new(T::one() / norm, T::zero());
        Ok(StateVector {
            amps: amps.into_iter().map(|a| a * inv).collect(),
        })
    }

    pub fn from_real(amps: &[T]) -> Result<Self, HilbertError> {
        Self::normalized(amps.iter().map(|&a| Complex::new(a, T::zero())).collect())
    }

    /// Computational basis vector `|i⟩` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut amps = vec![Complex::zero(); d];
        amps[i] = Complex::one();
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn projector(&self) -> Projector<T> {
        Projector {
            m: CMatrix::outer(&self.amps, &self.amps),
        }
    }

    /// Same ray, i.e. equal up to a global phase.
    pub fn same_ray(&self, other: &Self, tol: T) -> bool {
        self.dim() == other.dim() && self.inner(other).norm() > T::one() - tol
    }
}

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr()).sqrt()
}

/// Check that `vectors` are pairwise orthogonal and share a dimension.
pub fn check_orthonormal<T: Real>(vectors: &[StateVector<T>]) -> Result<(), HilbertError> {
    let d = match vectors.first() {
        Some(v) => v.dim(),
        None => return Ok(()),
    };
    for v in vectors {
        if v.dim() != d {
            return Err(HilbertError::DimMismatch {
                expected: d,
                found: v.dim(),
            });
        }
    }
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            let overlap = vectors[i].inner(&vectors[j]).norm();
            if overlap > T::structural_tol() {
                return Err(HilbertError::NonOrthogonal {
                    i,
                    j,
                    overlap: to_f64(overlap),
                });
            }
        }
    }
    Ok(())
}

/// Hermitian idempotent matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector<T: Real> {
    m: CMatrix<T>,
}

impl<T: Real> Projector<T> {
    pub fn from_matrix(m: CMatrix<T>) -> Result<Self, HilbertError> {
        let deviation = m.hermitian_deviation();
        if deviation > T::structural_tol() {
            return Err(HilbertError::NotHermitian {
                deviation: to_f64(deviation),
            });
        }
        let deviation = (&(&m * &m) - &m).max_abs();
        if deviation > T::structural_tol() {
            return Err(HilbertError::NotIdempotent {
                deviation: to_f64(deviation),
            });
        }
        Ok(Projector { m })
    }

    /// `Π = Σ |ψ⟩⟨ψ|` over mutually orthogonal rays.
    pub fn from_rays(dim: usize, rays: &[StateVector<T>]) -> Result<Self, HilbertError> {
        if dim == 0 {
            return Err(HilbertError::ZeroDim);
        }
        if let Some(r) = rays.iter().find(|r| r.dim() != dim) {
            return Err(HilbertError::DimMismatch {
                expected: dim,
                found: r.dim(),
            });
        }
        check_orthonormal(rays)?;
        let mut m = CMatrix::zeros(dim);
        for r in rays {
            m = &m + &CMatrix::outer(r.amplitudes(), r.amplitudes());
        }
        Ok(Projector { m })
    }

    pub fn identity(dim: usize) -> Self {
        Projector {
            m: CMatrix::identity(dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Projector {
            m: CMatrix::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn rank(&self) -> usize {
        self.m.trace().re.round().to_usize().unwrap_or(0)
    }

    /// `I − Π`
    pub fn complement(&self) -> Self {
        Projector {
            m: &CMatrix::identity(self.dim()) - &self.m,
        }
    }

    /// Max-norm distance between the two matrices.
    pub fn distance(&self, other: &Self) -> T {
        (&self.m - &other.m).max_abs()
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dim() == other.dim() && self.distance(other) <= tol
    }
}

/// `true` iff `‖PQ − QP‖_max` is within the structural tolerance.
pub fn commute<T: Real>(p: &Projector<T>, q: &Projector<T>) -> Result<bool, HilbertError> {
    p.m.check_dim(&q.m)?;
    let pq = &p.m * &q.m;
    let qp = &q.m * &p.m;
    Ok((&pq - &qp).max_abs() <= T::structural_tol())
}

/// Projection-valued measure: orthogonal projectors summing to the identity.
#[derive(Clone, Debug)]
pub struct Pvm<T: Real> {
    elements: Vec<Projector<T>>,
    labels: Vec<String>,
}

impl<T: Real> Pvm<T> {
    pub fn new(elements: Vec<Projector<T>>, labels: Vec<String>) -> Result<Self, HilbertError> {
        let d = elements.first().ok_or(HilbertError::EmptyPvm)?.dim();
        if labels.len() != elements.len() {
            return Err(HilbertError::LabelCount {
                elements: elements.len(),
                labels: labels.len(),
            });
        }
        let mut sum = CMatrix::zeros(d);
        for p in &elements {
            if p.dim() != d {
                return Err(HilbertError::DimMismatch {
                    expected: d,
                    found: p.dim(),
                });
            }
            sum = &sum + &p.m;
        }
        for i in 0..elements.len() {
            for j in (i + 1)..elements.len() {
                let prod = &elements[i].m * &elements[j].m;
                if prod.max_abs() > T::structural_tol() {
                    return Err(HilbertError::NonOrthogonal {
                        i,
                        j,
                        overlap: to_f64(prod.max_abs()),
                    });
                }
            }
        }
        let deviation = (&sum - &CMatrix::identity(d)).max_abs();
        if deviation > T::structural_tol() {
            return Err(HilbertError::Incomplete {
                deviation: to_f64(deviation),
            });
        }
        Ok(Pvm { elements, labels })
    }

    /// Rank-one PVM of an orthonormal basis, labelled by index.
    pub fn from_basis(basis: &[StateVector<T>]) -> Result<Self, HilbertError> {
        let d = basis.first().ok_or(HilbertError::EmptyPvm)?.dim();
        if basis.len() != d {
            return Err(HilbertError::IncompleteBasis {
                dim: d,
                found: basis.len(),
            });
        }
        check_orthonormal(basis)?;
        Pvm::new(
            basis.iter().map(StateVector::projector).collect(),
            (0..d).map(|i| i.to_string()).collect(),
        )
    }

    pub fn trivial(dim: usize) -> Self {
        Pvm {
            elements: vec![Projector::identity(dim)],
            labels: vec!["I".to_string()],
        }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn elements(&self) -> &[Projector<T>] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Joint fine-graining of two commuting PVMs: the nonzero products `Π_j Π'_k`.
pub fn refine<T: Real>(a: &Pvm<T>, b: &Pvm<T>) -> Result<Pvm<T>, HilbertError> {
    if a.dim() != b.dim() {
        return Err(HilbertError::DimMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mut elements = Vec::new();
    let mut labels = Vec::new();
    for (j, pj) in a.elements.iter().enumerate() {
        for (k, pk) in b.elements.iter().enumerate() {
            if !commute(pj, pk)? {
                return Err(HilbertError::NonCommuting { i: j, j: k });
            }
            let prod = (&pj.m * &pk.m).hermitian_part();
            if prod.max_abs() > T::structural_tol() {
                elements.push(Projector::from_matrix(prod)?);
                labels.push(format!("({},{})", a.labels[j], b.labels[k]));
            }
        }
    }
    Pvm::new(elements, labels)
}

/// Hermitian operator with its spectral decomposition `M = Σ λ_j Π_j`.
#[derive(Clone, Debug)]
pub struct Observable<T: Real> {
    matrix: CMatrix<T>,
    eigenvalues: Vec<T>,
    pvm: Pvm<T>,
}

impl<T: Real> Observable<T> {
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Distinct eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Spectral projectors, one per distinct eigenvalue.
    pub fn pvm(&self) -> &Pvm<T> {
        &self.pvm
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.eigenvalues
            .iter()
            .zip(self.pvm.elements())
            .fold(CMatrix::zeros(self.matrix.dim()), |acc, (&l, p)| {
                &acc + &p.matrix().scale_real(l)
            })
    }
}

/// Spectral decomposition with degenerate eigenvalues merged into one projector.
pub fn spectral_decompose<T: Real>(m: &CMatrix<T>) -> Result<Observable<T>, HilbertError> {
    let deviation = m.hermitian_deviation();
    if deviation > T::structural_tol() {
        return Err(HilbertError::NotHermitian {
            deviation: to_f64(deviation),
        });
    }
    let n = m.dim();
    let (values, vecs) = hermitian_eigen(m);
    let gap = T::composite_tol();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match groups.last_mut() {
            Some(g) if values[*g.last().unwrap()] - values[i] < gap => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let mut eigenvalues = Vec::with_capacity(groups.len());
    let mut elements = Vec::with_capacity(groups.len());
    for g in &groups {
        let mean = g.iter().fold(T::zero(), |acc, &i| acc + values[i])
            / T::from_usize(g.len()).unwrap();
        eigenvalues.push(mean);
        let mut p = CMatrix::zeros(n);
        for &i in g {
            let v = vecs.column(i);
            p = &p + &CMatrix::outer(&v, &v);
        }
        elements.push(Projector { m: p });
    }
    let labels = (0..groups.len()).map(|i| i.to_string()).collect();
    let pvm = Pvm::new(elements, labels)?;
    Ok(Observable {
        matrix: m.clone(),
        eigenvalues,
        pvm,
    })
}

/// One violated condition of a candidate density operator.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityViolation {
    NotHermitian { deviation: f64 },
    Trace { trace: f64 },
    NegativeEigenvalue { min: f64 },
}

impl fmt::Display for DensityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityViolation::NotHermitian { deviation } => {
                write!(f, "not Hermitian (max deviation {deviation:.3e})")
            }
            DensityViolation::Trace { trace } => write!(f, "trace {trace} is not 1"),
            DensityViolation::NegativeEigenvalue { min } => {
                write!(f, "negative eigenvalue {min}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityDiagnostic {
    pub violations: Vec<DensityViolation>,
}

impl fmt::Display for DensityDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

impl std::error::Error for DensityDiagnostic {}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<T: Real> {
    m: CMatrix<T>,
}

/// Accept `m` as a density operator or list every violated condition.
pub fn validate_density<T: Real>(m: CMatrix<T>) -> Result<DensityOperator<T>, DensityDiagnostic> {
    let tol = T::structural_tol();
    let mut violations = Vec::new();
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        violations.push(DensityViolation::NotHermitian {
            deviation: to_f64(deviation),
        });
    }
    let trace = m.trace().re;
    if (trace - T::one()).abs() > tol {
        violations.push(DensityViolation::Trace {
            trace: to_f64(trace),
        });
    }
    let (values, _) = hermitian_eigen(&m);
    let min = values.last().copied().unwrap_or(T::zero());
    if min < -tol {
        violations.push(DensityViolation::NegativeEigenvalue { min: to_f64(min) });
    }
    if violations.is_empty() {
        Ok(DensityOperator { m })
    } else {
        Err(DensityDiagnostic { violations })
    }
}

impl<T: Real> DensityOperator<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self, HilbertError> {
        validate_density(m).map_err(HilbertError::InvalidDensity)
    }

    pub fn pure(state: &StateVector<T>) -> Self {
        DensityOperator {
            m: CMatrix::outer(state.amplitudes(), state.amplitudes()),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityOperator {
            m: CMatrix::identity(d).scale_real(T::one() / T::from_usize(d).unwrap()),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    /// Eigenvalues (descending) and eigenvectors as columns.
    pub fn eigen(&self) -> (Vec<T>, CMatrix<T>) {
        hermitian_eigen(&self.m)
    }

    pub fn eigenbasis(&self) -> Vec<StateVector<T>> {
        let (_, vecs) = self.eigen();
        (0..self.dim())
            .map(|j| StateVector {
                amps: vecs.column(j),
            })
            .collect()
    }
}

/// Born rule `Tr[Π ρ]`, clamped to `[0, 1]`.
pub fn born<T: Real>(p: &Projector<T>, rho: &DensityOperator<T>) -> Result<T, HilbertError> {
    p.m.check_dim(&rho.m)?;
    let v = p.m.trace_product(&rho.m).re;
    Ok(v.max(T::zero()).min(T::one()))
}
