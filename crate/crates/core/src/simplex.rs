//! Dense two-phase simplex over an exact ordered field.
//!
//! Problems are in equality form: minimize `c·x` subject to `A x = b`, `x ≥ 0`.
//! Pivoting follows Bland's rule, so the method terminates without any
//! anti-cycling tolerance. Sizes here are tiny (tens of columns), so the dense
//! tableau is the simplest correct choice.

use crate::scalar::Exact;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

impl<T: Exact> LinearProgram<T> {
    pub fn new(a: Vec<Vec<T>>, b: Vec<T>, c: Vec<T>) -> Self {
        assert_eq!(a.len(), b.len(), "row count mismatch");
        for row in &a {
            assert_eq!(row.len(), c.len(), "column count mismatch");
        }
        LinearProgram { a, b, c }
    }

    pub fn n_vars(&self) -> usize {
        self.c.len()
    }

    pub fn solve(&self) -> LpOutcome<T> {
        let n = self.n_vars();
        let mut tab = match Tableau::phase_one(&self.a, &self.b, n) {
            Some(t) => t,
            None => return LpOutcome::Infeasible,
        };
        tab.set_objective(&self.c);
        match tab.run(n) {
            RunResult::Optimal => {
                let x = tab.solution(n);
                let value = tab.objective_value();
                LpOutcome::Optimal { x, value }
            }
            RunResult::Unbounded => LpOutcome::Unbounded,
        }
    }
}

/// Any point of `{x ≥ 0 : A x = b}`, or `None` when the set is empty.
pub fn feasible_point<T: Exact>(a: &[Vec<T>], b: &[T], n: usize) -> Option<Vec<T>> {
    Tableau::phase_one(a, b, n).map(|t| t.solution(n))
}

/// Lexicographically smallest point of `{x ≥ 0 : A x = b}`.
///
/// Minimizes `x_0`, fixes it, minimizes `x_1`, and so on. The feasible set must
/// be bounded in every coordinate for the result to exist.
pub fn lexicographic_min<T: Exact>(a: &[Vec<T>], b: &[T], n: usize) -> Option<Vec<T>> {
    let mut rows: Vec<Vec<T>> = a.to_vec();
    let mut rhs: Vec<T> = b.to_vec();
    let mut fixed = Vec::with_capacity(n);
    for i in 0..n {
        let mut c = vec![T::zero(); n];
        c[i] = T::one();
        match LinearProgram::new(rows.clone(), rhs.clone(), c).solve() {
            LpOutcome::Optimal { value, .. } => {
                let mut pin = vec![T::zero(); n];
                pin[i] = T::one();
                rows.push(pin);
                rhs.push(value.clone());
                fixed.push(value);
            }
            _ => return None,
        }
    }
    Some(fixed)
}

enum RunResult {
    Optimal,
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    // Reduced costs; the last entry holds minus the objective value.
    obj: Vec<T>,
    basis: Vec<usize>,
    width: usize,
}

impl<T: Exact> Tableau<T> {
    /// Build the phase-one tableau, solve it, and return a tableau whose basis
    /// is free of artificial variables. `None` means infeasible.
    fn phase_one(a: &[Vec<T>], b: &[T], n: usize) -> Option<Self> {
        let m = a.len();
        let width = n + m;
        let mut rows = Vec::with_capacity(m);
        for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
            let flip = rhs.is_negative();
            let mut r: Vec<T> = row
                .iter()
                .map(|v| if flip { -v.clone() } else { v.clone() })
                .collect();
            r.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
            r.push(if flip { -rhs.clone() } else { rhs.clone() });
            rows.push(r);
        }
        let mut obj = vec![T::zero(); width + 1];
        for r in &rows {
            for j in 0..n {
                obj[j] = obj[j].clone() - r[j].clone();
            }
            obj[width] = obj[width].clone() - r[width].clone();
        }
        let mut tab = Tableau {
            rows,
            obj,
            basis: (n..n + m).collect(),
            width,
        };
        // Phase one is bounded below by zero.
        if let RunResult::Unbounded = tab.run(width) {
            unreachable!("phase one objective is bounded");
        }
        if !tab.objective_value().is_zero() {
            return None;
        }
        tab.evict_artificials(n);
        Some(tab)
    }

    fn evict_artificials(&mut self, n: usize) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= n {
                match (0..n).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(j) => {
                        self.pivot(r, j);
                        r += 1;
                    }
                    None => {
                        // Redundant constraint.
                        self.rows.remove(r);
                        self.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    fn set_objective(&mut self, c: &[T]) {
        let mut obj = vec![T::zero(); self.width + 1];
        obj[..c.len()].clone_from_slice(c);
        for (r, &k) in self.basis.iter().enumerate() {
            if k < c.len() && !c[k].is_zero() {
                let ck = c[k].clone();
                for (o, v) in obj.iter_mut().zip(&self.rows[r]) {
                    *o = o.clone() - ck.clone() * v.clone();
                }
            }
        }
        self.obj = obj;
    }

    /// Bland's rule over columns `< allowed`.
    fn run(&mut self, allowed: usize) -> RunResult {
        loop {
            let entering = match (0..allowed).find(|&j| self.obj[j].is_negative()) {
                Some(j) => j,
                None => return RunResult::Optimal,
            };
            let mut leave: Option<(usize, T)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[entering].is_positive() {
                    let ratio = row[self.width].clone() / row[entering].clone();
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, entering),
                None => return RunResult::Unbounded,
            }
        }
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        if !self.obj[col].is_zero() {
            let f = self.obj[col].clone();
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        self.basis[r] = col;
    }

    fn objective_value(&self) -> T {
        -self.obj[self.width].clone()
    }

    fn solution(&self, n: usize) -> Vec<T> {
        let mut x = vec![T::zero(); n];
        for (r, &k) in self.basis.iter().enumerate() {
            if k < n {
                x[k] = self.rows[r][self.width].clone();
            }
        }
        x
    }
}
