//! Exact sparse linear algebra over a [`Field`] and PSD testing over an
//! [`OrderedField`].
//!
//! The solver keeps its pivot rows in reduced row-echelon form and accepts
//! rows incrementally, so overdetermined systems (equations plus constraint
//! rows) are checked for consistency as they are assembled.

use crate::scalar::{Field, OrderedField};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// A sparse row: column index → coefficient, no stored zeros.
pub type SparseRow<S> = BTreeMap<usize, S>;

/// Outcome of an elimination, including rank diagnostics.
#[derive(Clone, Debug)]
pub struct Solution<S> {
    /// Values of the variables. Free variables are set to zero.
    pub values: Vec<S>,
    /// Rank of the coefficient matrix.
    pub rank: usize,
    /// Indices of variables not fixed by the equations.
    pub free_vars: Vec<usize>,
    /// Indices of rows that contradicted earlier rows.
    pub inconsistent_rows: Vec<usize>,
}

impl<S> Solution<S> {
    /// Number of undetermined variables.
    pub fn nullity(&self) -> usize {
        self.free_vars.len()
    }

    /// Whether every row was consistent and every variable determined.
    pub fn is_unique(&self) -> bool {
        self.free_vars.is_empty() && self.inconsistent_rows.is_empty()
    }
}

/// Incrementally assembled system A·x = b.
#[derive(Clone, Debug)]
pub struct LinearSystem<S: Field> {
    n_vars: usize,
    /// pivot column → (normalized row with 1 at the pivot, rhs)
    pivots: BTreeMap<usize, (SparseRow<S>, S)>,
    inconsistent: Vec<usize>,
    rows_seen: usize,
}

impl<S: Field> LinearSystem<S> {
    pub fn new(n_vars: usize) -> Self {
        Self { n_vars, pivots: BTreeMap::new(), inconsistent: Vec::new(), rows_seen: 0 }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Add the equation Σ row[j]·x_j = rhs. Returns an argument error for an
    /// out-of-range column.
    pub fn add_row(&mut self, row: SparseRow<S>, rhs: S) -> Result<()> {
        let idx = self.rows_seen;
        self.rows_seen += 1;
        if let Some((&c, _)) = row.iter().next_back() {
            if c >= self.n_vars {
                return Err(Error::arg(format!("column {c} out of range {}", self.n_vars)));
            }
        }
        let (mut row, mut rhs) = (clean(row), rhs);
        // Reduce against existing pivots. Pivot rows are fully reduced, so one
        // pass over the pivot columns present in the row suffices.
        let hits: Vec<usize> = row.keys().filter(|c| self.pivots.contains_key(c)).copied().collect();
        for c in hits {
            let Some(f) = row.get(&c).cloned() else { continue };
            let (prow, prhs) = &self.pivots[&c];
            axpy(&mut row, &f, prow);
            rhs = rhs - f * prhs.clone();
        }
        if row.is_empty() {
            if !rhs.is_negligible() {
                self.inconsistent.push(idx);
            }
            return Ok(());
        }
        let (&pc, pv) = row
            .iter()
            .min_by(|a, b| a.1.pivot_cost().total_cmp(&b.1.pivot_cost()))
            .expect("nonempty row");
        let inv = S::one() / pv.clone();
        let row: SparseRow<S> = row.into_iter().map(|(c, v)| (c, v * inv.clone())).collect();
        let rhs = rhs * inv;
        for (prow, prhs) in self.pivots.values_mut() {
            if let Some(f) = prow.get(&pc).cloned() {
                axpy(prow, &f, &row);
                *prhs = prhs.clone() - f * rhs.clone();
            }
        }
        self.pivots.insert(pc, (row, rhs));
        Ok(())
    }

    /// Read off the solution with rank diagnostics.
    pub fn solution(&self) -> Solution<S> {
        let mut values = vec![S::zero(); self.n_vars];
        for (&c, (_, rhs)) in &self.pivots {
            values[c] = rhs.clone();
        }
        let free_vars = (0..self.n_vars).filter(|c| !self.pivots.contains_key(c)).collect();
        Solution {
            values,
            rank: self.pivots.len(),
            free_vars,
            inconsistent_rows: self.inconsistent.clone(),
        }
    }

    /// The unique solution, or a solver-rank error with diagnostics.
    pub fn unique(&self, context: &str) -> Result<Vec<S>> {
        let sol = self.solution();
        if !sol.inconsistent_rows.is_empty() {
            return Err(Error::SolverRank(format!(
                "{context}: inconsistent system ({} contradicting rows, first row {})",
                sol.inconsistent_rows.len(),
                sol.inconsistent_rows[0]
            )));
        }
        if !sol.free_vars.is_empty() {
            return Err(Error::SolverRank(format!(
                "{context}: under-determined, rank {} of {}, nullity {}, free variables {:?}",
                sol.rank,
                self.n_vars,
                sol.nullity(),
                &sol.free_vars[..sol.free_vars.len().min(12)]
            )));
        }
        Ok(sol.values)
    }
}

fn clean<S: Field>(row: SparseRow<S>) -> SparseRow<S> {
    row.into_iter().filter(|(_, v)| !v.is_negligible()).collect()
}

/// row ← row − f·other, dropping entries that cancel.
fn axpy<S: Field>(row: &mut SparseRow<S>, f: &S, other: &SparseRow<S>) {
    for (c, v) in other {
        let delta = f.clone() * v.clone();
        match row.get_mut(c) {
            Some(x) => {
                *x = x.clone() - delta;
                if x.is_negligible() {
                    row.remove(c);
                }
            }
            None => {
                let nv = -delta;
                if !nv.is_negligible() {
                    row.insert(*c, nv);
                }
            }
        }
    }
}

/// Solve a dense square or rectangular system, requiring a unique solution.
pub fn solve_dense<S: Field>(a: &[Vec<S>], b: &[S], context: &str) -> Result<Vec<S>> {
    if a.len() != b.len() {
        return Err(Error::arg("row count and rhs length differ"));
    }
    let n = a.first().map_or(0, Vec::len);
    let mut sys = LinearSystem::new(n);
    for (row, rhs) in a.iter().zip(b) {
        if row.len() != n {
            return Err(Error::arg("ragged matrix"));
        }
        let sparse = row.iter().cloned().enumerate().collect();
        sys.add_row(sparse, rhs.clone())?;
    }
    sys.unique(context)
}

/// Inverse of a dense square matrix, or a solver-rank error.
pub fn invert<S: Field>(a: &[Vec<S>], context: &str) -> Result<Vec<Vec<S>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<S> = (0..n).map(|i| if i == j { S::one() } else { S::zero() }).collect();
        cols.push(solve_dense(a, &e, context)?);
    }
    Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Whether a symmetric matrix is positive semidefinite.
///
/// Uses symmetric Gaussian elimination with diagonal pivoting: a strictly
/// positive diagonal entry is eliminated at each step. When no positive
/// diagonal remains, the remaining block is PSD only if it is zero.
pub fn is_psd<S: OrderedField>(a: &[Vec<S>]) -> Result<bool> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::arg("PSD test needs a square matrix"));
    }
    for i in 0..n {
        for j in 0..i {
            if !(a[i][j].clone() - a[j][i].clone()).is_negligible() {
                return Err(Error::arg("PSD test needs a symmetric matrix"));
            }
        }
    }
    let mut m: Vec<Vec<S>> = a.to_vec();
    let mut alive: Vec<usize> = (0..n).collect();
    loop {
        let Some(pos) = alive.iter().position(|&i| m[i][i].is_positive()) else {
            break;
        };
        let k = alive.remove(pos);
        let pivot = m[k][k].clone();
        for &i in &alive {
            let f = m[i][k].clone() / pivot.clone();
            if f.is_negligible() {
                continue;
            }
            for &j in &alive {
                let v = m[i][j].clone() - f.clone() * m[k][j].clone();
                m[i][j] = v;
            }
        }
    }
    for &i in &alive {
        if m[i][i].is_negative() {
            return Ok(false);
        }
        for &j in &alive {
            if !m[i][j].is_negligible() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
