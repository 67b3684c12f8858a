//! Dirichlet constraints by symmetric elimination: constrained rows and
//! columns are zeroed, the diagonal set to one, and the column lift moved to
//! the right-hand side so the solution matches the prescribed values exactly.

use crate::sparse::{SparseMatrix, TripletBuilder};
use std::collections::HashMap;

/// Column data removed from a constrained matrix, reapplied per right-hand
/// side; keeps one factorization valid for many boundary values.
#[derive(Debug, Clone)]
pub struct DirichletLift {
    dofs: Vec<usize>,
    /// (row, local constrained index, coefficient) entries of the removed
    /// columns, rows outside the constrained set only.
    entries: Vec<(usize, usize, f64)>,
}

impl DirichletLift {
    pub fn dofs(&self) -> &[usize] {
        &self.dofs
    }

    /// b -= A[:, dofs] * values on free rows; b[dofs] = values.
    pub fn apply(&self, b: &mut [f64], values: &[f64]) {
        assert_eq!(values.len(), self.dofs.len());
        for &(row, k, coeff) in &self.entries {
            b[row] -= coeff * values[k];
        }
        for (k, &dof) in self.dofs.iter().enumerate() {
            b[dof] = values[k];
        }
    }
}

/// Returns the symmetrically eliminated matrix and the lift operator.
pub fn constrain_matrix(a: &SparseMatrix, dofs: &[usize]) -> (SparseMatrix, DirichletLift) {
    let index: HashMap<usize, usize> = dofs.iter().enumerate().map(|(k, &d)| (d, k)).collect();
    let mut out = TripletBuilder::with_capacity(a.n_rows(), a.n_cols(), a.nnz());
    let mut entries = Vec::new();
    for i in 0..a.n_rows() {
        if index.contains_key(&i) {
            out.push(i, i, 1.0);
            continue;
        }
        let (cols, vals) = a.row(i);
        for (c, v) in cols.iter().zip(vals) {
            match index.get(c) {
                Some(&k) => entries.push((i, k, *v)),
                None => out.push(i, *c, *v),
            }
        }
    }
    (out.build(), DirichletLift { dofs: dofs.to_vec(), entries })
}

/// One-shot constrained system: modifies the matrix and right-hand side in
/// place for the given (dof, value) pairs.
pub fn apply_dirichlet(a: &mut SparseMatrix, b: &mut [f64], constraints: &[(usize, f64)]) {
    let dofs: Vec<usize> = constraints.iter().map(|c| c.0).collect();
    let values: Vec<f64> = constraints.iter().map(|c| c.1).collect();
    let (constrained, lift) = constrain_matrix(a, &dofs);
    *a = constrained;
    lift.apply(b, &values);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::TripletBuilder;

    fn laplace_1d(n: usize) -> SparseMatrix {
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, 2.0);
            if i > 0 {
                b.push(i, i - 1, -1.0);
            }
            if i + 1 < n {
                b.push(i, i + 1, -1.0);
            }
        }
        b.build()
    }

    #[test]
    fn all_dofs_constrained_returns_values() {
        let mut a = laplace_1d(4);
        let mut b = vec![0.0; 4];
        let cons: Vec<(usize, f64)> = (0..4).map(|i| (i, i as f64)).collect();
        apply_dirichlet(&mut a, &mut b, &cons);
        let x = crate::fem::solve::solve_sparse(&a, &b).unwrap();
        for i in 0..4 {
            assert!((x[i] - i as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn elimination_preserves_symmetry() {
        let mut a = laplace_1d(5);
        let mut b = vec![1.0; 5];
        apply_dirichlet(&mut a, &mut b, &[(0, 0.0), (4, 0.0)]);
        assert!(a.is_symmetric(1e-14));
    }

    #[test]
    fn lift_moves_columns_to_rhs() {
        let a = laplace_1d(3);
        let (ac, lift) = constrain_matrix(&a, &[0]);
        let mut b = vec![0.0; 3];
        lift.apply(&mut b, &[2.0]);
        // row 1 had A[1,0] = -1, so b[1] = 2
        assert_eq!(b, vec![2.0, 2.0, 0.0]);
        assert_eq!(ac.get(0, 0), 1.0);
        assert_eq!(ac.get(1, 0), 0.0);
        assert_eq!(ac.get(0, 1), 0.0);
    }
}
