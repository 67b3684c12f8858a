//! Sparse direct solves. All linear systems in the pipeline go through a
//! pivoted sparse LU (faer); one factorization is reused across many
//! right-hand sides, with a single iterative-refinement pass per solve.

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;
use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};

pub struct SparseLu {
    n: usize,
    matrix: SparseMatrix,
    lu: faer::sparse::solvers::Lu<usize, f64>,
}

impl SparseLu {
    pub fn factor(a: &SparseMatrix) -> Result<SparseLu> {
        if a.n_rows() != a.n_cols() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.n_rows(),
                a.n_cols()
            )));
        }
        let triplets: Vec<Triplet<usize, usize, f64>> =
            a.iter_entries().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(a.n_rows(), a.n_cols(), &triplets)
            .map_err(|e| Error::SingularMatrix(format!("sparse conversion: {e:?}")))?;
        let lu = mat
            .sp_lu()
            .map_err(|e| Error::SingularMatrix(format!("LU factorization failed: {e:?}")))?;
        Ok(SparseLu { n: a.n_rows(), matrix: a.clone(), lu })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn backsolve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = faer::Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut x = self.backsolve(b);
        // one refinement pass
        let ax = self.matrix.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let dx = self.backsolve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        x
    }

    /// Solve and verify the result is usable; detects factorizations that
    /// silently produced non-finite values from a numerically singular matrix.
    pub fn solve_checked(&self, b: &[f64]) -> Result<Vec<f64>> {
        let x = self.solve(b);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularMatrix("non-finite solution (zero pivot)".into()));
        }
        Ok(x)
    }
}

pub fn solve_sparse(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.n_rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} != {} rows",
            b.len(),
            a.n_rows()
        )));
    }
    SparseLu::factor(a)?.solve_checked(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::TripletBuilder;

    #[test]
    fn identity_returns_rhs() {
        let a = SparseMatrix::identity(5);
        let b = vec![1.0, -2.0, 3.0, 0.0, 5.0];
        let x = solve_sparse(&a, &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn spd_two_by_two() {
        let mut t = TripletBuilder::new(2, 2);
        t.push(0, 0, 2.0);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        t.push(1, 1, 2.0);
        let a = t.build();
        let x = solve_sparse(&a, &[1.0, 1.0]).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((x[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_detected() {
        let mut t = TripletBuilder::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        t.push(1, 1, 1.0);
        let a = t.build();
        assert!(matches!(solve_sparse(&a, &[1.0, 0.0]), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn random_spd_residual_bound() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 200;
        // SPD via diagonally dominant band
        let mut t = TripletBuilder::new(n, n);
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in i.saturating_sub(3)..(i + 4).min(n) {
                if i != j {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    t.push(i, j, v);
                    t.push(j, i, v);
                    row_sum += v.abs();
                }
            }
            t.push(i, i, 2.0 * row_sum + 1.0);
        }
        let a = t.build();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = solve_sparse(&a, &b).unwrap();
        let ax = a.matvec(&x);
        let res: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        let nx: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(res <= 1e-10 * (a.max_abs() * nx + nb), "residual {res}");
    }
}
