//! Newton iteration on sparse systems.

use crate::error::{Error, Result};
use crate::fem::solve::SparseLu;
use crate::sparse::SparseMatrix;

pub trait NonlinearSystem {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn jacobian(&self, x: &[f64]) -> Result<SparseMatrix>;
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Full-step Newton; converged when ||r(x)|| <= tol * max(1, ||r(x0)||).
pub fn newton_solve(
    sys: &dyn NonlinearSystem,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<NewtonOutcome> {
    let mut x = x0.to_vec();
    let mut r = sys.residual(&x)?;
    let r0 = norm2(&r);
    let target = tol * r0.max(1.0);
    let mut iterations = 0;
    loop {
        let rn = norm2(&r);
        if !rn.is_finite() {
            return Err(Error::NoConvergence { iterations, residual: rn });
        }
        if rn <= target {
            return Ok(NewtonOutcome { x, iterations, residual_norm: rn });
        }
        if iterations >= max_iter {
            return Err(Error::NoConvergence { iterations, residual: rn });
        }
        let jac = sys.jacobian(&x)?;
        let lu = SparseLu::factor(&jac)
            .map_err(|e| Error::SingularJacobian(e.to_string()))?;
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let dx = lu
            .solve_checked(&neg_r)
            .map_err(|e| Error::SingularJacobian(e.to_string()))?;
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
        iterations += 1;
        r = sys.residual(&x)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::TripletBuilder;

    struct Linear {
        a: SparseMatrix,
        b: Vec<f64>,
    }

    impl NonlinearSystem for Linear {
        fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(self.a.matvec(x).iter().zip(&self.b).map(|(ax, b)| ax - b).collect())
        }
        fn jacobian(&self, _x: &[f64]) -> Result<SparseMatrix> {
            Ok(self.a.clone())
        }
    }

    #[test]
    fn linear_system_converges_in_one_iteration() {
        let mut t = TripletBuilder::new(2, 2);
        t.push(0, 0, 3.0);
        t.push(1, 1, 2.0);
        t.push(0, 1, 1.0);
        let sys = Linear { a: t.build(), b: vec![5.0, 4.0] };
        let out = newton_solve(&sys, &[0.0, 0.0], 1e-12, 5).unwrap();
        assert_eq!(out.iterations, 1);
        assert!((out.x[1] - 2.0).abs() < 1e-12 && (out.x[0] - 1.0).abs() < 1e-12);
    }

    struct Quadratic;

    impl NonlinearSystem for Quadratic {
        fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![x[0] * x[0] - 4.0])
        }
        fn jacobian(&self, x: &[f64]) -> Result<SparseMatrix> {
            let mut t = TripletBuilder::new(1, 1);
            t.push(0, 0, 2.0 * x[0]);
            Ok(t.build())
        }
    }

    #[test]
    fn scalar_quadratic_converges_fast() {
        let out = newton_solve(&Quadratic, &[3.0], 1e-12, 6).unwrap();
        assert!(out.iterations <= 6);
        assert!((out.x[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn exhausted_iterations_error() {
        let out = newton_solve(&Quadratic, &[1e8], 1e-14, 2);
        assert!(matches!(out, Err(Error::NoConvergence { .. })));
    }
}
