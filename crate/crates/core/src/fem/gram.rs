//! Inner-product (Gram) matrices for the solution spaces: L2 for the
//! pressure, H1 for velocity and displacement errors, the H1 seminorm for
//! the clamped solid space in the subiteration stopping test.

use crate::error::Result;
use crate::fem::assemble::{assemble_bilinear, FormContext, FormKind};
use crate::fem::space::FunctionSpace;
use crate::sparse::SparseMatrix;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    H1,
    H1Semi,
}

pub struct InnerProduct {
    pub space: Arc<FunctionSpace>,
    pub kind: NormKind,
    pub matrix: SparseMatrix,
}

pub fn gram_matrix(space: &Arc<FunctionSpace>, kind: NormKind) -> Result<InnerProduct> {
    let ctx = FormContext::new();
    let matrix = match kind {
        NormKind::L2 => assemble_bilinear(FormKind::Mass, space, space, &ctx)?,
        NormKind::H1Semi => assemble_bilinear(FormKind::StiffnessLaplace, space, space, &ctx)?,
        NormKind::H1 => {
            let m = assemble_bilinear(FormKind::Mass, space, space, &ctx)?;
            let k = assemble_bilinear(FormKind::StiffnessLaplace, space, space, &ctx)?;
            m.add_scaled(&k, 1.0)?
        }
    };
    Ok(InnerProduct { space: space.clone(), kind, matrix })
}

impl InnerProduct {
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let my = self.matrix.matvec(y);
        x.iter().zip(&my).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    pub fn norm_of_difference(&self, x: &[f64], y: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.norm(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::space::{Family, Field, FunctionSpace};
    use crate::mesh::{generate_channel_mesh, ChannelGeometry, Region};

    #[test]
    fn l2_norm_of_unit_field_is_fluid_area() {
        let geom = ChannelGeometry { target_edge_size: 0.25, ..Default::default() };
        let mesh = std::sync::Arc::new(generate_channel_mesh(&geom).unwrap());
        let q = FunctionSpace::new(mesh, Family::P1Scalar, Region::Fluid);
        let ip = gram_matrix(&q, NormKind::L2).unwrap();
        let ones = vec![1.0; q.n_dofs()];
        // 10 * 2.5 - 2 * (1.0 * 0.2) = 24.6
        let area = ip.inner(&ones, &ones);
        assert!((area - 24.6).abs() < 1e-10, "area {area}");
    }

    #[test]
    fn seminorm_kills_constants_h1_splits() {
        let geom = ChannelGeometry { target_edge_size: 0.5, ..Default::default() };
        let mesh = std::sync::Arc::new(generate_channel_mesh(&geom).unwrap());
        let q = FunctionSpace::new(mesh, Family::P1Scalar, Region::Fluid);
        let l2 = gram_matrix(&q, NormKind::L2).unwrap();
        let semi = gram_matrix(&q, NormKind::H1Semi).unwrap();
        let h1 = gram_matrix(&q, NormKind::H1).unwrap();
        let ones = vec![1.0; q.n_dofs()];
        assert!(semi.norm(&ones) < 1e-10);
        let f = Field::interpolate(q.clone(), |p, _| p[0] * p[1] + 0.3 * p[1]);
        let a = h1.norm(f.coeffs()).powi(2);
        let b = l2.norm(f.coeffs()).powi(2) + semi.norm(f.coeffs()).powi(2);
        assert!((a - b).abs() < 1e-12 * a.max(1.0));
        assert!(l2.matrix.is_symmetric(1e-12));
        assert!(semi.matrix.is_symmetric(1e-12));
    }
}
