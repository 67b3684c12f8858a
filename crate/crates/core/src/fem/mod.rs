//! Lagrange finite elements on triangles: spaces, quadrature, form assembly,
//! constraints, sparse solves and Newton iteration.

pub mod assemble;
pub mod dirichlet;
pub mod gram;
pub mod newton;
pub mod quadrature;
pub mod solve;
pub mod space;

pub use assemble::{
    assemble_bilinear, assemble_divergence_vector, assemble_interface_normal_flux,
    assemble_source_vector, FormContext, FormKind, TractionPart,
};
pub use dirichlet::{apply_dirichlet, constrain_matrix, DirichletLift};
pub use gram::{gram_matrix, InnerProduct, NormKind};
pub use newton::{newton_solve, NewtonOutcome, NonlinearSystem};
pub use solve::{solve_sparse, SparseLu};
pub use space::{interp_p1_to_p2, Family, Field, FunctionSpace};
