//! Sparse assembly of the bilinear forms of the coupled scheme, all pulled
//! back to the reference configuration. Volume terms use the degree-4
//! triangle rule, interface terms the degree-4 edge rule.
//!
//! Every ALE form reads the total deformation data (F G)^-1 and J K from an
//! `AleState`, so the non-parametrized forms are the special case G = I,
//! K = 1 of the same kernels.

use crate::ale::AleState;
use crate::error::{Error, Result};
use crate::fem::quadrature::{
    p1_gradients, p1_values, p2_gradients, p2_values, tri_geometry, EDGE_QP, TRI_QP,
};
use crate::fem::space::{Family, Field, FunctionSpace};
use crate::la2::{self, Mat2, Vec2};
use crate::mesh::{InterfaceFacet, Region};
use crate::sparse::{SparseMatrix, TripletBuilder};

/// Which side of the interface traction operator to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TractionPart {
    /// rows: solid displacement test space, cols: fluid velocity;
    /// integrand (eps(u) F^-T J) n against solid tests (viscosity not included).
    Viscous,
    /// rows: solid displacement test space, cols: fluid pressure;
    /// integrand p (J F^-T n) against solid tests (positive sign; the Cauchy
    /// stress contributes -p I, applied by the caller).
    Pressure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// Reference mass matrix (any family).
    Mass,
    /// Reference stiffness (component-decoupled for vector families).
    StiffnessLaplace,
    /// J eps(u) F^-T : grad v with eps(u) = grad(u) F^-1 + F^-T grad(u)^T;
    /// the viscosity factor is applied by the caller.
    FluidViscous,
    /// J (grad(u) F^-1 a) . v for a given advection field a.
    FluidConvection,
    /// J (F^-T grad p) . (F^-T grad q); doubles as the pulled-back mesh
    /// motion operator when assembled on a vector space.
    PressureLaplace,
    /// J (F^-T grad p) . v, trial scalar pressure, test vector velocity.
    PressureGrad,
    /// K P(d) G^-T : grad e with P the linear elastic stress; needs lambda, mu.
    SolidElasticity,
    /// Interface mass int_Gamma p q ds on the reference interface.
    InterfaceMass,
    /// Interface traction blocks, see `TractionPart`.
    InterfaceTraction(TractionPart),
}

/// Coefficient data a form may need.
#[derive(Default, Clone, Copy)]
pub struct FormContext<'a> {
    pub ale: Option<&'a AleState>,
    pub map: Option<&'a crate::ale::GeometricMap>,
    pub facets: Option<&'a [InterfaceFacet]>,
    pub advect: Option<&'a Field>,
    pub lame: Option<(f64, f64)>,
}

impl<'a> FormContext<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_ale(mut self, ale: &'a AleState) -> Self {
        self.ale = Some(ale);
        self
    }

    pub fn with_map(mut self, map: &'a crate::ale::GeometricMap) -> Self {
        self.map = Some(map);
        self
    }

    pub fn with_facets(mut self, facets: &'a [InterfaceFacet]) -> Self {
        self.facets = Some(facets);
        self
    }

    pub fn with_advect(mut self, advect: &'a Field) -> Self {
        self.advect = Some(advect);
        self
    }

    pub fn with_lame(mut self, lambda: f64, mu: f64) -> Self {
        self.lame = Some((lambda, mu));
        self
    }
}

/// Shape data of one space on one cell at one quadrature point.
struct ShapeEval {
    n: [f64; 6],
    grad: [Vec2; 6],
    count: usize,
}

fn eval_shapes(space: &FunctionSpace, geom: &crate::fem::quadrature::TriGeometry, lambda: &[f64; 3]) -> ShapeEval {
    match space.family() {
        Family::P2Vector => {
            let n6 = p2_values(lambda);
            let g6 = p2_gradients(geom, lambda);
            ShapeEval { n: n6, grad: g6, count: 6 }
        }
        _ => {
            let n3 = p1_values(lambda);
            let g3 = p1_gradients(geom);
            let mut n = [0.0; 6];
            let mut grad = [[0.0; 2]; 6];
            n[..3].copy_from_slice(&n3);
            grad[..3].copy_from_slice(&g3);
            ShapeEval { n, grad, count: 3 }
        }
    }
}

fn require_same_mesh(a: &FunctionSpace, b: &FunctionSpace) -> Result<()> {
    if !std::sync::Arc::ptr_eq(a.mesh(), b.mesh()) {
        return Err(Error::SpaceMismatch("trial and test spaces on different meshes".into()));
    }
    Ok(())
}

pub fn assemble_bilinear(
    form: FormKind,
    trial: &FunctionSpace,
    test: &FunctionSpace,
    ctx: &FormContext,
) -> Result<SparseMatrix> {
    require_same_mesh(trial, test)?;
    match form {
        FormKind::Mass | FormKind::StiffnessLaplace => {
            if !std::ptr::eq(trial, test) {
                return Err(Error::SpaceMismatch("reference forms need trial == test".into()));
            }
            assemble_reference(form, trial)
        }
        FormKind::PressureLaplace => {
            if !std::ptr::eq(trial, test) {
                return Err(Error::SpaceMismatch("pressure Laplacian needs trial == test".into()));
            }
            let ale = need_ale(ctx)?;
            assemble_pressure_laplace(trial, ale)
        }
        FormKind::FluidViscous => {
            check_fluid_velocity(trial, test)?;
            let ale = need_ale(ctx)?;
            assemble_viscous(trial, ale)
        }
        FormKind::FluidConvection => {
            check_fluid_velocity(trial, test)?;
            let ale = need_ale(ctx)?;
            let advect = ctx
                .advect
                .ok_or_else(|| Error::SpaceMismatch("convection needs an advection field".into()))?;
            assemble_convection(trial, advect, ale)
        }
        FormKind::PressureGrad => {
            if trial.family() != Family::P1Scalar || test.family() != Family::P2Vector {
                return Err(Error::SpaceMismatch("pressure gradient needs P1 scalar trial, P2 vector test".into()));
            }
            let ale = need_ale(ctx)?;
            assemble_pressure_grad(trial, test, ale)
        }
        FormKind::SolidElasticity => {
            if !std::ptr::eq(trial, test)
                || trial.family() != Family::P1Vector
                || trial.region() != Region::Solid
            {
                return Err(Error::SpaceMismatch("elasticity needs the solid P1 vector space".into()));
            }
            let (lambda, mu) = ctx
                .lame
                .ok_or_else(|| Error::SpaceMismatch("elasticity needs Lame constants".into()))?;
            assemble_solid_elasticity(trial, ctx.map, lambda, mu)
        }
        FormKind::InterfaceMass => {
            if !std::ptr::eq(trial, test) || trial.family() != Family::P1Scalar {
                return Err(Error::SpaceMismatch("interface mass needs the pressure space".into()));
            }
            let facets = need_facets(ctx)?;
            assemble_interface_mass(trial, facets)
        }
        FormKind::InterfaceTraction(part) => {
            let ale = need_ale(ctx)?;
            let facets = need_facets(ctx)?;
            assemble_interface_traction(part, trial, test, ale, facets)
        }
    }
}

fn need_ale<'a>(ctx: &FormContext<'a>) -> Result<&'a AleState> {
    ctx.ale.ok_or_else(|| Error::SpaceMismatch("form needs deformation data".into()))
}

fn need_facets<'a>(ctx: &FormContext<'a>) -> Result<&'a [InterfaceFacet]> {
    ctx.facets.ok_or_else(|| Error::SpaceMismatch("form needs the interface facet list".into()))
}

fn check_fluid_velocity(trial: &FunctionSpace, test: &FunctionSpace) -> Result<()> {
    if !std::ptr::eq(trial, test) || trial.family() != Family::P2Vector || trial.region() != Region::Fluid
    {
        return Err(Error::SpaceMismatch("fluid form needs the P2 fluid velocity space".into()));
    }
    Ok(())
}

fn assemble_reference(form: FormKind, space: &FunctionSpace) -> Result<SparseMatrix> {
    let mesh = space.mesh();
    let nc = space.components();
    let npc = space.family().nodes_per_cell();
    let mut b = TripletBuilder::with_capacity(
        space.n_dofs(),
        space.n_dofs(),
        space.cells().len() * (npc * nc) * (npc * nc),
    );
    for (c, &t) in space.cells().iter().enumerate() {
        let geom = tri_geometry(mesh, t);
        let nodes = space.cell_nodes(c);
        let mut local = [[0.0; 12]; 12];
        for (lambda, wq) in &TRI_QP {
            let sh = eval_shapes(space, &geom, lambda);
            let w = wq * geom.area;
            for a in 0..sh.count {
                for bnode in 0..sh.count {
                    let v = match form {
                        FormKind::Mass => w * sh.n[a] * sh.n[bnode],
                        FormKind::StiffnessLaplace => w * la2::dot(&sh.grad[a], &sh.grad[bnode]),
                        _ => unreachable!(),
                    };
                    local[a][bnode] += v;
                }
            }
        }
        for a in 0..npc {
            for bn in 0..npc {
                for comp in 0..nc {
                    b.push(space.dof(nodes[a], comp), space.dof(nodes[bn], comp), local[a][bn]);
                }
            }
        }
    }
    Ok(b.build())
}

fn assemble_pressure_laplace(space: &FunctionSpace, ale: &AleState) -> Result<SparseMatrix> {
    let mesh = space.mesh();
    if space.region() != Region::Fluid {
        return Err(Error::SpaceMismatch("pulled-back Laplacian lives on the fluid".into()));
    }
    let nc = space.components();
    let npc = space.family().nodes_per_cell();
    let mut b = TripletBuilder::with_capacity(
        space.n_dofs(),
        space.n_dofs(),
        space.cells().len() * (npc * nc) * (npc * nc),
    );
    for (c, &t) in space.cells().iter().enumerate() {
        let geom = tri_geometry(mesh, t);
        let nodes = space.cell_nodes(c);
        let pb = ale.volume_at(t);
        let mut local = [[0.0; 6]; 6];
        for (q, (lambda, wq)) in TRI_QP.iter().enumerate() {
            let sh = eval_shapes(space, &geom, lambda);
            let w = wq * geom.area * pb[q].j;
            let mut qv = [[0.0; 2]; 6];
            for a in 0..sh.count {
                qv[a] = la2::mat_t_vec(&pb[q].f_inv, &sh.grad[a]);
            }
            for a in 0..sh.count {
                for bn in 0..sh.count {
                    local[a][bn] += w * la2::dot(&qv[a], &qv[bn]);
                }
            }
        }
        for a in 0..npc {
            for bn in 0..npc {
                for comp in 0..nc {
                    b.push(space.dof(nodes[a], comp), space.dof(nodes[bn], comp), local[a][bn]);
                }
            }
        }
    }
    Ok(b.build())
}

fn assemble_viscous(space: &FunctionSpace, ale: &AleState) -> Result<SparseMatrix> {
    let mesh = space.mesh();
    let mut b = TripletBuilder::with_capacity(space.n_dofs(), space.n_dofs(), space.cells().len() * 144);
    for (c, &t) in space.cells().iter().enumerate() {
        let geom = tri_geometry(mesh, t);
        let nodes = space.cell_nodes(c);
        let pb = ale.volume_at(t);
        let mut local = [[0.0; 12]; 12];
        for (q, (lambda, wq)) in TRI_QP.iter().enumerate() {
            let sh = eval_shapes(space, &geom, lambda);
            let w = wq * geom.area * pb[q].j;
            let mut qv = [[0.0; 2]; 6];
            for a in 0..6 {
                qv[a] = la2::mat_t_vec(&pb[q].f_inv, &sh.grad[a]);
            }
            // entry ((a,c),(b,d)) = w (delta_cd q_a.q_b + q_a[d] q_b[c])
            for a in 0..6 {
                for bn in 0..6 {
                    let qq = la2::dot(&qv[a], &qv[bn]);
                    for ca in 0..2 {
                        for cb in 0..2 {
                            let mut v = qv[a][cb] * qv[bn][ca];
                            if ca == cb {
                                v += qq;
                            }
                            local[2 * a + ca][2 * bn + cb] += w * v;
                        }
                    }
                }
            }
        }
        scatter_vector_local(&mut b, space, nodes, &local);
    }
    Ok(b.build())
}

fn assemble_convection(space: &FunctionSpace, advect: &Field, ale: &AleState) -> Result<SparseMatrix> {
    if !std::ptr::eq(advect.space().as_ref(), space) {
        return Err(Error::SpaceMismatch("advection field on a different space".into()));
    }
    let mesh = space.mesh();
    let mut b = TripletBuilder::with_capacity(space.n_dofs(), space.n_dofs(), space.cells().len() * 144);
    for (c, &t) in space.cells().iter().enumerate() {
        let geom = tri_geometry(mesh, t);
        let nodes = space.cell_nodes(c);
        let pb = ale.volume_at(t);
        let mut local = [[0.0; 12]; 12];
        for (q, (lambda, wq)) in TRI_QP.iter().enumerate() {
            let sh = eval_shapes(space, &geom, lambda);
            let w = wq * geom.area * pb[q].j;
            let mut a_val = [0.0, 0.0];
            for (k, &node) in nodes.iter().enumerate() {
                for comp in 0..2 {
                    a_val[comp] += advect.coeffs()[space.dof(node, comp)] * sh.n[k];
                }
            }
            let fa = la2::mat_vec(&pb[q].f_inv, &a_val);
            for bn in 0..6 {
                let gb = la2::dot(&sh.grad[bn], &fa);
                for a in 0..6 {
                    let base = w * sh.n[a] * gb;
                    local[2 * a][2 * bn] += base;
                    local[2 * a + 1][2 * bn + 1] += base;
                }
            }
        }
        scatter_vector_local(&mut b, space, nodes, &local);
    }
    Ok(b.build())
}

fn assemble_pressure_grad(
    trial: &FunctionSpace,
    test: &FunctionSpace,
    ale: &AleState,
) -> Result<SparseMatrix> {
    let mesh = test.mesh();
    if trial.region() != Region::Fluid || test.region() != Region::Fluid {
        return Err(Error::SpaceMismatch("pressure gradient lives on the fluid".into()));
    }
    let mut b = TripletBuilder::with_capacity(test.n_dofs(), trial.n_dofs(), test.cells().len() * 72);
    for (c, &t) in test.cells().iter().enumerate() {
        let geom = tri_geometry(mesh, t);
        let vnodes = test.cell_nodes(c);
        let ct = trial.cells().iter().position(|&x| x == t).ok_or_else(|| {
            Error::SpaceMismatch("trial space does not cover the test cell".into())
        })?;
        let pnodes = trial.cell_nodes(ct);
        let pb = ale.volume_at(t);
        let mut local = [[0.0; 3]; 12];
        for (q, (lambda, wq)) in TRI_QP.iter().enumerate() {
            let shv = eval_shapes(test, &geom, lambda);
            let shp = eval_shapes(trial, &geom, lambda);
            let w = wq * geom.area * pb[q].j;
            for bn in 0..3 {
                let qp = la2::mat_t_vec(&pb[q].f_inv, &shp.grad[bn]);
                for a in 0..6 {
                    for comp in 0..2 {
                        local[2 * a + comp][bn] += w * shv.n[a] * qp[comp];
                    }
                }
            }
        }
        for a in 0..6 {
            for comp in 0..2 {
                for bn in 0..3 {
                    b.push(test.dof(vnodes[a], comp), trial.dof(pnodes[bn], 0), local[2 * a + comp][bn]);
                }
            }
        }
    }
    Ok(b.build())
}

fn assemble_solid_elasticity(
    space: &FunctionSpace,
    map: Option<&crate::ale::GeometricMap>,
    lambda_s: f64,
    mu_s: f64,
) -> Result<SparseMatrix> {
    let mesh = space.mesh();
    let map_identity;
    let map = match map {
        Some(m) => m,
        None => {
            map_identity = crate::ale::GeometricMap::identity();
            &map_identity
        }
    };
    let mut b = TripletBuilder::with_capacity(space.n_dofs(), space.n_dofs(), space.cells().len() * 36);
    for (c, &t) in space.cells().iter().enumerate() {
        let geom = tri_geometry(mesh, t);
        let nodes = space.cell_nodes(c);
        let mut local = [[0.0; 6]; 6];
        for (lambda, wq) in &TRI_QP {
            let sh = eval_shapes(space, &geom, lambda);
            let p = geom.point(lambda);
            let (_, g_inv, k_det) = map.gradient_at(p);
            let w = wq * geom.area * k_det;
            let mut qv = [[0.0; 2]; 3];
            for a in 0..3 {
                qv[a] = la2::mat_t_vec(&g_inv, &sh.grad[a]);
            }
            // entry ((a,c),(b,d)) = w [ lambda q_a[c] q_b[d]
            //                           + mu (delta_cd q_a.q_b + q_a[d] q_b[c]) ]
            for a in 0..3 {
                for bn in 0..3 {
                    let qq = la2::dot(&qv[a], &qv[bn]);
                    for ca in 0..2 {
                        for cb in 0..2 {
                            let mut v = lambda_s * qv[a][ca] * qv[bn][cb] + mu_s * qv[a][cb] * qv[bn][ca];
                            if ca == cb {
                                v += mu_s * qq;
                            }
                            local[2 * a + ca][2 * bn + cb] += w * v;
                        }
                    }
                }
            }
        }
        for a in 0..3 {
            for bn in 0..3 {
                for ca in 0..2 {
                    for cb in 0..2 {
                        b.push(
                            space.dof(nodes[a], ca),
                            space.dof(nodes[bn], cb),
                            local[2 * a + ca][2 * bn + cb],
                        );
                    }
                }
            }
        }
    }
    Ok(b.build())
}

fn assemble_interface_mass(space: &FunctionSpace, facets: &[InterfaceFacet]) -> Result<SparseMatrix> {
    let mut b = TripletBuilder::new(space.n_dofs(), space.n_dofs());
    for facet in facets {
        let (n0, n1) = (
            space.vertex_node(facet.v0).ok_or_else(missing_node)?,
            space.vertex_node(facet.v1).ok_or_else(missing_node)?,
        );
        let mut local = [[0.0; 2]; 2];
        for (s, wq) in &EDGE_QP {
            let n = [1.0 - s, *s];
            let w = wq * facet.length;
            for a in 0..2 {
                for bn in 0..2 {
                    local[a][bn] += w * n[a] * n[bn];
                }
            }
        }
        let nodes = [n0, n1];
        for a in 0..2 {
            for bn in 0..2 {
                b.push(space.dof(nodes[a], 0), space.dof(nodes[bn], 0), local[a][bn]);
            }
        }
    }
    Ok(b.build())
}

fn missing_node() -> Error {
    Error::SpaceMismatch("interface vertex missing from space".into())
}

fn assemble_interface_traction(
    part: TractionPart,
    trial: &FunctionSpace,
    test: &FunctionSpace,
    ale: &AleState,
    facets: &[InterfaceFacet],
) -> Result<SparseMatrix> {
    if test.family() != Family::P1Vector || test.region() != Region::Solid {
        return Err(Error::SpaceMismatch("traction tests live on the solid P1 vector space".into()));
    }
    match part {
        TractionPart::Viscous => {
            if trial.family() != Family::P2Vector || trial.region() != Region::Fluid {
                return Err(Error::SpaceMismatch("viscous traction trial is the fluid velocity".into()));
            }
        }
        TractionPart::Pressure => {
            if trial.family() != Family::P1Scalar || trial.region() != Region::Fluid {
                return Err(Error::SpaceMismatch("pressure traction trial is the fluid pressure".into()));
            }
        }
    }
    let mesh = test.mesh();
    let mut b = TripletBuilder::new(test.n_dofs(), trial.n_dofs());
    for (fi, facet) in facets.iter().enumerate() {
        let pb = ale.interface_at(fi);
        // fluid-side cell data
        let tf = facet.fluid_tri;
        let cf = trial.cells().iter().position(|&x| x == tf).ok_or_else(|| {
            Error::SpaceMismatch("fluid cell missing from trial space".into())
        })?;
        let geom_f = tri_geometry(mesh, tf);
        let tri_f = mesh.triangle(tf);
        let lf0 = tri_f.iter().position(|&v| v == facet.v0).unwrap();
        let lf1 = tri_f.iter().position(|&v| v == facet.v1).unwrap();
        let fnodes = trial.cell_nodes(cf);
        // solid-side test nodes: only the two facet vertices see the edge
        let (sn0, sn1) = (
            test.vertex_node(facet.v0).ok_or_else(missing_node)?,
            test.vertex_node(facet.v1).ok_or_else(missing_node)?,
        );
        let snodes = [sn0, sn1];
        for (q, (s, wq)) in EDGE_QP.iter().enumerate() {
            let mut lambda = [0.0; 3];
            lambda[lf0] = 1.0 - s;
            lambda[lf1] = *s;
            let w = wq * facet.length;
            let ns = [1.0 - s, *s];
            // co-normal J F^-T n on the reference edge
            let m = la2::mat_t_vec(&pb[q].f_inv, &facet.normal);
            let m = [m[0] * pb[q].j, m[1] * pb[q].j];
            match part {
                TractionPart::Viscous => {
                    let sh = eval_shapes(trial, &geom_f, &lambda);
                    let mut qv = [[0.0; 2]; 6];
                    for bn in 0..6 {
                        qv[bn] = la2::mat_t_vec(&pb[q].f_inv, &sh.grad[bn]);
                    }
                    // (eps(u_b,d) m)_c = delta_cd (q_b.m) + q_b[c] m[d]
                    for a in 0..2 {
                        for bn in 0..6 {
                            let qm = la2::dot(&qv[bn], &m);
                            for ca in 0..2 {
                                for cb in 0..2 {
                                    let mut v = qv[bn][ca] * m[cb];
                                    if ca == cb {
                                        v += qm;
                                    }
                                    b.push(
                                        test.dof(snodes[a], ca),
                                        trial.dof(fnodes[bn], cb),
                                        w * ns[a] * v,
                                    );
                                }
                            }
                        }
                    }
                }
                TractionPart::Pressure => {
                    let sh = eval_shapes(trial, &geom_f, &lambda);
                    for a in 0..2 {
                        for bn in 0..3 {
                            for ca in 0..2 {
                                b.push(
                                    test.dof(snodes[a], ca),
                                    trial.dof(fnodes[bn], 0),
                                    w * ns[a] * sh.n[bn] * m[ca],
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(b.build())
}

/// Normal-velocity coupling block: rows fluid pressure tests, columns solid
/// displacement; entry int_Gamma (d . J F^-T n) q ds. Applied to the BDF2
/// stencil of the solid displacement in the pressure step.
pub fn assemble_interface_normal_flux(
    solid: &FunctionSpace,
    pressure: &FunctionSpace,
    ale: &AleState,
    facets: &[InterfaceFacet],
) -> Result<SparseMatrix> {
    if solid.family() != Family::P1Vector || solid.region() != Region::Solid {
        return Err(Error::SpaceMismatch("normal flux columns are solid displacements".into()));
    }
    if pressure.family() != Family::P1Scalar || pressure.region() != Region::Fluid {
        return Err(Error::SpaceMismatch("normal flux rows are fluid pressures".into()));
    }
    let mut b = TripletBuilder::new(pressure.n_dofs(), solid.n_dofs());
    for (fi, facet) in facets.iter().enumerate() {
        let pb = ale.interface_at(fi);
        let (p0, p1) = (
            pressure.vertex_node(facet.v0).ok_or_else(missing_node)?,
            pressure.vertex_node(facet.v1).ok_or_else(missing_node)?,
        );
        let (s0, s1) = (
            solid.vertex_node(facet.v0).ok_or_else(missing_node)?,
            solid.vertex_node(facet.v1).ok_or_else(missing_node)?,
        );
        let pnodes = [p0, p1];
        let snodes = [s0, s1];
        for (q, (s, wq)) in EDGE_QP.iter().enumerate() {
            let ns = [1.0 - s, *s];
            let w = wq * facet.length;
            let m = la2::mat_t_vec(&pb[q].f_inv, &facet.normal);
            let m = [m[0] * pb[q].j, m[1] * pb[q].j];
            for a in 0..2 {
                for bn in 0..2 {
                    for cb in 0..2 {
                        b.push(
                            pressure.dof(pnodes[a], 0),
                            solid.dof(snodes[bn], cb),
                            w * ns[a] * ns[bn] * m[cb],
                        );
                    }
                }
            }
        }
    }
    Ok(b.build())
}

/// RHS vector int tr(J F_tot^-1 grad u) q dx over the fluid, the pulled-back
/// divergence of the velocity tested against the pressure space.
pub fn assemble_divergence_vector(
    u: &Field,
    pressure: &FunctionSpace,
    ale: &AleState,
) -> Result<Vec<f64>> {
    let vs = u.space();
    if vs.family() != Family::P2Vector || pressure.family() != Family::P1Scalar {
        return Err(Error::SpaceMismatch("divergence needs P2 velocity and P1 pressure".into()));
    }
    let mesh = pressure.mesh();
    let mut out = vec![0.0; pressure.n_dofs()];
    for (cp, &t) in pressure.cells().iter().enumerate() {
        let cv = vs.cells().iter().position(|&x| x == t).ok_or_else(|| {
            Error::SpaceMismatch("velocity space does not cover pressure cell".into())
        })?;
        let geom = tri_geometry(mesh, t);
        let vnodes = vs.cell_nodes(cv);
        let pnodes = pressure.cell_nodes(cp);
        let pb = ale.volume_at(t);
        for (q, (lambda, wq)) in TRI_QP.iter().enumerate() {
            let shv = eval_shapes(vs, &geom, lambda);
            let shp = eval_shapes(pressure, &geom, lambda);
            let w = wq * geom.area;
            // grad u at the point
            let mut grad_u = [[0.0; 2]; 2];
            for (k, &node) in vnodes.iter().enumerate() {
                for comp in 0..2 {
                    let c = u.coeffs()[vs.dof(node, comp)];
                    grad_u[comp][0] += c * shv.grad[k][0];
                    grad_u[comp][1] += c * shv.grad[k][1];
                }
            }
            // tr(J F^-1 grad u)
            let fg = la2::mat_mul(&pb[q].f_inv, &grad_u);
            let div = pb[q].j * (fg[0][0] + fg[1][1]);
            for (a, &node) in pnodes.iter().enumerate() {
                out[pressure.dof(node, 0)] += w * div * shp.n[a];
            }
        }
    }
    Ok(out)
}

/// RHS vector int f . v dx (or f v for scalar spaces) with f given
/// analytically; used by manufactured-solution tests.
pub fn assemble_source_vector<F: Fn(Vec2, usize) -> f64>(
    space: &FunctionSpace,
    f: F,
) -> Vec<f64> {
    let mesh = space.mesh();
    let nc = space.components();
    let mut out = vec![0.0; space.n_dofs()];
    for (c, &t) in space.cells().iter().enumerate() {
        let geom = tri_geometry(mesh, t);
        let nodes = space.cell_nodes(c);
        for (lambda, wq) in &TRI_QP {
            let sh = eval_shapes(space, &geom, lambda);
            let p = geom.point(lambda);
            let w = wq * geom.area;
            for comp in 0..nc {
                let fv = f(p, comp);
                for (a, &node) in nodes.iter().enumerate() {
                    out[space.dof(node, comp)] += w * fv * sh.n[a];
                }
            }
        }
    }
    out
}

fn scatter_vector_local(
    b: &mut TripletBuilder,
    space: &FunctionSpace,
    nodes: &[usize],
    local: &[[f64; 12]; 12],
) {
    let npc = nodes.len();
    for a in 0..npc {
        for bn in 0..npc {
            for ca in 0..2 {
                for cb in 0..2 {
                    b.push(
                        space.dof(nodes[a], ca),
                        space.dof(nodes[bn], cb),
                        local[2 * a + ca][2 * bn + cb],
                    );
                }
            }
        }
    }
}
