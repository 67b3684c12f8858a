//! ALE kinematics: the shape parametrization map with its gradient G and
//! determinant K, deformation gradients F and J built from the mesh
//! displacement, and the harmonic extension operator.

use crate::error::{Error, Result};
use crate::fem::quadrature::{tri_geometry, EDGE_QP, N_EDGE_QP, N_TRI_QP, TRI_QP};
use crate::fem::solve::SparseLu;
use crate::fem::space::{Family, Field, FunctionSpace};
use crate::fem::{assemble_bilinear, constrain_matrix, DirichletLift, FormContext, FormKind};
use crate::la2::{self, Mat2, Vec2, IDENTITY};
use crate::mesh::{BoundaryTag, ChannelGeometry, InterfaceFacet, Mesh, Region};
use std::sync::Arc;

/// One affine piece T(x) = A x + b of the shape map, valid on `shape`.
#[derive(Debug, Clone)]
pub struct AffinePiece {
    pub shape: PieceShape,
    pub a: Mat2,
    pub a_inv: Mat2,
    pub b: Vec2,
    pub k: f64,
}

#[derive(Debug, Clone)]
pub enum PieceShape {
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    Tri([Vec2; 3]),
}

impl PieceShape {
    fn contains(&self, p: Vec2, tol: f64) -> bool {
        match self {
            PieceShape::Rect { x0, x1, y0, y1 } => {
                p[0] >= x0 - tol && p[0] <= x1 + tol && p[1] >= y0 - tol && p[1] <= y1 + tol
            }
            PieceShape::Tri(v) => {
                let area2 = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1])
                    - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
                for k in 0..3 {
                    let (a, b) = (v[k], v[(k + 1) % 3]);
                    let s = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                    if s / area2 < -tol {
                        return false;
                    }
                }
                true
            }
        }
    }
}

/// Piecewise-affine shape parametrization T_mu: vertical stretch of the
/// leaflet column so the deformed leaflet length equals `mu_g`, the central
/// gap compressed complementarily, blended to the identity over narrow
/// transition strips on either side of the column. Everything is closed-form
/// in the channel geometry; G is constant on each piece.
#[derive(Debug, Clone)]
pub struct GeometricMap {
    pub mu_g: f64,
    pieces: Vec<AffinePiece>,
    identity: bool,
    tol: f64,
}

impl GeometricMap {
    /// Identity map (non-parametrized runs).
    pub fn identity() -> GeometricMap {
        GeometricMap { mu_g: f64::NAN, pieces: Vec::new(), identity: true, tol: 1e-9 }
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// (G, G^-1, K) at a reference point.
    pub fn gradient_at(&self, p: Vec2) -> (Mat2, Mat2, f64) {
        if self.identity {
            return (IDENTITY, IDENTITY, 1.0);
        }
        let piece = self.locate(p);
        (piece.a, piece.a_inv, piece.k)
    }

    pub fn map_point(&self, p: Vec2) -> Vec2 {
        if self.identity {
            return p;
        }
        let piece = self.locate(p);
        let ap = la2::mat_vec(&piece.a, &p);
        [ap[0] + piece.b[0], ap[1] + piece.b[1]]
    }

    fn locate(&self, p: Vec2) -> &AffinePiece {
        for piece in &self.pieces {
            if piece.shape.contains(p, self.tol) {
                return piece;
            }
        }
        // widen the tolerance for points marginally outside every piece
        for piece in &self.pieces {
            if piece.shape.contains(p, 1e-6) {
                return piece;
            }
        }
        panic!("point ({}, {}) outside every map piece", p[0], p[1]);
    }
}

struct BandMap {
    /// y-interval in the reference configuration.
    y0: f64,
    y1: f64,
    /// Deformed y as a function of reference y: scale * y + offset.
    scale: f64,
    offset: f64,
}

impl BandMap {
    fn displace(&self, y: f64) -> f64 {
        self.scale * y + self.offset - y
    }
}

pub fn build_geometric_map(geom: &ChannelGeometry, mu_g: f64) -> Result<GeometricMap> {
    geom.validate()?;
    let l_ref = geom.leaflet_length;
    let lo = 0.8 * l_ref;
    if !(mu_g >= lo - 1e-12 && mu_g <= l_ref + 1e-12) {
        return Err(Error::ParameterOutOfRange(format!(
            "mu_g = {mu_g} outside validated range [{lo}, {l_ref}]"
        )));
    }
    let h = geom.height;
    let x_l = geom.leaflet_x_position;
    let x_r = x_l + geom.leaflet_thickness;
    let w = geom.transition_width();
    let s_leaf = mu_g / l_ref;
    let s_gap = (h - 2.0 * mu_g) / (h - 2.0 * l_ref);
    let bands = [
        BandMap { y0: 0.0, y1: l_ref, scale: s_leaf, offset: 0.0 },
        BandMap { y0: l_ref, y1: h - l_ref, scale: s_gap, offset: mu_g - l_ref * s_gap },
        BandMap { y0: h - l_ref, y1: h, scale: s_leaf, offset: h * (1.0 - s_leaf) },
    ];

    let mut pieces = Vec::new();
    let mut push_rect = |x0: f64, x1: f64, band: &BandMap| {
        pieces.push(AffinePiece {
            shape: PieceShape::Rect { x0, x1, y0: band.y0, y1: band.y1 },
            a: [[1.0, 0.0], [0.0, band.scale]],
            a_inv: [[1.0, 0.0], [0.0, 1.0 / band.scale]],
            b: [0.0, band.offset],
            k: band.scale,
        });
    };
    // leaflet column: pure vertical stretch per band
    for band in &bands {
        push_rect(x_l, x_r, band);
    }

    // transition strips: P1 blend between the identity (outer side) and the
    // band stretch (column side); triangulated so each piece stays affine,
    // mirrored about the midline to keep the map y-symmetric
    let mut push_tri = |ref_tri: [Vec2; 3], disp: [f64; 3]| -> Result<()> {
        let img = [
            [ref_tri[0][0], ref_tri[0][1] + disp[0]],
            [ref_tri[1][0], ref_tri[1][1] + disp[1]],
            [ref_tri[2][0], ref_tri[2][1] + disp[2]],
        ];
        let (a, b) = la2::affine_from_triangles(&ref_tri, &img)
            .ok_or_else(|| Error::MeshingFailed("degenerate map piece".into()))?;
        let k = la2::det(&a);
        if k <= 0.0 {
            return Err(Error::ParameterOutOfRange(format!(
                "map piece determinant {k} not positive at mu_g = {mu_g}"
            )));
        }
        let a_inv = la2::inv(&a).expect("positive determinant");
        pieces.push(AffinePiece { shape: PieceShape::Tri(ref_tri), a, a_inv, b, k });
        Ok(())
    };

    for (inner_x, outer_x) in [(x_l, x_l - w), (x_r, x_r + w)] {
        for (bi, band) in bands.iter().enumerate() {
            let (y0, y1) = (band.y0, band.y1);
            let (d0, d1) = (band.displace(y0), band.displace(y1));
            if bi == 1 {
                // gap band: split in four around the center so the piece set
                // is symmetric about the midline
                let yc = 0.5 * (y0 + y1);
                let xc = 0.5 * (inner_x + outer_x);
                let dc = 0.5 * band.displace(yc);
                let corners = [
                    ([outer_x, y0], 0.0),
                    ([inner_x, y0], d0),
                    ([inner_x, y1], d1),
                    ([outer_x, y1], 0.0),
                ];
                for k in 0..4 {
                    let (p0, q0) = corners[k];
                    let (p1, q1) = corners[(k + 1) % 4];
                    push_tri([p0, p1, [xc, yc]], [q0, q1, dc])?;
                }
            } else {
                // leaflet bands: two triangles with the diagonal pointing at
                // the column face, mirrored top/bottom
                let (near, far) = if bi == 0 { (y1, y0) } else { (y0, y1) };
                let (d_near, d_far) = (band.displace(near), band.displace(far));
                push_tri(
                    [[outer_x, far], [inner_x, far], [inner_x, near]],
                    [0.0, d_far, d_near],
                )?;
                push_tri(
                    [[outer_x, far], [inner_x, near], [outer_x, near]],
                    [0.0, d_near, 0.0],
                )?;
            }
        }
    }

    // identity elsewhere
    for (x0, x1) in [(0.0, x_l - w), (x_r + w, geom.length)] {
        if x1 > x0 + 1e-12 {
            pieces.push(AffinePiece {
                shape: PieceShape::Rect { x0, x1, y0: 0.0, y1: h },
                a: IDENTITY,
                a_inv: IDENTITY,
                b: [0.0, 0.0],
                k: 1.0,
            });
        }
    }

    Ok(GeometricMap { mu_g, pieces, identity: false, tol: 1e-9 })
}

/// Pullback data at a quadrature point: the total deformation gradient
/// F_total = F G (ALE composed with the shape map), inverted, and its
/// determinant J_total = J K.
#[derive(Debug, Clone, Copy)]
pub struct Pullback {
    pub f_inv: Mat2,
    pub j: f64,
}

impl Pullback {
    pub const REFERENCE: Pullback = Pullback { f_inv: IDENTITY, j: 1.0 };
}

/// Deformation data evaluated at every fluid volume and interface quadrature
/// point, for a given mesh displacement and shape map.
pub struct AleState {
    /// Indexed by mesh triangle id; None outside the fluid region.
    volume: Vec<Option<[Pullback; N_TRI_QP]>>,
    /// Indexed like the interface facet list.
    interface: Vec<[Pullback; N_EDGE_QP]>,
}

impl AleState {
    /// Reference state: F = I, J = 1, G = I (zero displacement, identity map).
    pub fn reference(mesh: &Mesh, facets: &[InterfaceFacet]) -> AleState {
        let mut volume = vec![None; mesh.n_triangles()];
        for t in 0..mesh.n_triangles() {
            if mesh.region(t) == Region::Fluid {
                volume[t] = Some([Pullback::REFERENCE; N_TRI_QP]);
            }
        }
        AleState { volume, interface: vec![[Pullback::REFERENCE; N_EDGE_QP]; facets.len()] }
    }

    pub fn volume_at(&self, tri: usize) -> &[Pullback; N_TRI_QP] {
        self.volume[tri].as_ref().expect("fluid triangle")
    }

    pub fn interface_at(&self, facet: usize) -> &[Pullback; N_EDGE_QP] {
        &self.interface[facet]
    }
}

/// Builds F = I + grad(d_f) G^-1 and J = det F per quadrature point; errors
/// on J <= 0 (tangled mesh).
pub fn deformation_state(
    d_f: &Field,
    map: &GeometricMap,
    facets: &[InterfaceFacet],
) -> Result<AleState> {
    let space = d_f.space();
    if space.family() != Family::P1Vector || space.region() != Region::Fluid {
        return Err(Error::SpaceMismatch("mesh displacement must be P1 vector on the fluid".into()));
    }
    let mesh = space.mesh();
    let mut volume = vec![None; mesh.n_triangles()];
    for (c, &t) in space.cells().iter().enumerate() {
        let geom = tri_geometry(mesh, t);
        // P1 displacement: constant gradient per cell
        let mut grad_d = [[0.0; 2]; 2];
        for (k, &node) in space.cell_nodes(c).iter().enumerate() {
            for comp in 0..2 {
                let u = d_f.coeffs()[space.dof(node, comp)];
                grad_d[comp][0] += u * geom.grad_lambda[k][0];
                grad_d[comp][1] += u * geom.grad_lambda[k][1];
            }
        }
        let mut cell = [Pullback::REFERENCE; N_TRI_QP];
        for (q, (lambda, _)) in TRI_QP.iter().enumerate() {
            let p = geom.point(lambda);
            let (g, g_inv, k_det) = map.gradient_at(p);
            let f = la2::add(&IDENTITY, &la2::mat_mul(&grad_d, &g_inv));
            let j = la2::det(&f);
            if j <= 0.0 {
                return Err(Error::NonpositiveJacobian { cell: t, x: p[0], y: p[1], value: j });
            }
            let f_tot = la2::mat_mul(&f, &g);
            cell[q] = Pullback {
                f_inv: la2::inv(&f_tot).expect("positive determinant"),
                j: j * k_det,
            };
        }
        volume[t] = Some(cell);
    }

    let mut interface = Vec::with_capacity(facets.len());
    for facet in facets {
        let t = facet.fluid_tri;
        let c = space
            .cells()
            .iter()
            .position(|&x| x == t)
            .ok_or_else(|| Error::SpaceMismatch("interface facet outside fluid space".into()))?;
        let geom = tri_geometry(mesh, t);
        let mut grad_d = [[0.0; 2]; 2];
        for (k, &node) in space.cell_nodes(c).iter().enumerate() {
            for comp in 0..2 {
                let u = d_f.coeffs()[space.dof(node, comp)];
                grad_d[comp][0] += u * geom.grad_lambda[k][0];
                grad_d[comp][1] += u * geom.grad_lambda[k][1];
            }
        }
        let tri = mesh.triangle(t);
        let l0 = tri.iter().position(|&v| v == facet.v0).expect("facet vertex");
        let l1 = tri.iter().position(|&v| v == facet.v1).expect("facet vertex");
        let mut edge = [Pullback::REFERENCE; N_EDGE_QP];
        for (q, (s, _)) in EDGE_QP.iter().enumerate() {
            let mut lambda = [0.0; 3];
            lambda[l0] = 1.0 - s;
            lambda[l1] = *s;
            let p = geom.point(&lambda);
            let (g, g_inv, k_det) = map.gradient_at(p);
            let f = la2::add(&IDENTITY, &la2::mat_mul(&grad_d, &g_inv));
            let j = la2::det(&f);
            if j <= 0.0 {
                return Err(Error::NonpositiveJacobian { cell: t, x: p[0], y: p[1], value: j });
            }
            let f_tot = la2::mat_mul(&f, &g);
            edge[q] = Pullback { f_inv: la2::inv(&f_tot).expect("positive determinant"), j: j * k_det };
        }
        interface.push(edge);
    }
    Ok(AleState { volume, interface })
}

/// Harmonic extension of interface traces into the fluid displacement space,
/// with the pulled-back Laplacian factored once.
pub struct HarmonicExtender {
    space: Arc<FunctionSpace>,
    lu: SparseLu,
    lift: DirichletLift,
    /// Fluid-space nodes on the interface, sorted; trace values are passed
    /// in this order, two components per node.
    interface_nodes: Vec<usize>,
    n_outer: usize,
}

impl HarmonicExtender {
    pub fn new(
        space: Arc<FunctionSpace>,
        map: &GeometricMap,
        facets: &[InterfaceFacet],
    ) -> Result<HarmonicExtender> {
        if space.family() != Family::P1Vector || space.region() != Region::Fluid {
            return Err(Error::SpaceMismatch(
                "harmonic extension lives on the fluid P1 vector space".into(),
            ));
        }
        let zero = Field::zeros(space.clone());
        let ale = deformation_state(&zero, map, facets)?;
        let ctx = FormContext::new().with_ale(&ale);
        let a = assemble_bilinear(FormKind::PressureLaplace, &space, &space, &ctx)?;
        let interface_nodes = space.nodes_on_tags(&[BoundaryTag::FsiInterface]);
        let outer_nodes = space.nodes_on_tags(&[
            BoundaryTag::Inlet,
            BoundaryTag::Outlet,
            BoundaryTag::Top,
            BoundaryTag::Bottom,
        ]);
        let mut dofs = Vec::new();
        for &n in &interface_nodes {
            dofs.push(space.dof(n, 0));
            dofs.push(space.dof(n, 1));
        }
        let mut n_outer = 0;
        for &n in &outer_nodes {
            if !interface_nodes.contains(&n) {
                dofs.push(space.dof(n, 0));
                dofs.push(space.dof(n, 1));
                n_outer += 2;
            }
        }
        let (constrained, lift) = constrain_matrix(&a, &dofs);
        let lu = SparseLu::factor(&constrained)?;
        Ok(HarmonicExtender { space, lu, lift, interface_nodes, n_outer })
    }

    pub fn space(&self) -> &Arc<FunctionSpace> {
        &self.space
    }

    pub fn interface_nodes(&self) -> &[usize] {
        &self.interface_nodes
    }

    /// Trace values ordered like `interface_nodes`, interleaved (x, y).
    pub fn extend(&self, trace: &[f64]) -> Result<Field> {
        if trace.len() != 2 * self.interface_nodes.len() {
            return Err(Error::DimensionMismatch(format!(
                "trace length {} != {}",
                trace.len(),
                2 * self.interface_nodes.len()
            )));
        }
        let mut values = trace.to_vec();
        values.extend(std::iter::repeat_n(0.0, self.n_outer));
        let mut rhs = vec![0.0; self.space.n_dofs()];
        self.lift.apply(&mut rhs, &values);
        let x = self.lu.solve(&rhs);
        Field::from_coeffs(self.space.clone(), x)
    }
}

/// One-shot harmonic extension matching the module contract; repeated calls
/// should construct a `HarmonicExtender` instead.
pub fn harmonic_extension(
    space: &Arc<FunctionSpace>,
    map: &GeometricMap,
    facets: &[InterfaceFacet],
    trace: &[f64],
) -> Result<Field> {
    HarmonicExtender::new(space.clone(), map, facets)?.extend(trace)
}
