//! Lagrange function spaces restricted to one mesh region, and coefficient
//! fields over them. Vector spaces interleave components: dof = node * 2 + c.

use crate::error::{Error, Result};
use crate::la2::Vec2;
use crate::mesh::{BoundaryTag, Mesh, Region};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    P1Scalar,
    P1Vector,
    P2Vector,
}

impl Family {
    pub fn components(self) -> usize {
        match self {
            Family::P1Scalar => 1,
            _ => 2,
        }
    }

    pub fn nodes_per_cell(self) -> usize {
        match self {
            Family::P2Vector => 6,
            _ => 3,
        }
    }

    pub fn is_p2(self) -> bool {
        self == Family::P2Vector
    }
}

/// Where a space node sits on the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Vertex(usize),
    EdgeMidpoint(usize),
}

#[derive(Debug)]
pub struct FunctionSpace {
    mesh: Arc<Mesh>,
    family: Family,
    region: Region,
    cells: Vec<usize>,
    cell_nodes: Vec<[usize; 6]>,
    node_kind: Vec<NodeKind>,
    vertex_node: Vec<Option<usize>>,
    edge_node: Vec<Option<usize>>,
}

impl FunctionSpace {
    pub fn new(mesh: Arc<Mesh>, family: Family, region: Region) -> Arc<FunctionSpace> {
        let cells: Vec<usize> =
            (0..mesh.n_triangles()).filter(|&t| mesh.region(t) == region).collect();
        let mut vertex_node = vec![None; mesh.n_vertices()];
        let mut edge_node = vec![None; mesh.n_edges()];
        let mut node_kind = Vec::new();
        let mut cell_nodes = Vec::with_capacity(cells.len());
        for &t in &cells {
            let tri = mesh.triangle(t);
            let mut nodes = [usize::MAX; 6];
            for k in 0..3 {
                let v = tri[k];
                let id = *vertex_node[v].get_or_insert_with(|| {
                    node_kind.push(NodeKind::Vertex(v));
                    node_kind.len() - 1
                });
                nodes[k] = id;
            }
            if family.is_p2() {
                for k in 0..3 {
                    let e = mesh.edge_id(tri[k], tri[(k + 1) % 3]).expect("mesh edge");
                    let id = *edge_node[e].get_or_insert_with(|| {
                        node_kind.push(NodeKind::EdgeMidpoint(e));
                        node_kind.len() - 1
                    });
                    nodes[3 + k] = id;
                }
            }
            cell_nodes.push(nodes);
        }
        Arc::new(FunctionSpace {
            mesh,
            family,
            region,
            cells,
            cell_nodes,
            node_kind,
            vertex_node,
            edge_node,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn n_nodes(&self) -> usize {
        self.node_kind.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_nodes() * self.family.components()
    }

    pub fn components(&self) -> usize {
        self.family.components()
    }

    /// Mesh triangle indices covered by this space.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// Space node ids for local cell `c` (first 3 for P1, all 6 for P2).
    pub fn cell_nodes(&self, c: usize) -> &[usize] {
        &self.cell_nodes[c][..self.family.nodes_per_cell()]
    }

    #[inline]
    pub fn dof(&self, node: usize, comp: usize) -> usize {
        node * self.family.components() + comp
    }

    pub fn node_kind(&self, node: usize) -> NodeKind {
        self.node_kind[node]
    }

    pub fn vertex_node(&self, v: usize) -> Option<usize> {
        self.vertex_node[v]
    }

    pub fn edge_midpoint_node(&self, e: usize) -> Option<usize> {
        self.edge_node[e]
    }

    pub fn node_position(&self, node: usize) -> Vec2 {
        match self.node_kind[node] {
            NodeKind::Vertex(v) => self.mesh.vertex(v),
            NodeKind::EdgeMidpoint(e) => {
                let (a, b) = self.mesh.edge(e);
                let (pa, pb) = (self.mesh.vertex(a), self.mesh.vertex(b));
                [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0]
            }
        }
    }

    /// Nodes lying on edges carrying any of the given tags (sorted, unique).
    /// For P2 spaces this includes the tagged edges' midpoint nodes.
    pub fn nodes_on_tags(&self, tags: &[BoundaryTag]) -> Vec<usize> {
        let mut out = Vec::new();
        for e in self.mesh.tagged_edges(tags) {
            let (a, b) = self.mesh.edge(e);
            if let Some(n) = self.vertex_node[a] {
                out.push(n);
            }
            if let Some(n) = self.vertex_node[b] {
                out.push(n);
            }
            if self.family.is_p2() {
                if let Some(n) = self.edge_node[e] {
                    out.push(n);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn dofs_on_tags(&self, tags: &[BoundaryTag]) -> Vec<usize> {
        let nc = self.components();
        self.nodes_on_tags(tags)
            .into_iter()
            .flat_map(|n| (0..nc).map(move |c| n * nc + c))
            .collect()
    }

    pub fn same_space(&self, other: &FunctionSpace) -> bool {
        std::ptr::eq(self, other)
    }
}

/// Coefficient vector over a function space.
#[derive(Debug, Clone)]
pub struct Field {
    space: Arc<FunctionSpace>,
    coeffs: Vec<f64>,
}

impl Field {
    pub fn zeros(space: Arc<FunctionSpace>) -> Field {
        let n = space.n_dofs();
        Field { space, coeffs: vec![0.0; n] }
    }

    pub fn from_coeffs(space: Arc<FunctionSpace>, coeffs: Vec<f64>) -> Result<Field> {
        if coeffs.len() != space.n_dofs() {
            return Err(Error::SpaceMismatch(format!(
                "coefficient length {} != n_dofs {}",
                coeffs.len(),
                space.n_dofs()
            )));
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::SpaceMismatch("non-finite coefficient".into()));
        }
        Ok(Field { space, coeffs })
    }

    /// Nodal interpolation of a function of (position, component).
    pub fn interpolate<F: Fn(Vec2, usize) -> f64>(space: Arc<FunctionSpace>, f: F) -> Field {
        let nc = space.components();
        let mut coeffs = vec![0.0; space.n_dofs()];
        for node in 0..space.n_nodes() {
            let p = space.node_position(node);
            for c in 0..nc {
                coeffs[node * nc + c] = f(p, c);
            }
        }
        Field { space, coeffs }
    }

    pub fn space(&self) -> &Arc<FunctionSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn set(&mut self, dof: usize, v: f64) {
        self.coeffs[dof] = v;
    }

    pub fn axpy(&mut self, alpha: f64, other: &Field) {
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs()) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.coeffs {
            *a *= alpha;
        }
    }
}

/// Interpolates a P1 vector field into a P2 vector space on the same mesh
/// and region (midpoint values are edge-endpoint averages, exact for P1).
pub fn interp_p1_to_p2(src: &Field, dst_space: &Arc<FunctionSpace>) -> Result<Field> {
    let sp_src = src.space();
    if sp_src.family() != Family::P1Vector || dst_space.family() != Family::P2Vector {
        return Err(Error::SpaceMismatch("interp_p1_to_p2 needs P1 vector -> P2 vector".into()));
    }
    if !Arc::ptr_eq(sp_src.mesh(), dst_space.mesh()) || sp_src.region() != dst_space.region() {
        return Err(Error::SpaceMismatch("interp_p1_to_p2: different mesh or region".into()));
    }
    let mesh = dst_space.mesh();
    let mut out = vec![0.0; dst_space.n_dofs()];
    for node in 0..dst_space.n_nodes() {
        match dst_space.node_kind(node) {
            NodeKind::Vertex(v) => {
                let s = sp_src.vertex_node(v).ok_or_else(|| {
                    Error::SpaceMismatch("vertex missing in source space".into())
                })?;
                for c in 0..2 {
                    out[node * 2 + c] = src.coeffs()[s * 2 + c];
                }
            }
            NodeKind::EdgeMidpoint(e) => {
                let (a, b) = mesh.edge(e);
                let (sa, sb) = (
                    sp_src.vertex_node(a).ok_or_else(|| {
                        Error::SpaceMismatch("edge endpoint missing in source space".into())
                    })?,
                    sp_src.vertex_node(b).ok_or_else(|| {
                        Error::SpaceMismatch("edge endpoint missing in source space".into())
                    })?,
                );
                for c in 0..2 {
                    out[node * 2 + c] = 0.5 * (src.coeffs()[sa * 2 + c] + src.coeffs()[sb * 2 + c]);
                }
            }
        }
    }
    Field::from_coeffs(dst_space.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_channel_mesh, generate_rectangle_mesh, ChannelGeometry};

    #[test]
    fn p1_dof_counts_match_vertices() {
        let mesh = Arc::new(generate_rectangle_mesh(1.0, 1.0, 3, 3).unwrap());
        let s = FunctionSpace::new(mesh.clone(), Family::P1Scalar, Region::Fluid);
        assert_eq!(s.n_dofs(), mesh.n_vertices());
        let v = FunctionSpace::new(mesh.clone(), Family::P1Vector, Region::Fluid);
        assert_eq!(v.n_dofs(), 2 * mesh.n_vertices());
    }

    #[test]
    fn p2_dof_counts_match_vertices_plus_edges() {
        let mesh = Arc::new(generate_rectangle_mesh(1.0, 1.0, 3, 3).unwrap());
        let v = FunctionSpace::new(mesh.clone(), Family::P2Vector, Region::Fluid);
        assert_eq!(v.n_dofs(), 2 * (mesh.n_vertices() + mesh.n_edges()));
    }

    #[test]
    fn region_restriction_drops_far_dofs() {
        let mesh = Arc::new(generate_channel_mesh(&ChannelGeometry {
            target_edge_size: 0.25,
            ..Default::default()
        })
        .unwrap());
        let s = FunctionSpace::new(mesh.clone(), Family::P1Vector, Region::Solid);
        assert!(s.n_nodes() < mesh.n_vertices());
        for node in 0..s.n_nodes() {
            let p = s.node_position(node);
            assert!(p[0] >= 1.0 - 1e-12 && p[0] <= 1.2 + 1e-12);
        }
    }

    #[test]
    fn p1_to_p2_exact_on_linear_fields() {
        let mesh = Arc::new(generate_rectangle_mesh(2.0, 1.0, 4, 2).unwrap());
        let p1 = FunctionSpace::new(mesh.clone(), Family::P1Vector, Region::Fluid);
        let p2 = FunctionSpace::new(mesh.clone(), Family::P2Vector, Region::Fluid);
        let f = Field::interpolate(p1, |p, c| if c == 0 { 2.0 * p[0] - p[1] } else { p[1] });
        let g = interp_p1_to_p2(&f, &p2).unwrap();
        for node in 0..p2.n_nodes() {
            let p = p2.node_position(node);
            assert!((g.coeffs()[node * 2] - (2.0 * p[0] - p[1])).abs() < 1e-13);
            assert!((g.coeffs()[node * 2 + 1] - p[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn nan_coefficients_rejected() {
        let mesh = Arc::new(generate_rectangle_mesh(1.0, 1.0, 2, 2).unwrap());
        let s = FunctionSpace::new(mesh, Family::P1Scalar, Region::Fluid);
        let mut c = vec![0.0; s.n_dofs()];
        c[0] = f64::NAN;
        assert!(Field::from_coeffs(s, c).is_err());
    }
}
