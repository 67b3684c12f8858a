//! Conforming two-region triangulations of the channel-with-leaflets
//! geometry, with boundary and interface tagging.
//!
//! The generator splits axis-aligned rectangles into right triangles, with
//! vertex lines forced onto every material boundary so that the fluid and
//! solid discretizations match along the interface. Diagonals are mirrored
//! about the channel midline, keeping the triangulation symmetric under
//! y -> height - y.

use crate::error::{Error, Result};
use crate::la2::Vec2;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Fluid,
    Solid,
}

impl Region {
    pub fn tag(self) -> u32 {
        match self {
            Region::Fluid => 1,
            Region::Solid => 2,
        }
    }

    pub fn from_tag(t: u32) -> Option<Region> {
        match t {
            1 => Some(Region::Fluid),
            2 => Some(Region::Solid),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Inlet,
    Outlet,
    Top,
    Bottom,
    FsiInterface,
    SolidClamp,
}

impl BoundaryTag {
    pub fn tag(self) -> u32 {
        match self {
            BoundaryTag::Inlet => 10,
            BoundaryTag::Outlet => 11,
            BoundaryTag::Top => 12,
            BoundaryTag::Bottom => 13,
            BoundaryTag::FsiInterface => 20,
            BoundaryTag::SolidClamp => 21,
        }
    }

    pub fn from_tag(t: u32) -> Option<BoundaryTag> {
        match t {
            10 => Some(BoundaryTag::Inlet),
            11 => Some(BoundaryTag::Outlet),
            12 => Some(BoundaryTag::Top),
            13 => Some(BoundaryTag::Bottom),
            20 => Some(BoundaryTag::FsiInterface),
            21 => Some(BoundaryTag::SolidClamp),
            _ => None,
        }
    }
}

/// Channel with two leaflets clamped to the top and bottom walls.
/// All lengths in cm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGeometry {
    pub length: f64,
    pub height: f64,
    pub leaflet_length: f64,
    pub leaflet_thickness: f64,
    pub leaflet_x_position: f64,
    pub target_edge_size: f64,
}

impl Default for ChannelGeometry {
    fn default() -> Self {
        Self {
            length: 10.0,
            height: 2.5,
            leaflet_length: 1.0,
            leaflet_thickness: 0.2,
            leaflet_x_position: 1.0,
            target_edge_size: 0.1,
        }
    }
}

impl ChannelGeometry {
    pub fn validate(&self) -> Result<()> {
        let g = self;
        if !(g.length > 0.0 && g.height > 0.0 && g.target_edge_size > 0.0) {
            return Err(Error::InvalidGeometry("lengths must be positive".into()));
        }
        if !(g.leaflet_length > 0.0 && g.leaflet_length < g.height / 2.0) {
            return Err(Error::InvalidGeometry(format!(
                "leaflet length {} outside (0, height/2 = {})",
                g.leaflet_length,
                g.height / 2.0
            )));
        }
        if !(g.leaflet_thickness > 0.0 && g.leaflet_thickness < g.length) {
            return Err(Error::InvalidGeometry(format!(
                "leaflet thickness {} outside (0, length = {})",
                g.leaflet_thickness, g.length
            )));
        }
        if !(g.leaflet_x_position > 0.0
            && g.leaflet_x_position + g.leaflet_thickness < g.length)
        {
            return Err(Error::InvalidGeometry("leaflets must sit strictly inside the channel".into()));
        }
        Ok(())
    }

    /// Width of the blending strips the shape map uses on either side of the
    /// leaflet column; the mesh forces vertex lines there too.
    pub fn transition_width(&self) -> f64 {
        let x_l = self.leaflet_x_position;
        let x_r = x_l + self.leaflet_thickness;
        self.leaflet_thickness.min(x_l).min(self.length - x_r)
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    region: Vec<Region>,
    /// Tagged facets as vertex pairs.
    facets: Vec<(usize, usize, BoundaryTag)>,
    // derived connectivity
    edges: Vec<(usize, usize)>,
    edge_ids: HashMap<(usize, usize), usize>,
    edge_tris: Vec<[Option<usize>; 2]>,
    edge_tag: Vec<Option<BoundaryTag>>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh {
    pub fn from_parts(
        vertices: Vec<Vec2>,
        triangles: Vec<[usize; 3]>,
        region: Vec<Region>,
        facets: Vec<(usize, usize, BoundaryTag)>,
    ) -> Result<Mesh> {
        if region.len() != triangles.len() {
            return Err(Error::InvalidMesh("one region tag per triangle required".into()));
        }
        let nv = vertices.len();
        for t in &triangles {
            if t.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh("triangle vertex index out of range".into()));
            }
        }
        let mut edges = Vec::new();
        let mut edge_ids = HashMap::new();
        let mut edge_tris: Vec<[Option<usize>; 2]> = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let key = edge_key(tri[k], tri[(k + 1) % 3]);
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_tris.push([None, None]);
                    edges.len() - 1
                });
                let slot = &mut edge_tris[id];
                if slot[0].is_none() {
                    slot[0] = Some(t);
                } else if slot[1].is_none() {
                    slot[1] = Some(t);
                } else {
                    return Err(Error::InvalidMesh(format!(
                        "edge {:?} shared by more than two triangles",
                        edges[id]
                    )));
                }
            }
        }
        let mut edge_tag = vec![None; edges.len()];
        for &(a, b, tag) in &facets {
            let id = edge_ids.get(&edge_key(a, b)).copied().ok_or_else(|| {
                Error::InvalidMesh(format!("tagged facet ({a}, {b}) is not a mesh edge"))
            })?;
            edge_tag[id] = Some(tag);
        }
        Ok(Mesh { vertices, triangles, region, facets, edges, edge_ids, edge_tris, edge_tag })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertex(&self, v: usize) -> Vec2 {
        self.vertices[v]
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn region(&self, t: usize) -> Region {
        self.region[t]
    }

    pub fn regions(&self) -> &[Region] {
        &self.region
    }

    pub fn facets(&self) -> &[(usize, usize, BoundaryTag)] {
        &self.facets
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_ids.get(&edge_key(a, b)).copied()
    }

    pub fn edge_triangles(&self, e: usize) -> [Option<usize>; 2] {
        self.edge_tris[e]
    }

    pub fn edge_tag_of(&self, e: usize) -> Option<BoundaryTag> {
        self.edge_tag[e]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    pub fn centroid(&self, t: usize) -> Vec2 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0]
    }

    /// Edges with the given tags, as edge ids.
    pub fn tagged_edges(&self, tags: &[BoundaryTag]) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edge_tag[e].is_some_and(|t| tags.contains(&t)))
            .collect()
    }

    /// Vertices lying on edges with any of the given tags (sorted, unique).
    pub fn tagged_vertices(&self, tags: &[BoundaryTag]) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .tagged_edges(tags)
            .into_iter()
            .flat_map(|e| [self.edges[e].0, self.edges[e].1])
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

/// One defect found by `validate_mesh`.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshDefect {
    NegativeArea { triangle: usize, area: f64 },
    NonConforming { edge: (usize, usize), detail: String },
    UntaggedBoundaryEdge { edge: (usize, usize), region: Region },
    MisplacedTag { edge: (usize, usize), tag: BoundaryTag, detail: String },
    InterfaceNotTagged { edge: (usize, usize) },
}

impl std::fmt::Display for MeshDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeshDefect::NegativeArea { triangle, area } => {
                write!(f, "NEGATIVE_AREA: triangle {triangle} has signed area {area:.3e}")
            }
            MeshDefect::NonConforming { edge, detail } => {
                write!(f, "NON_CONFORMING: edge {edge:?}: {detail}")
            }
            MeshDefect::UntaggedBoundaryEdge { edge, region } => {
                write!(f, "UNTAGGED_BOUNDARY_EDGE: edge {edge:?} on {region:?} boundary")
            }
            MeshDefect::MisplacedTag { edge, tag, detail } => {
                write!(f, "MISPLACED_TAG: edge {edge:?} tagged {tag:?}: {detail}")
            }
            MeshDefect::InterfaceNotTagged { edge } => {
                write!(f, "INTERFACE_NOT_TAGGED: fluid-solid edge {edge:?}")
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub defects: Vec<MeshDefect>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.defects.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.defects.is_empty() {
            return write!(f, "mesh valid");
        }
        for d in &self.defects {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

pub fn validate_mesh(mesh: &Mesh) -> ValidationReport {
    let mut defects = Vec::new();
    for t in 0..mesh.n_triangles() {
        let a = mesh.signed_area(t);
        if a <= 0.0 {
            defects.push(MeshDefect::NegativeArea { triangle: t, area: a });
        }
    }
    // orientation of shared edges must be opposite in the two triangles
    for e in 0..mesh.n_edges() {
        if let [Some(t0), Some(t1)] = mesh.edge_triangles(e) {
            let (a, b) = mesh.edge(e);
            let dir = |t: usize| {
                let tri = mesh.triangle(t);
                (0..3).any(|k| tri[k] == a && tri[(k + 1) % 3] == b)
            };
            if dir(t0) == dir(t1) {
                defects.push(MeshDefect::NonConforming {
                    edge: (a, b),
                    detail: "shared edge traversed in the same direction by both triangles".into(),
                });
            }
        }
    }
    for e in 0..mesh.n_edges() {
        let (a, b) = mesh.edge(e);
        let tag = mesh.edge_tag_of(e);
        match mesh.edge_triangles(e) {
            [Some(t0), Some(t1)] => {
                let (r0, r1) = (mesh.region(t0), mesh.region(t1));
                if r0 != r1 {
                    // fluid-solid interface edge
                    match tag {
                        Some(BoundaryTag::FsiInterface) => {}
                        Some(other) => defects.push(MeshDefect::MisplacedTag {
                            edge: (a, b),
                            tag: other,
                            detail: "fluid-solid edge must carry FSI_INTERFACE".into(),
                        }),
                        None => defects.push(MeshDefect::InterfaceNotTagged { edge: (a, b) }),
                    }
                } else if let Some(tag) = tag {
                    defects.push(MeshDefect::MisplacedTag {
                        edge: (a, b),
                        tag,
                        detail: "tag on an interior edge".into(),
                    });
                }
            }
            [Some(t0), None] => {
                let region = mesh.region(t0);
                let allowed: &[BoundaryTag] = match region {
                    Region::Fluid => &[
                        BoundaryTag::Inlet,
                        BoundaryTag::Outlet,
                        BoundaryTag::Top,
                        BoundaryTag::Bottom,
                    ],
                    Region::Solid => &[BoundaryTag::SolidClamp],
                };
                match tag {
                    None => defects.push(MeshDefect::UntaggedBoundaryEdge { edge: (a, b), region }),
                    Some(tag) if !allowed.contains(&tag) => {
                        defects.push(MeshDefect::MisplacedTag {
                            edge: (a, b),
                            tag,
                            detail: format!("not a valid exterior tag for {region:?}"),
                        })
                    }
                    _ => {}
                }
            }
            _ => defects.push(MeshDefect::NonConforming {
                edge: (a, b),
                detail: "edge with no adjacent triangle".into(),
            }),
        }
    }
    ValidationReport { defects }
}

/// One edge of the fluid-solid interface, oriented so that `normal` has unit
/// length and points out of the fluid region.
#[derive(Debug, Clone, Copy)]
pub struct InterfaceFacet {
    /// Endpoints ordered counterclockwise as seen from the fluid triangle.
    pub v0: usize,
    pub v1: usize,
    pub fluid_tri: usize,
    pub solid_tri: usize,
    pub normal: Vec2,
    pub length: f64,
}

pub fn interface_facets(mesh: &Mesh) -> Result<Vec<InterfaceFacet>> {
    let report = validate_mesh(mesh);
    if !report.is_empty() {
        return Err(Error::InvalidMesh(report.to_string()));
    }
    let mut out = Vec::new();
    for e in 0..mesh.n_edges() {
        if mesh.edge_tag_of(e) != Some(BoundaryTag::FsiInterface) {
            continue;
        }
        let [Some(t0), Some(t1)] = mesh.edge_triangles(e) else {
            return Err(Error::InvalidMesh("interface edge without two neighbors".into()));
        };
        let (fluid_tri, solid_tri) = if mesh.region(t0) == Region::Fluid { (t0, t1) } else { (t1, t0) };
        let (a, b) = mesh.edge(e);
        // order (v0, v1) as traversed by the fluid triangle (counterclockwise)
        let tri = mesh.triangle(fluid_tri);
        let (v0, v1) = if (0..3).any(|k| tri[k] == a && tri[(k + 1) % 3] == b) {
            (a, b)
        } else {
            (b, a)
        };
        let (p0, p1) = (mesh.vertex(v0), mesh.vertex(v1));
        let d = [p1[0] - p0[0], p1[1] - p0[1]];
        let length = (d[0] * d[0] + d[1] * d[1]).sqrt();
        // interior lies to the left of the directed edge, outward is to the right
        let normal = [d[1] / length, -d[0] / length];
        out.push(InterfaceFacet { v0, v1, fluid_tri, solid_tri, normal, length });
    }
    Ok(out)
}

fn subdivide(breaks: &[f64], h: f64) -> Vec<f64> {
    let mut pts = vec![breaks[0]];
    for w in breaks.windows(2) {
        let len = w[1] - w[0];
        let n = (len / h).ceil().max(1.0) as usize;
        for k in 1..=n {
            pts.push(w[0] + len * k as f64 / n as f64);
        }
    }
    pts
}

/// Structured generator: rectangles split into right triangles, diagonals
/// mirrored about the channel midline.
pub fn generate_channel_mesh(geom: &ChannelGeometry) -> Result<Mesh> {
    geom.validate()?;
    let h = geom.target_edge_size;
    let (len, hgt) = (geom.length, geom.height);
    let x_l = geom.leaflet_x_position;
    let x_r = x_l + geom.leaflet_thickness;
    let w = geom.transition_width();
    let l = geom.leaflet_length;

    let mut xb = vec![0.0, x_l - w, x_l, x_r, x_r + w, len];
    xb.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let yb = vec![0.0, l, hgt - l, hgt];

    let xs = subdivide(&xb, h);
    let ys = subdivide(&yb, h);
    let (nx, ny) = (xs.len(), ys.len());
    if nx < 2 || ny < 2 {
        return Err(Error::MeshingFailed("empty grid".into()));
    }

    let mut vertices = Vec::with_capacity(nx * ny);
    for y in &ys {
        for x in &xs {
            vertices.push([*x, *y]);
        }
    }
    let vid = |i: usize, j: usize| j * nx + i;

    let in_leaflet = |cx: f64, cy: f64| {
        cx > x_l && cx < x_r && (cy < l || cy > hgt - l)
    };

    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    let mut region = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
            let cy = 0.5 * (ys[j] + ys[j + 1]);
            let cx = 0.5 * (xs[i] + xs[i + 1]);
            if cy < hgt / 2.0 {
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            } else {
                triangles.push([v00, v10, v01]);
                triangles.push([v10, v11, v01]);
            }
            let r = if in_leaflet(cx, cy) { Region::Solid } else { Region::Fluid };
            region.push(r);
            region.push(r);
        }
    }

    let mut facets = Vec::new();
    for j in 0..ny - 1 {
        facets.push((vid(0, j), vid(0, j + 1), BoundaryTag::Inlet));
        facets.push((vid(nx - 1, j), vid(nx - 1, j + 1), BoundaryTag::Outlet));
    }
    for i in 0..nx - 1 {
        let cx = 0.5 * (xs[i] + xs[i + 1]);
        let under_leaflet = cx > x_l && cx < x_r;
        let bottom_tag = if under_leaflet { BoundaryTag::SolidClamp } else { BoundaryTag::Bottom };
        let top_tag = if under_leaflet { BoundaryTag::SolidClamp } else { BoundaryTag::Top };
        facets.push((vid(i, 0), vid(i + 1, 0), bottom_tag));
        facets.push((vid(i, ny - 1), vid(i + 1, ny - 1), top_tag));
    }

    let mut mesh = Mesh::from_parts(vertices, triangles, region, facets)
        .map_err(|e| Error::MeshingFailed(e.to_string()))?;

    // tag fluid-solid edges now that regions exist
    let mut extra = Vec::new();
    for e in 0..mesh.n_edges() {
        if let [Some(t0), Some(t1)] = mesh.edge_triangles(e) {
            if mesh.region(t0) != mesh.region(t1) {
                let (a, b) = mesh.edge(e);
                extra.push((a, b, BoundaryTag::FsiInterface));
            }
        }
    }
    if !extra.is_empty() {
        let mut facets = mesh.facets.clone();
        facets.extend(extra);
        mesh = Mesh::from_parts(mesh.vertices, mesh.triangles, mesh.region, facets)
            .map_err(|e| Error::MeshingFailed(e.to_string()))?;
    }

    let report = validate_mesh(&mesh);
    if !report.is_empty() {
        return Err(Error::MeshingFailed(report.to_string()));
    }
    Ok(mesh)
}

/// Single-region rectangle mesh on [0, w] x [0, h]; used by auxiliary tests
/// and the manufactured-solution convergence study.
pub fn generate_rectangle_mesh(w: f64, h: f64, nx: usize, ny: usize) -> Result<Mesh> {
    if !(w > 0.0 && h > 0.0) || nx == 0 || ny == 0 {
        return Err(Error::InvalidGeometry("rectangle mesh needs positive extents".into()));
    }
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([w * i as f64 / nx as f64, h * j as f64 / ny as f64]);
        }
    }
    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)]);
            triangles.push([vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    let region = vec![Region::Fluid; triangles.len()];
    let mut facets = Vec::new();
    for j in 0..ny {
        facets.push((vid(0, j), vid(0, j + 1), BoundaryTag::Inlet));
        facets.push((vid(nx, j), vid(nx, j + 1), BoundaryTag::Outlet));
    }
    for i in 0..nx {
        facets.push((vid(i, 0), vid(i + 1, 0), BoundaryTag::Bottom));
        facets.push((vid(i, ny), vid(i + 1, ny), BoundaryTag::Top));
    }
    Mesh::from_parts(vertices, triangles, region, facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_channel_mesh_is_valid() {
        let mesh = generate_channel_mesh(&ChannelGeometry::default()).unwrap();
        assert!(validate_mesh(&mesh).is_empty());
        assert!(mesh.regions().iter().any(|r| *r == Region::Fluid));
        assert!(mesh.regions().iter().any(|r| *r == Region::Solid));
        assert!(!mesh.tagged_edges(&[BoundaryTag::FsiInterface]).is_empty());
    }

    #[test]
    fn touching_leaflets_rejected() {
        let geom = ChannelGeometry { leaflet_length: 1.25, ..Default::default() };
        assert!(matches!(generate_channel_mesh(&geom), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn refinement_grows_triangle_count_quadratically() {
        let coarse = generate_channel_mesh(&ChannelGeometry {
            target_edge_size: 0.5,
            ..Default::default()
        })
        .unwrap();
        let fine = generate_channel_mesh(&ChannelGeometry {
            target_edge_size: 0.25,
            ..Default::default()
        })
        .unwrap();
        let ratio = fine.n_triangles() as f64 / coarse.n_triangles() as f64;
        assert!((2.8..=5.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn flipped_triangle_reported() {
        let geom = ChannelGeometry { target_edge_size: 0.5, ..Default::default() };
        let mesh = generate_channel_mesh(&geom).unwrap();
        let mut tris = mesh.triangles().to_vec();
        tris[7].swap(0, 1);
        let bad = Mesh::from_parts(
            mesh.vertices().to_vec(),
            tris,
            mesh.regions().to_vec(),
            mesh.facets().to_vec(),
        )
        .unwrap();
        let report = validate_mesh(&bad);
        assert!(report
            .defects
            .iter()
            .any(|d| matches!(d, MeshDefect::NegativeArea { triangle: 7, .. })));
    }

    #[test]
    fn missing_interface_tag_reported() {
        let geom = ChannelGeometry { target_edge_size: 0.5, ..Default::default() };
        let mesh = generate_channel_mesh(&geom).unwrap();
        let mut facets = mesh.facets().to_vec();
        let k = facets
            .iter()
            .position(|f| f.2 == BoundaryTag::FsiInterface)
            .unwrap();
        facets.remove(k);
        let bad = Mesh::from_parts(
            mesh.vertices().to_vec(),
            mesh.triangles().to_vec(),
            mesh.regions().to_vec(),
            facets,
        )
        .unwrap();
        let report = validate_mesh(&bad);
        assert!(report
            .defects
            .iter()
            .any(|d| matches!(d, MeshDefect::InterfaceNotTagged { .. })));
    }

    #[test]
    fn missing_wall_tag_reported() {
        let mesh = generate_rectangle_mesh(1.0, 1.0, 2, 2).unwrap();
        let mut facets = mesh.facets().to_vec();
        facets.pop();
        let bad = Mesh::from_parts(
            mesh.vertices().to_vec(),
            mesh.triangles().to_vec(),
            mesh.regions().to_vec(),
            facets,
        )
        .unwrap();
        let report = validate_mesh(&bad);
        assert!(report
            .defects
            .iter()
            .any(|d| matches!(d, MeshDefect::UntaggedBoundaryEdge { .. })));
    }

    #[test]
    fn interface_normals_unit_and_outward() {
        let geom = ChannelGeometry::default();
        let mesh = generate_channel_mesh(&geom).unwrap();
        let facets = interface_facets(&mesh).unwrap();
        let x_l = geom.leaflet_x_position;
        let mut saw_left_face = false;
        for f in &facets {
            let n = f.normal;
            assert!((crate::la2::norm(&n) - 1.0).abs() < 1e-12);
            let (p0, p1) = (mesh.vertex(f.v0), mesh.vertex(f.v1));
            let mid = [(p0[0] + p1[0]) / 2.0, (p0[1] + p1[1]) / 2.0];
            if (mid[0] - x_l).abs() < 1e-12 && mid[1] < geom.leaflet_length {
                // left face of the bottom leaflet: fluid is on the left
                assert!((n[0] - 1.0).abs() < 1e-12 && n[1].abs() < 1e-12);
                saw_left_face = true;
            }
        }
        assert!(saw_left_face);
    }

    #[test]
    fn interface_normals_close_leaflet_loop() {
        // divergence theorem on the bottom leaflet polygon: interface normals
        // (pointing out of the fluid, i.e. into the solid) summed against edge
        // lengths equal the clamped base edge's outward normal contribution
        let geom = ChannelGeometry::default();
        let mesh = generate_channel_mesh(&geom).unwrap();
        let facets = interface_facets(&mesh).unwrap();
        let mut sum = [0.0, 0.0];
        for f in &facets {
            let (p0, p1) = (mesh.vertex(f.v0), mesh.vertex(f.v1));
            if 0.5 * (p0[1] + p1[1]) < geom.height / 2.0 {
                sum[0] += f.normal[0] * f.length;
                sum[1] += f.normal[1] * f.length;
            }
        }
        // clamp edge: y = 0, length = thickness, solid outward normal (0, -1);
        // fluid-outward interface normals are -(solid outward), so the sum is
        // +(0,-1) * thickness
        let mut clamp = [0.0, 0.0];
        for &(a, b, tag) in mesh.facets() {
            if tag == BoundaryTag::SolidClamp {
                let (pa, pb) = (mesh.vertex(a), mesh.vertex(b));
                if pa[1].abs() < 1e-12 && pb[1].abs() < 1e-12 {
                    clamp[1] += -(pb[0] - pa[0]).abs();
                }
            }
        }
        assert!((sum[0] - clamp[0]).abs() < 1e-12, "sum {sum:?} clamp {clamp:?}");
        assert!((sum[1] - clamp[1]).abs() < 1e-12, "sum {sum:?} clamp {clamp:?}");
    }

    #[test]
    fn tag_lengths_cover_region_boundaries() {
        let geom = ChannelGeometry::default();
        let mesh = generate_channel_mesh(&geom).unwrap();
        let mut tagged = 0.0;
        for e in mesh.tagged_edges(&[
            BoundaryTag::Inlet,
            BoundaryTag::Outlet,
            BoundaryTag::Top,
            BoundaryTag::Bottom,
            BoundaryTag::FsiInterface,
        ]) {
            let (a, b) = mesh.edge(e);
            let (pa, pb) = (mesh.vertex(a), mesh.vertex(b));
            tagged += crate::la2::norm(&[pb[0] - pa[0], pb[1] - pa[1]]);
        }
        // fluid boundary: channel outline minus two leaflet bases, plus both
        // leaflet flanks and tips
        let leaflet_perimeter_wet = 2.0 * geom.leaflet_length + geom.leaflet_thickness;
        let expected = 2.0 * (geom.length + geom.height) - 2.0 * geom.leaflet_thickness
            + 2.0 * leaflet_perimeter_wet;
        assert!((tagged - expected).abs() < 1e-10 * expected, "tagged {tagged} expected {expected}");
    }
}
