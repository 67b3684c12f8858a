//! Quadrature rules and Lagrange shape functions on triangles.

use crate::la2::Vec2;
use crate::mesh::Mesh;

/// Degree-4 rule on the triangle, 6 points; weights sum to one and are
/// multiplied by the physical triangle area.
pub const TRI_QP: [([f64; 3], f64); 6] = {
    const A: f64 = 0.816847572980459;
    const B: f64 = 0.091576213509771;
    const WA: f64 = 0.109951743655322;
    const C: f64 = 0.108103018168070;
    const D: f64 = 0.445948490915965;
    const WC: f64 = 0.223381589678011;
    [
        ([A, B, B], WA),
        ([B, A, B], WA),
        ([B, B, A], WA),
        ([C, D, D], WC),
        ([D, C, D], WC),
        ([D, D, C], WC),
    ]
};

pub const N_TRI_QP: usize = 6;

/// 3-point Gauss rule on [0, 1] (degree 5); weights sum to one and are
/// multiplied by the edge length.
pub const EDGE_QP: [(f64, f64); 3] = [
    (0.1127016653792583, 0.2777777777777778),
    (0.5, 0.4444444444444444),
    (0.8872983346207417, 0.2777777777777778),
];

pub const N_EDGE_QP: usize = 3;

/// Per-triangle geometry: area and barycentric gradients.
#[derive(Debug, Clone, Copy)]
pub struct TriGeometry {
    pub coords: [Vec2; 3],
    pub area: f64,
    pub grad_lambda: [Vec2; 3],
}

pub fn tri_geometry(mesh: &Mesh, t: usize) -> TriGeometry {
    let [a, b, c] = mesh.triangle(t);
    let p = [mesh.vertex(a), mesh.vertex(b), mesh.vertex(c)];
    let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
    let area = 0.5 * det;
    let gl = [
        [(p[1][1] - p[2][1]) / det, (p[2][0] - p[1][0]) / det],
        [(p[2][1] - p[0][1]) / det, (p[0][0] - p[2][0]) / det],
        [(p[0][1] - p[1][1]) / det, (p[1][0] - p[0][0]) / det],
    ];
    TriGeometry { coords: p, area, grad_lambda: gl }
}

impl TriGeometry {
    pub fn point(&self, lambda: &[f64; 3]) -> Vec2 {
        [
            lambda[0] * self.coords[0][0] + lambda[1] * self.coords[1][0] + lambda[2] * self.coords[2][0],
            lambda[0] * self.coords[0][1] + lambda[1] * self.coords[1][1] + lambda[2] * self.coords[2][1],
        ]
    }
}

pub fn p1_values(lambda: &[f64; 3]) -> [f64; 3] {
    *lambda
}

pub fn p1_gradients(geom: &TriGeometry) -> [Vec2; 3] {
    geom.grad_lambda
}

/// Local P2 node order: three vertices, then midpoints of edges
/// (v0,v1), (v1,v2), (v2,v0).
pub fn p2_values(lambda: &[f64; 3]) -> [f64; 6] {
    let [l0, l1, l2] = *lambda;
    [
        l0 * (2.0 * l0 - 1.0),
        l1 * (2.0 * l1 - 1.0),
        l2 * (2.0 * l2 - 1.0),
        4.0 * l0 * l1,
        4.0 * l1 * l2,
        4.0 * l2 * l0,
    ]
}

pub fn p2_gradients(geom: &TriGeometry, lambda: &[f64; 3]) -> [Vec2; 6] {
    let gl = &geom.grad_lambda;
    let [l0, l1, l2] = *lambda;
    let mut g = [[0.0, 0.0]; 6];
    for d in 0..2 {
        g[0][d] = (4.0 * l0 - 1.0) * gl[0][d];
        g[1][d] = (4.0 * l1 - 1.0) * gl[1][d];
        g[2][d] = (4.0 * l2 - 1.0) * gl[2][d];
        g[3][d] = 4.0 * (l0 * gl[1][d] + l1 * gl[0][d]);
        g[4][d] = 4.0 * (l1 * gl[2][d] + l2 * gl[1][d]);
        g[5][d] = 4.0 * (l2 * gl[0][d] + l0 * gl[2][d]);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_rectangle_mesh;

    #[test]
    fn tri_rule_integrates_degree_four() {
        // integrate x^2 y^2 over the unit right triangle; exact value 1/180
        let mesh = generate_rectangle_mesh(1.0, 1.0, 1, 1).unwrap();
        let mut total = 0.0;
        for t in 0..mesh.n_triangles() {
            let geom = tri_geometry(&mesh, t);
            for (lambda, w) in &TRI_QP {
                let p = geom.point(lambda);
                if mesh.centroid(t)[0] < mesh.centroid(t)[1] {
                    // upper-left triangle only, x <= y half of the square
                    total += w * geom.area * p[0] * p[0] * p[1] * p[1];
                }
            }
        }
        assert!((total - 1.0 / 180.0).abs() < 1e-15, "got {total}");
    }

    #[test]
    fn edge_rule_integrates_degree_four() {
        // integrate t^4 on [0,1] = 1/5
        let v: f64 = EDGE_QP.iter().map(|(t, w)| w * t.powi(4)).sum();
        assert!((v - 0.2).abs() < 1e-14);
    }

    #[test]
    fn p2_partition_of_unity() {
        let lambda = [0.3, 0.5, 0.2];
        let n = p2_values(&lambda);
        let s: f64 = n.iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
    }
}
