//! Tiny fixed-size helpers for 2D vectors and 2x2 matrices (row-major).

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Inverse; returns None when the determinant vanishes.
pub fn inv(m: &Mat2) -> Option<Mat2> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
}

pub fn transpose(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn mat_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Transposed matrix times vector, i.e. `m^T v`.
pub fn mat_t_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[1][0] * v[1], m[0][1] * v[0] + m[1][1] * v[1]]
}

pub fn add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

pub fn dot(a: &Vec2, b: &Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn norm(v: &Vec2) -> f64 {
    dot(v, v).sqrt()
}

pub fn sub_vec(a: &Vec2, b: &Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

/// Affine map (A, b) with A [p1-p0, p2-p0] = [q1-q0, q2-q0] and q0 = A p0 + b.
/// Returns None for degenerate source triangles.
pub fn affine_from_triangles(p: &[Vec2; 3], q: &[Vec2; 3]) -> Option<(Mat2, Vec2)> {
    let dp = [
        [p[1][0] - p[0][0], p[2][0] - p[0][0]],
        [p[1][1] - p[0][1], p[2][1] - p[0][1]],
    ];
    let dq = [
        [q[1][0] - q[0][0], q[2][0] - q[0][0]],
        [q[1][1] - q[0][1], q[2][1] - q[0][1]],
    ];
    let dp_inv = inv(&dp)?;
    let a = mat_mul(&dq, &dp_inv);
    let ap0 = mat_vec(&a, &p[0]);
    Some((a, [q[0][0] - ap0[0], q[0][1] - ap0[1]]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = [[2.0, 1.0], [0.5, 3.0]];
        let mi = inv(&m).unwrap();
        let p = mat_mul(&m, &mi);
        assert!((p[0][0] - 1.0).abs() < 1e-14 && (p[1][1] - 1.0).abs() < 1e-14);
        assert!(p[0][1].abs() < 1e-14 && p[1][0].abs() < 1e-14);
    }

    #[test]
    fn affine_fit_reproduces_vertices() {
        let p = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let q = [[1.0, 2.0], [2.0, 2.5], [0.5, 3.0]];
        let (a, b) = affine_from_triangles(&p, &q).unwrap();
        for k in 0..3 {
            let img = mat_vec(&a, &p[k]);
            assert!((img[0] + b[0] - q[k][0]).abs() < 1e-14);
            assert!((img[1] + b[1] - q[k][1]).abs() < 1e-14);
        }
    }
}
