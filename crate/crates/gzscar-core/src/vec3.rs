//! Fixed-size 3-vectors and 3x3 matrices as plain arrays.

use num_traits::Float;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const ZHAT: Vec3 = [0.0, 0.0, 1.0];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn diag(d: Vec3) -> Mat3 {
    [[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]]
}

pub fn identity() -> Mat3 {
    diag([1.0, 1.0, 1.0])
}

pub fn transpose(m: Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            t[j][i] = v;
        }
    }
    t
}

pub fn matmul(a: Mat3, b: Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

pub fn matvec(a: Mat3, v: Vec3) -> Vec3 {
    [dot(a[0], v), dot(a[1], v), dot(a[2], v)]
}

pub fn mat_add(a: Mat3, b: Mat3) -> Mat3 {
    let mut c = a;
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] += b[i][j];
        }
    }
    c
}

pub fn column(m: Mat3, j: usize) -> Vec3 {
    [m[0][j], m[1][j], m[2][j]]
}

pub fn det(m: Mat3) -> f64 {
    dot(m[0], cross(m[1], m[2]))
}

/// Max-abs deviation of `m^T m` from the identity.
pub fn orthogonality_defect(m: Mat3) -> f64 {
    let p = matmul(transpose(m), m);
    let mut e: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let t = if i == j { 1.0 } else { 0.0 };
            e = e.max((p[i][j] - t).abs());
        }
    }
    e
}

pub fn rot_x(a: f64) -> Mat3 {
    let (s, c) = a.sin_cos();
    [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]
}

pub fn rot_y(a: f64) -> Mat3 {
    let (s, c) = a.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn rot_z(a: f64) -> Mat3 {
    let (s, c) = a.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Rotation by angle `a` about the unit axis `n` (Rodrigues).
pub fn rot_axis(n: Vec3, a: f64) -> Mat3 {
    let (s, c) = a.sin_cos();
    let v = 1.0 - c;
    [
        [c + n[0] * n[0] * v, n[0] * n[1] * v - n[2] * s, n[0] * n[2] * v + n[1] * s],
        [n[1] * n[0] * v + n[2] * s, c + n[1] * n[1] * v, n[1] * n[2] * v - n[0] * s],
        [n[2] * n[0] * v - n[1] * s, n[2] * n[1] * v + n[0] * s, c + n[2] * n[2] * v],
    ]
}

/// The vector `h` with `[h]_x = (m - m^T)/2` for an (approximately) antisymmetric `m`.
pub fn axial(m: Mat3) -> Vec3 {
    [0.5 * (m[2][1] - m[1][2]), 0.5 * (m[0][2] - m[2][0]), 0.5 * (m[1][0] - m[0][1])]
}
