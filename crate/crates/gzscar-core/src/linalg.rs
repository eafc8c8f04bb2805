//! Thin helpers over faer: spectra, Hermitian diagonalization, and the matrix exponential.

use alloc::vec::Vec;
use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

pub type CMat = Mat<C64>;
pub type RMat = Mat<f64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    m.eigenvalues().map_err(|_| Error::Eigen)
}

pub fn eigenvalues_real(m: &RMat) -> Result<Vec<C64>> {
    m.eigenvalues().map_err(|_| Error::Eigen)
}

/// Ascending eigenvalues and orthonormal eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let e = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
    let vals = e.S().column_vector().iter().map(|z| z.re).collect();
    Ok((vals, e.U().to_owned()))
}

pub fn identity(n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn scaled(m: &CMat, s: C64) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

pub fn max_abs(m: &CMat) -> f64 {
    let mut e: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            e = e.max(m[(i, j)].norm());
        }
    }
    e
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols()).map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(a)` by [13/13] Pade approximation with scaling and squaring.
///
/// Unlike diagonalization this is accurate for defective matrices, which
/// do occur in the spin-wave generators (zero modes with Jordan blocks).
pub fn expm(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::Domain("expm of a non-finite matrix".into()));
    }
    let sq = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = scaled(a, c(0.5.powi(sq), 0.0));
    let id = identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| c(PADE13[k], 0.0);
    let lin = |m: &[(&CMat, usize)]| {
        let mut out = CMat::zeros(n, n);
        for (x, k) in m {
            out += scaled(x, b(*k));
        }
        out
    };
    let w1 = lin(&[(&a6, 13), (&a4, 11), (&a2, 9)]);
    let w2 = lin(&[(&a6, 7), (&a4, 5), (&a2, 3), (&id, 1)]);
    let u = &a * &(&(&a6 * &w1) + &w2);
    let z1 = lin(&[(&a6, 12), (&a4, 10), (&a2, 8)]);
    let z2 = lin(&[(&a6, 6), (&a4, 4), (&a2, 2), (&id, 0)]);
    let v = &(&a6 * &z1) + &z2;
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.partial_piv_lu().solve(&p);
    for _ in 0..sq {
        r = &r * &r;
    }
    if !r.as_ref().is_all_finite() {
        return Err(Error::Domain("expm overflowed".into()));
    }
    Ok(r)
}

/// Largest distance under a greedy nearest-neighbour pairing of two spectra
/// of equal length. Adequate for comparing spectra known to agree.
pub fn spectral_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = alloc::vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = (f64::INFINITY, 0);
        for (k, y) in b.iter().enumerate() {
            if !used[k] {
                let d = (x - y).norm();
                if d < best.0 {
                    best = (d, k);
                }
            }
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

/// Greedy pairing as in [`spectral_distance`], reporting the largest
/// mismatch separately for pairs away from the origin and pairs within
/// `radius` of it. Zero modes of spin-wave generators are typically
/// defective, and an eigensolver resolves them only to `~sqrt(eps)`.
pub fn spectral_mismatch(a: &[C64], b: &[C64], radius: f64) -> (f64, f64) {
    if a.len() != b.len() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mut used = alloc::vec![false; b.len()];
    let (mut far, mut near): (f64, f64) = (0.0, 0.0);
    for x in a {
        let mut best = (f64::INFINITY, 0);
        for (k, y) in b.iter().enumerate() {
            if !used[k] {
                let d = (x - y).norm();
                if d < best.0 {
                    best = (d, k);
                }
            }
        }
        used[best.1] = true;
        if x.norm() < radius {
            near = near.max(best.0);
        } else {
            far = far.max(best.0);
        }
    }
    (far, near)
}

/// Far-from-zero eigenvalues must agree to `tol`, near-zero ones to `1e-6`.
pub fn spectra_agree(a: &[C64], b: &[C64], tol: f64) -> bool {
    let (far, near) = spectral_mismatch(a, b, 1e-6);
    far <= tol && near <= 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_rotation_generator() {
        let t = 7.3;
        let a = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(-t, 0.0),
            (1, 0) => c(t, 0.0),
            _ => c(0.0, 0.0),
        });
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - c(t.cos(), 0.0)).norm() < 1e-13);
        assert!((e[(1, 0)] - c(t.sin(), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn expm_of_jordan_block() {
        let (lam, t) = (c(0.2, -1.1), 3.0);
        let a = CMat::from_fn(3, 3, |i, j| {
            if i == j {
                lam * t
            } else if j == i + 1 {
                c(t, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let e = expm(&a).unwrap();
        let el = (lam * t).exp();
        assert!((e[(0, 0)] - el).norm() < 1e-12);
        assert!((e[(0, 1)] - el * t).norm() < 1e-12);
        assert!((e[(0, 2)] - el * t * t / 2.0).norm() < 1e-12);
        assert!(e[(2, 0)].norm() < 1e-14);
    }

    #[test]
    fn expm_agrees_with_eigendecomposition_for_hermitian() {
        let h = CMat::from_fn(4, 4, |i, j| {
            let x = (i + 2 * j) as f64;
            let y = (j + 2 * i) as f64;
            c((x * 0.3).sin() + (y * 0.3).sin(), if i == j { 0.0 } else { (x - y) * 0.1 })
        });
        let (w, u) = hermitian_eigen(&h).unwrap();
        let e = expm(&scaled(&h, c(0.0, -2.5))).unwrap();
        let d = CMat::from_fn(4, 4, |i, j| if i == j { c(0.0, -2.5 * w[i]).exp() } else { c(0.0, 0.0) });
        let want = &(&u * &d) * u.adjoint();
        assert!(max_abs_diff(&e, &want) < 1e-12);
    }

    #[test]
    fn spectra_match() {
        let a = [c(1.0, 0.0), c(0.0, 1.0)];
        let b = [c(0.0, 1.0), c(1.0, 1e-12)];
        assert!(spectral_distance(&a, &b) < 1e-11);
    }
}
