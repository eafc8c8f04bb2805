//! Local rotating frames: rotations `R_j` with `R_j z = Omega_j`, induced
//! bond exchange `J_R,j = R_j^T J R_{j+1}` and the effective fields `h_R,j`
//! defined by `h_R x v = -R^T (dR/dt) v`.

use alloc::vec::Vec;
use num_traits::Float;

use crate::elliptic::{k_unchecked, sncndn};
use crate::error::{domain, Result};
use crate::scars::{SpinTexture, XyzCouplings};
use crate::vec3::{self, Mat3, Vec3, ZHAT};

#[derive(Debug, Clone, PartialEq)]
pub struct FrameData {
    pub r: Vec<Mat3>,
    pub jr: Vec<Mat3>,
    pub hr: Vec<Vec3>,
}

impl FrameData {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `Omega_j = R_j z`.
    pub fn texture(&self) -> SpinTexture {
        SpinTexture::new_unchecked(self.r.iter().map(|r| vec3::column(*r, 2)).collect())
    }

    /// Rotating-frame frequencies `omega_j = S(J_{j-1}^zz + J_j^zz) + h_j^z`.
    pub fn omegas(&self, s: f64) -> Vec<f64> {
        stationarity_residual(self, s).1
    }

    /// Max orthogonality defect and max `|det R - 1|` over all sites.
    pub fn rotation_defects(&self) -> (f64, f64) {
        self.r.iter().fold((0.0, 0.0), |(o, d), r| {
            (f64::max(o, vec3::orthogonality_defect(*r)), f64::max(d, (vec3::det(*r) - 1.0).abs()))
        })
    }
}

/// `J_R,j = R_j^T J_j R_{j+1}` on a ring.
pub fn induced_exchange_bonds(r: &[Mat3], bonds: &[Mat3]) -> Vec<Mat3> {
    let l = r.len();
    (0..l)
        .map(|j| vec3::matmul(vec3::matmul(vec3::transpose(r[j]), bonds[j]), r[(j + 1) % l]))
        .collect()
}

fn induced_exchange(r: &[Mat3], j: &Mat3) -> Vec<Mat3> {
    let bonds = alloc::vec![*j; r.len()];
    induced_exchange_bonds(r, &bonds)
}

/// Transverse helix frame `R_j(t) = Rz(q j - omega t) Ry(theta)`.
pub fn frame_transverse(theta: f64, q: f64, omega: f64, t: f64, l: usize, j: &XyzCouplings) -> Result<FrameData> {
    if !(theta > 0.0 && theta < core::f64::consts::PI) {
        return Err(domain("theta must lie strictly between 0 and pi"));
    }
    let ry = vec3::rot_y(theta);
    let r: Vec<Mat3> = (0..l).map(|s| vec3::matmul(vec3::rot_z(q * s as f64 - omega * t), ry)).collect();
    let jr = induced_exchange(&r, &j.matrix());
    let (st, ct) = theta.sin_cos();
    let h = [-omega * st, 0.0, omega * ct];
    Ok(FrameData { r, jr, hr: alloc::vec![h; l] })
}

fn check_elliptic(kappa: f64, q: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(domain("kappa must lie in (0, 1)"));
    }
    if !(q > 0.0 && q < k_unchecked(kappa)) {
        return Err(domain("q must lie in (0, K(kappa))"));
    }
    Ok(())
}

/// Static frame of the generalized transverse helix (`gamma = 0`, `phi = 0`).
pub fn frame_gtsh(kappa: f64, q: f64, l: usize, j: &XyzCouplings) -> Result<FrameData> {
    check_elliptic(kappa, q)?;
    let r: Vec<Mat3> = (0..l)
        .map(|s| {
            let (sn, cn, _) = sncndn(q * s as f64, kappa);
            [[0.0, -sn, cn], [0.0, cn, sn], [-1.0, 0.0, 0.0]]
        })
        .collect();
    let jr = induced_exchange(&r, &j.matrix());
    Ok(FrameData { r, jr, hr: alloc::vec![[0.0; 3]; l] })
}

/// Static frame of the generalized longitudinal helix (`gamma = 1`, `phi = 0`).
pub fn frame_glsh(kappa: f64, q: f64, l: usize, j: &XyzCouplings) -> Result<FrameData> {
    check_elliptic(kappa, q)?;
    let r: Vec<Mat3> = (0..l)
        .map(|s| {
            let (sn, _, dn) = sncndn(q * s as f64, kappa);
            [[1.0, 0.0, 0.0], [0.0, dn, kappa * sn], [0.0, -kappa * sn, dn]]
        })
        .collect();
    let jr = induced_exchange(&r, &j.matrix());
    Ok(FrameData { r, jr, hr: alloc::vec![[0.0; 3]; l] })
}

/// Rotation taking `z` to `w` about `z x w`. Fails for `w = -z`.
pub fn geodesic_rotation(w: Vec3) -> Result<Mat3> {
    let n = vec3::norm(w);
    let w = vec3::scale(1.0 / n, w);
    let axis = vec3::cross(ZHAT, w);
    let s = vec3::norm(axis);
    let c = w[2];
    if s < 1e-300 {
        if c > 0.0 {
            return Ok(vec3::identity());
        }
        return Err(domain("geodesic frame is undefined for a Bloch vector along -z"));
    }
    Ok(vec3::rot_axis(vec3::scale(1.0 / s, axis), s.atan2(c)))
}

pub fn geodesic_rotations(texture: &SpinTexture) -> Result<Vec<Mat3>> {
    texture.omegas.iter().map(|w| geodesic_rotation(*w)).collect()
}

/// Static geodesic frame for an arbitrary texture.
pub fn frame_geodesic(texture: &SpinTexture, j: &XyzCouplings) -> Result<FrameData> {
    let r = geodesic_rotations(texture)?;
    let jr = induced_exchange(&r, &j.matrix());
    Ok(FrameData { hr: alloc::vec![[0.0; 3]; r.len()], r, jr })
}

/// Geodesic frame at time `t` of a sampled trajectory, with `h_R` from a
/// central difference of the frames at `t - dt` and `t + dt`.
///
/// Numerical stand-in for trajectories without a closed-form frame; the
/// accuracy of `h_R` is `O(dt^2)`.
pub fn frame_from_trajectory(
    before: &SpinTexture,
    now: &SpinTexture,
    after: &SpinTexture,
    dt: f64,
    j: &XyzCouplings,
) -> Result<FrameData> {
    let r = geodesic_rotations(now)?;
    let rb = geodesic_rotations(before)?;
    let ra = geodesic_rotations(after)?;
    let hr = (0..r.len())
        .map(|s| {
            let mut d = [[0.0; 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    d[a][b] = (ra[s][a][b] - rb[s][a][b]) / (2.0 * dt);
                }
            }
            vec3::scale(-1.0, vec3::axial(vec3::matmul(vec3::transpose(r[s]), d)))
        })
        .collect();
    let jr = induced_exchange(&r, &j.matrix());
    Ok(FrameData { r, jr, hr })
}

/// Per-site transverse norm of `S(J_{j-1}^T + J_j) z + h_j`, and its z-component `omega_j`.
pub fn stationarity_residual(frame: &FrameData, s: f64) -> (Vec<f64>, Vec<f64>) {
    let l = frame.len();
    let mut res = Vec::with_capacity(l);
    let mut om = Vec::with_capacity(l);
    for i in 0..l {
        let p = frame.jr[(i + l - 1) % l];
        let b = frame.jr[i];
        let g = vec3::add(vec3::scale(s, vec3::add(p[2], vec3::column(b, 2))), frame.hr[i]);
        res.push(g[0].hypot(g[1]));
        om.push(g[2]);
    }
    (res, om)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scars::{self, parent_couplings, ScarParams};
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn max_abs(a: &Mat3, b: &Mat3) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                e = e.max((a[i][k] - b[i][k]).abs());
            }
        }
        e
    }

    fn transverse_closed_form(theta: f64, q: f64, dz: f64, s: f64) -> (Mat3, Vec3) {
        let (st, ct) = theta.sin_cos();
        let (sq, cq) = q.sin_cos();
        let jr = [
            [cq + st * st * dz, -ct * sq, -ct * st * dz],
            [ct * sq, cq, st * sq],
            [-ct * st * dz, -st * sq, cq + ct * ct * dz],
        ];
        (jr, [2.0 * s * ct * st * dz, 0.0, -2.0 * s * ct * ct * dz])
    }

    #[test]
    fn transverse_matches_closed_form() {
        let (q, s) = (PI / 3.0, 1.5);
        for &theta in &[FRAC_PI_4, 1.0, 2.2] {
            for &dz in &[0.0, 0.03, -0.07] {
                let omega = -2.0 * s * theta.cos() * dz;
                let c = XyzCouplings::new(1.0, 1.0, q.cos()).perturbed(0.0, dz);
                let f = frame_transverse(theta, q, omega, 0.37, 6, &c).unwrap();
                let (jr, h) = transverse_closed_form(theta, q, dz, s);
                for b in &f.jr {
                    assert!(max_abs(b, &jr) < 1e-12);
                }
                for k in 0..3 {
                    assert!((f.hr[0][k] - h[k]).abs() < 1e-14);
                }
                let (res, _) = stationarity_residual(&f, s);
                assert!(res.iter().all(|&r| r < 1e-12));
            }
        }
    }

    #[test]
    fn transverse_rejects_poles() {
        let c = XyzCouplings::new(1.0, 1.0, 0.5);
        assert!(frame_transverse(0.0, 0.3, 0.0, 0.0, 4, &c).is_err());
        assert!(frame_transverse(PI, 0.3, 0.0, 0.0, 4, &c).is_err());
    }

    #[test]
    fn transverse_equator_maps_x_to_z() {
        let c = XyzCouplings::new(1.0, 1.0, 0.4);
        let f = frame_transverse(FRAC_PI_2, 0.0, 0.0, 0.0, 3, &c).unwrap();
        assert!((f.jr[0][2][2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transverse_without_rotation_is_not_stationary() {
        let (q, th, dz) = (PI / 3.0, FRAC_PI_4, 0.03);
        let c = XyzCouplings::new(1.0, 1.0, q.cos()).perturbed(0.0, dz);
        let f = frame_transverse(th, q, 0.0, 0.0, 6, &c).unwrap();
        let (res, _) = stationarity_residual(&f, 1.0);
        assert!(res.iter().all(|&r| r > 1e-3));
    }

    fn gtsh_closed_form(kappa: f64, q: f64, j: usize, c: &XyzCouplings) -> Mat3 {
        let (sq, cq, dq) = sncndn(q, kappa);
        let (sj, cj, dj) = sncndn(q * j as f64, kappa);
        let (_, _, dj1) = sncndn(q * (j + 1) as f64, kappa);
        let k2 = kappa * kappa;
        let zz = c.jy * (cq * dq + cj * sj * dj * k2 * sq * sq * sq) / (1.0 - k2 * sj * sj * sq * sq);
        [[c.jz, 0.0, 0.0], [0.0, c.jy * cq, c.jy * sq * dj], [0.0, -c.jy * sq * dj1, zz]]
    }

    fn glsh_closed_form(kappa: f64, q: f64, j: usize, c: &XyzCouplings) -> Mat3 {
        let (sq, cq, dq) = sncndn(q, kappa);
        let (sj, cj, dj) = sncndn(q * j as f64, kappa);
        let (_, cj1, _) = sncndn(q * (j + 1) as f64, kappa);
        let k2 = kappa * kappa;
        let zz = c.jy * (cq * dq + cj * sj * dj * k2 * sq * sq * sq) / (1.0 - k2 * sj * sj * sq * sq);
        [
            [c.jx, 0.0, 0.0],
            [0.0, c.jy * dq, kappa * c.jy * sq * cj],
            [0.0, -kappa * c.jy * sq * cj1, zz],
        ]
    }

    #[test]
    fn elliptic_frames_match_closed_forms() {
        for &(kappa, lam) in &[(0.9, 6usize), (0.8, 7), (0.5, 11), (0.3, 20)] {
            let q = 4.0 * k_unchecked(kappa) / lam as f64;
            let c = parent_couplings(kappa, q).unwrap();
            let fg = frame_gtsh(kappa, q, lam, &c).unwrap();
            let fl = frame_glsh(kappa, q, lam, &c).unwrap();
            for j in 0..lam {
                assert!(max_abs(&fg.jr[j], &gtsh_closed_form(kappa, q, j, &c)) < 1e-10);
                assert!(max_abs(&fl.jr[j], &glsh_closed_form(kappa, q, j, &c)) < 1e-10);
                assert_eq!(fl.jr[j][0][0], c.jx);
            }
            for (f, gamma) in [(&fg, 0.0), (&fl, 1.0)] {
                let p = ScarParams::commensurate(kappa, 1, lam, gamma, 0.0, 2).unwrap();
                let tex = scars::scar_texture(&p);
                for (a, b) in f.texture().omegas.iter().zip(&tex.omegas) {
                    for k in 0..3 {
                        assert!((a[k] - b[k]).abs() < 1e-12);
                    }
                }
                let (od, dd) = f.rotation_defects();
                assert!(od < 1e-12 && dd < 1e-12);
                let (res, _) = stationarity_residual(f, 2.0);
                assert!(res.iter().all(|&r| r < 1e-10));
                let (r1, r2) = scars::residuals_from_jr(&f.jr);
                assert!(r1.iter().chain(&r2).all(|&r| r < 1e-10));
            }
        }
    }

    #[test]
    fn gtsh_zz_at_sn_zero_site() {
        let (kappa, q) = (0.9, 4.0 * k_unchecked(0.9) / 6.0);
        let c = parent_couplings(kappa, q).unwrap();
        let f = frame_gtsh(kappa, q, 6, &c).unwrap();
        let (_, cq, dq) = sncndn(q, kappa);
        assert!((f.jr[0][2][2] - c.jy * cq * dq).abs() < 1e-14);
    }

    #[test]
    fn transverse_and_gtsh_agree_at_small_kappa() {
        let kappa = 1e-9;
        let q = 0.7;
        let c = XyzCouplings::new(1.0, 1.0, 0.3);
        let ft = frame_transverse(FRAC_PI_2, q, 0.0, 0.0, 5, &c).unwrap();
        let fg = frame_gtsh(kappa, q, 5, &c).unwrap();
        for (a, b) in ft.jr.iter().zip(&fg.jr) {
            assert!(max_abs(a, b) < 1e-8);
        }
    }

    #[test]
    fn geodesic_maps_z_to_target() {
        for w in [[0.6, 0.0, 0.8], [0.0, -1.0, 0.0], [0.3, 0.4, -0.866_025_403_784_438_6], [0.0, 0.0, 1.0]] {
            let n = vec3::norm(w);
            let w = vec3::scale(1.0 / n, w);
            let r = geodesic_rotation(w).unwrap();
            let z = vec3::column(r, 2);
            for k in 0..3 {
                assert!((z[k] - w[k]).abs() < 1e-12);
            }
            assert!(vec3::orthogonality_defect(r) < 1e-12);
        }
        assert!(geodesic_rotation([0.0, 0.0, -1.0]).is_err());
    }

    #[test]
    fn numerical_field_matches_transverse_field() {
        // rigid rotation about z at angular velocity -omega
        let (th, q, omega, dt) = (0.9, 0.4, 0.05, 1e-4);
        let c = XyzCouplings::new(1.0, 1.0, 0.5);
        let tex = |t: f64| frame_transverse(th, q, omega, t, 5, &c).unwrap().texture();
        let f = frame_from_trajectory(&tex(1.0 - dt), &tex(1.0), &tex(1.0 + dt), dt, &c).unwrap();
        // the two frames differ by a local z rotation, which leaves the
        // transverse norm of the stationarity vector unchanged
        let ft = frame_transverse(th, q, omega, 1.0, 5, &c).unwrap();
        let (rn, _) = stationarity_residual(&f, 1.0);
        let (rt, _) = stationarity_residual(&ft, 1.0);
        for i in 0..5 {
            assert!((rn[i] - rt[i]).abs() < 1e-6);
        }
    }
}
