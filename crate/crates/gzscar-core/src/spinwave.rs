//! Linear spin-wave dynamics about a classical trajectory: hopping `eta_j`,
//! pairing `zeta_j` and onsite `V_j` coefficients in the local frame, the
//! `2L x 2L` Heisenberg generator, and the contrast it predicts.

use alloc::vec::Vec;
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::linalg::{self, c, CMat};
use crate::rotframe::FrameData;
use crate::C64;

/// Coefficients of the quadratic boson Hamiltonian
/// `sum_j eta_j a+_{j+1} a_j + eta_j* a+_j a_{j+1} + zeta_j (a+_j a+_{j+1} + h.c.) + V_j a+_j a_j`.
/// Bond `j` joins sites `j` and `j+1` (mod L).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinWaveCoefficients {
    pub s: f64,
    pub eta: Vec<C64>,
    pub zeta: Vec<C64>,
    pub v: Vec<f64>,
}

impl SpinWaveCoefficients {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn max_pairing(&self) -> f64 {
        self.zeta.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn sw_coefficients(frame: &FrameData, s: f64) -> SpinWaveCoefficients {
    let l = frame.len();
    let half = 0.5 * s;
    let mut eta = Vec::with_capacity(l);
    let mut zeta = Vec::with_capacity(l);
    let mut v = Vec::with_capacity(l);
    for j in 0..l {
        let b = frame.jr[j];
        eta.push(c(half * (b[0][0] + b[1][1]), half * (b[0][1] - b[1][0])));
        zeta.push(c(half * (b[0][0] - b[1][1]), half * (b[0][1] + b[1][0])));
        let prev = frame.jr[(j + l - 1) % l];
        v.push(-s * (prev[2][2] + b[2][2]) - frame.hr[j][2]);
    }
    SpinWaveCoefficients { s, eta, zeta, v }
}

/// `C` with `d/dt (a, a+) = -i C (a, a+)`, i.e. `C = [[B, A], [-A*, -B*]]`.
pub fn build_linear_generator(co: &SpinWaveCoefficients) -> CMat {
    let l = co.len();
    let mut m = CMat::zeros(2 * l, 2 * l);
    for j in 0..l {
        let jm = (j + l - 1) % l;
        let jp = (j + 1) % l;
        // accumulate: for L = 2 both neighbours are the same site
        let entries = [
            (j, jm, co.eta[jm], false),
            (j, jp, co.eta[j].conj(), false),
            (j, j, c(co.v[j], 0.0), false),
            (j, jm, co.zeta[jm], true),
            (j, jp, co.zeta[j], true),
        ];
        for (r, col, val, pair) in entries {
            if pair {
                m[(r, col + l)] += val;
                m[(r + l, col)] -= val.conj();
            } else {
                m[(r, col)] += val;
                m[(r + l, col + l)] -= val.conj();
            }
        }
    }
    m
}

/// `exp(-i C t)`.
pub fn propagator(gen: &CMat, t: f64) -> Result<CMat> {
    linalg::expm(&linalg::scaled(gen, c(0.0, -t)))
}

/// Max-abs deviation of `U eta U+` from `eta = diag(I, -I)`.
pub fn symplectic_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    let l = n / 2;
    let sig = CMat::from_fn(n, n, |i, j| {
        if i != j {
            c(0.0, 0.0)
        } else if i < l {
            c(1.0, 0.0)
        } else {
            c(-1.0, 0.0)
        }
    });
    let p = &(u * &sig) * u.adjoint();
    linalg::max_abs_diff(&p, &sig)
}

/// Contrast time series; `f = S (1 - D)` is the scaling function at `tau = S t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastSeries {
    pub s: f64,
    pub times: Vec<f64>,
    pub d: Vec<f64>,
    pub f: Vec<f64>,
}

impl ContrastSeries {
    pub fn from_d(s: f64, times: Vec<f64>, d: Vec<f64>) -> Self {
        let f = d.iter().map(|x| s * (1.0 - x)).collect();
        Self { s, times, d, f }
    }

    pub fn taus(&self) -> Vec<f64> {
        self.times.iter().map(|t| self.s * t).collect()
    }
}

/// `1 - (1/LS) sum_{j,l} |W_{j,l}|^2` for the upper-right block `W` of `U`.
fn d_from_block(w: &CMat, s: f64) -> f64 {
    let l = w.ncols();
    let mut n = 0.0;
    for col in 0..l {
        for row in 0..l {
            n += w[(row, col)].norm_sqr();
        }
    }
    1.0 - n / (l as f64 * s)
}

/// Contrast for a static generator on the grid `t_n = n dt`, `n = 0..=steps`.
///
/// Propagation uses `U(t + dt) = exp(-i C dt) U(t)` with a Pade exponential,
/// which stays exact for defective `C`.
pub fn contrast_sw(co: &SpinWaveCoefficients, dt: f64, steps: usize) -> Result<ContrastSeries> {
    if !(dt > 0.0) {
        return Err(domain("dt must be positive"));
    }
    let l = co.len();
    let gen = build_linear_generator(co);
    let step = propagator(&gen, dt)?;
    let mut w = CMat::from_fn(2 * l, l, |i, j| if i == j + l { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let mut times = Vec::with_capacity(steps + 1);
    let mut d = Vec::with_capacity(steps + 1);
    times.push(0.0);
    d.push(1.0);
    for n in 1..=steps {
        w = &step * &w;
        let top = w.as_ref().subrows(0, l).to_owned();
        let dn = d_from_block(&top, co.s);
        if !dn.is_finite() {
            return Err(Error::Integration(alloc::format!("contrast overflowed at t = {}", n as f64 * dt)));
        }
        times.push(n as f64 * dt);
        d.push(dn);
    }
    Ok(ContrastSeries::from_d(co.s, times, d))
}

/// Contrast for the same physics sampled at `tau_n = n dtau` in scaled time.
pub fn contrast_sw_scaled(co: &SpinWaveCoefficients, dtau: f64, steps: usize) -> Result<ContrastSeries> {
    contrast_sw(co, dtau / co.s, steps)
}

const SQRT3: f64 = 1.7320508075688772;

/// One commutator-free fourth-order step `exp(-i h C_b) exp(-i h C_a)` where
/// `C_a, C_b` are the two weighted combinations of `C` at the Gauss nodes.
fn cf4_step(gen: &dyn Fn(f64) -> Result<CMat>, t: f64, h: f64) -> Result<CMat> {
    let c1 = gen(t + (0.5 - SQRT3 / 6.0) * h)?;
    let c2 = gen(t + (0.5 + SQRT3 / 6.0) * h)?;
    let a1 = (3.0 - 2.0 * SQRT3) / 12.0;
    let a2 = (3.0 + 2.0 * SQRT3) / 12.0;
    let first = &linalg::scaled(&c1, c(a2, 0.0)) + &linalg::scaled(&c2, c(a1, 0.0));
    let second = &linalg::scaled(&c1, c(a1, 0.0)) + &linalg::scaled(&c2, c(a2, 0.0));
    Ok(&propagator(&second, h)? * &propagator(&first, h)?)
}

/// Contrast for a time-dependent frame, `coeffs(t)` sampled as needed.
///
/// Every step is compared against two half steps; a local discrepancy
/// above `tol` is reported as an integration failure.
pub fn contrast_sw_time_dependent(
    coeffs: &dyn Fn(f64) -> Result<SpinWaveCoefficients>,
    s: f64,
    dt: f64,
    steps: usize,
    tol: f64,
) -> Result<ContrastSeries> {
    if !(dt > 0.0) {
        return Err(domain("dt must be positive"));
    }
    let gen = |t: f64| coeffs(t).map(|co| build_linear_generator(&co));
    let l = coeffs(0.0)?.len();
    let mut u = linalg::identity(2 * l);
    let mut times = alloc::vec![0.0];
    let mut d = alloc::vec![1.0];
    for n in 0..steps {
        let t = n as f64 * dt;
        let full = cf4_step(&gen, t, dt)?;
        let halves = &cf4_step(&gen, t + 0.5 * dt, 0.5 * dt)? * &cf4_step(&gen, t, 0.5 * dt)?;
        let err = linalg::max_abs_diff(&full, &halves);
        if !(err <= tol) {
            return Err(Error::Integration(alloc::format!(
                "local error {err:.3e} exceeds {tol:.1e} at t = {t:.6} with dt = {dt:.3e}; reduce dt"
            )));
        }
        u = &halves * &u;
        let top = u.as_ref().submatrix(0, l, l, l).to_owned();
        times.push(t + dt);
        d.push(d_from_block(&top, s));
    }
    Ok(ContrastSeries::from_d(s, times, d))
}

/// Max pointwise deviation between the scaling functions of two runs that
/// share the same `tau` grid.
pub fn scaling_collapse_check(a: &ContrastSeries, b: &ContrastSeries) -> Result<f64> {
    if a.f.len() != b.f.len() {
        return Err(Error::Length { expected: a.f.len(), got: b.f.len() });
    }
    let (ta, tb) = (a.taus(), b.taus());
    if ta.iter().zip(&tb).any(|(x, y)| (x - y).abs() > 1e-9 * x.abs().max(1.0)) {
        return Err(domain("series are not on a common tau grid"));
    }
    Ok(a.f.iter().zip(&b.f).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// `C(t) = (D(t) - cos^2 theta) / sin^2 theta`.
pub fn spin_contrast(d: &[f64], theta: f64) -> Result<Vec<f64>> {
    let s2 = theta.sin().powi(2);
    if s2 < 1e-14 {
        return Err(domain("spin contrast is undefined for theta = 0 or pi"));
    }
    let c2 = theta.cos().powi(2);
    Ok(d.iter().map(|x| (x - c2) / s2).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{k_unchecked, sncndn};
    use crate::rotframe::{frame_glsh, frame_gtsh, frame_transverse};
    use crate::scars::{parent_couplings, XyzCouplings};
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn helix(s: f64, q: f64, th: f64, dz: f64, l: usize) -> SpinWaveCoefficients {
        let j = XyzCouplings::new(1.0, 1.0, q.cos()).perturbed(0.0, dz);
        let om = -2.0 * s * th.cos() * dz;
        sw_coefficients(&frame_transverse(th, q, om, 0.0, l, &j).unwrap(), s)
    }

    #[test]
    fn transverse_coefficients_closed_form() {
        let (s, q, th, dz) = (1.5, PI / 3.0, FRAC_PI_4, 0.03);
        let co = helix(s, q, th, dz, 6);
        let st2 = th.sin().powi(2);
        let eta = c(0.5 * s * (2.0 * q.cos() + st2 * dz), -s * th.cos() * q.sin());
        for j in 0..6 {
            assert!((co.eta[j] - eta).norm() < 1e-12);
            assert!((co.zeta[j] - c(0.5 * s * st2 * dz, 0.0)).norm() < 1e-12);
            assert!((co.v[j] + 2.0 * s * q.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn gtsh_onsite_potential() {
        let (k, s) = (0.9, 1.0);
        let q = 2.0 * k_unchecked(k) / 3.0;
        let j = parent_couplings(k, q).unwrap().perturbed(0.0, 0.02);
        let co = sw_coefficients(&frame_gtsh(k, q, 6, &j).unwrap(), s);
        let (sq, cq, dq) = sncndn(q, k);
        for (i, v) in co.v.iter().enumerate() {
            let su = sncndn(q * i as f64, k).0;
            let want = -2.0 * s * cq * dq / (1.0 - k * k * su * su * sq * sq);
            assert!((v - want).abs() < 1e-12, "site {i}");
        }
    }

    #[test]
    fn parent_frames_have_no_pairing() {
        let (k, s) = (0.8, 2.0);
        let q = 4.0 * k_unchecked(k) / 7.0;
        let j = parent_couplings(k, q).unwrap();
        for fr in [frame_gtsh(k, q, 7, &j).unwrap(), frame_glsh(k, q, 7, &j).unwrap()] {
            assert!(sw_coefficients(&fr, s).max_pairing() < 1e-12);
        }
        let co = helix(1.0, PI / 3.0, 0.4, 0.0, 6);
        assert!(co.max_pairing() < 1e-14);
    }

    #[test]
    fn generator_for_two_sites() {
        let (s, q, th, dz) = (1.0, PI / 3.0, FRAC_PI_4, 0.03);
        let co = helix(s, q, th, dz, 2);
        let g = build_linear_generator(&co);
        // with two sites each neighbour appears twice, once through each bond
        let (e0, e1) = (co.eta[0], co.eta[1]);
        let z = co.zeta[0] + co.zeta[1];
        let (v0, v1) = (co.v[0], co.v[1]);
        let o = c(0.0, 0.0);
        let want = [
            [c(v0, 0.0), e1 + e0.conj(), o, z],
            [e0 + e1.conj(), c(v1, 0.0), z, o],
            [o, -z.conj(), c(-v0, 0.0), -(e1 + e0.conj()).conj()],
            [-z.conj(), o, -(e0 + e1.conj()).conj(), c(-v1, 0.0)],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((g[(i, j)] - want[i][j]).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn generator_is_linear_in_spin() {
        let a = build_linear_generator(&helix(1.0, 0.9, 0.7, 0.02, 5));
        let b = build_linear_generator(&helix(2.0, 0.9, 0.7, 0.02, 5));
        assert!(linalg::max_abs_diff(&linalg::scaled(&a, c(2.0, 0.0)), &b) < 1e-13);
    }

    #[test]
    fn no_pairing_means_block_diagonal_and_full_contrast() {
        let co = helix(1.0, PI / 3.0, FRAC_PI_4, 0.0, 6);
        let g = build_linear_generator(&co);
        for i in 0..6 {
            for j in 0..6 {
                assert!(g[(i, j + 6)].norm() < 1e-15);
                assert!(g[(i + 6, j)].norm() < 1e-15);
            }
        }
        let cs = contrast_sw(&co, 0.1, 100).unwrap();
        assert!(cs.d.iter().all(|d| (d - 1.0).abs() < 1e-15));
    }

    #[test]
    fn propagator_is_symplectic() {
        let co = helix(1.0, PI / 3.0, FRAC_PI_4, 0.03, 12);
        let u = propagator(&build_linear_generator(&co), 25.0).unwrap();
        assert!(symplectic_defect(&u) < 1e-9);
    }

    #[test]
    fn contrast_bounded_and_collapses() {
        let a = contrast_sw_scaled(&helix(1.0, PI / 3.0, FRAC_PI_4, -0.03, 24), 0.1, 100).unwrap();
        let b = contrast_sw_scaled(&helix(2.0, PI / 3.0, FRAC_PI_4, -0.03, 24), 0.1, 100).unwrap();
        assert_eq!(a.d[0], 1.0);
        assert!(a.d.iter().all(|d| *d <= 1.0 + 1e-9));
        assert!(scaling_collapse_check(&a, &b).unwrap() < 1e-8);
        assert_eq!(scaling_collapse_check(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn time_dependent_path_matches_static() {
        let co = helix(1.0, PI / 3.0, FRAC_PI_4, 0.03, 6);
        let stat = contrast_sw(&co, 0.05, 40).unwrap();
        let f = |_t: f64| Ok(co.clone());
        let td = contrast_sw_time_dependent(&f, 1.0, 0.05, 40, 1e-10).unwrap();
        for (x, y) in stat.d.iter().zip(&td.d) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn time_dependent_scalar_modulation() {
        // C(t) = (1 + t/2) C0 commutes with itself, so U = exp(-i (t + t^2/4) C0)
        let co = helix(1.0, PI / 3.0, FRAC_PI_4, 0.03, 6);
        let scaled = |t: f64| {
            let g = 1.0 + 0.5 * t;
            let mut x = co.clone();
            x.eta.iter_mut().for_each(|e| *e *= g);
            x.zeta.iter_mut().for_each(|e| *e *= g);
            x.v.iter_mut().for_each(|e| *e *= g);
            Ok(x)
        };
        let td = contrast_sw_time_dependent(&scaled, 1.0, 0.01, 200, 1e-10).unwrap();
        let t = 2.0;
        let u = propagator(&build_linear_generator(&co), t + t * t / 4.0).unwrap();
        let top = u.as_ref().submatrix(0, 6, 6, 6).to_owned();
        assert!((td.d[200] - d_from_block(&top, 1.0)).abs() < 1e-9);
    }

    #[test]
    fn coarse_time_dependent_step_is_rejected() {
        let wobble = |t: f64| Ok(helix(1.0, PI / 3.0, 0.5 + 0.3 * t, 0.03, 6));
        assert!(contrast_sw_time_dependent(&wobble, 1.0, 0.5, 4, 1e-10).is_err());
        assert!(contrast_sw_time_dependent(&wobble, 1.0, 0.002, 50, 1e-10).is_ok());
    }

    #[test]
    fn spin_contrast_arithmetic() {
        assert!((spin_contrast(&[0.9], FRAC_PI_4).unwrap()[0] - 0.8).abs() < 1e-14);
        assert!((spin_contrast(&[1.0], 0.3).unwrap()[0] - 1.0).abs() < 1e-14);
        assert!((spin_contrast(&[0.37], FRAC_PI_2).unwrap()[0] - 0.37).abs() < 1e-15);
        assert!(spin_contrast(&[1.0], 0.0).is_err());
        assert!(spin_contrast(&[1.0], PI).is_err());
    }
}
