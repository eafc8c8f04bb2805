//! Jacobi elliptic functions, amplitude, complete integrals and Jacobi's
//! epsilon function for a real modulus `0 <= kappa <= 1`.
//!
//! The modulus convention is `dn^2 + kappa^2 sn^2 = 1` (parameter `m = kappa^2`).

use core::f64::consts::{FRAC_PI_2, PI};
use num_traits::Float;

use crate::error::{domain, Result};

const EPS: f64 = f64::EPSILON;

/// A validated elliptic modulus in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(kappa: f64) -> Result<Self> {
        check_modulus(kappa)?;
        Ok(Self(kappa))
    }

    pub fn kappa(self) -> f64 {
        self.0
    }

    /// Complementary modulus `sqrt(1 - kappa^2)`.
    pub fn complementary(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

fn check_modulus(kappa: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(domain("elliptic modulus must lie in [0, 1]"));
    }
    Ok(())
}

fn check_arg(u: f64) -> Result<()> {
    if !u.is_finite() {
        return Err(domain("argument must be finite"));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind, by the arithmetic-geometric mean.
pub fn complete_k(kappa: f64) -> Result<f64> {
    check_modulus(kappa)?;
    if kappa >= 1.0 {
        return Err(domain("K(kappa) diverges at kappa = 1"));
    }
    Ok(k_unchecked(kappa))
}

pub(crate) fn k_unchecked(kappa: f64) -> f64 {
    let mut a = 1.0;
    let mut b = ((1.0 - kappa) * (1.0 + kappa)).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 4.0 * EPS * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    FRAC_PI_2 / a
}

/// Complete elliptic integral of the second kind. `E(1) = 1`.
pub fn complete_e(kappa: f64) -> Result<f64> {
    check_modulus(kappa)?;
    Ok(e_unchecked(kappa))
}

pub(crate) fn e_unchecked(kappa: f64) -> f64 {
    if kappa >= 1.0 {
        return 1.0;
    }
    let kp2 = (1.0 - kappa) * (1.0 + kappa);
    let k2 = kappa * kappa;
    carlson_rf(0.0, kp2, 1.0) - k2 / 3.0 * carlson_rd(0.0, kp2, 1.0)
}

/// Carlson's symmetric integral `R_F(x, y, z)`; at most one argument may be zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let mut ave;
    let (mut dx, mut dy, mut dz);
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        ave = (x + y + z) / 3.0;
        dx = (ave - x) / ave;
        dy = (ave - y) / ave;
        dz = (ave - z) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-3 {
            break;
        }
    }
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 + (e2 / 24.0 - 0.1 - 3.0 / 44.0 * e3) * e2 + e3 / 14.0) / ave.sqrt()
}

/// Carlson's symmetric integral `R_D(x, y, z)`.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    const C1: f64 = 3.0 / 14.0;
    const C2: f64 = 1.0 / 6.0;
    const C3: f64 = 9.0 / 22.0;
    const C4: f64 = 3.0 / 26.0;
    const C5: f64 = 0.25 * C3;
    const C6: f64 = 1.5 * C4;
    let (mut x, mut y, mut z) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    let mut ave;
    let (mut dx, mut dy, mut dz);
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        ave = 0.2 * (x + y + 3.0 * z);
        dx = (ave - x) / ave;
        dy = (ave - y) / ave;
        dz = (ave - z) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-3 {
            break;
        }
    }
    let ea = dx * dy;
    let eb = dz * dz;
    let ec = ea - eb;
    let ed = ea - 6.0 * eb;
    let ee = ed + ec + ec;
    3.0 * sum
        + fac * (1.0 + ed * (-C1 + C5 * ed - C6 * dz * ee) + dz * (C2 * ee + dz * (-C3 * ec + dz * C4 * ea)))
            / (ave * ave.sqrt())
}

/// Incomplete integral of the first kind `F(phi, kappa)` for any real `phi`.
pub fn incomplete_f(phi: f64, kappa: f64) -> Result<f64> {
    check_modulus(kappa)?;
    check_arg(phi)?;
    let m = (phi / PI).round();
    let pr = phi - m * PI;
    let base = if m != 0.0 {
        if kappa >= 1.0 {
            return Err(domain("F(phi, 1) diverges for |phi| >= pi/2"));
        }
        2.0 * m * k_unchecked(kappa)
    } else {
        0.0
    };
    let (s, c) = pr.sin_cos();
    Ok(base + s * carlson_rf(c * c, (1.0 - kappa * s) * (1.0 + kappa * s), 1.0))
}

/// Incomplete integral of the second kind `E(phi, kappa)` for any real `phi`.
pub fn incomplete_e(phi: f64, kappa: f64) -> Result<f64> {
    check_modulus(kappa)?;
    check_arg(phi)?;
    Ok(incomplete_e_unchecked(phi, kappa))
}

fn incomplete_e_unchecked(phi: f64, kappa: f64) -> f64 {
    let m = (phi / PI).round();
    let pr = phi - m * PI;
    let (s, c) = pr.sin_cos();
    let k2 = kappa * kappa;
    let y = (1.0 - kappa * s) * (1.0 + kappa * s);
    let part = s * carlson_rf(c * c, y, 1.0) - k2 / 3.0 * s * s * s * carlson_rd(c * c, y, 1.0);
    if m != 0.0 {
        2.0 * m * e_unchecked(kappa) + part
    } else {
        part
    }
}

/// Amplitude `am(u)` by the descending Landen recursion.
fn landen(u: f64, kappa: f64) -> f64 {
    let mut a = [0.0f64; 24];
    let mut c = [0.0f64; 24];
    a[0] = 1.0;
    c[0] = kappa;
    let mut b = ((1.0 - kappa) * (1.0 + kappa)).sqrt();
    let mut n = 0;
    while c[n].abs() > EPS * a[n] && n < 23 {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = f64::powi(2.0, n as i32) * a[n] * u;
    for i in (1..=n).rev() {
        phi = 0.5 * (phi + (c[i] / a[i] * phi.sin()).asin());
    }
    phi
}

/// Reduce `u` modulo `4K`; returns `(u_reduced, n)` with `u = u_reduced + 4K n`.
fn reduce(u: f64, kappa: f64) -> (f64, f64) {
    let p = 4.0 * k_unchecked(kappa);
    let n = (u / p).round();
    (u - n * p, n)
}

/// Unchecked `(sn, cn, dn)`; callers guarantee a finite `u` and `0 <= kappa <= 1`.
pub(crate) fn sncndn(u: f64, kappa: f64) -> (f64, f64, f64) {
    if kappa == 0.0 {
        let (s, c) = u.sin_cos();
        return (s, c, 1.0);
    }
    if kappa >= 1.0 {
        let sech = 1.0 / u.cosh();
        return (u.tanh(), sech, sech);
    }
    let (ur, _) = reduce(u, kappa);
    let p0 = landen(ur, kappa);
    let (s, c) = p0.sin_cos();
    // dn^2 = kappa'^2 + kappa^2 cn^2 has no cancellation, unlike 1 - kappa^2 sn^2
    let dn = ((1.0 - kappa) * (1.0 + kappa) + kappa * kappa * c * c).sqrt();
    (s, c, dn)
}

pub(crate) fn am_unchecked(u: f64, kappa: f64) -> f64 {
    if kappa == 0.0 {
        return u;
    }
    if kappa >= 1.0 {
        return 2.0 * (0.5 * u).tanh().atan();
    }
    let (ur, n) = reduce(u, kappa);
    landen(ur, kappa) + 2.0 * PI * n
}

pub(crate) fn epsilon_unchecked(u: f64, kappa: f64) -> f64 {
    if kappa == 0.0 {
        return u;
    }
    if kappa >= 1.0 {
        return u.tanh();
    }
    incomplete_e_unchecked(am_unchecked(u, kappa), kappa)
}

/// `(sn, cn, dn)(u, kappa)`.
pub fn jacobi_sncndn(u: f64, kappa: f64) -> Result<(f64, f64, f64)> {
    check_modulus(kappa)?;
    check_arg(u)?;
    Ok(sncndn(u, kappa))
}

/// Jacobi amplitude, continuous in `u`: `sin(am u) = sn u`, `am(u + 4K) = am(u) + 2 pi`.
pub fn jacobi_am(u: f64, kappa: f64) -> Result<f64> {
    check_modulus(kappa)?;
    check_arg(u)?;
    Ok(am_unchecked(u, kappa))
}

/// Jacobi's epsilon function `int_0^u dn^2(v) dv = E(am u, kappa)`.
pub fn jacobi_epsilon(u: f64, kappa: f64) -> Result<f64> {
    check_modulus(kappa)?;
    check_arg(u)?;
    Ok(epsilon_unchecked(u, kappa))
}

/// Jacobi zeta function `Z(u) = eps(u) - u E/K`, for `kappa < 1`.
pub fn jacobi_zeta(u: f64, kappa: f64) -> Result<f64> {
    let k = complete_k(kappa)?;
    check_arg(u)?;
    Ok(epsilon_unchecked(u, kappa) - u * e_unchecked(kappa) / k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        assert!(close(complete_k(0.0).unwrap(), FRAC_PI_2, 1e-15));
    }

    #[test]
    fn k_rejects_one_and_negative() {
        assert!(complete_k(1.0).is_err());
        assert!(complete_k(-0.1).is_err());
        assert!(complete_k(1.2).is_err());
    }

    #[test]
    fn quarter_period() {
        for &k in &[0.1, 0.5, 0.8, 0.9, 0.99] {
            let kk = complete_k(k).unwrap();
            let (s, c, d) = jacobi_sncndn(kk, k).unwrap();
            assert!(close(s, 1.0, 1e-12));
            assert!(close(c, 0.0, 1e-12));
            assert!(close(d, (1.0 - k * k).sqrt(), 1e-12));
            assert!(close(jacobi_am(kk, k).unwrap(), FRAC_PI_2, 1e-12));
        }
    }

    #[test]
    fn degenerate_modulus_zero() {
        for &u in &[-3.0, -0.2, 0.0, 0.7, 5.5] {
            let (s, c, d) = jacobi_sncndn(u, 0.0).unwrap();
            assert_eq!((s, c, d), (u.sin(), u.cos(), 1.0));
            assert_eq!(jacobi_am(u, 0.0).unwrap(), u);
            assert_eq!(jacobi_epsilon(u, 0.0).unwrap(), u);
        }
    }

    #[test]
    fn modulus_one_is_hyperbolic() {
        let mut u = -5.0;
        while u <= 5.0 {
            let (s, c, d) = jacobi_sncndn(u, 1.0).unwrap();
            assert!(close(s, u.tanh(), 1e-10));
            assert!(close(c, 1.0 / u.cosh(), 1e-10));
            assert!(close(d, 1.0 / u.cosh(), 1e-10));
            assert!(close(jacobi_am(u, 1.0).unwrap().sin(), s, 1e-12));
            u += 0.25;
        }
    }

    #[test]
    fn near_one_approaches_hyperbolic() {
        let k = 1.0 - 1e-12;
        for &u in &[-2.0, 0.5, 3.0] {
            let (s, c, d) = jacobi_sncndn(u, k).unwrap();
            assert!(close(s, u.tanh(), 1e-9));
            assert!(close(c, 1.0 / u.cosh(), 1e-9));
            assert!(close(d, 1.0 / u.cosh(), 1e-9));
        }
    }

    #[test]
    fn non_finite_argument_rejected() {
        assert!(jacobi_sncndn(f64::NAN, 0.5).is_err());
        assert!(jacobi_am(f64::INFINITY, 0.5).is_err());
        assert!(jacobi_epsilon(f64::NEG_INFINITY, 0.5).is_err());
    }

    #[test]
    fn am_consistent_with_sn() {
        let v = jacobi_am(0.5, 0.7).unwrap();
        let (s, c, _) = jacobi_sncndn(0.5, 0.7).unwrap();
        assert!(close(v.sin(), s, 1e-13));
        assert!(close(v.cos(), c, 1e-13));
    }

    #[test]
    fn am_is_continuous_across_periods() {
        let k = 0.95;
        let kk = complete_k(k).unwrap();
        let h = 1e-3;
        let mut u = -9.0 * kk;
        let mut prev = jacobi_am(u, k).unwrap();
        while u < 9.0 * kk {
            u += h;
            let cur = jacobi_am(u, k).unwrap();
            // am' = dn <= 1
            assert!((cur - prev).abs() < 1.001 * h, "jump at u={u}");
            assert!(cur > prev);
            prev = cur;
        }
        assert!(close(jacobi_am(4.0 * kk, k).unwrap(), 2.0 * PI, 1e-11));
    }

    #[test]
    fn epsilon_at_quarter_period_is_complete_e() {
        for &k in &[0.3, 0.8, 0.9] {
            let kk = complete_k(k).unwrap();
            let e = complete_e(k).unwrap();
            assert!(close(jacobi_epsilon(kk, k).unwrap(), e, 1e-13));
            assert!(close(jacobi_epsilon(6.0 * kk, k).unwrap(), 6.0 * e, 1e-12));
        }
        assert_eq!(jacobi_epsilon(0.0, 0.6).unwrap(), 0.0);
    }

    #[test]
    fn epsilon_derivative_is_dn_squared() {
        let (u, k, h) = (0.7, 0.6, 1e-5);
        let fd = (jacobi_epsilon(u + h, k).unwrap() - jacobi_epsilon(u - h, k).unwrap()) / (2.0 * h);
        let d = jacobi_sncndn(u, k).unwrap().2;
        assert!(close(fd, d * d, 1e-6));
    }

    #[test]
    fn incomplete_f_inverts_am() {
        for &k in &[0.0, 0.4, 0.9] {
            for &u in &[0.1, 0.9, 1.5] {
                let phi = jacobi_am(u, k).unwrap();
                assert!(close(incomplete_f(phi, k).unwrap(), u, 1e-13));
            }
        }
    }

    #[test]
    fn zeta_vanishes_at_quarter_and_half_period() {
        let k = 0.8;
        let kk = complete_k(k).unwrap();
        assert!(jacobi_zeta(kk, k).unwrap().abs() < 1e-13);
        assert!(jacobi_zeta(2.0 * kk, k).unwrap().abs() < 1e-13);
    }

    #[test]
    fn carlson_special_values() {
        // R_F(x,x,x) = x^{-1/2}, R_D(x,x,x) = x^{-3/2}
        assert!(close(carlson_rf(4.0, 4.0, 4.0), 0.5, 1e-15));
        assert!(close(carlson_rd(4.0, 4.0, 4.0), 0.125, 1e-15));
        // R_F(0,1,1) = pi/2
        assert!(close(carlson_rf(0.0, 1.0, 1.0), FRAC_PI_2, 1e-15));
    }
}
