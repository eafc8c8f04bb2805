//! Momentum-space stability: transverse-helix dispersion and scaling
//! function, multi-flavour Bloch matrices, dynamical matrices, Lyapunov
//! exponents and the stability phase scan.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::elliptic::{k_unchecked, sncndn};
use crate::error::{domain, Error, Result};
use crate::linalg::{self, c, CMat, RMat};
use crate::quad::GaussLegendre;
use crate::spinwave::{ContrastSeries, SpinWaveCoefficients};
use crate::C64;

// ---------------------------------------------------------------------------
// transverse helix, single flavour

/// Dispersion data of the transverse helix at one `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMode {
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    pub omega_sw: C64,
    /// `S`-independent dispersion; upper-half-plane branch where imaginary.
    pub w_tilde: C64,
}

fn sign0(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn b_of_k(k: f64, q: f64, theta: f64, dz: f64, s: f64) -> f64 {
    let st2 = theta.sin().powi(2);
    s * (st2 * k.cos() * dz - 4.0 * q.cos() * (0.5 * k).sin().powi(2) - 2.0 * theta.cos() * q.sin() * k.sin())
}

/// Radicand `2 (cos q + sin^2 theta dJz) sin^2(k/2) - sin^2 theta dJz`.
fn radicand(k: f64, q: f64, theta: f64, dz: f64) -> f64 {
    let st2 = theta.sin().powi(2);
    2.0 * (q.cos() + st2 * dz) * (0.5 * k).sin().powi(2) - st2 * dz
}

pub fn w_tilde(k: f64, q: f64, theta: f64, dz: f64) -> C64 {
    let pre = 2.0 * (2.0 * q.cos()).sqrt() * (0.5 * k).sin();
    let w = c(radicand(k, q, theta, dz), 0.0).sqrt() * pre;
    if w.im < 0.0 {
        -w
    } else {
        w
    }
}

pub fn transverse_dispersion(k: f64, q: f64, theta: f64, dz: f64, s: f64) -> TransverseMode {
    let a = s * theta.sin().powi(2) * k.cos() * dz;
    let b = b_of_k(k, q, theta, dz, s);
    let bm = b_of_k(-k, q, theta, dz, s);
    let (bp, bn) = (b + bm, b - bm);
    let root = c(bp * bp - 4.0 * a * a, 0.0).sqrt();
    TransverseMode {
        k,
        a,
        b,
        b_plus: bp,
        b_minus: bn,
        omega_sw: (c(bn, 0.0) + root * sign0(bp)) * 0.5,
        w_tilde: w_tilde(k, q, theta, dz),
    }
}

/// Which end of the zone carries the imaginary window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowSide {
    /// `dJz > 0`: window `(-k_*, k_*)` about `k = 0`.
    Centre,
    /// `dJz < -2 cos q / sin^2 theta`: window about `k = pi`, `|k| > k_*`.
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstabilityWindow {
    pub side: WindowSide,
    /// Boundary where `w_tilde` vanishes.
    pub k_star: f64,
    /// Maximizer of `b_1 = Im w_tilde` inside the window.
    pub k_max: f64,
    pub b1_max: f64,
}

/// `b_1(k) = Im w_tilde(k)`, the growth rate per unit `S` of mode `k`.
pub fn b1(k: f64, q: f64, theta: f64, dz: f64) -> f64 {
    w_tilde(k, q, theta, dz).im
}

fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Imaginary window of `w_tilde`, or `None` inside the stable window
/// `-2 cos q / sin^2 theta <= dJz <= 0`.
pub fn instability_window(q: f64, theta: f64, dz: f64) -> Result<Option<InstabilityWindow>> {
    if !(q > 0.0 && q < 0.5 * PI) {
        return Err(domain("need 0 < q < pi/2"));
    }
    let st2 = theta.sin().powi(2);
    if st2 < 1e-300 || !dz.is_finite() {
        return Err(domain("need 0 < theta < pi and finite dJz"));
    }
    let x = st2 * dz / (2.0 * (q.cos() + st2 * dz));
    let f = |k: f64| b1(k, q, theta, dz);
    if dz > 0.0 {
        let ks = 2.0 * x.sqrt().asin();
        let km = golden_max(0.0, ks, f);
        Ok(Some(InstabilityWindow { side: WindowSide::Centre, k_star: ks, k_max: km, b1_max: f(km) }))
    } else if dz < -2.0 * q.cos() / st2 {
        // here x > 1 is impossible and the imaginary part grows toward the edge
        let ks = 2.0 * x.min(1.0).sqrt().asin();
        let km = golden_max(ks, PI, f);
        let (km, bm) = if f(PI) >= f(km) { (PI, f(PI)) } else { (km, f(km)) };
        Ok(Some(InstabilityWindow { side: WindowSide::Edge, k_star: ks, k_max: km, b1_max: bm }))
    } else {
        Ok(None)
    }
}

/// `sin^2(x)/x^2`, continued to imaginary `x` (`sinh^2`), with a series near 0.
fn sinc2(x: C64) -> C64 {
    if x.norm() < 1e-4 {
        let x2 = x * x;
        c(1.0, 0.0) - x2 / 3.0 + x2 * x2 * (2.0 / 45.0)
    } else {
        let s = x.sin() / x;
        s * s
    }
}

fn f_integrand(k: f64, tau: f64, q: f64, theta: f64, dz: f64) -> f64 {
    let at = theta.sin().powi(2) * k.cos() * dz;
    let w = w_tilde(k, q, theta, dz);
    (sinc2(w * tau) * (at * at * tau * tau)).re
}

/// Scaling function `f(tau) = (1/2pi) int dk (A_k/S)^2 sin^2(w_k tau) / w_k^2`.
///
/// The integrand is even in `k`; `[0, pi]` is split at the window edge and
/// integrated with Gauss-Legendre panels, doubled until two successive
/// estimates agree.
pub fn scaling_function(tau: f64, q: f64, theta: f64, dz: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(domain("tau must be non-negative"));
    }
    let window = instability_window(q, theta, dz)?;
    let mut cuts = alloc::vec![0.0];
    if let Some(w) = window {
        if w.k_star > 0.0 && w.k_star < PI {
            cuts.push(w.k_star);
        }
        if w.k_max > 0.0 && w.k_max < PI && (w.k_max - w.k_star).abs() > 1e-12 {
            cuts.push(w.k_max);
        }
    }
    cuts.push(PI);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let g = GaussLegendre::new(16);
    let integrate = |panels_per_unit: f64| -> f64 {
        cuts.windows(2)
            .map(|ab| {
                let n = ((ab[1] - ab[0]) * panels_per_unit).ceil().max(4.0) as usize;
                g.composite(ab[0], ab[1], n, |k| f_integrand(k, tau, q, theta, dz))
            })
            .sum::<f64>()
            / PI
    };
    // integrand oscillates in k with frequency ~ 2 tau |dw/dk| <= 2 tau * 4
    let mut density = 8.0 + 2.0 * tau;
    let mut prev = integrate(density);
    for _ in 0..8 {
        density *= 2.0;
        let next = integrate(density);
        if (next - prev).abs() <= 1e-11 * next.abs().max(1e-3) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(alloc::format!(
        "scaling function did not converge at tau = {tau}; increase the k-panel density"
    )))
}

/// Late-time rates of the contrast decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rates {
    /// Linear decay `1 - D ~ gamma_1 t`.
    Stable { gamma1: f64 },
    /// Exponential growth `~ exp(gamma_2 t)`.
    Unstable { gamma2: f64, gamma2_perturbative: f64, k_max: f64 },
}

pub fn gamma1(q: f64, theta: f64, dz: f64) -> f64 {
    theta.sin().powi(3) / (2.0 * 2f64.sqrt() * q.cos().sqrt()) * dz.abs().powf(1.5)
}

pub fn rates(q: f64, theta: f64, dz: f64, s: f64) -> Result<Rates> {
    let st2 = theta.sin().powi(2);
    if dz > 0.0 {
        let w = instability_window(q, theta, dz)?.expect("dJz > 0 always has a window");
        Ok(Rates::Unstable { gamma2: 2.0 * s * w.b1_max, gamma2_perturbative: 2.0 * s * st2 * dz, k_max: w.k_max })
    } else if instability_window(q, theta, dz).is_ok() && dz > -q.cos() / st2 {
        Ok(Rates::Stable { gamma1: gamma1(q, theta, dz) })
    } else {
        Err(domain("dJz lies outside both asymptotic branches"))
    }
}

// ---------------------------------------------------------------------------
// multi-flavour unit cells

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Generalized transverse helix, perturbed by `dJz`.
    Gtsh,
    /// Generalized longitudinal helix, perturbed by `dJx`.
    Glsh,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gtsh => "gtsh",
            Family::Glsh => "glsh",
        }
    }
}

/// One unit cell of `lambda` flavours. Bond `sigma` joins flavour `sigma` to
/// `sigma + 1`; bond `lambda - 1` reaches into the next cell.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCell {
    pub s: f64,
    pub eta: Vec<C64>,
    pub zeta: Vec<C64>,
    pub v: Vec<f64>,
}

/// Bloch matrices of one cell at quasimomentum `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMatrixPair {
    pub k: f64,
    pub a: CMat,
    pub b: CMat,
}

impl BlochMatrixPair {
    pub fn lambda(&self) -> usize {
        self.a.nrows()
    }

    /// Hermiticity defect of `A` and `B`.
    pub fn hermiticity_defect(&self) -> f64 {
        let da = linalg::max_abs_diff(&self.a, &self.a.adjoint().to_owned());
        let db = linalg::max_abs_diff(&self.b, &self.b.adjoint().to_owned());
        da.max(db)
    }
}

/// Unit cell size `4 K(kappa) / q` if it is an integer.
pub fn commensurate_lambda(kappa: f64, q: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&kappa) || !(q > 0.0) {
        return Err(domain("need 0 <= kappa < 1 and q > 0"));
    }
    let lam = 4.0 * k_unchecked(kappa) / q;
    let r = lam.round();
    if (lam - r).abs() > 1e-9 * lam || r < 1.0 {
        return Err(domain(alloc::format!("4K/q = {lam} is not an integer")));
    }
    Ok(r as usize)
}

/// Onsite potential of both elliptic families,
/// `V_j = -2 S cn q dn q / (1 - kappa^2 sn^2(q j) sn^2 q)`.
pub fn onsite_potential(kappa: f64, q: f64, s: f64, n: usize) -> Vec<f64> {
    let (sq, cq, dq) = sncndn(q, kappa);
    (0..n)
        .map(|j| {
            let su = sncndn(q * j as f64, kappa).0;
            -2.0 * s * cq * dq / (1.0 - kappa * kappa * su * su * sq * sq)
        })
        .collect()
}

impl UnitCell {
    pub fn lambda(&self) -> usize {
        self.v.len()
    }

    /// Multi-flavour cell of a perturbed elliptic helix. `delta` is `dJz`
    /// for [`Family::Gtsh`] and `dJx` for [`Family::Glsh`].
    pub fn multiflavour(family: Family, kappa: f64, q: f64, delta: f64, s: f64) -> Result<Self> {
        let lam = commensurate_lambda(kappa, q)?;
        if !(q < k_unchecked(kappa)) {
            return Err(domain("need q < K(kappa), i.e. lambda > 4"));
        }
        let (_, cq, dq) = sncndn(q, kappa);
        let hop = match family {
            Family::Gtsh => cq,
            Family::Glsh => dq,
        };
        let eta = c(0.5 * s * (2.0 * hop + delta), 0.0);
        let zeta = c(0.5 * s * delta, 0.0);
        Ok(Self { s, eta: alloc::vec![eta; lam], zeta: alloc::vec![zeta; lam], v: onsite_potential(kappa, q, s, lam) })
    }

    pub fn multiflavour_lambda(family: Family, kappa: f64, lambda: usize, delta: f64, s: f64) -> Result<Self> {
        if lambda < 5 {
            return Err(domain("need lambda >= 5"));
        }
        Self::multiflavour(family, kappa, 4.0 * k_unchecked(kappa) / lambda as f64, delta, s)
    }

    /// Transverse helix as a one-flavour problem.
    pub fn transverse(q: f64, theta: f64, dz: f64, s: f64) -> Self {
        let st2 = theta.sin().powi(2);
        Self {
            s,
            eta: alloc::vec![c(0.5 * s * (2.0 * q.cos() + st2 * dz), -s * theta.cos() * q.sin())],
            zeta: alloc::vec![c(0.5 * s * st2 * dz, 0.0)],
            v: alloc::vec![-2.0 * s * q.cos()],
        }
    }

    /// First `lambda` sites of real-space coefficients that are periodic with that period.
    pub fn from_coefficients(co: &SpinWaveCoefficients, lambda: usize) -> Result<Self> {
        if lambda == 0 || co.len() % lambda != 0 {
            return Err(domain("ring length must be a multiple of the cell size"));
        }
        Ok(Self {
            s: co.s,
            eta: co.eta[..lambda].to_vec(),
            zeta: co.zeta[..lambda].to_vec(),
            v: co.v[..lambda].to_vec(),
        })
    }

    /// Hopping and pairing all real: then `B_{-k} = B_k*` and `A_{-k} = A_k*`.
    pub fn is_real(&self) -> bool {
        self.eta.iter().chain(&self.zeta).all(|z| z.im == 0.0)
    }

    pub fn bloch(&self, k: f64) -> BlochMatrixPair {
        let lam = self.lambda();
        let mut a = CMat::zeros(lam, lam);
        let mut b = CMat::zeros(lam, lam);
        let out = C64::from_polar(1.0, k);
        let back = out.conj();
        for sg in 0..lam {
            let (prev, wrap_prev) = if sg == 0 { (lam - 1, back) } else { (sg - 1, c(1.0, 0.0)) };
            let (next, wrap_next) = if sg == lam - 1 { (0, out) } else { (sg + 1, c(1.0, 0.0)) };
            b[(sg, sg)] += c(self.v[sg], 0.0);
            b[(sg, prev)] += self.eta[prev] * wrap_prev;
            b[(sg, next)] += self.eta[sg].conj() * wrap_next;
            a[(sg, prev)] += self.zeta[prev] * wrap_prev;
            a[(sg, next)] += self.zeta[sg] * wrap_next;
        }
        BlochMatrixPair { k, a, b }
    }

    /// `C_k = [[B_k, A_k], [-A_{-k}*, -B_{-k}*]]` acting on `(a_k, a+_{-k})`.
    pub fn generator(&self, k: f64) -> CMat {
        let p = self.bloch(k);
        let m = self.bloch(-k);
        let lam = self.lambda();
        CMat::from_fn(2 * lam, 2 * lam, |i, j| match (i < lam, j < lam) {
            (true, true) => p.b[(i, j)],
            (true, false) => p.a[(i, j - lam)],
            (false, true) => -m.a[(i - lam, j)].conj(),
            (false, false) => -m.b[(i - lam, j - lam)].conj(),
        })
    }

    /// Largest growth rate `max Im spec(C_k)` at one `k`.
    pub fn growth_at(&self, k: f64) -> Result<f64> {
        if self.is_real() {
            // C_k = [[B, A], [-A, -B]] squares to blocks (B - A)(B + A)
            let p = self.bloch(k);
            let prod = &(&p.b - &p.a) * &(&p.b + &p.a);
            let mu = linalg::eigenvalues(&prod)?;
            Ok(mu.iter().map(|m| m.sqrt().im.abs()).fold(0.0, f64::max))
        } else {
            let ev = linalg::eigenvalues(&self.generator(k))?;
            Ok(ev.iter().map(|z| z.im).fold(0.0, f64::max))
        }
    }
}

/// Real dynamical matrix for general `k`, from the Bloch matrices at `k`
/// and `-k`, acting on `(q_k, q_-k, p_k, p_-k)`.
///
/// With real hopping and pairing (`B_{-k} = B_k*`) this reduces to the
/// familiar block form in `Re`/`Im` parts of `A_k`, `B_k` alone.
pub fn dynamical_matrix_general(plus: &BlochMatrixPair, minus: &BlochMatrixPair) -> RMat {
    let lam = plus.lambda();
    let (b, a, bm, am) = (&plus.b, &plus.a, &minus.b, &minus.a);
    let blk = |row: usize, col: usize, i: usize, j: usize| -> f64 {
        let (br, bi) = (b[(i, j)].re, b[(i, j)].im);
        let (ar, ai) = (a[(i, j)].re, a[(i, j)].im);
        let (mbr, mbi) = (bm[(i, j)].re, bm[(i, j)].im);
        let (mar, mai) = (am[(i, j)].re, am[(i, j)].im);
        match (row, col) {
            (0, 0) => bi,
            (0, 1) => ai,
            (0, 2) => br,
            (0, 3) => -ar,
            (1, 0) => mai,
            (1, 1) => mbi,
            (1, 2) => -mar,
            (1, 3) => mbr,
            (2, 0) => -br,
            (2, 1) => -ar,
            (2, 2) => bi,
            (2, 3) => -ai,
            (3, 0) => -mar,
            (3, 1) => -mbr,
            (3, 2) => -mai,
            _ => mbi,
        }
    };
    RMat::from_fn(4 * lam, 4 * lam, |i, j| blk(i / lam, j / lam, i % lam, j % lam))
}

/// `2 lambda` form at the self-conjugate momenta `k = 0, pi`.
pub fn dynamical_matrix_symmetric(pair: &BlochMatrixPair) -> RMat {
    let lam = pair.lambda();
    let (b, a) = (&pair.b, &pair.a);
    RMat::from_fn(2 * lam, 2 * lam, |i, j| {
        let (r, cc) = (i % lam, j % lam);
        let (p, m) = (b[(r, cc)] + a[(r, cc)], b[(r, cc)] - a[(r, cc)]);
        match (i < lam, j < lam) {
            (true, true) => p.im,
            (true, false) => m.re,
            (false, true) => -p.re,
            (false, false) => m.im,
        }
    })
}

fn is_self_conjugate(k: f64) -> bool {
    let r = num_traits::Euclid::rem_euclid(&k, &(2.0 * PI));
    r < 1e-12 || (r - PI).abs() < 1e-12 || (2.0 * PI - r) < 1e-12
}

/// `D_k` for a cell at `k`: `2 lambda` square at `k = 0, pi`, else `4 lambda`.
pub fn dynamical_matrix(cell: &UnitCell, k: f64) -> RMat {
    if is_self_conjugate(k) && cell.is_real() {
        dynamical_matrix_symmetric(&cell.bloch(k))
    } else {
        dynamical_matrix_general(&cell.bloch(k), &cell.bloch(-k))
    }
}

/// Stability threshold on `max Re spec(D_k)`.
pub fn stability_threshold(s: f64) -> f64 {
    1e-6 * s
}

/// Uniform grid `k_n = -pi + 2 pi n / nk`.
pub fn k_grid(nk: usize) -> Vec<f64> {
    (0..nk).map(|n| -PI + 2.0 * PI * n as f64 / nk as f64).collect()
}

/// `max_k max Re spec(D_k)` over the uniform `nk`-point grid.
///
/// For real cells `spec(C_{-k}) = conj spec(C_k)` and the `k >= 0` half of
/// the grid suffices.
pub fn lyapunov_max(cell: &UnitCell, nk: usize) -> Result<f64> {
    lyapunov_scan(cell, nk, None)
}

/// As [`lyapunov_max`], stopping early once `stop_above` is exceeded.
pub fn lyapunov_scan(cell: &UnitCell, nk: usize, stop_above: Option<f64>) -> Result<f64> {
    if nk == 0 {
        return Err(domain("need at least one k-point"));
    }
    let real = cell.is_real();
    let mut best: f64 = 0.0;
    for k in k_grid(nk) {
        if real && k < 0.0 && !is_self_conjugate(k) {
            continue;
        }
        best = best.max(cell.growth_at(k)?);
        if stop_above.is_some_and(|t| best > t) {
            break;
        }
    }
    Ok(best)
}

pub fn lyapunov_max_family(family: Family, kappa: f64, q: f64, delta: f64, s: f64, nk: usize) -> Result<f64> {
    lyapunov_max(&UnitCell::multiflavour(family, kappa, q, delta, s)?, nk)
}

/// Contrast `1 - (1/(N_k lambda S)) sum_k sum |U_k(t)_{sigma, lambda + sigma'}|^2`.
pub fn contrast_multiflavour(cell: &UnitCell, dt: f64, steps: usize, nk: usize) -> Result<ContrastSeries> {
    if !(dt > 0.0) || nk == 0 {
        return Err(domain("need dt > 0 and nk >= 1"));
    }
    let lam = cell.lambda();
    let mut pops = alloc::vec![0.0; steps + 1];
    for k in k_grid(nk) {
        let gen = cell.generator(k);
        let step = crate::spinwave::propagator(&gen, dt)?;
        let mut w = CMat::from_fn(2 * lam, lam, |i, j| if i == j + lam { c(1.0, 0.0) } else { c(0.0, 0.0) });
        for p in pops.iter_mut().skip(1) {
            w = &step * &w;
            let mut n = 0.0;
            for col in 0..lam {
                for row in 0..lam {
                    n += w[(row, col)].norm_sqr();
                }
            }
            *p += n;
        }
    }
    let norm = 1.0 / (nk as f64 * lam as f64 * cell.s);
    let times = (0..=steps).map(|n| n as f64 * dt).collect();
    let d = pops.iter().map(|p| 1.0 - p * norm).collect();
    Ok(ContrastSeries::from_d(cell.s, times, d))
}

// ---------------------------------------------------------------------------
// phase scan

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseClass {
    SS,
    SU,
    US,
    UU,
}

impl PhaseClass {
    /// First letter: `delta < 0`; second: `delta > 0`.
    pub fn from_flags(unstable_minus: bool, unstable_plus: bool) -> Self {
        match (unstable_minus, unstable_plus) {
            (false, false) => PhaseClass::SS,
            (false, true) => PhaseClass::SU,
            (true, false) => PhaseClass::US,
            (true, true) => PhaseClass::UU,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PhaseClass::SS => "S-S",
            PhaseClass::SU => "S-U",
            PhaseClass::US => "U-S",
            PhaseClass::UU => "U-U",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub kappa: f64,
    pub lambda: usize,
    pub q: f64,
    pub class: PhaseClass,
    pub lyap_minus: f64,
    pub lyap_plus: f64,
}

/// Classify one `(kappa, lambda)` by the Lyapunov exponents at `-|delta|`
/// and `+|delta|`. With `early_exit` each k-scan stops once instability
/// is established, so the reported exponent is then only a lower bound.
pub fn phase_scan_point(
    family: Family,
    kappa: f64,
    lambda: usize,
    delta: f64,
    s: f64,
    nk: usize,
    early_exit: bool,
) -> Result<PhasePoint> {
    let thr = stability_threshold(s);
    let stop = early_exit.then_some(thr);
    let d = delta.abs();
    let minus = UnitCell::multiflavour_lambda(family, kappa, lambda, -d, s)?;
    let plus = UnitCell::multiflavour_lambda(family, kappa, lambda, d, s)?;
    let lm = lyapunov_scan(&minus, nk, stop)?;
    let lp = lyapunov_scan(&plus, nk, stop)?;
    Ok(PhasePoint {
        kappa,
        lambda,
        q: 4.0 * k_unchecked(kappa) / lambda as f64,
        class: PhaseClass::from_flags(lm > thr, lp > thr),
        lyap_minus: lm,
        lyap_plus: lp,
    })
}
