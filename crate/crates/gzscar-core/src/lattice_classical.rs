//! Discrete Landau-Lifshitz dynamics `dOmega_j/dt = S J (Omega_{j-1} + Omega_{j+1}) x Omega_j`
//! on a ring, traveling-wave conditions, and a twin-trajectory Lyapunov estimate.

use alloc::vec::Vec;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elliptic::sncndn;
use crate::error::{domain, Error, Result};
use crate::scars::{self, SpinTexture};
use crate::linalg::RMat;
use crate::rotframe::{stationarity_residual, FrameData};
use crate::vec3::{self, Mat3, Vec3};

/// Norm drift beyond which integration is aborted.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalTrajectory {
    pub times: Vec<f64>,
    pub textures: Vec<SpinTexture>,
    /// `S sum_j Omega_j . J Omega_{j+1}`.
    pub energy: Vec<f64>,
    /// Largest `| |Omega_j| - 1 |` seen at any step.
    pub max_norm_drift: f64,
}

impl ClassicalTrajectory {
    pub fn relative_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        let scale = e0.abs().max(1e-300);
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / scale
    }

    pub fn last(&self) -> &SpinTexture {
        self.textures.last().expect("trajectory always holds the initial state")
    }
}

fn rhs(w: &[Vec3], j: &Mat3, s: f64, out: &mut [Vec3]) {
    let l = w.len();
    for i in 0..l {
        let nb = vec3::add(w[(i + l - 1) % l], w[(i + 1) % l]);
        out[i] = vec3::cross(vec3::scale(s, vec3::matvec(*j, nb)), w[i]);
    }
}

/// Classical RK4 step in place; `k*` and `tmp` are scratch buffers of length `L`.
struct Stepper {
    k1: Vec<Vec3>,
    k2: Vec<Vec3>,
    k3: Vec<Vec3>,
    k4: Vec<Vec3>,
    tmp: Vec<Vec3>,
}

impl Stepper {
    fn new(l: usize) -> Self {
        let z = alloc::vec![[0.0; 3]; l];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    fn step(&mut self, w: &mut [Vec3], j: &Mat3, s: f64, dt: f64) {
        let l = w.len();
        rhs(w, j, s, &mut self.k1);
        for i in 0..l {
            self.tmp[i] = vec3::add(w[i], vec3::scale(0.5 * dt, self.k1[i]));
        }
        rhs(&self.tmp, j, s, &mut self.k2);
        for i in 0..l {
            self.tmp[i] = vec3::add(w[i], vec3::scale(0.5 * dt, self.k2[i]));
        }
        rhs(&self.tmp, j, s, &mut self.k3);
        for i in 0..l {
            self.tmp[i] = vec3::add(w[i], vec3::scale(dt, self.k3[i]));
        }
        rhs(&self.tmp, j, s, &mut self.k4);
        for i in 0..l {
            let inc = vec3::add(
                vec3::add(self.k1[i], vec3::scale(2.0, self.k2[i])),
                vec3::add(vec3::scale(2.0, self.k3[i]), self.k4[i]),
            );
            w[i] = vec3::add(w[i], vec3::scale(dt / 6.0, inc));
        }
    }
}

fn norm_drift(w: &[Vec3]) -> f64 {
    w.iter().map(|v| (vec3::norm(*v) - 1.0).abs()).fold(0.0, f64::max)
}

fn energy(w: &[Vec3], j: &Mat3, s: f64) -> f64 {
    s * scars::bond_energy_sum(&SpinTexture::new_unchecked(w.to_vec()), j)
}

/// Integrate from `initial` for time `t_final` with fixed step `dt` (RK4),
/// storing every `record_every`-th step. The final state is always stored.
///
/// Norms are monitored but never projected back to 1; exceeding
/// [`MAX_NORM_DRIFT`] is an error.
pub fn ll_evolve(
    initial: &SpinTexture,
    j: &Mat3,
    s: f64,
    dt: f64,
    t_final: f64,
    record_every: usize,
) -> Result<ClassicalTrajectory> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(domain("need dt > 0 and T >= 0"));
    }
    if initial.max_norm_defect() > 1e-12 {
        return Err(domain("initial texture must be unit norm"));
    }
    let record_every = record_every.max(1);
    let steps = (t_final / dt).round() as usize;
    let mut w = initial.omegas.clone();
    let mut st = Stepper::new(w.len());
    let mut out = ClassicalTrajectory {
        times: alloc::vec![0.0],
        textures: alloc::vec![initial.clone()],
        energy: alloc::vec![energy(&w, j, s)],
        max_norm_drift: 0.0,
    };
    for n in 1..=steps {
        st.step(&mut w, j, s, dt);
        let d = norm_drift(&w);
        out.max_norm_drift = out.max_norm_drift.max(d);
        if !(d <= MAX_NORM_DRIFT) {
            return Err(Error::Integration(alloc::format!(
                "norm drift {d:.3e} at t = {:.6}; reduce dt",
                n as f64 * dt
            )));
        }
        if n % record_every == 0 || n == steps {
            out.times.push(n as f64 * dt);
            out.textures.push(SpinTexture::new_unchecked(w.clone()));
            out.energy.push(energy(&w, j, s));
        }
    }
    Ok(out)
}

/// Default step: frequencies grow linearly in `S`.
pub fn default_dt(s: f64) -> f64 {
    1e-3 / s
}

/// Site-resolved residuals (left minus right) of the three conditions for
/// the elliptic traveling wave `(alpha cn, beta sn, gamma dn)(q j - omega t)`
/// to solve the dynamics with perturbations `dj = (dJx, dJy, dJz)` of the
/// parent couplings. Returned as `(r1, r2, r3)` for sites `0..l` at time `t`.
#[allow(clippy::too_many_arguments)]
pub fn traveling_wave_residuals(
    kappa: f64,
    q: f64,
    gamma: f64,
    omega: f64,
    dj: Vec3,
    s: f64,
    l: usize,
    t: f64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let alpha = (1.0 - gamma * gamma).max(0.0).sqrt();
    let beta = (1.0 - gamma * gamma * (1.0 - kappa * kappa)).max(0.0).sqrt();
    let (sq, cq, dq) = sncndn(q, kappa);
    let k2 = kappa * kappa;
    let [dx, dy, dz] = dj;
    let mut r1 = Vec::with_capacity(l);
    let mut r2 = Vec::with_capacity(l);
    let mut r3 = Vec::with_capacity(l);
    for site in 0..l {
        let (su, _, _) = sncndn(q * site as f64 - omega * t, kappa);
        let den = 1.0 - k2 * su * su * sq * sq;
        r1.push(2.0 * s * beta * gamma * (dy * cq - dz) * dq / den - alpha * omega);
        r2.push(2.0 * s * alpha * gamma * (dx * cq - dz * dq) / den - beta * omega);
        r3.push(2.0 * s * alpha * beta * (dx - dy * dq) / den - gamma * k2 * omega);
    }
    (r1, r2, r3)
}

/// Outcome of a twin-trajectory Lyapunov run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    /// Fitted growth rate, or 0 when no exponential window was found.
    pub rate: f64,
    /// Raw least-squares slope of the log-separation on the fit window.
    pub slope: f64,
    /// Number of e-folds accumulated over the fit window.
    pub efolds: f64,
    /// `false` means the separation did not grow exponentially (stable or marginal).
    pub unstable: bool,
    /// Largest `|Omega_j(t) - Omega_j(0)|` of the reference trajectory. For a
    /// stationary initial state this bounds how far the estimate left the
    /// linear regime.
    pub reference_excursion: f64,
}

/// Settings for [`classical_lyapunov`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovConfig {
    pub eps0: f64,
    pub t_final: f64,
    pub dt: f64,
    /// Time between renormalizations of the separation.
    pub renorm_every: f64,
    pub seed: u64,
}

impl LyapunovConfig {
    pub fn new(s: f64, t_final: f64) -> Self {
        Self { eps0: 1e-7, t_final, dt: default_dt(s), renorm_every: 1.0 / s, seed: 0x5eed }
    }
}

/// Minimum e-folds over the fit window for an estimate to count as
/// exponential growth. Linear (secular) growth of the separation gives
/// at most `ln 5` over a window starting at 20% of the run, quadratic
/// growth `2 ln 5`; four e-folds excludes both.
pub const MIN_EFOLDS: f64 = 4.0;

/// Largest Lyapunov exponent by Benettin's twin-trajectory method.
///
/// The first 20% of the run is discarded; the rate is the least-squares
/// slope of the accumulated log-separation on the remainder.
pub fn classical_lyapunov(initial: &SpinTexture, j: &Mat3, s: f64, cfg: &LyapunovConfig) -> Result<LyapunovEstimate> {
    if !(cfg.eps0 > 0.0 && cfg.eps0 <= 1e-6) {
        return Err(domain("eps0 must lie in (0, 1e-6]"));
    }
    if !(cfg.dt > 0.0 && cfg.renorm_every >= cfg.dt && cfg.t_final > cfg.renorm_every) {
        return Err(domain("need 0 < dt <= renormalization interval < T"));
    }
    let l = initial.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut a = initial.omegas.clone();
    let mut b: Vec<Vec3> = a
        .iter()
        .map(|w| {
            let r = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            vec3::sub(r, vec3::scale(vec3::dot(r, *w), *w))
        })
        .collect();
    let n0 = b.iter().map(|v| vec3::dot(*v, *v)).sum::<f64>().sqrt();
    for i in 0..l {
        let v = vec3::add(a[i], vec3::scale(cfg.eps0 / n0, b[i]));
        b[i] = vec3::scale(1.0 / vec3::norm(v), v);
    }
    let sub = (cfg.renorm_every / cfg.dt).round().max(1.0) as usize;
    let h = cfg.renorm_every / sub as f64;
    let blocks = (cfg.t_final / cfg.renorm_every).round() as usize;
    let mut sa = Stepper::new(l);
    let mut sb = Stepper::new(l);
    let mut times = Vec::with_capacity(blocks);
    let mut logs = Vec::with_capacity(blocks);
    let mut acc = 0.0;
    let mut excursion: f64 = 0.0;
    for n in 1..=blocks {
        for _ in 0..sub {
            sa.step(&mut a, j, s, h);
            sb.step(&mut b, j, s, h);
        }
        let drift = norm_drift(&a).max(norm_drift(&b));
        for (x, x0) in a.iter().zip(&initial.omegas) {
            excursion = excursion.max(vec3::norm(vec3::sub(*x, *x0)));
        }
        if !(drift <= MAX_NORM_DRIFT) {
            return Err(Error::Integration(alloc::format!("norm drift {drift:.3e}; reduce dt")));
        }
        let d = a.iter().zip(&b).map(|(x, y)| vec3::dot(vec3::sub(*y, *x), vec3::sub(*y, *x))).sum::<f64>().sqrt();
        acc += (d / cfg.eps0).ln();
        times.push(n as f64 * cfg.renorm_every);
        logs.push(acc);
        let f = cfg.eps0 / d;
        for i in 0..l {
            let v = vec3::add(a[i], vec3::scale(f, vec3::sub(b[i], a[i])));
            // keep the twin on the sphere; the reference itself is never projected
            b[i] = vec3::scale(vec3::norm(a[i]) / vec3::norm(v), v);
        }
    }
    let start = blocks / 5;
    let (ts, ls) = (&times[start..], &logs[start..]);
    let slope = least_squares_slope(ts, ls);
    let efolds = ls[ls.len() - 1] - ls[0];
    let unstable = slope > 0.0 && efolds > MIN_EFOLDS;
    Ok(LyapunovEstimate { rate: if unstable { slope } else { 0.0 }, slope, efolds, unstable, reference_excursion: excursion })
}

pub(crate) fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

/// Real `2L x 2L` matrix of the rotating-frame equations
/// `dn_j/dt = (S (J_{j-1}^T n_{j-1} + J_j n_{j+1}) + h_j) x n_j`
/// linearized about `n_j = z`, acting on `(x_0..x_{L-1}, y_0..y_{L-1})`.
pub fn linearized_matrix(frame: &FrameData, s: f64) -> RMat {
    let l = frame.len();
    let (_, om) = stationarity_residual(frame, s);
    let mut m = RMat::zeros(2 * l, 2 * l);
    for j in 0..l {
        let jm = (j + l - 1) % l;
        let jp = (j + 1) % l;
        // dg_j = S (J_{j-1}^T dn_{j-1} + J_j dn_{j+1}); dx_j += dg_y, dy_j -= dg_x
        for (site, get) in [(jm, 0usize), (jp, 1usize)] {
            let b = if get == 0 { vec3::transpose(frame.jr[jm]) } else { frame.jr[j] };
            for col in 0..2 {
                m[(j, site + col * l)] += s * b[1][col];
                m[(j + l, site + col * l)] -= s * b[0][col];
            }
        }
        m[(j, j + l)] -= om[j];
        m[(j + l, j)] += om[j];
    }
    m
}
