//! Exact diagonalization on small rings: spin-S operators, coherent product
//! states, the XYZ Hamiltonian, exact propagation and the exact contrast.
//!
//! Basis: local index `a = S - m` (so `a = 0` is `|S, S>`), many-body index
//! `sum_j a_j d^j` with `d = 2S + 1`; site 0 varies fastest.

use alloc::vec::Vec;
use faer::{Mat, Side};
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::linalg::{c, CMat};
use crate::scars::{self, ScarParams, SpinTexture, XyzCouplings};
use crate::vec3::{self, Mat3, Vec3};
use crate::C64;

/// Default cap on the Hilbert-space dimension.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// `m` of local index `a`.
fn m_of(two_s: u32, a: usize) -> f64 {
    0.5 * two_s as f64 - a as f64
}

/// `<m+1| S+ |m>` for local index `a` (state `m`); zero at the top.
fn raise(two_s: u32, a: usize) -> f64 {
    if a == 0 {
        return 0.0;
    }
    let s = 0.5 * two_s as f64;
    let m = m_of(two_s, a);
    (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

/// Dense `(2S+1)`-dimensional spin matrices.
#[derive(Debug, Clone)]
pub struct SpinOperatorSet {
    pub two_s: u32,
    pub sx: CMat,
    pub sy: CMat,
    pub sz: CMat,
}

impl SpinOperatorSet {
    pub fn new(two_s: u32) -> Self {
        let d = two_s as usize + 1;
        // S+ maps index a to a - 1
        let sp = CMat::from_fn(d, d, |i, j| if j == i + 1 { c(raise(two_s, j), 0.0) } else { c(0.0, 0.0) });
        let sm = sp.adjoint().to_owned();
        let sx = CMat::from_fn(d, d, |i, j| (sp[(i, j)] + sm[(i, j)]) * 0.5);
        let sy = CMat::from_fn(d, d, |i, j| (sp[(i, j)] - sm[(i, j)]) * c(0.0, -0.5));
        let sz = CMat::from_fn(d, d, |i, j| if i == j { c(m_of(two_s, i), 0.0) } else { c(0.0, 0.0) });
        Self { two_s, sx, sy, sz }
    }

    pub fn spin(&self) -> f64 {
        0.5 * self.two_s as f64
    }

    /// Max defect of `[Sx, Sy] = i Sz` (and cyclic) and of the Casimir.
    pub fn algebra_defect(&self) -> f64 {
        let comm = |a: &CMat, b: &CMat| a * b - b * a;
        let i = c(0.0, 1.0);
        let d = self.two_s as usize + 1;
        let s = self.spin();
        let mut e: f64 = 0.0;
        for (a, b, z) in [(&self.sx, &self.sy, &self.sz), (&self.sy, &self.sz, &self.sx), (&self.sz, &self.sx, &self.sy)] {
            let r = comm(a, b) - crate::linalg::scaled(z, i);
            e = e.max(crate::linalg::max_abs(&r));
        }
        let cas = &(&self.sx * &self.sx) + &(&(&self.sy * &self.sy) + &(&self.sz * &self.sz));
        let want = crate::linalg::scaled(&crate::linalg::identity(d), c(s * (s + 1.0), 0.0));
        e.max(crate::linalg::max_abs_diff(&cas, &want))
    }
}

/// Spin coherent state `|Omega>` with `<S> = S Omega`, in the local basis.
///
/// At the south pole this is `|S, -S>`, equal to the rotation of `|S, S>`
/// about `x` by `pi` up to a global phase.
pub fn coherent_state(omega: Vec3, two_s: u32) -> Result<Vec<C64>> {
    let n = vec3::norm(omega);
    if !((n - 1.0).abs() <= 1e-10) {
        return Err(domain("Bloch vector must be unit norm"));
    }
    let theta = (omega[2] / n).clamp(-1.0, 1.0).acos();
    let phi = omega[1].atan2(omega[0]);
    let (ch, sh) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let d = two_s as usize + 1;
    let mut binom = 1.0f64;
    let mut out = Vec::with_capacity(d);
    for a in 0..d {
        // m = S - a: cos^{S+m} = cos^{2S-a}, sin^{S-m} = sin^a
        if a > 0 {
            binom *= (two_s as f64 - a as f64 + 1.0) / a as f64;
        }
        let amp = binom.sqrt() * ch.powi((two_s as usize - a) as i32) * sh.powi(a as i32);
        out.push(C64::from_polar(amp, phi * a as f64));
    }
    Ok(out)
}

/// Product state `bigotimes_j |Omega_j>`.
pub fn product_state(texture: &SpinTexture, two_s: u32, cap: usize) -> Result<ManyBodyState> {
    let l = texture.len();
    let d = two_s as usize + 1;
    let dim = checked_dim(d, l, cap)?;
    let locals: Vec<Vec<C64>> = texture.omegas.iter().map(|w| coherent_state(*w, two_s)).collect::<Result<_>>()?;
    let mut amp = alloc::vec![c(1.0, 0.0); dim];
    for (idx, a) in amp.iter_mut().enumerate() {
        let mut r = idx;
        for loc in &locals {
            *a *= loc[r % d];
            r /= d;
        }
    }
    Ok(ManyBodyState { l, two_s, amplitudes: amp })
}

fn checked_dim(d: usize, l: usize, cap: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..l {
        dim = dim.saturating_mul(d);
    }
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(dim)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    pub l: usize,
    pub two_s: u32,
    pub amplitudes: Vec<C64>,
}

impl ManyBodyState {
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `<S_j>` for every site.
    pub fn local_spins(&self) -> Vec<Vec3> {
        let d = self.two_s as usize + 1;
        let mut out = alloc::vec![[0.0; 3]; self.l];
        for (idx, z) in self.amplitudes.iter().enumerate() {
            if z.norm_sqr() == 0.0 {
                continue;
            }
            let mut r = idx;
            let mut stride = 1;
            for o in out.iter_mut() {
                let a = r % d;
                o[2] += z.norm_sqr() * m_of(self.two_s, a);
                if a > 0 {
                    // <idx - stride| S+ |idx> contributes conj(psi[idx - stride]) psi[idx]
                    let v = self.amplitudes[idx - stride].conj() * z * raise(self.two_s, a);
                    o[0] += v.re;
                    o[1] += v.im;
                }
                r /= d;
                stride *= d;
            }
        }
        out
    }
}

/// Real symmetric Hamiltonian in compressed-row form.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    pub l: usize,
    pub two_s: u32,
    pub dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// `H = sum_j sum_a J_a S^a_j S^a_{j+1}` on a ring (open chain for `L = 2`
/// would double count; the ring with two sites has both bonds, as printed).
pub fn build_hamiltonian(j: &XyzCouplings, two_s: u32, l: usize, cap: usize) -> Result<SparseHamiltonian> {
    if l < 2 || two_s == 0 {
        return Err(domain("need L >= 2 and 2S >= 1"));
    }
    let d = two_s as usize + 1;
    let dim = checked_dim(d, l, cap)?;
    let [jx, jy, jz] = j.diagonal();
    let pair = 0.25 * (jx - jy);
    let hop = 0.25 * (jx + jy);
    let pow: Vec<usize> = (0..l).map(|s| d.pow(s as u32)).collect();
    let mut row_start = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for idx in 0..dim {
        entries.clear();
        let digit = |s: usize| (idx / pow[s]) % d;
        let mut diag = 0.0;
        for s in 0..l {
            let t = (s + 1) % l;
            let (a, b) = (digit(s), digit(t));
            diag += jz * m_of(two_s, a) * m_of(two_s, b);
            // S+_s S-_t + S-_s S+_t and S+S+ + S-S-; S+ lowers the index
            let up = |a: usize| if a > 0 { Some((a - 1, raise(two_s, a))) } else { None };
            let down = |a: usize| if a < d - 1 { Some((a + 1, raise(two_s, a + 1))) } else { None };
            let mut push = |na: Option<(usize, f64)>, nb: Option<(usize, f64)>, coef: f64| {
                if coef == 0.0 {
                    return;
                }
                if let (Some((na, ea)), Some((nb, eb))) = (na, nb) {
                    let target = idx - a * pow[s] + na * pow[s] - b * pow[t] + nb * pow[t];
                    entries.push((target, coef * ea * eb));
                }
            };
            push(up(a), down(b), hop);
            push(down(a), up(b), hop);
            push(up(a), up(b), pair);
            push(down(a), down(b), pair);
        }
        entries.push((idx, diag));
        entries.sort_by_key(|e| e.0);
        row_start.push(cols.len());
        let mut last = usize::MAX;
        for &(cidx, v) in entries.iter() {
            if cidx == last {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(cidx);
                vals.push(v);
                last = cidx;
            }
        }
    }
    row_start.push(cols.len());
    Ok(SparseHamiltonian { l, two_s, dim, row_start, cols, vals })
}

impl SparseHamiltonian {
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|r| (self.row_start[r]..self.row_start[r + 1]).map(|p| x[self.cols[p]] * self.vals[p]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::<f64>::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for p in self.row_start[r]..self.row_start[r + 1] {
                m[(r, self.cols[p])] += self.vals[p];
            }
        }
        m
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let m = self.to_dense();
        let mut e: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..i {
                e = e.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        e
    }

    pub fn expectation(&self, psi: &ManyBodyState) -> f64 {
        let h = self.apply(&psi.amplitudes);
        psi.amplitudes.iter().zip(&h).map(|(a, b)| a.conj() * b).sum::<C64>().re / psi.norm().powi(2)
    }
}

/// `H |psi> - E |psi>` normalized by `|E|`, for a commensurate scar under
/// its parent Hamiltonian with `E = S^2 sum_j Omega_j . J Omega_{j+1}`.
pub fn eigenstate_residual(p: &ScarParams) -> Result<f64> {
    eigenstate_residual_with(p, &scars::parent_couplings(p.kappa, p.q)?)
}

/// Same residual under arbitrary couplings `j`.
pub fn eigenstate_residual_with(p: &ScarParams, j: &XyzCouplings) -> Result<f64> {
    p.validate()?;
    if !p.is_commensurate() {
        return Err(domain("q is not commensurate with the ring"));
    }
    let tex = scars::scar_texture(p);
    let psi = product_state(&tex, p.two_s, DEFAULT_DIM_CAP)?;
    let h = build_hamiltonian(j, p.two_s, p.l, DEFAULT_DIM_CAP)?;
    let s = p.spin();
    let e = s * s * scars::bond_energy_sum(&tex, &j.matrix());
    let hp = h.apply(&psi.amplitudes);
    let r = hp.iter().zip(&psi.amplitudes).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
    Ok(r / e.abs().max(1e-300))
}

/// Exact propagator `exp(-i H t)` from a full eigendecomposition.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    pub energies: Vec<f64>,
    vecs: Mat<f64>,
}

impl ExactPropagator {
    pub fn new(h: &SparseHamiltonian) -> Result<Self> {
        let e = h.to_dense().self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigen)?;
        let energies = e.S().column_vector().iter().copied().collect();
        Ok(Self { energies, vecs: e.U().to_owned() })
    }

    /// Eigenbasis coefficients `V^T psi`.
    fn coefficients(&self, psi: &ManyBodyState) -> Vec<C64> {
        let n = self.energies.len();
        (0..n).map(|k| (0..n).map(|i| psi.amplitudes[i] * self.vecs[(i, k)]).sum()).collect()
    }

    pub fn evolve(&self, psi: &ManyBodyState, times: &[f64]) -> Vec<ManyBodyState> {
        let coef = self.coefficients(psi);
        let n = coef.len();
        times
            .iter()
            .map(|&t| {
                let ph: Vec<C64> = coef.iter().zip(&self.energies).map(|(z, e)| z * C64::from_polar(1.0, -e * t)).collect();
                let amp = (0..n).map(|i| (0..n).map(|k| ph[k] * self.vecs[(i, k)]).sum()).collect();
                ManyBodyState { l: psi.l, two_s: psi.two_s, amplitudes: amp }
            })
            .collect()
    }
}

pub fn evolve_exact(psi: &ManyBodyState, h: &SparseHamiltonian, times: &[f64]) -> Result<Vec<ManyBodyState>> {
    if psi.dim() != h.dim {
        return Err(Error::Length { expected: h.dim, got: psi.dim() });
    }
    Ok(ExactPropagator::new(h)?.evolve(psi, times))
}

/// `D(t) = (1/LS) sum_j <psi(t)| Omega_j(t) . S_j |psi(t)>`, with `psi(0)`
/// the product state of `classical(0)` evolved under `j`.
pub fn contrast_exact(
    classical: &dyn Fn(f64) -> SpinTexture,
    j: &XyzCouplings,
    two_s: u32,
    times: &[f64],
) -> Result<crate::spinwave::ContrastSeries> {
    let t0 = classical(0.0);
    let l = t0.len();
    let psi0 = product_state(&t0, two_s, DEFAULT_DIM_CAP)?;
    let h = build_hamiltonian(j, two_s, l, DEFAULT_DIM_CAP)?;
    let s = 0.5 * two_s as f64;
    let states = evolve_exact(&psi0, &h, times)?;
    let d = states
        .iter()
        .zip(times)
        .map(|(psi, &t)| {
            let w = classical(t);
            let spins = psi.local_spins();
            spins.iter().zip(&w.omegas).map(|(sj, oj)| vec3::dot(*sj, *oj)).sum::<f64>() / (l as f64 * s)
        })
        .collect();
    Ok(crate::spinwave::ContrastSeries::from_d(s, times.to_vec(), d))
}

/// Contrast along a classical trajectory obtained by integrating the
/// mean-field equations with the same couplings.
pub fn contrast_exact_ll(initial: &SpinTexture, j: &XyzCouplings, two_s: u32, times: &[f64]) -> Result<crate::spinwave::ContrastSeries> {
    let s = 0.5 * two_s as f64;
    let dt = crate::lattice_classical::default_dt(s);
    let jm: Mat3 = j.matrix();
    let mut textures = Vec::with_capacity(times.len());
    let mut cur = initial.clone();
    let mut t_prev = 0.0;
    for &t in times {
        if t < t_prev {
            return Err(domain("times must be non-decreasing"));
        }
        if t > t_prev {
            let n = ((t - t_prev) / dt).ceil().max(1.0);
            let tr = crate::lattice_classical::ll_evolve(&cur, &jm, s, (t - t_prev) / n, t - t_prev, usize::MAX)?;
            cur = tr.last().clone();
        }
        textures.push(cur.clone());
        t_prev = t;
    }
    let lookup = |t: f64| {
        let i = times.iter().position(|x| *x == t).unwrap_or(0);
        if t == 0.0 {
            initial.clone()
        } else {
            textures[i].clone()
        }
    };
    contrast_exact(&lookup, j, two_s, times)
}
