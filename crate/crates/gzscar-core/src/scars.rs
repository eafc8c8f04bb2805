//! Elliptic product-state scars: parameters, textures, parent couplings,
//! energy density and the product-eigenstate conditions.

use alloc::vec::Vec;
use num_traits::Float;

use crate::elliptic::{self, e_unchecked, epsilon_unchecked, k_unchecked, sncndn};
use crate::error::{domain, Error, Result};
use crate::rotframe;
use crate::vec3::{self, Mat3, Vec3};

/// Full parameterization of a scar and of its parent Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScarParams {
    pub kappa: f64,
    pub q: f64,
    pub gamma: f64,
    pub phi: f64,
    /// Twice the spin, so that half-integer spins are exact.
    pub two_s: u32,
    pub l: usize,
    /// Winding number; `q = 4 M K / L` on a ring.
    pub m: usize,
}

impl ScarParams {
    /// Ring of `l` sites with `q = 4 m K(kappa) / l`.
    pub fn commensurate(kappa: f64, m: usize, l: usize, gamma: f64, phi: f64, two_s: u32) -> Result<Self> {
        if !(0.0..1.0).contains(&kappa) {
            return Err(domain("kappa must lie in [0, 1)"));
        }
        if l < 2 || m == 0 {
            return Err(domain("need L >= 2 and M >= 1"));
        }
        let q = 4.0 * m as f64 * k_unchecked(kappa) / l as f64;
        let p = Self { kappa, q, gamma, phi, two_s, l, m };
        p.validate()?;
        Ok(p)
    }

    pub fn spin(&self) -> f64 {
        0.5 * self.two_s as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.kappa) {
            return Err(domain("kappa must lie in [0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(domain("gamma must lie in [0, 1]"));
        }
        if !self.phi.is_finite() {
            return Err(domain("phi must be finite"));
        }
        let k = k_unchecked(self.kappa);
        if !(self.q > 0.0 && self.q < k) {
            return Err(domain("q must lie in (0, K(kappa))"));
        }
        if self.two_s == 0 {
            return Err(domain("2S must be a positive integer"));
        }
        if self.l < 2 {
            return Err(domain("L must be at least 2"));
        }
        Ok(())
    }

    /// Whether `q = 4 M K / L` holds to rounding.
    pub fn is_commensurate(&self) -> bool {
        let target = 4.0 * self.m as f64 * k_unchecked(self.kappa) / self.l as f64;
        (self.q - target).abs() <= 1e-12 * target.max(1.0)
    }
}

/// A sequence of unit Bloch vectors, one per site.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinTexture {
    pub omegas: Vec<Vec3>,
}

impl SpinTexture {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(omegas: Vec<Vec3>) -> Result<Self> {
        for (j, w) in omegas.iter().enumerate() {
            if (vec3::norm(*w) - 1.0).abs() > Self::NORM_TOL {
                return Err(domain(alloc::format!("Bloch vector at site {j} is not unit norm")));
            }
        }
        Ok(Self { omegas })
    }

    /// Skips the norm check; used for integrator states whose drift is tracked separately.
    pub fn new_unchecked(omegas: Vec<Vec3>) -> Self {
        Self { omegas }
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Uniform texture along `dir` (normalized).
    pub fn uniform(dir: Vec3, l: usize) -> Self {
        let n = vec3::norm(dir);
        Self { omegas: alloc::vec![vec3::scale(1.0 / n, dir); l] }
    }

    pub fn max_norm_defect(&self) -> f64 {
        self.omegas.iter().map(|w| (vec3::norm(*w) - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// XYZ couplings with optional perturbations along x and z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyzCouplings {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub djx: f64,
    pub djz: f64,
}

impl XyzCouplings {
    pub fn new(jx: f64, jy: f64, jz: f64) -> Self {
        Self { jx, jy, jz, djx: 0.0, djz: 0.0 }
    }

    pub fn perturbed(self, djx: f64, djz: f64) -> Self {
        Self { djx, djz, ..self }
    }

    /// The total exchange matrix `diag(Jx + dJx, Jy, Jz + dJz)`.
    pub fn matrix(&self) -> Mat3 {
        vec3::diag(self.diagonal())
    }

    pub fn diagonal(&self) -> Vec3 {
        [self.jx + self.djx, self.jy, self.jz + self.djz]
    }
}

/// Parent couplings `(dn q, 1, cn q)` for which every scar with `(kappa, q)` is an eigenstate.
pub fn parent_couplings(kappa: f64, q: f64) -> Result<XyzCouplings> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(domain("kappa must lie in [0, 1)"));
    }
    let k = k_unchecked(kappa);
    if !(q > 0.0 && q < k) {
        return Err(domain("q must lie in (0, K(kappa))"));
    }
    let (_, cn, dn) = sncndn(q, kappa);
    Ok(XyzCouplings::new(dn, 1.0, cn))
}

/// Inverse of [`parent_couplings`] on the principal branch `0 < q <= K(kappa)`.
pub fn solve_kq(jx: f64, jz: f64) -> Result<(f64, f64)> {
    if !(jx.is_finite() && jz.is_finite()) {
        return Err(domain("couplings must be finite"));
    }
    if jz > jx {
        return Err(domain("need Jz <= Jx"));
    }
    if jx > 1.0 || jz < 0.0 {
        return Err(domain("need 0 <= Jz <= Jx <= 1"));
    }
    if jz >= 1.0 {
        return Err(domain("Jx = Jz = 1 is degenerate: kappa is indeterminate"));
    }
    let k2 = (1.0 - jx * jx) / (1.0 - jz * jz);
    let kappa = k2.sqrt();
    if kappa >= 1.0 {
        return Err(domain("Jx = Jz = 0 gives kappa = 1 and an infinite wavelength"));
    }
    // cn(q) = Jz  <=>  am(q) = arccos(Jz)
    let q = elliptic::incomplete_f(jz.acos(), kappa)?;
    Ok((kappa, q))
}

/// Bloch vectors `(alpha cn, beta sn, gamma dn)(q j + phi)` for `j = 0..L`.
pub fn scar_texture(p: &ScarParams) -> SpinTexture {
    texture_sites(p.kappa, p.q, p.gamma, p.phi, p.l)
}

pub(crate) fn texture_sites(kappa: f64, q: f64, gamma: f64, phi: f64, l: usize) -> SpinTexture {
    let alpha = (1.0 - gamma * gamma).max(0.0).sqrt();
    let beta = (1.0 - gamma * gamma * (1.0 - kappa * kappa)).max(0.0).sqrt();
    let omegas = (0..l)
        .map(|j| {
            let (sn, cn, dn) = sncndn(q * j as f64 + phi, kappa);
            [alpha * cn, beta * sn, gamma * dn]
        })
        .collect();
    SpinTexture { omegas }
}

/// Energy per site of a scar under its parent Hamiltonian.
pub fn energy_density(kappa: f64, q: f64, s: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(domain("kappa must lie in [0, 1)"));
    }
    if !q.is_finite() {
        return Err(domain("q must be finite"));
    }
    let k = k_unchecked(kappa);
    let (sn, cn, dn) = sncndn(q, kappa);
    let zeta = epsilon_unchecked(q, kappa) - q * e_unchecked(kappa) / k;
    Ok(s * s * (cn * dn + sn * zeta))
}

/// `sum_j Omega_j . J Omega_{j+1}` on a ring.
pub fn bond_energy_sum(texture: &SpinTexture, j: &Mat3) -> f64 {
    let w = &texture.omegas;
    let l = w.len();
    (0..l).map(|i| vec3::dot(w[i], vec3::matvec(*j, w[(i + 1) % l]))).sum()
}

/// Per-site residuals of the two product-eigenstate conditions.
///
/// `r1_j` measures `J^xx - J^yy + i(J^xy + J^yx)` of bond `j` in the local
/// frame, `r2_j` the transverse part of `(J_j^{xz} + J_{j-1}^{zx}, J_j^{yz} + J_{j-1}^{zy})`.
/// Both are invariant under the residual gauge freedom of the frame.
pub fn gz_condition_residuals(texture: &SpinTexture, j: &XyzCouplings) -> Result<(Vec<f64>, Vec<f64>)> {
    let bonds = alloc::vec![j.matrix(); texture.len()];
    gz_condition_residuals_bonds(texture, &bonds)
}

/// As [`gz_condition_residuals`] with one exchange matrix per bond `(j, j+1)`.
pub fn gz_condition_residuals_bonds(texture: &SpinTexture, bonds: &[Mat3]) -> Result<(Vec<f64>, Vec<f64>)> {
    if bonds.len() != texture.len() {
        return Err(Error::Length { expected: texture.len(), got: bonds.len() });
    }
    let frames = rotframe::geodesic_rotations(texture)?;
    let jr = rotframe::induced_exchange_bonds(&frames, bonds);
    Ok(residuals_from_jr(&jr))
}

pub(crate) fn residuals_from_jr(jr: &[Mat3]) -> (Vec<f64>, Vec<f64>) {
    let l = jr.len();
    let mut r1 = Vec::with_capacity(l);
    let mut r2 = Vec::with_capacity(l);
    for i in 0..l {
        let b = jr[i];
        let p = jr[(i + l - 1) % l];
        r1.push((b[0][0] - b[1][1]).hypot(b[0][1] + b[1][0]));
        r2.push((b[0][2] + p[2][0]).hypot(b[1][2] + p[2][1]));
    }
    (r1, r2)
}

/// All winding numbers `M` with `0 < 4 M K / L < K`, paired with their `q`.
pub fn commensurate_q(kappa: f64, l: usize) -> Result<Vec<(usize, f64)>> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(domain("kappa must lie in [0, 1)"));
    }
    if l < 2 {
        return Err(domain("L must be at least 2"));
    }
    let k = k_unchecked(kappa);
    Ok((1..).take_while(|&m| 4 * m < l).map(|m| (m, 4.0 * m as f64 * k / l as f64)).collect())
}
