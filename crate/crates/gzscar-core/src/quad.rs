//! Gauss-Legendre quadrature on composite panels.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule, roots of `P_n` by Newton iteration from the
    /// Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        let n = n.max(1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        h * self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(m + h * x)).sum::<f64>()
    }

    /// Same rule on `panels` equal sub-intervals.
    pub fn composite(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels).map(|p| self.integrate(a + h * p as f64, a + h * (p + 1) as f64, &mut f)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 20, 64] {
            let g = GaussLegendre::new(n);
            assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let g = GaussLegendre::new(6);
        // degree 11 is integrated exactly by 6 points
        let v = g.integrate(0.0, 2.0, |x| x.powi(11) - 3.0 * x.powi(4));
        let want = 2f64.powi(12) / 12.0 - 3.0 * 2f64.powi(5) / 5.0;
        assert!((v - want).abs() < 1e-10 * want.abs());
    }

    #[test]
    fn composite_smooth() {
        let g = GaussLegendre::new(10);
        let v = g.composite(0.0, PI, 8, f64::sin);
        assert!((v - 2.0).abs() < 1e-14);
    }
}
