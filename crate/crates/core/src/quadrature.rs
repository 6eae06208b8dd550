//! Gauss–Legendre rules on `[0,1]` and their tensor products.

use crate::error::{Error, Result};
use crate::par::Exec;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::Precondition(format!("quadrature order {order} < 2")));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Chebyshev-like initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Map [-1,1] to [0,1].
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Tensor-product rule on `[0,1]^dim`; the node index is decoded in
    /// mixed radix with the first axis fastest. Accumulation is ordered, so
    /// both execution modes give identical sums.
    pub fn integrate_cube<F>(&self, dim: usize, exec: Exec, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync + Send,
    {
        let m = self.order();
        let total = m
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::Budget(format!("{m}^{dim} quadrature nodes")))?;
        let values = exec.map_range(total, |mut code| {
            let mut t = Vec::with_capacity(dim);
            let mut w = 1.0;
            for _ in 0..dim {
                let k = code % m;
                code /= m;
                t.push(self.nodes[k]);
                w *= self.weights[k];
            }
            f(&t).map(|v| w * v)
        });
        let mut acc = 0.0;
        for v in values {
            acc += v?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let gl = GaussLegendre::new(5).unwrap();
        // Exact up to degree 9.
        let v = gl.integrate(|x| x.powi(9));
        assert!((v - 0.1).abs() < 1e-15);
        assert!((gl.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cube_product() {
        let gl = GaussLegendre::new(4).unwrap();
        let v = gl
            .integrate_cube(3, Exec::Sequential, |t| Ok(t[0] * t[1] * t[1] * t[2].powi(3)))
            .unwrap();
        assert!((v - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn order_checked() {
        assert!(GaussLegendre::new(1).is_err());
    }
}
