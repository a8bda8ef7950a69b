//! Gauss-Hermite rules in the probabilists' normalisation: for `X ~ N(0, 1)`,
//! `E f(X) ≈ Σ w_k f(x_k)` with `Σ w_k = 1`.
//!
//! Nodes come from Newton iteration on the orthonormal Hermite recurrence, so
//! every weight carries full relative precision, including the far-tail ones
//! that an eigenvector-based construction would round to noise.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

const MAX_NEWTON: usize = 100;

impl GaussHermite {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DomainError("Gauss-Hermite order must be positive".into()));
        }
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let nf = n as f64;
        let m = n.div_ceil(2);
        let mut t = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mut z = 0.0f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * t[0],
                3 => 1.91 * z - 0.91 * t[1],
                _ => 2.0 * z - t[i - 2],
            };
            let mut pp = 0.0;
            let mut converged = false;
            for _ in 0..MAX_NEWTON {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::QuadratureNonConvergence(format!(
                    "Newton iteration for node {i} of {n}"
                )));
            }
            t[i] = z;
            t[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        let s2 = std::f64::consts::SQRT_2;
        let spi = std::f64::consts::PI.sqrt();
        let mut nodes: Vec<f64> = t.iter().map(|x| x * s2).collect();
        let mut weights: Vec<f64> = w.iter().map(|x| x / spi).collect();
        nodes.reverse();
        weights.reverse();
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E f(X)` for `X ~ N(mu, sigma²)`.
    pub fn expect_normal<F: FnMut(f64) -> f64>(&self, mu: f64, sigma: f64, mut f: F) -> f64 {
        let mut acc = crate::KahanSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mu + sigma * x));
        }
        acc.value()
    }

    /// Points `(z_k, ω_k)` with `∫ h(z) dz ≈ Σ ω_k h(z_k)`, exact when `h` is a
    /// `N(mu, sigma²)` density times a low-degree polynomial.
    pub fn line_rule(&self, mu: f64, sigma: f64) -> Vec<(f64, f64)> {
        let c = sigma * (2.0 * std::f64::consts::PI).sqrt();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (mu + sigma * x, w * c * (0.5 * x * x).exp()))
            .collect()
    }
}
