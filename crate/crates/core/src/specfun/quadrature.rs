//! Gauss–Legendre and log-weighted Gauss rules.

use super::{Result, SpecfunError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum QuadKind {
    /// Weight 1 on `[−1, 1]`.
    GaussLegendre,
    /// Weight `−ln t` on `(0, 1)`.
    GaussLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: QuadKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of `w_i f(x_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Pairs `(t, w)` for integrating over `[0, 1]`. Gauss–Legendre rules are
    /// mapped affinely; log rules already live there.
    pub fn unit_interval(&self) -> Vec<(f64, f64)> {
        match self.kind {
            QuadKind::GaussLegendre => self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w))
                .collect(),
            QuadKind::GaussLog => self.nodes.iter().copied().zip(self.weights.iter().copied()).collect(),
        }
    }
}

pub fn quad_rule(kind: QuadKind, n: usize) -> Result<QuadratureRule> {
    if !(1..=64).contains(&n) {
        return Err(SpecfunError::Range(format!("quadrature order {n} outside 1..=64")));
    }
    let (nodes, weights) = match kind {
        QuadKind::GaussLegendre => gauss_legendre(n),
        QuadKind::GaussLog => gauss_log(n),
    };
    Ok(QuadratureRule { nodes, weights, kind })
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * p - pm) / (z * z - 1.0);
            if n == 1 {
                dp = 1.0;
            }
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss rule for `−ln t` on `(0, 1)` via the modified Chebyshev algorithm
/// with shifted-Legendre moments, then Golub–Welsch.
fn gauss_log(n: usize) -> (Vec<f64>, Vec<f64>) {
    let m2 = 2 * n;
    // Recurrence of the monic shifted Legendre polynomials.
    let a = vec![0.5; m2];
    let b: Vec<f64> = (0..m2)
        .map(|k| {
            let kf = k as f64;
            if k == 0 { 1.0 } else { kf * kf / (4.0 * (4.0 * kf * kf - 1.0)) }
        })
        .collect();
    // Modified moments against the monic polynomials.
    let mut mu = vec![0.0; m2];
    let mut scale = 1.0;
    for k in 0..m2 {
        if k > 0 {
            let kf = k as f64;
            scale *= kf * kf / ((2.0 * kf) * (2.0 * kf - 1.0));
        }
        let raw = if k == 0 { 1.0 } else { (if k % 2 == 0 { 1.0 } else { -1.0 }) / ((k * (k + 1)) as f64) };
        mu[k] = raw * scale;
    }
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut sig_prev = vec![0.0; m2 + 1];
    let mut sig = mu.clone();
    sig.push(0.0);
    alpha[0] = a[0] + mu[1] / mu[0];
    beta[0] = mu[0];
    for k in 1..n {
        let mut next = vec![0.0; m2 + 1];
        for l in k..(m2 - k) {
            let lower = if l >= 1 { sig[l - 1] } else { 0.0 };
            next[l] = sig[l + 1] - (alpha[k - 1] - a[l]) * sig[l] - beta[k - 1] * sig_prev[l] + b[l] * lower;
        }
        alpha[k] = a[k] + next[k + 1] / next[k] - sig[k] / sig[k - 1];
        beta[k] = next[k] / sig[k - 1];
        sig_prev = sig;
        sig = next;
    }
    let mut d = alpha;
    let mut e: Vec<f64> = (0..n).map(|i| if i + 1 < n { beta[i + 1].sqrt() } else { 0.0 }).collect();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiag_ql(&mut d, &mut e, &mut z);
    let mut pairs: Vec<(f64, f64)> = d.iter().zip(&z).map(|(&x, &v)| (x, beta[0] * v * v)).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

/// Implicit QL on a symmetric tridiagonal matrix. `e[i]` couples `i` and
/// `i+1`. Only the first row of the eigenvector matrix is carried in `z`.
fn tridiag_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 100, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
