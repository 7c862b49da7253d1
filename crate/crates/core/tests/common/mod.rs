#![allow(dead_code)]

use hoibc::impedance::IbcCoefficients;
use num_complex::Complex64;

/// Error-free product: `a * b = p + e` exactly.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Double-double accumulator for real sums of products.
#[derive(Default, Clone, Copy)]
struct Acc {
    hi: f64,
    lo: f64,
}

impl Acc {
    fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (x - bp);
        self.hi = s;
        self.lo += err;
    }

    fn add_prod(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        self.lo += e;
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Coefficients of `N(ξ) − D(ξ) S(ξ)` up to `ξ^max_pow`, accumulated in
/// double-double so that cancelling low-order terms are resolved.
pub fn pade_residual_coeffs(c: &IbcCoefficients, taylor: &[Complex64], max_pow: usize) -> Vec<Complex64> {
    let num = [c.a0, c.a, c.a_prime];
    let den = [Complex64::new(1.0, 0.0), c.b, c.b_prime];
    (0..=max_pow)
        .map(|m| {
            let (mut re, mut im) = (Acc::default(), Acc::default());
            if m < 3 {
                re.add(num[m].re);
                im.add(num[m].im);
            }
            for (i, d) in den.iter().enumerate() {
                if i > m || m - i >= taylor.len() {
                    continue;
                }
                let t = taylor[m - i];
                re.add_prod(-d.re, t.re);
                re.add_prod(d.im, t.im);
                im.add_prod(-d.re, t.im);
                im.add_prod(-d.im, t.re);
            }
            Complex64::new(re.value(), im.value())
        })
        .collect()
}

/// `|R(ξ)| / |ξ|^order` with `R` the Padé residual against the Taylor
/// polynomial `taylor`.
pub fn pade_residual_ratio(c: &IbcCoefficients, taylor: &[Complex64], xi: f64, order: i32) -> f64 {
    let r = pade_residual_coeffs(c, taylor, taylor.len() + 2);
    let mut v = Complex64::new(0.0, 0.0);
    for (m, rm) in r.iter().enumerate() {
        v += rm * xi.powi(m as i32);
    }
    v.norm() / xi.abs().powi(order)
}
