//! Bessel functions of integer order.
//!
//! `J_n` uses the ascending series where its terms do not cancel badly and
//! Miller's backward recurrence otherwise. The recurrence is normalised with
//! `e^{∓iz} = J_0 + 2 Σ (∓i)^k J_k`, picking the sign whose left side is large
//! so the sum is free of cancellation for complex arguments. `Y_0` and `Y_1`
//! come from the Neumann series over the same recurrence, higher orders from
//! forward recurrence (stable for `Y`).

use super::{Result, SpecfunError, EULER_GAMMA};
use num_complex::Complex64;
use std::f64::consts::{FRAC_2_PI, PI};

/// Largest supported order.
pub const MAX_ORDER: u32 = 200;
/// Largest supported `|z|` for the complex-argument routines.
pub const MAX_ARG: f64 = 1.0e4;

/// Below this modulus the ascending series is used for every order.
const SERIES_RADIUS: f64 = 8.0;
/// The real-argument `Y` series loses digits faster than the `J` series.
const REAL_SERIES_RADIUS: f64 = 5.0;
/// From here on the Hankel expansion converges to full precision before its
/// terms start to grow, and it is much cheaper than the recurrence.
const REAL_ASYMPTOTIC_FROM: f64 = 25.0;
/// Complex division squares moduli, so keep recurrence values well below
/// sqrt(f64::MAX).
const RESCALE: f64 = 1.0e100;

fn check_range(n: u32, z: Complex64) -> Result<()> {
    if n > MAX_ORDER {
        return Err(SpecfunError::Range(format!("order {n} exceeds {MAX_ORDER}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > MAX_ARG {
        return Err(SpecfunError::Range(format!("|z| = {} exceeds {MAX_ARG}", z.norm())));
    }
    Ok(())
}

fn check_cut(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(SpecfunError::Domain(format!("Y_n is undefined on the cut, z = {z}")));
    }
    Ok(())
}

#[inline]
fn series_ok(n: u32, z: Complex64) -> bool {
    let a = z.norm();
    a <= SERIES_RADIUS || 0.25 * a * a <= 4.0 * (n as f64 + 1.0)
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Ascending series `J_n(z) = (z/2)^n Σ (−z²/4)^k / (k! (n+k)!)`.
fn j_series(n: u32, z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return if n == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
    }
    let half = z * 0.5;
    let prefactor = if n == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        (half.ln() * n as f64 - ln_factorial(n)).exp()
    };
    let mq = -(half * half);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..400u32 {
        term = term * mq / (k as f64 * (n + k) as f64);
        sum += term;
        if term.norm() <= 1.0e-17 * sum.norm() {
            break;
        }
    }
    prefactor * sum
}

struct Miller {
    j: Vec<Complex64>,
    /// `Σ_{k≥1} (−1)^k J_{2k} / k`
    s0: Complex64,
    /// `Σ_{k≥1} (−1)^k (J_{2k−1} − J_{2k+1}) / k`
    s1: Complex64,
}

fn start_index(nstore: usize, a: f64) -> usize {
    let m = nstore.max(a.ceil() as usize) + 30 + (10.0 * a.cbrt()).ceil() as usize;
    m + (m & 1)
}

/// Weight of the odd-index value `f_j` in the `s1` sum.
#[inline]
fn s1_weight(j: usize) -> f64 {
    let up = (j + 1) / 2;
    let mut w = if up % 2 == 0 { 1.0 } else { -1.0 } / up as f64;
    let down = (j - 1) / 2;
    if down >= 1 {
        w -= if down % 2 == 0 { 1.0 } else { -1.0 } / down as f64;
    }
    w
}

fn miller(z: Complex64, nstore: usize) -> Miller {
    let m = start_index(nstore, z.norm());
    // e^{sz} = J0 + 2 Σ s^k J_k for s = ±i; pick the sign with |e^{sz}| ≥ 1.
    let s = if z.im >= 0.0 { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
    let mut j = vec![Complex64::new(0.0, 0.0); nstore + 1];
    let two_over_z = 2.0 / z;
    let mut f_next = Complex64::new(0.0, 0.0);
    let mut f = Complex64::new(1.0e-30, 0.0);
    let mut norm = Complex64::new(0.0, 0.0);
    let mut s0 = Complex64::new(0.0, 0.0);
    let mut s1 = Complex64::new(0.0, 0.0);
    // s^k, tracked downward as s^m then divided by s each step.
    let mut sk = s.powu(m as u32);
    let s_inv = 1.0 / s;
    let mut k = m;
    loop {
        if k <= nstore {
            j[k] = f;
        }
        if k >= 1 {
            norm += 2.0 * sk * f;
            if k % 2 == 0 {
                let h = k / 2;
                let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
                s0 += f * (sign / h as f64);
            } else {
                s1 += f * s1_weight(k);
            }
        } else {
            norm += f;
            break;
        }
        let f_prev = two_over_z * (k as f64) * f - f_next;
        f_next = f;
        f = f_prev;
        sk *= s_inv;
        k -= 1;
        if f.norm() > RESCALE {
            let r = 1.0 / RESCALE;
            f *= r;
            f_next *= r;
            norm *= r;
            s0 *= r;
            s1 *= r;
            for v in j.iter_mut().skip(k + 1) {
                *v *= r;
            }
        }
    }
    let scale = (s * z).exp() / norm;
    for v in j.iter_mut() {
        *v *= scale;
    }
    Miller { j, s0: s0 * scale, s1: s1 * scale }
}

/// `J_n(z)` for `n ≤ 200`, `|z| ≤ 1e4`.
pub fn bessel_j(n: u32, z: Complex64) -> Result<Complex64> {
    check_range(n, z)?;
    if series_ok(n, z) {
        return Ok(j_series(n, z));
    }
    Ok(miller(z, n as usize).j[n as usize])
}

/// `J_0(z) .. J_nmax(z)` from a single recurrence.
pub fn bessel_j_seq(nmax: u32, z: Complex64) -> Result<Vec<Complex64>> {
    check_range(nmax, z)?;
    if z.norm() <= SERIES_RADIUS {
        return Ok((0..=nmax).map(|n| j_series(n, z)).collect());
    }
    let mut out = miller(z, nmax as usize).j;
    for (n, v) in out.iter_mut().enumerate() {
        if series_ok(n as u32, z) {
            *v = j_series(n as u32, z);
        }
    }
    Ok(out)
}

fn y01(z: Complex64, m: &Miller) -> (Complex64, Complex64) {
    let l = (z * 0.5).ln() + EULER_GAMMA;
    let y0 = FRAC_2_PI * (l * m.j[0]) - (4.0 / PI) * m.s0;
    let y1 = FRAC_2_PI * (l * m.j[1]) - FRAC_2_PI * m.j[0] / z + FRAC_2_PI * m.s1;
    (y0, y1)
}

/// `H_0^(1)'/H_0^(1)` by Steed's continued fraction, evaluated with the
/// modified Lentz method.
fn hankel1_log_derivative0(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    // Not smaller: complex division squares the modulus.
    let tiny = Complex64::new(1.0e-150, 0.0);
    let mut f = tiny;
    let mut cc = f;
    let mut dd = Complex64::new(0.0, 0.0);
    for k in 1..100_000u32 {
        let kf = k as f64;
        let a = (kf - 0.5) * (kf - 0.5);
        let b = 2.0 * (z + i * kf);
        dd = b + a * dd;
        if dd.norm() == 0.0 {
            dd = tiny;
        }
        cc = b + a / cc;
        if cc.norm() == 0.0 {
            cc = tiny;
        }
        dd = 1.0 / dd;
        let delta = cc * dd;
        f *= delta;
        if (delta - 1.0).norm() < 1.0e-16 {
            break;
        }
    }
    -0.5 / z + i + i / z * f
}

/// Above this `|Im z|` the Neumann series for `Y` cancels too much and `Y`
/// is recovered from the Hankel function that decays away from the real axis.
const NEUMANN_MAX_IMAG: f64 = 1.0;

/// `J_n` and `Y_n` for `n = 0..=nmax`.
pub fn bessel_jy_seq(nmax: u32, z: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_range(nmax, z)?;
    check_cut(z)?;
    let n_all = (nmax as usize).max(1);
    let mil = miller(z, n_all);
    let mut j = mil.j.clone();
    for (n, v) in j.iter_mut().enumerate() {
        if series_ok(n as u32, z) {
            *v = j_series(n as u32, z);
        }
    }
    let i = Complex64::new(0.0, 1.0);
    let mut y = Vec::with_capacity(n_all + 1);
    if z.im.abs() <= NEUMANN_MAX_IMAG {
        let (y0, y1) = y01(z, &mil);
        y.push(y0);
        y.push(y1);
        for k in 1..n_all {
            let next = (2.0 * k as f64) / z * y[k] - y[k - 1];
            y.push(next);
        }
    } else {
        // H^(1) decays for Im z > 0 and H^(2) for Im z < 0; either one is
        // obtained from its logarithmic derivative and the Wronskian with J,
        // then carried upward, which is stable for it.
        let upper = z.im > 0.0;
        let (gamma, w) = if upper {
            (hankel1_log_derivative0(z), 2.0 * i / (PI * z))
        } else {
            (hankel1_log_derivative0(z.conj()).conj(), -2.0 * i / (PI * z))
        };
        let mut h = Vec::with_capacity(n_all + 1);
        let h0 = w / (j[0] * gamma + j[1]);
        h.push(h0);
        h.push(-gamma * h0);
        for k in 1..n_all {
            let next = (2.0 * k as f64) / z * h[k] - h[k - 1];
            h.push(next);
        }
        for (hn, jn) in h.iter().zip(&j) {
            y.push(if upper { -i * (hn - jn) } else { i * (hn - jn) });
        }
    }
    j.truncate(nmax as usize + 1);
    y.truncate(nmax as usize + 1);
    if y.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(SpecfunError::Range(format!("Y_n overflow for n ≤ {nmax}, z = {z}")));
    }
    Ok((j, y))
}

/// `Y_n(z)` on the principal branch (cut along the non-positive real axis).
pub fn bessel_y(n: u32, z: Complex64) -> Result<Complex64> {
    let (_, y) = bessel_jy_seq(n, z)?;
    Ok(y[n as usize])
}

/// `H_n^(2)(z) = J_n(z) − i Y_n(z)`.
pub fn hankel2(n: u32, z: Complex64) -> Result<Complex64> {
    let (j, y) = bessel_jy_seq(n, z)?;
    let i = Complex64::new(0.0, 1.0);
    Ok(j[n as usize] - i * y[n as usize])
}

/// `[J0(x), J1(x), Y0(x), Y1(x)]` for real `x > 0`, without the range limit
/// of the complex routines. Used in the hot assembly loops.
pub fn j01y01_real(x: f64) -> [f64; 4] {
    if x <= REAL_SERIES_RADIUS {
        real_series(x)
    } else if x < REAL_ASYMPTOTIC_FROM {
        real_miller(x)
    } else {
        real_asymptotic(x)
    }
}

/// `(H0^(2)(x), H1^(2)(x))` for real `x > 0`.
pub fn hankel2_01_real(x: f64) -> (Complex64, Complex64) {
    let [j0, j1, y0, y1] = j01y01_real(x);
    (Complex64::new(j0, -y0), Complex64::new(j1, -y1))
}

fn real_series(x: f64) -> [f64; 4] {
    let q = 0.25 * x * x;
    let l = (0.5 * x).ln() + EULER_GAMMA;
    // J0 and the Y0 correction
    let mut t = 1.0;
    let mut j0 = 1.0;
    let mut y0c = 0.0;
    // J1/(x/2) and the Y1 correction
    let mut u = 1.0;
    let mut j1s = 1.0;
    let mut y1c = 1.0; // (H_0 + H_1) u_0
    let mut hk = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        hk += 1.0 / kf;
        t *= -q / (kf * kf);
        j0 += t;
        y0c += hk * t;
        u *= -q / (kf * (kf + 1.0));
        j1s += u;
        y1c += (2.0 * hk + 1.0 / (kf + 1.0)) * u;
        if t.abs() < 1.0e-18 && u.abs() < 1.0e-18 {
            break;
        }
    }
    let j1 = 0.5 * x * j1s;
    let y0 = FRAC_2_PI * (l * j0 - y0c);
    let y1 = FRAC_2_PI * l * j1 - FRAC_2_PI / x - 0.5 * x * y1c / PI;
    [j0, j1, y0, y1]
}

/// Hankel's expansion `H^(1)_ν(x) ~ sqrt(2/(πx)) e^{iω} Σ i^k a_k(ν) / x^k`.
fn real_asymptotic(x: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (nu, slot) in [(0.0f64, 0usize), (1.0, 1)] {
        let mu = 4.0 * nu * nu;
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        let mut last = f64::INFINITY;
        for k in 1..60 {
            let kf = k as f64;
            let odd = 2.0 * kf - 1.0;
            term *= Complex64::new(0.0, (mu - odd * odd) / (8.0 * kf * x));
            let size = term.norm();
            if size > last {
                break;
            }
            sum += term;
            last = size;
            if size < 1.0e-17 {
                break;
            }
        }
        // e^{iω} with ω = x − νπ/2 − π/4; keep x separate so its reduction
        // is exact.
        let phase = Complex64::new(x.cos(), x.sin()) * Complex64::from_polar(1.0, -0.5 * nu * PI - 0.25 * PI);
        let h1 = (2.0 / (PI * x)).sqrt() * phase * sum;
        out[slot] = h1.re;
        out[slot + 2] = h1.im;
    }
    out
}

fn real_miller(x: f64) -> [f64; 4] {
    let m = start_index(1, x);
    let two_over_x = 2.0 / x;
    let mut f_next = 0.0;
    let mut f = 1.0e-30;
    let (mut norm, mut s0, mut s1) = (0.0, 0.0, 0.0);
    let f0;
    let mut f1 = 0.0;
    let mut k = m;
    loop {
        if k == 1 {
            f1 = f;
        }
        if k == 0 {
            f0 = f;
            norm += f;
            break;
        }
        if k % 2 == 0 {
            norm += 2.0 * f;
            let h = k / 2;
            s0 += f * (if h % 2 == 0 { 1.0 } else { -1.0 } / h as f64);
        } else {
            s1 += f * s1_weight(k);
        }
        let f_prev = two_over_x * (k as f64) * f - f_next;
        f_next = f;
        f = f_prev;
        k -= 1;
        if f.abs() > RESCALE {
            let r = 1.0 / RESCALE;
            f *= r;
            f_next *= r;
            norm *= r;
            s0 *= r;
            s1 *= r;
            f1 *= r;
        }
    }
    let c = 1.0 / norm;
    let (j0, j1, s0, s1) = (f0 * c, f1 * c, s0 * c, s1 * c);
    let l = (0.5 * x).ln() + EULER_GAMMA;
    let y0 = FRAC_2_PI * l * j0 - (4.0 / PI) * s0;
    let y1 = FRAC_2_PI * l * j1 - FRAC_2_PI * j0 / x + FRAC_2_PI * s1;
    [j0, j1, y0, y1]
}
